//! Exact arithmetic modulo prime powers, modular symbols for Gamma_0(N),
//! and local deformation data used to study congruences between modular
//! forms modulo p^n.

pub mod adjgroup;
pub mod arith;
pub mod auxprimes;
pub mod cohodim;
pub mod congr;
pub mod deformplan;
pub mod ellcurve;
pub mod localtypes;
pub mod modsym;
pub mod primes;
