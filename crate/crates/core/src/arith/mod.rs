//! Exact arithmetic over Z/p^n: canonical residues, dense matrices and
//! Howell canonical forms, plus the closed-form ramification exponent bound.

mod howell;
mod matrix;
mod residue;

pub use howell::howell_kernel;
pub(crate) use howell::{
    howell_form, intersect_spans, right_kernel_raw, solve_in_span, span_logp,
};
pub use matrix::ResidueMatrix;
pub use residue::{
    hensel_sqrt, modulus_exponent_bound, mult_order, quadratic_roots, ArithError,
    PrimePowerModulus, ResidueInt,
};
