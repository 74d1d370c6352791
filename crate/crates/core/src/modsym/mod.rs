//! Weight-two modular symbols for Gamma_0(N) with trivial character, over
//! exact rationals or Z/p^n.
//!
//! The quotient of Manin symbols by the two- and three-term relations is
//! built once per level; Hecke operators T_l and U_q act through Heilbronn
//! matrices and cusp-to-cusp paths, and degeneracy maps move cuspidal
//! vectors between levels M | N.

pub mod cusps;
pub mod hecke;
pub mod p1;
pub mod ring;
pub mod space;

pub use cusps::{cusp_classes, cusp_number, lift_to_sl2, Cusp};
pub use hecke::{
    ambient_hecke_matrix, apply_operator, degeneracy_map, hecke_operator, heilbronn_matrices,
    mat_mul, vec_mat, DegeneracyMap, HeckeMatrix, OperatorLabel,
};
pub use p1::{psi_index, P1Index};
pub use ring::{CoeffRing, RationalField, ZpnRing};
pub use space::{build_space, genus_x0, sturm_bound, ManinSymbolSpace, ModSymError};
