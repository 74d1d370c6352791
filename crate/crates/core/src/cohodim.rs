//! Cohomology dimensions of the trace-zero adjoint at primes away from
//! the coefficient characteristic.
//!
//! For each residual local type and congruence class of ell mod p, the
//! dimensions d0 and d2 of H^0 and H^2 are tabulated and d1 follows from
//! the vanishing local Euler characteristic. The unramified rows admit an
//! independent check: d0 and d2 are kernel dimensions of the conjugation
//! action on trace-zero 2x2 matrices, computed here as an explicit 3x3
//! kernel over F_p.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{howell_kernel, ResidueInt, ResidueMatrix};
use crate::localtypes::{FrobeniusShape, ResidualLocalType};

/// Dimension of the flat local condition at the residue characteristic
/// for p = 5 and weight 2, ingested from standard tables rather than
/// computed.
pub const FLAT_SUBSPACE_DIM_P5: u32 = 1;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CohoDimError {
    #[error("case descriptor is inconsistent: {reason}")]
    InconsistentCase { reason: &'static str },
    #[error("the Frobenius matrix is singular")]
    SingularFrobenius,
    #[error("the oracle needs mod-p data, got exponent {n}")]
    NotResidual { n: u32 },
    #[error("ell is divisible by the coefficient characteristic")]
    EllDividesP,
}

/// Congruence class of ell modulo the coefficient characteristic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CongruenceClass {
    One,
    MinusOne,
    Other,
}

impl CongruenceClass {
    pub fn of(ell: u64, p: u64) -> CongruenceClass {
        match ell % p {
            1 => CongruenceClass::One,
            r if r == p - 1 => CongruenceClass::MinusOne,
            _ => CongruenceClass::Other,
        }
    }
}

/// Position of ell relative to the eigenvalue ratio of a regular
/// semisimple Frobenius. The ratio alpha is never 1 in the regular case,
/// so ell = 1 mod p can only miss it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrobeniusRelation {
    EllMatchesEigenvalueRatio,
    EllMissesEigenvalueRatio,
}

/// A local case descriptor: the residual type together with the
/// congruence data the dimension table branches on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalCase {
    pub residual: ResidualLocalType,
    pub ell_class: CongruenceClass,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frobenius_relation: Option<FrobeniusRelation>,
}

impl LocalCase {
    pub fn new(
        residual: ResidualLocalType,
        ell_class: CongruenceClass,
        frobenius_relation: Option<FrobeniusRelation>,
    ) -> Result<LocalCase, CohoDimError> {
        let case = LocalCase {
            residual,
            ell_class,
            frobenius_relation,
        };
        case.validate()?;
        Ok(case)
    }

    pub fn validate(&self) -> Result<(), CohoDimError> {
        match self.residual {
            ResidualLocalType::PrincipalSeries {
                phi_ramified: false,
            }
            | ResidualLocalType::UnramifiedTwistLine => Err(CohoDimError::InconsistentCase {
                reason: "unramified data must be presented through a Frobenius shape",
            }),
            ResidualLocalType::UnramifiedFrob {
                shape: FrobeniusShape::RegularSemisimple,
            } => match self.frobenius_relation {
                None => Err(CohoDimError::InconsistentCase {
                    reason: "a regular Frobenius case needs an eigenvalue relation",
                }),
                Some(FrobeniusRelation::EllMatchesEigenvalueRatio)
                    if self.ell_class == CongruenceClass::One =>
                {
                    Err(CohoDimError::InconsistentCase {
                        reason: "ell = 1 mod p cannot match a ratio that is never 1",
                    })
                }
                Some(_) => Ok(()),
            },
            _ if self.frobenius_relation.is_some() => Err(CohoDimError::InconsistentCase {
                reason: "only regular Frobenius cases carry an eigenvalue relation",
            }),
            _ => Ok(()),
        }
    }
}

/// Dimensions of H^0, H^1, H^2 with the trace-zero adjoint coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimTriple {
    pub d0: u32,
    pub d1: u32,
    pub d2: u32,
}

impl DimTriple {
    /// Builds the triple from the outer dimensions; away from p the local
    /// Euler characteristic vanishes, so d1 = d0 + d2.
    pub fn from_duality(d0: u32, d2: u32) -> DimTriple {
        DimTriple {
            d0,
            d1: d0 + d2,
            d2,
        }
    }

    pub fn euler_balanced(&self) -> bool {
        self.d1 == self.d0 + self.d2
    }
}

/// The full dimension table, one row per consistent case key.
///
/// Stored as data rather than branching logic so invariants can sweep it
/// mechanically. The distinct outer-dimension pairs collapse to the usual
/// bullets: ramified principal series and unipotent Frobenius keep d0 = 1
/// and gain d2 = 1 exactly at ell = 1 mod p; Steinberg gains H^0 at
/// ell = 1 and H^2 at ell = +-1; an induced type has outer cohomology
/// only for unramified M at ell = -1; a scalar Frobenius fixes all of the
/// adjoint; a regular one fixes its torus line, with d2 counting how often
/// ell appears among the adjoint eigenvalues 1, alpha, 1/alpha.
pub fn dimension_table() -> Vec<(LocalCase, DimTriple)> {
    use CongruenceClass::{MinusOne, One, Other};
    use FrobeniusRelation::{EllMatchesEigenvalueRatio, EllMissesEigenvalueRatio};
    let mut rows = Vec::new();
    let mut push = |residual, class, relation, d0, d2| {
        let case = LocalCase::new(residual, class, relation).expect("table keys are consistent");
        rows.push((case, DimTriple::from_duality(d0, d2)));
    };

    let ps = ResidualLocalType::PrincipalSeries { phi_ramified: true };
    push(ps, One, None, 1, 1);
    push(ps, MinusOne, None, 1, 0);
    push(ps, Other, None, 1, 0);

    let st = ResidualLocalType::Steinberg;
    push(st, One, None, 1, 1);
    push(st, MinusOne, None, 0, 1);
    push(st, Other, None, 0, 0);

    for m_ramified in [false, true] {
        let ind = ResidualLocalType::Induced { m_ramified };
        for class in [One, MinusOne, Other] {
            let d2 = u32::from(class == MinusOne && !m_ramified);
            push(ind, class, None, 0, d2);
        }
    }

    let scalar = ResidualLocalType::UnramifiedFrob {
        shape: FrobeniusShape::Scalar,
    };
    push(scalar, One, None, 3, 3);
    push(scalar, MinusOne, None, 3, 0);
    push(scalar, Other, None, 3, 0);

    let regular = ResidualLocalType::UnramifiedFrob {
        shape: FrobeniusShape::RegularSemisimple,
    };
    push(regular, One, Some(EllMissesEigenvalueRatio), 1, 1);
    push(regular, MinusOne, Some(EllMatchesEigenvalueRatio), 1, 2);
    push(regular, MinusOne, Some(EllMissesEigenvalueRatio), 1, 0);
    push(regular, Other, Some(EllMatchesEigenvalueRatio), 1, 1);
    push(regular, Other, Some(EllMissesEigenvalueRatio), 1, 0);

    let unipotent = ResidualLocalType::UnramifiedFrob {
        shape: FrobeniusShape::Unipotent,
    };
    push(unipotent, One, None, 1, 1);
    push(unipotent, MinusOne, None, 1, 0);
    push(unipotent, Other, None, 1, 0);

    rows
}

/// Looks up the dimension triple for a consistent case.
pub fn dims(case: &LocalCase) -> Result<DimTriple, CohoDimError> {
    case.validate()?;
    dimension_table()
        .into_iter()
        .find(|(key, _)| key == case)
        .map(|(_, triple)| triple)
        .ok_or(CohoDimError::InconsistentCase {
            reason: "case is outside the tabulated enumeration",
        })
}

/// Every consistent case key, in table order.
pub fn all_cases() -> Vec<LocalCase> {
    dimension_table().into_iter().map(|(case, _)| case).collect()
}

/// Fixed dimensions at an auxiliary prime: the Frobenius eigenvalue ratio
/// equals the prime itself, which is neither 1 nor -1 mod p, so ell sits
/// on an adjoint eigenvalue exactly once.
pub fn aux_case_dims() -> DimTriple {
    DimTriple::from_duality(1, 1)
}

/// Outer cohomology dimensions for an unramified case, computed from an
/// explicit Frobenius matrix instead of the table.
///
/// The conjugation action on trace-zero 2x2 matrices is assembled as a
/// 3x3 matrix A over F_p; then d0 = dim ker(A - 1) and, by local duality,
/// d2 = dim ker(A - ell), the invariants of the cyclotomic twist.
pub fn dims_unramified_oracle(
    frob: &ResidueMatrix,
    ell: u64,
) -> Result<(u32, u32), CohoDimError> {
    let m = frob.modulus();
    if m.n() != 1 {
        return Err(CohoDimError::NotResidual { n: m.n() });
    }
    if !frob.det2().is_unit() {
        return Err(CohoDimError::SingularFrobenius);
    }
    if ell % m.p() == 0 {
        return Err(CohoDimError::EllDividesP);
    }
    let inv = frob.inv2().expect("determinant is a unit");
    // Trace-zero basis: nilpotent raising, diagonal, nilpotent lowering.
    let basis = [
        ResidueMatrix::from_signed(m, 2, 2, &[0, 1, 0, 0]),
        ResidueMatrix::from_signed(m, 2, 2, &[1, 0, 0, -1]),
        ResidueMatrix::from_signed(m, 2, 2, &[0, 0, 1, 0]),
    ];
    let mut action = ResidueMatrix::zero(m, 3, 3);
    for (j, b) in basis.iter().enumerate() {
        let image = frob.mul(b).mul(&inv);
        let coords = [image.get(0, 1), image.get(0, 0), image.get(1, 0)];
        for (i, c) in coords.into_iter().enumerate() {
            action.set(i, j, c);
        }
    }
    let eigen_kernel_dim = |lambda: ResidueInt| {
        let mut shifted = action.clone();
        for i in 0..3 {
            shifted.set(i, i, shifted.get(i, i) - lambda);
        }
        howell_kernel(&shifted).len() as u32
    };
    let d0 = eigen_kernel_dim(m.residue(1));
    let d2 = eigen_kernel_dim(m.residue(ell as i128));
    Ok((d0, d2))
}

/// Builds the case descriptor an explicit unramified Frobenius matrix
/// falls under. The eigenvalue ratio alpha satisfies
/// x^2 - (tr^2/det - 2) x + 1 = 0, so whether ell matches alpha or its
/// inverse is the vanishing of that quadratic at ell, checkable without
/// leaving F_p even when the eigenvalues live in the quadratic extension.
pub fn unramified_case_of(frob: &ResidueMatrix, ell: u64) -> Result<LocalCase, CohoDimError> {
    let m = frob.modulus();
    if m.n() != 1 {
        return Err(CohoDimError::NotResidual { n: m.n() });
    }
    let det = frob.det2();
    if !det.is_unit() {
        return Err(CohoDimError::SingularFrobenius);
    }
    if ell % m.p() == 0 {
        return Err(CohoDimError::EllDividesP);
    }
    let class = CongruenceClass::of(ell, m.p());
    let tr = frob.trace();
    let four = m.residue(4);
    let scalar = frob.get(0, 1).is_zero()
        && frob.get(1, 0).is_zero()
        && frob.get(0, 0) == frob.get(1, 1);
    let shape = if scalar {
        FrobeniusShape::Scalar
    } else if (tr * tr - four * det).is_zero() {
        FrobeniusShape::Unipotent
    } else {
        FrobeniusShape::RegularSemisimple
    };
    let relation = if shape == FrobeniusShape::RegularSemisimple {
        let l = m.residue(ell as i128);
        let ratio_trace = tr * tr * det.inv().expect("unit determinant") - m.residue(2);
        let matches = (l * l - ratio_trace * l + m.residue(1)).is_zero();
        Some(if matches {
            FrobeniusRelation::EllMatchesEigenvalueRatio
        } else {
            FrobeniusRelation::EllMissesEigenvalueRatio
        })
    } else {
        None
    };
    LocalCase::new(
        ResidualLocalType::UnramifiedFrob { shape },
        class,
        relation,
    )
}
