//! Types of 2x2 local Galois representations away from the coefficient
//! characteristic.
//!
//! A tame representation at ell is recorded by the images of a Frobenius
//! lift and a tame inertia generator, subject to the relation
//! s t s^-1 = t^ell. Residual data classifies, up to twist and conjugation,
//! into principal series, Steinberg, induced, and unramified Frobenius
//! shapes. Integral types predict which residual types their mod-p
//! reductions can hit, with a sharper constraint when the coefficient ring
//! is unramified.

use std::collections::BTreeSet;

use num_integer::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{mult_order, PrimePowerModulus, ResidueInt, ResidueMatrix};
use crate::primes;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LocalTypeError {
    #[error("{ell} is not an odd prime usable as a residue prime")]
    BadResiduePrime { ell: u64 },
    #[error("residue prime {ell} equals the coefficient characteristic")]
    CoefficientPrimeClash { ell: u64 },
    #[error("the {name} image is not invertible")]
    SingularGenerator { name: &'static str },
    #[error("images violate the tame relation s t s^-1 = t^{ell}")]
    TameRelationViolated { ell: u64 },
    #[error("classification needs mod-p data, got exponent {n}")]
    NotResidual { n: u32 },
    #[error("lattice exponent {got} out of range, expected {expected}")]
    InvalidLatticeExponent { expected: &'static str, got: i32 },
    #[error("no tame matrix model with split eigenvalues exists at ell={ell}, p={p}")]
    NoSplitRealization { ell: u64, p: u64 },
    #[error("over a ramified quadratic a character reduction descends only if the character does")]
    RamifiedInductionDescends,
}

/// Shape of the Frobenius image when inertia acts trivially up to twist.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FrobeniusShape {
    Scalar,
    RegularSemisimple,
    Unipotent,
}

/// Twist class of a semisimplified mod-p representation of the local
/// Galois group at ell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ResidualLocalType {
    /// Two characters in diagonal position; `phi_ramified` records whether
    /// their ratio is ramified.
    PrincipalSeries { phi_ramified: bool },
    /// Unipotent line cut out by an unramified additive character. Only
    /// used as a reduction target descriptor; explicit unramified data
    /// reports an `UnramifiedFrob` shape instead.
    UnramifiedTwistLine,
    /// Unramified diagonal ratio equal to ell with an extension class that
    /// stays nonzero on inertia.
    Steinberg,
    /// Irreducible, induced from a character of a quadratic extension.
    Induced { m_ramified: bool },
    /// Trivial projective inertia; the representation is determined by the
    /// Frobenius image alone.
    UnramifiedFrob { shape: FrobeniusShape },
}

/// Twist class of a representation over Z/p^n together with the lattice
/// data that survives reduction.
///
/// Principal series carry a nonpositive lattice exponent (0 means the
/// diagonal form), Steinberg types a nonnegative one scaling the extension
/// class. Induced types record the ramification of the quadratic extension
/// and whether the character of that extension descends after reduction
/// mod p.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum IntegralLocalType {
    PrincipalSeries { lattice_exponent: i32 },
    Steinberg { lattice_exponent: i32 },
    Induced { m_ramified: bool, descends_mod_p: bool },
}

impl IntegralLocalType {
    /// Checks the sign conventions on lattice exponents and rejects the
    /// flag pair that no representation realizes: over a ramified
    /// quadratic extension, a character whose reduction descends must
    /// itself descend.
    pub fn validate(&self) -> Result<(), LocalTypeError> {
        match *self {
            IntegralLocalType::PrincipalSeries { lattice_exponent } if lattice_exponent > 0 => {
                Err(LocalTypeError::InvalidLatticeExponent {
                    expected: "<= 0",
                    got: lattice_exponent,
                })
            }
            IntegralLocalType::Steinberg { lattice_exponent } if lattice_exponent < 0 => {
                Err(LocalTypeError::InvalidLatticeExponent {
                    expected: ">= 0",
                    got: lattice_exponent,
                })
            }
            IntegralLocalType::Induced {
                m_ramified: true,
                descends_mod_p: true,
            } => Err(LocalTypeError::RamifiedInductionDescends),
            _ => Ok(()),
        }
    }

    /// Explicit matrices over Z/p^n presenting this type tamely at ell.
    ///
    /// The construction picks split eigenvalues inside Z/p^n, so induced
    /// types are modeled through the pair of conjugate character values.
    /// `entropy` selects among the valid parameter choices and a random
    /// twist and conjugation applied at the end; the same entropy always
    /// produces the same data. Types whose parameters do not exist at this
    /// (ell, p) pair report `NoSplitRealization`.
    pub fn tame_realization(
        &self,
        ell: u64,
        modulus: PrimePowerModulus,
        entropy: u64,
    ) -> Result<TameLocalData, LocalTypeError> {
        self.validate()?;
        validate_tame_prime(ell, modulus.p())?;
        let mut state = entropy ^ (ell << 1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
        let pn = modulus.modulus();
        let p = modulus.p() as u128;
        let units = modulus.unit_count();
        let g = primitive_root(modulus);
        let (sigma, tau) = match *self {
            IntegralLocalType::PrincipalSeries { lattice_exponent } => {
                let k = lattice_exponent.unsigned_abs();
                if k >= modulus.n() {
                    return Err(LocalTypeError::NoSplitRealization {
                        ell,
                        p: modulus.p(),
                    });
                }
                if k == 0 {
                    // Diagonal form. The inertia value must satisfy
                    // t^(ell-1) = 1 or no Frobenius can conjugate it to its
                    // ell-th power.
                    let d1 = units.gcd(&(ell as u128 - 1));
                    let t = g.pow(units / d1).pow(mix(&mut state) as u128 % d1);
                    let f = g.pow(mix(&mut state) as u128 % units);
                    if t.value() == 1 && mix(&mut state) & 1 == 1 {
                        // Unramified additive line, the other exponent-zero
                        // shape.
                        let s = mix(&mut state) as u128 % pn;
                        let sigma =
                            ResidueMatrix::from_signed(modulus, 2, 2, &[1, s as i128, 0, 1]);
                        let tau = ResidueMatrix::identity(modulus, 2);
                        (sigma, tau)
                    } else {
                        let sigma = diag(modulus, f, modulus.residue(1));
                        let tau = diag(modulus, t, modulus.residue(1));
                        (sigma, tau)
                    }
                } else {
                    // Shear form [[x, (x-1)/p^k], [0, 1]]. Matrices of this
                    // shape commute, and the corner keeps k more digits of
                    // the eigenvalue than the diagonal does, so validity is
                    // the matrix condition tau^ell = tau, sharper than
                    // t^(ell-1) = 1 on the stored diagonal.
                    let pk = p.pow(k);
                    let cosets = pn / pk;
                    let mut ramified_choices = Vec::new();
                    for c in 1..cosets {
                        let cand = ResidueMatrix::from_signed(
                            modulus,
                            2,
                            2,
                            &[(1 + pk * c) as i128, c as i128, 0, 1],
                        );
                        if cand.pow(ell as u128) == cand {
                            ramified_choices.push(c);
                        }
                    }
                    let c = if !ramified_choices.is_empty() && mix(&mut state) & 1 == 1 {
                        ramified_choices[mix(&mut state) as usize % ramified_choices.len()]
                    } else {
                        0
                    };
                    // Keep the exponent sharp: when inertia is trivial the
                    // Frobenius column must carry a unit.
                    let d = if c == 0 {
                        let start = mix(&mut state) as u128 % cosets;
                        (0..cosets)
                            .map(|i| (start + i) % cosets)
                            .find(|cand| cand % p != 0)
                            .expect("the shear coset space contains units")
                    } else {
                        mix(&mut state) as u128 % cosets
                    };
                    let f = 1 + pk * d;
                    let t = 1 + pk * c;
                    let sigma =
                        ResidueMatrix::from_signed(modulus, 2, 2, &[f as i128, d as i128, 0, 1]);
                    let tau =
                        ResidueMatrix::from_signed(modulus, 2, 2, &[t as i128, c as i128, 0, 1]);
                    (sigma, tau)
                }
            }
            IntegralLocalType::Steinberg { lattice_exponent } => {
                let k = (lattice_exponent as u32).min(modulus.n());
                let pk = if k >= modulus.n() { 0 } else { p.pow(k) };
                // Upper triangular with diagonal (ell, 1); conjugating by
                // such a matrix multiplies the corner of a unipotent by
                // ell, which is exactly the tame relation.
                let v = g.pow(mix(&mut state) as u128 % units);
                let w = mix(&mut state) as u128 % pn;
                let sigma = ResidueMatrix::from_signed(
                    modulus,
                    2,
                    2,
                    &[
                        ell as i128,
                        modulus.mul_raw(pk, w) as i128,
                        0,
                        1,
                    ],
                );
                let tau = ResidueMatrix::from_signed(
                    modulus,
                    2,
                    2,
                    &[1, modulus.mul_raw(pk, v.value()) as i128, 0, 1],
                );
                (sigma, tau)
            }
            IntegralLocalType::Induced {
                m_ramified: false,
                descends_mod_p,
            } => {
                // Eigenvalue pair (t, t^ell) swapped by Frobenius. Validity
                // needs t^(ell^2-1) = 1; the character fails to descend
                // exactly when t^(ell-1) is not 1.
                let ell2 = ell as u128 * ell as u128;
                let d2 = units.gcd(&(ell2 - 1));
                let h = g.pow(units / d2);
                let start = mix(&mut state) as u128 % d2;
                let mut chosen = None;
                for i in 0..d2 {
                    let cand = h.pow((start + i) % d2);
                    let drop = cand.pow(ell as u128 - 1);
                    if drop.value() == 1 {
                        continue;
                    }
                    if (drop.value() % p == 1) == descends_mod_p {
                        chosen = Some(cand);
                        break;
                    }
                }
                let t = chosen.ok_or(LocalTypeError::NoSplitRealization {
                    ell,
                    p: modulus.p(),
                })?;
                let s = g.pow(mix(&mut state) as u128 % units);
                let tau = diag(modulus, t, t.pow(ell as u128));
                let mut sigma = ResidueMatrix::zero(modulus, 2, 2);
                sigma.set(0, 1, s);
                sigma.set(1, 0, modulus.residue(1));
                (sigma, tau)
            }
            IntegralLocalType::Induced {
                m_ramified: true, ..
            } => {
                // Inertia swaps the two lines, Frobenius sits diagonally.
                // The relation forces the diagonal ratio to c^((ell-1)/2),
                // and a ratio of 1 would make the character descend, so
                // only c with c^((ell-1)/2) = -1 give this type.
                let d1 = units.gcd(&(ell as u128 - 1));
                let h = g.pow(units / d1);
                let start = mix(&mut state) as u128 % d1;
                let mut chosen = None;
                for i in 0..d1 {
                    let cand = h.pow((start + i) % d1);
                    if cand.pow((ell as u128 - 1) / 2).value() == pn - 1 {
                        chosen = Some(cand);
                        break;
                    }
                }
                let c = chosen.ok_or(LocalTypeError::NoSplitRealization {
                    ell,
                    p: modulus.p(),
                })?;
                let a = g.pow(mix(&mut state) as u128 % units);
                let sigma = diag(modulus, a, -a);
                let mut tau = ResidueMatrix::zero(modulus, 2, 2);
                tau.set(0, 1, c);
                tau.set(1, 0, modulus.residue(1));
                (sigma, tau)
            }
        };
        let data = twist_and_conjugate(ell, sigma, tau, &mut state)?;
        assert!(
            data.tame_relation_holds(),
            "realizations must satisfy the tame relation"
        );
        Ok(data)
    }
}

/// Images of a Frobenius lift and a tame inertia generator over Z/p^n.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TameLocalData {
    ell: u64,
    sigma: ResidueMatrix,
    tau: ResidueMatrix,
}

impl TameLocalData {
    /// Wraps the two generator images after checking that ell is an odd
    /// prime different from p and that both images are invertible. The
    /// tame relation itself is checked by `tame_relation_holds` and by
    /// classification.
    pub fn new(
        ell: u64,
        sigma: ResidueMatrix,
        tau: ResidueMatrix,
    ) -> Result<Self, LocalTypeError> {
        assert_eq!(sigma.modulus(), tau.modulus(), "mixed moduli");
        assert_eq!((sigma.rows(), sigma.cols()), (2, 2), "sigma must be 2x2");
        assert_eq!((tau.rows(), tau.cols()), (2, 2), "tau must be 2x2");
        validate_tame_prime(ell, sigma.modulus().p())?;
        if !sigma.det2().is_unit() {
            return Err(LocalTypeError::SingularGenerator { name: "sigma" });
        }
        if !tau.det2().is_unit() {
            return Err(LocalTypeError::SingularGenerator { name: "tau" });
        }
        Ok(Self { ell, sigma, tau })
    }

    pub fn ell(&self) -> u64 {
        self.ell
    }

    pub fn modulus(&self) -> PrimePowerModulus {
        self.sigma.modulus()
    }

    pub fn sigma(&self) -> &ResidueMatrix {
        &self.sigma
    }

    pub fn tau(&self) -> &ResidueMatrix {
        &self.tau
    }

    /// Whether s t s^-1 = t^ell holds at the working modulus.
    pub fn tame_relation_holds(&self) -> bool {
        let sigma_inv = self
            .sigma
            .inv2()
            .expect("determinant is a unit by construction");
        let conjugated = self.sigma.mul(&self.tau).mul(&sigma_inv);
        conjugated == self.tau.pow(self.ell as u128)
    }

    /// The same data with every entry reduced mod p.
    pub fn reduced_mod_p(&self) -> TameLocalData {
        let m = self.modulus();
        if m.n() == 1 {
            return self.clone();
        }
        let m1 = PrimePowerModulus::new(m.p(), 1).expect("p stays a valid modulus");
        let shrink = |mat: &ResidueMatrix| {
            let entries: Vec<i128> = (0..2)
                .flat_map(|i| (0..2).map(move |j| (mat.get(i, j).value() % m.p() as u128) as i128))
                .collect();
            ResidueMatrix::from_signed(m1, 2, 2, &entries)
        };
        TameLocalData::new(self.ell, shrink(&self.sigma), shrink(&self.tau))
            .expect("reduction preserves unit determinants")
    }
}

/// Classifies mod-p tame data up to twist and conjugation.
///
/// Projectively trivial inertia lands in `UnramifiedFrob` with the shape
/// of the Frobenius image. Projectively unipotent inertia forces the
/// triangular shape with diagonal ratio ell, which is the Steinberg type.
/// Otherwise inertia has two distinct eigenlines and Frobenius either
/// preserves both, giving a ramified principal series, or swaps them,
/// giving an induced type. In the swapping case the quadratic unramified
/// extension always induces the representation (data with four-group
/// projective image is induced from every quadratic at once), so the
/// reported flag is `m_ramified: false`.
pub fn classify_residual(data: &TameLocalData) -> Result<ResidualLocalType, LocalTypeError> {
    let m = data.modulus();
    if m.n() != 1 {
        return Err(LocalTypeError::NotResidual { n: m.n() });
    }
    if !data.tame_relation_holds() {
        return Err(LocalTypeError::TameRelationViolated { ell: data.ell() });
    }
    let sigma = data.sigma();
    let tau = data.tau();
    if is_scalar(tau) {
        let shape = if is_scalar(sigma) {
            FrobeniusShape::Scalar
        } else if discriminant(sigma).is_zero() {
            FrobeniusShape::Unipotent
        } else {
            FrobeniusShape::RegularSemisimple
        };
        return Ok(ResidualLocalType::UnramifiedFrob { shape });
    }
    if discriminant(tau).is_zero() {
        return Ok(ResidualLocalType::Steinberg);
    }
    // Inertia is semisimple with distinct eigenvalues, so its centralizer
    // is the diagonal torus and commuting is the same as preserving both
    // eigenlines.
    if sigma.mul(tau) == tau.mul(sigma) {
        Ok(ResidualLocalType::PrincipalSeries { phi_ramified: true })
    } else {
        Ok(ResidualLocalType::Induced { m_ramified: false })
    }
}

/// Residual types a reduction of the given integral type can land on.
///
/// Principal series stay principal series, with Steinberg reachable only
/// when ell = 1 mod p. Steinberg stays Steinberg or degenerates to an
/// unramified type. Induced stays induced, and degenerates to Steinberg or
/// an unramified type only when ell = -1 mod p. Unramified targets are
/// listed through every shape they can take.
pub fn allowed_reductions(
    t: &IntegralLocalType,
    ell: u64,
    p: u64,
) -> Result<BTreeSet<ResidualLocalType>, LocalTypeError> {
    t.validate()?;
    validate_tame_prime(ell, p)?;
    assert!(
        p >= 5 && primes::is_prime(p),
        "coefficient characteristic must be a prime >= 5"
    );
    let mut set = BTreeSet::new();
    match t {
        IntegralLocalType::PrincipalSeries { .. } => {
            set.extend(unramified_targets());
            set.insert(ResidualLocalType::PrincipalSeries { phi_ramified: true });
            if ell % p == 1 {
                set.insert(ResidualLocalType::Steinberg);
            }
        }
        IntegralLocalType::Steinberg { .. } => {
            set.insert(ResidualLocalType::Steinberg);
            set.extend(unramified_targets());
        }
        IntegralLocalType::Induced { .. } => {
            set.insert(ResidualLocalType::Induced { m_ramified: false });
            set.insert(ResidualLocalType::Induced { m_ramified: true });
            if (ell + 1) % p == 0 {
                set.insert(ResidualLocalType::Steinberg);
                set.extend(unramified_targets());
            }
        }
    }
    Ok(set)
}

/// Refines the reduction targets under an assumption on the coefficients.
///
/// With coefficients in an unramified extension of Z_p, ramification on a
/// character cannot vanish mod p, because a value of order p would
/// generate a ramified extension of degree p-1 > 2. A ramified principal
/// series therefore keeps a ramified semisimplification and an induced
/// type stays irreducible. Steinberg types are unaffected. The returned
/// set ranges over all congruence classes of ell; intersect with
/// `allowed_reductions` for a fixed ell.
pub fn integral_reduction_constraint(
    t: &IntegralLocalType,
    coeffs_unramified: bool,
    p: u64,
) -> BTreeSet<ResidualLocalType> {
    assert!(
        p >= 5 && primes::is_prime(p),
        "coefficient characteristic must be a prime >= 5"
    );
    let mut set = BTreeSet::new();
    match t {
        IntegralLocalType::PrincipalSeries { .. } => {
            set.extend(unramified_targets());
            set.insert(ResidualLocalType::PrincipalSeries { phi_ramified: true });
            set.insert(ResidualLocalType::Steinberg);
        }
        IntegralLocalType::Steinberg { .. } => {
            set.insert(ResidualLocalType::Steinberg);
            set.extend(unramified_targets());
        }
        IntegralLocalType::Induced { .. } => {
            set.insert(ResidualLocalType::Induced { m_ramified: false });
            set.insert(ResidualLocalType::Induced { m_ramified: true });
            set.insert(ResidualLocalType::Steinberg);
            set.extend(unramified_targets());
        }
    }
    if coeffs_unramified && !matches!(t, IntegralLocalType::Steinberg { .. }) {
        set.retain(|r| !has_unramified_semisimplification(r));
    }
    set
}

/// Whether a ramified character at ell can become unramified mod p.
///
/// A character value on tame inertia has order dividing ell - 1, and the
/// kernel can only grow mod p through values of p-power order, so loss of
/// ramification forces ell = 1 mod p.
pub fn ramification_loss_possible(ell: u64, p: u64) -> bool {
    assert!(
        ell != 2 && primes::is_prime(ell),
        "residue prime must be an odd prime"
    );
    assert!(
        p >= 5 && primes::is_prime(p),
        "coefficient characteristic must be a prime >= 5"
    );
    assert_ne!(ell, p, "residue and coefficient primes must differ");
    ell % p == 1
}

fn validate_tame_prime(ell: u64, p: u64) -> Result<(), LocalTypeError> {
    if ell == 2 || !primes::is_prime(ell) {
        return Err(LocalTypeError::BadResiduePrime { ell });
    }
    if ell == p {
        return Err(LocalTypeError::CoefficientPrimeClash { ell });
    }
    Ok(())
}

fn unramified_targets() -> [ResidualLocalType; 5] {
    [
        ResidualLocalType::PrincipalSeries {
            phi_ramified: false,
        },
        ResidualLocalType::UnramifiedTwistLine,
        ResidualLocalType::UnramifiedFrob {
            shape: FrobeniusShape::Scalar,
        },
        ResidualLocalType::UnramifiedFrob {
            shape: FrobeniusShape::RegularSemisimple,
        },
        ResidualLocalType::UnramifiedFrob {
            shape: FrobeniusShape::Unipotent,
        },
    ]
}

fn has_unramified_semisimplification(r: &ResidualLocalType) -> bool {
    match r {
        ResidualLocalType::PrincipalSeries { phi_ramified } => !phi_ramified,
        ResidualLocalType::UnramifiedTwistLine | ResidualLocalType::UnramifiedFrob { .. } => true,
        // The Steinberg diagonal characters are unramified; only the
        // extension class between them ramifies, and it dies under
        // semisimplification.
        ResidualLocalType::Steinberg => true,
        ResidualLocalType::Induced { .. } => false,
    }
}

fn is_scalar(m2: &ResidueMatrix) -> bool {
    m2.get(0, 1).is_zero() && m2.get(1, 0).is_zero() && m2.get(0, 0) == m2.get(1, 1)
}

fn discriminant(m2: &ResidueMatrix) -> ResidueInt {
    let tr = m2.trace();
    let four = m2.modulus().residue(4);
    tr * tr - four * m2.det2()
}

fn diag(m: PrimePowerModulus, a: ResidueInt, d: ResidueInt) -> ResidueMatrix {
    let mut out = ResidueMatrix::zero(m, 2, 2);
    out.set(0, 0, a);
    out.set(1, 1, d);
    out
}

/// Smallest generator of the cyclic unit group of Z/p^n.
fn primitive_root(m: PrimePowerModulus) -> ResidueInt {
    let units = m.unit_count();
    for cand in 2..m.modulus() {
        let r = m.residue(cand as i128);
        if !r.is_unit() {
            continue;
        }
        if mult_order(&r).expect("candidate is a unit") == units {
            return r;
        }
    }
    unreachable!("Z/p^n with p odd always has a primitive root")
}

/// splitmix64 step, enough to decorrelate successive parameter draws.
fn mix(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Applies a character twist and a change of basis. The inertia scalar is
/// drawn from the units with c^(ell-1) = 1, the only twists compatible
/// with the tame relation; the Frobenius scalar and the basis are free.
fn twist_and_conjugate(
    ell: u64,
    sigma: ResidueMatrix,
    tau: ResidueMatrix,
    state: &mut u64,
) -> Result<TameLocalData, LocalTypeError> {
    let m = sigma.modulus();
    let pn = m.modulus();
    let units = m.unit_count();
    let g = primitive_root(m);
    let d1 = units.gcd(&(ell as u128 - 1));
    let c_tau = g.pow(units / d1).pow(mix(state) as u128 % d1);
    let c_sigma = g.pow(mix(state) as u128 % units);
    let sigma = sigma.scale(c_sigma);
    let tau = tau.scale(c_tau);
    // Invertible basis change assembled as a product of a unipotent lower
    // and an upper triangular matrix with unit diagonal.
    let a = g.pow(mix(state) as u128 % units);
    let b = g.pow(mix(state) as u128 % units);
    let x = m.residue((mix(state) as u128 % pn) as i128);
    let y = m.residue((mix(state) as u128 % pn) as i128);
    let mut basis = ResidueMatrix::zero(m, 2, 2);
    basis.set(0, 0, a);
    basis.set(0, 1, y);
    basis.set(1, 0, a * x);
    basis.set(1, 1, x * y + b);
    let basis_inv = basis.inv2().expect("determinant a*b is a unit");
    let sigma = basis.mul(&sigma).mul(&basis_inv);
    let tau = basis.mul(&tau).mul(&basis_inv);
    TameLocalData::new(ell, sigma, tau)
}
