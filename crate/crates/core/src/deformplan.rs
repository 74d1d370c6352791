//! Per-prime deformation planning. Each covered local case receives a
//! family of allowed shapes on the tame generators together with a basis
//! of adjustment cocycles; lifting proceeds one coefficient digit at a
//! time and may only correct by multiples of cocycles outside the basis
//! span, so the basis size must match the gap d1 - d2 between tangent
//! directions and obstructions at that prime.
//!
//! The module also carries the inertia adjuster for the trivial-reduction
//! upper-triangular family: an explicit cocycle v and a conjugator C,
//! congruent to the identity mod p, with C^-1 rho C equal to the twist of
//! rho by p^(m-1) v at working precision p^m. This is what lets a lift
//! whose inertia corner drifts at the top digit be rewritten as the same
//! deformation, keeping the step-by-step process inside the family.

use serde::Serialize;
use serde_json::json;

use crate::arith::{ArithError, PrimePowerModulus, ResidueInt, ResidueMatrix};
use crate::cohodim::{CohoDimError, CongruenceClass, FrobeniusRelation, LocalCase};
use crate::localtypes::{FrobeniusShape, ResidualLocalType, TameLocalData};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum DeformPlanError {
    /// The case has no assigned family at all.
    #[error("no deformation family is assigned: {reason}")]
    UncoveredCase { reason: &'static str },
    /// Cocycle values must lie in the trace-zero adjoint.
    #[error("cocycle value for {name} is not trace zero")]
    NotTraceZero { name: &'static str },
    /// The inertia corner is zero at working precision, so no adjuster
    /// direction can be read off.
    #[error("inertia corner vanishes at the working precision")]
    InertiaCornerVanishes,
    /// The adjuster only applies over the class ell = 1 mod p.
    #[error("ell = {ell} is not 1 mod p = {p}")]
    EllNotOneModP { ell: u64, p: u64 },
    /// All three governing valuations sit in the top two digits, leaving
    /// no room to place the conjugator congruences.
    #[error("valuations leave no digit below the working precision")]
    InsufficientPrecision,
    /// Input data does not match the family shape the operation expects.
    #[error("unexpected shape: {reason}")]
    ShapeMismatch { reason: &'static str },
    #[error(transparent)]
    Case(#[from] CohoDimError),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// Names for the standard cocycle generators used across the plans.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CocycleTag {
    /// Unramified diagonal direction on a split family.
    H,
    /// Upper-corner unramified direction on a Steinberg family.
    J,
    /// Upper-corner Frobenius direction on the trivial-reduction family.
    U1,
    /// Upper-corner inertia direction on the trivial-reduction family.
    U2,
    /// Lower-corner Frobenius direction.
    G1,
    /// Diagonal Frobenius direction.
    G2,
    /// Diagonal inertia direction.
    G3,
    /// Upper-corner inertia direction with Frobenius frozen.
    U,
    /// The lift-dependent inertia adjuster; values are produced per lift
    /// by `lemma_v_element` and are zero in a bare plan.
    V,
}

impl std::fmt::Display for CocycleTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            CocycleTag::H => "h",
            CocycleTag::J => "j",
            CocycleTag::U1 => "u1",
            CocycleTag::U2 => "u2",
            CocycleTag::G1 => "g1",
            CocycleTag::G2 => "g2",
            CocycleTag::G3 => "g3",
            CocycleTag::U => "u",
            CocycleTag::V => "v",
        };
        write!(f, "{name}")
    }
}

/// A cocycle on the tame group with values in the trace-zero adjoint,
/// recorded by its values on the Frobenius and inertia generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CocycleGen {
    tag: CocycleTag,
    at_sigma: ResidueMatrix,
    at_tau: ResidueMatrix,
}

impl CocycleGen {
    pub fn new(
        tag: CocycleTag,
        at_sigma: ResidueMatrix,
        at_tau: ResidueMatrix,
    ) -> Result<Self, DeformPlanError> {
        assert_eq!(at_sigma.modulus(), at_tau.modulus(), "mixed moduli");
        assert_eq!((at_sigma.rows(), at_sigma.cols()), (2, 2), "values must be 2x2");
        assert_eq!((at_tau.rows(), at_tau.cols()), (2, 2), "values must be 2x2");
        if !at_sigma.trace().is_zero() {
            return Err(DeformPlanError::NotTraceZero { name: "sigma" });
        }
        if !at_tau.trace().is_zero() {
            return Err(DeformPlanError::NotTraceZero { name: "tau" });
        }
        Ok(CocycleGen { tag, at_sigma, at_tau })
    }

    pub fn tag(&self) -> CocycleTag {
        self.tag
    }

    pub fn at_sigma(&self) -> &ResidueMatrix {
        &self.at_sigma
    }

    pub fn at_tau(&self) -> &ResidueMatrix {
        &self.at_tau
    }

    fn from_signed(
        tag: CocycleTag,
        modulus: PrimePowerModulus,
        sigma: [i128; 4],
        tau: [i128; 4],
    ) -> Self {
        let s = ResidueMatrix::from_signed(modulus, 2, 2, &sigma);
        let t = ResidueMatrix::from_signed(modulus, 2, 2, &tau);
        CocycleGen::new(tag, s, t).expect("builtin generators are trace zero")
    }

    fn render(&self) -> serde_json::Value {
        json!({
            "tag": self.tag.to_string(),
            "at_sigma": matrix_rows(&self.at_sigma),
            "at_tau": matrix_rows(&self.at_tau),
        })
    }
}

fn matrix_rows(m: &ResidueMatrix) -> Vec<Vec<u64>> {
    (0..m.rows())
        .map(|i| {
            (0..m.cols())
                .map(|j| u64::try_from(m.get(i, j).value()).expect("small residues"))
                .collect()
        })
        .collect()
}

/// Symbolic description of the allowed local family on the tame
/// generators sigma (Frobenius) and tau (inertia).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyDescriptor {
    /// Every deformation of the fixed lift is allowed.
    AllDeformations,
    /// Diagonal pairs (psi1 gamma, psi2 gamma^-1) with gamma unramified.
    DiagonalTwists,
    /// The fixed lift alone.
    SingletonLift,
    /// sigma = ((ell, *), (0, 1)), tau = ((1, *), (0, 1)).
    UpperTriangularSteinberg,
    /// sigma frozen at the fixed lift, tau = ((1, *), (0, 1)).
    FrozenFrobeniusUnipotentInertia,
    /// Planning is inherited from the flat theory at the coefficient
    /// prime itself; the fixed lift always belongs to that family.
    DelegatedAtCoefficientPrime,
}

/// The per-prime plan: which family the lift must stay inside, and which
/// cocycle directions the adjustment step is allowed to spend.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanEntry {
    case: LocalCase,
    family: FamilyDescriptor,
    basis: Vec<CocycleGen>,
}

impl PlanEntry {
    pub fn case(&self) -> &LocalCase {
        &self.case
    }

    pub fn family(&self) -> FamilyDescriptor {
        self.family
    }

    pub fn basis(&self) -> &[CocycleGen] {
        &self.basis
    }

    pub fn render(&self) -> serde_json::Value {
        json!({
            "case": serde_json::to_value(&self.case).expect("case serializes"),
            "family": serde_json::to_value(self.family).expect("family serializes"),
            "basis": self.basis.iter().map(CocycleGen::render).collect::<Vec<_>>(),
        })
    }
}

fn gen_h(mp: PrimePowerModulus) -> CocycleGen {
    CocycleGen::from_signed(CocycleTag::H, mp, [1, 0, 0, -1], [0, 0, 0, 0])
}

fn gen_j(mp: PrimePowerModulus) -> CocycleGen {
    CocycleGen::from_signed(CocycleTag::J, mp, [0, 1, 0, 0], [0, 0, 0, 0])
}

fn gen_u1(mp: PrimePowerModulus) -> CocycleGen {
    CocycleGen::from_signed(CocycleTag::U1, mp, [0, 1, 0, 0], [0, 0, 0, 0])
}

fn gen_u2(mp: PrimePowerModulus) -> CocycleGen {
    CocycleGen::from_signed(CocycleTag::U2, mp, [0, 0, 0, 0], [0, 1, 0, 0])
}

fn gen_u(mp: PrimePowerModulus) -> CocycleGen {
    CocycleGen::from_signed(CocycleTag::U, mp, [0, 0, 0, 0], [0, 1, 0, 0])
}

fn gen_v_placeholder(mp: PrimePowerModulus) -> CocycleGen {
    CocycleGen::from_signed(CocycleTag::V, mp, [0, 0, 0, 0], [0, 0, 0, 0])
}

/// The three diagonal-and-corner directions the inertia adjuster is
/// assembled from, as cocycles on the trivial-reduction family.
pub fn adjuster_generators(p: u64) -> Result<[CocycleGen; 3], DeformPlanError> {
    let mp = PrimePowerModulus::new(p, 1)?;
    Ok([
        CocycleGen::from_signed(CocycleTag::G1, mp, [0, 0, 1, 0], [0, 0, 0, 0]),
        CocycleGen::from_signed(CocycleTag::G2, mp, [1, 0, 0, -1], [0, 0, 0, 0]),
        CocycleGen::from_signed(CocycleTag::G3, mp, [0, 0, 0, 0], [1, 0, 0, -1]),
    ])
}

/// The plan for a tame prime in the given local case, over residue
/// field of size `p`. Uncovered cases are the unramified shapes that
/// admit no ramified lift of the required kind; the coefficient prime
/// itself is handled by `plan_at_coefficient_prime`.
pub fn plan_for(case: &LocalCase, p: u64) -> Result<PlanEntry, DeformPlanError> {
    case.validate()?;
    let mp = PrimePowerModulus::new(p, 1)?;
    let (family, basis) = match (case.residual, case.ell_class) {
        (ResidualLocalType::PrincipalSeries { phi_ramified: true }, CongruenceClass::One) => {
            (FamilyDescriptor::DiagonalTwists, vec![gen_h(mp)])
        }
        (ResidualLocalType::PrincipalSeries { phi_ramified: true }, _) => {
            (FamilyDescriptor::AllDeformations, vec![gen_h(mp)])
        }
        (ResidualLocalType::Steinberg, CongruenceClass::One) => {
            (FamilyDescriptor::UpperTriangularSteinberg, vec![gen_j(mp)])
        }
        (ResidualLocalType::Steinberg, _) => (FamilyDescriptor::SingletonLift, vec![]),
        (ResidualLocalType::Induced { .. }, _) => (FamilyDescriptor::SingletonLift, vec![]),
        (ResidualLocalType::UnramifiedFrob { shape: FrobeniusShape::Scalar }, CongruenceClass::One) => (
            FamilyDescriptor::UpperTriangularSteinberg,
            vec![gen_u1(mp), gen_u2(mp), gen_v_placeholder(mp)],
        ),
        (ResidualLocalType::UnramifiedFrob { shape: FrobeniusShape::Scalar }, _) => {
            return Err(DeformPlanError::UncoveredCase {
                reason: "a ramified lift of a scalar Frobenius forces ell = 1 mod p",
            })
        }
        (ResidualLocalType::UnramifiedFrob { shape: FrobeniusShape::RegularSemisimple }, _) => {
            match case.frobenius_relation {
                Some(FrobeniusRelation::EllMatchesEigenvalueRatio) => {
                    (FamilyDescriptor::FrozenFrobeniusUnipotentInertia, vec![gen_u(mp)])
                }
                _ => {
                    return Err(DeformPlanError::UncoveredCase {
                        reason: "ell is not an eigenvalue ratio, so no ramified lift exists",
                    })
                }
            }
        }
        (ResidualLocalType::UnramifiedFrob { shape: FrobeniusShape::Unipotent }, CongruenceClass::One) => {
            (FamilyDescriptor::FrozenFrobeniusUnipotentInertia, vec![gen_u(mp)])
        }
        (ResidualLocalType::UnramifiedFrob { shape: FrobeniusShape::Unipotent }, _) => {
            return Err(DeformPlanError::UncoveredCase {
                reason: "a ramified lift of a unipotent Frobenius forces ell = 1 mod p",
            })
        }
        (ResidualLocalType::PrincipalSeries { phi_ramified: false }, _)
        | (ResidualLocalType::UnramifiedTwistLine, _) => {
            unreachable!("case validation rejects these spellings")
        }
    };
    Ok(PlanEntry { case: *case, family, basis })
}

/// The plan marker at the coefficient prime itself: the family is the
/// one from the flat theory and the fixed lift belongs to it, so no
/// basis is produced here.
pub fn plan_at_coefficient_prime() -> FamilyDescriptor {
    FamilyDescriptor::DelegatedAtCoefficientPrime
}

/// The split-family generator when the two diagonal characters take
/// Frobenius values `alpha` and `beta` that are only conjugate over the
/// coefficients rather than individually rational. The diagonal family
/// is replaced by its conjugate under C = ((-beta, -alpha), (1, 1)) and
/// the unramified diagonal direction is rescaled by det C = alpha - beta,
/// which clears all denominators: the returned value at sigma is
/// ((-(alpha+beta), -2 alpha beta), (2, alpha+beta)), integral in the
/// symmetric functions of the pair. Returns the generator and C.
pub fn conjugated_twist_generator(
    alpha: ResidueInt,
    beta: ResidueInt,
) -> (CocycleGen, ResidueMatrix) {
    assert_eq!(alpha.modulus(), beta.modulus(), "mixed moduli");
    let m = alpha.modulus();
    let sum = alpha + beta;
    let two = m.residue(2);
    let mut at_sigma = ResidueMatrix::zero(m, 2, 2);
    at_sigma.set(0, 0, -sum);
    at_sigma.set(0, 1, -(two * alpha * beta));
    at_sigma.set(1, 0, two);
    at_sigma.set(1, 1, sum);
    let at_tau = ResidueMatrix::zero(m, 2, 2);
    let gen = CocycleGen::new(CocycleTag::H, at_sigma, at_tau)
        .expect("symmetric-function entries are trace zero");
    let mut c = ResidueMatrix::zero(m, 2, 2);
    c.set(0, 0, -beta);
    c.set(0, 1, -alpha);
    c.set(1, 0, m.residue(1));
    c.set(1, 1, m.residue(1));
    (gen, c)
}

fn unit_part(z: &ResidueInt) -> ResidueInt {
    let m = z.modulus();
    let v = z.val();
    let scale = (m.p() as u128).pow(v);
    ResidueInt::from_raw(m, z.value() / scale)
}

/// The inertia adjuster for the trivial-reduction family with
/// sigma = ((ell, x), (0, 1)) and tau = ((1, y), (0, 1)) at precision
/// p^m: a cocycle v mod p and a conjugator C = ((1, 0), (p g, 1)) with
/// C^-1 rho C equal to rho twisted by p^(m-1) v, exactly mod p^m. The
/// selection runs over the seven valuation patterns of
/// (x, y, ell - 1), first match from the top:
///
///   1. v(y) smallest alone            -> v = g3
///   2. v(x) smallest alone            -> v = g2
///   3. v(ell-1) smallest alone        -> v = g1
///   4. v(y) = v(ell-1) < v(x)         -> v = g1 - (y/(ell-1)) g3
///   5. v(x) = v(y) < v(ell-1)         -> v = g2 + (y/x) g3
///   6. v(x) = v(ell-1) < v(y)         -> v = g1 - (x/(ell-1)) g2
///   7. all three equal                -> v = g1 - (x/(ell-1)) g2 - (y/(ell-1)) g3
///
/// where the quotients divide out the common power of p first. The
/// conjugator entry g carries the matching congruence: g times the
/// minimizing quantity is p^(m-2) (with a minus sign when ell - 1 is the
/// minimizer) and annihilates the other two mod p^(m-1).
pub fn lemma_v_element(
    x: ResidueInt,
    y: ResidueInt,
    ell: u64,
) -> Result<(CocycleGen, ResidueMatrix), DeformPlanError> {
    assert_eq!(x.modulus(), y.modulus(), "mixed moduli");
    let m = x.modulus();
    let p = m.p();
    let mn = m.n();
    assert!(mn >= 2, "the adjuster needs at least two coefficient digits");
    if ell % p != 1 {
        return Err(DeformPlanError::EllNotOneModP { ell, p });
    }
    if y.is_zero() {
        return Err(DeformPlanError::InertiaCornerVanishes);
    }

    let a = x.val();
    let b = y.val();
    let mut c = 0u32;
    let mut ell_rest = (ell - 1) as u128;
    while c < mn && ell_rest % p as u128 == 0 {
        ell_rest /= p as u128;
        c += 1;
    }
    let ell_minus_one = m.residue((ell - 1) as i128);

    let headroom = mn - 2;
    let gamma_of = |source: &ResidueInt, negate: bool| -> Result<ResidueInt, DeformPlanError> {
        let v = source.val();
        if v > headroom {
            return Err(DeformPlanError::InsufficientPrecision);
        }
        let scale = ResidueInt::from_raw(m, (p as u128).pow(headroom - v));
        let g = scale * unit_part(source).inv()?;
        Ok(if negate { -g } else { g })
    };
    let ratio_to = |num: &ResidueInt, den: &ResidueInt| -> Result<ResidueInt, DeformPlanError> {
        Ok(unit_part(num) * unit_part(den).inv()?)
    };

    let mp = PrimePowerModulus::new(p, 1)?;
    let reduce = |r: ResidueInt| mp.residue((r.value() % p as u128) as i128);
    let zero2 = || ResidueMatrix::zero(mp, 2, 2);
    let g1_sigma = ResidueMatrix::from_signed(mp, 2, 2, &[0, 0, 1, 0]);
    let diag_h = |t: ResidueInt| {
        let mut h = ResidueMatrix::zero(mp, 2, 2);
        h.set(0, 0, t);
        h.set(1, 1, -t);
        h
    };
    let one1 = mp.residue(1);

    let (at_sigma, at_tau, gamma) = if b < a && b < c {
        (zero2(), diag_h(one1), gamma_of(&y, false)?)
    } else if a < b && a < c {
        (diag_h(one1), zero2(), gamma_of(&x, false)?)
    } else if c < a && c < b {
        (g1_sigma, zero2(), gamma_of(&ell_minus_one, true)?)
    } else if b == c && b < a {
        let lam = ratio_to(&y, &ell_minus_one)?;
        (g1_sigma, diag_h(-reduce(lam)), gamma_of(&ell_minus_one, true)?)
    } else if a == b && b < c {
        let lam = ratio_to(&y, &x)?;
        (diag_h(one1), diag_h(reduce(lam)), gamma_of(&x, false)?)
    } else if a == c && a < b {
        let lam = ratio_to(&x, &ell_minus_one)?;
        (g1_sigma.sub(&diag_h(reduce(lam))), zero2(), gamma_of(&ell_minus_one, true)?)
    } else {
        let lam1 = ratio_to(&x, &ell_minus_one)?;
        let lam2 = ratio_to(&y, &ell_minus_one)?;
        (
            g1_sigma.sub(&diag_h(reduce(lam1))),
            diag_h(-reduce(lam2)),
            gamma_of(&ell_minus_one, true)?,
        )
    };

    let v = CocycleGen::new(CocycleTag::V, at_sigma, at_tau)?;
    let mut conj = ResidueMatrix::identity(m, 2);
    conj.set(1, 0, m.residue(p as i128) * gamma);
    Ok((v, conj))
}

fn lift_mod(m: PrimePowerModulus, residual: &ResidueMatrix) -> ResidueMatrix {
    let entries: Vec<i128> = (0..residual.rows())
        .flat_map(|i| (0..residual.cols()).map(move |j| (i, j)))
        .map(|(i, j)| residual.get(i, j).value() as i128)
        .collect();
    ResidueMatrix::from_signed(m, residual.rows(), residual.cols(), &entries)
}

/// Whether the conjugator turns `data` into its twist by p^(m-1) v,
/// exactly at the working precision p^m. The data must lie in the
/// trivial-reduction family: sigma = ((ell, x), (0, 1)) and
/// tau = ((1, y), (0, 1)) with ell, 1 + x, 1 + y all 1 mod p, and the
/// conjugator must be congruent to the identity mod p.
pub fn verify_adjustment(
    data: &TameLocalData,
    v: &CocycleGen,
    conjugator: &ResidueMatrix,
) -> Result<bool, DeformPlanError> {
    let m = data.modulus();
    let mn = m.n();
    let p = m.p();
    if mn < 2 {
        return Err(DeformPlanError::ShapeMismatch {
            reason: "verification needs at least two coefficient digits",
        });
    }
    if v.at_sigma.modulus().p() != p || v.at_sigma.modulus().n() != 1 {
        return Err(DeformPlanError::ShapeMismatch {
            reason: "cocycle values must live mod p",
        });
    }
    if conjugator.modulus() != m || conjugator.rows() != 2 || conjugator.cols() != 2 {
        return Err(DeformPlanError::ShapeMismatch {
            reason: "conjugator must be 2x2 at the working modulus",
        });
    }
    let identity = ResidueMatrix::identity(m, 2);
    let offset = conjugator.sub(&identity);
    let near_identity =
        (0..2).all(|i| (0..2).all(|j| offset.get(i, j).val() >= 1));
    if !near_identity {
        return Err(DeformPlanError::ShapeMismatch {
            reason: "conjugator must be the identity mod p",
        });
    }
    let ell = data.ell();
    if ell % p != 1 {
        return Err(DeformPlanError::EllNotOneModP { ell, p });
    }
    let one = m.residue(1);
    let sigma = data.sigma();
    let tau = data.tau();
    let family_shaped = sigma.get(0, 0) == m.residue(ell as i128)
        && sigma.get(1, 0).is_zero()
        && sigma.get(1, 1) == one
        && sigma.get(0, 1).val() >= 1
        && tau.get(0, 0) == one
        && tau.get(1, 0).is_zero()
        && tau.get(1, 1) == one
        && tau.get(0, 1).val() >= 1;
    if !family_shaped {
        return Err(DeformPlanError::ShapeMismatch {
            reason: "data is outside the trivial-reduction upper-triangular family",
        });
    }

    let conj_inv = conjugator.inv2()?;
    let top_digit = ResidueInt::from_raw(m, m.modulus() / p as u128);
    for (rho_g, v_g) in [(sigma, &v.at_sigma), (tau, &v.at_tau)] {
        let twist = ResidueMatrix::identity(m, 2).add(&lift_mod(m, v_g).scale(top_digit));
        let rhs = twist.mul(rho_g);
        let lhs = conj_inv.mul(rho_g).mul(conjugator);
        if lhs != rhs {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Whether the local data at an auxiliary prime q lies in the allowed
/// set there: inertia maps into the upper corner with one factor of p,
/// tau = ((1, p x), (0, 1)), and Frobenius is sigma = ((q, p y), (0, 1))
/// at the working modulus.
pub fn cq_membership(data: &TameLocalData, q: u64) -> bool {
    if data.ell() != q {
        return false;
    }
    let m = data.modulus();
    let one = m.residue(1);
    let sigma = data.sigma();
    let tau = data.tau();
    sigma.get(0, 0) == m.residue(q as i128)
        && sigma.get(1, 0).is_zero()
        && sigma.get(1, 1) == one
        && sigma.get(0, 1).val() >= 1
        && tau.get(0, 0) == one
        && tau.get(1, 0).is_zero()
        && tau.get(1, 1) == one
        && tau.get(0, 1).val() >= 1
}
