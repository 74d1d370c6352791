//! Congruences between Hecke eigensystems modulo p^n, and level-raising
//! witnesses obtained by comparing a joint eigenspace with the image of the
//! degeneracy maps.
//!
//! Dimensions of submodules of the symbol quotient are reported as the
//! p-length, log_p of the cardinality; a free rank-r module over Z/p^n has
//! length r n.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{self, PrimePowerModulus, ResidueInt};
use crate::ellcurve::ApTable;
use crate::modsym::{
    apply_operator, build_space, degeneracy_map, sturm_bound, vec_mat, CoeffRing,
    ManinSymbolSpace, ModSymError, OperatorLabel, ZpnRing,
};
use crate::primes;

#[derive(Debug, Error)]
pub enum CongrError {
    #[error("coefficient tables have no entry for the prime {prime}")]
    InsufficientData { prime: u64 },
    #[error("form has level {found}, expected {expected}")]
    LevelMismatch { expected: u64, found: u64 },
    #[error("only weight 2 is supported, found {weight}")]
    UnsupportedWeight { weight: u32 },
    #[error("{q} is not an auxiliary prime here: {reason}")]
    NotAuxiliary { q: u64, reason: String },
    #[error(transparent)]
    ModSym(#[from] ModSymError),
}

/// One linear condition on the symbol quotient: the named operator acts by
/// the given eigenvalue. The operator must be well-formed for the ambient
/// level (T at a good prime, U at a level divisor).
#[derive(Debug, Clone, Copy)]
pub struct EigensystemConstraint {
    pub operator: OperatorLabel,
    pub eigenvalue: ResidueInt,
}

impl EigensystemConstraint {
    pub fn new(operator: OperatorLabel, eigenvalue: ResidueInt) -> Self {
        Self {
            operator,
            eigenvalue,
        }
    }
}

/// Hecke data of a newform: level, weight, good-prime coefficients, and
/// coefficients at the bad primes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NewformData {
    pub level: u64,
    pub weight: u32,
    pub ap: BTreeMap<u64, i64>,
    pub bad: BTreeMap<u64, i64>,
}

impl NewformData {
    /// Weight-2 data from a coefficient table.
    pub fn from_table(level: u64, table: &ApTable) -> Self {
        Self {
            level,
            weight: 2,
            ap: table.good().clone(),
            bad: table.bad().clone(),
        }
    }

    /// a_ell whether ell is good or bad, when known.
    pub fn coefficient(&self, ell: u64) -> Option<i64> {
        self.ap.get(&ell).or_else(|| self.bad.get(&ell)).copied()
    }
}

/// Outcome of a level-raising run. Dimensions are p-lengths of the joint
/// eigenspace and of its intersection with the old subspace; new_witness
/// records whether the former strictly exceeds the latter.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub joint_dim: u64,
    pub old_dim: u64,
    pub new_witness: bool,
    pub modulus: String,
}

/// True when the tables agree modulo p^n at every prime up to the Sturm
/// bound, outside the excluded set. Both tables must cover all compared
/// primes.
pub fn congruent_mod_pn(
    f: &ApTable,
    g: &ApTable,
    modulus: PrimePowerModulus,
    sturm: u64,
    excluded: &[u64],
) -> Result<bool, CongrError> {
    let mut pairs = Vec::new();
    for ell in primes::primes_up_to(sturm) {
        if excluded.contains(&ell) {
            continue;
        }
        let af = f
            .eigenvalue(ell)
            .ok_or(CongrError::InsufficientData { prime: ell })?;
        let ag = g
            .eigenvalue(ell)
            .ok_or(CongrError::InsufficientData { prime: ell })?;
        pairs.push((af, ag));
    }
    Ok(pairs
        .iter()
        .all(|&(af, ag)| modulus.residue(af as i128) == modulus.residue(ag as i128)))
}

/// p-length of the span of the given vectors.
pub fn span_length(modulus: &PrimePowerModulus, vectors: &[Vec<ResidueInt>]) -> u64 {
    if vectors.is_empty() {
        return 0;
    }
    let width = vectors[0].len();
    let hf = arith::howell_form(modulus, raw_rows(vectors), width);
    arith::span_logp(modulus, &hf)
}

fn raw_rows(vectors: &[Vec<ResidueInt>]) -> Vec<Vec<u128>> {
    vectors
        .iter()
        .map(|row| row.iter().map(|e| e.value()).collect())
        .collect()
}

/// Howell basis of the intersection of the cuspidal subspace with every
/// eigenspace ker(op - lambda), in ambient quotient coordinates. The result
/// does not depend on the constraint order, and every returned vector is
/// re-verified against every constraint by explicit application.
pub fn eigensystem_kernel(
    space: &ManinSymbolSpace<ZpnRing>,
    constraints: &[EigensystemConstraint],
) -> Result<Vec<Vec<ResidueInt>>, ModSymError> {
    assert!(!constraints.is_empty(), "constraint sequence is empty");
    let ring = *space.ring();
    let m = ring.modulus();
    let width = space.rank();
    let mut gens: Vec<Vec<ResidueInt>> = space.cuspidal_basis().to_vec();
    for c in constraints {
        // Applying with an empty generator list still validates the label.
        let images = apply_operator(space, c.operator, &gens)?;
        if gens.is_empty() {
            continue;
        }
        let rows: Vec<Vec<ResidueInt>> = gens
            .iter()
            .zip(&images)
            .map(|(g, img)| (0..width).map(|k| img[k] - c.eigenvalue * g[k]).collect())
            .collect();
        let coeffs = ring.left_kernel(&rows, width);
        let combos: Vec<Vec<u128>> = coeffs
            .iter()
            .map(|x| {
                let v = vec_mat(&ring, x, &gens, width);
                v.into_iter().map(|e| e.value()).collect()
            })
            .collect();
        gens = ring.wrap_rows(arith::howell_form(&m, combos, width));
    }

    for c in constraints {
        let images = apply_operator(space, c.operator, &gens)?;
        for (g, img) in gens.iter().zip(&images) {
            for k in 0..width {
                assert!(
                    (img[k] - c.eigenvalue * g[k]).is_zero(),
                    "kernel vector fails re-verification against {}",
                    c.operator
                );
            }
        }
    }
    Ok(gens)
}

/// Joint-eigenspace comparison at level M q against the old subspace coming
/// from level M. The form's coefficients pin T_ell for good ell up to the
/// Sturm bound and U_r at primes r | M; U_q is pinned to eps.
///
/// q must be auxiliary: prime to M p, not congruent to +-1 mod p, with
/// a_q congruent to one of +-(q + 1) mod p^n.
pub fn level_raising_witness(
    f: &NewformData,
    m_level: u64,
    q: u64,
    modulus: PrimePowerModulus,
    eps: i64,
) -> Result<WitnessReport, CongrError> {
    assert!(eps == 1 || eps == -1, "eps must be +1 or -1");
    if f.level != m_level {
        return Err(CongrError::LevelMismatch {
            expected: m_level,
            found: f.level,
        });
    }
    if f.weight != 2 {
        return Err(CongrError::UnsupportedWeight { weight: f.weight });
    }
    let p = modulus.p();
    if !primes::is_prime(q) || m_level % q == 0 || q == p {
        return Err(CongrError::NotAuxiliary {
            q,
            reason: "it must be a prime dividing neither the level nor p".into(),
        });
    }
    if q % p == 1 || q % p == p - 1 {
        return Err(CongrError::NotAuxiliary {
            q,
            reason: format!("it is congruent to +-1 mod {p}"),
        });
    }
    let aq = f
        .coefficient(q)
        .ok_or(CongrError::InsufficientData { prime: q })?;
    let aq_res = modulus.residue(aq as i128);
    let plus = modulus.residue(q as i128 + 1);
    let minus = modulus.residue(-(q as i128 + 1));
    if aq_res != plus && aq_res != minus {
        return Err(CongrError::NotAuxiliary {
            q,
            reason: format!("a_q = {aq} is not congruent to either of +-(q + 1)"),
        });
    }

    let n_level = m_level * q;
    let ring = ZpnRing::new(modulus);
    let big = build_space(ring, n_level)?;
    let small = build_space(ring, m_level)?;

    let constraints = witness_constraints(f, q, modulus, eps, n_level)?;
    let joint = eigensystem_kernel(&big, &constraints)?;
    let joint_dim = span_length(&modulus, &joint);

    let mut old: Vec<Vec<u128>> = Vec::new();
    for d in [1, q] {
        let map = degeneracy_map(&small, &big, d)?;
        old.extend(raw_rows(map.images()));
    }
    let inter = arith::intersect_spans(&modulus, &old, &raw_rows(&joint), big.rank());
    let old_dim = arith::span_logp(&modulus, &inter);

    Ok(WitnessReport {
        joint_dim,
        old_dim,
        new_witness: joint_dim > old_dim,
        modulus: format!("{}^{}", p, modulus.n()),
    })
}

fn witness_constraints(
    f: &NewformData,
    q: u64,
    modulus: PrimePowerModulus,
    eps: i64,
    n_level: u64,
) -> Result<Vec<EigensystemConstraint>, CongrError> {
    let sturm = sturm_bound(n_level, 2);
    let good: Vec<u64> = primes::primes_up_to(sturm)
        .into_iter()
        .filter(|l| n_level % l != 0)
        .collect();
    let coeff = |ell: u64| -> Result<ResidueInt, CongrError> {
        f.coefficient(ell)
            .map(|a| modulus.residue(a as i128))
            .ok_or(CongrError::InsufficientData { prime: ell })
    };
    let mut list = Vec::with_capacity(good.len() + 2);
    // A few small good primes first: they cut the space down before the
    // wider sweep.
    let split = good.len().min(3);
    for &ell in &good[..split] {
        list.push(EigensystemConstraint::new(OperatorLabel::T(ell), coeff(ell)?));
    }
    for (r, _) in primes::factorize(f.level) {
        list.push(EigensystemConstraint::new(OperatorLabel::U(r), coeff(r)?));
    }
    list.push(EigensystemConstraint::new(
        OperatorLabel::U(q),
        modulus.residue(eps as i128),
    ));
    for &ell in &good[split..] {
        list.push(EigensystemConstraint::new(OperatorLabel::T(ell), coeff(ell)?));
    }
    Ok(list)
}
