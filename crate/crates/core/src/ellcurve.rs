//! Hecke eigenvalue data a_l for rational elliptic curves by direct point
//! counting, and reduction-type classification at bad primes.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::primes;

/// Largest prime accepted by the naive point counter.
pub const DEFAULT_COUNTING_BOUND: u64 = 200_000;

/// Coefficient bound keeping every invariant computation inside i128.
const COEFF_BOUND: i64 = 10_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EllCurveError {
    #[error("a-invariants define a singular curve (discriminant 0)")]
    SingularCurve,
    #[error("|a-invariant| exceeds the supported bound {COEFF_BOUND}")]
    CoefficientOverflow,
    #[error("{ell} is a prime of bad reduction, no a_l by counting")]
    BadPrime { ell: u64 },
    #[error("prime {ell} exceeds the counting bound {bound}")]
    CountingBoundExceeded { ell: u64, bound: u64 },
    #[error("table bound {bound} is below 2")]
    InvalidBound { bound: u64 },
}

type AInv = [i128; 5];

fn b_invariants(a: &AInv) -> (i128, i128, i128, i128) {
    let [a1, a2, a3, a4, a6] = *a;
    let b2 = a1 * a1 + 4 * a2;
    let b4 = 2 * a4 + a1 * a3;
    let b6 = a3 * a3 + 4 * a6;
    let b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4;
    (b2, b4, b6, b8)
}

fn c_invariants(a: &AInv) -> (i128, i128) {
    let (b2, b4, b6, _) = b_invariants(a);
    let c4 = b2 * b2 - 24 * b4;
    let c6 = -b2 * b2 * b2 + 36 * b2 * b4 - 216 * b6;
    (c4, c6)
}

fn discriminant_of(a: &AInv) -> i128 {
    let (b2, b4, b6, b8) = b_invariants(a);
    -b2 * b2 * b8 - 8 * b4 * b4 * b4 - 27 * b6 * b6 + 9 * b2 * b4 * b6
}

/// Valuation of v at ell; zero maps to u32::MAX.
fn val_at(v: i128, ell: u64) -> u32 {
    if v == 0 {
        return u32::MAX;
    }
    let ell = ell as i128;
    let mut v = v;
    let mut e = 0;
    while v % ell == 0 {
        v /= ell;
        e += 1;
    }
    e
}

/// Substitution x = u^2 x' + r, y = u^3 y' + s u^2 x' + t, when it keeps the
/// coefficients integral.
fn transformed(a: &AInv, u: i128, r: i128, s: i128, t: i128) -> Option<AInv> {
    let [a1, a2, a3, a4, a6] = *a;
    let (u2, u3) = (u * u, u * u * u);
    let (u4, u6) = (u2 * u2, u3 * u3);
    let n1 = a1 + 2 * s;
    let n2 = a2 - s * a1 + 3 * r - s * s;
    let n3 = a3 + r * a1 + 2 * t;
    let n4 = a4 - s * a3 + 2 * r * a2 - (t + r * s) * a1 + 3 * r * r - 2 * s * t;
    let n6 = a6 + r * a4 + r * r * a2 + r * r * r - t * a3 - t * t - r * t * a1;
    if n1 % u != 0 || n2 % u2 != 0 || n3 % u3 != 0 || n4 % u4 != 0 || n6 % u6 != 0 {
        return None;
    }
    Some([n1 / u, n2 / u2, n3 / u3, n4 / u4, n6 / u6])
}

/// One u = ell shrink step at ell >= 5. Translations clear a1, a2, a3 to
/// valuations 1, 2, 3; the c4 and c6 valuations then force a4 and a6 to be
/// divisible as well.
fn shrink_staged(a: &AInv, ell: u64) -> Option<AInv> {
    let (c4, c6) = c_invariants(a);
    if val_at(c4, ell) < 4 || val_at(c6, ell) < 6 {
        return None;
    }
    let l = ell as i128;
    let (l2, l3) = (l * l, l * l * l);
    let inv = |x: i128, m: i128| -> i128 {
        // m is a power of the odd prime l and x is a unit mod m, so the
        // exponent phi(m) - 1 inverts x.
        let phi = m / l * (l - 1);
        let mut acc = 1i128;
        let mut base = x.rem_euclid(m);
        let mut e = phi - 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % m;
            }
            base = base * base % m;
            e >>= 1;
        }
        acc
    };
    let s = ((-a[0]).rem_euclid(l) * inv(2, l)).rem_euclid(l);
    let step1 = transformed(a, 1, 0, s, 0).expect("u=1 substitutions are always integral");
    debug_assert_eq!(step1[0].rem_euclid(l), 0);
    let r = ((-step1[1]).rem_euclid(l2) * inv(3, l2)).rem_euclid(l2);
    let step2 = transformed(&step1, 1, r, 0, 0).expect("u=1 substitutions are always integral");
    debug_assert_eq!(step2[1].rem_euclid(l2), 0);
    let t = ((-step2[2]).rem_euclid(l3) * inv(2, l3)).rem_euclid(l3);
    let step3 = transformed(&step2, 1, 0, 0, t).expect("u=1 substitutions are always integral");
    debug_assert_eq!(step3[2].rem_euclid(l3), 0);
    Some(transformed(&step3, l, 0, 0, 0).expect("cleared model divides exactly"))
}

/// One u = ell shrink step at ell = 2 or 3 by exhausting translation
/// residues r mod ell^2, s mod ell, t mod ell^3.
fn shrink_search(a: &AInv, ell: u64) -> Option<AInv> {
    let l = ell as i128;
    for r in 0..l * l {
        for s in 0..l {
            for t in 0..l * l * l {
                if let Some(next) = transformed(a, l, r, s, t) {
                    return Some(next);
                }
            }
        }
    }
    None
}

/// Model minimal at ell, leaving valuations at all other primes unchanged.
fn minimal_at(a: &AInv, ell: u64) -> AInv {
    let mut cur = *a;
    loop {
        if val_at(discriminant_of(&cur), ell) < 12 {
            return cur;
        }
        let next = if ell <= 3 {
            shrink_search(&cur, ell)
        } else {
            shrink_staged(&cur, ell)
        };
        match next {
            Some(n) => cur = n,
            None => return cur,
        }
    }
}

/// Long Weierstrass curve y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6
/// over Q with integral coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "CurveJson", into = "CurveJson")]
pub struct WeierstrassCurve {
    a1: i64,
    a2: i64,
    a3: i64,
    a4: i64,
    a6: i64,
    label: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct CurveJson {
    a_invariants: [i64; 5],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<String>,
}

impl TryFrom<CurveJson> for WeierstrassCurve {
    type Error = EllCurveError;
    fn try_from(j: CurveJson) -> Result<Self, Self::Error> {
        let [a1, a2, a3, a4, a6] = j.a_invariants;
        WeierstrassCurve::new(a1, a2, a3, a4, a6, j.label)
    }
}

impl From<WeierstrassCurve> for CurveJson {
    fn from(c: WeierstrassCurve) -> Self {
        CurveJson {
            a_invariants: [c.a1, c.a2, c.a3, c.a4, c.a6],
            label: c.label,
        }
    }
}

impl WeierstrassCurve {
    pub fn new(
        a1: i64,
        a2: i64,
        a3: i64,
        a4: i64,
        a6: i64,
        label: Option<String>,
    ) -> Result<Self, EllCurveError> {
        for v in [a1, a2, a3, a4, a6] {
            if v.abs() > COEFF_BOUND {
                return Err(EllCurveError::CoefficientOverflow);
            }
        }
        let curve = Self {
            a1,
            a2,
            a3,
            a4,
            a6,
            label,
        };
        if discriminant_of(&curve.ainv()) == 0 {
            return Err(EllCurveError::SingularCurve);
        }
        Ok(curve)
    }

    pub fn a_invariants(&self) -> [i64; 5] {
        [self.a1, self.a2, self.a3, self.a4, self.a6]
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    fn ainv(&self) -> AInv {
        [
            self.a1 as i128,
            self.a2 as i128,
            self.a3 as i128,
            self.a4 as i128,
            self.a6 as i128,
        ]
    }

    pub fn discriminant(&self) -> i128 {
        discriminant_of(&self.ainv())
    }

    pub fn c4(&self) -> i128 {
        c_invariants(&self.ainv()).0
    }

    pub fn c6(&self) -> i128 {
        c_invariants(&self.ainv()).1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReductionKind {
    Good,
    MultiplicativeSplit,
    MultiplicativeNonsplit,
    Additive,
}

/// Affine points of the reduction mod ell at which the curve is smooth.
fn smooth_affine_count(a: &AInv, ell: u64) -> u64 {
    let l = ell as i128;
    let [a1, a2, a3, a4, a6] = a.map(|v| v.rem_euclid(l));
    let mut count = 0;
    for x in 0..l {
        for y in 0..l {
            let f = (y * y + a1 * x * y + a3 * y - x * x * x - a2 * x * x - a4 * x - a6)
                .rem_euclid(l);
            if f != 0 {
                continue;
            }
            let fx = (a1 * y - 3 * x * x - 2 * a2 * x - a4).rem_euclid(l);
            let fy = (2 * y + a1 * x + a3).rem_euclid(l);
            if fx != 0 || fy != 0 {
                count += 1;
            }
        }
    }
    count
}

/// Reduction type at a prime, computed on a model minimal at that prime.
pub fn reduction_kind(curve: &WeierstrassCurve, ell: u64) -> ReductionKind {
    assert!(primes::is_prime(ell), "reduction_kind needs a prime");
    let a = minimal_at(&curve.ainv(), ell);
    let disc = discriminant_of(&a);
    if val_at(disc, ell) == 0 {
        return ReductionKind::Good;
    }
    let (c4, c6) = c_invariants(&a);
    if val_at(c4, ell) > 0 {
        return ReductionKind::Additive;
    }
    let split = if ell == 2 {
        // Multiplicative reduction has ell - a_ell smooth points, a_ell = 1
        // when split.
        smooth_affine_count(&a, 2) + 1 == 1
    } else {
        // The tangent slopes at the node are rational exactly when -c6 is a
        // square: for a node 4(x-e)^2(x-e'), c6 = 64(e'-e)^3 and the slope
        // discriminant is e - e'.
        primes::kronecker((-c6).rem_euclid(ell as i128) as i64, ell as i64) == 1
    };
    if split {
        ReductionKind::MultiplicativeSplit
    } else {
        ReductionKind::MultiplicativeNonsplit
    }
}

/// a_ell over F_ell for odd good ell, by summing the quadratic character of
/// the completed square 4x^3 + b2 x^2 + 2 b4 x + b6.
fn ap_by_character(a: &AInv, ell: u64) -> i64 {
    let (b2, b4, b6, _) = b_invariants(a);
    let l = ell as i128;
    let c3 = 4 % ell;
    let c2 = b2.rem_euclid(l) as u64;
    let c1 = (2 * b4).rem_euclid(l) as u64;
    let c0 = b6.rem_euclid(l) as u64;
    let mut chi = vec![-1i8; ell as usize];
    chi[0] = 0;
    for y in 1..=ell / 2 {
        chi[(y * y % ell) as usize] = 1;
    }
    let mut sum = 0i64;
    for x in 0..ell {
        let fx = ((c3 * x + c2) % ell * x + c1) % ell * x % ell;
        let fx = (fx + c0) % ell;
        sum += chi[fx as usize] as i64;
    }
    -sum
}

/// a_ell for ell = 2, 3 by enumerating every affine point.
fn ap_by_enumeration(a: &AInv, ell: u64) -> i64 {
    let l = ell as i128;
    let [a1, a2, a3, a4, a6] = a.map(|v| v.rem_euclid(l));
    let mut count = 1i64; // point at infinity
    for x in 0..l {
        for y in 0..l {
            let f = (y * y + a1 * x * y + a3 * y - x * x * x - a2 * x * x - a4 * x - a6)
                .rem_euclid(l);
            if f == 0 {
                count += 1;
            }
        }
    }
    ell as i64 + 1 - count
}

/// Trace of Frobenius a_ell = ell + 1 - #E(F_ell) at a good prime.
pub fn ap_of_prime(curve: &WeierstrassCurve, ell: u64) -> Result<i64, EllCurveError> {
    assert!(primes::is_prime(ell), "ap_of_prime needs a prime");
    if ell > DEFAULT_COUNTING_BOUND {
        return Err(EllCurveError::CountingBoundExceeded {
            ell,
            bound: DEFAULT_COUNTING_BOUND,
        });
    }
    if reduction_kind(curve, ell) != ReductionKind::Good {
        return Err(EllCurveError::BadPrime { ell });
    }
    let model = minimal_at(&curve.ainv(), ell);
    let ap = if ell <= 3 {
        ap_by_enumeration(&model, ell)
    } else {
        ap_by_character(&model, ell)
    };
    assert!(
        (ap * ap) as u64 <= 4 * ell,
        "Hasse bound violated at {ell}: a={ap}"
    );
    Ok(ap)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ApSource {
    Counted,
    Ingested,
}

/// Eigenvalue table: a_ell at good primes plus flags at bad primes
/// (+1 split, -1 nonsplit, 0 additive).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "ApTableJson", into = "ApTableJson")]
pub struct ApTable {
    ap: BTreeMap<u64, i64>,
    bad_primes: BTreeMap<u64, i64>,
    source: ApSource,
}

#[derive(Serialize, Deserialize)]
struct ApTableJson {
    ap: BTreeMap<u64, i64>,
    bad_primes: BTreeMap<u64, i64>,
}

impl From<ApTableJson> for ApTable {
    fn from(j: ApTableJson) -> Self {
        ApTable {
            ap: j.ap,
            bad_primes: j.bad_primes,
            source: ApSource::Ingested,
        }
    }
}

impl From<ApTable> for ApTableJson {
    fn from(t: ApTable) -> Self {
        ApTableJson {
            ap: t.ap,
            bad_primes: t.bad_primes,
        }
    }
}

impl ApTable {
    pub fn ingested(ap: BTreeMap<u64, i64>, bad_primes: BTreeMap<u64, i64>) -> Self {
        Self {
            ap,
            bad_primes,
            source: ApSource::Ingested,
        }
    }

    pub fn good(&self) -> &BTreeMap<u64, i64> {
        &self.ap
    }

    pub fn bad(&self) -> &BTreeMap<u64, i64> {
        &self.bad_primes
    }

    pub fn source(&self) -> ApSource {
        self.source
    }

    /// a_ell whether ell is good or bad, when the table covers ell.
    pub fn eigenvalue(&self, ell: u64) -> Option<i64> {
        self.ap.get(&ell).or_else(|| self.bad_primes.get(&ell)).copied()
    }
}

enum TableEntry {
    Good(i64),
    Bad(i64),
}

fn table_entry(curve: &WeierstrassCurve, ell: u64) -> Result<TableEntry, EllCurveError> {
    match reduction_kind(curve, ell) {
        ReductionKind::Good => ap_of_prime(curve, ell).map(TableEntry::Good),
        ReductionKind::MultiplicativeSplit => Ok(TableEntry::Bad(1)),
        ReductionKind::MultiplicativeNonsplit => Ok(TableEntry::Bad(-1)),
        ReductionKind::Additive => Ok(TableEntry::Bad(0)),
    }
}

/// Eigenvalue table for all primes up to bound.
pub fn ap_table(curve: &WeierstrassCurve, bound: u64) -> Result<ApTable, EllCurveError> {
    ap_table_with_jobs(curve, bound, 1)
}

/// Same table, with per-prime work spread over `jobs` threads and merged in
/// prime order.
pub fn ap_table_with_jobs(
    curve: &WeierstrassCurve,
    bound: u64,
    jobs: usize,
) -> Result<ApTable, EllCurveError> {
    if bound < 2 {
        return Err(EllCurveError::InvalidBound { bound });
    }
    let primes = primes::primes_up_to(bound);
    let jobs = jobs.max(1).min(primes.len().max(1));
    let mut results: Vec<(u64, Result<TableEntry, EllCurveError>)> =
        Vec::with_capacity(primes.len());
    if jobs <= 1 {
        for &ell in &primes {
            results.push((ell, table_entry(curve, ell)));
        }
    } else {
        let chunks: Vec<&[u64]> = primes.chunks(primes.len().div_ceil(jobs)).collect();
        let mut partials: Vec<Vec<(u64, Result<TableEntry, EllCurveError>)>> =
            Vec::with_capacity(chunks.len());
        std::thread::scope(|scope| {
            let handles: Vec<_> = chunks
                .into_iter()
                .map(|chunk| {
                    scope.spawn(move || {
                        chunk
                            .iter()
                            .map(|&ell| (ell, table_entry(curve, ell)))
                            .collect::<Vec<_>>()
                    })
                })
                .collect();
            for h in handles {
                partials.push(h.join().expect("counting worker panicked"));
            }
        });
        for part in partials {
            results.extend(part);
        }
        results.sort_by_key(|&(ell, _)| ell);
    }

    let mut ap = BTreeMap::new();
    let mut bad_primes = BTreeMap::new();
    for (ell, entry) in results {
        match entry? {
            TableEntry::Good(a) => {
                ap.insert(ell, a);
            }
            TableEntry::Bad(flag) => {
                bad_primes.insert(ell, flag);
            }
        }
    }
    Ok(ApTable {
        ap,
        bad_primes,
        source: ApSource::Counted,
    })
}
