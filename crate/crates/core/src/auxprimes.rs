//! Auxiliary-prime selection on the eigenform side. A prime q qualifies
//! when q is away from +/-1 mod p, the form is unramified at q, and the
//! Frobenius image has distinct eigenvalues of ratio q; with trivial
//! character and determinant q this collapses to the congruence
//! a_q = +/-(q + 1) mod p^n, since eigenvalues alpha, beta with
//! alpha beta = q and alpha/beta = q force beta^2 = 1.
//!
//! The module also measures the projective order of such a Frobenius
//! image at both precision levels, and runs a witness-based check that
//! the residual image contains SL2, which is what transfers every
//! residual conclusion to the full coefficient ring.

use serde::Serialize;

use crate::arith::{mult_order, quadratic_roots, ArithError, PrimePowerModulus};
use crate::ellcurve::{ap_table, ApTable, EllCurveError, WeierstrassCurve};
use crate::primes;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum AuxPrimeError {
    /// Primes dividing the level or the coefficient prime are never
    /// candidates and are rejected outright.
    #[error("q = {q} divides the level times p")]
    RamifiedPrime { q: u64 },
    /// The eigenvalue table has a gap at a prime the search needed.
    #[error("no eigenvalue on record for q = {q}")]
    MissingEigenvalue { q: u64 },
    /// The table holds no usable prime at all.
    #[error("not enough eigenvalue data; deepest prime examined is {deepest}")]
    InsufficientData { deepest: u64 },
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error(transparent)]
    Curve(#[from] EllCurveError),
}

/// The recorded outcome of the three qualifying checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AuxPrimeChecks {
    pub q_mod_p: u64,
    pub eigenvalue_congruent: bool,
    pub coprime_to_level: bool,
}

/// A qualified auxiliary prime: q away from +/-1 mod p with
/// a_q = sign * (q + 1) mod p^n.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AuxPrimeCertificate {
    pub q: u64,
    pub sign: i8,
    pub p: u64,
    pub n: u32,
    pub a_q: i64,
    pub checks: AuxPrimeChecks,
}

/// Tests one prime. Returns the certificate when q qualifies, nothing
/// when it fails the class or congruence checks, and an error when q
/// divides the level or p. The modulus of the congruence is p^n.
pub fn is_auxiliary(
    q: u64,
    a_q: i64,
    p: u64,
    n: u32,
    level: u64,
) -> Result<Option<AuxPrimeCertificate>, AuxPrimeError> {
    assert!(primes::is_prime(q), "candidate must be prime");
    if level % q == 0 || q == p {
        return Err(AuxPrimeError::RamifiedPrime { q });
    }
    let q_mod_p = q % p;
    if q_mod_p == 1 || q_mod_p == p - 1 {
        return Ok(None);
    }
    let modulus = PrimePowerModulus::new(p, n)?;
    let trace = modulus.residue(a_q as i128);
    let steinberg = modulus.residue(q as i128 + 1);
    let sign = if trace == steinberg {
        1
    } else if trace == -steinberg {
        -1
    } else {
        return Ok(None);
    };
    Ok(Some(AuxPrimeCertificate {
        q,
        sign,
        p,
        n,
        a_q,
        checks: AuxPrimeChecks {
            q_mod_p,
            eigenvalue_congruent: true,
            coprime_to_level: true,
        },
    }))
}

/// All auxiliary primes up to the bound, ascending. Primes dividing the
/// level or p are skipped; a missing eigenvalue at any other candidate
/// is an error.
pub fn search_auxiliary(
    table: &ApTable,
    p: u64,
    n: u32,
    bound: u64,
    level: u64,
) -> Result<Vec<AuxPrimeCertificate>, AuxPrimeError> {
    assert!(bound >= 1, "search needs a positive bound");
    let mut found = Vec::new();
    for q in primes::primes_up_to(bound) {
        if level % q == 0 || q == p {
            continue;
        }
        let q_mod_p = q % p;
        if q_mod_p == 1 || q_mod_p == p - 1 {
            continue;
        }
        let a_q = table
            .eigenvalue(q)
            .ok_or(AuxPrimeError::MissingEigenvalue { q })?;
        if let Some(cert) = is_auxiliary(q, a_q, p, n, level)? {
            found.push(cert);
        }
    }
    Ok(found)
}

/// Counts points for the curve up to the bound and searches that table.
pub fn search_auxiliary_curve(
    curve: &WeierstrassCurve,
    p: u64,
    n: u32,
    bound: u64,
    level: u64,
) -> Result<Vec<AuxPrimeCertificate>, AuxPrimeError> {
    assert!(bound >= 1, "search needs a positive bound");
    if bound < 2 {
        return Ok(Vec::new());
    }
    let table = ap_table(curve, bound)?;
    search_auxiliary(&table, p, n, bound, level)
}

/// The multiplicative order of the Frobenius eigenvalue ratio at q,
/// at residual precision and at the working precision p^n: the roots
/// r1, r2 of x^2 - a_q x + q are extracted at each level and the order
/// of r1/r2 is returned as (order mod p, order mod p^n). Requires the
/// polynomial to split with distinct roots mod p.
pub fn frob_order_pair(
    q: u64,
    a_q: i64,
    p: u64,
    n: u32,
) -> Result<(u128, u128), AuxPrimeError> {
    let ratio_order = |level: u32| -> Result<u128, AuxPrimeError> {
        let m = PrimePowerModulus::new(p, level)?;
        let (r1, r2) = quadratic_roots(&m.residue(-(a_q as i128)), &m.residue(q as i128))?;
        Ok(mult_order(&(r1 * r2.inv()?))?)
    };
    Ok((ratio_order(1)?, ratio_order(n)?))
}

/// Verdict of the residual-image check. A positive verdict transfers
/// to every coefficient length: a closed subgroup of GL2 over the full
/// ring whose reduction contains SL2 of the residue field contains SL2
/// of the whole ring.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BigImageVerdict {
    ContainsSl2,
    Inconclusive,
}

/// Witness-based residual image check at p from an eigenvalue table.
///
/// The verdict is `ContainsSl2` when the witnesses rule out every
/// maximal proper subgroup type of PGL2(F_p) for the projective image:
///
/// * an ell with x^2 - a_ell x + ell irreducible mod p, and another
///   where it splits with distinct roots, ruling out triangular images;
/// * for every quadratic character cut out by a discriminant supported
///   on the primes of N p, some ell with character value -1 and
///   a_ell nonzero mod p, ruling out normalizer-of-Cartan images, which
///   have zero trace outside their index-two subgroup;
/// * an ell whose trace invariant u = a_ell^2 / ell mod p avoids
///   {0, 1, 2, 4} and the roots of u^2 - 3u + 1, ruling out the
///   exceptional projective images, whose elements have order at most 5.
///
/// A projective image contained in no proper maximal subgroup contains
/// the full projective special linear group, and the special linear
/// group itself follows by perfectness. The check is sound but
/// incomplete: `Inconclusive` means no witness set was found, never
/// that the image is small.
pub fn big_image_verdict(
    table: &ApTable,
    level: u64,
    p: u64,
) -> Result<BigImageVerdict, AuxPrimeError> {
    let usable: Vec<(u64, i64)> = table
        .good()
        .iter()
        .map(|(&ell, &a)| (ell, a))
        .filter(|&(ell, _)| level % ell != 0 && ell != p)
        .collect();
    if usable.is_empty() {
        let deepest = table
            .good()
            .keys()
            .chain(table.bad().keys())
            .max()
            .copied()
            .unwrap_or(0);
        return Err(AuxPrimeError::InsufficientData { deepest });
    }

    let symbol = |a: i64, ell: u64| primes::kronecker(a, ell as i64);
    let mut has_nonsplit = false;
    let mut has_split_distinct = false;
    let mut has_exceptional_witness = false;
    for &(ell, a) in &usable {
        let disc = a as i128 * a as i128 - 4 * ell as i128;
        match symbol((disc % p as i128) as i64, p) {
            -1 => has_nonsplit = true,
            1 => has_split_distinct = true,
            _ => {}
        }
        if a.rem_euclid(p as i64) != 0 {
            let m = PrimePowerModulus::new(p, 1)?;
            let u = m.residue(a as i128).pow(2) * m.residue(ell as i128).inv()?;
            let uv = u.value() as i128;
            let exceptional_order =
                [0, 1, 2, 4].contains(&uv) || (uv * uv - 3 * uv + 1) % p as i128 == 0;
            if !exceptional_order {
                has_exceptional_witness = true;
            }
        }
    }

    let mut support: Vec<u64> = primes::factorize(level * p).into_iter().map(|(r, _)| r).collect();
    support.sort_unstable();
    let mut dihedral_ruled_out = true;
    for mask in 0..(1u32 << support.len()) {
        for sign in [1i64, -1] {
            let mut d: i64 = sign;
            for (i, &r) in support.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    d *= r as i64;
                }
            }
            if d == 1 {
                continue;
            }
            let witnessed = usable.iter().any(|&(ell, a)| {
                symbol(d, ell) == -1 && a.rem_euclid(p as i64) != 0
            });
            if !witnessed {
                dihedral_ruled_out = false;
            }
        }
    }

    if has_nonsplit && has_split_distinct && has_exceptional_witness && dihedral_ruled_out {
        Ok(BigImageVerdict::ContainsSl2)
    } else {
        Ok(BigImageVerdict::Inconclusive)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn curve_17a1() -> WeierstrassCurve {
        WeierstrassCurve::new(1, -1, 1, -1, -14, Some("17a1".to_string())).expect("17a1 invariants")
    }

    #[test]
    fn certificate_examples() {
        let cert = is_auxiliary(113, -14, 5, 2, 17)
            .expect("valid candidate")
            .expect("qualifies");
        assert_eq!(cert.sign, -1);
        assert_eq!(cert.checks.q_mod_p, 3);
        assert!(cert.checks.eigenvalue_congruent);
        assert!(cert.checks.coprime_to_level);

        assert_eq!(is_auxiliary(11, 0, 5, 2, 17), Ok(None), "11 = 1 mod 5");
        assert_eq!(is_auxiliary(19, 3, 5, 2, 17), Ok(None), "19 = -1 mod 5");

        let cert = is_auxiliary(13, 14, 5, 2, 17)
            .expect("valid candidate")
            .expect("qualifies");
        assert_eq!(cert.sign, 1, "14 = 13 + 1 exactly");

        assert_eq!(
            is_auxiliary(17, 1, 5, 2, 17),
            Err(AuxPrimeError::RamifiedPrime { q: 17 })
        );
        assert_eq!(
            is_auxiliary(5, 1, 5, 2, 17),
            Err(AuxPrimeError::RamifiedPrime { q: 5 })
        );
    }

    #[test]
    fn qualification_is_monotone_in_precision() {
        let mut rng = ChaCha8Rng::seed_from_u64(406);
        let candidates: Vec<u64> = primes::primes_up_to(500);
        for _ in 0..300 {
            let q = candidates[rng.gen_range(0..candidates.len())];
            let p = if rng.gen_bool(0.5) { 5 } else { 7 };
            if q == p {
                continue;
            }
            let n = rng.gen_range(1..=3u32);
            let sign: i64 = if rng.gen_bool(0.5) { 1 } else { -1 };
            let jitter: i64 = rng.gen_range(0..5) * (p as i64).pow(n);
            let a_q = sign * (q as i64 + 1) + jitter;
            let deep = is_auxiliary(q, a_q, p, n, 1).expect("coprime level");
            for shallower in 1..n {
                let shallow = is_auxiliary(q, a_q, p, shallower, 1).expect("coprime level");
                if deep.is_some() {
                    assert!(
                        shallow.is_some(),
                        "a certificate at p^{n} must persist at p^{shallower} for q = {q}"
                    );
                    assert_eq!(shallow.unwrap().sign, deep.unwrap().sign);
                }
            }
        }
    }

    #[test]
    fn search_at_depth_two_finds_the_quoted_prime() {
        let certs = search_auxiliary_curve(&curve_17a1(), 5, 2, 200, 17).expect("search");
        let found: Vec<(u64, i8)> = certs.iter().map(|c| (c.q, c.sign)).collect();
        assert_eq!(found, vec![(97, -1), (107, 1), (113, -1)]);
        let at_113 = certs.iter().find(|c| c.q == 113).expect("113 qualifies");
        assert_eq!(at_113.a_q, -14);
    }

    #[test]
    fn search_results_survive_an_independent_recheck() {
        let certs = search_auxiliary_curve(&curve_17a1(), 5, 1, 50, 17).expect("search");
        assert!(certs.iter().any(|c| c.q == 37), "37 = 2 mod 5 with a_37 = -2 = 3 = 38 mod 5");
        for cert in &certs {
            assert!(primes::is_prime(cert.q));
            assert!(cert.q % 5 != 1 && cert.q % 5 != 4);
            let lhs = cert.a_q.rem_euclid(5);
            let rhs = (cert.sign as i64 * (cert.q as i64 + 1)).rem_euclid(5);
            assert_eq!(lhs, rhs, "q = {} fails the direct congruence", cert.q);
        }
        assert!(search_auxiliary_curve(&curve_17a1(), 5, 2, 1, 17)
            .expect("empty range")
            .is_empty());
    }

    #[test]
    fn search_propagates_table_gaps() {
        let table = ApTable::ingested(
            [(2u64, -1i64)].into_iter().collect(),
            [(17u64, 1i64)].into_iter().collect(),
        );
        assert_eq!(
            search_auxiliary(&table, 5, 2, 10, 17),
            Err(AuxPrimeError::MissingEigenvalue { q: 3 })
        );
    }

    #[test]
    fn frobenius_order_pair_examples() {
        assert_eq!(frob_order_pair(113, -14, 5, 2), Ok((4, 20)));
        assert_eq!(frob_order_pair(113, -14, 5, 1), Ok((4, 4)));

        // Steinberg-shaped trace: roots (q, 1), so the ratio is q itself.
        assert_eq!(frob_order_pair(7, 8, 5, 1), Ok((4, 4)), "order of 2 mod 5");
        assert_eq!(frob_order_pair(3, 4, 7, 1), Ok((6, 6)), "order of 3 mod 7");

        assert!(matches!(
            frob_order_pair(2, 0, 5, 2),
            Err(AuxPrimeError::Arith(ArithError::NotSplit { .. }))
        ));
    }

    #[test]
    fn frobenius_orders_divide_the_unit_group_exponents() {
        let mut rng = ChaCha8Rng::seed_from_u64(407);
        let mut tried = 0;
        while tried < 120 {
            let p = if rng.gen_bool(0.5) { 5u64 } else { 7 };
            let n = rng.gen_range(2..=3u32);
            let q = 2 + rng.gen_range(0..500u64);
            if !primes::is_prime(q) || q == p {
                continue;
            }
            let a_q = rng.gen_range(-60..=60i64);
            let Ok((ord_p, ord_pn)) = frob_order_pair(q, a_q, p, n) else {
                continue;
            };
            tried += 1;
            assert_eq!(ord_pn % ord_p, 0, "residual order divides the deep order");
            let exponent = (p as u128).pow(n - 1) * (p as u128 - 1);
            assert_eq!(exponent % ord_pn, 0, "deep order divides p^(n-1)(p-1)");
        }
    }

    #[test]
    fn residual_image_verdicts() {
        let table = ap_table(&curve_17a1(), 200).expect("table");
        assert_eq!(
            big_image_verdict(&table, 17, 5),
            Ok(BigImageVerdict::ContainsSl2)
        );

        // More data never retracts the verdict.
        let deeper = ap_table(&curve_17a1(), 400).expect("table");
        assert_eq!(
            big_image_verdict(&deeper, 17, 5),
            Ok(BigImageVerdict::ContainsSl2)
        );

        // A curve with extra endomorphisms has projectively dihedral
        // image; every inert prime for the endomorphism field has zero
        // eigenvalue, so the character sweep finds no witness.
        let cm = WeierstrassCurve::new(0, 0, 0, 0, 1, Some("36a4".to_string())).expect("curve");
        let cm_table = ap_table(&cm, 200).expect("table");
        assert_eq!(
            big_image_verdict(&cm_table, 36, 5),
            Ok(BigImageVerdict::Inconclusive)
        );

        let empty = ApTable::ingested(Default::default(), Default::default());
        assert_eq!(
            big_image_verdict(&empty, 17, 5),
            Err(AuxPrimeError::InsufficientData { deepest: 0 })
        );
    }
}
