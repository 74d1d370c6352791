//! Acceptance gate: nine end-to-end checks, one printed verdict line each.
//!
//! Every check prints `criterion N: PASS ...` or `criterion N: FAIL ...`
//! together with its wall time before asserting, so the scoreboard is
//! visible with `cargo test --test acceptance -- --nocapture`.

use std::time::{Duration, Instant};

use modpn::adjgroup;
use modpn::arith::{
    modulus_exponent_bound, quadratic_roots, PrimePowerModulus, ResidueInt, ResidueMatrix,
};
use modpn::auxprimes::{frob_order_pair, search_auxiliary_curve};
use modpn::cohodim::{all_cases, dims, dims_unramified_oracle, unramified_case_of};
use modpn::congr::{level_raising_witness, NewformData};
use modpn::deformplan::{lemma_v_element, verify_adjustment};
use modpn::ellcurve::{ap_of_prime, ap_table, WeierstrassCurve};
use modpn::localtypes::{
    allowed_reductions, classify_residual, IntegralLocalType, LocalTypeError, TameLocalData,
};
use modpn::modsym::{build_space, genus_x0, hecke_operator, CoeffRing, OperatorLabel, RationalField};
use modpn::primes;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn curve_17a1() -> WeierstrassCurve {
    WeierstrassCurve::new(1, -1, 1, -1, -14, Some("17a1".into())).expect("17a1 is nonsingular")
}

/// Prints the verdict line and enforces both the value and the budget.
fn conclude(n: u32, value_ok: bool, budget: Duration, started: Instant, detail: &str) {
    let elapsed = started.elapsed();
    let within = elapsed <= budget;
    let tag = if value_ok && within { "PASS" } else { "FAIL" };
    println!("criterion {n}: {tag} {detail} ({:.1}s)", elapsed.as_secs_f64());
    assert!(value_ok, "criterion {n} value check failed: {detail}");
    assert!(
        within,
        "criterion {n} exceeded its {}s budget: took {:.1}s",
        budget.as_secs(),
        elapsed.as_secs_f64()
    );
}

#[test]
fn criterion_1_auxiliary_search_from_point_counts() {
    let start = Instant::now();
    let certs = search_auxiliary_curve(&curve_17a1(), 5, 2, 200, 17).expect("scan succeeds");
    let found: Vec<(u64, i8)> = certs.iter().map(|c| (c.q, c.sign)).collect();
    let headline = certs.iter().find(|c| c.q == 113);
    let value_ok = headline.is_some_and(|c| c.sign == -1 && c.a_q == -14)
        && found == [(97, -1), (107, 1), (113, -1)];
    conclude(
        1,
        value_ok,
        Duration::from_secs(5),
        start,
        &format!("auxiliary scan to 200 mod 25 found {found:?}, 113 carries sign -1 and a = -14"),
    );
}

#[test]
fn criterion_2_frobenius_orders_and_roots() {
    let start = Instant::now();
    let orders = frob_order_pair(113, -14, 5, 2).expect("x^2 + 14x + 113 splits mod 5");
    let m = PrimePowerModulus::new(5, 2).expect("5^2 fits");
    let (r1, r2) = quadratic_roots(&m.residue(14), &m.residue(113)).expect("roots lift");
    let mut roots = [r1.value(), r2.value()];
    roots.sort_unstable();
    let value_ok = orders == (4, 20) && roots == [12, 24];
    conclude(
        2,
        value_ok,
        Duration::from_secs(1),
        start,
        &format!("eigenvalue ratio orders {orders:?}, roots mod 25 {roots:?}"),
    );
}

#[test]
fn criterion_3_dimension_table_against_the_conjugation_oracle() {
    let start = Instant::now();
    let mut value_ok = true;
    for case in all_cases() {
        let t = dims(&case).expect("tabulated case");
        if t.d1 != t.d0 + t.d2 {
            value_ok = false;
        }
    }
    let mut swept = 0u64;
    for (p, ells) in [(5u64, [11u64, 19, 13, 17]), (7, [29, 13, 17, 19])] {
        let m = PrimePowerModulus::new(p, 1).expect("residual modulus");
        for a in 0..p as i128 {
            for b in 0..p as i128 {
                for c in 0..p as i128 {
                    for d in 0..p as i128 {
                        let frob = ResidueMatrix::from_signed(m, 2, 2, &[a, b, c, d]);
                        if !frob.det2().is_unit() {
                            continue;
                        }
                        swept += 1;
                        for &ell in &ells {
                            let case = unramified_case_of(&frob, ell).expect("invertible");
                            let t = dims(&case).expect("tabulated case");
                            let (d0, d2) = dims_unramified_oracle(&frob, ell).expect("invertible");
                            if (t.d0, t.d2) != (d0, d2) {
                                value_ok = false;
                            }
                        }
                    }
                }
            }
        }
    }
    conclude(
        3,
        value_ok,
        Duration::from_secs(5),
        start,
        &format!("d1 = d0 + d2 on all tabulated cases, oracle agreed on {swept} matrices over F5 and F7"),
    );
}

/// Exact valuation v with a random unit cofactor; v = n gives zero.
fn residue_with_val(rng: &mut ChaCha8Rng, modulus: PrimePowerModulus, v: u32) -> ResidueInt {
    let p = modulus.p() as u128;
    if v >= modulus.n() {
        return modulus.residue(0);
    }
    let cofactor_room = p.pow(modulus.n() - v);
    let mut u = rng.gen_range(1..cofactor_room);
    if u % p == 0 {
        u += 1;
    }
    modulus.residue(((p.pow(v) * u) % modulus.modulus()) as i128)
}

fn primes_with_ell_minus_one_valuation(p: u64, c: u32) -> &'static [u64] {
    match (p, c) {
        (5, 1) => &[11, 31, 41, 61, 71],
        (5, 2) => &[101, 151, 401],
        (5, 3) => &[251, 751],
        (7, 1) => &[29, 43, 71, 113],
        (7, 2) => &[197, 491, 883],
        (7, 3) => &[1373, 7547],
        _ => panic!("no prime pool for p = {p}, valuation {c}"),
    }
}

fn shear_family_data(
    ell: u64,
    modulus: PrimePowerModulus,
    x: ResidueInt,
    y: ResidueInt,
) -> TameLocalData {
    let mut sigma = ResidueMatrix::identity(modulus, 2);
    sigma.set(0, 0, modulus.residue(ell as i128));
    sigma.set(0, 1, x);
    let mut tau = ResidueMatrix::identity(modulus, 2);
    tau.set(0, 1, y);
    TameLocalData::new(ell, sigma, tau).expect("family data is tame")
}

#[test]
fn criterion_4_adjusters_across_all_valuation_patterns() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(406);
    let mut failures = 0u32;
    let mut instances = 0u32;
    // Precision 2 admits no instances: the family needs p | x and p | y
    // while the adjuster congruences need a valuation <= m - 2, so the
    // randomized sweep draws m from {3, 4}.
    for pattern in 1..=7u32 {
        for _ in 0..500 {
            let p = if rng.gen_bool(0.5) { 5u64 } else { 7 };
            let mn = if rng.gen_bool(0.5) { 3u32 } else { 4 };
            let m = PrimePowerModulus::new(p, mn).expect("modulus");
            let top = mn - 2;
            let (a, b, c) = match pattern {
                1 => {
                    let b = rng.gen_range(1..=top);
                    (rng.gen_range(b + 1..=mn), b, rng.gen_range(b + 1..=3))
                }
                2 => {
                    let a = rng.gen_range(1..=top);
                    (a, rng.gen_range(a + 1..=mn - 1), rng.gen_range(a + 1..=3))
                }
                3 => {
                    let c = rng.gen_range(1..=top);
                    (rng.gen_range(c + 1..=mn), rng.gen_range(c + 1..=mn - 1), c)
                }
                4 => {
                    let b = rng.gen_range(1..=top);
                    (rng.gen_range(b + 1..=mn), b, b)
                }
                5 => {
                    let a = rng.gen_range(1..=top);
                    (a, a, rng.gen_range(a + 1..=3))
                }
                6 => {
                    let a = rng.gen_range(1..=top);
                    (a, rng.gen_range(a + 1..=mn - 1), a)
                }
                _ => {
                    let a = rng.gen_range(1..=top);
                    (a, a, a)
                }
            };
            let pool = primes_with_ell_minus_one_valuation(p, c);
            let ell = pool[rng.gen_range(0..pool.len())];
            let x = residue_with_val(&mut rng, m, a);
            let y = residue_with_val(&mut rng, m, b);
            instances += 1;
            let verified = lemma_v_element(x, y, ell)
                .ok()
                .and_then(|(v, conj)| {
                    verify_adjustment(&shear_family_data(ell, m, x, y), &v, &conj).ok()
                })
                == Some(true);
            if !verified {
                failures += 1;
            }
        }
    }
    conclude(
        4,
        failures == 0,
        Duration::from_secs(30),
        start,
        &format!("{instances} randomized adjusters over 7 valuation patterns, {failures} failures"),
    );
}

#[test]
fn criterion_5_adjoint_group_suite() {
    let start = Instant::now();
    let checks = adjgroup::verification_suite();
    let failed: Vec<&str> = checks.iter().filter(|c| !c.pass).map(|c| c.name).collect();
    let value_ok = failed.is_empty() && checks.len() == 11;
    conclude(
        5,
        value_ok,
        Duration::from_secs(60),
        start,
        &format!("{} named group checks, failed: {failed:?}", checks.len()),
    );
}

#[test]
fn criterion_6_modular_symbol_ranks_and_eigenvalues() {
    let start = Instant::now();
    let mut value_ok = true;
    let s = build_space(RationalField, 17).expect("level 17 is in range");
    if s.cuspidal_rank() != 2 {
        value_ok = false;
    }
    let e = curve_17a1();
    for ell in primes::primes_up_to(50) {
        if ell == 17 {
            continue;
        }
        let a = ap_of_prime(&e, ell).expect("good reduction");
        let t = hecke_operator(&s, OperatorLabel::T(ell)).expect("good prime");
        for (i, row) in t.rows().iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                let expect = if i == j {
                    RationalField.from_i64(a)
                } else {
                    RationalField.zero()
                };
                if *v != expect {
                    value_ok = false;
                }
            }
        }
    }
    for n in 1..=200u64 {
        let s = build_space(RationalField, n).expect("level in range");
        if s.cuspidal_rank() as u64 != 2 * genus_x0(n) {
            value_ok = false;
        }
    }
    conclude(
        6,
        value_ok,
        Duration::from_secs(120),
        start,
        "level 17 is two dimensional with curve eigenvalues through 50, cuspidal rank is twice the genus through level 200",
    );
}

/// Expects a strict excess of the joint eigensystem kernel at level 1921
/// over its old part. The computation reports joint = old at depths 5 and
/// 25, and the agreement is forced: the congruent eigenform's coefficient
/// field is unramified above 5 with residue degree one at the congruence
/// prime, and the congruence depth is exactly 25 (the unit Frobenius root
/// r of x^2 + 14x + 113 has r + 1 of 5-adic valuation exactly 2), so the
/// new kernel line coincides with the old eigenline modulo 25. The check
/// asserts the expected strict excess anyway and fails honestly.
#[test]
fn criterion_7_level_raising_witness_at_1921() {
    let start = Instant::now();
    let table = ap_table(&curve_17a1(), 400).expect("point counts");
    let f = NewformData::from_table(17, &table);
    let m = PrimePowerModulus::new(5, 2).expect("5^2 fits");
    let report = level_raising_witness(&f, 17, 113, m, -1).expect("witness inputs are valid");
    let value_ok = report.joint_dim > 0 && report.new_witness;
    if !value_ok {
        println!(
            "criterion 7 note: joint and old agree because the congruent eigenform's \
             kernel line reduces into the old eigenline (unramified congruence prime of \
             residue degree one, congruence depth exactly 25); see the test doc comment"
        );
    }
    conclude(
        7,
        value_ok,
        Duration::from_secs(900),
        start,
        &format!(
            "level 1921 witness mod 25: joint {} old {} new_witness {}",
            report.joint_dim, report.old_dim, report.new_witness
        ),
    );
}

#[test]
fn criterion_8_modulus_exponent_bound() {
    let start = Instant::now();
    let bound = modulus_exponent_bound(true, 20, 5);
    conclude(
        8,
        bound == 26,
        Duration::from_secs(1),
        start,
        &format!("ramification budget e = 20 over 5 gives exponent {bound}"),
    );
}

#[test]
fn criterion_9_random_integral_types_reduce_into_allowed_sets() {
    let start = Instant::now();
    let m = PrimePowerModulus::new(5, 2).expect("5^2 fits");
    let mut rng = ChaCha8Rng::seed_from_u64(407);
    let ells: [u64; 12] = [3, 7, 11, 13, 19, 29, 31, 41, 101, 151, 251, 751];
    let mut realized = 0u32;
    let mut attempts = 0u32;
    let mut value_ok = true;
    while realized < 200 && attempts < 5000 {
        attempts += 1;
        let t = match rng.gen_range(0..3) {
            0 => IntegralLocalType::PrincipalSeries {
                lattice_exponent: -rng.gen_range(0..2i32),
            },
            1 => IntegralLocalType::Steinberg {
                lattice_exponent: rng.gen_range(0..2i32),
            },
            _ => IntegralLocalType::Induced {
                m_ramified: rng.gen_bool(0.5),
                descends_mod_p: false,
            },
        };
        let ell = ells[rng.gen_range(0..ells.len())];
        let data = match t.tame_realization(ell, m, rng.gen::<u64>()) {
            Ok(d) => d,
            Err(LocalTypeError::NoSplitRealization { .. }) => continue,
            Err(e) => panic!("realization of {t:?} at ell = {ell} broke: {e}"),
        };
        realized += 1;
        if !data.tame_relation_holds() {
            value_ok = false;
        }
        let residual = classify_residual(&data.reduced_mod_p()).expect("realized data classifies");
        let allowed = allowed_reductions(&t, ell, 5).expect("valid type");
        if !allowed.contains(&residual) {
            value_ok = false;
        }
    }
    conclude(
        9,
        value_ok && realized == 200,
        Duration::from_secs(10),
        start,
        &format!("{realized} realized integral types over Z/25 reduced into their allowed sets"),
    );
}
