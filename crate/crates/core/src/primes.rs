//! Primality testing, factorization and quadratic symbols for word-sized
//! integers.

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn powmod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod(acc, base, m);
        }
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin primality test for `u64` inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == q {
            return true;
        }
        if n % q == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    // This witness set decides primality for every 64-bit integer.
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Primes up to and including `bound`, ascending.
pub fn primes_up_to(bound: u64) -> Vec<u64> {
    if bound < 2 {
        return Vec::new();
    }
    let n = bound as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for q in 2..=n {
        if composite[q] {
            continue;
        }
        out.push(q as u64);
        let mut k = q * q;
        while k <= n {
            composite[k] = true;
            k += q;
        }
    }
    out
}

/// Prime factorization as ascending `(prime, exponent)` pairs; `factorize(1)`
/// is empty.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    assert!(n > 0, "factorize requires a positive argument");
    let mut out = Vec::new();
    let mut q = 2u64;
    while q * q <= n {
        if n % q == 0 {
            let mut e = 0u32;
            while n % q == 0 {
                n /= q;
                e += 1;
            }
            out.push((q, e));
        }
        q += if q == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// All positive divisors of `n`, ascending.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut out = vec![1u64];
    for (q, e) in factorize(n) {
        let prev = out.clone();
        let mut qk = 1u64;
        for _ in 0..e {
            qk *= q;
            out.extend(prev.iter().map(|d| d * qk));
        }
    }
    out.sort_unstable();
    out
}

/// Kronecker symbol `(a|n)`, extending the Jacobi symbol to all integer
/// moduli.
pub fn kronecker(mut a: i64, mut n: i64) -> i32 {
    if n == 0 {
        return if a == 1 || a == -1 { 1 } else { 0 };
    }
    let mut result = 1i32;
    if n < 0 {
        n = -n;
        if a < 0 {
            result = -result;
        }
    }
    let mut twos = 0u32;
    while n % 2 == 0 {
        n /= 2;
        twos += 1;
    }
    if twos > 0 {
        if a % 2 == 0 {
            return 0;
        }
        if twos % 2 == 1 && matches!(a.rem_euclid(8), 3 | 5) {
            result = -result;
        }
    }
    a = a.rem_euclid(n);
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if matches!(n % 8, 3 | 5) {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            result = -result;
        }
        a %= n;
    }
    if n == 1 {
        result
    } else {
        0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn is_prime_agrees_with_sieve() {
        let sieve = primes_up_to(10_000);
        let mut idx = 0;
        for n in 0..=10_000u64 {
            let in_sieve = idx < sieve.len() && sieve[idx] == n;
            if in_sieve {
                idx += 1;
            }
            assert_eq!(is_prime(n), in_sieve, "disagreement at {n}");
        }
    }

    #[test]
    fn is_prime_large_values() {
        assert!(is_prime(1_000_000_007));
        assert!(is_prime((1 << 61) - 1));
        assert!(!is_prime(1_000_000_007u64 * 1_000_000_009));
        assert!(!is_prime(3_215_031_751)); // strong pseudoprime to bases 2,3,5,7
    }

    #[test]
    fn factorize_examples() {
        assert_eq!(factorize(1), vec![]);
        assert_eq!(factorize(1921), vec![(17, 1), (113, 1)]);
        assert_eq!(factorize(83_521), vec![(17, 4)]);
        assert_eq!(factorize(270_000), vec![(2, 4), (3, 3), (5, 4)]);
    }

    #[test]
    fn factorize_round_trips() {
        for n in 1..=3_000u64 {
            let product: u64 = factorize(n)
                .iter()
                .map(|&(q, e)| q.pow(e))
                .product();
            assert_eq!(product, n);
            for &(q, _) in &factorize(n) {
                assert!(is_prime(q));
            }
        }
    }

    #[test]
    fn divisors_examples() {
        assert_eq!(divisors(1), vec![1]);
        assert_eq!(divisors(1921), vec![1, 17, 113, 1921]);
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
    }

    #[test]
    fn kronecker_matches_euler_criterion() {
        for &p in &[3i64, 5, 7, 11, 13, 17, 101, 113] {
            for a in -30..30i64 {
                let euler = powmod(a.rem_euclid(p) as u64, (p as u64 - 1) / 2, p as u64);
                let expected = match euler {
                    0 => 0,
                    1 => 1,
                    e if e == p as u64 - 1 => -1,
                    _ => unreachable!(),
                };
                assert_eq!(kronecker(a, p), expected, "a={a} p={p}");
            }
        }
    }

    #[test]
    fn kronecker_multiplicative_in_modulus() {
        for a in -20..20i64 {
            for m in 1..20i64 {
                for n in 1..20i64 {
                    assert_eq!(
                        kronecker(a, m * n),
                        kronecker(a, m) * kronecker(a, n),
                        "a={a} m={m} n={n}"
                    );
                }
            }
        }
    }

    #[test]
    fn kronecker_special_cases() {
        assert_eq!(kronecker(-1, 5), 1);
        assert_eq!(kronecker(2, 7), 1);
        assert_eq!(kronecker(2, 3), -1);
        assert_eq!(kronecker(5, 5), 0);
        assert_eq!(kronecker(3, 1), 1);
        assert_eq!(kronecker(0, 1), 1);
        assert_eq!(kronecker(1, 0), 1);
        assert_eq!(kronecker(4, 0), 0);
        assert_eq!(kronecker(-3, 2), -1);
        assert_eq!(kronecker(-1, -1), -1);
    }
}
