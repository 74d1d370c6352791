use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

use crate::primes;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArithError {
    #[error("modulus must be p^n with p an odd prime >= 5 and n >= 1, got p={p}, n={n}")]
    InvalidModulus { p: u64, n: u32 },
    #[error("{value} is not congruent to 1 mod {p}, no canonical square root branch")]
    NotOneModP { value: u128, p: u64 },
    #[error("x^2 + {a1}x + {a0} has no pair of distinct roots mod {p}")]
    NotSplit { a1: u128, a0: u128, p: u64 },
    #[error("{value} is divisible by {p} and has no multiplicative order")]
    NotAUnit { value: u128, p: u64 },
}

/// The ring Z/p^n for an odd prime p >= 5 and exponent n >= 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimePowerModulus {
    p: u64,
    n: u32,
    pn: u128,
}

impl PrimePowerModulus {
    pub fn new(p: u64, n: u32) -> Result<Self, ArithError> {
        if p < 5 || n < 1 || !primes::is_prime(p) {
            return Err(ArithError::InvalidModulus { p, n });
        }
        let pn = (p as u128)
            .checked_pow(n)
            .filter(|&pn| pn < (1u128 << 126))
            .ok_or(ArithError::InvalidModulus { p, n })?;
        Ok(Self { p, n, pn })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn modulus(&self) -> u128 {
        self.pn
    }

    /// Canonical residue of a signed integer.
    pub fn residue(&self, value: i128) -> ResidueInt {
        ResidueInt {
            value: self.reduce_signed(value),
            modulus: *self,
        }
    }

    pub(crate) fn reduce_signed(&self, value: i128) -> u128 {
        if value < 0 {
            let r = value.unsigned_abs() % self.pn;
            if r == 0 {
                0
            } else {
                self.pn - r
            }
        } else {
            value as u128 % self.pn
        }
    }

    pub(crate) fn add_raw(&self, a: u128, b: u128) -> u128 {
        let s = a + b;
        if s >= self.pn {
            s - self.pn
        } else {
            s
        }
    }

    pub(crate) fn sub_raw(&self, a: u128, b: u128) -> u128 {
        if a >= b {
            a - b
        } else {
            a + self.pn - b
        }
    }

    pub(crate) fn neg_raw(&self, a: u128) -> u128 {
        if a == 0 {
            0
        } else {
            self.pn - a
        }
    }

    pub(crate) fn mul_raw(&self, a: u128, b: u128) -> u128 {
        if self.pn <= 1u128 << 64 {
            (a * b) % self.pn
        } else {
            // Shift-and-add so the product never leaves u128 range.
            let (mut a, mut b, mut acc) = (a, b, 0u128);
            while b > 0 {
                if b & 1 == 1 {
                    acc = self.add_raw(acc, a);
                }
                a = self.add_raw(a, a);
                b >>= 1;
            }
            acc
        }
    }

    pub(crate) fn pow_raw(&self, base: u128, mut exp: u128) -> u128 {
        let mut base = base % self.pn;
        let mut acc = 1u128 % self.pn;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul_raw(acc, base);
            }
            base = self.mul_raw(base, base);
            exp >>= 1;
        }
        acc
    }

    pub(crate) fn unit_count(&self) -> u128 {
        (self.pn / self.p as u128) * (self.p as u128 - 1)
    }

    pub(crate) fn inv_raw(&self, a: u128) -> Option<u128> {
        if a % self.p as u128 == 0 {
            return None;
        }
        Some(self.pow_raw(a, self.unit_count() - 1))
    }

    /// p-adic valuation of a canonical residue, capped at n (zero has
    /// valuation n).
    pub(crate) fn valuation_raw(&self, value: u128) -> u32 {
        if value == 0 {
            return self.n;
        }
        let mut v = 0;
        let mut rest = value;
        while rest % self.p as u128 == 0 {
            rest /= self.p as u128;
            v += 1;
        }
        v
    }
}

impl fmt::Display for PrimePowerModulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.n == 1 {
            write!(f, "{}", self.p)
        } else {
            write!(f, "{}^{}", self.p, self.n)
        }
    }
}

/// Canonical residue in [0, p^n) together with its modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ResidueInt {
    value: u128,
    modulus: PrimePowerModulus,
}

impl ResidueInt {
    pub fn new(modulus: PrimePowerModulus, value: i128) -> Self {
        modulus.residue(value)
    }

    pub(crate) fn from_raw(modulus: PrimePowerModulus, value: u128) -> Self {
        debug_assert!(value < modulus.modulus());
        Self { value, modulus }
    }

    pub fn value(&self) -> u128 {
        self.value
    }

    pub fn modulus(&self) -> PrimePowerModulus {
        self.modulus
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    pub fn is_unit(&self) -> bool {
        self.value % self.modulus.p as u128 != 0
    }

    /// p-adic valuation in [0, n], equal to n exactly for zero.
    pub fn val(&self) -> u32 {
        self.modulus.valuation_raw(self.value)
    }

    pub fn pow(&self, exp: u128) -> Self {
        Self {
            value: self.modulus.pow_raw(self.value, exp),
            modulus: self.modulus,
        }
    }

    pub fn inv(&self) -> Result<Self, ArithError> {
        self.modulus
            .inv_raw(self.value)
            .map(|value| Self {
                value,
                modulus: self.modulus,
            })
            .ok_or(ArithError::NotAUnit {
                value: self.value,
                p: self.modulus.p,
            })
    }
}

impl fmt::Display for ResidueInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

macro_rules! residue_binop {
    ($trait:ident, $method:ident, $raw:ident) => {
        impl $trait for ResidueInt {
            type Output = ResidueInt;
            fn $method(self, rhs: ResidueInt) -> ResidueInt {
                assert_eq!(self.modulus, rhs.modulus, "mixed moduli");
                ResidueInt {
                    value: self.modulus.$raw(self.value, rhs.value),
                    modulus: self.modulus,
                }
            }
        }
    };
}

residue_binop!(Add, add, add_raw);
residue_binop!(Sub, sub, sub_raw);
residue_binop!(Mul, mul, mul_raw);

impl Neg for ResidueInt {
    type Output = ResidueInt;
    fn neg(self) -> ResidueInt {
        ResidueInt {
            value: self.modulus.neg_raw(self.value),
            modulus: self.modulus,
        }
    }
}

/// Square root of u = 1 mod p on the branch r = 1 mod p.
///
/// The residues congruent to 1 mod p form a cyclic group of odd order
/// p^(n-1), so raising to ((p^(n-1))+1)/2 inverts squaring on it.
pub fn hensel_sqrt(u: &ResidueInt) -> Result<ResidueInt, ArithError> {
    let m = u.modulus();
    if u.value() % m.p() as u128 != 1 {
        return Err(ArithError::NotOneModP {
            value: u.value(),
            p: m.p(),
        });
    }
    let subgroup_order = m.modulus() / m.p() as u128;
    Ok(u.pow((subgroup_order + 1) / 2))
}

/// Hensel-lifted roots of x^2 + a1*x + a0 over Z/p^n, ascending.
///
/// Requires two distinct roots mod p; the lift is Newton iteration, whose
/// derivative 2x + a1 stays a unit precisely because the roots separate
/// mod p.
pub fn quadratic_roots(
    a1: &ResidueInt,
    a0: &ResidueInt,
) -> Result<(ResidueInt, ResidueInt), ArithError> {
    let m = a1.modulus();
    assert_eq!(m, a0.modulus(), "mixed moduli");
    let p = m.p() as u128;
    let eval_mod_p = |x: u128| (x * x + (a1.value() % p) * x + a0.value() % p) % p;
    let mut residual_roots = Vec::new();
    for x in 0..p {
        if eval_mod_p(x) == 0 {
            residual_roots.push(x);
        }
    }
    if residual_roots.len() != 2 {
        return Err(ArithError::NotSplit {
            a1: a1.value(),
            a0: a0.value(),
            p: m.p(),
        });
    }

    let lift = |r0: u128| {
        let mut x = m.residue(r0 as i128);
        for _ in 0..8 {
            let f = x * x + *a1 * x + *a0;
            if f.is_zero() {
                break;
            }
            let fprime = x + x + *a1;
            x = x - f * fprime.inv().expect("derivative is a unit at a simple root");
        }
        let f = x * x + *a1 * x + *a0;
        assert!(f.is_zero(), "Newton iteration failed to converge");
        x
    };
    let r1 = lift(residual_roots[0]);
    let r2 = lift(residual_roots[1]);
    if r1.value() <= r2.value() {
        Ok((r1, r2))
    } else {
        Ok((r2, r1))
    }
}

/// Least k >= 1 with a^k = 1, for a a unit mod p^n.
pub fn mult_order(a: &ResidueInt) -> Result<u128, ArithError> {
    if !a.is_unit() {
        return Err(ArithError::NotAUnit {
            value: a.value(),
            p: a.modulus().p(),
        });
    }
    let m = a.modulus();
    let mut order = m.unit_count();
    let mut prime_factors: Vec<u64> = primes::factorize(m.p() - 1)
        .into_iter()
        .map(|(q, _)| q)
        .collect();
    if m.n() > 1 {
        prime_factors.push(m.p());
    }
    for q in prime_factors {
        let q = q as u128;
        while order % q == 0 && a.pow(order / q).value() == 1 {
            order /= q;
        }
    }
    Ok(order)
}

/// Largest exponent a prime of ramification index e can contribute to the
/// modulus of the relevant ray class field: 1 for primes away from p,
/// otherwise floor(p*e/(p-1)) + 1.
pub fn modulus_exponent_bound(divides_p: bool, e: u64, p: u64) -> u64 {
    assert!(e >= 1, "ramification index must be at least 1");
    if !divides_p {
        1
    } else {
        ((p as u128 * e as u128) / (p as u128 - 1)) as u64 + 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn zmod(p: u64, n: u32) -> PrimePowerModulus {
        PrimePowerModulus::new(p, n).unwrap()
    }

    #[test]
    fn modulus_construction_guards() {
        assert!(PrimePowerModulus::new(5, 2).is_ok());
        assert!(PrimePowerModulus::new(2, 3).is_err());
        assert!(PrimePowerModulus::new(3, 1).is_err());
        assert!(PrimePowerModulus::new(4, 1).is_err());
        assert!(PrimePowerModulus::new(15, 1).is_err());
        assert!(PrimePowerModulus::new(5, 0).is_err());
    }

    #[test]
    fn canonical_reduction() {
        let m = zmod(5, 2);
        assert_eq!(m.residue(26).value(), 1);
        assert_eq!(m.residue(-1).value(), 24);
        assert_eq!(m.residue(-50).value(), 0);
        assert_eq!(m.residue(0).value(), 0);
    }

    #[test]
    fn valuation_caps_at_n() {
        let m = zmod(5, 3);
        assert_eq!(m.residue(0).val(), 3);
        assert_eq!(m.residue(25).val(), 2);
        assert_eq!(m.residue(10).val(), 1);
        assert_eq!(m.residue(12).val(), 0);
    }

    #[test]
    fn ring_operations_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let m = zmod(7, 4);
        for _ in 0..200 {
            let a = m.residue(rng.gen_range(-5000..5000));
            let b = m.residue(rng.gen_range(-5000..5000));
            assert_eq!(a + b - b, a);
            assert_eq!(-(-a), a);
            if b.is_unit() {
                let binv = b.inv().unwrap();
                assert_eq!((a * b) * binv, a);
                assert_eq!((b * binv).value(), 1);
            }
        }
    }

    #[test]
    fn multiplication_beyond_word_size_matches_bigint() {
        use num_bigint::BigUint;
        let m = zmod(97, 10);
        assert!(m.modulus() > u64::MAX as u128);
        let big_m = BigUint::from(m.modulus());
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..100 {
            let a = rng.gen_range(0..m.modulus());
            let b = rng.gen_range(0..m.modulus());
            let expected = (BigUint::from(a) * BigUint::from(b)) % &big_m;
            assert_eq!(BigUint::from(m.mul_raw(a, b)), expected);
        }
    }

    #[test]
    fn hensel_sqrt_examples() {
        let m = zmod(5, 2);
        assert_eq!(hensel_sqrt(&m.residue(1)).unwrap().value(), 1);
        assert_eq!(hensel_sqrt(&m.residue(6)).unwrap().value(), 16);
        assert!(hensel_sqrt(&m.residue(2)).is_err());
        assert!(hensel_sqrt(&m.residue(0)).is_err());
    }

    #[test]
    fn hensel_sqrt_matches_exhaustive_search() {
        for (p, n) in [(5u64, 2u32), (5, 3), (7, 2)] {
            let m = zmod(p, n);
            for k in 0..(m.modulus() / p as u128) {
                let u = m.residue((1 + k * p as u128) as i128);
                let r = hensel_sqrt(&u).unwrap();
                let brute: Vec<u128> = (0..m.modulus())
                    .filter(|&x| x % p as u128 == 1 && m.mul_raw(x, x) == u.value())
                    .collect();
                assert_eq!(brute, vec![r.value()], "u={} mod {}", u.value(), m);
            }
        }
    }

    #[test]
    fn hensel_sqrt_round_trips() {
        let m = zmod(5, 3);
        for k in 0..25u128 {
            let u = m.residue((1 + 5 * k) as i128);
            assert_eq!(hensel_sqrt(&(u * u)).unwrap(), u);
            let r = hensel_sqrt(&u).unwrap();
            assert_eq!(r * r, u);
            assert_eq!(r.value() % 5, 1);
        }
    }

    #[test]
    fn quadratic_roots_examples() {
        let m = zmod(5, 2);
        let (r1, r2) = quadratic_roots(&m.residue(14), &m.residue(113)).unwrap();
        assert_eq!((r1.value(), r2.value()), (12, 24));
        let (r1, r2) = quadratic_roots(&m.residue(0), &m.residue(-1)).unwrap();
        assert_eq!((r1.value(), r2.value()), (1, 24));
        assert_eq!(
            quadratic_roots(&m.residue(1), &m.residue(1)),
            Err(ArithError::NotSplit { a1: 1, a0: 1, p: 5 })
        );
    }

    #[test]
    fn quadratic_roots_reject_double_roots() {
        let m = zmod(5, 2);
        // x^2 - 2x + 1 = (x-1)^2 has a double root mod 5.
        assert!(quadratic_roots(&m.residue(-2), &m.residue(1)).is_err());
    }

    #[test]
    fn quadratic_roots_recover_random_factorizations() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for (p, n) in [(5u64, 2u32), (7, 3), (11, 2)] {
            let m = zmod(p, n);
            for _ in 0..100 {
                let r1 = m.residue(rng.gen_range(0..m.modulus() as i128));
                let r2 = m.residue(rng.gen_range(0..m.modulus() as i128));
                if r1.value() % p as u128 == r2.value() % p as u128 {
                    continue;
                }
                let a1 = -(r1 + r2);
                let a0 = r1 * r2;
                let (s1, s2) = quadratic_roots(&a1, &a0).unwrap();
                assert_eq!(s1 + s2, -a1);
                assert_eq!(s1 * s2, a0);
                let mut expected = [r1.value(), r2.value()];
                expected.sort_unstable();
                assert_eq!([s1.value(), s2.value()], expected);
            }
        }
    }

    #[test]
    fn mult_order_examples() {
        assert_eq!(mult_order(&zmod(5, 2).residue(1)).unwrap(), 1);
        assert_eq!(mult_order(&zmod(5, 2).residue(13)).unwrap(), 20);
        assert_eq!(mult_order(&zmod(5, 1).residue(3)).unwrap(), 4);
        assert!(mult_order(&zmod(5, 2).residue(10)).is_err());
    }

    #[test]
    fn mult_order_is_minimal_and_divides_group_order() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for (p, n) in [(5u64, 3u32), (7, 2), (13, 1)] {
            let m = zmod(p, n);
            for _ in 0..60 {
                let a = m.residue(rng.gen_range(1..m.modulus() as i128));
                if !a.is_unit() {
                    continue;
                }
                let k = mult_order(&a).unwrap();
                assert_eq!(m.unit_count() % k, 0);
                assert_eq!(a.pow(k).value(), 1);
                for (q, _) in primes::factorize(k as u64) {
                    assert_ne!(a.pow(k / q as u128).value(), 1, "a={} k={k} q={q}", a);
                }
            }
        }
    }

    #[test]
    fn modulus_exponent_bound_examples() {
        assert_eq!(modulus_exponent_bound(false, 7, 5), 1);
        assert_eq!(modulus_exponent_bound(false, 1, 13), 1);
        assert_eq!(modulus_exponent_bound(true, 20, 5), 26);
        assert_eq!(modulus_exponent_bound(true, 1, 5), 2);
    }

    #[test]
    fn modulus_exponent_bound_monotone_in_e() {
        for p in [5u64, 7, 13] {
            let mut prev = 0;
            for e in 1..200 {
                let b = modulus_exponent_bound(true, e, p);
                assert!(b >= prev);
                prev = b;
            }
        }
    }
}
