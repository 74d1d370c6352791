//! Cusps of X_0(N): reduced-fraction representatives, the Gamma_0(N)
//! equivalence test, and SL2(Z) lifts of projective-line pairs.

use crate::primes;

pub(crate) fn gcd_i(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Extended gcd: returns (g, x, y) with a x + b y = g >= 0.
pub(crate) fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        if a < 0 {
            (-a, -1, 0)
        } else {
            (a, 1, 0)
        }
    } else {
        let (g, x, y) = ext_gcd(b, a % b);
        (g, y, x - (a / b) * y)
    }
}

/// A cusp as a reduced fraction num/den with den >= 0; infinity is 1/0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Cusp {
    num: i64,
    den: i64,
}

impl Cusp {
    pub fn new(num: i64, den: i64) -> Self {
        assert!(num != 0 || den != 0);
        if den == 0 {
            return Self { num: 1, den: 0 };
        }
        let g = gcd_i(num, den);
        let (mut num, mut den) = (num / g, den / g);
        if den < 0 {
            num = -num;
            den = -den;
        }
        Self { num, den }
    }

    pub fn infinity() -> Self {
        Self { num: 1, den: 0 }
    }

    pub fn num(&self) -> i64 {
        self.num
    }

    pub fn den(&self) -> i64 {
        self.den
    }

    /// Gamma_0(N) equivalence: p1/q1 ~ p2/q2 iff s1 q2 = s2 q1 modulo
    /// gcd(q1 q2, N), with s_i an inverse of p_i mod q_i.
    pub fn equivalent(&self, other: &Cusp, level: u64) -> bool {
        let n = level as i64;
        let s1 = inverse_of_num_mod_den(self);
        let s2 = inverse_of_num_mod_den(other);
        let g = gcd_i(self.den * other.den, n).max(1);
        (s1 * other.den - s2 * self.den).rem_euclid(g) == 0
    }
}

impl std::fmt::Display for Cusp {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.den == 0 {
            write!(f, "oo")
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

fn inverse_of_num_mod_den(c: &Cusp) -> i64 {
    if c.den == 0 {
        // num is +-1 and its exact inverse is itself.
        return c.num;
    }
    if c.den == 1 {
        return 0;
    }
    let (g, x, _) = ext_gcd(c.num, c.den);
    debug_assert_eq!(g, 1);
    x.rem_euclid(c.den)
}

/// Partition of a list of cusps into Gamma_0(N) classes; returns the class
/// representatives and the class index of each input cusp.
pub fn cusp_classes(cusps: &[Cusp], level: u64) -> (Vec<Cusp>, Vec<usize>) {
    let mut reps: Vec<Cusp> = Vec::new();
    let mut class_of = Vec::with_capacity(cusps.len());
    for c in cusps {
        let found = reps.iter().position(|r| r.equivalent(c, level));
        match found {
            Some(i) => class_of.push(i),
            None => {
                reps.push(*c);
                class_of.push(reps.len() - 1);
            }
        }
    }
    (reps, class_of)
}

/// Number of cusps of X_0(N): sum over d | N of phi(gcd(d, N/d)).
pub fn cusp_number(n: u64) -> u64 {
    primes::divisors(n)
        .into_iter()
        .map(|d| euler_phi(gcd_i(d as i64, (n / d) as i64) as u64))
        .sum()
}

fn euler_phi(n: u64) -> u64 {
    let mut phi = n;
    for (p, _) in primes::factorize(n) {
        phi = phi / p * (p - 1);
    }
    phi
}

/// An SL2(Z) matrix [[a, b], [c, d]] whose bottom row is congruent to the
/// given pair mod N.
pub fn lift_to_sl2(c: u64, d: u64, n: u64) -> [i64; 4] {
    if n == 1 {
        return [1, 0, 0, 1];
    }
    let n = n as i64;
    let (c0, d0) = ((c as i64).rem_euclid(n), (d as i64).rem_euclid(n));
    // Adjust the representatives until they are coprime as integers.
    let c1 = if c0 == 0 { n } else { c0 };
    let mut d1 = d0;
    while gcd_i(c1, d1) != 1 {
        d1 += n;
    }
    let (g, x, y) = ext_gcd(d1, -c1);
    debug_assert_eq!(g, 1);
    // x d1 - y c1 = 1, so [[x, y], [c1, d1]] has determinant 1.
    [x, y, c1, d1]
}
