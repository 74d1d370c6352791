//! The projective line P^1(Z/N): canonical representatives and the right
//! action of integer matrices, used to index Manin symbols.

use std::collections::HashMap;

use crate::primes;

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Enumerated representatives of P^1(Z/N) with a normalization map sending
/// any coprime pair (c : d) to its canonical representative.
#[derive(Debug, Clone)]
pub struct P1Index {
    level: u64,
    reps: Vec<(u64, u64)>,
    lookup: HashMap<(u64, u64), usize>,
}

impl P1Index {
    pub fn new(level: u64) -> Self {
        assert!(level >= 1);
        let mut reps = Vec::new();
        let mut lookup = HashMap::new();
        if level == 1 {
            reps.push((0, 0));
            lookup.insert((0, 0), 0);
            return Self {
                level,
                reps,
                lookup,
            };
        }
        for g in primes::divisors(level) {
            for d in 0..level {
                if gcd(gcd(g, d), level) != 1 {
                    continue;
                }
                let rep = normalize(level, g, d);
                if let std::collections::hash_map::Entry::Vacant(e) = lookup.entry(rep) {
                    e.insert(reps.len());
                    reps.push(rep);
                }
            }
        }
        Self {
            level,
            reps,
            lookup,
        }
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    pub fn rep(&self, i: usize) -> (u64, u64) {
        self.reps[i]
    }

    /// Index of the class of (c : d); None when gcd(c, d, N) > 1.
    pub fn index_of(&self, c: i64, d: i64) -> Option<usize> {
        let n = self.level as i64;
        let (c, d) = (c.rem_euclid(n) as u64, d.rem_euclid(n) as u64);
        if self.level > 1 && gcd(gcd(c, d), self.level) != 1 {
            return None;
        }
        let rep = normalize(self.level, c, d);
        Some(*self.lookup.get(&rep).expect("every coprime pair normalizes to an enumerated representative"))
    }

    /// Index of (c : d) g for the right action by an integer 2x2 matrix
    /// [[p, q], [r, s]].
    pub fn act_right(&self, i: usize, mat: &[i64; 4]) -> Option<usize> {
        let (c, d) = self.reps[i];
        let (c, d) = (c as i128, d as i128);
        let [p, q, r, s] = mat.map(|v| v as i128);
        let n = self.level as i128;
        let cc = (c * p + d * r).rem_euclid(n) as i64;
        let dd = (c * q + d * s).rem_euclid(n) as i64;
        self.index_of(cc, dd)
    }
}

/// Canonical representative of (c : d) in P^1(Z/N): first coordinate the
/// divisor gcd(c, N), second the minimum over the unit rescalings that fix
/// the first coordinate.
fn normalize(n: u64, c: u64, d: u64) -> (u64, u64) {
    if n == 1 {
        return (0, 0);
    }
    let (c, d) = (c % n, d % n);
    if c == 0 {
        return (0, 1);
    }
    let g = gcd(c, n);
    let c1 = c / g;
    let m = n / g;
    // Lift an inverse of c1 mod m to a unit mod n.
    let mut u = inv_mod(c1 % m, m);
    while gcd(u, n) != 1 {
        u += m;
    }
    let d0 = u * (d % n) % n;
    let mut best = d0;
    let mut v = 1;
    for _ in 0..g {
        if gcd(v, n) == 1 {
            let cand = v * d0 % n;
            if cand < best {
                best = cand;
            }
        }
        v += m;
    }
    (g, best)
}

fn inv_mod(a: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let (mut t, mut new_t) = (0i64, 1i64);
    let (mut r, mut new_r) = (m as i64, (a % m) as i64);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    assert_eq!(r, 1, "inverse of non-unit");
    t.rem_euclid(m as i64) as u64
}

/// Index of SL2(Z) over Gamma_0(N): N * prod_{l | N} (1 + 1/l).
pub fn psi_index(n: u64) -> u64 {
    let mut mu = n;
    for (l, _) in primes::factorize(n) {
        mu = mu / l * (l + 1);
    }
    mu
}
