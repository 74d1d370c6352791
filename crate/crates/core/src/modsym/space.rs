//! Weight-2 Manin symbol spaces for Gamma_0(N): the quotient of the free
//! module on P^1(Z/N) by the 2- and 3-term relations, with boundary map and
//! cuspidal subspace.

use thiserror::Error;

use super::cusps::{self, Cusp};
use super::p1::{psi_index, P1Index};
use super::ring::CoeffRing;
use crate::primes;

/// Largest accepted level.
pub const MAX_LEVEL: u64 = 10_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModSymError {
    #[error("level {level} outside 1..={MAX_LEVEL}")]
    LevelOutOfBounds { level: u64 },
    #[error("relation pivoting stalled at level {level}: p-torsion in the symbol quotient")]
    TorsionAtP { level: u64 },
    #[error("operator {label} is mislabeled at level {level}")]
    MislabeledOperator { label: String, level: u64 },
    #[error("degeneracy map needs divisor levels: {from} to {to} with d = {d}")]
    BadDegeneracy { from: u64, to: u64, d: u64 },
    #[error("degeneracy maps are implemented for prime level ratio, got {from} to {to}")]
    UnsupportedLevelRatio { from: u64, to: u64 },
}

/// The symbol quotient at one level over one coefficient ring. Vectors over
/// the quotient are coordinates with respect to the free symbols.
pub struct ManinSymbolSpace<R: CoeffRing> {
    ring: R,
    level: u64,
    p1: P1Index,
    rank: usize,
    free_symbols: Vec<usize>,
    sym_to_vec: Vec<Vec<R::Elem>>,
    cusp_reps: Vec<Cusp>,
    boundary: Vec<Vec<R::Elem>>,
    cuspidal: Vec<Vec<R::Elem>>,
}

/// Quotient of the free module on P^1(Z/N) by x + xS and x + xT + xT^2.
pub fn build_space<R: CoeffRing>(ring: R, level: u64) -> Result<ManinSymbolSpace<R>, ModSymError> {
    if level < 1 || level > MAX_LEVEL {
        return Err(ModSymError::LevelOutOfBounds { level });
    }
    let p1 = P1Index::new(level);
    let m = p1.len();
    let s_mat = [0i64, -1, 1, 0];
    let t_mat = [0i64, -1, 1, -1];

    // Two-term relations: x_i = -x_{iS}; self-paired symbols vanish since 2
    // is invertible in both coefficient rings.
    #[derive(Clone, Copy, PartialEq)]
    enum Pair {
        Zero,
        Rep,
        NegOf(usize),
    }
    let mut pair = vec![Pair::Rep; m];
    for i in 0..m {
        let j = p1.act_right(i, &s_mat).expect("S preserves P^1");
        if j == i {
            pair[i] = Pair::Zero;
        } else if j > i {
            pair[j] = Pair::NegOf(i);
        }
    }
    let resolve = |i: usize| -> Option<(usize, i64)> {
        match pair[i] {
            Pair::Zero => None,
            Pair::Rep => Some((i, 1)),
            Pair::NegOf(r) => Some((r, -1)),
        }
    };

    // Three-term relations over the surviving representatives, one row per
    // T-orbit.
    let mut rows: Vec<Vec<(usize, i64)>> = Vec::new();
    let mut seen = vec![false; m];
    for i in 0..m {
        if seen[i] {
            continue;
        }
        let ti = p1.act_right(i, &t_mat).expect("T preserves P^1");
        let tti = p1.act_right(ti, &t_mat).expect("T preserves P^1");
        let mut orbit = vec![i];
        if ti != i {
            orbit.push(ti);
        }
        if tti != i && tti != ti {
            orbit.push(tti);
        }
        debug_assert!(orbit.len() != 2, "order-3 action has orbits of size 1 or 3");
        for &k in &orbit {
            seen[k] = true;
        }
        let weight = 3 / orbit.len() as i64;
        let mut entries: std::collections::BTreeMap<usize, i64> = std::collections::BTreeMap::new();
        for &k in &orbit {
            if let Some((rep, sign)) = resolve(k) {
                *entries.entry(rep).or_insert(0) += weight * sign;
            }
        }
        let row: Vec<(usize, i64)> = entries.into_iter().filter(|&(_, c)| c != 0).collect();
        if !row.is_empty() {
            rows.push(row);
        }
    }

    // Eliminate with unit pivots, keeping solved expressions fully
    // back-substituted so they only reference surviving symbols.
    let mut solved: std::collections::BTreeMap<usize, Vec<(usize, R::Elem)>> =
        std::collections::BTreeMap::new();
    let mut queue: Vec<Vec<(usize, R::Elem)>> = rows
        .into_iter()
        .map(|row| {
            row.into_iter()
                .map(|(k, c)| (k, ring.from_i64(c)))
                .collect()
        })
        .collect();
    loop {
        let mut stash = Vec::new();
        let mut progressed = false;
        for row in queue {
            let row = reduce_row::<R>(&ring, row, &solved);
            if row.is_empty() {
                continue;
            }
            let pivot = row
                .iter()
                .enumerate()
                .filter(|(_, (_, c))| ring.inv(c).is_some())
                .map(|(idx, _)| idx)
                .next_back();
            let Some(pidx) = pivot else {
                stash.push(row);
                continue;
            };
            let (k, c) = row[pidx].clone();
            let neg_inv = ring.neg(&ring.inv(&c).expect("pivot is a unit"));
            let expr: Vec<(usize, R::Elem)> = row
                .iter()
                .filter(|(s, _)| *s != k)
                .map(|(s, v)| (*s, ring.mul(&neg_inv, v)))
                .collect();
            for value in solved.values_mut() {
                if value.iter().any(|(s, _)| *s == k) {
                    *value = substitute::<R>(&ring, value, k, &expr);
                }
            }
            solved.insert(k, expr);
            progressed = true;
        }
        if stash.is_empty() {
            break;
        }
        if !progressed {
            return Err(ModSymError::TorsionAtP { level });
        }
        queue = stash;
    }

    let free_symbols: Vec<usize> = (0..m)
        .filter(|&i| matches!(pair[i], Pair::Rep) && !solved.contains_key(&i))
        .collect();
    let rank = free_symbols.len();
    let col_of: std::collections::HashMap<usize, usize> = free_symbols
        .iter()
        .enumerate()
        .map(|(c, &s)| (s, c))
        .collect();

    let mut sym_to_vec = Vec::with_capacity(m);
    for i in 0..m {
        let mut v = vec![ring.zero(); rank];
        if let Some((rep, sign)) = resolve(i) {
            let sign_elem = ring.from_i64(sign);
            match solved.get(&rep) {
                None => {
                    let c = col_of[&rep];
                    v[c] = ring.add(&v[c], &sign_elem);
                }
                Some(expr) => {
                    for (s, coeff) in expr {
                        let c = col_of[s];
                        v[c] = ring.add(&v[c], &ring.mul(&sign_elem, coeff));
                    }
                }
            }
        }
        sym_to_vec.push(v);
    }

    // Boundary: the symbol of [[a, b], [c, d]] is the path from b/d to a/c,
    // so it maps to the class of a/c minus the class of b/d.
    let mut all_cusps = Vec::with_capacity(2 * rank);
    for &f in &free_symbols {
        let (c, d) = p1.rep(f);
        let [a, b, c1, d1] = cusps::lift_to_sl2(c, d, level);
        all_cusps.push(Cusp::new(a, c1));
        all_cusps.push(Cusp::new(b, d1));
    }
    let (cusp_reps, class_of) = cusps::cusp_classes(&all_cusps, level);
    let n_classes = cusp_reps.len();
    let mut boundary = Vec::with_capacity(rank);
    for j in 0..rank {
        let mut row = vec![ring.zero(); n_classes];
        let head = class_of[2 * j];
        let tail = class_of[2 * j + 1];
        row[head] = ring.add(&row[head], &ring.one());
        row[tail] = ring.sub(&row[tail], &ring.one());
        boundary.push(row);
    }
    let cuspidal = ring.left_kernel(&boundary, n_classes);

    Ok(ManinSymbolSpace {
        ring,
        level,
        p1,
        rank,
        free_symbols,
        sym_to_vec,
        cusp_reps,
        boundary,
        cuspidal,
    })
}

fn reduce_row<R: CoeffRing>(
    ring: &R,
    row: Vec<(usize, R::Elem)>,
    solved: &std::collections::BTreeMap<usize, Vec<(usize, R::Elem)>>,
) -> Vec<(usize, R::Elem)> {
    let mut acc: std::collections::BTreeMap<usize, R::Elem> = std::collections::BTreeMap::new();
    for (k, c) in row {
        match solved.get(&k) {
            None => {
                let cur = acc.entry(k).or_insert_with(|| ring.zero());
                *cur = ring.add(cur, &c);
            }
            Some(expr) => {
                for (s, v) in expr {
                    let cur = acc.entry(*s).or_insert_with(|| ring.zero());
                    *cur = ring.add(cur, &ring.mul(&c, v));
                }
            }
        }
    }
    acc.into_iter().filter(|(_, c)| !ring.is_zero(c)).collect()
}

fn substitute<R: CoeffRing>(
    ring: &R,
    value: &[(usize, R::Elem)],
    k: usize,
    expr: &[(usize, R::Elem)],
) -> Vec<(usize, R::Elem)> {
    let mut acc: std::collections::BTreeMap<usize, R::Elem> = std::collections::BTreeMap::new();
    for (s, c) in value {
        if *s == k {
            for (t, v) in expr {
                let cur = acc.entry(*t).or_insert_with(|| ring.zero());
                *cur = ring.add(cur, &ring.mul(c, v));
            }
        } else {
            let cur = acc.entry(*s).or_insert_with(|| ring.zero());
            *cur = ring.add(cur, c);
        }
    }
    acc.into_iter().filter(|(_, c)| !ring.is_zero(c)).collect()
}

impl<R: CoeffRing> ManinSymbolSpace<R> {
    pub fn ring(&self) -> &R {
        &self.ring
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn p1(&self) -> &P1Index {
        &self.p1
    }

    /// Dimension of the full symbol quotient.
    pub fn rank(&self) -> usize {
        self.rank
    }

    /// P^1 indices of the symbols forming the quotient basis.
    pub fn free_symbols(&self) -> &[usize] {
        &self.free_symbols
    }

    /// Coordinates of the class of symbol i.
    pub fn symbol_vector(&self, i: usize) -> &[R::Elem] {
        &self.sym_to_vec[i]
    }

    pub fn cusp_representatives(&self) -> &[Cusp] {
        &self.cusp_reps
    }

    /// Image of a quotient vector under the boundary map.
    pub fn boundary_of(&self, v: &[R::Elem]) -> Vec<R::Elem> {
        let n = self.cusp_reps.len();
        let mut out = vec![self.ring.zero(); n];
        for (j, c) in v.iter().enumerate() {
            if self.ring.is_zero(c) {
                continue;
            }
            for (k, b) in self.boundary[j].iter().enumerate() {
                out[k] = self.ring.add(&out[k], &self.ring.mul(c, b));
            }
        }
        out
    }

    pub fn is_cuspidal(&self, v: &[R::Elem]) -> bool {
        self.boundary_of(v).iter().all(|c| self.ring.is_zero(c))
    }

    /// Basis of the kernel of the boundary map.
    pub fn cuspidal_basis(&self) -> &[Vec<R::Elem>] {
        &self.cuspidal
    }

    pub fn cuspidal_rank(&self) -> usize {
        self.cuspidal.len()
    }

    /// Coordinates of v in the cuspidal basis; None when v is not cuspidal.
    pub fn express_in_cuspidal(&self, v: &[R::Elem]) -> Option<Vec<R::Elem>> {
        self.ring.solve_left(&self.cuspidal, self.rank, v)
    }
}

/// Genus of X_0(N) by the index/elliptic-point/cusp formula.
pub fn genus_x0(n: u64) -> u64 {
    let mu = psi_index(n);
    let nu2 = if n % 4 == 0 {
        0
    } else {
        primes::factorize(n)
            .into_iter()
            .map(|(p, _)| match p {
                2 => 1,
                p => (1 + primes::kronecker(-1, p as i64)) as u64,
            })
            .product()
    };
    let nu3 = if n % 9 == 0 {
        0
    } else {
        primes::factorize(n)
            .into_iter()
            .map(|(p, _)| match p {
                3 => 1,
                p => (1 + primes::kronecker(-3, p as i64)) as u64,
            })
            .product()
    };
    let nu_inf = cusps::cusp_number(n);
    let twelve_g = 12 + mu as i64 - 3 * nu2 as i64 - 4 * nu3 as i64 - 6 * nu_inf as i64;
    assert!(twelve_g >= 0 && twelve_g % 12 == 0, "genus formula at {n}");
    (twelve_g / 12) as u64
}

/// Sturm bound for weight-k level-N forms: ceil(k * index / 12). Only
/// weight 2 is supported.
pub fn sturm_bound(n: u64, k: u32) -> u64 {
    assert_eq!(k, 2, "only weight 2 is supported");
    let mu = psi_index(n);
    mu.div_ceil(6)
}
