//! Hecke operators on the symbol quotient: T_l through Heilbronn matrices,
//! U_q and degeneracy maps through continued-fraction paths between cusps.
//!
//! Every operator is first expressed as a sparse action on basis symbols
//! (tuples of target symbol index and integer multiplicity); dense matrices
//! and direct vector application both derive from that form.

use std::collections::BTreeMap;

use super::cusps::{ext_gcd, gcd_i, lift_to_sl2};
use super::p1::P1Index;
use super::ring::CoeffRing;
use super::space::{ManinSymbolSpace, ModSymError};
use crate::primes;

/// Operator name: T_l at a prime not dividing the level, U_q at a prime
/// divisor of the level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OperatorLabel {
    T(u64),
    U(u64),
}

impl std::fmt::Display for OperatorLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            OperatorLabel::T(l) => write!(f, "T_{l}"),
            OperatorLabel::U(q) => write!(f, "U_{q}"),
        }
    }
}

/// Matrix of an operator on the cuspidal basis.
pub struct HeckeMatrix<R: CoeffRing> {
    label: OperatorLabel,
    rows: Vec<Vec<R::Elem>>,
}

impl<R: CoeffRing> HeckeMatrix<R> {
    pub fn label(&self) -> OperatorLabel {
        self.label
    }

    /// Row i holds the cuspidal coordinates of the image of basis vector i.
    pub fn rows(&self) -> &[Vec<R::Elem>] {
        &self.rows
    }

    /// Image of a vector given in cuspidal coordinates.
    pub fn apply(&self, ring: &R, v: &[R::Elem]) -> Vec<R::Elem> {
        vec_mat(ring, v, &self.rows, self.rows.len())
    }
}

/// The Heilbronn-Merel family for T_l: integer matrices [[a, b], [c, d]] of
/// determinant l with a > b >= 0 and d > c >= 0.
pub fn heilbronn_matrices(ell: u64) -> Vec<[i64; 4]> {
    let l = ell as i64;
    let mut out = Vec::new();
    for a in 1..=l {
        for b in 0..a {
            // c < d forces c (a - b) < l.
            let mut c = 0;
            while c * (a - b) < l {
                let num = l + b * c;
                if num % a == 0 {
                    let d = num / a;
                    if d > c {
                        out.push([a, b, c, d]);
                    }
                }
                c += 1;
            }
        }
    }
    out
}

fn check_label(level: u64, label: OperatorLabel) -> Result<(), ModSymError> {
    let ok = match label {
        OperatorLabel::T(l) => primes::is_prime(l) && level % l != 0,
        OperatorLabel::U(q) => primes::is_prime(q) && level % q == 0,
    };
    if ok {
        Ok(())
    } else {
        Err(ModSymError::MislabeledOperator {
            label: label.to_string(),
            level,
        })
    }
}

/// Per free symbol, the image as (symbol index, multiplicity) terms with
/// repeated indices already combined.
fn operator_sparse_rows<R: CoeffRing>(
    space: &ManinSymbolSpace<R>,
    label: OperatorLabel,
) -> Result<Vec<Vec<(usize, i64)>>, ModSymError> {
    check_label(space.level(), label)?;
    match label {
        OperatorLabel::T(l) => Ok(t_sparse(space, l)),
        OperatorLabel::U(q) => Ok(u_sparse(space, q)),
    }
}

fn combine(terms: Vec<(usize, i64)>) -> Vec<(usize, i64)> {
    let mut map: BTreeMap<usize, i64> = BTreeMap::new();
    for (idx, c) in terms {
        *map.entry(idx).or_insert(0) += c;
    }
    map.into_iter().filter(|&(_, c)| c != 0).collect()
}

fn t_sparse<R: CoeffRing>(space: &ManinSymbolSpace<R>, ell: u64) -> Vec<Vec<(usize, i64)>> {
    let hb = heilbronn_matrices(ell);
    space
        .free_symbols()
        .iter()
        .map(|&f| {
            let terms = hb
                .iter()
                .map(|h| {
                    let idx = space
                        .p1()
                        .act_right(f, h)
                        .expect("determinant prime to the level preserves coprimality");
                    (idx, 1)
                })
                .collect();
            combine(terms)
        })
        .collect()
}

fn u_sparse<R: CoeffRing>(space: &ManinSymbolSpace<R>, q: u64) -> Vec<Vec<(usize, i64)>> {
    let level = space.level();
    space
        .free_symbols()
        .iter()
        .map(|&f| {
            let (c, d) = space.p1().rep(f);
            let [a, b, c1, d1] = lift_to_sl2(c, d, level);
            // The symbol is the path from b/d1 to a/c1; U_q averages the
            // translates (x + j)/q of both endpoints.
            let alpha = Rat::new(b as i128, d1 as i128);
            let beta = Rat::new(a as i128, c1 as i128);
            let mut terms = Vec::new();
            for j in 0..q as i128 {
                let shift = |r: Rat| -> Rat {
                    if r.is_infinity() {
                        r
                    } else {
                        Rat::new(r.n + j * r.d, q as i128 * r.d)
                    }
                };
                sparse_path(space.p1(), shift(alpha), shift(beta), &mut terms);
            }
            combine(terms)
        })
        .collect()
}

fn densify<R: CoeffRing>(space: &ManinSymbolSpace<R>, sparse: &[(usize, i64)]) -> Vec<R::Elem> {
    let ring = space.ring();
    let mut out = vec![ring.zero(); space.rank()];
    for &(idx, c) in sparse {
        let ce = ring.from_i64(c);
        add_scaled(ring, &mut out, &ce, space.symbol_vector(idx));
    }
    out
}

/// Matrix of the operator on the full symbol quotient: row j is the image of
/// the j-th basis symbol.
pub fn ambient_hecke_matrix<R: CoeffRing>(
    space: &ManinSymbolSpace<R>,
    label: OperatorLabel,
) -> Result<Vec<Vec<R::Elem>>, ModSymError> {
    let sparse = operator_sparse_rows(space, label)?;
    Ok(sparse.iter().map(|row| densify(space, row)).collect())
}

/// Images of quotient-coordinate vectors under the operator, without
/// materializing its matrix.
pub fn apply_operator<R: CoeffRing>(
    space: &ManinSymbolSpace<R>,
    label: OperatorLabel,
    vecs: &[Vec<R::Elem>],
) -> Result<Vec<Vec<R::Elem>>, ModSymError> {
    let sparse = operator_sparse_rows(space, label)?;
    let ring = space.ring();
    let mut out = Vec::with_capacity(vecs.len());
    for v in vecs {
        // Collect the image over symbol indices first, then expand each
        // index through the quotient once.
        let mut bucket = vec![ring.zero(); space.p1().len()];
        for (j, row) in sparse.iter().enumerate() {
            if ring.is_zero(&v[j]) {
                continue;
            }
            for &(idx, c) in row {
                let term = ring.mul(&v[j], &ring.from_i64(c));
                bucket[idx] = ring.add(&bucket[idx], &term);
            }
        }
        let mut img = vec![ring.zero(); space.rank()];
        for (idx, c) in bucket.iter().enumerate() {
            if !ring.is_zero(c) {
                add_scaled(ring, &mut img, c, space.symbol_vector(idx));
            }
        }
        out.push(img);
    }
    Ok(out)
}

/// Matrix of the operator on the cuspidal basis.
pub fn hecke_operator<R: CoeffRing>(
    space: &ManinSymbolSpace<R>,
    label: OperatorLabel,
) -> Result<HeckeMatrix<R>, ModSymError> {
    let ambient = ambient_hecke_matrix(space, label)?;
    let ring = space.ring().clone();
    let rows = space
        .cuspidal_basis()
        .iter()
        .map(|k| {
            let image = vec_mat(&ring, k, &ambient, space.rank());
            space
                .express_in_cuspidal(&image)
                .expect("Hecke operators preserve the cuspidal subspace")
        })
        .collect();
    Ok(HeckeMatrix { label, rows })
}

/// A point of P^1(Q) as a reduced fraction; denominator 0 encodes infinity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Rat {
    n: i128,
    d: i128,
}

impl Rat {
    fn new(n: i128, d: i128) -> Self {
        assert!(n != 0 || d != 0);
        if d == 0 {
            return Rat { n: 1, d: 0 };
        }
        let g = gcd_i128(n, d);
        let (mut n, mut d) = (n / g, d / g);
        if d < 0 {
            n = -n;
            d = -d;
        }
        Rat { n, d }
    }

    fn is_infinity(&self) -> bool {
        self.d == 0
    }
}

fn gcd_i128(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.max(1)
}

/// Push sign * {oo, r} as symbol terms, expanding the path along continued
/// fraction convergents: {oo, r} = sum_k (q_k : (-1)^{k+1} q_{k-1}).
fn sparse_infty_path(p1: &P1Index, r: Rat, sign: i64, out: &mut Vec<(usize, i64)>) {
    if r.is_infinity() {
        return;
    }
    let level = p1.level() as i128;
    let (mut num, mut den) = (r.n, r.d);
    let (mut q_km2, mut q_km1) = (1i128, 0i128);
    let mut k = 0usize;
    while den != 0 {
        let a = num.div_euclid(den);
        let q_k = a * q_km1 + q_km2;
        let s = if k % 2 == 0 { -1i128 } else { 1i128 };
        let c = q_k.rem_euclid(level) as i64;
        let d = (s * q_km1).rem_euclid(level) as i64;
        let idx = p1
            .index_of(c, d)
            .expect("consecutive convergent denominators are coprime");
        out.push((idx, sign));
        let rem = num - a * den;
        num = den;
        den = rem;
        q_km2 = q_km1;
        q_km1 = q_k;
        k += 1;
    }
}

/// Push the class of the path {from, to} as symbol terms.
fn sparse_path(p1: &P1Index, from: Rat, to: Rat, out: &mut Vec<(usize, i64)>) {
    sparse_infty_path(p1, to, 1, out);
    sparse_infty_path(p1, from, -1, out);
}

/// Images at level N of the cuspidal basis of a level-M space under the
/// degeneracy map with parameter d, in ambient level-N coordinates.
pub struct DegeneracyMap<R: CoeffRing> {
    d: u64,
    images: Vec<Vec<R::Elem>>,
}

impl<R: CoeffRing> DegeneracyMap<R> {
    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn images(&self) -> &[Vec<R::Elem>] {
        &self.images
    }

    /// The map as a matrix into the target cuspidal basis; None if an image
    /// fails to be cuspidal.
    pub fn cuspidal_matrix(&self, to: &ManinSymbolSpace<R>) -> Option<Vec<Vec<R::Elem>>> {
        self.images
            .iter()
            .map(|v| to.express_in_cuspidal(v))
            .collect()
    }
}

/// Degeneracy map between cuspidal spaces of levels M | N for d in
/// {1, N/M}; the twisted variant requires the level ratio to be a prime not
/// dividing M.
pub fn degeneracy_map<R: CoeffRing>(
    from: &ManinSymbolSpace<R>,
    to: &ManinSymbolSpace<R>,
    d: u64,
) -> Result<DegeneracyMap<R>, ModSymError> {
    let (m, n) = (from.level(), to.level());
    if n % m != 0 || d == 0 || (n / m) % d != 0 {
        return Err(ModSymError::BadDegeneracy { from: m, to: n, d });
    }
    let ratio = n / m;
    let sym_rows = if d == 1 {
        transfer_rows(from, to)
    } else if d == ratio && primes::is_prime(ratio) && m % ratio != 0 {
        twisted_rows(from, to, ratio)
    } else {
        return Err(ModSymError::UnsupportedLevelRatio { from: m, to: n });
    };
    let ring = from.ring().clone();
    let images = from
        .cuspidal_basis()
        .iter()
        .map(|k| vec_mat(&ring, k, &sym_rows, to.rank()))
        .collect();
    Ok(DegeneracyMap { d, images })
}

/// Transfer along the covering X_0(N) -> X_0(M): each basis symbol lifts to
/// the sheets indexed by cosets of Gamma_0(N) in Gamma_0(M).
fn transfer_rows<R: CoeffRing>(
    from: &ManinSymbolSpace<R>,
    to: &ManinSymbolSpace<R>,
) -> Vec<Vec<R::Elem>> {
    let (m, n) = (from.level(), to.level());
    // Cosets correspond to the fiber of P^1(N) -> P^1(M) over (0 : 1).
    let gammas: Vec<[i64; 4]> = (0..to.p1().len())
        .filter(|&i| to.p1().rep(i).0 % m == 0)
        .map(|i| {
            let (c, d) = to.p1().rep(i);
            lift_to_sl2(c, d, n)
        })
        .collect();
    let expected = (super::p1::psi_index(n) / super::p1::psi_index(m)) as usize;
    assert_eq!(gammas.len(), expected);
    let mut rows = Vec::with_capacity(from.rank());
    for &f in from.free_symbols() {
        let (c, d) = from.p1().rep(f);
        let g = lift_to_sl2(c, d, m);
        let terms = gammas
            .iter()
            .map(|gamma| {
                let prod = mat_mul_i64(gamma, &g);
                let cc = prod[2].rem_euclid(n as i128) as i64;
                let dd = prod[3].rem_euclid(n as i128) as i64;
                let idx = to
                    .p1()
                    .index_of(cc, dd)
                    .expect("bottom rows of SL2 matrices are coprime");
                (idx, 1)
            })
            .collect();
        rows.push(densify(to, &combine(terms)));
    }
    rows
}

/// Twisted transfer through z -> qz: lifts of each basis path under the
/// second projection X_0(N) -> X_0(M), expanded along cusp-to-cusp paths.
fn twisted_rows<R: CoeffRing>(
    from: &ManinSymbolSpace<R>,
    to: &ManinSymbolSpace<R>,
    q: u64,
) -> Vec<Vec<R::Elem>> {
    let m = from.level();
    let p1q = P1Index::new(q);
    // Coset representatives of the twisted subgroup, one per top row class
    // (a : b) in P^1(q): delta = [[a0, b0], [m c, e]] with (a0, b0) a
    // coprime lift and gcd(a0, m) = 1.
    let mut deltas: Vec<[i64; 4]> = Vec::with_capacity(p1q.len());
    for i in 0..p1q.len() {
        let (a, b) = p1q.rep(i);
        let (a0, b0): (i64, i64) = if b == 0 {
            (1, 0)
        } else if a == 0 {
            (q as i64, 1)
        } else {
            let b0 = b as i64;
            let mut a0 = a as i64;
            while gcd_i(a0, b0) != 1 || gcd_i(a0, m as i64) != 1 {
                a0 += q as i64;
            }
            (a0, b0)
        };
        let (g, x, y) = ext_gcd(a0, m as i64 * b0);
        assert_eq!(g, 1);
        // a0 x + m b0 y = 1, so [[a0, b0], [-m y, x]] has determinant 1.
        deltas.push([a0, b0, -(m as i64) * y, x]);
    }
    assert_eq!(deltas.len() as u64, q + 1);

    let mut rows = Vec::with_capacity(from.rank());
    for &f in from.free_symbols() {
        let (c, d) = from.p1().rep(f);
        let g = lift_to_sl2(c, d, m);
        let mut terms = Vec::new();
        for delta in &deltas {
            let h = mat_mul_i64(delta, &g);
            // The lifted path joins x/(q z) to w/(q y) for h = [[w, x],
            // [y, z]].
            let start = Rat::new(h[1], q as i128 * h[3]);
            let end = Rat::new(h[0], q as i128 * h[2]);
            sparse_path(to.p1(), start, end, &mut terms);
        }
        rows.push(densify(to, &combine(terms)));
    }
    rows
}

fn mat_mul_i64(a: &[i64; 4], b: &[i64; 4]) -> [i128; 4] {
    let a = a.map(|v| v as i128);
    let b = b.map(|v| v as i128);
    [
        a[0] * b[0] + a[1] * b[2],
        a[0] * b[1] + a[1] * b[3],
        a[2] * b[0] + a[3] * b[2],
        a[2] * b[1] + a[3] * b[3],
    ]
}

pub(crate) fn add_scaled<R: CoeffRing>(
    ring: &R,
    acc: &mut [R::Elem],
    c: &R::Elem,
    v: &[R::Elem],
) {
    for (a, x) in acc.iter_mut().zip(v) {
        *a = ring.add(a, &ring.mul(c, x));
    }
}

/// v * rows, for rows of length `width`.
pub fn vec_mat<R: CoeffRing>(
    ring: &R,
    v: &[R::Elem],
    rows: &[Vec<R::Elem>],
    width: usize,
) -> Vec<R::Elem> {
    let mut out = vec![ring.zero(); width];
    for (c, row) in v.iter().zip(rows) {
        if ring.is_zero(c) {
            continue;
        }
        add_scaled(ring, &mut out, c, row);
    }
    out
}

/// Product of row matrices: (a b) applies a then reads images through b.
pub fn mat_mul<R: CoeffRing>(
    ring: &R,
    a: &[Vec<R::Elem>],
    b: &[Vec<R::Elem>],
    width: usize,
) -> Vec<Vec<R::Elem>> {
    a.iter().map(|row| vec_mat(ring, row, b, width)).collect()
}
