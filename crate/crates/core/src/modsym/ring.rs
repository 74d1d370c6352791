//! Coefficient rings for the symbol quotient: exact rationals and Z/p^n,
//! each with the linear algebra the quotient construction needs.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::arith::{self, PrimePowerModulus, ResidueInt};

/// Ring context threaded through the symbol computations. Elements carry no
/// modulus of their own in the rational case, so all operations go through
/// the context.
pub trait CoeffRing: Clone {
    type Elem: Clone + PartialEq + std::fmt::Debug;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_i64(&self, v: i64) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    /// Multiplicative inverse, None for non-units.
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;

    /// Basis of the left kernel { v : v M = 0 } of the matrix with the given
    /// rows, each of length `width`.
    fn left_kernel(&self, rows: &[Vec<Self::Elem>], width: usize) -> Vec<Vec<Self::Elem>>;

    /// Coefficients x with x M = target, when target lies in the row span.
    fn solve_left(
        &self,
        rows: &[Vec<Self::Elem>],
        width: usize,
        target: &[Self::Elem],
    ) -> Option<Vec<Self::Elem>>;
}

/// Exact rational coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RationalField;

impl RationalField {
    /// Rank of the row span.
    pub fn rank(&self, rows: &[Vec<BigRational>], width: usize) -> usize {
        let mut mat: Vec<Vec<BigRational>> = rows.to_vec();
        let mut rank = 0;
        for col in 0..width {
            let Some(pivot) = (rank..mat.len()).find(|&i| !mat[i][col].is_zero()) else {
                continue;
            };
            mat.swap(rank, pivot);
            let inv = mat[rank][col].recip();
            for j in col..width {
                let v = &mat[rank][j] * &inv;
                mat[rank][j] = v;
            }
            for i in 0..mat.len() {
                if i != rank && !mat[i][col].is_zero() {
                    let f = mat[i][col].clone();
                    for j in col..width {
                        let v = &mat[i][j] - &f * &mat[rank][j];
                        mat[i][j] = v;
                    }
                }
            }
            rank += 1;
        }
        rank
    }
}

/// Reduced row echelon form; returns (matrix, pivot columns).
fn rref(mut mat: Vec<Vec<BigRational>>, width: usize) -> (Vec<Vec<BigRational>>, Vec<usize>) {
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..width {
        let Some(pivot) = (r..mat.len()).find(|&i| !mat[i][col].is_zero()) else {
            continue;
        };
        mat.swap(r, pivot);
        let inv = mat[r][col].recip();
        for j in col..width {
            let v = &mat[r][j] * &inv;
            mat[r][j] = v;
        }
        for i in 0..mat.len() {
            if i != r && !mat[i][col].is_zero() {
                let f = mat[i][col].clone();
                for j in col..width {
                    let v = &mat[i][j] - &f * &mat[r][j];
                    mat[i][j] = v;
                }
            }
        }
        pivots.push(col);
        r += 1;
        if r == mat.len() {
            break;
        }
    }
    mat.truncate(r);
    (mat, pivots)
}

impl CoeffRing for RationalField {
    type Elem = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn from_i64(&self, v: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(v))
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn inv(&self, a: &BigRational) -> Option<BigRational> {
        if a.is_zero() {
            None
        } else {
            Some(a.recip())
        }
    }

    fn left_kernel(&self, rows: &[Vec<BigRational>], width: usize) -> Vec<Vec<BigRational>> {
        // v M = 0 iff M^T v^T = 0: reduce the transpose and read off one
        // kernel vector per free column.
        let n = rows.len();
        let transpose: Vec<Vec<BigRational>> = (0..width)
            .map(|j| rows.iter().map(|row| row[j].clone()).collect())
            .collect();
        let (rr, pivots) = rref(transpose, n);
        let mut basis = Vec::new();
        for free in 0..n {
            if pivots.contains(&free) {
                continue;
            }
            let mut v = vec![BigRational::zero(); n];
            v[free] = BigRational::one();
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = -rr[i][free].clone();
            }
            basis.push(v);
        }
        basis
    }

    fn solve_left(
        &self,
        rows: &[Vec<BigRational>],
        width: usize,
        target: &[BigRational],
    ) -> Option<Vec<BigRational>> {
        let n = rows.len();
        let mut aug: Vec<Vec<BigRational>> = (0..width)
            .map(|j| {
                let mut row: Vec<BigRational> = rows.iter().map(|r| r[j].clone()).collect();
                row.push(target[j].clone());
                row
            })
            .collect();
        let mut pivots = Vec::new();
        let mut r = 0;
        for col in 0..n {
            let Some(pivot) = (r..aug.len()).find(|&i| !aug[i][col].is_zero()) else {
                continue;
            };
            aug.swap(r, pivot);
            let inv = aug[r][col].recip();
            for j in col..=n {
                let v = &aug[r][j] * &inv;
                aug[r][j] = v;
            }
            for i in 0..aug.len() {
                if i != r && !aug[i][col].is_zero() {
                    let f = aug[i][col].clone();
                    for j in col..=n {
                        let v = &aug[i][j] - &f * &aug[r][j];
                        aug[i][j] = v;
                    }
                }
            }
            pivots.push(col);
            r += 1;
        }
        // Rows reduced to (0 ... 0 | nonzero) witness inconsistency.
        for row in &aug[r.min(aug.len())..] {
            if !row[n].is_zero() {
                return None;
            }
        }
        let mut x = vec![BigRational::zero(); n];
        for (i, &pc) in pivots.iter().enumerate() {
            x[pc] = aug[i][n].clone();
        }
        Some(x)
    }
}

impl RationalField {
    /// The value as a BigInt when the rational is an integer.
    pub fn to_integer(&self, a: &BigRational) -> Option<BigInt> {
        a.is_integer().then(|| a.to_integer())
    }
}

/// Coefficients in Z/p^n; linear algebra goes through Howell forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ZpnRing {
    modulus: PrimePowerModulus,
}

impl ZpnRing {
    pub fn new(modulus: PrimePowerModulus) -> Self {
        Self { modulus }
    }

    pub fn modulus(&self) -> PrimePowerModulus {
        self.modulus
    }

    pub fn raw(&self, a: &ResidueInt) -> u128 {
        a.value()
    }

    pub fn raw_rows(&self, rows: &[Vec<ResidueInt>]) -> Vec<Vec<u128>> {
        rows.iter()
            .map(|row| row.iter().map(|e| e.value()).collect())
            .collect()
    }

    pub fn wrap_rows(&self, rows: Vec<Vec<u128>>) -> Vec<Vec<ResidueInt>> {
        rows.into_iter()
            .map(|row| {
                row.into_iter()
                    .map(|v| self.modulus.residue(v as i128))
                    .collect()
            })
            .collect()
    }
}

impl CoeffRing for ZpnRing {
    type Elem = ResidueInt;

    fn zero(&self) -> ResidueInt {
        self.modulus.residue(0)
    }
    fn one(&self) -> ResidueInt {
        self.modulus.residue(1)
    }
    fn from_i64(&self, v: i64) -> ResidueInt {
        self.modulus.residue(v as i128)
    }
    fn add(&self, a: &ResidueInt, b: &ResidueInt) -> ResidueInt {
        *a + *b
    }
    fn sub(&self, a: &ResidueInt, b: &ResidueInt) -> ResidueInt {
        *a - *b
    }
    fn neg(&self, a: &ResidueInt) -> ResidueInt {
        -*a
    }
    fn mul(&self, a: &ResidueInt, b: &ResidueInt) -> ResidueInt {
        *a * *b
    }
    fn is_zero(&self, a: &ResidueInt) -> bool {
        a.is_zero()
    }
    fn inv(&self, a: &ResidueInt) -> Option<ResidueInt> {
        a.inv().ok()
    }

    fn left_kernel(&self, rows: &[Vec<ResidueInt>], width: usize) -> Vec<Vec<ResidueInt>> {
        let raw = self.raw_rows(rows);
        let transpose: Vec<Vec<u128>> = (0..width)
            .map(|j| raw.iter().map(|row| row[j]).collect())
            .collect();
        self.wrap_rows(arith::right_kernel_raw(&self.modulus, &transpose, rows.len()))
    }

    fn solve_left(
        &self,
        rows: &[Vec<ResidueInt>],
        width: usize,
        target: &[ResidueInt],
    ) -> Option<Vec<ResidueInt>> {
        let raw = self.raw_rows(rows);
        let t: Vec<u128> = target.iter().map(|e| e.value()).collect();
        arith::solve_in_span(&self.modulus, &raw, width, &t)
            .map(|combo| self.wrap_rows(vec![combo]).pop().unwrap())
    }
}
