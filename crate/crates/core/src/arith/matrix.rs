use std::fmt;

use super::residue::{ArithError, PrimePowerModulus, ResidueInt};

/// Dense row-major matrix with entries in a single Z/p^n.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidueMatrix {
    modulus: PrimePowerModulus,
    rows: usize,
    cols: usize,
    entries: Vec<u128>,
}

impl ResidueMatrix {
    pub fn zero(modulus: PrimePowerModulus, rows: usize, cols: usize) -> Self {
        Self {
            modulus,
            rows,
            cols,
            entries: vec![0; rows * cols],
        }
    }

    pub fn identity(modulus: PrimePowerModulus, dim: usize) -> Self {
        let mut m = Self::zero(modulus, dim, dim);
        for i in 0..dim {
            m.entries[i * dim + i] = 1 % modulus.modulus();
        }
        m
    }

    /// Builds a matrix from signed entries in row-major order.
    pub fn from_signed(
        modulus: PrimePowerModulus,
        rows: usize,
        cols: usize,
        entries: &[i128],
    ) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count mismatch");
        Self {
            modulus,
            rows,
            cols,
            entries: entries.iter().map(|&v| modulus.reduce_signed(v)).collect(),
        }
    }

    pub fn modulus(&self) -> PrimePowerModulus {
        self.modulus
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> ResidueInt {
        self.modulus.residue(self.raw(i, j) as i128)
    }

    pub fn set(&mut self, i: usize, j: usize, value: ResidueInt) {
        assert_eq!(value.modulus(), self.modulus, "mixed moduli");
        self.entries[i * self.cols + j] = value.value();
    }

    pub(crate) fn raw(&self, i: usize, j: usize) -> u128 {
        assert!(i < self.rows && j < self.cols, "index out of range");
        self.entries[i * self.cols + j]
    }

    pub(crate) fn raw_rows(&self) -> Vec<Vec<u128>> {
        (0..self.rows)
            .map(|i| self.entries[i * self.cols..(i + 1) * self.cols].to_vec())
            .collect()
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zero(self.modulus, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.entries[j * self.rows + i] = self.raw(i, j);
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.modulus, other.modulus, "mixed moduli");
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(&a, &b)| self.modulus.add_raw(a, b))
            .collect();
        Self {
            modulus: self.modulus,
            rows: self.rows,
            cols: self.cols,
            entries,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.modulus, other.modulus, "mixed moduli");
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(&a, &b)| self.modulus.sub_raw(a, b))
            .collect();
        Self {
            modulus: self.modulus,
            rows: self.rows,
            cols: self.cols,
            entries,
        }
    }

    pub fn scale(&self, c: ResidueInt) -> Self {
        assert_eq!(c.modulus(), self.modulus, "mixed moduli");
        let entries = self
            .entries
            .iter()
            .map(|&a| self.modulus.mul_raw(a, c.value()))
            .collect();
        Self {
            modulus: self.modulus,
            rows: self.rows,
            cols: self.cols,
            entries,
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.modulus, other.modulus, "mixed moduli");
        assert_eq!(self.cols, other.rows, "shape mismatch");
        let mut out = Self::zero(self.modulus, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.raw(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let idx = i * other.cols + j;
                    out.entries[idx] = self
                        .modulus
                        .add_raw(out.entries[idx], self.modulus.mul_raw(a, other.raw(k, j)));
                }
            }
        }
        out
    }

    pub fn pow(&self, mut exp: u128) -> Self {
        assert_eq!(self.rows, self.cols, "pow needs a square matrix");
        let mut base = self.clone();
        let mut acc = Self::identity(self.modulus, self.rows);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            exp >>= 1;
        }
        acc
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&v| v == 0)
    }

    pub fn trace(&self) -> ResidueInt {
        assert_eq!(self.rows, self.cols, "trace needs a square matrix");
        let mut t = self.modulus.residue(0);
        for i in 0..self.rows {
            t = t + self.get(i, i);
        }
        t
    }

    /// Determinant of a 2x2 matrix.
    pub fn det2(&self) -> ResidueInt {
        assert_eq!((self.rows, self.cols), (2, 2), "det2 needs a 2x2 matrix");
        self.get(0, 0) * self.get(1, 1) - self.get(0, 1) * self.get(1, 0)
    }

    /// Inverse of a 2x2 matrix with unit determinant.
    pub fn inv2(&self) -> Result<Self, ArithError> {
        let dinv = self.det2().inv()?;
        let adjugate = [
            self.get(1, 1),
            -self.get(0, 1),
            -self.get(1, 0),
            self.get(0, 0),
        ];
        let mut out = Self::zero(self.modulus, 2, 2);
        for (idx, v) in adjugate.into_iter().enumerate() {
            out.entries[idx] = (v * dinv).value();
        }
        Ok(out)
    }
}

impl fmt::Display for ResidueMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.raw(i, j).to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
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

    fn random_matrix(rng: &mut ChaCha8Rng, m: PrimePowerModulus, r: usize, c: usize) -> ResidueMatrix {
        let entries: Vec<i128> = (0..r * c).map(|_| rng.gen_range(0..m.modulus() as i128)).collect();
        ResidueMatrix::from_signed(m, r, c, &entries)
    }

    #[test]
    fn identity_is_neutral() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let m = zmod(5, 2);
        let a = random_matrix(&mut rng, m, 3, 3);
        let id = ResidueMatrix::identity(m, 3);
        assert_eq!(a.mul(&id), a);
        assert_eq!(id.mul(&a), a);
    }

    #[test]
    fn multiplication_is_associative() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let m = zmod(7, 3);
        for _ in 0..20 {
            let a = random_matrix(&mut rng, m, 2, 3);
            let b = random_matrix(&mut rng, m, 3, 4);
            let c = random_matrix(&mut rng, m, 4, 2);
            assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        }
    }

    #[test]
    fn transpose_involution_and_product_rule() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let m = zmod(5, 3);
        let a = random_matrix(&mut rng, m, 3, 5);
        let b = random_matrix(&mut rng, m, 5, 2);
        assert_eq!(a.transpose().transpose(), a);
        assert_eq!(a.mul(&b).transpose(), b.transpose().mul(&a.transpose()));
    }

    #[test]
    fn det2_is_multiplicative() {
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        let m = zmod(5, 2);
        for _ in 0..50 {
            let a = random_matrix(&mut rng, m, 2, 2);
            let b = random_matrix(&mut rng, m, 2, 2);
            assert_eq!(a.mul(&b).det2(), a.det2() * b.det2());
        }
    }

    #[test]
    fn inv2_round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(25);
        let m = zmod(5, 2);
        let id = ResidueMatrix::identity(m, 2);
        let mut seen_units = 0;
        while seen_units < 40 {
            let a = random_matrix(&mut rng, m, 2, 2);
            if !a.det2().is_unit() {
                continue;
            }
            seen_units += 1;
            let ainv = a.inv2().unwrap();
            assert_eq!(a.mul(&ainv), id);
            assert_eq!(ainv.mul(&a), id);
        }
    }

    #[test]
    fn pow_matches_repeated_multiplication() {
        let mut rng = ChaCha8Rng::seed_from_u64(26);
        let m = zmod(5, 2);
        let a = random_matrix(&mut rng, m, 2, 2);
        let mut acc = ResidueMatrix::identity(m, 2);
        for e in 0..8u128 {
            assert_eq!(a.pow(e), acc);
            acc = acc.mul(&a);
        }
    }
}
