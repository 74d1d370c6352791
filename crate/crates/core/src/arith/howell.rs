use std::collections::BTreeMap;

use super::matrix::ResidueMatrix;
use super::residue::{PrimePowerModulus, ResidueInt};

/// Canonical Howell basis of the row span of `rows` over Z/p^n.
///
/// The output is in echelon form with pivot entries p^v, entries above a
/// pivot reduced below it, and the span closed under truncation of leading
/// coordinates. These conditions pin the basis down uniquely, so two inputs
/// with the same row span produce identical output.
pub(crate) fn howell_form(
    m: &PrimePowerModulus,
    rows: Vec<Vec<u128>>,
    width: usize,
) -> Vec<Vec<u128>> {
    howell_form_pivoting(m, rows, width, width)
}

/// Howell reduction that only pivots on the first `split` columns; trailing
/// columns ride along as bookkeeping. Rows that vanish on the pivot block
/// are dropped, so with `split < width` the output is not canonical in the
/// trailing block.
pub(crate) fn howell_form_pivoting(
    m: &PrimePowerModulus,
    rows: Vec<Vec<u128>>,
    width: usize,
    split: usize,
) -> Vec<Vec<u128>> {
    let p = m.p() as u128;
    let mut work: BTreeMap<usize, Vec<Vec<u128>>> = BTreeMap::new();
    let insert = |work: &mut BTreeMap<usize, Vec<Vec<u128>>>, row: Vec<u128>, from: usize| {
        debug_assert_eq!(row.len(), width);
        if let Some(j) = (from..split).find(|&j| row[j] != 0) {
            work.entry(j).or_default().push(row);
        }
    };
    for row in rows {
        insert(&mut work, row, 0);
    }

    let mut result: Vec<(usize, u32, Vec<u128>)> = Vec::new();
    while let Some((&col, _)) = work.iter().next() {
        let mut group = work.remove(&col).unwrap();
        let best = (0..group.len())
            .min_by_key(|&i| (m.valuation_raw(group[i][col]), i))
            .unwrap();
        let mut pivot = group.swap_remove(best);
        let v = m.valuation_raw(pivot[col]);
        let pv = p.pow(v);
        let unit_inv = m.inv_raw(pivot[col] / pv).expect("unit part is invertible");
        if unit_inv != 1 {
            for x in pivot.iter_mut().skip(col) {
                *x = m.mul_raw(*x, unit_inv);
            }
        }
        debug_assert_eq!(pivot[col], pv);
        for mut row in group {
            let q = row[col] / pv;
            for k in col..width {
                row[k] = m.sub_raw(row[k], m.mul_raw(q, pivot[k]));
            }
            debug_assert_eq!(row[col], 0);
            insert(&mut work, row, col + 1);
        }
        if v > 0 {
            let ann_mult = p.pow(m.n() - v);
            let ann: Vec<u128> = pivot.iter().map(|&x| m.mul_raw(x, ann_mult)).collect();
            insert(&mut work, ann, col + 1);
        }
        result.push((col, v, pivot));
    }

    // Reduce every entry above a pivot into [0, p^v). Rows are echelon, so
    // later passes cannot disturb columns already handled.
    for i in 0..result.len() {
        let (col_i, v_i) = (result[i].0, result[i].1);
        let pv = p.pow(v_i);
        let pivot_row = result[i].2.clone();
        for (_, _, row) in result.iter_mut().take(i) {
            let q = row[col_i] / pv;
            if q != 0 {
                for k in col_i..width {
                    row[k] = m.sub_raw(row[k], m.mul_raw(q, pivot_row[k]));
                }
            }
        }
    }
    result.into_iter().map(|(_, _, row)| row).collect()
}

/// Canonical generators of the right kernel {v : mat v = 0} of an
/// r x cols matrix given as raw rows.
pub(crate) fn right_kernel_raw(
    m: &PrimePowerModulus,
    mat: &[Vec<u128>],
    cols: usize,
) -> Vec<Vec<u128>> {
    let r = mat.len();
    let width = r + cols;
    let mut rows = Vec::with_capacity(cols);
    for j in 0..cols {
        let mut row = vec![0u128; width];
        for (i, mat_row) in mat.iter().enumerate() {
            row[i] = mat_row[j];
        }
        row[r + j] = 1;
        rows.push(row);
    }
    howell_form(m, rows, width)
        .into_iter()
        .filter(|row| row[..r].iter().all(|&x| x == 0))
        .map(|row| row[r..].to_vec())
        .collect()
}

/// log_p of the cardinality of the row span, given its Howell basis.
pub(crate) fn span_logp(m: &PrimePowerModulus, howell_rows: &[Vec<u128>]) -> u64 {
    howell_rows
        .iter()
        .map(|row| {
            let j = row
                .iter()
                .position(|&x| x != 0)
                .expect("howell basis rows are nonzero");
            (m.n() - m.valuation_raw(row[j])) as u64
        })
        .sum()
}

/// Canonical Howell basis of the intersection of two row spans.
pub(crate) fn intersect_spans(
    m: &PrimePowerModulus,
    a: &[Vec<u128>],
    b: &[Vec<u128>],
    cols: usize,
) -> Vec<Vec<u128>> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    // Pairs (x, y) with x a + y (-b) = 0 form the left kernel of the stack;
    // the intersection is the image of such x under a.
    let stacked: Vec<Vec<u128>> = a
        .iter()
        .cloned()
        .chain(b.iter().map(|row| row.iter().map(|&x| m.neg_raw(x)).collect()))
        .collect();
    let transpose: Vec<Vec<u128>> = (0..cols)
        .map(|j| stacked.iter().map(|row| row[j]).collect())
        .collect();
    let pair_kernel = right_kernel_raw(m, &transpose, stacked.len());
    let elems: Vec<Vec<u128>> = pair_kernel
        .iter()
        .map(|xy| {
            let mut w = vec![0u128; cols];
            for (i, &c) in xy[..a.len()].iter().enumerate() {
                if c != 0 {
                    for k in 0..cols {
                        w[k] = m.add_raw(w[k], m.mul_raw(c, a[i][k]));
                    }
                }
            }
            w
        })
        .collect();
    howell_form(m, elems, cols)
}

/// Coefficients x with x rows = target, when target lies in the row span.
pub(crate) fn solve_in_span(
    m: &PrimePowerModulus,
    rows: &[Vec<u128>],
    cols: usize,
    target: &[u128],
) -> Option<Vec<u128>> {
    let p = m.p() as u128;
    let r = rows.len();
    let width = cols + r;
    let aug: Vec<Vec<u128>> = rows
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut a = vec![0u128; width];
            a[..cols].copy_from_slice(row);
            a[cols + i] = 1;
            a
        })
        .collect();
    let hf = howell_form_pivoting(m, aug, width, cols);
    let mut residual = target.to_vec();
    let mut combo = vec![0u128; r];
    for row in &hf {
        let col = row[..cols].iter().position(|&x| x != 0).unwrap();
        if residual[col] == 0 {
            continue;
        }
        let pv = p.pow(m.valuation_raw(row[col]));
        if residual[col] % pv != 0 {
            return None;
        }
        let q = residual[col] / pv;
        for k in 0..cols {
            residual[k] = m.sub_raw(residual[k], m.mul_raw(q, row[k]));
        }
        for k in 0..r {
            combo[k] = m.add_raw(combo[k], m.mul_raw(q, row[cols + k]));
        }
    }
    if residual.iter().all(|&x| x == 0) {
        Some(combo)
    } else {
        None
    }
}

/// Canonical generating set for the right kernel {v : mat v = 0}.
pub fn howell_kernel(mat: &ResidueMatrix) -> Vec<Vec<ResidueInt>> {
    let m = mat.modulus();
    right_kernel_raw(&m, &mat.raw_rows(), mat.cols())
        .into_iter()
        .map(|row| row.into_iter().map(|x| ResidueInt::from_raw(m, x)).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn zmod(p: u64, n: u32) -> PrimePowerModulus {
        PrimePowerModulus::new(p, n).unwrap()
    }

    fn mat_vec(m: &PrimePowerModulus, mat: &[Vec<u128>], v: &[u128]) -> Vec<u128> {
        mat.iter()
            .map(|row| {
                row.iter()
                    .zip(v)
                    .fold(0u128, |acc, (&a, &x)| m.add_raw(acc, m.mul_raw(a, x)))
            })
            .collect()
    }

    fn random_rows(
        rng: &mut ChaCha8Rng,
        m: &PrimePowerModulus,
        r: usize,
        c: usize,
    ) -> Vec<Vec<u128>> {
        (0..r)
            .map(|_| (0..c).map(|_| rng.gen_range(0..m.modulus())).collect())
            .collect()
    }

    #[test]
    fn kernel_of_identity_is_empty() {
        let m = zmod(5, 2);
        let id = ResidueMatrix::identity(m, 2);
        assert!(howell_kernel(&id).is_empty());
    }

    #[test]
    fn kernel_of_five_mod_25() {
        let m = zmod(5, 2);
        let mat = ResidueMatrix::from_signed(m, 1, 1, &[5]);
        let kernel = howell_kernel(&mat);
        assert_eq!(kernel.len(), 1);
        assert_eq!(kernel[0][0].value(), 5);
    }

    #[test]
    fn kernel_of_shifted_companion_matrix() {
        // M - 12I for M the companion matrix of x^2 + 14x + 113 mod 25.
        let m = zmod(5, 2);
        let mat = ResidueMatrix::from_signed(m, 2, 2, &[-12, -113, 1, -26]);
        let kernel = howell_kernel(&mat);
        assert_eq!(kernel.len(), 1);
        assert_eq!(kernel[0][0].value(), 1);
        assert_eq!(kernel[0][1].value(), 1);
    }

    #[test]
    fn kernel_generators_annihilate() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for (p, n) in [(5u64, 2u32), (7, 3)] {
            let m = zmod(p, n);
            for _ in 0..40 {
                let (r, c) = (rng.gen_range(1..4), rng.gen_range(1..5));
                let rows = random_rows(&mut rng, &m, r, c);
                let cols = rows[0].len();
                for gen in right_kernel_raw(&m, &rows, cols) {
                    assert!(mat_vec(&m, &rows, &gen).iter().all(|&x| x == 0));
                }
            }
        }
    }

    #[test]
    fn kernel_output_is_howell_stable() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        let m = zmod(5, 3);
        for _ in 0..40 {
            let rows = random_rows(&mut rng, &m, 3, 4);
            let kernel = right_kernel_raw(&m, &rows, 4);
            assert_eq!(howell_form(&m, kernel.clone(), 4), kernel);
        }
    }

    #[test]
    fn unit_determinant_matrices_have_empty_kernel() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        let m = zmod(5, 2);
        for _ in 0..40 {
            // Unit lower triangular times unit upper triangular is invertible.
            let dim = 3;
            let mut lower = vec![vec![0u128; dim]; dim];
            let mut upper = vec![vec![0u128; dim]; dim];
            for i in 0..dim {
                lower[i][i] = 1;
                upper[i][i] = 1 + 5 * rng.gen_range(0..5u128);
                for j in 0..i {
                    lower[i][j] = rng.gen_range(0..25);
                    upper[j][i] = rng.gen_range(0..25);
                }
            }
            let mut product = vec![vec![0u128; dim]; dim];
            for i in 0..dim {
                for j in 0..dim {
                    for (k, upper_row) in upper.iter().enumerate() {
                        product[i][j] =
                            m.add_raw(product[i][j], m.mul_raw(lower[i][k], upper_row[j]));
                    }
                }
            }
            assert!(right_kernel_raw(&m, &product, dim).is_empty());
        }
    }

    #[test]
    fn howell_form_is_canonical_under_span_preserving_changes() {
        let mut rng = ChaCha8Rng::seed_from_u64(34);
        let m = zmod(5, 2);
        for _ in 0..60 {
            let rows = random_rows(&mut rng, &m, 3, 4);
            let reference = howell_form(&m, rows.clone(), 4);

            let mut mutated = rows.clone();
            // Shuffle rows, scale one by a unit, add a multiple of another,
            // append a random span element.
            mutated.swap(0, 2);
            let unit = 1 + 5 * rng.gen_range(0..5u128);
            for x in mutated[1].iter_mut() {
                *x = m.mul_raw(*x, unit);
            }
            let c = rng.gen_range(0..25u128);
            let src = mutated[0].clone();
            for (x, &s) in mutated[2].iter_mut().zip(&src) {
                *x = m.add_raw(*x, m.mul_raw(c, s));
            }
            let c0 = rng.gen_range(0..25u128);
            let c1 = rng.gen_range(0..25u128);
            let extra: Vec<u128> = (0..4)
                .map(|k| m.add_raw(m.mul_raw(c0, rows[0][k]), m.mul_raw(c1, rows[1][k])))
                .collect();
            mutated.push(extra);

            assert_eq!(howell_form(&m, mutated, 4), reference);
        }
    }

    #[test]
    fn span_logp_counts_pivot_valuations() {
        let m = zmod(5, 2);
        let rows = vec![vec![5u128, 0], vec![0u128, 1]];
        let hf = howell_form(&m, rows, 2);
        assert_eq!(span_logp(&m, &hf), 3);
        assert_eq!(span_logp(&m, &[]), 0);
    }

    fn enumerate_span(m: &PrimePowerModulus, gens: &[Vec<u128>], cols: usize) -> Vec<Vec<u128>> {
        let mut elems = vec![vec![0u128; cols]];
        for g in gens {
            let mut next = Vec::new();
            for e in &elems {
                for c in 0..m.modulus() {
                    let combined: Vec<u128> = e
                        .iter()
                        .zip(g)
                        .map(|(&x, &y)| m.add_raw(x, m.mul_raw(c, y)))
                        .collect();
                    next.push(combined);
                }
            }
            next.sort_unstable();
            next.dedup();
            elems = next;
        }
        elems
    }

    #[test]
    fn intersection_matches_exhaustive_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(35);
        let m = zmod(5, 2);
        for _ in 0..25 {
            let a = random_rows(&mut rng, &m, 2, 2);
            let b = random_rows(&mut rng, &m, 2, 2);
            let meet = intersect_spans(&m, &a, &b, 2);

            let span_a = enumerate_span(&m, &a, 2);
            let span_b = enumerate_span(&m, &b, 2);
            let mut expected: Vec<Vec<u128>> = span_a
                .into_iter()
                .filter(|v| span_b.binary_search(v).is_ok())
                .collect();
            expected.sort_unstable();
            let mut produced = enumerate_span(&m, &meet, 2);
            produced.sort_unstable();
            assert_eq!(produced, expected);
        }
    }

    #[test]
    fn solve_recovers_span_membership() {
        let mut rng = ChaCha8Rng::seed_from_u64(36);
        let m = zmod(5, 3);
        for _ in 0..40 {
            let rows = random_rows(&mut rng, &m, 3, 4);
            let x: Vec<u128> = (0..3).map(|_| rng.gen_range(0..m.modulus())).collect();
            let mut target = vec![0u128; 4];
            for (i, row) in rows.iter().enumerate() {
                for k in 0..4 {
                    target[k] = m.add_raw(target[k], m.mul_raw(x[i], row[k]));
                }
            }
            let solved = solve_in_span(&m, &rows, 4, &target).expect("member must solve");
            let mut reproduced = vec![0u128; 4];
            for (i, row) in rows.iter().enumerate() {
                for k in 0..4 {
                    reproduced[k] = m.add_raw(reproduced[k], m.mul_raw(solved[i], row[k]));
                }
            }
            assert_eq!(reproduced, target);
        }
    }

    #[test]
    fn solve_rejects_non_members() {
        let m = zmod(5, 2);
        let rows = vec![vec![5u128, 0], vec![0u128, 5]];
        assert!(solve_in_span(&m, &rows, 2, &[1, 0]).is_none());
        assert!(solve_in_span(&m, &rows, 2, &[5, 5]).is_some());
        assert!(solve_in_span(&m, &[], 2, &[0, 0]).is_some());
        assert!(solve_in_span(&m, &[], 2, &[1, 0]).is_none());
    }
}
