use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::{Rational, Scalar};

/// Dense row-major matrix over one exact field.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Matrix<S> {
    pub fn new(rows: usize, cols: usize, data: Vec<S>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data length");
        Matrix { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![S::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = S::one();
        }
        m
    }

    /// Build from row vectors, each of length `cols`.
    pub fn from_rows(rows: &[Vec<S>], cols: usize) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "row length");
            data.extend(r.iter().cloned());
        }
        Matrix { rows: rows.len(), cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.data[i * self.cols + j]
    }

    pub fn row_vecs(&self) -> Vec<Vec<S>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn rank(&self) -> usize {
        S::rank(self)
    }

    /// Reduced row-echelon form of the row space, zero rows dropped.
    pub fn row_space_canonical_basis(&self) -> Self {
        let (rows, _) = rref_rows(self.row_vecs(), self.cols);
        Self::from_rows(&rows, self.cols)
    }
}

impl<S: Scalar> fmt::Debug for Matrix<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries((0..self.rows).map(|i| self.row(i)))
            .finish()
    }
}

/// Gauss-Jordan elimination. Returns the nonzero rows of the reduced
/// row-echelon form (leading entries 1) and their pivot columns.
pub fn rref_rows<S: Scalar>(mut rows: Vec<Vec<S>>, cols: usize) -> (Vec<Vec<S>>, Vec<usize>) {
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows.len() {
            break;
        }
        let Some(p) = (rank..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, p);
        let inv = rows[rank][col].inv().expect("nonzero pivot");
        if !inv.is_one() {
            for x in rows[rank][col..].iter_mut() {
                *x = x.clone() * inv.clone();
            }
        }
        let pivot_row = rows[rank].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == rank || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for j in col..cols {
                if !pivot_row[j].is_zero() {
                    row[j] = row[j].clone() - f.clone() * pivot_row[j].clone();
                }
            }
        }
        pivots.push(col);
        rank += 1;
    }
    rows.truncate(rank);
    (rows, pivots)
}

/// Scale a rational row by the lcm of its denominators.
pub(crate) fn integer_row(row: &[Rational]) -> Vec<BigInt> {
    let l = row
        .iter()
        .fold(BigInt::one(), |acc, x| if x.is_integer() { acc } else { acc.lcm(&x.denom()) });
    row.iter().map(|x| x.numer() * (&l / x.denom())).collect()
}

/// Rank of an integer matrix by fraction-free (Bareiss) elimination. Runs in
/// `i128` while entries fit and restarts in `BigInt` otherwise.
pub fn bareiss_rank_integer_rows(rows: Vec<Vec<BigInt>>, cols: usize) -> usize {
    let small: Option<Vec<Vec<i128>>> = rows
        .iter()
        .map(|r| r.iter().map(|x| x.to_i128()).collect())
        .collect();
    if let Some(r) = small.and_then(|m| bareiss_i128(m, cols)) {
        return r;
    }
    bareiss_big(rows, cols)
}

fn bareiss_i128(mut a: Vec<Vec<i128>>, cols: usize) -> Option<usize> {
    let n = a.len();
    let mut rank = 0;
    let mut prev: i128 = 1;
    for col in 0..cols {
        if rank == n {
            break;
        }
        let Some(p) = (rank..n).find(|&i| a[i][col] != 0) else {
            continue;
        };
        a.swap(rank, p);
        let piv = a[rank][col];
        let (top, rest) = a.split_at_mut(rank + 1);
        let prow = &top[rank];
        for row in rest.iter_mut() {
            let f = row[col];
            for j in col + 1..cols {
                let v = row[j].checked_mul(piv)?.checked_sub(f.checked_mul(prow[j])?)?;
                row[j] = v / prev;
            }
            row[col] = 0;
        }
        prev = piv;
        rank += 1;
    }
    Some(rank)
}

fn bareiss_big(mut a: Vec<Vec<BigInt>>, cols: usize) -> usize {
    let n = a.len();
    let mut rank = 0;
    let mut prev = BigInt::one();
    for col in 0..cols {
        if rank == n {
            break;
        }
        let Some(p) = (rank..n).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(rank, p);
        let piv = a[rank][col].clone();
        let (top, rest) = a.split_at_mut(rank + 1);
        let prow = &top[rank];
        for row in rest.iter_mut() {
            let f = row[col].clone();
            for j in col + 1..cols {
                row[j] = (&row[j] * &piv - &f * &prow[j]) / &prev;
            }
            row[col] = BigInt::zero();
        }
        prev = piv;
        rank += 1;
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::Cyclotomic;
    use proptest::prelude::*;

    fn qm(rows: &[&[i64]]) -> Matrix<Rational> {
        let cols = rows.first().map_or(0, |r| r.len());
        let v: Vec<Vec<Rational>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Rational::from_int(x)).collect())
            .collect();
        Matrix::from_rows(&v, cols)
    }

    #[test]
    fn identity_and_zero() {
        assert_eq!(Matrix::<Rational>::identity(3).rank(), 3);
        assert_eq!(Matrix::<Rational>::zeros(3, 4).rank(), 0);
    }

    #[test]
    fn a3_positive_roots_span_three_dimensions() {
        let m = qm(&[
            &[1, -1, 0, 0],
            &[0, 1, -1, 0],
            &[0, 0, 1, -1],
            &[1, 0, -1, 0],
            &[0, 1, 0, -1],
            &[1, 0, 0, -1],
        ]);
        assert_eq!(m.rank(), 3);
    }

    #[test]
    fn canonical_bases() {
        assert_eq!(qm(&[&[2, 0], &[0, 3]]).row_space_canonical_basis(), qm(&[&[1, 0], &[0, 1]]));
        assert_eq!(qm(&[&[1, 1], &[2, 2]]).row_space_canonical_basis(), qm(&[&[1, 1]]));
        let m = qm(&[&[1, -1, 0], &[0, 1, -1], &[1, 0, -1]]);
        assert_eq!(m.row_space_canonical_basis(), qm(&[&[1, 0, -1], &[0, 1, -1]]));
    }

    #[test]
    fn cyclotomic_rank_uses_field_relations() {
        // (1, zeta) and (zeta^2, 1) are proportional: zeta^2 * (1, zeta) = (zeta^2, 1).
        let z = Cyclotomic::zeta(3);
        let one = Cyclotomic::one();
        let m = Matrix::from_rows(
            &[vec![one.clone(), z.clone()], vec![z.clone() * z.clone(), one]],
            2,
        );
        assert_eq!(m.rank(), 1);
    }

    #[test]
    fn bareiss_overflow_falls_back() {
        let big = i64::MAX / 3;
        let m = qm(&[&[big, big - 1, 7], &[big - 5, big, 3], &[1, 2, big]]);
        let gauss = rref_rows(m.row_vecs(), 3).1.len();
        assert_eq!(m.rank(), gauss);
    }

    fn small_matrix() -> impl Strategy<Value = Vec<Vec<i64>>> {
        (1usize..6, 1usize..6).prop_flat_map(|(r, c)| {
            proptest::collection::vec(proptest::collection::vec(-3i64..4, c), r)
        })
    }

    proptest! {
        #[test]
        fn rank_invariant_under_row_ops(m in small_matrix(), seed in any::<u64>(), scale in 1i64..5) {
            let cols = m[0].len();
            let rows: Vec<Vec<Rational>> =
                m.iter().map(|r| r.iter().map(|&x| Rational::from_int(x)).collect()).collect();
            let a = Matrix::from_rows(&rows, cols);
            let mut perm = rows.clone();
            let k = (seed as usize) % perm.len();
            perm.rotate_left(k);
            perm.reverse();
            for x in perm[0].iter_mut() {
                *x = x.clone() * Rational::new(-scale, 2);
            }
            let b = Matrix::from_rows(&perm, cols);
            prop_assert_eq!(a.rank(), b.rank());
            prop_assert_eq!(a.rank(), rref_rows(rows.clone(), cols).1.len());
            let mut plain = rows.clone();
            plain.rotate_left(k);
            prop_assert_eq!(
                a.row_space_canonical_basis(),
                Matrix::from_rows(&plain, cols).row_space_canonical_basis()
            );
        }
    }
}
