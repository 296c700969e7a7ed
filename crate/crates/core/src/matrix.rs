//! Dense matrices over the integers.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Row-major dense matrix of arbitrary-precision integers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    /// Builds a matrix from rows; all rows must have the same length.
    pub fn from_rows<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            if row.len() != cols {
                return Err(Error::NotSquare(rows.len(), row.len()));
            }
            data.extend(row.iter().cloned().map(Into::into));
        }
        Ok(IntMatrix {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: BigInt) {
        self.data[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    /// Matrix-vector product.
    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.cols, "dimension mismatch");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    ///
    /// Every intermediate division is exact, so no rational arithmetic is
    /// needed.
    pub fn determinant(&self) -> Result<BigInt> {
        if self.rows != self.cols {
            return Err(Error::NotSquare(self.rows, self.cols));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(BigInt::one());
        }
        let mut a = self.to_rows();
        let mut negate = false;
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                    Some(i) => {
                        a.swap(k, i);
                        negate = !negate;
                    }
                    None => return Ok(BigInt::zero()),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let t = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    debug_assert!((&t % &prev).is_zero());
                    a[i][j] = t / &prev;
                }
            }
            prev = a[k][k].clone();
        }
        let det = a[n - 1][n - 1].clone();
        Ok(if negate { -det } else { det })
    }

    /// Invariant factors `d_1 | d_2 | ... | d_n` of a nonsingular square
    /// matrix, i.e. the diagonal of its Smith normal form (all positive).
    ///
    /// The cokernel of the matrix is `Z/d_1 ⊕ ... ⊕ Z/d_n`.
    pub fn invariant_factors(&self) -> Result<Vec<BigInt>> {
        if self.rows != self.cols {
            return Err(Error::NotSquare(self.rows, self.cols));
        }
        let n = self.rows;
        let mut m = self.to_rows();
        let mut factors = Vec::with_capacity(n);
        for t in 0..n {
            loop {
                let (pi, pj) = smallest_nonzero(&m, t).ok_or(Error::Singular)?;
                m.swap(t, pi);
                for row in m.iter_mut() {
                    row.swap(t, pj);
                }
                let pivot = m[t][t].clone();
                let mut clean = true;
                for i in t + 1..n {
                    if m[i][t].is_zero() {
                        continue;
                    }
                    let q = m[i][t].div_floor(&pivot);
                    for j in t..n {
                        let sub = &q * &m[t][j];
                        m[i][j] -= sub;
                    }
                    clean &= m[i][t].is_zero();
                }
                for j in t + 1..n {
                    if m[t][j].is_zero() {
                        continue;
                    }
                    let q = m[t][j].div_floor(&pivot);
                    for row in m.iter_mut().skip(t) {
                        let sub = &q * &row[t];
                        row[j] -= sub;
                    }
                    clean &= m[t][j].is_zero();
                }
                if !clean {
                    continue;
                }
                // Pivot must divide the rest of the block; otherwise fold the
                // offending row in and go again with a smaller pivot.
                let offender = (t + 1..n)
                    .find(|&i| (t + 1..n).any(|j| !(&m[i][j] % &pivot).is_zero()));
                match offender {
                    Some(i) => {
                        for j in t..n {
                            let add = m[i][j].clone();
                            m[t][j] += add;
                        }
                    }
                    None => break,
                }
            }
            factors.push(m[t][t].abs());
        }
        Ok(factors)
    }
}

fn smallest_nonzero(m: &[Vec<BigInt>], t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for (i, row) in m.iter().enumerate().skip(t) {
        for (j, x) in row.iter().enumerate().skip(t) {
            if x.is_zero() {
                continue;
            }
            if best.is_none_or(|(bi, bj)| x.abs() < m[bi][bj].abs()) {
                best = Some((i, j));
            }
        }
    }
    best
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            f.write_str("[")?;
            for (j, x) in self.row(i).iter().enumerate() {
                if j > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{x}")?;
            }
            f.write_str("]\n")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn m(rows: &[Vec<i64>]) -> IntMatrix {
        IntMatrix::from_rows(rows).unwrap()
    }

    fn ints(xs: &[i64]) -> Vec<BigInt> {
        xs.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn determinant_small_cases() {
        assert_eq!(IntMatrix::zeros(0, 0).determinant().unwrap(), BigInt::one());
        assert_eq!(m(&[vec![2, -1], vec![-1, 2]]).determinant().unwrap(), 3.into());
        // Needs a row swap.
        assert_eq!(
            m(&[vec![0, 1, 0], vec![1, 0, 0], vec![0, 0, 5]]).determinant().unwrap(),
            (-5).into()
        );
        assert_eq!(m(&[vec![1, 2], vec![2, 4]]).determinant().unwrap(), 0.into());
        assert!(matches!(
            m(&[vec![1, 2, 3]]).determinant(),
            Err(Error::NotSquare(1, 3))
        ));
    }

    #[test]
    fn determinant_matches_cofactor_expansion() {
        fn cofactor(a: &[Vec<i64>]) -> i64 {
            if a.is_empty() {
                return 1;
            }
            (0..a.len())
                .map(|j| {
                    let minor: Vec<Vec<i64>> = a[1..]
                        .iter()
                        .map(|r| r.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, &x)| x).collect())
                        .collect();
                    let sign = if j % 2 == 0 { 1 } else { -1 };
                    sign * a[0][j] * cofactor(&minor)
                })
                .sum()
        }
        let mut seed = 7u64;
        let mut next = || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((seed >> 33) % 11) as i64 - 5
        };
        for n in 1..6 {
            for _ in 0..20 {
                let a: Vec<Vec<i64>> = (0..n).map(|_| (0..n).map(|_| next()).collect()).collect();
                assert_eq!(m(&a).determinant().unwrap(), cofactor(&a).into());
            }
        }
    }

    #[test]
    fn invariant_factors_known() {
        assert_eq!(IntMatrix::identity(3).invariant_factors().unwrap(), ints(&[1, 1, 1]));
        assert_eq!(
            m(&[vec![2, 0], vec![0, 3]]).invariant_factors().unwrap(),
            ints(&[1, 6])
        );
        assert_eq!(
            m(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]])
                .invariant_factors()
                .unwrap(),
            ints(&[2, 6, 12])
        );
        assert_eq!(m(&[vec![1, 2], vec![2, 4]]).invariant_factors(), Err(Error::Singular));
    }

    #[test]
    fn invariant_factors_divide_and_multiply_to_det() {
        let a = m(&[vec![4, -1, -1, -2], vec![-1, 3, -1, 0], vec![-1, -1, 5, -3], vec![-2, 0, -3, 6]]);
        let d = a.invariant_factors().unwrap();
        for w in d.windows(2) {
            assert!((&w[1] % &w[0]).is_zero());
        }
        let prod: BigInt = d.iter().product();
        assert_eq!(prod, a.determinant().unwrap().abs());
    }
}
