use std::ops::{Index, IndexMut};

use rayon::prelude::*;

use crate::{Error, Result};

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self {
            rows: r,
            cols: c,
            data: rows.concat(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn matmul(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for q in 0..self.cols {
                let a = self[(i, q)];
                if a == 0.0 {
                    continue;
                }
                let src = other.row(q);
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d += a * s;
                }
            }
        }
        out
    }

    /// `self - other`
    pub fn sub(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        Self {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    /// Largest `|a_ij - a_ji|`.
    pub fn max_asymmetry(&self) -> f64 {
        assert_eq!(self.rows, self.cols);
        let mut m: f64 = 0.0;
        for i in 0..self.rows {
            for j in i + 1..self.cols {
                m = m.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        m
    }

    /// LU factorization with partial pivoting. Pivots below `1e-14 · max|a_ij|`
    /// are reported as singular.
    pub fn lu(&self) -> Result<LuFactors> {
        assert_eq!(self.rows, self.cols, "LU needs a square matrix");
        let n = self.rows;
        let threshold = 1e-14 * self.max_abs();
        let mut a = self.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (p, pmax) = (k..n)
                .map(|i| (i, a[i * n + k].abs()))
                .fold((k, -1.0), |best, c| if c.1 > best.1 { c } else { best });
            if pmax <= threshold || pmax == 0.0 {
                return Err(Error::Singular {
                    pivot: k,
                    magnitude: pmax,
                });
            }
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let (head, tail) = a.split_at_mut((k + 1) * n);
            let pivot_row = &head[k * n..];
            let pivot = pivot_row[k];
            let eliminate = |row: &mut [f64]| {
                let l = row[k] / pivot;
                row[k] = l;
                if l != 0.0 {
                    for (r, p) in row[k + 1..].iter_mut().zip(&pivot_row[k + 1..]) {
                        *r -= l * p;
                    }
                }
            };
            if (n - k) * (n - k) > 1 << 16 {
                tail.par_chunks_mut(n).for_each(eliminate);
            } else {
                tail.chunks_mut(n).for_each(eliminate);
            }
        }
        Ok(LuFactors { n, lu: a, perm })
    }
}

/// Packed `PA = LU` factors (unit lower triangle implicit).
#[derive(Debug, Clone)]
pub struct LuFactors {
    n: usize,
    lu: Vec<f64>,
    perm: Vec<usize>,
}

impl LuFactors {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = self.n;
        assert_eq!(rhs.len(), n);
        let mut x: Vec<f64> = self.perm.iter().map(|&p| rhs[p]).collect();
        for i in 0..n {
            let row = &self.lu[i * n..i * n + i];
            let s: f64 = row.iter().zip(&x[..i]).map(|(l, v)| l * v).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let row = &self.lu[i * n..(i + 1) * n];
            let s: f64 = row[i + 1..]
                .iter()
                .zip(&x[i + 1..])
                .map(|(u, v)| u * v)
                .sum();
            x[i] = (x[i] - s) / row[i];
        }
        x
    }

    /// Solves for every column of `rhs`.
    pub fn solve_matrix(&self, rhs: &DenseMatrix) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(rhs.rows, rhs.cols);
        let mut col = vec![0.0; rhs.rows];
        for j in 0..rhs.cols {
            for (i, c) in col.iter_mut().enumerate() {
                *c = rhs[(i, j)];
            }
            for (i, v) in self.solve(&col).into_iter().enumerate() {
                out[(i, j)] = v;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn identity_leaves_rhs() {
        let lu = DenseMatrix::identity(4).lu().unwrap();
        assert_eq!(lu.solve(&[1.0, -2.0, 3.0, 4.5]), vec![1.0, -2.0, 3.0, 4.5]);
    }

    #[test]
    fn hilbert_block_against_inverse() {
        // H = [[1, 1/2], [1/2, 1/3]], H⁻¹ = [[4, -6], [-6, 12]]
        let h = DenseMatrix::from_rows(&[vec![1.0, 0.5], vec![0.5, 1.0 / 3.0]]);
        let x = h.lu().unwrap().solve(&[1.0, 2.0]);
        assert_relative_eq!(x[0], 4.0 - 12.0, epsilon = 1e-12);
        assert_relative_eq!(x[1], -6.0 + 24.0, epsilon = 1e-12);
    }

    #[test]
    fn singular_is_reported() {
        let m = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]);
        assert!(matches!(m.lu(), Err(Error::Singular { pivot: 1, .. })));
        assert!(matches!(
            DenseMatrix::zeros(3, 3).lu(),
            Err(Error::Singular { pivot: 0, .. })
        ));
    }

    #[test]
    fn large_system_uses_parallel_path() {
        let n = 400;
        let mut a = DenseMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                a[(i, j)] = 1.0 / (1.0 + (i as f64 - j as f64).abs());
            }
            a[(i, i)] += n as f64;
        }
        let b: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
        let x = a.lu().unwrap().solve(&b);
        let r: f64 = a
            .matvec(&x)
            .iter()
            .zip(&b)
            .map(|(p, q)| (p - q).abs())
            .fold(0.0, f64::max);
        assert!(r < 1e-12 * (a.max_abs() * n as f64));
    }

    proptest! {
        #[test]
        fn residual_bound(entries in proptest::collection::vec(-1.0f64..1.0, 36), rhs in proptest::collection::vec(-1.0f64..1.0, 6)) {
            let mut a = DenseMatrix::zeros(6, 6);
            for i in 0..6 {
                for j in 0..6 {
                    a[(i, j)] = entries[6 * i + j];
                }
                a[(i, i)] += 3.0;
            }
            let x = a.lu().unwrap().solve(&rhs);
            let ax = a.matvec(&x);
            let norm = |v: &[f64]| v.iter().map(|q| q * q).sum::<f64>().sqrt();
            let r: Vec<f64> = ax.iter().zip(&rhs).map(|(p, q)| p - q).collect();
            // Frobenius norm bounds the spectral norm
            let anorm = entries.iter().map(|q| q * q).sum::<f64>().sqrt() + 3.0 * 6f64.sqrt();
            prop_assert!(norm(&r) <= 1e-12 * (anorm * norm(&x) + norm(&rhs)));
        }
    }
}
