//! Orthonormal polynomial basis on the reference triangle and the affine map
//! onto physical triangles.

use super::quadrature::tri_quadrature;
use crate::mesh::Point;

/// Affine map `x = v0 + J ξ` from the reference triangle onto a physical one.
#[derive(Debug, Clone, Copy)]
pub struct AffineMap {
    pub origin: Point,
    pub jac: [[f64; 2]; 2],
    pub inv: [[f64; 2]; 2],
    pub det: f64,
}

impl AffineMap {
    pub fn new(v: [Point; 3]) -> Self {
        let jac = [
            [v[1][0] - v[0][0], v[2][0] - v[0][0]],
            [v[1][1] - v[0][1], v[2][1] - v[0][1]],
        ];
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        let inv = [
            [jac[1][1] / det, -jac[0][1] / det],
            [-jac[1][0] / det, jac[0][0] / det],
        ];
        Self {
            origin: v[0],
            jac,
            inv,
            det,
        }
    }

    pub fn map(&self, xi: [f64; 2]) -> Point {
        [
            self.origin[0] + self.jac[0][0] * xi[0] + self.jac[0][1] * xi[1],
            self.origin[1] + self.jac[1][0] * xi[0] + self.jac[1][1] * xi[1],
        ]
    }

    pub fn inverse(&self, x: Point) -> [f64; 2] {
        let d = [x[0] - self.origin[0], x[1] - self.origin[1]];
        [
            self.inv[0][0] * d[0] + self.inv[0][1] * d[1],
            self.inv[1][0] * d[0] + self.inv[1][1] * d[1],
        ]
    }

    /// Reference gradient to physical gradient, `J^{-T} ∇ξ`.
    pub fn grad(&self, g: [f64; 2]) -> [f64; 2] {
        [
            g[0] * self.inv[0][0] + g[1] * self.inv[1][0],
            g[0] * self.inv[0][1] + g[1] * self.inv[1][1],
        ]
    }

    /// Reference Hessian `[ξξ, ξη, ηη]` to physical `[xx, xy, yy]`, `J^{-T} H J^{-1}`.
    pub fn hessian(&self, h: [f64; 3]) -> [f64; 3] {
        let m = [[h[0], h[1]], [h[1], h[2]]];
        let mut out = [[0.0; 2]; 2];
        for (a, row) in out.iter_mut().enumerate() {
            for (b, o) in row.iter_mut().enumerate() {
                for i in 0..2 {
                    for j in 0..2 {
                        *o += self.inv[i][a] * m[i][j] * self.inv[j][b];
                    }
                }
            }
        }
        [out[0][0], out[0][1], out[1][1]]
    }
}

/// Basis of `P^k` on the reference triangle, orthonormal in `L²(T̂)`.
///
/// Built from monomials centered at the centroid, ordered by total degree and
/// orthonormalized through a Cholesky factor of their exact Gram matrix, so
/// function 0 is the constant `√2`.
#[derive(Debug, Clone)]
pub struct TriBasis {
    degree: usize,
    exponents: Vec<(i32, i32)>,
    /// Row `i` holds the monomial coefficients of basis function `i`.
    coeffs: Vec<Vec<f64>>,
}

const CENTROID: f64 = 1.0 / 3.0;

fn powi(x: f64, n: i32) -> f64 {
    if n < 0 {
        0.0
    } else {
        x.powi(n)
    }
}

impl TriBasis {
    pub fn new(degree: usize) -> Self {
        let exponents: Vec<(i32, i32)> = (0..=degree as i32)
            .flat_map(|d| (0..=d).map(move |b| (d - b, b)))
            .collect();
        let n = exponents.len();
        let rule = tri_quadrature(2 * degree).expect("degree within quadrature range");
        let mono =
            |x: [f64; 2], (a, b): (i32, i32)| powi(x[0] - CENTROID, a) * powi(x[1] - CENTROID, b);

        let mut gram = vec![vec![0.0; n]; n];
        for (p, w) in rule.points.iter().zip(&rule.weights) {
            let m: Vec<f64> = exponents.iter().map(|&e| mono(*p, e)).collect();
            for i in 0..n {
                for j in 0..n {
                    gram[i][j] += w * m[i] * m[j];
                }
            }
        }
        // Cholesky G = L Lᵀ
        let mut l = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..=i {
                let s: f64 = gram[i][j] - (0..j).map(|q| l[i][q] * l[j][q]).sum::<f64>();
                if i == j {
                    l[i][i] = s.sqrt();
                } else {
                    l[i][j] = s / l[j][j];
                }
            }
        }
        // C = L⁻¹ by forward substitution
        let mut coeffs = vec![vec![0.0; n]; n];
        for col in 0..n {
            for i in 0..n {
                let rhs = if i == col { 1.0 } else { 0.0 };
                let s: f64 = rhs - (0..i).map(|q| l[i][q] * coeffs[q][col]).sum::<f64>();
                coeffs[i][col] = s / l[i][i];
            }
        }
        Self {
            degree,
            exponents,
            coeffs,
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.exponents.len()
    }

    fn combine(&self, m: &[f64]) -> Vec<f64> {
        self.coeffs
            .iter()
            .map(|row| row.iter().zip(m).map(|(c, v)| c * v).sum())
            .collect()
    }

    pub fn values(&self, xi: [f64; 2]) -> Vec<f64> {
        let (x, y) = (xi[0] - CENTROID, xi[1] - CENTROID);
        let m: Vec<f64> = self
            .exponents
            .iter()
            .map(|&(a, b)| powi(x, a) * powi(y, b))
            .collect();
        self.combine(&m)
    }

    /// Reference gradients `(∂ξ, ∂η)` of all basis functions.
    pub fn gradients(&self, xi: [f64; 2]) -> Vec<[f64; 2]> {
        let (x, y) = (xi[0] - CENTROID, xi[1] - CENTROID);
        let dx: Vec<f64> = self
            .exponents
            .iter()
            .map(|&(a, b)| a as f64 * powi(x, a - 1) * powi(y, b))
            .collect();
        let dy: Vec<f64> = self
            .exponents
            .iter()
            .map(|&(a, b)| b as f64 * powi(x, a) * powi(y, b - 1))
            .collect();
        self.combine(&dx)
            .into_iter()
            .zip(self.combine(&dy))
            .map(|(a, b)| [a, b])
            .collect()
    }

    /// Reference Hessians `[ξξ, ξη, ηη]` of all basis functions.
    pub fn hessians(&self, xi: [f64; 2]) -> Vec<[f64; 3]> {
        let (x, y) = (xi[0] - CENTROID, xi[1] - CENTROID);
        let f = |a: i32| a as f64 * (a - 1) as f64;
        let dxx: Vec<f64> = self
            .exponents
            .iter()
            .map(|&(a, b)| f(a) * powi(x, a - 2) * powi(y, b))
            .collect();
        let dxy: Vec<f64> = self
            .exponents
            .iter()
            .map(|&(a, b)| (a * b) as f64 * powi(x, a - 1) * powi(y, b - 1))
            .collect();
        let dyy: Vec<f64> = self
            .exponents
            .iter()
            .map(|&(a, b)| f(b) * powi(x, a) * powi(y, b - 2))
            .collect();
        let (xx, xy, yy) = (self.combine(&dxx), self.combine(&dxy), self.combine(&dyy));
        (0..self.dim()).map(|i| [xx[i], xy[i], yy[i]]).collect()
    }
}
