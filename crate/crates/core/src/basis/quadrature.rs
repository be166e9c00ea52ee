//! Gauss rules on `[-1, 1]` and collapsed (Duffy) rules on the reference
//! triangle `{x, y ≥ 0, x + y ≤ 1}`.
//!
//! Nodes are the eigenvalues of the symmetric Jacobi matrix of the weight,
//! located by Sturm-sequence bisection and polished with Newton steps on the
//! three-term recurrence. Weights use the closed form
//! `w_i = C / ((1 - x_i²) P_n'(x_i)²)`.

use crate::{Error, Result};

/// Points and positive weights on a reference domain.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule<P> {
    pub points: Vec<P>,
    pub weights: Vec<f64>,
    /// Highest total polynomial degree integrated exactly.
    pub degree: usize,
}

pub type EdgeRule = QuadratureRule<f64>;
pub type TriangleRule = QuadratureRule<[f64; 2]>;

impl<P: Copy> QuadratureRule<P> {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(P) -> f64) -> f64 {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(&p, w)| w * f(p))
            .sum()
    }
}

pub const MAX_GAUSS_POINTS: usize = 20;
pub const MAX_TRIANGLE_DEGREE: usize = 20;

/// Jacobi polynomial `P_n^{(α,β)}(x)` and its derivative.
fn jacobi(n: usize, alpha: f64, beta: f64, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let ab = alpha + beta;
    let mut p_prev = 1.0;
    let mut p = (alpha + 1.0) + 0.5 * (ab + 2.0) * (x - 1.0);
    for m in 2..=n {
        let m = m as f64;
        let c = 2.0 * m + ab;
        let a1 = 2.0 * m * (m + ab) * (c - 2.0);
        let a2 = (c - 1.0) * (c * (c - 2.0) * x + alpha * alpha - beta * beta);
        let a3 = 2.0 * (m + alpha - 1.0) * (m + beta - 1.0) * c;
        let next = (a2 * p - a3 * p_prev) / a1;
        p_prev = p;
        p = next;
    }
    // d/dx P_n^{(α,β)} = (n + α + β + 1)/2 · P_{n-1}^{(α+1,β+1)}
    let (q, _) = jacobi(n - 1, alpha + 1.0, beta + 1.0, x);
    (p, 0.5 * (n as f64 + ab + 1.0) * q)
}

/// Diagonal and squared off-diagonal of the monic Jacobi matrix.
fn jacobi_matrix(n: usize, alpha: f64, beta: f64) -> (Vec<f64>, Vec<f64>) {
    let ab = alpha + beta;
    let diag = (0..n)
        .map(|i| {
            if i == 0 {
                (beta - alpha) / (ab + 2.0)
            } else {
                let c = 2.0 * i as f64 + ab;
                (beta * beta - alpha * alpha) / (c * (c + 2.0))
            }
        })
        .collect();
    let off2 = (1..n)
        .map(|i| {
            let i = i as f64;
            let c = 2.0 * i + ab;
            4.0 * i * (i + alpha) * (i + beta) * (i + ab) / (c * c * (c + 1.0) * (c - 1.0))
        })
        .collect();
    (diag, off2)
}

/// Number of eigenvalues of the tridiagonal matrix strictly below `x`.
fn sturm_count(diag: &[f64], off2: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = diag[0] - x;
    if q < 0.0 {
        count += 1;
    }
    for i in 1..diag.len() {
        let denom = if q == 0.0 { f64::EPSILON } else { q };
        q = diag[i] - x - off2[i - 1] / denom;
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

fn gauss_jacobi_nodes(n: usize, alpha: f64, beta: f64) -> Vec<f64> {
    let (diag, off2) = jacobi_matrix(n, alpha, beta);
    let mut nodes = Vec::with_capacity(n);
    for i in 0..n {
        // i-th smallest eigenvalue, all of which lie in (-1, 1)
        let (mut lo, mut hi) = (-1.0, 1.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if sturm_count(&diag, &off2, mid) > i {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let mut x = 0.5 * (lo + hi);
        for _ in 0..3 {
            let (p, dp) = jacobi(n, alpha, beta, x);
            if dp == 0.0 {
                break;
            }
            let step = p / dp;
            if step.abs() > hi - lo + 1e-14 {
                break;
            }
            x -= step;
        }
        nodes.push(x);
    }
    nodes
}

fn gauss_jacobi(n: usize, alpha: f64, beta: f64, scale: f64) -> (Vec<f64>, Vec<f64>) {
    let nodes = gauss_jacobi_nodes(n, alpha, beta);
    let weights = nodes
        .iter()
        .map(|&x| {
            let (_, dp) = jacobi(n, alpha, beta, x);
            scale / ((1.0 - x * x) * dp * dp)
        })
        .collect();
    (nodes, weights)
}

/// `n`-point Gauss–Legendre rule on `[-1, 1]`, exact to degree `2n - 1`.
pub fn gauss_legendre(n: usize) -> Result<EdgeRule> {
    if !(1..=MAX_GAUSS_POINTS).contains(&n) {
        return Err(Error::OutOfRange {
            what: "Gauss-Legendre point count",
            value: n,
        });
    }
    let (mut points, mut weights) = gauss_jacobi(n, 0.0, 0.0, 2.0);
    // enforce exact symmetry about the origin
    for i in 0..n / 2 {
        let j = n - 1 - i;
        let x = 0.5 * (points[j] - points[i]);
        let w = 0.5 * (weights[i] + weights[j]);
        points[i] = -x;
        points[j] = x;
        weights[i] = w;
        weights[j] = w;
    }
    if n % 2 == 1 {
        points[n / 2] = 0.0;
    }
    Ok(QuadratureRule {
        points,
        weights,
        degree: 2 * n - 1,
    })
}

/// Rule on the reference triangle exact for total degree `degree`.
///
/// Collapsed tensor construction: `x = a (1 - b)`, `y = b` with Gauss–Legendre
/// in `a` and Gauss–Jacobi (weight `1 - b`) in `b`, both with
/// `degree / 2 + 1` points.
pub fn tri_quadrature(degree: usize) -> Result<TriangleRule> {
    if degree > MAX_TRIANGLE_DEGREE {
        return Err(Error::OutOfRange {
            what: "triangle quadrature degree",
            value: degree,
        });
    }
    let n = degree / 2 + 1;
    let line = gauss_legendre(n)?;
    // constant 2^{α+β+1} Γ(n+2)Γ(n+1) / (Γ(n+2) n!) = 4 for α = 1, β = 0
    let (jac_nodes, jac_weights) = gauss_jacobi(n, 1.0, 0.0, 4.0);
    let mut points = Vec::with_capacity(n * n);
    let mut weights = Vec::with_capacity(n * n);
    for (&eta, &wj) in jac_nodes.iter().zip(&jac_weights) {
        let b = 0.5 * (1.0 + eta);
        for (&xi, &wl) in line.points.iter().zip(&line.weights) {
            let a = 0.5 * (1.0 + xi);
            points.push([a * (1.0 - b), b]);
            weights.push(0.5 * wl * 0.25 * wj);
        }
    }
    Ok(QuadratureRule {
        points,
        weights,
        degree: 2 * n - 1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// ∫_T x^a y^b over the reference triangle = a! b! / (a + b + 2)!
    fn monomial_integral(a: u32, b: u32) -> f64 {
        let fact = |n: u32| (1..=n).map(f64::from).product::<f64>();
        fact(a) * fact(b) / fact(a + b + 2)
    }

    #[test]
    fn low_order_closed_forms() {
        let g1 = gauss_legendre(1).unwrap();
        assert_eq!(g1.points, vec![0.0]);
        assert_relative_eq!(g1.weights[0], 2.0, epsilon = 1e-15);

        let g2 = gauss_legendre(2).unwrap();
        let r = 1.0 / 3f64.sqrt();
        assert_relative_eq!(g2.points[0], -r, epsilon = 1e-15);
        assert_relative_eq!(g2.points[1], r, epsilon = 1e-15);
        assert_relative_eq!(g2.weights[0], 1.0, epsilon = 1e-15);
        assert_relative_eq!(g2.weights[1], 1.0, epsilon = 1e-15);

        let g3 = gauss_legendre(3).unwrap();
        assert_relative_eq!(g3.integrate(|x| x.powi(4)), 0.4, epsilon = 1e-15);
    }

    #[test]
    fn gauss_legendre_exactness() {
        for n in 1..=MAX_GAUSS_POINTS {
            let g = gauss_legendre(n).unwrap();
            assert!(g.weights.iter().all(|&w| w > 0.0));
            for (i, &x) in g.points.iter().enumerate() {
                assert_eq!(x, -g.points[n - 1 - i]);
            }
            for p in 0..=(2 * n - 1) as i32 {
                let exact = if p % 2 == 1 {
                    0.0
                } else {
                    2.0 / (p as f64 + 1.0)
                };
                assert!(
                    (g.integrate(|x| x.powi(p)) - exact).abs() < 1e-13,
                    "n = {n}, p = {p}"
                );
            }
        }
    }

    #[test]
    fn out_of_range() {
        assert!(gauss_legendre(0).is_err());
        assert!(gauss_legendre(21).is_err());
        assert!(tri_quadrature(21).is_err());
    }

    #[test]
    fn triangle_closed_forms() {
        let q = tri_quadrature(1).unwrap();
        assert_relative_eq!(q.integrate(|_| 1.0), 0.5, epsilon = 1e-15);
        let q = tri_quadrature(2).unwrap();
        assert_relative_eq!(q.integrate(|[x, y]| x * y), 1.0 / 24.0, epsilon = 1e-15);
        assert_relative_eq!(q.integrate(|[x, _]| x * x), 1.0 / 12.0, epsilon = 1e-15);
    }

    #[test]
    fn triangle_exactness() {
        for d in 0..=MAX_TRIANGLE_DEGREE {
            let q = tri_quadrature(d).unwrap();
            assert!(q.degree >= d);
            assert!(q.weights.iter().all(|&w| w > 0.0));
            assert!(q
                .points
                .iter()
                .all(|&[x, y]| x > 0.0 && y > 0.0 && x + y < 1.0));
            for a in 0..=d as u32 {
                for b in 0..=(d as u32 - a) {
                    let got = q.integrate(|[x, y]| x.powi(a as i32) * y.powi(b as i32));
                    let exact = monomial_integral(a, b);
                    assert!((got - exact).abs() < 1e-13, "d = {d}, x^{a} y^{b}");
                }
            }
        }
    }
}
