//! Polynomial spaces on the reference edge `[-1, 1]`.

use super::quadrature::{gauss_legendre, EdgeRule};

/// Legendre polynomial `P_m(t)` and its derivative.
pub fn legendre(m: usize, t: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, t);
    let (mut d0, mut d1) = (0.0, 1.0);
    if m == 0 {
        return (p0, d0);
    }
    for j in 1..m {
        let j = j as f64;
        let p2 = ((2.0 * j + 1.0) * t * p1 - j * p0) / (j + 1.0);
        let d2 = d0 + (2.0 * j + 1.0) * p1;
        p0 = p1;
        p1 = p2;
        d0 = d1;
        d1 = d2;
    }
    (p1, d1)
}

/// Legendre polynomial of degree `m` scaled to unit `L²(-1, 1)` norm.
pub fn orthonormal_legendre(m: usize, t: f64) -> f64 {
    ((2 * m + 1) as f64 / 2.0).sqrt() * legendre(m, t).0
}

/// Orthonormal Legendre basis of `P^l(-1, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EdgeBasis {
    pub degree: usize,
}

impl EdgeBasis {
    pub fn new(degree: usize) -> Self {
        Self { degree }
    }

    pub fn dim(&self) -> usize {
        self.degree + 1
    }

    pub fn eval(&self, t: f64) -> Vec<f64> {
        (0..=self.degree)
            .map(|m| orthonormal_legendre(m, t))
            .collect()
    }

    /// Value of `Σ c_m φ_m(t)`; coefficients beyond the basis degree are allowed.
    pub fn eval_coeffs(coeffs: &[f64], t: f64) -> f64 {
        coeffs
            .iter()
            .enumerate()
            .map(|(m, c)| c * orthonormal_legendre(m, t))
            .sum()
    }
}

/// Lagrange basis of `P^l(-1, 1)` on equispaced nodes.
///
/// Node order: `t = -1`, `t = +1`, then interior nodes in increasing `t`, so
/// the first two functions belong to the edge endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LagrangeEdgeBasis {
    pub degree: usize,
}

impl LagrangeEdgeBasis {
    pub fn new(degree: usize) -> Self {
        assert!(degree >= 1, "nodal edge basis needs degree >= 1");
        Self { degree }
    }

    pub fn dim(&self) -> usize {
        self.degree + 1
    }

    pub fn nodes(&self) -> Vec<f64> {
        let l = self.degree;
        let mut nodes = vec![-1.0, 1.0];
        nodes.extend((1..l).map(|j| -1.0 + 2.0 * j as f64 / l as f64));
        nodes
    }

    pub fn eval(&self, t: f64) -> Vec<f64> {
        let nodes = self.nodes();
        (0..nodes.len())
            .map(|i| {
                nodes
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .map(|(_, &tj)| (t - tj) / (nodes[i] - tj))
                    .product()
            })
            .collect()
    }
}

/// Hybrid unknown space on a single edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeSpace {
    /// Discontinuous across vertices, orthonormal Legendre modes.
    Modal(EdgeBasis),
    /// Continuous across vertices, Lagrange nodes shared at the endpoints.
    Nodal(LagrangeEdgeBasis),
}

impl EdgeSpace {
    pub fn degree(&self) -> usize {
        match self {
            EdgeSpace::Modal(b) => b.degree,
            EdgeSpace::Nodal(b) => b.degree,
        }
    }

    pub fn dim(&self) -> usize {
        self.degree() + 1
    }

    pub fn eval(&self, t: f64) -> Vec<f64> {
        match self {
            EdgeSpace::Modal(b) => b.eval(t),
            EdgeSpace::Nodal(b) => b.eval(t),
        }
    }

    pub fn eval_coeffs(&self, coeffs: &[f64], t: f64) -> f64 {
        self.eval(t).iter().zip(coeffs).map(|(p, c)| p * c).sum()
    }
}

/// `L²` projection onto `P^l(-1, 1)`: returns orthonormal Legendre coefficients
/// of the function sampled at the points of `rule`.
///
/// The result is exact whenever `rule` integrates the function times `P^l`.
pub fn project_edge(values: &[f64], rule: &EdgeRule, l: usize) -> Vec<f64> {
    debug_assert_eq!(values.len(), rule.len());
    (0..=l)
        .map(|m| {
            rule.points
                .iter()
                .zip(&rule.weights)
                .zip(values)
                .map(|((&t, w), v)| w * v * orthonormal_legendre(m, t))
                .sum()
        })
        .collect()
}

/// `k`-point Gauss–Legendre quadrature of `f g` for `f, g ∈ P^k(-1, 1)` given
/// by orthonormal Legendre coefficients.
///
/// Equals `∫ P_{k-1} f · P_{k-1} g` exactly: the degree-`k` mode vanishes at
/// every node of the `k`-point rule.
pub fn reduced_edge_mass(k: usize, f: &[f64], g: &[f64]) -> f64 {
    assert!(k >= 1, "reduced mass needs k >= 1");
    assert!(
        f.len() <= k + 1 && g.len() <= k + 1,
        "inputs must have degree <= k"
    );
    let rule = gauss_legendre(k).expect("k within the Gauss-Legendre range");
    rule.integrate(|t| EdgeBasis::eval_coeffs(f, t) * EdgeBasis::eval_coeffs(g, t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn legendre_closed_forms() {
        let t: f64 = 0.37;
        assert_relative_eq!(legendre(2, t).0, 1.5 * t * t - 0.5, epsilon = 1e-15);
        assert_relative_eq!(legendre(3, t).0, 2.5 * t.powi(3) - 1.5 * t, epsilon = 1e-15);
        assert_relative_eq!(legendre(3, t).1, 7.5 * t * t - 1.5, epsilon = 1e-15);
    }

    #[test]
    fn gram_matrix_is_identity() {
        let rule = gauss_legendre(10).unwrap();
        for l in 0..=6 {
            let b = EdgeBasis::new(l);
            for i in 0..=l {
                for j in 0..=l {
                    let g = rule.integrate(|t| b.eval(t)[i] * b.eval(t)[j]);
                    let expected = if i == j { 1.0 } else { 0.0 };
                    assert!((g - expected).abs() < 1e-12, "l = {l}, ({i}, {j}) -> {g}");
                }
            }
        }
    }

    #[test]
    fn lagrange_is_nodal() {
        for l in 1..=4 {
            let b = LagrangeEdgeBasis::new(l);
            for (i, &t) in b.nodes().iter().enumerate() {
                let v = b.eval(t);
                for (j, &vj) in v.iter().enumerate() {
                    assert_relative_eq!(vj, if i == j { 1.0 } else { 0.0 }, epsilon = 1e-14);
                }
            }
            let sum: f64 = b.eval(0.123).iter().sum();
            assert_relative_eq!(sum, 1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn projection_examples() {
        let rule = gauss_legendre(4).unwrap();
        let sample = |f: &dyn Fn(f64) -> f64| rule.points.iter().map(|&t| f(t)).collect::<Vec<_>>();

        let c = project_edge(&sample(&|_| 3.0), &rule, 2);
        assert_relative_eq!(EdgeBasis::eval_coeffs(&c, 0.3), 3.0, epsilon = 1e-14);
        assert!(c[1].abs() < 1e-15 && c[2].abs() < 1e-15);

        let c = project_edge(&sample(&|t| t), &rule, 0);
        assert!(c[0].abs() < 1e-15);

        // x² = 1/3 P_0 + 2/3 P_2, so its P^1 projection is the constant 1/3
        let c = project_edge(&sample(&|t| t * t), &rule, 1);
        assert_relative_eq!(EdgeBasis::eval_coeffs(&c, -0.7), 1.0 / 3.0, epsilon = 1e-14);
        assert!(c[1].abs() < 1e-15);
    }

    #[test]
    fn reduced_mass_examples() {
        let x = [0.0, (2.0f64 / 3.0).sqrt()]; // t = sqrt(2/3) φ_1
        assert_eq!(reduced_edge_mass(1, &x, &x), 0.0);
        let one = [2f64.sqrt()];
        assert_relative_eq!(reduced_edge_mass(1, &one, &one), 2.0, epsilon = 1e-14);

        // φ_2 of the unnormalized family: P_2 = sqrt(2/5) φ_2
        let p2 = [0.0, 0.0, (2.0f64 / 5.0).sqrt()];
        assert!(reduced_edge_mass(2, &p2, &p2).abs() < 1e-15);
        let full = gauss_legendre(3)
            .unwrap()
            .integrate(|t| legendre(2, t).0.powi(2));
        assert_relative_eq!(full, 0.4, epsilon = 1e-15);
    }

    proptest! {
        #[test]
        fn projection_is_idempotent(coeffs in proptest::collection::vec(-5.0f64..5.0, 6), l in 0usize..5) {
            let rule = gauss_legendre(8).unwrap();
            let values: Vec<f64> = rule.points.iter().map(|&t| EdgeBasis::eval_coeffs(&coeffs, t)).collect();
            let once = project_edge(&values, &rule, l);
            let again_values: Vec<f64> = rule.points.iter().map(|&t| EdgeBasis::eval_coeffs(&once, t)).collect();
            let twice = project_edge(&again_values, &rule, l);
            for (a, b) in once.iter().zip(&twice) {
                prop_assert!((a - b).abs() < 1e-12);
            }
        }

        #[test]
        fn projection_residual_is_orthogonal(
            coeffs in proptest::collection::vec(-5.0f64..5.0, 1..=8),
            l in 0usize..5,
        ) {
            // random f ∈ P^{l+3}
            let f: Vec<f64> = coeffs.into_iter().take(l + 4).collect();
            let rule = gauss_legendre(10).unwrap();
            let values: Vec<f64> = rule.points.iter().map(|&t| EdgeBasis::eval_coeffs(&f, t)).collect();
            let p = project_edge(&values, &rule, l);
            for q in 0..=l {
                let inner = rule.integrate(|t| {
                    (EdgeBasis::eval_coeffs(&f, t) - EdgeBasis::eval_coeffs(&p, t)) * legendre(q, t).0
                });
                prop_assert!(inner.abs() < 1e-12);
            }
        }
    }
}
