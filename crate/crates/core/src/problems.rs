//! Manufactured solutions of `-Δu = f` on the unit square.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::hdg::{ScalarFn, SchemeConfig};
use crate::mesh::Point;
use crate::norms::ExactSolution;
use crate::{Error, Result};

/// `sin(πx) sin(πy)`, zero on the boundary of the unit square.
#[derive(Debug, Clone, Copy, Default)]
pub struct SinSin;

impl ExactSolution for SinSin {
    fn value(&self, p: Point) -> f64 {
        (PI * p[0]).sin() * (PI * p[1]).sin()
    }

    fn gradient(&self, p: Point) -> [f64; 2] {
        let (sx, cx) = (PI * p[0]).sin_cos();
        let (sy, cy) = (PI * p[1]).sin_cos();
        [PI * cx * sy, PI * sx * cy]
    }

    fn hessian(&self, p: Point) -> [f64; 3] {
        let (sx, cx) = (PI * p[0]).sin_cos();
        let (sy, cy) = (PI * p[1]).sin_cos();
        let pi2 = PI * PI;
        [-pi2 * sx * sy, pi2 * cx * cy, -pi2 * sx * sy]
    }
}

/// `x² + y²`, load `-4`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Quadratic;

impl ExactSolution for Quadratic {
    fn value(&self, p: Point) -> f64 {
        p[0] * p[0] + p[1] * p[1]
    }

    fn gradient(&self, p: Point) -> [f64; 2] {
        [2.0 * p[0], 2.0 * p[1]]
    }

    fn hessian(&self, _: Point) -> [f64; 3] {
        [2.0, 0.0, 2.0]
    }
}

/// `x + y`, zero load.
#[derive(Debug, Clone, Copy, Default)]
pub struct Linear;

impl ExactSolution for Linear {
    fn value(&self, p: Point) -> f64 {
        p[0] + p[1]
    }

    fn gradient(&self, _: Point) -> [f64; 2] {
        [1.0, 1.0]
    }

    fn hessian(&self, _: Point) -> [f64; 3] {
        [0.0; 3]
    }
}

/// Exact solution together with its load; boundary data is the trace of the
/// exact solution.
#[derive(Clone)]
pub struct Problem {
    pub name: String,
    pub exact: Arc<dyn ExactSolution>,
    pub source: ScalarFn,
}

impl std::fmt::Debug for Problem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Problem")
            .field("name", &self.name)
            .finish_non_exhaustive()
    }
}

/// Problem identifiers accepted by [`Problem::by_name`].
pub const PROBLEM_NAMES: [&str; 3] = ["sinsin", "poly-patch", "linear"];

impl Problem {
    pub fn sinsin() -> Self {
        Self {
            name: "sinsin".into(),
            exact: Arc::new(SinSin),
            source: Arc::new(|p: Point| 2.0 * PI * PI * (PI * p[0]).sin() * (PI * p[1]).sin()),
        }
    }

    pub fn quadratic() -> Self {
        Self {
            name: "poly-patch".into(),
            exact: Arc::new(Quadratic),
            source: Arc::new(|_| -4.0),
        }
    }

    pub fn linear() -> Self {
        Self {
            name: "linear".into(),
            exact: Arc::new(Linear),
            source: Arc::new(|_| 0.0),
        }
    }

    /// User-supplied solution and load.
    pub fn custom(
        name: impl Into<String>,
        exact: Arc<dyn ExactSolution>,
        source: ScalarFn,
    ) -> Self {
        Self {
            name: name.into(),
            exact,
            source,
        }
    }

    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "sinsin" => Ok(Self::sinsin()),
            "poly-patch" | "quadratic" => Ok(Self::quadratic()),
            "linear" => Ok(Self::linear()),
            other => Err(Error::InvalidConfig(format!(
                "unknown problem `{other}` (expected one of {})",
                PROBLEM_NAMES.join(", ")
            ))),
        }
    }

    /// `config` with this problem's load and boundary data.
    pub fn apply(&self, config: SchemeConfig) -> SchemeConfig {
        let exact = Arc::clone(&self.exact);
        SchemeConfig {
            source: Arc::clone(&self.source),
            dirichlet: Arc::new(move |p| exact.value(p)),
            ..config
        }
    }
}
