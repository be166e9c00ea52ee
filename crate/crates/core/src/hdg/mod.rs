//! Hybridized DG discretization: configuration, element-local assembly,
//! static condensation, the global skeleton solve and post-processing.

mod global;
mod local;
mod post;

use std::fmt;
use std::sync::Arc;

pub use global::{
    assemble_full_dense, assemble_skeleton, solve, solve_with, FullSystem, HybridDofs,
    SkeletonSystem,
};
pub use local::{condense, local_assemble, Condensed, LocalAssembler, LocalSystem};
pub use post::{
    full_residual, local_conservation_residual, max_conservation_residual, numerical_flux,
    HdgSolution,
};

use crate::basis::{EdgeBasis, EdgeSpace, LagrangeEdgeBasis};
use crate::mesh::Point;
use crate::{Error, Result};

/// Scalar field on the plane, shared across threads.
pub type ScalarFn = Arc<dyn Fn(Point) -> f64 + Send + Sync>;

pub fn scalar_fn(f: impl Fn(Point) -> f64 + Send + Sync + 'static) -> ScalarFn {
    Arc::new(f)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    /// `P^k` elements, `P^{k-1}` hybrid, projected stabilization.
    Reduced,
    /// `P^k` elements, `P^k` hybrid, full stabilization.
    Standard,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::Reduced => "reduced",
            Scheme::Standard => "standard",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HybridContinuity {
    Discontinuous,
    /// Hybrid unknowns share values at mesh vertices.
    Continuous,
}

/// How the reduced stabilization `⟨τ P(û-u), P(v̂-v)⟩` is integrated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StabilizationRoute {
    /// `k`-point Gauss–Legendre rule applied to the raw traces.
    #[default]
    GaussLegendre,
    /// Explicit Legendre projections of both traces onto `P^{k-1}`.
    ExplicitProjection,
}

#[derive(Clone)]
pub struct SchemeConfig {
    pub k: usize,
    pub scheme: Scheme,
    pub hybrid: HybridContinuity,
    /// Adjoint parameter.
    pub s: f64,
    /// Stabilization is `τ = tau0 / h_e` on every edge.
    pub tau0: f64,
    pub dirichlet: ScalarFn,
    pub source: ScalarFn,
    /// Exactness degree of the element load quadrature.
    pub load_degree: usize,
    pub route: StabilizationRoute,
}

impl fmt::Debug for SchemeConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SchemeConfig")
            .field("k", &self.k)
            .field("scheme", &self.scheme)
            .field("hybrid", &self.hybrid)
            .field("s", &self.s)
            .field("tau0", &self.tau0)
            .field("load_degree", &self.load_degree)
            .field("route", &self.route)
            .finish_non_exhaustive()
    }
}

impl SchemeConfig {
    /// Reduced, discontinuous, symmetric (`s = 1`) scheme with `tau0 = 10 k²`,
    /// zero load and zero boundary data.
    pub fn new(k: usize) -> Self {
        Self {
            k,
            scheme: Scheme::Reduced,
            hybrid: HybridContinuity::Discontinuous,
            s: 1.0,
            tau0: default_tau0(k),
            dirichlet: scalar_fn(|_| 0.0),
            source: scalar_fn(|_| 0.0),
            load_degree: 2 * k + 2,
            route: StabilizationRoute::default(),
        }
    }

    pub fn with_scheme(mut self, scheme: Scheme) -> Self {
        self.scheme = scheme;
        self
    }

    pub fn with_hybrid(mut self, hybrid: HybridContinuity) -> Self {
        self.hybrid = hybrid;
        self
    }

    pub fn with_s(mut self, s: f64) -> Self {
        self.s = s;
        self
    }

    pub fn with_tau0(mut self, tau0: f64) -> Self {
        self.tau0 = tau0;
        self
    }

    pub fn with_source(mut self, f: impl Fn(Point) -> f64 + Send + Sync + 'static) -> Self {
        self.source = Arc::new(f);
        self
    }

    pub fn with_dirichlet(mut self, g: impl Fn(Point) -> f64 + Send + Sync + 'static) -> Self {
        self.dirichlet = Arc::new(g);
        self
    }

    pub fn with_route(mut self, route: StabilizationRoute) -> Self {
        self.route = route;
        self
    }

    /// Degree of the hybrid space: `k - 1` (reduced) or `k` (standard).
    pub fn hybrid_degree(&self) -> usize {
        match self.scheme {
            Scheme::Reduced => self.k - 1,
            Scheme::Standard => self.k,
        }
    }

    pub fn edge_space(&self) -> EdgeSpace {
        let l = self.hybrid_degree();
        match self.hybrid {
            HybridContinuity::Discontinuous => EdgeSpace::Modal(EdgeBasis::new(l)),
            HybridContinuity::Continuous => EdgeSpace::Nodal(LagrangeEdgeBasis::new(l)),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidConfig(
                "element degree k must be at least 1".into(),
            ));
        }
        if self.k > 6 {
            return Err(Error::InvalidConfig(format!(
                "element degree k = {} exceeds the supported maximum 6",
                self.k
            )));
        }
        if !(self.tau0 > 0.0 && self.tau0.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "tau0 must be positive, got {}",
                self.tau0
            )));
        }
        if !self.s.is_finite() {
            return Err(Error::InvalidConfig("s must be finite".into()));
        }
        if self.hybrid == HybridContinuity::Continuous && self.hybrid_degree() == 0 {
            return Err(Error::InvalidConfig(
                "a continuous hybrid space needs hybrid degree >= 1 (use k >= 2 with the reduced scheme)".into(),
            ));
        }
        if self.load_degree > crate::basis::MAX_TRIANGLE_DEGREE {
            return Err(Error::InvalidConfig(format!(
                "load quadrature degree {} too high",
                self.load_degree
            )));
        }
        Ok(())
    }

    pub(crate) fn describe(&self) -> String {
        format!(
            "k = {}, scheme = {}, hybrid = {:?}, s = {}, tau0 = {}",
            self.k, self.scheme, self.hybrid, self.s, self.tau0
        )
    }
}

pub fn default_tau0(k: usize) -> f64 {
    10.0 * (k * k) as f64
}
