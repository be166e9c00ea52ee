//! Reduced-stabilization hybridized discontinuous Galerkin (HDG) solver for
//! the Poisson problem `-Δu = f` on triangulated polygonal domains.
//!
//! The element unknown is a polynomial of degree `k` on every triangle and the
//! hybrid (skeleton) unknown a polynomial of degree `k - 1` on every edge. Only
//! the `P_{k-1}` projection of the trace mismatch is penalized, which on an edge
//! is exactly what a `k`-point Gauss–Legendre rule sees.
//!
//! Modules:
//! - [`mesh`]: triangle meshes, refinement, quality, text I/O.
//! - [`basis`]: quadrature rules, element and edge bases, edge projections.
//! - [`linsolve`]: dense LU, CSR storage, Krylov solvers.
//! - [`hdg`]: local assembly, static condensation, global solve, fluxes.
//! - [`crfem`]: Crouzeix–Raviart P1 solver and edge-mean comparison.
//! - [`norms`]: mesh-dependent error norms and convergence orders.
//! - [`study`], [`checks`]: convergence studies and invariant suites used by the CLI.

pub mod basis;
pub mod checks;
pub mod crfem;
mod error;
pub mod hdg;
pub mod linsolve;
pub mod mesh;
pub mod norms;
pub mod problems;
pub mod study;

pub use error::{Error, Result};
