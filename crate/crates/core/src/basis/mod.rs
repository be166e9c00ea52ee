//! Quadrature rules and polynomial bases on the reference edge and triangle.

mod edge;
mod quadrature;
mod triangle;

pub use edge::{
    legendre, orthonormal_legendre, project_edge, reduced_edge_mass, EdgeBasis, EdgeSpace,
    LagrangeEdgeBasis,
};
pub use quadrature::{
    gauss_legendre, tri_quadrature, EdgeRule, QuadratureRule, TriangleRule, MAX_GAUSS_POINTS,
    MAX_TRIANGLE_DEGREE,
};
pub use triangle::{AffineMap, TriBasis};
