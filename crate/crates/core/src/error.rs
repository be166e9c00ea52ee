use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{msg}, line {line}")]
    Parse { line: usize, msg: String },

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("degenerate triangle {0} (zero area)")]
    DegenerateTriangle(usize),

    #[error("mesh generation failed: {0}")]
    MeshGeneration(String),

    #[error("{what} out of range: {value}")]
    OutOfRange { what: &'static str, value: usize },

    #[error("singular matrix: pivot {pivot} below threshold ({magnitude:e})")]
    Singular { pivot: usize, magnitude: f64 },

    #[error("singular element block on element {element} (pivot {pivot}); tau0 too small or degenerate geometry")]
    SingularElement { element: usize, pivot: usize },

    #[error(
        "solver did not converge after {iterations} iterations (relative residual {residual:e})"
    )]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("negative curvature in CG at iteration {iteration}: operator is not positive definite, increase tau0")]
    NegativeCurvature { iteration: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("point ({x}, {y}) is not on edge {edge}")]
    PointOffEdge { edge: usize, x: f64, y: f64 },

    #[error("edge {edge} is not a side of element {element}")]
    EdgeNotOnElement { element: usize, edge: usize },

    #[error("mismatched meshes: {0}")]
    MeshMismatch(String),

    #[error("unknown check suite `{0}`")]
    UnknownSuite(String),

    #[error("linear solve failed ({params}): {source}; {hint}")]
    Solve {
        params: String,
        hint: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("level {level}: {source}")]
    Level {
        level: usize,
        #[source]
        source: Box<Error>,
    },
}
