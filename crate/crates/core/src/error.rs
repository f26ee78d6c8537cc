use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("line {line}: {source}")]
    AtLine {
        line: usize,
        #[source]
        source: Box<Error>,
    },
    #[error("face {face} has {count} vertices, only triangles are supported")]
    NonTriangle { face: usize, count: usize },
    #[error("face {face} references vertex {index} but the mesh has {vertex_count} vertices")]
    IndexOutOfRange {
        face: usize,
        index: usize,
        vertex_count: usize,
    },
    #[error("edge ({a}, {b}) is shared by more than two faces (face {face})")]
    NonManifoldEdge { face: usize, a: usize, b: usize },
    #[error("edge ({a}, {b}) is traversed twice in the same direction (face {face}); orientation is inconsistent")]
    InconsistentOrientation { face: usize, a: usize, b: usize },
    #[error("edge ({a}, {b}) of face {face} lies on an open boundary")]
    OpenBoundary { face: usize, a: usize, b: usize },
    #[error("vertex {vertex} is not a manifold vertex (its faces form more than one fan)")]
    NonManifoldVertex { vertex: usize },
    #[error("vertex {vertex} is not referenced by any face")]
    UnreferencedVertex { vertex: usize },
    #[error("face {face} is degenerate (zero area or collinear corners)")]
    DegenerateFace { face: usize },
    #[error("Euler characteristic {chi} is odd; a closed oriented surface must have an even one")]
    OddEulerCharacteristic { chi: i64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("operator is not hermitian")]
    NotHermitian,
    #[error("eigensolver did not converge after {iterations} iterations (last residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("requested {requested} eigenpairs but the operator has dimension {dimension}")]
    TooManyEigenpairs { requested: usize, dimension: usize },
    #[error("matrix is not positive definite (pivot {pivot} at row {row})")]
    NotPositiveDefinite { row: usize, pivot: f64 },
    #[error("linear system is singular")]
    SingularSystem,
    #[error("curvature fit at vertex {vertex} is rank deficient")]
    RankDeficientFit { vertex: usize },
    #[error("field does not belong to this mesh")]
    MeshMismatch,
    #[error("meshes have different connectivity")]
    ConnectivityMismatch,
    #[error("meshes are not isometric: edge ({a}, {b}) has relative length error {relative_error:e}")]
    IsometryViolation {
        a: usize,
        b: usize,
        relative_error: f64,
    },
    #[error("quadratic differential vanishes on the link of vertex {vertex}")]
    VanishingOnLink { vertex: usize },
    #[error("point set is degenerate (collinear); rotation is not determined")]
    DegenerateCovariance,
    #[error("linear program failed: {0}")]
    LinearProgram(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn at_line(self, line: usize) -> Self {
        Error::AtLine {
            line,
            source: Box::new(self),
        }
    }
}
