use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeoError {
    #[error("isometry is not hyperbolic (|tr| = {trace})")]
    NotHyperbolic { trace: f64 },
    #[error("geodesic endpoints coincide")]
    EqualEndpoints,
    #[error("invalid point: {0}")]
    InvalidPoint(String),
    #[error("conjugacy class of the identity")]
    TrivialClass,
    #[error("genus must be at least 2, got {0}")]
    Genus(usize),
    #[error("relation residual {residual:e} exceeds {limit:e}")]
    RelationResidual { residual: f64, limit: f64 },
    #[error("enumeration cap of {cap} elements exceeded at radius {radius}")]
    CapExceeded { cap: usize, radius: f64, partial: usize },
    #[error("t = {t} outside the enumerated range (t_max = {t_max})")]
    OutOfRange { t: f64, t_max: f64 },
    #[error("flow box arcs overlap: aperture {theta} too large")]
    ApertureTooLarge { theta: f64 },
    #[error("orbit ball radius {have} below the required {need}")]
    BallTooSmall { have: f64, need: f64 },
    #[error("boundary arcs overlap")]
    OverlappingArcs,
    #[error("grid misaligned: (T - b)/eps = {0} is not an integer")]
    GridMisaligned(f64),
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),
    #[error("quadrature did not converge: error {error:e} on value {value:e}")]
    Quadrature { value: f64, error: f64 },
    #[error("cannot parse word: {0}")]
    WordParse(String),
}

pub type Result<T, E = GeoError> = std::result::Result<T, E>;
