use thiserror::Error;

/// Errors raised by the library. `is_config` separates input validation
/// failures from numerical failures.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    Geometry(String),
    #[error("invalid depth: {0}")]
    Depth(String),
    #[error("h_eq profile is not even: asymmetry {asymmetry:e} exceeds {tolerance:e}")]
    NotEven { asymmetry: f64, tolerance: f64 },
    #[error("invalid h_eq profile: {0}")]
    Profile(String),
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("grid mismatch between states")]
    GridMismatch,
    #[error("grid too coarse: {cells} cells on a side, need at least {min}")]
    GridTooCoarse { cells: usize, min: usize },
    #[error("operation requires a symmetric configuration (L = L'), got L = {big_l}, L' = {l_prime}")]
    Asymmetric { big_l: f64, l_prime: f64 },
    #[error("omega = 0 is not admissible (0 lies in the resolvent set)")]
    ZeroFrequency,
    #[error("bracket exhaustion: found {found} of {requested} roots in (0, {upper}]")]
    BracketExhaustion { found: usize, requested: usize, upper: f64 },
    #[error("not a root: 2x2 branch system has full rank at omega = {omega}")]
    NotARoot { omega: f64 },
    #[error("double eigenvalue suspected at omega = {omega}: branch system has rank 0")]
    DoubleEigenvalue { omega: f64 },
    #[error("normalization mismatch: closed form {closed:e} vs quadrature {quadrature:e}")]
    Normalization { closed: f64, quadrature: f64 },
    #[error("quadrature did not converge: {0}")]
    Quadrature(String),
    #[error("singular linear system: {0}")]
    Singular(String),
    #[error("mode set is not orthonormal: Gram deviation {deviation:e}")]
    NotOrthonormal { deviation: f64 },
    #[error("time step must be positive, got {0}")]
    TimeStep(f64),
    #[error("control horizon {tau} s does not exceed the minimal horizon {tau0} s")]
    HorizonTooShort { tau: f64, tau0: f64 },
    #[error("Gram matrix ill-conditioned: condition number {cond:e} above {limit:e}; try fewer modes")]
    IllConditioned { cond: f64, limit: f64 },
    #[error("target not in W: {0}")]
    TargetNotInW(String),
    #[error("state is not symmetric: antisymmetric norm {0:e}")]
    NotSymmetric(f64),
    #[error("CFL violation: dt = {dt} exceeds limit {limit}")]
    Cfl { dt: f64, limit: f64 },
    #[error("touchdown: object bottom reaches the tank floor (min h_w = {0})")]
    Touchdown(f64),
    #[error("drying: water depth {depth} at x = {x}")]
    Drying { depth: f64, x: f64 },
    #[error("shock formation suspected at t = {t}: compression ratio {ratio}")]
    Shock { t: f64, ratio: f64 },
    #[error("non-finite value encountered: {0}")]
    NonFinite(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// True for input validation failures (CLI exit code 2).
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Geometry(_)
                | Error::Depth(_)
                | Error::NotEven { .. }
                | Error::Profile(_)
                | Error::Argument(_)
                | Error::GridTooCoarse { .. }
                | Error::Asymmetric { .. }
                | Error::HorizonTooShort { .. }
                | Error::TargetNotInW(_)
                | Error::NotSymmetric(_)
                | Error::Parse(_)
                | Error::GridMismatch
                | Error::TimeStep(_)
        )
    }

    /// Short machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Geometry(_) => "geometry",
            Error::Depth(_) => "depth",
            Error::NotEven { .. } => "not_even",
            Error::Profile(_) => "profile",
            Error::Argument(_) => "argument",
            Error::GridMismatch => "grid_mismatch",
            Error::GridTooCoarse { .. } => "grid_too_coarse",
            Error::Asymmetric { .. } => "asymmetric",
            Error::ZeroFrequency => "zero_frequency",
            Error::BracketExhaustion { .. } => "bracket_exhaustion",
            Error::NotARoot { .. } => "not_a_root",
            Error::DoubleEigenvalue { .. } => "double_eigenvalue",
            Error::Normalization { .. } => "normalization",
            Error::Quadrature(_) => "quadrature",
            Error::Singular(_) => "singular",
            Error::NotOrthonormal { .. } => "not_orthonormal",
            Error::TimeStep(_) => "time_step",
            Error::HorizonTooShort { .. } => "horizon_too_short",
            Error::IllConditioned { .. } => "ill_conditioned",
            Error::TargetNotInW(_) => "target_not_in_w",
            Error::NotSymmetric(_) => "not_symmetric",
            Error::Cfl { .. } => "cfl",
            Error::Touchdown(_) => "touchdown",
            Error::Drying { .. } => "drying",
            Error::Shock { .. } => "shock",
            Error::NonFinite(_) => "non_finite",
            Error::Parse(_) => "parse",
            Error::Io(_) => "io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
