use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("series did not converge within {cap} terms ({context})")]
    NonConvergence { cap: usize, context: String },
    #[error("argument outside the domain: {0}")]
    DomainError(String),
    #[error("initial data inconsistent with samples: {0}")]
    InconsistentInitialData(String),
    #[error("symbol is singular at {at:?} (|det| = {det:e})")]
    SingularSymbol { at: Vec<f64>, det: f64 },
    #[error("validation failed: {0}")]
    ValidationFailed(String),
    #[error("field is in the wrong space: expected {expected}")]
    WrongSpace { expected: &'static str },
    #[error("symbol evaluation failed at {at:?}: {reason}")]
    SymbolEvaluationError { at: Vec<f64>, reason: String },
    #[error("symbol kernel is not resolved by the grid (tail mass {tail:e})")]
    UnresolvedSymbol { tail: f64 },
    #[error("evaluation point {0} lies on the branch cut (-inf, 0)")]
    BranchCut(String),
    #[error("disk of radius {radius} around {center} touches the branch cut")]
    DiskTouchesCut { center: String, radius: f64 },
    #[error("bad exponent sequence: {0}")]
    BadExponents(String),
    #[error("admissible interval is empty: {0}")]
    EmptyInterval(String),
    #[error("pencil is singular at lambda = {0}")]
    PencilSingular(String),
    #[error("quadrature under-resolved: node doubling shifted the result by {shift:e}")]
    QuadratureUnderResolved { shift: f64 },
    #[error("polynomial root {0} left the sampled resolvent region")]
    RootEscape(String),
    #[error("lambda0 = {0} is not in the resolvent set")]
    NotResolvent(String),
    #[error("unknown model '{name}'; valid models: {valid}")]
    UnknownModel { name: String, valid: String },
    #[error("bad model parameters: {0}")]
    BadParams(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("json error: {0}")]
    Json(String),
}

impl Error {
    /// Numerical failures map to CLI exit code 3, configuration problems to 2.
    pub fn is_numerical(&self) -> bool {
        !matches!(
            self,
            Error::UnknownModel { .. } | Error::BadParams(_) | Error::Config(_) | Error::Io(_) | Error::Json(_)
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
