use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("potential does not have zero mean: residual {residual:e}")]
    MeanViolation { residual: f64 },
    #[error("profile on edge {edge} leaves [0, 1]: {detail}")]
    SupportViolation { edge: usize, detail: String },
    #[error("malformed potential: {0}")]
    InvalidPotential(String),
    #[error("resonant scaling requested but A = 0")]
    ResonantWithZeroA,
    #[error("theta values on edges {i} and {j} coincide ({value})")]
    DegenerateTheta { i: usize, j: usize, value: f64 },
    #[error("evaluation at a resolvent pole: |denominator| = {denominator:e}")]
    AtPole { denominator: f64 },
    #[error("singular linear system: {0}")]
    SingularSystem(String),
    #[error("B vanishes (all theta equal) while beta != 0")]
    ZeroB,
    #[error("quadrature for {quantity} did not converge: relative change {rel_change:e} under order doubling")]
    QuadratureNotConverged { quantity: &'static str, rel_change: f64 },
    #[error("{count} sign changes of the pole function in [{lo}, {hi}]")]
    MultipleSignChanges { count: usize, lo: f64, hi: f64 },
    #[error("root finder stalled: residual {residual:e} at kappa = {kappa}")]
    RootNotConverged { kappa: f64, residual: f64 },
    #[error("degenerate Fredholm equation at k = {k}: |1 - D| = {denominator:e}")]
    FredholmSingular { k: f64, denominator: f64 },
    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("tolerance check failed: {0}")]
    ToleranceFailure(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Variant name, e.g. `MeanViolation`.
    pub fn kind(&self) -> String {
        let debug = format!("{self:?}");
        debug.split(|c: char| !c.is_alphanumeric()).next().unwrap_or_default().to_string()
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::MeanViolation { .. }
            | Error::SupportViolation { .. }
            | Error::InvalidPotential(_)
            | Error::ResonantWithZeroA
            | Error::DegenerateTheta { .. }
            | Error::InvalidArgument(_)
            | Error::Config(_)
            | Error::Json(_)
            | Error::Io(_) => 2,
            Error::ToleranceFailure(_) => 4,
            _ => 3,
        }
    }
}
