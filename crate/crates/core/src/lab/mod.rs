//! Configuration-driven experiments: constants, spectra, convergence rates and
//! finite-difference cross-checks, each emitted as a CSV table plus a JSON summary.

mod commands;
mod config;
mod fit;
mod hs;
mod output;

pub use commands::{
    cmd_constants, cmd_converge, cmd_oracle, cmd_spectrum, ConstantsReport, ConvergeReport, ConvergeRow, OracleCheck,
    OracleReport, SpectrumReport, SpectrumRow,
};
pub use config::{ExperimentConfig, OracleConfig, OutputConfig, QuadratureConfig, Tolerances};
pub use fit::RateFit;
pub use hs::{hs_distance, hs_truncation, HsDistance};
pub use output::{write_report, Report};

use crate::error::{Error, Result};

/// Run `f` on a dedicated pool of `threads` workers, or on the global pool.
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(f()),
        Some(0) => Err(Error::Config("--parallel must be at least 1".into())),
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| Error::Config(format!("cannot start thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}
