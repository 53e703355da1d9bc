//! Command-line experiments for variational Gibbs state preparation.
//!
//! [`config`] resolves a flat key/value configuration, [`experiments`] runs the
//! training grids and analytic checks, and [`output`] writes CSV tables plus a
//! JSON metadata file. The binary in `main.rs` only parses flags.

// `!(x > 0.0)` deliberately rejects NaN along with nonpositive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod experiments;
pub mod output;

pub use config::{ExperimentConfig, ExperimentId};
pub use error::{CliError, Result};
pub use experiments::{run, Check, Report};
pub use output::{write_report, ResultRow, Table};

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "THERMOVAR_THREADS";

/// Installs the global thread pool sized by [`THREADS_ENV`], if set.
pub fn init_thread_pool() -> Result<()> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .map_err(|_| CliError::Config(format!("{THREADS_ENV} must be a positive integer, got '{value}'")))?;
    if threads == 0 {
        return Err(CliError::Config(format!("{THREADS_ENV} must be >= 1")));
    }
    rayon::ThreadPoolBuilder::new().num_threads(threads).build_global()?;
    Ok(())
}
