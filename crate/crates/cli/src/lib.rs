//! Command-line front end: validates a [`RunConfig`], runs it on a sized
//! thread pool and renders the result as CSV or JSON.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod seqspec;

use std::fs;

pub use config::{Command, Job, RunConfig};
pub use error::CliError;
pub use output::{Document, Format};

/// Validates, runs and renders; identical configs give identical text.
pub fn render(config: &RunConfig) -> Result<String, CliError> {
    let job = config.validate()?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(threads) = config.threads {
        pool = pool.num_threads(threads);
    }
    let pool = pool
        .build()
        .map_err(|e| CliError::Runtime(format!("cannot start thread pool: {e}")))?;
    let doc = pool.install(|| commands::run_job(config, &job))?;
    Ok(doc.render(config.format))
}

/// [`render`], then write to `--out` or stdout.
pub fn execute(config: &RunConfig) -> Result<(), CliError> {
    let text = render(config)?;
    match &config.out {
        Some(path) => fs::write(path, text)
            .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
