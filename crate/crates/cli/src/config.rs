use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use covering_core::sequences::{validate_lengths, EpsilonWindow};
use covering_core::shepp::DEFAULT_QUADRATURE_CAP;
use covering_core::LengthSequence;

use crate::error::CliError;
use crate::output::Format;
use crate::seqspec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Exact product integral of the pair factors
    Integrate,
    /// Lower-bound certificate C · exp(Σ ln g_eps(l_k))
    Bound,
    /// Product integral and certificate at checkpoints
    Divergence,
    /// Partial sums of Σ n⁻² exp(l_1 + … + l_n)
    Criterion,
    /// Randomized Chebyshev-inequality trials
    InequalityCheck,
    /// Monte Carlo coverage probability
    Simulate,
    /// Two-point uncovered probability, exact and Monte Carlo
    PairProbe,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Integrate => "integrate",
            Command::Bound => "bound",
            Command::Divergence => "divergence",
            Command::Criterion => "criterion",
            Command::InequalityCheck => "inequality-check",
            Command::Simulate => "simulate",
            Command::PairProbe => "pair-probe",
        }
    }
}

/// Reproducible batch runs over random circle coverings.
///
/// Sequences are given as `family:key=value,...`, for example
/// `harmonic:c=1,cap=0.99` or `explicit:file=lengths.txt`.
#[derive(Debug, Clone, Parser)]
#[command(name = "covering-lab", version)]
pub struct RunConfig {
    #[arg(value_enum)]
    pub command: Command,
    /// Arc-length sequence specification
    #[arg(long = "seq", value_name = "SPEC")]
    pub sequence_spec: Option<String>,
    /// Threshold eps; pair factors need eps < 1 - l_1
    #[arg(long)]
    pub eps: Option<f64>,
    /// Number of terms / arcs
    #[arg(long = "n")]
    pub n: Option<usize>,
    /// Comma-separated ascending list of n values
    #[arg(long, value_delimiter = ',')]
    pub checkpoints: Vec<usize>,
    /// Monte Carlo replications
    #[arg(long)]
    pub reps: Option<u64>,
    /// Master seed; never read from the environment
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of random families for inequality-check
    #[arg(long)]
    pub trials: Option<u64>,
    /// Second probe point for pair-probe
    #[arg(long = "t")]
    pub t: Option<f64>,
    /// Largest family size drawn by inequality-check
    #[arg(long, default_value_t = 10)]
    pub max_n: usize,
    /// Largest number of linear pieces drawn by inequality-check
    #[arg(long, default_value_t = 6)]
    pub max_segments: usize,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Write to this file instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Largest n evaluated by exact quadrature in `divergence`
    #[arg(long, default_value_t = DEFAULT_QUADRATURE_CAP)]
    pub quadrature_cap: usize,
    /// Worker threads (default: available cores)
    #[arg(long)]
    pub threads: Option<usize>,
}

/// A fully validated unit of work.
#[derive(Debug, Clone)]
pub enum Job {
    Integrate {
        seq: LengthSequence,
        eps: f64,
        n: usize,
    },
    Bound {
        seq: LengthSequence,
        eps: f64,
        n: usize,
    },
    Divergence {
        seq: LengthSequence,
        eps: f64,
        checkpoints: Vec<usize>,
        quadrature_cap: usize,
    },
    Criterion {
        seq: LengthSequence,
        n: usize,
        checkpoints: Vec<usize>,
    },
    InequalityCheck {
        trials: u64,
        seed: u64,
        max_n: usize,
        max_segments: usize,
    },
    Simulate {
        seq: LengthSequence,
        n: usize,
        reps: u64,
        seed: u64,
    },
    PairProbe {
        lengths: Vec<f64>,
        t: f64,
        reps: u64,
        seed: u64,
    },
}

fn required<T: Copy>(value: Option<T>, flag: &str, command: Command) -> Result<T, CliError> {
    value.ok_or_else(|| {
        CliError::Validation(format!("`{}` requires --{flag}", command.name()))
    })
}

impl RunConfig {
    fn sequence(&self) -> Result<LengthSequence, CliError> {
        let spec = self.sequence_spec.as_deref().ok_or_else(|| {
            CliError::Validation(format!("`{}` requires --seq", self.command.name()))
        })?;
        seqspec::parse(spec).map_err(|e| CliError::Validation(format!("--seq: {e}")))
    }

    fn positive_n(&self) -> Result<usize, CliError> {
        match required(self.n, "n", self.command)? {
            0 => Err(CliError::Validation("--n must be at least 1".into())),
            n => Ok(n),
        }
    }

    fn positive_reps(&self) -> Result<u64, CliError> {
        match required(self.reps, "reps", self.command)? {
            0 => Err(CliError::Validation("--reps must be at least 1".into())),
            r => Ok(r),
        }
    }

    fn window(&self, seq: &LengthSequence) -> Result<f64, CliError> {
        let eps = required(self.eps, "eps", self.command)?;
        let l1 = seq
            .first()
            .map_err(|e| CliError::Validation(format!("--seq: {e}")))?;
        EpsilonWindow::from_first_length(l1, eps)
            .map_err(|e| CliError::Validation(format!("--eps: {e}")))?;
        Ok(eps)
    }

    fn checked_prefix(seq: &LengthSequence, n: usize) -> Result<(), CliError> {
        if let LengthSequence::Explicit(values) = seq {
            if values.len() < n {
                return Err(CliError::Validation(format!(
                    "--n: explicit sequence has {} values, {n} requested",
                    values.len()
                )));
            }
            validate_lengths(&values[..n]).map_err(|e| CliError::Validation(format!("--seq: {e}")))?;
        }
        Ok(())
    }

    fn ascending(checkpoints: &[usize]) -> Result<(), CliError> {
        if checkpoints.windows(2).any(|w| w[1] <= w[0]) {
            return Err(CliError::Validation(
                "--checkpoints must be strictly ascending".into(),
            ));
        }
        Ok(())
    }

    /// Checks every field the command uses.
    pub fn validate(&self) -> Result<Job, CliError> {
        if self.threads == Some(0) {
            return Err(CliError::Validation("--threads must be at least 1".into()));
        }
        let job = match self.command {
            Command::Integrate | Command::Bound => {
                let seq = self.sequence()?;
                let n = self.positive_n()?;
                Self::checked_prefix(&seq, n)?;
                let eps = self.window(&seq)?;
                if self.command == Command::Integrate {
                    Job::Integrate { seq, eps, n }
                } else {
                    if eps >= 0.5 {
                        return Err(CliError::Validation(format!(
                            "--eps: bound requires eps < 1/2, got {eps}"
                        )));
                    }
                    Job::Bound { seq, eps, n }
                }
            }
            Command::Divergence => {
                let seq = self.sequence()?;
                if self.checkpoints.is_empty() {
                    return Err(CliError::Validation("`divergence` requires --checkpoints".into()));
                }
                Self::ascending(&self.checkpoints)?;
                Self::checked_prefix(&seq, *self.checkpoints.last().expect("nonempty"))?;
                let eps = self.window(&seq)?;
                if eps >= 0.5 {
                    return Err(CliError::Validation(format!(
                        "--eps: divergence requires eps < 1/2, got {eps}"
                    )));
                }
                Job::Divergence {
                    seq,
                    eps,
                    checkpoints: self.checkpoints.clone(),
                    quadrature_cap: self.quadrature_cap,
                }
            }
            Command::Criterion => {
                let seq = self.sequence()?;
                let n = self.positive_n()?;
                Self::checked_prefix(&seq, n)?;
                Self::ascending(&self.checkpoints)?;
                if let Some(&bad) = self.checkpoints.iter().find(|&&c| c == 0 || c > n) {
                    return Err(CliError::Validation(format!(
                        "--checkpoints: {bad} is outside 1..={n}"
                    )));
                }
                Job::Criterion {
                    seq,
                    n,
                    checkpoints: self.checkpoints.clone(),
                }
            }
            Command::InequalityCheck => {
                let trials = required(self.trials, "trials", self.command)?;
                let seed = required(self.seed, "seed", self.command)?;
                if self.max_n == 0 || self.max_segments == 0 {
                    return Err(CliError::Validation(
                        "--max-n and --max-segments must be at least 1".into(),
                    ));
                }
                Job::InequalityCheck {
                    trials,
                    seed,
                    max_n: self.max_n,
                    max_segments: self.max_segments,
                }
            }
            Command::Simulate => {
                let seq = self.sequence()?;
                let n = self.positive_n()?;
                Self::checked_prefix(&seq, n)?;
                Job::Simulate {
                    seq,
                    n,
                    reps: self.positive_reps()?,
                    seed: required(self.seed, "seed", self.command)?,
                }
            }
            Command::PairProbe => {
                let seq = self.sequence()?;
                let n = self.positive_n()?;
                Self::checked_prefix(&seq, n)?;
                let lengths = seq
                    .generate(n)
                    .map_err(|e| CliError::Validation(format!("--seq: {e}")))?;
                let t = required(self.t, "t", self.command)?;
                if !(t > 0.0 && t < 1.0 - lengths[0]) {
                    return Err(CliError::Validation(format!(
                        "--t: t = {t} must lie in (0, 1 - l_1) = (0, {})",
                        1.0 - lengths[0]
                    )));
                }
                Job::PairProbe {
                    lengths,
                    t,
                    reps: self.positive_reps()?,
                    seed: required(self.seed, "seed", self.command)?,
                }
            }
        };
        Ok(job)
    }
}
