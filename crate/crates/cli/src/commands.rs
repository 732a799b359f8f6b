//! Dispatch from a validated [`Job`] to the core routines.
//!
//! Column order per command:
//!
//! | command            | columns |
//! |--------------------|---------|
//! | `integrate`        | n, eps, value, log_value, segment_count, nodes_per_segment |
//! | `bound`            | n, eps, m, log_c, g_log_sum, bound_log, chebyshev_lower_bound |
//! | `divergence`       | n, log_product_integral, bound_log, g_log_sum |
//! | `criterion`        | n, log_term, partial_sum, log_partial_sum |
//! | `inequality-check` | trial, n, lhs, rhs, margin, holds |
//! | `simulate`         | seed, replications, n_arcs, covered_count, p_hat, std_err |
//! | `pair-probe`       | t, exact, seed, replications, n_arcs, hits, p_hat, std_err, z_score |

use rayon::prelude::*;

use covering_core::chebyshev::{check_inequality, random_trial_family};
use covering_core::covering::{coverage_probability, pair_uncovered_exact, pair_uncovered_mc};
use covering_core::shepp::{
    chebyshev_lower_bound, criterion_partial_sums, divergence_table, product_integral,
    shepp_lower_bound,
};

use crate::config::{Job, RunConfig};
use crate::error::CliError;
use crate::output::{Cell, Document};

impl RunConfig {
    /// Every setting that can influence the output. Thread count and output
    /// path are left out so they cannot change the bytes written.
    pub fn echo(&self) -> Vec<(&'static str, Cell)> {
        let opt_int = |v: Option<u64>| v.map_or(Cell::Absent, Cell::Int);
        vec![
            ("seq", self.sequence_spec.as_deref().map_or(Cell::Absent, Cell::from)),
            ("eps", self.eps.into()),
            ("n", opt_int(self.n.map(|n| n as u64))),
            (
                "checkpoints",
                Cell::Text(
                    self.checkpoints
                        .iter()
                        .map(ToString::to_string)
                        .collect::<Vec<_>>()
                        .join(";"),
                ),
            ),
            ("reps", opt_int(self.reps)),
            ("seed", opt_int(self.seed)),
            ("trials", opt_int(self.trials)),
            ("t", self.t.into()),
            ("max_n", self.max_n.into()),
            ("max_segments", self.max_segments.into()),
            ("quadrature_cap", self.quadrature_cap.into()),
            ("format", Cell::from(match self.format {
                crate::output::Format::Csv => "csv",
                crate::output::Format::Json => "json",
            })),
        ]
    }
}

pub fn run_job(config: &RunConfig, job: &Job) -> Result<Document, CliError> {
    let (columns, rows): (Vec<&'static str>, Vec<Vec<Cell>>) = match job {
        Job::Integrate { seq, eps, n } => {
            let lengths = seq.generate(*n)?;
            let q = product_integral(&lengths, *eps)?;
            (
                vec!["n", "eps", "value", "log_value", "segment_count", "nodes_per_segment"],
                vec![vec![
                    (*n).into(),
                    (*eps).into(),
                    q.value.into(),
                    q.log_value.into(),
                    q.segment_count.into(),
                    q.nodes_per_segment.into(),
                ]],
            )
        }
        Job::Bound { seq, eps, n } => {
            let lengths = seq.generate(*n)?;
            let cert = shepp_lower_bound(&lengths, *eps)?;
            let cheb = chebyshev_lower_bound(&lengths, *eps)?;
            (
                vec!["n", "eps", "m", "log_c", "g_log_sum", "bound_log", "chebyshev_lower_bound"],
                vec![vec![
                    (*n).into(),
                    (*eps).into(),
                    cert.m.into(),
                    cert.log_c.into(),
                    cert.g_log_sum.into(),
                    cert.bound_log.into(),
                    cheb.into(),
                ]],
            )
        }
        Job::Divergence {
            seq,
            eps,
            checkpoints,
            quadrature_cap,
        } => {
            let table = divergence_table(seq, *eps, checkpoints, *quadrature_cap)?;
            (
                vec!["n", "log_product_integral", "bound_log", "g_log_sum"],
                table
                    .iter()
                    .map(|r| {
                        vec![
                            r.n.into(),
                            r.log_product_integral.into(),
                            r.bound_log.into(),
                            r.g_log_sum.into(),
                        ]
                    })
                    .collect(),
            )
        }
        Job::Criterion { seq, n, checkpoints } => {
            let series = criterion_partial_sums(seq, *n)?;
            let picks: Vec<usize> = if checkpoints.is_empty() {
                (1..=*n).collect()
            } else {
                checkpoints.clone()
            };
            (
                vec!["n", "log_term", "partial_sum", "log_partial_sum"],
                picks
                    .into_iter()
                    .map(|k| {
                        vec![
                            k.into(),
                            series.partial_log_terms[k - 1].into(),
                            series.partial_sums[k - 1].into(),
                            series.log_partial_sums[k - 1].into(),
                        ]
                    })
                    .collect(),
            )
        }
        Job::InequalityCheck {
            trials,
            seed,
            max_n,
            max_segments,
        } => {
            let rows = (0..*trials)
                .into_par_iter()
                .map(|i| {
                    let fs = random_trial_family(*seed, i, *max_n, *max_segments);
                    let c = check_inequality(&fs)?;
                    Ok(vec![
                        i.into(),
                        fs.len().into(),
                        c.lhs.into(),
                        c.rhs.into(),
                        c.margin.into(),
                        c.holds.into(),
                    ])
                })
                .collect::<Result<Vec<_>, covering_core::Error>>()?;
            (vec!["trial", "n", "lhs", "rhs", "margin", "holds"], rows)
        }
        Job::Simulate { seq, n, reps, seed } => {
            let r = coverage_probability(seq, *n, *reps, *seed)?;
            (
                vec!["seed", "replications", "n_arcs", "covered_count", "p_hat", "std_err"],
                vec![vec![
                    r.seed.into(),
                    r.replications.into(),
                    r.n_arcs.into(),
                    r.covered_count.into(),
                    r.p_hat.into(),
                    r.std_err.into(),
                ]],
            )
        }
        Job::PairProbe {
            lengths,
            t,
            reps,
            seed,
        } => {
            let exact = pair_uncovered_exact(lengths, *t)?;
            let r = pair_uncovered_mc(lengths, *t, *reps, *seed)?;
            let z = if r.std_err > 0.0 {
                Some((r.p_hat - exact) / r.std_err)
            } else {
                None
            };
            (
                vec![
                    "t",
                    "exact",
                    "seed",
                    "replications",
                    "n_arcs",
                    "hits",
                    "p_hat",
                    "std_err",
                    "z_score",
                ],
                vec![vec![
                    (*t).into(),
                    exact.into(),
                    r.seed.into(),
                    r.replications.into(),
                    r.n_arcs.into(),
                    r.covered_count.into(),
                    r.p_hat.into(),
                    r.std_err.into(),
                    z.into(),
                ]],
            )
        }
    };
    Ok(Document {
        command: config.command.name(),
        config: config.echo(),
        columns,
        rows,
    })
}
