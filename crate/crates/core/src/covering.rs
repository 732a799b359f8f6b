//! Arcs tossed with independent uniform centers on the circle of
//! circumference 1.
//!
//! An arc with center `c` and length `l` occupies the half-open set
//! `[c, c + l) mod 1`. The uncovered part of the circle is tracked
//! incrementally as a [`GapSet`].

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numerics::{GaussLegendre, KahanSum};
use crate::rng::substream;
use crate::sequences::{validate_lengths, LengthSequence};
use crate::shepp::BREAKPOINT_MERGE_TOL;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arc {
    pub center: f64,
    pub length: f64,
}

impl Arc {
    pub fn new(center: f64, length: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&center) {
            return Err(Error::domain("center", format!("center {center} must lie in [0, 1)")));
        }
        if !(length > 0.0 && length < 1.0) {
            return Err(Error::domain("length", format!("arc length {length} must lie in (0, 1)")));
        }
        Ok(Self { center, length })
    }

    pub fn covers(&self, x: f64) -> bool {
        (x - self.center).rem_euclid(1.0) < self.length
    }

    /// The arc as one or two non-wrapping half-open pieces of `[0, 1)`.
    fn pieces(&self) -> ([(f64, f64); 2], usize) {
        let end = self.center + self.length;
        if end <= 1.0 {
            ([(self.center, end), (0.0, 0.0)], 1)
        } else {
            ([(0.0, end - 1.0), (self.center, 1.0)], 2)
        }
    }
}

/// Uncovered part of the circle as sorted, disjoint, nonempty half-open
/// intervals of `[0, 1)`. A gap that wraps through 0 appears as two pieces,
/// one starting at 0 and one ending at 1.
#[derive(Debug, Clone, PartialEq)]
pub struct GapSet {
    gaps: Vec<(f64, f64)>,
    total: KahanSum,
}

impl Default for GapSet {
    fn default() -> Self {
        Self::full()
    }
}

impl GapSet {
    /// Nothing covered yet.
    pub fn full() -> Self {
        let mut total = KahanSum::new();
        total += 1.0;
        Self {
            gaps: vec![(0.0, 1.0)],
            total,
        }
    }

    pub fn gaps(&self) -> &[(f64, f64)] {
        &self.gaps
    }

    pub fn total_gap(&self) -> f64 {
        self.total.value()
    }

    pub fn is_covered(&self) -> bool {
        self.gaps.is_empty()
    }

    /// Removes `arc` from the uncovered set; returns the measure removed.
    pub fn apply(&mut self, arc: &Arc) -> f64 {
        let (pieces, count) = arc.pieces();
        let mut removed = 0.0;
        for &(a, b) in &pieces[..count] {
            removed += self.subtract(a, b);
        }
        removed
    }

    fn subtract(&mut self, a: f64, b: f64) -> f64 {
        let first = self.gaps.partition_point(|g| g.1 <= a);
        let mut last = first;
        while last < self.gaps.len() && self.gaps[last].0 < b {
            last += 1;
        }
        if first == last {
            return 0.0;
        }
        let mut kept = Vec::with_capacity(2);
        let mut removed = 0.0;
        for &(s, e) in &self.gaps[first..last] {
            let overlap = e.min(b) - s.max(a);
            removed += overlap;
            self.total += -overlap;
            if s < a {
                kept.push((s, a));
            }
            if b < e {
                kept.push((b, e));
            }
        }
        self.gaps.splice(first..last, kept);
        removed
    }

    /// Sorted, disjoint, nonempty, inside `[0, 1]`, and `total_gap` matches.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        for &(s, e) in &self.gaps {
            if !(0.0 <= s && s < e && e <= 1.0) {
                return Err(format!("malformed gap [{s}, {e})"));
            }
        }
        if let Some(w) = self.gaps.windows(2).find(|w| w[0].1 > w[1].0) {
            return Err(format!("gaps overlap or are unsorted: {:?} then {:?}", w[0], w[1]));
        }
        let summed: f64 = self.gaps.iter().map(|g| g.1 - g.0).sum();
        if (summed - self.total_gap()).abs() > 1e-12 {
            return Err(format!("total_gap {} differs from summed gaps {summed}", self.total_gap()));
        }
        Ok(())
    }
}

pub fn apply_arc(state: &GapSet, arc: &Arc) -> GapSet {
    let mut next = state.clone();
    next.apply(arc);
    next
}

/// Outcome of one replication.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Replication {
    /// Number of arcs after which the circle first became covered.
    pub first_cover: Option<usize>,
    /// Uncovered measure after all arcs.
    pub total_gap: f64,
}

/// Tosses arcs with the given lengths at the given centers.
pub fn run_replication<C>(lengths: &[f64], centers: C) -> Replication
where
    C: IntoIterator<Item = f64>,
{
    let mut state = GapSet::full();
    for (i, (&length, center)) in lengths.iter().zip(centers).enumerate() {
        state.apply(&Arc { center, length });
        if state.is_covered() {
            return Replication {
                first_cover: Some(i + 1),
                total_gap: 0.0,
            };
        }
    }
    Replication {
        first_cover: None,
        total_gap: state.total_gap(),
    }
}

fn uniform_centers<R: Rng>(mut rng: R) -> impl Iterator<Item = f64> {
    std::iter::repeat_with(move || rng.random::<f64>())
}

/// Smallest number of arcs that covers the circle, if any within `n_max`.
pub fn first_cover_index(seq: &LengthSequence, seed: u64, n_max: usize) -> Result<Option<usize>> {
    let lengths = seq.generate(n_max)?;
    Ok(run_replication(&lengths, uniform_centers(substream(seed, 0))).first_cover)
}

/// Monte Carlo estimate with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationResult {
    pub seed: u64,
    pub replications: u64,
    pub n_arcs: usize,
    /// Replications in which the event of interest occurred.
    pub covered_count: u64,
    pub p_hat: f64,
    pub std_err: f64,
}

impl SimulationResult {
    pub fn from_counts(seed: u64, replications: u64, n_arcs: usize, covered_count: u64) -> Self {
        let p_hat = covered_count as f64 / replications as f64;
        Self {
            seed,
            replications,
            n_arcs,
            covered_count,
            p_hat,
            std_err: (p_hat * (1.0 - p_hat) / replications as f64).sqrt(),
        }
    }
}

fn check_reps(reps: u64) -> Result<()> {
    if reps == 0 {
        return Err(Error::domain("reps", "at least one replication is required"));
    }
    Ok(())
}

/// Fraction of replications in which `n` arcs cover the circle.
pub fn coverage_probability(
    seq: &LengthSequence,
    n: usize,
    reps: u64,
    seed: u64,
) -> Result<SimulationResult> {
    check_reps(reps)?;
    let lengths = seq.generate(n)?;
    let covered = (0..reps)
        .into_par_iter()
        .filter(|&r| {
            run_replication(&lengths, uniform_centers(substream(seed, r)))
                .first_cover
                .is_some()
        })
        .count() as u64;
    Ok(SimulationResult::from_counts(seed, reps, n, covered))
}

/// Uncovered measure after all arcs, one value per replication, in
/// replication order.
pub fn gap_measure_samples(lengths: &[f64], reps: u64, seed: u64) -> Result<Vec<f64>> {
    check_reps(reps)?;
    validate_lengths(lengths)?;
    Ok((0..reps)
        .into_par_iter()
        .map(|r| run_replication(lengths, uniform_centers(substream(seed, r))).total_gap)
        .collect())
}

/// Exact first two moments of the uncovered measure after all arcs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapMoments {
    /// `E[gap] = ∏_k (1 - l_k)`.
    pub mean: f64,
    /// `E[gap²] = ∫_0^1 P(0 and t both uncovered) dt`.
    pub second_moment: f64,
}

impl GapMoments {
    pub fn variance(&self) -> f64 {
        (self.second_moment - self.mean * self.mean).max(0.0)
    }

    /// Standard error of the mean of `reps` independent replications.
    pub fn standard_error(&self, reps: u64) -> f64 {
        (self.variance() / reps as f64).sqrt()
    }
}

/// Probability that one arc of length `l` misses both 0 and `t`, any `t` in [0, 1].
fn pair_miss_any(l: f64, t: f64) -> f64 {
    let overlap = (l - t).max(0.0) + (l - (1.0 - t)).max(0.0);
    (1.0 - 2.0 * l + overlap).max(0.0)
}

pub fn gap_moments(lengths: &[f64]) -> Result<GapMoments> {
    validate_lengths(lengths)?;
    let mean = lengths.iter().map(|l| 1.0 - l).product();
    // piecewise polynomial of degree n between the kinks l_k and 1 - l_k
    let mut breaks: Vec<f64> = lengths
        .iter()
        .flat_map(|&l| [l, 1.0 - l])
        .chain([0.0, 1.0])
        .collect();
    breaks.sort_by(f64::total_cmp);
    breaks.dedup_by(|next, kept| *next - *kept < BREAKPOINT_MERGE_TOL);
    let rule = GaussLegendre::cached((lengths.len() + 1).div_ceil(2));
    let mut second = KahanSum::new();
    for w in breaks.windows(2) {
        for (t, weight) in rule.mapped(w[0], w[1]) {
            second += weight * lengths.iter().map(|&l| pair_miss_any(l, t)).product::<f64>();
        }
    }
    Ok(GapMoments {
        mean,
        second_moment: second.value(),
    })
}

fn check_pair_point(lengths: &[f64], t: f64) -> Result<()> {
    validate_lengths(lengths)?;
    let upper = 1.0 - lengths.first().copied().unwrap_or(0.0);
    if !(t > 0.0 && t < upper) {
        return Err(Error::domain(
            "t",
            format!("t = {t} must lie in (0, 1 - l_1) = (0, {upper})"),
        ));
    }
    Ok(())
}

/// Probability that both 0 and `t` stay uncovered: `∏_k (1 - l_k - min(l_k, t))`.
pub fn pair_uncovered_exact(lengths: &[f64], t: f64) -> Result<f64> {
    check_pair_point(lengths, t)?;
    Ok(lengths.iter().map(|&l| 1.0 - l - l.min(t)).product())
}

/// Monte Carlo estimate of [`pair_uncovered_exact`].
pub fn pair_uncovered_mc(lengths: &[f64], t: f64, reps: u64, seed: u64) -> Result<SimulationResult> {
    check_reps(reps)?;
    check_pair_point(lengths, t)?;
    let hits = (0..reps)
        .into_par_iter()
        .filter(|&r| {
            let mut rng = substream(seed, r);
            lengths.iter().all(|&length| {
                let arc = Arc {
                    center: rng.random::<f64>(),
                    length,
                };
                !arc.covers(0.0) && !arc.covers(t)
            })
        })
        .count() as u64;
    Ok(SimulationResult::from_counts(seed, reps, lengths.len(), hits))
}
