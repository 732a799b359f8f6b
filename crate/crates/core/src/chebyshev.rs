//! The Chebyshev integral inequality for positive functions that are all
//! increasing or all decreasing on `[0, eps]`:
//!
//! ```text
//! eps^{n-1} ∫_0^eps ∏ f_k  >=  ∏ ∫_0^eps f_k
//! ```
//!
//! Functions are represented as positive monotone piecewise-linear curves,
//! which makes every integral exact. The Shepp factors are themselves
//! piecewise-linear, so they embed without loss.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::numerics::{compensated_sum, GaussLegendre, KahanSum};
use crate::rng::substream;
use crate::shepp::{PairFactor, BREAKPOINT_MERGE_TOL};

/// One-sided slack: `lhs` may fall short of `rhs` by this much times `max(1, rhs)`.
pub const INEQUALITY_TOL: f64 = 1e-10;

/// Smallest value produced by [`random_monotone_family`].
pub const VALUE_FLOOR: f64 = 1e-6;

const DOMAIN_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Increasing,
    Decreasing,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Increasing => "increasing",
            Direction::Decreasing => "decreasing",
        }
    }

    fn admits(self, a: f64, b: f64) -> bool {
        match self {
            Direction::Increasing => a <= b,
            Direction::Decreasing => a >= b,
        }
    }
}

/// Positive, monotone, linear between breakpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotonePiecewiseLinear {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
    direction: Direction,
}

impl MonotonePiecewiseLinear {
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>, direction: Direction) -> Result<Self> {
        if breakpoints.len() < 2 || breakpoints.len() != values.len() {
            return Err(Error::Validation(format!(
                "need at least two breakpoints and one value per breakpoint (got {} and {})",
                breakpoints.len(),
                values.len()
            )));
        }
        if breakpoints[0] != 0.0 {
            return Err(Error::Validation("first breakpoint must be 0".into()));
        }
        if breakpoints.windows(2).any(|w| !(w[1] > w[0])) || !breakpoints.iter().all(|b| b.is_finite()) {
            return Err(Error::Validation("breakpoints must be finite and strictly ascending".into()));
        }
        if let Some(v) = values.iter().find(|&&v| !(v > 0.0 && v.is_finite())) {
            return Err(Error::Validation(format!("values must be positive and finite, got {v}")));
        }
        if values.windows(2).any(|w| !direction.admits(w[0], w[1])) {
            return Err(Error::Validation(format!(
                "values are not {} ",
                direction.as_str()
            )));
        }
        Ok(Self {
            breakpoints,
            values,
            direction,
        })
    }

    pub fn constant(value: f64, eps: f64, direction: Direction) -> Result<Self> {
        Self::new(vec![0.0, eps], vec![value, value], direction)
    }

    /// Lossless piecewise-linear form of `f(t) = (1 - l - min(l, t)) / (1 - l)²` on `[0, eps]`.
    pub fn shepp_factor(l: f64, eps: f64) -> Result<Self> {
        let factor = PairFactor::new(l)?;
        factor.integral(eps)?;
        let breakpoints = if l < eps { vec![0.0, l, eps] } else { vec![0.0, eps] };
        let values = breakpoints
            .iter()
            .map(|&t| factor.eval(t))
            .collect::<Result<Vec<_>>>()?;
        Self::new(breakpoints, values, Direction::Decreasing)
    }

    pub fn eps(&self) -> f64 {
        *self.breakpoints.last().expect("validated nonempty")
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Linear interpolation, clamped to `[0, eps]`.
    pub fn eval(&self, t: f64) -> f64 {
        let last = self.breakpoints.len() - 1;
        let i = self.breakpoints.partition_point(|&b| b <= t).clamp(1, last) - 1;
        let (x0, x1) = (self.breakpoints[i], self.breakpoints[i + 1]);
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let s = ((t - x0) / (x1 - x0)).clamp(0.0, 1.0);
        y0 + s * (y1 - y0)
    }

    /// Trapezoid sum, exact for piecewise-linear functions.
    pub fn integral(&self) -> f64 {
        compensated_sum(
            self.breakpoints
                .windows(2)
                .zip(self.values.windows(2))
                .map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1])),
        )
    }
}

pub fn integral(f: &MonotonePiecewiseLinear) -> f64 {
    f.integral()
}

fn common_eps(fs: &[MonotonePiecewiseLinear]) -> Result<f64> {
    let first = fs
        .first()
        .ok_or_else(|| Error::Contract("at least one function is required".into()))?;
    let eps = first.eps();
    if let Some(f) = fs.iter().find(|f| (f.eps() - eps).abs() > DOMAIN_TOL * eps) {
        return Err(Error::Contract(format!(
            "mismatched domains: [0, {eps}] vs [0, {}]",
            f.eps()
        )));
    }
    Ok(eps)
}

fn common_direction(fs: &[MonotonePiecewiseLinear]) -> Result<()> {
    let d = fs[0].direction;
    if fs.iter().any(|f| f.direction != d) {
        return Err(Error::Contract(
            "functions must be all increasing or all decreasing".into(),
        ));
    }
    Ok(())
}

/// Exact integral of the product; only the domains are checked.
fn product_integral_unchecked(fs: &[MonotonePiecewiseLinear], eps: f64) -> f64 {
    let mut breaks: Vec<f64> = fs
        .iter()
        .flat_map(|f| f.breakpoints.iter().copied())
        .collect();
    breaks.sort_by(f64::total_cmp);
    breaks.dedup_by(|next, kept| *next - *kept < BREAKPOINT_MERGE_TOL);
    let last = breaks.len() - 1;
    breaks[last] = eps;
    let rule = GaussLegendre::cached((fs.len() + 1).div_ceil(2));
    let mut acc = KahanSum::new();
    for w in breaks.windows(2) {
        for (t, weight) in rule.mapped(w[0], w[1]) {
            acc += weight * fs.iter().map(|f| f.eval(t)).product::<f64>();
        }
    }
    acc.value()
}

/// `∫_0^eps ∏ f_k`, exact up to roundoff.
pub fn product_integral_pl(fs: &[MonotonePiecewiseLinear]) -> Result<f64> {
    let eps = common_eps(fs)?;
    common_direction(fs)?;
    Ok(product_integral_unchecked(fs, eps))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InequalityCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
    pub margin: f64,
}

pub fn check_inequality(fs: &[MonotonePiecewiseLinear]) -> Result<InequalityCheck> {
    let eps = common_eps(fs)?;
    common_direction(fs)?;
    let n = fs.len() as i32;
    let lhs = eps.powi(n - 1) * product_integral_unchecked(fs, eps);
    let rhs: f64 = fs.iter().map(integral).product();
    Ok(InequalityCheck {
        lhs,
        rhs,
        holds: lhs >= rhs - INEQUALITY_TOL * rhs.max(1.0),
        margin: lhs - rhs,
    })
}

/// `∬ (f(x) - f(y)) (g(x) - g(y)) dx dy = 2 eps ∫fg - 2 ∫f ∫g`.
///
/// Nonnegative when `f` and `g` share a direction.
pub fn two_function_correlation(
    f: &MonotonePiecewiseLinear,
    g: &MonotonePiecewiseLinear,
) -> Result<f64> {
    if f.direction != g.direction {
        return Err(Error::Contract(
            "correlation requires a shared direction; use signed_correlation".into(),
        ));
    }
    signed_correlation(f, g)
}

/// Same double integral without the shared-direction requirement.
pub fn signed_correlation(f: &MonotonePiecewiseLinear, g: &MonotonePiecewiseLinear) -> Result<f64> {
    let pair = [f.clone(), g.clone()];
    let eps = common_eps(&pair)?;
    let fg = product_integral_unchecked(&pair, eps);
    Ok(2.0 * eps * fg - 2.0 * f.integral() * g.integral())
}

/// `n` random functions on a shared random domain, each with `segments`
/// linear pieces. Deterministic in `seed`.
pub fn random_monotone_family(
    seed: u64,
    n: usize,
    direction: Direction,
    segments: usize,
) -> Vec<MonotonePiecewiseLinear> {
    assert!(n >= 1 && segments >= 1, "need n >= 1 and segments >= 1");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let eps = rng.random_range(0.1..2.0);
    (0..n)
        .map(|_| random_function(&mut rng, eps, direction, segments))
        .collect()
}

fn random_function<R: Rng>(
    rng: &mut R,
    eps: f64,
    direction: Direction,
    segments: usize,
) -> MonotonePiecewiseLinear {
    let mut breakpoints: Vec<f64> = (1..segments).map(|_| rng.random::<f64>() * eps).collect();
    breakpoints.push(0.0);
    breakpoints.push(eps);
    breakpoints.sort_by(f64::total_cmp);
    breakpoints.dedup();
    let mut values: Vec<f64> = (0..breakpoints.len())
        .map(|_| rng.random_range(-6.0f64..2.0).exp().max(VALUE_FLOOR))
        .collect();
    values.sort_by(f64::total_cmp);
    if direction == Direction::Decreasing {
        values.reverse();
    }
    MonotonePiecewiseLinear::new(breakpoints, values, direction)
        .expect("generator output satisfies the invariants")
}

/// One randomized inequality trial: `n ∈ [1, max_n]`, `segments ∈ [1,
/// max_segments]` and the direction are drawn from substream `index` of `seed`.
pub fn random_trial_family(
    seed: u64,
    index: u64,
    max_n: usize,
    max_segments: usize,
) -> Vec<MonotonePiecewiseLinear> {
    let mut rng = substream(seed, index);
    let n = rng.random_range(1..=max_n.max(1));
    let segments = rng.random_range(1..=max_segments.max(1));
    let direction = if rng.random::<bool>() {
        Direction::Increasing
    } else {
        Direction::Decreasing
    };
    random_monotone_family(rng.random(), n, direction, segments)
}

/// Searches for an increasing/decreasing pair with negative correlation,
/// showing that the shared-monotonicity hypothesis cannot be dropped.
pub fn find_anticorrelated_pair(
    seed: u64,
    attempts: usize,
) -> Option<(MonotonePiecewiseLinear, MonotonePiecewiseLinear, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..attempts).find_map(|_| {
        let eps = rng.random_range(0.1..2.0);
        let segments = rng.random_range(1..=6);
        let f = random_function(&mut rng, eps, Direction::Increasing, segments);
        let g = random_function(&mut rng, eps, Direction::Decreasing, segments);
        let c = signed_correlation(&f, &g).ok()?;
        (c < 0.0).then_some((f, g, c))
    })
}
