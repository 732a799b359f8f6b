//! The pair factors `f_k(t) = (1 - l_k - min(l_k, t)) / (1 - l_k)²`, their
//! integrals over `[0, eps]`, the growth function `g_eps`, the lower-bound
//! chain that certifies divergence, and the covering-criterion series.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numerics::{compensated_sum, GaussLegendre, KahanSum, LogSumExp};
use crate::sequences::{threshold_index_of, validate_lengths, EpsilonWindow, LengthSequence};

/// Breakpoints closer than this are treated as one.
pub const BREAKPOINT_MERGE_TOL: f64 = 1e-15;

/// Default largest `n` for which [`divergence_table`] runs exact quadrature.
pub const DEFAULT_QUADRATURE_CAP: usize = 2000;

/// Linear factors are multiplied in blocks of this size before taking a log.
/// Every factor lies in (0, 1], so a block cannot overflow and only
/// underflows if a factor is below ~1e-19.
const PRODUCT_BLOCK: usize = 16;

/// One Shepp factor `f(t)` for arc length `l`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairFactor {
    l: f64,
}

impl PairFactor {
    pub fn new(l: f64) -> Result<Self> {
        if !(l > 0.0 && l < 1.0) {
            return Err(Error::domain("l", format!("arc length {l} must lie in (0, 1)")));
        }
        Ok(Self { l })
    }

    pub fn length(&self) -> f64 {
        self.l
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(Error::domain("t", format!("t = {t} must be nonnegative")));
        }
        let num = 1.0 - self.l - self.l.min(t);
        if num <= 0.0 {
            return Err(Error::domain(
                "t",
                format!("1 - l - min(l, t) = {num} is not positive for l = {}", self.l),
            ));
        }
        let d = 1.0 - self.l;
        Ok(num / (d * d))
    }

    /// Exact `∫_0^eps f(t) dt`.
    pub fn integral(&self, eps: f64) -> Result<f64> {
        let l = self.l;
        if !(eps > 0.0) {
            return Err(Error::domain("eps", format!("eps = {eps} must be > 0")));
        }
        // The integrand is smallest at t = min(l, eps).
        if 1.0 - l - l.min(eps) <= 0.0 {
            return Err(Error::domain(
                "eps",
                format!("integrand is not positive on [0, {eps}] for l = {l}"),
            ));
        }
        let d = 1.0 - l;
        let num = if l < eps {
            0.5 * l * l + eps - 2.0 * eps * l
        } else {
            eps * d - 0.5 * eps * eps
        };
        Ok(num / (d * d))
    }
}

pub fn pair_factor_eval(l: f64, t: f64) -> Result<f64> {
    PairFactor::new(l)?.eval(t)
}

pub fn pair_factor_integral(l: f64, eps: f64) -> Result<f64> {
    PairFactor::new(l)?.integral(eps)
}

/// Outcome of [`product_integral`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    pub log_value: f64,
    pub segment_count: usize,
    pub nodes_per_segment: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadratureOptions {
    /// Multiplies the minimal exact node count `ceil((n + 1) / 2)`.
    pub node_multiplier: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self { node_multiplier: 1 }
    }
}

fn check_instance(lengths: &[f64], eps: f64) -> Result<()> {
    validate_lengths(lengths)?;
    match lengths.first() {
        Some(&l1) => EpsilonWindow::from_first_length(l1, eps).map(|_| ()),
        None if eps > 0.0 && eps < 1.0 => Ok(()),
        None => Err(Error::domain("eps", format!("eps = {eps} must lie in (0, 1)"))),
    }
}

/// Sorted breakpoints `{0, eps} ∪ {l_k : l_k < eps}` with near-duplicates merged.
pub fn segment_breakpoints(lengths: &[f64], eps: f64) -> Vec<f64> {
    let mut points = Vec::with_capacity(lengths.len() + 2);
    points.push(0.0);
    // lengths are nonincreasing, so the sub-eps tail read backwards is ascending
    points.extend(lengths.iter().rev().copied().filter(|&l| l < eps));
    points.push(eps);
    points.dedup_by(|next, kept| *next - *kept < BREAKPOINT_MERGE_TOL);
    if points.len() == 1 {
        points.push(eps);
    }
    let last = points.len() - 1;
    points[last] = eps;
    points
}

/// `∫_0^eps ∏_k f_k(t) dt`, exact up to roundoff.
///
/// Between consecutive breakpoints the integrand is a polynomial of degree at
/// most `n`, so a Gauss–Legendre rule with `ceil((n + 1) / 2)` nodes is
/// exact on each segment. Pointwise values are carried in log space.
pub fn product_integral(lengths: &[f64], eps: f64) -> Result<QuadratureResult> {
    product_integral_with(lengths, eps, QuadratureOptions::default())
}

pub fn product_integral_with(
    lengths: &[f64],
    eps: f64,
    options: QuadratureOptions,
) -> Result<QuadratureResult> {
    check_instance(lengths, eps)?;
    let n = lengths.len();
    let nodes = (n + 1).div_ceil(2) * options.node_multiplier.max(1);
    if n == 0 {
        return Ok(QuadratureResult {
            value: eps,
            log_value: eps.ln(),
            segment_count: 1,
            nodes_per_segment: nodes,
        });
    }

    // f_k(t) = a_k (1 - a_k t) for t <= l_k, with a_k = 1 / (1 - l_k);
    // for t >= l_k it is the constant (1 - 2 l_k) / (1 - l_k)².
    let slopes: Vec<f64> = lengths.iter().map(|&l| 1.0 / (1.0 - l)).collect();
    let mut head_log_scale = Vec::with_capacity(n + 1);
    let mut acc = KahanSum::new();
    head_log_scale.push(0.0);
    for &l in lengths {
        acc += -(-l).ln_1p();
        head_log_scale.push(acc.value());
    }
    let mut tail_log_const = vec![0.0; n + 1];
    let mut acc = KahanSum::new();
    for k in (0..n).rev() {
        let l = lengths[k];
        if l < eps {
            acc += (-2.0 * l).ln_1p() - 2.0 * (-l).ln_1p();
        }
        tail_log_const[k] = acc.value();
    }

    let breaks = segment_breakpoints(lengths, eps);
    let rule = GaussLegendre::cached(nodes);
    let segment_logs: Vec<f64> = breaks
        .par_windows(2)
        .map(|w| {
            let (a, b) = (w[0], w[1]);
            // factors whose kink lies at or beyond b are linear on [a, b]
            let head = lengths.partition_point(|&l| l >= b - BREAKPOINT_MERGE_TOL);
            let base = head_log_scale[head] + tail_log_const[head];
            let head_slopes = &slopes[..head];
            rule.mapped(a, b)
                .map(|(t, w)| w.ln() + base + log_linear_product(head_slopes, t))
                .collect::<LogSumExp>()
                .log_value()
        })
        .collect();
    let log_value = segment_logs.into_iter().collect::<LogSumExp>().log_value();
    Ok(QuadratureResult {
        value: log_value.exp(),
        log_value,
        segment_count: breaks.len() - 1,
        nodes_per_segment: nodes,
    })
}

/// `Σ_k ln(1 - a_k t)`.
fn log_linear_product(slopes: &[f64], t: f64) -> f64 {
    let mut acc = KahanSum::new();
    for block in slopes.chunks(PRODUCT_BLOCK) {
        let p: f64 = block.iter().map(|&a| 1.0 - a * t).product();
        acc += p.ln();
    }
    acc.value()
}

/// `g_eps(x) = (1/eps) (x²/2 + eps - 2 eps x) / (1 - x)²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthFunction {
    eps: f64,
}

impl GrowthFunction {
    pub fn new(eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::domain("eps", format!("eps = {eps} must lie in (0, 1)")));
        }
        Ok(Self { eps })
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        if !(x >= 0.0 && x < 1.0) {
            return Err(Error::domain("x", format!("x = {x} must lie in [0, 1)")));
        }
        Ok(self.eval_unchecked(x))
    }

    /// Also valid for small negative `x`; used by the difference probes.
    fn eval_unchecked(&self, x: f64) -> f64 {
        let eps = self.eps;
        let d = 1.0 - x;
        (0.5 * x * x + eps - 2.0 * eps * x) / (d * d) / eps
    }

    /// `g(x) - 1 = x² (1 - 2 eps) / (2 eps (1 - x)²)`.
    pub fn excess(&self, x: f64) -> f64 {
        let d = 1.0 - x;
        x * x * (1.0 - 2.0 * self.eps) / (2.0 * self.eps * d * d)
    }

    /// `ln g(x)`, via `ln_1p` of the excess so tiny terms keep full precision.
    pub fn log_eval(&self, x: f64) -> Result<f64> {
        if !(x >= 0.0 && x < 1.0) {
            return Err(Error::domain("x", format!("x = {x} must lie in [0, 1)")));
        }
        Ok(self.excess(x).ln_1p())
    }
}

pub fn growth_eval(eps: f64, x: f64) -> Result<f64> {
    GrowthFunction::new(eps)?.eval(x)
}

/// Finite-difference view of `g_eps` at the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivativeProbe {
    pub g0: f64,
    pub d1: f64,
    pub d2: f64,
}

pub fn growth_derivative_probe(eps: f64) -> Result<DerivativeProbe> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::domain("eps", format!("eps = {eps} must lie in (0, 1/2)")));
    }
    let g = GrowthFunction::new(eps)?;
    let g0 = g.eval_unchecked(0.0);
    let h1 = 1e-4;
    let d1 = (g.eval_unchecked(h1) - g.eval_unchecked(-h1)) / (2.0 * h1);
    let h2 = 1e-3;
    let d2 = (g.eval_unchecked(h2) - 2.0 * g0 + g.eval_unchecked(-h2)) / (h2 * h2);
    Ok(DerivativeProbe { g0, d1, d2 })
}

/// `ln( eps^{-(n-1)} ∏_k ∫_0^eps f_k )`.
pub fn chebyshev_lower_bound_log(lengths: &[f64], eps: f64) -> Result<f64> {
    check_instance(lengths, eps)?;
    let mut acc = KahanSum::new();
    acc += (1.0 - lengths.len() as f64) * eps.ln();
    for &l in lengths {
        acc += pair_factor_integral(l, eps)?.ln();
    }
    Ok(acc.value())
}

/// `eps^{-(n-1)} ∏_k ∫_0^eps f_k`; equals `eps` for an empty list.
pub fn chebyshev_lower_bound(lengths: &[f64], eps: f64) -> Result<f64> {
    chebyshev_lower_bound_log(lengths, eps).map(f64::exp)
}

/// Splits the Chebyshev bound into an `n`-independent constant and the
/// growth sum: `bound = C · exp(Σ_{k>m} ln g_eps(l_k))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowerBoundCertificate {
    /// Number of leading lengths with `l_k >= eps`.
    pub m: usize,
    /// `(1 - m) ln eps + Σ_{k<=m} ln ∫_0^eps f_k`.
    pub log_c: f64,
    pub g_log_sum: f64,
    pub bound_log: f64,
}

pub fn shepp_lower_bound(lengths: &[f64], eps: f64) -> Result<LowerBoundCertificate> {
    if !(eps < 0.5) {
        return Err(Error::BoundPath { eps });
    }
    check_instance(lengths, eps)?;
    let g = GrowthFunction::new(eps)?;
    let m = threshold_index_of(lengths, eps);
    let mut log_c = KahanSum::new();
    log_c += (1.0 - m as f64) * eps.ln();
    for &l in &lengths[..m] {
        log_c += pair_factor_integral(l, eps)?.ln();
    }
    let log_c = log_c.value();
    let g_log_sum = compensated_sum(lengths[m..].iter().map(|&l| g.excess(l).ln_1p()));
    Ok(LowerBoundCertificate {
        m,
        log_c,
        g_log_sum,
        bound_log: log_c + g_log_sum,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DivergenceRow {
    pub n: usize,
    /// Absent when `n` exceeds the quadrature cap.
    pub log_product_integral: Option<f64>,
    pub bound_log: f64,
    pub g_log_sum: f64,
}

/// Product-integral and certificate at each checkpoint `n`.
pub fn divergence_table(
    seq: &LengthSequence,
    eps: f64,
    checkpoints: &[usize],
    quadrature_cap: usize,
) -> Result<Vec<DivergenceRow>> {
    if checkpoints.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Validation(
            "checkpoints must be strictly ascending".into(),
        ));
    }
    if !(eps < 0.5) {
        return Err(Error::BoundPath { eps });
    }
    let max_n = checkpoints.last().copied().unwrap_or(0).max(1);
    let lengths = seq.generate(max_n)?;
    EpsilonWindow::from_first_length(lengths[0], eps)?;
    checkpoints
        .iter()
        .map(|&n| {
            let prefix = &lengths[..n];
            let log_product_integral = if n <= quadrature_cap {
                Some(product_integral(prefix, eps)?.log_value)
            } else {
                None
            };
            let cert = shepp_lower_bound(prefix, eps)?;
            Ok(DivergenceRow {
                n,
                log_product_integral,
                bound_log: cert.bound_log,
                g_log_sum: cert.g_log_sum,
            })
        })
        .collect()
}

/// Partial sums of `Σ n⁻² exp(l_1 + … + l_n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CriterionSeries {
    /// `ln term_n = Σ_{k<=n} l_k - 2 ln n`.
    pub partial_log_terms: Vec<f64>,
    /// `ln S_n`, always finite.
    pub log_partial_sums: Vec<f64>,
    /// `S_n`; `+inf` once it leaves the f64 range.
    pub partial_sums: Vec<f64>,
}

pub fn criterion_partial_sums(seq: &LengthSequence, n: usize) -> Result<CriterionSeries> {
    let lengths = seq.generate(n)?;
    let mut length_sum = KahanSum::new();
    let mut series = LogSumExp::new();
    let mut out = CriterionSeries {
        partial_log_terms: Vec::with_capacity(n),
        log_partial_sums: Vec::with_capacity(n),
        partial_sums: Vec::with_capacity(n),
    };
    for (i, &l) in lengths.iter().enumerate() {
        length_sum += l;
        let log_term = length_sum.value() - 2.0 * ((i + 1) as f64).ln();
        series.add_log(log_term);
        out.partial_log_terms.push(log_term);
        out.log_partial_sums.push(series.log_value());
        out.partial_sums.push(series.value());
    }
    Ok(out)
}
