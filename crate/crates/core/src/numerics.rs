//! Compensated accumulation and Gauss–Legendre rules.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::ops::AddAssign;
use std::sync::{Arc, Mutex, OnceLock};

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }

    fn scale(&mut self, factor: f64) {
        self.sum *= factor;
        self.comp *= factor;
    }
}

impl AddAssign<f64> for KahanSum {
    fn add_assign(&mut self, rhs: f64) {
        self.add(rhs);
    }
}

impl FromIterator<f64> for KahanSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = KahanSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Compensated sum of an iterator.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().collect::<KahanSum>().value()
}

/// Running `ln Σ exp(x_i)`.
///
/// The terms are kept as a compensated sum of `exp(x_i - shift)`, where
/// `shift` tracks the largest log-term seen so far, so the plain sum never
/// overflows and small late terms are not swallowed.
#[derive(Debug, Clone, Copy)]
pub struct LogSumExp {
    shift: f64,
    scaled: KahanSum,
}

impl Default for LogSumExp {
    fn default() -> Self {
        Self {
            shift: f64::NEG_INFINITY,
            scaled: KahanSum::new(),
        }
    }
}

impl LogSumExp {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_log(&mut self, log_term: f64) {
        if log_term == f64::NEG_INFINITY {
            return;
        }
        if log_term > self.shift {
            if self.shift.is_finite() {
                self.scaled.scale((self.shift - log_term).exp());
            }
            self.shift = log_term;
        }
        self.scaled.add((log_term - self.shift).exp());
    }

    /// `ln` of the accumulated sum; `-inf` when empty.
    pub fn log_value(&self) -> f64 {
        if self.shift == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            self.shift + self.scaled.value().ln()
        }
    }

    /// Plain value; `+inf` once it exceeds the f64 range.
    pub fn value(&self) -> f64 {
        self.log_value().exp()
    }
}

impl FromIterator<f64> for LogSumExp {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = LogSumExp::new();
        for x in iter {
            acc.add_log(x);
        }
        acc
    }
}

/// Gauss–Legendre nodes and weights on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Builds the `n`-point rule by Newton iteration on the Legendre
    /// three-term recurrence. Exact for polynomials of degree `2n - 1`.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            // Tricomi initial guess, then Newton.
            let theta = PI * (i as f64 + 0.75) / (nf + 0.5);
            let mut x = (1.0 - (nf - 1.0) / (8.0 * nf * nf * nf)) * theta.cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d.is_finite() {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    /// Shared rule for `n` nodes, built once per process.
    pub fn cached(n: usize) -> Arc<Self> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GaussLegendre>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        if let Some(rule) = cache.lock().expect("rule cache poisoned").get(&n) {
            return Arc::clone(rule);
        }
        let rule = Arc::new(Self::new(n));
        cache
            .lock()
            .expect("rule cache poisoned")
            .entry(n)
            .or_insert(rule)
            .clone()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Mapped `(t, w)` pairs on `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, a: f64, b: f64, f: F) -> f64 {
        compensated_sum(self.mapped(a, b).map(|(t, w)| w * f(t)))
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p_prev = 1.0;
    let mut p = x;
    for k in 2..=n {
        let kf = k as f64;
        let p_next = ((2.0 * kf - 1.0) * x * p - (kf - 1.0) * p_prev) / kf;
        p_prev = p;
        p = p_next;
    }
    let d = n as f64 * (x * p - p_prev) / (x * x - 1.0);
    (p, d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn kahan_recovers_small_terms() {
        let mut acc = KahanSum::new();
        acc += 1.0;
        for _ in 0..1_000_000 {
            acc += 1e-16;
        }
        assert_relative_eq!(acc.value(), 1.0 + 1e-10, max_relative = 1e-15);
    }

    #[test]
    fn log_sum_exp_matches_direct_sum() {
        let terms = [0.5f64, -1.0, 2.0, 0.0];
        let lse: LogSumExp = terms.iter().copied().collect();
        let direct: f64 = terms.iter().map(|x| x.exp()).sum();
        assert_relative_eq!(lse.value(), direct, max_relative = 1e-15);
    }

    #[test]
    fn log_sum_exp_survives_overflow() {
        let lse: LogSumExp = [1000.0, 1000.0].into_iter().collect();
        assert_relative_eq!(lse.log_value(), 1000.0 + 2f64.ln(), max_relative = 1e-15);
        assert!(lse.value().is_infinite());
        assert_eq!(LogSumExp::new().log_value(), f64::NEG_INFINITY);
    }

    #[test]
    fn rule_is_exact_for_monomials() {
        for n in [1usize, 2, 3, 7, 20, 64, 513] {
            let rule = GaussLegendre::new(n);
            assert_relative_eq!(rule.weights().iter().sum::<f64>(), 2.0, max_relative = 1e-13);
            let max_deg = (2 * n - 1).min(40);
            for deg in 0..=max_deg {
                let exact = if deg % 2 == 0 { 2.0 / (deg as f64 + 1.0) } else { 0.0 };
                let got = rule.integrate(-1.0, 1.0, |x| x.powi(deg as i32));
                assert!((got - exact).abs() < 1e-13, "n={n} deg={deg}: {got} vs {exact}");
            }
        }
    }

    #[test]
    fn nodes_sorted_inside_interval() {
        let rule = GaussLegendre::new(101);
        assert!(rule.nodes().windows(2).all(|w| w[0] < w[1]));
        assert!(rule.nodes().iter().all(|x| x.abs() < 1.0));
        assert!(rule.weights().iter().all(|&w| w > 0.0));
    }

    #[test]
    fn cached_rule_is_shared() {
        let a = GaussLegendre::cached(17);
        let b = GaussLegendre::cached(17);
        assert!(Arc::ptr_eq(&a, &b));
    }
}
