//! Cross-checks against independent brute-force oracles.

use covering_core::chebyshev::{check_inequality, MonotonePiecewiseLinear};
use covering_core::covering::{
    coverage_probability, gap_measure_samples, gap_moments, pair_uncovered_exact, pair_uncovered_mc, Arc, GapSet,
};
use covering_core::shepp::{
    chebyshev_lower_bound, growth_derivative_probe, pair_factor_integral, product_integral,
    product_integral_with, shepp_lower_bound, QuadratureOptions,
};
use covering_core::LengthSequence;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Midpoint rule with `points` cells, summed pairwise-free with Kahan.
fn midpoint<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, points: usize) -> f64 {
    let h = (b - a) / points as f64;
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for i in 0..points {
        let y = f(a + (i as f64 + 0.5) * h) * h - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    sum
}

fn shepp_integrand(lengths: &[f64], t: f64) -> f64 {
    lengths
        .iter()
        .map(|&l| (1.0 - l - l.min(t)) / ((1.0 - l) * (1.0 - l)))
        .product()
}

fn random_instance(rng: &mut ChaCha8Rng, max_n: usize) -> (Vec<f64>, f64) {
    let n = rng.random_range(1..=max_n);
    let mut lengths: Vec<f64> = (0..n).map(|_| rng.random_range(0.001..0.45)).collect();
    lengths.sort_by(|a, b| b.total_cmp(a));
    let upper = (1.0 - lengths[0]).min(0.5);
    let eps = rng.random_range(0.01..upper);
    (lengths, eps)
}

#[test]
fn frozen_two_factor_value() {
    // ∫_0^0.2 (0.8 - t)² / 0.4096 dt + 0.1 · 0.9375²
    let oracle = midpoint(|t| shepp_integrand(&[0.2, 0.2], t), 0.0, 0.3, 1_000_000);
    assert!((oracle - 0.328_776_041_666_666_7).abs() < 1e-9);
    let q = product_integral(&[0.2, 0.2], 0.3).unwrap();
    assert!((q.value - oracle).abs() < 1e-9);
}

#[test]
fn pair_integral_matches_riemann_both_branches() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for i in 0..100 {
        let (l, eps): (f64, f64) = if i % 2 == 0 {
            let l = rng.random_range(0.01..0.45);
            (l, rng.random_range(l..1.0 - l))
        } else {
            let l = rng.random_range(0.01..0.9);
            (l, rng.random_range(0.001..l.min(1.0 - l)))
        };
        let closed = pair_factor_integral(l, eps).unwrap();
        let oracle = midpoint(|t| shepp_integrand(&[l], t), 0.0, eps, 200_000);
        assert!((closed - oracle).abs() < 1e-8, "l={l} eps={eps}: {closed} vs {oracle}");
    }
}

#[test]
fn product_integral_matches_riemann() {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    for _ in 0..40 {
        let (lengths, eps) = random_instance(&mut rng, 8);
        let q = product_integral(&lengths, eps).unwrap();
        let oracle = midpoint(|t| shepp_integrand(&lengths, t), 0.0, eps, 1_000_000);
        assert!(
            ((q.value - oracle) / oracle).abs() < 1e-6,
            "{lengths:?} eps={eps}: {} vs {oracle}",
            q.value
        );
        assert!((q.log_value - q.value.ln()).abs() < 1e-14 * q.value.ln().abs().max(1.0));
    }
}

#[test]
fn doubling_nodes_changes_nothing() {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    for _ in 0..100 {
        let (lengths, eps) = random_instance(&mut rng, 60);
        let base = product_integral(&lengths, eps).unwrap();
        let doubled =
            product_integral_with(&lengths, eps, QuadratureOptions { node_multiplier: 2 }).unwrap();
        assert_eq!(doubled.nodes_per_segment, 2 * base.nodes_per_segment);
        assert!(((doubled.value - base.value) / base.value).abs() < 1e-12);
    }
}

#[test]
fn long_sequences_stay_exact() {
    // 300 factors: the first segment carries a degree-300 polynomial.
    let lengths = LengthSequence::inverse_sqrt(1.0, 0.49).generate(300).unwrap();
    let eps = 0.25;
    let base = product_integral(&lengths, eps).unwrap();
    let doubled =
        product_integral_with(&lengths, eps, QuadratureOptions { node_multiplier: 2 }).unwrap();
    assert!(((doubled.log_value - base.log_value) / base.log_value).abs() < 1e-12);
    let oracle = midpoint(|t| shepp_integrand(&lengths, t), 0.0, eps, 2_000_000);
    assert!(((base.value - oracle) / oracle).abs() < 1e-6);
    assert_eq!(base.nodes_per_segment, 151);
}

#[test]
fn bound_chain_and_domination() {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    for _ in 0..500 {
        let (lengths, eps) = random_instance(&mut rng, 40);
        let q = product_integral(&lengths, eps).unwrap();
        let cheb = chebyshev_lower_bound(&lengths, eps).unwrap();
        let cert = shepp_lower_bound(&lengths, eps).unwrap();
        assert!(((cert.bound_log.exp() - cheb) / cheb).abs() < 1e-10);
        assert!(q.value >= cheb - 1e-10 * q.value);
        assert!(cert.bound_log <= q.log_value + 1e-10 * q.log_value.abs().max(1.0));
    }
}

#[test]
fn chebyshev_engine_reproduces_shepp_factors() {
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    for _ in 0..200 {
        let (lengths, eps) = random_instance(&mut rng, 10);
        let fs: Vec<_> = lengths
            .iter()
            .map(|&l| MonotonePiecewiseLinear::shepp_factor(l, eps).unwrap())
            .collect();
        let check = check_inequality(&fs).unwrap();
        assert!(check.holds);
        let scale = eps.powi(lengths.len() as i32 - 1);
        let q = product_integral(&lengths, eps).unwrap();
        let cheb = chebyshev_lower_bound(&lengths, eps).unwrap();
        assert!(((check.lhs / scale - q.value) / q.value).abs() < 1e-10);
        assert!(((check.rhs / scale - cheb) / cheb).abs() < 1e-10);
    }
}

#[test]
fn derivative_probes_match_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    for _ in 0..100 {
        let eps = rng.random_range(0.01..0.49);
        let p = growth_derivative_probe(eps).unwrap();
        let d2 = (1.0 - 2.0 * eps) / eps;
        assert_eq!(p.g0, 1.0);
        assert!(p.d1.abs() < 1e-6);
        assert!(((p.d2 - d2) / d2).abs() < 1e-4);
    }
}

/// First arc pinned at 0 by rotation invariance; second center on a grid.
fn two_arc_cover_fraction(l1: f64, l2: f64, grid: usize) -> f64 {
    let hits = (0..grid)
        .filter(|&i| {
            let mut s = GapSet::full();
            s.apply(&Arc::new(0.0, l1).unwrap());
            s.apply(&Arc::new((i as f64 + 0.5) / grid as f64, l2).unwrap());
            s.is_covered()
        })
        .count();
    hits as f64 / grid as f64
}

#[test]
fn two_arcs_cover_with_probability_point_two() {
    let oracle = two_arc_cover_fraction(0.6, 0.6, 100_000);
    assert!((oracle - 0.2).abs() < 1e-4);
    let mc = coverage_probability(&LengthSequence::constant(0.6), 2, 100_000, 17).unwrap();
    assert!((mc.p_hat - oracle).abs() < 3.0 * mc.std_err, "{mc:?}");
}

#[test]
fn pair_uncovered_matches_center_grid() {
    let grid = 200_000;
    for &(l, t) in &[(0.2, 0.5), (0.2, 0.1), (0.05, 0.7), (0.3, 0.3), (0.45, 0.5)] {
        let miss = (0..grid)
            .filter(|&i| {
                let arc = Arc::new((i as f64 + 0.5) / grid as f64, l).unwrap();
                !arc.covers(0.0) && !arc.covers(t)
            })
            .count() as f64
            / grid as f64;
        let exact = pair_uncovered_exact(&[l], t).unwrap();
        assert!((miss - exact).abs() < 2.0 / grid as f64, "l={l} t={t}: {miss} vs {exact}");
    }
    let mc = pair_uncovered_mc(&[0.2], 0.5, 100_000, 3).unwrap();
    assert!((mc.p_hat - 0.6).abs() < 3.0 * mc.std_err);
}

#[test]
fn gap_moments_match_riemann_and_simulation() {
    let lengths = LengthSequence::inverse_sqrt(0.8, 0.49).generate(8).unwrap();
    let m = gap_moments(&lengths).unwrap();
    // brute-force two-point avoidance by arc-overlap geometry on a t-grid
    let oracle = midpoint(
        |t| {
            lengths
                .iter()
                .map(|&l| {
                    let covers = |x: f64, c: f64| (x - c).rem_euclid(1.0) < l;
                    let grid = 2000;
                    (0..grid)
                        .filter(|&i| {
                            let c = (i as f64 + 0.5) / grid as f64;
                            !covers(0.0, c) && !covers(t, c)
                        })
                        .count() as f64
                        / grid as f64
                })
                .product()
        },
        0.0,
        1.0,
        2000,
    );
    // center-grid counting is only O(1/2000) accurate per arc
    assert!((m.second_moment - oracle).abs() < 5e-3 * oracle, "{} vs {oracle}", m.second_moment);

    let samples = gap_measure_samples(&lengths, 50_000, 12).unwrap();
    let r = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / r;
    let second = samples.iter().map(|g| g * g).sum::<f64>() / r;
    assert!((mean - m.mean).abs() < 4.0 * m.standard_error(50_000));
    assert!((second - m.second_moment).abs() < 0.05 * m.second_moment);
}

#[test]
fn gap_law_with_sample_standard_error() {
    // short prefix, so most replications leave a gap and the sample SE is informative
    let lengths = LengthSequence::inverse_sqrt(1.0, 0.49).generate(10).unwrap();
    let expected: f64 = lengths.iter().map(|l| 1.0 - l).product();
    let samples = gap_measure_samples(&lengths, 10_000, 4).unwrap();
    let r = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / r;
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (r - 1.0);
    assert!((mean - expected).abs() <= 4.0 * (var / r).sqrt());
}
