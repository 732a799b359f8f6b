use covering_core::chebyshev::{
    check_inequality, random_monotone_family, two_function_correlation, Direction,
};
use covering_core::covering::{apply_arc, gap_measure_samples, Arc, GapSet};
use covering_core::sequences::{epsilon_window, threshold_index_of, Family};
use covering_core::shepp::{
    growth_eval, pair_factor_eval, shepp_lower_bound, GrowthFunction,
};
use covering_core::LengthSequence;
use proptest::prelude::*;

fn parametric() -> impl Strategy<Value = LengthSequence> {
    let family = prop_oneof![
        Just(Family::Constant),
        Just(Family::Harmonic),
        Just(Family::InverseSqrt),
        (0.0f64..3.0).prop_map(|alpha| Family::PowerDecay { alpha }),
    ];
    (family, 0.01f64..5.0, 0.01f64..0.99).prop_map(|(family, c, cap)| LengthSequence::Capped {
        family,
        c,
        cap,
    })
}

fn descending_lengths(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.001f64..0.45, 1..max_len).prop_map(|mut v| {
        v.sort_by(|a, b| b.total_cmp(a));
        v
    })
}

proptest! {
    #[test]
    fn generated_sequences_are_valid(seq in parametric(), n in 1usize..300) {
        let l = seq.generate(n).unwrap();
        prop_assert_eq!(l.len(), n);
        prop_assert!(l.iter().all(|&x| x > 0.0 && x < 1.0));
        prop_assert!(l.windows(2).all(|w| w[1] <= w[0]));
        prop_assert_eq!(l, seq.generate(n).unwrap());
    }

    #[test]
    fn threshold_grows_as_eps_shrinks(lengths in descending_lengths(50), a in 0.001f64..0.5, b in 0.001f64..0.5) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assert!(threshold_index_of(&lengths, lo) >= threshold_index_of(&lengths, hi));
        prop_assert_eq!(threshold_index_of(&lengths, hi) == 0, lengths[0] < hi);
    }

    #[test]
    fn bound_path_flag(l1 in 0.01f64..0.99, frac in 0.001f64..0.999) {
        let eps = frac * (1.0 - l1);
        let w = epsilon_window(&LengthSequence::explicit(vec![l1]), eps).unwrap();
        prop_assert_eq!(w.bound_path_ok, eps < 0.5);
    }

    #[test]
    fn pair_factor_positive_on_window(lengths in descending_lengths(20), frac in 0.01f64..0.99, s in 0.0f64..1.0) {
        let eps = frac * (1.0 - lengths[0]);
        let t = s * eps;
        let floor = 1.0 - lengths[0] - eps;
        for &l in &lengths {
            let v = pair_factor_eval(l, t).unwrap();
            prop_assert!(v >= floor / ((1.0 - l) * (1.0 - l)) * (1.0 - 1e-12));
            prop_assert!(v > 0.0);
            prop_assert!(pair_factor_eval(l, t * 0.5).unwrap() >= v);
        }
    }

    #[test]
    fn growth_identity(eps in 0.01f64..0.49, x in 0.0f64..0.5) {
        let g = growth_eval(eps, x).unwrap();
        let identity = GrowthFunction::new(eps).unwrap().excess(x);
        prop_assert!((g - 1.0 - identity).abs() < 1e-13);
        prop_assert!(g >= 1.0);
    }

    #[test]
    fn growth_sum_nondecreasing(lengths in descending_lengths(60), frac in 0.01f64..0.99) {
        let eps = (frac * (1.0 - lengths[0])).min(0.49);
        let mut prev = f64::NEG_INFINITY;
        for n in 0..=lengths.len() {
            let cert = shepp_lower_bound(&lengths[..n], eps).unwrap();
            prop_assert!(cert.g_log_sum >= prev);
            prev = cert.g_log_sum;
        }
    }

    #[test]
    fn inequality_holds_for_random_families(seed in any::<u64>(), n in 1usize..=10, segments in 1usize..=6, up in any::<bool>()) {
        let direction = if up { Direction::Increasing } else { Direction::Decreasing };
        let fs = random_monotone_family(seed, n, direction, segments);
        prop_assert!(check_inequality(&fs).unwrap().holds);
        let pair = random_monotone_family(seed ^ 0x5eed, 2, direction, segments);
        prop_assert!(two_function_correlation(&pair[0], &pair[1]).unwrap() >= -1e-12);
    }

    #[test]
    fn gap_set_updates(arcs in prop::collection::vec((0.0f64..1.0, 0.001f64..0.999), 1..80)) {
        let mut state = GapSet::full();
        for (c, l) in arcs {
            let arc = Arc::new(c, l).unwrap();
            let before = state.total_gap();
            let removed = state.apply(&arc);
            prop_assert!(state.check_invariants().is_ok(), "{:?}", state.check_invariants());
            prop_assert!((before - removed - state.total_gap()).abs() < 1e-12);
            prop_assert_eq!(state.is_covered(), state.gaps().is_empty());
            let again = apply_arc(&state, &arc);
            prop_assert_eq!(again.gaps(), state.gaps());
            // points inside the arc are never in a gap
            let probe = (c + 0.5 * l).rem_euclid(1.0);
            prop_assert!(!state.gaps().iter().any(|&(s, e)| s <= probe && probe < e));
        }
    }
}

#[test]
fn gap_structure_survives_many_updates() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
    let mut state = GapSet::full();
    for i in 0..100_000 {
        if state.is_covered() || i % 500 == 0 {
            state = GapSet::full();
        }
        let arc = Arc::new(rng.random::<f64>(), rng.random_range(0.0001..0.05)).unwrap();
        state.apply(&arc);
        state.check_invariants().unwrap();
    }
}

#[test]
fn gap_samples_are_order_independent() {
    let lengths = LengthSequence::harmonic(1.0, 0.5).generate(40).unwrap();
    let a = gap_measure_samples(&lengths, 500, 8).unwrap();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let b = pool.install(|| gap_measure_samples(&lengths, 500, 8).unwrap());
    assert_eq!(a, b);
}
