use epspectra::ep::{
    self, complex_pair_count, ep_map, locate_eps, log_log_slope, splitting_profile, strong_coupling_validation,
    width_split_heuristic, EpMethod, ImagTol, LocatorOptions, WIDTH_SPLIT_MERGE, WIDTH_SPLIT_THRESHOLD,
};
use epspectra::operators::ModelParams;

fn n11(c: f64) -> ModelParams {
    ModelParams::new(11, 0.0, 1.0, c)
}

#[test]
fn small_coupling_census() {
    let recs = locate_eps(&n11(0.1 / 11.0), &LocatorOptions::default()).unwrap();
    assert_eq!(recs.len(), 6);
    assert_eq!(recs.iter().filter(|r| r.gamma < 1.0).count(), 4);
    assert!(recs.iter().all(|r| r.order == 2 && r.method == EpMethod::PairCountBisection));
    assert!(recs.iter().all(|r| r.bracket_width <= 1e-9));
    for w in recs.windows(2) {
        assert!(w[0].gamma < w[1].gamma);
    }
}

#[test]
fn first_ep_moves_down_with_coupling() {
    let grid: Vec<f64> = (0..12).map(|i| 0.1 * (800f64).powf(i as f64 / 11.0) / 11.0).collect();
    let map = ep_map(&n11(1.0), &grid, &LocatorOptions::default()).unwrap().into_result().unwrap();
    let first = map.curve(0);
    assert_eq!(first.len(), grid.len());
    // Below about 1e-8 the first EP is under the bisection and width
    // resolution; there the curve only has to stay at that floor.
    let floor = 1e-8;
    assert!(first[0].1 > 0.7 && first.last().unwrap().1 < floor);
    for w in first.windows(2) {
        if w[0].1 > floor {
            assert!(w[1].1 < w[0].1, "{:?} then {:?}", w[0], w[1]);
        } else {
            assert!(w[1].1 <= floor, "{:?} then {:?}", w[0], w[1]);
        }
    }
}

#[test]
fn odd_n_asymptote() {
    let recs = locate_eps(&n11(100.0), &LocatorOptions::default()).unwrap();
    let top = recs.last().unwrap().gamma;
    assert!((top - 6.0).abs() <= 0.05 * 6.0, "{top}");
}

#[test]
fn moderate_coupling_top_ep_is_below_the_asymptote() {
    // At cN = 80 the outermost EP has not yet reached v(N+1)/2.
    let recs = locate_eps(&n11(80.0 / 11.0), &LocatorOptions::default()).unwrap();
    let top = recs.last().unwrap().gamma;
    assert!((5.45..5.55).contains(&top), "{top}");
}

#[test]
fn heuristic_agrees_with_bisection() {
    for c in [0.1 / 11.0, 0.5 / 11.0] {
        let exact = locate_eps(&n11(c), &LocatorOptions::default()).unwrap();
        let heur = width_split_heuristic(&n11(c), WIDTH_SPLIT_THRESHOLD, WIDTH_SPLIT_MERGE, &LocatorOptions::default()).unwrap();
        assert_eq!(heur.len(), exact.len(), "c={c}");
        for (h, e) in heur.iter().zip(&exact) {
            assert!((h.gamma - e.gamma).abs() <= 1e-3, "c={c}: {} vs {}", h.gamma, e.gamma);
            assert_eq!(h.method, EpMethod::WidthSplitHeuristic);
        }
    }
}

#[test]
fn heuristic_is_stable_in_its_threshold() {
    let opts = LocatorOptions::default();
    let reference = width_split_heuristic(&n11(0.1 / 11.0), 1e-4, WIDTH_SPLIT_MERGE, &opts).unwrap();
    for threshold in [1e-5, 3e-5, 3e-4, 1e-3] {
        let recs = width_split_heuristic(&n11(0.1 / 11.0), threshold, WIDTH_SPLIT_MERGE, &opts).unwrap();
        assert_eq!(recs.len(), reference.len(), "threshold {threshold}");
        for (a, b) in recs.iter().zip(&reference) {
            assert!((a.gamma - b.gamma).abs() <= 1e-3, "threshold {threshold}");
        }
    }
}

#[test]
fn heuristic_sees_one_mother_ep_without_interaction() {
    let recs = width_split_heuristic(&n11(0.0), WIDTH_SPLIT_THRESHOLD, WIDTH_SPLIT_MERGE, &LocatorOptions::default()).unwrap();
    assert_eq!(recs.len(), 1, "{recs:?}");
    assert!((recs[0].gamma - 1.0).abs() <= 1e-2);
    assert_eq!(recs[0].order, 12);
}

#[test]
fn pairs_open_as_square_roots() {
    let params = n11(0.1 / 11.0);
    let opts = LocatorOptions { tol: 1e-13, ..LocatorOptions::default() };
    let deltas = [1e-8, 1e-7, 1e-6, 1e-5];
    for r in locate_eps(&params, &opts).unwrap() {
        let profile = splitting_profile(&params, r.gamma, &deltas).unwrap();
        let slope = log_log_slope(&profile);
        assert!((slope - 0.5).abs() <= 0.05, "EP at {}: slope {slope}", r.gamma);
    }
}

#[test]
fn two_particle_ep_tends_to_the_mother_ep() {
    let mut last = 0.0;
    for c in [1e-2, 1e-4, 1e-6, 1e-8] {
        let recs = locate_eps(&ModelParams::new(2, 0.0, 1.0, c), &LocatorOptions::default()).unwrap();
        let nearest = recs.iter().map(|r| r.gamma).fold(f64::NAN, |a, g| if (g - 1.0).abs() < (a - 1.0).abs() || a.is_nan() { g } else { a });
        assert!((nearest - 1.0).abs() < (last - 1.0f64).abs() || last == 0.0);
        last = nearest;
    }
    assert!((last - 1.0).abs() < 1e-4, "{last}");
}

#[test]
fn single_point_map_matches_locator() {
    let opts = LocatorOptions::default();
    let map = ep_map(&n11(1.0), &[0.3], &opts).unwrap();
    assert!(map.failures.is_empty());
    assert_eq!(map.records[0], locate_eps(&n11(0.3), &opts).unwrap());
    assert_eq!(map.curve_count(), map.records[0].len());
}

#[test]
fn pair_counts_are_monotone_only_within_cells() {
    let tol = ImagTol::Relative(ep::EP_IMAG_TOL);
    let params = n11(0.1 / 11.0);
    assert_eq!(complex_pair_count(&params.with_gamma(0.5), tol).unwrap(), 0);
    assert_eq!(complex_pair_count(&params.with_gamma(1.0), tol).unwrap(), 4);
    assert_eq!(complex_pair_count(&params.with_gamma(1.5), tol).unwrap(), 6);
}

#[test]
fn strong_coupling_levels() {
    let odd = strong_coupling_validation(11, 1.0, 2.0, 200.0).unwrap();
    assert!(odd.within_bound, "{}", odd.max_error);
    assert_eq!(odd.levels.len(), 12);
    let even = strong_coupling_validation(10, 1.0, 1.0, 200.0).unwrap();
    assert!(even.within_bound, "{}", even.max_error);
    let free = strong_coupling_validation(7, 0.0, 0.4, 30.0).unwrap();
    assert_eq!(free.max_error, 0.0);
}

#[test]
fn mother_ep_for_every_size() {
    for n in 1..=15 {
        let r = ep::mother_ep_check(&epspectra::exact::rat(3, 2), n).unwrap();
        assert_eq!(r.nilpotency_index, n + 1);
    }
}
