use epspectra::exact::{faddeev_leverrier, rat, GaussianRational, Rational};
use epspectra::newton::{self, analyze, build_points, lower_hull, DiagramPoint, HullSegment, RingTolerances};
use epspectra::operators::{build_rotated_hamiltonian, Perturbation};
use epspectra::spectra::eigen;
use num_complex::Complex64;
use proptest::prelude::*;

fn perturbations(n: usize) -> Vec<Perturbation> {
    let mut out: Vec<Perturbation> = (1..=n as u32).map(Perturbation::for_power).collect();
    out.push(Perturbation::Detuning);
    out
}

fn analysis(n: usize, p: Perturbation) -> newton::NewtonAnalysis {
    let cp = faddeev_leverrier(&build_rotated_hamiltonian(n, &rat(1, 1), p).unwrap()).unwrap();
    analyze(&cp, RingTolerances::default()).unwrap()
}

fn above_all_segments(points: &[DiagramPoint], segments: &[HullSegment]) -> bool {
    segments.iter().all(|s| {
        let start = points.iter().find(|p| p.k == s.k_min()).unwrap();
        points.iter().all(|p| {
            let line = Rational::from_integer(start.a.into())
                + &s.slope * Rational::from_integer((p.k as i64 - start.k as i64).into());
            Rational::from_integer(p.a.into()) >= line
        })
    })
}

#[test]
fn hull_lies_below_every_point() {
    for n in 1..=12 {
        for p in perturbations(n) {
            let a = analysis(n, p);
            assert!(above_all_segments(&a.points, &a.segments), "N={n}, {p:?}");
            for w in a.segments.windows(2) {
                assert!(w[0].slope < w[1].slope);
                assert_eq!(w[0].k_max(), w[1].k_min());
            }
        }
    }
}

#[test]
fn every_eigenvalue_gets_one_leading_term() {
    for n in 1..=12 {
        for p in perturbations(n) {
            let a = analysis(n, p);
            let roots: usize = a.segments.iter().map(HullSegment::root_count).sum();
            assert_eq!(roots + a.exact_zero_count, n + 1, "N={n}, {p:?}");
            assert_eq!(a.branch_count(), n + 1, "N={n}, {p:?}");
        }
    }
}

#[test]
fn rings_are_regular_polygons() {
    for n in 1..=12 {
        for k in 1..=n {
            let a = analysis(n, Perturbation::for_power(k as u32));
            for ring in a.rings.iter().filter(|r| r.size > 1) {
                let moduli: Vec<f64> = ring.members.iter().map(|z| z.norm()).collect();
                for m in &moduli {
                    assert!((m - ring.modulus).abs() <= 1e-9 * ring.modulus, "N={n}, k={k}");
                }
                let mut phases: Vec<f64> = ring.members.iter().map(|z| z.arg()).collect();
                phases.sort_by(f64::total_cmp);
                let step = std::f64::consts::TAU / ring.size as f64;
                for w in phases.windows(2) {
                    assert!((w[1] - w[0] - step).abs() <= 1e-9, "N={n}, k={k}");
                }
            }
        }
    }
}

#[test]
fn first_order_puiseux_matches_eigenvalues() {
    for n in 1..=12 {
        let h = build_rotated_hamiltonian(n, &rat(1, 1), Perturbation::Interaction).unwrap();
        let a = analysis(n, Perturbation::Interaction);
        for c in [1e-4 / n as f64, 1e-5 / n as f64] {
            let predicted: Vec<Complex64> = a
                .branches
                .iter()
                .map(|b| match b.mu {
                    Some((p, q)) => b.e1 * c.powf(p as f64 / q as f64),
                    None => Complex64::new(0.0, 0.0),
                })
                .collect();
            for z in eigen::eigenvalues(&h.to_float(c)).unwrap() {
                let best = predicted
                    .iter()
                    .map(|w| if w.norm() == 0.0 { z.norm() } else { (z - w).norm() / w.norm() })
                    .fold(f64::INFINITY, f64::min);
                assert!(best <= 5.0 * c.cbrt(), "N={n}, c={c:e}, lambda={z}: {best:e}");
            }
        }
    }
}

#[test]
fn n10_diagram_has_two_slopes() {
    let a = analysis(10, Perturbation::Interaction);
    let slopes: Vec<Rational> = a.segments.iter().map(|s| s.slope.clone()).collect();
    assert_eq!(slopes, [rat(-1, 1), rat(-1, 3)]);
    assert_eq!(a.segments[0].root_count(), 2);
    assert_eq!(a.segments[1].root_count(), 9);
    assert_eq!(a.ring_sizes().iter().filter(|&&s| s == 3).count(), 3);
}

#[test]
fn n4_higher_order_rings() {
    let cubic = analysis(4, Perturbation::HigherOrder(3));
    assert_eq!(cubic.ring_sizes(), [4, 1]);
    assert_eq!(cubic.exponents(), [rat(1, 4)]);
    assert_eq!(cubic.exact_zero_count, 1);
    let quartic = analysis(4, Perturbation::HigherOrder(4));
    assert_eq!(quartic.ring_sizes(), [5]);
    assert_eq!(quartic.exponents(), [rat(1, 5)]);
}

fn points_strategy() -> impl Strategy<Value = Vec<DiagramPoint>> {
    prop::collection::btree_map(0usize..15, 0u32..12, 1..12).prop_map(|m| {
        m.into_iter().map(|(k, a)| DiagramPoint { k, a, f: GaussianRational::from_int(1) }).collect()
    })
}

proptest! {
    #[test]
    fn random_hulls_are_lower_and_convex(points in points_strategy()) {
        let segments = lower_hull(&points).unwrap();
        prop_assert!(above_all_segments(&points, &segments));
        for w in segments.windows(2) {
            prop_assert!(w[0].slope < w[1].slope);
        }
        if points.len() > 1 {
            prop_assert_eq!(segments.first().unwrap().k_min(), points.first().unwrap().k);
            prop_assert_eq!(segments.last().unwrap().k_max(), points.last().unwrap().k);
        }
    }
}

#[test]
fn points_skip_vanishing_coefficients() {
    let cp = faddeev_leverrier(&build_rotated_hamiltonian(3, &rat(1, 1), Perturbation::Interaction).unwrap()).unwrap();
    let ks: Vec<usize> = build_points(&cp).iter().map(|p| p.k).collect();
    for k in 0..=4 {
        assert_eq!(ks.contains(&k), !cp.monic(k).is_zero());
    }
}
