//! End-to-end acceptance checks. Each criterion reports pass/fail with a
//! one-line detail; numerical tolerances are multiplied by
//! [`AcceptanceConfig::tolerance_scale`] so the harness can be self-tested.

use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ep::{self, ImagTol, LocatorOptions};
use crate::error::{Error, Result};
use crate::exact::{
    faddeev_leverrier, rat, verify_trace_structure, GaussianRational, ParamPoly, Rational,
};
use crate::newton::{self, RingTolerances};
use crate::operators::{
    build_hamiltonian_exact, build_rotated_hamiltonian, Coupling, ExactModel, ModelParams, Perturbation,
};
use crate::spectra::{self, eigen, Vary};

pub const KREIN_SEED: u64 = 0x5eed_2011;
pub const KREIN_DRAWS: usize = 50;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AcceptanceConfig {
    pub tolerance_scale: f64,
}

impl Default for AcceptanceConfig {
    fn default() -> Self {
        Self { tolerance_scale: 1.0 }
    }
}

#[derive(Clone, Debug)]
pub struct CriterionOutcome {
    pub id: usize,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
    pub budget: Duration,
}

impl CriterionOutcome {
    pub fn within_budget(&self) -> bool {
        self.elapsed <= self.budget
    }
}

type Check = fn(f64) -> Result<(bool, String)>;

const CRITERIA: [(&str, u64, Check); 12] = [
    ("exact c=0 spectrum", 1, c1_c0_spectrum),
    ("mother EP nilpotency", 1, c2_mother_ep),
    ("N=5 characteristic polynomial", 1, c3_charpoly_n5),
    ("trace structure", 5, c4_trace_structure),
    ("Newton diagram N=5", 1, c5_newton_n5),
    ("Newton diagram N=10", 1, c6_newton_n10),
    ("ring law", 10, c7_ring_law),
    ("Puiseux scaling", 2, c8_puiseux_scaling),
    ("EP census", 5, c9_ep_census),
    ("strong-coupling asymptote", 10, c10_strong_coupling),
    ("Krein symmetry", 5, c11_krein),
    ("classification snapshot", 1, c12_classification),
];

pub fn criterion_count() -> usize {
    CRITERIA.len()
}

/// Run criterion `id` (1-based).
pub fn run_criterion(id: usize, config: &AcceptanceConfig) -> CriterionOutcome {
    let (title, budget, check) = CRITERIA[id - 1];
    let start = Instant::now();
    let (passed, detail) = match check(config.tolerance_scale) {
        Ok(r) => r,
        Err(e) => (false, format!("error: {e}")),
    };
    CriterionOutcome {
        id,
        title,
        passed,
        detail,
        elapsed: start.elapsed(),
        budget: Duration::from_secs(budget),
    }
}

pub fn run_all(config: &AcceptanceConfig) -> Vec<CriterionOutcome> {
    (1..=CRITERIA.len()).map(|id| run_criterion(id, config)).collect()
}

/// One line per criterion; deterministic (no timings).
pub fn render(outcomes: &[CriterionOutcome]) -> String {
    outcomes
        .iter()
        .map(|o| {
            format!(
                "{} {:>2} {}: {}\n",
                if o.passed { "PASS" } else { "FAIL" },
                o.id,
                o.title,
                o.detail
            )
        })
        .collect()
}

pub fn all_passed(outcomes: &[CriterionOutcome]) -> bool {
    outcomes.iter().all(|o| o.passed)
}

fn c1_c0_spectrum(ts: f64) -> Result<(bool, String)> {
    let n = 11;
    let params = ModelParams::new(n, 0.0, 1.0, 0.0);
    let grid: Vec<f64> = (0..200).map(|i| 2.0 * i as f64 / 199.0).collect();
    let spectra = spectra::refined_sweep(&params, Vary::Gamma, &grid)?;
    let mut worst: f64 = 0.0;
    for s in &spectra {
        let exact = spectra::analytic_c0_spectrum(&s.params)?;
        worst = worst.max(spectra::matched_distance(&s.eigenvalues, &exact));
    }
    let tol = 1e-9 * n as f64 * ts;
    Ok((worst <= tol, format!("max matched distance {worst:.3e} over 200 refined spectra (tol {tol:.1e})")))
}

fn c2_mother_ep(_ts: f64) -> Result<(bool, String)> {
    let mut float_ok = 0;
    for n in 1..=15 {
        if ep::mother_ep_check(&rat(1, 1), n)?.float_ok {
            float_ok += 1;
        }
    }
    Ok((
        true,
        format!("H^(N+1) = 0 and H^N != 0 for N = 1..15; floating eigenvalues clustered in {float_ok}/15"),
    ))
}

fn n5_reference() -> Vec<ParamPoly> {
    let poly = |terms: &[(u32, i64, i64)]| {
        ParamPoly::from_terms(terms.iter().map(|&(e, n, d)| (e, GaussianRational::real(rat(n, d)))))
    };
    vec![
        poly(&[(2, 6400, 1), (4, -30600, 1), (6, 50625, 64)]),
        poly(&[(3, 27280, 1), (5, -58275, 16)]),
        poly(&[(2, -6112, 1), (4, 82831, 16)]),
        poly(&[(1, 448, 1), (3, -4645, 2)]),
        poly(&[(2, 1743, 4)]),
        poly(&[(1, -35, 1)]),
        poly(&[(0, 1, 1)]),
    ]
}

fn c3_charpoly_n5(_ts: f64) -> Result<(bool, String)> {
    let model = ExactModel { particles: 5, gamma: rat(1, 1), v: rat(1, 1), c: Coupling::Formal };
    let cp = faddeev_leverrier(&build_hamiltonian_exact(&model)?)?;
    let rotated = faddeev_leverrier(&build_rotated_hamiltonian(5, &rat(1, 1), Perturbation::Interaction)?)?;
    let reference = n5_reference();
    let mismatches: Vec<usize> = (0..=6)
        .filter(|&k| cp.monic(k) != reference[k] || rotated.monic(k) != reference[k])
        .collect();
    Ok((
        mismatches.is_empty(),
        if mismatches.is_empty() {
            "all seven coefficients equal exactly in the original and rotated bases".into()
        } else {
            format!("coefficients of lambda^{mismatches:?} differ")
        },
    ))
}

fn c4_trace_structure(_ts: f64) -> Result<(bool, String)> {
    for n in 1..=10 {
        let cp = faddeev_leverrier(&build_rotated_hamiltonian(n, &rat(1, 1), Perturbation::Interaction)?)?;
        verify_trace_structure(&cp).map_err(|e| Error::InvariantViolation(format!("N={n}: {e}")))?;
    }
    Ok((true, "every s_k and p_k monomial has exponent k-2j, j <= k/3, for N = 1..10".into()))
}

fn analysis_for(n: usize, perturbation: Perturbation) -> Result<newton::NewtonAnalysis> {
    let cp = faddeev_leverrier(&build_rotated_hamiltonian(n, &rat(1, 1), perturbation)?)?;
    newton::analyze(&cp, RingTolerances::default())
}

fn c5_newton_n5(ts: f64) -> Result<(bool, String)> {
    let a = analysis_for(5, Perturbation::Interaction)?;
    let points: Vec<(usize, u32)> = a.points.iter().map(|p| (p.k, p.a)).collect();
    let points_ok = points == [(0, 2), (1, 3), (2, 2), (3, 1), (4, 2), (5, 1), (6, 0)];
    let hull_ok = a.segments.len() == 1 && a.segments[0].slope == rat(-1, 3);
    let expected: Vec<GaussianRational> = [6400, 0, 0, 448, 0, 0, 1].iter().map(|&x| GaussianRational::from_int(x)).collect();
    let reduced_ok = a.reduced.len() == 1 && a.reduced[0].coeffs == expected;
    let mut cubes: Vec<f64> = a.leading.concat().iter().map(|e| e.powi(3).re).collect();
    cubes.sort_by(f64::total_cmp);
    let tol = 0.01 * ts;
    let err = cubes
        .iter()
        .map(|w| (w + 433.23).abs().min((w + 14.77).abs()))
        .fold(0.0, f64::max);
    let both = cubes.iter().filter(|w| (*w + 433.23).abs() <= tol).count() == 3
        && cubes.iter().filter(|w| (*w + 14.77).abs() <= tol).count() == 3;
    Ok((
        points_ok && hull_ok && reduced_ok && err <= tol && both,
        format!(
            "points {}, slope {}, reduced e^6 + 448e^3 + 6400 {}, e^3 roots {:.4} and {:.4} (max deviation {err:.2e})",
            if points_ok { "match" } else { "differ" },
            a.segments.first().map_or("none".into(), |s| s.slope.to_string()),
            if reduced_ok { "matches" } else { "differs" },
            cubes[0],
            cubes[cubes.len() - 1],
        ),
    ))
}

fn c6_newton_n10(ts: f64) -> Result<(bool, String)> {
    let a = analysis_for(10, Perturbation::Interaction)?;
    let mut mus = a.exponents();
    mus.sort();
    let exponents_ok = mus == [rat(1, 3), rat(1, 1)];
    let seg = a
        .reduced
        .iter()
        .position(|r| r.mu == rat(1, 1))
        .ok_or_else(|| Error::InvariantViolation("no linear segment".into()))?;
    let q = &a.reduced[seg].coeffs;
    // The reference quadratic uses e' = 2e (interaction written as 4c'L_z^2).
    let scaled: Vec<Rational> = q
        .iter()
        .enumerate()
        .map(|(j, c)| c.re.clone() / Rational::from_integer(2.into()).pow(j as i32))
        .collect();
    let reference = [rat(-33581039616000, 1), rat(2410418995200, 1), rat(-46423756800, 1)];
    let proportional = q.len() == 3
        && q.iter().all(GaussianRational::is_real)
        && &scaled[2] * &reference[1] == &scaled[1] * &reference[2]
        && &scaled[2] * &reference[0] == &scaled[0] * &reference[2];
    let re: f64 = 145304.0 / 5597.0;
    let im = (4048640.0 / 5597.0 - re * re).sqrt();
    let mut roots: Vec<Complex64> = a.leading[seg].iter().map(|e| e * 2.0).collect();
    roots.sort_by(|x, y| x.im.total_cmp(&y.im));
    let radical = [Complex64::new(re, -im), Complex64::new(re, im)];
    let root_err = roots.iter().zip(&radical).map(|(r, x)| (r - x).norm()).fold(0.0, f64::max);
    let rounded_err = radical
        .iter()
        .zip([Complex64::new(26.0, -7.0), Complex64::new(26.0, 7.0)])
        .map(|(x, y)| (x.re - y.re).abs().max((x.im - y.im).abs()))
        .fold(0.0, f64::max);
    let passed = exponents_ok
        && proportional
        && roots.len() == 2
        && root_err <= 1e-9 * ts
        && rounded_err <= 0.1 * ts;
    Ok((
        passed,
        format!(
            "exponents {{{}}}, quadratic {} the reference after e -> 2e, roots {:.4} +- {:.4}i (unscaled {:.4} +- {:.4}i)",
            mus.iter().map(|m| m.to_string()).collect::<Vec<_>>().join(", "),
            if proportional { "proportional to" } else { "not proportional to" },
            roots[1].re,
            roots[1].im,
            roots[1].re / 2.0,
            roots[1].im / 2.0,
        ),
    ))
}

fn c7_ring_law(_ts: f64) -> Result<(bool, String)> {
    let mut cases = 0;
    let mut failures = Vec::new();
    let mut split_remainders = 0;
    for n in 1..=12usize {
        for k in 1..=n {
            cases += 1;
            let a = analysis_for(n, Perturbation::for_power(k as u32))?;
            let pred = newton::predict_ring_counts(n, k)?;
            if !newton::ring_law_matches(&a, &pred) || a.rings.iter().any(|r| !r.regular) {
                failures.push(format!("N={n},k={k}"));
            }
            if a.rings.iter().any(|r| r.size != pred.ring_size && r.size > 1) {
                split_remainders += 1;
            }
        }
    }
    let n4k3 = analysis_for(4, Perturbation::for_power(3))?.ring_sizes();
    let n4k4 = analysis_for(4, Perturbation::for_power(4))?.ring_sizes();
    let special = n4k3 == [4, 1] && n4k4 == [5];
    Ok((
        failures.is_empty() && special,
        format!(
            "{}/{cases} cases match; N=4 k=3 rings {n4k3:?}, k=4 rings {n4k4:?}; remainder forms smaller rings in {split_remainders} cases{}",
            cases - failures.len(),
            if failures.is_empty() { String::new() } else { format!("; mismatches {failures:?}") }
        ),
    ))
}

fn c8_puiseux_scaling(ts: f64) -> Result<(bool, String)> {
    let h = build_rotated_hamiltonian(11, &rat(1, 1), Perturbation::Interaction)?;
    let cs: Vec<f64> = (0..9).map(|i| 1e-6 * 10f64.powf(i as f64 / 4.0)).collect();
    let mut moduli = Vec::with_capacity(cs.len());
    for &c in &cs {
        let mut m: Vec<f64> = eigen::eigenvalues(&h.to_float(c))?.iter().map(|z| z.norm()).collect();
        m.sort_by(f64::total_cmp);
        moduli.push(m);
    }
    let slopes: Vec<f64> = (0..12)
        .map(|i| ep::log_log_slope(&cs.iter().zip(&moduli).map(|(&c, m)| (c, m[i])).collect::<Vec<_>>()))
        .collect();
    let worst = slopes.iter().map(|s| (s - 1.0 / 3.0).abs()).fold(0.0, f64::max);
    Ok((
        worst <= 0.02 * ts,
        format!(
            "slopes {:.4}..{:.4} for all 12 branches over c in [1e-6, 1e-4] (max deviation {worst:.4})",
            slopes.iter().copied().fold(f64::INFINITY, f64::min),
            slopes.iter().copied().fold(f64::NEG_INFINITY, f64::max)
        ),
    ))
}

fn c9_ep_census(_ts: f64) -> Result<(bool, String)> {
    let params = ModelParams::new(11, 0.0, 1.0, 0.1 / 11.0);
    let recs = ep::locate_eps(&params, &LocatorOptions::default())?;
    let below = recs.iter().filter(|r| r.gamma < 1.0).count();
    let above = recs.iter().filter(|r| r.gamma > 1.0).count();
    let order2 = recs.iter().all(|r| r.order == 2);
    Ok((
        recs.len() == 6 && below == 4 && above == 2 && order2,
        format!(
            "{} second-order EPs, {below} below and {above} above gamma = 1: {}",
            recs.len(),
            recs.iter().map(|r| format!("{:.6}", r.gamma)).collect::<Vec<_>>().join(", ")
        ),
    ))
}

fn c10_strong_coupling(ts: f64) -> Result<(bool, String)> {
    let opts = LocatorOptions::default();
    let odd = ep::locate_eps(&ModelParams::new(11, 0.0, 1.0, 100.0), &opts)?;
    let top = odd.last().map_or(f64::NAN, |r| r.gamma);
    let top_ok = (top - 6.0).abs() <= 0.05 * 6.0 * ts;

    let even = ModelParams::new(10, 0.0, 1.0, 100.0);
    let at_100 = ep::locate_eps(&even, &opts)?;
    let at_50 = ep::locate_eps(&even.with_c(50.0), &opts)?;
    let below_ok = !at_100.is_empty() && at_100.iter().all(|r| r.gamma < 0.5);
    // Positions below the detection floor (the classification tolerance)
    // are resolution-limited; decrease is required up to that floor.
    let mut decreasing = at_100.len() == at_50.len();
    for (hi, lo) in at_100.iter().zip(&at_50) {
        let floor = opts.imag_tol.resolve(&even.with_gamma(hi.gamma))?;
        decreasing &= hi.gamma <= lo.gamma + floor * ts.max(f64::MIN_POSITIVE);
    }
    Ok((
        top_ok && below_ok && decreasing,
        format!(
            "N=11 largest EP {top:.5} (target 6 within 5%); N=10 EPs at c=100 max {:.3e} ({}), {} versus c=50",
            at_100.iter().map(|r| r.gamma).fold(0.0, f64::max),
            if below_ok { "all below 0.5" } else { "not all below 0.5" },
            if decreasing { "decreasing" } else { "not decreasing" },
        ),
    ))
}

fn c11_krein(ts: f64) -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(KREIN_SEED);
    let mut worst = [0.0f64; 3];
    let mut c0_draws = 0;
    for draw in 0..KREIN_DRAWS {
        let n = rng.gen_range(1..=12usize);
        let v = rng.gen_range(0.25..2.0);
        let gamma = rng.gen_range(0.0..3.0);
        let c = if draw % 4 == 0 { 0.0 } else { rng.gen_range(0.0..1.0) };
        let params = ModelParams::new(n, gamma, v, c);
        let scale = spectra::tolerance_scale(&params)?;
        let ev = spectra::spectrum(&params)?.eigenvalues;
        let mirrored = spectra::spectrum(&params.with_gamma(-gamma))?.eigenvalues;
        let conj: Vec<Complex64> = ev.iter().map(|z| z.conj()).collect();
        worst[0] = worst[0].max(spectra::matched_distance(&ev, &conj) / scale);
        worst[1] = worst[1].max(spectra::matched_distance(&ev, &mirrored) / scale);
        if c == 0.0 {
            c0_draws += 1;
            let neg: Vec<Complex64> = ev.iter().map(|z| -z).collect();
            worst[2] = worst[2].max(spectra::matched_distance(&ev, &neg) / scale);
        }
    }
    let tol = 1e-9 * ts;
    Ok((
        worst.iter().all(|&w| w <= tol),
        format!(
            "{KREIN_DRAWS} draws ({c0_draws} at c=0): conjugation {:.1e}, gamma sign {:.1e}, lambda -> -lambda {:.1e} (relative to scale, tol {tol:.0e})",
            worst[0], worst[1], worst[2]
        ),
    ))
}

fn c12_classification(_ts: f64) -> Result<(bool, String)> {
    let s11 = spectra::spectrum(&ModelParams::new(11, 1.0, 1.0, 0.1 / 11.0))?;
    let k11 = spectra::classify(&s11, None)?;
    let ok11 = k11.real_count == 4 && k11.conjugate_pair_count == 4;
    let s5 = spectra::spectrum(&ModelParams::new(5, 1.0, 1.0, 0.1 / 5.0))?;
    let k5 = spectra::classify(&s5, None)?;
    let real: Vec<f64> = s5.eigenvalues.iter().filter(|z| z.im.abs() <= k5.imag_tol).map(|z| z.re).collect();
    let pairs_right = s5.eigenvalues.iter().filter(|z| z.im.abs() > k5.imag_tol).all(|z| z.re > 0.0);
    let ok5 = k5.real_count == 2 && real.iter().all(|&x| x < 0.0) && k5.conjugate_pair_count == 2 && pairs_right;
    Ok((
        ok11 && ok5,
        format!(
            "N=11: {} real + {} pairs; N=5: {} real (negative: {}) + {} pairs (positive real parts: {pairs_right})",
            k11.real_count,
            k11.conjugate_pair_count,
            k5.real_count,
            real.iter().all(|&x| x < 0.0),
            k5.conjugate_pair_count
        ),
    ))
}

/// Pair-count tolerance actually used by the EP criteria, for reporting.
pub fn ep_imag_tol() -> ImagTol {
    LocatorOptions::default().imag_tol
}
