//! Second-order exceptional points along `γ`, EP maps over `(c, γ)`, the
//! mother EP at `c = 0` and strong-coupling asymptotics.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::Rational;
use crate::operators::{build_hamiltonian, build_hamiltonian_exact, Basis, Coupling, ExactModel, ModelParams};
use crate::spectra::{self, assignment, eigen};

/// Relative classification tolerance used while bracketing transitions.
/// The PT solver returns real eigenvalues with a zero imaginary part, so
/// this only needs to clear rounding noise.
pub const EP_IMAG_TOL: f64 = 1e-12;
pub const DEFAULT_BISECTION_TOL: f64 = 1e-9;
pub const DEFAULT_COARSE_CELLS: usize = 256;
pub const WIDTH_SPLIT_THRESHOLD: f64 = 1e-4;
/// Heuristic detections closer than this are reported once.
pub const WIDTH_SPLIT_MERGE: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EpMethod {
    PairCountBisection,
    WidthSplitHeuristic,
    Analytic,
}

impl EpMethod {
    pub fn name(self) -> &'static str {
        match self {
            EpMethod::PairCountBisection => "pair-count-bisection",
            EpMethod::WidthSplitHeuristic => "width-split-heuristic",
            EpMethod::Analytic => "analytic",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EPRecord {
    pub gamma: f64,
    pub c: f64,
    pub v: f64,
    pub particles: usize,
    pub order: usize,
    pub method: EpMethod,
    pub bracket_width: f64,
}

/// Classification tolerance, either absolute or relative to
/// `max(1, ‖H‖_max)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum ImagTol {
    Relative(f64),
    Absolute(f64),
}

impl ImagTol {
    pub fn resolve(self, params: &ModelParams) -> Result<f64> {
        match self {
            ImagTol::Absolute(t) => Ok(t),
            ImagTol::Relative(r) => Ok(r * spectra::tolerance_scale(params)?),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LocatorOptions {
    pub gamma_min: f64,
    /// Defaults to `|v|·(N+3)/2`.
    pub gamma_max: Option<f64>,
    pub coarse_cells: usize,
    pub tol: f64,
    pub imag_tol: ImagTol,
}

impl Default for LocatorOptions {
    fn default() -> Self {
        Self {
            gamma_min: 0.0,
            gamma_max: None,
            coarse_cells: DEFAULT_COARSE_CELLS,
            tol: DEFAULT_BISECTION_TOL,
            imag_tol: ImagTol::Relative(EP_IMAG_TOL),
        }
    }
}

impl LocatorOptions {
    pub fn gamma_range(&self, params: &ModelParams) -> (f64, f64) {
        let hi = self
            .gamma_max
            .unwrap_or(params.v.abs() * (params.particles as f64 + 3.0) / 2.0);
        (self.gamma_min, hi)
    }

    fn validate(&self, params: &ModelParams) -> Result<()> {
        let (lo, hi) = self.gamma_range(params);
        if !(lo >= 0.0 && hi > lo && hi.is_finite()) {
            return Err(Error::InvalidInput(format!("gamma range [{lo}, {hi}] is not valid")));
        }
        if self.coarse_cells == 0 || !(self.tol > 0.0) {
            return Err(Error::InvalidInput("need coarse_cells >= 1 and tol > 0".into()));
        }
        Ok(())
    }
}

/// Number of complex-conjugate eigenvalue pairs at `params.gamma`.
pub fn complex_pair_count(params: &ModelParams, imag_tol: ImagTol) -> Result<usize> {
    if params.pert_power % 2 != 0 {
        return Err(Error::InvalidInput("pair counting needs a PT-symmetric Hamiltonian".into()));
    }
    let spectrum = spectra::spectrum(params)?;
    let tol = imag_tol.resolve(params)?;
    Ok(spectra::classify(&spectrum, Some(tol))?.conjugate_pair_count)
}

/// Extra halvings allowed below the requested tolerance to separate
/// transitions that share one cell.
pub const MAX_EXTRA_LEVELS: u32 = 64;

struct Scan<'a> {
    params: &'a ModelParams,
    opts: &'a LocatorOptions,
    method: EpMethod,
}

impl Scan<'_> {
    fn count(&self, gamma: f64) -> Result<usize> {
        complex_pair_count(&self.params.with_gamma(gamma), self.opts.imag_tol).map_err(|e| {
            Error::AtGridPoint { param: "gamma", value: gamma, source: Box::new(e) }
        })
    }

    fn record(&self, gamma: f64, order: usize, width: f64) -> EPRecord {
        EPRecord {
            gamma,
            c: self.params.c,
            v: self.params.v,
            particles: self.params.particles,
            order,
            method: self.method,
            bracket_width: width,
        }
    }

    fn coarse(&self) -> Result<(Vec<f64>, Vec<usize>)> {
        self.opts.validate(self.params)?;
        let (lo, hi) = self.opts.gamma_range(self.params);
        let cells = self.opts.coarse_cells;
        let grid: Vec<f64> = (0..=cells)
            .map(|i| if i == cells { hi } else { lo + (hi - lo) * i as f64 / cells as f64 })
            .collect();
        let counts = grid.par_iter().map(|&g| self.count(g)).collect::<Result<_>>()?;
        Ok((grid, counts))
    }

    fn bisect(&self, a: f64, fa: usize, b: f64, fb: usize, out: &mut Vec<EPRecord>) -> Result<()> {
        if fa == fb {
            return Ok(());
        }
        let jump = fa.abs_diff(fb);
        let width = b - a;
        let mid = 0.5 * (a + b);
        if width <= self.opts.tol && jump == 1 {
            out.push(self.record(mid, 2, width));
            return Ok(());
        }
        let floor = self.opts.tol * 0.5f64.powi(MAX_EXTRA_LEVELS as i32);
        if width <= floor || mid <= a || mid >= b {
            return Err(Error::Unresolved(format!(
                "{jump} transitions inside gamma cell [{a:e}, {b:e}] at c = {}",
                self.params.c
            )));
        }
        let fm = self.count(mid)?;
        self.bisect(a, fa, mid, fm, out)?;
        self.bisect(mid, fm, b, fb, out)
    }

    fn locate(&self) -> Result<Vec<EPRecord>> {
        let (grid, counts) = self.coarse()?;
        let found: Vec<Vec<EPRecord>> = (0..grid.len() - 1)
            .into_par_iter()
            .map(|i| {
                let mut out = Vec::new();
                self.bisect(grid[i], counts[i], grid[i + 1], counts[i + 1], &mut out)?;
                Ok(out)
            })
            .collect::<Result<_>>()?;
        let mut records: Vec<EPRecord> = found.into_iter().flatten().collect();
        records.sort_by(|a, b| a.gamma.total_cmp(&b.gamma));
        Ok(records)
    }

    /// Smallest `γ` at which the pair count first reaches each level.
    fn first_crossings(&self) -> Result<Vec<EPRecord>> {
        let (grid, counts) = self.coarse()?;
        let top = counts.iter().copied().max().unwrap_or(0);
        let mut records = Vec::new();
        for level in counts[0] + 1..=top {
            let i = counts.iter().position(|&n| n >= level).expect("level reached");
            let (mut a, mut b) = (grid[i - 1], grid[i]);
            while b - a > self.opts.tol {
                let mid = 0.5 * (a + b);
                if mid <= a || mid >= b {
                    break;
                }
                if self.count(mid)? >= level {
                    b = mid;
                } else {
                    a = mid;
                }
            }
            records.push(self.record(0.5 * (a + b), 2, b - a));
        }
        records.sort_by(|a, b| a.gamma.total_cmp(&b.gamma));
        Ok(records)
    }
}

/// Second-order EPs for `γ` in the option range: a coarse scan of the
/// conjugate-pair count followed by bisection of every change.
pub fn locate_eps(params: &ModelParams, opts: &LocatorOptions) -> Result<Vec<EPRecord>> {
    if !(params.c > 0.0) {
        return Err(Error::InvalidInput(
            "locate_eps needs c > 0; use mother_ep_check at c = 0".into(),
        ));
    }
    Scan { params, opts, method: EpMethod::PairCountBisection }.locate()
}

/// For each newly complex pair, the smallest `γ` at which two formerly
/// equal widths `Im λ` differ by more than `threshold` (a conjugate pair with
/// `|Im λ| > threshold/2`). Detections closer than `merge` are chained into
/// one record whose order counts the eigenvalues involved.
pub fn width_split_heuristic(
    params: &ModelParams,
    threshold: f64,
    merge: f64,
    opts: &LocatorOptions,
) -> Result<Vec<EPRecord>> {
    if !(params.c >= 0.0) || !(threshold > 0.0) || !(merge >= 0.0) {
        return Err(Error::InvalidInput("need c >= 0, threshold > 0 and merge >= 0".into()));
    }
    let opts = LocatorOptions { imag_tol: ImagTol::Absolute(threshold / 2.0), ..*opts };
    let scan = Scan { params, opts: &opts, method: EpMethod::WidthSplitHeuristic };
    let mut merged: Vec<EPRecord> = Vec::new();
    let mut last_gamma = f64::NEG_INFINITY;
    for r in scan.first_crossings()? {
        let gap = r.gamma - last_gamma;
        last_gamma = r.gamma;
        match merged.last_mut() {
            Some(first) if gap <= merge => {
                first.order += r.order;
                first.bracket_width = r.gamma + r.bracket_width / 2.0 - (first.gamma - first.bracket_width / 2.0);
            }
            _ => merged.push(r),
        }
    }
    Ok(merged)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EpFailure {
    pub c: f64,
    pub message: String,
}

/// EP positions over a grid of `c`, each list sorted ascending in `γ̃`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EPMap {
    pub particles: usize,
    pub v: f64,
    pub options: LocatorOptions,
    pub c_grid: Vec<f64>,
    pub records: Vec<Vec<EPRecord>>,
    pub failures: Vec<EpFailure>,
}

impl EPMap {
    /// Curve `k` (0-based): `(c, γ̃_k)` wherever at least `k+1` EPs exist.
    pub fn curve(&self, k: usize) -> Vec<(f64, f64)> {
        self.c_grid
            .iter()
            .zip(&self.records)
            .filter_map(|(&c, recs)| recs.get(k).map(|r| (c, r.gamma)))
            .collect()
    }

    pub fn curve_count(&self) -> usize {
        self.records.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn into_result(self) -> Result<Self> {
        match self.failures.first() {
            None => Ok(self),
            Some(f) => Err(Error::AtGridPoint {
                param: "c",
                value: f.c,
                source: Box::new(Error::InvalidInput(f.message.clone())),
            }),
        }
    }
}

/// [`locate_eps`] at every `c`; failing grid points are collected in
/// [`EPMap::failures`] and leave an empty record list.
pub fn ep_map(params: &ModelParams, c_grid: &[f64], opts: &LocatorOptions) -> Result<EPMap> {
    if c_grid.iter().any(|&c| !(c > 0.0 && c.is_finite())) {
        return Err(Error::InvalidInput("ep_map needs a positive c grid".into()));
    }
    let results: Vec<Result<Vec<EPRecord>>> = c_grid
        .par_iter()
        .map(|&c| locate_eps(&params.with_c(c), opts))
        .collect();
    let mut records = Vec::with_capacity(c_grid.len());
    let mut failures = Vec::new();
    for (&c, r) in c_grid.iter().zip(results) {
        match r {
            Ok(recs) => records.push(recs),
            Err(e) => {
                failures.push(EpFailure { c, message: e.to_string() });
                records.push(Vec::new());
            }
        }
    }
    Ok(EPMap {
        particles: params.particles,
        v: params.v,
        options: *opts,
        c_grid: c_grid.to_vec(),
        records,
        failures,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MotherEpReport {
    pub particles: usize,
    pub v: f64,
    /// Smallest `j` with `H^j = 0`.
    pub nilpotency_index: usize,
    pub norm: f64,
    pub max_eigenvalue_modulus: f64,
    pub float_tolerance: f64,
    pub float_ok: bool,
}

/// Relative eigenvalue tolerance at an order-`m` EP: the larger of `1e-6`
/// and `4·ε^(1/m)`, the root sensitivity of `λ^m` under rounding.
pub fn mother_ep_tolerance(order: usize) -> f64 {
    (4.0 * f64::EPSILON.powf(1.0 / order as f64)).max(1e-6)
}

/// Checks that `H(γ = v, c = 0)` is nilpotent of index exactly `N+1`
/// (exact arithmetic) and that its floating eigenvalues cluster at zero.
pub fn mother_ep_check(v: &Rational, particles: usize) -> Result<MotherEpReport> {
    let model = ExactModel {
        particles,
        gamma: v.clone(),
        v: v.clone(),
        c: Coupling::Value(Rational::from_integer(0.into())),
    };
    let h = build_hamiltonian_exact(&model)?;
    let h = h.exact().expect("exact builder");
    let below = h.pow(particles as u32);
    let full = &below * h;
    if !full.is_zero() || below.is_zero() {
        return Err(Error::InvariantViolation(format!(
            "H at gamma = v, c = 0 is not nilpotent of index {} for N = {particles}",
            particles + 1
        )));
    }
    let vf = crate::exact::rational_to_f64(v);
    let params = ModelParams::new(particles, vf, vf, 0.0);
    let hf = build_hamiltonian(&params, Basis::Orthonormal)?;
    let hf = hf.as_float().expect("float builder");
    let norm = eigen::max_abs(hf);
    let max_eigenvalue_modulus = eigen::eigenvalues(hf)?.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let float_tolerance = mother_ep_tolerance(particles + 1) * norm;
    Ok(MotherEpReport {
        particles,
        v: vf,
        nilpotency_index: particles + 1,
        norm,
        max_eigenvalue_modulus,
        float_tolerance,
        float_ok: max_eigenvalue_modulus <= float_tolerance,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StrongCouplingPrediction {
    pub m_z: f64,
    /// Zeroth-order energy `2c·m_z²` per unit `c`, i.e. `2m_z²`.
    pub e0_per_c: f64,
    pub e1: Complex64,
    pub gamma_inf: Option<f64>,
}

/// First-order large-`c` corrections for every level `m_z`.
pub fn strong_coupling_predictions(particles: usize, v: f64, gamma: f64) -> Vec<StrongCouplingPrediction> {
    let l = particles as f64 / 2.0;
    let odd = particles % 2 == 1;
    let w = v.abs() * (particles as f64 + 1.0) / 2.0;
    (0..=particles)
        .map(|n| {
            let m = n as f64 - l;
            let (e1, gamma_inf) = if odd && m.abs() == 0.5 {
                let root = Complex64::new(w * w - gamma * gamma, 0.0).sqrt();
                (if m > 0.0 { root } else { -root }, Some(w))
            } else {
                (Complex64::new(0.0, -2.0 * gamma * m), None)
            };
            StrongCouplingPrediction { m_z: m, e0_per_c: 2.0 * m.powi(2), e1, gamma_inf }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StrongCouplingReport {
    pub particles: usize,
    pub v: f64,
    pub gamma: f64,
    pub c: f64,
    pub bound: f64,
    /// Per level: `(m_z, predicted, numerical, relative error)`.
    pub levels: Vec<(f64, Complex64, Complex64, f64)>,
    pub max_error: f64,
    pub within_bound: bool,
}

/// Compares `2c·m_z² + E₁` with the numerical spectrum under optimal
/// matching; errors are relative to `max(1, |prediction|)` and bounded by
/// `5·|v|·N/c`.
pub fn strong_coupling_validation(particles: usize, v: f64, gamma: f64, c: f64) -> Result<StrongCouplingReport> {
    let params = ModelParams::new(particles, gamma, v, c);
    let numeric = spectra::refined_spectrum(&params)?.eigenvalues;
    let preds = strong_coupling_predictions(particles, v, gamma);
    let predicted: Vec<Complex64> = preds
        .iter()
        .map(|p| Complex64::new(2.0 * c * p.m_z.powi(2), 0.0) + p.e1)
        .collect();
    let cost: Vec<Vec<f64>> = predicted
        .iter()
        .map(|p| numeric.iter().map(|z| (p - z).norm() / p.norm().max(1.0)).collect())
        .collect();
    let assign = assignment::min_cost_assignment(&cost);
    let levels: Vec<(f64, Complex64, Complex64, f64)> = preds
        .iter()
        .zip(&assign)
        .enumerate()
        .map(|(i, (p, &j))| (p.m_z, predicted[i], numeric[j], cost[i][j]))
        .collect();
    let max_error = levels.iter().map(|l| l.3).fold(0.0, f64::max);
    let bound = 5.0 * v.abs() * particles as f64 / c;
    Ok(StrongCouplingReport {
        particles,
        v,
        gamma,
        c,
        bound,
        levels,
        max_error,
        within_bound: max_error <= bound,
    })
}

/// Width of the pair born at `gamma_tilde` at offsets `deltas` on the side
/// where it is complex: the smallest positive `Im λ` among pairs absent on
/// the other side.
pub fn splitting_profile(params: &ModelParams, gamma_tilde: f64, deltas: &[f64]) -> Result<Vec<(f64, f64)>> {
    let probe = deltas.iter().copied().fold(f64::INFINITY, f64::min);
    let tol = ImagTol::Relative(EP_IMAG_TOL);
    let above = complex_pair_count(&params.with_gamma(gamma_tilde + probe), tol)?;
    let below = complex_pair_count(&params.with_gamma(gamma_tilde - probe), tol)?;
    if above == below {
        return Err(Error::InvalidInput(format!("no pair transition at gamma = {gamma_tilde}")));
    }
    let sign = if above > below { 1.0 } else { -1.0 };
    deltas
        .iter()
        .map(|&d| {
            let ev = spectra::spectrum(&params.with_gamma(gamma_tilde + sign * d))?.eigenvalues;
            let width = ev
                .iter()
                .filter(|z| z.im > 0.0)
                .map(|z| z.im)
                .fold(f64::INFINITY, f64::min);
            Ok((d, width))
        })
        .collect()
}

/// Least-squares slope of `log y` against `log x`.
pub fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (xs, ys): (Vec<f64>, Vec<f64>) = points.iter().map(|(x, y)| (x.ln(), y.ln())).unzip();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}
