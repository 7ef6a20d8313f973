//! Floating-point spectra, parameter sweeps, branch matching and
//! classification into real eigenvalues and complex-conjugate pairs.

pub mod assignment;
pub mod eigen;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::Rational;
use crate::operators::{build_generalized, build_hamiltonian, Basis, ModelParams, OperatorMatrix};

pub use eigen::{max_abs, min_singular_value, pt_eigenvalues, sort_eigenvalues};

/// Dyadic refinement levels applied to flagged sweep steps.
pub const MAX_REFINEMENT_LEVELS: usize = 12;
/// A step is flagged when its largest branch jump exceeds this multiple of the
/// median step.
pub const JUMP_FLAG_RATIO: f64 = 10.0;
/// Default `imag_tol = 1e-9·scale` for sweep classification.
pub const SWEEP_IMAG_TOL: f64 = 1e-9;

/// Eigenvalues `λ_n = E_n − iΓ_n` at one parameter point, sorted by real then
/// imaginary part.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub params: ModelParams,
    pub eigenvalues: Vec<Complex64>,
}

/// Swept parameter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Vary {
    Gamma,
    C,
}

impl Vary {
    pub fn name(self) -> &'static str {
        match self {
            Vary::Gamma => "gamma",
            Vary::C => "c",
        }
    }

    pub fn apply(self, params: &ModelParams, value: f64) -> ModelParams {
        match self {
            Vary::Gamma => params.with_gamma(value),
            Vary::C => params.with_c(value),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub branch: usize,
    pub points: Vec<(f64, Complex64)>,
}

/// Result of matching eigenvalues across consecutive grid points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchMatching {
    pub trajectories: Vec<Trajectory>,
    /// Step indices `i` (between grid points `i` and `i+1`) whose largest jump
    /// exceeds `JUMP_FLAG_RATIO` times the median.
    pub flagged_steps: Vec<usize>,
    /// Largest matched jump per step.
    pub step_jumps: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub real_count: usize,
    pub conjugate_pair_count: usize,
    pub imag_tol: f64,
}

/// Hamiltonian for the given parameters in the orthonormal basis: the
/// physical model for `pert_power = 2`, the `c·L_z^k` family otherwise.
pub fn hamiltonian_matrix(params: &ModelParams) -> Result<DMatrix<Complex64>> {
    let m = if params.pert_power == 2 {
        build_hamiltonian(params, Basis::Orthonormal)?
    } else {
        build_generalized(params, Basis::Orthonormal)?
    };
    Ok(m.to_float(0.0))
}

/// Tolerance scale `max(1, ‖H‖_max)`.
pub fn tolerance_scale(params: &ModelParams) -> Result<f64> {
    Ok(max_abs(&hamiltonian_matrix(params)?).max(1.0))
}

/// Eigenvalues of a floating operator matrix, sorted.
pub fn eigenvalues(matrix: &OperatorMatrix) -> Result<Vec<Complex64>> {
    let m = matrix.as_float().ok_or_else(|| {
        Error::InvalidInput("eigenvalues need a floating-point matrix".into())
    })?;
    eigen::eigenvalues(m)
}

fn is_pt_symmetric(params: &ModelParams) -> bool {
    // P maps L_z to −L_z; the L_z^k term survives PT only for even k.
    params.pert_power % 2 == 0
}

/// Spectrum of the Hamiltonian at `params`. PT-symmetric Hamiltonians use
/// the real-form solver so real eigenvalues come out exactly real.
pub fn spectrum(params: &ModelParams) -> Result<Spectrum> {
    let h = hamiltonian_matrix(params)?;
    let eigenvalues = if is_pt_symmetric(params) {
        eigen::pt_eigenvalues(&h)
    } else {
        eigen::eigenvalues(&h)
    }
    .map_err(|e| describe(params, e))?;
    Ok(Spectrum { params: *params, eigenvalues })
}

fn describe(params: &ModelParams, e: Error) -> Error {
    match e {
        Error::NoConvergence(msg) => Error::NoConvergence(format!(
            "{msg} (N={}, gamma={}, v={}, c={})",
            params.particles, params.gamma, params.v, params.c
        )),
        other => other,
    }
}

/// Iteration cap for the polishing steps of [`refined_spectrum`].
pub const REFINE_ITERATIONS: usize = 64;

fn exact_value(x: f64, what: &str) -> Result<Rational> {
    Rational::from_float(x).ok_or_else(|| Error::InvalidInput(format!("{what} = {x} is not finite")))
}

/// Spectrum polished by Newton's method on the exact characteristic
/// polynomial at the (exactly represented) floating parameters. Near
/// high-order exceptional points the floating eigensolver loses digits to
/// eigenvector conditioning; evaluating `det(λI − H)` exactly through the
/// tridiagonal recurrence recovers full double precision.
pub fn refined_spectrum(params: &ModelParams) -> Result<Spectrum> {
    let rough = spectrum(params)?;
    let rep = params.rep()?;
    let gamma = exact_value(params.gamma, "gamma")?;
    let v = exact_value(params.v, "v")?;
    let c_scale = if params.pert_power == 2 { 2 } else { 1 };
    let c = exact_value(params.c, "c")? * Rational::from_integer(c_scale.into());
    let two = Rational::from_integer(2.into());
    let diagonal: Vec<(Dyadic, Dyadic)> = (0..rep.dim())
        .map(|n| {
            let m = rep.m_exact(n);
            let re = &c * num_traits::pow(m.clone(), params.pert_power as usize);
            (Dyadic::from_rational(&re), Dyadic::from_rational(&-(&two * &gamma * m)))
        })
        .collect();
    let system = Tridiagonal {
        diagonal,
        v: Dyadic::from_rational(&v),
        weights: (1..rep.dim()).map(|n| BigInt::from(n * (params.particles - n + 1))).collect(),
    };
    let Some(mut eigenvalues) = system.aberth(&rough.eigenvalues) else {
        return Ok(rough);
    };
    if is_pt_symmetric(params) {
        // Non-real roots of the real characteristic polynomial pair up; a
        // root closer to its own mirror image than to any other root is real.
        let snapped: Vec<bool> = (0..eigenvalues.len())
            .map(|i| {
                let z = eigenvalues[i];
                let partner = eigenvalues
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .map(|(_, w)| (w - z.conj()).norm())
                    .fold(f64::INFINITY, f64::min);
                2.0 * z.im.abs() < partner
            })
            .collect();
        for (z, real) in eigenvalues.iter_mut().zip(snapped) {
            if real {
                *z = Complex64::new(system.polish(Complex64::new(z.re, 0.0)).re, 0.0);
            }
        }
    }
    if eigenvalues.iter().any(|z| !z.is_finite()) {
        return Ok(rough);
    }
    sort_eigenvalues(&mut eigenvalues);
    Ok(Spectrum { params: *params, eigenvalues })
}

/// Exact binary fraction `mantissa·2^exp`.
#[derive(Clone, Debug)]
struct Dyadic {
    mantissa: BigInt,
    exp: i64,
}

impl Dyadic {
    fn from_f64(x: f64) -> Self {
        let (m, e, sign) = num_traits::Float::integer_decode(x);
        Dyadic { mantissa: BigInt::from(m) * i64::from(sign), exp: e.into() }
    }

    /// Rationals here always have power-of-two denominators.
    fn from_rational(r: &Rational) -> Self {
        let den = r.denom();
        let shift = den.trailing_zeros().unwrap_or(0);
        debug_assert_eq!(den, &(BigInt::from(1) << shift));
        Dyadic { mantissa: r.numer().clone(), exp: -(shift as i64) }
    }

    fn exp_or_max(&self) -> i64 {
        if self.mantissa.is_zero() { i64::MAX } else { self.exp }
    }

    /// Integer `self / 2^base`; `base` must not exceed `exp`.
    fn scaled(&self, base: i64) -> BigInt {
        if self.mantissa.is_zero() { BigInt::zero() } else { &self.mantissa << (self.exp - base) as usize }
    }
}

/// `det(λI − T)` for the tridiagonal Hamiltonian: diagonal entries and
/// off-diagonal products `v²·w_n`.
struct Tridiagonal {
    diagonal: Vec<(Dyadic, Dyadic)>,
    v: Dyadic,
    weights: Vec<BigInt>,
}

impl Tridiagonal {
    /// Newton step `p(z)/p'(z)` with exact evaluation.
    fn newton_step(&self, z: Complex64) -> Option<Complex64> {
        let (zr, zi) = (Dyadic::from_f64(z.re), Dyadic::from_f64(z.im));
        let base = self
            .diagonal
            .iter()
            .flat_map(|(a, b)| [a.exp_or_max(), b.exp_or_max()])
            .chain([zr.exp_or_max(), zi.exp_or_max(), self.v.exp_or_max()])
            .min()
            .filter(|&e| e != i64::MAX)
            .unwrap_or(0);
        let x = BigComplex::new(zr.scaled(base), zi.scaled(base));
        let v = self.v.scaled(base);
        let v2 = &v * &v;
        // Values carry scale 2^(n·base), derivatives 2^((n−1)·base).
        let (mut f_prev, mut f) = (BigComplex::zero(), BigComplex::one());
        let (mut d_prev, mut d) = (BigComplex::zero(), BigComplex::zero());
        for (n, (a, b)) in self.diagonal.iter().enumerate() {
            let shift = &x - BigComplex::new(a.scaled(base), b.scaled(base));
            let beta = if n == 0 { BigInt::zero() } else { &v2 * &self.weights[n - 1] };
            let f_next = &shift * &f - &f_prev * &beta;
            let d_next = &f + &shift * &d - &d_prev * &beta;
            (f_prev, f) = (f, f_next);
            (d_prev, d) = (d, d_next);
        }
        if d.is_zero() {
            return None;
        }
        // p/p' = (f/d)·2^base.
        let num = &f * d.conj();
        let den = &d.re * &d.re + &d.im * &d.im;
        let ratio = |n: &BigInt| big_ratio(n, &den, base);
        Some(Complex64::new(ratio(&num.re), ratio(&num.im)))
    }

    fn polish(&self, mut z: Complex64) -> Complex64 {
        for _ in 0..REFINE_ITERATIONS {
            let Some(step) = self.newton_step(z) else { return z };
            z -= step;
            if !(step.norm() > f64::EPSILON * z.norm()) {
                break;
            }
        }
        z
    }

    /// Simultaneous Aberth–Ehrlich iteration started from `start`; `None`
    /// if it has not converged within the iteration cap.
    fn aberth(&self, start: &[Complex64]) -> Option<Vec<Complex64>> {
        // A conjugate-symmetric start stays symmetric under the iteration
        // and can never reach a pair of real roots; a slight rotation breaks
        // the symmetry.
        let scale = start.iter().map(|x| x.norm()).fold(f64::MIN_POSITIVE, f64::max);
        let mut z: Vec<Complex64> = start
            .iter()
            .enumerate()
            .map(|(i, &x)| x * Complex64::from_polar(1.0, 1e-2) + Complex64::from_polar(1e-3 * scale, i as f64))
            .collect();
        // Coincident starting values would divide by zero.
        for i in 1..z.len() {
            while z[..i].contains(&z[i]) {
                let nudge = Complex64::new(f64::EPSILON, f64::EPSILON) * z[i].norm().max(1.0) * (i as f64);
                z[i] += nudge;
            }
        }
        for _ in 0..REFINE_ITERATIONS {
            let ratios: Vec<Option<Complex64>> = z.par_iter().map(|&x| self.newton_step(x)).collect();
            let mut done = true;
            let next: Vec<Complex64> = z
                .iter()
                .zip(&ratios)
                .enumerate()
                .map(|(i, (&x, r))| {
                    let Some(r) = *r else { return x };
                    let repulsion: Complex64 =
                        z.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &y)| (x - y).inv()).sum();
                    let w = r / (Complex64::new(1.0, 0.0) - r * repulsion);
                    if w.norm() > 4.0 * f64::EPSILON * x.norm() {
                        done = false;
                    }
                    x - w
                })
                .collect();
            z = next;
            if done {
                return Some(z);
            }
        }
        None
    }
}

type BigComplex = num_complex::Complex<BigInt>;

/// `(n / d)·2^base` rounded to `f64`, without overflowing intermediate
/// conversions.
fn big_ratio(n: &BigInt, d: &BigInt, base: i64) -> f64 {
    if n.is_zero() {
        return 0.0;
    }
    let top = |x: &BigInt| -> (f64, i64) {
        let bits = x.bits() as i64;
        let drop = (bits - 64).max(0);
        ((x >> drop as usize).to_f64().unwrap_or(f64::NAN), drop)
    };
    let (nf, ne) = top(n);
    let (df, de) = top(d);
    let exp = ne - de + base;
    (nf / df) * 2f64.powi(exp.clamp(-2000, 2000) as i32)
}

/// `λ_n = n·√(v² − γ²)`, `n = −N, −N+2, …, N`, for `c = 0`. The root is
/// real for `|γ| ≤ |v|` and positive imaginary otherwise.
pub fn analytic_c0_spectrum(params: &ModelParams) -> Result<Vec<Complex64>> {
    params.rep()?;
    if params.c != 0.0 {
        return Err(Error::InvalidInput("the closed-form spectrum needs c = 0".into()));
    }
    let d = params.v * params.v - params.gamma * params.gamma;
    let root = if d >= 0.0 {
        Complex64::new(d.sqrt(), 0.0)
    } else {
        Complex64::new(0.0, (-d).sqrt())
    };
    let n = params.particles as i64;
    let mut values: Vec<Complex64> = (0..=n).map(|j| root * (2 * j - n) as f64).collect();
    sort_eigenvalues(&mut values);
    Ok(values)
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidInput("empty parameter grid".into()));
    }
    let increasing = grid.windows(2).all(|w| w[1] > w[0]);
    let decreasing = grid.windows(2).all(|w| w[1] < w[0]);
    if !(increasing || decreasing) || grid.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidInput("parameter grid must be strictly monotone".into()));
    }
    Ok(())
}

/// One spectrum per grid point, evaluated independently.
pub fn sweep(params: &ModelParams, vary: Vary, grid: &[f64]) -> Result<Vec<Spectrum>> {
    sweep_with(params, vary, grid, spectrum)
}

/// [`sweep`] with every spectrum polished by [`refined_spectrum`].
pub fn refined_sweep(params: &ModelParams, vary: Vary, grid: &[f64]) -> Result<Vec<Spectrum>> {
    sweep_with(params, vary, grid, refined_spectrum)
}

fn sweep_with(
    params: &ModelParams,
    vary: Vary,
    grid: &[f64],
    solve: fn(&ModelParams) -> Result<Spectrum>,
) -> Result<Vec<Spectrum>> {
    check_grid(grid)?;
    grid.par_iter()
        .map(|&x| {
            solve(&vary.apply(params, x)).map_err(|e| Error::AtGridPoint {
                param: vary.name(),
                value: x,
                source: Box::new(e),
            })
        })
        .collect()
}

fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    if v.len() % 2 == 0 {
        0.5 * (v[mid - 1] + v[mid])
    } else {
        v[mid]
    }
}

/// Match eigenvalue lists across an ordered grid by minimum total distance.
/// Branch `b` starts at the `b`-th value of the first list.
pub fn match_sequence(grid: &[f64], values: &[Vec<Complex64>]) -> BranchMatching {
    assert_eq!(grid.len(), values.len(), "grid and values differ in length");
    let width = values.first().map_or(0, Vec::len);
    let mut current: Vec<Complex64> = values.first().cloned().unwrap_or_default();
    let mut trajectories: Vec<Trajectory> = (0..width)
        .map(|b| Trajectory { branch: b, points: vec![(grid[0], current[b])] })
        .collect();
    let mut step_jumps = Vec::with_capacity(grid.len().saturating_sub(1));
    for (x, next) in grid.iter().zip(values).skip(1) {
        let cost: Vec<Vec<f64>> = current
            .iter()
            .map(|a| next.iter().map(|b| (a - b).norm()).collect())
            .collect();
        let assign = assignment::min_cost_assignment(&cost);
        let mut jump = 0.0f64;
        for (b, &j) in assign.iter().enumerate() {
            jump = jump.max(cost[b][j]);
            current[b] = next[j];
            trajectories[b].points.push((*x, next[j]));
        }
        step_jumps.push(jump);
    }
    let med = median(&step_jumps);
    let flagged_steps = if med > 0.0 {
        step_jumps
            .iter()
            .enumerate()
            .filter(|(_, j)| **j > JUMP_FLAG_RATIO * med)
            .map(|(i, _)| i)
            .collect()
    } else {
        Vec::new()
    };
    BranchMatching { trajectories, flagged_steps, step_jumps }
}

/// Branch matching over a computed sweep.
pub fn match_branches(spectra: &[Spectrum], vary: Vary) -> BranchMatching {
    let grid: Vec<f64> = spectra
        .iter()
        .map(|s| match vary {
            Vary::Gamma => s.params.gamma,
            Vary::C => s.params.c,
        })
        .collect();
    let values: Vec<Vec<Complex64>> = spectra.iter().map(|s| s.eigenvalues.clone()).collect();
    match_sequence(&grid, &values)
}

/// Sweep with automatic dyadic refinement of flagged steps.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrackedSweep {
    pub grid: Vec<f64>,
    pub values: Vec<Vec<Complex64>>,
    pub matching: BranchMatching,
    /// Refinement levels used.
    pub levels: usize,
    /// Steps still flagged after the refinement limit.
    pub unresolved_steps: Vec<usize>,
}

/// Evaluate `eval` on `grid`, match branches, and halve flagged steps up to
/// `max_levels` times.
pub fn track<F>(grid: &[f64], max_levels: usize, eval: F) -> Result<TrackedSweep>
where
    F: Fn(f64) -> Result<Vec<Complex64>> + Sync,
{
    check_grid(grid)?;
    let mut xs = grid.to_vec();
    let mut values: Vec<Vec<Complex64>> = xs.par_iter().map(|&x| eval(x)).collect::<Result<_>>()?;
    let mut levels = 0;
    loop {
        let matching = match_sequence(&xs, &values);
        if matching.flagged_steps.is_empty() || levels == max_levels {
            let unresolved_steps = matching.flagged_steps.clone();
            return Ok(TrackedSweep { grid: xs, values, matching, levels, unresolved_steps });
        }
        levels += 1;
        let mids: Vec<(usize, f64)> = matching
            .flagged_steps
            .iter()
            .map(|&i| (i, 0.5 * (xs[i] + xs[i + 1])))
            .collect();
        let mid_values: Vec<Vec<Complex64>> =
            mids.par_iter().map(|&(_, x)| eval(x)).collect::<Result<_>>()?;
        // insert from the back so earlier indices stay valid
        for ((i, x), v) in mids.into_iter().zip(mid_values).rev() {
            xs.insert(i + 1, x);
            values.insert(i + 1, v);
        }
    }
}

/// [`track`] for the Hamiltonian spectrum along `vary`.
pub fn track_spectra(params: &ModelParams, vary: Vary, grid: &[f64]) -> Result<TrackedSweep> {
    track(grid, MAX_REFINEMENT_LEVELS, |x| {
        spectrum(&vary.apply(params, x))
            .map(|s| s.eigenvalues)
            .map_err(|e| Error::AtGridPoint { param: vary.name(), value: x, source: Box::new(e) })
    })
}

/// Count real eigenvalues (`|Im λ| ≤ imag_tol`) and complex-conjugate pairs.
/// Non-real eigenvalues that do not pair under conjugation within
/// `pair_tol` are an error.
pub fn classify_values(values: &[Complex64], imag_tol: f64, pair_tol: f64) -> Result<Classification> {
    let real_count = values.iter().filter(|z| z.im.abs() <= imag_tol).count();
    let upper: Vec<Complex64> = values.iter().copied().filter(|z| z.im > imag_tol).collect();
    let lower: Vec<Complex64> = values.iter().copied().filter(|z| z.im < -imag_tol).collect();
    if upper.len() != lower.len() {
        return Err(Error::Classification(format!(
            "{} eigenvalues above and {} below the real axis cannot pair under conjugation",
            upper.len(),
            lower.len()
        )));
    }
    let cost: Vec<Vec<f64>> = upper
        .iter()
        .map(|a| lower.iter().map(|b| (a - b.conj()).norm()).collect())
        .collect();
    let assign = assignment::min_cost_assignment(&cost);
    if let Some((i, &j)) = assign.iter().enumerate().find(|(i, &j)| cost[*i][j] > pair_tol) {
        return Err(Error::Classification(format!(
            "eigenvalue {} has no conjugate partner (closest {} at distance {:e})",
            upper[i], lower[j], cost[i][j]
        )));
    }
    Ok(Classification { real_count, conjugate_pair_count: upper.len(), imag_tol })
}

/// Classify a spectrum; `imag_tol` defaults to `1e-9·scale`.
pub fn classify(spectrum: &Spectrum, imag_tol: Option<f64>) -> Result<Classification> {
    let scale = tolerance_scale(&spectrum.params)?;
    let imag_tol = imag_tol.unwrap_or(SWEEP_IMAG_TOL * scale);
    classify_values(&spectrum.eigenvalues, imag_tol, (1e-6 * scale).max(imag_tol))
}

/// Largest distance between a multiset and another under optimal matching.
pub fn matched_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len(), "multisets differ in size");
    let cost: Vec<Vec<f64>> = a.iter().map(|x| b.iter().map(|y| (x - y).norm()).collect()).collect();
    let assign = assignment::min_cost_assignment(&cost);
    assign.iter().enumerate().map(|(i, &j)| cost[i][j]).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn refinement_recovers_digits_near_the_mother_ep() {
        let p = ModelParams::new(11, 0.995, 1.0, 0.0);
        let exact = analytic_c0_spectrum(&p).unwrap();
        let rough = matched_distance(&spectrum(&p).unwrap().eigenvalues, &exact);
        let fine = matched_distance(&refined_spectrum(&p).unwrap().eigenvalues, &exact);
        assert!(rough > 1e-6, "{rough}");
        assert!(fine < 1e-12, "{fine}");
    }

    #[test]
    fn refinement_keeps_complex_and_generalized_spectra() {
        for p in [ModelParams::new(6, 1.3, 1.0, 0.4), ModelParams { pert_power: 3, ..ModelParams::new(5, 0.7, 1.0, 0.2) }] {
            let a = spectrum(&p).unwrap().eigenvalues;
            let b = refined_spectrum(&p).unwrap().eigenvalues;
            assert!(matched_distance(&a, &b) < 1e-9);
        }
    }

    #[test]
    fn c0_closed_form_cases() {
        let p = ModelParams::new(11, 0.0, 1.0, 0.0);
        let ev = analytic_c0_spectrum(&p).unwrap();
        let want: Vec<f64> = (-11..=11).step_by(2).map(f64::from).collect();
        assert_eq!(ev.iter().map(|z| z.re).collect::<Vec<_>>(), want);

        let ev = analytic_c0_spectrum(&p.with_gamma(0.6)).unwrap();
        for (z, n) in ev.iter().zip((-11..=11).step_by(2)) {
            assert!((z.re - 0.8 * n as f64).abs() < 1e-14);
        }
        let ev = analytic_c0_spectrum(&p.with_gamma(1.0)).unwrap();
        assert!(ev.iter().all(|z| z.norm() == 0.0));
        let ev = analytic_c0_spectrum(&p.with_gamma(2.0)).unwrap();
        assert!(ev.iter().all(|z| z.re == 0.0));
        assert!(analytic_c0_spectrum(&p.with_c(0.1)).is_err());
    }

    #[test]
    fn numeric_matches_closed_form_examples() {
        let p = ModelParams::new(11, 0.0, 1.0, 0.0);
        let num = spectrum(&p).unwrap().eigenvalues;
        assert!(matched_distance(&num, &analytic_c0_spectrum(&p).unwrap()) < 1e-12);
        let p = p.with_gamma(2.0);
        let num = spectrum(&p).unwrap().eigenvalues;
        let want = analytic_c0_spectrum(&p).unwrap();
        assert!(matched_distance(&num, &want) < 1e-11);
        // n·i·√3 for n = −11..11 step 2
        assert!(want.iter().any(|z| (z - Complex64::new(0.0, 11.0 * 3f64.sqrt())).norm() < 1e-12));
    }

    #[test]
    fn grid_validation() {
        let p = ModelParams::new(3, 0.5, 1.0, 0.1);
        assert!(sweep(&p, Vary::Gamma, &[]).is_err());
        assert!(sweep(&p, Vary::Gamma, &[0.0, 0.5, 0.2]).is_err());
        assert_eq!(sweep(&p, Vary::Gamma, &[0.3]).unwrap().len(), 1);
    }

    #[test]
    fn identity_matching_for_separated_branches() {
        let grid = [0.0, 1.0, 2.0];
        let values = vec![
            vec![Complex64::new(-5.0, 0.0), Complex64::new(5.0, 0.0)],
            vec![Complex64::new(5.1, 0.0), Complex64::new(-5.1, 0.0)],
            vec![Complex64::new(-5.2, 0.0), Complex64::new(5.2, 0.0)],
        ];
        let m = match_sequence(&grid, &values);
        assert_eq!(m.trajectories[0].points.iter().map(|p| p.1.re).collect::<Vec<_>>(), vec![-5.0, -5.1, -5.2]);
        assert_eq!(m.trajectories[1].points.iter().map(|p| p.1.re).collect::<Vec<_>>(), vec![5.0, 5.1, 5.2]);
        assert!(m.flagged_steps.is_empty());
    }

    #[test]
    fn jordan_toy_flags_and_refines() {
        // [[0, 1], [t, 0]] has eigenvalues ±√t: a square-root branch point at t = 0.
        let eval = |t: f64| -> Result<Vec<Complex64>> {
            let m = DMatrix::from_row_slice(
                2,
                2,
                &[Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(t, 0.0), Complex64::new(0.0, 0.0)],
            );
            eigen::eigenvalues(&m)
        };
        let grid: Vec<f64> = (0..200).map(|i| -1.0 + 2.0 * i as f64 / 199.0).collect();
        let coarse = track(&grid, 0, eval).unwrap();
        assert!(!coarse.matching.flagged_steps.is_empty());
        let step = coarse.matching.flagged_steps[0];
        assert!(grid[step] <= 0.0 && grid[step + 1] >= 0.0);
        let refined = track(&grid, MAX_REFINEMENT_LEVELS, eval).unwrap();
        assert!(refined.levels >= 1);
        assert!(refined.unresolved_steps.is_empty());
        assert!(refined.grid.len() > grid.len());
    }

    #[test]
    fn classification_errors_on_unpaired() {
        let v = [Complex64::new(1.0, 0.5), Complex64::new(2.0, 0.0)];
        assert!(classify_values(&v, 1e-9, 1e-6).is_err());
        let v = [Complex64::new(1.0, 0.5), Complex64::new(3.0, -0.5)];
        assert!(classify_values(&v, 1e-9, 1e-6).is_err());
        let v = [Complex64::new(1.0, 0.5), Complex64::new(1.0, -0.5), Complex64::new(2.0, 0.0)];
        let c = classify_values(&v, 1e-9, 1e-6).unwrap();
        assert_eq!((c.real_count, c.conjugate_pair_count), (1, 1));
    }
}
