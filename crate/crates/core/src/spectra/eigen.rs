//! Dense eigenvalue solvers.
//!
//! [`eigenvalues`] handles arbitrary complex matrices with a Householder
//! Hessenberg reduction followed by single-shift complex QR iterations.
//! [`pt_eigenvalues`] handles matrices with `P·conj(H)·P = H`: these are
//! similar to a real matrix, whose real Schur form reports real eigenvalues
//! with an exactly vanishing imaginary part.

use nalgebra::{DMatrix, DVector, Schur};
use num_complex::Complex64;

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Sort by real part, then imaginary part.
pub fn sort_eigenvalues(values: &mut [Complex64]) {
    values.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
}

pub fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// All eigenvalues of a square complex matrix, sorted.
pub fn eigenvalues(m: &DMatrix<Complex64>) -> Result<Vec<Complex64>> {
    let n = m.nrows();
    if n != m.ncols() {
        return Err(Error::InvalidInput(format!("matrix is {}x{}, not square", n, m.ncols())));
    }
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::InvalidInput("matrix has non-finite entries".into()));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut h = m.clone();
    reduce_to_hessenberg(&mut h);
    let mut values = hessenberg_qr(&mut h)?;
    sort_eigenvalues(&mut values);
    Ok(values)
}

fn reduce_to_hessenberg(a: &mut DMatrix<Complex64>) {
    let n = a.nrows();
    if n < 3 {
        return;
    }
    for k in 0..n - 2 {
        let alpha_norm: f64 = (k + 1..n).map(|i| a[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        if alpha_norm == 0.0 {
            continue;
        }
        let x0 = a[(k + 1, k)];
        let phase = if x0.norm() == 0.0 { Complex64::new(1.0, 0.0) } else { x0 / x0.norm() };
        // v = x + phase·‖x‖·e₁, H = I − 2vv*/(v*v)
        let mut v: Vec<Complex64> = (k + 1..n).map(|i| a[(i, k)]).collect();
        v[0] += phase * alpha_norm;
        let vnorm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        let beta = 2.0 / vnorm2;
        // A ← H A
        for j in 0..n {
            let dot: Complex64 = v.iter().enumerate().map(|(r, vr)| vr.conj() * a[(k + 1 + r, j)]).sum();
            let f = dot * beta;
            for (r, vr) in v.iter().enumerate() {
                a[(k + 1 + r, j)] -= vr * f;
            }
        }
        // A ← A H
        for i in 0..n {
            let dot: Complex64 = v.iter().enumerate().map(|(r, vr)| a[(i, k + 1 + r)] * vr).sum();
            let f = dot * beta;
            for (r, vr) in v.iter().enumerate() {
                a[(i, k + 1 + r)] -= f * vr.conj();
            }
        }
        for i in k + 2..n {
            a[(i, k)] = ZERO;
        }
    }
}

fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    // eigenvalue of [[a, b], [c, d]] closest to d
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let mid = (a + d) * 0.5;
    let (l1, l2) = (mid + disc, mid - disc);
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

fn hessenberg_qr(h: &mut DMatrix<Complex64>) -> Result<Vec<Complex64>> {
    let n = h.nrows();
    let mut values = vec![ZERO; n];
    let norm = max_abs(h).max(f64::MIN_POSITIVE);
    let budget = 60 * n.max(10);
    let mut hi = n - 1;
    let mut iter = 0usize;
    loop {
        if hi == 0 {
            values[0] = h[(0, 0)];
            break;
        }
        // Find the start of the active unreduced block.
        let mut lo = hi;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let mut diag = h[(lo, lo)].norm() + h[(lo - 1, lo - 1)].norm();
            if diag == 0.0 {
                diag = norm;
            }
            if sub <= f64::EPSILON * diag {
                h[(lo, lo - 1)] = ZERO;
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            values[hi] = h[(hi, hi)];
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        if iter > budget {
            return Err(Error::NoConvergence(format!(
                "complex QR exceeded {budget} iterations on a {n}x{n} matrix (active block {lo}..={hi})"
            )));
        }
        let mu = if iter % 11 == 0 {
            // exceptional shift
            h[(hi, hi)] + Complex64::new(h[(hi, hi - 1)].norm() * 0.75, h[(hi, hi - 1)].norm() * 0.25)
        } else {
            wilkinson_shift(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };
        qr_step(h, lo, hi, mu);
    }
    Ok(values)
}

/// One explicit shifted QR step `H − μI = QR`, `H ← RQ + μI` on the block
/// `lo..=hi` using Givens rotations.
fn qr_step(h: &mut DMatrix<Complex64>, lo: usize, hi: usize, mu: Complex64) {
    for i in lo..=hi {
        h[(i, i)] -= mu;
    }
    let mut rotations = Vec::with_capacity(hi - lo);
    for k in lo..hi {
        let a = h[(k, k)];
        let b = h[(k + 1, k)];
        let r = (a.norm_sqr() + b.norm_sqr()).sqrt();
        let (c, s) = if r == 0.0 {
            (Complex64::new(1.0, 0.0), ZERO)
        } else {
            (a / r, b / r)
        };
        // rows k, k+1 ← [[c̄, s̄], [−s, c]] · rows
        for j in k..=hi {
            let x = h[(k, j)];
            let y = h[(k + 1, j)];
            h[(k, j)] = c.conj() * x + s.conj() * y;
            h[(k + 1, j)] = -s * x + c * y;
        }
        rotations.push((c, s));
    }
    for (offset, (c, s)) in rotations.into_iter().enumerate() {
        let k = lo + offset;
        // columns k, k+1 ← columns · [[c, −s̄], [s, c̄]]
        for i in lo..=(k + 2).min(hi) {
            let x = h[(i, k)];
            let y = h[(i, k + 1)];
            h[(i, k)] = x * c + y * s;
            h[(i, k + 1)] = -x * s.conj() + y * c.conj();
        }
    }
    for i in lo..=hi {
        h[(i, i)] += mu;
    }
}

/// Real matrix `S⁻¹HS` with `S = (I + iP)/√2`, for `H` satisfying
/// `P·conj(H)·P = H`. Returns the real part and the largest discarded
/// imaginary part.
pub fn pt_real_form(h: &DMatrix<Complex64>) -> (DMatrix<f64>, f64) {
    let n = h.nrows();
    let i = Complex64::new(0.0, 1.0);
    let mut s = DMatrix::<Complex64>::identity(n, n);
    let mut s_inv = DMatrix::<Complex64>::identity(n, n);
    for r in 0..n {
        s[(r, n - 1 - r)] += i;
        s_inv[(r, n - 1 - r)] -= i;
    }
    let k = s_inv * h * s * Complex64::new(0.5, 0.0);
    let residual = k.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    (k.map(|z| z.re), residual)
}

/// Eigenvalues of a PT-symmetric matrix (`P·conj(H)·P = H`), sorted. Real
/// eigenvalues carry an imaginary part of exactly zero.
pub fn pt_eigenvalues(h: &DMatrix<Complex64>) -> Result<Vec<Complex64>> {
    let n = h.nrows();
    let (k, residual) = pt_real_form(h);
    let scale = max_abs(h).max(1.0);
    if residual > 1e-12 * scale {
        return Err(Error::InvalidInput(format!(
            "matrix is not PT-symmetric (imaginary residue {residual:e} in the real form)"
        )));
    }
    // Highly defective real forms can stall the real Schur iteration; retry
    // on orthogonally similar matrices before giving up.
    let reflector = {
        let u = DVector::from_fn(n, |i, _| 1.0 + (i as f64).sqrt());
        DMatrix::identity(n, n) - (&u * u.transpose()) * (2.0 / u.norm_squared())
    };
    let candidates = [k.clone(), k.transpose(), &reflector * &k * &reflector];
    for candidate in candidates {
        if let Some(schur) = Schur::try_new(candidate, f64::EPSILON, 1000 * n.max(1)) {
            let mut values: Vec<Complex64> = schur.complex_eigenvalues().iter().copied().collect();
            sort_eigenvalues(&mut values);
            return Ok(values);
        }
    }
    Err(Error::NoConvergence(format!("real Schur iteration on a {n}x{n} PT-symmetric matrix")))
}

/// Smallest singular value of `H − λI`.
pub fn min_singular_value(h: &DMatrix<Complex64>, lambda: Complex64) -> f64 {
    let n = h.nrows();
    let shifted = h - DMatrix::<Complex64>::identity(n, n) * lambda;
    shifted.singular_values().iter().copied().fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn triangular_matrix() {
        let m = DMatrix::from_row_slice(3, 3, &[c(1.0, 0.0), c(2.0, 1.0), c(0.0, 3.0), ZERO, c(-2.0, 1.0), c(1.0, 0.0), ZERO, ZERO, c(0.5, -0.5)]);
        let ev = eigenvalues(&m).unwrap();
        assert_eq!(ev.len(), 3);
        for (got, want) in ev.iter().zip([c(-2.0, 1.0), c(0.5, -0.5), c(1.0, 0.0)]) {
            assert!((got - want).norm() < 1e-13, "{got} vs {want}");
        }
    }

    #[test]
    fn rotation_generator() {
        let m = DMatrix::from_row_slice(2, 2, &[ZERO, c(-1.0, 0.0), c(1.0, 0.0), ZERO]);
        let ev = eigenvalues(&m).unwrap();
        assert!((ev[0] - c(0.0, -1.0)).norm() < 1e-14);
        assert!((ev[1] - c(0.0, 1.0)).norm() < 1e-14);
    }

    #[test]
    fn nilpotent_jordan_block() {
        let mut m = DMatrix::<Complex64>::zeros(5, 5);
        for i in 0..4 {
            m[(i, i + 1)] = c(1.0, 0.0);
        }
        for z in eigenvalues(&m).unwrap() {
            assert!(z.norm() < 1e-12);
        }
    }

    #[test]
    fn rejects_non_square_and_nan() {
        assert!(eigenvalues(&DMatrix::<Complex64>::zeros(2, 3)).is_err());
        let mut m = DMatrix::<Complex64>::zeros(2, 2);
        m[(0, 0)] = c(f64::NAN, 0.0);
        assert!(eigenvalues(&m).is_err());
    }

    #[test]
    fn backward_stability_on_random_matrices() {
        // deterministic pseudo-random entries
        let mut state = 0x2545F4914F6CDD1Du64;
        let mut next = || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        for n in [1, 2, 3, 7, 16, 25] {
            let m = DMatrix::from_fn(n, n, |_, _| c(next(), next()));
            let norm = m.norm();
            for z in eigenvalues(&m).unwrap() {
                assert!(min_singular_value(&m, z) <= 1e-10 * norm.max(1.0));
            }
        }
    }

    #[test]
    fn pt_route_rejects_non_pt_matrix() {
        let m = DMatrix::from_row_slice(2, 2, &[c(1.0, 1.0), ZERO, ZERO, c(1.0, 1.0)]);
        assert!(pt_eigenvalues(&m).is_err());
    }

    #[test]
    fn pt_route_real_values_exactly_real() {
        // diag(i, −i) with coupling 2: eigenvalues ±√3, exactly real.
        let m = DMatrix::from_row_slice(2, 2, &[c(0.0, 1.0), c(2.0, 0.0), c(2.0, 0.0), c(0.0, -1.0)]);
        let ev = pt_eigenvalues(&m).unwrap();
        assert_eq!(ev[0].im, 0.0);
        assert_eq!(ev[1].im, 0.0);
        assert!((ev[1].re - 3f64.sqrt()).abs() < 1e-14);
    }
}
