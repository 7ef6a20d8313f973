//! Newton-polygon analysis of a characteristic polynomial `χ(λ, x)` near
//! `x = 0`, where `x` is the formal perturbation parameter.
//!
//! Each coefficient of `λ^k` contributes the point `(k, a_k)` with `a_k` its
//! lowest power of `x`. Segments of the lower convex hull give the leading
//! exponents `μ = −slope` of the root expansions `λ ≈ e₁·x^μ`. The points on a
//! segment form a reduced polynomial whose nonzero roots are the `e₁`.

use std::f64::consts::TAU;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{Signed, ToPrimitive};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{lowest_power, CharPoly, GaussianRational, Rational};
use crate::spectra::eigen;

/// Point `A_k = (k, a_k)` of the Newton diagram.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagramPoint {
    /// Power of `λ`.
    pub k: usize,
    /// Lowest power of the parameter in the coefficient of `λ^k`.
    pub a: u32,
    /// Coefficient of that lowest power in `p_{M−k}` (so the monic
    /// coefficient of `λ^k` starts with `−f·x^a`).
    pub f: GaussianRational,
}

impl DiagramPoint {
    /// Leading coefficient in the monic `det(λI − H)` normalization.
    pub fn monic_coefficient(&self) -> GaussianRational {
        -&self.f
    }
}

/// One edge of the lower convex hull.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HullSegment {
    /// `k` values of every diagram point on the segment, ascending.
    pub point_ks: Vec<usize>,
    pub slope: Rational,
}

impl HullSegment {
    /// Leading exponent `μ = −slope`.
    pub fn mu(&self) -> Rational {
        -self.slope.clone()
    }

    pub fn k_min(&self) -> usize {
        self.point_ks[0]
    }

    pub fn k_max(&self) -> usize {
        *self.point_ks.last().expect("segment has points")
    }

    /// Number of roots governed by this segment.
    pub fn root_count(&self) -> usize {
        self.k_max() - self.k_min()
    }
}

/// Reduced polynomial `Σ_j coeffs[j]·e^j` of one hull segment, with the
/// common factor `e^{k_min}` removed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReducedPolynomial {
    pub mu: Rational,
    pub k_min: usize,
    pub coeffs: Vec<GaussianRational>,
}

impl ReducedPolynomial {
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn to_complex(&self) -> Vec<Complex64> {
        self.coeffs.iter().map(GaussianRational::to_complex).collect()
    }

    /// `c_d * e^d + ... + c_0`, highest power first.
    pub fn render(&self) -> String {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, c)| !c.is_zero())
            .map(|(j, c)| format!("{c} * e^{j}"))
            .collect();
        format!("{} = 0", terms.join(" + "))
    }
}

/// Leading behaviour `λ ≈ e₁·x^μ` of one eigenvalue branch.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UnfoldingBranch {
    /// `μ` as `(numerator, denominator)`; `None` for eigenvalues that vanish
    /// identically.
    pub mu: Option<(i64, i64)>,
    pub e1: Complex64,
    pub ring_id: usize,
    pub ring_size: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Ring {
    pub id: usize,
    pub mu: Option<(i64, i64)>,
    pub size: usize,
    pub modulus: f64,
    pub members: Vec<Complex64>,
    /// Equal moduli and phases spaced by `2π/size`.
    pub regular: bool,
}

/// Tolerances for ring grouping.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RingTolerances {
    /// Relative tolerance for grouping roots by `e^q`.
    pub modulus: f64,
    /// Absolute tolerance on phase spacing and relative tolerance on moduli
    /// within a ring.
    pub phase: f64,
}

impl Default for RingTolerances {
    fn default() -> Self {
        Self { modulus: 1e-6, phase: 1e-9 }
    }
}

/// Expected ring structure of the unfolding.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RingPrediction {
    /// Number of rings of size `ring_size`.
    pub rings: usize,
    pub ring_size: usize,
    /// Eigenvalues outside those rings.
    pub remainder: usize,
}

/// `⌊(N+1)/(k+1)⌋` rings of size `k+1` and `(N+1) − p(k+1)` remaining
/// eigenvalues for a `k`-banded perturbation; a single `(N+1)`-ring for
/// `k ≥ N`.
pub fn predict_ring_counts(particles: usize, k: usize) -> Result<RingPrediction> {
    if k == 0 || particles == 0 {
        return Err(Error::InvalidInput("need N >= 1 and k >= 1".into()));
    }
    let n = particles + 1;
    if k >= particles {
        return Ok(RingPrediction { rings: 1, ring_size: n, remainder: 0 });
    }
    let p = n / (k + 1);
    Ok(RingPrediction { rings: p, ring_size: k + 1, remainder: n - p * (k + 1) })
}

/// One point per nonzero coefficient of the characteristic polynomial.
pub fn build_points(charpoly: &CharPoly) -> Vec<DiagramPoint> {
    let m = charpoly.dim();
    (0..=m)
        .filter_map(|k| {
            lowest_power(charpoly.p(m - k)).map(|(a, f)| DiagramPoint { k, a, f })
        })
        .collect()
}

fn cross(o: &DiagramPoint, a: &DiagramPoint, b: &DiagramPoint) -> i128 {
    let (ox, oy) = (o.k as i128, o.a as i128);
    (a.k as i128 - ox) * (b.a as i128 - oy) - (a.a as i128 - oy) * (b.k as i128 - ox)
}

/// Lower convex hull of the diagram points, with every incident point
/// recorded per segment.
pub fn lower_hull(points: &[DiagramPoint]) -> Result<Vec<HullSegment>> {
    if points.is_empty() {
        return Err(Error::DegenerateDiagram("no diagram points".into()));
    }
    let mut sorted: Vec<&DiagramPoint> = points.iter().collect();
    sorted.sort_by_key(|p| (p.k, p.a));
    if sorted.windows(2).any(|w| w[0].k == w[1].k) {
        return Err(Error::DegenerateDiagram("two points share the same power of lambda".into()));
    }
    if sorted.len() == 1 {
        return Ok(Vec::new());
    }
    // Andrew's monotone chain, dropping collinear points from the vertex list.
    let mut hull: Vec<&DiagramPoint> = Vec::new();
    for p in &sorted {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0 {
            hull.pop();
        }
        hull.push(p);
    }
    let segments = hull
        .windows(2)
        .map(|w| {
            let (a, b) = (w[0], w[1]);
            let point_ks = sorted
                .iter()
                .filter(|p| p.k >= a.k && p.k <= b.k && cross(a, b, p) == 0)
                .map(|p| p.k)
                .collect();
            HullSegment {
                point_ks,
                slope: Rational::new(
                    BigInt::from(b.a as i64 - a.a as i64),
                    BigInt::from((b.k - a.k) as i64),
                ),
            }
        })
        .collect();
    Ok(segments)
}

/// Reduced polynomial from the points on `segment` (monic normalization).
pub fn reduced_polynomial(segment: &HullSegment, points: &[DiagramPoint]) -> ReducedPolynomial {
    let k_min = segment.k_min();
    let mut coeffs = vec![GaussianRational::zero(); segment.root_count() + 1];
    for p in points.iter().filter(|p| segment.point_ks.contains(&p.k)) {
        coeffs[p.k - k_min] = p.monic_coefficient();
    }
    ReducedPolynomial { mu: segment.mu(), k_min, coeffs }
}

fn horner(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut value = Complex64::new(0.0, 0.0);
    let mut deriv = Complex64::new(0.0, 0.0);
    for c in coeffs.iter().rev() {
        deriv = deriv * z + value;
        value = value * z + c;
    }
    (value, deriv)
}

/// Roots of `Σ coeffs[j]·z^j` (ascending coefficients): eigenvalues of the
/// balanced companion matrix, then Newton polishing on the polynomial.
pub fn polynomial_roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let fail = || Error::RootFinding(format!("{coeffs:?}"));
    let deg = coeffs.iter().rposition(|c| c.norm() > 0.0).ok_or_else(fail)?;
    let coeffs = &coeffs[..=deg];
    let zeros = coeffs.iter().position(|c| c.norm() > 0.0).unwrap_or(0);
    let nonzero = &coeffs[zeros..];
    let n = nonzero.len() - 1;
    let mut roots = vec![Complex64::new(0.0, 0.0); zeros];
    if n == 0 {
        return Ok(roots);
    }
    // Scale z = s·u so the end coefficients balance.
    let s = (nonzero[0].norm() / nonzero[n].norm()).powf(1.0 / n as f64);
    let scaled: Vec<Complex64> = nonzero
        .iter()
        .enumerate()
        .map(|(j, c)| c * s.powi(j as i32) / (nonzero[n] * s.powi(n as i32)))
        .collect();
    let companion = DMatrix::from_fn(n, n, |i, j| {
        if i == 0 {
            -scaled[n - 1 - j]
        } else if i == j + 1 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let estimates = eigen::eigenvalues(&companion).map_err(|_| fail())?;
    for u in estimates {
        let mut z = u;
        for _ in 0..50 {
            let (f, df) = horner(&scaled, z);
            if df.norm() == 0.0 {
                break;
            }
            let step = f / df;
            let next = z - step;
            let (fn_, _) = horner(&scaled, next);
            if fn_.norm() >= f.norm() {
                break;
            }
            z = next;
            if step.norm() <= 1e-16 * z.norm().max(1e-300) {
                break;
            }
        }
        if !z.re.is_finite() || !z.im.is_finite() {
            return Err(fail());
        }
        roots.push(z * s);
    }
    Ok(roots)
}

/// Nonzero roots `e₁` of a reduced polynomial.
pub fn solve_leading_coefficients(reduced: &ReducedPolynomial) -> Result<Vec<Complex64>> {
    if reduced.coeffs.iter().all(GaussianRational::is_zero) {
        return Err(Error::RootFinding(format!("zero polynomial for mu = {}", reduced.mu)));
    }
    let roots = polynomial_roots(&reduced.to_complex())
        .map_err(|_| Error::RootFinding(reduced.render()))?;
    Ok(roots.into_iter().filter(|z| z.norm() > 0.0).collect())
}

fn mu_pair(mu: &Rational) -> (i64, i64) {
    (
        mu.numer().to_i64().unwrap_or(i64::MAX),
        mu.denom().to_i64().unwrap_or(i64::MAX),
    )
}

fn is_regular(members: &[Complex64], tol: RingTolerances) -> bool {
    let size = members.len();
    let moduli: Vec<f64> = members.iter().map(|z| z.norm()).collect();
    let mean = moduli.iter().sum::<f64>() / size as f64;
    if moduli.iter().any(|m| (m - mean).abs() > tol.phase * mean.max(f64::MIN_POSITIVE)) {
        return false;
    }
    if size == 1 {
        return true;
    }
    let mut phases: Vec<f64> = members.iter().map(|z| z.arg()).collect();
    phases.sort_by(f64::total_cmp);
    let expected = TAU / size as f64;
    (0..size).all(|i| {
        let next = if i + 1 < size { phases[i + 1] } else { phases[0] + TAU };
        (next - phases[i] - expected).abs() <= tol.phase
    })
}

/// Group the leading coefficients of one segment into rings. With
/// `μ = p/q`, members of one ring share `e₁^q`, have equal moduli and
/// phases spaced by `2π/size`.
pub fn group_rings(coefficients: &[Complex64], mu: &Rational, tol: RingTolerances) -> Vec<Ring> {
    let q = mu.denom().to_i32().unwrap_or(1).max(1);
    let powers: Vec<Complex64> = coefficients.iter().map(|e| e.powi(q)).collect();
    let scale = powers.iter().map(|w| w.norm()).fold(0.0, f64::max);
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (i, w) in powers.iter().enumerate() {
        match groups
            .iter_mut()
            .find(|g| (powers[g[0]] - w).norm() <= tol.modulus * scale)
        {
            Some(g) => g.push(i),
            None => groups.push(vec![i]),
        }
    }
    let mut rings: Vec<Ring> = groups
        .into_iter()
        .map(|g| {
            let members: Vec<Complex64> = g.iter().map(|&i| coefficients[i]).collect();
            let modulus = members.iter().map(|z| z.norm()).sum::<f64>() / members.len() as f64;
            Ring {
                id: 0,
                mu: Some(mu_pair(mu)),
                size: members.len(),
                modulus,
                regular: is_regular(&members, tol),
                members,
            }
        })
        .collect();
    rings.sort_by(|a, b| a.modulus.total_cmp(&b.modulus));
    rings
}

/// Complete first-order unfolding analysis of one characteristic polynomial.
#[derive(Clone, Debug)]
pub struct NewtonAnalysis {
    pub points: Vec<DiagramPoint>,
    pub segments: Vec<HullSegment>,
    pub reduced: Vec<ReducedPolynomial>,
    /// Leading coefficients per segment.
    pub leading: Vec<Vec<Complex64>>,
    pub rings: Vec<Ring>,
    pub branches: Vec<UnfoldingBranch>,
    /// Eigenvalues that vanish for every parameter value (a `λ^j` factor).
    pub exact_zero_count: usize,
}

impl NewtonAnalysis {
    /// Ring sizes, descending.
    pub fn ring_sizes(&self) -> Vec<usize> {
        let mut sizes: Vec<usize> = self.rings.iter().map(|r| r.size).collect();
        sizes.sort_unstable_by(|a, b| b.cmp(a));
        sizes
    }

    /// Distinct exponents `μ` over the hull segments.
    pub fn exponents(&self) -> Vec<Rational> {
        self.segments.iter().map(HullSegment::mu).collect()
    }

    /// Total number of branches accounted for (should equal the dimension).
    pub fn branch_count(&self) -> usize {
        self.branches.len()
    }
}

pub fn analyze(charpoly: &CharPoly, tol: RingTolerances) -> Result<NewtonAnalysis> {
    let points = build_points(charpoly);
    let segments = lower_hull(&points)?;
    let exact_zero_count = points.first().map_or(0, |p| p.k);
    let mut reduced = Vec::with_capacity(segments.len());
    let mut leading = Vec::with_capacity(segments.len());
    let mut rings = Vec::new();
    for seg in &segments {
        if !seg.mu().is_positive() {
            return Err(Error::DegenerateDiagram(format!(
                "segment with non-positive exponent {}; the unperturbed matrix is not nilpotent",
                seg.mu()
            )));
        }
        let rp = reduced_polynomial(seg, &points);
        let roots = solve_leading_coefficients(&rp)?;
        rings.extend(group_rings(&roots, &rp.mu, tol));
        reduced.push(rp);
        leading.push(roots);
    }
    for _ in 0..exact_zero_count {
        rings.push(Ring {
            id: 0,
            mu: None,
            size: 1,
            modulus: 0.0,
            members: vec![Complex64::new(0.0, 0.0)],
            regular: true,
        });
    }
    let mut branches = Vec::new();
    for (id, ring) in rings.iter_mut().enumerate() {
        ring.id = id;
        for e1 in &ring.members {
            branches.push(UnfoldingBranch { mu: ring.mu, e1: *e1, ring_id: id, ring_size: ring.size });
        }
    }
    Ok(NewtonAnalysis { points, segments, reduced, leading, rings, branches, exact_zero_count })
}

/// Compare an analysis against [`predict_ring_counts`]: the number of rings
/// of the predicted size and the number of remaining eigenvalues.
pub fn ring_law_matches(analysis: &NewtonAnalysis, prediction: &RingPrediction) -> bool {
    let full = analysis.rings.iter().filter(|r| r.size == prediction.ring_size).count();
    let rest: usize = analysis
        .rings
        .iter()
        .filter(|r| r.size != prediction.ring_size)
        .map(|r| r.size)
        .sum();
    full == prediction.rings && rest == prediction.remainder
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    fn pt(k: usize, a: u32) -> DiagramPoint {
        DiagramPoint { k, a, f: GaussianRational::from_int(-1) }
    }

    #[test]
    fn two_point_hull() {
        let segs = lower_hull(&[pt(0, 1), pt(2, 0)]).unwrap();
        assert_eq!(segs.len(), 1);
        assert_eq!(segs[0].mu(), rat(1, 2));
        assert_eq!(segs[0].point_ks, vec![0, 2]);
    }

    #[test]
    fn single_point_has_no_segments() {
        assert!(lower_hull(&[pt(4, 0)]).unwrap().is_empty());
        assert!(lower_hull(&[]).is_err());
        assert!(lower_hull(&[pt(1, 0), pt(1, 2)]).is_err());
    }

    #[test]
    fn collinear_points_recorded() {
        let pts = [pt(0, 2), pt(1, 3), pt(2, 2), pt(3, 1), pt(4, 2), pt(5, 1), pt(6, 0)];
        let segs = lower_hull(&pts).unwrap();
        assert_eq!(segs.len(), 1);
        assert_eq!(segs[0].point_ks, vec![0, 3, 6]);
        assert_eq!(segs[0].slope, rat(-1, 3));
    }

    #[test]
    fn linear_segment_single_branch() {
        let pts = [pt(3, 1), pt(4, 0)];
        let segs = lower_hull(&pts).unwrap();
        let rp = reduced_polynomial(&segs[0], &pts);
        assert_eq!(rp.degree(), 1);
        assert_eq!(solve_leading_coefficients(&rp).unwrap().len(), 1);
    }

    #[test]
    fn roots_of_simple_polynomials() {
        let one = Complex64::new(1.0, 0.0);
        let mut r = polynomial_roots(&[-one, Complex64::new(0.0, 0.0), one]).unwrap();
        r.sort_by(|a, b| a.re.total_cmp(&b.re));
        assert!((r[0] + one).norm() < 1e-15 && (r[1] - one).norm() < 1e-15);
        // z(z − 2) has one zero root kept by polynomial_roots
        let r = polynomial_roots(&[Complex64::new(0.0, 0.0), Complex64::new(-2.0, 0.0), one]).unwrap();
        assert_eq!(r.iter().filter(|z| z.norm() == 0.0).count(), 1);
        assert!(polynomial_roots(&[Complex64::new(0.0, 0.0)]).is_err());
    }

    #[test]
    fn grouping_by_ring() {
        // e^6 + 448 e^3 + 6400 = 0 with μ = 1/3 → two regular triplets
        let c = |x: f64| Complex64::new(x, 0.0);
        let zero = c(0.0);
        let roots = polynomial_roots(&[c(6400.0), zero, zero, c(448.0), zero, zero, c(1.0)]).unwrap();
        let rings = group_rings(&roots, &rat(1, 3), RingTolerances::default());
        assert_eq!(rings.len(), 2);
        assert!(rings.iter().all(|r| r.size == 3 && r.regular));
        // μ = 1 with a conjugate pair → two singles despite equal moduli
        let pair = [Complex64::new(26.0, 7.0), Complex64::new(26.0, -7.0)];
        let rings = group_rings(&pair, &rat(1, 1), RingTolerances::default());
        assert_eq!(rings.iter().map(|r| r.size).collect::<Vec<_>>(), vec![1, 1]);
        // a size-2 "ring" that is not antipodal is irregular
        let rings = group_rings(&pair, &rat(1, 2), RingTolerances::default());
        assert!(rings.iter().all(|r| r.size == 1));
        let bad = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)];
        let rings = group_rings(&bad, &rat(1, 4), RingTolerances::default());
        assert_eq!(rings.len(), 1);
        assert!(!rings[0].regular);
    }

    #[test]
    fn ring_predictions() {
        assert_eq!(predict_ring_counts(11, 2).unwrap(), RingPrediction { rings: 4, ring_size: 3, remainder: 0 });
        assert_eq!(predict_ring_counts(10, 2).unwrap(), RingPrediction { rings: 3, ring_size: 3, remainder: 2 });
        assert_eq!(predict_ring_counts(4, 1).unwrap(), RingPrediction { rings: 2, ring_size: 2, remainder: 1 });
        assert_eq!(predict_ring_counts(4, 4).unwrap(), RingPrediction { rings: 1, ring_size: 5, remainder: 0 });
        assert_eq!(predict_ring_counts(4, 7).unwrap(), RingPrediction { rings: 1, ring_size: 5, remainder: 0 });
        assert!(predict_ring_counts(4, 0).is_err());
    }
}
