//! Angular momentum operators of the spin-`N/2` representation and the
//! Hamiltonians built from them.
//!
//! Rows and columns are indexed by `n = l + m = 0..=N` in ascending order, so
//! `n = 0` is the state `m = −l`. Two bases are available:
//!
//! * orthonormal `|l, m⟩`, where ladder entries carry square roots and only
//!   floating-point matrices can be produced;
//! * monomial `ξ^n`, where `L₋ = ∂_ξ`, `L₊ = −ξ²∂_ξ + 2lξ` and `L_z = ξ∂_ξ − l`
//!   have integer or half-integer entries and exact matrices are available.
//!
//! The two bases differ by a diagonal similarity, so spectra and
//! characteristic polynomials agree.

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{ExactMatrix, FormalParam, GaussianRational, ParamPoly, Rational};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Spin `l = N/2` representation of dimension `N + 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AngularMomentumRep {
    particles: usize,
}

impl AngularMomentumRep {
    pub fn new(particles: usize) -> Result<Self> {
        if particles == 0 {
            return Err(Error::InvalidInput(
                "at least one particle is required (N >= 1)".into(),
            ));
        }
        Ok(Self { particles })
    }

    pub fn particles(&self) -> usize {
        self.particles
    }

    pub fn dim(&self) -> usize {
        self.particles + 1
    }

    /// `l = N/2`.
    pub fn l(&self) -> Rational {
        Rational::new(BigInt::from(self.particles), BigInt::from(2))
    }

    /// Magnetic quantum number `m = n − l` of basis index `n`.
    pub fn m(&self, n: usize) -> f64 {
        n as f64 - self.particles as f64 / 2.0
    }

    pub fn m_exact(&self, n: usize) -> Rational {
        Rational::from_integer(BigInt::from(n)) - self.l()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Ladder {
    Plus,
    Minus,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Basis {
    Orthonormal,
    Monomial,
}

/// Floating-point model parameters of `H = −2iγL_z + 2vL_x + 2cL_z²`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub particles: usize,
    pub gamma: f64,
    pub v: f64,
    pub c: f64,
    /// Power `k` of the `L_z^k` perturbation; 2 is the physical model.
    pub pert_power: u32,
}

impl ModelParams {
    pub fn new(particles: usize, gamma: f64, v: f64, c: f64) -> Self {
        Self { particles, gamma, v, c, pert_power: 2 }
    }

    pub fn with_gamma(self, gamma: f64) -> Self {
        Self { gamma, ..self }
    }

    pub fn with_c(self, c: f64) -> Self {
        Self { c, ..self }
    }

    pub fn rep(&self) -> Result<AngularMomentumRep> {
        AngularMomentumRep::new(self.particles)
    }

    pub fn validate(&self) -> Result<()> {
        self.rep()?;
        if self.v == 0.0 || !self.v.is_finite() {
            return Err(Error::InvalidInput("v must be finite and nonzero".into()));
        }
        if !self.gamma.is_finite() || !self.c.is_finite() {
            return Err(Error::InvalidInput("gamma and c must be finite".into()));
        }
        if self.pert_power == 0 {
            return Err(Error::InvalidInput("perturbation power must be >= 1".into()));
        }
        Ok(())
    }
}

/// Value of the interaction in an exact Hamiltonian: a fixed rational or the
/// formal parameter `c` itself.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Coupling {
    Value(Rational),
    Formal,
}

/// Exact parameters for monomial-basis Hamiltonians.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactModel {
    pub particles: usize,
    pub gamma: Rational,
    pub v: Rational,
    pub c: Coupling,
}

/// Perturbation applied to `2vL₋` after rotating the Hamiltonian at `γ = v`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Perturbation {
    /// Physical interaction `2cL_z²`, rotated to `−(c/2)(L₊ − L₋)²`.
    Interaction,
    /// `c·L_z^k`, rotated to `(−i/2)^k·c·(L₊ − L₋)^k`.
    HigherOrder(u32),
    /// Detuning `Δ = γ − v` at `c = 0`, rotated to `−Δ(L₊ − L₋)`.
    Detuning,
}

impl Perturbation {
    /// Perturbation for a given power of `L_z`: the physical interaction for
    /// `k = 2`, the `c·L_z^k` family otherwise.
    pub fn for_power(k: u32) -> Self {
        if k == 2 {
            Perturbation::Interaction
        } else {
            Perturbation::HigherOrder(k)
        }
    }

    /// Lower bandwidth `k` of the perturbation (an upper `(k+1)`-Hessenberg
    /// matrix).
    pub fn power(self) -> u32 {
        match self {
            Perturbation::Interaction => 2,
            Perturbation::HigherOrder(k) => k,
            Perturbation::Detuning => 1,
        }
    }

    pub fn param(self) -> FormalParam {
        match self {
            Perturbation::Detuning => FormalParam::Delta,
            _ => FormalParam::C,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Entries {
    Float(DMatrix<Complex64>),
    Exact(ExactMatrix),
}

/// Square operator matrix in a given basis, floating or exact.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorMatrix {
    pub basis: Basis,
    pub entries: Entries,
}

impl OperatorMatrix {
    pub fn float(basis: Basis, m: DMatrix<Complex64>) -> Self {
        Self { basis, entries: Entries::Float(m) }
    }

    pub fn exact_monomial(m: ExactMatrix) -> Self {
        Self { basis: Basis::Monomial, entries: Entries::Exact(m) }
    }

    pub fn dim(&self) -> usize {
        match &self.entries {
            Entries::Float(m) => m.nrows(),
            Entries::Exact(m) => m.dim(),
        }
    }

    pub fn exact(&self) -> Option<&ExactMatrix> {
        match &self.entries {
            Entries::Exact(m) => Some(m),
            Entries::Float(_) => None,
        }
    }

    /// Floating-point view; exact entries are evaluated at parameter `x`.
    pub fn to_float(&self, x: f64) -> DMatrix<Complex64> {
        match &self.entries {
            Entries::Float(m) => m.clone(),
            Entries::Exact(m) => m.evaluate(x),
        }
    }

    /// Float entries, or `None` for exact matrices.
    pub fn as_float(&self) -> Option<&DMatrix<Complex64>> {
        match &self.entries {
            Entries::Float(m) => Some(m),
            Entries::Exact(_) => None,
        }
    }
}

fn int_entry(n: i64) -> ParamPoly {
    ParamPoly::constant(GaussianRational::from_int(n))
}

/// Exact ladder operator in the monomial basis: `L₊ ξ^n = (2l − n) ξ^{n+1}`,
/// `L₋ ξ^n = n ξ^{n−1}`.
pub fn monomial_ladder(rep: AngularMomentumRep, which: Ladder) -> ExactMatrix {
    let n_max = rep.particles();
    ExactMatrix::from_fn(rep.dim(), FormalParam::C, |row, col| match which {
        Ladder::Plus if row == col + 1 => int_entry((n_max - col) as i64),
        Ladder::Minus if col == row + 1 => int_entry(col as i64),
        _ => ParamPoly::zero(),
    })
}

/// Exact `L_z = diag(n − l)` in the monomial basis.
pub fn monomial_lz(rep: AngularMomentumRep) -> ExactMatrix {
    ExactMatrix::from_fn(rep.dim(), FormalParam::C, |row, col| {
        if row == col {
            ParamPoly::constant(GaussianRational::real(rep.m_exact(row)))
        } else {
            ParamPoly::zero()
        }
    })
}

fn orthonormal_ladder(rep: AngularMomentumRep, which: Ladder) -> DMatrix<Complex64> {
    let n_max = rep.particles() as f64;
    DMatrix::from_fn(rep.dim(), rep.dim(), |row, col| {
        let n = col as f64;
        match which {
            // ⟨m+1|L₊|m⟩ = √((l − m)(l + m + 1))
            Ladder::Plus if row == col + 1 => Complex64::new(((n_max - n) * (n + 1.0)).sqrt(), 0.0),
            // ⟨m−1|L₋|m⟩ = √((l + m)(l − m + 1))
            Ladder::Minus if col == row + 1 => Complex64::new((n * (n_max - n + 1.0)).sqrt(), 0.0),
            _ => ZERO,
        }
    })
}

fn float_lz(rep: AngularMomentumRep) -> DMatrix<Complex64> {
    DMatrix::from_fn(rep.dim(), rep.dim(), |row, col| {
        if row == col {
            Complex64::new(rep.m(row), 0.0)
        } else {
            ZERO
        }
    })
}

pub fn build_ladder(rep: AngularMomentumRep, which: Ladder, basis: Basis) -> OperatorMatrix {
    match basis {
        Basis::Orthonormal => OperatorMatrix::float(basis, orthonormal_ladder(rep, which)),
        Basis::Monomial => OperatorMatrix::exact_monomial(monomial_ladder(rep, which)),
    }
}

pub fn build_cartesian(rep: AngularMomentumRep, axis: Axis, basis: Basis) -> OperatorMatrix {
    match basis {
        Basis::Orthonormal => {
            let plus = orthonormal_ladder(rep, Ladder::Plus);
            let minus = orthonormal_ladder(rep, Ladder::Minus);
            let m = match axis {
                Axis::X => (plus + minus) * Complex64::new(0.5, 0.0),
                Axis::Y => (plus - minus) * (Complex64::new(0.5, 0.0) / I),
                Axis::Z => float_lz(rep),
            };
            OperatorMatrix::float(basis, m)
        }
        Basis::Monomial => {
            let plus = monomial_ladder(rep, Ladder::Plus);
            let minus = monomial_ladder(rep, Ladder::Minus);
            let half = GaussianRational::real(crate::exact::rat(1, 2));
            let m = match axis {
                Axis::X => (&plus + &minus).scale(&half),
                // 1/(2i) = −i/2
                Axis::Y => (&plus - &minus).scale(&GaussianRational::new(
                    Rational::zero(),
                    crate::exact::rat(-1, 2),
                )),
                Axis::Z => monomial_lz(rep),
            };
            OperatorMatrix::exact_monomial(m)
        }
    }
}

/// Floating `H = −2iγL_z + 2vL_x + 2cL_z²` in the requested basis.
pub fn build_hamiltonian(params: &ModelParams, basis: Basis) -> Result<OperatorMatrix> {
    params.validate_rep_only()?;
    Ok(OperatorMatrix::float(basis, float_hamiltonian(params, basis, 2.0, 2)?))
}

/// Floating `H = −2iγL_z + 2vL_x + c·L_z^k` with `k = params.pert_power`.
pub fn build_generalized(params: &ModelParams, basis: Basis) -> Result<OperatorMatrix> {
    params.validate_rep_only()?;
    Ok(OperatorMatrix::float(
        basis,
        float_hamiltonian(params, basis, 1.0, params.pert_power)?,
    ))
}

impl ModelParams {
    fn validate_rep_only(&self) -> Result<()> {
        self.rep().map(|_| ())
    }
}

fn float_hamiltonian(
    params: &ModelParams,
    basis: Basis,
    c_scale: f64,
    power: u32,
) -> Result<DMatrix<Complex64>> {
    let rep = params.rep()?;
    let (plus, minus) = match basis {
        Basis::Orthonormal => (
            orthonormal_ladder(rep, Ladder::Plus),
            orthonormal_ladder(rep, Ladder::Minus),
        ),
        Basis::Monomial => (
            monomial_ladder(rep, Ladder::Plus).evaluate(0.0),
            monomial_ladder(rep, Ladder::Minus).evaluate(0.0),
        ),
    };
    let lx = (plus + minus) * Complex64::new(0.5, 0.0);
    let mut h = lx * Complex64::new(2.0 * params.v, 0.0);
    for n in 0..rep.dim() {
        let m = rep.m(n);
        h[(n, n)] += Complex64::new(0.0, -2.0 * params.gamma * m)
            + Complex64::new(c_scale * params.c * m.powi(power as i32), 0.0);
    }
    Ok(h)
}

/// Exact monomial-basis `H = −2iγL_z + 2vL_x + 2cL_z²`; with
/// [`Coupling::Formal`] the entries are polynomials in `c`.
pub fn build_hamiltonian_exact(model: &ExactModel) -> Result<OperatorMatrix> {
    let rep = AngularMomentumRep::new(model.particles)?;
    let plus = monomial_ladder(rep, Ladder::Plus);
    let minus = monomial_ladder(rep, Ladder::Minus);
    let hopping = (&plus + &minus).scale(&GaussianRational::real(model.v.clone()));
    let mut h = hopping;
    for n in 0..rep.dim() {
        let m = rep.m_exact(n);
        let two = Rational::from_integer(BigInt::from(2));
        let gamma_term = GaussianRational::new(Rational::zero(), -(&two * &model.gamma * &m));
        let c_factor = GaussianRational::real(&two * &m * &m);
        let mut diag = ParamPoly::constant(gamma_term);
        match &model.c {
            Coupling::Value(c) => {
                diag.add_term(0, &c_factor.scale(c));
            }
            Coupling::Formal => {
                diag.add_term(1, &c_factor);
            }
        }
        h.set(n, n, diag);
    }
    Ok(OperatorMatrix::exact_monomial(h))
}

/// Exact `(L₊ − L₋)^k` in the monomial basis.
pub fn perturbation_matrix(rep: AngularMomentumRep, k: u32) -> ExactMatrix {
    let diff = &monomial_ladder(rep, Ladder::Plus) - &monomial_ladder(rep, Ladder::Minus);
    diff.pow(k)
}

/// Rotated Hamiltonian at the exceptional point `γ = v`:
/// `H̃ = 2vL₋ + (perturbation)`, exact in the monomial basis with the
/// perturbation strength as formal parameter.
pub fn build_rotated_hamiltonian(
    particles: usize,
    v: &Rational,
    perturbation: Perturbation,
) -> Result<OperatorMatrix> {
    let rep = AngularMomentumRep::new(particles)?;
    if let Perturbation::HigherOrder(0) = perturbation {
        return Err(Error::InvalidInput("perturbation power must be >= 1".into()));
    }
    let two_v = GaussianRational::real(v * Rational::from_integer(BigInt::from(2)));
    let jordan = monomial_ladder(rep, Ladder::Minus).scale(&two_v);
    let prefactor = match perturbation {
        Perturbation::Interaction => GaussianRational::real(crate::exact::rat(-1, 2)),
        Perturbation::Detuning => GaussianRational::from_int(-1),
        Perturbation::HigherOrder(k) => {
            GaussianRational::new(Rational::zero(), crate::exact::rat(-1, 2)).pow(k)
        }
    };
    let pert = perturbation_matrix(rep, perturbation.power()).scale_by_monomial(1, &prefactor);
    let h = (&jordan + &pert).with_param(perturbation.param());
    Ok(OperatorMatrix::exact_monomial(h))
}

/// Exchange (parity) matrix with ones on the anti-diagonal.
pub fn parity_matrix(dim: usize) -> OperatorMatrix {
    OperatorMatrix::float(
        Basis::Orthonormal,
        DMatrix::from_fn(dim, dim, |i, j| {
            if i + j + 1 == dim {
                Complex64::new(1.0, 0.0)
            } else {
                ZERO
            }
        }),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    fn max_abs(m: &DMatrix<Complex64>) -> f64 {
        m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn zero_particles_rejected() {
        assert!(AngularMomentumRep::new(0).is_err());
        assert!(build_hamiltonian(&ModelParams::new(0, 1.0, 1.0, 0.0), Basis::Orthonormal).is_err());
    }

    #[test]
    fn spin_half_lowering() {
        let rep = AngularMomentumRep::new(1).unwrap();
        let m = build_ladder(rep, Ladder::Minus, Basis::Orthonormal).to_float(0.0);
        // |1/2, 1/2⟩ is index 1, |1/2, −1/2⟩ index 0.
        assert!((m[(0, 1)] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert_eq!(m.iter().filter(|z| z.norm() > 0.0).count(), 1);
        assert_eq!(rep.l(), rat(1, 2));
    }

    #[test]
    fn raising_squared_entry() {
        // ⟨5/2, 5/2| L₊² |5/2, 1/2⟩ = √(2·4)·√(1·5) = 2√10
        let rep = AngularMomentumRep::new(5).unwrap();
        let plus = build_ladder(rep, Ladder::Plus, Basis::Orthonormal).to_float(0.0);
        let sq = &plus * &plus;
        // m = 1/2 is n = 3, m = 5/2 is n = 5.
        assert!((sq[(5, 3)].re - 2.0 * 10f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn monomial_lowering_entries() {
        let rep = AngularMomentumRep::new(4).unwrap();
        let m = monomial_ladder(rep, Ladder::Minus);
        let sup: Vec<_> = (0..4).map(|i| m.get(i, i + 1).clone()).collect();
        let expected: Vec<_> = (1..=4).map(int_entry).collect();
        assert_eq!(sup, expected);
        assert_eq!(m.lower_bandwidth(), 0);
    }

    #[test]
    fn lz_and_lx_small_cases() {
        let rep = AngularMomentumRep::new(1).unwrap();
        let lz = build_cartesian(rep, Axis::Z, Basis::Orthonormal).to_float(0.0);
        assert_eq!(lz[(0, 0)].re, -0.5);
        assert_eq!(lz[(1, 1)].re, 0.5);
        // l = 1: ⟨1,1|L_x|1,0⟩ = (1/2)·√((l − m)(l + m + 1)) at m = 0, i.e. √2/2.
        let rep = AngularMomentumRep::new(2).unwrap();
        let lx = build_cartesian(rep, Axis::X, Basis::Orthonormal).to_float(0.0);
        assert!((lx[(2, 1)].re - 2f64.sqrt() / 2.0).abs() < 1e-15);
        assert!((lx[(1, 2)].re - 2f64.sqrt() / 2.0).abs() < 1e-15);
    }

    #[test]
    fn su2_commutators() {
        for n in 1..=30 {
            let rep = AngularMomentumRep::new(n).unwrap();
            let [x, y, z] = [Axis::X, Axis::Y, Axis::Z]
                .map(|a| build_cartesian(rep, a, Basis::Orthonormal).to_float(0.0));
            let comm = |a: &DMatrix<Complex64>, b: &DMatrix<Complex64>| a * b - b * a;
            assert!(max_abs(&(comm(&x, &y) - &z * I)) <= 1e-12, "N={n}");
            assert!(max_abs(&(comm(&y, &z) - &x * I)) <= 1e-12, "N={n}");
            assert!(max_abs(&(comm(&z, &x) - &y * I)) <= 1e-12, "N={n}");
        }
    }

    #[test]
    fn monomial_commutators_exact() {
        let rep = AngularMomentumRep::new(6).unwrap();
        let [x, y, z] = [Axis::X, Axis::Y, Axis::Z]
            .map(|a| build_cartesian(rep, a, Basis::Monomial).exact().unwrap().clone());
        let lhs = &(&x * &y) - &(&y * &x);
        assert_eq!(lhs, z.scale(&GaussianRational::i()));
    }

    #[test]
    fn reference_n5_hamiltonian() {
        let (g, v, c) = (0.3, 0.7, 0.11);
        let h = build_hamiltonian(&ModelParams::new(5, g, v, c), Basis::Orthonormal)
            .unwrap()
            .to_float(0.0);
        // index n = 5 − row of the reference matrix (descending m).
        let reference_diag = [
            Complex64::new(12.5 * c, -5.0 * g),
            Complex64::new(4.5 * c, -3.0 * g),
            Complex64::new(0.5 * c, -g),
            Complex64::new(0.5 * c, g),
            Complex64::new(4.5 * c, 3.0 * g),
            Complex64::new(12.5 * c, 5.0 * g),
        ];
        let reference_off = [5f64.sqrt() * v, 2.0 * 2f64.sqrt() * v, 3.0 * v, 2.0 * 2f64.sqrt() * v, 5f64.sqrt() * v];
        for row in 0..6 {
            assert!((h[(5 - row, 5 - row)] - reference_diag[row]).norm() < 1e-14);
        }
        for row in 0..5 {
            assert!((h[(5 - row, 4 - row)].re - reference_off[row]).abs() < 1e-14);
            assert!((h[(4 - row, 5 - row)].re - reference_off[row]).abs() < 1e-14);
        }
        assert_eq!(h, h.transpose());
    }

    #[test]
    fn hermitian_without_gain_loss_and_interaction() {
        let h = build_hamiltonian(&ModelParams::new(7, 0.0, 1.3, 0.0), Basis::Orthonormal)
            .unwrap()
            .to_float(0.0);
        assert!(max_abs(&(h.adjoint() - &h)) < 1e-15);
    }

    #[test]
    fn parity_properties() {
        let p2 = parity_matrix(2).to_float(0.0);
        assert_eq!(p2[(0, 1)].re, 1.0);
        assert_eq!(p2[(1, 0)].re, 1.0);
        assert_eq!(p2[(0, 0)].re, 0.0);
        let p3 = parity_matrix(3).to_float(0.0);
        assert_eq!(&p3 * &p3, DMatrix::identity(3, 3));
        for n in 1..=30 {
            let h = build_hamiltonian(&ModelParams::new(n, 0.37, 1.1, 0.21), Basis::Orthonormal)
                .unwrap()
                .to_float(0.0);
            let p = parity_matrix(n + 1).to_float(0.0);
            assert!(max_abs(&(&p * h.adjoint() * &p - &h)) <= 1e-14, "N={n}");
        }
    }

    #[test]
    fn perturbation_band_structure() {
        for n in 1..=8 {
            let rep = AngularMomentumRep::new(n).unwrap();
            for k in 1..=n as u32 + 1 {
                let m = perturbation_matrix(rep, k);
                assert!(m.lower_bandwidth() <= k as usize);
            }
        }
    }

    #[test]
    fn rotated_interaction_expansion() {
        // (L₊ − L₋)² = L₊² − L₀ + L₋² with L₀ = L₊L₋ + L₋L₊
        let rep = AngularMomentumRep::new(6).unwrap();
        let p = monomial_ladder(rep, Ladder::Plus);
        let m = monomial_ladder(rep, Ladder::Minus);
        let l0 = &(&p * &m) + &(&m * &p);
        let rhs = &(&(&p * &p) - &l0) + &(&m * &m);
        assert_eq!(perturbation_matrix(rep, 2), rhs);
    }

    #[test]
    fn rotated_band_pattern() {
        // Second super- and subdiagonals plus the diagonal from the c-term,
        // first superdiagonal from 2vL₋; the first subdiagonal stays empty.
        let h = build_rotated_hamiltonian(8, &rat(1, 1), Perturbation::Interaction).unwrap();
        let h = h.exact().unwrap();
        for ((i, j), q) in h.entries() {
            let d = j as isize - i as isize;
            let allowed = matches!(d, -2 | 0 | 1 | 2);
            assert!(allowed || q.is_zero(), "unexpected entry at ({i},{j})");
            if d == -1 {
                assert!(q.is_zero());
            }
        }
        assert_eq!(h.lower_bandwidth(), 2);
    }

    #[test]
    fn detuning_is_two_hessenberg() {
        let h = build_rotated_hamiltonian(5, &rat(1, 1), Perturbation::Detuning).unwrap();
        let h = h.exact().unwrap();
        assert_eq!(h.lower_bandwidth(), 1);
        assert_eq!(h.param(), FormalParam::Delta);
    }
}
