//! Univariate polynomials in the formal perturbation parameter (`c` or `Δ`)
//! with Gaussian-rational coefficients.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use super::gaussian::{GaussianRational, Rational};

/// Name of the formal parameter a polynomial is written in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum FormalParam {
    /// Interaction strength.
    C,
    /// Detuning from the exceptional point, `Δ = γ - v`.
    Delta,
}

impl FormalParam {
    pub fn symbol(self) -> &'static str {
        match self {
            FormalParam::C => "c",
            FormalParam::Delta => "Delta",
        }
    }
}

/// Sparse polynomial `Σ coeff[e]·x^e`. Zero coefficients are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct ParamPoly {
    terms: BTreeMap<u32, GaussianRational>,
}

impl ParamPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(value: GaussianRational) -> Self {
        Self::monomial(0, value)
    }

    pub fn monomial(exp: u32, coeff: GaussianRational) -> Self {
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(exp, coeff);
        }
        Self { terms }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (u32, GaussianRational)>) -> Self {
        let mut p = Self::zero();
        for (e, c) in terms {
            p.add_term(e, &c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().next_back().copied()
    }

    /// Smallest exponent with a nonzero coefficient and that coefficient.
    pub fn lowest_term(&self) -> Option<(u32, &GaussianRational)> {
        self.terms.iter().next().map(|(e, c)| (*e, c))
    }

    pub fn coeff(&self, exp: u32) -> GaussianRational {
        self.terms.get(&exp).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, &GaussianRational)> {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    pub fn add_term(&mut self, exp: u32, coeff: &GaussianRational) {
        if coeff.is_zero() {
            return;
        }
        let slot = self.terms.entry(exp).or_default();
        *slot += coeff;
        if slot.is_zero() {
            self.terms.remove(&exp);
        }
    }

    pub fn scale(&self, factor: &GaussianRational) -> Self {
        if factor.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(e, c)| (*e, c * factor)).collect(),
        }
    }

    pub fn scale_rational(&self, factor: &Rational) -> Self {
        self.scale(&GaussianRational::real(factor.clone()))
    }

    pub fn is_real(&self) -> bool {
        self.terms.values().all(GaussianRational::is_real)
    }

    pub fn evaluate(&self, x: &GaussianRational) -> GaussianRational {
        // Horner over the dense exponent range.
        let Some(deg) = self.degree() else {
            return GaussianRational::zero();
        };
        let mut acc = GaussianRational::zero();
        for e in (0..=deg).rev() {
            acc = &acc * x;
            if let Some(c) = self.terms.get(&e) {
                acc += c;
            }
        }
        acc
    }

    pub fn evaluate_f64(&self, x: Complex64) -> Complex64 {
        let Some(deg) = self.degree() else {
            return Complex64::new(0.0, 0.0);
        };
        let mut acc = Complex64::new(0.0, 0.0);
        for e in (0..=deg).rev() {
            acc *= x;
            if let Some(c) = self.terms.get(&e) {
                acc += c.to_complex();
            }
        }
        acc
    }

    /// Text form `num/den * x^e + ...`, ascending in `e`.
    pub fn render(&self, param: FormalParam) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        self.terms
            .iter()
            .map(|(e, c)| format!("{c} * {}^{e}", param.symbol()))
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

impl fmt::Display for ParamPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(FormalParam::C))
    }
}

impl<'a> Add<&'a ParamPoly> for &'a ParamPoly {
    type Output = ParamPoly;
    fn add(self, rhs: &ParamPoly) -> ParamPoly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, c);
        }
        out
    }
}

impl<'a> Sub<&'a ParamPoly> for &'a ParamPoly {
    type Output = ParamPoly;
    fn sub(self, rhs: &ParamPoly) -> ParamPoly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, &-c);
        }
        out
    }
}

impl<'a> Mul<&'a ParamPoly> for &'a ParamPoly {
    type Output = ParamPoly;
    fn mul(self, rhs: &ParamPoly) -> ParamPoly {
        let mut out = ParamPoly::zero();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                out.add_term(ea + eb, &(ca * cb));
            }
        }
        out
    }
}

impl Neg for &ParamPoly {
    type Output = ParamPoly;
    fn neg(self) -> ParamPoly {
        ParamPoly {
            terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect(),
        }
    }
}
