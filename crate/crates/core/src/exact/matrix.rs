use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::gaussian::{GaussianRational, Rational};
use super::poly::{FormalParam, ParamPoly};

/// Dense square matrix whose entries are polynomials in one formal parameter.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactMatrix {
    dim: usize,
    param: FormalParam,
    entries: Vec<ParamPoly>,
}

impl ExactMatrix {
    pub fn zeros(dim: usize, param: FormalParam) -> Self {
        Self { dim, param, entries: vec![ParamPoly::zero(); dim * dim] }
    }

    pub fn identity(dim: usize, param: FormalParam) -> Self {
        let mut m = Self::zeros(dim, param);
        for i in 0..dim {
            m.set(i, i, ParamPoly::constant(GaussianRational::one()));
        }
        m
    }

    pub fn from_fn(
        dim: usize,
        param: FormalParam,
        mut f: impl FnMut(usize, usize) -> ParamPoly,
    ) -> Self {
        let mut entries = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                entries.push(f(i, j));
            }
        }
        Self { dim, param, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn param(&self) -> FormalParam {
        self.param
    }

    pub fn with_param(mut self, param: FormalParam) -> Self {
        self.param = param;
        self
    }

    pub fn get(&self, i: usize, j: usize) -> &ParamPoly {
        &self.entries[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: ParamPoly) {
        self.entries[i * self.dim + j] = value;
    }

    pub fn entries(&self) -> impl Iterator<Item = ((usize, usize), &ParamPoly)> {
        self.entries
            .iter()
            .enumerate()
            .map(move |(k, p)| ((k / self.dim, k % self.dim), p))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(ParamPoly::is_zero)
    }

    pub fn trace(&self) -> ParamPoly {
        (0..self.dim).fold(ParamPoly::zero(), |acc, i| &acc + self.get(i, i))
    }

    pub fn scale(&self, factor: &GaussianRational) -> Self {
        Self {
            dim: self.dim,
            param: self.param,
            entries: self.entries.iter().map(|p| p.scale(factor)).collect(),
        }
    }

    /// Multiply every entry by `x^exp · factor`.
    pub fn scale_by_monomial(&self, exp: u32, factor: &GaussianRational) -> Self {
        let mono = ParamPoly::monomial(exp, factor.clone());
        Self {
            dim: self.dim,
            param: self.param,
            entries: self.entries.iter().map(|p| p * &mono).collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::identity(self.dim, self.param);
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, self.param, |i, j| self.get(j, i).clone())
    }

    /// Index of the lowest subdiagonal carrying a nonzero entry (0 for an
    /// upper-triangular matrix).
    pub fn lower_bandwidth(&self) -> usize {
        self.entries()
            .filter(|(_, p)| !p.is_zero())
            .map(|((i, j), _)| i.saturating_sub(j))
            .max()
            .unwrap_or(0)
    }

    pub fn is_real(&self) -> bool {
        self.entries.iter().all(ParamPoly::is_real)
    }

    /// Substitute a value for the formal parameter.
    pub fn substitute(&self, value: &Rational) -> Self {
        let x = GaussianRational::real(value.clone());
        Self {
            dim: self.dim,
            param: self.param,
            entries: self
                .entries
                .iter()
                .map(|p| ParamPoly::constant(p.evaluate(&x)))
                .collect(),
        }
    }

    /// Floating-point matrix at parameter value `x`.
    pub fn evaluate(&self, x: f64) -> DMatrix<Complex64> {
        let x = Complex64::new(x, 0.0);
        DMatrix::from_fn(self.dim, self.dim, |i, j| self.get(i, j).evaluate_f64(x))
    }
}

impl<'a> Mul<&'a ExactMatrix> for &'a ExactMatrix {
    type Output = ExactMatrix;
    fn mul(self, rhs: &ExactMatrix) -> ExactMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let n = self.dim;
        let mut out = ExactMatrix::zeros(n, self.param);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = rhs.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let prod = a * b;
                    let slot = &mut out.entries[i * n + j];
                    *slot = &*slot + &prod;
                }
            }
        }
        out
    }
}

impl<'a> Add<&'a ExactMatrix> for &'a ExactMatrix {
    type Output = ExactMatrix;
    fn add(self, rhs: &ExactMatrix) -> ExactMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        ExactMatrix {
            dim: self.dim,
            param: self.param,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a + b).collect(),
        }
    }
}

impl<'a> Sub<&'a ExactMatrix> for &'a ExactMatrix {
    type Output = ExactMatrix;
    fn sub(self, rhs: &ExactMatrix) -> ExactMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        ExactMatrix {
            dim: self.dim,
            param: self.param,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a - b).collect(),
        }
    }
}
