//! Exact characteristic polynomials by the Faddeev–LeVerrier recursion.
//!
//! Coefficients are stored in the normalization
//! `χ(λ) = det(λI − H) = −Σ_{k=0..M} p_{M−k} λ^k` with `p_0 = −1`; the monic
//! coefficient of `λ^k` is therefore `−p_{M−k}`.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::gaussian::{GaussianRational, Rational};
use super::matrix::ExactMatrix;
use super::poly::{FormalParam, ParamPoly};
use crate::error::Error;
use crate::operators::OperatorMatrix;

/// Characteristic polynomial with coefficients polynomial in the formal
/// parameter, plus the cached power traces `s_k = Tr(H^k)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharPoly {
    param: FormalParam,
    /// `p[0..=M]`, `p[0] = −1`.
    p: Vec<ParamPoly>,
    /// `s[0..M]` holds `s_1..s_M`.
    s: Vec<ParamPoly>,
}

impl CharPoly {
    /// Matrix dimension `M`.
    pub fn dim(&self) -> usize {
        self.p.len() - 1
    }

    pub fn param(&self) -> FormalParam {
        self.param
    }

    /// Sign-normalized coefficient `p_k`, `0 ≤ k ≤ M`.
    pub fn p(&self, k: usize) -> &ParamPoly {
        &self.p[k]
    }

    pub fn p_coefficients(&self) -> &[ParamPoly] {
        &self.p
    }

    /// Power trace `s_k = Tr(H^k)`, `1 ≤ k ≤ M`.
    pub fn trace(&self, k: usize) -> &ParamPoly {
        &self.s[k - 1]
    }

    /// Coefficient of `λ^k` in the monic `det(λI − H)`.
    pub fn monic(&self, k: usize) -> ParamPoly {
        -&self.p[self.dim() - k]
    }

    /// Substitute a value for the formal parameter (result is constant in it).
    pub fn substitute(&self, value: &Rational) -> CharPoly {
        let x = GaussianRational::real(value.clone());
        let sub = |q: &ParamPoly| ParamPoly::constant(q.evaluate(&x));
        CharPoly {
            param: self.param,
            p: self.p.iter().map(sub).collect(),
            s: self.s.iter().map(sub).collect(),
        }
    }

    /// Monic coefficients `a_0..a_M` of `det(λI − H)` at parameter value `x`.
    pub fn monic_coefficients_at(&self, x: f64) -> Vec<Complex64> {
        let x = Complex64::new(x, 0.0);
        (0..=self.dim()).map(|k| self.monic(k).evaluate_f64(x)).collect()
    }

    /// `det(λI − H)` at parameter `x`, evaluated in floating point.
    pub fn evaluate(&self, lambda: Complex64, x: f64) -> Complex64 {
        self.monic_coefficients_at(x)
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, a| acc * lambda + a)
    }

    /// Lines `p[k] = ...` for `k = 0..=M`.
    pub fn render_p(&self) -> String {
        self.p
            .iter()
            .enumerate()
            .map(|(k, q)| format!("p[{k}] = {}\n", q.render(self.param)))
            .collect()
    }

    /// Lines `a[k] = ...`, coefficient of `lambda^k` in `det(lambda I - H)`.
    pub fn render_monic(&self) -> String {
        (0..=self.dim())
            .map(|k| format!("a[{k}] = {}\n", self.monic(k).render(self.param)))
            .collect()
    }
}

/// Characteristic polynomial of an exact operator matrix.
pub fn faddeev_leverrier(matrix: &OperatorMatrix) -> Result<CharPoly, Error> {
    let exact = matrix.exact().ok_or_else(|| {
        Error::InvalidInput("the Faddeev-LeVerrier recursion needs exact matrix entries".into())
    })?;
    Ok(faddeev_leverrier_exact(exact))
}

pub fn faddeev_leverrier_exact(matrix: &ExactMatrix) -> CharPoly {
    let m = matrix.dim();
    let s = power_traces(matrix);
    let mut p = Vec::with_capacity(m + 1);
    p.push(ParamPoly::constant(GaussianRational::from_int(-1)));
    for k in 1..=m {
        let mut acc = ParamPoly::zero();
        for j in 1..=k {
            acc = &acc + &(&s[j - 1] * &p[k - j]);
        }
        p.push(acc.scale_rational(&Rational::new(BigInt::from(-1), BigInt::from(k))));
    }
    CharPoly { param: matrix.param(), p, s }
}

/// `s_k` recovered from the `p_k` by Newton's identities,
/// `s_k = k·p_k + Σ_{j=1..k−1} s_j·p_{k−j}`.
pub fn traces_from_coefficients(charpoly: &CharPoly) -> Vec<ParamPoly> {
    let m = charpoly.dim();
    let mut s: Vec<ParamPoly> = Vec::with_capacity(m);
    for k in 1..=m {
        let mut acc = charpoly.p(k).scale_rational(&Rational::from_integer(BigInt::from(k)));
        for j in 1..k {
            acc = &acc + &(&s[j - 1] * charpoly.p(k - j));
        }
        s.push(acc);
    }
    s
}

/// Lowest-order term of a coefficient: `(exponent, coefficient)`, or `None`
/// for the identically zero polynomial (an absent diagram point).
pub fn lowest_power(p: &ParamPoly) -> Option<(u32, GaussianRational)> {
    p.lowest_term().map(|(e, c)| (e, c.clone()))
}

/// True iff every coefficient of every `p_k` is real.
pub fn realness_check(charpoly: &CharPoly) -> bool {
    charpoly.p.iter().all(ParamPoly::is_real)
}

/// Monomials observed in one coefficient, as `(j, coefficient)` with the
/// parameter exponent equal to `k − 2j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceStructureRow {
    pub k: usize,
    pub trace_terms: Vec<(u32, GaussianRational)>,
    pub coefficient_terms: Vec<(u32, GaussianRational)>,
}

/// Check that every monomial of `s_k` and `p_k` has parameter exponent `k − 2j`
/// with `0 ≤ j ≤ ⌊k/3⌋`. Valid for the rotated `k = 2` interaction model.
pub fn verify_trace_structure(charpoly: &CharPoly) -> Result<Vec<TraceStructureRow>, Error> {
    let classify = |k: usize, what: &str, q: &ParamPoly| {
        q.terms()
            .map(|(e, c)| {
                let e = e as usize;
                if e > k || (k - e) % 2 != 0 || (k - e) / 2 > k / 3 {
                    return Err(Error::InvariantViolation(format!(
                        "{what}_{k} has a term {c} * {}^{e}; allowed exponents are k-2j, j <= k/3",
                        charpoly.param.symbol()
                    )));
                }
                Ok((((k - e) / 2) as u32, c.clone()))
            })
            .collect::<Result<Vec<_>, Error>>()
    };
    (1..=charpoly.dim())
        .map(|k| {
            Ok(TraceStructureRow {
                k,
                trace_terms: classify(k, "s", charpoly.trace(k))?,
                coefficient_terms: classify(k, "p", charpoly.p(k))?,
            })
        })
        .collect()
}

/// Polynomial with Gaussian-integer coefficients, dense in the exponent.
type GaussIntPoly = Vec<(BigInt, BigInt)>;

fn mul_acc(target: &mut GaussIntPoly, a: &GaussIntPoly, b: &GaussIntPoly) {
    let needed = a.len() + b.len() - 1;
    if target.len() < needed {
        target.resize(needed, (BigInt::zero(), BigInt::zero()));
    }
    for (ea, (ar, ai)) in a.iter().enumerate() {
        if ar.is_zero() && ai.is_zero() {
            continue;
        }
        for (eb, (br, bi)) in b.iter().enumerate() {
            let slot = &mut target[ea + eb];
            if bi.is_zero() && ai.is_zero() {
                slot.0 += ar * br;
            } else {
                slot.0 += ar * br - ai * bi;
                slot.1 += ar * bi + ai * br;
            }
        }
    }
}

/// `Tr(A^k)` for `k = 1..=M`. Entries are scaled to Gaussian integers by the
/// common denominator `D`, powers are taken fraction-free against the sparse
/// base matrix, and `Tr((DA)^k)/D^k` is returned.
fn power_traces(matrix: &ExactMatrix) -> Vec<ParamPoly> {
    let n = matrix.dim();
    let mut den = BigInt::one();
    for (_, q) in matrix.entries() {
        for (_, c) in q.terms() {
            den = den.lcm(c.re.denom()).lcm(c.im.denom());
        }
    }
    let den_r = Rational::from_integer(den.clone());
    let to_int = |q: &ParamPoly| -> GaussIntPoly {
        let len = q.degree().map_or(0, |d| d as usize + 1);
        let mut out = vec![(BigInt::zero(), BigInt::zero()); len];
        for (e, c) in q.terms() {
            let re = &c.re * &den_r;
            let im = &c.im * &den_r;
            debug_assert!(re.is_integer() && im.is_integer());
            out[e as usize] = (re.to_integer(), im.to_integer());
        }
        out
    };
    // Column-wise sparse view of the base matrix.
    let mut columns: Vec<Vec<(usize, GaussIntPoly)>> = vec![Vec::new(); n];
    for ((i, j), q) in matrix.entries() {
        if !q.is_zero() {
            columns[j].push((i, to_int(q)));
        }
    }
    let mut power: Vec<GaussIntPoly> = matrix.entries().map(|(_, q)| to_int(q)).collect();
    let mut traces = Vec::with_capacity(n);
    let mut den_pow = Rational::one();
    for k in 1..=n {
        if k > 1 {
            let mut next = vec![GaussIntPoly::new(); n * n];
            for i in 0..n {
                for (j, column) in columns.iter().enumerate() {
                    let slot = &mut next[i * n + j];
                    for (l, a) in column {
                        let lhs = &power[i * n + l];
                        if !lhs.is_empty() {
                            mul_acc(slot, lhs, a);
                        }
                    }
                }
            }
            power = next;
        }
        den_pow = &den_pow * &den_r;
        let mut tr = ParamPoly::zero();
        for i in 0..n {
            for (e, (re, im)) in power[i * n + i].iter().enumerate() {
                let c = GaussianRational::new(
                    Rational::from_integer(re.clone()) / &den_pow,
                    Rational::from_integer(im.clone()) / &den_pow,
                );
                tr.add_term(e as u32, &c);
            }
        }
        traces.push(tr);
    }
    traces
}
