//! Exact arithmetic: rationals, Gaussian rationals, parameter polynomials,
//! polynomial matrices and characteristic polynomials.

pub mod charpoly;
pub mod gaussian;
pub mod matrix;
pub mod poly;

pub use charpoly::{
    faddeev_leverrier, faddeev_leverrier_exact, lowest_power, realness_check,
    traces_from_coefficients, verify_trace_structure, CharPoly, TraceStructureRow,
};
pub use gaussian::{parse_rational, rat, rational_to_f64, GaussianRational, Rational};
pub use matrix::ExactMatrix;
pub use poly::{FormalParam, ParamPoly};
