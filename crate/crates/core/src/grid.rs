//! Parameter grids written as `min:max:steps` with an optional `:log`
//! suffix, or a single value.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{parse_rational, rational_to_f64, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GridSpec {
    #[serde(serialize_with = "ser_rational")]
    pub min: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub max: Rational,
    pub steps: usize,
    pub log: bool,
}

fn ser_rational<S: serde::Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

impl GridSpec {
    pub fn single(value: Rational) -> Self {
        Self { min: value.clone(), max: value, steps: 1, log: false }
    }

    pub fn is_single(&self) -> bool {
        self.steps == 1
    }

    /// Grid points; linear points are computed exactly and rounded once.
    pub fn points(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![rational_to_f64(&self.min)];
        }
        let last = self.steps - 1;
        if self.log {
            let (lo, hi) = (rational_to_f64(&self.min), rational_to_f64(&self.max));
            let ratio = (hi / lo).ln();
            (0..self.steps)
                .map(|i| match i {
                    0 => lo,
                    i if i == last => hi,
                    i => lo * (ratio * i as f64 / last as f64).exp(),
                })
                .collect()
        } else {
            let span = &self.max - &self.min;
            (0..self.steps)
                .map(|i| {
                    let t = Rational::new(BigInt::from(i), BigInt::from(last));
                    rational_to_f64(&(&self.min + &span * t))
                })
                .collect()
        }
    }
}

impl FromStr for GridSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = |why: &str| Error::Parse(format!("grid '{s}': {why}"));
        match parts.as_slice() {
            [value] => Ok(GridSpec::single(parse_rational(value)?)),
            [min, max, steps] | [min, max, steps, _] => {
                let log = match parts.get(3) {
                    None => false,
                    Some(&"log") => true,
                    Some(other) => return Err(bad(&format!("unknown suffix '{other}'"))),
                };
                let min = parse_rational(min)?;
                let max = parse_rational(max)?;
                let steps: usize = steps.parse().map_err(|_| bad("steps must be a positive integer"))?;
                if steps == 0 {
                    return Err(bad("steps must be at least 1"));
                }
                if min >= max {
                    return Err(bad("min must be below max"));
                }
                if log && min <= Rational::from_integer(BigInt::from(0)) {
                    return Err(bad("a log grid needs min > 0"));
                }
                Ok(GridSpec { min, max, steps, log })
            }
            _ => Err(bad("expected min:max:steps[:log] or a single value")),
        }
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_single() {
            return write!(f, "{}", self.min);
        }
        write!(f, "{}:{}:{}", self.min, self.max, self.steps)?;
        if self.log {
            write!(f, ":log")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_grid_is_exact() {
        let g: GridSpec = "0:1.5:4".parse().unwrap();
        assert_eq!(g.points(), vec![0.0, 0.5, 1.0, 1.5]);
        let g: GridSpec = "0:0.3:4".parse().unwrap();
        assert_eq!(g.points()[1], 0.1);
    }

    #[test]
    fn log_grid_endpoints() {
        let g: GridSpec = "0.05:80:5:log".parse().unwrap();
        let p = g.points();
        assert_eq!(p[0], 0.05);
        assert_eq!(p[4], 80.0);
        assert!((p[2] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_grids() {
        for s in ["1:0:5", "0:1:0", "0:1:x", "0:1:5:cubic", "0:1:5:log", "a", "1:2"] {
            assert!(s.parse::<GridSpec>().is_err(), "{s}");
        }
        let g: GridSpec = "0.25".parse().unwrap();
        assert_eq!(g.points(), vec![0.25]);
        assert_eq!(g.to_string(), "1/4");
    }
}
