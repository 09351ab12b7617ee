use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A Lebesgue (or sequence-space) exponent `p` in `[1, inf]`.
///
/// Infinity is represented exactly; reciprocals are exact zero for it, which
/// is what the Hölder-type exponent arithmetic uses throughout.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct Exponent(f64);

impl Exponent {
    pub const ONE: Exponent = Exponent(1.0);
    pub const TWO: Exponent = Exponent(2.0);
    pub const INFINITY: Exponent = Exponent(f64::INFINITY);

    pub fn new(p: f64) -> Result<Self> {
        if p.is_nan() || p < 1.0 {
            return Err(Error::InvalidExponent(p));
        }
        Ok(Exponent(p))
    }

    /// Builds the exponent whose reciprocal is `r` (`r = 0` gives infinity).
    pub fn from_reciprocal(r: f64) -> Result<Self> {
        if !(0.0..=1.0 + 1e-12).contains(&r) {
            return Err(Error::InvalidExponent(if r == 0.0 { f64::INFINITY } else { 1.0 / r }));
        }
        if r == 0.0 {
            Ok(Self::INFINITY)
        } else {
            Ok(Exponent((1.0 / r).max(1.0)))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }

    pub fn reciprocal(self) -> f64 {
        if self.is_infinite() {
            0.0
        } else {
            1.0 / self.0
        }
    }

    /// Hölder conjugate `p'` with `1/p + 1/p' = 1`.
    pub fn conjugate(self) -> Self {
        Exponent::from_reciprocal(1.0 - self.reciprocal()).expect("conjugate of a valid exponent")
    }

    /// Exponent `p` with `1/p = 1/a + 1/b`, if it is still at least one.
    pub fn holder_sum(a: Exponent, b: Exponent) -> Result<Self> {
        Exponent::from_reciprocal(a.reciprocal() + b.reciprocal())
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            write!(f, "inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("inf") || t.eq_ignore_ascii_case("infinity") {
            return Ok(Self::INFINITY);
        }
        let p: f64 = t
            .parse()
            .map_err(|_| Error::param(format!("cannot parse exponent {s:?}")))?;
        Exponent::new(p)
    }
}
