//! Small result types shared by the verifiers and monitors.

use std::fmt;

/// Outcome of an inequality check phrased as `lhs / rhs`.
#[derive(Clone, Debug, PartialEq)]
pub enum Ratio {
    Value { lhs: f64, rhs: f64 },
    Skipped(String),
}

impl Ratio {
    /// `lhs / rhs`, or a skip marker when the denominator vanishes.
    pub fn of(lhs: f64, rhs: f64) -> Ratio {
        if rhs == 0.0 || !rhs.is_finite() || !lhs.is_finite() {
            Ratio::Skipped(format!("degenerate denominator (lhs = {lhs:e}, rhs = {rhs:e})"))
        } else {
            Ratio::Value { lhs, rhs }
        }
    }

    pub fn skipped(reason: impl Into<String>) -> Ratio {
        Ratio::Skipped(reason.into())
    }

    pub fn value(&self) -> Option<f64> {
        match self {
            Ratio::Value { lhs, rhs } => Some(lhs / rhs),
            Ratio::Skipped(_) => None,
        }
    }

    pub fn is_skipped(&self) -> bool {
        matches!(self, Ratio::Skipped(_))
    }

    pub fn lhs(&self) -> Option<f64> {
        match self {
            Ratio::Value { lhs, .. } => Some(*lhs),
            Ratio::Skipped(_) => None,
        }
    }

    pub fn rhs(&self) -> Option<f64> {
        match self {
            Ratio::Value { rhs, .. } => Some(*rhs),
            Ratio::Skipped(_) => None,
        }
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ratio::Value { lhs, rhs } => write!(f, "{:.6e} ({:.6e} / {:.6e})", lhs / rhs, lhs, rhs),
            Ratio::Skipped(why) => write!(f, "skipped: {why}"),
        }
    }
}

/// Slack `rhs - lhs` of an inequality `lhs <= rhs` whose constant is one.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Slack {
    pub lhs: f64,
    pub rhs: f64,
}

impl Slack {
    pub fn new(lhs: f64, rhs: f64) -> Self {
        Slack { lhs, rhs }
    }

    pub fn value(&self) -> f64 {
        self.rhs - self.lhs
    }

    /// Slack divided by the right-hand side (zero when both sides vanish).
    pub fn relative(&self) -> f64 {
        let scale = self.rhs.abs().max(self.lhs.abs());
        if scale == 0.0 {
            0.0
        } else {
            self.value() / scale
        }
    }

    /// True when `lhs <= rhs (1 + tol)`.
    pub fn holds(&self, tol: f64) -> bool {
        self.relative() >= -tol
    }
}

/// Running maximum of ratios, ignoring skips.
#[derive(Clone, Debug, Default)]
pub struct RatioStats {
    pub count: usize,
    pub skipped: usize,
    pub max: f64,
    pub min: f64,
}

impl RatioStats {
    pub fn new() -> Self {
        RatioStats {
            count: 0,
            skipped: 0,
            max: f64::NEG_INFINITY,
            min: f64::INFINITY,
        }
    }

    pub fn push(&mut self, r: &Ratio) {
        match r.value() {
            Some(v) => {
                self.count += 1;
                self.max = self.max.max(v);
                self.min = self.min.min(v);
            }
            None => self.skipped += 1,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_denominator_skips() {
        assert!(Ratio::of(1.0, 0.0).is_skipped());
        assert_eq!(Ratio::of(1.0, 4.0).value(), Some(0.25));
    }

    #[test]
    fn slack_relative() {
        assert!(Slack::new(1.0, 1.0).holds(0.0));
        assert!(!Slack::new(1.1, 1.0).holds(1e-10));
        assert_eq!(Slack::new(0.0, 0.0).relative(), 0.0);
    }
}
