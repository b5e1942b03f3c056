//! Constant-plus-exponential cost functions.
//!
//! A cost is `c(0) = 0` and `c(x) = const_term + lin_term * base^x` for
//! integer hop counts `x > 0`. The same shape serves as migration cost (over
//! the migration distance) and transmission cost (over the user-service
//! distance after migration).

use alloc::vec::Vec;

use thiserror::Error;

use crate::math::{abs, powf, powi, sqrt};

/// Guard applied to `theta^W` when it lands within this distance of 1.
pub const FIT_EPSILON: f64 = 1e-6;

/// `c(x) = const_term + lin_term * base^x` for `x > 0`, and `c(0) = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstPlusExpCost {
    pub const_term: f64,
    pub lin_term: f64,
    pub base: f64,
}

/// A violated sign or monotonicity constraint of [`ConstPlusExpCost`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CostViolation {
    NonFinite,
    NegativeBase { base: f64 },
    /// `lin_term` has the wrong sign for `base`, so the cost decreases.
    LinTermSign { lin_term: f64, base: f64 },
    /// `const_term < -lin_term`, so the cost is negative somewhere.
    Negative { const_term: f64, lin_term: f64 },
}

impl ConstPlusExpCost {
    pub const fn new(const_term: f64, lin_term: f64, base: f64) -> Self {
        Self { const_term, lin_term, base }
    }

    /// A cost that is `value` for every `x > 0`.
    pub const fn constant(value: f64) -> Self {
        Self { const_term: value, lin_term: 0.0, base: 0.0 }
    }

    pub const fn zero() -> Self {
        Self::constant(0.0)
    }

    /// Cost at hop distance `x`.
    pub fn eval(&self, x: usize) -> f64 {
        if x == 0 {
            0.0
        } else {
            self.eval_exponential(x)
        }
    }

    /// `const_term + lin_term * base^n` without the `x = 0` special case.
    pub fn eval_exponential(&self, n: usize) -> f64 {
        self.const_term + self.lin_term * powi(self.base, n as i64)
    }

    /// Every violated constraint; empty when the cost is usable.
    pub fn violations(&self) -> Vec<CostViolation> {
        let mut out = Vec::new();
        if !(self.const_term.is_finite() && self.lin_term.is_finite() && self.base.is_finite()) {
            out.push(CostViolation::NonFinite);
            return out;
        }
        if self.base < 0.0 {
            out.push(CostViolation::NegativeBase { base: self.base });
        }
        if (self.base <= 1.0 && self.lin_term > 0.0) || (self.base >= 1.0 && self.lin_term < 0.0) {
            out.push(CostViolation::LinTermSign { lin_term: self.lin_term, base: self.base });
        }
        if self.const_term < -self.lin_term {
            out.push(CostViolation::Negative { const_term: self.const_term, lin_term: self.lin_term });
        }
        out
    }

    pub fn validate(&self) -> Result<(), Vec<CostViolation>> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(v)
        }
    }
}

/// A cost sampled at `n = 0, 1, ..., 2W`.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedCost {
    values: Vec<f64>,
    width: usize,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FitError {
    #[error("tabulated cost needs 2W+1 samples with W >= 1, got {0}")]
    BadLength(usize),
    #[error("tabulated cost contains a non-finite value at n = {0}")]
    NonFinite(usize),
    #[error("f(W) equals f(0); the ratio R is undefined")]
    DegenerateInput,
    #[error("tabulated cost decreases after n = {0}")]
    NonMonotone(usize),
}

impl TabulatedCost {
    pub fn new(values: Vec<f64>) -> Result<Self, FitError> {
        let len = values.len();
        if len < 3 || len.is_multiple_of(2) {
            return Err(FitError::BadLength(len));
        }
        if let Some(n) = values.iter().position(|v| !v.is_finite()) {
            return Err(FitError::NonFinite(n));
        }
        Ok(Self { width: (len - 1) / 2, values })
    }

    /// Samples `f` at `0..=2W`.
    pub fn from_fn(width: usize, f: impl Fn(usize) -> f64) -> Result<Self, FitError> {
        Self::new((0..=2 * width).map(f).collect())
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Which of the two `theta^W` roots a fit used.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RootChoice {
    Plus,
    Minus,
}

/// One candidate of the three-point fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitCandidate {
    pub root: RootChoice,
    /// `theta^W` after the epsilon guard.
    pub theta_pow_w: f64,
    pub params: ConstPlusExpCost,
    pub sse: f64,
    pub guarded: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitResult {
    pub params: ConstPlusExpCost,
    pub sse: f64,
    pub root_used: RootChoice,
    /// The chosen root needed the epsilon guard, so interpolation at `2W` is
    /// not exact.
    pub guarded: bool,
    pub candidates: [FitCandidate; 2],
}

/// `sum_{n=0}^{2W} (f(n) - (const_term + lin_term * base^n))^2`, including
/// `n = 0` in exponential form.
pub fn sum_squared_error(f: &TabulatedCost, params: &ConstPlusExpCost) -> f64 {
    f.values
        .iter()
        .enumerate()
        .map(|(n, &fv)| {
            let e = fv - params.eval_exponential(n);
            e * e
        })
        .sum()
}

/// Fits `const_term + lin_term * base^n` through `f(0)`, `f(W)` and `f(2W)`,
/// keeping whichever root of the ratio equation gives the smaller SSE.
pub fn fit_exponential(f: &TabulatedCost) -> Result<FitResult, FitError> {
    if let Some(n) = f.values.windows(2).position(|w| w[1] < w[0]) {
        return Err(FitError::NonMonotone(n));
    }
    let w = f.width;
    let f0 = f.values[0];
    let fw = f.values[w];
    let f2w = f.values[2 * w];
    if fw == f0 {
        return Err(FitError::DegenerateInput);
    }
    let ratio = (f2w - f0) / (fw - f0);
    let disc = sqrt((ratio * ratio - 4.0 * (ratio - 1.0)).max(0.0));

    let candidate = |root: RootChoice| {
        let raw = match root {
            RootChoice::Plus => (ratio + disc) / 2.0,
            RootChoice::Minus => (ratio - disc) / 2.0,
        };
        let mut t = raw;
        let guarded = abs(t - 1.0) < FIT_EPSILON;
        if guarded {
            t = if t < 1.0 { 1.0 - FIT_EPSILON } else { 1.0 + FIT_EPSILON };
        }
        let params = ConstPlusExpCost {
            const_term: (f0 * t - fw) / (t - 1.0),
            lin_term: (fw - f0) / (t - 1.0),
            base: powf(t, 1.0 / w as f64),
        };
        FitCandidate { root, theta_pow_w: t, params, sse: sum_squared_error(f, &params), guarded }
    };

    let plus = candidate(RootChoice::Plus);
    let minus = candidate(RootChoice::Minus);
    let best = if minus.sse < plus.sse { minus } else { plus };
    Ok(FitResult {
        params: best.params,
        sse: best.sse,
        root_used: best.root,
        guarded: best.guarded,
        candidates: [plus, minus],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_examples() {
        let cd = ConstPlusExpCost::new(1.0, -1.0, 0.8);
        assert_eq!(cd.eval(0), 0.0);
        assert!((cd.eval(1) - 0.2).abs() < 1e-15);
        let cm = ConstPlusExpCost::new(1.5, -0.5, 0.8);
        assert!((cm.eval(2) - 1.18).abs() < 1e-15);
    }

    #[test]
    fn eval_matches_table_oracle() {
        // 1 - 0.8^x tabulated by hand
        let table = [0.0, 0.2, 0.36, 0.488, 0.5904];
        let cd = ConstPlusExpCost::new(1.0, -1.0, 0.8);
        for (x, &want) in table.iter().enumerate() {
            assert!((cd.eval(x) - want).abs() < 1e-12, "x = {x}");
        }
    }

    #[test]
    fn validate_examples() {
        assert!(ConstPlusExpCost::new(1.0, -1.0, 0.8).validate().is_ok());
        let v = ConstPlusExpCost::new(1.0, 1.0, 0.8).violations();
        assert!(matches!(v.as_slice(), [CostViolation::LinTermSign { .. }]));
        let v = ConstPlusExpCost::new(0.4, -0.5, 0.8).violations();
        assert!(matches!(v.as_slice(), [CostViolation::Negative { .. }]));
        let v = ConstPlusExpCost::new(1.0, 0.0, -0.5).violations();
        assert!(matches!(v.as_slice(), [CostViolation::NegativeBase { .. }]));
        let v = ConstPlusExpCost::new(f64::NAN, 0.0, 0.5).violations();
        assert_eq!(v, [CostViolation::NonFinite]);
        assert!(ConstPlusExpCost::new(0.0, 1.0, 1.5).validate().is_ok());
    }

    #[test]
    fn fit_square_w1_is_exact() {
        let f = TabulatedCost::from_fn(1, |n| (n * n) as f64).unwrap();
        let fit = fit_exponential(&f).unwrap();
        assert_eq!(fit.root_used, RootChoice::Plus);
        assert!(!fit.guarded);
        assert!((fit.params.base - 3.0).abs() < 1e-12);
        assert!((fit.params.const_term + 0.5).abs() < 1e-12);
        assert!((fit.params.lin_term - 0.5).abs() < 1e-12);
        assert!(fit.sse < 1e-20);
        // the root at 1 gets guarded and loses
        assert!(fit.candidates[1].guarded);
        assert!(fit.candidates[1].sse > 1.0);
    }

    #[test]
    fn fit_square_w2_leaves_residuals() {
        let f = TabulatedCost::from_fn(2, |n| (n * n) as f64).unwrap();
        let fit = fit_exponential(&f).unwrap();
        // theta^2 = 3, beta_c = -2, beta_l = 2; residuals at n = 1 and n = 3
        let r1 = 1.0 - (-2.0 + 2.0 * 3f64.sqrt());
        let r3 = 9.0 - (-2.0 + 6.0 * 3f64.sqrt());
        assert!((fit.sse - (r1 * r1 + r3 * r3)).abs() < 1e-12);
        assert!(fit.sse > 0.5);
    }

    #[test]
    fn fit_errors() {
        let f = TabulatedCost::from_fn(2, |_| 3.0).unwrap();
        assert_eq!(fit_exponential(&f), Err(FitError::DegenerateInput));
        let f = TabulatedCost::new(alloc::vec![0.0, 2.0, 1.0]).unwrap();
        assert_eq!(fit_exponential(&f), Err(FitError::NonMonotone(1)));
        assert_eq!(TabulatedCost::new(alloc::vec![0.0, 1.0]), Err(FitError::BadLength(2)));
    }

    #[test]
    fn fit_flat_tail_gives_zero_base() {
        // f(2W) = f(W): R = 1, theta^W = 0
        let f = TabulatedCost::new(alloc::vec![0.0, 1.0, 1.0]).unwrap();
        let fit = fit_exponential(&f).unwrap();
        assert_eq!(fit.params.base, 0.0);
        for n in 0..3 {
            assert!((fit.params.eval_exponential(n) - f.values()[n]).abs() < 1e-12);
        }
    }
}
