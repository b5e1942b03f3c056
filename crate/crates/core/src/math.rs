//! Float helpers that `core` does not provide.

/// `base^exp` for a signed integer exponent, by repeated squaring.
///
/// `0^0 = 1` and `0^k = 0` for `k > 0`, which the closed-form solver relies on
/// when the lower characteristic root vanishes.
pub(crate) fn powi(base: f64, exp: i64) -> f64 {
    if exp < 0 {
        return 1.0 / powi(base, -exp);
    }
    let mut result = 1.0;
    let mut b = base;
    let mut e = exp as u64;
    while e > 0 {
        if e & 1 == 1 {
            result *= b;
        }
        b *= b;
        e >>= 1;
    }
    result
}

#[inline]
pub(crate) fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub(crate) fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

#[inline]
pub(crate) fn abs(x: f64) -> f64 {
    libm::fabs(x)
}

#[inline]
pub(crate) fn round(x: f64) -> f64 {
    libm::round(x)
}

#[inline]
pub(crate) fn cos(x: f64) -> f64 {
    libm::cos(x)
}
