//! Small scalar helpers shared by the closed forms and the oracle.

use num_complex::Complex64;

#[inline]
pub(crate) fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

/// `ln[Γ(a + n) / (n! Γ(a))]`, the log of the generalized binomial weight that
/// appears in every coherent-state expansion.
#[inline]
pub(crate) fn ln_pochhammer_over_factorial(a: f64, n: usize) -> f64 {
    let n = n as f64;
    ln_gamma(a + n) - ln_gamma(n + 1.0) - ln_gamma(a)
}

/// Principal logarithm with `arg ∈ (−π, π]`.
#[inline]
pub(crate) fn cln(z: Complex64) -> Complex64 {
    Complex64::new(libm::log(z.norm()), z.arg())
}

#[inline]
pub(crate) fn cexp(z: Complex64) -> Complex64 {
    let m = libm::exp(z.re);
    Complex64::new(m * libm::cos(z.im), m * libm::sin(z.im))
}

/// Angle reduced into `[0, 2π)`.
#[inline]
pub(crate) fn wrap_angle(phi: f64) -> f64 {
    let tau = core::f64::consts::TAU;
    let mut r = libm::fmod(phi, tau);
    if r < 0.0 {
        r += tau;
    }
    if r >= tau {
        r = 0.0;
    }
    r
}
