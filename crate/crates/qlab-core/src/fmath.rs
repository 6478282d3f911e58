//! Build-invariant real transcendentals.
//!
//! Every `sqrt`, `cos`, `sin`, and `ln` in this crate goes through [`libm`]
//! via this extension trait. Calling the inherent `f64` methods instead would
//! make the arithmetic depend on whether some crate in the build graph links
//! std (inherent methods shadow trait methods whenever they exist), and the
//! two implementations differ by a few ulp on the non-correctly-rounded
//! functions. The method names are deliberately distinct from the inherent
//! ones so resolution can only ever reach these definitions.
//!
//! The same concern applies to `num_complex` helpers that call transcendental
//! functions internally (`Complex::norm` uses `hypot`, `Complex::from_polar`
//! uses `sin`/`cos`): those bodies are compiled inside `num_complex` with
//! whatever float backend feature unification hands it, so this module
//! provides pinned replacements and non-test code must use them.

use num_complex::Complex64 as C64;

/// Modulus of a complex number, always via `libm::hypot`.
#[inline]
pub(crate) fn cnorm(z: C64) -> f64 {
    libm::hypot(z.re, z.im)
}

/// Polar-form constructor, always via `libm::cos`/`libm::sin`.
#[inline]
pub(crate) fn from_polar(r: f64, theta: f64) -> C64 {
    C64::new(r * libm::cos(theta), r * libm::sin(theta))
}

pub(crate) trait LibmExt {
    fn lm_sqrt(self) -> f64;
    fn lm_cos(self) -> f64;
    fn lm_sin(self) -> f64;
    fn lm_ln(self) -> f64;
}

impl LibmExt for f64 {
    #[inline]
    fn lm_sqrt(self) -> f64 {
        libm::sqrt(self)
    }

    #[inline]
    fn lm_cos(self) -> f64 {
        libm::cos(self)
    }

    #[inline]
    fn lm_sin(self) -> f64 {
        libm::sin(self)
    }

    #[inline]
    fn lm_ln(self) -> f64 {
        libm::log(self)
    }
}
