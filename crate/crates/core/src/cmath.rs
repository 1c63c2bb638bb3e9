//! Complex exponentials on the portable `libm` routines.
//!
//! The platform `sin` and the fused `sincos` an optimizing build may call
//! instead can disagree in the last bit; near the noise-limited zeros that
//! bit changes the search, so every trigonometric call goes through here.

use num_complex::Complex64;

/// `e^w`
pub(crate) fn exp(w: Complex64) -> Complex64 {
    let r = libm::exp(w.re);
    Complex64::new(r * libm::cos(w.im), r * libm::sin(w.im))
}

/// `e^w - 1` without cancellation for small `|w|`.
pub(crate) fn expm1(w: Complex64) -> Complex64 {
    let (x, y) = (w.re, w.im);
    let half_sin = libm::sin(0.5 * y);
    Complex64::new(
        libm::expm1(x) * libm::cos(y) - 2.0 * half_sin * half_sin,
        libm::exp(x) * libm::sin(y),
    )
}

/// `e^{i theta}`
pub(crate) fn unit(theta: f64) -> Complex64 {
    Complex64::new(libm::cos(theta), libm::sin(theta))
}

pub(crate) fn is_finite(z: Complex64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}
