//! Closed-form free evolution of a Gaussian.

use num_complex::Complex64;

/// `e^{itDelta} e^{-|x|^2/(2a)}` at `(t, x)`:
/// `(a/(a + 2it))^{3/2} exp(-|x|^2 / (2(a + 2it)))`.
pub fn gaussian_free_closed_form(a: f64, t: f64, x: [f64; 3]) -> Complex64 {
    let w = Complex64::new(a, 2.0 * t);
    let r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
    (Complex64::new(a, 0.0) / w).powf(1.5) * (-r2 / (2.0 * w)).exp()
}

/// `sup_x |u(t, x)| = (1 + 4t^2/a^2)^{-3/4}`.
pub fn gaussian_free_sup(a: f64, t: f64) -> f64 {
    (1.0 + 4.0 * t * t / (a * a)).powf(-0.75)
}
