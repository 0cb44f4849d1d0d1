//! Special functions: complex log-Gamma, Beta, sphere and ball constants, the
//! half-space Poisson normalization `kappa_n` and the growth constant `C_alpha`.
//!
//! `log_gamma` uses the Stirling series after shifting the argument with the
//! recurrence `Gamma(z + 1) = z Gamma(z)` until `|z| >= 16` and `Re z >= 1/2`.
//! The shift is a sum of principal logarithms, so the result is the analytic
//! branch of `ln Gamma` on the plane cut along `(-inf, 0]`, real on the positive
//! axis.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ambient dimension `n >= 2` of the half-space `R^n_+` (boundary dimension `n - 1`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct Dimension(u32);

impl Dimension {
    pub fn new(n: u32) -> Result<Self> {
        if n < 2 {
            return Err(Error::domain("dimension n", n as f64, "n >= 2"));
        }
        Ok(Dimension(n))
    }

    pub fn get(self) -> u32 {
        self.0
    }

    pub fn as_f64(self) -> f64 {
        self.0 as f64
    }

    /// Dimension `n - 1` of the boundary hyperplane.
    pub fn boundary(self) -> usize {
        (self.0 - 1) as usize
    }
}

impl TryFrom<u32> for Dimension {
    type Error = Error;

    fn try_from(n: u32) -> Result<Self> {
        Dimension::new(n)
    }
}

impl From<Dimension> for u32 {
    fn from(d: Dimension) -> u32 {
        d.0
    }
}

impl std::fmt::Display for Dimension {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

// B_{2k} / (2k (2k - 1)), k = 1..=10
const STIRLING_COEFFS: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
    43867.0 / 244_188.0,
    -174_611.0 / 125_400.0,
];

const STIRLING_MIN_MODULUS: f64 = 16.0;
const MAX_RECURRENCE: f64 = 400.0;

fn stirling(w: Complex64) -> Complex64 {
    let half_ln_2pi = 0.5 * (2.0 * PI).ln();
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut power = inv;
    for c in STIRLING_COEFFS {
        series += power * c;
        power *= inv2;
    }
    (w - 0.5) * w.ln() - w + half_ln_2pi + series
}

/// Principal branch of `ln Gamma(z)`.
pub fn log_gamma(z: Complex64) -> Result<Complex64> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::domain("log_gamma argument", z.re, "finite complex numbers"));
    }
    if z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round() {
        return Err(Error::Pole(z.re));
    }
    if z.re < -MAX_RECURRENCE {
        return Err(Error::domain("log_gamma real part", z.re, "Re z >= -400"));
    }
    let mut w = z;
    let mut shift = Complex64::new(0.0, 0.0);
    while w.re < 0.5 || w.norm() < STIRLING_MIN_MODULUS {
        shift += w.ln();
        w += 1.0;
    }
    Ok(stirling(w) - shift)
}

/// `ln Gamma(x)` for real `x > 0`.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::domain("ln_gamma argument", x, "x > 0"));
    }
    Ok(log_gamma(Complex64::new(x, 0.0))?.re)
}

pub fn gamma(x: f64) -> Result<f64> {
    Ok(ln_gamma(x)?.exp())
}

/// Euler Beta function `B(a, b)` for real positive arguments.
pub fn beta(a: f64, b: f64) -> Result<f64> {
    Ok((ln_gamma(a)? + ln_gamma(b)? - ln_gamma(a + b)?).exp())
}

/// Complex Beta function `Gamma(a) Gamma(b) / Gamma(a + b)`.
pub fn beta_complex(a: Complex64, b: Complex64) -> Result<Complex64> {
    Ok((log_gamma(a)? + log_gamma(b)? - log_gamma(a + b)?).exp())
}

/// Half-space Poisson kernel normalization `Gamma(n/2) / pi^(n/2)`.
pub fn kappa_n(n: Dimension) -> f64 {
    let h = 0.5 * n.as_f64();
    (ln_gamma(h).expect("n/2 > 0") - h * PI.ln()).exp()
}

/// Growth constant `C_alpha = pi^(n/2) / (Gamma((n - alpha + 1)/2) Gamma((alpha + 1)/2))`.
///
/// Converts the measure growth limit `b = lim M(r) r^alpha` into the normal trace
/// limit `a = lim u(0, t) t^alpha` through `a = b / C_alpha`.
pub fn tauberian_constant(alpha: f64, n: Dimension) -> Result<f64> {
    let top = n.as_f64() - 1.0;
    if !(alpha > -1.0 && alpha <= top) {
        return Err(Error::domain("alpha", alpha, format!("(-1, {top}]")));
    }
    let h = 0.5 * n.as_f64();
    let ln_c = h * PI.ln() - ln_gamma(0.5 * (n.as_f64() - alpha + 1.0))? - ln_gamma(0.5 * (alpha + 1.0))?;
    Ok(ln_c.exp())
}

/// Surface area of the unit sphere `S^m` in `R^(m+1)`.
pub fn sphere_area(m: u32) -> f64 {
    let h = 0.5 * (m as f64 + 1.0);
    2.0 * (h * PI.ln() - ln_gamma(h).expect("h > 0")).exp()
}

/// Volume of the unit ball in `R^d`.
pub fn unit_ball_volume(d: u32) -> f64 {
    let h = 0.5 * d as f64;
    (h * PI.ln() - ln_gamma(h + 1.0).expect("h + 1 > 0")).exp()
}

/// Complete elliptic integral of the second kind `E(m) = int_0^{pi/2} sqrt(1 - m sin^2) `.
pub fn complete_elliptic_e(m: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&m) {
        return Err(Error::domain("elliptic parameter m", m, "[0, 1]"));
    }
    Ok(elliptic_e_complementary(1.0 - m))
}

/// `E(m)` taking the complementary parameter `mc = 1 - m`, which keeps full
/// precision when `m` is close to one.
pub(crate) fn elliptic_e_complementary(mc: f64) -> f64 {
    if mc <= 0.0 {
        return 1.0;
    }
    // AGM: E = K (1 - sum_j 2^(j-1) c_j^2), K = pi / (2 a_N)
    let mut a = 1.0;
    let mut b = mc.sqrt();
    let mut sum = 0.5 * (1.0 - mc);
    let mut weight = 0.5;
    for _ in 0..64 {
        let c = 0.5 * (a - b);
        weight *= 2.0;
        sum += weight * c * c;
        let next = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = next;
        if c.abs() <= 1e-15 * a {
            break;
        }
    }
    PI / (2.0 * a) * (1.0 - sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn dim(n: u32) -> Dimension {
        Dimension::new(n).unwrap()
    }

    #[test]
    fn log_gamma_closed_forms() {
        let one = log_gamma(Complex64::new(1.0, 0.0)).unwrap();
        assert!(one.norm() < 1e-13);
        let half = log_gamma(Complex64::new(0.5, 0.0)).unwrap();
        assert_relative_eq!(half.re, PI.sqrt().ln(), max_relative = 1e-13);
        assert!(half.im.abs() < 1e-15);
        let three_halves = log_gamma(Complex64::new(1.5, 0.0)).unwrap();
        assert_relative_eq!(three_halves.re, (PI.sqrt() / 2.0).ln(), max_relative = 1e-12);
        assert_relative_eq!(three_halves.re, -0.1207822376352452, max_relative = 1e-12);
    }

    #[test]
    fn log_gamma_complex_reference_values() {
        // reference values from an arbitrary-precision loggamma
        let cases = [
            ((3.0, 4.0), (-1.75662678460378, 4.74266443803466)),
            ((0.3, -7.0), (-10.4656744467029, -6.31030964704077)),
            ((-2.5, 0.1), (-0.103149244042819, -9.31444426835984)),
        ];
        for ((re, im), (lre, lim)) in cases {
            let v = log_gamma(Complex64::new(re, im)).unwrap();
            assert_relative_eq!(v.re, lre, max_relative = 1e-12);
            assert_relative_eq!(v.im, lim, max_relative = 1e-12);
        }
    }

    #[test]
    fn negative_real_axis_takes_upper_limit() {
        let v = log_gamma(Complex64::new(-3.5, 0.0)).unwrap();
        assert_relative_eq!(v.re, -1.30900668499304, max_relative = 1e-12);
        assert_relative_eq!(v.im, -4.0 * PI, max_relative = 1e-14);
    }

    #[test]
    fn reflection_formula_matches() {
        // Gamma(z) Gamma(1 - z) = pi / sin(pi z), compared on magnitudes
        for &(re, im) in &[(-0.3, 0.7), (-4.2, 1.5), (0.2, -3.0), (-11.6, 0.4)] {
            let z = Complex64::new(re, im);
            let lhs = (log_gamma(z).unwrap() + log_gamma(1.0 - z).unwrap()).exp();
            let rhs = PI / (z * PI).sin();
            assert_relative_eq!(lhs.re, rhs.re, max_relative = 1e-11, epsilon = 1e-13);
            assert_relative_eq!(lhs.im, rhs.im, max_relative = 1e-11, epsilon = 1e-13);
        }
    }

    #[test]
    fn poles_are_rejected() {
        for x in [0.0, -1.0, -7.0] {
            assert_eq!(log_gamma(Complex64::new(x, 0.0)), Err(Error::Pole(x)));
        }
        assert!(log_gamma(Complex64::new(-1.0, 1e-3)).is_ok());
    }

    #[test]
    fn recursion_holds_on_real_axis() {
        let mut x = 0.5;
        while x <= 20.0 {
            let lhs = gamma(x + 1.0).unwrap();
            let rhs = x * gamma(x).unwrap();
            assert_relative_eq!(lhs, rhs, max_relative = 1e-12);
            x += 0.37;
        }
    }

    #[test]
    fn kappa_closed_forms() {
        assert_relative_eq!(kappa_n(dim(2)), 1.0 / PI, max_relative = 1e-14);
        assert_relative_eq!(kappa_n(dim(3)), 1.0 / (2.0 * PI), max_relative = 1e-14);
        assert_relative_eq!(kappa_n(dim(4)), 1.0 / (PI * PI), max_relative = 1e-14);
    }

    #[test]
    fn kappa_times_sphere_area_is_two() {
        for n in 2..=10 {
            assert_relative_eq!(kappa_n(dim(n)) * sphere_area(n - 1), 2.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn sphere_areas() {
        assert_relative_eq!(sphere_area(0), 2.0, max_relative = 1e-14);
        assert_relative_eq!(sphere_area(1), 2.0 * PI, max_relative = 1e-14);
        assert_relative_eq!(sphere_area(2), 4.0 * PI, max_relative = 1e-14);
    }

    #[test]
    fn tauberian_constant_values() {
        assert_relative_eq!(tauberian_constant(0.0, dim(3)).unwrap(), PI, max_relative = 1e-13);
        for n in 2..=8 {
            let c = tauberian_constant(n as f64 - 1.0, dim(n)).unwrap();
            assert_relative_eq!(c, 1.0 / kappa_n(dim(n)), max_relative = 1e-12);
            let c0 = tauberian_constant(0.0, dim(n)).unwrap();
            assert_relative_eq!(c0, unit_ball_volume(n - 1), max_relative = 1e-12);
        }
        // pi^{3/2} / (Gamma(7/4) Gamma(3/4)), Gamma values from an independent table
        let expected = PI.powf(1.5) / (0.919_062_526_848_882_6 * 1.225_416_702_465_178);
        assert_relative_eq!(tauberian_constant(0.5, dim(3)).unwrap(), expected, max_relative = 1e-12);
    }

    #[test]
    fn tauberian_constant_domain() {
        assert!(tauberian_constant(-1.0, dim(3)).is_err());
        assert!(tauberian_constant(2.0001, dim(3)).is_err());
        assert!(tauberian_constant(2.0, dim(3)).is_ok());
    }

    #[test]
    fn elliptic_e_values() {
        assert_relative_eq!(complete_elliptic_e(0.0).unwrap(), PI / 2.0, max_relative = 1e-15);
        assert_relative_eq!(complete_elliptic_e(1.0).unwrap(), 1.0, max_relative = 1e-15);
        // E(1/2) from tables
        assert_relative_eq!(complete_elliptic_e(0.5).unwrap(), 1.350_643_881_047_675_5, max_relative = 1e-14);
        assert_relative_eq!(complete_elliptic_e(0.99).unwrap(), 1.015_993_545_025_223_8, max_relative = 1e-13);
    }

    #[test]
    fn dimension_rejects_small_n() {
        assert!(Dimension::new(1).is_err());
        assert_eq!(Dimension::new(3).unwrap().boundary(), 2);
    }
}
