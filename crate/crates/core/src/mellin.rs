//! Convolution on the multiplicative group `(0, inf)` with Haar measure `dln s`,
//! the trace kernel `k(t) = n c t / (1 + t^2)^{n/2+1}` and its Mellin transform,
//! and the monotonicity squeeze used to pass from the trace to the profile.
//!
//! The normal trace is `u(0, t) = (k * M)(t)` with `M(r) = mu(B_r) / r^{n-1}`.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::measures::RadialProfile;
use crate::quad::{Estimate, Quadrature};
use crate::report::{ConvergenceReport, LimitRule};
use crate::specfun::{kappa_n, log_gamma, tauberian_constant, Dimension};

/// Declared integrability of a function on the multiplicative group.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Integrability {
    /// `int |f| dln t < inf`
    L1Log,
    /// `f` bounded
    LinfLog,
    /// `int |f| t^{-alpha} dln t < inf`
    L1LogWeighted(f64),
    /// `f / t^alpha` bounded
    LinfLogWeighted(f64),
}

type Func = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A real function on `(0, inf)` vanishing outside `support`, with the points
/// where it is not smooth.
#[derive(Clone)]
pub struct LogLineFunction {
    f: Func,
    class: Integrability,
    support: (f64, f64),
    breaks: Vec<f64>,
    label: String,
}

impl fmt::Debug for LogLineFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LogLineFunction({}, {:?}, support {:?})", self.label, self.class, self.support)
    }
}

impl LogLineFunction {
    pub fn new<F>(label: impl Into<String>, class: Integrability, support: (f64, f64), breaks: Vec<f64>, f: F) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let (lo, hi) = support;
        if !(lo >= 0.0 && hi > lo) {
            return Err(Error::InvalidInput(format!("support ({lo}, {hi}) is not an interval of (0, inf)")));
        }
        Ok(LogLineFunction {
            f: Arc::new(f),
            class,
            support,
            breaks,
            label: label.into(),
        })
    }

    /// The character `F_alpha(t) = t^alpha`.
    pub fn character(alpha: f64) -> Self {
        LogLineFunction {
            f: Arc::new(move |t: f64| t.powf(alpha)),
            class: Integrability::LinfLogWeighted(alpha),
            support: (0.0, f64::INFINITY),
            breaks: Vec::new(),
            label: format!("t^{alpha}"),
        }
    }

    /// `height` on the closed-open interval `[a, b)`.
    pub fn boxcar(a: f64, b: f64, height: f64) -> Result<Self> {
        if !(a > 0.0 && b > a && b.is_finite()) {
            return Err(Error::InvalidInput(format!("box [{a}, {b}) must satisfy 0 < a < b < inf")));
        }
        Ok(LogLineFunction {
            f: Arc::new(move |s: f64| if s >= a && s < b { height } else { 0.0 }),
            class: Integrability::L1Log,
            support: (a, b),
            breaks: Vec::new(),
            label: format!("{height}*1[{a},{b})"),
        })
    }

    pub fn indicator(a: f64, b: f64) -> Result<Self> {
        Self::boxcar(a, b, 1.0)
    }

    /// The trace kernel `k`.
    pub fn kernel(n: Dimension) -> Self {
        let nc = n.as_f64() * kappa_n(n);
        let h = 0.5 * n.as_f64() + 1.0;
        LogLineFunction {
            f: Arc::new(move |t: f64| nc * t / (1.0 + t * t).powf(h)),
            class: Integrability::L1Log,
            support: (0.0, f64::INFINITY),
            breaks: vec![1.0],
            label: format!("k_{n}"),
        }
    }

    /// `M(r) = mu(B_r) / r^{n-1}` of a profile.
    pub fn profile(profile: &RadialProfile) -> Self {
        let p = profile.clone();
        LogLineFunction {
            f: Arc::new(move |r: f64| p.m(r).unwrap_or(f64::NAN)),
            class: Integrability::LinfLogWeighted(profile.dim().as_f64() - 1.0),
            support: (0.0, f64::INFINITY),
            breaks: profile.kinks(),
            label: "M".into(),
        }
    }

    pub fn eval(&self, s: f64) -> f64 {
        if s < self.support.0 || s > self.support.1 {
            0.0
        } else {
            (self.f)(s)
        }
    }

    pub fn class(&self) -> Integrability {
        self.class
    }

    pub fn support(&self) -> (f64, f64) {
        self.support
    }
}

/// `int_{ln lo}^{ln hi} h(x) dx` with interior break points (in `x`); infinite
/// ends go through the half-line maps of the quadrature.
fn integrate_log_range<H: Fn(f64) -> f64>(h: H, lo: f64, hi: f64, mut breaks: Vec<f64>) -> Result<Estimate> {
    let quad = Quadrature::default();
    let xlo = if lo > 0.0 { lo.ln() } else { f64::NEG_INFINITY };
    let xhi = if hi.is_finite() { hi.ln() } else { f64::INFINITY };
    breaks.retain(|x| x.is_finite() && *x > xlo && *x < xhi);
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let zero = Estimate { value: 0.0, error: 0.0 };
    if !(xhi > xlo) {
        return Ok(zero);
    }
    let first = if xlo.is_finite() {
        xlo
    } else {
        breaks.first().copied().unwrap_or(if xhi.is_finite() { xhi } else { 0.0 })
    };
    let last = if xhi.is_finite() {
        xhi
    } else {
        breaks.last().copied().unwrap_or(first)
    };
    let mut total = zero;
    if xlo.is_infinite() {
        total = total + quad.from_neg_infinity(&h, first)?;
    }
    if last > first {
        let mut pts = vec![first, last];
        pts.extend(breaks.iter().copied().filter(|x| *x > first && *x < last));
        total = total + quad.integrate_pieces(&h, &pts)?;
    }
    if xhi.is_infinite() {
        total = total + quad.to_infinity(&h, last)?;
    }
    Ok(total)
}

/// `(f * g)(t) = int_0^inf f(t/s) g(s) dln s`.
pub fn log_convolve(f: &LogLineFunction, g: &LogLineFunction, t: f64) -> Result<f64> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::domain("t", t, "t > 0"));
    }
    // s ranges over supp g and t / supp f
    let lo = g.support.0.max(if f.support.1.is_finite() { t / f.support.1 } else { 0.0 });
    let hi = g.support.1.min(if f.support.0 > 0.0 { t / f.support.0 } else { f64::INFINITY });
    let mut breaks: Vec<f64> = g.breaks.iter().filter(|b| **b > 0.0).map(|b| b.ln()).collect();
    breaks.extend(f.breaks.iter().filter(|b| **b > 0.0).map(|b| (t / b).ln()));
    breaks.push(t.ln());
    let h = |x: f64| {
        let s = x.exp();
        let a = t / s;
        if !(s > 0.0 && s.is_finite() && a > 0.0 && a.is_finite()) {
            return 0.0;
        }
        let fv = f.eval(a);
        if fv == 0.0 {
            return 0.0;
        }
        fv * g.eval(s)
    };
    Ok(integrate_log_range(h, lo, hi, breaks)?.value)
}

/// `k(t) = n c t / (1 + t^2)^{n/2+1}`.
pub fn kernel_k(t: f64, n: Dimension) -> f64 {
    n.as_f64() * kappa_n(n) * t / (1.0 + t * t).powf(0.5 * n.as_f64() + 1.0)
}

fn check_alpha(alpha: f64, n: Dimension) -> Result<()> {
    let top = n.as_f64() - 1.0;
    if alpha > -1.0 && alpha <= top {
        Ok(())
    } else {
        Err(Error::domain("alpha", alpha, format!("(-1, {top}]")))
    }
}

/// `int_0^inf k(t) t^{alpha - iy} dln t = Gamma((n - alpha + 1 + iy)/2) Gamma((alpha + 1 - iy)/2) / pi^{n/2}`.
pub fn k_hat_closed(y: f64, alpha: f64, n: Dimension) -> Result<Complex64> {
    check_alpha(alpha, n)?;
    let a = Complex64::new(0.5 * (n.as_f64() - alpha + 1.0), 0.5 * y);
    let b = Complex64::new(0.5 * (alpha + 1.0), -0.5 * y);
    let ln = log_gamma(a)? + log_gamma(b)? - 0.5 * n.as_f64() * std::f64::consts::PI.ln();
    Ok(ln.exp())
}

// int_0^{1/2} s^{a-1} (1 - s)^{b-1} ds in the variable x = ln s, for Re a > 0
fn half_beta(a: Complex64, b: Complex64) -> Result<Complex64> {
    let quad = Quadrature {
        abs_tol: 1e-14,
        rel_tol: 1e-10,
        ..Quadrature::default()
    };
    // e^{Re a x} < 1e-20 below x_min; the neglected piece is below 1e-20 / Re a
    let x_min = (1e-20f64).ln() / a.re;
    let x_max = -std::f64::consts::LN_2;
    let mut pts = vec![x_min, x_max];
    let mut x = x_max - 1.0;
    while x > x_min {
        pts.push(x);
        x -= 1.0;
    }
    let integrand = |x: f64, imag: bool| {
        let l = (-x.exp()).ln_1p();
        let modulus = (a.re * x + (b.re - 1.0) * l).exp();
        let phase = a.im * x + b.im * l;
        if imag {
            modulus * phase.sin()
        } else {
            modulus * phase.cos()
        }
    };
    let re = quad.integrate_pieces(|x| integrand(x, false), &pts)?;
    let im = quad.integrate_pieces(|x| integrand(x, true), &pts)?;
    Ok(Complex64::new(re.value, im.value))
}

/// The same transform by quadrature: `s = 1/(1 + t^2)` turns it into
/// `(n c / 2) int_0^1 s^{a-1} (1 - s)^{b-1} ds`, `a = (n - alpha + 1 + iy)/2`,
/// `b = (alpha + 1 - iy)/2`, split at `s = 1/2`.
pub fn k_hat_numeric(y: f64, alpha: f64, n: Dimension) -> Result<Complex64> {
    check_alpha(alpha, n)?;
    let a = Complex64::new(0.5 * (n.as_f64() - alpha + 1.0), 0.5 * y);
    let b = Complex64::new(0.5 * (alpha + 1.0), -0.5 * y);
    let beta = half_beta(a, b)? + half_beta(b, a)?;
    Ok(beta * (0.5 * n.as_f64() * kappa_n(n)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Plus,
    Minus,
}

/// `g_eps = eps^{-1} 1[1, 1+eps)` and `g_{-eps} = eps^{-1} 1[1-eps, 1)`.
pub fn squeeze_g(epsilon: f64, side: Side) -> Result<LogLineFunction> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::domain("epsilon", epsilon, "(0, 1)"));
    }
    match side {
        Side::Plus => LogLineFunction::boxcar(1.0, 1.0 + epsilon, 1.0 / epsilon),
        Side::Minus => LogLineFunction::boxcar(1.0 - epsilon, 1.0, 1.0 / epsilon),
    }
}

/// `int g(s) s^alpha dln s`.
pub fn weighted_moment(g: &LogLineFunction, alpha: f64) -> Result<f64> {
    let breaks = g.breaks.iter().filter(|b| **b > 0.0).map(|b| b.ln()).collect();
    let h = |x: f64| {
        let s = x.exp();
        if s > 0.0 && s.is_finite() {
            g.eval(s) * s.powf(alpha)
        } else {
            0.0
        }
    };
    Ok(integrate_log_range(h, g.support.0, g.support.1, breaks)?.value)
}

/// Relative slack granted to the squeeze inequalities for quadrature error.
pub const SQUEEZE_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SqueezeRow {
    pub t: f64,
    pub lower: f64,
    pub m: f64,
    pub upper: f64,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SqueezeReport {
    pub epsilon: f64,
    pub rows: Vec<SqueezeRow>,
    pub all_ok: bool,
}

/// Checks `(M * g_eps)(t) / (1+eps)^{n-1} <= M(t) <= (M * g_{-eps})(t) / (1-eps)^{n-1}`.
pub fn squeeze_check(profile: &RadialProfile, epsilon: f64, t_grid: &[f64], n: Dimension) -> Result<SqueezeReport> {
    if profile.dim() != n {
        return Err(Error::InvalidInput(format!("profile lives in dimension {}, not {n}", profile.dim())));
    }
    let m_fn = LogLineFunction::profile(profile);
    let plus = squeeze_g(epsilon, Side::Plus)?;
    let minus = squeeze_g(epsilon, Side::Minus)?;
    let d = n.boundary() as i32;
    let mut rows = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let lower = log_convolve(&m_fn, &plus, t)? / (1.0 + epsilon).powi(d);
        let upper = log_convolve(&m_fn, &minus, t)? / (1.0 - epsilon).powi(d);
        let m = profile.m(t)?;
        let ok = lower <= m + SQUEEZE_SLACK * m.abs().max(lower.abs()) && m <= upper + SQUEEZE_SLACK * upper.abs().max(m.abs());
        rows.push(SqueezeRow { t, lower, m, upper, ok });
    }
    let all_ok = rows.iter().all(|r| r.ok);
    Ok(SqueezeReport { epsilon, rows, all_ok })
}

/// Relative agreement required between the observed and predicted weak limits.
pub const WEAK_LIMIT_TOLERANCE: f64 = 0.01;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeakLimitReport {
    /// `t^alpha (M * g)(t)`.
    pub observed: ConvergenceReport,
    /// `t^alpha (k * M)(t)`, whose limit is `a`.
    pub trace: ConvergenceReport,
    pub a: Option<f64>,
    pub moment: f64,
    /// `a C_alpha int g s^alpha dln s`.
    pub predicted: Option<f64>,
    pub relative_error: Option<f64>,
    pub ok: bool,
}

/// Checks `t^alpha (M * g)(t) -> a C_alpha int g(s) s^alpha dln s`, where `a` is the
/// measured limit of `t^alpha u(0, t)` with `u = k * M`.
pub fn weak_limit_check(
    profile: &RadialProfile,
    g: &LogLineFunction,
    alpha: f64,
    t_grid: &[f64],
    n: Dimension,
) -> Result<WeakLimitReport> {
    let top = n.as_f64() - 1.0;
    if !(alpha > -1.0 && alpha < top) {
        return Err(Error::domain("alpha", alpha, format!("(-1, {top})")));
    }
    if profile.dim() != n {
        return Err(Error::InvalidInput(format!("profile lives in dimension {}, not {n}", profile.dim())));
    }
    let admissible = match g.class {
        Integrability::L1LogWeighted(w) => (w - alpha).abs() < 1e-12,
        Integrability::L1Log => g.support.0 > 0.0 && g.support.1.is_finite(),
        _ => false,
    };
    if !admissible {
        return Err(Error::InvalidInput(format!("{} is not integrable against t^{alpha}", g.label)));
    }
    let m_fn = LogLineFunction::profile(profile);
    let k = LogLineFunction::kernel(n);
    let rule = LimitRule::default();
    let observed = ConvergenceReport::from_fn(t_grid, rule, |t| Ok(t.powf(alpha) * log_convolve(&m_fn, g, t)?))?;
    let trace = ConvergenceReport::from_fn(t_grid, rule, |t| Ok(t.powf(alpha) * log_convolve(&k, &m_fn, t)?))?;
    let moment = weighted_moment(g, alpha)?;
    let c_alpha = tauberian_constant(alpha, n)?;
    let a = trace.extrapolated_limit;
    let predicted = a.map(|a| a * c_alpha * moment);
    let relative_error = match (predicted, observed.extrapolated_limit) {
        (Some(p), Some(o)) if p == 0.0 && o == 0.0 => Some(0.0),
        (Some(p), Some(o)) => Some((o - p).abs() / p.abs().max(o.abs())),
        _ => None,
    };
    let ok = relative_error.is_some_and(|e| e <= WEAK_LIMIT_TOLERANCE);
    Ok(WeakLimitReport {
        observed,
        trace,
        a,
        moment,
        predicted,
        relative_error,
        ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::halfspace::normal_trace_convolution;
    use crate::measures::{power_law_measure, BoundaryMeasure};
    use approx::assert_relative_eq;
    use std::f64::consts::{E, PI};

    fn dim(n: u32) -> Dimension {
        Dimension::new(n).unwrap()
    }

    #[test]
    fn unit_character_against_log_box() {
        let one = LogLineFunction::character(0.0);
        let g = LogLineFunction::indicator(1.0, E).unwrap();
        for t in [1e-3, 0.7, 40.0] {
            assert_relative_eq!(log_convolve(&one, &g, t).unwrap(), 1.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn character_eigen_identity() {
        let f = LogLineFunction::character(1.0);
        let g = LogLineFunction::indicator(1.0, 2.0).unwrap();
        // int_1^2 s^{-1} dln s = 1/2
        for t in [0.01, 1.0, 3.0] {
            assert_relative_eq!(log_convolve(&f, &g, t).unwrap() / t, 0.5, max_relative = 1e-12);
        }
    }

    #[test]
    fn kernel_values_and_slopes() {
        assert_relative_eq!(kernel_k(1.0, dim(3)), 3.0 / (2.0 * PI) / 2f64.powf(2.5), max_relative = 1e-14);
        let s0 = (kernel_k(1e-6, dim(3)).ln() - kernel_k(1e-7, dim(3)).ln()) / 10f64.ln();
        assert!((s0 - 1.0).abs() < 1e-6);
        let s1 = (kernel_k(1e7, dim(3)).ln() - kernel_k(1e6, dim(3)).ln()) / 10f64.ln();
        assert!((s1 + 4.0).abs() < 1e-6);
    }

    #[test]
    fn transform_closed_values() {
        let v = k_hat_closed(0.0, 0.0, dim(3)).unwrap();
        assert_relative_eq!(v.re, 1.0 / PI, max_relative = 1e-13);
        assert!(v.im.abs() < 1e-15);
        for n in 2..=6 {
            for alpha in [-0.5, 0.0, 0.7, n as f64 - 1.0] {
                let c = tauberian_constant(alpha, dim(n)).unwrap();
                assert_relative_eq!(k_hat_closed(0.0, alpha, dim(n)).unwrap().re * c, 1.0, max_relative = 1e-12);
            }
        }
        assert!(k_hat_closed(0.0, -1.0, dim(3)).is_err());
    }

    #[test]
    fn transform_numeric_matches_closed() {
        for n in [3, 4] {
            for alpha in [-0.5, 0.0, 1.0] {
                for y in [-10.0, -3.5, 0.0, 2.0, 10.0] {
                    let a = k_hat_numeric(y, alpha, dim(n)).unwrap();
                    let b = k_hat_closed(y, alpha, dim(n)).unwrap();
                    assert!((a - b).norm() < 1e-10, "n={n} alpha={alpha} y={y}: {a} vs {b}");
                }
            }
        }
        let z = k_hat_numeric(0.0, 0.5, dim(3)).unwrap();
        assert!(z.im.abs() < 1e-12);
        let p = k_hat_numeric(4.0, 0.5, dim(3)).unwrap();
        let m = k_hat_numeric(-4.0, 0.5, dim(3)).unwrap();
        assert!((p - m.conj()).norm() < 1e-10);
    }

    #[test]
    fn squeeze_functions() {
        let g = squeeze_g(0.5, Side::Plus).unwrap();
        assert_eq!(g.eval(1.0), 2.0);
        assert_eq!(g.eval(1.5), 0.0);
        assert_eq!(g.support(), (1.0, 1.5));
        for eps in [0.5, 0.1] {
            let g = squeeze_g(eps, Side::Plus).unwrap();
            assert_relative_eq!(weighted_moment(&g, 0.0).unwrap(), (1.0 + eps).ln() / eps, max_relative = 1e-12);
        }
        for alpha in [-0.5, 0.0, 1.0] {
            let m = weighted_moment(&squeeze_g(2f64.powi(-12), Side::Minus).unwrap(), alpha).unwrap();
            assert!((m - 1.0).abs() < 1e-3);
        }
        assert!(squeeze_g(1.0, Side::Minus).is_err());
    }

    #[test]
    fn convolution_reproduces_the_trace() {
        let n = dim(3);
        let mu = BoundaryMeasure::atom_at_origin(n, 2.0)
            .unwrap()
            .combine(&power_law_measure(0.5, 1.0, n, 1.0).unwrap())
            .unwrap();
        let k = LogLineFunction::kernel(n);
        let m = LogLineFunction::profile(&RadialProfile::from_measure(&mu));
        for t in [1e-3, 0.2, 3.0] {
            assert_relative_eq!(
                log_convolve(&k, &m, t).unwrap(),
                normal_trace_convolution(&mu, t).unwrap(),
                max_relative = 1e-9
            );
        }
    }

    #[test]
    fn squeeze_holds_and_detects_decrease() {
        let n = dim(3);
        let grid: Vec<f64> = (0..9).map(|i| 10f64.powf(-1.0 - 0.25 * i as f64)).collect();
        let mu = power_law_measure(0.5, 1.0, n, 1.0).unwrap();
        let r = squeeze_check(&RadialProfile::from_measure(&mu), 0.1, &grid, n).unwrap();
        assert!(r.all_ok);
        let atom = BoundaryMeasure::atom_at_origin(n, 1.0).unwrap();
        assert!(squeeze_check(&RadialProfile::from_measure(&atom), 0.01, &grid, n).unwrap().all_ok);
        let bad = RadialProfile::from_cumulative(n, |r: f64| r.powi(-10), vec![]);
        assert!(!squeeze_check(&bad, 0.1, &grid, n).unwrap().all_ok);
    }

    #[test]
    fn weak_limit_for_power_law() {
        let n = dim(3);
        let mu = power_law_measure(0.0, 1.0, n, 1.0).unwrap();
        let grid: Vec<f64> = (0..10).map(|i| 10f64.powf(-3.0 - 0.25 * i as f64)).collect();
        let g = squeeze_g(0.1, Side::Plus).unwrap();
        let r = weak_limit_check(&RadialProfile::from_measure(&mu), &g, 0.0, &grid, n).unwrap();
        assert!(r.ok, "{r:?}");
        assert_relative_eq!(r.a.unwrap(), 1.0 / PI, max_relative = 1e-3);
        let zero = weak_limit_check(&RadialProfile::from_measure(&BoundaryMeasure::empty(n)), &g, 0.0, &grid, n).unwrap();
        assert!(zero.ok);
        assert!(weak_limit_check(&RadialProfile::from_measure(&mu), &g, 2.0, &grid, n).is_err());
    }
}
