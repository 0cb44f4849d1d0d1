//! Poisson kernel of the upper half-space `R^n_+ = {(x, t) : x in R^{n-1}, t > 0}`
//! and the Poisson extension `u = int K dmu` of a [`BoundaryMeasure`].
//!
//! Two independent routes give the normal trace `u(0, t)`: the kernel integrated
//! against the density (`normal_trace_direct`), and the integrated-by-parts form
//! `int_0^inf n c r t / (r^2 + t^2)^{n/2+1} mu(B_r) dr` against the cumulative
//! profile (`normal_trace_convolution`). No truncation is involved in either;
//! infinite ranges go through the power substitutions of [`Quadrature::half_line`].

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{box_ball_volume, box_distance_range, box_kink_radii, norm};
use crate::measures::{ball_mass, BoundaryMeasure, Patch, RadialPower};
use crate::quad::{HalfLine, Quadrature};
use crate::report::{ConvergenceReport, LimitRule};
use crate::specfun::{elliptic_e_complementary, kappa_n, sphere_area, Dimension};

/// A point `(x, t)` of the upper half-space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HalfSpacePoint {
    pub x: Vec<f64>,
    pub t: f64,
}

impl HalfSpacePoint {
    pub fn new(x: Vec<f64>, t: f64) -> Result<Self> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::domain("height t", t, "t > 0"));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("point coordinates must be finite".into()));
        }
        Ok(HalfSpacePoint { x, t })
    }

    pub fn on_axis(n: Dimension, t: f64) -> Result<Self> {
        Self::new(vec![0.0; n.boundary()], t)
    }
}

/// `K(x, t) = kappa_n t / (|x|^2 + t^2)^{n/2}`.
pub fn poisson_kernel(x: &[f64], t: f64, n: Dimension) -> f64 {
    let r2: f64 = x.iter().map(|v| v * v).sum();
    kappa_n(n) * t / (r2 + t * t).powf(0.5 * n.as_f64())
}

/// `int_{R^{n-1}} K(x, t) dx` by radial reduction; equals one.
pub fn kernel_mass(t: f64, n: Dimension) -> Result<f64> {
    let d = n.boundary() as f64;
    let h = 0.5 * n.as_f64();
    let c = kappa_n(n) * sphere_area(n.get() - 2) * t;
    let head = |r: f64| c / (r * r + t * t).powf(h);
    let body = |r: f64| c * r.powf(d - 1.0) / (r * r + t * t).powf(h);
    let tail = |r: f64| c / (1.0 + (t / r).powi(2)).powf(h);
    let parts = HalfLine {
        head_power: d,
        head: &head,
        body: &body,
        tail_power: 1.0,
        tail: &tail,
    };
    Ok(Quadrature::default().half_line(0.0, f64::INFINITY, &[t], &parts)?.value)
}

/// Average of `K(x - xi, t)` over the sphere `|xi| = r` given the squared
/// distances `dm`, `dp` from `(x, t)` to its nearest and farthest points
/// (`dm = (r - |x|)^2 + t^2`). Homogeneous of degree `-n/2` in `(dm, dp)`.
fn shell_average(n: u32, kappa: f64, dm: f64, dp: f64, t: f64) -> f64 {
    match n {
        2 => 0.5 * kappa * t * (1.0 / dm + 1.0 / dp),
        3 => kappa * t * 2.0 / PI * elliptic_e_complementary(dm / dp) / (dm * dp.sqrt()),
        4 => kappa * t / (dm * dp),
        // only reached with x = 0, where dm = dp
        _ => kappa * t * dm.powf(-0.5 * n as f64),
    }
}

struct Shell {
    n: u32,
    kappa: f64,
    dist: f64,
    t: f64,
}

impl Shell {
    fn direct(&self, r: f64) -> f64 {
        let dm = (r - self.dist).powi(2) + self.t * self.t;
        let dp = (r + self.dist).powi(2) + self.t * self.t;
        shell_average(self.n, self.kappa, dm, dp, self.t)
    }

    // r^n times the average, stable as r -> inf
    fn scaled(&self, r: f64) -> f64 {
        let u = 1.0 / r;
        let a = (self.t * u).powi(2);
        let dm = (1.0 - self.dist * u).powi(2) + a;
        let dp = (1.0 + self.dist * u).powi(2) + a;
        shell_average(self.n, self.kappa, dm, dp, self.t)
    }

    fn knots(&self) -> Vec<f64> {
        let (d, t) = (self.dist, self.t);
        let mut k = vec![t, 4.0 * t];
        if d > 0.0 {
            k.extend([d - 4.0 * t, d - t, d, d + t, d + 4.0 * t]);
        }
        k.retain(|v| *v > 0.0);
        k
    }
}

fn radial_extend(comp: &RadialPower, n: Dimension, dist: f64, t: f64, quad: &Quadrature) -> Result<f64> {
    let d = n.boundary();
    let shell = Shell {
        n: n.get(),
        kappa: kappa_n(n),
        dist,
        t,
    };
    let scale = comp.coeff * sphere_area(d as u32 - 1);
    let p = comp.q + d as f64;
    let head = |r: f64| scale * shell.direct(r);
    let body = |r: f64| scale * r.powf(p - 1.0) * shell.direct(r);
    let tail = |r: f64| scale * shell.scaled(r);
    let parts = HalfLine {
        head_power: p,
        head: &head,
        body: &body,
        tail_power: 1.0 - comp.q,
        tail: &tail,
    };
    Ok(quad.half_line(comp.r0, comp.r1, &shell.knots(), &parts)?.value)
}

// int over [0,a]x[0,b] of (x^2 + y^2 + s^2)^{-2}; odd in a and in b
fn box_corner_4(a: f64, b: f64, s: f64) -> f64 {
    let ca = (a * a + s * s).sqrt();
    let cb = (b * b + s * s).sqrt();
    (a / ca * (b / ca).atan() + b / cb * (a / cb).atan()) / (2.0 * s * s)
}

fn patch_extend(p: &Patch, x: &[f64], t: f64, n: Dimension, quad: &Quadrature) -> Result<f64> {
    if p.density == 0.0 {
        return Ok(0.0);
    }
    let lo: Vec<f64> = p.lo.iter().zip(x).map(|(a, c)| a - c).collect();
    let hi: Vec<f64> = p.hi.iter().zip(x).map(|(a, c)| a - c).collect();
    let value = match n.get() {
        2 => ((hi[0] / t).atan() - (lo[0] / t).atan()) / PI,
        3 => {
            let corner = |a: f64, b: f64| (a * b / (t * (a * a + b * b + t * t).sqrt())).atan();
            (corner(hi[0], hi[1]) - corner(lo[0], hi[1]) - corner(hi[0], lo[1]) + corner(lo[0], lo[1])) / (2.0 * PI)
        }
        4 => {
            let slab = |z: f64| {
                let s = (z * z + t * t).sqrt();
                box_corner_4(hi[0], hi[1], s) - box_corner_4(lo[0], hi[1], s) - box_corner_4(hi[0], lo[1], s)
                    + box_corner_4(lo[0], lo[1], s)
            };
            let mut pts = vec![lo[2], hi[2]];
            pts.extend([-4.0 * t, -t, 0.0, t, 4.0 * t].into_iter().filter(|z| *z > lo[2] && *z < hi[2]));
            let est = quad.integrate_pieces(slab, &pts)?;
            t * est.value / (PI * PI)
        }
        m => {
            return Err(Error::Dimension {
                operation: "Poisson extension of a patch",
                n: m,
            })
        }
    };
    Ok(p.density * value.max(0.0))
}

/// `u(x, t) = int K(x - xi, t) dmu(xi)`.
pub fn extend(mu: &BoundaryMeasure, p: &HalfSpacePoint) -> Result<f64> {
    extend_with(mu, p, &Quadrature::default())
}

pub fn extend_with(mu: &BoundaryMeasure, p: &HalfSpacePoint, quad: &Quadrature) -> Result<f64> {
    let n = mu.dim();
    if p.x.len() != n.boundary() {
        return Err(Error::InvalidInput(format!("point needs {} boundary coordinates", n.boundary())));
    }
    let kappa = kappa_n(n);
    let h = 0.5 * n.as_f64();
    let t = p.t;
    let mut u = 0.0;
    for a in mu.atoms() {
        let r2: f64 = a.location.iter().zip(&p.x).map(|(u, v)| (u - v).powi(2)).sum();
        u += a.mass * kappa * t / (r2 + t * t).powf(h);
    }
    let dist = norm(&p.x);
    if dist > 0.0 && !mu.radials().is_empty() && n.get() > 4 {
        return Err(Error::Dimension {
            operation: "off-axis Poisson extension of a radial density",
            n: n.get(),
        });
    }
    for comp in mu.radials() {
        u += radial_extend(comp, n, dist, t, quad)?;
    }
    for patch in mu.patches() {
        u += patch_extend(patch, &p.x, t, n, quad)?;
    }
    Ok(u)
}

/// `u(0, t)` from the kernel integrated against the density.
pub fn normal_trace_direct(mu: &BoundaryMeasure, t: f64) -> Result<f64> {
    extend(mu, &HalfSpacePoint::on_axis(mu.dim(), t)?)
}

/// Weight `n c r t / (r^2 + t^2)^{n/2+1}` of the integrated-by-parts trace.
struct TraceWeight {
    nc: f64,
    h: f64,
    t: f64,
}

impl TraceWeight {
    fn new(n: Dimension, t: f64) -> Self {
        TraceWeight {
            nc: n.as_f64() * kappa_n(n),
            h: 0.5 * n.as_f64() + 1.0,
            t,
        }
    }

    fn at(&self, r: f64) -> f64 {
        self.nc * r * self.t / (r * r + self.t * self.t).powf(self.h)
    }

    // weight / r
    fn head(&self, r: f64) -> f64 {
        self.nc * self.t / (r * r + self.t * self.t).powf(self.h)
    }

    // weight * r^{n+1}
    fn tail(&self, r: f64) -> f64 {
        self.nc * self.t / (1.0 + (self.t / r).powi(2)).powf(self.h)
    }
}

// int_lo^inf weight * mass
fn constant_tail(w: &TraceWeight, n: Dimension, lo: f64, mass: f64, quad: &Quadrature) -> Result<f64> {
    let head = |r: f64| mass * w.head(r);
    let body = |r: f64| mass * w.at(r);
    let tail = |r: f64| mass * w.tail(r);
    let parts = HalfLine {
        head_power: 2.0,
        head: &head,
        body: &body,
        tail_power: n.as_f64(),
        tail: &tail,
    };
    Ok(quad.half_line(lo, f64::INFINITY, &[w.t], &parts)?.value)
}

fn radial_convolution(comp: &RadialPower, n: Dimension, w: &TraceWeight, quad: &Quadrature) -> Result<f64> {
    let d = n.boundary();
    let p = comp.q + d as f64;
    let scale = comp.coeff * sphere_area(d as u32 - 1);
    let cum = |r: f64| comp.cumulative(d, r);
    let head = |r: f64| w.head(r) * scale / p;
    let body = |r: f64| w.at(r) * cum(r);
    let (tail_power, tail): (f64, Box<dyn Fn(f64) -> f64 + '_>) = if p > 0.0 {
        let r0 = comp.r0;
        (
            n.as_f64() - p,
            Box::new(move |r: f64| w.tail(r) * scale * (1.0 - (r0 / r).powf(p)) / p),
        )
    } else {
        (n.as_f64(), Box::new(move |r: f64| w.tail(r) * cum(r)))
    };
    let parts = HalfLine {
        head_power: p + 2.0,
        head: &head,
        body: &body,
        tail_power,
        tail: &*tail,
    };
    let mut v = quad.half_line(comp.r0, comp.r1, &[w.t], &parts)?.value;
    if comp.r1.is_finite() {
        v += constant_tail(w, n, comp.r1, comp.cumulative(d, comp.r1), quad)?;
    }
    Ok(v)
}

fn patch_convolution(p: &Patch, n: Dimension, w: &TraceWeight, quad: &Quadrature) -> Result<f64> {
    if p.density == 0.0 {
        return Ok(0.0);
    }
    let d = n.boundary();
    if d > 3 {
        return Err(Error::Dimension {
            operation: "cumulative profile of a patch",
            n: n.get(),
        });
    }
    let origin = vec![0.0; d];
    let (near, far) = box_distance_range(&p.lo, &p.hi, &origin);
    let cum = |r: f64| p.density * box_ball_volume(&p.lo, &p.hi, &origin, r, quad).unwrap_or(f64::NAN);
    let head = |r: f64| w.head(r) * cum(r) / r.powi(d as i32);
    let body = |r: f64| w.at(r) * cum(r);
    let unused = |_: f64| 0.0;
    let parts = HalfLine {
        head_power: d as f64 + 2.0,
        head: &head,
        body: &body,
        tail_power: n.as_f64(),
        tail: &unused,
    };
    let mut knots = box_kink_radii(&p.lo, &p.hi, &origin);
    knots.push(w.t);
    let mut v = quad.half_line(near, far, &knots, &parts)?.value;
    v += constant_tail(w, n, far, p.density * p.volume(), quad)?;
    Ok(v)
}

/// `u(0, t) = int_0^inf n c r t / (r^2 + t^2)^{n/2+1} mu(B_r(O)) dr`.
pub fn normal_trace_convolution(mu: &BoundaryMeasure, t: f64) -> Result<f64> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::domain("height t", t, "t > 0"));
    }
    let quad = Quadrature::default();
    let n = mu.dim();
    let w = TraceWeight::new(n, t);
    let mut u = 0.0;
    for a in mu.atoms() {
        u += constant_tail(&w, n, norm(&a.location), a.mass, &quad)?;
    }
    for comp in mu.radials() {
        u += radial_convolution(comp, n, &w, &quad)?;
    }
    for p in mu.patches() {
        u += patch_convolution(p, n, &w, &quad)?;
    }
    Ok(u)
}

/// `K_1 = c (2^{-n/2} - 5^{-n/2})`, the constant in `u(0, t) >= K_1 M(t)`.
pub fn lower_bound_constant(n: Dimension) -> f64 {
    let h = 0.5 * n.as_f64();
    kappa_n(n) * (2f64.powf(-h) - 5f64.powf(-h))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LowerBound {
    pub u: f64,
    pub bound: f64,
    pub constant: f64,
    pub ok: bool,
}

/// Compares `u(0, t)` with the part of the trace integral over `[t, 2t]`,
/// which is at least `K_1 M(t)`.
pub fn lower_bound_check(mu: &BoundaryMeasure, t: f64) -> Result<LowerBound> {
    let n = mu.dim();
    let u = normal_trace_direct(mu, t)?;
    let constant = lower_bound_constant(n);
    let m = ball_mass(mu, &vec![0.0; n.boundary()], t)? / t.powi(n.boundary() as i32);
    let bound = constant * m;
    Ok(LowerBound {
        u,
        bound,
        constant,
        ok: u >= bound,
    })
}

/// Points `(base + aperture t e, t)` for decreasing heights `t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApproachPath {
    pub base: Vec<f64>,
    pub aperture: f64,
    pub direction: Vec<f64>,
    pub heights: Vec<f64>,
}

impl ApproachPath {
    pub fn new(base: Vec<f64>, aperture: f64, direction: Vec<f64>, heights: Vec<f64>) -> Result<Self> {
        if !(aperture >= 0.0 && aperture.is_finite()) {
            return Err(Error::domain("aperture", aperture, "aperture >= 0"));
        }
        let len = norm(&direction);
        if direction.len() != base.len() || !(len > 0.0) {
            return Err(Error::InvalidInput("direction must be a nonzero boundary vector".into()));
        }
        Ok(ApproachPath {
            base,
            aperture,
            direction: direction.iter().map(|v| v / len).collect(),
            heights,
        })
    }

    /// The normal path `(O, t)`.
    pub fn normal(n: Dimension, heights: Vec<f64>) -> Self {
        let d = n.boundary();
        let mut e = vec![0.0; d];
        e[0] = 1.0;
        ApproachPath {
            base: vec![0.0; d],
            aperture: 0.0,
            direction: e,
            heights,
        }
    }

    pub fn point(&self, t: f64) -> Result<HalfSpacePoint> {
        let x = self
            .base
            .iter()
            .zip(&self.direction)
            .map(|(b, e)| b + self.aperture * t * e)
            .collect();
        HalfSpacePoint::new(x, t)
    }
}

/// Samples `u` along an approach path.
pub fn nt_values(mu: &BoundaryMeasure, path: &ApproachPath) -> Result<ConvergenceReport> {
    if path.base.len() != mu.dim().boundary() {
        return Err(Error::InvalidInput("path lives in a different dimension".into()));
    }
    ConvergenceReport::from_fn(&path.heights, LimitRule::default(), |t| extend(mu, &path.point(t)?))
}

/// Closed-form `u(0, t) t^{n-1}` of an atom of mass `m` at `O`: `m kappa_n`.
pub fn atom_trace_scaled(n: Dimension, m: f64) -> f64 {
    m * kappa_n(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::power_law_measure;
    use approx::assert_relative_eq;

    fn dim(n: u32) -> Dimension {
        Dimension::new(n).unwrap()
    }

    #[test]
    fn kernel_values() {
        assert_relative_eq!(poisson_kernel(&[0.0, 0.0], 1.0, dim(3)), 1.0 / (2.0 * PI), max_relative = 1e-14);
        let x = [0.3, -0.7, 0.2];
        let t = 0.4;
        let scaled: Vec<f64> = x.iter().map(|v| v / t).collect();
        assert_relative_eq!(
            poisson_kernel(&x, t, dim(4)),
            t.powi(-3) * poisson_kernel(&scaled, 1.0, dim(4)),
            max_relative = 1e-14
        );
    }

    #[test]
    fn kernel_integrates_to_one() {
        for n in 2..=6 {
            for t in [0.1, 1.0, 10.0] {
                assert!((kernel_mass(t, dim(n)).unwrap() - 1.0).abs() < 1e-10, "n={n} t={t}");
            }
        }
    }

    #[test]
    fn lebesgue_extends_to_one() {
        for n in 2..=4 {
            let mu = BoundaryMeasure::lebesgue(dim(n), 1.0).unwrap();
            let d = dim(n).boundary();
            for (x0, t) in [(0.0, 0.3), (0.7, 0.01), (-2.0, 5.0)] {
                let mut x = vec![0.0; d];
                x[0] = x0;
                let u = extend(&mu, &HalfSpacePoint::new(x, t).unwrap()).unwrap();
                assert!((u - 1.0).abs() < 1e-9, "n={n} x0={x0} t={t} u={u}");
            }
        }
        let mu = BoundaryMeasure::lebesgue(dim(7), 1.0).unwrap();
        assert!((normal_trace_direct(&mu, 0.2).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn atom_extension_is_the_kernel() {
        let mu = BoundaryMeasure::atom(dim(3), vec![0.2, -0.1], 2.0).unwrap();
        let p = HalfSpacePoint::new(vec![0.5, 0.5], 0.3).unwrap();
        assert_eq!(extend(&mu, &p).unwrap(), 2.0 * poisson_kernel(&[-0.3, -0.6], 0.3, dim(3)));
    }

    #[test]
    fn whole_plane_patch_matches_lebesgue() {
        for n in 2..=4 {
            let big = BoundaryMeasure::uniform_patch(dim(n), 1e7, 1.0).unwrap();
            let d = dim(n).boundary();
            let mut x = vec![0.1; d];
            x[0] = -0.4;
            let u = extend(&big, &HalfSpacePoint::new(x, 0.05).unwrap()).unwrap();
            assert!((u - 1.0).abs() < 1e-6, "n={n} u={u}");
        }
    }

    #[test]
    fn trace_forms_agree() {
        let n = dim(3);
        let mu = power_law_measure(0.5, 1.0, n, 1.0)
            .unwrap()
            .combine(&BoundaryMeasure::atom(n, vec![0.05, 0.0], 0.3).unwrap())
            .unwrap();
        for t in [1e-4, 1e-2, 0.5] {
            let a = normal_trace_direct(&mu, t).unwrap();
            let b = normal_trace_convolution(&mu, t).unwrap();
            assert_relative_eq!(a, b, max_relative = 1e-9);
        }
        let p = BoundaryMeasure::patch(n, vec![-0.2, -0.1], vec![0.3, 0.4], 1.5).unwrap();
        let a = normal_trace_direct(&p, 0.05).unwrap();
        let b = normal_trace_convolution(&p, 0.05).unwrap();
        assert_relative_eq!(a, b, max_relative = 1e-9);
    }

    #[test]
    fn atom_trace_closed_form() {
        for n in 2..=6 {
            let mu = BoundaryMeasure::atom_at_origin(dim(n), 1.5).unwrap();
            let t = 0.1;
            let direct = normal_trace_direct(&mu, t).unwrap();
            assert_relative_eq!(direct, 1.5 * kappa_n(dim(n)) * t.powi(1 - n as i32), max_relative = 1e-14);
            let conv = normal_trace_convolution(&mu, t).unwrap();
            assert_relative_eq!(conv, direct, max_relative = 1e-10);
        }
    }

    #[test]
    fn off_axis_radial_against_brute_force() {
        let mu = power_law_measure(0.5, 1.0, dim(3), 1.0).unwrap();
        let c = mu.radials()[0].coeff;
        let (x0, t) = (0.3, 0.2);
        let u = extend(&mu, &HalfSpacePoint::new(vec![x0, 0.0], t).unwrap()).unwrap();
        let q = Quadrature::default().with_rel_tol(1e-11);
        let kappa = 1.0 / (2.0 * PI);
        let outer = q
            .power_head(1.5, 1.0, |r| {
                q.integrate(
                    |phi: f64| {
                        let d2 = r * r + x0 * x0 - 2.0 * r * x0 * phi.cos();
                        c * kappa * t / (d2 + t * t).powf(1.5)
                    },
                    0.0,
                    2.0 * PI,
                )
                .unwrap()
                .value
            })
            .unwrap();
        assert_relative_eq!(u, outer.value, max_relative = 1e-9);
    }

    #[test]
    fn lower_bound_holds() {
        let mu = BoundaryMeasure::atom_at_origin(dim(3), 1.0).unwrap();
        let lb = lower_bound_check(&mu, 0.1).unwrap();
        assert_relative_eq!(lb.u, 100.0 / (2.0 * PI), max_relative = 1e-13);
        assert!(lb.ok && lb.bound <= lb.u);
        let z = lower_bound_check(&BoundaryMeasure::empty(dim(3)), 0.1).unwrap();
        assert!(z.ok && z.bound == 0.0);
    }
}
