//! Globally adaptive Gauss-Kronrod (G10/K21) quadrature with the change of
//! variables used by the trace and transform integrals.
//!
//! The error estimate follows the QUADPACK rescaling. Subdivision always
//! bisects the interval with the largest error estimate; an interval at
//! `max_depth` is frozen, and if the total error is still above tolerance when
//! nothing is left to split the integrator returns [`Error::Quadrature`].

use std::collections::BinaryHeap;
use std::cmp::Ordering;

use crate::error::{Error, Result};

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.000_000_000_000_000_000_000_000_000_000_000,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

impl Estimate {
    fn scaled(self, factor: f64) -> Self {
        Estimate {
            value: self.value * factor,
            error: self.error * factor.abs(),
        }
    }
}

impl std::ops::Add for Estimate {
    type Output = Estimate;

    fn add(self, rhs: Estimate) -> Estimate {
        Estimate {
            value: self.value + rhs.value,
            error: self.error + rhs.error,
        }
    }
}

/// Adaptive integrator configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_depth: u32,
    pub max_intervals: usize,
}

impl Default for Quadrature {
    fn default() -> Self {
        Quadrature {
            abs_tol: 1e-14,
            rel_tol: 1e-10,
            max_depth: 60,
            max_intervals: 20_000,
        }
    }
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    depth: u32,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / res_asc).powf(1.5);
        scaled = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        scaled = scaled.max(50.0 * f64::EPSILON * res_abs);
    }
    scaled
}

fn gk21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<(f64, f64)> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let eval = |x: f64| -> Result<f64> {
        let v = f(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite(x))
        }
    };
    let fc = eval(center)?;
    let mut res_k = fc * WGK[10];
    let mut res_g = 0.0;
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = eval(center - dx)?;
        let f2 = eval(center + dx)?;
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let err = (res_k - res_g) * half;
    let h = half.abs();
    Ok((res_k * half, rescale_error(err, res_abs * h, res_asc * h)))
}

impl Quadrature {
    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_abs_tol(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }

    fn tolerance(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }

    /// `int_a^b f`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> Result<Estimate> {
        self.integrate_pieces(f, &[a, b])
    }

    /// Integrates over `[points[0], points[last]]` with the interior points as
    /// initial subdivision boundaries. Points outside the range and duplicates are
    /// ignored; the range endpoints are the min and max of `points`.
    pub fn integrate_pieces<F: Fn(f64) -> f64>(&self, f: F, points: &[f64]) -> Result<Estimate> {
        let mut pts: Vec<f64> = points.iter().copied().filter(|p| p.is_finite()).collect();
        if pts.len() < 2 {
            return Err(Error::InvalidInput("quadrature needs a finite range".into()));
        }
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        if pts.len() < 2 {
            return Ok(Estimate { value: 0.0, error: 0.0 });
        }
        let mut heap = BinaryHeap::new();
        let mut frozen: Vec<Segment> = Vec::new();
        for w in pts.windows(2) {
            let (value, error) = gk21(&f, w[0], w[1])?;
            heap.push(Segment {
                a: w[0],
                b: w[1],
                value,
                error,
                depth: 0,
            });
        }
        loop {
            let (value, error) = heap
                .iter()
                .chain(frozen.iter())
                .fold((0.0, 0.0), |(v, e), s| (v + s.value, e + s.error));
            let tol = self.tolerance(value);
            if error <= tol {
                return Ok(Estimate { value, error });
            }
            let seg = match heap.pop() {
                Some(s) => s,
                None => {
                    return Err(Error::Quadrature {
                        value,
                        error,
                        tolerance: tol,
                    })
                }
            };
            let mid = 0.5 * (seg.a + seg.b);
            if seg.depth >= self.max_depth || !(seg.a < mid && mid < seg.b) {
                frozen.push(seg);
                continue;
            }
            if heap.len() + frozen.len() + 2 > self.max_intervals {
                return Err(Error::Quadrature {
                    value,
                    error,
                    tolerance: tol,
                });
            }
            let (v1, e1) = gk21(&f, seg.a, mid)?;
            let (v2, e2) = gk21(&f, mid, seg.b)?;
            heap.push(Segment {
                a: seg.a,
                b: mid,
                value: v1,
                error: e1,
                depth: seg.depth + 1,
            });
            heap.push(Segment {
                a: mid,
                b: seg.b,
                value: v2,
                error: e2,
                depth: seg.depth + 1,
            });
        }
    }

    /// `int_0^rho r^(p-1) f(r) dr` for `p > 0` and bounded `f`, through
    /// `r = rho w^(1/p)` which removes the algebraic endpoint behavior.
    pub fn power_head<F: Fn(f64) -> f64>(&self, p: f64, rho: f64, f: F) -> Result<Estimate> {
        if !(p > 0.0) {
            return Err(Error::domain("power_head exponent", p, "p > 0"));
        }
        if rho <= 0.0 {
            return Ok(Estimate { value: 0.0, error: 0.0 });
        }
        let inv = 1.0 / p;
        let est = self.integrate(|w| f(rho * w.powf(inv)), 0.0, 1.0)?;
        Ok(est.scaled(rho.powf(p) / p))
    }

    /// `int_rho^inf r^(-p-1) f(r) dr` for `p > 0` and bounded `f`, through
    /// `r = rho w^(-1/p)`.
    pub fn power_tail<F: Fn(f64) -> f64>(&self, p: f64, rho: f64, f: F) -> Result<Estimate> {
        if !(p > 0.0) {
            return Err(Error::domain("power_tail exponent", p, "p > 0"));
        }
        if !(rho > 0.0) {
            return Err(Error::domain("power_tail start", rho, "rho > 0"));
        }
        let inv = 1.0 / p;
        let est = self.integrate(
            |w| {
                if w <= 0.0 {
                    0.0
                } else {
                    f(rho * w.powf(-inv))
                }
            },
            0.0,
            1.0,
        )?;
        Ok(est.scaled(rho.powf(-p) / p))
    }

    /// `int_a^b g(r) dr` computed in the variable `x = ln r`, for `0 < a < b < inf`.
    /// `breaks` are given in the original variable.
    pub fn log_variable<F: Fn(f64) -> f64>(&self, g: F, a: f64, b: f64, breaks: &[f64]) -> Result<Estimate> {
        if !(a > 0.0 && b.is_finite()) {
            return Err(Error::InvalidInput(format!("log-variable range [{a}, {b}]")));
        }
        if b <= a {
            return Ok(Estimate { value: 0.0, error: 0.0 });
        }
        let mut pts = vec![a.ln(), b.ln()];
        pts.extend(breaks.iter().filter(|&&r| r > a && r < b).map(|r| r.ln()));
        self.integrate_pieces(
            |x| {
                let r = x.exp();
                g(r) * r
            },
            &pts,
        )
    }

    /// `int_a^inf f(x) dx` via `x = a + (1 - u)/u`; `f` must decay integrably.
    pub fn to_infinity<F: Fn(f64) -> f64>(&self, f: F, a: f64) -> Result<Estimate> {
        self.integrate(
            |u| {
                if u <= 0.0 {
                    0.0
                } else {
                    let x = a + (1.0 - u) / u;
                    f(x) / (u * u)
                }
            },
            0.0,
            1.0,
        )
    }

    /// `int_-inf^b f(x) dx`.
    pub fn from_neg_infinity<F: Fn(f64) -> f64>(&self, f: F, b: f64) -> Result<Estimate> {
        self.to_infinity(|y| f(2.0 * b - y), b)
    }

    /// Integral over the real line split at the sorted finite `breaks` (at least one).
    pub fn real_line<F: Fn(f64) -> f64>(&self, f: F, breaks: &[f64]) -> Result<Estimate> {
        let mut pts: Vec<f64> = breaks.iter().copied().filter(|b| b.is_finite()).collect();
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        let (first, last) = match (pts.first(), pts.last()) {
            (Some(&f0), Some(&l0)) => (f0, l0),
            _ => (0.0, 0.0),
        };
        let mut total = self.from_neg_infinity(&f, first)?;
        if pts.len() >= 2 {
            total = total + self.integrate_pieces(&f, &pts)?;
        }
        Ok(total + self.to_infinity(&f, last)?)
    }
}

/// An integrand on `(lo, hi) ⊂ (0, inf)` given in three forms: near zero as
/// `r^(head_power - 1) head(r)`, near infinity as `r^(-tail_power - 1) tail(r)`,
/// and in between as `body(r)`. `head` and `tail` must stay bounded at their ends.
pub struct HalfLine<'a> {
    pub head_power: f64,
    pub head: &'a dyn Fn(f64) -> f64,
    pub body: &'a dyn Fn(f64) -> f64,
    pub tail_power: f64,
    pub tail: &'a dyn Fn(f64) -> f64,
}

impl Quadrature {
    /// `int_lo^hi` of a [`HalfLine`] integrand. The head form is used on
    /// `[0, first knot]` when `lo = 0`, the tail form beyond the last knot when
    /// `hi = inf`, and the body in the log variable across the remaining knots.
    pub fn half_line(&self, lo: f64, hi: f64, knots: &[f64], parts: &HalfLine<'_>) -> Result<Estimate> {
        if !(lo >= 0.0) || !(hi > lo) {
            return Ok(Estimate { value: 0.0, error: 0.0 });
        }
        let mut pts: Vec<f64> = knots
            .iter()
            .copied()
            .filter(|k| k.is_finite() && *k > lo && *k < hi)
            .collect();
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        let mut total = Estimate { value: 0.0, error: 0.0 };
        let mut a = lo;
        if lo == 0.0 {
            let h = if !pts.is_empty() {
                pts.remove(0)
            } else if hi.is_finite() {
                hi
            } else {
                return Err(Error::InvalidInput("half-line integral over (0, inf) needs a knot".into()));
            };
            total = total + self.power_head(parts.head_power, h, parts.head)?;
            a = h;
        }
        let mut b = hi;
        if hi.is_infinite() {
            let start = pts.pop().unwrap_or(a);
            total = total + self.power_tail(parts.tail_power, start, parts.tail)?;
            b = start;
        }
        if b > a {
            total = total + self.log_variable(parts.body, a, b, &pts)?;
        }
        Ok(total)
    }
}

/// Log-spaced grid from `a` to `b` inclusive with `count` points.
pub fn log_grid(a: f64, b: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![a],
        _ => {
            let (la, lb) = (a.ln(), b.ln());
            (0..count)
                .map(|i| (la + (lb - la) * i as f64 / (count - 1) as f64).exp())
                .collect()
        }
    }
}

/// Linearly spaced grid from `a` to `b` inclusive with `count` points.
pub fn linear_grid(a: f64, b: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..count)
            .map(|i| a + (b - a) * i as f64 / (count - 1) as f64)
            .collect(),
    }
}
