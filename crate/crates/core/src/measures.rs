//! Boundary measures on `R^{n-1}`: atoms, radial power densities centered at the
//! origin `O`, and constant-density boxes.
//!
//! Balls are closed: `mu(B_r(c))` counts mass at distance exactly `r`, so the
//! cumulative profile is right-continuous.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{box_ball_volume, box_distance_range, box_kink_radii, distance, norm, shell_fraction};
use crate::halfspace::HalfSpacePoint;
use crate::quad::Quadrature;
use crate::report::{ls_fit_geometric, ConvergenceReport, LimitRule};
use crate::specfun::{sphere_area, unit_ball_volume, Dimension};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    #[serde(rename = "xi")]
    pub location: Vec<f64>,
    pub mass: f64,
}

/// Density `coeff * |xi|^q` on the annulus `r0 <= |xi| <= r1` (`r1` may be infinite).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialPower {
    pub coeff: f64,
    pub q: f64,
    pub r0: f64,
    #[serde(with = "inf_or_number")]
    pub r1: f64,
}

/// Constant density on the box `[lo, hi]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Patch {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub density: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMeasure", into = "RawMeasure")]
pub struct BoundaryMeasure {
    n: Dimension,
    atoms: Vec<Atom>,
    radials: Vec<RadialPower>,
    patches: Vec<Patch>,
}

#[derive(Serialize, Deserialize)]
struct RawMeasure {
    n: u32,
    #[serde(default)]
    atoms: Vec<Atom>,
    #[serde(default)]
    radials: Vec<RadialPower>,
    #[serde(default)]
    patches: Vec<Patch>,
}

impl TryFrom<RawMeasure> for BoundaryMeasure {
    type Error = Error;

    fn try_from(raw: RawMeasure) -> Result<Self> {
        BoundaryMeasure::new(Dimension::new(raw.n)?, raw.atoms, raw.radials, raw.patches)
    }
}

impl From<BoundaryMeasure> for RawMeasure {
    fn from(m: BoundaryMeasure) -> Self {
        RawMeasure {
            n: m.n.get(),
            atoms: m.atoms,
            radials: m.radials,
            patches: m.patches,
        }
    }
}

mod inf_or_number {
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(*v)
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum NumOrText {
        Num(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match NumOrText::deserialize(d)? {
            NumOrText::Num(v) => Ok(v),
            NumOrText::Text(s) if matches!(s.as_str(), "inf" | "+inf" | "infinity" | "Infinity") => Ok(f64::INFINITY),
            NumOrText::Text(s) => Err(de::Error::custom(format!("expected a number or \"inf\", got {s:?}"))),
        }
    }
}

impl RadialPower {
    fn validate(&self, d: usize) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidMeasure(msg));
        if !(self.coeff > 0.0 && self.coeff.is_finite()) {
            return bad(format!("radial coeff must be positive, got {}", self.coeff));
        }
        if !self.q.is_finite() || !(self.r0 >= 0.0 && self.r0.is_finite()) || !(self.r1 > self.r0) {
            return bad(format!("radial needs finite q and 0 <= r0 < r1, got q={} r0={} r1={}", self.q, self.r0, self.r1));
        }
        if self.r0 == 0.0 && self.q <= -(d as f64) {
            return bad(format!("radial exponent q={} is not integrable at the origin in R^{d}", self.q));
        }
        if self.r1.is_infinite() && self.q >= 1.0 {
            return bad(format!("unbounded radial with q={} violates the Poisson integrability condition", self.q));
        }
        Ok(())
    }

    fn power(&self, d: usize) -> f64 {
        self.q + d as f64
    }

    /// `int_{r0 <= |xi| <= min(r, r1)} coeff |xi|^q dxi`.
    pub fn cumulative(&self, d: usize, r: f64) -> f64 {
        if r <= self.r0 {
            return 0.0;
        }
        let top = r.min(self.r1);
        let scale = self.coeff * sphere_area(d as u32 - 1);
        let p = self.power(d);
        if p.abs() < 1e-12 {
            return scale * (top / self.r0).ln();
        }
        let base = if self.r0 == 0.0 { 0.0 } else { self.r0.powf(p) };
        scale * (top.powf(p) - base) / p
    }

    pub fn density_at(&self, r: f64) -> f64 {
        if r >= self.r0 && r <= self.r1 && r > 0.0 {
            self.coeff * r.powf(self.q)
        } else {
            0.0
        }
    }

    fn ball_mass_off_center(&self, d: usize, dist: f64, rho: f64, quad: &Quadrature) -> Result<f64> {
        if d > 3 {
            return Err(Error::UnsupportedCenter);
        }
        let full = if rho > dist { self.cumulative(d, rho - dist) } else { 0.0 };
        let lo = self.r0.max((dist - rho).abs());
        let hi = self.r1.min(dist + rho);
        if hi <= lo {
            return Ok(full);
        }
        let scale = self.coeff * sphere_area(d as u32 - 1);
        let p = self.power(d);
        let reduced = |r: f64| shell_fraction(d, r, dist, rho).unwrap_or(0.0);
        let band = if lo == 0.0 {
            quad.power_head(p, hi, reduced)?
        } else {
            quad.log_variable(|r| r.powf(p - 1.0) * reduced(r), lo, hi, &[])?
        };
        Ok(full + scale * band.value)
    }
}

impl Patch {
    fn validate(&self, d: usize) -> Result<()> {
        if self.lo.len() != d || self.hi.len() != d {
            return Err(Error::InvalidMeasure(format!("patch corners must have {d} coordinates")));
        }
        if self.lo.iter().chain(&self.hi).any(|v| !v.is_finite()) || self.lo.iter().zip(&self.hi).any(|(a, b)| !(a < b)) {
            return Err(Error::InvalidMeasure("patch needs finite corners with lo < hi".into()));
        }
        if !(self.density >= 0.0 && self.density.is_finite()) {
            return Err(Error::InvalidMeasure(format!("patch density must be nonnegative, got {}", self.density)));
        }
        Ok(())
    }

    pub fn volume(&self) -> f64 {
        self.lo.iter().zip(&self.hi).map(|(a, b)| b - a).product()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter().zip(self.lo.iter().zip(&self.hi)).all(|(v, (a, b))| *a <= *v && *v <= *b)
    }

    fn ball_mass(&self, center: &[f64], r: f64, quad: &Quadrature) -> Result<f64> {
        if self.density == 0.0 {
            return Ok(0.0);
        }
        let (near, far) = box_distance_range(&self.lo, &self.hi, center);
        if r < near {
            return Ok(0.0);
        }
        if r >= far {
            return Ok(self.density * self.volume());
        }
        Ok(self.density * box_ball_volume(&self.lo, &self.hi, center, r, quad)?)
    }
}

impl BoundaryMeasure {
    pub fn new(n: Dimension, atoms: Vec<Atom>, radials: Vec<RadialPower>, patches: Vec<Patch>) -> Result<Self> {
        let d = n.boundary();
        for a in &atoms {
            if a.location.len() != d || a.location.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidMeasure(format!("atom location must be a finite point of R^{d}")));
            }
            if !(a.mass > 0.0 && a.mass.is_finite()) {
                return Err(Error::InvalidMeasure(format!("atom mass must be positive, got {}", a.mass)));
            }
        }
        for r in &radials {
            r.validate(d)?;
        }
        for p in &patches {
            p.validate(d)?;
        }
        Ok(BoundaryMeasure {
            n,
            atoms,
            radials,
            patches,
        })
    }

    pub fn empty(n: Dimension) -> Self {
        BoundaryMeasure {
            n,
            atoms: Vec::new(),
            radials: Vec::new(),
            patches: Vec::new(),
        }
    }

    pub fn atom(n: Dimension, location: Vec<f64>, mass: f64) -> Result<Self> {
        Self::new(n, vec![Atom { location, mass }], Vec::new(), Vec::new())
    }

    pub fn atom_at_origin(n: Dimension, mass: f64) -> Result<Self> {
        Self::atom(n, vec![0.0; n.boundary()], mass)
    }

    /// `density` times Lebesgue measure on the whole hyperplane.
    pub fn lebesgue(n: Dimension, density: f64) -> Result<Self> {
        Self::new(
            n,
            Vec::new(),
            vec![RadialPower {
                coeff: density,
                q: 0.0,
                r0: 0.0,
                r1: f64::INFINITY,
            }],
            Vec::new(),
        )
    }

    pub fn patch(n: Dimension, lo: Vec<f64>, hi: Vec<f64>, density: f64) -> Result<Self> {
        Self::new(n, Vec::new(), Vec::new(), vec![Patch { lo, hi, density }])
    }

    /// Constant density on the cube `[-h, h]^{n-1}`.
    pub fn uniform_patch(n: Dimension, half_width: f64, density: f64) -> Result<Self> {
        let d = n.boundary();
        Self::patch(n, vec![-half_width; d], vec![half_width; d], density)
    }

    /// Sum of two measures on the same hyperplane.
    pub fn combine(&self, other: &BoundaryMeasure) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::InvalidMeasure(format!("cannot add measures in dimensions {} and {}", self.n, other.n)));
        }
        let mut out = self.clone();
        out.atoms.extend(other.atoms.iter().cloned());
        out.radials.extend(other.radials.iter().copied());
        out.patches.extend(other.patches.iter().cloned());
        Ok(out)
    }

    pub fn dim(&self) -> Dimension {
        self.n
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn radials(&self) -> &[RadialPower] {
        &self.radials
    }

    pub fn patches(&self) -> &[Patch] {
        &self.patches
    }

    pub fn is_zero(&self) -> bool {
        self.atoms.is_empty() && self.radials.is_empty() && self.patches.iter().all(|p| p.density == 0.0)
    }

    /// Radii where `r -> mu(B_r(O))` jumps or has a kink.
    pub fn kink_radii(&self) -> Vec<f64> {
        let origin = vec![0.0; self.n.boundary()];
        let mut out: Vec<f64> = self.atoms.iter().map(|a| norm(&a.location)).collect();
        for r in &self.radials {
            out.push(r.r0);
            out.push(r.r1);
        }
        for p in &self.patches {
            let (near, far) = box_distance_range(&p.lo, &p.hi, &origin);
            out.push(near);
            out.push(far);
            out.extend(box_kink_radii(&p.lo, &p.hi, &origin));
        }
        out.retain(|r| r.is_finite() && *r > 0.0);
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }
}

impl fmt::Display for BoundaryMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "measure on R^{} ({} atoms, {} radial, {} patches)",
            self.n.boundary(),
            self.atoms.len(),
            self.radials.len(),
            self.patches.len()
        )
    }
}

/// `mu(B_r(center))` for the closed ball.
pub fn ball_mass(mu: &BoundaryMeasure, center: &[f64], r: f64) -> Result<f64> {
    ball_mass_with(mu, center, r, &Quadrature::default())
}

pub fn ball_mass_with(mu: &BoundaryMeasure, center: &[f64], r: f64, quad: &Quadrature) -> Result<f64> {
    let d = mu.n.boundary();
    if center.len() != d {
        return Err(Error::InvalidInput(format!("ball center must have {d} coordinates")));
    }
    if !(r > 0.0) {
        return Err(Error::domain("ball radius", r, "r > 0"));
    }
    let dist = norm(center);
    let mut total: f64 = mu
        .atoms
        .iter()
        .filter(|a| distance(&a.location, center) <= r)
        .map(|a| a.mass)
        .sum();
    for comp in &mu.radials {
        total += if dist == 0.0 {
            comp.cumulative(d, r)
        } else {
            comp.ball_mass_off_center(d, dist, r, quad)?
        };
    }
    for p in &mu.patches {
        total += p.ball_mass(center, r, quad)?;
    }
    Ok(total)
}

/// Radial power law with `mu(B_r(O)) = b r^{n-1-alpha}` for `r <= R`.
pub fn power_law_measure(alpha: f64, b: f64, n: Dimension, r_max: f64) -> Result<BoundaryMeasure> {
    let top = n.as_f64() - 1.0;
    if !(alpha > -1.0 && alpha < top) {
        return Err(Error::domain("alpha", alpha, format!("(-1, {top}); use an atom at O for alpha = n - 1")));
    }
    if !(b > 0.0 && b.is_finite()) {
        return Err(Error::domain("b", b, "b > 0"));
    }
    if !(r_max > 0.0) {
        return Err(Error::domain("support radius R", r_max, "R > 0"));
    }
    let coeff = b * (top - alpha) / sphere_area(n.get() - 2);
    BoundaryMeasure::new(
        n,
        Vec::new(),
        vec![RadialPower {
            coeff,
            q: -alpha,
            r0: 0.0,
            r1: r_max,
        }],
        Vec::new(),
    )
}

/// `M(r) = mu(B_r(O)) / r^{n-1}`.
pub fn m_profile(mu: &BoundaryMeasure, r: f64) -> Result<f64> {
    let d = mu.n.boundary();
    Ok(ball_mass(mu, &vec![0.0; d], r)? / r.powi(d as i32))
}

/// The dilation `mu_r(E) = mu(rE) r^{-(n-1)}`.
pub fn dilate(mu: &BoundaryMeasure, r: f64) -> Result<BoundaryMeasure> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::domain("dilation factor", r, "r > 0"));
    }
    let d = mu.n.boundary();
    let scale = r.powi(-(d as i32));
    Ok(BoundaryMeasure {
        n: mu.n,
        atoms: mu
            .atoms
            .iter()
            .map(|a| Atom {
                location: a.location.iter().map(|v| v / r).collect(),
                mass: a.mass * scale,
            })
            .collect(),
        radials: mu
            .radials
            .iter()
            .map(|c| RadialPower {
                coeff: c.coeff * r.powf(c.q),
                q: c.q,
                r0: c.r0 / r,
                r1: c.r1 / r,
            })
            .collect(),
        patches: mu
            .patches
            .iter()
            .map(|p| Patch {
                lo: p.lo.iter().map(|v| v / r).collect(),
                hi: p.hi.iter().map(|v| v / r).collect(),
                density: p.density,
            })
            .collect(),
    })
}

/// Samples `mu(B_r(O)) / (omega_{n-1} r^{n-1})` on a decreasing grid.
pub fn symmetric_derivative(mu: &BoundaryMeasure, grid: &[f64]) -> Result<ConvergenceReport> {
    if grid.len() < 8 {
        return Err(Error::InsufficientData(format!("symmetric derivative needs >= 8 radii, got {}", grid.len())));
    }
    let d = mu.n.boundary();
    let omega = unit_ball_volume(d as u32);
    let origin = vec![0.0; d];
    ConvergenceReport::from_fn(grid, LimitRule::default(), |r| {
        Ok(ball_mass(mu, &origin, r)? / (omega * r.powi(d as i32)))
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrongBranch {
    pub k: f64,
    pub direction: Vec<f64>,
    /// `true` for the ball `B_{delta/K}(delta e)`, `false` for `B_{K delta}(delta e)`.
    pub inner: bool,
    pub report: ConvergenceReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrongDerivativeReport {
    pub branches: Vec<StrongBranch>,
    pub limit: Option<f64>,
    pub exists: bool,
    pub tolerance: f64,
    pub diagnostics: String,
}

/// Relative agreement required between branch limits.
pub const STRONG_AGREEMENT: f64 = 0.01;

/// Samples the ratios `mu(B)/S(B)` over the regular balls `B_{K delta}(delta e)` and
/// `B_{delta/K}(delta e)` for each `K` and direction `e`.
///
/// Finitely many `K` and directions stand in for "every regular sequence".
pub fn strong_derivative_probe(
    mu: &BoundaryMeasure,
    ks: &[f64],
    directions: &[Vec<f64>],
    scales: &[f64],
) -> Result<StrongDerivativeReport> {
    let d = mu.n.boundary();
    let omega = unit_ball_volume(d as u32);
    if ks.is_empty() || directions.is_empty() {
        return Err(Error::InvalidInput("strong derivative probe needs at least one K and one direction".into()));
    }
    let mut branches = Vec::new();
    for &k in ks {
        if !(k >= 1.0 && k.is_finite()) {
            return Err(Error::domain("K", k, "K >= 1"));
        }
        for dir in directions {
            let len = norm(dir);
            if dir.len() != d || !(len > 0.0) {
                return Err(Error::InvalidInput(format!("direction must be a nonzero vector in R^{d}")));
            }
            let e: Vec<f64> = dir.iter().map(|v| v / len).collect();
            for inner in [false, true] {
                let report = ConvergenceReport::from_fn(scales, LimitRule::default(), |delta| {
                    let radius = if inner { delta / k } else { delta * k };
                    let center: Vec<f64> = e.iter().map(|v| v * delta).collect();
                    Ok(ball_mass(mu, &center, radius)? / (omega * radius.powi(d as i32)))
                })?;
                branches.push(StrongBranch {
                    k,
                    direction: e.clone(),
                    inner,
                    report,
                });
            }
        }
    }
    let limits: Vec<Option<f64>> = branches.iter().map(|b| b.report.extrapolated_limit).collect();
    let (limit, exists, diagnostics) = if limits.iter().any(|l| l.is_none()) {
        let failed = limits.iter().filter(|l| l.is_none()).count();
        (None, false, format!("{failed} of {} branches have no finite limit", limits.len()))
    } else {
        let vals: Vec<f64> = limits.into_iter().flatten().collect();
        let hi = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
        let scale = hi.abs().max(lo.abs());
        if scale == 0.0 || hi - lo <= STRONG_AGREEMENT * scale {
            let mean = vals.iter().sum::<f64>() / vals.len() as f64;
            (Some(mean), true, format!("branch limits within [{lo:.6e}, {hi:.6e}]"))
        } else {
            (None, false, format!("branch limits disagree: [{lo:.6e}, {hi:.6e}]"))
        }
    };
    Ok(StrongDerivativeReport {
        branches,
        limit,
        exists,
        tolerance: STRONG_AGREEMENT,
        diagnostics,
    })
}

type Cumulative = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// The cumulative profile `r -> mu(B_r(O))` and `M(r) = mu(B_r(O)) / r^{n-1}`.
#[derive(Clone)]
pub struct RadialProfile {
    n: Dimension,
    source: ProfileSource,
}

#[derive(Clone)]
enum ProfileSource {
    Measure(BoundaryMeasure),
    Injected { f: Cumulative, kinks: Vec<f64> },
}

impl fmt::Debug for RadialProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.source {
            ProfileSource::Measure(m) => write!(f, "RadialProfile({m})"),
            ProfileSource::Injected { kinks, .. } => write!(f, "RadialProfile(injected, {} kinks)", kinks.len()),
        }
    }
}

impl RadialProfile {
    pub fn from_measure(mu: &BoundaryMeasure) -> Self {
        RadialProfile {
            n: mu.n,
            source: ProfileSource::Measure(mu.clone()),
        }
    }

    /// A profile given directly by its cumulative function. Nothing checks that it is
    /// nondecreasing, which makes it usable as a negative control.
    pub fn from_cumulative<F>(n: Dimension, cumulative: F, kinks: Vec<f64>) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        RadialProfile {
            n,
            source: ProfileSource::Injected {
                f: Arc::new(cumulative),
                kinks,
            },
        }
    }

    pub fn dim(&self) -> Dimension {
        self.n
    }

    pub fn measure(&self) -> Option<&BoundaryMeasure> {
        match &self.source {
            ProfileSource::Measure(m) => Some(m),
            ProfileSource::Injected { .. } => None,
        }
    }

    pub fn cumulative(&self, r: f64) -> Result<f64> {
        if !(r > 0.0) {
            return Ok(0.0);
        }
        match &self.source {
            ProfileSource::Measure(m) => ball_mass(m, &vec![0.0; self.n.boundary()], r),
            ProfileSource::Injected { f, .. } => Ok(f(r)),
        }
    }

    pub fn m(&self, r: f64) -> Result<f64> {
        Ok(self.cumulative(r)? / r.powi(self.n.boundary() as i32))
    }

    pub fn kinks(&self) -> Vec<f64> {
        match &self.source {
            ProfileSource::Measure(m) => m.kink_radii(),
            ProfileSource::Injected { kinks, .. } => kinks.clone(),
        }
    }
}

/// Interior points `z_i = (x_i, t_i)` accumulating at a boundary point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSequence", into = "RawSequence")]
pub struct PointSequence {
    n: Dimension,
    base: Vec<f64>,
    points: Vec<HalfSpacePoint>,
}

#[derive(Serialize, Deserialize)]
struct RawSequence {
    n: u32,
    base: Vec<f64>,
    points: Vec<Vec<f64>>,
}

impl TryFrom<RawSequence> for PointSequence {
    type Error = Error;

    fn try_from(raw: RawSequence) -> Result<Self> {
        let n = Dimension::new(raw.n)?;
        let points = raw
            .points
            .into_iter()
            .map(|mut p| {
                let t = p.pop().ok_or_else(|| Error::InvalidInput("empty point".into()))?;
                HalfSpacePoint::new(p, t)
            })
            .collect::<Result<Vec<_>>>()?;
        PointSequence::new(n, raw.base, points)
    }
}

impl From<PointSequence> for RawSequence {
    fn from(s: PointSequence) -> Self {
        RawSequence {
            n: s.n.get(),
            base: s.base,
            points: s
                .points
                .into_iter()
                .map(|p| {
                    let mut v = p.x;
                    v.push(p.t);
                    v
                })
                .collect(),
        }
    }
}

impl PointSequence {
    pub fn new(n: Dimension, base: Vec<f64>, points: Vec<HalfSpacePoint>) -> Result<Self> {
        let d = n.boundary();
        if base.len() != d || points.iter().any(|p| p.x.len() != d) {
            return Err(Error::InvalidInput(format!("sequence points need {d} boundary coordinates")));
        }
        if points.is_empty() {
            return Err(Error::InvalidInput("empty point sequence".into()));
        }
        Ok(PointSequence { n, base, points })
    }

    pub fn dim(&self) -> Dimension {
        self.n
    }

    pub fn base(&self) -> &[f64] {
        &self.base
    }

    pub fn points(&self) -> &[HalfSpacePoint] {
        &self.points
    }

    /// Distance of `z_i` to the base point.
    pub fn distance_to_base(&self, i: usize) -> f64 {
        let p = &self.points[i];
        (distance(&p.x, &self.base).powi(2) + p.t * p.t).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesClass {
    Diverges,
    Converges,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BeurlingSum {
    pub terms: Vec<f64>,
    pub partial_sums: Vec<f64>,
    pub classification: SeriesClass,
    /// Fitted ratio and RMS relative residual of the geometric model `c rho^i`.
    pub fitted_ratio: Option<f64>,
    pub fit_residual: Option<f64>,
}

/// Thresholds of the series classification.
pub const GEOMETRIC_RATIO_MAX: f64 = 0.9;
pub const GEOMETRIC_RESIDUAL_MAX: f64 = 0.1;
pub const DIVERGENT_PARTIAL_SUM: f64 = 1e3;
pub const DIVERGENT_TERM_FLOOR: f64 = 1e-3;

/// Partial sums of `(d(z_i, boundary) / d(z_i, O))^n` and their classification.
pub fn beurling_sum(seq: &PointSequence) -> BeurlingSum {
    let n = seq.n.get() as i32;
    let terms: Vec<f64> = (0..seq.points.len())
        .map(|i| (seq.points[i].t / seq.distance_to_base(i)).powi(n))
        .collect();
    let partial_sums: Vec<f64> = terms
        .iter()
        .scan(0.0, |acc, v| {
            *acc += v;
            Some(*acc)
        })
        .collect();
    if terms.len() < 3 {
        return BeurlingSum {
            terms,
            partial_sums,
            classification: SeriesClass::Inconclusive,
            fitted_ratio: None,
            fit_residual: None,
        };
    }
    let (ratio, residual) = ls_fit_geometric(&terms);
    let last_half = &terms[terms.len() / 2..];
    let classification = if ratio <= GEOMETRIC_RATIO_MAX && residual <= GEOMETRIC_RESIDUAL_MAX {
        SeriesClass::Converges
    } else if *partial_sums.last().unwrap() > DIVERGENT_PARTIAL_SUM
        || last_half.iter().all(|v| *v >= DIVERGENT_TERM_FLOOR)
    {
        SeriesClass::Diverges
    } else {
        SeriesClass::Inconclusive
    };
    BeurlingSum {
        terms,
        partial_sums,
        classification,
        fitted_ratio: Some(ratio),
        fit_residual: Some(residual),
    }
}

/// `min_{i != j} |z_i - z_j| / d(z_i, boundary)` over ordered pairs.
pub fn separation_index(seq: &PointSequence) -> Result<f64> {
    let pts = &seq.points;
    if pts.len() < 2 {
        return Err(Error::InsufficientData("separation index needs at least two points".into()));
    }
    let mut best = f64::INFINITY;
    for (i, a) in pts.iter().enumerate() {
        for (j, b) in pts.iter().enumerate() {
            if i != j {
                let gap = (distance(&a.x, &b.x).powi(2) + (a.t - b.t).powi(2)).sqrt();
                best = best.min(gap / a.t);
            }
        }
    }
    Ok(best)
}
