//! Positive harmonic functions in the unit ball of `R^n` from measures on the
//! sphere, and the projection of a small cap onto the tangent plane.
//!
//! Caps are chordal: `B_r(x0) ∩ S^{n-1}` with the Euclidean distance of `R^n`.
//! A point at polar angle `theta` from `x0` has chordal distance `2 sin(theta/2)`.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{distance, dot, norm};
use crate::measures::{Atom, BoundaryMeasure, RadialPower};
use crate::quad::{log_grid, HalfLine, Quadrature};
use crate::specfun::{elliptic_e_complementary, sphere_area, Dimension};

const UNIT_TOL: f64 = 1e-9;

/// Density `coeff rho^q` on the chordal annulus `r0 <= rho < r1` around the base point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cap {
    pub coeff: f64,
    pub q: f64,
    pub r0: f64,
    pub r1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SphereAtom {
    pub point: Vec<f64>,
    pub mass: f64,
}

/// Constant density on the chordal annulus `r0 <= rho < r1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CapPatch {
    pub r0: f64,
    pub r1: f64,
    pub density: f64,
}

impl From<CapPatch> for Cap {
    fn from(p: CapPatch) -> Self {
        Cap {
            coeff: p.density,
            q: 0.0,
            r0: p.r0,
            r1: p.r1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSphere", into = "RawSphere")]
pub struct SphereMeasure {
    n: Dimension,
    base_point: Vec<f64>,
    caps: Vec<Cap>,
    atoms: Vec<SphereAtom>,
    patches: Vec<CapPatch>,
}

#[derive(Serialize, Deserialize)]
struct RawSphere {
    n: u32,
    base_point: Vec<f64>,
    #[serde(default)]
    caps: Vec<Cap>,
    #[serde(default)]
    atoms: Vec<SphereAtom>,
    #[serde(default)]
    patches: Vec<CapPatch>,
}

impl TryFrom<RawSphere> for SphereMeasure {
    type Error = Error;

    fn try_from(raw: RawSphere) -> Result<Self> {
        SphereMeasure::new(Dimension::new(raw.n)?, raw.base_point, raw.caps, raw.atoms, raw.patches)
    }
}

impl From<SphereMeasure> for RawSphere {
    fn from(m: SphereMeasure) -> Self {
        RawSphere {
            n: m.n.get(),
            base_point: m.base_point,
            caps: m.caps,
            atoms: m.atoms,
            patches: m.patches,
        }
    }
}

fn check_unit(v: &[f64], n: usize, what: &str) -> Result<()> {
    if v.len() != n {
        return Err(Error::InvalidMeasure(format!("{what} must have {n} coordinates")));
    }
    if !v.iter().all(|x| x.is_finite()) || (norm(v) - 1.0).abs() > UNIT_TOL {
        return Err(Error::InvalidMeasure(format!("{what} {v:?} is not a unit vector")));
    }
    Ok(())
}

fn check_cap(c: &Cap, n: usize) -> Result<()> {
    let bad = |msg: String| Err(Error::InvalidMeasure(msg));
    if !(c.coeff > 0.0 && c.coeff.is_finite()) {
        return bad(format!("cap coeff must be positive, got {}", c.coeff));
    }
    if !c.q.is_finite() || !(c.r0 >= 0.0) || !(c.r1 > c.r0 && c.r1 <= 2.0) {
        return bad(format!("cap needs finite q and 0 <= r0 < r1 <= 2, got q={} r0={} r1={}", c.q, c.r0, c.r1));
    }
    if c.r0 == 0.0 && c.q <= -((n - 1) as f64) {
        return bad(format!("cap exponent q={} is not integrable at the base point of S^{}", c.q, n - 1));
    }
    Ok(())
}

impl SphereMeasure {
    pub fn new(n: Dimension, base_point: Vec<f64>, caps: Vec<Cap>, atoms: Vec<SphereAtom>, patches: Vec<CapPatch>) -> Result<Self> {
        let dim = n.get() as usize;
        check_unit(&base_point, dim, "base point")?;
        for c in &caps {
            check_cap(c, dim)?;
        }
        for p in &patches {
            check_cap(&Cap::from(*p), dim)?;
        }
        for a in &atoms {
            check_unit(&a.point, dim, "atom location")?;
            if !(a.mass > 0.0 && a.mass.is_finite()) {
                return Err(Error::InvalidMeasure(format!("atom mass must be positive, got {}", a.mass)));
            }
        }
        Ok(SphereMeasure {
            n,
            base_point,
            caps,
            atoms,
            patches,
        })
    }

    /// The zero measure with base point `e_n`.
    pub fn empty(n: Dimension) -> Self {
        SphereMeasure {
            n,
            base_point: north(n),
            caps: Vec::new(),
            atoms: Vec::new(),
            patches: Vec::new(),
        }
    }

    pub fn atom_at_base(n: Dimension, mass: f64) -> Result<Self> {
        let x0 = north(n);
        Self::new(n, x0.clone(), Vec::new(), vec![SphereAtom { point: x0, mass }], Vec::new())
    }

    /// Constant density on the whole sphere.
    pub fn uniform(n: Dimension, density: f64) -> Result<Self> {
        Self::new(
            n,
            north(n),
            Vec::new(),
            Vec::new(),
            vec![CapPatch {
                r0: 0.0,
                r1: 2.0,
                density,
            }],
        )
    }

    pub fn dim(&self) -> Dimension {
        self.n
    }

    pub fn base_point(&self) -> &[f64] {
        &self.base_point
    }

    pub fn caps(&self) -> &[Cap] {
        &self.caps
    }

    pub fn atoms(&self) -> &[SphereAtom] {
        &self.atoms
    }

    pub fn patches(&self) -> &[CapPatch] {
        &self.patches
    }

    /// Caps and patches as one list of power densities.
    fn densities(&self) -> impl Iterator<Item = Cap> + '_ {
        self.caps.iter().copied().chain(self.patches.iter().map(|p| Cap::from(*p)))
    }

    /// Largest chordal distance from the base point carrying mass.
    pub fn support_radius(&self) -> f64 {
        let dens = self.densities().map(|c| c.r1);
        let atoms = self.atoms.iter().map(|a| distance(&a.point, &self.base_point));
        dens.chain(atoms).fold(0.0, f64::max)
    }
}

impl fmt::Display for SphereMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "sphere measure in R^{} at {:?}: {} caps, {} atoms, {} patches",
            self.n,
            self.base_point,
            self.caps.len(),
            self.atoms.len(),
            self.patches.len()
        )
    }
}

fn north(n: Dimension) -> Vec<f64> {
    let mut v = vec![0.0; n.get() as usize];
    v[n.get() as usize - 1] = 1.0;
    v
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallPoint {
    pub y: Vec<f64>,
}

impl BallPoint {
    pub fn new(y: Vec<f64>) -> Result<Self> {
        if y.is_empty() || !y.iter().all(|v| v.is_finite()) || norm(&y) >= 1.0 {
            return Err(Error::InvalidInput(format!("{y:?} is not inside the unit ball")));
        }
        Ok(BallPoint { y })
    }

    /// `x0 (1 - t)`, at distance `t` from the sphere along the inner normal.
    pub fn along_normal(x0: &[f64], t: f64) -> Result<Self> {
        if !(t > 0.0 && t <= 1.0) {
            return Err(Error::domain("t", t, "(0, 1]"));
        }
        Self::new(x0.iter().map(|v| v * (1.0 - t)).collect())
    }

    /// `d(y, S) = 1 - |y|`.
    pub fn boundary_distance(&self) -> f64 {
        1.0 - norm(&self.y)
    }
}

/// `(1 - |y|^2) / (sigma_{n-1} |zeta - y|^n)`.
pub fn ball_kernel(zeta: &[f64], y: &BallPoint, n: Dimension) -> f64 {
    let r2 = dot(&y.y, &y.y);
    (1.0 - r2) / (sphere_area(n.get() - 1) * distance(zeta, &y.y).powi(n.get() as i32))
}

fn theta_of(rho: f64) -> f64 {
    2.0 * (0.5 * rho).clamp(0.0, 1.0).asin()
}

/// Mass of a power density inside the chordal ball of radius `r`, integrated
/// over the polar angle with surface element `sigma_{n-2} sin^{n-2}(theta)`.
fn cap_component_mass(c: &Cap, n: Dimension, r: f64, quad: &Quadrature) -> Result<f64> {
    let top = r.min(c.r1);
    if top <= c.r0 {
        return Ok(0.0);
    }
    let m = n.get();
    let p = c.q + m as f64 - 1.0;
    if m == 3 {
        // dS = 2 pi rho d rho exactly
        let scale = 2.0 * PI * c.coeff;
        return Ok(if (c.q + 2.0).abs() < 1e-12 {
            scale * (top / c.r0).ln()
        } else {
            let base = if c.r0 == 0.0 { 0.0 } else { c.r0.powf(p) };
            scale * (top.powf(p) - base) / p
        });
    }
    let scale = c.coeff * sphere_area(m - 2);
    let (th0, th1) = (theta_of(c.r0), theta_of(top));
    let value = if c.r0 == 0.0 {
        let reduced = |th: f64| {
            if th == 0.0 {
                return 1.0;
            }
            let h = 0.5 * th;
            (h.sin() / h).powf(c.q) * (th.sin() / th).powi(m as i32 - 2)
        };
        quad.power_head(p, th1, reduced)?.value
    } else {
        quad.integrate(|th: f64| (2.0 * (0.5 * th).sin()).powf(c.q) * th.sin().powi(m as i32 - 2), th0, th1)?
            .value
    };
    Ok(scale * value)
}

/// `mu(B_r(x0))` for the chordal ball of radius `0 < r <= 2`.
pub fn cap_mass(mu: &SphereMeasure, r: f64) -> Result<f64> {
    if !(r > 0.0 && r <= 2.0) {
        return Err(Error::domain("chordal radius", r, "(0, 2]"));
    }
    let quad = Quadrature::default();
    let mut total = 0.0;
    for c in mu.densities() {
        total += cap_component_mass(&c, mu.n, r, &quad)?;
    }
    for a in &mu.atoms {
        if distance(&a.point, &mu.base_point) <= r {
            total += a.mass;
        }
    }
    Ok(total)
}

/// Area of the chordal cap of radius `r` on `S^{n-1}`.
pub fn cap_area(n: Dimension, r: f64) -> Result<f64> {
    let c = Cap {
        coeff: 1.0,
        q: 0.0,
        r0: 0.0,
        r1: 2.0,
    };
    cap_component_mass(&c, n, r.min(2.0), &Quadrature::default())
}

/// Density `coeff rho^{-alpha}` on the cap of chordal radius `r_max`, with
/// `mu(B_r(x0)) = b r^{n-1-alpha} (1 + O(r^2))`.
pub fn cap_power_measure(alpha: f64, b: f64, n: Dimension, r_max: f64) -> Result<SphereMeasure> {
    let top = n.as_f64() - 1.0;
    if !(alpha > -1.0 && alpha < top) {
        return Err(Error::domain("alpha", alpha, format!("(-1, {top})")));
    }
    if !(b > 0.0 && b.is_finite()) {
        return Err(Error::domain("b", b, "b > 0"));
    }
    if !(r_max > 0.0 && r_max <= 2.0) {
        return Err(Error::domain("cap radius", r_max, "(0, 2]"));
    }
    // the flat leading term of the surface element is sigma_{n-2} rho^{n-2}
    let coeff = b * (top - alpha) / sphere_area(n.get() - 2);
    SphereMeasure::new(
        n,
        north(n),
        vec![Cap {
            coeff,
            q: -alpha,
            r0: 0.0,
            r1: r_max,
        }],
        Vec::new(),
        Vec::new(),
    )
}

/// The azimuthal integral of the kernel over the circle at chordal distance
/// `rho` from the base point, times `rho` (n = 3).
struct Azimuth {
    y_par: f64,
    one_minus_par: f64,
    y_perp: f64,
    weight: f64,
}

impl Azimuth {
    fn new(x0: &[f64], y: &BallPoint) -> Self {
        let y_par = dot(x0, &y.y);
        let perp: Vec<f64> = y.y.iter().zip(x0).map(|(a, b)| a - y_par * b).collect();
        Azimuth {
            y_par,
            one_minus_par: 1.0 - y_par,
            y_perp: norm(&perp),
            weight: (1.0 - dot(&y.y, &y.y)) / (4.0 * PI),
        }
    }

    // (1/rho) int_0^{2 pi} K rho dphi = weight * 4 E / ((A - B) sqrt(A + B))
    fn ring(&self, rho: f64) -> f64 {
        let c = self.one_minus_par - 0.5 * rho * rho; // cos(theta) - y_par
        let s = rho * (1.0 - 0.25 * rho * rho).max(0.0).sqrt();
        let amb = c * c + (s - self.y_perp).powi(2);
        let apb = c * c + (s + self.y_perp).powi(2);
        self.weight * 4.0 * elliptic_e_complementary(amb / apb) / (amb * apb.sqrt())
    }

    fn knots(&self, d: f64) -> Vec<f64> {
        let mut k = vec![0.25 * d, d, 4.0 * d];
        let r = (self.y_par * self.y_par + self.y_perp * self.y_perp).sqrt();
        if r > 0.0 {
            // chordal distance from x0 to y / |y|
            let rho_y = (2.0 - 2.0 * self.y_par / r).max(0.0).sqrt();
            if rho_y > 0.0 {
                k.extend([rho_y - 4.0 * d, rho_y - d, rho_y, rho_y + d, rho_y + 4.0 * d]);
            }
        }
        k.retain(|v| *v > 0.0);
        k
    }
}

/// `u(y) = int P(zeta, y) dmu(zeta)`.
pub fn ball_extend(mu: &SphereMeasure, y: &BallPoint) -> Result<f64> {
    let n = mu.n;
    if y.y.len() != n.get() as usize {
        return Err(Error::InvalidInput(format!("point has {} coordinates, expected {n}", y.y.len())));
    }
    let mut total: f64 = mu.atoms.iter().map(|a| a.mass * ball_kernel(&a.point, y, n)).sum();
    if mu.caps.is_empty() && mu.patches.is_empty() {
        return Ok(total);
    }
    if n.get() != 3 {
        return Err(Error::Dimension {
            operation: "ball extension of a density",
            n: n.get(),
        });
    }
    let az = Azimuth::new(&mu.base_point, y);
    let knots = az.knots(y.boundary_distance());
    let quad = Quadrature::default();
    for c in mu.densities() {
        let head = |rho: f64| c.coeff * az.ring(rho);
        let body = |rho: f64| c.coeff * rho.powf(c.q + 1.0) * az.ring(rho);
        let parts = HalfLine {
            head_power: c.q + 2.0,
            head: &head,
            body: &body,
            tail_power: 1.0,
            tail: &body,
        };
        total += quad.half_line(c.r0, c.r1, &knots, &parts)?.value;
    }
    Ok(total)
}

/// Orthonormal basis of the tangent plane at the unit vector `x0`.
fn tangent_basis(x0: &[f64]) -> Vec<Vec<f64>> {
    let n = x0.len();
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(n - 1);
    let mut order: Vec<usize> = (0..n).collect();
    // start from the coordinate axes least aligned with x0
    order.sort_by(|a, b| x0[*a].abs().total_cmp(&x0[*b].abs()));
    for &i in &order {
        if basis.len() == n - 1 {
            break;
        }
        let mut v = vec![0.0; n];
        v[i] = 1.0;
        for u in std::iter::once(x0).chain(basis.iter().map(|b| b.as_slice())) {
            let p = dot(&v, u);
            v.iter_mut().zip(u).for_each(|(a, b)| *a -= p * b);
        }
        let len = norm(&v);
        if len > 1e-8 {
            basis.push(v.into_iter().map(|a| a / len).collect());
        }
    }
    basis
}

/// Orthogonal projection of `s` onto the tangent plane `{x : x . x0 = 1}`.
pub fn tangent_projection(x0: &[f64], s: &[f64]) -> Vec<f64> {
    let c = 1.0 - dot(s, x0);
    s.iter().zip(x0).map(|(a, b)| a + c * b).collect()
}

/// Radius in the tangent plane of a sphere point at chordal distance `rho`.
pub fn projected_radius(rho: f64) -> f64 {
    rho * (1.0 - 0.25 * rho * rho).max(0.0).sqrt()
}

/// Inverse of [`projected_radius`] on the upper hemisphere.
pub fn chordal_radius(r: f64) -> f64 {
    // 2 - 2 sqrt(1 - r^2) without cancellation
    (2.0 * r * r / (1.0 + (1.0 - r * r).max(0.0).sqrt())).sqrt()
}

/// Number of tabulation radii used per density component.
pub const PROJECTION_GRID: usize = 400;

/// Pushes a measure supported in the chordal cap of radius `epsilon` forward
/// to the tangent plane at the base point, with the base point as the origin.
/// Densities become power-law annuli on a log grid of [`PROJECTION_GRID`]
/// radii, each matching the exact mass and half-mass of its annulus.
pub fn project_pushforward(mu: &SphereMeasure, epsilon: f64) -> Result<BoundaryMeasure> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::domain("epsilon", epsilon, "(0, 1)"));
    }
    if mu.support_radius() > epsilon * (1.0 + 1e-12) {
        return Err(Error::SupportOutsideCap(epsilon));
    }
    let n = mu.n;
    let d = n.boundary();
    let basis = tangent_basis(&mu.base_point);
    let atoms = mu
        .atoms
        .iter()
        .map(|a| Atom {
            location: basis.iter().map(|e| dot(e, &a.point)).collect(),
            mass: a.mass,
        })
        .collect();
    let quad = Quadrature::default();
    let mut radials = Vec::new();
    for c in mu.densities() {
        let mass = |r: f64| cap_component_mass(&c, n, chordal_radius(r), &quad);
        let lo = projected_radius(c.r0);
        let hi = projected_radius(c.r1);
        let start = if c.r0 == 0.0 {
            let inner = hi * 1e-8;
            // near the base point the projection is the identity to second order
            let m_inner = mass(inner)?;
            let p = c.q + d as f64;
            radials.push(RadialPower {
                coeff: m_inner * p / (sphere_area(d as u32 - 1) * inner.powf(p)),
                q: c.q,
                r0: 0.0,
                r1: inner,
            });
            inner
        } else {
            lo
        };
        let grid = log_grid(start, hi, PROJECTION_GRID);
        for w in grid.windows(2) {
            let (a, b) = (w[0], w[1]);
            let mid = (a * b).sqrt();
            let ma = mass(a)?;
            let total = mass(b)? - ma;
            let first = mass(mid)? - ma;
            if !(total > 0.0) {
                continue;
            }
            // mass of coeff r^q over [a, r] is proportional to r^p - a^p, p = q + d
            let ratio = (first / total).clamp(1e-12, 1.0 - 1e-12);
            let p = (1.0 / ratio - 1.0).ln() / (mid / a).ln();
            let q = p - d as f64;
            let shape = if p.abs() < 1e-12 {
                (b / a).ln()
            } else {
                (b.powf(p) - a.powf(p)) / p
            };
            radials.push(RadialPower {
                coeff: total / (sphere_area(d as u32 - 1) * shape),
                q,
                r0: a,
                r1: b,
            });
        }
    }
    BoundaryMeasure::new(n, atoms, radials, Vec::new())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistanceRatioReport {
    pub ratios: Vec<f64>,
    /// `|z_perp| / d(z, S)` for each interior point.
    pub apertures: Vec<f64>,
    /// Largest `|ratio - 1|` over the last half of the pairs.
    pub tail_deviation: f64,
}

/// `d(z_i, s_i) / d(z_i, Pr(s_i))` for paired interior and sphere points.
pub fn distance_ratio_probe(x0: &[f64], z: &[BallPoint], s: &[Vec<f64>]) -> Result<DistanceRatioReport> {
    if z.len() != s.len() || z.is_empty() {
        return Err(Error::InvalidInput("need equally many interior and boundary points".into()));
    }
    let mut ratios = Vec::with_capacity(z.len());
    let mut apertures = Vec::with_capacity(z.len());
    for (zi, si) in z.iter().zip(s) {
        if zi.y.len() != x0.len() || si.len() != x0.len() {
            return Err(Error::InvalidInput("dimension mismatch".into()));
        }
        let pr = tangent_projection(x0, si);
        let near = distance(&zi.y, &pr);
        ratios.push(if near == 0.0 { 1.0 } else { distance(&zi.y, si) / near });
        let par = dot(&zi.y, x0);
        let perp: Vec<f64> = zi.y.iter().zip(x0).map(|(a, b)| a - par * b).collect();
        apertures.push(norm(&perp) / zi.boundary_distance());
    }
    let tail = &ratios[ratios.len() / 2..];
    let tail_deviation = tail.iter().map(|r| (r - 1.0).abs()).fold(0.0, f64::max);
    Ok(DistanceRatioReport {
        ratios,
        apertures,
        tail_deviation,
    })
}

/// `int_{S^2} f dS` by nested adaptive quadrature in polar angle around `axis`
/// and azimuth, with extra polar breaks (radians) for concentrated integrands.
pub fn sphere_cubature<F: Fn(&[f64]) -> f64>(f: F, axis: &[f64], theta_breaks: &[f64], quad: &Quadrature) -> Result<f64> {
    if axis.len() != 3 {
        return Err(Error::Dimension {
            operation: "sphere cubature",
            n: axis.len() as u32,
        });
    }
    let basis = tangent_basis(axis);
    let mut pts = vec![0.0, PI];
    pts.extend(theta_breaks.iter().copied().filter(|t| *t > 0.0 && *t < PI));
    pts.sort_by(f64::total_cmp);
    let failure = std::cell::Cell::new(None);
    let outer = quad.integrate_pieces(
        |th: f64| {
            let (st, ct) = th.sin_cos();
            let inner = quad.integrate(
                |ph: f64| {
                    let (sp, cp) = ph.sin_cos();
                    let p: Vec<f64> = (0..3).map(|i| ct * axis[i] + st * (cp * basis[0][i] + sp * basis[1][i])).collect();
                    f(&p)
                },
                0.0,
                2.0 * PI,
            );
            match inner {
                Ok(e) => e.value * st,
                Err(e) => {
                    failure.set(Some(e));
                    0.0
                }
            }
        },
        &pts,
    )?;
    if let Some(e) = failure.take() {
        return Err(e);
    }
    Ok(outer.value)
}
