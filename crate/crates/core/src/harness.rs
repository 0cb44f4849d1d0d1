//! End-to-end checks of the growth criterion and its companions on constructed
//! measures: forward and converse directions, growth-order estimation, normal
//! and non-tangential limits, Beurling sequences and the ball version.

use serde::{Deserialize, Serialize};

use crate::ball::{ball_extend, cap_power_measure, project_pushforward, BallPoint};
use crate::error::{Error, Result};
use crate::halfspace::{extend, normal_trace_convolution, nt_values, poisson_kernel, ApproachPath, HalfSpacePoint};
use crate::measures::{
    beurling_sum, m_profile, power_law_measure, separation_index, strong_derivative_probe, symmetric_derivative,
    BeurlingSum, BoundaryMeasure, PointSequence, RadialProfile, SeriesClass, StrongDerivativeReport,
};
use crate::mellin::{squeeze_check, squeeze_g, weak_limit_check, Side, SqueezeReport, WeakLimitReport};
use crate::quad::log_grid;
use crate::report::{ls_slope, ConvergenceReport, LimitRule, LimitStatus};
use crate::specfun::{kappa_n, tauberian_constant, Dimension};

/// A constructed measure with `mu(B_r(O)) = b r^{n-1-alpha}` for `r <= R`
/// (an atom of mass `b` when `alpha = n - 1`) and the heights to sample it at.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationCase {
    pub n: u32,
    pub alpha: f64,
    pub b: f64,
    #[serde(rename = "R")]
    pub r: f64,
    pub t_min: f64,
    pub t_max: f64,
    pub points_per_decade: u32,
    /// Relative error allowed at `t_min` (absolute when `b = 0`).
    pub tolerance: f64,
}

impl VerificationCase {
    pub fn new(n: u32, alpha: f64, b: f64, t_min: f64) -> Self {
        VerificationCase {
            n,
            alpha,
            b,
            r: 1.0,
            t_min,
            t_max: 0.1,
            points_per_decade: 4,
            tolerance: 0.02,
        }
    }

    pub fn dim(&self) -> Result<Dimension> {
        Dimension::new(self.n)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.dim()?;
        let top = n.as_f64() - 1.0;
        if !(self.alpha > -1.0 && self.alpha <= top) {
            return Err(Error::domain("alpha", self.alpha, format!("(-1, {top}]")));
        }
        if !(self.b >= 0.0 && self.b.is_finite()) {
            return Err(Error::domain("b", self.b, "b >= 0"));
        }
        if !(self.r > 0.0 && self.r.is_finite()) {
            return Err(Error::domain("R", self.r, "R > 0"));
        }
        if !(self.t_min > 0.0 && self.t_max > self.t_min) {
            return Err(Error::InvalidInput(format!("need 0 < t_min < t_max, got {} and {}", self.t_min, self.t_max)));
        }
        if self.points_per_decade == 0 || !(self.tolerance > 0.0) {
            return Err(Error::InvalidInput("points_per_decade and tolerance must be positive".into()));
        }
        Ok(())
    }

    /// Decreasing heights from `t_max` to `t_min`.
    pub fn t_grid(&self) -> Vec<f64> {
        let decades = (self.t_max / self.t_min).log10();
        let count = (decades * self.points_per_decade as f64).round().max(1.0) as usize + 1;
        log_grid(self.t_max, self.t_min, count)
    }

    pub fn measure(&self) -> Result<BoundaryMeasure> {
        self.validate()?;
        let n = self.dim()?;
        if self.b == 0.0 {
            Ok(BoundaryMeasure::empty(n))
        } else if self.alpha == n.as_f64() - 1.0 {
            BoundaryMeasure::atom_at_origin(n, self.b)
        } else {
            power_law_measure(self.alpha, self.b, n, self.r)
        }
    }

    /// `a = b / C_alpha`.
    pub fn expected_limit(&self) -> Result<f64> {
        Ok(self.b / tauberian_constant(self.alpha, self.dim()?)?)
    }
}

/// Leading error of `C_alpha u(0, t) t^alpha` for the power law cut at `R`:
/// `C_alpha kappa_n b (n-1-alpha)/(1+alpha) (t/R)^{1+alpha}`.
pub fn truncation_error_bound(case: &VerificationCase) -> Result<f64> {
    let n = case.dim()?;
    if case.alpha == n.as_f64() - 1.0 || case.b == 0.0 {
        return Ok(0.0);
    }
    let c = tauberian_constant(case.alpha, n)?;
    let shape = (n.as_f64() - 1.0 - case.alpha) / (1.0 + case.alpha);
    Ok(c * kappa_n(n) * case.b * shape * (case.t_min / case.r).powf(1.0 + case.alpha))
}

/// Required decrease of the deviation per decade of `t`.
pub const SHRINK_PER_DECADE: f64 = 3.0;
/// Deviations below this are at quadrature level and count as resolved.
pub const DEVIATION_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Deviation {
    pub t: f64,
    pub value: f64,
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ForwardReport {
    pub case: VerificationCase,
    pub c_alpha: f64,
    pub expected_a: f64,
    /// `C_alpha u(0, t) t^alpha`, whose limit should be `b`.
    pub report: ConvergenceReport,
    /// At `100 t_min`, `10 t_min` and `t_min`.
    pub deviations: Vec<Deviation>,
    pub shrink_factors: Vec<f64>,
    pub truncation_bound: f64,
    pub passed: bool,
    pub diagnostics: String,
}

fn scaled_trace(mu: &BoundaryMeasure, alpha: f64, c: f64, t: f64) -> Result<f64> {
    Ok(c * normal_trace_convolution(mu, t)? * t.powf(alpha))
}

fn deviation_of(value: f64, b: f64) -> f64 {
    if b == 0.0 {
        value.abs()
    } else {
        (value - b).abs() / b
    }
}

/// Samples `C_alpha u(0, t) t^alpha` and checks it is within `tolerance` of `b`
/// at `t_min`, with the deviation shrinking by [`SHRINK_PER_DECADE`] per decade.
pub fn verify_theorem1_forward(case: &VerificationCase) -> Result<ForwardReport> {
    let mu = case.measure()?;
    let n = case.dim()?;
    let c = tauberian_constant(case.alpha, n)?;
    let report = ConvergenceReport::from_fn(&case.t_grid(), LimitRule::default(), |t| scaled_trace(&mu, case.alpha, c, t))?;
    let deviations = [100.0, 10.0, 1.0]
        .iter()
        .map(|k| {
            let t = case.t_min * k;
            let value = scaled_trace(&mu, case.alpha, c, t)?;
            Ok(Deviation {
                t,
                value,
                deviation: deviation_of(value, case.b),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let shrink_factors: Vec<f64> = deviations
        .windows(2)
        .map(|w| w[0].deviation / w[1].deviation.max(f64::MIN_POSITIVE))
        .collect();
    let shrinks = deviations
        .windows(2)
        .zip(&shrink_factors)
        .all(|(w, f)| w[1].deviation <= DEVIATION_FLOOR || *f >= SHRINK_PER_DECADE);
    let last = deviations[2];
    let within = last.deviation <= case.tolerance;
    let passed = within && shrinks;
    let diagnostics = format!(
        "deviation {:.3e} at t = {:.1e} (tolerance {:.1e}), shrink factors {:?}",
        last.deviation, last.t, case.tolerance, shrink_factors
    );
    Ok(ForwardReport {
        case: case.clone(),
        c_alpha: c,
        expected_a: case.b / c,
        report,
        deviations,
        shrink_factors,
        truncation_bound: truncation_error_bound(case)?,
        passed,
        diagnostics,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConverseReport {
    pub alpha: f64,
    pub b: f64,
    /// `C_alpha u(0, t) t^alpha`.
    pub trace: ConvergenceReport,
    /// `M(t) t^alpha`.
    pub profile: ConvergenceReport,
    /// Both converge to `b`, or both fail to converge.
    pub consistent: bool,
    pub squeeze: Vec<SqueezeReport>,
    /// Not run for `alpha = n - 1`.
    pub weak_limit: Option<WeakLimitReport>,
    pub passed: bool,
    pub diagnostics: String,
}

/// Squeeze widths used by the converse checks.
pub const SQUEEZE_EPSILONS: [f64; 2] = [0.1, 0.01];

fn limit_matches(report: &ConvergenceReport, b: f64, tol: f64) -> bool {
    report.converged() && report.extrapolated_limit.is_some_and(|l| deviation_of(l, b) <= tol)
}

/// Heights where the truncation error of the trace is about `1e-5` relative,
/// deep enough for the limit rule to see convergence.
fn weak_grid(alpha: f64, n: Dimension, r: f64) -> Result<Vec<f64>> {
    let c = tauberian_constant(alpha, n)?;
    let shape = c * kappa_n(n) * (n.as_f64() - 1.0 - alpha) / (1.0 + alpha);
    let t = r * (1e-5 / shape.max(1e-300)).powf(1.0 / (1.0 + alpha));
    let t = t.min(0.1 * r);
    Ok(log_grid(10.0 * t, 0.1 * t, 9))
}

/// The converse direction on any measure: samples `M(t) t^alpha` next to the
/// scaled trace and runs the squeeze and weak-limit mechanisms.
pub fn verify_converse(
    mu: &BoundaryMeasure,
    alpha: f64,
    b: f64,
    grid: &[f64],
    support_radius: f64,
    tolerance: f64,
) -> Result<ConverseReport> {
    let n = mu.dim();
    let c = tauberian_constant(alpha, n)?;
    let trace = ConvergenceReport::from_fn(grid, LimitRule::default(), |t| scaled_trace(mu, alpha, c, t))?;
    let profile = ConvergenceReport::from_fn(grid, LimitRule::default(), |t| Ok(m_profile(mu, t)? * t.powf(alpha)))?;
    let trace_ok = trace.converged() || trace.extrapolated_limit.is_none() && deviation_of(trace.last_value(), b) <= tolerance;
    let trace_to_b = trace_ok && deviation_of(trace.extrapolated_limit.unwrap_or(trace.last_value()), b) <= tolerance;
    let profile_to_b = limit_matches(&profile, b, tolerance);
    let both_fail = trace.status == LimitStatus::Diverged && profile.status != LimitStatus::Converged;
    let consistent = (trace_to_b && profile_to_b) || both_fail;
    let rp = RadialProfile::from_measure(mu);
    let squeeze = SQUEEZE_EPSILONS
        .iter()
        .map(|&eps| squeeze_check(&rp, eps, grid, n))
        .collect::<Result<Vec<_>>>()?;
    let squeeze_ok = squeeze.iter().all(|s| s.all_ok);
    let weak_limit = if alpha < n.as_f64() - 1.0 {
        let g = squeeze_g(0.1, Side::Plus)?;
        Some(weak_limit_check(&rp, &g, alpha, &weak_grid(alpha, n, support_radius)?, n)?)
    } else {
        None
    };
    let weak_ok = weak_limit.as_ref().is_none_or(|w| w.ok);
    let passed = consistent && profile_to_b && squeeze_ok && weak_ok;
    let diagnostics = format!(
        "trace {:?} ({}), profile {:?} ({}), squeeze {}, weak limit {}",
        trace.status,
        trace.diagnostics,
        profile.status,
        profile.diagnostics,
        if squeeze_ok { "holds" } else { "violated" },
        match &weak_limit {
            None => "not run at alpha = n - 1".to_string(),
            Some(w) => format!("relative error {:?}", w.relative_error),
        }
    );
    Ok(ConverseReport {
        alpha,
        b,
        trace,
        profile,
        consistent,
        squeeze,
        weak_limit,
        passed,
        diagnostics,
    })
}

pub fn verify_theorem1_converse(case: &VerificationCase) -> Result<ConverseReport> {
    let mu = case.measure()?;
    verify_converse(&mu, case.alpha, case.b, &case.t_grid(), case.r, case.tolerance)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthOrder {
    pub order: f64,
    pub raw_slope: f64,
    pub warning: Option<String>,
}

/// `-d ln u / d ln t` by least squares, clamped to `[-1, n-1]`.
pub fn growth_order_estimate(samples: &[(f64, f64)], n: Dimension) -> Result<GrowthOrder> {
    if samples.len() < 10 {
        return Err(Error::InsufficientData(format!("growth order needs >= 10 samples, got {}", samples.len())));
    }
    let (lo, hi) = samples
        .iter()
        .fold((f64::INFINITY, 0.0_f64), |(lo, hi), (t, _)| (lo.min(*t), hi.max(*t)));
    if !(lo > 0.0) || (hi / lo).log10() < 3.0 - 1e-9 {
        return Err(Error::InsufficientData(format!("samples span [{lo:e}, {hi:e}], need 3 decades")));
    }
    if let Some((t, u)) = samples.iter().find(|(_, u)| !(*u > 0.0 && u.is_finite())) {
        return Err(Error::InvalidInput(format!("u({t:e}) = {u} is not positive")));
    }
    let x: Vec<f64> = samples.iter().map(|(t, _)| t.ln()).collect();
    let y: Vec<f64> = samples.iter().map(|(_, u)| -u.ln()).collect();
    let raw = ls_slope(&x, &y);
    let top = n.as_f64() - 1.0;
    let order = raw.clamp(-1.0, top);
    let warning = (order != raw).then(|| format!("fitted order {raw:.4} lies outside [-1, {top}] and was clamped"));
    Ok(GrowthOrder {
        order,
        raw_slope: raw,
        warning,
    })
}

/// Relative agreement required between paired limits in the NL1 and NT1 suites.
pub const LIMIT_AGREEMENT: f64 = 0.01;

fn limits_agree(a: &ConvergenceReport, b: &ConvergenceReport) -> bool {
    match (a.converged(), b.converged()) {
        (true, true) => close(a.extrapolated_limit.unwrap_or(f64::NAN), b.extrapolated_limit.unwrap_or(f64::NAN)),
        (false, false) => true,
        _ => false,
    }
}

fn close(x: f64, y: f64) -> bool {
    let scale = x.abs().max(y.abs());
    scale == 0.0 || (x - y).abs() <= LIMIT_AGREEMENT * scale
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Nl1Report {
    /// `mu(B_r) / S(B_r)`.
    pub symmetric: ConvergenceReport,
    /// `u(0, t)`.
    pub trace: ConvergenceReport,
    /// Both converge to the same value or neither converges.
    pub agree: bool,
    pub limit: Option<f64>,
    pub passed: bool,
}

/// The normal limit of `u` against the symmetric derivative of `mu` at `O`.
pub fn verify_nl1(mu: &BoundaryMeasure, t_grid: &[f64]) -> Result<Nl1Report> {
    let symmetric = symmetric_derivative(mu, t_grid)?;
    let trace = ConvergenceReport::from_fn(t_grid, LimitRule::default(), |t| normal_trace_convolution(mu, t))?;
    let agree = limits_agree(&symmetric, &trace);
    let passed = agree && symmetric.converged();
    Ok(Nl1Report {
        limit: if passed { trace.extrapolated_limit } else { None },
        symmetric,
        trace,
        agree,
        passed,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NtPath {
    pub aperture: f64,
    pub direction: Vec<f64>,
    pub report: ConvergenceReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Nt1Report {
    pub paths: Vec<NtPath>,
    pub strong: StrongDerivativeReport,
    pub normal_exists: bool,
    pub nt_exists: bool,
    pub nt_limit: Option<f64>,
    pub agree: bool,
    pub passed: bool,
    pub diagnostics: String,
}

pub const NT_APERTURES: [f64; 4] = [0.0, 0.5, 1.0, 2.0];

fn probe_directions(d: usize) -> Vec<Vec<f64>> {
    let axis = |i: usize, s: f64| {
        let mut e = vec![0.0; d];
        e[i] = s;
        e
    };
    let mut dirs = vec![axis(0, 1.0), axis(0, -1.0)];
    if d >= 2 {
        dirs.push(axis(1, 1.0));
    }
    dirs
}

/// Non-tangential limits along several apertures and directions against the
/// strong derivative probe with the same directions.
pub fn verify_nt1(mu: &BoundaryMeasure, apertures: &[f64], ks: &[f64], heights: &[f64]) -> Result<Nt1Report> {
    let n = mu.dim();
    let d = n.boundary();
    let directions = probe_directions(d);
    let mut paths = Vec::new();
    for &gamma in apertures {
        let dirs: &[Vec<f64>] = if gamma == 0.0 { &directions[..1] } else { &directions };
        for e in dirs {
            let path = ApproachPath::new(vec![0.0; d], gamma, e.clone(), heights.to_vec())?;
            paths.push(NtPath {
                aperture: gamma,
                direction: e.clone(),
                report: nt_values(mu, &path)?,
            });
        }
    }
    let normal_exists = paths.iter().filter(|p| p.aperture == 0.0).all(|p| p.report.converged());
    let limits: Vec<Option<f64>> = paths
        .iter()
        .map(|p| if p.report.converged() { p.report.extrapolated_limit } else { None })
        .collect();
    let nt_limit = if limits.iter().all(|l| l.is_some()) {
        let v: Vec<f64> = limits.iter().flatten().copied().collect();
        let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
        close(hi, lo).then(|| v.iter().sum::<f64>() / v.len() as f64)
    } else {
        None
    };
    let nt_exists = nt_limit.is_some();
    let strong = strong_derivative_probe(mu, ks, &directions, heights)?;
    let agree = nt_exists == strong.exists
        && match (nt_limit, strong.limit) {
            (Some(a), Some(b)) => close(a, b),
            _ => true,
        }
        && (!nt_exists || normal_exists);
    let diagnostics = format!(
        "normal limit {}, NT limit {}, strong derivative {} ({})",
        if normal_exists { "exists" } else { "missing" },
        nt_limit.map_or("missing".to_string(), |v| format!("{v:.6e}")),
        strong.limit.map_or("missing".to_string(), |v| format!("{v:.6e}")),
        strong.diagnostics
    );
    Ok(Nt1Report {
        paths,
        passed: agree && nt_exists,
        strong,
        normal_exists,
        nt_exists,
        nt_limit,
        agree,
        diagnostics,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BeurlingReport {
    pub separation_index: Option<f64>,
    pub sum: BeurlingSum,
    pub kappa: f64,
    /// `K(z_i - O)`.
    pub kernel: Vec<f64>,
    pub u: Vec<f64>,
    /// `u(z_i) >= kappa K(z_i - O)` for every `i`.
    pub hypothesis_holds: bool,
    pub atom_mass_at_origin: f64,
    /// `u(z_i) >= m K(z_i - O)` for the atom `m` at `O`, when there is one.
    pub atom_inequality: Option<bool>,
    /// `min_i u(z_i) / K(z_i - O)`, an empirical lower bound for the mass at `O`.
    pub min_ratio: f64,
    /// For a divergent sum with the hypothesis holding: whether `mu` has mass `>= kappa` at `O`.
    pub implication: Option<bool>,
}

pub fn beurling_report(seq: &PointSequence, mu: &BoundaryMeasure, kappa: f64) -> Result<BeurlingReport> {
    let n = mu.dim();
    if seq.dim() != n || seq.base().iter().any(|v| *v != 0.0) {
        return Err(Error::InvalidInput("the sequence must approach O in the measure's half-space".into()));
    }
    let sum = beurling_sum(seq);
    let separation_index = separation_index(seq).ok();
    let mut kernel = Vec::with_capacity(seq.points().len());
    let mut u = Vec::with_capacity(seq.points().len());
    for p in seq.points() {
        kernel.push(poisson_kernel(&p.x, p.t, n));
        u.push(extend(mu, p)?);
    }
    let atom_mass_at_origin: f64 = mu
        .atoms()
        .iter()
        .filter(|a| a.location.iter().all(|v| *v == 0.0))
        .map(|a| a.mass)
        .sum();
    let atom_inequality =
        (atom_mass_at_origin > 0.0).then(|| u.iter().zip(&kernel).all(|(u, k)| *u >= atom_mass_at_origin * k));
    let hypothesis_holds = u.iter().zip(&kernel).all(|(u, k)| *u >= kappa * k);
    let min_ratio = u.iter().zip(&kernel).map(|(u, k)| u / k).fold(f64::INFINITY, f64::min);
    let implication = (sum.classification == SeriesClass::Diverges && hypothesis_holds)
        .then(|| atom_mass_at_origin >= kappa * (1.0 - 1e-12));
    Ok(BeurlingReport {
        separation_index,
        sum,
        kappa,
        kernel,
        u,
        hypothesis_holds,
        atom_mass_at_origin,
        atom_inequality,
        min_ratio,
        implication,
    })
}

/// `(0, 2^{-i})`, `i = 1..=count`.
pub fn normal_dyadic_sequence(n: Dimension, count: usize) -> Result<PointSequence> {
    let d = n.boundary();
    let points = (1..=count)
        .map(|i| HalfSpacePoint::new(vec![0.0; d], 0.5f64.powi(i as i32)))
        .collect::<Result<Vec<_>>>()?;
    PointSequence::new(n, vec![0.0; d], points)
}

/// `(2^{-i} e_1, 4^{-i})`, `i = 1..=count`.
pub fn tangential_sequence(n: Dimension, count: usize) -> Result<PointSequence> {
    let d = n.boundary();
    let points = (1..=count)
        .map(|i| {
            let mut x = vec![0.0; d];
            x[0] = 0.5f64.powi(i as i32);
            HalfSpacePoint::new(x, 0.25f64.powi(i as i32))
        })
        .collect::<Result<Vec<_>>>()?;
    PointSequence::new(n, vec![0.0; d], points)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BallGrowthReport {
    pub alpha: f64,
    pub b: f64,
    pub t: f64,
    /// `C_alpha u_ball(x0 (1 - t)) t^alpha`.
    pub ball: f64,
    /// `C_alpha u(0, t) t^alpha` of the projected measure.
    pub halfspace: f64,
    pub deviation: f64,
    pub disagreement: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// The ball version in `n = 3`: a cap power measure of radius `cap` and its
/// projection to the tangent plane, both sampled at height `t`.
pub fn verify_ball_growth(alpha: f64, b: f64, cap: f64, t: f64, tolerance: f64) -> Result<BallGrowthReport> {
    let n = Dimension::new(3)?;
    let mu = cap_power_measure(alpha, b, n, cap)?;
    let flat = project_pushforward(&mu, cap)?;
    let c = tauberian_constant(alpha, n)?;
    let y = BallPoint::along_normal(mu.base_point(), t)?;
    let ball = c * ball_extend(&mu, &y)? * t.powf(alpha);
    let halfspace = c * normal_trace_convolution(&flat, t)? * t.powf(alpha);
    let deviation = (ball - b).abs() / b;
    let disagreement = (ball - halfspace).abs() / halfspace.abs();
    Ok(BallGrowthReport {
        alpha,
        b,
        t,
        ball,
        halfspace,
        deviation,
        disagreement,
        tolerance,
        passed: deviation <= tolerance && disagreement <= tolerance,
    })
}
