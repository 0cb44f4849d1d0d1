//! Sampled limits `t -> 0` and the rule that classifies them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LimitStatus {
    Converged,
    Diverged,
    Inconclusive,
}

/// Thresholds of the limit-detection rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitRule {
    /// Pairwise relative spread allowed among the last `window` values.
    pub tol_limit: f64,
    /// Largest log-log slope magnitude compatible with a finite nonzero limit.
    pub max_slope: f64,
    /// Monotone growth (or decay) factor over the grid that counts as divergence (or vanishing).
    pub divergence_factor: f64,
    pub window: usize,
}

impl Default for LimitRule {
    fn default() -> Self {
        LimitRule {
            tol_limit: 1e-3,
            max_slope: 0.05,
            divergence_factor: 10.0,
            window: 5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    /// Samples ordered by strictly decreasing `t`.
    pub samples: Vec<Sample>,
    pub extrapolated_limit: Option<f64>,
    /// `-d ln|value| / d ln t` over the second half of the samples; positive when the values blow up.
    pub fitted_order: f64,
    pub status: LimitStatus,
    pub diagnostics: String,
    pub rule: LimitRule,
}

/// Least-squares slope of `y` against `x`.
pub fn ls_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

/// Fits `c rho^i` to positive `terms` by least squares in `ln`; returns `rho`
/// and the RMS relative residual.
pub fn ls_fit_geometric(terms: &[f64]) -> (f64, f64) {
    let x: Vec<f64> = (0..terms.len()).map(|i| i as f64).collect();
    let y: Vec<f64> = terms.iter().map(|v| v.ln()).collect();
    let slope = ls_slope(&x, &y);
    let intercept = (y.iter().sum::<f64>() - slope * x.iter().sum::<f64>()) / terms.len() as f64;
    let rms = (terms
        .iter()
        .enumerate()
        .map(|(i, v)| (v / (intercept + slope * i as f64).exp() - 1.0).powi(2))
        .sum::<f64>()
        / terms.len() as f64)
        .sqrt();
    (slope.exp(), rms)
}

fn fitted_order(samples: &[Sample]) -> f64 {
    let tail = &samples[samples.len() / 2..];
    let pts: Vec<(f64, f64)> = tail
        .iter()
        .filter(|s| s.value != 0.0)
        .map(|s| (s.t.ln(), s.value.abs().ln()))
        .collect();
    if pts.len() < 2 {
        return 0.0;
    }
    let (x, y): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
    -ls_slope(&x, &y)
}

fn aitken(v: &[f64]) -> Option<f64> {
    if v.len() < 3 {
        return None;
    }
    let (a, b, c) = (v[v.len() - 3], v[v.len() - 2], v[v.len() - 1]);
    let d1 = b - a;
    let d2 = c - b;
    if d1 == 0.0 {
        return None;
    }
    let ratio = d2 / d1;
    if ratio > 0.0 && ratio < 0.9 {
        Some(c + d2 * ratio / (1.0 - ratio))
    } else {
        None
    }
}

impl ConvergenceReport {
    /// Builds and classifies a report. `samples` must be strictly decreasing in `t`.
    pub fn classify(samples: Vec<Sample>, rule: LimitRule) -> Result<Self> {
        if samples.len() < rule.window.max(3) {
            return Err(Error::InsufficientData(format!(
                "{} samples, limit detection needs at least {}",
                samples.len(),
                rule.window.max(3)
            )));
        }
        if samples.windows(2).any(|w| !(w[1].t < w[0].t)) || samples.iter().any(|s| !(s.t > 0.0)) {
            return Err(Error::InvalidInput("sample heights must be positive and strictly decreasing".into()));
        }
        if let Some(s) = samples.iter().find(|s| !s.value.is_finite()) {
            return Err(Error::NonFinite(s.t));
        }
        let values: Vec<f64> = samples.iter().map(|s| s.value).collect();
        let order = fitted_order(&samples);
        let last = *values.last().unwrap();
        let tail = &values[values.len() - rule.window..];
        let scale = tail.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let spread = tail.iter().fold(f64::NEG_INFINITY, |m, v| m.max(*v))
            - tail.iter().fold(f64::INFINITY, |m, v| m.min(*v));
        let first_abs = values[0].abs();
        let monotone_up = values.windows(2).all(|w| w[1].abs() >= w[0].abs());
        let monotone_down = values.windows(2).all(|w| w[1].abs() <= w[0].abs());

        let (status, limit, diagnostics) = if scale == 0.0 {
            (LimitStatus::Converged, Some(0.0), "identically zero on the tail".to_string())
        } else if spread <= rule.tol_limit * scale && order.abs() <= rule.max_slope {
            let lim = aitken(&values).unwrap_or(last);
            (
                LimitStatus::Converged,
                Some(lim),
                format!("tail spread {:.3e} relative, order {:.4}", spread / scale, order),
            )
        } else if monotone_down && last.abs() * rule.divergence_factor <= first_abs && order <= -rule.max_slope {
            (
                LimitStatus::Converged,
                Some(0.0),
                format!(
                    "vanishing: decayed by {:.3e} with order {:.4}",
                    first_abs / last.abs().max(f64::MIN_POSITIVE),
                    order
                ),
            )
        } else if monotone_up && last.abs() >= rule.divergence_factor * first_abs {
            (
                LimitStatus::Diverged,
                None,
                format!("grew by {:.3e}, order {:.4}", last.abs() / first_abs.max(f64::MIN_POSITIVE), order),
            )
        } else {
            (
                LimitStatus::Inconclusive,
                None,
                format!("tail spread {:.3e} relative, order {:.4}", spread / scale, order),
            )
        };
        Ok(ConvergenceReport {
            samples,
            extrapolated_limit: limit,
            fitted_order: order,
            status,
            diagnostics,
            rule,
        })
    }

    pub fn from_fn<F>(heights: &[f64], rule: LimitRule, mut f: F) -> Result<Self>
    where
        F: FnMut(f64) -> Result<f64>,
    {
        let samples = heights
            .iter()
            .map(|&t| Ok(Sample { t, value: f(t)? }))
            .collect::<Result<Vec<_>>>()?;
        Self::classify(samples, rule)
    }

    pub fn converged(&self) -> bool {
        self.status == LimitStatus::Converged
    }

    pub fn last_value(&self) -> f64 {
        self.samples.last().map(|s| s.value).unwrap_or(f64::NAN)
    }
}
