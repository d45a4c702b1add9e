//! Growth-rate fits and exceptional-set checks on tabulated functions of `r`.

use serde::{Deserialize, Serialize};

use super::NevanlinnaError;

/// Which transform of `r` the value is regressed against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegressionModel {
    /// `y ~ a r^rho + b`.
    Power(f64),
    /// `y ~ a log r + b`.
    Log,
    /// `log y ~ a log r + b`; the slope is an order estimate.
    LogLog,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegressionSummary {
    pub model: RegressionModel,
    pub slope: f64,
    pub intercept: f64,
    pub residual_rms: f64,
    pub r_min: f64,
    pub r_max: f64,
    pub points: usize,
}

impl RegressionSummary {
    pub fn predict(&self, r: f64) -> f64 {
        match self.model {
            RegressionModel::Power(rho) => self.slope * r.powf(rho) + self.intercept,
            RegressionModel::Log => self.slope * r.ln() + self.intercept,
            RegressionModel::LogLog => (self.slope * r.ln() + self.intercept).exp(),
        }
    }
}

/// Ordinary least squares `y = a x + b`; returns `(a, b, rms)`.
pub fn least_squares(xs: &[f64], ys: &[f64]) -> Option<(f64, f64, f64)> {
    let n = xs.len();
    if n < 2 || ys.len() != n {
        return None;
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if !(sxx > 0.0) {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let a = sxy / sxx;
    let b = my - a * mx;
    let rms = (xs.iter().zip(ys).map(|(x, y)| (y - a * x - b).powi(2)).sum::<f64>() / nf).sqrt();
    Some((a, b, rms))
}

/// Fit `samples = [(r, y)]` restricted to `window` (inclusive).
pub fn fit(
    samples: &[(f64, f64)],
    model: RegressionModel,
    window: Option<(f64, f64)>,
) -> Result<RegressionSummary, NevanlinnaError> {
    let pts: Vec<(f64, f64)> = samples
        .iter()
        .copied()
        .filter(|(r, _)| window.map_or(true, |(a, b)| *r >= a * (1.0 - 1e-12) && *r <= b * (1.0 + 1e-12)))
        .collect();
    if pts.len() < 4 {
        return Err(NevanlinnaError::DegenerateWindow(format!(
            "{} samples in the fit window, need at least 4",
            pts.len()
        )));
    }
    let r_min = pts.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let r_max = pts.iter().map(|p| p.0).fold(0.0, f64::max);
    if r_max < 1.5 * r_min {
        return Err(NevanlinnaError::DegenerateWindow(format!(
            "window [{r_min}, {r_max}] is too narrow"
        )));
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = match model {
        RegressionModel::Power(rho) => pts.iter().map(|(r, y)| (r.powf(rho), *y)).unzip(),
        RegressionModel::Log => pts.iter().map(|(r, y)| (r.ln(), *y)).unzip(),
        RegressionModel::LogLog => {
            if pts.iter().any(|(_, y)| !(*y > 0.0)) {
                return Err(NevanlinnaError::DegenerateWindow(
                    "log-log fit needs positive values".into(),
                ));
            }
            pts.iter().map(|(r, y)| (r.ln(), y.ln())).unzip()
        }
    };
    let (slope, intercept, residual_rms) = least_squares(&xs, &ys)
        .ok_or_else(|| NevanlinnaError::DegenerateWindow("constant abscissa".into()))?;
    Ok(RegressionSummary {
        model,
        slope,
        intercept,
        residual_rms,
        r_min,
        r_max,
        points: pts.len(),
    })
}

/// Order of growth from the log-log slope over the upper half of the grid.
///
/// Needs at least 8 samples whose radii span a factor of at least 8.
pub fn order_estimate(samples: &[(f64, f64)]) -> Result<RegressionSummary, NevanlinnaError> {
    if samples.len() < 8 {
        return Err(NevanlinnaError::DegenerateWindow(format!(
            "{} samples, need at least 8",
            samples.len()
        )));
    }
    let r_min = samples.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let r_max = samples.iter().map(|p| p.0).fold(0.0, f64::max);
    if r_max < 8.0 * r_min * (1.0 - 1e-12) {
        return Err(NevanlinnaError::DegenerateWindow(format!(
            "radii [{r_min}, {r_max}] span less than a factor of 8"
        )));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let upper = &sorted[sorted.len() / 2..];
    fit(upper, RegressionModel::LogLog, None)
}

/// Slope of the linear trend and spread `max - min` of a tabulated function;
/// used to judge boundedness.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandSummary {
    pub slope: f64,
    pub band: f64,
    pub max_abs: f64,
}

pub fn band(samples: &[(f64, f64)]) -> Result<BandSummary, NevanlinnaError> {
    let (xs, ys): (Vec<f64>, Vec<f64>) = samples.iter().copied().unzip();
    let (slope, _, _) = least_squares(&xs, &ys)
        .ok_or_else(|| NevanlinnaError::DegenerateWindow("need two distinct radii".into()))?;
    let mx = ys.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mn = ys.iter().copied().fold(f64::INFINITY, f64::min);
    let max_abs = ys.iter().map(|y| y.abs()).fold(0.0, f64::max);
    Ok(BandSummary {
        slope,
        band: mx - mn,
        max_abs,
    })
}

/// `max |y| / log r` over samples with `r > e`; bounds `O(log r)` claims.
pub fn log_ratio_bound(samples: &[(f64, f64)]) -> f64 {
    samples
        .iter()
        .filter(|(r, _)| *r > std::f64::consts::E)
        .map(|(r, y)| y.abs() / r.ln())
        .fold(0.0, f64::max)
}

/// A nondecreasing function known on a grid, linearly interpolated and
/// linearly extrapolated past the last point.
#[derive(Debug, Clone, PartialEq)]
pub struct Tabulated {
    pub points: Vec<(f64, f64)>,
}

impl Tabulated {
    pub fn new(mut points: Vec<(f64, f64)>) -> Tabulated {
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        Tabulated { points }
    }

    pub fn at(&self, r: f64) -> f64 {
        let p = &self.points;
        if p.len() == 1 {
            return p[0].1;
        }
        let i = match p.iter().position(|q| q.0 >= r) {
            Some(0) => 1,
            Some(i) => i,
            None => p.len() - 1,
        };
        let (r0, y0) = p[i - 1];
        let (r1, y1) = p[i];
        y0 + (y1 - y0) * (r - r0) / (r1 - r0)
    }
}

/// Outcome of testing `phi(r + 1/phi(r)) <= 2 phi(r)` on a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BorelReport {
    pub violations: Vec<f64>,
    /// Total length of grid cells around violating radii.
    pub measure: f64,
    pub checked: usize,
}

pub fn borel_check<F: Fn(f64) -> f64>(phi: F, grid: &[f64]) -> BorelReport {
    let mut violations = Vec::new();
    let mut measure = 0.0;
    for (i, &r) in grid.iter().enumerate() {
        let v = phi(r);
        if !(v > 0.0) {
            continue;
        }
        if phi(r + 1.0 / v) > 2.0 * v {
            violations.push(r);
            let lo = if i > 0 { 0.5 * (r - grid[i - 1]) } else { 0.0 };
            let hi = if i + 1 < grid.len() { 0.5 * (grid[i + 1] - r) } else { 0.0 };
            measure += lo + hi;
        }
    }
    BorelReport {
        violations,
        measure,
        checked: grid.len(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line_is_recovered() {
        let s: Vec<(f64, f64)> = (1..=20).map(|i| (i as f64, 3.0 * i as f64 + 1.0)).collect();
        let f = fit(&s, RegressionModel::Power(1.0), None).unwrap();
        assert!((f.slope - 3.0).abs() < 1e-12);
        assert!((f.intercept - 1.0).abs() < 1e-12);
        assert!(f.residual_rms < 1e-12);
    }

    #[test]
    fn order_of_power_law() {
        let s: Vec<(f64, f64)> = (0..16)
            .map(|i| {
                let r = 2.0 * 1.3f64.powi(i);
                (r, 0.7 * r * r)
            })
            .collect();
        let f = order_estimate(&s).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-12);
    }

    #[test]
    fn narrow_windows_are_rejected() {
        let s: Vec<(f64, f64)> = (0..8).map(|i| (10.0 + i as f64 * 0.1, 1.0)).collect();
        assert!(matches!(
            fit(&s, RegressionModel::Power(1.0), None),
            Err(NevanlinnaError::DegenerateWindow(_))
        ));
        assert!(order_estimate(&s[..7]).is_err());
    }

    #[test]
    fn borel_holds_for_polynomial_growth() {
        let grid: Vec<f64> = (2..100).map(|i| i as f64).collect();
        let rep = borel_check(|r| r * r, &grid);
        assert!(rep.violations.is_empty());
        let rep = borel_check(|r| if r > 50.5 { 1e6 } else { 1.0 }, &grid);
        assert_eq!(rep.violations, vec![50.0]);
        assert!((rep.measure - 1.0).abs() < 1e-12);
    }
}
