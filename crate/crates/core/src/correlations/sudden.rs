//! Slope-discontinuity detection on uniformly sampled series.

use super::{CorrelationSeries, Measure};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuddenChangeOptions {
    /// Second-difference threshold in units of the median |second difference|.
    pub kappa: f64,
    /// Required slope jump in units of the summed slope standard errors.
    pub noise_factor: f64,
    /// Samples on each side used for the one-sided slope fits.
    pub window: usize,
    /// Absolute floor on the slope jump.
    pub min_slope_jump: f64,
    /// Restrict flags to this time range.
    pub range: Option<(f64, f64)>,
}

impl Default for SuddenChangeOptions {
    fn default() -> Self {
        Self {
            kappa: 20.0,
            noise_factor: 10.0,
            window: 8,
            min_slope_jump: 1e-9,
            range: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuddenChangeReport {
    pub measure: Option<Measure>,
    pub change_times: Vec<f64>,
    pub indices: Vec<usize>,
}

impl SuddenChangeReport {
    pub fn count(&self) -> usize {
        self.change_times.len()
    }
}

/// Least-squares slope and its standard error.
fn fit_slope(t: &[f64], x: &[f64]) -> (f64, f64) {
    let n = t.len() as f64;
    let tm = t.iter().sum::<f64>() / n;
    let xm = x.iter().sum::<f64>() / n;
    let mut stt = 0.0;
    let mut stx = 0.0;
    for (ti, xi) in t.iter().zip(x) {
        stt += (ti - tm) * (ti - tm);
        stx += (ti - tm) * (xi - xm);
    }
    let slope = stx / stt;
    let rss: f64 = t
        .iter()
        .zip(x)
        .map(|(ti, xi)| {
            let r = xi - (xm + slope * (ti - tm));
            r * r
        })
        .sum();
    let se = if n > 2.0 { (rss / (n - 2.0) / stt).sqrt() } else { 0.0 };
    (slope, se)
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Indices and times of slope discontinuities in `x(t)`.
///
/// A sample is a candidate when its second difference exceeds `kappa` times
/// the median absolute second difference, both over the whole series and over
/// its own neighbourhood. It is kept when straight-line fits
/// over `window` samples on either side disagree in slope by more than
/// `noise_factor` times their combined standard error. Candidates closer
/// than one window are merged, keeping the sharpest.
pub fn detect_kinks(t: &[f64], x: &[f64], opts: &SuddenChangeOptions) -> Result<SuddenChangeReport> {
    let n = t.len();
    let w = opts.window.max(2);
    if n != x.len() {
        return Err(Error::Input(format!("{} times but {} values", n, x.len())));
    }
    if n < 5 || n < 2 * w + 1 {
        return Err(Error::Input(format!(
            "series of {n} samples is shorter than the detection window ({} samples)",
            2 * w + 1
        )));
    }
    let dt = (t[n - 1] - t[0]) / (n - 1) as f64;
    if !(dt > 0.0) || t.windows(2).any(|p| ((p[1] - p[0]) - dt).abs() > 1e-6 * dt) {
        return Err(Error::Input("time grid must be uniform and ascending".into()));
    }

    let d2: Vec<f64> = (1..n - 1).map(|i| x[i + 1] - 2.0 * x[i] + x[i - 1]).collect();
    let scale = x.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1e-300);
    let threshold = (opts.kappa * median(d2.iter().map(|v| v.abs()).collect())).max(1e-12 * scale);

    let mut flagged: Vec<(usize, f64)> = Vec::new();
    for i in w..n - w {
        let curvature = d2[i - 1].abs();
        if curvature <= threshold {
            continue;
        }
        // a kink is a localized spike; smooth curvature raises the neighbours too
        let neighbours: Vec<f64> = (i - w..=i + w)
            .filter(|&j| j.abs_diff(i) >= 2 && j >= 1 && j <= n - 2)
            .map(|j| d2[j - 1].abs())
            .collect();
        if curvature <= opts.kappa * median(neighbours) {
            continue;
        }
        if let Some((lo, hi)) = opts.range {
            if t[i] < lo || t[i] > hi {
                continue;
            }
        }
        let (sl, el) = fit_slope(&t[i - w..=i], &x[i - w..=i]);
        let (sr, er) = fit_slope(&t[i..=i + w], &x[i..=i + w]);
        let jump = (sr - sl).abs();
        if jump > opts.noise_factor * (el + er) && jump > opts.min_slope_jump {
            flagged.push((i, curvature));
        }
    }

    let mut kept: Vec<(usize, f64)> = Vec::new();
    for (i, c) in flagged {
        match kept.last_mut() {
            Some(last) if i - last.0 <= w => {
                if c > last.1 {
                    *last = (i, c);
                }
            }
            _ => kept.push((i, c)),
        }
    }

    Ok(SuddenChangeReport {
        measure: None,
        change_times: kept.iter().map(|&(i, _)| t[i]).collect(),
        indices: kept.iter().map(|&(i, _)| i).collect(),
    })
}

pub fn detect_sudden_changes(
    series: &CorrelationSeries,
    measure: Measure,
    opts: &SuddenChangeOptions,
) -> Result<SuddenChangeReport> {
    let mut report = detect_kinks(&series.times(), &series.column(measure), opts)?;
    report.measure = Some(measure);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize, dt: f64) -> Vec<f64> {
        (0..n).map(|i| i as f64 * dt).collect()
    }

    #[test]
    fn linear_ramp_has_no_changes() {
        let t = grid(400, 0.05);
        let x: Vec<f64> = t.iter().map(|v| 0.3 - 0.01 * v).collect();
        let r = detect_kinks(&t, &x, &SuddenChangeOptions::default()).unwrap();
        assert_eq!(r.count(), 0);
    }

    #[test]
    fn constant_then_linear_has_one_change() {
        let t = grid(401, 0.05);
        let x: Vec<f64> = t.iter().map(|&v| if v < 10.0 { 0.7 } else { 0.7 - 0.02 * (v - 10.0) }).collect();
        let r = detect_kinks(&t, &x, &SuddenChangeOptions::default()).unwrap();
        assert_eq!(r.count(), 1);
        assert!((r.change_times[0] - 10.0).abs() < 0.051);
    }

    #[test]
    fn smooth_exponential_has_no_changes() {
        let t = grid(800, 0.05);
        let x: Vec<f64> = t.iter().map(|v| (-0.2 * v).exp()).collect();
        let r = detect_kinks(&t, &x, &SuddenChangeOptions::default()).unwrap();
        assert_eq!(r.count(), 0);
    }

    #[test]
    fn short_series_is_rejected() {
        let t = grid(4, 0.1);
        assert!(matches!(
            detect_kinks(&t, &[0.0; 4], &SuddenChangeOptions::default()),
            Err(Error::Input(_))
        ));
    }
}
