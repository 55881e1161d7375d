use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::numerics::fit_line;

/// Minimum samples inside the fit window.
pub const MIN_FIT_SAMPLES: usize = 8;

/// A positive quantity sampled over time, with its fitted power-law
/// exponent once [`decay_exponent_fit`] has run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecaySeries {
    pub label: String,
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub fit_window: (f64, f64),
    pub fitted_exponent: Option<f64>,
    pub fit_stderr: Option<f64>,
    pub target: Option<f64>,
    /// Largest quadrature shell fraction seen over the samples.
    pub shell_fraction: f64,
}

impl DecaySeries {
    pub fn new(label: impl Into<String>, times: Vec<f64>, values: Vec<f64>, fit_window: (f64, f64)) -> Self {
        Self {
            label: label.into(),
            times,
            values,
            fit_window,
            fitted_exponent: None,
            fit_stderr: None,
            target: None,
            shell_fraction: 0.0,
        }
    }

    pub fn with_target(mut self, target: f64) -> Self {
        self.target = Some(target);
        self
    }

    pub fn abs_error(&self) -> Option<f64> {
        Some((self.fitted_exponent? - self.target?).abs())
    }

    pub fn truncated(&self) -> bool {
        self.shell_fraction > super::quadrature::TRUNCATION_LIMIT
    }

    fn window(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        let (lo, hi) = self.fit_window;
        self.times
            .iter()
            .zip(&self.values)
            .map(|(&t, &v)| (t, v))
            .filter(move |&(t, _)| t >= lo && t <= hi)
    }
}

/// Least-squares slope of `ln v` against `ln t` over the fit window.
pub fn decay_exponent_fit(mut series: DecaySeries) -> Result<DecaySeries> {
    if series.times.len() != series.values.len() {
        return Err(invalid("series", "times and values differ in length"));
    }
    if series.times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(invalid("series", "times must be strictly increasing"));
    }
    if let Some((t, v)) = series
        .times
        .iter()
        .zip(&series.values)
        .find(|(_, v)| !(**v > 0.0 && v.is_finite()))
    {
        return Err(Error::NonPositiveValue { time: *t, value: *v });
    }
    let (x, y): (Vec<f64>, Vec<f64>) = series.window().map(|(t, v)| (t.ln(), v.ln())).unzip();
    if x.len() < MIN_FIT_SAMPLES {
        return Err(Error::InsufficientSamples {
            needed: MIN_FIT_SAMPLES,
            found: x.len(),
        });
    }
    let fit = fit_line(&x, &y);
    series.fitted_exponent = Some(fit.slope);
    series.fit_stderr = Some(fit.slope_stderr);
    Ok(series)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::log_space;

    fn fitted(f: impl Fn(f64) -> f64, lo: f64, hi: f64, n: usize) -> DecaySeries {
        let t = log_space(lo, hi, n);
        let v = t.iter().map(|&t| f(t)).collect();
        decay_exponent_fit(DecaySeries::new("s", t, v, (lo, hi))).unwrap()
    }

    #[test]
    fn exact_power_law() {
        let s = fitted(|t| 1.0 / t, 10.0, 1000.0, 41);
        assert!((s.fitted_exponent.unwrap() + 1.0).abs() < 1e-3);
        assert!(s.fit_stderr.unwrap() < 1e-3);
    }

    #[test]
    fn shifted_power_law() {
        let s = fitted(|t| 5.0 * (1.0 + t).powf(-0.75), 10.0, 1000.0, 81);
        assert!((s.fitted_exponent.unwrap() + 0.75).abs() < 0.02);
    }

    #[test]
    fn constant_series() {
        let s = fitted(|_| 3.0, 10.0, 1000.0, 20);
        assert!(s.fitted_exponent.unwrap().abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_series() {
        let t = log_space(1.0, 100.0, 20);
        let mut v = vec![1.0; 20];
        v[3] = 0.0;
        assert!(matches!(
            decay_exponent_fit(DecaySeries::new("s", t.clone(), v, (1.0, 100.0))),
            Err(Error::NonPositiveValue { .. })
        ));
        assert!(matches!(
            decay_exponent_fit(DecaySeries::new("s", t, vec![1.0; 20], (50.0, 60.0))),
            Err(Error::InsufficientSamples { needed: 8, .. })
        ));
    }
}
