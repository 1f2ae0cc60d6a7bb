//! Amplitude-versus-ε curves produced by the different methods.

use std::fmt;

use serde::{Deserialize, Serialize};

/// Which route produced a curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveMethod {
    Exact,
    Ham,
    Rg,
    Irgm,
    Fit,
    /// HAM control parameter `h(ε)`.
    HHam,
    /// Nonlinear-time control parameter `h_RG(ε)`.
    HRg,
}

impl CurveMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            CurveMethod::Exact => "exact",
            CurveMethod::Ham => "ham",
            CurveMethod::Rg => "rg",
            CurveMethod::Irgm => "irgm",
            CurveMethod::Fit => "fit",
            CurveMethod::HHam => "h_ham",
            CurveMethod::HRg => "h_rg",
        }
    }
}

impl fmt::Display for CurveMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// `(ε, value)` samples sorted by ε.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeCurve {
    pub method: CurveMethod,
    points: Vec<(f64, f64)>,
}

impl AmplitudeCurve {
    pub fn new(method: CurveMethod, mut points: Vec<(f64, f64)>) -> Self {
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        Self { method, points }
    }

    pub fn from_fn(method: CurveMethod, grid: &[f64], f: impl Fn(f64) -> f64) -> Self {
        Self::new(method, grid.iter().map(|&e| (e, f(e))).collect())
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Sample with the largest value.
    pub fn argmax(&self) -> Option<(f64, f64)> {
        self.points
            .iter()
            .copied()
            .max_by(|a, b| a.1.total_cmp(&b.1))
    }

    /// Value at exactly `eps`, if sampled there.
    pub fn value_at(&self, eps: f64) -> Option<f64> {
        self.points
            .iter()
            .find(|(e, _)| (*e - eps).abs() <= 1e-12 * eps.abs().max(1.0))
            .map(|p| p.1)
    }
}

/// `|approx − exact| / exact × 100`.
pub fn relative_error_percent(approx: f64, exact: f64) -> f64 {
    ((approx - exact) / exact).abs() * 100.0
}

/// ε grid `start, start + step, …` up to and including `end` (within 1e-9).
pub fn linear_grid(start: f64, end: f64, step: f64) -> Vec<f64> {
    let n = ((end - start) / step + 1e-9).floor() as usize;
    (0..=n)
        .map(|i| {
            let v = start + i as f64 * step;
            // strip accumulated binary noise so grids print cleanly
            (v * 1e9).round() / 1e9
        })
        .collect()
}
