//! Improved RG (nonlinear time) closed forms.
//!
//! The amplitude relation is `ln(a² − 4) − 2 ln a = −ε^h − C`, which inverts
//! to `a = 2 / sqrt(1 − exp(−ε^h − C))`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::curve::{AmplitudeCurve, CurveMethod};
use crate::oscillators::SystemKind;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IrgmError {
    #[error("boundary amplitude must exceed 2, got {0}")]
    AmplitudeTooSmall(f64),
    #[error("calibration needs the reference epsilon 1, got {0}")]
    ReferenceEpsilon(f64),
    #[error("epsilon must be positive and finite, got {0}")]
    InvalidEpsilon(f64),
    #[error("epsilon = 1 makes the control parameter singular")]
    SingularEpsilon,
    #[error("ln(a²/(a²−4)) − C = {0} is not positive")]
    NonPositiveInner(f64),
    #[error("exp(−ε^h − C) = {0} leaves no real amplitude above 2")]
    NoRealAmplitude(f64),
    #[error("epsilon {0} is outside the fit domain (0, 50]")]
    OutOfFitDomain(f64),
    #[error("unknown preset `{0}` (expected rayleigh, vdp-paper or vdp-consistent)")]
    UnknownPreset(String),
}

/// Boundary amplitudes at ε = 1 from the exact integration.
pub const RAYLEIGH_BOUNDARY: f64 = 2.17271;
pub const VDP_BOUNDARY: f64 = 2.0086;

/// Tabulated integration constants.
pub const RAYLEIGH_C: f64 = 0.87953;
pub const VDP_TABULATED_C: f64 = 4.08785;

/// Upper end of the fit domain.
pub const FIT_MAX_EPS: f64 = 50.0;

/// Integration constant pinned by a boundary amplitude.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IrgmCalibration {
    pub system: SystemKind,
    pub c: f64,
    pub eps_ref: f64,
    pub a_ref: f64,
}

impl IrgmCalibration {
    pub fn from_boundary(system: SystemKind, a_ref: f64) -> Result<Self, IrgmError> {
        Ok(Self {
            system,
            c: calibrate_constant(a_ref, 1.0)?,
            eps_ref: 1.0,
            a_ref,
        })
    }

    pub fn amplitude(&self, eps: f64, h_rg: f64) -> Result<f64, IrgmError> {
        amplitude_irgm(eps, h_rg, self.c)
    }
}

/// Named integration constants selectable from the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IrgmPreset {
    Rayleigh,
    VdpPaper,
    VdpConsistent,
}

impl IrgmPreset {
    pub const ALL: [IrgmPreset; 3] = [
        IrgmPreset::Rayleigh,
        IrgmPreset::VdpPaper,
        IrgmPreset::VdpConsistent,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            IrgmPreset::Rayleigh => "rayleigh",
            IrgmPreset::VdpPaper => "vdp-paper",
            IrgmPreset::VdpConsistent => "vdp-consistent",
        }
    }

    pub fn constant(&self) -> f64 {
        match self {
            IrgmPreset::Rayleigh => RAYLEIGH_C,
            IrgmPreset::VdpPaper => VDP_TABULATED_C,
            IrgmPreset::VdpConsistent => {
                calibrate_constant(VDP_BOUNDARY, 1.0).expect("boundary amplitude exceeds 2")
            }
        }
    }

    pub fn system(&self) -> SystemKind {
        match self {
            IrgmPreset::Rayleigh => SystemKind::Rayleigh,
            _ => SystemKind::VanDerPol,
        }
    }

    /// Default preset for a system.
    pub fn for_system(kind: &SystemKind) -> Self {
        match kind {
            SystemKind::VanDerPol => IrgmPreset::VdpConsistent,
            _ => IrgmPreset::Rayleigh,
        }
    }
}

impl fmt::Display for IrgmPreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for IrgmPreset {
    type Err = IrgmError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| IrgmError::UnknownPreset(s.to_string()))
    }
}

/// `C = ln(a²/(a²−4)) − 1`, valid at the reference ε = 1 only.
pub fn calibrate_constant(a_ref: f64, eps_ref: f64) -> Result<f64, IrgmError> {
    if eps_ref != 1.0 {
        return Err(IrgmError::ReferenceEpsilon(eps_ref));
    }
    Ok(log_ratio(a_ref)? - 1.0)
}

pub fn amplitude_irgm(eps: f64, h_rg: f64, c: f64) -> Result<f64, IrgmError> {
    check_eps(eps)?;
    let x = (-eps.powf(h_rg) - c).exp();
    if !(x < 1.0) {
        return Err(IrgmError::NoRealAmplitude(x));
    }
    Ok(2.0 / (-x).ln_1p().exp().sqrt())
}

/// `h = ln(ln(a²/(a²−4)) − C) / ln ε`.
pub fn invert_h(a_target: f64, eps: f64, c: f64) -> Result<f64, IrgmError> {
    check_eps(eps)?;
    if eps == 1.0 {
        return Err(IrgmError::SingularEpsilon);
    }
    let inner = log_ratio(a_target)? - c;
    if !(inner > 0.0) {
        return Err(IrgmError::NonPositiveInner(inner));
    }
    Ok(inner.ln() / eps.ln())
}

/// `h = ln|ln(a²/(a²−4)) − C| / ln ε`, the form used for the control
/// parameter curves. Unlike [`invert_h`] it is defined when the inner
/// argument is negative, but then it no longer inverts [`amplitude_irgm`].
pub fn h_rg_abs(a_target: f64, eps: f64, c: f64) -> Result<f64, IrgmError> {
    check_eps(eps)?;
    if eps == 1.0 {
        return Err(IrgmError::SingularEpsilon);
    }
    let inner = log_ratio(a_target)? - c;
    if inner == 0.0 {
        return Err(IrgmError::NonPositiveInner(inner));
    }
    Ok(inner.abs().ln() / eps.ln())
}

/// Control parameter curve `h_RG(ε)` for amplitudes `target(ε)`, using
/// [`h_rg_abs`]. Points where it is undefined (ε = 1, target ≤ 2) are
/// skipped.
pub fn h_rg_curve(grid: &[f64], c: f64, target: impl Fn(f64) -> Option<f64>) -> AmplitudeCurve {
    let points = grid
        .iter()
        .filter_map(|&e| {
            let a = target(e)?;
            h_rg_abs(a, e, c).ok().map(|h| (e, h))
        })
        .collect();
    AmplitudeCurve::new(CurveMethod::HRg, points)
}

/// Piecewise smooth fit of the VdP amplitude on (0, 50].
pub fn vdp_fit(eps: f64) -> Result<f64, IrgmError> {
    if !(eps > 0.0 && eps <= FIT_MAX_EPS) {
        return Err(IrgmError::OutOfFitDomain(eps));
    }
    Ok(if eps < 3.0 { fit_low(eps) } else { fit_high(eps) })
}

fn fit_low(e: f64) -> f64 {
    1.998 + 0.015 / (8.121 * (-2.139 * e).exp() + 0.512 * (0.043 * e).exp())
}

fn fit_high(e: f64) -> f64 {
    2.0025 + 0.031 / (0.5 * (-2.033 * (e - 2.183)).exp() + 1.869 * (0.087 * (e - 6.376)).exp())
}

/// `(left, right, |right − left|)` of the two fit branches at ε = 3.
pub fn vdp_fit_jump() -> (f64, f64, f64) {
    let (l, r) = (fit_low(3.0), fit_high(3.0));
    (l, r, (r - l).abs())
}

/// Solution of `da/dτ = ½a(1 − a²/4)` with `a(0) = a0`.
pub fn amplitude_flow(tau: f64, a0: f64) -> f64 {
    let e = (-tau).exp();
    a0 / (e + a0 * a0 / 4.0 * (1.0 - e)).sqrt()
}

/// `dψ/dτ = −(1/8)(1 − a⁴/32)`.
pub fn phase_rate(a: f64) -> f64 {
    -(1.0 - a.powi(4) / 32.0) / 8.0
}

fn log_ratio(a: f64) -> Result<f64, IrgmError> {
    if !(a > 2.0 && a.is_finite()) {
        return Err(IrgmError::AmplitudeTooSmall(a));
    }
    let a2 = a * a;
    Ok((a2 / (a2 - 4.0)).ln())
}

fn check_eps(eps: f64) -> Result<(), IrgmError> {
    if eps > 0.0 && eps.is_finite() {
        Ok(())
    } else {
        Err(IrgmError::InvalidEpsilon(eps))
    }
}
