//! Truncated renormalization-group flow for the amplitude and phase.
//!
//! The same flow serves both Rayleigh and Van der Pol.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::integrator::dopri::{Dopri5, Tolerances};
use crate::roots::{brent, RootError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RgError {
    #[error("epsilon must be positive and finite, got {0}")]
    InvalidEpsilon(f64),
    #[error("amplitude must be positive and finite, got {0}")]
    InvalidAmplitude(f64),
    #[error("no attracting root of the amplitude flow in (0, 4] for epsilon = {0}")]
    NoRoot(f64),
    #[error("root refinement failed: {0}")]
    Root(#[from] RootError),
    #[error("flow integration did not settle by t = {t} (R = {r})")]
    FlowNotSettled { t: f64, r: f64 },
    #[error("flow integration failed at t = {0}")]
    FlowFailed(f64),
}

/// Renormalized amplitude and phase.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RgState {
    pub r: f64,
    pub theta: f64,
}

impl RgState {
    pub fn new(r: f64, theta: f64) -> Result<Self, RgError> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(RgError::InvalidAmplitude(r));
        }
        Ok(Self { r, theta })
    }

    /// `(dR/dt, dθ/dt)` at this state.
    pub fn rates(&self, eps: f64) -> (f64, f64) {
        (rg_amp_rate(self.r, eps), rg_phase_rate(self.r, eps))
    }
}

/// `dR/dt = ½R(1 − R²/4)ε + (1/1024)R⁵(11 − 13R²/8)ε³`.
pub fn rg_amp_rate(r: f64, eps: f64) -> f64 {
    let r2 = r * r;
    0.5 * r * (1.0 - r2 / 4.0) * eps + r2 * r2 * r * (11.0 - 13.0 * r2 / 8.0) * eps.powi(3) / 1024.0
}

/// `dθ/dt = −(1/8)(1 − R⁴/32)ε²`.
pub fn rg_phase_rate(r: f64, eps: f64) -> f64 {
    -(1.0 - r.powi(4) / 32.0) * eps * eps / 8.0
}

const SCAN_STEP: f64 = 1e-3;
const R_MAX: f64 = 4.0;

/// Limit of the amplitude flow started at `R = 2`.
///
/// The rate is positive at `R = 2` for every ε > 0, so the flow moves up to
/// the first downward sign change above 2.
pub fn a_rg(eps: f64) -> Result<f64, RgError> {
    check_eps(eps)?;
    let f = |r: f64| rg_amp_rate(r, eps);
    let mut lo = 2.0;
    let mut flo = f(lo);
    if flo == 0.0 {
        return Ok(lo);
    }
    while lo < R_MAX {
        let hi = (lo + SCAN_STEP).min(R_MAX);
        let fhi = f(hi);
        if flo > 0.0 && fhi <= 0.0 {
            return Ok(brent(f, lo, hi, 1e-14)?);
        }
        lo = hi;
        flo = fhi;
    }
    Err(RgError::NoRoot(eps))
}

/// Integrates the amplitude flow from `r0` until the rate is negligible.
pub fn flow_limit(r0: f64, eps: f64) -> Result<f64, RgError> {
    check_eps(eps)?;
    if !(r0 > 0.0 && r0.is_finite()) {
        return Err(RgError::InvalidAmplitude(r0));
    }
    let rhs = |_t: f64, y: &[f64; 1]| [rg_amp_rate(y[0], eps)];
    let tol = Tolerances {
        rel: 1e-12,
        abs: 1e-14,
        max_step: 10.0 / eps,
    };
    let mut solver = Dopri5::new(&rhs, 0.0, [r0], tol);
    let t_end = 1e4 / eps;
    while solver.t() < t_end {
        let step = solver
            .step(&rhs, t_end)
            .map_err(|_| RgError::FlowFailed(solver.t()))?;
        let r = step.y1[0];
        if !(r.is_finite() && r > 0.0) {
            return Err(RgError::FlowFailed(step.t1()));
        }
        if rg_amp_rate(r, eps).abs() < 1e-11 * eps {
            return Ok(r);
        }
    }
    Err(RgError::FlowNotSettled {
        t: solver.t(),
        r: solver.y()[0],
    })
}

/// Second-order renormalized solution
/// `R cos(t+θ) + (ε/96)R³(sin 3(t+θ) − sin(t+θ))`.
pub fn renormalized_solution(r: f64, theta: f64, t: f64, eps: f64) -> f64 {
    let ph = t + theta;
    r * ph.cos() + eps / 96.0 * r.powi(3) * ((3.0 * ph).sin() - ph.sin())
}

fn check_eps(eps: f64) -> Result<(), RgError> {
    if eps > 0.0 && eps.is_finite() {
        Ok(())
    } else {
        Err(RgError::InvalidEpsilon(eps))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rate_values() {
        assert_eq!(rg_amp_rate(0.0, 3.0), 0.0);
        assert!((rg_amp_rate(2.0, 1.0) - 0.140625).abs() < 1e-15);
        assert!(rg_amp_rate(2.0, 1e-6).abs() < 1e-18);
        assert!(rg_phase_rate(32f64.powf(0.25), 2.0).abs() < 1e-15);
        assert!((rg_phase_rate(2.0, 1.0) + 1.0 / 16.0).abs() < 1e-15);
        assert_eq!(rg_phase_rate(1.5, 0.0), 0.0);
    }

    #[test]
    fn asymptotic_amplitude() {
        assert!((a_rg(1e-4).unwrap() - 2.0).abs() < 1e-6);
        let a1 = a_rg(1.0).unwrap();
        assert!((a1 - 2.141).abs() < 1e-3, "{a1}");
        assert!(rg_amp_rate(a1, 1.0).abs() < 1e-12);
        let a5 = a_rg(5.0).unwrap();
        assert!((a5 - 2.56).abs() < 0.01, "{a5}");
    }

    #[test]
    fn root_agrees_with_flow() {
        for eps in [0.3, 1.0, 2.0, 5.0] {
            let root = a_rg(eps).unwrap();
            let flow = flow_limit(2.0, eps).unwrap();
            assert!((root - flow).abs() < 1e-8, "eps={eps}: {root} vs {flow}");
        }
    }

    #[test]
    fn renormalized_values() {
        use std::f64::consts::FRAC_PI_2;
        assert!((renormalized_solution(1.7, 0.3, 0.9, 0.0) - 1.7 * 1.2f64.cos()).abs() < 1e-15);
        assert_eq!(renormalized_solution(2.5, -0.4, 0.4, 0.7), 2.5);
        let v = renormalized_solution(2.0, 0.0, FRAC_PI_2, 0.1);
        assert!((v + 0.1 / 96.0 * 16.0).abs() < 1e-15);
    }

    #[test]
    fn bad_inputs() {
        assert_eq!(a_rg(0.0), Err(RgError::InvalidEpsilon(0.0)));
        assert!(RgState::new(-1.0, 0.0).is_err());
        assert!(flow_limit(0.0, 1.0).is_err());
    }
}
