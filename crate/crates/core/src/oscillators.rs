//! Planar oscillator definitions: Rayleigh, Van der Pol and polynomial
//! Liénard systems `ÿ + ε f(y, ẏ) + g(y) = 0` written as first-order
//! systems in the phase plane `(y, z = ẏ)`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OscillatorError {
    #[error("nonlinearity must be a positive finite number, got {0}")]
    InvalidEpsilon(f64),
    #[error("phase point ({y}, {z}) at t = {t} is not finite")]
    NonFinite { y: f64, z: f64, t: f64 },
    #[error("the Rayleigh/Van der Pol link needs a Rayleigh system")]
    NotRayleigh,
    #[error("finite-difference step {0} is outside [1e-6, 1e-1]")]
    BadStep(f64),
    #[error("finite-difference window is not evenly spaced in time")]
    UnevenWindow,
}

/// One monomial `coeff · yᵖ · zᵠ` of a Liénard damping term.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DampingTerm {
    pub coeff: f64,
    #[serde(default)]
    pub y_pow: u32,
    #[serde(default)]
    pub z_pow: u32,
}

/// Polynomial Liénard system `ÿ + ε f(y, ẏ) + g(y) = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LienardForm {
    /// Terms of the damping function `f(y, z)`.
    #[serde(default)]
    pub damping: Vec<DampingTerm>,
    /// Coefficients of the restoring force `g(y) = Σ cᵢ yⁱ`, lowest degree first.
    pub restoring: Vec<f64>,
}

impl LienardForm {
    /// Undamped unit-frequency oscillator `ÿ + y = 0`.
    pub fn harmonic() -> Self {
        Self {
            damping: Vec::new(),
            restoring: vec![0.0, 1.0],
        }
    }

    fn damping_at(&self, y: f64, z: f64) -> f64 {
        self.damping
            .iter()
            .map(|t| t.coeff * y.powi(t.y_pow as i32) * z.powi(t.z_pow as i32))
            .sum()
    }

    fn damping_grad(&self, y: f64, z: f64) -> (f64, f64) {
        self.damping.iter().fold((0.0, 0.0), |(dy, dz), t| {
            let (p, q) = (t.y_pow as i32, t.z_pow as i32);
            let gy = if p > 0 {
                t.coeff * f64::from(p) * y.powi(p - 1) * z.powi(q)
            } else {
                0.0
            };
            let gz = if q > 0 {
                t.coeff * f64::from(q) * y.powi(p) * z.powi(q - 1)
            } else {
                0.0
            };
            (dy + gy, dz + gz)
        })
    }

    fn restoring_at(&self, y: f64) -> f64 {
        self.restoring.iter().rev().fold(0.0, |acc, c| acc * y + c)
    }

    fn restoring_slope(&self, y: f64) -> f64 {
        self.restoring
            .iter()
            .enumerate()
            .skip(1)
            .rev()
            .fold(0.0, |acc, (i, c)| acc * y + c * i as f64)
    }

    fn is_odd(&self) -> bool {
        self.damping.iter().all(|t| (t.y_pow + t.z_pow) % 2 == 1)
            && self
                .restoring
                .iter()
                .enumerate()
                .all(|(i, c)| i % 2 == 1 || *c == 0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum SystemKind {
    /// `ÿ + ε(ẏ³/3 − ẏ) + y = 0`
    Rayleigh,
    /// `ẍ + ε ẋ(x² − 1) + x = 0`
    #[serde(alias = "vdp")]
    VanDerPol,
    Lienard(LienardForm),
}

impl SystemKind {
    pub fn name(&self) -> &'static str {
        match self {
            SystemKind::Rayleigh => "rayleigh",
            SystemKind::VanDerPol => "vdp",
            SystemKind::Lienard(_) => "lienard",
        }
    }
}

/// A system together with its nonlinearity `ε > 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpec")]
pub struct OscillatorSpec {
    #[serde(flatten)]
    kind: SystemKind,
    epsilon: f64,
}

#[derive(Deserialize)]
struct RawSpec {
    #[serde(flatten)]
    kind: SystemKind,
    epsilon: f64,
}

impl TryFrom<RawSpec> for OscillatorSpec {
    type Error = OscillatorError;
    fn try_from(raw: RawSpec) -> Result<Self, Self::Error> {
        Self::new(raw.kind, raw.epsilon)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub t: f64,
    pub y: f64,
    pub z: f64,
}

impl PhasePoint {
    pub fn new(t: f64, y: f64, z: f64) -> Self {
        Self { t, y, z }
    }

    pub fn is_finite(&self) -> bool {
        self.t.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

impl OscillatorSpec {
    pub fn new(kind: SystemKind, epsilon: f64) -> Result<Self, OscillatorError> {
        if !(epsilon.is_finite() && epsilon > 0.0) {
            return Err(OscillatorError::InvalidEpsilon(epsilon));
        }
        Ok(Self { kind, epsilon })
    }

    pub fn rayleigh(epsilon: f64) -> Result<Self, OscillatorError> {
        Self::new(SystemKind::Rayleigh, epsilon)
    }

    pub fn van_der_pol(epsilon: f64) -> Result<Self, OscillatorError> {
        Self::new(SystemKind::VanDerPol, epsilon)
    }

    pub fn kind(&self) -> &SystemKind {
        &self.kind
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Phase-plane vector field without input validation.
    #[inline]
    pub fn field(&self, y: f64, z: f64) -> [f64; 2] {
        let eps = self.epsilon;
        let dz = match &self.kind {
            SystemKind::Rayleigh => -eps * (z * z * z / 3.0 - z) - y,
            SystemKind::VanDerPol => -eps * z * (y * y - 1.0) - y,
            SystemKind::Lienard(form) => -eps * form.damping_at(y, z) - form.restoring_at(y),
        };
        [z, dz]
    }

    /// `(ẏ, ż)` at `p`.
    pub fn rhs(&self, p: PhasePoint) -> Result<(f64, f64), OscillatorError> {
        if !p.is_finite() {
            return Err(OscillatorError::NonFinite {
                y: p.y,
                z: p.z,
                t: p.t,
            });
        }
        let [dy, dz] = self.field(p.y, p.z);
        Ok((dy, dz))
    }

    /// Jacobian `∂(ẏ, ż)/∂(y, z)` in row-major order.
    pub fn jacobian(&self, y: f64, z: f64) -> [[f64; 2]; 2] {
        let eps = self.epsilon;
        let (dfy, dfz) = match &self.kind {
            SystemKind::Rayleigh => (-1.0, -eps * (z * z - 1.0)),
            SystemKind::VanDerPol => (-2.0 * eps * y * z - 1.0, -eps * (y * y - 1.0)),
            SystemKind::Lienard(form) => {
                let (gy, gz) = form.damping_grad(y, z);
                (-eps * gy - form.restoring_slope(y), -eps * gz)
            }
        };
        [[0.0, 1.0], [dfy, dfz]]
    }

    /// Whether the vector field is odd under `(y, z) → (−y, −z)`.
    pub fn is_odd_symmetric(&self) -> bool {
        match &self.kind {
            SystemKind::Rayleigh | SystemKind::VanDerPol => true,
            SystemKind::Lienard(form) => form.is_odd(),
        }
    }
}

/// Residual of the Van der Pol equation evaluated on `x = ẏ` along three
/// evenly spaced samples of a Rayleigh trajectory.
///
/// `ẍ` comes from a central second difference of the samples' `z`, `ẋ`
/// from the central first difference. On an exact Rayleigh solution the
/// residual vanishes up to finite-difference error; for arbitrary points it
/// does not.
pub fn rayleigh_vdp_link(
    spec: &OscillatorSpec,
    window: [PhasePoint; 3],
) -> Result<f64, OscillatorError> {
    if spec.kind != SystemKind::Rayleigh {
        return Err(OscillatorError::NotRayleigh);
    }
    for p in &window {
        if !p.is_finite() {
            return Err(OscillatorError::NonFinite {
                y: p.y,
                z: p.z,
                t: p.t,
            });
        }
    }
    let [prev, mid, next] = window;
    let step = mid.t - prev.t;
    if !(1e-6..=1e-1).contains(&step) {
        return Err(OscillatorError::BadStep(step));
    }
    if ((next.t - mid.t) - step).abs() > 1e-9 * step.max(1.0) {
        return Err(OscillatorError::UnevenWindow);
    }
    let x = mid.z;
    let x_dot = (next.z - prev.z) / (2.0 * step);
    let x_ddot = (next.z - 2.0 * mid.z + prev.z) / (step * step);
    Ok(x_ddot + spec.epsilon * x_dot * (x * x - 1.0) + x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn at(y: f64, z: f64) -> PhasePoint {
        PhasePoint::new(0.0, y, z)
    }

    #[test]
    fn rhs_examples() {
        let r = OscillatorSpec::rayleigh(1.0).unwrap();
        assert_eq!(r.rhs(at(0.0, 0.0)).unwrap(), (0.0, 0.0));
        let (dy, dz) = r.rhs(at(0.0, 1.0)).unwrap();
        assert_eq!(dy, 1.0);
        assert!((dz - 2.0 / 3.0).abs() < 1e-15);

        let v = OscillatorSpec::van_der_pol(1.0).unwrap();
        assert_eq!(v.rhs(at(2.0, 0.0)).unwrap(), (0.0, -2.0));
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(OscillatorSpec::rayleigh(0.0).is_err());
        assert!(OscillatorSpec::rayleigh(-1.0).is_err());
        assert!(OscillatorSpec::van_der_pol(f64::NAN).is_err());
        let r = OscillatorSpec::rayleigh(1.0).unwrap();
        assert!(matches!(
            r.rhs(at(f64::INFINITY, 0.0)),
            Err(OscillatorError::NonFinite { .. })
        ));
    }

    #[test]
    fn odd_symmetry_is_exact() {
        for spec in [
            OscillatorSpec::rayleigh(2.7).unwrap(),
            OscillatorSpec::van_der_pol(0.3).unwrap(),
        ] {
            assert!(spec.is_odd_symmetric());
            for &(y, z) in &[(0.3, -1.2), (2.5, 0.7), (-4.0, 3.3)] {
                let a = spec.field(y, z);
                let b = spec.field(-y, -z);
                assert_eq!(a[0], -b[0]);
                assert_eq!(a[1], -b[1]);
            }
        }
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let lien = SystemKind::Lienard(LienardForm {
            damping: vec![
                DampingTerm { coeff: 1.0, y_pow: 2, z_pow: 1 },
                DampingTerm { coeff: -1.0, y_pow: 0, z_pow: 1 },
            ],
            restoring: vec![0.0, 1.0, 0.0, 0.2],
        });
        for spec in [
            OscillatorSpec::rayleigh(1.3).unwrap(),
            OscillatorSpec::van_der_pol(0.8).unwrap(),
            OscillatorSpec::new(lien, 0.5).unwrap(),
        ] {
            let (y, z) = (0.7, -1.1);
            let j = spec.jacobian(y, z);
            let h = 1e-6;
            for (col, (dy, dz)) in [(h, 0.0), (0.0, h)].into_iter().enumerate() {
                let fp = spec.field(y + dy, z + dz);
                let fm = spec.field(y - dy, z - dz);
                for row in 0..2 {
                    let fd = (fp[row] - fm[row]) / (2.0 * h);
                    assert!((fd - j[row][col]).abs() < 1e-7, "{spec:?} {row} {col}");
                }
            }
        }
    }

    #[test]
    fn lienard_reproduces_van_der_pol() {
        let form = LienardForm {
            damping: vec![
                DampingTerm { coeff: 1.0, y_pow: 2, z_pow: 1 },
                DampingTerm { coeff: -1.0, y_pow: 0, z_pow: 1 },
            ],
            restoring: vec![0.0, 1.0],
        };
        let l = OscillatorSpec::new(SystemKind::Lienard(form), 1.7).unwrap();
        let v = OscillatorSpec::van_der_pol(1.7).unwrap();
        assert!(l.is_odd_symmetric());
        let (a, b) = (l.field(1.2, -0.4), v.field(1.2, -0.4));
        assert!((a[1] - b[1]).abs() < 1e-14);
    }

    #[test]
    fn link_is_zero_at_equilibrium_and_nonzero_off_trajectory() {
        let r = OscillatorSpec::rayleigh(1.0).unwrap();
        let eq = [
            PhasePoint::new(0.0, 0.0, 0.0),
            PhasePoint::new(1e-4, 0.0, 0.0),
            PhasePoint::new(2e-4, 0.0, 0.0),
        ];
        assert_eq!(rayleigh_vdp_link(&r, eq).unwrap(), 0.0);

        let junk = [
            PhasePoint::new(0.0, 0.3, 1.0),
            PhasePoint::new(1e-2, -0.5, 0.2),
            PhasePoint::new(2e-2, 1.1, -0.7),
        ];
        assert!(rayleigh_vdp_link(&r, junk).unwrap().abs() > 1.0);
    }

    #[test]
    fn link_flags_bad_windows() {
        let r = OscillatorSpec::rayleigh(1.0).unwrap();
        let tiny = [
            PhasePoint::new(0.0, 0.0, 0.0),
            PhasePoint::new(1e-9, 0.0, 0.0),
            PhasePoint::new(2e-9, 0.0, 0.0),
        ];
        assert!(matches!(rayleigh_vdp_link(&r, tiny), Err(OscillatorError::BadStep(_))));
        let uneven = [
            PhasePoint::new(0.0, 0.0, 0.0),
            PhasePoint::new(1e-3, 0.0, 0.0),
            PhasePoint::new(3e-3, 0.0, 0.0),
        ];
        assert_eq!(rayleigh_vdp_link(&r, uneven), Err(OscillatorError::UnevenWindow));
        let v = OscillatorSpec::van_der_pol(1.0).unwrap();
        assert_eq!(rayleigh_vdp_link(&v, uneven), Err(OscillatorError::NotRayleigh));
    }

    #[test]
    fn spec_round_trips_through_toml() {
        let spec = OscillatorSpec::van_der_pol(2.5).unwrap();
        let text = toml::to_string(&spec).unwrap();
        let back: OscillatorSpec = toml::from_str(&text).unwrap();
        assert_eq!(back, spec);
        let harmonic = OscillatorSpec::new(SystemKind::Lienard(LienardForm::harmonic()), 1.0).unwrap();
        let text = toml::to_string(&harmonic).unwrap();
        assert_eq!(toml::from_str::<OscillatorSpec>(&text).unwrap(), harmonic);
        assert!(toml::from_str::<OscillatorSpec>("kind = \"rayleigh\"\nepsilon = -1.0").is_err());
    }
}
