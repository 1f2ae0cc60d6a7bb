//! Adaptive integration of the oscillators and extraction of their limit
//! cycles.
//!
//! The limit cycle is located with the Poincaré section `z = 0`: every
//! downward crossing (`z` going from positive to negative) marks a maximum
//! of `y`, so the crossing values are the per-cycle amplitudes. Crossings
//! are located on the dense-output polynomial, which makes the amplitude
//! independent of how densely the trajectory is sampled.

pub mod dopri;

use std::io::{self, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::curve::{AmplitudeCurve, CurveMethod};
use crate::format::sig12;
use crate::oscillators::{OscillatorError, OscillatorSpec, PhasePoint, SystemKind};
use crate::roots::brent;
use dopri::{DenseStep, Dopri5, StepFailure, Tolerances};

/// Seed used by [`limit_cycle`]: close to the small-ε cycle.
pub const DEFAULT_SEED: (f64, f64) = (2.0, 0.0);

/// Phase-plane spacing of the interpolated samples written per step.
const SAMPLE_SPACING: f64 = 0.01;
const MAX_SUBDIVISIONS: usize = 64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IntegratorError {
    #[error("invalid integrator configuration: {0}")]
    InvalidConfig(String),
    #[error("end time {t_end} is not after start time {t_start}")]
    InvalidInterval { t_start: f64, t_end: f64 },
    #[error("step size underflow at t = {t} (h = {h:e})")]
    StepUnderflow { t: f64, h: f64 },
    #[error("state became non-finite near t = {t}")]
    NonFinite { t: f64 },
    #[error("no limit-cycle convergence within {cycles} cycles (last amplitude change {last_change:e})")]
    NoConvergence { cycles: usize, last_change: f64 },
    #[error("Poincaré section z = 0 not crossed between t = {since} and t = {until}")]
    SectionNotCrossed { since: f64, until: f64 },
    #[error("ε grid must be strictly increasing and positive")]
    InvalidGrid,
    #[error(transparent)]
    Oscillator(#[from] OscillatorError),
    #[error("at ε = {eps}: {source}")]
    AtEpsilon {
        eps: f64,
        #[source]
        source: Box<IntegratorError>,
    },
}

impl IntegratorError {
    /// Whether this is a convergence failure rather than bad input.
    pub fn is_convergence_failure(&self) -> bool {
        match self {
            IntegratorError::StepUnderflow { .. }
            | IntegratorError::NonFinite { .. }
            | IntegratorError::NoConvergence { .. }
            | IntegratorError::SectionNotCrossed { .. } => true,
            IntegratorError::AtEpsilon { source, .. } => source.is_convergence_failure(),
            _ => false,
        }
    }
}

impl From<StepFailure> for IntegratorError {
    fn from(f: StepFailure) -> Self {
        match f {
            StepFailure::Underflow { t, h } => IntegratorError::StepUnderflow { t, h },
            StepFailure::NonFinite { t } => IntegratorError::NonFinite { t },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    /// Time integrated before crossings are counted; `None` means
    /// `max(50, 20ε)`.
    pub transient_time: Option<f64>,
    /// Successive per-cycle amplitudes must agree to this.
    pub cycle_tol: f64,
    pub max_cycles: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            abs_tol: 1e-11,
            max_step: 1.0,
            transient_time: None,
            cycle_tol: 1e-6,
            max_cycles: 200,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<(), IntegratorError> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(IntegratorError::InvalidConfig(format!(
                    "{name} must be positive, got {v}"
                )))
            }
        };
        positive("rel_tol", self.rel_tol)?;
        positive("abs_tol", self.abs_tol)?;
        positive("max_step", self.max_step)?;
        positive("cycle_tol", self.cycle_tol)?;
        if let Some(t) = self.transient_time {
            if !(t.is_finite() && t >= 0.0) {
                return Err(IntegratorError::InvalidConfig(format!(
                    "transient_time must be non-negative, got {t}"
                )));
            }
        }
        if self.max_cycles < 2 {
            return Err(IntegratorError::InvalidConfig(
                "max_cycles must be at least 2".into(),
            ));
        }
        Ok(())
    }

    pub fn transient_for(&self, eps: f64) -> f64 {
        self.transient_time.unwrap_or_else(|| (20.0 * eps).max(50.0))
    }

    fn tolerances(&self) -> Tolerances {
        Tolerances {
            rel: self.rel_tol,
            abs: self.abs_tol,
            max_step: self.max_step,
        }
    }
}

/// One converged period of a limit cycle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleRecord {
    /// `max |y|` over the cycle.
    pub amplitude: f64,
    pub period: f64,
    /// Samples from one downward section crossing to the next.
    pub samples: Vec<PhasePoint>,
    pub converged: bool,
    /// Section crossings counted after the transient.
    pub iterations: usize,
    /// Distance between first and last sample.
    pub closure_gap: f64,
}

impl CycleRecord {
    /// Largest `y` on the cycle (first sample lies on it).
    pub fn y_max(&self) -> f64 {
        self.samples.iter().map(|p| p.y).fold(f64::MIN, f64::max)
    }

    pub fn y_min(&self) -> f64 {
        self.samples.iter().map(|p| p.y).fold(f64::MAX, f64::min)
    }

    /// Writes `t,y,z` rows with 12 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "t,y,z")?;
        for p in &self.samples {
            writeln!(w, "{},{},{}", sig12(p.t), sig12(p.y), sig12(p.z))?;
        }
        Ok(())
    }
}

fn field_of(spec: &OscillatorSpec) -> impl Fn(f64, &[f64; 2]) -> [f64; 2] + '_ {
    move |_t, y| spec.field(y[0], y[1])
}

fn subdivisions(st: &DenseStep<2>) -> usize {
    let d = ((st.y1[0] - st.y0[0]).powi(2) + (st.y1[1] - st.y0[1]).powi(2)).sqrt();
    ((d / SAMPLE_SPACING).ceil() as usize).clamp(1, MAX_SUBDIVISIONS)
}

fn point_at(st: &DenseStep<2>, theta: f64) -> PhasePoint {
    let y = st.at_fraction(theta);
    PhasePoint::new(st.t0 + theta * st.h, y[0], y[1])
}

/// Fraction of the step at which `z` crosses zero.
fn section_fraction(st: &DenseStep<2>) -> f64 {
    brent(|th| st.at_fraction(th)[1], 0.0, 1.0, 1e-14).unwrap_or_else(|_| {
        // the dense polynomial lost the sign change; fall back to linear
        let (a, b) = (st.y0[1], st.y1[1]);
        (a / (a - b)).clamp(0.0, 1.0)
    })
}

fn downward(st: &DenseStep<2>) -> bool {
    st.y0[1] > 0.0 && st.y1[1] <= 0.0
}

fn upward(st: &DenseStep<2>) -> bool {
    st.y0[1] < 0.0 && st.y1[1] >= 0.0
}

/// Integrates `spec` from `start` to `t_end`, returning the accepted step
/// points plus interpolated points at roughly 0.01 phase-plane spacing.
pub fn integrate(
    spec: &OscillatorSpec,
    start: PhasePoint,
    t_end: f64,
    cfg: &IntegratorConfig,
) -> Result<Vec<PhasePoint>, IntegratorError> {
    cfg.validate()?;
    spec.rhs(start)?;
    if !(t_end > start.t) {
        return Err(IntegratorError::InvalidInterval {
            t_start: start.t,
            t_end,
        });
    }
    let f = field_of(spec);
    let mut stepper = Dopri5::new(&f, start.t, [start.y, start.z], cfg.tolerances());
    let mut out = vec![start];
    while stepper.t() < t_end {
        let st = stepper.step(&f, t_end)?;
        let n = subdivisions(&st);
        for j in 1..n {
            out.push(point_at(&st, j as f64 / n as f64));
        }
        out.push(PhasePoint::new(st.t1(), st.y1[0], st.y1[1]));
    }
    Ok(out)
}

/// Limit cycle reached from the default seed `(2, 0)`.
pub fn limit_cycle(
    spec: &OscillatorSpec,
    cfg: &IntegratorConfig,
) -> Result<CycleRecord, IntegratorError> {
    limit_cycle_from(spec, DEFAULT_SEED, cfg)
}

/// Limit cycle reached from an arbitrary seed `(y, z)`.
pub fn limit_cycle_from(
    spec: &OscillatorSpec,
    seed: (f64, f64),
    cfg: &IntegratorConfig,
) -> Result<CycleRecord, IntegratorError> {
    cfg.validate()?;
    spec.rhs(PhasePoint::new(0.0, seed.0, seed.1))?;
    let f = field_of(spec);
    let eps = spec.epsilon();
    let transient = cfg.transient_for(eps);
    // longest admissible wait between two section crossings
    let window = 20.0 * (2.0 * std::f64::consts::PI + 2.0 * eps);

    let mut stepper = Dopri5::new(&f, 0.0, [seed.0, seed.1], cfg.tolerances());
    while stepper.t() < transient {
        stepper.step(&f, transient)?;
    }

    let mut last_cross_t = stepper.t();
    let mut last_amp: Option<f64> = None;
    let mut last_change: Option<f64> = None;
    let mut crossings = 0usize;
    let start = loop {
        let st = stepper.step(&f, f64::INFINITY)?;
        if downward(&st) {
            let th = section_fraction(&st);
            let p = point_at(&st, th);
            crossings += 1;
            if let Some(prev) = last_amp {
                let change = (p.y - prev).abs();
                if cycle_settled(change, last_change, cfg.cycle_tol) {
                    break p;
                }
                last_change = Some(change);
            }
            if crossings >= cfg.max_cycles {
                return Err(IntegratorError::NoConvergence {
                    cycles: crossings,
                    last_change: last_change.unwrap_or(f64::NAN),
                });
            }
            last_amp = Some(p.y);
            last_cross_t = p.t;
        } else if stepper.t() - last_cross_t > window {
            return Err(IntegratorError::SectionNotCrossed {
                since: last_cross_t,
                until: stepper.t(),
            });
        }
    };

    let mut record = trace_one_period(spec, start, cfg, window)?;
    record.iterations = crossings;
    Ok(record)
}

/// Geometric-tail test: the change must be below `tol`, and when the
/// changes are contracting, so must the extrapolated remaining drift.
fn cycle_settled(change: f64, previous: Option<f64>, tol: f64) -> bool {
    if change >= tol {
        return false;
    }
    match previous {
        Some(prev) if prev > 0.0 && change < prev => {
            let rho = change / prev;
            change * rho / (1.0 - rho) < tol
        }
        Some(_) => true,
        None => false,
    }
}

fn trace_one_period(
    spec: &OscillatorSpec,
    start: PhasePoint,
    cfg: &IntegratorConfig,
    window: f64,
) -> Result<CycleRecord, IntegratorError> {
    let f = field_of(spec);
    let mut stepper = Dopri5::new(&f, start.t, [start.y, 0.0], cfg.tolerances());
    let first = PhasePoint::new(start.t, start.y, 0.0);
    let mut samples = vec![first];
    let end = loop {
        let st = stepper.step(&f, f64::INFINITY)?;
        let n = subdivisions(&st);
        let mut fractions: Vec<f64> = (1..n).map(|j| j as f64 / n as f64).collect();
        if downward(&st) {
            let th = section_fraction(&st);
            samples.extend(
                fractions
                    .iter()
                    .filter(|&&x| x < th)
                    .map(|&x| point_at(&st, x)),
            );
            let mut p = point_at(&st, th);
            p.z = 0.0;
            samples.push(p);
            break p;
        }
        if upward(&st) {
            let th = section_fraction(&st);
            fractions.push(th);
            fractions.sort_by(f64::total_cmp);
        }
        samples.extend(fractions.iter().map(|&x| point_at(&st, x)));
        samples.push(PhasePoint::new(st.t1(), st.y1[0], st.y1[1]));
        if stepper.t() - start.t > window {
            return Err(IntegratorError::SectionNotCrossed {
                since: start.t,
                until: stepper.t(),
            });
        }
    };
    let closure_gap = ((end.y - first.y).powi(2) + (end.z - first.z).powi(2)).sqrt();
    let amplitude = samples.iter().map(|p| p.y.abs()).fold(0.0, f64::max);
    Ok(CycleRecord {
        amplitude,
        period: end.t - first.t,
        samples,
        converged: closure_gap < cfg.cycle_tol,
        iterations: 0,
        closure_gap,
    })
}

/// Exact amplitude curve, one limit cycle per grid point.
pub fn amplitude_sweep(
    kind: &SystemKind,
    grid: &[f64],
    cfg: &IntegratorConfig,
) -> Result<AmplitudeCurve, IntegratorError> {
    validate_grid(grid)?;
    let mut points = Vec::with_capacity(grid.len());
    for &eps in grid {
        let amp = exact_amplitude(kind, eps, cfg)
            .map_err(|e| IntegratorError::AtEpsilon { eps, source: Box::new(e) })?;
        points.push((eps, amp));
    }
    Ok(AmplitudeCurve::new(CurveMethod::Exact, points))
}

/// Amplitude of the limit cycle of `kind` at `eps`.
pub fn exact_amplitude(
    kind: &SystemKind,
    eps: f64,
    cfg: &IntegratorConfig,
) -> Result<f64, IntegratorError> {
    let spec = OscillatorSpec::new(kind.clone(), eps)?;
    Ok(limit_cycle(&spec, cfg)?.amplitude)
}

pub fn validate_grid(grid: &[f64]) -> Result<(), IntegratorError> {
    let ok = !grid.is_empty()
        && grid.iter().all(|e| e.is_finite() && *e > 0.0)
        && grid.windows(2).all(|w| w[1] > w[0]);
    if ok {
        Ok(())
    } else {
        Err(IntegratorError::InvalidGrid)
    }
}

/// One run of the harmonic convergence study.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrderSample {
    pub rel_tol: f64,
    pub steps: usize,
    /// Phase-plane error against `(cos t, −sin t)` at the final time.
    pub error: f64,
}

/// Integrates `ÿ + y = 0` from `(1, 0)` over `periods` periods at each
/// relative tolerance.
pub fn harmonic_order_study(
    rel_tols: &[f64],
    periods: f64,
) -> Result<Vec<OrderSample>, IntegratorError> {
    use crate::oscillators::LienardForm;
    let spec = OscillatorSpec::new(SystemKind::Lienard(LienardForm::harmonic()), 1.0)?;
    let f = field_of(&spec);
    let t_end = periods * std::f64::consts::TAU;
    rel_tols
        .iter()
        .map(|&rel| {
            let tol = Tolerances {
                rel,
                abs: rel * 1e-3,
                max_step: t_end,
            };
            let mut stepper = Dopri5::new(&f, 0.0, [1.0, 0.0], tol);
            while stepper.t() < t_end {
                stepper.step(&f, t_end)?;
            }
            let [y, z] = stepper.y();
            Ok(OrderSample {
                rel_tol: rel,
                steps: stepper.accepted,
                error: (y - t_end.cos()).hypot(z + t_end.sin()),
            })
        })
        .collect()
}

/// Least-squares slope of `−log(error)` against `log(steps)`.
pub fn observed_order(samples: &[OrderSample]) -> f64 {
    let pts: Vec<(f64, f64)> = samples
        .iter()
        .map(|s| ((s.steps as f64).ln(), -s.error.ln()))
        .collect();
    let n = pts.len() as f64;
    let (mx, my) = pts
        .iter()
        .fold((0.0, 0.0), |a, p| (a.0 + p.0 / n, a.1 + p.1 / n));
    let (sxy, sxx) = pts.iter().fold((0.0, 0.0), |a, p| {
        (a.0 + (p.0 - mx) * (p.1 - my), a.1 + (p.0 - mx).powi(2))
    });
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oscillators::LienardForm;

    #[test]
    fn config_validation() {
        assert!(IntegratorConfig::default().validate().is_ok());
        let bad = IntegratorConfig { rel_tol: 0.0, ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = IntegratorConfig { max_cycles: 1, ..Default::default() };
        assert!(bad.validate().is_err());
        assert_eq!(IntegratorConfig::default().transient_for(1.0), 50.0);
        assert_eq!(IntegratorConfig::default().transient_for(10.0), 200.0);
    }

    #[test]
    fn harmonic_limit_returns_to_start() {
        let spec =
            OscillatorSpec::new(SystemKind::Lienard(LienardForm::harmonic()), 1.0).unwrap();
        let period = 2.0 * std::f64::consts::PI;
        let traj = integrate(
            &spec,
            PhasePoint::new(0.0, 1.0, 0.0),
            period,
            &IntegratorConfig::default(),
        )
        .unwrap();
        let last = traj.last().unwrap();
        assert!((last.t - period).abs() < 1e-12);
        assert!((last.y - 1.0).abs() < 1e-6 && last.z.abs() < 1e-6);
        for p in &traj {
            assert!((p.y - p.t.cos()).abs() < 1e-7);
        }
    }

    #[test]
    fn rejects_reversed_interval() {
        let spec = OscillatorSpec::rayleigh(1.0).unwrap();
        let err = integrate(&spec, PhasePoint::new(1.0, 2.0, 0.0), 0.5, &Default::default());
        assert!(matches!(err, Err(IntegratorError::InvalidInterval { .. })));
    }

    #[test]
    fn van_der_pol_stays_bounded() {
        let spec = OscillatorSpec::van_der_pol(5.0).unwrap();
        let traj = integrate(
            &spec,
            PhasePoint::new(0.0, 2.0, 0.0),
            100.0,
            &IntegratorConfig::default(),
        )
        .unwrap();
        assert!(traj.iter().all(|p| p.is_finite() && p.y.abs() < 2.1 && p.z.abs() < 10.0));
    }

    #[test]
    fn no_convergence_is_reported() {
        // ÿ − ε ẏ + y = 0 spirals outward forever
        let form = LienardForm {
            damping: vec![crate::oscillators::DampingTerm { coeff: -1.0, y_pow: 0, z_pow: 1 }],
            restoring: vec![0.0, 1.0],
        };
        let spec = OscillatorSpec::new(SystemKind::Lienard(form), 0.01).unwrap();
        let cfg = IntegratorConfig { max_cycles: 5, transient_time: Some(0.0), ..Default::default() };
        let err = limit_cycle(&spec, &cfg).unwrap_err();
        assert!(matches!(err, IntegratorError::NoConvergence { cycles: 5, .. }));
        assert!(err.is_convergence_failure());
    }

    #[test]
    fn missing_section_crossing_is_reported() {
        // overdamped linear system never returns to z = 0 from above
        let form = LienardForm {
            damping: vec![crate::oscillators::DampingTerm { coeff: 1.0, y_pow: 0, z_pow: 1 }],
            restoring: vec![0.0, 1.0],
        };
        let spec = OscillatorSpec::new(SystemKind::Lienard(form), 5.0).unwrap();
        let cfg = IntegratorConfig { transient_time: Some(1.0), ..Default::default() };
        let err = limit_cycle(&spec, &cfg).unwrap_err();
        assert!(matches!(err, IntegratorError::SectionNotCrossed { .. }), "{err:?}");
    }

    #[test]
    fn rayleigh_unit_cycle() {
        let spec = OscillatorSpec::rayleigh(1.0).unwrap();
        let c = limit_cycle(&spec, &IntegratorConfig::default()).unwrap();
        assert!((c.amplitude - 2.17271).abs() < 2e-3, "{}", c.amplitude);
        assert!(c.converged);
        assert!(c.closure_gap < 1e-6);
        // near-harmonic period
        assert!((c.period - 2.0 * std::f64::consts::PI).abs() < 0.5);
    }

    #[test]
    fn grid_validation() {
        assert!(validate_grid(&[1.0, 2.0]).is_ok());
        assert!(validate_grid(&[2.0, 1.0]).is_err());
        assert!(validate_grid(&[0.0, 1.0]).is_err());
        assert!(validate_grid(&[]).is_err());
    }

    #[test]
    fn csv_export_has_header_and_rows() {
        let spec = OscillatorSpec::van_der_pol(1.0).unwrap();
        let c = limit_cycle(&spec, &IntegratorConfig::default()).unwrap();
        let mut buf = Vec::new();
        c.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("t,y,z"));
        assert_eq!(lines.count(), c.samples.len());
    }
}
