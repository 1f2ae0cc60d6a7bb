//! Homotopy analysis of the Rayleigh limit cycle.
//!
//! With `τ = ωt` and `U = a·u(τ)` the Rayleigh equation becomes
//!
//! ```text
//! ω² u″ + ε(⅓ a² ω² u′² − 1) ω u′ + u = 0,   u(0) = 1, u′(0) = 0.
//! ```
//!
//! The nonlinear operator is expanded in the embedding parameter `p`
//! around `u₀ = cos τ`, `ω₀ = 1`, `a₀ = 2`. Each deformation order solves
//! `u_k″ + u_k = χ_k (u_{k−1}″ + u_{k−1}) + h R_k` and the pair
//! `(ω_k, a_k)` is fixed by requiring the `cos τ`, `sin τ` content of
//! `R_{k+1}` to vanish.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::trigpoly::{rational_poly, Poly2, TrigError, TrigSeries};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HamError {
    #[error("deformation order {0} is not supported (only 1 and 2)")]
    UnsupportedOrder(usize),
    #[error("order {needed} needs the resolved orders 0..{needed}, got {given}")]
    MissingLowerOrders { needed: usize, given: usize },
    #[error("secular system for order {0} is singular")]
    SingularResonance(usize),
    #[error("resonant terms remain in R_{0} after substitution")]
    ResidualResonance(usize),
    #[error(transparent)]
    Trig(#[from] TrigError),
    #[error("ε = {eps} is outside the supported domain (0, {max}]")]
    OutOfDomain { eps: f64, max: f64 },
    #[error("invalid control table: {0}")]
    InvalidControl(String),
}

/// One resolved deformation order: `u_k(τ)`, `ω_k`, `a_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct HamOrder {
    pub k: usize,
    pub u: TrigSeries,
    pub omega: Poly2,
    pub amp: Poly2,
}

impl HamOrder {
    /// `u₀ = cos τ`, `ω₀ = 1`, `a₀ = 2`.
    pub fn zeroth() -> Self {
        Self {
            k: 0,
            u: TrigSeries::cos(1, Poly2::one()).expect("harmonic 1"),
            omega: Poly2::one(),
            amp: Poly2::integer(2),
        }
    }
}

/// Truncated power series in the embedding parameter `p`.
#[derive(Clone)]
struct PSeries<T>(Vec<T>);

impl PSeries<TrigSeries> {
    fn mul(&self, rhs: &Self, n: usize) -> Result<Self, TrigError> {
        let mut out = vec![TrigSeries::zero(); n + 1];
        for (i, a) in self.0.iter().enumerate().take(n + 1) {
            for (j, b) in rhs.0.iter().enumerate().take(n + 1 - i) {
                out[i + j] = &out[i + j] + &a.mul(b)?;
            }
        }
        Ok(Self(out))
    }

    fn scale(&self, s: &PSeries<Poly2>, n: usize) -> Self {
        let mut out = vec![TrigSeries::zero(); n + 1];
        for (i, a) in self.0.iter().enumerate().take(n + 1) {
            for (j, c) in s.0.iter().enumerate().take(n + 1 - i) {
                out[i + j] = &out[i + j] + &a.scale(c);
            }
        }
        Self(out)
    }

    fn map(&self, f: impl Fn(&TrigSeries) -> TrigSeries) -> Self {
        Self(self.0.iter().map(f).collect())
    }

    fn coeff(&self, i: usize) -> TrigSeries {
        self.0.get(i).cloned().unwrap_or_default()
    }
}

impl PSeries<Poly2> {
    fn mul(&self, rhs: &Self, n: usize) -> Self {
        let mut out = vec![Poly2::zero(); n + 1];
        for (i, a) in self.0.iter().enumerate().take(n + 1) {
            for (j, b) in rhs.0.iter().enumerate().take(n + 1 - i) {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        Self(out)
    }
}

/// Coefficient of `p^(k−1)` in `N[φ(τ,p), Ω(p), A(p)]`, built from the
/// given orders `0..k`.
fn nonlinear_coefficient(k: usize, orders: &[HamOrder]) -> Result<TrigSeries, TrigError> {
    let n = k - 1;
    let phi = PSeries(orders[..=n].iter().map(|o| o.u.clone()).collect::<Vec<_>>());
    let dphi = phi.map(TrigSeries::differentiate);
    let ddphi = dphi.map(TrigSeries::differentiate);
    let omega = PSeries(orders[..=n].iter().map(|o| o.omega.clone()).collect::<Vec<_>>());
    let amp = PSeries(orders[..=n].iter().map(|o| o.amp.clone()).collect::<Vec<_>>());

    let omega2 = omega.mul(&omega, n);
    let omega3 = omega2.mul(&omega, n);
    let amp2 = amp.mul(&amp, n);
    let cubic_weight = amp2.mul(&omega3, n);
    let dphi3 = dphi.mul(&dphi, n)?.mul(&dphi, n)?;

    let eps = Poly2::eps();
    let third_eps = &rational_poly(1, 3) * &eps;

    let inertia = ddphi.scale(&omega2, n).coeff(n);
    let cubic = dphi3.scale(&cubic_weight, n).coeff(n).scale(&third_eps);
    let linear = dphi.scale(&omega, n).coeff(n).scale(&eps);
    Ok(&(&(&inertia + &cubic) - &linear) + &phi.coeff(n))
}

/// `R_k` for `k ∈ {1, 2}` from the resolved orders `0..k`.
pub fn build_rk(k: usize, lower: &[HamOrder]) -> Result<TrigSeries, HamError> {
    if !(1..=2).contains(&k) {
        return Err(HamError::UnsupportedOrder(k));
    }
    if lower.len() < k {
        return Err(HamError::MissingLowerOrders {
            needed: k,
            given: lower.len(),
        });
    }
    Ok(nonlinear_coefficient(k, lower)?)
}

fn resonant(s: &TrigSeries) -> (Poly2, Poly2) {
    (s.cos_coeff(1), s.sin_coeff(1))
}

/// Solves the `cos τ`/`sin τ` conditions of `R_{k+1}` for `(ω_k, a_k)`.
///
/// `R_{k+1}` is affine in the pair, so three evaluations give the linear
/// system, solved by Cramer's rule with exact monomial division.
fn resolve_secular(k: usize, orders: &[HamOrder], u_k: &TrigSeries) -> Result<(Poly2, Poly2), HamError> {
    let with = |omega: Poly2, amp: Poly2| -> Result<(Poly2, Poly2), HamError> {
        let mut trial = orders[..k].to_vec();
        trial.push(HamOrder {
            k,
            u: u_k.clone(),
            omega,
            amp,
        });
        Ok(resonant(&nonlinear_coefficient(k + 1, &trial)?))
    };
    let (c0, s0) = with(Poly2::zero(), Poly2::zero())?;
    let (cw, sw) = with(Poly2::one(), Poly2::zero())?;
    let (ca, sa) = with(Poly2::zero(), Poly2::one())?;
    let (cw, sw) = (&cw - &c0, &sw - &s0);
    let (ca, sa) = (&ca - &c0, &sa - &s0);

    let det = &(&cw * &sa) - &(&ca * &sw);
    if det.is_zero() {
        return Err(HamError::SingularResonance(k));
    }
    let omega_num = &(&ca * &s0) - &(&c0 * &sa);
    let amp_num = &(&c0 * &sw) - &(&cw * &s0);
    let omega = omega_num
        .div_monomial(&det)
        .ok_or(HamError::SingularResonance(k))?;
    let amp = amp_num
        .div_monomial(&det)
        .ok_or(HamError::SingularResonance(k))?;
    Ok((omega, amp))
}

/// Resolves deformation order `k ∈ {1, 2}` given orders `0..k`.
///
/// Returns `u_k` together with `ω_k`, `a_k`, the values that remove the
/// secular terms from the next order.
pub fn solve_order(k: usize, lower: &[HamOrder]) -> Result<HamOrder, HamError> {
    let rk = build_rk(k, lower)?;
    let (rc, rs) = resonant(&rk);
    if !(rc.is_zero() && rs.is_zero()) {
        return Err(HamError::ResidualResonance(k));
    }
    let forced = rk.scale(&Poly2::h()).solve_deformation();
    let u = if k > 1 {
        &lower[k - 1].u + &forced.solution
    } else {
        forced.solution
    };
    let (omega, amp) = resolve_secular(k, lower, &u)?;
    Ok(HamOrder { k, u, omega, amp })
}

/// Orders `0..=max_order` (`max_order ≤ 2`).
pub fn solve_orders(max_order: usize) -> Result<Vec<HamOrder>, HamError> {
    if max_order > 2 {
        return Err(HamError::UnsupportedOrder(max_order));
    }
    let mut orders = vec![HamOrder::zeroth()];
    for k in 1..=max_order {
        let next = solve_order(k, &orders)?;
        orders.push(next);
    }
    Ok(orders)
}

/// Interval `(previous bound, upper]` on which `b(ε) = b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BStep {
    pub upper: f64,
    pub b: f64,
}

/// Linear amplitude `m(ε − ε_s) + c` used beyond `ε_s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearTail {
    pub m: f64,
    pub c: f64,
    pub eps_switch: f64,
}

/// Control-parameter schedule `h(ε)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HamControl {
    pub b_table: Vec<BStep>,
    pub linear_tail: Option<LinearTail>,
}

const DEFAULT_B_TABLE: [(f64, f64); 10] = [
    (4.0, 0.162),
    (5.0, 0.165),
    (7.0, 0.168),
    (8.0, 0.171),
    (9.0, 0.174),
    (11.0, 0.176),
    (15.0, 0.179),
    (20.0, 0.181),
    (30.0, 0.183),
    (50.0, 0.185),
];

impl Default for HamControl {
    /// Step table with the linear tail beyond `ε = 7`.
    fn default() -> Self {
        Self {
            linear_tail: Some(LinearTail {
                m: 0.657692,
                c: 5.63108,
                eps_switch: 7.0,
            }),
            ..Self::steps_only()
        }
    }
}

impl HamControl {
    /// The full ten-step `b(ε)` table over `(0, 50]`, no linear tail.
    pub fn steps_only() -> Self {
        Self {
            b_table: DEFAULT_B_TABLE
                .iter()
                .map(|&(upper, b)| BStep { upper, b })
                .collect(),
            linear_tail: None,
        }
    }

    pub fn validate(&self) -> Result<(), HamError> {
        if self.b_table.is_empty() {
            return Err(HamError::InvalidControl("empty b table".into()));
        }
        if !self.b_table.windows(2).all(|w| w[1].upper > w[0].upper)
            || self.b_table[0].upper <= 0.0
        {
            return Err(HamError::InvalidControl(
                "b table bounds must be positive and strictly increasing".into(),
            ));
        }
        if !self.b_table.iter().all(|s| s.b > 0.0 && s.b.is_finite()) {
            return Err(HamError::InvalidControl("b values must be positive".into()));
        }
        if let Some(t) = &self.linear_tail {
            if !(t.eps_switch > 0.0 && t.eps_switch < self.max_eps()) {
                return Err(HamError::InvalidControl(
                    "linear tail must start inside the table domain".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn max_eps(&self) -> f64 {
        self.b_table.last().map_or(0.0, |s| s.upper)
    }

    /// `b(ε)`; table intervals are right-closed.
    pub fn b(&self, eps: f64) -> Result<f64, HamError> {
        self.check_domain(eps)?;
        Ok(self
            .b_table
            .iter()
            .find(|s| eps <= s.upper)
            .map(|s| s.b)
            .expect("domain checked"))
    }

    fn check_domain(&self, eps: f64) -> Result<(), HamError> {
        let max = self.max_eps();
        if eps > 0.0 && eps <= max {
            Ok(())
        } else {
            Err(HamError::OutOfDomain { eps, max })
        }
    }

    fn tail_at(&self, eps: f64) -> Option<&LinearTail> {
        self.linear_tail.as_ref().filter(|t| eps > t.eps_switch)
    }
}

/// Control parameter `h(ε)`.
///
/// Inside the step table `h = 1/(0.5 + ε b(ε))`. Beyond the tail switch
/// `ε_s`, `h` is chosen so that `2 + hε²/8 = m(ε − ε_s) + c`, i.e.
/// `h = 8m/ε + (8c − 8mε_s − 16)/ε²`.
pub fn control_h(eps: f64, ctl: &HamControl) -> Result<f64, HamError> {
    ctl.check_domain(eps)?;
    if let Some(t) = ctl.tail_at(eps) {
        return Ok(8.0 * t.m / eps + (8.0 * t.c - 8.0 * t.m * t.eps_switch - 16.0) / (eps * eps));
    }
    Ok(1.0 / (0.5 + eps * ctl.b(eps)?))
}

/// First-order HAM amplitude `a₀ + a₁ = 2 + hε²/8`, or the linear tail.
pub fn amplitude_ham(eps: f64, ctl: &HamControl) -> Result<f64, HamError> {
    ctl.check_domain(eps)?;
    if let Some(t) = ctl.tail_at(eps) {
        return Ok(t.m * (eps - t.eps_switch) + t.c);
    }
    Ok(2.0 + control_h(eps, ctl)? * eps * eps / 8.0)
}

/// Amplitude jumps `a(bound⁺) − a(bound)` at every interior table bound
/// and at the tail switch.
pub fn breakpoint_jumps(ctl: &HamControl) -> Result<Vec<(f64, f64)>, HamError> {
    let mut bounds: Vec<f64> = ctl.b_table.iter().map(|s| s.upper).collect();
    bounds.pop();
    if let Some(t) = &ctl.linear_tail {
        bounds.retain(|&b| b <= t.eps_switch);
        if !bounds.contains(&t.eps_switch) {
            bounds.push(t.eps_switch);
        }
    }
    bounds
        .into_iter()
        .map(|b| {
            let left = amplitude_ham(b, ctl)?;
            let right = amplitude_ham(b * (1.0 + 1e-12), ctl)?;
            Ok((b, right - left))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sin(k: u32, p: Poly2) -> TrigSeries {
        TrigSeries::sin(k, p).unwrap()
    }

    fn cos(k: u32, p: Poly2) -> TrigSeries {
        TrigSeries::cos(k, p).unwrap()
    }

    #[test]
    fn first_order_solution() {
        let orders = solve_orders(1).unwrap();
        let o1 = &orders[1];
        assert_eq!(o1.omega, Poly2::term(1, 16, 1, 2));
        assert_eq!(o1.amp, Poly2::term(-1, 8, 1, 2));
        assert_eq!(&o1.amp + &(&o1.omega * &Poly2::integer(2)), Poly2::zero());
        let u1 = &sin(3, Poly2::term(-1, 24, 1, 1)) + &sin(1, Poly2::term(1, 8, 1, 1));
        assert_eq!(o1.u, u1);
    }

    #[test]
    fn r1_and_r2() {
        let orders = solve_orders(1).unwrap();
        assert_eq!(build_rk(1, &orders).unwrap(), sin(3, Poly2::term(1, 3, 0, 1)));
        let r2 = &(&cos(5, Poly2::term(1, 8, 1, 2)) + &cos(3, Poly2::term(-1, 4, 1, 2)))
            + &sin(3, Poly2::term(1, 3, 1, 1) + Poly2::term(1, 48, 1, 3));
        assert_eq!(build_rk(2, &orders).unwrap(), r2);
    }

    /// d/dp of the operator at p = 0, by central differences on the
    /// first-order deformation, against the symbolic R2.
    #[test]
    fn r2_matches_finite_difference() {
        let orders = solve_orders(1).unwrap();
        let r2 = build_rk(2, &orders).unwrap();
        let (h, e) = (0.7, 1.3);
        let o1 = &orders[1];
        let (w1, a1) = (o1.omega.eval(h, e), o1.amp.eval(h, e));
        let du = o1.u.differentiate();
        let ddu = du.differentiate();
        let op = |p: f64, t: f64| {
            let phi = t.cos() + p * o1.u.eval(t, h, e);
            let d = -t.sin() + p * du.eval(t, h, e);
            let dd = -t.cos() + p * ddu.eval(t, h, e);
            let (w, a) = (1.0 + p * w1, 2.0 + p * a1);
            w * w * dd + e * (a * a * w.powi(3) * d.powi(3) / 3.0 - w * d) + phi
        };
        let dp = 1e-5;
        for i in 0..24 {
            let t = i as f64 * 0.27;
            let fd = (op(dp, t) - op(-dp, t)) / (2.0 * dp);
            assert!((fd - r2.eval(t, h, e)).abs() < 1e-8, "tau={t}");
        }
    }

    #[test]
    fn second_order_solution() {
        let orders = solve_orders(2).unwrap();
        let o2 = &orders[2];
        let u2 = &o2.u;
        assert_eq!(
            u2.sin_coeff(3),
            -(Poly2::term(1, 384, 2, 3) + Poly2::term(1, 24, 2, 1) + Poly2::term(1, 24, 1, 1))
        );
        assert_eq!(u2.cos_coeff(5), Poly2::term(-1, 192, 2, 2));
        assert_eq!(u2.cos_coeff(3), Poly2::term(1, 32, 2, 2));
        assert_eq!(u2.cos_coeff(1), Poly2::term(-5, 192, 2, 2));
        assert_eq!(
            u2.sin_coeff(1),
            Poly2::term(1, 128, 2, 3) + Poly2::term(1, 8, 2, 1) + Poly2::term(1, 8, 1, 1)
        );
        assert_eq!(
            o2.omega,
            Poly2::term(3, 512, 2, 4) + Poly2::term(1, 16, 2, 2) + Poly2::term(1, 16, 1, 2)
        );
        assert_eq!(
            o2.amp,
            -(Poly2::term(1, 256, 2, 4) + Poly2::term(7, 96, 2, 2) + Poly2::term(1, 8, 1, 2))
        );
        assert_eq!(u2.degree(), Some(5));
        assert!(u2.value_at_zero().is_zero());
        assert!(u2.differentiate().value_at_zero().is_zero());
    }

    #[test]
    fn unsupported_orders_and_missing_inputs() {
        assert_eq!(build_rk(3, &[]), Err(HamError::UnsupportedOrder(3)));
        assert_eq!(build_rk(0, &[]), Err(HamError::UnsupportedOrder(0)));
        assert!(matches!(
            build_rk(2, &[HamOrder::zeroth()]),
            Err(HamError::MissingLowerOrders { needed: 2, given: 1 })
        ));
        assert!(solve_orders(3).is_err());
    }

    #[test]
    fn r1_vanishes_without_nonlinearity() {
        let r1 = build_rk(1, &[HamOrder::zeroth()]).unwrap();
        let off = r1.map_coeffs(Poly2::at_eps_zero);
        assert!(off.is_zero());
    }

    #[test]
    fn control_parameter_values() {
        let steps = HamControl::steps_only();
        assert!((control_h(1.0, &steps).unwrap() - 1.0 / 0.662).abs() < 1e-12);
        assert!((control_h(1.0, &steps).unwrap() - 1.510574).abs() < 1e-6);
        assert!((control_h(10.0, &steps).unwrap() - 0.442478).abs() < 1e-6);

        let ctl = HamControl::default();
        let h20 = control_h(20.0, &ctl).unwrap();
        assert!((2.0 + h20 * 400.0 / 8.0 - 14.1811).abs() < 1e-4);
        assert!((amplitude_ham(20.0, &ctl).unwrap() - 14.181076).abs() < 1e-6);
    }

    #[test]
    fn amplitude_values() {
        let ctl = HamControl::default();
        assert!((amplitude_ham(1.0, &ctl).unwrap() - 2.188822).abs() < 1e-6);
        assert!((amplitude_ham(7.0 + 1e-12, &ctl).unwrap() - 5.63108).abs() < 1e-9);
        assert!((amplitude_ham(1e-9, &ctl).unwrap() - 2.0).abs() < 1e-12);
        // the tail reproduces its own control parameter
        for e in [7.5, 12.0, 33.3, 50.0] {
            let via_h = 2.0 + control_h(e, &ctl).unwrap() * e * e / 8.0;
            assert!((via_h - amplitude_ham(e, &ctl).unwrap()).abs() < 1e-10);
        }
    }

    #[test]
    fn breakpoints_are_right_closed() {
        let ctl = HamControl::steps_only();
        assert_eq!(ctl.b(4.0).unwrap(), 0.162);
        assert_eq!(ctl.b(4.000001).unwrap(), 0.165);
        assert_eq!(ctl.b(50.0).unwrap(), 0.185);
    }

    #[test]
    fn breakpoint_jumps_are_small() {
        // left/right amplitudes computed by hand from the table
        let jumps = breakpoint_jumps(&HamControl::default()).unwrap();
        let expected = [
            (4.0, 2.0 / 1.16 - 2.0 / 1.148),
            (5.0, 3.125 / 1.34 - 3.125 / 1.325),
            (7.0, 5.63108 - (2.0 + 6.125 / 1.676)),
        ];
        assert_eq!(jumps.len(), expected.len());
        for ((b, j), (eb, ej)) in jumps.iter().zip(expected) {
            assert_eq!(*b, eb);
            assert!((j - ej).abs() < 1e-9, "{b}: {j} vs {ej}");
            let a = amplitude_ham(*b, &HamControl::default()).unwrap();
            assert!(j.abs() / a < 0.01);
        }
    }

    #[test]
    fn domain_errors() {
        let ctl = HamControl::default();
        assert!(matches!(control_h(0.0, &ctl), Err(HamError::OutOfDomain { .. })));
        assert!(matches!(amplitude_ham(50.5, &ctl), Err(HamError::OutOfDomain { .. })));
        assert!(ctl.validate().is_ok());
        let mut bad = HamControl::steps_only();
        bad.b_table.swap(0, 1);
        assert!(bad.validate().is_err());
    }
}
