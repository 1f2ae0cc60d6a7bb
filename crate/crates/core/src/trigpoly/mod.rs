//! Exact algebra over finite trigonometric series in a phase variable `τ`.
//!
//! A [`TrigSeries`] is `c₀ + Σₖ (aₖ cos kτ + bₖ sin kτ)` where every
//! coefficient is a [`Poly2`] in the formal parameters `h` and `ε`. Products
//! are re-expanded into pure harmonics, so the homotopy deformation orders
//! can be carried out symbol for symbol.

mod poly2;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use thiserror::Error;

pub use poly2::{ratio, Exponents, Poly2};

/// Largest harmonic index a series may carry.
pub const MAX_HARMONIC: u32 = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TrigError {
    #[error("harmonic index {index} exceeds the supported bound {MAX_HARMONIC}")]
    HarmonicOverflow { index: u32 },
}

/// Cosine and sine coefficients of one harmonic.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Harmonic {
    pub cos: Poly2,
    pub sin: Poly2,
}

impl Harmonic {
    fn is_zero(&self) -> bool {
        self.cos.is_zero() && self.sin.is_zero()
    }
}

/// Finite Fourier series with exact `Poly2` coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TrigSeries {
    harmonics: BTreeMap<u32, Harmonic>,
}

/// Output of [`TrigSeries::solve_deformation`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeformationSolution {
    /// Solution of `u″ + u = rhs` over the non-resonant harmonics with
    /// `u(0) = 0`, `u′(0) = 0`.
    pub solution: TrigSeries,
    /// Coefficient of `cos τ` in the right-hand side.
    pub resonant_cos: Poly2,
    /// Coefficient of `sin τ` in the right-hand side.
    pub resonant_sin: Poly2,
}

impl DeformationSolution {
    pub fn is_resonance_free(&self) -> bool {
        self.resonant_cos.is_zero() && self.resonant_sin.is_zero()
    }
}

impl TrigSeries {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Poly2) -> Self {
        let mut s = Self::zero();
        s.add_cos(0, c);
        s
    }

    /// `c · cos kτ`.
    pub fn cos(k: u32, c: Poly2) -> Result<Self, TrigError> {
        check_index(k)?;
        let mut s = Self::zero();
        s.add_cos(k, c);
        Ok(s)
    }

    /// `c · sin kτ`. `sin 0τ` vanishes identically.
    pub fn sin(k: u32, c: Poly2) -> Result<Self, TrigError> {
        check_index(k)?;
        let mut s = Self::zero();
        s.add_sin(k, c);
        Ok(s)
    }

    pub fn is_zero(&self) -> bool {
        self.harmonics.is_empty()
    }

    /// Highest harmonic index present, `None` for the empty series.
    pub fn degree(&self) -> Option<u32> {
        self.harmonics.keys().next_back().copied()
    }

    pub fn harmonic(&self, k: u32) -> Harmonic {
        self.harmonics.get(&k).cloned().unwrap_or_default()
    }

    pub fn cos_coeff(&self, k: u32) -> Poly2 {
        self.harmonics
            .get(&k)
            .map(|h| h.cos.clone())
            .unwrap_or_default()
    }

    pub fn sin_coeff(&self, k: u32) -> Poly2 {
        self.harmonics
            .get(&k)
            .map(|h| h.sin.clone())
            .unwrap_or_default()
    }

    pub fn harmonics(&self) -> impl Iterator<Item = (u32, &Harmonic)> {
        self.harmonics.iter().map(|(k, h)| (*k, h))
    }

    fn add_cos(&mut self, k: u32, c: Poly2) {
        if c.is_zero() {
            return;
        }
        let slot = self.harmonics.entry(k).or_default();
        slot.cos = &slot.cos + &c;
        if slot.is_zero() {
            self.harmonics.remove(&k);
        }
    }

    fn add_sin(&mut self, k: u32, c: Poly2) {
        if c.is_zero() || k == 0 {
            return;
        }
        let slot = self.harmonics.entry(k).or_default();
        slot.sin = &slot.sin + &c;
        if slot.is_zero() {
            self.harmonics.remove(&k);
        }
    }

    /// Multiplies every coefficient by the polynomial `c`.
    pub fn scale(&self, c: &Poly2) -> Self {
        let mut out = Self::zero();
        for (&k, h) in &self.harmonics {
            out.add_cos(k, &h.cos * c);
            out.add_sin(k, &h.sin * c);
        }
        out
    }

    pub fn scale_rational(&self, c: &BigRational) -> Self {
        self.scale(&Poly2::constant(c.clone()))
    }

    /// Product re-expanded via the product-to-sum identities.
    pub fn mul(&self, rhs: &Self) -> Result<Self, TrigError> {
        if let (Some(a), Some(b)) = (self.degree(), rhs.degree()) {
            check_index(a + b)?;
        }
        let half = Poly2::constant(ratio(1, 2));
        let mut out = Self::zero();
        for (&m, p) in &self.harmonics {
            for (&n, q) in &rhs.harmonics {
                let sum = m + n;
                let diff = m.abs_diff(n);
                // sign of sin(m−n) relative to sin|m−n|
                let diff_sign = if m >= n { Poly2::one() } else { -Poly2::one() };

                let cc = &(&p.cos * &q.cos) * &half;
                if !cc.is_zero() {
                    out.add_cos(diff, cc.clone());
                    out.add_cos(sum, cc);
                }
                let ss = &(&p.sin * &q.sin) * &half;
                if !ss.is_zero() {
                    out.add_cos(diff, ss.clone());
                    out.add_cos(sum, -ss);
                }
                // sin mτ · cos nτ = ½[sin(m+n)τ + sin(m−n)τ]
                let sc = &(&p.sin * &q.cos) * &half;
                if !sc.is_zero() {
                    out.add_sin(sum, sc.clone());
                    out.add_sin(diff, &sc * &diff_sign);
                }
                // cos mτ · sin nτ = ½[sin(m+n)τ − sin(m−n)τ]
                let cs = &(&p.cos * &q.sin) * &half;
                if !cs.is_zero() {
                    out.add_sin(sum, cs.clone());
                    out.add_sin(diff, -(&cs * &diff_sign));
                }
            }
        }
        Ok(out)
    }

    /// `self^n` for `n ≥ 1`; `self^0` is the constant 1.
    pub fn pow(&self, n: u32) -> Result<Self, TrigError> {
        let mut acc = Self::constant(Poly2::one());
        for _ in 0..n {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Term-wise derivative in `τ`.
    pub fn differentiate(&self) -> Self {
        let mut out = Self::zero();
        for (&k, h) in &self.harmonics {
            if k == 0 {
                continue;
            }
            let kk = Poly2::integer(i64::from(k));
            out.add_sin(k, -(&h.cos * &kk));
            out.add_cos(k, &h.sin * &kk);
        }
        out
    }

    /// Exact value of the series at `τ = 0`.
    pub fn value_at_zero(&self) -> Poly2 {
        self.harmonics
            .values()
            .fold(Poly2::zero(), |acc, h| &acc + &h.cos)
    }

    /// Floating-point evaluation at concrete `(τ, h, ε)`.
    pub fn eval(&self, tau: f64, h: f64, eps: f64) -> f64 {
        self.harmonics
            .iter()
            .map(|(&k, c)| {
                let kt = f64::from(k) * tau;
                c.cos.eval(h, eps) * kt.cos() + c.sin.eval(h, eps) * kt.sin()
            })
            .sum()
    }

    /// Applies `f` to every coefficient, pruning anything that becomes zero.
    pub fn map_coeffs(&self, mut f: impl FnMut(&Poly2) -> Poly2) -> Self {
        let mut out = Self::zero();
        for (&k, h) in &self.harmonics {
            out.add_cos(k, f(&h.cos));
            out.add_sin(k, f(&h.sin));
        }
        out
    }

    /// Solves `u″ + u = rhs` for the non-resonant harmonics.
    ///
    /// The `k = 1` content of `rhs` is returned separately instead of being
    /// integrated (it would produce secular `τ sin τ`, `τ cos τ` terms). The
    /// particular coefficient for harmonic `k ≠ 1` is `rhs_k / (1 − k²)`; a
    /// homogeneous `C₁ sin τ + C₂ cos τ` is then added so that `u(0) = 0` and
    /// `u′(0) = 0`.
    pub fn solve_deformation(&self) -> DeformationSolution {
        let mut particular = Self::zero();
        let mut resonant = Harmonic::default();
        for (&k, h) in &self.harmonics {
            if k == 1 {
                resonant = h.clone();
                continue;
            }
            let k2 = i64::from(k) * i64::from(k);
            let factor = BigRational::new(BigInt::one(), BigInt::from(1 - k2));
            particular.add_cos(k, h.cos.scale(&factor));
            particular.add_sin(k, h.sin.scale(&factor));
        }
        let u0 = particular.value_at_zero();
        let du0 = particular.differentiate().value_at_zero();
        particular.add_cos(1, -u0);
        particular.add_sin(1, -du0);
        DeformationSolution {
            solution: particular,
            resonant_cos: resonant.cos,
            resonant_sin: resonant.sin,
        }
    }
}

fn check_index(k: u32) -> Result<(), TrigError> {
    if k > MAX_HARMONIC {
        Err(TrigError::HarmonicOverflow { index: k })
    } else {
        Ok(())
    }
}

impl Add for &TrigSeries {
    type Output = TrigSeries;
    fn add(self, rhs: &TrigSeries) -> TrigSeries {
        let mut out = self.clone();
        for (&k, h) in &rhs.harmonics {
            out.add_cos(k, h.cos.clone());
            out.add_sin(k, h.sin.clone());
        }
        out
    }
}

impl Add for TrigSeries {
    type Output = TrigSeries;
    fn add(self, rhs: TrigSeries) -> TrigSeries {
        &self + &rhs
    }
}

impl Neg for &TrigSeries {
    type Output = TrigSeries;
    fn neg(self) -> TrigSeries {
        self.map_coeffs(|c| -c)
    }
}

impl Neg for TrigSeries {
    type Output = TrigSeries;
    fn neg(self) -> TrigSeries {
        -&self
    }
}

impl Sub for &TrigSeries {
    type Output = TrigSeries;
    fn sub(self, rhs: &TrigSeries) -> TrigSeries {
        self + &(-rhs)
    }
}

impl Sub for TrigSeries {
    type Output = TrigSeries;
    fn sub(self, rhs: TrigSeries) -> TrigSeries {
        &self - &rhs
    }
}

fn fmt_basis(kind: &str, k: u32) -> String {
    if k == 1 {
        format!("{kind}(t)")
    } else {
        format!("{kind}({k}t)")
    }
}

/// Human-readable rendering, highest harmonic first, cosine before sine:
/// `-(1/24)*h*e^1*sin(3t) + (1/8)*h*e^1*sin(t)`.
impl fmt::Display for TrigSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.harmonics.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for (&k, h) in self.harmonics.iter().rev() {
            for (coeff, kind) in [(&h.cos, "cos"), (&h.sin, "sin")] {
                if coeff.is_zero() {
                    continue;
                }
                let (negative, body) = if let Some((exps, c)) = coeff.as_monomial() {
                    let mono = poly2::fmt_unsigned_monomial(exps, c);
                    let body = if k == 0 {
                        mono
                    } else if exps == (0, 0) && c.abs().is_one() {
                        fmt_basis(kind, k)
                    } else {
                        format!("{mono}*{}", fmt_basis(kind, k))
                    };
                    (coeff.single_negative(), body)
                } else if k == 0 {
                    (false, format!("({coeff})"))
                } else {
                    (false, format!("({coeff})*{}", fmt_basis(kind, k)))
                };
                match (first, negative) {
                    (true, true) => write!(f, "-{body}")?,
                    (true, false) => f.write_str(&body)?,
                    (false, true) => write!(f, " - {body}")?,
                    (false, false) => write!(f, " + {body}")?,
                }
                first = false;
            }
        }
        Ok(())
    }
}

/// Convenience: exact rational as `Poly2` constant.
pub fn rational_poly(num: i64, den: i64) -> Poly2 {
    Poly2::constant(ratio(num, den))
}

/// `true` when the series vanishes identically in the limit `ε → 0`.
pub fn vanishes_at_eps_zero(s: &TrigSeries) -> bool {
    s.harmonics().all(|(_, h)| {
        h.cos.at_eps_zero().is_zero() && h.sin.at_eps_zero().is_zero()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(k: u32, num: i64, den: i64) -> TrigSeries {
        TrigSeries::cos(k, rational_poly(num, den)).unwrap()
    }

    fn s(k: u32, num: i64, den: i64) -> TrigSeries {
        TrigSeries::sin(k, rational_poly(num, den)).unwrap()
    }

    #[test]
    fn add_identity_inverse_and_exact_sum() {
        assert_eq!(&c(1, 1, 1) + &TrigSeries::zero(), c(1, 1, 1));
        assert!((&s(1, 1, 1) + &s(1, -1, 1)).is_zero());
        assert_eq!(&c(1, 1, 2) + &c(1, 1, 2), c(1, 1, 1));
    }

    #[test]
    fn products_expand_into_harmonics() {
        let cc = c(1, 1, 1).mul(&c(1, 1, 1)).unwrap();
        assert_eq!(cc, &TrigSeries::constant(rational_poly(1, 2)) + &c(2, 1, 2));

        let sc = s(1, 1, 1).mul(&c(1, 1, 1)).unwrap();
        assert_eq!(sc, s(2, 1, 2));

        let sin = s(1, 1, 1);
        let cube = sin.mul(&sin).unwrap().mul(&sin).unwrap();
        assert_eq!(cube, &s(1, 3, 4) + &s(3, -1, 4));
    }

    #[test]
    fn mixed_index_order_products() {
        // cos τ · sin 3τ = ½ sin 4τ + ½ sin 2τ
        let p = c(1, 1, 1).mul(&s(3, 1, 1)).unwrap();
        assert_eq!(p, &s(4, 1, 2) + &s(2, 1, 2));
        // sin τ · cos 3τ = ½ sin 4τ − ½ sin 2τ
        let q = s(1, 1, 1).mul(&c(3, 1, 1)).unwrap();
        assert_eq!(q, &s(4, 1, 2) + &s(2, -1, 2));
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(c(1, 1, 1).differentiate(), s(1, -1, 1));
        assert!(TrigSeries::constant(rational_poly(5, 1)).differentiate().is_zero());
        assert_eq!(s(3, 1, 1).differentiate(), c(3, 3, 1));
    }

    #[test]
    fn harmonic_bound_is_enforced() {
        assert!(TrigSeries::cos(65, Poly2::one()).is_err());
        let a = c(40, 1, 1);
        assert_eq!(
            a.mul(&a),
            Err(TrigError::HarmonicOverflow { index: 80 })
        );
        assert!(c(32, 1, 1).mul(&c(32, 1, 1)).is_ok());
    }

    #[test]
    fn deformation_solution_first_order() {
        let rhs = TrigSeries::sin(3, Poly2::term(1, 3, 1, 1)).unwrap();
        let out = rhs.solve_deformation();
        let expected = &TrigSeries::sin(3, Poly2::term(-1, 24, 1, 1)).unwrap()
            + &TrigSeries::sin(1, Poly2::term(1, 8, 1, 1)).unwrap();
        assert_eq!(out.solution, expected);
        assert!(out.is_resonance_free());
    }

    #[test]
    fn deformation_of_empty_and_pure_resonance() {
        let out = TrigSeries::zero().solve_deformation();
        assert!(out.solution.is_zero());
        assert!(out.is_resonance_free());

        let out = s(1, 1, 1).solve_deformation();
        assert!(out.solution.is_zero());
        assert!(out.resonant_cos.is_zero());
        assert_eq!(out.resonant_sin, Poly2::one());
    }

    #[test]
    fn constant_rhs_is_solved_with_zero_initial_data() {
        // u″ + u = 2  ⇒  u = 2 − 2 cos τ
        let out = TrigSeries::constant(Poly2::integer(2)).solve_deformation();
        assert_eq!(
            out.solution,
            &TrigSeries::constant(Poly2::integer(2)) + &c(1, -2, 1)
        );
    }

    #[test]
    fn display_golden() {
        let u1 = &TrigSeries::sin(3, Poly2::term(-1, 24, 1, 1)).unwrap()
            + &TrigSeries::sin(1, Poly2::term(1, 8, 1, 1)).unwrap();
        assert_eq!(
            u1.to_string(),
            "-(1/24)*h*e^1*sin(3t) + (1/8)*h*e^1*sin(t)"
        );
        assert_eq!(TrigSeries::zero().to_string(), "0");
        let mixed = &(&c(1, 1, 1) + &TrigSeries::constant(rational_poly(1, 2)))
            + &TrigSeries::sin(2, Poly2::h() - Poly2::eps()).unwrap();
        assert_eq!(mixed.to_string(), "(h - e^1)*sin(2t) + cos(t) + (1/2)");
    }

    #[test]
    fn eval_agrees_with_closed_form() {
        let s3 = s(1, 1, 1).pow(3).unwrap();
        for &t in &[0.0, 0.3, 1.7, -2.2] {
            let x: f64 = t;
            assert!((s3.eval(x, 0.0, 0.0) - x.sin().powi(3)).abs() < 1e-14);
        }
    }

    #[test]
    fn vanishing_at_eps_zero() {
        let s = TrigSeries::sin(3, Poly2::term(1, 3, 0, 1)).unwrap();
        assert!(vanishes_at_eps_zero(&s));
        assert!(!vanishes_at_eps_zero(&c(1, 1, 1)));
    }
}
