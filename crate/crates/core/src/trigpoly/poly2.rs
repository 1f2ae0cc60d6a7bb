//! Exact bivariate polynomials in the formal parameters `h` and `ε`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exponent pair `(h-degree, ε-degree)`.
pub type Exponents = (u32, u32);

/// A polynomial in `h` and `ε` with exact rational coefficients.
///
/// Zero coefficients are never stored, so structural equality is
/// mathematical equality.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Poly2 {
    terms: BTreeMap<Exponents, BigRational>,
}

/// Shorthand for an exact rational `num/den`.
pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

impl Poly2 {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        Self::monomial(c, 0, 0)
    }

    pub fn integer(n: i64) -> Self {
        Self::constant(BigRational::from_integer(BigInt::from(n)))
    }

    /// `c · h^h_deg · ε^eps_deg`.
    pub fn monomial(c: BigRational, h_deg: u32, eps_deg: u32) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert((h_deg, eps_deg), c);
        }
        Self { terms }
    }

    /// `(num/den) · h^h_deg · ε^eps_deg`.
    pub fn term(num: i64, den: i64, h_deg: u32, eps_deg: u32) -> Self {
        Self::monomial(ratio(num, den), h_deg, eps_deg)
    }

    /// The formal parameter `h`.
    pub fn h() -> Self {
        Self::term(1, 1, 1, 0)
    }

    /// The nonlinearity `ε`.
    pub fn eps() -> Self {
        Self::term(1, 1, 0, 1)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of `h^h_deg ε^eps_deg` (zero when absent).
    pub fn coeff(&self, h_deg: u32, eps_deg: u32) -> BigRational {
        self.terms
            .get(&(h_deg, eps_deg))
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    /// Terms in ascending exponent order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Exponents, &BigRational)> {
        self.terms.iter()
    }

    /// The single term of a monomial, or `None` for zero or multi-term polynomials.
    pub fn as_monomial(&self) -> Option<(Exponents, &BigRational)> {
        if self.terms.len() == 1 {
            self.terms.iter().next().map(|(e, c)| (*e, c))
        } else {
            None
        }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(e, v)| (*e, v * c)).collect(),
        }
    }

    /// Drops every term whose ε-degree is positive (`ε → 0`).
    pub fn at_eps_zero(&self) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .filter(|((_, e), _)| *e == 0)
                .map(|(k, v)| (*k, v.clone()))
                .collect(),
        }
    }

    /// Exact division by a single-term polynomial.
    ///
    /// Returns `None` when the divisor is not a monomial or some term of
    /// `self` is not divisible by it.
    pub fn div_monomial(&self, divisor: &Poly2) -> Option<Self> {
        let ((dh, de), dc) = divisor.as_monomial()?;
        let mut terms = BTreeMap::new();
        for (&(h, e), c) in &self.terms {
            if h < dh || e < de {
                return None;
            }
            terms.insert((h - dh, e - de), c / dc);
        }
        Some(Self { terms })
    }

    /// Floating-point evaluation at concrete `(h, ε)`.
    pub fn eval(&self, h: f64, eps: f64) -> f64 {
        self.terms
            .iter()
            .map(|(&(hd, ed), c)| {
                c.to_f64().unwrap_or(f64::NAN) * h.powi(hd as i32) * eps.powi(ed as i32)
            })
            .sum()
    }

    fn insert_add(&mut self, exps: Exponents, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(exps).or_insert_with(BigRational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&exps);
        }
    }

    /// True when the leading rendered term carries a minus sign and the
    /// polynomial is a single term; used to pull the sign outside.
    pub(crate) fn single_negative(&self) -> bool {
        self.as_monomial().is_some_and(|(_, c)| c.is_negative())
    }
}

impl Add for &Poly2 {
    type Output = Poly2;
    fn add(self, rhs: &Poly2) -> Poly2 {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.insert_add(*e, c.clone());
        }
        out
    }
}

impl Add for Poly2 {
    type Output = Poly2;
    fn add(self, rhs: Poly2) -> Poly2 {
        &self + &rhs
    }
}

impl Sub for &Poly2 {
    type Output = Poly2;
    fn sub(self, rhs: &Poly2) -> Poly2 {
        self + &(-rhs)
    }
}

impl Sub for Poly2 {
    type Output = Poly2;
    fn sub(self, rhs: Poly2) -> Poly2 {
        &self - &rhs
    }
}

impl Neg for &Poly2 {
    type Output = Poly2;
    fn neg(self) -> Poly2 {
        Poly2 {
            terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect(),
        }
    }
}

impl Neg for Poly2 {
    type Output = Poly2;
    fn neg(self) -> Poly2 {
        -&self
    }
}

impl Mul for &Poly2 {
    type Output = Poly2;
    fn mul(self, rhs: &Poly2) -> Poly2 {
        let mut out = Poly2::zero();
        for (&(h1, e1), c1) in &self.terms {
            for (&(h2, e2), c2) in &rhs.terms {
                out.insert_add((h1 + h2, e1 + e2), c1 * c2);
            }
        }
        out
    }
}

impl Mul for Poly2 {
    type Output = Poly2;
    fn mul(self, rhs: Poly2) -> Poly2 {
        &self * &rhs
    }
}

fn fmt_rational(c: &BigRational) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("({}/{})", c.numer(), c.denom())
    }
}

/// Renders `|c|·h^i·e^j` without sign, e.g. `(1/24)*h*e^1`.
pub(crate) fn fmt_unsigned_monomial(exps: Exponents, c: &BigRational) -> String {
    let (hd, ed) = exps;
    let mag = c.abs();
    let mut parts = Vec::new();
    if !mag.is_one() || (hd == 0 && ed == 0) {
        parts.push(fmt_rational(&mag));
    }
    match hd {
        0 => {}
        1 => parts.push("h".to_string()),
        n => parts.push(format!("h^{n}")),
    }
    if ed > 0 {
        parts.push(format!("e^{ed}"));
    }
    parts.join("*")
}

impl fmt::Display for Poly2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (exps, c)) in self.terms.iter().rev().enumerate() {
            let body = fmt_unsigned_monomial(*exps, c);
            match (i, c.is_negative()) {
                (0, true) => write!(f, "-{body}")?,
                (0, false) => f.write_str(&body)?,
                (_, true) => write!(f, " - {body}")?,
                (_, false) => write!(f, " + {body}")?,
            }
        }
        Ok(())
    }
}
