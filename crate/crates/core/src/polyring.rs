//! Laurent polynomials in one variable `q` over exact rationals.
//!
//! A [`LaurentPoly`] is a sparse map from (possibly negative) exponents to
//! nonzero [`Rational`] coefficients. Every other module in the crate builds
//! its objects from these.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Arbitrary-precision rational, always kept in lowest terms with a positive
/// denominator.
pub type Rational = BigRational;

/// Shorthand for an integer-valued [`Rational`].
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Shorthand for `num / den`.
///
/// Panics if `den == 0`.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("division by the zero polynomial")]
    DivByZero,
    #[error("divisor does not divide the dividend exactly")]
    NotDivisible,
    #[error("evaluation at q = 0 of a polynomial with negative exponents")]
    ZeroAtPole,
}

/// Variable substitutions understood by [`LaurentPoly::substitute`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Substitution {
    /// `q -> q^s`
    Power(u32),
    /// `q -> -q`
    Negate,
    /// `q -> 1/q`
    Reciprocal,
}

#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    coeffs: BTreeMap<i64, Rational>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::monomial(c, 0)
    }

    /// `c * q^e`
    pub fn monomial(c: Rational, e: i64) -> Self {
        let mut coeffs = BTreeMap::new();
        if !c.is_zero() {
            coeffs.insert(e, c);
        }
        Self { coeffs }
    }

    /// `q^e`
    pub fn q_pow(e: i64) -> Self {
        Self::monomial(Rational::one(), e)
    }

    /// `1 - c q^e`
    pub fn one_minus(c: &Rational, e: i64) -> Self {
        let mut p = Self::one();
        p.add_term(e, -c.clone());
        p
    }

    /// Builds a polynomial from `(exponent, coefficient)` pairs, summing repeats.
    pub fn from_terms<I: IntoIterator<Item = (i64, Rational)>>(terms: I) -> Self {
        let mut p = Self::zero();
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    /// Integer coefficients, lowest exponent first, starting at `q^low`.
    pub fn from_int_coeffs(low: i64, coeffs: &[i64]) -> Self {
        Self::from_terms(
            coeffs
                .iter()
                .enumerate()
                .map(|(i, &c)| (low + i as i64, rat(c))),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs.get(&0).is_some_and(|c| c.is_one())
    }

    /// Number of stored (nonzero) terms.
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn min_exp(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    pub fn max_exp(&self) -> Option<i64> {
        self.coeffs.keys().next_back().copied()
    }

    /// Coefficient of `q^e` (zero when absent).
    pub fn coeff(&self, e: i64) -> Rational {
        self.coeffs.get(&e).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn leading_coeff(&self) -> Option<&Rational> {
        self.coeffs.values().next_back()
    }

    /// Nonzero terms in increasing exponent order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (i64, &Rational)> + '_ {
        self.coeffs.iter().map(|(&e, c)| (e, c))
    }

    /// True when every coefficient is an integer.
    pub fn is_integral(&self) -> bool {
        self.coeffs.values().all(|c| c.is_integer())
    }

    /// Adds `c q^e` in place, dropping the entry if it cancels.
    pub fn add_term(&mut self, e: i64, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.coeffs.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            coeffs: self.coeffs.iter().map(|(&e, v)| (e, v * c)).collect(),
        }
    }

    /// Multiplies by `q^s`.
    pub fn shift(&self, s: i64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|(&e, v)| (e + s, v.clone())).collect(),
        }
    }

    /// Multiplies by the binomial `1 - c q^e`; linear in the number of terms.
    pub fn mul_one_minus(&self, c: &Rational, e: i64) -> Self {
        if e == 0 {
            return self.scale(&(Rational::one() - c));
        }
        let mut out = self.clone();
        for (&k, v) in &self.coeffs {
            out.add_term(k + e, -(v * c));
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Exact quotient `self / d` in the Laurent ring.
    pub fn divexact(&self, d: &Self) -> Result<Self, PolyError> {
        let (quot, rem) = self.div_rem(d)?;
        if rem.is_zero() {
            Ok(quot)
        } else {
            Err(PolyError::NotDivisible)
        }
    }

    /// Division after normalising both operands to ordinary polynomials with
    /// nonzero constant term.
    ///
    /// Writing `self = q^a n` and `d = q^b m`, returns `(q^(a-b) Q, R)` where
    /// `n = Q m + R` and `deg R < deg m`. The remainder is zero exactly when `d`
    /// divides `self` in the Laurent ring.
    pub fn div_rem(&self, d: &Self) -> Result<(Self, Self), PolyError> {
        let (Some(d_lo), Some(d_hi)) = (d.min_exp(), d.max_exp()) else {
            return Err(PolyError::DivByZero);
        };
        let (Some(n_lo), Some(n_hi)) = (self.min_exp(), self.max_exp()) else {
            return Ok((Self::zero(), Self::zero()));
        };
        let d_deg = (d_hi - d_lo) as usize;
        let n_deg = (n_hi - n_lo) as usize;
        if n_deg < d_deg {
            return Ok((Self::zero(), self.shift(-n_lo)));
        }

        let divisor: Vec<(usize, &Rational)> =
            d.terms().map(|(e, c)| ((e - d_lo) as usize, c)).collect();
        let lc = d.leading_coeff().expect("nonzero divisor");
        let lc_inv = if lc.is_one() { None } else { Some(lc.recip()) };

        let mut rem = vec![Rational::zero(); n_deg + 1];
        for (e, c) in self.terms() {
            rem[(e - n_lo) as usize] = c.clone();
        }
        let mut quot = vec![Rational::zero(); n_deg - d_deg + 1];
        for top in (d_deg..=n_deg).rev() {
            if rem[top].is_zero() {
                continue;
            }
            let factor = match &lc_inv {
                Some(inv) => &rem[top] * inv,
                None => rem[top].clone(),
            };
            let base = top - d_deg;
            for &(j, c) in &divisor {
                let delta = &factor * c;
                rem[base + j] -= delta;
            }
            quot[base] = factor;
        }

        let shift = n_lo - d_lo;
        let quotient = Self::from_terms(
            quot.into_iter()
                .enumerate()
                .map(|(i, c)| (i as i64 + shift, c)),
        );
        let remainder = Self::from_terms(
            rem.into_iter()
                .take(d_deg)
                .enumerate()
                .map(|(i, c)| (i as i64, c)),
        );
        Ok((quotient, remainder))
    }

    pub fn substitute(&self, kind: Substitution) -> Self {
        match kind {
            Substitution::Power(s) => Self {
                coeffs: self
                    .coeffs
                    .iter()
                    .map(|(&e, c)| (e * i64::from(s), c.clone()))
                    .collect(),
            },
            Substitution::Negate => Self {
                coeffs: self
                    .coeffs
                    .iter()
                    .map(|(&e, c)| (e, if e % 2 == 0 { c.clone() } else { -c }))
                    .collect(),
            },
            Substitution::Reciprocal => Self {
                coeffs: self.coeffs.iter().map(|(&e, c)| (-e, c.clone())).collect(),
            },
        }
    }

    /// Exact value at `q = x`.
    pub fn eval(&self, x: &Rational) -> Result<Rational, PolyError> {
        if x.is_zero() {
            if self.min_exp().is_some_and(|e| e < 0) {
                return Err(PolyError::ZeroAtPole);
            }
            return Ok(self.coeff(0));
        }
        let inv = x.recip();
        let mut acc = Rational::zero();
        for (e, c) in self.terms() {
            let base = if e < 0 { &inv } else { x };
            acc += c * num_traits::pow(base.clone(), e.unsigned_abs() as usize);
        }
        Ok(acc)
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentPoly({self})")
    }
}

/// Descending powers, e.g. `q^2 - q + 1` or `q^-1 + 1`.
impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.terms().rev().enumerate() {
            let negative = c.is_negative();
            let abs = c.abs();
            match (i, negative) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let unit = abs.is_one();
            if e == 0 {
                write!(f, "{abs}")?;
                continue;
            }
            if !unit {
                write!(f, "{abs}*")?;
            }
            match e {
                1 => write!(f, "q")?,
                _ => write!(f, "q^{e}")?,
            }
        }
        Ok(())
    }
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        let (mut out, other) = if self.len() >= rhs.len() {
            (self.clone(), rhs)
        } else {
            (rhs.clone(), self)
        };
        for (e, c) in other.terms() {
            out.add_term(e, c.clone());
        }
        out
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (e, c) in rhs.terms() {
            out.add_term(e, -c.clone());
        }
        out
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly {
            coeffs: self.coeffs.iter().map(|(&e, c)| (e, -c)).collect(),
        }
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        if self.is_zero() || rhs.is_zero() {
            return LaurentPoly::zero();
        }
        let (short, long) = if self.len() <= rhs.len() {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let mut out = LaurentPoly::zero();
        for (ea, ca) in short.terms() {
            for (eb, cb) in long.terms() {
                out.add_term(ea + eb, ca * cb);
            }
        }
        out
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for LaurentPoly {
            type Output = LaurentPoly;
            fn $m(self, rhs: LaurentPoly) -> LaurentPoly {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&LaurentPoly> for LaurentPoly {
            type Output = LaurentPoly;
            fn $m(self, rhs: &LaurentPoly) -> LaurentPoly {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        -&self
    }
}
