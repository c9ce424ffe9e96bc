//! q-Pochhammer symbols, rational functions over factored denominators, the
//! summands and closed forms of each congruence family, and truncated power
//! series.
//!
//! Denominators are never expanded for arithmetic. A [`FactoredDen`] keeps
//! each factor `1 - c q^e` by name, which is what lets the congruence engine
//! read off cyclotomic multiplicities without computing a gcd.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::polyring::{LaurentPoly, PolyError, Rational, Substitution};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QSeriesError {
    #[error("parameters out of range: {0}")]
    OutOfRange(String),
    #[error("series has a pole of order {0} at q = 0")]
    NegativeValuation(i64),
    #[error("infinite product factor with exponent {0} <= 0")]
    NonPositiveExponent(i64),
    #[error("parameter choice makes a denominator factor vanish")]
    ParameterPole,
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// The binomial `1 - coeff * q^exp`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearFactor {
    pub coeff: Rational,
    pub exp: i64,
}

impl LinearFactor {
    pub fn new(coeff: Rational, exp: i64) -> Self {
        Self { coeff, exp }
    }

    /// `1 - q^exp`
    pub fn atom(exp: i64) -> Self {
        Self::new(Rational::one(), exp)
    }

    pub fn to_poly(&self) -> LaurentPoly {
        LaurentPoly::one_minus(&self.coeff, self.exp)
    }
}

/// Denominator `unit * q^unit_exponent * ∏ (1 - q^m)^μ * ∏ (1 - c q^e)^ν`.
///
/// The `atoms` carry every factor with coefficient one; `scaled` carries
/// factors whose coefficient `c` is a rational other than `0, ±1`. Such a
/// factor has no root of unity among its roots, so it is coprime to every
/// cyclotomic polynomial. Factors with `c = -1` are rewritten through
/// `1 + q^e = (1 - q^2e) / (1 - q^e)` before they get here.
#[derive(Clone, PartialEq, Eq)]
pub struct FactoredDen {
    pub unit: Rational,
    pub unit_exponent: i64,
    atoms: BTreeMap<u64, u32>,
    scaled: BTreeMap<(Rational, u64), u32>,
}

impl Default for FactoredDen {
    fn default() -> Self {
        Self {
            unit: Rational::one(),
            unit_exponent: 0,
            atoms: BTreeMap::new(),
            scaled: BTreeMap::new(),
        }
    }
}

impl FactoredDen {
    pub fn one() -> Self {
        Self::default()
    }

    /// `(m, multiplicity)` for each atom `1 - q^m`.
    pub fn atoms(&self) -> impl Iterator<Item = (u64, u32)> + '_ {
        self.atoms.iter().map(|(&m, &mu)| (m, mu))
    }

    /// `((c, e), multiplicity)` for each factor `1 - c q^e`.
    pub fn scaled(&self) -> impl Iterator<Item = (&(Rational, u64), u32)> + '_ {
        self.scaled.iter().map(|(k, &mu)| (k, mu))
    }

    pub fn atom_count(&self) -> u32 {
        self.atoms.values().sum()
    }

    /// Number of times `Φ_d` divides the denominator.
    pub fn cyclotomic_multiplicity(&self, d: u64) -> u32 {
        self.atoms
            .iter()
            .map(|(&m, &mu)| mu * crate::cyclotomic::multiplicity(d, m))
            .sum()
    }

    /// Degree of `∏ (1 - q^m)^μ ∏ (1 - c q^e)^ν`, ignoring the unit.
    pub fn degree(&self) -> u64 {
        let a: u64 = self.atoms.iter().map(|(&m, &mu)| m * u64::from(mu)).sum();
        let s: u64 = self.scaled.iter().map(|((_, e), &mu)| e * u64::from(mu)).sum();
        a + s
    }

    /// Fully expanded denominator.
    pub fn to_poly(&self) -> LaurentPoly {
        let mut p = LaurentPoly::monomial(self.unit.clone(), self.unit_exponent);
        for (&m, &mu) in &self.atoms {
            for _ in 0..mu {
                p = p.mul_one_minus(&Rational::one(), m as i64);
            }
        }
        for ((c, e), &mu) in &self.scaled {
            for _ in 0..mu {
                p = p.mul_one_minus(c, *e as i64);
            }
        }
        p
    }

    fn insert_atom(&mut self, m: u64, mu: u32) {
        *self.atoms.entry(m).or_insert(0) += mu;
    }

    fn insert_scaled(&mut self, c: Rational, e: u64, mu: u32) {
        *self.scaled.entry((c, e)).or_insert(0) += mu;
    }

    /// Factor-wise maximum of two denominators, with trivial unit.
    fn lcm(&self, other: &Self) -> Self {
        let mut out = Self::one();
        for (&m, &mu) in self.atoms.iter().chain(other.atoms.iter()) {
            let slot = out.atoms.entry(m).or_insert(0);
            *slot = (*slot).max(mu);
        }
        for (k, &mu) in self.scaled.iter().chain(other.scaled.iter()) {
            let slot = out.scaled.entry(k.clone()).or_insert(0);
            *slot = (*slot).max(mu);
        }
        out
    }

    /// Multiplies `num` by the factors of `target` missing from `self`.
    /// `target` must contain every factor of `self`.
    fn lift_numerator(&self, num: &LaurentPoly, target: &Self) -> LaurentPoly {
        let mut out = num.clone();
        for (&m, &mu) in &target.atoms {
            let have = self.atoms.get(&m).copied().unwrap_or(0);
            for _ in have..mu {
                out = out.mul_one_minus(&Rational::one(), m as i64);
            }
        }
        for (k, &mu) in &target.scaled {
            let have = self.scaled.get(k).copied().unwrap_or(0);
            for _ in have..mu {
                out = out.mul_one_minus(&k.0, k.1 as i64);
            }
        }
        out
    }
}

impl fmt::Debug for FactoredDen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}*q^{}", self.unit, self.unit_exponent)?;
        for (m, mu) in &self.atoms {
            write!(f, "*(1-q^{m})^{mu}")?;
        }
        for ((c, e), mu) in &self.scaled {
            write!(f, "*(1-({c})q^{e})^{mu}")?;
        }
        Ok(())
    }
}

/// Laurent numerator over a [`FactoredDen`]. No canonical form: equality is
/// decided by subtracting.
#[derive(Clone, Debug)]
pub struct RatFun {
    pub num: LaurentPoly,
    pub den: FactoredDen,
}

impl From<LaurentPoly> for RatFun {
    fn from(num: LaurentPoly) -> Self {
        Self {
            num,
            den: FactoredDen::one(),
        }
    }
}

impl RatFun {
    pub fn zero() -> Self {
        LaurentPoly::zero().into()
    }

    pub fn one() -> Self {
        LaurentPoly::one().into()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// `∏ num_factors / ∏ den_factors`
    pub fn from_factors(num: &[LinearFactor], den: &[LinearFactor]) -> Result<Self, QSeriesError> {
        let mut r = Self::one();
        for f in num {
            r = r.mul_linear(f);
        }
        for f in den {
            r = r.div_linear(f)?;
        }
        Ok(r)
    }

    pub fn mul_poly(&self, p: &LaurentPoly) -> Self {
        Self {
            num: &self.num * p,
            den: self.den.clone(),
        }
    }

    pub fn mul_linear(&self, f: &LinearFactor) -> Self {
        Self {
            num: self.num.mul_one_minus(&f.coeff, f.exp),
            den: self.den.clone(),
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    /// Multiplies by `q^s`.
    pub fn shift(&self, s: i64) -> Self {
        Self {
            num: self.num.shift(s),
            den: self.den.clone(),
        }
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Rational::one())
    }

    /// Divides by `1 - c q^e`, normalising the factor into the denominator's
    /// canonical pieces.
    pub fn div_linear(&self, f: &LinearFactor) -> Result<Self, QSeriesError> {
        let mut out = self.clone();
        out.divide_in_place(f.coeff.clone(), f.exp)?;
        Ok(out)
    }

    fn divide_in_place(&mut self, c: Rational, e: i64) -> Result<(), QSeriesError> {
        if c.is_zero() {
            return Ok(());
        }
        if e == 0 {
            let k = Rational::one() - &c;
            if k.is_zero() {
                return Err(QSeriesError::ParameterPole);
            }
            self.den.unit *= k;
            return Ok(());
        }
        let (c, e) = if e < 0 {
            // 1 - c q^e = -c q^e (1 - c^{-1} q^{-e})
            self.den.unit *= -c.clone();
            self.den.unit_exponent += e;
            (c.recip(), (-e) as u64)
        } else {
            (c, e as u64)
        };
        if c.is_one() {
            self.den.insert_atom(e, 1);
        } else if c == -Rational::one() {
            // 1 / (1 + q^e) = (1 - q^e) / (1 - q^{2e})
            self.num = self.num.mul_one_minus(&Rational::one(), e as i64);
            self.den.insert_atom(2 * e, 1);
        } else {
            self.den.insert_scaled(c, e, 1);
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Self {
        let den = self.den.lcm(&other.den);
        let a = self.unit_free_numerator(&den);
        let b = other.unit_free_numerator(&den);
        Self { num: &a + &b, den }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut den = self.den.clone();
        den.unit *= &other.den.unit;
        den.unit_exponent += other.den.unit_exponent;
        for (m, mu) in other.den.atoms() {
            den.insert_atom(m, mu);
        }
        for ((c, e), mu) in other.den.scaled() {
            den.insert_scaled(c.clone(), *e, mu);
        }
        Self {
            num: &self.num * &other.num,
            den,
        }
    }

    /// Numerator over `target` once the unit has been folded into it.
    fn unit_free_numerator(&self, target: &FactoredDen) -> LaurentPoly {
        let lifted = self.den.lift_numerator(&self.num, target);
        let unit_inv = self.den.unit.recip();
        let lifted = if unit_inv.is_one() {
            lifted
        } else {
            lifted.scale(&unit_inv)
        };
        lifted.shift(-self.den.unit_exponent)
    }

    /// Exact equality as rational functions.
    pub fn equals(&self, other: &Self) -> bool {
        self.sub(other).is_zero()
    }

    /// `r(1/q)`
    pub fn reciprocal(&self) -> Self {
        let mut out = Self::from(self.num.substitute(Substitution::Reciprocal));
        out.den.unit = self.den.unit.clone();
        out.den.unit_exponent = -self.den.unit_exponent;
        for (m, mu) in self.den.atoms() {
            for _ in 0..mu {
                out.divide_in_place(Rational::one(), -(m as i64))
                    .expect("atom factors never vanish");
            }
        }
        for ((c, e), mu) in self.den.scaled() {
            for _ in 0..mu {
                out.divide_in_place(c.clone(), -(*e as i64))
                    .expect("scaled factors never vanish");
            }
        }
        out
    }

    /// Lowest power of `q` in the Laurent expansion at `q = 0`, or `None` for zero.
    pub fn valuation(&self) -> Option<i64> {
        self.num.min_exp().map(|e| e - self.den.unit_exponent)
    }

    pub fn eval(&self, x: &Rational) -> Result<Rational, QSeriesError> {
        let den = self.den.to_poly().eval(x)?;
        if den.is_zero() {
            return Err(QSeriesError::ParameterPole);
        }
        Ok(self.num.eval(x)? / den)
    }
}

/// `∏_{j=0}^{count-1} (1 - base_coeff q^{base_exp + j step})` as factors.
pub fn qpoch_factors(base_coeff: &Rational, base_exp: i64, step: u64, count: u64) -> Vec<LinearFactor> {
    (0..count)
        .map(|j| LinearFactor::new(base_coeff.clone(), base_exp + (j * step) as i64))
        .collect()
}

/// Expanded `(base_coeff q^base_exp; q^step)_count`.
pub fn qpoch(base_coeff: &Rational, base_exp: i64, step: u64, count: u64) -> LaurentPoly {
    qpoch_factors(base_coeff, base_exp, step, count)
        .iter()
        .fold(LaurentPoly::one(), |acc, f| acc.mul_one_minus(&f.coeff, f.exp))
}

/// `[n]_q = 1 + q + ... + q^{n-1}`, or `[n]_{q^2}` when `square` is set.
pub fn q_integer(n: u64, square: bool) -> LaurentPoly {
    let step = if square { 2 } else { 1 };
    LaurentPoly::from_terms((0..n as i64).map(|i| (i * step, Rational::one())))
}

/// The congruence families whose left sides are finite q-hypergeometric sums.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    /// Cubic sum with `q^k`; its q → ±1 limits give the classical sums.
    T1,
    /// Cubic sum with base `q^-2` and `q^{7k}`.
    T2,
    /// One-parameter family in `ell`, truncated at `k <= n - 1`.
    T3,
    /// The T1 sum against the `[4m+1]` closed form, modulo `Φ_n(q)^2 Φ_n(-q)`.
    E05,
    /// The earlier sum with `(q;q^2)_k^2 (q^2;q^4)_k`, modulo `Φ_n(q)^2`.
    ModPhi,
}

impl Family {
    pub fn tag(self) -> &'static str {
        match self {
            Family::T1 => "T1",
            Family::T2 => "T2",
            Family::T3 => "T3",
            Family::E05 => "E05",
            Family::ModPhi => "MODPHI",
        }
    }

    /// Default upper summation index.
    pub fn upper(self, n: u64) -> u64 {
        match self {
            Family::T1 | Family::E05 | Family::ModPhi => (n - 1) / 2,
            Family::T2 => n.div_ceil(2),
            Family::T3 => n - 1,
        }
    }
}

fn check_odd(n: u64) -> Result<(), QSeriesError> {
    if n == 0 || n.is_multiple_of(2) {
        return Err(QSeriesError::OutOfRange(format!("n = {n} must be a positive odd integer")));
    }
    Ok(())
}

fn check_ell(n: u64, ell: u64) -> Result<(), QSeriesError> {
    if ell > (n - 1) / 2 {
        return Err(QSeriesError::OutOfRange(format!(
            "ell = {ell} exceeds (n-1)/2 for n = {n}"
        )));
    }
    Ok(())
}

/// `1 / (1 + q^e)` for any nonzero `e`, as a rational function.
fn one_over_one_plus(e: i64) -> RatFun {
    RatFun::one()
        .div_linear(&LinearFactor::new(-Rational::one(), e))
        .expect("1 + q^e never vanishes for e != 0")
}

/// The `k`-th term of the family's left-hand sum.
///
/// The index `k` may exceed the family's default upper limit up to `n - 1`
/// for `T3`; `ell` is ignored except for `T3`.
pub fn summand(family: Family, n: u64, ell: u64, k: u64) -> Result<RatFun, QSeriesError> {
    check_odd(n)?;
    let limit = match family {
        Family::T3 => {
            check_ell(n, ell)?;
            n - 1
        }
        f => f.upper(n),
    };
    if k > limit {
        return Err(QSeriesError::OutOfRange(format!(
            "k = {k} exceeds {limit} for {} with n = {n}",
            family.tag()
        )));
    }
    let one = Rational::one();
    let ki = k as i64;
    let term = match family {
        Family::T1 | Family::E05 => cubic_term(k, 0)?,
        Family::T2 => {
            // (1 + q^{4k-1}) (q^-2;q^4)_k^3 q^{7k} / ((1 + q)(q^4;q^4)_k^3)
            let mut num = LaurentPoly::one().mul_one_minus(&-one.clone(), 4 * ki - 1);
            for f in qpoch_factors(&one, -2, 4, k) {
                for _ in 0..3 {
                    num = num.mul_one_minus(&f.coeff, f.exp);
                }
            }
            let mut r = one_over_one_plus(1).mul_poly(&num.shift(7 * ki));
            for f in qpoch_factors(&one, 4, 4, k) {
                for _ in 0..3 {
                    r = r.div_linear(&f)?;
                }
            }
            r
        }
        Family::T3 => cubic_term(k, ell as i64)?,
        Family::ModPhi => {
            // (q;q^2)_k^2 (q^2;q^4)_k q^{2k} / ((q^2;q^2)_k^2 (q^4;q^4)_k)
            let mut num = LaurentPoly::q_pow(2 * ki);
            for f in qpoch_factors(&one, 1, 2, k) {
                num = num.mul_one_minus(&f.coeff, f.exp).mul_one_minus(&f.coeff, f.exp);
            }
            num = qpoch_factors(&one, 2, 4, k)
                .iter()
                .fold(num, |acc, f| acc.mul_one_minus(&f.coeff, f.exp));
            let mut den = qpoch_factors(&one, 2, 2, k);
            den.extend(qpoch_factors(&one, 2, 2, k));
            den.extend(qpoch_factors(&one, 4, 4, k));
            RatFun::from_factors(&[], &den)?.mul_poly(&num)
        }
    };
    Ok(term)
}

/// `(1 + q^{4k-2ℓ+1}) (q^{2-4ℓ};q^4)_k^3 q^{(6ℓ+1)k} / ((1 + q^{1-2ℓ}) (q^4;q^4)_k^3)`.
fn cubic_term(k: u64, ell: i64) -> Result<RatFun, QSeriesError> {
    parametric_term(k, ell, &Param::Scalar(Rational::one()))
}

/// Value of the extra parameter `a` in the parametric family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Param {
    /// A rational number.
    Scalar(Rational),
    /// `a = q^s`.
    QPower(i64),
}

impl Param {
    /// The factor `1 - a^sign q^e` as a linear factor, `sign = ±1`.
    fn factor(&self, sign: i64, e: i64) -> LinearFactor {
        match self {
            Param::Scalar(a) if sign > 0 => LinearFactor::new(a.clone(), e),
            Param::Scalar(a) => LinearFactor::new(a.recip(), e),
            Param::QPower(s) => LinearFactor::atom(e + sign * s),
        }
    }
}

/// `k`-th term of the parametric sum
/// `(1 + q^{4k-2ℓ+1}) (a q^{2-4ℓ}, q^{2-4ℓ}/a, q^{2-4ℓ}; q^4)_k q^{(6ℓ+1)k}
///  / ((1 + q^{1-2ℓ}) (a q^4, q^4/a, q^4; q^4)_k)`.
pub fn parametric_term(k: u64, ell: i64, a: &Param) -> Result<RatFun, QSeriesError> {
    if let Param::Scalar(c) = a {
        if c.is_zero() {
            return Err(QSeriesError::ParameterPole);
        }
    }
    let ki = k as i64;
    let base = 2 - 4 * ell;
    let mut num = LaurentPoly::q_pow((6 * ell + 1) * ki).mul_one_minus(&-Rational::one(), 4 * ki - 2 * ell + 1);
    let mut den = Vec::with_capacity(3 * k as usize);
    for j in 0..ki {
        for f in [a.factor(1, base + 4 * j), a.factor(-1, base + 4 * j), LinearFactor::atom(base + 4 * j)] {
            num = num.mul_one_minus(&f.coeff, f.exp);
        }
        den.push(a.factor(1, 4 + 4 * j));
        den.push(a.factor(-1, 4 + 4 * j));
        den.push(LinearFactor::atom(4 + 4 * j));
    }
    if num.is_zero() {
        return Ok(RatFun::zero());
    }
    let mut r = one_over_one_plus(1 - 2 * ell).mul_poly(&num);
    for f in &den {
        r = r.div_linear(f)?;
    }
    Ok(r)
}

/// Right-hand side of the family, with `ell` used only by `T3`.
///
/// `E05` and `ModPhi` vanish when `n ≡ 3 (mod 4)`.
pub fn rhs_closed_form(family: Family, n: u64, ell: u64) -> Result<RatFun, QSeriesError> {
    check_odd(n)?;
    let one = Rational::one();
    let half = (n - 1) / 2;
    let r = match family {
        Family::T1 | Family::T2 => {
            // [n]_{q^2} (q^u;q^4)_h q^s / (q^v;q^4)_h
            let (u, v, s) = match family {
                Family::T1 => (3, 5, -(half as i64)),
                _ => {
                    if n == 1 {
                        return Err(QSeriesError::OutOfRange("T2 needs n > 1".into()));
                    }
                    (1, 7, (n as i64 - 3) / 2)
                }
            };
            let num = &q_integer(n, true) * &qpoch(&one, u, 4, half);
            RatFun::from_factors(&[], &qpoch_factors(&one, v, 4, half))?.mul_poly(&num.shift(s))
        }
        Family::T3 => {
            check_ell(n, ell)?;
            let ell = ell as i64;
            let m = half + ell as u64;
            let num = qpoch(&one, 3 - 6 * ell, 4, m)
                .mul_one_minus(&one, 2 * n as i64)
                .shift((2 * ell - 1) * m as i64);
            let mut den = vec![LinearFactor::atom(2 - 4 * ell)];
            den.extend(qpoch_factors(&one, 5 - 2 * ell, 4, m));
            RatFun::from_factors(&[], &den)?.mul_poly(&num)
        }
        Family::E05 | Family::ModPhi => {
            if n % 4 == 3 {
                return Ok(RatFun::zero());
            }
            let m = (n - 1) / 4;
            let mut num = qpoch(&one, 2, 4, m).pow(2);
            num = match family {
                Family::E05 => &num * &q_integer(n, false),
                _ => num.shift(2 * m as i64),
            };
            let mut den = qpoch_factors(&one, 4, 4, m);
            den.extend(qpoch_factors(&one, 4, 4, m));
            RatFun::from_factors(&[], &den)?.mul_poly(&num)
        }
    };
    Ok(r)
}

/// Sides of the shift lemma for odd `n` and `0 <= k <= (n-1)/2`:
/// `(aq;q^2)_{h-k} / (q^2/a;q^2)_{h-k}` and
/// `(-a)^{h-2k} (aq;q^2)_k / (q^2/a;q^2)_k q^{h^2+k}` with `h = (n-1)/2`.
pub fn lemma_sides(n: u64, k: u64, a: &Rational) -> Result<(RatFun, RatFun), QSeriesError> {
    check_odd(n)?;
    let h = (n - 1) / 2;
    if k > h {
        return Err(QSeriesError::OutOfRange(format!("k = {k} exceeds (n-1)/2 = {h}")));
    }
    if a.is_zero() {
        return Err(QSeriesError::ParameterPole);
    }
    let side = |count: u64| -> Result<RatFun, QSeriesError> {
        RatFun::from_factors(
            &qpoch_factors(a, 1, 2, count),
            &qpoch_factors(&a.recip(), 2, 2, count),
        )
    };
    let lhs = side(h - k)?;
    let power = h as i64 - 2 * k as i64;
    let minus_a = -a.clone();
    let coeff = if power >= 0 {
        num_traits::pow(minus_a, power as usize)
    } else {
        num_traits::pow(minus_a.recip(), (-power) as usize)
    };
    let rhs = side(k)?.scale(&coeff).shift((h * h + k) as i64);
    Ok((lhs, rhs))
}

/// Truncated power series `Σ_{i=0}^{order} c_i q^i`.
#[derive(Clone, PartialEq, Eq)]
pub struct PowerSeries {
    coeffs: Vec<Rational>,
}

impl fmt::Debug for PowerSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PowerSeries[{}](", self.order())?;
        for (i, c) in self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
            write!(f, " {c}q^{i}")?;
        }
        write!(f, " )")
    }
}

impl PowerSeries {
    pub fn zero(order: usize) -> Self {
        Self {
            coeffs: vec![Rational::zero(); order + 1],
        }
    }

    pub fn one(order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = Rational::one();
        s
    }

    /// Truncation of a polynomial with no negative exponents.
    pub fn from_poly(p: &LaurentPoly, order: usize) -> Result<Self, QSeriesError> {
        if let Some(lo) = p.min_exp() {
            if lo < 0 {
                return Err(QSeriesError::NegativeValuation(lo));
            }
        }
        let mut s = Self::zero(order);
        for (e, c) in p.terms() {
            if e as usize > order {
                break;
            }
            s.coeffs[e as usize] = c.clone();
        }
        Ok(s)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, i: usize) -> &Rational {
        &self.coeffs[i]
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn truncate(&self, order: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(order.min(self.order()) + 1, Rational::zero());
        Self { coeffs }
    }

    pub fn add(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        Self {
            coeffs: (0..=order).map(|i| &self.coeffs[i] + &other.coeffs[i]).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        Self {
            coeffs: (0..=order).map(|i| &self.coeffs[i] - &other.coeffs[i]).collect(),
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
        }
    }

    /// Multiplies by `q^s`, keeping the order.
    pub fn shift(&self, s: usize) -> Self {
        let mut out = Self::zero(self.order());
        for i in s..=self.order() {
            out.coeffs[i] = self.coeffs[i - s].clone();
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        let mut out = Self::zero(order);
        for (i, a) in self.coeffs.iter().enumerate().take(order + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(order + 1 - i) {
                if !b.is_zero() {
                    out.coeffs[i + j] += a * b;
                }
            }
        }
        out
    }

    /// Multiplies by `1 - c q^e`, `e >= 1`.
    pub fn mul_linear(&self, c: &Rational, e: usize) -> Self {
        let mut out = self.clone();
        for i in (e..=self.order()).rev() {
            let delta = c * &self.coeffs[i - e];
            out.coeffs[i] -= delta;
        }
        out
    }

    /// Divides by `1 - c q^e`, `e >= 1`, via `b_i = a_i + c b_{i-e}`.
    pub fn div_linear(&self, c: &Rational, e: usize) -> Self {
        let mut out = self.clone();
        for i in e..=self.order() {
            let delta = c * &out.coeffs[i - e];
            out.coeffs[i] += delta;
        }
        out
    }

    /// Quotient by a series with nonzero constant term.
    pub fn div(&self, other: &Self) -> Result<Self, QSeriesError> {
        let c0 = &other.coeffs[0];
        if c0.is_zero() {
            return Err(QSeriesError::ParameterPole);
        }
        let inv = c0.recip();
        let order = self.order().min(other.order());
        let mut out = Self::zero(order);
        for i in 0..=order {
            let mut acc = self.coeffs[i].clone();
            for j in 1..=i {
                if !other.coeffs[j].is_zero() {
                    acc -= &other.coeffs[j] * &out.coeffs[i - j];
                }
            }
            out.coeffs[i] = acc * &inv;
        }
        Ok(out)
    }
}

/// Expansion of `r` to order `n`, exact through `q^n`.
pub fn series_of_ratfun(r: &RatFun, order: usize) -> Result<PowerSeries, QSeriesError> {
    let num = r.num.scale(&r.den.unit.recip()).shift(-r.den.unit_exponent);
    let mut s = PowerSeries::from_poly(&num, order)?;
    for (m, mu) in r.den.atoms() {
        for _ in 0..mu {
            s = s.div_linear(&Rational::one(), m as usize);
        }
    }
    for ((c, e), mu) in r.den.scaled() {
        for _ in 0..mu {
            s = s.div_linear(c, *e as usize);
        }
    }
    Ok(s)
}

/// Family of factors `∏_{j>=0} (1 - coeff q^{start + j step})`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InfiniteFactor {
    pub coeff: Rational,
    pub start: i64,
    pub step: u64,
}

impl InfiniteFactor {
    pub fn new(coeff: Rational, start: i64, step: u64) -> Self {
        Self { coeff, start, step }
    }

    /// `(q^start; q^step)_∞`
    pub fn atoms(start: i64, step: u64) -> Self {
        Self::new(Rational::one(), start, step)
    }

    /// Splits off the finitely many factors with exponent `<= 0`, returning
    /// them with the remaining infinite tail.
    pub fn split_nonpositive(&self) -> (Vec<LinearFactor>, InfiniteFactor) {
        let mut head = Vec::new();
        let mut start = self.start;
        while start <= 0 {
            head.push(LinearFactor::new(self.coeff.clone(), start));
            start += self.step as i64;
        }
        (head, InfiniteFactor::new(self.coeff.clone(), start, self.step))
    }

    fn exponents(&self, order: usize) -> Result<Vec<usize>, QSeriesError> {
        if self.step == 0 {
            return Err(QSeriesError::OutOfRange("infinite product step must be positive".into()));
        }
        let mut out = Vec::new();
        let mut e = self.start;
        while e <= order as i64 {
            if e <= 0 {
                return Err(QSeriesError::NonPositiveExponent(e));
            }
            out.push(e as usize);
            e += self.step as i64;
        }
        Ok(out)
    }
}

/// Truncation of `∏ families` to order `n`.
pub fn infinite_product(factors: &[InfiniteFactor], order: usize) -> Result<PowerSeries, QSeriesError> {
    let mut s = PowerSeries::one(order);
    for f in factors {
        for e in f.exponents(order)? {
            s = s.mul_linear(&f.coeff, e);
        }
    }
    Ok(s)
}

/// `s / ∏ families`, truncated to the order of `s`.
pub fn divide_by_infinite_product(s: &PowerSeries, factors: &[InfiniteFactor]) -> Result<PowerSeries, QSeriesError> {
    let order = s.order();
    let mut out = s.clone();
    for f in factors {
        for e in f.exponents(order)? {
            out = out.div_linear(&f.coeff, e);
        }
    }
    Ok(out)
}

/// Truncated Laurent series `Σ_{t=low}^{high} c_t q^t`.
///
/// Unlike [`PowerSeries`] the window may start below zero, and multiplying by
/// a factor with a negative exponent moves both ends of the window down, so
/// callers ask for more precision than they need and read off `high()`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LaurentSeries {
    low: i64,
    coeffs: Vec<Rational>,
}

impl LaurentSeries {
    /// The constant 1, known through `q^high`.
    pub fn one(high: i64) -> Self {
        assert!(high >= 0, "precision must be non-negative");
        let mut coeffs = vec![Rational::zero(); high as usize + 1];
        coeffs[0] = Rational::one();
        Self { low: 0, coeffs }
    }

    pub fn low(&self) -> i64 {
        self.low
    }

    /// Highest exponent whose coefficient is known.
    pub fn high(&self) -> i64 {
        self.low + self.coeffs.len() as i64 - 1
    }

    /// Coefficient of `q^t`; zero below the window.
    ///
    /// Panics above `high()`.
    pub fn coeff(&self, t: i64) -> Rational {
        assert!(t <= self.high(), "coefficient of q^{t} beyond known precision");
        if t < self.low {
            Rational::zero()
        } else {
            self.coeffs[(t - self.low) as usize].clone()
        }
    }

    /// Exponent of the first nonzero coefficient in the window.
    pub fn valuation(&self) -> Option<i64> {
        self.coeffs
            .iter()
            .position(|c| !c.is_zero())
            .map(|i| self.low + i as i64)
    }

    pub fn is_zero_to_precision(&self) -> bool {
        self.valuation().is_none()
    }

    pub fn scale(&mut self, c: &Rational) {
        for x in &mut self.coeffs {
            *x *= c;
        }
    }

    /// Multiplies by `q^s`.
    pub fn shift(&mut self, s: i64) {
        self.low += s;
    }

    /// Multiplies by `1 - c q^e`.
    pub fn mul_linear(&mut self, c: &Rational, e: i64) {
        match e {
            0 => self.scale(&(Rational::one() - c)),
            e if e > 0 => {
                let e = e as usize;
                for i in (e..self.coeffs.len()).rev() {
                    let delta = c * &self.coeffs[i - e];
                    self.coeffs[i] -= delta;
                }
            }
            e => {
                // 1 - c q^e = -c q^e (1 - c^{-1} q^{-e})
                if c.is_zero() {
                    return;
                }
                self.scale(&-c.clone());
                self.shift(e);
                self.mul_linear(&c.recip(), -e);
            }
        }
    }

    /// Divides by `1 - c q^e`.
    pub fn div_linear(&mut self, c: &Rational, e: i64) -> Result<(), QSeriesError> {
        match e {
            0 => {
                let k = Rational::one() - c;
                if k.is_zero() {
                    return Err(QSeriesError::ParameterPole);
                }
                self.scale(&k.recip());
            }
            e if e > 0 => {
                let e = e as usize;
                for i in e..self.coeffs.len() {
                    let delta = c * &self.coeffs[i - e];
                    self.coeffs[i] += delta;
                }
            }
            e => {
                if c.is_zero() {
                    return Ok(());
                }
                self.scale(&-c.recip());
                self.shift(-e);
                self.div_linear(&c.recip(), -e)?;
            }
        }
        Ok(())
    }

    /// Multiplies by `∏_{j>=0} (1 - coeff q^{start + j step})`, applying only
    /// factors that can touch the known window.
    pub fn mul_infinite(&mut self, f: &InfiniteFactor) {
        let mut e = f.start;
        while e <= 0 || e <= self.high() - self.low {
            self.mul_linear(&f.coeff, e);
            e += f.step as i64;
        }
    }

    /// Divides by `∏_{j>=0} (1 - coeff q^{start + j step})`.
    pub fn div_infinite(&mut self, f: &InfiniteFactor) -> Result<(), QSeriesError> {
        let mut e = f.start;
        while e <= 0 || e <= self.high() - self.low {
            self.div_linear(&f.coeff, e)?;
            e += f.step as i64;
        }
        Ok(())
    }

    /// Sum on the common window.
    pub fn add(&self, other: &Self) -> Self {
        let low = self.low.min(other.low);
        let high = self.high().min(other.high());
        let coeffs = (low..=high).map(|t| self.coeff(t) + other.coeff(t)).collect();
        Self { low, coeffs }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyring::{rat, ratio};

    fn p(low: i64, c: &[i64]) -> LaurentPoly {
        LaurentPoly::from_int_coeffs(low, c)
    }

    #[test]
    fn qpoch_examples() {
        let one = Rational::one();
        let expected = &p(0, &[1, 0, -1]) * &p(0, &[1, 0, 0, 0, 0, 0, -1]);
        assert_eq!(qpoch(&one, 2, 4, 2), expected);
        assert_eq!(qpoch(&rat(3), 1, 2, 1), p(0, &[1, -3]));
        let neg = &p(-2, &[-1, 0, 1]) * &p(0, &[1, 0, -1]);
        assert_eq!(qpoch(&one, -2, 4, 2), neg);
        assert!(qpoch(&one, 7, 3, 0).is_one());
    }

    #[test]
    fn qpoch_recurrence() {
        let one = Rational::one();
        for (coeff, base, step) in [(one.clone(), 2, 4), (one.clone(), -2, 4), (one.clone(), 3, 4), (ratio(3, 2), 1, 2)] {
            for k in 0..20u64 {
                let next = qpoch(&coeff, base, step, k + 1);
                let expected = qpoch(&coeff, base, step, k).mul_one_minus(&coeff, base + (k * step) as i64);
                assert_eq!(next, expected);
            }
        }
    }

    #[test]
    fn q_integer_examples() {
        assert_eq!(q_integer(3, false), p(0, &[1, 1, 1]));
        assert!(q_integer(1, true).is_one());
        assert_eq!(q_integer(3, true), p(0, &[1, 0, 1, 0, 1]));
    }

    fn expand(r: &RatFun) -> (LaurentPoly, LaurentPoly) {
        (r.num.clone(), r.den.to_poly())
    }

    fn same(r: &RatFun, num: &LaurentPoly, den: &LaurentPoly) -> bool {
        let (a, b) = expand(r);
        &a * den == &b * num
    }

    #[test]
    fn t1_summands() {
        assert!(summand(Family::T1, 5, 0, 0).unwrap().equals(&RatFun::one()));
        // (1+q^5)(1-q^2)^3 q / ((1+q)(1-q^4)^3)
        let num = &(&p(0, &[1, 0, 0, 0, 0, 1]) * &p(0, &[1, 0, -1]).pow(3)) * &LaurentPoly::q_pow(1);
        let den = &p(0, &[1, 1]) * &p(0, &[1, 0, 0, 0, -1]).pow(3);
        assert!(same(&summand(Family::T1, 3, 0, 1).unwrap(), &num, &den));
    }

    #[test]
    fn t3_at_ell_zero_is_t1() {
        for n in [3u64, 5, 7, 9] {
            for k in 0..=(n - 1) / 2 {
                let a = summand(Family::T3, n, 0, k).unwrap();
                let b = summand(Family::T1, n, 0, k).unwrap();
                assert!(a.equals(&b));
            }
        }
    }

    #[test]
    fn t3_at_ell_one_is_q_times_t2() {
        for n in [3u64, 5, 7] {
            for k in 0..=n.div_ceil(2) {
                let a = summand(Family::T3, n, 1, k).unwrap();
                let b = summand(Family::T2, n, 0, k).unwrap().shift(1);
                assert!(a.equals(&b), "n={n} k={k}");
            }
        }
    }

    #[test]
    fn summand_out_of_range() {
        assert!(matches!(summand(Family::T1, 5, 0, 3), Err(QSeriesError::OutOfRange(_))));
        assert!(matches!(summand(Family::T1, 4, 0, 0), Err(QSeriesError::OutOfRange(_))));
        assert!(matches!(summand(Family::T3, 5, 3, 0), Err(QSeriesError::OutOfRange(_))));
        assert!(summand(Family::T3, 5, 2, 4).is_ok());
        assert!(summand(Family::T2, 5, 0, 3).is_ok());
    }

    #[test]
    fn closed_forms() {
        assert!(rhs_closed_form(Family::T1, 1, 0).unwrap().equals(&RatFun::one()));
        assert!(rhs_closed_form(Family::E05, 7, 0).unwrap().is_zero());
        // [3]_{q^2} (1-q^3) q^-1 / (1-q^5)
        let num = &p(-1, &[1, 0, 1, 0, 1]) * &p(0, &[1, 0, 0, -1]);
        let den = p(0, &[1, 0, 0, 0, 0, -1]);
        assert!(same(&rhs_closed_form(Family::T1, 3, 0).unwrap(), &num, &den));
    }

    #[test]
    fn ratfun_sum_and_reciprocal() {
        let a = RatFun::one().div_linear(&LinearFactor::atom(1)).unwrap();
        let b = a.shift(1);
        let s = a.add(&b);
        assert!(same(&s, &p(0, &[1, 1]), &p(0, &[1, -1])));
        let pal = RatFun::from(p(-1, &[1, 1, 1]));
        assert!(pal.reciprocal().equals(&pal));
        let r = RatFun::from(p(0, &[1, 1]));
        assert!(!r.reciprocal().equals(&r));
        // 1/(1-q) at 1/q is -q/(1-q)
        assert!(a.reciprocal().equals(&a.shift(1).neg()));
    }

    #[test]
    fn denominator_normalisation() {
        // 1/(1 + q^-1) = q/(1+q)
        let r = one_over_one_plus(-1);
        assert_eq!(r.den.atoms().collect::<Vec<_>>(), vec![(2, 1)]);
        assert!(same(&r, &p(1, &[1]), &p(0, &[1, 1])));
        let s = RatFun::one().div_linear(&LinearFactor::new(rat(2), -3)).unwrap();
        assert_eq!(s.den.scaled().count(), 1);
        assert!(same(&s, &LaurentPoly::one(), &LaurentPoly::one_minus(&rat(2), -3)));
        assert!(matches!(
            RatFun::one().div_linear(&LinearFactor::atom(0)),
            Err(QSeriesError::ParameterPole)
        ));
    }

    #[test]
    fn geometric_series() {
        let r = RatFun::one().div_linear(&LinearFactor::atom(1)).unwrap();
        let s = series_of_ratfun(&r, 3).unwrap();
        assert_eq!(s, PowerSeries::from_poly(&p(0, &[1, 1, 1, 1]), 3).unwrap());
        let t = RatFun::from(p(0, &[1, 1])).div_linear(&LinearFactor::new(-Rational::one(), 1)).unwrap();
        assert_eq!(series_of_ratfun(&t, 5).unwrap(), PowerSeries::one(5));
        let pole = RatFun::from(LaurentPoly::q_pow(-1));
        assert_eq!(series_of_ratfun(&pole, 2), Err(QSeriesError::NegativeValuation(-1)));
    }

    /// Schoolbook long division of power series, independent of the
    /// factor-by-factor recurrence used by `series_of_ratfun`.
    fn long_division_oracle(num: &LaurentPoly, den: &LaurentPoly, order: usize) -> Vec<Rational> {
        let shift = den.min_exp().unwrap();
        let num = num.shift(-shift);
        let den = den.shift(-shift);
        let d0 = den.coeff(0);
        let mut rem: Vec<Rational> = (0..=order as i64).map(|i| num.coeff(i)).collect();
        let mut out = vec![Rational::zero(); order + 1];
        for i in 0..=order {
            let c = &rem[i] / &d0;
            for (e, dc) in den.terms() {
                let j = i + e as usize;
                if j <= order {
                    rem[j] -= &c * dc;
                }
            }
            out[i] = c;
        }
        out
    }

    #[test]
    fn summand_series_matches_long_division() {
        let r = summand(Family::T1, 41, 0, 1).unwrap();
        let s = series_of_ratfun(&r, 10).unwrap();
        let oracle = long_division_oracle(&r.num, &r.den.to_poly(), 10);
        assert_eq!(s.coeffs(), &oracle[..]);
        let r = summand(Family::T3, 9, 2, 3).unwrap();
        let shift = -r.valuation().unwrap().min(0);
        let r = r.shift(shift);
        let s = series_of_ratfun(&r, 30).unwrap();
        assert_eq!(s.coeffs(), &long_division_oracle(&r.num, &r.den.to_poly(), 30)[..]);
    }

    #[test]
    fn series_agrees_with_evaluation_smoke() {
        // A polynomial-valued rational function: the series is finite and
        // summing it at q = 1/7 must reproduce exact evaluation.
        let r = RatFun::from(&p(0, &[1, 0, 0, 0, -1]) * &p(0, &[2, 1]))
            .div_linear(&LinearFactor::atom(4))
            .unwrap();
        let s = series_of_ratfun(&r, 6).unwrap();
        let x = ratio(1, 7);
        let summed = s
            .coeffs()
            .iter()
            .enumerate()
            .fold(Rational::zero(), |acc, (i, c)| acc + c * num_traits::pow(x.clone(), i));
        assert_eq!(summed, r.eval(&x).unwrap());
    }

    #[test]
    fn infinite_products() {
        let s = infinite_product(&[InfiniteFactor::atoms(4, 4)], 4).unwrap();
        assert_eq!(s, PowerSeries::from_poly(&p(0, &[1, 0, 0, 0, -1]), 4).unwrap());
        let six = vec![InfiniteFactor::atoms(4, 4); 6];
        let f = infinite_product(&six, 9).unwrap().shift(1);
        let expected = LaurentPoly::from_terms([(1, rat(1)), (5, rat(-6)), (9, rat(9))]);
        assert_eq!(f, PowerSeries::from_poly(&expected, 9).unwrap());
        assert_eq!(infinite_product(&[], 3).unwrap(), PowerSeries::one(3));
        assert_eq!(
            infinite_product(&[InfiniteFactor::atoms(-2, 4)], 5),
            Err(QSeriesError::NonPositiveExponent(-2))
        );
    }

    #[test]
    fn product_then_divide_is_identity() {
        let fam = [InfiniteFactor::new(ratio(2, 3), 1, 3), InfiniteFactor::atoms(2, 2)];
        let s = infinite_product(&fam, 40).unwrap();
        let back = divide_by_infinite_product(&s, &fam).unwrap();
        assert_eq!(back, PowerSeries::one(40));
        let inv = PowerSeries::one(40).div(&s).unwrap();
        assert_eq!(inv.mul(&s), PowerSeries::one(40));
    }

    #[test]
    fn t3_truncation_divisibility() {
        use crate::cyclotomic::CyclotomicCache;
        use crate::polyring::Substitution;
        let cache = CyclotomicCache::for_odd_up_to(25);
        for n in (3..=25u64).step_by(2) {
            let phi_sq = cache.get(n).unwrap().substitute(Substitution::Power(2));
            for ell in 0..=(n - 1) / 2 {
                for k in ((n - 1) / 2 + ell + 1)..n {
                    let r = summand(Family::T3, n, ell, k).unwrap();
                    assert_eq!(r.den.cyclotomic_multiplicity(n), 0);
                    assert_eq!(r.den.cyclotomic_multiplicity(2 * n), 0);
                    assert!(r.num.divexact(&phi_sq).is_ok(), "n={n} ell={ell} k={k}");
                }
            }
        }
    }

    #[test]
    fn laurent_series_negative_exponent_factors() {
        // (1 - q^-2)/(1 - q^-2) = 1, with the window dropping by 2 then recovering
        let mut s = LaurentSeries::one(10);
        s.mul_linear(&Rational::one(), -2);
        assert_eq!(s.low(), -2);
        assert_eq!(s.high(), 8);
        assert_eq!(s.coeff(-2), -Rational::one());
        assert_eq!(s.coeff(0), Rational::one());
        s.div_linear(&Rational::one(), -2).unwrap();
        assert_eq!(s.high(), 10);
        for t in 0..=10 {
            assert_eq!(s.coeff(t), if t == 0 { Rational::one() } else { Rational::zero() });
        }
    }

    #[test]
    fn laurent_series_matches_power_series_products() {
        let fam = [InfiniteFactor::new(ratio(1, 3), 3, 4), InfiniteFactor::atoms(1, 2)];
        let ps = infinite_product(&fam, 30).unwrap();
        let mut ls = LaurentSeries::one(30);
        for f in &fam {
            ls.mul_infinite(f);
        }
        for t in 0..=30 {
            assert_eq!(&ls.coeff(t), ps.coeff(t as usize));
        }
        let mut back = ls.clone();
        for f in &fam {
            back.div_infinite(f).unwrap();
        }
        assert_eq!(back, LaurentSeries::one(30));
    }
}
