//! Residues in `Z/p^k`, the p-adic Gamma function, and the classical
//! supercongruences obtained as `q → ±1` limits of the q-congruences.

use std::fmt;
use std::time::Instant;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::congruence::Verdict;
use crate::polyring::{rat, ratio, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PadicError {
    #[error("denominator of {0} is divisible by p")]
    NonUnitDenominator(String),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("p = {0} must be an odd prime")]
    EvenPrime(u64),
    #[error("p^k = {p}^{k} does not fit in 64 bits")]
    PrecisionTooLarge { p: u64, k: u32 },
    #[error("not applicable for this residue class: {0}")]
    WrongResidueClass(String),
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Odd primes in `lo..=hi`.
pub fn odd_primes(lo: u64, hi: u64) -> Vec<u64> {
    (lo.max(3)..=hi).filter(|&p| is_prime(p)).collect()
}

/// An element of `Z/p^k`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct PadicInt {
    p: u64,
    k: u32,
    modulus: u64,
    residue: u64,
}

impl fmt::Debug for PadicInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {}^{})", self.residue, self.p, self.k)
    }
}

impl fmt::Display for PadicInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

fn modulus(p: u64, k: u32) -> Result<u64, PadicError> {
    p.checked_pow(k).ok_or(PadicError::PrecisionTooLarge { p, k })
}

impl PadicInt {
    pub fn new(value: i128, p: u64, k: u32) -> Result<Self, PadicError> {
        let m = modulus(p, k)?;
        Ok(Self {
            p,
            k,
            modulus: m,
            residue: value.rem_euclid(m as i128) as u64,
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.k
    }

    pub fn residue(&self) -> u64 {
        self.residue
    }

    /// The residue as an integer in `(-p^k/2, p^k/2]`.
    pub fn balanced(&self) -> i128 {
        let r = self.residue as i128;
        if 2 * r > self.modulus as i128 {
            r - self.modulus as i128
        } else {
            r
        }
    }

    fn with(&self, residue: u64) -> Self {
        Self { residue, ..*self }
    }

    fn check(&self, other: &Self) {
        assert!(
            self.p == other.p && self.k == other.k,
            "mixing residues mod {}^{} and {}^{}",
            self.p,
            self.k,
            other.p,
            other.k
        );
    }

    pub fn is_zero(&self) -> bool {
        self.residue == 0
    }

    pub fn is_unit(&self) -> bool {
        !self.residue.is_multiple_of(self.p)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check(other);
        self.with(((self.residue as u128 + other.residue as u128) % self.modulus as u128) as u64)
    }

    pub fn neg(&self) -> Self {
        self.with((self.modulus - self.residue) % self.modulus)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check(other);
        self.with(((self.residue as u128 * other.residue as u128) % self.modulus as u128) as u64)
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = *self;
        let mut acc = self.with(1 % self.modulus);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse, or `None` when `p` divides the residue.
    pub fn inverse(&self) -> Option<Self> {
        if !self.is_unit() {
            return None;
        }
        let g = (self.residue as i128).extended_gcd(&(self.modulus as i128));
        Some(self.with(g.x.rem_euclid(self.modulus as i128) as u64))
    }

    pub fn div(&self, other: &Self) -> Option<Self> {
        Some(self.mul(&other.inverse()?))
    }
}

fn reduce(n: &BigInt, m: u64) -> u64 {
    let m = BigInt::from(m);
    n.mod_floor(&m).to_u64().expect("residue below a u64 modulus")
}

/// The image of `r` in `Z/p^k`.
pub fn embed(r: &Rational, p: u64, k: u32) -> Result<PadicInt, PadicError> {
    let m = modulus(p, k)?;
    if (r.denom() % BigInt::from(p)).is_zero() {
        return Err(PadicError::NonUnitDenominator(r.to_string()));
    }
    let num = PadicInt::new(reduce(r.numer(), m) as i128, p, k)?;
    let den = PadicInt::new(reduce(r.denom(), m) as i128, p, k)?;
    Ok(num.div(&den).expect("denominator is a unit"))
}

/// `ord_p(r)`, or `None` for zero.
pub fn valuation(r: &Rational, p: u64) -> Option<i64> {
    if r.is_zero() {
        return None;
    }
    let bp = BigInt::from(p);
    let count = |mut n: BigInt| {
        let mut v = 0i64;
        while (&n % &bp).is_zero() {
            n /= &bp;
            v += 1;
        }
        v
    };
    Some(count(r.numer().abs()) - count(r.denom().clone()))
}

/// `a (a+1) ... (a+m-1)`.
pub fn rising(a: &Rational, m: u64) -> Rational {
    (0..m).fold(Rational::one(), |acc, j| acc * (a + rat(j as i64)))
}

/// `binom(x, m) = x (x-1) ... (x-m+1) / m!` for rational `x`.
pub fn binomial(x: &Rational, m: u64) -> Rational {
    let mut acc = Rational::one();
    for j in 0..m {
        acc = acc * (x - rat(j as i64)) / rat(j as i64 + 1);
    }
    acc
}

/// `A_k = binom(2k, k)^3 / 2^{6k}`.
pub fn a_k(k: u64) -> Rational {
    let c = num_integer::binomial(BigInt::from(2 * k), BigInt::from(k));
    Rational::new(c.pow(3), BigInt::one() << (6 * k))
}

/// `(-1/2)_k^3 / k!^3`.
fn neg_half_cubed(k: u64) -> Rational {
    let r = rising(&ratio(-1, 2), k) / rising(&rat(1), k);
    &r * &r * &r
}

/// Partial sum `Σ_{k<=m} (-1)^k (4k+1) A_k`, whose limit is `2/π`.
pub fn bauer_partial_sum(m: u64) -> Rational {
    (0..=m)
        .map(|k| {
            let sign = if k % 2 == 0 { 1 } else { -1 };
            a_k(k) * rat(sign * (4 * k as i64 + 1))
        })
        .fold(Rational::zero(), |a, b| a + b)
}

/// Morita's `Γ_p(x)` modulo `p^k`, via the representative of `x` in `[1, p^k]`.
pub fn gamma_p(x: &Rational, p: u64, k: u32) -> Result<PadicInt, PadicError> {
    let e = embed(x, p, k)?;
    let big_x = if e.residue == 0 { e.modulus } else { e.residue };
    let mut acc = PadicInt::new(1, p, k)?;
    for j in 1..big_x {
        if j % p != 0 {
            acc = acc.mul(&acc.with(j % e.modulus));
        }
    }
    Ok(if big_x % 2 == 1 { acc.neg() } else { acc })
}

/// The classical supercongruences.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ClassicalFamily {
    /// `Σ (-1)^k (4k+1) A_k ≡ p (-1)^{(p-1)/2} (mod p^3)`.
    B2,
    /// `Σ A_k` modulo `p^2`, with the `Γ_p(1/4)^4` / zero branches.
    H2,
    /// `Σ A_k` modulo `p^3`.
    LR,
    /// `Σ_{k<=(p+1)/2} (-1/2)_k^3/k!^3 ≡ p (1/4)_{(p-1)/2} / (7/4)_{(p-1)/2}`.
    Cor13,
    /// `Σ_{k<=(p+1)/2} (-1)^k (4k-1) (-1/2)_k^3/k!^3 ≡ p (-1)^{(p+1)/2} (mod p^3)`.
    Side,
    /// `Σ_{k<=(p+1)/2} (-1/2)_k^3/k!^3 ≡ 0 (mod p^2)` for `p ≡ 1 (mod 4)`.
    MP,
    /// `binom(-1/2, (p-1)/4) ≡ -Γ_p(1/4)^2 / Γ_p(1/2) (mod p^2)` for `p ≡ 1 (mod 4)`.
    Hamme0,
    /// `(3/4)_{(p-1)/2} / (5/4)_{(p-1)/2} ≡ -(p/16) Γ_p(1/4)^4 (mod p^2)` for `p ≡ 3 (mod 4)`.
    RF34,
}

impl ClassicalFamily {
    pub const ALL: [ClassicalFamily; 8] = [
        ClassicalFamily::B2,
        ClassicalFamily::H2,
        ClassicalFamily::LR,
        ClassicalFamily::Cor13,
        ClassicalFamily::Side,
        ClassicalFamily::MP,
        ClassicalFamily::Hamme0,
        ClassicalFamily::RF34,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            ClassicalFamily::B2 => "B2",
            ClassicalFamily::H2 => "H2",
            ClassicalFamily::LR => "LR",
            ClassicalFamily::Cor13 => "COR13",
            ClassicalFamily::Side => "SIDE",
            ClassicalFamily::MP => "MP",
            ClassicalFamily::Hamme0 => "HAMME0",
            ClassicalFamily::RF34 => "RF34",
        }
    }

    /// Whether the family makes a claim at `p`.
    pub fn applies(self, p: u64) -> bool {
        match self {
            ClassicalFamily::MP | ClassicalFamily::Hamme0 => p % 4 == 1,
            ClassicalFamily::RF34 => p % 4 == 3,
            _ => true,
        }
    }

    /// Exponent `k` of the modulus `p^k` stated for `p`.
    pub fn precision(self, p: u64) -> u32 {
        match self {
            ClassicalFamily::B2 | ClassicalFamily::Side | ClassicalFamily::LR => 3,
            ClassicalFamily::Cor13 if p % 4 == 1 => 3,
            _ => 2,
        }
    }
}

fn check_odd_prime(p: u64) -> Result<(), PadicError> {
    if !is_prime(p) {
        return Err(PadicError::NotPrime(p));
    }
    if p == 2 {
        return Err(PadicError::EvenPrime(p));
    }
    Ok(())
}

/// Rational-valued side of a classical congruence, or a p-adic one where
/// `Γ_p` enters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Side {
    Exact(Rational),
    Padic(PadicInt),
}

impl Side {
    fn embed(&self, p: u64, k: u32) -> Result<PadicInt, PadicError> {
        match self {
            Side::Exact(r) => embed(r, p, k),
            Side::Padic(x) => Ok(*x),
        }
    }
}

/// `Σ_{k<=(p-1)/2} A_k`.
pub fn h2_sum(p: u64) -> Rational {
    (0..=(p - 1) / 2).map(a_k).fold(Rational::zero(), |a, b| a + b)
}

/// Both sides of the family at `p`.
pub fn classical_sides(family: ClassicalFamily, p: u64) -> Result<(Side, Side), PadicError> {
    check_odd_prime(p)?;
    if !family.applies(p) {
        return Err(PadicError::WrongResidueClass(format!(
            "{} does not apply at p = {p} (p ≡ {} mod 4)",
            family.tag(),
            p % 4
        )));
    }
    let k = family.precision(p);
    let h = (p - 1) / 2;
    let pi = p as i64;
    let one_mod_four = p % 4 == 1;
    let g14 = |k: u32| gamma_p(&ratio(1, 4), p, k);
    let sides = match family {
        ClassicalFamily::B2 => {
            let lhs = bauer_partial_sum(h);
            let sign = if h.is_multiple_of(2) { 1 } else { -1 };
            (Side::Exact(lhs), Side::Exact(rat(sign * pi)))
        }
        ClassicalFamily::H2 | ClassicalFamily::LR => {
            let lhs = Side::Exact(h2_sum(p));
            let g4 = g14(k)?.pow(4);
            let rhs = match (family, one_mod_four) {
                (ClassicalFamily::H2, false) => Side::Exact(Rational::zero()),
                (_, true) => Side::Padic(g4.neg()),
                (_, false) => Side::Padic(g4.mul(&embed(&ratio(-pi * pi, 16), p, k)?)),
            };
            (lhs, rhs)
        }
        ClassicalFamily::Cor13 | ClassicalFamily::MP => {
            let lhs: Rational = (0..=p.div_ceil(2)).map(neg_half_cubed).fold(Rational::zero(), |a, b| a + b);
            let rhs = match family {
                ClassicalFamily::MP => Rational::zero(),
                _ => rat(pi) * rising(&ratio(1, 4), h) / rising(&ratio(7, 4), h),
            };
            (Side::Exact(lhs), Side::Exact(rhs))
        }
        ClassicalFamily::Side => {
            let lhs = (0..=p.div_ceil(2))
                .map(|j| {
                    let sign = if j % 2 == 0 { 1 } else { -1 };
                    neg_half_cubed(j) * rat(sign * (4 * j as i64 - 1))
                })
                .fold(Rational::zero(), |a, b| a + b);
            let sign = if p.div_ceil(2).is_multiple_of(2) { 1 } else { -1 };
            (Side::Exact(lhs), Side::Exact(rat(sign * pi)))
        }
        ClassicalFamily::Hamme0 => {
            let lhs = binomial(&ratio(-1, 2), (p - 1) / 4);
            let g12 = gamma_p(&ratio(1, 2), p, k)?;
            let rhs = g14(k)?.pow(2).neg().div(&g12).expect("Γ_p takes unit values");
            (Side::Exact(lhs), Side::Padic(rhs))
        }
        ClassicalFamily::RF34 => {
            let lhs = rising(&ratio(3, 4), h) / rising(&ratio(5, 4), h);
            let rhs = g14(k)?.pow(4).mul(&embed(&ratio(-pi, 16), p, k)?);
            (Side::Exact(lhs), Side::Padic(rhs))
        }
    };
    Ok(sides)
}

/// Checks the family at the odd prime `p` to its stated precision.
pub fn verify_classical(family: ClassicalFamily, p: u64) -> Result<Verdict, PadicError> {
    let start = Instant::now();
    let (lhs, rhs) = classical_sides(family, p)?;
    let k = family.precision(p);
    let (l, r) = (lhs.embed(p, k)?, rhs.embed(p, k)?);
    let mut v = Verdict::new(family.tag()).with_p(p);
    v.passed = l == r;
    v.details = format!("mod {p}^{k}: lhs {} rhs {}", l.residue(), r.residue());
    Ok(v.timed(start))
}
