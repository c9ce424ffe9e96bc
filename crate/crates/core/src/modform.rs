//! Coefficients of the weight-3 CM form `q ∏_{j>=1} (1 - q^{4j})^6`.

use std::time::Instant;

use num_traits::ToPrimitive;
use thiserror::Error;

use crate::congruence::Verdict;
use crate::padic::{self, embed, gamma_p, is_prime, PadicError};
use crate::polyring::{rat, ratio, Rational};
use crate::qseries::{infinite_product, InfiniteFactor};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModformError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("p = {p} lies beyond the expansion order {order}")]
    OutOfRange { p: u64, order: u64 },
    #[error(transparent)]
    Padic(#[from] PadicError),
}

/// `a(1..=N)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EtaCoefficients {
    order: u64,
    a: Vec<i64>,
}

impl EtaCoefficients {
    pub fn order(&self) -> u64 {
        self.order
    }

    /// `a(n)` for `1 <= n <= N`.
    pub fn get(&self, n: u64) -> Option<i64> {
        if n == 0 || n > self.order {
            return None;
        }
        Some(self.a[n as usize - 1])
    }

    /// `(n, a(n))` for every `n` with nonzero coefficient.
    pub fn nonzero(&self) -> impl Iterator<Item = (u64, i64)> + '_ {
        self.a
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| (i as u64 + 1, c))
    }
}

/// Expands `q ∏ (1 - q^{4j})^6` through `q^N` as `∏ (1 - x^j)^6` in `x = q^4`.
///
/// Panics if `N == 0`.
pub fn eta_coefficients(order: u64) -> EtaCoefficients {
    assert!(order >= 1, "expansion order must be positive");
    let m = ((order - 1) / 4) as usize;
    let factors = vec![InfiniteFactor::atoms(1, 1); 6];
    let series = infinite_product(&factors, m).expect("exponents start at 1");
    let mut a = vec![0i64; order as usize];
    for i in 0..=m {
        let c = series.coeff(i);
        assert!(c.is_integer(), "integral product");
        a[4 * i] = c.to_integer().to_i64().expect("coefficient fits in i64");
    }
    EtaCoefficients { order, a }
}

/// `2(a^2 - b^2)` for `p = a^2 + b^2` with `a` odd and `a, b > 0`; zero for
/// `p ≡ 3 (mod 4)` and for `p = 2`.
pub fn a_p_formula(p: u64) -> Result<i64, ModformError> {
    if !is_prime(p) {
        return Err(ModformError::NotPrime(p));
    }
    if p % 4 == 3 {
        return Ok(0);
    }
    let mut a = 1u64;
    while a * a <= p {
        let b2 = p - a * a;
        let b = b2.isqrt();
        if b * b == b2 && b > 0 {
            return Ok(2 * ((a * a) as i64 - b2 as i64));
        }
        a += 2;
    }
    unreachable!("primes p ≡ 1 (mod 4) are sums of two squares")
}

/// The three checks at an odd prime `p`: expansion against the formula,
/// `a(p) ≡ -Γ_p(1/4)^4 (mod p^2)` when `p ≡ 1 (mod 4)`, and
/// `Σ_{k<=(p-1)/2} A_k ≡ a(p) (mod p^2)`.
pub fn verify_modform(p: u64, eta: &EtaCoefficients) -> Result<Verdict, ModformError> {
    let start = Instant::now();
    let formula = a_p_formula(p)?;
    if p == 2 {
        return Err(PadicError::EvenPrime(p).into());
    }
    let expanded = eta.get(p).ok_or(ModformError::OutOfRange { p, order: eta.order })?;
    let ap = embed(&rat(formula), p, 2)?;
    let mut v = Verdict::new("MODFORM").with_p(p);
    let mut notes = vec![format!("a({p}) = {expanded}")];
    let mut passed = expanded == formula;
    if !passed {
        notes.push(format!("formula gives {formula}"));
    }
    if p % 4 == 1 {
        let g = gamma_p(&ratio(1, 4), p, 2)?.pow(4).neg();
        if g != ap {
            passed = false;
            notes.push(format!("-Γ_p(1/4)^4 ≡ {}", g.balanced()));
        }
    } else {
        notes.push("Γ_p check not applicable".into());
    }
    let sum: Rational = padic::h2_sum(p);
    let s = embed(&sum, p, 2)?;
    if s != ap {
        passed = false;
        notes.push(format!("Σ A_k ≡ {}", s.balanced()));
    }
    v.passed = passed;
    v.details = notes.join("; ");
    Ok(v.timed(start))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_coefficients() {
        let eta = eta_coefficients(13);
        let nz: Vec<_> = eta.nonzero().collect();
        assert_eq!(nz, vec![(1, 1), (5, -6), (9, 9), (13, 10)]);
        for n in [2, 3, 4, 6, 7, 8] {
            assert_eq!(eta.get(n), Some(0));
        }
        assert_eq!(eta.get(14), None);
        assert_eq!(eta_coefficients(1).get(1), Some(1));
    }

    /// Independent oracle: multiply out `(1 - x^j)^6` by integer convolution.
    #[test]
    fn expansion_matches_integer_convolution() {
        let m = 60usize;
        let mut poly = vec![0i64; m + 1];
        poly[0] = 1;
        for j in 1..=m {
            for _ in 0..6 {
                for i in (j..=m).rev() {
                    poly[i] -= poly[i - j];
                }
            }
        }
        let eta = eta_coefficients(4 * m as u64 + 1);
        for (i, c) in poly.iter().enumerate() {
            assert_eq!(eta.get(4 * i as u64 + 1), Some(*c));
        }
    }

    #[test]
    fn formula_examples() {
        assert_eq!(a_p_formula(5), Ok(-6));
        assert_eq!(a_p_formula(7), Ok(0));
        assert_eq!(a_p_formula(13), Ok(10));
        assert_eq!(a_p_formula(15), Err(ModformError::NotPrime(15)));
    }

    #[test]
    fn verify_small_primes() {
        let eta = eta_coefficients(100);
        for p in [3, 5, 7, 13] {
            let v = verify_modform(p, &eta).unwrap();
            assert!(v.passed, "p={p}: {}", v.details);
        }
        assert_eq!(
            verify_modform(101, &eta),
            Err(ModformError::OutOfRange { p: 101, order: 100 })
        );
    }

    #[test]
    fn hecke_relation_at_five_is_observed() {
        let eta = eta_coefficients(25);
        let a5 = eta.get(5).unwrap();
        // weight 3: a(25) = a(5)^2 - 5^2 a(1)
        assert_eq!(eta.get(25).unwrap(), a5 * a5 - 25);
    }
}
