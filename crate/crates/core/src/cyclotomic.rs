//! Cyclotomic polynomials `Φ_n(q)` and the bookkeeping that lets every
//! coprimality question in the crate be answered from indices alone.

use std::collections::BTreeMap;

use num_traits::One;
use thiserror::Error;

use crate::polyring::{LaurentPoly, Rational, Substitution};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CyclotomicError {
    #[error("invalid cyclotomic index {0}: expected an odd integer greater than 1")]
    InvalidIndex(u64),
    #[error("Φ_{n}(-q) does not expand to Φ_{m}(q)")]
    SignMismatch { n: u64, m: u64 },
}

/// Memo table of expanded cyclotomic polynomials.
///
/// Build it up front with [`CyclotomicCache::with_indices`], then share it by
/// reference; lookups never mutate.
#[derive(Debug, Clone, Default)]
pub struct CyclotomicCache {
    table: BTreeMap<u64, LaurentPoly>,
}

impl CyclotomicCache {
    pub fn new() -> Self {
        Self::default()
    }

    /// A cache holding `Φ_d` for every divisor `d` of every listed index.
    pub fn with_indices<I: IntoIterator<Item = u64>>(indices: I) -> Self {
        let mut cache = Self::new();
        for n in indices {
            cyclotomic(n, &mut cache);
        }
        cache
    }

    /// Everything the q-congruence families need for odd `n <= max_n`:
    /// `Φ_n` and `Φ_2n`.
    pub fn for_odd_up_to(max_n: u64) -> Self {
        Self::with_indices((1..=max_n).step_by(2).flat_map(|n| [n, 2 * n]))
    }

    pub fn get(&self, n: u64) -> Option<&LaurentPoly> {
        self.table.get(&n)
    }

    /// Cached `Φ_n` if present, else a freshly expanded copy.
    pub fn get_or_compute(&self, n: u64) -> std::borrow::Cow<'_, LaurentPoly> {
        match self.table.get(&n) {
            Some(p) => std::borrow::Cow::Borrowed(p),
            None => {
                let mut scratch = Self::new();
                std::borrow::Cow::Owned(cyclotomic(n, &mut scratch))
            }
        }
    }

    pub fn indices(&self) -> impl Iterator<Item = u64> + '_ {
        self.table.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }
}

/// `Φ_n(q)`, computed as `(q^n - 1) / ∏_{d | n, d < n} Φ_d(q)` and memoised.
///
/// Panics if `n == 0`.
pub fn cyclotomic(n: u64, cache: &mut CyclotomicCache) -> LaurentPoly {
    assert!(n >= 1, "cyclotomic index must be positive");
    if let Some(p) = cache.table.get(&n) {
        return p.clone();
    }
    let mut quotient = LaurentPoly::one_minus(&Rational::one(), n as i64).scale(&-Rational::one());
    for d in divisors(n).into_iter().filter(|&d| d < n) {
        let phi_d = cyclotomic(d, cache);
        quotient = quotient
            .divexact(&phi_d)
            .expect("Φ_d divides q^n - 1 for every d | n");
    }
    cache.table.insert(n, quotient.clone());
    quotient
}

/// For odd `n > 1`, returns `2n` after checking `Φ_n(-q) = Φ_2n(q)` by expansion.
pub fn phi_neg_index(n: u64, cache: &mut CyclotomicCache) -> Result<u64, CyclotomicError> {
    if n <= 1 || n.is_multiple_of(2) {
        return Err(CyclotomicError::InvalidIndex(n));
    }
    let negated = cyclotomic(n, cache).substitute(Substitution::Negate);
    let m = 2 * n;
    if negated != cyclotomic(m, cache) {
        return Err(CyclotomicError::SignMismatch { n, m });
    }
    Ok(m)
}

/// Multiplicity of `Φ_d` in `1 - q^m`: one when `d | m`, else zero.
pub fn multiplicity(d: u64, m: u64) -> u32 {
    u32::from(d >= 1 && m >= 1 && m.is_multiple_of(d))
}

pub fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n.is_multiple_of(d) {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

pub fn euler_phi(n: u64) -> u64 {
    let mut result = n;
    let mut m = n;
    let mut p = 2;
    while p * p <= m {
        if m.is_multiple_of(p) {
            while m.is_multiple_of(p) {
                m /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if m > 1 {
        result -= result / m;
    }
    result
}
