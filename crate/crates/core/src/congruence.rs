//! Deciding q-congruences modulo products of cyclotomic polynomials.
//!
//! A congruence `lhs ≡ rhs (mod ∏ Φ_m^e)` between rational functions holds
//! when the difference, written in lowest terms, has a numerator divisible
//! by the modulus and a denominator coprime to it. Denominators here are
//! products of named factors, so instead of reducing to lowest terms we add
//! the multiplicity `s` of `Φ_m` in the factored denominator and ask for
//! `Φ_m^{e+s}` to divide the cross-multiplied numerator.

use std::time::Instant;

use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::cyclotomic::CyclotomicCache;
use crate::polyring::Rational;
use crate::qseries::{
    lemma_sides, parametric_term, rhs_closed_form, summand, Family, InfiniteFactor,
    LaurentSeries, LinearFactor, Param, QSeriesError, RatFun,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("out of range: {0}")]
    OutOfRange(String),
    #[error("not applicable for this residue class: {0}")]
    WrongResidueClass(String),
    #[error("need at least {needed} distinct nonzero samples, got {got}")]
    InsufficientSamples { needed: usize, got: usize },
    #[error("parameter choice makes a denominator factor vanish")]
    ParameterPole,
    #[error(transparent)]
    QSeries(QSeriesError),
}

impl From<QSeriesError> for EngineError {
    fn from(e: QSeriesError) -> Self {
        match e {
            QSeriesError::OutOfRange(s) => EngineError::OutOfRange(s),
            QSeriesError::ParameterPole => EngineError::ParameterPole,
            other => EngineError::QSeries(other),
        }
    }
}

/// `∏ Φ_index(q)^exponent`, indices distinct and sorted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ModulusSpec {
    parts: Vec<(u64, u32)>,
}

impl ModulusSpec {
    /// Panics on a repeated index or a zero exponent.
    pub fn new(mut parts: Vec<(u64, u32)>) -> Self {
        parts.sort_unstable();
        for w in parts.windows(2) {
            assert!(w[0].0 != w[1].0, "repeated cyclotomic index {}", w[0].0);
        }
        assert!(parts.iter().all(|&(i, e)| i >= 1 && e >= 1), "indices and exponents must be positive");
        Self { parts }
    }

    /// `Φ_n(q)^a Φ_n(-q)^b`, with `Φ_n(-q)` written as `Φ_2n(q)`.
    pub fn phi_pair(n: u64, a: u32, b: u32) -> Self {
        let mut parts = Vec::new();
        if a > 0 {
            parts.push((n, a));
        }
        if b > 0 {
            parts.push((2 * n, b));
        }
        Self::new(parts)
    }

    pub fn parts(&self) -> &[(u64, u32)] {
        &self.parts
    }

    /// The same modulus with each exponent lowered to at most `cap[i]`.
    pub fn weakened(&self, caps: &[u32]) -> Self {
        Self::new(
            self.parts
                .iter()
                .zip(caps)
                .filter(|(_, &c)| c > 0)
                .map(|(&(i, e), &c)| (i, e.min(c)))
                .collect(),
        )
    }
}

/// One record per checked instance.
///
/// `details` carries degrees and failure data for humans and is left out of
/// the JSON record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub family: String,
    pub n: Option<u64>,
    pub ell: Option<u64>,
    pub p: Option<u64>,
    pub modulus: Vec<(u64, u32)>,
    pub passed: bool,
    pub skipped: bool,
    pub millis: u64,
    #[serde(skip)]
    pub details: String,
}

impl Verdict {
    pub fn new(family: impl Into<String>) -> Self {
        Self {
            family: family.into(),
            n: None,
            ell: None,
            p: None,
            modulus: Vec::new(),
            passed: false,
            skipped: false,
            millis: 0,
            details: String::new(),
        }
    }

    pub fn with_n(mut self, n: u64) -> Self {
        self.n = Some(n);
        self
    }

    pub fn with_ell(mut self, ell: u64) -> Self {
        self.ell = Some(ell);
        self
    }

    pub fn with_p(mut self, p: u64) -> Self {
        self.p = Some(p);
        self
    }

    pub fn with_modulus(mut self, m: &ModulusSpec) -> Self {
        self.modulus = m.parts().to_vec();
        self
    }

    /// A record for an instance outside the family's residue class.
    pub fn skipped(mut self, why: impl Into<String>) -> Self {
        self.skipped = true;
        self.passed = false;
        self.details = why.into();
        self
    }

    pub fn timed(mut self, start: Instant) -> Self {
        self.millis = start.elapsed().as_millis() as u64;
        self
    }

    pub fn failed(&self) -> bool {
        !self.passed && !self.skipped
    }
}

/// Where a divisibility check broke down.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartFailure {
    pub index: u64,
    /// `e + s`: modulus exponent plus denominator multiplicity.
    pub required: u32,
    /// How many factors of `Φ_index` were found before a nonzero remainder.
    pub found: u32,
    pub remainder_degree: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CongruenceOutcome {
    pub passed: bool,
    /// Lowest and highest exponent of the cross-multiplied numerator.
    pub numerator_span: Option<(i64, i64)>,
    pub failure: Option<PartFailure>,
}

impl CongruenceOutcome {
    fn describe(&self) -> String {
        let span = match self.numerator_span {
            Some((lo, hi)) => format!("numerator q^{lo}..q^{hi}"),
            None => "difference is zero".to_string(),
        };
        match &self.failure {
            None => span,
            Some(f) => format!(
                "{span}; Φ_{} divides {} of {} times, remainder degree {}",
                f.index, f.found, f.required, f.remainder_degree
            ),
        }
    }
}

/// Sum over the factor-wise least common multiple of the denominators.
///
/// An empty list sums to zero.
pub fn sum_ratfun(terms: &[RatFun]) -> RatFun {
    let mut iter = terms.iter();
    let Some(first) = iter.next() else {
        return RatFun::zero();
    };
    iter.fold(first.clone(), |acc, t| acc.add(t))
}

/// Decides `lhs ≡ rhs` modulo `modulus`.
pub fn check_congruence(
    lhs: &RatFun,
    rhs: &RatFun,
    modulus: &ModulusSpec,
    cache: &CyclotomicCache,
) -> CongruenceOutcome {
    let delta = lhs.sub(rhs);
    let mut z = delta.num;
    let numerator_span = z.min_exp().zip(z.max_exp());
    if z.is_zero() {
        return CongruenceOutcome {
            passed: true,
            numerator_span,
            failure: None,
        };
    }
    for &(m, e) in modulus.parts() {
        let required = e + delta.den.cyclotomic_multiplicity(m);
        let phi = cache.get_or_compute(m);
        for found in 0..required {
            let (quot, rem) = z.div_rem(&phi).expect("cyclotomic polynomials are nonzero");
            if !rem.is_zero() {
                return CongruenceOutcome {
                    passed: false,
                    numerator_span,
                    failure: Some(PartFailure {
                        index: m,
                        required,
                        found,
                        remainder_degree: rem.max_exp().unwrap_or(0),
                    }),
                };
            }
            z = quot;
        }
    }
    CongruenceOutcome {
        passed: true,
        numerator_span,
        failure: None,
    }
}

/// q-congruence families with a fixed modulus rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TheoremFamily {
    T1,
    T2,
    T3,
    E05,
    /// The `n ≡ 3 (mod 4)` vanishing of the T1 sum modulo `Φ_n(q)^2 Φ_n(-q)`.
    Conj413,
    ModPhi,
}

impl TheoremFamily {
    pub fn tag(self) -> &'static str {
        match self {
            TheoremFamily::T1 => "T1",
            TheoremFamily::T2 => "T2",
            TheoremFamily::T3 => "T3",
            TheoremFamily::E05 => "E05",
            TheoremFamily::Conj413 => "CONJ413",
            TheoremFamily::ModPhi => "MODPHI",
        }
    }

    fn sum_family(self) -> Family {
        match self {
            TheoremFamily::T1 | TheoremFamily::Conj413 => Family::T1,
            TheoremFamily::T2 => Family::T2,
            TheoremFamily::T3 => Family::T3,
            TheoremFamily::E05 => Family::E05,
            TheoremFamily::ModPhi => Family::ModPhi,
        }
    }

    /// Modulus prescribed for odd `n`.
    pub fn modulus(self, n: u64, ell: u64) -> ModulusSpec {
        let one_mod_four = n % 4 == 1;
        match self {
            TheoremFamily::T1 if one_mod_four => ModulusSpec::phi_pair(n, 2, 3),
            TheoremFamily::T1 => ModulusSpec::phi_pair(n, 3, 3),
            TheoremFamily::T2 if one_mod_four => ModulusSpec::phi_pair(n, 3, 3),
            TheoremFamily::T2 => ModulusSpec::phi_pair(n, 2, 3),
            TheoremFamily::T3 if (n + 2 * ell) % 4 == 1 => ModulusSpec::phi_pair(n, 2, 3),
            TheoremFamily::T3 => ModulusSpec::phi_pair(n, 3, 3),
            TheoremFamily::E05 | TheoremFamily::Conj413 => ModulusSpec::phi_pair(n, 2, 1),
            TheoremFamily::ModPhi => ModulusSpec::phi_pair(n, 2, 0),
        }
    }

    /// Checks the family's preconditions on `(n, ell)`.
    pub fn validate(self, n: u64, ell: u64) -> Result<(), EngineError> {
        if n == 0 || n.is_multiple_of(2) {
            return Err(EngineError::OutOfRange(format!("n = {n} must be a positive odd integer")));
        }
        match self {
            TheoremFamily::T2 if n == 1 => Err(EngineError::OutOfRange("T2 needs n > 1".into())),
            TheoremFamily::Conj413 if n % 4 != 3 => Err(EngineError::WrongResidueClass(format!(
                "CONJ413 needs n ≡ 3 (mod 4), got n = {n}"
            ))),
            TheoremFamily::T3 if ell > (n - 1) / 2 => Err(EngineError::OutOfRange(format!(
                "ell = {ell} exceeds (n-1)/2 for n = {n}"
            ))),
            _ => Ok(()),
        }
    }
}

/// Left-hand sum of the family over `0 <= k <= upper`.
pub fn family_lhs(family: Family, n: u64, ell: u64, upper: u64) -> Result<RatFun, EngineError> {
    let terms = (0..=upper)
        .map(|k| summand(family, n, ell, k))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(sum_ratfun(&terms))
}

/// Both sides of the family's congruence, summing up to `upper` (default:
/// the family's own range).
pub fn theorem_sides(
    family: TheoremFamily,
    n: u64,
    ell: u64,
    upper: Option<u64>,
) -> Result<(RatFun, RatFun), EngineError> {
    family.validate(n, ell)?;
    let sum_family = family.sum_family();
    let upper = upper.unwrap_or_else(|| sum_family.upper(n));
    let lhs = family_lhs(sum_family, n, ell, upper)?;
    let rhs = match family {
        TheoremFamily::Conj413 => RatFun::zero(),
        _ => rhs_closed_form(sum_family, n, ell)?,
    };
    Ok((lhs, rhs))
}

/// Verifies one instance of a q-congruence family.
pub fn verify_theorem(
    family: TheoremFamily,
    n: u64,
    ell: u64,
    cache: &CyclotomicCache,
) -> Result<Verdict, EngineError> {
    verify_theorem_truncated(family, n, ell, None, cache)
}

/// As [`verify_theorem`], summing only up to `upper` when given.
pub fn verify_theorem_truncated(
    family: TheoremFamily,
    n: u64,
    ell: u64,
    upper: Option<u64>,
    cache: &CyclotomicCache,
) -> Result<Verdict, EngineError> {
    let start = Instant::now();
    let (lhs, rhs) = theorem_sides(family, n, ell, upper)?;
    let mut v = Verdict::new(family.tag()).with_n(n);
    if family == TheoremFamily::T3 {
        v = v.with_ell(ell);
    }
    if n == 1 {
        v.passed = lhs.equals(&rhs);
        v.details = "n = 1: exact equality".into();
        return Ok(v.timed(start));
    }
    let modulus = family.modulus(n, ell);
    let outcome = check_congruence(&lhs, &rhs, &modulus, cache);
    v = v.with_modulus(&modulus);
    v.passed = outcome.passed;
    v.details = outcome.describe();
    Ok(v.timed(start))
}

/// T3 with both truncations, `k <= n - 1` and `k <= (n-1)/2 + ell`.
pub fn verify_t3_both_ranges(
    n: u64,
    ell: u64,
    cache: &CyclotomicCache,
) -> Result<(Verdict, Verdict), EngineError> {
    let full = verify_theorem_truncated(TheoremFamily::T3, n, ell, None, cache)?;
    let short = verify_theorem_truncated(TheoremFamily::T3, n, ell, Some((n - 1) / 2 + ell), cache)?;
    Ok((full, short))
}

/// The first `count` primes as rationals: `2, 3, 5, 7, ...`.
pub fn default_samples(count: usize) -> Vec<Rational> {
    let mut out = Vec::with_capacity(count);
    let mut c = 2u64;
    while out.len() < count {
        if crate::padic::is_prime(c) {
            out.push(Rational::from_integer(c.into()));
        }
        c += 1;
    }
    out
}

fn validate_samples(samples: &[Rational], needed: usize) -> Result<(), EngineError> {
    let mut distinct: Vec<&Rational> = samples.iter().filter(|a| !a.is_zero()).collect();
    distinct.sort();
    distinct.dedup();
    if distinct.len() < needed || distinct.len() != samples.len() {
        return Err(EngineError::InsufficientSamples {
            needed,
            got: distinct.len(),
        });
    }
    Ok(())
}

/// Minimum sample count for the shift lemma at `n`.
pub fn lemma_sample_bound(n: u64) -> usize {
    n as usize + 2
}

/// Minimum sample count for the parametric family at `n`: one more than the
/// `a`-degree bound `2(n+1)` of the cleared numerator.
pub fn parametric_sample_bound(n: u64) -> usize {
    2 * (n as usize + 1) + 1
}

/// Checks the shift lemma modulo `Φ_n(q)` at every sample value of `a`.
pub fn verify_lemma21(
    n: u64,
    k: u64,
    samples: &[Rational],
    cache: &CyclotomicCache,
) -> Result<Verdict, EngineError> {
    let start = Instant::now();
    if n <= 1 || n.is_multiple_of(2) {
        return Err(EngineError::OutOfRange(format!("n = {n} must be odd and > 1")));
    }
    if k > (n - 1) / 2 {
        return Err(EngineError::OutOfRange(format!("k = {k} exceeds (n-1)/2")));
    }
    validate_samples(samples, lemma_sample_bound(n))?;
    let modulus = ModulusSpec::new(vec![(n, 1)]);
    let mut v = Verdict::new("L21").with_n(n).with_ell(k).with_modulus(&modulus);
    v.passed = true;
    for a in samples {
        let (lhs, rhs) = lemma_sides(n, k, a)?;
        let outcome = check_congruence(&lhs, &rhs, &modulus, cache);
        if !outcome.passed {
            v.passed = false;
            v.details = format!("a = {a}: {}", outcome.describe());
            return Ok(v.timed(start));
        }
    }
    v.details = format!("{} samples", samples.len());
    Ok(v.timed(start))
}

/// Left side of the parametric family summed over `0 <= k <= upper`.
pub fn parametric_lhs(ell: u64, a: &Param, upper: u64) -> Result<RatFun, EngineError> {
    let terms = (0..=upper)
        .map(|k| parametric_term(k, ell as i64, a))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(sum_ratfun(&terms))
}

/// Modulus of the sampled part of the parametric check: `Φ_n(-q)` when
/// `n + 2ℓ ≡ 1 (mod 4)`, else `Φ_n(q^2) = Φ_n(q) Φ_n(-q)`.
pub fn parametric_modulus(n: u64, ell: u64) -> ModulusSpec {
    if (n + 2 * ell) % 4 == 1 {
        ModulusSpec::phi_pair(n, 0, 1)
    } else {
        ModulusSpec::phi_pair(n, 1, 1)
    }
}

/// Verifies the parametric family in three parts: exact evaluation at
/// `a = q^{2n}` and `a = q^{-2n}`, and the cyclotomic congruence at every
/// rational sample, each over both summation ranges.
pub fn verify_parametric(
    n: u64,
    ell: u64,
    samples: &[Rational],
    cache: &CyclotomicCache,
) -> Result<Verdict, EngineError> {
    let start = Instant::now();
    if n <= 1 || n.is_multiple_of(2) {
        return Err(EngineError::OutOfRange(format!("n = {n} must be odd and > 1")));
    }
    if ell > (n - 1) / 2 {
        return Err(EngineError::OutOfRange(format!("ell = {ell} exceeds (n-1)/2")));
    }
    validate_samples(samples, parametric_sample_bound(n))?;
    let rhs = rhs_closed_form(Family::T3, n, ell)?;
    let ranges = [n - 1, (n - 1) / 2 + ell];
    let modulus = parametric_modulus(n, ell);
    let mut v = Verdict::new("PARAM").with_n(n).with_ell(ell).with_modulus(&modulus);

    for shift in [2 * n as i64, -2 * n as i64] {
        for &upper in &ranges {
            let lhs = parametric_lhs(ell, &Param::QPower(shift), upper)?;
            if !lhs.equals(&rhs) {
                v.details = format!("a = q^{shift}, k <= {upper}: sum differs from closed form");
                return Ok(v.timed(start));
            }
        }
    }
    for a in samples {
        for &upper in &ranges {
            let lhs = parametric_lhs(ell, &Param::Scalar(a.clone()), upper)?;
            let outcome = check_congruence(&lhs, &rhs, &modulus, cache);
            if !outcome.passed {
                v.details = format!("a = {a}, k <= {upper}: {}", outcome.describe());
                return Ok(v.timed(start));
            }
        }
    }
    v.passed = true;
    v.details = format!("exact at a = q^±{}; {} samples", 2 * n, samples.len());
    Ok(v.timed(start))
}

/// True when `r(1/q) = r(q)`.
pub fn check_self_reciprocal(r: &RatFun) -> bool {
    r.reciprocal().equals(r)
}

/// Infinite q-series identities checked coefficient by coefficient.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SeriesIdentity {
    /// The cubic T1 sum extended to infinity against its product form.
    Origin,
    /// The q-Dixon specialisation with free parameters `b`, `c`.
    QDixon { ell: u64, b: Rational, c: Rational },
    /// The Watson-type identity with free parameter `a`.
    Watson { a: Rational },
}

impl SeriesIdentity {
    pub fn tag(&self) -> &'static str {
        match self {
            SeriesIdentity::Origin => "ORIGIN",
            SeriesIdentity::QDixon { .. } => "QDIXON",
            SeriesIdentity::Watson { .. } => "WATSON",
        }
    }
}

impl std::fmt::Display for SeriesIdentity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SeriesIdentity::Origin => write!(f, "ORIGIN"),
            SeriesIdentity::QDixon { ell, b, c } => write!(f, "QDIXON ell={ell} b={b} c={c}"),
            SeriesIdentity::Watson { a } => write!(f, "WATSON a={a}"),
        }
    }
}

/// Multiplier taking term `k` of a hypergeometric sum to term `k + 1`.
struct TermRatio {
    num: Vec<LinearFactor>,
    den: Vec<LinearFactor>,
    coeff: Rational,
    shift: i64,
}

impl TermRatio {
    /// Whether every later ratio also raises the valuation; ratios of all
    /// supported identities have exponents increasing in `k`.
    fn raises_valuation(&self) -> bool {
        self.shift >= 1 && self.num.iter().chain(&self.den).all(|f| f.exp > 0)
    }
}

struct SeriesSides {
    ratio: Box<dyn Fn(i64) -> TermRatio>,
    rhs_num_finite: Vec<LinearFactor>,
    rhs_den_finite: Vec<LinearFactor>,
    rhs_num: Vec<InfiniteFactor>,
    rhs_den: Vec<InfiniteFactor>,
}

fn lf(c: &Rational, e: i64) -> LinearFactor {
    LinearFactor::new(c.clone(), e)
}

fn inf(c: &Rational, start: i64, step: u64) -> InfiniteFactor {
    InfiniteFactor::new(c.clone(), start, step)
}

fn series_sides(id: &SeriesIdentity) -> Result<SeriesSides, EngineError> {
    let one = Rational::one();
    let m1 = -Rational::one();
    let sides = match id.clone() {
        SeriesIdentity::Origin => SeriesSides {
            ratio: Box::new(move |k| {
                let one = Rational::one();
                let m1 = -Rational::one();
                TermRatio {
                    num: vec![lf(&m1, 4 * k + 5), lf(&one, 4 * k + 2), lf(&one, 4 * k + 2), lf(&one, 4 * k + 2)],
                    den: vec![lf(&m1, 4 * k + 1), lf(&one, 4 * k + 4), lf(&one, 4 * k + 4), lf(&one, 4 * k + 4)],
                    coeff: one,
                    shift: 1,
                }
            }),
            rhs_num_finite: vec![],
            rhs_den_finite: vec![lf(&m1, 1)],
            rhs_num: vec![inf(&one, 2, 4), inf(&one, 2, 4), inf(&one, 3, 4), inf(&one, 3, 4)],
            rhs_den: vec![inf(&one, 1, 4), inf(&one, 1, 4), inf(&one, 4, 4), inf(&one, 4, 4)],
        },
        SeriesIdentity::QDixon { ell, b, c } => {
            if b.is_zero() || c.is_zero() {
                return Err(EngineError::ParameterPole);
            }
            let l = ell as i64;
            let (bi, ci) = (b.recip(), c.recip());
            let bci = &bi * &ci;
            let (b2, c2, bi2, ci2, bci2) = (b.clone(), c.clone(), bi.clone(), ci.clone(), bci.clone());
            SeriesSides {
                ratio: Box::new(move |k| {
                    let one = Rational::one();
                    let m1 = -Rational::one();
                    let base = 2 - 4 * l + 4 * k;
                    TermRatio {
                        num: vec![lf(&m1, 4 * k - 2 * l + 5), lf(&one, base), lf(&b2, base), lf(&c2, base)],
                        den: vec![lf(&m1, 4 * k - 2 * l + 1), lf(&bi2, 4 * k + 4), lf(&ci2, 4 * k + 4), lf(&one, 4 * k + 4)],
                        coeff: bci2.clone(),
                        shift: 6 * l + 1,
                    }
                }),
                rhs_num_finite: vec![],
                rhs_den_finite: vec![],
                rhs_num: vec![inf(&one, 6 - 4 * l, 4), inf(&bi, 2 * l + 3, 4), inf(&ci, 2 * l + 3, 4), inf(&bci, 4 * l + 2, 4)],
                rhs_den: vec![inf(&bi, 4, 4), inf(&ci, 4, 4), inf(&one, 5 - 2 * l, 4), inf(&bci, 6 * l + 1, 4)],
            }
        }
        SeriesIdentity::Watson { a } => {
            if a.is_zero() {
                return Err(EngineError::ParameterPole);
            }
            let ai = a.recip();
            let (ma, mai) = (-a.clone(), -ai.clone());
            let (a2, ai2, ma2, mai2) = (a.clone(), ai.clone(), ma.clone(), mai.clone());
            SeriesSides {
                ratio: Box::new(move |k| {
                    let one = Rational::one();
                    let m1 = -Rational::one();
                    TermRatio {
                        num: vec![
                            lf(&m1, 4 * k + 5),
                            lf(&a2, 2 * k + 1),
                            lf(&ai2, 2 * k + 1),
                            lf(&m1, 2 * k + 1),
                            lf(&m1, 2 * k + 1),
                            lf(&one, 4 * k + 2),
                        ],
                        den: vec![
                            lf(&m1, 4 * k + 1),
                            lf(&one, 2 * k + 2),
                            lf(&one, 2 * k + 2),
                            lf(&ma2, 2 * k + 2),
                            lf(&mai2, 2 * k + 2),
                            lf(&one, 4 * k + 4),
                        ],
                        coeff: one,
                        shift: 1,
                    }
                }),
                rhs_num_finite: vec![],
                rhs_den_finite: vec![lf(&m1, 1)],
                rhs_num: vec![
                    inf(&m1, 1, 2),
                    inf(&m1, 1, 2),
                    inf(&a, 3, 4),
                    inf(&a, 3, 4),
                    inf(&ai, 3, 4),
                    inf(&ai, 3, 4),
                ],
                rhs_den: vec![inf(&ma, 2, 2), inf(&mai, 2, 2), inf(&one, 2, 2), inf(&one, 2, 2)],
            }
        }
    };
    Ok(sides)
}

/// Both sides of a series identity, each known at least through `q^order`.
pub fn expand_series_identity(
    id: &SeriesIdentity,
    order: usize,
) -> Result<(LaurentSeries, LaurentSeries), EngineError> {
    let sides = series_sides(id)?;
    let target = order as i64;
    let mut pad = 0i64;
    loop {
        let precision = target + pad;
        let lhs = expand_sum(&sides, target, precision)?;
        let mut rhs = LaurentSeries::one(precision);
        for f in &sides.rhs_num_finite {
            rhs.mul_linear(&f.coeff, f.exp);
        }
        for f in &sides.rhs_num {
            rhs.mul_infinite(f);
        }
        for f in &sides.rhs_den_finite {
            rhs.div_linear(&f.coeff, f.exp)?;
        }
        for f in &sides.rhs_den {
            rhs.div_infinite(f)?;
        }
        let reached = lhs.high().min(rhs.high());
        if reached >= target {
            return Ok((lhs, rhs));
        }
        pad += target - reached;
    }
}

/// Partial sum of the left side containing every term that can reach `q^target`.
fn expand_sum(sides: &SeriesSides, target: i64, precision: i64) -> Result<LaurentSeries, EngineError> {
    const MAX_TERMS: i64 = 1_000_000;
    let mut term = LaurentSeries::one(precision);
    let mut total = term.clone();
    for k in 0..MAX_TERMS {
        let ratio = (sides.ratio)(k);
        let mut zero = false;
        for f in &ratio.num {
            if f.exp == 0 && f.coeff.is_one() {
                zero = true;
            }
            term.mul_linear(&f.coeff, f.exp);
        }
        if zero {
            return Ok(total);
        }
        for f in &ratio.den {
            term.div_linear(&f.coeff, f.exp)?;
        }
        term.scale(&ratio.coeff);
        term.shift(ratio.shift);
        let settled = ratio.raises_valuation();
        let beyond = term.valuation().is_none_or(|v| v > target) && term.high() >= target;
        if settled && beyond {
            return Ok(total);
        }
        total = total.add(&term);
    }
    Err(EngineError::OutOfRange("series sum did not settle".into()))
}

/// Expands both sides through `q^order` and compares every coefficient.
pub fn verify_series_identity(id: &SeriesIdentity, order: usize) -> Result<Verdict, EngineError> {
    let start = Instant::now();
    let (lhs, rhs) = expand_series_identity(id, order)?;
    let mut v = Verdict::new(id.tag());
    if let SeriesIdentity::QDixon { ell, .. } = id {
        v = v.with_ell(*ell);
    }
    let low = lhs.low().min(rhs.low());
    let mismatch = (low..=order as i64).find(|&t| lhs.coeff(t) != rhs.coeff(t));
    v.passed = mismatch.is_none();
    v.details = match mismatch {
        None => format!("coefficients q^{low}..q^{order} agree"),
        Some(t) => format!("first mismatch at q^{t}: {} vs {}", lhs.coeff(t), rhs.coeff(t)),
    };
    Ok(v.timed(start))
}

/// The constant-term check: the coefficient of `q^0` on both sides.
pub fn series_constant_terms(id: &SeriesIdentity) -> Result<(Rational, Rational), EngineError> {
    let (lhs, rhs) = expand_series_identity(id, 0)?;
    Ok((lhs.coeff(0), rhs.coeff(0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyring::{rat, LaurentPoly};

    #[test]
    fn sum_examples() {
        let a = RatFun::one().div_linear(&LinearFactor::atom(1)).unwrap();
        let s = sum_ratfun(&[a.clone(), a.shift(1)]);
        let expected = RatFun::from(LaurentPoly::from_int_coeffs(0, &[1, 1]))
            .div_linear(&LinearFactor::atom(1))
            .unwrap();
        assert!(s.equals(&expected));
        assert!(sum_ratfun(&[RatFun::one()]).equals(&RatFun::one()));
        assert!(sum_ratfun(&[]).is_zero());
    }

    #[test]
    fn t1_terms_at_three_share_one_denominator() {
        let lhs = family_lhs(Family::T1, 3, 0, 1).unwrap();
        let atoms: Vec<_> = lhs.den.atoms().collect();
        // (1 + q) becomes (1 - q^2)/(1 - q); (q^4;q^4)_1^3 is (1 - q^4)^3
        assert_eq!(atoms, vec![(2, 1), (4, 3)]);
    }

    #[test]
    fn congruence_examples() {
        let cache = CyclotomicCache::for_odd_up_to(9);
        let r = summand(Family::T1, 5, 0, 2).unwrap();
        let m = ModulusSpec::phi_pair(3, 3, 3);
        assert!(check_congruence(&r, &r, &m, &cache).passed);

        let pole = RatFun::one().div_linear(&LinearFactor::atom(3)).unwrap();
        let out = check_congruence(&pole, &RatFun::zero(), &ModulusSpec::new(vec![(3, 1)]), &cache);
        assert!(!out.passed);
        let f = out.failure.unwrap();
        assert_eq!((f.index, f.required, f.found), (3, 2, 0));
    }

    #[test]
    fn t1_at_three_passes_with_full_modulus() {
        let cache = CyclotomicCache::for_odd_up_to(3);
        let v = verify_theorem(TheoremFamily::T1, 3, 0, &cache).unwrap();
        assert!(v.passed, "{}", v.details);
        assert_eq!(v.modulus, vec![(3, 3), (6, 3)]);
    }

    /// Independent expansion oracle: clear all denominators by brute-force
    /// multiplication of expanded polynomials, then divide by the expanded
    /// modulus in one go.
    #[test]
    fn t1_at_three_expansion_oracle() {
        let (lhs, rhs) = theorem_sides(TheoremFamily::T1, 3, 0, None).unwrap();
        let (ln, ld) = (lhs.num.clone(), lhs.den.to_poly());
        let (rn, rd) = (rhs.num.clone(), rhs.den.to_poly());
        let z = &(&ln * &rd) - &(&rn * &ld);
        let phi3 = LaurentPoly::from_int_coeffs(0, &[1, 1, 1]);
        let phi6 = LaurentPoly::from_int_coeffs(0, &[1, -1, 1]);
        let modulus = &phi3.pow(3) * &phi6.pow(3);
        assert!(z.divexact(&modulus).is_ok());
        // The denominators carry no Φ_3 or Φ_6 at n = 3, so one extra power
        // must fail.
        assert!(z.divexact(&(&modulus * &phi3)).is_err() || z.divexact(&(&modulus * &phi6)).is_err());
        for d in [&ld, &rd] {
            assert!(d.divexact(&phi3).is_err());
            assert!(d.divexact(&phi6).is_err());
        }
    }

    #[test]
    fn n_equal_one() {
        let cache = CyclotomicCache::new();
        let v = verify_theorem(TheoremFamily::T1, 1, 0, &cache).unwrap();
        assert!(v.passed);
        assert!(v.modulus.is_empty());
        assert!(matches!(
            verify_theorem(TheoremFamily::T2, 1, 0, &cache),
            Err(EngineError::OutOfRange(_))
        ));
        assert!(matches!(
            verify_theorem(TheoremFamily::Conj413, 5, 0, &cache),
            Err(EngineError::WrongResidueClass(_))
        ));
        assert!(matches!(
            verify_theorem(TheoremFamily::T1, 4, 0, &cache),
            Err(EngineError::OutOfRange(_))
        ));
    }

    #[test]
    fn t3_ell_zero_matches_t1_inputs() {
        for n in [3u64, 5, 7, 9] {
            let (l3, r3) = theorem_sides(TheoremFamily::T3, n, 0, Some((n - 1) / 2)).unwrap();
            let (l1, r1) = theorem_sides(TheoremFamily::T1, n, 0, None).unwrap();
            assert!(l3.equals(&l1));
            assert!(r3.equals(&r1));
            assert_eq!(TheoremFamily::T3.modulus(n, 0), TheoremFamily::T1.modulus(n, 0));
        }
    }

    #[test]
    fn lemma_examples() {
        let cache = CyclotomicCache::for_odd_up_to(5);
        let s = default_samples(7);
        for (n, k) in [(3, 0), (3, 1), (5, 1), (5, 2)] {
            let v = verify_lemma21(n, k, &s, &cache).unwrap();
            assert!(v.passed, "n={n} k={k}: {}", v.details);
        }
        assert_eq!(
            verify_lemma21(5, 0, &s[..3], &cache),
            Err(EngineError::InsufficientSamples { needed: 7, got: 3 })
        );
        let dup = vec![rat(2); 8];
        assert!(matches!(
            verify_lemma21(5, 0, &dup, &cache),
            Err(EngineError::InsufficientSamples { .. })
        ));
    }

    #[test]
    fn parametric_small() {
        let cache = CyclotomicCache::for_odd_up_to(3);
        let v = verify_parametric(3, 0, &default_samples(9), &cache).unwrap();
        assert!(v.passed, "{}", v.details);
        assert_eq!(
            verify_parametric(3, 0, &default_samples(8), &cache),
            Err(EngineError::InsufficientSamples { needed: 9, got: 8 })
        );
    }

    #[test]
    fn parametric_at_q_power_terminates_to_closed_form() {
        for n in [3u64, 5] {
            for ell in 0..=(n - 1) / 2 {
                let lhs = parametric_lhs(ell, &Param::QPower(2 * n as i64), n - 1).unwrap();
                let rhs = rhs_closed_form(Family::T3, n, ell).unwrap();
                assert!(lhs.equals(&rhs), "n={n} ell={ell}");
            }
        }
    }

    #[test]
    fn parametric_at_a_equal_one_is_t3() {
        let lhs = parametric_lhs(1, &Param::Scalar(Rational::one()), 4).unwrap();
        let t3 = family_lhs(Family::T3, 5, 1, 4).unwrap();
        assert!(lhs.equals(&t3));
    }

    #[test]
    fn self_reciprocal_examples() {
        assert!(check_self_reciprocal(&RatFun::from(LaurentPoly::from_int_coeffs(-1, &[1, 1, 1]))));
        assert!(!check_self_reciprocal(&RatFun::from(LaurentPoly::from_int_coeffs(0, &[1, 1]))));
        let (l, r) = theorem_sides(TheoremFamily::T1, 5, 0, None).unwrap();
        assert!(check_self_reciprocal(&l));
        assert!(check_self_reciprocal(&r));
    }

    #[test]
    fn series_constant_term() {
        let (a, b) = series_constant_terms(&SeriesIdentity::Origin).unwrap();
        assert_eq!(a, Rational::one());
        assert_eq!(b, Rational::one());
        assert!(verify_series_identity(&SeriesIdentity::Origin, 0).unwrap().passed);
    }

    #[test]
    fn series_small_orders() {
        assert!(verify_series_identity(&SeriesIdentity::Origin, 40).unwrap().passed);
        let v = verify_series_identity(
            &SeriesIdentity::QDixon { ell: 0, b: rat(2), c: rat(3) },
            30,
        )
        .unwrap();
        assert!(v.passed, "{}", v.details);
        assert!(verify_series_identity(&SeriesIdentity::Watson { a: rat(3) }, 30).unwrap().passed);
        assert_eq!(
            verify_series_identity(&SeriesIdentity::Watson { a: rat(0) }, 5),
            Err(EngineError::ParameterPole)
        );
    }

    #[test]
    fn wrong_identity_is_caught() {
        // Perturb the ORIGIN product by one extra factor (1 - q^7).
        let mut sides = series_sides(&SeriesIdentity::Origin).unwrap();
        sides.rhs_num_finite.push(LinearFactor::atom(7));
        let lhs = expand_sum(&sides, 20, 20).unwrap();
        let mut rhs = LaurentSeries::one(20);
        rhs.mul_linear(&Rational::one(), 7);
        for f in &sides.rhs_num {
            rhs.mul_infinite(f);
        }
        rhs.div_linear(&-Rational::one(), 1).unwrap();
        for f in &sides.rhs_den {
            rhs.div_infinite(f).unwrap();
        }
        assert!((0..=20).any(|t| lhs.coeff(t) != rhs.coeff(t)));
    }

    #[test]
    fn monotone_in_exponents() {
        let cache = CyclotomicCache::for_odd_up_to(11);
        for n in [5u64, 7, 9, 11] {
            let (lhs, rhs) = theorem_sides(TheoremFamily::T1, n, 0, None).unwrap();
            let m = TheoremFamily::T1.modulus(n, 0);
            assert!(check_congruence(&lhs, &rhs, &m, &cache).passed);
            for caps in [[1u32, 1], [2, 2], [1, 3], [2, 0], [0, 1]] {
                let weaker = m.weakened(&caps);
                assert!(check_congruence(&lhs, &rhs, &weaker, &cache).passed);
            }
        }
    }
}
