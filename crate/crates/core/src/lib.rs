//! Exact verification of q-congruences modulo cyclotomic polynomials,
//! truncated q-series identities, and p-adic supercongruences.
//!
//! The modules stack bottom-up:
//!
//! - [`polyring`]: Laurent polynomials over arbitrary-precision rationals.
//! - [`cyclotomic`]: `Φ_n(q)` and index bookkeeping.
//! - [`qseries`]: q-Pochhammer symbols, factored rational functions, family
//!   summands and closed forms, truncated power series.
//! - [`congruence`]: divisibility checks and the per-family drivers.
//! - [`padic`]: residues mod `p^k` and the p-adic Gamma function.
//! - [`modform`]: coefficients of `q ∏ (1 - q^{4j})^6`.
//! - [`cli`]: the batch driver behind the `qcong` binary.

pub mod cli;
pub mod congruence;
pub mod cyclotomic;
pub mod modform;
pub mod padic;
pub mod polyring;
pub mod qseries;

pub use congruence::{ModulusSpec, Verdict};
pub use cyclotomic::CyclotomicCache;
pub use polyring::{LaurentPoly, Rational};
pub use qseries::{Family, PowerSeries, RatFun};
