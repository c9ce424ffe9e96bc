//! Checking the cubic q-congruence families modulo cyclotomic powers.
//!
//! `cargo run --example q_congruences -- 21` runs every family up to n = 21.

use qcong::congruence::{verify_t3_both_ranges, verify_theorem, TheoremFamily};
use qcong::cyclotomic::CyclotomicCache;

fn main() {
    let max_n: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(13);
    let cache = CyclotomicCache::for_odd_up_to(max_n);

    for family in [TheoremFamily::T1, TheoremFamily::T2, TheoremFamily::E05, TheoremFamily::ModPhi] {
        for n in (1..=max_n).step_by(2) {
            match verify_theorem(family, n, 0, &cache) {
                Ok(v) => println!(
                    "{:<7} n={n:<3} {:?} {} ({})",
                    v.family,
                    v.modulus,
                    if v.passed { "pass" } else { "FAIL" },
                    v.details
                ),
                Err(e) => println!("{:<7} n={n:<3} skipped: {e}", family.tag()),
            }
        }
    }

    for n in (3..=max_n.min(11)).step_by(2) {
        for ell in 0..=(n - 1) / 2 {
            let (full, short) = verify_t3_both_ranges(n, ell, &cache).unwrap();
            println!("T3 n={n} ell={ell} {:?}: full {} short {}", full.modulus, full.passed, short.passed);
        }
    }
}
