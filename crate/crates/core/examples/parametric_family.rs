//! The one-parameter family in `a` and the shift lemma, checked at rational
//! samples and at `a = q^(±2n)`.

use qcong::congruence::{
    default_samples, lemma_sample_bound, parametric_lhs, parametric_sample_bound, verify_lemma21,
    verify_parametric,
};
use qcong::cyclotomic::CyclotomicCache;
use qcong::qseries::{rhs_closed_form, Family, Param};

fn main() {
    let cache = CyclotomicCache::for_odd_up_to(9);

    let n = 5;
    let lhs = parametric_lhs(1, &Param::QPower(2 * n as i64), n - 1).unwrap();
    let rhs = rhs_closed_form(Family::T3, n, 1).unwrap();
    println!("a = q^{}: sum equals closed form: {}", 2 * n, lhs.equals(&rhs));

    for n in [3u64, 5, 7, 9] {
        for ell in 0..=(n - 1) / 2 {
            let samples = default_samples(parametric_sample_bound(n));
            let v = verify_parametric(n, ell, &samples, &cache).unwrap();
            println!("PARAM n={n} ell={ell} {:?}: {} ({})", v.modulus, v.passed, v.details);
        }
    }

    for n in [5u64, 9] {
        for k in 0..=(n - 1) / 2 {
            let v = verify_lemma21(n, k, &default_samples(lemma_sample_bound(n)), &cache).unwrap();
            println!("L21 n={n} k={k}: {}", v.passed);
        }
    }
}
