//! Cyclotomic polynomials and the index bookkeeping used by the congruence checks.

use qcong::cyclotomic::{cyclotomic, divisors, phi_neg_index, CyclotomicCache};
use qcong::polyring::LaurentPoly;

fn main() {
    let mut cache = CyclotomicCache::new();
    for n in [1, 2, 3, 6, 9, 12, 15, 105] {
        println!("Φ_{n} = {}", cyclotomic(n, &mut cache));
    }

    let n = 36;
    let product = divisors(n)
        .into_iter()
        .fold(LaurentPoly::one(), |acc, d| &acc * &cyclotomic(d, &mut cache));
    println!("∏_(d | {n}) Φ_d = {product}");

    for n in [3, 5, 7] {
        let m = phi_neg_index(n, &mut cache).unwrap();
        println!("Φ_{n}(-q) = Φ_{m}(q)");
    }
}
