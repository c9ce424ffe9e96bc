//! Coefficients of q∏(1 - q^(4j))^6 against the two-squares formula and the
//! p-adic congruences.

use qcong::modform::{a_p_formula, eta_coefficients, verify_modform};
use qcong::padic::odd_primes;

fn main() {
    let eta = eta_coefficients(200);
    let head: Vec<String> = eta.nonzero().take(10).map(|(n, a)| format!("a({n})={a}")).collect();
    println!("{}", head.join(" "));

    for p in odd_primes(3, 60) {
        let v = verify_modform(p, &eta).unwrap();
        println!("p={p:<3} formula {:>4}  {}  {}", a_p_formula(p).unwrap(), if v.passed { "pass" } else { "FAIL" }, v.details);
    }
}
