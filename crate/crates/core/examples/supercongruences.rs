//! The classical supercongruences at small primes, with the p-adic Gamma
//! function evaluated modulo p^k.

use qcong::padic::{embed, gamma_p, odd_primes, verify_classical, ClassicalFamily};
use qcong::polyring::ratio;

fn main() {
    for p in [5u64, 13, 17] {
        let g = gamma_p(&ratio(1, 4), p, 2).unwrap();
        println!("Γ_{p}(1/4) ≡ {} (mod {p}^2), Γ_{p}(1/2)^2 ≡ {}", g.balanced(), gamma_p(&ratio(1, 2), p, 2).unwrap().pow(2).balanced());
    }
    println!("3/8 in Z/27: {}", embed(&ratio(3, 8), 3, 3).unwrap().residue());

    for family in ClassicalFamily::ALL {
        let mut line = format!("{:<7}", family.tag());
        for p in odd_primes(3, 41) {
            let mark = match verify_classical(family, p) {
                Ok(v) if v.passed => "+",
                Ok(_) => "x",
                Err(_) => ".",
            };
            line.push_str(mark);
        }
        println!("{line}   (+ pass, x fail, . not applicable; p = 3..41)");
    }
}
