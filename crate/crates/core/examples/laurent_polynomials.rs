//! Exact Laurent polynomial arithmetic over the rationals.

use qcong::polyring::{ratio, LaurentPoly, Substitution};

fn main() {
    let a = LaurentPoly::from_int_coeffs(-1, &[1, 2, 1]); // q^-1 + 2 + q
    let b = LaurentPoly::from_int_coeffs(0, &[1, 1]).scale(&ratio(1, 2));
    let prod = &a * &b;
    println!("({a}) * ({b}) = {prod}");
    println!("divided back: {}", prod.divexact(&b).unwrap());

    let (quot, rem) = LaurentPoly::from_int_coeffs(0, &[1, 0, 0, 0, 1]).div_rem(&b).unwrap();
    println!("(1 + q^4) = ({b}) * ({quot}) + ({rem})");

    println!("a(1/q) = {}", a.substitute(Substitution::Reciprocal));
    println!("a(-q) = {}", a.substitute(Substitution::Negate));
    println!("a(q^3) = {}", a.substitute(Substitution::Power(3)));
    println!("a at q = 2/3: {}", a.eval(&ratio(2, 3)).unwrap());
}
