//! Infinite q-series identities compared coefficient by coefficient.

use qcong::congruence::{expand_series_identity, verify_series_identity, SeriesIdentity};
use qcong::polyring::{rat, ratio};

fn main() {
    let (lhs, _) = expand_series_identity(&SeriesIdentity::Origin, 12).unwrap();
    let coeffs: Vec<String> = (0..=12).map(|t| lhs.coeff(t).to_string()).collect();
    println!("ORIGIN through q^12: {}", coeffs.join(" "));

    let ids = [
        SeriesIdentity::Origin,
        SeriesIdentity::QDixon { ell: 0, b: rat(2), c: rat(3) },
        SeriesIdentity::QDixon { ell: 2, b: ratio(-1, 3), c: rat(5) },
        SeriesIdentity::Watson { a: rat(3) },
        SeriesIdentity::Watson { a: ratio(2, 7) },
    ];
    for id in &ids {
        let v = verify_series_identity(id, 80).unwrap();
        println!("{id}: {} ({}, {} ms)", v.passed, v.details, v.millis);
    }
}
