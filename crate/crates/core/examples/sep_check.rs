//! Survey of separation conditions across a few complex-type cubic fields.
//!
//! Prints λ, δ and the weak/strong separation thresholds; fields where the
//! strong condition fails need secondary resonances in the envelope.
//!
//! Run: `cargo run --example sep_check --release`

use cubic_splitting::field::CubicField;
use cubic_splitting::koch::{principal_koch, SearchOptions};
use cubic_splitting::rat::ratio_int;
use cubic_splitting::resonances::{classify, oscillation_constants};

fn main() {
    for (name, r, a) in [
        ("golden (x^3 = 1 - x)", [1i64, -1, 0], [0i64, 0, 1]),
        ("x^3 = 2", [2, 0, 0], [0, 0, 1]),
        ("x^3 = 1 - 2x + x^2, ~ = x + x^2", [1, -2, 1], [0, 1, 1]),
        ("x^3 = 1 + x + x^2", [1, 1, 1], [0, 0, 1]),
        ("x^3 = 3 - x", [3, -1, 0], [0, 0, 1]),
        ("x^3 = 1 + x^2 (reciprocal of golden)", [1, 0, 1], [0, 0, 1]),
    ] {
        let field = CubicField::new(
            ratio_int(r[0]),
            ratio_int(r[1]),
            ratio_int(r[2]),
            ratio_int(a[0]),
            ratio_int(a[1]),
            ratio_int(a[2]),
        )
        .expect("valid complex-type field");
        let koch = principal_koch(&field, &SearchOptions::default()).expect("principal matrix");
        let osc = oscillation_constants(&koch).expect("oscillation constants");
        let cls = classify(&koch, &osc, 60.0).expect("classification");
        let c = &cls.constants;
        println!(
            "{name:40} lambda = {:.6}  delta = {:.6}  B0- = {:.4}  J0+ = {:.4}  weak = {:5}  strong = {}",
            koch.lambda.to_f64(),
            c.delta.to_f64(),
            c.b0_minus.to_f64(),
            c.j0_plus.to_f64(),
            c.weak_sep,
            c.strong_sep_input
        );
    }
}
