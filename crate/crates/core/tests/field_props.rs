//! Property tests for the exact field arithmetic and its embeddings.

use num_rational::BigRational;
use proptest::prelude::*;

use cubic_splitting::field::{CubicField, FieldElement};
use cubic_splitting::rat::{ratio_from_i64, ratio_int};

fn golden() -> CubicField {
    CubicField::new(
        ratio_int(1),
        ratio_int(-1),
        ratio_int(0),
        ratio_int(0),
        ratio_int(0),
        ratio_int(1),
    )
    .unwrap()
}

fn cbrt2_field() -> CubicField {
    CubicField::new(
        ratio_int(2),
        ratio_int(0),
        ratio_int(0),
        ratio_int(0),
        ratio_int(0),
        ratio_int(1),
    )
    .unwrap()
}

fn rational_strategy() -> impl Strategy<Value = BigRational> {
    (-40i64..=40, 1i64..=12).prop_map(|(n, d)| ratio_from_i64(n, d))
}

fn elem_strategy() -> impl Strategy<Value = FieldElement> {
    (rational_strategy(), rational_strategy(), rational_strategy())
        .prop_map(|(a, b, c)| FieldElement::from_coords(a, b, c))
}

proptest! {
    #[test]
    fn inverse_round_trips_exactly(x in elem_strategy()) {
        let f = golden();
        prop_assume!(!x.is_zero());
        let xi = f.inv(&x).unwrap();
        prop_assert_eq!(f.mul(&x, &xi), FieldElement::one());
        // and through a product: (x·y)⁻¹·x·y = 1
        let y = FieldElement::from_i64s(2, -1, 3);
        let p = f.mul(&x, &y);
        let pi = f.inv(&p).unwrap();
        prop_assert_eq!(f.mul(&p, &pi), FieldElement::one());
    }

    #[test]
    fn ring_identities(x in elem_strategy(), y in elem_strategy(), z in elem_strategy()) {
        let f = cbrt2_field();
        prop_assert_eq!(f.mul(&x, &y), f.mul(&y, &x));
        prop_assert_eq!(f.mul(&f.mul(&x, &y), &z), f.mul(&x, &f.mul(&y, &z)));
        prop_assert_eq!(
            f.mul(&x, &y.add(&z)),
            f.mul(&x, &y).add(&f.mul(&x, &z))
        );
    }

    #[test]
    fn sign_matches_embedding_order(x in elem_strategy(), y in elem_strategy()) {
        let f = golden();
        let d = x.sub(&y);
        let sign = f.sign(&d);
        let ed = f.embed_real(&d).to_f64();
        // when the embedding is comfortably away from zero the orders agree
        if ed.abs() > 1e-12 {
            prop_assert_eq!(sign, if ed > 0.0 { 1 } else { -1 });
        } else {
            // near-zero embeddings still get a definite exact answer
            prop_assert!(sign == 0 || d.is_zero() == (sign == 0));
        }
    }
}

#[test]
fn embedding_is_multiplicative() {
    // 1000 random pairs on two fields, both embeddings, 1e-12 relative
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
    for field in [golden(), cbrt2_field()] {
        let field = field.with_sign(-1);
        for _ in 0..500 {
            let mut e = || {
                FieldElement::from_coords(
                    ratio_from_i64(rng.gen_range(-30..=30), rng.gen_range(1..=9)),
                    ratio_from_i64(rng.gen_range(-30..=30), rng.gen_range(1..=9)),
                    ratio_from_i64(rng.gen_range(-30..=30), rng.gen_range(1..=9)),
                )
            };
            let (x, y) = (e(), e());
            let p = field.mul(&x, &y);
            let lhs = field.embed_real(&p).to_f64();
            let rhs = (field.embed_real(&x) * field.embed_real(&y)).to_f64();
            let scale = lhs.abs().max(rhs.abs()).max(1e-30);
            assert!(
                ((lhs - rhs) / scale).abs() < 1e-12,
                "real embedding: {lhs} vs {rhs}"
            );
            let (pr, pi) = field.embed_complex(&p);
            let (xr, xi) = field.embed_complex(&x);
            let (yr, yi) = field.embed_complex(&y);
            let cr = (xr * yr - xi * yi).to_f64();
            let ci = (xr * yi + xi * yr).to_f64();
            let scale = pr.to_f64().abs().max(pi.to_f64().abs()).max(1.0);
            assert!(
                ((pr.to_f64() - cr) / scale).abs() < 1e-12
                    && ((pi.to_f64() - ci) / scale).abs() < 1e-12,
                "complex embedding"
            );
        }
    }
}

#[test]
fn symmetric_function_identities() {
    // r₂ = Ω + 2σ₂ and r₁ = −(2Ωσ₂ + σ₂² + σ₃²) at the working precision
    for (field, r1, r2) in [(golden(), -1.0, 0.0), (cbrt2_field(), 0.0, 0.0)] {
        let om = field.omega();
        let s2 = field.sigma2();
        let s3 = field.sigma3();
        let two = cubic_splitting::real::Real::from(2.0);
        assert!(((om + two * s2).to_f64() - r2).abs() < 1e-25);
        assert!(((-(two * om * s2 + s2 * s2 + s3 * s3)).to_f64() - r1).abs() < 1e-25);
    }
}
