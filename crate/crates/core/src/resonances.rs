//! Quasi-resonances, resonant sequences and their oscillation invariants.
//!
//! Integer vectors with |⟨k, ω⟩| < 1/2 organize into sequences s(q, n) =
//! Uⁿk⁰(q) seeded by primitive vectors (divisor in the window (1/2λ, 1/2)).
//! Along each sequence the numerators γ_k = |⟨k,ω⟩|·|k|² oscillate around a
//! mean value γ*_q with relative amplitude δ and phase 2ψ_q − θ; the sequence
//! minimizing γ*_q carries the primary resonances. Everything that decides an
//! ordering here (nearest integers, window membership, the argmin of γ*_q)
//! is computed in exact field arithmetic.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::field::{CubicField, FieldElement, FieldError};
use crate::koch::KochData;
use crate::rat::{bigint_to_real, ratio_from_i64, ratio_int};
use crate::real::Real;

#[derive(Debug, Error)]
pub enum ResonanceError {
    #[error("field error: {0}")]
    Field(#[from] FieldError),
    #[error("oscillation amplitude delta = {0} outside (0,1): numerical fault")]
    DeltaOutOfRange(f64),
    #[error("primitive q = ({0}, {1}) projects to zero on the contracting plane")]
    DegenerateProjection(BigInt, BigInt),
    #[error("no primitive vectors below the requested cut")]
    EmptyPrimitiveSet,
}

/// Oscillation constants of the resonant plane: Z₁, Z₂, θ and δ = Z₂/Z₁.
#[derive(Clone, Debug)]
pub struct OscillationConstants {
    pub z1: Real,
    pub z2: Real,
    pub theta: Real,
    pub delta: Real,
    pub z1_exact: FieldElement,
    pub z2_sq_exact: FieldElement,
    pub delta_sq_exact: FieldElement,
    /// |u₂|² − |u₃|² and ⟨u₂,u₃⟩/σ₃ in the basis 1, Ω, Ω².
    pub u_diff_exact: FieldElement,
    pub u_cross_s3: FieldElement,
}

/// Z₁, Z₂, θ, δ from the eigenvector pair u₂ ± iu₃, all sums exact.
pub fn oscillation_constants(koch: &KochData) -> Result<OscillationConstants, ResonanceError> {
    let f = &koch.field;
    let s = f.sigma3_sq_elem().clone();
    let dot = |a: &[FieldElement; 3], b: &[FieldElement; 3]| -> FieldElement {
        f.mul(&a[0], &b[0])
            .add(&f.mul(&a[1], &b[1]))
            .add(&f.mul(&a[2], &b[2]))
    };
    let u2u2 = dot(&koch.u2_exact, &koch.u2_exact);
    let u3u3 = f.mul(&s, &dot(&koch.u3_s3, &koch.u3_s3));
    let cross = dot(&koch.u2_exact, &koch.u3_s3); // ⟨u₂,u₃⟩ = σ₃·cross
    let half = ratio_from_i64(1, 2);
    let z1_exact = u2u2.add(&u3u3).scale(&half);
    let diff = u2u2.sub(&u3u3);
    let z2_cos = diff.scale(&half);
    let z2_sq_exact = f
        .mul(&z2_cos, &z2_cos)
        .add(&f.mul(&s, &f.mul(&cross, &cross)));
    let z1_sq = f.mul(&z1_exact, &z1_exact);
    let delta_sq_exact = f.div(&z2_sq_exact, &z1_sq).expect("Z1 > 0");

    let z1 = f.embed_real(&z1_exact);
    let z2 = f.embed_real(&z2_sq_exact).sqrt();
    let delta = f.embed_real(&delta_sq_exact).sqrt();
    let theta = (f.embed_real(&cross) * f.sigma3()).atan2(f.embed_real(&z2_cos));

    // strict 0 < δ < 1, decided exactly on δ²
    if f.sign(&delta_sq_exact) <= 0
        || f.sign(&FieldElement::one().sub(&delta_sq_exact)) <= 0
    {
        return Err(ResonanceError::DeltaOutOfRange(delta.to_f64()));
    }
    Ok(OscillationConstants {
        z1,
        z2,
        theta,
        delta,
        z1_exact,
        z2_sq_exact,
        delta_sq_exact,
        u_diff_exact: diff,
        u_cross_s3: cross,
    })
}

/// The coefficient triples (c₀,c₁,c₂) and (d₀,d₁,d₂) with
/// |u₂|² − |u₃|² = c₀ + c₁Ω + c₂Ω² and ⟨u₂,u₃⟩ = (d₀ + d₁Ω + d₂Ω²)σ₃,
/// written directly in terms of the defining coefficients r_j, a_j.
/// Independent route used to cross-check the eigenvector sums.
pub fn delta_coefficients(field: &CubicField) -> (FieldElement, FieldElement) {
    let r = field.r_coeffs();
    let a = field.a_coeffs();
    let half = ratio_from_i64(1, 2);
    let a0a2 = &a[0] / &a[2];
    let a1a2 = &a[1] / &a[2];
    let s = (&a[0] * &a[0] + &a[1] * &a[1] + ratio_int(1)) / (&a[2] * &a[2]);
    let c0 = &r[0] * &r[0] - (&a0a2 + &half) * &r[0] * &r[2]
        - ratio_int(2) * &a1a2 * &r[0]
        + &r[1] * &r[1]
        - &a1a2 * &r[1] * &r[2]
        + &s * (&r[1] + &r[2] * &r[2] * &half);
    let c1 = (&a0a2 - &half) * &r[0] + (&r[2] * &half + &a1a2) * &r[1];
    let c2 = -&r[1] * &half - &s * &half;
    let d0 = -(&c1 + &r[2] * &c2);
    let d1 = c2.clone();
    (
        FieldElement::from_coords(c0, c1, c2),
        FieldElement::from_coords(d0, d1, ratio_int(0)),
    )
}

/// An integer vector with |⟨k, ω⟩| < 1/2.
#[derive(Clone, Debug)]
pub struct QuasiResonance {
    pub k: [BigInt; 3],
    pub divisor_exact: FieldElement,
    pub divisor: Real,
    pub gamma: Real,
    pub norm_sq: BigInt,
}

fn norm_sq3(k: &[BigInt; 3]) -> BigInt {
    &k[0] * &k[0] + &k[1] * &k[1] + &k[2] * &k[2]
}

fn norm_sq2(q: &[BigInt; 2]) -> BigInt {
    &q[0] * &q[0] + &q[1] * &q[1]
}

impl QuasiResonance {
    fn build(field: &CubicField, k: [BigInt; 3]) -> QuasiResonance {
        let divisor_exact = field.divisor_of(&k);
        let divisor = field.embed_real(&divisor_exact);
        let norm_sq = norm_sq3(&k);
        let gamma = divisor.abs() * bigint_to_real(&norm_sq);
        QuasiResonance {
            k,
            divisor_exact,
            divisor,
            gamma,
            norm_sq,
        }
    }
}

/// The quasi-resonance k⁰(q) = (−p, q₁, q₂) with p the nearest integer to
/// q₁Ω + q₂Ω̃ (decided exactly).
pub fn k0_of(field: &CubicField, q: &[BigInt; 2]) -> Result<QuasiResonance, FieldError> {
    assert!(!(q[0].is_zero() && q[1].is_zero()), "q must be nonzero");
    let x = field.divisor_of(&[BigInt::zero(), q[0].clone(), q[1].clone()]);
    let p = field.rint(&x)?;
    Ok(QuasiResonance::build(
        field,
        [-p, q[0].clone(), q[1].clone()],
    ))
}

/// Fundamental window test 1/(2λ) < |⟨k, ω⟩| < 1/2, decided exactly.
///
/// Fast path: the margins |d| ∓ boundary are themselves small divisors
/// (⟨2k ∓ e₁, ω⟩/2 and the λ-shifted analogue), so the Diophantine property
/// keeps them far above the extended-precision noise floor; the exact
/// element comparison only runs when a margin fails to certify.
pub fn is_primitive(field: &CubicField, lambda_exact: &FieldElement, k: &[BigInt; 3]) -> bool {
    let d = field.divisor_of(k);
    if d.is_zero() {
        return false;
    }
    let scale = 1.0
        + k.iter()
            .map(|x| x.to_f64().unwrap_or(f64::INFINITY).abs())
            .sum::<f64>();
    if scale.is_finite() {
        let dv = field.embed_real(&d).abs().to_f64();
        let lam = field.embed_real(lambda_exact).to_f64();
        let margin = 1e-24 * scale;
        let upper = 0.5 - dv;
        let lower = 2.0 * lam * dv - 1.0;
        if upper.abs() > margin && lower.abs() > margin {
            return upper > 0.0 && lower > 0.0;
        }
    }
    let abs_d = field.abs_elem(&d);
    let half = FieldElement::from_rational(ratio_from_i64(1, 2));
    // |d| < 1/2
    if field.sign(&half.sub(&abs_d)) <= 0 {
        return false;
    }
    // 2λ|d| > 1
    let two_lam_d = field
        .mul(lambda_exact, &abs_d)
        .scale(&ratio_int(2));
    field.sign(&two_lam_d.sub(&FieldElement::one())) > 0
}

/// A primitive quasi-resonance with its asymptotic invariants.
#[derive(Clone, Debug)]
pub struct PrimitiveRecord {
    pub q: [BigInt; 2],
    pub p: BigInt,
    pub k0: [BigInt; 3],
    pub r_q_exact: FieldElement,
    pub r_q: Real,
    pub essential: bool,
    pub norm_sq: BigInt,
    pub y_q: Real,
    pub z_q: Real,
    pub e_q: Real,
    pub psi_q: Real,
    pub k_q: Real,
    pub gamma_star: Real,
    pub gamma_minus: Real,
    pub gamma_plus: Real,
    pub k_q_exact: FieldElement,
    pub gamma_star_exact: FieldElement,
    /// γ̃*_q = γ*_q/γ*, set during classification.
    pub gamma_star_norm: Option<Real>,
    pub gamma_star_norm_exact: Option<FieldElement>,
}

/// E_q, ψ_q, K_q, γ*_q of a primitive from the projection quotients; the
/// radial part is exact, only the angle ψ_q needs the embeddings.
pub fn sequence_invariants(
    koch: &KochData,
    osc: &OscillationConstants,
    q: &[BigInt; 2],
    k0: &[BigInt; 3],
    r_q_exact: &FieldElement,
) -> Result<(Real, Real, Real, Real, FieldElement, FieldElement), ResonanceError> {
    let f = &koch.field;
    let s = f.sigma3_sq_elem().clone();
    let dot_k = |v: &[FieldElement; 3]| -> FieldElement {
        let mut acc = FieldElement::zero();
        for i in 0..3 {
            acc = acc.add(&v[i].scale(&BigRational::from_integer(k0[i].clone())));
        }
        acc
    };
    let y = dot_k(&koch.v2_exact);
    let z_t = dot_k(&koch.v3_s3); // z_q = σ₃·z_t
    let dot = |a: &[FieldElement; 3], b: &[FieldElement; 3]| -> FieldElement {
        f.mul(&a[0], &b[0])
            .add(&f.mul(&a[1], &b[1]))
            .add(&f.mul(&a[2], &b[2]))
    };
    let a = dot(&koch.v2_exact, &koch.u2_exact);
    let b_t = dot(&koch.v2_exact, &koch.u3_s3); // ⟨v₂,u₃⟩ = σ₃·b_t
    let d = f.mul(&a, &a).add(&f.mul(&s, &f.mul(&b_t, &b_t)));
    let e_cos = f
        .div(&f.mul(&a, &y).add(&f.mul(&s, &f.mul(&b_t, &z_t))), &d)
        .expect("D > 0");
    let e_sin_t = f
        .div(&f.mul(&b_t, &y).sub(&f.mul(&a, &z_t)), &d)
        .expect("D > 0"); // E sinψ = σ₃·e_sin_t
    let e_sq = f
        .mul(&e_cos, &e_cos)
        .add(&f.mul(&s, &f.mul(&e_sin_t, &e_sin_t)));
    if e_sq.is_zero() {
        return Err(ResonanceError::DegenerateProjection(
            q[0].clone(),
            q[1].clone(),
        ));
    }
    let k_q_exact = f.mul(&e_sq, &osc.z1_exact);
    let gamma_star_exact = f.mul(&f.abs_elem(r_q_exact), &k_q_exact);

    let e_q = f.embed_real(&e_sq).sqrt();
    let psi_q = (f.embed_real(&e_sin_t) * f.sigma3()).atan2(f.embed_real(&e_cos));
    let k_q = f.embed_real(&k_q_exact);
    let gamma_star = f.embed_real(&gamma_star_exact);
    Ok((e_q, psi_q, k_q, gamma_star, k_q_exact, gamma_star_exact))
}

fn primitive_record(
    koch: &KochData,
    osc: &OscillationConstants,
    q: [BigInt; 2],
) -> Result<Option<PrimitiveRecord>, ResonanceError> {
    let f = &koch.field;
    let qr = k0_of(f, &q)?;
    if !is_primitive(f, &koch.lambda_exact, &qr.k) {
        return Ok(None);
    }
    let k0 = qr.k.clone();
    let p = -k0[0].clone();
    let g = k0[0].gcd(&k0[1]).gcd(&k0[2]);
    let essential = g.to_i64() == Some(1);
    let (e_q, psi_q, k_q, gamma_star, k_q_exact, gamma_star_exact) =
        sequence_invariants(koch, osc, &q, &k0, &qr.divisor_exact)?;
    let one = Real::ONE;
    Ok(Some(PrimitiveRecord {
        q,
        p,
        norm_sq: qr.norm_sq.clone(),
        y_q: {
            let mut acc = Real::ZERO;
            for (ki, vi) in k0.iter().zip(koch.v2.iter()) {
                acc += bigint_to_real(ki) * *vi;
            }
            acc
        },
        z_q: {
            let mut acc = Real::ZERO;
            for (ki, vi) in k0.iter().zip(koch.v3.iter()) {
                acc += bigint_to_real(ki) * *vi;
            }
            acc
        },
        k0,
        r_q: qr.divisor,
        r_q_exact: qr.divisor_exact,
        essential,
        e_q,
        psi_q,
        k_q,
        gamma_star,
        gamma_minus: gamma_star * (one - osc.delta),
        gamma_plus: gamma_star * (one + osc.delta),
        k_q_exact,
        gamma_star_exact,
        gamma_star_norm: None,
        gamma_star_norm_exact: None,
    }))
}

/// Lower bound (1−δ)(|q|−Q₀)²/(2λ(1+δ)) for γ⁻_q, valid for |q| ≥ Q₀.
pub fn gamma_minus_lower_bound(koch: &KochData, osc: &OscillationConstants, q_norm: f64) -> f64 {
    let q0 = q_zero(koch).to_f64();
    if q_norm < q0 {
        return 0.0;
    }
    let delta = osc.delta.to_f64();
    let lam = koch.lambda.to_f64();
    (1.0 - delta) / (2.0 * lam * (1.0 + delta)) * (q_norm - q0) * (q_norm - q0)
}

/// Q₀ = |u₁| / (2|⟨u₁, ω⟩|).
pub fn q_zero(koch: &KochData) -> Real {
    let f = &koch.field;
    let dot = |a: &[FieldElement; 3], b: &[FieldElement; 3]| -> FieldElement {
        f.mul(&a[0], &b[0])
            .add(&f.mul(&a[1], &b[1]))
            .add(&f.mul(&a[2], &b[2]))
    };
    let u1_sq = dot(&koch.u1_exact, &koch.u1_exact);
    let omega = [
        FieldElement::one(),
        f.omega_elem(),
        f.omega_tilde_elem(),
    ];
    let u1_omega = dot(&koch.u1_exact, &omega);
    f.embed_real(&u1_sq).sqrt() / (Real::from(2.0) * f.embed_real(&f.abs_elem(&u1_omega)))
}

/// All primitives with γ⁻_q ≤ gamma_cut. Completeness radius comes from
/// inverting the tail bound, plus a margin of 2.
pub fn enumerate_primitives(
    koch: &KochData,
    osc: &OscillationConstants,
    gamma_cut: f64,
) -> Result<Vec<PrimitiveRecord>, ResonanceError> {
    assert!(gamma_cut > 0.0, "gamma_cut must be positive");
    let delta = osc.delta.to_f64();
    let lam = koch.lambda.to_f64();
    let q0 = q_zero(koch).to_f64();
    let radius = q0 + (gamma_cut * 2.0 * lam * (1.0 + delta) / (1.0 - delta)).sqrt() + 2.0;
    let r = radius.ceil() as i64;
    let mut out = Vec::new();
    for q1 in 0..=r {
        let q2_lo = if q1 == 0 { 1 } else { -r };
        for q2 in q2_lo..=r {
            if q1 * q1 + q2 * q2 > r * r {
                continue;
            }
            let q = [BigInt::from(q1), BigInt::from(q2)];
            if let Some(rec) = primitive_record(koch, osc, q)? {
                out.push(rec);
            }
        }
    }
    // sorted by |q| then lexicographically: deterministic downstream order
    out.sort_by(|a, b| {
        norm_sq2(&a.q)
            .cmp(&norm_sq2(&b.q))
            .then(a.q[0].cmp(&b.q[0]))
            .then(a.q[1].cmp(&b.q[1]))
    });
    if out.is_empty() {
        return Err(ResonanceError::EmptyPrimitiveSet);
    }
    Ok(out)
}

/// Classification constants: the primary/secondary split and the separation
/// thresholds derived from it.
#[derive(Clone, Debug)]
pub struct ResonanceConstants {
    pub z1: Real,
    pub z2: Real,
    pub theta: Real,
    pub delta: Real,
    pub q0: Real,
    pub q_hat: [BigInt; 2],
    pub q_hat_index: usize,
    pub q_hathat: [BigInt; 2],
    pub q_hathat_index: usize,
    /// γ* = γ*_q̂, the minimal mean Diophantine constant.
    pub gamma_star: Real,
    pub gamma_star_exact: FieldElement,
    /// γ⁻ = γ*(1−δ), the asymptotic Diophantine constant.
    pub gamma_asymptotic: Real,
    pub psi_hat: Real,
    pub k_qhat: Real,
    pub j0_plus: Real,
    pub b0_minus: Real,
    pub weak_sep: bool,
    /// B₀⁻ ≥ J₁⁺: dominant harmonics are always primary.
    pub strong_sep_input: bool,
    /// Set when the γ* minimum is attained by more than one q.
    pub multiple_primaries: bool,
}

/// Full classification output: constants plus the normalized primitive table.
#[derive(Clone, Debug)]
pub struct ClassifiedResonances {
    pub constants: ResonanceConstants,
    pub primitives: Vec<PrimitiveRecord>,
    pub gamma_cut: f64,
}

/// Enumerates primitives below the cut, selects the primary sequence by the
/// exact argmin of γ*_q, and fills the normalized numerators γ̃*_q.
pub fn classify(
    koch: &KochData,
    osc: &OscillationConstants,
    gamma_cut: f64,
) -> Result<ClassifiedResonances, ResonanceError> {
    let f = &koch.field;
    let mut prims = enumerate_primitives(koch, osc, gamma_cut)?;
    let mut hat = 0usize;
    let mut multiple = false;
    for i in 1..prims.len() {
        match f.cmp_elems(&prims[i].gamma_star_exact, &prims[hat].gamma_star_exact) {
            std::cmp::Ordering::Less => {
                hat = i;
                multiple = false;
            }
            std::cmp::Ordering::Equal => multiple = true,
            _ => {}
        }
    }
    let mut hathat = usize::MAX;
    for i in 0..prims.len() {
        if i == hat {
            continue;
        }
        if hathat == usize::MAX
            || f.cmp_elems(&prims[i].gamma_star_exact, &prims[hathat].gamma_star_exact)
                == std::cmp::Ordering::Less
        {
            hathat = i;
        }
    }
    if hathat == usize::MAX {
        return Err(ResonanceError::EmptyPrimitiveSet);
    }

    let gamma_star_exact = prims[hat].gamma_star_exact.clone();
    let gamma_star = prims[hat].gamma_star;
    let inv_gs = f.inv(&gamma_star_exact).expect("gamma* > 0");
    for rec in prims.iter_mut() {
        let norm_exact = f.mul(&rec.gamma_star_exact, &inv_gs);
        rec.gamma_star_norm = Some(f.embed_real(&norm_exact));
        rec.gamma_star_norm_exact = Some(norm_exact);
    }

    let one = Real::ONE;
    let third = Real::from(1.0) / Real::from(3.0);
    let delta = osc.delta;
    let j0_plus = (one + delta).powf(third);
    let gtilde_hathat = prims[hathat].gamma_star_norm.unwrap();
    let b0_minus = (gtilde_hathat * (one - delta)).powf(third);
    let j1_plus = crate::splitting::j1_zero(koch.lambda) * j0_plus;

    let constants = ResonanceConstants {
        z1: osc.z1,
        z2: osc.z2,
        theta: osc.theta,
        delta,
        q0: q_zero(koch),
        q_hat: prims[hat].q.clone(),
        q_hat_index: hat,
        q_hathat: prims[hathat].q.clone(),
        q_hathat_index: hathat,
        gamma_star,
        gamma_star_exact,
        gamma_asymptotic: gamma_star * (one - delta),
        psi_hat: prims[hat].psi_q,
        k_qhat: prims[hat].k_q,
        j0_plus,
        b0_minus,
        weak_sep: b0_minus > j0_plus,
        strong_sep_input: b0_minus >= j1_plus,
        multiple_primaries: multiple,
    };
    Ok(ClassifiedResonances {
        constants,
        primitives: prims,
        gamma_cut,
    })
}

/// One element of a resonant sequence s(q, n) = Uⁿk⁰(q).
#[derive(Clone, Debug)]
pub struct SequenceSample {
    pub n: u32,
    pub k: [BigInt; 3],
    pub divisor_exact: FieldElement,
    pub gamma: Real,
    /// Oscillatory model b_{s(q,n)} = 1 + δcos(2πnφ + 2ψ_q − θ).
    pub b_model: f64,
    pub norm_sq: BigInt,
}

/// Exact iteration of the resonant sequence of a primitive record.
pub fn sequence(
    koch: &KochData,
    osc: &OscillationConstants,
    record: &PrimitiveRecord,
    n_max: u32,
) -> Vec<SequenceSample> {
    let f = &koch.field;
    let mut k = record.k0.clone();
    let mut out = Vec::with_capacity(n_max as usize + 1);
    for n in 0..=n_max {
        let divisor_exact = f.divisor_of(&k);
        let norm_sq = norm_sq3(&k);
        let gamma = f.embed_real(&divisor_exact).abs() * bigint_to_real(&norm_sq);
        let b_model = b_factor(koch, osc, record.psi_q, n);
        out.push(SequenceSample {
            n,
            k: k.clone(),
            divisor_exact,
            gamma,
            b_model,
            norm_sq,
        });
        k = koch.u_apply(&k);
    }
    out
}

/// b_{s(q,n)} with the fractional part of nφ taken at extended precision.
pub fn b_factor(koch: &KochData, osc: &OscillationConstants, psi_q: Real, n: u32) -> f64 {
    let frac = (koch.phi * Real::from(n as i64)).fract();
    let phase = Real::TAU * frac + Real::from(2.0) * psi_q - osc.theta;
    (Real::ONE + osc.delta * phase.cos()).to_f64()
}

/// One classified point of the brute-force scan.
#[derive(Clone, Debug)]
pub struct ScanEntry {
    pub k: [BigInt; 3],
    pub ln_norm: f64,
    pub neg_ln_divisor: f64,
    pub gamma: f64,
    /// Index into [`ScanReport::scan_primitives`].
    pub seq_index: usize,
    pub n: u32,
    pub is_primary: bool,
}

/// A primitive discovered by the scan (invariants not recomputed here).
#[derive(Clone, Debug)]
pub struct ScanPrimitive {
    pub q: [BigInt; 2],
    pub k0: [BigInt; 3],
    pub r_q: f64,
    pub essential: bool,
}

#[derive(Clone, Debug)]
pub struct ScanReport {
    pub k_max: u64,
    pub entries: Vec<ScanEntry>,
    pub scan_primitives: Vec<ScanPrimitive>,
    pub min_gamma: f64,
    /// (n, γ) of primary entries outside [γ⁻, γ⁺].
    pub band_exceptions: Vec<(u32, f64)>,
    pub gamma_minus_line: f64,
    pub gamma_plus_line: f64,
    /// Quasi-resonances whose backward orbit failed to reach the primitive
    /// window (must stay 0; kept as a diagnostic).
    pub unclassified: usize,
}

/// Enumerates every quasi-resonance with |k| ≤ k_max (one per (k₂,k₃) pair in
/// the Fourier half-space) and classifies each into its resonant sequence by
/// exact backward iteration of U.
pub fn brute_scan(
    koch: &KochData,
    constants: &ResonanceConstants,
    k_max: u64,
) -> Result<ScanReport, ResonanceError> {
    let f = &koch.field;
    let r = k_max as i64;
    let mut entries = Vec::new();
    let mut scan_primitives: Vec<ScanPrimitive> = Vec::new();
    let mut prim_index: std::collections::HashMap<(BigInt, BigInt), usize> =
        std::collections::HashMap::new();
    let mut min_gamma = f64::INFINITY;
    let mut band_exceptions = Vec::new();
    let mut unclassified = 0usize;
    let gamma_minus = constants.gamma_asymptotic.to_f64();
    let gamma_plus = (constants.gamma_star * (Real::ONE + constants.delta)).to_f64();

    for k2 in 0..=r {
        let k3_lo = if k2 == 0 { 1 } else { -r };
        for k3 in k3_lo..=r {
            if k2 * k2 + k3 * k3 > r * r {
                continue;
            }
            let q = [BigInt::from(k2), BigInt::from(k3)];
            let qr = k0_of(f, &q)?;
            if norm_sq3(&qr.k) > BigInt::from(r * r) {
                continue;
            }
            // backward iteration to the primitive window
            let mut kk = qr.k.clone();
            let mut found = None;
            for n in 0u32..200 {
                if is_primitive(f, &koch.lambda_exact, &kk) {
                    found = Some((kk.clone(), n));
                    break;
                }
                kk = koch.u_inverse_apply(&kk);
            }
            let Some((mut kprim, n)) = found else {
                unclassified += 1;
                continue;
            };
            // normalize the primitive representative into the half-plane
            let in_half_plane = kprim[1].is_positive()
                || (kprim[1].is_zero() && kprim[2].is_positive());
            if !in_half_plane {
                kprim = [-&kprim[0], -&kprim[1], -&kprim[2]];
            }
            let qp = (kprim[1].clone(), kprim[2].clone());
            let seq_index = *prim_index.entry(qp.clone()).or_insert_with(|| {
                let g = kprim[0].gcd(&kprim[1]).gcd(&kprim[2]);
                scan_primitives.push(ScanPrimitive {
                    q: [qp.0.clone(), qp.1.clone()],
                    r_q: f.embed_real(&f.divisor_of(&kprim)).to_f64(),
                    essential: g.to_i64() == Some(1),
                    k0: kprim.clone(),
                });
                scan_primitives.len() - 1
            });
            let is_primary = scan_primitives[seq_index].q == constants.q_hat;
            let gamma = qr.gamma.to_f64();
            if gamma < min_gamma {
                min_gamma = gamma;
            }
            if is_primary && (gamma < gamma_minus || gamma > gamma_plus) {
                band_exceptions.push((n, gamma));
            }
            entries.push(ScanEntry {
                ln_norm: 0.5 * bigint_to_real(&qr.norm_sq).ln().to_f64(),
                neg_ln_divisor: -qr.divisor.abs().ln().to_f64(),
                gamma,
                k: qr.k,
                seq_index,
                n,
                is_primary,
            });
        }
    }
    band_exceptions.sort_by_key(|e| e.0);
    Ok(ScanReport {
        k_max,
        entries,
        scan_primitives,
        min_gamma,
        band_exceptions,
        gamma_minus_line: gamma_minus,
        gamma_plus_line: gamma_plus,
        unclassified,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::koch::{principal_koch, SearchOptions};

    fn golden_koch() -> KochData {
        let f = CubicField::new(
            ratio_int(1),
            ratio_int(-1),
            ratio_int(0),
            ratio_int(0),
            ratio_int(0),
            ratio_int(1),
        )
        .unwrap();
        principal_koch(&f, &SearchOptions::default()).unwrap()
    }

    fn q2(a: i64, b: i64) -> [BigInt; 2] {
        [BigInt::from(a), BigInt::from(b)]
    }

    fn k3(a: i64, b: i64, c: i64) -> [BigInt; 3] {
        [BigInt::from(a), BigInt::from(b), BigInt::from(c)]
    }

    #[test]
    fn oscillation_constants_golden() {
        let koch = golden_koch();
        let osc = oscillation_constants(&koch).unwrap();
        // exact cross-check against the direct coefficient formulas
        let (c, d) = delta_coefficients(&koch.field);
        assert_eq!(osc.u_diff_exact, c);
        assert_eq!(osc.u_cross_s3, d);
        // δ² = −1 + 5Ω − 5Ω², exactly
        assert_eq!(osc.delta_sq_exact, FieldElement::from_i64s(-1, 5, -5));
        assert!((osc.delta.to_f64() - 0.289452690013854).abs() < 1e-12);
        assert!((osc.theta.to_f64() - (-1.0548373172783231)).abs() < 1e-12);
        // Z₂ ≤ Z₁ strictly
        assert!(osc.z2 < osc.z1);
    }

    #[test]
    fn k0_examples() {
        let koch = golden_koch();
        let f = &koch.field;
        let a = k0_of(f, &q2(0, 1)).unwrap();
        assert_eq!(a.k, k3(0, 0, 1));
        assert!((a.divisor.to_f64() - 0.465571231876768).abs() < 1e-15);
        let b = k0_of(f, &q2(2, 0)).unwrap();
        assert_eq!(b.k, k3(-1, 2, 0));
        let c = k0_of(f, &q2(1, 2)).unwrap();
        assert_eq!(c.k, k3(-2, 1, 2));
        let d = k0_of(f, &q2(2, -2)).unwrap();
        assert_eq!(d.k, k3(0, 2, -2));
    }

    #[test]
    fn primitive_window() {
        let koch = golden_koch();
        let f = &koch.field;
        // |Ω²| ∈ (1/2λ, 1/2)
        assert!(is_primitive(f, &koch.lambda_exact, &k3(0, 0, 1)));
        // U(0,0,1) = (1,−1,0): |1−Ω| < 1/(2λ)
        assert!(!is_primitive(f, &koch.lambda_exact, &k3(1, -1, 0)));
        // ⟨(1,0,0), ω⟩ = 1 > 1/2
        assert!(!is_primitive(f, &koch.lambda_exact, &k3(1, 0, 0)));
    }

    #[test]
    fn golden_primitive_table() {
        let koch = golden_koch();
        let osc = oscillation_constants(&koch).unwrap();
        let cls = classify(&koch, &osc, 6.0).unwrap();
        assert_eq!(cls.constants.q_hat, q2(0, 1));
        // γ* = (2/31)(5 + Ω + 4Ω²) exactly
        let expect = FieldElement::from_i64s(5, 1, 4).scale(&ratio_from_i64(2, 31));
        assert_eq!(cls.constants.gamma_star_exact, expect);
        assert!((cls.constants.gamma_star.to_f64() - 0.486749208473232).abs() < 1e-12);
        assert!((cls.constants.gamma_asymptotic.to_f64() - 0.345858340718540).abs() < 1e-12);
        assert!((cls.constants.psi_hat.to_f64() - (-2.0074164580988962)).abs() < 1e-12);
        // table rows and their exactly rational normalized numerators
        let find = |k0: [i64; 3]| {
            cls.primitives
                .iter()
                .find(|r| r.k0 == k3(k0[0], k0[1], k0[2]))
                .unwrap()
        };
        for (k0, gtilde) in [
            ([0, 0, 1], 1),
            ([-1, 2, 0], 3),
            ([-2, 1, 2], 9),
            ([0, 2, -2], 8),
        ] {
            let rec = find(k0);
            let norm = rec.gamma_star_norm_exact.as_ref().unwrap();
            assert_eq!(
                norm,
                &FieldElement::from_i64s(gtilde, 0, 0),
                "normalized numerator of {k0:?}"
            );
        }
        assert!(find([0, 0, 1]).essential);
        assert!(!find([0, 2, -2]).essential); // (0,2,−2) = 2·(0,1,−1)
        // weak separation holds: B₀⁻ > J₀⁺
        assert!((cls.constants.j0_plus.to_f64() - 1.088433259565839).abs() < 1e-12);
        assert!((cls.constants.b0_minus.to_f64() - 1.286978874521184).abs() < 1e-12);
        assert!(cls.constants.weak_sep);
        assert!(cls.constants.strong_sep_input);
        assert!(!cls.constants.multiple_primaries);
        // all |q| ≥ 3 primitives sit above the tail bound value at |q| = 3
        for rec in &cls.primitives {
            if norm_sq2(&rec.q) >= BigInt::from(9) {
                assert!(rec.gamma_minus.to_f64() >= 1.274218 - 1e-5);
            }
        }
    }

    #[test]
    fn tail_bound_holds_for_enumerated_primitives() {
        let koch = golden_koch();
        let osc = oscillation_constants(&koch).unwrap();
        let prims = enumerate_primitives(&koch, &osc, 12.0).unwrap();
        let q0 = q_zero(&koch).to_f64();
        assert!((q0 - 0.39656655953778).abs() < 1e-12);
        for rec in &prims {
            let qn = norm_sq2(&rec.q).to_f64().unwrap().sqrt();
            if qn >= q0 {
                let bound = gamma_minus_lower_bound(&koch, &osc, qn);
                assert!(
                    rec.gamma_minus.to_f64() >= bound - 1e-12,
                    "q = {:?}: {} < {}",
                    rec.q,
                    rec.gamma_minus.to_f64(),
                    bound
                );
            }
        }
    }

    #[test]
    fn empty_below_first_minimum() {
        let koch = golden_koch();
        let osc = oscillation_constants(&koch).unwrap();
        let prims = enumerate_primitives(&koch, &osc, 0.3).unwrap();
        // γ⁻ cut below γ⁻_q̂ ≈ 0.3459 keeps no record whose γ⁻ is under it
        assert!(prims.iter().all(|r| r.gamma_minus.to_f64() > 0.3));
    }

    #[test]
    fn sequence_iteration_exact() {
        let koch = golden_koch();
        let osc = oscillation_constants(&koch).unwrap();
        let cls = classify(&koch, &osc, 6.0).unwrap();
        let rec = &cls.primitives[cls.constants.q_hat_index];
        let seq = sequence(&koch, &osc, rec, 40);
        assert_eq!(seq[0].k, k3(0, 0, 1));
        assert_eq!(seq[1].k, k3(1, -1, 0));
        assert_eq!(seq[2].k, k3(0, 1, -1));
        assert_eq!(seq[3].k, k3(-1, 1, 1));
        // divisor(s(q,n)) = λ⁻ⁿ r_q exactly
        let f = &koch.field;
        let lam_inv = f.inv(&koch.lambda_exact).unwrap();
        let mut expect = rec.r_q_exact.clone();
        for s in &seq {
            assert!(s.divisor_exact.sub(&expect).is_zero(), "n = {}", s.n);
            expect = f.mul(&expect, &lam_inv);
        }
        // γ oscillates within the asymptotic band after the transient
        let (gm, gp) = (
            cls.constants.gamma_asymptotic.to_f64(),
            (cls.constants.gamma_star * (Real::ONE + osc.delta)).to_f64(),
        );
        for s in &seq[6..] {
            let g = s.gamma.to_f64();
            assert!(g > gm - 2e-3 && g < gp + 2e-3, "n = {}: γ = {g}", s.n);
        }
        // size band: |s0(n)|²/λⁿ stays within K_q̂[1−δ, 1+δ] up to the
        // transient error
        let kq = rec.k_q.to_f64();
        let delta = osc.delta.to_f64();
        let lam = koch.lambda.to_f64();
        for s in &seq {
            let ratio = s.norm_sq.to_f64().unwrap() / lam.powi(s.n as i32);
            let err = 1.2 * lam.powf(-0.5 * s.n as f64);
            assert!(
                ratio >= kq * (1.0 - delta) - err && ratio <= kq * (1.0 + delta) + err,
                "n = {}: |s0(n)|²/λⁿ = {ratio}",
                s.n
            );
        }
    }

    #[test]
    fn oscillation_model_residuals() {
        // γ_{s(q,n)} − γ*_q·b_n shrinks like λ^{−3n/2}; |s(q,n)|² matches
        // K_q·b_n·λⁿ with a λ^{−n/2} error
        let koch = golden_koch();
        let osc = oscillation_constants(&koch).unwrap();
        let cls = classify(&koch, &osc, 6.0).unwrap();
        let lam = koch.lambda.to_f64();
        for rec in cls.primitives.iter().take(3) {
            let seq = sequence(&koch, &osc, rec, 40);
            let gs = rec.gamma_star.to_f64();
            let kq = rec.k_q.to_f64();
            let mut worst_gamma = 0.0f64;
            let mut worst_size = 0.0f64;
            for s in &seq[5..] {
                let resid = (s.gamma.to_f64() - gs * s.b_model).abs();
                worst_gamma = worst_gamma.max(resid * lam.powf(1.5 * s.n as f64));
                let size = s.norm_sq.to_f64().unwrap();
                let resid2 = (size - kq * s.b_model * lam.powi(s.n as i32)).abs();
                worst_size = worst_size.max(resid2 * lam.powf(0.5 * s.n as f64));
            }
            assert!(
                worst_gamma < 1.0,
                "γ residual constant {worst_gamma} for q = {:?}",
                rec.q
            );
            assert!(
                worst_size < 3.0,
                "size residual constant {worst_size} for q = {:?}",
                rec.q
            );
        }
    }

    #[test]
    fn scan_small() {
        let koch = golden_koch();
        let osc = oscillation_constants(&koch).unwrap();
        let cls = classify(&koch, &osc, 6.0).unwrap();
        let report = brute_scan(&koch, &cls.constants, 1).unwrap();
        // |k| ≤ 1: the only quasi-resonance in the half-space is (0,0,1)
        assert_eq!(report.entries.len(), 1);
        assert_eq!(report.entries[0].k, k3(0, 0, 1));
        assert!(report.entries[0].is_primary);
        assert_eq!(report.unclassified, 0);

        let report = brute_scan(&koch, &cls.constants, 30).unwrap();
        assert_eq!(report.unclassified, 0);
        // every discovered primitive passes the exact window test and its q
        // appears in an enumeration with a sufficient cut
        let wide = enumerate_primitives(&koch, &osc, 700.0).unwrap();
        for sp in &report.scan_primitives {
            assert!(is_primitive(
                &koch.field,
                &koch.lambda_exact,
                &sp.k0
            ));
            assert!(
                wide.iter().any(|r| r.q == sp.q),
                "scan primitive {:?} missing from enumeration",
                sp.q
            );
        }
        // classification is unique: same (q, n) never assigned to two entries
        let mut seen = std::collections::HashSet::new();
        for e in &report.entries {
            assert!(seen.insert((e.seq_index, e.n)), "duplicate ({}, {})", e.seq_index, e.n);
        }
    }
}
