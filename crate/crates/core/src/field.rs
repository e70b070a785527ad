//! Exact arithmetic in a complex-type cubic field Q(Ω).
//!
//! Ω is the unique real root of x³ = r₀ + r₁x + r₂x² (negative discriminant),
//! and the third frequency is Ω̃ = a₀ + a₁Ω + a₂Ω². Elements are rational
//! coordinate triples in the basis 1, Ω, Ω². All order decisions (signs,
//! nearest integers, window comparisons) are made exactly: the field keeps a
//! tight dyadic rational bracket of Ω and refines it on demand, so no float
//! rounding can misclassify a small divisor.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::rat::{ratio_int, ratio_to_real, ratio_to_string, sign_of};
use crate::real::Real;

#[derive(Debug, Error)]
pub enum FieldError {
    #[error("minimal polynomial has rational root {0}; Ω would not be a cubic irrational")]
    RationalRootFound(String),
    #[error("discriminant {0} is non-negative; only complex-type (negative discriminant) cubic fields are supported")]
    NonNegativeDiscriminant(String),
    #[error("a2 = 0: the second frequency ratio must involve Ω²")]
    ZeroA2,
    #[error("inverse of the zero element")]
    ZeroElement,
    #[error("q1·Ω + q2·Ω̃ is exactly half-integer; exact comparison is inconsistent")]
    HalfIntegerTie,
}

/// Element of Q(Ω): `c[0] + c[1]·Ω + c[2]·Ω²`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldElement {
    pub c: [BigRational; 3],
}

impl FieldElement {
    pub fn zero() -> Self {
        FieldElement {
            c: [ratio_int(0), ratio_int(0), ratio_int(0)],
        }
    }

    pub fn one() -> Self {
        FieldElement {
            c: [ratio_int(1), ratio_int(0), ratio_int(0)],
        }
    }

    pub fn from_coords(c0: BigRational, c1: BigRational, c2: BigRational) -> Self {
        FieldElement { c: [c0, c1, c2] }
    }

    pub fn from_i64s(c0: i64, c1: i64, c2: i64) -> Self {
        FieldElement {
            c: [ratio_int(c0), ratio_int(c1), ratio_int(c2)],
        }
    }

    pub fn from_rational(r: BigRational) -> Self {
        FieldElement {
            c: [r, ratio_int(0), ratio_int(0)],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|x| x.is_zero())
    }

    pub fn is_rational(&self) -> bool {
        self.c[1].is_zero() && self.c[2].is_zero()
    }

    pub fn add(&self, rhs: &FieldElement) -> FieldElement {
        FieldElement {
            c: [
                &self.c[0] + &rhs.c[0],
                &self.c[1] + &rhs.c[1],
                &self.c[2] + &rhs.c[2],
            ],
        }
    }

    pub fn sub(&self, rhs: &FieldElement) -> FieldElement {
        FieldElement {
            c: [
                &self.c[0] - &rhs.c[0],
                &self.c[1] - &rhs.c[1],
                &self.c[2] - &rhs.c[2],
            ],
        }
    }

    pub fn neg(&self) -> FieldElement {
        FieldElement {
            c: [-&self.c[0], -&self.c[1], -&self.c[2]],
        }
    }

    pub fn scale(&self, s: &BigRational) -> FieldElement {
        FieldElement {
            c: [&self.c[0] * s, &self.c[1] * s, &self.c[2] * s],
        }
    }

    /// Coordinates as `p/q` strings (JSON reporting).
    pub fn coord_strings(&self) -> [String; 3] {
        [
            ratio_to_string(&self.c[0]),
            ratio_to_string(&self.c[1]),
            ratio_to_string(&self.c[2]),
        ]
    }
}

type Interval = (BigRational, BigRational);

/// A validated complex-type cubic field with its real and complex embeddings.
#[derive(Clone, Debug)]
pub struct CubicField {
    r: [BigRational; 3],
    a: [BigRational; 3],
    discriminant: BigRational,
    sign_s: i8,
    omega: Real,
    omega_sq: Real,
    omega_tilde: Real,
    sigma2: Real,
    sigma3: Real,
    // exact ingredients of the complex embedding
    sigma2_elem: FieldElement,
    sigma3_sq_elem: FieldElement,
    re_omega2_sq_elem: FieldElement, // σ₂² − σ₃² = Re(Ω₂²)
    // dyadic bracket of Ω for exact sign decisions
    bracket: Interval,
    bracket_sq: Interval,
}

/// Positive divisors (trial division; coefficients in practice are small).
fn divisors(n: &BigInt) -> Vec<BigInt> {
    let mut n = n.abs();
    let mut primes: Vec<(BigInt, u32)> = Vec::new();
    let mut d = BigInt::from(2);
    let mut steps = 0u64;
    while &d * &d <= n {
        let mut e = 0;
        while (&n % &d).is_zero() {
            n /= &d;
            e += 1;
        }
        if e > 0 {
            primes.push((d.clone(), e));
        }
        d += 1;
        steps += 1;
        if steps > 10_000_000 {
            break; // residual cofactor treated as prime below
        }
    }
    if n > BigInt::one() {
        primes.push((n, 1));
    }
    let mut divs = vec![BigInt::one()];
    for (p, e) in primes {
        let mut next = Vec::new();
        for d0 in &divs {
            let mut pk = BigInt::one();
            for _ in 0..=e {
                next.push(d0 * &pk);
                pk *= &p;
            }
        }
        next.sort();
        next.dedup();
        divs = next;
    }
    divs
}

impl CubicField {
    /// Validates the coefficients and computes the embeddings.
    pub fn new(
        r0: BigRational,
        r1: BigRational,
        r2: BigRational,
        a0: BigRational,
        a1: BigRational,
        a2: BigRational,
    ) -> Result<CubicField, FieldError> {
        if a2.is_zero() {
            return Err(FieldError::ZeroA2);
        }
        let r = [r0, r1, r2];
        let a = [a0, a1, a2];

        if let Some(root) = rational_root(&r) {
            return Err(FieldError::RationalRootFound(ratio_to_string(&root)));
        }

        // Δ = 4r₁³ + r₁²r₂² − 27r₀² − 18r₀r₁r₂ − 4r₀r₂³
        let four = ratio_int(4);
        let disc = &four * &r[1] * &r[1] * &r[1] + &r[1] * &r[1] * &r[2] * &r[2]
            - ratio_int(27) * &r[0] * &r[0]
            - ratio_int(18) * &r[0] * &r[1] * &r[2]
            - &four * &r[0] * &r[2] * &r[2] * &r[2];
        if !disc.is_negative() {
            return Err(FieldError::NonNegativeDiscriminant(ratio_to_string(&disc)));
        }

        let seed = cardano_real_root(
            r[0].to_f64().unwrap(),
            r[1].to_f64().unwrap(),
            r[2].to_f64().unwrap(),
        );
        let omega = newton_refine(seed, &r);
        let (bracket, bracket_sq) = exact_bracket(seed, &r);

        let omega_sq = omega * omega;
        let c = |i: usize, arr: &[BigRational; 3]| ratio_to_real(&arr[i]);
        let omega_tilde = c(0, &a) + c(1, &a) * omega + c(2, &a) * omega_sq;
        let sigma2 = (c(2, &r) - omega) * Real::from(0.5);

        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        let quarter = &half * &half;
        let sigma2_elem =
            FieldElement::from_coords(&r[2] * &half, -half.clone(), ratio_int(0));
        // σ₃² = (−(4r₁ + r₂²) − 2r₂Ω + 3Ω²)/4
        let sigma3_sq_elem = FieldElement::from_coords(
            (-(ratio_int(4) * &r[1] + &r[2] * &r[2])) * &quarter,
            -(ratio_int(2) * &r[2]) * &quarter,
            ratio_int(3) * &quarter,
        );

        let mut field = CubicField {
            r,
            a,
            discriminant: disc,
            sign_s: 1,
            omega,
            omega_sq,
            omega_tilde,
            sigma2,
            sigma3: Real::ZERO,
            re_omega2_sq_elem: FieldElement::zero(),
            sigma2_elem,
            sigma3_sq_elem,
            bracket,
            bracket_sq,
        };
        // Re(Ω₂²) = σ₂² − σ₃²
        let s2sq = field.mul(&field.sigma2_elem.clone(), &field.sigma2_elem.clone());
        field.re_omega2_sq_elem = s2sq.sub(&field.sigma3_sq_elem);

        debug_assert!(field.sign(&field.sigma3_sq_elem) > 0);
        let s3_abs = field.embed_real(&field.sigma3_sq_elem).sqrt();
        field.sigma3 = s3_abs; // sign_s = +1 initially
        Ok(field)
    }

    /// Same field with the stated sign choice for σ₃.
    pub fn with_sign(&self, s: i8) -> CubicField {
        assert!(s == 1 || s == -1);
        let mut f = self.clone();
        if s != f.sign_s {
            f.sigma3 = -f.sigma3;
            f.sign_s = s;
        }
        f
    }

    pub fn sign_s(&self) -> i8 {
        self.sign_s
    }

    pub fn r_coeffs(&self) -> &[BigRational; 3] {
        &self.r
    }

    pub fn a_coeffs(&self) -> &[BigRational; 3] {
        &self.a
    }

    pub fn discriminant(&self) -> &BigRational {
        &self.discriminant
    }

    pub fn omega(&self) -> Real {
        self.omega
    }

    pub fn omega_tilde(&self) -> Real {
        self.omega_tilde
    }

    pub fn sigma2(&self) -> Real {
        self.sigma2
    }

    pub fn sigma3(&self) -> Real {
        self.sigma3
    }

    pub fn sigma2_elem(&self) -> &FieldElement {
        &self.sigma2_elem
    }

    pub fn sigma3_sq_elem(&self) -> &FieldElement {
        &self.sigma3_sq_elem
    }

    pub fn omega_elem(&self) -> FieldElement {
        FieldElement::from_i64s(0, 1, 0)
    }

    pub fn omega_tilde_elem(&self) -> FieldElement {
        FieldElement {
            c: [self.a[0].clone(), self.a[1].clone(), self.a[2].clone()],
        }
    }

    /// ⟨k, ω⟩ with ω = (1, Ω, Ω̃), as an exact element.
    pub fn divisor_of(&self, k: &[BigInt; 3]) -> FieldElement {
        let k0 = BigRational::from_integer(k[0].clone());
        let k1 = BigRational::from_integer(k[1].clone());
        let k2 = BigRational::from_integer(k[2].clone());
        FieldElement {
            c: [
                &k0 + &k2 * &self.a[0],
                &k1 + &k2 * &self.a[1],
                &k2 * &self.a[2],
            ],
        }
    }

    /// Exact product reduced by Ω³ = r₀ + r₁Ω + r₂Ω².
    pub fn mul(&self, x: &FieldElement, y: &FieldElement) -> FieldElement {
        let z0 = &x.c[0] * &y.c[0];
        let z1 = &x.c[0] * &y.c[1] + &x.c[1] * &y.c[0];
        let z2 = &x.c[0] * &y.c[2] + &x.c[1] * &y.c[1] + &x.c[2] * &y.c[0];
        let z3 = &x.c[1] * &y.c[2] + &x.c[2] * &y.c[1];
        let z4 = &x.c[2] * &y.c[2];
        let (r0, r1, r2) = (&self.r[0], &self.r[1], &self.r[2]);
        // Ω⁴ = r₂r₀ + (r₀ + r₂r₁)Ω + (r₁ + r₂²)Ω²
        FieldElement {
            c: [
                z0 + &z3 * r0 + &z4 * r2 * r0,
                z1 + &z3 * r1 + &z4 * (r0 + r2 * r1),
                z2 + &z3 * r2 + &z4 * (r1 + r2 * r2),
            ],
        }
    }

    /// Exact inverse via the 3×3 rational system x·y = 1.
    pub fn inv(&self, x: &FieldElement) -> Result<FieldElement, FieldError> {
        if x.is_zero() {
            return Err(FieldError::ZeroElement);
        }
        // columns of the multiplication-by-x matrix
        let col0 = x.clone();
        let col1 = self.mul(x, &self.omega_elem());
        let col2 = self.mul(x, &FieldElement::from_i64s(0, 0, 1));
        let m = [col0.c, col1.c, col2.c]; // m[j][i]: column j, row i
        let det = det3(&m);
        debug_assert!(!det.is_zero(), "nonzero element with singular mul matrix");
        // Cramer: y_j = det(M with column j replaced by e1) / det
        let mut y = [ratio_int(0), ratio_int(0), ratio_int(0)];
        for (j, yj) in y.iter_mut().enumerate() {
            let mut mm = m.clone();
            mm[j] = [ratio_int(1), ratio_int(0), ratio_int(0)];
            *yj = det3(&mm) / &det;
        }
        Ok(FieldElement { c: y })
    }

    pub fn div(&self, x: &FieldElement, y: &FieldElement) -> Result<FieldElement, FieldError> {
        Ok(self.mul(x, &self.inv(y)?))
    }

    /// Real embedding at ~31 digits.
    pub fn embed_real(&self, x: &FieldElement) -> Real {
        ratio_to_real(&x.c[0])
            + ratio_to_real(&x.c[1]) * self.omega
            + ratio_to_real(&x.c[2]) * self.omega_sq
    }

    /// σ(x) split as (re, im) with im already including the σ₃ factor.
    pub fn embed_complex(&self, x: &FieldElement) -> (Real, Real) {
        let (re, im_s3) = self.conj_split(x);
        (
            self.embed_real(&re),
            self.embed_real(&im_s3) * self.sigma3,
        )
    }

    /// Exact split of the complex embedding: σ(x) = re + i·σ₃·im,
    /// with re, im ∈ Q(Ω).
    pub fn conj_split(&self, x: &FieldElement) -> (FieldElement, FieldElement) {
        // σ(x) = x0 + x1(σ₂ + iσ₃) + x2(σ₂² − σ₃² + 2iσ₂σ₃)
        let re = FieldElement::from_rational(x.c[0].clone())
            .add(&self.sigma2_elem.scale(&x.c[1]))
            .add(&self.re_omega2_sq_elem.scale(&x.c[2]));
        let im = FieldElement::from_rational(x.c[1].clone()).add(
            &self
                .sigma2_elem
                .scale(&(&x.c[2] * BigRational::from_integer(BigInt::from(2)))),
        );
        (re, im)
    }

    /// Exact sign of the real embedding: −1, 0 or +1.
    ///
    /// Decided from the extended-precision embedding whenever the value
    /// clears a certified error margin, otherwise by exact interval
    /// refinement of the Ω bracket. The result is always exact.
    pub fn sign(&self, x: &FieldElement) -> i32 {
        if x.is_zero() {
            return 0;
        }
        if x.is_rational() {
            return sign_of(&x.c[0]);
        }
        if let Some(s) = self.sign_certified(x) {
            return s;
        }
        let mut lo = self.bracket.0.clone();
        let mut hi = self.bracket.1.clone();
        let mut sq = self.bracket_sq.clone();
        loop {
            if let Some(s) = interval_sign(x, &(lo.clone(), hi.clone()), &sq) {
                return s;
            }
            // refine: keep the half where the minimal polynomial changes sign
            let mid = (&lo + &hi) / ratio_int(2);
            if poly_sign(&self.r, &mid) == poly_sign(&self.r, &lo) {
                lo = mid;
            } else {
                hi = mid;
            }
            sq = interval_mul(&(lo.clone(), hi.clone()), &(lo.clone(), hi.clone()));
        }
    }

    /// Sign from the ~31-digit embedding when the magnitude clears the error
    /// bound of the evaluation; None when too close to zero to certify.
    fn sign_certified(&self, x: &FieldElement) -> Option<i32> {
        let coord = |c: &BigRational| -> Real {
            if c.denom().is_one() {
                let v = c.numer().to_f64().unwrap_or(f64::NAN);
                if v.abs() < 9.0e15 {
                    // small integers convert exactly
                    return Real::from(v);
                }
            }
            ratio_to_real(c)
        };
        let c0 = coord(&x.c[0]);
        let c1 = coord(&x.c[1]);
        let c2 = coord(&x.c[2]);
        let val = c0 + c1 * self.omega + c2 * self.omega_sq;
        let scale = c0.to_f64().abs()
            + (c1 * self.omega).to_f64().abs()
            + (c2 * self.omega_sq).to_f64().abs();
        if !scale.is_finite() {
            return None;
        }
        // a handful of double-double operations keep the relative error
        // below ~1e-30; 1e-25·scale is a comfortable certification margin
        let v = val.to_f64();
        if v.abs() > 1e-25 * scale.max(f64::MIN_POSITIVE) {
            Some(if v > 0.0 { 1 } else { -1 })
        } else {
            None
        }
    }

    pub fn cmp_elems(&self, x: &FieldElement, y: &FieldElement) -> std::cmp::Ordering {
        match self.sign(&x.sub(y)) {
            s if s < 0 => std::cmp::Ordering::Less,
            0 => std::cmp::Ordering::Equal,
            _ => std::cmp::Ordering::Greater,
        }
    }

    pub fn abs_elem(&self, x: &FieldElement) -> FieldElement {
        if self.sign(x) < 0 {
            x.neg()
        } else {
            x.clone()
        }
    }

    /// Nearest integer to the real embedding, decided exactly.
    pub fn rint(&self, x: &FieldElement) -> Result<BigInt, FieldError> {
        let v = self.embed_real(x).to_f64().round();
        let mut p = BigRational::from_float(v)
            .map(|r| r.to_integer())
            .unwrap_or_default();
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        for _ in 0..4 {
            let d = x.sub(&FieldElement::from_rational(BigRational::from_integer(
                p.clone(),
            )));
            // need  -1/2 < d < 1/2
            let lo_sign = self.sign(&d.add(&FieldElement::from_rational(half.clone())));
            let hi_sign = self.sign(&FieldElement::from_rational(half.clone()).sub(&d));
            if lo_sign == 0 || hi_sign == 0 {
                return Err(FieldError::HalfIntegerTie);
            }
            if lo_sign < 0 {
                p -= 1;
                continue;
            }
            if hi_sign < 0 {
                p += 1;
                continue;
            }
            return Ok(p);
        }
        unreachable!("rint failed to converge from the float estimate");
    }
}

/// Serializable snapshot of the field definition (reporting).
#[derive(Debug, Serialize)]
pub struct FieldSummary {
    pub r: [String; 3],
    pub a: [String; 3],
    pub discriminant: String,
    pub omega: f64,
    pub omega_tilde: f64,
    pub sigma2: f64,
    pub sigma3: f64,
    pub sign_s: i8,
}

impl CubicField {
    pub fn summary(&self) -> FieldSummary {
        FieldSummary {
            r: [
                ratio_to_string(&self.r[0]),
                ratio_to_string(&self.r[1]),
                ratio_to_string(&self.r[2]),
            ],
            a: [
                ratio_to_string(&self.a[0]),
                ratio_to_string(&self.a[1]),
                ratio_to_string(&self.a[2]),
            ],
            discriminant: ratio_to_string(&self.discriminant),
            omega: self.omega.to_f64(),
            omega_tilde: self.omega_tilde.to_f64(),
            sigma2: self.sigma2.to_f64(),
            sigma3: self.sigma3.to_f64(),
            sign_s: self.sign_s,
        }
    }
}

fn det3(cols: &[[BigRational; 3]; 3]) -> BigRational {
    let m = cols;
    // cols[j][i] = entry (row i, col j)
    &m[0][0] * (&m[1][1] * &m[2][2] - &m[2][1] * &m[1][2])
        - &m[1][0] * (&m[0][1] * &m[2][2] - &m[2][1] * &m[0][2])
        + &m[2][0] * (&m[0][1] * &m[1][2] - &m[1][1] * &m[0][2])
}

/// Rational root of monic x³ − r₂x² − r₁x − r₀ (None if irreducible).
fn rational_root(r: &[BigRational; 3]) -> Option<BigRational> {
    // clear denominators: L x³ − (L r₂) x² − (L r₁) x − (L r₀)
    let l = lcm3(r[0].denom(), r[1].denom(), r[2].denom());
    let c3 = l.clone();
    let c0 = (-&r[0] * BigRational::from_integer(l.clone())).to_integer();
    if c0.is_zero() {
        return Some(ratio_int(0));
    }
    let eval = |x: &BigRational| -> BigRational {
        x * x * x - &r[2] * x * x - &r[1] * x - &r[0]
    };
    for p in divisors(&c0) {
        for q in divisors(&c3) {
            for sgn in [1i64, -1] {
                let cand = BigRational::new(&p * BigInt::from(sgn), q.clone());
                if eval(&cand).is_zero() {
                    return Some(cand);
                }
            }
        }
    }
    None
}

fn lcm3(a: &BigInt, b: &BigInt, c: &BigInt) -> BigInt {
    use num_integer::Integer;
    a.lcm(b).lcm(c)
}

/// Real root of x³ = r₀ + r₁x + r₂x² via the depressed-cubic closed form
/// (complex case: exactly one real root). f64 seed only.
fn cardano_real_root(r0: f64, r1: f64, r2: f64) -> f64 {
    let p = -r1 - r2 * r2 / 3.0;
    let q = -r0 - r1 * r2 / 3.0 - 2.0 * r2 * r2 * r2 / 27.0;
    let d = (q / 2.0) * (q / 2.0) + (p / 3.0) * (p / 3.0) * (p / 3.0);
    debug_assert!(d > 0.0, "complex case has positive depressed discriminant");
    let s = d.sqrt();
    let t = (-q / 2.0 + s).cbrt() + (-q / 2.0 - s).cbrt();
    t + r2 / 3.0
}

fn newton_refine(seed: f64, r: &[BigRational; 3]) -> Real {
    let c0 = ratio_to_real(&r[0]);
    let c1 = ratio_to_real(&r[1]);
    let c2 = ratio_to_real(&r[2]);
    let mut x = Real::from(seed);
    for _ in 0..4 {
        let f = ((x - c2) * x - c1) * x - c0;
        let df = (Real::from(3.0) * x - Real::from(2.0) * c2) * x - c1;
        x -= f / df;
    }
    x
}

fn poly_sign(r: &[BigRational; 3], x: &BigRational) -> i32 {
    sign_of(&(x * x * x - &r[2] * x * x - &r[1] * x - &r[0]))
}

/// Dyadic bracket of the real root, refined to width ~2^-180.
fn exact_bracket(seed: f64, r: &[BigRational; 3]) -> (Interval, Interval) {
    let mut w = 1e-8f64;
    let (mut lo, mut hi);
    loop {
        lo = BigRational::from_float(seed - w).unwrap();
        hi = BigRational::from_float(seed + w).unwrap();
        if poly_sign(r, &lo) * poly_sign(r, &hi) == -1 {
            break;
        }
        w *= 4.0;
        assert!(w < 1e3, "failed to bracket the real root");
    }
    let target = BigRational::new(BigInt::one(), BigInt::one() << 180);
    let lo_sign = poly_sign(r, &lo);
    while &hi - &lo > target {
        let mid = (&lo + &hi) / ratio_int(2);
        if poly_sign(r, &mid) == lo_sign {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let iv = (lo, hi);
    let sq = interval_mul(&iv, &iv);
    (iv, sq)
}

fn interval_mul(a: &Interval, b: &Interval) -> Interval {
    let cands = [&a.0 * &b.0, &a.0 * &b.1, &a.1 * &b.0, &a.1 * &b.1];
    let mut lo = cands[0].clone();
    let mut hi = cands[0].clone();
    for c in &cands[1..] {
        if *c < lo {
            lo = c.clone();
        }
        if *c > hi {
            hi = c.clone();
        }
    }
    (lo, hi)
}

fn interval_sign(x: &FieldElement, om: &Interval, om_sq: &Interval) -> Option<i32> {
    let scale = |c: &BigRational, iv: &Interval| -> Interval {
        if c.is_negative() {
            (c * &iv.1, c * &iv.0)
        } else {
            (c * &iv.0, c * &iv.1)
        }
    };
    let t1 = scale(&x.c[1], om);
    let t2 = scale(&x.c[2], om_sq);
    let lo = &x.c[0] + &t1.0 + &t2.0;
    let hi = &x.c[0] + &t1.1 + &t2.1;
    if lo.is_positive() {
        Some(1)
    } else if hi.is_negative() {
        Some(-1)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::ratio_from_i64;

    pub fn golden() -> CubicField {
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

    const OMEGA_REF: (f64, f64) = (0.6823278038280193, 5.2601714919399875e-17);
    const LAMBDA_REF: (f64, f64) = (1.465571231876768, 6.082738664975196e-17);
    const SIGMA3_REF: (f64, f64) = (-1.161541399997252, -1.3971924903445543e-17);

    #[test]
    fn golden_field_embeddings() {
        let f = golden();
        let om = Real::from_parts(OMEGA_REF.0, OMEGA_REF.1);
        assert!((f.omega() - om).to_f64().abs() < 1e-30);
        assert!((f.omega_tilde() - om * om).to_f64().abs() < 1e-30);
        assert_eq!(f.discriminant(), &ratio_int(-31));
        // the dyadic bracket and the Real embedding agree to working precision
        assert!((ratio_to_real(&f.bracket.0) - f.omega()).to_f64().abs() < 1e-30);
        assert!((ratio_to_real(&f.bracket.1) - f.omega()).to_f64().abs() < 1e-30);
    }

    #[test]
    fn rejects_bad_inputs() {
        // x³ = x factors as x(x−1)(x+1)
        let e = CubicField::new(
            ratio_int(0),
            ratio_int(1),
            ratio_int(0),
            ratio_int(0),
            ratio_int(0),
            ratio_int(1),
        )
        .unwrap_err();
        assert!(matches!(e, FieldError::RationalRootFound(_)));
        // x³ = −1 + 3x is totally real (Δ = 81)
        let e = CubicField::new(
            ratio_int(-1),
            ratio_int(3),
            ratio_int(0),
            ratio_int(0),
            ratio_int(0),
            ratio_int(1),
        )
        .unwrap_err();
        assert!(matches!(e, FieldError::NonNegativeDiscriminant(_)));
        let e = CubicField::new(
            ratio_int(1),
            ratio_int(-1),
            ratio_int(0),
            ratio_int(0),
            ratio_int(1),
            ratio_int(0),
        )
        .unwrap_err();
        assert!(matches!(e, FieldError::ZeroA2));
        // reducible with non-integer root: (x - 1/2)(x² + x + 1) — any rational root counts
        let e = CubicField::new(
            ratio_from_i64(1, 2),
            ratio_from_i64(-1, 2),
            ratio_from_i64(-1, 2),
            ratio_int(0),
            ratio_int(0),
            ratio_int(1),
        )
        .unwrap_err();
        assert!(matches!(e, FieldError::RationalRootFound(_)));
    }

    #[test]
    fn exact_products() {
        let f = golden();
        let om = f.omega_elem();
        let om2 = FieldElement::from_i64s(0, 0, 1);
        // Ω·Ω² = 1 − Ω
        assert_eq!(f.mul(&om, &om2), FieldElement::from_i64s(1, -1, 0));
        let x = FieldElement::from_i64s(3, -2, 5);
        assert_eq!(f.mul(&x, &FieldElement::one()), x);
        let p = f.mul(
            &FieldElement::from_i64s(1, 1, 0),
            &FieldElement::from_i64s(1, -1, 0),
        );
        assert_eq!(p, FieldElement::from_i64s(1, 0, -1));
        // minimal polynomial annihilates Ω exactly
        let om3 = f.mul(&om, &f.mul(&om, &om));
        let val = om3.sub(&FieldElement::from_i64s(1, -1, 0));
        assert!(val.is_zero());
    }

    #[test]
    fn exact_inverse() {
        let f = golden();
        // Ω⁻¹ = 1 + Ω²
        let inv = f.inv(&f.omega_elem()).unwrap();
        assert_eq!(inv, FieldElement::from_i64s(1, 0, 1));
        assert_eq!(f.inv(&FieldElement::one()).unwrap(), FieldElement::one());
        let x = FieldElement::from_i64s(1, -1, 0);
        let xi = f.inv(&x).unwrap();
        assert_eq!(f.mul(&x, &xi), FieldElement::one());
        assert!(matches!(
            f.inv(&FieldElement::zero()),
            Err(FieldError::ZeroElement)
        ));
    }

    #[test]
    fn embeddings_and_signs() {
        let f = golden();
        let lam = FieldElement::from_i64s(1, 0, 1);
        let lam_ref = Real::from_parts(LAMBDA_REF.0, LAMBDA_REF.1);
        assert!((f.embed_real(&lam) - lam_ref).to_f64().abs() < 1e-30);
        // rationals embed exactly
        let q = FieldElement::from_rational(ratio_from_i64(22, 7));
        assert!((f.embed_real(&q) - ratio_to_real(&ratio_from_i64(22, 7)))
            .is_zero());
        let (re, im) = f.embed_complex(&q);
        assert_eq!(re.to_f64(), 22.0 / 7.0);
        assert!(im.is_zero());
        // signs
        let half = FieldElement::from_rational(ratio_from_i64(1, 2));
        assert_eq!(f.sign(&f.omega_elem().sub(&half)), 1); // Ω > 1/2
        assert_eq!(f.sign(&FieldElement::from_i64s(0, 0, 1).sub(&half)), -1); // Ω² < 1/2
        assert_eq!(f.sign(&FieldElement::zero()), 0);
    }

    #[test]
    fn complex_embedding_with_sign() {
        let f = golden().with_sign(-1);
        let (re, im) = f.embed_complex(&f.omega_elem());
        let s3 = Real::from_parts(SIGMA3_REF.0, SIGMA3_REF.1);
        assert!((re - (-f.omega() * Real::from(0.5))).to_f64().abs() < 1e-30);
        assert!((im - s3).to_f64().abs() < 1e-30);
        // |σ(λ)|²·λ = 1 (det of the Koch matrix will be 1)
        let lam = FieldElement::from_i64s(1, 0, 1);
        let (lre, lim) = f.embed_complex(&lam);
        let chk = (lre * lre + lim * lim) * f.embed_real(&lam) - Real::ONE;
        assert!(chk.to_f64().abs() < 1e-25, "{chk:?}");
        // symmetric-function identities r₂ = Ω + 2σ₂, r₁ = −(2Ωσ₂ + σ₂² + σ₃²)
        let r2 = f.omega() + Real::from(2.0) * f.sigma2();
        assert!(r2.to_f64().abs() < 1e-25);
        let r1 = -(Real::from(2.0) * f.omega() * f.sigma2()
            + f.sigma2() * f.sigma2()
            + f.sigma3() * f.sigma3());
        assert!((r1 - Real::from(-1.0)).to_f64().abs() < 1e-25);
    }

    #[test]
    fn nearest_integers() {
        let f = golden();
        let two_om = f.omega_elem().scale(&ratio_int(2));
        assert_eq!(f.rint(&two_om).unwrap(), BigInt::from(1));
        assert_eq!(f.rint(&FieldElement::from_i64s(0, 0, 1)).unwrap(), BigInt::from(0));
        // Ω + 2Ω² ≈ 1.613
        assert_eq!(f.rint(&FieldElement::from_i64s(0, 1, 2)).unwrap(), BigInt::from(2));
        // exact half-integer on a rational element is a tie
        let tie = FieldElement::from_rational(ratio_from_i64(7, 2));
        assert!(matches!(f.rint(&tie), Err(FieldError::HalfIntegerTie)));
    }

    #[test]
    fn divisor_elements() {
        let f = golden();
        let k = [BigInt::from(-1), BigInt::from(2), BigInt::from(0)];
        let d = f.divisor_of(&k);
        assert_eq!(d, FieldElement::from_i64s(-1, 2, 0));
        // 2Ω − 1 ≈ 0.3647
        assert!((f.embed_real(&d).to_f64() - 0.36465560765603865).abs() < 1e-15);
    }
}
