//! Principal iteration matrix of a cubic frequency vector.
//!
//! A unimodular matrix T with Tω = λω, λ > 1, exists for every cubic vector;
//! the principal one (minimal λ) is found by exhaustive search over integer
//! first rows of increasing Euclidean norm. The full matrix is reconstructed
//! from its first row through the similarity
//! T = A(T₁₁·Id + T₁₂·R + T₁₃(a₀·Id + a₁·R + a₂·R²))A⁻¹,
//! and the eigen-identity Tω = λω holds exactly in field arithmetic.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::field::{CubicField, FieldElement};
use crate::rat::ratio_int;
use crate::real::Real;

#[derive(Debug, Error)]
pub enum KochError {
    #[error("first-row search exhausted (norm cap {cap}); tried {tried} rows")]
    SearchBudgetExceeded { cap: i64, tried: u64 },
    #[error("gamma lower bound must be positive")]
    NonPositiveGamma,
}

/// 3×3 integer matrix (arbitrary precision entries).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix3 {
    pub m: [[BigInt; 3]; 3],
}

impl IntMatrix3 {
    pub fn identity() -> Self {
        Self::from_i64s([[1, 0, 0], [0, 1, 0], [0, 0, 1]])
    }

    pub fn from_i64s(v: [[i64; 3]; 3]) -> Self {
        IntMatrix3 {
            m: v.map(|row| row.map(BigInt::from)),
        }
    }

    pub fn det(&self) -> BigInt {
        let m = &self.m;
        &m[0][0] * (&m[1][1] * &m[2][2] - &m[1][2] * &m[2][1])
            - &m[0][1] * (&m[1][0] * &m[2][2] - &m[1][2] * &m[2][0])
            + &m[0][2] * (&m[1][0] * &m[2][1] - &m[1][1] * &m[2][0])
    }

    pub fn transpose(&self) -> IntMatrix3 {
        let m = &self.m;
        IntMatrix3 {
            m: [
                [m[0][0].clone(), m[1][0].clone(), m[2][0].clone()],
                [m[0][1].clone(), m[1][1].clone(), m[2][1].clone()],
                [m[0][2].clone(), m[1][2].clone(), m[2][2].clone()],
            ],
        }
    }

    /// Inverse of a matrix with det = ±1 (integer adjugate).
    pub fn inverse_unimodular(&self) -> IntMatrix3 {
        let d = self.det();
        assert!(d.clone().abs().is_one(), "matrix is not unimodular");
        let m = &self.m;
        let cof = |r1: usize, c1: usize, r2: usize, c2: usize| -> BigInt {
            &m[r1][c1] * &m[r2][c2] - &m[r1][c2] * &m[r2][c1]
        };
        // adjugate (transpose of cofactors), divided by det (= ±1)
        let adj = [
            [cof(1, 1, 2, 2), -cof(0, 1, 2, 2), cof(0, 1, 1, 2)],
            [-cof(1, 0, 2, 2), cof(0, 0, 2, 2), -cof(0, 0, 1, 2)],
            [cof(1, 0, 2, 1), -cof(0, 0, 2, 1), cof(0, 0, 1, 1)],
        ];
        IntMatrix3 {
            m: adj.map(|row| row.map(|x| if d.is_negative() { -x } else { x })),
        }
    }

    pub fn mul(&self, rhs: &IntMatrix3) -> IntMatrix3 {
        let mut out = IntMatrix3::from_i64s([[0; 3]; 3]);
        for (i, row) in out.m.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                let mut s = BigInt::zero();
                for (k, rk) in rhs.m.iter().enumerate() {
                    s += &self.m[i][k] * &rk[j];
                }
                *cell = s;
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigInt; 3]) -> [BigInt; 3] {
        let dot = |row: &[BigInt; 3]| -> BigInt {
            &row[0] * &v[0] + &row[1] * &v[1] + &row[2] * &v[2]
        };
        [dot(&self.m[0]), dot(&self.m[1]), dot(&self.m[2])]
    }

    pub fn neg(&self) -> IntMatrix3 {
        IntMatrix3 {
            m: self.m.clone().map(|row| row.map(|x| -x)),
        }
    }

    pub fn row(&self, i: usize) -> [BigInt; 3] {
        self.m[i].clone()
    }

    pub fn to_i64s(&self) -> Option<[[i64; 3]; 3]> {
        let mut out = [[0i64; 3]; 3];
        for (row, src) in out.iter_mut().zip(self.m.iter()) {
            for (cell, v) in row.iter_mut().zip(src.iter()) {
                *cell = v.to_i64()?;
            }
        }
        Some(out)
    }

    /// Spectral norm (subordinate to the Euclidean norm), f64 accuracy.
    pub fn op_norm(&self) -> f64 {
        let a: Vec<Vec<f64>> = self
            .m
            .iter()
            .map(|r| r.iter().map(|x| x.to_f64().unwrap()).collect())
            .collect();
        let mut g = [[0.0f64; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                g[i][j] = (0..3).map(|k| a[k][i] * a[k][j]).sum();
            }
        }
        sym3_eigenvalues(&g).2.max(0.0).sqrt()
    }
}

/// 3×3 rational matrix (construction of T from its first row).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatMatrix3 {
    pub m: [[BigRational; 3]; 3],
}

impl RatMatrix3 {
    pub fn zero() -> Self {
        RatMatrix3 {
            m: std::array::from_fn(|_| std::array::from_fn(|_| ratio_int(0))),
        }
    }

    pub fn identity() -> Self {
        let mut z = Self::zero();
        for i in 0..3 {
            z.m[i][i] = ratio_int(1);
        }
        z
    }

    pub fn from_int(m: &IntMatrix3) -> Self {
        RatMatrix3 {
            m: std::array::from_fn(|i| {
                std::array::from_fn(|j| BigRational::from_integer(m.m[i][j].clone()))
            }),
        }
    }

    pub fn scale(&self, s: &BigRational) -> RatMatrix3 {
        RatMatrix3 {
            m: std::array::from_fn(|i| std::array::from_fn(|j| &self.m[i][j] * s)),
        }
    }

    pub fn add(&self, rhs: &RatMatrix3) -> RatMatrix3 {
        RatMatrix3 {
            m: std::array::from_fn(|i| std::array::from_fn(|j| &self.m[i][j] + &rhs.m[i][j])),
        }
    }

    pub fn mul(&self, rhs: &RatMatrix3) -> RatMatrix3 {
        RatMatrix3 {
            m: std::array::from_fn(|i| {
                std::array::from_fn(|j| {
                    (0..3).map(|k| &self.m[i][k] * &rhs.m[k][j]).sum()
                })
            }),
        }
    }

    pub fn det(&self) -> BigRational {
        let m = &self.m;
        &m[0][0] * (&m[1][1] * &m[2][2] - &m[1][2] * &m[2][1])
            - &m[0][1] * (&m[1][0] * &m[2][2] - &m[1][2] * &m[2][0])
            + &m[0][2] * (&m[1][0] * &m[2][1] - &m[1][1] * &m[2][0])
    }

    pub fn inverse(&self) -> Option<RatMatrix3> {
        let d = self.det();
        if d.is_zero() {
            return None;
        }
        let m = &self.m;
        let cof = |r1: usize, c1: usize, r2: usize, c2: usize| -> BigRational {
            &m[r1][c1] * &m[r2][c2] - &m[r1][c2] * &m[r2][c1]
        };
        let adj = [
            [cof(1, 1, 2, 2), -cof(0, 1, 2, 2), cof(0, 1, 1, 2)],
            [-cof(1, 0, 2, 2), cof(0, 0, 2, 2), -cof(0, 0, 1, 2)],
            [cof(1, 0, 2, 1), -cof(0, 0, 2, 1), cof(0, 0, 1, 1)],
        ];
        Some(RatMatrix3 {
            m: adj.map(|row| row.map(|x| x / &d)),
        })
    }

    /// Integer matrix if every entry has denominator 1.
    pub fn try_to_int(&self) -> Option<IntMatrix3> {
        let mut out = IntMatrix3::from_i64s([[0; 3]; 3]);
        for i in 0..3 {
            for j in 0..3 {
                if !self.m[i][j].denom().is_one() {
                    return None;
                }
                out.m[i][j] = self.m[i][j].to_integer();
            }
        }
        Some(out)
    }
}

/// Companion matrix R of the minimal polynomial (eigenvector (1, Ω, Ω²)).
pub fn companion_matrix(field: &CubicField) -> RatMatrix3 {
    let r = field.r_coeffs();
    let mut m = RatMatrix3::zero();
    m.m[0][1] = ratio_int(1);
    m.m[1][2] = ratio_int(1);
    m.m[2][0] = r[0].clone();
    m.m[2][1] = r[1].clone();
    m.m[2][2] = r[2].clone();
    m
}

/// Change-of-basis matrix A with ω = A·(1, Ω, Ω²).
pub fn basis_matrix(field: &CubicField) -> RatMatrix3 {
    let a = field.a_coeffs();
    let mut m = RatMatrix3::identity();
    m.m[2] = [a[0].clone(), a[1].clone(), a[2].clone()];
    m
}

/// Unique rational matrix with ω as eigenvector and the given first row.
pub fn matrix_from_first_row(field: &CubicField, t1: &[BigRational; 3]) -> RatMatrix3 {
    let a = field.a_coeffs();
    let r = companion_matrix(field);
    let r2 = r.mul(&r);
    let id = RatMatrix3::identity();
    let inner = id
        .scale(&t1[0])
        .add(&r.scale(&t1[1]))
        .add(
            &id.scale(&(&t1[2] * &a[0]))
                .add(&r.scale(&(&t1[2] * &a[1])))
                .add(&r2.scale(&(&t1[2] * &a[2]))),
        );
    let am = basis_matrix(field);
    let am_inv = am.inverse().expect("a2 != 0 so A is invertible");
    am.mul(&inner).mul(&am_inv)
}

/// Principal matrix data: the matrix pair, eigenvalue, conjugate spectrum,
/// and both eigenvector bases (floating and exact forms).
#[derive(Clone, Debug)]
pub struct KochData {
    /// Field with the σ₃ sign fixed so that 0 < φ < 1.
    pub field: CubicField,
    pub t: IntMatrix3,
    /// U = (T⁻¹)ᵀ, the small-divisor contraction matrix.
    pub u: IntMatrix3,
    pub lambda_exact: FieldElement,
    pub lambda: Real,
    pub mu2: Real,
    pub mu3: Real,
    /// (1/π)·arg λ₂ ∈ (0, 1).
    pub phi: Real,
    pub v2: [Real; 3],
    pub v3: [Real; 3],
    pub u1: [Real; 3],
    pub u2: [Real; 3],
    pub u3: [Real; 3],
    /// Condition number |C|·|C⁻¹| of the eigenbasis C = [ω v₂ v₃].
    pub kappa: Real,
    /// Euclidean norm of the first row of T.
    pub first_row_norm: f64,
    /// Spectral norm |T|.
    pub op_norm: f64,
    // exact spectral data in the basis 1, Ω, Ω² (v₃ = σ₃·v3_s3, u₃ = σ₃·u3_s3)
    pub v2_exact: [FieldElement; 3],
    pub v3_s3: [FieldElement; 3],
    pub u1_exact: [FieldElement; 3],
    pub u2_exact: [FieldElement; 3],
    pub u3_s3: [FieldElement; 3],
}

#[derive(Clone, Debug)]
pub struct SearchOptions {
    /// First-row norm cap |T₍₁₎| for the exhaustive scan.
    pub max_first_row_norm: i64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            max_first_row_norm: 64,
        }
    }
}

struct Candidate {
    t: IntMatrix3,
    lambda: FieldElement,
    first_row_norm_sq: i64,
}

fn koch_candidate(field: &CubicField, t1: [i64; 3]) -> Option<Candidate> {
    let t1r = [ratio_int(t1[0]), ratio_int(t1[1]), ratio_int(t1[2])];
    let t = matrix_from_first_row(field, &t1r).try_to_int()?;
    if !t.det().is_one() {
        return None;
    }
    let lambda = field
        .divisor_of(&[BigInt::from(t1[0]), BigInt::from(t1[1]), BigInt::from(t1[2])]);
    // λ > 1, exactly
    if field.sign(&lambda.sub(&FieldElement::one())) <= 0 {
        return None;
    }
    Some(Candidate {
        t,
        lambda,
        first_row_norm_sq: t1[0] * t1[0] + t1[1] * t1[1] + t1[2] * t1[2],
    })
}

/// Exhaustive search for the principal matrix: enumerate integer first rows
/// by increasing norm (lexicographic within a shell); after the first hit T*,
/// keep scanning up to |T*| and return the candidate with minimal λ.
pub fn principal_koch(field: &CubicField, opts: &SearchOptions) -> Result<KochData, KochError> {
    let cap = opts.max_first_row_norm.max(2);
    let mut best: Option<Candidate> = None;
    let mut stop_norm_sq = cap * cap;
    let mut tried = 0u64;

    // shortcut seed: ±R (or its inverse) conjugated by A is unimodular when
    // the defining coefficients are integers with |r0| = |a2| = 1
    let ints = field
        .r_coeffs()
        .iter()
        .chain(field.a_coeffs().iter())
        .all(|x| x.denom().is_one());
    if ints
        && field.r_coeffs()[0].numer().abs().is_one()
        && field.a_coeffs()[2].numer().abs().is_one()
    {
        let r0 = field.r_coeffs()[0].to_integer().to_i64().unwrap();
        let om = field.omega().to_f64();
        let first_row: Option<[i64; 3]> = if om.abs() > 1.0 {
            // T = r0·A R A⁻¹ has first row read off the similarity
            let t = matrix_from_first_row(field, &[ratio_int(0), ratio_int(r0), ratio_int(0)]);
            t.try_to_int().map(|m| row_to_i64(&m.row(0)))
        } else {
            // T = r0·A R⁻¹ A⁻¹ = −A(r₁Id + r₂R − R²)A⁻¹ for r0 = ±1
            let rinv = companion_matrix(field)
                .inverse()
                .expect("r0 != 0")
                .scale(&ratio_int(r0));
            let am = basis_matrix(field);
            let t = am.mul(&rinv).mul(&am.inverse().unwrap());
            t.try_to_int().map(|m| row_to_i64(&m.row(0)))
        };
        if let Some(row) = first_row {
            if let Some(c) = koch_candidate(field, row) {
                stop_norm_sq = stop_norm_sq.min(op_norm_cap(&c.t));
                best = Some(c);
            }
        }
    }

    // two-stage enumeration: a small box first, the full cap only if needed
    for radius in [8i64.min(cap), cap] {
        let mut rows: Vec<(i64, [i64; 3])> = Vec::new();
        for x in -radius..=radius {
            for y in -radius..=radius {
                for z in -radius..=radius {
                    let n = x * x + y * y + z * z;
                    if n >= 1 && n <= radius * radius {
                        rows.push((n, [x, y, z]));
                    }
                }
            }
        }
        rows.sort();
        for (norm_sq, t1) in rows {
            if norm_sq > stop_norm_sq {
                break;
            }
            tried += 1;
            if let Some(c) = koch_candidate(field, t1) {
                let better = match &best {
                    None => true,
                    Some(b) => field.sign(&c.lambda.sub(&b.lambda)) < 0,
                };
                if better {
                    stop_norm_sq = stop_norm_sq.min(op_norm_cap(&c.t));
                    best = Some(c);
                }
            }
        }
        let done = best
            .as_ref()
            .map(|_| stop_norm_sq <= radius * radius)
            .unwrap_or(false);
        if done {
            break;
        }
    }

    match best {
        Some(c) => Ok(spectral_data(field, c)),
        None => Err(KochError::SearchBudgetExceeded { cap, tried }),
    }
}

fn row_to_i64(row: &[BigInt; 3]) -> [i64; 3] {
    [
        row[0].to_i64().unwrap(),
        row[1].to_i64().unwrap(),
        row[2].to_i64().unwrap(),
    ]
}

fn op_norm_cap(t: &IntMatrix3) -> i64 {
    let n = t.op_norm();
    (n * n + 1e-9).ceil() as i64
}

/// Full spectral data for a (principal) matrix T; fixes the σ₃ sign so that
/// the conjugate eigenvalue λ₂ has positive imaginary part, i.e. 0 < φ < 1.
fn spectral_data(field: &CubicField, cand: Candidate) -> KochData {
    let lambda_exact = cand.lambda;
    // fix the embedding sign: φ ∈ (0,1) means Im λ₂ > 0
    let (_, im_plus) = field.with_sign(1).embed_complex(&lambda_exact);
    let sign = if im_plus.to_f64() > 0.0 { 1 } else { -1 };
    let field = field.with_sign(sign);

    let lambda = field.embed_real(&lambda_exact);
    let (mu2, mu3) = field.embed_complex(&lambda_exact);
    let phi = mu3.atan2(mu2) / Real::PI;

    // eigenvectors of T: ω and v₂ ± i v₃ = σ(ω)
    let omega_elems = [
        FieldElement::one(),
        field.omega_elem(),
        field.omega_tilde_elem(),
    ];
    let mut v2_exact = std::array::from_fn(|_| FieldElement::zero());
    let mut v3_s3 = std::array::from_fn(|_| FieldElement::zero());
    for (i, w) in omega_elems.iter().enumerate() {
        let (re, im) = field.conj_split(w);
        v2_exact[i] = re;
        v3_s3[i] = im;
    }

    // eigenvectors of U = (T⁻¹)ᵀ, from the companion basis through B = (A⁻¹)ᵀ:
    // u₁⁽⁰⁾ = (r₀, −r₂Ω + Ω², Ω), and the conjugate pair splits as
    // u₂⁽⁰⁾ = (r₀, −r₂σ₂ + σ₂² − σ₃², σ₂), u₃⁽⁰⁾ = σ₃·(0, −Ω, 1)
    // (−r₂ + 2σ₂ = −Ω).
    let r = field.r_coeffs().clone();
    let u1_0 = [
        FieldElement::from_rational(r[0].clone()),
        FieldElement::from_coords(ratio_int(0), -r[2].clone(), ratio_int(1)),
        field.omega_elem(),
    ];
    let u2_0: [FieldElement; 3] = std::array::from_fn(|i| field.conj_split(&u1_0[i]).0);
    let u3_0: [FieldElement; 3] = std::array::from_fn(|i| field.conj_split(&u1_0[i]).1);

    let b = basis_matrix(&field)
        .inverse()
        .expect("A invertible");
    let bt = RatMatrix3 {
        m: std::array::from_fn(|i| std::array::from_fn(|j| b.m[j][i].clone())),
    };
    let apply = |v: &[FieldElement; 3]| -> [FieldElement; 3] {
        std::array::from_fn(|i| {
            v[0].scale(&bt.m[i][0])
                .add(&v[1].scale(&bt.m[i][1]))
                .add(&v[2].scale(&bt.m[i][2]))
        })
    };
    let u1_exact = apply(&u1_0);
    let u2_exact = apply(&u2_0);
    let u3_s3 = apply(&u3_0);

    let s3 = field.sigma3();
    let embed3 = |v: &[FieldElement; 3]| -> [Real; 3] {
        std::array::from_fn(|i| field.embed_real(&v[i]))
    };
    let v2 = embed3(&v2_exact);
    let v3r = embed3(&v3_s3);
    let v3 = std::array::from_fn(|i: usize| v3r[i] * s3);
    let u1 = embed3(&u1_exact);
    let u2 = embed3(&u2_exact);
    let u3r = embed3(&u3_s3);
    let u3 = std::array::from_fn(|i: usize| u3r[i] * s3);

    let omega_vec = [Real::ONE, field.omega(), field.omega_tilde()];
    let kappa = condition_number(&omega_vec, &v2, &v3);

    let u = cand.t.inverse_unimodular().transpose();
    let first_row_norm = (cand.first_row_norm_sq as f64).sqrt();
    let op_norm = cand.t.op_norm();

    KochData {
        field,
        t: cand.t,
        u,
        lambda_exact,
        lambda,
        mu2,
        mu3,
        phi,
        v2,
        v3,
        u1,
        u2,
        u3,
        kappa,
        first_row_norm,
        op_norm,
        v2_exact,
        v3_s3,
        u1_exact,
        u2_exact,
        u3_s3,
    }
}

impl KochData {
    /// Spectral data for a caller-supplied matrix (first row must generate it).
    pub fn from_matrix(field: &CubicField, t: IntMatrix3) -> KochData {
        let row = t.row(0);
        let lambda = field.divisor_of(&row);
        let n = &row[0] * &row[0] + &row[1] * &row[1] + &row[2] * &row[2];
        spectral_data(
            field,
            Candidate {
                t,
                lambda,
                first_row_norm_sq: n.to_i64().unwrap_or(i64::MAX),
            },
        )
    }

    /// ⟨k, ω⟩ shrinks by exactly λ⁻¹ under U.
    pub fn u_apply(&self, k: &[BigInt; 3]) -> [BigInt; 3] {
        self.u.mul_vec(k)
    }

    /// Backward step U⁻¹ = Tᵀ (divisor grows by λ).
    pub fn u_inverse_apply(&self, k: &[BigInt; 3]) -> [BigInt; 3] {
        self.t.transpose().mul_vec(k)
    }
}

fn condition_number(w: &[Real; 3], v2: &[Real; 3], v3: &[Real; 3]) -> Real {
    // κ = |C|·|C⁻¹| = sqrt(λmax/λmin) of CᵀC, C = [ω v₂ v₃]
    let cols = [w, v2, v3];
    let mut g = [[Real::ZERO; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let mut s = Real::ZERO;
            for (ci, cj) in cols[i].iter().zip(cols[j].iter()) {
                s += *ci * *cj;
            }
            g[i][j] = s;
        }
    }
    let (lmin, _, lmax) = sym3_eigenvalues_real(&g);
    (lmax / lmin).sqrt()
}

/// Eigenvalues of a symmetric 3×3 (ascending), trigonometric closed form.
fn sym3_eigenvalues_real(a: &[[Real; 3]; 3]) -> (Real, Real, Real) {
    let one_third = Real::from(1.0) / Real::from(3.0);
    let q = (a[0][0] + a[1][1] + a[2][2]) * one_third;
    let mut b = *a;
    for (i, row) in b.iter_mut().enumerate() {
        row[i] -= q;
    }
    let mut p2 = Real::ZERO;
    for row in &b {
        for x in row {
            p2 += *x * *x;
        }
    }
    let p = (p2 / Real::from(6.0)).sqrt();
    if p.to_f64() == 0.0 {
        return (q, q, q);
    }
    let det = det3_real(&b);
    let mut r = det / (Real::from(2.0) * p.powi(3));
    if r > Real::ONE {
        r = Real::ONE;
    }
    if r < -Real::ONE {
        r = -Real::ONE;
    }
    let theta = r.acos() * one_third;
    let two = Real::from(2.0);
    let e1 = q + two * p * theta.cos();
    let e3 = q + two * p * (theta + Real::TAU * one_third).cos();
    let e2 = Real::from(3.0) * q - e1 - e3;
    let mut v = [e1, e2, e3];
    v.sort_by(|x, y| x.partial_cmp(y).unwrap());
    (v[0], v[1], v[2])
}

fn det3_real(m: &[[Real; 3]; 3]) -> Real {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

fn sym3_eigenvalues(a: &[[f64; 3]; 3]) -> (f64, f64, f64) {
    let ar = [
        [Real::from(a[0][0]), Real::from(a[0][1]), Real::from(a[0][2])],
        [Real::from(a[1][0]), Real::from(a[1][1]), Real::from(a[1][2])],
        [Real::from(a[2][0]), Real::from(a[2][1]), Real::from(a[2][2])],
    ];
    let (x, y, z) = sym3_eigenvalues_real(&ar);
    (x.to_f64(), y.to_f64(), z.to_f64())
}

/// Floor for the principal eigenvalue: the unique root > 1 of
/// x³ − x² − γ/(4κ²) = 0.
pub fn lambda_floor(gamma_lower: Real, kappa: Real) -> Result<Real, KochError> {
    if gamma_lower.to_f64() <= 0.0 {
        return Err(KochError::NonPositiveGamma);
    }
    let c = gamma_lower / (Real::from(4.0) * kappa * kappa);
    // Newton from the right of the root; g is increasing there
    let mut x = Real::ONE + c.max(c.cbrt());
    for _ in 0..60 {
        let g = (x - Real::ONE) * x * x - c;
        let dg = Real::from(3.0) * x * x - Real::from(2.0) * x;
        let step = g / dg;
        x -= step;
        if step.to_f64().abs() < 1e-30 {
            break;
        }
    }
    Ok(x)
}

/// Continued-fraction expansion with convergents, up to a denominator bound.
#[derive(Clone, Debug, Serialize)]
pub struct CfReport {
    pub quotients: Vec<i64>,
    /// (numerator, denominator) pairs of the convergents.
    pub convergents: Vec<(String, String)>,
    pub terminated: bool,
}

pub fn phi_rationality_report(phi: Real, max_denominator: u64) -> CfReport {
    let mut x = phi;
    let mut quotients = Vec::new();
    let mut convergents = Vec::new();
    let (mut p0, mut p1) = (BigInt::one(), BigInt::zero());
    let (mut q0, mut q1) = (BigInt::zero(), BigInt::one());
    let mut terminated = false;
    for _ in 0..40 {
        let a = x.floor();
        let ai = a.to_f64() as i64;
        let p = BigInt::from(ai) * &p0 + &p1;
        let q = BigInt::from(ai) * &q0 + &q1;
        if q > BigInt::from(max_denominator) && !quotients.is_empty() {
            break;
        }
        quotients.push(ai);
        convergents.push((p.to_string(), q.to_string()));
        p1 = std::mem::replace(&mut p0, p);
        q1 = std::mem::replace(&mut q0, q);
        let frac = x - a;
        // beyond ~25 digits the remainder is noise from the finite precision
        if frac.to_f64().abs() < 1e-25 {
            terminated = true;
            break;
        }
        x = frac.recip();
    }
    CfReport {
        quotients,
        convergents,
        terminated,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::ratio_from_i64;

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

    const PHI_REF: (f64, f64) = (0.59093547323838, -1.2419655813032353e-17);
    const MU2_REF: (f64, f64) = (-0.232785615938384, -2.6581177092470635e-18);
    const MU3_REF: (f64, f64) = (0.7925519925154478, 1.43168746918389e-17);

    #[test]
    fn matrix_from_first_row_examples() {
        let f = golden();
        // (1,0,1) gives Id + R² = the principal matrix
        let t = matrix_from_first_row(&f, &[ratio_int(1), ratio_int(0), ratio_int(1)])
            .try_to_int()
            .unwrap();
        assert_eq!(t, IntMatrix3::from_i64s([[1, 0, 1], [1, 0, 0], [0, 1, 0]]));
        // (1,0,0) gives the identity
        let id = matrix_from_first_row(&f, &[ratio_int(1), ratio_int(0), ratio_int(0)])
            .try_to_int()
            .unwrap();
        assert_eq!(id, IntMatrix3::identity());
        // (0,1,0) gives R itself (eigenvalue Ω < 1: not a Koch matrix)
        let r = matrix_from_first_row(&f, &[ratio_int(0), ratio_int(1), ratio_int(0)])
            .try_to_int()
            .unwrap();
        assert_eq!(r, IntMatrix3::from_i64s([[0, 1, 0], [0, 0, 1], [1, -1, 0]]));
        // rational first rows stay rational
        let m = matrix_from_first_row(&f, &[ratio_from_i64(1, 2), ratio_int(0), ratio_int(0)]);
        assert_eq!(m.m[1][1], ratio_from_i64(1, 2));
    }

    #[test]
    fn principal_matrix_golden() {
        let f = golden();
        let k = principal_koch(&f, &SearchOptions::default()).unwrap();
        assert_eq!(k.t, IntMatrix3::from_i64s([[1, 0, 1], [1, 0, 0], [0, 1, 0]]));
        assert_eq!(k.u, IntMatrix3::from_i64s([[0, 0, 1], [1, 0, -1], [0, 1, 0]]));
        assert_eq!(k.lambda_exact, FieldElement::from_i64s(1, 0, 1));
        assert!((k.lambda.to_f64() - 1.465571231876768).abs() < 1e-12);
        assert!((k.first_row_norm - 2f64.sqrt()).abs() < 1e-12);
        assert!((k.op_norm - (5f64.sqrt() + 1.0) / 2.0).abs() < 1e-9);
        assert_eq!(k.field.sign_s(), -1);
    }

    #[test]
    fn spectral_values_golden() {
        let f = golden();
        let k = principal_koch(&f, &SearchOptions::default()).unwrap();
        let phi_ref = Real::from_parts(PHI_REF.0, PHI_REF.1);
        assert!((k.phi - phi_ref).to_f64().abs() < 1e-28, "{:?}", k.phi);
        assert!((k.mu2 - Real::from_parts(MU2_REF.0, MU2_REF.1)).to_f64().abs() < 1e-28);
        assert!((k.mu3 - Real::from_parts(MU3_REF.0, MU3_REF.1)).to_f64().abs() < 1e-28);
        // |λ₂|² = 1/λ
        let chk = k.mu2 * k.mu2 + k.mu3 * k.mu3 - k.lambda.recip();
        assert!(chk.to_f64().abs() < 1e-25);
        // κ for the golden eigenbasis
        assert!((k.kappa.to_f64() - 1.5127482522477977).abs() < 1e-12);
    }

    #[test]
    fn exact_eigen_identities() {
        let f = golden();
        let k = principal_koch(&f, &SearchOptions::default()).unwrap();
        // ⟨T₍ᵢ₎, ω⟩ = λ·ωᵢ exactly, i = 1,2,3
        let omega = [
            FieldElement::one(),
            f.omega_elem(),
            f.omega_tilde_elem(),
        ];
        for (i, om) in omega.iter().enumerate() {
            let lhs = k.field.divisor_of(&k.t.row(i));
            let rhs = k.field.mul(&k.lambda_exact, om);
            assert!(lhs.sub(&rhs).is_zero(), "row {i}");
        }
        // exact orthogonality: ⟨u₂, ω⟩ = ⟨u₃, ω⟩ = 0 as field elements
        let dot_omega = |v: &[FieldElement; 3]| {
            k.field
                .mul(&v[0], &omega[0])
                .add(&k.field.mul(&v[1], &omega[1]))
                .add(&k.field.mul(&v[2], &omega[2]))
        };
        assert!(dot_omega(&k.u2_exact).is_zero());
        assert!(dot_omega(&k.u3_s3).is_zero());
        // and numerically far below the 30-digit noise floor
        let num = |v: &[Real; 3]| {
            (v[0] + v[1] * k.field.omega() + v[2] * k.field.omega_tilde()).to_f64()
        };
        assert!(num(&k.u2).abs() < 1e-25);
        assert!(num(&k.u3).abs() < 1e-25);
        // ⟨u₁, v₂⟩ = ⟨u₁, v₃⟩ = 0
        let dot = |a: &[Real; 3], b: &[Real; 3]| (a[0] * b[0] + a[1] * b[1] + a[2] * b[2]).to_f64();
        assert!(dot(&k.u1, &k.v2).abs() < 1e-25);
        assert!(dot(&k.u1, &k.v3).abs() < 1e-25);
    }

    #[test]
    fn divisor_contraction_exact() {
        let f = golden();
        let k = principal_koch(&f, &SearchOptions::default()).unwrap();
        let lam_inv = k.field.inv(&k.lambda_exact).unwrap();
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let kv = [
                BigInt::from(rng.gen_range(-100i64..=100)),
                BigInt::from(rng.gen_range(-100i64..=100)),
                BigInt::from(rng.gen_range(-100i64..=100)),
            ];
            let lhs = k.field.divisor_of(&k.u_apply(&kv));
            let rhs = k.field.mul(&lam_inv, &k.field.divisor_of(&kv));
            assert!(lhs.sub(&rhs).is_zero());
        }
    }

    #[test]
    fn uniqueness_window() {
        // every unimodular matrix with ω-eigenvalue > 1 and first-row norm
        // within |T|·λ is ±(a power of T)
        let f = golden();
        let k = principal_koch(&f, &SearchOptions::default()).unwrap();
        let bound = k.op_norm * k.lambda.to_f64();
        let r = bound.ceil() as i64;
        let t2 = k.t.mul(&k.t);
        for x in -r..=r {
            for y in -r..=r {
                for z in -r..=r {
                    let n = x * x + y * y + z * z;
                    if n < 1 || (n as f64) > bound * bound {
                        continue;
                    }
                    if let Some(c) = koch_candidate(&f, [x, y, z]) {
                        assert!(
                            c.t == k.t || c.t == t2,
                            "unexpected Koch matrix at first row {:?}",
                            [x, y, z]
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn lambda_floor_examples() {
        // independent bisection oracle
        let bisect = |c: f64| {
            let (mut lo, mut hi) = (1.0f64, 2.0 + c);
            for _ in 0..80 {
                let m = 0.5 * (lo + hi);
                if m * m * m - m * m - c < 0.0 {
                    lo = m;
                } else {
                    hi = m;
                }
            }
            0.5 * (lo + hi)
        };
        let l0 = lambda_floor(Real::from(2.0), Real::from(0.5)).unwrap();
        assert!((l0.to_f64() - bisect(2.0)).abs() < 1e-12);
        assert!((l0.to_f64() - 1.695620769559862).abs() < 1e-9);
        // γ → 0⁺ pushes the floor to 1⁺
        let tiny = lambda_floor(Real::from(1e-18), Real::ONE).unwrap();
        assert!(tiny > Real::ONE && tiny < Real::from(1.0 + 1e-5));
        assert!(matches!(
            lambda_floor(Real::ZERO, Real::ONE),
            Err(KochError::NonPositiveGamma)
        ));
        // golden: λ₀ < λ with the asymptotic Diophantine constant
        let f = golden();
        let k = principal_koch(&f, &SearchOptions::default()).unwrap();
        let l0 = lambda_floor(Real::from(0.345858), k.kappa).unwrap();
        assert!(l0 < k.lambda);
        assert!(l0 > Real::ONE);
    }

    #[test]
    fn continued_fraction_of_phi() {
        let f = golden();
        let k = principal_koch(&f, &SearchOptions::default()).unwrap();
        let cf = phi_rationality_report(k.phi, 2000);
        assert_eq!(&cf.quotients[..6], &[0, 1, 1, 2, 4, 78]);
        let pairs: Vec<(String, String)> = [(0, 1), (1, 1), (1, 2), (3, 5), (13, 22), (1017, 1721)]
            .iter()
            .map(|&(p, q)| (p.to_string(), q.to_string()))
            .collect();
        assert_eq!(&cf.convergents[..6], &pairs[..]);
        assert!(!cf.terminated);
        // an exactly rational input terminates immediately
        let half = phi_rationality_report(Real::from(0.5), 1000);
        assert_eq!(half.quotients, vec![0, 2]);
        assert!(half.terminated);
    }
}
