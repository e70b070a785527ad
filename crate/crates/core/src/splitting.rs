//! The exponent landscape of the maximal splitting distance.
//!
//! Each quasi-resonance k contributes a harmonic whose exponential size is
//! governed by g_k(ε); in the logarithmic variable ζ these become shifted
//! copies of the convex "hyperbolic-cosine-like" function
//! C₀(ζ) = (2λ^{−ζ/2} + λ^ζ)/3. The lower envelope of the family is
//! h₁(ε) = F₁(ζ); its corners are the transitions of the dominant harmonic
//! S₁(ε), and the second minimum h₂ gives the dominance gap. The envelope of
//! the primary sequence interpolates along slope-φ lines to a doubly periodic
//! torus function Υ(x, y) whose extrema J₀⁻ and J₁* are the sharp bounds.
//!
//! Constants are prepared at extended precision; grid evaluation runs in f64
//! (the profile and torus tolerances sit far above f64 noise).

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::Serialize;
use thiserror::Error;

use crate::koch::KochData;
use crate::rat::bigint_to_real;
use crate::real::Real;
use crate::resonances::{ClassifiedResonances, OscillationConstants};

#[derive(Debug, Error)]
pub enum SplittingError {
    #[error("epsilon must be positive")]
    NonPositiveEps,
    #[error("epsilon and mu must be positive")]
    NonPositiveInputs,
    #[error("primitive enumeration cut {have} is below the dominance requirement {needed}")]
    InsufficientPrimitiveCut { needed: f64, have: f64 },
    #[error("coincident C-function descriptors")]
    CoincidentDescriptors,
}

/// ξ₀ = 2Lg(2λ/(√λ+1)), the corner offset of the unperturbed envelope.
pub fn xi0(lambda: Real) -> Real {
    let two = Real::from(2.0);
    let q = two * lambda / (lambda.sqrt() + Real::ONE);
    two * q.ln() / (Real::from(3.0) * lambda.ln())
}

/// J₁⁽⁰⁾ = C₀(ξ₀), the unperturbed envelope maximum.
pub fn j1_zero(lambda: Real) -> Real {
    let x = xi0(lambda);
    let t = x * lambda.ln();
    (Real::from(2.0) * (-t * Real::from(0.5)).exp() + t.exp()) / Real::from(3.0)
}

/// Dominance-window bounds N± of the perturbed envelope.
pub fn dominance_window(lambda: Real, delta: Real, xi0_v: Real) -> (Real, Real) {
    let one = Real::ONE;
    let two = Real::from(2.0);
    let ratio = (one + delta) / (one - delta);
    let ln_lam = lambda.ln();
    let sq_p = (one + delta).sqrt();
    let sq_m = (one - delta).sqrt();
    let a_minus = two * sq_p * ((Real::from(1.5) * (one - xi0_v)) * ln_lam).exp() + one;
    let n_minus = ratio.max(a_minus).ln() / ln_lam;
    let num = (Real::from(1.5) * xi0_v * ln_lam).exp() + two * sq_p;
    let a_plus = (num / (two * sq_m)).powi(2);
    let n_plus = ratio.max(a_plus).ln() / ln_lam;
    (n_minus, n_plus)
}

/// Which integer window is spanned from the N± bounds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum WindowSemantics {
    /// floor(N±): the tighter window.
    Floor,
    /// ceil(N±): the safe default.
    Ceil,
}

/// Identity of one harmonic: sequence index plus iteration count.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Label {
    pub seq: usize,
    pub q: [i64; 2],
    pub n: i64,
}

/// C-function descriptor of a harmonic: location of the minimum and the cube
/// of its minimum value.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CFunctionDesc {
    pub z: f64,
    pub y: f64,
    pub label: Label,
}

/// Per-sequence inputs for the envelope.
#[derive(Clone, Debug, Serialize)]
pub struct SeqInfo {
    pub q: [i64; 2],
    pub k0: [i64; 3],
    pub essential: bool,
    /// γ̃*_q = γ*_q/γ*.
    pub gamma_tilde: f64,
    pub psi: f64,
    /// Minimum location offset: 3Lg(K_q/K_q̂) − 2Lg(γ̃*_q).
    pub shift: f64,
}

/// Everything needed to evaluate the envelopes and the torus function.
#[derive(Clone, Debug)]
pub struct HarmonicParams {
    pub rho: f64,
    pub gamma_star: f64,
    /// C₀ = (3/2)(πρ²γ*)^{1/3}.
    pub c0: f64,
    /// D₀ = (πγ*/ρ)².
    pub d0: f64,
    pub lambda: f64,
    pub ln_lambda: f64,
    pub delta: f64,
    pub theta: f64,
    pub psi_hat: f64,
    pub phi: Real,
    pub k_qhat: f64,
    pub xi0: f64,
    pub j1_zero: f64,
    pub j0_minus: f64,
    pub j0_plus: f64,
    pub j1_plus: f64,
    pub b0_minus: f64,
    pub n_minus: f64,
    pub n_plus: f64,
    pub win_minus: i64,
    pub win_plus: i64,
    pub window_semantics: WindowSemantics,
    pub strong_sep: bool,
    /// ζ₀ = N⁻ + ξ₀: below this the n ≥ 0 clipping matters.
    pub zeta0: f64,
    pub seqs: Vec<SeqInfo>,
    /// Indices of essential sequences inside the dominance cut (F₁ pool).
    pub dominant_seqs: Vec<usize>,
    pub primary_seq: usize,
    /// Normalized cut (J₁⁺)³ that the F₁ pool must cover.
    pub dominance_cut: f64,
    /// (cut/γ*)^{1/3}·(1−δ)^{1/3}: every sequence outside the enumeration
    /// sits above this envelope value.
    pub pool_floor: f64,
    /// δ forced to zero (1-periodic diagnostic mode).
    pub delta_zeroed: bool,
}

impl HarmonicParams {
    pub fn build(
        koch: &KochData,
        osc: &OscillationConstants,
        cls: &ClassifiedResonances,
        rho: f64,
        delta_override: Option<f64>,
    ) -> Result<HarmonicParams, SplittingError> {
        assert!(rho > 0.0, "analyticity width must be positive");
        let lambda_r = koch.lambda;
        let delta_r = match delta_override {
            Some(d) => Real::from(d),
            None => osc.delta,
        };
        let delta_zeroed = matches!(delta_override, Some(d) if d == 0.0);
        let xi0_r = xi0(lambda_r);
        let j1z = j1_zero(lambda_r);
        let third = Real::from(1.0) / Real::from(3.0);
        let j0_minus = (Real::ONE - delta_r).powf(third);
        let j0_plus = (Real::ONE + delta_r).powf(third);
        let j1_plus = j1z * j0_plus;
        let (nm, np) = dominance_window(lambda_r, delta_r, xi0_r);

        let gamma_star = cls.constants.gamma_star.to_f64();
        let pi = std::f64::consts::PI;
        let c0 = 1.5 * (pi * rho * rho * gamma_star).cbrt();
        let d0 = (pi * gamma_star / rho) * (pi * gamma_star / rho);

        let lg = |x: f64| x.ln() / (3.0 * lambda_r.to_f64().ln());
        let k_qhat = cls.constants.k_qhat.to_f64();
        let mut seqs = Vec::with_capacity(cls.primitives.len());
        let mut primary_seq = usize::MAX;
        for (i, rec) in cls.primitives.iter().enumerate() {
            let gamma_tilde = rec
                .gamma_star_norm
                .expect("classified records carry normalized numerators")
                .to_f64();
            let shift = 3.0 * lg(rec.k_q.to_f64() / k_qhat) - 2.0 * lg(gamma_tilde);
            if i == cls.constants.q_hat_index {
                primary_seq = seqs.len();
            }
            seqs.push(SeqInfo {
                q: [
                    rec.q[0].to_i64().expect("q fits i64"),
                    rec.q[1].to_i64().expect("q fits i64"),
                ],
                k0: [
                    rec.k0[0].to_i64().unwrap(),
                    rec.k0[1].to_i64().unwrap(),
                    rec.k0[2].to_i64().unwrap(),
                ],
                essential: rec.essential,
                gamma_tilde,
                psi: rec.psi_q.to_f64(),
                shift,
            });
        }

        let dominance_cut = {
            let j = j1_plus.to_f64();
            j * j * j
        };
        // the enumeration must contain every sequence that can dominate
        let needed = dominance_cut * gamma_star;
        if cls.gamma_cut < needed {
            return Err(SplittingError::InsufficientPrimitiveCut {
                needed,
                have: cls.gamma_cut,
            });
        }
        let delta = delta_r.to_f64();
        let dominant_seqs: Vec<usize> = seqs
            .iter()
            .enumerate()
            .filter(|(_, s)| s.essential && s.gamma_tilde * (1.0 - delta) <= dominance_cut)
            .map(|(i, _)| i)
            .collect();

        let semantics = WindowSemantics::Ceil;
        let (win_minus, win_plus) = match semantics {
            WindowSemantics::Ceil => (nm.to_f64().ceil() as i64, np.to_f64().ceil() as i64),
            WindowSemantics::Floor => (nm.to_f64().floor() as i64, np.to_f64().floor() as i64),
        };

        let pool_floor = (cls.gamma_cut / gamma_star).cbrt() * (1.0 - delta).cbrt();

        Ok(HarmonicParams {
            rho,
            gamma_star,
            c0,
            d0,
            lambda: lambda_r.to_f64(),
            ln_lambda: lambda_r.to_f64().ln(),
            delta,
            theta: osc.theta.to_f64(),
            psi_hat: cls.constants.psi_hat.to_f64(),
            phi: koch.phi,
            k_qhat,
            xi0: xi0_r.to_f64(),
            j1_zero: j1z.to_f64(),
            j0_minus: j0_minus.to_f64(),
            j0_plus: j0_plus.to_f64(),
            j1_plus: j1_plus.to_f64(),
            b0_minus: cls.constants.b0_minus.to_f64(),
            n_minus: nm.to_f64(),
            n_plus: np.to_f64(),
            win_minus,
            win_plus,
            window_semantics: semantics,
            strong_sep: cls.constants.b0_minus.to_f64() >= j1_plus.to_f64(),
            zeta0: nm.to_f64() + xi0_r.to_f64(),
            seqs,
            dominant_seqs,
            primary_seq,
            dominance_cut,
            pool_floor,
            delta_zeroed,
        })
    }

    /// λ^t.
    #[inline]
    pub fn pow_lambda(&self, t: f64) -> f64 {
        (t * self.ln_lambda).exp()
    }

    /// Lg x = ln x / (3 ln λ).
    #[inline]
    pub fn lg(&self, x: f64) -> f64 {
        x.ln() / (3.0 * self.ln_lambda)
    }

    /// {nφ} at extended precision, rounded once.
    pub fn frac_nphi(&self, n: i64) -> f64 {
        (self.phi * Real::from(n)).fract().to_f64()
    }

    /// β(y) = 1 + δcos(2πy + 2ψ − θ), reduced mod 1 first.
    #[inline]
    pub fn beta_with_psi(&self, y: f64, psi: f64) -> f64 {
        let yr = y.rem_euclid(1.0);
        1.0 + self.delta
            * (std::f64::consts::TAU * yr + 2.0 * psi - self.theta).cos()
    }

    /// Primary-sequence oscillating factor b̄_n (β at {nφ}).
    pub fn b_bar(&self, n: i64) -> f64 {
        self.beta_with_psi(self.frac_nphi(n), self.psi_hat)
    }

    /// Oscillating factor of sequence `seq` at iteration n.
    pub fn b_seq(&self, seq: usize, n: i64) -> f64 {
        self.beta_with_psi(self.frac_nphi(n), self.seqs[seq].psi)
    }

    /// Descriptor of the harmonic s(q, n): minimum at Z with value Y^{1/3}.
    pub fn descriptor(&self, seq: usize, n: i64) -> CFunctionDesc {
        let info = &self.seqs[seq];
        let b = self.b_seq(seq, n);
        CFunctionDesc {
            z: n as f64 + info.shift + self.lg(b),
            y: info.gamma_tilde * b,
            label: Label {
                seq,
                q: info.q,
                n,
            },
        }
    }

    /// C(ζ; Z, Y) = Y^{1/3}(2λ^{−(ζ−Z)/2} + λ^{ζ−Z})/3.
    #[inline]
    pub fn cc(&self, zeta: f64, z: f64, y: f64) -> f64 {
        let t = zeta - z;
        y.cbrt() * (2.0 * self.pow_lambda(-0.5 * t) + self.pow_lambda(t)) / 3.0
    }

    #[inline]
    pub fn eval_desc(&self, zeta: f64, d: &CFunctionDesc) -> f64 {
        self.cc(zeta, d.z, d.y)
    }

    /// Index of the unperturbed dominance interval: N₁⁽⁰⁾(ζ) = n on
    /// [n−1+ξ₀, n+ξ₀].
    #[inline]
    pub fn n1_zero(&self, zeta: f64) -> i64 {
        (zeta - self.xi0).floor() as i64 + 1
    }

    /// F̄₁(ζ) = min over n ≥ 0 of the primary-sequence C-functions.
    pub fn f1_bar(&self, zeta: f64) -> (f64, i64) {
        let c = self.n1_zero(zeta);
        let (mut best, mut best_n) = (f64::INFINITY, 0i64);
        for n in (c - self.win_minus).max(0)..=(c + self.win_plus).max(0) {
            let d = self.descriptor(self.primary_seq, n);
            let v = self.eval_desc(zeta, &d);
            if v < best {
                best = v;
                best_n = n;
            }
        }
        (best, best_n)
    }

    fn candidate_window(&self, zeta: f64, seq: usize) -> std::ops::RangeInclusive<i64> {
        let center = ((zeta - self.seqs[seq].shift - self.xi0).floor() as i64) + 1;
        (center - self.win_minus - 2).max(0)..=(center + self.win_plus + 2).max(0)
    }

    /// F₁(ζ) over the essential sequences inside the dominance cut.
    pub fn f1(&self, zeta: f64) -> (f64, Label) {
        let mut best = f64::INFINITY;
        let mut best_label = Label {
            seq: self.primary_seq,
            q: self.seqs[self.primary_seq].q,
            n: 0,
        };
        for &s in &self.dominant_seqs {
            for n in self.candidate_window(zeta, s) {
                let d = self.descriptor(s, n);
                let v = self.eval_desc(zeta, &d);
                if v < best {
                    best = v;
                    best_label = d.label;
                }
            }
        }
        (best, best_label)
    }

    /// First and second minima over all enumerated sequences (h₁, h₂ pools);
    /// the second excludes only the first's harmonic.
    pub fn first_second(&self, zeta: f64) -> ((f64, Label), (f64, Label)) {
        let mut first = (f64::INFINITY, Label { seq: 0, q: [0, 0], n: 0 });
        let mut second = first;
        for (s, _) in self.seqs.iter().enumerate() {
            for n in self.candidate_window(zeta, s) {
                let d = self.descriptor(s, n);
                let v = self.eval_desc(zeta, &d);
                if v < first.0 {
                    second = first;
                    first = (v, d.label);
                } else if v < second.0 {
                    second = (v, d.label);
                }
            }
        }
        (first, second)
    }

    /// ζ = Lg(D₀/K_q̂³) − Lg ε.
    pub fn zeta_of_eps(&self, eps: f64) -> Result<f64, SplittingError> {
        if eps <= 0.0 {
            return Err(SplittingError::NonPositiveEps);
        }
        Ok(self.lg(self.d0 / self.k_qhat.powi(3)) - self.lg(eps))
    }

    pub fn eps_of_zeta(&self, zeta: f64) -> f64 {
        self.d0 / self.k_qhat.powi(3) * self.pow_lambda(-3.0 * zeta)
    }

    /// g_k(ε) for a harmonic with normalized numerator γ̃ and norm² |k|².
    pub fn g_of_eps(&self, gamma_tilde: f64, norm_sq: f64, eps: f64) -> Result<f64, SplittingError> {
        if eps <= 0.0 {
            return Err(SplittingError::NonPositiveEps);
        }
        let eps_k = self.eps_min(gamma_tilde, norm_sq);
        Ok(gamma_tilde.cbrt() / 3.0
            * (2.0 * (eps / eps_k).powf(1.0 / 6.0) + (eps_k / eps).cbrt()))
    }

    /// ε_k = D₀γ̃²/|k|⁶, the minimizer of g_k.
    pub fn eps_min(&self, gamma_tilde: f64, norm_sq: f64) -> f64 {
        self.d0 * gamma_tilde * gamma_tilde / norm_sq.powi(3)
    }

    /// Shrinks the dominance pool once the sharp supremum J₁* is known:
    /// sequences with γ̃⁻ > (J₁*)³ can never reach the envelope minimum.
    pub fn tighten_cut(&mut self, j1_star: f64) {
        let cut = (j1_star * j1_star * j1_star).min(self.dominance_cut);
        self.dominance_cut = cut;
        let delta = self.delta;
        self.dominant_seqs = self
            .seqs
            .iter()
            .enumerate()
            .filter(|(_, s)| s.essential && s.gamma_tilde * (1.0 - delta) <= cut)
            .map(|(i, _)| i)
            .collect();
    }
}

/// Melnikov coefficient of one harmonic: L_k = α_k e^{−β_k}.
#[derive(Clone, Debug, Serialize)]
pub struct MelnikovCoeff {
    pub alpha: f64,
    pub beta: f64,
    /// α_k e^{−β_k} (the polynomial-times-exponential approximation).
    pub l_approx: f64,
    /// 2π|⟨k,ω_ε⟩|e^{−ρ|k|}/sinh(π|⟨k,ω_ε⟩|/2), via logs.
    pub l_exact: f64,
    pub ln_l_exact: f64,
}

/// Coefficient data from γ_k and |k|² (the divisor enters only through γ_k).
pub fn melnikov_coeff(
    gamma_k: f64,
    norm_sq: f64,
    eps: f64,
    rho: f64,
) -> Result<MelnikovCoeff, SplittingError> {
    if eps <= 0.0 {
        return Err(SplittingError::NonPositiveEps);
    }
    let norm = norm_sq.sqrt();
    // v = |⟨k, ω_ε⟩| = γ_k/(|k|²√ε)
    let v = gamma_k / (norm_sq * eps.sqrt());
    let beta = rho * norm + std::f64::consts::FRAC_PI_2 * v;
    let alpha = 4.0 * std::f64::consts::PI * v;
    let x = std::f64::consts::FRAC_PI_2 * v; // sinh argument
    // ln sinh x = x − ln 2 + ln(1 − e^{−2x})
    let ln_sinh = x - std::f64::consts::LN_2 + (-(2.0 * x)).exp().ln_1p();
    let ln_l = (2.0 * std::f64::consts::PI * v).ln() - rho * norm - ln_sinh;
    Ok(MelnikovCoeff {
        alpha,
        beta,
        l_approx: alpha * (-beta).exp(),
        l_exact: ln_l.exp(),
        ln_l_exact: ln_l,
    })
}

/// Intersection of two C-function graphs (unique and transverse when the
/// existence condition holds).
pub fn intersect(
    params: &HarmonicParams,
    d1: &CFunctionDesc,
    d2: &CFunctionDesc,
) -> Result<Option<f64>, SplittingError> {
    let z = d2.z - d1.z;
    let w = (d2.y / d1.y).cbrt();
    if z.abs() < 1e-14 && (w - 1.0).abs() < 1e-14 {
        return Err(SplittingError::CoincidentDescriptors);
    }
    let lam_z = params.pow_lambda(z);
    let (lo, hi) = {
        let a = w;
        let b = 1.0 / (w * w);
        (a.min(b), a.max(b))
    };
    if lam_z >= lo && lam_z <= hi {
        return Ok(None);
    }
    let den = lam_z - w;
    let num = 2.0 * lam_z * (w * params.pow_lambda(0.5 * z) - 1.0);
    if den.abs() < 1e-14 || num / den <= 0.0 {
        // tangential window: let the caller fall back to bisection
        return Ok(None);
    }
    Ok(Some(d1.z + 2.0 * params.lg(num / den)))
}

/// One corner of the envelope: the dominance transition between two harmonics.
#[derive(Clone, Debug, Serialize)]
pub struct Corner {
    pub zeta: f64,
    pub eps: f64,
    pub value: f64,
    pub left: Label,
    pub right: Label,
}

/// Sampled envelope profile over a ζ range.
#[derive(Clone, Debug)]
pub struct SplittingProfile {
    pub zeta: Vec<f64>,
    pub eps: Vec<f64>,
    pub f1: Vec<f64>,
    pub f1_bar: Vec<f64>,
    pub f2: Vec<f64>,
    pub s1: Vec<Label>,
    pub s2: Vec<Label>,
    /// Euclidean norm of the dominant harmonic vector.
    pub s1_norm: Vec<f64>,
    pub is_corner: Vec<bool>,
    /// ζ ≥ ζ₀ (the interpolation identity holds there).
    pub valid: Vec<bool>,
    pub corners: Vec<Corner>,
    pub strong_sep_holds: bool,
    pub window_semantics: WindowSemantics,
}

/// Norm |s(q, n)| by exact iteration (memoized per call site).
pub struct SeqNorms<'a> {
    koch: &'a KochData,
    k0s: Vec<[BigInt; 3]>,
    cache: Vec<Vec<f64>>,
}

impl<'a> SeqNorms<'a> {
    pub fn new(koch: &'a KochData, params: &HarmonicParams) -> SeqNorms<'a> {
        let k0s: Vec<[BigInt; 3]> = params
            .seqs
            .iter()
            .map(|s| {
                [
                    BigInt::from(s.k0[0]),
                    BigInt::from(s.k0[1]),
                    BigInt::from(s.k0[2]),
                ]
            })
            .collect();
        let cache = vec![Vec::new(); k0s.len()];
        SeqNorms {
            koch,
            k0s,
            cache,
        }
    }

    pub fn norm(&mut self, seq: usize, n: i64) -> f64 {
        let n = n.max(0) as usize;
        let cache = &mut self.cache[seq];
        if cache.is_empty() {
            let k = &self.k0s[seq];
            let ns = &k[0] * &k[0] + &k[1] * &k[1] + &k[2] * &k[2];
            cache.push(bigint_to_real(&ns).sqrt().to_f64());
        }
        while cache.len() <= n {
            // recompute the vector up to the needed index
            let mut k = self.k0s[seq].clone();
            for _ in 0..cache.len() {
                k = self.koch.u_apply(&k);
            }
            let ns = &k[0] * &k[0] + &k[1] * &k[1] + &k[2] * &k[2];
            cache.push(bigint_to_real(&ns).sqrt().to_f64());
        }
        cache[n]
    }
}

/// Samples F₁/F̄₁/h₂ over [zeta_min, zeta_max] and locates the corners.
pub fn h_profiles(
    koch: &KochData,
    params: &HarmonicParams,
    zeta_min: f64,
    zeta_max: f64,
    step: f64,
) -> Result<SplittingProfile, SplittingError> {
    assert!(zeta_max > zeta_min && step > 0.0);
    let n_pts = ((zeta_max - zeta_min) / step).round() as usize + 1;
    let mut prof = SplittingProfile {
        zeta: Vec::with_capacity(n_pts),
        eps: Vec::with_capacity(n_pts),
        f1: Vec::with_capacity(n_pts),
        f1_bar: Vec::with_capacity(n_pts),
        f2: Vec::with_capacity(n_pts),
        s1: Vec::with_capacity(n_pts),
        s2: Vec::with_capacity(n_pts),
        s1_norm: Vec::with_capacity(n_pts),
        is_corner: vec![false; n_pts],
        valid: Vec::with_capacity(n_pts),
        corners: Vec::new(),
        strong_sep_holds: params.strong_sep,
        window_semantics: params.window_semantics,
    };
    let mut norms = SeqNorms::new(koch, params);
    for i in 0..n_pts {
        let zeta = zeta_min + step * i as f64;
        let ((v1, l1), (v2, l2)) = params.first_second(zeta);
        let (f1v, f1l) = params.f1(zeta);
        debug_assert!((f1v - v1).abs() < 1e-12 || f1l != l1 || !params.strong_sep);
        let (fbar, _) = params.f1_bar(zeta);
        prof.zeta.push(zeta);
        prof.eps.push(params.eps_of_zeta(zeta));
        prof.f1.push(v1);
        prof.f1_bar.push(fbar);
        prof.f2.push(v2);
        prof.s1.push(l1);
        prof.s2.push(l2);
        prof.s1_norm.push(norms.norm(l1.seq, l1.n));
        prof.valid.push(zeta >= params.zeta0);
    }
    // corner refinement at each dominance transition
    for i in 1..n_pts {
        let (la, lb) = (prof.s1[i - 1], prof.s1[i]);
        if la == lb {
            continue;
        }
        if let Some(c) = refine_corner(params, prof.zeta[i - 1], prof.zeta[i], la, lb, 0) {
            // mark the nearest grid point
            let idx = ((c.zeta - zeta_min) / step).round() as usize;
            if idx < n_pts {
                prof.is_corner[idx] = true;
            }
            prof.corners.push(c);
        }
    }
    Ok(prof)
}

fn refine_corner(
    params: &HarmonicParams,
    za: f64,
    zb: f64,
    la: Label,
    lb: Label,
    depth: u32,
) -> Option<Corner> {
    let da = params.descriptor(la.seq, la.n);
    let db = params.descriptor(lb.seq, lb.n);
    let analytic = intersect(params, &da, &db).ok().flatten();
    let zstar = match analytic {
        Some(z) if z >= za - 1e-9 && z <= zb + 1e-9 => z,
        _ => {
            // bisection on the difference of the two crossing harmonics
            let h = |z: f64| params.eval_desc(z, &da) - params.eval_desc(z, &db);
            let (mut lo, mut hi) = (za, zb);
            if h(lo) == 0.0 {
                lo
            } else {
                if h(lo).signum() == h(hi).signum() {
                    return None;
                }
                for _ in 0..80 {
                    let mid = 0.5 * (lo + hi);
                    if h(mid).signum() == h(lo).signum() {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                0.5 * (lo + hi)
            }
        }
    };
    // the refined pair must be jointly minimal there; otherwise a third
    // harmonic slots in between and the bracket needs subdividing
    let ((v1, l1), (v2, l2)) = params.first_second(zstar);
    let pair_ok = (l1 == la || l1 == lb || l2 == la || l2 == lb) && (v2 - v1).abs() < 1e-8;
    if !pair_ok && depth < 12 {
        let mid = 0.5 * (za + zb);
        let (_, lm) = params.f1(mid);
        if lm != la {
            if let Some(c) = refine_corner(params, za, mid, la, lm, depth + 1) {
                return Some(c);
            }
        }
        if lm != lb {
            return refine_corner(params, mid, zb, lm, lb, depth + 1);
        }
        return None;
    }
    Some(Corner {
        zeta: zstar,
        eps: params.eps_of_zeta(zstar),
        value: v1,
        left: la,
        right: lb,
    })
}

/// χ_n(x, y), one sheet of the torus interpolant.
pub fn chi(params: &HarmonicParams, x: f64, y: f64, n: i64) -> f64 {
    let arg = y - params.phi.to_f64() * x + params.frac_nphi(n);
    let b = params.beta_with_psi(arg, params.psi_hat);
    params.cc(x, n as f64 + params.lg(b), b)
}

/// Υ(x, y): the doubly 1-periodic interpolant of F̄₁ along slope-φ lines.
pub fn upsilon(params: &HarmonicParams, x: f64, y: f64) -> (f64, i64) {
    let c = params.n1_zero(x);
    let (mut best, mut best_n) = (f64::INFINITY, 0i64);
    for n in (c - params.win_minus - 1)..=(c + params.win_plus + 1) {
        let v = chi(params, x, y, n);
        if v < best {
            best = v;
            best_n = n;
        }
    }
    (best, best_n)
}

/// Sampled torus function with extrema and region labels.
#[derive(Clone, Debug)]
pub struct TorusGrid {
    pub resolution: usize,
    /// Row-major values, x = i/res, y = j/res.
    pub values: Vec<f64>,
    pub region: Vec<i64>,
    pub j0_minus_observed: f64,
    pub j0_location: (f64, f64),
    pub j1_star: f64,
    pub j1_location: (f64, f64),
    /// The χ indices meeting at the maximum (within 1e-6).
    pub confluence: Vec<i64>,
}

pub fn torus_grid(params: &HarmonicParams, resolution: usize) -> TorusGrid {
    assert!(resolution >= 16);
    let res = resolution;
    let mut values = vec![0.0f64; res * res];
    let mut region = vec![0i64; res * res];
    let mut min_v = f64::INFINITY;
    let mut max_v = f64::NEG_INFINITY;
    let (mut min_at, mut max_at) = ((0.0, 0.0), (0.0, 0.0));
    for i in 0..res {
        let x = i as f64 / res as f64;
        for j in 0..res {
            let y = j as f64 / res as f64;
            let (v, n) = upsilon(params, x, y);
            values[i * res + j] = v;
            region[i * res + j] = n;
            if v < min_v {
                min_v = v;
                min_at = (x, y);
            }
            if v > max_v {
                max_v = v;
                max_at = (x, y);
            }
        }
    }
    // local zoom around the grid argmax
    let mut h = 1.5 / res as f64;
    let (mut cx, mut cy) = max_at;
    for _ in 0..6 {
        let m = 16i64;
        let mut best = (max_v, cx, cy);
        for di in -m..=m {
            for dj in -m..=m {
                let x = cx + h * di as f64 / m as f64;
                let y = cy + h * dj as f64 / m as f64;
                let (v, _) = upsilon(params, x.rem_euclid(1.0), y.rem_euclid(1.0));
                if v > best.0 {
                    best = (v, x, y);
                }
            }
        }
        max_v = best.0;
        cx = best.1;
        cy = best.2;
        h /= 8.0;
    }
    // refinement along the dominance-boundary curves through the argmax
    let labels = chi_ranking(params, cx.rem_euclid(1.0), cy.rem_euclid(1.0));
    let mut j1_star = max_v;
    let mut j1_at = (cx.rem_euclid(1.0), cy.rem_euclid(1.0));
    for a in 0..labels.len().min(3) {
        for b in (a + 1)..labels.len().min(3) {
            if let Some((v, x, y)) =
                boundary_max(params, labels[a].1, labels[b].1, cx, cy)
            {
                if v > j1_star {
                    j1_star = v;
                    j1_at = (x.rem_euclid(1.0), y.rem_euclid(1.0));
                }
            }
        }
    }
    let confluence = {
        let ranked = chi_ranking(params, j1_at.0, j1_at.1);
        let top = ranked[0].0;
        let mut c: Vec<i64> = ranked
            .iter()
            .filter(|(v, _)| (v - top).abs() < 1e-6)
            .map(|(_, n)| *n)
            .collect();
        c.sort_unstable();
        c
    };
    TorusGrid {
        resolution: res,
        values,
        region,
        j0_minus_observed: min_v,
        j0_location: min_at,
        j1_star,
        j1_location: j1_at,
        confluence,
    }
}

/// χ_n values at a point, ascending.
fn chi_ranking(params: &HarmonicParams, x: f64, y: f64) -> Vec<(f64, i64)> {
    let c = params.n1_zero(x);
    let phi = params.phi.to_f64();
    let mut v: Vec<(f64, i64)> = ((c - params.win_minus - 1)..=(c + params.win_plus + 1))
        .map(|n| {
            let arg = y - phi * x + params.frac_nphi(n);
            let b = params.beta_with_psi(arg, params.psi_hat);
            (params.cc(x, n as f64 + params.lg(b), b), n)
        })
        .collect();
    v.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    v
}

/// Maximum of Υ along the χ_n = χ_m boundary curve near (cx, cy), by golden
/// section over the transversal coordinate y₀ = y − φx.
fn boundary_max(
    params: &HarmonicParams,
    n: i64,
    m: i64,
    cx: f64,
    cy: f64,
) -> Option<(f64, f64, f64)> {
    let phi = params.phi.to_f64();
    let y0_center = cy - phi * cx;
    let eval = |y0: f64| -> Option<(f64, f64, f64)> {
        // descriptors of χ_n, χ_m restricted to the line y = y0 + φx
        let bn = params.beta_with_psi(y0 + params.frac_nphi(n), params.psi_hat);
        let bm = params.beta_with_psi(y0 + params.frac_nphi(m), params.psi_hat);
        let dn = CFunctionDesc {
            z: n as f64 + params.lg(bn),
            y: bn,
            label: Label { seq: 0, q: [0, 0], n },
        };
        let dm = CFunctionDesc {
            z: m as f64 + params.lg(bm),
            y: bm,
            label: Label { seq: 0, q: [0, 0], n: m },
        };
        let x = intersect(params, &dn, &dm).ok().flatten()?;
        let v = params.eval_desc(x, &dn);
        // only points on the true boundary count: the crossing pair must be
        // minimal among all χ's there
        let (u, _) = upsilon(params, x, y0 + phi * x);
        if (u - v).abs() > 1e-9 {
            return None;
        }
        Some((v, x, y0 + phi * x))
    };
    let w = 0.02;
    let (mut lo, mut hi) = (y0_center - w, y0_center + w);
    eval(lo)?;
    eval(hi)?;
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..70 {
        let a = hi - g * (hi - lo);
        let b = lo + g * (hi - lo);
        let va = eval(a).map(|t| t.0).unwrap_or(f64::NEG_INFINITY);
        let vb = eval(b).map(|t| t.0).unwrap_or(f64::NEG_INFINITY);
        if va < vb {
            lo = a;
        } else {
            hi = b;
        }
    }
    eval(0.5 * (lo + hi))
}

/// J₁* = max Υ at the requested grid resolution (with local refinement).
pub fn j1_star(params: &HarmonicParams, resolution: usize) -> f64 {
    torus_grid(params, resolution).j1_star
}

/// The assembled splitting estimate at one (ε, μ).
#[derive(Clone, Debug, Serialize)]
pub struct EstimateReport {
    pub eps: f64,
    pub mu: f64,
    pub zeta: f64,
    pub h1: f64,
    pub h2: f64,
    /// (μ/ε^{1/3})exp(−C₀h₁/ε^{1/6}).
    pub estimate: f64,
    pub log_estimate: f64,
    /// exp(−C₀(h₂−h₁)/ε^{1/6}), the relative size of the second harmonic.
    pub eta21: f64,
    pub near_corner: bool,
    /// Distance in ζ to the nearest envelope corner.
    pub corner_distance: f64,
    /// r with μ = ε^r; the asymptotic estimate assumes r > 3.
    pub r_exponent: f64,
    pub r_condition_met: bool,
    pub s1: Label,
}

pub fn max_splitting_estimate(
    params: &HarmonicParams,
    eps: f64,
    mu: f64,
) -> Result<EstimateReport, SplittingError> {
    if eps <= 0.0 || mu <= 0.0 {
        return Err(SplittingError::NonPositiveInputs);
    }
    let zeta = params.zeta_of_eps(eps)?;
    let ((h1, s1), (h2, _)) = params.first_second(zeta);
    let scale = params.c0 / eps.powf(1.0 / 6.0);
    let log_estimate = mu.ln() - eps.ln() / 3.0 - scale * h1;
    let eta21 = (-(scale * (h2 - h1))).exp();
    // nearest corner within a ±3 window
    let mut corner_distance = f64::INFINITY;
    let lo = zeta - 3.0;
    let hi = zeta + 3.0;
    let mut prev = params.f1(lo).1;
    let steps = 600;
    for i in 1..=steps {
        let z = lo + (hi - lo) * i as f64 / steps as f64;
        let l = params.f1(z).1;
        if l != prev {
            if let Some(c) = refine_corner(
                params,
                lo + (hi - lo) * (i - 1) as f64 / steps as f64,
                z,
                prev,
                l,
                0,
            ) {
                corner_distance = corner_distance.min((c.zeta - zeta).abs());
            }
            prev = l;
        }
    }
    let r_exponent = mu.ln() / eps.ln();
    Ok(EstimateReport {
        eps,
        mu,
        zeta,
        h1,
        h2,
        estimate: log_estimate.exp(),
        log_estimate,
        eta21,
        near_corner: eta21 > 0.1,
        corner_distance,
        r_exponent,
        r_condition_met: r_exponent > 3.0,
        s1,
    })
}
