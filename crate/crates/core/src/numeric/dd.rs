//! Double-double arithmetic: an unevaluated sum `hi + lo` of two `f64`
//! with `|lo| ≤ ulp(hi)/2`, about 106 significant bits.
//!
//! Transcendental functions are accurate to a few units of `2⁻¹⁰⁴` on the
//! argument ranges used in this crate (`|x| ≲ 700` for `exp`, `|x| ≲ 10³`
//! for the trigonometric functions).

use std::cmp::Ordering;
use std::fmt;
use std::num::FpCategory;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Rem, RemAssign, Sub, SubAssign};

use num_traits::{Float, FloatConst, Num, NumCast, One, ToPrimitive, Zero};

#[derive(Clone, Copy, Default, PartialEq)]
pub struct DoubleDouble {
    hi: f64,
    lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

const PI_DD: DoubleDouble = DoubleDouble { hi: 3.141592653589793116e+00, lo: 1.224646799147353207e-16 };
const TWO_PI_DD: DoubleDouble = DoubleDouble { hi: 6.283185307179586232e+00, lo: 2.449293598294706414e-16 };
const HALF_PI_DD: DoubleDouble = DoubleDouble { hi: 1.570796326794896558e+00, lo: 6.123233995736766036e-17 };
const LN2_DD: DoubleDouble = DoubleDouble { hi: 6.931471805599452862e-01, lo: 2.319046813846299558e-17 };
const LN10_DD: DoubleDouble = DoubleDouble { hi: 2.302585092994045901e+00, lo: -2.170756223382249351e-16 };
const E_DD: DoubleDouble = DoubleDouble { hi: 2.718281828459045091e+00, lo: 1.445646891729250158e-16 };
const EPS: f64 = 4.930380657631323783e-32; // 2^-104

impl DoubleDouble {
    pub const ZERO: DoubleDouble = DoubleDouble { hi: 0.0, lo: 0.0 };
    pub const ONE: DoubleDouble = DoubleDouble { hi: 1.0, lo: 0.0 };

    /// Renormalises an arbitrary pair.
    pub fn new(hi: f64, lo: f64) -> Self {
        if !hi.is_finite() {
            return DoubleDouble { hi, lo: 0.0 };
        }
        let (h, l) = two_sum(hi, lo);
        DoubleDouble { hi: h, lo: l }
    }

    pub const fn from_f64(x: f64) -> Self {
        DoubleDouble { hi: x, lo: 0.0 }
    }

    pub fn hi(self) -> f64 {
        self.hi
    }

    pub fn lo(self) -> f64 {
        self.lo
    }

    /// Nearest `f64`.
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    fn finite_or(self, r: DoubleDouble) -> Self {
        if self.hi.is_finite() {
            r
        } else {
            DoubleDouble { hi: r.hi, lo: 0.0 }
        }
    }

    fn mul_f64(self, b: f64) -> Self {
        let (p1, p2) = two_prod(self.hi, b);
        let (h, l) = quick_two_sum(p1, p2 + self.lo * b);
        self.finite_or(DoubleDouble { hi: h, lo: l })
    }

    /// Exact multiplication by a power of two.
    fn ldexp(self, e: i32) -> Self {
        let s = 2f64.powi(e);
        DoubleDouble { hi: self.hi * s, lo: self.lo * s }
    }

    fn sqr(self) -> Self {
        self * self
    }

    fn nint(self) -> Self {
        let hi = self.hi.round();
        if hi == self.hi {
            // hi is an integer; round the low word.
            let lo = self.lo.round();
            let (h, l) = quick_two_sum(hi, lo);
            // Ties with |lo| = 0.5 round away from zero on the low word; fine here.
            DoubleDouble { hi: h, lo: l }
        } else {
            let hi = if (hi - self.hi).abs() == 0.5 && self.lo != 0.0 {
                if self.lo < 0.0 && hi > self.hi {
                    hi - 1.0
                } else if self.lo > 0.0 && hi < self.hi {
                    hi + 1.0
                } else {
                    hi
                }
            } else {
                hi
            };
            DoubleDouble { hi, lo: 0.0 }
        }
    }

    /// `e^x − 1` for `|x| ≤ 1/2`, by Taylor series.
    fn expm1_small(x: DoubleDouble) -> DoubleDouble {
        let mut s = x;
        let mut t = x;
        let mut i = 2.0;
        loop {
            t = t * x / DoubleDouble::from_f64(i);
            s = s + t;
            if t.hi.abs() <= EPS * s.hi.abs() * 0.5 || i > 60.0 {
                break;
            }
            i += 1.0;
        }
        s
    }

    /// Taylor series of `sin` and `cos` for `|x| ≤ π/4`.
    fn sin_cos_small(x: DoubleDouble) -> (DoubleDouble, DoubleDouble) {
        if x.hi == 0.0 {
            return (DoubleDouble::ZERO, DoubleDouble::ONE);
        }
        let x2 = x.sqr();
        let mut s = x;
        let mut t = x;
        let mut i = 1.0;
        loop {
            t = -(t * x2) / DoubleDouble::from_f64((i + 1.0) * (i + 2.0));
            s = s + t;
            i += 2.0;
            if t.hi.abs() <= EPS * s.hi.abs() * 0.25 || i > 80.0 {
                break;
            }
        }
        let mut c = DoubleDouble::ONE;
        let mut t = DoubleDouble::ONE;
        let mut i = 0.0;
        loop {
            t = -(t * x2) / DoubleDouble::from_f64((i + 1.0) * (i + 2.0));
            c = c + t;
            i += 2.0;
            if t.hi.abs() <= EPS * 0.25 || i > 80.0 {
                break;
            }
        }
        (s, c)
    }

    fn dd_sin_cos(self) -> (Self, Self) {
        if !self.hi.is_finite() {
            return (Self::nan(), Self::nan());
        }
        let z = (self / TWO_PI_DD).nint();
        let r = self - TWO_PI_DD * z;
        let j = (r / HALF_PI_DD).nint();
        let t = r - HALF_PI_DD * j;
        let (s, c) = Self::sin_cos_small(t);
        match (j.hi as i64).rem_euclid(4) {
            0 => (s, c),
            1 => (c, -s),
            2 => (-s, -c),
            _ => (-c, s),
        }
    }

    fn dd_exp(self) -> Self {
        if self.hi.is_nan() {
            return self;
        }
        if self.hi > 709.78 {
            return Self::infinity();
        }
        if self.hi < -745.2 {
            return Self::ZERO;
        }
        if self.hi == 0.0 {
            return Self::ONE;
        }
        let m = (self.hi / LN2_DD.hi + 0.5).floor();
        let r = (self - LN2_DD.mul_f64(m)).ldexp(-9);
        let mut p = Self::expm1_small(r);
        for _ in 0..9 {
            p = p.ldexp(1) + p.sqr();
        }
        let y = p + Self::ONE;
        // 2^m may be subnormal-range; split the scaling.
        let m = m as i32;
        if m > 1000 || m < -1000 {
            y.ldexp(m / 2).ldexp(m - m / 2)
        } else {
            y.ldexp(m)
        }
    }

    fn dd_ln(self) -> Self {
        if self.hi.is_nan() || self.hi < 0.0 {
            return Self::nan();
        }
        if self.hi == 0.0 {
            return Self::neg_infinity();
        }
        if self.hi.is_infinite() {
            return self;
        }
        let mut x = DoubleDouble::from_f64(self.hi.ln());
        for _ in 0..2 {
            x = x + self * (-x).dd_exp() - Self::ONE;
        }
        x
    }

    fn dd_sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return if self.hi == 0.0 { Self::ZERO } else { Self::nan() };
        }
        if self.hi.is_infinite() {
            return self;
        }
        let x = 1.0 / self.hi.sqrt();
        let ax = self.hi * x;
        let ax_dd = DoubleDouble::from_f64(ax);
        let corr = (self - ax_dd.sqr()).hi * (x * 0.5);
        let (h, l) = two_sum(ax, corr);
        DoubleDouble { hi: h, lo: l }
    }

    fn dd_atan2(y: Self, x: Self) -> Self {
        if x.hi == 0.0 && y.hi == 0.0 {
            return Self::ZERO;
        }
        let r = (x.sqr() + y.sqr()).dd_sqrt();
        let (xn, yn) = (x / r, y / r);
        let mut t = DoubleDouble::from_f64(y.to_f64().atan2(x.to_f64()));
        for _ in 0..2 {
            let (s, c) = t.dd_sin_cos();
            // sin(θ* − θ) = yn·cosθ − xn·sinθ
            let d = yn * c - xn * s;
            t = t + d;
        }
        t
    }

    /// Scientific-notation rendering with `digits` significant digits.
    pub fn to_sci_string(self, digits: usize) -> String {
        if self.hi.is_nan() {
            return "NaN".into();
        }
        if self.hi.is_infinite() {
            return if self.hi > 0.0 { "inf".into() } else { "-inf".into() };
        }
        if self.hi == 0.0 {
            return format!("{:.*}e0", digits.saturating_sub(1), 0.0);
        }
        let neg = self.hi < 0.0;
        let mut x = self.abs();
        let mut e = x.hi.log10().floor() as i32;
        x = x / Float::powi(DoubleDouble::from_f64(10.0), e);
        while x.hi >= 10.0 {
            x = x / DoubleDouble::from_f64(10.0);
            e += 1;
        }
        while x.hi < 1.0 {
            x = x * DoubleDouble::from_f64(10.0);
            e -= 1;
        }
        let mut ds: Vec<u8> = Vec::with_capacity(digits + 1);
        for _ in 0..=digits {
            let d = x.hi.floor().clamp(0.0, 9.0);
            ds.push(d as u8);
            x = (x - DoubleDouble::from_f64(d)) * DoubleDouble::from_f64(10.0);
        }
        // Round on the extra digit.
        if ds[digits] >= 5 {
            let mut i = digits;
            loop {
                if i == 0 {
                    ds.insert(0, 1);
                    e += 1;
                    break;
                }
                i -= 1;
                if ds[i] == 9 {
                    ds[i] = 0;
                } else {
                    ds[i] += 1;
                    break;
                }
            }
        }
        ds.truncate(digits);
        let mut s = String::new();
        if neg {
            s.push('-');
        }
        s.push((b'0' + ds[0]) as char);
        if digits > 1 {
            s.push('.');
            for d in &ds[1..] {
                s.push((b'0' + d) as char);
            }
        }
        s.push_str(&format!("e{e}"));
        s
    }
}

impl fmt::Debug for DoubleDouble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_sci_string(32))
    }
}

impl fmt::Display for DoubleDouble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().map(|p| p + 1).unwrap_or(32);
        write!(f, "{}", self.to_sci_string(digits))
    }
}

impl From<f64> for DoubleDouble {
    fn from(x: f64) -> Self {
        DoubleDouble::from_f64(x)
    }
}

impl PartialOrd for DoubleDouble {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi) {
            Some(Ordering::Equal) => self.lo.partial_cmp(&other.lo),
            o => o,
        }
    }
}

impl Neg for DoubleDouble {
    type Output = Self;
    fn neg(self) -> Self {
        DoubleDouble { hi: -self.hi, lo: -self.lo }
    }
}

impl Add for DoubleDouble {
    type Output = Self;
    fn add(self, b: Self) -> Self {
        let (s1, s2) = two_sum(self.hi, b.hi);
        if !s1.is_finite() {
            return DoubleDouble { hi: s1, lo: 0.0 };
        }
        let (t1, t2) = two_sum(self.lo, b.lo);
        let (s1, s2) = quick_two_sum(s1, s2 + t1);
        let (hi, lo) = quick_two_sum(s1, s2 + t2);
        DoubleDouble { hi, lo }
    }
}

impl Sub for DoubleDouble {
    type Output = Self;
    fn sub(self, b: Self) -> Self {
        self + (-b)
    }
}

impl Mul for DoubleDouble {
    type Output = Self;
    fn mul(self, b: Self) -> Self {
        let (p1, p2) = two_prod(self.hi, b.hi);
        if !p1.is_finite() {
            return DoubleDouble { hi: p1, lo: 0.0 };
        }
        let (hi, lo) = quick_two_sum(p1, p2 + (self.hi * b.lo + self.lo * b.hi));
        DoubleDouble { hi, lo }
    }
}

impl Div for DoubleDouble {
    type Output = Self;
    fn div(self, b: Self) -> Self {
        let q1 = self.hi / b.hi;
        if !q1.is_finite() || b.hi.is_infinite() {
            return DoubleDouble { hi: q1, lo: 0.0 };
        }
        let r = self - b.mul_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b.mul_f64(q2);
        let q3 = r.hi / b.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        DoubleDouble { hi, lo } + DoubleDouble::from_f64(q3)
    }
}

impl Rem for DoubleDouble {
    type Output = Self;
    fn rem(self, b: Self) -> Self {
        self - b * (self / b).trunc()
    }
}

macro_rules! assign_ops {
    ($($tr:ident $m:ident $op:tt),*) => {$(
        impl $tr for DoubleDouble {
            fn $m(&mut self, b: Self) {
                *self = *self $op b;
            }
        }
    )*};
}
assign_ops!(AddAssign add_assign +, SubAssign sub_assign -, MulAssign mul_assign *, DivAssign div_assign /, RemAssign rem_assign %);

impl std::iter::Sum for DoubleDouble {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::ZERO, |a, b| a + b)
    }
}

impl Zero for DoubleDouble {
    fn zero() -> Self {
        Self::ZERO
    }
    fn is_zero(&self) -> bool {
        self.hi == 0.0
    }
}

impl One for DoubleDouble {
    fn one() -> Self {
        Self::ONE
    }
}

impl Num for DoubleDouble {
    type FromStrRadixErr = num_traits::ParseFloatError;
    /// Parses through `f64`; the low word is zero.
    fn from_str_radix(s: &str, radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        f64::from_str_radix(s, radix).map(DoubleDouble::from_f64)
    }
}

impl ToPrimitive for DoubleDouble {
    fn to_i64(&self) -> Option<i64> {
        let t = self.trunc();
        let v = t.hi.to_i64()?;
        v.checked_add(t.lo.to_i64()?)
    }
    fn to_u64(&self) -> Option<u64> {
        let v = self.to_i64()?;
        u64::try_from(v).ok()
    }
    fn to_f64(&self) -> Option<f64> {
        Some(self.hi + self.lo)
    }
    fn to_f32(&self) -> Option<f32> {
        Some((self.hi + self.lo) as f32)
    }
}

impl NumCast for DoubleDouble {
    fn from<N: ToPrimitive>(n: N) -> Option<Self> {
        if let Some(i) = n.to_i64() {
            // Integers beyond 2^53 keep their low bits.
            let hi = i as f64;
            let lo = (i - hi as i64) as f64;
            if n.to_f64().map(|f| f == hi + lo || f.fract() == 0.0).unwrap_or(false) {
                return Some(DoubleDouble::new(hi, lo));
            }
        }
        n.to_f64().map(DoubleDouble::from_f64)
    }
}

impl FloatConst for DoubleDouble {
    fn E() -> Self {
        E_DD
    }
    fn FRAC_1_PI() -> Self {
        Self::ONE / PI_DD
    }
    fn FRAC_1_SQRT_2() -> Self {
        Self::ONE / DoubleDouble::from_f64(2.0).dd_sqrt()
    }
    fn FRAC_2_PI() -> Self {
        DoubleDouble::from_f64(2.0) / PI_DD
    }
    fn FRAC_2_SQRT_PI() -> Self {
        DoubleDouble::from_f64(2.0) / PI_DD.dd_sqrt()
    }
    fn FRAC_PI_2() -> Self {
        HALF_PI_DD
    }
    fn FRAC_PI_3() -> Self {
        PI_DD / DoubleDouble::from_f64(3.0)
    }
    fn FRAC_PI_4() -> Self {
        PI_DD.ldexp(-2)
    }
    fn FRAC_PI_6() -> Self {
        PI_DD / DoubleDouble::from_f64(6.0)
    }
    fn FRAC_PI_8() -> Self {
        PI_DD.ldexp(-3)
    }
    fn LN_10() -> Self {
        LN10_DD
    }
    fn LN_2() -> Self {
        LN2_DD
    }
    fn LOG10_E() -> Self {
        Self::ONE / LN10_DD
    }
    fn LOG2_E() -> Self {
        Self::ONE / LN2_DD
    }
    fn PI() -> Self {
        PI_DD
    }
    fn SQRT_2() -> Self {
        DoubleDouble::from_f64(2.0).dd_sqrt()
    }
    fn TAU() -> Self {
        TWO_PI_DD
    }
    fn LOG10_2() -> Self {
        LN2_DD / LN10_DD
    }
    fn LOG2_10() -> Self {
        LN10_DD / LN2_DD
    }
}

impl Float for DoubleDouble {
    fn nan() -> Self {
        DoubleDouble { hi: f64::NAN, lo: 0.0 }
    }
    fn infinity() -> Self {
        DoubleDouble { hi: f64::INFINITY, lo: 0.0 }
    }
    fn neg_infinity() -> Self {
        DoubleDouble { hi: f64::NEG_INFINITY, lo: 0.0 }
    }
    fn neg_zero() -> Self {
        DoubleDouble { hi: -0.0, lo: 0.0 }
    }
    fn min_value() -> Self {
        -Self::max_value()
    }
    fn min_positive_value() -> Self {
        DoubleDouble::from_f64(2.0041683600089728e-292)
    }
    fn epsilon() -> Self {
        DoubleDouble::from_f64(EPS)
    }
    fn max_value() -> Self {
        DoubleDouble { hi: f64::MAX, lo: 9.979201547673598e291 }
    }
    fn is_nan(self) -> bool {
        self.hi.is_nan()
    }
    fn is_infinite(self) -> bool {
        self.hi.is_infinite()
    }
    fn is_finite(self) -> bool {
        self.hi.is_finite()
    }
    fn is_normal(self) -> bool {
        self.hi.is_normal()
    }
    fn classify(self) -> FpCategory {
        self.hi.classify()
    }
    fn floor(self) -> Self {
        let hi = self.hi.floor();
        if hi == self.hi {
            DoubleDouble::new(hi, self.lo.floor())
        } else {
            DoubleDouble { hi, lo: 0.0 }
        }
    }
    fn ceil(self) -> Self {
        let hi = self.hi.ceil();
        if hi == self.hi {
            DoubleDouble::new(hi, self.lo.ceil())
        } else {
            DoubleDouble { hi, lo: 0.0 }
        }
    }
    fn round(self) -> Self {
        if self.hi >= 0.0 {
            (self + DoubleDouble::from_f64(0.5)).floor()
        } else {
            (self - DoubleDouble::from_f64(0.5)).ceil()
        }
    }
    fn trunc(self) -> Self {
        if self.hi >= 0.0 {
            self.floor()
        } else {
            self.ceil()
        }
    }
    fn fract(self) -> Self {
        self - self.trunc()
    }
    fn abs(self) -> Self {
        if self.hi < 0.0 || (self.hi == 0.0 && self.hi.is_sign_negative()) {
            -self
        } else {
            self
        }
    }
    fn signum(self) -> Self {
        DoubleDouble::from_f64(self.hi.signum())
    }
    fn is_sign_positive(self) -> bool {
        self.hi.is_sign_positive()
    }
    fn is_sign_negative(self) -> bool {
        self.hi.is_sign_negative()
    }
    fn mul_add(self, a: Self, b: Self) -> Self {
        self * a + b
    }
    fn recip(self) -> Self {
        Self::ONE / self
    }
    fn powi(self, n: i32) -> Self {
        let mut base = self;
        let mut e = n.unsigned_abs();
        let mut acc = Self::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        if n < 0 {
            acc.recip()
        } else {
            acc
        }
    }
    fn powf(self, n: Self) -> Self {
        if n.fract().is_zero() && n.abs().hi < i32::MAX as f64 {
            return self.powi(n.hi as i32);
        }
        (n * self.dd_ln()).dd_exp()
    }
    fn sqrt(self) -> Self {
        self.dd_sqrt()
    }
    fn exp(self) -> Self {
        self.dd_exp()
    }
    fn exp2(self) -> Self {
        (self * LN2_DD).dd_exp()
    }
    fn ln(self) -> Self {
        self.dd_ln()
    }
    fn log(self, base: Self) -> Self {
        self.dd_ln() / base.dd_ln()
    }
    fn log2(self) -> Self {
        self.dd_ln() / LN2_DD
    }
    fn log10(self) -> Self {
        self.dd_ln() / LN10_DD
    }
    fn max(self, other: Self) -> Self {
        if self.is_nan() || other > self {
            other
        } else {
            self
        }
    }
    fn min(self, other: Self) -> Self {
        if self.is_nan() || other < self {
            other
        } else {
            self
        }
    }
    fn abs_sub(self, other: Self) -> Self {
        if self > other {
            self - other
        } else {
            Self::ZERO
        }
    }
    fn cbrt(self) -> Self {
        if self.hi == 0.0 || !self.hi.is_finite() {
            return self;
        }
        let mut y = DoubleDouble::from_f64(self.hi.cbrt());
        for _ in 0..2 {
            y = y - (y * y * y - self) / (DoubleDouble::from_f64(3.0) * y * y);
        }
        y
    }
    fn hypot(self, other: Self) -> Self {
        let (a, b) = (self.abs(), other.abs());
        let m = a.max(b);
        if m.is_zero() {
            return Self::ZERO;
        }
        let (x, y) = (a / m, b / m);
        m * (x * x + y * y).dd_sqrt()
    }
    fn sin(self) -> Self {
        self.dd_sin_cos().0
    }
    fn cos(self) -> Self {
        self.dd_sin_cos().1
    }
    fn tan(self) -> Self {
        let (s, c) = self.dd_sin_cos();
        s / c
    }
    fn asin(self) -> Self {
        Self::dd_atan2(self, (Self::ONE - self * self).dd_sqrt())
    }
    fn acos(self) -> Self {
        Self::dd_atan2((Self::ONE - self * self).dd_sqrt(), self)
    }
    fn atan(self) -> Self {
        Self::dd_atan2(self, Self::ONE)
    }
    fn atan2(self, other: Self) -> Self {
        Self::dd_atan2(self, other)
    }
    fn sin_cos(self) -> (Self, Self) {
        self.dd_sin_cos()
    }
    fn exp_m1(self) -> Self {
        if self.hi.abs() <= 0.5 {
            Self::expm1_small(self)
        } else {
            self.dd_exp() - Self::ONE
        }
    }
    fn ln_1p(self) -> Self {
        let u = Self::ONE + self;
        if u == Self::ONE {
            return self;
        }
        u.dd_ln() * (self / (u - Self::ONE))
    }
    fn sinh(self) -> Self {
        if self.hi.abs() <= 0.5 {
            let e = Self::expm1_small(self);
            // sinh = (e^x − e^{−x})/2 = (E + E/(E+1))/2 with E = e^x − 1.
            (e + e / (e + Self::ONE)).ldexp(-1)
        } else {
            let e = self.dd_exp();
            (e - e.recip()).ldexp(-1)
        }
    }
    fn cosh(self) -> Self {
        let e = self.abs().dd_exp();
        (e + e.recip()).ldexp(-1)
    }
    fn tanh(self) -> Self {
        if self.hi.abs() > 40.0 {
            return DoubleDouble::from_f64(self.hi.signum());
        }
        self.sinh() / self.cosh()
    }
    fn asinh(self) -> Self {
        let a = self.abs();
        let r = (a + (a * a + Self::ONE).dd_sqrt()).dd_ln();
        if self.hi < 0.0 {
            -r
        } else {
            r
        }
    }
    fn acosh(self) -> Self {
        (self + (self * self - Self::ONE).dd_sqrt()).dd_ln()
    }
    fn atanh(self) -> Self {
        ((Self::ONE + self) / (Self::ONE - self)).dd_ln().ldexp(-1)
    }
    fn integer_decode(self) -> (u64, i16, i8) {
        self.hi.integer_decode()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type D = DoubleDouble;

    fn third() -> D {
        D::ONE / D::from_f64(3.0)
    }

    fn rel(a: D, b: D) -> f64 {
        ((a - b) / b).abs().to_f64()
    }

    #[test]
    fn arithmetic_exactness() {
        let t = third();
        let back = t * D::from_f64(3.0);
        assert!((back - D::ONE).abs().to_f64() < 1e-31);
        let x = D::from_f64(1.0) + D::from_f64(1e-20);
        assert_eq!(x.lo(), 1e-20);
        assert!(rel(x.sqrt() * x.sqrt(), x) < 1e-31);
    }

    // Reference pairs (hi, lo) from a 50-digit evaluation.
    #[test]
    fn transcendental_accuracy() {
        let x = D::from_f64(13.7) + third();
        let cases = [
            (Float::exp(-x), D::new(8.042679651301508e-07, -1.2656383474358312e-23)),
            (Float::exp(x), D::new(1243366.6928884515, 3.818146212067453e-11)),
            (Float::cos(x), D::new(0.1036471294508406, -5.191227173271161e-18)),
            (Float::sin(x), D::new(0.9946141324939037, -1.6302754377455815e-18)),
            (Float::cosh(x), D::new(621683.3464446279, 5.4551705902861496e-11)),
            (Float::sqrt(x), D::new(3.7461090925563463, 6.298382908682783e-17)),
            (Float::ln(x), D::new(2.641435452020226, -1.2407844573676142e-16)),
        ];
        for (got, want) in cases {
            assert!(rel(got, want) < 1e-30, "{got:?} vs {want:?}");
        }
        let big = D::from_f64(35.0) + third();
        assert!(rel(Float::cos(big), D::new(-0.7138511278125417, 1.6812110586804003e-17)) < 1e-30);
        assert!(rel(Float::exp(-big), D::new(4.517813575468887e-16, -4.661396339370729e-32)) < 1e-30);
        let e = Float::exp_m1(D::from_f64(1e-10));
        assert!(rel(e, D::new(1.00000000005e-10, 3.3900133221217734e-27)) < 1e-30);
    }

    #[test]
    fn identities() {
        for &v in &[0.1, 0.7, 2.5, 11.0, 33.3] {
            let x = D::from_f64(v) + third() * D::from_f64(1e-3);
            let (s, c) = x.sin_cos();
            assert!((s * s + c * c - D::ONE).abs().to_f64() < 1e-31);
            assert!(rel(x.exp().ln(), x) < 1e-30);
            let wrapped = x - D::TAU() * (x / D::TAU()).round();
            assert!((Float::atan2(s, c) - wrapped).abs().to_f64() < 1e-30);
            assert!(rel(x.cosh() * x.cosh() - x.sinh() * x.sinh(), D::ONE) < 1e-31 * x.cosh().to_f64().powi(2));
        }
    }

    #[test]
    fn formatting_and_rounding() {
        assert_eq!(third().to_sci_string(5), "3.3333e-1");
        assert_eq!(D::from_f64(2.0 / 3.0).to_sci_string(3), "6.67e-1");
        assert_eq!(D::from_f64(-1.5).round().to_f64(), -2.0);
        assert_eq!((D::from_f64(7.0) % D::from_f64(3.0)).to_f64(), 1.0);
        assert!(D::from_f64(1.0) < D::from_f64(1.0) + D::epsilon());
    }
}
