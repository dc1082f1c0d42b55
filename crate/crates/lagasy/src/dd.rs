//! Double-double arithmetic: an unevaluated sum of two `f64`s giving roughly
//! 32 significant digits. Used by the extended-precision oracle paths and by
//! the special-function series that suffer cancellation in plain doubles.
//!
//! The error-free transformations (two_sum, two_prod) are the standard ones;
//! two_prod relies on fused multiply-add.

use std::ops::{Add, Div, Mul, Neg, Sub};

/// hi + lo with |lo| <= ulp(hi)/2.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };
    pub const PI: Dd = Dd { hi: 3.141592653589793, lo: 1.2246467991473532e-16 };
    pub const LN2: Dd = Dd { hi: 0.6931471805599453, lo: 2.3190468138462996e-17 };
    pub const E: Dd = Dd { hi: 2.718281828459045, lo: 1.4456468917292502e-16 };
    pub const SQRT_PI: Dd = Dd { hi: 1.772453850905516, lo: -7.666586499825799e-17 };

    #[inline]
    pub fn from_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    #[inline]
    pub fn new(hi: f64, lo: f64) -> Dd {
        let (s, e) = quick_two_sum(hi, lo);
        Dd { hi: s, lo: e }
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn abs(self) -> Dd {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) { -self } else { self }
    }

    pub fn sqrt(self) -> Dd {
        if self.hi == 0.0 && self.lo == 0.0 {
            return Dd::ZERO;
        }
        // one Newton step on y = sqrt(a) from the double estimate
        let y = self.hi.sqrt();
        let yd = Dd::from_f64(y);
        let r = self / yd;
        (yd + r) * Dd::from_f64(0.5)
    }

    /// exp with argument reduction x = k ln2 + r, |r| <= ln2/2, then a Taylor
    /// series of e^r at double-double precision.
    pub fn exp(self) -> Dd {
        if self.hi > 709.0 {
            return Dd::from_f64(f64::INFINITY);
        }
        if self.hi < -709.0 {
            return Dd::ZERO;
        }
        let k = (self.hi / std::f64::consts::LN_2).round();
        let r = self - Dd::LN2 * Dd::from_f64(k);
        // e^r with |r| <= 0.347: reduce further by 256, square 8 times
        let rs = r * Dd::from_f64(1.0 / 256.0);
        let mut term = rs;
        let mut sum = Dd::ONE + rs;
        for j in 2..22 {
            term = term * rs / Dd::from_f64(j as f64);
            sum = sum + term;
            if term.hi.abs() < 1e-35 * sum.hi.abs() {
                break;
            }
        }
        for _ in 0..8 {
            sum = sum * sum;
        }
        // scale by 2^k
        let scale = (k as i32).max(-1022).min(1023);
        Dd {
            hi: sum.hi * f64::powi(2.0, scale),
            lo: sum.lo * f64::powi(2.0, scale),
        }
    }

    /// Natural log by one Newton step from the double estimate.
    pub fn ln(self) -> Dd {
        let y0 = self.hi.ln();
        let y = Dd::from_f64(y0);
        // y1 = y0 + a e^{-y0} - 1
        y + self * (-y).exp() - Dd::ONE
    }

    pub fn powf(self, e: f64) -> Dd {
        (self.ln() * Dd::from_f64(e)).exp()
    }

    pub fn sinh(self) -> Dd {
        let e = self.exp();
        (e - Dd::ONE / e) * Dd::from_f64(0.5)
    }

    pub fn cosh(self) -> Dd {
        let e = self.exp();
        (e + Dd::ONE / e) * Dd::from_f64(0.5)
    }

    #[inline]
    pub fn recip(self) -> Dd {
        Dd::ONE / self
    }
}

impl Add for Dd {
    type Output = Dd;
    #[inline]
    fn add(self, rhs: Dd) -> Dd {
        let (s0, e1) = two_sum(self.hi, rhs.hi);
        let (s1, e2) = two_sum(self.lo, rhs.lo);
        let (s0, e1) = quick_two_sum(s0, e1 + s1);
        let (hi, lo) = quick_two_sum(s0, e1 + e2);
        Dd { hi, lo }
    }
}

impl Sub for Dd {
    type Output = Dd;
    #[inline]
    fn sub(self, rhs: Dd) -> Dd {
        self + (-rhs)
    }
}

impl Neg for Dd {
    type Output = Dd;
    #[inline]
    fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }
}

impl Mul for Dd {
    type Output = Dd;
    #[inline]
    fn mul(self, rhs: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, rhs.hi);
        let e = e + self.hi * rhs.lo + self.lo * rhs.hi;
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }
}

impl Div for Dd {
    type Output = Dd;
    #[inline]
    fn div(self, rhs: Dd) -> Dd {
        let q1 = self.hi / rhs.hi;
        let r = self - rhs * Dd::from_f64(q1);
        let q2 = r.hi / rhs.hi;
        let r2 = r - rhs * Dd::from_f64(q2);
        let q3 = r2.hi / rhs.hi;
        Dd::new(q1, q2) + Dd::from_f64(q3)
    }
}

/// Complex number with double-double components.
#[derive(Clone, Copy, Debug)]
pub struct DdComplex {
    pub re: Dd,
    pub im: Dd,
}

impl DdComplex {
    pub const ZERO: DdComplex = DdComplex { re: Dd::ZERO, im: Dd::ZERO };

    pub fn new(re: Dd, im: Dd) -> DdComplex {
        DdComplex { re, im }
    }

    pub fn from_f64(re: f64, im: f64) -> DdComplex {
        DdComplex { re: Dd::from_f64(re), im: Dd::from_f64(im) }
    }

    pub fn to_c64(self) -> num_complex::Complex64 {
        num_complex::Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    pub fn norm_f64(self) -> f64 {
        self.to_c64().norm()
    }

    pub fn scale(self, s: Dd) -> DdComplex {
        DdComplex { re: self.re * s, im: self.im * s }
    }

    pub fn div_scalar(self, s: Dd) -> DdComplex {
        DdComplex { re: self.re / s, im: self.im / s }
    }
}

impl Add for DdComplex {
    type Output = DdComplex;
    fn add(self, rhs: DdComplex) -> DdComplex {
        DdComplex { re: self.re + rhs.re, im: self.im + rhs.im }
    }
}

impl Sub for DdComplex {
    type Output = DdComplex;
    fn sub(self, rhs: DdComplex) -> DdComplex {
        DdComplex { re: self.re - rhs.re, im: self.im - rhs.im }
    }
}

impl Mul for DdComplex {
    type Output = DdComplex;
    fn mul(self, rhs: DdComplex) -> DdComplex {
        DdComplex {
            re: self.re * rhs.re - self.im * rhs.im,
            im: self.re * rhs.im + self.im * rhs.re,
        }
    }
}

impl Div for DdComplex {
    type Output = DdComplex;
    fn div(self, rhs: DdComplex) -> DdComplex {
        let d = rhs.re * rhs.re + rhs.im * rhs.im;
        DdComplex {
            re: (self.re * rhs.re + self.im * rhs.im) / d,
            im: (self.im * rhs.re - self.re * rhs.im) / d,
        }
    }
}

impl Neg for DdComplex {
    type Output = DdComplex;
    fn neg(self) -> DdComplex {
        DdComplex { re: -self.re, im: -self.im }
    }
}
