//! Scalar backends.
//!
//! Tensors carry either exact Gaussian rationals ([`GaussianRational`]) or
//! double-precision complex numbers ([`C64`]). Both implement [`Scalar`];
//! only the exact backend implements [`ExactField`], so algorithms that rely
//! on testing entries against zero without a tolerance cannot be called on
//! floating-point data by accident.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type C64 = num_complex::Complex64;

/// Ring operations shared by both scalar backends.
pub trait Scalar:
    Clone
    + fmt::Debug
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;
    fn conj(&self) -> Self;
    fn to_c64(&self) -> C64;
    /// Modulus as a float, used for tolerance-based comparisons.
    fn modulus(&self) -> f64 {
        self.to_c64().norm()
    }
}

/// A field with exact zero testing and exact inverses.
pub trait ExactField: Scalar + Div<Output = Self> + PartialEq + Eq {
    fn is_zero(&self) -> bool;
    fn inv(&self) -> Self;
}

impl Scalar for C64 {
    fn zero() -> Self {
        C64::new(0.0, 0.0)
    }
    fn one() -> Self {
        C64::new(1.0, 0.0)
    }
    fn from_i64(v: i64) -> Self {
        C64::new(v as f64, 0.0)
    }
    fn conj(&self) -> Self {
        num_complex::Complex::conj(self)
    }
    fn to_c64(&self) -> C64 {
        *self
    }
    fn modulus(&self) -> f64 {
        self.norm()
    }
}

/// `re + i·im` with arbitrary-precision rational parts.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GaussianRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussianRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Self { re, im }
    }

    pub fn real(re: BigRational) -> Self {
        Self { re, im: BigRational::zero() }
    }

    pub fn from_ints(re: i64, im: i64) -> Self {
        Self {
            re: BigRational::from_integer(BigInt::from(re)),
            im: BigRational::from_integer(BigInt::from(im)),
        }
    }

    /// The real rational `num/den`. Panics when `den == 0`.
    pub fn ratio(num: i64, den: i64) -> Self {
        Self::real(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn i() -> Self {
        Self::from_ints(0, 1)
    }

    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn is_integral(&self) -> bool {
        self.re.is_integer() && self.im.is_integer()
    }

    /// Least common multiple of the denominators of both parts.
    pub fn denominator_lcm(&self) -> BigInt {
        num_integer::Integer::lcm(self.re.denom(), self.im.denom())
    }

    /// Best rational approximation of each part with denominator at most `max_den`.
    pub fn rationalize(z: C64, max_den: u64) -> Self {
        Self { re: rationalize_f64(z.re, max_den), im: rationalize_f64(z.im, max_den) }
    }
}

/// Best rational approximation of `x` with denominator bounded by `max_den`,
/// via continued-fraction convergents and the final semiconvergent.
pub fn rationalize_f64(x: f64, max_den: u64) -> BigRational {
    assert!(x.is_finite(), "cannot rationalize a non-finite value");
    let max_den = max_den.max(1) as i128;
    let negative = x < 0.0;
    let mut rem = x.abs();
    // h/k convergents
    let (mut h0, mut h1): (i128, i128) = (0, 1);
    let (mut k0, mut k1): (i128, i128) = (1, 0);
    let mut best = (0i128, 1i128);
    for _ in 0..64 {
        let a = rem.floor();
        if a > 1e18 {
            break;
        }
        let a = a as i128;
        let h2 = a * h1 + h0;
        let k2 = a * k1 + k0;
        if k2 > max_den {
            // largest semiconvergent that still fits
            let t = (max_den - k0) / k1.max(1);
            if t > 0 {
                let hs = t * h1 + h0;
                let ks = t * k1 + k0;
                let err_s = (x.abs() - hs as f64 / ks as f64).abs();
                let err_c = (x.abs() - best.0 as f64 / best.1 as f64).abs();
                if err_s < err_c {
                    best = (hs, ks);
                }
            }
            break;
        }
        best = (h2, k2);
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
        let frac = rem - a as f64;
        if frac <= f64::EPSILON * rem.max(1.0) {
            break;
        }
        rem = 1.0 / frac;
    }
    let num = if negative { -best.0 } else { best.0 };
    BigRational::new(BigInt::from(num), BigInt::from(best.1))
}

fn fmt_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", fmt_rational(&self.re)),
            (true, false) => write!(f, "{}i", fmt_rational(&self.im)),
            (false, false) => {
                let sign = if self.im.is_negative() { "-" } else { "+" };
                write!(f, "{}{}{}i", fmt_rational(&self.re), sign, fmt_rational(&self.im.abs()))
            }
        }
    }
}

impl fmt::Debug for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl<'a> Add<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn add(self, o: &GaussianRational) -> GaussianRational {
        GaussianRational { re: &self.re + &o.re, im: &self.im + &o.im }
    }
}

impl<'a> Sub<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn sub(self, o: &GaussianRational) -> GaussianRational {
        GaussianRational { re: &self.re - &o.re, im: &self.im - &o.im }
    }
}

impl<'a> Mul<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn mul(self, o: &GaussianRational) -> GaussianRational {
        if self.im.is_zero() && o.im.is_zero() {
            return GaussianRational::real(&self.re * &o.re);
        }
        GaussianRational {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }
}

impl<'a> Div<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn div(self, o: &GaussianRational) -> GaussianRational {
        self * &o.inv()
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<GaussianRational> for GaussianRational {
            type Output = GaussianRational;
            fn $m(self, o: GaussianRational) -> GaussianRational {
                (&self).$m(&o)
            }
        }
        impl<'a> $tr<&'a GaussianRational> for GaussianRational {
            type Output = GaussianRational;
            fn $m(self, o: &GaussianRational) -> GaussianRational {
                (&self).$m(o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational { re: -self.re, im: -self.im }
    }
}

impl<'a> Neg for &'a GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational { re: -&self.re, im: -&self.im }
    }
}

impl Scalar for GaussianRational {
    fn zero() -> Self {
        Self { re: BigRational::zero(), im: BigRational::zero() }
    }
    fn one() -> Self {
        Self { re: BigRational::one(), im: BigRational::zero() }
    }
    fn from_i64(v: i64) -> Self {
        Self::from_ints(v, 0)
    }
    fn conj(&self) -> Self {
        Self { re: self.re.clone(), im: -&self.im }
    }
    fn to_c64(&self) -> C64 {
        C64::new(self.re.to_f64().unwrap_or(f64::NAN), self.im.to_f64().unwrap_or(f64::NAN))
    }
}

impl ExactField for GaussianRational {
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    /// Panics on zero.
    fn inv(&self) -> Self {
        let n = self.norm_sqr();
        assert!(!n.is_zero(), "division by zero Gaussian rational");
        if self.im.is_zero() {
            return Self::real(self.re.recip());
        }
        Self { re: &self.re / &n, im: -&self.im / &n }
    }
}
