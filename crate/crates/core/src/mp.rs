//! Binary floating point with an arbitrary-length mantissa.
//!
//! A value is `mant * 2^exp`. Addition, subtraction and multiplication are
//! exact; `round` and `div` truncate to a requested number of mantissa bits.
//! Exactness of the ring operations is what lets the root certifier evaluate
//! residuals with no rounding at all.

use std::cmp::Ordering;

use num_bigint::{BigInt, Sign};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Float {
    mant: BigInt,
    exp: i64,
}

fn ldexp(x: f64, mut e: i64) -> f64 {
    let mut y = x;
    while e > 1000 {
        y *= 2f64.powi(1000);
        e -= 1000;
        if y.is_infinite() {
            return y;
        }
    }
    while e < -1000 {
        y *= 2f64.powi(-1000);
        e += 1000;
        if y == 0.0 {
            return y;
        }
    }
    y * 2f64.powi(e as i32)
}

impl Float {
    pub fn zero() -> Self {
        Float { mant: BigInt::zero(), exp: 0 }
    }

    pub fn from_bigint(mant: BigInt) -> Self {
        Float { mant, exp: 0 }.normalized()
    }

    pub fn from_i64(v: i64) -> Self {
        Self::from_bigint(BigInt::from(v))
    }

    /// Exact conversion; non-finite input panics.
    pub fn from_f64(x: f64) -> Self {
        assert!(x.is_finite(), "non-finite value {x}");
        if x == 0.0 {
            return Self::zero();
        }
        let bits = x.to_bits();
        let exp_bits = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (m, e) = if exp_bits == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), exp_bits - 1075)
        };
        let mant = if x < 0.0 {
            -BigInt::from(m)
        } else {
            BigInt::from(m)
        };
        Float { mant, exp: e }.normalized()
    }

    pub fn from_rational(r: &BigRational, prec: u32) -> Self {
        Self::from_bigint(r.numer().clone()).div(&Self::from_bigint(r.denom().clone()), prec)
    }

    fn normalized(mut self) -> Self {
        if self.mant.is_zero() {
            self.exp = 0;
            return self;
        }
        if let Some(tz) = self.mant.trailing_zeros() {
            if tz > 0 {
                self.mant >>= tz;
                self.exp += tz as i64;
            }
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn signum(&self) -> i32 {
        match self.mant.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    pub fn neg(&self) -> Self {
        Float { mant: -&self.mant, exp: self.exp }
    }

    pub fn abs(&self) -> Self {
        Float { mant: self.mant.abs(), exp: self.exp }
    }

    /// Number of significant bits in the mantissa.
    pub fn bits(&self) -> u64 {
        self.mant.bits()
    }

    /// Binary magnitude: `|self| < 2^magnitude()`. Zero maps to `i64::MIN`.
    pub fn magnitude(&self) -> i64 {
        if self.is_zero() {
            i64::MIN
        } else {
            self.exp + self.mant.bits() as i64
        }
    }

    pub fn add(&self, other: &Float) -> Float {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let e = self.exp.min(other.exp);
        let a = &self.mant << (self.exp - e) as u64;
        let b = &other.mant << (other.exp - e) as u64;
        Float { mant: a + b, exp: e }.normalized()
    }

    pub fn sub(&self, other: &Float) -> Float {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Float) -> Float {
        Float {
            mant: &self.mant * &other.mant,
            exp: self.exp + other.exp,
        }
        .normalized()
    }

    pub fn mul_pow2(&self, k: i64) -> Float {
        if self.is_zero() {
            return self.clone();
        }
        Float { mant: self.mant.clone(), exp: self.exp + k }
    }

    /// Round to nearest with at most `prec` mantissa bits.
    pub fn round(&self, prec: u32) -> Float {
        let b = self.mant.bits();
        if b <= prec as u64 {
            return self.clone();
        }
        let shift = b - prec as u64;
        let m = self.mant.magnitude().clone();
        let half = num_bigint::BigUint::one() << (shift - 1);
        let q = (m + half) >> shift;
        let mant = BigInt::from_biguint(self.mant.sign(), q);
        Float { mant, exp: self.exp + shift as i64 }.normalized()
    }

    /// Quotient rounded to `prec` bits. Division by zero panics.
    pub fn div(&self, other: &Float, prec: u32) -> Float {
        assert!(!other.is_zero(), "division by zero");
        if self.is_zero() {
            return Self::zero();
        }
        let want = prec as i64 + 2 + other.mant.bits() as i64 - self.mant.bits() as i64;
        let k = want.max(0) as u64;
        let q = (&self.mant << k) / &other.mant;
        Float { mant: q, exp: self.exp - other.exp - k as i64 }
            .normalized()
            .round(prec)
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let r = self.round(53);
        let m = r.mant.to_f64().unwrap_or(f64::NAN);
        ldexp(m, r.exp)
    }

    pub fn to_rational(&self) -> BigRational {
        if self.exp >= 0 {
            BigRational::from_integer(&self.mant << self.exp as u64)
        } else {
            BigRational::new(self.mant.clone(), BigInt::one() << (-self.exp) as u64)
        }
    }
}

impl PartialOrd for Float {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Float {
    fn cmp(&self, other: &Self) -> Ordering {
        self.sub(other).signum().cmp(&0)
    }
}

/// Complex number over [`Float`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CFloat {
    pub re: Float,
    pub im: Float,
}

impl CFloat {
    pub fn new(re: Float, im: Float) -> Self {
        CFloat { re, im }
    }

    pub fn zero() -> Self {
        CFloat::new(Float::zero(), Float::zero())
    }

    pub fn real(re: Float) -> Self {
        CFloat::new(re, Float::zero())
    }

    pub fn from_c64(z: Complex64) -> Self {
        CFloat::new(Float::from_f64(z.re), Float::from_f64(z.im))
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        CFloat::new(self.re.clone(), self.im.neg())
    }

    pub fn add(&self, o: &CFloat) -> CFloat {
        CFloat::new(self.re.add(&o.re), self.im.add(&o.im))
    }

    pub fn sub(&self, o: &CFloat) -> CFloat {
        CFloat::new(self.re.sub(&o.re), self.im.sub(&o.im))
    }

    /// Exact product.
    pub fn mul(&self, o: &CFloat) -> CFloat {
        CFloat::new(
            self.re.mul(&o.re).sub(&self.im.mul(&o.im)),
            self.re.mul(&o.im).add(&self.im.mul(&o.re)),
        )
    }

    pub fn scale(&self, s: &Float) -> CFloat {
        CFloat::new(self.re.mul(s), self.im.mul(s))
    }

    pub fn round(&self, prec: u32) -> CFloat {
        CFloat::new(self.re.round(prec), self.im.round(prec))
    }

    /// Exact `|z|^2`.
    pub fn norm_sqr(&self) -> Float {
        self.re.mul(&self.re).add(&self.im.mul(&self.im))
    }

    pub fn div(&self, o: &CFloat, prec: u32) -> CFloat {
        let den = o.norm_sqr().round(prec + 8);
        let num = self.mul(&o.conj()).round(prec + 8);
        CFloat::new(num.re.div(&den, prec), num.im.div(&den, prec))
    }

    pub fn magnitude(&self) -> i64 {
        self.re.magnitude().max(self.im.magnitude())
    }
}
