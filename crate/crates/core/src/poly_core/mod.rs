//! Integer polynomials, certified complex roots and Mahler measures.

mod mahler;
mod ratpoly;
mod roots;

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub use mahler::{mahler_from_roots, mahler_measure, MahlerMeasure, MahlerVariant};
pub(crate) use mahler::root_radius_target;
pub use ratpoly::RatPoly;
pub use roots::{roots, roots_with, ComplexRootSet, RootEnclosure, RootOptions};
pub(crate) use roots::{refined_distinct_roots, DEFAULT_START_BITS};

/// `A(x) = a_0 + a_1 x + ... + a_d x^d` with `a_d != 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntPolynomial {
    /// Strips trailing zeros; the all-zero polynomial is rejected.
    pub fn new(mut coeffs: Vec<BigInt>) -> Result<Self> {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            return Err(Error::Parse("the zero polynomial has no degree".into()));
        }
        Ok(IntPolynomial { coeffs })
    }

    pub fn from_i64(coeffs: &[i64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// Ascending coefficients `a_0..a_d`.
    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    /// Coefficient for a possibly out-of-range signed index (zero outside `0..=d`).
    pub fn coeff_signed(&self, i: i64) -> BigInt {
        if i < 0 {
            BigInt::zero()
        } else {
            self.coeff(i as usize)
        }
    }

    pub fn leading(&self) -> &BigInt {
        self.coeffs.last().expect("nonempty")
    }

    pub fn constant(&self) -> &BigInt {
        &self.coeffs[0]
    }

    pub fn has_zero_constant(&self) -> bool {
        self.coeffs[0].is_zero()
    }

    pub fn content(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    pub fn is_primitive(&self) -> bool {
        self.content().is_one()
    }

    pub fn require_nonzero_constant(&self) -> Result<()> {
        if self.has_zero_constant() {
            Err(Error::ZeroConstant)
        } else {
            Ok(())
        }
    }

    pub fn require_primitive(&self) -> Result<()> {
        let c = self.content();
        if c.is_one() {
            Ok(())
        } else {
            Err(Error::NotPrimitive(c))
        }
    }

    /// Sum of absolute values of the coefficients.
    pub fn l1_norm(&self) -> BigInt {
        self.coeffs.iter().map(|c| c.abs()).sum()
    }

    /// Reversed polynomial `sum a_i x^(d-i)`.
    pub fn conjugate(&self) -> Result<Self> {
        self.require_nonzero_constant()?;
        let mut c = self.coeffs.clone();
        c.reverse();
        Self::new(c)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out).expect("product of nonzero polynomials")
    }

    pub fn to_rat_poly(&self) -> RatPoly {
        RatPoly::new(self.coeffs.iter().cloned().map(BigRational::from_integer).collect())
    }

    pub fn to_f64_coeffs(&self) -> Vec<f64> {
        self.coeffs.iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect()
    }

    /// Comma-separated ascending coefficients, the CLI input format.
    pub fn to_coeff_string(&self) -> String {
        self.coeffs.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
    }

    /// Primitive integer polynomial proportional to a rational one, with
    /// positive leading coefficient.
    pub fn primitive_of(p: &RatPoly) -> Result<Self> {
        let den = p.coeffs().iter().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
        let ints: Vec<BigInt> = p.coeffs().iter().map(|c| (c * &den).to_integer()).collect();
        let mut q = Self::new(ints)?;
        let g = q.content();
        let sign = if q.leading().is_negative() { -BigInt::one() } else { BigInt::one() };
        for c in &mut q.coeffs {
            *c = &*c / &g * &sign;
        }
        Ok(q)
    }
}

/// Parses `"a0,a1,...,ad"` (ascending degree).
pub fn parse_polynomial(text: &str) -> Result<IntPolynomial> {
    let text = text.trim();
    if text.is_empty() {
        return Err(Error::Parse("empty coefficient list".into()));
    }
    let coeffs = text
        .split(',')
        .map(|tok| {
            let t = tok.trim();
            let digits = t.strip_prefix('-').unwrap_or(t);
            if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                return Err(Error::Parse(format!("not an integer: {t:?}")));
            }
            t.parse::<BigInt>().map_err(|_| Error::Parse(format!("not an integer: {t:?}")))
        })
        .collect::<Result<Vec<_>>>()?;
    IntPolynomial::new(coeffs)
}

impl FromStr for IntPolynomial {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_polynomial(s)
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            if !mag.is_one() || i == 0 {
                write!(f, "{mag}")?;
            }
            match i {
                0 => {}
                1 => write!(f, "x")?,
                _ => write!(f, "x^{i}")?,
            }
        }
        Ok(())
    }
}

pub(crate) fn binomial(n: usize, k: usize) -> BigInt {
    let mut b = BigInt::one();
    for i in 0..k {
        b = b * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    b
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_worked_example() {
        let a = parse_polynomial("3,-2,-9,-3,9").unwrap();
        assert_eq!(a.degree(), 4);
        assert!(a.is_primitive());
        assert_eq!(a.to_string(), "9x^4 - 3x^3 - 9x^2 - 2x + 3");
    }

    #[test]
    fn parse_flags() {
        let x = parse_polynomial("0,1").unwrap();
        assert!(x.has_zero_constant());
        assert_eq!(x.conjugate(), Err(Error::ZeroConstant));
        let p = parse_polynomial("2,4").unwrap();
        assert!(!p.is_primitive());
        assert_eq!(p.require_primitive(), Err(Error::NotPrimitive(2.into())));
        assert_eq!(parse_polynomial("1,2,0,0").unwrap().degree(), 1);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(parse_polynomial(""), Err(Error::Parse(_))));
        assert!(matches!(parse_polynomial("1,x"), Err(Error::Parse(_))));
        assert!(matches!(parse_polynomial("1.5"), Err(Error::Parse(_))));
        assert!(matches!(parse_polynomial("0,0"), Err(Error::Parse(_))));
        assert!(matches!(parse_polynomial("1,,2"), Err(Error::Parse(_))));
        assert_eq!(parse_polynomial(" -1 , 1 ").unwrap().to_coeff_string(), "-1,1");
    }

    #[test]
    fn conjugate_examples() {
        let c = |s: &str| parse_polynomial(s).unwrap().conjugate().unwrap().to_coeff_string();
        assert_eq!(c("-2,1"), "1,-2");
        assert_eq!(c("1,3,1"), "1,3,1");
        assert_eq!(c("3,-2,-9,-3,9"), "9,-3,-9,-2,3");
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(4, 2), BigInt::from(6));
        assert_eq!(binomial(5, 0), BigInt::one());
        assert_eq!(binomial(20, 10), BigInt::from(184_756));
    }
}
