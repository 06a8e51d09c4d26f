//! Banded Toeplitz determinants from the roots of the symbol.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};
use serde::Serialize;

use super::LaurentSymbol;
use crate::error::{Error, Result};
use crate::exact_linalg::{det_rat, RatMatrix};
use crate::mp::{CFloat, Float};
use crate::poly_core::{binomial, refined_distinct_roots, IntPolynomial, RatPoly, DEFAULT_START_BITS};

const MAX_BITS: u32 = 4096;
const AGREEMENT_BITS: i64 = 40;
/// Leading coefficients above this skip the rational root search.
const RATIONAL_GUARD: u64 = 1_000_000_000_000;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrenchRoot {
    pub value: Complex64,
    pub multiplicity: usize,
    /// Set when the root was identified as an exact rational.
    pub rational: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrenchData {
    /// `D_{n-1}` is the determinant of an `n x n` matrix.
    pub n: usize,
    pub matrix_size: usize,
    pub roots: Vec<TrenchRoot>,
    pub g0: Complex64,
    pub gn: Complex64,
    pub value: f64,
    /// Exact value, present when every root is rational.
    pub exact: Option<String>,
    /// Bits used for the accepted evaluation; 0 on the exact path.
    pub precision_bits: u32,
}

/// `D_{n-1}(C) = (-1)^{ns} c_s^n G_n / G_0`.
pub fn trench_det(c: &LaurentSymbol, n: usize) -> Result<TrenchData> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let (r, s) = (c.r(), c.s());
    if r + s == 0 {
        // constant symbol: diagonal matrix
        let v = c.coeff(0).pow(n as i32);
        return Ok(TrenchData {
            n,
            matrix_size: n,
            roots: vec![],
            g0: Complex64::new(1.0, 0.0),
            gn: Complex64::new(1.0, 0.0),
            value: v.to_f64().unwrap_or(f64::NAN),
            exact: Some(crate::exact_linalg::fmt_rational(&v)),
            precision_bits: 0,
        });
    }
    let poly = IntPolynomial::primitive_of(&RatPoly::new(c.coeffs().to_vec()))?;
    let cs = c.coeff(s as i64);
    let sign = if (n * s) % 2 == 1 { -BigRational::one() } else { BigRational::one() };
    let scale = sign * cs.pow(n as i32);

    let mut prec = std::env::var("KRONREC_PRECISION")
        .ok()
        .and_then(|v| v.parse::<u32>().ok())
        .unwrap_or(DEFAULT_START_BITS)
        .max(64);
    let roots = refined_distinct_roots(&poly, prec)?;
    if let Some(exact) = rational_roots(&poly, &roots) {
        let exps = exponents(n, r, s);
        let g0 = det_rat(&gamma_rat(&exact, &exponents(0, r, s)));
        let gn = det_rat(&gamma_rat(&exact, &exps));
        if g0.is_zero() {
            return Err(Error::Numeric("G_0 vanished for exact roots".into()));
        }
        let v = &scale * &gn / &g0;
        return Ok(TrenchData {
            n,
            matrix_size: n,
            roots: exact
                .iter()
                .map(|(q, mu)| TrenchRoot {
                    value: Complex64::new(q.to_f64().unwrap_or(f64::NAN), 0.0),
                    multiplicity: *mu,
                    rational: Some(crate::exact_linalg::fmt_rational(q)),
                })
                .collect(),
            g0: Complex64::new(g0.to_f64().unwrap_or(f64::NAN), 0.0),
            gn: Complex64::new(gn.to_f64().unwrap_or(f64::NAN), 0.0),
            value: v.to_f64().unwrap_or(f64::NAN),
            exact: Some(crate::exact_linalg::fmt_rational(&v)),
            precision_bits: 0,
        });
    }

    let mut prev = evaluate(&poly, n, r, s, &scale, prec)?;
    loop {
        if prec >= MAX_BITS {
            return Err(Error::PrecisionExhausted { bits: prec });
        }
        prec *= 2;
        let cur = evaluate(&poly, n, r, s, &scale, prec)?;
        if let (Some(a), Some(b)) = (&prev, &cur) {
            let diff = a.value.sub(&b.value);
            if diff.is_zero() || diff.magnitude() <= b.value.magnitude() - AGREEMENT_BITS {
                return Ok(b.to_data(n, prec));
            }
        }
        prev = cur;
    }
}

struct Evaluation {
    roots: Vec<(CFloat, usize)>,
    g0: CFloat,
    gn: CFloat,
    value: Float,
}

impl Evaluation {
    fn to_data(&self, n: usize, prec: u32) -> TrenchData {
        TrenchData {
            n,
            matrix_size: n,
            roots: self
                .roots
                .iter()
                .map(|(z, mu)| TrenchRoot { value: z.to_c64(), multiplicity: *mu, rational: None })
                .collect(),
            g0: self.g0.to_c64(),
            gn: self.gn.to_c64(),
            value: self.value.to_f64(),
            exact: None,
            precision_bits: prec,
        }
    }
}

/// `None` when `G_0` is indistinguishable from zero at this precision.
fn evaluate(
    poly: &IntPolynomial,
    n: usize,
    r: usize,
    s: usize,
    scale: &BigRational,
    prec: u32,
) -> Result<Option<Evaluation>> {
    let roots = refined_distinct_roots(poly, prec)?;
    let g0 = det_complex(gamma_complex(&roots, &exponents(0, r, s), prec), prec);
    let gn = det_complex(gamma_complex(&roots, &exponents(n, r, s), prec), prec);
    let (Some(g0), Some(gn)) = (g0, gn) else {
        return Ok(None);
    };
    if gn.is_zero() {
        return Ok(Some(Evaluation { roots, g0, gn, value: Float::zero() }));
    }
    let ratio = gn.div(&g0, prec);
    let value = ratio.re.mul(&Float::from_rational(scale, prec)).round(prec);
    Ok(Some(Evaluation { roots, g0, gn, value }))
}

/// `0, ..., r-1, n+r, ..., n+r+s-1`.
fn exponents(n: usize, r: usize, s: usize) -> Vec<usize> {
    (0..r).chain(n + r..n + r + s).collect()
}

/// Row block of a root of multiplicity `mu`: `(1/k!) d^k/dz^k z^e`.
fn gamma_rat(roots: &[(BigRational, usize)], exps: &[usize]) -> RatMatrix {
    let rows: Vec<Vec<BigRational>> = roots
        .iter()
        .flat_map(|(z, mu)| {
            (0..*mu).map(move |k| {
                exps.iter()
                    .map(|&e| {
                        if e < k {
                            BigRational::zero()
                        } else {
                            BigRational::from_integer(binomial(e, k)) * z.pow((e - k) as i32)
                        }
                    })
                    .collect()
            })
        })
        .collect();
    RatMatrix::from_rows(rows, exps.len()).expect("square block")
}

fn cpow(z: &CFloat, mut e: usize, prec: u32) -> CFloat {
    let mut acc = CFloat::real(Float::from_i64(1));
    let mut base = z.clone();
    while e > 0 {
        if e & 1 == 1 {
            acc = acc.mul(&base).round(prec);
        }
        e >>= 1;
        if e > 0 {
            base = base.mul(&base).round(prec);
        }
    }
    acc
}

fn gamma_complex(roots: &[(CFloat, usize)], exps: &[usize], prec: u32) -> Vec<Vec<CFloat>> {
    let wp = prec + 16;
    roots
        .iter()
        .flat_map(|(z, mu)| {
            (0..*mu).map(move |k| {
                exps.iter()
                    .map(|&e| {
                        if e < k {
                            CFloat::zero()
                        } else {
                            cpow(z, e - k, wp).scale(&Float::from_bigint(binomial(e, k))).round(wp)
                        }
                    })
                    .collect()
            })
        })
        .collect()
}

/// Gaussian elimination with the largest available pivot. `None` when a
/// pivot column is entirely zero.
fn det_complex(mut a: Vec<Vec<CFloat>>, prec: u32) -> Option<CFloat> {
    let n = a.len();
    let wp = prec + 16;
    let mut det = CFloat::real(Float::from_i64(1));
    for col in 0..n {
        let piv = (col..n).max_by_key(|&i| a[i][col].magnitude())?;
        if a[piv][col].is_zero() {
            return None;
        }
        if piv != col {
            a.swap(piv, col);
            det = CFloat::new(det.re.neg(), det.im.neg());
        }
        det = det.mul(&a[col][col]).round(wp);
        for i in col + 1..n {
            if a[i][col].is_zero() {
                continue;
            }
            let f = a[i][col].div(&a[col][col], wp);
            for j in col + 1..n {
                let t = f.mul(&a[col][j]);
                a[i][j] = a[i][j].sub(&t).round(wp);
            }
        }
    }
    Some(det)
}

/// Exact roots when every distinct root is rational.
fn rational_roots(poly: &IntPolynomial, approx: &[(CFloat, usize)]) -> Option<Vec<(BigRational, usize)>> {
    let lead = poly.leading().abs();
    if lead > BigInt::from(RATIONAL_GUARD) {
        return None;
    }
    let lead = lead.to_u64()?;
    let divisors: Vec<u64> = (1..=lead).take_while(|q| q * q <= lead).filter(|q| lead % q == 0).collect();
    let divisors: Vec<u64> = divisors.iter().copied().chain(divisors.iter().map(|q| lead / q)).collect();
    let rat = poly.to_rat_poly();
    approx
        .iter()
        .map(|(z, mu)| {
            let zc = z.to_c64();
            if zc.im.abs() > 1e-6 * zc.re.abs().max(1.0) {
                return None;
            }
            divisors.iter().find_map(|&q| {
                let num = (zc.re * q as f64).round();
                if !num.is_finite() {
                    return None;
                }
                let cand = BigRational::new(BigInt::from(num as i64), BigInt::from(q));
                eval_rat(&rat, &cand).is_zero().then_some((cand, *mu))
            })
        })
        .collect()
}

fn eval_rat(p: &RatPoly, x: &BigRational) -> BigRational {
    p.coeffs().iter().rev().fold(BigRational::zero(), |acc, c| acc * x + c)
}
