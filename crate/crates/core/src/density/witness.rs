//! Two-stage construction of a point of `Q(A)` near a target.

use serde::Serialize;

use super::{band_rows_f64, factor_real, RealFactorization};
use crate::error::{Error, Result};
use crate::poly_core::IntPolynomial;

const RESIDUAL_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DensityWitness {
    pub target: Vec<f64>,
    /// Perturbation with `target + w` in `Q(A)`.
    pub w: Vec<f64>,
    /// Integer vector `[A]_l (target + w)`, recovered by rounding.
    pub k: Vec<i64>,
    /// `||[A]_l (target + w) - k||_inf` in floating point.
    pub residual: f64,
    /// Constructive epsilon of the orientation used; `||w||_inf <= eps_used / 2`.
    pub eps_used: f64,
    /// Whether the construction ran on the conjugate polynomial.
    pub conjugate: bool,
}

fn frac(x: f64) -> f64 {
    let f = x - x.floor();
    if f >= 1.0 {
        0.0
    } else {
        f
    }
}

/// `w` with `||w||_inf <= f.epsilon / 2` and `[A]_l (target + w)` integral.
fn construct(a: &IntPolynomial, f: &RealFactorization, target: &[f64]) -> Vec<f64> {
    let m = target.len();
    let ell = m - a.degree();
    let (b, c) = (&f.b, &f.c);
    let (s, t) = (b.len() - 1, c.len() - 1);
    let rows = band_rows_f64(a, ell);
    let v: Vec<f64> = rows
        .iter()
        .map(|r| frac(-r.iter().zip(target).map(|(x, y)| x * y).sum::<f64>()))
        .collect();
    // B stage, back substitution on [B]_l; the last s coordinates stay 0
    let mut wp = vec![0.0; ell + s];
    for i in (0..ell).rev() {
        let tail: f64 = (1..=s).map(|j| b[j] * wp[i + j]).sum::<f64>() - v[i];
        wp[i] = (tail.round() - tail) / b[0];
    }
    // C stage, forward substitution on {C}_m with z = (0_t, w')
    let mut w = vec![0.0; m];
    for i in 0..m {
        let z = if i < t { 0.0 } else { wp[i - t] };
        let acc: f64 = (1..=t.min(i)).map(|k| c[t - k] * w[i - k]).sum();
        w[i] = z - acc;
    }
    w
}

pub fn witness(a: &IntPolynomial, m: usize, target: &[f64], eps: f64) -> Result<DensityWitness> {
    a.require_nonzero_constant()?;
    let d = a.degree();
    if m <= d {
        return Err(Error::InvalidArgument(format!("m = {m} must exceed the degree {d}")));
    }
    if target.len() != m {
        return Err(Error::DegreeMismatch(format!("target has length {}, expected {m}", target.len())));
    }
    if target.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument("target entries must be finite".into()));
    }
    let conj = a.conjugate()?;
    let fa = factor_real(a)?;
    let fc = factor_real(&conj)?;
    let use_conj = fc.epsilon < fa.epsilon;
    let required = fa.epsilon.min(fc.epsilon);
    if !(eps >= required * (1.0 - 1e-12)) {
        return Err(Error::EpsilonTooSmall { requested: eps, required });
    }
    let w = if use_conj {
        let rev: Vec<f64> = target.iter().rev().copied().collect();
        let mut w = construct(&conj, &fc, &rev);
        w.reverse();
        w
    } else {
        construct(a, &fa, target)
    };
    let rows = band_rows_f64(a, m - d);
    let image: Vec<f64> = rows
        .iter()
        .map(|r| r.iter().zip(target.iter().zip(&w)).map(|(x, (t, u))| x * (t + u)).sum())
        .collect();
    let k: Vec<i64> = image.iter().map(|x| x.round() as i64).collect();
    let residual = image.iter().zip(&k).map(|(x, &k)| (x - k as f64).abs()).fold(0.0, f64::max);
    if !(residual <= RESIDUAL_TOL) {
        return Err(Error::Numeric(format!("witness residual {residual:e} exceeds {RESIDUAL_TOL:e}")));
    }
    Ok(DensityWitness { target: target.to_vec(), w, k, residual, eps_used: required, conjugate: use_conj })
}
