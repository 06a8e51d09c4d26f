//! Density bounds for `Q(A) = {v : [A]_l v in Z^l}` on the torus, explicit
//! witnesses, a grid explorer for the critical epsilon and volume-based
//! non-density certificates.
//!
//! The cube is `I_eps = [-eps/2, eps/2]^m`, centred at the origin.

mod covering;
mod nondensity;
mod witness;

use num_complex::Complex64;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::Result;
use crate::poly_core::{mahler_from_roots, root_radius_target, roots, ComplexRootSet, IntPolynomial, RootEnclosure};

pub use covering::{critical_epsilon, is_covered, is_covered_exact, CriticalEpsilonEstimate, CriticalOptions, COVER_SLACK};
pub use nondensity::{certify_non_density, NonDensityCertificate};
pub use witness::{witness, DensityWitness};

const SLACK: f64 = 1e-15;

/// Closed interval `[lo, hi]` certified to contain a real quantity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Enclosure {
    pub lo: f64,
    pub hi: f64,
}

impl Enclosure {
    pub fn value(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn error(&self) -> f64 {
        0.5 * (self.hi - self.lo) * (1.0 + 1e-15)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    fn recip((lo, hi): (f64, f64)) -> Self {
        Enclosure { lo: (1.0 / hi) * (1.0 - SLACK), hi: (1.0 / lo) * (1.0 + SLACK) }
    }

    fn scale(self, s: f64) -> Self {
        Enclosure { lo: self.lo * s * (1.0 - SLACK), hi: self.hi * s * (1.0 + SLACK) }
    }

    fn min(self, o: Self) -> Self {
        Enclosure { lo: self.lo.min(o.lo), hi: self.hi.min(o.hi) }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DensityBound {
    /// `1 / M(A(x/2))`.
    pub eps_half_scaled: Enclosure,
    /// `2^d / M(A(2x))`.
    pub eps_double_scaled: Enclosure,
    /// Minimum of the two scaled bounds.
    pub eps_stated: Enclosure,
    /// `(|a_d| prod max{|alpha_i|, 1 - |alpha_i|})^{-1}`, the better of `A`
    /// and its conjugate.
    pub eps_refined: Enclosure,
    /// `2^{floor(d/2)} / M(A)`.
    pub eps_coarse: Enclosure,
}

fn refined_product(lead: &num_bigint::BigInt, roots: &[RootEnclosure]) -> (f64, f64) {
    let g = |t: f64| t.max(1.0 - t);
    let l = lead.abs().to_f64().unwrap_or(f64::INFINITY);
    let (mut lo, mut hi) = (l * (1.0 - SLACK), l * (1.0 + SLACK));
    for r in roots {
        let a = r.value.norm();
        let (alo, ahi) = (((a - r.radius) * (1.0 - SLACK)).max(0.0), (a + r.radius) * (1.0 + SLACK));
        let flo = if alo <= 0.5 && 0.5 <= ahi { 0.5 } else { g(alo).min(g(ahi)) };
        let fhi = g(alo).max(g(ahi));
        for _ in 0..r.multiplicity {
            lo *= flo * (1.0 - SLACK);
            hi *= fhi * (1.0 + SLACK);
        }
    }
    (lo, hi)
}

fn certified_roots(a: &IntPolynomial) -> Result<ComplexRootSet> {
    roots(a, root_radius_target(a))
}

pub fn epsilon_bound(a: &IntPolynomial) -> Result<DensityBound> {
    a.require_nonzero_constant()?;
    a.require_primitive()?;
    let conj = a.conjugate()?;
    let ra = certified_roots(a)?;
    let rc = certified_roots(&conj)?;
    let plain = mahler_from_roots(&ra.leading, &ra.roots, 1.0);
    let half = Enclosure::recip(mahler_from_roots(&ra.leading, &ra.roots, 0.5));
    let double = Enclosure::recip(mahler_from_roots(&rc.leading, &rc.roots, 0.5));
    let refined = Enclosure::recip(refined_product(&ra.leading, &ra.roots))
        .min(Enclosure::recip(refined_product(&rc.leading, &rc.roots)));
    let coarse = Enclosure::recip(plain).scale(2f64.powi((a.degree() / 2) as i32));
    Ok(DensityBound {
        eps_half_scaled: half,
        eps_double_scaled: double,
        eps_stated: half.min(double),
        eps_refined: refined,
        eps_coarse: coarse,
    })
}

/// `A = B C` over the reals, with `C` monic collecting the roots of modulus
/// at most 1/2.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RealFactorization {
    /// Ascending coefficients of `B = a_d prod (x - beta_i)`.
    pub b: Vec<f64>,
    /// Ascending coefficients of the monic `C = prod (x - gamma_i)`.
    pub c: Vec<f64>,
    #[serde(skip)]
    pub gamma: Vec<Complex64>,
    #[serde(skip)]
    pub beta: Vec<Complex64>,
    /// `1 / |b_0|`.
    pub delta: f64,
    /// `delta prod 1 / (1 - |gamma_i|)`.
    pub epsilon: f64,
}

fn real_poly(lead: f64, roots: &[Complex64]) -> Vec<f64> {
    let mut c = vec![Complex64::new(lead, 0.0)];
    for &r in roots {
        let mut next = vec![Complex64::zero(); c.len() + 1];
        for (i, ci) in c.iter().enumerate() {
            next[i + 1] += ci;
            next[i] -= ci * r;
        }
        c = next;
    }
    c.into_iter().map(|z| z.re).collect()
}

fn expand(roots: &[&RootEnclosure]) -> Vec<Complex64> {
    roots.iter().flat_map(|r| std::iter::repeat_n(r.value, r.multiplicity)).collect()
}

/// Roots whose enclosure lies inside `|z| <= 1/2` go to `C`; everything
/// else, including enclosures straddling the circle, goes to `B`.
pub fn factor_real(a: &IntPolynomial) -> Result<RealFactorization> {
    a.require_nonzero_constant()?;
    let set = certified_roots(a)?;
    let (small, large): (Vec<_>, Vec<_>) = set.roots.iter().partition(|r| r.value.norm() + r.radius <= 0.5);
    let gamma = expand(&small);
    let beta = expand(&large);
    let lead = a.leading().to_f64().unwrap_or(f64::NAN);
    let b = real_poly(lead, &beta);
    let c = real_poly(1.0, &gamma);
    let delta = 1.0 / b[0].abs();
    let epsilon = gamma.iter().fold(delta, |e, g| e / (1.0 - g.norm()));
    Ok(RealFactorization { b, c, gamma, beta, delta, epsilon })
}

/// Coefficients of `[A]_l` as `f64` rows.
pub(crate) fn band_rows_f64(a: &IntPolynomial, ell: usize) -> Vec<Vec<f64>> {
    let c = a.to_f64_coeffs();
    let m = ell + a.degree();
    (0..ell)
        .map(|i| {
            let mut row = vec![0.0; m];
            row[i..i + c.len()].copy_from_slice(&c);
            row
        })
        .collect()
}
