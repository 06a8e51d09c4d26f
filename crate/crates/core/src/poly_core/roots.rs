//! Simultaneous (Aberth-Ehrlich) root refinement with a posteriori
//! inclusion discs.
//!
//! The input is split into square-free factors first, so every factor has
//! simple roots and multiplicities are exact. Each factor is solved in
//! `f64`, refined in [`CFloat`] arithmetic, and certified with the
//! Weierstrass-correction discs `D(z_i, n |W_i|)`,
//! `W_i = f(z_i) / (lc(f) prod_{j != i} (z_i - z_j))`: when the discs are
//! pairwise disjoint each holds exactly one root. The residual `f(z_i)` and
//! the products are evaluated exactly, so the radii are rigorous up to the
//! final conversion to `f64`, which is rounded outward.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{Signed, ToPrimitive, Zero};

use super::IntPolynomial;
use crate::error::{Error, Result};
use crate::mp::{CFloat, Float};

pub(crate) const DEFAULT_START_BITS: u32 = 128;
const DEFAULT_MAX_BITS: u32 = 4096;
const MP_ITERATIONS: usize = 200;

/// Working-precision schedule for [`roots_with`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RootOptions {
    pub start_bits: u32,
    pub max_bits: u32,
}

impl Default for RootOptions {
    /// `KRONREC_PRECISION` (bits) overrides the starting precision.
    fn default() -> Self {
        let start = std::env::var("KRONREC_PRECISION")
            .ok()
            .and_then(|s| s.trim().parse::<u32>().ok())
            .map(|b| b.max(64))
            .unwrap_or(DEFAULT_START_BITS);
        RootOptions { start_bits: start, max_bits: DEFAULT_MAX_BITS.max(start) }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RootEnclosure {
    pub value: Complex64,
    pub multiplicity: usize,
    /// The root lies in the closed disc of this radius around `value`.
    pub radius: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComplexRootSet {
    pub leading: BigInt,
    pub roots: Vec<RootEnclosure>,
    /// Precision at which the enclosures were certified.
    pub precision_bits: u32,
}

impl ComplexRootSet {
    pub fn degree(&self) -> usize {
        self.roots.iter().map(|r| r.multiplicity).sum()
    }

    fn expanded(&self) -> impl Iterator<Item = &RootEnclosure> {
        self.roots.iter().flat_map(|r| std::iter::repeat_n(r, r.multiplicity))
    }

    /// Ascending coefficients of `a_d prod (x - alpha_i)` from the centres.
    pub fn reconstruct(&self) -> Vec<Complex64> {
        let mut c = vec![Complex64::new(1.0, 0.0)];
        for r in self.expanded() {
            let mut next = vec![Complex64::zero(); c.len() + 1];
            for (i, ci) in c.iter().enumerate() {
                next[i + 1] += ci;
                next[i] -= ci * r.value;
            }
            c = next;
        }
        let lead = self.leading.to_f64().unwrap_or(f64::NAN);
        c.into_iter().map(|x| x * lead).collect()
    }

    /// Per-coefficient bound on `|reconstruct()[i] - a_i|`, propagated from
    /// the enclosure radii plus floating-point slack.
    pub fn reconstruction_bound(&self) -> Vec<f64> {
        let n = self.degree();
        let esym = |shift: bool| {
            let mut e = vec![1.0f64];
            for r in self.expanded() {
                let x = r.value.norm() + if shift { r.radius } else { 0.0 };
                let mut next = vec![0.0; e.len() + 1];
                for (k, ek) in e.iter().enumerate() {
                    next[k] += ek;
                    next[k + 1] += ek * x;
                }
                e = next;
            }
            e
        };
        let (hi, mid) = (esym(true), esym(false));
        let lead = self.leading.abs().to_f64().unwrap_or(f64::INFINITY);
        (0..=n)
            .map(|i| {
                let k = n - i;
                lead * ((hi[k] - mid[k]) + 1e-14 * (n as f64 + 1.0) * hi[k])
            })
            .collect()
    }
}

/// Certified roots with every enclosure radius at most `target_radius`.
pub fn roots(a: &IntPolynomial, target_radius: f64) -> Result<ComplexRootSet> {
    roots_with(a, target_radius, RootOptions::default())
}

struct Factor {
    coeffs: Vec<Float>,
    lead: Float,
    multiplicity: usize,
    z: Vec<CFloat>,
}

impl Factor {
    fn new(f: &IntPolynomial, multiplicity: usize) -> Self {
        let z = aberth_f64(&f.to_f64_coeffs()).into_iter().map(CFloat::from_c64).collect();
        Factor {
            coeffs: f.coeffs().iter().cloned().map(Float::from_bigint).collect(),
            lead: Float::from_bigint(f.leading().clone()),
            multiplicity,
            z,
        }
    }
}

fn factors_of(a: &IntPolynomial) -> Result<Vec<Factor>> {
    if a.degree() == 0 {
        return Err(Error::InvalidArgument("a constant polynomial has no roots".into()));
    }
    Ok(a.to_rat_poly().square_free()?.iter().map(|(f, k)| Factor::new(f, *k)).collect())
}

pub fn roots_with(a: &IntPolynomial, target_radius: f64, opts: RootOptions) -> Result<ComplexRootSet> {
    if !(target_radius > 0.0) {
        return Err(Error::InvalidArgument(format!("target radius must be positive, got {target_radius}")));
    }
    let mut factors = factors_of(a)?;
    let mut prec = opts.start_bits.max(64);
    loop {
        let mut encl = Vec::with_capacity(a.degree());
        let mut ok = true;
        for f in &mut factors {
            aberth_mp(&f.coeffs, &mut f.z, prec);
            match inclusion_radii(f) {
                Some(v) => encl.extend(v),
                None => ok = false,
            }
        }
        if ok {
            ok = pair_conjugates(&mut encl) && separated(&encl);
        }
        if ok && encl.iter().all(|r| r.radius <= target_radius) {
            return Ok(ComplexRootSet { leading: a.leading().clone(), roots: encl, precision_bits: prec });
        }
        if prec >= opts.max_bits {
            return Err(Error::PrecisionExhausted { bits: prec });
        }
        prec = (prec * 2).min(opts.max_bits);
    }
}

/// Distinct roots refined to `prec` bits with their multiplicities. Not
/// certified; callers compare results across precisions instead.
pub(crate) fn refined_distinct_roots(a: &IntPolynomial, prec: u32) -> Result<Vec<(CFloat, usize)>> {
    let mut out = Vec::new();
    for mut f in factors_of(a)? {
        if !aberth_mp(&f.coeffs, &mut f.z, prec) {
            return Err(Error::Numeric(format!("root refinement did not converge at {prec} bits")));
        }
        out.extend(f.z.into_iter().map(|z| (z, f.multiplicity)));
    }
    Ok(out)
}

fn horner_c64(c: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::zero();
    let mut dp = Complex64::zero();
    for &a in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

fn aberth_f64(c: &[f64]) -> Vec<Complex64> {
    let n = c.len() - 1;
    if n == 1 {
        return vec![Complex64::new(-c[0] / c[1], 0.0)];
    }
    let lead = c[n];
    let centre = -c[n - 1] / (n as f64 * lead);
    let radius = (0..n)
        .filter(|&k| c[k] != 0.0)
        .map(|k| (c[k] / lead).abs().powf(1.0 / (n - k) as f64))
        .fold(0.0f64, f64::max)
        .max(1e-3);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let t = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4;
            Complex64::new(centre, 0.0) + Complex64::from_polar(radius, t)
        })
        .collect();
    let mut quiet = 0;
    for _ in 0..2000 {
        let mut worst = 0.0f64;
        for i in 0..n {
            let (p, dp) = horner_c64(c, z[i]);
            if p == Complex64::zero() {
                continue;
            }
            let ratio = p / dp;
            let s: Complex64 = (0..n).filter(|&j| j != i).map(|j| 1.0 / (z[i] - z[j])).sum();
            let denom = Complex64::new(1.0, 0.0) - ratio * s;
            let w = if denom.norm() == 0.0 { ratio } else { ratio / denom };
            if w.is_finite() {
                z[i] -= w;
                worst = worst.max(w.norm() / z[i].norm().max(1.0));
            }
        }
        if worst < 1e-15 {
            quiet += 1;
            if quiet > 2 {
                break;
            }
        }
    }
    z
}

fn horner_mp(coeffs: &[Float], z: &CFloat, prec: u32) -> (CFloat, CFloat) {
    let mut p = CFloat::zero();
    let mut dp = CFloat::zero();
    for a in coeffs.iter().rev() {
        dp = dp.mul(z).add(&p).round(prec);
        p = p.mul(z).add(&CFloat::real(a.clone())).round(prec);
    }
    (p, dp)
}

fn eval_exact(coeffs: &[Float], z: &CFloat) -> CFloat {
    let mut p = CFloat::zero();
    for a in coeffs.iter().rev() {
        p = p.mul(z).add(&CFloat::real(a.clone()));
    }
    p
}

/// Aberth iterations at `prec` bits until corrections fall below the
/// working precision. Returns whether that happened.
fn aberth_mp(coeffs: &[Float], z: &mut [CFloat], prec: u32) -> bool {
    let n = z.len();
    let wp = prec + 16;
    let one = CFloat::real(Float::from_i64(1));
    for _ in 0..MP_ITERATIONS {
        let mut converged = true;
        for i in 0..n {
            let (p, dp) = horner_mp(coeffs, &z[i], wp);
            if p.is_zero() {
                continue;
            }
            if dp.is_zero() {
                z[i] = z[i].add(&CFloat::real(Float::from_i64(1).mul_pow2(-(prec as i64) / 2)));
                converged = false;
                continue;
            }
            let ratio = p.div(&dp, wp);
            let mut s = CFloat::zero();
            let mut clash = false;
            for j in 0..n {
                if j == i {
                    continue;
                }
                let diff = z[i].sub(&z[j]);
                if diff.is_zero() {
                    clash = true;
                    break;
                }
                s = s.add(&one.div(&diff, wp));
            }
            if clash {
                let nudge = Float::from_i64(1).mul_pow2(z[i].magnitude().max(0) - (prec as i64) / 2);
                z[i] = z[i].add(&CFloat::new(nudge.clone(), nudge));
                converged = false;
                continue;
            }
            let denom = one.sub(&ratio.mul(&s).round(wp));
            let w = if denom.is_zero() { ratio } else { ratio.div(&denom, wp) };
            z[i] = z[i].sub(&w).round(prec);
            let scale = z[i].magnitude().max(0);
            if w.magnitude() > scale.saturating_sub(prec as i64 - 12) {
                converged = false;
            }
        }
        if converged {
            return true;
        }
    }
    false
}

/// Inclusion discs for the current approximations of one factor, with
/// centres rounded to `f64` and the rounding folded into the radius.
fn inclusion_radii(f: &Factor) -> Option<Vec<RootEnclosure>> {
    let n = f.z.len();
    let n2 = Float::from_i64((n * n) as i64);
    let lead2 = f.lead.mul(&f.lead);
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let pz = eval_exact(&f.coeffs, &f.z[i]);
        let num = pz.norm_sqr().mul(&n2);
        let mut den = lead2.clone();
        for j in 0..n {
            if j != i {
                den = den.mul(&f.z[i].sub(&f.z[j]).norm_sqr());
            }
        }
        if den.is_zero() {
            return None;
        }
        let r_incl = if num.is_zero() {
            0.0
        } else {
            let mut r2 = num.div(&den, 64).to_f64();
            if r2 == 0.0 {
                r2 = f64::MIN_POSITIVE;
            }
            r2.sqrt() * (1.0 + 1e-12)
        };
        let c = f.z[i].to_c64();
        let centre_err = Float::from_f64(c.re).sub(&f.z[i].re).abs().to_f64()
            + Float::from_f64(c.im).sub(&f.z[i].im).abs().to_f64();
        let radius = (r_incl + centre_err * (1.0 + 1e-12)) * (1.0 + 1e-15);
        if !radius.is_finite() {
            return None;
        }
        out.push(RootEnclosure { value: c, multiplicity: f.multiplicity, radius });
    }
    Some(out)
}

/// Snaps discs meeting the real axis onto it and makes non-real discs come
/// in exact conjugate pairs. Valid once discs are isolated, which the
/// caller re-checks afterwards.
fn pair_conjugates(encl: &mut [RootEnclosure]) -> bool {
    for r in encl.iter_mut() {
        if r.value.im.abs() <= r.radius {
            r.radius = (r.radius + r.value.im.abs()) * (1.0 + 1e-15);
            r.value.im = 0.0;
        }
    }
    let n = encl.len();
    for i in 0..n {
        if encl[i].value.im <= 0.0 {
            continue;
        }
        let target = encl[i].value.conj();
        let hits: Vec<usize> = (0..n)
            .filter(|&j| j != i && (encl[j].value - target).norm() <= (encl[j].radius + encl[i].radius) * (1.0 + 1e-12))
            .collect();
        if hits.len() != 1 || encl[hits[0]].multiplicity != encl[i].multiplicity {
            return false;
        }
        let j = hits[0];
        encl[j].value = target;
        encl[j].radius = encl[i].radius;
    }
    true
}

fn separated(encl: &[RootEnclosure]) -> bool {
    for i in 0..encl.len() {
        for j in i + 1..encl.len() {
            let dist = (encl[i].value - encl[j].value).norm();
            if dist * (1.0 - 1e-12) <= encl[i].radius + encl[j].radius {
                return false;
            }
        }
    }
    true
}
