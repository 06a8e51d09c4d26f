//! Certified Mahler measures from root enclosures.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use serde::Serialize;

use super::{roots, IntPolynomial, RootEnclosure};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MahlerVariant {
    /// `M(A) = |a_d| prod max{1, |alpha_i|}`.
    Plain,
    /// `M(A(x/2)) = |a_d| prod max{1/2, |alpha_i|}`.
    HalfScaled,
    /// `2^{-d} M(A(2x))`, evaluated as the half-scaled measure of the conjugate.
    DoubleScaled,
    /// `M` of the conjugate polynomial; equal to `Plain` in exact arithmetic.
    Conjugate,
}

impl std::str::FromStr for MahlerVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plain" => Ok(MahlerVariant::Plain),
            "half_scaled" | "half-scaled" => Ok(MahlerVariant::HalfScaled),
            "double_scaled" | "double-scaled" => Ok(MahlerVariant::DoubleScaled),
            "conjugate" => Ok(MahlerVariant::Conjugate),
            _ => Err(Error::InvalidArgument(format!("unknown Mahler variant {s:?}"))),
        }
    }
}

/// Midpoint and half-width of a certified enclosure.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MahlerMeasure {
    pub value: f64,
    pub error: f64,
    pub variant: MahlerVariant,
}

impl MahlerMeasure {
    pub fn lo(&self) -> f64 {
        self.value - self.error
    }

    pub fn hi(&self) -> f64 {
        self.value + self.error
    }

    fn from_interval(lo: f64, hi: f64, variant: MahlerVariant) -> Self {
        let value = 0.5 * (lo + hi);
        let error = (hi - value).max(value - lo) * (1.0 + 1e-15);
        MahlerMeasure { value, error, variant }
    }
}

const SLACK: f64 = 1e-15;

/// Interval enclosure `[lo, hi]` of `|lead| prod max{floor, |alpha_i|}^{mu_i}`.
pub fn mahler_from_roots(lead: &BigInt, roots: &[RootEnclosure], floor: f64) -> (f64, f64) {
    let l = lead.abs().to_f64().unwrap_or(f64::INFINITY);
    let mut lo = l * (1.0 - SLACK);
    let mut hi = l * (1.0 + SLACK);
    for r in roots {
        let a = r.value.norm();
        let f_lo = floor.max((a - r.radius) * (1.0 - SLACK));
        let f_hi = floor.max((a + r.radius) * (1.0 + SLACK));
        for _ in 0..r.multiplicity {
            lo *= f_lo * (1.0 - SLACK);
            hi *= f_hi * (1.0 + SLACK);
        }
    }
    (lo, hi)
}

pub(crate) fn root_radius_target(a: &IntPolynomial) -> f64 {
    let c = a.to_f64_coeffs();
    let lead = c[c.len() - 1].abs();
    let cauchy = 1.0 + c[..c.len() - 1].iter().map(|x| x.abs() / lead).fold(0.0, f64::max);
    1e-13 / cauchy.max(1.0)
}

fn measure_with_floor(a: &IntPolynomial, floor: f64, variant: MahlerVariant) -> Result<MahlerMeasure> {
    let set = roots(a, root_radius_target(a))?;
    let (lo, hi) = mahler_from_roots(&set.leading, &set.roots, floor);
    Ok(MahlerMeasure::from_interval(lo, hi, variant))
}

pub fn mahler_measure(a: &IntPolynomial, variant: MahlerVariant) -> Result<MahlerMeasure> {
    a.require_nonzero_constant()?;
    if a.degree() == 0 {
        return Err(Error::InvalidArgument("Mahler measure needs degree at least 1".into()));
    }
    match variant {
        MahlerVariant::Plain => measure_with_floor(a, 1.0, variant),
        MahlerVariant::HalfScaled => measure_with_floor(a, 0.5, variant),
        MahlerVariant::DoubleScaled => measure_with_floor(&a.conjugate()?, 0.5, variant),
        MahlerVariant::Conjugate => measure_with_floor(&a.conjugate()?, 1.0, variant),
    }
}
