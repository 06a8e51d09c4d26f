//! Covering tests `(v + [A]_l I_eps) cap Z^l != {}` and the grid explorer
//! for the smallest covering epsilon.
//!
//! For a point `g` of the l-torus let `e(g) = 2 min_k min { ||w||_inf :
//! [A]_l w = g + k }`. The critical epsilon is the supremum of `e` over the
//! torus. On a grid of side `1/n` the maximum of `e` is a lower bound; each
//! torus point is within `h = 1/(2n)` of a grid point, and `e` grows by at
//! most `2 max { min ||w||_inf : [A]_l w = delta }` over `delta` in
//! `[-h, h]^l`, a convex function maximised at the box vertices.

use itertools::Itertools;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use super::{band_rows_f64, epsilon_bound};
use crate::error::{Error, Result};
use crate::lp::{box_feasible, min_sup_norm};
use crate::mp::Float;
use crate::poly_core::IntPolynomial;

fn exact(x: f64) -> BigRational {
    Float::from_f64(x).to_rational()
}

fn band_rows_rat(a: &IntPolynomial, ell: usize) -> Vec<Vec<BigRational>> {
    let m = ell + a.degree();
    (0..ell)
        .map(|i| {
            let mut row = vec![BigRational::zero(); m];
            for (j, c) in a.coeffs().iter().enumerate() {
                row[i + j] = BigRational::from_integer(c.clone());
            }
            row
        })
        .collect()
}

/// Integer ranges for each `k_i` with `|v_i + k_i| <= radius`.
fn k_ranges(v: &[f64], radius: f64) -> Vec<std::ops::RangeInclusive<i64>> {
    v.iter()
        .map(|&vi| ((-vi - radius).ceil() as i64)..=((-vi + radius).floor() as i64))
        .collect()
}

/// Relative widening of the cube in [`is_covered`], so that decimal inputs
/// such as `1/3` rounded to `f64` still test the intended boundary.
pub const COVER_SLACK: f64 = 1e-12;

/// Whether some `w` in `[-eps/2, eps/2]^m`, widened by [`COVER_SLACK`], has
/// `[A]_l w - v` integral.
pub fn is_covered(a: &IntPolynomial, m: usize, eps: f64, v: &[f64]) -> Result<bool> {
    if !(eps >= 0.0) || !eps.is_finite() || v.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument("eps and v must be finite, eps >= 0".into()));
    }
    let eps_q = exact(eps) * exact(1.0 + COVER_SLACK);
    let v_q: Vec<BigRational> = v.iter().map(|&x| exact(x)).collect();
    is_covered_exact(a, m, &eps_q, &v_q)
}

/// Exact covering test with rational inputs. Decided with one feasibility
/// problem per candidate `k` in the box `||v + k||_inf <= (eps/2) sum |a_i|`.
pub fn is_covered_exact(a: &IntPolynomial, m: usize, eps: &BigRational, v: &[BigRational]) -> Result<bool> {
    a.require_nonzero_constant()?;
    let d = a.degree();
    if m <= d {
        return Err(Error::InvalidArgument(format!("m = {m} must exceed the degree {d}")));
    }
    let ell = m - d;
    if v.len() != ell {
        return Err(Error::DegreeMismatch(format!("v has length {}, expected {ell}", v.len())));
    }
    if eps.is_negative() {
        return Err(Error::InvalidArgument("eps must be nonnegative".into()));
    }
    let half = eps / BigInt::from(2);
    let radius = &half * BigRational::from_integer(a.l1_norm());
    let rows = band_rows_rat(a, ell);
    let v_f: Vec<f64> = v.iter().map(|x| x.to_f64().unwrap_or(0.0)).collect();
    let r_f = radius.to_f64().unwrap_or(f64::INFINITY) + 1.0;
    let mut candidates: Vec<Vec<i64>> = k_ranges(&v_f, r_f)
        .into_iter()
        .multi_cartesian_product()
        .filter(|k| k.iter().zip(v).all(|(&ki, vi)| (vi + BigInt::from(ki)).abs() <= radius))
        .collect();
    candidates.sort_by(|x, y| {
        let key = |k: &Vec<i64>| k.iter().zip(&v_f).map(|(&ki, vi)| (ki as f64 + vi).abs()).fold(0.0, f64::max);
        key(x).total_cmp(&key(y))
    });
    Ok(candidates.iter().any(|k| {
        let rhs: Vec<BigRational> = v.iter().zip(k).map(|(vi, &ki)| vi + BigInt::from(ki)).collect();
        box_feasible(&rows, &rhs, &half)
    }))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CriticalOptions {
    /// Grid side is `1 / grid_n`; even values include the point `1/2`.
    pub grid_n: usize,
    /// Allow `l = m - d > 4` or more than `MAX_GRID_POINTS` grid points.
    pub allow_large: bool,
}

impl Default for CriticalOptions {
    fn default() -> Self {
        CriticalOptions { grid_n: 12, allow_large: false }
    }
}

const MAX_ELL: usize = 4;
const MAX_GRID_POINTS: usize = 100_000;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriticalEpsilonEstimate {
    pub m: usize,
    /// Exact optimum at the worst grid point, rounded down: below it that
    /// point is not covered.
    pub lower: f64,
    /// Every torus point is covered for eps above this value.
    pub upper: f64,
    pub grid_resolution: usize,
    pub grid_points: usize,
    /// Grid point attaining `lower`, coordinates in `[0, 1)`.
    pub argmax: Vec<f64>,
    /// Lipschitz margin added to the grid maximum.
    pub margin: f64,
    /// The refined bound capping `upper`.
    pub cap: f64,
    pub method: String,
}

/// `min_k min ||w||_inf` over candidate `k`, pruned by the row bound
/// `||w||_inf >= |g_i + k_i| / sum |a_j|`.
fn best_over_k<T, F>(g: &[f64], radius: f64, l1: f64, mut solve: F) -> Option<(T, Vec<i64>)>
where
    T: PartialOrd + Clone + ToPrimitive,
    F: FnMut(&[i64]) -> Option<T>,
{
    let mut cands: Vec<(f64, Vec<i64>)> = k_ranges(g, radius)
        .into_iter()
        .multi_cartesian_product()
        .map(|k| {
            let lb = k.iter().zip(g).map(|(&ki, gi)| (ki as f64 + gi).abs()).fold(0.0, f64::max) / l1;
            (lb, k)
        })
        .collect();
    cands.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut best: Option<(T, Vec<i64>)> = None;
    for (lb, k) in cands {
        if let Some((b, _)) = &best {
            if lb > b.to_f64().unwrap_or(f64::INFINITY) * (1.0 + 1e-9) + 1e-12 {
                break;
            }
        }
        if let Some(v) = solve(&k) {
            if best.as_ref().is_none_or(|(b, _)| v < *b) {
                best = Some((v, k));
            }
        }
    }
    best
}

pub fn critical_epsilon(a: &IntPolynomial, m: usize, opts: CriticalOptions) -> Result<CriticalEpsilonEstimate> {
    a.require_nonzero_constant()?;
    let d = a.degree();
    if m <= d {
        return Err(Error::InvalidArgument(format!("m = {m} must exceed the degree {d}")));
    }
    if opts.grid_n == 0 {
        return Err(Error::InvalidArgument("grid_n must be positive".into()));
    }
    let ell = m - d;
    let n = opts.grid_n;
    let points = n.checked_pow(ell as u32).unwrap_or(usize::MAX);
    if !opts.allow_large && (ell > MAX_ELL || points > MAX_GRID_POINTS) {
        return Err(Error::InvalidArgument(format!(
            "grid search over l = {ell} dimensions with {n}^{ell} points exceeds the default guard (l <= {MAX_ELL}, \
             <= {MAX_GRID_POINTS} points); pass the override to run anyway"
        )));
    }
    let cap = epsilon_bound(a)?.eps_refined.hi;
    let l1 = a.l1_norm().to_f64().unwrap_or(f64::INFINITY);
    let radius = cap * (1.0 + 1e-9) / 2.0 * l1 + 1e-9;
    let rows = band_rows_f64(a, ell);

    let grid: Vec<Vec<f64>> = (0..ell).map(|_| (0..n).map(|j| j as f64 / n as f64)).multi_cartesian_product().collect();
    let values: Vec<(f64, usize)> = grid
        .par_iter()
        .enumerate()
        .map(|(idx, g)| {
            let best = best_over_k(g, radius, l1, |k| {
                let rhs: Vec<f64> = g.iter().zip(k).map(|(gi, &ki)| gi + ki as f64).collect();
                min_sup_norm(&rows, &rhs).map(|(t, _)| t)
            });
            best.map(|(t, _)| (2.0 * t, idx)).ok_or(idx)
        })
        .collect::<std::result::Result<_, usize>>()
        .map_err(|idx| Error::Numeric(format!("no feasible lift found at grid point {:?}", grid[idx])))?;
    let (grid_max, arg) = values.iter().copied().fold((f64::NEG_INFINITY, 0), |b, x| if x.0 > b.0 { x } else { b });
    let g_star = &grid[arg];

    // exact value at the worst point
    let rows_q = band_rows_rat(a, ell);
    let g_q: Vec<BigRational> = g_star.iter().map(|&x| exact(x)).collect();
    let (tau, _) = best_over_k(g_star, radius, l1, |k| {
        let rhs: Vec<BigRational> = g_q.iter().zip(k).map(|(gi, &ki)| gi + BigInt::from(ki)).collect();
        min_sup_norm(&rows_q, &rhs).map(|(t, _)| t)
    })
    .ok_or_else(|| Error::Numeric("exact optimisation failed at the worst grid point".into()))?;
    let exact_lower = tau * BigRational::from_integer(BigInt::from(2));
    let mut lower = exact_lower.to_f64().unwrap_or(0.0);
    if exact(lower) > exact_lower {
        lower = lower.next_down();
    }

    let h = 1.0 / (2.0 * n as f64);
    let mut phi: f64 = 0.0;
    for signs in (0..ell).map(|_| [-h, h]).multi_cartesian_product() {
        let (t, _) = min_sup_norm(&rows, &signs)
            .ok_or_else(|| Error::Numeric("band matrix image is not full rank".into()))?;
        phi = phi.max(t);
    }
    let margin = 2.0 * phi * (1.0 + 1e-9) + 1e-12;
    let upper = (grid_max.max(lower) + margin + 1e-9).min(cap).max(lower);
    let method = format!(
        "grid of side 1/{n} over the {ell}-torus; lower is the exact minimal covering epsilon at the worst grid \
         point; upper adds the vertex-maximised margin 2 max_delta min ||w|| over |delta| <= 1/(2n), capped by \
         the refined bound"
    );
    Ok(CriticalEpsilonEstimate {
        m,
        lower,
        upper,
        grid_resolution: n,
        grid_points: grid.len(),
        argmax: g_star.clone(),
        margin,
        cap,
        method,
    })
}
