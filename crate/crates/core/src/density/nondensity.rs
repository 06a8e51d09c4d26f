//! Volume certificate that `Q(A)` is not eps-dense in `T^m`.
//!
//! With `omega_1..omega_d` a Z-basis of the lattice `Lambda_m` of integral
//! recurrences of length `m`, the set `Pi = I_eps + {sum t_i omega_i : t in
//! [0,1]^d}` projects onto the closure of `Q(A) + I_eps` in the torus. If
//! that covered `T^m`, `Vol(Pi)` would be at least 1. `Pi` is a zonotope, so
//! its volume is exactly the sum over `m`-subsets of generators of
//! `|det|`, i.e. `sum_p eps^{m-p} sum_{|R|=p} sum_{|J|=p} |det omega_{R,J}|`.

use itertools::Itertools;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact_linalg::{det_int, integer_kernel, IntMatrix};
use crate::mp::Float;
use crate::poly_core::IntPolynomial;
use crate::recurrence_matrices::band_matrix;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NonDensityCertificate {
    pub m: usize,
    pub eps: f64,
    /// Upper enclosure of `Vol(Pi)` (the exact value rounded up).
    pub volume_bound: f64,
    /// Exact volume as a fraction.
    pub volume_exact: String,
    /// `Vol(Pi) < 1`, decided exactly.
    pub certified: bool,
}

/// Sum of `|det|` over all `p x p` minors of the `d x m` basis matrix, for
/// each `p = 0..=d`.
fn minor_sums(basis: &IntMatrix) -> Vec<BigInt> {
    let (d, m) = (basis.rows(), basis.cols());
    (0..=d)
        .map(|p| {
            let row_sets: Vec<Vec<usize>> = (0..d).combinations(p).collect();
            (0..m)
                .combinations(p)
                .par_bridge()
                .map(|cols| {
                    row_sets
                        .iter()
                        .map(|rows| if p == 0 { BigInt::one() } else { det_int(&basis.select(rows, &cols)).abs() })
                        .sum::<BigInt>()
                })
                .sum()
        })
        .collect()
}

fn round_up(r: &BigRational) -> f64 {
    let x = Float::from_rational(r, 64).to_f64();
    if Float::from_f64(x).to_rational() < *r {
        x.next_up()
    } else {
        x
    }
}

pub fn certify_non_density(a: &IntPolynomial, m: usize, eps: f64) -> Result<NonDensityCertificate> {
    a.require_nonzero_constant()?;
    let d = a.degree();
    if m <= d {
        return Err(Error::InvalidArgument(format!("m = {m} must exceed the degree {d}")));
    }
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::InvalidArgument(format!("eps must lie in (0, 1], got {eps}")));
    }
    let basis = integer_kernel(&band_matrix(a, m - d)?.matrix);
    let e = Float::from_f64(eps).to_rational();
    let mut vol = BigRational::zero();
    for (p, s) in minor_sums(&basis).into_iter().enumerate() {
        vol += num_traits::pow(e.clone(), m - p) * BigRational::from_integer(s);
    }
    Ok(NonDensityCertificate {
        m,
        eps,
        volume_bound: round_up(&vol),
        volume_exact: crate::exact_linalg::fmt_rational(&vol),
        certified: vol < BigRational::one(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> IntPolynomial {
        IntPolynomial::from_i64(c).unwrap()
    }

    #[test]
    fn doubling_closed_forms() {
        let a = p(&[-2, 1]);
        let c = certify_non_density(&a, 8, 0.4).unwrap();
        let closed = 0.4f64.powi(8) + 0.4f64.powi(7) * 255.0;
        assert!((c.volume_bound - closed).abs() < 1e-12 && c.certified);
        assert!((c.volume_bound - 0.41845).abs() < 1e-5);
        let c = certify_non_density(&a, 3, 0.4).unwrap();
        assert!((c.volume_bound - 1.184).abs() < 1e-12 && !c.certified);
        for m in 2..=20 {
            assert!(!certify_non_density(&a, m, 0.6).unwrap().certified);
        }
    }

    #[test]
    fn volume_is_basis_independent_at_full_rank() {
        // eps = 1 with x + 1: Lambda spanned by (1,-1,1,...); volume = 1 + m
        let c = certify_non_density(&p(&[1, 1]), 5, 1.0).unwrap();
        assert_eq!(c.volume_exact, "6");
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(certify_non_density(&p(&[-2, 1]), 1, 0.4).is_err());
        assert!(certify_non_density(&p(&[-2, 1]), 4, 1.5).is_err());
    }
}
