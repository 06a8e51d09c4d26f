//! Structure of the lattice `Lambda_m` of integral recurrences of length
//! `m` defined by `A`: Newton polygons, the rational basis `N`, the
//! canonical p-adic basis `M`, the Z-basis with its index in `Theta_m`, and
//! the minor identity `det N_xi = +- det U / a_d^{m-d}`.

mod canonical;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact_linalg::{det_int, det_rat, integer_kernel, is_prime, valuation_of_int, IntMatrix, RatMatrix};
use crate::poly_core::IntPolynomial;
use crate::recurrence_matrices::{band_matrix, recurrence_extend};

pub use canonical::{
    canonical_basis_m, verify_canonical, BlockInfo, CanonicalBasisM, Certificate, Clause, PivotRule,
};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NewtonPolygon {
    pub p: u64,
    /// `(w_k, v_p(a_{w_k}))` for `k = 0..=r`.
    pub vertices: Vec<(usize, i64)>,
    #[serde(serialize_with = "ser_rationals")]
    pub slopes: Vec<BigRational>,
    pub lengths: Vec<usize>,
    pub r: usize,
    /// First segment (1-based) with slope `>= 0`, or `r + 1` if none.
    pub s: usize,
    /// First segment with slope `> 0`, or `r + 1` if none.
    pub s_strict: usize,
}

fn ser_rationals<S: serde::Serializer>(v: &[BigRational], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(crate::exact_linalg::fmt_rational))
}

impl NewtonPolygon {
    /// `w_k` for `k = 0..=r`.
    pub fn breakpoints(&self) -> Vec<usize> {
        self.vertices.iter().map(|v| v.0).collect()
    }
}

fn cross(o: (i64, i64), a: (i64, i64), b: (i64, i64)) -> i128 {
    (a.0 - o.0) as i128 * (b.1 - o.1) as i128 - (a.1 - o.1) as i128 * (b.0 - o.0) as i128
}

/// Lower convex hull of `(i, v_p(a_i))`; zero coefficients sit at infinity.
pub fn newton_polygon(a: &IntPolynomial, p: u64) -> Result<NewtonPolygon> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    a.require_nonzero_constant()?;
    let pts: Vec<(i64, i64)> = a
        .coeffs()
        .iter()
        .enumerate()
        .filter_map(|(i, c)| valuation_of_int(c, p).finite().map(|v| (i as i64, v)))
        .collect();
    let mut hull: Vec<(i64, i64)> = Vec::new();
    for &q in &pts {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], q) <= 0 {
            hull.pop();
        }
        hull.push(q);
    }
    let mut slopes = Vec::new();
    let mut lengths = Vec::new();
    for w in hull.windows(2) {
        let len = (w[1].0 - w[0].0) as usize;
        lengths.push(len);
        slopes.push(BigRational::new(BigInt::from(w[1].1 - w[0].1), BigInt::from(len)));
    }
    let r = slopes.len();
    let s = slopes.iter().position(|x| !x.is_negative()).map_or(r + 1, |k| k + 1);
    let s_strict = slopes.iter().position(|x| x.is_positive()).map_or(r + 1, |k| k + 1);
    Ok(NewtonPolygon {
        p,
        vertices: hull.iter().map(|&(i, v)| (i as usize, v)).collect(),
        slopes,
        lengths,
        r,
        s,
        s_strict,
    })
}

/// The `d x m` matrix whose rows extend the standard basis vectors of
/// `Q^d` by the recurrence.
pub fn basis_n(a: &IntPolynomial, m: usize) -> Result<RatMatrix> {
    let d = a.degree();
    if m < d {
        return Err(Error::InvalidArgument(format!("m = {m} is shorter than the degree {d}")));
    }
    let rows = (0..d)
        .map(|i| {
            let init: Vec<BigRational> =
                (0..d).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }).collect();
            recurrence_extend(a, &init, m).map(|v| v.entries)
        })
        .collect::<Result<Vec<_>>>()?;
    RatMatrix::from_rows(rows, m)
}

/// Columns `1..w` and `m-d+w+1..m` (0-based).
pub(crate) fn xi(d: usize, m: usize, w: usize) -> Vec<usize> {
    (0..w).chain(m - d + w..m).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeBases {
    /// Z-basis of `Theta_m`.
    pub n: RatMatrix,
    /// HNF Z-basis of `Lambda_m`.
    pub z_basis: IntMatrix,
    /// `(Theta_m : Lambda_m) = |det W|` with `W N = Z`.
    pub index: BigInt,
}

pub fn integral_basis(a: &IntPolynomial, m: usize) -> Result<LatticeBases> {
    a.require_nonzero_constant()?;
    a.require_primitive()?;
    let d = a.degree();
    let n = basis_n(a, m)?;
    let z_basis = if m == d { IntMatrix::identity(d) } else { integer_kernel(&band_matrix(a, m - d)?.matrix) };
    if z_basis.rows() != d {
        return Err(Error::Inconsistent(format!("lattice of recurrences has rank {} instead of {d}", z_basis.rows())));
    }
    // N starts with the identity, so W is the leading d x d block of Z
    let cols: Vec<usize> = (0..d).collect();
    let rows: Vec<usize> = (0..d).collect();
    let index = det_int(&z_basis.select(&rows, &cols)).abs();
    let expected = num_traits::pow(a.leading().abs(), m - d);
    if index != expected {
        return Err(Error::Inconsistent(format!("index {index} differs from |a_d|^(m-d) = {expected}")));
    }
    Ok(LatticeBases { n, z_basis, index })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MinorIdentity {
    #[serde(serialize_with = "ser_rational")]
    pub det_n_xi: BigRational,
    #[serde(serialize_with = "ser_display")]
    pub det_u: BigInt,
    /// `(-1)^{(d-w)(m-d)}`.
    pub sign: i32,
    pub holds: bool,
}

fn ser_display<S: serde::Serializer>(v: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

pub(crate) fn ser_rat_matrix<S: serde::Serializer>(m: &RatMatrix, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(m.rows()))?;
    for i in 0..m.rows() {
        let row: Vec<String> = m.row(i).iter().map(crate::exact_linalg::fmt_rational).collect();
        seq.serialize_element(&row)?;
    }
    seq.end()
}

fn ser_rational<S: serde::Serializer>(v: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&crate::exact_linalg::fmt_rational(v))
}

/// `U = (a_{w+i-j})_{1 <= i,j <= m-d}`.
pub fn u_matrix(a: &IntPolynomial, w: usize, m: usize) -> IntMatrix {
    let l = m - a.degree();
    let mut u = IntMatrix::zeros(l, l);
    for i in 0..l {
        for j in 0..l {
            u[(i, j)] = a.coeff_signed(w as i64 + i as i64 - j as i64);
        }
    }
    u
}

pub fn minor_identity(a: &IntPolynomial, w: usize, m: usize) -> Result<MinorIdentity> {
    let d = a.degree();
    if w > d {
        return Err(Error::InvalidArgument(format!("w = {w} exceeds the degree {d}")));
    }
    let n = basis_n(a, m)?;
    let rows: Vec<usize> = (0..d).collect();
    let det_n_xi = det_rat(&n.select(&rows, &xi(d, m, w)));
    let det_u = det_int(&u_matrix(a, w, m));
    if det_n_xi.is_zero() && !det_u.is_zero() {
        return Err(Error::Inconsistent(format!("N_xi is singular for w = {w} while det U = {det_u}")));
    }
    let sign = if ((d - w) * (m - d)).is_multiple_of(2) { 1 } else { -1 };
    let predicted = BigRational::new(det_u.clone() * sign, num_traits::pow(a.leading().clone(), m - d));
    Ok(MinorIdentity { holds: predicted == det_n_xi, det_n_xi, det_u, sign })
}
