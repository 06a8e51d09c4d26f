//! The band matrix `[A]_l`, the lower-triangular matrix `{A}_m` and linear
//! recurrence sequences defined by `A`.
//!
//! Vectors are indexed ascending (`v_1..v_m`), so kernel vectors of `[A]_l`
//! read directly as recurrence sequences.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exact_linalg::IntMatrix;
use crate::poly_core::IntPolynomial;

/// `[A]_l`: `l x (l + d)`, row `i` holds `a_0..a_d` starting at column `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BandMatrix {
    pub poly: IntPolynomial,
    pub ell: usize,
    pub matrix: IntMatrix,
}

/// `{A}_m`: `m x m` lower triangular with `a_d` on the diagonal and
/// `a_{d-k}` on the k-th subdiagonal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TriMatrix {
    pub poly: IntPolynomial,
    pub m: usize,
    pub matrix: IntMatrix,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecurrenceVector {
    pub poly: IntPolynomial,
    pub entries: Vec<BigRational>,
}

impl RecurrenceVector {
    /// Checks `sum_j a_j v_{i+j} = 0` for every window.
    pub fn satisfies_recurrence(&self) -> bool {
        is_recurrence(&self.poly, &self.entries)
    }
}

pub(crate) fn is_recurrence<T>(a: &IntPolynomial, v: &[T]) -> bool
where
    T: Clone + Zero + std::ops::Mul<BigInt, Output = T>,
{
    let d = a.degree();
    if v.len() < d {
        return true;
    }
    (0..v.len() - d).all(|i| {
        (0..=d)
            .map(|j| v[i + j].clone() * a.coeffs()[j].clone())
            .fold(T::zero(), |s, x| s + x)
            .is_zero()
    })
}

fn band_unchecked(a: &IntPolynomial, ell: usize) -> IntMatrix {
    let d = a.degree();
    let mut m = IntMatrix::zeros(ell, ell + d);
    for i in 0..ell {
        for (j, c) in a.coeffs().iter().enumerate() {
            m[(i, i + j)] = c.clone();
        }
    }
    m
}

pub fn band_matrix(a: &IntPolynomial, ell: usize) -> Result<BandMatrix> {
    if ell < 1 {
        return Err(Error::InvalidArgument("band matrix needs at least one row".into()));
    }
    a.require_nonzero_constant()?;
    Ok(BandMatrix { poly: a.clone(), ell, matrix: band_unchecked(a, ell) })
}

pub fn tri_matrix(a: &IntPolynomial, m: usize) -> Result<TriMatrix> {
    if m < 1 {
        return Err(Error::InvalidArgument("triangular matrix needs m >= 1".into()));
    }
    let d = a.degree();
    let mut t = IntMatrix::zeros(m, m);
    for i in 0..m {
        for k in 0..=d.min(i) {
            t[(i, i - k)] = a.coeff(d - k);
        }
    }
    Ok(TriMatrix { poly: a.clone(), m, matrix: t })
}

/// Extends `init` (length `d`) to length `m` by
/// `v_{i+d} = -(sum_{j<d} a_j v_{i+j}) / a_d`.
pub fn recurrence_extend(a: &IntPolynomial, init: &[BigRational], m: usize) -> Result<RecurrenceVector> {
    let d = a.degree();
    if init.len() != d {
        return Err(Error::DegreeMismatch(format!("expected {d} initial values, got {}", init.len())));
    }
    if m < d {
        return Err(Error::InvalidArgument(format!("length {m} is shorter than the degree {d}")));
    }
    let lead = BigRational::from_integer(a.leading().clone());
    let mut v = init.to_vec();
    while v.len() < m {
        let i = v.len() - d;
        let s = (0..d).fold(BigRational::zero(), |s, j| s + &v[i + j] * a.coeff(j));
        v.push(-s / &lead);
    }
    Ok(RecurrenceVector { poly: a.clone(), entries: v })
}

/// Checks `B C = A` and then `[A]_l = [B]_l [C]_{l+s} = [C]_l [B]_{l+t}`
/// and `{A}_m = {B}_m {C}_m = {C}_m {B}_m` with `m = l + d`.
pub fn verify_factorization(a: &IntPolynomial, b: &IntPolynomial, c: &IntPolynomial, ell: usize) -> Result<bool> {
    if &b.mul(c) != a {
        return Err(Error::DegreeMismatch(format!("({b}) * ({c}) is not {a}")));
    }
    let (s, t) = (b.degree(), c.degree());
    let band_a = band_matrix(a, ell)?.matrix;
    let bc = band_matrix(b, ell)?.matrix.mul(&band_matrix(c, ell + s)?.matrix)?;
    let cb = band_matrix(c, ell)?.matrix.mul(&band_matrix(b, ell + t)?.matrix)?;
    let m = ell + a.degree();
    let tri_a = tri_matrix(a, m)?.matrix;
    let (tb, tc) = (tri_matrix(b, m)?.matrix, tri_matrix(c, m)?.matrix);
    Ok(band_a == bc && band_a == cb && tri_a == tb.mul(&tc)? && tri_a == tc.mul(&tb)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_linalg::{integer_kernel, inverse, rat};
    use proptest::prelude::*;

    fn p(c: &[i64]) -> IntPolynomial {
        IntPolynomial::from_i64(c).unwrap()
    }

    #[test]
    fn band_examples() {
        let m = band_matrix(&p(&[-2, 1]), 2).unwrap().matrix;
        assert_eq!(m, IntMatrix::from_i64_rows(&[&[-2, 1, 0], &[0, -2, 1]]));
        let m = band_matrix(&p(&[3, -2, -9, -3, 9]), 1).unwrap().matrix;
        assert_eq!(m, IntMatrix::from_i64_rows(&[&[3, -2, -9, -3, 9]]));
        let m = band_matrix(&p(&[1, 1, 1]), 3).unwrap().matrix;
        assert_eq!(m, IntMatrix::from_i64_rows(&[&[1, 1, 1, 0, 0], &[0, 1, 1, 1, 0], &[0, 0, 1, 1, 1]]));
        assert!(band_matrix(&p(&[0, 1]), 2).is_err());
        assert!(band_matrix(&p(&[1, 1]), 0).is_err());
    }

    #[test]
    fn tri_examples() {
        let t = tri_matrix(&p(&[-2, 1]), 3).unwrap().matrix;
        assert_eq!(t, IntMatrix::from_i64_rows(&[&[1, 0, 0], &[-2, 1, 0], &[0, -2, 1]]));
        let t = tri_matrix(&p(&[3, -2, -9, -3, 9]), 4).unwrap().matrix;
        assert_eq!(
            t,
            IntMatrix::from_i64_rows(&[&[9, 0, 0, 0], &[-3, 9, 0, 0], &[-9, -3, 9, 0], &[-2, -9, -3, 9]])
        );
    }

    #[test]
    fn tri_embeds_band_rows() {
        let a = p(&[3, -2, -9, -3, 9]);
        let t = tri_matrix(&a, 9).unwrap().matrix;
        let b = band_matrix(&a, 5).unwrap().matrix;
        for i in 0..5 {
            assert_eq!(t.row(4 + i), b.row(i));
        }
    }

    #[test]
    fn linear_inverse_is_geometric() {
        // {x - 3/2}_m scaled: 2x - 3 has {.} = 2 {x - 3/2}
        let t = tri_matrix(&p(&[-3, 2]), 5).unwrap().matrix.to_rational();
        let inv = inverse(&t).unwrap();
        let g = rat(3, 2);
        for i in 0..5 {
            for j in 0..=i {
                let expect = num_traits::pow(g.clone(), i - j) / BigRational::from_integer(2.into());
                assert_eq!(inv[(i, j)], expect);
            }
        }
    }

    #[test]
    fn extend_examples() {
        let one = rat(1, 1);
        let v = recurrence_extend(&p(&[-2, 1]), std::slice::from_ref(&one), 4).unwrap();
        assert_eq!(v.entries, vec![rat(1, 1), rat(2, 1), rat(4, 1), rat(8, 1)]);
        let v = recurrence_extend(&p(&[-3, 2]), std::slice::from_ref(&one), 3).unwrap();
        assert_eq!(v.entries, vec![rat(1, 1), rat(3, 2), rat(9, 4)]);
        let z = rat(0, 1);
        let v = recurrence_extend(&p(&[3, -2, -9, -3, 9]), &[one, z.clone(), z.clone(), z], 5).unwrap();
        assert_eq!(v.entries[4], rat(-1, 3));
        assert!(v.satisfies_recurrence());
        assert!(recurrence_extend(&p(&[-2, 1]), &[rat(1, 1)], 0).is_err());
    }

    #[test]
    fn factorization_examples() {
        let (b, c) = (p(&[-2, 1]), p(&[-3, 1]));
        assert!(verify_factorization(&p(&[6, -5, 1]), &b, &c, 3).unwrap());
        let a = p(&[3, -2, -9, -3, 9]);
        assert!(verify_factorization(&a, &p(&[1]), &a, 4).unwrap());
        let x = p(&[0, 1]);
        assert!(verify_factorization(&p(&[0, 0, 1]), &x, &x, 2).is_err());
        assert!(verify_factorization(&p(&[6, -5, 1]), &b, &b, 2).is_err());
    }

    fn poly_strategy(max_deg: usize) -> impl Strategy<Value = IntPolynomial> {
        (1..=max_deg)
            .prop_flat_map(|d| proptest::collection::vec(-9i64..=9, d + 1))
            .prop_map(|mut c| {
                if c[0] == 0 {
                    c[0] = 1;
                }
                let n = c.len() - 1;
                if c[n] == 0 {
                    c[n] = 1;
                }
                IntPolynomial::from_i64(&c).unwrap()
            })
    }

    proptest! {
        #[test]
        fn power_series_section(a in poly_strategy(4), ell in 1usize..6,
                                f in proptest::collection::vec(-20i64..=20, 10)) {
            let d = a.degree();
            let f = &f[..d + ell];
            // coefficients d..d+ell-1 of A*F
            let g: Vec<BigInt> = (d..d + ell)
                .map(|k| (0..=d.min(k)).map(|j| a.coeff(j) * f[k - j]).sum())
                .collect();
            let m = band_matrix(&a, ell).unwrap().matrix;
            let rev: Vec<BigInt> = f.iter().rev().map(|&x| BigInt::from(x)).collect();
            for i in 0..ell {
                let row: BigInt = m.row(i).iter().zip(&rev).map(|(x, y)| x * y).sum();
                prop_assert_eq!(&row, &g[d + ell - 1 - i - d]);
            }
        }

        #[test]
        fn kernel_rows_are_recurrences(a in poly_strategy(3), extra in 1usize..5) {
            let d = a.degree();
            let m = d + extra;
            let k = integer_kernel(&band_matrix(&a, m - d).unwrap().matrix);
            for row in k.to_rows() {
                let r: Vec<BigRational> = row.iter().cloned().map(BigRational::from_integer).collect();
                let ext = recurrence_extend(&a, &r[..d], m).unwrap();
                prop_assert_eq!(ext.entries, r);
            }
        }

        #[test]
        fn random_products_factor(b in poly_strategy(3), c in poly_strategy(3), ell in 1usize..5) {
            prop_assert!(verify_factorization(&b.mul(&c), &b, &c, ell).unwrap());
        }
    }
}
