use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{IntMatrix, RatMatrix};
use crate::error::{Error, Result};

/// One fraction-free (Bareiss) elimination pass over the first `n` columns.
/// Returns `None` if a pivot column is empty, otherwise the sign of the row
/// permutation that was applied.
fn bareiss(m: &mut IntMatrix, n: usize) -> Option<i32> {
    let total = m.cols();
    let mut sign = 1;
    let mut prev = BigInt::one();
    for k in 0..n {
        if m[(k, k)].is_zero() {
            let i = (k + 1..n).find(|&i| !m[(i, k)].is_zero())?;
            m.swap_rows(k, i);
            sign = -sign;
        }
        for i in k + 1..m.rows() {
            for j in k + 1..total {
                let v = &m[(i, j)] * &m[(k, k)] - &m[(i, k)] * &m[(k, j)];
                m[(i, j)] = v / &prev;
            }
            m[(i, k)] = BigInt::zero();
        }
        prev = m[(k, k)].clone();
    }
    Some(sign)
}

pub fn det_int(a: &IntMatrix) -> BigInt {
    assert_eq!(a.rows(), a.cols(), "determinant of a non-square matrix");
    let n = a.rows();
    if n == 0 {
        return BigInt::one();
    }
    let mut m = a.clone();
    match bareiss(&mut m, n) {
        None => BigInt::zero(),
        Some(s) => {
            let d = m[(n - 1, n - 1)].clone();
            if s < 0 {
                -d
            } else {
                d
            }
        }
    }
}

fn row_lcm(row: &[BigRational]) -> BigInt {
    row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

pub fn det_rat(a: &RatMatrix) -> BigRational {
    assert_eq!(a.rows(), a.cols(), "determinant of a non-square matrix");
    let mut scale = BigInt::one();
    let mut rows = Vec::with_capacity(a.rows());
    for i in 0..a.rows() {
        let l = row_lcm(a.row(i));
        rows.push(a.row(i).iter().map(|x| (x * &l).to_integer()).collect());
        scale *= l;
    }
    let m = IntMatrix::from_rows(rows, a.cols()).expect("uniform");
    BigRational::new(det_int(&m), scale)
}

/// Exact `X` with `A X = B` for square nonsingular `A`.
pub fn solve_exact(a: &RatMatrix, b: &RatMatrix) -> Result<RatMatrix> {
    let n = a.rows();
    if a.cols() != n || b.rows() != n {
        return Err(Error::InvalidArgument(format!(
            "solve needs square A and matching B, got {}x{} and {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    let k = b.cols();
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let l = row_lcm(a.row(i)).lcm(&row_lcm(b.row(i)));
        let row: Vec<BigInt> = a
            .row(i)
            .iter()
            .chain(b.row(i))
            .map(|x| (x * &l).to_integer())
            .collect();
        rows.push(row);
    }
    let mut m = IntMatrix::from_rows(rows, n + k).expect("uniform");
    if bareiss(&mut m, n).is_none() || (n > 0 && m[(n - 1, n - 1)].is_zero()) {
        return Err(Error::Singular);
    }
    let mut x = RatMatrix::zeros(n, k);
    for c in 0..k {
        for i in (0..n).rev() {
            let mut acc = BigRational::from_integer(m[(i, n + c)].clone());
            for j in i + 1..n {
                if !m[(i, j)].is_zero() {
                    acc -= &x[(j, c)] * BigRational::from_integer(m[(i, j)].clone());
                }
            }
            x[(i, c)] = acc / BigRational::from_integer(m[(i, i)].clone());
        }
    }
    Ok(x)
}

pub fn inverse(a: &RatMatrix) -> Result<RatMatrix> {
    solve_exact(a, &RatMatrix::identity(a.rows()))
}
