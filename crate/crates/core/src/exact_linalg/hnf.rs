use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::IntMatrix;

fn row_combine(m: &mut IntMatrix, r: usize, i: usize, x: &BigInt, y: &BigInt, a: &BigInt, b: &BigInt) {
    // (row_r, row_i) <- (x row_r + y row_i, -b row_r + a row_i); determinant x a + y b = 1
    for j in 0..m.cols() {
        let u = m[(r, j)].clone();
        let v = m[(i, j)].clone();
        m[(r, j)] = x * &u + y * &v;
        m[(i, j)] = a * &v - b * &u;
    }
}

fn row_axpy(m: &mut IntMatrix, dst: usize, src: usize, q: &BigInt) {
    for j in 0..m.cols() {
        let s = &m[(src, j)] * q;
        m[(dst, j)] -= s;
    }
}

fn negate_row(m: &mut IntMatrix, r: usize) {
    for x in m.row_mut(r) {
        *x = -std::mem::take(x);
    }
}

/// Row-style Hermite normal form: returns `(H, U)` with `U * A = H`,
/// `U` unimodular, `H` in row echelon form with positive pivots and every
/// entry above a pivot in `[0, pivot)`.
pub fn hnf(a: &IntMatrix) -> (IntMatrix, IntMatrix) {
    let mut h = a.clone();
    let mut u = IntMatrix::identity(a.rows());
    let mut r = 0;
    for c in 0..a.cols() {
        if r == a.rows() {
            break;
        }
        for i in r + 1..a.rows() {
            if h[(i, c)].is_zero() {
                continue;
            }
            let e = h[(r, c)].extended_gcd(&h[(i, c)]);
            let g = e.gcd;
            let ar = &h[(r, c)] / &g;
            let bi = &h[(i, c)] / &g;
            row_combine(&mut h, r, i, &e.x, &e.y, &ar, &bi);
            row_combine(&mut u, r, i, &e.x, &e.y, &ar, &bi);
        }
        if h[(r, c)].is_zero() {
            continue;
        }
        if h[(r, c)].is_negative() {
            negate_row(&mut h, r);
            negate_row(&mut u, r);
        }
        let p = h[(r, c)].clone();
        for i in 0..r {
            let q = h[(i, c)].div_floor(&p);
            if !q.is_zero() {
                row_axpy(&mut h, i, r, &q);
                row_axpy(&mut u, i, r, &q);
            }
        }
        r += 1;
    }
    (h, u)
}

/// Elementary divisors `d_1 | d_2 | ...`, `min(rows, cols)` of them,
/// nonnegative, zeros last.
pub fn snf(a: &IntMatrix) -> Vec<BigInt> {
    let mut m = a.clone();
    let (nr, nc) = (m.rows(), m.cols());
    let n = nr.min(nc);
    for t in 0..n {
        // smallest nonzero entry of the trailing block as pivot
        let mut best: Option<(usize, usize)> = None;
        for i in t..nr {
            for j in t..nc {
                if !m[(i, j)].is_zero()
                    && best.is_none_or(|(bi, bj)| m[(i, j)].abs() < m[(bi, bj)].abs())
                {
                    best = Some((i, j));
                }
            }
        }
        let Some((bi, bj)) = best else { break };
        m.swap_rows(t, bi);
        swap_cols(&mut m, t, bj);
        loop {
            let p = m[(t, t)].clone();
            let mut clean = true;
            for i in t + 1..nr {
                if m[(i, t)].is_zero() {
                    continue;
                }
                let q = m[(i, t)].div_floor(&p);
                row_axpy(&mut m, i, t, &q);
                if !m[(i, t)].is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..nc {
                if m[(t, j)].is_zero() {
                    continue;
                }
                let q = m[(t, j)].div_floor(&p);
                for i in t..nr {
                    let s = &m[(i, t)] * &q;
                    m[(i, j)] -= s;
                }
                if !m[(t, j)].is_zero() {
                    clean = false;
                }
            }
            if !clean {
                let mut bp = (t, t);
                for i in t..nr {
                    if !m[(i, t)].is_zero() && m[(i, t)].abs() < m[bp].abs() {
                        bp = (i, t);
                    }
                }
                for j in t..nc {
                    if !m[(t, j)].is_zero() && m[(t, j)].abs() < m[bp].abs() {
                        bp = (t, j);
                    }
                }
                m.swap_rows(t, bp.0);
                swap_cols(&mut m, t, bp.1);
                continue;
            }
            // pivot must divide the whole trailing block
            let mut offender = None;
            'scan: for i in t + 1..nr {
                for j in t + 1..nc {
                    if !m[(i, j)].is_multiple_of(&p) {
                        offender = Some(i);
                        break 'scan;
                    }
                }
            }
            match offender {
                Some(i) => {
                    for j in 0..nc {
                        let v = m[(i, j)].clone();
                        m[(t, j)] += v;
                    }
                }
                None => break,
            }
        }
    }
    (0..n).map(|i| m[(i, i)].abs()).collect()
}

fn swap_cols(m: &mut IntMatrix, a: usize, b: usize) {
    if a == b {
        return;
    }
    for i in 0..m.rows() {
        let t = m[(i, a)].clone();
        m[(i, a)] = m[(i, b)].clone();
        m[(i, b)] = t;
    }
}

/// Basis (as rows, in Hermite normal form) of the saturated lattice
/// `{v in Z^cols : A v = 0}`.
pub fn integer_kernel(a: &IntMatrix) -> IntMatrix {
    let (r, c) = (a.rows(), a.cols());
    let mut aug = IntMatrix::zeros(c, r + c);
    for i in 0..c {
        for j in 0..r {
            aug[(i, j)] = a[(j, i)].clone();
        }
        aug[(i, r + i)] = BigInt::one();
    }
    let (h, _) = hnf(&aug);
    let kernel_rows: Vec<Vec<BigInt>> = (0..c)
        .filter(|&i| (0..r).all(|j| h[(i, j)].is_zero()))
        .map(|i| h.row(i)[r..].to_vec())
        .collect();
    let k = IntMatrix::from_rows(kernel_rows, c).expect("kernel rows have uniform length");
    let (kh, _) = hnf(&k);
    let nonzero: Vec<Vec<BigInt>> = kh
        .to_rows()
        .into_iter()
        .filter(|row| row.iter().any(|x| !x.is_zero()))
        .collect();
    IntMatrix::from_rows(nonzero, c).expect("uniform")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_linalg::det_int;
    use proptest::prelude::*;

    fn m(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_i64_rows(rows)
    }

    #[test]
    fn hnf_identity() {
        let i = IntMatrix::identity(3);
        let (h, u) = hnf(&i);
        assert_eq!(h, i);
        assert_eq!(u, i);
    }

    #[test]
    fn hnf_small_square() {
        let a = m(&[&[2, 4], &[6, 8]]);
        let (h, u) = hnf(&a);
        // the entry above the second pivot reduces to 0 (4 mod 4)
        assert_eq!(h, m(&[&[2, 0], &[0, 4]]));
        assert_eq!(u.mul(&a).unwrap(), h);
    }

    #[test]
    fn hnf_band_pivots() {
        let a = m(&[&[-3, 2, 0], &[0, -3, 2]]);
        let (h, u) = hnf(&a);
        assert_eq!(u.mul(&a).unwrap(), h);
        assert_eq!(h, m(&[&[3, 1, -2], &[0, 3, -2]]));
        let piv = h.select(&[0, 1], &[0, 1]);
        assert_eq!(det_int(&piv), BigInt::from(9));
    }

    #[test]
    fn snf_examples() {
        assert_eq!(snf(&m(&[&[2, 4], &[6, 8]])), vec![2.into(), 4.into()]);
        assert_eq!(snf(&IntMatrix::identity(2)), vec![BigInt::one(), BigInt::one()]);
        assert_eq!(snf(&m(&[&[0]])), vec![BigInt::zero()]);
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(integer_kernel(&m(&[&[-2, 1, 0], &[0, -2, 1]])), m(&[&[1, 2, 4]]));
        assert_eq!(integer_kernel(&m(&[&[-3, 2, 0], &[0, -3, 2]])), m(&[&[4, 6, 9]]));
        assert_eq!(integer_kernel(&IntMatrix::identity(2)).rows(), 0);
    }

    fn arb_matrix(max_r: usize, max_c: usize) -> impl Strategy<Value = IntMatrix> {
        (1..=max_r, 1..=max_c).prop_flat_map(|(r, c)| {
            proptest::collection::vec(-9i64..=9, r * c).prop_map(move |v| {
                let rows: Vec<Vec<BigInt>> =
                    v.chunks(c).map(|ch| ch.iter().map(|&x| x.into()).collect()).collect();
                IntMatrix::from_rows(rows, c).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn hnf_is_unimodular_and_canonical(a in arb_matrix(4, 5)) {
            let (h, u) = hnf(&a);
            prop_assert_eq!(&u.mul(&a).unwrap(), &h);
            prop_assert_eq!(det_int(&u).abs(), BigInt::one());
            let (h2, _) = hnf(&h);
            prop_assert_eq!(h2, h);
        }

        #[test]
        fn snf_divisibility_and_det(a in arb_matrix(4, 4)) {
            let d = snf(&a);
            for w in d.windows(2) {
                if !w[1].is_zero() {
                    prop_assert!(w[1].is_multiple_of(&w[0]));
                }
            }
            if a.rows() == a.cols() {
                let prod: BigInt = d.iter().product();
                prop_assert_eq!(prod, det_int(&a).abs());
            }
        }

        #[test]
        fn kernel_is_saturated(a in arb_matrix(3, 5)) {
            let k = integer_kernel(&a);
            prop_assert!(a.mul(&k.transpose()).unwrap().is_zero());
            if k.rows() > 0 {
                // saturated: all elementary divisors of the basis are 1
                prop_assert!(snf(&k).iter().all(|x| x.is_one()));
            }
        }
    }
}
