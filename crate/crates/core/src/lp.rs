//! Dense two-phase simplex with Bland's rule, over `f64` (with a pivot
//! tolerance) or exact rationals.
//!
//! Problems are in standard form: minimize `c.x` subject to `A x = b`,
//! `x >= 0`. Sizes here are tens of variables, so a full tableau is fine.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub(crate) trait Scalar:
    Clone
    + Zero
    + One
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn is_pos(&self) -> bool;
    fn is_neg(&self) -> bool;
    fn is_negligible(&self) -> bool {
        !self.is_pos() && !self.is_neg()
    }
}

const F64_TOL: f64 = 1e-11;

impl Scalar for f64 {
    fn is_pos(&self) -> bool {
        *self > F64_TOL
    }
    fn is_neg(&self) -> bool {
        *self < -F64_TOL
    }
}

impl Scalar for BigRational {
    fn is_pos(&self) -> bool {
        self.is_positive()
    }
    fn is_neg(&self) -> bool {
        self.is_negative()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum LpOutcome<T> {
    Optimal { x: Vec<T>, value: T },
    Infeasible,
    Unbounded,
}

struct Tableau<T> {
    rows: Vec<Vec<T>>,
    obj: Vec<T>,
    basis: Vec<usize>,
    width: usize,
}

impl<T: Scalar> Tableau<T> {
    fn rhs(&self) -> usize {
        self.width
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        for v in self.rows[r].iter_mut() {
            *v = v.clone() / p.clone();
        }
        let prow = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (v, pv) in row.iter_mut().zip(&prow) {
                *v = v.clone() - f.clone() * pv.clone();
            }
        }
        if !self.obj[c].is_zero() {
            let f = self.obj[c].clone();
            for (v, pv) in self.obj.iter_mut().zip(&prow) {
                *v = v.clone() - f.clone() * pv.clone();
            }
        }
        self.basis[r] = c;
    }

    /// Runs to optimality over columns `< allowed`; `false` on unboundedness.
    fn run(&mut self, allowed: usize) -> bool {
        loop {
            let Some(c) = (0..allowed).find(|&j| self.obj[j].is_neg()) else {
                return true;
            };
            let rhs = self.rhs();
            let mut best: Option<(usize, T)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if !row[c].is_pos() {
                    continue;
                }
                let ratio = row[rhs].clone() / row[c].clone();
                let better = match &best {
                    None => true,
                    Some((bi, br)) => {
                        ratio < *br || (!(ratio > *br) && self.basis[i] < self.basis[*bi])
                    }
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            match best {
                Some((r, _)) => self.pivot(r, c),
                None => return false,
            }
        }
    }
}

pub(crate) fn minimize<T: Scalar>(a: &[Vec<T>], b: &[T], c: &[T]) -> LpOutcome<T> {
    let m = a.len();
    let n = c.len();
    let width = n + m;
    let mut rows = Vec::with_capacity(m);
    for (i, ai) in a.iter().enumerate() {
        let flip = b[i].is_neg();
        let mut row: Vec<T> = Vec::with_capacity(width + 1);
        for v in ai {
            row.push(if flip { -v.clone() } else { v.clone() });
        }
        for k in 0..m {
            row.push(if k == i { T::one() } else { T::zero() });
        }
        row.push(if flip { -b[i].clone() } else { b[i].clone() });
        rows.push(row);
    }
    // phase one: minimise the sum of artificials
    let mut obj = vec![T::zero(); width + 1];
    for row in &rows {
        for j in 0..n {
            obj[j] = obj[j].clone() - row[j].clone();
        }
        obj[width] = obj[width].clone() - row[width].clone();
    }
    let mut t = Tableau { rows, obj, basis: (n..n + m).collect(), width };
    t.run(n);
    if (-t.obj[width].clone()).is_pos() {
        return LpOutcome::Infeasible;
    }
    // drive remaining artificials out, dropping redundant rows
    let mut i = 0;
    while i < t.rows.len() {
        if t.basis[i] >= n {
            match (0..n).find(|&j| !t.rows[i][j].is_negligible()) {
                Some(j) => t.pivot(i, j),
                None => {
                    t.rows.remove(i);
                    t.basis.remove(i);
                    continue;
                }
            }
        }
        i += 1;
    }
    let mut obj = vec![T::zero(); width + 1];
    obj[..n].clone_from_slice(c);
    for (row, &bj) in t.rows.iter().zip(&t.basis) {
        let cb = c[bj].clone();
        if cb.is_zero() {
            continue;
        }
        for (o, v) in obj.iter_mut().zip(row) {
            *o = o.clone() - cb.clone() * v.clone();
        }
    }
    t.obj = obj;
    if !t.run(n) {
        return LpOutcome::Unbounded;
    }
    let mut x = vec![T::zero(); n];
    for (row, &bj) in t.rows.iter().zip(&t.basis) {
        x[bj] = row[width].clone();
    }
    let value = -t.obj[width].clone();
    LpOutcome::Optimal { x, value }
}

/// Minimum of `||w||_inf` subject to `M w = r`, or `None` if infeasible.
pub(crate) fn min_sup_norm<T: Scalar>(mat: &[Vec<T>], r: &[T]) -> Option<(T, Vec<T>)> {
    // variables: w+ (m), w- (m), tau, slack (m)
    let m = mat.first().map_or(0, Vec::len);
    let n = 3 * m + 1;
    let mut a = Vec::with_capacity(mat.len() + m);
    let mut b = Vec::with_capacity(mat.len() + m);
    for (row, ri) in mat.iter().zip(r) {
        let mut eq = vec![T::zero(); n];
        for j in 0..m {
            eq[j] = row[j].clone();
            eq[m + j] = -row[j].clone();
        }
        a.push(eq);
        b.push(ri.clone());
    }
    for j in 0..m {
        let mut eq = vec![T::zero(); n];
        eq[j] = T::one();
        eq[m + j] = T::one();
        eq[2 * m] = -T::one();
        eq[2 * m + 1 + j] = T::one();
        a.push(eq);
        b.push(T::zero());
    }
    let mut c = vec![T::zero(); n];
    c[2 * m] = T::one();
    match minimize(&a, &b, &c) {
        LpOutcome::Optimal { x, value } => {
            let w = (0..m).map(|j| x[j].clone() - x[m + j].clone()).collect();
            Some((value, w))
        }
        _ => None,
    }
}

/// Whether some `w` with `|w_j| <= half` solves `M w = r`.
pub(crate) fn box_feasible(mat: &[Vec<BigRational>], r: &[BigRational], half: &BigRational) -> bool {
    // u = w + half, 0 <= u <= 2 half
    let m = mat.first().map_or(0, Vec::len);
    let n = 2 * m;
    let mut a = Vec::new();
    let mut b = Vec::new();
    for (row, ri) in mat.iter().zip(r) {
        let mut eq = vec![BigRational::zero(); n];
        eq[..m].clone_from_slice(row);
        let shift = row.iter().fold(BigRational::zero(), |s, x| s + x) * half;
        a.push(eq);
        b.push(ri + shift);
    }
    let width = half + half;
    for j in 0..m {
        let mut eq = vec![BigRational::zero(); n];
        eq[j] = BigRational::one();
        eq[m + j] = BigRational::one();
        a.push(eq);
        b.push(width.clone());
    }
    matches!(minimize(&a, &b, &vec![BigRational::zero(); n]), LpOutcome::Optimal { .. })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_linalg::rat;

    #[test]
    fn small_lp() {
        // min -x - y, x + 2y + s1 = 4, 3x + y + s2 = 6
        let a = vec![vec![1.0, 2.0, 1.0, 0.0], vec![3.0, 1.0, 0.0, 1.0]];
        match minimize(&a, &[4.0, 6.0], &[-1.0, -1.0, 0.0, 0.0]) {
            LpOutcome::Optimal { value, x } => {
                assert!((value + 2.8).abs() < 1e-12);
                assert!((x[0] - 1.6).abs() < 1e-12 && (x[1] - 1.2).abs() < 1e-12);
            }
            o => panic!("{o:?}"),
        }
    }

    #[test]
    fn infeasible_and_unbounded() {
        let a = vec![vec![rat(1, 1), rat(1, 1)]];
        assert_eq!(minimize(&a, &[rat(-1, 1)], &[rat(0, 1), rat(0, 1)]), LpOutcome::Infeasible);
        let a = vec![vec![rat(1, 1), rat(-1, 1)]];
        assert_eq!(minimize(&a, &[rat(1, 1)], &[rat(0, 1), rat(-1, 1)]), LpOutcome::Unbounded);
    }

    #[test]
    fn sup_norm_of_interval_image() {
        // -2 w1 + w2 = 1/2: min sup norm is 1/6
        let mat = vec![vec![rat(-2, 1), rat(1, 1)]];
        let (v, w) = min_sup_norm(&mat, &[rat(1, 2)]).unwrap();
        assert_eq!(v, rat(1, 6));
        assert_eq!(rat(-2, 1) * &w[0] + &w[1], rat(1, 2));
    }

    #[test]
    fn redundant_rows() {
        let mat = vec![vec![rat(1, 1), rat(1, 1)], vec![rat(2, 1), rat(2, 1)]];
        let (v, _) = min_sup_norm(&mat, &[rat(1, 1), rat(2, 1)]).unwrap();
        assert_eq!(v, rat(1, 2));
        assert!(box_feasible(&mat, &[rat(1, 1), rat(2, 1)], &rat(1, 2)));
        assert!(!box_feasible(&mat, &[rat(1, 1), rat(2, 1)], &rat(1, 3)));
    }
}
