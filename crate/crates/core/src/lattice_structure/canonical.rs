//! The canonical basis `M` of `Lambda_m tensor Z_p` and its certificate.
//!
//! For a vertex abscissa `w` put `xi = (1..w, m-d+w+1..m)` and
//! `Q = N_xi^{-1} N`. Rows `w_{k-1}+1..w_k` of `M` are the same rows of `Q`
//! with `w = w_k` when `k < s`, and `w = w_{k-1}` when `k >= s`, so the
//! identity block sits on the left for the first kind and on the right for
//! the second.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use super::{basis_n, integral_basis, newton_polygon, xi, NewtonPolygon};
use crate::error::{Error, Result};
use crate::exact_linalg::{det_rat, inverse, rational_valuation, PAdicVal, RatMatrix};
use crate::poly_core::IntPolynomial;
use crate::recurrence_matrices::is_recurrence;

/// Which segment starts the right-hand identity blocks.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PivotRule {
    /// First slope `>= 0`.
    #[default]
    NonNegative,
    /// First slope `> 0`.
    Positive,
}

impl PivotRule {
    fn pivot(self, np: &NewtonPolygon) -> usize {
        match self {
            PivotRule::NonNegative => np.s,
            PivotRule::Positive => np.s_strict,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BlockInfo {
    /// Segment index, 1-based.
    pub k: usize,
    /// Row range `start..end`, 0-based.
    pub rows: (usize, usize),
    pub b_identity: bool,
    pub c_identity: bool,
    /// `"B"` or `"C"`: the block expected to carry the determinant.
    pub det_block: &'static str,
    pub det_valuation: PAdicVal,
    pub expected_valuation: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Clause {
    pub name: &'static str,
    pub holds: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub clauses: Vec<Clause>,
}

impl Certificate {
    pub fn all_hold(&self) -> bool {
        self.clauses.iter().all(|c| c.holds)
    }

    pub fn failures(&self) -> Vec<&Clause> {
        self.clauses.iter().filter(|c| !c.holds).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CanonicalBasisM {
    pub p: u64,
    pub m: usize,
    pub pivot_rule: PivotRule,
    #[serde(rename = "newton_polygon")]
    pub polygon: NewtonPolygon,
    /// Entries serialize as `"p/q"` strings, row by row.
    #[serde(serialize_with = "super::ser_rat_matrix")]
    pub matrix: RatMatrix,
    pub blocks: Vec<BlockInfo>,
    pub valuations: Vec<Vec<PAdicVal>>,
    pub certificate: Certificate,
}

fn q_matrix(n: &RatMatrix, d: usize, m: usize, w: usize) -> Result<RatMatrix> {
    let rows: Vec<usize> = (0..d).collect();
    let inv = inverse(&n.select(&rows, &xi(d, m, w)))
        .map_err(|_| Error::Inconsistent(format!("N_xi is singular for w = {w}")))?;
    inv.mul(n)
}

pub fn canonical_basis_m(a: &IntPolynomial, p: u64, m: usize, rule: PivotRule) -> Result<CanonicalBasisM> {
    a.require_primitive()?;
    let np = newton_polygon(a, p)?;
    let d = a.degree();
    let n = basis_n(a, m)?;
    let s = rule.pivot(&np);
    let w = np.breakpoints();
    let mut cache: HashMap<usize, RatMatrix> = HashMap::new();
    let mut rows = Vec::with_capacity(d);
    for k in 1..=np.r {
        let wk = if k < s { w[k] } else { w[k - 1] };
        if let std::collections::hash_map::Entry::Vacant(e) = cache.entry(wk) {
            e.insert(q_matrix(&n, d, m, wk)?);
        }
        let q = &cache[&wk];
        rows.extend((w[k - 1]..w[k]).map(|i| q.row(i).to_vec()));
    }
    let matrix = RatMatrix::from_rows(rows, m)?;
    let (blocks, certificate) = analyse(a, &np, s, m, &matrix)?;
    if !certificate.all_hold() {
        let msg: Vec<String> = certificate.failures().iter().map(|c| format!("{}: {}", c.name, c.detail)).collect();
        return Err(Error::Certificate(msg.join("; ")));
    }
    let valuations = valuation_table(&matrix, p);
    Ok(CanonicalBasisM { p, m, pivot_rule: rule, polygon: np, matrix, blocks, valuations, certificate })
}

fn valuation_table(m: &RatMatrix, p: u64) -> Vec<Vec<PAdicVal>> {
    (0..m.rows()).map(|i| m.row(i).iter().map(|x| rational_valuation(x, p)).collect()).collect()
}

/// Checks every clause of the canonical form for an arbitrary candidate
/// matrix; used both after construction and on perturbed matrices.
pub fn verify_canonical(
    a: &IntPolynomial,
    p: u64,
    m: usize,
    rule: PivotRule,
    matrix: &RatMatrix,
) -> Result<Certificate> {
    let np = newton_polygon(a, p)?;
    let s = rule.pivot(&np);
    Ok(analyse(a, &np, s, m, matrix)?.1)
}

fn at_least(v: PAdicVal, bound: &BigRational) -> bool {
    match v {
        PAdicVal::Infinite => true,
        PAdicVal::Finite(x) => BigRational::from_integer(BigInt::from(x)) >= *bound,
    }
}

fn is_identity(mat: &RatMatrix) -> bool {
    *mat == RatMatrix::identity(mat.rows())
}

fn analyse(
    a: &IntPolynomial,
    np: &NewtonPolygon,
    s: usize,
    m: usize,
    mat: &RatMatrix,
) -> Result<(Vec<BlockInfo>, Certificate)> {
    let d = a.degree();
    let p = np.p;
    if mat.rows() != d || mat.cols() != m || m < d {
        return Err(Error::DegreeMismatch(format!("expected a {d} x {m} matrix, got {} x {}", mat.rows(), mat.cols())));
    }
    let ell = (m - d) as i64;
    let w = np.breakpoints();
    let vals = valuation_table(mat, p);
    let mut clauses = Vec::new();

    let bad_rows: Vec<usize> = (0..d).filter(|&i| !is_recurrence(a, mat.row(i))).collect();
    clauses.push(Clause {
        name: "rows_are_recurrences",
        holds: bad_rows.is_empty(),
        detail: format!("rows failing the recurrence: {bad_rows:?}"),
    });

    let mut tri_bad = Vec::new();
    for k in 1..=np.r {
        for i in w[k - 1]..w[k] {
            tri_bad.extend((0..w[k - 1]).filter(|&j| !mat[(i, j)].is_zero()).map(|j| (i, j)));
            tri_bad.extend((w[k]..d).map(|j| m - d + j).filter(|&j| !mat[(i, j)].is_zero()).map(|j| (i, j)));
        }
    }
    clauses.push(Clause {
        name: "block_triangular",
        holds: tri_bad.is_empty(),
        detail: format!("nonzero entries outside the block pattern: {tri_bad:?}"),
    });

    let mut blocks = Vec::new();
    let (mut id_ok, mut det_ok, mut walk_ok) = (true, true, true);
    let mut id_detail = Vec::new();
    let mut det_detail = Vec::new();
    let mut walk_detail = Vec::new();
    for k in 1..=np.r {
        let rows: Vec<usize> = (w[k - 1]..w[k]).collect();
        let left: Vec<usize> = rows.clone();
        let right: Vec<usize> = rows.iter().map(|j| m - d + j).collect();
        let b = mat.select(&rows, &left);
        let c = mat.select(&rows, &right);
        let (b_id, c_id) = (is_identity(&b), is_identity(&c));
        let sigma = &np.slopes[k - 1];
        let sl = sigma * BigInt::from(np.lengths[k - 1] as i64 * ell);
        let sl = sl.to_integer();
        let (det_block, block, expected) = if k < s { ("C", &c, -sl.clone()) } else { ("B", &b, sl.clone()) };
        let expected: i64 = expected.try_into().unwrap_or(i64::MAX);
        let det_valuation = rational_valuation(&det_rat(block), p);
        let identity_ok = if k < s { b_id } else { c_id };
        if !identity_ok {
            id_ok = false;
            id_detail.push(format!("segment {k}: {} block is not the identity", if k < s { "B" } else { "C" }));
        }
        if det_valuation != PAdicVal::Finite(expected) {
            det_ok = false;
            det_detail.push(format!("segment {k}: v_p(det {det_block}) = {det_valuation}, expected {expected}"));
        }
        for &i in &rows {
            if k < s {
                for j in i + 1..m {
                    let bound = -sigma * BigInt::from((j - i) as i64);
                    if !at_least(vals[i][j], &bound) {
                        walk_ok = false;
                        walk_detail.push(format!("row {} col {}: {} < {}", i + 1, j + 1, vals[i][j], bound));
                    }
                }
            } else {
                let diag = i + m - d;
                for j in 0..diag {
                    let bound = sigma * BigInt::from((diag - j) as i64);
                    if !at_least(vals[i][j], &bound) {
                        walk_ok = false;
                        walk_detail.push(format!("row {} col {}: {} < {}", i + 1, j + 1, vals[i][j], bound));
                    }
                }
            }
        }
        blocks.push(BlockInfo {
            k,
            rows: (w[k - 1], w[k]),
            b_identity: b_id,
            c_identity: c_id,
            det_block,
            det_valuation,
            expected_valuation: expected,
        });
    }
    clauses.push(Clause { name: "identity_blocks", holds: id_ok, detail: id_detail.join("; ") });
    clauses.push(Clause { name: "determinant_valuations", holds: det_ok, detail: det_detail.join("; ") });
    clauses.push(Clause { name: "row_walks", holds: walk_ok, detail: walk_detail.join("; ") });

    let neg: Vec<(usize, usize)> = (0..d)
        .flat_map(|i| (0..m).map(move |j| (i, j)))
        .filter(|&(i, j)| vals[i][j] < PAdicVal::Finite(0))
        .collect();
    clauses.push(Clause {
        name: "p_integral",
        holds: neg.is_empty(),
        detail: format!("entries with negative valuation: {neg:?}"),
    });

    let (holds, detail) = zp_basis_check(a, m, mat, p)?;
    clauses.push(Clause { name: "zp_basis", holds, detail });
    Ok((blocks, Certificate { clauses }))
}

/// `M = T Z` for the Z-basis `Z` of `Lambda_m`, with `T` in `GL_d(Z_p)`.
fn zp_basis_check(a: &IntPolynomial, m: usize, mat: &RatMatrix, p: u64) -> Result<(bool, String)> {
    let z = integral_basis(a, m)?.z_basis.to_rational();
    let d = z.rows();
    let pivots: Vec<usize> =
        (0..d).map(|i| (0..m).find(|&j| !z[(i, j)].is_zero()).expect("HNF rows are nonzero")).collect();
    let rows: Vec<usize> = (0..d).collect();
    let t = mat.select(&rows, &pivots).mul(&inverse(&z.select(&rows, &pivots))?)?;
    if t.mul(&z)? != *mat {
        return Ok((false, "rows do not lie in the span of the lattice".into()));
    }
    let integral = (0..d).all(|i| t.row(i).iter().all(|x| rational_valuation(x, p) >= PAdicVal::Finite(0)));
    let unit = rational_valuation(&det_rat(&t), p) == PAdicVal::Finite(0);
    let detail = if integral && unit {
        String::new()
    } else {
        format!("change of basis to the lattice: p-integral {integral}, unit determinant {unit}")
    };
    Ok((integral && unit, detail))
}
