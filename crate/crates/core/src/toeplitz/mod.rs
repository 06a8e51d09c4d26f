//! Gram determinants, banded Toeplitz determinants and the ratios that
//! relate them to recurrence lattices.
//!
//! The Toeplitz matrix of `C(x) = sum_{j=-r}^{s} c_j x^j` of order `n + 1`
//! has entry `(j, k) = c_{k-j}`, `0 <= j, k <= n`. With this convention the
//! Gram matrix of the rows of `[B]_l` is the Toeplitz matrix of
//! `B(x) B(1/x)` of order `l`.

mod trench;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact_linalg::{det_int, det_rat, fmt_rational, parse_rational, IntMatrix, RatMatrix};
use crate::poly_core::{mahler_measure, IntPolynomial, MahlerVariant};
use crate::recurrence_matrices::band_matrix;

pub use trench::{trench_det, TrenchData};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentSymbol {
    r: usize,
    /// `c_{-r}, ..., c_s`.
    coeffs: Vec<BigRational>,
}

impl LaurentSymbol {
    /// `coeffs` lists `c_{-r}..c_s`; both ends must be nonzero.
    pub fn new(r: usize, coeffs: Vec<BigRational>) -> Result<Self> {
        if coeffs.len() <= r {
            return Err(Error::InvalidArgument(format!("{} coefficients cannot start at x^-{r}", coeffs.len())));
        }
        if coeffs[0].is_zero() || coeffs.last().is_some_and(Zero::is_zero) {
            return Err(Error::InvalidArgument("extreme coefficients of a Laurent symbol must be nonzero".into()));
        }
        Ok(LaurentSymbol { r, coeffs })
    }

    pub fn from_i64(r: usize, coeffs: &[i64]) -> Result<Self> {
        Self::new(r, coeffs.iter().map(|&c| BigRational::from_integer(BigInt::from(c))).collect())
    }

    /// Comma-separated `c_{-r},...,c_s`, entries integers or fractions.
    pub fn parse(text: &str, r: usize) -> Result<Self> {
        let coeffs = text.split(',').map(|t| parse_rational(t.trim())).collect::<Result<Vec<_>>>()?;
        Self::new(r, coeffs)
    }

    /// `B(x) B(1/x)`, a Hermitian symbol with `r = s = deg B`.
    pub fn from_product(b: &IntPolynomial) -> Self {
        let t = b.degree();
        let coeffs = (-(t as i64)..=t as i64)
            .map(|j| {
                let s: BigInt = (0..=t as i64).map(|i| b.coeff_signed(i) * b.coeff_signed(i + j)).sum();
                BigRational::from_integer(s)
            })
            .collect();
        LaurentSymbol { r: t, coeffs }
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn s(&self) -> usize {
        self.coeffs.len() - 1 - self.r
    }

    /// `c_j`, zero outside the band.
    pub fn coeff(&self, j: i64) -> BigRational {
        let idx = j + self.r as i64;
        if idx < 0 {
            return BigRational::zero();
        }
        self.coeffs.get(idx as usize).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_hermitian(&self) -> bool {
        self.r == self.s() && (1..=self.r as i64).all(|j| self.coeff(j) == self.coeff(-j))
    }
}

impl std::fmt::Display for LaurentSymbol {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| format!("({})x^{}", fmt_rational(c), i as i64 - self.r as i64))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// The `(n+1) x (n+1)` matrix `(c_{k-j})`.
pub fn toeplitz_matrix(c: &LaurentSymbol, n: usize) -> RatMatrix {
    let mut t = RatMatrix::zeros(n + 1, n + 1);
    for j in 0..=n {
        for k in 0..=n {
            t[(j, k)] = c.coeff(k as i64 - j as i64);
        }
    }
    t
}

/// `D_n`, the determinant of [`toeplitz_matrix`], computed exactly.
pub fn toeplitz_det_direct(c: &LaurentSymbol, n: usize) -> BigRational {
    det_rat(&toeplitz_matrix(c, n))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GramResult {
    #[serde(serialize_with = "ser_rational")]
    pub determinant: BigRational,
    pub count: usize,
}

fn ser_rational<S: serde::Serializer>(v: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&fmt_rational(v))
}

fn dot(u: &[BigRational], v: &[BigRational]) -> BigRational {
    u.iter().zip(v).fold(BigRational::zero(), |s, (a, b)| s + a * b)
}

pub fn gram_matrix(vectors: &[Vec<BigRational>]) -> Result<RatMatrix> {
    let k = vectors.len();
    if let Some(first) = vectors.first() {
        if vectors.iter().any(|v| v.len() != first.len()) {
            return Err(Error::DegreeMismatch("Gram vectors must have equal lengths".into()));
        }
    }
    let mut g = RatMatrix::zeros(k, k);
    for i in 0..k {
        for j in i..k {
            let x = dot(&vectors[i], &vectors[j]);
            g[(j, i)] = x.clone();
            g[(i, j)] = x;
        }
    }
    Ok(g)
}

/// `det (<u_i, u_j>)`, exact. The empty family has determinant 1.
pub fn gram_det(vectors: &[Vec<BigRational>]) -> Result<GramResult> {
    Ok(GramResult { determinant: det_rat(&gram_matrix(vectors)?), count: vectors.len() })
}

fn int_gram_det(rows: &[Vec<BigInt>]) -> BigInt {
    let k = rows.len();
    let mut g = IntMatrix::zeros(k, k);
    for i in 0..k {
        for j in i..k {
            let x: BigInt = rows[i].iter().zip(&rows[j]).map(|(a, b)| a * b).sum();
            g[(j, i)] = x.clone();
            g[(i, j)] = x;
        }
    }
    det_int(&g)
}

/// `det G(e_{s_1}, ..., e_{s_q}, B_1, ..., B_l) / det G(B_1, ..., B_l)` with
/// `B = A / a_d`, `B_i` the rows of `[B]_l` and `S` a set of 1-based indices
/// at most `d`. The ratio is unchanged by scaling `B`, so the integer rows
/// of `[A]_l` are used.
pub fn lyons_ratio(a: &IntPolynomial, set: &[usize], ell: usize) -> Result<BigRational> {
    let d = a.degree();
    if let Some(&bad) = set.iter().find(|&&s| s == 0 || s > d) {
        return Err(Error::InvalidArgument(format!("index {bad} outside 1..={d}")));
    }
    let mut sorted = set.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let band = band_matrix(a, ell)?.matrix;
    let m = band.cols();
    let b_rows = band.to_rows();
    let mut rows: Vec<Vec<BigInt>> = sorted
        .iter()
        .map(|&s| (0..m).map(|j| if j + 1 == s { BigInt::one() } else { BigInt::zero() }).collect())
        .collect();
    rows.extend(b_rows.iter().cloned());
    let den = int_gram_det(&b_rows);
    if den.is_zero() {
        return Err(Error::Singular);
    }
    Ok(BigRational::new(int_gram_det(&rows), den))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LyonsPoint {
    pub ell: usize,
    pub ratio: f64,
}

/// `lyons_ratio` for `l = 1..=ell_max`.
pub fn lyons_sweep(a: &IntPolynomial, set: &[usize], ell_max: usize) -> Result<Vec<LyonsPoint>> {
    (1..=ell_max)
        .map(|ell| Ok(LyonsPoint { ell, ratio: lyons_ratio(a, set, ell)?.to_f64().unwrap_or(f64::NAN) }))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthPoint {
    pub ell: usize,
    /// `D_l / D_{l-1}` for the symbol `B(x) B(1/x)`.
    pub ratio: f64,
    /// `|ratio - M(B)^2| / M(B)^2`.
    pub relative_gap: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthReport {
    pub mahler_squared: f64,
    pub points: Vec<GrowthPoint>,
}

/// Successive ratios of `D_l = det G(B_1, ..., B_{l+1})`, which approach
/// `M(B)^2` when no root of `B` lies on the unit circle.
pub fn gram_growth(b: &IntPolynomial, ell_max: usize) -> Result<GrowthReport> {
    let mm = mahler_measure(b, MahlerVariant::Plain)?.value;
    let m2 = mm * mm;
    let mut prev = int_gram_det(&band_matrix(b, 1)?.matrix.to_rows());
    let mut points = Vec::with_capacity(ell_max);
    for ell in 1..=ell_max {
        let cur = int_gram_det(&band_matrix(b, ell + 1)?.matrix.to_rows());
        let ratio = BigRational::new(cur.clone(), prev.clone()).to_f64().unwrap_or(f64::NAN);
        points.push(GrowthPoint { ell, ratio, relative_gap: (ratio - m2).abs() / m2 });
        prev = cur;
    }
    Ok(GrowthReport { mahler_squared: m2, points })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BiorthonormalReport {
    /// `G(u) G(v) = I`.
    pub gram_product_identity: bool,
    /// `det G(u) = 1`, in which case the complementary minors coincide.
    pub unit_volume: bool,
    /// For `k = 1..n-1`: `det G(u_1..u_k) = det G(u) det G(v_{k+1}..v_n)`.
    pub complementary_minors: Vec<bool>,
}

impl BiorthonormalReport {
    pub fn all_hold(&self) -> bool {
        self.gram_product_identity && self.complementary_minors.iter().all(|&b| b)
    }
}

/// Verifies the Gram identities for a biorthonormal pair given as rows.
pub fn biorthonormal_check(u: &RatMatrix, v: &RatMatrix) -> Result<BiorthonormalReport> {
    let n = u.rows();
    if u.cols() != n || v.rows() != n || v.cols() != n {
        return Err(Error::DegreeMismatch("both families must be n vectors in R^n".into()));
    }
    if u.mul(&v.transpose())? != RatMatrix::identity(n) {
        return Err(Error::InvalidArgument("the families are not biorthonormal".into()));
    }
    let (ur, vr) = (u.to_rows(), v.to_rows());
    let gu = gram_matrix(&ur)?;
    let gv = gram_matrix(&vr)?;
    let det_u = det_rat(&gu);
    let complementary_minors = (1..n)
        .map(|k| Ok(gram_det(&ur[..k])?.determinant == &det_u * gram_det(&vr[k..])?.determinant))
        .collect::<Result<Vec<_>>>()?;
    Ok(BiorthonormalReport {
        gram_product_identity: gu.mul(&gv)? == RatMatrix::identity(n),
        unit_volume: det_u.is_one(),
        complementary_minors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_linalg::{inverse, rat};
    use crate::recurrence_matrices::tri_matrix;

    fn p(c: &[i64]) -> IntPolynomial {
        IntPolynomial::from_i64(c).unwrap()
    }

    fn sym(r: usize, c: &[i64]) -> LaurentSymbol {
        LaurentSymbol::new(r, c.iter().map(|&x| rat(x, 1)).collect()).unwrap()
    }

    #[test]
    fn direct_examples() {
        let c = sym(1, &[-2, 5, -2]);
        assert_eq!(toeplitz_det_direct(&c, 1), rat(21, 1));
        assert_eq!(toeplitz_det_direct(&c, 2), rat(85, 1));
        let one = sym(0, &[1]);
        for n in 0..5 {
            assert_eq!(toeplitz_det_direct(&one, n), rat(1, 1));
        }
        assert_eq!(LaurentSymbol::from_product(&p(&[-2, 1])), c);
    }

    #[test]
    fn index_convention_is_pinned_by_gram() {
        // non-symmetric symbol: entry (0, 1) must be c_1
        let c = sym(1, &[7, 2, 3]);
        let t = toeplitz_matrix(&c, 1);
        assert_eq!((t[(0, 1)].clone(), t[(1, 0)].clone()), (rat(3, 1), rat(7, 1)));
    }

    #[test]
    fn gram_examples() {
        let e1 = vec![rat(1, 1), rat(0, 1), rat(0, 1)];
        let e2 = vec![rat(0, 1), rat(1, 1), rat(0, 1)];
        assert_eq!(gram_det(&[e1, e2]).unwrap().determinant, rat(1, 1));
        let v = vec![rat(1, 1), rat(2, 1), rat(4, 1)];
        assert_eq!(gram_det(&[v]).unwrap().determinant, rat(21, 1));
        let rows = band_matrix(&p(&[-2, 1]), 2).unwrap().matrix.to_rational().to_rows();
        let g = gram_det(&rows).unwrap().determinant;
        assert_eq!(g, rat(21, 1));
        assert_eq!(g, toeplitz_det_direct(&LaurentSymbol::from_product(&p(&[-2, 1])), 1));
    }

    #[test]
    fn lyons_examples() {
        let a = p(&[-2, 1]);
        assert_eq!(lyons_ratio(&a, &[], 3).unwrap(), rat(1, 1));
        assert_eq!(lyons_ratio(&a, &[1], 1).unwrap(), rat(1, 5));
        assert_eq!(lyons_ratio(&a, &[1], 2).unwrap(), rat(1, 21));
        assert!(lyons_ratio(&a, &[2], 2).is_err());
    }

    #[test]
    fn growth_for_doubling() {
        let g = gram_growth(&p(&[-2, 1]), 10).unwrap();
        for pt in &g.points {
            let l = pt.ell as i32;
            let expect = (4f64.powi(l + 2) - 1.0) / (4f64.powi(l + 1) - 1.0);
            assert!((pt.ratio - expect).abs() < 1e-12);
        }
        assert!((g.mahler_squared - 4.0).abs() < 1e-12);
    }

    #[test]
    fn biorthonormal_examples() {
        let id = RatMatrix::identity(3);
        assert!(biorthonormal_check(&id, &id).unwrap().all_hold());
        let u = tri_matrix(&p(&[-2, 1]), 3).unwrap().matrix.to_rational();
        let v = inverse(&u).unwrap().transpose();
        let rep = biorthonormal_check(&u, &v).unwrap();
        assert!(rep.all_hold() && rep.unit_volume);
        let w = RatMatrix::from_rows(vec![vec![rat(2, 1), rat(0, 1)], vec![rat(0, 1), rat(1, 1)]], 2).unwrap();
        assert!(biorthonormal_check(&w, &w).is_err());
    }

    #[test]
    fn growth_off_the_circle() {
        for c in [&[-1i64, -1, 1][..], &[3, 0, -7, 2], &[1, 5, 1]] {
            let g = gram_growth(&p(c), 30).unwrap();
            assert!(g.points.last().unwrap().relative_gap < 0.01, "{c:?}");
        }
    }

    #[test]
    fn lyons_settles() {
        let a = p(&[-1, -1, 1]);
        for set in [[1], [2]] {
            let pts: Vec<f64> = (30..=40).map(|l| lyons_ratio(&a, &set, l).unwrap().to_f64().unwrap()).collect();
            let lo = pts.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = pts.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            assert!(hi - lo < 1e-4);
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn small_poly() -> impl Strategy<Value = IntPolynomial> {
            (1usize..=3)
                .prop_flat_map(|d| proptest::collection::vec(-5i64..=5, d + 1))
                .prop_filter_map("degenerate", |mut c| {
                    if c[0] == 0 {
                        c[0] = 1;
                    }
                    let last = c.len() - 1;
                    if c[last] == 0 {
                        c[last] = 1;
                    }
                    IntPolynomial::from_i64(&c).ok()
                })
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(24))]

            #[test]
            fn gram_toeplitz_bridge(b in small_poly(), ell in 1usize..=8) {
                let rows = band_matrix(&b, ell).unwrap().matrix.to_rational().to_rows();
                let g = gram_det(&rows).unwrap().determinant;
                prop_assert_eq!(g, toeplitz_det_direct(&LaurentSymbol::from_product(&b), ell - 1));
            }

            #[test]
            fn gram_is_nonnegative(v in proptest::collection::vec(proptest::collection::vec(-6i64..=6, 4), 1..=5)) {
                let vs: Vec<Vec<BigRational>> = v.iter().map(|r| r.iter().map(|&x| rat(x, 1)).collect()).collect();
                prop_assert!(gram_det(&vs).unwrap().determinant >= BigRational::zero());
            }

            #[test]
            fn trench_matches_direct(b in small_poly(), n in 1usize..=10) {
                let c = LaurentSymbol::from_product(&b);
                let t = trench_det(&c, n).unwrap();
                let d = toeplitz_det_direct(&c, n - 1);
                match &t.exact {
                    Some(e) => prop_assert_eq!(e.clone(), fmt_rational(&d)),
                    None => {
                        let d = d.to_f64().unwrap();
                        prop_assert!((t.value - d).abs() <= 1e-8 * d.abs(), "{} vs {}", t.value, d);
                    }
                }
            }
        }
    }
}
