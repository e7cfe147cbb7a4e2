//! Dense matrices and exact linear algebra.
//!
//! Everything here is exact: integer rank via fraction-free (Bareiss)
//! elimination, primitive integer kernel bases via rational reduced row
//! echelon form, rational linear solves, and the division-free Berkowitz
//! characteristic polynomial over any [`Ring`]. A `reference` submodule
//! provides slow, obviously-correct implementations (cofactor determinants,
//! principal-minor sums) used as oracles by the test suites.

use crate::ring::Ring;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// A dense row-major matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mat<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T> Mat<T> {
    /// Number of rows.
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Number of columns.
    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Borrow of entry `(r, c)`.
    pub fn at(&self, r: usize, c: usize) -> &T {
        assert!(r < self.rows && c < self.cols, "index out of range");
        &self.data[r * self.cols + c]
    }

    /// Mutable borrow of entry `(r, c)`.
    pub fn at_mut(&mut self, r: usize, c: usize) -> &mut T {
        assert!(r < self.rows && c < self.cols, "index out of range");
        &mut self.data[r * self.cols + c]
    }

    /// Iterator over one row.
    pub fn row(&self, r: usize) -> impl Iterator<Item = &T> {
        assert!(r < self.rows);
        self.data[r * self.cols..(r + 1) * self.cols].iter()
    }
}

impl<T: Clone> Mat<T> {
    /// Builds from nested rows; all rows must share one length.
    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(nrows * ncols);
        for row in rows {
            assert_eq!(row.len(), ncols, "ragged rows");
            data.extend(row);
        }
        Mat {
            rows: nrows,
            cols: ncols,
            data,
        }
    }

    /// Builds from a generator function.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Mat { rows, cols, data }
    }

    /// Matrix filled with one value.
    pub fn filled(rows: usize, cols: usize, value: T) -> Self {
        Mat {
            rows,
            cols,
            data: vec![value; rows * cols],
        }
    }

    /// Transposed copy.
    pub fn transpose(&self) -> Self {
        Mat::from_fn(self.cols, self.rows, |r, c| self.at(c, r).clone())
    }

    /// Copy of one column.
    pub fn col(&self, c: usize) -> Vec<T> {
        (0..self.rows).map(|r| self.at(r, c).clone()).collect()
    }

    /// Submatrix selected by row and column index lists (in order).
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        Mat::from_fn(rows.len(), cols.len(), |r, c| {
            self.at(rows[r], cols[c]).clone()
        })
    }

    /// Element-wise map.
    pub fn map<U: Clone>(&self, mut f: impl FnMut(&T) -> U) -> Mat<U> {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|t| f(t)).collect(),
        }
    }
}

/// Integer matrix alias used for stoichiometric data.
pub type IMat = Mat<BigInt>;
/// Rational matrix alias.
pub type QMat = Mat<BigRational>;

impl IMat {
    /// Builds an integer matrix from machine integers.
    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        Mat::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
        )
    }

    /// Conversion to rationals.
    pub fn to_rational(&self) -> QMat {
        self.map(|x| BigRational::from_integer(x.clone()))
    }
}

/// Ring-generic matrix product.
pub fn mat_mul<R: Ring>(ring: &R, a: &Mat<R::Elem>, b: &Mat<R::Elem>) -> Mat<R::Elem> {
    assert_eq!(a.cols(), b.rows(), "dimension mismatch in matrix product");
    Mat::from_fn(a.rows(), b.cols(), |r, c| {
        let mut acc = ring.zero();
        for k in 0..a.cols() {
            acc = ring.add(&acc, &ring.mul(a.at(r, k), b.at(k, c)));
        }
        acc
    })
}

/// Ring-generic matrix-vector product.
pub fn mat_vec<R: Ring>(ring: &R, a: &Mat<R::Elem>, v: &[R::Elem]) -> Vec<R::Elem> {
    assert_eq!(a.cols(), v.len(), "dimension mismatch in matrix-vector product");
    (0..a.rows())
        .map(|r| {
            let mut acc = ring.zero();
            for (k, x) in v.iter().enumerate() {
                acc = ring.add(&acc, &ring.mul(a.at(r, k), x));
            }
            acc
        })
        .collect()
}

/// Exact rank of an integer matrix by fraction-free Gaussian elimination.
///
/// Bareiss' single-step method: after each elimination round the working
/// entries stay integral because the previous pivot divides them exactly.
pub fn rank(m: &IMat) -> usize {
    let mut a = m.clone();
    let (nr, nc) = (a.rows(), a.cols());
    let mut prev = BigInt::one();
    let mut r = 0usize; // current elimination row == rank so far
    let mut c = 0usize;
    while r < nr && c < nc {
        // Find a pivot anywhere in the remaining block.
        let mut pivot = None;
        'search: for j in c..nc {
            for i in r..nr {
                if !a.at(i, j).is_zero() {
                    pivot = Some((i, j));
                    break 'search;
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        // Swap pivot into place (row and column swaps leave rank invariant).
        if pi != r {
            for j in 0..nc {
                let tmp = a.at(pi, j).clone();
                *a.at_mut(pi, j) = a.at(r, j).clone();
                *a.at_mut(r, j) = tmp;
            }
        }
        if pj != c {
            for i in 0..nr {
                let tmp = a.at(i, pj).clone();
                *a.at_mut(i, pj) = a.at(i, c).clone();
                *a.at_mut(i, c) = tmp;
            }
        }
        let piv = a.at(r, c).clone();
        for i in (r + 1)..nr {
            for j in (c + 1)..nc {
                let num = a.at(i, j) * &piv - a.at(i, c) * a.at(r, j);
                let (q, rem) = num.div_rem(&prev);
                debug_assert!(rem.is_zero(), "fraction-free elimination lost exactness");
                *a.at_mut(i, j) = q;
            }
            *a.at_mut(i, c) = BigInt::zero();
        }
        prev = piv;
        r += 1;
        c += 1;
    }
    r
}

/// Reduced row echelon form in place; returns the pivot column indices.
pub fn rref(a: &mut QMat) -> Vec<usize> {
    let (nr, nc) = (a.rows(), a.cols());
    let mut pivots = Vec::new();
    let mut row = 0usize;
    for col in 0..nc {
        if row == nr {
            break;
        }
        // Partial pivot: any nonzero entry works over exact rationals; use
        // the largest numerator magnitude to keep entries modest.
        let mut best: Option<usize> = None;
        for i in row..nr {
            if !a.at(i, col).is_zero() {
                let better = match best {
                    None => true,
                    Some(b) => a.at(i, col).numer().magnitude() > a.at(b, col).numer().magnitude(),
                };
                if better {
                    best = Some(i);
                }
            }
        }
        let Some(pr) = best else { continue };
        if pr != row {
            for j in 0..nc {
                let tmp = a.at(pr, j).clone();
                *a.at_mut(pr, j) = a.at(row, j).clone();
                *a.at_mut(row, j) = tmp;
            }
        }
        let inv = a.at(row, col).clone().recip();
        for j in col..nc {
            let v = a.at(row, j) * &inv;
            *a.at_mut(row, j) = v;
        }
        for i in 0..nr {
            if i != row && !a.at(i, col).is_zero() {
                let f = a.at(i, col).clone();
                for j in col..nc {
                    let v = a.at(i, j) - a.at(row, j) * &f;
                    *a.at_mut(i, j) = v;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    pivots
}

/// Primitive integer basis of the right kernel `{x : M·x = 0}`.
///
/// Returns a matrix whose columns are the basis vectors: integral, with
/// content 1 and first nonzero entry positive. One column per free variable
/// of the RREF, in ascending free-column order.
pub fn kernel_basis(m: &IMat) -> IMat {
    let mut a = m.to_rational();
    let pivots = rref(&mut a);
    let nc = m.cols();
    let is_pivot: Vec<bool> = {
        let mut v = vec![false; nc];
        for &p in &pivots {
            v[p] = true;
        }
        v
    };
    let free: Vec<usize> = (0..nc).filter(|&c| !is_pivot[c]).collect();
    let mut cols: Vec<Vec<BigInt>> = Vec::with_capacity(free.len());
    for &f in &free {
        let mut x = vec![BigRational::zero(); nc];
        x[f] = BigRational::one();
        for (prow, &pcol) in pivots.iter().enumerate() {
            // Row `prow` of the RREF reads x[pcol] + Σ_free a[prow][f]·x[f] = 0.
            x[pcol] = -a.at(prow, f).clone();
        }
        cols.push(primitive_integer(&x));
    }
    Mat::from_fn(nc, cols.len(), |r, c| cols[c][r].clone())
}

/// Primitive integer basis of the left kernel `{y : yᵀ·M = 0}`.
pub fn left_kernel_basis(m: &IMat) -> IMat {
    kernel_basis(&m.transpose())
}

/// Scales a rational vector to a primitive integer vector: multiplies by the
/// common denominator, divides by the content, and normalizes the first
/// nonzero entry to be positive.
pub fn primitive_integer(v: &[BigRational]) -> Vec<BigInt> {
    let mut lcm = BigInt::one();
    for q in v {
        lcm = lcm.lcm(q.denom());
    }
    let mut ints: Vec<BigInt> = v.iter().map(|q| q.numer() * (&lcm / q.denom())).collect();
    let mut gcd = BigInt::zero();
    for x in &ints {
        gcd = gcd.gcd(x);
    }
    if !gcd.is_zero() && !gcd.is_one() {
        for x in &mut ints {
            *x = &*x / &gcd;
        }
    }
    if let Some(first) = ints.iter().find(|x| !x.is_zero()) {
        if first.is_negative() {
            for x in &mut ints {
                *x = -x.clone();
            }
        }
    }
    ints
}

/// Solves the square rational system `A·x = b`; `None` when singular.
pub fn solve_square(a: &QMat, b: &[BigRational]) -> Option<Vec<BigRational>> {
    let n = a.rows();
    assert_eq!(a.cols(), n, "solve_square needs a square matrix");
    assert_eq!(b.len(), n, "right-hand side length mismatch");
    let mut aug = Mat::from_fn(n, n + 1, |r, c| {
        if c < n {
            a.at(r, c).clone()
        } else {
            b[r].clone()
        }
    });
    let pivots = rref(&mut aug);
    if pivots.len() < n || pivots.iter().any(|&p| p >= n) {
        return None;
    }
    Some((0..n).map(|r| aug.at(r, n).clone()).collect())
}

/// Characteristic polynomial `det(z·I − A)` by the Berkowitz method.
///
/// Division free, so it works over any commutative [`Ring`] — in this crate:
/// rationals, polynomial rings, and quadratic extensions. Returns the
/// monic coefficient vector `[1, c₁, …, c_n]` in descending powers of `z`.
pub fn berkowitz_charpoly<R: Ring>(ring: &R, a: &Mat<R::Elem>) -> Vec<R::Elem> {
    let n = a.rows();
    assert_eq!(a.cols(), n, "characteristic polynomial needs a square matrix");
    // Coefficients of the leading k×k principal submatrix, built up from the
    // empty matrix whose characteristic polynomial is 1.
    let mut coeffs: Vec<R::Elem> = vec![ring.one()];
    for k in 1..=n {
        // Toeplitz column [1, −a_kk, −R·S, −R·M·S, …] where M is the leading
        // (k−1)×(k−1) block, R the row to its left of entry (k−1, ·) and S
        // the column above entry (·, k−1).
        let mut col: Vec<R::Elem> = Vec::with_capacity(k + 1);
        col.push(ring.one());
        col.push(ring.neg(a.at(k - 1, k - 1)));
        if k >= 2 {
            let m = k - 1;
            let mut w: Vec<R::Elem> = (0..m).map(|i| a.at(i, k - 1).clone()).collect();
            for _ in 0..m {
                // R·w with R the partial row a[k−1][0..m].
                let mut dot = ring.zero();
                for (j, wj) in w.iter().enumerate() {
                    dot = ring.add(&dot, &ring.mul(a.at(k - 1, j), wj));
                }
                col.push(ring.neg(&dot));
                if col.len() == k + 1 {
                    break;
                }
                // w := M·w.
                let mut next = Vec::with_capacity(m);
                for i in 0..m {
                    let mut acc = ring.zero();
                    for (j, wj) in w.iter().enumerate() {
                        acc = ring.add(&acc, &ring.mul(a.at(i, j), wj));
                    }
                    next.push(acc);
                }
                w = next;
            }
        }
        // coeffs := Toeplitz(col) · coeffs.
        let mut next = vec![ring.zero(); k + 1];
        for (i, slot) in next.iter_mut().enumerate() {
            for (j, old) in coeffs.iter().enumerate() {
                if i >= j && i - j < col.len() {
                    *slot = ring.add(slot, &ring.mul(&col[i - j], old));
                }
            }
        }
        coeffs = next;
    }
    coeffs
}

/// Slow, transparent reference implementations used as test oracles.
pub mod reference {
    use super::*;

    /// Determinant by cofactor expansion along the first row.
    pub fn det_cofactor<R: Ring>(ring: &R, a: &Mat<R::Elem>) -> R::Elem {
        let n = a.rows();
        assert_eq!(a.cols(), n);
        if n == 0 {
            return ring.one();
        }
        if n == 1 {
            return a.at(0, 0).clone();
        }
        let mut acc = ring.zero();
        let all_rows: Vec<usize> = (1..n).collect();
        for j in 0..n {
            if ring.is_zero(a.at(0, j)) {
                continue;
            }
            let cols: Vec<usize> = (0..n).filter(|&c| c != j).collect();
            let minor = a.submatrix(&all_rows, &cols);
            let sub = det_cofactor(ring, &minor);
            let signed = if j % 2 == 0 {
                ring.mul(a.at(0, j), &sub)
            } else {
                ring.neg(&ring.mul(a.at(0, j), &sub))
            };
            acc = ring.add(&acc, &signed);
        }
        acc
    }

    /// Characteristic polynomial via signed sums of principal minors:
    /// the coefficient of `z^{n−k}` is `(−1)^k · Σ (k×k principal minors)`.
    ///
    /// Exponential in `n`; for oracle use on small matrices only.
    pub fn charpoly_minor_sums<R: Ring>(ring: &R, a: &Mat<R::Elem>) -> Vec<R::Elem> {
        let n = a.rows();
        assert_eq!(a.cols(), n);
        let mut out = Vec::with_capacity(n + 1);
        out.push(ring.one());
        for k in 1..=n {
            let mut sum = ring.zero();
            for combo in combinations(n, k) {
                let minor = a.submatrix(&combo, &combo);
                sum = ring.add(&sum, &det_cofactor(ring, &minor));
            }
            if k % 2 == 1 {
                sum = ring.neg(&sum);
            }
            out.push(sum);
        }
        out
    }

    /// All `k`-element ascending index combinations of `0..n`.
    pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut current = Vec::with_capacity(k);
        fn rec(start: usize, n: usize, k: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if current.len() == k {
                out.push(current.clone());
                return;
            }
            let needed = k - current.len();
            for i in start..=(n - needed) {
                current.push(i);
                rec(i + 1, n, k, current, out);
                current.pop();
            }
        }
        if k <= n {
            rec(0, n, k, &mut current, &mut out);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::RationalRing;

    fn qm(rows: &[&[i64]]) -> QMat {
        IMat::from_i64_rows(rows).to_rational()
    }

    #[test]
    fn rank_of_known_matrices() {
        assert_eq!(rank(&IMat::from_i64_rows(&[&[1, 2], &[2, 4]])), 1);
        assert_eq!(rank(&IMat::from_i64_rows(&[&[1, 0], &[0, 1]])), 2);
        assert_eq!(rank(&IMat::from_i64_rows(&[&[0, 0], &[0, 0]])), 0);
        // 3×4 with rank 2: third row = first + second.
        let m = IMat::from_i64_rows(&[&[1, 2, 3, 4], &[0, 1, 1, 0], &[1, 3, 4, 4]]);
        assert_eq!(rank(&m), 2);
    }

    #[test]
    fn kernel_annihilates_and_is_primitive() {
        let m = IMat::from_i64_rows(&[&[1, 2, 3], &[2, 4, 6]]);
        let k = kernel_basis(&m);
        assert_eq!(k.rows(), 3);
        assert_eq!(k.cols(), 2);
        let r = RationalRing;
        let prod = mat_mul(&r, &m.to_rational(), &k.to_rational());
        for i in 0..prod.rows() {
            for j in 0..prod.cols() {
                assert!(prod.at(i, j).is_zero());
            }
        }
        for c in 0..k.cols() {
            let col = k.col(c);
            let mut gcd = BigInt::zero();
            for x in &col {
                gcd = gcd.gcd(x);
            }
            assert!(gcd.is_one(), "kernel column {c} is not primitive");
            let first = col.iter().find(|x| !x.is_zero()).unwrap();
            assert!(first.is_positive());
        }
    }

    #[test]
    fn solve_square_known_system() {
        let a = qm(&[&[2, 1], &[1, 3]]);
        let b = [
            BigRational::from_integer(5.into()),
            BigRational::from_integer(10.into()),
        ];
        let x = solve_square(&a, &b).unwrap();
        assert_eq!(x[0], BigRational::from_integer(1.into()));
        assert_eq!(x[1], BigRational::from_integer(3.into()));
        let singular = qm(&[&[1, 2], &[2, 4]]);
        assert!(solve_square(&singular, &b).is_none());
    }

    #[test]
    fn berkowitz_matches_minor_sums_small() {
        let r = RationalRing;
        let cases: Vec<QMat> = vec![
            qm(&[&[7]]),
            qm(&[&[1, 2], &[3, 4]]),
            qm(&[&[0, 1, 0], &[0, 0, 1], &[-6, -11, -6]]),
            qm(&[&[2, -1, 0, 3], &[1, 1, 1, 1], &[0, 5, -2, 0], &[1, 0, 0, 4]]),
        ];
        for a in cases {
            let fast = berkowitz_charpoly(&r, &a);
            let slow = reference::charpoly_minor_sums(&r, &a);
            assert_eq!(fast, slow);
        }
    }

    #[test]
    fn berkowitz_companion_matrix() {
        // Companion matrix of z³ + 2z² + 3z + 4.
        let r = RationalRing;
        let a = qm(&[&[0, 0, -4], &[1, 0, -3], &[0, 1, -2]]);
        let cp = berkowitz_charpoly(&r, &a);
        let expect: Vec<BigRational> = [1, 2, 3, 4]
            .iter()
            .map(|&x| BigRational::from_integer(BigInt::from(x)))
            .collect();
        assert_eq!(cp, expect);
    }

    #[test]
    fn cofactor_det_known() {
        let r = RationalRing;
        let a = qm(&[&[1, 2], &[3, 4]]);
        assert_eq!(
            reference::det_cofactor(&r, &a),
            BigRational::from_integer((-2).into())
        );
        let id = qm(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
        assert_eq!(
            reference::det_cofactor(&r, &id),
            BigRational::from_integer(1.into())
        );
    }

    #[test]
    fn combinations_count() {
        assert_eq!(reference::combinations(5, 2).len(), 10);
        assert_eq!(reference::combinations(4, 4).len(), 1);
        assert_eq!(reference::combinations(3, 0).len(), 1);
    }

    #[test]
    fn primitive_integer_normalizes() {
        let v = [
            BigRational::new(BigInt::from(-2), BigInt::from(3)),
            BigRational::new(BigInt::from(4), BigInt::from(3)),
        ];
        assert_eq!(
            primitive_integer(&v),
            vec![BigInt::from(1), BigInt::from(-2)]
        );
    }
}
