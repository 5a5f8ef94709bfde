//! Exact integer and rational linear algebra.
//!
//! Everything here works over arbitrary-precision integers. Kernels are
//! computed over Q and then cleared to primitive integer vectors; the Smith
//! form is computed by elimination with a minimal-magnitude pivot.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Dense row-major integer matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<BigInt>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::domain(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(IntMatrix { rows, cols, data })
    }

    /// Build from rows of machine integers. Panics on ragged input.
    pub fn from_rows<T: Into<BigInt> + Copy>(rows: &[Vec<T>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix rows");
        IntMatrix {
            rows: r,
            cols: c,
            data: rows.iter().flatten().map(|&x| x.into()).collect(),
        }
    }

    /// Build from integer row vectors; `cols` fixes the width when `rows` is empty.
    pub fn from_big_rows(rows: &[Vec<BigInt>], cols: usize) -> Result<Self> {
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::domain(format!(
                "row of length {} in a matrix of width {cols}",
                bad.len()
            )));
        }
        Ok(IntMatrix {
            rows: rows.len(),
            cols,
            data: rows.iter().flatten().cloned().collect(),
        })
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = IntMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != other.rows {
            return Err(Error::domain(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * &other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    /// Row vector times matrix.
    pub fn left_apply(&self, v: &[BigInt]) -> Result<Vec<BigInt>> {
        if v.len() != self.rows {
            return Err(Error::domain(format!(
                "vector of length {} against a matrix with {} rows",
                v.len(),
                self.rows
            )));
        }
        let mut out = vec![BigInt::zero(); self.cols];
        for (i, vi) in v.iter().enumerate() {
            if vi.is_zero() {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                *o += vi * &self[(i, j)];
            }
        }
        Ok(out)
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Invariant factors d₁ | d₂ | … | d_k, k = min(rows, cols); zeros trail.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmithForm {
    pub invariant_factors: Vec<BigInt>,
}

impl SmithForm {
    /// Factors different from 1: the cyclic decomposition of the cokernel's torsion.
    pub fn nontrivial(&self) -> Vec<BigInt> {
        self.invariant_factors
            .iter()
            .filter(|d| !d.is_one())
            .cloned()
            .collect()
    }

    /// Product of the nonzero factors.
    pub fn torsion_order(&self) -> BigInt {
        self.invariant_factors
            .iter()
            .filter(|d| !d.is_zero())
            .product()
    }

    pub fn is_divisibility_chain(&self) -> bool {
        let f = &self.invariant_factors;
        let zeros_trail = f
            .iter()
            .skip_while(|d| !d.is_zero())
            .all(|d| d.is_zero());
        zeros_trail
            && f.windows(2)
                .all(|w| w[1].is_zero() || (!w[0].is_zero() && (&w[1] % &w[0]).is_zero()))
    }
}

/// Smith invariant factors by fraction-free elimination.
///
/// Each round takes the nonzero entry of least magnitude in the active
/// block as pivot (ties: lowest row, then lowest column), clears its row and
/// column by Euclidean steps, and folds in any row whose entries the pivot
/// fails to divide.
pub fn smith_invariants(m: &IntMatrix) -> SmithForm {
    let mut a = m.clone();
    let (rows, cols) = (a.rows, a.cols);
    let k_max = rows.min(cols);
    let mut factors = Vec::with_capacity(k_max);

    for k in 0..k_max {
        loop {
            let Some((pi, pj)) = min_pivot(&a, k) else {
                factors.resize(k_max, BigInt::zero());
                return SmithForm {
                    invariant_factors: factors,
                };
            };
            swap_rows(&mut a, k, pi);
            swap_cols(&mut a, k, pj);

            let mut dirty = false;
            for i in k + 1..rows {
                if a[(i, k)].is_zero() {
                    continue;
                }
                let q = &a[(i, k)] / &a[(k, k)];
                row_sub(&mut a, i, k, &q);
                dirty |= !a[(i, k)].is_zero();
            }
            for j in k + 1..cols {
                if a[(k, j)].is_zero() {
                    continue;
                }
                let q = &a[(k, j)] / &a[(k, k)];
                col_sub(&mut a, j, k, &q);
                dirty |= !a[(k, j)].is_zero();
            }
            if dirty {
                continue;
            }
            // Row and column are clear; enforce the divisibility chain.
            let pivot = a[(k, k)].clone();
            let offender = (k + 1..rows)
                .find(|&i| (k + 1..cols).any(|j| !(&a[(i, j)] % &pivot).is_zero()));
            match offender {
                Some(i) => row_add(&mut a, k, i),
                None => break,
            }
        }
        factors.push(a[(k, k)].abs());
    }
    SmithForm {
        invariant_factors: factors,
    }
}

fn min_pivot(a: &IntMatrix, k: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize, BigInt)> = None;
    for i in k..a.rows {
        for j in k..a.cols {
            let v = &a[(i, j)];
            if v.is_zero() {
                continue;
            }
            let mag = v.abs();
            if best.as_ref().is_none_or(|(_, _, b)| mag < *b) {
                best = Some((i, j, mag));
            }
        }
    }
    best.map(|(i, j, _)| (i, j))
}

fn swap_rows(a: &mut IntMatrix, i: usize, j: usize) {
    if i != j {
        for c in 0..a.cols {
            a.data.swap(i * a.cols + c, j * a.cols + c);
        }
    }
}

fn swap_cols(a: &mut IntMatrix, i: usize, j: usize) {
    if i != j {
        for r in 0..a.rows {
            a.data.swap(r * a.cols + i, r * a.cols + j);
        }
    }
}

// row_i -= q * row_k
fn row_sub(a: &mut IntMatrix, i: usize, k: usize, q: &BigInt) {
    for c in 0..a.cols {
        let t = q * &a[(k, c)];
        a[(i, c)] -= t;
    }
}

// row_k += row_i
fn row_add(a: &mut IntMatrix, k: usize, i: usize) {
    for c in 0..a.cols {
        let t = a[(i, c)].clone();
        a[(k, c)] += t;
    }
}

// col_j -= q * col_k
fn col_sub(a: &mut IntMatrix, j: usize, k: usize, q: &BigInt) {
    for r in 0..a.rows {
        let t = q * &a[(r, k)];
        a[(r, j)] -= t;
    }
}

/// Nonnegative gcd; 0 for an empty or all-zero list.
pub fn gcd_list(xs: &[BigInt]) -> BigInt {
    xs.iter().fold(BigInt::zero(), |g, x| g.gcd(x))
}

/// Divide out the content and make the first nonzero entry positive.
pub fn primitive_scale(v: &[BigInt]) -> Result<Vec<BigInt>> {
    let g = gcd_list(v);
    if g.is_zero() {
        return Err(Error::domain("cannot normalize the zero vector"));
    }
    let first = v.iter().find(|x| !x.is_zero()).expect("nonzero content");
    let g = if first.is_negative() { -g } else { g };
    Ok(v.iter().map(|x| x / &g).collect())
}

/// Reduced row echelon form over Q; returns the matrix and its pivot columns.
fn rref(m: &IntMatrix) -> (Vec<Vec<BigRational>>, Vec<usize>) {
    let mut a: Vec<Vec<BigRational>> = (0..m.rows)
        .map(|i| {
            m.row(i)
                .iter()
                .map(|x| BigRational::from_integer(x.clone()))
                .collect()
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..m.cols {
        if r == m.rows {
            break;
        }
        let Some(pr) = (r..m.rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, pr);
        let inv = a[r][c].recip();
        for x in a[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..m.rows {
            if i == r || a[i][c].is_zero() {
                continue;
            }
            let f = a[i][c].clone();
            let pivot_row = a[r][c..].to_vec();
            for (x, y) in a[i][c..].iter_mut().zip(&pivot_row) {
                *x -= &f * y;
            }
        }
        pivots.push(c);
        r += 1;
    }
    (a, pivots)
}

/// Basis of {x ∈ Q^cols : m·x = 0}, as primitive integer vectors.
///
/// One vector per free column of the reduced echelon form, in increasing
/// free-column order.
pub fn rational_kernel(m: &IntMatrix) -> Vec<Vec<BigInt>> {
    let (a, pivots) = rref(m);
    let free = (0..m.cols).filter(|c| !pivots.contains(c));
    free.map(|f| {
        let mut v = vec![BigRational::zero(); m.cols];
        v[f] = BigRational::one();
        for (r, &pc) in pivots.iter().enumerate() {
            v[pc] = -a[r][f].clone();
        }
        let denom = v
            .iter()
            .fold(BigInt::one(), |l, x| l.lcm(x.denom()));
        let ints: Vec<BigInt> = v
            .iter()
            .map(|x| x.numer() * (&denom / x.denom()))
            .collect();
        primitive_scale(&ints).expect("kernel vector has a unit entry")
    })
    .collect()
}

/// Rank over Q.
pub fn rank(m: &IntMatrix) -> usize {
    rref(m).1.len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn big(xs: &[i64]) -> Vec<BigInt> {
        xs.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn snf(rows: &[Vec<i64>]) -> Vec<BigInt> {
        smith_invariants(&IntMatrix::from_rows(rows)).invariant_factors
    }

    // Cofactor expansion, independent of the elimination code.
    fn det_cofactor(m: &[Vec<i64>]) -> BigInt {
        let n = m.len();
        if n == 0 {
            return BigInt::one();
        }
        (0..n)
            .map(|j| {
                let minor: Vec<Vec<i64>> = m[1..]
                    .iter()
                    .map(|r| {
                        r.iter()
                            .enumerate()
                            .filter(|&(c, _)| c != j)
                            .map(|(_, &x)| x)
                            .collect()
                    })
                    .collect();
                let s = if j % 2 == 0 { 1 } else { -1 };
                BigInt::from(s * m[0][j]) * det_cofactor(&minor)
            })
            .sum()
    }

    #[test]
    fn smith_fixtures() {
        assert_eq!(snf(&[vec![5]]), big(&[5]));
        assert_eq!(snf(&[vec![2, 1], vec![1, 2]]), big(&[1, 3]));
        assert_eq!(
            snf(&[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]),
            big(&[1, 1, 1])
        );
    }

    #[test]
    fn smith_enforces_divisibility() {
        // diag(2, 3) has invariant factors (1, 6), not (2, 3).
        assert_eq!(snf(&[vec![2, 0], vec![0, 3]]), big(&[1, 6]));
        assert_eq!(snf(&[vec![4, 0], vec![0, 6]]), big(&[2, 12]));
    }

    #[test]
    fn smith_rank_deficient_and_rectangular() {
        assert_eq!(snf(&[vec![2, 4], vec![1, 2]]), big(&[1, 0]));
        assert_eq!(snf(&[vec![2, 4, 6]]), big(&[2]));
        assert_eq!(snf(&[vec![0, 0], vec![0, 0], vec![0, 0]]), big(&[0, 0]));
        let empty = smith_invariants(&IntMatrix::zeros(0, 0));
        assert!(empty.invariant_factors.is_empty());
        assert!(empty.torsion_order().is_one());
    }

    #[test]
    fn kernel_fixtures() {
        assert_eq!(
            rational_kernel(&IntMatrix::from_rows(&[vec![1, 1]])),
            vec![big(&[1, -1])]
        );
        assert_eq!(
            rational_kernel(&IntMatrix::from_rows(&[vec![3, 2], vec![3, 2]])),
            vec![big(&[2, -3])]
        );
        assert!(rational_kernel(&IntMatrix::identity(3)).is_empty());
    }

    #[test]
    fn kernel_of_zero_columns_matrix() {
        let k = rational_kernel(&IntMatrix::zeros(0, 2));
        assert_eq!(k, vec![big(&[1, 0]), big(&[0, 1])]);
    }

    #[test]
    fn primitive_scale_fixtures() {
        assert_eq!(primitive_scale(&big(&[6, -10, 4])).unwrap(), big(&[3, -5, 2]));
        assert_eq!(primitive_scale(&big(&[-1, 1])).unwrap(), big(&[1, -1]));
        assert_eq!(primitive_scale(&big(&[5])).unwrap(), big(&[1]));
        assert!(primitive_scale(&big(&[0, 0])).is_err());
    }

    #[test]
    fn gcd_list_fixtures() {
        assert_eq!(gcd_list(&big(&[1, -1])), BigInt::from(1));
        assert_eq!(gcd_list(&big(&[6, -10, 4])), BigInt::from(2));
        assert_eq!(gcd_list(&[]), BigInt::zero());
        assert_eq!(gcd_list(&big(&[0, 0])), BigInt::zero());
    }

    fn small_matrix(max_n: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
        (1..=max_n).prop_flat_map(|n| {
            prop::collection::vec(prop::collection::vec(-9i64..=9, n), n)
        })
    }

    proptest! {
        #[test]
        fn smith_product_is_abs_det(m in small_matrix(5)) {
            let f = smith_invariants(&IntMatrix::from_rows(&m));
            prop_assert!(f.is_divisibility_chain());
            let prod: BigInt = f.invariant_factors.iter().product();
            prop_assert_eq!(prod, det_cofactor(&m).abs());
        }

        #[test]
        fn smith_invariant_under_unimodular_ops(
            m in small_matrix(4),
            ops in prop::collection::vec((0usize..4, 0usize..4, -3i64..=3, any::<bool>()), 0..12),
        ) {
            let base = IntMatrix::from_rows(&m);
            let n = base.rows();
            let mut a = base.clone();
            for (i, j, q, on_rows) in ops {
                let (i, j) = (i % n, j % n);
                if i == j { continue; }
                let q = BigInt::from(q);
                if on_rows {
                    row_sub(&mut a, i, j, &q);
                    swap_rows(&mut a, i, j);
                } else {
                    col_sub(&mut a, i, j, &q);
                    swap_cols(&mut a, i, j);
                }
            }
            prop_assert_eq!(smith_invariants(&a), smith_invariants(&base));
        }

        #[test]
        fn kernel_vectors_are_primitive_and_annihilated(
            rows in 1usize..4,
            cols in 1usize..6,
            seed in prop::collection::vec(-5i64..=5, 24),
        ) {
            let data: Vec<Vec<i64>> = (0..rows)
                .map(|i| (0..cols).map(|j| seed[i * cols + j]).collect())
                .collect();
            let m = IntMatrix::from_rows(&data);
            let ker = rational_kernel(&m);
            prop_assert_eq!(ker.len() + rank(&m), cols);
            let mt = m.transpose();
            for v in &ker {
                prop_assert!(gcd_list(v).is_one());
                prop_assert!(mt.left_apply(v).unwrap().iter().all(Zero::is_zero));
            }
        }
    }
}
