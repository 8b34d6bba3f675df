//! Dense exact linear algebra over big integers and big rationals.
//!
//! Everything here operates on desk-scale matrices (torus Gram matrices and
//! phase-space blocks, dimension ≤ a few dozen), so the implementations favor
//! exactness and clarity over asymptotics: Bareiss fraction-free elimination
//! for integer determinants, Gauss-Jordan for rational inverses.

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::{Error, Result};

/// Dense matrix of arbitrary-precision integers, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMat {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl std::ops::Index<(usize, usize)> for IntMat {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }
}

impl IntMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMat { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map(Vec::len).unwrap_or(0);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Parse("ragged matrix rows".into()));
        }
        let data = rows.iter().flatten().map(|&x| BigInt::from(x)).collect();
        Ok(IntMat { rows: r, cols: c, data })
    }

    pub fn from_bigint_rows(rows: Vec<Vec<BigInt>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map(Vec::len).unwrap_or(0);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Parse("ragged matrix rows".into()));
        }
        let data = rows.into_iter().flatten().collect();
        Ok(IntMat { rows: r, cols: c, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].clone();
            }
        }
        out
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "IntMat::mul dimension mismatch");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let t = a * &rhs[(k, j)];
                    out[(i, j)] += t;
                }
            }
        }
        out
    }

    /// Congruence transform ᵗA · self · A.
    pub fn congruence(&self, a: &Self) -> Self {
        a.transpose().mul(self).mul(a)
    }

    pub fn neg(&self) -> Self {
        IntMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| -x).collect(),
        }
    }

    pub fn is_skew_symmetric(&self) -> bool {
        if !self.is_square() {
            return false;
        }
        for i in 0..self.rows {
            for j in i..self.cols {
                if self[(i, j)] != -&self[(j, i)] {
                    return false;
                }
            }
        }
        true
    }

    /// Exact determinant via Bareiss fraction-free elimination.
    pub fn det(&self) -> BigInt {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut m = self.clone();
        let mut sign = 1i32;
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if m[(k, k)].is_zero() {
                match (k + 1..n).find(|&r| !m[(r, k)].is_zero()) {
                    Some(r) => {
                        m.swap_rows(k, r);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let t = &m[(i, j)] * &m[(k, k)] - &m[(i, k)] * &m[(k, j)];
                    m[(i, j)] = t / &prev;
                }
                m[(i, k)] = BigInt::zero();
            }
            prev = m[(k, k)].clone();
        }
        let d = m[(n - 1, n - 1)].clone();
        if sign < 0 {
            -d
        } else {
            d
        }
    }

    pub fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(i * self.cols + c, j * self.cols + c);
        }
    }

    pub fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for r in 0..self.rows {
            self.data.swap(r * self.cols + i, r * self.cols + j);
        }
    }

    pub fn negate_row(&mut self, i: usize) {
        for c in 0..self.cols {
            let idx = i * self.cols + c;
            let v = -std::mem::take(&mut self.data[idx]);
            self.data[idx] = v;
        }
    }

    pub fn negate_col(&mut self, j: usize) {
        for r in 0..self.rows {
            let idx = r * self.cols + j;
            let v = -std::mem::take(&mut self.data[idx]);
            self.data[idx] = v;
        }
    }

    /// row[dst] += c * row[src]
    pub fn row_add(&mut self, dst: usize, src: usize, c: &BigInt) {
        assert_ne!(dst, src);
        for col in 0..self.cols {
            let t = c * &self[(src, col)];
            self[(dst, col)] += t;
        }
    }

    /// col[dst] += c * col[src]
    pub fn col_add(&mut self, dst: usize, src: usize, c: &BigInt) {
        assert_ne!(dst, src);
        for row in 0..self.rows {
            let t = c * &self[(row, src)];
            self[(row, dst)] += t;
        }
    }

    pub fn to_rat(&self) -> RatMat {
        RatMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| BigRational::from_integer(x.clone())).collect(),
        }
    }

    pub fn to_f64(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| {
            self[(i, j)].to_f64().expect("integer entry out of f64 range")
        })
    }
}

/// Dense matrix of arbitrary-precision rationals, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatMat {
    rows: usize,
    cols: usize,
    data: Vec<BigRational>,
}

impl std::ops::Index<(usize, usize)> for RatMat {
    type Output = BigRational;
    fn index(&self, (i, j): (usize, usize)) -> &BigRational {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for RatMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigRational {
        &mut self.data[i * self.cols + j]
    }
}

impl RatMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMat { rows, cols, data: vec![BigRational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigRational::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<BigRational>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map(Vec::len).unwrap_or(0);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Parse("ragged matrix rows".into()));
        }
        let data = rows.into_iter().flatten().collect();
        Ok(RatMat { rows: r, cols: c, data })
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Result<Self> {
        Ok(IntMat::from_rows(rows)?.to_rat())
    }

    pub fn from_diag(diag: &[BigRational]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, d) in diag.iter().enumerate() {
            m[(i, i)] = d.clone();
        }
        m
    }

    /// Exact conversion from binary64 entries (every finite f64 is rational).
    pub fn from_f64_exact(m: &DMatrix<f64>) -> Result<Self> {
        let mut out = Self::zeros(m.nrows(), m.ncols());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                out[(i, j)] = BigRational::from_float(m[(i, j)])
                    .ok_or_else(|| Error::Parse(format!("non-finite entry at ({i},{j})")))?;
            }
        }
        Ok(out)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].clone();
            }
        }
        out
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "RatMat::mul dimension mismatch");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let t = a * &rhs[(k, j)];
                    out[(i, j)] += t;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigRational]) -> Vec<BigRational> {
        assert_eq!(self.cols, v.len(), "RatMat::mul_vec dimension mismatch");
        (0..self.rows)
            .map(|i| {
                let mut acc = BigRational::zero();
                for j in 0..self.cols {
                    if !self[(i, j)].is_zero() {
                        acc += &self[(i, j)] * &v[j];
                    }
                }
                acc
            })
            .collect()
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        RatMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        RatMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        RatMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| -x).collect(),
        }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        RatMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * c).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn is_symmetric(&self) -> bool {
        if !self.is_square() {
            return false;
        }
        for i in 0..self.rows {
            for j in i + 1..self.cols {
                if self[(i, j)] != self[(j, i)] {
                    return false;
                }
            }
        }
        true
    }

    pub fn trace(&self) -> BigRational {
        assert!(self.is_square());
        (0..self.rows).map(|i| self[(i, i)].clone()).sum()
    }

    /// Exact determinant via rational Gaussian elimination.
    pub fn det(&self) -> BigRational {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigRational::one();
        }
        let mut m = self.clone();
        let mut det = BigRational::one();
        for k in 0..n {
            let pivot_row = match (k..n).find(|&r| !m[(r, k)].is_zero()) {
                Some(r) => r,
                None => return BigRational::zero(),
            };
            if pivot_row != k {
                for c in 0..n {
                    let hi = pivot_row * n + c;
                    let lo = k * n + c;
                    m.data.swap(hi, lo);
                }
                det = -det;
            }
            let pivot = m[(k, k)].clone();
            det *= &pivot;
            for i in k + 1..n {
                if m[(i, k)].is_zero() {
                    continue;
                }
                let factor = &m[(i, k)] / &pivot;
                for j in k..n {
                    let t = &factor * &m[(k, j)];
                    m[(i, j)] -= t;
                }
            }
        }
        det
    }

    /// Exact inverse via Gauss-Jordan; `None` when singular.
    pub fn inverse(&self) -> Option<Self> {
        assert!(self.is_square(), "inverse of a non-square matrix");
        let n = self.rows;
        let mut m = self.clone();
        let mut inv = Self::identity(n);
        for k in 0..n {
            let pivot_row = (k..n).find(|&r| !m[(r, k)].is_zero())?;
            if pivot_row != k {
                for c in 0..n {
                    m.data.swap(pivot_row * n + c, k * n + c);
                    inv.data.swap(pivot_row * n + c, k * n + c);
                }
            }
            let pivot = m[(k, k)].clone();
            for c in 0..n {
                m[(k, c)] /= &pivot;
                inv[(k, c)] /= &pivot;
            }
            for i in 0..n {
                if i == k || m[(i, k)].is_zero() {
                    continue;
                }
                let factor = m[(i, k)].clone();
                for c in 0..n {
                    let t1 = &factor * &m[(k, c)];
                    m[(i, c)] -= t1;
                    let t2 = &factor * &inv[(k, c)];
                    inv[(i, c)] -= t2;
                }
            }
        }
        Some(inv)
    }

    /// Determinants of the leading principal minors, orders 1..=n.
    pub fn leading_minor_dets(&self) -> Vec<BigRational> {
        assert!(self.is_square());
        (1..=self.rows)
            .map(|k| {
                let mut sub = Self::zeros(k, k);
                for i in 0..k {
                    for j in 0..k {
                        sub[(i, j)] = self[(i, j)].clone();
                    }
                }
                sub.det()
            })
            .collect()
    }

    /// Assemble [[a, b], [c, d]] from equally-sized square blocks.
    pub fn block_2x2(a: &Self, b: &Self, c: &Self, d: &Self) -> Self {
        let n = a.rows;
        assert!([a, b, c, d].iter().all(|m| m.rows == n && m.cols == n));
        let mut out = Self::zeros(2 * n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] = a[(i, j)].clone();
                out[(i, j + n)] = b[(i, j)].clone();
                out[(i + n, j)] = c[(i, j)].clone();
                out[(i + n, j + n)] = d[(i, j)].clone();
            }
        }
        out
    }

    pub fn to_f64(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| rat_to_f64(&self[(i, j)]))
    }
}

/// Rational to binary64, robust against numerator/denominator overflowing
/// f64 range individually.
pub fn rat_to_f64(x: &BigRational) -> f64 {
    if let Some(v) = x.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    // fall back to scaled division for extreme numerator/denominator sizes
    let num_bits = x.numer().bits() as i64;
    let den_bits = x.denom().bits() as i64;
    let shift = num_bits.max(den_bits) - 60;
    if shift <= 0 {
        return 0.0;
    }
    let n = (x.numer() >> shift).to_f64().unwrap_or(0.0);
    let d = (x.denom() >> shift).to_f64().unwrap_or(1.0);
    n / d
}

/// Floor square root of a nonnegative big integer, with exactness check.
pub fn exact_sqrt(n: &BigInt) -> Result<BigInt> {
    if n.is_negative() {
        return Err(Error::NotPerfectSquare(n.to_string()));
    }
    let root = n.sqrt();
    if &root * &root == *n {
        Ok(root)
    } else {
        Err(Error::NotPerfectSquare(n.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::FromPrimitive;

    fn rat(p: i64, q: i64) -> BigRational {
        BigRational::new(BigInt::from(p), BigInt::from(q))
    }

    #[test]
    fn bareiss_det_matches_known_values() {
        let m = IntMat::from_rows(&[vec![2, 0], vec![0, 3]]).unwrap();
        assert_eq!(m.det(), BigInt::from(6));
        let m = IntMat::from_rows(&[vec![0, 2, 0, 0], vec![-2, 0, 0, 0], vec![0, 0, 0, 2], vec![0, 0, -2, 0]])
            .unwrap();
        assert_eq!(m.det(), BigInt::from(16));
        let singular = IntMat::from_rows(&[vec![1, 2], vec![2, 4]]).unwrap();
        assert_eq!(singular.det(), BigInt::zero());
    }

    #[test]
    fn bareiss_det_with_zero_pivot() {
        let m = IntMat::from_rows(&[vec![0, 1, 2], vec![1, 0, 3], vec![4, 5, 0]]).unwrap();
        // cofactor expansion: 0*(0-15) - 1*(0-12) + 2*(5-0) = 22
        assert_eq!(m.det(), BigInt::from(22));
    }

    #[test]
    fn rational_inverse_round_trips() {
        let m = RatMat::from_rows(vec![
            vec![rat(1, 1), rat(1, 2), rat(0, 1)],
            vec![rat(0, 1), rat(1, 3), rat(2, 1)],
            vec![rat(5, 1), rat(0, 1), rat(1, 7)],
        ])
        .unwrap();
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), RatMat::identity(3));
        assert_eq!(inv.mul(&m), RatMat::identity(3));
    }

    #[test]
    fn singular_matrix_has_no_inverse() {
        let m = RatMat::from_i64_rows(&[vec![1, 2], vec![2, 4]]).unwrap();
        assert!(m.inverse().is_none());
        assert_eq!(m.det(), BigRational::zero());
    }

    #[test]
    fn rational_det_agrees_with_bareiss_on_integers() {
        let rows = vec![vec![3, -1, 2, 0], vec![1, 4, -2, 5], vec![0, 2, 2, -3], vec![7, 0, 1, 1]];
        let zi = IntMat::from_rows(&rows).unwrap();
        let qi = RatMat::from_i64_rows(&rows).unwrap();
        assert_eq!(qi.det(), BigRational::from_integer(zi.det()));
    }

    #[test]
    fn leading_minors_detect_indefiniteness() {
        let m = RatMat::from_i64_rows(&[vec![1, 0], vec![0, -1]]).unwrap();
        let minors = m.leading_minor_dets();
        assert!(minors[0] > BigRational::zero());
        assert!(minors[1] < BigRational::zero());
    }

    #[test]
    fn elementary_ops_track_congruence() {
        // applying E = I + 3·e_{1,0} as a basis change to both sides
        let mut m = IntMat::from_rows(&[vec![0, 5], vec![-5, 0]]).unwrap();
        let mut e = IntMat::identity(2);
        let c = BigInt::from(3);
        m.row_add(0, 1, &c);
        m.col_add(0, 1, &c);
        e.col_add(0, 1, &c);
        let w = IntMat::from_rows(&[vec![0, 5], vec![-5, 0]]).unwrap();
        assert_eq!(w.congruence(&e), m);
    }

    #[test]
    fn exact_sqrt_accepts_squares_only() {
        assert_eq!(exact_sqrt(&BigInt::from(16)).unwrap(), BigInt::from(4));
        assert_eq!(exact_sqrt(&BigInt::from(0)).unwrap(), BigInt::zero());
        assert!(exact_sqrt(&BigInt::from(15)).is_err());
        assert!(exact_sqrt(&BigInt::from(-4)).is_err());
    }

    #[test]
    fn from_f64_exact_is_exact() {
        let m = DMatrix::from_row_slice(1, 2, &[0.5, 0.1]);
        let q = RatMat::from_f64_exact(&m).unwrap();
        assert_eq!(q[(0, 0)], rat(1, 2));
        // 0.1 is not exactly 1/10 in binary64; conversion must preserve the
        // binary value, not the decimal literal
        assert_ne!(q[(0, 1)], rat(1, 10));
        assert_eq!(q[(0, 1)], BigRational::from_f64(0.1).unwrap());
    }

    #[test]
    fn rat_to_f64_handles_plain_values() {
        assert_eq!(rat_to_f64(&rat(3, 4)), 0.75);
        assert_eq!(rat_to_f64(&rat(-7, 2)), -3.5);
    }
}
