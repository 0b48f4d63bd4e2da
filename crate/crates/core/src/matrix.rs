//! Dense row-major matrices over any [`Scalar`].

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::scalar::{FieldScalar, Scalar};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T> Matrix<T> {
    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Self {
        assert_eq!(rows * cols, data.len(), "matrix data has wrong length");
        Self { rows, cols, data }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &[T]> {
        (0..self.rows).map(move |i| self.row(i))
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }
}

impl<T: Clone> Matrix<T> {
    pub fn from_rows(rows: &[Vec<T>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Self {
            rows: rows.len(),
            cols,
            data: rows.iter().flatten().cloned().collect(),
        }
    }

    /// A matrix of zero rows and the given width.
    pub fn empty(cols: usize) -> Self {
        Self { rows: 0, cols, data: Vec::new() }
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        self.row_iter().map(<[T]>::to_vec).collect()
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    /// Stacks rows of `other` below `self`.
    pub fn vstack(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Self { rows: self.rows + other.rows, cols: self.cols, data }
    }

    pub fn hstack(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows);
        Self::from_fn(self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self[(i, j)].clone()
            } else {
                other[(i, j - self.cols)].clone()
            }
        })
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        let rows: Vec<Vec<T>> = idx.iter().map(|&i| self.row(i).to_vec()).collect();
        if rows.is_empty() {
            return Self::empty(self.cols);
        }
        Self::from_rows(&rows)
    }

    pub fn block_diag(a: &Self, b: &Self, zero: T) -> Self {
        Self::from_fn(a.rows + b.rows, a.cols + b.cols, |i, j| {
            match (i < a.rows, j < a.cols) {
                (true, true) => a[(i, j)].clone(),
                (false, false) => b[(i - a.rows, j - a.cols)].clone(),
                _ => zero.clone(),
            }
        })
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;

    fn index(&self, (i, j): (usize, usize)) -> &T {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(T::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square() && *self == Self::identity(self.rows)
    }

    pub fn scale(&self, s: &T) -> Self {
        self.map(|x| x.mul_ref(s))
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len(), "matrix-vector shape mismatch");
        self.row_iter()
            .map(|row| dot(row, v))
            .collect()
    }

    /// Row vector times matrix.
    pub fn vec_mul(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.rows, v.len(), "vector-matrix shape mismatch");
        let mut out = vec![T::zero(); self.cols];
        for (i, vi) in v.iter().enumerate() {
            if vi.is_zero() {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                let a = &self[(i, j)];
                if !a.is_zero() {
                    *o = o.add_ref(&vi.mul_ref(a));
                }
            }
        }
        out
    }

    /// Kronecker product; row index `i1 * rows(b) + i2`.
    pub fn kron(&self, other: &Self) -> Self {
        Self::from_fn(self.rows * other.rows, self.cols * other.cols, |i, j| {
            let a = &self[(i / other.rows, j / other.cols)];
            let b = &other[(i % other.rows, j % other.cols)];
            a.mul_ref(b)
        })
    }

    pub fn trace(&self) -> T {
        (0..self.rows.min(self.cols)).fold(T::zero(), |acc, i| acc.add_ref(&self[(i, i)]))
    }

    fn checked_mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "matrix product shape mismatch");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs[(k, j)];
                    if !b.is_zero() {
                        let prod = a.mul_ref(b);
                        let slot = &mut out[(i, j)];
                        *slot = slot.add_ref(&prod);
                    }
                }
            }
        }
        out
    }
}

/// Sum of elementwise products, skipping zeros.
pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (x, y)| {
        if x.is_zero() || y.is_zero() {
            acc
        } else {
            acc.add_ref(&x.mul_ref(y))
        }
    })
}

impl<T: Scalar> Mul for &Matrix<T> {
    type Output = Matrix<T>;

    fn mul(self, rhs: &Matrix<T>) -> Matrix<T> {
        self.checked_mul(rhs)
    }
}

impl<T: Scalar> Add for &Matrix<T> {
    type Output = Matrix<T>;

    fn add(self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.shape(), rhs.shape());
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a.add_ref(b)).collect(),
        }
    }
}

impl<T: Scalar> Sub for &Matrix<T> {
    type Output = Matrix<T>;

    fn sub(self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.shape(), rhs.shape());
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a.sub_ref(b)).collect(),
        }
    }
}

/// Reduced row echelon form together with its pivot columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Echelon<T> {
    pub matrix: Matrix<T>,
    pub pivots: Vec<usize>,
}

impl<T: FieldScalar> Matrix<T> {
    /// Gauss-Jordan elimination. Zero rows are dropped, so the result has
    /// exactly `rank` rows.
    pub fn rref(&self) -> Echelon<T> {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(pr) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else {
                continue;
            };
            m.swap_rows(r, pr);
            let inv = m[(r, c)].try_inverse().expect("nonzero pivot");
            for j in 0..m.cols {
                m[(r, j)] = m[(r, j)].mul_ref(&inv);
            }
            for i in 0..m.rows {
                if i == r || m[(i, c)].is_zero() {
                    continue;
                }
                let f = m[(i, c)].clone();
                for j in c..m.cols {
                    if m[(r, j)].is_zero() {
                        continue;
                    }
                    let delta = f.mul_ref(&m[(r, j)]);
                    m[(i, j)] = m[(i, j)].sub_ref(&delta);
                }
            }
            pivots.push(c);
            r += 1;
        }
        let matrix = m.select_rows(&(0..r).collect::<Vec<_>>());
        Echelon { matrix, pivots }
    }

    pub fn rank(&self) -> usize {
        self.rref().pivots.len()
    }

    /// Basis of `{x : A x = 0}`; one vector per free column.
    pub fn nullspace(&self) -> Vec<Vec<T>> {
        let Echelon { matrix, pivots } = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut x = vec![T::zero(); self.cols];
                x[f] = T::one();
                for (r, &pc) in pivots.iter().enumerate() {
                    x[pc] = -matrix[(r, f)].clone();
                }
                x
            })
            .collect()
    }

    pub fn determinant(&self) -> T {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let mut m = self.clone();
        let n = m.rows;
        let mut det = T::one();
        for c in 0..n {
            let Some(pr) = (c..n).find(|&i| !m[(i, c)].is_zero()) else {
                return T::zero();
            };
            if pr != c {
                m.swap_rows(c, pr);
                det = -det;
            }
            let pivot = m[(c, c)].clone();
            det = det.mul_ref(&pivot);
            let inv = pivot.try_inverse().expect("nonzero pivot");
            for i in c + 1..n {
                if m[(i, c)].is_zero() {
                    continue;
                }
                let f = m[(i, c)].mul_ref(&inv);
                for j in c..n {
                    let delta = f.mul_ref(&m[(c, j)]);
                    m[(i, j)] = m[(i, j)].sub_ref(&delta);
                }
            }
        }
        det
    }

    pub fn inverse(&self) -> Option<Self> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        if n == 0 {
            return Some(self.clone());
        }
        let aug = self.hstack(&Self::identity(n)).rref();
        if aug.pivots.len() < n || aug.pivots[n - 1] != n - 1 {
            return None;
        }
        Some(Self::from_fn(n, n, |i, j| aug.matrix[(i, n + j)].clone()))
    }

    /// Solves `x · self = v` for a row vector `x`, when a solution exists.
    pub fn solve_left(&self, v: &[T]) -> Option<Vec<T>> {
        assert_eq!(v.len(), self.cols);
        let target = Matrix::from_vec(1, self.cols, v.to_vec());
        let aug = self.transpose().hstack(&target.transpose()).rref();
        if aug.pivots.last() == Some(&self.rows) {
            return None;
        }
        let mut x = vec![T::zero(); self.rows];
        for (r, &pc) in aug.pivots.iter().enumerate() {
            x[pc] = aug.matrix[(r, self.rows)].clone();
        }
        Some(x)
    }

    /// Pfaffian of an antisymmetric matrix by cofactor expansion along the
    /// first row; intended for the small forms used here.
    pub fn pfaffian(&self) -> T {
        assert!(self.is_square() && self.rows.is_multiple_of(2));
        let idx: Vec<usize> = (0..self.rows).collect();
        pfaffian_rec(self, &idx)
    }
}

fn pfaffian_rec<T: Scalar>(m: &Matrix<T>, idx: &[usize]) -> T {
    if idx.is_empty() {
        return T::one();
    }
    let first = idx[0];
    let mut acc = T::zero();
    for k in 1..idx.len() {
        let a = &m[(first, idx[k])];
        if a.is_zero() {
            continue;
        }
        let rest: Vec<usize> = idx[1..].iter().copied().filter(|&x| x != idx[k]).collect();
        let term = a.mul_ref(&pfaffian_rec(m, &rest));
        acc = if k % 2 == 1 { acc.add_ref(&term) } else { acc.sub_ref(&term) };
    }
    acc
}

impl<T> Matrix<T> {
    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

impl Matrix<Complex64> {
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    /// `max_ij |(U U*)_ij - δ_ij|`.
    pub fn unitarity_defect(&self) -> f64 {
        let prod = self * &self.adjoint();
        let mut worst: f64 = 0.0;
        for i in 0..prod.rows {
            for j in 0..prod.cols {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((prod[(i, j)] - target).norm());
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Fp;
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use proptest::prelude::*;

    type F5 = Fp<5>;

    fn fm(rows: &[&[i64]]) -> Matrix<F5> {
        let v: Vec<Vec<F5>> = rows.iter().map(|r| r.iter().map(|&x| F5::new(x)).collect()).collect();
        Matrix::from_rows(&v)
    }

    fn qm(rows: &[&[i64]]) -> Matrix<BigRational> {
        let v: Vec<Vec<BigRational>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect())
            .collect();
        Matrix::from_rows(&v)
    }

    #[test]
    fn rref_drops_dependent_rows() {
        let m = fm(&[&[1, 2, 3], &[2, 4, 6], &[0, 1, 1]]);
        let e = m.rref();
        assert_eq!(e.pivots, vec![0, 1]);
        assert_eq!(e.matrix, fm(&[&[1, 0, 1], &[0, 1, 1]]));
    }

    #[test]
    fn nullspace_is_annihilated() {
        let m = fm(&[&[1, 2, 3, 4], &[0, 1, 1, 2]]);
        let ns = m.nullspace();
        assert_eq!(ns.len(), 2);
        for v in ns {
            assert!(m.mul_vec(&v).iter().all(|x| *x == F5::new(0)));
        }
    }

    #[test]
    fn rational_determinant_and_inverse() {
        let m = qm(&[&[2, 1], &[7, 4]]);
        assert_eq!(m.determinant(), BigRational::from_integer(BigInt::from(1)));
        let inv = m.inverse().unwrap();
        assert!((&m * &inv).is_identity());
        assert!(qm(&[&[1, 2], &[2, 4]]).inverse().is_none());
    }

    #[test]
    fn pfaffian_of_standard_forms() {
        let j2 = fm(&[&[0, 1], &[-1, 0]]);
        assert_eq!(j2.pfaffian(), F5::new(1));
        let j4 = fm(&[&[0, 0, 1, 0], &[0, 0, 0, 1], &[-1, 0, 0, 0], &[0, -1, 0, 0]]);
        assert_eq!(j4.pfaffian(), F5::new(-1));
        assert_eq!(j4.pfaffian() * j4.pfaffian(), j4.determinant());
    }

    #[test]
    fn solve_left_finds_combination() {
        let basis = fm(&[&[1, 0, 2], &[0, 1, 3]]);
        let v = vec![F5::new(2), F5::new(1), F5::new(2)];
        let x = basis.solve_left(&v).unwrap();
        assert_eq!(basis.vec_mul(&x), v);
        assert!(basis.solve_left(&[F5::new(0), F5::new(0), F5::new(1)]).is_none());
    }

    #[test]
    fn kron_index_convention() {
        let a = fm(&[&[1, 2], &[3, 4]]);
        let b = fm(&[&[0, 1], &[1, 0]]);
        let k = a.kron(&b);
        assert_eq!(k[(1, 0)], F5::new(1));
        assert_eq!(k[(2, 3)], F5::new(4));
    }

    #[test]
    fn generic_over_floats() {
        let m: Matrix<f64> = Matrix::from_rows(&[vec![2.0, 0.0], vec![0.0, 4.0]]);
        assert_eq!(m.determinant(), 8.0);
        let c: Matrix<Complex64> = Matrix::identity(3);
        assert!(c.unitarity_defect() < 1e-15);
    }

    fn f5_matrix(n: usize) -> impl Strategy<Value = Matrix<F5>> {
        proptest::collection::vec(0i64..5, n * n)
            .prop_map(move |v| Matrix::from_vec(n, n, v.into_iter().map(F5::new).collect()))
    }

    proptest! {
        #[test]
        fn determinant_is_multiplicative(a in f5_matrix(3), b in f5_matrix(3)) {
            prop_assert_eq!((&a * &b).determinant(), a.determinant() * b.determinant());
        }

        #[test]
        fn rank_nullity(a in f5_matrix(4)) {
            prop_assert_eq!(a.rank() + a.nullspace().len(), 4);
        }
    }
}
