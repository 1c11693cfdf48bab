use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};
use serde::Serialize;

use super::echelon::{Echelon, Rref, SparseRow};
use super::{int, Rational};
use crate::error::{Error, Result};

/// Sparse exact matrix. Entries are keyed by `(row, col)`; zeros are never stored.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    entries: BTreeMap<(usize, usize), Rational>,
}

/// First entry where two matrices differ.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EntryWitness {
    pub row: usize,
    pub col: usize,
    pub left: String,
    pub right: String,
}

impl fmt::Display for EntryWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "entry ({}, {}): {} != {}", self.row, self.col, self.left, self.right)
    }
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, entries: BTreeMap::new() }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.entries.insert((i, i), Rational::one());
        }
        m
    }

    /// Matrix unit `E_{ij}` (zero-based indices).
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        m.set(i, j, Rational::one());
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        if rows.iter().any(|x| x.len() != c) {
            return Err(Error::Shape("ragged matrix rows".into()));
        }
        let mut m = Matrix::zeros(r, c);
        for (i, row) in rows.into_iter().enumerate() {
            for (j, v) in row.into_iter().enumerate() {
                m.set(i, j, v);
            }
        }
        Ok(m)
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|v| int(*v)).collect()).collect())
            .expect("rectangular literal")
    }

    pub fn column(values: Vec<Rational>) -> Self {
        let n = values.len();
        let mut m = Matrix::zeros(n, 1);
        for (i, v) in values.into_iter().enumerate() {
            m.set(i, 0, v);
        }
        m
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

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, i: usize, j: usize) -> Rational {
        self.entries.get(&(i, j)).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of bounds");
        if v.is_zero() {
            self.entries.remove(&(i, j));
        } else {
            self.entries.insert((i, j), v);
        }
    }

    pub fn add_at(&mut self, i: usize, j: usize, v: &Rational) {
        if v.is_zero() {
            return;
        }
        let e = self.entries.entry((i, j)).or_insert_with(Rational::zero);
        *e += v;
        if e.is_zero() {
            self.entries.remove(&(i, j));
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &Rational)> {
        self.entries.iter().map(|((i, j), v)| (*i, *j, v))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && self.entries.len() == self.rows
            && self.entries.iter().all(|((i, j), v)| i == j && v.is_one())
    }

    pub fn to_dense(&self) -> Vec<Vec<Rational>> {
        let mut d = vec![vec![Rational::zero(); self.cols]; self.rows];
        for ((i, j), v) in &self.entries {
            d[*i][*j] = v.clone();
        }
        d
    }

    pub fn row_sparse(&self, i: usize) -> SparseRow {
        self.entries
            .range((i, 0)..(i + 1, 0))
            .map(|((_, j), v)| (*j, v.clone()))
            .collect()
    }

    pub fn column_values(&self, j: usize) -> Vec<Rational> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn scale(&self, s: &Rational) -> Matrix {
        if s.is_zero() {
            return Matrix::zeros(self.rows, self.cols);
        }
        Matrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|(k, v)| (*k, v * s)).collect(),
        }
    }

    pub fn transpose(&self) -> Matrix {
        Matrix {
            rows: self.cols,
            cols: self.rows,
            entries: self.entries.iter().map(|((i, j), v)| ((*j, *i), v.clone())).collect(),
        }
    }

    pub fn checked_mul(&self, rhs: &Matrix) -> Result<Matrix> {
        if self.cols != rhs.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for ((i, k), a) in &self.entries {
            for ((_, j), b) in rhs.entries.range((*k, 0)..(*k + 1, 0)) {
                out.add_at(*i, *j, &(a * b));
            }
        }
        Ok(out)
    }

    pub fn commutator(&self, rhs: &Matrix) -> Matrix {
        &(self * rhs) - &(rhs * self)
    }

    pub fn pow(&self, k: usize) -> Matrix {
        let mut acc = Matrix::identity(self.rows);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Smallest `k` with `self^k = 0`, if `self` is nilpotent.
    pub fn nilpotency_index(&self) -> Option<usize> {
        if !self.is_square() {
            return None;
        }
        let mut p = Matrix::identity(self.rows);
        for k in 0..=self.rows {
            if p.is_zero() {
                return Some(k);
            }
            p = &p * self;
        }
        None
    }

    pub fn is_nilpotent(&self) -> bool {
        self.nilpotency_index().is_some()
    }

    /// `exp(self)` for a nilpotent matrix, as a terminating series.
    pub fn exp_nilpotent(&self) -> Result<Matrix> {
        let n = self.rows;
        let mut acc = Matrix::identity(n);
        let mut term = Matrix::identity(n);
        for k in 1..=n + 1 {
            term = (&term * self).scale(&Rational::new(1.into(), (k as i64).into()));
            if term.is_zero() {
                return Ok(acc);
            }
            acc = &acc + &term;
        }
        Err(Error::NotNilpotent("exponential argument is not nilpotent".into()))
    }

    /// `log(self)` for a unipotent matrix: `sum (-1)^{m-1} (self - I)^m / m`.
    pub fn log_unipotent(&self) -> Result<Matrix> {
        let n = self.rows;
        let nil = self - &Matrix::identity(n);
        let mut acc = Matrix::zeros(n, n);
        let mut power = Matrix::identity(n);
        for m in 1..=n + 1 {
            power = &power * &nil;
            if power.is_zero() {
                return Ok(acc);
            }
            let c = Rational::new(if m % 2 == 1 { 1 } else { -1 }.into(), (m as i64).into());
            acc = &acc + &power.scale(&c);
        }
        Err(Error::NotNilpotent("logarithm argument is not unipotent".into()))
    }

    /// Inverse of a unipotent matrix by the terminating Neumann series.
    pub fn inverse_unipotent(&self) -> Result<Matrix> {
        let n = self.rows;
        let nil = &Matrix::identity(n) - self;
        let mut acc = Matrix::identity(n);
        let mut power = Matrix::identity(n);
        for _ in 1..=n + 1 {
            power = &power * &nil;
            if power.is_zero() {
                return Ok(acc);
            }
            acc = &acc + &power;
        }
        Err(Error::NotNilpotent("matrix is not unipotent".into()))
    }

    /// General inverse by elimination; `None` if singular.
    pub fn inverse(&self) -> Option<Matrix> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let mut e = Echelon::new(2 * n);
        for i in 0..n {
            let mut row = self.row_sparse(i);
            row.insert(n + i, Rational::one());
            e.insert(row);
        }
        let rref = e.into_rref();
        if (0..n).any(|c| !rref.is_pivot(c)) {
            return None;
        }
        let mut inv = Matrix::zeros(n, n);
        for c in 0..n {
            let row = rref.row_of_pivot(c).expect("pivot");
            for (k, v) in row.range(n..) {
                inv.set(c, k - n, v.clone());
            }
        }
        Some(inv)
    }

    pub fn rref(&self) -> Rref {
        Rref::from_rows(self.cols, (0..self.rows).map(|i| self.row_sparse(i)))
    }

    pub fn rank(&self) -> usize {
        self.rref().rank()
    }

    /// Kernel basis as column vectors, ordered by free column.
    pub fn nullspace(&self) -> Vec<Matrix> {
        self.rref()
            .kernel_basis()
            .into_iter()
            .map(|v| {
                let mut m = Matrix::zeros(self.cols, 1);
                for (i, x) in v {
                    m.set(i, 0, x);
                }
                m
            })
            .collect()
    }

    /// Kronecker product with `(i*rows(b)+k, j*cols(b)+l) -> a[i,j]*b[k,l]`.
    pub fn kron(&self, b: &Matrix) -> Matrix {
        let mut out = Matrix::zeros(self.rows * b.rows, self.cols * b.cols);
        for ((i, j), x) in &self.entries {
            for ((k, l), y) in &b.entries {
                out.entries.insert((i * b.rows + k, j * b.cols + l), x * y);
            }
        }
        out
    }

    pub fn first_difference(&self, other: &Matrix) -> Option<EntryWitness> {
        if self.rows != other.rows || self.cols != other.cols {
            return Some(EntryWitness {
                row: self.rows,
                col: self.cols,
                left: format!("{}x{}", self.rows, self.cols),
                right: format!("{}x{}", other.rows, other.cols),
            });
        }
        let d = self - other;
        d.entries.keys().next().map(|(i, j)| EntryWitness {
            row: *i,
            col: *j,
            left: self.get(*i, *j).to_string(),
            right: other.get(*i, *j).to_string(),
        })
    }

    pub fn is_upper_nil_triangular(&self) -> bool {
        self.entries.keys().all(|(i, j)| i < j)
    }
}

/// Permutation matrix of `e_i (x) f_j -> f_j (x) e_i` from `X (x) Y` to `Y (x) X`.
pub fn flip_operator(dim_x: usize, dim_y: usize) -> Matrix {
    let n = dim_x * dim_y;
    let mut p = Matrix::zeros(n, n);
    for i in 0..dim_x {
        for j in 0..dim_y {
            p.set(j * dim_x + i, i * dim_y + j, Rational::one());
        }
    }
    p
}

/// Kronecker product of a list; the empty product is the 1x1 identity.
pub fn kron_all<'a>(ms: impl IntoIterator<Item = &'a Matrix>) -> Matrix {
    ms.into_iter().fold(Matrix::identity(1), |acc, m| acc.kron(m))
}

pub fn nullspace(m: &Matrix) -> Vec<Matrix> {
    m.nullspace()
}

pub fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    a.kron(b)
}

impl Add for &Matrix {
    type Output = Matrix;
    fn add(self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch in add");
        let mut out = self.clone();
        for ((i, j), v) in &rhs.entries {
            out.add_at(*i, *j, v);
        }
        out
    }
}

impl Sub for &Matrix {
    type Output = Matrix;
    fn sub(self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch in sub");
        let mut out = self.clone();
        for ((i, j), v) in &rhs.entries {
            out.add_at(*i, *j, &-v);
        }
        out
    }
}

impl Neg for &Matrix {
    type Output = Matrix;
    fn neg(self) -> Matrix {
        self.scale(&-Rational::one())
    }
}

impl Mul for &Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        self.checked_mul(rhs).expect("shape mismatch in mul")
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .to_dense()
            .iter()
            .map(|r| r.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" "))
            .collect();
        write!(f, "{}", rows.join(" / "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn small_matrix(rows: usize, cols: usize) -> impl Strategy<Value = Matrix> {
        proptest::collection::vec(-3i64..=3, rows * cols).prop_map(move |v| {
            let mut m = Matrix::zeros(rows, cols);
            for (k, x) in v.into_iter().enumerate() {
                m.set(k / cols, k % cols, int(x));
            }
            m
        })
    }

    #[test]
    fn nullspace_examples() {
        assert!(Matrix::from_i64(&[&[1]]).nullspace().is_empty());
        let ns = Matrix::from_i64(&[&[1, -1]]).nullspace();
        assert_eq!(ns, vec![Matrix::column(vec![int(1), int(1)])]);
        let ns = Matrix::zeros(2, 2).nullspace();
        assert_eq!(ns, vec![Matrix::column(vec![int(1), int(0)]), Matrix::column(vec![int(0), int(1)])]);
    }

    #[test]
    fn kron_examples() {
        assert_eq!(Matrix::identity(2).kron(&Matrix::identity(2)), Matrix::identity(4));
        let n = Matrix::from_i64(&[&[0, 1], &[0, 0]]);
        let k = n.kron(&n);
        // a[0,1] b[0,1] lands at (0*2+0, 1*2+1) = (0, 3)
        assert_eq!(k.nnz(), 1);
        assert_eq!(k.get(0, 3), int(1));
        assert!(n.kron(&Matrix::zeros(2, 2)).is_zero());
    }

    #[test]
    fn flip_examples() {
        assert_eq!(flip_operator(1, 1), Matrix::identity(1));
        let p = flip_operator(2, 2);
        let swap = Matrix::from_i64(&[&[1, 0, 0, 0], &[0, 0, 1, 0], &[0, 1, 0, 0], &[0, 0, 0, 1]]);
        assert_eq!(p, swap);
        for (a, b) in [(2, 3), (3, 1), (0, 2)] {
            assert!((&flip_operator(a, b) * &flip_operator(b, a)).is_identity() || a * b == 0);
        }
    }

    #[test]
    fn flip_conjugates_kron() {
        let a = Matrix::from_i64(&[&[1, 2], &[3, 4]]);
        let b = Matrix::from_i64(&[&[0, 1, 0], &[5, 0, 0], &[0, 0, 7]]);
        let lhs = &(&flip_operator(2, 3) * &a.kron(&b)) * &flip_operator(3, 2);
        assert_eq!(lhs, b.kron(&a));
    }

    #[test]
    fn nilpotent_series() {
        let n = Matrix::from_i64(&[&[0, 1, 0], &[0, 0, 1], &[0, 0, 0]]);
        let e = n.exp_nilpotent().unwrap();
        assert_eq!(e.get(0, 2), crate::kernel::q(1, 2));
        assert_eq!(e.log_unipotent().unwrap(), n);
        assert!((&e * &e.inverse_unipotent().unwrap()).is_identity());
        assert!(Matrix::identity(2).exp_nilpotent().is_err());
    }

    proptest! {
        #[test]
        fn nullspace_vectors_are_annihilated(m in small_matrix(3, 4)) {
            for v in m.nullspace() {
                prop_assert!((&m * &v).is_zero());
            }
            prop_assert_eq!(m.nullspace().len() + m.rank(), 4);
        }

        #[test]
        fn kron_is_associative(a in small_matrix(2, 1), b in small_matrix(1, 2), c in small_matrix(2, 2)) {
            prop_assert_eq!(a.kron(&b).kron(&c), a.kron(&b.kron(&c)));
        }

        #[test]
        fn flip_squares_to_identity(d in 0usize..4) {
            let p = flip_operator(d, d);
            prop_assert!((&p * &p).is_identity() || d == 0);
        }

        #[test]
        fn inverse_is_two_sided(m in small_matrix(3, 3)) {
            if let Some(inv) = m.inverse() {
                prop_assert!((&m * &inv).is_identity());
                prop_assert!((&inv * &m).is_identity());
            } else {
                prop_assert!(m.rank() < 3);
            }
        }
    }
}
