use num_traits::Zero;

use super::echelon::{Echelon, Rref, SparseRow};
use super::Rational;

pub fn to_sparse(v: &[Rational]) -> SparseRow {
    v.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(i, x)| (i, x.clone())).collect()
}

pub fn to_dense(v: &SparseRow, n: usize) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); n];
    for (i, x) in v {
        out[*i] = x.clone();
    }
    out
}

/// Span of a set of vectors, kept in reduced echelon form.
#[derive(Clone, Debug)]
pub struct Subspace {
    ambient: usize,
    rref: Rref,
}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        Subspace { ambient, rref: Rref::from_rows(ambient, std::iter::empty()) }
    }

    pub fn full(ambient: usize) -> Self {
        Self::span(ambient, (0..ambient).map(|i| std::iter::once((i, Rational::from_integer(1.into()))).collect()))
    }

    pub fn span(ambient: usize, vectors: impl IntoIterator<Item = SparseRow>) -> Self {
        let mut e = Echelon::new(ambient);
        for v in vectors {
            e.insert(v);
        }
        Subspace { ambient, rref: e.into_rref() }
    }

    pub fn span_dense<'a>(ambient: usize, vectors: impl IntoIterator<Item = &'a Vec<Rational>>) -> Self {
        Self::span(ambient, vectors.into_iter().map(|v| to_sparse(v)))
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.rref.rank()
    }

    pub fn contains(&self, v: &SparseRow) -> bool {
        self.rref.reduce(v.clone()).is_empty()
    }

    pub fn contains_dense(&self, v: &[Rational]) -> bool {
        self.contains(&to_sparse(v))
    }

    /// The reduced echelon basis.
    pub fn basis(&self) -> &[SparseRow] {
        self.rref.rows()
    }

    pub fn basis_dense(&self) -> Vec<Vec<Rational>> {
        self.basis().iter().map(|r| to_dense(r, self.ambient)).collect()
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        Self::span(self.ambient, self.basis().iter().chain(other.basis()).cloned())
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        self.basis().iter().all(|v| other.contains(v))
    }

    pub fn rref(&self) -> &Rref {
        &self.rref
    }
}

impl PartialEq for Subspace {
    fn eq(&self, other: &Self) -> bool {
        self.ambient == other.ambient && self.rref.rows() == other.rref.rows()
    }
}

impl Eq for Subspace {}
