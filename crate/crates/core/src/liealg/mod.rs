//! Nilpotent Lie algebras given by structure constants, their unipotent
//! representations, filtrations, and 2-tensors.

pub mod catalog;
mod checks;
mod rep;
mod tensor;

pub use checks::{filtration_degree_check, placements, termination_bound_check, Cobracket, TerminationReport};
pub use rep::{socle_filtration, validate_representation, Filtration, RepresentationData, RepresentationSpec};
pub use tensor::{invariant_symmetric_tensors, TensorRole, TwoTensor};

use std::fmt;
use std::sync::Arc;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::kernel::{fmt_rational, to_sparse, Matrix, Rational, Subspace};

/// Raw input: basis names and the brackets `[e_i, e_j] = v` for `i < j` that are nonzero.
#[derive(Clone, Debug, Default)]
pub struct LieAlgebraSpec {
    pub name: String,
    pub basis: Vec<String>,
    pub brackets: Vec<(usize, usize, Vec<Rational>)>,
}

/// Certified nilpotent Lie algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LieAlgebraData {
    name: String,
    basis: Vec<String>,
    /// `constants[i][j]` is `[e_i, e_j]` in coordinates.
    constants: Vec<Vec<Vec<Rational>>>,
    /// `g_0 = g`, `g_{k+1} = [g_k, g]`, ending with the zero space.
    lower_central: Vec<Subspace>,
}

impl LieAlgebraData {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis_names(&self) -> &[String] {
        &self.basis
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.basis.iter().position(|b| b == name)
    }

    pub fn basis_vector(&self, i: usize) -> Vec<Rational> {
        let mut v = vec![Rational::zero(); self.dim()];
        v[i] = Rational::from_integer(1.into());
        v
    }

    /// `[e_i, e_j]` in coordinates.
    pub fn bracket_basis(&self, i: usize, j: usize) -> &[Rational] {
        &self.constants[i][j]
    }

    pub fn bracket(&self, u: &[Rational], v: &[Rational]) -> Vec<Rational> {
        let n = self.dim();
        let mut out = vec![Rational::zero(); n];
        for (i, a) in u.iter().enumerate().filter(|(_, a)| !a.is_zero()) {
            for (j, b) in v.iter().enumerate().filter(|(_, b)| !b.is_zero()) {
                let ab = a * b;
                for (k, c) in self.constants[i][j].iter().enumerate() {
                    if !c.is_zero() {
                        out[k] += &ab * c;
                    }
                }
            }
        }
        out
    }

    /// Matrix of `ad_{e_i}` acting on coordinate columns.
    pub fn ad(&self, i: usize) -> Matrix {
        let n = self.dim();
        let mut m = Matrix::zeros(n, n);
        for j in 0..n {
            for (k, c) in self.constants[i][j].iter().enumerate() {
                m.set(k, j, c.clone());
            }
        }
        m
    }

    pub fn lower_central_series(&self) -> &[Subspace] {
        &self.lower_central
    }

    /// Smallest `c` with `g_c = 0`.
    pub fn nilpotency_class(&self) -> usize {
        self.lower_central.len() - 1
    }

    pub fn is_abelian(&self) -> bool {
        self.nilpotency_class() <= 1
    }

    /// `g_k`, which is zero beyond the class.
    pub fn lcs_term(&self, k: usize) -> Subspace {
        self.lower_central.get(k).cloned().unwrap_or_else(|| Subspace::zero(self.dim()))
    }

    /// Filtration weight of each basis vector: `1 + max{k : e_i in g_k}`.
    pub fn weights(&self) -> Vec<usize> {
        (0..self.dim())
            .map(|i| {
                let v = to_sparse(&self.basis_vector(i));
                (0..self.lower_central.len()).rev().find(|k| self.lower_central[*k].contains(&v)).expect("g_0 = g") + 1
            })
            .collect()
    }

    /// Whether every `g_k` is spanned by the basis vectors it contains.
    pub fn basis_is_adapted(&self) -> bool {
        let w = self.weights();
        self.lower_central.iter().enumerate().all(|(k, s)| w.iter().filter(|x| **x > k).count() == s.dim())
    }

    /// Whether `[g_i, g_j]` lands in weight exactly `w_i + w_j` on basis vectors, i.e. the algebra is graded by weight.
    pub fn is_graded_by_weight(&self) -> bool {
        let w = self.weights();
        let n = self.dim();
        (0..n).all(|i| {
            (0..n).all(|j| self.constants[i][j].iter().enumerate().all(|(k, c)| c.is_zero() || w[k] == w[i] + w[j]))
        })
    }

    pub fn format_vector(&self, v: &[Rational]) -> String {
        format_combination(v.iter().enumerate().map(|(i, c)| (c, self.basis[i].clone())))
    }
}

/// `c1*name1 + c2*name2`, or `0`.
pub fn format_combination<'a>(terms: impl IntoIterator<Item = (&'a Rational, String)>) -> String {
    let parts: Vec<String> = terms
        .into_iter()
        .filter(|(c, _)| !c.is_zero())
        .map(|(c, n)| if *c == Rational::from_integer(1.into()) { n } else { format!("{}*{}", fmt_rational(c), n) })
        .collect();
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
}

impl fmt::Display for LieAlgebraData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (dim {}, class {})", self.name, self.dim(), self.nilpotency_class())
    }
}

/// Certifies antisymmetry, the Jacobi identity and nilpotency.
pub fn validate_lie_algebra(spec: &LieAlgebraSpec) -> Result<Arc<LieAlgebraData>> {
    let n = spec.basis.len();
    for (i, b) in spec.basis.iter().enumerate() {
        if spec.basis[..i].contains(b) {
            return Err(Error::Invalid(format!("duplicate basis name `{b}`")));
        }
    }
    let mut constants = vec![vec![vec![Rational::zero(); n]; n]; n];
    let mut seen = vec![vec![false; n]; n];
    for (i, j, v) in &spec.brackets {
        let (i, j) = (*i, *j);
        if i >= n || j >= n || v.len() != n {
            return Err(Error::Invalid(format!("bracket entry ({i},{j}) out of range")));
        }
        if i == j {
            if v.iter().any(|c| !c.is_zero()) {
                return Err(Error::Check(format!("antisymmetry: [{0},{0}] must vanish", spec.basis[i])));
            }
            continue;
        }
        if seen[i][j] {
            return Err(Error::Invalid(format!("bracket [{},{}] given twice", spec.basis[i], spec.basis[j])));
        }
        seen[i][j] = true;
        if seen[j][i] {
            let neg: Vec<Rational> = v.iter().map(|c| -c.clone()).collect();
            if constants[j][i] != neg {
                return Err(Error::Check(format!(
                    "antisymmetry: [{0},{1}] and [{1},{0}] disagree",
                    spec.basis[i], spec.basis[j]
                )));
            }
        }
        constants[i][j] = v.clone();
        constants[j][i] = v.iter().map(|c| -c.clone()).collect();
    }
    let g = LieAlgebraData { name: spec.name.clone(), basis: spec.basis.clone(), constants, lower_central: Vec::new() };
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                let (ea, eb, ec) = (g.basis_vector(a), g.basis_vector(b), g.basis_vector(c));
                let t1 = g.bracket(&ea, &g.bracket(&eb, &ec));
                let t2 = g.bracket(&eb, &g.bracket(&ec, &ea));
                let t3 = g.bracket(&ec, &g.bracket(&ea, &eb));
                let sum: Vec<Rational> = (0..n).map(|k| &t1[k] + &t2[k] + &t3[k]).collect();
                if sum.iter().any(|x| !x.is_zero()) {
                    return Err(Error::Check(format!(
                        "Jacobi identity fails on ({}, {}, {}): {}",
                        g.basis[a],
                        g.basis[b],
                        g.basis[c],
                        g.format_vector(&sum)
                    )));
                }
            }
        }
    }
    let mut series = vec![Subspace::full(n)];
    loop {
        let last = series.last().expect("nonempty");
        if last.dim() == 0 {
            break;
        }
        let gens = last.basis_dense();
        let next = Subspace::span(
            n,
            gens.iter().flat_map(|u| (0..n).map(|j| to_sparse(&g.bracket(u, &g.basis_vector(j))))).collect::<Vec<_>>(),
        );
        if next.dim() == last.dim() {
            return Err(Error::Check(format!(
                "not nilpotent: lower central series stabilizes at dimension {}",
                next.dim()
            )));
        }
        series.push(next);
    }
    Ok(Arc::new(LieAlgebraData { lower_central: series, ..g }))
}
