use std::fmt;
use std::sync::Arc;

use super::LieAlgebraData;
use crate::error::{Error, Result};
use crate::kernel::{kron, Matrix, Subspace};

#[derive(Clone, Debug)]
pub struct RepresentationSpec {
    pub name: String,
    pub dim: usize,
    /// One square matrix per basis element of the algebra.
    pub matrices: Vec<Matrix>,
}

/// Certified unipotent representation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepresentationData {
    name: String,
    algebra: Arc<LieAlgebraData>,
    dim: usize,
    matrices: Vec<Matrix>,
}

/// Certifies bracket compatibility and nilpotency of every generator.
pub fn validate_representation(g: &Arc<LieAlgebraData>, spec: &RepresentationSpec) -> Result<RepresentationData> {
    let n = g.dim();
    if spec.matrices.len() != n {
        return Err(Error::Invalid(format!(
            "module `{}` gives {} matrices for an algebra of dimension {n}",
            spec.name,
            spec.matrices.len()
        )));
    }
    for (i, m) in spec.matrices.iter().enumerate() {
        if m.rows() != spec.dim || m.cols() != spec.dim {
            return Err(Error::Shape(format!(
                "module `{}`: matrix of {} is {}x{}, expected {}x{}",
                spec.name,
                g.basis_names()[i],
                m.rows(),
                m.cols(),
                spec.dim,
                spec.dim
            )));
        }
        if !m.is_nilpotent() {
            return Err(Error::Check(format!(
                "module `{}`: {} does not act nilpotently",
                spec.name,
                g.basis_names()[i]
            )));
        }
    }
    let rep = RepresentationData { name: spec.name.clone(), algebra: g.clone(), dim: spec.dim, matrices: spec.matrices.clone() };
    for i in 0..n {
        for j in i + 1..n {
            let lhs = rep.act(g.bracket_basis(i, j));
            let rhs = spec.matrices[i].commutator(&spec.matrices[j]);
            if let Some(w) = lhs.first_difference(&rhs) {
                return Err(Error::Check(format!(
                    "module `{}`: bracket [{},{}] not respected at {w}",
                    spec.name,
                    g.basis_names()[i],
                    g.basis_names()[j]
                )));
            }
        }
    }
    Ok(rep)
}

impl RepresentationData {
    pub fn trivial(g: &Arc<LieAlgebraData>, dim: usize, name: &str) -> Self {
        RepresentationData {
            name: name.into(),
            algebra: g.clone(),
            dim,
            matrices: vec![Matrix::zeros(dim, dim); g.dim()],
        }
    }

    /// The adjoint module, unipotent because `g` is nilpotent.
    pub fn adjoint(g: &Arc<LieAlgebraData>) -> Self {
        RepresentationData {
            name: "ad".into(),
            algebra: g.clone(),
            dim: g.dim(),
            matrices: (0..g.dim()).map(|i| g.ad(i)).collect(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn algebra(&self) -> &Arc<LieAlgebraData> {
        &self.algebra
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrices(&self) -> &[Matrix] {
        &self.matrices
    }

    pub fn generator(&self, i: usize) -> &Matrix {
        &self.matrices[i]
    }

    /// Action of the element with coordinates `v`.
    pub fn act(&self, v: &[crate::kernel::Rational]) -> Matrix {
        let mut m = Matrix::zeros(self.dim, self.dim);
        for (i, c) in v.iter().enumerate() {
            if !num_traits::Zero::is_zero(c) {
                m = &m + &self.matrices[i].scale(c);
            }
        }
        m
    }

    /// `X (x) Y` with `x -> x (x) 1 + 1 (x) x`.
    pub fn tensor(&self, other: &RepresentationData) -> RepresentationData {
        assert!(Arc::ptr_eq(&self.algebra, &other.algebra) || self.algebra == other.algebra);
        let (ix, iy) = (Matrix::identity(self.dim), Matrix::identity(other.dim));
        let matrices = self
            .matrices
            .iter()
            .zip(&other.matrices)
            .map(|(a, b)| &kron(a, &iy) + &kron(&ix, b))
            .collect();
        RepresentationData {
            name: format!("{}*{}", self.name, other.name),
            algebra: self.algebra.clone(),
            dim: self.dim * other.dim,
            matrices,
        }
    }

    pub fn tensor_all<'a>(mods: impl IntoIterator<Item = &'a RepresentationData>) -> Option<RepresentationData> {
        mods.into_iter().fold(None, |acc: Option<RepresentationData>, m| match acc {
            None => Some(m.clone()),
            Some(a) => Some(a.tensor(m)),
        })
    }

    /// Intertwiners `X -> Y`, as a basis of matrices.
    pub fn hom_space(&self, other: &RepresentationData) -> Vec<Matrix> {
        // Unknown f (dim_Y x dim_X), row-major: f rho_X(e) - rho_Y(e) f = 0.
        let (dx, dy) = (self.dim, other.dim);
        let nvars = dx * dy;
        let mut rows = Vec::new();
        for (a, b) in self.matrices.iter().zip(&other.matrices) {
            // (f a)_{ij} = sum_k f_{ik} a_{kj}; (b f)_{ij} = sum_k b_{ik} f_{kj}
            for i in 0..dy {
                for j in 0..dx {
                    let mut row = crate::kernel::SparseRow::new();
                    for (k, jj, v) in a.entries() {
                        if jj == j {
                            *row.entry(i * dx + k).or_insert_with(num_traits::Zero::zero) += v;
                        }
                    }
                    for (ii, k, v) in b.entries() {
                        if ii == i {
                            *row.entry(k * dx + j).or_insert_with(num_traits::Zero::zero) -= v;
                        }
                    }
                    row.retain(|_, v| !num_traits::Zero::is_zero(v));
                    if !row.is_empty() {
                        rows.push(row);
                    }
                }
            }
        }
        let rref = crate::kernel::Rref::from_rows(nvars, rows);
        rref.kernel_basis()
            .into_iter()
            .map(|v| {
                let mut f = Matrix::zeros(dy, dx);
                for (idx, c) in v {
                    f.set(idx / dx, idx % dx, c);
                }
                f
            })
            .collect()
    }

    pub fn length(&self) -> usize {
        socle_filtration(self).length()
    }
}

impl fmt::Display for RepresentationData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (dim {})", self.name, self.dim)
    }
}

/// Ascending chain of subspaces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Filtration {
    pub steps: Vec<Subspace>,
}

impl Filtration {
    /// Number of steps to reach the whole space.
    pub fn length(&self) -> usize {
        self.steps.len()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.steps.iter().map(Subspace::dim).collect()
    }

    /// Smallest `k` with `v in F^k`.
    pub fn degree_of(&self, v: &crate::kernel::SparseRow) -> Option<usize> {
        self.steps.iter().position(|s| s.contains(v))
    }
}

/// `F^0` is the joint kernel; `F^k = {v : rho(x) v in F^{k-1} for all x}`.
pub fn socle_filtration(v: &RepresentationData) -> Filtration {
    let d = v.dim;
    let mut steps: Vec<Subspace> = Vec::new();
    let mut current = Subspace::zero(d);
    if d == 0 {
        return Filtration { steps };
    }
    loop {
        // Rows of `ann` cut out `current`; stack ann * rho(x).
        let ann = annihilator(&current);
        let mut rows = Vec::new();
        for m in &v.matrices {
            let prod = &ann * m;
            for i in 0..prod.rows() {
                let r = prod.row_sparse(i);
                if !r.is_empty() {
                    rows.push(r);
                }
            }
        }
        let rref = crate::kernel::Rref::from_rows(d, rows);
        let next = Subspace::span(d, rref.kernel_basis());
        assert!(next.dim() > current.dim(), "unipotent action strictly enlarges the socle chain");
        steps.push(next.clone());
        if next.dim() == d {
            return Filtration { steps };
        }
        current = next;
    }
}

/// Matrix whose kernel is exactly `s`.
fn annihilator(s: &Subspace) -> Matrix {
    let d = s.ambient();
    let rref = crate::kernel::Rref::from_rows(d, s.basis().iter().cloned());
    let ann = rref.kernel_basis();
    let mut m = Matrix::zeros(ann.len(), d);
    for (i, r) in ann.iter().enumerate() {
        for (j, c) in r {
            m.set(i, *j, c.clone());
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::super::catalog;
    use super::*;

    #[test]
    fn socle_lengths() {
        let h = catalog::heisenberg();
        assert_eq!(RepresentationData::trivial(&h, 1, "1").length(), 1);
        let v2 = catalog::h3_v2();
        let f = socle_filtration(&v2);
        assert_eq!(f.length(), 2);
        assert_eq!(f.dims(), vec![1, 2]);
        assert!(f.steps[0].contains_dense(&[crate::kernel::int(1), crate::kernel::int(0)]));
        assert_eq!(catalog::h3_v3().length(), 3);
    }

    #[test]
    fn non_nilpotent_rejected() {
        let h = catalog::heisenberg();
        let spec = RepresentationSpec {
            name: "bad".into(),
            dim: 2,
            matrices: vec![Matrix::identity(2), Matrix::zeros(2, 2), Matrix::zeros(2, 2)],
        };
        assert!(validate_representation(&h, &spec).is_err());
    }

    #[test]
    fn engel_joint_kernel_nonzero() {
        for v in [catalog::h3_v2(), catalog::h3_v3(), catalog::h3_v3().tensor(&catalog::h3_v2())] {
            assert!(socle_filtration(&v).steps[0].dim() > 0);
        }
    }

    #[test]
    fn hom_space_of_trivial_modules() {
        let h = catalog::heisenberg();
        let a = RepresentationData::trivial(&h, 2, "a");
        assert_eq!(a.hom_space(&a).len(), 4);
        let v3 = catalog::h3_v3();
        // Scalars and E13.
        assert_eq!(v3.hom_space(&v3).len(), 2);
    }
}
