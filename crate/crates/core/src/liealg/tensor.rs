use std::fmt;
use std::sync::Arc;

use num_traits::Zero;
use serde::Serialize;

use super::{LieAlgebraData, RepresentationData};
use crate::error::{Error, Result};
use crate::kernel::{fmt_rational, kron_all, Matrix, Rational, Rref, SparseRow};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum TensorRole {
    SymmetricInvariant,
    RMatrix,
    General,
}

/// `sum t^{ij} e_i (x) e_j`, stored as the coefficient matrix `t^{ij}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoTensor {
    algebra: Arc<LieAlgebraData>,
    coeffs: Matrix,
    role: TensorRole,
}

impl TwoTensor {
    /// Validates the role's requirements: symmetry and invariance for `SymmetricInvariant`.
    pub fn new(g: &Arc<LieAlgebraData>, coeffs: Matrix, role: TensorRole) -> Result<Self> {
        let n = g.dim();
        if coeffs.rows() != n || coeffs.cols() != n {
            return Err(Error::Shape(format!("2-tensor coefficients must be {n}x{n}")));
        }
        let t = TwoTensor { algebra: g.clone(), coeffs, role: TensorRole::General };
        if role == TensorRole::SymmetricInvariant {
            if !t.is_symmetric() {
                return Err(Error::Check(format!("{} is not symmetric", t)));
            }
            if let Some(w) = t.invariance_defect() {
                return Err(Error::Check(format!("{} is not invariant: {w}", t)));
            }
        }
        Ok(TwoTensor { role, ..t })
    }

    pub fn zero(g: &Arc<LieAlgebraData>, role: TensorRole) -> Self {
        TwoTensor { algebra: g.clone(), coeffs: Matrix::zeros(g.dim(), g.dim()), role }
    }

    /// From `(coefficient, i, j)` triples.
    pub fn from_terms(g: &Arc<LieAlgebraData>, terms: &[(Rational, usize, usize)], role: TensorRole) -> Result<Self> {
        let n = g.dim();
        let mut m = Matrix::zeros(n, n);
        for (c, i, j) in terms {
            m.add_at(*i, *j, c);
        }
        Self::new(g, m, role)
    }

    /// `e_i (x) e_j - e_j (x) e_i`.
    pub fn wedge(g: &Arc<LieAlgebraData>, i: usize, j: usize) -> Self {
        let one = Rational::from_integer(1.into());
        Self::from_terms(g, &[(one.clone(), i, j), (-one, j, i)], TensorRole::RMatrix).expect("in range")
    }

    pub fn algebra(&self) -> &Arc<LieAlgebraData> {
        &self.algebra
    }

    pub fn coeffs(&self) -> &Matrix {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize, j: usize) -> Rational {
        self.coeffs.get(i, j)
    }

    pub fn role(&self) -> TensorRole {
        self.role
    }

    pub fn with_role(&self, role: TensorRole) -> Result<Self> {
        Self::new(&self.algebra, self.coeffs.clone(), role)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_zero()
    }

    /// `t^{21}`.
    pub fn flip(&self) -> TwoTensor {
        TwoTensor { algebra: self.algebra.clone(), coeffs: self.coeffs.transpose(), role: TensorRole::General }
    }

    pub fn plus(&self, other: &TwoTensor) -> TwoTensor {
        TwoTensor { algebra: self.algebra.clone(), coeffs: &self.coeffs + &other.coeffs, role: TensorRole::General }
    }

    pub fn scale(&self, c: &Rational) -> TwoTensor {
        TwoTensor { algebra: self.algebra.clone(), coeffs: self.coeffs.scale(c), role: self.role }
    }

    /// `r + r^{21}`.
    pub fn symmetrization(&self) -> TwoTensor {
        self.plus(&self.flip())
    }

    pub fn is_symmetric(&self) -> bool {
        self.coeffs == self.coeffs.transpose()
    }

    pub fn is_antisymmetric(&self) -> bool {
        (&self.coeffs + &self.coeffs.transpose()).is_zero()
    }

    /// Coefficients of `(ad_a (x) 1 + 1 (x) ad_a) t`, that is `A T + T A^T`.
    pub fn ad_action(&self, a: usize) -> Matrix {
        let ad = self.algebra.ad(a);
        &(&ad * &self.coeffs) + &(&self.coeffs * &ad.transpose())
    }

    /// First basis element whose adjoint action does not kill `t`.
    pub fn invariance_defect(&self) -> Option<String> {
        (0..self.algebra.dim()).find_map(|a| {
            let m = self.ad_action(a);
            (!m.is_zero()).then(|| {
                let img = TwoTensor { algebra: self.algebra.clone(), coeffs: m, role: TensorRole::General };
                format!("ad_{} gives {}", self.algebra.basis_names()[a], img)
            })
        })
    }

    pub fn is_invariant(&self) -> bool {
        self.invariance_defect().is_none()
    }

    /// Action on `X (x) Y`.
    pub fn action(&self, x: &RepresentationData, y: &RepresentationData) -> Matrix {
        let mut m = Matrix::zeros(x.dim() * y.dim(), x.dim() * y.dim());
        for (i, j, c) in self.coeffs.entries() {
            m = &m + &x.generator(i).kron(y.generator(j)).scale(c);
        }
        m
    }

    /// Action with the first leg in slot `p` and the second in slot `q` of `mods[0] (x) ... (x) mods[k-1]`.
    pub fn placement(&self, mods: &[&RepresentationData], p: usize, q: usize) -> Matrix {
        assert!(p != q && p < mods.len() && q < mods.len());
        let dim: usize = mods.iter().map(|m| m.dim()).product();
        let ids: Vec<Matrix> = mods.iter().map(|m| Matrix::identity(m.dim())).collect();
        let mut acc = Matrix::zeros(dim, dim);
        for (i, j, c) in self.coeffs.entries() {
            let factors: Vec<&Matrix> = (0..mods.len())
                .map(|s| {
                    if s == p {
                        mods[s].generator(i)
                    } else if s == q {
                        mods[s].generator(j)
                    } else {
                        &ids[s]
                    }
                })
                .collect();
            acc = &acc + &kron_all(factors).scale(c);
        }
        acc
    }

    /// Terms `(coefficient, i, j)` in row-major order.
    pub fn terms(&self) -> Vec<(Rational, usize, usize)> {
        self.coeffs.entries().map(|(i, j, c)| (c.clone(), i, j)).collect()
    }
}

impl fmt::Display for TwoTensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_zero() {
            return write!(f, "0");
        }
        let names = self.algebra.basis_names();
        let mut first = true;
        for (i, j, c) in self.coeffs.entries() {
            let neg = crate::kernel::is_negative(c);
            let abs = if neg { -c.clone() } else { c.clone() };
            let sep = match (first, neg) {
                (true, false) => "",
                (true, true) => "-",
                (false, false) => " + ",
                (false, true) => " - ",
            };
            let coef = if abs == Rational::from_integer(1.into()) { String::new() } else { format!("{}*", fmt_rational(&abs)) };
            write!(f, "{sep}{coef}{}*{}", names[i], names[j])?;
            first = false;
        }
        Ok(())
    }
}

/// Basis of `(S^2 g)^g`: the kernel of the stacked invariance operators on symmetric coefficient matrices.
pub fn invariant_symmetric_tensors(g: &Arc<LieAlgebraData>) -> Vec<TwoTensor> {
    let n = g.dim();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
    let var = |i: usize, j: usize| {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        pairs.iter().position(|p| *p == (i, j)).expect("pair")
    };
    let mut rows = Vec::new();
    for a in 0..n {
        let ad = g.ad(a);
        // (A T + T A^T)_{kl} = sum_i A_{ki} T_{il} + sum_j T_{kj} A_{lj}
        for k in 0..n {
            for l in 0..n {
                let mut row = SparseRow::new();
                for i in 0..n {
                    let c = ad.get(k, i);
                    if !c.is_zero() {
                        *row.entry(var(i, l)).or_insert_with(Rational::zero) += c;
                    }
                }
                for j in 0..n {
                    let c = ad.get(l, j);
                    if !c.is_zero() {
                        *row.entry(var(k, j)).or_insert_with(Rational::zero) += c;
                    }
                }
                row.retain(|_, v| !v.is_zero());
                if !row.is_empty() {
                    rows.push(row);
                }
            }
        }
    }
    let rref = Rref::from_rows(pairs.len(), rows);
    rref.kernel_basis()
        .into_iter()
        .map(|v| {
            let mut m = Matrix::zeros(n, n);
            for (idx, c) in v {
                let (i, j) = pairs[idx];
                m.set(i, j, c.clone());
                m.set(j, i, c);
            }
            TwoTensor::new(g, m, TensorRole::SymmetricInvariant).expect("kernel vectors are invariant")
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::super::catalog;
    use super::*;
    use crate::kernel::int;

    #[test]
    fn invariant_tensor_examples() {
        assert_eq!(invariant_symmetric_tensors(&catalog::abelian(3)).len(), 6);
        assert_eq!(invariant_symmetric_tensors(&catalog::abelian(1)).len(), 1);
        let h = catalog::heisenberg();
        let inv = invariant_symmetric_tensors(&h);
        let zz = TwoTensor::from_terms(&h, &[(int(1), 2, 2)], TensorRole::General).unwrap();
        assert_eq!(inv.len(), 1);
        assert_eq!(inv[0].coeffs(), zz.coeffs());
        let yz = TwoTensor::from_terms(&h, &[(int(1), 1, 2), (int(1), 2, 1)], TensorRole::General).unwrap();
        assert!(!yz.ad_action(0).is_zero());
        assert!(zz.ad_action(0).is_zero());
    }

    #[test]
    fn free_nilpotent_invariant() {
        let g = catalog::free_nilpotent_2_3();
        let t = catalog::f5_casimir();
        assert!(t.is_invariant());
        let inv = invariant_symmetric_tensors(&g);
        let span = crate::kernel::Subspace::span(
            25,
            inv.iter().map(|s| s.coeffs().entries().map(|(i, j, c)| (i * 5 + j, c.clone())).collect()),
        );
        assert!(span.contains(&t.coeffs().entries().map(|(i, j, c)| (i * 5 + j, c.clone())).collect()));
    }

    #[test]
    fn display_format() {
        let g = catalog::heisenberg_plus_line();
        let r = TwoTensor::wedge(&g, 0, 3);
        assert_eq!(r.to_string(), "x*w - w*x");
    }
}
