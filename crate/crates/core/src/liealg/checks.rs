use std::collections::HashSet;
use std::sync::Arc;

use num_traits::Zero;
use serde::Serialize;

use super::{LieAlgebraData, RepresentationData, TensorRole, TwoTensor};
use crate::error::{Error, Result};
use crate::kernel::{Matrix, Rational, SparseRow, Subspace};
use crate::report::{Check, Report};

#[derive(Clone, Debug, Serialize)]
pub struct TerminationReport {
    pub lengths: Vec<usize>,
    /// Products of this many placements vanish by the socle-length argument.
    pub length_bound: usize,
    /// Each placement lowers the summed socle degree by 2, so longer products vanish.
    pub sharp_bound: usize,
    /// Smallest `n` such that every product of `n` placements is zero, by exhaustive search.
    pub minimal_vanishing_length: usize,
    /// Distinct nonzero products met during the search.
    pub products_checked: usize,
}

impl TerminationReport {
    pub fn holds(&self) -> bool {
        self.minimal_vanishing_length <= self.length_bound && self.minimal_vanishing_length <= self.sharp_bound + 1
    }

    /// Truncation degree beyond which every word in the placements acts by zero.
    pub fn required_degree(&self) -> usize {
        self.minimal_vanishing_length.saturating_sub(1)
    }
}

const SEARCH_LIMIT: usize = 500_000;

/// All placements `t_{pq}`, `p < q`, on `mods[0] (x) ... (x) mods[k-1]`.
pub fn placements(mods: &[&RepresentationData], t: &TwoTensor) -> Vec<Matrix> {
    let k = mods.len();
    let mut out = Vec::new();
    for p in 0..k {
        for q in p + 1..k {
            out.push(t.placement(mods, p, q));
        }
    }
    out
}

/// Exhaustive search over products of placements, deduplicated, with zero products pruned.
pub fn termination_bound_check(mods: &[&RepresentationData], t: &TwoTensor) -> Result<TerminationReport> {
    if t.role() == TensorRole::General {
        return Err(Error::Invalid("termination check needs a symmetric invariant tensor or an r-matrix".into()));
    }
    let lengths: Vec<usize> = mods.iter().map(|m| m.length()).collect();
    let k = mods.len();
    let total: usize = lengths.iter().sum();
    let length_bound = (total + 1).saturating_sub(k);
    let sharp_bound = lengths.iter().map(|l| l.saturating_sub(1)).sum::<usize>() / 2;
    let dim: usize = mods.iter().map(|m| m.dim()).product();
    let places: Vec<Matrix> = placements(mods, t).into_iter().filter(|m| !m.is_zero()).collect();

    let mut level: HashSet<Matrix> = HashSet::new();
    level.insert(Matrix::identity(dim));
    let mut n = 0;
    let mut checked = 0;
    while !level.is_empty() {
        if n > total + 1 {
            return Err(Error::Check(format!("placement products do not vanish by length {n}")));
        }
        let mut next = HashSet::new();
        for m in &level {
            for p in &places {
                let prod = p * m;
                if !prod.is_zero() {
                    next.insert(prod);
                }
            }
        }
        checked += next.len();
        if checked > SEARCH_LIMIT {
            return Err(Error::Invalid(format!("placement search exceeds {SEARCH_LIMIT} products")));
        }
        level = next;
        n += 1;
    }
    Ok(TerminationReport { lengths, length_bound, sharp_bound, minimal_vanishing_length: n, products_checked: checked })
}

/// Linear map `g -> g (x) g`: `images[i]` is the coefficient matrix of `delta(e_i)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cobracket {
    algebra: Arc<LieAlgebraData>,
    images: Vec<Matrix>,
}

impl Cobracket {
    pub fn new(g: &Arc<LieAlgebraData>, images: Vec<Matrix>) -> Result<Self> {
        let n = g.dim();
        if images.len() != n || images.iter().any(|m| m.rows() != n || m.cols() != n) {
            return Err(Error::Shape(format!("cobracket needs {n} coefficient matrices of size {n}x{n}")));
        }
        Ok(Cobracket { algebra: g.clone(), images })
    }

    pub fn zero(g: &Arc<LieAlgebraData>) -> Self {
        Cobracket { algebra: g.clone(), images: vec![Matrix::zeros(g.dim(), g.dim()); g.dim()] }
    }

    /// `delta(a) = (ad_a (x) 1 + 1 (x) ad_a) r`.
    pub fn coboundary(r: &TwoTensor) -> Self {
        let g = r.algebra();
        Cobracket { algebra: g.clone(), images: (0..g.dim()).map(|a| r.ad_action(a)).collect() }
    }

    pub fn algebra(&self) -> &Arc<LieAlgebraData> {
        &self.algebra
    }

    pub fn image(&self, i: usize) -> &Matrix {
        &self.images[i]
    }

    pub fn apply(&self, v: &[Rational]) -> Matrix {
        let n = self.algebra.dim();
        let mut m = Matrix::zeros(n, n);
        for (i, c) in v.iter().enumerate() {
            if !c.is_zero() {
                m = &m + &self.images[i].scale(c);
            }
        }
        m
    }
}

fn flatten(m: &Matrix) -> SparseRow {
    let n = m.cols();
    m.entries().map(|(i, j, c)| (i * n + j, c.clone())).collect()
}

fn tensor_name(g: &Arc<LieAlgebraData>, m: &Matrix) -> String {
    TwoTensor::new(g, m.clone(), TensorRole::General).map(|t| t.to_string()).unwrap_or_default()
}

/// Bracket of degree 1 and cobracket of degree 0 for the lower central series, co-Leibniz,
/// antisymmetry and co-Jacobi of `delta`.
pub fn filtration_degree_check(g: &Arc<LieAlgebraData>, delta: &Cobracket) -> Report {
    let n = g.dim();
    let class = g.nilpotency_class();
    let mut report = Report::new();

    let mut witness = None;
    'outer: for i in 0..class {
        for j in 0..class {
            let target = g.lcs_term(i + j + 1);
            for u in g.lcs_term(i).basis_dense() {
                for v in g.lcs_term(j).basis_dense() {
                    let b = g.bracket(&u, &v);
                    if !target.contains_dense(&b) {
                        witness = Some(format!(
                            "[{}, {}] = {} is not in g_{}",
                            g.format_vector(&u),
                            g.format_vector(&v),
                            g.format_vector(&b),
                            i + j + 1
                        ));
                        break 'outer;
                    }
                }
            }
        }
    }
    report.push(Check::new("bracket-degree", g.name(), witness));

    let mut witness = None;
    'outer: for i in 0..class {
        let mut gens = Vec::new();
        for p in 0..=i {
            for a in g.lcs_term(p).basis() {
                for b in g.lcs_term(i - p).basis() {
                    let mut row = SparseRow::new();
                    for (x, c) in a {
                        for (y, d) in b {
                            row.insert(x * n + y, c * d);
                        }
                    }
                    gens.push(row);
                }
            }
        }
        let target = Subspace::span(n * n, gens);
        for u in g.lcs_term(i).basis_dense() {
            let d = delta.apply(&u);
            if !target.contains(&flatten(&d)) {
                witness = Some(format!("delta({}) = {} leaves filtration degree {i}", g.format_vector(&u), tensor_name(g, &d)));
                break 'outer;
            }
        }
    }
    report.push(Check::new("cobracket-degree", g.name(), witness));

    let mut witness = None;
    'outer: for a in 0..n {
        for b in a + 1..n {
            let lhs = delta.apply(g.bracket_basis(a, b));
            // a . delta(b) - b . delta(a)
            let db = TwoTensor::new(g, delta.image(b).clone(), TensorRole::General).expect("shape");
            let da = TwoTensor::new(g, delta.image(a).clone(), TensorRole::General).expect("shape");
            let rhs = &db.ad_action(a) - &da.ad_action(b);
            if lhs != rhs {
                witness = Some(format!(
                    "delta([{0},{1}]) = {2} but {0}.delta({1}) - {1}.delta({0}) = {3}",
                    g.basis_names()[a],
                    g.basis_names()[b],
                    tensor_name(g, &lhs),
                    tensor_name(g, &rhs)
                ));
                break 'outer;
            }
        }
    }
    report.push(Check::new("co-leibniz", g.name(), witness));

    let witness = (0..n).find_map(|i| {
        let m = delta.image(i);
        (!(m + &m.transpose()).is_zero())
            .then(|| format!("delta({}) = {} is not antisymmetric", g.basis_names()[i], tensor_name(g, m)))
    });
    report.push(Check::new("cobracket-antisymmetry", g.name(), witness));

    let witness = (0..n).find_map(|i| {
        let d = co_jacobi_defect(delta, i);
        (!d.is_empty()).then(|| format!("co-Jacobi fails on {}", g.basis_names()[i]))
    });
    report.push(Check::new("co-jacobi", g.name(), witness));
    report
}

/// `(1 + s + s^2)(delta (x) 1) delta(e_i)` with `s` the cyclic shift, as a 3-tensor keyed by index triples.
fn co_jacobi_defect(delta: &Cobracket, i: usize) -> std::collections::BTreeMap<(usize, usize, usize), Rational> {
    let mut acc: std::collections::BTreeMap<(usize, usize, usize), Rational> = Default::default();
    for (j, k, c) in delta.image(i).entries() {
        for (p, q, d) in delta.image(j).entries() {
            let v = c * d;
            for key in [(p, q, k), (q, k, p), (k, p, q)] {
                *acc.entry(key).or_insert_with(Rational::zero) += &v;
            }
        }
    }
    acc.retain(|_, v| !v.is_zero());
    acc
}

#[cfg(test)]
mod tests {
    use super::super::catalog;
    use super::*;

    #[test]
    fn termination_examples() {
        let h = catalog::heisenberg();
        let one = RepresentationData::trivial(&h, 1, "1");
        let r = termination_bound_check(&[&one, &one, &one], &catalog::h3_zz()).unwrap();
        assert_eq!(r.minimal_vanishing_length, 1);
        let v2 = catalog::h3_v2();
        let r = termination_bound_check(&[&v2, &v2, &v2], &catalog::h3_zz()).unwrap();
        assert_eq!(r.length_bound, 4);
        assert!(r.holds());
        let zero = TwoTensor::zero(&h, TensorRole::SymmetricInvariant);
        assert_eq!(termination_bound_check(&[&v2, &v2, &v2], &zero).unwrap().minimal_vanishing_length, 1);
    }

    #[test]
    fn f5_needs_length_three() {
        let (v, w) = (catalog::f5_v4(), catalog::f5_w4());
        let r = termination_bound_check(&[&v, &w, &v], &catalog::f5_casimir()).unwrap();
        assert_eq!(r.minimal_vanishing_length, 3);
        assert!(r.holds());
    }

    #[test]
    fn cobracket_examples() {
        let h = catalog::heisenberg();
        assert!(filtration_degree_check(&h, &Cobracket::zero(&h)).all_pass());
        let a = catalog::abelian(2);
        let d = Cobracket::new(&a, vec![TwoTensor::wedge(&a, 0, 1).coeffs().clone(), Matrix::zeros(2, 2)]).unwrap();
        assert!(filtration_degree_check(&a, &d).all_pass());
        let mut images = vec![Matrix::zeros(3, 3); 3];
        images[2] = TwoTensor::wedge(&h, 0, 1).coeffs().clone();
        let bad = Cobracket::new(&h, images).unwrap();
        let rep = filtration_degree_check(&h, &bad);
        let failed: Vec<&str> = rep.failures().map(|c| c.check.as_str()).collect();
        // x*y - y*x also sits outside g_0 (x) g_1 + g_1 (x) g_0.
        assert_eq!(failed, vec!["cobracket-degree", "co-leibniz"]);
    }
}
