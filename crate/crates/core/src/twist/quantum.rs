use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::category::BraidedStructure;
use crate::error::{Error, Result};
use crate::freealg::FreeSeries;
use crate::kernel::{flip_operator, solve_system, Matrix, Rational, SparseRow};
use crate::liealg::{RepresentationData, TensorRole, TwoTensor};
use crate::pbw::{evaluate_series, PbwBasis, UTensor};
use crate::report::{first_witness, Check, Report};

/// Weight bound making every evaluation on registered triples exact.
pub fn twist_bound(mods: &[RepresentationData]) -> usize {
    let lengths: Vec<usize> = mods.iter().map(|m| m.length().saturating_sub(1)).collect();
    lengths.iter().copied().max().unwrap_or(0) * 3
}

#[derive(Clone, Debug, Serialize)]
pub struct TwistStep {
    pub degree: usize,
    pub unknowns: usize,
    pub equations: usize,
    /// A `wedge^2 g` correction was added one degree lower.
    pub corrected: bool,
}

/// `J = exp(j)` in `(U (x) U)[hbar]`, solving `J23 J_{1,23} Phi = J12 J_{12,3}`.
#[derive(Clone, Debug)]
pub struct TwistSeries {
    r: TwoTensor,
    t: TwoTensor,
    phi: FreeSeries,
    log: UTensor,
    element: UTensor,
    steps: Vec<TwistStep>,
}

impl TwistSeries {
    pub fn source(&self) -> &TwoTensor {
        &self.r
    }

    pub fn symmetric_part(&self) -> &TwoTensor {
        &self.t
    }

    pub fn associator(&self) -> &FreeSeries {
        &self.phi
    }

    pub fn element(&self) -> &UTensor {
        &self.element
    }

    pub fn log(&self) -> &UTensor {
        &self.log
    }

    pub fn steps(&self) -> &[TwistStep] {
        &self.steps
    }

    pub fn degree(&self) -> usize {
        self.element.hbar_degree()
    }

    pub fn basis(&self) -> &Arc<PbwBasis> {
        self.element.basis()
    }

    /// Adds `delta` at `key = [hbar, m1, m2]` of `J`; used to test that checks detect bad twists.
    pub fn perturbed(&self, key: &[u32], delta: &Rational) -> TwistSeries {
        let mut out = self.clone();
        out.element.add_term(key.to_vec(), delta.clone());
        out
    }

    pub fn to_text(&self) -> String {
        self.element.to_text()
    }
}

fn twist_residual(j: &UTensor, phi: &UTensor) -> Result<UTensor> {
    let big_j = j.exp()?;
    let lhs = big_j.embed(3, &[1, 2]).mul(&big_j.coproduct_at(1)).mul(phi);
    let rhs = big_j.embed(3, &[0, 1]).mul(&big_j.coproduct_at(0));
    Ok(&lhs - &rhs)
}

/// `x23 + (1 (x) Delta) x - x12 - (Delta (x) 1) x`.
fn coboundary(x: &UTensor) -> UTensor {
    &(&x.embed(3, &[1, 2]) + &x.coproduct_at(1)) - &(&x.embed(3, &[0, 1]) + &x.coproduct_at(0))
}

fn key_weight(b: &PbwBasis, key: &[u32]) -> usize {
    key[1..].iter().map(|m| b.weight(*m)).sum()
}

/// Solves `sum_k x_k columns[k] = target` exactly; `None` if infeasible.
fn solve_columns(columns: &[UTensor], target: &UTensor) -> Option<Vec<Rational>> {
    let mut rows: BTreeMap<Vec<u32>, (SparseRow, Rational)> = BTreeMap::new();
    for (k, col) in columns.iter().enumerate() {
        for (key, v) in col.terms() {
            rows.entry(key.clone()).or_insert_with(|| (SparseRow::new(), Rational::zero())).0.insert(k, v.clone());
        }
    }
    for (key, v) in target.terms() {
        rows.entry(key.clone()).or_insert_with(|| (SparseRow::new(), Rational::zero())).1 = v.clone();
    }
    solve_system(columns.len(), rows.into_values()).map(|(x, _)| x)
}

/// Degree-by-degree solve in `hbar`. At degree `d` the unknown `j_d` ranges over
/// monomial pairs of weight at least `2d`, so setting `hbar = 1` is exact once
/// `2(n + 1) > bound`.
pub fn solve_twist(r: &TwoTensor, phi: &FreeSeries, n: usize, bound: usize) -> Result<TwistSeries> {
    let g = r.algebra();
    let t = r
        .symmetrization()
        .with_role(TensorRole::SymmetricInvariant)
        .map_err(|e| Error::Invalid(format!("r + r21 must be symmetric invariant: {e}")))?;
    if n == 0 {
        return Err(Error::Invalid("twist degree must be at least 1".into()));
    }
    if phi.degree() < n {
        return Err(Error::DegreeTooSmall { have: phi.degree(), need: n });
    }
    if 2 * (n + 1) <= bound {
        return Err(Error::DegreeTooSmall { have: n, need: bound / 2 });
    }
    let basis = PbwBasis::new(g, bound)?;
    let t_u = UTensor::from_two_tensor(&basis, &t, 1, n);
    let phi_u = evaluate_series(&phi.with_degree(n), &[t_u.embed(3, &[0, 1]), t_u.embed(3, &[1, 2])])?;
    let r_u = UTensor::from_two_tensor(&basis, r, 1, n);

    // Degree 1: j_1 = c r with R_1 = c (r21 - r) + t/2 = r.
    let target = &r_u - &t_u.scale(&Rational::new(1.into(), 2.into()));
    let c = solve_columns(&[&r_u.flip() - &r_u], &target)
        .ok_or_else(|| Error::Infeasible { degree: 1, detail: "no multiple of r normalizes R".into() })?;
    let mut j = r_u.scale(&c[0]);
    let mut steps = vec![TwistStep { degree: 1, unknowns: 1, equations: 1, corrected: false }];

    let pairs: Vec<(u32, u32)> = (0..basis.len() as u32)
        .flat_map(|a| (0..basis.len() as u32).map(move |b| (a, b)))
        .filter(|&(a, b)| (a, b) != (0, 0) && basis.weight(a) + basis.weight(b) <= bound)
        .collect();

    for d in 2..=n {
        let phi_d = phi_u.with_hbar(d);
        let residual = twist_residual(&j.with_hbar(d), &phi_d)?.hbar_part(d);
        if residual.is_zero() {
            steps.push(TwistStep { degree: d, unknowns: 0, equations: 0, corrected: false });
            continue;
        }
        let target = residual.scale(&-Rational::one());
        let unknowns: Vec<(u32, u32)> =
            pairs.iter().copied().filter(|&(a, b)| basis.weight(a) + basis.weight(b) >= 2 * d).collect();
        let column = |&(a, b): &(u32, u32)| {
            let mut x = UTensor::zero(&basis, 2, d);
            x.add_term(vec![d as u32, a, b], Rational::one());
            coboundary(&x)
        };
        let columns: Vec<UTensor> = unknowns.par_iter().map(column).collect();

        // The coboundary preserves weight, so the system splits into weight blocks.
        let mut solution = UTensor::zero(&basis, 2, n);
        let mut feasible = true;
        let mut equations = 0;
        for w in 0..=bound {
            let idx: Vec<usize> = (0..unknowns.len())
                .filter(|k| basis.weight(unknowns[*k].0) + basis.weight(unknowns[*k].1) == w)
                .collect();
            let mut block_target = UTensor::zero(&basis, 3, d);
            for (key, v) in target.terms() {
                if key_weight(&basis, key) == w {
                    block_target.add_term(key.clone(), v.clone());
                }
            }
            if block_target.is_zero() {
                continue;
            }
            let cols: Vec<UTensor> = idx.iter().map(|k| columns[*k].clone()).collect();
            equations += cols.iter().map(UTensor::len).sum::<usize>();
            match solve_columns(&cols, &block_target) {
                Some(x) => {
                    for (k, v) in idx.iter().zip(x) {
                        if !v.is_zero() {
                            let (a, b) = unknowns[*k];
                            solution.add_term(vec![d as u32, a, b], v);
                        }
                    }
                }
                None => {
                    feasible = false;
                    break;
                }
            }
        }
        let mut corrected = false;
        if !feasible {
            if d < 3 {
                return Err(Error::Infeasible { degree: d, detail: "twist equation has no solution".into() });
            }
            corrected = true;
            solution = corrected_step(&basis, &j, &phi_d, &residual, &unknowns, &columns, d, n)?;
        }
        steps.push(TwistStep { degree: d, unknowns: unknowns.len(), equations, corrected });
        j = &j + &solution;
    }
    let element = j.exp()?;
    let check = twist_residual(&j, &phi_u)?;
    if !check.is_zero() {
        return Err(Error::Check(format!(
            "twist residual is nonzero in hbar-degree {}",
            check.min_hbar().unwrap_or_default()
        )));
    }
    Ok(TwistSeries { r: r.clone(), t, phi: phi.clone(), log: j, element, steps })
}

/// Solve at degree `d` allowing a `wedge^2 g` term at degree `d - 1`, whose effect
/// on the degree-`d` residual is affine and probed directly.
#[allow(clippy::too_many_arguments)]
fn corrected_step(
    basis: &Arc<PbwBasis>,
    j: &UTensor,
    phi_d: &UTensor,
    residual: &UTensor,
    unknowns: &[(u32, u32)],
    columns: &[UTensor],
    d: usize,
    n: usize,
) -> Result<UTensor> {
    let g = basis.algebra();
    let w = basis.weights();
    let mut wedges = Vec::new();
    for a in 0..g.dim() {
        for b in a + 1..g.dim() {
            if w[a] + w[b] >= 2 * (d - 1) {
                wedges.push(UTensor::from_two_tensor(basis, &TwoTensor::wedge(g, a, b), d - 1, n));
            }
        }
    }
    let probes: Vec<UTensor> = wedges
        .par_iter()
        .map(|rho| Ok(&twist_residual(&(j + rho).with_hbar(d), phi_d)?.hbar_part(d) - residual))
        .collect::<Result<_>>()?;
    let mut all = columns.to_vec();
    all.extend(probes);
    let x = solve_columns(&all, &residual.scale(&-Rational::one()))
        .ok_or_else(|| Error::Infeasible { degree: d, detail: "twist equation has no solution even with a wedge^2 g correction".into() })?;
    let mut out = UTensor::zero(basis, 2, n);
    for (k, v) in x.iter().enumerate() {
        if v.is_zero() {
            continue;
        }
        if k < unknowns.len() {
            let (a, b) = unknowns[k];
            out.add_term(vec![d as u32, a, b], v.clone());
        } else {
            out = &out + &wedges[k - unknowns.len()].scale(v);
        }
    }
    Ok(out)
}

/// `R = J21 exp(hbar t / 2) J^{-1}`.
#[derive(Clone, Debug)]
pub struct RMatrixSeries {
    r: TwoTensor,
    element: UTensor,
}

impl RMatrixSeries {
    pub fn new(r: TwoTensor, element: UTensor) -> Self {
        RMatrixSeries { r, element }
    }

    pub fn source(&self) -> &TwoTensor {
        &self.r
    }

    pub fn element(&self) -> &UTensor {
        &self.element
    }

    pub fn to_text(&self) -> String {
        self.element.to_text()
    }
}

pub fn r_matrix(j: &TwistSeries, t: &TwoTensor) -> Result<RMatrixSeries> {
    if t.coeffs() != j.t.coeffs() {
        return Err(Error::Invalid(format!("t = {t} is not r + r21 = {}", j.t)));
    }
    let b = j.basis();
    let t_u = UTensor::from_two_tensor(b, t, 1, j.degree()).scale(&Rational::new(1.into(), 2.into()));
    let big = j.element.flip().mul(&t_u.exp()?).mul(&j.element.inverse()?);
    Ok(RMatrixSeries { r: j.r.clone(), element: big })
}

fn names(mods: &[&RepresentationData]) -> String {
    format!("({})", mods.iter().map(|m| m.name()).collect::<Vec<_>>().join(","))
}

fn subject(mods: &[RepresentationData], arity: u32) -> String {
    let kind = if arity == 2 { "pairs" } else { "triples" };
    format!("{} {kind} over {}", mods.len().pow(arity), mods.iter().map(|m| m.name()).collect::<Vec<_>>().join(","))
}

fn triples(mods: &[RepresentationData]) -> Vec<[&RepresentationData; 3]> {
    mods.iter().flat_map(|x| mods.iter().flat_map(move |y| mods.iter().map(move |z| [x, y, z]))).collect()
}

fn pairs(mods: &[RepresentationData]) -> Vec<[&RepresentationData; 2]> {
    mods.iter().flat_map(|x| mods.iter().map(move |y| [x, y])).collect()
}

/// Normalization, unipotency, QYBE and both hexagons with trivial associator.
pub fn verify_qybe(r: &RMatrixSeries, mods: &[RepresentationData]) -> Result<Report> {
    let el = &r.element;
    let b = el.basis();
    let mut report = Report::new();
    let expected = UTensor::from_two_tensor(b, &r.r, 1, el.hbar_degree());
    let w = if !el.constant_term().is_one() {
        Some("constant term is not 1".to_string())
    } else if el.hbar_part(1) != expected.hbar_part(1) {
        Some(format!("hbar-linear part is {}", el.hbar_part(1)))
    } else {
        None
    };
    report.push(Check::new("r-matrix-normalization", format!("R = 1 + {} + ...", r.r), w));

    let eval = |mods: &[&RepresentationData]| el.evaluate(mods);
    let w = first_witness(&pairs(mods), |[x, y]| {
        let m = eval(&[x, y])?;
        Ok((!(&m - &Matrix::identity(m.rows())).is_nilpotent()).then(|| format!("{} R - Id is not nilpotent", names(&[x, y]))))
    })?;
    report.push(Check::new("unipotent-r-matrix", subject(mods, 2), w));

    let trip = triples(mods);
    let w = first_witness(&trip, |[x, y, z]| {
        let m = [*x, *y, *z];
        let r12 = el.embed(3, &[0, 1]).evaluate(&m)?;
        let r13 = el.embed(3, &[0, 2]).evaluate(&m)?;
        let r23 = el.embed(3, &[1, 2]).evaluate(&m)?;
        let lhs = &(&r12 * &r13) * &r23;
        let rhs = &(&r23 * &r13) * &r12;
        Ok(lhs.first_difference(&rhs).map(|w| format!("{} {w}", names(&m))))
    })?;
    report.push(Check::new("qybe", subject(mods, 3), w));

    let c = |x: &RepresentationData, y: &RepresentationData| -> Result<Matrix> {
        Ok(&flip_operator(x.dim(), y.dim()) * &eval(&[x, y])?)
    };
    let w = first_witness(&trip, |[x, y, z]| {
        let lhs = c(x, &y.tensor(z))?;
        let rhs = &Matrix::identity(y.dim()).kron(&c(x, z)?) * &c(x, y)?.kron(&Matrix::identity(z.dim()));
        Ok(lhs.first_difference(&rhs).map(|w| format!("{} {w}", names(&[x, y, z]))))
    })?;
    report.push(Check::new("hexagon1-trivial-associator", subject(mods, 3), w));
    let w = first_witness(&trip, |[x, y, z]| {
        let lhs = c(&x.tensor(y), z)?;
        let rhs = &c(x, z)?.kron(&Matrix::identity(y.dim())) * &Matrix::identity(x.dim()).kron(&c(y, z)?);
        Ok(lhs.first_difference(&rhs).map(|w| format!("{} {w}", names(&[x, y, z]))))
    })?;
    report.push(Check::new("hexagon2-trivial-associator", subject(mods, 3), w));
    Ok(report)
}

/// `hbar`-linear part of a two-leg tensor as an element of `g (x) g`.
fn linear_part(u: &UTensor) -> Result<TwoTensor> {
    let b = u.basis();
    let g = b.algebra();
    let gens: Vec<Option<u32>> = (0..g.dim()).map(|i| b.generator(i)).collect();
    let mut terms = Vec::new();
    for (key, c) in u.hbar_part(1).terms() {
        let i = gens.iter().position(|x| *x == Some(key[1]));
        let j = gens.iter().position(|x| *x == Some(key[2]));
        match (i, j) {
            (Some(i), Some(j)) => terms.push((c.clone(), i, j)),
            _ => return Err(Error::Check("hbar-linear part of log R is not in g (x) g".into())),
        }
    }
    TwoTensor::from_terms(g, &terms, TensorRole::General)
}

/// The `r` with `H(r) = log R`, where `H(r) = log r_matrix(solve_twist(r), r + r21)`,
/// by the iteration `r <- (log R - (H(r) - r))_1`.
pub fn recover_r(r: &RMatrixSeries, phi: &FreeSeries) -> Result<TwoTensor> {
    let el = &r.element;
    if !el.constant_term().is_one() {
        return Err(Error::NotNilpotent("R has constant term different from 1".into()));
    }
    let n = el.hbar_degree();
    let bound = el.basis().bound();
    let log_r = el.log()?;
    let h = |x: &TwoTensor| -> Result<UTensor> {
        let j = solve_twist(x, phi, n, bound)?;
        r_matrix(&j, &j.t)?.element.log()
    };
    let mut current = TwoTensor::zero(el.basis().algebra(), TensorRole::General);
    for _ in 0..=n {
        let hr = h(&current)?;
        let ru = UTensor::from_two_tensor(el.basis(), &current, 1, n);
        let next = linear_part(&(&log_r - &(&hr - &ru)))?;
        if next.coeffs() == current.coeffs() {
            let diff = &log_r - &hr;
            if let Some(d) = diff.min_hbar() {
                return Err(Error::Check(format!("fixed point does not reproduce log R at degree {d}")));
            }
            return Ok(next);
        }
        current = next;
    }
    Err(Error::Check(format!("r-recovery did not stabilize within {} steps", n + 1)))
}

/// Monoidal structure `J^{-1}` on the forgetful functor:
/// `alpha o J_{XY,Z} o (J_{X,Y} (x) 1) = J_{X,YZ} o (1 (x) J_{Y,Z})`, and compatibility
/// with the braidings `beta` and `P R`.
pub fn fiber_functor_check(j: &TwistSeries, mods: &[RepresentationData]) -> Result<Report> {
    let s = BraidedStructure::new(&j.t, &j.phi, mods.to_vec())?;
    let el = &j.element;
    let g = |x: &RepresentationData, y: &RepresentationData| -> Result<Matrix> { el.evaluate(&[x, y])?.inverse_unipotent() };
    let mut report = Report::new();
    let trip = triples(mods);
    let w = first_witness(&trip, |[x, y, z]| {
        let lhs = &(&*s.associativity(x, y, z)? * &g(&x.tensor(y), z)?) * &g(x, y)?.kron(&Matrix::identity(z.dim()));
        let rhs = &g(x, &y.tensor(z))? * &Matrix::identity(x.dim()).kron(&g(y, z)?);
        Ok(lhs.first_difference(&rhs).map(|w| format!("{} {w}", names(&[x, y, z]))))
    })?;
    report.push(Check::new("fiber-functor", subject(mods, 3), w).with_cutoff(j.degree()));

    let rm = r_matrix(j, &j.t)?;
    let w = first_witness(&pairs(mods), |[x, y]| {
        let lhs = &*s.braiding(x, y)? * &g(x, y)?;
        let rhs = &g(y, x)? * &(&flip_operator(x.dim(), y.dim()) * &rm.element.evaluate(&[x, y])?);
        Ok(lhs.first_difference(&rhs).map(|w| format!("{} {w}", names(&[x, y]))))
    })?;
    report.push(Check::new("braided-fiber-functor", subject(mods, 2), w).with_cutoff(j.degree()));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::associator::{solve_associator, TruncatedAssociator};
    use crate::kernel::q;
    use crate::liealg::catalog;

    #[test]
    fn abelian_twist_is_exponential() {
        let a = catalog::abelian(2);
        let r = TwoTensor::wedge(&a, 0, 1).scale(&q(1, 1));
        let phi = TruncatedAssociator::trivial(3);
        let j = solve_twist(&r, &phi, 3, 6).unwrap();
        let b = j.basis().clone();
        let expected = UTensor::from_two_tensor(&b, &r, 1, 3).scale(&q(-1, 2)).exp().unwrap();
        assert_eq!(j.element(), &expected);
        let rm = r_matrix(&j, j.symmetric_part()).unwrap();
        let er = UTensor::from_two_tensor(&b, &r, 1, 3).exp().unwrap();
        assert_eq!(rm.element(), &er);
    }

    #[test]
    fn zero_r_gives_unit_twist() {
        let h = catalog::heisenberg();
        let zero = TwoTensor::zero(&h, TensorRole::RMatrix);
        let j = solve_twist(&zero, &solve_associator(2).unwrap().into_series(), 2, 4).unwrap();
        assert_eq!(j.element(), &UTensor::one(j.basis(), 2, 2));
    }

    #[test]
    fn h3w_twist_and_r_matrix() {
        let g = catalog::heisenberg_plus_line();
        let r = TwoTensor::wedge(&g, 0, 3);
        let mods = catalog::h3w_corpus();
        let d = twist_bound(&mods);
        assert_eq!(d, 6);
        let phi = solve_associator(3).unwrap().into_series();
        let j = solve_twist(&r, &phi, 3, d).unwrap();
        assert!(!j.element().hbar_part(2).is_zero());
        let rm = r_matrix(&j, j.symmetric_part()).unwrap();
        let rep = verify_qybe(&rm, &mods).unwrap();
        assert!(rep.all_pass(), "{rep}");
        let rep = fiber_functor_check(&j, &mods).unwrap();
        assert!(rep.all_pass(), "{rep}");
        // Terms in g (x) g present in J are twist directions here; 1 (x) x has nonzero coboundary.
        let x = j.basis().generator(0).unwrap();
        let bad = fiber_functor_check(&j.perturbed(&[1, 0, x], &q(1, 3)), &mods).unwrap();
        assert!(!bad.all_pass());
        assert_eq!(recover_r(&rm, &phi).unwrap().coeffs(), r.coeffs());
    }
}
