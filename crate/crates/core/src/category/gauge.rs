//! Connecting twists between categories built from two associators with the same `t`.
//!
//! `T = exp(tau)` is solved in `(U (x) U)[hbar]` with `tau` symmetric, `g`-invariant and
//! commuting with `t`, subject to `Phi' = T23 T_{1,23} Phi T_{12,3}^{-1} T12^{-1}`.
//! The identity functor `C(Phi') -> C(Phi)` with tensor structure `T` is then checked
//! on matrices, independently of the solve.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{One, Zero};
use rayon::prelude::*;

use super::BraidedStructure;
use crate::error::{Error, Result};
use crate::freealg::FreeSeries;
use crate::kernel::{solve_system, Matrix, Rational, SparseRow};
use crate::liealg::RepresentationData;
use crate::pbw::{evaluate_series, PbwBasis, UTensor};
use crate::report::{first_witness, Check, Report};
use crate::twist::twist_bound;

#[derive(Clone, Debug)]
pub struct ConnectingTwist {
    log: UTensor,
    element: UTensor,
    report: Report,
}

impl ConnectingTwist {
    pub fn element(&self) -> &UTensor {
        &self.element
    }

    pub fn log(&self) -> &UTensor {
        &self.log
    }

    /// Matrix-level functor coherence, recomputed from the category data.
    pub fn report(&self) -> &Report {
        &self.report
    }

    pub fn is_trivial(&self) -> bool {
        self.log.is_zero()
    }

    pub fn to_text(&self) -> String {
        self.element.to_text()
    }
}

/// `T23 T_{1,23} Phi - Phi' T12 T_{12,3}`.
fn gauge_residual(tau: &UTensor, phi: &UTensor, phi2: &UTensor) -> Result<UTensor> {
    let t = tau.exp()?;
    let lhs = t.embed(3, &[1, 2]).mul(&t.coproduct_at(1)).mul(phi);
    let rhs = phi2.mul(&t.embed(3, &[0, 1])).mul(&t.coproduct_at(0));
    Ok(&lhs - &rhs)
}

/// Same coboundary as the twist equation; it is the linearization of `gauge_residual`.
fn coboundary(x: &UTensor) -> UTensor {
    &(&x.embed(3, &[1, 2]) + &x.coproduct_at(1)) - &(&x.embed(3, &[0, 1]) + &x.coproduct_at(0))
}

/// Linear constraints on one unknown monomial pair: the degree-`d` equation, then
/// symmetry, commutation with `t`, and commutation with each `Delta(e_i)`.
fn constraint_images(x: &UTensor, t: &UTensor, deltas: &[UTensor]) -> Vec<UTensor> {
    let mut out = vec![coboundary(x), &x.flip() - x, t.commutator(x)];
    out.extend(deltas.iter().map(|dl| dl.commutator(x)));
    out
}

/// Solves for `tau` one `hbar`-degree at a time. Both series are evaluated at
/// `a = hbar t12`, `b = hbar t23`; every term of `hbar`-degree `k` has weight at least `2k`.
pub(crate) fn solve_connecting(
    basis: &Arc<PbwBasis>,
    t: &UTensor,
    phi: &UTensor,
    phi2: &UTensor,
    n: usize,
) -> Result<UTensor> {
    let g = basis.algebra();
    let bound = basis.bound();
    let t0 = t.hbar_part(1).collapse_hbar().with_hbar(n);
    let deltas: Vec<UTensor> = (0..g.dim())
        .map(|i| {
            let mut v = vec![Rational::zero(); g.dim()];
            v[i] = Rational::one();
            UTensor::from_lie(basis, &v, n).coproduct_at(0)
        })
        .collect();
    let pairs: Vec<(u32, u32)> = (0..basis.len() as u32)
        .flat_map(|a| (0..basis.len() as u32).map(move |b| (a, b)))
        .filter(|&(a, b)| basis.weight(a) + basis.weight(b) <= bound)
        .collect();

    let mut tau = UTensor::zero(basis, 2, n);
    for d in 1..=n {
        let residual = gauge_residual(&tau.with_hbar(d), &phi.with_hbar(d), &phi2.with_hbar(d))?.hbar_part(d);
        if residual.is_zero() {
            continue;
        }
        let unknowns: Vec<(u32, u32)> =
            pairs.iter().copied().filter(|&(a, b)| basis.weight(a) + basis.weight(b) >= 2 * d).collect();
        let images: Vec<Vec<UTensor>> = unknowns
            .par_iter()
            .map(|&(a, b)| {
                let mut x = UTensor::zero(basis, 2, d);
                x.add_term(vec![d as u32, a, b], Rational::one());
                constraint_images(&x, &t0.with_hbar(d), &deltas.iter().map(|dl| dl.with_hbar(d)).collect::<Vec<_>>())
            })
            .collect();
        let mut rows: BTreeMap<(usize, Vec<u32>), (SparseRow, Rational)> = BTreeMap::new();
        for (k, imgs) in images.iter().enumerate() {
            for (family, img) in imgs.iter().enumerate() {
                for (key, v) in img.terms() {
                    rows.entry((family, key.clone())).or_insert_with(|| (SparseRow::new(), Rational::zero())).0.insert(k, v.clone());
                }
            }
        }
        for (key, v) in residual.terms() {
            rows.entry((0, key.clone())).or_insert_with(|| (SparseRow::new(), Rational::zero())).1 = -v.clone();
        }
        let (x, _) = solve_system(unknowns.len(), rows.into_values()).ok_or_else(|| Error::Infeasible {
            degree: d,
            detail: "no symmetric invariant twist connects the associators".into(),
        })?;
        for (&(a, b), v) in unknowns.iter().zip(x) {
            if !v.is_zero() {
                tau.add_term(vec![d as u32, a, b], v);
            }
        }
    }
    let check = gauge_residual(&tau, phi, phi2)?;
    if !check.is_zero() {
        return Err(Error::Check(format!(
            "gauge residual is nonzero in hbar-degree {}",
            check.min_hbar().unwrap_or_default()
        )));
    }
    Ok(tau)
}

/// Finds `T` with `Phi2 = Phi^T` acting on the modules of `s`, and certifies it on matrices.
pub fn connecting_twist(s: &BraidedStructure, phi2: &FreeSeries) -> Result<ConnectingTwist> {
    let other = BraidedStructure::new(s.tensor(), phi2, s.modules().to_vec())?;
    let bound = twist_bound(s.modules()).max(2);
    let n = (bound / 2).max(1);
    let basis = PbwBasis::new(s.algebra(), bound)?;
    let t_u = UTensor::from_two_tensor(&basis, s.tensor(), 1, n);
    let legs = [t_u.embed(3, &[0, 1]), t_u.embed(3, &[1, 2])];
    let phi_u = evaluate_series(s.associator(), &legs)?;
    let phi2_u = evaluate_series(phi2, &legs)?;
    let log = solve_connecting(&basis, &t_u, &phi_u, &phi2_u, n)?;
    let element = log.exp()?;
    let report = gauge_coherence_check(s, &other, &element)?;
    Ok(ConnectingTwist { log, element, report })
}

/// Coherence of the identity functor `target -> s` with tensor structure `T`:
/// `alpha'_{X,Y,Z} T_{XY,Z} (T_{X,Y} (x) 1) = T_{X,YZ} (1 (x) T_{Y,Z}) alpha_{X,Y,Z}`
/// and `beta_{X,Y} T_{X,Y} = T_{Y,X} beta_{X,Y}`.
pub fn gauge_coherence_check(s: &BraidedStructure, target: &BraidedStructure, twist: &UTensor) -> Result<Report> {
    if twist.legs() != 2 {
        return Err(Error::Shape("a tensor structure has two legs".into()));
    }
    if !twist.constant_term().is_one() {
        return Err(Error::Invalid("twist must have constant term 1".into()));
    }
    let mods = s.modules();
    let names: Vec<&str> = mods.iter().map(|m| m.name()).collect();
    let at = |x: &RepresentationData, y: &RepresentationData| twist.evaluate(&[x, y]);
    let id = Matrix::identity;
    let deg = s.associator().degree().min(target.associator().degree());
    let mut report = Report::new();

    let triples: Vec<[&RepresentationData; 3]> =
        mods.iter().flat_map(|x| mods.iter().flat_map(move |y| mods.iter().map(move |z| [x, y, z]))).collect();
    let witness = first_witness(&triples, |&[x, y, z]| {
        let (xy, yz) = (x.tensor(y), y.tensor(z));
        let lhs = &(&*target.associativity(x, y, z)? * &at(&xy, z)?) * &at(x, y)?.kron(&id(z.dim()));
        let rhs = &(&at(x, &yz)? * &id(x.dim()).kron(&at(y, z)?)) * &*s.associativity(x, y, z)?;
        Ok((lhs != rhs).then(|| format!("functor coherence fails on ({},{},{})", x.name(), y.name(), z.name())))
    })?;
    report.push(
        Check::new("gauge-coherence", format!("{} triples over {}", triples.len(), names.join(",")), witness).with_cutoff(deg),
    );

    let pairs: Vec<[&RepresentationData; 2]> = mods.iter().flat_map(|x| mods.iter().map(move |y| [x, y])).collect();
    let witness = first_witness(&pairs, |&[x, y]| {
        let lhs = &*s.braiding(x, y)? * &at(x, y)?;
        let rhs = &at(y, x)? * &*target.braiding(x, y)?;
        Ok((lhs != rhs).then(|| format!("functor does not commute with braiding on ({},{})", x.name(), y.name())))
    })?;
    report.push(Check::new("gauge-braiding", format!("{} pairs over {}", pairs.len(), names.join(",")), witness).with_cutoff(deg));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::associator::{solve_associator, solve_associator_with, SolverOptions};
    use crate::kernel::q;
    use crate::liealg::catalog;

    fn h3_structure(phi: &FreeSeries) -> BraidedStructure {
        BraidedStructure::new(&catalog::h3_zz(), phi, catalog::h3_corpus()).unwrap()
    }

    #[test]
    fn distinct_associators_are_connected_on_h3() {
        let phi = solve_associator(3).unwrap().into_series();
        let mut opts = SolverOptions::default();
        opts.free_values.insert((3, 0), q(1, 1));
        let phi2 = solve_associator_with(3, &opts).unwrap().associator.into_series();
        assert_ne!(phi, phi2);
        let s = h3_structure(&phi);
        let c = connecting_twist(&s, &phi2).unwrap();
        assert!(c.report().all_pass(), "{}", c.report());

        // 1 (x) z is not a cocycle and z acts on the length-3 module.
        let b = c.element().basis().clone();
        let z = b.generator(2).unwrap();
        let mut bad = c.element().clone();
        bad.add_term(vec![1, 0, z], q(1, 2));
        let other = h3_structure(&phi2);
        assert!(!gauge_coherence_check(&s, &other, &bad).unwrap().all_pass());
    }

    #[test]
    fn solver_recovers_a_planted_twist() {
        let g = catalog::heisenberg();
        let basis = PbwBasis::new(&g, 6).unwrap();
        let n = 3;
        let t = UTensor::from_two_tensor(&basis, &catalog::h3_zz(), 1, n);
        let phi_ser = solve_associator(3).unwrap().into_series();
        let phi = evaluate_series(&phi_ser, &[t.embed(3, &[0, 1]), t.embed(3, &[1, 2])]).unwrap();
        // tau0 = hbar (z (x) 1 + 1 (x) z): symmetric, invariant, with nonzero coboundary.
        let z = basis.generator(2).unwrap();
        let mut tau0 = UTensor::zero(&basis, 2, n);
        tau0.add_term(vec![1, z, 0], q(1, 1));
        tau0.add_term(vec![1, 0, z], q(1, 1));
        assert!(!coboundary(&tau0).is_zero());
        let big = tau0.exp().unwrap();
        let phi2 = big
            .embed(3, &[1, 2])
            .mul(&big.coproduct_at(1))
            .mul(&phi)
            .mul(&big.coproduct_at(0).inverse().unwrap())
            .mul(&big.embed(3, &[0, 1]).inverse().unwrap());
        let tau = solve_connecting(&basis, &t, &phi, &phi2, n).unwrap();
        assert!(gauge_residual(&tau, &phi, &phi2).unwrap().is_zero());
        assert_eq!(tau.flip(), tau);
    }
}
