use std::sync::Arc;

use num_traits::{One, Zero};
use rayon::prelude::*;

use super::coradical::{coradical_filtration, PoissonBracket};
use super::{HopfData, Tensor2};
use crate::associator::solve_associator;
use crate::error::{Error, Result};
use crate::kernel::{binomial, Rational, SparseRow, Subspace};
use crate::liealg::{LieAlgebraData, TwoTensor};
use crate::pbw::{PbwBasis, UTensor};
use crate::report::{Check, Report};
use crate::twist::{r_matrix, solve_twist, TwistSeries};

/// Truncation degree used when none is given.
pub const DEFAULT_CUTOFF: usize = 4;

fn e(i: usize) -> SparseRow {
    SparseRow::from([(i, Rational::one())])
}

/// The ground field as a Hopf algebra.
pub fn trivial_coalgebra() -> HopfData {
    HopfData::coalgebra("Q", vec!["1".into()], vec![Tensor2::from([((0, 0), Rational::one())])], vec![Rational::one()])
        .and_then(|h| h.with_product(|_, _| e(0), e(0)))
        .and_then(|h| h.with_antipode(vec![e(0)]))
        .expect("valid")
}

/// `Q[x]` up to degree `d`: `Delta(x^k) = sum_i binom(k, i) x^i (x) x^{k-i}`.
pub fn truncated_polynomial(d: usize) -> HopfData {
    let names: Vec<String> = (0..=d)
        .map(|k| match k {
            0 => "1".to_string(),
            1 => "x".to_string(),
            _ => format!("x^{k}"),
        })
        .collect();
    let comult: Vec<Tensor2> = (0..=d)
        .map(|k| (0..=k).map(|i| ((i, k - i), Rational::from_integer(binomial(k, i)))).collect())
        .collect();
    let counit: Vec<Rational> = (0..=d).map(|k| if k == 0 { Rational::one() } else { Rational::zero() }).collect();
    let sign = |k: usize| if k % 2 == 0 { Rational::one() } else { -Rational::one() };
    HopfData::coalgebra(format!("Q[x]<={d}"), names, comult, counit)
        .and_then(|h| h.with_product(|i, j| if i + j <= d { e(i + j) } else { SparseRow::new() }, e(0)))
        .and_then(|h| h.with_antipode((0..=d).map(|k| SparseRow::from([(k, sign(k))])).collect()))
        .and_then(|h| h.with_grading((0..=d).collect(), d))
        .expect("valid")
}

/// Group algebra of the cyclic group of order 2: two group-like basis elements.
pub fn two_group_like() -> HopfData {
    let comult = vec![Tensor2::from([((0, 0), Rational::one())]), Tensor2::from([((1, 1), Rational::one())])];
    HopfData::coalgebra("Q[C2]", vec!["1".into(), "s".into()], comult, vec![Rational::one(), Rational::one()])
        .and_then(|h| h.with_product(|i, j| e((i + j) % 2), e(0)))
        .and_then(|h| h.with_antipode(vec![e(0), e(1)]))
        .expect("valid")
}

/// `U(L)` on PBW monomials of weight at most `d`, with primitive generators.
pub fn enveloping_hopf(g: &Arc<LieAlgebraData>, d: usize) -> Result<HopfData> {
    let basis = PbwBasis::new(g, d)?;
    enveloping_from_basis(&basis)
}

fn enveloping_from_basis(basis: &Arc<PbwBasis>) -> Result<HopfData> {
    let n = basis.len();
    let names: Vec<String> = (0..n as u32).map(|m| basis.mono_name(m)).collect();
    let comult: Vec<Tensor2> = (0..n as u32)
        .map(|m| basis.coproduct(m).iter().map(|(a, b, c)| ((*a as usize, *b as usize), c.clone())).collect())
        .collect();
    let counit: Vec<Rational> = (0..n).map(|m| if m == 0 { Rational::one() } else { Rational::zero() }).collect();
    let to_row = |terms: &[(u32, Rational)]| -> SparseRow { terms.iter().map(|(m, c)| (*m as usize, c.clone())).collect() };
    let antipode: Vec<SparseRow> = (0..n as u32).map(|m| to_row(&basis.antipode(m))).collect();
    HopfData::coalgebra(format!("U({})<={}", basis.algebra().name(), basis.bound()), names, comult, counit)?
        .with_product(|i, j| to_row(&basis.mul(i as u32, j as u32)), e(0))?
        .with_antipode(antipode)?
        .with_grading((0..n as u32).map(|m| basis.weight(m)).collect(), basis.bound())
}

/// Solutions of `Delta x = x (x) 1 + 1 (x) x`.
pub fn primitives(h: &HopfData) -> Result<Subspace> {
    let unit = h.unit().ok_or_else(|| Error::Invalid(format!("{} has no unit", h.name())))?.clone();
    let n = h.dim();
    let mut rows: std::collections::BTreeMap<(usize, usize), SparseRow> = Default::default();
    for x in 0..n {
        let mut t = h.comult(x).clone();
        for (u, c) in &unit {
            for key in [(x, *u), (*u, x)] {
                let v = t.entry(key).or_insert_with(Rational::zero);
                *v -= c;
            }
        }
        for (key, v) in t {
            if !v.is_zero() {
                rows.entry(key).or_default().insert(x, v);
            }
        }
    }
    Ok(Subspace::span(n, crate::kernel::Rref::from_rows(n, rows.into_values()).kernel_basis()))
}

fn delta_tensor(basis: &Arc<PbwBasis>, m: u32, hbar: usize) -> UTensor {
    let mut d = UTensor::zero(basis, 2, hbar);
    for (a, b, c) in basis.coproduct(m).iter() {
        d.add_term(vec![0, *a, *b], c.clone());
    }
    d
}

/// `O(G)` as the graded dual of `U(g)` up to weight `d`, with `{f, g}(u) = (f (x) g)([r, Delta u])`.
pub fn lie_poisson_bracket(g: &Arc<LieAlgebraData>, r: &TwoTensor, d: usize) -> Result<(HopfData, PoissonBracket)> {
    if !Arc::ptr_eq(r.algebra(), g) && r.algebra().as_ref() != g.as_ref() {
        return Err(Error::Mismatch("r is over a different Lie algebra".into()));
    }
    let basis = PbwBasis::new(g, d)?;
    let o = enveloping_from_basis(&basis)?.dual()?.renamed(format!("O({})<={d}", g.name()));
    let r_u = UTensor::from_two_tensor(&basis, r, 0, 0);
    let n = basis.len();
    let images: Vec<UTensor> = (0..n as u32).into_par_iter().map(|m| r_u.commutator(&delta_tensor(&basis, m, 0))).collect();
    let mut table: std::collections::BTreeMap<(usize, usize), SparseRow> = Default::default();
    for (m, im) in images.iter().enumerate() {
        for (key, c) in im.terms() {
            table.entry((key[1] as usize, key[2] as usize)).or_default().insert(m, c.clone());
        }
    }
    let bracket = PoissonBracket::from_fn(n, |i, j| table.get(&(i, j)).cloned().unwrap_or_default());
    Ok((o, bracket))
}

/// `O(G)` with product dual to `u -> J Delta(u) J^{-1}` and its r-form `rho(f, g) = (f (x) g)(R)`.
#[derive(Clone, Debug)]
pub struct TwistedFunctionAlgebra {
    hopf: HopfData,
    untwisted: HopfData,
    twist: TwistSeries,
    /// `rho[i][j] = rho(e^i, e^j)`.
    rform: Vec<Vec<Rational>>,
    report: Report,
}

impl TwistedFunctionAlgebra {
    pub fn hopf(&self) -> &HopfData {
        &self.hopf
    }

    pub fn untwisted(&self) -> &HopfData {
        &self.untwisted
    }

    pub fn twist(&self) -> &TwistSeries {
        &self.twist
    }

    pub fn rform(&self, i: usize, j: usize) -> &Rational {
        &self.rform[i][j]
    }

    /// Certification: bialgebra axioms, antipode, coconnectedness and the r-form axioms.
    pub fn report(&self) -> &Report {
        &self.report
    }

    /// The r-form differs from the counit pairing `eps (x) eps`.
    pub fn rform_is_trivial(&self) -> bool {
        let n = self.hopf.dim();
        (0..n).all(|i| (0..n).all(|j| self.rform[i][j] == &self.hopf.counit()[i] * &self.hopf.counit()[j]))
    }

    /// Twisting changed some product of basis elements within the cutoff.
    pub fn product_changed(&self) -> bool {
        let n = self.hopf.dim();
        (0..n).any(|i| (0..n).any(|j| self.hopf.fits(&[i, j]) && self.hopf.product(i, j) != self.untwisted.product(i, j)))
    }

    /// `f g - g f` on basis elements.
    pub fn commutator(&self, i: usize, j: usize) -> SparseRow {
        let mut out = self.hopf.product(i, j).cloned().unwrap_or_default();
        for (k, c) in self.hopf.product(j, i).cloned().unwrap_or_default() {
            let v = out.entry(k).or_insert_with(Rational::zero);
            *v -= c;
            if v.is_zero() {
                out.remove(&k);
            }
        }
        out
    }

    /// First pair of linear functions (duals of generators) that fails to commute.
    pub fn degree_two_defect(&self) -> Option<(usize, usize, SparseRow)> {
        let g = self.hopf.grading().expect("graded");
        let basis = self.twist.basis();
        let linear: Vec<usize> =
            (0..basis.algebra().dim()).filter_map(|i| basis.generator(i)).map(|m| m as usize).collect();
        for &i in &linear {
            for &j in &linear {
                if i < j && g[i] + g[j] <= self.hopf.cutoff().unwrap_or(usize::MAX) {
                    let c = self.commutator(i, j);
                    if !c.is_empty() {
                        return Some((i, j, c));
                    }
                }
            }
        }
        None
    }

    pub fn rform_text(&self) -> String {
        let names = self.hopf.basis_names();
        let mut s = String::new();
        for (i, row) in self.rform.iter().enumerate() {
            for (j, c) in row.iter().enumerate() {
                if !c.is_zero() {
                    s.push_str(&format!("rho {} {} : {}\n", names[i], names[j], crate::kernel::fmt_rational(c)));
                }
            }
        }
        s
    }
}

/// Twisted function algebra of the unipotent group of `g` up to weight `d`.
/// The twist is solved to `hbar`-degree `d / 2`, which makes `hbar = 1` exact.
pub fn twisted_function_algebra(g: &Arc<LieAlgebraData>, r: &TwoTensor, d: usize) -> Result<TwistedFunctionAlgebra> {
    if r.algebra().as_ref() != g.as_ref() {
        return Err(Error::Mismatch("r is over a different Lie algebra".into()));
    }
    if d == 0 {
        return Err(Error::Invalid("cutoff must be at least 1".into()));
    }
    let n_hbar = (d / 2).max(1);
    let phi = solve_associator(n_hbar)?.into_series();
    let twist = solve_twist(r, &phi, n_hbar, d)?;
    let basis = twist.basis().clone();
    let u = enveloping_from_basis(&basis)?;
    let untwisted = u.dual()?.renamed(format!("O({})<={d}", g.name()));
    let n = basis.len();

    let j = twist.element().collapse_hbar();
    let j_inv = twist.element().inverse()?.collapse_hbar();
    let conj: Vec<UTensor> =
        (0..n as u32).into_par_iter().map(|m| j.mul(&delta_tensor(&basis, m, 0)).mul(&j_inv)).collect();
    let mut table: std::collections::BTreeMap<(usize, usize), SparseRow> = Default::default();
    for (m, c) in conj.iter().enumerate() {
        for (key, v) in c.terms() {
            table.entry((key[1] as usize, key[2] as usize)).or_default().insert(m, v.clone());
        }
    }
    let mut hopf = HopfData::coalgebra(
        format!("O({})<={d} twisted by J(r)", g.name()),
        untwisted.basis_names().to_vec(),
        (0..n).map(|i| untwisted.comult(i).clone()).collect(),
        untwisted.counit().to_vec(),
    )?
    .with_product(|a, b| table.get(&(a, b)).cloned().unwrap_or_default(), untwisted.unit().expect("unit").clone())?
    .with_grading(untwisted.grading().expect("graded").to_vec(), d)?;
    let antipode = hopf.convolution_antipode()?;
    hopf = hopf.with_antipode(antipode)?;

    let rm = r_matrix(&twist, twist.symmetric_part())?.element().collapse_hbar();
    let mut rform = vec![vec![Rational::zero(); n]; n];
    for (key, c) in rm.terms() {
        rform[key[1] as usize][key[2] as usize] = c.clone();
    }

    let mut report = hopf.verify_axioms()?;
    let filt = coradical_filtration(&hopf);
    let w = (!filt.is_coconnected()).then(|| format!("coradical has dimension {}", filt.levels()[0].dim()));
    report.push(Check::new("coconnected", hopf.name(), w).with_cutoff(d));
    report.extend(rform_checks(&hopf, &rform));
    Ok(TwistedFunctionAlgebra { hopf, untwisted, twist, rform, report })
}

fn rho_vec(rform: &[Vec<Rational>], f: &SparseRow, g: &SparseRow) -> Rational {
    let mut s = Rational::zero();
    for (i, x) in f {
        for (j, y) in g {
            s += x * y * &rform[*i][*j];
        }
    }
    s
}

/// Unitality, `rho(fg, h) = rho(f, h1) rho(g, h2)`, `rho(f, gh) = rho(f1, h) rho(f2, g)`
/// and `rho(f1, g1) f2 g2 = g1 f1 rho(f2, g2)`, on tuples within the cutoff.
fn rform_checks(h: &HopfData, rho: &[Vec<Rational>]) -> Report {
    let n = h.dim();
    let d = h.cutoff().unwrap_or(usize::MAX);
    let unit = h.unit().expect("unit").clone();
    let mut report = Report::new();
    let cut = |c: Check| c.with_cutoff(d);

    let w = (0..n).find_map(|i| {
        let ok = rho_vec(rho, &unit, &e(i)) == h.counit()[i] && rho_vec(rho, &e(i), &unit) == h.counit()[i];
        (!ok).then(|| format!("rho(1, {0}) or rho({0}, 1) differs from the counit", h.basis_names()[i]))
    });
    report.push(cut(Check::new("r-form-unit", h.name(), w)));

    let triples: Vec<(usize, usize, usize)> = (0..n)
        .flat_map(|a| (0..n).flat_map(move |b| (0..n).map(move |c| (a, b, c))))
        .filter(|&(a, b, c)| h.fits(&[a, b, c]))
        .collect();
    let name = |i: usize| h.basis_names()[i].clone();

    let w = triples.par_iter().find_first(|&&(a, b, c)| {
        let lhs = rho_vec(rho, h.product(a, b).expect("product"), &e(c));
        let rhs: Rational = h.comult(c).iter().map(|((p, q), k)| k * &rho[a][*p] * &rho[b][*q]).sum();
        lhs != rhs
    });
    let w = w.map(|&(a, b, c)| format!("rho({} {}, {}) differs from the split form", name(a), name(b), name(c)));
    report.push(cut(Check::new("r-form-left", h.name(), w)));

    let w = triples.par_iter().find_first(|&&(a, b, c)| {
        let lhs = rho_vec(rho, &e(a), h.product(b, c).expect("product"));
        let rhs: Rational = h.comult(a).iter().map(|((p, q), k)| k * &rho[*p][c] * &rho[*q][b]).sum();
        lhs != rhs
    });
    let w = w.map(|&(a, b, c)| format!("rho({}, {} {}) differs from the split form", name(a), name(b), name(c)));
    report.push(cut(Check::new("r-form-right", h.name(), w)));

    let pairs: Vec<(usize, usize)> =
        (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).filter(|&(a, b)| h.fits(&[a, b])).collect();
    let w = pairs.par_iter().find_first(|&&(a, b)| {
        let mut lhs = SparseRow::new();
        let mut rhs = SparseRow::new();
        for ((a1, a2), x) in h.comult(a) {
            for ((b1, b2), y) in h.comult(b) {
                let l = x * y * &rho[*a1][*b1];
                if !l.is_zero() {
                    add(&mut lhs, &l, h.product(*a2, *b2).expect("product"));
                }
                let r = x * y * &rho[*a2][*b2];
                if !r.is_zero() {
                    add(&mut rhs, &r, h.product(*b1, *a1).expect("product"));
                }
            }
        }
        lhs != rhs
    });
    let w = w.map(|&(a, b)| format!("rho does not intertwine the products on ({}, {})", name(a), name(b)));
    report.push(cut(Check::new("r-form-commutation", h.name(), w)));
    report
}

fn add(acc: &mut SparseRow, c: &Rational, v: &SparseRow) {
    for (k, x) in v {
        let e = acc.entry(*k).or_insert_with(Rational::zero);
        *e += c * x;
        if e.is_zero() {
            acc.remove(k);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hopf::{filtration_preservation_check, PoissonBracket};
    use crate::kernel::q;
    use crate::liealg::catalog;

    fn length_span(basis: &PbwBasis, n: usize, by_weight: bool) -> Subspace {
        let k = basis.len();
        let vs = (0..k as u32).filter(|m| if by_weight { basis.weight(*m) <= n } else { basis.length(*m) <= n });
        Subspace::span(k, vs.map(|m| e(m as usize)))
    }

    #[test]
    fn small_coalgebras() {
        let f = coradical_filtration(&two_group_like());
        assert!(!f.is_coconnected());
        assert_eq!(f.dims(), vec![2]);
        let f = coradical_filtration(&trivial_coalgebra());
        assert!(f.is_coconnected() && f.routes_agree());
        assert_eq!(f.dims(), vec![1]);
        for h in [two_group_like(), trivial_coalgebra(), truncated_polynomial(4)] {
            let rep = h.verify_axioms().unwrap();
            assert!(rep.all_pass(), "{rep}");
        }
        let f = coradical_filtration(&truncated_polynomial(4));
        assert_eq!(f.dims(), vec![1, 2, 3, 4, 5]);
        assert!(f.routes_agree());
    }

    #[test]
    fn polynomial_matches_abelian_envelope() {
        let u = enveloping_hopf(&catalog::abelian(1), 4).unwrap();
        let p = truncated_polynomial(4);
        assert_eq!(u.to_text().lines().skip(1).collect::<Vec<_>>(), p.to_text().lines().skip(1).collect::<Vec<_>>());
        let rep = filtration_preservation_check(&p, &PoissonBracket::zero(p.dim())).unwrap();
        assert!(rep.all_pass(), "{rep}");
    }

    #[test]
    fn heisenberg_envelope() {
        let g = catalog::heisenberg();
        let u = enveloping_hopf(&g, 4).unwrap();
        let rep = u.verify_axioms().unwrap();
        assert!(rep.all_pass(), "{rep}");
        assert!(u.cocommutativity_check().pass);
        let f = coradical_filtration(&u);
        assert!(f.is_coconnected() && f.routes_agree());
        let basis = PbwBasis::new(&g, 4).unwrap();
        for (n, level) in f.levels().iter().enumerate() {
            assert_eq!(level, &length_span(&basis, n, false), "C_{n}");
        }
        let prim = primitives(&u).unwrap();
        assert_eq!(prim, Subspace::span(u.dim(), (0..3).map(|i| e(basis.generator(i).unwrap() as usize))));
        // The closed-form antipode agrees with the convolution series.
        assert_eq!(u.convolution_antipode().unwrap(), u.antipode().unwrap().to_vec());
    }

    #[test]
    fn function_algebra_filtration_and_bracket() {
        let g = catalog::heisenberg_plus_line();
        let r = TwoTensor::wedge(&g, 0, 3);
        let (o, bracket) = lie_poisson_bracket(&g, &r, 4).unwrap();
        let f = coradical_filtration(&o);
        let basis = PbwBasis::new(&g, 4).unwrap();
        for (n, level) in f.levels().iter().enumerate() {
            assert_eq!(level, &length_span(&basis, n, true), "C_{n}");
        }
        let rep = filtration_preservation_check(&o, &bracket).unwrap();
        assert!(rep.all_pass(), "{rep}");
        let mut bad = bracket.clone();
        let (x, y) = (basis.generator(0).unwrap() as usize, basis.generator(1).unwrap() as usize);
        let xx = basis.monomial_index(&[2, 0, 0, 0]).unwrap() as usize;
        bad.set(x, y, e(xx));
        let rep = filtration_preservation_check(&o, &bad).unwrap();
        let failed: Vec<&str> = rep.failures().map(|c| c.check.as_str()).collect();
        assert_eq!(failed, vec!["bracket-filtration"]);
    }

    #[test]
    fn twisted_function_algebras() {
        let g = catalog::heisenberg_plus_line();
        let r = TwoTensor::wedge(&g, 0, 3);
        let t = twisted_function_algebra(&g, &r, DEFAULT_CUTOFF).unwrap();
        assert!(t.report().all_pass(), "{}", t.report());
        assert!(t.product_changed() && !t.rform_is_trivial());
        let basis = t.twist().basis().clone();
        let (i, j, c) = t.degree_two_defect().expect("noncommutative");
        let names = t.hopf().basis_names();
        assert_eq!((names[i].as_str(), names[j].as_str()), ("[w]", "[z]"));
        let y = basis.generator(1).unwrap() as usize;
        assert_eq!(c, SparseRow::from([(y, q(1, 1))]));

        let h = catalog::heisenberg();
        let central = twisted_function_algebra(&h, &TwoTensor::wedge(&h, 0, 2), DEFAULT_CUTOFF).unwrap();
        assert!(central.report().all_pass(), "{}", central.report());
        assert!(!central.product_changed() && !central.rform_is_trivial());

        let a = catalog::abelian(2);
        let mut m = crate::kernel::Matrix::zeros(2, 2);
        m.set(0, 1, q(1, 1));
        let r = TwoTensor::new(&a, m, crate::liealg::TensorRole::General).unwrap();
        let ab = twisted_function_algebra(&a, &r, DEFAULT_CUTOFF).unwrap();
        assert!(ab.report().all_pass(), "{}", ab.report());
        assert!(!ab.product_changed() && !ab.rform_is_trivial());
        assert!(ab.hopf().commutativity_check().unwrap().pass);
        // Commuting legs give R = exp(r) with r = x (x) y.
        let b = ab.twist().basis().clone();
        let (x, y) = (b.generator(0).unwrap() as usize, b.generator(1).unwrap() as usize);
        let (x2, y2) = (b.monomial_index(&[2, 0]).unwrap() as usize, b.monomial_index(&[0, 2]).unwrap() as usize);
        assert_eq!(ab.rform(x, y), &q(1, 1));
        assert_eq!(ab.rform(x2, y2), &q(1, 2));
        assert!(ab.rform(y, x).is_zero());
    }
}
