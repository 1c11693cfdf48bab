//! Degree-truncated Lie associators in two letters `a`, `b`.
//!
//! Conventions, with `P` the flip and operators composed right to left:
//!
//! * associativity `(XY)Z -> X(YZ)` is `Phi(t12, t23)`, braiding is `P e^{t/2}`;
//! * first hexagon: `Phi(t23,t13) e^{(t12+t13)/2} Phi(t12,t23) = e^{t13/2} Phi(t12,t13) e^{t12/2}`;
//! * second hexagon:
//!   `Phi(t13,t12)^{-1} e^{(t13+t23)/2} Phi(t12,t23)^{-1} = e^{t13/2} Phi(t13,t23)^{-1} e^{t23/2}`;
//! * pentagon:
//!   `Phi(t12,t23+t24) Phi(t13+t23,t34) = Phi(t23,t34) Phi(t12+t13,t24+t34) Phi(t12,t23)`;
//! * a twist `T` acts by `Phi^T = T23 T_{1,23} Phi T_{12,3}^{-1} T12^{-1}`.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::freealg::{Alphabet, DkAlgebra, FreeSeries, Word};
use crate::kernel::{solve_system, Echelon, Rational, SparseRow};

/// A group-like series `Phi(a, b)` satisfying pentagon and hexagons to its truncation degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedAssociator {
    series: FreeSeries,
}

/// Defects of the three associator equations, as normal forms.
#[derive(Clone, Debug)]
pub struct Residuals {
    pub hexagon1: FreeSeries,
    pub hexagon2: FreeSeries,
    pub pentagon: FreeSeries,
}

impl Residuals {
    pub fn all_zero(&self) -> bool {
        self.hexagon1.is_zero() && self.hexagon2.is_zero() && self.pentagon.is_zero()
    }
}

impl TruncatedAssociator {
    /// Certifies `series`: constant term 1, no degree-1 part, Lie logarithm, vanishing residuals.
    pub fn certify(series: FreeSeries) -> Result<Self> {
        check_shape(&series)?;
        if !series.homogeneous(1).is_zero() {
            return Err(Error::Check("degree-1 part is nonzero".into()));
        }
        let log = series.log_trunc()?;
        for d in 1..=series.degree() {
            if !log.homogeneous(d).is_lie() {
                return Err(Error::Check(format!("logarithm is not Lie in degree {d}")));
            }
        }
        let r = residuals(&series)?;
        if !r.all_zero() {
            return Err(Error::Check(format!(
                "associator equations fail: hexagon1 {}, hexagon2 {}, pentagon {}",
                r.hexagon1, r.hexagon2, r.pentagon
            )));
        }
        Ok(TruncatedAssociator { series })
    }

    /// The trivial series `1`, which is an associator only up to degree 1.
    pub fn trivial(degree: usize) -> FreeSeries {
        FreeSeries::one(&Alphabet::ab(), degree)
    }

    pub fn series(&self) -> &FreeSeries {
        &self.series
    }

    pub fn degree(&self) -> usize {
        self.series.degree()
    }

    pub fn into_series(self) -> FreeSeries {
        self.series
    }

    /// Coefficient file in the term-per-line text format.
    pub fn to_text(&self) -> String {
        self.series.to_text()
    }

    pub fn parse(degree: usize, text: &str) -> Result<Self> {
        Self::certify(FreeSeries::parse(&Alphabet::ab(), degree, text)?)
    }

    /// `Phi(lambda a, lambda b)`.
    pub fn rescaled(&self, lambda: &Rational) -> FreeSeries {
        let mut out = FreeSeries::zero(self.series.alphabet(), self.degree());
        let mut pw = Rational::one();
        let mut last = 0;
        for (w, c) in self.series.terms() {
            while last < w.len() {
                pw *= lambda;
                last += 1;
            }
            out.add_term(w.clone(), c * &pw);
        }
        out
    }
}

fn check_shape(series: &FreeSeries) -> Result<()> {
    if series.alphabet().letters() != ["a", "b"] {
        return Err(Error::Invalid("associators are series in the letters a, b".into()));
    }
    if !series.constant_term().is_one() {
        return Err(Error::Invalid("associator must have constant term 1".into()));
    }
    Ok(())
}

/// `phi(x, y)` evaluated in the Drinfeld–Kohno algebra.
pub fn phi_at(dk: &DkAlgebra, phi: &FreeSeries, x: &FreeSeries, y: &FreeSeries) -> Result<FreeSeries> {
    dk.substitute(phi, &[x.clone(), y.clone()])
}

fn half_exp(dk: &DkAlgebra, x: &FreeSeries) -> Result<FreeSeries> {
    dk.exp(&x.scale(&Rational::new(1.into(), 2.into())))
}

fn prod(dk: &DkAlgebra, factors: &[&FreeSeries]) -> FreeSeries {
    factors.iter().fold(dk.one(), |acc, f| dk.mul(&acc, f))
}

/// Both hexagon defects in the 3-strand algebra with `a = t12`, `b = t23`.
pub fn hexagon_residuals(phi: &FreeSeries) -> Result<(FreeSeries, FreeSeries)> {
    check_shape(phi)?;
    let dk = DkAlgebra::get(3, phi.degree())?;
    let (t12, t13, t23) = (dk.letter(1, 2), dk.letter(1, 3), dk.letter(2, 3));
    let p = |x: &FreeSeries, y: &FreeSeries| phi_at(&dk, phi, x, y);
    let pinv = |x: &FreeSeries, y: &FreeSeries| -> Result<FreeSeries> { dk.inverse(&p(x, y)?) };

    let e12 = half_exp(&dk, &t12)?;
    let e13 = half_exp(&dk, &t13)?;
    let e23 = half_exp(&dk, &t23)?;
    let e12_13 = half_exp(&dk, &(&t12 + &t13))?;
    let e13_23 = half_exp(&dk, &(&t13 + &t23))?;

    let lhs1 = prod(&dk, &[&p(&t23, &t13)?, &e12_13, &p(&t12, &t23)?]);
    let rhs1 = prod(&dk, &[&e13, &p(&t12, &t13)?, &e12]);
    let lhs2 = prod(&dk, &[&pinv(&t13, &t12)?, &e13_23, &pinv(&t12, &t23)?]);
    let rhs2 = prod(&dk, &[&e13, &pinv(&t13, &t23)?, &e23]);
    Ok((dk.reduce(&(&lhs1 - &rhs1))?, dk.reduce(&(&lhs2 - &rhs2))?))
}

/// Pentagon defect in the 4-strand algebra.
pub fn pentagon_residual(phi: &FreeSeries) -> Result<FreeSeries> {
    check_shape(phi)?;
    let dk = DkAlgebra::get(4, phi.degree())?;
    let t = |i, j| dk.letter(i, j);
    let p = |x: &FreeSeries, y: &FreeSeries| phi_at(&dk, phi, x, y);
    let lhs = prod(&dk, &[&p(&t(1, 2), &(&t(2, 3) + &t(2, 4)))?, &p(&(&t(1, 3) + &t(2, 3)), &t(3, 4))?]);
    let rhs = prod(
        &dk,
        &[
            &p(&t(2, 3), &t(3, 4))?,
            &p(&(&t(1, 2) + &t(1, 3)), &(&t(2, 4) + &t(3, 4)))?,
            &p(&t(1, 2), &t(2, 3))?,
        ],
    );
    dk.reduce(&(&lhs - &rhs))
}

pub fn residuals(phi: &FreeSeries) -> Result<Residuals> {
    let (hexagon1, hexagon2) = hexagon_residuals(phi)?;
    let pentagon = pentagon_residual(phi)?;
    Ok(Residuals { hexagon1, hexagon2, pentagon })
}

/// Right-nested brackets of words of degree `d` that are independent, in canonical word order.
pub fn lie_basis(degree: usize, d: usize) -> Vec<FreeSeries> {
    let al = Alphabet::ab();
    let mut e = Echelon::new(1 << d);
    let mut out = Vec::new();
    for rank in 0..(1usize << d) {
        let w = Word::from_rank(rank, d, 2);
        let s = FreeSeries::monomial(&al, degree, w, Rational::one()).lie_projection().expect("positive degree");
        let row: SparseRow = s.terms().iter().map(|(w, c)| (w.rank_in_degree(2), c.clone())).collect();
        if !row.is_empty() && e.insert(row).is_some() {
            // Scale so the element is the bracket itself rather than bracket / d.
            out.push(s.scale(&Rational::from_integer((d as i64).into())));
        }
    }
    out
}

/// Choice of values for the free coordinates of each degree's solution space.
#[derive(Clone, Debug, Default)]
pub struct SolverOptions {
    /// `(degree, index among free coordinates) -> value`; unset coordinates are 0.
    pub free_values: BTreeMap<(usize, usize), Rational>,
}

/// Per-degree record of the linear solve.
#[derive(Clone, Debug, Serialize)]
pub struct DegreeSolve {
    pub degree: usize,
    pub unknowns: usize,
    pub equations: usize,
    pub solution_dimension: usize,
}

#[derive(Clone, Debug)]
pub struct SolveOutcome {
    pub associator: TruncatedAssociator,
    /// `log Phi`, a Lie series.
    pub log: FreeSeries,
    pub steps: Vec<DegreeSolve>,
}

/// Canonical solution: free coordinates zero in every degree.
pub fn solve_associator(n: usize) -> Result<TruncatedAssociator> {
    Ok(solve_associator_with(n, &SolverOptions::default())?.associator)
}

/// Solves for `Phi = exp(psi)` one degree at a time. With lower degrees fixed,
/// each defect's degree-`d` part is affine in `psi_d`; the linear part is probed
/// on the Lie basis and the system is solved exactly.
pub fn solve_associator_with(n: usize, options: &SolverOptions) -> Result<SolveOutcome> {
    if n == 0 {
        return Err(Error::Invalid("truncation degree must be at least 1".into()));
    }
    let al: Arc<Alphabet> = Alphabet::ab();
    let mut psi = FreeSeries::zero(&al, n);
    let mut steps = Vec::new();
    for d in 1..=n {
        let basis = lie_basis(d, d);
        let lower = psi.with_degree(d);
        let defect = |psi_d: &FreeSeries| -> Result<Vec<FreeSeries>> {
            let phi = (&lower + psi_d).exp_trunc()?;
            let r = residuals(&phi)?;
            Ok(vec![r.hexagon1.homogeneous(d), r.hexagon2.homogeneous(d), r.pentagon.homogeneous(d)])
        };
        let r0 = defect(&FreeSeries::zero(&al, d))?;
        let columns: Vec<Vec<FreeSeries>> = basis.iter().map(&defect).collect::<Result<_>>()?;

        // One equation per (defect, word) pair.
        let mut rows: BTreeMap<(usize, Word), (SparseRow, Rational)> = BTreeMap::new();
        for (k, col) in columns.iter().enumerate() {
            for (which, (c, base)) in col.iter().zip(&r0).enumerate() {
                for (w, v) in (c - base).terms() {
                    rows.entry((which, w.clone())).or_insert_with(|| (SparseRow::new(), Rational::zero())).0.insert(k, v.clone());
                }
            }
        }
        for (which, base) in r0.iter().enumerate() {
            for (w, v) in base.terms() {
                rows.entry((which, w.clone())).or_insert_with(|| (SparseRow::new(), Rational::zero())).1 = -v.clone();
            }
        }
        let equations = rows.len();
        let (mut x, kernel) = solve_system(basis.len(), rows.into_values()).ok_or_else(|| Error::Infeasible {
            degree: d,
            detail: "associator equations have no Lie solution".into(),
        })?;
        for (idx, kv) in kernel.iter().enumerate() {
            if let Some(val) = options.free_values.get(&(d, idx)) {
                for (c, v) in kv {
                    x[*c] += v * val;
                }
            }
        }
        steps.push(DegreeSolve { degree: d, unknowns: basis.len(), equations, solution_dimension: kernel.len() });
        let mut psi_d = FreeSeries::zero(&al, n);
        for (c, b) in x.iter().zip(&basis) {
            psi_d = &psi_d + &b.with_degree(n).scale(c);
        }
        psi = &psi + &psi_d;
    }
    let phi = psi.exp_trunc()?;
    let associator = TruncatedAssociator::certify(phi)?;
    Ok(SolveOutcome { associator, log: psi, steps })
}

/// Invariant symmetric twist given as a one-letter series `T(t)` with constant term 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymmetricTwistSeries {
    series: FreeSeries,
}

impl SymmetricTwistSeries {
    pub fn new(series: FreeSeries) -> Result<Self> {
        if series.alphabet().len() != 1 {
            return Err(Error::Invalid("a symmetric twist is a series in the single letter t".into()));
        }
        if !series.constant_term().is_one() {
            return Err(Error::Invalid("twist must have constant term 1".into()));
        }
        Ok(SymmetricTwistSeries { series })
    }

    pub fn identity(degree: usize) -> Self {
        let al = Alphabet::new(["t"]).expect("valid");
        SymmetricTwistSeries { series: FreeSeries::one(&al, degree) }
    }

    /// `exp(sum_k c_k t^k)`.
    pub fn exponential(degree: usize, coefficients: &[(usize, Rational)]) -> Self {
        let al = Alphabet::new(["t"]).expect("valid");
        let mut g = FreeSeries::zero(&al, degree);
        for (k, c) in coefficients {
            g.add_term(Word(vec![0; *k]), c.clone());
        }
        SymmetricTwistSeries::new(g.exp_trunc().expect("positive powers")).expect("constant term 1")
    }

    pub fn series(&self) -> &FreeSeries {
        &self.series
    }
}

/// `Phi^T`, computed in the 3-strand algebra and lifted back to a series in `a`, `b`.
/// Fails if the twisted element leaves the image of `Phi(t12, t23)`.
pub fn gauge_twist(phi: &TruncatedAssociator, twist: &SymmetricTwistSeries) -> Result<TruncatedAssociator> {
    let n = phi.degree();
    let dk = DkAlgebra::get(3, n)?;
    let (t12, t13, t23) = (dk.letter(1, 2), dk.letter(1, 3), dk.letter(2, 3));
    let tser = twist.series.with_degree(n);
    let at = |x: &FreeSeries| dk.substitute(&tser, &[x.clone()]);
    let tinv = |x: &FreeSeries| -> Result<FreeSeries> { dk.inverse(&at(x)?) };
    let twisted = prod(
        &dk,
        &[
            &at(&t23)?,
            &at(&(&t12 + &t13))?,
            &phi_at(&dk, phi.series(), &t12, &t23)?,
            &tinv(&(&t13 + &t23))?,
            &tinv(&t12)?,
        ],
    );
    let lifted = lift_to_ab(&dk, &twisted)?;
    TruncatedAssociator::certify(lifted)
}

/// Preimage of `x` under `a -> t12`, `b -> t23`, solved degree by degree.
pub fn lift_to_ab(dk: &DkAlgebra, x: &FreeSeries) -> Result<FreeSeries> {
    let n = dk.degree();
    let al = Alphabet::ab();
    let (t12, t23) = (dk.letter(1, 2), dk.letter(2, 3));
    let target = dk.reduce(x)?;
    let mut out = FreeSeries::zero(&al, n);
    for d in 0..=n {
        let words: Vec<Word> = (0..1usize << d).map(|r| Word::from_rank(r, d, 2)).collect();
        let images: Vec<FreeSeries> = words
            .iter()
            .map(|w| {
                let s = FreeSeries::monomial(&al, n, w.clone(), Rational::one());
                dk.substitute(&s, &[t12.clone(), t23.clone()])
            })
            .collect::<Result<_>>()?;
        let mut rows: BTreeMap<Word, (SparseRow, Rational)> = BTreeMap::new();
        for (k, im) in images.iter().enumerate() {
            for (w, v) in im.terms() {
                rows.entry(w.clone()).or_insert_with(|| (SparseRow::new(), Rational::zero())).0.insert(k, v.clone());
            }
        }
        for (w, v) in target.homogeneous(d).terms() {
            rows.entry(w.clone()).or_insert_with(|| (SparseRow::new(), Rational::zero())).1 = v.clone();
        }
        let (sol, _) = solve_system(words.len(), rows.into_values()).ok_or_else(|| {
            Error::Check(format!("twisted associator leaves the two-letter family in degree {d}"))
        })?;
        for (w, c) in words.into_iter().zip(sol) {
            out.add_term(w, c);
        }
    }
    Ok(out)
}

/// Searches for `T = exp(sum_k c_k t^k)` with `Phi1^T = Phi2`, one degree at a time.
/// Returns `None` when no twist of this shape connects them.
pub fn find_scalar_gauge_twist(phi1: &TruncatedAssociator, phi2: &TruncatedAssociator) -> Result<Option<SymmetricTwistSeries>> {
    let n = phi1.degree();
    if phi2.degree() != n {
        return Err(Error::Mismatch("associators of different degree".into()));
    }
    let dk = DkAlgebra::get(3, n)?;
    let target = phi_at(&dk, phi2.series(), &dk.letter(1, 2), &dk.letter(2, 3))?;
    let mut coeffs: Vec<(usize, Rational)> = Vec::new();
    let twisted_dk = |coeffs: &[(usize, Rational)]| -> Result<FreeSeries> {
        let tw = SymmetricTwistSeries::exponential(n, coeffs);
        let (t12, t13, t23) = (dk.letter(1, 2), dk.letter(1, 3), dk.letter(2, 3));
        let at = |x: &FreeSeries| dk.substitute(&tw.series, &[x.clone()]);
        Ok(prod(
            &dk,
            &[
                &at(&t23)?,
                &at(&(&t12 + &t13))?,
                &phi_at(&dk, phi1.series(), &t12, &t23)?,
                &dk.inverse(&at(&(&t13 + &t23))?)?,
                &dk.inverse(&at(&t12)?)?,
            ],
        ))
    };
    for d in 1..=n {
        let base = dk.reduce(&(&twisted_dk(&coeffs)? - &target))?.homogeneous(d);
        let mut probe = coeffs.clone();
        probe.push((d, Rational::one()));
        let col = &dk.reduce(&(&twisted_dk(&probe)? - &target))?.homogeneous(d) - &base;
        let rows: Vec<(SparseRow, Rational)> = base
            .terms()
            .keys()
            .chain(col.terms().keys())
            .collect::<std::collections::BTreeSet<_>>()
            .into_iter()
            .map(|w| {
                let mut r = SparseRow::new();
                let c = col.coeff(w);
                if !c.is_zero() {
                    r.insert(0, c);
                }
                (r, -base.coeff(w))
            })
            .collect();
        match solve_system(1, rows) {
            Some((x, _)) => {
                if !x[0].is_zero() {
                    coeffs.push((d, x[0].clone()));
                }
            }
            None => return Ok(None),
        }
    }
    Ok(Some(SymmetricTwistSeries::exponential(n, &coeffs)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::q;

    #[test]
    fn lie_basis_dimensions() {
        let dims: Vec<usize> = (1..=5).map(|d| lie_basis(d, d).len()).collect();
        assert_eq!(dims, vec![2, 1, 2, 3, 6]);
    }

    #[test]
    fn trivial_residuals() {
        let (h1, h2) = hexagon_residuals(&TruncatedAssociator::trivial(1)).unwrap();
        assert!(h1.is_zero() && h2.is_zero());
        assert!(pentagon_residual(&TruncatedAssociator::trivial(1)).unwrap().is_zero());
        let (h1, _) = hexagon_residuals(&TruncatedAssociator::trivial(2)).unwrap();
        assert!(!h1.is_zero());
    }

    #[test]
    fn degree_one_term_is_detected() {
        let al = Alphabet::ab();
        let mut s = FreeSeries::one(&al, 1);
        s.add_term(Word(vec![0]), q(1, 1));
        let (h1, h2) = hexagon_residuals(&s).unwrap();
        assert!(!h1.is_zero() && !h2.is_zero());
        // Pentagon residual of 1 + p a + q b in degree 1 is -(p t12 + q t34).
        assert!(!pentagon_residual(&s).unwrap().is_zero());
    }

    #[test]
    fn degree_two_is_one_over_24() {
        let phi = solve_associator(2).unwrap();
        assert_eq!(phi.to_text(), "1 : 1\n1/24 : a b\n-1/24 : b a\n");
    }

    #[test]
    fn trivial_gauge_twist() {
        let phi = solve_associator(3).unwrap();
        assert_eq!(gauge_twist(&phi, &SymmetricTwistSeries::identity(3)).unwrap(), phi);
        let scalar = SymmetricTwistSeries::exponential(3, &[(1, q(2, 3))]);
        assert_eq!(gauge_twist(&phi, &scalar).unwrap(), phi);
    }

    #[test]
    fn degree_three_freedom_is_not_a_scalar_twist() {
        let phi1 = solve_associator(3).unwrap();
        let mut opts = SolverOptions::default();
        opts.free_values.insert((3, 0), q(1, 1));
        let phi2 = solve_associator_with(3, &opts).unwrap().associator;
        assert_ne!(phi1, phi2);
        // Connecting twists for this direction live in U(g) (x) U(g); see the category module.
        assert!(find_scalar_gauge_twist(&phi1, &phi2).unwrap().is_none());
    }
}
