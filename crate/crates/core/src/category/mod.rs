//! The braided category `C(g, t)` on a registered list of unipotent modules:
//! associativity `Phi(t12, t23)` and braiding `P e^{t/2}` as exact matrices,
//! with verification of every coherence axiom.

mod gauge;

pub use gauge::{connecting_twist, gauge_coherence_check, ConnectingTwist};

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_traits::One;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::freealg::FreeSeries;
use crate::kernel::{flip_operator, Matrix, Rational};
use crate::liealg::{termination_bound_check, LieAlgebraData, RepresentationData, TensorRole, TwoTensor};
use crate::report::{first_witness, Check, Report};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum CacheKey {
    Braiding(String, String),
    Associativity(String, String, String),
    Degree(String, String, String),
}

#[derive(Clone, Debug)]
enum Cached {
    Matrix(Arc<Matrix>),
    Degree(usize),
}

pub struct BraidedStructure {
    algebra: Arc<LieAlgebraData>,
    t: TwoTensor,
    phi: FreeSeries,
    modules: Vec<RepresentationData>,
    cache: Mutex<HashMap<CacheKey, Cached>>,
}

impl Clone for BraidedStructure {
    fn clone(&self) -> Self {
        BraidedStructure {
            algebra: self.algebra.clone(),
            t: self.t.clone(),
            phi: self.phi.clone(),
            modules: self.modules.clone(),
            cache: Mutex::new(HashMap::new()),
        }
    }
}

impl std::fmt::Debug for BraidedStructure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BraidedStructure")
            .field("algebra", &self.algebra.name())
            .field("t", &self.t.to_string())
            .field("phi_degree", &self.phi.degree())
            .field("modules", &self.modules.iter().map(|m| m.name()).collect::<Vec<_>>())
            .finish()
    }
}

impl BraidedStructure {
    /// `phi` is used as given; the verifier, not the constructor, judges it.
    pub fn new(t: &TwoTensor, phi: &FreeSeries, modules: Vec<RepresentationData>) -> Result<Self> {
        if t.role() != TensorRole::SymmetricInvariant {
            return Err(Error::Invalid("braiding needs a symmetric invariant tensor".into()));
        }
        if phi.alphabet().letters() != ["a", "b"] || !phi.constant_term().is_one() {
            return Err(Error::Invalid("associator must be a series in a, b with constant term 1".into()));
        }
        for (i, m) in modules.iter().enumerate() {
            if m.algebra().as_ref() != t.algebra().as_ref() {
                return Err(Error::Invalid(format!("module `{}` is over a different algebra", m.name())));
            }
            if m.name().contains('*') || modules[..i].iter().any(|o| o.name() == m.name()) {
                return Err(Error::Invalid(format!("module name `{}` is reserved or repeated", m.name())));
            }
        }
        let s = BraidedStructure {
            algebra: t.algebra().clone(),
            t: t.clone(),
            phi: phi.clone(),
            modules,
            cache: Mutex::new(HashMap::new()),
        };
        let need = s.required_degree()?;
        if phi.degree() < need {
            return Err(Error::DegreeTooSmall { have: phi.degree(), need });
        }
        Ok(s)
    }

    pub fn algebra(&self) -> &Arc<LieAlgebraData> {
        &self.algebra
    }

    pub fn tensor(&self) -> &TwoTensor {
        &self.t
    }

    pub fn associator(&self) -> &FreeSeries {
        &self.phi
    }

    pub fn modules(&self) -> &[RepresentationData] {
        &self.modules
    }

    pub fn module(&self, name: &str) -> Option<&RepresentationData> {
        self.modules.iter().find(|m| m.name() == name)
    }

    /// Largest truncation degree needed on registered triples.
    pub fn required_degree(&self) -> Result<usize> {
        let mut need = 0;
        for x in &self.modules {
            for y in &self.modules {
                for z in &self.modules {
                    need = need.max(self.triple_degree(x, y, z)?);
                }
            }
        }
        Ok(need)
    }

    /// Largest truncation degree needed by `verify_coherence`: the pentagon also
    /// evaluates `Phi` on triples with one tensor-product factor.
    pub fn coherence_degree(&self) -> Result<usize> {
        let quads = self.quadruples();
        let per: Vec<usize> = quads
            .par_iter()
            .map(|[x, y, z, w]| {
                let d1 = self.triple_degree(x, y, &z.tensor(w))?;
                let d2 = self.triple_degree(&x.tensor(y), z, w)?;
                let d3 = self.triple_degree(x, &y.tensor(z), w)?;
                Ok(d1.max(d2).max(d3))
            })
            .collect::<Result<_>>()?;
        Ok(per.into_iter().max().unwrap_or(0).max(self.required_degree()?))
    }

    fn triple_degree(&self, x: &RepresentationData, y: &RepresentationData, z: &RepresentationData) -> Result<usize> {
        let key = CacheKey::Degree(x.name().into(), y.name().into(), z.name().into());
        if let Some(Cached::Degree(d)) = self.cache.lock().expect("cache").get(&key) {
            return Ok(*d);
        }
        let d = termination_bound_check(&[x, y, z], &self.t)?.required_degree();
        self.cache.lock().expect("cache").insert(key, Cached::Degree(d));
        Ok(d)
    }

    fn cached(&self, key: CacheKey, make: impl FnOnce() -> Result<Matrix>) -> Result<Arc<Matrix>> {
        if let Some(Cached::Matrix(m)) = self.cache.lock().expect("cache").get(&key) {
            return Ok(m.clone());
        }
        let m = Arc::new(make()?);
        self.cache.lock().expect("cache").insert(key, Cached::Matrix(m.clone()));
        Ok(m)
    }

    /// `beta_{X,Y} = P exp(t_{XY} / 2)`.
    pub fn braiding(&self, x: &RepresentationData, y: &RepresentationData) -> Result<Arc<Matrix>> {
        self.cached(CacheKey::Braiding(x.name().into(), y.name().into()), || braiding(x, y, &self.t))
    }

    /// `alpha_{X,Y,Z} = Phi(t12, t23)` on `X (x) Y (x) Z`.
    pub fn associativity(
        &self,
        x: &RepresentationData,
        y: &RepresentationData,
        z: &RepresentationData,
    ) -> Result<Arc<Matrix>> {
        self.cached(CacheKey::Associativity(x.name().into(), y.name().into(), z.name().into()), || {
            let need = self.triple_degree(x, y, z)?;
            if self.phi.degree() < need {
                return Err(Error::DegreeTooSmall { have: self.phi.degree(), need });
            }
            associativity(x, y, z, &self.t, &self.phi)
        })
    }

    /// Same modules and associator with `t` replaced by `lambda t`.
    pub fn rescale(&self, lambda: &Rational) -> Result<BraidedStructure> {
        let t = self.t.scale(lambda).with_role(TensorRole::SymmetricInvariant)?;
        BraidedStructure::new(&t, &self.phi, self.modules.clone())
    }

    fn pairs(&self) -> Vec<(&RepresentationData, &RepresentationData)> {
        let m = &self.modules;
        m.iter().flat_map(|x| m.iter().map(move |y| (x, y))).collect()
    }

    fn triples(&self) -> Vec<[&RepresentationData; 3]> {
        let m = &self.modules;
        m.iter().flat_map(|x| m.iter().flat_map(move |y| m.iter().map(move |z| [x, y, z]))).collect()
    }

    fn quadruples(&self) -> Vec<[&RepresentationData; 4]> {
        self.triples().into_iter().flat_map(|[x, y, z]| self.modules.iter().map(move |w| [x, y, z, w])).collect()
    }
}

/// `P exp(t_{XY} / 2)`.
pub fn braiding(x: &RepresentationData, y: &RepresentationData, t: &TwoTensor) -> Result<Matrix> {
    let half = t.action(x, y).scale(&Rational::new(1.into(), 2.into()));
    Ok(&flip_operator(x.dim(), y.dim()) * &half.exp_nilpotent()?)
}

/// `Phi(t12, t23)` on `X (x) Y (x) Z`.
pub fn associativity(
    x: &RepresentationData,
    y: &RepresentationData,
    z: &RepresentationData,
    t: &TwoTensor,
    phi: &FreeSeries,
) -> Result<Matrix> {
    let mods = [x, y, z];
    phi.evaluate(&[t.placement(&mods, 0, 1), t.placement(&mods, 1, 2)])
}

fn names(mods: &[&RepresentationData]) -> String {
    format!("({})", mods.iter().map(|m| m.name()).collect::<Vec<_>>().join(","))
}


fn id(n: usize) -> Matrix {
    Matrix::identity(n)
}

fn diff_witness(subject: String, lhs: &Matrix, rhs: &Matrix) -> Option<String> {
    lhs.first_difference(rhs).map(|w| format!("{subject} {w}"))
}

/// Embeds an operator on `X (x) Z` into slots 1 and 3 of `X (x) Y (x) Z`.
pub fn embed_13(a: &Matrix, dx: usize, dy: usize, dz: usize) -> Matrix {
    let q = id(dx).kron(&flip_operator(dz, dy));
    let qinv = id(dx).kron(&flip_operator(dy, dz));
    &(&q * &a.kron(&id(dy))) * &qinv
}

impl BraidedStructure {
    fn pentagon_witness(&self, [x, y, z, w]: [&RepresentationData; 4]) -> Result<Option<String>> {
        let xy = x.tensor(y);
        let yz = y.tensor(z);
        let zw = z.tensor(w);
        let lhs = &*self.associativity(x, y, &zw)? * &*self.associativity(&xy, z, w)?;
        let rhs = &(&id(x.dim()).kron(&*self.associativity(y, z, w)?) * &*self.associativity(x, &yz, w)?)
            * &self.associativity(x, y, z)?.kron(&id(w.dim()));
        Ok(diff_witness(names(&[x, y, z, w]), &lhs, &rhs))
    }

    fn hexagon1_witness(&self, [x, y, z]: [&RepresentationData; 3]) -> Result<Option<String>> {
        let yz = y.tensor(z);
        let lhs = &(&*self.associativity(y, z, x)? * &*self.braiding(x, &yz)?) * &*self.associativity(x, y, z)?;
        let rhs = &(&id(y.dim()).kron(&*self.braiding(x, z)?) * &*self.associativity(y, x, z)?)
            * &self.braiding(x, y)?.kron(&id(z.dim()));
        Ok(diff_witness(names(&[x, y, z]), &lhs, &rhs))
    }

    fn hexagon2_witness(&self, [x, y, z]: [&RepresentationData; 3]) -> Result<Option<String>> {
        let xy = x.tensor(y);
        let inv = |m: &Matrix| m.inverse_unipotent();
        let lhs = &(&inv(&*self.associativity(z, x, y)?)? * &*self.braiding(&xy, z)?) * &inv(&*self.associativity(x, y, z)?)?;
        let rhs = &(&self.braiding(x, z)?.kron(&id(y.dim())) * &inv(&*self.associativity(x, z, y)?)?)
            * &id(x.dim()).kron(&*self.braiding(y, z)?);
        Ok(diff_witness(names(&[x, y, z]), &lhs, &rhs))
    }

    fn alpha_equivariance_witness(&self, [x, y, z]: [&RepresentationData; 3]) -> Result<Option<String>> {
        let xyz = x.tensor(y).tensor(z);
        let a = self.associativity(x, y, z)?;
        for (i, g) in xyz.matrices().iter().enumerate() {
            if let Some(w) = diff_witness(
                format!("{} under {}", names(&[x, y, z]), self.algebra.basis_names()[i]),
                &(&*a * g),
                &(g * &*a),
            ) {
                return Ok(Some(w));
            }
        }
        Ok(None)
    }

    fn beta_equivariance_witness(&self, (x, y): (&RepresentationData, &RepresentationData)) -> Result<Option<String>> {
        let b = self.braiding(x, y)?;
        let (xy, yx) = (x.tensor(y), y.tensor(x));
        for (i, (g1, g2)) in xy.matrices().iter().zip(yx.matrices()).enumerate() {
            if let Some(w) = diff_witness(
                format!("{} under {}", names(&[x, y]), self.algebra.basis_names()[i]),
                &(&*b * g1),
                &(g2 * &*b),
            ) {
                return Ok(Some(w));
            }
        }
        Ok(None)
    }

    /// Naturality against intertwiners between registered modules.
    fn morphism_naturality_witness(&self, (x, x2): (&RepresentationData, &RepresentationData)) -> Result<Option<String>> {
        let homs = x.hom_space(x2);
        if homs.is_empty() {
            return Ok(None);
        }
        for f in &homs {
            for y in &self.modules {
                let iy = id(y.dim());
                let lhs = &*self.braiding(x2, y)? * &f.kron(&iy);
                let rhs = &iy.kron(f) * &*self.braiding(x, y)?;
                if let Some(w) = diff_witness(format!("beta{} with f: {}->{}", names(&[x, y]), x.name(), x2.name()), &lhs, &rhs) {
                    return Ok(Some(w));
                }
                let lhs = &*self.braiding(y, x2)? * &iy.kron(f);
                let rhs = &f.kron(&iy) * &*self.braiding(y, x)?;
                if let Some(w) = diff_witness(format!("beta{} with f: {}->{}", names(&[y, x]), x.name(), x2.name()), &lhs, &rhs) {
                    return Ok(Some(w));
                }
                for z in &self.modules {
                    let iz = id(z.dim());
                    let slots = [
                        (f.kron(&iy).kron(&iz), f.kron(&iy).kron(&iz), [x, y, z], [x2, y, z]),
                        (iy.kron(f).kron(&iz), iy.kron(f).kron(&iz), [y, x, z], [y, x2, z]),
                        (iy.kron(&iz).kron(f), iy.kron(&iz).kron(f), [y, z, x], [y, z, x2]),
                    ];
                    for (pre, post, src, dst) in slots {
                        let lhs = &*self.associativity(dst[0], dst[1], dst[2])? * &pre;
                        let rhs = &post * &*self.associativity(src[0], src[1], src[2])?;
                        if let Some(w) = diff_witness(format!("alpha{} with f: {}->{}", names(&src), x.name(), x2.name()), &lhs, &rhs) {
                            return Ok(Some(w));
                        }
                    }
                }
            }
        }
        Ok(None)
    }

    fn braiding_square_witness(&self, (x, y): (&RepresentationData, &RepresentationData)) -> Result<Option<String>> {
        let sq = &*self.braiding(y, x)? * &*self.braiding(x, y)?;
        let e = self.t.action(x, y).exp_nilpotent()?;
        Ok(diff_witness(names(&[x, y]), &sq, &e))
    }

    fn subject(&self, arity: usize) -> String {
        let n = self.modules.len().pow(arity as u32);
        let kind = match arity {
            2 => "pairs",
            3 => "triples",
            _ => "quadruples",
        };
        format!("{n} {kind} over {}", self.modules.iter().map(|m| m.name()).collect::<Vec<_>>().join(","))
    }

    /// Pentagon, both hexagons, naturality and `beta^2 = exp(t)` on all registered objects.
    pub fn verify_coherence(&self) -> Result<Report> {
        let deg = self.phi.degree();
        let triples = self.triples();
        let pairs = self.pairs();
        let quads = self.quadruples();
        let mut report = Report::new();
        let with = |name: &str, arity: usize, w: Option<String>| Check::new(name, self.subject(arity), w).with_cutoff(deg);
        report.push(with("pentagon", 4, first_witness(&quads, |q| self.pentagon_witness(*q))?));
        report.push(with("hexagon1", 3, first_witness(&triples, |t| self.hexagon1_witness(*t))?));
        report.push(with("hexagon2", 3, first_witness(&triples, |t| self.hexagon2_witness(*t))?));
        report.push(with("alpha-equivariance", 3, first_witness(&triples, |t| self.alpha_equivariance_witness(*t))?));
        report.push(with("beta-equivariance", 2, first_witness(&pairs, |p| self.beta_equivariance_witness(*p))?));
        report.push(with("morphism-naturality", 2, first_witness(&pairs, |p| self.morphism_naturality_witness(*p))?));
        report.push(with("braiding-square", 2, first_witness(&pairs, |p| self.braiding_square_witness(*p))?));
        Ok(report)
    }

    /// `beta_{Y,X} beta_{X,Y} = Id` on all pairs.
    pub fn symmetry_check(&self) -> Result<Check> {
        let w = first_witness(&self.pairs(), |(x, y)| {
            let sq = &*self.braiding(y, x)? * &*self.braiding(x, y)?;
            Ok(diff_witness(names(&[x, y]), &sq, &id(sq.rows())))
        })?;
        Ok(Check::new("symmetric", self.subject(2), w))
    }

    /// `log(beta^2) = t` on pairs, and `t_{12,3} = t13 + t23`, `t_{1,23} = t12 + t13` via recovered logarithms on triples.
    pub fn recover_t(&self) -> Result<Report> {
        let logsq = |x: &RepresentationData, y: &RepresentationData| -> Result<Matrix> {
            (&*self.braiding(y, x)? * &*self.braiding(x, y)?).log_unipotent()
        };
        let mut report = Report::new();
        let w = first_witness(&self.pairs(), |(x, y)| Ok(diff_witness(names(&[x, y]), &logsq(x, y)?, &self.t.action(x, y))))?;
        report.push(Check::new("log-braiding-square", self.subject(2), w));
        let w = first_witness(&self.triples(), |[x, y, z]| {
            let (dx, dy, dz) = (x.dim(), y.dim(), z.dim());
            let lhs = logsq(&x.tensor(y), z)?;
            let rhs = &embed_13(&logsq(x, z)?, dx, dy, dz) + &id(dx).kron(&logsq(y, z)?);
            if let Some(w) = diff_witness(format!("t_(12),3 on {}", names(&[x, y, z])), &lhs, &rhs) {
                return Ok(Some(w));
            }
            let lhs = logsq(x, &y.tensor(z))?;
            let rhs = &logsq(x, y)?.kron(&id(dz)) + &embed_13(&logsq(x, z)?, dx, dy, dz);
            Ok(diff_witness(format!("t_1,(23) on {}", names(&[x, y, z])), &lhs, &rhs))
        })?;
        report.push(Check::new("infinitesimal-hexagon", self.subject(3), w));
        Ok(report)
    }

    /// `beta_lambda = beta o (beta^2)^{(lambda-1)/2}` on all pairs, with the power taken through the logarithm.
    pub fn rescale_formula_check(&self, lambda: &Rational) -> Result<Check> {
        let scaled = self.rescale(lambda)?;
        let s = (lambda - Rational::one()) / Rational::from_integer(2.into());
        let w = first_witness(&self.pairs(), |(x, y)| {
            let b = self.braiding(x, y)?;
            let sq = &*self.braiding(y, x)? * &*b;
            let power = sq.log_unipotent()?.scale(&s).exp_nilpotent()?;
            Ok(diff_witness(names(&[x, y]), &*scaled.braiding(x, y)?, &(&*b * &power)))
        })?;
        Ok(Check::new("rescale-braiding", format!("lambda = {lambda}"), w))
    }

    /// `beta^2 - Id` nilpotent on every pair and `beta^2 = Id` on the unit.
    pub fn quasisymmetry_check(&self) -> Result<Report> {
        quasisymmetry_check_with(self, &|x, y| Ok((*self.braiding(x, y)?).clone()))
    }
}

/// Quasisymmetry with an arbitrary braiding, for mutation tests.
pub fn quasisymmetry_check_with(
    s: &BraidedStructure,
    beta: &(dyn Fn(&RepresentationData, &RepresentationData) -> Result<Matrix> + Sync),
) -> Result<Report> {
    let mut report = Report::new();
    let w = first_witness(&s.pairs(), |(x, y)| {
        let sq = &beta(y, x)? * &beta(x, y)?;
        let n = &sq - &id(sq.rows());
        Ok((!n.is_nilpotent()).then(|| format!("{}: beta^2 - Id is not nilpotent", names(&[x, y]))))
    })?;
    report.push(Check::new("unipotent-braiding-square", s.subject(2), w));
    let unit = RepresentationData::trivial(&s.algebra, 1, "1");
    let sq = &beta(&unit, &unit)? * &beta(&unit, &unit)?;
    report.push(Check::new("unit-braiding-square", "(1,1)", (!sq.is_identity()).then(|| format!("beta^2 = {sq}"))));
    Ok(report)
}
