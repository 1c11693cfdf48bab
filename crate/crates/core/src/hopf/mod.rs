//! Finite-dimensional and truncated bialgebras given by structure constants.
//!
//! A truncated model carries a grading of its basis and a cutoff `D`; axioms are
//! checked on basis tuples of total grading at most `D`, where the truncation is exact.

mod coradical;
mod models;

pub use coradical::{coradical_filtration, filtration_preservation_check, CoradicalFiltration, PoissonBracket};
pub use models::{
    enveloping_hopf, lie_poisson_bracket, primitives, trivial_coalgebra, truncated_polynomial, twisted_function_algebra,
    two_group_like, TwistedFunctionAlgebra, DEFAULT_CUTOFF,
};

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::kernel::{fmt_rational, Rational, SparseRow};
use crate::report::{Check, Report};

/// Element of `A (x) A`, keyed by basis index pairs.
pub type Tensor2 = BTreeMap<(usize, usize), Rational>;

fn axpy(acc: &mut SparseRow, c: &Rational, v: &SparseRow) {
    for (k, x) in v {
        let e = acc.entry(*k).or_insert_with(Rational::zero);
        *e += c * x;
        if e.is_zero() {
            acc.remove(k);
        }
    }
}

fn axpy2(acc: &mut Tensor2, c: &Rational, key: (usize, usize)) {
    let e = acc.entry(key).or_insert_with(Rational::zero);
    *e += c;
    if e.is_zero() {
        acc.remove(&key);
    }
}

fn basis_vector(i: usize) -> SparseRow {
    SparseRow::from([(i, Rational::one())])
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HopfData {
    name: String,
    names: Vec<String>,
    /// `mult[i * n + j] = e_i e_j`; absent for a plain coalgebra.
    mult: Option<Vec<SparseRow>>,
    unit: Option<SparseRow>,
    comult: Vec<Tensor2>,
    counit: Vec<Rational>,
    antipode: Option<Vec<SparseRow>>,
    grading: Option<Vec<usize>>,
    cutoff: Option<usize>,
}

impl HopfData {
    /// Coalgebra on `names` with `comult[i] = Delta(e_i)` and counit values.
    pub fn coalgebra(name: impl Into<String>, names: Vec<String>, comult: Vec<Tensor2>, counit: Vec<Rational>) -> Result<Self> {
        let n = names.len();
        if comult.len() != n || counit.len() != n {
            return Err(Error::Shape(format!("coalgebra on {n} basis elements needs {n} coproducts and counit values")));
        }
        if comult.iter().any(|t| t.keys().any(|&(i, j)| i >= n || j >= n)) {
            return Err(Error::Shape("coproduct refers to a basis index out of range".into()));
        }
        Ok(HopfData {
            name: name.into(),
            names,
            mult: None,
            unit: None,
            comult,
            counit,
            antipode: None,
            grading: None,
            cutoff: None,
        })
    }

    /// Adds `e_i e_j = product(i, j)` and the unit.
    pub fn with_product(mut self, product: impl Fn(usize, usize) -> SparseRow, unit: SparseRow) -> Result<Self> {
        let n = self.dim();
        let mut mult = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut v = product(i, j);
                v.retain(|_, c| !c.is_zero());
                if v.keys().any(|k| *k >= n) {
                    return Err(Error::Shape(format!("product of {} and {} leaves the basis", self.names[i], self.names[j])));
                }
                mult.push(v);
            }
        }
        if unit.keys().any(|k| *k >= n) {
            return Err(Error::Shape("unit leaves the basis".into()));
        }
        self.mult = Some(mult);
        self.unit = Some(unit);
        Ok(self)
    }

    pub fn with_antipode(mut self, images: Vec<SparseRow>) -> Result<Self> {
        if images.len() != self.dim() {
            return Err(Error::Shape("antipode needs one image per basis element".into()));
        }
        self.antipode = Some(images);
        Ok(self)
    }

    /// Declares a grading of the basis and the truncation cutoff.
    pub fn with_grading(mut self, grading: Vec<usize>, cutoff: usize) -> Result<Self> {
        if grading.len() != self.dim() {
            return Err(Error::Shape("grading needs one degree per basis element".into()));
        }
        self.grading = Some(grading);
        self.cutoff = Some(cutoff);
        Ok(self)
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn basis_names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn has_product(&self) -> bool {
        self.mult.is_some()
    }

    pub fn grading(&self) -> Option<&[usize]> {
        self.grading.as_deref()
    }

    pub fn cutoff(&self) -> Option<usize> {
        self.cutoff
    }

    pub fn comult(&self, i: usize) -> &Tensor2 {
        &self.comult[i]
    }

    pub fn counit(&self) -> &[Rational] {
        &self.counit
    }

    pub fn unit(&self) -> Option<&SparseRow> {
        self.unit.as_ref()
    }

    pub fn antipode(&self) -> Option<&[SparseRow]> {
        self.antipode.as_deref()
    }

    /// `e_i e_j`.
    pub fn product(&self, i: usize, j: usize) -> Option<&SparseRow> {
        self.mult.as_ref().map(|m| &m[i * self.dim() + j])
    }

    /// Total grading of the indices is within the cutoff (always true when ungraded).
    pub fn fits(&self, idx: &[usize]) -> bool {
        match (&self.grading, self.cutoff) {
            (Some(g), Some(d)) => idx.iter().map(|i| g[*i]).sum::<usize>() <= d,
            _ => true,
        }
    }

    pub fn mul_vec(&self, a: &SparseRow, b: &SparseRow) -> Result<SparseRow> {
        let mult = self.mult.as_ref().ok_or_else(|| Error::Invalid(format!("{} has no product", self.name)))?;
        let n = self.dim();
        let mut out = SparseRow::new();
        for (i, x) in a {
            for (j, y) in b {
                axpy(&mut out, &(x * y), &mult[i * n + j]);
            }
        }
        Ok(out)
    }

    pub fn comul_vec(&self, a: &SparseRow) -> Tensor2 {
        let mut out = Tensor2::new();
        for (i, x) in a {
            for (key, c) in &self.comult[*i] {
                axpy2(&mut out, &(x * c), *key);
            }
        }
        out
    }

    pub fn counit_vec(&self, a: &SparseRow) -> Rational {
        a.iter().map(|(i, x)| x * &self.counit[*i]).sum()
    }

    /// `(a (x) b)(c (x) d) = ac (x) bd`.
    fn mul_tensor2(&self, s: &Tensor2, t: &Tensor2) -> Result<Tensor2> {
        let mut out = Tensor2::new();
        for ((a, b), x) in s {
            for ((c, d), y) in t {
                let left = self.mul_vec(&basis_vector(*a), &basis_vector(*c))?;
                let right = self.mul_vec(&basis_vector(*b), &basis_vector(*d))?;
                let xy = x * y;
                for (p, u) in &left {
                    for (q, v) in &right {
                        axpy2(&mut out, &(&xy * u * v), (*p, *q));
                    }
                }
            }
        }
        Ok(out)
    }

    /// Graded dual: product dual to the coproduct and vice versa.
    pub fn dual(&self) -> Result<HopfData> {
        let mult = self.mult.as_ref().ok_or_else(|| Error::Invalid(format!("{} has no product to dualize", self.name)))?;
        let unit = self.unit.clone().unwrap_or_default();
        let n = self.dim();
        let mut dual_mult = vec![SparseRow::new(); n * n];
        for (c, t) in self.comult.iter().enumerate() {
            for ((i, j), v) in t {
                dual_mult[i * n + j].insert(c, v.clone());
            }
        }
        let mut dual_comult = vec![Tensor2::new(); n];
        for i in 0..n {
            for j in 0..n {
                for (c, v) in &mult[i * n + j] {
                    dual_comult[*c].insert((i, j), v.clone());
                }
            }
        }
        let antipode = self.antipode.as_ref().map(|s| {
            let mut t = vec![SparseRow::new(); n];
            for (i, row) in s.iter().enumerate() {
                for (j, v) in row {
                    t[*j].insert(i, v.clone());
                }
            }
            t
        });
        let counit_vec: SparseRow = self.counit.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(i, c)| (i, c.clone())).collect();
        Ok(HopfData {
            name: format!("{}*", self.name),
            names: self.names.iter().map(|s| format!("[{s}]")).collect(),
            mult: Some(dual_mult),
            unit: Some(counit_vec),
            comult: dual_comult,
            counit: (0..n).map(|i| unit.get(&i).cloned().unwrap_or_else(Rational::zero)).collect(),
            antipode,
            grading: self.grading.clone(),
            cutoff: self.cutoff,
        })
    }

    /// `S = sum_k (eta eps - id)^{*k}`, which terminates on a conilpotent coalgebra.
    pub fn convolution_antipode(&self) -> Result<Vec<SparseRow>> {
        let unit = self.unit.clone().ok_or_else(|| Error::Invalid(format!("{} has no unit", self.name)))?;
        let n = self.dim();
        let f: Vec<SparseRow> = (0..n)
            .map(|i| {
                let mut v = SparseRow::new();
                axpy(&mut v, &self.counit[i], &unit);
                axpy(&mut v, &-Rational::one(), &basis_vector(i));
                v
            })
            .collect();
        let mut power: Vec<SparseRow> = (0..n)
            .map(|i| {
                let mut v = SparseRow::new();
                axpy(&mut v, &self.counit[i], &unit);
                v
            })
            .collect();
        let mut total = power.clone();
        for _ in 0..=n + 1 {
            let mut next = vec![SparseRow::new(); n];
            for (x, out) in next.iter_mut().enumerate() {
                for ((a, b), c) in &self.comult[x] {
                    if power[*a].is_empty() || f[*b].is_empty() {
                        continue;
                    }
                    let p = self.mul_vec(&power[*a], &f[*b])?;
                    axpy(out, c, &p);
                }
            }
            if next.iter().all(SparseRow::is_empty) {
                return Ok(total);
            }
            for (t, v) in total.iter_mut().zip(&next) {
                axpy(t, &Rational::one(), v);
            }
            power = next;
        }
        Err(Error::Invalid(format!("{} is not conilpotent: the antipode series does not terminate", self.name)))
    }

    pub fn cocommutativity_check(&self) -> Check {
        let witness = (0..self.dim()).find_map(|i| {
            let flipped: Tensor2 = self.comult[i].iter().map(|(&(a, b), c)| ((b, a), c.clone())).collect();
            (flipped != self.comult[i]).then(|| format!("Delta({}) is not symmetric", self.names[i]))
        });
        self.cut(Check::new("cocommutativity", self.name.clone(), witness))
    }

    pub fn commutativity_check(&self) -> Result<Check> {
        let n = self.dim();
        let mut witness = None;
        'outer: for i in 0..n {
            for j in i + 1..n {
                if self.fits(&[i, j]) && self.product(i, j) != self.product(j, i) {
                    witness = Some(format!("{} and {} do not commute", self.names[i], self.names[j]));
                    break 'outer;
                }
            }
        }
        if !self.has_product() {
            return Err(Error::Invalid(format!("{} has no product", self.name)));
        }
        Ok(self.cut(Check::new("commutativity", self.name.clone(), witness)))
    }

    fn cut(&self, c: Check) -> Check {
        match self.cutoff {
            Some(d) => c.with_cutoff(d),
            None => c,
        }
    }

    pub fn format_vector(&self, v: &SparseRow) -> String {
        if v.is_empty() {
            return "0".into();
        }
        v.iter().map(|(i, c)| format!("{}*{}", fmt_rational(c), self.names[*i])).collect::<Vec<_>>().join(" + ")
    }

    /// Every bialgebra axiom that the given structure supports, on fitting tuples.
    pub fn verify_axioms(&self) -> Result<Report> {
        let n = self.dim();
        let mut report = Report::new();
        let e = basis_vector;

        let mut witness = None;
        'co: for i in 0..n {
            let d = &self.comult[i];
            let mut left = BTreeMap::new();
            let mut right = BTreeMap::new();
            for ((a, b), c) in d {
                for ((p, q), x) in &self.comult[*a] {
                    acc3(&mut left, (*p, *q, *b), &(c * x));
                }
                for ((p, q), x) in &self.comult[*b] {
                    acc3(&mut right, (*a, *p, *q), &(c * x));
                }
            }
            if left != right {
                witness = Some(format!("coassociativity fails on {}", self.names[i]));
                break 'co;
            }
        }
        report.push(self.cut(Check::new("coassociativity", self.name.clone(), witness)));

        let witness = (0..n).find_map(|i| {
            let mut l = SparseRow::new();
            let mut r = SparseRow::new();
            for ((a, b), c) in &self.comult[i] {
                axpy(&mut l, &(c * &self.counit[*a]), &e(*b));
                axpy(&mut r, &(c * &self.counit[*b]), &e(*a));
            }
            (l != e(i) || r != e(i)).then(|| format!("counit law fails on {}", self.names[i]))
        });
        report.push(self.cut(Check::new("counit", self.name.clone(), witness)));

        if let (Some(_), Some(unit)) = (&self.mult, &self.unit) {
            let mut witness = None;
            'assoc: for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        if !self.fits(&[i, j, k]) {
                            continue;
                        }
                        let l = self.mul_vec(self.product(i, j).expect("product"), &e(k))?;
                        let r = self.mul_vec(&e(i), self.product(j, k).expect("product"))?;
                        if l != r {
                            witness = Some(format!(
                                "({0} {1}) {2} = {3} but {0} ({1} {2}) = {4}",
                                self.names[i],
                                self.names[j],
                                self.names[k],
                                self.format_vector(&l),
                                self.format_vector(&r)
                            ));
                            break 'assoc;
                        }
                    }
                }
            }
            report.push(self.cut(Check::new("associativity", self.name.clone(), witness)));

            let mut witness = None;
            for i in 0..n {
                if self.mul_vec(unit, &e(i))? != e(i) || self.mul_vec(&e(i), unit)? != e(i) {
                    witness = Some(format!("unit law fails on {}", self.names[i]));
                    break;
                }
            }
            report.push(self.cut(Check::new("unit", self.name.clone(), witness)));

            let mut witness = None;
            let unit2 = {
                let mut t = Tensor2::new();
                for (a, x) in unit {
                    for (b, y) in unit {
                        axpy2(&mut t, &(x * y), (*a, *b));
                    }
                }
                t
            };
            if self.comul_vec(unit) != unit2 || !self.counit_vec(unit).is_one() {
                witness = Some("the unit is not group-like".to_string());
            }
            'bi: for i in 0..n {
                for j in 0..n {
                    if witness.is_some() {
                        break 'bi;
                    }
                    if !self.fits(&[i, j]) {
                        continue;
                    }
                    let p = self.product(i, j).expect("product");
                    if self.counit_vec(p) != &self.counit[i] * &self.counit[j] {
                        witness = Some(format!("counit is not multiplicative on {} {}", self.names[i], self.names[j]));
                    } else if self.comul_vec(p) != self.mul_tensor2(&self.comult[i], &self.comult[j])? {
                        witness = Some(format!("Delta({} {}) differs from Delta({}) Delta({})", self.names[i], self.names[j], self.names[i], self.names[j]));
                    }
                }
            }
            report.push(self.cut(Check::new("bialgebra", self.name.clone(), witness)));

            if let Some(s) = &self.antipode {
                let mut witness = None;
                for i in 0..n {
                    let mut l = SparseRow::new();
                    let mut r = SparseRow::new();
                    for ((a, b), c) in &self.comult[i] {
                        axpy(&mut l, c, &self.mul_vec(&s[*a], &e(*b))?);
                        axpy(&mut r, c, &self.mul_vec(&e(*a), &s[*b])?);
                    }
                    let mut expected = SparseRow::new();
                    axpy(&mut expected, &self.counit[i], unit);
                    if l != expected || r != expected {
                        witness = Some(format!("antipode law fails on {}", self.names[i]));
                        break;
                    }
                }
                report.push(self.cut(Check::new("antipode", self.name.clone(), witness)));
            }
        }
        Ok(report)
    }

    /// One line per nonzero structure constant, basis elements by name.
    pub fn to_text(&self) -> String {
        let mut s = format!("basis {}\n", self.names.join(" "));
        if let Some(d) = self.cutoff {
            let g = self.grading.as_ref().expect("graded");
            s.push_str(&format!("grading {}\ncutoff {d}\n", g.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")));
        }
        if let Some(u) = &self.unit {
            for (k, c) in u {
                s.push_str(&format!("unit {} : {}\n", fmt_rational(c), self.names[*k]));
            }
        }
        for (i, c) in self.counit.iter().enumerate() {
            if !c.is_zero() {
                s.push_str(&format!("counit {} : {}\n", fmt_rational(c), self.names[i]));
            }
        }
        if let Some(m) = &self.mult {
            let n = self.dim();
            for i in 0..n {
                for j in 0..n {
                    for (k, c) in &m[i * n + j] {
                        s.push_str(&format!("mul {} {} : {} : {}\n", self.names[i], self.names[j], fmt_rational(c), self.names[*k]));
                    }
                }
            }
        }
        for (i, t) in self.comult.iter().enumerate() {
            for ((a, b), c) in t {
                s.push_str(&format!("comul {} : {} : {} {}\n", self.names[i], fmt_rational(c), self.names[*a], self.names[*b]));
            }
        }
        if let Some(a) = &self.antipode {
            for (i, row) in a.iter().enumerate() {
                for (k, c) in row {
                    s.push_str(&format!("antipode {} : {} : {}\n", self.names[i], fmt_rational(c), self.names[*k]));
                }
            }
        }
        s
    }
}

fn acc3(m: &mut BTreeMap<(usize, usize, usize), Rational>, key: (usize, usize, usize), c: &Rational) {
    let e = m.entry(key).or_insert_with(Rational::zero);
    *e += c;
    if e.is_zero() {
        m.remove(&key);
    }
}

impl fmt::Display for HopfData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (dim {})", self.name, self.dim())
    }
}
