//! Line-oriented workspace files.
//!
//! ```text
//! [algebra h3]
//! basis = x y z
//! [x,y] = z
//!
//! [module V2]
//! algebra = h3
//! dim = 2
//! x = 0 1 / 0 0
//!
//! [module V2V2]
//! algebra = h3
//! tensor = V2 V2
//!
//! [tensor t]
//! algebra = h3
//! z z = 1
//!
//! [rmatrix r]
//! algebra = h3
//! x ^ z = 1
//!
//! [cobracket delta]
//! algebra = h3
//! z = 1 x y ; -1 y x
//! ```
//!
//! Generators absent from a module act by zero. `a ^ b = c` adds `c (a (x) b - b (x) a)`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use num_traits::Zero;
use unibraid::kernel::{parse_rational, Matrix, Rational};
use unibraid::liealg::{
    filtration_degree_check, validate_lie_algebra, validate_representation, Cobracket, LieAlgebraData, LieAlgebraSpec,
    RepresentationData, RepresentationSpec, TensorRole, TwoTensor,
};
use unibraid::report::{Check, Report};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Kind {
    Algebra,
    Module,
    Tensor,
    RMatrix,
    Cobracket,
}

impl Kind {
    fn parse(s: &str) -> Option<Kind> {
        Some(match s {
            "algebra" => Kind::Algebra,
            "module" => Kind::Module,
            "tensor" => Kind::Tensor,
            "rmatrix" => Kind::RMatrix,
            "cobracket" => Kind::Cobracket,
            _ => return None,
        })
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Kind::Algebra => "algebra",
            Kind::Module => "module",
            Kind::Tensor => "tensor",
            Kind::RMatrix => "rmatrix",
            Kind::Cobracket => "cobracket",
        }
    }
}

/// Malformed or unresolvable input, with its location.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InputError {
    pub file: String,
    pub line: usize,
    pub message: String,
    /// Caused by a falsified mathematical certification (Jacobi, nilpotency, invariance, ...)
    /// rather than malformed or unresolvable input.
    pub math: bool,
}

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.file, self.line, self.message)
    }
}

#[derive(Clone, Debug)]
struct Entry {
    key: String,
    value: String,
    line: usize,
}

#[derive(Clone, Debug)]
struct Section {
    kind: Kind,
    name: String,
    line: usize,
    entries: Vec<Entry>,
}

impl Section {
    fn get(&self, key: &str) -> Option<&Entry> {
        self.entries.iter().find(|e| e.key == key)
    }
}

/// A parsed file; nothing is certified yet.
#[derive(Clone, Debug)]
pub struct RawWorkspace {
    file: String,
    sections: Vec<Section>,
}

pub fn parse(file: &str, text: &str) -> Result<RawWorkspace, InputError> {
    let err = |line: usize, message: String| InputError { file: file.to_string(), line, message, math: false };
    let mut sections: Vec<Section> = Vec::new();
    let mut seen: BTreeSet<(Kind, String)> = BTreeSet::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(header) = content.strip_prefix('[').and_then(|h| h.strip_suffix(']')) {
            // `[x,y] = z` is an entry, a header has no `=`.
            if !content.contains('=') {
                let mut parts = header.split_whitespace();
                let kind_s = parts.next().unwrap_or("");
                let kind = Kind::parse(kind_s).ok_or_else(|| err(line, format!("unknown section kind `{kind_s}`")))?;
                let name = parts.next().ok_or_else(|| err(line, format!("section [{kind_s}] needs a name")))?;
                if parts.next().is_some() {
                    return Err(err(line, "section header has trailing text".into()));
                }
                let key = (kind, name.to_string());
                // Modules, tensors and r-matrices share one namespace within their kind only.
                if !seen.insert(key) {
                    return Err(err(line, format!("duplicate {} name `{name}`", kind.as_str())));
                }
                sections.push(Section { kind, name: name.to_string(), line, entries: Vec::new() });
                continue;
            }
        }
        let (key, value) = content.split_once('=').ok_or_else(|| err(line, format!("expected `key = value`, got `{content}`")))?;
        let section = sections.last_mut().ok_or_else(|| err(line, "entry outside any section".into()))?;
        let key = key.split_whitespace().collect::<Vec<_>>().join(" ");
        if section.entries.iter().any(|e| e.key == key) && !key.starts_with('[') {
            return Err(err(line, format!("duplicate key `{key}` in [{} {}]", section.kind.as_str(), section.name)));
        }
        section.entries.push(Entry { key, value: value.trim().to_string(), line });
    }
    Ok(RawWorkspace { file: file.to_string(), sections })
}

/// Certified content. Sections keep file order within each kind.
#[derive(Clone, Debug, Default)]
pub struct Workspace {
    pub algebras: Vec<Arc<LieAlgebraData>>,
    pub modules: Vec<RepresentationData>,
    pub tensors: Vec<(String, TwoTensor)>,
    pub rmatrices: Vec<(String, TwoTensor)>,
    pub cobrackets: Vec<(String, Cobracket)>,
}

impl Workspace {
    pub fn algebra(&self, name: &str) -> Option<&Arc<LieAlgebraData>> {
        self.algebras.iter().find(|g| g.name() == name)
    }

    pub fn module(&self, name: &str) -> Option<&RepresentationData> {
        self.modules.iter().find(|m| m.name() == name)
    }

    pub fn rmatrix(&self, name: &str) -> Option<&TwoTensor> {
        self.rmatrices.iter().find(|(n, _)| n == name).map(|(_, t)| t)
    }

    /// Registered modules over `g`, in file order.
    pub fn modules_over(&self, g: &LieAlgebraData) -> Vec<RepresentationData> {
        self.modules.iter().filter(|m| m.algebra().as_ref() == g).cloned().collect()
    }
}

/// Outcome of certifying every section.
pub struct Certified {
    pub workspace: Workspace,
    /// One row per section, plus cobracket filtration rows.
    pub report: Report,
    /// Every failure with its location, in section order.
    pub errors: Vec<InputError>,
}

impl Certified {
    pub fn first_error(&self) -> Option<&InputError> {
        self.errors.first()
    }
}

impl RawWorkspace {
    fn err(&self, line: usize, message: impl Into<String>) -> InputError {
        InputError { file: self.file.clone(), line, message: message.into(), math: false }
    }

    fn core(&self, line: usize, e: unibraid::Error) -> InputError {
        let math = matches!(e, unibraid::Error::Check(_) | unibraid::Error::NotNilpotent(_));
        InputError { math, ..self.err(line, e.to_string()) }
    }

    fn of_kind(&self, kind: Kind) -> impl Iterator<Item = &Section> {
        self.sections.iter().filter(move |s| s.kind == kind)
    }

    /// Certifies every section. Failures are recorded, not fatal, so `validate` can list them all.
    pub fn certify(&self) -> Certified {
        let mut ws = Workspace::default();
        let mut report = Report::new();
        let mut errors: Vec<InputError> = Vec::new();
        fn record(report: &mut Report, errors: &mut Vec<InputError>, s: &Section, r: Result<(), InputError>) {
            let witness = r.as_ref().err().map(|e| e.to_string());
            report.push(Check::new(s.kind.as_str(), &s.name, witness));
            if let Err(e) = r {
                errors.push(e);
            }
        }

        for s in self.of_kind(Kind::Algebra) {
            let r = self.algebra(s).map(|g| ws.algebras.push(g));
            record(&mut report, &mut errors, s, r);
        }

        let mut resolving = BTreeSet::new();
        let mut done: BTreeMap<String, Result<RepresentationData, InputError>> = BTreeMap::new();
        for s in self.of_kind(Kind::Module) {
            let r = self.module(s, &ws, &mut resolving, &mut done);
            let r = r.map(|m| ws.modules.push(m));
            record(&mut report, &mut errors, s, r);
        }

        for kind in [Kind::Tensor, Kind::RMatrix] {
            for s in self.of_kind(kind) {
                let r = self.two_tensor(s, &ws).map(|t| match kind {
                    Kind::Tensor => ws.tensors.push((s.name.clone(), t)),
                    _ => ws.rmatrices.push((s.name.clone(), t)),
                });
                record(&mut report, &mut errors, s, r);
            }
        }

        for s in self.of_kind(Kind::Cobracket) {
            let r = self.cobracket(s, &ws);
            let r = r.map(|d| {
                let rows = filtration_degree_check(d.algebra(), &d);
                ws.cobrackets.push((s.name.clone(), d));
                rows
            });
            match r {
                Ok(rows) => {
                    report.push(Check::pass("cobracket", &s.name));
                    for c in rows.checks {
                        if !c.pass {
                            let e = self.err(s.line, format!("cobracket `{}` fails {}", s.name, c.check));
                            errors.push(InputError { math: true, ..e });
                        }
                        report.push(c);
                    }
                }
                Err(e) => record(&mut report, &mut errors, s, Err(e)),
            }
        }
        Certified { workspace: ws, report, errors }
    }

    fn section_algebra<'w>(&self, s: &Section, ws: &'w Workspace) -> Result<&'w Arc<LieAlgebraData>, InputError> {
        let e = s.get("algebra").ok_or_else(|| self.err(s.line, format!("[{} {}] needs `algebra = NAME`", s.kind.as_str(), s.name)))?;
        if let Some(g) = ws.algebra(&e.value) {
            return Ok(g);
        }
        if self.of_kind(Kind::Algebra).any(|a| a.name == e.value) {
            return Err(InputError { math: true, ..self.err(e.line, format!("algebra `{}` failed validation", e.value)) });
        }
        Err(self.err(e.line, format!("unknown algebra `{}`", e.value)))
    }

    fn rational(&self, line: usize, s: &str) -> Result<Rational, InputError> {
        parse_rational(s).map_err(|_| self.err(line, format!("`{s}` is not a rational number")))
    }

    fn algebra(&self, s: &Section) -> Result<Arc<LieAlgebraData>, InputError> {
        let basis_e = s.get("basis").ok_or_else(|| self.err(s.line, format!("[algebra {}] needs `basis = ...`", s.name)))?;
        let basis: Vec<String> = basis_e.value.split_whitespace().map(String::from).collect();
        let mut brackets: BTreeMap<(usize, usize), Vec<Rational>> = BTreeMap::new();
        for e in &s.entries {
            match e.key.as_str() {
                "basis" => continue,
                k if k.starts_with('[') && k.ends_with(']') => {
                    let inner = &k[1..k.len() - 1];
                    let (a, b) = inner.split_once(',').ok_or_else(|| self.err(e.line, format!("bracket key `{k}` must be `[a,b]`")))?;
                    let idx = |n: &str| {
                        basis.iter().position(|x| x == n.trim()).ok_or_else(|| self.err(e.line, format!("unknown basis element `{}`", n.trim())))
                    };
                    let (i, j) = (idx(a)?, idx(b)?);
                    if i == j {
                        return Err(self.err(e.line, format!("[{},{}] must vanish", basis[i], basis[j])));
                    }
                    let v = self.combination(e.line, &e.value, &basis)?;
                    let (key, v) = if i < j { ((i, j), v) } else { ((j, i), v.into_iter().map(|c| -c).collect()) };
                    if brackets.insert(key, v).is_some() {
                        return Err(self.err(e.line, format!("bracket [{},{}] given twice", basis[key.0], basis[key.1])));
                    }
                }
                k => return Err(self.err(e.line, format!("unknown key `{k}` in [algebra {}]", s.name))),
            }
        }
        let spec = LieAlgebraSpec {
            name: s.name.clone(),
            basis,
            brackets: brackets.into_iter().map(|((i, j), v)| (i, j, v)).collect(),
        };
        validate_lie_algebra(&spec).map_err(|e| self.core(s.line, e))
    }

    /// `2 z - 1/2 w + x` in coordinates.
    fn combination(&self, line: usize, text: &str, basis: &[String]) -> Result<Vec<Rational>, InputError> {
        let mut out = vec![Rational::zero(); basis.len()];
        if text.trim() == "0" {
            return Ok(out);
        }
        let mut sign = Rational::from_integer(1.into());
        let mut coeff: Option<Rational> = None;
        let mut pending = false;
        let spaced = text.replace('+', " + ").replace(" -", " - ");
        for tok in spaced.split_whitespace() {
            match tok {
                "+" => {}
                "-" => sign = -sign,
                _ if coeff.is_none() && parse_rational(tok).is_ok() => {
                    coeff = Some(self.rational(line, tok)?);
                    pending = true;
                    continue;
                }
                _ => {
                    let (neg, name) = match tok.strip_prefix('-') {
                        Some(n) => (true, n),
                        None => (false, tok),
                    };
                    let i = basis.iter().position(|b| b == name).ok_or_else(|| self.err(line, format!("unknown basis element `{name}`")))?;
                    let mut c = coeff.take().unwrap_or_else(|| Rational::from_integer(1.into())) * &sign;
                    if neg {
                        c = -c;
                    }
                    out[i] += c;
                    sign = Rational::from_integer(1.into());
                    pending = false;
                    continue;
                }
            }
            if pending {
                return Err(self.err(line, format!("coefficient without a basis element in `{text}`")));
            }
        }
        if pending || coeff.is_some() {
            return Err(self.err(line, format!("coefficient without a basis element in `{text}`")));
        }
        Ok(out)
    }

    fn matrix(&self, line: usize, text: &str, dim: usize) -> Result<Matrix, InputError> {
        let rows: Vec<Vec<Rational>> = text
            .split('/')
            .map(|r| r.split_whitespace().map(|x| self.rational(line, x)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<_, _>>()?;
        if rows.iter().any(|r| r.len() != rows[0].len()) {
            return Err(self.err(line, "matrix rows have different lengths"));
        }
        if rows.len() != dim || rows[0].len() != dim {
            return Err(self.err(line, format!("matrix is {}x{}, expected {dim}x{dim}", rows.len(), rows[0].len())));
        }
        Matrix::from_rows(rows).map_err(|e| self.err(line, e.to_string()))
    }

    fn module(
        &self,
        s: &Section,
        ws: &Workspace,
        resolving: &mut BTreeSet<String>,
        done: &mut BTreeMap<String, Result<RepresentationData, InputError>>,
    ) -> Result<RepresentationData, InputError> {
        if let Some(r) = done.get(&s.name) {
            return r.clone();
        }
        if !resolving.insert(s.name.clone()) {
            return Err(self.err(s.line, format!("module `{}` is defined in terms of itself", s.name)));
        }
        let r = self.module_uncached(s, ws, resolving, done);
        resolving.remove(&s.name);
        done.insert(s.name.clone(), r.clone());
        r
    }

    fn module_uncached(
        &self,
        s: &Section,
        ws: &Workspace,
        resolving: &mut BTreeSet<String>,
        done: &mut BTreeMap<String, Result<RepresentationData, InputError>>,
    ) -> Result<RepresentationData, InputError> {
        let g = self.section_algebra(s, ws)?;
        if let Some(e) = s.get("tensor") {
            if let Some(other) = s.entries.iter().find(|x| x.key != "algebra" && x.key != "tensor") {
                return Err(self.err(other.line, format!("`{}` is not allowed next to `tensor`", other.key)));
            }
            let mut factors = Vec::new();
            for name in e.value.split_whitespace() {
                let sec = self
                    .of_kind(Kind::Module)
                    .find(|m| m.name == name)
                    .ok_or_else(|| self.err(e.line, format!("unknown module `{name}`")))?;
                let m = self
                    .module(sec, ws, resolving, done)
                    .map_err(|inner| InputError { math: inner.math, ..self.err(e.line, format!("factor `{name}` is invalid: {}", inner.message)) })?;
                if m.algebra().as_ref() != g.as_ref() {
                    return Err(self.err(e.line, format!("module `{name}` is over a different algebra")));
                }
                factors.push(m);
            }
            return RepresentationData::tensor_all(&factors)
                .map(|m| m.with_name(&s.name))
                .ok_or_else(|| self.err(e.line, "`tensor` needs at least one factor"));
        }
        let dim_e = s.get("dim").ok_or_else(|| self.err(s.line, format!("[module {}] needs `dim = N` or `tensor = ...`", s.name)))?;
        let dim: usize = dim_e.value.parse().map_err(|_| self.err(dim_e.line, format!("`{}` is not a dimension", dim_e.value)))?;
        let mut matrices = vec![Matrix::zeros(dim, dim); g.dim()];
        for e in &s.entries {
            if e.key == "algebra" || e.key == "dim" {
                continue;
            }
            let i = g
                .index_of(&e.key)
                .ok_or_else(|| self.err(e.line, format!("`{}` is not a basis element of `{}`", e.key, g.name())))?;
            matrices[i] = self.matrix(e.line, &e.value, dim)?;
        }
        let spec = RepresentationSpec { name: s.name.clone(), dim, matrices };
        validate_representation(g, &spec).map_err(|e| self.core(s.line, e))
    }

    fn two_tensor(&self, s: &Section, ws: &Workspace) -> Result<TwoTensor, InputError> {
        let g = self.section_algebra(s, ws)?;
        let mut terms = Vec::new();
        for e in &s.entries {
            if e.key == "algebra" {
                continue;
            }
            let c = self.rational(e.line, &e.value)?;
            let idx = |n: &str| g.index_of(n).ok_or_else(|| self.err(e.line, format!("`{n}` is not a basis element of `{}`", g.name())));
            let parts: Vec<&str> = e.key.split_whitespace().collect();
            match parts.as_slice() {
                [a, "^", b] => {
                    let (i, j) = (idx(a)?, idx(b)?);
                    terms.push((c.clone(), i, j));
                    terms.push((-c, j, i));
                }
                [a, b] => terms.push((c, idx(a)?, idx(b)?)),
                _ => return Err(self.err(e.line, format!("expected `a b = c` or `a ^ b = c`, got `{}`", e.key))),
            }
        }
        let role = if s.kind == Kind::Tensor { TensorRole::SymmetricInvariant } else { TensorRole::RMatrix };
        TwoTensor::from_terms(g, &terms, role).map_err(|e| self.core(s.line, e))
    }

    fn cobracket(&self, s: &Section, ws: &Workspace) -> Result<Cobracket, InputError> {
        let g = self.section_algebra(s, ws)?;
        let n = g.dim();
        let mut images = vec![Matrix::zeros(n, n); n];
        for e in &s.entries {
            if e.key == "algebra" {
                continue;
            }
            let i = g.index_of(&e.key).ok_or_else(|| self.err(e.line, format!("`{}` is not a basis element of `{}`", e.key, g.name())))?;
            for term in e.value.split(';').map(str::trim).filter(|t| !t.is_empty() && *t != "0") {
                let parts: Vec<&str> = term.split_whitespace().collect();
                let [c, a, b] = parts.as_slice() else {
                    return Err(self.err(e.line, format!("cobracket term `{term}` must be `c a b`")));
                };
                let idx = |x: &str| g.index_of(x).ok_or_else(|| self.err(e.line, format!("`{x}` is not a basis element")));
                images[i].add_at(idx(a)?, idx(b)?, &self.rational(e.line, c)?);
            }
        }
        Cobracket::new(g, images).map_err(|e| self.core(s.line, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const H3: &str = "\
[algebra h3]
basis = x y z
[x,y] = z

[module V2]  # x acts
algebra = h3
dim = 2
x = 0 1 / 0 0

[module P]
algebra = h3
tensor = V2 V2

[tensor t]
algebra = h3
z z = 1

[rmatrix r]
algebra = h3
x ^ z = 1/2
";

    #[test]
    fn parses_and_certifies() {
        let c = parse("h3.ws", H3).unwrap().certify();
        assert!(c.errors.is_empty(), "{:?}", c.errors);
        let ws = c.workspace;
        assert_eq!(ws.module("P").unwrap().dim(), 4);
        let r = ws.rmatrix("r").unwrap();
        assert!(r.is_antisymmetric());
        assert_eq!(r.coeff(0, 2), Rational::new(1.into(), 2.into()));
    }

    #[test]
    fn combinations() {
        let raw = parse("f", "").unwrap();
        let b: Vec<String> = ["x", "y", "z"].iter().map(|s| s.to_string()).collect();
        let v = raw.combination(1, "2 x - 1/2 z + y", &b).unwrap();
        assert_eq!(v, vec![Rational::from_integer(2.into()), Rational::from_integer(1.into()), Rational::new((-1).into(), 2.into())]);
        assert_eq!(raw.combination(1, "-z", &b).unwrap()[2], Rational::from_integer((-1).into()));
        assert!(raw.combination(1, "2", &b).is_err());
        assert!(raw.combination(1, "q", &b).is_err());
    }

    #[test]
    fn errors_carry_locations() {
        let e = parse("w", "[algebra a]\nbasis = x\n[algebra a]\n").unwrap_err();
        assert_eq!((e.line, e.message.as_str()), (3, "duplicate algebra name `a`"));
        let e = parse("w", "[widget a]\n").unwrap_err();
        assert_eq!(e.to_string(), "w:1: unknown section kind `widget`");
        let e = parse("w", "basis = x\n").unwrap_err();
        assert_eq!(e.line, 1);

        let c = parse("w", "[algebra a]\nbasis = x y\n[module M]\nalgebra = a\ndim = 2\nx = 0 1 / 0\n").unwrap().certify();
        assert_eq!(c.first_error().unwrap().clone().line, 6);
        let c = parse("w", "[algebra a]\nbasis = x\n[module M]\nalgebra = b\ndim = 1\n").unwrap().certify();
        let e = c.first_error().unwrap().clone();
        assert_eq!(e.line, 4);
        assert!(e.message.contains("unknown algebra `b`") && !e.math);
        let c = parse("w", "[algebra a]\nbasis = x\n[module M]\nalgebra = a\ntensor = M\n").unwrap().certify();
        assert!(c.first_error().unwrap().clone().message.contains("itself"));
    }

    #[test]
    fn certification_failures_are_reported_per_section() {
        let text = "[algebra bad]\nbasis = x y\n[x,y] = x\n[algebra ok]\nbasis = a\n";
        let c = parse("w", text).unwrap().certify();
        assert_eq!(c.report.checks.len(), 2);
        assert!(!c.report.checks[0].pass);
        assert!(c.report.checks[1].pass);
        let e = c.first_error().unwrap().clone();
        assert!(e.math && e.line == 1, "{e}");
        let text = "[algebra bad]\nbasis = x y\n[x,y] = x\n[module M]\nalgebra = bad\ndim = 1\n";
        let c = parse("w", text).unwrap().certify();
        assert!(c.report.checks.iter().all(|c| !c.pass));
    }
}
