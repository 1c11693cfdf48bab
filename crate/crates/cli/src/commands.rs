use std::fmt;
use std::path::Path;
use std::sync::Arc;

use num_traits::{One, Zero};
use unibraid::associator::{residuals, solve_associator_with, SolverOptions, TruncatedAssociator};
use unibraid::category::BraidedStructure;
use unibraid::hopf::{
    coradical_filtration, enveloping_hopf, filtration_preservation_check, lie_poisson_bracket, primitives, trivial_coalgebra,
    truncated_polynomial, twisted_function_algebra, two_group_like, HopfData,
};
use unibraid::kernel::{fmt_rational, parse_rational, to_sparse, Matrix, Rational, Subspace};
use unibraid::liealg::{invariant_symmetric_tensors, LieAlgebraData, RepresentationData, TensorRole, TwoTensor};
use unibraid::pbw::UTensor;
use unibraid::report::{Check, Report};
use unibraid::twist::{
    cybe_residual, drinfeld_subalgebra, fiber_functor_check, r_matrix, recover_r, solve_twist, symplectic_to_r, twist_bound,
    verify_qybe, TwistSeries,
};

use crate::output::{digest, Artifact, Outcome};
use crate::workspace::{self, Workspace};
use crate::{Command, Corpus};

/// Anything that makes the input unusable; exit status 2.
#[derive(Debug)]
pub struct InputFailure(pub String);

impl fmt::Display for InputFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<unibraid::Error> for InputFailure {
    fn from(e: unibraid::Error) -> Self {
        InputFailure(e.to_string())
    }
}

type Res<T> = Result<T, InputFailure>;

fn fail<T>(msg: impl Into<String>) -> Res<T> {
    Err(InputFailure(msg.into()))
}

struct Loaded {
    ws: Workspace,
    digest: String,
}

fn read(path: &Path) -> Res<(String, String)> {
    let bytes = std::fs::read(path).map_err(|e| InputFailure(format!("cannot read {}: {e}", path.display())))?;
    let d = digest(&bytes);
    let text = String::from_utf8(bytes).map_err(|_| InputFailure(format!("{} is not UTF-8", path.display())))?;
    Ok((text, d))
}

/// Parses and certifies; any failure is an input error outside `validate`.
fn load(path: &Path) -> Res<Loaded> {
    let (text, digest) = read(path)?;
    let raw = workspace::parse(&path.display().to_string(), &text).map_err(|e| InputFailure(e.to_string()))?;
    let c = raw.certify();
    if let Some(e) = c.first_error() {
        return fail(format!("{e} (run `validate` for the full list)"));
    }
    Ok(Loaded { ws: c.workspace, digest })
}

/// Named entry, or the only one when no name is given.
fn pick<'a, T>(kind: &str, name: Option<&str>, items: &'a [(String, T)]) -> Res<(&'a str, &'a T)> {
    match name {
        Some(n) => items
            .iter()
            .find(|(m, _)| m == n)
            .map(|(m, t)| (m.as_str(), t))
            .ok_or_else(|| InputFailure(format!("unknown {kind} `{n}`"))),
        None => match items {
            [(m, t)] => Ok((m.as_str(), t)),
            [] => fail(format!("the workspace has no {kind} section")),
            _ => fail(format!("several {kind} sections; choose one with --{kind}")),
        },
    }
}

fn pick_algebra<'a>(ws: &'a Workspace, name: Option<&str>) -> Res<&'a Arc<LieAlgebraData>> {
    match name {
        Some(n) => ws.algebra(n).ok_or_else(|| InputFailure(format!("unknown algebra `{n}`"))),
        None => match ws.algebras.as_slice() {
            [g] => Ok(g),
            [] => fail("the workspace has no algebra section"),
            _ => fail("several algebra sections; choose one with --algebra"),
        },
    }
}

fn corpus_modules(ws: &Workspace, g: &LieAlgebraData, names: &Option<Vec<String>>) -> Res<Vec<RepresentationData>> {
    let mods = match names {
        None => ws.modules_over(g),
        Some(ns) => {
            let mut out = Vec::new();
            for n in ns {
                let m = ws.module(n).ok_or_else(|| InputFailure(format!("unknown module `{n}`")))?;
                if m.algebra().as_ref() != g {
                    return fail(format!("module `{n}` is not over `{}`", g.name()));
                }
                if !out.iter().any(|o: &RepresentationData| o.name() == n) {
                    out.push(m.clone());
                }
            }
            out
        }
    };
    if mods.is_empty() {
        return fail(format!("no modules over `{}`", g.name()));
    }
    Ok(mods)
}

/// Least `Phi`-degree making associativity exact on the corpus, and on the
/// triples with a tensor-product factor that the pentagon needs.
fn required_degree(t: &TwoTensor, mods: &[RepresentationData], pentagon: bool) -> Res<usize> {
    let probe = BraidedStructure::new(t, &TruncatedAssociator::trivial(usize::from(u8::MAX)), mods.to_vec())?;
    let d = if pentagon { probe.coherence_degree()? } else { probe.required_degree()? };
    Ok(d.max(1))
}

fn associator(n: usize) -> Res<unibraid::freealg::FreeSeries> {
    Ok(solve_associator_with(n, &SolverOptions::default())?.associator.into_series())
}

fn structure(l: &Loaded, c: &Corpus, tensor: Option<&str>, pentagon: bool, report: &mut Report) -> Res<BraidedStructure> {
    let (_, t) = pick("tensor", tensor, &l.ws.tensors)?;
    let mods = corpus_modules(&l.ws, t.algebra(), &c.modules)?;
    let need = required_degree(t, &mods, pentagon)?;
    let n = c.degree.unwrap_or(need);
    if n < need {
        return Err(unibraid::Error::DegreeTooSmall { have: n, need }.into());
    }
    report.push(Check::info("required-degree", mods_subject(&mods), need.to_string()));
    Ok(BraidedStructure::new(t, &associator(n)?, mods)?)
}

fn mods_subject(mods: &[RepresentationData]) -> String {
    mods.iter().map(|m| m.name()).collect::<Vec<_>>().join(",")
}

/// Turns a falsified mathematical precondition into a failed row; other errors stay input errors.
fn as_check<T>(name: &str, subject: &str, r: unibraid::Result<T>) -> Res<(Check, Option<T>)> {
    match r {
        Ok(v) => Ok((Check::pass(name, subject), Some(v))),
        Err(e @ (unibraid::Error::Check(_) | unibraid::Error::Infeasible { .. })) => {
            Ok((Check::fail(name, subject, e.to_string()), None))
        }
        Err(e) => Err(e.into()),
    }
}

fn outcome(command: &'static str, digest: Option<String>, report: Report, artifacts: Vec<Artifact>) -> Outcome {
    Outcome { command, input_digest: digest, report, artifacts }
}

fn artifact(name: impl Into<String>, text: impl Into<String>) -> Artifact {
    Artifact { name: name.into(), text: text.into() }
}

pub fn run(cmd: &Command) -> Res<Outcome> {
    match cmd {
        Command::Validate { workspace } => validate(workspace),
        Command::Invariants { workspace, algebra } => invariants(workspace, algebra.as_deref()),
        Command::Associator { degree } => solve(*degree),
        Command::Coherence { corpus, tensor } => {
            let l = load(&corpus.workspace)?;
            let mut report = Report::new();
            let s = structure(&l, corpus, tensor.as_deref(), true, &mut report)?;
            report.extend(s.verify_coherence()?);
            report.extend(s.quasisymmetry_check()?);
            Ok(outcome("coherence", Some(l.digest), report, vec![]))
        }
        Command::Rescale { corpus, tensor, lambda } => {
            let lambda = parse_rational(lambda).map_err(|_| InputFailure(format!("--lambda `{lambda}` is not rational")))?;
            let l = load(&corpus.workspace)?;
            let mut report = Report::new();
            let s = structure(&l, corpus, tensor.as_deref(), true, &mut report)?;
            report.push(s.rescale_formula_check(&lambda)?);
            let scaled = s.rescale(&lambda)?;
            if lambda.is_zero() {
                report.push(scaled.symmetry_check()?);
            }
            report.extend(scaled.verify_coherence()?);
            Ok(outcome("rescale", Some(l.digest), report, vec![]))
        }
        Command::RecoverT { corpus, tensor } => {
            let l = load(&corpus.workspace)?;
            let mut report = Report::new();
            let s = structure(&l, corpus, tensor.as_deref(), false, &mut report)?;
            report.extend(s.recover_t()?);
            Ok(outcome("recover-t", Some(l.digest), report, vec![]))
        }
        Command::Cybe { workspace, rmatrix, ansatz, height } => cybe(workspace, rmatrix, ansatz, *height),
        Command::Correspondence { workspace, rmatrix } => correspondence(workspace, rmatrix.as_deref()),
        Command::Twist { corpus, rmatrix } => {
            let l = load(&corpus.workspace)?;
            let mut report = Report::new();
            let mut artifacts = vec![];
            if let Some((j, mods)) = twist(&l, corpus, rmatrix.as_deref(), &mut report)? {
                report.extend(fiber_functor_check(&j, &mods)?);
                artifacts.push(artifact("J", j.to_text()));
            }
            Ok(outcome("twist", Some(l.digest), report, artifacts))
        }
        Command::Qybe { corpus, rmatrix } => {
            let l = load(&corpus.workspace)?;
            let mut report = Report::new();
            let mut artifacts = vec![];
            if let Some((j, mods)) = twist(&l, corpus, rmatrix.as_deref(), &mut report)? {
                let rm = r_matrix(&j, j.symmetric_part())?;
                report.push(leading_terms(&j, rm.element()));
                report.extend(verify_qybe(&rm, &mods)?);
                artifacts.push(artifact("R", rm.to_text()));
            }
            Ok(outcome("qybe", Some(l.digest), report, artifacts))
        }
        Command::RecoverR { corpus, rmatrix } => {
            let l = load(&corpus.workspace)?;
            let mut report = Report::new();
            let mut artifacts = vec![];
            if let Some((j, _)) = twist(&l, corpus, rmatrix.as_deref(), &mut report)? {
                let rm = r_matrix(&j, j.symmetric_part())?;
                let (row, r) = as_check("recover-r", j.source().algebra().name(), recover_r(&rm, j.associator()))?;
                match r {
                    Some(r) => {
                        let w = (r.coeffs() != j.source().coeffs()).then(|| format!("recovered {r}, expected {}", j.source()));
                        report.push(Check::new("recover-r", format!("{}", j.source()), w).with_cutoff(j.degree()));
                        artifacts.push(artifact("r", format!("{r}\n")));
                    }
                    None => report.push(row),
                }
            }
            Ok(outcome("recover-r", Some(l.digest), report, artifacts))
        }
        Command::Coradical { workspace, example, algebra, function, rmatrix, degree } => {
            coradical(workspace.as_deref(), example.as_deref(), algebra.as_deref(), *function, rmatrix.as_deref(), *degree)
        }
        Command::Enveloping { workspace, algebra, degree } => {
            let l = load(workspace)?;
            let g = pick_algebra(&l.ws, algebra.as_deref())?;
            let h = enveloping_hopf(g, *degree)?;
            let mut report = h.verify_axioms()?;
            report.push(coconnected_row(&h));
            let gens = unibraid::pbw::PbwBasis::new(g, *degree)?;
            let expected: Vec<_> = (0..g.dim()).filter_map(|i| gens.generator(i)).map(|m| to_sparse(&unit(h.dim(), m as usize))).collect();
            let prim = primitives(&h)?;
            let w = (prim != Subspace::span(h.dim(), expected.clone()))
                .then(|| format!("primitives have dimension {}, generators span {}", prim.dim(), expected.len()));
            report.push(Check::new("primitives-are-generators", h.name(), w).with_cutoff(*degree));
            Ok(outcome("enveloping", Some(l.digest), report, vec![artifact(h.name(), h.to_text())]))
        }
        Command::TwistOhg { workspace, rmatrix, degree } => {
            let l = load(workspace)?;
            let (_, r) = pick("rmatrix", rmatrix.as_deref(), &l.ws.rmatrices)?;
            let tfa = twisted_function_algebra(r.algebra(), r, *degree)?;
            let h = tfa.hopf();
            let mut report = tfa.report().clone();
            report.push(Check::info("product-changed", h.name(), if tfa.product_changed() { "yes" } else { "no" }));
            let defect = match tfa.degree_two_defect() {
                Some((i, j, c)) => {
                    let n = h.basis_names();
                    format!("{} {} - {} {} = {}", n[i], n[j], n[j], n[i], h.format_vector(&c))
                }
                None => "none".into(),
            };
            report.push(Check::info("degree-two-commutator", h.name(), defect));
            report.push(Check::info("r-form-trivial", h.name(), if tfa.rform_is_trivial() { "yes" } else { "no" }));
            let artifacts = vec![artifact(h.name(), h.to_text()), artifact("r-form", tfa.rform_text())];
            Ok(outcome("twist-ohg", Some(l.digest), report, artifacts))
        }
    }
}

fn unit(n: usize, i: usize) -> Vec<Rational> {
    let mut v = vec![Rational::zero(); n];
    v[i] = Rational::one();
    v
}

fn validate(path: &Path) -> Res<Outcome> {
    let (text, digest) = read(path)?;
    let raw = workspace::parse(&path.display().to_string(), &text).map_err(|e| InputFailure(e.to_string()))?;
    let c = raw.certify();
    if let Some(e) = c.errors.iter().find(|e| !e.math) {
        return fail(e.to_string());
    }
    let mut report = c.report;
    // The termination bound is certified for every tensor on every triple of its modules.
    for (name, t) in &c.workspace.tensors {
        let mods = c.workspace.modules_over(t.algebra());
        if mods.is_empty() {
            continue;
        }
        let (row, need) = as_check("termination-bound", name, required_degree(t, &mods, true).map_err(|e| unibraid::Error::Check(e.0)))?;
        report.push(match need {
            Some(d) => Check::info("termination-bound", format!("{name} on {}", mods_subject(&mods)), format!("Phi-degree {d} suffices")),
            None => row,
        });
    }
    Ok(outcome("validate", Some(digest), report, vec![]))
}

fn invariants(path: &Path, algebra: Option<&str>) -> Res<Outcome> {
    let l = load(path)?;
    let algebras: Vec<&Arc<LieAlgebraData>> = match algebra {
        Some(_) => vec![pick_algebra(&l.ws, algebra)?],
        None => l.ws.algebras.iter().collect(),
    };
    let mut report = Report::new();
    let mut text = String::new();
    for g in algebras {
        let basis = invariant_symmetric_tensors(g);
        report.push(Check::info("invariant-symmetric-tensors", g.name(), format!("dimension {}", basis.len())));
        for (k, t) in basis.iter().enumerate() {
            text.push_str(&format!("{} t{k} = {t}\n", g.name()));
        }
    }
    Ok(outcome("invariants", Some(l.digest), report, vec![artifact("invariant-symmetric-tensors", text)]))
}

fn solve(n: usize) -> Res<Outcome> {
    let out = solve_associator_with(n, &SolverOptions::default())?;
    let phi = out.associator.series();
    let res = residuals(phi)?;
    let mut report = Report::new();
    let row = |name: &str, s: &unibraid::freealg::FreeSeries| {
        Check::new(name, "Phi(a,b)", (!s.is_zero()).then(|| s.to_text().trim_end().replace('\n', "; "))).with_cutoff(n)
    };
    report.push(row("pentagon", &res.pentagon));
    report.push(row("hexagon1", &res.hexagon1));
    report.push(row("hexagon2", &res.hexagon2));
    let bad = (1..=n).find(|d| !out.log.homogeneous(*d).is_lie());
    report.push(Check::new("log-is-lie", "log Phi(a,b)", bad.map(|d| format!("degree {d}"))).with_cutoff(n));
    for s in &out.steps {
        report.push(Check::info(
            "degree-solve",
            format!("degree {}", s.degree),
            format!("{} unknowns, {} equations, solution dimension {}", s.unknowns, s.equations, s.solution_dimension),
        ));
    }
    Ok(outcome("associator", None, report, vec![artifact("Phi", out.associator.to_text())]))
}

/// All rationals `p/q` with `|p|, q <= h`, in increasing order.
fn height_set(h: u32) -> Vec<Rational> {
    let mut v: Vec<Rational> = Vec::new();
    for q in 1..=h as i64 {
        for p in -(h as i64)..=h as i64 {
            v.push(Rational::new(p.into(), q.into()));
        }
    }
    v.sort();
    v.dedup();
    v
}

const SEARCH_LIMIT: usize = 200_000;

fn cybe(path: &Path, rmatrix: &Option<Vec<String>>, ansatz: &Option<Vec<String>>, height: u32) -> Res<Outcome> {
    let l = load(path)?;
    let mut report = Report::new();
    let mut artifacts = vec![];
    let find = |n: &str| l.ws.rmatrix(n).ok_or_else(|| InputFailure(format!("unknown rmatrix `{n}`")));
    let checked: Vec<(String, TwoTensor)> = match (rmatrix, ansatz) {
        (Some(ns), _) => ns.iter().map(|n| Ok((n.clone(), find(n)?.clone()))).collect::<Res<_>>()?,
        (None, Some(_)) => vec![],
        (None, None) => l.ws.rmatrices.clone(),
    };
    if checked.is_empty() && ansatz.is_none() {
        return fail("the workspace has no rmatrix section");
    }
    for (name, r) in &checked {
        let res = cybe_residual(r);
        report.push(Check::new("cybe", name, (!res.is_zero()).then(|| res.to_string())));
    }
    if let Some(family) = ansatz {
        let gens: Vec<(String, TwoTensor)> = family.iter().map(|n| Ok((n.clone(), find(n)?.clone()))).collect::<Res<_>>()?;
        let g = gens.first().ok_or_else(|| InputFailure("empty --ansatz".into()))?.1.algebra().clone();
        if gens.iter().any(|(_, t)| t.algebra() != &g) {
            return fail("--ansatz members must share one algebra");
        }
        let values = height_set(height);
        let total = values.len().checked_pow(gens.len() as u32).filter(|t| *t <= SEARCH_LIMIT);
        let Some(total) = total else {
            return fail(format!("search space exceeds {SEARCH_LIMIT} candidates; lower --height or shorten --ansatz"));
        };
        let mut found = String::new();
        let mut count = 0usize;
        for mut k in 0..total {
            let mut coeffs = Vec::with_capacity(gens.len());
            for _ in 0..gens.len() {
                coeffs.push(values[k % values.len()].clone());
                k /= values.len();
            }
            if coeffs.iter().all(Zero::is_zero) {
                continue;
            }
            let r = gens
                .iter()
                .zip(&coeffs)
                .fold(TwoTensor::zero(&g, TensorRole::RMatrix), |acc, ((_, t), c)| acc.plus(&t.scale(c)));
            if cybe_residual(&r).is_zero() {
                count += 1;
                let combo: Vec<String> =
                    gens.iter().zip(&coeffs).filter(|(_, c)| !c.is_zero()).map(|((n, _), c)| format!("{} {n}", fmt_rational(c))).collect();
                found.push_str(&format!("{} = {r}\n", combo.join(" + ")));
            }
        }
        let subject = format!("span of {} with height {height}", family.join(","));
        report.push(if count > 0 {
            Check::info("cybe-search", subject, format!("{count} solutions"))
        } else {
            Check::fail("cybe-search", subject, "no nonzero solution in the family")
        });
        artifacts.push(artifact("cybe-solutions", found));
    }
    Ok(outcome("cybe", Some(l.digest), report, artifacts))
}

fn matrix_text(m: &Matrix) -> String {
    m.to_dense().iter().map(|r| r.iter().map(fmt_rational).collect::<Vec<_>>().join(" ")).collect::<Vec<_>>().join(" / ")
}

fn correspondence(path: &Path, rmatrix: Option<&str>) -> Res<Outcome> {
    let l = load(path)?;
    let (name, r) = pick("rmatrix", rmatrix, &l.ws.rmatrices)?;
    if !r.is_antisymmetric() {
        return fail(format!("rmatrix `{name}` is not antisymmetric"));
    }
    let mut report = Report::new();
    let mut artifacts = vec![];
    let (row, pair) = as_check("drinfeld-pair", name, drinfeld_subalgebra(r))?;
    report.push(row);
    if let Some(pair) = pair {
        let g = r.algebra();
        let back = symplectic_to_r(g, &pair.basis, &pair.omega)?;
        let w = (back.coeffs() != r.coeffs()).then(|| format!("omega gives back {back}"));
        report.push(Check::new("roundtrip-r", name, w));
        let again = drinfeld_subalgebra(&back)?;
        let w = (again != pair).then(|| format!("h or omega changed: omega = {}", matrix_text(&again.omega)));
        report.push(Check::new("roundtrip-omega", name, w));
        let h: Vec<String> = pair.basis.iter().map(|v| g.format_vector(v)).collect();
        artifacts.push(artifact("h", format!("basis {}\nomega {}\n", h.join(" , "), matrix_text(&pair.omega))));
    }
    Ok(outcome("correspondence", Some(l.digest), report, artifacts))
}

/// Solves `J`; a falsified solve becomes a failed row and `None`.
fn twist(l: &Loaded, c: &Corpus, rmatrix: Option<&str>, report: &mut Report) -> Res<Option<(TwistSeries, Vec<RepresentationData>)>> {
    let (name, r) = pick("rmatrix", rmatrix, &l.ws.rmatrices)?;
    let t = r
        .symmetrization()
        .with_role(TensorRole::SymmetricInvariant)
        .map_err(|e| InputFailure(format!("r + r21 for `{name}` must be symmetric invariant: {e}")))?;
    let mods = corpus_modules(&l.ws, r.algebra(), &c.modules)?;
    let bound = twist_bound(&mods).max(2);
    let least = bound / 2;
    let n = c.degree.unwrap_or(least);
    if 2 * (n + 1) <= bound {
        return Err(unibraid::Error::DegreeTooSmall { have: n, need: least }.into());
    }
    let phi = associator(n.max(required_degree(&t, &mods, false)?))?;
    report.push(Check::info("weight-bound", mods_subject(&mods), format!("{bound}, hbar-degree {n}")));
    let (row, j) = as_check("twist-solve", name, solve_twist(r, &phi, n, bound))?;
    report.push(row);
    Ok(j.map(|j| (j, mods)))
}

/// `R = 1 + hbar r + O(hbar^2)`.
fn leading_terms(j: &TwistSeries, rm: &UTensor) -> Check {
    let b = j.basis();
    let n = j.degree();
    let r = j.source();
    let one = UTensor::one(b, 2, n);
    let lin = UTensor::from_two_tensor(b, r, 1, n);
    let w = if rm.hbar_part(0) != one {
        Some("constant term is not 1".to_string())
    } else if rm.hbar_part(1) != lin {
        Some(format!("hbar term is {}", rm.hbar_part(1).to_text().trim_end().replace('\n', "; ")))
    } else {
        None
    };
    Check::new("r-matrix-leading-terms", format!("{r}"), w).with_cutoff(n)
}

fn coconnected_row(h: &HopfData) -> Check {
    let f = coradical_filtration(h);
    let c0 = f.levels()[0].dim();
    let w = (c0 != 1).then(|| format!("C_0 has dimension {c0}"));
    Check::new("coconnected", h.name(), w)
}

fn coradical(
    path: Option<&Path>,
    example: Option<&str>,
    algebra: Option<&str>,
    function: bool,
    rmatrix: Option<&str>,
    degree: usize,
) -> Res<Outcome> {
    let loaded = path.map(load).transpose()?;
    let digest = loaded.as_ref().map(|l| l.digest.clone());
    let mut bracket = None;
    let h = match (example, &loaded) {
        (Some(e), _) => {
            if algebra.is_some() || rmatrix.is_some() || function {
                return fail("--example cannot be combined with --algebra, --function or --rmatrix");
            }
            match e {
                "trivial" => trivial_coalgebra(),
                "polynomial" => truncated_polynomial(degree),
                "two-group-like" => two_group_like(),
                _ => return fail(format!("unknown example `{e}`; expected trivial, polynomial or two-group-like")),
            }
        }
        (None, Some(l)) => match rmatrix {
            Some(_) => {
                let (_, r) = pick("rmatrix", rmatrix, &l.ws.rmatrices)?;
                if algebra.is_some_and(|a| a != r.algebra().name()) {
                    return fail("--rmatrix is over a different algebra than --algebra");
                }
                let (o, b) = lie_poisson_bracket(r.algebra(), r, degree)?;
                bracket = Some(b);
                o
            }
            None => {
                let u = enveloping_hopf(pick_algebra(&l.ws, algebra)?, degree)?;
                if function {
                    u.dual()?
                } else {
                    u
                }
            }
        },
        (None, None) => return fail("give a workspace or --example"),
    };
    let f = coradical_filtration(&h);
    let mut report = Report::new();
    report.push(coconnected_row(&h));
    let dims = f.dims().iter().map(ToString::to_string).collect::<Vec<_>>().join(" ");
    let w = (!f.routes_agree()).then(|| format!("radical powers give dimensions {dims}, the wedge recursion differs"));
    report.push(Check::new("coradical-routes-agree", h.name(), w));
    report.push(Check::info("coradical-dimensions", h.name(), dims));
    if let Some(b) = &bracket {
        report.extend(filtration_preservation_check(&h, b)?);
    }
    let mut text = String::new();
    for (n, level) in f.levels().iter().enumerate() {
        let vs: Vec<String> = level.basis().iter().map(|v| h.format_vector(v)).collect();
        text.push_str(&format!("C_{n} : {}\n", vs.join(" , ")));
    }
    Ok(outcome("coradical", digest, report, vec![artifact("coradical-filtration", text)]))
}
