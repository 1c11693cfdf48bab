//! Acceptance suite: one line per criterion, every check exact (zero tolerance).
//!
//! Runs without the libtest harness so the summary lines are always printed.

use std::sync::Arc;
use std::time::Instant;

use unibraid::associator::{residuals, solve_associator_with, SolverOptions, TruncatedAssociator};
use unibraid::category::{associativity, connecting_twist, gauge_coherence_check, BraidedStructure};
use unibraid::freealg::{Alphabet, FreeSeries};
use unibraid::hopf::{
    coradical_filtration, enveloping_hopf, filtration_preservation_check, lie_poisson_bracket, twisted_function_algebra,
    two_group_like,
};
use unibraid::kernel::{q, Matrix, Rational, SparseRow};
use unibraid::liealg::{catalog, invariant_symmetric_tensors, placements, LieAlgebraData, RepresentationData, TensorRole, TwoTensor};
use unibraid::pbw::{evaluate_series, PbwBasis, UTensor};
use unibraid::report::Report;
use unibraid::twist::{
    cybe_residual, drinfeld_subalgebra, fiber_functor_check, r_matrix, recover_r, solve_twist, symplectic_to_r, twist_bound,
    verify_qybe,
};

type Outcome = Result<String, String>;

/// Reports produced along the way, for the determinism criterion.
type Sink = Vec<(String, Report)>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn passing(sink: &mut Sink, label: String, r: Report) -> Result<(), String> {
    let ok = r.all_pass();
    let text = r.to_string();
    sink.push((label.clone(), r));
    ensure(ok, || format!("{label}: {text}"))
}

fn phi(n: usize) -> FreeSeries {
    solve_associator_with(n, &SolverOptions::default()).unwrap().associator.into_series()
}

fn coherence_structure(t: &TwoTensor, mods: Vec<RepresentationData>) -> BraidedStructure {
    let probe = BraidedStructure::new(t, &TruncatedAssociator::trivial(64), mods.clone()).unwrap();
    let n = probe.coherence_degree().unwrap().max(1);
    BraidedStructure::new(t, &phi(n), mods).unwrap()
}

const GOLDEN: [&str; 3] = [
    include_str!("../golden/associator_1.txt"),
    include_str!("../golden/associator_2.txt"),
    include_str!("../golden/associator_3.txt"),
];

fn criterion_1(sink: &mut Sink) -> Outcome {
    let al: Arc<Alphabet> = Alphabet::ab();
    let anchor = FreeSeries::parse(&al, 2, "1/24 : a b\n-1/24 : b a\n").map_err(|e| e.to_string())?;
    let mut n4_time = 0.0;
    for n in 1..=4 {
        let start = Instant::now();
        let out = solve_associator_with(n, &SolverOptions::default()).map_err(|e| e.to_string())?;
        let elapsed = start.elapsed().as_secs_f64();
        if n == 4 {
            n4_time = elapsed;
        }
        let series = out.associator.series();
        let r = residuals(series).map_err(|e| e.to_string())?;
        ensure(r.all_zero(), || format!("N={n}: residuals {} / {} / {}", r.hexagon1, r.hexagon2, r.pentagon))?;
        if n >= 2 {
            let d2 = series.homogeneous(2).with_degree(2);
            ensure(d2 == anchor, || format!("N={n}: degree-2 part is {}", d2.to_text()))?;
        }
        for d in 1..=n {
            ensure(out.log.homogeneous(d).is_lie(), || format!("N={n}: log is not Lie in degree {d}"))?;
        }
        if n <= 3 {
            ensure(out.associator.to_text() == GOLDEN[n - 1], || format!("N={n}: differs from golden file"))?;
        }
        // Matrix-level pentagon and hexagons on a corpus with non-commuting placements,
        // a route independent of the free-algebra residuals.
        if n >= 3 {
            let s = BraidedStructure::new(&catalog::f5_casimir(), series, catalog::f5_corpus()).map_err(|e| e.to_string())?;
            passing(sink, format!("f5 coherence N={n}"), s.verify_coherence().map_err(|e| e.to_string())?)?;
        }
    }
    ensure(n4_time < 30.0, || format!("N=4 took {n4_time:.2} s"))?;
    Ok(format!("N=1..4 residuals zero, 1/24 anchor, Lie log, goldens N<=3, f5 matrix route N=3,4; N=4 solve {n4_time:.3} s"))
}

/// Every product of exactly `len` factors from `ps`, right-multiplied onto `prefix`, vanishes.
fn all_products_vanish(prefix: &Matrix, ps: &[Matrix], len: usize, count: &mut usize) -> bool {
    if prefix.is_zero() {
        *count += ps.len().pow(len as u32);
        return true;
    }
    if len == 0 {
        *count += 1;
        return false;
    }
    ps.iter().all(|p| all_products_vanish(&(prefix * p), ps, len - 1, count))
}

fn criterion_2(_: &mut Sink) -> Outcome {
    let t = catalog::h3_zz();
    let mods = catalog::h3_corpus();
    ensure(mods.iter().all(|m| m.length() <= 3), || "h3 corpus has a module of length > 3".into())?;
    let mut products = 0usize;
    for x in &mods {
        for y in &mods {
            for z in &mods {
                let len = x.length() + y.length() + z.length() - 2;
                let ps = placements(&[x, y, z], &t);
                let id = Matrix::identity(x.dim() * y.dim() * z.dim());
                ensure(all_products_vanish(&id, &ps, len, &mut products), || {
                    format!("a product of {len} placements is nonzero on {} {} {}", x.name(), y.name(), z.name())
                })?;
            }
        }
    }
    // Stability in the truncation degree: N = 1 already suffices on h3.
    let series: Vec<FreeSeries> = (1..=4).map(phi).collect();
    let mut compared = 0;
    for x in &mods {
        for y in &mods {
            for z in &mods {
                let ms: Vec<Matrix> =
                    series.iter().map(|p| associativity(x, y, z, &t, p).map_err(|e| e.to_string())).collect::<Result<_, _>>()?;
                for n in 0..3 {
                    ensure(ms[n] == ms[n + 1], || format!("alpha at N={} and N={} differ on {} {} {}", n + 1, n + 2, x.name(), y.name(), z.name()))?;
                    compared += 1;
                }
            }
        }
    }
    // The same stability where placements do not commute.
    let f5 = catalog::f5_corpus();
    let tf = catalog::f5_casimir();
    for x in &f5 {
        for y in &f5 {
            for z in &f5 {
                let need = unibraid::liealg::termination_bound_check(&[x, y, z], &tf).map_err(|e| e.to_string())?.required_degree();
                let n = need.max(1);
                let a = associativity(x, y, z, &tf, &series[n - 1]).map_err(|e| e.to_string())?;
                let b = associativity(x, y, z, &tf, &series[n]).map_err(|e| e.to_string())?;
                ensure(a == b, || format!("f5: alpha at N={n} and N={} differ", n + 1))?;
                compared += 1;
            }
        }
    }
    Ok(format!("{products} placement products of length l_X+l_Y+l_Z-2 vanish on 64 h3 triples; {compared} N vs N+1 comparisons identical"))
}

fn criterion_3(sink: &mut Sink) -> Outcome {
    let cases: Vec<(Arc<LieAlgebraData>, Vec<RepresentationData>)> = vec![
        (catalog::abelian(1), catalog::abelian_corpus(1)),
        (catalog::abelian(2), catalog::abelian_corpus(2)),
        (catalog::heisenberg(), catalog::h3_corpus()),
    ];
    let mut count = 0;
    for (g, mods) in cases {
        for t in invariant_symmetric_tensors(&g) {
            ensure(mods.iter().all(|m| m.dim() <= 3), || "module of dimension > 3".into())?;
            let s = coherence_structure(&t, mods.clone());
            passing(sink, format!("coherence {} t = {t}", g.name()), s.verify_coherence().map_err(|e| e.to_string())?)?;
            count += 1;
        }
    }
    Ok(format!("pentagon, hexagons, naturality, beta^2 = exp(t) on {count} (g, t) cases"))
}

fn criterion_4(sink: &mut Sink) -> Outcome {
    let cases = vec![
        (catalog::h3_zz(), catalog::h3_corpus()),
        (catalog::f5_casimir(), catalog::f5_corpus()),
        (invariant_symmetric_tensors(&catalog::abelian(2)).remove(0), catalog::abelian_corpus(2)),
    ];
    for (t, mods) in cases {
        let s = coherence_structure(&t, mods);
        let zero = s.rescale(&Rational::from_integer(0.into())).map_err(|e| e.to_string())?;
        let mut r = Report::new();
        r.push(zero.symmetry_check().map_err(|e| e.to_string())?);
        r.extend(s.recover_t().map_err(|e| e.to_string())?);
        r.push(s.rescale_formula_check(&q(3, 2)).map_err(|e| e.to_string())?);
        passing(sink, format!("rescale/recover {t}"), r)?;
    }
    Ok("C(0) symmetric, log(beta^2) = t on pairs, t_{12,3} = t13 + t23 on triples (h3, f5, abelian 2)".into())
}

fn criterion_5(sink: &mut Sink) -> Outcome {
    let phi1 = phi(3);
    let mut opts = SolverOptions::default();
    opts.free_values.insert((3, 0), q(1, 1));
    let phi2 = solve_associator_with(3, &opts).map_err(|e| e.to_string())?.associator.into_series();
    ensure(phi1 != phi2, || "the two degree-3 solutions coincide".into())?;
    let mut notes = Vec::new();
    for (label, t, mods) in [("h3", catalog::h3_zz(), catalog::h3_corpus()), ("f5", catalog::f5_casimir(), catalog::f5_corpus())] {
        let s = BraidedStructure::new(&t, &phi1, mods.clone()).map_err(|e| e.to_string())?;
        let target = BraidedStructure::new(&t, &phi2, mods).map_err(|e| e.to_string())?;
        let c = connecting_twist(&s, &phi2).map_err(|e| e.to_string())?;
        passing(sink, format!("connecting twist {label}"), c.report().clone())?;
        // Re-check the returned T directly against both structures.
        passing(sink, format!("gauge coherence {label}"), gauge_coherence_check(&s, &target, c.element()).map_err(|e| e.to_string())?)?;
        notes.push(format!("{label}: T {}", if c.is_trivial() { "= 1" } else { "nontrivial" }));
    }
    Ok(format!("symmetric invariant T in U(g)^(x)2 solved linearly; identity functor with T coherent ({})", notes.join(", ")))
}

fn criterion_6(_: &mut Sink) -> Outcome {
    let a1 = catalog::abelian(1);
    let a2 = catalog::abelian(2);
    let h3 = catalog::heisenberg();
    let h3w = catalog::heisenberg_plus_line();
    let rm = |g: &Arc<LieAlgebraData>, terms: &[(Rational, usize, usize)]| TwoTensor::from_terms(g, terms, TensorRole::RMatrix).unwrap();
    let zero_cases = vec![
        ("a1 x*x", rm(&a1, &[(q(5, 3), 0, 0)])),
        ("a2 x*y", rm(&a2, &[(q(1, 1), 0, 1)])),
        ("a2 dense", rm(&a2, &[(q(1, 1), 0, 0), (q(2, 1), 0, 1), (q(-3, 1), 1, 0), (q(1, 7), 1, 1)])),
        ("h3 z*z", rm(&h3, &[(q(1, 1), 2, 2)])),
        ("h3 x^z", TwoTensor::wedge(&h3, 0, 2)),
        ("h3w x^w", TwoTensor::wedge(&h3w, 0, 3)),
    ];
    for (label, r) in &zero_cases {
        let res = cybe_residual(r);
        ensure(res.is_zero(), || format!("{label}: residual {res}"))?;
    }
    let bad = cybe_residual(&rm(&h3, &[(q(1, 1), 0, 1)]));
    ensure(bad.to_text() == "-1 : x z y\n", || format!("h3 x*y: residual {bad}"))?;

    let antisym = [TwoTensor::wedge(&a2, 0, 1), TwoTensor::wedge(&h3, 0, 2), TwoTensor::wedge(&h3w, 0, 3), TwoTensor::wedge(&h3w, 0, 3).scale(&q(-2, 5))];
    for r in &antisym {
        let pair = drinfeld_subalgebra(r).map_err(|e| e.to_string())?;
        let back = symplectic_to_r(r.algebra(), &pair.basis, &pair.omega).map_err(|e| e.to_string())?;
        ensure(back.coeffs() == r.coeffs(), || format!("r -> (h, omega) -> r changed {r} into {back}"))?;
        let again = drinfeld_subalgebra(&back).map_err(|e| e.to_string())?;
        ensure(again == pair, || format!("(h, omega) -> r -> (h, omega) changed the pair for {r}"))?;
    }
    // Starting from a form: h = span(x, w) in h3w with omega(x, w) = 3.
    let omega = Matrix::from_rows(vec![vec![q(0, 1), q(3, 1)], vec![q(-3, 1), q(0, 1)]]).unwrap();
    let basis = vec![h3w.basis_vector(0), h3w.basis_vector(3)];
    let r = symplectic_to_r(&h3w, &basis, &omega).map_err(|e| e.to_string())?;
    let pair = drinfeld_subalgebra(&r).map_err(|e| e.to_string())?;
    ensure(pair.basis == basis && pair.omega == omega, || "form -> r -> form is not the identity".into())?;
    Ok(format!("{} vanishing residuals, witness -1 : x z y, {} Drinfeld roundtrips both ways", zero_cases.len(), antisym.len() + 1))
}

/// `J23 J_{1,23} Phi(hbar t12, hbar t23) = J12 J_{12,3}`, rearranged through inverses:
/// `Phi = J_{1,23}^{-1} J23^{-1} J12 J_{12,3}`.
fn twist_residual_oracle(j: &UTensor, t: &TwoTensor, phi: &FreeSeries, basis: &Arc<PbwBasis>) -> Result<UTensor, String> {
    let n = j.hbar_degree();
    let th = UTensor::from_two_tensor(basis, t, 1, n);
    let phi_u = evaluate_series(phi, &[th.embed(3, &[0, 1]), th.embed(3, &[1, 2])]).map_err(|e| e.to_string())?;
    let inv = |u: &UTensor| u.inverse().map_err(|e| e.to_string());
    let rebuilt = inv(&j.coproduct_at(1))?.mul(&inv(&j.embed(3, &[1, 2]))?).mul(&j.embed(3, &[0, 1])).mul(&j.coproduct_at(0));
    Ok(&rebuilt - &phi_u)
}

fn criterion_7(sink: &mut Sink) -> Outcome {
    let cases = vec![
        ("h3w x^w", TwoTensor::wedge(&catalog::heisenberg_plus_line(), 0, 3), catalog::h3w_corpus()),
        ("h3 x^z", TwoTensor::wedge(&catalog::heisenberg(), 0, 2), catalog::h3_corpus()),
        ("h3 z*z", catalog::h3_zz().with_role(TensorRole::RMatrix).unwrap(), catalog::h3_corpus()),
        (
            "a2 x*y",
            TwoTensor::from_terms(&catalog::abelian(2), &[(q(1, 1), 0, 1)], TensorRole::RMatrix).unwrap(),
            catalog::abelian_corpus(2),
        ),
    ];
    let n = 3;
    for (label, r, mods) in cases {
        let bound = twist_bound(&mods);
        let sym = r.symmetrization().with_role(TensorRole::SymmetricInvariant).map_err(|e| e.to_string())?;
        let probe = BraidedStructure::new(&sym, &TruncatedAssociator::trivial(64), mods.clone()).map_err(|e| e.to_string())?;
        let p = phi(n.max(probe.required_degree().map_err(|e| e.to_string())?));
        let j = solve_twist(&r, &p, n, bound).map_err(|e| format!("{label}: {e}"))?;
        let res = twist_residual_oracle(j.element(), j.symmetric_part(), &p.with_degree(n), j.basis())?;
        ensure(res.is_zero(), || format!("{label}: twist residual {}", res.to_text()))?;

        let rm = r_matrix(&j, j.symmetric_part()).map_err(|e| e.to_string())?;
        let b = j.basis();
        ensure(rm.element().hbar_part(0) == UTensor::one(b, 2, n), || format!("{label}: R has constant term != 1"))?;
        ensure(rm.element().hbar_part(1) == UTensor::from_two_tensor(b, &r, 1, n), || format!("{label}: R = 1 + r + ... fails"))?;
        passing(sink, format!("qybe {label}"), verify_qybe(&rm, &mods).map_err(|e| e.to_string())?)?;
        let back = recover_r(&rm, &p).map_err(|e| e.to_string())?;
        ensure(back.coeffs() == r.coeffs(), || format!("{label}: recover_r gives {back}"))?;
        passing(sink, format!("fiber functor {label}"), fiber_functor_check(&j, &mods).map_err(|e| e.to_string())?)?;
        // 1 (x) x at hbar^1: not a cocycle, so the mutated twist must be rejected.
        let x = b.generator(0).ok_or("no generator")?;
        let bad = fiber_functor_check(&j.perturbed(&[1, 0, x], &q(1, 3)), &mods).map_err(|e| e.to_string())?;
        ensure(!bad.all_pass(), || format!("{label}: mutated twist passes the fiber functor check"))?;
        sink.push((format!("mutated {label}"), bad));
    }
    Ok("twist residual zero to hbar^3 (inverse-form oracle), R = 1 + r + ..., QYBE, recover_r = id, fiber functor passes and rejects mutation; 4 cases".into())
}

fn criterion_8(sink: &mut Sink) -> Outcome {
    let c2 = coradical_filtration(&two_group_like());
    ensure(!c2.is_coconnected(), || "two-group-like coalgebra reported coconnected".into())?;
    let h3 = catalog::heisenberg();
    let u = enveloping_hopf(&h3, 4).map_err(|e| e.to_string())?;
    let fu = coradical_filtration(&u);
    let unit: SparseRow = u.unit().cloned().ok_or("U has no unit")?;
    ensure(fu.is_coconnected() && fu.levels()[0].contains(&unit), || "U(h3) is not coconnected with C0 = Q".into())?;
    ensure(fu.routes_agree(), || "U(h3): coradical routes disagree".into())?;

    let examples = vec![
        ("h3 x^z", TwoTensor::wedge(&h3, 0, 2)),
        ("h3w x^w", TwoTensor::wedge(&catalog::heisenberg_plus_line(), 0, 3)),
        ("a2 x*y", TwoTensor::from_terms(&catalog::abelian(2), &[(q(1, 1), 0, 1)], TensorRole::RMatrix).unwrap()),
    ];
    for (label, r) in &examples {
        let (o, bracket) = lie_poisson_bracket(r.algebra(), r, 4).map_err(|e| e.to_string())?;
        passing(sink, format!("filtration {label}"), filtration_preservation_check(&o, &bracket).map_err(|e| e.to_string())?)?;
    }
    // Planted violation: {[x], [y]} = [x^2] keeps degree 2 instead of dropping to 1.
    let (o, mut bracket) = lie_poisson_bracket(&h3, &examples[0].1, 4).map_err(|e| e.to_string())?;
    let (x, y, xx) = (o.index_of("[x]").unwrap(), o.index_of("[y]").unwrap(), o.index_of("[x^2]").unwrap());
    bracket.set(x, y, SparseRow::from([(xx, q(1, 1))]));
    let rep = filtration_preservation_check(&o, &bracket).map_err(|e| e.to_string())?;
    let failed: Vec<&str> = rep.failures().map(|c| c.check.as_str()).collect();
    ensure(failed == ["bracket-filtration"], || format!("planted violation gives failures {failed:?}"))?;

    let g = catalog::heisenberg_plus_line();
    let tfa = twisted_function_algebra(&g, &TwoTensor::wedge(&g, 0, 3), 4).map_err(|e| e.to_string())?;
    passing(sink, "twisted O(G) h3w".into(), tfa.report().clone())?;
    ensure(tfa.report().checks.iter().any(|c| c.check == "coconnected" && c.pass), || "no coconnected row".into())?;
    let (i, j, c) = tfa.degree_two_defect().ok_or("no degree-2 commutator defect")?;
    let h = tfa.hopf();
    ensure(!c.is_empty(), || "zero defect".into())?;
    let defect = format!("{} {} - {} {} = {}", h.basis_names()[i], h.basis_names()[j], h.basis_names()[j], h.basis_names()[i], h.format_vector(&c));

    let unchanged = vec![
        ("abelian", catalog::abelian(2), TwoTensor::from_terms(&catalog::abelian(2), &[(q(1, 1), 0, 1)], TensorRole::RMatrix).unwrap()),
        ("central", h3.clone(), TwoTensor::wedge(&h3, 0, 2)),
    ];
    for (label, g, r) in unchanged {
        let t = twisted_function_algebra(&g, &r, 4).map_err(|e| e.to_string())?;
        passing(sink, format!("twisted O(G) {label}"), t.report().clone())?;
        ensure(!t.product_changed(), || format!("{label}: product changed"))?;
    }
    Ok(format!("C2 not coconnected, U(h3) coconnected with C0 = Q; filtration check passes on 3 brackets and catches the planted one; twisted O(h3w) certified to degree 4 with {defect}; abelian and central products unchanged"))
}

type Criterion = (usize, &'static str, fn(&mut Sink) -> Outcome);

const CRITERIA: [Criterion; 8] = [
    (1, "associator existence and normalization", criterion_1),
    (2, "termination bound and truncation stability", criterion_2),
    (3, "category coherence", criterion_3),
    (4, "rescaling and recovery", criterion_4),
    (5, "gauge independence", criterion_5),
    (6, "classical Yang-Baxter suite", criterion_6),
    (7, "twist and R-matrix suite", criterion_7),
    (8, "Hopf suite", criterion_8),
];

fn run_all(print: bool) -> (Sink, bool) {
    let mut sink = Sink::new();
    let mut ok = true;
    for (k, name, f) in CRITERIA {
        let start = Instant::now();
        let r = f(&mut sink);
        let secs = start.elapsed().as_secs_f64();
        ok &= r.is_ok();
        if print {
            match r {
                Ok(detail) => println!("criterion {k} PASS {name}: {detail} [tolerance exact, {secs:.2} s]"),
                Err(why) => println!("criterion {k} FAIL {name}: {why} [tolerance exact, {secs:.2} s]"),
            }
        }
    }
    (sink, ok)
}

fn machine(sink: &Sink) -> String {
    let docs: Vec<serde_json::Value> =
        sink.iter().map(|(label, r)| serde_json::json!({ "suite": label, "checks": r.checks })).collect();
    serde_json::to_string_pretty(&docs).expect("serializes")
}

fn main() {
    let (sink, mut ok) = run_all(true);
    let start = Instant::now();
    let first = machine(&sink);
    let mut identical = true;
    for threads in [1, 4] {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().expect("pool");
        let again = pool.install(|| machine(&run_all(false).0));
        identical &= again == first;
    }
    let secs = start.elapsed().as_secs_f64();
    if identical {
        println!("criterion 9 PASS determinism: {} machine reports byte-identical across reruns on 1 and 4 threads [{secs:.2} s]", sink.len());
    } else {
        println!("criterion 9 FAIL determinism: machine reports differ between runs [{secs:.2} s]");
        ok = false;
    }
    if !ok {
        std::process::exit(1);
    }
}
