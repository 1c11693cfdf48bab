use std::collections::BTreeMap;

use num_traits::Zero;

use super::HopfData;
use crate::error::{Error, Result};
use crate::kernel::{Rational, Rref, SparseRow, Subspace};
use crate::report::{Check, Report};

/// `C_0 ⊆ C_1 ⊆ ...`, ending at the whole coalgebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoradicalFiltration {
    levels: Vec<Subspace>,
    /// The iterated wedge `C_n = C_{n-1} ∧ C_0` reproduced every level.
    routes_agree: bool,
}

impl CoradicalFiltration {
    pub fn levels(&self) -> &[Subspace] {
        &self.levels
    }

    pub fn dims(&self) -> Vec<usize> {
        self.levels.iter().map(Subspace::dim).collect()
    }

    pub fn is_coconnected(&self) -> bool {
        self.levels[0].dim() == 1
    }

    pub fn routes_agree(&self) -> bool {
        self.routes_agree
    }

    /// Levels `C_n` with `n` beyond the last stored one equal the whole space.
    pub fn level(&self, n: usize) -> &Subspace {
        &self.levels[n.min(self.levels.len() - 1)]
    }

    /// Least `n` with `v` in `C_n`.
    pub fn degree_of(&self, v: &SparseRow) -> usize {
        self.levels.iter().position(|l| l.contains(v)).expect("top level is the whole space")
    }
}

/// Annihilator of `v` under the standard pairing.
fn perp(v: &Subspace) -> Vec<SparseRow> {
    Rref::from_rows(v.ambient(), v.basis().iter().cloned()).kernel_basis()
}

/// Structure constants of the dual algebra: `e^i e^j = sum_c Delta(e_c)_{ij} e^c`.
fn dual_table(c: &HopfData) -> BTreeMap<(usize, usize), SparseRow> {
    let mut t: BTreeMap<(usize, usize), SparseRow> = BTreeMap::new();
    for k in 0..c.dim() {
        for (key, v) in c.comult(k) {
            t.entry(*key).or_default().insert(k, v.clone());
        }
    }
    t
}

fn dual_mul(table: &BTreeMap<(usize, usize), SparseRow>, a: &SparseRow, b: &SparseRow) -> SparseRow {
    let mut out = SparseRow::new();
    for (i, x) in a {
        for (j, y) in b {
            if let Some(row) = table.get(&(*i, *j)) {
                for (k, v) in row {
                    let e = out.entry(*k).or_insert_with(Rational::zero);
                    *e += x * y * v;
                }
            }
        }
    }
    out.retain(|_, v| !v.is_zero());
    out
}

/// Radical of the dual algebra as the kernel of the trace form `Tr(L_a L_b)`, exact in characteristic 0.
fn dual_radical(n: usize, table: &BTreeMap<(usize, usize), SparseRow>) -> Subspace {
    // left[k][j] = e^k e^j
    let mut left: Vec<Vec<(usize, usize, Rational)>> = vec![Vec::new(); n];
    let mut lookup: Vec<BTreeMap<(usize, usize), Rational>> = vec![BTreeMap::new(); n];
    for ((k, j), row) in table {
        for (c, v) in row {
            left[*k].push((*c, *j, v.clone()));
            lookup[*k].insert((*c, *j), v.clone());
        }
    }
    let rows: Vec<SparseRow> = (0..n)
        .map(|k| {
            let mut row = SparseRow::new();
            for (l, lk) in lookup.iter().enumerate() {
                let tr: Rational = left[k].iter().filter_map(|(c, j, v)| lk.get(&(*j, *c)).map(|w| v * w)).sum();
                if !tr.is_zero() {
                    row.insert(l, tr);
                }
            }
            row
        })
        .collect();
    Subspace::span(n, Rref::from_rows(n, rows).kernel_basis())
}

/// `V ∧ W = Delta^{-1}(V (x) C + C (x) W)`.
fn wedge(c: &HopfData, v: &Subspace, w: &Subspace) -> Subspace {
    let n = c.dim();
    let (fv, fw) = (perp(v), perp(w));
    let mut rows = Vec::new();
    for f in &fv {
        for g in &fw {
            let row: SparseRow = (0..n)
                .filter_map(|x| {
                    let s: Rational = c
                        .comult(x)
                        .iter()
                        .filter_map(|((a, b), k)| Some(k * f.get(a)? * g.get(b)?))
                        .sum();
                    (!s.is_zero()).then_some((x, s))
                })
                .collect();
            if !row.is_empty() {
                rows.push(row);
            }
        }
    }
    Subspace::span(n, Rref::from_rows(n, rows).kernel_basis())
}

/// `C_n = (J^{n+1})^perp` with `J` the radical of the dual algebra, cross-checked by the wedge recursion.
pub fn coradical_filtration(c: &HopfData) -> CoradicalFiltration {
    let n = c.dim();
    let table = dual_table(c);
    let rad = dual_radical(n, &table);
    let mut levels = Vec::new();
    let mut power = rad.clone();
    loop {
        levels.push(Subspace::span(n, perp(&power)));
        if power.dim() == 0 {
            break;
        }
        let mut gens = Vec::new();
        for a in power.basis() {
            for b in rad.basis() {
                gens.push(dual_mul(&table, a, b));
            }
        }
        let next = Subspace::span(n, gens);
        if next == power {
            // A non-nilpotent radical cannot occur; stop rather than loop.
            break;
        }
        power = next;
    }
    let mut routes_agree = true;
    let c0 = levels[0].clone();
    let mut prev = c0.clone();
    for level in levels.iter().skip(1) {
        let w = wedge(c, &prev, &c0);
        if &w != level {
            routes_agree = false;
            break;
        }
        prev = w;
    }
    if routes_agree && levels.last().map(Subspace::dim) != Some(n) {
        routes_agree = false;
    }
    CoradicalFiltration { levels, routes_agree }
}

/// Bilinear bracket on a commutative algebra, `{e_i, e_j}` for each basis pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PoissonBracket {
    dim: usize,
    images: BTreeMap<(usize, usize), SparseRow>,
}

impl PoissonBracket {
    pub fn zero(dim: usize) -> Self {
        PoissonBracket { dim, images: BTreeMap::new() }
    }

    pub fn from_fn(dim: usize, f: impl Fn(usize, usize) -> SparseRow) -> Self {
        let mut images = BTreeMap::new();
        for i in 0..dim {
            for j in 0..dim {
                let mut v = f(i, j);
                v.retain(|_, c| !c.is_zero());
                if !v.is_empty() {
                    images.insert((i, j), v);
                }
            }
        }
        PoissonBracket { dim, images }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn on_basis(&self, i: usize, j: usize) -> SparseRow {
        self.images.get(&(i, j)).cloned().unwrap_or_default()
    }

    /// Overwrites `{e_i, e_j}` and `{e_j, e_i}`, keeping antisymmetry.
    pub fn set(&mut self, i: usize, j: usize, v: SparseRow) {
        let neg: SparseRow = v.iter().map(|(k, c)| (*k, -c.clone())).collect();
        self.images.insert((i, j), v);
        self.images.insert((j, i), neg);
    }

    pub fn apply(&self, a: &SparseRow, b: &SparseRow) -> SparseRow {
        let mut out = SparseRow::new();
        for (i, x) in a {
            for (j, y) in b {
                if let Some(row) = self.images.get(&(*i, *j)) {
                    for (k, v) in row {
                        let e = out.entry(*k).or_insert_with(Rational::zero);
                        *e += x * y * v;
                    }
                }
            }
        }
        out.retain(|_, v| !v.is_zero());
        out
    }
}

/// Products keep the coradical degree additive and the bracket lowers it by one.
pub fn filtration_preservation_check(a: &HopfData, bracket: &PoissonBracket) -> Result<Report> {
    if bracket.dim() != a.dim() {
        return Err(Error::Shape(format!("bracket on {} basis elements for an algebra of dimension {}", bracket.dim(), a.dim())));
    }
    let commutative = a.commutativity_check()?;
    let filt = coradical_filtration(a);
    let top = filt.levels().len();
    let cutoff = a.cutoff();
    let mut report = Report::new();
    report.push(commutative);

    let mut product_witness = None;
    let mut bracket_witness = None;
    for i in 0..top {
        for j in i..top {
            if cutoff.is_some_and(|d| i + j > d) {
                continue;
            }
            for u in filt.level(i).basis() {
                for v in filt.level(j).basis() {
                    if !fits_vectors(a, u, v) {
                        continue;
                    }
                    if product_witness.is_none() {
                        let p = a.mul_vec(u, v)?;
                        if !filt.level(i + j).contains(&p) {
                            product_witness = Some(format!(
                                "({}) ({}) has coradical degree {} > {}",
                                a.format_vector(u),
                                a.format_vector(v),
                                filt.degree_of(&p),
                                i + j
                            ));
                        }
                    }
                    if bracket_witness.is_none() {
                        let b = bracket.apply(u, v);
                        let ok = if i + j == 0 { b.is_empty() } else { filt.level(i + j - 1).contains(&b) };
                        if !ok {
                            bracket_witness = Some(format!(
                                "{{{}, {}}} = {} has coradical degree {}, expected at most {}",
                                a.format_vector(u),
                                a.format_vector(v),
                                a.format_vector(&b),
                                filt.degree_of(&b),
                                (i + j) as i64 - 1
                            ));
                        }
                    }
                }
            }
        }
    }
    let with_cut = |c: Check| match cutoff {
        Some(d) => c.with_cutoff(d),
        None => c,
    };
    report.push(with_cut(Check::new("product-filtration", a.name(), product_witness)));
    report.push(with_cut(Check::new("bracket-filtration", a.name(), bracket_witness)));
    Ok(report)
}

/// Every pair of support elements fits the cutoff.
fn fits_vectors(a: &HopfData, u: &SparseRow, v: &SparseRow) -> bool {
    u.keys().all(|i| v.keys().all(|j| a.fits(&[*i, *j])))
}
