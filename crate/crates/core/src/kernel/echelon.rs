//! Sparse exact Gaussian elimination.
//!
//! Rows are inserted one at a time and kept in echelon form with the pivot at
//! the smallest nonzero column. [`Echelon::into_rref`] back-substitutes to the
//! reduced row echelon form, which depends only on the row space and the column
//! order, never on insertion order.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use super::Rational;

pub type SparseRow = BTreeMap<usize, Rational>;

#[derive(Clone, Debug, Default)]
pub struct Echelon {
    ncols: usize,
    rows: Vec<SparseRow>,
    pivot_row: BTreeMap<usize, usize>,
}

fn axpy(target: &mut SparseRow, factor: &Rational, source: &SparseRow) {
    for (c, v) in source {
        let e = target.entry(*c).or_insert_with(Rational::zero);
        *e -= factor * v;
        if e.is_zero() {
            target.remove(c);
        }
    }
}

impl Echelon {
    pub fn new(ncols: usize) -> Self {
        Echelon { ncols, rows: Vec::new(), pivot_row: BTreeMap::new() }
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `row` against the current pivots without inserting it.
    pub fn reduce(&self, mut row: SparseRow) -> SparseRow {
        let mut cursor = 0usize;
        loop {
            let next = row
                .range(cursor..)
                .map(|(c, _)| *c)
                .find(|c| self.pivot_row.contains_key(c));
            let Some(c) = next else { break };
            let factor = row[&c].clone();
            let src = &self.rows[self.pivot_row[&c]];
            axpy(&mut row, &factor, src);
            cursor = c + 1;
        }
        row
    }

    /// Inserts a row; returns the new pivot column if the rank grew.
    pub fn insert(&mut self, row: SparseRow) -> Option<usize> {
        debug_assert!(row.keys().all(|c| *c < self.ncols));
        let mut row = self.reduce(row);
        let (&pc, lead) = row.iter().next()?;
        if !lead.is_one() {
            let inv = lead.recip();
            for v in row.values_mut() {
                *v *= &inv;
            }
        }
        self.pivot_row.insert(pc, self.rows.len());
        self.rows.push(row);
        Some(pc)
    }

    pub fn into_rref(mut self) -> Rref {
        let pivots: Vec<usize> = self.pivot_row.keys().rev().copied().collect();
        for &p in &pivots {
            let idx = self.pivot_row[&p];
            let mut row = std::mem::take(&mut self.rows[idx]);
            let others: Vec<usize> = row
                .keys()
                .filter(|c| **c != p && self.pivot_row.contains_key(c))
                .copied()
                .collect();
            for c in others {
                let factor = row.get(&c).cloned().unwrap_or_else(Rational::zero);
                if factor.is_zero() {
                    continue;
                }
                let src = &self.rows[self.pivot_row[&c]];
                axpy(&mut row, &factor, src);
            }
            self.rows[idx] = row;
        }
        let mut rows = Vec::with_capacity(self.rows.len());
        let mut pivot_index = BTreeMap::new();
        for (p, idx) in &self.pivot_row {
            pivot_index.insert(*p, rows.len());
            rows.push(std::mem::take(&mut self.rows[*idx]));
        }
        Rref { ncols: self.ncols, rows, pivot_index }
    }
}

/// Reduced row echelon form; rows sorted by pivot column.
#[derive(Clone, Debug)]
pub struct Rref {
    ncols: usize,
    rows: Vec<SparseRow>,
    pivot_index: BTreeMap<usize, usize>,
}

impl Rref {
    pub fn from_rows(ncols: usize, rows: impl IntoIterator<Item = SparseRow>) -> Self {
        let mut e = Echelon::new(ncols);
        for r in rows {
            e.insert(r);
        }
        e.into_rref()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[SparseRow] {
        &self.rows
    }

    pub fn pivots(&self) -> impl Iterator<Item = usize> + '_ {
        self.pivot_index.keys().copied()
    }

    pub fn is_pivot(&self, c: usize) -> bool {
        self.pivot_index.contains_key(&c)
    }

    pub fn row_of_pivot(&self, c: usize) -> Option<&SparseRow> {
        self.pivot_index.get(&c).map(|i| &self.rows[*i])
    }

    pub fn free_columns(&self) -> Vec<usize> {
        (0..self.ncols).filter(|c| !self.is_pivot(*c)).collect()
    }

    /// Fully reduces a vector modulo the row space: the result has no pivot columns.
    pub fn reduce(&self, mut v: SparseRow) -> SparseRow {
        let hits: Vec<usize> = v.keys().filter(|c| self.is_pivot(**c)).copied().collect();
        for c in hits {
            let factor = match v.get(&c) {
                Some(f) => f.clone(),
                None => continue,
            };
            axpy(&mut v, &factor, &self.rows[self.pivot_index[&c]]);
        }
        v
    }

    /// Basis of the kernel, one vector per free column in ascending order.
    pub fn kernel_basis(&self) -> Vec<SparseRow> {
        let free = self.free_columns();
        let mut out = Vec::with_capacity(free.len());
        for f in free {
            let mut v = SparseRow::new();
            v.insert(f, Rational::one());
            for (p, idx) in &self.pivot_index {
                if let Some(a) = self.rows[*idx].get(&f) {
                    v.insert(*p, -a.clone());
                }
            }
            out.push(v);
        }
        out
    }
}

/// Solves `A x = b` given as sparse equation rows `(coefficients, rhs)` over
/// `nvars` unknowns. Returns the particular solution with all free variables
/// zero, together with a kernel basis, or `None` if infeasible.
pub fn solve_system(
    nvars: usize,
    equations: impl IntoIterator<Item = (SparseRow, Rational)>,
) -> Option<(Vec<Rational>, Vec<SparseRow>)> {
    let mut e = Echelon::new(nvars + 1);
    for (mut row, rhs) in equations {
        if !rhs.is_zero() {
            row.insert(nvars, rhs);
        }
        if row.is_empty() {
            continue;
        }
        e.insert(row);
    }
    let rref = e.into_rref();
    if rref.is_pivot(nvars) {
        return None;
    }
    let mut x = vec![Rational::zero(); nvars];
    for (p, idx) in &rref.pivot_index {
        if let Some(v) = rref.rows[*idx].get(&nvars) {
            x[*p] = v.clone();
        }
    }
    let kernel = rref
        .kernel_basis()
        .into_iter()
        .filter(|v| !v.contains_key(&nvars))
        .collect::<Vec<_>>();
    // The rhs column is itself free when feasible; its kernel vector is dropped.
    Some((x, kernel))
}
