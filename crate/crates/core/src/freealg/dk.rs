//! The Drinfeld–Kohno algebra on `n` strands, truncated at degree `N`.
//!
//! Letters are `t_ij` for `i < j`, in lexicographic order of `(i, j)`. The
//! degree-`d` part of the relation ideal is `W_1 I_{d-1} + R W_{d-2}`, where
//! `R` spans the quadratic relations. Its reduced echelon form over the words
//! of degree `d` fixes the basis: the non-pivot words, in canonical order.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use num_traits::Zero;

use super::{Alphabet, FreeSeries, Word};
use crate::error::{Error, Result};
use crate::kernel::{int, Echelon, Rational, Rref, SparseRow};

pub fn dk_letter_name(i: usize, j: usize) -> String {
    let (i, j) = if i < j { (i, j) } else { (j, i) };
    format!("t{i}{j}")
}

#[derive(Debug)]
pub struct DkAlgebra {
    n: usize,
    degree: usize,
    alphabet: Arc<Alphabet>,
    /// Reduced ideal per degree, over the base-`m` word index.
    ideals: Vec<Rref>,
    /// Non-pivot words per degree.
    bases: Vec<Vec<Word>>,
}

type CacheKey = (usize, usize);

fn cache() -> &'static Mutex<HashMap<CacheKey, Arc<DkAlgebra>>> {
    static CACHE: OnceLock<Mutex<HashMap<CacheKey, Arc<DkAlgebra>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

impl DkAlgebra {
    /// Shared instance for `(n, degree)`; construction is deterministic, so caching is transparent.
    pub fn get(n: usize, degree: usize) -> Result<Arc<DkAlgebra>> {
        if let Some(a) = cache().lock().expect("cache lock").get(&(n, degree)) {
            return Ok(a.clone());
        }
        let built = Arc::new(DkAlgebra::build(n, degree)?);
        let mut guard = cache().lock().expect("cache lock");
        Ok(guard.entry((n, degree)).or_insert(built).clone())
    }

    pub fn build(n: usize, degree: usize) -> Result<DkAlgebra> {
        if !(2..=4).contains(&n) {
            return Err(Error::Invalid(format!("strand count {n} outside 2..=4")));
        }
        let mut names = Vec::new();
        for i in 1..=n {
            for j in i + 1..=n {
                names.push(dk_letter_name(i, j));
            }
        }
        let alphabet = Alphabet::new(names)?;
        let m = alphabet.len();
        let relations = quadratic_relations(n, &alphabet);

        let mut ideals: Vec<Rref> = Vec::with_capacity(degree + 1);
        let mut bases = Vec::with_capacity(degree + 1);
        for d in 0..=degree {
            let ncols = m.pow(d as u32);
            let mut e = Echelon::new(ncols);
            if d >= 2 {
                let prev = &ideals[d - 1];
                let shift = m.pow(d as u32 - 1);
                for x in 0..m {
                    for row in prev.rows() {
                        e.insert(row.iter().map(|(c, v)| (x * shift + c, v.clone())).collect());
                    }
                }
                let tail = m.pow(d as u32 - 2);
                for rel in &relations {
                    for v in 0..tail {
                        e.insert(rel.iter().map(|(c, val)| (c * tail + v, val.clone())).collect());
                    }
                }
            }
            let rref = e.into_rref();
            let basis = rref.free_columns().into_iter().map(|c| Word::from_rank(c, d, m)).collect();
            bases.push(basis);
            ideals.push(rref);
        }
        Ok(DkAlgebra { n, degree, alphabet, ideals, bases })
    }

    pub fn strands(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn basis(&self, d: usize) -> &[Word] {
        &self.bases[d]
    }

    pub fn dimensions(&self) -> Vec<usize> {
        self.bases.iter().map(Vec::len).collect()
    }

    pub fn letter(&self, i: usize, j: usize) -> FreeSeries {
        let name = dk_letter_name(i, j);
        FreeSeries::letter(&self.alphabet, self.degree, &name).expect("strand letter")
    }

    pub fn zero(&self) -> FreeSeries {
        FreeSeries::zero(&self.alphabet, self.degree)
    }

    pub fn one(&self) -> FreeSeries {
        FreeSeries::one(&self.alphabet, self.degree)
    }

    fn check(&self, x: &FreeSeries) -> Result<()> {
        if x.alphabet() != &self.alphabet || x.degree() != self.degree {
            return Err(Error::Mismatch(format!(
                "series is not over the {}-strand letters at degree {}",
                self.n, self.degree
            )));
        }
        Ok(())
    }

    /// Normal form: the representative supported on basis words.
    pub fn reduce(&self, x: &FreeSeries) -> Result<FreeSeries> {
        self.check(x)?;
        let m = self.alphabet.len();
        let mut per_degree: BTreeMap<usize, SparseRow> = BTreeMap::new();
        for (w, c) in x.terms() {
            per_degree.entry(w.len()).or_default().insert(w.rank_in_degree(m), c.clone());
        }
        let mut out = self.zero();
        for (d, row) in per_degree {
            for (col, c) in self.ideals[d].reduce(row) {
                out.add_term(Word::from_rank(col, d, m), c);
            }
        }
        Ok(out)
    }

    /// Coordinates in the basis, keyed by `(degree, position in basis(degree))`.
    pub fn dk_reduce(&self, x: &FreeSeries) -> Result<BTreeMap<(usize, usize), Rational>> {
        let r = self.reduce(x)?;
        let mut out = BTreeMap::new();
        for (w, c) in r.terms() {
            let pos = self.bases[w.len()].binary_search(w).expect("normal form uses basis words");
            out.insert((w.len(), pos), c.clone());
        }
        Ok(out)
    }

    pub fn is_zero(&self, x: &FreeSeries) -> Result<bool> {
        Ok(self.reduce(x)?.is_zero())
    }

    /// Product of normal forms, reduced.
    pub fn mul(&self, x: &FreeSeries, y: &FreeSeries) -> FreeSeries {
        self.reduce(&(x * y)).expect("same algebra")
    }

    pub fn exp(&self, x: &FreeSeries) -> Result<FreeSeries> {
        self.reduce(&x.exp_trunc()?)
    }

    pub fn inverse(&self, x: &FreeSeries) -> Result<FreeSeries> {
        self.reduce(&x.inverse()?)
    }

    /// `phi(images)` computed with reduction after every product.
    pub fn substitute(&self, phi: &FreeSeries, images: &[FreeSeries]) -> Result<FreeSeries> {
        let lifted: Vec<FreeSeries> = images.iter().map(|s| s.with_degree(self.degree)).collect();
        let raw = phi.with_degree(self.degree).substitute_with(&lifted, &|a, b| self.mul(a, b))?;
        self.reduce(&raw)
    }
}

/// Rows of `[t_ij, t_ik + t_jk]` and `[t_ij, t_kl]` over the degree-2 word index.
fn quadratic_relations(n: usize, alphabet: &Alphabet) -> Vec<SparseRow> {
    let m = alphabet.len();
    let idx = |i: usize, j: usize| alphabet.index_of(&dk_letter_name(i, j)).expect("letter") as usize;
    let mut rows = Vec::new();
    let mut push_bracket = |x: usize, ys: &[usize]| {
        let mut row: BTreeMap<usize, Rational> = BTreeMap::new();
        for &y in ys {
            for (col, s) in [(x * m + y, 1), (y * m + x, -1)] {
                let e = row.entry(col).or_insert_with(Rational::zero);
                *e += int(s);
            }
        }
        row.retain(|_, v| !v.is_zero());
        if !row.is_empty() {
            rows.push(row);
        }
    };
    for i in 1..=n {
        for j in i + 1..=n {
            for k in 1..=n {
                if k == i || k == j {
                    continue;
                }
                push_bracket(idx(i, j), &[idx(i, k), idx(j, k)]);
                for l in k + 1..=n {
                    if l != i && l != j {
                        push_bracket(idx(i, j), &[idx(k, l)]);
                    }
                }
            }
        }
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hilbert_series_small() {
        // U(t_3) = Q[c] (x) free(t12, t23) with c = t12 + t13 + t23 central.
        assert_eq!(DkAlgebra::get(3, 4).unwrap().dimensions(), vec![1, 3, 7, 15, 31]);
        // 1/((1-t)(1-2t)(1-3t))
        assert_eq!(DkAlgebra::get(4, 3).unwrap().dimensions(), vec![1, 6, 25, 90]);
    }

    #[test]
    fn relations_reduce_to_zero() {
        let dk = DkAlgebra::get(3, 3).unwrap();
        let r = dk.letter(1, 2).commutator(&(&dk.letter(1, 3) + &dk.letter(2, 3)));
        assert!(dk.is_zero(&r).unwrap());
        let w = &dk.letter(1, 2) * &dk.letter(2, 3);
        assert!(!dk.dk_reduce(&w).unwrap().is_empty());
        let dk4 = DkAlgebra::get(4, 2).unwrap();
        assert!(dk4.is_zero(&dk4.letter(1, 2).commutator(&dk4.letter(3, 4))).unwrap());
    }

    #[test]
    fn reduction_is_idempotent_and_multiplicative() {
        let dk = DkAlgebra::get(3, 4).unwrap();
        let x = &(&dk.letter(1, 3) * &dk.letter(1, 2)) + &dk.letter(2, 3);
        let y = &(&dk.letter(1, 2) * &dk.letter(1, 3)) - &dk.letter(1, 3);
        let rx = dk.reduce(&x).unwrap();
        assert_eq!(dk.reduce(&rx).unwrap(), rx);
        let ry = dk.reduce(&y).unwrap();
        assert_eq!(dk.reduce(&(&x * &y)).unwrap(), dk.reduce(&(&rx * &ry)).unwrap());
    }
}
