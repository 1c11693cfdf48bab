//! Truncated universal enveloping algebras in a PBW basis.
//!
//! Generators carry the weight `1 + k` for the deepest lower-central term `g_k`
//! containing them. Brackets raise weight, so the span of monomials of weight
//! above the bound `D` is a Hopf ideal and `U_{<=D}` is an exact quotient.
//! Elements of `U^{(x)k}` may also carry a formal `hbar` grading.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::kernel::{binomial, fmt_rational, inv_factorial, is_negative, Matrix, Rational};
use crate::liealg::{LieAlgebraData, RepresentationData, TwoTensor};

type Terms = Vec<(u32, Rational)>;

pub struct PbwBasis {
    algebra: Arc<LieAlgebraData>,
    weights: Vec<usize>,
    bound: usize,
    monomials: Vec<Vec<u16>>,
    index: HashMap<Vec<u16>, u32>,
    mono_weight: Vec<usize>,
    gen_table: Mutex<HashMap<(u32, u16), Arc<Terms>>>,
    mul_table: Mutex<HashMap<(u32, u32), Arc<Terms>>>,
    coproduct_table: Mutex<HashMap<u32, Arc<Vec<(u32, u32, Rational)>>>>,
}

impl fmt::Debug for PbwBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PbwBasis({}, weight <= {}, {} monomials)", self.algebra.name(), self.bound, self.monomials.len())
    }
}

impl PartialEq for PbwBasis {
    fn eq(&self, other: &Self) -> bool {
        self.algebra == other.algebra && self.bound == other.bound
    }
}

fn enumerate(weights: &[usize], bound: usize) -> Vec<Vec<u16>> {
    fn rec(weights: &[usize], i: usize, left: usize, cur: &mut Vec<u16>, out: &mut Vec<Vec<u16>>) {
        if i == weights.len() {
            out.push(cur.clone());
            return;
        }
        let mut k = 0;
        while k * weights[i] <= left {
            cur.push(k as u16);
            rec(weights, i + 1, left - k * weights[i], cur, out);
            cur.pop();
            k += 1;
        }
    }
    let mut out = Vec::new();
    rec(weights, 0, bound, &mut Vec::new(), &mut out);
    out
}

impl PbwBasis {
    /// Fails if some bracket `[e_i, e_j]` has a component of weight below `w_i + w_j`.
    pub fn new(g: &Arc<LieAlgebraData>, bound: usize) -> Result<Arc<Self>> {
        let n = g.dim();
        let weights = g.weights();
        for i in 0..n {
            for j in 0..n {
                for (k, c) in g.bracket_basis(i, j).iter().enumerate() {
                    if !c.is_zero() && weights[k] < weights[i] + weights[j] {
                        return Err(Error::Invalid(format!(
                            "basis of {} is not adapted to the lower central series: [{},{}] involves {}",
                            g.name(),
                            g.basis_names()[i],
                            g.basis_names()[j],
                            g.basis_names()[k]
                        )));
                    }
                }
            }
        }
        let mut monomials = enumerate(&weights, bound);
        let weight_of = |m: &Vec<u16>| m.iter().zip(&weights).map(|(k, w)| *k as usize * w).sum::<usize>();
        let length_of = |m: &Vec<u16>| m.iter().map(|k| *k as usize).sum::<usize>();
        monomials.sort_by(|a, b| {
            (weight_of(a), length_of(a)).cmp(&(weight_of(b), length_of(b))).then_with(|| b.cmp(a))
        });
        let index = monomials.iter().enumerate().map(|(i, m)| (m.clone(), i as u32)).collect();
        let mono_weight = monomials.iter().map(weight_of).collect();
        Ok(Arc::new(PbwBasis {
            algebra: g.clone(),
            weights,
            bound,
            monomials,
            index,
            mono_weight,
            gen_table: Mutex::new(HashMap::new()),
            mul_table: Mutex::new(HashMap::new()),
            coproduct_table: Mutex::new(HashMap::new()),
        }))
    }

    pub fn algebra(&self) -> &Arc<LieAlgebraData> {
        &self.algebra
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    pub fn weights(&self) -> &[usize] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn exponents(&self, m: u32) -> &[u16] {
        &self.monomials[m as usize]
    }

    pub fn weight(&self, m: u32) -> usize {
        self.mono_weight[m as usize]
    }

    /// Number of generator factors.
    pub fn length(&self, m: u32) -> usize {
        self.monomials[m as usize].iter().map(|k| *k as usize).sum()
    }

    pub fn monomial_index(&self, exps: &[u16]) -> Option<u32> {
        self.index.get(exps).copied()
    }

    /// Index of `e_i`, if its weight fits.
    pub fn generator(&self, i: usize) -> Option<u32> {
        let mut e = vec![0u16; self.weights.len()];
        e[i] = 1;
        self.monomial_index(&e)
    }

    pub fn mono_name(&self, m: u32) -> String {
        let names = self.algebra.basis_names();
        let parts: Vec<String> = self.monomials[m as usize]
            .iter()
            .enumerate()
            .filter(|(_, k)| **k > 0)
            .map(|(i, k)| if *k == 1 { names[i].clone() } else { format!("{}^{}", names[i], k) })
            .collect();
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("*")
        }
    }

    /// `m * e_i`, straightened.
    pub fn mul_generator(&self, m: u32, i: usize) -> Arc<Terms> {
        let key = (m, i as u16);
        if let Some(t) = self.gen_table.lock().expect("table").get(&key) {
            return t.clone();
        }
        let exps = &self.monomials[m as usize];
        let last = exps.iter().rposition(|k| *k > 0);
        let out: Terms = match last {
            Some(j) if j > i => {
                // m = m' e_j, and e_j e_i = e_i e_j + [e_j, e_i].
                let mut rest = exps.clone();
                rest[j] -= 1;
                let rest = self.index[&rest];
                let mut acc: BTreeMap<u32, Rational> = BTreeMap::new();
                for (c, a) in self.mul_generator(rest, i).iter() {
                    for (d, b) in self.mul_generator(*c, j).iter() {
                        *acc.entry(*d).or_insert_with(Rational::zero) += a * b;
                    }
                }
                for (k, b) in self.algebra.bracket_basis(j, i).iter().enumerate() {
                    if !b.is_zero() {
                        for (d, a) in self.mul_generator(rest, k).iter() {
                            *acc.entry(*d).or_insert_with(Rational::zero) += a * b;
                        }
                    }
                }
                acc.into_iter().filter(|(_, c)| !c.is_zero()).collect()
            }
            _ => {
                let mut e = exps.clone();
                e[i] += 1;
                match self.index.get(&e) {
                    Some(idx) => vec![(*idx, Rational::one())],
                    None => vec![],
                }
            }
        };
        let out = Arc::new(out);
        self.gen_table.lock().expect("table").insert(key, out.clone());
        out
    }

    pub fn mul(&self, a: u32, b: u32) -> Arc<Terms> {
        if b == 0 {
            return Arc::new(vec![(a, Rational::one())]);
        }
        if a == 0 {
            return Arc::new(vec![(b, Rational::one())]);
        }
        if self.mono_weight[a as usize] + self.mono_weight[b as usize] > self.bound {
            return Arc::new(vec![]);
        }
        if let Some(t) = self.mul_table.lock().expect("table").get(&(a, b)) {
            return t.clone();
        }
        let mut cur: BTreeMap<u32, Rational> = BTreeMap::from([(a, Rational::one())]);
        for (i, k) in self.monomials[b as usize].iter().enumerate() {
            for _ in 0..*k {
                let mut next: BTreeMap<u32, Rational> = BTreeMap::new();
                for (m, c) in &cur {
                    for (d, e) in self.mul_generator(*m, i).iter() {
                        *next.entry(*d).or_insert_with(Rational::zero) += c * e;
                    }
                }
                next.retain(|_, c| !c.is_zero());
                cur = next;
            }
        }
        let out = Arc::new(cur.into_iter().collect::<Terms>());
        self.mul_table.lock().expect("table").insert((a, b), out.clone());
        out
    }

    /// `Delta(e^k) = sum_a prod_i binom(k_i, a_i) e^a (x) e^{k-a}`.
    pub fn coproduct(&self, m: u32) -> Arc<Vec<(u32, u32, Rational)>> {
        if let Some(t) = self.coproduct_table.lock().expect("table").get(&m) {
            return t.clone();
        }
        let exps = &self.monomials[m as usize];
        let mut parts: Vec<(Vec<u16>, Vec<u16>, Rational)> = vec![(vec![], vec![], Rational::one())];
        for &k in exps {
            let mut next = Vec::new();
            for (l, r, c) in &parts {
                for a in 0..=k {
                    let mut l2 = l.clone();
                    l2.push(a);
                    let mut r2 = r.clone();
                    r2.push(k - a);
                    next.push((l2, r2, c * Rational::from_integer(binomial(k as usize, a as usize))));
                }
            }
            parts = next;
        }
        let out: Vec<(u32, u32, Rational)> =
            parts.into_iter().map(|(l, r, c)| (self.index[&l], self.index[&r], c)).collect();
        let out = Arc::new(out);
        self.coproduct_table.lock().expect("table").insert(m, out.clone());
        out
    }

    /// `S(e_1^{k_1} ... e_n^{k_n}) = (-1)^{|k|} e_n^{k_n} ... e_1^{k_1}`.
    pub fn antipode(&self, m: u32) -> Terms {
        let exps = &self.monomials[m as usize];
        let mut cur: BTreeMap<u32, Rational> = BTreeMap::from([(0, Rational::one())]);
        let mut sign = Rational::one();
        for (i, k) in exps.iter().enumerate().rev() {
            for _ in 0..*k {
                sign = -sign;
                let mut next: BTreeMap<u32, Rational> = BTreeMap::new();
                for (m, c) in &cur {
                    for (d, e) in self.mul_generator(*m, i).iter() {
                        *next.entry(*d).or_insert_with(Rational::zero) += c * e;
                    }
                }
                next.retain(|_, c| !c.is_zero());
                cur = next;
            }
        }
        cur.into_iter().map(|(m, c)| (m, c * &sign)).collect()
    }

    /// Image of a monomial: the ordered product of generator matrices.
    pub fn mono_matrix(&self, m: u32, rep: &RepresentationData) -> Matrix {
        let mut acc = Matrix::identity(rep.dim());
        for (i, k) in self.monomials[m as usize].iter().enumerate() {
            for _ in 0..*k {
                acc = &acc * rep.generator(i);
            }
        }
        acc
    }
}

/// Weight bound that makes evaluation on `mods[0] (x) ... (x) mods[k-1]` exact.
pub fn required_bound(mods: &[&RepresentationData]) -> usize {
    mods.iter().map(|m| m.length().saturating_sub(1)).sum()
}

/// Substitutes `images[i]` for letter `i` of `phi`, reusing prefix products.
pub fn evaluate_series(phi: &crate::freealg::FreeSeries, images: &[UTensor]) -> Result<UTensor> {
    if images.len() != phi.alphabet().len() || images.is_empty() {
        return Err(Error::Shape(format!("{} images for {} letters", images.len(), phi.alphabet().len())));
    }
    let first = &images[0];
    let mut prefix: HashMap<Vec<u8>, UTensor> = HashMap::new();
    prefix.insert(vec![], UTensor::one(&first.basis, first.legs, first.hbar));
    let mut acc = UTensor::zero(&first.basis, first.legs, first.hbar);
    for (w, c) in phi.terms() {
        let letters = w.letters();
        let mut known = letters.len();
        while !prefix.contains_key(&letters[..known]) {
            known -= 1;
        }
        for k in known..letters.len() {
            let next = prefix[&letters[..k]].mul(&images[letters[k] as usize]);
            prefix.insert(letters[..=k].to_vec(), next);
        }
        acc = &acc + &prefix[letters].scale(c);
    }
    Ok(acc)
}

/// Key layout: `[hbar degree, monomial of leg 1, ..., monomial of leg k]`.
type Key = Vec<u32>;

/// Element of `U_{<=D}^{(x)k}[hbar] / (hbar^{N+1})`, truncated at total weight `D`.
#[derive(Clone)]
pub struct UTensor {
    basis: Arc<PbwBasis>,
    legs: usize,
    hbar: usize,
    terms: BTreeMap<Key, Rational>,
}

impl fmt::Debug for UTensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "UTensor(legs {}, hbar <= {}, {} terms)", self.legs, self.hbar, self.terms.len())
    }
}

impl PartialEq for UTensor {
    fn eq(&self, other: &Self) -> bool {
        self.legs == other.legs && self.terms == other.terms
    }
}

impl UTensor {
    pub fn zero(basis: &Arc<PbwBasis>, legs: usize, hbar: usize) -> Self {
        UTensor { basis: basis.clone(), legs, hbar, terms: BTreeMap::new() }
    }

    pub fn scalar(basis: &Arc<PbwBasis>, legs: usize, hbar: usize, c: Rational) -> Self {
        let mut u = Self::zero(basis, legs, hbar);
        u.add_term(vec![0; legs + 1], c);
        u
    }

    pub fn one(basis: &Arc<PbwBasis>, legs: usize, hbar: usize) -> Self {
        Self::scalar(basis, legs, hbar, Rational::one())
    }

    /// `hbar^h sum t^{ij} e_i (x) e_j`.
    pub fn from_two_tensor(basis: &Arc<PbwBasis>, t: &TwoTensor, h: usize, hbar: usize) -> Self {
        let mut u = Self::zero(basis, 2, hbar);
        for (c, i, j) in t.terms() {
            if let (Some(a), Some(b)) = (basis.generator(i), basis.generator(j)) {
                u.add_term(vec![h as u32, a, b], c);
            }
        }
        u
    }

    /// A Lie element `sum v_i e_i` in one leg.
    pub fn from_lie(basis: &Arc<PbwBasis>, v: &[Rational], hbar: usize) -> Self {
        let mut u = Self::zero(basis, 1, hbar);
        for (i, c) in v.iter().enumerate() {
            if let Some(a) = basis.generator(i) {
                u.add_term(vec![0, a], c.clone());
            }
        }
        u
    }

    pub fn basis(&self) -> &Arc<PbwBasis> {
        &self.basis
    }

    pub fn legs(&self) -> usize {
        self.legs
    }

    pub fn hbar_degree(&self) -> usize {
        self.hbar
    }

    pub fn terms(&self) -> &BTreeMap<Key, Rational> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn key_weight(&self, key: &[u32]) -> usize {
        key[1..].iter().map(|m| self.basis.weight(*m)).sum()
    }

    /// Adds `c` at `key`, dropping terms past either truncation.
    pub fn add_term(&mut self, key: Key, c: Rational) {
        assert_eq!(key.len(), self.legs + 1);
        if c.is_zero() || key[0] as usize > self.hbar || self.key_weight(&key) > self.basis.bound {
            return;
        }
        match self.terms.entry(key) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn coeff(&self, key: &[u32]) -> Rational {
        self.terms.get(key).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn constant_term(&self) -> Rational {
        self.coeff(&vec![0; self.legs + 1])
    }

    pub fn with_hbar(&self, hbar: usize) -> UTensor {
        let mut u = UTensor::zero(&self.basis, self.legs, hbar);
        for (k, c) in &self.terms {
            u.add_term(k.clone(), c.clone());
        }
        u
    }

    /// The `hbar^h` part.
    pub fn hbar_part(&self, h: usize) -> UTensor {
        let mut u = UTensor::zero(&self.basis, self.legs, self.hbar);
        for (k, c) in &self.terms {
            if k[0] as usize == h {
                u.terms.insert(k.clone(), c.clone());
            }
        }
        u
    }

    /// Lowest `hbar` degree with a nonzero term.
    pub fn min_hbar(&self) -> Option<usize> {
        self.terms.keys().map(|k| k[0] as usize).min()
    }

    pub fn scale(&self, c: &Rational) -> UTensor {
        let mut u = UTensor::zero(&self.basis, self.legs, self.hbar);
        if !c.is_zero() {
            u.terms = self.terms.iter().map(|(k, v)| (k.clone(), v * c)).collect();
        }
        u
    }

    fn check_compatible(&self, other: &UTensor) {
        assert_eq!(self.legs, other.legs, "leg counts differ");
        assert!(Arc::ptr_eq(&self.basis, &other.basis) || *self.basis == *other.basis, "PBW bases differ");
    }

    pub fn mul(&self, other: &UTensor) -> UTensor {
        self.check_compatible(other);
        let hbar = self.hbar.min(other.hbar);
        let bound = self.basis.bound;
        let mut out = UTensor::zero(&self.basis, self.legs, hbar);
        let right: Vec<(&Key, &Rational, usize)> =
            other.terms.iter().map(|(k, c)| (k, c, other.key_weight(k))).collect();
        for (ka, ca) in &self.terms {
            let wa = self.key_weight(ka);
            for (kb, cb, wb) in &right {
                if ka[0] + kb[0] > hbar as u32 || wa + wb > bound {
                    continue;
                }
                let mut partial: Vec<(Key, Rational)> = vec![(vec![ka[0] + kb[0]], ca * *cb)];
                for leg in 1..=self.legs {
                    let prod = self.basis.mul(ka[leg], kb[leg]);
                    let mut next = Vec::with_capacity(partial.len() * prod.len());
                    for (k, c) in &partial {
                        for (m, d) in prod.iter() {
                            let mut k2 = k.clone();
                            k2.push(*m);
                            next.push((k2, c * d));
                        }
                    }
                    partial = next;
                    if partial.is_empty() {
                        break;
                    }
                }
                for (k, c) in partial {
                    out.add_term(k, c);
                }
            }
        }
        out
    }

    pub fn commutator(&self, other: &UTensor) -> UTensor {
        &self.mul(other) - &other.mul(self)
    }

    fn split_constant(&self) -> (Rational, UTensor) {
        let c = self.constant_term();
        let mut rest = self.clone();
        rest.terms.remove(&vec![0; self.legs + 1]);
        (c, rest)
    }

    fn nilpotent_series(x: &UTensor, coeff: impl Fn(usize) -> Rational) -> UTensor {
        let mut acc = UTensor::one(&x.basis, x.legs, x.hbar);
        let mut power = UTensor::one(&x.basis, x.legs, x.hbar);
        let mut k = 1;
        loop {
            power = power.mul(x);
            if power.is_zero() {
                return acc;
            }
            acc = &acc + &power.scale(&coeff(k));
            k += 1;
        }
    }

    pub fn exp(&self) -> Result<UTensor> {
        let (c, rest) = self.split_constant();
        if !c.is_zero() {
            return Err(Error::NotNilpotent("exp needs zero constant term".into()));
        }
        Ok(Self::nilpotent_series(&rest, |k| inv_factorial(k)))
    }

    pub fn log(&self) -> Result<UTensor> {
        let (c, rest) = self.split_constant();
        if !c.is_one() {
            return Err(Error::NotNilpotent("log needs constant term 1".into()));
        }
        let mut s = Self::nilpotent_series(&rest, |k| {
            let v = Rational::new(1.into(), (k as i64).into());
            if k % 2 == 0 {
                -v
            } else {
                v
            }
        });
        s.terms.remove(&vec![0; self.legs + 1]);
        Ok(s)
    }

    pub fn inverse(&self) -> Result<UTensor> {
        let (c, rest) = self.split_constant();
        if !c.is_one() {
            return Err(Error::NotNilpotent("inverse needs constant term 1".into()));
        }
        Ok(Self::nilpotent_series(&rest, |k| if k % 2 == 0 { Rational::one() } else { -Rational::one() }))
    }

    /// Applies `Delta` to leg `leg` (0-based), producing `legs + 1` legs.
    pub fn coproduct_at(&self, leg: usize) -> UTensor {
        assert!(leg < self.legs);
        let mut out = UTensor::zero(&self.basis, self.legs + 1, self.hbar);
        for (k, c) in &self.terms {
            for (a, b, d) in self.basis.coproduct(k[leg + 1]).iter() {
                let mut k2 = Vec::with_capacity(k.len() + 1);
                k2.extend_from_slice(&k[..leg + 1]);
                k2.push(*a);
                k2.push(*b);
                k2.extend_from_slice(&k[leg + 2..]);
                out.add_term(k2, c * d);
            }
        }
        out
    }

    /// Places leg `i` of `self` at position `slots[i]` of a `legs`-fold tensor, with `1` elsewhere.
    pub fn embed(&self, legs: usize, slots: &[usize]) -> UTensor {
        assert_eq!(slots.len(), self.legs);
        let mut out = UTensor::zero(&self.basis, legs, self.hbar);
        for (k, c) in &self.terms {
            let mut k2 = vec![0u32; legs + 1];
            k2[0] = k[0];
            for (i, s) in slots.iter().enumerate() {
                k2[s + 1] = k[i + 1];
            }
            out.add_term(k2, c.clone());
        }
        out
    }

    /// `x^{21}` for two legs.
    pub fn flip(&self) -> UTensor {
        self.embed(2, &[1, 0])
    }

    /// Exact evaluation on `mods[0] (x) ... (x) mods[k-1]`, with `hbar = 1`.
    pub fn evaluate(&self, mods: &[&RepresentationData]) -> Result<Matrix> {
        if mods.len() != self.legs {
            return Err(Error::Shape(format!("{} modules for a {}-leg tensor", mods.len(), self.legs)));
        }
        let need = required_bound(mods);
        if need > self.basis.bound {
            return Err(Error::DegreeTooSmall { have: self.basis.bound, need });
        }
        let dim: usize = mods.iter().map(|m| m.dim()).product();
        let mut cache: HashMap<(usize, u32), Matrix> = HashMap::new();
        let mut acc = Matrix::zeros(dim, dim);
        for (k, c) in &self.terms {
            let mut m = Matrix::identity(1);
            for (leg, rep) in mods.iter().enumerate() {
                let img = cache.entry((leg, k[leg + 1])).or_insert_with(|| self.basis.mono_matrix(k[leg + 1], rep));
                m = m.kron(img);
                if m.is_zero() {
                    break;
                }
            }
            if !m.is_zero() {
                acc = &acc + &m.scale(c);
            }
        }
        Ok(acc)
    }

    /// Terms with `hbar` set to 1.
    pub fn collapse_hbar(&self) -> UTensor {
        let mut out = UTensor::zero(&self.basis, self.legs, 0);
        for (k, c) in &self.terms {
            let mut k2 = k.clone();
            k2[0] = 0;
            out.add_term(k2, c.clone());
        }
        out
    }

    /// One line per term: `[h] c : m1 | m2 | ...`.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (k, c) in &self.terms {
            let monos: Vec<String> = k[1..].iter().map(|m| self.basis.mono_name(*m)).collect();
            s.push_str(&format!("[{}] {} : {}\n", k[0], fmt_rational(c), monos.join(" | ")));
        }
        s
    }
}

impl fmt::Display for UTensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (k, c)) in self.terms.iter().enumerate() {
            let monos: Vec<String> = k[1..].iter().map(|m| self.basis.mono_name(*m)).collect();
            let neg = is_negative(c);
            let abs = if neg { -c.clone() } else { c.clone() };
            let sep = match (i == 0, neg) {
                (true, false) => "",
                (true, true) => "-",
                (false, false) => " + ",
                (false, true) => " - ",
            };
            let h = match k[0] {
                0 => String::new(),
                1 => "h*".into(),
                n => format!("h^{n}*"),
            };
            write!(f, "{sep}{}{h}{}", if abs.is_one() { String::new() } else { format!("{}*", fmt_rational(&abs)) }, monos.join("(x)"))?;
        }
        Ok(())
    }
}

impl std::ops::Add for &UTensor {
    type Output = UTensor;
    fn add(self, other: &UTensor) -> UTensor {
        self.check_compatible(other);
        let mut out = self.with_hbar(self.hbar.min(other.hbar));
        for (k, c) in &other.terms {
            out.add_term(k.clone(), c.clone());
        }
        out
    }
}

impl std::ops::Sub for &UTensor {
    type Output = UTensor;
    fn sub(self, other: &UTensor) -> UTensor {
        self + &other.scale(&-Rational::one())
    }
}

impl std::ops::Mul for &UTensor {
    type Output = UTensor;
    fn mul(self, other: &UTensor) -> UTensor {
        UTensor::mul(self, other)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::int;
    use crate::liealg::catalog;
    use proptest::prelude::*;

    fn gen(b: &Arc<PbwBasis>, i: usize) -> UTensor {
        let mut v = vec![int(0); b.algebra().dim()];
        v[i] = int(1);
        UTensor::from_lie(b, &v, 0)
    }

    #[test]
    fn heisenberg_commutation() {
        let b = PbwBasis::new(&catalog::heisenberg(), 4).unwrap();
        let (x, y, z) = (gen(&b, 0), gen(&b, 1), gen(&b, 2));
        assert_eq!(y.mul(&x), &x.mul(&y) - &z);
        assert_eq!(x.commutator(&y), z);
        assert_eq!(z.commutator(&x), UTensor::zero(&b, 1, 0));
        // Weights: x, y -> 1, z -> 2.
        assert_eq!(b.weights(), &[1, 1, 2]);
        assert!(z.mul(&z).mul(&z).is_zero());
    }

    #[test]
    fn coproduct_is_multiplicative() {
        let b = PbwBasis::new(&catalog::free_nilpotent_2_3(), 5).unwrap();
        let x1 = gen(&b, 0);
        let x2 = gen(&b, 1);
        let p = x2.mul(&x1).mul(&x1);
        let q = x1.mul(&x2);
        let lhs = p.mul(&q).coproduct_at(0);
        let rhs = p.coproduct_at(0).mul(&q.coproduct_at(0));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn unadapted_basis_rejected() {
        let spec = crate::liealg::LieAlgebraSpec {
            name: "bad".into(),
            basis: vec!["x".into(), "y".into(), "u".into()],
            // h3 in the basis x, y, u = x + z.
            brackets: vec![(0, 1, vec![int(-1), int(0), int(1)]), (1, 2, vec![int(1), int(0), int(-1)])],
        };
        let g = crate::liealg::validate_lie_algebra(&spec).unwrap();
        assert!(PbwBasis::new(&g, 3).is_err());
    }

    #[test]
    fn evaluation_is_a_homomorphism() {
        let b = PbwBasis::new(&catalog::heisenberg(), 4).unwrap();
        let v3 = catalog::h3_v3();
        let (x, y) = (gen(&b, 0), gen(&b, 1));
        let p = y.mul(&x);
        let lhs = p.evaluate(&[&v3]).unwrap();
        let rhs = &v3.generator(1).clone() * v3.generator(0);
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn exp_log_roundtrip() {
        let b = PbwBasis::new(&catalog::heisenberg(), 4).unwrap();
        let r = UTensor::from_two_tensor(&b, &crate::liealg::TwoTensor::wedge(&catalog::heisenberg(), 0, 1), 1, 3);
        let e = r.exp().unwrap();
        assert_eq!(e.log().unwrap(), r);
        assert_eq!(e.mul(&e.inverse().unwrap()), UTensor::one(&b, 2, 3));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn associativity_on_random_words(w1 in proptest::collection::vec(0usize..5, 0..4),
                                         w2 in proptest::collection::vec(0usize..5, 0..4),
                                         w3 in proptest::collection::vec(0usize..5, 0..4)) {
            let b = PbwBasis::new(&catalog::free_nilpotent_2_3(), 6).unwrap();
            let word = |w: &[usize]| w.iter().fold(UTensor::one(&b, 1, 0), |acc, i| acc.mul(&gen(&b, *i)));
            let (a, c, d) = (word(&w1), word(&w2), word(&w3));
            prop_assert_eq!(a.mul(&c).mul(&d), a.mul(&c.mul(&d)));
        }

        #[test]
        fn antipode_inverts_identity(w in proptest::collection::vec(0usize..3, 1..4)) {
            let b = PbwBasis::new(&catalog::heisenberg(), 5).unwrap();
            let word = w.iter().fold(UTensor::one(&b, 1, 0), |acc, i| acc.mul(&gen(&b, *i)));
            // m (S (x) id) Delta = eps.
            let mut acc = UTensor::zero(&b, 1, 0);
            for (k, c) in word.terms() {
                for (p, q, d) in b.coproduct(k[1]).iter() {
                    for (s, e) in b.antipode(*p) {
                        for (m, f) in b.mul(s, *q).iter() {
                            acc.add_term(vec![0, *m], c * d * &e * f);
                        }
                    }
                }
            }
            prop_assert!(acc.is_zero());
        }
    }
}
