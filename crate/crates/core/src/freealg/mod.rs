//! Truncated graded free associative algebras over the rationals.
//!
//! A [`FreeSeries`] stores coefficients keyed by [`Word`]s of length at most
//! its truncation degree. Words are ordered by length first, then
//! lexicographically in the alphabet's letter order.

mod dk;

pub use dk::{dk_letter_name, DkAlgebra};

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::kernel::{fmt_rational, int, inv_factorial, parse_rational, Matrix, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Alphabet {
    letters: Vec<String>,
}

impl Alphabet {
    pub fn new<S: Into<String>>(letters: impl IntoIterator<Item = S>) -> Result<Arc<Self>> {
        let letters: Vec<String> = letters.into_iter().map(Into::into).collect();
        if letters.is_empty() {
            return Err(Error::Invalid("alphabet must be nonempty".into()));
        }
        if letters.len() > u8::MAX as usize {
            return Err(Error::Invalid("alphabet too large".into()));
        }
        for (i, l) in letters.iter().enumerate() {
            if l.is_empty() || l.chars().any(char::is_whitespace) || l == "1" {
                return Err(Error::Invalid(format!("bad letter name `{l}`")));
            }
            if letters[..i].contains(l) {
                return Err(Error::Invalid(format!("duplicate letter `{l}`")));
            }
        }
        Ok(Arc::new(Alphabet { letters }))
    }

    /// The two-letter alphabet `{a, b}` of associators.
    pub fn ab() -> Arc<Self> {
        Alphabet::new(["a", "b"]).expect("valid")
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letters(&self) -> &[String] {
        &self.letters
    }

    pub fn index_of(&self, name: &str) -> Option<u8> {
        self.letters.iter().position(|l| l == name).map(|i| i as u8)
    }

    pub fn name(&self, i: u8) -> &str {
        &self.letters[i as usize]
    }
}

/// A word over an alphabet, as letter indices. Ordered by length, then lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Word(pub Vec<u8>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[u8] {
        &self.0
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }

    /// Position of this word among all words of its length, base `m` with the first letter most significant.
    pub fn rank_in_degree(&self, m: usize) -> usize {
        self.0.iter().fold(0, |acc, &l| acc * m + l as usize)
    }

    pub fn from_rank(mut rank: usize, len: usize, m: usize) -> Word {
        let mut v = vec![0u8; len];
        for slot in v.iter_mut().rev() {
            *slot = (rank % m) as u8;
            rank /= m;
        }
        Word(v)
    }

    pub fn display(&self, alphabet: &Alphabet) -> String {
        if self.is_empty() {
            return "1".into();
        }
        self.0.iter().map(|l| alphabet.name(*l)).collect::<Vec<_>>().join(" ")
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.len().cmp(&other.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Truncated element of the free associative algebra. No zero coefficient is stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreeSeries {
    alphabet: Arc<Alphabet>,
    degree: usize,
    terms: BTreeMap<Word, Rational>,
}

impl FreeSeries {
    pub fn zero(alphabet: &Arc<Alphabet>, degree: usize) -> Self {
        FreeSeries { alphabet: alphabet.clone(), degree, terms: BTreeMap::new() }
    }

    pub fn one(alphabet: &Arc<Alphabet>, degree: usize) -> Self {
        Self::scalar(alphabet, degree, Rational::one())
    }

    pub fn scalar(alphabet: &Arc<Alphabet>, degree: usize, c: Rational) -> Self {
        let mut s = Self::zero(alphabet, degree);
        s.add_term(Word::empty(), c);
        s
    }

    pub fn letter(alphabet: &Arc<Alphabet>, degree: usize, name: &str) -> Result<Self> {
        let i = alphabet
            .index_of(name)
            .ok_or_else(|| Error::Invalid(format!("unknown letter `{name}`")))?;
        Ok(Self::monomial(alphabet, degree, Word(vec![i]), Rational::one()))
    }

    pub fn letter_index(alphabet: &Arc<Alphabet>, degree: usize, i: u8) -> Self {
        Self::monomial(alphabet, degree, Word(vec![i]), Rational::one())
    }

    pub fn monomial(alphabet: &Arc<Alphabet>, degree: usize, w: Word, c: Rational) -> Self {
        let mut s = Self::zero(alphabet, degree);
        s.add_term(w, c);
        s
    }

    pub fn from_terms(
        alphabet: &Arc<Alphabet>,
        degree: usize,
        terms: impl IntoIterator<Item = (Word, Rational)>,
    ) -> Self {
        let mut s = Self::zero(alphabet, degree);
        for (w, c) in terms {
            s.add_term(w, c);
        }
        s
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn terms(&self) -> &BTreeMap<Word, Rational> {
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

    pub fn coeff(&self, w: &Word) -> Rational {
        self.terms.get(w).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn constant_term(&self) -> Rational {
        self.coeff(&Word::empty())
    }

    /// Adds `c·w`, dropping words beyond the truncation degree.
    pub fn add_term(&mut self, w: Word, c: Rational) {
        if c.is_zero() || w.len() > self.degree {
            return;
        }
        match self.terms.entry(w) {
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

    fn check_compatible(&self, other: &FreeSeries) -> Result<()> {
        if self.alphabet != other.alphabet || self.degree != other.degree {
            return Err(Error::Mismatch(format!(
                "series over {:?} deg {} vs {:?} deg {}",
                self.alphabet.letters, self.degree, other.alphabet.letters, other.degree
            )));
        }
        Ok(())
    }

    /// Same terms at a new truncation degree.
    pub fn with_degree(&self, degree: usize) -> FreeSeries {
        FreeSeries {
            alphabet: self.alphabet.clone(),
            degree,
            terms: self.terms.iter().filter(|(w, _)| w.len() <= degree).map(|(w, c)| (w.clone(), c.clone())).collect(),
        }
    }

    /// Degree-`d` homogeneous component.
    pub fn homogeneous(&self, d: usize) -> FreeSeries {
        FreeSeries {
            alphabet: self.alphabet.clone(),
            degree: self.degree,
            terms: self.terms.iter().filter(|(w, _)| w.len() == d).map(|(w, c)| (w.clone(), c.clone())).collect(),
        }
    }

    pub fn min_degree(&self) -> Option<usize> {
        self.terms.keys().next().map(Word::len)
    }

    pub fn scale(&self, c: &Rational) -> FreeSeries {
        if c.is_zero() {
            return Self::zero(&self.alphabet, self.degree);
        }
        FreeSeries {
            alphabet: self.alphabet.clone(),
            degree: self.degree,
            terms: self.terms.iter().map(|(w, v)| (w.clone(), v * c)).collect(),
        }
    }

    pub fn try_add(&self, other: &FreeSeries) -> Result<FreeSeries> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &FreeSeries) -> Result<FreeSeries> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), -c.clone());
        }
        Ok(out)
    }

    /// Truncated concatenation product.
    pub fn series_mul(&self, other: &FreeSeries) -> Result<FreeSeries> {
        self.check_compatible(other)?;
        let mut acc: HashMap<Word, Rational> = HashMap::new();
        for (u, a) in &self.terms {
            let room = self.degree - u.len();
            for (v, b) in &other.terms {
                if v.len() > room {
                    break;
                }
                let e = acc.entry(u.concat(v)).or_insert_with(Rational::zero);
                *e += a * b;
            }
        }
        Ok(FreeSeries::from_terms(&self.alphabet, self.degree, acc))
    }

    pub fn pow(&self, k: usize) -> FreeSeries {
        let mut acc = Self::one(&self.alphabet, self.degree);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// `sum_k x^k / k!`, for `x` with zero constant term.
    pub fn exp_trunc(&self) -> Result<FreeSeries> {
        if !self.constant_term().is_zero() {
            return Err(Error::Invalid("exponential needs zero constant term".into()));
        }
        let mut acc = Self::one(&self.alphabet, self.degree);
        let mut power = Self::one(&self.alphabet, self.degree);
        for k in 1..=self.degree {
            power = &power * self;
            if power.is_zero() {
                break;
            }
            acc = &acc + &power.scale(&inv_factorial(k));
        }
        Ok(acc)
    }

    /// `sum_{m>=1} (-1)^{m-1} (x-1)^m / m`, for `x` with constant term 1.
    pub fn log_trunc(&self) -> Result<FreeSeries> {
        if !self.constant_term().is_one() {
            return Err(Error::Invalid("logarithm needs constant term 1".into()));
        }
        let nil = self - &Self::one(&self.alphabet, self.degree);
        let mut acc = Self::zero(&self.alphabet, self.degree);
        let mut power = Self::one(&self.alphabet, self.degree);
        for m in 1..=self.degree {
            power = &power * &nil;
            if power.is_zero() {
                break;
            }
            let c = Rational::new(if m % 2 == 1 { 1 } else { -1 }.into(), (m as i64).into());
            acc = &acc + &power.scale(&c);
        }
        Ok(acc)
    }

    /// Inverse of a series with constant term 1.
    pub fn inverse(&self) -> Result<FreeSeries> {
        if !self.constant_term().is_one() {
            return Err(Error::Invalid("inverse needs constant term 1".into()));
        }
        let nil = &Self::one(&self.alphabet, self.degree) - self;
        let mut acc = Self::one(&self.alphabet, self.degree);
        let mut power = Self::one(&self.alphabet, self.degree);
        for _ in 1..=self.degree {
            power = &power * &nil;
            if power.is_zero() {
                break;
            }
            acc = &acc + &power;
        }
        Ok(acc)
    }

    pub fn commutator(&self, other: &FreeSeries) -> FreeSeries {
        &(self * other) - &(other * self)
    }

    /// Dynkin projection: each word maps to its right-nested bracket divided by its length.
    pub fn lie_projection(&self) -> Result<FreeSeries> {
        if !self.constant_term().is_zero() {
            return Err(Error::Invalid("Lie projection is undefined in degree 0".into()));
        }
        let mut out = Self::zero(&self.alphabet, self.degree);
        for (w, c) in &self.terms {
            let scale = c * Rational::new(1.into(), (w.len() as i64).into());
            for (v, s) in right_nested(w.letters()) {
                out.add_term(v, &scale * int(s));
            }
        }
        Ok(out)
    }

    pub fn is_lie(&self) -> bool {
        self.lie_projection().is_ok_and(|p| p == *self)
    }

    /// Whether every homogeneous component of `log(self)` is Lie.
    pub fn is_group_like(&self) -> bool {
        self.log_trunc().is_ok_and(|l| l.is_lie())
    }

    /// The algebra homomorphism sending letter `i` to `assignment[i]`.
    pub fn evaluate(&self, assignment: &[Matrix]) -> Result<Matrix> {
        if assignment.len() != self.alphabet.len() {
            return Err(Error::Shape(format!(
                "{} matrices for {} letters",
                assignment.len(),
                self.alphabet.len()
            )));
        }
        let n = assignment[0].rows();
        if assignment.iter().any(|m| m.rows() != n || m.cols() != n) {
            return Err(Error::Shape("letter images must be square of equal size".into()));
        }
        let mut prefix: HashMap<Vec<u8>, Matrix> = HashMap::new();
        prefix.insert(Vec::new(), Matrix::identity(n));
        let mut acc = Matrix::zeros(n, n);
        for (w, c) in &self.terms {
            let m = prefix_product(&mut prefix, w.letters(), &|l| assignment[l as usize].clone(), &|a, b| a * b);
            if !m.is_zero() {
                acc = &acc + &m.scale(c);
            }
        }
        Ok(acc)
    }

    /// Substitutes `images[i]` for letter `i`, multiplying with `mul`.
    pub fn substitute_with(
        &self,
        images: &[FreeSeries],
        mul: &dyn Fn(&FreeSeries, &FreeSeries) -> FreeSeries,
    ) -> Result<FreeSeries> {
        if images.len() != self.alphabet.len() {
            return Err(Error::Shape(format!("{} images for {} letters", images.len(), self.alphabet.len())));
        }
        let target = &images[0];
        for im in images {
            target.check_compatible(im)?;
        }
        let one = Self::one(&target.alphabet, target.degree);
        let mut prefix: HashMap<Vec<u8>, FreeSeries> = HashMap::new();
        prefix.insert(Vec::new(), one);
        let mut acc = Self::zero(&target.alphabet, target.degree);
        for (w, c) in &self.terms {
            let p = prefix_product(&mut prefix, w.letters(), &|l| images[l as usize].clone(), mul);
            acc = &acc + &p.scale(c);
        }
        Ok(acc)
    }

    pub fn substitute(&self, images: &[FreeSeries]) -> Result<FreeSeries> {
        self.substitute_with(images, &|a, b| a * b)
    }

    /// Text form: one `<rational> : <letters>` line per term in canonical word order.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (w, c) in &self.terms {
            s.push_str(&format!("{} : {}\n", fmt_rational(c), w.display(&self.alphabet)));
        }
        s
    }

    pub fn parse(alphabet: &Arc<Alphabet>, degree: usize, text: &str) -> Result<FreeSeries> {
        let mut out = Self::zero(alphabet, degree);
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (c, w) = line
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("line {}: expected `coefficient : word`", lineno + 1)))?;
            let c = parse_rational(c).map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))?;
            let w = w.trim();
            let word = if w == "1" {
                Word::empty()
            } else {
                let mut v = Vec::new();
                for name in w.split_whitespace() {
                    v.push(alphabet.index_of(name).ok_or_else(|| {
                        Error::Parse(format!("line {}: unknown letter `{name}`", lineno + 1))
                    })?);
                }
                Word(v)
            };
            if word.len() > degree {
                return Err(Error::Parse(format!("line {}: word longer than degree {degree}", lineno + 1)));
            }
            out.add_term(word, c);
        }
        Ok(out)
    }
}

fn prefix_product<T: Clone>(
    memo: &mut HashMap<Vec<u8>, T>,
    word: &[u8],
    image: &dyn Fn(u8) -> T,
    mul: &dyn Fn(&T, &T) -> T,
) -> T {
    if let Some(v) = memo.get(word) {
        return v.clone();
    }
    let (last, head) = word.split_last().expect("empty prefix is seeded");
    let h = prefix_product(memo, head, image, mul);
    let v = mul(&h, &image(*last));
    memo.insert(word.to_vec(), v.clone());
    v
}

/// Expansion of `[x1,[x2,...,[x_{d-1},x_d]]]` into signed words.
fn right_nested(letters: &[u8]) -> Vec<(Word, i64)> {
    match letters {
        [] => vec![],
        [x] => vec![(Word(vec![*x]), 1)],
        [x, rest @ ..] => {
            let inner = right_nested(rest);
            let mut out = Vec::with_capacity(2 * inner.len());
            for (w, s) in &inner {
                let mut l = Vec::with_capacity(w.len() + 1);
                l.push(*x);
                l.extend_from_slice(w.letters());
                out.push((Word(l), *s));
                let mut r = w.0.clone();
                r.push(*x);
                out.push((Word(r), -*s));
            }
            out
        }
    }
}

impl fmt::Display for FreeSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(w, c)| format!("{}*{}", fmt_rational(c), w.display(&self.alphabet).replace(' ', "")))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl std::ops::Add for &FreeSeries {
    type Output = FreeSeries;
    fn add(self, rhs: &FreeSeries) -> FreeSeries {
        self.try_add(rhs).expect("compatible series")
    }
}

impl std::ops::Sub for &FreeSeries {
    type Output = FreeSeries;
    fn sub(self, rhs: &FreeSeries) -> FreeSeries {
        self.try_sub(rhs).expect("compatible series")
    }
}

impl std::ops::Mul for &FreeSeries {
    type Output = FreeSeries;
    fn mul(self, rhs: &FreeSeries) -> FreeSeries {
        self.series_mul(rhs).expect("compatible series")
    }
}

impl std::ops::Neg for &FreeSeries {
    type Output = FreeSeries;
    fn neg(self) -> FreeSeries {
        self.scale(&-Rational::one())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::q;
    use proptest::prelude::*;

    fn ab(n: usize) -> (FreeSeries, FreeSeries) {
        let al = Alphabet::ab();
        (FreeSeries::letter(&al, n, "a").unwrap(), FreeSeries::letter(&al, n, "b").unwrap())
    }

    fn arb_series(degree: usize) -> impl Strategy<Value = FreeSeries> {
        proptest::collection::vec((proptest::collection::vec(0u8..2, 0..=degree), -3i64..=3), 0..6).prop_map(
            move |terms| FreeSeries::from_terms(&Alphabet::ab(), degree, terms.into_iter().map(|(w, c)| (Word(w), int(c)))),
        )
    }

    #[test]
    fn product_examples() {
        let (a, b) = ab(2);
        let one = FreeSeries::one(a.alphabet(), 2);
        let p = &(&one + &a) * &(&one + &b);
        assert_eq!(p.to_text(), "1 : 1\n1 : a\n1 : b\n1 : a b\n");
        assert!((&(&a * &b) * &a).is_zero());
    }

    #[test]
    fn exp_log_examples() {
        let (a, b) = ab(2);
        let e = a.exp_trunc().unwrap();
        assert_eq!(e.coeff(&Word(vec![0, 0])), q(1, 2));
        let l = (&a.exp_trunc().unwrap() * &b.exp_trunc().unwrap()).log_trunc().unwrap();
        let expected = &(&a + &b) + &a.commutator(&b).scale(&q(1, 2));
        assert_eq!(l, expected);
        let (a3, _) = ab(3);
        let one = FreeSeries::one(a3.alphabet(), 3);
        let l = (&one + &a3).log_trunc().unwrap();
        assert_eq!(l.to_text(), "1 : a\n-1/2 : a a\n1/3 : a a a\n");
        assert!(a.scale(&int(0)).exp_trunc().unwrap().constant_term().is_one());
        assert!(one.exp_trunc().is_err());
    }

    #[test]
    fn lie_examples() {
        let (a, b) = ab(2);
        let c = a.commutator(&b);
        assert!(c.is_lie());
        let ab_word = &a * &b;
        assert_eq!(ab_word.lie_projection().unwrap(), c.scale(&q(1, 2)));
        assert!(!ab_word.is_lie());
        assert!(a.is_lie());
        assert!(FreeSeries::one(a.alphabet(), 2).lie_projection().is_err());
    }

    #[test]
    fn evaluate_examples() {
        let (a, b) = ab(3);
        let x = Matrix::from_i64(&[&[0, 1], &[0, 0]]);
        let y = Matrix::from_i64(&[&[0, 0], &[1, 0]]);
        let one = FreeSeries::one(a.alphabet(), 3);
        assert!(one.evaluate(&[x.clone(), y.clone()]).unwrap().is_identity());
        assert_eq!(a.commutator(&b).evaluate(&[x.clone(), y.clone()]).unwrap(), x.commutator(&y));
        let e = a.exp_trunc().unwrap().evaluate(&[x.clone(), y.clone()]).unwrap();
        assert_eq!(e, &Matrix::identity(2) + &x);
        assert!(a.evaluate(&[x, Matrix::identity(3)]).is_err());
    }

    #[test]
    fn text_roundtrip() {
        let (a, b) = ab(3);
        let s = &a.exp_trunc().unwrap() - &b.commutator(&a).scale(&q(1, 24));
        let back = FreeSeries::parse(a.alphabet(), 3, &s.to_text()).unwrap();
        assert_eq!(back, s);
        assert!(FreeSeries::parse(a.alphabet(), 1, "1 : a a").is_err());
        assert!(FreeSeries::parse(a.alphabet(), 1, "1 : c").is_err());
    }

    proptest! {
        #[test]
        fn mul_associative_unital(x in arb_series(3), y in arb_series(3), z in arb_series(3)) {
            prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
            let one = FreeSeries::one(x.alphabet(), 3);
            prop_assert_eq!(&x * &one, x.clone());
            prop_assert_eq!(&one * &x, x);
        }

        #[test]
        fn exp_log_inverse(x in arb_series(4)) {
            let x = &x - &FreeSeries::scalar(x.alphabet(), 4, x.constant_term());
            prop_assert_eq!(x.exp_trunc().unwrap().log_trunc().unwrap(), x.clone());
            let g = &FreeSeries::one(x.alphabet(), 4) + &x;
            prop_assert_eq!(g.log_trunc().unwrap().exp_trunc().unwrap(), g);
        }

        #[test]
        fn lie_projection_idempotent(x in arb_series(4)) {
            let x = &x - &FreeSeries::scalar(x.alphabet(), 4, x.constant_term());
            let p = x.lie_projection().unwrap();
            prop_assert_eq!(p.lie_projection().unwrap(), p);
        }

        #[test]
        fn evaluate_multiplicative(x in arb_series(3), y in arb_series(3)) {
            // Strictly upper triangular 3x3 images: words of length 3 act by zero.
            let m = [Matrix::from_i64(&[&[0, 1, 2], &[0, 0, 1], &[0, 0, 0]]), Matrix::from_i64(&[&[0, 3, 0], &[0, 0, -1], &[0, 0, 0]])];
            let lhs = (&x * &y).evaluate(&m).unwrap();
            let rhs = &x.evaluate(&m).unwrap() * &y.evaluate(&m).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
