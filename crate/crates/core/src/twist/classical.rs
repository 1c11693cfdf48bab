use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::kernel::{fmt_rational, Matrix, Rational, Subspace};
use crate::liealg::{LieAlgebraData, TensorRole, TwoTensor};

/// Element of `g (x) g (x) g`, keyed by basis index triples.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThreeTensor {
    algebra: Arc<LieAlgebraData>,
    coeffs: BTreeMap<(usize, usize, usize), Rational>,
}

impl ThreeTensor {
    pub fn zero(g: &Arc<LieAlgebraData>) -> Self {
        ThreeTensor { algebra: g.clone(), coeffs: BTreeMap::new() }
    }

    pub fn add(&mut self, key: (usize, usize, usize), c: Rational) {
        let e = self.coeffs.entry(key).or_insert_with(Rational::zero);
        *e += c;
        if e.is_zero() {
            self.coeffs.remove(&key);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &BTreeMap<(usize, usize, usize), Rational> {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize, j: usize, k: usize) -> Rational {
        self.coeffs.get(&(i, j, k)).cloned().unwrap_or_else(Rational::zero)
    }

    /// One `c : a b c` line per term.
    pub fn to_text(&self) -> String {
        let n = self.algebra.basis_names();
        self.coeffs
            .iter()
            .map(|((i, j, k), c)| format!("{} : {} {} {}\n", fmt_rational(c), n[*i], n[*j], n[*k]))
            .collect()
    }
}

impl fmt::Display for ThreeTensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        write!(f, "{}", self.to_text().trim_end().replace('\n', "; "))
    }
}

/// `[r12, r13] + [r12, r23] + [r13, r23]` in `g (x) g (x) g`.
pub fn cybe_residual(r: &TwoTensor) -> ThreeTensor {
    let g = r.algebra();
    let terms = r.terms();
    let mut out = ThreeTensor::zero(g);
    for (c1, a, b) in &terms {
        for (c2, p, q) in &terms {
            let c = c1 * c2;
            // [r12, r13]: [e_a, e_p] (x) e_b (x) e_q
            for (k, v) in g.bracket_basis(*a, *p).iter().enumerate() {
                if !v.is_zero() {
                    out.add((k, *b, *q), &c * v);
                }
            }
            // [r12, r23]: e_a (x) [e_b, e_p] (x) e_q
            for (k, v) in g.bracket_basis(*b, *p).iter().enumerate() {
                if !v.is_zero() {
                    out.add((*a, k, *q), &c * v);
                }
            }
            // [r13, r23]: e_a (x) e_p (x) [e_b, e_q]
            for (k, v) in g.bracket_basis(*b, *q).iter().enumerate() {
                if !v.is_zero() {
                    out.add((*a, *p, k), &c * v);
                }
            }
        }
    }
    out
}

/// Subalgebra `h = im(r)` with the form `omega = r^{-1}` on it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DrinfeldPair {
    pub algebra: Arc<LieAlgebraData>,
    /// Basis of `h` in `g`-coordinates, in reduced echelon form.
    pub basis: Vec<Vec<Rational>>,
    /// `omega(h_a, h_b)`.
    pub omega: Matrix,
}

fn pivots(basis: &[Vec<Rational>]) -> Vec<usize> {
    basis.iter().map(|v| v.iter().position(|c| !c.is_zero()).expect("nonzero basis vector")).collect()
}

/// Coordinates of `v` in an echelon basis, or `None` if `v` is outside its span.
fn coordinates(basis: &[Vec<Rational>], piv: &[usize], v: &[Rational]) -> Option<Vec<Rational>> {
    let coords: Vec<Rational> = piv.iter().map(|p| v[*p].clone()).collect();
    let mut back = vec![Rational::zero(); v.len()];
    for (c, b) in coords.iter().zip(basis) {
        for (x, y) in back.iter_mut().zip(b) {
            *x += c * y;
        }
    }
    (back == v).then_some(coords)
}

/// Structure constants of `h` in its basis, and their failure if `h` is not closed.
fn sub_brackets(g: &LieAlgebraData, basis: &[Vec<Rational>]) -> std::result::Result<Vec<Vec<Vec<Rational>>>, String> {
    let piv = pivots(basis);
    let m = basis.len();
    let mut out = vec![vec![vec![]; m]; m];
    for a in 0..m {
        for b in 0..m {
            let br = g.bracket(&basis[a], &basis[b]);
            out[a][b] = coordinates(basis, &piv, &br).ok_or_else(|| {
                format!("[{}, {}] = {} leaves h", g.format_vector(&basis[a]), g.format_vector(&basis[b]), g.format_vector(&br))
            })?;
        }
    }
    Ok(out)
}

/// First `(a, b, c)` with `omega([a,b],c) + omega([b,c],a) + omega([c,a],b) != 0`.
fn cocycle_defect(brackets: &[Vec<Vec<Rational>>], omega: &Matrix) -> Option<(usize, usize, usize)> {
    let m = brackets.len();
    let form = |v: &[Rational], c: usize| -> Rational {
        v.iter().enumerate().fold(Rational::zero(), |acc, (i, x)| acc + x * omega.get(i, c))
    };
    for a in 0..m {
        for b in 0..m {
            for c in 0..m {
                let s = form(&brackets[a][b], c) + form(&brackets[b][c], a) + form(&brackets[c][a], b);
                if !s.is_zero() {
                    return Some((a, b, c));
                }
            }
        }
    }
    None
}

/// `h = im(r : g* -> g)` and `omega = (r|_h)^{-1}`, with `h` closed and `omega` a nondegenerate cocycle.
pub fn drinfeld_subalgebra(r: &TwoTensor) -> Result<DrinfeldPair> {
    let g = r.algebra();
    let n = g.dim();
    if !r.is_antisymmetric() {
        return Err(Error::Invalid(format!("{r} is not antisymmetric")));
    }
    let res = cybe_residual(r);
    if !res.is_zero() {
        return Err(Error::Check(format!("{r} violates the classical Yang-Baxter equation: {res}")));
    }
    let rows: Vec<Vec<Rational>> = (0..n).map(|i| (0..n).map(|j| r.coeff(i, j)).collect()).collect();
    let basis = Subspace::span_dense(n, rows.iter()).basis_dense();
    let piv = pivots(&basis);
    let m = basis.len();
    // r = sum rho^{ab} h_a (x) h_b and, in echelon form, rho^{ab} = r^{p_a p_b}.
    let rho = Matrix::from_rows((0..m).map(|a| (0..m).map(|b| r.coeff(piv[a], piv[b])).collect()).collect())
        .expect("square");
    let rebuilt = embed(g, &basis, &rho);
    if rebuilt != *r.coeffs() {
        return Err(Error::Check("r does not lie in h (x) h".into()));
    }
    let brackets = sub_brackets(g, &basis).map_err(|w| Error::Check(format!("image of r is not a subalgebra: {w}")))?;
    let omega = if m == 0 {
        Matrix::zeros(0, 0)
    } else {
        rho.inverse().ok_or_else(|| Error::Check("r restricted to h is degenerate".into()))?
    };
    if let Some((a, b, c)) = cocycle_defect(&brackets, &omega) {
        return Err(Error::Check(format!("omega fails the cocycle identity on basis triple ({a},{b},{c})")));
    }
    Ok(DrinfeldPair { algebra: g.clone(), basis, omega })
}

/// `sum rho^{ab} h_a (x) h_b` as a coefficient matrix.
fn embed(g: &LieAlgebraData, basis: &[Vec<Rational>], rho: &Matrix) -> Matrix {
    let n = g.dim();
    let mut out = Matrix::zeros(n, n);
    for (a, b, c) in rho.entries() {
        for (i, x) in basis[a].iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in basis[b].iter().enumerate() {
                if !y.is_zero() {
                    out.add_at(i, j, &(c * x * y));
                }
            }
        }
    }
    out
}

/// `r = omega^{-1}` on `h`, embedded in `g (x) g`, then certified by the inverse map.
pub fn symplectic_to_r(g: &Arc<LieAlgebraData>, h: &[Vec<Rational>], omega: &Matrix) -> Result<TwoTensor> {
    let n = g.dim();
    let m = h.len();
    if h.iter().any(|v| v.len() != n) || omega.rows() != m || omega.cols() != m {
        return Err(Error::Shape(format!("h needs vectors of length {n} and omega must be {m}x{m}")));
    }
    let span = Subspace::span_dense(n, h.iter());
    if span.dim() != m {
        return Err(Error::Invalid("basis of h is linearly dependent".into()));
    }
    if !(omega + &omega.transpose()).is_zero() {
        return Err(Error::Invalid("omega is not antisymmetric".into()));
    }
    if m % 2 == 1 {
        return Err(Error::Invalid(format!("h has odd dimension {m}, so omega is degenerate")));
    }
    if m == 0 {
        return Ok(TwoTensor::zero(g, TensorRole::RMatrix));
    }
    let echelon = span.basis_dense();
    sub_brackets(g, &echelon).map_err(|w| Error::Invalid(format!("h is not a subalgebra: {w}")))?;
    // Brackets in the given basis, through echelon coordinates.
    let piv = pivots(&echelon);
    let to_given = Matrix::from_rows(
        h.iter().map(|v| coordinates(&echelon, &piv, v).expect("in span")).collect(),
    )
    .expect("square");
    let from_given = to_given.inverse().expect("basis change");
    let mut brackets = vec![vec![vec![]; m]; m];
    for a in 0..m {
        for b in 0..m {
            let br = g.bracket(&h[a], &h[b]);
            let e = coordinates(&echelon, &piv, &br).expect("closed");
            brackets[a][b] = (0..m).map(|k| (0..m).fold(Rational::zero(), |acc, i| acc + &e[i] * from_given.get(i, k))).collect();
        }
    }
    let inv = omega.inverse().ok_or_else(|| Error::Invalid("omega is degenerate".into()))?;
    if let Some((a, b, c)) = cocycle_defect(&brackets, omega) {
        return Err(Error::Invalid(format!("omega fails the cocycle identity on basis triple ({a},{b},{c})")));
    }
    let r = TwoTensor::new(g, embed(g, h, &inv), TensorRole::RMatrix)?;

    let res = cybe_residual(&r);
    if !res.is_zero() {
        return Err(Error::Check(format!("omega^-1 violates the classical Yang-Baxter equation: {res}")));
    }
    let back = drinfeld_subalgebra(&r)?;
    // omega transported to the echelon basis: P omega P^T with h_echelon = P h.
    let transported = &(&from_given * omega) * &from_given.transpose();
    if back.basis != echelon || back.omega != transported {
        return Err(Error::Check("drinfeld_subalgebra does not return (h, omega)".into()));
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::int;
    use crate::liealg::catalog;

    #[test]
    fn cybe_examples() {
        let h = catalog::heisenberg();
        let xy = catalog::basis_tensor(&h, 0, 1, TensorRole::General);
        let res = cybe_residual(&xy);
        assert_eq!(res.to_text(), "-1 : x z y\n");
        assert!(cybe_residual(&catalog::h3_zz()).is_zero());
        assert!(cybe_residual(&TwoTensor::wedge(&h, 0, 2)).is_zero());
        let a = catalog::abelian(3);
        assert!(cybe_residual(&catalog::basis_tensor(&a, 0, 1, TensorRole::General)).is_zero());
        assert!(cybe_residual(&TwoTensor::wedge(&catalog::heisenberg_plus_line(), 0, 3)).is_zero());
    }

    #[test]
    fn drinfeld_examples() {
        let a = catalog::abelian(2);
        let p = drinfeld_subalgebra(&TwoTensor::wedge(&a, 0, 1)).unwrap();
        assert_eq!(p.basis.len(), 2);
        assert_eq!(p.omega, Matrix::from_i64(&[&[0, -1], &[1, 0]]));
        let r = symplectic_to_r(&a, &p.basis, &p.omega).unwrap();
        assert_eq!(r.coeffs(), TwoTensor::wedge(&a, 0, 1).coeffs());

        let g = catalog::heisenberg_plus_line();
        let p = drinfeld_subalgebra(&TwoTensor::wedge(&g, 0, 3)).unwrap();
        assert_eq!(p.basis, vec![vec![int(1), int(0), int(0), int(0)], vec![int(0), int(0), int(0), int(1)]]);

        let zero = TwoTensor::zero(&g, TensorRole::RMatrix);
        let p = drinfeld_subalgebra(&zero).unwrap();
        assert!(p.basis.is_empty());
    }

    #[test]
    fn symplectic_rejections() {
        let g = catalog::heisenberg_plus_line();
        let x = vec![int(1), int(0), int(0), int(0)];
        assert!(symplectic_to_r(&g, &[x.clone()], &Matrix::zeros(1, 1)).is_err());
        let y = vec![int(0), int(1), int(0), int(0)];
        // span(x, y) is not closed.
        assert!(symplectic_to_r(&g, &[x, y], &Matrix::from_i64(&[&[0, 1], &[-1, 0]])).is_err());
    }
}
