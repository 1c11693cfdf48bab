//! Small nilpotent Lie algebras, modules and tensors used throughout the tests and the CLI corpus.

use std::sync::Arc;

use super::{validate_lie_algebra, validate_representation, LieAlgebraData, LieAlgebraSpec, RepresentationData, RepresentationSpec, TensorRole, TwoTensor};
use crate::kernel::{int, Matrix, Rational};

const NAMES: [&str; 6] = ["x", "y", "z", "w", "u", "v"];

fn e(n: usize, k: usize) -> Vec<Rational> {
    let mut v = vec![int(0); n];
    v[k] = int(1);
    v
}

pub fn abelian(n: usize) -> Arc<LieAlgebraData> {
    let basis = if n <= NAMES.len() {
        NAMES[..n].iter().map(|s| s.to_string()).collect()
    } else {
        (1..=n).map(|i| format!("x{i}")).collect()
    };
    validate_lie_algebra(&LieAlgebraSpec { name: format!("abelian{n}"), basis, brackets: vec![] }).expect("abelian")
}

/// `[x, y] = z`.
pub fn heisenberg() -> Arc<LieAlgebraData> {
    validate_lie_algebra(&LieAlgebraSpec {
        name: "h3".into(),
        basis: vec!["x".into(), "y".into(), "z".into()],
        brackets: vec![(0, 1, e(3, 2))],
    })
    .expect("h3")
}

/// `h3` plus a central line `w`.
pub fn heisenberg_plus_line() -> Arc<LieAlgebraData> {
    validate_lie_algebra(&LieAlgebraSpec {
        name: "h3+w".into(),
        basis: vec!["x".into(), "y".into(), "z".into(), "w".into()],
        brackets: vec![(0, 1, e(4, 2))],
    })
    .expect("h3+w")
}

/// Free 3-step nilpotent algebra on two generators: `[x1,x2]=x3`, `[x1,x3]=x4`, `[x2,x3]=x5`.
pub fn free_nilpotent_2_3() -> Arc<LieAlgebraData> {
    validate_lie_algebra(&LieAlgebraSpec {
        name: "f5".into(),
        basis: (1..=5).map(|i| format!("x{i}")).collect(),
        brackets: vec![(0, 1, e(5, 2)), (0, 2, e(5, 3)), (1, 2, e(5, 4))],
    })
    .expect("f5")
}

fn module(g: &Arc<LieAlgebraData>, name: &str, dim: usize, matrices: Vec<Matrix>) -> RepresentationData {
    validate_representation(g, &RepresentationSpec { name: name.into(), dim, matrices }).expect("catalog module")
}

fn unit(n: usize, i: usize, j: usize) -> Matrix {
    Matrix::unit(n, i - 1, j - 1)
}

/// `h3` on `Q^2`: `x -> E12`.
pub fn h3_v2() -> RepresentationData {
    let g = heisenberg();
    module(&g, "V2", 2, vec![unit(2, 1, 2), Matrix::zeros(2, 2), Matrix::zeros(2, 2)])
}

/// `h3` on `Q^2`: `y -> E12`.
pub fn h3_v2y() -> RepresentationData {
    let g = heisenberg();
    module(&g, "V2y", 2, vec![Matrix::zeros(2, 2), unit(2, 1, 2), Matrix::zeros(2, 2)])
}

/// Faithful `h3` on `Q^3`: `x -> E12`, `y -> E23`, `z -> E13`.
pub fn h3_v3() -> RepresentationData {
    let g = heisenberg();
    module(&g, "V3", 3, vec![unit(3, 1, 2), unit(3, 2, 3), unit(3, 1, 3)])
}

pub fn h3_corpus() -> Vec<RepresentationData> {
    let g = heisenberg();
    vec![RepresentationData::trivial(&g, 1, "1"), h3_v2(), h3_v2y(), h3_v3()]
}

/// Modules of dimension at most 3 for `abelian(n)`, `n` in `{1, 2}`.
pub fn abelian_corpus(n: usize) -> Vec<RepresentationData> {
    let g = abelian(n);
    let j3 = &unit(3, 1, 2) + &unit(3, 2, 3);
    let mut out = vec![RepresentationData::trivial(&g, 1, "1")];
    match n {
        1 => {
            out.push(module(&g, "J2", 2, vec![unit(2, 1, 2)]));
            out.push(module(&g, "J3", 3, vec![j3]));
        }
        2 => {
            out.push(module(&g, "J2", 2, vec![unit(2, 1, 2), Matrix::zeros(2, 2)]));
            out.push(module(&g, "J3", 3, vec![j3, unit(3, 1, 3)]));
            out.push(module(&g, "K3", 3, vec![unit(3, 1, 3), unit(3, 2, 3)]));
        }
        _ => panic!("abelian corpus is defined for n = 1, 2"),
    }
    out
}

/// Modules of dimension at most 3 for `h3 + w`.
pub fn h3w_corpus() -> Vec<RepresentationData> {
    let g = heisenberg_plus_line();
    let z2 = Matrix::zeros(2, 2);
    let z3 = Matrix::zeros(3, 3);
    vec![
        RepresentationData::trivial(&g, 1, "1"),
        module(&g, "A2", 2, vec![unit(2, 1, 2), z2.clone(), z2.clone(), unit(2, 1, 2)]),
        module(&g, "B2", 2, vec![z2.clone(), unit(2, 1, 2), z2.clone(), z2.clone()]),
        module(&g, "W3", 3, vec![unit(3, 1, 2), unit(3, 2, 3), unit(3, 1, 3), unit(3, 1, 3)]),
        module(&g, "U3", 3, vec![unit(3, 1, 2), unit(3, 2, 3), unit(3, 1, 3), z3]),
    ]
}

/// Module of `f5` generated by the images of `x1`, `x2`.
fn f5_module(name: &str, x1: Matrix, x2: Matrix) -> RepresentationData {
    let g = free_nilpotent_2_3();
    let x3 = x1.commutator(&x2);
    let x4 = x1.commutator(&x3);
    let x5 = x2.commutator(&x3);
    let d = x1.rows();
    module(&g, name, d, vec![x1, x2, x3, x4, x5])
}

/// `f5` on `Q^4`: `x1 -> E12 + E34`, `x2 -> E23`.
pub fn f5_v4() -> RepresentationData {
    f5_module("V4", &unit(4, 1, 2) + &unit(4, 3, 4), unit(4, 2, 3))
}

/// `f5` on `Q^4`: `x1 -> E23`, `x2 -> E12 + E34`.
pub fn f5_w4() -> RepresentationData {
    f5_module("W4", unit(4, 2, 3), &unit(4, 1, 2) + &unit(4, 3, 4))
}

pub fn f5_corpus() -> Vec<RepresentationData> {
    let g = free_nilpotent_2_3();
    vec![RepresentationData::trivial(&g, 1, "1"), f5_v4(), f5_w4()]
}

/// `x1*x5 + x5*x1 - x2*x4 - x4*x2 + x3*x3`, an invariant tensor on which placements do not commute.
pub fn f5_casimir() -> TwoTensor {
    let g = free_nilpotent_2_3();
    TwoTensor::from_terms(
        &g,
        &[(int(1), 0, 4), (int(1), 4, 0), (int(-1), 1, 3), (int(-1), 3, 1), (int(1), 2, 2)],
        TensorRole::SymmetricInvariant,
    )
    .expect("invariant")
}

pub fn h3_zz() -> TwoTensor {
    let g = heisenberg();
    TwoTensor::from_terms(&g, &[(int(1), 2, 2)], TensorRole::SymmetricInvariant).expect("invariant")
}

pub fn basis_tensor(g: &Arc<LieAlgebraData>, i: usize, j: usize, role: TensorRole) -> TwoTensor {
    TwoTensor::from_terms(g, &[(int(1), i, j)], role).expect("in range")
}
