use std::sync::OnceLock;

use proptest::prelude::*;
use unibraid::associator::solve_associator;
use unibraid::category::BraidedStructure;
use unibraid::freealg::{Alphabet, FreeSeries, Word};
use unibraid::hopf::{coradical_filtration, truncated_polynomial};
use unibraid::kernel::{q, Matrix, Rational};
use unibraid::liealg::{catalog, TensorRole, TwoTensor};
use unibraid::twist::{cybe_residual, drinfeld_subalgebra, symplectic_to_r};

fn rat() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=4).prop_map(|(n, d)| q(n, d))
}

fn nonzero() -> impl Strategy<Value = Rational> {
    rat().prop_filter("nonzero", |c| *c != q(0, 1))
}

/// A series in `a, b` with zero constant term, truncated at degree 4.
fn augmented_series() -> impl Strategy<Value = FreeSeries> {
    proptest::collection::vec((1usize..=4, 0usize..16, rat()), 1..6).prop_map(|terms| {
        let al = Alphabet::ab();
        let mut s = FreeSeries::zero(&al, 4);
        for (len, rank, c) in terms {
            s.add_term(Word::from_rank(rank % (1 << len), len, 2), c);
        }
        s
    })
}

fn h3_structure() -> &'static BraidedStructure {
    static S: OnceLock<BraidedStructure> = OnceLock::new();
    S.get_or_init(|| {
        let phi = solve_associator(2).unwrap().into_series();
        BraidedStructure::new(&catalog::h3_zz(), &phi, catalog::h3_corpus()).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn nullspace_is_annihilated_and_complements_rank(rows in proptest::collection::vec(proptest::collection::vec(-3i64..=3, 5), 1..5)) {
        let m = Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&v| q(v, 1)).collect()).collect()).unwrap();
        let kernel = m.nullspace();
        prop_assert_eq!(kernel.len() + m.rank(), m.cols());
        for v in &kernel {
            prop_assert!((&m * v).is_zero());
        }
    }

    #[test]
    fn log_inverts_exp(x in augmented_series()) {
        prop_assert_eq!(x.exp_trunc().unwrap().log_trunc().unwrap(), x);
    }

    #[test]
    fn exp_of_lie_is_group_like(c in rat(), d in rat(), e in rat()) {
        let al = Alphabet::ab();
        let a = FreeSeries::letter(&al, 4, "a").unwrap();
        let b = FreeSeries::letter(&al, 4, "b").unwrap();
        let ab = a.commutator(&b);
        let x = a.scale(&c).try_add(&ab.scale(&d)).unwrap().try_add(&ab.commutator(&a).scale(&e)).unwrap();
        prop_assert!(x.is_lie());
        prop_assert!(x.exp_trunc().unwrap().is_group_like());
    }

    #[test]
    fn every_r_on_an_abelian_algebra_solves_cybe(c in proptest::collection::vec(rat(), 4)) {
        let g = catalog::abelian(2);
        let terms = [(c[0].clone(), 0, 0), (c[1].clone(), 0, 1), (c[2].clone(), 1, 0), (c[3].clone(), 1, 1)];
        let r = TwoTensor::from_terms(&g, &terms, TensorRole::RMatrix).unwrap();
        prop_assert!(cybe_residual(&r).is_zero());
    }

    #[test]
    fn cybe_residual_is_quadratic(c in proptest::collection::vec(rat(), 3), l in nonzero()) {
        let g = catalog::heisenberg();
        let terms = [(c[0].clone(), 0, 1), (c[1].clone(), 1, 2), (c[2].clone(), 2, 0)];
        let r = TwoTensor::from_terms(&g, &terms, TensorRole::RMatrix).unwrap();
        let base = cybe_residual(&r);
        let scaled = cybe_residual(&r.scale(&l));
        let l2 = &l * &l;
        prop_assert_eq!(base.coeffs().len(), scaled.coeffs().len());
        for (k, v) in base.coeffs() {
            prop_assert_eq!(scaled.coeffs().get(k), Some(&(v * &l2)));
        }
    }

    #[test]
    fn drinfeld_roundtrip_on_rank_two_solutions(a in rat(), b in rat(), l in nonzero()) {
        prop_assume!(a != q(0, 1) || b != q(0, 1));
        // (a x + b y) ^ z spans an abelian subalgebra of h3 because z is central.
        let g = catalog::heisenberg();
        let terms = [(&a * &l, 0, 2), (-(&a * &l), 2, 0), (&b * &l, 1, 2), (-(&b * &l), 2, 1)];
        let r = TwoTensor::from_terms(&g, &terms, TensorRole::RMatrix).unwrap();
        prop_assert!(cybe_residual(&r).is_zero());
        let pair = drinfeld_subalgebra(&r).unwrap();
        prop_assert_eq!(pair.basis.len(), 2);
        let back = symplectic_to_r(&g, &pair.basis, &pair.omega).unwrap();
        prop_assert_eq!(back.coeffs(), r.coeffs());
    }

    #[test]
    fn rescaled_braiding_matches_the_formula(l in rat()) {
        let s = h3_structure();
        prop_assert!(s.rescale_formula_check(&l).unwrap().pass);
        let scaled = s.rescale(&l).unwrap();
        prop_assert!(scaled.verify_coherence().unwrap().all_pass());
    }
}

#[test]
fn truncated_polynomial_filtration_is_by_degree() {
    for d in 0..6 {
        let f = coradical_filtration(&truncated_polynomial(d));
        assert_eq!(f.dims(), (1..=d + 1).collect::<Vec<_>>());
        assert!(f.routes_agree());
    }
}
