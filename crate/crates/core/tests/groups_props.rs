mod common;

use common::c;
use entsym::groups::{
    center_dimension, clock_shift_rep, cohomologous, factor_basis, fourier_matrix, is_coboundary, is_covariant,
    is_grading_preserving, twisted_group_algebra, weyl_cocycle, Character, Cocycle2, FiniteAbelianGroup,
    GradedAlgebra, Subgroup,
};
use entsym::linalg::tensor;
use entsym::sample::{covariant_channel_from, gaussian_matrix};
use entsym::{check_algebra, DenseMatrix, Tolerance, C64};
use proptest::prelude::*;
use rand::Rng;

fn group(orders: &[usize]) -> FiniteAbelianGroup {
    FiniteAbelianGroup::new(orders.to_vec()).unwrap()
}

/// `(L, φ)` pairs: cyclic subgroups sit inside `Z_d × Z_d` so the Weyl cocycle restricts.
fn instances() -> Vec<(Subgroup, Cocycle2)> {
    let mut out = Vec::new();
    for (d, gens) in [(2, vec![vec![1, 0]]), (4, vec![vec![1, 0]]), (2, vec![]), (3, vec![])] {
        let psi = weyl_cocycle(d).unwrap();
        let g = psi.group().clone();
        let l = if gens.is_empty() { Subgroup::whole(&g) } else { Subgroup::generated(&g, &gens).unwrap() };
        out.push((l.clone(), Cocycle2::trivial(&g)));
        out.push((l, psi));
    }
    out
}

#[test]
fn duals() {
    let z2 = group(&[2]);
    let d = z2.dual_group();
    assert_eq!(d.len(), 2);
    assert!(d[0].is_trivial() && !d[1].is_trivial());
    assert_eq!(d[1].value(&[1]), c(-1.0, 0.0));
    assert_eq!(group(&[2, 3]).dual_group().len(), 6);
}

#[test]
fn restriction_from_z4_to_z2_is_two_to_one() {
    let z4 = group(&[4]);
    let l = Subgroup::generated(&z4, &[vec![2]]).unwrap();
    assert_eq!(l.order(), 2);
    let r = l.restriction();
    assert_eq!(r.len(), 4);
    for target in 0..2 {
        assert_eq!(r.iter().filter(|&&x| x == target).count(), 2);
    }
}

#[test]
fn bad_generator_rejected() {
    assert!(Subgroup::generated(&group(&[2, 2]), &[vec![3, 0]]).is_err());
    assert!(Character::new(&group(&[2]), vec![0, 1]).is_err());
}

#[test]
fn twisted_algebras_are_special_and_symmetric() {
    let tol = Tolerance::default();
    for (l, phi) in instances() {
        let a = twisted_group_algebra(&l, &phi).unwrap();
        let r = check_algebra(a.algebra());
        assert!(r.max_ssfa_residual() <= 1e-10, "|L| = {}: {r:?}", l.order());
        let uu: f64 = a.algebra().unit().iter().map(|z| z.norm_sqr()).sum();
        assert!((uu - l.order() as f64).abs() < 1e-12);
        // commutative exactly when the alternating form is trivial on L
        let alternating_trivial = l
            .elements()
            .iter()
            .all(|&g| l.elements().iter().all(|&h| (phi.alternating(g, h) - c(1.0, 0.0)).norm() < 1e-12));
        assert_eq!(r.flags(&tol).commutative, alternating_trivial);
    }
}

#[test]
fn weyl_twist_is_a_full_matrix_algebra() {
    for d in [2, 3, 4] {
        let psi = weyl_cocycle(d).unwrap();
        let l = Subgroup::whole(psi.group());
        for phi in [psi.clone(), psi.conj()] {
            let a = twisted_group_algebra(&l, &phi).unwrap();
            assert_eq!(a.dim(), d * d);
            assert_eq!(center_dimension(a.algebra()), 1);
        }
        assert_eq!(center_dimension(common::untwisted(&[d, d]).algebra()), d * d);
    }
}

#[test]
fn z2_fourier_matrix() {
    let a = common::untwisted(&[2]);
    let mu = factor_basis(&a).unwrap();
    let s = 1.0 / 2f64.sqrt();
    let expected = DenseMatrix::from_real_rows(&[vec![s, s], vec![s, -s]]).unwrap();
    assert!(mu.max_abs_diff(&expected).unwrap() < 1e-15);
    let twisted = twisted_group_algebra(&Subgroup::whole(weyl_cocycle(2).unwrap().group()), &weyl_cocycle(2).unwrap()).unwrap();
    assert!(factor_basis(&twisted).is_err());
}

#[test]
fn factor_basis_is_orthogonal_idempotents() {
    for orders in [vec![3], vec![2, 2], vec![4]] {
        let a = common::untwisted(&orders);
        let alg = a.algebra();
        let mu = fourier_matrix(a.subgroup());
        let n = a.dim();
        let cols: Vec<Vec<C64>> = (0..n).map(|k| mu.col(k)).collect();
        for x in 0..n {
            for y in 0..n {
                let prod = alg.multiply(&cols[x], &cols[y]);
                let expected: Vec<C64> = if x == y { cols[x].clone() } else { vec![c(0., 0.); n] };
                let err = prod.iter().zip(&expected).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max);
                assert!(err < 1e-12, "{orders:?} {x} {y}");
            }
            assert!((alg.counit_of(&cols[x]) - c(1.0, 0.0)).norm() < 1e-12);
        }
        let sum: Vec<C64> = (0..n).map(|r| cols.iter().map(|col| col[r]).sum()).collect();
        let err = sum.iter().zip(alg.unit()).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max);
        assert!(err < 1e-12);
        assert!(mu.is_unitary(&Tolerance::new(1e-12).unwrap()));

        // multiplication in the factor basis is entrywise
        let m_factor = mu.dagger().matmul(&alg.mult_matrix()).unwrap().matmul(&tensor(&mu, &mu)).unwrap();
        let entrywise = DenseMatrix::from_fn(n, n * n, |k, col| {
            if col == k * n + k { c(1.0, 0.0) } else { c(0.0, 0.0) }
        });
        assert!(m_factor.max_abs_diff(&entrywise).unwrap() < 1e-10);
    }
}

fn delta(n: usize, k: usize) -> Vec<f64> {
    (0..n).map(|i| if i == k { 1.0 } else { 0.0 }).collect()
}

#[test]
fn translations_are_covariant() {
    let a = common::untwisted(&[3]);
    for k in 0..3 {
        let f = covariant_channel_from(&a, &delta(3, k)).unwrap();
        assert!(is_covariant(f.matrix(), &a, &a).unwrap() < 1e-12);
    }
    assert!(is_covariant(&DenseMatrix::identity(3), &a, &a).unwrap() == 0.0);
}

#[test]
fn swapping_two_factor_states_is_not_covariant() {
    let a = common::untwisted(&[3]);
    let mu = fourier_matrix(a.subgroup());
    let swap01 = DenseMatrix::from_real_rows(&[vec![0., 1., 0.], vec![1., 0., 0.], vec![0., 0., 1.]]).unwrap();
    let f = mu.matmul(&swap01).unwrap().matmul(&mu.dagger()).unwrap();
    assert!(is_covariant(&f, &a, &a).unwrap() > 0.1);
    assert!(is_grading_preserving(&f, &a, &a).unwrap() > 0.1);
}

#[test]
fn projective_relation_exact() {
    for d in [2, 3, 4] {
        let rep = clock_shift_rep(d).unwrap();
        let g = rep.group().clone();
        for x in 0..g.order() {
            for y in 0..g.order() {
                let lhs = rep.matrix(x).matmul(rep.matrix(y)).unwrap().matmul(&rep.matrix(g.add(x, y)).dagger()).unwrap();
                let rhs = DenseMatrix::identity(d).scale(rep.cocycle().value(x, y));
                assert!(lhs.max_abs_diff(&rhs).unwrap() < 1e-10);
            }
        }
        assert!(rep.is_irreducible());
    }
}

#[test]
fn weyl_two_table() {
    let psi = weyl_cocycle(2).unwrap();
    assert!(psi.report().cocycle_identity == 0.0);
    assert!(is_coboundary(&psi).is_none());
    assert!(is_coboundary(&Cocycle2::trivial(psi.group())).is_some());
}

fn sub_pairs() -> Vec<(GradedAlgebra, GradedAlgebra)> {
    let g = group(&[2, 2]);
    let triv = Cocycle2::trivial(&g);
    let whole = twisted_group_algebra(&Subgroup::whole(&g), &triv).unwrap();
    let diag = twisted_group_algebra(&Subgroup::generated(&g, &[vec![1, 1]]).unwrap(), &triv).unwrap();
    let z3 = common::untwisted(&[3, 3]);
    vec![(whole.clone(), whole.clone()), (diag.clone(), whole.clone()), (whole, diag), (z3.clone(), z3)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(25))]

    #[test]
    fn characters_are_homomorphisms(a in 0usize..12, b in 0usize..12, k1 in 0usize..3, k2 in 0usize..4) {
        let g = group(&[3, 4]);
        let chi = Character::new(&g, vec![k1, k2]).unwrap();
        let lhs = chi.value_at(&g, g.add(a, b));
        prop_assert!((lhs - chi.value_at(&g, a) * chi.value_at(&g, b)).norm() < 1e-12);
    }

    #[test]
    fn coboundary_twist_is_cohomologous(angles in prop::collection::vec(-3.2..3.2f64, 9), d in 2usize..4) {
        let psi = weyl_cocycle(d).unwrap();
        let n = psi.group().order();
        let phi: Vec<C64> = (0..n).map(|i| C64::from_polar(1.0, angles[i % angles.len()] * (i as f64 + 1.0))).collect();
        let twisted = psi.mul(&Cocycle2::coboundary(psi.group(), &phi).unwrap()).unwrap();
        prop_assert!(cohomologous(&twisted, &psi).unwrap().is_some());
        prop_assert!(is_coboundary(&twisted).is_none());
        let triv = Cocycle2::coboundary(psi.group(), &phi).unwrap();
        let found = is_coboundary(&triv).unwrap();
        prop_assert!(triv.coboundary_residual(&found) < 1e-9);
    }

    /// Block-diagonal maps and dense maps; the two covariance notions agree on both.
    #[test]
    fn covariance_equals_grading_preservation(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        for (a1, a2) in sub_pairs() {
            for _ in 0..4 {
                let dense = gaussian_matrix(a2.dim(), a1.dim(), &mut rng);
                let block = DenseMatrix::from_fn(a2.dim(), a1.dim(), |r, col| {
                    if a2.degree_of(r) == a1.degree_of(col) { dense[(r, col)] } else { c(0.0, 0.0) }
                });
                let candidate = if rng.gen_bool(0.5) { block } else { dense };
                let cov = is_covariant(&candidate, &a1, &a2).unwrap() <= 1e-10;
                let graded = is_grading_preserving(&candidate, &a1, &a2).unwrap() <= 1e-10;
                prop_assert_eq!(cov, graded);
            }
        }
    }
}
