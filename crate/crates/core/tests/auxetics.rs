use nalgebra::DMatrix;
use periodica::auxetics::{
    affine_invariance_check, apply_affine, gram_velocity, lattice_monotonicity,
    sampled_lambda_min, strict_direction, verdict, SearchBudget, Tolerance, VerdictKind,
};
use periodica::constructors::{double_arrowhead, paneled_simplex, roofed_cadelniza};
use periodica::geometry::SymmetricMatrix;
use periodica::quotient::to_periodic;
use periodica::rigidity::{deformation_basis, DeformationSpace, Structure};
use periodica::{Error, InfinitesimalDeformation};
use proptest::prelude::*;

fn space_of(s: Structure) -> DeformationSpace {
    deformation_basis(&s).unwrap()
}

#[test]
fn paneled_simplex_has_a_strict_direction() {
    for d in [2, 3] {
        let ps = paneled_simplex(d).unwrap();
        let space = space_of(Structure::Finite(ps.linkage().clone()));
        let s = strict_direction(&space, Tolerance::default(), SearchBudget::default()).unwrap();
        assert!(s.found);
        assert!(s.lambda_min > 0.0);
        let norm: f64 = s.coefficients.iter().map(|c| c * c).sum::<f64>().sqrt();
        assert!((norm - 1.0).abs() < 1e-12);
    }
}

#[test]
fn search_agrees_with_brute_force_sampling() {
    let ps = paneled_simplex(3).unwrap();
    let space = space_of(Structure::Finite(ps.linkage().clone()));
    let s = strict_direction(&space, Tolerance::default(), SearchBudget::default()).unwrap();
    let sampled = sampled_lambda_min(&space.gram_velocities(), 20_000, 3);
    // sampling can only approach the maximum from below
    assert!(sampled <= s.lambda_min + 1e-9);
    assert!(s.lambda_min - sampled < 1e-2 * s.lambda_min.abs().max(1.0));
}

#[test]
fn search_is_deterministic_per_seed() {
    let space = space_of(Structure::Finite(paneled_simplex(3).unwrap().linkage().clone()));
    let budget = SearchBudget { seed: 9, ..SearchBudget::default() };
    let a = strict_direction(&space, Tolerance::default(), budget).unwrap();
    let b = strict_direction(&space, Tolerance::default(), budget).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.seed, 9);
}

#[test]
fn weakly_auxetic_roof_has_no_strict_direction() {
    let space = space_of(Structure::Periodic(roofed_cadelniza().unwrap()));
    let s = strict_direction(&space, Tolerance::default(), SearchBudget::default()).unwrap();
    assert!(!s.found);
    assert_eq!(s.grid_lambda_min, Some(s.lambda_min));
}

#[test]
fn rigid_structure_has_nothing_to_search() {
    let p = |x: f64, y: f64| nalgebra::DVector::from_vec(vec![x, y]);
    let tri = periodica::FiniteLinkage::new(
        2,
        vec![p(0.0, 0.0), p(1.0, 0.0), p(0.2, 0.9)],
        &[(0, 1), (1, 2), (0, 2)],
        vec![(0, 1), (0, 2)],
    )
    .unwrap();
    let space = space_of(Structure::Finite(tri));
    assert_eq!(space.dof, 0);
    assert_eq!(
        strict_direction(&space, Tolerance::default(), SearchBudget::default()),
        Err(Error::NoDegreesOfFreedom)
    );
}

#[test]
fn starved_budget_is_reported() {
    // negated single-vertex flexes: the all-equal start is the worst direction
    let ps = paneled_simplex(2).unwrap();
    let mut space = space_of(Structure::Finite(ps.linkage().clone()));
    space.basis = (1..=2).map(|k| ps.single_vertex_flex(k).scaled(-1.0)).collect();
    let budget = SearchBudget { restarts: 1, iterations: 0, seed: 1 };
    let r = strict_direction(&space, Tolerance::default(), budget);
    assert!(matches!(r, Err(Error::BudgetExhausted { .. })));
}

#[test]
fn affine_errors() {
    let f = to_periodic(&double_arrowhead()).unwrap();
    let singular = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]);
    assert_eq!(apply_affine(&f, &singular).err(), Some(Error::SingularMatrix));
    assert!(matches!(
        apply_affine(&f, &DMatrix::identity(3, 3)),
        Err(Error::DimensionMismatch { .. })
    ));
    let a = DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.5, 1.0]);
    let no_lattice = InfinitesimalDeformation {
        vertex_velocities: vec![nalgebra::DVector::zeros(2); 2],
        lattice_velocity: None,
    };
    assert_eq!(
        apply_affine(&f, &a).unwrap().map_raw(&no_lattice).err(),
        Some(Error::MissingLatticeVelocity)
    );
}

#[test]
fn shear_preserves_the_gram_velocity() {
    let f = to_periodic(&double_arrowhead()).unwrap();
    let a = DMatrix::from_row_slice(2, 2, &[1.0, 0.7, 0.0, 1.0]);
    let space = space_of(Structure::Periodic(f.clone()));
    let c = affine_invariance_check(&f, &a, &space.basis[0]).unwrap();
    assert!(c.holds, "deviation {}", c.max_deviation);
}

fn sym(e: &[f64]) -> SymmetricMatrix {
    SymmetricMatrix::from_upper(&DMatrix::from_row_slice(3, 3, e))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn psd_verdicts_pass_the_lattice_sampling(e in prop::collection::vec(-1.0f64..1.0, 9)) {
        let w = sym(&e);
        let v = verdict(&w, Tolerance::default());
        let monotone = lattice_monotonicity(&w, 3, Tolerance::default().relative);
        if v.kind.is_auxetic() {
            prop_assert!(monotone);
        }
        if !monotone {
            prop_assert_eq!(v.kind, VerdictKind::NonAuxetic);
        }
    }

    #[test]
    fn gram_velocity_is_invariant_under_rotation(l in prop::collection::vec(-2.0f64..2.0, 4),
                                                 ld in prop::collection::vec(-2.0f64..2.0, 4),
                                                 angle in 0.0f64..6.3) {
        let (s, c) = angle.sin_cos();
        let q = DMatrix::from_row_slice(2, 2, &[c, -s, s, c]);
        let l = DMatrix::from_column_slice(2, 2, &l);
        let ld = DMatrix::from_column_slice(2, 2, &ld);
        let a = gram_velocity(&l, &ld);
        let b = gram_velocity(&(&q * &l), &(&q * &ld));
        prop_assert!(a.max_abs_diff(&b) <= 1e-12 * (1.0 + l.norm() * ld.norm()));
    }
}
