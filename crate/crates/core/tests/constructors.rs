use nalgebra::{dvector, DMatrix, DVector};
use periodica::auxetics::{verdict, Tolerance, VerdictKind};
use periodica::constructors::*;
use periodica::quotient::{convert, to_periodic};
use periodica::rigidity::{
    deformation_basis, finite_dof, finite_rigidity_matrix, periodic_dof, relative_residual,
    Structure,
};
use periodica::{Error, FiniteLinkage, InfinitesimalDeformation, SymmetricMatrix};

fn finite_omega_dot(l: &FiniteLinkage, x: &InfinitesimalDeformation) -> SymmetricMatrix {
    Structure::Finite(l.clone()).gram_velocity_of(x).unwrap()
}

fn rank_of(w: &SymmetricMatrix, rtol: f64) -> usize {
    let ev = w.eigenvalues();
    let top = ev.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    ev.iter().filter(|e| e.abs() > rtol * top).count()
}

#[test]
fn altitudes_of_right_simplex_are_axes() {
    let mu = altitude_directions(&[dvector![0.0, 0.0], dvector![1.0, 0.0], dvector![0.0, 1.0]]).unwrap();
    assert!((&mu[0] - dvector![1.0, 0.0]).norm() < 1e-15);
    assert!((&mu[1] - dvector![0.0, 1.0]).norm() < 1e-15);
}

#[test]
fn altitudes_of_regular_simplices_point_away_from_opposite_facets() {
    // oracle: for a regular simplex the altitude at p_k runs from the opposite facet's centroid
    let s3 = 3f64.sqrt();
    let tri = vec![dvector![0.0, 0.0], dvector![1.0, 0.0], dvector![0.5, s3 / 2.0]];
    let tet = vec![
        dvector![1.0, 1.0, 1.0],
        dvector![1.0, -1.0, -1.0],
        dvector![-1.0, 1.0, -1.0],
        dvector![-1.0, -1.0, 1.0],
    ];
    for pts in [tri, tet] {
        let mu = altitude_directions(&pts).unwrap();
        for k in 1..pts.len() {
            let others: Vec<&DVector<f64>> = (0..pts.len()).filter(|&i| i != k).map(|i| &pts[i]).collect();
            let c = others.iter().fold(DVector::zeros(pts[0].len()), |a, p| a + *p) / others.len() as f64;
            let expected = (&pts[k] - c).normalize();
            assert!((&mu[k - 1] - expected).norm() < 1e-12);
        }
    }
}

#[test]
fn degenerate_simplex_rejected() {
    let r = altitude_directions(&[dvector![0.0, 0.0], dvector![1.0, 1.0], dvector![2.0, 2.0]]);
    assert_eq!(r.unwrap_err(), Error::DegenerateSimplex);
}

fn triangle_scaffold() -> FiniteLinkage {
    FiniteLinkage::new(
        2,
        vec![dvector![0.0, 0.0], dvector![1.0, 0.0], dvector![0.3, 0.9]],
        &[(0, 1), (1, 2), (0, 2)],
        vec![(0, 1), (0, 2)],
    )
    .unwrap()
}

#[test]
fn planar_hinge_rotates_vertex_about_hinge_point() {
    let scaffold = triangle_scaffold();
    let g = BarGraph::from_linkage(&scaffold);
    let v = dvector![2.0, 1.5];
    let mu = dvector![1.0, -0.4];
    let spec = HingeSpec::generic(&g, &[0, 1, 2], v.clone(), mu.clone(), 0.5).unwrap();
    let out = hinge_attach(&scaffold, &spec).unwrap();
    assert_eq!(finite_dof(&out).unwrap().dof, 1);
    // flex at v is orthogonal to v − hinge
    assert!(mu.dot(&(&v - &spec.hinge[0])).abs() < 1e-12);
}

#[test]
fn spatial_hinge_off_plane_is_rejected() {
    let tet = FiniteLinkage::new(
        3,
        vec![
            dvector![0.0, 0.0, 0.0],
            dvector![1.0, 0.0, 0.0],
            dvector![0.2, 1.0, 0.0],
            dvector![0.3, 0.3, 1.0],
        ],
        &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)],
        vec![(0, 1), (0, 2), (0, 3)],
    )
    .unwrap();
    let g = BarGraph::from_linkage(&tet);
    let v = dvector![2.0, 2.0, 0.5];
    let mu = dvector![0.0, 0.0, 1.0];
    let mut spec = HingeSpec::generic(&g, &[0, 1, 2, 3], v.clone(), mu.clone(), 0.4).unwrap();
    // a valid horizontal hinge gives a vertical instantaneous motion
    let ok = hinge_attach(&tet, &spec).unwrap();
    assert_eq!(finite_dof(&ok).unwrap().dof, 1);
    spec.hinge[1][2] += 0.1;
    assert!(matches!(hinge_attach(&tet, &spec), Err(Error::DegenerateHinge(_))));
}

#[test]
fn hinge_needs_rigid_scaffold() {
    let l = double_arrowhead();
    let g = BarGraph::from_linkage(&l);
    let spec = HingeSpec::generic(&g, &[0, 1, 2, 3], dvector![3.0, 2.0], dvector![0.0, 1.0], 0.5).unwrap();
    assert_eq!(hinge_attach(&l, &spec).unwrap_err(), Error::NonRigidScaffold);
}

#[test]
fn paneled_simplex_counts_and_lemma_two() {
    for d in [2usize, 3] {
        let ps = paneled_simplex(d).unwrap();
        let l = ps.linkage();
        assert_eq!(l.vertex_count(), d + 1 + d * d);
        assert_eq!(l.edge_count(), d * (d + 1) / 2 + d * (d * d - 1));
        let rep = finite_dof(l).unwrap();
        assert_eq!(rep.dof, d);
        assert!(rep.independent);
        let r = finite_rigidity_matrix(l);
        let x = ps.altitude_flex();
        assert!(relative_residual(&r, &x.to_coordinates()) < 1e-12);
        let w = finite_omega_dot(l, &x);
        let w = &w * (1.0 / w.frobenius_norm());
        assert!(w.min_eigenvalue() > 1e-6, "d = {d}: {w}");
        for k in 1..=d {
            let wk = finite_omega_dot(l, &ps.single_vertex_flex(k));
            assert_eq!(rank_of(&wk, 1e-10), 1);
            for i in 0..d {
                for j in 0..d {
                    if (i, j) != (k - 1, k - 1) {
                        assert!(wk.get(i, j).abs() <= 1e-10 * wk.frobenius_norm());
                    }
                }
            }
            assert!(wk.get(k - 1, k - 1) > 0.0);
        }
    }
}

#[test]
fn compatible_velocity_examples() {
    let p = [dvector![1.0, 0.0], dvector![0.0, 1.0]];
    let v = [dvector![1.0, 0.0], dvector![0.0, 1.0]];
    let q = solve_compatible_velocity(&p, &v, &dvector![0.0, 0.0]).unwrap();
    assert!((q - dvector![1.0, 1.0]).norm() < 1e-15);
    let on_line = dvector![0.5, 0.5];
    assert!(matches!(
        solve_compatible_velocity(&p, &v, &on_line),
        Err(Error::IllConditionedPosition(_))
    ));
}

#[test]
fn planar_reduction_keeps_prescribed_velocities() {
    let ps = paneled_simplex(2).unwrap();
    let flex = ps.altitude_flex();
    let q = default_reduction_point(&ps.scaffolded);
    let red = reduce_to_one_dof(&ps.scaffolded, &flex, &q).unwrap();
    let l = &red.scaffolded.linkage;
    assert_eq!(finite_dof(l).unwrap().dof, 1);
    let space = deformation_basis(&Structure::Finite(l.clone())).unwrap();
    let rel = red.scaffolded.relative(&space.basis[0]);
    let got = red.scaffolded.moving_velocities(&rel);
    let want = ps.scaffolded.moving_velocities(&flex);
    let num: f64 = got.iter().zip(&want).map(|(a, b)| a.dot(b)).sum();
    let den: f64 = want.iter().map(|b| b.norm_squared()).sum();
    let c = num / den;
    let dev: f64 = got.iter().zip(&want).map(|(a, b)| (a - b * c).norm_squared()).sum::<f64>().sqrt();
    let scale: f64 = got.iter().map(|a| a.norm_squared()).sum::<f64>().sqrt();
    assert!(dev <= 1e-8 * scale, "deviation {dev:e}");
    // surviving flex is still strictly auxetic
    let w = finite_omega_dot(l, &space.basis[0]);
    assert_eq!(verdict(&w, Tolerance::default()).kind, VerdictKind::StrictlyAuxetic);
}

#[test]
fn double_arrowhead_is_one_dof_and_concave() {
    let l = double_arrowhead();
    let rep = finite_dof(&l).unwrap();
    assert_eq!((rep.dof, rep.rank), (1, 4));
    assert!(double_arrowhead_with(1.0, 1.2).is_err());
}

#[test]
fn cadelniza_counts_and_dilation() {
    let l = cadelniza(CadelnizaParams::new(3)).unwrap();
    assert_eq!((l.vertex_count(), l.edge_count()), (5, 6));
    assert_eq!(finite_dof(&l).unwrap().dof, 3);
    let c = convert(&l).unwrap();
    assert_eq!((c.quotient.orbit_count, c.framework.edge_orbit_count()), (2, 6));
    assert_eq!(periodic_dof(&c.framework).unwrap().dof, 3);
    let x = cadelniza_dilation_flex(&l);
    assert!(relative_residual(&finite_rigidity_matrix(&l), &x.to_coordinates()) < 1e-14);
    let w = finite_omega_dot(&l, &x);
    assert_eq!(verdict(&w, Tolerance::default()).kind, VerdictKind::StrictlyAuxetic);
    // the vertical period lengthens and stays orthogonal to the floor
    assert!(w.get(0, 0) > 0.0);
    assert!(w.get(0, 1).abs() < 1e-14 && w.get(0, 2).abs() < 1e-14);
    for d in [4usize, 5] {
        let l = cadelniza(CadelnizaParams::new(d)).unwrap();
        assert_eq!(finite_dof(&l).unwrap().dof, d * (d - 1) / 2);
    }
    let mut bad = CadelnizaParams::new(3);
    bad.h2 = bad.h1 * 0.5;
    assert!(cadelniza(bad).is_err());
}

#[test]
fn roofings_leave_one_degree_of_freedom() {
    let f = roofed_cadelniza().unwrap();
    assert_eq!(f.edge_orbit_count(), 8);
    assert_eq!(periodic_dof(&f).unwrap().dof, 1);
    let base = to_periodic(&cadelniza(CadelnizaParams::new(3)).unwrap()).unwrap();
    let alt = roof(&base, &roofing_alternative()).unwrap();
    assert_eq!(periodic_dof(&alt).unwrap().dof, 1);
    let dup = roof(&base, &[(0, 1, vec![0, 0, 0])]);
    assert!(matches!(dup, Err(Error::DuplicateOrbit { .. })));
}

#[test]
fn lk_counts() {
    for k in 3..=6 {
        let l = gallery_lk(LkParams::new(k)).unwrap();
        assert_eq!((l.vertex_count(), l.edge_count()), (3 * k + 2, 9 * k - 1));
        let rep = finite_dof(&l).unwrap();
        assert_eq!(rep.dof, 1, "k = {k}");
        let c = convert(&l).unwrap();
        assert_eq!(c.quotient.orbit_count, 3 * k - 1);
        assert_eq!(periodic_dof(&c.framework).unwrap().dof, 1);
    }
    assert!(gallery_lk(LkParams::new(2)).is_err());
}

#[test]
fn lk_closed_form_at_unit_radius() {
    let s3 = 3f64.sqrt();
    for k in 3..=6 {
        let cf = lk_closed_form(LkParams::new(k), 1.0).unwrap();
        assert!((cf.theta - 2.0 * std::f64::consts::PI / 3.0).abs() < 1e-14);
        assert!((&cf.lambda1 - dvector![1.5, s3 / 2.0, 0.0]).norm() < 1e-14);
        assert!((&cf.lambda2 - dvector![1.5, -s3 / 2.0, 0.0]).norm() < 1e-14);
        // finite lattice agrees with the closed form
        let l = gallery_lk(LkParams::new(k)).unwrap();
        assert!((l.lattice_matrix() - cf.lattice()).norm() < 1e-14);
        let w = cf.omega.to_matrix();
        assert!((w[(1, 1)] - 3.0).abs() < 1e-13 && (w[(1, 2)] - 1.5).abs() < 1e-13);
    }
}

#[test]
fn lk_closed_form_matches_positions() {
    let p = LkParams::new(4);
    for r in [0.9, 1.0, 1.1] {
        let pos = lk_positions(p, r).unwrap();
        let l = gallery_lk(p).unwrap();
        // every bar keeps its length
        for e in l.edges() {
            let len = (&pos[e.v] - &pos[e.u]).norm();
            assert!((len - e.length).abs() < 1e-12, "r = {r}");
        }
        let cf = lk_closed_form(p, r).unwrap();
        let lat = DMatrix::from_columns(&[
            &pos[3 * 4 + 1] - &pos[3 * 4],
            &pos[4] - &pos[0],
            &pos[8] - &pos[0],
        ]);
        assert!((lat - cf.lattice()).norm() < 1e-12);
    }
}

#[test]
fn gallery_selectors_build() {
    for s in GallerySelector::standard() {
        s.build().unwrap();
    }
}
