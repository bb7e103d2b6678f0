mod common;

use common::{lk_horizontal_length, lk_radius_from_vertical, Arrowhead};
use periodica::auxetics::VerdictKind;
use periodica::constructors::{
    cadelniza, double_arrowhead, gallery_lk, roofed_cadelniza, CadelnizaParams, LkParams,
};
use periodica::path::{auxetic_interval, trace, trace_bidirectional, BoundaryKind, GramPath, TraceConfig};
use periodica::quotient::to_periodic;
use periodica::{Error, PeriodicFramework};

fn arrowhead() -> PeriodicFramework {
    to_periodic(&double_arrowhead()).unwrap()
}

fn steps(n: usize) -> TraceConfig {
    TraceConfig {
        max_steps: n,
        ..TraceConfig::default()
    }
}

#[test]
fn arrowhead_gram_stays_diagonal_and_opens() {
    let p = trace_bidirectional(&arrowhead(), &steps(80)).unwrap();
    let iv = auxetic_interval(&p).unwrap();
    let samples = p.samples();
    for s in &samples {
        assert!(s.omega.get(0, 1).abs() <= 1e-8);
    }
    let concave: Vec<_> = samples.iter().filter(|s| iv.contains(s.tau)).collect();
    assert!(concave.len() > 50);
    for s in &concave {
        assert_eq!(s.verdict.kind, VerdictKind::StrictlyAuxetic);
    }
    for w in concave.windows(2) {
        assert!(w[1].omega.get(0, 0) > w[0].omega.get(0, 0));
        assert!(w[1].omega.get(1, 1) > w[0].omega.get(1, 1));
    }
}

#[test]
fn arrowhead_states_follow_the_closed_form() {
    let a = Arrowhead::standard();
    let p = trace(&arrowhead(), &steps(30)).unwrap();
    for s in p.samples() {
        // ω_11 = 4x² gives φ; compare the remaining coordinates
        let x = s.omega.get(0, 0).sqrt() / 2.0;
        let phi = (x / a.b).asin();
        let want = a.state(phi);
        let got = [s.lattice[(0, 0)], s.lattice[(1, 1)]];
        assert!((got[0].abs() - want[4]).abs() < 1e-10);
        assert!((got[1].abs() - want[7]).abs() < 1e-10);
        assert!((s.tau - a.arclength(phi)).abs() < 1e-8);
    }
}

#[test]
fn arrowhead_interval_ends_where_concavity_is_lost() {
    let a = Arrowhead::standard();
    let tau_star = a.arclength(a.concavity_loss());
    let p = trace_bidirectional(&arrowhead(), &steps(80)).unwrap();
    let iv = auxetic_interval(&p).unwrap();
    assert_eq!(iv.hi_kind, BoundaryKind::ConeBoundary);
    assert!((iv.hi - tau_star).abs() < 1e-6, "{} vs {}", iv.hi, tau_star);
    assert!(iv.lo < 0.0);
}

#[test]
fn zero_steps_keep_only_the_start() {
    let p = trace(&arrowhead(), &steps(0)).unwrap();
    assert_eq!(p.samples().len(), 1);
    assert_eq!(p.samples()[0].tau, 0.0);
    assert_eq!(p.samples()[0].verdict.kind, VerdictKind::StrictlyAuxetic);
}

#[test]
fn short_horizon_is_reported_as_such() {
    let cfg = TraceConfig {
        max_tau: Some(0.2),
        ..TraceConfig::default()
    };
    let p = trace_bidirectional(&arrowhead(), &cfg).unwrap();
    let iv = auxetic_interval(&p).unwrap();
    assert_eq!((iv.lo_kind, iv.hi_kind), (BoundaryKind::TraceHorizon, BoundaryKind::TraceHorizon));
    assert_eq!((iv.lo, iv.hi), p.tau_range());
}

#[test]
fn lengths_are_conserved_and_tangents_continue() {
    for f in [arrowhead(), roofed_cadelniza().unwrap()] {
        let p = trace_bidirectional(&f, &steps(50)).unwrap();
        assert!(p.max_length_drift() <= 1e-10);
        for b in &p.branches {
            for w in b.samples.windows(2) {
                assert!(w[0].tangent.dot(&w[1].tangent) > 0.0);
            }
        }
    }
}

#[test]
fn lk_periods_follow_the_closed_form() {
    let params = LkParams::new(3);
    let f = to_periodic(&gallery_lk(params).unwrap()).unwrap();
    let cfg = TraceConfig {
        max_steps: 400,
        max_tau: Some(2.0),
        ..TraceConfig::default()
    };
    let p = trace(&f, &cfg).unwrap();
    let mut reached = 1.0;
    for s in p.samples() {
        let r = lk_radius_from_vertical(params, s.lattice.column(0).norm());
        if r > 1.2 {
            break;
        }
        reached = r;
        let want = lk_horizontal_length(3, r);
        assert!((s.lattice.column(1).norm() - want).abs() < 1e-6);
        assert!((s.lattice.column(2).norm() - want).abs() < 1e-6);
    }
    assert!(reached > 1.19, "trace stopped at r = {reached}");
}

#[test]
fn wrong_freedom_and_bad_starts_are_rejected() {
    let c = to_periodic(&cadelniza(CadelnizaParams::new(3)).unwrap()).unwrap();
    assert_eq!(trace(&c, &steps(5)).err(), Some(Error::NotOneDof(3)));
    let lk = to_periodic(&gallery_lk(LkParams::new(3)).unwrap()).unwrap();
    let p = trace(&lk, &steps(2)).unwrap();
    assert_eq!(auxetic_interval(&p).err(), Some(Error::NotAuxeticAtStart));
}

#[test]
fn locate_outside_the_trace_fails() {
    let p = trace(&arrowhead(), &steps(5)).unwrap();
    let (_, hi) = p.tau_range();
    assert_eq!(p.locate(hi + 0.1).err(), Some(Error::OutsidePath(hi + 0.1)));
    assert!(p.locate(-0.01).is_err());
}

#[test]
fn negated_seed_traces_the_other_branch() {
    let f = arrowhead();
    let both = trace_bidirectional(&f, &steps(20)).unwrap();
    let back = trace(&f, &TraceConfig { seed: -1.0, ..steps(20) }).unwrap();
    for s in back.samples() {
        assert!(s.tau <= 0.0);
        let o = both.locate(s.tau).unwrap();
        assert!(o.omega.max_abs_diff(&s.omega) <= 1e-11);
    }
}

#[test]
fn retracing_from_the_end_returns_along_the_path() {
    let f = arrowhead();
    let fwd = trace(&f, &steps(40)).unwrap();
    let end = (*fwd.samples().last().unwrap()).clone();
    let g = f.with_geometry(end.lattice.clone(), end.placements.clone()).unwrap();
    let back = trace(&g, &TraceConfig { seed: -1.0, ..steps(40) }).unwrap();
    let mut compared = 0;
    // the retrace may overshoot the original start slightly
    for s in back.samples().into_iter().filter(|s| end.tau + s.tau >= 0.0) {
        let o = fwd.locate(end.tau + s.tau).unwrap();
        assert!(o.omega.max_abs_diff(&s.omega) <= 1e-10);
        compared += 1;
    }
    assert!(compared >= 40);
}

fn richardson_ratio(p: &GramPath, tau: f64, h: f64) -> f64 {
    let exact = p.locate(tau).unwrap().omega_dot;
    let err = |h: f64| {
        let fd = &(&p.locate(tau + h).unwrap().omega - &p.locate(tau - h).unwrap().omega) * (0.5 / h);
        fd.max_abs_diff(&exact)
    };
    err(h) / err(h / 2.0)
}

#[test]
fn omega_dot_matches_central_differences() {
    let p = trace_bidirectional(&arrowhead(), &steps(40)).unwrap();
    for tau in [-0.2, 0.1, 0.25] {
        let r = richardson_ratio(&p, tau, 0.02);
        assert!((3.5..=4.5).contains(&r), "ratio {r} at {tau}");
    }
}
