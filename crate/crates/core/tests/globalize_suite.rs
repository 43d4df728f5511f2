//! The split / localize / descent engine on control spaces: the flat plane
//! and round sphere as positive controls, the 3-pi cone as the defective
//! space whose apex every procedure must find.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use toposcope::comparison::{badness, default_badness_tol, local_check, measure_angle, Triangle};
use toposcope::globalize::{
    descent_step, estimate_delta, globalization_audit, localize, split_at_min, AuditBudgets,
    AuditVerdict, DeltaConfig, DescentConfig, SplitTriangle, Termination, VerdictReport,
};
use toposcope::{Curvature, GeomError, Space, Vertex};

const PI: f64 = std::f64::consts::PI;

fn cone3pi() -> Space {
    Space::build_cone(3.0 * PI, 0.02).unwrap()
}

fn flat() -> Curvature {
    Curvature::flat()
}

/// The standard apex-crossing bad triangle on the 3-pi cone.
fn seeded_bad_triangle(
    space: &Space,
) -> (
    toposcope::PointRef,
    toposcope::PointRef,
    toposcope::PointRef,
) {
    let p = space.parse_point("1.0:0.0").unwrap();
    let r1 = space.parse_point(&format!("0.5:{}", 0.95 * PI)).unwrap();
    let r2 = space.parse_point(&format!("0.5:{}", 2.05 * PI)).unwrap();
    (p, r1, r2)
}

// ---- split_at_min ----

#[test]
fn split_plane_reports_no_negative_excess() {
    let space = Space::build_plane(5.0);
    let p = space.parse_point("0:2").unwrap();
    let r1 = space.parse_point("-1.5:0").unwrap();
    let r2 = space.parse_point("1.2:0").unwrap();
    let tri = SplitTriangle::new(&space, p, r1, r2).unwrap();
    match split_at_min(&space, flat(), &tri, 64, 1e-6) {
        Err(GeomError::NoNegativeExcess { min_excess, .. }) => {
            assert!(min_excess >= -1e-9, "plane excess dipped to {min_excess}");
        }
        other => panic!("expected NoNegativeExcess, got {other:?}"),
    }
}

#[test]
fn split_sphere_reports_no_negative_excess() {
    let space = Space::build_sphere_analytic(1.0).unwrap();
    let k = Curvature::new(1.0).unwrap();
    let p = space.parse_point("0.3:0").unwrap();
    let r1 = space.parse_point("1.4:0.6").unwrap();
    let r2 = space.parse_point("1.2:-0.9").unwrap();
    let tri = SplitTriangle::new(&space, p, r1, r2).unwrap();
    match split_at_min(&space, k, &tri, 64, 1e-6) {
        Err(GeomError::NoNegativeExcess { min_excess, .. }) => {
            assert!(min_excess >= -1e-9);
        }
        other => panic!("expected NoNegativeExcess, got {other:?}"),
    }
}

#[test]
fn split_cone_finds_negative_excess_with_certified_subangle() {
    let space = cone3pi();
    let (p, r1, r2) = seeded_bad_triangle(&space);
    let tol = default_badness_tol(&space);
    let tri = SplitTriangle::new(&space, p, r1, r2).unwrap();
    let cert = split_at_min(&space, flat(), &tri, 64, tol).unwrap();
    assert!(cert.excess < -tol);
    assert!(cert.bound_ok, "|p s0| must stay under max |p r_i|");
    assert!(cert.toward_r1.confirmed || cert.toward_r2.confirmed);
    let best = cert.best_confirmed();
    assert!(best.deficit > tol);
    // the split lands where the base crosses the apex
    let apex = space.cone_apex().unwrap();
    assert!(space.distance(cert.s0, apex).unwrap() < 0.05);
}

#[test]
fn split_certificates_revalidate_independently() {
    // re-measure each recorded sub-angle with fresh geodesics
    let space = cone3pi();
    let k = flat();
    let (p, r1, r2) = seeded_bad_triangle(&space);
    let tol = default_badness_tol(&space);
    let tri = SplitTriangle::new(&space, p, r1, r2).unwrap();
    let cert = split_at_min(&space, k, &tri, 64, tol).unwrap();
    for rep in [&cert.toward_r1, &cert.toward_r2] {
        let fresh = Triangle::from_vertices(&space, p, cert.s0, rep.toward).unwrap();
        let recheck = badness(&space, k, &fresh, Vertex::Q, tol).unwrap();
        if rep.confirmed {
            let re = recheck.expect("confirmed sub-angle must re-validate");
            assert!(
                (re.deficit - rep.deficit).abs() <= 1e-6 + 0.05 * rep.deficit,
                "recorded deficit {} vs re-measured {}",
                rep.deficit,
                re.deficit
            );
        }
    }
    // mandate misses can only appear because the cone violates the bound
    for missed in cert.mandate_misses() {
        let fresh = Triangle::from_vertices(&space, p, cert.s0, missed).unwrap();
        assert!(badness(&space, k, &fresh, Vertex::Q, tol)
            .unwrap()
            .is_none());
    }
}

#[test]
fn split_rejects_small_sample_counts() {
    let space = cone3pi();
    let (p, r1, r2) = seeded_bad_triangle(&space);
    let tri = SplitTriangle::new(&space, p, r1, r2).unwrap();
    assert!(matches!(
        split_at_min(&space, flat(), &tri, 8, 1e-6),
        Err(GeomError::Range(_))
    ));
}

#[test]
fn split_rejects_near_diameter_spherical_triangles() {
    let space = Space::build_sphere_analytic(1.0).unwrap();
    let k = Curvature::new(1.0).unwrap();
    let p = space.parse_point("0:0").unwrap();
    let r1 = space.parse_point("3.13:0.0").unwrap(); // nearly antipodal
    let r2 = space.parse_point("1.5:1.0").unwrap();
    let tri = SplitTriangle::new(&space, p, r1, r2).unwrap();
    assert!(matches!(
        split_at_min(&space, k, &tri, 64, 1e-6),
        Err(GeomError::OutOfRegime(_))
    ));
}

// ---- localize ----

#[test]
fn localize_cone_reaches_apex() {
    let space = cone3pi();
    let (p, r1, r2) = seeded_bad_triangle(&space);
    let tol = default_badness_tol(&space);
    let tri = SplitTriangle::new(&space, p, r1, r2).unwrap();
    let loc = localize(&space, flat(), &tri, 10.0 * space.h(), 64, 64, tol).unwrap();
    let apex = space.cone_apex().unwrap();
    let d = space.distance(loc.s_bar, apex).unwrap();
    assert!(d <= 2.0 * space.h(), "s_bar at {d} from apex, beyond 2h");
    // the distance bound never grows along the run
    assert!(loc.bound_ok);
    assert!(loc.bound_final <= loc.bound_initial + 5.0 * space.h());
    // the final pair sits within the target scale of s_bar
    let (s1, s2) = loc.pair;
    assert!(space.distance(loc.s_bar, s1).unwrap() <= 10.0 * space.h());
    assert!(space.distance(loc.s_bar, s2).unwrap() <= 10.0 * space.h());
}

#[test]
fn localize_plane_propagates_no_negative_excess() {
    let space = Space::build_plane(5.0);
    let p = space.parse_point("0:2").unwrap();
    let r1 = space.parse_point("-1:0").unwrap();
    let r2 = space.parse_point("1:0").unwrap();
    let tri = SplitTriangle::new(&space, p, r1, r2).unwrap();
    assert!(matches!(
        localize(&space, flat(), &tri, 0.1, 32, 64, 1e-6),
        Err(GeomError::NoNegativeExcess { .. })
    ));
}

#[test]
fn localize_rejects_subresolution_scale() {
    let space = cone3pi();
    let (p, r1, r2) = seeded_bad_triangle(&space);
    let tri = SplitTriangle::new(&space, p, r1, r2).unwrap();
    assert!(matches!(
        localize(&space, flat(), &tri, space.h(), 32, 64, 1e-6),
        Err(GeomError::Range(_))
    ));
}

// ---- estimate_delta ----

#[test]
fn delta_on_plane_is_half_distance() {
    let space = Space::build_plane(5.0);
    let k = flat();
    let p = space.parse_point("0:0").unwrap();
    let o = space.parse_point("2:1").unwrap();
    let d = estimate_delta(&space, k, p, o, &DeltaConfig::new(&space, 3)).unwrap();
    let d_po = space.distance(p, o).unwrap();
    assert!(
        (d - d_po / 2.0).abs() <= 1e-12,
        "delta {d} vs |po|/2 {}",
        d_po / 2.0
    );
}

#[test]
fn delta_on_cone_tracks_apex_distance() {
    let space = cone3pi();
    let k = flat();
    let p = space.parse_point("1.0:0.0").unwrap();
    // o far enough from the apex that its good ball is the apex distance
    let o = space.parse_point(&format!("0.3:{}", 1.5 * PI)).unwrap();
    let d = estimate_delta(&space, k, p, o, &DeltaConfig::new(&space, 7)).unwrap();
    let d_po = space.distance(p, o).unwrap();
    let apex_dist = 0.3;
    assert!(d <= d_po / 2.0 + 1e-12);
    assert!(
        d >= 0.5 * apex_dist && d <= 1.6 * apex_dist,
        "delta {d} not tracking the apex distance {apex_dist}"
    );
}

#[test]
fn delta_at_apex_adjacent_point_floors() {
    let space = cone3pi();
    let k = flat();
    let p = space.parse_point("1.0:0.0").unwrap();
    let o = space
        .parse_point(&format!("{}:{}", 1.5 * space.h(), 1.5 * PI))
        .unwrap();
    match estimate_delta(&space, k, p, o, &DeltaConfig::new(&space, 11)) {
        Err(GeomError::ResolutionFloor(_)) => {}
        Ok(d) => assert!(
            d <= 6.0 * space.h(),
            "apex-adjacent delta {d} should be near the floor"
        ),
        Err(e) => panic!("unexpected error {e:?}"),
    }
}

#[test]
fn delta_monotone_in_budget() {
    let space = cone3pi();
    let k = flat();
    let p = space.parse_point("1.0:0.0").unwrap();
    let o = space.parse_point(&format!("0.3:{}", 1.5 * PI)).unwrap();
    let mut prev = f64::INFINITY;
    for budget in [60, 220, 500] {
        let cfg = DeltaConfig {
            budget,
            tol: default_badness_tol(&space),
            seed: 7,
            grid: 16,
        };
        let d = estimate_delta(&space, k, p, o, &cfg).unwrap();
        assert!(
            d <= prev + 1e-15,
            "estimate grew from {prev} to {d} when the budget rose to {budget}"
        );
        prev = d;
    }
}

// ---- descent_step ----

#[test]
fn descent_step_arithmetic_bound() {
    // delta = 0.3 and |po| = 1.0 force |p o'| <= 0.9 + tol
    let space = cone3pi();
    let k = flat();
    let p = space.parse_point("0.75:0.0").unwrap();
    let o = space.parse_point(&format!("0.25:{}", 1.5 * PI)).unwrap();
    let d_po = space.distance(p, o).unwrap();
    assert!((d_po - 1.0).abs() < 1e-12);
    let cfg = DescentConfig::new(&space, 17);
    let step = descent_step(&space, k, p, o, 0.3, &cfg, None).unwrap();
    assert!(
        step.dist_p_onext <= 0.9 + 0.05,
        "|p o'| = {} breaks the arithmetic bound",
        step.dist_p_onext
    );
    assert!(step.dist_o_onext < 0.3);
}

#[test]
fn descent_step_plane_has_no_witness() {
    let space = Space::build_plane(5.0);
    let k = flat();
    let p = space.parse_point("0:0").unwrap();
    let o = space.parse_point("2:0").unwrap();
    let cfg = DescentConfig::new(&space, 23);
    assert!(matches!(
        descent_step(&space, k, p, o, 0.8, &cfg, None),
        Err(GeomError::WitnessNotFound)
    ));
}

#[test]
fn descent_step_cone_stays_near_apex_ray() {
    let space = cone3pi();
    let k = flat();
    let p = space.parse_point("1.0:0.0").unwrap();
    let o = space.parse_point(&format!("0.3:{}", 1.5 * PI)).unwrap();
    let delta = estimate_delta(&space, k, p, o, &DeltaConfig::new(&space, 7)).unwrap();
    let d_po = space.distance(p, o).unwrap();
    let cfg = DescentConfig::new(&space, 99);
    let step = descent_step(&space, k, p, o, delta, &cfg, None).unwrap();
    assert!(step.dist_p_onext <= d_po - delta / 3.0 + 0.05);
    assert!(step.dist_o_onext < delta);
    // the witness region on the cone hugs the apex, so the step lands near it
    let apex = space.cone_apex().unwrap();
    assert!(space.distance(step.o_next, apex).unwrap() < 0.3);
    // a fresh witness exists near the new point
    assert!(step.witness_deficit > 0.0);
    // the lemma-route evidence was recorded
    assert!(step.evidence.adjacent_sum.is_some());
    if let Some(sum) = step.evidence.adjacent_sum {
        assert!(
            (sum - PI).abs() < 0.2,
            "adjacent angles at the anchor sum to {sum}"
        );
    }
}

// ---- globalization audit ----

#[test]
fn audit_positive_controls_hold() {
    let plane = Space::build_plane(5.0);
    let p = plane.parse_point("0:0").unwrap();
    let q = plane.parse_point("1:0").unwrap();
    let r = plane.parse_point("0.3:0.8").unwrap();
    let tri = Triangle::from_vertices(&plane, p, q, r).unwrap();
    let out = globalization_audit(&plane, flat(), &tri, &AuditBudgets::new(5)).unwrap();
    assert_eq!(out.verdict, AuditVerdict::Holds);
    assert_eq!(out.termination, Termination::NoBadness);

    let sphere = Space::build_sphere_analytic(1.0).unwrap();
    let k = Curvature::new(1.0).unwrap();
    let p = sphere.parse_point("0.2:0").unwrap();
    let q = sphere.parse_point("1.2:0.4").unwrap();
    let r = sphere.parse_point("0.9:-1.0").unwrap();
    let tri = Triangle::from_vertices(&sphere, p, q, r).unwrap();
    let out = globalization_audit(&sphere, k, &tri, &AuditBudgets::new(5)).unwrap();
    assert_eq!(out.verdict, AuditVerdict::Holds);

    let hyper = Space::build_hyperbolic(2.5);
    let k = Curvature::new(-1.0).unwrap();
    let p = hyper.parse_point("0:0").unwrap();
    let q = hyper.parse_point("1.5:0.3").unwrap();
    let r = hyper.parse_point("-0.4:1.1").unwrap();
    let tri = Triangle::from_vertices(&hyper, p, q, r).unwrap();
    let out = globalization_audit(&hyper, k, &tri, &AuditBudgets::new(5)).unwrap();
    assert_eq!(out.verdict, AuditVerdict::Holds);
}

#[test]
fn audit_cone_violated_with_terminal_near_apex() {
    let space = cone3pi();
    let (p, r1, r2) = seeded_bad_triangle(&space);
    let tri = Triangle::from_vertices(&space, p, r1, r2).unwrap();
    let out = globalization_audit(&space, flat(), &tri, &AuditBudgets::new(1234)).unwrap();
    assert_eq!(out.verdict, AuditVerdict::Violated);
    let term = out.trace.terminal.as_ref().unwrap();
    let apex = space.cone_apex().unwrap();
    let d = space.distance(term.point, apex).unwrap();
    assert!(d <= 2.0 * space.h(), "terminal point at {d} from apex");
    assert!(term.worst_deficit > out.tol);
    let inv = out.invariants(&space);
    assert!(inv.step_decrease && inv.step_locality && inv.delta_sum);
}

#[test]
fn audit_wedge_seed_runs_multiple_steps() {
    let space = cone3pi();
    let p = space.parse_point("1.0:0.0").unwrap();
    let r1 = space.parse_point(&format!("0.3:{}", 1.4 * PI)).unwrap();
    let r2 = space.parse_point(&format!("0.3:{}", 1.6 * PI)).unwrap();
    let tri = Triangle::from_vertices(&space, p, r1, r2).unwrap();
    let out = globalization_audit(&space, flat(), &tri, &AuditBudgets::new(42)).unwrap();
    assert_eq!(out.verdict, AuditVerdict::Violated);
    assert!(
        out.trace.entries.len() >= 3,
        "wedge seed should support several descent steps, got {}",
        out.trace.entries.len()
    );
    // distances to the base point strictly decrease along the trace
    for w in out.trace.entries.windows(2) {
        assert!(w[1].dist_p < w[0].dist_p);
    }
    let inv = out.invariants(&space);
    assert!(inv.step_decrease && inv.step_locality && inv.delta_sum);
    // the per-entry sum bound and the vanishing-scale observation
    let deltas: Vec<f64> = out.trace.entries.iter().filter_map(|e| e.delta).collect();
    let sum: f64 = deltas.iter().map(|d| d / 3.0).sum();
    assert!(sum <= out.trace.entries[0].dist_p + out.tol);
    let min_delta = deltas.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(min_delta < 2.0 * out.trace.entries[0].dist_p * 3.0 / deltas.len() as f64);
}

#[test]
fn audit_icosphere_holds_at_mesh_tolerance() {
    let mesh = Space::build_sphere_mesh(1.0, 3).unwrap();
    let k = Curvature::new(1.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut tested = 0;
    while tested < 3 {
        let ids: Vec<String> = (0..3)
            .map(|_| rng.gen_range(0..642u32).to_string())
            .collect();
        let p = mesh.parse_point(&ids[0]).unwrap();
        let q = mesh.parse_point(&ids[1]).unwrap();
        let r = mesh.parse_point(&ids[2]).unwrap();
        let tri = match Triangle::from_vertices(&mesh, p, q, r) {
            Ok(t) => t,
            Err(_) => continue,
        };
        let sides = match tri.sides() {
            Ok(s) => s,
            Err(_) => continue,
        };
        if sides.perimeter() > 2.0 * PI - 0.2 || sides.a.min(sides.b).min(sides.c) < 0.3 {
            continue;
        }
        tested += 1;
        let out = globalization_audit(&mesh, k, &tri, &AuditBudgets::new(8)).unwrap();
        assert_eq!(
            out.verdict,
            AuditVerdict::Holds,
            "mesh triangle flagged bad"
        );
    }
}

#[test]
fn audit_rejects_out_of_regime_spherical_seed() {
    let sphere = Space::build_sphere_analytic(1.0).unwrap();
    let k = Curvature::new(1.0).unwrap();
    let p = sphere.parse_point("0:0").unwrap();
    let q = sphere.parse_point(&format!("{}:0", PI - 1e-4)).unwrap();
    let r = sphere.parse_point("1.5:1.0").unwrap();
    let tri = Triangle::from_vertices(&sphere, p, q, r).unwrap();
    match globalization_audit(&sphere, k, &tri, &AuditBudgets::new(3)) {
        Err(GeomError::OutOfRegime(_)) | Err(GeomError::InvalidTriple(_)) => {}
        other => panic!("expected regime rejection, got {other:?}"),
    }
}

#[test]
fn verdict_report_serializes_stable_schema() {
    let space = cone3pi();
    let (p, r1, r2) = seeded_bad_triangle(&space);
    let tri = Triangle::from_vertices(&space, p, r1, r2).unwrap();
    let out = globalization_audit(&space, flat(), &tri, &AuditBudgets::new(1234)).unwrap();
    let report = VerdictReport::from_outcome(&space, flat(), &out);
    let json = serde_json::to_value(&report).unwrap();
    assert_eq!(json["verdict"], "VIOLATED");
    assert!(json["terminal"]["point"].is_string());
    assert!(json["terminal"]["worst_deficit"].as_f64().unwrap() > 0.0);
    for key in ["step_decrease", "step_locality", "delta_sum"] {
        assert!(json["invariants"][key].is_boolean());
    }
    assert!(json["trace_len"].as_u64().is_some());
    // a second identical run yields byte-identical JSON
    let out2 = globalization_audit(&space, flat(), &tri, &AuditBudgets::new(1234)).unwrap();
    let report2 = VerdictReport::from_outcome(&space, flat(), &out2);
    assert_eq!(
        serde_json::to_string(&report).unwrap(),
        serde_json::to_string(&report2).unwrap()
    );
}

#[test]
fn local_check_cone_flags_only_apex_balls() {
    let space = cone3pi();
    let k = flat();
    let tol = default_badness_tol(&space);
    let near = space.parse_point("0.1:1.0").unwrap();
    let report = local_check(&space, k, near, 0.5, 200, tol, 3).unwrap();
    assert!(!report.is_good());
    assert!(report.worst_deficit() > 0.05);
    let far = space.parse_point("2.0:1.0").unwrap();
    let report = local_check(&space, k, far, 0.3, 200, tol, 3).unwrap();
    assert!(report.is_good());
}

#[test]
fn excess_function_soundness_sampled() {
    // reduced version of the acceptance sweep: on curvature-true backends
    // the sampled excess never dips below roundoff
    let cases: Vec<(Space, Curvature)> = vec![
        (Space::build_plane(4.0), flat()),
        (
            Space::build_sphere_analytic(1.0).unwrap(),
            Curvature::new(1.0).unwrap(),
        ),
        (Space::build_hyperbolic(2.0), Curvature::new(-1.0).unwrap()),
    ];
    for (space, k) in &cases {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let mut tested = 0;
        while tested < 40 {
            let pts = space.sample_points(3, rng.gen());
            let tri = match SplitTriangle::new(space, pts[0], pts[1], pts[2]) {
                Ok(t) => t,
                Err(_) => continue,
            };
            let (a, b, c) = tri.side_lengths();
            if a.min(b).min(c) < 0.1 {
                continue;
            }
            if k.is_spherical() && (a + b + c > 2.0 * PI - 0.2 || a.max(b).max(c) > 3.0) {
                continue;
            }
            tested += 1;
            match split_at_min(space, *k, &tri, 32, 1e-6) {
                Err(GeomError::NoNegativeExcess { min_excess, .. }) => {
                    assert!(min_excess >= -1e-6, "excess {min_excess} on a true backend");
                }
                Ok(cert) => panic!("unexpected split on a curvature-true backend: {cert:?}"),
                Err(e) => panic!("unexpected error {e:?}"),
            }
        }
    }
}

#[test]
fn measure_angle_agrees_at_split_points() {
    // the split certificate's measured angles come from the same operational
    // definition as standalone measurement
    let space = cone3pi();
    let (p, r1, r2) = seeded_bad_triangle(&space);
    let tol = default_badness_tol(&space);
    let tri = SplitTriangle::new(&space, p, r1, r2).unwrap();
    let cert = split_at_min(&space, flat(), &tri, 64, tol).unwrap();
    let g_s_p = space.geodesic(cert.s0, p).unwrap();
    for rep in [&cert.toward_r1, &cert.toward_r2] {
        let g_s_e = space.geodesic(cert.s0, rep.toward).unwrap();
        // re-measure at the recorded probe scale
        let est = measure_angle(&space, flat(), cert.s0, &g_s_p, &g_s_e, rep.probe).unwrap();
        assert!(
            (est.value - rep.measured).abs() < 1e-9,
            "split-recorded angle {} vs fresh {} at probe {}",
            rep.measured,
            est.value,
            rep.probe
        );
    }
}

#[test]
fn audit_flags_wrong_curvature_claims_on_analytic_spaces() {
    // the hyperbolic plane genuinely violates a flat lower bound
    let hyper = Space::build_hyperbolic(2.5);
    let p = hyper.parse_point("0:0").unwrap();
    let q = hyper.parse_point("1.6:0.2").unwrap();
    let r = hyper.parse_point("-0.5:1.4").unwrap();
    let tri = Triangle::from_vertices(&hyper, p, q, r).unwrap();
    let mut budgets = AuditBudgets::new(31);
    budgets.max_steps = 5;
    let out = globalization_audit(&hyper, flat(), &tri, &budgets).unwrap();
    assert_eq!(out.verdict, AuditVerdict::Violated);
    let term = out.trace.terminal.as_ref().unwrap();
    assert!(
        term.worst_deficit > out.tol,
        "terminal ball must expose the curvature shortfall"
    );
    let inv = out.invariants(&hyper);
    assert!(inv.step_decrease && inv.step_locality && inv.delta_sum);

    // and the plane violates a spherical lower bound
    let plane = Space::build_plane(4.0);
    let k1 = Curvature::new(1.0).unwrap();
    let p = plane.parse_point("0:0").unwrap();
    let q = plane.parse_point("1.4:0").unwrap();
    let r = plane.parse_point("0.4:1.1").unwrap();
    let tri = Triangle::from_vertices(&plane, p, q, r).unwrap();
    let mut budgets = AuditBudgets::new(32);
    budgets.max_steps = 5;
    let out = globalization_audit(&plane, k1, &tri, &budgets).unwrap();
    assert_eq!(out.verdict, AuditVerdict::Violated);
    assert!(out.trace.terminal.as_ref().unwrap().worst_deficit > out.tol);
}

/// Discrete cone mesh: polar-grid graph over the 3-pi cone with intrinsic
/// edge weights. The apex defect must survive discretization.
fn cone_mesh(theta: f64, rings: usize, spokes: usize, r_max: f64) -> Space {
    let mut points = Vec::new();
    let mut edges: Vec<(String, String, f64)> = Vec::new();
    let id = |i: usize, j: usize| format!("r{i:02}s{j:03}");
    points.push(("apex".to_string(), None));
    for i in 1..=rings {
        for j in 0..spokes {
            points.push((id(i, j), None));
        }
    }
    let coord = |i: usize, j: usize| -> (f64, f64) {
        (r_max * i as f64 / rings as f64, theta * j as f64 / spokes as f64)
    };
    let dist = |a: (f64, f64), b: (f64, f64)| -> f64 {
        let raw = (a.1 - b.1).rem_euclid(theta);
        let sep = raw.min(theta - raw);
        if sep < std::f64::consts::PI {
            (a.0 * a.0 + b.0 * b.0 - 2.0 * a.0 * b.0 * sep.cos()).sqrt()
        } else {
            a.0 + b.0
        }
    };
    for j in 0..spokes {
        edges.push(("apex".to_string(), id(1, j), coord(1, j).0));
        for i in 1..=rings {
            let jj = (j + 1) % spokes;
            edges.push((id(i, j), id(i, jj), dist(coord(i, j), coord(i, jj))));
            if i < rings {
                edges.push((id(i, j), id(i + 1, j), dist(coord(i, j), coord(i + 1, j))));
                let jj = (j + 1) % spokes;
                edges.push((id(i, j), id(i + 1, jj), dist(coord(i, j), coord(i + 1, jj))));
                let jp = (j + spokes - 1) % spokes;
                edges.push((id(i, j), id(i + 1, jp), dist(coord(i, j), coord(i + 1, jp))));
            }
        }
    }
    let input = toposcope::GraphInput {
        points,
        edges,
    };
    Space::build_graph(input).unwrap()
}

#[test]
fn discrete_cone_mesh_detects_the_apex_defect() {
    let theta = 3.0 * PI;
    let spokes = 224;
    let space = cone_mesh(theta, 28, spokes, 1.4);
    let k = flat();
    let tol = default_badness_tol(&space);
    // the analog of the apex-crossing seed triangle, snapped to the grid
    let p = space.parse_point("r20s000").unwrap();
    let r1 = space
        .parse_point(&format!("r10s{:03}", (spokes as f64 * 0.95 / 3.0).round() as usize))
        .unwrap();
    let r2 = space
        .parse_point(&format!("r10s{:03}", (spokes as f64 * 2.05 / 3.0).round() as usize))
        .unwrap();
    let tri = Triangle::from_vertices(&space, p, r1, r2).unwrap();
    let cert = badness(&space, k, &tri, Vertex::Q, tol)
        .unwrap()
        .expect("apex defect must survive discretization");
    assert!(cert.deficit > tol, "deficit {} at tol {tol}", cert.deficit);

    // ball checks: bad around the apex, good away from it
    let apex_ball = local_check(&space, k, space.parse_point("apex").unwrap(), 0.6, 220, tol, 5)
        .unwrap();
    assert!(!apex_ball.is_good(), "apex ball must expose the defect");
    let far = space.parse_point("r26s000").unwrap();
    let far_ball = local_check(&space, k, far, 2.5 * space.h(), 220, tol, 5).unwrap();
    assert!(
        far_ball.is_good(),
        "flat region flagged with deficit {}",
        far_ball.worst_deficit()
    );

    // localization drives the split point into the apex region
    let split_tri = SplitTriangle::new(&space, p, r1, r2).unwrap();
    let loc = localize(&space, k, &split_tri, 8.0 * space.h(), 64, 64, tol).unwrap();
    let d_apex = space.distance(loc.s_bar, space.parse_point("apex").unwrap()).unwrap();
    assert!(
        d_apex <= 5.0 * space.h(),
        "discrete localization ended {d_apex} from the apex (h = {})",
        space.h()
    );
}
