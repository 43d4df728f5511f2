//! Backend behavior against independent oracles: quadratic-time shortest
//! paths for graphs, sector unrolling for the cone, closed-form chart
//! distances for the analytic spaces.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use toposcope::{GeomError, GraphInput, Space};

fn close(a: f64, b: f64, tol: f64) {
    assert!(
        (a - b).abs() <= tol,
        "left={a:.15} right={b:.15} tol={tol:e}"
    );
}

// ---- graph backend ----

#[test]
fn triangle_graph_pairwise_distances() {
    let space = Space::build_graph(GraphInput::from_edges(&[
        ("a", "b", 3.0),
        ("b", "c", 4.0),
        ("a", "c", 5.0),
    ]))
    .unwrap();
    let a = space.parse_point("a").unwrap();
    let b = space.parse_point("b").unwrap();
    let c = space.parse_point("c").unwrap();
    close(space.distance(a, b).unwrap(), 3.0, 0.0);
    close(space.distance(b, c).unwrap(), 4.0, 0.0);
    close(space.distance(a, c).unwrap(), 5.0, 0.0);
    close(space.distance(a, a).unwrap(), 0.0, 0.0);
}

/// Independent quadratic-time single-source shortest paths (Bellman-Ford).
fn oracle_sssp(n: usize, edges: &[(usize, usize, f64)], src: usize) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; n];
    dist[src] = 0.0;
    for _ in 0..n {
        let mut changed = false;
        for &(u, v, w) in edges {
            if dist[u] + w < dist[v] {
                dist[v] = dist[u] + w;
                changed = true;
            }
            if dist[v] + w < dist[u] {
                dist[u] = dist[v] + w;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    dist
}

#[test]
fn graph_distances_match_quadratic_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for trial in 0..5 {
        let n = 40 + 30 * trial;
        let mut edges = Vec::new();
        // random connected graph: a spine plus random chords
        for i in 1..n {
            let j = rng.gen_range(0..i);
            edges.push((i, j, 0.1 + rng.gen::<f64>()));
        }
        for _ in 0..(2 * n) {
            let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
            if i != j {
                edges.push((i, j, 0.1 + rng.gen::<f64>()));
            }
        }
        let named: Vec<(String, String, f64)> = edges
            .iter()
            .map(|&(u, v, w)| (format!("v{u:03}"), format!("v{v:03}"), w))
            .collect();
        let input = GraphInput {
            points: (0..n).map(|i| (format!("v{i:03}"), None)).collect(),
            edges: named,
        };
        let space = Space::build_graph(input).unwrap();
        let src = rng.gen_range(0..n);
        // dedupe to min weight for the oracle, matching the build contract
        let mut best = std::collections::HashMap::new();
        for &(u, v, w) in &edges {
            let key = (u.min(v), u.max(v));
            best.entry(key)
                .and_modify(|c: &mut f64| *c = c.min(w))
                .or_insert(w);
        }
        let flat: Vec<(usize, usize, f64)> =
            best.into_iter().map(|((u, v), w)| (u, v, w)).collect();
        let dist = oracle_sssp(n, &flat, src);
        let src_ref = space.parse_point(&format!("v{src:03}")).unwrap();
        for j in 0..n {
            let p = space.parse_point(&format!("v{j:03}")).unwrap();
            close(space.distance(src_ref, p).unwrap(), dist[j], 1e-12);
        }
    }
}

#[test]
fn graph_geodesic_cum_matches_distances() {
    let space = Space::build_graph(GraphInput::from_edges(&[
        ("a", "b", 1.0),
        ("b", "c", 1.0),
        ("c", "d", 1.5),
        ("a", "d", 4.0),
    ]))
    .unwrap();
    let a = space.parse_point("a").unwrap();
    let d = space.parse_point("d").unwrap();
    let g = space.geodesic(a, d).unwrap();
    close(g.total, 3.5, 1e-15);
    assert_eq!(g.points.len(), 4);
    for (i, &c) in g.cum.iter().enumerate() {
        close(space.distance(a, g.points[i]).unwrap(), c, 1e-15);
    }
}

#[test]
fn graph_tie_break_prefers_smaller_id() {
    // two equal-length routes a-b-d and a-c-d; the tie-break must pick b
    let space = Space::build_graph(GraphInput::from_edges(&[
        ("a", "b", 1.0),
        ("b", "d", 1.0),
        ("a", "c", 1.0),
        ("c", "d", 1.0),
    ]))
    .unwrap();
    let a = space.parse_point("a").unwrap();
    let d = space.parse_point("d").unwrap();
    let g = space.geodesic(a, d).unwrap();
    let labels: Vec<String> = g.points.iter().map(|p| space.label(*p)).collect();
    assert_eq!(labels, vec!["a", "b", "d"]);
    // and the alternative enumeration sees both routes
    let alts = space.alternative_geodesics(a, d, 8).unwrap();
    assert_eq!(alts.len(), 2);
}

#[test]
fn graph_determinism_identical_polylines() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let n = 60;
    let mut edges = Vec::new();
    for i in 1..n {
        let j = rng.gen_range(0..i);
        edges.push((format!("n{i}"), format!("n{j}"), 1.0 + rng.gen::<f64>()));
    }
    let input = GraphInput {
        points: (0..n).map(|i| (format!("n{i}"), None)).collect(),
        edges,
    };
    let s1 = Space::build_graph(input.clone()).unwrap();
    let s2 = Space::build_graph(input).unwrap();
    let (a1, b1) = (
        s1.parse_point("n3").unwrap(),
        s1.parse_point("n57").unwrap(),
    );
    let (a2, b2) = (
        s2.parse_point("n3").unwrap(),
        s2.parse_point("n57").unwrap(),
    );
    let g1 = s1.geodesic(a1, b1).unwrap();
    let g2 = s2.geodesic(a2, b2).unwrap();
    let l1: Vec<String> = g1.points.iter().map(|p| s1.label(*p)).collect();
    let l2: Vec<String> = g2.points.iter().map(|p| s2.label(*p)).collect();
    assert_eq!(l1, l2);
    assert_eq!(g1.cum, g2.cum);
}

#[test]
fn graph_json_schema() {
    let good =
        r#"{"points":[{"id":"a"},{"id":"b","label":"Bee"}],"edges":[{"u":"a","v":"b","w":2.0}]}"#;
    let space = Space::build_graph_from_json(good).unwrap();
    let a = space.parse_point("a").unwrap();
    let b = space.parse_point("b").unwrap();
    close(space.distance(a, b).unwrap(), 2.0, 0.0);

    // unknown keys rejected
    let unknown = r#"{"points":[{"id":"a","extra":1}],"edges":[]}"#;
    assert!(matches!(
        Space::build_graph_from_json(unknown),
        Err(GeomError::MalformedInput(_))
    ));
    let unknown_top = r#"{"points":[{"id":"a"}],"edges":[],"meta":{}}"#;
    assert!(matches!(
        Space::build_graph_from_json(unknown_top),
        Err(GeomError::MalformedInput(_))
    ));

    // nonpositive weights rejected
    let nonpos = r#"{"points":[{"id":"a"},{"id":"b"}],"edges":[{"u":"a","v":"b","w":0.0}]}"#;
    assert!(matches!(
        Space::build_graph_from_json(nonpos),
        Err(GeomError::NonPositiveWeight(_))
    ));

    // duplicate edges keep the minimum weight
    let dup = r#"{"points":[{"id":"a"},{"id":"b"}],"edges":[{"u":"a","v":"b","w":2.0},{"u":"b","v":"a","w":1.0}]}"#;
    let space = Space::build_graph_from_json(dup).unwrap();
    let a = space.parse_point("a").unwrap();
    let b = space.parse_point("b").unwrap();
    close(space.distance(a, b).unwrap(), 1.0, 0.0);
}

#[test]
fn graph_disconnected_errors() {
    let space = Space::build_graph(GraphInput {
        points: vec![("a".into(), None), ("b".into(), None), ("c".into(), None)],
        edges: vec![("a".into(), "b".into(), 1.0)],
    })
    .unwrap();
    let a = space.parse_point("a").unwrap();
    let c = space.parse_point("c").unwrap();
    assert!(matches!(space.distance(a, c), Err(GeomError::Disconnected)));
    assert!(matches!(space.geodesic(a, c), Err(GeomError::Disconnected)));
}

#[test]
fn foreign_points_rejected() {
    let s1 = Space::build_plane(1.0);
    let s2 = Space::build_plane(1.0);
    let p1 = s1.parse_point("0:0").unwrap();
    let p2 = s2.parse_point("1:1").unwrap();
    assert!(matches!(s1.distance(p1, p2), Err(GeomError::UnknownPoint)));
}

// ---- analytic plane ----

#[test]
fn plane_geodesic_is_straight_segment() {
    let space = Space::build_plane(10.0);
    let a = space.parse_point("0:0").unwrap();
    let b = space.parse_point("3:4").unwrap();
    let g = space.geodesic(a, b).unwrap();
    close(g.total, 5.0, 0.0);
    let mid = space.point_at(&g, 2.5).unwrap();
    close(space.distance(a, mid).unwrap(), 2.5, 1e-12);
    close(space.distance(mid, b).unwrap(), 2.5, 1e-12);
}

#[test]
fn point_at_endpoints() {
    let space = Space::build_plane(10.0);
    let a = space.parse_point("1:2").unwrap();
    let b = space.parse_point("4:6").unwrap();
    let g = space.geodesic(a, b).unwrap();
    assert_eq!(space.point_at(&g, 0.0).unwrap(), a);
    assert_eq!(space.point_at(&g, g.total).unwrap(), b);
    assert!(space.point_at(&g, g.total + 1.0).is_err());
    // identical endpoints give a single-point polyline
    let gg = space.geodesic(a, a).unwrap();
    assert_eq!(gg.total, 0.0);
    assert_eq!(gg.points.len(), 1);
}

// ---- analytic sphere ----

#[test]
fn sphere_pole_distance() {
    let space = Space::build_sphere_analytic(1.0).unwrap();
    let n = space.parse_point("0:0").unwrap(); // colat 0
    let s = space
        .parse_point(&format!("{}:0", std::f64::consts::PI))
        .unwrap();
    close(space.distance(n, s).unwrap(), std::f64::consts::PI, 1e-15);
}

#[test]
fn sphere_geodesic_interpolation_matches_oracle() {
    // oracle: rotate in the plane spanned by the endpoints
    let space = Space::build_sphere_analytic(2.0).unwrap();
    let a = space.parse_point("1.2:0.3").unwrap();
    let b = space.parse_point("0.7:2.1").unwrap();
    let g = space.geodesic(a, b).unwrap();
    let mid = space.point_at(&g, g.total / 2.0).unwrap();
    close(space.distance(a, mid).unwrap(), g.total / 2.0, 1e-12);
    close(space.distance(mid, b).unwrap(), g.total / 2.0, 1e-12);
}

#[test]
fn sphere_antipodal_alternatives() {
    let space = Space::build_sphere_analytic(1.0).unwrap();
    let n = space.parse_point("0:0").unwrap();
    let s = space
        .parse_point(&format!("{}:0", std::f64::consts::PI))
        .unwrap();
    let alts = space.alternative_geodesics(n, s, 4).unwrap();
    assert!(alts.len() >= 3);
    for g in &alts {
        close(g.total, std::f64::consts::PI, 1e-12);
    }
}

// ---- hyperbolic plane ----

#[test]
fn hyperbolic_distance_against_polar_law_of_cosines() {
    // oracle: cosh d = cosh r1 cosh r2 - sinh r1 sinh r2 cos(dphi) for
    // points given in polar coordinates around the origin
    let space = Space::build_hyperbolic(3.0);
    let polar = |r: f64, phi: f64| {
        let x = r.sinh() * phi.cos();
        let y = r.sinh() * phi.sin();
        format!("{x}:{y}")
    };
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for _ in 0..200 {
        let (r1, p1) = (
            2.0 * rng.gen::<f64>(),
            std::f64::consts::TAU * rng.gen::<f64>(),
        );
        let (r2, p2) = (
            2.0 * rng.gen::<f64>(),
            std::f64::consts::TAU * rng.gen::<f64>(),
        );
        let a = space.parse_point(&polar(r1, p1)).unwrap();
        let b = space.parse_point(&polar(r2, p2)).unwrap();
        let expected = (r1.cosh() * r2.cosh() - r1.sinh() * r2.sinh() * (p1 - p2).cos()).acosh();
        close(space.distance(a, b).unwrap(), expected, 1e-10);
    }
}

#[test]
fn hyperbolic_midpoint_symmetry() {
    let space = Space::build_hyperbolic(3.0);
    let a = space.parse_point("0.5:0.2").unwrap();
    let b = space.parse_point("-1.1:0.9").unwrap();
    let g = space.geodesic(a, b).unwrap();
    let mid = space.point_at(&g, g.total / 2.0).unwrap();
    close(space.distance(a, mid).unwrap(), g.total / 2.0, 1e-12);
    close(space.distance(mid, b).unwrap(), g.total / 2.0, 1e-12);
}

// ---- flat cone ----

/// Unrolling oracle: the minimum over the two ways around of the planar
/// chord, against the through-apex path.
fn cone_oracle(theta: f64, r1: f64, p1: f64, r2: f64, p2: f64) -> f64 {
    let mut d = r1 + r2;
    for dphi in [(p1 - p2).rem_euclid(theta), (p2 - p1).rem_euclid(theta)] {
        if dphi < std::f64::consts::PI {
            let chord = (r1 * r1 + r2 * r2 - 2.0 * r1 * r2 * dphi.cos()).sqrt();
            d = d.min(chord);
        }
    }
    d
}

#[test]
fn cone_full_angle_is_planar() {
    let theta = 2.0 * std::f64::consts::PI;
    let space = Space::build_cone(theta, 0.01).unwrap();
    let plane_dist = |r1: f64, p1: f64, r2: f64, p2: f64| {
        let (x1, y1) = (r1 * p1.cos(), r1 * p1.sin());
        let (x2, y2) = (r2 * p2.cos(), r2 * p2.sin());
        (x1 - x2).hypot(y1 - y2)
    };
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..500 {
        let (r1, p1) = (2.0 * rng.gen::<f64>(), theta * rng.gen::<f64>());
        let (r2, p2) = (2.0 * rng.gen::<f64>(), theta * rng.gen::<f64>());
        let a = space.parse_point(&format!("{r1}:{p1}")).unwrap();
        let b = space.parse_point(&format!("{r2}:{p2}")).unwrap();
        close(
            space.distance(a, b).unwrap(),
            plane_dist(r1, p1, r2, p2),
            1e-9,
        );
    }
}

#[test]
fn cone_distances_match_unrolling_oracle() {
    for theta in [
        1.5,
        std::f64::consts::PI,
        2.5 * std::f64::consts::PI,
        3.0 * std::f64::consts::PI,
    ] {
        let space = Space::build_cone(theta, 0.01).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..500 {
            let (r1, p1) = (2.0 * rng.gen::<f64>(), theta * rng.gen::<f64>());
            let (r2, p2) = (2.0 * rng.gen::<f64>(), theta * rng.gen::<f64>());
            let a = space.parse_point(&format!("{r1}:{p1}")).unwrap();
            let b = space.parse_point(&format!("{r2}:{p2}")).unwrap();
            close(
                space.distance(a, b).unwrap(),
                cone_oracle(theta, r1, p1, r2, p2),
                1e-9,
            );
        }
    }
}

#[test]
fn cone_through_apex_geodesic() {
    let theta = 3.0 * std::f64::consts::PI;
    let space = Space::build_cone(theta, 0.01).unwrap();
    let a = space.parse_point("0.5:0").unwrap();
    let b = space
        .parse_point(&format!("0.7:{}", 1.2 * std::f64::consts::PI))
        .unwrap();
    let g = space.geodesic(a, b).unwrap();
    close(g.total, 1.2, 1e-15);
    assert_eq!(g.points.len(), 3);
    let apex = space.cone_apex().unwrap();
    assert_eq!(g.points[1], apex);
    // arclength parameterization walks in through the apex and back out
    let x = space.point_at(&g, 0.2).unwrap();
    close(space.distance(a, x).unwrap(), 0.2, 1e-12);
    let y = space.point_at(&g, 0.9).unwrap();
    close(space.distance(y, b).unwrap(), 0.3, 1e-12);
    close(space.distance(x, y).unwrap(), 0.7, 1e-12);
}

#[test]
fn cone_avoids_apex_when_unrolled_angle_small() {
    // endpoints whose unrolled angle is below a straight angle: the path is
    // the chord of the unrolled sector and misses the apex
    let theta = 3.0 * std::f64::consts::PI;
    let space = Space::build_cone(theta, 0.01).unwrap();
    let a = space.parse_point("1.0:0").unwrap();
    let b = space.parse_point("1.0:2.0").unwrap();
    let g = space.geodesic(a, b).unwrap();
    let expected = (2.0 - 2.0 * (2.0f64).cos()).sqrt();
    close(g.total, expected, 1e-12);
    assert_eq!(g.points.len(), 2);
    // interior points keep a positive distance from the apex
    let apex = space.cone_apex().unwrap();
    let mid = space.point_at(&g, g.total / 2.0).unwrap();
    assert!(space.distance(mid, apex).unwrap() > 0.5);
    close(space.distance(a, mid).unwrap(), g.total / 2.0, 1e-12);
}

#[test]
fn geodesic_consistency_all_backends() {
    let spaces = vec![
        Space::build_plane(5.0),
        Space::build_sphere_analytic(1.3).unwrap(),
        Space::build_hyperbolic(2.0),
        Space::build_cone(3.0 * std::f64::consts::PI, 0.01).unwrap(),
    ];
    for space in &spaces {
        let pts = space.sample_points(20, 77);
        for pair in pts.chunks_exact(2) {
            let g = match space.geodesic(pair[0], pair[1]) {
                Ok(g) if g.total > 1e-9 => g,
                _ => continue,
            };
            let (s, t) = (0.25 * g.total, 0.8 * g.total);
            let x = space.point_at(&g, s).unwrap();
            let y = space.point_at(&g, t).unwrap();
            let d = space.distance(x, y).unwrap();
            close(d, t - s, 1e-9);
        }
    }
}

#[test]
fn sample_in_ball_stays_in_ball_and_extends() {
    let spaces = vec![
        Space::build_plane(5.0),
        Space::build_sphere_analytic(1.0).unwrap(),
        Space::build_hyperbolic(2.0),
        Space::build_cone(3.0 * std::f64::consts::PI, 0.01).unwrap(),
    ];
    for space in &spaces {
        let o = space.sample_points(1, 5)[0];
        let r = 0.4;
        let small = space.sample_in_ball(o, r, 16, 9).unwrap();
        let big = space.sample_in_ball(o, r, 48, 9).unwrap();
        assert_eq!(&big[..small.len()], &small[..]);
        for p in &big {
            assert!(space.distance(o, *p).unwrap() <= r + 1e-12);
        }
    }
}

#[test]
fn mesh_icosphere_tracks_great_circle_distances() {
    let mesh = Space::build_sphere_mesh(1.0, 4).unwrap();
    assert!(mesh.descriptor().params.contains("2562"));
    let h = mesh.h();
    assert!(h > 0.0 && h < 0.1, "unexpected mesh resolution {h}");
    // graph distances bound the true metric from above, within a few
    // percent for the third-ring neighbor graph
    let great_circle = |u: [f64; 3], v: [f64; 3]| {
        let dot = (u[0] * v[0] + u[1] * v[1] + u[2] * v[2]).clamp(-1.0, 1.0);
        dot.acos()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let mut worst_ratio: f64 = 1.0;
    for _ in 0..80 {
        let i = rng.gen_range(0..2562u32);
        let j = rng.gen_range(0..2562u32);
        let a = mesh.parse_point(&i.to_string()).unwrap();
        let b = mesh.parse_point(&j.to_string()).unwrap();
        let exact = great_circle(mesh.point_coords(a).unwrap(), mesh.point_coords(b).unwrap());
        if exact < 0.2 {
            continue;
        }
        let d_mesh = mesh.distance(a, b).unwrap();
        assert!(d_mesh >= exact - 1e-9, "graph distance below the metric");
        worst_ratio = worst_ratio.max(d_mesh / exact);
    }
    assert!(
        worst_ratio < 1.03,
        "mesh anisotropy too high: worst ratio {worst_ratio}"
    );
}

#[test]
fn parse_spec_grammar() {
    assert!(Space::parse_spec("plane").is_ok());
    assert!(Space::parse_spec("hyperbolic").is_ok());
    assert!(Space::parse_spec("sphere:R=1").is_ok());
    assert!(Space::parse_spec("sphere:R=1,mesh=2").is_ok());
    assert!(Space::parse_spec("cone:angle=9.42,res=0.02").is_ok());
    assert!(Space::parse_spec("cone:angle=9.42").is_ok());
    assert!(Space::parse_spec("sphere").is_err());
    assert!(Space::parse_spec("cone:res=0.1").is_err());
    assert!(Space::parse_spec("torus").is_err());
    assert!(Space::parse_spec("sphere:R=abc").is_err());
}
