//! Shared fixtures for the benchmark suite.

use toposcope::{Curvature, SideTriple, Space};

/// Deterministic batch of admissible side triples, realizable for every
/// curvature in [-1, 1].
pub fn triple_batch(n: usize) -> Vec<SideTriple> {
    let k1 = Curvature::new(1.0).unwrap();
    let mut out = Vec::with_capacity(n);
    let mut x = 0.123456789_f64;
    let mut next = || {
        // xorshift-style scramble into (0, 1)
        x = (x * 9301.0 + 49297.0) % 233280.0;
        x / 233280.0
    };
    while out.len() < n {
        let a = 0.05 + 1.3 * next();
        let b = 0.05 + 1.3 * next();
        let gamma = 0.05 + (std::f64::consts::PI - 0.1) * next();
        if let Ok(c) = toposcope::side_from_angle(k1, a, b, gamma) {
            let t = SideTriple { a, b: c, c: b };
            if t.perimeter() < 2.0 * std::f64::consts::PI - 0.2 {
                out.push(t);
            }
        }
    }
    out
}

pub fn mesh_sphere() -> Space {
    Space::build_sphere_mesh(1.0, 4).unwrap()
}

pub fn cone() -> Space {
    Space::build_cone(3.0 * std::f64::consts::PI, 0.02).unwrap()
}
