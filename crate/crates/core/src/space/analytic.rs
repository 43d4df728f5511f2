//! Closed-form backends: the Euclidean plane, the round sphere and the
//! hyperbolic plane (curvature -1, hyperboloid chart). Distances and
//! geodesic parameterizations are exact; `eta = 0`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{mix_seed, point_salt, GeodesicPolyline, PointData, PointRef};

pub(super) struct PlaneSpace {
    pub extent: f64,
}

impl PlaneSpace {
    fn xy(d: PointData) -> (f64, f64) {
        match d {
            PointData::Plane { x, y } => (x, y),
            _ => unreachable!("plane point expected"),
        }
    }

    pub(super) fn distance(&self, a: PointData, b: PointData) -> f64 {
        let (ax, ay) = Self::xy(a);
        let (bx, by) = Self::xy(b);
        (ax - bx).hypot(ay - by)
    }

    pub(super) fn geodesic(&self, space: u64, x: PointRef, y: PointRef) -> GeodesicPolyline {
        GeodesicPolyline::two(space, x, y, self.distance(x.data, y.data))
    }

    pub(super) fn point_along(&self, g: &GeodesicPolyline, t: f64) -> PointData {
        if g.total == 0.0 {
            return g.points[0].data;
        }
        let (ax, ay) = Self::xy(g.points[0].data);
        let (bx, by) = Self::xy(g.points[g.points.len() - 1].data);
        let s = t / g.total;
        PointData::Plane {
            x: ax + (bx - ax) * s,
            y: ay + (by - ay) * s,
        }
    }

    pub(super) fn sample_in_ball(
        &self,
        space: u64,
        o: PointData,
        radius: f64,
        n: usize,
        seed: u64,
    ) -> Vec<PointRef> {
        let (ox, oy) = Self::xy(o);
        let salt = point_salt(PointRef { space, data: o }) ^ radius.to_bits();
        let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, salt));
        (0..n)
            .map(|_| {
                let r = radius * rng.gen::<f64>().sqrt();
                let phi = rng.gen::<f64>() * std::f64::consts::TAU;
                PointRef {
                    space,
                    data: PointData::Plane {
                        x: ox + r * phi.cos(),
                        y: oy + r * phi.sin(),
                    },
                }
            })
            .collect()
    }

    pub(super) fn sample_points(&self, space: u64, n: usize, seed: u64) -> Vec<PointRef> {
        let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, 0x706c616eu64));
        (0..n)
            .map(|_| PointRef {
                space,
                data: PointData::Plane {
                    x: (rng.gen::<f64>() * 2.0 - 1.0) * self.extent,
                    y: (rng.gen::<f64>() * 2.0 - 1.0) * self.extent,
                },
            })
            .collect()
    }
}

pub(super) struct SphereSpace {
    pub radius: f64,
}

impl SphereSpace {
    fn xyz(d: PointData) -> [f64; 3] {
        match d {
            PointData::Sphere { x, y, z } => [x, y, z],
            _ => unreachable!("sphere point expected"),
        }
    }

    fn scale_to_sphere(&self, v: [f64; 3]) -> Option<PointData> {
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n == 0.0 || !n.is_finite() {
            return None;
        }
        let s = self.radius / n;
        Some(PointData::Sphere {
            x: v[0] * s,
            y: v[1] * s,
            z: v[2] * s,
        })
    }

    /// Accepts `[colat, lon]` or ambient `[x, y, z]` (scaled onto the sphere).
    pub(super) fn parse_coords(&self, v: &[f64]) -> Option<PointData> {
        match v {
            [colat, lon] => {
                let r = self.radius;
                Some(PointData::Sphere {
                    x: r * colat.sin() * lon.cos(),
                    y: r * colat.sin() * lon.sin(),
                    z: r * colat.cos(),
                })
            }
            [x, y, z] => self.scale_to_sphere([*x, *y, *z]),
            _ => None,
        }
    }

    pub(super) fn distance(&self, a: PointData, b: PointData) -> f64 {
        let u = Self::xyz(a);
        let v = Self::xyz(b);
        let dot = u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
        let cx = u[1] * v[2] - u[2] * v[1];
        let cy = u[2] * v[0] - u[0] * v[2];
        let cz = u[0] * v[1] - u[1] * v[0];
        let cross = (cx * cx + cy * cy + cz * cz).sqrt();
        self.radius * cross.atan2(dot)
    }

    pub(super) fn geodesic(&self, space: u64, x: PointRef, y: PointRef) -> GeodesicPolyline {
        GeodesicPolyline::two(space, x, y, self.distance(x.data, y.data))
    }

    /// Unit tangent at `u` pointing toward `v`; for antipodal or coincident
    /// pairs a deterministic perpendicular.
    fn tangent_toward(&self, u: [f64; 3], v: [f64; 3]) -> [f64; 3] {
        let r = self.radius;
        let (uu, vv) = (
            [u[0] / r, u[1] / r, u[2] / r],
            [v[0] / r, v[1] / r, v[2] / r],
        );
        let dot = uu[0] * vv[0] + uu[1] * vv[1] + uu[2] * vv[2];
        let raw = [
            vv[0] - uu[0] * dot,
            vv[1] - uu[1] * dot,
            vv[2] - uu[2] * dot,
        ];
        let n = (raw[0] * raw[0] + raw[1] * raw[1] + raw[2] * raw[2]).sqrt();
        if n < 1e-12 {
            return perp_unit(uu);
        }
        [raw[0] / n, raw[1] / n, raw[2] / n]
    }

    fn walk(&self, from: [f64; 3], dir: [f64; 3], t: f64) -> PointData {
        let r = self.radius;
        let (c, s) = ((t / r).cos(), (t / r).sin());
        PointData::Sphere {
            x: from[0] * c + r * dir[0] * s,
            y: from[1] * c + r * dir[1] * s,
            z: from[2] * c + r * dir[2] * s,
        }
    }

    pub(super) fn point_along(&self, g: &GeodesicPolyline, t: f64) -> PointData {
        if g.total == 0.0 {
            return g.points[0].data;
        }
        let u = Self::xyz(g.points[0].data);
        let v = Self::xyz(g.points[g.points.len() - 1].data);
        self.walk(u, self.tangent_toward(u, v), t)
    }

    pub(super) fn alternative_geodesics(
        &self,
        space: u64,
        x: PointRef,
        y: PointRef,
        max_n: usize,
    ) -> Vec<GeodesicPolyline> {
        let d = self.distance(x.data, y.data);
        let mut out = vec![GeodesicPolyline::two(space, x, y, d)];
        // antipodal pair: meridians through two opposite tangents
        if (d - std::f64::consts::PI * self.radius).abs() < 1e-12 * self.radius && max_n > 1 {
            let u = Self::xyz(x.data);
            let e = perp_unit([u[0] / self.radius, u[1] / self.radius, u[2] / self.radius]);
            let mid1 = PointRef {
                space,
                data: self.walk(u, e, d / 2.0),
            };
            let mid2 = PointRef {
                space,
                data: self.walk(u, [-e[0], -e[1], -e[2]], d / 2.0),
            };
            for mid in [mid1, mid2] {
                out.push(GeodesicPolyline {
                    space,
                    points: vec![x, mid, y],
                    cum: vec![0.0, d / 2.0, d],
                    total: d,
                });
                if out.len() >= max_n {
                    break;
                }
            }
        }
        out.truncate(max_n.max(1));
        out
    }

    pub(super) fn sample_in_ball(
        &self,
        space: u64,
        o: PointData,
        radius: f64,
        n: usize,
        seed: u64,
    ) -> Vec<PointRef> {
        let u = Self::xyz(o);
        let r = self.radius;
        let e1 = perp_unit([u[0] / r, u[1] / r, u[2] / r]);
        let un = [u[0] / r, u[1] / r, u[2] / r];
        let e2 = [
            un[1] * e1[2] - un[2] * e1[1],
            un[2] * e1[0] - un[0] * e1[2],
            un[0] * e1[1] - un[1] * e1[0],
        ];
        let salt = point_salt(PointRef { space, data: o }) ^ radius.to_bits();
        let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, salt));
        let cap = radius.min(std::f64::consts::PI * r);
        (0..n)
            .map(|_| {
                let t = cap * rng.gen::<f64>();
                let phi = rng.gen::<f64>() * std::f64::consts::TAU;
                let dir = [
                    e1[0] * phi.cos() + e2[0] * phi.sin(),
                    e1[1] * phi.cos() + e2[1] * phi.sin(),
                    e1[2] * phi.cos() + e2[2] * phi.sin(),
                ];
                PointRef {
                    space,
                    data: self.walk(u, dir, t),
                }
            })
            .collect()
    }

    pub(super) fn sample_points(&self, space: u64, n: usize, seed: u64) -> Vec<PointRef> {
        let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, 0x73706865u64));
        (0..n)
            .map(|_| {
                // normal deviates give the uniform sphere distribution
                let mut v = [0.0f64; 3];
                loop {
                    for c in &mut v {
                        // Box-Muller from two uniforms
                        let (u1, u2): (f64, f64) = (rng.gen(), rng.gen());
                        *c = (-2.0 * u1.max(1e-300).ln()).sqrt()
                            * (std::f64::consts::TAU * u2).cos();
                    }
                    if let Some(p) = self.scale_to_sphere(v) {
                        return PointRef { space, data: p };
                    }
                }
            })
            .collect()
    }
}

fn perp_unit(u: [f64; 3]) -> [f64; 3] {
    let (x, y, z) = (u[0], u[1], u[2]);
    let raw = if x.abs() <= y.abs() && x.abs() <= z.abs() {
        [0.0, -z, y]
    } else if y.abs() <= z.abs() {
        [-z, 0.0, x]
    } else {
        [-y, x, 0.0]
    };
    let n = (raw[0] * raw[0] + raw[1] * raw[1] + raw[2] * raw[2]).sqrt();
    [raw[0] / n, raw[1] / n, raw[2] / n]
}

/// Hyperbolic plane of curvature -1. Points live on the hyperboloid
/// z^2 - x^2 - y^2 = 1 with z > 0; only (x, y) is stored.
pub(super) struct HyperbolicSpace {
    pub extent: f64,
}

impl HyperbolicSpace {
    fn lift(d: PointData) -> [f64; 3] {
        match d {
            PointData::Hyperbolic { x, y } => [x, y, (1.0 + x * x + y * y).sqrt()],
            _ => unreachable!("hyperbolic point expected"),
        }
    }

    pub(super) fn distance(&self, a: PointData, b: PointData) -> f64 {
        let u = Self::lift(a);
        let v = Self::lift(b);
        let (dx, dy, dz) = (u[0] - v[0], u[1] - v[1], u[2] - v[2]);
        let t = ((dx * dx + dy * dy - dz * dz) / 2.0).max(0.0);
        (t + (t * (t + 2.0)).sqrt()).ln_1p()
    }

    pub(super) fn geodesic(&self, space: u64, x: PointRef, y: PointRef) -> GeodesicPolyline {
        GeodesicPolyline::two(space, x, y, self.distance(x.data, y.data))
    }

    pub(super) fn point_along(&self, g: &GeodesicPolyline, t: f64) -> PointData {
        if g.total == 0.0 {
            return g.points[0].data;
        }
        let u = Self::lift(g.points[0].data);
        let v = Self::lift(g.points[g.points.len() - 1].data);
        let theta = g.total;
        let sh = theta.sinh();
        let e = [
            (v[0] - u[0] * theta.cosh()) / sh,
            (v[1] - u[1] * theta.cosh()) / sh,
        ];
        PointData::Hyperbolic {
            x: u[0] * t.cosh() + e[0] * t.sinh(),
            y: u[1] * t.cosh() + e[1] * t.sinh(),
        }
    }

    /// Minkowski-orthonormal tangent basis at `o`.
    fn tangent_basis(o: [f64; 3]) -> ([f64; 3], [f64; 3]) {
        let mink = |a: [f64; 3], b: [f64; 3]| a[2] * b[2] - a[0] * b[0] - a[1] * b[1];
        let project = |w: [f64; 3], o: [f64; 3]| {
            let c = mink(w, o);
            [w[0] - c * o[0], w[1] - c * o[1], w[2] - c * o[2]]
        };
        let norm = |w: [f64; 3]| {
            let n = (-mink(w, w)).sqrt();
            [w[0] / n, w[1] / n, w[2] / n]
        };
        let e1 = norm(project([1.0, 0.0, 0.0], o));
        // spacelike Gram-Schmidt: B(e1, e1) = -1 flips the usual sign
        let raw2 = project([0.0, 1.0, 0.0], o);
        let c = mink(raw2, e1);
        let e2 = norm([
            raw2[0] + c * e1[0],
            raw2[1] + c * e1[1],
            raw2[2] + c * e1[2],
        ]);
        (e1, e2)
    }

    fn walk(o: [f64; 3], dir: [f64; 3], t: f64) -> PointData {
        PointData::Hyperbolic {
            x: o[0] * t.cosh() + dir[0] * t.sinh(),
            y: o[1] * t.cosh() + dir[1] * t.sinh(),
        }
    }

    pub(super) fn sample_in_ball(
        &self,
        space: u64,
        o: PointData,
        radius: f64,
        n: usize,
        seed: u64,
    ) -> Vec<PointRef> {
        let lifted = Self::lift(o);
        let (e1, e2) = Self::tangent_basis(lifted);
        let salt = point_salt(PointRef { space, data: o }) ^ radius.to_bits();
        let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, salt));
        (0..n)
            .map(|_| {
                let t = radius * rng.gen::<f64>();
                let phi = rng.gen::<f64>() * std::f64::consts::TAU;
                let dir = [
                    e1[0] * phi.cos() + e2[0] * phi.sin(),
                    e1[1] * phi.cos() + e2[1] * phi.sin(),
                    e1[2] * phi.cos() + e2[2] * phi.sin(),
                ];
                PointRef {
                    space,
                    data: Self::walk(lifted, dir, t),
                }
            })
            .collect()
    }

    pub(super) fn sample_points(&self, space: u64, n: usize, seed: u64) -> Vec<PointRef> {
        let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, 0x68797065u64));
        let origin = [0.0, 0.0, 1.0];
        let (e1, e2) = Self::tangent_basis(origin);
        (0..n)
            .map(|_| {
                let t = self.extent * rng.gen::<f64>();
                let phi = rng.gen::<f64>() * std::f64::consts::TAU;
                let dir = [
                    e1[0] * phi.cos() + e2[0] * phi.sin(),
                    e1[1] * phi.cos() + e2[1] * phi.sin(),
                    e1[2] * phi.cos() + e2[2] * phi.sin(),
                ];
                PointRef {
                    space,
                    data: Self::walk(origin, dir, t),
                }
            })
            .collect()
    }
}
