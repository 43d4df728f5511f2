//! Flat cone of total angle `theta`: the intrinsic metric of a planar sector
//! with its boundary rays glued. Flat away from the apex; the apex carries a
//! curvature defect whenever `theta != 2 pi`.
//!
//! Distances come from sector unrolling: for angular separation below pi the
//! geodesic is the chord of the unrolled sector, otherwise it passes through
//! the apex with length `r1 + r2`. At separation exactly pi the two coincide;
//! the through-apex representation is the canonical choice.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{GeomError, Result};

use super::{mix_seed, point_salt, GeodesicPolyline, PointData, PointRef};

pub(super) struct ConeSpace {
    pub theta: f64,
    /// Radial extent used by whole-space sampling only.
    pub extent: f64,
}

impl ConeSpace {
    fn rp(d: PointData) -> (f64, f64) {
        match d {
            PointData::Cone { r, phi } => (r, phi),
            _ => unreachable!("cone point expected"),
        }
    }

    pub(super) fn make_point(&self, r: f64, phi: f64) -> PointData {
        if r == 0.0 {
            PointData::Cone { r: 0.0, phi: 0.0 }
        } else {
            PointData::Cone {
                r,
                phi: self.wrap(phi),
            }
        }
    }

    fn wrap(&self, phi: f64) -> f64 {
        let m = phi % self.theta;
        if m < 0.0 {
            m + self.theta
        } else {
            m
        }
    }

    /// Signed angular offset from `a` to `b` along the shorter way around;
    /// ties at half the total angle resolve to the positive direction.
    fn signed_sep(&self, phi_a: f64, phi_b: f64) -> f64 {
        let raw = self.wrap(phi_b - phi_a);
        if raw <= self.theta - raw {
            raw
        } else {
            raw - self.theta
        }
    }

    pub(super) fn distance(&self, a: PointData, b: PointData) -> f64 {
        let (ra, pa) = Self::rp(a);
        let (rb, pb) = Self::rp(b);
        if ra == 0.0 || rb == 0.0 {
            return ra + rb;
        }
        let sep = self.signed_sep(pa, pb).abs();
        if sep < std::f64::consts::PI {
            let c = (ra - rb).powi(2) + 4.0 * ra * rb * (0.5 * sep).sin().powi(2);
            c.sqrt()
        } else {
            ra + rb
        }
    }

    pub(super) fn geodesic(&self, space: u64, x: PointRef, y: PointRef) -> GeodesicPolyline {
        let (ra, pa) = Self::rp(x.data);
        let (rb, pb) = Self::rp(y.data);
        if ra == 0.0 || rb == 0.0 {
            return GeodesicPolyline::two(space, x, y, ra + rb);
        }
        let sep = self.signed_sep(pa, pb).abs();
        if sep < std::f64::consts::PI {
            GeodesicPolyline::two(space, x, y, self.distance(x.data, y.data))
        } else {
            let apex = PointRef {
                space,
                data: PointData::Cone { r: 0.0, phi: 0.0 },
            };
            GeodesicPolyline {
                space,
                points: vec![x, apex, y],
                cum: vec![0.0, ra, ra + rb],
                total: ra + rb,
            }
        }
    }

    /// Exact interpolation at arclength `t`: locate the polyline segment and
    /// unroll it. Segments with an apex endpoint are radial.
    pub(super) fn point_along(&self, g: &GeodesicPolyline, t: f64) -> PointData {
        if g.total == 0.0 {
            return g.points[0].data;
        }
        let mut i = 0;
        while i + 2 < g.points.len() && t > g.cum[i + 1] {
            i += 1;
        }
        let local = t - g.cum[i];
        let seg_len = g.cum[i + 1] - g.cum[i];
        let (ra, pa) = Self::rp(g.points[i].data);
        let (rb, pb) = Self::rp(g.points[i + 1].data);
        if ra == 0.0 {
            return self.make_point(local, pb);
        }
        if rb == 0.0 {
            return self.make_point(ra - local, pa);
        }
        let dphi = self.signed_sep(pa, pb);
        let (bx, by) = (rb * dphi.cos(), rb * dphi.sin());
        let s = local / seg_len;
        let (qx, qy) = (ra + (bx - ra) * s, by * s);
        let rho = qx.hypot(qy);
        if rho == 0.0 {
            return PointData::Cone { r: 0.0, phi: 0.0 };
        }
        let alpha = qy.atan2(qx);
        self.make_point(rho, pa + alpha)
    }

    pub(super) fn alternative_geodesics(
        &self,
        space: u64,
        x: PointRef,
        y: PointRef,
        max_n: usize,
    ) -> Vec<GeodesicPolyline> {
        let mut out = vec![self.geodesic(space, x, y)];
        let (ra, pa) = Self::rp(x.data);
        let (rb, pb) = Self::rp(y.data);
        if ra == 0.0 || rb == 0.0 || max_n < 2 {
            return out;
        }
        let raw = self.wrap(pb - pa);
        let other = self.theta - raw;
        // exact two-sided tie: the chord the canonical choice skipped
        if (raw - other).abs() <= 1e-12 && raw.min(other) < std::f64::consts::PI {
            let sep = raw.min(other);
            let d = self.distance(x.data, y.data);
            // represent the negative-direction chord through its midpoint
            let half = d / 2.0;
            let (bx, by) = (rb * (-sep).cos(), rb * (-sep).sin());
            let (mx, my) = ((ra + bx) / 2.0, by / 2.0);
            let mid = PointRef {
                space,
                data: self.make_point(mx.hypot(my), pa + my.atan2(mx)),
            };
            out.push(GeodesicPolyline {
                space,
                points: vec![x, mid, y],
                cum: vec![0.0, half, d],
                total: d,
            });
        }
        out.truncate(max_n);
        out
    }

    /// Rejection sampling from the annulus around the apex that covers the
    /// ball; exact and correct whether or not the ball wraps the apex.
    pub(super) fn sample_in_ball(
        &self,
        space: u64,
        o: PointData,
        radius: f64,
        n: usize,
        seed: u64,
    ) -> Result<Vec<PointRef>> {
        let (ro, _) = Self::rp(o);
        let lo = (ro - radius).max(0.0);
        let hi = ro + radius;
        let salt = point_salt(PointRef { space, data: o }) ^ radius.to_bits();
        let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, salt));
        let mut out = Vec::with_capacity(n);
        let max_attempts = 20_000 + 800 * n;
        for _ in 0..max_attempts {
            if out.len() >= n {
                break;
            }
            let rho = lo + (hi - lo) * rng.gen::<f64>();
            let psi = self.theta * rng.gen::<f64>();
            let cand = self.make_point(rho, psi);
            if self.distance(o, cand) <= radius {
                out.push(PointRef { space, data: cand });
            }
        }
        if out.is_empty() {
            return Err(GeomError::EmptyBall);
        }
        Ok(out)
    }

    pub(super) fn sample_points(&self, space: u64, n: usize, seed: u64) -> Vec<PointRef> {
        let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, 0x636f6e65u64));
        (0..n)
            .map(|_| {
                let r = self.extent * rng.gen::<f64>().sqrt();
                let phi = self.theta * rng.gen::<f64>();
                PointRef {
                    space,
                    data: self.make_point(r.max(1e-9), phi),
                }
            })
            .collect()
    }
}
