//! Exact trigonometry and comparison constructions in the model surfaces of
//! constant curvature k (hyperbolic plane for k < 0, Euclidean plane for
//! k = 0, sphere of radius 1/sqrt(k) for k > 0).
//!
//! All angle computations go through half-angle `atan2` forms rather than a
//! bare `acos` of the law of cosines. These are stable near degenerate
//! triangles and make the forward/inverse pair (`side_from_angle`,
//! `comparison_angle`) round-trip to well below 1e-9.

use crate::error::{GeomError, Result};

/// Curvature values this close to zero are evaluated with the Euclidean
/// branch; the sin(sqrt(k) x)/sqrt(k) expressions cancel catastrophically
/// below this scale.
pub const EUCLIDEAN_K_WINDOW: f64 = 1e-12;

/// Absolute window within which arccos/arccosh arguments are clamped into
/// their domain instead of rejected.
pub const CLAMP_WINDOW: f64 = 1e-12;

/// Relative realizability slack: side triples are accepted as triangles when
/// the triangle inequality and the k > 0 perimeter bound hold within this
/// fraction of the perimeter.
pub const REL_SLACK: f64 = 1e-9;

/// Lower curvature bound k together with its derived k > 0 constraints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Curvature(f64);

impl Curvature {
    pub fn new(k: f64) -> Result<Self> {
        if !k.is_finite() {
            return Err(GeomError::Domain(format!(
                "curvature must be finite, got {k}"
            )));
        }
        Ok(Curvature(k))
    }

    pub const fn flat() -> Self {
        Curvature(0.0)
    }

    pub fn k(self) -> f64 {
        self.0
    }

    /// True when the Euclidean branch applies.
    pub fn is_flat(self) -> bool {
        self.0.abs() < EUCLIDEAN_K_WINDOW
    }

    pub fn is_spherical(self) -> bool {
        self.0 >= EUCLIDEAN_K_WINDOW
    }

    pub fn is_hyperbolic(self) -> bool {
        self.0 <= -EUCLIDEAN_K_WINDOW
    }

    /// sqrt(|k|); the metric scale of the model surface.
    pub fn scale(self) -> f64 {
        self.0.abs().sqrt()
    }

    /// pi / sqrt(k): no distance in the model exceeds this when k > 0.
    pub fn diameter_bound(self) -> Option<f64> {
        self.is_spherical()
            .then(|| std::f64::consts::PI / self.0.sqrt())
    }

    /// 2 pi / sqrt(k): triangle perimeters stay strictly below this when k > 0.
    pub fn perimeter_bound(self) -> Option<f64> {
        self.is_spherical()
            .then(|| 2.0 * std::f64::consts::PI / self.0.sqrt())
    }
}

/// Triangle vertex labels. Sides are named by the opposite vertex:
/// a = |qr| (opposite p), b = |pr| (opposite q), c = |pq| (opposite r).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Vertex {
    P,
    Q,
    R,
}

impl Vertex {
    pub const ALL: [Vertex; 3] = [Vertex::P, Vertex::Q, Vertex::R];
}

/// Nonnegative side lengths of a triangle under the fixed labeling
/// convention above.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SideTriple {
    /// |qr|, opposite p.
    pub a: f64,
    /// |pr|, opposite q.
    pub b: f64,
    /// |pq|, opposite r.
    pub c: f64,
}

impl SideTriple {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        for (name, s) in [("a", a), ("b", b), ("c", c)] {
            if !s.is_finite() || s < 0.0 {
                return Err(GeomError::Domain(format!(
                    "side {name} must be finite and nonnegative, got {s}"
                )));
            }
        }
        Ok(SideTriple { a, b, c })
    }

    /// Build from the three pairwise distances named by their endpoints.
    pub fn from_distances(pq: f64, pr: f64, qr: f64) -> Result<Self> {
        SideTriple::new(qr, pr, pq)
    }

    pub fn perimeter(&self) -> f64 {
        self.a + self.b + self.c
    }

    /// The two sides meeting at `v`.
    pub fn incident(&self, v: Vertex) -> (f64, f64) {
        match v {
            Vertex::P => (self.b, self.c),
            Vertex::Q => (self.a, self.c),
            Vertex::R => (self.a, self.b),
        }
    }

    pub fn opposite(&self, v: Vertex) -> f64 {
        match v {
            Vertex::P => self.a,
            Vertex::Q => self.b,
            Vertex::R => self.c,
        }
    }

    /// Default realizability slack, proportional to the perimeter so that
    /// graph distances carrying discretization error still validate.
    pub fn default_slack(&self) -> f64 {
        REL_SLACK * self.perimeter().max(1e-30)
    }

    /// Check the triangle inequality and, for k > 0, the diameter and
    /// perimeter bounds, with slack `tau`. A side at the k > 0 diameter is
    /// accepted (the degenerate lune handled by the angle convention).
    pub fn validate_with(&self, k: Curvature, tau: f64) -> Result<()> {
        let (a, b, c) = (self.a, self.b, self.c);
        if k.is_spherical() {
            let dia = k.diameter_bound().unwrap();
            let window = CLAMP_WINDOW * dia.max(1.0);
            for s in [a, b, c] {
                if s > dia + window {
                    return Err(GeomError::InvalidTriple(format!(
                        "side {s} exceeds the diameter bound {dia}"
                    )));
                }
            }
            let at_diameter = [a, b, c].iter().any(|&s| s >= dia - window);
            if !at_diameter && self.perimeter() >= k.perimeter_bound().unwrap() - tau {
                return Err(GeomError::InvalidTriple(format!(
                    "perimeter {} reaches the bound {}",
                    self.perimeter(),
                    k.perimeter_bound().unwrap()
                )));
            }
        }
        for (s, o1, o2) in [(a, b, c), (b, a, c), (c, a, b)] {
            if s > o1 + o2 + tau {
                return Err(GeomError::InvalidTriple(format!(
                    "triangle inequality fails: {s} > {o1} + {o2}"
                )));
            }
        }
        Ok(())
    }

    pub fn validate(&self, k: Curvature) -> Result<()> {
        self.validate_with(k, self.default_slack())
    }
}

/// A point in the 2-D chart of the model surface. Interpretation depends on
/// the sign of k: (x, y, 0) in the plane, a point of the radius-R sphere for
/// k > 0, a point of the hyperboloid z^2 - x^2 - y^2 = R^2 for k < 0
/// (R = 1/sqrt(|k|)).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl ModelPoint {
    pub fn planar(x: f64, y: f64) -> Self {
        ModelPoint { x, y, z: 0.0 }
    }

    pub fn new(x: f64, y: f64, z: f64) -> Self {
        ModelPoint { x, y, z }
    }
}

/// The chart origin: (0,0) in the plane, the pole (0,0,R) otherwise.
pub fn model_origin(k: Curvature) -> ModelPoint {
    if k.is_flat() {
        ModelPoint::planar(0.0, 0.0)
    } else {
        ModelPoint::new(0.0, 0.0, 1.0 / k.scale())
    }
}

/// The point at arclength `dist` from the chart origin in polar direction
/// `phi`.
pub fn model_from_origin(k: Curvature, dist: f64, phi: f64) -> ModelPoint {
    let (cp, sp) = (phi.cos(), phi.sin());
    if k.is_flat() {
        ModelPoint::planar(dist * cp, dist * sp)
    } else if k.is_spherical() {
        let r = 1.0 / k.scale();
        let t = dist / r;
        ModelPoint::new(r * t.sin() * cp, r * t.sin() * sp, r * t.cos())
    } else {
        let r = 1.0 / k.scale();
        let t = dist / r;
        ModelPoint::new(r * t.sinh() * cp, r * t.sinh() * sp, r * t.cosh())
    }
}

/// stable acosh(1 + t) for t >= 0
fn acosh1p(t: f64) -> f64 {
    let t = t.max(0.0);
    (t + (t * (t + 2.0)).sqrt()).ln_1p()
}

/// Distance between two chart points of the model surface.
///
/// Total on valid chart points: symmetric, nonnegative, zero iff equal, and
/// bounded by pi/sqrt(k) when k > 0.
pub fn model_distance(k: Curvature, u: ModelPoint, v: ModelPoint) -> f64 {
    if k.is_flat() {
        return (u.x - v.x).hypot(u.y - v.y);
    }
    let r = 1.0 / k.scale();
    if k.is_spherical() {
        // angle via the cross/dot pair; keeps full precision at both ends
        let dot = u.x * v.x + u.y * v.y + u.z * v.z;
        let cx = u.y * v.z - u.z * v.y;
        let cy = u.z * v.x - u.x * v.z;
        let cz = u.x * v.y - u.y * v.x;
        let cross = (cx * cx + cy * cy + cz * cz).sqrt();
        r * cross.atan2(dot)
    } else {
        // cosh(d/R) - 1 from the Minkowski square of the difference
        let (dx, dy, dz) = (u.x - v.x, u.y - v.y, u.z - v.z);
        let t = (dx * dx + dy * dy - dz * dz) / (2.0 * r * r);
        r * acosh1p(t)
    }
}

/// The chart point at arclength `t` from `u` along the geodesic toward `v`.
///
/// `t` may lie anywhere in `[0, d(u, v)]`. For coincident or (k > 0)
/// antipodal endpoints the direction is chosen deterministically.
pub fn model_point_along(k: Curvature, u: ModelPoint, v: ModelPoint, t: f64) -> ModelPoint {
    let d = model_distance(k, u, v);
    if k.is_flat() {
        if d == 0.0 {
            return u;
        }
        let s = t / d;
        return ModelPoint::planar(u.x + (v.x - u.x) * s, u.y + (v.y - u.y) * s);
    }
    let r = 1.0 / k.scale();
    let theta = d / r;
    if k.is_spherical() {
        let (ux, uy, uz) = (u.x / r, u.y / r, u.z / r);
        let (ex, ey, ez) = if theta.sin().abs() < 1e-12 {
            // coincident or antipodal: deterministic perpendicular
            perp_unit(ux, uy, uz)
        } else {
            let s = theta.sin();
            (
                (v.x / r - ux * theta.cos()) / s,
                (v.y / r - uy * theta.cos()) / s,
                (v.z / r - uz * theta.cos()) / s,
            )
        };
        let (ct, st) = ((t / r).cos(), (t / r).sin());
        ModelPoint::new(
            r * (ux * ct + ex * st),
            r * (uy * ct + ey * st),
            r * (uz * ct + ez * st),
        )
    } else {
        let (ux, uy, uz) = (u.x / r, u.y / r, u.z / r);
        let (ex, ey, ez) = if theta.sinh().abs() < 1e-300 {
            (1.0, 0.0, 0.0)
        } else {
            let s = theta.sinh();
            (
                (v.x / r - ux * theta.cosh()) / s,
                (v.y / r - uy * theta.cosh()) / s,
                (v.z / r - uz * theta.cosh()) / s,
            )
        };
        let (ct, st) = ((t / r).cosh(), (t / r).sinh());
        let (x, y) = (r * (ux * ct + ex * st), r * (uy * ct + ey * st));
        let _ = ez;
        // re-project onto the hyperboloid to kill drift
        ModelPoint::new(x, y, (r * r + x * x + y * y).sqrt())
    }
}

/// Deterministic unit vector perpendicular to (x, y, z).
fn perp_unit(x: f64, y: f64, z: f64) -> (f64, f64, f64) {
    let (px, py, pz) = if x.abs() <= y.abs() && x.abs() <= z.abs() {
        (0.0, -z, y)
    } else if y.abs() <= z.abs() {
        (-z, 0.0, x)
    } else {
        (-y, x, 0.0)
    };
    let n = (px * px + py * py + pz * pz).sqrt();
    (px / n, py / n, pz / n)
}

/// Clamp a squared half-angle factor that may have gone slightly negative
/// from roundoff.
fn clamp_product(p: f64, scale: f64) -> Result<f64> {
    if p >= 0.0 {
        Ok(p)
    } else if p >= -CLAMP_WINDOW * scale.max(1.0) {
        Ok(0.0)
    } else {
        Err(GeomError::InvalidTriple(format!(
            "angle factor {p} below domain beyond the clamp window"
        )))
    }
}

/// Angle between the sides of lengths `u` and `v`, opposite the side of
/// length `w`, in the model of curvature k. Inputs are assumed validated.
fn angle_from_sides(k: Curvature, u: f64, v: f64, w: f64) -> Result<f64> {
    if u == 0.0 || v == 0.0 {
        // undirected corner; by continuity report 0
        return Ok(0.0);
    }
    if k.is_flat() {
        let num = (w - (u - v)) * (w + (u - v));
        let den = (u + v - w) * (u + v + w);
        let num = clamp_product(num, w * w)?;
        let den = clamp_product(den, (u + v) * (u + v))?;
        return Ok(2.0 * num.sqrt().atan2(den.sqrt()));
    }
    let s = k.scale();
    if k.is_spherical() {
        let h = |x: f64| (0.5 * s * x).sin();
        let num = h(w - (u - v)) * h(w + (u - v));
        let den = h(u + v - w) * h(u + v + w);
        let num = clamp_product(num, 1.0)?;
        let den = clamp_product(den, 1.0)?;
        Ok(2.0 * num.sqrt().atan2(den.sqrt()))
    } else {
        let h = |x: f64| (0.5 * s * x).sinh();
        let num = h(w - (u - v)) * h(w + (u - v));
        let den = h(u + v - w) * h(u + v + w);
        let num = clamp_product(num, 1.0)?;
        let den = clamp_product(den, 1.0)?;
        Ok(2.0 * num.sqrt().atan2(den.sqrt()))
    }
}

/// Third side of the model triangle with sides `a`, `b` enclosing the angle
/// `gamma`.
///
/// Continuous in all arguments; trig arguments within `CLAMP_WINDOW` of their
/// domain boundary are clamped before evaluation.
pub fn side_from_angle(k: Curvature, a: f64, b: f64, gamma: f64) -> Result<f64> {
    for (name, s) in [("a", a), ("b", b)] {
        if !s.is_finite() || s < 0.0 {
            return Err(GeomError::Domain(format!(
                "side {name} must be finite and nonnegative, got {s}"
            )));
        }
    }
    if !gamma.is_finite() || gamma < -CLAMP_WINDOW || gamma > std::f64::consts::PI + CLAMP_WINDOW {
        return Err(GeomError::Range(format!(
            "gamma must lie in [0, pi], got {gamma}"
        )));
    }
    let gamma = gamma.clamp(0.0, std::f64::consts::PI);
    if let Some(dia) = k.diameter_bound() {
        let window = CLAMP_WINDOW * dia.max(1.0);
        if a > dia + window || b > dia + window {
            return Err(GeomError::Domain(format!(
                "sides ({a}, {b}) exceed the k > 0 diameter bound {dia}"
            )));
        }
    }
    let half = (0.5 * gamma).sin();
    let half2 = half * half;
    if k.is_flat() {
        let d = a - b;
        return Ok((d * d + 4.0 * a * b * half2).sqrt());
    }
    let s = k.scale();
    if k.is_spherical() {
        let (sa, sb) = (
            (s * a).min(std::f64::consts::PI),
            (s * b).min(std::f64::consts::PI),
        );
        // sin^2(c'/2) = sin^2((a'-b')/2) + sin a' sin b' sin^2(g/2)
        let rhs = {
            let hd = (0.5 * (sa - sb)).sin();
            hd * hd + sa.sin() * sb.sin() * half2
        };
        let rhs = rhs.clamp(0.0, 1.0);
        let c = if rhs <= 0.5 {
            2.0 * rhs.sqrt().asin()
        } else {
            // cos c' = cos a' cos b' + sin a' sin b' cos g
            let cosc = (sa.cos() * sb.cos() + sa.sin() * sb.sin() * gamma.cos()).clamp(-1.0, 1.0);
            cosc.acos()
        };
        Ok(c / s)
    } else {
        let (sa, sb) = (s * a, s * b);
        // cosh c' - 1 = 2 sinh^2((a'-b')/2) + 2 sinh a' sinh b' sin^2(g/2)
        let hd = (0.5 * (sa - sb)).sinh();
        let t = 2.0 * hd * hd + 2.0 * sa.sinh() * sb.sinh() * half2;
        Ok(acosh1p(t) / s)
    }
}

/// The angle of the comparison triangle at the given vertex, in `[0, pi]`.
///
/// For k > 0 a side incident to the vertex may equal pi/sqrt(k); the angle is
/// 0 by convention in that case. Inverse to [`side_from_angle`].
pub fn comparison_angle(k: Curvature, sides: &SideTriple, vertex: Vertex) -> Result<f64> {
    comparison_angle_with(k, sides, vertex, sides.default_slack())
}

/// [`comparison_angle`] with an explicit realizability slack.
pub fn comparison_angle_with(
    k: Curvature,
    sides: &SideTriple,
    vertex: Vertex,
    tau: f64,
) -> Result<f64> {
    let (u, v) = sides.incident(vertex);
    if let Some(dia) = k.diameter_bound() {
        let window = CLAMP_WINDOW * dia.max(1.0);
        if u >= dia - window || v >= dia - window {
            sides.validate_with(k, tau)?;
            return Ok(0.0);
        }
    }
    sides.validate_with(k, tau)?;
    angle_from_sides(k, u, v, sides.opposite(vertex))
}

/// Side lengths, all three angles and canonically placed chart coordinates of
/// the comparison triangle in the model of curvature k.
///
/// Placement: the q vertex sits at the chart origin, r on the positive axis,
/// p in the upper half plane. Deterministic in its inputs.
#[derive(Debug, Clone)]
pub struct ComparisonTriangle {
    pub k: Curvature,
    pub sides: SideTriple,
    /// Angles at (p, q, r).
    pub angles: [f64; 3],
    /// Chart coordinates of (p~, q~, r~).
    pub coords: [ModelPoint; 3],
}

pub fn build_comparison_triangle(k: Curvature, sides: SideTriple) -> Result<ComparisonTriangle> {
    sides.validate(k)?;
    let angle_p = comparison_angle(k, &sides, Vertex::P)?;
    let angle_q = comparison_angle(k, &sides, Vertex::Q)?;
    let angle_r = comparison_angle(k, &sides, Vertex::R)?;
    let q = model_origin(k);
    let r = model_from_origin(k, sides.a, 0.0);
    let p = model_from_origin(k, sides.c, angle_q);
    Ok(ComparisonTriangle {
        k,
        sides,
        angles: [angle_p, angle_q, angle_r],
        coords: [p, q, r],
    })
}

impl ComparisonTriangle {
    pub fn angle_at(&self, v: Vertex) -> f64 {
        match v {
            Vertex::P => self.angles[0],
            Vertex::Q => self.angles[1],
            Vertex::R => self.angles[2],
        }
    }

    pub fn coord_of(&self, v: Vertex) -> ModelPoint {
        match v {
            Vertex::P => self.coords[0],
            Vertex::Q => self.coords[1],
            Vertex::R => self.coords[2],
        }
    }

    /// The side opposite `apex`, oriented cyclically:
    /// P -> (Q, R), Q -> (R, P), R -> (P, Q).
    pub fn side_endpoints(&self, apex: Vertex) -> (Vertex, Vertex) {
        match apex {
            Vertex::P => (Vertex::Q, Vertex::R),
            Vertex::Q => (Vertex::R, Vertex::P),
            Vertex::R => (Vertex::P, Vertex::Q),
        }
    }

    /// Distance from the apex vertex to the point at arclength `t` along the
    /// opposite side (measured from the side's first endpoint). The endpoints
    /// reproduce the adjacent sides exactly.
    pub fn distance_to_side_point(&self, apex: Vertex, t: f64) -> Result<f64> {
        let (e0, e1) = self.side_endpoints(apex);
        let len = self.sides.opposite(apex);
        if !t.is_finite() || t < -CLAMP_WINDOW || t > len + CLAMP_WINDOW {
            return Err(GeomError::Range(format!(
                "arclength {t} outside the side length [0, {len}]"
            )));
        }
        // stored side lengths, bit-exact at the endpoints
        if t <= 0.0 {
            return Ok(side_between(&self.sides, apex, e0));
        }
        if t >= len {
            return Ok(side_between(&self.sides, apex, e1));
        }
        let s = model_point_along(self.k, self.coord_of(e0), self.coord_of(e1), t);
        Ok(model_distance(self.k, self.coord_of(apex), s))
    }
}

/// Length of the side joining two distinct vertices.
fn side_between(sides: &SideTriple, x: Vertex, y: Vertex) -> f64 {
    use Vertex::*;
    match (x, y) {
        (Q, R) | (R, Q) => sides.a,
        (P, R) | (R, P) => sides.b,
        (P, Q) | (Q, P) => sides.c,
        _ => unreachable!("side_between needs distinct vertices"),
    }
}

/// Which side of pi the glued angle sum at q falls on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GluedVerdict {
    SumLeqPi,
    SumGeqPi,
    /// Within 1e-12 of pi; both directions of the gluing comparison apply.
    Both,
}

/// Output of [`alexandrov_compare`]: the glued angle sum at q and the four
/// compared angles of Alexandrov's lemma.
#[derive(Debug, Clone, Copy)]
pub struct AlexandrovComparison {
    pub verdict: GluedVerdict,
    /// angle pqr + angle pqs.
    pub angle_sum_at_q: f64,
    /// (angle prq, angle abc): at r in the glued triangle vs at b in the
    /// combined triangle.
    pub at_r: (f64, f64),
    /// (angle psq, angle acb).
    pub at_s: (f64, f64),
}

/// Executable gluing comparison: triangles pqr and pqs joined in an exterior
/// way along `[pq]`, against the combined triangle abc with |ab| = |pr|,
/// |ac| = |ps|, |bc| = |qr| + |qs|.
///
/// Whether the angle sum at q is <= pi (resp. >= pi) must be equivalent to
/// angle prq >= angle abc and angle psq >= angle acb (resp. both <=); tests
/// hold the returned values to that biconditional.
pub fn alexandrov_compare(
    k: Curvature,
    pq: f64,
    qr: f64,
    qs: f64,
    pr: f64,
    ps: f64,
) -> Result<AlexandrovComparison> {
    let tri_pqr = SideTriple::from_distances(pq, pr, qr)?;
    let tri_pqs = SideTriple::from_distances(pq, ps, qs)?;
    let combined = SideTriple::from_distances(pr, ps, qr + qs)?;
    if let Some(bound) = k.perimeter_bound() {
        if pr + ps + qr + qs >= bound - combined.default_slack() {
            return Err(GeomError::InvalidTriple(format!(
                "glued perimeter {} reaches the k > 0 bound {bound}",
                pr + ps + qr + qs
            )));
        }
    }
    tri_pqr.validate(k)?;
    tri_pqs.validate(k)?;
    combined.validate(k)?;

    let angle_pqr = angle_from_sides(k, pq, qr, pr)?;
    let angle_pqs = angle_from_sides(k, pq, qs, ps)?;
    let angle_prq = angle_from_sides(k, pr, qr, pq)?;
    let angle_psq = angle_from_sides(k, ps, qs, pq)?;
    let angle_abc = angle_from_sides(k, pr, qr + qs, ps)?;
    let angle_acb = angle_from_sides(k, ps, qr + qs, pr)?;

    let sum = angle_pqr + angle_pqs;
    let verdict = if (sum - std::f64::consts::PI).abs() <= 1e-12 {
        GluedVerdict::Both
    } else if sum < std::f64::consts::PI {
        GluedVerdict::SumLeqPi
    } else {
        GluedVerdict::SumGeqPi
    };
    Ok(AlexandrovComparison {
        verdict,
        angle_sum_at_q: sum,
        at_r: (angle_prq, angle_abc),
        at_s: (angle_psq, angle_acb),
    })
}
