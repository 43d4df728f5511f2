//! Angle measurement in a geodesic space, the bad-angle predicate against
//! the model-surface comparison angle, and ball-local curvature checks.
//!
//! A space only supports scale-indexed angle estimates: the angle at a vertex
//! is measured as the comparison angle of the probe triangle at scale `t`,
//! with the halving diagnostic sequence exposed. On a space whose curvature
//! really is bounded below by k the sequence is nondecreasing as the scale
//! shrinks, and its limit is the angle.

use crate::error::{GeomError, Result};
use crate::space::{GeodesicPolyline, PointRef, Space};
use crate::spaceform::{comparison_angle_with, Curvature, SideTriple, Vertex};

/// Probe scale used when the caller does not pick one: 10 h on discrete
/// backends, 1e-4 of the shorter geodesic on analytic ones (floored at the
/// declared resolution when the backend has one).
pub fn default_probe(space: &Space, len_a: f64, len_b: f64) -> f64 {
    let m = len_a.min(len_b);
    if space.is_discrete() {
        (10.0 * space.h()).min(m)
    } else if space.h() > 0.0 {
        (1e-4 * m).max(space.h()).min(m)
    } else {
        1e-4 * m
    }
}

/// Default badness tolerance: 5 h on discrete backends (tied to the declared
/// distance error), 1e-6 on analytic ones.
pub fn default_badness_tol(space: &Space) -> f64 {
    if space.is_discrete() {
        5.0 * space.h()
    } else {
        1e-6
    }
}

/// Realizability slack for side triples built from backend distances.
/// Backend distances form an exact metric, so only roundoff needs covering;
/// the k > 0 perimeter margin must not be eaten by the discretization
/// budget.
pub(crate) fn triple_slack(_space: &Space, sides: &SideTriple) -> f64 {
    sides.default_slack().max(1e-12)
}

/// A scale-indexed angle estimate at a vertex.
#[derive(Debug, Clone)]
pub struct AngleEstimate {
    /// Estimate at the requested probe scale.
    pub value: f64,
    /// The probe scale actually used.
    pub probe: f64,
    pub vertex: PointRef,
    /// (scale, estimate) pairs at t, t/2, t/4, ... for convergence
    /// diagnostics.
    pub diagnostics: Vec<(f64, f64)>,
}

/// A triangle of a space: three vertices and the chosen geodesics between
/// them.
#[derive(Debug, Clone)]
pub struct Triangle {
    pub p: PointRef,
    pub q: PointRef,
    pub r: PointRef,
    pub pq: GeodesicPolyline,
    pub pr: GeodesicPolyline,
    pub qr: GeodesicPolyline,
}

impl Triangle {
    pub fn from_vertices(space: &Space, p: PointRef, q: PointRef, r: PointRef) -> Result<Triangle> {
        Ok(Triangle {
            p,
            q,
            r,
            pq: space.geodesic(p, q)?,
            pr: space.geodesic(p, r)?,
            qr: space.geodesic(q, r)?,
        })
    }

    /// Side lengths under the labeling a = |qr|, b = |pr|, c = |pq|.
    pub fn sides(&self) -> Result<SideTriple> {
        SideTriple::new(self.qr.total, self.pr.total, self.pq.total)
    }

    pub fn perimeter(&self) -> f64 {
        self.pq.total + self.pr.total + self.qr.total
    }

    pub fn vertex_ref(&self, v: Vertex) -> PointRef {
        match v {
            Vertex::P => self.p,
            Vertex::Q => self.q,
            Vertex::R => self.r,
        }
    }

    /// The two geodesics emanating from `v` toward the other two vertices,
    /// in (P, Q, R) order of the targets.
    pub fn geodesics_at(&self, v: Vertex) -> (GeodesicPolyline, GeodesicPolyline) {
        match v {
            Vertex::P => (self.pq.clone(), self.pr.clone()),
            Vertex::Q => (self.pq.reversed(), self.qr.clone()),
            Vertex::R => (self.pr.reversed(), self.qr.reversed()),
        }
    }
}

/// Evidence that the comparison inequality fails at a vertex: the measured
/// angle undercuts the comparison angle by more than the tolerance.
#[derive(Debug, Clone)]
pub struct BadAngleCertificate {
    pub p: PointRef,
    pub q: PointRef,
    pub r: PointRef,
    /// The vertex where the angle was measured.
    pub vertex: Vertex,
    pub sides: SideTriple,
    pub measured: AngleEstimate,
    /// The comparison angle computed from the side lengths.
    pub comparison: f64,
    /// comparison - measured; strictly greater than `tol`.
    pub deficit: f64,
    pub tol: f64,
}

impl BadAngleCertificate {
    /// The point the certified vertex refers to.
    pub fn vertex_point(&self) -> PointRef {
        match self.vertex {
            Vertex::P => self.p,
            Vertex::Q => self.q,
            Vertex::R => self.r,
        }
    }
}

/// Measure the angle at `q` between two geodesics emanating from it, as the
/// comparison angle of the probe triangle at scale `t`.
pub fn measure_angle(
    space: &Space,
    k: Curvature,
    q: PointRef,
    gp: &GeodesicPolyline,
    gr: &GeodesicPolyline,
    t: f64,
) -> Result<AngleEstimate> {
    if gp.start() != q || gr.start() != q {
        return Err(GeomError::Range(
            "both geodesics must emanate from the vertex".to_string(),
        ));
    }
    if gp.total == 0.0 || gr.total == 0.0 {
        return Err(GeomError::DegenerateGeodesic);
    }
    let cap = gp.total.min(gr.total);
    if !(t > 0.0) || t > cap * (1.0 + 1e-12) {
        return Err(GeomError::Range(format!(
            "probe scale {t} outside (0, {cap}]"
        )));
    }
    let t = t.min(cap);
    let mut diagnostics = Vec::new();
    let mut scale = t;
    let floor = space.h().max(t / 32.0);
    while diagnostics.len() < 8 {
        match probe_estimate(space, k, gp, gr, scale) {
            Ok(Some(est)) => diagnostics.push((scale, est)),
            Ok(None) => break,
            Err(e) => {
                if diagnostics.is_empty() {
                    return Err(e);
                }
                break;
            }
        }
        scale /= 2.0;
        if scale < floor {
            break;
        }
    }
    if diagnostics.is_empty() {
        return Err(GeomError::DegenerateGeodesic);
    }
    Ok(AngleEstimate {
        value: diagnostics[0].1,
        probe: diagnostics[0].0,
        vertex: q,
        diagnostics,
    })
}

/// One probe evaluation; `None` when the snapped probe points degenerate
/// back onto the vertex.
fn probe_estimate(
    space: &Space,
    k: Curvature,
    gp: &GeodesicPolyline,
    gr: &GeodesicPolyline,
    scale: f64,
) -> Result<Option<f64>> {
    let (x, ax) = space.point_at_with_arc(gp, scale)?;
    let (y, ay) = space.point_at_with_arc(gr, scale)?;
    if ax == 0.0 || ay == 0.0 {
        return Ok(None);
    }
    let w = space.distance(x, y)?;
    // vertices (p := x, q, r := y): a = |qy|, b = |xy|, c = |xq|
    let triple = SideTriple { a: ay, b: w, c: ax };
    let tau = triple_slack(space, &triple);
    let angle = comparison_angle_with(k, &triple, Vertex::Q, tau)?;
    Ok(Some(angle))
}

/// Decide badness of the angle of `tri` at `vertex` against the comparison
/// angle for curvature `k`. Returns a certificate only when the measured
/// angle undercuts the comparison angle by more than `tol`.
pub fn badness(
    space: &Space,
    k: Curvature,
    tri: &Triangle,
    vertex: Vertex,
    tol: f64,
) -> Result<Option<BadAngleCertificate>> {
    let sides = tri.sides()?;
    let comparison = comparison_angle_with(k, &sides, vertex, triple_slack(space, &sides))?;
    let (ga, gb) = tri.geodesics_at(vertex);
    let probe = default_probe(space, ga.total, gb.total);
    let measured = measure_angle(space, k, tri.vertex_ref(vertex), &ga, &gb, probe)?;
    let deficit = comparison - measured.value;
    if deficit > tol {
        Ok(Some(BadAngleCertificate {
            p: tri.p,
            q: tri.q,
            r: tri.r,
            vertex,
            sides,
            measured,
            comparison,
            deficit,
            tol,
        }))
    } else {
        Ok(None)
    }
}

/// Report of a ball-local curvature check.
#[derive(Debug, Clone)]
pub struct LocalCheckReport {
    /// Triangles actually tested.
    pub checked: usize,
    /// The worst certificate found, if any.
    pub worst: Option<BadAngleCertificate>,
}

impl LocalCheckReport {
    pub fn is_good(&self) -> bool {
        self.worst.is_none()
    }

    pub fn worst_deficit(&self) -> f64 {
        self.worst.as_ref().map_or(0.0, |c| c.deficit)
    }
}

/// Sample up to `budget` triangles with all vertices in the ball around `o`
/// and report the worst badness found. Deterministic under a fixed seed, and
/// a larger budget extends the sample sequence of a smaller one.
pub fn local_check(
    space: &Space,
    k: Curvature,
    o: PointRef,
    radius: f64,
    budget: usize,
    tol: f64,
    seed: u64,
) -> Result<LocalCheckReport> {
    if !(radius > 2.0 * space.h()) {
        return Err(GeomError::Range(format!(
            "ball radius {radius} must exceed twice the resolution {}",
            space.h()
        )));
    }
    let min_side = (2.0 * space.h()).max(1e-6 * radius);
    let attempts = budget.saturating_mul(4).max(8);
    let samples = space.sample_in_ball(o, radius, 3 * attempts, seed)?;
    let mut checked = 0usize;
    let mut worst: Option<BadAngleCertificate> = None;
    for chunk in samples.chunks_exact(3) {
        if checked >= budget {
            break;
        }
        let (p, q, r) = (chunk[0], chunk[1], chunk[2]);
        let tri = match Triangle::from_vertices(space, p, q, r) {
            Ok(t) => t,
            Err(_) => continue,
        };
        if tri.pq.total < min_side || tri.pr.total < min_side || tri.qr.total < min_side {
            continue;
        }
        let sides = match tri.sides() {
            Ok(s) => s,
            Err(_) => continue,
        };
        if sides.validate_with(k, triple_slack(space, &sides)).is_err() {
            continue;
        }
        checked += 1;
        for v in Vertex::ALL {
            if let Ok(Some(cert)) = badness(space, k, &tri, v, tol) {
                if worst.as_ref().is_none_or(|w| cert.deficit > w.deficit) {
                    worst = Some(cert);
                }
            }
        }
    }
    if checked == 0 {
        return Err(GeomError::EmptyBall);
    }
    Ok(LocalCheckReport { checked, worst })
}

/// The two adjacent angles at an interior point of a geodesic, measured with
/// one probe scale.
#[derive(Debug, Clone)]
pub struct AdjacentAngles {
    /// Angle back toward the start of the geodesic.
    pub toward_start: AngleEstimate,
    /// Angle on toward the end.
    pub toward_end: AngleEstimate,
    pub sum: f64,
}

/// Measure the pair of angles that an off-geodesic point `r_off` subtends at
/// an interior point `r` of `gpq`, splitting the geodesic there. For a true
/// interior point of a shortest path the two angles sum to a straight angle.
pub fn adjacent_angle_check(
    space: &Space,
    k: Curvature,
    gpq: &GeodesicPolyline,
    r: PointRef,
    r_off: PointRef,
    t: f64,
) -> Result<AdjacentAngles> {
    let s = space.distance(gpq.start(), r)?;
    let back = space.distance(r, gpq.end())?;
    let slack = (1e-9 * (1.0 + gpq.total)).max(4.0 * space.eta());
    if (s + back - gpq.total).abs() > slack {
        return Err(GeomError::NotInterior);
    }
    if s <= 0.0 || s >= gpq.total {
        return Err(GeomError::NotInterior);
    }
    let (toward_p, toward_q) = gpq.split_at(s, r);
    if toward_p.total == 0.0 || toward_q.total == 0.0 {
        return Err(GeomError::NotInterior);
    }
    let g_off = space.geodesic(r, r_off)?;
    if g_off.total == 0.0 {
        return Err(GeomError::DegenerateGeodesic);
    }
    let t_eff = t.min(toward_p.total).min(toward_q.total).min(g_off.total);
    if !(t_eff > 0.0) {
        return Err(GeomError::Range(format!("probe scale {t} degenerates")));
    }
    let toward_start = measure_angle(space, k, r, &toward_p, &g_off, t_eff)?;
    let toward_end = measure_angle(space, k, r, &toward_q, &g_off, t_eff)?;
    let sum = toward_start.value + toward_end.value;
    Ok(AdjacentAngles {
        toward_start,
        toward_end,
        sum,
    })
}

/// One first-variation residual sample.
#[derive(Debug, Clone, Copy)]
pub struct VariationSample {
    /// Realized arclength along the base geodesic.
    pub t: f64,
    /// |p q_t| - |pq| + cos(angle pqr) * t.
    pub residual: f64,
    /// residual / t.
    pub ratio: f64,
}

/// First-variation finite-difference check: walk `q_t` along the geodesic
/// from q to r and compare the measured distance change against the cosine
/// of the angle at q. On analytic backends the ratio residual/t shrinks
/// with t.
pub fn first_variation_check(
    space: &Space,
    k: Curvature,
    p: PointRef,
    q: PointRef,
    r: PointRef,
    ts: &[f64],
) -> Result<Vec<VariationSample>> {
    let g_qp = space.geodesic(q, p)?;
    let g_qr = space.geodesic(q, r)?;
    if g_qp.total == 0.0 || g_qr.total == 0.0 {
        return Err(GeomError::DegenerateGeodesic);
    }
    let d_pq = g_qp.total;
    let probe = default_probe(space, g_qp.total, g_qr.total);
    let angle = measure_angle(space, k, q, &g_qp, &g_qr, probe)?;
    let cos_angle = angle.value.cos();
    let mut out = Vec::with_capacity(ts.len());
    for &t in ts {
        if !(t > 0.0) || t > g_qr.total {
            return Err(GeomError::Range(format!(
                "variation scale {t} outside (0, {}]",
                g_qr.total
            )));
        }
        if space.is_discrete() && t < space.h() {
            return Err(GeomError::Range(format!(
                "variation scale {t} below the resolution {}",
                space.h()
            )));
        }
        let (q_t, arc) = space.point_at_with_arc(&g_qr, t)?;
        if arc == 0.0 {
            return Err(GeomError::Range(format!(
                "variation scale {t} snaps onto the vertex"
            )));
        }
        let d = space.distance(p, q_t)?;
        let residual = d - d_pq + cos_angle * arc;
        out.push(VariationSample {
            t: arc,
            residual,
            ratio: residual / arc,
        });
    }
    Ok(out)
}
