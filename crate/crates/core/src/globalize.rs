//! The constructive globalization engine.
//!
//! Starting from a certified bad angle, the engine (1) splits the triangle at
//! the negative minimum of the excess function along the base, (2) iterates
//! the split to localize the defect to any target scale, (3) estimates the
//! largest ball around a point on which sampled triangles stay good, and
//! (4) performs distance-descent steps toward the base point, each step
//! certified by fresh angle measurements. The audit assembles these into a
//! verdict: either the comparison inequality holds at resolution or a trace
//! descends into a curvature-defect region.
//!
//! Soundness discipline: every certificate the engine emits is gated on
//! direct re-measurement (never on the model-space implications alone). The
//! gluing-comparison and adjacent-angle evidence for each descent step is
//! recorded alongside as diagnostics. On a genuinely defective space the
//! crossing-side sub-angle of a split can come out good even where the
//! distance condition would mandate badness on a true curvature-bounded
//! space; such misses are recorded on the certificate rather than rejected.

use serde::Serialize;

use crate::comparison::{
    badness, default_badness_tol, default_probe, local_check, measure_angle, triple_slack,
    BadAngleCertificate, Triangle,
};
use crate::error::{GeomError, Result};
use crate::space::{mix_seed, point_salt, GeodesicPolyline, PointRef, Space};
use crate::spaceform::{
    alexandrov_compare, build_comparison_triangle, comparison_angle_with, AlexandrovComparison,
    Curvature, SideTriple, Vertex,
};

/// Minimum sample count for the excess-function scan.
pub const MIN_SPLIT_SAMPLES: usize = 16;

/// Triangles this close to the k > 0 diameter are rejected: the
/// distance-bound slack policy is only sound away from the model diameter.
pub const SPHERICAL_REGIME_FRACTION: f64 = 0.99;

/// A triangle prepared for splitting: apex `p`, base oriented from the bad
/// vertex `r1` to `r2`.
#[derive(Debug, Clone)]
pub struct SplitTriangle {
    pub apex: PointRef,
    pub r1: PointRef,
    pub r2: PointRef,
    pub g_apex_r1: GeodesicPolyline,
    pub g_apex_r2: GeodesicPolyline,
    /// Base geodesic, oriented r1 -> r2.
    pub g_base: GeodesicPolyline,
}

impl SplitTriangle {
    pub fn new(space: &Space, apex: PointRef, r1: PointRef, r2: PointRef) -> Result<Self> {
        Ok(SplitTriangle {
            apex,
            r1,
            r2,
            g_apex_r1: space.geodesic(apex, r1)?,
            g_apex_r2: space.geodesic(apex, r2)?,
            g_base: space.geodesic(r1, r2)?,
        })
    }

    /// Orient a bad-angle certificate for splitting: the certified vertex
    /// becomes `r1` and the farther of the remaining vertices the apex.
    pub fn from_certificate(space: &Space, cert: &BadAngleCertificate) -> Result<Self> {
        let r1 = match cert.vertex {
            Vertex::P => cert.p,
            Vertex::Q => cert.q,
            Vertex::R => cert.r,
        };
        let (x, y) = match cert.vertex {
            Vertex::P => (cert.q, cert.r),
            Vertex::Q => (cert.p, cert.r),
            Vertex::R => (cert.p, cert.q),
        };
        let (sx, sy) = match cert.vertex {
            // side lengths from r1 to each remaining vertex
            Vertex::P => (cert.sides.c, cert.sides.b),
            Vertex::Q => (cert.sides.c, cert.sides.a),
            Vertex::R => (cert.sides.b, cert.sides.a),
        };
        let (apex, r2) = if sx >= sy { (x, y) } else { (y, x) };
        SplitTriangle::new(space, apex, r1, r2)
    }

    /// (|p r1|, |p r2|, |r1 r2|).
    pub fn side_lengths(&self) -> (f64, f64, f64) {
        (
            self.g_apex_r1.total,
            self.g_apex_r2.total,
            self.g_base.total,
        )
    }

    fn check_spherical_regime(&self, k: Curvature) -> Result<()> {
        if let Some(dia) = k.diameter_bound() {
            let (a, b, c) = self.side_lengths();
            let max_side = a.max(b).max(c);
            if max_side >= SPHERICAL_REGIME_FRACTION * dia {
                return Err(GeomError::OutOfRegime(format!(
                    "max side {max_side} within {} of the diameter {dia}",
                    (1.0 - SPHERICAL_REGIME_FRACTION)
                )));
            }
        }
        Ok(())
    }
}

/// Slack for distance-bound checks: the discretization budget, widened by
/// one percent of the base for long-side spherical triangles where the
/// model bound only holds up to a correction vanishing with the base.
fn distance_bound_slack(space: &Space, k: Curvature, base_len: f64, longest_apex_side: f64) -> f64 {
    let mut s = (5.0 * space.h()).max(1e-9);
    if let Some(dia) = k.diameter_bound() {
        if longest_apex_side >= 0.5 * dia {
            s = s.max(0.01 * base_len);
        }
    }
    s
}

/// Badness report for one sub-angle at the split point.
#[derive(Debug, Clone)]
pub struct SubAngleReport {
    /// The base endpoint this sub-angle faces.
    pub toward: PointRef,
    pub measured: f64,
    /// Probe scale the measurement used.
    pub probe: f64,
    pub comparison: f64,
    /// comparison - measured.
    pub deficit: f64,
    /// Whether |r_i s0| <= |r_i p| held, which on a curvature-bounded space
    /// forces this side bad.
    pub mandated: bool,
    /// deficit > tol under independent re-measurement.
    pub confirmed: bool,
}

/// Where the excess function dips negative, with both sub-angles certified.
#[derive(Debug, Clone)]
pub struct SplitCertificate {
    pub s0: PointRef,
    /// Arclength of s0 along the base from r1.
    pub arc_from_r1: f64,
    /// f(s0) = |p s0| - |p~ s0~|; strictly below -tol.
    pub excess: f64,
    pub dist_apex_s0: f64,
    /// max(|p r1|, |p r2|).
    pub base_bound: f64,
    /// |p s0| <= base_bound + slack.
    pub bound_ok: bool,
    pub toward_r1: SubAngleReport,
    pub toward_r2: SubAngleReport,
    /// Interior samples scanned.
    pub samples: usize,
}

impl SplitCertificate {
    /// The confirmed sub-angle with the larger deficit.
    pub fn best_confirmed(&self) -> &SubAngleReport {
        match (self.toward_r1.confirmed, self.toward_r2.confirmed) {
            (true, false) => &self.toward_r1,
            (false, true) => &self.toward_r2,
            _ => {
                if self.toward_r1.deficit >= self.toward_r2.deficit {
                    &self.toward_r1
                } else {
                    &self.toward_r2
                }
            }
        }
    }

    /// Sub-angles whose distance condition mandated badness but whose
    /// re-measurement did not confirm it. Nonempty only on spaces that
    /// violate the curvature bound.
    pub fn mandate_misses(&self) -> Vec<PointRef> {
        let mut out = Vec::new();
        for rep in [&self.toward_r1, &self.toward_r2] {
            if rep.mandated && !rep.confirmed {
                out.push(rep.toward);
            }
        }
        out
    }
}

/// Evaluate the excess f(t) = |p s(t)| - |p~ s~(t)| at one base arclength.
struct ExcessEval<'a> {
    space: &'a Space,
    tri: &'a SplitTriangle,
    comp: crate::spaceform::ComparisonTriangle,
}

impl<'a> ExcessEval<'a> {
    fn new(space: &'a Space, k: Curvature, tri: &'a SplitTriangle) -> Result<Self> {
        let (dp1, dp2, base) = tri.side_lengths();
        // labeling (p -> P, r1 -> Q, r2 -> R)
        let sides = SideTriple::from_distances(dp1, dp2, base)?;
        let comp = build_comparison_triangle(k, sides)?;
        Ok(ExcessEval { space, tri, comp })
    }

    fn eval(&self, t: f64) -> Result<(PointRef, f64, f64)> {
        let (s, arc) = self.space.point_at_with_arc(&self.tri.g_base, t)?;
        let d = self.space.distance(self.tri.apex, s)?;
        let model = self
            .comp
            .distance_to_side_point(Vertex::P, arc.min(self.comp.sides.a))?;
        Ok((s, arc, d - model))
    }
}

/// Scan the base of a bad triangle for the negative minimum of the excess
/// function (`m` uniform interior samples plus one golden-section refinement
/// pass), then certify the sub-angles at the split point by independent
/// re-measurement. Returns the best split point that carries at least one
/// confirmed bad sub-angle.
pub fn split_at_min(
    space: &Space,
    k: Curvature,
    tri: &SplitTriangle,
    m: usize,
    tol: f64,
) -> Result<SplitCertificate> {
    if m < MIN_SPLIT_SAMPLES {
        return Err(GeomError::Range(format!(
            "split resolution m={m} below the minimum {MIN_SPLIT_SAMPLES}"
        )));
    }
    tri.check_spherical_regime(k)?;
    let base = tri.g_base.total;
    if base <= 0.0 {
        return Err(GeomError::DegenerateGeodesic);
    }
    let eval = ExcessEval::new(space, k, tri)?;
    let mut grid: Vec<(f64, f64)> = Vec::with_capacity(m); // (arc, excess)
    let mut scanned = 0usize;
    let mut min_excess = f64::INFINITY;
    for i in 0..m {
        let t = base * (i + 1) as f64 / (m + 1) as f64;
        let (_, arc, f) = eval.eval(t)?;
        scanned += 1;
        if grid.last().is_some_and(|(a, _)| *a == arc) {
            continue; // snapped onto the previous sample
        }
        grid.push((arc, f));
        min_excess = min_excess.min(f);
    }
    if grid.is_empty() {
        return Err(GeomError::ResolutionFloor(format!(
            "base of length {base} has no interior samples at resolution {}",
            space.h()
        )));
    }
    let best_idx = (0..grid.len())
        .min_by(|&i, &j| grid[i].1.total_cmp(&grid[j].1))
        .unwrap();

    // golden-section refinement around the best sample
    let lo = if best_idx == 0 {
        0.0
    } else {
        grid[best_idx - 1].0
    };
    let hi = if best_idx + 1 == grid.len() {
        base
    } else {
        grid[best_idx + 1].0
    };
    let refined = golden_min(
        |t| eval.eval(t).map(|(_, _, f)| f),
        lo.max(base * 1e-9),
        hi.min(base * (1.0 - 1e-9)),
        48,
    )?;

    // candidate split points, best first
    let mut candidates: Vec<f64> = vec![refined];
    let mut order: Vec<usize> = (0..grid.len()).collect();
    order.sort_by(|&i, &j| grid[i].1.total_cmp(&grid[j].1));
    candidates.extend(order.iter().take(6).map(|&i| grid[i].0));

    for t in candidates {
        let (s0, arc, f) = eval.eval(t)?;
        min_excess = min_excess.min(f);
        if !(f < -tol) {
            continue;
        }
        if arc <= 0.0 || arc >= base {
            continue;
        }
        let mut cert = certify_split(space, k, tri, s0, arc, f, tol)?;
        cert.samples = scanned;
        if cert.toward_r1.confirmed || cert.toward_r2.confirmed {
            return Ok(cert);
        }
    }
    Err(GeomError::NoNegativeExcess { min_excess, m })
}

fn golden_min<F: FnMut(f64) -> Result<f64>>(
    mut f: F,
    mut lo: f64,
    mut hi: f64,
    iters: usize,
) -> Result<f64> {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    if !(hi > lo) {
        return Ok(lo);
    }
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    for _ in 0..iters {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2)?;
        }
        if hi - lo < 1e-12 * (1.0 + hi.abs()) {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Measure both sub-angles at the split point against their own comparison
/// angles.
fn certify_split(
    space: &Space,
    k: Curvature,
    tri: &SplitTriangle,
    s0: PointRef,
    arc: f64,
    excess: f64,
    tol: f64,
) -> Result<SplitCertificate> {
    let (dp1, dp2, base) = tri.side_lengths();
    let dist_apex_s0 = space.distance(tri.apex, s0)?;
    let (toward_r1_path, toward_r2_path) = tri.g_base.split_at(arc, s0);
    let g_s0_apex = space.geodesic(s0, tri.apex)?;
    let probe = default_probe(
        space,
        g_s0_apex.total,
        toward_r1_path.total.min(toward_r2_path.total),
    );

    let sub_report = |sub_path: &GeodesicPolyline,
                      endpoint: PointRef,
                      d_r_apex: f64|
     -> Result<SubAngleReport> {
        let d_r_s0 = sub_path.total;
        let measured = measure_angle(
            space,
            k,
            s0,
            &g_s0_apex,
            sub_path,
            probe.min(d_r_s0).min(g_s0_apex.total),
        )?;
        // vertices (P = apex, Q = s0, R = endpoint)
        let sides = SideTriple::from_distances(dist_apex_s0, d_r_apex, d_r_s0)?;
        let comparison = comparison_angle_with(k, &sides, Vertex::Q, triple_slack(space, &sides))?;
        let deficit = comparison - measured.value;
        let mandated =
            d_r_s0 <= d_r_apex && k.diameter_bound().map_or(true, |dia| d_r_apex < 0.5 * dia);
        Ok(SubAngleReport {
            toward: endpoint,
            measured: measured.value,
            probe: measured.probe,
            comparison,
            deficit,
            mandated,
            confirmed: deficit > tol,
        })
    };

    let toward_r1 = sub_report(&toward_r1_path, tri.r1, dp1)?;
    let toward_r2 = sub_report(&toward_r2_path, tri.r2, dp2)?;
    let base_bound = dp1.max(dp2);
    let slack = distance_bound_slack(space, k, base, dp1.max(dp2));
    Ok(SplitCertificate {
        s0,
        arc_from_r1: arc,
        excess,
        dist_apex_s0,
        base_bound,
        bound_ok: dist_apex_s0 <= base_bound + slack,
        toward_r1,
        toward_r2,
        samples: MIN_SPLIT_SAMPLES,
    })
}

/// Outcome of iterated localization: the refinement point `s_bar` and the
/// final bad pair within the target scale of it.
#[derive(Debug, Clone)]
pub struct LocalizeResult {
    pub s_bar: PointRef,
    /// (s1, s2): the angle at s1 toward s2 is certified bad.
    pub pair: (PointRef, PointRef),
    pub dist_apex: f64,
    pub iterations: usize,
    /// max(|p r1|, |p r2|) of the input triangle.
    pub bound_initial: f64,
    /// The same bound for the final pair; never above the initial bound
    /// plus slack.
    pub bound_final: f64,
    pub bound_ok: bool,
    pub last_cert: SplitCertificate,
}

/// Repeatedly split toward the certified-bad sub-triangle until the active
/// base is shorter than `delta`.
pub fn localize(
    space: &Space,
    k: Curvature,
    tri: &SplitTriangle,
    delta: f64,
    max_iter: usize,
    m: usize,
    tol: f64,
) -> Result<LocalizeResult> {
    let floor = 4.0 * space.h();
    if delta < floor {
        return Err(GeomError::Range(format!(
            "target scale {delta} below the resolution floor {floor}"
        )));
    }
    let (dp1, dp2, _) = tri.side_lengths();
    let bound_initial = dp1.max(dp2);
    let slack = distance_bound_slack(space, k, tri.g_base.total, bound_initial);
    let mut current = tri.clone();
    let mut bound = bound_initial;
    let mut bound_ok = true;
    let mut iterations = 0usize;
    loop {
        if current.g_base.total < floor && iterations > 0 {
            return Err(GeomError::ResolutionFloor(format!(
                "active base {} under 4h = {floor} before reaching {delta}",
                current.g_base.total
            )));
        }
        if iterations >= max_iter {
            return Err(GeomError::IterationBudget(iterations));
        }
        let cert = split_at_min(space, k, &current, m, tol)?;
        iterations += 1;
        let chosen = cert.best_confirmed().clone();
        let endpoint = chosen.toward;
        let d_endpoint = space.distance(current.apex, endpoint)?;
        let new_bound = cert.dist_apex_s0.max(d_endpoint);
        if new_bound > bound + slack {
            bound_ok = false;
        }
        bound = new_bound;
        let next = SplitTriangle::new(space, current.apex, cert.s0, endpoint)?;
        let done = next.g_base.total < delta;
        current = next;
        if done {
            return Ok(LocalizeResult {
                s_bar: cert.s0,
                pair: (cert.s0, endpoint),
                dist_apex: cert.dist_apex_s0,
                iterations,
                bound_initial,
                bound_final: new_bound,
                bound_ok,
                last_cert: cert,
            });
        }
    }
}

/// Configuration for ball-radius estimation.
#[derive(Debug, Clone)]
pub struct DeltaConfig {
    pub budget: usize,
    pub tol: f64,
    pub seed: u64,
    /// Geometric grid size between the cap and the resolution floor.
    pub grid: usize,
}

impl DeltaConfig {
    pub fn new(space: &Space, seed: u64) -> Self {
        DeltaConfig {
            budget: 220,
            tol: default_badness_tol(space),
            seed,
            grid: 16,
        }
    }
}

/// Estimate the descent scale at `o`: half the distance to the base point,
/// capped by the largest sampled-good ball radius around `o`.
///
/// The radius scan walks a fixed geometric grid downward from the cap to the
/// resolution floor and returns the first radius whose ball checks good.
/// Because the sample stream at each radius extends under a larger budget,
/// shrinking the budget never increases the estimate.
pub fn estimate_delta(
    space: &Space,
    k: Curvature,
    p: PointRef,
    o: PointRef,
    cfg: &DeltaConfig,
) -> Result<f64> {
    let d_po = space.distance(p, o)?;
    if d_po <= 0.0 {
        return Err(GeomError::Range(
            "base point and center coincide".to_string(),
        ));
    }
    let cap = d_po / 2.0;
    let floor = (4.0 * space.h()).max(1e-4 * cap).min(cap);
    let grid = cfg.grid.max(2);
    let ratio = (floor / cap).powf(1.0 / (grid - 1) as f64);
    let mut radius = cap;
    for j in 0..grid {
        let good = match local_check(
            space,
            k,
            o,
            radius,
            cfg.budget,
            cfg.tol,
            mix_seed(cfg.seed, j as u64),
        ) {
            Ok(report) => report.is_good(),
            Err(GeomError::EmptyBall) => false,
            Err(e) => return Err(e),
        };
        if good {
            return Ok(radius.min(cap));
        }
        radius *= ratio;
    }
    Err(GeomError::ResolutionFloor(format!(
        "no good ball around the center down to radius {floor}"
    )))
}

/// Configuration for one descent step.
#[derive(Debug, Clone)]
pub struct DescentConfig {
    /// Witness pairs are sampled within this fraction of delta around o.
    pub witness_radius_frac: f64,
    pub witness_pairs: usize,
    pub split_samples: usize,
    pub tol: f64,
    pub seed: u64,
    pub max_anchor_iters: usize,
    pub localize_iters: usize,
}

impl DescentConfig {
    pub fn new(space: &Space, seed: u64) -> Self {
        DescentConfig {
            witness_radius_frac: 0.1,
            witness_pairs: 60,
            split_samples: 64,
            tol: default_badness_tol(space),
            seed,
            max_anchor_iters: 8,
            localize_iters: 48,
        }
    }
}

/// Diagnostics recorded alongside a descent step: the lemma-route evidence
/// used to transmit badness from the witness to the anchor.
#[derive(Debug, Clone)]
pub struct AnchorEvidence {
    /// Gluing comparison of the two triangles hinged at the anchor.
    pub glue: Option<AlexandrovComparison>,
    /// Adjacent angles at the anchor on [p r1] against r2; their sum should
    /// be straight.
    pub adjacent_sum: Option<f64>,
    /// The triangle (r2, r1, anchor) showed no badness at the step
    /// tolerance.
    pub interior_good: bool,
}

/// One accepted descent step.
#[derive(Debug, Clone)]
pub struct DescentStep {
    pub o_next: PointRef,
    pub dist_p_onext: f64,
    pub dist_o_onext: f64,
    pub witness: (PointRef, PointRef),
    pub witness_deficit: f64,
    pub anchor: PointRef,
    pub anchor_deficit: f64,
    pub evidence: AnchorEvidence,
    pub localize: LocalizeResult,
}

/// Test whether the angle at `r1` of triangle (p, r1, r2) is bad; returns
/// the certificate.
fn witness_badness(
    space: &Space,
    k: Curvature,
    p: PointRef,
    r1: PointRef,
    r2: PointRef,
    tol: f64,
) -> Result<Option<BadAngleCertificate>> {
    let tri = Triangle::from_vertices(space, p, r1, r2)?;
    badness(space, k, &tri, Vertex::Q, tol)
}

/// Collect the lemma-route evidence for an anchor on [p r1] against r2.
fn anchor_evidence(
    space: &Space,
    k: Curvature,
    p: PointRef,
    r1: PointRef,
    r2: PointRef,
    anchor: PointRef,
    tol: f64,
) -> AnchorEvidence {
    let dists = |a: PointRef, b: PointRef| space.distance(a, b);
    let glue = (|| -> Result<AlexandrovComparison> {
        let pq = dists(r2, anchor)?;
        let qr = dists(anchor, r1)?;
        let qs = dists(anchor, p)?;
        let pr = dists(r2, r1)?;
        let ps = dists(r2, p)?;
        alexandrov_compare(k, pq, qr, qs, pr, ps)
    })()
    .ok();
    let adjacent_sum = (|| -> Result<f64> {
        let g_p_r1 = space.geodesic(p, r1)?;
        let arc = space.distance(g_p_r1.start(), anchor)?;
        let check = crate::comparison::adjacent_angle_check(
            space,
            k,
            &g_p_r1,
            anchor,
            r2,
            default_probe(space, arc, g_p_r1.total - arc),
        )?;
        Ok(check.sum)
    })()
    .ok();
    let interior_good = (|| -> Result<bool> {
        let tri = Triangle::from_vertices(space, r2, r1, anchor)?;
        for v in Vertex::ALL {
            if badness(space, k, &tri, v, tol)?.is_some() {
                return Ok(false);
            }
        }
        Ok(true)
    })()
    .unwrap_or(false);
    AnchorEvidence {
        glue,
        adjacent_sum,
        interior_good,
    }
}

/// One distance-descent step: find a bad witness triangle with both base
/// vertices near `o`, pull the bad angle onto an anchor at distance
/// |po| - delta/3 from p, split, and localize on the anchored pair. The
/// returned point is certified closer to p by delta/3 and within delta
/// of o.
#[allow(clippy::too_many_arguments)]
pub fn descent_step(
    space: &Space,
    k: Curvature,
    p: PointRef,
    o: PointRef,
    delta: f64,
    cfg: &DescentConfig,
    hint: Option<(PointRef, PointRef)>,
) -> Result<DescentStep> {
    let d_po = space.distance(p, o)?;
    let target = d_po - delta / 3.0;
    if target <= 0.0 {
        return Err(GeomError::Range(format!(
            "descent target {target} not positive (delta {delta} too large)"
        )));
    }
    let step_slack = (space.h()).max(1e-9) + 1e-12 * d_po;

    // candidate witness pairs: the hint first, then seeded samples near o
    let radius_w = (delta * cfg.witness_radius_frac)
        .max(space.h() * 2.0)
        .max(1e-12);
    let mut pairs: Vec<(PointRef, PointRef)> = Vec::new();
    if let Some((a, b)) = hint {
        pairs.push((a, b));
        pairs.push((b, a));
    }
    let seed = mix_seed(cfg.seed, point_salt(o));
    if let Ok(samples) = space.sample_in_ball(o, radius_w, 2 * cfg.witness_pairs, seed) {
        for chunk in samples.chunks_exact(2) {
            pairs.push((chunk[0], chunk[1]));
            pairs.push((chunk[1], chunk[0]));
        }
    }

    for (r1, r2) in pairs {
        if r1 == r2 || r1 == p || r2 == p {
            continue;
        }
        match try_descent_from_witness(space, k, p, o, delta, target, step_slack, r1, r2, cfg) {
            Ok(Some(step)) => return Ok(step),
            Ok(None) => continue,
            Err(e @ GeomError::OutOfRegime(_)) => return Err(e),
            // a failed candidate is not fatal; the next pair may work
            Err(_) => continue,
        }
    }
    Err(GeomError::WitnessNotFound)
}

#[allow(clippy::too_many_arguments)]
fn try_descent_from_witness(
    space: &Space,
    k: Curvature,
    p: PointRef,
    o: PointRef,
    delta: f64,
    target: f64,
    step_slack: f64,
    r1: PointRef,
    r2: PointRef,
    cfg: &DescentConfig,
) -> Result<Option<DescentStep>> {
    let witness_cert = match witness_badness(space, k, p, r1, r2, cfg.tol)? {
        Some(c) => c,
        None => return Ok(None),
    };

    // stage 1: anchor on [p r1] at distance target from p, then split until
    // the bad sub-angle faces the anchor
    let mut a = r1;
    let mut b = r2;
    let mut anchor = a;
    let mut anchor_deficit = 0.0;
    let mut evidence = None;
    let mut stage2: Option<SplitCertificate> = None;
    for _ in 0..cfg.max_anchor_iters {
        let g_pa = space.geodesic(p, a)?;
        anchor = if g_pa.total <= target + step_slack {
            a
        } else {
            space.point_at(&g_pa, target)?
        };
        let anchor_cert = match witness_badness(space, k, p, anchor, b, cfg.tol)? {
            Some(c) => c,
            None => return Ok(None),
        };
        anchor_deficit = anchor_cert.deficit;
        if evidence.is_none() {
            evidence = Some(anchor_evidence(space, k, p, a, b, anchor, cfg.tol));
        }
        let tri = SplitTriangle::new(space, p, anchor, b)?;
        let cert = match split_at_min(space, k, &tri, cfg.split_samples, cfg.tol) {
            Ok(c) => c,
            Err(GeomError::NoNegativeExcess { .. }) => {
                // one refinement retry at doubled resolution
                match split_at_min(space, k, &tri, cfg.split_samples * 2, cfg.tol) {
                    Ok(c) => c,
                    Err(_) => return Ok(None),
                }
            }
            Err(e) => return Err(e),
        };
        if cert.toward_r1.confirmed {
            stage2 = Some(cert);
            break;
        }
        // the bad sub-angle faces the far endpoint; re-anchor on the
        // shrunken pair
        a = cert.s0;
        b = cert.toward_r2.toward;
    }
    let cert = match stage2 {
        Some(c) => c,
        None => return Ok(None),
    };

    // stage 2: cap the split point at the target distance and localize on
    // the anchored pair
    let s = cert.s0;
    let d_ps = cert.dist_apex_s0;
    let r_bar2 = if d_ps <= target + step_slack {
        s
    } else {
        let g_ps = space.geodesic(p, s)?;
        let candidate = space.point_at(&g_ps, target)?;
        match witness_badness(space, k, p, candidate, anchor, cfg.tol)? {
            Some(_) => candidate,
            None => return Ok(None),
        }
    };
    let tri2 = SplitTriangle::new(space, p, r_bar2, anchor)?;
    let delta_target = (4.0 * space.h()).max(1e-9 * delta).max(1e-12);
    let loc = match localize(
        space,
        k,
        &tri2,
        delta_target.max(4.0 * space.h()),
        cfg.localize_iters,
        cfg.split_samples,
        cfg.tol,
    ) {
        Ok(l) => l,
        Err(GeomError::ResolutionFloor(_)) | Err(GeomError::NoNegativeExcess { .. }) => {
            // the pair is already at resolution; take the capped split point
            LocalizeResult {
                s_bar: r_bar2,
                pair: (r_bar2, anchor),
                dist_apex: space.distance(p, r_bar2)?,
                iterations: 0,
                bound_initial: tri2.g_apex_r1.total.max(tri2.g_apex_r2.total),
                bound_final: tri2.g_apex_r1.total.max(tri2.g_apex_r2.total),
                bound_ok: true,
                last_cert: cert.clone(),
            }
        }
        Err(e) => return Err(e),
    };
    let o_next = loc.s_bar;
    let dist_p_onext = space.distance(p, o_next)?;
    let dist_o_onext = space.distance(o, o_next)?;
    if dist_p_onext
        > target + step_slack + distance_bound_slack(space, k, tri2.g_base.total, target)
    {
        return Ok(None);
    }
    if dist_o_onext >= delta {
        return Ok(None);
    }
    Ok(Some(DescentStep {
        o_next,
        dist_p_onext,
        dist_o_onext,
        witness: (r1, r2),
        witness_deficit: witness_cert.deficit,
        anchor,
        anchor_deficit,
        evidence: evidence.expect("anchor evidence recorded on first iteration"),
        localize: loc,
    }))
}

/// Why a descent run stopped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Termination {
    /// The seed triangle showed no badness.
    NoBadness,
    /// No bad witness triangle near the current point at this resolution.
    WitnessNotFound,
    /// Ball estimation hit the resolution floor.
    ResolutionFloor,
    /// The step budget ran out.
    StepBudget,
    /// A step failed for another reason (recorded).
    StepFailed(String),
}

/// One row of the descent trace.
#[derive(Debug, Clone)]
pub struct TraceEntry {
    pub point: PointRef,
    pub dist_p: f64,
    /// The scale estimated at this point; `None` when estimation failed or
    /// was never reached.
    pub delta: Option<f64>,
    /// Deficit of the witness that drove the step out of this point (the
    /// seed deficit for the entry row).
    pub witness_deficit: f64,
    /// Distance to the next trace point.
    pub hop_to_next: Option<f64>,
    /// Full certificate of the step taken out of this point.
    pub step: Option<Box<DescentStep>>,
}

/// Defect region report at the end of a violated audit.
#[derive(Debug, Clone)]
pub struct TerminalReport {
    pub point: PointRef,
    pub dist_p: f64,
    /// Worst deficit of the terminal-ball re-check (doubled budget).
    pub worst_deficit: f64,
    pub ball_radius: f64,
}

/// The audited descent: base point, per-step rows, terminal region.
#[derive(Debug, Clone)]
pub struct DescentTrace {
    pub base: PointRef,
    pub entries: Vec<TraceEntry>,
    pub terminal: Option<TerminalReport>,
}

/// Pass/fail of the three trace invariants.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TraceInvariants {
    /// |p o_{i+1}| <= |p o_i| - delta_i / 3 + tol on every step.
    pub step_decrease: bool,
    /// |o_i o_{i+1}| < delta_i on every step.
    pub step_locality: bool,
    /// sum of delta_i / 3 <= |p o_1| + tol.
    pub delta_sum: bool,
}

impl DescentTrace {
    pub fn check_invariants(&self, tol: f64) -> TraceInvariants {
        let mut step_decrease = true;
        let mut step_locality = true;
        let mut delta_total = 0.0;
        for w in self.entries.windows(2) {
            let (cur, next) = (&w[0], &w[1]);
            if let Some(delta) = cur.delta {
                delta_total += delta / 3.0;
                if next.dist_p > cur.dist_p - delta / 3.0 + tol {
                    step_decrease = false;
                }
                match cur.hop_to_next {
                    Some(hop) if hop < delta => {}
                    _ => step_locality = false,
                }
            } else {
                step_decrease = false;
                step_locality = false;
            }
        }
        let delta_sum = match self.entries.first() {
            Some(first) => delta_total <= first.dist_p + tol,
            None => true,
        };
        TraceInvariants {
            step_decrease,
            step_locality,
            delta_sum,
        }
    }
}

/// Budgets and knobs of a globalization audit.
#[derive(Debug, Clone)]
pub struct AuditBudgets {
    pub max_steps: usize,
    pub split_samples: usize,
    pub local_check_budget: usize,
    pub witness_pairs: usize,
    pub seed: u64,
    /// Badness tolerance override; defaults per backend.
    pub tol: Option<f64>,
    /// Scale of the entry localization; defaults to a coarse multiple of
    /// the resolution.
    pub entry_scale: Option<f64>,
}

impl AuditBudgets {
    pub fn new(seed: u64) -> Self {
        AuditBudgets {
            max_steps: 16,
            split_samples: 64,
            local_check_budget: 220,
            witness_pairs: 60,
            seed,
            tol: None,
            entry_scale: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AuditVerdict {
    Holds,
    Violated,
}

/// Result of a globalization audit.
#[derive(Debug, Clone)]
pub struct AuditOutcome {
    pub verdict: AuditVerdict,
    pub termination: Termination,
    pub trace: DescentTrace,
    /// The tolerance the audit ran at.
    pub tol: f64,
}

impl AuditOutcome {
    pub fn invariants(&self, space: &Space) -> TraceInvariants {
        self.trace.check_invariants(self.tol.max(5.0 * space.h()))
    }
}

/// Audit the comparison inequality from a seed triangle: report `Holds` when
/// no badness is detectable, otherwise localize into the defect set and
/// iterate descent steps until the witness search fails, the resolution
/// floor is hit, or the budget runs out. The terminal ball is re-checked at
/// doubled budget and the defect pinpointed by a final localization.
pub fn globalization_audit(
    space: &Space,
    k: Curvature,
    seed_tri: &Triangle,
    budgets: &AuditBudgets,
) -> Result<AuditOutcome> {
    let tol = budgets.tol.unwrap_or_else(|| default_badness_tol(space));
    let sides = seed_tri.sides()?;
    sides.validate_with(k, triple_slack(space, &sides))?;
    if let Some(dia) = k.diameter_bound() {
        let max_side = sides.a.max(sides.b).max(sides.c);
        if max_side >= SPHERICAL_REGIME_FRACTION * dia
            || sides.perimeter() >= k.perimeter_bound().unwrap() - sides.default_slack()
        {
            return Err(GeomError::OutOfRegime(format!(
                "seed triangle too close to the k > 0 diameter ({max_side} vs {dia})"
            )));
        }
    }

    // seed badness: worst certificate over the three vertices
    let mut worst: Option<BadAngleCertificate> = None;
    for v in Vertex::ALL {
        if let Some(cert) = badness(space, k, seed_tri, v, tol)? {
            if worst.as_ref().is_none_or(|w| cert.deficit > w.deficit) {
                worst = Some(cert);
            }
        }
    }
    let seed_cert = match worst {
        Some(c) => c,
        None => {
            return Ok(AuditOutcome {
                verdict: AuditVerdict::Holds,
                termination: Termination::NoBadness,
                trace: DescentTrace {
                    base: seed_tri.p,
                    entries: Vec::new(),
                    terminal: None,
                },
                tol,
            });
        }
    };

    // enter the defect set: localize the seed badness to the entry scale
    let split_tri = SplitTriangle::from_certificate(space, &seed_cert)?;
    let p = split_tri.apex;
    let entry_scale = budgets
        .entry_scale
        .unwrap_or_else(|| (10.0 * space.h()).max(1e-3 * seed_tri.perimeter()));
    let entry_scale = entry_scale.max(4.0 * space.h());
    let entry = localize(
        space,
        k,
        &split_tri,
        entry_scale,
        64,
        budgets.split_samples,
        tol,
    );
    let (o1, mut hint, entry_deficit) = match entry {
        Ok(loc) => {
            let deficit = loc.last_cert.best_confirmed().deficit;
            (loc.s_bar, Some(loc.pair), deficit)
        }
        Err(GeomError::NoNegativeExcess { .. }) | Err(GeomError::ResolutionFloor(_)) => {
            // localization cannot refine below the seed badness; audit the
            // region around the certified vertex directly
            (split_tri.r1, None, seed_cert.deficit)
        }
        Err(e) => return Err(e),
    };

    let mut entries = vec![TraceEntry {
        point: o1,
        dist_p: space.distance(p, o1)?,
        delta: None,
        witness_deficit: entry_deficit,
        hop_to_next: None,
        step: None,
    }];
    let delta_cfg = DeltaConfig {
        budget: budgets.local_check_budget,
        tol,
        seed: mix_seed(budgets.seed, 0xde17a),
        grid: 16,
    };
    let mut descent_cfg = DescentConfig {
        witness_radius_frac: 0.1,
        witness_pairs: budgets.witness_pairs,
        split_samples: budgets.split_samples,
        tol,
        seed: budgets.seed,
        max_anchor_iters: 8,
        localize_iters: 48,
    };

    let mut termination = Termination::StepBudget;
    for step_idx in 0..budgets.max_steps {
        let o_cur = entries.last().unwrap().point;
        let delta = match estimate_delta(space, k, p, o_cur, &delta_cfg) {
            Ok(d) => d,
            Err(GeomError::ResolutionFloor(_)) => {
                termination = Termination::ResolutionFloor;
                break;
            }
            Err(e) => return Err(e),
        };
        entries.last_mut().unwrap().delta = Some(delta);
        descent_cfg.seed = mix_seed(budgets.seed, step_idx as u64 + 1);
        let step = match descent_step(space, k, p, o_cur, delta, &descent_cfg, hint) {
            Ok(s) => s,
            Err(GeomError::WitnessNotFound) => {
                termination = Termination::WitnessNotFound;
                break;
            }
            Err(GeomError::OutOfRegime(m)) => {
                termination = Termination::StepFailed(format!("out of regime: {m}"));
                break;
            }
            Err(e) => {
                termination = Termination::StepFailed(e.to_string());
                break;
            }
        };
        entries.last_mut().unwrap().hop_to_next = Some(step.dist_o_onext);
        let next_entry = TraceEntry {
            point: step.o_next,
            dist_p: step.dist_p_onext,
            delta: None,
            witness_deficit: step.witness_deficit,
            hop_to_next: None,
            step: None,
        };
        hint = Some(step.localize.pair);
        entries.last_mut().unwrap().step = Some(Box::new(step));
        entries.push(next_entry);
    }

    // terminal re-check at doubled budget, then pinpoint the defect. The
    // ball radius is taken from the last scale at which badness was still
    // detectable: twice the final descent scale (smooth violations fade
    // quadratically with radius, so sub-scale balls check good).
    let o_last = entries.last().unwrap().point;
    let d_last = space.distance(p, o_last)?;
    let last_scale = entries
        .iter()
        .rev()
        .find_map(|e| e.delta)
        .unwrap_or(entry_scale);
    let r_term = (4.0 * space.h())
        .max(1e-3 * d_last)
        .max((2.0 * last_scale).min(d_last / 2.0));
    let recheck = local_check(
        space,
        k,
        o_last,
        r_term,
        2 * budgets.local_check_budget,
        tol,
        mix_seed(budgets.seed, 0x7e57),
    );
    let terminal = match recheck {
        Ok(ref report) if report.worst.is_some() => {
            let cert = report.worst.clone().unwrap();
            let pin_tri = SplitTriangle::from_certificate(space, &cert)?;
            let pin_scale = (4.0 * space.h()).max(1e-3 * r_term);
            let pin = localize(
                space,
                k,
                &pin_tri,
                pin_scale,
                64,
                budgets.split_samples,
                tol,
            )
            .map(|l| l.s_bar)
            .unwrap_or(pin_tri.r1);
            TerminalReport {
                point: pin,
                dist_p: space.distance(p, pin)?,
                worst_deficit: cert.deficit,
                ball_radius: r_term,
            }
        }
        _ => TerminalReport {
            point: o_last,
            dist_p: space.distance(p, o_last)?,
            worst_deficit: 0.0,
            ball_radius: r_term,
        },
    };

    Ok(AuditOutcome {
        verdict: AuditVerdict::Violated,
        termination,
        trace: DescentTrace {
            base: p,
            entries,
            terminal: Some(terminal),
        },
        tol,
    })
}

/// Serializable verdict, the stable machine-readable audit summary.
#[derive(Debug, Clone, Serialize)]
pub struct VerdictReport {
    pub verdict: String,
    pub k: f64,
    pub trace_len: usize,
    pub terminal: VerdictTerminal,
    pub invariants: TraceInvariants,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerdictTerminal {
    pub point: String,
    pub worst_deficit: f64,
}

impl VerdictReport {
    pub fn from_outcome(space: &Space, k: Curvature, outcome: &AuditOutcome) -> VerdictReport {
        let invariants = outcome.invariants(space);
        let (point, worst_deficit) = match &outcome.trace.terminal {
            Some(t) => (space.label(t.point), t.worst_deficit),
            None => (
                outcome
                    .trace
                    .entries
                    .last()
                    .map(|e| space.label(e.point))
                    .unwrap_or_else(|| space.label(outcome.trace.base)),
                0.0,
            ),
        };
        VerdictReport {
            verdict: match outcome.verdict {
                AuditVerdict::Holds => "HOLDS".to_string(),
                AuditVerdict::Violated => "VIOLATED".to_string(),
            },
            k: k.k(),
            trace_len: outcome.trace.entries.len(),
            terminal: VerdictTerminal {
                point,
                worst_deficit,
            },
            invariants,
        }
    }
}
