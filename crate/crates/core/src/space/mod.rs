//! Uniform abstraction over geodesic-space backends: distances, chosen
//! shortest paths, arclength parameterization, and seeded point sampling.
//!
//! Two families of backends exist. Discrete ones (weighted graphs, meshed
//! spheres) answer queries by deterministic shortest-path search and declare
//! a resolution `h` and a distance error bound `eta = h`. Analytic ones
//! (plane, sphere, hyperbolic plane, flat cone) answer queries in closed form
//! with `eta = 0`; the cone additionally declares a working resolution `h`
//! used by scale-dependent procedures downstream.

mod analytic;
mod cone;
mod graph;

pub use graph::GraphInput;

use std::sync::atomic::{AtomicU64, Ordering};

use crate::error::{GeomError, Result};

use analytic::{HyperbolicSpace, PlaneSpace, SphereSpace};
use cone::ConeSpace;
use graph::GraphSpace;

static NEXT_SPACE_ID: AtomicU64 = AtomicU64::new(1);

fn fresh_space_id() -> u64 {
    NEXT_SPACE_ID.fetch_add(1, Ordering::Relaxed)
}

/// Backend-scoped point identity. `Vertex` indexes a graph backend; the
/// other variants carry exact chart coordinates of analytic backends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PointData {
    Vertex(usize),
    Plane {
        x: f64,
        y: f64,
    },
    /// A point of the sphere of the backend's radius, in ambient coordinates.
    Sphere {
        x: f64,
        y: f64,
        z: f64,
    },
    /// Hyperboloid chart of the hyperbolic plane; z is implied.
    Hyperbolic {
        x: f64,
        y: f64,
    },
    /// Intrinsic polar coordinates on the cone; `phi` lies in `[0, theta)`.
    /// The apex is `r = 0` with `phi = 0`.
    Cone {
        r: f64,
        phi: f64,
    },
}

/// Opaque reference to a point of one space instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointRef {
    pub(crate) space: u64,
    pub(crate) data: PointData,
}

impl PointRef {
    pub fn data(&self) -> PointData {
        self.data
    }
}

/// A chosen shortest path as an arclength-parameterized point sequence.
///
/// `cum` is strictly increasing, starts at 0 and ends at `total`;
/// consecutive-point distances equal the cum increments.
#[derive(Debug, Clone)]
pub struct GeodesicPolyline {
    pub(crate) space: u64,
    pub points: Vec<PointRef>,
    pub cum: Vec<f64>,
    pub total: f64,
}

impl GeodesicPolyline {
    pub fn start(&self) -> PointRef {
        self.points[0]
    }

    pub fn end(&self) -> PointRef {
        *self.points.last().unwrap()
    }

    pub(crate) fn single(space: u64, p: PointRef) -> Self {
        GeodesicPolyline {
            space,
            points: vec![p],
            cum: vec![0.0],
            total: 0.0,
        }
    }

    pub(crate) fn two(space: u64, x: PointRef, y: PointRef, d: f64) -> Self {
        GeodesicPolyline {
            space,
            points: vec![x, y],
            cum: vec![0.0, d],
            total: d,
        }
    }

    /// Reverse orientation; the same path traversed from the other end.
    pub fn reversed(&self) -> Self {
        let points: Vec<_> = self.points.iter().rev().copied().collect();
        let cum: Vec<_> = self.cum.iter().rev().map(|c| self.total - c).collect();
        GeodesicPolyline {
            space: self.space,
            points,
            cum,
            total: self.total,
        }
    }

    /// Split at arclength `s` into the sub-path back to the start and the
    /// sub-path on to the end, both emanating from the split point.
    pub(crate) fn split_at(&self, s: f64, split_point: PointRef) -> (Self, Self) {
        let mut before: Vec<(PointRef, f64)> = Vec::new();
        let mut after: Vec<(PointRef, f64)> = Vec::new();
        for (p, &c) in self.points.iter().zip(self.cum.iter()) {
            if c < s {
                before.push((*p, c));
            } else if c > s {
                after.push((*p, c));
            }
        }
        // toward the start: arclengths measured from the split point
        let mut back_points = vec![split_point];
        let mut back_cum = vec![0.0];
        for (p, c) in before.iter().rev() {
            back_points.push(*p);
            back_cum.push(s - c);
        }
        let back = GeodesicPolyline {
            space: self.space,
            total: *back_cum.last().unwrap(),
            points: back_points,
            cum: back_cum,
        };
        let mut fwd_points = vec![split_point];
        let mut fwd_cum = vec![0.0];
        for (p, c) in after.iter() {
            fwd_points.push(*p);
            fwd_cum.push(c - s);
        }
        let fwd = GeodesicPolyline {
            space: self.space,
            total: *fwd_cum.last().unwrap(),
            points: fwd_points,
            cum: fwd_cum,
        };
        (back, fwd)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BackendKind {
    Graph,
    Plane,
    SphereAnalytic,
    SphereMesh,
    Hyperbolic,
    Cone,
}

/// Declared backend parameters: the resolution `h` (typical point spacing;
/// 0 for purely analytic backends) and the distance error bound `eta`.
#[derive(Debug, Clone)]
pub struct SpaceDescriptor {
    pub kind: BackendKind,
    pub resolution_h: f64,
    pub distance_error_eta: f64,
    /// Human-readable parameter summary.
    pub params: String,
}

enum Backend {
    Graph(GraphSpace),
    Plane(PlaneSpace),
    Sphere(SphereSpace),
    Hyperbolic(HyperbolicSpace),
    Cone(ConeSpace),
}

/// An immutable geodesic space. All queries are read-only.
pub struct Space {
    id: u64,
    descriptor: SpaceDescriptor,
    backend: Backend,
}

impl Space {
    pub fn descriptor(&self) -> &SpaceDescriptor {
        &self.descriptor
    }

    /// Typical point spacing; scale-dependent procedures floor at multiples
    /// of this.
    pub fn h(&self) -> f64 {
        self.descriptor.resolution_h
    }

    /// Declared distance error bound; 0 for analytic backends.
    pub fn eta(&self) -> f64 {
        self.descriptor.distance_error_eta
    }

    /// True when distances carry discretization error.
    pub fn is_discrete(&self) -> bool {
        self.descriptor.distance_error_eta > 0.0
    }

    pub(crate) fn point(&self, data: PointData) -> PointRef {
        PointRef {
            space: self.id,
            data,
        }
    }

    pub(crate) fn check_point(&self, p: PointRef) -> Result<()> {
        if p.space != self.id {
            return Err(GeomError::UnknownPoint);
        }
        match (&self.backend, p.data) {
            (Backend::Graph(g), PointData::Vertex(i)) if i < g.vertex_count() => Ok(()),
            (Backend::Plane(_), PointData::Plane { .. }) => Ok(()),
            (Backend::Sphere(_), PointData::Sphere { .. }) => Ok(()),
            (Backend::Hyperbolic(_), PointData::Hyperbolic { .. }) => Ok(()),
            (Backend::Cone(_), PointData::Cone { .. }) => Ok(()),
            _ => Err(GeomError::UnknownPoint),
        }
    }

    pub fn distance(&self, x: PointRef, y: PointRef) -> Result<f64> {
        self.check_point(x)?;
        self.check_point(y)?;
        match &self.backend {
            Backend::Graph(g) => g.distance(x.data, y.data),
            Backend::Plane(b) => Ok(b.distance(x.data, y.data)),
            Backend::Sphere(b) => Ok(b.distance(x.data, y.data)),
            Backend::Hyperbolic(b) => Ok(b.distance(x.data, y.data)),
            Backend::Cone(b) => Ok(b.distance(x.data, y.data)),
        }
    }

    /// The canonical shortest path from `x` to `y`. Tie-breaking is
    /// deterministic: among equal-length predecessor choices on graph
    /// backends the smallest point identifier wins; analytic backends make a
    /// documented canonical choice where geodesics are non-unique.
    pub fn geodesic(&self, x: PointRef, y: PointRef) -> Result<GeodesicPolyline> {
        self.check_point(x)?;
        self.check_point(y)?;
        if x == y {
            return Ok(GeodesicPolyline::single(self.id, x));
        }
        match &self.backend {
            Backend::Graph(g) => g.geodesic(self.id, x, y),
            Backend::Plane(b) => Ok(b.geodesic(self.id, x, y)),
            Backend::Sphere(b) => Ok(b.geodesic(self.id, x, y)),
            Backend::Hyperbolic(b) => Ok(b.geodesic(self.id, x, y)),
            Backend::Cone(b) => Ok(b.geodesic(self.id, x, y)),
        }
    }

    /// The point at arclength `t` along `g`. Discrete backends snap to the
    /// polyline vertex nearest to `t` (ties to the smaller index); analytic
    /// backends interpolate exactly.
    pub fn point_at(&self, g: &GeodesicPolyline, t: f64) -> Result<PointRef> {
        if g.space != self.id {
            return Err(GeomError::UnknownPoint);
        }
        if !t.is_finite() || t < 0.0 || t > g.total + 1e-12 * g.total.max(1.0) {
            return Err(GeomError::Range(format!(
                "arclength {t} outside [0, {}]",
                g.total
            )));
        }
        let t = t.min(g.total);
        match &self.backend {
            Backend::Graph(_) => {
                let mut best = 0usize;
                let mut best_err = f64::INFINITY;
                for (i, &c) in g.cum.iter().enumerate() {
                    let e = (c - t).abs();
                    if e < best_err {
                        best_err = e;
                        best = i;
                    }
                }
                Ok(g.points[best])
            }
            Backend::Plane(b) => Ok(self.point(b.point_along(g, t))),
            Backend::Sphere(b) => Ok(self.point(b.point_along(g, t))),
            Backend::Hyperbolic(b) => Ok(self.point(b.point_along(g, t))),
            Backend::Cone(b) => Ok(self.point(b.point_along(g, t))),
        }
    }

    /// Like [`Space::point_at`], also reporting the realized arclength (the
    /// snapped position on discrete backends, `t` itself on analytic ones).
    pub fn point_at_with_arc(&self, g: &GeodesicPolyline, t: f64) -> Result<(PointRef, f64)> {
        let p = self.point_at(g, t)?;
        match &self.backend {
            Backend::Graph(_) => {
                let idx = g.points.iter().position(|q| *q == p).unwrap();
                Ok((p, g.cum[idx]))
            }
            _ => Ok((p, t.min(g.total))),
        }
    }

    /// Up to `max_n` geodesics between `x` and `y`, the canonical one first.
    /// Graph backends enumerate equal-length paths; analytic backends list
    /// the known non-unique cases (antipodal sphere points, exact half-wrap
    /// cone pairs).
    pub fn alternative_geodesics(
        &self,
        x: PointRef,
        y: PointRef,
        max_n: usize,
    ) -> Result<Vec<GeodesicPolyline>> {
        self.check_point(x)?;
        self.check_point(y)?;
        if max_n == 0 || x == y {
            return Ok(vec![self.geodesic(x, y)?]);
        }
        match &self.backend {
            Backend::Graph(g) => g.alternative_geodesics(self.id, x, y, max_n),
            Backend::Sphere(b) => Ok(b.alternative_geodesics(self.id, x, y, max_n)),
            Backend::Cone(b) => Ok(b.alternative_geodesics(self.id, x, y, max_n)),
            _ => Ok(vec![self.geodesic(x, y)?]),
        }
    }

    /// Display label for a point. For analytic backends the label is itself
    /// a valid point spec for [`Space::parse_point`].
    pub fn label(&self, p: PointRef) -> String {
        match (&self.backend, p.data) {
            (Backend::Graph(g), PointData::Vertex(i)) => g.id_of(i).to_string(),
            (_, PointData::Plane { x, y }) => format!("{x}:{y}"),
            (_, PointData::Sphere { x, y, z }) => format!("{x}:{y}:{z}"),
            (_, PointData::Hyperbolic { x, y }) => format!("{x}:{y}"),
            (_, PointData::Cone { r, phi }) => format!("{r}:{phi}"),
            _ => "<foreign point>".to_string(),
        }
    }

    /// Parse a point spec. Graph backends take a vertex id; analytic
    /// backends take coordinates separated by `:` or `,` (plane and
    /// hyperbolic `x:y`, sphere `colat:lon` or `x:y:z`, cone `r:phi`).
    pub fn parse_point(&self, s: &str) -> Result<PointRef> {
        let parts: Vec<&str> = if s.contains(':') {
            s.split(':').collect()
        } else {
            s.split(',').collect()
        };
        let nums = || -> Result<Vec<f64>> {
            parts
                .iter()
                .map(|p| {
                    p.trim().parse::<f64>().map_err(|_| {
                        GeomError::MalformedInput(format!("bad coordinate `{p}` in `{s}`"))
                    })
                })
                .collect()
        };
        match &self.backend {
            Backend::Graph(g) => g
                .index_of(s.trim())
                .map(|i| self.point(PointData::Vertex(i)))
                .ok_or(GeomError::UnknownPoint),
            Backend::Plane(_) => {
                let v = nums()?;
                if v.len() != 2 {
                    return Err(GeomError::MalformedInput(format!(
                        "plane points are x:y, got `{s}`"
                    )));
                }
                Ok(self.point(PointData::Plane { x: v[0], y: v[1] }))
            }
            Backend::Hyperbolic(_) => {
                let v = nums()?;
                if v.len() != 2 {
                    return Err(GeomError::MalformedInput(format!(
                        "hyperbolic points are x:y, got `{s}`"
                    )));
                }
                Ok(self.point(PointData::Hyperbolic { x: v[0], y: v[1] }))
            }
            Backend::Sphere(b) => {
                let v = nums()?;
                b.parse_coords(&v).map(|d| self.point(d)).ok_or_else(|| {
                    GeomError::MalformedInput(format!(
                        "sphere points are colat:lon or x:y:z, got `{s}`"
                    ))
                })
            }
            Backend::Cone(b) => {
                let v = nums()?;
                if v.len() != 2 || v[0] < 0.0 {
                    return Err(GeomError::MalformedInput(format!(
                        "cone points are r:phi with r >= 0, got `{s}`"
                    )));
                }
                Ok(self.point(b.make_point(v[0], v[1])))
            }
        }
    }

    /// Up to `n` seeded samples from the closed ball around `o`. The sample
    /// stream is a deterministic function of `(seed, o, radius)`; a larger
    /// `n` extends a smaller one.
    pub fn sample_in_ball(
        &self,
        o: PointRef,
        radius: f64,
        n: usize,
        seed: u64,
    ) -> Result<Vec<PointRef>> {
        self.check_point(o)?;
        if !(radius > 0.0) {
            return Err(GeomError::Range(format!(
                "ball radius must be positive, got {radius}"
            )));
        }
        match &self.backend {
            Backend::Graph(g) => g.sample_in_ball(self.id, o.data, radius, n, seed),
            Backend::Plane(b) => Ok(b.sample_in_ball(self.id, o.data, radius, n, seed)),
            Backend::Sphere(b) => Ok(b.sample_in_ball(self.id, o.data, radius, n, seed)),
            Backend::Hyperbolic(b) => Ok(b.sample_in_ball(self.id, o.data, radius, n, seed)),
            Backend::Cone(b) => b.sample_in_ball(self.id, o.data, radius, n, seed),
        }
    }

    /// `n` seeded samples spread over the space (the whole sphere, the
    /// declared patch extent, or all graph vertices).
    pub fn sample_points(&self, n: usize, seed: u64) -> Vec<PointRef> {
        match &self.backend {
            Backend::Graph(g) => g.sample_points(self.id, n, seed),
            Backend::Plane(b) => b.sample_points(self.id, n, seed),
            Backend::Sphere(b) => b.sample_points(self.id, n, seed),
            Backend::Hyperbolic(b) => b.sample_points(self.id, n, seed),
            Backend::Cone(b) => b.sample_points(self.id, n, seed),
        }
    }

    /// Report-only coordinates of a point: the chart coordinates of
    /// analytic backends, ambient mesh coordinates where the builder
    /// recorded them, nothing for plain graphs.
    pub fn point_coords(&self, p: PointRef) -> Option<[f64; 3]> {
        if self.check_point(p).is_err() {
            return None;
        }
        match (&self.backend, p.data) {
            (Backend::Graph(g), PointData::Vertex(i)) => g.coords_of(i),
            (_, PointData::Plane { x, y }) => Some([x, y, 0.0]),
            (_, PointData::Sphere { x, y, z }) => Some([x, y, z]),
            (_, PointData::Hyperbolic { x, y }) => Some([x, y, (1.0 + x * x + y * y).sqrt()]),
            (_, PointData::Cone { r, phi }) => Some([r * phi.cos(), r * phi.sin(), 0.0]),
            _ => None,
        }
    }

    /// The cone apex, when this space is a cone.
    pub fn cone_apex(&self) -> Option<PointRef> {
        match &self.backend {
            Backend::Cone(_) => Some(self.point(PointData::Cone { r: 0.0, phi: 0.0 })),
            _ => None,
        }
    }

    // ---- constructors ----

    /// Build a graph space from parsed input. Undirected; duplicate edges
    /// keep the minimum weight; `h` is the mean edge weight and `eta = h`.
    pub fn build_graph(input: GraphInput) -> Result<Space> {
        let g = GraphSpace::build(input, true)?;
        let h = g.mean_edge();
        let eta = g.distance_error();
        Ok(Space {
            id: fresh_space_id(),
            descriptor: SpaceDescriptor {
                kind: BackendKind::Graph,
                resolution_h: h,
                distance_error_eta: eta,
                params: format!("graph with {} vertices", g.vertex_count()),
            },
            backend: Backend::Graph(g),
        })
    }

    /// Parse the UTF-8 JSON graph format and build a space from it.
    pub fn build_graph_from_json(text: &str) -> Result<Space> {
        Space::build_graph(GraphInput::from_json(text)?)
    }

    /// Analytic Euclidean plane; `extent` bounds point sampling only.
    pub fn build_plane(extent: f64) -> Space {
        Space {
            id: fresh_space_id(),
            descriptor: SpaceDescriptor {
                kind: BackendKind::Plane,
                resolution_h: 0.0,
                distance_error_eta: 0.0,
                params: format!("plane extent={extent}"),
            },
            backend: Backend::Plane(PlaneSpace { extent }),
        }
    }

    /// Analytic sphere of radius `radius`: exact great-circle distances.
    pub fn build_sphere_analytic(radius: f64) -> Result<Space> {
        if !(radius > 0.0) {
            return Err(GeomError::MalformedInput(format!(
                "sphere radius must be positive, got {radius}"
            )));
        }
        Ok(Space {
            id: fresh_space_id(),
            descriptor: SpaceDescriptor {
                kind: BackendKind::SphereAnalytic,
                resolution_h: 0.0,
                distance_error_eta: 0.0,
                params: format!("sphere R={radius}"),
            },
            backend: Backend::Sphere(SphereSpace { radius }),
        })
    }

    /// Meshed sphere: an icosphere subdivided `level` times, as a weighted
    /// graph over mesh vertices with exact great-circle edge weights up to
    /// third-ring neighbors. `h` is the mean nearest-neighbor spacing.
    pub fn build_sphere_mesh(radius: f64, level: u32) -> Result<Space> {
        if !(radius > 0.0) {
            return Err(GeomError::MalformedInput(format!(
                "sphere radius must be positive, got {radius}"
            )));
        }
        if level > 7 {
            return Err(GeomError::MalformedInput(format!(
                "mesh level {level} too large (max 7)"
            )));
        }
        let (g, h) = graph::build_icosphere_graph(radius, level);
        let eta = g.distance_error();
        Ok(Space {
            id: fresh_space_id(),
            descriptor: SpaceDescriptor {
                kind: BackendKind::SphereMesh,
                resolution_h: h,
                distance_error_eta: eta,
                params: format!(
                    "icosphere R={radius} level={level} ({} vertices)",
                    g.vertex_count()
                ),
            },
            backend: Backend::Graph(g),
        })
    }

    /// Analytic hyperbolic plane of curvature -1 (hyperboloid chart);
    /// `extent` bounds point sampling only.
    pub fn build_hyperbolic(extent: f64) -> Space {
        Space {
            id: fresh_space_id(),
            descriptor: SpaceDescriptor {
                kind: BackendKind::Hyperbolic,
                resolution_h: 0.0,
                distance_error_eta: 0.0,
                params: format!("hyperbolic extent={extent}"),
            },
            backend: Backend::Hyperbolic(HyperbolicSpace { extent }),
        }
    }

    /// Flat cone of total angle `theta` (defect at the apex when
    /// `theta != 2 pi`), analytic via sector unrolling. `res` declares the
    /// working resolution `h` for scale-dependent procedures.
    pub fn build_cone(theta: f64, res: f64) -> Result<Space> {
        if !(theta > 0.0) || !theta.is_finite() {
            return Err(GeomError::MalformedInput(format!(
                "cone angle must be positive, got {theta}"
            )));
        }
        if !(res > 0.0) {
            return Err(GeomError::MalformedInput(format!(
                "cone resolution must be positive, got {res}"
            )));
        }
        Ok(Space {
            id: fresh_space_id(),
            descriptor: SpaceDescriptor {
                kind: BackendKind::Cone,
                resolution_h: res,
                distance_error_eta: 0.0,
                params: format!("cone angle={theta} res={res}"),
            },
            backend: Backend::Cone(ConeSpace { theta, extent: 2.0 }),
        })
    }

    /// One-line space spec grammar:
    /// `graph:<path>` | `plane` | `sphere:R=<num>[,mesh=<level>]` |
    /// `hyperbolic` | `cone:angle=<num>[,res=<num>]`.
    pub fn parse_spec(spec: &str) -> Result<Space> {
        let (head, rest) = match spec.split_once(':') {
            Some((h, r)) => (h.trim(), Some(r.trim())),
            None => (spec.trim(), None),
        };
        let kv = |rest: Option<&str>| -> Result<Vec<(String, String)>> {
            let mut out = Vec::new();
            if let Some(r) = rest {
                for item in r.split(',') {
                    let (k, v) = item.split_once('=').ok_or_else(|| {
                        GeomError::MalformedInput(format!("expected key=value, got `{item}`"))
                    })?;
                    out.push((k.trim().to_string(), v.trim().to_string()));
                }
            }
            Ok(out)
        };
        let num = |v: &str| -> Result<f64> {
            v.parse::<f64>()
                .map_err(|_| GeomError::MalformedInput(format!("bad number `{v}`")))
        };
        match head {
            "plane" => {
                let mut extent = 10.0;
                for (k, v) in kv(rest)? {
                    match k.as_str() {
                        "extent" => extent = num(&v)?,
                        _ => {
                            return Err(GeomError::MalformedInput(format!(
                                "unknown plane option `{k}`"
                            )))
                        }
                    }
                }
                Ok(Space::build_plane(extent))
            }
            "hyperbolic" => {
                let mut extent = 3.0;
                for (k, v) in kv(rest)? {
                    match k.as_str() {
                        "extent" => extent = num(&v)?,
                        _ => {
                            return Err(GeomError::MalformedInput(format!(
                                "unknown hyperbolic option `{k}`"
                            )))
                        }
                    }
                }
                Ok(Space::build_hyperbolic(extent))
            }
            "sphere" => {
                let mut radius = None;
                let mut mesh = None;
                for (k, v) in kv(rest)? {
                    match k.as_str() {
                        "R" => radius = Some(num(&v)?),
                        "mesh" => {
                            mesh = Some(v.parse::<u32>().map_err(|_| {
                                GeomError::MalformedInput(format!("bad mesh level `{v}`"))
                            })?)
                        }
                        _ => {
                            return Err(GeomError::MalformedInput(format!(
                                "unknown sphere option `{k}`"
                            )))
                        }
                    }
                }
                let radius = radius.ok_or_else(|| {
                    GeomError::MalformedInput("sphere spec needs R=<num>".to_string())
                })?;
                match mesh {
                    Some(level) => Space::build_sphere_mesh(radius, level),
                    None => Space::build_sphere_analytic(radius),
                }
            }
            "cone" => {
                let mut angle = None;
                let mut res = 0.01;
                for (k, v) in kv(rest)? {
                    match k.as_str() {
                        "angle" => angle = Some(num(&v)?),
                        "res" => res = num(&v)?,
                        _ => {
                            return Err(GeomError::MalformedInput(format!(
                                "unknown cone option `{k}`"
                            )))
                        }
                    }
                }
                let angle = angle.ok_or_else(|| {
                    GeomError::MalformedInput("cone spec needs angle=<num>".to_string())
                })?;
                Space::build_cone(angle, res)
            }
            "graph" => {
                let path = rest.ok_or_else(|| {
                    GeomError::MalformedInput("graph spec needs a file path".to_string())
                })?;
                let text = std::fs::read_to_string(path).map_err(|e| {
                    GeomError::MalformedInput(format!("cannot read graph file `{path}`: {e}"))
                })?;
                Space::build_graph_from_json(&text)
            }
            other => Err(GeomError::MalformedInput(format!(
                "unknown space kind `{other}`"
            ))),
        }
    }
}

/// Mix a base seed with call-site context so independent procedures draw
/// from independent deterministic streams.
pub(crate) fn mix_seed(base: u64, salt: u64) -> u64 {
    // splitmix64 step
    let mut z = base ^ salt.wrapping_mul(0x9E3779B97F4A7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// Salt derived from a point, for per-site seed mixing.
pub(crate) fn point_salt(p: PointRef) -> u64 {
    let bits = |f: f64| f.to_bits();
    match p.data {
        PointData::Vertex(i) => i as u64,
        PointData::Plane { x, y } => bits(x) ^ bits(y).rotate_left(17),
        PointData::Sphere { x, y, z } => {
            bits(x) ^ bits(y).rotate_left(17) ^ bits(z).rotate_left(34)
        }
        PointData::Hyperbolic { x, y } => bits(x) ^ bits(y).rotate_left(17),
        PointData::Cone { r, phi } => bits(r) ^ bits(phi).rotate_left(17),
    }
}
