//! Weighted-graph backend: deterministic single-source shortest paths over
//! an undirected edge list, plus the icosphere mesh builder.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use crate::error::{GeomError, Result};

use super::{mix_seed, point_salt, GeodesicPolyline, PointData, PointRef};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphFile {
    points: Vec<GraphFilePoint>,
    edges: Vec<GraphFileEdge>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphFilePoint {
    id: String,
    #[serde(default)]
    label: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphFileEdge {
    u: String,
    v: String,
    w: f64,
}

/// Parsed graph input: named points and weighted undirected edges.
#[derive(Debug, Clone)]
pub struct GraphInput {
    pub points: Vec<(String, Option<String>)>,
    pub edges: Vec<(String, String, f64)>,
}

impl GraphInput {
    /// Parse the UTF-8 JSON graph format:
    ///
    /// ```json
    /// {
    ///   "points": [{"id": "a"}, {"id": "b", "label": "Bee"}],
    ///   "edges":  [{"u": "a", "v": "b", "w": 2.0}]
    /// }
    /// ```
    ///
    /// Unknown keys are rejected. Edges are undirected with strictly
    /// positive weights; duplicates keep the minimum weight.
    pub fn from_json(text: &str) -> Result<GraphInput> {
        let parsed: GraphFile = serde_json::from_str(text)
            .map_err(|e| GeomError::MalformedInput(format!("graph JSON: {e}")))?;
        Ok(GraphInput {
            points: parsed.points.into_iter().map(|p| (p.id, p.label)).collect(),
            edges: parsed.edges.into_iter().map(|e| (e.u, e.v, e.w)).collect(),
        })
    }

    pub fn from_edges(edges: &[(&str, &str, f64)]) -> GraphInput {
        let mut seen = Vec::new();
        for (u, v, _) in edges {
            for id in [u, v] {
                if !seen.iter().any(|s: &String| s == id) {
                    seen.push(id.to_string());
                }
            }
        }
        GraphInput {
            points: seen.into_iter().map(|id| (id, None)).collect(),
            edges: edges
                .iter()
                .map(|(u, v, w)| (u.to_string(), v.to_string(), *w))
                .collect(),
        }
    }
}

pub(super) struct GraphSpace {
    ids: Vec<String>,
    #[allow(dead_code)]
    labels: Vec<Option<String>>,
    index: HashMap<String, usize>,
    adj: Vec<Vec<(usize, f64)>>,
    mean_edge: f64,
    max_edge: f64,
    /// Report-only ambient coordinates (mesh builders fill these in).
    coords: Option<Vec<[f64; 3]>>,
}

/// Max-heap entry ordered for min-extraction with index tie-breaking, so
/// equal-distance pops are deterministic.
#[derive(PartialEq)]
struct HeapEntry {
    dist: f64,
    vertex: usize,
}

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.vertex.cmp(&self.vertex))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl GraphSpace {
    /// Build from input. With `sort_ids` the vertex order (and hence the
    /// tie-break preference) is the lexicographic id order; the mesh builder
    /// passes `false` to keep its construction order.
    pub(super) fn build(input: GraphInput, sort_ids: bool) -> Result<GraphSpace> {
        if input.points.is_empty() {
            return Err(GeomError::MalformedInput("graph has no points".to_string()));
        }
        let mut points = input.points;
        if sort_ids {
            points.sort_by(|a, b| a.0.cmp(&b.0));
        }
        let mut index = HashMap::new();
        for (i, (id, _)) in points.iter().enumerate() {
            if index.insert(id.clone(), i).is_some() {
                return Err(GeomError::MalformedInput(format!(
                    "duplicate point id `{id}`"
                )));
            }
        }
        let n = points.len();
        // duplicate edges keep the minimum weight
        let mut best: HashMap<(usize, usize), f64> = HashMap::new();
        for (u, v, w) in &input.edges {
            if !w.is_finite() || *w <= 0.0 {
                return Err(GeomError::NonPositiveWeight(format!(
                    "edge {u}-{v} has weight {w}"
                )));
            }
            let iu = *index.get(u).ok_or_else(|| {
                GeomError::MalformedInput(format!("edge endpoint `{u}` is not a point"))
            })?;
            let iv = *index.get(v).ok_or_else(|| {
                GeomError::MalformedInput(format!("edge endpoint `{v}` is not a point"))
            })?;
            if iu == iv {
                return Err(GeomError::MalformedInput(format!("self-loop at `{u}`")));
            }
            let key = (iu.min(iv), iu.max(iv));
            best.entry(key)
                .and_modify(|cur| *cur = cur.min(*w))
                .or_insert(*w);
        }
        let mut adj = vec![Vec::new(); n];
        let mut total_w = 0.0;
        let mut max_edge = 0.0f64;
        for (&(a, b), &w) in &best {
            adj[a].push((b, w));
            adj[b].push((a, w));
            total_w += w;
            max_edge = max_edge.max(w);
        }
        for nbrs in &mut adj {
            nbrs.sort_by(|a, b| a.0.cmp(&b.0));
        }
        let mean_edge = if best.is_empty() {
            1.0
        } else {
            total_w / best.len() as f64
        };
        let (ids, labels) = points.into_iter().unzip();
        Ok(GraphSpace {
            ids,
            labels,
            index,
            adj,
            mean_edge,
            max_edge,
            coords: None,
        })
    }

    pub(super) fn vertex_count(&self) -> usize {
        self.ids.len()
    }

    pub(super) fn mean_edge(&self) -> f64 {
        self.mean_edge
    }

    /// Distance error budget: polyline snapping can miss by half the
    /// longest edge on the path.
    pub(super) fn distance_error(&self) -> f64 {
        self.mean_edge.max(self.max_edge / 2.0)
    }

    pub(super) fn id_of(&self, i: usize) -> &str {
        &self.ids[i]
    }

    pub(super) fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub(super) fn coords_of(&self, i: usize) -> Option<[f64; 3]> {
        self.coords.as_ref().map(|c| c[i])
    }

    /// Deterministic Dijkstra. Among equal-length predecessor choices the
    /// smallest vertex index wins.
    fn dijkstra(&self, src: usize) -> (Vec<f64>, Vec<usize>) {
        let n = self.vertex_count();
        let mut dist = vec![f64::INFINITY; n];
        let mut pred = vec![usize::MAX; n];
        let mut done = vec![false; n];
        let mut heap = BinaryHeap::new();
        dist[src] = 0.0;
        heap.push(HeapEntry {
            dist: 0.0,
            vertex: src,
        });
        while let Some(HeapEntry { dist: d, vertex: u }) = heap.pop() {
            if done[u] {
                continue;
            }
            done[u] = true;
            for &(v, w) in &self.adj[u] {
                let cand = d + w;
                if cand < dist[v] {
                    dist[v] = cand;
                    pred[v] = u;
                    heap.push(HeapEntry {
                        dist: cand,
                        vertex: v,
                    });
                } else if cand == dist[v] && u < pred[v] {
                    pred[v] = u;
                }
            }
        }
        (dist, pred)
    }

    fn vertex_of(&self, data: PointData) -> Result<usize> {
        match data {
            PointData::Vertex(i) if i < self.vertex_count() => Ok(i),
            _ => Err(GeomError::UnknownPoint),
        }
    }

    pub(super) fn distance(&self, x: PointData, y: PointData) -> Result<f64> {
        let (ix, iy) = (self.vertex_of(x)?, self.vertex_of(y)?);
        if ix == iy {
            return Ok(0.0);
        }
        let (dist, _) = self.dijkstra(ix);
        if dist[iy].is_finite() {
            Ok(dist[iy])
        } else {
            Err(GeomError::Disconnected)
        }
    }

    pub(super) fn geodesic(
        &self,
        space: u64,
        x: PointRef,
        y: PointRef,
    ) -> Result<GeodesicPolyline> {
        let (ix, iy) = (self.vertex_of(x.data)?, self.vertex_of(y.data)?);
        let (dist, pred) = self.dijkstra(ix);
        if !dist[iy].is_finite() {
            return Err(GeomError::Disconnected);
        }
        let mut chain = vec![iy];
        let mut cur = iy;
        while cur != ix {
            cur = pred[cur];
            chain.push(cur);
        }
        chain.reverse();
        let points = chain
            .iter()
            .map(|&i| PointRef {
                space,
                data: PointData::Vertex(i),
            })
            .collect();
        let cum: Vec<f64> = chain.iter().map(|&i| dist[i]).collect();
        Ok(GeodesicPolyline {
            space,
            points,
            total: dist[iy],
            cum,
        })
    }

    /// Enumerate up to `max_n` equal-length paths over the tight-edge DAG,
    /// smallest-index-first; the canonical geodesic comes out first.
    pub(super) fn alternative_geodesics(
        &self,
        space: u64,
        x: PointRef,
        y: PointRef,
        max_n: usize,
    ) -> Result<Vec<GeodesicPolyline>> {
        let (ix, iy) = (self.vertex_of(x.data)?, self.vertex_of(y.data)?);
        let (dist, _) = self.dijkstra(ix);
        if !dist[iy].is_finite() {
            return Err(GeomError::Disconnected);
        }
        let tol = 1e-12 * (1.0 + dist[iy]);
        // DFS backward from y along edges that lie on some shortest path
        let mut out: Vec<Vec<usize>> = Vec::new();
        let mut stack = vec![iy];
        fn dfs(
            g: &GraphSpace,
            dist: &[f64],
            tol: f64,
            src: usize,
            stack: &mut Vec<usize>,
            out: &mut Vec<Vec<usize>>,
            max_n: usize,
        ) {
            if out.len() >= max_n {
                return;
            }
            let cur = *stack.last().unwrap();
            if cur == src {
                let mut path = stack.clone();
                path.reverse();
                out.push(path);
                return;
            }
            for &(v, w) in &g.adj[cur] {
                if (dist[v] + w - dist[cur]).abs() <= tol {
                    stack.push(v);
                    dfs(g, dist, tol, src, stack, out, max_n);
                    stack.pop();
                    if out.len() >= max_n {
                        return;
                    }
                }
            }
        }
        dfs(self, &dist, tol, ix, &mut stack, &mut out, max_n.max(1));
        let mut polylines = Vec::new();
        for chain in out {
            let points = chain
                .iter()
                .map(|&i| PointRef {
                    space,
                    data: PointData::Vertex(i),
                })
                .collect();
            let cum: Vec<f64> = chain.iter().map(|&i| dist[i]).collect();
            polylines.push(GeodesicPolyline {
                space,
                points,
                total: dist[iy],
                cum,
            });
        }
        Ok(polylines)
    }

    pub(super) fn sample_in_ball(
        &self,
        space: u64,
        o: PointData,
        radius: f64,
        n: usize,
        seed: u64,
    ) -> Result<Vec<PointRef>> {
        let io = self.vertex_of(o)?;
        let (dist, _) = self.dijkstra(io);
        let ball: Vec<usize> = (0..self.vertex_count())
            .filter(|&i| dist[i] <= radius)
            .collect();
        if ball.len() < 2 {
            return Err(GeomError::EmptyBall);
        }
        let salt = point_salt(PointRef { space, data: o }) ^ radius.to_bits();
        let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, salt));
        Ok((0..n)
            .map(|_| PointRef {
                space,
                data: PointData::Vertex(ball[rng.gen_range(0..ball.len())]),
            })
            .collect())
    }

    pub(super) fn sample_points(&self, space: u64, n: usize, seed: u64) -> Vec<PointRef> {
        let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, 0x67726170u64));
        (0..n)
            .map(|_| PointRef {
                space,
                data: PointData::Vertex(rng.gen_range(0..self.vertex_count())),
            })
            .collect()
    }
}

/// Icosphere graph: subdivide the icosahedron `level` times, project onto
/// the sphere of radius `radius`, and connect each vertex to its first-,
/// second- and third-ring neighbors with exact great-circle edge weights.
/// The extra rings cut the lattice anisotropy of shortest-path distances to
/// a couple of percent. Returns the graph and the mean first-ring spacing.
pub(super) fn build_icosphere_graph(radius: f64, level: u32) -> (GraphSpace, f64) {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let verts: Vec<[f64; 3]> = vec![
        [-1.0, phi, 0.0],
        [1.0, phi, 0.0],
        [-1.0, -phi, 0.0],
        [1.0, -phi, 0.0],
        [0.0, -1.0, phi],
        [0.0, 1.0, phi],
        [0.0, -1.0, -phi],
        [0.0, 1.0, -phi],
        [phi, 0.0, -1.0],
        [phi, 0.0, 1.0],
        [-phi, 0.0, -1.0],
        [-phi, 0.0, 1.0],
    ];
    let faces: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    let normalize = |v: [f64; 3]| {
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        [v[0] / n, v[1] / n, v[2] / n]
    };
    let mut verts: Vec<[f64; 3]> = verts.into_iter().map(normalize).collect();
    let mut faces = faces;
    for _ in 0..level {
        let mut midpoint: HashMap<(usize, usize), usize> = HashMap::new();
        let mut next_faces = Vec::with_capacity(faces.len() * 4);
        for f in &faces {
            let mut mids = [0usize; 3];
            for (e, (i, j)) in [(f[0], f[1]), (f[1], f[2]), (f[2], f[0])]
                .iter()
                .enumerate()
            {
                let key = (*i.min(j), *i.max(j));
                mids[e] = *midpoint.entry(key).or_insert_with(|| {
                    let m = normalize([
                        (verts[*i][0] + verts[*j][0]) / 2.0,
                        (verts[*i][1] + verts[*j][1]) / 2.0,
                        (verts[*i][2] + verts[*j][2]) / 2.0,
                    ]);
                    verts.push(m);
                    verts.len() - 1
                });
            }
            next_faces.push([f[0], mids[0], mids[2]]);
            next_faces.push([mids[0], f[1], mids[1]]);
            next_faces.push([mids[1], f[2], mids[2]]);
            next_faces.push([mids[2], mids[0], mids[1]]);
        }
        faces = next_faces;
    }
    let n = verts.len();
    // 1-ring adjacency from faces
    let mut ring1: Vec<Vec<usize>> = vec![Vec::new(); n];
    let push = |a: usize, b: usize, ring: &mut Vec<Vec<usize>>| {
        if !ring[a].contains(&b) {
            ring[a].push(b);
        }
    };
    for f in &faces {
        for (i, j) in [(f[0], f[1]), (f[1], f[2]), (f[2], f[0])] {
            push(i, j, &mut ring1);
            push(j, i, &mut ring1);
        }
    }
    let arc = |i: usize, j: usize| -> f64 {
        let (u, v) = (verts[i], verts[j]);
        let dot = (u[0] * v[0] + u[1] * v[1] + u[2] * v[2]).clamp(-1.0, 1.0);
        radius * dot.acos()
    };
    let mut sum1 = 0.0;
    let mut cnt1 = 0usize;
    let mut edges: HashMap<(usize, usize), f64> = HashMap::new();
    for i in 0..n {
        // rings 1..3 by breadth-first hops
        let mut dist_hops: HashMap<usize, u32> = HashMap::new();
        dist_hops.insert(i, 0);
        let mut frontier = vec![i];
        for hop in 1..=3u32 {
            let mut next = Vec::new();
            for &u in &frontier {
                for &v in &ring1[u] {
                    if let std::collections::hash_map::Entry::Vacant(e) = dist_hops.entry(v) {
                        e.insert(hop);
                        next.push(v);
                    }
                }
            }
            frontier = next;
        }
        for (&j, &hop) in &dist_hops {
            if j <= i || hop == 0 {
                continue;
            }
            let w = arc(i, j);
            edges.insert((i, j), w);
            if hop == 1 {
                sum1 += w;
                cnt1 += 1;
            }
        }
    }
    let h = sum1 / cnt1 as f64;
    let input = GraphInput {
        points: (0..n).map(|i| (i.to_string(), None)).collect(),
        edges: edges
            .into_iter()
            .map(|((i, j), w)| (i.to_string(), j.to_string(), w))
            .collect(),
    };
    // keep construction order so vertex ids match indices
    let mut g = GraphSpace::build(input, false).expect("icosphere graph is well-formed");
    g.coords = Some(
        verts
            .iter()
            .map(|v| [v[0] * radius, v[1] * radius, v[2] * radius])
            .collect(),
    );
    (g, h)
}
