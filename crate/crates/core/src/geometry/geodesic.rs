use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use super::GeometryError;
use crate::mesh::{distance, TriangleMesh};
use crate::Point3;

/// Steiner points inserted per edge by [`GeodesicMethod::SteinerRefined`].
pub const STEINER_POINTS_PER_EDGE: usize = 3;

/// How surface distances are approximated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum GeodesicMethod {
    /// Shortest path over mesh edges.
    #[default]
    EdgeDijkstra,
    /// Shortest path over mesh edges plus Steiner points on every edge,
    /// connected across each face.
    SteinerRefined,
}

impl fmt::Display for GeodesicMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::EdgeDijkstra => "EDGE_DIJKSTRA",
            Self::SteinerRefined => "STEINER_REFINED",
        })
    }
}

impl FromStr for GeodesicMethod {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().replace('-', "_").as_str() {
            "EDGE_DIJKSTRA" | "EDGE" | "DIJKSTRA" => Ok(Self::EdgeDijkstra),
            "STEINER_REFINED" | "STEINER" => Ok(Self::SteinerRefined),
            _ => Err(format!(
                "unknown geodesic method '{s}' (expected EDGE_DIJKSTRA or STEINER_REFINED)"
            )),
        }
    }
}

/// Weighted graph in compressed adjacency form.
#[derive(Debug)]
struct SurfaceGraph {
    offsets: Vec<usize>,
    targets: Vec<usize>,
    weights: Vec<f64>,
}

impl SurfaceGraph {
    fn from_edges(node_count: usize, mut edges: Vec<(usize, usize, f64)>) -> Self {
        let mut both: Vec<(usize, usize, f64)> = Vec::with_capacity(edges.len() * 2);
        for (a, b, w) in edges.drain(..) {
            both.push((a, b, w));
            both.push((b, a, w));
        }
        both.sort_by(|x, y| (x.0, x.1).cmp(&(y.0, y.1)).then(x.2.total_cmp(&y.2)));
        both.dedup_by(|x, y| x.0 == y.0 && x.1 == y.1);
        let mut offsets = vec![0; node_count + 1];
        for &(a, _, _) in &both {
            offsets[a + 1] += 1;
        }
        for i in 0..node_count {
            offsets[i + 1] += offsets[i];
        }
        Self {
            offsets,
            targets: both.iter().map(|e| e.1).collect(),
            weights: both.iter().map(|e| e.2).collect(),
        }
    }

    fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    fn edges(&self, v: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.offsets[v]..self.offsets[v + 1];
        self.targets[r.clone()].iter().copied().zip(self.weights[r].iter().copied())
    }

    fn edge_graph(mesh: &TriangleMesh) -> Self {
        let g = mesh.edge_graph();
        let mut edges = Vec::with_capacity(g.edge_count());
        for v in 0..g.vertex_count() {
            for &(w, len) in g.neighbors(v) {
                if v < w {
                    edges.push((v, w, len));
                }
            }
        }
        Self::from_edges(mesh.vertex_count(), edges)
    }

    /// Mesh vertices keep their indices; Steiner nodes follow.
    fn steiner_graph(mesh: &TriangleMesh, per_edge: usize) -> Self {
        let mut positions: Vec<Point3> = mesh.vertices().to_vec();
        let mut edge_nodes: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        let mut edges = Vec::new();

        let mut chain = |a: usize, b: usize, positions: &mut Vec<Point3>| -> Vec<usize> {
            let key = (a.min(b), a.max(b));
            if let Some(nodes) = edge_nodes.get(&key) {
                return nodes.clone();
            }
            let (lo, hi) = key;
            let (p, q) = (mesh.vertex(lo), mesh.vertex(hi));
            let mut nodes = vec![lo];
            for k in 1..=per_edge {
                let t = k as f64 / (per_edge + 1) as f64;
                positions.push(p + (q - p) * t);
                nodes.push(positions.len() - 1);
            }
            nodes.push(hi);
            edge_nodes.insert(key, nodes.clone());
            nodes
        };

        for face in mesh.faces() {
            let sides: Vec<Vec<usize>> = (0..3)
                .map(|k| chain(face[k], face[(k + 1) % 3], &mut positions))
                .collect();
            for side in &sides {
                // the original edge stays so this graph contains the edge graph
                edges.push((side[0], side[side.len() - 1], f64::NAN));
                for w in side.windows(2) {
                    edges.push((w[0], w[1], f64::NAN));
                }
            }
            for i in 0..3 {
                for j in i + 1..3 {
                    for &a in &sides[i] {
                        for &b in &sides[j] {
                            if a != b && !(sides[i].contains(&b) || sides[j].contains(&a)) {
                                edges.push((a, b, f64::NAN));
                            }
                        }
                    }
                }
            }
        }
        for e in edges.iter_mut() {
            let (lo, hi) = (e.0.min(e.1), e.0.max(e.1));
            e.2 = distance(&positions[lo], &positions[hi]);
        }
        Self::from_edges(positions.len(), edges)
    }
}

#[derive(PartialEq)]
struct Candidate {
    dist: f64,
    node: usize,
}

impl Eq for Candidate {}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn dijkstra(graph: &SurfaceGraph, source: usize) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; graph.node_count()];
    let mut done = vec![false; graph.node_count()];
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(Candidate { dist: 0.0, node: source });
    while let Some(Candidate { dist: d, node }) = heap.pop() {
        if done[node] {
            continue;
        }
        done[node] = true;
        for (next, w) in graph.edges(node) {
            let nd = d + w;
            if nd < dist[next] {
                dist[next] = nd;
                heap.push(Candidate { dist: nd, node: next });
            }
        }
    }
    dist
}

/// Shortest-path distances restricted to a mesh surface.
///
/// Single-source results are cached per source vertex behind a mutex, so one
/// solver can serve several threads. A pair distance is always computed from
/// the lower vertex index, which makes `distance(a, b)` and `distance(b, a)`
/// bitwise identical.
pub struct GeodesicSolver {
    vertex_count: usize,
    method: GeodesicMethod,
    graph: SurfaceGraph,
    component: Vec<usize>,
    cache: Mutex<HashMap<usize, Arc<Vec<f64>>>>,
}

impl fmt::Debug for GeodesicSolver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GeodesicSolver")
            .field("method", &self.method)
            .field("nodes", &self.graph.node_count())
            .finish()
    }
}

impl GeodesicSolver {
    pub fn new(mesh: &TriangleMesh, method: GeodesicMethod) -> Self {
        let graph = match method {
            GeodesicMethod::EdgeDijkstra => SurfaceGraph::edge_graph(mesh),
            GeodesicMethod::SteinerRefined => SurfaceGraph::steiner_graph(mesh, STEINER_POINTS_PER_EDGE),
        };
        let (_, component) = mesh.edge_graph().components();
        Self {
            vertex_count: mesh.vertex_count(),
            method,
            graph,
            component,
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn method(&self) -> GeodesicMethod {
        self.method
    }

    fn check_vertex(&self, v: usize) -> Result<(), GeometryError> {
        if v >= self.vertex_count {
            return Err(GeometryError::VertexOutOfRange {
                vertex: v,
                vertex_count: self.vertex_count,
            });
        }
        Ok(())
    }

    pub fn same_component(&self, a: usize, b: usize) -> bool {
        self.component[a] == self.component[b]
    }

    /// Distances from `source` to every mesh vertex (infinite across components).
    pub fn distances_from(&self, source: usize) -> Result<Arc<Vec<f64>>, GeometryError> {
        self.check_vertex(source)?;
        if let Some(hit) = self.cache.lock().expect("geodesic cache poisoned").get(&source) {
            return Ok(Arc::clone(hit));
        }
        let mut dist = dijkstra(&self.graph, source);
        dist.truncate(self.vertex_count);
        let dist = Arc::new(dist);
        self.cache
            .lock()
            .expect("geodesic cache poisoned")
            .entry(source)
            .or_insert_with(|| Arc::clone(&dist));
        Ok(dist)
    }

    /// Surface distance between two vertices.
    pub fn distance(&self, a: usize, b: usize) -> Result<f64, GeometryError> {
        self.check_vertex(a)?;
        self.check_vertex(b)?;
        if a == b {
            return Ok(0.0);
        }
        if !self.same_component(a, b) {
            return Err(GeometryError::DisconnectedVertices { a, b });
        }
        let (lo, hi) = (a.min(b), a.max(b));
        Ok(self.distances_from(lo)?[hi])
    }

    /// Same as [`distance`](Self::distance) but bypasses the cache.
    pub fn distance_uncached(&self, a: usize, b: usize) -> Result<f64, GeometryError> {
        self.check_vertex(a)?;
        self.check_vertex(b)?;
        if a == b {
            return Ok(0.0);
        }
        if !self.same_component(a, b) {
            return Err(GeometryError::DisconnectedVertices { a, b });
        }
        Ok(dijkstra(&self.graph, a.min(b))[a.max(b)])
    }
}

/// Surface distance between two vertices of `solver`'s mesh.
pub fn geodesic_metric(solver: &GeodesicSolver, v1: usize, v2: usize) -> Result<f64, GeometryError> {
    solver.distance(v1, v2)
}
