//! Indexed triangle meshes.
//!
//! A [`TriangleMesh`] is immutable once built. Derived structures (edge graph,
//! vertex kd-tree, face hierarchy) are built on first use and cached; the caches
//! are `OnceLock`s so concurrent first access from several evaluators is safe.

mod bvh;
pub(crate) mod io;
mod kdtree;

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::{Point3, Vec3};

pub use bvh::{Aabb, FaceBvh};
pub use io::{load_mesh, load_mesh_scaled, parse_mesh, save_mesh, MeshFormat};
use kdtree::VertexKdTree;

/// Triangles with area below this (m²) are reported as degenerate.
pub const DEGENERATE_AREA: f64 = 1e-12;

/// STL vertices closer than this (m) are merged on load.
pub const STL_WELD_TOLERANCE: f64 = 1e-6;

#[derive(Debug, thiserror::Error)]
pub enum MeshError {
    #[error("{}: parse error{}: {message}", path.display(), line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    Parse {
        path: PathBuf,
        line: Option<usize>,
        message: String,
    },
    #[error("mesh has no faces")]
    EmptyMesh,
    #[error("vertex {index} has a non-finite coordinate")]
    NonFinite { index: usize },
    #[error("face {face} references vertex {vertex} but the mesh has {vertex_count} vertices")]
    IndexOutOfRange {
        face: usize,
        vertex: usize,
        vertex_count: usize,
    },
    #[error("face {face} references vertex {vertex} more than once")]
    RepeatedVertex { face: usize, vertex: usize },
    #[error("mesh needs at least two vertices, found {0}")]
    TooFewVertices(usize),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Squared Euclidean distance, summed in x, y, z order.
///
/// Every distance in the crate goes through this so that fast paths and
/// brute-force scans agree to the last bit.
#[inline]
pub fn distance_squared(a: &Point3, b: &Point3) -> f64 {
    let dx = a.x - b.x;
    let dy = a.y - b.y;
    let dz = a.z - b.z;
    dx * dx + dy * dy + dz * dz
}

#[inline]
pub fn distance(a: &Point3, b: &Point3) -> f64 {
    distance_squared(a, b).sqrt()
}

/// Vertex adjacency over face edges, weighted by edge length.
#[derive(Debug, Clone)]
pub struct EdgeGraph {
    neighbors: Vec<Vec<(usize, f64)>>,
}

impl EdgeGraph {
    fn build(vertices: &[Point3], faces: &[[usize; 3]]) -> Self {
        let mut neighbors: Vec<Vec<(usize, f64)>> = vec![Vec::new(); vertices.len()];
        for face in faces {
            for k in 0..3 {
                let a = face[k];
                let b = face[(k + 1) % 3];
                neighbors[a].push((b, 0.0));
                neighbors[b].push((a, 0.0));
            }
        }
        for (v, list) in neighbors.iter_mut().enumerate() {
            list.sort_unstable_by_key(|&(n, _)| n);
            list.dedup_by_key(|&mut (n, _)| n);
            for entry in list.iter_mut() {
                // weight computed from the lower index so both directions agree bitwise
                let (lo, hi) = if v < entry.0 { (v, entry.0) } else { (entry.0, v) };
                entry.1 = distance(&vertices[lo], &vertices[hi]);
            }
        }
        Self { neighbors }
    }

    pub fn vertex_count(&self) -> usize {
        self.neighbors.len()
    }

    /// Neighbors of `v` with edge lengths, sorted by neighbor index.
    pub fn neighbors(&self, v: usize) -> &[(usize, f64)] {
        &self.neighbors[v]
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Connected component label per vertex, labels assigned in order of lowest vertex.
    pub fn components(&self) -> (usize, Vec<usize>) {
        let n = self.neighbors.len();
        let mut label = vec![usize::MAX; n];
        let mut count = 0;
        let mut stack = Vec::new();
        for start in 0..n {
            if label[start] != usize::MAX {
                continue;
            }
            label[start] = count;
            stack.push(start);
            while let Some(v) = stack.pop() {
                for &(w, _) in &self.neighbors[v] {
                    if label[w] == usize::MAX {
                        label[w] = count;
                        stack.push(w);
                    }
                }
            }
            count += 1;
        }
        (count, label)
    }
}

pub struct TriangleMesh {
    vertices: Vec<Point3>,
    faces: Vec<[usize; 3]>,
    edges: OnceLock<EdgeGraph>,
    kdtree: OnceLock<VertexKdTree>,
    bvh: OnceLock<FaceBvh>,
}

impl fmt::Debug for TriangleMesh {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TriangleMesh")
            .field("vertices", &self.vertices.len())
            .field("faces", &self.faces.len())
            .finish()
    }
}

impl Clone for TriangleMesh {
    fn clone(&self) -> Self {
        Self::from_parts(self.vertices.clone(), self.faces.clone())
    }
}

impl TriangleMesh {
    /// Builds a mesh, checking index ranges, repeated indices and finiteness.
    pub fn new(vertices: Vec<Point3>, faces: Vec<[usize; 3]>) -> Result<Self, MeshError> {
        if faces.is_empty() {
            return Err(MeshError::EmptyMesh);
        }
        if let Some(index) = vertices
            .iter()
            .position(|p| !(p.x.is_finite() && p.y.is_finite() && p.z.is_finite()))
        {
            return Err(MeshError::NonFinite { index });
        }
        for (fi, face) in faces.iter().enumerate() {
            for (k, &v) in face.iter().enumerate() {
                if v >= vertices.len() {
                    return Err(MeshError::IndexOutOfRange {
                        face: fi,
                        vertex: v,
                        vertex_count: vertices.len(),
                    });
                }
                if face[..k].contains(&v) {
                    return Err(MeshError::RepeatedVertex { face: fi, vertex: v });
                }
            }
        }
        Ok(Self::from_parts(vertices, faces))
    }

    fn from_parts(vertices: Vec<Point3>, faces: Vec<[usize; 3]>) -> Self {
        Self {
            vertices,
            faces,
            edges: OnceLock::new(),
            kdtree: OnceLock::new(),
            bvh: OnceLock::new(),
        }
    }

    pub fn vertices(&self) -> &[Point3] {
        &self.vertices
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn vertex(&self, index: usize) -> &Point3 {
        &self.vertices[index]
    }

    pub fn triangle(&self, face: usize) -> [Point3; 3] {
        let [a, b, c] = self.faces[face];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    pub fn face_area(&self, face: usize) -> f64 {
        let [a, b, c] = self.triangle(face);
        0.5 * (b - a).cross(&(c - a)).norm()
    }

    pub fn is_degenerate_face(&self, face: usize) -> bool {
        self.face_area(face) < DEGENERATE_AREA
    }

    pub fn bounding_box(&self) -> Aabb {
        Aabb::from_points(self.vertices.iter())
    }

    /// Edge graph, built on first access.
    pub fn edge_graph(&self) -> &EdgeGraph {
        self.edges
            .get_or_init(|| EdgeGraph::build(&self.vertices, &self.faces))
    }

    /// Bounding-volume hierarchy over non-degenerate faces.
    pub fn face_bvh(&self) -> &FaceBvh {
        self.bvh.get_or_init(|| FaceBvh::build(self))
    }

    fn vertex_kdtree(&self) -> &VertexKdTree {
        self.kdtree.get_or_init(|| VertexKdTree::build(&self.vertices))
    }

    /// Index of the vertex closest to `point`; ties go to the lowest index.
    pub fn min_vertex(&self, point: &Point3) -> Result<usize, MeshError> {
        if self.vertices.is_empty() {
            return Err(MeshError::EmptyMesh);
        }
        Ok(self.vertex_kdtree().nearest(&self.vertices, point))
    }

    /// Smallest distance between two distinct vertices (the mesh resolution).
    pub fn g_min(&self) -> Result<f64, MeshError> {
        if self.vertices.len() < 2 {
            return Err(MeshError::TooFewVertices(self.vertices.len()));
        }
        let mut order: Vec<usize> = (0..self.vertices.len()).collect();
        order.sort_by(|&a, &b| self.vertices[a].x.total_cmp(&self.vertices[b].x));
        let mut best = f64::INFINITY;
        for (i, &a) in order.iter().enumerate() {
            let pa = &self.vertices[a];
            for &b in &order[i + 1..] {
                let pb = &self.vertices[b];
                let dx = pb.x - pa.x;
                if dx * dx > best {
                    break;
                }
                let d2 = distance_squared(pa, pb);
                if d2 < best {
                    best = d2;
                }
            }
        }
        Ok(best.sqrt())
    }

    /// Returns a copy with every vertex mapped through `f`.
    pub fn map_vertices(&self, f: impl Fn(&Point3) -> Point3) -> TriangleMesh {
        Self::from_parts(self.vertices.iter().map(f).collect(), self.faces.clone())
    }

    pub fn scaled(&self, factor: f64) -> TriangleMesh {
        self.map_vertices(|p| Point3::from(p.coords * factor))
    }

    pub fn translated(&self, offset: Vec3) -> TriangleMesh {
        self.map_vertices(|p| p + offset)
    }

    /// Inspects the mesh without changing it.
    pub fn validate(&self) -> MeshValidationReport {
        let degenerate_face_indices: Vec<usize> = (0..self.faces.len())
            .filter(|&f| self.is_degenerate_face(f))
            .collect();
        let (connected_component_count, _) = self.edge_graph().components();

        let mut edge_use: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for face in &self.faces {
            for k in 0..3 {
                let (a, b) = (face[k], face[(k + 1) % 3]);
                *edge_use.entry((a.min(b), a.max(b))).or_default() += 1;
            }
        }
        let is_watertight = edge_use.values().all(|&n| n == 2);

        MeshValidationReport {
            vertex_count: self.vertices.len(),
            face_count: self.faces.len(),
            degenerate_face_indices,
            connected_component_count,
            is_watertight,
            g_min: self.g_min().ok(),
        }
    }
}

/// Outcome of [`TriangleMesh::validate`]. Problems are reported here rather than raised.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeshValidationReport {
    pub vertex_count: usize,
    pub face_count: usize,
    pub degenerate_face_indices: Vec<usize>,
    pub connected_component_count: usize,
    pub is_watertight: bool,
    /// Meters. Absent for meshes with fewer than two vertices.
    pub g_min: Option<f64>,
}

impl MeshValidationReport {
    /// A mesh is usable for scoring when it has no degenerate faces.
    pub fn is_valid(&self) -> bool {
        self.degenerate_face_indices.is_empty() && self.face_count > 0
    }
}

impl fmt::Display for MeshValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "vertices:            {}", self.vertex_count)?;
        writeln!(f, "faces:               {}", self.face_count)?;
        writeln!(
            f,
            "degenerate faces:    {}",
            if self.degenerate_face_indices.is_empty() {
                "none".to_string()
            } else {
                format!("{:?}", self.degenerate_face_indices)
            }
        )?;
        writeln!(f, "components:          {}", self.connected_component_count)?;
        writeln!(f, "watertight:          {}", self.is_watertight)?;
        match self.g_min {
            Some(g) => write!(f, "g_min:               {:.6} m ({:.3} cm)", g, g * 100.0),
            None => write!(f, "g_min:               n/a"),
        }
    }
}
