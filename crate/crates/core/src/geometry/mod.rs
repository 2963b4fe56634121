//! Geometric kernel for contact scoring: mesh/mesh intersection sampling,
//! Euclidean and surface distances, and the contact-region error.

mod contact;
mod geodesic;
mod tri;

use serde::{Deserialize, Serialize};

use crate::mesh::{distance, MeshError, TriangleMesh};
use crate::Point3;

pub use contact::{
    contact_region_error, snap_to_vertices, ContactEvaluator, ContactMetric, ContactRegionResult,
};
pub use geodesic::{geodesic_metric, GeodesicMethod, GeodesicSolver, STEINER_POINTS_PER_EDGE};
pub use tri::{closest_point_on_triangle, closest_points, closest_segment_points, triangle_pair_points};

#[derive(Debug, thiserror::Error)]
pub enum GeometryError {
    #[error("tolerance must be non-negative and finite, got {0}")]
    InvalidTolerance(f64),
    #[error("vertices {a} and {b} lie on different connected components")]
    DisconnectedVertices { a: usize, b: usize },
    #[error("vertex {vertex} out of range ({vertex_count} vertices)")]
    VertexOutOfRange { vertex: usize, vertex_count: usize },
    #[error("no robot link touches the object within the contact tolerance")]
    NoRobotContact,
    #[error("the desired contact region does not meet the object within the contact tolerance")]
    EmptyRegionProjection,
    #[error("at least one link mesh is required")]
    NoLinks,
    #[error(transparent)]
    Mesh(#[from] MeshError),
}

/// Sample points where faces of one mesh meet or approach faces of another.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct IntersectionPointSet {
    pub points: Vec<Point3>,
    /// `(face in first mesh, face in second mesh)` for each point.
    pub source_face_pairs: Vec<(usize, usize)>,
}

impl IntersectionPointSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

pub(crate) fn check_tolerance(tolerance: f64) -> Result<(), GeometryError> {
    if tolerance >= 0.0 && tolerance.is_finite() {
        Ok(())
    } else {
        Err(GeometryError::InvalidTolerance(tolerance))
    }
}

/// Samples every non-degenerate face pair of `mesh_a` × `mesh_b` that comes within
/// `tolerance`. Pairs are visited in ascending `(face_a, face_b)` order.
pub fn intersect(mesh_a: &TriangleMesh, mesh_b: &TriangleMesh, tolerance: f64) -> Result<IntersectionPointSet, GeometryError> {
    check_tolerance(tolerance)?;
    let mut out = IntersectionPointSet::default();
    let bvh = mesh_b.face_bvh();
    if bvh.is_empty() {
        return Ok(out);
    }
    // slightly wider than the tolerance so rounding in the boxes never drops a pair
    let margin = tolerance * (1.0 + 1e-9) + 1e-15;
    for fa in 0..mesh_a.face_count() {
        if mesh_a.is_degenerate_face(fa) {
            continue;
        }
        let ta = mesh_a.triangle(fa);
        let query = crate::mesh::Aabb::from_points(ta.iter()).inflated(margin);
        for fb in bvh.query(&query) {
            if let Some(points) = triangle_pair_points(&ta, &mesh_b.triangle(fb), tolerance) {
                for p in points {
                    out.points.push(p);
                    out.source_face_pairs.push((fa, fb));
                }
            }
        }
    }
    Ok(out)
}

/// Straight-line distance between two points.
pub fn euclidean_metric(p1: &Point3, p2: &Point3) -> f64 {
    distance(p1, p2)
}
