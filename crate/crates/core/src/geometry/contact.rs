//! Contact-region error between robot links and a desired contact region.
//!
//! Both the region and each link are projected onto the object: every
//! intersection sample is snapped to its nearest object vertex. The error is
//! the largest distance from a robot contact vertex to its closest region
//! vertex.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::{check_tolerance, intersect, GeodesicMethod, GeodesicSolver, GeometryError, IntersectionPointSet};
use crate::mesh::{distance, TriangleMesh};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ContactMetric {
    Euclidean,
    Geodesic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContactRegionResult {
    /// Meters.
    pub max_d: f64,
    /// Robot contact vertex attaining `max_d` (lowest index among ties).
    pub farthest_vertex: usize,
    /// Object vertices touched by the links, ascending and unique.
    pub robot_vertices: Vec<usize>,
    /// Object vertices covered by the desired region, ascending and unique.
    pub region_vertices: Vec<usize>,
}

/// Nearest object vertex for every sample point, ascending and unique.
pub fn snap_to_vertices(points: &IntersectionPointSet, object: &TriangleMesh) -> Result<Vec<usize>, GeometryError> {
    let mut out = points
        .points
        .iter()
        .map(|p| object.min_vertex(p))
        .collect::<Result<Vec<_>, _>>()?;
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// Scores contacts against one object mesh, reusing the surface solver across calls.
pub struct ContactEvaluator<'a> {
    object: &'a TriangleMesh,
    tolerance: f64,
    method: GeodesicMethod,
    solver: OnceLock<GeodesicSolver>,
}

impl<'a> ContactEvaluator<'a> {
    pub fn new(object: &'a TriangleMesh, tolerance: f64, method: GeodesicMethod) -> Result<Self, GeometryError> {
        check_tolerance(tolerance)?;
        Ok(Self {
            object,
            tolerance,
            method,
            solver: OnceLock::new(),
        })
    }

    pub fn object(&self) -> &'a TriangleMesh {
        self.object
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn solver(&self) -> &GeodesicSolver {
        self.solver.get_or_init(|| GeodesicSolver::new(self.object, self.method))
    }

    /// Object vertices under the desired region (`V_c`).
    pub fn region_vertices(&self, region: &TriangleMesh) -> Result<Vec<usize>, GeometryError> {
        let points = intersect(region, self.object, self.tolerance)?;
        let vertices = snap_to_vertices(&points, self.object)?;
        if vertices.is_empty() {
            return Err(GeometryError::EmptyRegionProjection);
        }
        Ok(vertices)
    }

    /// Object vertices touched by any link (`P_r`).
    pub fn robot_vertices(&self, links: &[TriangleMesh]) -> Result<Vec<usize>, GeometryError> {
        if links.is_empty() {
            return Err(GeometryError::NoLinks);
        }
        let mut all = Vec::new();
        for link in links {
            let points = intersect(link, self.object, self.tolerance)?;
            all.extend(snap_to_vertices(&points, self.object)?);
        }
        all.sort_unstable();
        all.dedup();
        if all.is_empty() {
            return Err(GeometryError::NoRobotContact);
        }
        Ok(all)
    }

    /// Largest over `robot` of the smallest distance to any of `region`.
    ///
    /// Under the geodesic metric, region vertices on another connected
    /// component are unreachable and skipped; a robot vertex with no reachable
    /// region vertex is an error.
    pub fn max_min_distance(
        &self,
        robot: &[usize],
        region: &[usize],
        metric: ContactMetric,
    ) -> Result<(f64, usize), GeometryError> {
        if region.is_empty() {
            return Err(GeometryError::EmptyRegionProjection);
        }
        if robot.is_empty() {
            return Err(GeometryError::NoRobotContact);
        }
        let mut max_d = 0.0;
        let mut farthest = robot[0];
        for &v in robot {
            let mut min_d = f64::INFINITY;
            match metric {
                ContactMetric::Euclidean => {
                    let pv = self.object.vertex(v);
                    for &p in region {
                        let d = distance(pv, self.object.vertex(p));
                        if d < min_d {
                            min_d = d;
                        }
                    }
                }
                ContactMetric::Geodesic => {
                    let solver = self.solver();
                    for &p in region {
                        if !solver.same_component(v, p) {
                            continue;
                        }
                        let d = solver.distance(v, p)?;
                        if d < min_d {
                            min_d = d;
                        }
                    }
                    if min_d.is_infinite() {
                        return Err(GeometryError::DisconnectedVertices { a: v, b: region[0] });
                    }
                }
            }
            if min_d > max_d {
                max_d = min_d;
                farthest = v;
            }
        }
        Ok((max_d, farthest))
    }

    pub fn evaluate(
        &self,
        links: &[TriangleMesh],
        region: &TriangleMesh,
        metric: ContactMetric,
    ) -> Result<ContactRegionResult, GeometryError> {
        let region_vertices = self.region_vertices(region)?;
        let robot_vertices = self.robot_vertices(links)?;
        let (max_d, farthest_vertex) = self.max_min_distance(&robot_vertices, &region_vertices, metric)?;
        Ok(ContactRegionResult {
            max_d,
            farthest_vertex,
            robot_vertices,
            region_vertices,
        })
    }
}

/// Contact-region error `max_d` in meters, geodesics over mesh edges.
pub fn contact_region_error(
    object: &TriangleMesh,
    links: &[TriangleMesh],
    region: &TriangleMesh,
    metric: ContactMetric,
    tolerance: f64,
) -> Result<f64, GeometryError> {
    ContactEvaluator::new(object, tolerance, GeodesicMethod::EdgeDijkstra)?
        .evaluate(links, region, metric)
        .map(|r| r.max_d)
}
