//! Evaluation toolkit for in-hand manipulation benchmarks.
//!
//! The crate scores robot trials against benchmark tasks:
//!
//! - [`mesh`]: triangle mesh loading (OBJ, PLY, STL), validation, nearest-vertex
//!   queries and the mesh resolution `G_min`.
//! - [`geometry`]: mesh/mesh intersection sampling, Euclidean and geodesic surface
//!   distances and the contact-region error between robot links and a desired
//!   contact region.
//! - [`pose`]: hand pose errors (position, position percentage, orientation
//!   percentage) and relative grasp transforms.
//! - [`protocol`]: task and trial files, the setup gate, per-trial scoring and
//!   grasp-set compliance.
//! - [`report`]: box-plot statistics, summary tables and CSV/JSON/SVG emission.
//! - [`cli`]: the `ihmbench` command line front end.
//!
//! All lengths are meters internally. Reports render centimeters.

pub mod cli;
pub mod geometry;
pub mod mesh;
pub mod pose;
pub mod protocol;
pub mod report;

pub use geometry::{
    contact_region_error, euclidean_metric, intersect, ContactMetric, GeodesicMethod,
    GeodesicSolver, GeometryError, IntersectionPointSet,
};
pub use mesh::{load_mesh, MeshError, MeshFormat, MeshValidationReport, TriangleMesh};
pub use pose::{Pose, PoseError, RigidTransform};

/// Toolkit version recorded in every report.
pub const TOOLKIT_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Version of the task, trial and report file schemas.
pub const SCHEMA_VERSION: u32 = 1;

/// Default proximity tolerance for contact extraction, in meters.
pub const DEFAULT_CONTACT_TOLERANCE: f64 = 0.002;

/// 3D point in meters.
pub type Point3 = nalgebra::Point3<f64>;
/// 3D vector in meters.
pub type Vec3 = nalgebra::Vector3<f64>;
