//! Benchmark tasks, trial records, the setup gate and per-trial scoring.

mod scoring;
mod task;
mod trial;

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::GeometryError;
use crate::mesh::io::resolve_relative;
use crate::mesh::{load_mesh_scaled, MeshError, MeshFormat, TriangleMesh};
use crate::pose::PoseError;

pub use scoring::{
    check_grasp_set, score_trial, validate_setup, validate_setup_contacts, ComplianceReport, ScoredGraspSet, Scorer,
    ScoringOptions, SetupCheck, SetupVerdict, TrialMetrics, TrialScore, SETUP_DISCARD_PCT,
};
pub use task::{load_task, load_task_with, parse_task, Task, TaskDefinition};
pub use trial::{load_bundle, load_trial, parse_trial, GraspSet, LinkPlacement, LoadedTrial, Outcome, TrialRecord};

/// Number of executions each grasp set must be run.
pub const TRIALS_PER_GRASP_SET: usize = 5;

#[derive(Debug, Error)]
pub enum ProtocolError {
    #[error("{}: schema error: {message}", path.display())]
    Schema { path: PathBuf, message: String },
    #[error("{}: level {level} task requires field `{field}`", path.display())]
    MissingField { path: PathBuf, level: Level, field: &'static str },
    #[error("{}: cannot resolve mesh {}: {source}", path.display(), mesh.display())]
    MeshResolution {
        path: PathBuf,
        mesh: PathBuf,
        #[source]
        source: MeshError,
    },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("trial {trial_index} belongs to task `{found}`, expected `{expected}`")]
    TaskMismatch { trial_index: u32, expected: String, found: String },
    #[error("trial {trial_index}: link placements are required to score a level {level} task")]
    MissingLinkPlacements { trial_index: u32, level: Level },
    #[error("trial {trial_index}: setup_pose is required by the setup check")]
    MissingSetupPose { trial_index: u32 },
    #[error("setup pose validation does not apply to level {0} tasks")]
    SetupNotApplicable(Level),
    #[error(transparent)]
    Pose(#[from] PoseError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

impl ProtocolError {
    fn schema(path: &Path, message: impl fmt::Display) -> Self {
        ProtocolError::Schema {
            path: path.to_path_buf(),
            message: message.to_string(),
        }
    }
}

/// Task level: desired hand pose only, desired contact region only, or both.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Level {
    I,
    II,
    III,
}

impl Level {
    pub fn has_pose_targets(self) -> bool {
        matches!(self, Level::I | Level::III)
    }

    pub fn has_contact_targets(self) -> bool {
        matches!(self, Level::II | Level::III)
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Level::I => "I",
            Level::II => "II",
            Level::III => "III",
        })
    }
}

impl FromStr for Level {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "I" | "1" => Ok(Level::I),
            "II" | "2" => Ok(Level::II),
            "III" | "3" => Ok(Level::III),
            other => Err(format!("unknown level `{other}`")),
        }
    }
}

fn default_units() -> f64 {
    1.0
}

fn default_format() -> MeshFormat {
    MeshFormat::Auto
}

/// Mesh file reference. `units` converts file coordinates to meters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeshRef {
    pub path: PathBuf,
    #[serde(default = "default_units")]
    pub units: f64,
    #[serde(default = "default_format", skip_serializing_if = "is_auto")]
    pub format: MeshFormat,
}

fn is_auto(f: &MeshFormat) -> bool {
    *f == MeshFormat::Auto
}

impl MeshRef {
    pub fn new(path: impl Into<PathBuf>, units: f64) -> Self {
        Self {
            path: path.into(),
            units,
            format: MeshFormat::Auto,
        }
    }

    /// Loads the mesh, resolving a relative path against `base_file`'s directory.
    pub fn load(&self, base_file: &Path) -> Result<TriangleMesh, ProtocolError> {
        let resolved = resolve_relative(base_file, &self.path);
        let wrap = |source| ProtocolError::MeshResolution {
            path: base_file.to_path_buf(),
            mesh: resolved.clone(),
            source,
        };
        if !(self.units.is_finite() && self.units > 0.0) {
            return Err(ProtocolError::schema(
                base_file,
                format!("mesh {}: units must be positive, got {}", self.path.display(), self.units),
            ));
        }
        load_mesh_scaled(&resolved, self.format, self.units).map_err(wrap)
    }
}

fn check_schema_version(path: &Path, found: u32) -> Result<(), ProtocolError> {
    if found != crate::SCHEMA_VERSION {
        return Err(ProtocolError::schema(
            path,
            format!("schema_version {found} is not supported (expected {})", crate::SCHEMA_VERSION),
        ));
    }
    Ok(())
}

fn read_file(path: &Path) -> Result<Vec<u8>, ProtocolError> {
    std::fs::read(path).map_err(|source| ProtocolError::Io {
        path: path.to_path_buf(),
        source,
    })
}
