use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{check_schema_version, read_file, Level, MeshRef, ProtocolError};
use crate::geometry::intersect;
use crate::mesh::{MeshValidationReport, TriangleMesh};
use crate::pose::Pose;

/// Task file contents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskDefinition {
    pub schema_version: u32,
    pub task_id: String,
    /// Display label for grouping by object; defaults to the task id.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub object: Option<String>,
    pub level: Level,
    pub object_mesh: MeshRef,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_region: Option<MeshRef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub desired_region: Option<MeshRef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_hand_pose: Option<Pose>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub desired_hand_pose: Option<Pose>,
}

/// A task with its meshes loaded and checked.
#[derive(Debug, Clone)]
pub struct Task {
    pub definition: TaskDefinition,
    pub source: PathBuf,
    pub object: TriangleMesh,
    pub object_report: MeshValidationReport,
    pub initial_region: Option<TriangleMesh>,
    /// Always `None` for Level I tasks.
    pub desired_region: Option<TriangleMesh>,
    /// Object mesh resolution, meters.
    pub g_min: f64,
    pub warnings: Vec<String>,
}

impl Task {
    pub fn task_id(&self) -> &str {
        &self.definition.task_id
    }

    pub fn level(&self) -> Level {
        self.definition.level
    }

    pub fn object_label(&self) -> &str {
        self.definition.object.as_deref().unwrap_or(&self.definition.task_id)
    }

    pub fn initial_hand_pose(&self) -> Option<&Pose> {
        self.definition.initial_hand_pose.as_ref()
    }

    pub fn desired_hand_pose(&self) -> Option<&Pose> {
        self.definition.desired_hand_pose.as_ref()
    }
}

pub fn load_task(path: impl AsRef<Path>) -> Result<Task, ProtocolError> {
    load_task_with(path, crate::DEFAULT_CONTACT_TOLERANCE)
}

/// Loads a task; `tolerance` is used for the region/object overlap check.
pub fn load_task_with(path: impl AsRef<Path>, tolerance: f64) -> Result<Task, ProtocolError> {
    let path = path.as_ref();
    let bytes = read_file(path)?;
    parse_task(&bytes, path, tolerance)
}

/// Parses task JSON; mesh references resolve against `path`'s directory.
pub fn parse_task(bytes: &[u8], path: &Path, tolerance: f64) -> Result<Task, ProtocolError> {
    let definition: TaskDefinition =
        serde_json::from_slice(bytes).map_err(|e| ProtocolError::schema(path, e))?;
    check_schema_version(path, definition.schema_version)?;
    if definition.task_id.trim().is_empty() {
        return Err(ProtocolError::schema(path, "task_id is empty"));
    }

    let level = definition.level;
    let missing = |field| ProtocolError::MissingField {
        path: path.to_path_buf(),
        level,
        field,
    };
    if level.has_pose_targets() {
        if definition.initial_hand_pose.is_none() {
            return Err(missing("initial_hand_pose"));
        }
        if definition.desired_hand_pose.is_none() {
            return Err(missing("desired_hand_pose"));
        }
    }
    if level.has_contact_targets() && definition.desired_region.is_none() {
        return Err(missing("desired_region"));
    }

    let mut warnings = Vec::new();
    let object = definition.object_mesh.load(path)?;
    let object_report = object.validate();
    let g_min = object_report.g_min.ok_or_else(|| ProtocolError::MeshResolution {
        path: path.to_path_buf(),
        mesh: definition.object_mesh.path.clone(),
        source: crate::MeshError::TooFewVertices(object.vertex_count()),
    })?;
    if !object_report.degenerate_face_indices.is_empty() {
        warnings.push(format!(
            "object mesh has {} degenerate faces; they are ignored for contact extraction",
            object_report.degenerate_face_indices.len()
        ));
    }

    let mut load_region = |name: &str, r: &MeshRef| -> Result<TriangleMesh, ProtocolError> {
        let mesh = r.load(path)?;
        if intersect(&mesh, &object, tolerance)?.is_empty() {
            warnings.push(format!(
                "{name} does not meet the object mesh within {tolerance} m; scoring against it will fail"
            ));
        }
        Ok(mesh)
    };
    let initial_region = definition
        .initial_region
        .as_ref()
        .map(|r| load_region("initial_region", r))
        .transpose()?;
    let desired_region = match (&definition.desired_region, level) {
        (Some(_), Level::I) => {
            warnings.push("desired_region is ignored for level I tasks".to_string());
            None
        }
        (Some(r), _) => Some(load_region("desired_region", r)?),
        (None, _) => None,
    };

    if let (Some(h_i), Some(h_d)) = (&definition.initial_hand_pose, &definition.desired_hand_pose) {
        if level.has_pose_targets() && h_i.position == h_d.position {
            warnings.push("initial and desired hand positions coincide; position percentages are undefined".into());
        }
    }

    Ok(Task {
        definition,
        source: path.to_path_buf(),
        object,
        object_report,
        initial_region,
        desired_region,
        g_min,
        warnings,
    })
}
