use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{check_schema_version, read_file, MeshRef, ProtocolError};
use crate::mesh::TriangleMesh;
use crate::pose::Pose;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Outcome {
    Success,
    Dropped,
    FailedOther,
}

/// A robot link mesh placed in the object frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkPlacement {
    pub mesh: MeshRef,
    pub pose: Pose,
}

/// One execution of a task, as recorded by the experimenter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrialRecord {
    pub schema_version: u32,
    pub task_id: String,
    pub trial_index: u32,
    /// Method label used when grouping reports.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub setup_pose: Option<Pose>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reached_pose: Option<Pose>,
    /// Links in contact with the object at the reached grasp.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub link_placements: Vec<LinkPlacement>,
    /// Links in contact at the initial grasp, used by the contact setup check.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub setup_link_placements: Vec<LinkPlacement>,
    pub planning_time_s: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub offline_time_s: Option<f64>,
    pub execution_time_s: f64,
    pub outcome: Outcome,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub cause: String,
    pub stability_attested: bool,
}

impl TrialRecord {
    fn check(&self, path: &Path) -> Result<(), ProtocolError> {
        check_schema_version(path, self.schema_version)?;
        if self.trial_index < 1 {
            return Err(ProtocolError::schema(path, "trial_index must be at least 1"));
        }
        if self.outcome == Outcome::Success && self.reached_pose.is_none() {
            return Err(ProtocolError::schema(path, "SUCCESS trials require reached_pose"));
        }
        let times = [Some(self.planning_time_s), self.offline_time_s, Some(self.execution_time_s)];
        if times.iter().flatten().any(|t| !(t.is_finite() && *t >= 0.0)) {
            return Err(ProtocolError::schema(path, "times must be finite and non-negative"));
        }
        Ok(())
    }
}

/// A trial with its link meshes loaded and placed in the object frame.
#[derive(Debug, Clone)]
pub struct LoadedTrial {
    pub record: TrialRecord,
    pub source: PathBuf,
    pub links: Vec<TriangleMesh>,
    pub setup_links: Vec<TriangleMesh>,
}

impl LoadedTrial {
    /// Wraps in-memory data; link meshes must already be in the object frame.
    pub fn from_parts(record: TrialRecord, links: Vec<TriangleMesh>, setup_links: Vec<TriangleMesh>) -> Self {
        Self {
            record,
            source: PathBuf::new(),
            links,
            setup_links,
        }
    }
}

/// All recorded executions of one grasp set.
#[derive(Debug, Clone)]
pub struct GraspSet {
    pub task_id: String,
    pub trials: Vec<LoadedTrial>,
}

type MeshCache = HashMap<(PathBuf, u64, String), Arc<TriangleMesh>>;

fn place_links(
    placements: &[LinkPlacement],
    path: &Path,
    cache: &mut MeshCache,
) -> Result<Vec<TriangleMesh>, ProtocolError> {
    placements
        .iter()
        .map(|lp| {
            let key = (
                super::resolve_relative(path, &lp.mesh.path),
                lp.mesh.units.to_bits(),
                lp.mesh.format.to_string(),
            );
            let base = match cache.get(&key) {
                Some(m) => m.clone(),
                None => {
                    let m = Arc::new(lp.mesh.load(path)?);
                    cache.insert(key, m.clone());
                    m
                }
            };
            Ok(base.map_vertices(|p| lp.pose.transform_point(p)))
        })
        .collect()
}

/// Parses trial JSON without loading link meshes.
pub fn parse_trial(bytes: &[u8], path: &Path) -> Result<TrialRecord, ProtocolError> {
    let record: TrialRecord = serde_json::from_slice(bytes).map_err(|e| ProtocolError::schema(path, e))?;
    record.check(path)?;
    Ok(record)
}

/// Loads one trial file and its link meshes.
pub fn load_trial(path: impl AsRef<Path>) -> Result<LoadedTrial, ProtocolError> {
    load_trial_cached(path.as_ref(), &mut MeshCache::new())
}

fn load_trial_cached(path: &Path, cache: &mut MeshCache) -> Result<LoadedTrial, ProtocolError> {
    let record = parse_trial(&read_file(path)?, path)?;
    let links = place_links(&record.link_placements, path, cache)?;
    let setup_links = place_links(&record.setup_link_placements, path, cache)?;
    Ok(LoadedTrial {
        record,
        source: path.to_path_buf(),
        links,
        setup_links,
    })
}

/// Loads every `*.json` trial file in `dir`, ordered by trial index.
pub fn load_bundle(dir: impl AsRef<Path>) -> Result<GraspSet, ProtocolError> {
    let dir = dir.as_ref();
    let io_err = |source| ProtocolError::Io {
        path: dir.to_path_buf(),
        source,
    };
    let mut files = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(io_err)? {
        let p = entry.map_err(io_err)?.path();
        if p.is_file() && p.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
            files.push(p);
        }
    }
    files.sort();
    if files.is_empty() {
        return Err(ProtocolError::schema(dir, "bundle contains no trial files"));
    }

    let mut cache = MeshCache::new();
    let mut trials = files
        .iter()
        .map(|f| load_trial_cached(f, &mut cache))
        .collect::<Result<Vec<_>, _>>()?;
    trials.sort_by_key(|t| t.record.trial_index);

    let task_id = trials[0].record.task_id.clone();
    for t in &trials {
        if t.record.task_id != task_id {
            return Err(ProtocolError::schema(
                &t.source,
                format!("bundle mixes tasks `{}` and `{}`", task_id, t.record.task_id),
            ));
        }
    }
    for w in trials.windows(2) {
        if w[0].record.trial_index == w[1].record.trial_index {
            return Err(ProtocolError::schema(
                &w[1].source,
                format!("duplicate trial_index {}", w[1].record.trial_index),
            ));
        }
    }
    Ok(GraspSet { task_id, trials })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::save_mesh;
    use crate::mesh::test_meshes::unit_cube;
    use crate::MeshFormat;
    use serde_json::json;

    fn trial_json(index: u32, outcome: &str) -> serde_json::Value {
        json!({
            "schema_version": 1, "task_id": "t", "trial_index": index, "method": "m",
            "setup_pose": [0, 0, 0, 1, 0, 0, 0],
            "reached_pose": [0.1, 0, 0, 1, 0, 0, 0],
            "link_placements": [{"mesh": {"path": "links/cube.obj", "units": 0.01}, "pose": [1, 2, 3, 0, 0, 0, 1]}],
            "planning_time_s": 0.5, "execution_time_s": 2.0,
            "outcome": outcome, "stability_attested": true
        })
    }

    fn bundle(records: &[serde_json::Value]) -> tempfile::TempDir {
        let dir = tempfile::tempdir().unwrap();
        std::fs::create_dir(dir.path().join("links")).unwrap();
        save_mesh(&unit_cube(), dir.path().join("links/cube.obj"), MeshFormat::Obj).unwrap();
        for (i, r) in records.iter().enumerate() {
            std::fs::write(dir.path().join(format!("trial_{i:02}.json")), r.to_string()).unwrap();
        }
        dir
    }

    #[test]
    fn loads_and_places_links() {
        let dir = bundle(&[trial_json(2, "SUCCESS"), trial_json(1, "DROPPED")]);
        let set = load_bundle(dir.path()).unwrap();
        assert_eq!(set.task_id, "t");
        assert_eq!(
            set.trials.iter().map(|t| t.record.trial_index).collect::<Vec<_>>(),
            vec![1, 2]
        );
        let link = &set.trials[0].links[0];
        // Half turn about z, then translate.
        let v = link.vertex(7);
        assert!((v - crate::Point3::new(0.99, 1.99, 3.01)).norm() < 1e-12, "{v}");
    }

    #[test]
    fn rejects_bad_records() {
        let p = Path::new("x.json");
        let mut r = trial_json(0, "SUCCESS");
        assert!(parse_trial(r.to_string().as_bytes(), p).is_err());
        r = trial_json(1, "SUCCESS");
        r.as_object_mut().unwrap().remove("reached_pose");
        assert!(parse_trial(r.to_string().as_bytes(), p).is_err());
        r = trial_json(1, "DROPPED");
        r.as_object_mut().unwrap().remove("reached_pose");
        assert!(parse_trial(r.to_string().as_bytes(), p).is_ok());
        r = trial_json(1, "SUCCESS");
        r["execution_time_s"] = json!(-1.0);
        assert!(parse_trial(r.to_string().as_bytes(), p).is_err());
        r = trial_json(1, "WON");
        assert!(parse_trial(r.to_string().as_bytes(), p).is_err());
    }

    #[test]
    fn record_round_trips() {
        let r = parse_trial(trial_json(3, "FAILED_OTHER").to_string().as_bytes(), Path::new("x")).unwrap();
        let back = parse_trial(serde_json::to_string(&r).unwrap().as_bytes(), Path::new("x")).unwrap();
        assert_eq!(r, back);
    }

    #[test]
    fn bundle_errors() {
        let dir = bundle(&[trial_json(1, "SUCCESS"), trial_json(1, "SUCCESS")]);
        assert!(matches!(load_bundle(dir.path()), Err(ProtocolError::Schema { .. })));
        let mut other = trial_json(2, "SUCCESS");
        other["task_id"] = json!("u");
        let dir = bundle(&[trial_json(1, "SUCCESS"), other]);
        assert!(load_bundle(dir.path()).is_err());
        let dir = bundle(&[]);
        assert!(load_bundle(dir.path()).is_err());
    }
}
