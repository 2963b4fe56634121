use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{GraspSet, Level, LoadedTrial, Outcome, ProtocolError, Task, TRIALS_PER_GRASP_SET};
use crate::geometry::{ContactEvaluator, ContactMetric, GeodesicMethod, GeometryError};
use crate::mesh::TriangleMesh;
use crate::pose::{orientation_error_pct, position_error, position_error_pct, Pose, PoseError};

/// Setup error percentage above which a trial is discarded.
pub const SETUP_DISCARD_PCT: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoringOptions {
    /// Meters.
    pub contact_tolerance: f64,
    pub geodesic_method: GeodesicMethod,
}

impl Default for ScoringOptions {
    fn default() -> Self {
        Self {
            contact_tolerance: crate::DEFAULT_CONTACT_TOLERANCE,
            geodesic_method: GeodesicMethod::EdgeDijkstra,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SetupVerdict {
    Accept,
    Discard,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SetupCheck {
    pub verdict: SetupVerdict,
    pub position_error_pct: Option<f64>,
    pub orientation_error_pct: Option<f64>,
    /// Euclidean contact-region error of the initial contacts against `C_i`, meters.
    pub contact_error_m: Option<f64>,
}

impl SetupCheck {
    fn combine(self, other: SetupCheck) -> SetupCheck {
        SetupCheck {
            verdict: if self.verdict == SetupVerdict::Discard || other.verdict == SetupVerdict::Discard {
                SetupVerdict::Discard
            } else {
                SetupVerdict::Accept
            },
            position_error_pct: self.position_error_pct.or(other.position_error_pct),
            orientation_error_pct: self.orientation_error_pct.or(other.orientation_error_pct),
            contact_error_m: self.contact_error_m.or(other.contact_error_m),
        }
    }
}

/// Compares the measured initial pose `Ĥ_i` with the task's `H_i`.
///
/// Position error is relative to the task's travel `‖s_d − s_i‖`. Either
/// percentage strictly above 10 discards the trial.
pub fn validate_setup(task: &Task, setup_pose: &Pose) -> Result<SetupCheck, ProtocolError> {
    let (Some(h_i), Some(h_d)) = (task.initial_hand_pose(), task.desired_hand_pose()) else {
        return Err(ProtocolError::SetupNotApplicable(task.level()));
    };
    if !task.level().has_pose_targets() {
        return Err(ProtocolError::SetupNotApplicable(task.level()));
    }
    let span = (h_d.position - h_i.position).norm();
    if span == 0.0 {
        return Err(PoseError::DegenerateTask.into());
    }
    let pos = 100.0 * (h_i.position - setup_pose.position).norm() / span;
    let or = orientation_error_pct(&h_i.orientation, &setup_pose.orientation);
    let verdict = if pos > SETUP_DISCARD_PCT || or > SETUP_DISCARD_PCT {
        SetupVerdict::Discard
    } else {
        SetupVerdict::Accept
    };
    Ok(SetupCheck {
        verdict,
        position_error_pct: Some(pos),
        orientation_error_pct: Some(or),
        contact_error_m: None,
    })
}

/// Checks that the initial contacts lie in `C_i`: accepted when the Euclidean
/// contact-region error is within the contact tolerance.
pub fn validate_setup_contacts(
    task: &Task,
    setup_links: &[TriangleMesh],
    options: &ScoringOptions,
) -> Result<SetupCheck, ProtocolError> {
    Scorer::new(task, *options)?.setup_contacts(setup_links)
}

/// Per-trial metrics; a field is `None` when the task level does not define it
/// or the trial did not succeed. Lengths in meters.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct TrialMetrics {
    pub err_pos_m: Option<f64>,
    pub err_pos_pct: Option<f64>,
    pub err_or_pct: Option<f64>,
    pub g_euc_m: Option<f64>,
    pub g_geo_m: Option<f64>,
    pub g_min_m: Option<f64>,
}

/// One scored trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialScore {
    pub task_id: String,
    pub object: String,
    pub method: Option<String>,
    pub level: Level,
    pub trial_index: u32,
    pub outcome: Outcome,
    pub cause: String,
    pub stability_attested: bool,
    /// `None` when the trial carries no data for the setup check.
    pub setup: Option<SetupCheck>,
    pub metrics: TrialMetrics,
    pub planning_time_s: f64,
    pub offline_time_s: Option<f64>,
    pub execution_time_s: f64,
    /// Scoring failure; the trial is excluded from statistics.
    pub error: Option<String>,
}

impl TrialScore {
    pub fn discarded(&self) -> bool {
        self.setup.is_some_and(|s| s.verdict == SetupVerdict::Discard)
    }

    /// Whether the trial feeds error statistics.
    pub fn is_scored_success(&self) -> bool {
        !self.discarded() && self.outcome == Outcome::Success && self.error.is_none()
    }

    pub fn method_label(&self) -> &str {
        self.method.as_deref().unwrap_or("unlabeled")
    }
}

/// Scores trials of one task, sharing the surface solver and region projections.
pub struct Scorer<'a> {
    task: &'a Task,
    options: ScoringOptions,
    evaluator: ContactEvaluator<'a>,
    desired: OnceLock<Option<Vec<usize>>>,
    initial: OnceLock<Option<Vec<usize>>>,
}

impl<'a> Scorer<'a> {
    pub fn new(task: &'a Task, options: ScoringOptions) -> Result<Self, ProtocolError> {
        Ok(Self {
            task,
            options,
            evaluator: ContactEvaluator::new(&task.object, options.contact_tolerance, options.geodesic_method)?,
            desired: OnceLock::new(),
            initial: OnceLock::new(),
        })
    }

    pub fn options(&self) -> &ScoringOptions {
        &self.options
    }

    fn projected<'s>(
        &'s self,
        cell: &'s OnceLock<Option<Vec<usize>>>,
        region: Option<&TriangleMesh>,
    ) -> Result<&'s [usize], GeometryError> {
        let region = region.ok_or(GeometryError::EmptyRegionProjection)?;
        cell.get_or_init(|| self.evaluator.region_vertices(region).ok())
            .as_deref()
            .ok_or(GeometryError::EmptyRegionProjection)
    }

    fn setup_contacts(&self, setup_links: &[TriangleMesh]) -> Result<SetupCheck, ProtocolError> {
        let region = self.projected(&self.initial, self.task.initial_region.as_ref())?;
        let robot = self.evaluator.robot_vertices(setup_links)?;
        let (d, _) = self.evaluator.max_min_distance(&robot, region, ContactMetric::Euclidean)?;
        Ok(SetupCheck {
            verdict: if d <= self.options.contact_tolerance {
                SetupVerdict::Accept
            } else {
                SetupVerdict::Discard
            },
            position_error_pct: None,
            orientation_error_pct: None,
            contact_error_m: Some(d),
        })
    }

    /// Runs every setup check the trial has data for.
    pub fn check_setup(&self, trial: &LoadedTrial) -> Result<Option<SetupCheck>, ProtocolError> {
        let mut check = None;
        if self.task.level().has_pose_targets() {
            let pose = trial.record.setup_pose.as_ref().ok_or(ProtocolError::MissingSetupPose {
                trial_index: trial.record.trial_index,
            })?;
            check = Some(validate_setup(self.task, pose)?);
        }
        if self.task.initial_region.is_some() && !trial.setup_links.is_empty() {
            let c = self.setup_contacts(&trial.setup_links)?;
            check = Some(match check {
                Some(p) => p.combine(c),
                None => c,
            });
        }
        Ok(check)
    }

    /// Pose errors of the reached pose against `H_d`.
    pub fn pose_metrics(&self, reached: &Pose) -> Result<TrialMetrics, ProtocolError> {
        let (Some(h_i), Some(h_d)) = (self.task.initial_hand_pose(), self.task.desired_hand_pose()) else {
            return Ok(TrialMetrics::default());
        };
        Ok(TrialMetrics {
            err_pos_m: Some(position_error(&h_d.position, &reached.position)),
            err_pos_pct: Some(position_error_pct(&h_i.position, &h_d.position, &reached.position)?),
            err_or_pct: Some(orientation_error_pct(&h_d.orientation, &reached.orientation)),
            ..TrialMetrics::default()
        })
    }

    /// Contact-region errors of the reached contacts against `C_d`.
    pub fn contact_metrics(&self, links: &[TriangleMesh]) -> Result<TrialMetrics, ProtocolError> {
        let region = self.projected(&self.desired, self.task.desired_region.as_ref())?;
        let robot = self.evaluator.robot_vertices(links)?;
        let (euc, _) = self.evaluator.max_min_distance(&robot, region, ContactMetric::Euclidean)?;
        let (geo, _) = self.evaluator.max_min_distance(&robot, region, ContactMetric::Geodesic)?;
        Ok(TrialMetrics {
            g_euc_m: Some(euc),
            g_geo_m: Some(geo),
            g_min_m: Some(self.task.g_min),
            ..TrialMetrics::default()
        })
    }

    /// Metrics defined by the task level; empty unless the trial succeeded.
    pub fn metrics(&self, trial: &LoadedTrial) -> Result<TrialMetrics, ProtocolError> {
        let r = &trial.record;
        if r.outcome != Outcome::Success {
            return Ok(TrialMetrics::default());
        }
        let level = self.task.level();
        let mut m = TrialMetrics::default();
        if level.has_pose_targets() {
            let reached = r.reached_pose.as_ref().ok_or_else(|| {
                ProtocolError::schema(&trial.source, "SUCCESS trials require reached_pose")
            })?;
            m = self.pose_metrics(reached)?;
        }
        if level.has_contact_targets() {
            if trial.links.is_empty() {
                return Err(ProtocolError::MissingLinkPlacements {
                    trial_index: r.trial_index,
                    level,
                });
            }
            let c = self.contact_metrics(&trial.links)?;
            m.g_euc_m = c.g_euc_m;
            m.g_geo_m = c.g_geo_m;
            m.g_min_m = c.g_min_m;
        }
        Ok(m)
    }

    fn row(&self, trial: &LoadedTrial) -> TrialScore {
        let r = &trial.record;
        TrialScore {
            task_id: r.task_id.clone(),
            object: self.task.object_label().to_string(),
            method: r.method.clone(),
            level: self.task.level(),
            trial_index: r.trial_index,
            outcome: r.outcome,
            cause: r.cause.clone(),
            stability_attested: r.stability_attested,
            setup: None,
            metrics: TrialMetrics::default(),
            planning_time_s: r.planning_time_s,
            offline_time_s: r.offline_time_s,
            execution_time_s: r.execution_time_s,
            error: None,
        }
    }

    fn check_task(&self, trial: &LoadedTrial) -> Result<(), ProtocolError> {
        if trial.record.task_id != self.task.task_id() {
            return Err(ProtocolError::TaskMismatch {
                trial_index: trial.record.trial_index,
                expected: self.task.task_id().to_string(),
                found: trial.record.task_id.clone(),
            });
        }
        Ok(())
    }

    /// Setup gate then metrics. A discarded trial carries no metrics.
    pub fn try_score(&self, trial: &LoadedTrial) -> Result<TrialScore, ProtocolError> {
        self.check_task(trial)?;
        let mut row = self.row(trial);
        row.setup = self.check_setup(trial)?;
        if !row.discarded() {
            row.metrics = self.metrics(trial)?;
        }
        Ok(row)
    }

    /// Like [`Scorer::try_score`], recording failures in the row instead of returning them.
    pub fn score(&self, trial: &LoadedTrial) -> TrialScore {
        self.try_score(trial).unwrap_or_else(|e| {
            let mut row = self.row(trial);
            row.setup = self.check_setup(trial).ok().flatten();
            row.error = Some(e.to_string());
            row
        })
    }

    /// Scores all trials concurrently; rows keep the set's order.
    pub fn score_set(&self, set: &GraspSet) -> ScoredGraspSet {
        let rows = set.trials.par_iter().map(|t| self.score(t)).collect();
        ScoredGraspSet {
            task_id: set.task_id.clone(),
            object: self.task.object_label().to_string(),
            level: self.task.level(),
            rows,
        }
    }
}

/// Scores one trial: the setup gate, then the level's metrics.
pub fn score_trial(task: &Task, trial: &LoadedTrial, options: &ScoringOptions) -> Result<TrialScore, ProtocolError> {
    Scorer::new(task, *options)?.try_score(trial)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredGraspSet {
    pub task_id: String,
    pub object: String,
    pub level: Level,
    pub rows: Vec<TrialScore>,
}

impl ScoredGraspSet {
    pub fn scoring_errors(&self) -> impl Iterator<Item = &TrialScore> {
        self.rows.iter().filter(|r| r.error.is_some())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplianceReport {
    pub task_id: String,
    pub recorded: usize,
    pub discarded: usize,
    /// Trials that passed (or skipped) the setup gate.
    pub valid: usize,
    pub successes: usize,
    pub dropped: usize,
    pub failed_other: usize,
    pub scoring_errors: usize,
    /// `100 · dropped / valid`; `None` without valid trials.
    pub drops_pct: Option<f64>,
    pub compliant: bool,
    pub shortfall: usize,
}

/// Counts valid trials against the five executions a grasp set needs.
pub fn check_grasp_set(set: &ScoredGraspSet) -> ComplianceReport {
    let valid: Vec<_> = set.rows.iter().filter(|r| !r.discarded()).collect();
    let count = |o| valid.iter().filter(|r| r.outcome == o).count();
    let dropped = count(Outcome::Dropped);
    ComplianceReport {
        task_id: set.task_id.clone(),
        recorded: set.rows.len(),
        discarded: set.rows.len() - valid.len(),
        valid: valid.len(),
        successes: count(Outcome::Success),
        dropped,
        failed_other: count(Outcome::FailedOther),
        scoring_errors: valid.iter().filter(|r| r.error.is_some()).count(),
        drops_pct: (!valid.is_empty()).then(|| 100.0 * dropped as f64 / valid.len() as f64),
        compliant: valid.len() >= TRIALS_PER_GRASP_SET,
        shortfall: TRIALS_PER_GRASP_SET.saturating_sub(valid.len()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::test_meshes::grid;
    use crate::protocol::{MeshRef, TaskDefinition, TrialRecord};
    use crate::{Point3, Vec3};
    use nalgebra::UnitQuaternion;

    fn pose(x: f64, y: f64, z: f64) -> Pose {
        Pose::new(Vec3::new(x, y, z), UnitQuaternion::identity())
    }

    /// 10×10 plate, spacing 1 cm; desired region covers the left two columns.
    fn task(level: Level, s_d: f64) -> Task {
        let object = grid(10, 10, 0.01);
        let region = grid(2, 10, 0.01);
        let initial = grid(2, 10, 0.01).translated(Vec3::new(0.07, 0.0, 0.0));
        let with_poses = level.has_pose_targets();
        Task {
            definition: TaskDefinition {
                schema_version: 1,
                task_id: "plate".into(),
                object: None,
                level,
                object_mesh: MeshRef::new("plate.obj", 1.0),
                initial_region: None,
                desired_region: None,
                initial_hand_pose: with_poses.then(|| pose(0.0, 0.0, 0.0)),
                desired_hand_pose: with_poses.then(|| pose(s_d, 0.0, 0.0)),
            },
            source: "plate.json".into(),
            g_min: object.g_min().unwrap(),
            object_report: object.validate(),
            object,
            initial_region: Some(initial),
            desired_region: level.has_contact_targets().then_some(region),
            warnings: vec![],
        }
    }

    fn fin(tip: Point3) -> TriangleMesh {
        TriangleMesh::new(
            vec![tip, tip + Vec3::new(-0.001, 0.0, 0.05), tip + Vec3::new(0.001, 0.0, 0.05)],
            vec![[0, 1, 2]],
        )
        .unwrap()
    }

    fn record(outcome: Outcome, setup: Pose, reached: Pose) -> TrialRecord {
        TrialRecord {
            schema_version: 1,
            task_id: "plate".into(),
            trial_index: 1,
            method: Some("m".into()),
            setup_pose: Some(setup),
            reached_pose: (outcome == Outcome::Success).then_some(reached),
            link_placements: vec![],
            setup_link_placements: vec![],
            planning_time_s: 0.1,
            offline_time_s: None,
            execution_time_s: 1.0,
            outcome,
            cause: String::new(),
            stability_attested: true,
        }
    }

    fn trial(outcome: Outcome, reached: Pose, links: Vec<TriangleMesh>) -> LoadedTrial {
        LoadedTrial::from_parts(record(outcome, pose(0.0, 0.0, 0.0), reached), links, vec![])
    }

    #[test]
    fn setup_examples() {
        let t = task(Level::I, 0.10);
        let exact = validate_setup(&t, &pose(0.0, 0.0, 0.0)).unwrap();
        assert_eq!(exact.verdict, SetupVerdict::Accept);
        assert_eq!(exact.position_error_pct, Some(0.0));
        assert_eq!(exact.orientation_error_pct, Some(0.0));
        let five = validate_setup(&t, &pose(0.005, 0.0, 0.0)).unwrap();
        assert_eq!(five.verdict, SetupVerdict::Accept);
        assert!((five.position_error_pct.unwrap() - 5.0).abs() < 1e-12);
        let twenty = validate_setup(&t, &pose(0.02, 0.0, 0.0)).unwrap();
        assert_eq!(twenty.verdict, SetupVerdict::Discard);
        assert!((twenty.position_error_pct.unwrap() - 20.0).abs() < 1e-12);
    }

    #[test]
    fn setup_boundary_is_strict() {
        let t = task(Level::III, 0.3125);
        let at = validate_setup(&t, &pose(0.03125, 0.0, 0.0)).unwrap();
        assert_eq!(at.position_error_pct, Some(10.0));
        assert_eq!(at.verdict, SetupVerdict::Accept);
        let above = validate_setup(&t, &pose(0.3125 * (10.0 + 1e-9) / 100.0, 0.0, 0.0)).unwrap();
        assert!(above.position_error_pct.unwrap() > 10.0);
        assert_eq!(above.verdict, SetupVerdict::Discard);
    }

    #[test]
    fn setup_errors() {
        assert!(matches!(
            validate_setup(&task(Level::I, 0.0), &pose(0.0, 0.0, 0.0)),
            Err(ProtocolError::Pose(PoseError::DegenerateTask))
        ));
        assert!(matches!(
            validate_setup(&task(Level::II, 0.1), &pose(0.0, 0.0, 0.0)),
            Err(ProtocolError::SetupNotApplicable(Level::II))
        ));
    }

    #[test]
    fn level_two_setup_checks_initial_contacts() {
        let t = task(Level::II, 0.1);
        let opts = ScoringOptions::default();
        let inside = validate_setup_contacts(&t, &[fin(Point3::new(0.08, 0.05, 0.0))], &opts).unwrap();
        assert_eq!(inside.verdict, SetupVerdict::Accept);
        assert_eq!(inside.contact_error_m, Some(0.0));
        let outside = validate_setup_contacts(&t, &[fin(Point3::new(0.04, 0.05, 0.0))], &opts).unwrap();
        assert_eq!(outside.verdict, SetupVerdict::Discard);
        assert!((outside.contact_error_m.unwrap() - 0.03).abs() < 1e-12);
    }

    #[test]
    fn level_one_perfect_trial() {
        let t = task(Level::I, 0.1);
        let row = score_trial(&t, &trial(Outcome::Success, pose(0.1, 0.0, 0.0), vec![]), &Default::default()).unwrap();
        let m = row.metrics;
        assert_eq!((m.err_pos_m, m.err_pos_pct, m.err_or_pct), (Some(0.0), Some(0.0), Some(0.0)));
        assert_eq!((m.g_euc_m, m.g_geo_m, m.g_min_m), (None, None, None));
        assert!(row.is_scored_success());
    }

    #[test]
    fn level_two_link_inside_region() {
        let t = task(Level::II, 0.1);
        let tr = trial(Outcome::Success, pose(0.0, 0.0, 0.0), vec![fin(Point3::new(0.0, 0.05, 0.0))]);
        let m = score_trial(&t, &tr, &Default::default()).unwrap().metrics;
        assert_eq!((m.g_euc_m, m.g_geo_m), (Some(0.0), Some(0.0)));
        assert!((m.g_min_m.unwrap() - 0.01).abs() < 1e-15);
        assert_eq!((m.err_pos_m, m.err_pos_pct, m.err_or_pct), (None, None, None));
    }

    #[test]
    fn level_three_is_union_of_one_and_two() {
        let reached = Pose::new(
            Vec3::new(0.09, 0.004, 0.001),
            UnitQuaternion::from_euler_angles(0.01, -0.02, 0.03),
        );
        let links = vec![fin(Point3::new(0.05, 0.05, 0.0)), fin(Point3::new(0.03, 0.02, 0.0))];
        let tr = trial(Outcome::Success, reached, links);
        let opts = ScoringOptions::default();
        let one = score_trial(&task(Level::I, 0.1), &tr, &opts).unwrap().metrics;
        let two = score_trial(&task(Level::II, 0.1), &tr, &opts).unwrap().metrics;
        let three = score_trial(&task(Level::III, 0.1), &tr, &opts).unwrap().metrics;
        assert_eq!(
            three,
            TrialMetrics {
                err_pos_m: one.err_pos_m,
                err_pos_pct: one.err_pos_pct,
                err_or_pct: one.err_or_pct,
                g_euc_m: two.g_euc_m,
                g_geo_m: two.g_geo_m,
                g_min_m: two.g_min_m,
            }
        );
        assert!((three.g_euc_m.unwrap() - 0.04).abs() < 1e-12);
    }

    #[test]
    fn contact_levels_need_links() {
        let t = task(Level::III, 0.1);
        let tr = trial(Outcome::Success, pose(0.1, 0.0, 0.0), vec![]);
        assert!(matches!(
            score_trial(&t, &tr, &Default::default()),
            Err(ProtocolError::MissingLinkPlacements { trial_index: 1, level: Level::III })
        ));
        let row = Scorer::new(&t, Default::default()).unwrap().score(&tr);
        assert!(row.error.is_some());
        assert!(!row.is_scored_success());
    }

    #[test]
    fn dropped_and_discarded_trials_have_no_metrics() {
        let t = task(Level::III, 0.1);
        let links = vec![fin(Point3::new(0.05, 0.05, 0.0))];
        let dropped = score_trial(&t, &trial(Outcome::Dropped, pose(0.0, 0.0, 0.0), links.clone()), &Default::default()).unwrap();
        assert_eq!(dropped.metrics, TrialMetrics::default());
        let mut bad_setup = trial(Outcome::Success, pose(0.1, 0.0, 0.0), links);
        bad_setup.record.setup_pose = Some(pose(0.05, 0.0, 0.0));
        let row = score_trial(&t, &bad_setup, &Default::default()).unwrap();
        assert!(row.discarded());
        assert_eq!(row.metrics, TrialMetrics::default());
    }

    #[test]
    fn task_mismatch() {
        let mut tr = trial(Outcome::Success, pose(0.1, 0.0, 0.0), vec![]);
        tr.record.task_id = "other".into();
        assert!(matches!(
            score_trial(&task(Level::I, 0.1), &tr, &Default::default()),
            Err(ProtocolError::TaskMismatch { .. })
        ));
    }

    #[test]
    fn scoring_is_deterministic() {
        let t = task(Level::III, 0.1);
        let set = GraspSet {
            task_id: "plate".into(),
            trials: (1..=6)
                .map(|i| {
                    let mut tr = trial(
                        Outcome::Success,
                        pose(0.1 - 0.001 * i as f64, 0.0, 0.0),
                        vec![fin(Point3::new(0.01 * i as f64, 0.05, 0.0))],
                    );
                    tr.record.trial_index = i;
                    tr
                })
                .collect(),
        };
        let a = serde_json::to_string(&Scorer::new(&t, Default::default()).unwrap().score_set(&set)).unwrap();
        let b = serde_json::to_string(&Scorer::new(&t, Default::default()).unwrap().score_set(&set)).unwrap();
        assert_eq!(a, b);
    }

    fn scored(outcomes: &[Outcome], discarded: usize) -> ScoredGraspSet {
        let t = task(Level::I, 0.1);
        let scorer = Scorer::new(&t, Default::default()).unwrap();
        let rows = outcomes
            .iter()
            .enumerate()
            .map(|(i, &o)| {
                let mut tr = trial(o, pose(0.1, 0.0, 0.0), vec![]);
                tr.record.trial_index = i as u32 + 1;
                if i < discarded {
                    tr.record.setup_pose = Some(pose(0.05, 0.0, 0.0));
                }
                scorer.score(&tr)
            })
            .collect();
        ScoredGraspSet {
            task_id: "plate".into(),
            object: "plate".into(),
            level: Level::I,
            rows,
        }
    }

    #[test]
    fn grasp_set_compliance() {
        use Outcome::*;
        let five = check_grasp_set(&scored(&[Success; 5], 0));
        assert!(five.compliant);
        assert_eq!((five.shortfall, five.drops_pct), (0, Some(0.0)));

        let three = check_grasp_set(&scored(&[Success; 3], 0));
        assert!(!three.compliant);
        assert_eq!(three.shortfall, 2);

        let one_drop = check_grasp_set(&scored(&[Success, Success, Dropped, Success, Success], 0));
        assert!(one_drop.compliant);
        assert_eq!(one_drop.drops_pct, Some(20.0));
        assert_eq!(one_drop.dropped, 1);

        let with_discard = check_grasp_set(&scored(&[Success, Success, Success, Success, FailedOther], 1));
        assert_eq!((with_discard.discarded, with_discard.valid), (1, 4));
        assert_eq!(with_discard.failed_other, 1);
        assert!(!with_discard.compliant);
        assert_eq!(with_discard.shortfall, 1);
    }
}
