use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::stats::{box_stats, BoxStats};
use crate::protocol::{check_grasp_set, ScoredGraspSet, TrialScore};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupBy {
    #[default]
    Method,
    Object,
    Task,
}

impl fmt::Display for GroupBy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GroupBy::Method => "method",
            GroupBy::Object => "object",
            GroupBy::Task => "task",
        })
    }
}

impl FromStr for GroupBy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "method" => Ok(GroupBy::Method),
            "object" => Ok(GroupBy::Object),
            "task" => Ok(GroupBy::Task),
            other => Err(format!("unknown grouping `{other}` (method, object, task)")),
        }
    }
}

impl GroupBy {
    pub fn label(self, row: &TrialScore) -> &str {
        match self {
            GroupBy::Method => row.method_label(),
            GroupBy::Object => &row.object,
            GroupBy::Task => &row.task_id,
        }
    }
}

/// Reported per-trial quantities, in report units (cm, %, s).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    ErrPosCm,
    ErrPosPct,
    ErrOrPct,
    GEucCm,
    GGeoCm,
    GMinCm,
    OfflineS,
    PlanS,
    ExecS,
}

impl Metric {
    pub const ALL: [Metric; 9] = [
        Metric::ErrPosCm,
        Metric::ErrPosPct,
        Metric::ErrOrPct,
        Metric::GEucCm,
        Metric::GGeoCm,
        Metric::GMinCm,
        Metric::OfflineS,
        Metric::PlanS,
        Metric::ExecS,
    ];

    /// Column name in CSV output and JSON keys.
    pub fn key(self) -> &'static str {
        match self {
            Metric::ErrPosCm => "err_pos_cm",
            Metric::ErrPosPct => "err_pos_pct",
            Metric::ErrOrPct => "err_or_pct",
            Metric::GEucCm => "g_euc_cm",
            Metric::GGeoCm => "g_geo_cm",
            Metric::GMinCm => "g_min_cm",
            Metric::OfflineS => "offline_s",
            Metric::PlanS => "plan_s",
            Metric::ExecS => "exec_s",
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            Metric::ErrPosCm => "position error (cm)",
            Metric::ErrPosPct => "position error (%)",
            Metric::ErrOrPct => "orientation error (%)",
            Metric::GEucCm => "G_euc (cm)",
            Metric::GGeoCm => "G_geo (cm)",
            Metric::GMinCm => "G_min (cm)",
            Metric::OfflineS => "offline time (s)",
            Metric::PlanS => "planning time (s)",
            Metric::ExecS => "execution time (s)",
        }
    }

    /// Whether the best (lowest) value of the column is flagged.
    pub fn ranked(self) -> bool {
        matches!(
            self,
            Metric::ErrPosCm | Metric::ErrPosPct | Metric::ErrOrPct | Metric::GEucCm | Metric::GGeoCm
        )
    }

    pub fn value(self, row: &TrialScore) -> Option<f64> {
        let m = &row.metrics;
        let cm = |v: Option<f64>| v.map(|x| 100.0 * x);
        match self {
            Metric::ErrPosCm => cm(m.err_pos_m),
            Metric::ErrPosPct => m.err_pos_pct,
            Metric::ErrOrPct => m.err_or_pct,
            Metric::GEucCm => cm(m.g_euc_m),
            Metric::GGeoCm => cm(m.g_geo_m),
            Metric::GMinCm => cm(m.g_min_m),
            Metric::OfflineS => row.offline_time_s,
            Metric::PlanS => Some(row.planning_time_s),
            Metric::ExecS => Some(row.execution_time_s),
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

/// One line of the summary table. Medians are over successful, accepted,
/// error-free trials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub label: String,
    pub recorded: usize,
    pub discarded: usize,
    /// Non-discarded trials.
    pub attempted: usize,
    pub dropped: usize,
    pub failed_other: usize,
    pub scoring_errors: usize,
    /// Attempted trials left out of the medians.
    pub excluded_from_medians: usize,
    pub drops_pct: Option<f64>,
    pub err_pos_cm: Option<f64>,
    pub err_pos_pct: Option<f64>,
    pub err_or_pct: Option<f64>,
    pub g_euc_cm: Option<f64>,
    pub g_geo_cm: Option<f64>,
    pub g_min_cm: Option<f64>,
    pub offline_s: Option<f64>,
    pub plan_s: Option<f64>,
    pub exec_s: Option<f64>,
    /// Columns where this row holds the lowest value (ties all flagged).
    pub best: Vec<String>,
}

impl SummaryRow {
    pub fn metric(&self, m: Metric) -> Option<f64> {
        match m {
            Metric::ErrPosCm => self.err_pos_cm,
            Metric::ErrPosPct => self.err_pos_pct,
            Metric::ErrOrPct => self.err_or_pct,
            Metric::GEucCm => self.g_euc_cm,
            Metric::GGeoCm => self.g_geo_cm,
            Metric::GMinCm => self.g_min_cm,
            Metric::OfflineS => self.offline_s,
            Metric::PlanS => self.plan_s,
            Metric::ExecS => self.exec_s,
        }
    }

    fn set_metric(&mut self, m: Metric, v: Option<f64>) {
        let slot = match m {
            Metric::ErrPosCm => &mut self.err_pos_cm,
            Metric::ErrPosPct => &mut self.err_pos_pct,
            Metric::ErrOrPct => &mut self.err_or_pct,
            Metric::GEucCm => &mut self.g_euc_cm,
            Metric::GGeoCm => &mut self.g_geo_cm,
            Metric::GMinCm => &mut self.g_min_cm,
            Metric::OfflineS => &mut self.offline_s,
            Metric::PlanS => &mut self.plan_s,
            Metric::ExecS => &mut self.exec_s,
        };
        *slot = v;
    }

    pub fn is_best(&self, column: &str) -> bool {
        self.best.iter().any(|c| c == column)
    }
}

/// Box statistics keyed by group label, then metric key.
pub type GroupStats = BTreeMap<String, BTreeMap<String, BoxStats>>;

fn groups(sets: &[ScoredGraspSet], group_by: GroupBy) -> Vec<(String, Vec<&TrialScore>)> {
    let mut out: Vec<(String, Vec<&TrialScore>)> = Vec::new();
    for row in sets.iter().flat_map(|s| &s.rows) {
        let label = group_by.label(row);
        match out.iter_mut().find(|(l, _)| l == label) {
            Some((_, rows)) => rows.push(row),
            None => out.push((label.to_string(), vec![row])),
        }
    }
    out
}

fn metric_stats(rows: &[&TrialScore]) -> BTreeMap<String, BoxStats> {
    let mut out = BTreeMap::new();
    for m in Metric::ALL {
        let xs: Vec<f64> = rows
            .iter()
            .filter(|r| r.is_scored_success())
            .filter_map(|r| m.value(r))
            .collect();
        if let Ok(b) = box_stats(&xs) {
            out.insert(m.key().to_string(), b);
        }
    }
    out
}

/// Box statistics per group and metric over successful trials.
pub fn group_stats(sets: &[ScoredGraspSet], group_by: GroupBy) -> GroupStats {
    groups(sets, group_by)
        .into_iter()
        .map(|(label, rows)| (label, metric_stats(&rows)))
        .collect()
}

/// One row per group, in order of first appearance.
pub fn summarize(sets: &[ScoredGraspSet], group_by: GroupBy) -> Vec<SummaryRow> {
    let mut rows: Vec<SummaryRow> = groups(sets, group_by)
        .into_iter()
        .map(|(label, trials)| {
            let recorded = trials.len();
            let valid: Vec<_> = trials.iter().filter(|r| !r.discarded()).collect();
            let count = |o| valid.iter().filter(|r| r.outcome == o).count();
            let dropped = count(crate::protocol::Outcome::Dropped);
            let successes = valid.iter().filter(|r| r.is_scored_success()).count();
            let stats = metric_stats(&trials);
            let mut row = SummaryRow {
                label,
                recorded,
                discarded: recorded - valid.len(),
                attempted: valid.len(),
                dropped,
                failed_other: count(crate::protocol::Outcome::FailedOther),
                scoring_errors: valid.iter().filter(|r| r.error.is_some()).count(),
                excluded_from_medians: valid.len() - successes,
                drops_pct: (!valid.is_empty()).then(|| 100.0 * dropped as f64 / valid.len() as f64),
                err_pos_cm: None,
                err_pos_pct: None,
                err_or_pct: None,
                g_euc_cm: None,
                g_geo_cm: None,
                g_min_cm: None,
                offline_s: None,
                plan_s: None,
                exec_s: None,
                best: Vec::new(),
            };
            for m in Metric::ALL {
                row.set_metric(m, stats.get(m.key()).map(|b| b.median));
            }
            row
        })
        .collect();
    flag_best(&mut rows);
    rows
}

fn flag_best(rows: &mut [SummaryRow]) {
    type Column = (&'static str, Box<dyn Fn(&SummaryRow) -> Option<f64>>);
    let mut columns: Vec<Column> = vec![("drops_pct", Box::new(|r: &SummaryRow| r.drops_pct))];
    for m in Metric::ALL.into_iter().filter(|m| m.ranked()) {
        columns.push((m.key(), Box::new(move |r: &SummaryRow| r.metric(m))));
    }
    for (name, get) in &columns {
        let best = rows.iter().filter_map(get).min_by(f64::total_cmp);
        if let Some(best) = best {
            for r in rows.iter_mut() {
                if get(r) == Some(best) {
                    r.best.push(name.to_string());
                }
            }
        }
    }
}

/// Rows whose geodesic median falls below the Euclidean one. A surface path is
/// never shorter than the straight line, so any hit points at bad input.
pub fn geodesic_violations(rows: &[SummaryRow]) -> Vec<String> {
    rows.iter()
        .filter_map(|r| match (r.g_euc_cm, r.g_geo_cm) {
            (Some(e), Some(g)) if g < e * (1.0 - 1e-12) => Some(format!(
                "{}: G_geo {g} cm is below G_euc {e} cm",
                r.label
            )),
            _ => None,
        })
        .collect()
}

/// Compliance per grasp set, in input order.
pub fn compliance(sets: &[ScoredGraspSet]) -> Vec<crate::protocol::ComplianceReport> {
    sets.iter().map(check_grasp_set).collect()
}
