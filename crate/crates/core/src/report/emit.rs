use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::summary::{compliance, geodesic_violations, group_stats, summarize, GroupBy, GroupStats, Metric, SummaryRow};
use super::svg::render_box_plot;
use super::{QuantileMethod, ReportError};
use crate::geometry::GeodesicMethod;
use crate::protocol::{ComplianceReport, ScoredGraspSet, TrialScore};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
    Svg,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            "svg" => Ok(OutputFormat::Svg),
            other => Err(format!("unknown report format `{other}` (csv, json, svg)")),
        }
    }
}

impl std::fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
            OutputFormat::Svg => "svg",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReportSettings {
    pub contact_tolerance_m: f64,
    pub geodesic_method: GeodesicMethod,
    pub quantile_method: QuantileMethod,
    pub group_by: GroupBy,
}

impl Default for ReportSettings {
    fn default() -> Self {
        Self {
            contact_tolerance_m: crate::DEFAULT_CONTACT_TOLERANCE,
            geodesic_method: GeodesicMethod::EdgeDijkstra,
            quantile_method: QuantileMethod::Linear,
            group_by: GroupBy::Method,
        }
    }
}

/// A modelling assumption the numbers depend on.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assumption {
    pub id: String,
    pub text: String,
}

fn assumptions() -> Vec<Assumption> {
    vec![
        Assumption {
            id: "setup_position_denominator".into(),
            text: "setup position error is 100*||s_i - s_i_measured|| / ||s_d - s_i||".into(),
        },
        Assumption {
            id: "medians_exclude_unsuccessful".into(),
            text: "medians use SUCCESS trials that passed the setup gate and scored without error; \
                   the excluded count is reported per row"
                .into(),
        },
        Assumption {
            id: "drops_denominator".into(),
            text: "drops_pct = 100 * DROPPED / trials that passed the setup gate".into(),
        },
    ]
}

/// Everything a run produced; serialized as `report.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub toolkit_version: String,
    pub quartile_method: QuantileMethod,
    pub contact_tolerance_m: f64,
    pub geodesic_method: GeodesicMethod,
    pub group_by: GroupBy,
    pub length_unit: String,
    pub time_unit: String,
    pub assumptions: Vec<Assumption>,
    pub warnings: Vec<String>,
    pub summary: Vec<SummaryRow>,
    pub box_stats: GroupStats,
    pub compliance: Vec<ComplianceReport>,
    /// Per-trial rows; lengths in meters.
    pub trials: Vec<TrialScore>,
}

impl Report {
    pub fn build(sets: &[ScoredGraspSet], settings: &ReportSettings) -> Self {
        let summary = summarize(sets, settings.group_by);
        let mut warnings = geodesic_violations(&summary);
        for c in compliance(sets) {
            if !c.compliant {
                warnings.push(format!(
                    "task {}: {} valid trials, {} short of a full grasp set",
                    c.task_id, c.valid, c.shortfall
                ));
            }
        }
        Report {
            schema_version: crate::SCHEMA_VERSION,
            toolkit_version: crate::TOOLKIT_VERSION.to_string(),
            quartile_method: settings.quantile_method,
            contact_tolerance_m: settings.contact_tolerance_m,
            geodesic_method: settings.geodesic_method,
            group_by: settings.group_by,
            length_unit: "cm".into(),
            time_unit: "s".into(),
            assumptions: assumptions(),
            warnings,
            box_stats: group_stats(sets, settings.group_by),
            compliance: compliance(sets),
            trials: sets.iter().flat_map(|s| s.rows.iter().cloned()).collect(),
            summary,
        }
    }
}

/// Summary CSV row; empty cells are absent metrics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvSummaryRow {
    pub label: String,
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
}

impl From<&SummaryRow> for CsvSummaryRow {
    fn from(r: &SummaryRow) -> Self {
        CsvSummaryRow {
            label: r.label.clone(),
            drops_pct: r.drops_pct,
            err_pos_cm: r.err_pos_cm,
            err_pos_pct: r.err_pos_pct,
            err_or_pct: r.err_or_pct,
            g_euc_cm: r.g_euc_cm,
            g_geo_cm: r.g_geo_cm,
            g_min_cm: r.g_min_cm,
            offline_s: r.offline_s,
            plan_s: r.plan_s,
            exec_s: r.exec_s,
        }
    }
}

fn csv_error(e: impl std::fmt::Display) -> ReportError {
    ReportError::Format(format!("csv: {e}"))
}

fn finish_csv(w: csv::Writer<Vec<u8>>) -> Result<String, ReportError> {
    let bytes = w.into_inner().map_err(csv_error)?;
    String::from_utf8(bytes).map_err(csv_error)
}

pub fn summary_csv(rows: &[SummaryRow]) -> Result<String, ReportError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    if rows.is_empty() {
        w.write_record([
            "label", "drops_pct", "err_pos_cm", "err_pos_pct", "err_or_pct", "g_euc_cm", "g_geo_cm", "g_min_cm",
            "offline_s", "plan_s", "exec_s",
        ])
        .map_err(csv_error)?;
    }
    for r in rows {
        w.serialize(CsvSummaryRow::from(r)).map_err(csv_error)?;
    }
    finish_csv(w)
}

pub fn read_summary_csv(text: &str) -> Result<Vec<CsvSummaryRow>, ReportError> {
    csv::Reader::from_reader(text.as_bytes())
        .deserialize()
        .collect::<Result<_, _>>()
        .map_err(csv_error)
}

#[derive(Serialize)]
struct CsvTrialRow<'a> {
    task_id: &'a str,
    object: &'a str,
    method: &'a str,
    trial_index: u32,
    outcome: crate::protocol::Outcome,
    setup: Option<crate::protocol::SetupVerdict>,
    setup_pos_pct: Option<f64>,
    setup_or_pct: Option<f64>,
    setup_contact_cm: Option<f64>,
    err_pos_cm: Option<f64>,
    err_pos_pct: Option<f64>,
    err_or_pct: Option<f64>,
    g_euc_cm: Option<f64>,
    g_geo_cm: Option<f64>,
    g_min_cm: Option<f64>,
    offline_s: Option<f64>,
    plan_s: f64,
    exec_s: f64,
    stability_attested: bool,
    error: &'a str,
}

/// One line per trial, metrics in report units.
pub fn trials_csv(trials: &[TrialScore]) -> Result<String, ReportError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for t in trials {
        w.serialize(CsvTrialRow {
            task_id: &t.task_id,
            object: &t.object,
            method: t.method_label(),
            trial_index: t.trial_index,
            outcome: t.outcome,
            setup: t.setup.map(|s| s.verdict),
            setup_pos_pct: t.setup.and_then(|s| s.position_error_pct),
            setup_or_pct: t.setup.and_then(|s| s.orientation_error_pct),
            setup_contact_cm: t.setup.and_then(|s| s.contact_error_m).map(|m| 100.0 * m),
            err_pos_cm: Metric::ErrPosCm.value(t),
            err_pos_pct: Metric::ErrPosPct.value(t),
            err_or_pct: Metric::ErrOrPct.value(t),
            g_euc_cm: Metric::GEucCm.value(t),
            g_geo_cm: Metric::GGeoCm.value(t),
            g_min_cm: Metric::GMinCm.value(t),
            offline_s: t.offline_time_s,
            plan_s: t.planning_time_s,
            exec_s: t.execution_time_s,
            stability_attested: t.stability_attested,
            error: t.error.as_deref().unwrap_or(""),
        })
        .map_err(csv_error)?;
    }
    finish_csv(w)
}

fn write(path: PathBuf, contents: &str, written: &mut Vec<PathBuf>) -> Result<(), ReportError> {
    std::fs::write(&path, contents).map_err(|source| ReportError::Io { path: path.clone(), source })?;
    written.push(path);
    Ok(())
}

/// Writes the requested formats into `out_dir` and returns the files written.
///
/// `summary.csv` and `trials.csv` for CSV, `report.json` for JSON and one
/// `boxplot_<metric>.svg` per metric with data for SVG.
pub fn emit_report(report: &Report, formats: &[OutputFormat], out_dir: &Path) -> Result<Vec<PathBuf>, ReportError> {
    if report.summary.is_empty() {
        return Err(ReportError::Io {
            path: out_dir.to_path_buf(),
            source: std::io::Error::new(
                std::io::ErrorKind::InvalidInput,
                "report has no rows (no trials were scored); nothing written",
            ),
        });
    }
    let mut formats = formats.to_vec();
    formats.sort();
    formats.dedup();
    std::fs::create_dir_all(out_dir).map_err(|source| ReportError::Io {
        path: out_dir.to_path_buf(),
        source,
    })?;
    let mut written = Vec::new();
    for f in formats {
        match f {
            OutputFormat::Csv => {
                write(out_dir.join("summary.csv"), &summary_csv(&report.summary)?, &mut written)?;
                write(out_dir.join("trials.csv"), &trials_csv(&report.trials)?, &mut written)?;
            }
            OutputFormat::Json => {
                let mut json = serde_json::to_string_pretty(report).map_err(|e| ReportError::Format(e.to_string()))?;
                json.push('\n');
                write(out_dir.join("report.json"), &json, &mut written)?;
            }
            OutputFormat::Svg => {
                for m in Metric::ALL {
                    let groups: Vec<_> = report
                        .summary
                        .iter()
                        .filter_map(|r| {
                            let b = report.box_stats.get(&r.label)?.get(m.key())?;
                            Some((r.label.as_str(), b))
                        })
                        .collect();
                    if groups.is_empty() {
                        continue;
                    }
                    let (svg, _) = render_box_plot(m.title(), &groups);
                    write(out_dir.join(format!("boxplot_{}.svg", m.key())), &svg, &mut written)?;
                }
            }
        }
    }
    Ok(written)
}

fn fmt_num(v: f64) -> String {
    if v != 0.0 && v.abs() < 1e-2 {
        format!("{v:.2e}")
    } else {
        format!("{v:.3}")
    }
}

fn table(header: Vec<String>, body: Vec<Vec<String>>) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in &body {
        for (w, c) in widths.iter_mut().zip(row) {
            *w = (*w).max(c.chars().count());
        }
    }
    let mut out = String::new();
    let line = |cells: &[String], out: &mut String| {
        let padded: Vec<String> = cells
            .iter()
            .zip(&widths)
            .enumerate()
            .map(|(i, (c, w))| if i == 0 { format!("{c:<w$}") } else { format!("{c:>w$}") })
            .collect();
        let _ = writeln!(out, "{}", padded.join("  ").trim_end());
    };
    line(&header, &mut out);
    let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
    line(&rule, &mut out);
    for row in &body {
        line(row, &mut out);
    }
    out
}

fn cell(r: &SummaryRow, column: &str, v: Option<f64>) -> String {
    match v {
        None => "-".into(),
        Some(v) if r.is_best(column) => format!("{}*", fmt_num(v)),
        Some(v) => fmt_num(v),
    }
}

/// One row per group, columns with data only; `*` marks the best value.
pub fn render_summary_table(rows: &[SummaryRow]) -> String {
    let metrics: Vec<Metric> = Metric::ALL
        .into_iter()
        .filter(|m| rows.iter().any(|r| r.metric(*m).is_some()))
        .collect();
    let mut header = vec!["label".to_string(), "n".into(), "drops_pct".into()];
    header.extend(metrics.iter().map(|m| m.key().to_string()));
    let body = rows
        .iter()
        .map(|r| {
            let mut cells = vec![r.label.clone(), r.attempted.to_string(), cell(r, "drops_pct", r.drops_pct)];
            cells.extend(metrics.iter().map(|m| cell(r, m.key(), r.metric(*m))));
            cells
        })
        .collect();
    table(header, body)
}

/// Metrics as rows and groups as columns.
pub fn render_metric_table(rows: &[SummaryRow]) -> String {
    let mut header = vec!["metric".to_string()];
    header.extend(rows.iter().map(|r| r.label.clone()));
    let body = Metric::ALL
        .into_iter()
        .filter(|m| rows.iter().any(|r| r.metric(*m).is_some()))
        .map(|m| {
            let mut cells = vec![m.key().to_string()];
            cells.extend(rows.iter().map(|r| r.metric(m).map_or("-".into(), fmt_num)));
            cells
        })
        .collect();
    table(header, body)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::{Level, Outcome, TrialMetrics};

    fn sets() -> Vec<ScoredGraspSet> {
        let mk = |method: &str, i: u32, outcome, e: f64| TrialScore {
            task_id: "cracker".into(),
            object: "cracker box".into(),
            method: Some(method.into()),
            level: Level::III,
            trial_index: i,
            outcome,
            cause: String::new(),
            stability_attested: true,
            setup: None,
            metrics: if outcome == Outcome::Success {
                TrialMetrics {
                    err_pos_m: Some(e / 100.0),
                    err_pos_pct: Some(e * 17.3),
                    err_or_pct: Some(e / 7.0),
                    g_euc_m: Some(0.003 * e),
                    g_geo_m: Some(0.0031 * e),
                    g_min_m: Some(0.00057),
                }
            } else {
                TrialMetrics::default()
            },
            planning_time_s: 0.1 * i as f64,
            offline_time_s: Some(15.467),
            execution_time_s: 2.0,
            error: None,
        };
        vec![ScoredGraspSet {
            task_id: "cracker".into(),
            object: "cracker box".into(),
            level: Level::III,
            rows: vec![
                mk("a", 1, Outcome::Success, 1.1),
                mk("a", 2, Outcome::Success, 1.7),
                mk("b", 3, Outcome::Dropped, 0.0),
                mk("b", 4, Outcome::Success, 0.9),
                mk("a", 5, Outcome::Success, 1.3),
            ],
        }]
    }

    #[test]
    fn csv_header_is_exact_and_absent_cells_are_empty() {
        let mut rows = summarize(&sets(), GroupBy::Method);
        rows[1].g_euc_cm = None;
        let text = summary_csv(&rows).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "label,drops_pct,err_pos_cm,err_pos_pct,err_or_pct,g_euc_cm,g_geo_cm,g_min_cm,offline_s,plan_s,exec_s"
        );
        let b = lines.nth(1).unwrap();
        assert!(b.starts_with("b,50.0,"), "{b}");
        assert_eq!(b.split(',').nth(5), Some(""));
    }

    #[test]
    fn json_csv_json_round_trip() {
        let report = Report::build(&sets(), &ReportSettings::default());
        let json = serde_json::to_string(&report).unwrap();
        let back: Report = serde_json::from_str(&json).unwrap();
        assert_eq!(back, report);
        let csv_rows = read_summary_csv(&summary_csv(&back.summary).unwrap()).unwrap();
        assert_eq!(csv_rows.len(), report.summary.len());
        let sig9 = |x: f64| format!("{x:.8e}");
        for (c, r) in csv_rows.iter().zip(&report.summary) {
            assert_eq!(c.label, r.label);
            let pairs = [(c.drops_pct, r.drops_pct)]
                .into_iter()
                .chain(Metric::ALL.into_iter().map(|m| (CsvSummaryRow::from(r).metric(m), r.metric(m))))
                .chain(Metric::ALL.into_iter().map(|m| (c.metric(m), r.metric(m))));
            for (a, b) in pairs {
                assert_eq!(a.map(sig9), b.map(sig9));
            }
        }
    }

    impl CsvSummaryRow {
        fn metric(&self, m: Metric) -> Option<f64> {
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
    }

    #[test]
    fn report_metadata() {
        let report = Report::build(&sets(), &ReportSettings::default());
        let v: serde_json::Value = serde_json::to_value(&report).unwrap();
        assert_eq!(v["quartile_method"], "linear");
        assert_eq!(v["geodesic_method"], "EDGE_DIJKSTRA");
        assert_eq!(v["contact_tolerance_m"], 0.002);
        assert_eq!(v["toolkit_version"], crate::TOOLKIT_VERSION);
        assert!(v["box_stats"]["a"]["err_pos_cm"]["median"].is_number());
        assert!(report.assumptions.iter().any(|a| a.id == "setup_position_denominator"));
    }

    #[test]
    fn emits_all_formats_deterministically() {
        let report = Report::build(&sets(), &ReportSettings::default());
        let d1 = tempfile::tempdir().unwrap();
        let d2 = tempfile::tempdir().unwrap();
        let all = [OutputFormat::Svg, OutputFormat::Json, OutputFormat::Csv];
        let f1 = emit_report(&report, &all, d1.path()).unwrap();
        let f2 = emit_report(&report, &all, d2.path()).unwrap();
        assert_eq!(f1.len(), f2.len());
        assert!(f1.iter().any(|p| p.ends_with("boxplot_g_geo_cm.svg")));
        for (a, b) in f1.iter().zip(&f2) {
            assert_eq!(std::fs::read(a).unwrap(), std::fs::read(b).unwrap(), "{}", a.display());
        }
    }

    #[test]
    fn empty_report_writes_nothing() {
        let report = Report::build(&[], &ReportSettings::default());
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("out");
        let err = emit_report(&report, &[OutputFormat::Csv], &out).unwrap_err();
        assert!(matches!(err, ReportError::Io { .. }));
        assert!(err.to_string().contains("nothing written"));
        assert!(!out.exists());
    }

    #[test]
    fn tables_mark_best_values() {
        let rows = summarize(&sets(), GroupBy::Method);
        let t = render_summary_table(&rows);
        assert!(t.lines().next().unwrap().starts_with("label"));
        assert!(t.contains("0.000*"), "{t}");
        let m = render_metric_table(&summarize(&sets(), GroupBy::Object));
        assert!(m.contains("cracker box") && m.contains("g_min_cm"));
    }
}
