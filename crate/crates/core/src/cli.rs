//! The `ihmbench` command line.
//!
//! Exit codes: 0 success, 1 partial (some inputs invalid or a grasp set short
//! of five valid trials), 2 input error, 3 setup discarded, 4 scoring error,
//! 5 geometry error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use crate::geometry::{GeodesicMethod, GeodesicSolver, GeometryError};
use crate::mesh::{load_mesh_scaled, MeshFormat};
use crate::pose::Pose;
use crate::protocol::{load_bundle, load_task_with, load_trial, validate_setup, ProtocolError, Scorer, ScoringOptions, SetupCheck, SetupVerdict};
use crate::report::{emit_report, render_metric_table, render_summary_table, GroupBy, OutputFormat, QuantileMethod, Report, ReportSettings};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARTIAL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_DISCARD: i32 = 3;
pub const EXIT_SCORING: i32 = 4;
pub const EXIT_GEOMETRY: i32 = 5;

const AFTER_HELP: &str = concat!(
    "Task, trial and report files use schema_version 1.\n",
    "Exit codes: 0 ok, 1 partial, 2 input error, 3 setup discarded, 4 scoring error, 5 geometry error."
);

#[derive(Debug, Parser)]
#[command(name = "ihmbench", version, about = "Score in-hand manipulation benchmark trials", after_help = AFTER_HELP)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Load meshes and report degenerate faces, components, watertightness and G_min.
    #[command(after_help = AFTER_HELP)]
    ValidateMesh(ValidateMeshArgs),
    /// Check a measured initial grasp against the task (10% rule, or initial contacts for level II).
    #[command(after_help = AFTER_HELP)]
    CheckSetup(CheckSetupArgs),
    /// Score a trial bundle against its task and write reports.
    #[command(after_help = AFTER_HELP)]
    Eval(EvalArgs),
    /// Surface distance between two mesh vertices.
    #[command(after_help = AFTER_HELP)]
    Geodesic(GeodesicArgs),
}

#[derive(Debug, Args)]
pub struct ValidateMeshArgs {
    #[arg(required = true)]
    pub paths: Vec<PathBuf>,
    /// Mesh format: obj, ply, stl or auto.
    #[arg(long = "mesh-format", default_value = "auto")]
    pub mesh_format: MeshFormat,
    /// Scale from file units to meters.
    #[arg(long, default_value_t = 1.0)]
    pub units: f64,
    /// Print one JSON document instead of text.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args, Default)]
pub struct ScoringFlags {
    /// Contact extraction tolerance in meters [default: 0.002].
    #[arg(long)]
    pub contact_tolerance: Option<f64>,
    /// EDGE_DIJKSTRA or STEINER_REFINED [default: EDGE_DIJKSTRA].
    #[arg(long)]
    pub geodesic_method: Option<GeodesicMethod>,
    /// TOML file with defaults for these flags; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("setup").required(true).args(["pose", "trial"])))]
pub struct CheckSetupArgs {
    pub task: PathBuf,
    /// Measured initial hand pose: x,y,z,qw,qx,qy,qz (meters, object frame).
    #[arg(long, allow_hyphen_values = true)]
    pub pose: Option<String>,
    /// Trial file providing setup_pose and/or setup_link_placements.
    #[arg(long)]
    pub trial: Option<PathBuf>,
    #[command(flatten)]
    pub scoring: ScoringFlags,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    pub task: PathBuf,
    /// Directory of trial JSON files.
    pub bundle: PathBuf,
    #[command(flatten)]
    pub scoring: ScoringFlags,
    /// Comma-separated report formats: csv, json, svg [default: csv,json,svg].
    #[arg(long, value_delimiter = ',')]
    pub format: Option<Vec<OutputFormat>>,
    /// Output directory [default: ihmbench-report].
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Quartile convention; only `linear` is defined [default: linear].
    #[arg(long)]
    pub quantile_method: Option<QuantileMethod>,
    /// Summary grouping: method, object or task [default: method].
    #[arg(long)]
    pub group_by: Option<GroupBy>,
}

#[derive(Debug, Args)]
pub struct GeodesicArgs {
    pub mesh: PathBuf,
    pub a: usize,
    pub b: usize,
    /// EDGE_DIJKSTRA or STEINER_REFINED.
    #[arg(long, default_value = "EDGE_DIJKSTRA")]
    pub method: GeodesicMethod,
    /// Scale from file units to meters.
    #[arg(long, default_value_t = 1.0)]
    pub units: f64,
    /// Mesh format: obj, ply, stl or auto.
    #[arg(long = "mesh-format", default_value = "auto")]
    pub mesh_format: MeshFormat,
}

/// Optional run configuration file (TOML). Every key is optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub contact_tolerance: Option<f64>,
    pub geodesic_method: Option<GeodesicMethod>,
    pub format: Option<Vec<OutputFormat>>,
    pub out: Option<PathBuf>,
    pub quantile_method: Option<QuantileMethod>,
    pub group_by: Option<GroupBy>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        toml::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
    }
}

/// Effective settings after merging defaults, config file and flags.
#[derive(Debug, Clone, PartialEq)]
pub struct Resolved {
    pub options: ScoringOptions,
    pub formats: Vec<OutputFormat>,
    pub out: PathBuf,
    pub quantile_method: QuantileMethod,
    pub group_by: GroupBy,
}

fn resolve(flags: &ScoringFlags, eval: Option<&EvalArgs>) -> Result<Resolved, String> {
    let cfg = match &flags.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let contact_tolerance = flags
        .contact_tolerance
        .or(cfg.contact_tolerance)
        .unwrap_or(crate::DEFAULT_CONTACT_TOLERANCE);
    if !(contact_tolerance.is_finite() && contact_tolerance >= 0.0) {
        return Err(format!("contact tolerance must be finite and >= 0, got {contact_tolerance}"));
    }
    let formats = eval
        .and_then(|e| e.format.clone())
        .or(cfg.format)
        .unwrap_or_else(|| vec![OutputFormat::Csv, OutputFormat::Json, OutputFormat::Svg]);
    if formats.is_empty() {
        return Err("at least one report format is required".into());
    }
    Ok(Resolved {
        options: ScoringOptions {
            contact_tolerance,
            geodesic_method: flags.geodesic_method.or(cfg.geodesic_method).unwrap_or_default(),
        },
        formats,
        out: eval
            .and_then(|e| e.out.clone())
            .or(cfg.out)
            .unwrap_or_else(|| PathBuf::from("ihmbench-report")),
        quantile_method: eval.and_then(|e| e.quantile_method).or(cfg.quantile_method).unwrap_or_default(),
        group_by: eval.and_then(|e| e.group_by).or(cfg.group_by).unwrap_or_default(),
    })
}

fn protocol_exit(e: &ProtocolError) -> i32 {
    match e {
        ProtocolError::Geometry(_) => EXIT_GEOMETRY,
        _ => EXIT_INPUT,
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(err, "{text}") } else { write!(out, "{text}") };
            return code;
        }
    };
    match cli.command {
        Command::ValidateMesh(a) => cmd_validate_mesh(&a, out, err),
        Command::CheckSetup(a) => cmd_check_setup(&a, out, err),
        Command::Eval(a) => cmd_eval(&a, out, err),
        Command::Geodesic(a) => cmd_geodesic(&a, out, err),
    }
}

pub fn cmd_validate_mesh(a: &ValidateMeshArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let mut valid = 0;
    let mut parse_failures = 0;
    let mut docs = Vec::new();
    for p in &a.paths {
        match load_mesh_scaled(p, a.mesh_format, a.units) {
            Ok(mesh) => {
                let report = mesh.validate();
                let ok = report.is_valid();
                valid += usize::from(ok);
                if a.json {
                    docs.push(serde_json::json!({"path": p, "valid": ok, "report": report}));
                } else {
                    let _ = writeln!(out, "{}: {}", p.display(), if ok { "VALID" } else { "INVALID" });
                    let _ = writeln!(out, "{report}");
                }
            }
            Err(e) => {
                parse_failures += 1;
                if a.json {
                    docs.push(serde_json::json!({"path": p, "valid": false, "error": e.to_string()}));
                } else {
                    let _ = writeln!(out, "{}: ERROR", p.display());
                }
                let _ = writeln!(err, "error: {e}");
            }
        }
    }
    if a.json {
        let _ = writeln!(out, "{}", serde_json::to_string_pretty(&docs).unwrap_or_default());
    }
    if valid == a.paths.len() {
        EXIT_OK
    } else if valid == 0 && parse_failures == a.paths.len() {
        EXIT_INPUT
    } else {
        EXIT_PARTIAL
    }
}

fn print_setup(out: &mut dyn Write, c: &SetupCheck) -> i32 {
    let verdict = match c.verdict {
        SetupVerdict::Accept => "ACCEPT",
        SetupVerdict::Discard => "DISCARD",
    };
    let mut parts = Vec::new();
    if let Some(p) = c.position_error_pct {
        parts.push(format!("position {p:.3}%"));
    }
    if let Some(o) = c.orientation_error_pct {
        parts.push(format!("orientation {o:.3}%"));
    }
    if let Some(d) = c.contact_error_m {
        parts.push(format!("initial contact error {:.3} cm", 100.0 * d));
    }
    let _ = writeln!(out, "{verdict} {}", parts.join(" "));
    match c.verdict {
        SetupVerdict::Accept => EXIT_OK,
        SetupVerdict::Discard => EXIT_DISCARD,
    }
}

fn parse_pose(s: &str) -> Result<Pose, String> {
    let values = s
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<f64>().map_err(|e| format!("bad pose component `{t}`: {e}")))
        .collect::<Result<Vec<_>, _>>()?;
    Pose::from_slice(&values).map_err(|e| e.to_string())
}

pub fn cmd_check_setup(a: &CheckSetupArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let settings = match resolve(&a.scoring, None) {
        Ok(s) => s,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_INPUT;
        }
    };
    let task = match load_task_with(&a.task, settings.options.contact_tolerance) {
        Ok(t) => t,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_INPUT;
        }
    };
    for w in &task.warnings {
        let _ = writeln!(err, "warning: {w}");
    }
    let result = if let Some(p) = &a.pose {
        match parse_pose(p) {
            Ok(pose) => validate_setup(&task, &pose).map(Some),
            Err(e) => {
                let _ = writeln!(err, "error: --pose: {e}");
                return EXIT_INPUT;
            }
        }
    } else {
        let trial = match load_trial(a.trial.as_ref().expect("clap enforces --pose or --trial")) {
            Ok(t) => t,
            Err(e) => {
                let _ = writeln!(err, "error: {e}");
                return EXIT_INPUT;
            }
        };
        Scorer::new(&task, settings.options).and_then(|s| s.check_setup(&trial))
    };
    match result {
        Ok(Some(check)) => print_setup(out, &check),
        Ok(None) => {
            let _ = writeln!(
                err,
                "error: nothing to check; level {} setup needs initial_region in the task and setup_link_placements in the trial",
                task.level()
            );
            EXIT_INPUT
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            protocol_exit(&e)
        }
    }
}

pub fn cmd_eval(a: &EvalArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let settings = match resolve(&a.scoring, Some(a)) {
        Ok(s) => s,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_INPUT;
        }
    };
    let loaded = load_task_with(&a.task, settings.options.contact_tolerance).and_then(|t| Ok((t, load_bundle(&a.bundle)?)));
    let (task, set) = match loaded {
        Ok(v) => v,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_INPUT;
        }
    };
    for w in &task.warnings {
        let _ = writeln!(err, "warning: {w}");
    }
    if set.task_id != task.task_id() {
        let _ = writeln!(
            err,
            "error: bundle {} holds trials for task `{}`, not `{}`",
            a.bundle.display(),
            set.task_id,
            task.task_id()
        );
        return EXIT_INPUT;
    }
    let scorer = match Scorer::new(&task, settings.options) {
        Ok(s) => s,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return protocol_exit(&e);
        }
    };
    let scored = scorer.score_set(&set);
    let report = Report::build(
        std::slice::from_ref(&scored),
        &ReportSettings {
            contact_tolerance_m: settings.options.contact_tolerance,
            geodesic_method: settings.options.geodesic_method,
            quantile_method: settings.quantile_method,
            group_by: settings.group_by,
        },
    );

    let _ = write!(out, "{}", render_summary_table(&report.summary));
    if report.summary.iter().any(|r| r.g_euc_cm.is_some()) {
        let _ = writeln!(out);
        let _ = write!(out, "{}", render_metric_table(&report.summary));
    }
    for c in &report.compliance {
        let _ = writeln!(
            out,
            "\ngrasp set {}: {} recorded, {} discarded at setup, {} valid, {} dropped, {} failed, drops {}%{}",
            c.task_id,
            c.recorded,
            c.discarded,
            c.valid,
            c.dropped,
            c.failed_other,
            c.drops_pct.map_or("-".into(), |d| format!("{d:.1}")),
            if c.compliant { String::new() } else { format!(" (NON-COMPLIANT: {} short of 5)", c.shortfall) }
        );
    }
    for w in &report.warnings {
        let _ = writeln!(err, "warning: {w}");
    }
    let failed: Vec<_> = scored.scoring_errors().collect();
    for r in &failed {
        let _ = writeln!(err, "error: trial {}: {}", r.trial_index, r.error.as_deref().unwrap_or(""));
    }

    match emit_report(&report, &settings.formats, &settings.out) {
        Ok(files) => {
            for f in files {
                let _ = writeln!(err, "wrote {}", f.display());
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_INPUT;
        }
    }
    if !failed.is_empty() {
        EXIT_SCORING
    } else if report.compliance.iter().any(|c| !c.compliant) {
        EXIT_PARTIAL
    } else {
        EXIT_OK
    }
}

pub fn cmd_geodesic(a: &GeodesicArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let mesh = match load_mesh_scaled(&a.mesh, a.mesh_format, a.units) {
        Ok(m) => m,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_INPUT;
        }
    };
    let solver = GeodesicSolver::new(&mesh, a.method);
    match solver.distance(a.a, a.b) {
        Ok(d) => {
            let _ = writeln!(out, "{} m ({} cm) [{}]", d, 100.0 * d, a.method);
            EXIT_OK
        }
        Err(e @ GeometryError::VertexOutOfRange { .. }) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INPUT
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_GEOMETRY
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flags(tol: Option<f64>, config: Option<PathBuf>) -> ScoringFlags {
        ScoringFlags {
            contact_tolerance: tol,
            geodesic_method: None,
            config,
        }
    }

    #[test]
    fn flags_override_config_file() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("run.toml");
        std::fs::write(
            &cfg,
            "contact_tolerance = 0.004\ngeodesic_method = \"STEINER_REFINED\"\nformat = [\"json\"]\ngroup_by = \"object\"\n",
        )
        .unwrap();
        let from_file = resolve(&flags(None, Some(cfg.clone())), None).unwrap();
        assert_eq!(from_file.options.contact_tolerance, 0.004);
        assert_eq!(from_file.options.geodesic_method, GeodesicMethod::SteinerRefined);
        let overridden = resolve(&flags(Some(0.001), Some(cfg)), None).unwrap();
        assert_eq!(overridden.options.contact_tolerance, 0.001);
        assert_eq!(overridden.options.geodesic_method, GeodesicMethod::SteinerRefined);
        let defaults = resolve(&flags(None, None), None).unwrap();
        assert_eq!(defaults.options, ScoringOptions::default());
        assert_eq!(defaults.formats.len(), 3);
        assert!(resolve(&flags(Some(-1.0), None), None).is_err());
    }

    #[test]
    fn rejects_unknown_config_keys() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("run.toml");
        std::fs::write(&cfg, "tolerance = 1\n").unwrap();
        assert!(resolve(&flags(None, Some(cfg)), None).is_err());
    }

    #[test]
    fn pose_argument() {
        let p = parse_pose("0.1, 0, -0.2, 1, 0, 0, 0").unwrap();
        assert_eq!(p.position.z, -0.2);
        assert!(parse_pose("1,2,3").is_err());
        assert!(parse_pose("a,0,0,1,0,0,0").is_err());
    }

    #[test]
    fn help_mentions_schema_version() {
        for sub in ["validate-mesh", "check-setup", "eval", "geodesic"] {
            let mut out = Vec::new();
            let code = run(["ihmbench", sub, "--help"], &mut out, &mut Vec::new());
            assert_eq!(code, EXIT_OK);
            let text = String::from_utf8(out).unwrap();
            assert!(text.contains("schema_version 1"), "{sub}: {text}");
        }
        let mut out = Vec::new();
        run(["ihmbench", "eval", "--help"], &mut out, &mut Vec::new());
        let text = String::from_utf8(out).unwrap();
        for flag in ["--contact-tolerance", "--geodesic-method", "--format", "--out", "--quantile-method", "--config"] {
            assert!(text.contains(flag), "{flag}");
        }
    }

    #[test]
    fn usage_errors_are_input_errors() {
        let code = run(["ihmbench", "eval"], &mut Vec::new(), &mut Vec::new());
        assert_eq!(code, EXIT_INPUT);
        let code = run(["ihmbench", "eval", "t", "b", "--quantile-method", "type6"], &mut Vec::new(), &mut Vec::new());
        assert_eq!(code, EXIT_INPUT);
    }
}
