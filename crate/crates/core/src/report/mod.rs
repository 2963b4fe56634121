//! Box-plot statistics, summary tables and report files.

mod emit;
mod stats;
mod summary;
mod svg;

use std::path::PathBuf;

use thiserror::Error;

pub use emit::{
    emit_report, read_summary_csv, render_metric_table, render_summary_table, summary_csv, trials_csv,
    Assumption, CsvSummaryRow, OutputFormat, Report, ReportSettings,
};
pub use stats::{box_stats, BoxStats, QuantileMethod};
pub use summary::{compliance, geodesic_violations, group_stats, summarize, GroupBy, GroupStats, Metric, SummaryRow};
pub use svg::{render_box_plot, AxisTransform, PLOT_HEIGHT, PLOT_TOP};

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("box statistics need at least one sample")]
    EmptySample,
    #[error("samples must be finite")]
    NonFiniteSample,
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Format(String),
}
