use std::fmt::Write;

use super::BoxStats;

pub const PLOT_TOP: f64 = 40.0;
pub const PLOT_HEIGHT: f64 = 300.0;
const MARGIN_LEFT: f64 = 80.0;
const MARGIN_RIGHT: f64 = 30.0;
const MARGIN_BOTTOM: f64 = 70.0;
const GROUP_WIDTH: f64 = 110.0;
const BOX_WIDTH: f64 = 50.0;
const TICKS: usize = 5;

/// Linear value-to-pixel mapping of the vertical axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisTransform {
    pub min: f64,
    pub max: f64,
    pub top: f64,
    pub height: f64,
}

impl AxisTransform {
    /// Covers all whiskers and outliers, padded by 5% of the range on both sides.
    pub fn fit(stats: &[&BoxStats]) -> Self {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for b in stats {
            for v in b.outliers.iter().chain([&b.whisker_low, &b.whisker_high]) {
                lo = lo.min(*v);
                hi = hi.max(*v);
            }
        }
        if !lo.is_finite() {
            lo = 0.0;
            hi = 1.0;
        }
        let range = hi - lo;
        let pad = if range > 0.0 { 0.05 * range } else { 0.05 * hi.abs().max(1.0) };
        Self {
            min: lo - pad,
            max: hi + pad,
            top: PLOT_TOP,
            height: PLOT_HEIGHT,
        }
    }

    pub fn y(&self, v: f64) -> f64 {
        self.top + (self.max - v) / (self.max - self.min) * self.height
    }

    pub fn value(&self, y: f64) -> f64 {
        self.max - (y - self.top) / self.height * (self.max - self.min)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn tick_label(v: f64) -> String {
    if v != 0.0 && v.abs() < 1e-2 {
        format!("{v:.2e}")
    } else {
        format!("{v:.3}")
    }
}

/// Standalone SVG box plot, one box per group, drawn directly from `groups`.
///
/// The root element records the axis in `data-axis-*` attributes.
pub fn render_box_plot(title: &str, groups: &[(&str, &BoxStats)]) -> (String, AxisTransform) {
    let axis = AxisTransform::fit(&groups.iter().map(|(_, b)| *b).collect::<Vec<_>>());
    let width = MARGIN_LEFT + GROUP_WIDTH * groups.len().max(1) as f64 + MARGIN_RIGHT;
    let height = PLOT_TOP + PLOT_HEIGHT + MARGIN_BOTTOM;
    let bottom = PLOT_TOP + PLOT_HEIGHT;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}" data-axis-min="{}" data-axis-max="{}" data-axis-top="{}" data-axis-height="{}">"#,
        axis.min, axis.max, axis.top, axis.height
    );
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{width:.0}" height="{height:.0}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="24" text-anchor="middle" font-family="sans-serif" font-size="14">{}</text>"#,
        width / 2.0,
        escape(title)
    );
    let _ = writeln!(
        s,
        r#"<line class="axis" x1="{MARGIN_LEFT:.1}" y1="{PLOT_TOP:.1}" x2="{MARGIN_LEFT:.1}" y2="{bottom:.1}" stroke="black"/>"#
    );
    for i in 0..TICKS {
        let v = axis.min + (axis.max - axis.min) * i as f64 / (TICKS - 1) as f64;
        let y = axis.y(v);
        let _ = writeln!(
            s,
            r#"<line class="tick" x1="{:.1}" y1="{y:.4}" x2="{MARGIN_LEFT:.1}" y2="{y:.4}" stroke="black"/>"#,
            MARGIN_LEFT - 5.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.4}" text-anchor="end" font-family="sans-serif" font-size="11">{}</text>"#,
            MARGIN_LEFT - 8.0,
            y + 4.0,
            tick_label(v)
        );
    }
    for (i, (label, b)) in groups.iter().enumerate() {
        let cx = MARGIN_LEFT + GROUP_WIDTH * (i as f64 + 0.5);
        let x0 = cx - BOX_WIDTH / 2.0;
        let x1 = cx + BOX_WIDTH / 2.0;
        let (yq1, yq3, ymed) = (axis.y(b.q1), axis.y(b.q3), axis.y(b.median));
        let (ylo, yhi) = (axis.y(b.whisker_low), axis.y(b.whisker_high));
        let _ = writeln!(s, r#"<g class="group" data-label="{}">"#, escape(label));
        let _ = writeln!(
            s,
            r#"<line class="whisker" x1="{cx:.4}" y1="{yhi:.4}" x2="{cx:.4}" y2="{yq3:.4}" stroke="black"/>"#
        );
        let _ = writeln!(
            s,
            r#"<line class="whisker" x1="{cx:.4}" y1="{yq1:.4}" x2="{cx:.4}" y2="{ylo:.4}" stroke="black"/>"#
        );
        for y in [yhi, ylo] {
            let _ = writeln!(
                s,
                r#"<line class="whisker-cap" x1="{:.4}" y1="{y:.4}" x2="{:.4}" y2="{y:.4}" stroke="black"/>"#,
                cx - BOX_WIDTH / 4.0,
                cx + BOX_WIDTH / 4.0
            );
        }
        let _ = writeln!(
            s,
            r##"<rect class="box" x="{x0:.4}" y="{yq3:.4}" width="{BOX_WIDTH:.4}" height="{:.4}" fill="#9ecae1" stroke="black"/>"##,
            yq1 - yq3
        );
        let _ = writeln!(
            s,
            r#"<line class="median" x1="{x0:.4}" y1="{ymed:.4}" x2="{x1:.4}" y2="{ymed:.4}" stroke="black" stroke-width="2"/>"#
        );
        for o in &b.outliers {
            let _ = writeln!(
                s,
                r#"<circle class="outlier" cx="{cx:.4}" cy="{:.4}" r="3" fill="none" stroke="black"/>"#,
                axis.y(*o)
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="{cx:.4}" y="{:.1}" text-anchor="middle" font-family="sans-serif" font-size="12">{}</text>"#,
            bottom + 20.0,
            escape(label)
        );
        s.push_str("</g>\n");
    }
    s.push_str("</svg>\n");
    (s, axis)
}
