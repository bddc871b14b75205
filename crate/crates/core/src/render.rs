//! Stacked-interval Gantt charts: one row per observation interval, each of
//! visual length `T_0`, with row-local time running left to right. Rows
//! that exceed `T_0` spill past the dashed interval boundary.

use std::fmt::Write;

use crate::error::{Error, Result};
use crate::instance::{Instance, Time};
use crate::schedule::{Occurrence, ScheduleTimeline};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RenderKind {
    Svg,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColorBy {
    Period,
    Group,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RenderSpec {
    pub kind: RenderKind,
    /// SVG pixels per time unit.
    pub px_per_unit: f64,
    /// SVG pixels per row.
    pub row_height: f64,
    pub color_by: ColorBy,
    /// Draw the leading `hs` of every block as a gray header segment.
    pub show_headers: bool,
    /// Time units per character in text output.
    pub quantum: Time,
}

impl Default for RenderSpec {
    fn default() -> Self {
        Self {
            kind: RenderKind::Svg,
            px_per_unit: 4.0,
            row_height: 24.0,
            color_by: ColorBy::Period,
            show_headers: true,
            quantum: 1,
        }
    }
}

impl RenderSpec {
    fn check(&self) -> Result<()> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(self.px_per_unit) || !positive(self.row_height) || self.quantum == 0 {
            return Err(Error::Render(format!(
                "dimensions must be positive (px_per_unit {}, row_height {}, quantum {})",
                self.px_per_unit, self.row_height, self.quantum
            )));
        }
        Ok(())
    }
}

const PALETTE: [&str; 10] = [
    "#4e79a7", "#f28e2b", "#59a14f", "#e15759", "#76b7b2", "#edc948", "#b07aa1", "#ff9da7",
    "#9c755f", "#bab0ac",
];
const HEADER_FILL: &str = "#8c8c8c";
const GLYPHS: &[u8] = b"ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789";
const HEADER_GLYPH: char = '.';

/// Color or glyph slot of an occurrence.
fn slot(o: &Occurrence, spec: &RenderSpec) -> usize {
    match spec.color_by {
        ColorBy::Period => o.period_index,
        ColorBy::Group => o.group,
    }
}

fn row_start(timeline: &ScheduleTimeline, row: usize) -> Time {
    row as Time * timeline.base_period
}

/// Longest row-local extent, at least `T_0`.
fn extent(timeline: &ScheduleTimeline) -> Time {
    timeline
        .occurrences
        .iter()
        .map(|o| o.end - row_start(timeline, o.row))
        .fold(timeline.base_period, Time::max)
}

pub fn render_gantt(
    timeline: &ScheduleTimeline,
    instance: &Instance,
    spec: &RenderSpec,
) -> Result<String> {
    spec.check()?;
    Ok(match spec.kind {
        RenderKind::Svg => render_svg(timeline, instance, spec),
        RenderKind::Text => render_text(timeline, instance, spec),
    })
}

fn render_svg(timeline: &ScheduleTimeline, instance: &Instance, spec: &RenderSpec) -> String {
    const LEFT: f64 = 48.0;
    const TOP: f64 = 24.0;
    const PAD: f64 = 16.0;
    let px = spec.px_per_unit;
    let rh = spec.row_height;
    let base = timeline.base_period as f64;
    let width = LEFT + extent(timeline) as f64 * px + PAD;
    let height = TOP + timeline.row_count as f64 * rh + PAD;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.2}" height="{height:.2}" viewBox="0 0 {width:.2} {height:.2}">"#
    );
    s.push_str("<style>text{font:11px sans-serif;fill:#333}</style>\n");
    let _ = writeln!(s, r#"<text x="{LEFT:.2}" y="{:.2}">0</text>"#, TOP - 8.0);
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
        LEFT + base * px,
        TOP - 8.0,
        timeline.base_period
    );

    for row in 0..timeline.row_count {
        let y = TOP + row as f64 * rh;
        let _ = writeln!(
            s,
            r##"<rect x="{LEFT:.2}" y="{y:.2}" width="{:.2}" height="{rh:.2}" fill="#f7f7f7" stroke="#cccccc"/>"##,
            base * px
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{row}</text>"#,
            LEFT - 6.0,
            y + rh / 2.0 + 4.0
        );
    }

    for o in &timeline.occurrences {
        let local = (o.start - row_start(timeline, o.row)) as f64;
        let x = LEFT + local * px;
        let y = TOP + o.row as f64 * rh + 2.0;
        let h = rh - 4.0;
        let size = (o.end - o.start) as f64;
        let header = if spec.show_headers {
            (instance.header_size as f64).min(size)
        } else {
            0.0
        };
        let fill = PALETTE[slot(o, spec) % PALETTE.len()];
        let period = instance.periods.get(o.period_index).copied().unwrap_or(0);
        let _ = writeln!(
            s,
            r#"<g><title>period {period} group {} occurrence {} [{}, {})</title>"#,
            o.group_id, o.occurrence, o.start, o.end
        );
        if header > 0.0 {
            let _ = writeln!(
                s,
                r#"<rect x="{x:.2}" y="{y:.2}" width="{:.2}" height="{h:.2}" fill="{HEADER_FILL}"/>"#,
                header * px
            );
        }
        let _ = writeln!(
            s,
            r#"<rect x="{:.2}" y="{y:.2}" width="{:.2}" height="{h:.2}" fill="{fill}"/>"#,
            x + header * px,
            (size - header) * px
        );
        let _ = writeln!(
            s,
            r##"<rect x="{x:.2}" y="{y:.2}" width="{:.2}" height="{h:.2}" fill="none" stroke="#333333"/></g>"##,
            size * px
        );
    }

    let bx = LEFT + base * px;
    let _ = writeln!(
        s,
        r##"<line x1="{bx:.2}" y1="{:.2}" x2="{bx:.2}" y2="{:.2}" stroke="#d62728" stroke-dasharray="4 3"/>"##,
        TOP - 4.0,
        TOP + timeline.row_count as f64 * rh + 4.0
    );
    s.push_str("</svg>\n");
    s
}

fn render_text(timeline: &ScheduleTimeline, instance: &Instance, spec: &RenderSpec) -> String {
    let q = spec.quantum;
    let columns = extent(timeline).div_ceil(q) as usize;
    let boundary = timeline.base_period.div_ceil(q) as usize;
    let label_width = timeline.row_count.saturating_sub(1).to_string().len();
    let mut out = String::new();
    let mut used: Vec<(usize, String)> = Vec::new();

    for row in 0..timeline.row_count {
        let origin = row_start(timeline, row);
        let blocks: Vec<&Occurrence> = timeline.row(row).collect();
        let mut line = String::with_capacity(columns + 1);
        for col in 0..columns {
            if col == boundary {
                line.push('|');
            }
            let t = origin + col as Time * q;
            let glyph = match blocks.iter().find(|o| o.start <= t && t < o.end) {
                Some(o) if spec.show_headers && t < o.start + instance.header_size => HEADER_GLYPH,
                Some(o) => {
                    let k = slot(o, spec);
                    if !used.iter().any(|(u, _)| *u == k) {
                        let period = instance.periods.get(o.period_index).copied().unwrap_or(0);
                        let what = match spec.color_by {
                            ColorBy::Period => format!("period {period}"),
                            ColorBy::Group => format!("period {period} group {}", o.group_id),
                        };
                        used.push((k, what));
                    }
                    GLYPHS[k % GLYPHS.len()] as char
                }
                None => ' ',
            };
            line.push(glyph);
        }
        if columns == boundary {
            line.push('|');
        }
        let total = blocks.last().map_or(0, |o| o.end - origin);
        let _ = writeln!(out, "{row:>label_width$} |{line} {total}");
    }

    used.sort();
    if spec.show_headers && instance.header_size > 0 && !timeline.occurrences.is_empty() {
        let _ = writeln!(out, "{HEADER_GLYPH} header");
    }
    for (k, what) in used {
        let _ = writeln!(out, "{} {what}", GLYPHS[k % GLYPHS.len()] as char);
    }
    out
}
