//! Static SVG renderings. Output depends only on the table, so re-emitting
//! the same table yields the same bytes.

use std::fmt::Write;

use super::{HeatmapTable, ViolinTable};
use crate::ela::FEATURE_NAMES;
use crate::shift::clip_for_display;
use crate::stats;

/// Sequential colour scale with log-spaced bins.
#[derive(Clone, Debug, PartialEq)]
pub struct ColorScale {
    pub lower: f64,
    pub upper: f64,
    /// One colour per bin, low to high.
    pub colors: Vec<String>,
}

impl Default for ColorScale {
    /// Eight bins over `[1e-3, 1e1]`, viridis-like.
    fn default() -> Self {
        let colors = [
            "#440154", "#46327e", "#365c8d", "#277f8e", "#1fa187", "#4ac16d", "#a0da39", "#fde725",
        ];
        ColorScale {
            lower: 1e-3,
            upper: 1e1,
            colors: colors.iter().map(|c| c.to_string()).collect(),
        }
    }
}

impl ColorScale {
    /// Bin of `v`; values outside the range land in the end bins.
    pub fn bin(&self, v: f64) -> usize {
        let n = self.colors.len();
        if v <= self.lower {
            return 0;
        }
        if v >= self.upper {
            return n - 1;
        }
        let t = (v.log10() - self.lower.log10()) / (self.upper.log10() - self.lower.log10());
        ((t * n as f64) as usize).min(n - 1)
    }

    pub fn color(&self, v: f64) -> &str {
        &self.colors[self.bin(v)]
    }

    /// Lower edge of bin `i`.
    pub fn edge(&self, i: usize) -> f64 {
        let (a, b) = (self.lower.log10(), self.upper.log10());
        10f64.powf(a + (b - a) * i as f64 / self.colors.len() as f64)
    }
}

const HEADER: &str = r#"<?xml version="1.0" encoding="UTF-8"?>"#;

fn open(out: &mut String, w: f64, h: f64) {
    let _ = writeln!(out, "{HEADER}");
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.0} {h:.0}" font-family="sans-serif" font-size="9">"#
    );
    let _ = writeln!(out, r##"<rect width="100%" height="100%" fill="#ffffff"/>"##);
}

pub fn heatmap_svg(t: &HeatmapTable, scale: &ColorScale) -> String {
    const CELL: f64 = 12.0;
    const LEFT: f64 = 40.0;
    const TOP: f64 = 200.0;
    let cols = FEATURE_NAMES.len() as f64;
    let rows = t.function_ids.len() as f64;
    let legend_y = TOP + rows * CELL + 24.0;
    let width = LEFT + cols * CELL + 90.0;
    let height = legend_y + 50.0;

    let mut s = String::new();
    open(&mut s, width, height);
    s.push_str(concat!(
        r#"<defs><pattern id="hatch" patternUnits="userSpaceOnUse" width="4" height="4" patternTransform="rotate(45)">"#,
        r##"<rect width="4" height="4" fill="#ffffff"/><line x1="0" y1="0" x2="0" y2="4" stroke="#888888" stroke-width="1.5"/>"##,
        "</pattern></defs>\n"
    ));
    let _ = writeln!(
        s,
        r#"<text class="title" x="{LEFT}" y="14" font-size="12">median |shift|, S = {}, d = {}</text>"#,
        t.sample_size, t.reduced_dim
    );
    for (q, name) in FEATURE_NAMES.iter().enumerate() {
        let x = LEFT + (q as f64 + 0.5) * CELL;
        let _ = writeln!(
            s,
            r#"<text class="col-label" x="{x:.1}" y="{:.1}" transform="rotate(-70 {x:.1} {:.1})">{name}</text>"#,
            TOP - 4.0,
            TOP - 4.0
        );
    }
    for (r, (fid, row)) in t.function_ids.iter().zip(&t.values).enumerate() {
        let y = TOP + r as f64 * CELL;
        let _ = writeln!(
            s,
            r#"<text class="row-label" x="{:.1}" y="{:.1}" text-anchor="end">f{fid}</text>"#,
            LEFT - 4.0,
            y + CELL * 0.75
        );
        for (q, v) in row.iter().enumerate() {
            let x = LEFT + q as f64 * CELL;
            match v {
                Some(v) => {
                    let _ = writeln!(
                        s,
                        r#"<rect class="cell" x="{x:.1}" y="{y:.1}" width="{CELL}" height="{CELL}" fill="{}"><title>f{fid} {}: {v}</title></rect>"#,
                        scale.color(*v),
                        FEATURE_NAMES[q]
                    );
                }
                None => {
                    let _ = writeln!(
                        s,
                        r#"<rect class="cell missing" x="{x:.1}" y="{y:.1}" width="{CELL}" height="{CELL}" fill="url(#hatch)"><title>f{fid} {}: missing</title></rect>"#,
                        FEATURE_NAMES[q]
                    );
                }
            }
        }
    }
    let _ = writeln!(
        s,
        r##"<rect class="axis" x="{LEFT}" y="{TOP}" width="{:.1}" height="{:.1}" fill="none" stroke="#000000" stroke-width="0.8"/>"##,
        cols * CELL,
        rows * CELL
    );
    for i in 0..scale.colors.len() {
        let x = LEFT + i as f64 * 48.0;
        let _ = writeln!(
            s,
            r#"<rect class="legend" x="{x:.1}" y="{legend_y:.1}" width="48" height="10" fill="{}"/>"#,
            scale.colors[i]
        );
        let _ = writeln!(
            s,
            r#"<text class="legend-label" x="{x:.1}" y="{:.1}">{:.0e}</text>"#,
            legend_y + 22.0,
            scale.edge(i)
        );
    }
    let _ = writeln!(
        s,
        r##"<rect class="legend-missing" x="{:.1}" y="{legend_y:.1}" width="10" height="10" fill="url(#hatch)" stroke="#888888"/><text x="{:.1}" y="{:.1}">missing</text>"##,
        LEFT + scale.colors.len() as f64 * 48.0 + 16.0,
        LEFT + scale.colors.len() as f64 * 48.0 + 30.0,
        legend_y + 9.0
    );
    s.push_str("</svg>\n");
    s
}

/// Gaussian KDE outline of clipped samples: (value, density) pairs over the
/// sample range, or `None` when the samples are a point mass.
fn outline(clipped: &[f64]) -> Option<Vec<(f64, f64)>> {
    let (lo, hi) = clipped
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    if clipped.len() < 2 || hi - lo <= 0.0 {
        return None;
    }
    let h = stats::silverman_bandwidth(clipped);
    let a = (lo - 2.0 * h).max(-1.0);
    let b = (hi + 2.0 * h).min(1.0);
    const STEPS: usize = 48;
    Some(
        (0..=STEPS)
            .map(|i| {
                let v = a + (b - a) * i as f64 / STEPS as f64;
                let dens: f64 = clipped.iter().map(|x| (-0.5 * ((v - x) / h).powi(2)).exp()).sum();
                (v, dens)
            })
            .collect(),
    )
}

pub fn violin_svg(t: &ViolinTable) -> String {
    const COL: f64 = 26.0;
    const LEFT: f64 = 40.0;
    const TOP: f64 = 30.0;
    const PLOT_H: f64 = 240.0;
    let shown: Vec<usize> = (0..t.samples.len()).filter(|&q| !t.samples[q].is_empty()).collect();
    let omitted: Vec<&str> = (0..t.samples.len())
        .filter(|&q| t.samples[q].is_empty())
        .map(|q| FEATURE_NAMES[q])
        .collect();
    let plot_w = shown.len().max(1) as f64 * COL;
    let label_y = TOP + PLOT_H + 6.0;
    let note_y = label_y + 150.0;
    let note_lines = omitted.len().div_ceil(6);
    let width = (LEFT + plot_w + 80.0).max(520.0);
    let height = note_y + 14.0 * note_lines as f64 + 10.0;
    let y_of = |v: f64| TOP + (1.0 - v) / 2.0 * PLOT_H;

    let mut s = String::new();
    open(&mut s, width, height);
    let _ = writeln!(
        s,
        r#"<text class="title" x="{LEFT}" y="16" font-size="12">shift distribution, f{}, S = {}, d = {} (display clipped to [-1, 1])</text>"#,
        t.function_id, t.sample_size, t.reduced_dim
    );
    for v in [-1.0, -0.5, 0.0, 0.5, 1.0] {
        let _ = writeln!(
            s,
            r#"<text class="tick" x="{:.1}" y="{:.1}" text-anchor="end">{v}</text>"#,
            LEFT - 4.0,
            y_of(v) + 3.0
        );
    }
    let _ = writeln!(
        s,
        r##"<rect class="axis" x="{LEFT}" y="{TOP}" width="{plot_w:.1}" height="{PLOT_H}" fill="none" stroke="#000000" stroke-width="0.8"/>"##
    );
    let _ = writeln!(
        s,
        r##"<line class="zero" x1="{LEFT}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="#555555" stroke-dasharray="4 3"/>"##,
        y_of(0.0),
        LEFT + plot_w,
        y_of(0.0)
    );
    for (c, &q) in shown.iter().enumerate() {
        let cx = LEFT + (c as f64 + 0.5) * COL;
        let clipped: Vec<f64> = t.samples[q].iter().map(|&v| clip_for_display(v)).collect();
        match outline(&clipped) {
            Some(pts) => {
                let peak = pts.iter().map(|p| p.1).fold(0.0, f64::max);
                let half = |d: f64| 0.45 * COL * d / peak;
                let mut d = String::new();
                for (i, (v, dens)) in pts.iter().enumerate() {
                    let _ = write!(
                        d,
                        "{}{:.2},{:.2} ",
                        if i == 0 { "M" } else { "L" },
                        cx + half(*dens),
                        y_of(*v)
                    );
                }
                for (v, dens) in pts.iter().rev() {
                    let _ = write!(d, "L{:.2},{:.2} ", cx - half(*dens), y_of(*v));
                }
                d.push('Z');
                let _ = writeln!(
                    s,
                    r##"<path class="violin" d="{d}" fill="#7aa6c2" fill-opacity="0.7" stroke="#2b5775" stroke-width="0.6"/>"##
                );
            }
            None => {
                let y = y_of(clipped[0]);
                let _ = writeln!(
                    s,
                    r##"<line class="point-mass" x1="{:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#2b5775" stroke-width="2"/>"##,
                    cx - 0.35 * COL,
                    cx + 0.35 * COL
                );
            }
        }
        let med = stats::median(&clipped);
        let _ = writeln!(
            s,
            r##"<circle class="median" cx="{cx:.2}" cy="{:.2}" r="1.8" fill="#000000"><title>{} median {}</title></circle>"##,
            y_of(med),
            FEATURE_NAMES[q],
            stats::median(&t.samples[q])
        );
        let _ = writeln!(
            s,
            r#"<text class="col-label" x="{cx:.1}" y="{label_y:.1}" transform="rotate(70 {cx:.1} {label_y:.1})">{}</text>"#,
            FEATURE_NAMES[q]
        );
    }
    if !omitted.is_empty() {
        let _ = writeln!(
            s,
            r#"<text class="note" x="{LEFT}" y="{note_y:.1}">omitted, no shift values: {} feature(s)</text>"#,
            omitted.len()
        );
        for (i, chunk) in omitted.chunks(6).enumerate() {
            let _ = writeln!(
                s,
                r#"<text class="note" x="{LEFT}" y="{:.1}">{}</text>"#,
                note_y + 14.0 * (i + 1) as f64,
                chunk.join(", ")
            );
        }
    }
    s.push_str("</svg>\n");
    s
}
