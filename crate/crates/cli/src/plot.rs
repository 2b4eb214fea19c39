//! Hand-written SVG figures.
//!
//! Layout constants are in user units (pixels at 100% zoom). Colors come from
//! a small embedded stylesheet so the significance classes can be restyled.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use readease_core::eval::{CorrelationResult, PerplexityFit, SteigerGrid};
use readease_core::eye::{Group, Measure, Regime};
use readease_core::stats::Tier;
use readease_core::Granularity;

use crate::commands::ResultsFile;

/// Bar slot width, bar width within the slot, and panel geometry.
const SLOT: f64 = 26.0;
const BAR: f64 = 18.0;
const PANEL_H: f64 = 240.0;
const MARGIN_L: f64 = 48.0;
const MARGIN_T: f64 = 28.0;
const LABEL_H: f64 = 110.0;
const GAP: f64 = 24.0;
/// Heatmap cell edge.
const CELL: f64 = 26.0;
/// Scatter plot area.
const SCATTER_W: f64 = 360.0;
const SCATTER_H: f64 = 260.0;

const STYLE: &str = "<style>\
text{font-family:sans-serif;font-size:11px}\
.title{font-size:13px;font-weight:bold}\
.tier-p001{fill:#08306b}.tier-p01{fill:#2171b5}.tier-p05{fill:#6baed6}.tier-ns{fill:#c6c6c6}\
.errorbar{stroke:#000;stroke-width:1}\
.axis{stroke:#444;stroke-width:1}.grid{stroke:#ddd;stroke-width:0.5}\
.cell{stroke:#fff;stroke-width:1}.point{fill:#2171b5}.fit{stroke:#cb181d;stroke-width:1.5}\
</style>";

fn esc(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn tier_class(t: Tier) -> &'static str {
    match t {
        Tier::P001 => "tier-p001",
        Tier::P01 => "tier-p01",
        Tier::P05 => "tier-p05",
        Tier::NotSignificant => "tier-ns",
    }
}

fn open(w: f64, h: f64) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w:.0}\" height=\"{h:.0}\" viewBox=\"0 0 {w:.0} {h:.0}\">{STYLE}\n"
    )
}

fn filter_tag(group: Option<Group>, regime: Option<Regime>) -> String {
    let mut tag = String::new();
    if let Some(g) = group {
        tag.push('_');
        tag.push_str(g.as_str());
    }
    if let Some(r) = regime {
        tag.push('_');
        tag.push_str(r.as_str());
    }
    tag
}

/// Axis range covering zero and every interval, padded to tenths.
fn y_range(results: &[&CorrelationResult]) -> (f64, f64) {
    let (mut lo, mut hi) = (0.0f64, 0.0f64);
    for r in results {
        if let Some(p) = r.pearson {
            lo = lo.min(p.ci_low).min(p.value);
            hi = hi.max(p.ci_high).max(p.value);
        }
    }
    ((lo * 10.0).floor() / 10.0 - 0.1, (hi * 10.0).ceil() / 10.0 + 0.1)
}

/// One panel per measure and granularity, with methods in chronological
/// order and 95% intervals as error bars.
pub fn bar_chart(results: &ResultsFile, group: Option<Group>, regime: Option<Regime>) -> String {
    let mut order: Vec<usize> = (0..results.methods.len()).collect();
    order.sort_by_key(|&i| results.methods[i].year.unwrap_or(u16::MAX));
    let cells: Vec<&CorrelationResult> = results
        .report
        .results
        .iter()
        .filter(|r| r.group == group && r.regime == regime)
        .collect();
    let mut measures: Vec<Measure> = Vec::new();
    let mut grans: Vec<Granularity> = Vec::new();
    for r in &cells {
        if !measures.contains(&r.measure) {
            measures.push(r.measure);
        }
        if !grans.contains(&r.granularity) {
            grans.push(r.granularity);
        }
    }
    let k = order.len().max(1) as f64;
    let panel_w = MARGIN_L + SLOT * k + GAP;
    let panel_h = MARGIN_T + PANEL_H + LABEL_H;
    let (lo, hi) = y_range(&cells);
    let width = panel_w * measures.len().max(1) as f64;
    let height = panel_h * grans.len().max(1) as f64;
    let mut s = open(width, height);

    for (gi, g) in grans.iter().enumerate() {
        for (mi, m) in measures.iter().enumerate() {
            let x0 = panel_w * mi as f64 + MARGIN_L;
            let y0 = panel_h * gi as f64 + MARGIN_T;
            let y = |v: f64| y0 + (hi - v) / (hi - lo) * PANEL_H;
            writeln!(
                s,
                "<g class=\"panel\" data-measure=\"{m}\" data-granularity=\"{g}\">"
            )
            .unwrap();
            writeln!(
                s,
                "<text class=\"title\" x=\"{x0:.1}\" y=\"{:.1}\">{m} ({g})</text>",
                y0 - 10.0
            )
            .unwrap();
            let mut tick = (lo * 10.0).round() as i64;
            while (tick as f64) / 10.0 <= hi + 1e-9 {
                let v = tick as f64 / 10.0;
                let yy = y(v);
                writeln!(
                    s,
                    "<line class=\"grid\" x1=\"{x0:.1}\" x2=\"{:.1}\" y1=\"{yy:.1}\" y2=\"{yy:.1}\"/><text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\">{v:.1}</text>",
                    x0 + SLOT * k,
                    x0 - 4.0,
                    yy + 4.0
                )
                .unwrap();
                tick += 2;
            }
            let zero = y(0.0);
            writeln!(
                s,
                "<line class=\"axis\" x1=\"{x0:.1}\" x2=\"{:.1}\" y1=\"{zero:.1}\" y2=\"{zero:.1}\"/>",
                x0 + SLOT * k
            )
            .unwrap();
            for (slot, &mi_) in order.iter().enumerate() {
                let info = &results.methods[mi_];
                let cx = x0 + SLOT * slot as f64 + SLOT / 2.0;
                let cell = cells
                    .iter()
                    .find(|r| r.method == info.id && r.measure == *m && r.granularity == *g);
                if let Some(p) = cell.and_then(|c| c.pearson) {
                    let (top, bottom) = (y(p.value.max(0.0)), y(p.value.min(0.0)));
                    writeln!(
                        s,
                        "<rect class=\"bar {}\" data-method=\"{}\" x=\"{:.1}\" y=\"{top:.2}\" width=\"{BAR}\" height=\"{:.2}\"/>",
                        tier_class(p.tier),
                        esc(&info.id),
                        cx - BAR / 2.0,
                        bottom - top
                    )
                    .unwrap();
                    writeln!(
                        s,
                        "<line class=\"errorbar\" x1=\"{cx:.1}\" x2=\"{cx:.1}\" y1=\"{:.2}\" y2=\"{:.2}\"/>",
                        y(p.ci_high),
                        y(p.ci_low)
                    )
                    .unwrap();
                }
                let ly = y0 + PANEL_H + 8.0;
                writeln!(
                    s,
                    "<text x=\"{cx:.1}\" y=\"{ly:.1}\" transform=\"rotate(60 {cx:.1} {ly:.1})\">{}</text>",
                    esc(&info.label)
                )
                .unwrap();
            }
            s.push_str("</g>\n");
        }
    }
    s.push_str("</svg>\n");
    s
}

/// Diverging fill for a Steiger z value: blue when the row method wins.
fn z_color(z: Option<f64>) -> String {
    let Some(z) = z else {
        return "#eeeeee".into();
    };
    let t = (z.abs() / 4.0).min(1.0);
    let mix = |a: f64, b: f64| (a + (b - a) * t).round() as u8;
    let (r, g, b) = if z >= 0.0 {
        (mix(255.0, 33.0), mix(255.0, 113.0), mix(255.0, 181.0))
    } else {
        (mix(255.0, 203.0), mix(255.0, 24.0), mix(255.0, 29.0))
    };
    format!("#{r:02x}{g:02x}{b:02x}")
}

/// k x k grid of pairwise comparisons with significance stars.
pub fn steiger_heatmap(grid: &SteigerGrid, labels: &[String]) -> String {
    let k = grid.methods.len() as f64;
    let left = 140.0;
    let top = 140.0;
    let mut s = open(left + CELL * k + 20.0, top + CELL * k + 20.0);
    writeln!(
        s,
        "<text class=\"title\" x=\"10\" y=\"18\">{} ({}) pairwise comparisons</text>",
        grid.measure, grid.granularity
    )
    .unwrap();
    for (i, label) in labels.iter().enumerate() {
        let y = top + CELL * i as f64 + CELL / 2.0 + 4.0;
        writeln!(
            s,
            "<text x=\"{:.1}\" y=\"{y:.1}\" text-anchor=\"end\">{}</text>",
            left - 6.0,
            esc(label)
        )
        .unwrap();
        let x = left + CELL * i as f64 + CELL / 2.0;
        writeln!(
            s,
            "<text x=\"{x:.1}\" y=\"{:.1}\" transform=\"rotate(-60 {x:.1} {:.1})\">{}</text>",
            top - 6.0,
            top - 6.0,
            esc(label)
        )
        .unwrap();
    }
    for i in 0..grid.methods.len() {
        for j in 0..grid.methods.len() {
            let (x, y) = (left + CELL * j as f64, top + CELL * i as f64);
            let z = grid.z[i][j];
            writeln!(
                s,
                "<rect class=\"cell\" data-row=\"{}\" data-col=\"{}\" x=\"{x:.1}\" y=\"{y:.1}\" width=\"{CELL}\" height=\"{CELL}\" fill=\"{}\"/>",
                esc(&grid.methods[i]),
                esc(&grid.methods[j]),
                z_color(z)
            )
            .unwrap();
            if let (Some(p), true) = (grid.p_value[i][j], i != j) {
                let stars = Tier::from_p(p);
                if stars != Tier::NotSignificant {
                    writeln!(
                        s,
                        "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\">{}</text>",
                        x + CELL / 2.0,
                        y + CELL / 2.0 + 4.0,
                        stars.stars()
                    )
                    .unwrap();
                }
            }
        }
    }
    s.push_str("</svg>\n");
    s
}

/// Evaluation r against log perplexity with the fitted line.
pub fn perplexity_scatter(fit: &PerplexityFit) -> String {
    let (left, top) = (56.0, 40.0);
    let mut s = open(left + SCATTER_W + 20.0, top + SCATTER_H + 50.0);
    let xs: Vec<f64> = fit.points.iter().map(|p| p.log_perplexity).collect();
    let ys: Vec<f64> = fit.points.iter().map(|p| p.r).collect();
    let span = |v: &[f64]| {
        let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !lo.is_finite() {
            (0.0, 1.0)
        } else if hi - lo < 1e-9 {
            (lo - 0.5, hi + 0.5)
        } else {
            let pad = (hi - lo) * 0.08;
            (lo - pad, hi + pad)
        }
    };
    let (x_lo, x_hi) = span(&xs);
    let (y_lo, y_hi) = span(&ys);
    let px = |x: f64| left + (x - x_lo) / (x_hi - x_lo) * SCATTER_W;
    let py = |y: f64| top + (y_hi - y) / (y_hi - y_lo) * SCATTER_H;
    let title = match &fit.fit {
        Some(f) => format!(
            "{} ({}, {}): slope {:.4}, p {:.3e}",
            fit.measure,
            fit.granularity,
            if fit.controlled {
                "controlled"
            } else {
                "uncontrolled"
            },
            f.slope,
            f.p_value
        ),
        None => format!("{} ({}): no fit", fit.measure, fit.granularity),
    };
    writeln!(
        s,
        "<text class=\"title\" x=\"10\" y=\"18\">{}</text>",
        esc(&title)
    )
    .unwrap();
    writeln!(
        s,
        "<line class=\"axis\" x1=\"{left}\" x2=\"{left}\" y1=\"{top}\" y2=\"{:.1}\"/><line class=\"axis\" x1=\"{left}\" x2=\"{:.1}\" y1=\"{:.1}\" y2=\"{:.1}\"/>",
        top + SCATTER_H,
        left + SCATTER_W,
        top + SCATTER_H,
        top + SCATTER_H
    )
    .unwrap();
    writeln!(
        s,
        "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\">log perplexity</text><text x=\"12\" y=\"{:.1}\">r</text>",
        left + SCATTER_W / 2.0,
        top + SCATTER_H + 36.0,
        top + SCATTER_H / 2.0
    )
    .unwrap();
    for (x, label) in [(x_lo, x_lo), (x_hi, x_hi)] {
        writeln!(
            s,
            "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\">{label:.2}</text>",
            px(x),
            top + SCATTER_H + 16.0
        )
        .unwrap();
    }
    for (y, label) in [(y_lo, y_lo), (y_hi, y_hi)] {
        writeln!(
            s,
            "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\">{label:.2}</text>",
            left - 4.0,
            py(y) + 4.0
        )
        .unwrap();
    }
    for p in &fit.points {
        writeln!(
            s,
            "<circle class=\"point\" data-method=\"{}\" cx=\"{:.2}\" cy=\"{:.2}\" r=\"3.5\"/>",
            esc(&p.method),
            px(p.log_perplexity),
            py(p.r)
        )
        .unwrap();
    }
    if let Some(f) = &fit.fit {
        let line = |x: f64| f.intercept + f.slope * x;
        writeln!(
            s,
            "<line class=\"fit\" x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\"/>",
            px(x_lo),
            py(line(x_lo)),
            px(x_hi),
            py(line(x_hi))
        )
        .unwrap();
    }
    s.push_str("</svg>\n");
    s
}

/// Writes every figure for a results file and returns the paths written.
pub fn render_all(results: &ResultsFile, dir: &Path) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    let mut write = |name: String, body: String| -> Result<()> {
        let path = dir.join(name);
        std::fs::write(&path, body).with_context(|| path.display().to_string())?;
        written.push(path);
        Ok(())
    };
    let mut filters: Vec<(Option<Group>, Option<Regime>)> = Vec::new();
    for r in &results.report.results {
        if !filters.contains(&(r.group, r.regime)) {
            filters.push((r.group, r.regime));
        }
    }
    for (g, r) in &filters {
        write(
            format!("bars{}.svg", filter_tag(*g, *r)),
            bar_chart(results, *g, *r),
        )?;
    }
    let label = |id: &str| {
        results
            .methods
            .iter()
            .find(|m| m.id == id)
            .map_or(id.to_string(), |m| m.label.clone())
    };
    for grid in &results.report.steiger_grids {
        let labels: Vec<String> = grid.methods.iter().map(|m| label(m)).collect();
        write(
            format!(
                "steiger_{}_{}{}.svg",
                grid.granularity,
                grid.measure,
                filter_tag(grid.group, grid.regime)
            ),
            steiger_heatmap(grid, &labels),
        )?;
    }
    for fit in &results.report.perplexity_fits {
        write(
            format!(
                "perplexity_{}_{}{}_{}.svg",
                fit.granularity,
                fit.measure,
                filter_tag(fit.group, fit.regime),
                if fit.controlled {
                    "controlled"
                } else {
                    "uncontrolled"
                }
            ),
            perplexity_scatter(fit),
        )?;
    }
    Ok(written)
}
