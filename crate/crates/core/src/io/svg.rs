//! Static SVG heatmaps and line plots of sweep fields.
//!
//! Output is plain text with fixed-precision coordinates, so identical input
//! always yields byte-identical files.

use std::fmt::Write;

use crate::error::{Error, Result};
use crate::sweep::SweepRecord;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 70.0;
const TOP: f64 = 40.0;
const PLOT_W: f64 = 440.0;
const PLOT_H: f64 = 370.0;
const BAR_X: f64 = 540.0;
const BAR_W: f64 = 20.0;

/// Viridis anchor colors, evenly spaced on [0, 1].
const STOPS: [(u8, u8, u8); 5] = [
    (0x44, 0x01, 0x54),
    (0x3b, 0x52, 0x8b),
    (0x21, 0x91, 0x8c),
    (0x5e, 0xc9, 0x62),
    (0xfd, 0xe7, 0x25),
];

const LINE_COLORS: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
];

pub fn colormap(x: f64) -> String {
    let x = if x.is_finite() {
        x.clamp(0.0, 1.0)
    } else {
        0.0
    };
    let pos = x * (STOPS.len() - 1) as f64;
    let k = (pos.floor() as usize).min(STOPS.len() - 2);
    let f = pos - k as f64;
    let lerp = |a: u8, b: u8| (a as f64 + (b as f64 - a as f64) * f).round() as u8;
    let (a, b) = (STOPS[k], STOPS[k + 1]);
    format!(
        "#{:02x}{:02x}{:02x}",
        lerp(a.0, b.0),
        lerp(a.1, b.1),
        lerp(a.2, b.2)
    )
}

/// Field values on a rectangular (θ, T) grid, `values[θ][T]`.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldGrid {
    pub field: String,
    pub thetas: Vec<f64>,
    pub times: Vec<f64>,
    pub values: Vec<Vec<f64>>,
}

fn sorted_unique(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

pub fn check_field(field: &str) -> Result<()> {
    if SweepRecord::FIELDS.contains(&field) {
        Ok(())
    } else {
        Err(Error::Schema(format!(
            "unknown field '{field}' (expected one of {})",
            SweepRecord::FIELDS.join(", ")
        )))
    }
}

impl FieldGrid {
    pub fn from_records(records: &[SweepRecord], field: &str) -> Result<Self> {
        check_field(field)?;
        if records.is_empty() {
            return Err(Error::Schema("no records".into()));
        }
        let thetas = sorted_unique(records.iter().map(|r| r.theta_deg).collect());
        let times = sorted_unique(records.iter().map(|r| r.t_deg).collect());
        if thetas.len() * times.len() != records.len() {
            return Err(Error::Schema(format!(
                "non-rectangular grid: {} records for {} theta x {} T values",
                records.len(),
                thetas.len(),
                times.len()
            )));
        }
        let mut values = vec![vec![f64::NAN; times.len()]; thetas.len()];
        let mut filled = vec![vec![false; times.len()]; thetas.len()];
        for r in records {
            let i = thetas
                .binary_search_by(|x| x.total_cmp(&r.theta_deg))
                .unwrap();
            let j = times.binary_search_by(|x| x.total_cmp(&r.t_deg)).unwrap();
            if filled[i][j] {
                return Err(Error::Schema(format!(
                    "non-rectangular grid: duplicate point theta={} T={}",
                    r.theta_deg, r.t_deg
                )));
            }
            filled[i][j] = true;
            values[i][j] = r.field(field).expect("checked field");
        }
        Ok(Self {
            field: field.to_string(),
            thetas,
            times,
            values,
        })
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .flatten()
            .copied()
            .filter(|v| v.is_finite())
            .fold(0.0, f64::max)
    }
}

fn header(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        out,
        r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
        LEFT + PLOT_W / 2.0,
        escape(title)
    );
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn fmt_tick(v: f64) -> String {
    let s = format!("{v:.3}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

/// Cell edges for possibly non-uniform sample positions: each cell spans
/// halfway to its neighbours.
fn edges(samples: &[f64]) -> Vec<f64> {
    let n = samples.len();
    if n == 1 {
        return vec![samples[0] - 0.5, samples[0] + 0.5];
    }
    let mut e = Vec::with_capacity(n + 1);
    e.push(samples[0] - (samples[1] - samples[0]) / 2.0);
    for k in 0..n - 1 {
        e.push((samples[k] + samples[k + 1]) / 2.0);
    }
    e.push(samples[n - 1] + (samples[n - 1] - samples[n - 2]) / 2.0);
    e
}

fn axes(out: &mut String, x_label: &str, x_range: (f64, f64), y_label: &str, y_range: (f64, f64)) {
    let _ = writeln!(
        out,
        r#"<rect x="{LEFT}" y="{TOP}" width="{PLOT_W}" height="{PLOT_H}" fill="none" stroke="black"/>"#
    );
    for k in 0..=4 {
        let f = k as f64 / 4.0;
        let x = LEFT + f * PLOT_W;
        let xv = x_range.0 + f * (x_range.1 - x_range.0);
        let _ = writeln!(
            out,
            r#"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            TOP + PLOT_H,
            TOP + PLOT_H + 5.0,
            TOP + PLOT_H + 18.0,
            fmt_tick(xv)
        );
        let y = TOP + PLOT_H - f * PLOT_H;
        let yv = y_range.0 + f * (y_range.1 - y_range.0);
        let _ = writeln!(
            out,
            r#"<line x1="{:.2}" y1="{y:.2}" x2="{LEFT}" y2="{y:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            LEFT - 5.0,
            LEFT - 8.0,
            y + 4.0,
            fmt_tick(yv)
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        LEFT + PLOT_W / 2.0,
        TOP + PLOT_H + 36.0,
        escape(x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">{}</text>"#,
        TOP + PLOT_H / 2.0,
        TOP + PLOT_H / 2.0,
        escape(y_label)
    );
}

/// Heatmap with θ on the horizontal axis and T on the vertical axis, linear
/// color scale over `[0, max]` and a color bar.
pub fn heatmap(grid: &FieldGrid) -> String {
    let vmax = grid.max();
    let xe = edges(&grid.thetas);
    let ye = edges(&grid.times);
    let (x0, x1) = (xe[0], *xe.last().unwrap());
    let (y0, y1) = (ye[0], *ye.last().unwrap());
    let sx = |v: f64| LEFT + (v - x0) / (x1 - x0) * PLOT_W;
    let sy = |v: f64| TOP + PLOT_H - (v - y0) / (y1 - y0) * PLOT_H;

    let mut out = String::new();
    header(
        &mut out,
        &format!("{} (max {})", grid.field, fmt_tick(vmax)),
    );
    let _ = writeln!(out, r#"<g shape-rendering="crispEdges">"#);
    for (i, row) in grid.values.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            let norm = if vmax > 0.0 { v / vmax } else { 0.0 };
            let (xa, xb) = (sx(xe[i]), sx(xe[i + 1]));
            let (ya, yb) = (sy(ye[j + 1]), sy(ye[j]));
            let _ = writeln!(
                out,
                r#"<rect x="{xa:.2}" y="{ya:.2}" width="{:.2}" height="{:.2}" fill="{}"/>"#,
                xb - xa,
                yb - ya,
                colormap(norm)
            );
        }
    }
    let _ = writeln!(out, "</g>");
    axes(&mut out, "θ (deg)", (x0, x1), "T = at (deg)", (y0, y1));

    // color bar
    const BAR_STEPS: usize = 50;
    let step_h = PLOT_H / BAR_STEPS as f64;
    for k in 0..BAR_STEPS {
        let f = (k as f64 + 0.5) / BAR_STEPS as f64;
        let y = TOP + PLOT_H - (k + 1) as f64 * step_h;
        let _ = writeln!(
            out,
            r#"<rect x="{BAR_X}" y="{y:.2}" width="{BAR_W}" height="{:.2}" fill="{}"/>"#,
            step_h,
            colormap(f)
        );
    }
    let _ = writeln!(
        out,
        r#"<rect x="{BAR_X}" y="{TOP}" width="{BAR_W}" height="{PLOT_H}" fill="none" stroke="black"/>"#
    );
    for k in 0..=4 {
        let f = k as f64 / 4.0;
        let y = TOP + PLOT_H - f * PLOT_H;
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}">{}</text>"#,
            BAR_X + BAR_W + 4.0,
            y + 4.0,
            fmt_tick(f * vmax)
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Line traces of `fields` versus T for the records at `theta_deg`.
pub fn line_plot(records: &[SweepRecord], theta_deg: f64, fields: &[&str]) -> Result<String> {
    if fields.is_empty() {
        return Err(Error::Schema("no fields selected".into()));
    }
    for f in fields {
        check_field(f)?;
    }
    let mut rows: Vec<&SweepRecord> = records
        .iter()
        .filter(|r| (r.theta_deg - theta_deg).abs() <= 1e-9)
        .collect();
    if rows.is_empty() {
        return Err(Error::Schema(format!(
            "no records at theta = {theta_deg} deg"
        )));
    }
    rows.sort_by(|a, b| a.t_deg.total_cmp(&b.t_deg));

    let (t0, t1) = (rows[0].t_deg, rows[rows.len() - 1].t_deg);
    let (t0, t1) = if t1 > t0 {
        (t0, t1)
    } else {
        (t0 - 0.5, t0 + 0.5)
    };
    let ymax = rows
        .iter()
        .flat_map(|r| fields.iter().map(|f| r.field(f).unwrap()))
        .filter(|v| v.is_finite())
        .fold(1.0, f64::max);
    let sx = |v: f64| LEFT + (v - t0) / (t1 - t0) * PLOT_W;
    let sy = |v: f64| TOP + PLOT_H - v / ymax * PLOT_H;

    let mut out = String::new();
    header(&mut out, &format!("θ = {} deg", fmt_tick(theta_deg)));
    axes(&mut out, "T = at (deg)", (t0, t1), "value", (0.0, ymax));
    for (k, f) in fields.iter().enumerate() {
        let color = LINE_COLORS[k % LINE_COLORS.len()];
        let pts: Vec<String> = rows
            .iter()
            .map(|r| format!("{:.2},{:.2}", sx(r.t_deg), sy(r.field(f).unwrap())))
            .collect();
        let _ = writeln!(
            out,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            pts.join(" ")
        );
        let ly = TOP + 14.0 + 16.0 * k as f64;
        let _ = writeln!(
            out,
            r#"<line x1="{BAR_X}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{color}" stroke-width="2"/><text x="{:.2}" y="{:.2}">{}</text>"#,
            ly - 4.0,
            BAR_X + 18.0,
            ly - 4.0,
            BAR_X + 22.0,
            ly,
            escape(f)
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(theta: f64, t: f64, nb: f64) -> SweepRecord {
        let mut v = [0.0; 13];
        v[0] = theta;
        v[1] = t;
        v[3] = nb;
        SweepRecord::from_values(v)
    }

    #[test]
    fn colormap_endpoints() {
        assert_eq!(colormap(0.0), "#440154");
        assert_eq!(colormap(1.0), "#fde725");
        assert_eq!(colormap(0.5), "#21918c");
        assert_eq!(colormap(f64::NAN), "#440154");
    }

    #[test]
    fn single_cell_heatmap() {
        let g = FieldGrid::from_records(&[rec(0.0, 45.0, 0.5)], "N_B").unwrap();
        let svg = heatmap(&g);
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches(r##"fill="#fde725""##).count(), 1);
    }

    #[test]
    fn rejects_bad_grids() {
        let recs = [rec(0.0, 0.0, 0.0), rec(0.0, 1.0, 0.0), rec(1.0, 0.0, 0.0)];
        assert!(matches!(
            FieldGrid::from_records(&recs, "N_B"),
            Err(Error::Schema(_))
        ));
        let recs = [rec(0.0, 0.0, 0.0), rec(0.0, 0.0, 0.0)];
        assert!(FieldGrid::from_records(&recs, "N_B").is_err());
        assert!(FieldGrid::from_records(&[rec(0.0, 0.0, 0.0)], "nope").is_err());
    }

    #[test]
    fn line_plot_traces() {
        let recs: Vec<_> = (0..5)
            .flat_map(|k| [rec(0.0, k as f64, 0.1), rec(90.0, k as f64, 0.2)])
            .collect();
        let svg = line_plot(&recs, 90.0, &["N_A", "N_B", "N_C"]).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 3);
        assert!(line_plot(&recs, 45.0, &["N_B"]).is_err());
        assert!(line_plot(&recs, 90.0, &["bogus"]).is_err());
    }
}
