//! CSV and SVG emitters.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use super::{ExperimentResult, OutputFormat, ResultTable, SeriesRow};
use crate::error::{Error, Result};
use crate::state::Distribution;

/// Fixed-point with 12 decimals for values of magnitude ≥ 0.1 (and zero),
/// scientific with 12 fraction digits otherwise; at least 12 significant
/// digits either way.
pub fn format_value(v: f64) -> String {
    if v == 0.0 || v.abs() >= 0.1 {
        format!("{v:.12}")
    } else {
        format!("{v:.12e}")
    }
}

/// Writes `table` as CSV: `x,y,p` rows for a distribution, `step,p,measure,value`
/// rows for a series.
pub fn write_csv<W: Write>(table: &ResultTable, writer: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(writer);
    match table {
        ResultTable::Distribution(d) => {
            w.write_record(["x", "y", "p"])?;
            for (x, y, p) in d.iter() {
                w.write_record([x.to_string(), y.to_string(), format_value(p)])?;
            }
        }
        ResultTable::Series(rows) => {
            w.write_record(["step", "p", "measure", "value"])?;
            for r in rows {
                w.write_record([
                    r.step.to_string(),
                    r.p.to_string(),
                    r.measure.name().to_string(),
                    r.value.map(format_value).unwrap_or_default(),
                ])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

pub fn emit_csv(table: &ResultTable, path: &Path) -> Result<()> {
    let file = fs::File::create(path)?;
    write_csv(table, std::io::BufWriter::new(file))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    Heatmap,
    Lines,
}

/// A labelled polyline of `(step, value)` points.
#[derive(Debug, Clone, PartialEq)]
pub struct LineSeries {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

/// Groups series rows into one line per `(measure, p)`, skipping empty cells.
pub fn lines_from_rows(rows: &[SeriesRow], prefix: &str) -> Vec<LineSeries> {
    let mut out: Vec<(String, LineSeries)> = Vec::new();
    for r in rows {
        let key = format!("{}|{}", r.measure.name(), r.p);
        let idx = match out.iter().position(|(k, _)| *k == key) {
            Some(i) => i,
            None => {
                let label = if prefix.is_empty() {
                    format!("{} p={}", r.measure.name(), r.p)
                } else {
                    format!("{prefix} {} p={}", r.measure.name(), r.p)
                };
                out.push((
                    key,
                    LineSeries {
                        label,
                        points: Vec::new(),
                    },
                ));
                out.len() - 1
            }
        };
        if let Some(v) = r.value {
            out[idx].1.points.push((r.step as f64, v));
        }
    }
    out.into_iter().map(|(_, s)| s).collect()
}

pub fn emit_svg(table: &ResultTable, kind: PlotKind, path: &Path) -> Result<()> {
    let svg = match (table, kind) {
        (ResultTable::Distribution(d), PlotKind::Heatmap) => render_heatmap(d),
        (ResultTable::Series(rows), PlotKind::Lines) => {
            render_lines(&lines_from_rows(rows, ""), "step", "value")
        }
        _ => {
            return Err(Error::InvalidArgument(
                "heatmaps need a distribution table and line plots a series table".into(),
            ))
        }
    };
    fs::write(path, svg)?;
    Ok(())
}

/// File stem for the distribution at level `p`.
fn distribution_stem(prefix: &str, p: f64) -> String {
    format!("{prefix}_p{p}_distribution")
}

/// Writes every table of `result` into `dir` as `<prefix>_series.*` and
/// `<prefix>_p<p>_distribution.*`; returns the written paths.
pub fn write_result(
    prefix: &str,
    result: &ExperimentResult,
    dir: &Path,
    formats: &[OutputFormat],
) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for fmt in formats {
        for (p, d) in &result.distributions {
            let table = ResultTable::Distribution(d.clone());
            let stem = distribution_stem(prefix, *p);
            let path = match fmt {
                OutputFormat::Csv => {
                    let path = dir.join(format!("{stem}.csv"));
                    emit_csv(&table, &path)?;
                    path
                }
                OutputFormat::Svg => {
                    let path = dir.join(format!("{stem}.svg"));
                    emit_svg(&table, PlotKind::Heatmap, &path)?;
                    path
                }
            };
            written.push(path);
        }
        if !result.series.is_empty() {
            let table = result.series_table();
            let path = match fmt {
                OutputFormat::Csv => {
                    let path = dir.join(format!("{prefix}_series.csv"));
                    emit_csv(&table, &path)?;
                    path
                }
                OutputFormat::Svg => {
                    let path = dir.join(format!("{prefix}_series.svg"));
                    emit_svg(&table, PlotKind::Lines, &path)?;
                    path
                }
            };
            written.push(path);
        }
    }
    Ok(written)
}

/// Writes every run of a preset, plus `<name>_series.svg` overlaying the
/// series of all runs when SVG output is requested.
pub fn write_preset(
    name: &str,
    results: &[(String, ExperimentResult)],
    dir: &Path,
    formats: &[OutputFormat],
) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    for (label, result) in results {
        written.extend(write_result(
            &format!("{name}_{label}"),
            result,
            dir,
            formats,
        )?);
    }
    let lines: Vec<LineSeries> = results
        .iter()
        .flat_map(|(label, r)| lines_from_rows(&r.series, label))
        .collect();
    if formats.contains(&OutputFormat::Svg) && !lines.is_empty() {
        let path = dir.join(format!("{name}_series.svg"));
        fs::write(&path, render_lines(&lines, "step", "value"))?;
        written.push(path);
    }
    Ok(written)
}

const MARGIN: f64 = 50.0;
const PLOT: f64 = 400.0;

/// Square heatmap of a distribution; darker cells carry more probability.
pub fn render_heatmap(d: &Distribution) -> String {
    let l = 2 * d.steps() + 1;
    let t = d.steps() as i64;
    let cell = PLOT / l as f64;
    let max = d.iter().map(|(_, _, p)| p).fold(0.0, f64::max);
    let size = PLOT + 2.0 * MARGIN;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">"#
    );
    let _ = writeln!(s, r#"<rect width="{size}" height="{size}" fill="white"/>"#);
    for (x, y, p) in d.iter() {
        let level = if max > 0.0 {
            (p / max).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let gray = (255.0 * (1.0 - level)).round() as u8;
        let cx = MARGIN + (x + t) as f64 * cell;
        // y grows upwards
        let cy = MARGIN + (t - y) as f64 * cell;
        let _ = writeln!(
            s,
            r#"<rect x="{cx:.3}" y="{cy:.3}" width="{cell:.3}" height="{cell:.3}" fill="rgb({gray},{gray},{gray})"/>"#
        );
    }
    let _ = writeln!(
        s,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{PLOT}" height="{PLOT}" fill="none" stroke="black"/>"#
    );
    for (v, frac) in [(-t, 0.0), (0, 0.5), (t, 1.0)] {
        let px = MARGIN + cell / 2.0 + frac * (PLOT - cell);
        let py = MARGIN + cell / 2.0 + (1.0 - frac) * (PLOT - cell);
        let _ = writeln!(
            s,
            r#"<text x="{px:.3}" y="{:.3}" font-size="12" text-anchor="middle">{v}</text>"#,
            MARGIN + PLOT + 16.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.3}" y="{py:.3}" font-size="12" text-anchor="end">{v}</text>"#,
            MARGIN - 6.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.3}" y="{:.3}" font-size="14" text-anchor="middle">x</text>"#,
        MARGIN + PLOT / 2.0,
        size - 8.0
    );
    let _ = writeln!(
        s,
        r#"<text x="14" y="{:.3}" font-size="14" text-anchor="middle">y</text>"#,
        MARGIN + PLOT / 2.0
    );
    s.push_str("</svg>\n");
    s
}

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#7f7f7f",
];

/// Line plot with axes, ticks and a legend naming every series.
pub fn render_lines(series: &[LineSeries], x_label: &str, y_label: &str) -> String {
    let pts = series.iter().flat_map(|s| s.points.iter());
    let (mut x_max, mut y_min, mut y_max) = (1.0f64, 0.0f64, 0.0f64);
    for &(x, y) in pts {
        x_max = x_max.max(x);
        y_min = y_min.min(y);
        y_max = y_max.max(y);
    }
    if y_max - y_min < 1e-12 {
        y_max = y_min + 1.0;
    }
    let legend_h = 18.0 * series.len() as f64;
    let width = PLOT + 2.0 * MARGIN + 160.0;
    let height = (PLOT + 2.0 * MARGIN).max(legend_h + 2.0 * MARGIN);
    let px = |x: f64| MARGIN + x / x_max * PLOT;
    let py = |y: f64| MARGIN + (1.0 - (y - y_min) / (y_max - y_min)) * PLOT;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    );
    let _ = writeln!(
        s,
        r#"<rect width="{width}" height="{height}" fill="white"/>"#
    );
    let _ = writeln!(
        s,
        r#"<path d="M{MARGIN} {MARGIN} V{b} H{r}" fill="none" stroke="black"/>"#,
        b = MARGIN + PLOT,
        r = MARGIN + PLOT
    );
    for i in 0..=4 {
        let xv = x_max * i as f64 / 4.0;
        let yv = y_min + (y_max - y_min) * i as f64 / 4.0;
        let _ = writeln!(
            s,
            r#"<text x="{:.3}" y="{:.3}" font-size="12" text-anchor="middle">{}</text>"#,
            px(xv),
            MARGIN + PLOT + 16.0,
            format_tick(xv)
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.3}" y="{:.3}" font-size="12" text-anchor="end">{}</text>"#,
            MARGIN - 6.0,
            py(yv) + 4.0,
            format_tick(yv)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.3}" y="{:.3}" font-size="14" text-anchor="middle">{x_label}</text>"#,
        MARGIN + PLOT / 2.0,
        MARGIN + PLOT + 36.0
    );
    let _ = writeln!(
        s,
        r#"<text x="14" y="{:.3}" font-size="14" text-anchor="middle" transform="rotate(-90 14 {:.3})">{y_label}</text>"#,
        MARGIN + PLOT / 2.0,
        MARGIN + PLOT / 2.0
    );
    for (i, line) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let coords: Vec<String> = line
            .points
            .iter()
            .map(|&(x, y)| format!("{:.3},{:.3}", px(x), py(y)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
            coords.join(" ")
        );
        let ly = MARGIN + 18.0 * i as f64;
        let lx = MARGIN + PLOT + 16.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#,
            lx + 20.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" font-size="12">{}</text>"#,
            lx + 26.0,
            ly + 4.0,
            escape(&line.label)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn format_tick(v: f64) -> String {
    let r = format!("{v:.2}");
    r.trim_end_matches('0').trim_end_matches('.').to_string()
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::Measure;
    use crate::walk::{initial_state, InitialCoinState, WalkScheme};

    #[test]
    fn value_formatting() {
        assert_eq!(format_value(1.0), "1.000000000000");
        assert_eq!(format_value(0.0), "0.000000000000");
        assert_eq!(format_value(0.25), "0.250000000000");
        assert_eq!(format_value(0.0123456789012345), "1.234567890123e-2");
    }

    #[test]
    fn point_mass_csv() {
        let s = WalkScheme::grover();
        let d = initial_state(&s, &InitialCoinState::GroverSymmetric, 0)
            .unwrap()
            .distribution();
        let mut buf = Vec::new();
        write_csv(&ResultTable::Distribution(d), &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "x,y,p\n0,0,1.000000000000\n"
        );
    }

    #[test]
    fn series_csv_has_empty_cells() {
        let rows = vec![
            SeriesRow {
                step: 0,
                p: 0.2,
                measure: Measure::Robustness,
                value: None,
            },
            SeriesRow {
                step: 1,
                p: 0.2,
                measure: Measure::Robustness,
                value: Some(0.5),
            },
        ];
        let mut buf = Vec::new();
        write_csv(&ResultTable::Series(rows), &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "step,p,measure,value\n0,0.2,robustness,\n1,0.2,robustness,0.500000000000\n"
        );
    }

    #[test]
    fn point_mass_heatmap_has_one_dark_cell() {
        let s = WalkScheme::grover();
        let d = initial_state(&s, &InitialCoinState::GroverSymmetric, 2)
            .unwrap()
            .distribution();
        let svg = render_heatmap(&d);
        assert_eq!(svg.matches("rgb(0,0,0)").count(), 1);
        assert_eq!(svg.matches("rgb(255,255,255)").count(), 24);
        // the dark cell is the centre of the 5×5 grid
        let cell = PLOT / 5.0;
        let centre = format!(
            r#"x="{:.3}" y="{:.3}""#,
            MARGIN + 2.0 * cell,
            MARGIN + 2.0 * cell
        );
        let dark = svg.lines().find(|l| l.contains("rgb(0,0,0)")).unwrap();
        assert!(dark.contains(&centre));
    }

    #[test]
    fn coincident_lines_keep_both_legend_entries() {
        let pts = vec![(0.0, 0.1), (1.0, 0.4)];
        let series = vec![
            LineSeries {
                label: "alternate".into(),
                points: pts.clone(),
            },
            LineSeries {
                label: "pauli".into(),
                points: pts,
            },
        ];
        let svg = render_lines(&series, "step", "q");
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains(">alternate<") && svg.contains(">pauli<"));
        let polys: Vec<&str> = svg.lines().filter(|l| l.contains("<polyline")).collect();
        let coords = |l: &str| l.split('"').nth(1).unwrap().to_string();
        assert_eq!(coords(polys[0]), coords(polys[1]));
    }

    #[test]
    fn kind_mismatch() {
        let dir = tempfile::tempdir().unwrap();
        let err = emit_svg(
            &ResultTable::Series(vec![]),
            PlotKind::Heatmap,
            &dir.path().join("a.svg"),
        );
        assert!(matches!(err, Err(Error::InvalidArgument(_))));
    }
}
