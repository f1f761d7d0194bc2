//! Static SVG plots for the CSVs written by the other subcommands.

use plotters::prelude::*;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::CliError;

pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn read(path: &Path) -> Result<Self, CliError> {
        let mut r = csv::Reader::from_path(path)
            .map_err(|e| CliError::Report(format!("{}: {e}", path.display())))?;
        let header = r
            .headers()
            .map_err(|e| CliError::Report(format!("{}: {e}", path.display())))?
            .iter()
            .map(str::to_string)
            .collect();
        let rows = r
            .records()
            .map(|rec| rec.map(|rec| rec.iter().map(str::to_string).collect()))
            .collect::<Result<_, _>>()
            .map_err(|e| CliError::Report(format!("{}: {e}", path.display())))?;
        Ok(Self { header, rows })
    }

    fn index(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    fn number(&self, row: &[String], col: usize) -> f64 {
        row.get(col)
            .and_then(|v| v.parse().ok())
            .unwrap_or(f64::NAN)
    }

    /// `(x, y)` pairs grouped by the `key` column, groups in sorted order.
    fn grouped(&self, key: &str, x: &str, y: &str) -> Option<Series> {
        let (k, xi, yi) = (self.index(key)?, self.index(x)?, self.index(y)?);
        let mut groups: BTreeMap<String, Vec<(f64, f64)>> = BTreeMap::new();
        for row in &self.rows {
            let p = (self.number(row, xi), self.number(row, yi));
            groups.entry(row[k].clone()).or_default().push(p);
        }
        Some(groups.into_iter().collect())
    }
}

type Series = Vec<(String, Vec<(f64, f64)>)>;

fn log10_series(series: Series) -> Series {
    series
        .into_iter()
        .map(|(name, pts)| {
            let pts = pts
                .into_iter()
                .filter(|&(x, y)| x > 0.0 && y > 0.0)
                .map(|(x, y)| (x.log10(), y.log10()))
                .collect();
            (name, pts)
        })
        .collect()
}

fn bounds(series: &Series) -> Option<((f64, f64), (f64, f64))> {
    let pts: Vec<(f64, f64)> = series
        .iter()
        .flat_map(|s| s.1.iter().copied())
        .filter(|p| p.0.is_finite() && p.1.is_finite())
        .collect();
    if pts.is_empty() {
        return None;
    }
    let fold = |f: fn(&(f64, f64)) -> f64| {
        let lo = pts.iter().map(f).fold(f64::INFINITY, f64::min);
        let hi = pts.iter().map(f).fold(f64::NEG_INFINITY, f64::max);
        let pad = if hi > lo { 0.05 * (hi - lo) } else { 0.5 };
        (lo - pad, hi + pad)
    };
    Some((fold(|p| p.0), fold(|p| p.1)))
}

fn draw(
    path: &Path,
    title: &str,
    x_label: &str,
    y_label: &str,
    series: &Series,
) -> Result<bool, CliError> {
    let Some(((x0, x1), (y0, y1))) = bounds(series) else {
        return Ok(false);
    };
    let err = |e: &dyn std::fmt::Display| CliError::Report(format!("{}: {e}", path.display()));
    let root = SVGBackend::new(path, (720, 480)).into_drawing_area();
    root.fill(&WHITE).map_err(|e| err(&e))?;
    let mut chart = ChartBuilder::on(&root)
        .caption(title, ("sans-serif", 20))
        .margin(12)
        .x_label_area_size(36)
        .y_label_area_size(56)
        .build_cartesian_2d(x0..x1, y0..y1)
        .map_err(|e| err(&e))?;
    chart
        .configure_mesh()
        .x_desc(x_label)
        .y_desc(y_label)
        .draw()
        .map_err(|e| err(&e))?;
    for (i, (name, pts)) in series.iter().enumerate() {
        let color = Palette99::pick(i).to_rgba();
        let pts: Vec<(f64, f64)> = pts
            .iter()
            .copied()
            .filter(|p| p.0.is_finite() && p.1.is_finite())
            .collect();
        chart
            .draw_series(LineSeries::new(pts.clone(), color.stroke_width(2)))
            .map_err(|e| err(&e))?
            .label(name.as_str())
            .legend(move |(x, y)| {
                PathElement::new(vec![(x, y), (x + 16, y)], color.stroke_width(2))
            });
        chart
            .draw_series(pts.into_iter().map(|p| Circle::new(p, 3, color.filled())))
            .map_err(|e| err(&e))?;
    }
    chart
        .configure_series_labels()
        .background_style(WHITE.mix(0.8))
        .border_style(BLACK)
        .draw()
        .map_err(|e| err(&e))?;
    root.present().map_err(|e| err(&e))?;
    Ok(true)
}

/// Writes `<stem>.svg` next to the CSV when its layout is recognised.
pub fn plot_table(csv_path: &Path, table: &Table) -> Result<Option<PathBuf>, CliError> {
    let stem = csv_path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let svg = csv_path.with_extension("svg");
    let drawn = if stem == "convergence" {
        let Some(series) = table.grouped("t", "eps", "hs_diff") else {
            return Ok(None);
        };
        let series = log10_series(
            series
                .into_iter()
                .map(|(t, p)| (format!("t = {t}"), p))
                .collect(),
        );
        draw(
            &svg,
            "difference norm against eps",
            "log10 eps",
            "log10 H^s difference",
            &series,
        )?
    } else if stem.starts_with("kernel_") {
        let Some(series) = table.grouped("family_id", "beta", "ratio") else {
            return Ok(None);
        };
        draw(
            &svg,
            &format!("{stem}: ratio against beta"),
            "beta",
            "ratio",
            &series,
        )?
    } else if stem == "diagnostics" {
        let Some(t) = table.index("t") else {
            return Ok(None);
        };
        let series = table
            .header
            .iter()
            .enumerate()
            .filter(|(_, h)| h.starts_with('l') || h.starts_with("hs_"))
            .map(|(c, h)| {
                let first = table
                    .rows
                    .first()
                    .map(|r| table.number(r, c))
                    .unwrap_or(f64::NAN);
                let pts = table
                    .rows
                    .iter()
                    .map(|r| (table.number(r, t), table.number(r, c) / first - 1.0))
                    .collect();
                (h.clone(), pts)
            })
            .collect();
        draw(
            &svg,
            "relative drift of norms",
            "t",
            "relative drift",
            &series,
        )?
    } else {
        false
    };
    Ok(drawn.then_some(svg))
}
