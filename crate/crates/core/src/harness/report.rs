use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

use super::covariance::CovarianceEstimate;
use super::experiments::CltReport;
use super::replicates::SampleMatrix;
use crate::error::{Error, Result};
use crate::fmt17;

const HISTOGRAM_BINS: usize = 30;

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| Error::io(path, e))
}

fn finish(mut w: BufWriter<File>, path: &Path) -> Result<()> {
    w.flush().map_err(|e| Error::io(path, e))
}

fn csv_writer(path: &Path) -> Result<csv::Writer<BufWriter<File>>> {
    Ok(csv::Writer::from_writer(create(path)?))
}

fn close_csv(w: csv::Writer<BufWriter<File>>, path: &Path) -> Result<()> {
    let inner = w.into_inner().map_err(|e| Error::io(path, e.into_error()))?;
    finish(inner, path)
}

pub fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w).map_err(|e| Error::io(path, e))?;
    finish(w, path)
}

/// One row per `(scale, i, j)`.
pub fn write_covariance_csv(estimates: &[(f64, &CovarianceEstimate)], path: &Path) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["scale", "i", "j", "label_i", "label_j", "covariance", "se"])?;
    for (scale, e) in estimates {
        for i in 0..e.dim() {
            for j in 0..e.dim() {
                w.write_record([
                    fmt17(*scale),
                    i.to_string(),
                    j.to_string(),
                    e.labels[i].clone(),
                    e.labels[j].clone(),
                    fmt17(e.cov[i][j]),
                    fmt17(e.se[i][j]),
                ])?;
            }
        }
    }
    close_csv(w, path)
}

pub fn write_samples_csv(m: &SampleMatrix, path: &Path) -> Result<()> {
    let mut w = create(path)?;
    m.write_csv(&mut w)?;
    finish(w, path)
}

/// Equal-width bins over each column's range.
pub fn write_histogram_csv(m: &SampleMatrix, path: &Path) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["column", "bin_lo", "bin_hi", "count"])?;
    for j in 0..m.columns() {
        let col = m.column(j);
        let lo = col.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = col.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let width = if hi > lo { (hi - lo) / HISTOGRAM_BINS as f64 } else { 1.0 };
        let mut counts = [0usize; HISTOGRAM_BINS];
        for v in &col {
            counts[(((v - lo) / width) as usize).min(HISTOGRAM_BINS - 1)] += 1;
        }
        for (b, c) in counts.iter().enumerate() {
            let a = lo + b as f64 * width;
            w.write_record([m.labels[j].clone(), fmt17(a), fmt17(a + width), c.to_string()])?;
        }
    }
    close_csv(w, path)
}

/// Standardized order statistics against normal quantiles `Phi^-1((i + 0.5) / n)`.
pub fn qq_points(values: &[f64]) -> Vec<(f64, f64)> {
    let n = values.len();
    if n < 2 {
        return Vec::new();
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let sd = (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt();
    let mut z: Vec<f64> = values.iter().map(|v| if sd > 0.0 { (v - mean) / sd } else { 0.0 }).collect();
    z.sort_by(f64::total_cmp);
    let normal = Normal::standard();
    z.into_iter().enumerate().map(|(i, s)| (normal.inverse_cdf((i as f64 + 0.5) / n as f64), s)).collect()
}

pub fn write_qq_csv(m: &SampleMatrix, path: &Path) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["column", "theoretical", "sample"])?;
    for j in 0..m.columns() {
        for (t, s) in qq_points(&m.column(j)) {
            w.write_record([m.labels[j].clone(), fmt17(t), fmt17(s)])?;
        }
    }
    close_csv(w, path)
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// QQ plot of every column as an SVG document.
pub fn qq_svg(m: &SampleMatrix) -> String {
    const SIZE: f64 = 400.0;
    const PAD: f64 = 40.0;
    const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];
    let series: Vec<Vec<(f64, f64)>> = (0..m.columns()).map(|j| qq_points(&m.column(j))).collect();
    let bound = series.iter().flatten().fold(3.0f64, |b, (t, s)| b.max(t.abs()).max(s.abs()));
    let map = |v: f64| PAD + (v + bound) / (2.0 * bound) * (SIZE - 2.0 * PAD);
    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#);
    let _ = writeln!(out, r#"<rect x="0" y="0" width="{SIZE}" height="{SIZE}" fill="white"/>"#);
    let (a, b) = (map(-bound), map(bound));
    let _ = writeln!(out, r##"<line x1="{a:.2}" y1="{b:.2}" x2="{b:.2}" y2="{a:.2}" stroke="#999999" stroke-dasharray="4 3"/>"##);
    for (j, pts) in series.iter().enumerate() {
        let color = COLORS[j % COLORS.len()];
        let _ = writeln!(out, r#"<g fill="{color}"><title>{}</title>"#, xml_escape(&m.labels[j]));
        for (t, s) in pts {
            let _ = writeln!(out, r#"<circle cx="{:.2}" cy="{:.2}" r="1.5"/>"#, map(*t), SIZE - map(*s));
        }
        let _ = writeln!(out, "</g>");
    }
    let _ = writeln!(out, r#"<text x="{}" y="{}" font-size="12" text-anchor="middle">normal quantile</text>"#, SIZE / 2.0, SIZE - 8.0);
    let _ = writeln!(out, "</svg>");
    out
}

pub fn write_qq_svg(m: &SampleMatrix, path: &Path) -> Result<()> {
    fs::write(path, qq_svg(m)).map_err(|e| Error::io(path, e))
}

/// Histogram, QQ CSV and QQ SVG for one sample matrix; `tag` goes in the file names.
pub fn write_plot_data(m: &SampleMatrix, dir: &Path, tag: &str) -> Result<Vec<PathBuf>> {
    let files = [
        dir.join(format!("samples_{tag}.csv")),
        dir.join(format!("histogram_{tag}.csv")),
        dir.join(format!("qq_{tag}.csv")),
        dir.join(format!("qq_{tag}.svg")),
    ];
    write_samples_csv(m, &files[0])?;
    write_histogram_csv(m, &files[1])?;
    write_qq_csv(m, &files[2])?;
    write_qq_svg(m, &files[3])?;
    Ok(files.to_vec())
}

pub(crate) fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

/// Writes `report.json`, `covariance.csv`, `scaling.csv` (when several
/// scales ran) and per-scale sample and plot-data files into `dir`.
pub fn emit_report(report: &CltReport, matrices: &[SampleMatrix], dir: &Path) -> Result<Vec<PathBuf>> {
    ensure_dir(dir)?;
    let mut files = Vec::new();
    let json = dir.join("report.json");
    write_json(report, &json)?;
    files.push(json);
    let covs: Vec<(f64, &CovarianceEstimate)> = report.scales.iter().map(|s| (s.scale, &s.covariance)).collect();
    let cov_path = dir.join("covariance.csv");
    write_covariance_csv(&covs, &cov_path)?;
    files.push(cov_path);
    if let Some(s) = &report.scaling {
        let path = dir.join("scaling.csv");
        let pairs: Vec<(f64, &CovarianceEstimate)> = s.scales.iter().copied().zip(s.estimates.iter()).collect();
        write_covariance_csv(&pairs, &path)?;
        files.push(path);
    }
    for (k, m) in matrices.iter().enumerate() {
        files.extend(write_plot_data(m, dir, &k.to_string())?);
    }
    Ok(files)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functionals::FunctionalSpec;
    use crate::geometry::Region;
    use crate::harness::config::{ExperimentConfig, Mode};
    use crate::harness::experiments::clt_experiment;

    fn small_report() -> (CltReport, Vec<SampleMatrix>) {
        let mut c = ExperimentConfig::new(
            Mode::Poisson,
            Region::unit_cube(2),
            vec![Region::cuboid(&[0.0, 0.0], &[0.5, 1.0]).unwrap(), Region::unit_cube(2)],
            120,
            3,
        );
        c.functionals = vec![FunctionalSpec::point_count()];
        c.scales = vec![3.0, 4.0];
        clt_experiment(&c).unwrap()
    }

    #[test]
    fn json_round_trips() {
        let (r, m) = small_report();
        let dir = tempfile::tempdir().unwrap();
        emit_report(&r, &m, dir.path()).unwrap();
        let back: CltReport = serde_json::from_str(&fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
        assert_eq!(back.labels, r.labels);
        assert_eq!(back.scales.len(), r.scales.len());
        for (a, b) in back.scales.iter().zip(&r.scales) {
            assert_eq!(a.covariance.cov, b.covariance.cov);
            assert_eq!(a.normality, b.normality);
        }
        assert_eq!(back.criteria, r.criteria);
        assert_eq!(serde_json::to_value(&back).unwrap(), serde_json::to_value(&r).unwrap());
    }

    #[test]
    fn sample_csv_has_n_plus_header_rows() {
        let (r, m) = small_report();
        let dir = tempfile::tempdir().unwrap();
        emit_report(&r, &m, dir.path()).unwrap();
        let text = fs::read_to_string(dir.path().join("samples_0.csv")).unwrap();
        assert_eq!(text.lines().count(), 121);
        let mut rdr = csv::Reader::from_path(dir.path().join("histogram_1.csv")).unwrap();
        let total: usize = rdr.records().map(|r| r.unwrap()[3].parse::<usize>().unwrap()).sum();
        assert_eq!(total, 240);
    }

    #[test]
    fn svg_is_well_formed() {
        let (_, m) = small_report();
        let svg = qq_svg(&m[0]);
        let doc = roxmltree::Document::parse(&svg).unwrap();
        assert_eq!(doc.root_element().tag_name().name(), "svg");
        let circles = doc.descendants().filter(|n| n.has_tag_name("circle")).count();
        assert_eq!(circles, 2 * m[0].rows());
    }

    #[test]
    fn io_errors_carry_path() {
        let (r, m) = small_report();
        let dir = tempfile::tempdir().unwrap();
        let blocker = dir.path().join("file");
        fs::write(&blocker, "x").unwrap();
        let err = emit_report(&r, &m, &blocker.join("sub")).unwrap_err();
        assert!(err.to_string().contains("file"), "{err}");
    }
}
