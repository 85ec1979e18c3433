use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::experiment::ExperimentReport;
use super::HarnessError;
use crate::geometry::{ConvexBody, Shape};
use crate::samplers::Algorithm;

pub const METRICS_HEADER: &str = "algo,seed,n,N,h,lambda,w1,w2,grad_evals,wall_ms";

fn io_err(path: &Path, e: std::io::Error) -> HarnessError {
    HarnessError::Io(format!("{}: {e}", path.display()))
}

fn write_file(path: &Path, content: &str) -> Result<(), HarnessError> {
    fs::write(path, content).map_err(|e| io_err(path, e))
}

/// Header `x1,...,xp` then one row per point; `{}` formatting round-trips `f64`.
pub fn samples_csv(points: &[Vec<f64>]) -> String {
    let dim = points.first().map_or(0, Vec::len);
    let mut out = (1..=dim).map(|i| format!("x{i}")).collect::<Vec<_>>().join(",");
    out.push('\n');
    for p in points {
        let row: Vec<String> = p.iter().map(|x| x.to_string()).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn read_samples_csv(text: &str) -> Result<Vec<Vec<f64>>, HarnessError> {
    let mut lines = text.lines();
    let header = lines.next().unwrap_or_default();
    let dim = header.split(',').filter(|s| !s.is_empty()).count();
    lines
        .filter(|l| !l.is_empty())
        .enumerate()
        .map(|(i, l)| {
            let row: Result<Vec<f64>, _> = l.split(',').map(str::parse::<f64>).collect();
            match row {
                Ok(r) if r.len() == dim => Ok(r),
                _ => Err(HarnessError::Parse {
                    origin: "samples csv".into(),
                    message: format!("line {}: expected {dim} numbers", i + 2),
                }),
            }
        })
        .collect()
}

pub fn metrics_csv(report: &ExperimentReport) -> String {
    let mut out = String::from(METRICS_HEADER);
    out.push('\n');
    for r in &report.runs {
        let wall = if report.config.record_wall_time {
            format!("{:.3}", r.wall_ms)
        } else {
            String::new()
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            r.algo, r.seed, r.n, r.samples, r.h, r.lambda, r.w1, r.w2, r.grad_evals, wall
        );
    }
    out
}

#[derive(Serialize)]
struct JsonReport<'a> {
    #[serde(flatten)]
    report: &'a ExperimentReport,
    aggregates: std::collections::BTreeMap<String, std::collections::BTreeMap<&'static str, f64>>,
}

struct Frame {
    min: [f64; 2],
    scale: f64,
    size: f64,
}

impl Frame {
    fn map(&self, p: [f64; 2]) -> (f64, f64) {
        let pad = 20.0;
        (
            pad + (p[0] - self.min[0]) * self.scale,
            self.size - pad - (p[1] - self.min[1]) * self.scale,
        )
    }
}

/// Scatter plot of the first two coordinates with the body boundary dashed.
/// Balls are drawn as one circle, polygons as one path per edge.
pub fn scatter_svg(body: &ConvexBody, samples: &[Vec<f64>], title: &str) -> String {
    let size = 480.0;
    let reach = 1.5 * body.outer_radius();
    let frame = Frame {
        min: [-reach, -reach],
        scale: (size - 40.0) / (2.0 * reach),
        size,
    };
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">"#
    );
    let _ = writeln!(out, r#"<title>{title}</title>"#);
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for p in samples.iter().filter(|p| p.len() >= 2) {
        let (x, y) = frame.map([p[0], p[1]]);
        let _ = writeln!(out, r#"<circle class="sample" cx="{x:.2}" cy="{y:.2}" r="1.5" fill="steelblue"/>"#);
    }
    let style = r#"fill="none" stroke="red" stroke-width="1.5" stroke-dasharray="6,4""#;
    if body.dim() == 2 {
        match body.shape() {
            Shape::Ball { center, radius } => {
                let (x, y) = frame.map([center[0], center[1]]);
                let r = radius * frame.scale;
                let _ = writeln!(out, r#"<circle class="boundary" cx="{x:.2}" cy="{y:.2}" r="{r:.2}" {style}/>"#);
            }
            _ => {
                if let Some(v) = body.polygon_vertices() {
                    for i in 0..v.len() {
                        let (x0, y0) = frame.map(v[i]);
                        let (x1, y1) = frame.map(v[(i + 1) % v.len()]);
                        let _ = writeln!(
                            out,
                            r#"<path class="boundary" d="M {x0:.2} {y0:.2} L {x1:.2} {y1:.2}" {style}/>"#
                        );
                    }
                }
            }
        }
    }
    out.push_str("</svg>\n");
    out
}

/// Writes samples, metrics, the JSON report and optional scatter plots into
/// `dir`, returning the paths written.
pub fn write_outputs(report: &ExperimentReport, body: &ConvexBody, dir: &Path) -> Result<Vec<PathBuf>, HarnessError> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let mut written = Vec::new();
    for r in &report.runs {
        let path = dir.join(format!("samples_{}_{}.csv", r.algo, r.seed));
        write_file(&path, &samples_csv(&r.final_positions))?;
        written.push(path);
    }
    let path = dir.join("metrics.csv");
    write_file(&path, &metrics_csv(report))?;
    written.push(path);
    let json = JsonReport {
        report,
        aggregates: report.aggregates(),
    };
    let path = dir.join("report.json");
    let text = serde_json::to_string_pretty(&json).map_err(|e| HarnessError::Io(e.to_string()))?;
    write_file(&path, &text)?;
    written.push(path);
    if report.config.emit_svg {
        for algo in report.config.algorithms.iter().copied() {
            let points: Vec<Vec<f64>> = report
                .runs
                .iter()
                .filter(|r| r.algo == algo)
                .take(1)
                .flat_map(|r| r.final_positions.iter().cloned())
                .collect();
            if points.is_empty() {
                continue;
            }
            let path = dir.join(format!("scatter_{algo}.svg"));
            write_file(&path, &scatter_svg(body, &points, &algo_title(algo)))?;
            written.push(path);
        }
    }
    Ok(written)
}

fn algo_title(algo: Algorithm) -> String {
    algo.name().to_uppercase()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn samples_round_trip_bit_exact() {
        let pts = vec![vec![0.1 + 0.2, -1e-300], vec![std::f64::consts::PI, 123456.789e10]];
        let back = read_samples_csv(&samples_csv(&pts)).unwrap();
        assert_eq!(back, pts);
    }

    #[test]
    fn svg_boundary_segments() {
        let ball = ConvexBody::centered_ball(2, 0.5).unwrap();
        let svg = scatter_svg(&ball, &[vec![0.0, 0.1]], "t");
        assert_eq!(svg.matches(r#"class="boundary""#).count(), 1);
        assert!(svg.contains("<circle class=\"boundary\""));
        let tri = scatter_svg(&ConvexBody::shifted_simplex(), &[], "t");
        assert_eq!(tri.matches(r#"<path class="boundary""#).count(), 3);
        assert!(tri.contains("stroke-dasharray"));
    }
}
