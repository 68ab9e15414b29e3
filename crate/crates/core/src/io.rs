//! Distance-matrix CSV and point-cloud JSON.
//!
//! A distance matrix is `n` lines of `n` comma-separated decimals with no
//! header; row `i` holds the distances from point `i`. Values are written
//! with 17 significant digits so they read back bit-exactly.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::{FiniteMetricSpace, PointCloud};

/// Relative asymmetry accepted (and averaged away) when loading a matrix.
pub const SYMMETRY_TOL: f64 = 1e-12;

pub fn load_distance_matrix(path: impl AsRef<Path>) -> Result<FiniteMetricSpace> {
    let text = fs::read_to_string(path)?;
    parse_distance_matrix(&text)
}

pub fn parse_distance_matrix(text: &str) -> Result<FiniteMetricSpace> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            Error::Parse {
                line,
                column: 0,
                message: e.to_string(),
            }
        })?;
        let line = record.position().map_or(rows.len() + 1, |p| p.line() as usize);
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        let row = record
            .iter()
            .enumerate()
            .map(|(col, field)| {
                field.parse::<f64>().map_err(|e| Error::Parse {
                    line,
                    column: col + 1,
                    message: format!("{field:?}: {e}"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    let n = rows.len();
    if n == 0 {
        return Err(Error::EmptySpace);
    }
    for (row, r) in rows.iter().enumerate() {
        if r.len() != n {
            return Err(Error::NotSquare {
                row,
                len: r.len(),
                expected: n,
            });
        }
        if let Some(col) = r.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { row, col });
        }
    }
    for i in 0..n {
        if rows[i][i] != 0.0 {
            return Err(Error::NonzeroDiagonal { index: i });
        }
        for j in (i + 1)..n {
            let (a, b) = (rows[i][j], rows[j][i]);
            if (a - b).abs() > SYMMETRY_TOL * a.abs().max(b.abs()) {
                return Err(Error::AsymmetricInput { row: i, col: j });
            }
            let mean = (a + b) / 2.0;
            rows[i][j] = mean;
            rows[j][i] = mean;
        }
    }
    FiniteMetricSpace::from_rows(&rows, "csv")
}

pub fn format_distance_matrix(space: &FiniteMetricSpace) -> String {
    let mut out = String::new();
    for i in 0..space.n() {
        for (j, v) in space.row(i).iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            write!(out, "{v:.16e}").expect("writing to a String");
        }
        out.push('\n');
    }
    out
}

#[derive(Serialize, Deserialize)]
struct CloudFile {
    dim: usize,
    points: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
}

pub fn load_point_cloud(path: impl AsRef<Path>) -> Result<PointCloud> {
    let text = fs::read_to_string(path)?;
    parse_point_cloud(&text)
}

pub fn parse_point_cloud(text: &str) -> Result<PointCloud> {
    let file: CloudFile = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    PointCloud::new(file.dim, file.points, file.labels)
}

pub fn format_point_cloud(cloud: &PointCloud) -> String {
    let file = CloudFile {
        dim: cloud.dim(),
        points: cloud.points().to_vec(),
        labels: cloud.labels().map(<[String]>::to_vec),
    };
    let mut s = serde_json::to_string_pretty(&file).expect("cloud serializes");
    s.push('\n');
    s
}
