//! CSV reading and writing. All doubles are written with Rust's shortest
//! round-trip formatting, so CSV -> parse -> CSV is byte-stable.

use eps2_core::cloud::WeightedCloud;
use eps2_core::geom::Point;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("cannot read {0}: {1}")]
    Read(String, std::io::Error),
    #[error("cannot write {0}: {1}")]
    Write(String, std::io::Error),
    #[error("{file}:{line}: {message}")]
    Malformed { file: String, line: usize, message: String },
}

pub fn fmt_f64(v: f64) -> String {
    // Rust's Display for f64 is the shortest decimal that round-trips
    format!("{v}")
}

pub fn write_csv(path: &Path, header: &str, rows: &[Vec<String>]) -> Result<(), IoError> {
    let mut text = String::from(header);
    text.push('\n');
    for row in rows {
        text.push_str(&row.join(","));
        text.push('\n');
    }
    std::fs::write(path, text).map_err(|e| IoError::Write(path.display().to_string(), e))
}

fn read_rows(path: &Path, cols: usize) -> Result<Vec<Vec<f64>>, IoError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| IoError::Read(path.display().to_string(), e))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        // a non-numeric first field marks the header line
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if i == 0 && fields[0].parse::<f64>().is_err() {
            continue;
        }
        if fields.len() != cols {
            return Err(IoError::Malformed {
                file: path.display().to_string(),
                line: i + 1,
                message: format!("expected {cols} columns, got {}", fields.len()),
            });
        }
        let mut row = Vec::with_capacity(cols);
        for f in fields {
            row.push(f.parse::<f64>().map_err(|e| IoError::Malformed {
                file: path.display().to_string(),
                line: i + 1,
                message: format!("bad number `{f}`: {e}"),
            })?);
        }
        out.push(row);
    }
    Ok(out)
}

/// Cloud CSV: columns x1..xd, weight.
pub fn read_cloud(path: &Path, dim: usize) -> Result<WeightedCloud, IoError> {
    let rows = read_rows(path, dim + 1)?;
    let mut pts: Vec<Point> = Vec::with_capacity(rows.len());
    let mut ws = Vec::with_capacity(rows.len());
    for row in rows {
        let mut p = [0.0; 3];
        p[..dim].copy_from_slice(&row[..dim]);
        pts.push(p);
        ws.push(row[dim]);
    }
    // accept any cloud; record its tightest admissible growth constant
    let mut cloud = WeightedCloud::new(dim, pts, ws, f64::MAX).map_err(|e| IoError::Malformed {
        file: path.display().to_string(),
        line: 0,
        message: e.to_string(),
    })?;
    cloud.growth_const = cloud.minimal_growth_const();
    Ok(cloud)
}

/// Net CSV: columns x1..xd.
pub fn read_net(path: &Path, dim: usize) -> Result<Vec<Point>, IoError> {
    let rows = read_rows(path, dim)?;
    Ok(rows
        .into_iter()
        .map(|row| {
            let mut p = [0.0; 3];
            p[..dim].copy_from_slice(&row[..dim]);
            p
        })
        .collect())
}

/// Weighted-point CSV: columns x, y, z, weight.
pub fn read_weighted_points(path: &Path) -> Result<Vec<(Point, f64)>, IoError> {
    let rows = read_rows(path, 4)?;
    Ok(rows
        .into_iter()
        .map(|row| ([row[0], row[1], row[2]], row[3]))
        .collect())
}

/// Function CSV: columns x, value, on a uniform grid.
pub fn read_grid_function(path: &Path) -> Result<eps2_core::fourier::GridFunction, IoError> {
    let rows = read_rows(path, 2)?;
    let bad = |message: String| IoError::Malformed {
        file: path.display().to_string(),
        line: 0,
        message,
    };
    if rows.len() < 16 {
        return Err(bad("need at least 16 samples".into()));
    }
    let dx = rows[1][0] - rows[0][0];
    for w in rows.windows(2) {
        if ((w[1][0] - w[0][0]) - dx).abs() > 1e-9 * dx.abs() {
            return Err(bad("grid spacing is not uniform".into()));
        }
    }
    eps2_core::fourier::GridFunction::new(rows[0][0], dx, rows.iter().map(|r| r[1]).collect())
        .map_err(|e| bad(e.to_string()))
}
