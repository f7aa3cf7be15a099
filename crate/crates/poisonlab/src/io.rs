//! CSV and JSON serialization for matrices, vectors and task bundles.
//! CSV grids are one row per line with `,` separators; numbers are written
//! with Rust's shortest round-trip formatting so re-parsing is exact.

use crate::datagen::RegressionTask;
use crate::error::{Error, Result};
use crate::linalg::{lstsq, lu_solve, Mat, Vect};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::Path;

pub fn mat_to_csv(a: &Mat) -> String {
    let mut out = String::new();
    for i in 0..a.rows() {
        let row = a.row(i);
        for (j, v) in row.iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            let _ = write!(out, "{v}");
        }
        out.push('\n');
    }
    out
}

pub fn mat_from_csv(text: &str) -> Result<Mat> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row: Vec<f64> = line
            .split(',')
            .map(|tok| {
                tok.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))
            })
            .collect::<Result<_>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Parse("empty CSV".into()));
    }
    let cols = rows[0].len();
    if rows.iter().any(|r| r.len() != cols) {
        return Err(Error::Parse("ragged CSV rows".into()));
    }
    let data: Vec<f64> = rows.into_iter().flatten().collect();
    Mat::new(data.len() / cols, cols, data)
}

pub fn vect_to_csv(v: &Vect) -> String {
    let mut out = String::new();
    for x in v.data() {
        let _ = writeln!(out, "{x}");
    }
    out
}

pub fn vect_from_csv(text: &str) -> Result<Vect> {
    let data: Vec<f64> = text
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| l.trim().parse::<f64>().map_err(|e| Error::Parse(e.to_string())))
        .collect::<Result<_>>()?;
    Vect::new(data)
}

/// JSON object form: `{ "rows": n, "cols": d, "data": [row-major] }`.
#[derive(Debug, Serialize, Deserialize)]
pub struct MatJson {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

pub fn mat_to_json(a: &Mat) -> String {
    serde_json::to_string(&MatJson { rows: a.rows(), cols: a.cols(), data: a.data().to_vec() })
        .expect("matrix serializes")
}

pub fn mat_from_json(text: &str) -> Result<Mat> {
    let m: MatJson = serde_json::from_str(text)?;
    Mat::new(m.rows, m.cols, m.data)
}

/// Metadata written alongside a task bundle.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TaskMeta {
    pub generator: String,
    pub seed: u64,
    pub n_train: usize,
    pub n_test: usize,
    pub d: usize,
    pub params: serde_json::Value,
}

/// Write a task bundle directory: x_train.csv, y_train.csv, x_test.csv,
/// y_test.csv and meta.json.
pub fn write_task_bundle(dir: &Path, task: &RegressionTask, meta: &TaskMeta) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("x_train.csv"), mat_to_csv(&task.x_train))?;
    std::fs::write(dir.join("y_train.csv"), vect_to_csv(&task.y_train))?;
    std::fs::write(dir.join("x_test.csv"), mat_to_csv(&task.x_test))?;
    std::fs::write(dir.join("y_test.csv"), vect_to_csv(&task.y_test))?;
    std::fs::write(dir.join("meta.json"), serde_json::to_string_pretty(meta)?)?;
    Ok(())
}

/// Load a task bundle; w_ref is recomputed according to the generator
/// (least squares for dense tasks, exact solve for square ones).
pub fn read_task_bundle(dir: &Path) -> Result<(RegressionTask, TaskMeta)> {
    let meta: TaskMeta = serde_json::from_str(&std::fs::read_to_string(dir.join("meta.json"))?)?;
    let x_train = mat_from_csv(&std::fs::read_to_string(dir.join("x_train.csv"))?)?;
    let y_train = vect_from_csv(&std::fs::read_to_string(dir.join("y_train.csv"))?)?;
    let x_test = mat_from_csv(&std::fs::read_to_string(dir.join("x_test.csv"))?)?;
    let y_test = vect_from_csv(&std::fs::read_to_string(dir.join("y_test.csv"))?)?;
    let w_ref = if x_train.is_square() && meta.generator == "sdd" {
        lu_solve(&x_train, &y_train)?
    } else {
        lstsq(&x_train, &y_train)?
    };
    Ok((RegressionTask { x_train, y_train, x_test, y_test, w_ref }, meta))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip_exact() {
        let a = Mat::from_rows(&[&[1.0 / 3.0, -2.5e-17], &[7.1, 0.1 + 0.2]]).unwrap();
        let b = mat_from_csv(&mat_to_csv(&a)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn json_round_trip_exact() {
        let a = Mat::from_rows(&[&[std::f64::consts::PI, 1e-300], &[-4.0, 2.0]]).unwrap();
        let b = mat_from_json(&mat_to_json(&a)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn vect_round_trip() {
        let v = Vect::from(vec![0.1, -1.0 / 7.0, 3e22]);
        assert_eq!(v, vect_from_csv(&vect_to_csv(&v)).unwrap());
    }

    #[test]
    fn bad_csv_rejected() {
        assert!(mat_from_csv("1,2\n3").is_err());
        assert!(mat_from_csv("1,x\n").is_err());
        assert!(mat_from_csv("").is_err());
    }
}
