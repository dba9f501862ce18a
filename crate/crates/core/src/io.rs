//! CSV serialization of vertex fields.
//!
//! Format: header `x,y,value`, one row per vertex ordered y-major then x, every number
//! printed with 17 significant digits, LF line endings.

use std::io::{Read, Write};

use crate::dec::Grid2;
use crate::error::{Error, Result};

/// Formats a float with 17 significant digits (lossless for f64).
pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_vertex_csv<W: Write>(out: W, grid: &Grid2, values: &[f64]) -> Result<()> {
    if values.len() != grid.n_vertices() {
        return Err(Error::Shape(format!(
            "field has {} values, grid has {} vertices",
            values.len(),
            grid.n_vertices()
        )));
    }
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    let io = |e: csv::Error| Error::Evaluation(format!("csv write: {e}"));
    w.write_record(["x", "y", "value"]).map_err(io)?;
    for (v, val) in values.iter().enumerate() {
        let (x, y) = grid.vertex_xy(v);
        w.write_record([fmt17(x), fmt17(y), fmt17(*val)]).map_err(io)?;
    }
    w.flush()
        .map_err(|e| Error::Evaluation(format!("csv flush: {e}")))?;
    Ok(())
}

pub fn vertex_csv_string(grid: &Grid2, values: &[f64]) -> Result<String> {
    let mut buf = Vec::new();
    write_vertex_csv(&mut buf, grid, values)?;
    Ok(String::from_utf8(buf).expect("csv output is ascii"))
}

/// Reads `(x, y, value)` rows written by [`write_vertex_csv`].
pub fn read_vertex_csv<R: Read>(input: R) -> Result<Vec<(f64, f64, f64)>> {
    let mut r = csv::Reader::from_reader(input);
    let headers = r
        .headers()
        .map_err(|e| Error::Evaluation(format!("csv header: {e}")))?
        .clone();
    if headers.iter().collect::<Vec<_>>() != ["x", "y", "value"] {
        return Err(Error::Shape(format!("unexpected csv header {headers:?}")));
    }
    let mut rows = Vec::new();
    for (k, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| Error::Evaluation(format!("csv row {}: {e}", k + 2)))?;
        let parse = |i: usize| -> Result<f64> {
            rec.get(i)
                .and_then(|s| s.trim().parse::<f64>().ok())
                .ok_or_else(|| Error::Evaluation(format!("csv row {}: bad number", k + 2)))
        };
        rows.push((parse(0)?, parse(1)?, parse(2)?));
    }
    Ok(rows)
}

/// Reads a vertex field, checking that the rows match the grid's vertex order.
pub fn read_vertex_field<R: Read>(input: R, grid: &Grid2) -> Result<Vec<f64>> {
    let rows = read_vertex_csv(input)?;
    if rows.len() != grid.n_vertices() {
        return Err(Error::Shape(format!(
            "csv has {} rows, grid has {} vertices",
            rows.len(),
            grid.n_vertices()
        )));
    }
    let tol = 1e-9 * grid.h();
    rows.iter()
        .enumerate()
        .map(|(v, &(x, y, val))| {
            let (gx, gy) = grid.vertex_xy(v);
            if (gx - x).abs() > tol || (gy - y).abs() > tol {
                Err(Error::Shape(format!(
                    "csv row {} at ({x}, {y}) does not match vertex ({gx}, {gy})",
                    v + 2
                )))
            } else {
                Ok(val)
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let g = Grid2::square(3, 0.0, 1.0).unwrap();
        let vals: Vec<f64> = (0..9).map(|k| k as f64 / 3.0).collect();
        let s = vertex_csv_string(&g, &vals).unwrap();
        let lines: Vec<&str> = s.split('\n').collect();
        assert_eq!(lines[0], "x,y,value");
        assert_eq!(lines.len(), 11);
        assert_eq!(lines[10], "");
        assert!(!s.contains('\r'));
        assert!(lines[2].starts_with("5.0000000000000000e-1,0.0000000000000000e0,"));
        let back = read_vertex_field(s.as_bytes(), &g).unwrap();
        assert_eq!(back, vals);
    }
}
