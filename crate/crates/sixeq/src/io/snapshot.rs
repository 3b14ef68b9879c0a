//! CSV snapshots: full-precision decimals, fixed column order, bit-stable.
//!
//! 1D columns: x, alpha1, rho1, rho2, rho, u, p1, p2, pbar, e1, e2, E_mix,
//! c_frozen, c_wood. 2D inserts y after x and v after u. One row per cell,
//! cell-center coordinates, numbers with 17 significant digits.

use std::io::Write as _;
use std::path::Path;

use crate::eos;
use crate::error::{Error, Result};
use crate::solver::Grid;
use crate::state::diagnostics;

/// A snapshot as named columns of equal length.
#[derive(Debug, Clone)]
pub struct SnapshotTable {
    pub columns: Vec<(String, Vec<f64>)>,
}

impl SnapshotTable {
    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.columns
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_slice())
    }

    pub fn rows(&self) -> usize {
        self.columns.first().map_or(0, |(_, v)| v.len())
    }

    pub fn is_two_dimensional(&self) -> bool {
        self.column("y").is_some()
    }

    /// Extract the cells of a 1D/2D grid into the snapshot schema.
    pub fn from_grid<const D: usize>(grid: &Grid<D>) -> Result<Self> {
        let names_1d = [
            "x", "alpha1", "rho1", "rho2", "rho", "u", "p1", "p2", "pbar", "e1", "e2", "E_mix",
            "c_frozen", "c_wood",
        ];
        let names_2d = [
            "x", "y", "alpha1", "rho1", "rho2", "rho", "u", "v", "p1", "p2", "pbar", "e1", "e2",
            "E_mix", "c_frozen", "c_wood",
        ];
        let names: &[&str] = match D {
            1 => &names_1d,
            2 => &names_2d,
            _ => unreachable!(),
        };
        let n = grid.num_interior();
        let mut cols: Vec<(String, Vec<f64>)> = names
            .iter()
            .map(|&s| (s.to_string(), Vec::with_capacity(n)))
            .collect();
        let eos = grid.eos();
        for flat in grid.interior_flat_indices() {
            let idx = grid.decode_interior(flat);
            let xc = grid.cell_center(idx);
            let w = grid.primitive(idx);
            let d = diagnostics(&w, eos)?;
            let e1 = eos::internal_energy(eos.phase1, w.rho1, w.p1)?;
            let e2 = eos::internal_energy(eos.phase2, w.rho2, w.p2)?;
            let mut values = Vec::with_capacity(names.len());
            values.extend_from_slice(&xc);
            values.push(w.alpha1);
            values.push(w.rho1);
            values.push(w.rho2);
            values.push(d.rho);
            values.extend_from_slice(&w.vel);
            values.push(w.p1);
            values.push(w.p2);
            values.push(d.pbar);
            values.push(e1);
            values.push(e2);
            values.push(d.e_mix);
            values.push(d.c_frozen);
            values.push(d.c_wood);
            for (col, v) in cols.iter_mut().zip(values) {
                col.1.push(v);
            }
        }
        Ok(SnapshotTable { columns: cols })
    }

    /// Column order puts coordinates first, then velocity inside the field
    /// block; `from_grid` assembled values in schema order already.
    pub fn field_names(&self) -> Vec<&str> {
        self.columns.iter().map(|(n, _)| n.as_str()).collect()
    }
}

/// Write a snapshot table as CSV with 17-significant-digit values.
pub fn write_snapshot(table: &SnapshotTable, path: &Path) -> Result<()> {
    let mut out = String::new();
    let header: Vec<&str> = table.field_names();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in 0..table.rows() {
        for (k, (_, col)) in table.columns.iter().enumerate() {
            if k > 0 {
                out.push(',');
            }
            out.push_str(&format!("{:.16e}", col[row]));
        }
        out.push('\n');
    }
    let mut file = std::fs::File::create(path).map_err(|e| io_err(path, &e))?;
    file.write_all(out.as_bytes()).map_err(|e| io_err(path, &e))?;
    Ok(())
}

pub fn read_snapshot(path: &Path) -> Result<SnapshotTable> {
    let text = std::fs::read_to_string(path).map_err(|e| io_err(path, &e))?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Io {
            path: path.display().to_string(),
            message: "empty snapshot file".into(),
        })?
        .split(',')
        .map(|s| s.trim().to_string())
        .collect::<Vec<_>>();
    let mut cols: Vec<(String, Vec<f64>)> =
        header.into_iter().map(|name| (name, Vec::new())).collect();
    for (lineno, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != cols.len() {
            return Err(Error::Io {
                path: path.display().to_string(),
                message: format!(
                    "row {} has {} fields, expected {}",
                    lineno + 2,
                    fields.len(),
                    cols.len()
                ),
            });
        }
        for (col, f) in cols.iter_mut().zip(fields) {
            let v: f64 = f.trim().parse().map_err(|_| Error::Io {
                path: path.display().to_string(),
                message: format!("bad number {f:?} on row {}", lineno + 2),
            })?;
            col.1.push(v);
        }
    }
    Ok(SnapshotTable { columns: cols })
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct FieldDiff {
    pub name: String,
    /// Volume-weighted L1 norm of the difference.
    pub l1: f64,
    pub linf: f64,
    /// (mean over window of A, mean over window of B) when a window is given.
    pub window_means: Option<(f64, f64)>,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct DiffReport {
    pub fields: Vec<FieldDiff>,
}

impl DiffReport {
    pub fn field(&self, name: &str) -> Option<&FieldDiff> {
        self.fields.iter().find(|f| f.name == name)
    }
}

/// Per-field L1/Linf differences of two snapshots on the same grid, with
/// optional plateau-window means over `x` in `window`.
pub fn compare_tables(
    a: &SnapshotTable,
    b: &SnapshotTable,
    window: Option<(f64, f64)>,
) -> Result<DiffReport> {
    if a.field_names() != b.field_names() || a.rows() != b.rows() {
        return Err(Error::Config("snapshot grids do not match".into()));
    }
    let xa = a.column("x").ok_or_else(|| Error::Config("no x column".into()))?;
    let xb = b.column("x").unwrap();
    if xa != xb {
        return Err(Error::Config("snapshot grids do not match (x)".into()));
    }
    // Cell volume from coordinate spacing.
    let mut vol = spacing(xa);
    if let (Some(ya), Some(yb)) = (a.column("y"), b.column("y")) {
        if ya != yb {
            return Err(Error::Config("snapshot grids do not match (y)".into()));
        }
        vol *= spacing(ya);
    }
    let coord = |name: &str| name == "x" || name == "y";
    let mut fields = Vec::new();
    for (name, col_a) in &a.columns {
        if coord(name) {
            continue;
        }
        let col_b = b.column(name).unwrap();
        let mut l1 = 0.0;
        let mut linf = 0.0f64;
        for (va, vb) in col_a.iter().zip(col_b) {
            let d = (va - vb).abs();
            l1 += d * vol;
            linf = linf.max(d);
        }
        let window_means = match window {
            None => None,
            Some(w) => {
                let mean = |col: &[f64]| {
                    crate::cases::plateau_extract(xa, col, w).map(|(m, _)| m)
                };
                Some((mean(col_a)?, mean(col_b)?))
            }
        };
        fields.push(FieldDiff {
            name: name.clone(),
            l1,
            linf,
            window_means,
        });
    }
    Ok(DiffReport { fields })
}

fn spacing(coords: &[f64]) -> f64 {
    let mut min = f64::INFINITY;
    for w in coords.windows(2) {
        let d = (w[1] - w[0]).abs();
        if d > 0.0 {
            min = min.min(d);
        }
    }
    if min.is_finite() {
        min
    } else {
        1.0
    }
}

fn io_err(path: &Path, e: &dyn std::fmt::Display) -> Error {
    Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}
