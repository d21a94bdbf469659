//! Plain-text snapshot files.
//!
//! ```text
//! # reversible-gs snapshot
//! dim 2
//! cells 64 32
//! extent 1.0000000000000000e0 5.0000000000000000e-1
//! time 1.2500000000000000e1
//! species u1 u2 u3 u4
//! <one line per cell, x index fastest: one value per species>
//! ```

use std::fmt::Write as _;
use std::path::Path;

use crate::domain::{Grid, ScalarField};
use crate::error::{Error, Result};

const MAGIC: &str = "# reversible-gs snapshot";

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub species: Vec<String>,
    pub fields: Vec<ScalarField>,
}

pub fn format_snapshot(t: f64, species: &[&str], fields: &[ScalarField]) -> Result<String> {
    let first = fields
        .first()
        .ok_or_else(|| Error::InvalidParameters("snapshot needs at least one field".into()))?;
    if species.len() != fields.len() {
        return Err(Error::InvalidParameters("one species name per field".into()));
    }
    for f in fields {
        first.check_same_grid(f)?;
    }
    let grid = first.grid();
    let join = |v: Vec<String>| v.join(" ");
    let mut out = String::new();
    let _ = writeln!(out, "{MAGIC}");
    let _ = writeln!(out, "dim {}", grid.dim());
    let _ = writeln!(out, "cells {}", join(grid.cells().iter().map(|c| c.to_string()).collect()));
    let _ = writeln!(out, "extent {}", join(grid.extent().iter().map(|e| format!("{e:.16e}")).collect()));
    let _ = writeln!(out, "time {t:.16e}");
    let _ = writeln!(out, "species {}", species.join(" "));
    for j in 0..grid.len() {
        let _ = writeln!(out, "{}", join(fields.iter().map(|f| format!("{:.16e}", f.values()[j])).collect()));
    }
    Ok(out)
}

pub fn write_snapshot(path: &Path, t: f64, species: &[&str], fields: &[ScalarField]) -> Result<()> {
    std::fs::write(path, format_snapshot(t, species, fields)?)?;
    Ok(())
}

pub fn read_snapshot(path: &Path) -> Result<Snapshot> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::MissingFile {
        path: path.to_path_buf(),
        source,
    })?;
    parse_snapshot(&text).map_err(|reason| Error::Snapshot {
        path: path.to_path_buf(),
        reason,
    })
}

pub fn parse_snapshot(text: &str) -> std::result::Result<Snapshot, String> {
    let mut lines = text.lines();
    if lines.next() != Some(MAGIC) {
        return Err("missing header line".into());
    }
    let mut field = |name: &str| -> std::result::Result<Vec<String>, String> {
        let line = lines.next().ok_or_else(|| format!("missing `{name}` line"))?;
        let mut parts = line.split_whitespace();
        if parts.next() != Some(name) {
            return Err(format!("expected `{name}`, found `{line}`"));
        }
        Ok(parts.map(String::from).collect())
    };
    let nums = |v: Vec<String>| -> std::result::Result<Vec<f64>, String> {
        v.iter().map(|s| s.parse::<f64>().map_err(|_| format!("bad number `{s}`"))).collect()
    };
    let dim: usize = field("dim")?
        .first()
        .and_then(|s| s.parse().ok())
        .ok_or("bad dim")?;
    let cells: Vec<usize> = field("cells")?
        .iter()
        .map(|s| s.parse().map_err(|_| format!("bad cell count `{s}`")))
        .collect::<std::result::Result<_, _>>()?;
    let extent = nums(field("extent")?)?;
    let t = *nums(field("time")?)?.first().ok_or("missing time")?;
    let species = field("species")?;
    let grid = match (dim, cells.as_slice(), extent.as_slice()) {
        (1, [n], [e]) => Grid::line(*e, *n),
        (2, [nx, ny], [ex, ey]) => Grid::rect([*ex, *ey], [*nx, *ny]),
        _ => return Err("inconsistent dim, cells and extent".into()),
    }
    .map_err(|e| e.to_string())?;

    let mut values = vec![Vec::with_capacity(grid.len()); species.len()];
    for line in lines.filter(|l| !l.trim().is_empty()) {
        let row = nums(line.split_whitespace().map(String::from).collect())?;
        if row.len() != species.len() {
            return Err(format!("row has {} values, expected {}", row.len(), species.len()));
        }
        for (lane, v) in values.iter_mut().zip(row) {
            lane.push(v);
        }
    }
    let fields = values
        .into_iter()
        .map(|v| ScalarField::new(grid, v).map_err(|e| e.to_string()))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    Ok(Snapshot { t, species, fields })
}
