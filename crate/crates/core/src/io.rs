//! Field/profile serialization: the CSV layout shared by every tool plus
//! small JSON helpers for sidecar metadata.
//!
//! CSV layout: a comment header `# grid: n_z,n_y,dz,dy,time_tag`, then one
//! row per longitudinal node with one column per cross-sectional node,
//! printed with 17 significant digits (exact f64 round-trip). Tube grids are
//! reconstructed as
//! symmetric in y (the only kind the solvers build), cross-sections as
//! (0, dz·(n_z−1)).

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{CrossSection, ProfileField, TubeField, TubeGrid};

fn header(n_z: usize, n_y: usize, dz: f64, dy: f64, time_tag: f64) -> String {
    format!("# grid: {n_z},{n_y},{dz:.16e},{dy:.16e},{time_tag:.16e}\n")
}

fn parse_header(line: &str) -> Result<(usize, usize, f64, f64, f64)> {
    let rest = line
        .strip_prefix("# grid:")
        .ok_or_else(|| Error::Parse("missing '# grid:' header".into()))?;
    let parts: Vec<&str> = rest.trim().split(',').collect();
    if parts.len() != 5 {
        return Err(Error::Parse(format!("header needs 5 fields, got {}", parts.len())));
    }
    let n_z = parts[0].trim().parse::<usize>().map_err(|e| Error::Parse(e.to_string()))?;
    let n_y = parts[1].trim().parse::<usize>().map_err(|e| Error::Parse(e.to_string()))?;
    let dz = parts[2].trim().parse::<f64>().map_err(|e| Error::Parse(e.to_string()))?;
    let dy = parts[3].trim().parse::<f64>().map_err(|e| Error::Parse(e.to_string()))?;
    let tag = parts[4].trim().parse::<f64>().map_err(|e| Error::Parse(e.to_string()))?;
    Ok((n_z, n_y, dz, dy, tag))
}

pub fn field_to_csv(field: &TubeField) -> String {
    let grid = field.grid;
    let n_z = grid.cross_section.n_z;
    let n_y = grid.n_y;
    let mut out = header(n_z, n_y, grid.cross_section.dz(), grid.dy(), field.time_tag);
    for iy in 0..n_y {
        let row: Vec<String> = (0..n_z)
            .map(|iz| format!("{:.16e}", field.values[[iy, iz]]))
            .collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn write_field_csv(path: &Path, field: &TubeField) -> Result<()> {
    fs::write(path, field_to_csv(field)).map_err(Error::from)
}

pub fn field_from_csv(text: &str) -> Result<TubeField> {
    let mut lines = text.lines();
    let (n_z, n_y, dz, dy, tag) = parse_header(
        lines.next().ok_or_else(|| Error::Parse("empty field file".into()))?,
    )?;
    if n_y < 2 {
        return Err(Error::Parse("tube field needs n_y >= 2 rows".into()));
    }
    let cs = CrossSection::new(dz * (n_z - 1) as f64, n_z)?;
    let half = dy * ((n_y - 1) / 2) as f64;
    let grid = TubeGrid::new(cs, -half, dy * (n_y - 1) as f64 - half, n_y)?;
    let mut field = TubeField::zeros(grid);
    field.time_tag = tag;
    let mut rows = 0;
    for (iy, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        if iy >= n_y {
            return Err(Error::Parse("more rows than the header declares".into()));
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != n_z {
            return Err(Error::Parse(format!(
                "row {iy} has {} columns, expected {n_z}",
                cols.len()
            )));
        }
        for (iz, c) in cols.iter().enumerate() {
            field.values[[iy, iz]] =
                c.trim().parse::<f64>().map_err(|e| Error::Parse(e.to_string()))?;
        }
        rows += 1;
    }
    if rows != n_y {
        return Err(Error::Parse(format!("{rows} rows, header declares {n_y}")));
    }
    Ok(field)
}

pub fn read_field_csv(path: &Path) -> Result<TubeField> {
    field_from_csv(&fs::read_to_string(path)?)
}

pub fn profile_to_csv(profile: &ProfileField) -> String {
    let n_z = profile.cross_section.n_z;
    let mut out = header(n_z, 1, profile.cross_section.dz(), 0.0, profile.time_tag);
    let row: Vec<String> = (0..n_z)
        .map(|iz| format!("{:.16e}", profile.values[iz]))
        .collect();
    out.push_str(&row.join(","));
    out.push('\n');
    out
}

pub fn write_profile_csv(path: &Path, profile: &ProfileField) -> Result<()> {
    fs::write(path, profile_to_csv(profile)).map_err(Error::from)
}

pub fn profile_from_csv(text: &str) -> Result<ProfileField> {
    let mut lines = text.lines();
    let (n_z, n_y, dz, _dy, tag) = parse_header(
        lines.next().ok_or_else(|| Error::Parse("empty profile file".into()))?,
    )?;
    if n_y != 1 {
        return Err(Error::Parse(format!("profile file must have n_y = 1, got {n_y}")));
    }
    let cs = CrossSection::new(dz * (n_z - 1) as f64, n_z)?;
    let line = lines
        .find(|l| !l.trim().is_empty())
        .ok_or_else(|| Error::Parse("profile file has no data row".into()))?;
    let cols: Vec<&str> = line.split(',').collect();
    if cols.len() != n_z {
        return Err(Error::Parse(format!("{} columns, expected {n_z}", cols.len())));
    }
    let mut profile = ProfileField::zeros(cs);
    profile.time_tag = tag;
    for (iz, c) in cols.iter().enumerate() {
        profile.values[iz] = c.trim().parse::<f64>().map_err(|e| Error::Parse(e.to_string()))?;
    }
    Ok(profile)
}

pub fn read_profile_csv(path: &Path) -> Result<ProfileField> {
    profile_from_csv(&fs::read_to_string(path)?)
}

/// Metadata written next to an exported cross-sectional profile.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProfileSidecar {
    pub p: f64,
    pub length: f64,
    pub residual_sup: f64,
    pub method_tag: String,
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::Parse(e.to_string()))?;
    fs::write(path, text).map_err(Error::from)
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(e.to_string()))
}
