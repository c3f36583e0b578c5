//! Field serialization.
//!
//! Binary layout (all integers `u32` and floats `f64`, little-endian):
//!
//! ```text
//! magic        4 bytes  "SPLF" (single field) or "SPLT" (trajectory)
//! version      u32      = 1
//! dim          u32
//! n            u32
//! components   u32      1 for scalar fields, dim for vector fields
//! frames       u32      trajectory files only
//! box_length   f64
//! payload      per frame: [time f64 (trajectory only)] then, per component,
//!              n^dim samples in row-major order (last axis fastest)
//! ```
//!
//! The CSV form has one comment header line `# dim=.. n=.. box_length=..
//! components=..`, a column header, and one row per lattice point with the
//! lattice indices followed by the component values, printed with 17
//! significant digits.

use std::io::{BufRead, Read, Write};

use crate::error::{LabError, Result};
use crate::field::ScalarField;
use crate::grid::Grid;

const FIELD_MAGIC: &[u8; 4] = b"SPLF";
const TRAJ_MAGIC: &[u8; 4] = b"SPLT";
const VERSION: u32 = 1;

/// Format a double with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn put_u32(w: &mut impl Write, v: u32) -> Result<()> {
    w.write_all(&v.to_le_bytes())?;
    Ok(())
}

fn put_f64(w: &mut impl Write, v: f64) -> Result<()> {
    w.write_all(&v.to_le_bytes())?;
    Ok(())
}

fn get_u32(r: &mut impl Read) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn get_f64(r: &mut impl Read) -> Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

fn write_header(w: &mut impl Write, magic: &[u8; 4], grid: &Grid, comps: usize, frames: Option<usize>) -> Result<()> {
    w.write_all(magic)?;
    put_u32(w, VERSION)?;
    put_u32(w, grid.dim() as u32)?;
    put_u32(w, grid.n() as u32)?;
    put_u32(w, comps as u32)?;
    if let Some(f) = frames {
        put_u32(w, f as u32)?;
    }
    put_f64(w, grid.box_length())
}

fn read_header(r: &mut impl Read, magic: &[u8; 4], framed: bool) -> Result<(Grid, usize, usize)> {
    let mut m = [0u8; 4];
    r.read_exact(&mut m)?;
    if &m != magic {
        return Err(LabError::Format(format!("bad magic {:?}", String::from_utf8_lossy(&m))));
    }
    let version = get_u32(r)?;
    if version != VERSION {
        return Err(LabError::Format(format!("unsupported version {version}")));
    }
    let dim = get_u32(r)? as usize;
    let n = get_u32(r)? as usize;
    let comps = get_u32(r)? as usize;
    let frames = if framed { get_u32(r)? as usize } else { 1 };
    let box_length = get_f64(r)?;
    let grid = Grid::new(dim, n, box_length)?;
    if comps != 1 && comps != dim {
        return Err(LabError::Format(format!("{comps} components on a {dim}D grid")));
    }
    Ok((grid, comps, frames))
}

fn read_components(r: &mut impl Read, grid: Grid, comps: usize) -> Result<Vec<ScalarField>> {
    (0..comps)
        .map(|_| {
            let samples = (0..grid.len()).map(|_| get_f64(r)).collect::<Result<Vec<_>>>()?;
            ScalarField::new(grid, samples)
        })
        .collect()
}

/// Write one field given as its components.
pub fn write_field_binary(w: &mut impl Write, components: &[ScalarField]) -> Result<()> {
    let grid = *components[0].grid();
    write_header(w, FIELD_MAGIC, &grid, components.len(), None)?;
    for c in components {
        for &x in c.samples() {
            put_f64(w, x)?;
        }
    }
    Ok(())
}

pub fn read_field_binary(r: &mut impl Read) -> Result<Vec<ScalarField>> {
    let (grid, comps, _) = read_header(r, FIELD_MAGIC, false)?;
    read_components(r, grid, comps)
}

/// Write a time-indexed sequence of fields (each given by its components).
pub fn write_trajectory_binary(w: &mut impl Write, times: &[f64], frames: &[Vec<ScalarField>]) -> Result<()> {
    let first = frames.first().ok_or(LabError::EmptyTrajectory)?;
    let grid = *first[0].grid();
    write_header(w, TRAJ_MAGIC, &grid, first.len(), Some(frames.len()))?;
    for (t, frame) in times.iter().zip(frames) {
        put_f64(w, *t)?;
        for c in frame {
            for &x in c.samples() {
                put_f64(w, x)?;
            }
        }
    }
    Ok(())
}

pub fn read_trajectory_binary(r: &mut impl Read) -> Result<(Vec<f64>, Vec<Vec<ScalarField>>)> {
    let (grid, comps, count) = read_header(r, TRAJ_MAGIC, true)?;
    let mut times = Vec::with_capacity(count);
    let mut frames = Vec::with_capacity(count);
    for _ in 0..count {
        times.push(get_f64(r)?);
        frames.push(read_components(r, grid, comps)?);
    }
    Ok((times, frames))
}

pub fn write_field_csv(w: &mut impl Write, components: &[ScalarField]) -> Result<()> {
    let grid = *components[0].grid();
    writeln!(
        w,
        "# dim={} n={} box_length={} components={}",
        grid.dim(),
        grid.n(),
        fmt_f64(grid.box_length()),
        components.len()
    )?;
    let mut header: Vec<String> = (0..grid.dim()).map(|a| format!("i{a}")).collect();
    header.extend((0..components.len()).map(|c| format!("c{c}")));
    writeln!(w, "{}", header.join(","))?;
    for flat in 0..grid.len() {
        let idx = grid.unravel(flat);
        let mut row: Vec<String> = (0..grid.dim()).map(|a| idx[a].to_string()).collect();
        row.extend(components.iter().map(|c| fmt_f64(c.samples()[flat])));
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}

pub fn read_field_csv(r: impl BufRead) -> Result<Vec<ScalarField>> {
    let mut lines = r.lines();
    let meta = lines.next().ok_or_else(|| LabError::Format("empty csv".into()))??;
    let mut dim = None;
    let mut n = None;
    let mut box_length = None;
    let mut comps = None;
    for tok in meta.trim_start_matches('#').split_whitespace() {
        let (k, v) = tok.split_once('=').ok_or_else(|| LabError::Format(format!("bad header token {tok}")))?;
        let bad = |_| LabError::Format(format!("bad header value {tok}"));
        match k {
            "dim" => dim = Some(v.parse::<usize>().map_err(bad)?),
            "n" => n = Some(v.parse::<usize>().map_err(bad)?),
            "box_length" => {
                box_length = Some(v.parse::<f64>().map_err(|_| LabError::Format(format!("bad header value {tok}")))?)
            }
            "components" => comps = Some(v.parse::<usize>().map_err(bad)?),
            _ => return Err(LabError::Format(format!("unknown header key {k}"))),
        }
    }
    let missing = || LabError::Format("incomplete csv header".into());
    let grid = Grid::new(dim.ok_or_else(missing)?, n.ok_or_else(missing)?, box_length.ok_or_else(missing)?)?;
    let comps = comps.ok_or_else(missing)?;
    lines.next().ok_or_else(|| LabError::Format("missing column header".into()))??;
    let mut data = vec![vec![0.0; grid.len()]; comps];
    let mut seen = 0;
    for line in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != grid.dim() + comps {
            return Err(LabError::Format(format!("row has {} cells", cells.len())));
        }
        let mut flat = 0;
        for a in 0..grid.dim() {
            let i: usize = cells[a].trim().parse().map_err(|_| LabError::Format(format!("bad index {}", cells[a])))?;
            flat += i * grid.stride(a);
        }
        for c in 0..comps {
            data[c][flat] = cells[grid.dim() + c]
                .trim()
                .parse()
                .map_err(|_| LabError::Format(format!("bad value {}", cells[grid.dim() + c])))?;
        }
        seen += 1;
    }
    if seen != grid.len() {
        return Err(LabError::Format(format!("expected {} rows, found {seen}", grid.len())));
    }
    data.into_iter().map(|s| ScalarField::new(grid, s)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field(grid: Grid, phase: f64) -> ScalarField {
        ScalarField::from_fn(grid, |x| (x[0] + phase).sin() * (2.0 * x[1]).cos() / 3.0)
    }

    #[test]
    fn binary_roundtrip_is_exact() {
        let g = Grid::new(2, 8, 2.5).unwrap();
        let comps = vec![field(g, 0.0), field(g, 1.0)];
        let mut buf = Vec::new();
        write_field_binary(&mut buf, &comps).unwrap();
        assert_eq!(buf.len(), 4 + 4 * 4 + 8 + 2 * 64 * 8);
        assert_eq!(&buf[..4], b"SPLF");
        let back = read_field_binary(&mut buf.as_slice()).unwrap();
        assert_eq!(back, comps);
    }

    #[test]
    fn csv_roundtrip_is_exact() {
        let g = Grid::new(3, 8, 1.0).unwrap();
        let comps = vec![field(g, 0.3)];
        let mut buf = Vec::new();
        write_field_csv(&mut buf, &comps).unwrap();
        let back = read_field_csv(buf.as_slice()).unwrap();
        assert_eq!(back, comps);
    }

    #[test]
    fn trajectory_roundtrip() {
        let g = Grid::new(2, 8, 1.0).unwrap();
        let frames = vec![vec![field(g, 0.0)], vec![field(g, 0.5)]];
        let mut buf = Vec::new();
        write_trajectory_binary(&mut buf, &[0.0, 0.1], &frames).unwrap();
        let (t, back) = read_trajectory_binary(&mut buf.as_slice()).unwrap();
        assert_eq!(t, vec![0.0, 0.1]);
        assert_eq!(back, frames);
    }

    #[test]
    fn rejects_wrong_magic() {
        let bytes = b"NOPE\x01\x00\x00\x00";
        assert!(matches!(read_field_binary(&mut &bytes[..]), Err(LabError::Format(_))));
    }
}
