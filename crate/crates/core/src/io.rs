//! File formats: wavefunction snapshots, CSV series and trajectories, field
//! tables, and sparse matrix triplets.
//!
//! Snapshot layout (all little-endian):
//!
//! | bytes | content |
//! |-------|---------|
//! | 4 | magic `RFWS` |
//! | 4 | `u32` format version (1) |
//! | 4 | `u32` grid dimension |
//! | 4 | `u32` spinor components |
//! | 24 | `3 × u64` points per axis |
//! | 24 | `3 × f64` origin |
//! | 24 | `3 × f64` spacing |
//! | 4 + 16 | `u32` boundary kind (0 periodic, 1 open, 2 sponge), `2 × f64` sponge width and strength |
//! | 8 | `f64` time |
//! | rest | `(re, im)` `f64` pairs, component-major, row-major within a component |
//!
//! Text formats print floats with 17 significant digits, which round-trips
//! bit-exactly.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use nalgebra::{DMatrix, Vector3};

use crate::error::{Error, Result};
use crate::grid::{Boundary, Grid, WaveState};
use crate::rotframe::Trajectory;
use crate::spin::C64;

const MAGIC: &[u8; 4] = b"RFWS";
const VERSION: u32 = 1;

/// Format a float so that parsing it gives back the same bits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_snapshot(state: &WaveState, mut w: impl Write) -> Result<()> {
    let g = &state.grid;
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&(g.dim() as u32).to_le_bytes())?;
    w.write_all(&(state.components as u32).to_le_bytes())?;
    for n in g.points() {
        w.write_all(&(n as u64).to_le_bytes())?;
    }
    for v in g.origin().iter().chain(g.spacing().iter()) {
        w.write_all(&v.to_le_bytes())?;
    }
    let (kind, a, b) = match g.boundary {
        Boundary::Periodic => (0u32, 0.0, 0.0),
        Boundary::Open => (1, 0.0, 0.0),
        Boundary::Sponge { width, strength } => (2, width, strength),
    };
    w.write_all(&kind.to_le_bytes())?;
    w.write_all(&f64::to_le_bytes(a))?;
    w.write_all(&f64::to_le_bytes(b))?;
    w.write_all(&state.time.to_le_bytes())?;
    for z in &state.amplitudes {
        w.write_all(&z.re.to_le_bytes())?;
        w.write_all(&z.im.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

fn read_u32(r: &mut impl Read) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_u64(r: &mut impl Read) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn read_f64(r: &mut impl Read) -> Result<f64> {
    Ok(f64::from_bits(read_u64(r)?))
}

pub fn read_snapshot(mut r: impl Read) -> Result<WaveState> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Format("not a wavefunction snapshot (bad magic)".into()));
    }
    let version = read_u32(&mut r)?;
    if version != VERSION {
        return Err(Error::Format(format!("unsupported snapshot version {version}")));
    }
    let dim = read_u32(&mut r)? as usize;
    let comps = read_u32(&mut r)? as usize;
    if !(1..=3).contains(&dim) {
        return Err(Error::Format(format!("dimension {dim} out of range")));
    }
    let mut pts = [0usize; 3];
    for p in &mut pts {
        *p = read_u64(&mut r)? as usize;
    }
    let mut origin = [0.0; 3];
    let mut spacing = [0.0; 3];
    for v in origin.iter_mut().chain(spacing.iter_mut()) {
        *v = read_f64(&mut r)?;
    }
    let kind = read_u32(&mut r)?;
    let (a, b) = (read_f64(&mut r)?, read_f64(&mut r)?);
    let boundary = match kind {
        0 => Boundary::Periodic,
        1 => Boundary::Open,
        2 => Boundary::Sponge { width: a, strength: b },
        k => return Err(Error::Format(format!("unknown boundary kind {k}"))),
    };
    let time = read_f64(&mut r)?;
    let grid = Grid::new(&pts[..dim], &origin[..dim], &spacing[..dim])?.with_boundary(boundary);
    let n = comps
        .checked_mul(grid.len())
        .ok_or_else(|| Error::Format("payload size overflows".into()))?;
    let mut amps = Vec::with_capacity(n);
    for _ in 0..n {
        let re = read_f64(&mut r)?;
        let im = read_f64(&mut r)?;
        amps.push(C64::new(re, im));
    }
    let mut rest = Vec::new();
    r.read_to_end(&mut rest)?;
    if !rest.is_empty() {
        return Err(Error::Format(format!("{} trailing bytes after payload", rest.len())));
    }
    WaveState::new(grid, comps, amps, time)
}

pub fn save_snapshot(state: &WaveState, path: impl AsRef<Path>) -> Result<()> {
    write_snapshot(state, BufWriter::new(File::create(path)?))
}

pub fn load_snapshot(path: impl AsRef<Path>) -> Result<WaveState> {
    read_snapshot(BufReader::new(File::open(path)?))
}

/// A table of named float columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Series {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::Format(format!(
                "row has {} values, series has {} columns",
                row.len(),
                self.columns.len()
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }
}

pub fn write_series_csv(series: &Series, mut w: impl Write) -> Result<()> {
    writeln!(w, "{}", series.columns.join(","))?;
    for row in &series.rows {
        let cells: Vec<String> = row.iter().map(|v| fmt_f64(*v)).collect();
        writeln!(w, "{}", cells.join(","))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_series_csv(r: impl Read) -> Result<Series> {
    let mut lines = BufReader::new(r).lines();
    let header = lines.next().ok_or_else(|| Error::Format("empty CSV".into()))??;
    let columns: Vec<String> = header.split(',').map(|s| s.trim().to_string()).collect();
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let row = line
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Format(format!("line {}: {e}", i + 2)))
            })
            .collect::<Result<Vec<f64>>>()?;
        if row.len() != columns.len() {
            return Err(Error::Format(format!("line {}: expected {} values", i + 2, columns.len())));
        }
        rows.push(row);
    }
    Ok(Series { columns, rows })
}

pub const TRAJECTORY_COLUMNS: [&str; 7] = ["t", "x", "y", "z", "vx", "vy", "vz"];

pub fn trajectory_series(tr: &Trajectory) -> Series {
    let mut s = Series::new(&TRAJECTORY_COLUMNS);
    for i in 0..tr.len() {
        let (x, v) = (tr.position[i], tr.velocity[i]);
        s.rows.push(vec![tr.times[i], x.x, x.y, x.z, v.x, v.y, v.z]);
    }
    s
}

pub fn series_trajectory(s: &Series) -> Result<Trajectory> {
    if s.columns != TRAJECTORY_COLUMNS {
        return Err(Error::Format(format!("trajectory columns must be {}", TRAJECTORY_COLUMNS.join(","))));
    }
    let mut tr = Trajectory::default();
    for r in &s.rows {
        tr.times.push(r[0]);
        tr.position.push(Vector3::new(r[1], r[2], r[3]));
        tr.velocity.push(Vector3::new(r[4], r[5], r[6]));
    }
    Ok(tr)
}

pub fn write_trajectory_csv(tr: &Trajectory, w: impl Write) -> Result<()> {
    write_series_csv(&trajectory_series(tr), w)
}

pub fn read_trajectory_csv(r: impl Read) -> Result<Trajectory> {
    series_trajectory(&read_series_csv(r)?)
}

/// Field table over a grid: columns `x, y, z` then the named components,
/// one row per grid point in row-major order.
pub fn field_series(grid: &Grid, names: &[&str], f: impl Fn(&Vector3<f64>) -> Result<Vec<f64>>) -> Result<Series> {
    let mut cols = vec!["x", "y", "z"];
    cols.extend_from_slice(names);
    let mut s = Series::new(&cols);
    for i in 0..grid.len() {
        let x = grid.coord(i);
        let mut row = vec![x.x, x.y, x.z];
        row.extend(f(&x)?);
        s.push(row)?;
    }
    Ok(s)
}

/// Sparse triplet text: a `# rows cols nnz` header, then one
/// `row col re im` line per stored entry (zero-based, row-major order).
/// Entries with `|z| <= drop_below` are omitted.
pub fn write_sparse_triplets(m: &DMatrix<C64>, drop_below: f64, mut w: impl Write) -> Result<()> {
    let mut entries = Vec::new();
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            let z = m[(r, c)];
            if z.norm() > drop_below {
                entries.push((r, c, z));
            }
        }
    }
    writeln!(w, "# {} {} {}", m.nrows(), m.ncols(), entries.len())?;
    for (r, c, z) in entries {
        writeln!(w, "{r} {c} {} {}", fmt_f64(z.re), fmt_f64(z.im))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_sparse_triplets(r: impl Read) -> Result<DMatrix<C64>> {
    let mut lines = BufReader::new(r).lines();
    let header = lines.next().ok_or_else(|| Error::Format("empty triplet file".into()))??;
    let dims: Vec<usize> = header
        .trim_start_matches('#')
        .split_whitespace()
        .map(|t| t.parse().map_err(|e| Error::Format(format!("header: {e}"))))
        .collect::<Result<_>>()?;
    let [rows, cols, nnz] = dims[..] else {
        return Err(Error::Format("header must be `# rows cols nnz`".into()));
    };
    let mut m = DMatrix::zeros(rows, cols);
    let mut count = 0;
    for line in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let t: Vec<&str> = line.split_whitespace().collect();
        if t.len() != 4 {
            return Err(Error::Format(format!("bad triplet line `{line}`")));
        }
        let parse_f = |s: &str| s.parse::<f64>().map_err(|e| Error::Format(format!("{e}")));
        let parse_i = |s: &str| s.parse::<usize>().map_err(|e| Error::Format(format!("{e}")));
        let (r, c) = (parse_i(t[0])?, parse_i(t[1])?);
        if r >= rows || c >= cols {
            return Err(Error::Format(format!("entry ({r}, {c}) outside {rows}x{cols}")));
        }
        m[(r, c)] = C64::new(parse_f(t[2])?, parse_f(t[3])?);
        count += 1;
    }
    if count != nnz {
        return Err(Error::Format(format!("header promises {nnz} entries, found {count}")));
    }
    Ok(m)
}
