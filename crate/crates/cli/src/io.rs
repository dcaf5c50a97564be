//! CSV and JSON artifacts.
//!
//! Slice files carry a metadata line, a header and one row per grid point:
//!
//! ```text
//! # mu=1.0000000000000000e0 nu=0.0000000000000000e0
//! X,density
//! -1.2000000000000000e1,0.0000000000000000e0
//! ```
//!
//! History slices add `t=<time>` to the metadata line. Values are written
//! with 17 significant digits, so a write/read cycle is bit-exact. The grid
//! is rebuilt from the `X` column.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use num_complex::Complex64 as C64;
use serde::Serialize;
use sha2::{Digest, Sha256};
use tomokit::{Error, OscillatorTrajectory, Result, SpatialGrid, TomogramSlice, WaveFunction};

/// Slice read from disk, with the optional history time.
#[derive(Debug, Clone)]
pub struct SliceFile {
    pub path: PathBuf,
    pub slice: TomogramSlice,
    pub time: Option<f64>,
}

fn io_err(path: &Path, e: std::io::Error) -> Error {
    Error::Io(format!("{}: {e}", path.display()))
}

fn parse_err(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        file: path.display().to_string(),
        line,
        message: message.into(),
    }
}

/// Writes `bytes` to a temporary sibling and renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().unwrap_or(Path::new("."));
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp = dir.join(format!(".{name}.tmp"));
    let mut f = fs::File::create(&tmp).map_err(|e| io_err(&tmp, e))?;
    f.write_all(bytes).map_err(|e| io_err(&tmp, e))?;
    f.sync_all().map_err(|e| io_err(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| io_err(path, e))
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn format_slice(slice: &TomogramSlice, time: Option<f64>) -> String {
    let mut out = format!("# mu={:.16e} nu={:.16e}", slice.mu(), slice.nu());
    if let Some(t) = time {
        out.push_str(&format!(" t={t:.16e}"));
    }
    out.push_str("\nX,density\n");
    for (x, d) in slice.grid().points().zip(slice.density()) {
        out.push_str(&format!("{x:.16e},{d:.16e}\n"));
    }
    out
}

pub fn format_wavefunction(psi: &WaveFunction) -> String {
    let mut out = String::from("X,re,im\n");
    for (x, a) in psi.grid().points().zip(psi.amplitudes()) {
        out.push_str(&format!("{x:.16e},{:.16e},{:.16e}\n", a.re, a.im));
    }
    out
}

pub fn format_trajectory(traj: &OscillatorTrajectory) -> String {
    let mut out = String::from("t,re_epsilon,im_epsilon,re_epsilon_dot,im_epsilon_dot,re_delta,im_delta,wronskian\n");
    for (i, t) in traj.times().iter().enumerate() {
        let (e, ed, d) = (traj.epsilon()[i], traj.epsilon_dot()[i], traj.delta()[i]);
        out.push_str(&format!(
            "{t:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
            e.re,
            e.im,
            ed.re,
            ed.im,
            d.re,
            d.im,
            traj.wronskian(i)
        ));
    }
    out
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| io_err(path, e))
}

fn parse_number(path: &Path, line: usize, field: &str) -> Result<f64> {
    let v: f64 = field
        .trim()
        .parse()
        .map_err(|_| parse_err(path, line, format!("bad number {field:?}")))?;
    if !v.is_finite() {
        return Err(parse_err(path, line, format!("non-finite value {field:?}")));
    }
    Ok(v)
}

/// Data rows after `header`: returns the `X` column and the remaining columns.
fn read_table(path: &Path, text: &str, first_line: usize, header: &str) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let mut lines = text.lines().enumerate().skip(first_line);
    match lines.next() {
        Some((_, h)) if h.trim() == header => {}
        Some((i, h)) => {
            return Err(parse_err(
                path,
                i + 1,
                format!("expected header {header:?}, found {h:?}"),
            ))
        }
        None => return Err(parse_err(path, first_line + 1, format!("missing header {header:?}"))),
    }
    let width = header.split(',').count();
    let mut xs = Vec::new();
    let mut cols = Vec::new();
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != width {
            return Err(parse_err(
                path,
                i + 1,
                format!("expected {width} fields, found {}", fields.len()),
            ));
        }
        xs.push(parse_number(path, i + 1, fields[0])?);
        cols.push(
            fields[1..]
                .iter()
                .map(|f| parse_number(path, i + 1, f))
                .collect::<Result<Vec<_>>>()?,
        );
    }
    Ok((xs, cols))
}

fn grid_from_column(path: &Path, xs: &[f64], first_row_line: usize) -> Result<SpatialGrid> {
    if xs.len() < 2 {
        return Err(parse_err(path, first_row_line, "need at least two data rows"));
    }
    let grid = SpatialGrid::new(xs[0], xs[xs.len() - 1], xs.len())
        .map_err(|e| parse_err(path, first_row_line, e.to_string()))?;
    for (k, &x) in xs.iter().enumerate() {
        if (x - grid.x(k)).abs() > 1e-6 * grid.dx() {
            return Err(parse_err(
                path,
                first_row_line + k,
                format!("X = {x} breaks the uniform grid"),
            ));
        }
    }
    Ok(grid)
}

fn parse_metadata(path: &Path, line: &str) -> Result<(f64, f64, Option<f64>)> {
    let body = line
        .strip_prefix('#')
        .ok_or_else(|| parse_err(path, 1, "missing '# mu=<v> nu=<v>' metadata line"))?;
    let (mut mu, mut nu, mut t) = (None, None, None);
    for pair in body.split_whitespace() {
        let (key, value) = pair
            .split_once('=')
            .ok_or_else(|| parse_err(path, 1, format!("bad metadata entry {pair:?}")))?;
        let v = parse_number(path, 1, value)?;
        match key {
            "mu" => mu = Some(v),
            "nu" => nu = Some(v),
            "t" => t = Some(v),
            _ => return Err(parse_err(path, 1, format!("unknown metadata key {key:?}"))),
        }
    }
    match (mu, nu) {
        (Some(mu), Some(nu)) => Ok((mu, nu, t)),
        _ => Err(parse_err(path, 1, "metadata needs both mu and nu")),
    }
}

pub fn read_slice(path: &Path) -> Result<SliceFile> {
    let text = read_text(path)?;
    let first = text.lines().next().ok_or_else(|| parse_err(path, 1, "empty file"))?;
    let (mu, nu, time) = parse_metadata(path, first)?;
    let (xs, cols) = read_table(path, &text, 1, "X,density")?;
    let grid = grid_from_column(path, &xs, 3)?;
    let density = cols.into_iter().map(|c| c[0]).collect();
    let slice = TomogramSlice::new(mu, nu, grid, density)?;
    Ok(SliceFile {
        path: path.to_path_buf(),
        slice,
        time,
    })
}

pub fn read_wavefunction(path: &Path) -> Result<WaveFunction> {
    let text = read_text(path)?;
    let (xs, cols) = read_table(path, &text, 0, "X,re,im")?;
    let grid = grid_from_column(path, &xs, 2)?;
    let amps = cols.into_iter().map(|c| C64::new(c[0], c[1])).collect();
    WaveFunction::new(grid, amps)?.normalized()
}

fn is_slice_file(path: &Path) -> Result<bool> {
    if path.extension().and_then(|e| e.to_str()) != Some("csv") {
        return Ok(false);
    }
    let text = read_text(path)?;
    Ok(text.starts_with("# "))
}

/// Every slice CSV in `dir`, ordered by file name.
pub fn read_slice_dir(dir: &Path) -> Result<Vec<SliceFile>> {
    if !dir.is_dir() {
        return Err(Error::InvalidArgument(format!("{} is not a directory", dir.display())));
    }
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| io_err(dir, e))?
        .map(|e| e.map(|e| e.path()).map_err(|e| io_err(dir, e)))
        .collect::<Result<_>>()?;
    paths.sort();
    let mut out = Vec::new();
    for p in paths {
        if is_slice_file(&p)? {
            out.push(read_slice(&p)?);
        }
    }
    Ok(out)
}

#[derive(Debug, Serialize)]
pub struct ManifestEntry {
    pub file: String,
    pub sha256: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nu: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    command: &'a str,
    timestamp: u64,
    parameters: &'a serde_json::Value,
    files: &'a [ManifestEntry],
}

/// Collects artifacts and writes them together with a sorted manifest.
pub struct OutputDir {
    dir: PathBuf,
    entries: Vec<ManifestEntry>,
}

impl OutputDir {
    pub fn create(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
        Ok(OutputDir {
            dir: dir.to_path_buf(),
            entries: Vec::new(),
        })
    }

    pub fn path(&self) -> &Path {
        &self.dir
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        self.write_tagged(name, contents, None, None)
    }

    pub fn write_slice(&mut self, name: &str, slice: &TomogramSlice, time: Option<f64>) -> Result<()> {
        self.write_tagged(name, &format_slice(slice, time), Some((slice.mu(), slice.nu())), time)
    }

    fn write_tagged(&mut self, name: &str, contents: &str, dir: Option<(f64, f64)>, t: Option<f64>) -> Result<()> {
        write_atomic(&self.dir.join(name), contents.as_bytes())?;
        self.entries.push(ManifestEntry {
            file: name.to_string(),
            sha256: sha256_hex(contents.as_bytes()),
            mu: dir.map(|d| d.0),
            nu: dir.map(|d| d.1),
            t,
        });
        Ok(())
    }

    /// Writes `manifest.json`; the timestamp is the only nondeterministic field.
    pub fn finish(mut self, command: &str, parameters: serde_json::Value) -> Result<PathBuf> {
        self.entries.sort_by(|a, b| a.file.cmp(&b.file));
        let timestamp = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        let manifest = Manifest {
            command,
            timestamp,
            parameters: &parameters,
            files: &self.entries,
        };
        let mut text = serde_json::to_string_pretty(&manifest).map_err(|e| Error::Io(e.to_string()))?;
        text.push('\n');
        let path = self.dir.join("manifest.json");
        write_atomic(&path, text.as_bytes())?;
        Ok(path)
    }
}

pub fn to_json_line<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Io(e.to_string()))?;
    s.push('\n');
    Ok(s)
}
