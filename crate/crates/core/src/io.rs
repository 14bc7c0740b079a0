//! Binary field dumps and float formatting shared by every output file.
//!
//! A dump is a text header of `key = value` lines ended by a blank line,
//! followed by little-endian `f64` pairs `(re, im)` in row-major order, one
//! full array per component.

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use thiserror::Error;

use crate::fields::{preset_by_name, EMPotential, FieldError, PresetParams};
use crate::grid::{Grid, VectorField};
use crate::state::SpinorField;
use crate::units::Units;

pub const DUMP_FORMAT: &str = "pauli-dump-1";
pub const DUMP_EXTENSION: &str = "dump";

/// Seventeen significant digits, enough to round-trip any `f64`.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Error)]
pub enum DumpError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: header field '{field}': {message}")]
    Header {
        path: PathBuf,
        field: String,
        message: String,
    },
    #[error("{path}: expected {expected} bytes of field data, found {found}")]
    Truncated {
        path: PathBuf,
        expected: usize,
        found: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DumpKind {
    Spinor,
    Vector,
}

impl DumpKind {
    pub fn name(self) -> &'static str {
        match self {
            DumpKind::Spinor => "spinor",
            DumpKind::Vector => "vector",
        }
    }

    fn components(self) -> usize {
        match self {
            DumpKind::Spinor => 2,
            DumpKind::Vector => 3,
        }
    }
}

/// Everything in a dump besides the samples.
#[derive(Clone, Debug, PartialEq)]
pub struct DumpHeader {
    pub kind: DumpKind,
    pub grid: Grid,
    pub time: f64,
    pub units: Units,
    /// Potential preset name, if the field was produced under one.
    pub preset: Option<String>,
    pub params: PresetParams,
}

impl DumpHeader {
    pub fn new(kind: DumpKind, grid: &Grid, time: f64, units: Units) -> Self {
        Self {
            kind,
            grid: grid.clone(),
            time,
            units,
            preset: None,
            params: PresetParams::new(),
        }
    }

    pub fn with_potential(mut self, p: &EMPotential) -> Self {
        if p.kind.is_some() {
            self.preset = Some(p.name.clone());
            self.params = p.params.clone();
        }
        self
    }

    /// Rebuilds the potential recorded in the header; no preset means zero.
    pub fn potential(&self) -> Result<EMPotential, FieldError> {
        match &self.preset {
            Some(name) => preset_by_name(name, &self.params, self.units),
            None => Ok(EMPotential::zero()),
        }
    }

    fn render(&self) -> String {
        let g = &self.grid;
        let axes = 0..g.dim();
        let join = |f: &dyn Fn(usize) -> String| axes.clone().map(f).collect::<Vec<_>>().join(" ");
        let mut s = String::new();
        s += &format!("format = {DUMP_FORMAT}\n");
        s += &format!("kind = {}\n", self.kind.name());
        s += &format!("dim = {}\n", g.dim());
        s += &format!("n = {}\n", join(&|a| g.points(a).to_string()));
        s += &format!("h = {}\n", join(&|a| format_float(g.spacing(a))));
        s += &format!("origin = {}\n", join(&|a| format_float(g.origin(a))));
        s += &format!("time = {}\n", format_float(self.time));
        s += &format!("components = {}\n", self.kind.components());
        s += &format!("q = {}\n", format_float(self.units.charge));
        s += &format!("mass = {}\n", format_float(self.units.mass));
        if let Some(p) = &self.preset {
            s += &format!("preset = {p}\n");
        }
        for (k, v) in &self.params {
            s += &format!("param.{k} = {}\n", format_float(*v));
        }
        s += "\n";
        s
    }

    fn parse(path: &Path, lines: &BTreeMap<String, String>) -> Result<Self, DumpError> {
        let bad = |field: &str, message: String| DumpError::Header {
            path: path.to_path_buf(),
            field: field.to_string(),
            message,
        };
        let get = |field: &str| lines.get(field).ok_or_else(|| bad(field, "missing".into()));
        let float = |field: &str, s: &str| s.parse::<f64>().map_err(|e| bad(field, format!("'{s}': {e}")));
        let floats = |field: &str| -> Result<Vec<f64>, DumpError> {
            get(field)?.split_whitespace().map(|s| float(field, s)).collect()
        };

        for key in lines.keys() {
            let known = matches!(
                key.as_str(),
                "format" | "kind" | "dim" | "n" | "h" | "origin" | "time" | "components" | "q" | "mass" | "preset"
            ) || key.starts_with("param.");
            if !known {
                return Err(bad(key, "unknown field".into()));
            }
        }
        let format = get("format")?;
        if format != DUMP_FORMAT {
            return Err(bad("format", format!("expected {DUMP_FORMAT}, found '{format}'")));
        }
        let kind = match get("kind")?.as_str() {
            "spinor" => DumpKind::Spinor,
            "vector" => DumpKind::Vector,
            other => return Err(bad("kind", format!("unknown kind '{other}'"))),
        };
        let dim: usize = get("dim")?
            .parse()
            .map_err(|e| bad("dim", format!("{e}")))?;
        let n: Vec<usize> = get("n")?
            .split_whitespace()
            .map(|s| s.parse().map_err(|e| bad("n", format!("'{s}': {e}"))))
            .collect::<Result<_, _>>()?;
        let h = floats("h")?;
        let origin = floats("origin")?;
        for (field, len) in [("n", n.len()), ("h", h.len()), ("origin", origin.len())] {
            if len != dim {
                return Err(bad(field, format!("expected {dim} entries, found {len}")));
            }
        }
        let grid = Grid::with_origin(&n, &h, &origin).map_err(|e| bad("n", e.to_string()))?;
        let components: usize = get("components")?
            .parse()
            .map_err(|e| bad("components", format!("{e}")))?;
        if components != kind.components() {
            return Err(bad(
                "components",
                format!("{} dumps have {} components, found {components}", kind.name(), kind.components()),
            ));
        }
        let time = float("time", get("time")?)?;
        let units = Units {
            charge: float("q", get("q")?)?,
            mass: float("mass", get("mass")?)?,
        };
        let mut params = PresetParams::new();
        for (k, v) in lines {
            if let Some(name) = k.strip_prefix("param.") {
                params.insert(name.to_string(), float(k, v)?);
            }
        }
        let header = Self {
            kind,
            grid,
            time,
            units,
            preset: lines.get("preset").cloned(),
            params,
        };
        if header.preset.is_some() {
            header.potential().map_err(|e| bad("preset", e.to_string()))?;
        }
        Ok(header)
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> DumpError + '_ {
    move |source| DumpError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn write_dump<'a>(
    path: &Path,
    header: &DumpHeader,
    arrays: impl Iterator<Item = Box<dyn Iterator<Item = (f64, f64)> + 'a>>,
) -> Result<(), DumpError> {
    let file = fs::File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(file);
    w.write_all(header.render().as_bytes()).map_err(io_err(path))?;
    for array in arrays {
        for (re, im) in array {
            w.write_all(&re.to_le_bytes()).map_err(io_err(path))?;
            w.write_all(&im.to_le_bytes()).map_err(io_err(path))?;
        }
    }
    w.flush().map_err(io_err(path))
}

pub fn write_spinor(path: &Path, f: &SpinorField, header: &DumpHeader) -> Result<(), DumpError> {
    let mut header = header.clone();
    header.kind = DumpKind::Spinor;
    header.grid = f.grid().clone();
    write_dump(
        path,
        &header,
        f.components()
            .iter()
            .map(|c| Box::new(c.iter().map(|z| (z.re, z.im))) as Box<dyn Iterator<Item = _>>),
    )
}

/// Writes a real vector field; imaginary parts are stored as zero.
pub fn write_vector(path: &Path, v: &VectorField, header: &DumpHeader) -> Result<(), DumpError> {
    let mut header = header.clone();
    header.kind = DumpKind::Vector;
    header.grid = v.grid.clone();
    write_dump(
        path,
        &header,
        v.components
            .iter()
            .map(|c| Box::new(c.iter().map(|&x| (x, 0.0))) as Box<dyn Iterator<Item = _>>),
    )
}

fn read_dump(path: &Path) -> Result<(DumpHeader, Vec<Vec<Complex64>>), DumpError> {
    let file = fs::File::open(path).map_err(io_err(path))?;
    let mut r = BufReader::new(file);
    let mut lines = BTreeMap::new();
    loop {
        let mut line = String::new();
        let read = r.read_line(&mut line).map_err(io_err(path))?;
        if read == 0 {
            return Err(DumpError::Header {
                path: path.to_path_buf(),
                field: "header".into(),
                message: "no blank line ends the header".into(),
            });
        }
        let line = line.trim_end_matches(['\n', '\r']);
        if line.is_empty() {
            break;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(DumpError::Header {
                path: path.to_path_buf(),
                field: line.chars().take(32).collect(),
                message: "expected 'key = value'".into(),
            });
        };
        lines.insert(k.trim().to_string(), v.trim().to_string());
    }
    let header = DumpHeader::parse(path, &lines)?;
    let mut body = Vec::new();
    r.read_to_end(&mut body).map_err(io_err(path))?;
    let n = header.grid.len();
    let expected = header.kind.components() * n * 16;
    if body.len() != expected {
        return Err(DumpError::Truncated {
            path: path.to_path_buf(),
            expected,
            found: body.len(),
        });
    }
    let read_f64 = |off: usize| f64::from_le_bytes(body[off..off + 8].try_into().expect("8 bytes"));
    let arrays = (0..header.kind.components())
        .map(|c| {
            (0..n)
                .map(|i| {
                    let off = (c * n + i) * 16;
                    Complex64::new(read_f64(off), read_f64(off + 8))
                })
                .collect()
        })
        .collect();
    Ok((header, arrays))
}

pub fn read_spinor(path: &Path) -> Result<(DumpHeader, SpinorField), DumpError> {
    let (header, arrays) = read_dump(path)?;
    if header.kind != DumpKind::Spinor {
        return Err(DumpError::Header {
            path: path.to_path_buf(),
            field: "kind".into(),
            message: format!("expected spinor, found {}", header.kind.name()),
        });
    }
    let [a, b]: [Vec<Complex64>; 2] = arrays.try_into().expect("two components");
    let f = SpinorField::new(&header.grid, [a, b]).expect("sizes checked against header");
    Ok((header, f))
}

pub fn read_vector(path: &Path) -> Result<(DumpHeader, VectorField), DumpError> {
    let (header, arrays) = read_dump(path)?;
    if header.kind != DumpKind::Vector {
        return Err(DumpError::Header {
            path: path.to_path_buf(),
            field: "kind".into(),
            message: format!("expected vector, found {}", header.kind.name()),
        });
    }
    let mut v = VectorField::zeros(&header.grid);
    for (c, arr) in arrays.iter().enumerate() {
        v.components[c] = arr.iter().map(|z| z.re).collect();
    }
    Ok((header, v))
}

/// File name of the spinor snapshot taken at `step`.
pub fn snapshot_name(step: usize) -> String {
    format!("psi_{step:08}.{DUMP_EXTENSION}")
}

/// Spinor snapshots in `dir`, ordered by file name.
pub fn list_snapshots(dir: &Path) -> Result<Vec<PathBuf>, DumpError> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(io_err(dir))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.extension().is_some_and(|e| e == DUMP_EXTENSION)
                && p.file_name().and_then(|n| n.to_str()).is_some_and(|n| n.starts_with("psi_"))
        })
        .collect();
    paths.sort();
    Ok(paths)
}

/// Reads every snapshot in `dir`, checking they share one grid and potential
/// and have strictly increasing times.
pub fn read_snapshots(dir: &Path) -> Result<Vec<(DumpHeader, SpinorField)>, DumpError> {
    let paths = list_snapshots(dir)?;
    if paths.is_empty() {
        return Err(DumpError::Io {
            path: dir.to_path_buf(),
            source: std::io::Error::new(std::io::ErrorKind::NotFound, "no psi_*.dump snapshots"),
        });
    }
    let mut out: Vec<(DumpHeader, SpinorField)> = Vec::with_capacity(paths.len());
    for path in &paths {
        let (h, f) = read_spinor(path)?;
        if let Some((first, _)) = out.first() {
            let mismatch = |field: &str| DumpError::Header {
                path: path.clone(),
                field: field.into(),
                message: "differs from the first snapshot".into(),
            };
            if h.grid != first.grid {
                return Err(mismatch("n"));
            }
            if h.units != first.units {
                return Err(mismatch("q"));
            }
            if h.preset != first.preset || h.params != first.params {
                return Err(mismatch("preset"));
            }
            let prev = out.last().expect("nonempty").0.time;
            if !(h.time > prev) {
                return Err(DumpError::Header {
                    path: path.clone(),
                    field: "time".into(),
                    message: format!("{} does not follow {prev}", h.time),
                });
            }
        }
        out.push((h, f));
    }
    Ok(out)
}
