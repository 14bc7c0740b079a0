//! Run configuration: `[section]` headers followed by `key = value` lines.
//!
//! Unknown sections and keys are errors. [`SimConfig::render`] writes every
//! key with full float precision, so parsing the rendered text gives back an
//! identical configuration.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_complex::Complex64;
use thiserror::Error;

use crate::bohm::{Plane, DEFAULT_EPS};
use crate::currents::CurrentSelection;
use crate::evolve::{suggested_dt, PropagatorConfig, Scheme};
use crate::fields::{preset, EMPotential, PresetKind, PresetParams};
use crate::grid::Grid;
use crate::io::format_float;
use crate::state::{init_gaussian, GaussianPacket, SpinorField};
use crate::units::Units;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: unknown section [{section}]")]
    UnknownSection { line: usize, section: String },
    #[error("line {line}: unknown key '{key}' in [{section}]")]
    UnknownKey { line: usize, section: String, key: String },
    #[error("line {line}: duplicate key '{key}' in [{section}]")]
    Duplicate { line: usize, section: String, key: String },
    #[error("missing key '{key}' in [{section}]")]
    Missing { section: String, key: String },
    #[error("[{section}] {key}: {message}")]
    Invalid { section: String, key: String, message: String },
}

fn invalid(section: &str, key: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        section: section.into(),
        key: key.into(),
        message: message.into(),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridSpec {
    pub n: Vec<usize>,
    pub extent: Vec<f64>,
}

impl GridSpec {
    pub fn dim(&self) -> usize {
        self.n.len()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct InitialSpec {
    pub center: [f64; 3],
    pub width: [f64; 3],
    pub momentum: [f64; 3],
    pub spinor: [Complex64; 2],
}

impl InitialSpec {
    pub fn packet(&self) -> GaussianPacket {
        GaussianPacket {
            center: self.center,
            width: self.width,
            momentum: self.momentum,
            spinor: self.spinor,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PotentialSpec {
    pub preset: PresetKind,
    pub params: PresetParams,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PropagatorSpec {
    pub config: PropagatorConfig,
    pub t_end: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OutputSpec {
    /// Steps between spinor dumps; zero disables dumps.
    pub snapshot_stride: usize,
    pub series_stride: usize,
    pub series_path: PathBuf,
    pub centroid_path: PathBuf,
    pub dump_dir: PathBuf,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrajectorySpec {
    /// Number of seeds drawn from the first snapshot's density, used when
    /// `seeds` is empty.
    pub count: usize,
    pub rng_seed: u64,
    pub seeds: Vec<[f64; 3]>,
    pub dt: f64,
    pub eps: f64,
    pub current: CurrentSelection,
    pub output_dir: PathBuf,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ArrivalSpec {
    pub axis: usize,
    pub position: f64,
}

impl ArrivalSpec {
    pub fn plane(&self) -> Plane {
        Plane {
            id: 0,
            axis: self.axis,
            position: self.position,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimConfig {
    pub units: Units,
    pub grid: GridSpec,
    pub initial: InitialSpec,
    pub potential: PotentialSpec,
    pub propagator: PropagatorSpec,
    pub output: OutputSpec,
    pub trajectories: Option<TrajectorySpec>,
    pub arrival: Option<ArrivalSpec>,
}

const SECTIONS: [(&str, &[&str]); 8] = [
    ("units", &["q"]),
    ("grid", &["dim", "n", "extent"]),
    ("initial", &["center", "width", "momentum", "spinor"]),
    ("potential", &[]),
    ("propagator", &["scheme", "dt", "t_end", "krylov_dim", "tol"]),
    (
        "output",
        &["snapshot_stride", "series_stride", "series_path", "centroid_path", "dump_dir"],
    ),
    (
        "trajectories",
        &["count", "rng_seed", "seeds", "dt", "eps", "current", "output_dir"],
    ),
    ("arrival", &["axis", "position"]),
];

/// Raw `key = value` pairs of one section, in file order.
#[derive(Debug, Default)]
struct Section {
    entries: Vec<(String, String, usize)>,
}

impl Section {
    fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _, _)| k == key).map(|(_, v, _)| v.as_str())
    }
}

fn tokenize(text: &str) -> Result<Vec<(String, Section)>, ConfigError> {
    let mut sections: Vec<(String, Section)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
            continue;
        }
        if let Some(rest) = line.strip_prefix('[') {
            let name = rest.strip_suffix(']').ok_or_else(|| ConfigError::Syntax {
                line: line_no,
                message: format!("unterminated section header '{line}'"),
            })?;
            let name = name.trim().to_string();
            if !SECTIONS.iter().any(|(s, _)| *s == name) {
                return Err(ConfigError::UnknownSection { line: line_no, section: name });
            }
            if sections.iter().any(|(s, _)| *s == name) {
                return Err(ConfigError::Syntax {
                    line: line_no,
                    message: format!("section [{name}] appears twice"),
                });
            }
            sections.push((name, Section::default()));
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(ConfigError::Syntax {
                line: line_no,
                message: format!("expected 'key = value', found '{line}'"),
            });
        };
        let (key, value) = (k.trim().to_string(), v.trim().to_string());
        let Some((name, section)) = sections.last_mut() else {
            return Err(ConfigError::Syntax {
                line: line_no,
                message: format!("key '{key}' before any section header"),
            });
        };
        let allowed = SECTIONS.iter().find(|(s, _)| s == name).expect("known section").1;
        if name != "potential" && !allowed.contains(&key.as_str()) {
            return Err(ConfigError::UnknownKey {
                line: line_no,
                section: name.clone(),
                key,
            });
        }
        if section.get(&key).is_some() {
            return Err(ConfigError::Duplicate {
                line: line_no,
                section: name.clone(),
                key,
            });
        }
        section.entries.push((key, value, line_no));
    }
    Ok(sections)
}

struct Reader<'a> {
    name: &'static str,
    section: Option<&'a Section>,
}

impl<'a> Reader<'a> {
    fn raw(&self, key: &str) -> Option<&'a str> {
        self.section.and_then(|s| s.get(key))
    }

    fn required(&self, key: &str) -> Result<&'a str, ConfigError> {
        self.raw(key).ok_or_else(|| ConfigError::Missing {
            section: self.name.into(),
            key: key.into(),
        })
    }

    fn parse<T: FromStr>(&self, key: &str, s: &str) -> Result<T, ConfigError>
    where
        T::Err: std::fmt::Display,
    {
        s.parse().map_err(|e| invalid(self.name, key, format!("'{s}': {e}")))
    }

    fn value<T: FromStr>(&self, key: &str, default: Option<T>) -> Result<T, ConfigError>
    where
        T::Err: std::fmt::Display,
    {
        match (self.raw(key), default) {
            (Some(s), _) => self.parse(key, s),
            (None, Some(d)) => Ok(d),
            (None, None) => Err(ConfigError::Missing {
                section: self.name.into(),
                key: key.into(),
            }),
        }
    }

    fn list<T: FromStr>(&self, key: &str, s: &str) -> Result<Vec<T>, ConfigError>
    where
        T::Err: std::fmt::Display,
    {
        s.split_whitespace().map(|t| self.parse(key, t)).collect()
    }

    /// One value for all active axes or one per active axis.
    fn per_axis(&self, key: &str, dim: usize, fill: f64, default: Option<f64>) -> Result<[f64; 3], ConfigError> {
        let values: Vec<f64> = match self.raw(key) {
            Some(s) => self.list(key, s)?,
            None => match default {
                Some(d) => vec![d],
                None => return Err(self.missing(key)),
            },
        };
        let mut out = [fill; 3];
        match values.len() {
            1 => out[..dim].fill(values[0]),
            n if n == dim => out[..dim].copy_from_slice(&values),
            n => return Err(invalid(self.name, key, format!("expected 1 or {dim} values, found {n}"))),
        }
        Ok(out)
    }

    fn missing(&self, key: &str) -> ConfigError {
        ConfigError::Missing {
            section: self.name.into(),
            key: key.into(),
        }
    }
}

fn parse_axis(s: &str) -> Option<usize> {
    match s.trim().to_ascii_lowercase().as_str() {
        "x" | "0" => Some(0),
        "y" | "1" => Some(1),
        "z" | "2" => Some(2),
        _ => None,
    }
}

fn parse_selection(s: &str) -> Option<CurrentSelection> {
    match s.trim().to_ascii_lowercase().as_str() {
        "total" => Some(CurrentSelection::Total),
        "without_spin" => Some(CurrentSelection::WithoutSpin),
        "convective" => Some(CurrentSelection::ConvectiveOnly),
        _ => None,
    }
}

pub fn selection_name(s: CurrentSelection) -> &'static str {
    match s {
        CurrentSelection::Total => "total",
        CurrentSelection::WithoutSpin => "without_spin",
        CurrentSelection::ConvectiveOnly => "convective",
    }
}

impl SimConfig {
    /// Parses and validates.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let config = Self::parse_unvalidated(text)?;
        config.validate()?;
        Ok(config)
    }

    fn parse_unvalidated(text: &str) -> Result<Self, ConfigError> {
        let sections = tokenize(text)?;
        let reader = |name: &'static str| Reader {
            name,
            section: sections.iter().find(|(s, _)| s == name).map(|(_, s)| s),
        };

        let units_r = reader("units");
        let units = Units::with_charge(units_r.value("q", Some(Units::ELECTRON.charge))?);

        let grid_r = reader("grid");
        let dim: usize = grid_r.value("dim", None)?;
        if !(1..=3).contains(&dim) {
            return Err(invalid("grid", "dim", format!("must be 1, 2 or 3, found {dim}")));
        }
        let expand = |key: &str, values: Vec<f64>| -> Result<Vec<f64>, ConfigError> {
            match values.len() {
                1 => Ok(vec![values[0]; dim]),
                n if n == dim => Ok(values),
                n => Err(invalid("grid", key, format!("expected 1 or {dim} values, found {n}"))),
            }
        };
        let n_raw: Vec<f64> = grid_r
            .list::<usize>("n", grid_r.required("n")?)?
            .into_iter()
            .map(|v| v as f64)
            .collect();
        let n = expand("n", n_raw)?.into_iter().map(|v| v as usize).collect();
        let extent = expand("extent", grid_r.list("extent", grid_r.required("extent")?)?)?;
        let grid = GridSpec { n, extent };

        let init_r = reader("initial");
        let spinor_vals: Vec<f64> = match init_r.raw("spinor") {
            Some(s) => init_r.list("spinor", s)?,
            None => vec![1.0, 0.0, 0.0, 0.0],
        };
        if spinor_vals.len() != 4 {
            return Err(invalid(
                "initial",
                "spinor",
                format!("expected 4 values (re1 im1 re2 im2), found {}", spinor_vals.len()),
            ));
        }
        let initial = InitialSpec {
            center: init_r.per_axis("center", dim, 0.0, Some(0.0))?,
            width: init_r.per_axis("width", dim, 1.0, None)?,
            momentum: init_r.per_axis("momentum", dim, 0.0, Some(0.0))?,
            spinor: [
                Complex64::new(spinor_vals[0], spinor_vals[1]),
                Complex64::new(spinor_vals[2], spinor_vals[3]),
            ],
        };

        let pot_r = reader("potential");
        let preset_kind = match pot_r.raw("preset") {
            Some(s) => PresetKind::parse(s).map_err(|e| invalid("potential", "preset", e.to_string()))?,
            None => PresetKind::Zero,
        };
        let mut params = PresetParams::new();
        if let Some(sec) = pot_r.section {
            for (k, v, _) in &sec.entries {
                if k != "preset" {
                    params.insert(k.clone(), pot_r.parse(k, v)?);
                }
            }
        }
        let potential = PotentialSpec {
            preset: preset_kind,
            params,
        };

        let prop_r = reader("propagator");
        let defaults = PropagatorConfig::default();
        let scheme: Scheme = match prop_r.raw("scheme") {
            Some(s) => s.parse().map_err(|e: crate::evolve::EvolveError| invalid("propagator", "scheme", e.to_string()))?,
            None => defaults.scheme,
        };
        let propagator = PropagatorSpec {
            config: PropagatorConfig {
                scheme,
                dt: prop_r.value("dt", None)?,
                krylov_dim: prop_r.value("krylov_dim", Some(defaults.krylov_dim))?,
                tol: prop_r.value("tol", Some(defaults.tol))?,
            },
            t_end: prop_r.value("t_end", None)?,
        };

        let out_r = reader("output");
        let path = |key: &str, default: &str| -> PathBuf { PathBuf::from(out_r.raw(key).unwrap_or(default)) };
        let output = OutputSpec {
            snapshot_stride: out_r.value("snapshot_stride", Some(0))?,
            series_stride: out_r.value("series_stride", Some(1))?,
            series_path: path("series_path", "series.csv"),
            centroid_path: path("centroid_path", "centroid.csv"),
            dump_dir: path("dump_dir", "dumps"),
        };

        let trajectories = match sections.iter().find(|(s, _)| s == "trajectories") {
            None => None,
            Some(_) => {
                let r = reader("trajectories");
                let seeds = match r.raw("seeds") {
                    None => Vec::new(),
                    Some(s) => s
                        .split(';')
                        .filter(|t| !t.trim().is_empty())
                        .map(|t| {
                            let v: Vec<f64> = r.list("seeds", t)?;
                            if v.len() != dim {
                                return Err(invalid(
                                    "trajectories",
                                    "seeds",
                                    format!("each seed needs {dim} coordinates, found {}", v.len()),
                                ));
                            }
                            let mut p = [0.0; 3];
                            p[..dim].copy_from_slice(&v);
                            Ok(p)
                        })
                        .collect::<Result<_, _>>()?,
                };
                let current = match r.raw("current") {
                    None => CurrentSelection::Total,
                    Some(s) => parse_selection(s).ok_or_else(|| {
                        invalid("trajectories", "current", format!("'{s}' is not total, without_spin or convective"))
                    })?,
                };
                Some(TrajectorySpec {
                    count: r.value("count", Some(100))?,
                    rng_seed: r.value("rng_seed", Some(0))?,
                    seeds,
                    dt: r.value("dt", None)?,
                    eps: r.value("eps", Some(DEFAULT_EPS))?,
                    current,
                    output_dir: PathBuf::from(r.raw("output_dir").unwrap_or("trajectories")),
                })
            }
        };

        let arrival = match sections.iter().find(|(s, _)| s == "arrival") {
            None => None,
            Some(_) => {
                let r = reader("arrival");
                let axis_s = r.required("axis")?;
                let axis = parse_axis(axis_s)
                    .ok_or_else(|| invalid("arrival", "axis", format!("'{axis_s}' is not x, y or z")))?;
                Some(ArrivalSpec {
                    axis,
                    position: r.value("position", None)?,
                })
            }
        };

        Ok(Self {
            units,
            grid,
            initial,
            potential,
            propagator,
            output,
            trajectories,
            arrival,
        })
    }

    pub fn load(path: &Path) -> Result<(Self, PathBuf), LoadError> {
        let text = std::fs::read_to_string(path).map_err(|e| LoadError::Io {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        let config = Self::parse(&text).map_err(|error| LoadError::Config {
            path: path.to_path_buf(),
            error,
        })?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok((config, base))
    }

    pub fn build_grid(&self) -> Result<Grid, ConfigError> {
        Grid::centered(&self.grid.n, &self.grid.extent).map_err(|e| invalid("grid", "n", e.to_string()))
    }

    pub fn build_potential(&self) -> Result<EMPotential, ConfigError> {
        preset(self.potential.preset, &self.potential.params, self.units)
            .map_err(|e| invalid("potential", "preset", e.to_string()))
    }

    pub fn build_initial(&self, grid: &Grid) -> Result<SpinorField, ConfigError> {
        init_gaussian(grid, &self.initial.packet()).map_err(|e| invalid("initial", "width", e.to_string()))
    }

    pub fn steps(&self) -> Result<usize, ConfigError> {
        self.propagator
            .config
            .step_count(0.0, self.propagator.t_end)
            .map_err(|e| invalid("propagator", "t_end", e.to_string()))
    }

    pub fn suggested_dt(&self) -> Result<f64, ConfigError> {
        Ok(suggested_dt(&self.build_grid()?, self.units))
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.units.charge.is_finite() && self.units.charge != 0.0) {
            return Err(invalid("units", "q", "must be finite and nonzero"));
        }
        for &e in &self.grid.extent {
            if !(e.is_finite() && e > 0.0) {
                return Err(invalid("grid", "extent", format!("must be positive, found {e}")));
            }
        }
        let grid = self.build_grid()?;
        let p = self.build_potential()?;
        let cfg = &self.propagator.config;
        cfg.validate().map_err(|e| {
            let key = if !(cfg.dt.is_finite() && cfg.dt > 0.0) {
                "dt"
            } else if cfg.krylov_dim < crate::evolve::MIN_KRYLOV_DIM {
                "krylov_dim"
            } else {
                "tol"
            };
            invalid("propagator", key, e.to_string())
        })?;
        self.steps()?;
        if cfg.scheme == Scheme::SplitStep && !p.vector_potential_vanishes_on(&grid, 0.0) {
            return Err(invalid(
                "propagator",
                "scheme",
                format!(
                    "SplitStep requires A ≡ 0, but preset '{}' has a nonzero vector potential on this grid",
                    p.name
                ),
            ));
        }
        if self.output.series_stride == 0 {
            return Err(invalid("output", "series_stride", "must be at least 1"));
        }
        if self.initial.spinor.iter().all(|z| z.norm() == 0.0) {
            return Err(invalid("initial", "spinor", "must be nonzero"));
        }
        self.build_initial(&grid)?;
        if let Some(t) = &self.trajectories {
            if !(t.dt.is_finite() && t.dt > 0.0) {
                return Err(invalid("trajectories", "dt", "must be positive"));
            }
            if !(t.eps.is_finite() && t.eps > 0.0) {
                return Err(invalid("trajectories", "eps", "must be positive"));
            }
            if t.seeds.is_empty() && t.count == 0 {
                return Err(invalid("trajectories", "count", "must be positive when no seeds are listed"));
            }
            if let Some(bad) = t.seeds.iter().find(|s| !grid.contains(**s)) {
                return Err(invalid("trajectories", "seeds", format!("{bad:?} lies outside the grid")));
            }
        }
        if let Some(a) = &self.arrival {
            if a.axis >= self.grid.dim() {
                return Err(invalid("arrival", "axis", format!("axis {} is not active on a {}D grid", a.axis, self.grid.dim())));
            }
        }
        Ok(())
    }

    /// Full text form; every key is written.
    pub fn render(&self) -> String {
        let dim = self.grid.dim();
        let floats = |v: &[f64]| v.iter().map(|x| format_float(*x)).collect::<Vec<_>>().join(" ");
        let mut s = String::new();
        let _ = writeln!(s, "[units]\nq = {}\n", format_float(self.units.charge));
        let _ = writeln!(
            s,
            "[grid]\ndim = {dim}\nn = {}\nextent = {}\n",
            self.grid.n.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(" "),
            floats(&self.grid.extent)
        );
        let sp = self.initial.spinor;
        let _ = writeln!(
            s,
            "[initial]\ncenter = {}\nwidth = {}\nmomentum = {}\nspinor = {}\n",
            floats(&self.initial.center[..dim]),
            floats(&self.initial.width[..dim]),
            floats(&self.initial.momentum[..dim]),
            floats(&[sp[0].re, sp[0].im, sp[1].re, sp[1].im])
        );
        let _ = writeln!(s, "[potential]\npreset = {}", self.potential.preset.name());
        for (k, v) in &self.potential.params {
            let _ = writeln!(s, "{k} = {}", format_float(*v));
        }
        s.push('\n');
        let c = &self.propagator.config;
        let _ = writeln!(
            s,
            "[propagator]\nscheme = {}\ndt = {}\nt_end = {}\nkrylov_dim = {}\ntol = {}\n",
            c.scheme,
            format_float(c.dt),
            format_float(self.propagator.t_end),
            c.krylov_dim,
            format_float(c.tol)
        );
        let o = &self.output;
        let _ = writeln!(
            s,
            "[output]\nsnapshot_stride = {}\nseries_stride = {}\nseries_path = {}\ncentroid_path = {}\ndump_dir = {}",
            o.snapshot_stride,
            o.series_stride,
            o.series_path.display(),
            o.centroid_path.display(),
            o.dump_dir.display()
        );
        if let Some(t) = &self.trajectories {
            let seeds = t
                .seeds
                .iter()
                .map(|p| floats(&p[..dim]))
                .collect::<Vec<_>>()
                .join("; ");
            let _ = writeln!(
                s,
                "\n[trajectories]\ncount = {}\nrng_seed = {}\nseeds = {seeds}\ndt = {}\neps = {}\ncurrent = {}\noutput_dir = {}",
                t.count,
                t.rng_seed,
                format_float(t.dt),
                format_float(t.eps),
                selection_name(t.current),
                t.output_dir.display()
            );
        }
        if let Some(a) = &self.arrival {
            let _ = writeln!(
                s,
                "\n[arrival]\naxis = {}\nposition = {}",
                ["x", "y", "z"][a.axis],
                format_float(a.position)
            );
        }
        s
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LoadError {
    #[error("{}: {message}", path.display())]
    Io { path: PathBuf, message: String },
    #[error("{}: {error}", path.display())]
    Config { path: PathBuf, error: ConfigError },
}
