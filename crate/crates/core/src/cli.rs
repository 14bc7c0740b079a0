//! Command implementations behind the `pauli` binary.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::algebra::{
    a_sweep, check_dirac_algebra, check_linearization_conditions, dirac_rep, symbol_square_residual,
    ConditionReport, DiracRep, ISign, RepKind,
};
use crate::bohm::{arrival_times, integrate_many, sample_seeds, FlowHistory, Termination};
use crate::config::{LoadError, SimConfig};
use crate::currents::{
    auxiliary_spinor_with, continuity_residual_with, decompose_current_with, levy_leblond_current, SpinTerm,
};
use crate::evolve::{propagate, EvolveError, Observer, PropagateFailure};
use crate::fields::EMPotential;
use crate::io::{format_float, read_snapshots, snapshot_name, write_spinor, write_vector, DumpError, DumpHeader, DumpKind};
use crate::state::{Hamiltonian, SpinorField};
use crate::units::Units;

pub const SERIES_HEADER: &str = "t,norm,Sx,Sy,Sz,energy,cont_residual_max,dual_current_maxdiff";
pub const CENTROID_HEADER: &str = "t,x,y,z";
pub const ANALYSIS_HEADER: &str = "t,norm,Sx,Sy,Sz,mux,muy,muz,cont_residual_max,dual_current_maxdiff";
pub const TRAJECTORY_HEADER: &str = "t,x,y,z,vx,vy,vz";
pub const TRAJECTORY_SUMMARY_HEADER: &str = "id,seed_x,seed_y,seed_z,termination,t_last";
pub const ARRIVAL_HEADER: &str = "id,seed_x,seed_y,seed_z,arrival_time";
/// Environment variable overriding the worker thread count.
pub const THREADS_ENV: &str = "PAULI_THREADS";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Numerical(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Numerical(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl From<LoadError> for CliError {
    fn from(e: LoadError) -> Self {
        match e {
            LoadError::Io { .. } => CliError::Io(e.to_string()),
            LoadError::Config { .. } => CliError::Validation(e.to_string()),
        }
    }
}

impl From<DumpError> for CliError {
    fn from(e: DumpError) -> Self {
        match e {
            DumpError::Io { .. } => CliError::Io(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

fn io_error(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |e| CliError::Io(format!("{}: {e}", path.display()))
}

fn csv_row(values: &[f64]) -> String {
    values.iter().map(|v| format_float(*v)).collect::<Vec<_>>().join(",")
}

fn create_writer(path: &Path) -> Result<BufWriter<fs::File>, CliError> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(io_error(parent))?;
    }
    Ok(BufWriter::new(fs::File::create(path).map_err(io_error(path))?))
}

// ---------------------------------------------------------------- verify

/// Deliberate faults for exercising the failure path.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Tamper {
    /// Replace `B₅` by `B₄`.
    B5,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct VerifyOptions {
    pub rep: Option<RepKind>,
    pub tamper: Option<Tamper>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifySummary {
    pub passed: usize,
    pub total: usize,
    pub failures: Vec<String>,
}

pub const SYMBOL_DRAWS: usize = 1000;
pub const SYMBOL_BOUND: f64 = 1e-12;

fn tampered(rep: DiracRep) -> DiracRep {
    let mut b = rep.b;
    b[4] = b[3];
    DiracRep::from_matrices(RepKind::Custom, b, rep.a, ISign::Minus).expect("a is nonzero")
}

/// Exact algebra and the plane-wave symbol check for both representations
/// (or one) over the parameter sweep.
pub fn verification_reports(opts: &VerifyOptions) -> Vec<ConditionReport> {
    let kinds: Vec<RepKind> = match opts.rep {
        Some(k) => vec![k],
        None => vec![RepKind::Original, RepKind::Convenient],
    };
    let mut reports = Vec::new();
    for kind in kinds {
        let mut first = true;
        for a in a_sweep() {
            let mut rep = dirac_rep(kind, a).expect("sweep values are nonzero");
            if opts.tamper == Some(Tamper::B5) {
                rep = tampered(rep);
                rep.kind = kind;
            }
            if first {
                let mut r = check_dirac_algebra(&rep.b);
                r.title = format!("Dirac algebra ({})", kind.label());
                reports.push(r);
                first = false;
            }
            let mut r = check_linearization_conditions(&rep);
            let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
            let worst = (0..SYMBOL_DRAWS)
                .map(|_| {
                    let k = [0; 3].map(|_: i32| rng.random_range(-3.0..3.0));
                    let omega = rng.random_range(-3.0..3.0);
                    symbol_square_residual(&rep, k, omega, 1.0)
                })
                .fold(0.0, f64::max);
            r.push_float(
                format!("theta^2 = (k^2 - 2w) I over {SYMBOL_DRAWS} draws"),
                worst,
                SYMBOL_BOUND,
            );
            reports.push(r);
        }
    }
    reports
}

pub fn run_verify(opts: &VerifyOptions, out: &mut dyn Write) -> Result<VerifySummary, CliError> {
    let reports = verification_reports(opts);
    let mut summary = VerifySummary {
        passed: 0,
        total: 0,
        failures: Vec::new(),
    };
    for r in &reports {
        let _ = writeln!(out, "{r}");
        summary.passed += r.passed_count();
        summary.total += r.gated_count();
        summary
            .failures
            .extend(r.failures().map(|c| format!("{}: {}", r.title, c.name)));
    }
    let _ = writeln!(out, "{}/{} conditions pass", summary.passed, summary.total);
    if summary.failures.is_empty() {
        Ok(summary)
    } else {
        Err(CliError::Numerical(format!(
            "{} condition(s) failed, first: {}",
            summary.failures.len(),
            summary.failures[0]
        )))
    }
}

// ---------------------------------------------------------------- simulate

/// Per-state diagnostics shared by `simulate` and `analyze`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Diagnostics {
    pub norm: f64,
    pub spin: [f64; 3],
    pub moment: [f64; 3],
    pub energy: f64,
    pub cont_residual_max: f64,
    pub dual_current_maxdiff: f64,
    pub centroid: [f64; 3],
}

pub fn diagnostics(h: &Hamiltonian, f: &SpinorField, spin: SpinTerm) -> Result<Diagnostics, CliError> {
    let units = h.units();
    let dec = decompose_current_with(h, f);
    let chi = auxiliary_spinor_with(h, f);
    let ll = levy_leblond_current(f, &chi).map_err(|e| CliError::Numerical(e.to_string()))?;
    Ok(Diagnostics {
        norm: f.norm(),
        spin: f.expect_spin(),
        moment: f.expect_moment(units),
        energy: f.inner(&h.apply(f)).re,
        cont_residual_max: continuity_residual_with(h, f, spin).max_abs(),
        dual_current_maxdiff: dec.j_total.max_diff(&ll),
        centroid: f.expect_position(),
    })
}

struct HamiltonianCache<'a> {
    p: &'a EMPotential,
    units: Units,
    frozen: Option<Hamiltonian>,
}

impl<'a> HamiltonianCache<'a> {
    fn new(p: &'a EMPotential, units: Units) -> Self {
        Self {
            p,
            units,
            frozen: None,
        }
    }

    fn at(&mut self, f: &SpinorField, t: f64) -> Hamiltonian {
        if self.p.time_dependent {
            return Hamiltonian::new(f.grid(), self.p, t, self.units);
        }
        self.frozen
            .get_or_insert_with(|| Hamiltonian::new(f.grid(), self.p, t, self.units))
            .clone()
    }
}

struct SeriesObserver<'a, W: Write> {
    stride: usize,
    series: W,
    centroid: W,
    cache: HamiltonianCache<'a>,
    last_error: Option<CliError>,
}

impl<W: Write> Observer for SeriesObserver<'_, W> {
    fn stride(&self) -> usize {
        self.stride
    }

    fn observe(&mut self, _step: usize, t: f64, state: &SpinorField) -> Result<(), EvolveError> {
        let h = self.cache.at(state, t);
        let d = diagnostics(&h, state, SpinTerm::Include).map_err(|e| EvolveError::Observer(e.to_string()))?;
        let row = csv_row(&[
            t,
            d.norm,
            d.spin[0],
            d.spin[1],
            d.spin[2],
            d.energy,
            d.cont_residual_max,
            d.dual_current_maxdiff,
        ]);
        let c = csv_row(&[t, d.centroid[0], d.centroid[1], d.centroid[2]]);
        let res = writeln!(self.series, "{row}").and_then(|_| writeln!(self.centroid, "{c}"));
        res.map_err(|e| {
            self.last_error = Some(CliError::Io(format!("writing series: {e}")));
            EvolveError::Observer(e.to_string())
        })
    }
}

struct DumpObserver<'a> {
    stride: usize,
    dir: PathBuf,
    header: DumpHeader,
    p: &'a EMPotential,
    last_error: Option<CliError>,
}

impl Observer for DumpObserver<'_> {
    fn stride(&self) -> usize {
        self.stride
    }

    fn observe(&mut self, step: usize, t: f64, state: &SpinorField) -> Result<(), EvolveError> {
        let mut header = self.header.clone().with_potential(self.p);
        header.time = t;
        write_spinor(&self.dir.join(snapshot_name(step)), state, &header).map_err(|e| {
            self.last_error = Some(CliError::Io(e.to_string()));
            EvolveError::Observer(e.to_string())
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimulateSummary {
    pub steps: usize,
    pub final_norm: f64,
    pub series_path: PathBuf,
    pub centroid_path: PathBuf,
    pub dump_dir: Option<PathBuf>,
}

pub fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

pub fn run_simulate(config_path: &Path, out: &mut dyn Write) -> Result<SimulateSummary, CliError> {
    let (cfg, base) = SimConfig::load(config_path)?;
    simulate(&cfg, &base, out)
}

/// Runs a parsed configuration; relative output paths resolve against `base`.
pub fn simulate(cfg: &SimConfig, base: &Path, out: &mut dyn Write) -> Result<SimulateSummary, CliError> {
    let invalid = |e: crate::config::ConfigError| CliError::Validation(e.to_string());
    cfg.validate().map_err(invalid)?;
    let grid = cfg.build_grid().map_err(invalid)?;
    let p = cfg.build_potential().map_err(invalid)?;
    let f0 = cfg.build_initial(&grid).map_err(invalid)?;
    let units = cfg.units;
    let prop = cfg.propagator.config;
    let _ = writeln!(
        out,
        "grid {:?}, scheme {}, dt {}, suggested dt {}, steps {}",
        cfg.grid.n,
        prop.scheme,
        format_float(prop.dt),
        format_float(cfg.suggested_dt().map_err(invalid)?),
        cfg.steps().map_err(invalid)?
    );

    let series_path = resolve(base, &cfg.output.series_path);
    let centroid_path = resolve(base, &cfg.output.centroid_path);
    let mut series = create_writer(&series_path)?;
    let mut centroid = create_writer(&centroid_path)?;
    writeln!(series, "{SERIES_HEADER}").map_err(io_error(&series_path))?;
    writeln!(centroid, "{CENTROID_HEADER}").map_err(io_error(&centroid_path))?;

    let mut series_obs = SeriesObserver {
        stride: cfg.output.series_stride,
        series,
        centroid,
        cache: HamiltonianCache::new(&p, units),
        last_error: None,
    };
    let dump_dir = (cfg.output.snapshot_stride > 0).then(|| resolve(base, &cfg.output.dump_dir));
    if let Some(d) = &dump_dir {
        fs::create_dir_all(d).map_err(io_error(d))?;
    }
    let mut dump_obs = dump_dir.as_ref().map(|d| DumpObserver {
        stride: cfg.output.snapshot_stride,
        dir: d.clone(),
        header: DumpHeader::new(DumpKind::Spinor, &grid, 0.0, units),
        p: &p,
        last_error: None,
    });

    let result = {
        let mut observers: Vec<&mut dyn Observer> = vec![&mut series_obs];
        if let Some(d) = dump_obs.as_mut() {
            observers.push(d);
        }
        propagate(&f0, &p, units, &prop, 0.0, cfg.propagator.t_end, &mut observers)
    };
    series_obs.series.flush().map_err(io_error(&series_path))?;
    series_obs.centroid.flush().map_err(io_error(&centroid_path))?;

    let record = match result {
        Ok(r) => r,
        Err(failure) => {
            let failure: Box<PropagateFailure> = failure;
            let io = series_obs
                .last_error
                .take()
                .or_else(|| dump_obs.as_mut().and_then(|d| d.last_error.take()));
            return Err(io.unwrap_or_else(|| CliError::Numerical(failure.to_string())));
        }
    };
    let final_norm = record.final_state.norm();
    let _ = writeln!(
        out,
        "completed {} steps to t = {}; norm drift {:.3e}, energy drift {:.3e}",
        record.steps,
        format_float(record.final_time),
        record.max_norm_drift(),
        record.max_energy_drift()
    );
    Ok(SimulateSummary {
        steps: record.steps,
        final_norm,
        series_path,
        centroid_path,
        dump_dir,
    })
}

// ---------------------------------------------------------------- analyze

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct AnalyzeOptions {
    pub omit_spin: bool,
    /// Also dump `j_total` for every snapshot.
    pub dump_currents: bool,
}

pub fn run_analyze(dir: &Path, opts: &AnalyzeOptions, out: &mut dyn Write) -> Result<PathBuf, CliError> {
    let snaps = read_snapshots(dir)?;
    let first = &snaps[0].0;
    let p = first
        .potential()
        .map_err(|e| CliError::Validation(format!("{}: {e}", dir.display())))?;
    let units = first.units;
    let spin = if opts.omit_spin { SpinTerm::Omit } else { SpinTerm::Include };
    let path = dir.join("analysis.csv");
    let mut w = create_writer(&path)?;
    writeln!(w, "{ANALYSIS_HEADER}").map_err(io_error(&path))?;
    let mut cache = HamiltonianCache::new(&p, units);
    for (i, (header, f)) in snaps.iter().enumerate() {
        let h = cache.at(f, header.time);
        let d = diagnostics(&h, f, spin)?;
        let row = csv_row(&[
            header.time,
            d.norm,
            d.spin[0],
            d.spin[1],
            d.spin[2],
            d.moment[0],
            d.moment[1],
            d.moment[2],
            d.cont_residual_max,
            d.dual_current_maxdiff,
        ]);
        writeln!(w, "{row}").map_err(io_error(&path))?;
        if opts.dump_currents {
            let dec = decompose_current_with(&h, f);
            let mut vh = header.clone();
            vh.kind = DumpKind::Vector;
            write_vector(&dir.join(format!("current_{i:08}.dump")), &dec.j_total, &vh)?;
        }
    }
    w.flush().map_err(io_error(&path))?;
    let _ = writeln!(out, "analyzed {} snapshots into {}", snaps.len(), path.display());
    Ok(path)
}

// ---------------------------------------------------------------- trajectories

fn termination_name(t: Termination) -> String {
    match t {
        Termination::Completed => "completed".into(),
        Termination::LeftDomain => "left_domain".into(),
        Termination::LowDensity => "low_density".into(),
        Termination::Arrived(id) => format!("arrived_{id}"),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoriesSummary {
    pub count: usize,
    pub output_dir: PathBuf,
    pub arrivals_path: Option<PathBuf>,
}

pub fn run_trajectories(dir: &Path, config_path: &Path, out: &mut dyn Write) -> Result<TrajectoriesSummary, CliError> {
    let (cfg, base) = SimConfig::load(config_path)?;
    let spec = cfg
        .trajectories
        .clone()
        .ok_or_else(|| CliError::Validation(format!("{}: missing [trajectories] section", config_path.display())))?;
    let snaps = read_snapshots(dir)?;
    let first = &snaps[0].0;
    let p = first
        .potential()
        .map_err(|e| CliError::Validation(format!("{}: {e}", dir.display())))?;
    let states: Vec<(f64, SpinorField)> = snaps.iter().map(|(h, f)| (h.time, f.clone())).collect();
    let flow = FlowHistory::from_states(&states, &p, first.units, spec.current, spec.eps)
        .map_err(|e| CliError::Validation(e.to_string()))?;
    let (t0, t1) = flow.time_span();
    let seeds = if spec.seeds.is_empty() {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.rng_seed);
        sample_seeds(&states[0].1.density(), spec.count, &mut rng)
    } else {
        spec.seeds.clone()
    };
    let planes: Vec<_> = cfg.arrival.iter().map(|a| a.plane()).collect();
    let trajs = integrate_many(&flow, &seeds, t0, t1, spec.dt, &planes)
        .map_err(|e| CliError::Validation(e.to_string()))?;

    let out_dir = resolve(&base, &spec.output_dir);
    fs::create_dir_all(&out_dir).map_err(io_error(&out_dir))?;
    let summary_path = out_dir.join("summary.csv");
    let mut summary = create_writer(&summary_path)?;
    writeln!(summary, "{TRAJECTORY_SUMMARY_HEADER}").map_err(io_error(&summary_path))?;
    for (i, tr) in trajs.iter().enumerate() {
        let path = out_dir.join(format!("traj_{i:05}.csv"));
        let mut w = create_writer(&path)?;
        writeln!(w, "{TRAJECTORY_HEADER}").map_err(io_error(&path))?;
        for s in &tr.samples {
            let row = csv_row(&[
                s.t,
                s.position[0],
                s.position[1],
                s.position[2],
                s.velocity[0],
                s.velocity[1],
                s.velocity[2],
            ]);
            writeln!(w, "{row}").map_err(io_error(&path))?;
        }
        w.flush().map_err(io_error(&path))?;
        writeln!(
            summary,
            "{i},{},{},{}",
            csv_row(&tr.seed),
            termination_name(tr.terminated),
            format_float(tr.last().t)
        )
        .map_err(io_error(&summary_path))?;
    }
    summary.flush().map_err(io_error(&summary_path))?;

    let arrivals_path = match &cfg.arrival {
        None => None,
        Some(a) => {
            let path = out_dir.join("arrivals.csv");
            let mut w = create_writer(&path)?;
            writeln!(w, "{ARRIVAL_HEADER}").map_err(io_error(&path))?;
            for (i, arr) in arrival_times(&trajs, &a.plane()).iter().enumerate() {
                let time = arr.time.map(format_float).unwrap_or_default();
                writeln!(w, "{i},{},{time}", csv_row(&arr.seed)).map_err(io_error(&path))?;
            }
            w.flush().map_err(io_error(&path))?;
            Some(path)
        }
    };
    let _ = writeln!(out, "integrated {} trajectories into {}", trajs.len(), out_dir.display());
    Ok(TrajectoriesSummary {
        count: trajs.len(),
        output_dir: out_dir,
        arrivals_path,
    })
}
