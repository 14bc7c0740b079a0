//! Time propagation of Pauli spinors.

mod krylov;
mod splitstep;

pub use krylov::{krylov_exp, step_krylov, KrylovInfo};
pub use splitstep::{step_splitstep, SplitStepper};

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::fields::EMPotential;
use crate::spectral::Spectral;
use crate::state::{Hamiltonian, SpinorField};
use crate::units::Units;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvolveError {
    #[error("split-step requires a vector potential that vanishes on the grid")]
    VectorPotentialPresent,
    #[error("Krylov exponential did not converge in {dim} vectors (estimate {estimate:.3e})")]
    KrylovNotConverged { dim: usize, estimate: f64 },
    #[error("invalid propagator configuration: {0}")]
    InvalidConfig(String),
    #[error("state became non-finite at step {step}")]
    NonFinite { step: usize },
    #[error("observer failed: {0}")]
    Observer(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Scheme {
    SplitStep,
    #[default]
    Krylov,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::SplitStep => "splitstep",
            Scheme::Krylov => "krylov",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = EvolveError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "splitstep" => Ok(Scheme::SplitStep),
            "krylov" | "lanczos" => Ok(Scheme::Krylov),
            _ => Err(EvolveError::InvalidConfig(format!("unknown scheme '{s}'"))),
        }
    }
}

pub const MIN_KRYLOV_DIM: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PropagatorConfig {
    pub scheme: Scheme,
    pub dt: f64,
    pub krylov_dim: usize,
    pub tol: f64,
}

impl Default for PropagatorConfig {
    fn default() -> Self {
        Self {
            scheme: Scheme::Krylov,
            dt: 0.01,
            krylov_dim: 30,
            tol: 1e-10,
        }
    }
}

impl PropagatorConfig {
    pub fn krylov(dt: f64) -> Self {
        Self {
            dt,
            ..Self::default()
        }
    }

    pub fn splitstep(dt: f64) -> Self {
        Self {
            scheme: Scheme::SplitStep,
            dt,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), EvolveError> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(EvolveError::InvalidConfig(format!("dt must be positive, got {}", self.dt)));
        }
        if self.scheme == Scheme::Krylov {
            if self.krylov_dim < MIN_KRYLOV_DIM {
                return Err(EvolveError::InvalidConfig(format!(
                    "krylov_dim must be at least {MIN_KRYLOV_DIM}, got {}",
                    self.krylov_dim
                )));
            }
            if !(self.tol.is_finite() && self.tol > 0.0) {
                return Err(EvolveError::InvalidConfig(format!("tol must be positive, got {}", self.tol)));
            }
        }
        Ok(())
    }

    /// Number of whole steps covering `[t0, t1]`.
    pub fn step_count(&self, t0: f64, t1: f64) -> Result<usize, EvolveError> {
        let span = t1 - t0;
        if !(span.is_finite() && span >= 0.0) {
            return Err(EvolveError::InvalidConfig(format!("end time {t1} precedes start {t0}")));
        }
        let n = (span / self.dt).round();
        if (n * self.dt - span).abs() > 1e-9 * span.abs().max(1.0) {
            return Err(EvolveError::InvalidConfig(format!(
                "duration {span} is not a whole number of steps of {}",
                self.dt
            )));
        }
        Ok(n as usize)
    }
}

/// Stable explicit step estimate: a quarter of the period of the fastest
/// resolved kinetic mode.
pub fn suggested_dt(grid: &crate::Grid, units: Units) -> f64 {
    let h = (0..3)
        .filter(|&a| grid.is_active(a))
        .map(|a| grid.spacing(a))
        .fold(f64::INFINITY, f64::min);
    0.25 * units.mass * h * h / std::f64::consts::PI
}

/// Callback invoked on the propagated state.
pub trait Observer {
    /// Steps between calls. Step 0 and the last step are always observed.
    fn stride(&self) -> usize {
        1
    }

    fn observe(&mut self, step: usize, t: f64, state: &SpinorField) -> Result<(), EvolveError>;
}

/// Adapts a closure into an [`Observer`].
pub struct FnObserver<F> {
    pub stride: usize,
    pub f: F,
}

impl<F> Observer for FnObserver<F>
where
    F: FnMut(usize, f64, &SpinorField) -> Result<(), EvolveError>,
{
    fn stride(&self) -> usize {
        self.stride
    }

    fn observe(&mut self, step: usize, t: f64, state: &SpinorField) -> Result<(), EvolveError> {
        (self.f)(step, t, state)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepSample {
    pub step: usize,
    pub t: f64,
    pub norm: f64,
    pub spin: [f64; 3],
    pub energy: f64,
}

#[derive(Clone, Debug)]
pub struct RunRecord {
    pub samples: Vec<StepSample>,
    pub final_state: SpinorField,
    pub final_time: f64,
    pub steps: usize,
    /// Largest Krylov subspace used; zero for split-step runs.
    pub max_krylov_dim: usize,
}

impl RunRecord {
    pub fn max_norm_drift(&self) -> f64 {
        let n0 = self.samples.first().map_or(1.0, |s| s.norm);
        self.samples.iter().map(|s| (s.norm - n0).abs()).fold(0.0, f64::max)
    }

    pub fn max_energy_drift(&self) -> f64 {
        let e0 = self.samples.first().map_or(0.0, |s| s.energy);
        self.samples.iter().map(|s| (s.energy - e0).abs()).fold(0.0, f64::max)
    }
}

/// A failed run together with everything recorded before the failure.
#[derive(Clone, Debug)]
pub struct PropagateFailure {
    pub error: EvolveError,
    pub partial: RunRecord,
}

impl fmt::Display for PropagateFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (after {} steps, t = {})", self.error, self.partial.steps, self.partial.final_time)
    }
}

impl std::error::Error for PropagateFailure {}

struct Engine<'a> {
    p: &'a EMPotential,
    units: Units,
    cfg: PropagatorConfig,
    spectral: Spectral,
    frozen: Option<Hamiltonian>,
    stepper: Option<SplitStepper>,
}

impl<'a> Engine<'a> {
    fn new(grid: &crate::Grid, p: &'a EMPotential, units: Units, cfg: PropagatorConfig) -> Self {
        let spectral = Spectral::new(grid);
        let frozen = (!p.time_dependent)
            .then(|| Hamiltonian::with_sampled(spectral.clone(), p.sample(grid, 0.0), units));
        let stepper = (cfg.scheme == Scheme::SplitStep)
            .then(|| SplitStepper::new(spectral.clone(), units, cfg.dt));
        Self {
            p,
            units,
            cfg,
            spectral,
            frozen,
            stepper,
        }
    }

    fn hamiltonian_at(&self, t: f64) -> std::borrow::Cow<'_, Hamiltonian> {
        match &self.frozen {
            Some(h) => std::borrow::Cow::Borrowed(h),
            None => std::borrow::Cow::Owned(Hamiltonian::with_sampled(
                self.spectral.clone(),
                self.p.sample(self.spectral.grid(), t),
                self.units,
            )),
        }
    }

    fn check_splitstep(&self, t: f64) -> Result<(), EvolveError> {
        if self.cfg.scheme == Scheme::SplitStep
            && !self.p.vector_potential_vanishes_on(self.spectral.grid(), t)
        {
            return Err(EvolveError::VectorPotentialPresent);
        }
        Ok(())
    }

    fn step(&self, f: &SpinorField, t: f64) -> Result<(SpinorField, usize), EvolveError> {
        let mid = t + 0.5 * self.cfg.dt;
        let h = self.hamiltonian_at(mid);
        match &self.stepper {
            Some(s) => {
                if self.p.time_dependent {
                    self.check_splitstep(mid)?;
                }
                Ok((s.step(f, h.potential())?, 0))
            }
            None => {
                let (out, info) = krylov_exp(&h, f, self.cfg.dt, self.cfg.krylov_dim, self.cfg.tol)?;
                Ok((out, info.dim))
            }
        }
    }

    fn sample(&self, step: usize, t: f64, f: &SpinorField) -> StepSample {
        let h = self.hamiltonian_at(t);
        StepSample {
            step,
            t,
            norm: f.norm(),
            spin: f.expect_spin(),
            energy: f.inner(&h.apply(f)).re,
        }
    }
}

/// Propagates `f0` from `t0` to `t1` in steps of `cfg.dt`, recording norm,
/// spin and energy after every step and calling each observer on its stride.
pub fn propagate(
    f0: &SpinorField,
    p: &EMPotential,
    units: Units,
    cfg: &PropagatorConfig,
    t0: f64,
    t1: f64,
    observers: &mut [&mut dyn Observer],
) -> Result<RunRecord, Box<PropagateFailure>> {
    let mut record = RunRecord {
        samples: Vec::new(),
        final_state: f0.clone(),
        final_time: t0,
        steps: 0,
        max_krylov_dim: 0,
    };
    let fail = |error, record: RunRecord| Box::new(PropagateFailure { error, partial: record });

    let n_steps = match cfg.validate().and_then(|_| cfg.step_count(t0, t1)) {
        Ok(n) => n,
        Err(e) => return Err(fail(e, record)),
    };
    let engine = Engine::new(f0.grid(), p, units, *cfg);
    if let Err(e) = engine.check_splitstep(t0) {
        return Err(fail(e, record));
    }

    let notify = |observers: &mut [&mut dyn Observer], step: usize, t: f64, f: &SpinorField| {
        for o in observers.iter_mut() {
            let stride = o.stride().max(1);
            if step.is_multiple_of(stride) || step == n_steps {
                o.observe(step, t, f)?;
            }
        }
        Ok(())
    };

    record.samples.push(engine.sample(0, t0, f0));
    if let Err(e) = notify(observers, 0, t0, f0) {
        return Err(fail(e, record));
    }
    let mut state = f0.clone();
    for step in 1..=n_steps {
        let t_prev = t0 + (step - 1) as f64 * cfg.dt;
        let t = if step == n_steps { t1 } else { t0 + step as f64 * cfg.dt };
        let (next, dim) = match engine.step(&state, t_prev) {
            Ok(r) => r,
            Err(e) => return Err(fail(e, record)),
        };
        if !next.is_finite() {
            return Err(fail(EvolveError::NonFinite { step }, record));
        }
        state = next;
        record.max_krylov_dim = record.max_krylov_dim.max(dim);
        record.samples.push(engine.sample(step, t, &state));
        record.final_state = state.clone();
        record.final_time = t;
        record.steps = step;
        if let Err(e) = notify(observers, step, t, &state) {
            return Err(fail(e, record));
        }
    }
    Ok(record)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{preset, PresetKind, PresetParams};
    use crate::state::{init_gaussian, spin_up, GaussianPacket};
    use crate::Grid;
    use num_complex::Complex64;
    use std::f64::consts::PI;
    use std::sync::Arc;

    const ELECTRON: Units = Units::ELECTRON;

    fn params(pairs: &[(&str, f64)]) -> PresetParams {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    fn line_grid(n: usize, extent: f64) -> Grid {
        Grid::centered(&[n], &[extent]).unwrap()
    }

    fn plane_wave(grid: &Grid, k: f64, spinor: [Complex64; 2]) -> SpinorField {
        let mut f = SpinorField::from_fn(grid, |r| {
            let ph = Complex64::from_polar(1.0, k * r[0]);
            [ph * spinor[0], ph * spinor[1]]
        });
        let n = f.norm();
        f.scale_mut(Complex64::from(1.0 / n));
        f
    }

    fn max_diff(a: &SpinorField, b: &SpinorField) -> f64 {
        a.axpy(Complex64::from(-1.0), b).max_abs()
    }

    #[test]
    fn plane_wave_acquires_kinetic_phase() {
        let grid = line_grid(64, 2.0 * PI);
        let k = 3.0;
        let f = plane_wave(&grid, k, spin_up());
        let t = 0.5;
        let expected = f.scaled(Complex64::from_polar(1.0, -k * k * t / 2.0));
        for cfg in [PropagatorConfig::splitstep(0.05), PropagatorConfig::krylov(0.05)] {
            let rec = propagate(&f, &EMPotential::zero(), ELECTRON, &cfg, 0.0, t, &mut []).unwrap();
            assert_eq!(rec.steps, 10);
            assert!(max_diff(&rec.final_state, &expected) < 1e-12, "{:?}", cfg.scheme);
        }
    }

    #[test]
    fn zeeman_eigenstate_phase() {
        // Along x the Landau gauge has A = 0 while B = B0 ẑ.
        let grid = line_grid(64, 2.0 * PI);
        let b0 = 0.7;
        let p = preset(PresetKind::UniformBLandau, &params(&[("B0", b0)]), ELECTRON).unwrap();
        let k = 2.0;
        let f = plane_wave(&grid, k, spin_up());
        let t = 1.0;
        let ez = -ELECTRON.magneton() * b0;
        let expected = f.scaled(Complex64::from_polar(1.0, -(k * k / 2.0 + ez) * t));
        for cfg in [PropagatorConfig::splitstep(0.1), PropagatorConfig::krylov(0.1)] {
            let rec = propagate(&f, &p, ELECTRON, &cfg, 0.0, t, &mut []).unwrap();
            assert!(max_diff(&rec.final_state, &expected) < 1e-11, "{:?}", cfg.scheme);
        }
    }

    #[test]
    fn larmor_precession() {
        let grid = line_grid(128, 32.0);
        let b0 = 1.3;
        let p = preset(PresetKind::UniformBLandau, &params(&[("B0", b0)]), ELECTRON).unwrap();
        let s = 1.0 / 2f64.sqrt();
        let packet = GaussianPacket::at_rest([0.0; 3], 1.5, [Complex64::from(s), Complex64::from(s)]);
        let f = init_gaussian(&grid, &packet).unwrap();
        let omega = ELECTRON.cyclotron_frequency(b0);
        let rec = propagate(&f, &p, ELECTRON, &PropagatorConfig::splitstep(0.02), 0.0, 4.0, &mut []).unwrap();
        for smp in &rec.samples {
            assert!((smp.spin[0] - 0.5 * (omega * smp.t).cos()).abs() < 1e-10);
            assert!(smp.spin[2].abs() < 1e-12);
        }
    }

    #[test]
    fn krylov_matches_exact_splitting() {
        // Kinetic and uniform Zeeman terms commute, so Strang is exact here.
        let grid = line_grid(256, 40.0);
        let p = preset(PresetKind::UniformBLandau, &params(&[("B0", 0.9)]), ELECTRON).unwrap();
        let packet = GaussianPacket {
            center: [-3.0, 0.0, 0.0],
            width: [1.2; 3],
            momentum: [1.5, 0.0, 0.0],
            spinor: [Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)],
        };
        let f = init_gaussian(&grid, &packet).unwrap();
        let a = propagate(&f, &p, ELECTRON, &PropagatorConfig::splitstep(0.01), 0.0, 2.0, &mut []).unwrap();
        let b = propagate(&f, &p, ELECTRON, &PropagatorConfig::krylov(0.01), 0.0, 2.0, &mut []).unwrap();
        assert!(max_diff(&a.final_state, &b.final_state) < 1e-9);
    }

    #[test]
    fn harmonic_norm_and_energy_conserved() {
        let grid = line_grid(128, 24.0);
        let p = preset(PresetKind::Harmonic, &params(&[("omega0", 0.8)]), ELECTRON).unwrap();
        let packet = GaussianPacket {
            center: [2.0, 0.0, 0.0],
            width: [0.9; 3],
            momentum: [0.5, 0.0, 0.0],
            spinor: spin_up(),
        };
        let f = init_gaussian(&grid, &packet).unwrap();
        let rec = propagate(&f, &p, ELECTRON, &PropagatorConfig::krylov(0.02), 0.0, 4.0, &mut []).unwrap();
        assert!(rec.max_norm_drift() < 1e-10, "{}", rec.max_norm_drift());
        assert!(rec.max_energy_drift() < 1e-8, "{}", rec.max_energy_drift());
        assert!(rec.max_krylov_dim >= MIN_KRYLOV_DIM);
    }

    #[test]
    fn harmonic_splitstep_is_second_order() {
        let grid = line_grid(128, 24.0);
        let p = preset(PresetKind::Harmonic, &params(&[("omega0", 0.8)]), ELECTRON).unwrap();
        let packet = GaussianPacket {
            center: [2.0, 0.0, 0.0],
            width: [0.9; 3],
            momentum: [0.0; 3],
            spinor: spin_up(),
        };
        let f = init_gaussian(&grid, &packet).unwrap();
        let reference = propagate(&f, &p, ELECTRON, &PropagatorConfig::krylov(0.01), 0.0, 1.0, &mut [])
            .unwrap()
            .final_state;
        let err = |dt| {
            let r = propagate(&f, &p, ELECTRON, &PropagatorConfig::splitstep(dt), 0.0, 1.0, &mut []).unwrap();
            max_diff(&r.final_state, &reference)
        };
        let ratio = err(0.04) / err(0.02);
        assert!((3.5..4.5).contains(&ratio), "{ratio}");
    }

    #[test]
    fn landau_orbit_centroid() {
        let grid = Grid::centered(&[64, 64], &[20.0, 20.0]).unwrap();
        let b0 = 1.0;
        let p = preset(PresetKind::UniformBSymmetric, &params(&[("B0", b0)]), ELECTRON).unwrap();
        let k = 0.5;
        let packet = GaussianPacket {
            center: [0.0; 3],
            width: [1.0; 3],
            momentum: [k, 0.0, 0.0],
            spinor: spin_up(),
        };
        let f = init_gaussian(&grid, &packet).unwrap();
        let omega = ELECTRON.cyclotron_frequency(b0);
        let period = 2.0 * PI / omega;
        let dt = period / 128.0;
        let mut positions = Vec::new();
        let mut obs = FnObserver {
            stride: 64,
            f: |_, _, s: &SpinorField| {
                positions.push(s.expect_position());
                Ok(())
            },
        };
        propagate(&f, &p, ELECTRON, &PropagatorConfig::krylov(dt), 0.0, period, &mut [&mut obs]).unwrap();
        assert_eq!(positions.len(), 3);
        // A vanishes at the origin, so the kinetic momentum starts at k and the
        // orbit radius is k / |q|B.
        let half = positions[1];
        let d = (half[0].powi(2) + half[1].powi(2)).sqrt();
        assert!((d - 2.0 * k / b0).abs() < 1e-6, "{d}");
        let back = positions[2];
        assert!(back[0].abs() < 1e-6 && back[1].abs() < 1e-6, "{back:?}");
    }

    #[test]
    fn time_dependent_scalar_phase_uses_midpoint() {
        let grid = line_grid(32, 2.0 * PI);
        let p = EMPotential::custom(
            "ramp",
            Arc::new(|_, t| t),
            Arc::new(|_, _| [0.0; 3]),
            Some(Arc::new(|_, _| [0.0; 3])),
            true,
        );
        let f = plane_wave(&grid, 0.0, spin_up());
        let (t0, t1) = (0.3, 1.3);
        let expected = f.scaled(Complex64::from_polar(1.0, -ELECTRON.charge * (t1 * t1 - t0 * t0) / 2.0));
        for cfg in [PropagatorConfig::splitstep(0.1), PropagatorConfig::krylov(0.1)] {
            let rec = propagate(&f, &p, ELECTRON, &cfg, t0, t1, &mut []).unwrap();
            assert!(max_diff(&rec.final_state, &expected) < 1e-12, "{:?}", cfg.scheme);
        }
    }

    #[test]
    fn free_packet_spreading() {
        let grid = line_grid(1024, 64.0);
        let sigma = 0.5;
        let f = init_gaussian(&grid, &GaussianPacket::at_rest([0.0; 3], sigma, spin_up())).unwrap();
        let t = 2.0 * sigma * sigma;
        let rec = propagate(&f, &EMPotential::zero(), ELECTRON, &PropagatorConfig::splitstep(t / 100.0), 0.0, t, &mut [])
            .unwrap();
        let expected = sigma * (1.0 + (t / (2.0 * sigma * sigma)).powi(2)).sqrt();
        assert!((rec.final_state.width(0) / expected - 1.0).abs() < 1e-9);
    }

    #[test]
    fn splitstep_norm_over_many_steps() {
        let grid = line_grid(256, 32.0);
        let p = preset(PresetKind::Harmonic, &params(&[("omega0", 0.5)]), ELECTRON).unwrap();
        let f = init_gaussian(&grid, &GaussianPacket::at_rest([1.0, 0.0, 0.0], 1.0, spin_up())).unwrap();
        let rec = propagate(&f, &p, ELECTRON, &PropagatorConfig::splitstep(0.01), 0.0, 10.0, &mut []).unwrap();
        assert_eq!(rec.steps, 1000);
        assert!(rec.max_norm_drift() < 1e-12, "{}", rec.max_norm_drift());
    }

    #[test]
    fn zero_duration_run() {
        let grid = line_grid(32, 8.0);
        let f = plane_wave(&grid, 0.0, spin_up());
        let mut calls = 0;
        let mut obs = FnObserver {
            stride: 5,
            f: |_, _, _: &SpinorField| {
                calls += 1;
                Ok(())
            },
        };
        let rec = propagate(&f, &EMPotential::zero(), ELECTRON, &PropagatorConfig::krylov(0.1), 2.0, 2.0, &mut [&mut obs])
            .unwrap();
        assert_eq!(rec.steps, 0);
        assert_eq!(rec.samples.len(), 1);
        assert_eq!(rec.final_time, 2.0);
        assert_eq!(max_diff(&rec.final_state, &f), 0.0);
        assert_eq!(calls, 1);
    }

    #[test]
    fn splitstep_rejects_vector_potential() {
        let grid = Grid::centered(&[16, 16], &[8.0, 8.0]).unwrap();
        let p = preset(PresetKind::UniformBLandau, &params(&[("B0", 1.0)]), ELECTRON).unwrap();
        let f = plane_wave(&grid, 0.0, spin_up());
        let err = propagate(&f, &p, ELECTRON, &PropagatorConfig::splitstep(0.1), 0.0, 1.0, &mut []).unwrap_err();
        assert_eq!(err.error, EvolveError::VectorPotentialPresent);
        assert!(err.partial.samples.is_empty());
        assert_eq!(
            step_splitstep(&f, &p, 0.0, 0.1, ELECTRON).unwrap_err(),
            EvolveError::VectorPotentialPresent
        );
    }

    #[test]
    fn krylov_reports_non_convergence() {
        let grid = line_grid(64, 8.0);
        let packet = GaussianPacket::at_rest([0.0; 3], 0.4, spin_up());
        let f = init_gaussian(&grid, &packet).unwrap();
        let cfg = PropagatorConfig {
            krylov_dim: 4,
            ..PropagatorConfig::krylov(5.0)
        };
        let err = propagate(&f, &EMPotential::zero(), ELECTRON, &cfg, 0.0, 10.0, &mut []).unwrap_err();
        assert!(matches!(err.error, EvolveError::KrylovNotConverged { dim: 4, .. }));
        assert_eq!(err.partial.steps, 0);
        assert_eq!(err.partial.samples.len(), 1);
    }

    #[test]
    fn config_validation() {
        assert!(PropagatorConfig::krylov(0.0).validate().is_err());
        assert!(PropagatorConfig { krylov_dim: 3, ..Default::default() }.validate().is_err());
        assert!(PropagatorConfig::krylov(0.1).step_count(0.0, 0.25).is_err());
        assert_eq!(PropagatorConfig::krylov(0.1).step_count(0.0, 1.0).unwrap(), 10);
        assert!(PropagatorConfig::krylov(0.1).step_count(1.0, 0.0).is_err());
        assert_eq!("split-step".parse::<Scheme>().unwrap(), Scheme::SplitStep);
        assert_eq!("Krylov".parse::<Scheme>().unwrap(), Scheme::Krylov);
        assert!("euler".parse::<Scheme>().is_err());
    }
}
