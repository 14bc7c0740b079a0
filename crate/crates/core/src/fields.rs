//! Electromagnetic potentials as closed-form evaluators.
//!
//! Potentials are functions of `(r, t)`, sampled on a grid only when an
//! operator needs them. All shipped presets are static.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::grid::Grid;
use crate::units::Units;

pub type ScalarFn = Arc<dyn Fn([f64; 3], f64) -> f64 + Send + Sync>;
pub type VectorFn = Arc<dyn Fn([f64; 3], f64) -> [f64; 3] + Send + Sync>;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum FieldError {
    #[error("preset {preset} requires parameter `{param}`")]
    MissingParam { preset: &'static str, param: &'static str },
    #[error("preset {preset} does not take parameter `{param}`")]
    UnknownParam { preset: &'static str, param: String },
    #[error("unknown potential preset `{0}`")]
    UnknownPreset(String),
    #[error("harmonic preset needs a nonzero charge")]
    ZeroCharge,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PresetKind {
    Zero,
    UniformBLandau,
    UniformBSymmetric,
    UniformE,
    Harmonic,
}

impl PresetKind {
    pub const ALL: [PresetKind; 5] = [
        PresetKind::Zero,
        PresetKind::UniformBLandau,
        PresetKind::UniformBSymmetric,
        PresetKind::UniformE,
        PresetKind::Harmonic,
    ];

    /// Name used in configuration files and dump headers.
    pub fn name(&self) -> &'static str {
        match self {
            PresetKind::Zero => "zero",
            PresetKind::UniformBLandau => "landau",
            PresetKind::UniformBSymmetric => "symmetric",
            PresetKind::UniformE => "uniform_e",
            PresetKind::Harmonic => "harmonic",
        }
    }

    pub fn parse(name: &str) -> Result<Self, FieldError> {
        let lower = name.trim().to_ascii_lowercase();
        Self::ALL
            .into_iter()
            .find(|k| {
                k.name() == lower || format!("{k:?}").to_ascii_lowercase() == lower
            })
            .ok_or_else(|| FieldError::UnknownPreset(name.to_string()))
    }

    fn params(&self) -> (&'static [&'static str], &'static [&'static str]) {
        match self {
            PresetKind::Zero => (&[], &[]),
            PresetKind::UniformBLandau | PresetKind::UniformBSymmetric => (&["B0"], &[]),
            PresetKind::UniformE => (&[], &["Ex", "Ey", "Ez"]),
            PresetKind::Harmonic => (&["omega0"], &[]),
        }
    }
}

impl fmt::Display for PresetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub type PresetParams = BTreeMap<String, f64>;

/// Scalar potential `φ`, vector potential `A`, and `B = ∇×A` when known in
/// closed form.
#[derive(Clone)]
pub struct EMPotential {
    pub phi: ScalarFn,
    pub a_vec: VectorFn,
    pub b_analytic: Option<VectorFn>,
    pub name: String,
    pub kind: Option<PresetKind>,
    pub params: PresetParams,
    /// `A` is identically zero everywhere, for all times.
    pub vector_free: bool,
    pub time_dependent: bool,
}

impl fmt::Debug for EMPotential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EMPotential")
            .field("name", &self.name)
            .field("params", &self.params)
            .field("vector_free", &self.vector_free)
            .field("time_dependent", &self.time_dependent)
            .finish()
    }
}

/// Potential for a named preset. `units` only matters for `Harmonic`, where
/// `φ` is chosen so that the potential energy is `qφ = ½ m ω₀² |r|²`.
pub fn preset(kind: PresetKind, params: &PresetParams, units: Units) -> Result<EMPotential, FieldError> {
    let (required, optional) = kind.params();
    for key in params.keys() {
        if !required.contains(&key.as_str()) && !optional.contains(&key.as_str()) {
            return Err(FieldError::UnknownParam {
                preset: kind.name(),
                param: key.clone(),
            });
        }
    }
    let get = |p: &'static str| {
        params.get(p).copied().ok_or(FieldError::MissingParam {
            preset: kind.name(),
            param: p,
        })
    };
    let zero_s: ScalarFn = Arc::new(|_, _| 0.0);
    let zero_v: VectorFn = Arc::new(|_, _| [0.0; 3]);
    let (phi, a_vec, b, vector_free): (ScalarFn, VectorFn, VectorFn, bool) = match kind {
        PresetKind::Zero => (zero_s, zero_v.clone(), zero_v, true),
        PresetKind::UniformBLandau => {
            let b0 = get("B0")?;
            (
                zero_s,
                Arc::new(move |r, _| [-b0 * r[1], 0.0, 0.0]),
                Arc::new(move |_, _| [0.0, 0.0, b0]),
                false,
            )
        }
        PresetKind::UniformBSymmetric => {
            let b0 = get("B0")?;
            (
                zero_s,
                Arc::new(move |r, _| [-0.5 * b0 * r[1], 0.5 * b0 * r[0], 0.0]),
                Arc::new(move |_, _| [0.0, 0.0, b0]),
                false,
            )
        }
        PresetKind::UniformE => {
            if optional.iter().all(|k| !params.contains_key(*k)) {
                return Err(FieldError::MissingParam {
                    preset: kind.name(),
                    param: "Ex",
                });
            }
            let e = ["Ex", "Ey", "Ez"].map(|k| params.get(k).copied().unwrap_or(0.0));
            (
                Arc::new(move |r, _| -(e[0] * r[0] + e[1] * r[1] + e[2] * r[2])),
                zero_v.clone(),
                zero_v,
                true,
            )
        }
        PresetKind::Harmonic => {
            let w = get("omega0")?;
            if units.charge == 0.0 {
                return Err(FieldError::ZeroCharge);
            }
            let coeff = 0.5 * units.mass * w * w / units.charge;
            (
                Arc::new(move |r, _| coeff * (r[0] * r[0] + r[1] * r[1] + r[2] * r[2])),
                zero_v.clone(),
                zero_v,
                true,
            )
        }
    };
    Ok(EMPotential {
        phi,
        a_vec,
        b_analytic: Some(b),
        name: kind.name().to_string(),
        kind: Some(kind),
        params: params.clone(),
        vector_free,
        time_dependent: false,
    })
}

/// Parses `name` and builds the preset.
pub fn preset_by_name(name: &str, params: &PresetParams, units: Units) -> Result<EMPotential, FieldError> {
    preset(PresetKind::parse(name)?, params, units)
}

impl EMPotential {
    pub fn zero() -> Self {
        preset(PresetKind::Zero, &PresetParams::new(), Units::default()).expect("zero preset")
    }

    /// A user-defined potential.
    pub fn custom(
        name: impl Into<String>,
        phi: ScalarFn,
        a_vec: VectorFn,
        b_analytic: Option<VectorFn>,
        time_dependent: bool,
    ) -> Self {
        Self {
            phi,
            a_vec,
            b_analytic,
            name: name.into(),
            kind: None,
            params: PresetParams::new(),
            vector_free: false,
            time_dependent,
        }
    }

    pub fn phi_at(&self, r: [f64; 3], t: f64) -> f64 {
        (self.phi)(r, t)
    }

    pub fn a_at(&self, r: [f64; 3], t: f64) -> [f64; 3] {
        (self.a_vec)(r, t)
    }

    /// `B` from the closed form when present, else a central-difference curl.
    pub fn b_at(&self, r: [f64; 3], t: f64) -> [f64; 3] {
        match &self.b_analytic {
            Some(b) => b(r, t),
            None => self.curl_fd(r, t, 1e-5),
        }
    }

    /// Second-order central-difference curl of `A` at `r` with step `h`.
    pub fn curl_fd(&self, r: [f64; 3], t: f64, h: f64) -> [f64; 3] {
        let d = |comp: usize, axis: usize| {
            let mut p = r;
            let mut m = r;
            p[axis] += h;
            m[axis] -= h;
            ((self.a_vec)(p, t)[comp] - (self.a_vec)(m, t)[comp]) / (2.0 * h)
        };
        [d(2, 1) - d(1, 2), d(0, 2) - d(2, 0), d(1, 0) - d(0, 1)]
    }

    /// Whether `A` is exactly zero at every point of `grid` at time `t`.
    pub fn vector_potential_vanishes_on(&self, grid: &Grid, t: f64) -> bool {
        self.vector_free || grid.positions().all(|r| self.a_at(r, t) == [0.0; 3])
    }

    pub fn sample(&self, grid: &Grid, t: f64) -> SampledPotential {
        let n = grid.len();
        let mut phi = Vec::with_capacity(n);
        let mut a = [Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n)];
        let mut b = [Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n)];
        for r in grid.positions() {
            phi.push(self.phi_at(r, t));
            let av = self.a_at(r, t);
            let bv = self.b_at(r, t);
            for c in 0..3 {
                a[c].push(av[c]);
                b[c].push(bv[c]);
            }
        }
        let has_a = !self.vector_free && a.iter().flatten().any(|&v| v != 0.0);
        let has_b = b.iter().flatten().any(|&v| v != 0.0);
        let has_phi = phi.iter().any(|&v| v != 0.0);
        SampledPotential {
            phi: has_phi.then_some(phi),
            a: has_a.then_some(a),
            b: has_b.then_some(b),
        }
    }
}

/// Potentials evaluated on every grid point; `None` marks an identically
/// zero quantity so operators can skip it.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledPotential {
    pub phi: Option<Vec<f64>>,
    pub a: Option<[Vec<f64>; 3]>,
    pub b: Option<[Vec<f64>; 3]>,
}

impl SampledPotential {
    pub fn a_component(&self, axis: usize, idx: usize) -> f64 {
        self.a.as_ref().map_or(0.0, |a| a[axis][idx])
    }

    pub fn phi_at(&self, idx: usize) -> f64 {
        self.phi.as_ref().map_or(0.0, |p| p[idx])
    }

    pub fn b_at(&self, idx: usize) -> [f64; 3] {
        self.b
            .as_ref()
            .map_or([0.0; 3], |b| [b[0][idx], b[1][idx], b[2][idx]])
    }
}

/// A gauge function `Λ(r, t)` with its gradient and time derivative.
#[derive(Clone)]
pub struct GaugeFunction {
    pub lambda: ScalarFn,
    pub grad_lambda: VectorFn,
    pub dt_lambda: ScalarFn,
    pub time_dependent: bool,
}

impl fmt::Debug for GaugeFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GaugeFunction")
            .field("time_dependent", &self.time_dependent)
            .finish_non_exhaustive()
    }
}

impl GaugeFunction {
    pub fn new(lambda: ScalarFn, grad_lambda: VectorFn, dt_lambda: ScalarFn) -> Self {
        Self {
            lambda,
            grad_lambda,
            dt_lambda,
            time_dependent: true,
        }
    }

    /// A time-independent `Λ(r)`.
    pub fn stationary(lambda: ScalarFn, grad_lambda: VectorFn) -> Self {
        Self {
            lambda,
            grad_lambda,
            dt_lambda: Arc::new(|_, _| 0.0),
            time_dependent: false,
        }
    }

    pub fn zero() -> Self {
        Self::stationary(Arc::new(|_, _| 0.0), Arc::new(|_, _| [0.0; 3]))
    }

    /// Largest mismatch between the supplied derivatives and central
    /// differences of `Λ` with step `h` at `r`.
    pub fn consistency_error(&self, r: [f64; 3], t: f64, h: f64) -> f64 {
        let grad = (self.grad_lambda)(r, t);
        let mut err: f64 = 0.0;
        for axis in 0..3 {
            let mut p = r;
            let mut m = r;
            p[axis] += h;
            m[axis] -= h;
            let fd = ((self.lambda)(p, t) - (self.lambda)(m, t)) / (2.0 * h);
            err = err.max((fd - grad[axis]).abs());
        }
        let fd_t = ((self.lambda)(r, t + h) - (self.lambda)(r, t - h)) / (2.0 * h);
        err.max((fd_t - (self.dt_lambda)(r, t)).abs())
    }
}

/// `A' = A + ∇Λ`, `φ' = φ - ∂Λ/∂t`. The magnetic field is unchanged.
pub fn gauge_transform(p: &EMPotential, g: &GaugeFunction) -> EMPotential {
    let (phi, dt) = (p.phi.clone(), g.dt_lambda.clone());
    let (a, grad) = (p.a_vec.clone(), g.grad_lambda.clone());
    EMPotential {
        phi: Arc::new(move |r, t| phi(r, t) - dt(r, t)),
        a_vec: Arc::new(move |r, t| {
            let a0 = a(r, t);
            let gl = grad(r, t);
            [a0[0] + gl[0], a0[1] + gl[1], a0[2] + gl[2]]
        }),
        b_analytic: p.b_analytic.clone(),
        name: format!("gauge({})", p.name),
        kind: None,
        params: p.params.clone(),
        vector_free: false,
        time_dependent: p.time_dependent || g.time_dependent,
    }
}
