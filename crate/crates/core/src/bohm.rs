//! Bohmian velocity fields and trajectories driven by a selected current.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use rand::RngExt;
use rayon::prelude::*;
use thiserror::Error;

use crate::currents::{decompose_current_with, CurrentDecomposition, CurrentSelection};
use crate::fields::EMPotential;
use crate::grid::{Grid, ScalarField, VectorField};
use crate::state::{Hamiltonian, SpinorField};
use crate::units::Units;

/// Density floor relative to the peak.
pub const DEFAULT_EPS: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BohmError {
    #[error("density floor must be positive, got {0}")]
    BadEps(f64),
    #[error("no velocity snapshots")]
    NoSnapshots,
    #[error("snapshot times must be strictly increasing (at index {0})")]
    Unordered(usize),
    #[error("snapshots live on different grids")]
    GridMismatch,
    #[error("snapshots cover [{lo}, {hi}] but [{t0}, {t1}] was requested")]
    Coverage { lo: f64, hi: f64, t0: f64, t1: f64 },
    #[error("seed {0:?} lies outside the domain")]
    SeedOutside([f64; 3]),
    #[error("trajectory step must be finite and nonzero, got {0}")]
    BadStep(f64),
}

/// Velocity `j / max(ρ, eps ρ_peak)` together with the cells below the floor.
#[derive(Clone, Debug, PartialEq)]
pub struct VelocityField {
    pub velocity: VectorField,
    pub low_density: Vec<bool>,
    pub floor: f64,
}

impl VelocityField {
    pub fn grid(&self) -> &Grid {
        &self.velocity.grid
    }

    pub fn low_count(&self) -> usize {
        self.low_density.iter().filter(|&&b| b).count()
    }
}

pub fn velocity_from_current(j: &VectorField, rho: &ScalarField, eps: f64) -> Result<VelocityField, BohmError> {
    if !(eps.is_finite() && eps > 0.0) {
        return Err(BohmError::BadEps(eps));
    }
    if j.grid != rho.grid {
        return Err(BohmError::GridMismatch);
    }
    let floor = eps * rho.max().max(0.0);
    let low_density: Vec<bool> = rho.values.iter().map(|&r| r < floor).collect();
    let mut velocity = VectorField::zeros(&rho.grid);
    for c in 0..3 {
        for (i, v) in velocity.components[c].iter_mut().enumerate() {
            *v = j.components[c][i] / rho.values[i].max(floor);
        }
    }
    Ok(VelocityField {
        velocity,
        low_density,
        floor,
    })
}

/// Velocity of the total current.
pub fn velocity_field(dec: &CurrentDecomposition, rho: &ScalarField, eps: f64) -> Result<VelocityField, BohmError> {
    velocity_from_current(&dec.j_total, rho, eps)
}

#[derive(Clone, Debug, PartialEq)]
pub struct FlowSnapshot {
    pub t: f64,
    pub field: VelocityField,
}

/// Velocity fields at increasing times, interpolated linearly in time. A
/// single snapshot is treated as a stationary flow.
#[derive(Clone, Debug)]
pub struct FlowHistory {
    grid: Grid,
    snapshots: Vec<FlowSnapshot>,
}

/// Result of sampling the flow at one point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Probe {
    Velocity([f64; 3]),
    Outside,
    LowDensity,
}

impl FlowHistory {
    pub fn new(snapshots: Vec<FlowSnapshot>) -> Result<Self, BohmError> {
        let first = snapshots.first().ok_or(BohmError::NoSnapshots)?;
        let grid = first.field.grid().clone();
        for (i, w) in snapshots.windows(2).enumerate() {
            if !(w[1].t > w[0].t) {
                return Err(BohmError::Unordered(i + 1));
            }
        }
        if snapshots.iter().any(|s| *s.field.grid() != grid) {
            return Err(BohmError::GridMismatch);
        }
        Ok(Self { grid, snapshots })
    }

    pub fn stationary(field: VelocityField) -> Self {
        Self {
            grid: field.grid().clone(),
            snapshots: vec![FlowSnapshot { t: 0.0, field }],
        }
    }

    /// Builds the flow of the selected current from time-stamped states.
    pub fn from_states(
        states: &[(f64, SpinorField)],
        p: &EMPotential,
        units: Units,
        selection: CurrentSelection,
        eps: f64,
    ) -> Result<Self, BohmError> {
        let snapshots = states
            .iter()
            .map(|(t, f)| {
                let h = Hamiltonian::new(f.grid(), p, *t, units);
                let j = selection.select(&decompose_current_with(&h, f));
                velocity_from_current(&j, &f.density(), eps).map(|field| FlowSnapshot { t: *t, field })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(snapshots)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn snapshots(&self) -> &[FlowSnapshot] {
        &self.snapshots
    }

    pub fn is_stationary(&self) -> bool {
        self.snapshots.len() == 1
    }

    pub fn time_span(&self) -> (f64, f64) {
        (self.snapshots[0].t, self.snapshots[self.snapshots.len() - 1].t)
    }

    pub fn covers(&self, t: f64) -> bool {
        let (lo, hi) = self.time_span();
        self.is_stationary() || (t >= lo && t <= hi)
    }

    /// Reverses time: snapshot `t` becomes `-t` and velocities flip sign.
    pub fn reversed(&self) -> Self {
        let snapshots = self
            .snapshots
            .iter()
            .rev()
            .map(|s| FlowSnapshot {
                t: -s.t,
                field: VelocityField {
                    velocity: s.field.velocity.scaled(-1.0),
                    low_density: s.field.low_density.clone(),
                    floor: s.field.floor,
                },
            })
            .collect();
        Self {
            grid: self.grid.clone(),
            snapshots,
        }
    }

    fn bracket(&self, t: f64) -> (usize, usize, f64) {
        let s = &self.snapshots;
        if s.len() == 1 || t <= s[0].t {
            return (0, 0, 0.0);
        }
        if t >= s[s.len() - 1].t {
            return (s.len() - 1, s.len() - 1, 0.0);
        }
        let hi = s.partition_point(|x| x.t <= t);
        let lo = hi - 1;
        (lo, hi, (t - s[lo].t) / (s[hi].t - s[lo].t))
    }

    /// Corner indices and multilinear weights of the periodic cell holding `r`.
    fn cell(&self, r: [f64; 3]) -> Option<Vec<(usize, f64)>> {
        let g = &self.grid;
        if !g.contains(r) {
            return None;
        }
        let mut corners = vec![([0usize; 3], 1.0)];
        for axis in 0..3 {
            if !g.is_active(axis) {
                continue;
            }
            let n = g.points(axis);
            let u = (r[axis] - g.origin(axis)) / g.spacing(axis);
            let i0 = (u.floor() as usize).min(n - 1);
            let w = u - i0 as f64;
            let i1 = (i0 + 1) % n;
            corners = corners
                .into_iter()
                .flat_map(|(mut idx, wt)| {
                    let mut other = idx;
                    idx[axis] = i0;
                    other[axis] = i1;
                    [(idx, wt * (1.0 - w)), (other, wt * w)]
                })
                .collect();
        }
        Some(corners.into_iter().map(|(i, w)| (g.index(i), w)).collect())
    }

    pub fn probe(&self, r: [f64; 3], t: f64) -> Probe {
        let Some(corners) = self.cell(r) else {
            return Probe::Outside;
        };
        let (lo, hi, wt) = self.bracket(t);
        let mut v = [0.0; 3];
        for (snap, weight) in [(lo, 1.0 - wt), (hi, wt)] {
            if weight == 0.0 && snap != lo {
                continue;
            }
            let field = &self.snapshots[snap].field;
            for &(idx, w) in &corners {
                if field.low_density[idx] {
                    return Probe::LowDensity;
                }
                for (c, vc) in v.iter_mut().enumerate() {
                    *vc += weight * w * field.velocity.components[c][idx];
                }
            }
        }
        Probe::Velocity(v)
    }
}

/// An axis-aligned plane `r[axis] = position`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Plane {
    pub id: usize,
    pub axis: usize,
    pub position: f64,
}

impl Plane {
    fn side(&self, r: [f64; 3]) -> f64 {
        r[self.axis] - self.position
    }

    fn crossed(&self, a: [f64; 3], b: [f64; 3]) -> bool {
        let (sa, sb) = (self.side(a), self.side(b));
        sa != 0.0 && (sa * sb < 0.0 || sb == 0.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Termination {
    Completed,
    LeftDomain,
    LowDensity,
    Arrived(usize),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrajectorySample {
    pub t: f64,
    pub position: [f64; 3],
    pub velocity: [f64; 3],
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub seed: [f64; 3],
    pub samples: Vec<TrajectorySample>,
    pub terminated: Termination,
}

impl Trajectory {
    pub fn last(&self) -> &TrajectorySample {
        self.samples.last().expect("trajectory has its seed sample")
    }
}

fn advance(r: [f64; 3], v: [f64; 3], s: f64) -> [f64; 3] {
    [r[0] + s * v[0], r[1] + s * v[1], r[2] + s * v[2]]
}

/// Integrates `dr/dt = v(r, t)` from `t0` to `t1` (either direction) with
/// classical fourth-order Runge-Kutta steps of size `|dt|`, shortening the
/// last step to land on `t1`.
pub fn integrate_trajectory(
    flow: &FlowHistory,
    seed: [f64; 3],
    t0: f64,
    t1: f64,
    dt: f64,
    surfaces: &[Plane],
) -> Result<Trajectory, BohmError> {
    if !(dt.is_finite() && dt != 0.0) {
        return Err(BohmError::BadStep(dt));
    }
    if !flow.covers(t0) || !flow.covers(t1) {
        let (lo, hi) = flow.time_span();
        return Err(BohmError::Coverage { lo, hi, t0, t1 });
    }
    let mut traj = Trajectory {
        seed,
        samples: Vec::new(),
        terminated: Termination::Completed,
    };
    let v0 = match flow.probe(seed, t0) {
        Probe::Outside => return Err(BohmError::SeedOutside(seed)),
        Probe::LowDensity => {
            traj.samples.push(TrajectorySample {
                t: t0,
                position: seed,
                velocity: [0.0; 3],
            });
            traj.terminated = Termination::LowDensity;
            return Ok(traj);
        }
        Probe::Velocity(v) => v,
    };
    traj.samples.push(TrajectorySample {
        t: t0,
        position: seed,
        velocity: v0,
    });

    let span = t1 - t0;
    let h = dt.abs() * span.signum();
    let n_steps = if span == 0.0 { 0 } else { (span / h).ceil() as usize };
    let (mut r, mut v) = (seed, v0);
    for k in 0..n_steps {
        let t = t0 + k as f64 * h;
        let t_next = if k + 1 == n_steps { t1 } else { t0 + (k + 1) as f64 * h };
        let step = t_next - t;
        let stage = |pos: [f64; 3], time: f64| match flow.probe(pos, time) {
            Probe::Velocity(v) => Ok(v),
            Probe::Outside => Err(Termination::LeftDomain),
            Probe::LowDensity => Err(Termination::LowDensity),
        };
        let result = (|| {
            let k1 = v;
            let k2 = stage(advance(r, k1, 0.5 * step), t + 0.5 * step)?;
            let k3 = stage(advance(r, k2, 0.5 * step), t + 0.5 * step)?;
            let k4 = stage(advance(r, k3, step), t_next)?;
            let next: [f64; 3] =
                std::array::from_fn(|c| r[c] + step / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]));
            let vn = stage(next, t_next)?;
            Ok((next, vn))
        })();
        match result {
            Ok((next, vn)) => {
                let crossed = surfaces.iter().find(|p| p.crossed(r, next));
                r = next;
                v = vn;
                traj.samples.push(TrajectorySample {
                    t: t_next,
                    position: r,
                    velocity: v,
                });
                if let Some(p) = crossed {
                    traj.terminated = Termination::Arrived(p.id);
                    return Ok(traj);
                }
            }
            Err(term) => {
                traj.terminated = term;
                return Ok(traj);
            }
        }
    }
    Ok(traj)
}

/// Integrates every seed in parallel; output order follows `seeds`.
pub fn integrate_many(
    flow: &FlowHistory,
    seeds: &[[f64; 3]],
    t0: f64,
    t1: f64,
    dt: f64,
    surfaces: &[Plane],
) -> Result<Vec<Trajectory>, BohmError> {
    seeds
        .par_iter()
        .map(|&s| integrate_trajectory(flow, s, t0, t1, dt, surfaces))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Arrival {
    pub seed: [f64; 3],
    pub time: Option<f64>,
}

/// First crossing of `plane` by each trajectory, linearly interpolated
/// between samples.
pub fn arrival_times(trajs: &[Trajectory], plane: &Plane) -> Vec<Arrival> {
    trajs
        .iter()
        .map(|tr| {
            let time = tr.samples.windows(2).find_map(|w| {
                let (a, b) = (&w[0], &w[1]);
                plane.crossed(a.position, b.position).then(|| {
                    let (sa, sb) = (plane.side(a.position), plane.side(b.position));
                    a.t + (b.t - a.t) * sa / (sa - sb)
                })
            });
            let time = time.or_else(|| (plane.side(tr.seed) == 0.0).then(|| tr.samples[0].t));
            Arrival { seed: tr.seed, time }
        })
        .collect()
}

/// Draws positions distributed as `ρ`: a grid point by weight, then a
/// uniform offset within its cell on every active axis.
pub fn sample_seeds<R: Rng + ?Sized>(rho: &ScalarField, count: usize, rng: &mut R) -> Vec<[f64; 3]> {
    let grid = &rho.grid;
    let weights = rho.values.iter().map(|v| v.max(0.0));
    let dist = WeightedIndex::new(weights).expect("density has positive mass");
    (0..count)
        .map(|_| {
            let mut r = grid.position(dist.sample(rng));
            for (axis, x) in r.iter_mut().enumerate() {
                if grid.is_active(axis) {
                    *x += (rng.random::<f64>() - 0.5) * grid.spacing(axis);
                }
            }
            r
        })
        .collect()
}

/// Coarse bins of `block` grid cells per active axis. A position belongs to
/// the cell of its nearest grid point, matching [`sample_seeds`].
#[derive(Clone, Debug)]
pub struct Binning {
    grid: Grid,
    block: usize,
    shape: [usize; 3],
}

impl Binning {
    /// `block` must divide every active axis length.
    pub fn new(grid: &Grid, block: usize) -> Option<Self> {
        let mut shape = [1; 3];
        for (axis, s) in shape.iter_mut().enumerate() {
            if grid.is_active(axis) {
                let n = grid.points(axis);
                if block == 0 || !n.is_multiple_of(block) {
                    return None;
                }
                *s = n / block;
            }
        }
        Some(Self {
            grid: grid.clone(),
            block,
            shape,
        })
    }

    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn bin_of_point(&self, i: [usize; 3]) -> usize {
        let b: [usize; 3] = std::array::from_fn(|a| i[a] / self.block.max(1) % self.shape[a]);
        (b[0] * self.shape[1] + b[1]) * self.shape[2] + b[2]
    }

    pub fn bin_of(&self, r: [f64; 3]) -> Option<usize> {
        let g = &self.grid;
        let mut i = [0usize; 3];
        for axis in 0..3 {
            if g.is_active(axis) {
                let n = g.points(axis) as isize;
                let u = ((r[axis] - g.origin(axis)) / g.spacing(axis)).round() as isize;
                if !(r[axis].is_finite()) {
                    return None;
                }
                i[axis] = u.rem_euclid(n) as usize;
            }
        }
        Some(self.bin_of_point(i))
    }

    /// Probability mass of `ρ` per bin, normalized to one.
    pub fn probabilities(&self, rho: &ScalarField) -> Vec<f64> {
        let mut p = vec![0.0; self.len()];
        for (idx, &v) in rho.values.iter().enumerate() {
            p[self.bin_of_point(self.grid.unravel(idx))] += v.max(0.0);
        }
        let total: f64 = p.iter().sum();
        p.iter_mut().for_each(|x| *x /= total);
        p
    }

    pub fn counts(&self, positions: impl IntoIterator<Item = [f64; 3]>) -> Vec<usize> {
        let mut c = vec![0; self.len()];
        for r in positions {
            if let Some(b) = self.bin_of(r) {
                c[b] += 1;
            }
        }
        c
    }
}
