use num_complex::Complex64;

use crate::fields::{EMPotential, SampledPotential};
use crate::spectral::Spectral;
use crate::state::SpinorField;
use crate::units::{Units, HBAR};

use super::EvolveError;

/// Strang splitting `e^{-iV dt/2ħ} e^{-iT dt/ħ} e^{-iV dt/2ħ}` for potentials
/// whose vector potential vanishes on the grid.
///
/// `V = qφ - (qħ/2m) σ·B` is exponentiated exactly per point with
/// `exp(-iθ n̂·σ) = cos θ - i sin θ n̂·σ`.
#[derive(Clone, Debug)]
pub struct SplitStepper {
    spectral: Spectral,
    units: Units,
    dt: f64,
    kinetic_phase: Vec<Complex64>,
}

impl SplitStepper {
    pub fn new(spectral: Spectral, units: Units, dt: f64) -> Self {
        let kinetic_phase = spectral
            .k_squared()
            .into_iter()
            .map(|k2| Complex64::from_polar(1.0, -HBAR * k2 * dt / (2.0 * units.mass)))
            .collect();
        Self {
            spectral,
            units,
            dt,
            kinetic_phase,
        }
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    fn half_potential(&self, f: &mut SpinorField, v: &SampledPotential) {
        if v.phi.is_none() && v.b.is_none() {
            return;
        }
        let q = self.units.charge;
        let zeeman = -self.units.magneton();
        let tau = 0.5 * self.dt / HBAR;
        let n = f.grid().len();
        let [c0, c1] = f.components_mut();
        for idx in 0..n {
            let scalar = Complex64::from_polar(1.0, -q * v.phi_at(idx) * tau);
            let b = v.b_at(idx).map(|x| zeeman * x);
            let bn = (b[0] * b[0] + b[1] * b[1] + b[2] * b[2]).sqrt();
            let (a, d) = (c0[idx], c1[idx]);
            if bn == 0.0 {
                c0[idx] = scalar * a;
                c1[idx] = scalar * d;
                continue;
            }
            let theta = bn * tau;
            let (s, c) = theta.sin_cos();
            let nv = b.map(|x| x / bn);
            // cos θ 𝟙 - i sin θ n̂·σ
            let m00 = Complex64::new(c, -s * nv[2]);
            let m11 = Complex64::new(c, s * nv[2]);
            let m01 = Complex64::new(0.0, -s) * Complex64::new(nv[0], -nv[1]);
            let m10 = Complex64::new(0.0, -s) * Complex64::new(nv[0], nv[1]);
            c0[idx] = scalar * (m00 * a + m01 * d);
            c1[idx] = scalar * (m10 * a + m11 * d);
        }
    }

    /// One step with the potential sampled at the step midpoint.
    pub fn step(&self, f: &SpinorField, midpoint: &SampledPotential) -> Result<SpinorField, EvolveError> {
        if midpoint.a.is_some() {
            return Err(EvolveError::VectorPotentialPresent);
        }
        let mut out = f.clone();
        self.half_potential(&mut out, midpoint);
        for comp in out.components_mut().iter_mut() {
            self.spectral.forward(comp);
            comp.iter_mut()
                .zip(&self.kinetic_phase)
                .for_each(|(v, p)| *v *= p);
            self.spectral.inverse(comp);
        }
        self.half_potential(&mut out, midpoint);
        Ok(out)
    }
}

/// One Strang step from `t` to `t + dt`. Fails if `A` does not vanish on
/// the grid.
pub fn step_splitstep(
    f: &SpinorField,
    p: &EMPotential,
    t: f64,
    dt: f64,
    units: Units,
) -> Result<SpinorField, EvolveError> {
    let grid = f.grid();
    let mid = t + 0.5 * dt;
    if !p.vector_potential_vanishes_on(grid, mid) {
        return Err(EvolveError::VectorPotentialPresent);
    }
    SplitStepper::new(Spectral::new(grid), units, dt).step(f, &p.sample(grid, mid))
}
