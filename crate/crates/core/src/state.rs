//! Two-component spinor fields, their densities and expectation values, and
//! the Pauli Hamiltonian applied matrix-free.

use num_complex::Complex64;
use rand::{Rng, RngExt};

use crate::fields::{EMPotential, SampledPotential};
use crate::grid::{Grid, ScalarField, VectorField};
use crate::spectral::Spectral;
use crate::units::{Units, HBAR};

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum StateError {
    #[error("axis {axis}: width {width} is below 3 grid spacings ({min})")]
    UnresolvedWidth { axis: usize, width: f64, min: f64 },
    #[error("axis {axis}: packet centre {center} with width {width} is closer than 4 widths to the boundary")]
    NearBoundary { axis: usize, center: f64, width: f64 },
    #[error("spinor cannot be normalized")]
    BadSpinor,
    #[error("component arrays have {got} points, grid has {expected}")]
    Shape { expected: usize, got: usize },
    #[error("fields live on different grids")]
    GridMismatch,
}

/// `ψ = (ψ₁, ψ₂)ᵀ` sampled on a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinorField {
    grid: Grid,
    components: [Vec<Complex64>; 2],
}

/// The pair `Ψ = (ψ, Χ)ᵀ`.
#[derive(Clone, Debug, PartialEq)]
pub struct BispinorField {
    pub psi: SpinorField,
    pub chi: SpinorField,
}

impl BispinorField {
    pub fn new(psi: SpinorField, chi: SpinorField) -> Result<Self, StateError> {
        if psi.grid != chi.grid {
            return Err(StateError::GridMismatch);
        }
        Ok(Self { psi, chi })
    }
}

/// Parameters of `N exp(-|r-c|²/(4σ²)) exp(i k₀·r) χ`.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianPacket {
    pub center: [f64; 3],
    pub width: [f64; 3],
    pub momentum: [f64; 3],
    pub spinor: [Complex64; 2],
}

impl GaussianPacket {
    pub fn at_rest(center: [f64; 3], width: f64, spinor: [Complex64; 2]) -> Self {
        Self {
            center,
            width: [width; 3],
            momentum: [0.0; 3],
            spinor,
        }
    }
}

pub fn spin_up() -> [Complex64; 2] {
    [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]
}

pub fn spin_down() -> [Complex64; 2] {
    [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]
}

/// Normalized Gaussian packet. The width is the standard deviation of the
/// density on each axis.
pub fn init_gaussian(grid: &Grid, packet: &GaussianPacket) -> Result<SpinorField, StateError> {
    for axis in 0..grid.dim() {
        let (c, w, h) = (packet.center[axis], packet.width[axis], grid.spacing(axis));
        if !(w >= 3.0 * h) {
            return Err(StateError::UnresolvedWidth {
                axis,
                width: w,
                min: 3.0 * h,
            });
        }
        let lo = grid.origin(axis);
        let hi = lo + grid.extent(axis);
        if c - 4.0 * w < lo || c + 4.0 * w > hi {
            return Err(StateError::NearBoundary {
                axis,
                center: c,
                width: w,
            });
        }
    }
    let s = packet.spinor;
    let s_norm = (s[0].norm_sqr() + s[1].norm_sqr()).sqrt();
    if !(s_norm.is_finite() && s_norm > 0.0) {
        return Err(StateError::BadSpinor);
    }
    let chi = [s[0] / s_norm, s[1] / s_norm];
    let dim = grid.dim();
    let mut f = SpinorField::from_fn(grid, |r| {
        let mut exponent = Complex64::default();
        for a in 0..dim {
            let d = r[a] - packet.center[a];
            exponent += Complex64::new(
                -d * d / (4.0 * packet.width[a] * packet.width[a]),
                packet.momentum[a] * r[a],
            );
        }
        let g = exponent.exp();
        [g * chi[0], g * chi[1]]
    });
    let n = f.norm();
    if !(n > 0.0 && n.is_finite()) {
        return Err(StateError::BadSpinor);
    }
    f.scale_mut(Complex64::from(1.0 / n));
    Ok(f)
}

/// A normalized, well-resolved, localized field with random spin texture:
/// a few Gaussians per component near the grid centre with random complex
/// amplitudes and small momenta. Used by the identity checks, which need
/// products of fields to stay resolved on the grid.
pub fn random_smooth_spinor<R: Rng + ?Sized>(grid: &Grid, rng: &mut R) -> SpinorField {
    let dim = grid.dim();
    let mut terms = Vec::new();
    for comp in 0..2 {
        for _ in 0..3 {
            let mut center = [0.0; 3];
            let mut width = [1.0; 3];
            let mut k = [0.0; 3];
            for a in 0..dim {
                let h = grid.spacing(a);
                center[a] = grid.origin(a) + 0.5 * grid.extent(a) + rng.random_range(-1.5..1.5) * h;
                width[a] = rng.random_range(2.5..2.8) * h;
                k[a] = rng.random_range(-0.1..0.1) / h;
            }
            let amp = Complex64::from_polar(rng.random_range(0.2..1.0), rng.random_range(0.0..std::f64::consts::TAU));
            terms.push((comp, center, width, k, amp));
        }
    }
    let mut f = SpinorField::from_fn(grid, |r| {
        let mut out = [Complex64::default(); 2];
        for (comp, center, width, k, amp) in &terms {
            let mut e = Complex64::default();
            for a in 0..dim {
                let d = r[a] - center[a];
                e += Complex64::new(-d * d / (4.0 * width[a] * width[a]), k[a] * d);
            }
            out[*comp] += amp * e.exp();
        }
        out
    });
    let n = f.norm();
    f.scale_mut(Complex64::from(1.0 / n));
    f
}

impl SpinorField {
    pub fn new(grid: &Grid, components: [Vec<Complex64>; 2]) -> Result<Self, StateError> {
        for c in &components {
            if c.len() != grid.len() {
                return Err(StateError::Shape {
                    expected: grid.len(),
                    got: c.len(),
                });
            }
        }
        Ok(Self {
            grid: grid.clone(),
            components,
        })
    }

    pub fn zeros(grid: &Grid) -> Self {
        let n = grid.len();
        Self {
            grid: grid.clone(),
            components: [vec![Complex64::default(); n], vec![Complex64::default(); n]],
        }
    }

    pub fn from_fn(grid: &Grid, f: impl Fn([f64; 3]) -> [Complex64; 2]) -> Self {
        let mut out = Self::zeros(grid);
        for (idx, r) in grid.positions().enumerate() {
            let v = f(r);
            out.components[0][idx] = v[0];
            out.components[1][idx] = v[1];
        }
        out
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn component(&self, c: usize) -> &[Complex64] {
        &self.components[c]
    }

    pub fn components(&self) -> &[Vec<Complex64>; 2] {
        &self.components
    }

    pub fn components_mut(&mut self) -> &mut [Vec<Complex64>; 2] {
        &mut self.components
    }

    pub fn into_components(self) -> [Vec<Complex64>; 2] {
        self.components
    }

    pub fn at(&self, idx: usize) -> [Complex64; 2] {
        [self.components[0][idx], self.components[1][idx]]
    }

    pub fn same_grid(&self, other: &SpinorField) -> Result<(), StateError> {
        if self.grid == other.grid {
            Ok(())
        } else {
            Err(StateError::GridMismatch)
        }
    }

    pub fn scale_mut(&mut self, s: Complex64) {
        self.components.iter_mut().flatten().for_each(|v| *v *= s);
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        let mut out = self.clone();
        out.scale_mut(s);
        out
    }

    /// `self + s * other`.
    pub fn axpy(&self, s: Complex64, other: &SpinorField) -> Self {
        let mut out = self.clone();
        for (a, b) in out.components.iter_mut().zip(&other.components) {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += s * y);
        }
        out
    }

    pub fn is_finite(&self) -> bool {
        self.components.iter().flatten().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.components.iter().flatten().fold(0.0, |m, z| m.max(z.norm()))
    }

    /// `Σ ψ†φ h^dim`.
    pub fn inner(&self, other: &SpinorField) -> Complex64 {
        let mut acc = Complex64::default();
        for (a, b) in self.components.iter().zip(&other.components) {
            for (x, y) in a.iter().zip(b) {
                acc += x.conj() * y;
            }
        }
        acc * self.grid.cell_volume()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.components.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>() * self.grid.cell_volume()
    }

    /// `sqrt(Σ ψ†ψ h^dim)`.
    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// `ρ = ψ†ψ`.
    pub fn density(&self) -> ScalarField {
        ScalarField {
            grid: self.grid.clone(),
            values: (0..self.grid.len())
                .map(|i| self.components[0][i].norm_sqr() + self.components[1][i].norm_sqr())
                .collect(),
        }
    }

    /// `s = ψ†σψ`, real by construction.
    pub fn spin_density(&self) -> VectorField {
        let mut out = VectorField::zeros(&self.grid);
        for i in 0..self.grid.len() {
            let s = spinor_sigma(self.at(i));
            for c in 0..3 {
                out.components[c][i] = s[c];
            }
        }
        out
    }

    /// `⟨S⟩ = (ħ/2) ∫ ψ†σψ`.
    pub fn expect_spin(&self) -> [f64; 3] {
        self.spin_density().integral().map(|v| 0.5 * HBAR * v)
    }

    /// `⟨μ_s⟩ = (qħ/2m) ∫ ψ†σψ`.
    pub fn expect_moment(&self, units: Units) -> [f64; 3] {
        self.spin_density().integral().map(|v| units.magneton() * v)
    }

    pub fn expect_position(&self) -> [f64; 3] {
        let rho = self.density();
        let mut acc = [0.0; 3];
        let mut total = 0.0;
        for (idx, r) in self.grid.positions().enumerate() {
            total += rho.values[idx];
            for a in 0..3 {
                acc[a] += r[a] * rho.values[idx];
            }
        }
        acc.map(|v| v / total)
    }

    /// Standard deviation of the position along `axis`.
    pub fn width(&self, axis: usize) -> f64 {
        let rho = self.density();
        let mean = self.expect_position()[axis];
        let total: f64 = rho.values.iter().sum();
        let var: f64 = self
            .grid
            .positions()
            .zip(&rho.values)
            .map(|(r, p)| (r[axis] - mean).powi(2) * p)
            .sum::<f64>()
            / total;
        var.sqrt()
    }

    /// `⟨p̂⟩` with spectral derivatives.
    pub fn expect_momentum(&self) -> [f64; 3] {
        let spectral = Spectral::new(&self.grid);
        let mut out = [0.0; 3];
        for c in 0..2 {
            let grad = spectral.gradient(&self.components[c]);
            for a in 0..3 {
                let s: Complex64 = self.components[c]
                    .iter()
                    .zip(&grad[a])
                    .map(|(x, d)| x.conj() * (-I * HBAR) * d)
                    .sum();
                out[a] += s.re * self.grid.cell_volume();
            }
        }
        out
    }
}

/// `ψ†σψ` at one point.
pub fn spinor_sigma(v: [Complex64; 2]) -> [f64; 3] {
    let cross = v[0].conj() * v[1];
    [
        2.0 * cross.re,
        2.0 * cross.im,
        v[0].norm_sqr() - v[1].norm_sqr(),
    ]
}

/// `(b·σ) v` at one point.
pub fn sigma_apply(b: [f64; 3], v: [Complex64; 2]) -> [Complex64; 2] {
    let bm = Complex64::new(b[0], -b[1]);
    let bp = Complex64::new(b[0], b[1]);
    [b[2] * v[0] + bm * v[1], bp * v[0] - b[2] * v[1]]
}

/// The Pauli Hamiltonian
/// `H = (1/2m)(p̂ - qA)² + qφ - (qħ/2m) σ·B`
/// frozen at one time and grid.
#[derive(Clone, Debug)]
pub struct Hamiltonian {
    spectral: Spectral,
    potential: SampledPotential,
    units: Units,
}

impl Hamiltonian {
    pub fn new(grid: &Grid, potential: &EMPotential, t: f64, units: Units) -> Self {
        Self {
            spectral: Spectral::new(grid),
            potential: potential.sample(grid, t),
            units,
        }
    }

    pub fn with_sampled(spectral: Spectral, potential: SampledPotential, units: Units) -> Self {
        Self {
            spectral,
            potential,
            units,
        }
    }

    pub fn spectral(&self) -> &Spectral {
        &self.spectral
    }

    pub fn potential(&self) -> &SampledPotential {
        &self.potential
    }

    pub fn units(&self) -> Units {
        self.units
    }

    pub fn grid(&self) -> &Grid {
        self.spectral.grid()
    }

    /// `π_j f = -iħ ∂_j f - q A_j f` for each active axis (inactive axes
    /// give zero).
    pub fn kinetic_momentum(&self, f: &[Complex64]) -> [Vec<Complex64>; 3] {
        let grad = self.spectral.gradient(f);
        let q = self.units.charge;
        let mut axis = 0;
        grad.map(|mut d| {
            let a = axis;
            axis += 1;
            if !self.grid().is_active(a) {
                return d;
            }
            for (idx, v) in d.iter_mut().enumerate() {
                *v = -I * HBAR * *v - q * self.potential.a_component(a, idx) * f[idx];
            }
            d
        })
    }

    /// `σ·π ψ`.
    pub fn sigma_dot_pi(&self, f: &SpinorField) -> SpinorField {
        let pi = [
            self.kinetic_momentum(f.component(0)),
            self.kinetic_momentum(f.component(1)),
        ];
        let mut out = SpinorField::zeros(f.grid());
        let [o0, o1] = out.components_mut();
        for idx in 0..f.grid().len() {
            // σ_x π_x + σ_y π_y + σ_z π_z applied to (ψ₁, ψ₂)
            let (px, py, pz) = (
                [pi[0][0][idx], pi[1][0][idx]],
                [pi[0][1][idx], pi[1][1][idx]],
                [pi[0][2][idx], pi[1][2][idx]],
            );
            o0[idx] = px[1] - I * py[1] + pz[0];
            o1[idx] = px[0] + I * py[0] - pz[1];
        }
        out
    }

    fn kinetic(&self, f: &[Complex64]) -> Vec<Complex64> {
        let m2 = 2.0 * self.units.mass;
        if self.potential.a.is_none() {
            let mut data = f.to_vec();
            self.spectral.forward(&mut data);
            self.spectral.scale_spectrum(&mut data, |_, kd| {
                Complex64::from(HBAR * HBAR * (kd[0] * kd[0] + kd[1] * kd[1] + kd[2] * kd[2]) / m2)
            });
            self.spectral.inverse(&mut data);
            return data;
        }
        let pi = self.kinetic_momentum(f);
        let mut out = vec![Complex64::default(); f.len()];
        for (axis, p) in pi.iter().enumerate() {
            if !self.grid().is_active(axis) {
                continue;
            }
            let d = self.spectral.derivative(p, axis);
            for (idx, o) in out.iter_mut().enumerate() {
                let pp = -I * HBAR * d[idx] - self.units.charge * self.potential.a_component(axis, idx) * p[idx];
                *o += pp / m2;
            }
        }
        out
    }

    pub fn apply(&self, f: &SpinorField) -> SpinorField {
        let k0 = self.kinetic(f.component(0));
        let k1 = self.kinetic(f.component(1));
        let q = self.units.charge;
        let zeeman = -self.units.magneton();
        let mut out = SpinorField::new(f.grid(), [k0, k1]).expect("same grid");
        let [o0, o1] = out.components_mut();
        for idx in 0..f.grid().len() {
            let v = f.at(idx);
            let phi = self.potential.phi_at(idx);
            let b = self.potential.b_at(idx);
            let zb = sigma_apply([zeeman * b[0], zeeman * b[1], zeeman * b[2]], v);
            o0[idx] += q * phi * v[0] + zb[0];
            o1[idx] += q * phi * v[1] + zb[1];
        }
        out
    }
}

/// `Hψ` for the potential evaluated at time `t`.
pub fn apply_hamiltonian(f: &SpinorField, p: &EMPotential, t: f64, units: Units) -> SpinorField {
    Hamiltonian::new(f.grid(), p, t, units).apply(f)
}

/// `Σ ψ†Hψ h^dim`; the imaginary part is a Hermiticity diagnostic.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergyEstimate {
    pub energy: f64,
    pub imaginary: f64,
}

pub fn expect_energy(f: &SpinorField, p: &EMPotential, t: f64, units: Units) -> EnergyEstimate {
    let z = f.inner(&apply_hamiltonian(f, p, t, units));
    EnergyEstimate {
        energy: z.re,
        imaginary: z.im,
    }
}
