//! Probability-current constructions.
//!
//! Two independent routes to the same total current are provided:
//!
//! * the Pauli current plus spin term,
//!   `J = -(iħ/2m)[ψ†∇ψ - (∇ψ)†ψ] - (q/m)Aψ†ψ + (ħ/2m)∇×(ψ†σψ)`;
//! * the bispinor route, `J = -c(ψ†σΧ + Χ†σψ)` with the auxiliary spinor
//!   `Χ = -(1/2mc) σ·(p̂ - qA) ψ`.
//!
//! Agreement between them is an executable statement that the spin current
//! is implied by the first-order (Lévy-Leblond) form of the dynamics. The
//! magnetization current `∇×M` with `M` the moment density is the same
//! formula as the spin current, so [`spin_current`] serves for both.

use num_complex::Complex64;

use crate::fields::EMPotential;
use crate::grid::{Grid, ScalarField, VectorField};
use crate::spectral::Spectral;
use crate::state::{BispinorField, Hamiltonian, SpinorField, StateError};
use crate::units::{Units, C_LIGHT, HBAR};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Boundary density above this fraction of the peak counts as delocalized.
pub const LOCALIZATION_THRESHOLD: f64 = 1e-10;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum CurrentError {
    #[error("field is not localized: boundary density is {ratio:.3e} of the peak")]
    Delocalized { ratio: f64 },
    #[error(transparent)]
    State(#[from] StateError),
}

/// `j_total = j_conv + j_gauge + j_spin`, all real.
#[derive(Clone, Debug, PartialEq)]
pub struct CurrentDecomposition {
    pub j_conv: VectorField,
    pub j_gauge: VectorField,
    pub j_spin: VectorField,
    pub j_total: VectorField,
}

impl CurrentDecomposition {
    /// The total without the spin term.
    pub fn without_spin(&self) -> VectorField {
        self.j_conv.add(&self.j_gauge)
    }
}

/// Which terms of the current to keep, e.g. for transport experiments.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum CurrentSelection {
    #[default]
    Total,
    WithoutSpin,
    ConvectiveOnly,
}

impl CurrentSelection {
    pub fn select(&self, dec: &CurrentDecomposition) -> VectorField {
        match self {
            CurrentSelection::Total => dec.j_total.clone(),
            CurrentSelection::WithoutSpin => dec.without_spin(),
            CurrentSelection::ConvectiveOnly => dec.j_conv.clone(),
        }
    }
}

/// `(ħ/2m) ∇×(ψ†σψ)`.
pub fn spin_current_with(spectral: &Spectral, f: &SpinorField, units: Units) -> VectorField {
    spectral
        .curl(&f.spin_density())
        .scaled(HBAR / (2.0 * units.mass))
}

/// The spin current `(ħ/2m) ∇×(ψ†σψ)`. Also the magnetization current
/// `∇×M` obtained by reading the moment density as a magnetization.
pub fn spin_current(f: &SpinorField, units: Units) -> VectorField {
    spin_current_with(&Spectral::new(f.grid()), f, units)
}

/// Decomposition using a prebuilt Hamiltonian (its spectral plans and the
/// sampled potential).
pub fn decompose_current_with(h: &Hamiltonian, f: &SpinorField) -> CurrentDecomposition {
    let grid = f.grid();
    let units = h.units();
    let n = grid.len();
    let mut j_conv = VectorField::zeros(grid);
    let mut j_gauge = VectorField::zeros(grid);
    let coeff = HBAR / units.mass;
    for c in 0..2 {
        let psi = f.component(c);
        let grad = h.spectral().gradient(psi);
        for axis in 0..grid.dim() {
            let out = &mut j_conv.components[axis];
            for idx in 0..n {
                // -(iħ/2m)(z - z*) with z = ψ†∂ψ, which is (ħ/m) Im z
                out[idx] += coeff * (psi[idx].conj() * grad[axis][idx]).im;
            }
        }
    }
    if let Some(a) = &h.potential().a {
        let rho = f.density();
        let coeff = -units.charge / units.mass;
        for axis in 0..3 {
            for idx in 0..n {
                j_gauge.components[axis][idx] = coeff * a[axis][idx] * rho.values[idx];
            }
        }
    }
    let j_spin = spin_current_with(h.spectral(), f, units);
    let j_total = j_conv.add(&j_gauge).add(&j_spin);
    CurrentDecomposition {
        j_conv,
        j_gauge,
        j_spin,
        j_total,
    }
}

pub fn decompose_current(f: &SpinorField, p: &EMPotential, t: f64, units: Units) -> CurrentDecomposition {
    decompose_current_with(&Hamiltonian::new(f.grid(), p, t, units), f)
}

/// Mita's current `(ħ/4m) ∇×(ψ†σψ)`, half the spin current.
pub fn mita_current(f: &SpinorField, units: Units) -> VectorField {
    spin_current(f, units).scaled(0.5)
}

/// Largest density on the boundary faces relative to the peak.
pub fn boundary_density_ratio(f: &SpinorField) -> f64 {
    let grid = f.grid();
    let rho = f.density();
    let peak = rho.max();
    if peak <= 0.0 {
        return 0.0;
    }
    let n = grid.shape();
    let edge = (0..grid.len())
        .filter(|&idx| {
            let i = grid.unravel(idx);
            (0..grid.dim()).any(|a| i[a] == 0 || i[a] == n[a] - 1)
        })
        .map(|idx| rho.values[idx])
        .fold(0.0, f64::max);
    edge / peak
}

fn check_localized(f: &SpinorField) -> Result<(), CurrentError> {
    let ratio = boundary_density_ratio(f);
    if ratio >= LOCALIZATION_THRESHOLD {
        return Err(CurrentError::Delocalized { ratio });
    }
    Ok(())
}

/// `Σ r × j h^dim`.
pub fn first_moment(grid: &Grid, j: &VectorField) -> [f64; 3] {
    let mut acc = [0.0; 3];
    for (idx, r) in grid.positions().enumerate() {
        let v = j.at(idx);
        acc[0] += r[1] * v[2] - r[2] * v[1];
        acc[1] += r[2] * v[0] - r[0] * v[2];
        acc[2] += r[0] * v[1] - r[1] * v[0];
    }
    acc.map(|a| a * grid.cell_volume())
}

/// `⟨S⟩ = m ∫ r × j_s` with `j_s` the Mita current. In three dimensions this
/// equals [`SpinorField::expect_spin`] for localized states; in lower
/// dimensions only the spin component along the missing axes survives the
/// integration by parts.
pub fn spin_from_mita(f: &SpinorField, units: Units) -> Result<[f64; 3], CurrentError> {
    check_localized(f)?;
    let m = first_moment(f.grid(), &mita_current(f, units));
    Ok(m.map(|v| units.mass * v))
}

/// `(q/2) ∫ r × j` for an arbitrary current.
pub fn moment_from_current(f: &SpinorField, j: &VectorField, units: Units) -> Result<[f64; 3], CurrentError> {
    check_localized(f)?;
    Ok(first_moment(f.grid(), j).map(|v| 0.5 * units.charge * v))
}

/// `(q/2) ∫ r × j_spin`; equals `⟨μ_s⟩`, i.e. the spin current carries g = 2.
pub fn moment_from_spin_current(f: &SpinorField, units: Units) -> Result<[f64; 3], CurrentError> {
    moment_from_current(f, &spin_current(f, units), units)
}

pub fn auxiliary_spinor_with(h: &Hamiltonian, f: &SpinorField) -> SpinorField {
    h.sigma_dot_pi(f)
        .scaled(Complex64::from(-1.0 / (2.0 * h.units().mass * C_LIGHT)))
}

/// `Χ = -(1/2mc) σ·(p̂ - qA) ψ`.
pub fn auxiliary_spinor(f: &SpinorField, p: &EMPotential, t: f64, units: Units) -> SpinorField {
    auxiliary_spinor_with(&Hamiltonian::new(f.grid(), p, t, units), f)
}

/// `J = -c(ψ†σΧ + Χ†σψ) = -2c Re(ψ†σΧ)`.
pub fn levy_leblond_current(psi: &SpinorField, chi: &SpinorField) -> Result<VectorField, CurrentError> {
    psi.same_grid(chi)?;
    let grid = psi.grid();
    let mut out = VectorField::zeros(grid);
    for idx in 0..grid.len() {
        let [p1, p2] = psi.at(idx);
        let [x1, x2] = chi.at(idx);
        let sx = p1.conj() * x2 + p2.conj() * x1;
        let sy = p1.conj() * (-I * x2) + p2.conj() * (I * x1);
        let sz = p1.conj() * x1 - p2.conj() * x2;
        out.components[0][idx] = -2.0 * C_LIGHT * sx.re;
        out.components[1][idx] = -2.0 * C_LIGHT * sy.re;
        out.components[2][idx] = -2.0 * C_LIGHT * sz.re;
    }
    Ok(out)
}

/// Max-norm residual of the minimally coupled first-order pair
///
/// * `R₁ = σ·(p̂ - qA)ψ + 2mcΧ`
/// * `R₂ = cσ·(p̂ - qA)Χ + (iħ∂ₜ - qφ)ψ`
///
/// as `max(‖R₁‖∞, ‖R₂‖∞) / ‖ψ‖∞`.
pub fn levy_leblond_residual_with(
    h: &Hamiltonian,
    bi: &BispinorField,
    dpsi_dt: &SpinorField,
) -> Result<f64, CurrentError> {
    let (psi, chi) = (&bi.psi, &bi.chi);
    psi.same_grid(dpsi_dt)?;
    let units = h.units();
    let r1 = h
        .sigma_dot_pi(psi)
        .axpy(Complex64::from(2.0 * units.mass * C_LIGHT), chi);
    let mut r2 = h
        .sigma_dot_pi(chi)
        .scaled(Complex64::from(C_LIGHT))
        .axpy(I * HBAR, dpsi_dt);
    if let Some(phi) = &h.potential().phi {
        let q = units.charge;
        for (c, comp) in r2.components_mut().iter_mut().enumerate() {
            for (idx, v) in comp.iter_mut().enumerate() {
                *v -= q * phi[idx] * psi.component(c)[idx];
            }
        }
    }
    let scale = psi.max_abs();
    Ok(r1.max_abs().max(r2.max_abs()) / scale)
}

pub fn levy_leblond_residual(
    bi: &BispinorField,
    p: &EMPotential,
    t: f64,
    units: Units,
    dpsi_dt: &SpinorField,
) -> Result<f64, CurrentError> {
    let h = Hamiltonian::new(bi.psi.grid(), p, t, units);
    levy_leblond_residual_with(&h, bi, dpsi_dt)
}

/// `∂ψ/∂t = Hψ / (iħ)`.
pub fn schrodinger_rate(h: &Hamiltonian, f: &SpinorField) -> SpinorField {
    h.apply(f).scaled(-I / HBAR)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum SpinTerm {
    #[default]
    Include,
    Omit,
}

/// `∂ρ/∂t + ∇·J` pointwise, with `∂ρ/∂t = (2/ħ) Im(ψ†Hψ)` taken from the
/// Hamiltonian rather than from time stepping.
pub fn continuity_residual_with(h: &Hamiltonian, f: &SpinorField, spin: SpinTerm) -> ScalarField {
    let hf = h.apply(f);
    let dec = decompose_current_with(h, f);
    let j = match spin {
        SpinTerm::Include => dec.j_total,
        SpinTerm::Omit => dec.without_spin(),
    };
    let mut out = h.spectral().divergence(&j);
    for (idx, v) in out.values.iter_mut().enumerate() {
        let [a, b] = f.at(idx);
        let [ha, hb] = hf.at(idx);
        *v += 2.0 / HBAR * (a.conj() * ha + b.conj() * hb).im;
    }
    out
}

pub fn continuity_residual(f: &SpinorField, p: &EMPotential, t: f64, units: Units) -> ScalarField {
    let h = Hamiltonian::new(f.grid(), p, t, units);
    continuity_residual_with(&h, f, SpinTerm::Include)
}
