//! Natural units: ħ = c = 1 throughout. The mass is carried explicitly so the
//! formulas read the same as their dimensional forms, but every shipped
//! configuration uses `m = 1`.

pub const HBAR: f64 = 1.0;
pub const C_LIGHT: f64 = 1.0;

/// Charge and mass of the simulated particle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Units {
    pub charge: f64,
    pub mass: f64,
}

impl Units {
    pub const ELECTRON: Units = Units {
        charge: -1.0,
        mass: 1.0,
    };

    pub fn with_charge(charge: f64) -> Self {
        Self {
            charge,
            mass: 1.0,
        }
    }

    /// `|q| B / m`, the cyclotron and Larmor angular frequency for g = 2.
    pub fn cyclotron_frequency(&self, b: f64) -> f64 {
        (self.charge * b / self.mass).abs()
    }

    /// Prefactor of the spin magnetic moment `μ_s = (qħ/2m) σ`.
    pub fn magneton(&self) -> f64 {
        self.charge * HBAR / (2.0 * self.mass)
    }
}

impl Default for Units {
    fn default() -> Self {
        Self::ELECTRON
    }
}
