//! Lanczos approximation of `exp(-iH dt/ħ) ψ` with full reorthogonalization.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::fields::EMPotential;
use crate::state::{Hamiltonian, SpinorField};
use crate::units::{Units, HBAR};

use super::{EvolveError, PropagatorConfig};

/// Outcome of one Krylov step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KrylovInfo {
    /// Subspace dimension used.
    pub dim: usize,
    /// A-posteriori error estimate relative to the input norm.
    pub estimate: f64,
}

/// `exp(-i T τ) e₁` for a real symmetric tridiagonal `T` given by its
/// diagonal and off-diagonal.
fn tridiagonal_exp_e1(alpha: &[f64], beta: &[f64], tau: f64) -> Vec<Complex64> {
    let m = alpha.len();
    let mut t = DMatrix::<f64>::zeros(m, m);
    for i in 0..m {
        t[(i, i)] = alpha[i];
        if i + 1 < m {
            t[(i, i + 1)] = beta[i];
            t[(i + 1, i)] = beta[i];
        }
    }
    let eig = SymmetricEigen::new(t);
    let q = &eig.eigenvectors;
    (0..m)
        .map(|i| {
            (0..m)
                .map(|k| {
                    q[(i, k)] * q[(0, k)] * Complex64::from_polar(1.0, -eig.eigenvalues[k] * tau)
                })
                .sum()
        })
        .collect()
}

/// Smallest subspace size at which convergence is tested, unless the
/// Lanczos recursion breaks down earlier.
const MIN_DIM: usize = 2;

pub fn krylov_exp(
    h: &Hamiltonian,
    f: &SpinorField,
    dt: f64,
    max_dim: usize,
    tol: f64,
) -> Result<(SpinorField, KrylovInfo), EvolveError> {
    let beta0 = f.norm();
    if beta0 == 0.0 {
        return Ok((f.clone(), KrylovInfo { dim: 0, estimate: 0.0 }));
    }
    let tau = dt / HBAR;
    let mut basis = vec![f.scaled(Complex64::from(1.0 / beta0))];
    let mut alpha = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut last_estimate = f64::INFINITY;
    for j in 0..max_dim {
        let mut w = h.apply(&basis[j]);
        let a = basis[j].inner(&w).re;
        alpha.push(a);
        w = w.axpy(Complex64::from(-a), &basis[j]);
        if j > 0 {
            w = w.axpy(Complex64::from(-beta[j - 1]), &basis[j - 1]);
        }
        for _ in 0..2 {
            for v in &basis {
                let proj = v.inner(&w);
                w = w.axpy(-proj, v);
            }
        }
        let b = w.norm();
        let y = tridiagonal_exp_e1(&alpha, &beta, tau);
        let scale = alpha.iter().fold(0.0_f64, |m, x| m.max(x.abs())).max(1.0);
        let breakdown = b <= 1e-13 * scale;
        let estimate = if breakdown { 0.0 } else { b * tau.abs() * y[j].norm() };
        last_estimate = estimate;
        if breakdown || (j + 1 >= MIN_DIM && estimate < tol) {
            let mut out = SpinorField::zeros(f.grid());
            for (v, c) in basis.iter().zip(&y) {
                out = out.axpy(c * beta0, v);
            }
            return Ok((
                out,
                KrylovInfo {
                    dim: j + 1,
                    estimate,
                },
            ));
        }
        beta.push(b);
        basis.push(w.scaled(Complex64::from(1.0 / b)));
    }
    Err(EvolveError::KrylovNotConverged {
        dim: max_dim,
        estimate: last_estimate,
    })
}

/// One Krylov step from `t` to `t + dt`, with the Hamiltonian frozen at the
/// step midpoint.
pub fn step_krylov(
    f: &SpinorField,
    p: &EMPotential,
    t: f64,
    dt: f64,
    units: Units,
    cfg: &PropagatorConfig,
) -> Result<(SpinorField, KrylovInfo), EvolveError> {
    let h = Hamiltonian::new(f.grid(), p, t + 0.5 * dt, units);
    krylov_exp(&h, f, dt, cfg.krylov_dim, cfg.tol)
}
