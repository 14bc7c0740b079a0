//! FFT-based derivatives on periodic grids.
//!
//! First derivatives multiply by `ik` with the Nyquist mode zeroed, so the
//! derivative of a real field stays real and the operator stays exactly
//! anti-Hermitian. Products of derivatives obey the discrete product rule
//! only to the extent the product is resolved on the grid.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::grid::{Grid, ScalarField, VectorField};

type Plan = Arc<dyn Fft<f64>>;

fn plans(n: usize) -> (Plan, Plan) {
    static CACHE: OnceLock<Mutex<(FftPlanner<f64>, HashMap<usize, (Plan, Plan)>)>> =
        OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new((FftPlanner::new(), HashMap::new())));
    let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
    let (planner, map) = &mut *guard;
    if let Some(p) = map.get(&n) {
        return p.clone();
    }
    let p = (planner.plan_fft_forward(n), planner.plan_fft_inverse(n));
    map.insert(n, p.clone());
    p
}

/// Transforms and derivative symbols for one grid.
#[derive(Clone)]
pub struct Spectral {
    grid: Grid,
    forward: Vec<Plan>,
    inverse: Vec<Plan>,
    k: [Vec<f64>; 3],
    k_deriv: [Vec<f64>; 3],
}

impl std::fmt::Debug for Spectral {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Spectral").field("grid", &self.grid).finish()
    }
}

impl Spectral {
    pub fn new(grid: &Grid) -> Self {
        let mut forward = Vec::new();
        let mut inverse = Vec::new();
        for axis in 0..grid.dim() {
            let (f, i) = plans(grid.points(axis));
            forward.push(f);
            inverse.push(i);
        }
        let k = [0, 1, 2].map(|a| grid.wavenumbers(a));
        let k_deriv = [0, 1, 2].map(|a| {
            let mut k = grid.wavenumbers(a);
            let n = k.len();
            if n > 1 {
                k[n / 2] = 0.0;
            }
            k
        });
        Self {
            grid: grid.clone(),
            forward,
            inverse,
            k,
            k_deriv,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    fn transform_axis(&self, data: &mut [Complex64], axis: usize, plan: &Plan) {
        let n = self.grid.points(axis);
        let stride = self.grid.stride(axis);
        let block = n * stride;
        if stride == 1 {
            data.par_chunks_mut(n).for_each_init(
                || vec![Complex64::default(); plan.get_inplace_scratch_len()],
                |scratch, line| plan.process_with_scratch(line, scratch),
            );
            return;
        }
        let mut lines = vec![Complex64::default(); block];
        for chunk in data.chunks_mut(block) {
            for (j, line) in lines.chunks_mut(n).enumerate() {
                for (i, v) in line.iter_mut().enumerate() {
                    *v = chunk[i * stride + j];
                }
            }
            lines.par_chunks_mut(n).for_each_init(
                || vec![Complex64::default(); plan.get_inplace_scratch_len()],
                |scratch, line| plan.process_with_scratch(line, scratch),
            );
            for (j, line) in lines.chunks(n).enumerate() {
                for (i, v) in line.iter().enumerate() {
                    chunk[i * stride + j] = *v;
                }
            }
        }
    }

    /// Unnormalized forward DFT over all active axes, in place.
    pub fn forward(&self, data: &mut [Complex64]) {
        for (axis, plan) in self.forward.iter().enumerate() {
            self.transform_axis(data, axis, plan);
        }
    }

    /// Inverse DFT including the `1/N` normalization, in place.
    pub fn inverse(&self, data: &mut [Complex64]) {
        for (axis, plan) in self.inverse.iter().enumerate() {
            self.transform_axis(data, axis, plan);
        }
        let scale = 1.0 / data.len() as f64;
        data.par_iter_mut().for_each(|v| *v *= scale);
    }

    /// Multiplies the spectrum of `f` by `symbol(k)` and transforms back.
    pub fn apply_symbol<F>(&self, f: &[Complex64], symbol: F) -> Vec<Complex64>
    where
        F: Fn([f64; 3]) -> Complex64 + Sync,
    {
        let mut data = f.to_vec();
        self.forward(&mut data);
        self.scale_spectrum(&mut data, |k, _| symbol(k));
        self.inverse(&mut data);
        data
    }

    /// Multiplies a spectrum in place by `factor(k, kd)`, where `kd` has
    /// the Nyquist mode zeroed.
    pub fn scale_spectrum<F>(&self, spectrum: &mut [Complex64], factor: F)
    where
        F: Fn([f64; 3], [f64; 3]) -> Complex64 + Sync,
    {
        let grid = &self.grid;
        spectrum.par_iter_mut().enumerate().for_each(|(idx, v)| {
            let i = grid.unravel(idx);
            let k = [self.k[0][i[0]], self.k[1][i[1]], self.k[2][i[2]]];
            let kd = [
                self.k_deriv[0][i[0]],
                self.k_deriv[1][i[1]],
                self.k_deriv[2][i[2]],
            ];
            *v *= factor(k, kd);
        });
    }

    /// `|k|²` in FFT order, Nyquist included.
    pub fn k_squared(&self) -> Vec<f64> {
        (0..self.grid.len())
            .map(|idx| {
                let i = self.grid.unravel(idx);
                (0..3).map(|a| self.k[a][i[a]].powi(2)).sum()
            })
            .collect()
    }

    pub fn derivative(&self, f: &[Complex64], axis: usize) -> Vec<Complex64> {
        if !self.grid.is_active(axis) {
            return vec![Complex64::default(); f.len()];
        }
        let mut data = f.to_vec();
        self.forward(&mut data);
        self.scale_spectrum(&mut data, |_, kd| Complex64::new(0.0, kd[axis]));
        self.inverse(&mut data);
        data
    }

    /// All three partial derivatives from one forward transform; inactive
    /// axes give zero.
    pub fn gradient(&self, f: &[Complex64]) -> [Vec<Complex64>; 3] {
        let mut spectrum = f.to_vec();
        self.forward(&mut spectrum);
        [0, 1, 2].map(|axis| {
            if !self.grid.is_active(axis) {
                return vec![Complex64::default(); f.len()];
            }
            let mut d = spectrum.clone();
            self.scale_spectrum(&mut d, |_, kd| Complex64::new(0.0, kd[axis]));
            self.inverse(&mut d);
            d
        })
    }

    pub fn derivative_real(&self, f: &[f64], axis: usize) -> Vec<f64> {
        if !self.grid.is_active(axis) {
            return vec![0.0; f.len()];
        }
        let mut data: Vec<Complex64> = f.iter().map(|&x| Complex64::from(x)).collect();
        self.forward(&mut data);
        self.scale_spectrum(&mut data, |_, kd| Complex64::new(0.0, kd[axis]));
        self.inverse(&mut data);
        data.into_iter().map(|z| z.re).collect()
    }

    pub fn gradient_real(&self, f: &ScalarField) -> VectorField {
        VectorField {
            grid: self.grid.clone(),
            components: [0, 1, 2].map(|a| self.derivative_real(&f.values, a)),
        }
    }

    pub fn divergence(&self, v: &VectorField) -> ScalarField {
        let mut values = vec![0.0; self.grid.len()];
        for axis in 0..self.grid.dim() {
            let d = self.derivative_real(&v.components[axis], axis);
            values.iter_mut().zip(d).for_each(|(acc, x)| *acc += x);
        }
        ScalarField {
            grid: self.grid.clone(),
            values,
        }
    }

    pub fn curl(&self, v: &VectorField) -> VectorField {
        let d = |comp: usize, axis: usize| self.derivative_real(&v.components[comp], axis);
        let sub = |a: Vec<f64>, b: Vec<f64>| a.into_iter().zip(b).map(|(x, y)| x - y).collect();
        VectorField {
            grid: self.grid.clone(),
            components: [sub(d(2, 1), d(1, 2)), sub(d(0, 2), d(2, 0)), sub(d(1, 0), d(0, 1))],
        }
    }
}
