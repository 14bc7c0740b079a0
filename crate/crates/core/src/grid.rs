//! Uniform periodic Cartesian grids and real-valued fields sampled on them.

use std::f64::consts::PI;

/// Default cap on the total number of grid points.
pub const DEFAULT_POINT_BUDGET: usize = 1 << 24;

pub const MIN_POINTS_PER_AXIS: usize = 8;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum GridError {
    #[error("grid dimension must be 1, 2 or 3, got {0}")]
    Dimension(usize),
    #[error("axis {axis}: {n} points is not a power of two >= {MIN_POINTS_PER_AXIS}")]
    PointCount { axis: usize, n: usize },
    #[error("axis {axis}: spacing {h} must be positive and finite")]
    Spacing { axis: usize, h: f64 },
    #[error("grid has {total} points, over the budget of {budget}")]
    Budget { total: usize, budget: usize },
}

/// Periodic grid on `dim` axes; inactive axes have one point and unit
/// spacing, so indexing and quadrature are uniform across dimensions.
///
/// Points are stored row-major: the last active axis varies fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    dim: usize,
    n: [usize; 3],
    h: [f64; 3],
    origin: [f64; 3],
}

impl Grid {
    /// Grid with `n[i]` points spanning `extent[i]`, centred on the origin.
    pub fn centered(n: &[usize], extent: &[f64]) -> Result<Self, GridError> {
        if n.len() != extent.len() {
            return Err(GridError::Dimension(n.len().max(extent.len())));
        }
        let h: Vec<f64> = n.iter().zip(extent).map(|(&n, &l)| l / n as f64).collect();
        let origin: Vec<f64> = extent.iter().map(|l| -0.5 * l).collect();
        Self::with_origin(n, &h, &origin)
    }

    pub fn with_origin(n: &[usize], h: &[f64], origin: &[f64]) -> Result<Self, GridError> {
        Self::with_budget(n, h, origin, DEFAULT_POINT_BUDGET)
    }

    pub fn with_budget(
        n: &[usize],
        h: &[f64],
        origin: &[f64],
        budget: usize,
    ) -> Result<Self, GridError> {
        let dim = n.len();
        if !(1..=3).contains(&dim) || h.len() != dim || origin.len() != dim {
            return Err(GridError::Dimension(dim));
        }
        let mut grid = Grid {
            dim,
            n: [1; 3],
            h: [1.0; 3],
            origin: [0.0; 3],
        };
        for axis in 0..dim {
            if n[axis] < MIN_POINTS_PER_AXIS || !n[axis].is_power_of_two() {
                return Err(GridError::PointCount { axis, n: n[axis] });
            }
            if !(h[axis].is_finite() && h[axis] > 0.0) {
                return Err(GridError::Spacing { axis, h: h[axis] });
            }
            grid.n[axis] = n[axis];
            grid.h[axis] = h[axis];
            grid.origin[axis] = origin[axis];
        }
        let total = grid.len();
        if total > budget {
            return Err(GridError::Budget { total, budget });
        }
        Ok(grid)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Points per axis; inactive axes report 1.
    pub fn shape(&self) -> [usize; 3] {
        self.n
    }

    pub fn points(&self, axis: usize) -> usize {
        self.n[axis]
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        self.h[axis]
    }

    pub fn origin(&self, axis: usize) -> f64 {
        self.origin[axis]
    }

    pub fn extent(&self, axis: usize) -> f64 {
        self.h[axis] * self.n[axis] as f64
    }

    pub fn is_active(&self, axis: usize) -> bool {
        axis < self.dim
    }

    pub fn len(&self) -> usize {
        self.n.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Quadrature weight `h^dim`.
    pub fn cell_volume(&self) -> f64 {
        self.h[..self.dim].iter().product()
    }

    /// Stride between neighbours along `axis` in the flat layout.
    pub fn stride(&self, axis: usize) -> usize {
        self.n[axis + 1..].iter().product()
    }

    pub fn index(&self, i: [usize; 3]) -> usize {
        (i[0] * self.n[1] + i[1]) * self.n[2] + i[2]
    }

    pub fn unravel(&self, idx: usize) -> [usize; 3] {
        let iz = idx % self.n[2];
        let rest = idx / self.n[2];
        [rest / self.n[1], rest % self.n[1], iz]
    }

    /// Position of a grid point; inactive coordinates are zero.
    pub fn position(&self, idx: usize) -> [f64; 3] {
        let i = self.unravel(idx);
        let mut r = [0.0; 3];
        for axis in 0..self.dim {
            r[axis] = self.origin[axis] + i[axis] as f64 * self.h[axis];
        }
        r
    }

    pub fn positions(&self) -> impl Iterator<Item = [f64; 3]> + '_ {
        (0..self.len()).map(|i| self.position(i))
    }

    /// Whether `r` lies in the half-open box `[origin, origin + extent)` on
    /// every active axis.
    pub fn contains(&self, r: [f64; 3]) -> bool {
        (0..self.dim).all(|a| {
            let lo = self.origin[a];
            r[a] >= lo && r[a] < lo + self.extent(a)
        })
    }

    /// Angular wavenumbers in FFT order, covering `[-π/h, π/h)`.
    pub fn wavenumbers(&self, axis: usize) -> Vec<f64> {
        let n = self.n[axis];
        if !self.is_active(axis) {
            return vec![0.0];
        }
        let dk = 2.0 * PI / self.extent(axis);
        (0..n)
            .map(|j| {
                let m = if j < n / 2 { j as isize } else { j as isize - n as isize };
                m as f64 * dk
            })
            .collect()
    }
}

/// Real scalar samples on a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField {
    pub grid: Grid,
    pub values: Vec<f64>,
}

impl ScalarField {
    pub fn zeros(grid: &Grid) -> Self {
        Self {
            grid: grid.clone(),
            values: vec![0.0; grid.len()],
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.cell_volume()
    }
}

/// Real 3-vector samples on a grid, stored as three component arrays.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField {
    pub grid: Grid,
    pub components: [Vec<f64>; 3],
}

impl VectorField {
    pub fn zeros(grid: &Grid) -> Self {
        let n = grid.len();
        Self {
            grid: grid.clone(),
            components: [vec![0.0; n], vec![0.0; n], vec![0.0; n]],
        }
    }

    pub fn at(&self, idx: usize) -> [f64; 3] {
        [
            self.components[0][idx],
            self.components[1][idx],
            self.components[2][idx],
        ]
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut out = self.clone();
        out.components
            .iter_mut()
            .flatten()
            .for_each(|v| *v *= s);
        out
    }

    pub fn add(&self, other: &VectorField) -> Self {
        let mut out = self.clone();
        for (a, b) in out.components.iter_mut().zip(&other.components) {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
        }
        out
    }

    /// Largest componentwise absolute difference.
    pub fn max_diff(&self, other: &VectorField) -> f64 {
        self.components
            .iter()
            .zip(&other.components)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()))
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.components
            .iter()
            .flatten()
            .fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `Σ v h^dim` per component.
    pub fn integral(&self) -> [f64; 3] {
        let w = self.grid.cell_volume();
        [0, 1, 2].map(|c| self.components[c].iter().sum::<f64>() * w)
    }
}
