use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use super::NumericsError;

/// A periodic grid `[0, L)^d` with `N` points per axis, together with the
/// time discretisation of a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TorusGrid {
    pub dimension: usize,
    pub points: usize,
    #[serde(default = "one")]
    pub length: f64,
    pub dt: f64,
    pub horizon: f64,
    #[serde(default)]
    pub seed: u64,
}

fn one() -> f64 {
    1.0
}

impl TorusGrid {
    pub fn new(dimension: usize, points: usize, dt: f64, horizon: f64, seed: u64) -> Result<Self, NumericsError> {
        let g = TorusGrid { dimension, points, length: 1.0, dt, horizon, seed };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<(), NumericsError> {
        if !(1..=2).contains(&self.dimension) {
            return Err(NumericsError::InvalidGrid(format!("dimension {} is not 1 or 2", self.dimension)));
        }
        if self.points < 2 || !self.points.is_power_of_two() {
            return Err(NumericsError::InvalidGrid(format!("{} points per axis is not a power of two", self.points)));
        }
        if !(self.length > 0.0 && self.dt > 0.0 && self.horizon >= 0.0) {
            return Err(NumericsError::InvalidGrid("length and dt must be positive, horizon non-negative".into()));
        }
        Ok(())
    }

    /// Total number of grid points.
    pub fn size(&self) -> usize {
        self.points.pow(self.dimension as u32)
    }

    /// Signed mode number along one axis for FFT index `i`.
    pub fn mode(&self, i: usize) -> i64 {
        let n = self.points as i64;
        let i = i as i64;
        if i < n / 2 {
            i
        } else {
            i - n
        }
    }

    /// Wavevector of flat index `idx` (row-major, last axis fastest).
    pub fn wavevector(&self, idx: usize) -> [f64; 2] {
        let scale = 2.0 * PI / self.length;
        match self.dimension {
            1 => [scale * self.mode(idx) as f64, 0.0],
            _ => [scale * self.mode(idx / self.points) as f64, scale * self.mode(idx % self.points) as f64],
        }
    }

    pub fn k_squared(&self, idx: usize) -> f64 {
        let k = self.wavevector(idx);
        k[0] * k[0] + k[1] * k[1]
    }

    /// Physical coordinates of grid point `idx`.
    pub fn position(&self, idx: usize) -> [f64; 2] {
        let h = self.length / self.points as f64;
        match self.dimension {
            1 => [h * idx as f64, 0.0],
            _ => [h * (idx / self.points) as f64, h * (idx % self.points) as f64],
        }
    }

    /// Number of time steps needed to reach the horizon at step `dt`.
    pub fn steps(&self) -> usize {
        (self.horizon / self.dt - 1e-9).ceil().max(0.0) as usize
    }
}

/// FFT plans for one grid. Transforms are unnormalised in both directions.
#[derive(Clone)]
pub struct Spectral {
    dimension: usize,
    points: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl Spectral {
    pub fn new(grid: &TorusGrid) -> Self {
        let mut planner = FftPlanner::new();
        Spectral {
            dimension: grid.dimension,
            points: grid.points,
            forward: planner.plan_fft_forward(grid.points),
            inverse: planner.plan_fft_inverse(grid.points),
        }
    }

    fn transform(&self, data: &mut [Complex64], plan: &Arc<dyn Fft<f64>>) {
        let n = self.points;
        // rows are contiguous; the batched call handles every row at once
        plan.process(data);
        if self.dimension == 2 {
            let mut column = vec![Complex64::new(0.0, 0.0); n];
            for c in 0..n {
                for r in 0..n {
                    column[r] = data[r * n + c];
                }
                plan.process(&mut column);
                for r in 0..n {
                    data[r * n + c] = column[r];
                }
            }
        }
    }

    pub fn forward(&self, data: &mut [Complex64]) {
        self.transform(data, &self.forward.clone());
    }

    pub fn inverse(&self, data: &mut [Complex64]) {
        self.transform(data, &self.inverse.clone());
    }

    /// Unitary forward transform of a real array.
    pub fn forward_unitary(&self, real: &[f64]) -> Vec<Complex64> {
        let mut data: Vec<Complex64> = real.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.forward(&mut data);
        let s = 1.0 / (data.len() as f64).sqrt();
        data.iter_mut().for_each(|z| *z *= s);
        data
    }
}

/// Mode coefficients `a_m` and physical values `u(x_j)` are related by
/// `u(x_j) = L^{-d/2} Σ_m a_m e^{i k_m x_j}`, the expansion in the
/// orthonormal Fourier basis of the torus.
pub struct FieldTransform {
    spectral: Spectral,
    to_physical: f64,
    to_modes: f64,
}

impl FieldTransform {
    pub fn new(grid: &TorusGrid) -> Self {
        let half_volume = grid.length.powf(grid.dimension as f64 / 2.0);
        FieldTransform {
            spectral: Spectral::new(grid),
            to_physical: 1.0 / half_volume,
            to_modes: half_volume / grid.size() as f64,
        }
    }

    pub fn spectral(&self) -> &Spectral {
        &self.spectral
    }

    pub fn to_physical(&self, modes: &[Complex64]) -> Vec<f64> {
        let mut data = modes.to_vec();
        self.spectral.inverse(&mut data);
        data.iter().map(|z| z.re * self.to_physical).collect()
    }

    pub fn to_modes(&self, values: &[f64]) -> Vec<Complex64> {
        let mut data: Vec<Complex64> = values.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.spectral.forward(&mut data);
        data.iter_mut().for_each(|z| *z *= self.to_modes);
        data
    }
}
