use std::collections::VecDeque;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::grid::{FieldTransform, TorusGrid};
use super::mollifier::MollifierSpec;
use super::NumericsError;

/// A real field on the grid at one instant.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldSample {
    pub time: f64,
    pub epsilon: f64,
    pub seed: u64,
    pub values: Vec<f64>,
}

impl FieldSample {
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// `∫ u φ` over the torus with the normalised measure.
    pub fn pairing(&self, test: &[f64]) -> f64 {
        self.values.iter().zip(test).map(|(u, p)| u * p).sum::<f64>() / self.values.len() as f64
    }
}

/// Options for the linear equation `∂_t X = (Δ - m) X + s ξ_ε`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SheOptions {
    /// Use `Δ - mass`; otherwise `Δ` with the zero mode held at zero.
    pub massive: bool,
    pub mass: f64,
    pub noise_amplitude: f64,
    /// Start from the exact stationary law; otherwise from zero.
    pub stationary_start: bool,
    /// Keep every `record_every`-th step (the last step is always kept).
    pub record_every: usize,
    /// Stream index of the random generator, one per replica.
    pub replica: u64,
}

impl Default for SheOptions {
    fn default() -> Self {
        SheOptions { massive: true, mass: 1.0, noise_amplitude: 1.0, stationary_start: true, record_every: 1, replica: 0 }
    }
}

impl SheOptions {
    /// Decay rate of mode `idx`, or `None` for the pinned zero mode.
    pub fn rate(&self, grid: &TorusGrid, idx: usize) -> Option<f64> {
        let k2 = grid.k_squared(idx);
        if self.massive {
            Some(self.mass + k2)
        } else if k2 == 0.0 {
            None
        } else {
            Some(k2)
        }
    }
}

/// Source of space-time white noise in mode coordinates.
///
/// Each draw is an array of independent standard normals on the grid,
/// mapped by the unitary transform. The result is Hermitian (so the field
/// stays real) and every mode has unit mean square. Draws do not depend on
/// the mollifier, so runs at different `ε` with the same seed see the same
/// underlying noise.
pub struct NoiseSource {
    rng: ChaCha8Rng,
    size: usize,
}

impl NoiseSource {
    pub fn new(seed: u64, replica: u64, size: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(replica);
        NoiseSource { rng, size }
    }

    pub fn draw(&mut self, transform: &FieldTransform) -> Vec<Complex64> {
        let w: Vec<f64> = (0..self.size).map(|_| StandardNormal.sample(&mut self.rng)).collect();
        transform.spectral().forward_unitary(&w)
    }
}

/// Exact (in law) time stepping of the mollified Ornstein-Uhlenbeck modes.
pub struct OuStepper {
    rates: Vec<Option<f64>>,
    rho: Vec<f64>,
    amplitude: f64,
    window: usize,
    history: VecDeque<Vec<Complex64>>,
    dt: f64,
    decay: Vec<f64>,
    noise_gain: Vec<f64>,
}

impl OuStepper {
    pub fn new(grid: &TorusGrid, moll: &MollifierSpec, opts: &SheOptions) -> Self {
        let rates = (0..grid.size()).map(|i| opts.rate(grid, i)).collect();
        let mut s = OuStepper {
            rates,
            rho: moll.multiplier(grid),
            amplitude: opts.noise_amplitude,
            window: moll.time_window(grid.dt),
            history: VecDeque::new(),
            dt: 0.0,
            decay: Vec::new(),
            noise_gain: Vec::new(),
        };
        s.set_dt(grid.dt);
        s
    }

    pub fn rates(&self) -> &[Option<f64>] {
        &self.rates
    }

    pub fn decay(&self) -> &[f64] {
        &self.decay
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// `φ₁(λ dt) dt = (1 - e^{-λ dt}) / λ`, the weight of a forcing held
    /// constant over one step.
    pub fn forcing_weight(&self, idx: usize) -> f64 {
        match self.rates[idx] {
            None => 0.0,
            Some(l) => -(-l * self.dt).exp_m1() / l,
        }
    }

    pub fn set_dt(&mut self, dt: f64) {
        self.dt = dt;
        self.decay = self.rates.iter().map(|r| r.map_or(0.0, |l| (-l * dt).exp())).collect();
        self.noise_gain = self
            .rates
            .iter()
            .zip(&self.rho)
            .map(|(r, rho)| match r {
                None => 0.0,
                Some(l) if self.window == 1 => rho * (-(-2.0 * l * dt).exp_m1() / (2.0 * l)).sqrt(),
                Some(l) => rho * (-(-l * dt).exp_m1() / l) / dt.sqrt(),
            })
            .collect();
    }

    /// A draw from the stationary law of the spatially mollified modes.
    pub fn stationary(&self, noise: &[Complex64]) -> Vec<Complex64> {
        noise
            .iter()
            .enumerate()
            .map(|(i, w)| match self.rates[i] {
                None => Complex64::new(0.0, 0.0),
                Some(l) => w * (self.amplitude * self.rho[i] / (2.0 * l).sqrt()),
            })
            .collect()
    }

    /// The increment added to the modes over one step for a noise draw.
    pub fn noise_increment(&mut self, noise: Vec<Complex64>) -> Vec<Complex64> {
        let forcing = if self.window == 1 {
            noise
        } else {
            self.history.push_front(noise);
            self.history.truncate(self.window);
            let mut avg = vec![Complex64::new(0.0, 0.0); self.rates.len()];
            for h in &self.history {
                for (a, b) in avg.iter_mut().zip(h) {
                    *a += b;
                }
            }
            let s = 1.0 / self.window as f64;
            avg.iter_mut().for_each(|z| *z *= s);
            avg
        };
        forcing.iter().zip(&self.noise_gain).map(|(w, g)| w * (g * self.amplitude)).collect()
    }

    /// Advance `modes` by one step driven by `noise`.
    pub fn step(&mut self, modes: &mut [Complex64], noise: Vec<Complex64>) {
        let inc = self.noise_increment(noise);
        for ((a, d), n) in modes.iter_mut().zip(&self.decay).zip(inc) {
            *a = *a * d + n;
        }
    }
}

/// Solve the mollified stochastic heat equation and return the recorded
/// samples, starting with time zero.
pub fn solve_she(grid: &TorusGrid, moll: &MollifierSpec, opts: &SheOptions) -> Result<Vec<FieldSample>, NumericsError> {
    grid.validate()?;
    moll.validate()?;
    let transform = FieldTransform::new(grid);
    let mut noise = NoiseSource::new(grid.seed, opts.replica, grid.size());
    let mut ou = OuStepper::new(grid, moll, opts);
    let mut modes = if opts.stationary_start {
        ou.stationary(&noise.draw(&transform))
    } else {
        vec![Complex64::new(0.0, 0.0); grid.size()]
    };
    let sample = |t: f64, modes: &[Complex64]| FieldSample {
        time: t,
        epsilon: moll.epsilon,
        seed: grid.seed,
        values: transform.to_physical(modes),
    };
    let steps = grid.steps();
    let every = opts.record_every.max(1);
    let mut out = vec![sample(0.0, &modes)];
    let mut t = 0.0;
    for n in 1..=steps {
        let dt = grid.dt.min(grid.horizon - t);
        if (dt - ou.dt()).abs() > 1e-15 {
            ou.set_dt(dt);
        }
        ou.step(&mut modes, noise.draw(&transform));
        t = if n == steps { grid.horizon } else { t + dt };
        if n % every == 0 || n == steps {
            out.push(sample(t, &modes));
        }
    }
    Ok(out)
}

/// Independent draws of the stationary field, one per replica.
pub fn stationary_samples(
    grid: &TorusGrid,
    moll: &MollifierSpec,
    opts: &SheOptions,
    count: usize,
) -> Result<Vec<Vec<f64>>, NumericsError> {
    use rayon::prelude::*;
    grid.validate()?;
    moll.validate()?;
    let transform = FieldTransform::new(grid);
    let ou = OuStepper::new(grid, moll, opts);
    Ok((0..count as u64)
        .into_par_iter()
        .map(|r| {
            let mut noise = NoiseSource::new(grid.seed, r, grid.size());
            transform.to_physical(&ou.stationary(&noise.draw(&transform)))
        })
        .collect())
}
