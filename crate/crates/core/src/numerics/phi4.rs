//! The cubic equation `∂_t Φ = (Δ - m)Φ + cΦ - Φ³ + ξ_ε` in one or two
//! space dimensions.
//!
//! The split solver writes `Φ = Ψ + X` with `X` the linear solution and
//! evolves `Ψ` under
//! `∂_t Ψ = (Δ - m)Ψ + c(Ψ + X) - (Ψ³ + 3XΨ² + 3X²Ψ + X³)`,
//! optionally with `X²` and `X³` replaced by their Wick powers. The direct
//! solver evolves `Φ` itself. Both use exponential Euler with the
//! nonlinearity frozen over a step, and they consume identical random
//! draws, so the Wick-renormalised split run and a direct run with
//! `c + 3C_ε` agree up to rounding.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::grid::{FieldTransform, TorusGrid};
use super::mollifier::MollifierSpec;
use super::she::{FieldSample, NoiseSource, OuStepper, SheOptions};
use super::wick::wick_constant;
use super::NumericsError;

/// Deterministic initial condition `u₀` added to the stationary linear
/// field.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialData {
    Zero,
    Constant { value: f64 },
    /// `value + amplitude · cos(2π x₁ / L)`.
    Cosine { value: f64, amplitude: f64 },
}

impl InitialData {
    pub fn values(&self, grid: &TorusGrid) -> Vec<f64> {
        (0..grid.size())
            .map(|i| match self {
                InitialData::Zero => 0.0,
                InitialData::Constant { value } => *value,
                InitialData::Cosine { value, amplitude } => {
                    value + amplitude * (2.0 * std::f64::consts::PI * grid.position(i)[0] / grid.length).cos()
                }
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Phi4Options {
    pub linear: SheOptions,
    pub initial: InitialData,
    /// A run is abandoned once `sup |Φ|` exceeds this.
    pub blowup_guard: f64,
    /// Smallest step the adaptive control may reach, as a fraction of `dt`.
    pub min_step_fraction: f64,
}

impl Default for Phi4Options {
    fn default() -> Self {
        Phi4Options {
            linear: SheOptions::default(),
            initial: InitialData::Zero,
            blowup_guard: 1e6,
            min_step_fraction: 1.0 / 1024.0,
        }
    }
}

/// Recorded samples of `Φ` together with the space-time average of its
/// pairing against a test function.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Phi4Run {
    pub samples: Vec<FieldSample>,
    pub wick_constant: f64,
    /// `(1/T) ∫₀ᵀ ⟨Φ(t), φ⟩ dt` by the trapezoidal rule over all steps.
    pub averaged_pairing: f64,
    /// Number of times the step was halved.
    pub step_halvings: u32,
}

/// Which equation the solver integrates.
#[derive(Clone, Copy, Debug, PartialEq)]
enum Form {
    /// `Ψ` with `X` split off; `wick` selects renormalised powers.
    Split { wick: bool },
    /// `Φ` directly.
    Direct,
}

/// Split solve with plain (`renormalised = false`) or Wick powers.
pub fn solve_phi4_2(
    grid: &TorusGrid,
    moll: &MollifierSpec,
    c: f64,
    renormalised: bool,
    opts: &Phi4Options,
    test: &[f64],
) -> Result<Phi4Run, NumericsError> {
    run(grid, moll, c, Form::Split { wick: renormalised }, opts, test)
}

/// Direct solve of `∂_t Φ = (Δ - m)Φ + cΦ - Φ³ + ξ_ε`.
pub fn solve_phi4_direct(
    grid: &TorusGrid,
    moll: &MollifierSpec,
    c: f64,
    opts: &Phi4Options,
    test: &[f64],
) -> Result<Phi4Run, NumericsError> {
    run(grid, moll, c, Form::Direct, opts, test)
}

fn run(
    grid: &TorusGrid,
    moll: &MollifierSpec,
    c: f64,
    form: Form,
    opts: &Phi4Options,
    test: &[f64],
) -> Result<Phi4Run, NumericsError> {
    grid.validate()?;
    moll.validate()?;
    if test.len() != grid.size() {
        return Err(NumericsError::InvalidGrid(format!("test function has {} values, grid has {}", test.len(), grid.size())));
    }
    let cw = wick_constant(grid, moll, &opts.linear)?;
    let transform = FieldTransform::new(grid);
    let mut noise = NoiseSource::new(grid.seed, opts.linear.replica, grid.size());
    let mut ou = OuStepper::new(grid, moll, &opts.linear);

    let x0 = if opts.linear.stationary_start {
        ou.stationary(&noise.draw(&transform))
    } else {
        vec![Complex64::new(0.0, 0.0); grid.size()]
    };
    let u0 = transform.to_modes(&opts.initial.values(grid));
    // `x` holds the linear part in the split form and is unused otherwise
    let (mut x, mut v) = match form {
        Form::Split { .. } => (x0, u0),
        Form::Direct => (Vec::new(), x0.iter().zip(&u0).map(|(a, b)| a + b).collect()),
    };
    let field = |x: &[Complex64], v: &[Complex64]| -> (Vec<f64>, Vec<f64>) {
        let pv = transform.to_physical(v);
        match form {
            Form::Split { .. } => (transform.to_physical(x), pv),
            Form::Direct => (vec![0.0; pv.len()], pv),
        }
    };
    let c_guard = match form {
        Form::Split { wick: true } => c + 3.0 * cw,
        _ => c,
    };

    let steps = grid.steps();
    let every = opts.linear.record_every.max(1);
    let sample = |t: f64, px: &[f64], pv: &[f64]| FieldSample {
        time: t,
        epsilon: moll.epsilon,
        seed: grid.seed,
        values: px.iter().zip(pv).map(|(a, b)| a + b).collect(),
    };
    let (mut px, mut pv) = field(&x, &v);
    let first = sample(0.0, &px, &pv);
    let mut samples = vec![first.clone()];
    let mut last_pairing = first.pairing(test);
    let mut integral = 0.0;
    let mut t = 0.0;
    let mut halvings = 0u32;
    let mut dt_base = grid.dt;
    let mut n = 0usize;
    while t < grid.horizon - 1e-12 {
        let sup = px.iter().zip(&pv).fold(0.0f64, |m, (a, b)| m.max((a + b).abs()));
        if !sup.is_finite() || sup > opts.blowup_guard {
            return Err(NumericsError::BlowUp { time: t, sup });
        }
        while dt_base * (3.0 * sup * sup + c_guard.abs()) > 1.0 {
            if dt_base / 2.0 < grid.dt * opts.min_step_fraction {
                return Err(NumericsError::BlowUp { time: t, sup });
            }
            dt_base /= 2.0;
            halvings += 1;
        }
        let dt = dt_base.min(grid.horizon - t);
        if (dt - ou.dt()).abs() > 1e-15 {
            ou.set_dt(dt);
        }
        let forcing: Vec<f64> = match form {
            Form::Split { wick } => px
                .iter()
                .zip(&pv)
                .map(|(&xx, &psi)| {
                    let (x2, x3) = if wick { (xx * xx - cw, xx * xx * xx - 3.0 * cw * xx) } else { (xx * xx, xx * xx * xx) };
                    c * (psi + xx) - (psi * psi * psi + 3.0 * xx * psi * psi + 3.0 * x2 * psi + x3)
                })
                .collect(),
            Form::Direct => pv.iter().map(|&phi| c * phi - phi * phi * phi).collect(),
        };
        let f = transform.to_modes(&forcing);
        let draw = noise.draw(&transform);
        for (i, vi) in v.iter_mut().enumerate() {
            *vi = *vi * ou.decay()[i] + f[i] * ou.forcing_weight(i);
        }
        match form {
            Form::Split { .. } => ou.step(&mut x, draw),
            Form::Direct => {
                let inc = ou.noise_increment(draw);
                for (vi, d) in v.iter_mut().zip(inc) {
                    *vi += d;
                }
            }
        }
        n += 1;
        t = if grid.horizon - (t + dt) < 1e-12 { grid.horizon } else { t + dt };
        (px, pv) = field(&x, &v);
        let s = sample(t, &px, &pv);
        let p = s.pairing(test);
        integral += 0.5 * (p + last_pairing) * dt;
        last_pairing = p;
        if n.is_multiple_of(every) || t >= grid.horizon {
            samples.push(s);
        }
        if n > 64 * steps.max(1) * 1024 {
            return Err(NumericsError::BlowUp { time: t, sup });
        }
    }
    let averaged_pairing = if grid.horizon > 0.0 { integral / grid.horizon } else { last_pairing };
    Ok(Phi4Run { samples, wick_constant: cw, averaged_pairing, step_halvings: halvings })
}

/// Configuration of the `ε`-ladder experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LadderConfig {
    pub grid: TorusGrid,
    pub profile: super::mollifier::Profile,
    pub epsilons: Vec<f64>,
    pub coupling: f64,
    pub replicas: usize,
    #[serde(default)]
    pub options: Option<Phi4Options>,
}

impl LadderConfig {
    /// Two dimensions, 64 points, unit horizon, `ε = 2⁻³, 2⁻⁴, 2⁻⁵`.
    pub fn standard(seed: u64) -> Self {
        LadderConfig {
            grid: TorusGrid { dimension: 2, points: 64, length: 1.0, dt: 1.0 / 256.0, horizon: 1.0, seed },
            profile: super::mollifier::Profile::Box,
            epsilons: vec![0.125, 0.0625, 0.03125],
            coupling: 0.0,
            replicas: 8,
            options: None,
        }
    }

    pub fn options(&self) -> Phi4Options {
        self.options.clone().unwrap_or_else(|| Phi4Options {
            initial: InitialData::Constant { value: 1.0 },
            linear: SheOptions { record_every: usize::MAX, ..SheOptions::default() },
            ..Phi4Options::default()
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LadderRow {
    pub epsilon: f64,
    pub wick_constant: f64,
    /// Mean over replicas of the averaged pairing.
    pub renormalised: f64,
    pub naive: f64,
    pub renormalised_per_replica: Vec<f64>,
    pub naive_per_replica: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LadderReport {
    pub rows: Vec<LadderRow>,
    /// Mean absolute change of the pairing between consecutive `ε`, per
    /// replica (the same noise drives every `ε`).
    pub renormalised_gaps: Vec<f64>,
    pub naive_gaps: Vec<f64>,
    /// Each gap divided by the previous one.
    pub renormalised_gap_ratios: Vec<f64>,
    /// Whether the naive means change in the same direction at every step.
    pub naive_monotone: bool,
}

/// Run renormalised and naive solutions along the ladder, all with the
/// constant test function.
pub fn run_ladder(cfg: &LadderConfig) -> Result<LadderReport, NumericsError> {
    let opts = cfg.options();
    let test = vec![1.0; cfg.grid.size()];
    let mut rows = Vec::new();
    for &eps in &cfg.epsilons {
        let moll = MollifierSpec::new(cfg.profile, eps);
        let results: Vec<Result<(f64, f64, f64), NumericsError>> = (0..cfg.replicas as u64)
            .into_par_iter()
            .map(|r| {
                let mut o = opts.clone();
                o.linear.replica = r;
                let ren = solve_phi4_2(&cfg.grid, &moll, cfg.coupling, true, &o, &test)?;
                let naive = solve_phi4_2(&cfg.grid, &moll, cfg.coupling, false, &o, &test)?;
                Ok((ren.averaged_pairing, naive.averaged_pairing, ren.wick_constant))
            })
            .collect();
        let results: Vec<(f64, f64, f64)> = results.into_iter().collect::<Result<_, _>>()?;
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        let ren: Vec<f64> = results.iter().map(|r| r.0).collect();
        let naive: Vec<f64> = results.iter().map(|r| r.1).collect();
        rows.push(LadderRow {
            epsilon: eps,
            wick_constant: results.first().map_or(0.0, |r| r.2),
            renormalised: mean(&ren),
            naive: mean(&naive),
            renormalised_per_replica: ren,
            naive_per_replica: naive,
        });
    }
    let gaps = |pick: fn(&LadderRow) -> &Vec<f64>| -> Vec<f64> {
        rows.windows(2)
            .map(|w| {
                let (a, b) = (pick(&w[0]), pick(&w[1]));
                a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>() / a.len() as f64
            })
            .collect()
    };
    let renormalised_gaps = gaps(|r| &r.renormalised_per_replica);
    let naive_gaps = gaps(|r| &r.naive_per_replica);
    let renormalised_gap_ratios = renormalised_gaps.windows(2).map(|w| w[1] / w[0]).collect();
    let steps: Vec<f64> = rows.windows(2).map(|w| w[1].naive - w[0].naive).collect();
    let naive_monotone = !steps.is_empty() && (steps.iter().all(|d| *d < 0.0) || steps.iter().all(|d| *d > 0.0));
    Ok(LadderReport { rows, renormalised_gaps, naive_gaps, renormalised_gap_ratios, naive_monotone })
}
