use serde::{Deserialize, Serialize};

use super::grid::TorusGrid;
use super::NumericsError;

/// Shape of the one-dimensional mollifier profile on `[-1, 1]`. Higher
/// dimensional mollifiers are products over the axes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Profile {
    /// Indicator of `[-1/2, 1/2]`.
    Box,
    /// `exp(-1/(1-x²))` on `(-1, 1)`.
    Bump,
    /// Gaussian of standard deviation 1/3, cut off at `|x| = 1`.
    GaussianTruncated,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MollifierSpec {
    pub profile: Profile,
    pub epsilon: f64,
    /// Also smooth the noise in time, over windows of length `ε²`.
    #[serde(default)]
    pub parabolic: bool,
}

impl Profile {
    fn raw(self, x: f64) -> f64 {
        let a = x.abs();
        match self {
            Profile::Box => {
                if a <= 0.5 {
                    1.0
                } else {
                    0.0
                }
            }
            Profile::Bump => {
                if a < 1.0 {
                    (-1.0 / (1.0 - x * x)).exp()
                } else {
                    0.0
                }
            }
            Profile::GaussianTruncated => {
                if a <= 1.0 {
                    (-4.5 * x * x).exp()
                } else {
                    0.0
                }
            }
        }
    }

    /// `∫ raw(x) cos(ξ x) dx` over the support, by panelled quadrature so
    /// that oscillation within a panel stays bounded.
    fn raw_cosine_transform(self, xi: f64) -> f64 {
        if self == Profile::Box {
            return if xi == 0.0 { 1.0 } else { 2.0 * (xi / 2.0).sin() / xi };
        }
        let panels = (xi.abs() / std::f64::consts::PI).ceil().max(1.0) as usize;
        let h = 1.0 / panels as f64;
        let mut total = 0.0;
        for p in 0..panels {
            let (a, b) = (p as f64 * h, (p + 1) as f64 * h);
            let out = quadrature::double_exponential::integrate(|x| self.raw(x) * (xi * x).cos(), a, b, 1e-14);
            total += out.integral;
        }
        2.0 * total
    }
}

impl MollifierSpec {
    pub fn new(profile: Profile, epsilon: f64) -> Self {
        MollifierSpec { profile, epsilon, parabolic: false }
    }

    pub fn validate(&self) -> Result<(), NumericsError> {
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(NumericsError::InvalidMollifier(format!("width {} must be positive", self.epsilon)));
        }
        Ok(())
    }

    /// The normalised one-dimensional profile `ρ(x)`, integrating to one.
    pub fn profile_value(&self, x: f64) -> f64 {
        self.profile.raw(x) / self.profile.raw_cosine_transform(0.0)
    }

    /// `ρ̂(ξ) = ∫ ρ(x) e^{-iξx} dx` for the normalised one-dimensional
    /// profile (real, since profiles are even).
    pub fn fourier_1d(&self, xi: f64) -> f64 {
        self.profile.raw_cosine_transform(xi) / self.profile.raw_cosine_transform(0.0)
    }

    /// Fourier multiplier `ρ̂(ε k)` of the rescaled mollifier
    /// `ρ_ε(x) = ε^{-d} ρ(x/ε)` at every mode of the grid.
    pub fn multiplier(&self, grid: &TorusGrid) -> Vec<f64> {
        let n = grid.points;
        let axis: Vec<f64> = (0..n)
            .map(|i| {
                let k = 2.0 * std::f64::consts::PI * grid.mode(i) as f64 / grid.length;
                self.fourier_1d(self.epsilon * k)
            })
            .collect();
        match grid.dimension {
            1 => axis,
            _ => (0..n * n).map(|idx| axis[idx / n] * axis[idx % n]).collect(),
        }
    }

    /// Number of time steps the noise is averaged over when smoothing in
    /// time.
    pub fn time_window(&self, dt: f64) -> usize {
        if self.parabolic {
            ((self.epsilon * self.epsilon / dt).round() as usize).max(1)
        } else {
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profiles_integrate_to_one() {
        for p in [Profile::Box, Profile::Bump, Profile::GaussianTruncated] {
            let m = MollifierSpec::new(p, 0.1);
            let total = quadrature::double_exponential::integrate(|x| m.profile_value(x), -1.0, 1.0, 1e-12).integral;
            let total = if p == Profile::Box {
                quadrature::double_exponential::integrate(|x| m.profile_value(x), -0.5, 0.5, 1e-12).integral
            } else {
                total
            };
            assert!((total - 1.0).abs() < 1e-9, "{p:?}: {total}");
            assert!((m.fourier_1d(0.0) - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn bump_transform_matches_direct_sum() {
        let m = MollifierSpec::new(Profile::Bump, 1.0);
        let xi = 7.3;
        // midpoint rule with many points as an independent check
        let n = 200_000;
        let h = 2.0 / n as f64;
        let direct: f64 = (0..n).map(|i| {
            let x = -1.0 + (i as f64 + 0.5) * h;
            m.profile_value(x) * (xi * x).cos() * h
        }).sum();
        assert!((m.fourier_1d(xi) - direct).abs() < 1e-8);
    }
}
