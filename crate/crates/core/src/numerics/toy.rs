//! A one-dimensional toy renormalisation problem.
//!
//! The distribution `φ ↦ ĉ₁ ∫ φ(x)/|x| dx` does not exist, because of the
//! singularity at the origin. Regularising the kernel as
//! `k_ε(x) = 1/|x|` for `|x| ≥ ε` and `ε⁻¹ η(x/ε)` otherwise and
//! subtracting a multiple of the delta mass gives
//! `M_ε(φ) = ĉ₁ ∫ k_ε φ - c₂ φ(0)` with
//! `c₂ = ĉ₁ (∫η - 2 log ε) + ĉ₂`, which has a limit independent of `η`.

use quadrature::double_exponential::integrate;
use serde::{Deserialize, Serialize};

use super::NumericsError;

/// Inner profile `η` on `[-1, 1]`. Every variant satisfies `η(±1) = 1`, so
/// the regularised kernel is continuous.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EtaProfile {
    /// `1`.
    Flat,
    /// `u²`.
    Quadratic,
    /// `2 - |u|`.
    Tent,
    /// `1 + u - u³`, not even.
    Skew,
}

impl EtaProfile {
    pub const ALL: [EtaProfile; 4] = [EtaProfile::Flat, EtaProfile::Quadratic, EtaProfile::Tent, EtaProfile::Skew];

    pub fn value(self, u: f64) -> f64 {
        match self {
            EtaProfile::Flat => 1.0,
            EtaProfile::Quadratic => u * u,
            EtaProfile::Tent => 2.0 - u.abs(),
            EtaProfile::Skew => 1.0 + u - u * u * u,
        }
    }

    /// `∫_{-1}^{1} η`.
    pub fn integral(self) -> f64 {
        match self {
            EtaProfile::Flat => 2.0,
            EtaProfile::Quadratic => 2.0 / 3.0,
            EtaProfile::Tent => 3.0,
            EtaProfile::Skew => 2.0,
        }
    }
}

const LOG_PANEL: f64 = 0.25;

/// Quadrature controls. The test function is integrated up to
/// `|x| = tail_cutoff` and assumed negligible beyond.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ToyQuadrature {
    pub tail_cutoff: f64,
    pub tolerance: f64,
    /// A panel fails when its error estimate exceeds this, relative to
    /// `max(1, |integral|)`.
    pub acceptance: f64,
}

impl Default for ToyQuadrature {
    fn default() -> Self {
        ToyQuadrature { tail_cutoff: 50.0, tolerance: 1e-14, acceptance: 1e-9 }
    }
}

impl ToyQuadrature {
    /// Integral over `[a, b]` in panels of length at most `panel`, so that
    /// localised features of the integrand are resolved.
    fn integral(&self, f: impl Fn(f64) -> f64, a: f64, b: f64, panel: f64) -> Result<f64, NumericsError> {
        let count = ((b - a) / panel).ceil().max(1.0) as usize;
        let h = (b - a) / count as f64;
        (0..count)
            .map(|i| self.panel(&f, a + i as f64 * h, if i + 1 == count { b } else { a + (i + 1) as f64 * h }))
            .sum()
    }

    fn panel(&self, f: &impl Fn(f64) -> f64, a: f64, b: f64) -> Result<f64, NumericsError> {
        let out = integrate(f, a, b, self.tolerance);
        let scale = out.integral.abs().max(1.0);
        if !out.integral.is_finite() || out.error_estimate > self.acceptance * scale {
            return Err(NumericsError::Quadrature(format!(
                "integral over [{a}, {b}] did not converge (estimate {:e})",
                out.error_estimate
            )));
        }
        Ok(out.integral)
    }

    /// `∫_{1 ≤ |x| ≤ R} φ(x)/|x| dx`, with `x = ±e^s`.
    fn tail(&self, phi: &dyn Fn(f64) -> f64) -> Result<f64, NumericsError> {
        if self.tail_cutoff <= 1.0 {
            return Ok(0.0);
        }
        self.integral(|s| phi(s.exp()) + phi(-s.exp()), 0.0, self.tail_cutoff.ln(), LOG_PANEL)
    }
}

/// The bare coupling `c₂ = ĉ₁ (∫η - 2 log ε) + ĉ₂`.
pub fn bare_coupling(eta: EtaProfile, eps: f64, hat_c: [f64; 2]) -> f64 {
    hat_c[0] * (eta.integral() - 2.0 * eps.ln()) + hat_c[1]
}

/// `M_ε(φ)` with the bare coupling chosen from `ĉ`.
pub fn toy_distribution(
    eta: EtaProfile,
    eps: f64,
    hat_c: [f64; 2],
    phi: &dyn Fn(f64) -> f64,
    quad: &ToyQuadrature,
) -> Result<f64, NumericsError> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(NumericsError::InvalidConfig(format!("regularisation width {eps} is not in (0, 1)")));
    }
    // |x| < ε, with x = εu
    // panels of length one split at the kink of the tent profile
    let inner = quad.integral(|u| eta.value(u) * phi(eps * u), -1.0, 1.0, 1.0)?;
    // ε ≤ |x| < 1, with x = ±e^s
    let middle = quad.integral(|s| phi(s.exp()) + phi(-s.exp()), eps.ln(), 0.0, LOG_PANEL)?;
    let tail = quad.tail(phi)?;
    Ok(hat_c[0] * (inner + middle + tail) - bare_coupling(eta, eps, hat_c) * phi(0.0))
}

/// The limit `M̂(φ) = ĉ₁ ∫ (φ(x) - 1_{|x|<1} φ(0)) / |x| dx - ĉ₂ φ(0)`.
pub fn toy_limit(hat_c: [f64; 2], phi: &dyn Fn(f64) -> f64, quad: &ToyQuadrature) -> Result<f64, NumericsError> {
    let p0 = phi(0.0);
    let near = quad.integral(|x| if x > 0.0 { (phi(x) + phi(-x) - 2.0 * p0) / x } else { 0.0 }, 0.0, 1.0, LOG_PANEL)?;
    let tail = quad.tail(phi)?;
    Ok(hat_c[0] * (near + tail) - hat_c[1] * p0)
}
