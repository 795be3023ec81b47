use super::grid::TorusGrid;
use super::mollifier::MollifierSpec;
use super::she::SheOptions;
use super::NumericsError;

/// Stationary mean square `E|a_k|²` of every mode, zero for a pinned mode.
pub fn mode_variances(grid: &TorusGrid, moll: &MollifierSpec, opts: &SheOptions) -> Result<Vec<f64>, NumericsError> {
    grid.validate()?;
    moll.validate()?;
    let amp2 = opts.noise_amplitude.powi(2);
    Ok(moll
        .multiplier(grid)
        .iter()
        .enumerate()
        .map(|(idx, r)| opts.rate(grid, idx).map_or(0.0, |l| amp2 * r * r / (2.0 * l)))
        .collect())
}

fn covariance_from(grid: &TorusGrid, var: &[f64], h: [f64; 2]) -> f64 {
    let total: f64 = var
        .iter()
        .enumerate()
        .map(|(idx, v)| {
            let k = grid.wavevector(idx);
            v * (k[0] * h[0] + k[1] * h[1]).cos()
        })
        .sum();
    total / grid.length.powi(grid.dimension as i32)
}

/// `C_ε = E X_ε(x)²` for the stationary mollified solution, summed exactly
/// over the modes of the grid: `L^{-d} Σ_k |ρ̂(εk)|² / (2 λ_k)`.
pub fn wick_constant(grid: &TorusGrid, moll: &MollifierSpec, opts: &SheOptions) -> Result<f64, NumericsError> {
    covariance(grid, moll, opts, [0.0, 0.0])
}

/// Stationary covariance `E X_ε(x) X_ε(x + h)`.
pub fn covariance(grid: &TorusGrid, moll: &MollifierSpec, opts: &SheOptions, h: [f64; 2]) -> Result<f64, NumericsError> {
    Ok(covariance_from(grid, &mode_variances(grid, moll, opts)?, h))
}

/// Covariance at every grid offset, indexed like the grid.
pub fn covariance_table(grid: &TorusGrid, moll: &MollifierSpec, opts: &SheOptions) -> Result<Vec<f64>, NumericsError> {
    let var = mode_variances(grid, moll, opts)?;
    Ok((0..grid.size()).map(|i| covariance_from(grid, &var, grid.position(i))).collect())
}

/// `H_p(x, C)`, the Hermite polynomial with variance parameter `C`:
/// `x`, `x² - C`, `x³ - 3Cx`.
pub fn wick_power(x: f64, c: f64, p: u32) -> Result<f64, NumericsError> {
    match p {
        1 => Ok(x),
        2 => Ok(x * x - c),
        3 => Ok(x * x * x - 3.0 * c * x),
        other => Err(NumericsError::WickOrder(other)),
    }
}
