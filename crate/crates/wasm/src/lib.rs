//! Browser bindings. Every export works in natural units (`m = l = hbar = 1`)
//! and returns flat `f64` buffers that the page draws on a canvas.

use thetawell::density::{averaged_density, density, period, stationary_density};
use thetawell::field::linspace;
use thetawell::thermo::{entropy, mean_energy_gibbs, GibbsParams};
use thetawell::{QuantumState, SystemParams, Truncation};
use wasm_bindgen::prelude::*;

fn state(mu: u32, beta: f64) -> thetawell::Result<QuantumState> {
    QuantumState::new(mu, beta)
}

/// Row-major `nt x nx` density over one period, rows indexed by time.
pub fn density_map_values(mu: u32, beta: f64, nx: usize, nt: usize) -> thetawell::Result<Vec<f64>> {
    let sys = SystemParams::natural();
    let st = state(mu, beta)?;
    let trunc = Truncation::default();
    let xs = linspace(0.0, sys.l, nx);
    let ts = linspace(0.0, period(&st, &sys), nt);
    let mut out = Vec::with_capacity(nx * nt);
    for &t in &ts {
        for &x in &xs {
            out.push(density(x, t, &st, &sys, &trunc)?.max(0.0));
        }
    }
    Ok(out)
}

/// Density at one instant, the period average and the stationary limit,
/// concatenated as three blocks of `nx` samples.
pub fn profile_values(mu: u32, beta: f64, t_frac: f64, nx: usize) -> thetawell::Result<Vec<f64>> {
    let sys = SystemParams::natural();
    let st = state(mu, beta)?;
    let trunc = Truncation::default();
    let t = t_frac * period(&st, &sys);
    let xs = linspace(0.0, sys.l, nx);
    let mut out = Vec::with_capacity(3 * nx);
    for &x in &xs {
        out.push(density(x, t, &st, &sys, &trunc)?.max(0.0));
    }
    for &x in &xs {
        out.push(averaged_density(x, &st, &sys, &trunc)?);
    }
    for &x in &xs {
        out.push(stationary_density(x, &st, &sys)?);
    }
    Ok(out)
}

/// Mean energy in units of `E_mu` and entropy, sampled on a logarithmic grid
/// of the solution parameter. Returns `[beta.., energy.., entropy..]`.
pub fn thermo_values(beta_min: f64, beta_max: f64, n: usize) -> thetawell::Result<Vec<f64>> {
    let sys = SystemParams::natural();
    let trunc = Truncation::default();
    let logs = linspace(beta_min.ln(), beta_max.ln(), n);
    let betas: Vec<f64> = logs.iter().map(|b| b.exp()).collect();
    let mut energy = Vec::with_capacity(n);
    let mut ent = Vec::with_capacity(n);
    for &beta in &betas {
        let gp = GibbsParams::of(&state(1, beta)?, &sys);
        energy.push(mean_energy_gibbs(&gp, &trunc)? / gp.e_mu);
        ent.push(entropy(&gp, &trunc)?);
    }
    Ok([betas, energy, ent].concat())
}

fn js(err: thetawell::Error) -> JsError {
    JsError::new(&err.to_string())
}

#[wasm_bindgen]
pub fn density_map(mu: u32, beta: f64, nx: usize, nt: usize) -> Result<Vec<f64>, JsError> {
    density_map_values(mu, beta, nx, nt).map_err(js)
}

#[wasm_bindgen]
pub fn profiles(mu: u32, beta: f64, t_frac: f64, nx: usize) -> Result<Vec<f64>, JsError> {
    profile_values(mu, beta, t_frac, nx).map_err(js)
}

#[wasm_bindgen]
pub fn thermo_curves(beta_min: f64, beta_max: f64, n: usize) -> Result<Vec<f64>, JsError> {
    thermo_values(beta_min, beta_max, n).map_err(js)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_rows_integrate_to_one() {
        let (nx, nt) = (201, 4);
        let map = density_map_values(3, 0.05, nx, nt).unwrap();
        assert_eq!(map.len(), nx * nt);
        let h = 1.0 / (nx - 1) as f64;
        for row in map.chunks(nx) {
            let trap: f64 = row.iter().sum::<f64>() - 0.5 * (row[0] + row[nx - 1]);
            assert!((trap * h - 1.0).abs() < 1e-6);
        }
        // one full period apart
        assert_eq!(map[..nx], map[(nt - 1) * nx..]);
    }

    #[test]
    fn profiles_agree_in_the_frozen_limit() {
        let nx = 11;
        let p = profile_values(2, 20.0, 0.3, nx).unwrap();
        for i in 0..nx {
            assert!((p[i] - p[2 * nx + i]).abs() < 1e-9);
            assert!((p[nx + i] - p[2 * nx + i]).abs() < 1e-9);
        }
    }

    #[test]
    fn thermo_curves_are_monotone() {
        let n = 30;
        let c = thermo_values(0.02, 2.0, n).unwrap();
        let (betas, energy, ent) = (&c[..n], &c[n..2 * n], &c[2 * n..]);
        assert!((betas[0] - 0.02).abs() < 1e-15 && (betas[n - 1] - 2.0).abs() < 1e-12);
        assert!(energy.windows(2).all(|w| w[1] < w[0]));
        assert!(ent.windows(2).all(|w| w[1] < w[0]));
        assert!(energy[n - 1] > 1.0);
    }

    #[test]
    fn bad_input_is_an_error() {
        assert!(density_map_values(0, 0.1, 4, 4).is_err());
        assert!(profile_values(1, -1.0, 0.0, 4).is_err());
    }
}
