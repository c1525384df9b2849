//! Gibbs-ensemble layer over the wave-number modes `kappa = (pi mu / l)(2k+1)`
//! with inverse temperature `beta_thermo = pi beta / (2 E_mu)`.
//!
//! Entropy is reported in units of `k_B` with the additive constant fixed so
//! that it vanishes in the frozen limit `beta -> infinity`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::density::{averaged_density, period};
use crate::error::{Error, Result};
use crate::numerics::{integrate, FieldSample, OddWindow, Truncation};
use crate::phase_space::density_floor;
use crate::series::PairKernel;
use crate::theta::theta1;
use crate::wavefunction::{norm_constant, DerivedScales, QuantumState, SystemParams};

/// Inverse temperature of the mode ensemble.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GibbsParams {
    pub beta_thermo: f64,
    pub tau_temp: f64,
    pub e_mu: f64,
}

impl GibbsParams {
    pub fn new(beta_thermo: f64, e_mu: f64) -> Result<Self> {
        if !(beta_thermo > 0.0 && beta_thermo.is_finite() && e_mu > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "need beta_thermo > 0 and E_mu > 0, got {beta_thermo}, {e_mu}"
            )));
        }
        Ok(Self { beta_thermo, tau_temp: 1.0 / beta_thermo, e_mu })
    }

    pub fn of(state: &QuantumState, sys: &SystemParams) -> Self {
        let e_mu = DerivedScales::of(state, sys).e_mu;
        let beta_thermo = PI * state.beta() / (2.0 * e_mu);
        Self { beta_thermo, tau_temp: 1.0 / beta_thermo, e_mu }
    }

    /// The dimensionless solution parameter `beta = 2 beta_thermo E_mu / pi`.
    pub fn beta(&self) -> f64 {
        2.0 * self.beta_thermo * self.e_mu / PI
    }

    fn window(&self, trunc: &Truncation) -> Result<OddWindow> {
        OddWindow::new(self.beta(), trunc)
    }
}

/// Mode `kappa = (pi mu / l)(2k + 1)` with kinetic energy `E_mu (2k+1)^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveNumberMode {
    pub k: i64,
    pub kappa: f64,
    pub e_kappa: f64,
}

impl WaveNumberMode {
    pub fn new(k: i64, state: &QuantumState, sys: &SystemParams) -> Self {
        let j = (2 * k + 1) as f64;
        let kappa = PI * state.mu() as f64 / sys.l * j;
        Self { k, kappa, e_kappa: sys.hbar * sys.hbar * kappa * kappa / (2.0 * sys.m) }
    }
}

/// `Z = sum_kappa exp(-beta_thermo E_kappa)`.
pub fn partition(gp: &GibbsParams, trunc: &Truncation) -> Result<f64> {
    let window = gp.window(trunc)?;
    Ok(window
        .odd
        .iter()
        .map(|&j| (-gp.beta_thermo * gp.e_mu * (j * j) as f64).exp())
        .sum())
}

/// `ln Z`, stable in the frozen limit.
pub fn ln_partition(gp: &GibbsParams, trunc: &Truncation) -> Result<f64> {
    let window = gp.window(trunc)?;
    let shifted: f64 = window.weight.iter().map(|w| w * w).sum();
    Ok(-gp.beta_thermo * gp.e_mu + shifted.ln())
}

/// `Z` as the theta value `theta1(-1/2, i (4 E_mu / pi) beta_thermo)`.
pub fn partition_theta(gp: &GibbsParams, trunc: &Truncation) -> Result<f64> {
    let tau = Complex64::new(0.0, 4.0 * gp.e_mu / PI * gp.beta_thermo);
    let value = theta1(Complex64::new(-0.5, 0.0), tau, trunc)?;
    Ok(value.re)
}

/// Normalized Gibbs weights over the truncated mode window.
pub fn gibbs_weights(
    gp: &GibbsParams,
    state: &QuantumState,
    sys: &SystemParams,
    trunc: &Truncation,
) -> Result<Vec<(WaveNumberMode, f64)>> {
    let window = gp.window(trunc)?;
    let total: f64 = window.weight.iter().map(|w| w * w).sum();
    Ok(window
        .iter()
        .map(|(j, w)| (WaveNumberMode::new((j - 1) / 2, state, sys), w * w / total))
        .collect())
}

/// `<E>_Gibbs = sum w_kappa E_kappa = -d ln Z / d beta_thermo`.
pub fn mean_energy_gibbs(gp: &GibbsParams, trunc: &Truncation) -> Result<f64> {
    let window = gp.window(trunc)?;
    let (mut num, mut den) = (0.0, 0.0);
    for (j, w) in window.iter() {
        let w2 = w * w;
        num += (j * j) as f64 * w2;
        den += w2;
    }
    Ok(gp.e_mu * num / den)
}

/// `S / k_B = beta_thermo <E> + ln Z - ln 2`.
///
/// Evaluated relative to the ground pair `j = +-1`, as
/// `beta_thermo (<E> - E_mu) + ln(1 + r/2)` with `r` the excited weight, so
/// that the frozen limit keeps full relative precision.
pub fn entropy(gp: &GibbsParams, trunc: &Truncation) -> Result<f64> {
    let window = gp.window(trunc)?;
    let (mut excited, mut excess) = (0.0, 0.0);
    for (j, w) in window.iter() {
        if j.abs() > 1 {
            let w2 = w * w;
            excited += w2;
            excess += ((j * j - 1) as f64) * w2;
        }
    }
    let shift = gp.beta_thermo * gp.e_mu;
    Ok(shift * excess / (2.0 + excited) + (excited / 2.0).ln_1p())
}

/// Entropy written directly in the solution parameter and `N(beta)`:
/// `-ln{(2l/N) exp[-(pi l / 2)(beta / N) sum (2k+1)^2 exp(-(pi beta/2)(2k+1)^2)]}`.
/// Independent of `mu`.
pub fn entropy_from_norm(beta: f64, sys: &SystemParams, trunc: &Truncation) -> Result<f64> {
    let state = QuantumState::new(1, beta)?;
    let n = norm_constant(&state, sys, trunc)?;
    let window = OddWindow::new(beta, trunc)?;
    let second: f64 = window
        .odd
        .iter()
        .map(|&j| {
            let j2 = (j * j) as f64;
            j2 * (-(PI * beta / 2.0) * j2).exp()
        })
        .sum();
    let inner = (2.0 * sys.l / n) * (-(PI * sys.l / 2.0) * (beta / n) * second).exp();
    Ok(-inner.ln())
}

/// Quantum potential `Q = -(hbar^2/2m) (sqrt f)'' / sqrt f`, from analytic
/// x-derivatives of the density series.
pub fn quantum_potential(x: f64, t: f64, state: &QuantumState, sys: &SystemParams, trunc: &Truncation) -> Result<FieldSample> {
    sys.check_inside(x)?;
    let kernel = PairKernel::new(state, sys, trunc)?;
    let mut f = [0.0; 3];
    for atom in kernel.atoms(x, t, 2) {
        for (acc, c) in f.iter_mut().zip(atom.c.iter()) {
            *acc += c;
        }
    }
    if f[0] < density_floor(sys) {
        return Ok(FieldSample::Pole);
    }
    let q = -sys.hbar * sys.hbar / (2.0 * sys.m) * (f[2] / (2.0 * f[0]) - f[1] * f[1] / (4.0 * f[0] * f[0]));
    Ok(FieldSample::finite_or_undefined(q))
}

/// `f <E>` at `(x, t)`: the local kinetic-energy numerator, finite everywhere.
pub fn energy_numerator(x: f64, t: f64, state: &QuantumState, sys: &SystemParams, trunc: &Truncation) -> Result<f64> {
    sys.check_inside(x)?;
    let kernel = PairKernel::new(state, sys, trunc)?;
    Ok(kernel.scales.e_mu * kernel.cosine_sum(x, t, |s| (s * s) as f64))
}

/// Period-averaged energy profile `<E>_Gibbs / (l fbar(x))`.
pub fn avg_energy_profile(x: f64, state: &QuantumState, sys: &SystemParams, trunc: &Truncation) -> Result<FieldSample> {
    let fbar = averaged_density(x, state, sys, trunc)?;
    if fbar < density_floor(sys) {
        return Ok(FieldSample::Pole);
    }
    let mean = mean_energy_gibbs(&GibbsParams::of(state, sys), trunc)?;
    Ok(FieldSample::finite_or_undefined(mean / (sys.l * fbar)))
}

/// The same profile from its definition,
/// `(1 / (T_mu fbar)) integral_0^T f <E> dt`, by quadrature.
pub fn avg_energy_profile_quadrature(
    x: f64,
    state: &QuantumState,
    sys: &SystemParams,
    n_panels: usize,
    trunc: &Truncation,
) -> Result<FieldSample> {
    let fbar = averaged_density(x, state, sys, trunc)?;
    if fbar < density_floor(sys) {
        return Ok(FieldSample::Pole);
    }
    let t_mu = period(state, sys);
    let kernel = PairKernel::new(state, sys, trunc)?;
    let e_mu = kernel.scales.e_mu;
    let integral = integrate(|t| e_mu * kernel.cosine_sum(x, t, |s| (s * s) as f64), 0.0, t_mu, n_panels)?;
    Ok(FieldSample::finite_or_undefined(integral / (t_mu * fbar)))
}

/// `<<E>> = (1 / fbar0) integral_0^l fbar <Ebar> dx` by quadrature, where
/// `fbar0 = integral fbar dx`.
pub fn double_avg_energy(state: &QuantumState, sys: &SystemParams, trunc: &Truncation) -> Result<f64> {
    let panels = 64 * state.mu() as usize;
    let mean = mean_energy_gibbs(&GibbsParams::of(state, sys), trunc)?;
    let product = |x: f64| -> Result<f64> {
        let fbar = averaged_density(x, state, sys, trunc)?;
        Ok(match avg_energy_profile(x, state, sys, trunc)? {
            FieldSample::Finite(e) => fbar * e,
            // removable: fbar * <Ebar> is the constant <E>/l
            _ => mean / sys.l,
        })
    };
    let failure = std::cell::Cell::new(None);
    let guard = |x: f64| match product(x) {
        Ok(v) => v,
        Err(e) => {
            failure.set(Some(e));
            f64::NAN
        }
    };
    let weighted = integrate(guard, 0.0, sys.l, panels);
    if let Some(e) = failure.take() {
        return Err(e);
    }
    let mass = integrate(|x| averaged_density(x, state, sys, trunc).unwrap_or(f64::NAN), 0.0, sys.l, panels)?;
    Ok(weighted? / mass)
}
