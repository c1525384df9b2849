//! Probability density of the time-dependent state, its characteristics,
//! period and period average.

use std::f64::consts::PI;

use crate::error::Result;
use crate::numerics::{OddWindow, Truncation};
use crate::series::PairKernel;
use crate::wavefunction::{DerivedScales, QuantumState, SystemParams};

/// Straight line along which the `(n, k)` term of the density is constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Characteristic {
    pub n: i64,
    pub k: i64,
    /// Slope of `x / l` against `t / T_mu`: `(n + k + 1) / (2 mu)`.
    pub angle_tan: f64,
}

impl Characteristic {
    pub fn new(n: i64, k: i64, mu: u32) -> Self {
        Self { n, k, angle_tan: (n + k + 1) as f64 / (2.0 * mu as f64) }
    }

    /// Transport speed in physical units, `l * angle_tan / T_mu`.
    pub fn speed(&self, state: &QuantumState, sys: &SystemParams) -> f64 {
        sys.l * self.angle_tan / DerivedScales::of(state, sys).t_mu
    }
}

/// `G(x, t) = pi (2 mu x / l + 1) - (pi t / T_mu)(n + k + 1)`.
pub fn g_phase(n: i64, k: i64, x: f64, t: f64, state: &QuantumState, sys: &SystemParams) -> f64 {
    let t_mu = DerivedScales::of(state, sys).t_mu;
    PI * (2.0 * state.mu() as f64 * x / sys.l + 1.0) - PI * t / t_mu * (n + k + 1) as f64
}

/// Density as the double Chebyshev series
/// `(1/N) sum w_n w_k T_|k-n|(cos G_nk)`, with `T_d(cos G) = cos(d G)`.
///
/// Truncation residue can make the result slightly negative near nodes; it is
/// returned unclamped.
pub fn density(x: f64, t: f64, state: &QuantumState, sys: &SystemParams, trunc: &Truncation) -> Result<f64> {
    sys.check_inside(x)?;
    let kernel = PairKernel::new(state, sys, trunc)?;
    Ok(kernel.cosine_sum(x, t, |_| 1.0))
}

/// `(2/l) sin^2(pi mu x / l)`.
pub fn stationary_density(x: f64, state: &QuantumState, sys: &SystemParams) -> Result<f64> {
    sys.check_inside(x)?;
    Ok(2.0 / sys.l * (PI * state.mu() as f64 * x / sys.l).sin().powi(2))
}

/// Period average `(2/N) sum_k exp(-(pi beta/2)(2k+1)^2) sin^2((2k+1) pi mu x / l)`.
pub fn averaged_density(x: f64, state: &QuantumState, sys: &SystemParams, trunc: &Truncation) -> Result<f64> {
    sys.check_inside(x)?;
    let window = OddWindow::new(state.beta(), trunc)?;
    let base = PI * state.mu() as f64 * x / sys.l;
    let sum: f64 = window.iter().map(|(j, w)| w * w * (j as f64 * base).sin().powi(2)).sum();
    Ok(2.0 * sum / (sys.l * window.scaled_norm()))
}

/// `T_mu = pi hbar / (4 E_mu)`.
pub fn period(state: &QuantumState, sys: &SystemParams) -> f64 {
    DerivedScales::of(state, sys).t_mu
}
