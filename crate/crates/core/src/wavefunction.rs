//! The exact time-dependent infinite-well state
//! `psi(x, t) = theta1(mu x / l, -mu^2 (2 pi hbar / m l^2) t + i beta) / sqrt(N(beta))`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{OddWindow, Truncation};
use crate::theta::theta1;

/// Mass, well width and reduced Planck constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    pub m: f64,
    pub l: f64,
    pub hbar: f64,
}

impl SystemParams {
    pub fn new(m: f64, l: f64, hbar: f64) -> Result<Self> {
        for (name, v) in [("m", m), ("l", l), ("hbar", hbar)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(Self { m, l, hbar })
    }

    /// `m = l = hbar = 1`.
    pub fn natural() -> Self {
        Self { m: 1.0, l: 1.0, hbar: 1.0 }
    }

    /// Accepts `[0, l]` widened by a few ulps of `l`, so grid points such as
    /// `l * i / n` with `i = n` are not rejected for rounding.
    pub(crate) fn check_inside(&self, x: f64) -> Result<()> {
        let slack = 8.0 * f64::EPSILON * self.l;
        if (-slack..=self.l + slack).contains(&x) {
            Ok(())
        } else {
            Err(Error::OutOfWell { x, l: self.l })
        }
    }
}

impl Default for SystemParams {
    fn default() -> Self {
        Self::natural()
    }
}

/// State number `mu >= 1` and the solution parameter `beta > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantumState {
    mu: u32,
    beta: f64,
}

impl QuantumState {
    pub fn new(mu: u32, beta: f64) -> Result<Self> {
        if mu < 1 {
            return Err(Error::InvalidParameter("state number mu must be >= 1".into()));
        }
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::InvalidParameter(format!("beta must be positive, got {beta}")));
        }
        Ok(Self { mu, beta })
    }

    pub fn mu(&self) -> u32 {
        self.mu
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}

/// Energy, time and momentum scales of state `mu`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedScales {
    /// `hbar^2 mu^2 / (2 m l^2)`
    pub eps_mu: f64,
    /// Stationary eigenvalue `pi^2 eps_mu`.
    pub e_mu: f64,
    /// Density period `pi hbar / (4 E_mu)`.
    pub t_mu: f64,
    /// `sqrt(2 m E_mu) = pi hbar mu / l`.
    pub p_unit: f64,
}

impl DerivedScales {
    pub fn new(mu: u32, sys: &SystemParams) -> Self {
        let mu = mu as f64;
        let eps_mu = sys.hbar * sys.hbar * mu * mu / (2.0 * sys.m * sys.l * sys.l);
        let e_mu = PI * PI * eps_mu;
        Self {
            eps_mu,
            e_mu,
            t_mu: PI * sys.hbar / (4.0 * e_mu),
            p_unit: PI * sys.hbar * mu / sys.l,
        }
    }

    pub fn of(state: &QuantumState, sys: &SystemParams) -> Self {
        Self::new(state.mu, sys)
    }

    /// Velocity of a unit comb atom, `p_unit / m = l / (2 mu T_mu)`.
    pub fn v_unit(&self, sys: &SystemParams) -> f64 {
        self.p_unit / sys.m
    }
}

/// `N(beta) = l sum_k exp(-(pi beta / 2)(2k + 1)^2)`.
pub fn norm_constant(state: &QuantumState, sys: &SystemParams, trunc: &Truncation) -> Result<f64> {
    let window = OddWindow::new(state.beta, trunc)?;
    Ok(sys.l * (-PI * state.beta / 2.0).exp() * window.scaled_norm())
}

/// Theta-function argument pair `(z, tau)` at `(x, t)`.
pub(crate) fn theta_arguments(x: f64, t: f64, state: &QuantumState, sys: &SystemParams) -> (Complex64, Complex64) {
    let mu = state.mu as f64;
    let z = Complex64::new(mu * x / sys.l, 0.0);
    let tau = Complex64::new(-mu * mu * 2.0 * PI * sys.hbar / (sys.m * sys.l * sys.l) * t, state.beta);
    (z, tau)
}

/// Complex amplitude at `(x, t)`, `0 <= x <= l`.
pub fn psi(x: f64, t: f64, state: &QuantumState, sys: &SystemParams, trunc: &Truncation) -> Result<Complex64> {
    sys.check_inside(x)?;
    let norm = norm_constant(state, sys, trunc)?;
    let (z, tau) = theta_arguments(x, t, state, sys);
    Ok(theta1(z, tau, trunc)? / norm.sqrt())
}

/// Stationary eigenstate `sqrt(2/l) sin(pi mu x / l) exp(-i E_mu t / hbar)`.
pub fn stationary_psi(x: f64, t: f64, mu: u32, sys: &SystemParams) -> Result<Complex64> {
    sys.check_inside(x)?;
    let scales = DerivedScales::new(mu, sys);
    let amplitude = (2.0 / sys.l).sqrt() * (PI * mu as f64 * x / sys.l).sin();
    Ok(Complex64::from_polar(amplitude, -scales.e_mu * t / sys.hbar))
}

/// `|i hbar d_t w + (hbar^2 / 2m) d_xx w|` for any amplitude `w(x, t)` by
/// central differences.
pub fn schrodinger_residual_of<F>(wave: F, x: f64, t: f64, sys: &SystemParams, h_x: f64, h_t: f64) -> Result<f64>
where
    F: Fn(f64, f64) -> Result<Complex64>,
{
    if !(h_x > 0.0 && h_t > 0.0) {
        return Err(Error::InvalidParameter("finite-difference steps must be positive".into()));
    }
    if x - h_x <= 0.0 || x + h_x >= sys.l {
        return Err(Error::InvalidParameter(format!("stencil around x = {x} leaves the open well")));
    }
    let center = wave(x, t)?;
    let d_t = (wave(x, t + h_t)? - wave(x, t - h_t)?) / (2.0 * h_t);
    let d_xx = (wave(x + h_x, t)? - 2.0 * center + wave(x - h_x, t)?) / (h_x * h_x);
    let residual = Complex64::i() * sys.hbar * d_t + sys.hbar * sys.hbar / (2.0 * sys.m) * d_xx;
    Ok(residual.norm())
}

/// Finite-difference residual of the free Schrödinger equation for [`psi`].
pub fn schrodinger_residual(
    x: f64,
    t: f64,
    state: &QuantumState,
    sys: &SystemParams,
    h_x: f64,
    h_t: f64,
    trunc: &Truncation,
) -> Result<f64> {
    schrodinger_residual_of(|x, t| psi(x, t, state, sys, trunc), x, t, sys, h_x, h_t)
}
