//! Phase-space picture: the Wigner function as a Dirac comb in momentum,
//! its moments, the mean velocity of probability flow and the transport
//! (continuity, momentum, energy) balances.
//!
//! Atom `s = n + k + 1` sits at momentum `P_s = s sqrt(2 m E_mu)` and carries
//! the coefficient `C_s(x, t) = (1/N) sum_{n+k+1=s} w_n w_k cos((k-n) G_s)`.
//! Each `C_s` is a function of `x - (P_s/m) t` only, so the comb is
//! transported freely.

use crate::error::{Error, Result};
use crate::numerics::{Compensated, FieldSample, Truncation};
use crate::series::{AtomJet, PairKernel};
use crate::wavefunction::{QuantumState, SystemParams};

/// Density below `DENSITY_FLOOR / l` makes ratios by the density undefined.
pub const DENSITY_FLOOR: f64 = 1e-12;

pub(crate) fn density_floor(sys: &SystemParams) -> f64 {
    DENSITY_FLOOR / sys.l
}

/// One atom of the comb.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CombAtom {
    pub s: i64,
    pub momentum: f64,
    /// `C_s / N`, the probability per unit length carried by this atom.
    pub weight: f64,
}

/// The Wigner function at fixed `(x, t)` as a finite list of momentum atoms:
/// `W(x, p, t) = (1/hbar) sum_s weight_s delta(p - P_s)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WignerComb {
    pub x: f64,
    pub t: f64,
    pub hbar: f64,
    pub mass: f64,
    pub atoms: Vec<CombAtom>,
}

impl WignerComb {
    /// `hbar * integral W dp`, the position density.
    pub fn marginal(&self) -> f64 {
        self.paired_sum(|a| a.weight)
    }

    /// Coefficient of `delta(p - P_s)` in `W` itself.
    pub fn wigner_coefficient(&self, atom: &CombAtom) -> f64 {
        atom.weight / self.hbar
    }

    /// `sum_s weight_s v_s^order`, with `v_s = P_s / m`.
    pub fn velocity_moment(&self, order: i32) -> f64 {
        self.paired_sum(|a| a.weight * (a.momentum / self.mass).powi(order))
    }

    /// `sum_s weight_s (v_s - center)^order`.
    pub fn central_moment(&self, center: f64, order: i32) -> f64 {
        self.paired_sum(|a| a.weight * (a.momentum / self.mass - center).powi(order))
    }

    // Atoms are stored for a range of s symmetric about zero; adding the
    // s and -s terms first keeps odd moments exactly zero when the comb is
    // symmetric.
    fn paired_sum(&self, term: impl Fn(&CombAtom) -> f64) -> f64 {
        let n = self.atoms.len();
        let mut acc = Compensated::default();
        for i in 0..n / 2 {
            acc.add(term(&self.atoms[i]) + term(&self.atoms[n - 1 - i]));
        }
        if n % 2 == 1 {
            acc.add(term(&self.atoms[n / 2]));
        }
        acc.value()
    }

    pub fn has_negative_weight(&self) -> bool {
        self.atoms.iter().any(|a| a.weight < 0.0)
    }
}

pub fn wigner_comb(x: f64, t: f64, state: &QuantumState, sys: &SystemParams, trunc: &Truncation) -> Result<WignerComb> {
    sys.check_inside(x)?;
    let kernel = PairKernel::new(state, sys, trunc)?;
    Ok(comb_from_atoms(&kernel, sys, x, t, &kernel.atoms(x, t, 0)))
}

fn comb_from_atoms(kernel: &PairKernel, sys: &SystemParams, x: f64, t: f64, atoms: &[AtomJet]) -> WignerComb {
    let atoms = atoms
        .iter()
        .map(|a| CombAtom { s: a.s, momentum: a.s as f64 * kernel.scales.p_unit, weight: a.c[0] })
        .collect();
    WignerComb { x, t, hbar: sys.hbar, mass: sys.m, atoms }
}

/// `C_s(x, t) / N` for any real `x`, using the periodic extension of the
/// state beyond the well.
pub fn comb_coefficient(s: i64, x: f64, t: f64, state: &QuantumState, sys: &SystemParams, trunc: &Truncation) -> Result<f64> {
    let kernel = PairKernel::new(state, sys, trunc)?;
    Ok(kernel.atom(s, x.rem_euclid(sys.l), t, 0).c[0])
}

/// Mean velocity `<v> = (integral f12 v dv) / (integral f12 dv)` from the comb.
pub fn velocity_field(x: f64, t: f64, state: &QuantumState, sys: &SystemParams, trunc: &Truncation) -> Result<FieldSample> {
    let comb = wigner_comb(x, t, state, sys, trunc)?;
    Ok(ratio_by_density(comb.velocity_moment(1), comb.marginal(), sys, FieldSample::NodeUndefined))
}

fn ratio_by_density(numerator: f64, density: f64, sys: &SystemParams, below_floor: FieldSample) -> FieldSample {
    if density < density_floor(sys) {
        below_floor
    } else {
        FieldSample::finite_or_undefined(numerator / density)
    }
}

/// Probability flux `f <v> = (l / 2 mu T_mu N) sum w_n w_k (n+k+1) cos((k-n) G)`.
/// Finite everywhere, including nodes.
pub fn flux(x: f64, t: f64, state: &QuantumState, sys: &SystemParams, trunc: &Truncation) -> Result<f64> {
    sys.check_inside(x)?;
    let kernel = PairKernel::new(state, sys, trunc)?;
    Ok(kernel.v_unit * kernel.cosine_sum(x, t, |s| s as f64))
}

/// Velocity obtained by integrating the first Vlasov equation with the
/// center-of-mass constant set to zero.
pub fn velocity_from_vlasov(x: f64, t: f64, state: &QuantumState, sys: &SystemParams, trunc: &Truncation) -> Result<FieldSample> {
    velocity_from_vlasov_with_const(x, t, 0.0, state, sys, trunc)
}

/// Same as [`velocity_from_vlasov`] with an explicit homogeneous term
/// `center_of_mass / f`.
pub fn velocity_from_vlasov_with_const(
    x: f64,
    t: f64,
    center_of_mass: f64,
    state: &QuantumState,
    sys: &SystemParams,
    trunc: &Truncation,
) -> Result<FieldSample> {
    sys.check_inside(x)?;
    let kernel = PairKernel::new(state, sys, trunc)?;
    let f = kernel.cosine_sum(x, t, |_| 1.0);
    // Particular solution of d_x C = -d_t f, integrated term by term:
    // -d_t cos(d G_s) = -(pi s / T_mu) d sin(d G_s), and its x-antiderivative
    // is (pi s / T_mu) / (2 pi mu / l) cos(d G_s) = v_unit s cos(d G_s).
    let particular = kernel.cosine_sum(x, t, |s| s as f64) * kernel.scaled_norm;
    let numerator = kernel.v_unit * particular / kernel.scaled_norm + center_of_mass;
    Ok(ratio_by_density(numerator, f, sys, FieldSample::NodeUndefined))
}

/// Local velocity moments of the comb.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentSet {
    pub density: f64,
    pub flux: f64,
    pub velocity: FieldSample,
    /// `P11 = integral f12 (v - <v>)^2 dv`
    pub pressure: FieldSample,
    /// `P111 = integral f12 (v - <v>)^3 dv`
    pub heat_flux: FieldSample,
    /// `<E>(x, t) = (1/f) integral (m v^2 / 2) f12 dv`
    pub energy_density: FieldSample,
}

pub fn moments(x: f64, t: f64, state: &QuantumState, sys: &SystemParams, trunc: &Truncation) -> Result<MomentSet> {
    sys.check_inside(x)?;
    let kernel = PairKernel::new(state, sys, trunc)?;
    let comb = comb_from_atoms(&kernel, sys, x, t, &kernel.atoms(x, t, 0));
    let density = comb.marginal();
    let flux = comb.velocity_moment(1);
    let velocity = ratio_by_density(flux, density, sys, FieldSample::NodeUndefined);
    let kinetic = 0.5 * sys.m * comb.velocity_moment(2);
    let energy_density = ratio_by_density(kinetic, density, sys, FieldSample::Pole);

    let center = match velocity {
        FieldSample::Finite(v) => Some(v),
        _ => two_sided_velocity_limit(&kernel, sys, x, t),
    };
    let (pressure, heat_flux) = match center {
        Some(v) => (
            FieldSample::Finite(comb.central_moment(v, 2)),
            FieldSample::Finite(comb.central_moment(v, 3)),
        ),
        None => (FieldSample::NodeUndefined, FieldSample::NodeUndefined),
    };
    Ok(MomentSet { density, flux, velocity, pressure, heat_flux, energy_density })
}

/// Velocity limit at a density node, if the values just left and right of
/// `x` agree. Uses the periodic extension at the walls.
fn two_sided_velocity_limit(kernel: &PairKernel, sys: &SystemParams, x: f64, t: f64) -> Option<f64> {
    let offset = 1e-6 * sys.l / kernel.mu;
    let side = |z: f64| {
        let atoms = kernel.atoms(z, t, 0);
        let f: f64 = atoms.iter().map(|a| a.c[0]).sum();
        let j: f64 = atoms.iter().map(|a| kernel.velocity_of(a.s) * a.c[0]).sum();
        (f >= density_floor(sys)).then(|| j / f)
    };
    let (left, right) = (side(x - offset)?, side(x + offset)?);
    let tolerance = 1e-4 * kernel.v_unit.max(left.abs()).max(right.abs());
    ((left - right).abs() <= tolerance).then_some(0.5 * (left + right))
}

/// `|d_t f + d_x (f <v>)|` from term-wise analytic derivatives of the density
/// and flux series.
pub fn continuity_residual(x: f64, t: f64, state: &QuantumState, sys: &SystemParams, trunc: &Truncation) -> Result<f64> {
    let (dt_density, dx_flux) = continuity_terms(x, t, state, sys, trunc)?;
    Ok((dt_density + dx_flux).abs())
}

/// `(d_t f, d_x (f <v>))`, analytic.
pub fn continuity_terms(x: f64, t: f64, state: &QuantumState, sys: &SystemParams, trunc: &Truncation) -> Result<(f64, f64)> {
    sys.check_inside(x)?;
    let kernel = PairKernel::new(state, sys, trunc)?;
    let omega = std::f64::consts::PI / kernel.scales.t_mu;
    // d_t cos(d G_s) = d (pi s / T_mu) sin(d G_s)
    let dt_density = omega * kernel.sine_sum(x, t, |s, d| (s * d) as f64);
    // d_x cos(d G_s) = -d (2 pi mu / l) sin(d G_s)
    let slope = kernel.phase_slope();
    let dx_flux = -kernel.v_unit * slope * kernel.sine_sum(x, t, |s, d| (s * d) as f64);
    Ok((dt_density, dx_flux))
}

/// Central-difference counterpart of [`continuity_residual`] with steps
/// `h l / mu` and `h T_mu`.
pub fn continuity_residual_fd(x: f64, t: f64, h: f64, state: &QuantumState, sys: &SystemParams, trunc: &Truncation) -> Result<f64> {
    let kernel = PairKernel::new(state, sys, trunc)?;
    let (hx, ht) = steps(&kernel, h)?;
    let f = |x: f64, t: f64| kernel.cosine_sum(x, t, |_| 1.0);
    let j = |x: f64, t: f64| kernel.v_unit * kernel.cosine_sum(x, t, |s| s as f64);
    let dt = (f(x, t + ht) - f(x, t - ht)) / (2.0 * ht);
    let dx = (j(x + hx, t) - j(x - hx, t)) / (2.0 * hx);
    Ok((dt + dx).abs())
}

fn steps(kernel: &PairKernel, h: f64) -> Result<(f64, f64)> {
    if !(h > 0.0 && h < 0.5) {
        return Err(Error::InvalidParameter(format!("relative step must lie in (0, 0.5), got {h}")));
    }
    Ok((h * kernel.l / kernel.mu, h * kernel.scales.t_mu))
}

/// Fluid fields at one point, available where the density clears the floor.
#[derive(Debug, Clone, Copy)]
struct Fluid {
    density: f64,
    velocity: f64,
    pressure: f64,
    heat_flux: f64,
}

fn fluid(kernel: &PairKernel, sys: &SystemParams, x: f64, t: f64) -> Result<Fluid> {
    let atoms = kernel.atoms(x, t, 0);
    let comb = comb_from_atoms(kernel, sys, x, t, &atoms);
    let density = comb.marginal();
    if density < density_floor(sys) {
        return Err(Error::NodeUndefined { x, t });
    }
    let velocity = comb.velocity_moment(1) / density;
    Ok(Fluid {
        density,
        velocity,
        pressure: comb.central_moment(velocity, 2),
        heat_flux: comb.central_moment(velocity, 3),
    })
}

/// Terms of the momentum balance `(d_t + <v> d_x) <v> = -(1/f) d_x P11`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentumBalance {
    /// Material derivative of `<v>`, by central differences.
    pub acceleration: f64,
    /// `-(1/f) d_x P11`, by central differences.
    pub pressure_force: f64,
}

impl MomentumBalance {
    pub fn residual(&self) -> f64 {
        (self.acceleration - self.pressure_force).abs()
    }
}

pub fn momentum_law_terms(
    x: f64,
    t: f64,
    state: &QuantumState,
    sys: &SystemParams,
    h: f64,
    trunc: &Truncation,
) -> Result<MomentumBalance> {
    sys.check_inside(x)?;
    let kernel = PairKernel::new(state, sys, trunc)?;
    let (hx, ht) = steps(&kernel, h)?;
    let at = |x: f64, t: f64| fluid(&kernel, sys, x, t);
    let here = at(x, t)?;
    let (xp, xm) = (at(x + hx, t)?, at(x - hx, t)?);
    let (tp, tm) = (at(x, t + ht)?, at(x, t - ht)?);
    let dt_v = (tp.velocity - tm.velocity) / (2.0 * ht);
    let dx_v = (xp.velocity - xm.velocity) / (2.0 * hx);
    let dx_p = (xp.pressure - xm.pressure) / (2.0 * hx);
    Ok(MomentumBalance {
        acceleration: dt_v + here.velocity * dx_v,
        pressure_force: -dx_p / here.density,
    })
}

/// `|(d_t + <v> d_x) <v> + (1/f) d_x P11|`
pub fn momentum_law_residual(
    x: f64,
    t: f64,
    state: &QuantumState,
    sys: &SystemParams,
    h: f64,
    trunc: &Truncation,
) -> Result<f64> {
    Ok(momentum_law_terms(x, t, state, sys, h, trunc)?.residual())
}

/// Analytic pair `((1/f) d_x P11, (1/m) d_x Q)`; the two agree identically.
pub fn pressure_potential_gradients(
    x: f64,
    t: f64,
    state: &QuantumState,
    sys: &SystemParams,
    trunc: &Truncation,
) -> Result<(f64, f64)> {
    sys.check_inside(x)?;
    let kernel = PairKernel::new(state, sys, trunc)?;
    let atoms = kernel.atoms(x, t, 3);
    let mut m = [[0.0; 4]; 3];
    for a in &atoms {
        let v = kernel.velocity_of(a.s);
        for (order, row) in m.iter_mut().enumerate() {
            let weight = v.powi(order as i32);
            for (slot, c) in row.iter_mut().zip(a.c.iter()) {
                *slot += weight * c;
            }
        }
    }
    let f = m[0];
    if f[0] < density_floor(sys) {
        return Err(Error::NodeUndefined { x, t });
    }
    // P11 = M2 - M1^2 / M0
    let dx_pressure = m[2][1] - 2.0 * m[1][0] * m[1][1] / f[0] + m[1][0] * m[1][0] * f[1] / (f[0] * f[0]);
    let q_prefactor = -sys.hbar * sys.hbar / (2.0 * sys.m);
    let dx_q = q_prefactor
        * (f[3] / (2.0 * f[0]) - f[1] * f[2] / (f[0] * f[0]) + f[1].powi(3) / (2.0 * f[0].powi(3)));
    Ok((dx_pressure / f[0], dx_q / sys.m))
}

/// Terms of the energy balance
/// `d_t [f v^2/2 + P11/2] + d_x [f v^3/2 + v P11/2 + v P11 + P111/2] = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyBalance {
    pub dt_energy: f64,
    pub dx_kinetic_flux: f64,
    pub dx_internal_flux: f64,
    pub dx_work: f64,
    pub dx_heat_flux: f64,
}

impl EnergyBalance {
    pub fn residual(&self) -> f64 {
        (self.dt_energy + self.dx_kinetic_flux + self.dx_internal_flux + self.dx_work + self.dx_heat_flux).abs()
    }

    /// Largest individual flux divergence.
    pub fn scale(&self) -> f64 {
        [self.dt_energy, self.dx_kinetic_flux, self.dx_internal_flux, self.dx_work, self.dx_heat_flux]
            .iter()
            .fold(0.0, |acc: f64, v| acc.max(v.abs()))
    }
}

pub fn energy_law_terms(
    x: f64,
    t: f64,
    state: &QuantumState,
    sys: &SystemParams,
    h: f64,
    trunc: &Truncation,
) -> Result<EnergyBalance> {
    sys.check_inside(x)?;
    let kernel = PairKernel::new(state, sys, trunc)?;
    let (hx, ht) = steps(&kernel, h)?;
    let at = |x: f64, t: f64| fluid(&kernel, sys, x, t);
    let energy = |p: &Fluid| 0.5 * p.density * p.velocity * p.velocity + 0.5 * p.pressure;
    let kinetic = |p: &Fluid| 0.5 * p.density * p.velocity.powi(3);
    let internal = |p: &Fluid| 0.5 * p.velocity * p.pressure;
    let work = |p: &Fluid| p.velocity * p.pressure;
    let heat = |p: &Fluid| 0.5 * p.heat_flux;
    let (xp, xm) = (at(x + hx, t)?, at(x - hx, t)?);
    let (tp, tm) = (at(x, t + ht)?, at(x, t - ht)?);
    let dx = |g: &dyn Fn(&Fluid) -> f64| (g(&xp) - g(&xm)) / (2.0 * hx);
    Ok(EnergyBalance {
        dt_energy: (energy(&tp) - energy(&tm)) / (2.0 * ht),
        dx_kinetic_flux: dx(&kinetic),
        dx_internal_flux: dx(&internal),
        dx_work: dx(&work),
        dx_heat_flux: dx(&heat),
    })
}

pub fn energy_law_residual(
    x: f64,
    t: f64,
    state: &QuantumState,
    sys: &SystemParams,
    h: f64,
    trunc: &Truncation,
) -> Result<f64> {
    Ok(energy_law_terms(x, t, state, sys, h, trunc)?.residual())
}
