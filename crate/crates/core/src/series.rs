//! Double sums over odd index pairs `(2n+1, 2k+1)`.
//!
//! Every space-time field of the state is a sum of
//! `w_n w_k cos((k - n) G_s(x, t))` with `s = n + k + 1` and the affine phase
//! `G_s(x, t) = pi (2 mu x / l + 1) - (pi t / T_mu) s`. Grouping the terms by
//! `s` gives the momentum atoms of the Wigner comb.

use std::f64::consts::PI;

use crate::error::Result;
use crate::numerics::{mul_mod2, Compensated, OddWindow, Truncation};
use crate::wavefunction::{DerivedScales, QuantumState, SystemParams};

/// One momentum atom: coefficient `C_s` (density units) and its first
/// three x-derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct AtomJet {
    pub s: i64,
    pub c: [f64; 4],
}

#[derive(Debug, Clone)]
pub(crate) struct PairKernel {
    pub window: OddWindow,
    /// `N(beta) / exp(-pi beta / 2)`
    pub scaled_norm: f64,
    pub scales: DerivedScales,
    pub mu: f64,
    pub l: f64,
    pub v_unit: f64,
}

impl PairKernel {
    pub fn new(state: &QuantumState, sys: &SystemParams, trunc: &Truncation) -> Result<Self> {
        let window = OddWindow::new(state.beta(), trunc)?;
        let scaled_norm = sys.l * window.scaled_norm();
        let scales = DerivedScales::of(state, sys);
        Ok(Self {
            window,
            scaled_norm,
            scales,
            mu: state.mu() as f64,
            l: sys.l,
            v_unit: scales.v_unit(sys),
        })
    }

    /// `dG/dx`
    pub fn phase_slope(&self) -> f64 {
        2.0 * PI * self.mu / self.l
    }

    /// `(2 mu x / l + 1, t / T_mu)`, so that `G_s = pi (a - s b)`.
    fn coordinates(&self, x: f64, t: f64) -> (f64, f64) {
        (2.0 * self.mu * x / self.l + 1.0, t / self.scales.t_mu)
    }

    /// `d G_s` reduced modulo `2 pi`. Both products are formed exactly
    /// before reduction, so the angle stays accurate for large `d`, `s`
    /// and `t`.
    fn angle(d: i64, s: i64, a: f64, b: f64) -> f64 {
        PI * (mul_mod2(d as f64, a) - mul_mod2((d * s) as f64, b))
    }

    /// Visits every pair as `(s, d = k - n, w_n w_k)`.
    pub fn for_each_pair(&self, mut visit: impl FnMut(i64, i64, f64)) {
        for (i, wi) in self.window.iter() {
            for (j, wj) in self.window.iter() {
                visit((i + j) / 2, (j - i) / 2, wi * wj);
            }
        }
    }

    /// `sum w_n w_k g(s) cos((k-n) G_s) / N`
    ///
    /// Terms are grouped by `s` and the groups for `s` and `-s` are combined
    /// first, so odd moments cancel exactly whenever the groups coincide
    /// (as they do at `t = 0`).
    pub fn cosine_sum(&self, x: f64, t: f64, moment: impl Fn(i64) -> f64) -> f64 {
        let (a, b) = self.coordinates(x, t);
        let (lo, hi) = self.s_range();
        let mut groups = vec![Compensated::default(); (hi - lo + 1) as usize];
        self.for_each_pair(|s, d, w| {
            groups[(s - lo) as usize].add(w * Self::angle(d, s, a, b).cos());
        });
        let values: Vec<f64> = groups.iter().map(Compensated::value).collect();
        symmetric_sum(lo, &values, moment) / self.scaled_norm
    }

    /// `sum w_n w_k g(s, d) sin((k-n) G_s) / N`
    pub fn sine_sum(&self, x: f64, t: f64, moment: impl Fn(i64, i64) -> f64) -> f64 {
        let (a, b) = self.coordinates(x, t);
        let mut acc = Compensated::default();
        self.for_each_pair(|s, d, w| {
            let factor = moment(s, d);
            if factor != 0.0 {
                acc.add(w * factor * Self::angle(d, s, a, b).sin());
            }
        });
        acc.value() / self.scaled_norm
    }

    fn s_range(&self) -> (i64, i64) {
        let max_odd = *self.window.odd.last().expect("window is never empty");
        (-max_odd, max_odd)
    }

    /// Coefficients `C_s` of atom `s` and x-derivatives up to `order` (<= 3).
    /// Defined for every real `x` (periodic in `x` with period `l / mu`).
    pub fn atom(&self, s: i64, x: f64, t: f64, order: usize) -> AtomJet {
        let (a, b) = self.coordinates(x, t);
        let slope = self.phase_slope();
        let mut c = [Compensated::default(); 4];
        for (i, wi) in self.window.iter() {
            let j = 2 * s - i;
            let Some(wj) = self.weight_of(j) else { continue };
            let d = (j - i) / 2;
            let w = wi * wj;
            let (sin, cos) = Self::angle(d, s, a, b).sin_cos();
            c[0].add(w * cos);
            if order >= 1 {
                let ds = d as f64 * slope;
                c[1].add(-w * ds * sin);
                if order >= 2 {
                    c[2].add(-w * ds * ds * cos);
                    if order >= 3 {
                        c[3].add(w * ds * ds * ds * sin);
                    }
                }
            }
        }
        AtomJet { s, c: c.map(|v| v.value() / self.scaled_norm) }
    }

    /// All atoms at `(x, t)`, ascending in `s`.
    pub fn atoms(&self, x: f64, t: f64, order: usize) -> Vec<AtomJet> {
        let (lo, hi) = self.s_range();
        (lo..=hi).map(|s| self.atom(s, x, t, order)).collect()
    }

    fn weight_of(&self, j: i64) -> Option<f64> {
        let first = self.window.odd[0];
        if j % 2 == 0 || j < first || j > -first {
            return None;
        }
        Some(self.window.weight[((j - first) / 2) as usize])
    }

    pub fn velocity_of(&self, s: i64) -> f64 {
        s as f64 * self.v_unit
    }
}

/// `sum_s g(s) values[s - lo]` over a range symmetric about zero, pairing
/// `s` with `-s` before accumulating.
pub(crate) fn symmetric_sum(lo: i64, values: &[f64], g: impl Fn(i64) -> f64) -> f64 {
    let n = values.len();
    let mut acc = Compensated::default();
    for i in 0..n / 2 {
        let (a, b) = (lo + i as i64, lo + (n - 1 - i) as i64);
        acc.add(g(a) * values[i] + g(b) * values[n - 1 - i]);
    }
    if n % 2 == 1 {
        acc.add(g(lo + (n / 2) as i64) * values[n / 2]);
    }
    acc.value()
}
