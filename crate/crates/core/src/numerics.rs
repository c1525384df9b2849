//! Shared numerical substrate: series cutoff control, fixed-order quadrature
//! and central differences.
//!
//! Every series in the crate runs over odd indices `j = 2k + 1` weighted by the
//! Gaussian `exp(-(pi*beta/4) j^2)`. [`cutoff_for`] picks the window so that the
//! first omitted weight is at most `tol` times the reference weight
//! `exp(-pi*beta/2)`.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Tail-bound series cutoff policy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Truncation {
    tol: f64,
    max_index: usize,
}

impl Truncation {
    pub const DEFAULT_TOL: f64 = 1e-14;
    pub const DEFAULT_MAX_INDEX: usize = 4096;

    pub fn new(tol: f64, max_index: usize) -> Result<Self> {
        if !(tol > 0.0 && tol < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "truncation tolerance must lie in (0, 1), got {tol}"
            )));
        }
        if max_index < 1 {
            return Err(Error::InvalidParameter("max_index must be at least 1".into()));
        }
        Ok(Self { tol, max_index })
    }

    pub fn with_tol(tol: f64) -> Result<Self> {
        Self::new(tol, Self::DEFAULT_MAX_INDEX)
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn max_index(&self) -> usize {
        self.max_index
    }
}

impl Default for Truncation {
    fn default() -> Self {
        Self { tol: Self::DEFAULT_TOL, max_index: Self::DEFAULT_MAX_INDEX }
    }
}

/// Tag of a [`FieldSample`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SampleTag {
    Finite,
    Pole,
    NodeUndefined,
}

impl SampleTag {
    pub fn as_str(self) -> &'static str {
        match self {
            SampleTag::Finite => "finite",
            SampleTag::Pole => "pole",
            SampleTag::NodeUndefined => "node-undefined",
        }
    }
}

/// A field value that may be undefined where the density vanishes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FieldSample {
    Finite(f64),
    /// Division by a vanishing density with a nonvanishing numerator.
    Pole,
    /// Ratio undefined at a density node.
    NodeUndefined,
}

impl FieldSample {
    /// Builds a sample, tagging non-finite values as `NodeUndefined`.
    pub fn finite_or_undefined(value: f64) -> Self {
        if value.is_finite() {
            FieldSample::Finite(value)
        } else {
            FieldSample::NodeUndefined
        }
    }

    pub fn value(&self) -> Option<f64> {
        match *self {
            FieldSample::Finite(v) => Some(v),
            _ => None,
        }
    }

    pub fn tag(&self) -> SampleTag {
        match self {
            FieldSample::Finite(_) => SampleTag::Finite,
            FieldSample::Pole => SampleTag::Pole,
            FieldSample::NodeUndefined => SampleTag::NodeUndefined,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, FieldSample::Finite(_))
    }
}

/// Smallest `K >= 1` with `exp(-(pi*beta/4)(2K+1)^2) <= tol * exp(-pi*beta/2)`.
pub fn cutoff_for(beta: f64, trunc: &Truncation) -> Result<usize> {
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::InvalidParameter(format!("beta must be positive, got {beta}")));
    }
    // (2K+1)^2 >= 2 + 4 ln(1/tol) / (pi beta)
    let bound = 2.0 + 4.0 * (1.0 / trunc.tol).ln() / (PI * beta);
    let overflow = |required: u64| Error::TruncationOverflow { required, max_index: trunc.max_index };
    if !bound.is_finite() {
        return Err(overflow(u64::MAX));
    }
    let estimate = ((bound.sqrt() - 1.0) / 2.0).ceil().max(1.0);
    if estimate > trunc.max_index as f64 + 2.0 {
        return Err(overflow(estimate as u64));
    }
    let holds = |k: u64| {
        let j = (2 * k + 1) as f64;
        j * j >= bound
    };
    let mut k = estimate as u64;
    while !holds(k) {
        k += 1;
    }
    while k > 1 && holds(k - 1) {
        k -= 1;
    }
    if k > trunc.max_index as u64 {
        return Err(overflow(k));
    }
    Ok(k as usize)
}

/// Odd indices `j = 2k + 1` for `k` in `[-K-1, K]`, closed under `j -> -j`,
/// with weights `exp(-(pi*beta/4)(j^2 - 1))` scaled so the leading pair is 1.
#[derive(Debug, Clone)]
pub(crate) struct OddWindow {
    pub odd: Vec<i64>,
    pub weight: Vec<f64>,
}

impl OddWindow {
    pub fn new(beta: f64, trunc: &Truncation) -> Result<Self> {
        let cutoff = cutoff_for(beta, trunc)? as i64;
        let odd: Vec<i64> = (-cutoff - 1..=cutoff).map(|k| 2 * k + 1).collect();
        let weight = odd
            .iter()
            .map(|&j| (-(PI * beta / 4.0) * ((j * j - 1) as f64)).exp())
            .collect();
        Ok(Self { odd, weight })
    }

    /// `sum_j w_j^2`, i.e. `N(beta) / (l exp(-pi*beta/2))`.
    pub fn scaled_norm(&self) -> f64 {
        self.weight.iter().map(|w| w * w).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.odd.iter().copied().zip(self.weight.iter().copied())
    }
}

const GAUSS4_NODES: [f64; 4] = [
    -0.861_136_311_594_052_6,
    -0.339_981_043_584_856_3,
    0.339_981_043_584_856_3,
    0.861_136_311_594_052_6,
];
const GAUSS4_WEIGHTS: [f64; 4] = [
    0.347_854_845_137_453_8,
    0.652_145_154_862_546_1,
    0.652_145_154_862_546_1,
    0.347_854_845_137_453_8,
];

/// Composite four-point Gauss-Legendre rule on `n_panels` equal panels.
///
/// Convergence order 8 on smooth integrands. Nodes are strictly interior, so
/// integrands with endpoint singularities (but integrable limits) are fine.
pub fn integrate<F>(f: F, a: f64, b: f64, n_panels: usize) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::InvalidParameter(format!("integration bounds must satisfy a < b, got [{a}, {b}]")));
    }
    if n_panels == 0 {
        return Err(Error::InvalidParameter("n_panels must be positive".into()));
    }
    let width = (b - a) / n_panels as f64;
    let half = 0.5 * width;
    let mut total = 0.0;
    for panel in 0..n_panels {
        let mid = a + (panel as f64 + 0.5) * width;
        let mut acc = 0.0;
        for (node, weight) in GAUSS4_NODES.iter().zip(GAUSS4_WEIGHTS.iter()) {
            let x = mid + half * node;
            let y = f(x);
            if !y.is_finite() {
                return Err(Error::NonIntegrable { x });
            }
            acc += weight * y;
        }
        total += half * acc;
    }
    Ok(total)
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Compensated {
    sum: f64,
    carry: f64,
}

impl Compensated {
    pub fn add(&mut self, term: f64) {
        let next = self.sum + term;
        if self.sum.abs() >= term.abs() {
            self.carry += (self.sum - next) + term;
        } else {
            self.carry += (term - next) + self.sum;
        }
        self.sum = next;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// `x * y` modulo 2, from the exact two-term product; the result lies in
/// `[0, 2)` up to the rounding of the low part.
pub(crate) fn mul_mod2(x: f64, y: f64) -> f64 {
    let high = x * y;
    let low = x.mul_add(y, -high);
    // exact for |high| < 2^53
    high - 2.0 * (0.5 * high).floor() + low
}

/// Order of a central-difference derivative.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiffOrder {
    First,
    Second,
}

/// Second-order accurate central difference.
pub fn finite_diff<F>(f: F, x: f64, order: DiffOrder, h: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if !(h > 0.0) {
        return Err(Error::InvalidParameter(format!("step must be positive, got {h}")));
    }
    let sample = |z: f64| {
        let y = f(z);
        if y.is_finite() {
            Ok(y)
        } else {
            Err(Error::NonFiniteStencil { x: z })
        }
    };
    let plus = sample(x + h)?;
    let minus = sample(x - h)?;
    match order {
        DiffOrder::First => Ok((plus - minus) / (2.0 * h)),
        DiffOrder::Second => {
            let center = sample(x)?;
            Ok((plus - 2.0 * center + minus) / (h * h))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mul_mod2_is_exact_reduction() {
        // 3 * (1/3 rounded) differs from 1 by its rounding error, which survives
        let third = 1.0 / 3.0;
        assert_eq!(mul_mod2(3.0, third), 3.0f64.mul_add(third, -1.0) + 1.0);
        assert_eq!(mul_mod2(-7.0, 0.5), 0.5);
        assert_eq!(mul_mod2(1e6 + 1.0, 1.25), 1.25);
        // 12345.7 mod 2, with only the representation error of 0.1 scaled up
        assert!((mul_mod2(123_457.0, 0.1) - 1.7).abs() < 1e-12);
    }

    /// Brute-force scan of the exponential inequality, independent of the
    /// closed-form estimate used by `cutoff_for`.
    fn cutoff_by_scan(beta: f64, tol: f64, cap: u64) -> Option<u64> {
        let lead = -PI * beta / 2.0 + tol.ln();
        (1..=cap).find(|&k| {
            let j = (2 * k + 1) as f64;
            -(PI * beta / 4.0) * j * j <= lead
        })
    }

    #[test]
    fn cutoff_matches_scan() {
        let trunc = Truncation::new(1e-16, 4096).unwrap();
        // (2K+1)^2 >= 2 + (2/pi) ln(1e16) = 25.45..., so K = 3.
        assert_eq!(cutoff_for(2.0, &trunc).unwrap(), 3);
        assert_eq!(cutoff_by_scan(2.0, 1e-16, 100), Some(3));
        for &beta in &[0.01, 0.05, 0.1, 0.5, 1.0, 3.0, 10.0] {
            for &tol in &[1e-6, 1e-10, 1e-14, 1e-16] {
                let t = Truncation::new(tol, 4096).unwrap();
                assert_eq!(
                    Some(cutoff_for(beta, &t).unwrap() as u64),
                    cutoff_by_scan(beta, tol, 4096),
                    "beta={beta} tol={tol}"
                );
            }
        }
    }

    #[test]
    fn cutoff_large_beta_is_one() {
        let trunc = Truncation::new(1e-16, 4096).unwrap();
        assert_eq!(cutoff_for(100.0, &trunc).unwrap(), 1);
        assert_eq!(cutoff_for(1e6, &trunc).unwrap(), 1);
    }

    #[test]
    fn cutoff_overflow() {
        let trunc = Truncation::new(1e-12, 10_000).unwrap();
        // beta = 1e-6 needs K = 2966, inside the cap.
        assert_eq!(cutoff_for(1e-6, &trunc).unwrap(), 2966);
        assert_eq!(cutoff_by_scan(1e-6, 1e-12, 10_000), Some(2966));
        // beta = 1e-8 needs K ~ 29_650.
        match cutoff_for(1e-8, &trunc) {
            Err(Error::TruncationOverflow { required, max_index }) => {
                assert!(required > 10_000);
                assert_eq!(max_index, 10_000);
            }
            other => panic!("expected overflow, got {other:?}"),
        }
        assert!(cutoff_for(0.0, &trunc).is_err());
    }

    #[test]
    fn truncation_rejects_bad_values() {
        assert!(Truncation::new(1.0, 10).is_err());
        assert!(Truncation::new(0.0, 10).is_err());
        assert!(Truncation::new(1e-10, 0).is_err());
    }

    #[test]
    fn odd_window_is_symmetric() {
        let w = OddWindow::new(0.3, &Truncation::default()).unwrap();
        let n = w.odd.len();
        for i in 0..n {
            assert_eq!(w.odd[i], -w.odd[n - 1 - i]);
            assert_eq!(w.weight[i], w.weight[n - 1 - i]);
        }
        assert!(w.odd.iter().all(|j| j % 2 != 0));
    }

    #[test]
    fn integrate_constant() {
        let v = integrate(|_| 1.0, 0.0, 1.0, 7).unwrap();
        assert!((v - 1.0).abs() <= 4.0 * f64::EPSILON);
    }

    #[test]
    fn integrate_stationary_normalization() {
        let l = 1.0;
        let v = integrate(|x| 2.0 / l * (PI * x / l).sin().powi(2), 0.0, l, 16).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn integrate_full_period_cosine() {
        let period = 1.0 / (2.0 * PI);
        let v = integrate(|t| (2.0 * PI * t / period).cos(), 0.0, period, 16).unwrap();
        assert!(v.abs() < 1e-12);
    }

    #[test]
    fn integrate_order_check() {
        let f = |x: f64| (5.0 * x).sin().exp();
        let exact = integrate(f, 0.0, 3.0, 4096).unwrap();
        let mut prev = (integrate(f, 0.0, 3.0, 4).unwrap() - exact).abs();
        for n in [8, 16] {
            let err = (integrate(f, 0.0, 3.0, n).unwrap() - exact).abs();
            assert!(prev / err >= 8.0, "n={n}: {prev} -> {err}");
            prev = err;
        }
    }

    #[test]
    fn integrate_rejects_interior_poles() {
        let r = integrate(|x| 1.0 / (x - 0.5), 0.0, 1.0, 2);
        // 0.5 is a panel boundary, never a node: the integrand stays finite.
        assert!(r.is_ok());
        let r = integrate(|x| if x > 0.3 && x < 0.4 { f64::NAN } else { 1.0 }, 0.0, 1.0, 4);
        assert!(matches!(r, Err(Error::NonIntegrable { .. })));
        // Endpoint singularity is never sampled.
        assert!(integrate(|x| x.ln(), 0.0, 1.0, 8).is_ok());
    }

    #[test]
    fn finite_diff_examples() {
        for h in [1e-3, 0.1, 1.0] {
            let d = finite_diff(|x| x * x, 3.0, DiffOrder::First, h).unwrap();
            assert!((d - 6.0).abs() < 1e-9);
        }
        let d2 = finite_diff(f64::sin, 0.0, DiffOrder::Second, 1e-4).unwrap();
        assert!(d2.abs() < 1e-7);
        let d = finite_diff(f64::exp, 0.0, DiffOrder::First, 1e-5).unwrap();
        assert!((d - 1.0).abs() < 1e-9);
        let bad = finite_diff(|x| 1.0 / x, 1e-9, DiffOrder::Second, 1e-9);
        assert!(matches!(bad, Err(Error::NonFiniteStencil { .. })));
    }

    #[test]
    fn field_sample_tags() {
        assert_eq!(FieldSample::Finite(1.0).value(), Some(1.0));
        assert_eq!(FieldSample::Pole.value(), None);
        assert_eq!(FieldSample::finite_or_undefined(f64::NAN).tag(), SampleTag::NodeUndefined);
        assert_eq!(SampleTag::NodeUndefined.as_str(), "node-undefined");
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn cutoff_monotone(beta in 0.01f64..50.0, scale in 1.0f64..10.0, e1 in 2.0f64..15.0, e2 in 2.0f64..15.0) {
                let trunc = Truncation::new(10f64.powf(-e1), 100_000).unwrap();
                let k1 = cutoff_for(beta, &trunc).unwrap();
                let k2 = cutoff_for(beta * scale, &trunc).unwrap();
                prop_assert!(k2 <= k1);
                let (lo, hi) = if e1 < e2 { (e1, e2) } else { (e2, e1) };
                let loose = Truncation::new(10f64.powf(-lo), 100_000).unwrap();
                let tight = Truncation::new(10f64.powf(-hi), 100_000).unwrap();
                prop_assert!(cutoff_for(beta, &tight).unwrap() >= cutoff_for(beta, &loose).unwrap());
            }
        }
    }
}
