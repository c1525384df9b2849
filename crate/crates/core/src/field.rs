//! Rectangular space-time grids of tagged samples.

use crate::error::{Error, Result};
use crate::numerics::FieldSample;

/// Samples of a field on `xs x ts`, stored row by row in `t` so that index
/// `it * xs.len() + ix` holds `(xs[ix], ts[it])`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldGrid {
    pub xs: Vec<f64>,
    pub ts: Vec<f64>,
    pub samples: Vec<FieldSample>,
}

impl FieldGrid {
    pub fn get(&self, ix: usize, it: usize) -> FieldSample {
        self.samples[it * self.xs.len() + ix]
    }

    /// `(x, t, sample)` in `(t, x)` order.
    pub fn iter(&self) -> impl Iterator<Item = (f64, f64, FieldSample)> + '_ {
        self.ts
            .iter()
            .flat_map(move |&t| self.xs.iter().map(move |&x| (x, t)))
            .zip(self.samples.iter())
            .map(|((x, t), s)| (x, t, *s))
    }

    /// Largest finite magnitude, ignoring tagged samples.
    pub fn max_abs(&self) -> f64 {
        self.samples.iter().filter_map(|s| s.value()).fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// `n` evenly spaced points from `a` to `b` inclusive.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => {
            let step = (b - a) / (n - 1) as f64;
            let mut out: Vec<f64> = (0..n).map(|i| a + step * i as f64).collect();
            out[n - 1] = b;
            out
        }
    }
}

/// Evaluate `field` at every grid point. Stops at the first error.
pub fn tabulate<F>(xs: &[f64], ts: &[f64], field: F) -> Result<FieldGrid>
where
    F: Fn(f64, f64) -> Result<FieldSample>,
{
    if xs.is_empty() || ts.is_empty() {
        return Err(Error::InvalidParameter("grid axes must be non-empty".into()));
    }
    let mut samples = Vec::with_capacity(xs.len() * ts.len());
    for &t in ts {
        for &x in xs {
            samples.push(field(x, t)?);
        }
    }
    Ok(FieldGrid { xs: xs.to_vec(), ts: ts.to_vec(), samples })
}
