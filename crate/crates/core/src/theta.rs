//! Jacobi theta functions with characteristics.
//!
//! `theta[a, b](z, tau) = sum_k exp(i pi tau (k + a)^2 + 2 i pi (z + b)(k + a))`
//!
//! [`theta1`] is the half-integer case written over odd indices `j = 2k + 1`:
//!
//! `theta1(z, tau) = sum_j exp(i pi tau j^2 / 4 + i pi (2z + 1) j / 2)`
//!
//! which is identical to `theta[1/2, 1/2]`. The classical convention carries
//! an extra minus sign; only `|theta1|^2` enters the physics, and the
//! partition-function identity `Z = theta1(-1/2, 2 i beta)` needs the
//! positive series, so the sign is dropped here.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{cutoff_for, Truncation};

/// Arguments of `theta[a, b](z, tau)`; `Im(tau) > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaArgs {
    pub a: f64,
    pub b: f64,
    pub z: Complex64,
    pub tau: Complex64,
}

impl ThetaArgs {
    pub fn new(a: f64, b: f64, z: Complex64, tau: Complex64) -> Result<Self> {
        check_tau(tau)?;
        Ok(Self { a, b, z, tau })
    }
}

fn check_tau(tau: Complex64) -> Result<()> {
    if tau.im > 0.0 && tau.im.is_finite() && tau.re.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("theta series needs Im(tau) > 0, got tau = {tau}")))
    }
}

/// Indices `k` covering `|k + a - center| <= K + 1/2`, ordered center-out.
fn window(a: f64, z: Complex64, tau: Complex64, trunc: &Truncation) -> Result<Vec<i64>> {
    let cutoff = cutoff_for(tau.im, trunc)? as f64;
    let radius = cutoff + 0.5;
    // The Gaussian envelope |term| peaks at k + a = -Im(z) / Im(tau).
    let center = -z.im / tau.im;
    let lo = (center - a - radius).ceil();
    let hi = (center - a + radius).floor();
    if (hi - lo) > 2.0 * trunc.max_index() as f64 + 2.0 {
        return Err(Error::TruncationOverflow {
            required: ((hi - lo) / 2.0) as u64,
            max_index: trunc.max_index(),
        });
    }
    let mut ks: Vec<i64> = (lo as i64..=hi as i64).collect();
    ks.sort_by(|p, q| {
        let dp = (*p as f64 + a - center).abs();
        let dq = (*q as f64 + a - center).abs();
        dp.total_cmp(&dq).then(p.cmp(q))
    });
    Ok(ks)
}

/// `theta[a, b](z, tau)` with the index window chosen by `trunc`.
pub fn theta_char(args: &ThetaArgs, trunc: &Truncation) -> Result<Complex64> {
    check_tau(args.tau)?;
    let ks = window(args.a, args.z, args.tau, trunc)?;
    let i = Complex64::i();
    let sum = ks.into_iter().fold(Complex64::new(0.0, 0.0), |acc, k| {
        let shifted = k as f64 + args.a;
        let exponent = i * PI * args.tau * shifted * shifted + 2.0 * i * PI * (args.z + args.b) * shifted;
        acc + exponent.exp()
    });
    Ok(sum)
}

/// Half-integer theta function summed over odd indices.
pub fn theta1(z: Complex64, tau: Complex64, trunc: &Truncation) -> Result<Complex64> {
    check_tau(tau)?;
    let ks = window(0.5, z, tau, trunc)?;
    let i = Complex64::i();
    let sum = ks.into_iter().fold(Complex64::new(0.0, 0.0), |acc, k| {
        let j = (2 * k + 1) as f64;
        let exponent = i * PI * tau * j * j / 4.0 + i * PI * (2.0 * z + 1.0) * j / 2.0;
        acc + exponent.exp()
    });
    Ok(sum)
}

/// `|d^2 theta / dz^2 - 4 pi i d theta / d tau|` by central differences.
pub fn heat_identity_residual(args: &ThetaArgs, h: f64, trunc: &Truncation) -> Result<f64> {
    if !(h > 0.0) || args.tau.im - h <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "step h = {h} must be positive and below Im(tau) = {}",
            args.tau.im
        )));
    }
    let at = |dz: f64, dtau: f64| {
        let shifted = ThetaArgs { z: args.z + dz, tau: args.tau + dtau, ..*args };
        theta_char(&shifted, trunc)
    };
    let center = at(0.0, 0.0)?;
    let d2z = (at(h, 0.0)? - 2.0 * center + at(-h, 0.0)?) / (h * h);
    let dtau = (at(0.0, h)? - at(0.0, -h)?) / (2.0 * h);
    Ok((d2z - 4.0 * PI * Complex64::i() * dtau).norm())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Plain summation over k in [-half, half], no ordering, no cutoff logic.
    fn brute(a: f64, b: f64, z: Complex64, tau: Complex64, half: i64) -> Complex64 {
        let i = Complex64::i();
        (-half..=half)
            .map(|k| {
                let s = k as f64 + a;
                (i * PI * tau * s * s + 2.0 * i * PI * (z + b) * s).exp()
            })
            .sum()
    }

    #[test]
    fn half_integer_zero_at_origin() {
        let t = Truncation::default();
        let v = theta_char(&ThetaArgs::new(0.5, 0.5, c(0.0, 0.0), c(0.0, 1.0)).unwrap(), &t).unwrap();
        assert!(v.norm() < 1e-13);
        assert!(theta1(c(0.0, 0.0), c(0.0, 0.5), &t).unwrap().norm() < 1e-13);
        assert!(theta1(c(1.0, 0.0), c(0.0, 1.0), &t).unwrap().norm() < 1e-13);
    }

    #[test]
    fn zero_characteristic_matches_brute_force() {
        let t = Truncation::default();
        let v = theta_char(&ThetaArgs::new(0.0, 0.0, c(0.0, 0.0), c(0.0, 1.0)).unwrap(), &t).unwrap();
        let oracle = brute(0.0, 0.0, c(0.0, 0.0), c(0.0, 1.0), 100);
        assert!(v.im.abs() < 1e-15 && v.re > 0.0);
        assert!((v - oracle).norm() <= 1e-14 * oracle.norm());
    }

    #[test]
    fn oversummation_agrees() {
        let strict = Truncation::new(1e-14, 4096).unwrap();
        for (a, b, z, tau) in [
            (0.5, 0.5, c(0.3, 0.1), c(0.2, 1.0)),
            (0.0, 0.0, c(-0.7, 0.0), c(0.0, 0.3)),
            (0.25, -0.1, c(0.1, -0.4), c(-0.5, 0.8)),
        ] {
            let args = ThetaArgs::new(a, b, z, tau).unwrap();
            let cut = cutoff_for(tau.im, &strict).unwrap() as i64;
            let v = theta_char(&args, &strict).unwrap();
            let wide = brute(a, b, z, tau, cut + 10 + (z.im / tau.im).abs().ceil() as i64);
            let scale = (-(cut + 20)..=(cut + 20))
                .map(|k| {
                    let s = k as f64 + a;
                    (-PI * tau.im * s * s - 2.0 * PI * z.im * s).exp()
                })
                .fold(0.0, f64::max);
            assert!((v - wide).norm() <= 1e-13 * scale, "{a} {b} {z} {tau}");
        }
    }

    #[test]
    fn theta1_is_half_characteristic() {
        let t = Truncation::default();
        for (z, tau) in [(c(0.3, 0.1), c(0.0, 1.0)), (c(-1.2, 0.05), c(0.7, 0.4)), (c(0.5, 0.0), c(0.0, 2.0))] {
            let lhs = theta1(z, tau, &t).unwrap();
            let rhs = theta_char(&ThetaArgs::new(0.5, 0.5, z, tau).unwrap(), &t).unwrap();
            assert!((lhs - rhs).norm() < 1e-13 * rhs.norm().max(1.0));
        }
    }

    #[test]
    fn theta1_is_odd() {
        let t = Truncation::default();
        let z = c(0.3, 0.1);
        let tau = c(0.0, 1.0);
        let sum = theta1(z, tau, &t).unwrap() + theta1(-z, tau, &t).unwrap();
        assert!(sum.norm() < 1e-14);
    }

    #[test]
    fn theta1_zero_lattice() {
        let t = Truncation::default();
        for tau in [c(0.0, 1.0), c(0.3, 0.7)] {
            for m in -2..=2 {
                for n in -2..=2 {
                    let z = c(m as f64, 0.0) + tau * n as f64;
                    let v = theta1(z, tau, &t).unwrap();
                    // Scale: the largest term of the series at this z.
                    let center = -z.im / tau.im;
                    let peak = (-PI * tau.im * center * center - 2.0 * PI * z.im * center).exp().max(1.0);
                    let peak = peak.max((PI * z.im * z.im / tau.im).exp());
                    assert!(v.norm() <= 1e-12 * peak, "m={m} n={n} tau={tau}: {v}");
                }
            }
        }
    }

    #[test]
    fn partition_form_is_positive() {
        // theta1(-1/2, 2 i beta) = sum_j exp(-(pi beta / 2) j^2) > 0
        let t = Truncation::default();
        let beta = 0.7;
        let v = theta1(c(-0.5, 0.0), c(0.0, 2.0 * beta), &t).unwrap();
        let direct: f64 = (-50..50).map(|k: i64| (-(PI * beta / 2.0) * ((2 * k + 1) as f64).powi(2)).exp()).sum();
        assert!(v.im.abs() < 1e-15);
        assert!((v.re - direct).abs() < 1e-14 * direct);
    }

    #[test]
    fn heat_identity() {
        let t = Truncation::default();
        let args = ThetaArgs::new(0.5, 0.5, c(0.3, 0.0), c(0.2, 1.0)).unwrap();
        assert!(heat_identity_residual(&args, 1e-4, &t).unwrap() < 1e-6);
        let args0 = ThetaArgs::new(0.0, 0.0, c(0.0, 0.0), c(0.0, 1.0)).unwrap();
        assert!(heat_identity_residual(&args0, 1e-4, &t).unwrap() < 1e-6);
        let coarse = heat_identity_residual(&args, 1e-2, &t).unwrap();
        let fine = heat_identity_residual(&args, 1e-3, &t).unwrap();
        assert!(coarse / fine > 50.0, "{coarse} / {fine}");
        assert!(heat_identity_residual(&args, 2.0, &t).is_err());
    }

    #[test]
    fn rejects_lower_half_plane() {
        assert!(ThetaArgs::new(0.0, 0.0, c(0.0, 0.0), c(1.0, 0.0)).is_err());
        assert!(theta1(c(0.0, 0.0), c(0.0, -1.0), &Truncation::default()).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn odd_symmetry(zr in -2.0f64..2.0, zi in -0.5f64..0.5, tr in -1.0f64..1.0, ti in 0.3f64..3.0) {
                let t = Truncation::default();
                let z = c(zr, zi);
                let tau = c(tr, ti);
                let p = theta1(z, tau, &t).unwrap();
                let m = theta1(-z, tau, &t).unwrap();
                let scale = (PI * zi * zi / ti).exp().max(1.0);
                prop_assert!((p + m).norm() <= 1e-13 * scale);
            }
        }
    }
}
