//! Per-window feature extractors.
//!
//! All moments are population moments (divide by N). DFT magnitudes use the
//! unnormalized convention `X_m = sum_n x_n exp(-2 pi i m n / N)` with a
//! rectangular window and no zero-padding.

use std::cell::RefCell;
use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use super::FeatureError;

fn require(feature: &'static str, len: usize, min: usize) -> Result<(), FeatureError> {
    if len < min {
        Err(FeatureError::WindowTooShort { feature, len, min })
    } else {
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasicStats {
    pub mean: f64,
    pub std: f64,
    pub var: f64,
    pub min: f64,
    pub max: f64,
}

pub fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

pub fn basic_stats(x: &[f64]) -> Result<BasicStats, FeatureError> {
    require("basic_stats", x.len(), 1)?;
    let m = mean(x);
    let var = x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / x.len() as f64;
    let (min, max) = x
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    Ok(BasicStats {
        mean: m,
        std: var.sqrt(),
        var,
        min,
        max,
    })
}

/// Signal magnitude area: mean of |x|+|y|+|z|.
pub fn sma(x: &[f64], y: &[f64], z: &[f64]) -> Result<f64, FeatureError> {
    require("sma", x.len(), 1)?;
    if y.len() != x.len() || z.len() != x.len() {
        return Err(FeatureError::LengthMismatch);
    }
    let total: f64 = x
        .iter()
        .zip(y)
        .zip(z)
        .map(|((a, b), c)| a.abs() + b.abs() + c.abs())
        .sum();
    Ok(total / x.len() as f64)
}

pub fn energy(x: &[f64]) -> Result<f64, FeatureError> {
    require("energy", x.len(), 2)?;
    Ok(x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64)
}

/// Normalized Shannon entropy of the value histogram, in [0, 1].
pub fn entropy(x: &[f64], bins: usize) -> Result<f64, FeatureError> {
    require("entropy", x.len(), 2)?;
    if bins < 2 {
        return Err(FeatureError::BadParam {
            feature: "entropy",
            message: format!("bins must be at least 2, got {bins}"),
        });
    }
    let (lo, hi) = x
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    if hi <= lo {
        return Ok(0.0);
    }
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    for &v in x {
        let b = ((v - lo) / width) as usize;
        counts[b.min(bins - 1)] += 1;
    }
    let n = x.len() as f64;
    let h: f64 = counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum();
    Ok((h / (bins as f64).log2()).clamp(0.0, 1.0))
}

/// Fraction of consecutive pairs with a strict sign change.
pub fn zero_crossing_rate(x: &[f64]) -> Result<f64, FeatureError> {
    require("zcr", x.len(), 2)?;
    let crossings = x.windows(2).filter(|w| w[0] * w[1] < 0.0).count();
    Ok(crossings as f64 / (x.len() - 1) as f64)
}

pub fn mean_crossing_rate(x: &[f64]) -> Result<f64, FeatureError> {
    require("mcr", x.len(), 2)?;
    let m = mean(x);
    let centered: Vec<f64> = x.iter().map(|v| v - m).collect();
    zero_crossing_rate(&centered)
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(n: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_forward(n))
}

/// Magnitudes of DFT bins 0..=floor(N/2) of the mean-removed signal.
///
/// Removing the mean only changes bin 0, so bins 1.. equal those of `x`;
/// it keeps a constant window's spectrum at (numerically) zero.
fn half_spectrum(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let m = mean(x);
    let mut buf: Vec<Complex<f64>> = x.iter().map(|&v| Complex::new(v - m, 0.0)).collect();
    plan(n).process(&mut buf);
    buf[..=n / 2].iter().map(|c| c.norm()).collect()
}

/// Magnitudes of DFT bins 1..=k (DC excluded).
pub fn fft_coefficients(x: &[f64], k: usize) -> Result<Vec<f64>, FeatureError> {
    if k == 0 {
        return Err(FeatureError::BadParam {
            feature: "fft_coeffs",
            message: "k must be at least 1".into(),
        });
    }
    require("fft_coeffs", x.len(), 2 * k + 2)?;
    Ok(half_spectrum(x)[1..=k].to_vec())
}

/// Pick the strongest non-DC bin; bins within a relative 1e-9 of the maximum
/// count as tied and the lowest one wins.
pub fn peak_bin(magnitudes: &[f64], scale: f64) -> usize {
    let max = magnitudes[1..].iter().copied().fold(0.0, f64::max);
    let tol = 1e-9 * max.max(scale);
    (1..magnitudes.len())
        .find(|&m| magnitudes[m] >= max - tol)
        .unwrap_or(1)
}

/// Frequency in Hz of the strongest non-DC bin among 1..=floor(N/2).
pub fn peak_frequency(x: &[f64], sample_rate_hz: f64) -> Result<f64, FeatureError> {
    require("peak_freq", x.len(), 2)?;
    let spectrum = half_spectrum(x);
    let m = mean(x);
    // Upper bound of any bin magnitude; used to decide numerical ties.
    let scale = x.iter().map(|v| (v - m).abs()).sum::<f64>();
    let bin = peak_bin(&spectrum, scale);
    Ok(bin as f64 * sample_rate_hz / x.len() as f64)
}

/// Pearson correlation; 0 when either input is constant.
pub fn axis_correlation(a: &[f64], b: &[f64]) -> Result<f64, FeatureError> {
    require("axis_corr", a.len(), 2)?;
    if b.len() != a.len() {
        return Err(FeatureError::LengthMismatch);
    }
    let n = a.len() as f64;
    let (ma, mb) = (mean(a), mean(b));
    let mut cov = 0.0;
    let mut va = 0.0;
    let mut vb = 0.0;
    for (x, y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        cov += dx * dy;
        va += dx * dx;
        vb += dy * dy;
    }
    let (cov, sa, sb) = (cov / n, (va / n).sqrt(), (vb / n).sqrt());
    if sa == 0.0 || sb == 0.0 {
        return Ok(0.0);
    }
    Ok((cov / (sa * sb)).clamp(-1.0, 1.0))
}

/// Pitch and roll (radians) of the mean gravity vector of an accelerometer triad.
pub fn pitch_roll(x: &[f64], y: &[f64], z: &[f64]) -> Result<(f64, f64), FeatureError> {
    require("pitch_roll", x.len(), 2)?;
    if y.len() != x.len() || z.len() != x.len() {
        return Err(FeatureError::LengthMismatch);
    }
    let (mx, my, mz) = (mean(x), mean(y), mean(z));
    let pitch = (-mx).atan2((my * my + mz * mz).sqrt());
    let roll = my.atan2(mz);
    Ok((pitch, roll))
}

/// Mean absolute first difference, scaled to units per second.
pub fn jerk(x: &[f64], sample_rate_hz: f64) -> Result<f64, FeatureError> {
    require("jerk", x.len(), 2)?;
    let total: f64 = x.windows(2).map(|w| (w[1] - w[0]).abs()).sum();
    Ok(total / (x.len() - 1) as f64 * sample_rate_hz)
}
