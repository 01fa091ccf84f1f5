//! Brute-force reference implementations for the feature extractors.

use std::f64::consts::PI;

use har_pioneer::features::{
    axis_correlation, basic_stats, energy, entropy, fft_coefficients, jerk, mean_crossing_rate, peak_frequency,
    pitch_roll, sma, zero_crossing_rate,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

pub const LENGTHS: [usize; 3] = [16, 150, 151];
pub const WINDOWS_PER_LENGTH: usize = 1000;
pub const REL_TOL: f64 = 1e-9;
pub const SUM_TOL: f64 = 1e-12;
pub const FS: f64 = 30.0;

pub const EXTRACTORS: [&str; 15] = [
    "mean", "std", "var", "min", "max", "sma", "energy", "entropy", "zcr", "mcr", "fft_coeffs", "axis_corr",
    "pitch_roll", "jerk", "peak_freq",
];

/// Reverse-order sum, so the oracle does not share the extractor's rounding.
fn sum(x: &[f64]) -> f64 {
    x.iter().rev().sum()
}

fn o_mean(x: &[f64]) -> f64 {
    sum(x) / x.len() as f64
}

fn o_var(x: &[f64]) -> f64 {
    let m = o_mean(x);
    let sq: Vec<f64> = x.iter().map(|v| (v - m).powi(2)).collect();
    sum(&sq) / x.len() as f64
}

fn o_dft_mag(x: &[f64], m: usize) -> f64 {
    let n = x.len() as f64;
    let (mut re, mut im) = (0.0, 0.0);
    for (i, &v) in x.iter().enumerate() {
        let ang = -2.0 * PI * (m as f64) * (i as f64) / n;
        re += v * ang.cos();
        im += v * ang.sin();
    }
    re.hypot(im)
}

fn o_entropy(x: &[f64], bins: usize) -> f64 {
    let lo = x.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi == lo {
        return 0.0;
    }
    let w = (hi - lo) / bins as f64;
    let mut h = 0.0;
    for b in 0..bins {
        let left = lo + b as f64 * w;
        let right = lo + (b + 1) as f64 * w;
        let c = x
            .iter()
            .filter(|&&v| v >= left && (v < right || (b == bins - 1 && v <= hi)))
            .count();
        if c > 0 {
            let p = c as f64 / x.len() as f64;
            h -= p * p.log2();
        }
    }
    h / (bins as f64).log2()
}

fn o_crossings(x: &[f64]) -> f64 {
    let mut c = 0;
    for i in 0..x.len() - 1 {
        if (x[i] > 0.0 && x[i + 1] < 0.0) || (x[i] < 0.0 && x[i + 1] > 0.0) {
            c += 1;
        }
    }
    c as f64 / (x.len() - 1) as f64
}

fn o_corr(a: &[f64], b: &[f64]) -> f64 {
    let (ma, mb) = (o_mean(a), o_mean(b));
    let (mut cov, mut va, mut vb) = (0.0, 0.0, 0.0);
    for i in (0..a.len()).rev() {
        cov += (a[i] - ma) * (b[i] - mb);
        va += (a[i] - ma).powi(2);
        vb += (b[i] - mb).powi(2);
    }
    if va == 0.0 || vb == 0.0 {
        0.0
    } else {
        cov / (va * vb).sqrt()
    }
}

fn o_peak_bin(x: &[f64]) -> usize {
    let mut best = 1;
    let mut best_mag = -1.0;
    for m in 1..=x.len() / 2 {
        let mag = o_dft_mag(x, m);
        if mag > best_mag {
            best = m;
            best_mag = mag;
        }
    }
    best
}

/// Random test window: noise, tones, gravity offsets, or small integers
/// (exact zeros and repeated values).
pub fn random_window(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let normal = Normal::new(0.0, 1.0).unwrap();
    match rng.gen_range(0..4) {
        0 => (0..n).map(|_| normal.sample(rng) * rng.gen_range(0.1..100.0)).collect(),
        1 => {
            let bin = rng.gen_range(1..=n / 2) as f64;
            let amp = rng.gen_range(0.5..500.0);
            let off = rng.gen_range(-1000.0..1000.0);
            (0..n)
                .map(|i| off + amp * (2.0 * PI * bin * i as f64 / n as f64).sin() + 0.01 * amp * normal.sample(rng))
                .collect()
        }
        2 => {
            let g = rng.gen_range(-1000.0..1000.0);
            (0..n).map(|_| g + 30.0 * normal.sample(rng)).collect()
        }
        _ => (0..n).map(|_| rng.gen_range(-3..=3) as f64).collect(),
    }
}

/// |got - want| within `tol` relative to max(|want|, scale).
fn close(got: f64, want: f64, tol: f64, scale: f64) -> bool {
    (got - want).abs() <= tol * want.abs().max(scale).max(f64::MIN_POSITIVE)
}

fn mean_abs(x: &[f64]) -> f64 {
    x.iter().map(|v| v.abs()).sum::<f64>() / x.len() as f64
}

/// Check one extractor against its oracle on random windows of every test
/// length. Returns the number of windows checked.
pub fn check_extractor(name: &str, seed: u64) -> Result<usize, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checked = 0;
    for n in LENGTHS {
        for case in 0..WINDOWS_PER_LENGTH {
            let x = random_window(&mut rng, n);
            let y = random_window(&mut rng, n);
            let z = random_window(&mut rng, n);
            let fail = |got: f64, want: f64| Err(format!("{name}: n={n} case={case}: got {got}, oracle {want}"));
            let s = basic_stats(&x).unwrap();
            let scale = mean_abs(&x);
            match name {
                "mean" => {
                    let w = o_mean(&x);
                    if !close(s.mean, w, SUM_TOL, scale) {
                        return fail(s.mean, w);
                    }
                }
                "std" | "var" => {
                    let w = o_var(&x);
                    let (got, want) = if name == "var" { (s.var, w) } else { (s.std, w.sqrt()) };
                    if !close(got, want, REL_TOL, 0.0) {
                        return fail(got, want);
                    }
                }
                "min" | "max" => {
                    let mut sorted = x.clone();
                    sorted.sort_by(f64::total_cmp);
                    let (got, want) = if name == "min" { (s.min, sorted[0]) } else { (s.max, sorted[n - 1]) };
                    if got != want {
                        return fail(got, want);
                    }
                }
                "sma" => {
                    let got = sma(&x, &y, &z).unwrap();
                    let terms: Vec<f64> = (0..n).map(|i| x[i].abs() + y[i].abs() + z[i].abs()).collect();
                    let want = sum(&terms) / n as f64;
                    if !close(got, want, SUM_TOL, 0.0) {
                        return fail(got, want);
                    }
                }
                "energy" => {
                    let got = energy(&x).unwrap();
                    let sq: Vec<f64> = x.iter().map(|v| v * v).collect();
                    let want = sum(&sq) / n as f64;
                    if !close(got, want, SUM_TOL, 0.0) {
                        return fail(got, want);
                    }
                }
                "entropy" => {
                    let got = entropy(&x, 16).unwrap();
                    let want = o_entropy(&x, 16);
                    if !close(got, want, REL_TOL, 1.0) {
                        return fail(got, want);
                    }
                }
                "zcr" => {
                    let got = zero_crossing_rate(&x).unwrap();
                    let want = o_crossings(&x);
                    if got != want {
                        return fail(got, want);
                    }
                }
                "mcr" => {
                    let got = mean_crossing_rate(&x).unwrap();
                    let m = o_mean(&x);
                    let c: Vec<f64> = x.iter().map(|v| v - m).collect();
                    let want = o_crossings(&c);
                    if got != want {
                        return fail(got, want);
                    }
                }
                "fft_coeffs" => {
                    let got = fft_coefficients(&x, 5).unwrap();
                    // Near-zero bins are compared relative to the window's L1 norm.
                    let l1 = scale * n as f64;
                    for (m, g) in got.iter().enumerate() {
                        let want = o_dft_mag(&x, m + 1);
                        if !close(*g, want, REL_TOL, l1 * 1e-3) {
                            return fail(*g, want);
                        }
                    }
                }
                "axis_corr" => {
                    for (a, b) in [(&x, &y), (&x, &z), (&y, &z)] {
                        let got = axis_correlation(a, b).unwrap();
                        let want = o_corr(a, b);
                        if !close(got, want, REL_TOL, 1.0) {
                            return fail(got, want);
                        }
                    }
                }
                "pitch_roll" => {
                    let (p, r) = pitch_roll(&x, &y, &z).unwrap();
                    let (mx, my, mz) = (o_mean(&x), o_mean(&y), o_mean(&z));
                    let wp = (-mx).atan2((my * my + mz * mz).sqrt());
                    let wr = my.atan2(mz);
                    if !close(p, wp, REL_TOL, 1.0) {
                        return fail(p, wp);
                    }
                    if !close(r, wr, REL_TOL, 1.0) {
                        return fail(r, wr);
                    }
                }
                "jerk" => {
                    let got = jerk(&x, FS).unwrap();
                    let d: Vec<f64> = (1..n).map(|i| (x[i] - x[i - 1]).abs()).collect();
                    let want = sum(&d) / (n - 1) as f64 * FS;
                    if !close(got, want, SUM_TOL, 0.0) {
                        return fail(got, want);
                    }
                }
                "peak_freq" => {
                    let got = peak_frequency(&x, FS).unwrap();
                    let want = o_peak_bin(&x) as f64 * FS / n as f64;
                    if got != want {
                        // Accept only genuine numerical ties between the two bins.
                        let gb = (got * n as f64 / FS).round() as usize;
                        let wb = o_peak_bin(&x);
                        let (mg, mw) = (o_dft_mag(&x, gb), o_dft_mag(&x, wb));
                        if !close(mg, mw, REL_TOL, scale * n as f64) {
                            return fail(got, want);
                        }
                    }
                }
                other => return Err(format!("unknown extractor {other}")),
            }
            checked += 1;
        }
    }
    Ok(checked)
}
