//! Randomized checks for window counts and gap imputation.

use har_pioneer::ingest::{impute_missing, ActivityLabel, Provenance, Recording};
use har_pioneer::windowing::segment;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn bare_recording(n: usize, fs: f64) -> Recording {
    Recording {
        sample_rate_hz: fs,
        timestamps: (0..n).map(|i| i as f64).collect(),
        locations: Vec::new(),
        labels: vec![ActivityLabel::Stand; n],
        provenance: Provenance::from_path("S1-ADL1.dat".as_ref()),
    }
}

/// Segment random lengths with random geometry and compare the count and
/// start positions with the closed form.
pub fn check_window_counts(seed: u64, cases: usize) -> Result<usize, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for case in 0..cases {
        let fs: f64 = [30.0, 32.0, 50.0, 64.0][rng.gen_range(0..4)];
        let window_s = rng.gen_range(0.5..6.0);
        let overlap = rng.gen_range(0.0..0.95);
        let w = (window_s * fs).round() as usize;
        if w < 2 {
            continue;
        }
        let step = ((w as f64 * (1.0 - overlap)).round() as usize).max(1);
        let n = rng.gen_range(w..w * 20);
        let rec = bare_recording(n, fs);
        let windows = segment(&rec, window_s, overlap).map_err(|e| format!("case {case}: {e}"))?;
        let expected = (n - w) / step + 1;
        if windows.len() != expected {
            return Err(format!("case {case}: N={n} W={w} step={step}: {} windows, expected {expected}", windows.len()));
        }
        for (k, win) in windows.iter().enumerate() {
            if win.start != k * step || win.end != k * step + w {
                return Err(format!("case {case}: window {k} spans {}..{}", win.start, win.end));
            }
        }
        if segment(&bare_recording(w - 1, fs), window_s, overlap).is_ok() {
            return Err(format!("case {case}: a recording shorter than one window was segmented"));
        }
    }
    Ok(cases)
}

/// Independent fill: each run of NaNs gets the mean of its finite neighbours.
fn oracle_impute(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut out = x.to_vec();
    let mut i = 0;
    while i < n {
        if !x[i].is_nan() {
            i += 1;
            continue;
        }
        let start = i;
        while i < n && x[i].is_nan() {
            i += 1;
        }
        let left = if start > 0 { Some(x[start - 1]) } else { None };
        let right = if i < n { Some(x[i]) } else { None };
        let fill = match (left, right) {
            (Some(a), Some(b)) => (a + b) / 2.0,
            (Some(a), None) => a,
            (None, Some(b)) => b,
            (None, None) => 0.0,
        };
        for v in &mut out[start..i] {
            *v = fill;
        }
    }
    out
}

pub fn check_impute(seed: u64, cases: usize) -> Result<usize, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for case in 0..cases {
        let n = rng.gen_range(0..200);
        let p_missing = [0.0, 0.05, 0.3, 0.8, 1.0][rng.gen_range(0..5)];
        let burst = rng.gen_range(1..10);
        let mut x = Vec::with_capacity(n);
        while x.len() < n {
            if rng.gen_bool(p_missing) {
                for _ in 0..burst.min(n - x.len()) {
                    x.push(f64::NAN);
                }
            } else {
                x.push(rng.gen_range(-1000.0..1000.0));
            }
        }
        let once = impute_missing(&x);
        let want = oracle_impute(&x);
        if once.len() != n || once.iter().zip(&want).any(|(a, b)| a.to_bits() != b.to_bits()) {
            return Err(format!("case {case}: imputed {once:?}, oracle {want:?}"));
        }
        let twice = impute_missing(&once);
        if twice.iter().zip(&once).any(|(a, b)| a.to_bits() != b.to_bits()) {
            return Err(format!("case {case}: not idempotent"));
        }
    }
    Ok(cases)
}
