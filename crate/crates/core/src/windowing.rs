//! Sliding-window segmentation.

use crate::ingest::{ActivityLabel, Recording, TriadSeries};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SegmentError {
    #[error("recording has {len} samples, shorter than one window of {window} samples")]
    TooShort { len: usize, window: usize },
    #[error("window of {window_s} s at {sample_rate_hz} Hz is {samples} samples; need at least 2")]
    WindowTooSmall {
        window_s: f64,
        sample_rate_hz: f64,
        samples: usize,
    },
    #[error("overlap must be in [0, 1), got {0}")]
    BadOverlap(f64),
}

/// Window length and hop, in samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WindowGeometry {
    pub len: usize,
    pub step: usize,
}

impl WindowGeometry {
    pub fn new(window_s: f64, overlap_frac: f64, sample_rate_hz: f64) -> Result<Self, SegmentError> {
        if !(0.0..1.0).contains(&overlap_frac) {
            return Err(SegmentError::BadOverlap(overlap_frac));
        }
        let raw = (window_s * sample_rate_hz).round();
        let len = if raw.is_finite() && raw > 0.0 { raw as usize } else { 0 };
        if len < 2 {
            return Err(SegmentError::WindowTooSmall {
                window_s,
                sample_rate_hz,
                samples: len,
            });
        }
        let step = ((len as f64) * (1.0 - overlap_frac)).round().max(1.0) as usize;
        Ok(Self { len, step })
    }

    /// floor((n - len) / step) + 1, or 0 when the recording is too short.
    pub fn count(&self, n: usize) -> usize {
        if n < self.len {
            0
        } else {
            (n - self.len) / self.step + 1
        }
    }
}

/// A view into one fixed-length slice of a recording.
#[derive(Debug, Clone, Copy)]
pub struct Window<'a> {
    pub start: usize,
    pub end: usize,
    pub label: ActivityLabel,
    pub recording: &'a Recording,
}

impl<'a> Window<'a> {
    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end == self.start
    }

    pub fn axis(&self, triad: &'a TriadSeries, axis: usize) -> &'a [f64] {
        &triad.axes[axis][self.start..self.end]
    }

    pub fn labels(&self) -> &'a [ActivityLabel] {
        &self.recording.labels[self.start..self.end]
    }
}

/// Cut a recording into windows starting at 0, step, 2*step, ...; the
/// trailing partial window is dropped.
pub fn segment(rec: &Recording, window_s: f64, overlap_frac: f64) -> Result<Vec<Window<'_>>, SegmentError> {
    let geom = WindowGeometry::new(window_s, overlap_frac, rec.sample_rate_hz)?;
    segment_with(rec, geom)
}

pub fn segment_with(rec: &Recording, geom: WindowGeometry) -> Result<Vec<Window<'_>>, SegmentError> {
    let n = rec.len();
    if n < geom.len {
        return Err(SegmentError::TooShort { len: n, window: geom.len });
    }
    Ok((0..geom.count(n))
        .map(|i| {
            let start = i * geom.step;
            let end = start + geom.len;
            Window {
                start,
                end,
                label: window_label(&rec.labels[start..end]),
                recording: rec,
            }
        })
        .collect())
}

/// Majority vote. Ties prefer any real class over `Others`, then the earlier
/// class in Stand, Sit, Walk, Lie order.
pub fn window_label(labels: &[ActivityLabel]) -> ActivityLabel {
    let mut counts = [0usize; ActivityLabel::COUNT];
    for l in labels {
        counts[l.index()] += 1;
    }
    // ALL is already in tie-break order with Others last.
    let mut best = ActivityLabel::Others;
    let mut best_count = 0;
    for label in ActivityLabel::ALL {
        if counts[label.index()] > best_count {
            best = label;
            best_count = counts[label.index()];
        }
    }
    best
}
