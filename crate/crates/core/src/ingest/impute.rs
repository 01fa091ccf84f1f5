/// Fill missing samples (`NaN`).
///
/// Each maximal run of missing samples is replaced by one value, the mean of
/// the valid samples on either side. A leading run takes the first valid
/// value, a trailing run the last one. An all-missing series becomes zeros.
/// Valid samples are copied unchanged.
pub fn impute_missing(series: &[f64]) -> Vec<f64> {
    let mut out = series.to_vec();
    impute_in_place(&mut out);
    out
}

pub fn impute_in_place(series: &mut [f64]) {
    let n = series.len();
    let mut i = 0;
    let mut prev: Option<f64> = None;
    while i < n {
        if !series[i].is_nan() {
            prev = Some(series[i]);
            i += 1;
            continue;
        }
        let start = i;
        while i < n && series[i].is_nan() {
            i += 1;
        }
        let next = series.get(i).copied();
        let fill = match (prev, next) {
            (Some(a), Some(b)) => (a + b) / 2.0,
            (Some(a), None) => a,
            (None, Some(b)) => b,
            (None, None) => 0.0,
        };
        series[start..i].fill(fill);
    }
}
