use serde::{Deserialize, Serialize};

use super::ModelError;
use crate::ingest::ActivityLabel;

/// One value per class, serialized as a map in class order.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "PascalCase")]
pub struct PerClass {
    pub stand: f64,
    pub sit: f64,
    pub walk: f64,
    pub lie: f64,
    pub others: f64,
}

impl PerClass {
    pub fn from_array(v: [f64; 5]) -> Self {
        Self {
            stand: v[0],
            sit: v[1],
            walk: v[2],
            lie: v[3],
            others: v[4],
        }
    }

    pub fn to_array(self) -> [f64; 5] {
        [self.stand, self.sit, self.walk, self.lie, self.others]
    }

    pub fn get(&self, label: ActivityLabel) -> f64 {
        self.to_array()[label.index()]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub accuracy: f64,
    pub macro_f1: f64,
    pub per_class_f1: PerClass,
    /// Rows are truth, columns predictions, both in Stand, Sit, Walk, Lie, Others order.
    pub confusion: [[u64; 5]; 5],
    pub n_windows: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config_fingerprint: Option<String>,
}

impl EvaluationReport {
    pub fn from_confusion(confusion: [[u64; 5]; 5]) -> Self {
        let n: u64 = confusion.iter().flatten().sum();
        let trace: u64 = (0..5).map(|i| confusion[i][i]).sum();
        let mut f1 = [0.0; 5];
        for (c, f) in f1.iter_mut().enumerate() {
            let tp = confusion[c][c] as f64;
            let predicted: u64 = (0..5).map(|r| confusion[r][c]).sum();
            let actual: u64 = confusion[c].iter().sum();
            let precision = if predicted > 0 { tp / predicted as f64 } else { 0.0 };
            let recall = if actual > 0 { tp / actual as f64 } else { 0.0 };
            *f = if precision + recall > 0.0 {
                2.0 * precision * recall / (precision + recall)
            } else {
                0.0
            };
        }
        Self {
            accuracy: if n > 0 { trace as f64 / n as f64 } else { 0.0 },
            macro_f1: f1.iter().sum::<f64>() / 5.0,
            per_class_f1: PerClass::from_array(f1),
            confusion,
            n_windows: n,
            config_fingerprint: None,
        }
    }

    /// Truth counts per class (confusion row sums).
    pub fn support(&self) -> [u64; 5] {
        let mut s = [0; 5];
        for (i, row) in self.confusion.iter().enumerate() {
            s[i] = row.iter().sum();
        }
        s
    }

    /// "74.3% / 75.4%"
    pub fn headline(&self) -> String {
        format!("{:.1}% / {:.1}%", self.accuracy * 100.0, self.macro_f1 * 100.0)
    }
}

/// Compare predictions with ground truth.
///
/// Macro-F1 averages over all five classes; a class absent from both truth
/// and predictions contributes 0.
pub fn evaluate(pred: &[ActivityLabel], truth: &[ActivityLabel]) -> Result<EvaluationReport, ModelError> {
    if pred.len() != truth.len() {
        return Err(ModelError::LengthMismatch {
            predicted: pred.len(),
            truth: truth.len(),
        });
    }
    if pred.is_empty() {
        return Err(ModelError::Empty);
    }
    let mut confusion = [[0u64; 5]; 5];
    for (p, t) in pred.iter().zip(truth) {
        confusion[t.index()][p.index()] += 1;
    }
    Ok(EvaluationReport::from_confusion(confusion))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use ActivityLabel::*;

    #[test]
    fn perfect_predictions() {
        let t = [Stand, Sit, Walk, Lie, Others, Walk];
        let r = evaluate(&t, &t).unwrap();
        assert_eq!(r.accuracy, 1.0);
        assert_eq!(r.macro_f1, 1.0);
        assert_eq!(r.n_windows, 6);
    }

    #[test]
    fn swapped_predictions() {
        let r = evaluate(&[Walk, Stand], &[Stand, Walk]).unwrap();
        assert_eq!(r.accuracy, 0.0);
        assert_eq!(r.per_class_f1.stand, 0.0);
        assert_eq!(r.per_class_f1.walk, 0.0);
        assert_eq!(r.macro_f1, 0.0);
    }

    /// Ten windows worked out by hand:
    ///
    /// truth: St St St Si Si Wa Wa Wa Li Ot
    /// pred:  St St Si Si St Wa Wa St Li Wa
    ///
    /// Stand: tp 2, fp 2, fn 1 -> P 1/2, R 2/3, F1 4/7
    /// Sit:   tp 1, fp 1, fn 1 -> P 1/2, R 1/2, F1 1/2
    /// Walk:  tp 2, fp 1, fn 1 -> P 2/3, R 2/3, F1 2/3
    /// Lie:   tp 1 -> F1 1
    /// Others: tp 0 -> F1 0
    /// accuracy 6/10, macro (4/7 + 1/2 + 2/3 + 1 + 0) / 5 = 230/420
    #[test]
    fn hand_computed_case() {
        let truth = [Stand, Stand, Stand, Sit, Sit, Walk, Walk, Walk, Lie, Others];
        let pred = [Stand, Stand, Sit, Sit, Stand, Walk, Walk, Stand, Lie, Walk];
        let r = evaluate(&pred, &truth).unwrap();
        assert_eq!(
            r.confusion,
            [
                [2, 1, 0, 0, 0],
                [1, 1, 0, 0, 0],
                [1, 0, 2, 0, 0],
                [0, 0, 0, 1, 0],
                [0, 0, 1, 0, 0],
            ]
        );
        assert!((r.accuracy - 0.6).abs() < 1e-15);
        let expect = [4.0 / 7.0, 0.5, 2.0 / 3.0, 1.0, 0.0];
        for (a, b) in r.per_class_f1.to_array().iter().zip(expect) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
        assert!((r.macro_f1 - 230.0 / 420.0).abs() < 1e-12);
        assert_eq!(r.headline(), "60.0% / 54.8%");
    }

    #[test]
    fn error_paths() {
        assert!(matches!(evaluate(&[Stand], &[]), Err(ModelError::LengthMismatch { .. })));
        assert!(matches!(evaluate(&[], &[]), Err(ModelError::Empty)));
    }

    fn labels(n: usize) -> impl Strategy<Value = Vec<ActivityLabel>> {
        prop::collection::vec((0usize..5).prop_map(|i| ActivityLabel::from_index(i).unwrap()), n)
    }

    proptest! {
        #[test]
        fn accuracy_is_one_minus_hamming((p, t) in (1usize..200).prop_flat_map(|n| (labels(n), labels(n)))) {
            let r = evaluate(&p, &t).unwrap();
            let hamming = p.iter().zip(&t).filter(|(a, b)| a != b).count();
            prop_assert!((r.accuracy - (1.0 - hamming as f64 / p.len() as f64)).abs() < 1e-12);
            prop_assert_eq!(r.confusion.iter().flatten().sum::<u64>(), r.n_windows);
            let trace: u64 = (0..5).map(|i| r.confusion[i][i]).sum();
            prop_assert!((r.accuracy - trace as f64 / r.n_windows as f64).abs() < 1e-15);
            for label in ActivityLabel::ALL {
                let count = t.iter().filter(|&&x| x == label).count() as u64;
                prop_assert_eq!(r.support()[label.index()], count);
            }
            prop_assert!((0.0..=1.0).contains(&r.macro_f1));
        }

        #[test]
        fn json_round_trip_is_exact((p, t) in (1usize..200).prop_flat_map(|n| (labels(n), labels(n)))) {
            let r = evaluate(&p, &t).unwrap();
            let back: EvaluationReport = serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
            prop_assert_eq!(back, r);
        }
    }
}
