use serde::{Deserialize, Serialize};

use super::ModelError;

/// Probabilities are clipped to `[PROB_CLIP, 1 - PROB_CLIP]` before `ln`.
pub const PROB_CLIP: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Confusion {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

impl Confusion {
    pub fn total(&self) -> usize {
        self.tp + self.fp + self.tn + self.fn_
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub cross_entropy: f64,
    pub confusion: Confusion,
    pub n: usize,
}

/// Mean binary cross-entropy with clipped probabilities.
pub fn binary_cross_entropy(y: &[bool], p: &[f64]) -> Result<f64, ModelError> {
    if y.len() != p.len() {
        return Err(ModelError::LengthMismatch {
            expected: y.len(),
            found: p.len(),
        });
    }
    if y.is_empty() {
        return Err(ModelError::Empty);
    }
    let sum: f64 = y
        .iter()
        .zip(p)
        .map(|(&t, &q)| {
            let q = q.clamp(PROB_CLIP, 1.0 - PROB_CLIP);
            if t {
                -q.ln()
            } else {
                -(1.0 - q).ln()
            }
        })
        .sum();
    Ok(sum / y.len() as f64)
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Scores probabilities at `threshold`; `p >= threshold` counts as positive.
pub fn compute_metrics(y: &[bool], p: &[f64], threshold: f64) -> Result<Metrics, ModelError> {
    let cross_entropy = binary_cross_entropy(y, p)?;
    let mut c = Confusion::default();
    for (&t, &q) in y.iter().zip(p) {
        match (q >= threshold, t) {
            (true, true) => c.tp += 1,
            (true, false) => c.fp += 1,
            (false, false) => c.tn += 1,
            (false, true) => c.fn_ += 1,
        }
    }
    let precision = ratio(c.tp, c.tp + c.fp);
    let recall = ratio(c.tp, c.tp + c.fn_);
    let f1 = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    Ok(Metrics {
        accuracy: ratio(c.tp + c.tn, y.len()),
        precision,
        recall,
        f1,
        cross_entropy,
        confusion: c,
        n: y.len(),
    })
}

impl Metrics {
    /// Field-wise mean; confusion counts and `n` are summed.
    pub fn mean(all: &[Metrics]) -> Option<Metrics> {
        if all.is_empty() {
            return None;
        }
        let k = all.len() as f64;
        let avg = |f: fn(&Metrics) -> f64| all.iter().map(f).sum::<f64>() / k;
        let mut confusion = Confusion::default();
        for m in all {
            confusion.tp += m.confusion.tp;
            confusion.fp += m.confusion.fp;
            confusion.tn += m.confusion.tn;
            confusion.fn_ += m.confusion.fn_;
        }
        Some(Metrics {
            accuracy: avg(|m| m.accuracy),
            precision: avg(|m| m.precision),
            recall: avg(|m| m.recall),
            f1: avg(|m| m.f1),
            cross_entropy: avg(|m| m.cross_entropy),
            confusion,
            n: all.iter().map(|m| m.n).sum(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn confident_and_correct() {
        let m = compute_metrics(&[true, false], &[0.99, 0.01], 0.5).unwrap();
        assert_eq!(m.accuracy, 1.0);
        let oracle = -(0.99f64.ln() + 0.99f64.ln()) / 2.0;
        assert!((m.cross_entropy - oracle).abs() < 1e-15);
        assert_eq!(m.f1, 1.0);
    }

    #[test]
    fn coin_flip_is_ln2() {
        let y = [true, false, true, true, false];
        let m = compute_metrics(&y, &[0.5; 5], 0.5).unwrap();
        assert!((m.cross_entropy - std::f64::consts::LN_2).abs() < 1e-12);
        // 0.5 counts as positive.
        assert_eq!(m.confusion.tp, 3);
        assert_eq!(m.confusion.fp, 2);
    }

    #[test]
    fn no_predicted_positives() {
        let m = compute_metrics(&[true, false], &[0.1, 0.2], 0.5).unwrap();
        assert_eq!(m.precision, 0.0);
        assert_eq!(m.f1, 0.0);
        assert_eq!(m.accuracy, 0.5);
    }

    #[test]
    fn clipping_keeps_ce_finite() {
        let ce = binary_cross_entropy(&[true], &[0.0]).unwrap();
        assert!((ce - -(PROB_CLIP.ln())).abs() < 1e-9);
        assert!(compute_metrics(&[true], &[0.1, 0.2], 0.5).is_err());
        assert!(compute_metrics(&[], &[], 0.5).is_err());
    }

    proptest! {
        #[test]
        fn confusion_sums_to_n(v in prop::collection::vec((any::<bool>(), 0.0f64..=1.0), 1..50)) {
            let (y, p): (Vec<bool>, Vec<f64>) = v.into_iter().unzip();
            let m = compute_metrics(&y, &p, 0.5).unwrap();
            prop_assert_eq!(m.confusion.total(), m.n);
            prop_assert_eq!(
                m.accuracy,
                (m.confusion.tp + m.confusion.tn) as f64 / m.n as f64
            );
            prop_assert!(m.cross_entropy >= 0.0);
        }
    }
}
