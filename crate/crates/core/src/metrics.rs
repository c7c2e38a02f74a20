//! Confusion matrix and derived classification rates.

use alloc::vec;
use alloc::vec::Vec;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MetricsError {
    #[error("{predicted} predictions for {gold} gold labels")]
    LengthMismatch { predicted: usize, gold: usize },
    #[error("label {0} outside the class range")]
    LabelOutOfRange(usize),
    #[error("confusion matrix must be square")]
    NotSquare,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    /// `confusion[gold][predicted]`
    pub confusion: Vec<Vec<u64>>,
    pub total: u64,
    /// Trace over total; equals micro-averaged precision.
    pub accuracy: f64,
    /// `TP / (TP + FP)` per class, 0 where the class was never predicted.
    pub precision: Vec<f64>,
    pub precision_defined: Vec<bool>,
    /// `TP / (TP + FN)` per class, 0 where the class never occurs.
    pub recall: Vec<f64>,
    pub recall_defined: Vec<bool>,
    /// Unweighted mean of per-class precision.
    pub macro_precision: f64,
}

impl MetricsReport {
    /// Derives every rate from a square confusion matrix.
    pub fn from_confusion(confusion: Vec<Vec<u64>>) -> Result<Self, MetricsError> {
        let l = confusion.len();
        if confusion.iter().any(|r| r.len() != l) {
            return Err(MetricsError::NotSquare);
        }
        let total: u64 = confusion.iter().flatten().sum();
        let trace: u64 = (0..l).map(|i| confusion[i][i]).sum();
        let accuracy = if total == 0 { 0.0 } else { trace as f64 / total as f64 };
        let mut precision = vec![0.0; l];
        let mut precision_defined = vec![false; l];
        let mut recall = vec![0.0; l];
        let mut recall_defined = vec![false; l];
        for c in 0..l {
            let tp = confusion[c][c];
            let predicted: u64 = (0..l).map(|g| confusion[g][c]).sum();
            let actual: u64 = confusion[c].iter().sum();
            if predicted > 0 {
                precision[c] = tp as f64 / predicted as f64;
                precision_defined[c] = true;
            }
            if actual > 0 {
                recall[c] = tp as f64 / actual as f64;
                recall_defined[c] = true;
            }
        }
        let macro_precision = if l == 0 { 0.0 } else { precision.iter().sum::<f64>() / l as f64 };
        Ok(MetricsReport { confusion, total, accuracy, precision, precision_defined, recall, recall_defined, macro_precision })
    }

    pub fn classes(&self) -> usize {
        self.confusion.len()
    }

    pub fn micro_precision(&self) -> f64 {
        self.accuracy
    }
}

/// Scores aligned predictions against gold labels over `classes` classes.
pub fn evaluate(predicted: &[usize], gold: &[usize], classes: usize) -> Result<MetricsReport, MetricsError> {
    if predicted.len() != gold.len() {
        return Err(MetricsError::LengthMismatch { predicted: predicted.len(), gold: gold.len() });
    }
    let mut confusion = vec![vec![0u64; classes]; classes];
    for (&p, &g) in predicted.iter().zip(gold) {
        if p >= classes {
            return Err(MetricsError::LabelOutOfRange(p));
        }
        if g >= classes {
            return Err(MetricsError::LabelOutOfRange(g));
        }
        confusion[g][p] += 1;
    }
    MetricsReport::from_confusion(confusion)
}
