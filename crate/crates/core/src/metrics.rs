//! Edge-level scores of a predicted graph against ground truth. Only the
//! `d (d - 1)` off-diagonal slots are counted; "edge present" is the positive class.

use serde::{Deserialize, Serialize};

use crate::discovery::CausalGraph;
use crate::error::{Error, Result};
use crate::synth::GroundTruth;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// True negative rate, `tn / (tn + fp)`.
    pub tnr: f64,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Confusion counts and ratios; every `0/0` ratio is reported as 0, except
/// TNR, which is 1 when there are no negatives to misclassify.
pub fn evaluate_adjacency(predicted: &[Vec<bool>], truth: &[Vec<bool>]) -> Result<EvalReport> {
    let d = truth.len();
    if predicted.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: predicted.len(),
        });
    }
    for row in predicted.iter().chain(truth) {
        if row.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: row.len(),
            });
        }
    }
    let (mut tp, mut fp, mut tn, mut fn_) = (0, 0, 0, 0);
    for i in 0..d {
        for j in 0..d {
            if i == j {
                continue;
            }
            match (predicted[i][j], truth[i][j]) {
                (true, true) => tp += 1,
                (true, false) => fp += 1,
                (false, false) => tn += 1,
                (false, true) => fn_ += 1,
            }
        }
    }
    let negatives = tn + fp;
    Ok(EvalReport {
        tp,
        fp,
        tn,
        fn_,
        precision: ratio(tp, tp + fp),
        recall: ratio(tp, tp + fn_),
        f1: ratio(2 * tp, 2 * tp + fp + fn_),
        tnr: if negatives == 0 { 1.0 } else { ratio(tn, negatives) },
    })
}

pub fn evaluate(predicted: &CausalGraph, truth: &GroundTruth) -> Result<EvalReport> {
    evaluate_adjacency(&predicted.adjacency, &truth.adjacency)
}
