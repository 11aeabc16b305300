//! Rational agent best responses and the strategic loss family.
//!
//! An agent at `x` facing classifier `clf` moves only if that flips its
//! prediction from negative to positive and the movement cost stays strictly
//! below the utility of a positive prediction. The cheapest crossing uses the
//! direction that maximizes score gain per unit of movement budget, which is
//! read off the dual-norm subgradient; a point that moves lands exactly on the
//! decision boundary, and the boundary is classified positive (sign(0) = +1).

use crate::domain::{Classifier, CostModel, LabeledDataset, StrategicParams, DEFAULT_TOLERANCE};
use crate::error::{Error, Result};
use crate::norms::{dual_norm, dual_norm_subgradient};

/// Outcome of one simulated best response.
#[derive(Debug, Clone, PartialEq)]
pub struct ResponseOutcome {
    pub moved: bool,
    pub new_point: Vec<f64>,
    pub shift: Vec<f64>,
    pub score_before: f64,
    pub score_after: f64,
}

/// Simulates the best response of an agent at `x` to `clf` under `cost`.
///
/// With score `s` and budgeted score gain `K = u_star * dual_norm(w)`: a
/// nonnegative score never moves; a negative score moves onto the boundary
/// when the gap `-s` is within `K` (strictly, up to a relative tolerance, so
/// a move of exactly zero net utility does not happen); a larger gap is
/// unreachable and the agent stays put.
pub fn best_response(
    x: &[f64],
    clf: &Classifier,
    cost: &CostModel,
    params: &StrategicParams,
) -> Result<ResponseOutcome> {
    if x.len() != clf.dim() {
        return Err(Error::DimensionMismatch {
            expected: clf.dim(),
            got: x.len(),
        });
    }
    let s = clf.score(x);
    let k = params.u_star() * dual_norm(clf.weights(), cost)?;
    let gap = -s;
    let stay = ResponseOutcome {
        moved: false,
        new_point: x.to_vec(),
        shift: vec![0.0; x.len()],
        score_before: s,
        score_after: s,
    };
    if s >= 0.0 || k <= 0.0 {
        return Ok(stay);
    }
    if gap > k - DEFAULT_TOLERANCE * (1.0 + k.abs()) {
        return Ok(stay);
    }
    // Move along the unit-cost direction of maximal score gain; scaling by
    // gap / ||w||* lands the score exactly on the boundary.
    let norm = dual_norm(clf.weights(), cost)?;
    let g = dual_norm_subgradient(clf.weights(), cost)?;
    let scale = gap / norm;
    let shift: Vec<f64> = g.iter().map(|gi| gi * scale).collect();
    let new_point: Vec<f64> = x.iter().zip(&shift).map(|(xi, di)| xi + di).collect();
    Ok(ResponseOutcome {
        moved: true,
        new_point,
        shift,
        score_before: s,
        score_after: 0.0,
    })
}

fn check_label(y: f64) -> Result<()> {
    if y != 1.0 && y != -1.0 {
        return Err(Error::InvalidParameter(format!(
            "label must be -1 or +1, got {y}"
        )));
    }
    Ok(())
}

/// 0-1 loss after strategic response: simulate the move, then compare the
/// sign of the post-move score (sign(0) = +1) against the label.
pub fn strategic_01_loss(
    x: &[f64],
    y: f64,
    clf: &Classifier,
    cost: &CostModel,
    params: &StrategicParams,
) -> Result<f64> {
    check_label(y)?;
    let outcome = best_response(x, clf, cost, params)?;
    let pred = if outcome.score_after >= 0.0 {
        1.0
    } else {
        -1.0
    };
    Ok(if pred == y { 0.0 } else { 1.0 })
}

/// Hinge loss with the score shifted by an explicit scalar k.
pub fn k_shifted_hinge(x: &[f64], y: f64, clf: &Classifier, k: f64) -> Result<f64> {
    check_label(y)?;
    Ok((1.0 - y * (clf.score(x) + k)).max(0.0))
}

/// Mean strategic hinge risk at `cost`: the k-shifted hinge with
/// `k = u_star * dual_norm(w)`, plus `lambda * u_star * dual_norm(w)` when
/// `regularized`.
pub fn strategic_hinge_risk(
    data: &LabeledDataset,
    clf: &Classifier,
    cost: &CostModel,
    params: &StrategicParams,
    regularized: bool,
) -> Result<f64> {
    let norm = dual_norm(clf.weights(), cost)?;
    let k = params.u_star() * norm;
    let mut acc = 0.0;
    for i in 0..data.len() {
        acc += (1.0 - data.label(i) * (clf.score(data.row(i)) + k)).max(0.0);
    }
    let mut risk = acc / data.len() as f64;
    if regularized {
        risk += params.reg_lambda() * params.u_star() * norm;
    }
    Ok(risk)
}

/// Mean strategic 0-1 risk at `cost`.
pub fn strategic_01_risk(
    data: &LabeledDataset,
    clf: &Classifier,
    cost: &CostModel,
    params: &StrategicParams,
) -> Result<f64> {
    let mut acc = 0.0;
    for i in 0..data.len() {
        acc += strategic_01_loss(data.row(i), data.label(i), clf, cost, params)?;
    }
    Ok(acc / data.len() as f64)
}

/// Known-cost bias shift: the classifier with `b' = b - u_star * dual_norm(w)`
/// predicts on strategically moved points exactly what the original predicts
/// on unmoved ones.
pub fn shift_bias_for_known_cost(
    clf: &Classifier,
    cost: &CostModel,
    params: &StrategicParams,
) -> Result<Classifier> {
    let shift = params.u_star() * dual_norm(clf.weights(), cost)?;
    clf.with_bias(clf.bias() - shift)
}
