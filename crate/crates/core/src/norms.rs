//! Scaled dual norms, their subgradients, and their extrema over the cost
//! uncertainty set.
//!
//! For a cost model with p-norm and diagonal scaling `Sigma`, the dual norm of
//! a weight vector is `|| Sigma^(-1/2) w ||_q` with 1/p + 1/q = 1: the largest
//! score change an agent can buy per unit of movement budget. It is
//! coordinatewise decreasing in each eigenvalue, so its extrema over an
//! eigenvalue box sit at the corners.

use crate::domain::{CostModel, CostUncertaintySet, DEFAULT_TOLERANCE};
use crate::error::{Error, Result};
use crate::util;

/// Dual-norm range over an uncertainty set: `min_val` at the all-hi corner,
/// `max_val` at the all-lo corner.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualNormExtrema {
    pub min_val: f64,
    pub max_val: f64,
}

fn check_dim(weights: &[f64], dim: usize) -> Result<()> {
    if weights.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: weights.len(),
        });
    }
    Ok(())
}

/// The scaled dual norm `|| Sigma^(-1/2) w ||_q`, i.e. the supremum of
/// `w . v` over all directions `v` of unit movement cost.
pub fn dual_norm(weights: &[f64], cost: &CostModel) -> Result<f64> {
    check_dim(weights, cost.dim())?;
    let ev = cost.eigenvalues();
    let transformed: Vec<f64> = weights.iter().zip(ev).map(|(w, e)| w / e.sqrt()).collect();
    Ok(util::p_norm(&transformed, cost.norm().q()))
}

/// A subgradient of `w -> || Sigma^(-1/2) w ||_q` at `weights`.
///
/// For 1 < q < inf this is the gradient wherever it exists; for q = inf ties
/// among maximal-magnitude coordinates break to the lowest index, and at
/// `weights = 0` the zero vector (a valid subdifferential element) is
/// returned so solver iterates stay finite at the all-zeros start.
pub fn dual_norm_subgradient(weights: &[f64], cost: &CostModel) -> Result<Vec<f64>> {
    check_dim(weights, cost.dim())?;
    let ev = cost.eigenvalues();
    let d = weights.len();
    let inv_sqrt: Vec<f64> = ev.iter().map(|e| 1.0 / e.sqrt()).collect();
    let transformed: Vec<f64> = weights.iter().zip(&inv_sqrt).map(|(w, s)| w * s).collect();
    let mut g = vec![0.0; d];
    subgradient_into(&transformed, &inv_sqrt, cost.norm().q(), &mut g);
    Ok(g)
}

/// Allocation-free core of [`dual_norm_subgradient`]: `transformed` is
/// `Sigma^(-1/2) w` and `inv_sqrt` the diagonal of `Sigma^(-1/2)`.
pub(crate) fn subgradient_into(transformed: &[f64], inv_sqrt: &[f64], q: f64, g: &mut [f64]) {
    let d = transformed.len();
    for x in g.iter_mut() {
        *x = 0.0;
    }
    if transformed.iter().all(|&wi| wi == 0.0) {
        return;
    }
    if q == 1.0 {
        for i in 0..d {
            if transformed[i] != 0.0 {
                g[i] = transformed[i].signum() * inv_sqrt[i];
            }
        }
    } else if q.is_infinite() {
        let mut arg = 0;
        for i in 1..d {
            if transformed[i].abs() > transformed[arg].abs() {
                arg = i;
            }
        }
        g[arg] = transformed[arg].signum() * inv_sqrt[arg];
    } else if q == 2.0 {
        let norm = util::p_norm(transformed, 2.0);
        for i in 0..d {
            g[i] = transformed[i] / norm * inv_sqrt[i];
        }
    } else {
        let norm = util::p_norm(transformed, q);
        for i in 0..d {
            if transformed[i] != 0.0 {
                let ratio = (transformed[i].abs() / norm).powf(q - 1.0);
                g[i] = transformed[i].signum() * ratio * inv_sqrt[i];
            }
        }
    }
}

/// Dual-norm extrema over the set: minimal at all-hi, maximal at all-lo.
pub fn dual_norm_extrema(weights: &[f64], set: &CostUncertaintySet) -> Result<DualNormExtrema> {
    check_dim(weights, set.dim())?;
    let min_val = dual_norm(weights, &set.cost_at_hi())?;
    let max_val = dual_norm(weights, &set.cost_at_lo())?;
    Ok(DualNormExtrema { min_val, max_val })
}

/// Finds a cost model inside the set whose dual norm at `weights` equals
/// `target_k`, by a greedy per-dimension sweep: start all eigenvalues at hi,
/// commit each dimension to lo while that still leaves the dual norm below
/// the target, and solve the single crossing eigenvalue in closed form.
///
/// The closed-form eigenvalue is clamped into its interval and the result is
/// verified by re-evaluation; a residual above 1e-7 (relative) is an error.
pub fn cost_achieving_dual_norm(
    weights: &[f64],
    set: &CostUncertaintySet,
    target_k: f64,
) -> Result<CostModel> {
    check_dim(weights, set.dim())?;
    let extrema = dual_norm_extrema(weights, set)?;
    let slack = DEFAULT_TOLERANCE * (1.0 + extrema.max_val.abs());
    if target_k < extrema.min_val - slack || target_k > extrema.max_val + slack {
        return Err(Error::TargetOutOfRange {
            target: target_k,
            min: extrema.min_val,
            max: extrema.max_val,
        });
    }
    let target = target_k.clamp(extrema.min_val, extrema.max_val);
    let q = set.norm().q();
    let d = set.dim();

    let mut ev = set.hi().to_vec();
    if target > extrema.min_val {
        for i in 0..d {
            let committed = ev[i];
            ev[i] = set.lo()[i];
            let switched = dual_norm(weights, &CostModel::new(*set.norm(), ev.clone())?)?;
            if switched < target {
                continue;
            }
            // The target is crossed inside dimension i's interval; solve the
            // scale sigma_i with the other dimensions held fixed.
            ev[i] = committed;
            let sigma = solve_crossing_scale(weights, &ev, i, target, q);
            ev[i] = (sigma * sigma).clamp(set.lo()[i], set.hi()[i]);
            break;
        }
    }

    let result = CostModel::new(*set.norm(), ev)?;
    let achieved = dual_norm(weights, &result)?;
    let residual = (achieved - target).abs();
    if residual > 1e-7 * target.abs().max(1.0) {
        return Err(Error::UnreachableTarget {
            target: target_k,
            residual,
        });
    }
    Ok(result)
}

/// Scale sigma_i such that the dual norm equals `target` with every other
/// dimension's contribution fixed at `ev` (dimension i excluded).
fn solve_crossing_scale(weights: &[f64], ev: &[f64], i: usize, target: f64, q: f64) -> f64 {
    let wi = weights[i].abs();
    if q.is_infinite() {
        // max_j |w_j|/sigma_j = target, rest already below target
        return wi / target;
    }
    if q == 1.0 {
        let mut rest = 0.0;
        for j in 0..weights.len() {
            if j != i {
                rest += weights[j].abs() / ev[j].sqrt();
            }
        }
        return wi / (target - rest);
    }
    // General q: factor out the target so the powers stay bounded by one.
    let mut ratio_sum = 0.0;
    for j in 0..weights.len() {
        if j != i {
            ratio_sum += ((weights[j].abs() / ev[j].sqrt()) / target).powf(q);
        }
    }
    let denom = target * (1.0 - ratio_sum).max(0.0).powf(1.0 / q);
    wi / denom
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::PNormSpec;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn cost(p: f64, ev: &[f64]) -> CostModel {
        CostModel::new(PNormSpec::new(p).unwrap(), ev.to_vec()).unwrap()
    }

    fn set(p: f64, lo: &[f64], hi: &[f64]) -> CostUncertaintySet {
        CostUncertaintySet::new(PNormSpec::new(p).unwrap(), lo.to_vec(), hi.to_vec()).unwrap()
    }

    #[test]
    fn dual_norm_examples() {
        assert_abs_diff_eq!(
            dual_norm(&[3.0, 4.0], &cost(2.0, &[1.0, 1.0])).unwrap(),
            5.0
        );
        assert_abs_diff_eq!(
            dual_norm(&[2.0, 1.0], &cost(2.0, &[4.0, 1.0])).unwrap(),
            2.0f64.sqrt()
        );
        assert_abs_diff_eq!(
            dual_norm(&[1.0, -2.0, 0.0], &cost(1.0, &[1.0, 1.0, 1.0])).unwrap(),
            2.0
        );
    }

    #[test]
    fn dual_norm_rejects_dimension_mismatch() {
        assert!(dual_norm(&[1.0], &cost(2.0, &[1.0, 1.0])).is_err());
        assert!(dual_norm_subgradient(&[1.0, 2.0, 3.0], &cost(2.0, &[1.0, 1.0])).is_err());
    }

    #[test]
    fn subgradient_examples() {
        let g = dual_norm_subgradient(&[3.0, 4.0], &cost(2.0, &[1.0, 1.0])).unwrap();
        assert_abs_diff_eq!(g[0], 0.6, epsilon = 1e-15);
        assert_abs_diff_eq!(g[1], 0.8, epsilon = 1e-15);

        let g = dual_norm_subgradient(&[0.0, 0.0], &cost(1.0, &[2.0, 3.0])).unwrap();
        assert_eq!(g, vec![0.0, 0.0]);
    }

    fn central_diff(weights: &[f64], c: &CostModel, h: f64) -> Vec<f64> {
        let mut g = vec![0.0; weights.len()];
        for i in 0..weights.len() {
            let mut hi = weights.to_vec();
            let mut lo = weights.to_vec();
            hi[i] += h;
            lo[i] -= h;
            g[i] = (dual_norm(&hi, c).unwrap() - dual_norm(&lo, c).unwrap()) / (2.0 * h);
        }
        g
    }

    #[test]
    fn subgradient_matches_finite_differences() {
        let c = cost(2.0, &[1.0, 4.0]);
        let g = dual_norm_subgradient(&[1.0, 2.0], &c).unwrap();
        let fd = central_diff(&[1.0, 2.0], &c, 1e-6);
        for i in 0..2 {
            assert_abs_diff_eq!(g[i], fd[i], epsilon = 1e-6);
        }
    }

    #[test]
    fn extrema_examples() {
        let e = dual_norm_extrema(&[1.0, 1.0], &set(2.0, &[1.0, 1.0], &[4.0, 4.0])).unwrap();
        assert_abs_diff_eq!(e.min_val, 0.5f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(e.max_val, 2.0f64.sqrt(), epsilon = 1e-15);

        let e = dual_norm_extrema(&[0.0, 0.0], &set(2.0, &[1.0, 1.0], &[4.0, 4.0])).unwrap();
        assert_eq!((e.min_val, e.max_val), (0.0, 0.0));

        let e = dual_norm_extrema(&[1.0], &set(2.0, &[0.25], &[4.0])).unwrap();
        assert_abs_diff_eq!(e.min_val, 0.5);
        assert_abs_diff_eq!(e.max_val, 2.0);
    }

    #[test]
    fn cost_achieving_examples() {
        let s = set(2.0, &[0.25], &[4.0]);
        let c = cost_achieving_dual_norm(&[1.0], &s, 2.0).unwrap();
        assert_abs_diff_eq!(c.eigenvalues()[0], 0.25, epsilon = 1e-12);

        let c = cost_achieving_dual_norm(&[1.0], &s, 1.0).unwrap();
        assert_abs_diff_eq!(c.eigenvalues()[0], 1.0, epsilon = 1e-9);

        let s2 = set(2.0, &[0.25, 0.25], &[4.0, 4.0]);
        let c = cost_achieving_dual_norm(&[1.0, 1.0], &s2, 1.5).unwrap();
        assert_abs_diff_eq!(dual_norm(&[1.0, 1.0], &c).unwrap(), 1.5, epsilon = 1e-9);
        for i in 0..2 {
            assert!(c.eigenvalues()[i] >= 0.25 && c.eigenvalues()[i] <= 4.0);
        }
    }

    #[test]
    fn cost_achieving_rejects_out_of_range() {
        let s = set(2.0, &[0.25], &[4.0]);
        assert!(matches!(
            cost_achieving_dual_norm(&[1.0], &s, 3.0),
            Err(Error::TargetOutOfRange { .. })
        ));
        assert!(matches!(
            cost_achieving_dual_norm(&[1.0], &s, 0.1),
            Err(Error::TargetOutOfRange { .. })
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(256))]

        #[test]
        fn homogeneity(
            w in proptest::collection::vec(-10.0f64..10.0, 1..5),
            t in -5.0f64..5.0,
            p in 1.0f64..4.0,
            e in proptest::collection::vec(0.1f64..10.0, 5),
        ) {
            let c = cost(p, &e[..w.len()]);
            let scaled: Vec<f64> = w.iter().map(|x| t * x).collect();
            let lhs = dual_norm(&scaled, &c).unwrap();
            let rhs = t.abs() * dual_norm(&w, &c).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + rhs));
        }

        #[test]
        fn monotone_decreasing_in_eigenvalues(
            w in proptest::collection::vec(-10.0f64..10.0, 1..5),
            p in 1.0f64..4.0,
            e in proptest::collection::vec(0.1f64..10.0, 5),
            bump in proptest::collection::vec(0.0f64..5.0, 5),
        ) {
            let d = w.len();
            let lo = cost(p, &e[..d]);
            let bigger: Vec<f64> = (0..d).map(|i| e[i] + bump[i]).collect();
            let hi = cost(p, &bigger);
            let n_lo = dual_norm(&w, &lo).unwrap();
            let n_hi = dual_norm(&w, &hi).unwrap();
            prop_assert!(n_hi <= n_lo + 1e-12 * (1.0 + n_lo));
        }

        #[test]
        fn subgradient_first_order_validity(
            w in proptest::collection::vec(-5.0f64..5.0, 2..5),
            w2 in proptest::collection::vec(-5.0f64..5.0, 5),
            pick in 0usize..3,
            e in proptest::collection::vec(0.2f64..5.0, 5),
        ) {
            let d = w.len();
            let p = [1.0, 2.0, f64::INFINITY][pick];
            let c = cost(p, &e[..d]);
            let g = dual_norm_subgradient(&w, &c).unwrap();
            let other = &w2[..d];
            let lhs = dual_norm(other, &c).unwrap();
            let mut rhs = dual_norm(&w, &c).unwrap();
            for i in 0..d {
                rhs += g[i] * (other[i] - w[i]);
            }
            prop_assert!(lhs >= rhs - 1e-9);
        }

        #[test]
        fn subgradient_finite_difference_general_q(
            w in proptest::collection::vec(0.5f64..5.0, 2..5),
            signs in proptest::collection::vec(proptest::bool::ANY, 5),
            p in 1.3f64..4.0,
            e in proptest::collection::vec(0.2f64..5.0, 5),
        ) {
            let d = w.len();
            let w: Vec<f64> = (0..d).map(|i| if signs[i] { w[i] } else { -w[i] }).collect();
            let c = cost(p, &e[..d]);
            let g = dual_norm_subgradient(&w, &c).unwrap();
            let fd = central_diff(&w, &c, 1e-6);
            for i in 0..d {
                prop_assert!((g[i] - fd[i]).abs() <= 1e-6 * (1.0 + g[i].abs()));
            }
        }

        #[test]
        fn cost_achieving_stays_in_box_and_reproduces_target(
            w in proptest::collection::vec(-5.0f64..5.0, 1..5),
            p in 1.0f64..4.0,
            lo in proptest::collection::vec(0.1f64..1.0, 5),
            width in proptest::collection::vec(0.0f64..5.0, 5),
            frac in 0.0f64..1.0,
        ) {
            let d = w.len();
            prop_assume!(w.iter().any(|x| x.abs() > 1e-3));
            let lo = &lo[..d];
            let hi: Vec<f64> = (0..d).map(|i| lo[i] + width[i]).collect();
            let s = CostUncertaintySet::new(PNormSpec::new(p).unwrap(), lo.to_vec(), hi).unwrap();
            let ex = dual_norm_extrema(&w, &s).unwrap();
            let target = ex.min_val + frac * (ex.max_val - ex.min_val);
            let c = cost_achieving_dual_norm(&w, &s, target).unwrap();
            for i in 0..d {
                prop_assert!(c.eigenvalues()[i] >= s.lo()[i] - 1e-12);
                prop_assert!(c.eigenvalues()[i] <= s.hi()[i] + 1e-12);
            }
            let achieved = dual_norm(&w, &c).unwrap();
            prop_assert!((achieved - target).abs() <= 1e-7 * target.abs().max(1.0));
        }
    }
}
