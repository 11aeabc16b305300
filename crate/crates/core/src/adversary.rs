//! Exact maximization of the (regularized) strategic hinge risk over the cost
//! uncertainty set for a fixed classifier, plus a brute-force oracle and the
//! plug-in generalization certificate.
//!
//! The risk depends on the cost only through the scalar dual norm k, and it is
//! piecewise linear in k: each sample contributes `max(0, y_i (v_i - u* k))`
//! with `v_i = y_i (1 - y_i score_i)`. Sorting the `v_i` once and sweeping the
//! breakpoints left to right updates the risk in O(1) per breakpoint, giving
//! the exact maximizer in O(nd + n ln n).

use crate::domain::{Classifier, CostModel, CostUncertaintySet, LabeledDataset, StrategicParams};
use crate::error::{Error, Result};
use crate::norms::{cost_achieving_dual_norm, dual_norm_extrema};
use crate::response::strategic_hinge_risk;

/// Result of the sweep: the maximizing dual-norm scalar, a cost inducing it,
/// and the maximal regularized risk.
#[derive(Debug, Clone)]
pub struct MaxLossResult {
    pub worst_cost: CostModel,
    pub k_star: f64,
    pub worst_risk: f64,
    pub breakpoints_visited: usize,
}

/// Exact maximizer of `k -> mean_i max(0, y_i (v_i - u* k)) + lambda u* k`
/// over the achievable dual-norm range. Risk ties break to the largest k.
pub fn max_loss_cost(
    data: &LabeledDataset,
    clf: &Classifier,
    set: &CostUncertaintySet,
    params: &StrategicParams,
) -> Result<MaxLossResult> {
    let extrema = dual_norm_extrema(clf.weights(), set)?;
    let (k_min, k_max) = (extrema.min_val, extrema.max_val);
    let u = params.u_star();

    if u == 0.0 {
        // Every k induces a zero shift and zero regularization; report the
        // plain regularized hinge at the all-hi cost.
        let worst_cost = set.cost_at_hi();
        let worst_risk = strategic_hinge_risk(data, clf, &worst_cost, params, true)?;
        return Ok(MaxLossResult {
            worst_cost,
            k_star: k_min,
            worst_risk,
            breakpoints_visited: 0,
        });
    }

    let n = data.len() as f64;
    let lambda = params.reg_lambda();
    // Work in shift space t = u* k.
    let t_min = u * k_min;
    let t_max = u * k_max;

    let mut v: Vec<(f64, f64)> = (0..data.len())
        .map(|i| {
            let y = data.label(i);
            (y * (1.0 - y * clf.score(data.row(i))), y)
        })
        .collect();
    v.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut total = 0.0;
    for &(vi, y) in &v {
        total += (y * (vi - t_min)).max(0.0);
    }
    let mut risk = total / n + lambda * t_min;

    let mut j = v.partition_point(|&(vi, _)| vi - t_min <= 0.0);
    let mut active_pos = v[j..].iter().filter(|&&(_, y)| y > 0.0).count() as f64;
    let mut active_neg = v[..j].iter().filter(|&&(_, y)| y < 0.0).count() as f64;

    let mut t = t_min;
    let mut best_risk = risk;
    let mut best_t = t;
    let mut visited = 0usize;

    while t < t_max && j < v.len() {
        let t_next = v[j].0.min(t_max);
        if t_next > t {
            risk += (t_next - t) * (lambda + (active_neg - active_pos) / n);
            t = t_next;
            if risk >= best_risk {
                best_risk = risk;
                best_t = t;
            }
        }
        if t >= t_max {
            break;
        }
        if v[j].1 > 0.0 {
            active_pos -= 1.0;
        } else {
            active_neg += 1.0;
        }
        j += 1;
        visited += 1;
    }
    if t < t_max {
        let end_risk = risk + (t_max - t) * (lambda + (active_neg - active_pos) / n);
        if end_risk >= best_risk {
            best_risk = end_risk;
            best_t = t_max;
        }
    }

    let (k_star, worst_cost) = if best_t == t_min {
        (k_min, set.cost_at_hi())
    } else if best_t == t_max {
        (k_max, set.cost_at_lo())
    } else {
        let k = best_t / u;
        (k, cost_achieving_dual_norm(clf.weights(), set, k)?)
    };

    Ok(MaxLossResult {
        worst_cost,
        k_star,
        worst_risk: best_risk,
        breakpoints_visited: visited,
    })
}

/// Brute-force oracle: evaluates the regularized k-shifted risk on a uniform
/// grid over the dual-norm range augmented with every interior breakpoint,
/// and returns the maximizing (k, risk). Ties break to the largest k.
pub fn brute_force_max_loss(
    data: &LabeledDataset,
    clf: &Classifier,
    set: &CostUncertaintySet,
    params: &StrategicParams,
    grid_size: usize,
) -> Result<(f64, f64)> {
    if grid_size < 2 {
        return Err(Error::InvalidParameter("grid_size must be >= 2".into()));
    }
    let extrema = dual_norm_extrema(clf.weights(), set)?;
    let (k_min, k_max) = (extrema.min_val, extrema.max_val);
    let u = params.u_star();
    let lambda = params.reg_lambda();

    let mut candidates: Vec<f64> = Vec::with_capacity(grid_size + data.len());
    if k_max == k_min {
        candidates.push(k_min);
    } else {
        for g in 0..grid_size {
            let frac = g as f64 / (grid_size - 1) as f64;
            candidates.push(k_min + frac * (k_max - k_min));
        }
        if u > 0.0 {
            for i in 0..data.len() {
                let y = data.label(i);
                let k = y * (1.0 - y * clf.score(data.row(i))) / u;
                if k > k_min && k < k_max {
                    candidates.push(k);
                }
            }
        }
        candidates.sort_by(|a, b| a.total_cmp(b));
    }

    let n = data.len() as f64;
    let mut best = (candidates[0], f64::NEG_INFINITY);
    for &k in &candidates {
        let shift = u * k;
        let mut risk = lambda * shift;
        for i in 0..data.len() {
            let y = data.label(i);
            risk += (1.0 - y * (clf.score(data.row(i)) + shift)).max(0.0) / n;
        }
        if risk >= best.1 {
            best = (k, risk);
        }
    }
    Ok(best)
}

/// The generalization slack `(B (4X + u*) + 3 sqrt(ln 1/delta)) / sqrt(n)`.
pub fn certificate_slack(
    b_bound: f64,
    x_max: f64,
    u_star: f64,
    confidence_delta: f64,
    n: usize,
) -> Result<f64> {
    if !(confidence_delta > 0.0 && confidence_delta < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "confidence_delta must lie in (0, 1), got {confidence_delta}"
        )));
    }
    if n < 1 {
        return Err(Error::EmptyDataset);
    }
    let numer = b_bound * (4.0 * x_max + u_star) + 3.0 * (1.0 / confidence_delta).ln().sqrt();
    Ok(numer / (n as f64).sqrt())
}

/// High-probability upper bound on the worst-case strategic 0-1 risk: the
/// worst-case unregularized empirical strategic hinge risk plus the
/// generalization slack. The regularization term is dropped before
/// maximizing; the bound applies to the plain hinge risk.
pub fn adversarial_risk_certificate(
    data: &LabeledDataset,
    clf: &Classifier,
    set: &CostUncertaintySet,
    params: &StrategicParams,
    confidence_delta: f64,
    b_bound: f64,
) -> Result<f64> {
    let unregularized = params.with_lambda(0.0)?;
    let worst = max_loss_cost(data, clf, set, &unregularized)?;
    let slack = certificate_slack(
        b_bound,
        data.x_max(set.norm()),
        params.u_star(),
        confidence_delta,
        data.len(),
    )?;
    Ok(worst.worst_risk + slack)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::PNormSpec;
    use approx::assert_abs_diff_eq;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn set(p: f64, lo: &[f64], hi: &[f64]) -> CostUncertaintySet {
        CostUncertaintySet::new(PNormSpec::new(p).unwrap(), lo.to_vec(), hi.to_vec()).unwrap()
    }

    fn params(u: f64, l: f64) -> StrategicParams {
        StrategicParams::new(u, l).unwrap()
    }

    #[test]
    fn two_point_example_exact() {
        let data = LabeledDataset::from_rows(&[(vec![0.5], -1.0), (vec![-0.5], 1.0)]).unwrap();
        let clf = Classifier::new(vec![1.0], 0.0).unwrap();
        let s = set(2.0, &[0.25], &[4.0]);
        let res = max_loss_cost(&data, &clf, &s, &params(1.0, 0.0)).unwrap();
        assert_abs_diff_eq!(res.k_star, 2.0);
        assert_abs_diff_eq!(res.worst_risk, 1.75);
        assert_abs_diff_eq!(res.worst_cost.eigenvalues()[0], 0.25);

        let (k, risk) = brute_force_max_loss(&data, &clf, &s, &params(1.0, 0.0), 10_000).unwrap();
        assert_abs_diff_eq!(k, 2.0, epsilon = 1e-9);
        assert_abs_diff_eq!(risk, 1.75, epsilon = 1e-9);
    }

    #[test]
    fn all_positive_far_inside_is_zero_risk() {
        let data =
            LabeledDataset::from_rows(&[(vec![10.0], 1.0), (vec![12.0], 1.0), (vec![11.0], 1.0)])
                .unwrap();
        let clf = Classifier::new(vec![1.0], 0.0).unwrap();
        let s = set(2.0, &[0.25], &[4.0]);
        let res = max_loss_cost(&data, &clf, &s, &params(1.0, 0.0)).unwrap();
        assert_eq!(res.worst_risk, 0.0);
        // flat risk ties break to the largest k
        assert_abs_diff_eq!(res.k_star, 2.0);
    }

    #[test]
    fn u_star_zero_degenerates_to_plain_hinge() {
        let data = LabeledDataset::from_rows(&[(vec![0.5], -1.0), (vec![-0.5], 1.0)]).unwrap();
        let clf = Classifier::new(vec![1.0], 0.0).unwrap();
        let s = set(2.0, &[0.25], &[4.0]);
        let res = max_loss_cost(&data, &clf, &s, &params(0.0, 0.5)).unwrap();
        assert_abs_diff_eq!(res.k_star, 0.5); // dual norm at all-hi
        assert_abs_diff_eq!(res.worst_risk, 1.5); // plain hinge mean
    }

    fn random_instance(
        rng: &mut ChaCha8Rng,
        lambda: f64,
    ) -> (
        LabeledDataset,
        Classifier,
        CostUncertaintySet,
        StrategicParams,
    ) {
        let d = rng.random_range(1..=5);
        let n = rng.random_range(1..=50);
        let rows: Vec<(Vec<f64>, f64)> = (0..n)
            .map(|_| {
                let x: Vec<f64> = (0..d).map(|_| rng.random::<f64>() * 6.0 - 3.0).collect();
                let y = if rng.random::<f64>() < 0.5 { 1.0 } else { -1.0 };
                (x, y)
            })
            .collect();
        let data = LabeledDataset::from_rows(&rows).unwrap();
        let w: Vec<f64> = (0..d).map(|_| rng.random::<f64>() * 4.0 - 2.0).collect();
        let clf = Classifier::new(w, rng.random::<f64>() - 0.5).unwrap();
        let p = [1.0, 2.0, 3.0, f64::INFINITY][rng.random_range(0..4)];
        let lo: Vec<f64> = (0..d).map(|_| 0.1 + rng.random::<f64>()).collect();
        let hi: Vec<f64> = lo.iter().map(|l| l + rng.random::<f64>() * 4.0).collect();
        let s = set(p, &lo, &hi);
        let u = 0.05 + rng.random::<f64>() * 1.5;
        (data, clf, s, params(u, lambda))
    }

    #[test]
    fn matches_brute_force_on_random_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for lambda in [0.0, 0.3, 1.0] {
            for _ in 0..50 {
                let (data, clf, s, p) = random_instance(&mut rng, lambda);
                let res = max_loss_cost(&data, &clf, &s, &p).unwrap();
                let (_, oracle) = brute_force_max_loss(&data, &clf, &s, &p, 512).unwrap();
                assert!(
                    res.worst_risk >= oracle - 1e-9,
                    "sweep {} under oracle {}",
                    res.worst_risk,
                    oracle
                );
                let recheck = strategic_hinge_risk(&data, &clf, &res.worst_cost, &p, true).unwrap();
                assert!(
                    (recheck - res.worst_risk).abs() <= 1e-7 * (1.0 + res.worst_risk.abs()),
                    "re-evaluation {} vs sweep {}",
                    recheck,
                    res.worst_risk
                );
            }
        }
    }

    #[test]
    fn maximizer_is_endpoint_or_breakpoint() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for _ in 0..50 {
            let (data, clf, s, p) = random_instance(&mut rng, 0.3);
            let res = max_loss_cost(&data, &clf, &s, &p).unwrap();
            let ex = dual_norm_extrema(clf.weights(), &s).unwrap();
            let mut hit =
                (res.k_star - ex.min_val).abs() <= 1e-9 || (res.k_star - ex.max_val).abs() <= 1e-9;
            for i in 0..data.len() {
                let y = data.label(i);
                let bp = y * (1.0 - y * clf.score(data.row(i))) / p.u_star();
                if (bp - res.k_star).abs() <= 1e-9 * (1.0 + bp.abs()) {
                    hit = true;
                }
            }
            assert!(
                hit,
                "k_star {} is neither endpoint nor breakpoint",
                res.k_star
            );
        }
    }

    #[test]
    fn k_star_nondecreasing_in_lambda() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..40 {
            let (data, clf, s, p0) = random_instance(&mut rng, 0.0);
            let mut last = f64::NEG_INFINITY;
            for lambda in [0.0, 0.3, 1.0] {
                let p = p0.with_lambda(lambda).unwrap();
                let res = max_loss_cost(&data, &clf, &s, &p).unwrap();
                assert!(res.k_star >= last - 1e-12);
                last = res.k_star;
            }
        }
    }

    #[test]
    fn certificate_hand_value() {
        let slack = certificate_slack(1.0, 1.0, 1.0, 0.05, 10_000).unwrap();
        let expect = (5.0 + 3.0 * 20.0f64.ln().sqrt()) / 100.0;
        assert_abs_diff_eq!(slack, expect, epsilon = 1e-15);
        assert_abs_diff_eq!(slack, 0.10192455147806856, epsilon = 1e-12);
    }

    #[test]
    fn certificate_limit_and_bounds() {
        // formula-only check at n = 10^8
        let slack = certificate_slack(1.0, 1.0, 0.0, 0.05, 100_000_000).unwrap();
        assert!(slack < 1e-3);
        assert!(certificate_slack(1.0, 1.0, 1.0, 1.0, 10).is_err());
        assert!(certificate_slack(1.0, 1.0, 1.0, 0.0, 10).is_err());

        let data = LabeledDataset::from_rows(&[(vec![0.5], -1.0), (vec![-0.5], 1.0)]).unwrap();
        let clf = Classifier::new(vec![1.0], 0.0).unwrap();
        let s = set(2.0, &[0.25], &[4.0]);
        assert!(
            adversarial_risk_certificate(&data, &clf, &s, &params(1.0, 0.0), 1.0, 1.0).is_err()
        );
        let cert =
            adversarial_risk_certificate(&data, &clf, &s, &params(1.0, 0.5), 0.05, 1.0).unwrap();
        // certificate drops the regularization before maximizing
        let worst = max_loss_cost(&data, &clf, &s, &params(1.0, 0.0)).unwrap();
        let slack = certificate_slack(1.0, data.x_max(s.norm()), 1.0, 0.05, 2).unwrap();
        assert_abs_diff_eq!(cert, worst.worst_risk + slack, epsilon = 1e-12);
    }

    #[test]
    fn grid_max_never_exceeds_breakpoint_augmented_max() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        for _ in 0..30 {
            let (data, clf, s, p) = random_instance(&mut rng, 0.3);
            let (_, coarse) = brute_force_max_loss(&data, &clf, &s, &p, 7).unwrap();
            let (_, fine) = brute_force_max_loss(&data, &clf, &s, &p, 4096).unwrap();
            let res = max_loss_cost(&data, &clf, &s, &p).unwrap();
            assert!(coarse <= res.worst_risk + 1e-9);
            assert!(fine <= res.worst_risk + 1e-9);
        }
    }
}
