//! Minimax solvers for the regularized worst-case strategic hinge objective,
//! plus the convexity diagnostics that justify dual-norm regularization.
//!
//! Two routes to the same saddle point:
//! - [`solve_subgradient`]: full-batch subgradient descent where each step
//!   first solves the inner maximization exactly and then follows a
//!   subgradient of the loss at that worst cost,
//! - [`solve_smda`]: stochastic mirror descent-ascent over a finite net of
//!   costs discretizing the diagonal of the inverse-eigenvalue box, with
//!   exponentiated-gradient updates on the simplex weights.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::adversary::{adversarial_risk_certificate, max_loss_cost};
use crate::data::standard_normal;
use crate::domain::{
    lipschitz_constants, Classifier, CostModel, CostUncertaintySet, LabeledDataset, PNormSpec,
    SolveConfig, StrategicParams,
};
use crate::error::{Error, Result};
use crate::norms::{dual_norm, dual_norm_subgradient};
use crate::util;

/// Confidence level used for the certificate attached to solve reports.
pub const DEFAULT_CONFIDENCE_DELTA: f64 = 0.05;

/// Floor on the discretization parameter, capping the net at 10^4 costs.
pub const EPSILON_MIN: f64 = 1e-4;

/// What a solver hands back: the classifier, its re-evaluated worst-case
/// empirical risk, the per-iteration risk (or surrogate) trace, and the
/// generalization certificate for the returned classifier.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub classifier: Classifier,
    pub worst_empirical_risk: f64,
    pub risk_trace: Vec<f64>,
    pub iterations_run: usize,
    pub certificate: f64,
}

/// Subgradient of the regularized strategic hinge risk at a fixed cost, with
/// the shift held at `u* dual_norm(w)`. A sample is active when its shifted
/// margin is strictly positive; margins exactly at the kink count as
/// inactive. The dual-norm term collects the active-sample chain rule plus
/// the regularizer: coefficient `((#active neg - #active pos)/n + lambda)`,
/// and the bias receives no dual-norm term.
pub fn hinge_subgradient_at_fixed_cost(
    data: &LabeledDataset,
    clf: &Classifier,
    cost: &CostModel,
    params: &StrategicParams,
) -> Result<(Vec<f64>, f64)> {
    let n = data.len() as f64;
    let k = params.u_star() * dual_norm(clf.weights(), cost)?;
    let d = clf.dim();
    let mut g_w = vec![0.0; d];
    let mut g_b = 0.0;
    let mut active_pos = 0usize;
    let mut active_neg = 0usize;
    for i in 0..data.len() {
        let y = data.label(i);
        let margin = 1.0 - y * (clf.score(data.row(i)) + k);
        if margin > 0.0 {
            let row = data.row(i);
            for j in 0..d {
                g_w[j] -= y * row[j];
            }
            g_b -= y;
            if y > 0.0 {
                active_pos += 1;
            } else {
                active_neg += 1;
            }
        }
    }
    for j in 0..d {
        g_w[j] /= n;
    }
    g_b /= n;
    let coeff = (active_neg as f64 - active_pos as f64) / n + params.reg_lambda();
    let sub = dual_norm_subgradient(clf.weights(), cost)?;
    for j in 0..d {
        g_w[j] += coeff * params.u_star() * sub[j];
    }
    Ok((g_w, g_b))
}

fn project_to_ball(clf: &mut Classifier, set: &CostUncertaintySet, bound: f64) -> Result<()> {
    let max_norm = dual_norm(clf.weights(), &set.cost_at_lo())?;
    if max_norm > bound {
        let scale = bound / max_norm;
        let weights: Vec<f64> = clf.weights().iter().map(|w| w * scale).collect();
        *clf = Classifier::new(weights, clf.bias())?;
    }
    Ok(())
}

/// Full-batch subgradient method on the worst-case regularized risk.
///
/// Starts at zero, steps `eta = step_scale * B / (L sqrt(T))` along the
/// subgradient at the exact inner maximizer, preconditions the weight block
/// by `Sigma_min = diag(lo)` (the bias has no cost eigenvalue and steps
/// unpreconditioned), and returns the iterate with the smallest worst-case
/// regularized risk.
pub fn solve_subgradient(
    data: &LabeledDataset,
    set: &CostUncertaintySet,
    params: &StrategicParams,
    cfg: &SolveConfig,
) -> Result<SolveReport> {
    cfg.validate()?;
    if data.dim() != set.dim() {
        return Err(Error::DimensionMismatch {
            expected: set.dim(),
            got: data.dim(),
        });
    }
    let tau_plus = data.positive_fraction();
    if params.reg_lambda() < tau_plus {
        eprintln!(
            "warning: reg_lambda {} below positive-class fraction {tau_plus}; \
             the objective may be non-convex",
            params.reg_lambda()
        );
    }

    let d = data.dim();
    let x_max = data.x_max(set.norm());
    let (_, l) = lipschitz_constants(set.norm(), d, params, x_max)?;
    let eta =
        cfg.step_scale * cfg.dual_norm_bound / (l.max(1e-12) * (cfg.iterations as f64).sqrt());

    let mut clf = Classifier::zeros(d)?;
    let mut best = clf.clone();
    let mut best_risk = f64::INFINITY;
    let mut trace = Vec::with_capacity(cfg.iterations);

    for t in 1..=cfg.iterations {
        let inner = max_loss_cost(data, &clf, set, params)?;
        trace.push(inner.worst_risk);
        if inner.worst_risk < best_risk {
            best_risk = inner.worst_risk;
            best = clf.clone();
        }
        let (g_w, g_b) = hinge_subgradient_at_fixed_cost(data, &clf, &inner.worst_cost, params)?;
        if !g_b.is_finite() || g_w.iter().any(|g| !g.is_finite()) {
            return Err(Error::SolverAbort {
                iteration: t,
                trace,
            });
        }
        let mut weights = clf.weights().to_vec();
        for j in 0..d {
            weights[j] -= eta * set.lo()[j] * g_w[j];
        }
        clf = Classifier::new(weights, clf.bias() - eta * g_b)?;
        if cfg.project_to_ball {
            project_to_ball(&mut clf, set, cfg.dual_norm_bound)?;
        }
    }

    let worst = max_loss_cost(data, &best, set, params)?;
    let certificate = adversarial_risk_certificate(
        data,
        &best,
        set,
        params,
        DEFAULT_CONFIDENCE_DELTA,
        cfg.dual_norm_bound,
    )?;
    Ok(SolveReport {
        classifier: best,
        worst_empirical_risk: worst.worst_risk,
        risk_trace: trace,
        iterations_run: cfg.iterations,
        certificate,
    })
}

/// The finite net of costs the stochastic solver maximizes over: cost k has
/// inverse-eigenvalue vector `hi^(-1) + k * v` with
/// `v_i = epsilon (1/lo_i - 1/hi_i)`, k = 1..ceil(1/epsilon), clamped into
/// the box. Dual norms are nondecreasing along the net.
#[derive(Debug, Clone)]
pub struct DiscretizedCostSet {
    pub costs: Vec<CostModel>,
    pub epsilon: f64,
    pub direction: Vec<f64>,
}

/// Builds the diagonal discretization. Without an explicit epsilon the
/// default is `ln T / (T max(D, ln T / T))` clamped into `[EPSILON_MIN, 1]`;
/// a zero-diameter set degenerates to a single cost.
pub fn build_discretization(
    set: &CostUncertaintySet,
    t_iterations: usize,
    explicit_epsilon: Option<f64>,
) -> Result<DiscretizedCostSet> {
    if t_iterations < 2 {
        return Err(Error::InvalidParameter(
            "discretization requires T >= 2".into(),
        ));
    }
    let diameter = set.diameter();
    let epsilon = if diameter == 0.0 {
        1.0
    } else if let Some(eps) = explicit_epsilon {
        if !(eps > 0.0 && eps <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "epsilon must lie in (0, 1], got {eps}"
            )));
        }
        eps
    } else {
        let t = t_iterations as f64;
        let raw = t.ln() / (t * diameter.max(t.ln() / t));
        raw.clamp(EPSILON_MIN, 1.0)
    };

    let d = set.dim();
    let direction: Vec<f64> = (0..d)
        .map(|i| epsilon * (1.0 / set.lo()[i] - 1.0 / set.hi()[i]))
        .collect();
    let count = (1.0 / epsilon).ceil() as usize;
    let mut costs = Vec::with_capacity(count);
    for k in 1..=count {
        let eigenvalues: Vec<f64> = (0..d)
            .map(|i| {
                let inv = (1.0 / set.hi()[i] + k as f64 * direction[i]).min(1.0 / set.lo()[i]);
                1.0 / inv
            })
            .collect();
        costs.push(CostModel::new(*set.norm(), eigenvalues)?);
    }
    Ok(DiscretizedCostSet {
        costs,
        epsilon,
        direction,
    })
}

/// Stream of minibatches feeding the stochastic solver. A finite dataset is
/// adapted by seeded with-replacement sampling; `full_dataset` exposes the
/// backing set for final evaluation when one exists.
pub trait MinibatchSource {
    fn draw(&mut self, size: usize) -> Result<LabeledDataset>;
    fn dim(&self) -> usize;
    fn x_max(&self, norm: &PNormSpec) -> f64;
    fn full_dataset(&self) -> Option<&LabeledDataset>;
}

/// Seeded with-replacement minibatch sampling from a finite dataset.
pub struct ReplacementSampler<'a> {
    data: &'a LabeledDataset,
    rng: ChaCha8Rng,
}

impl<'a> ReplacementSampler<'a> {
    pub fn new(data: &'a LabeledDataset, seed: u64) -> Self {
        Self {
            data,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }
}

impl MinibatchSource for ReplacementSampler<'_> {
    fn draw(&mut self, size: usize) -> Result<LabeledDataset> {
        if size == 0 {
            return Err(Error::EmptyDataset);
        }
        let mut rows = Vec::with_capacity(size);
        for _ in 0..size {
            let i = self.rng.random_range(0..self.data.len());
            rows.push((self.data.row(i).to_vec(), self.data.label(i)));
        }
        LabeledDataset::from_rows(&rows)
    }

    fn dim(&self) -> usize {
        self.data.dim()
    }

    fn x_max(&self, norm: &PNormSpec) -> f64 {
        self.data.x_max(norm)
    }

    fn full_dataset(&self) -> Option<&LabeledDataset> {
        Some(self.data)
    }
}

/// Knobs specific to the stochastic solver.
#[derive(Debug, Clone, Copy)]
pub struct SmdaOptions {
    pub batch_size: usize,
    pub explicit_epsilon: Option<f64>,
    /// Whether the simplex update scores each net cost by its regularized or
    /// plain batch risk.
    pub q_update_regularized: bool,
}

impl SmdaOptions {
    pub fn new(batch_size: usize) -> Self {
        Self {
            batch_size,
            explicit_epsilon: None,
            q_update_regularized: true,
        }
    }
}

/// Per-sample breakpoint view of a batch: sorted thresholds `v_i` with labels
/// and original row indices. A positive sample is hinge-active for shifts
/// below its threshold, a negative one above.
struct BatchSweep {
    // (threshold, label, row index), sorted ascending by threshold
    entries: Vec<(f64, f64, usize)>,
}

impl BatchSweep {
    fn new(batch: &LabeledDataset, clf: &Classifier) -> Self {
        let mut entries: Vec<(f64, f64, usize)> = (0..batch.len())
            .map(|i| {
                let y = batch.label(i);
                (y * (1.0 - y * clf.score(batch.row(i))), y, i)
            })
            .collect();
        entries.sort_by(|a, b| a.0.total_cmp(&b.0));
        Self { entries }
    }

    /// Risk at each shift of an ascending sequence, in one left-to-right
    /// sweep. `lambda` adds `lambda * shift` when regularized.
    fn risks(&self, shifts: &[f64], n: f64, lambda: Option<f64>) -> Vec<f64> {
        let reg = lambda.unwrap_or(0.0);
        let t0 = shifts[0];
        let mut total = 0.0;
        for &(v, y, _) in &self.entries {
            total += (y * (v - t0)).max(0.0);
        }
        let mut risk = total / n;
        let mut j = self.entries.partition_point(|&(v, _, _)| v - t0 <= 0.0);
        let mut slope_counts = self.slope_counts(j);
        let mut t = t0;
        let mut out = Vec::with_capacity(shifts.len());
        out.push(risk + reg * t0);
        for &target in &shifts[1..] {
            while j < self.entries.len() && self.entries[j].0 <= target {
                let v = self.entries[j].0;
                if v > t {
                    risk += (v - t) * slope_counts / n;
                    t = v;
                }
                slope_counts += 1.0;
                j += 1;
            }
            if target > t {
                risk += (target - t) * slope_counts / n;
                t = target;
            }
            out.push(risk + reg * target);
        }
        out
    }

    // net slope numerator (#active neg - #active pos) just right of the
    // current position, given the first unprocessed sorted index
    fn slope_counts(&self, j: usize) -> f64 {
        let active_pos = self.entries[j..]
            .iter()
            .filter(|&&(_, y, _)| y > 0.0)
            .count();
        let active_neg = self.entries[..j]
            .iter()
            .filter(|&&(_, y, _)| y < 0.0)
            .count();
        active_neg as f64 - active_pos as f64
    }

    /// q-weighted regularized subgradient over an ascending shift sequence:
    /// `sum_k q_k grad R^(c_k)(clf)` on this batch. Active-set sums are
    /// maintained incrementally; each breakpoint crossing adds the same
    /// `+row` increment whether a positive leaves or a negative enters.
    /// `transforms` holds the per-cost diagonal of `Sigma_k^(-1/2)`,
    /// flattened, so the inner loop allocates nothing.
    #[allow(clippy::too_many_arguments)]
    fn weighted_gradient(
        &self,
        batch: &LabeledDataset,
        clf: &Classifier,
        transforms: &[f64],
        q_exponent: f64,
        shifts: &[f64],
        q: &[f64],
        params: &StrategicParams,
        scratch: &mut GradScratch,
    ) -> (Vec<f64>, f64) {
        let d = clf.dim();
        let n = batch.len() as f64;
        let t0 = shifts[0];
        let mut sum_w = vec![0.0; d];
        let mut sum_b = 0.0;
        let mut active_pos = 0.0;
        let mut active_neg = 0.0;
        // the same crossed/uncrossed convention as the risk sweep: entries at
        // exactly t0 count as crossed, a valid subgradient choice at the kink
        for &(v, y, idx) in &self.entries {
            let active = if y > 0.0 { v > t0 } else { v <= t0 };
            if active {
                let row = batch.row(idx);
                for c in 0..d {
                    sum_w[c] -= y * row[c];
                }
                sum_b -= y;
                if y > 0.0 {
                    active_pos += 1.0;
                } else {
                    active_neg += 1.0;
                }
            }
        }
        let mut j = self.entries.partition_point(|&(v, _, _)| v - t0 <= 0.0);
        let mut g_w = vec![0.0; d];
        let mut g_b = 0.0;
        for (k, &target) in shifts.iter().enumerate() {
            while j < self.entries.len() && self.entries[j].0 <= target {
                let (_, y, idx) = self.entries[j];
                let row = batch.row(idx);
                for c in 0..d {
                    sum_w[c] += row[c];
                }
                sum_b += 1.0;
                if y > 0.0 {
                    active_pos -= 1.0;
                } else {
                    active_neg += 1.0;
                }
                j += 1;
            }
            let coeff = (active_neg - active_pos) / n + params.reg_lambda();
            let inv_sqrt = &transforms[k * d..(k + 1) * d];
            for c in 0..d {
                scratch.transformed[c] = clf.weights()[c] * inv_sqrt[c];
            }
            crate::norms::subgradient_into(
                &scratch.transformed,
                inv_sqrt,
                q_exponent,
                &mut scratch.subgradient,
            );
            let qk = q[k];
            for c in 0..d {
                g_w[c] += qk * (sum_w[c] / n + coeff * params.u_star() * scratch.subgradient[c]);
            }
            g_b += qk * sum_b / n;
        }
        (g_w, g_b)
    }
}

struct GradScratch {
    transformed: Vec<f64>,
    subgradient: Vec<f64>,
}

/// Stochastic mirror descent-ascent over the discretized cost net.
///
/// Per iteration: draw a batch, score every net cost's batch risk at the
/// current iterate, take an exponentiated-gradient ascent step on the simplex
/// weights (log-domain, so exponent overflow cannot occur), then descend
/// along the q-weighted regularized subgradient. Returns the uniform average
/// of the iterates.
pub fn solve_smda(
    source: &mut dyn MinibatchSource,
    set: &CostUncertaintySet,
    params: &StrategicParams,
    cfg: &SolveConfig,
    opts: &SmdaOptions,
) -> Result<SolveReport> {
    cfg.validate()?;
    if opts.batch_size < 1 {
        return Err(Error::InvalidParameter("batch_size must be >= 1".into()));
    }
    if cfg.iterations < 2 {
        return Err(Error::InvalidParameter("SMDA requires T >= 2".into()));
    }
    if source.dim() != set.dim() {
        return Err(Error::DimensionMismatch {
            expected: set.dim(),
            got: source.dim(),
        });
    }

    let d = set.dim();
    let t_total = cfg.iterations;
    let net = build_discretization(set, t_total, opts.explicit_epsilon)?;
    let n_costs = net.costs.len();
    let x_max = source.x_max(set.norm());
    let (_, l) = lipschitz_constants(set.norm(), d, params, x_max)?;
    let b = cfg.dual_norm_bound;
    let eta_beta = cfg.step_scale * b / (l.max(1e-12) * (t_total as f64).sqrt());
    let eta_q = if n_costs > 1 {
        cfg.step_scale * (2.0 * (n_costs as f64).ln() / t_total as f64).sqrt()
            / (1.0 + b * (x_max + params.u_star()))
    } else {
        0.0
    };

    // per-cost diagonal of Sigma^(-1/2), flattened, so the per-iteration
    // norm and subgradient evaluations allocate nothing
    let q_exponent = set.norm().q();
    let mut transforms = Vec::with_capacity(n_costs * d);
    for cost in &net.costs {
        for e in cost.eigenvalues() {
            transforms.push(1.0 / e.sqrt());
        }
    }

    let mut clf = Classifier::zeros(d)?;
    let mut log_q = vec![net.epsilon.ln(); n_costs];
    let mut q = vec![0.0; n_costs];
    let mut avg_w = vec![0.0; d];
    let mut avg_b = 0.0;
    let mut trace = Vec::with_capacity(t_total);
    let mut shifts = vec![0.0; n_costs];
    let mut scratch = GradScratch {
        transformed: vec![0.0; d],
        subgradient: vec![0.0; d],
    };

    for t in 1..=t_total {
        let batch = source.draw(opts.batch_size)?;
        if batch.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: batch.dim(),
            });
        }
        for k in 0..n_costs {
            for c in 0..d {
                scratch.transformed[c] = clf.weights()[c] * transforms[k * d + c];
            }
            shifts[k] = params.u_star() * crate::util::p_norm(&scratch.transformed, q_exponent);
        }
        let sweep = BatchSweep::new(&batch, &clf);
        // the regularizer lambda u* dual_norm equals lambda * shift, so the
        // sweep's linear coefficient is just lambda
        let reg = if opts.q_update_regularized {
            Some(params.reg_lambda())
        } else {
            None
        };
        let risks = sweep.risks(&shifts, batch.len() as f64, reg);

        let mut max_log = f64::NEG_INFINITY;
        for k in 0..n_costs {
            log_q[k] += eta_q * risks[k];
            max_log = max_log.max(log_q[k]);
        }
        let mut total = 0.0;
        for k in 0..n_costs {
            log_q[k] -= max_log;
            q[k] = log_q[k].exp();
            total += q[k];
        }
        for k in 0..n_costs {
            q[k] /= total;
        }
        debug_assert!((q.iter().sum::<f64>() - 1.0).abs() < 1e-12);

        let (g_w, g_b) = sweep.weighted_gradient(
            &batch,
            &clf,
            &transforms,
            q_exponent,
            &shifts,
            &q,
            params,
            &mut scratch,
        );
        if !g_b.is_finite() || g_w.iter().any(|g| !g.is_finite()) {
            return Err(Error::SolverAbort {
                iteration: t,
                trace,
            });
        }
        let mut weights = clf.weights().to_vec();
        for c in 0..d {
            weights[c] -= eta_beta * g_w[c];
        }
        clf = Classifier::new(weights, clf.bias() - eta_beta * g_b)?;
        if cfg.project_to_ball {
            project_to_ball(&mut clf, set, b)?;
        }
        for c in 0..d {
            avg_w[c] += clf.weights()[c];
        }
        avg_b += clf.bias();

        let mut worst_batch = f64::NEG_INFINITY;
        for &r in &risks {
            worst_batch = worst_batch.max(r);
        }
        trace.push(worst_batch);
    }

    let averaged = Classifier::new(
        avg_w.iter().map(|w| w / t_total as f64).collect(),
        avg_b / t_total as f64,
    )?;

    let owned_eval;
    let eval_data = match source.full_dataset() {
        Some(data) => data,
        None => {
            owned_eval = source.draw(opts.batch_size.max(1024))?;
            &owned_eval
        }
    };
    let worst = max_loss_cost(eval_data, &averaged, set, params)?;
    let certificate = adversarial_risk_certificate(
        eval_data,
        &averaged,
        set,
        params,
        DEFAULT_CONFIDENCE_DELTA,
        b,
    )?;
    Ok(SolveReport {
        classifier: averaged,
        worst_empirical_risk: worst.worst_risk,
        risk_trace: trace,
        iterations_run: t_total,
        certificate,
    })
}

/// Evidence from random midpoint probes of an objective over classifiers.
#[derive(Debug, Clone)]
pub struct ConvexityProbeReport {
    pub is_convex_evidence: bool,
    pub worst_violation: f64,
    pub witness: (Classifier, Classifier),
}

/// Samples classifier pairs uniformly in the ball of radius `domain_bound`
/// (weights and bias jointly) and checks midpoint convexity
/// `f((a+b)/2) <= (f(a)+f(b))/2 + 1e-9`, reporting the worst signed
/// violation and the pair attaining it.
pub fn midpoint_convexity_probe<F>(
    objective: F,
    dim: usize,
    domain_bound: f64,
    trials: usize,
    rng_seed: u64,
) -> Result<ConvexityProbeReport>
where
    F: Fn(&Classifier) -> f64,
{
    if trials < 1 {
        return Err(Error::InvalidParameter("trials must be >= 1".into()));
    }
    if dim < 1 || !(domain_bound > 0.0) {
        return Err(Error::InvalidParameter(
            "need dim >= 1 and a positive domain bound".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let sample = |rng: &mut ChaCha8Rng| -> Classifier {
        let mut v: Vec<f64> = (0..=dim).map(|_| standard_normal(rng)).collect();
        let norm = util::l2_norm(&v).max(1e-300);
        let radius = domain_bound * rng.random::<f64>().powf(1.0 / (dim + 1) as f64);
        for x in v.iter_mut() {
            *x *= radius / norm;
        }
        let bias = v.pop().expect("dim + 1 coordinates");
        Classifier::new(v, bias).expect("finite sample")
    };

    let mut worst = f64::NEG_INFINITY;
    let mut witness = (sample(&mut rng), sample(&mut rng));
    for _ in 0..trials {
        let a = sample(&mut rng);
        let b = sample(&mut rng);
        let mid_w: Vec<f64> = a
            .weights()
            .iter()
            .zip(b.weights())
            .map(|(x, y)| 0.5 * (x + y))
            .collect();
        let mid = Classifier::new(mid_w, 0.5 * (a.bias() + b.bias()))?;
        let violation = objective(&mid) - 0.5 * (objective(&a) + objective(&b));
        if violation > worst {
            worst = violation;
            witness = (a, b);
        }
    }
    Ok(ConvexityProbeReport {
        is_convex_evidence: worst <= 1e-9,
        worst_violation: worst,
        witness,
    })
}

/// Builds the construction showing that l2 regularization cannot convexify
/// the strategic hinge below coefficient `tau_plus / sigma_min`: a bounded
/// dataset with positive fraction close to `tau_plus`, and a classifier pair
/// straddling the smallest-eigenvalue direction at a bias where every
/// negative sample is hinge-inactive and every positive one sits in the
/// linear branch. Midpoint convexity fails between the pair for the
/// l2-regularized objective, and holds for the dual-norm-regularized one.
pub fn build_nonconvexity_witness(
    set_sigma: &CostModel,
    tau_plus: f64,
    u_star: f64,
) -> Result<(LabeledDataset, (Classifier, Classifier))> {
    let d = set_sigma.dim();
    if d < 2 {
        return Err(Error::InvalidParameter(
            "witness construction needs d >= 2".into(),
        ));
    }
    if !(tau_plus > 0.0 && tau_plus <= 1.0) {
        return Err(Error::InvalidParameter(
            "tau_plus must lie in (0, 1]".into(),
        ));
    }
    if !(u_star > 0.0) {
        return Err(Error::InvalidParameter(
            "witness construction needs u_star > 0".into(),
        ));
    }

    let ev = set_sigma.eigenvalues();
    let mut i_min = 0;
    for i in 1..d {
        if ev[i] < ev[i_min] {
            i_min = i;
        }
    }
    let mut i_base = usize::MAX;
    for i in 0..d {
        if i != i_min && (i_base == usize::MAX || ev[i] > ev[i_base]) {
            i_base = i;
        }
    }
    let sigma_min = ev[i_min].sqrt();

    let n = 40usize;
    let n_pos = ((tau_plus * n as f64).round() as usize).clamp(1, n);
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let x: Vec<f64> = (0..d)
            .map(|j| (((7 * i + 3 * j + 1) % 11) as f64 - 5.0) / 10.0)
            .collect();
        let y = if i < n_pos { 1.0 } else { -1.0 };
        rows.push((x, y));
    }
    let data = LabeledDataset::from_rows(&rows)?;
    let x_max = data.x_max(set_sigma.norm());

    let scale = 1e-3;
    let mut base = vec![0.0; d];
    base[i_base] = scale;
    let dual_base = dual_norm(&base, set_sigma)?;
    let margin = 0.5;
    let t = 0.5 * margin * (x_max + 1.0) / (x_max + u_star / sigma_min);
    let bias = -(1.0 + u_star * dual_base + margin * (x_max + 1.0) + scale * x_max);

    let mut w_a = base.clone();
    w_a[i_min] += t;
    let mut w_b = base;
    w_b[i_min] -= t;
    Ok((
        data,
        (Classifier::new(w_a, bias)?, Classifier::new(w_b, bias)?),
    ))
}
