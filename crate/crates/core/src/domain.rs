//! Shared domain types, their invariants, and the derived constants used by
//! every other module. All types are immutable after construction; violated
//! invariants fail at construction, never later.

use crate::error::{Error, Result};
use crate::util;

/// Default tolerance for equality-of-risk comparisons. All core computations
/// are sums of O(n) double-precision terms at desk scale.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// A linear classifier `sign(w . x + b)`. The bias is excluded from every
/// norm computation; norms always apply to the weight block alone.
#[derive(Debug, Clone, PartialEq)]
pub struct Classifier {
    weights: Vec<f64>,
    bias: f64,
}

impl Classifier {
    pub fn new(weights: Vec<f64>, bias: f64) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidParameter(
                "classifier needs at least one weight".into(),
            ));
        }
        if !bias.is_finite() || weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::InvalidParameter(
                "classifier weights and bias must be finite".into(),
            ));
        }
        Ok(Self { weights, bias })
    }

    /// All-zero classifier, the standard initialization of both solvers.
    pub fn zeros(dim: usize) -> Result<Self> {
        Self::new(vec![0.0; dim], 0.0)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    /// Raw score `w . x + b` before any strategic response.
    pub fn score(&self, x: &[f64]) -> f64 {
        util::dot(&self.weights, x) + self.bias
    }

    /// Same weights, different bias.
    pub fn with_bias(&self, bias: f64) -> Result<Self> {
        Self::new(self.weights.clone(), bias)
    }
}

/// A p-norm exponent together with its dual exponent q (1/p + 1/q = 1).
/// Both exponents are stored; `p = +inf` is the sentinel for the max-norm
/// and formulas branch on the three regimes p=1, 1<p<inf, p=inf.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PNormSpec {
    p: f64,
    q: f64,
}

impl PNormSpec {
    pub fn new(p: f64) -> Result<Self> {
        if !(p >= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "norm exponent must satisfy p >= 1, got {p}"
            )));
        }
        let q = if p == 1.0 {
            f64::INFINITY
        } else if p.is_infinite() {
            1.0
        } else {
            p / (p - 1.0)
        };
        Ok(Self { p, q })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// The primal norm of `v`.
    pub fn norm(&self, v: &[f64]) -> f64 {
        util::p_norm(v, self.p)
    }
}

/// A movement-cost model: a p-norm scaled per dimension by a positive
/// definite diagonal matrix, stored as its eigenvalue vector under the fixed
/// identity basis. Moving by `delta` costs (a non-decreasing transform of)
/// `|| Sigma^(1/2) delta ||_p`.
#[derive(Debug, Clone, PartialEq)]
pub struct CostModel {
    norm: PNormSpec,
    eigenvalues: Vec<f64>,
}

impl CostModel {
    pub fn new(norm: PNormSpec, eigenvalues: Vec<f64>) -> Result<Self> {
        if eigenvalues.is_empty() {
            return Err(Error::InvalidParameter(
                "cost model needs at least one eigenvalue".into(),
            ));
        }
        if eigenvalues.iter().any(|&e| !(e > 0.0) || !e.is_finite()) {
            return Err(Error::InvalidParameter(
                "cost eigenvalues must be strictly positive and finite".into(),
            ));
        }
        Ok(Self { norm, eigenvalues })
    }

    pub fn norm(&self) -> &PNormSpec {
        &self.norm
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }
}

/// Per-dimension eigenvalue intervals `[lo_i, hi_i]` defining the compact
/// convex family of cost models the adversary may pick from.
#[derive(Debug, Clone, PartialEq)]
pub struct CostUncertaintySet {
    norm: PNormSpec,
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl CostUncertaintySet {
    pub fn new(norm: PNormSpec, lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.is_empty() {
            return Err(Error::InvalidParameter(
                "uncertainty set needs at least one dimension".into(),
            ));
        }
        if lo.len() != hi.len() {
            return Err(Error::DimensionMismatch {
                expected: lo.len(),
                got: hi.len(),
            });
        }
        for i in 0..lo.len() {
            if !(lo[i] > 0.0) || !lo[i].is_finite() || !hi[i].is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "eigenvalue interval {i} must be positive and finite"
                )));
            }
            if lo[i] > hi[i] {
                return Err(Error::InvalidParameter(format!(
                    "eigenvalue interval {i} has lo {} > hi {}",
                    lo[i], hi[i]
                )));
            }
        }
        Ok(Self { norm, lo, hi })
    }

    /// Known-cost convenience: the degenerate set `{cost}`.
    pub fn singleton(cost: &CostModel) -> Result<Self> {
        Self::new(
            *cost.norm(),
            cost.eigenvalues().to_vec(),
            cost.eigenvalues().to_vec(),
        )
    }

    pub fn norm(&self) -> &PNormSpec {
        &self.norm
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    /// The cost at the all-lo corner, where every dual norm is maximal.
    pub fn cost_at_lo(&self) -> CostModel {
        CostModel::new(self.norm, self.lo.clone()).expect("validated at construction")
    }

    /// The cost at the all-hi corner, where every dual norm is minimal.
    pub fn cost_at_hi(&self) -> CostModel {
        CostModel::new(self.norm, self.hi.clone()).expect("validated at construction")
    }

    /// Diameter `max_i (1/lo_i - 1/hi_i)` of the inverse-eigenvalue box,
    /// which governs how fine the solver discretization must be.
    pub fn diameter(&self) -> f64 {
        let mut d = 0.0f64;
        for i in 0..self.lo.len() {
            d = d.max(1.0 / self.lo[i] - 1.0 / self.hi[i]);
        }
        d
    }
}

/// Strategic-response scalars: the maximal movement radius `u_star` whose
/// transformed cost stays within the utility of a positive prediction, and the
/// dual-norm regularization coefficient `reg_lambda`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrategicParams {
    u_star: f64,
    reg_lambda: f64,
}

impl StrategicParams {
    pub fn new(u_star: f64, reg_lambda: f64) -> Result<Self> {
        if !(u_star >= 0.0) || !u_star.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "u_star must be a finite nonnegative real, got {u_star}"
            )));
        }
        if !(reg_lambda >= 0.0) || !reg_lambda.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "reg_lambda must be a finite nonnegative real, got {reg_lambda}"
            )));
        }
        Ok(Self { u_star, reg_lambda })
    }

    pub fn u_star(&self) -> f64 {
        self.u_star
    }

    pub fn reg_lambda(&self) -> f64 {
        self.reg_lambda
    }

    pub fn with_lambda(&self, reg_lambda: f64) -> Result<Self> {
        Self::new(self.u_star, reg_lambda)
    }
}

/// A feature matrix with +/-1 labels. Row-major storage; norm maxima over the
/// rows are cached at construction for the `l1`, `l2` and `linf` norms, which
/// cover the dual-norm bound X for every p-norm regime (intermediate p falls
/// back to one pass over the rows).
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    features: Vec<f64>,
    labels: Vec<f64>,
    n: usize,
    d: usize,
    max_l1: f64,
    max_l2: f64,
    max_linf: f64,
}

impl LabeledDataset {
    pub fn new(features: Vec<f64>, labels: Vec<f64>, d: usize) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::EmptyDataset);
        }
        if d == 0 {
            return Err(Error::InvalidParameter(
                "feature dimension must be at least 1".into(),
            ));
        }
        if features.len() != labels.len() * d {
            return Err(Error::DimensionMismatch {
                expected: labels.len() * d,
                got: features.len(),
            });
        }
        if features.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter("features must be finite".into()));
        }
        for (i, &y) in labels.iter().enumerate() {
            if y != 1.0 && y != -1.0 {
                return Err(Error::InvalidParameter(format!(
                    "label {i} is {y}, expected -1 or +1"
                )));
            }
        }
        let n = labels.len();
        let (mut max_l1, mut max_l2, mut max_linf) = (0.0f64, 0.0f64, 0.0f64);
        for i in 0..n {
            let row = &features[i * d..(i + 1) * d];
            max_l1 = max_l1.max(util::p_norm(row, 1.0));
            max_l2 = max_l2.max(util::l2_norm(row));
            max_linf = max_linf.max(util::p_norm(row, f64::INFINITY));
        }
        Ok(Self {
            features,
            labels,
            n,
            d,
            max_l1,
            max_l2,
            max_linf,
        })
    }

    pub fn from_rows(rows: &[(Vec<f64>, f64)]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let d = rows[0].0.len();
        let mut features = Vec::with_capacity(rows.len() * d);
        let mut labels = Vec::with_capacity(rows.len());
        for (x, y) in rows {
            if x.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: x.len(),
                });
            }
            features.extend_from_slice(x);
            labels.push(*y);
        }
        Self::new(features, labels, d)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.d..(i + 1) * self.d]
    }

    pub fn label(&self, i: usize) -> f64 {
        self.labels[i]
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    /// Fraction of positively labeled samples, the convexity threshold for
    /// dual-norm regularization.
    pub fn positive_fraction(&self) -> f64 {
        self.labels.iter().filter(|&&y| y > 0.0).count() as f64 / self.n as f64
    }

    /// The norm bound X: the maximum over rows of max(||x||_p, ||x||_2).
    pub fn x_max(&self, norm: &PNormSpec) -> f64 {
        let p = norm.p();
        if p == 1.0 {
            // l1 >= l2 always
            self.max_l1
        } else if p >= 2.0 {
            // p-norm <= l2 for p >= 2
            self.max_l2
        } else {
            let mut m = self.max_l2;
            for i in 0..self.n {
                m = m.max(util::p_norm(self.row(i), p));
            }
            m
        }
    }
}

/// Solver configuration: iteration budget T, the dual-norm bound B, a step
/// multiplier on the theoretical rate, a seed for stochastic solvers, a
/// comparison tolerance, and whether iterates are radially projected onto the
/// B-ball (measured at the all-lo cost).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveConfig {
    pub iterations: usize,
    pub dual_norm_bound: f64,
    pub step_scale: f64,
    pub seed: u64,
    pub tolerance: f64,
    pub project_to_ball: bool,
}

impl SolveConfig {
    pub fn new(iterations: usize, dual_norm_bound: f64) -> Result<Self> {
        let cfg = Self {
            iterations,
            dual_norm_bound,
            step_scale: 1.0,
            seed: 0,
            tolerance: DEFAULT_TOLERANCE,
            project_to_ball: false,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.iterations < 1 {
            return Err(Error::InvalidParameter("iterations must be >= 1".into()));
        }
        if !(self.dual_norm_bound > 0.0) || !self.dual_norm_bound.is_finite() {
            return Err(Error::InvalidParameter(
                "dual_norm_bound must be positive and finite".into(),
            ));
        }
        if !(self.step_scale > 0.0) || !self.step_scale.is_finite() {
            return Err(Error::InvalidParameter(
                "step_scale must be positive and finite".into(),
            ));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::InvalidParameter("tolerance must be positive".into()));
        }
        Ok(())
    }

    pub fn with_step_scale(mut self, step_scale: f64) -> Self {
        self.step_scale = step_scale;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_projection(mut self, project: bool) -> Self {
        self.project_to_ball = project;
        self
    }
}

/// Lipschitz constants of the loss family: `L_star` for the dual norm itself
/// and `L = X + u_star (1 + lambda) L_star` for the regularized strategic
/// hinge subgradients. For p-norms `L_star = max(1, d^(1/2 - 1/p))`, which is
/// exactly 1 whenever p <= 2.
pub fn lipschitz_constants(
    norm: &PNormSpec,
    d: usize,
    params: &StrategicParams,
    x_max: f64,
) -> Result<(f64, f64)> {
    if d < 1 {
        return Err(Error::InvalidParameter("dimension must be >= 1".into()));
    }
    if !(x_max >= 0.0) || !x_max.is_finite() {
        return Err(Error::InvalidParameter(
            "x_max must be a finite nonnegative real".into(),
        ));
    }
    let exponent = 0.5 - 1.0 / norm.p();
    let l_star = 1.0f64.max((d as f64).powf(exponent));
    let l = x_max + params.u_star() * (1.0 + params.reg_lambda()) * l_star;
    Ok((l_star, l))
}
