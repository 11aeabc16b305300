//! Hardness constructions and closed-form risk analysis: how badly a
//! classifier tuned to the wrong cost can fail.
//!
//! The two-plane distribution places the classes on parallel hyperplanes
//! spaced so that the zero-error bias bands under two different costs are
//! disjoint; the Gaussian setup admits a closed-form excess risk for the
//! strategic optimum under a misspecified cost, verified here by Monte Carlo.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::data::{standard_normal, RngSpec};
use crate::domain::{Classifier, CostModel, PNormSpec, StrategicParams, DEFAULT_TOLERANCE};
use crate::error::{Error, Result};
use crate::norms::dual_norm;
use crate::response::strategic_01_loss;
use crate::util;

/// Two thickened parallel planes: negatives at `beta_star . x = -r`,
/// positives at `+r`, mixed with positive-class mass `eps_mix`. The offset r
/// is sized from the dual-norm gap of the two costs so that no single bias
/// can be strategically correct under both.
#[derive(Debug, Clone)]
pub struct TwoPlaneDistribution {
    pub beta_star: Vec<f64>,
    pub r: f64,
    pub eps_mix: f64,
    pub thickness: f64,
    norm: PNormSpec,
    b_bound: f64,
}

impl TwoPlaneDistribution {
    pub fn norm(&self) -> &PNormSpec {
        &self.norm
    }

    pub fn b_bound(&self) -> f64 {
        self.b_bound
    }
}

/// Builds the adversarial two-plane distribution for a pair of costs whose
/// dual norms at `beta_star` differ. The plane offset is
/// `r = u* ||beta_star|| |n1 - n2| / (3 B)` (roles swapped if needed so
/// r > 0), and the slab thickness is 0.01 r.
pub fn build_two_plane(
    c1: &CostModel,
    c2: &CostModel,
    eps_mix: f64,
    b_bound: f64,
    params: &StrategicParams,
    beta_star: &[f64],
) -> Result<TwoPlaneDistribution> {
    if c1.norm() != c2.norm() {
        return Err(Error::InvalidParameter(
            "the two costs must share the same p-norm".into(),
        ));
    }
    if !(0.0..=0.5).contains(&eps_mix) {
        return Err(Error::InvalidParameter(
            "eps_mix must lie in [0, 1/2]".into(),
        ));
    }
    if !(b_bound > 0.0) {
        return Err(Error::InvalidParameter("B must be positive".into()));
    }
    let n1 = dual_norm(beta_star, c1)?;
    let n2 = dual_norm(beta_star, c2)?;
    let gap = (n1 - n2).abs();
    if gap <= DEFAULT_TOLERANCE * (1.0 + n1.max(n2)) {
        return Err(Error::InvalidParameter(
            "costs induce equal dual norms; the construction is undefined".into(),
        ));
    }
    let primal = c1.norm().norm(beta_star);
    if primal == 0.0 {
        return Err(Error::InvalidParameter("beta_star must be nonzero".into()));
    }
    let r = params.u_star() * primal * gap / (3.0 * b_bound);
    Ok(TwoPlaneDistribution {
        beta_star: beta_star.to_vec(),
        r,
        eps_mix,
        thickness: 0.01 * r,
        norm: *c1.norm(),
        b_bound,
    })
}

/// The half-open interval of biases for which `alpha * beta_star` achieves
/// zero strategic error on the distribution under `cost`: centered at
/// `-alpha u* ||beta_star||*` with half-width `alpha (r - thickness/2)`.
pub fn zero_error_band(
    dist: &TwoPlaneDistribution,
    cost: &CostModel,
    params: &StrategicParams,
    alpha: f64,
) -> Result<(f64, f64)> {
    let primal = dist.norm.norm(&dist.beta_star);
    let alpha_max = dist.b_bound / primal;
    if !(alpha > 0.0) || alpha > alpha_max * (1.0 + DEFAULT_TOLERANCE) {
        return Err(Error::InvalidParameter(format!(
            "alpha must lie in (0, {alpha_max}], got {alpha}"
        )));
    }
    let center = -alpha * params.u_star() * dual_norm(&dist.beta_star, cost)?;
    let half = alpha * (dist.r - dist.thickness / 2.0);
    Ok((center - half, center + half))
}

/// Symmetric Gaussian class pair `x | y ~ N(y mu0, sigma^2 I)` together with
/// the true and assumed costs.
#[derive(Debug, Clone)]
pub struct GaussianSetup {
    pub mu0: Vec<f64>,
    pub sigma_sq: f64,
    pub true_cost: CostModel,
    pub assumed_cost: CostModel,
    pub u_star: f64,
}

impl GaussianSetup {
    pub fn new(
        mu0: Vec<f64>,
        sigma_sq: f64,
        true_cost: CostModel,
        assumed_cost: CostModel,
        u_star: f64,
    ) -> Result<Self> {
        if !(sigma_sq > 0.0) {
            return Err(Error::InvalidParameter("sigma_sq must be positive".into()));
        }
        if mu0.len() != true_cost.dim() || mu0.len() != assumed_cost.dim() {
            return Err(Error::DimensionMismatch {
                expected: mu0.len(),
                got: true_cost.dim().min(assumed_cost.dim()),
            });
        }
        if !(u_star >= 0.0) {
            return Err(Error::InvalidParameter("u_star must be nonnegative".into()));
        }
        Ok(Self {
            mu0,
            sigma_sq,
            true_cost,
            assumed_cost,
            u_star,
        })
    }
}

/// Standard normal CDF via the complementary error function; absolute error
/// below 1e-12 over the whole line.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

/// Closed-form excess strategic 0-1 risk of the classifier optimized under
/// the assumed cost instead of the true one:
/// `Phi(m/s) - (Phi((m-e)/s) + Phi((m+e)/s)) / 2` with `m = ||mu0||_2`,
/// `s = sigma`, and `e = u* |dual(mu0, assumed) - dual(mu0, true)| / m`.
pub fn gaussian_excess_risk(setup: &GaussianSetup) -> Result<f64> {
    let m = util::l2_norm(&setup.mu0);
    if m == 0.0 {
        return Err(Error::InvalidParameter(
            "mu0 = 0 leaves the excess-risk shift undefined".into(),
        ));
    }
    let d_true = dual_norm(&setup.mu0, &setup.true_cost)?;
    let d_assumed = dual_norm(&setup.mu0, &setup.assumed_cost)?;
    let eps = setup.u_star * (d_assumed - d_true).abs() / m;
    let sigma = setup.sigma_sq.sqrt();
    Ok(normal_cdf(m / sigma)
        - 0.5 * (normal_cdf((m - eps) / sigma) + normal_cdf((m + eps) / sigma)))
}

/// Monte Carlo verification of the closed form: simulates the strategic 0-1
/// risks of the two population optima (weights `2 mu0`, biases
/// `-2 u* dual(mu0, .)` under the assumed and true costs) on the same draws
/// from the mixture, under the true cost, and returns the paired difference
/// with its standard error.
pub fn monte_carlo_excess_risk(
    setup: &GaussianSetup,
    n_samples: usize,
    rng: RngSpec,
) -> Result<(f64, f64)> {
    if n_samples < 1000 {
        return Err(Error::InvalidParameter(
            "need at least 1000 Monte Carlo samples".into(),
        ));
    }
    let d = setup.mu0.len();
    let weights: Vec<f64> = setup.mu0.iter().map(|m| 2.0 * m).collect();
    let d_true = dual_norm(&setup.mu0, &setup.true_cost)?;
    let d_assumed = dual_norm(&setup.mu0, &setup.assumed_cost)?;
    let clf_assumed = Classifier::new(weights.clone(), -2.0 * setup.u_star * d_assumed)?;
    let clf_true = Classifier::new(weights, -2.0 * setup.u_star * d_true)?;
    let params = StrategicParams::new(setup.u_star, 0.0)?;
    let sigma = setup.sigma_sq.sqrt();

    let mut gen = rng.rng();
    let mut x = vec![0.0; d];
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..n_samples {
        let y = if gen.random::<f64>() < 0.5 { 1.0 } else { -1.0 };
        for j in 0..d {
            x[j] = y * setup.mu0[j] + sigma * standard_normal(&mut gen);
        }
        let loss_assumed = strategic_01_loss(&x, y, &clf_assumed, &setup.true_cost, &params)?;
        let loss_true = strategic_01_loss(&x, y, &clf_true, &setup.true_cost, &params)?;
        let diff = loss_assumed - loss_true;
        sum += diff;
        sum_sq += diff * diff;
    }
    let n = n_samples as f64;
    let mean = sum / n;
    let var = ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0);
    Ok((mean, (var / n).sqrt()))
}

/// Named eigenvalue spectra for the excess-risk curves; `lambda_k` is the
/// k-th largest eigenvalue, k = 1..d.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumKind {
    Constant,
    Harmonic,
    Geometric,
    Polynomial,
}

impl SpectrumKind {
    pub const NAMES: [&'static str; 4] = ["constant", "harmonic", "geometric", "polynomial"];

    pub fn eigenvalues(&self, d: usize) -> Vec<f64> {
        (1..=d)
            .map(|k| match self {
                SpectrumKind::Constant => 1.0,
                SpectrumKind::Harmonic => 1.0 / k as f64,
                SpectrumKind::Geometric => 2.0f64.powi(-(k as i32)),
                SpectrumKind::Polynomial => 1.0 / (k as f64 * k as f64),
            })
            .collect()
    }
}

impl fmt::Display for SpectrumKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            SpectrumKind::Constant => "constant",
            SpectrumKind::Harmonic => "harmonic",
            SpectrumKind::Geometric => "geometric",
            SpectrumKind::Polynomial => "polynomial",
        };
        f.write_str(name)
    }
}

impl FromStr for SpectrumKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "constant" => Ok(SpectrumKind::Constant),
            "harmonic" => Ok(SpectrumKind::Harmonic),
            "geometric" => Ok(SpectrumKind::Geometric),
            "polynomial" => Ok(SpectrumKind::Polynomial),
            other => Err(Error::UnknownSpectrum {
                name: other.to_string(),
                supported: Self::NAMES.join(", "),
            }),
        }
    }
}

/// Excess-risk curve over dimensions: for each d, `mu0 = d^(-1/2) 1`,
/// `sigma^2 = 1/d`, the true cost has the named spectrum and the assumed one
/// is `(1 - eigen_error)` times it; Euclidean (p = 2) movement norms.
pub fn excess_risk_curve(
    d_values: &[usize],
    spectrum: SpectrumKind,
    eigen_error: f64,
    params: &StrategicParams,
) -> Result<Vec<(usize, f64)>> {
    if !(0.0..1.0).contains(&eigen_error) {
        return Err(Error::InvalidParameter(
            "eigen_error must lie in [0, 1)".into(),
        ));
    }
    let norm = PNormSpec::new(2.0)?;
    let mut out = Vec::with_capacity(d_values.len());
    for &d in d_values {
        if d < 1 {
            return Err(Error::InvalidParameter("d must be >= 1".into()));
        }
        let setup = curve_setup(d, spectrum, eigen_error, params, &norm)?;
        out.push((d, gaussian_excess_risk(&setup)?));
    }
    Ok(out)
}

/// The per-dimension setup behind [`excess_risk_curve`], exposed so Monte
/// Carlo columns can be produced for the same points.
pub fn curve_setup(
    d: usize,
    spectrum: SpectrumKind,
    eigen_error: f64,
    params: &StrategicParams,
    norm: &PNormSpec,
) -> Result<GaussianSetup> {
    let mu0 = vec![1.0 / (d as f64).sqrt(); d];
    let eig = spectrum.eigenvalues(d);
    let true_cost = CostModel::new(*norm, eig.clone())?;
    let assumed: Vec<f64> = eig.iter().map(|e| e * (1.0 - eigen_error)).collect();
    let assumed_cost = if eigen_error == 0.0 {
        true_cost.clone()
    } else {
        CostModel::new(*norm, assumed)?
    };
    GaussianSetup::new(
        mu0,
        1.0 / d as f64,
        true_cost,
        assumed_cost,
        params.u_star(),
    )
}
