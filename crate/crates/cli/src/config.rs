//! The experiment configuration file: an INI-style key-value document with
//! sections `[cost_set]`, `[strategic]`, `[solve]`, `[data]`, `[output]`
//! and `[hardness]`. Unknown sections or keys are errors; values are
//! validated against the owning core types before any computation runs.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use strat_core::analysis::{GaussianSetup, SpectrumKind};
use strat_core::data::{load_csv, sample_gaussian_mixture, RngSpec};
use strat_core::{
    CostModel, CostUncertaintySet, LabeledDataset, PNormSpec, SolveConfig, StrategicParams,
};

use crate::error::{CliError, CliResult};

const KNOWN_KEYS: &[(&str, &[&str])] = &[
    ("cost_set", &["p", "lo", "hi"]),
    (
        "solve",
        &[
            "method",
            "T",
            "B",
            "step_scale",
            "batch_size",
            "epsilon",
            "seed",
            "project_to_ball",
        ],
    ),
    ("strategic", &["u_star", "lambda"]),
    (
        "data",
        &["path", "generator", "n", "mu0", "sigma_sq", "seed"],
    ),
    ("output", &["dir"]),
    (
        "hardness",
        &[
            "spectrum",
            "eigen_error",
            "d_values",
            "mc_samples",
            "eps_mix",
            "beta_star",
            "c1",
            "c2",
            "alpha",
        ],
    ),
];

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMethod {
    Subgradient,
    Smda,
}

/// Parsed configuration document plus the hash of its raw bytes, which every
/// output file echoes for provenance.
#[derive(Debug)]
pub struct ExperimentConfig {
    sections: BTreeMap<String, BTreeMap<String, String>>,
    pub hash: u64,
    base_dir: PathBuf,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let bytes = std::fs::read(path)
            .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
        let text = String::from_utf8(bytes.clone())
            .map_err(|_| CliError::config("config file is not UTF-8"))?;
        let mut sections: BTreeMap<String, BTreeMap<String, String>> = BTreeMap::new();
        let mut current: Option<String> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
                let name = name.trim();
                if !KNOWN_KEYS.iter().any(|(s, _)| *s == name) {
                    return Err(CliError::config(format!(
                        "line {line_no}: unknown section [{name}]"
                    )));
                }
                current = Some(name.to_string());
                sections.entry(name.to_string()).or_default();
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::config(format!(
                    "line {line_no}: expected 'key = value', found '{line}'"
                )));
            };
            let key = key.trim();
            let value = value.trim();
            let Some(section) = &current else {
                return Err(CliError::config(format!(
                    "line {line_no}: key '{key}' outside any section"
                )));
            };
            let allowed = KNOWN_KEYS
                .iter()
                .find(|(s, _)| s == section)
                .map(|(_, keys)| *keys)
                .unwrap_or(&[]);
            if !allowed.contains(&key) {
                return Err(CliError::config(format!(
                    "line {line_no}: unknown key '{key}' in section [{section}]"
                )));
            }
            sections
                .get_mut(section)
                .expect("section entry created above")
                .insert(key.to_string(), value.to_string());
        }
        Ok(Self {
            sections,
            hash: fnv1a64(&bytes),
            base_dir: path.parent().unwrap_or(Path::new(".")).to_path_buf(),
        })
    }

    fn get(&self, section: &str, key: &str) -> Option<&str> {
        self.sections
            .get(section)
            .and_then(|s| s.get(key))
            .map(String::as_str)
    }

    fn required(&self, section: &str, key: &str) -> CliResult<&str> {
        self.get(section, key)
            .ok_or_else(|| CliError::config(format!("missing key '{key}' in section [{section}]")))
    }

    fn parse_f64(&self, section: &str, key: &str, raw: &str) -> CliResult<f64> {
        let value: f64 = if raw == "inf" || raw == "+inf" {
            f64::INFINITY
        } else {
            raw.parse()
                .map_err(|_| CliError::config(format!("[{section}] {key}: bad number '{raw}'")))?
        };
        if value.is_nan() {
            return Err(CliError::config(format!("[{section}] {key}: NaN")));
        }
        Ok(value)
    }

    fn required_f64(&self, section: &str, key: &str) -> CliResult<f64> {
        let raw = self.required(section, key)?;
        self.parse_f64(section, key, raw)
    }

    fn optional_f64(&self, section: &str, key: &str) -> CliResult<Option<f64>> {
        match self.get(section, key) {
            Some(raw) => Ok(Some(self.parse_f64(section, key, raw)?)),
            None => Ok(None),
        }
    }

    fn optional_usize(&self, section: &str, key: &str) -> CliResult<Option<usize>> {
        match self.get(section, key) {
            Some(raw) => raw
                .parse()
                .map(Some)
                .map_err(|_| CliError::config(format!("[{section}] {key}: bad integer '{raw}'"))),
            None => Ok(None),
        }
    }

    fn list_f64(&self, section: &str, key: &str) -> CliResult<Vec<f64>> {
        let raw = self.required(section, key)?;
        raw.split(',')
            .map(|item| self.parse_f64(section, key, item.trim()))
            .collect()
    }

    pub fn norm(&self) -> CliResult<PNormSpec> {
        let p = self.required_f64("cost_set", "p")?;
        Ok(PNormSpec::new(p)?)
    }

    pub fn cost_set(&self) -> CliResult<CostUncertaintySet> {
        let norm = self.norm()?;
        let lo = self.list_f64("cost_set", "lo")?;
        let hi = self.list_f64("cost_set", "hi")?;
        Ok(CostUncertaintySet::new(norm, lo, hi)?)
    }

    pub fn strategic_params(&self) -> CliResult<StrategicParams> {
        let u_star = self.required_f64("strategic", "u_star")?;
        let lambda = self.optional_f64("strategic", "lambda")?.unwrap_or(0.0);
        Ok(StrategicParams::new(u_star, lambda)?)
    }

    /// Seed from `[solve]`, overridden by the STRAT_SEED environment variable.
    pub fn seed(&self) -> CliResult<u64> {
        if let Ok(raw) = std::env::var("STRAT_SEED") {
            return raw
                .parse()
                .map_err(|_| CliError::config(format!("STRAT_SEED: bad integer '{raw}'")));
        }
        match self.get("solve", "seed") {
            Some(raw) => raw
                .parse()
                .map_err(|_| CliError::config(format!("[solve] seed: bad integer '{raw}'"))),
            None => Ok(0),
        }
    }

    pub fn method(&self) -> CliResult<SolveMethod> {
        match self.get("solve", "method").unwrap_or("subgradient") {
            "subgradient" => Ok(SolveMethod::Subgradient),
            "smda" => Ok(SolveMethod::Smda),
            other => Err(CliError::config(format!(
                "[solve] method must be 'subgradient' or 'smda', got '{other}'"
            ))),
        }
    }

    pub fn solve_config(&self) -> CliResult<SolveConfig> {
        let iterations = self
            .optional_usize("solve", "T")?
            .ok_or_else(|| CliError::config("missing key 'T' in section [solve]"))?;
        let bound = self.required_f64("solve", "B")?;
        let mut cfg = SolveConfig::new(iterations, bound)?;
        if let Some(scale) = self.optional_f64("solve", "step_scale")? {
            cfg = cfg.with_step_scale(scale);
        }
        cfg = cfg.with_seed(self.seed()?);
        if let Some(raw) = self.get("solve", "project_to_ball") {
            let flag = match raw {
                "true" | "1" => true,
                "false" | "0" => false,
                other => {
                    return Err(CliError::config(format!(
                        "[solve] project_to_ball: expected true/false, got '{other}'"
                    )))
                }
            };
            cfg = cfg.with_projection(flag);
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn dual_norm_bound(&self) -> CliResult<f64> {
        self.required_f64("solve", "B")
    }

    pub fn batch_size(&self) -> CliResult<usize> {
        Ok(self.optional_usize("solve", "batch_size")?.unwrap_or(32))
    }

    pub fn epsilon(&self) -> CliResult<Option<f64>> {
        self.optional_f64("solve", "epsilon")
    }

    /// Loads the dataset from `[data]` path or draws it from the configured
    /// generator.
    pub fn dataset(&self) -> CliResult<LabeledDataset> {
        if let Some(path) = self.get("data", "path") {
            let resolved = if Path::new(path).is_absolute() {
                PathBuf::from(path)
            } else {
                self.base_dir.join(path)
            };
            return Ok(load_csv(&resolved)?);
        }
        match self.get("data", "generator") {
            Some("gaussian") => {
                let mu0 = self.list_f64("data", "mu0")?;
                let sigma_sq = self.required_f64("data", "sigma_sq")?;
                let n = self
                    .optional_usize("data", "n")?
                    .ok_or_else(|| CliError::config("missing key 'n' in section [data]"))?;
                let seed = self.optional_usize("data", "seed")?.unwrap_or(1) as u64;
                let norm = self.norm()?;
                let placeholder = CostModel::new(norm, vec![1.0; mu0.len()])?;
                let setup =
                    GaussianSetup::new(mu0, sigma_sq, placeholder.clone(), placeholder, 0.0)?;
                Ok(sample_gaussian_mixture(&setup, n, RngSpec::new(seed))?)
            }
            Some(other) => Err(CliError::config(format!(
                "[data] generator '{other}' unknown; supported: gaussian"
            ))),
            None => Err(CliError::config(
                "section [data] needs either 'path' or 'generator'",
            )),
        }
    }

    pub fn output_dir(&self) -> Option<PathBuf> {
        self.get("output", "dir").map(PathBuf::from)
    }

    pub fn hardness_spectrum(&self) -> CliResult<SpectrumKind> {
        let raw = self.required("hardness", "spectrum")?;
        Ok(raw.parse::<SpectrumKind>()?)
    }

    pub fn hardness_eigen_error(&self) -> CliResult<f64> {
        self.required_f64("hardness", "eigen_error")
    }

    pub fn hardness_d_values(&self) -> CliResult<Vec<usize>> {
        let raw = self.required("hardness", "d_values")?;
        raw.split(',')
            .map(|item| {
                item.trim().parse().map_err(|_| {
                    CliError::config(format!("[hardness] d_values: bad integer '{item}'"))
                })
            })
            .collect()
    }

    pub fn hardness_mc_samples(&self) -> CliResult<usize> {
        Ok(self
            .optional_usize("hardness", "mc_samples")?
            .unwrap_or(100_000))
    }

    pub fn hardness_eps_mix(&self) -> CliResult<f64> {
        self.required_f64("hardness", "eps_mix")
    }

    pub fn hardness_beta_star(&self) -> CliResult<Vec<f64>> {
        self.list_f64("hardness", "beta_star")
    }

    pub fn hardness_cost(&self, key: &str) -> CliResult<CostModel> {
        let eig = self.list_f64("hardness", key)?;
        Ok(CostModel::new(self.norm()?, eig)?)
    }

    pub fn hardness_alpha(&self) -> CliResult<f64> {
        Ok(self.optional_f64("hardness", "alpha")?.unwrap_or(1.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_config(text: &str) -> (tempfile::TempDir, PathBuf) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("exp.toml");
        let mut f = std::fs::File::create(&path).unwrap();
        f.write_all(text.as_bytes()).unwrap();
        (dir, path)
    }

    #[test]
    fn parses_minimal_config() {
        let (_dir, path) = write_config(
            "[cost_set]\np = 2\nlo = 0.25, 1.0\nhi = 4.0, 2.0\n\n\
             [strategic]\nu_star = 1.0\nlambda = 0.5\n\n\
             [solve]\nmethod = subgradient\nT = 100\nB = 2.0\n",
        );
        let cfg = ExperimentConfig::load(&path).unwrap();
        let set = cfg.cost_set().unwrap();
        assert_eq!(set.dim(), 2);
        assert_eq!(cfg.method().unwrap(), SolveMethod::Subgradient);
        assert_eq!(cfg.solve_config().unwrap().iterations, 100);
        assert_eq!(cfg.strategic_params().unwrap().reg_lambda(), 0.5);
    }

    #[test]
    fn rejects_unknown_keys_and_sections() {
        let (_dir, path) = write_config("[cost_set]\np = 2\nwobble = 3\n");
        let err = ExperimentConfig::load(&path).unwrap_err().to_string();
        assert!(err.contains("wobble"), "{err}");

        let (_dir2, path2) = write_config("[nonsense]\nx = 1\n");
        let err = ExperimentConfig::load(&path2).unwrap_err().to_string();
        assert!(err.contains("nonsense"), "{err}");
    }

    #[test]
    fn invalid_values_rejected_before_use() {
        let (_dir, path) =
            write_config("[cost_set]\np = 0.5\nlo = 1\nhi = 2\n[strategic]\nu_star = 1\n");
        let cfg = ExperimentConfig::load(&path).unwrap();
        assert!(cfg.cost_set().is_err());

        let (_dir2, path2) =
            write_config("[cost_set]\np = 2\nlo = 3\nhi = 2\n[strategic]\nu_star = 1\n");
        let cfg = ExperimentConfig::load(&path2).unwrap();
        assert!(cfg.cost_set().is_err());
    }

    #[test]
    fn hash_is_stable_and_content_sensitive() {
        let (_dir, path) = write_config("[cost_set]\np = 2\nlo = 1\nhi = 2\n");
        let a = ExperimentConfig::load(&path).unwrap().hash;
        let b = ExperimentConfig::load(&path).unwrap().hash;
        assert_eq!(a, b);
        let (_dir2, path2) = write_config("[cost_set]\np = 2\nlo = 1\nhi = 3\n");
        let c = ExperimentConfig::load(&path2).unwrap().hash;
        assert_ne!(a, c);
    }
}
