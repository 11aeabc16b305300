//! Dataset CSV I/O and reproducible synthetic samplers.
//!
//! CSV interchange format: UTF-8, comma-separated, header `x0,...,x{d-1},y`,
//! one row per sample, `y` in {-1, 1} (0/1 also accepted on input, 0 mapping
//! to -1). Values are written in shortest round-trip decimal form, so a
//! save/load cycle reproduces every double bit-exactly. Lines starting with
//! `#` are comments.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::analysis::{GaussianSetup, TwoPlaneDistribution};
use crate::domain::LabeledDataset;
use crate::error::{Error, Result};
use crate::util;

/// A named deterministic generator: ChaCha8 keyed by a 64-bit seed, with an
/// independent substream per `stream_id`. The same (seed, stream_id) yields
/// the same sequence on every platform.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RngSpec {
    pub seed: u64,
    pub stream_id: u64,
}

impl RngSpec {
    pub fn new(seed: u64) -> Self {
        Self { seed, stream_id: 0 }
    }

    pub fn with_stream(seed: u64, stream_id: u64) -> Self {
        Self { seed, stream_id }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }
}

/// Standard normal draw via the polar rejection method; the companion
/// coordinate of each accepted pair is discarded so every call is
/// self-contained.
pub fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    loop {
        let u = 2.0 * rng.random::<f64>() - 1.0;
        let v = 2.0 * rng.random::<f64>() - 1.0;
        let s = u * u + v * v;
        if s > 0.0 && s < 1.0 {
            return u * (-2.0 * s.ln() / s).sqrt();
        }
    }
}

fn parse_err(path: &Path, line: usize, msg: impl Into<String>) -> Error {
    Error::CsvParse {
        path: path.display().to_string(),
        line,
        msg: msg.into(),
    }
}

/// Loads a dataset from CSV. Labels must be -1/+1 (or 0/1; 0 maps to -1 with
/// a notice on stderr). Malformed rows are reported with their line number.
pub fn load_csv(path: impl AsRef<Path>) -> Result<LabeledDataset> {
    let path = path.as_ref();
    let reader = BufReader::new(File::open(path)?);
    let mut header: Option<Vec<String>> = None;
    let mut rows: Vec<(Vec<f64>, f64)> = Vec::new();
    let mut zero_labels = 0usize;

    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split(',').map(str::trim).collect();
        match &header {
            None => {
                if fields.len() < 2 || fields[fields.len() - 1] != "y" {
                    return Err(parse_err(
                        path,
                        line_no,
                        "expected header 'x0,...,x{d-1},y'",
                    ));
                }
                for (i, name) in fields[..fields.len() - 1].iter().enumerate() {
                    if *name != format!("x{i}") {
                        return Err(parse_err(
                            path,
                            line_no,
                            format!("expected column 'x{i}', found '{name}'"),
                        ));
                    }
                }
                header = Some(fields.iter().map(|s| s.to_string()).collect());
            }
            Some(cols) => {
                if fields.len() != cols.len() {
                    return Err(parse_err(
                        path,
                        line_no,
                        format!("expected {} fields, found {}", cols.len(), fields.len()),
                    ));
                }
                let d = cols.len() - 1;
                let mut x = Vec::with_capacity(d);
                for (i, raw) in fields[..d].iter().enumerate() {
                    let v: f64 = raw.parse().map_err(|_| {
                        parse_err(path, line_no, format!("bad number '{raw}' in column x{i}"))
                    })?;
                    x.push(v);
                }
                let y_raw: f64 = fields[d]
                    .parse()
                    .map_err(|_| parse_err(path, line_no, format!("bad label '{}'", fields[d])))?;
                let y = if y_raw == -1.0 || y_raw == 1.0 {
                    y_raw
                } else if y_raw == 0.0 {
                    zero_labels += 1;
                    -1.0
                } else {
                    return Err(parse_err(
                        path,
                        line_no,
                        format!("label {y_raw} outside {{-1, 0, 1}}"),
                    ));
                };
                rows.push((x, y));
            }
        }
    }
    if header.is_none() {
        return Err(parse_err(path, 0, "empty file"));
    }
    if rows.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if zero_labels > 0 {
        eprintln!(
            "notice: {zero_labels} label(s) of 0 in {} mapped to -1",
            path.display()
        );
    }
    LabeledDataset::from_rows(&rows)
}

/// Writes a dataset in the interchange format. Shortest round-trip decimal
/// text, so `load_csv(save_csv(data))` reproduces the values exactly.
pub fn save_csv(path: impl AsRef<Path>, data: &LabeledDataset) -> Result<()> {
    let mut out = BufWriter::new(File::create(path.as_ref())?);
    let d = data.dim();
    let header: Vec<String> = (0..d).map(|i| format!("x{i}")).collect();
    writeln!(out, "{},y", header.join(","))?;
    for i in 0..data.len() {
        let row = data.row(i);
        for v in row {
            write!(out, "{v},")?;
        }
        writeln!(out, "{}", data.label(i))?;
    }
    out.flush()?;
    Ok(())
}

/// Samples the symmetric Gaussian mixture: labels uniform on {-1, +1},
/// features `N(y mu0, sigma^2 I)`.
pub fn sample_gaussian_mixture(
    setup: &GaussianSetup,
    n: usize,
    rng: RngSpec,
) -> Result<LabeledDataset> {
    if n < 1 {
        return Err(Error::EmptyDataset);
    }
    let d = setup.mu0.len();
    let sigma = setup.sigma_sq.sqrt();
    let mut gen = rng.rng();
    let mut features = Vec::with_capacity(n * d);
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        let y = if gen.random::<f64>() < 0.5 { 1.0 } else { -1.0 };
        for j in 0..d {
            features.push(y * setup.mu0[j] + sigma * standard_normal(&mut gen));
        }
        labels.push(y);
    }
    LabeledDataset::new(features, labels, d)
}

/// An orthonormal basis of the hyperplane orthogonal to `u` (unit vector),
/// via the Householder reflection exchanging `u` with the first axis.
fn orthonormal_complement(u: &[f64]) -> Vec<Vec<f64>> {
    let d = u.len();
    let mut v = u.to_vec();
    v[0] -= 1.0;
    let norm_sq = util::dot(&v, &v);
    let mut basis = Vec::with_capacity(d.saturating_sub(1));
    for j in 1..d {
        let mut col = vec![0.0; d];
        col[j] = 1.0;
        if norm_sq > 1e-24 {
            let factor = 2.0 * v[j] / norm_sq;
            for i in 0..d {
                col[i] -= factor * v[i];
            }
        }
        basis.push(col);
    }
    basis
}

/// Samples the two-plane distribution: positives (mass `eps_mix`) on the
/// `+r` plane, negatives on the `-r` plane, both thickened along the normal
/// direction and uniform on [-1, 1]^(d-1) in an orthonormal complement
/// basis.
pub fn sample_two_plane(
    dist: &TwoPlaneDistribution,
    n: usize,
    rng: RngSpec,
) -> Result<LabeledDataset> {
    if n < 1 {
        return Err(Error::EmptyDataset);
    }
    let d = dist.beta_star.len();
    let norm = util::l2_norm(&dist.beta_star);
    if norm == 0.0 {
        return Err(Error::InvalidParameter("beta_star must be nonzero".into()));
    }
    let unit: Vec<f64> = dist.beta_star.iter().map(|b| b / norm).collect();
    let basis = orthonormal_complement(&unit);
    let mut gen = rng.rng();
    let mut features = Vec::with_capacity(n * d);
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        let y = if gen.random::<f64>() < dist.eps_mix {
            1.0
        } else {
            -1.0
        };
        let offset = y * dist.r + (gen.random::<f64>() - 0.5) * dist.thickness;
        let mut x: Vec<f64> = unit.iter().map(|ui| ui * offset / norm).collect();
        for col in &basis {
            let c = 2.0 * gen.random::<f64>() - 1.0;
            for i in 0..d {
                x[i] += c * col[i];
            }
        }
        features.extend_from_slice(&x);
        labels.push(y);
    }
    LabeledDataset::new(features, labels, d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::build_two_plane;
    use crate::domain::{CostModel, PNormSpec, StrategicParams};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn rng_spec_reproducible_and_streams_independent() {
        let a: Vec<f64> = {
            let mut r = RngSpec::with_stream(42, 1).rng();
            (0..8).map(|_| r.random::<f64>()).collect()
        };
        let b: Vec<f64> = {
            let mut r = RngSpec::with_stream(42, 1).rng();
            (0..8).map(|_| r.random::<f64>()).collect()
        };
        assert_eq!(a, b);
        let c: Vec<f64> = {
            let mut r = RngSpec::with_stream(42, 2).rng();
            (0..8).map(|_| r.random::<f64>()).collect()
        };
        assert_ne!(a, c);
    }

    #[test]
    fn load_fixture_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("fixture.csv");
        let mut f = File::create(&path).unwrap();
        writeln!(f, "x0,x1,y").unwrap();
        writeln!(f, "0.25,-1.5,-1").unwrap();
        writeln!(f, "2.0,3.5,1").unwrap();
        drop(f);
        let data = load_csv(&path).unwrap();
        assert_eq!(data.len(), 2);
        assert_eq!(data.dim(), 2);
        assert_eq!(data.label(0), -1.0);
        assert_eq!(data.label(1), 1.0);
        assert_eq!(data.row(0), &[0.25, -1.5]);
    }

    #[test]
    fn load_rejects_bad_label_with_line_number() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        let mut f = File::create(&path).unwrap();
        writeln!(f, "x0,y").unwrap();
        writeln!(f, "1.0,1").unwrap();
        writeln!(f, "2.0,3").unwrap();
        drop(f);
        let err = load_csv(&path).unwrap_err().to_string();
        assert!(err.contains(":3:"), "missing line number: {err}");
        assert!(err.contains("label"), "unexpected message: {err}");
    }

    #[test]
    fn load_rejects_malformed_row_and_empty_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("malformed.csv");
        let mut f = File::create(&path).unwrap();
        writeln!(f, "x0,y").unwrap();
        writeln!(f, "oops,1").unwrap();
        drop(f);
        let err = load_csv(&path).unwrap_err().to_string();
        assert!(err.contains(":2:"), "missing line number: {err}");

        let empty = dir.path().join("empty.csv");
        File::create(&empty).unwrap();
        assert!(load_csv(&empty).is_err());

        let header_only = dir.path().join("header_only.csv");
        let mut f = File::create(&header_only).unwrap();
        writeln!(f, "x0,y").unwrap();
        drop(f);
        assert!(matches!(
            load_csv(&header_only),
            Err(crate::error::Error::EmptyDataset)
        ));
    }

    #[test]
    fn zero_one_labels_map_to_signs() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("binary.csv");
        let mut f = File::create(&path).unwrap();
        writeln!(f, "x0,y").unwrap();
        writeln!(f, "1.0,0").unwrap();
        writeln!(f, "2.0,1").unwrap();
        drop(f);
        let data = load_csv(&path).unwrap();
        assert_eq!(data.labels(), &[-1.0, 1.0]);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn save_load_identity(
            rows in proptest::collection::vec(
                (proptest::collection::vec(-1e12f64..1e12, 3), proptest::bool::ANY),
                1..20,
            )
        ) {
            let rows: Vec<(Vec<f64>, f64)> = rows
                .into_iter()
                .map(|(x, pos)| (x, if pos { 1.0 } else { -1.0 }))
                .collect();
            let data = LabeledDataset::from_rows(&rows).unwrap();
            let dir = tempfile::tempdir().unwrap();
            let path = dir.path().join("roundtrip.csv");
            save_csv(&path, &data).unwrap();
            let back = load_csv(&path).unwrap();
            prop_assert_eq!(back, data);
        }
    }

    #[test]
    fn gaussian_sampler_statistics() {
        let p2 = PNormSpec::new(2.0).unwrap();
        let c = CostModel::new(p2, vec![1.0, 1.0]).unwrap();
        let setup = GaussianSetup::new(vec![0.5, -0.25], 0.49, c.clone(), c, 1.0).unwrap();
        let n = 100_000;
        let data = sample_gaussian_mixture(&setup, n, RngSpec::new(3)).unwrap();
        let pos = data.labels().iter().filter(|&&y| y > 0.0).count() as f64;
        let balance = pos / n as f64;
        assert!(
            (balance - 0.5).abs() <= 3.0 * (0.25 / n as f64).sqrt(),
            "balance {balance}"
        );
        // per-class per-coordinate means
        for class in [1.0, -1.0] {
            let rows: Vec<usize> = (0..n).filter(|&i| data.label(i) == class).collect();
            let m = rows.len() as f64;
            for j in 0..2 {
                let mean: f64 = rows.iter().map(|&i| data.row(i)[j]).sum::<f64>() / m;
                let expect = class * setup.mu0[j];
                let bound = 4.0 * setup.sigma_sq.sqrt() / m.sqrt();
                assert!(
                    (mean - expect).abs() <= bound,
                    "class {class} coord {j}: {mean} vs {expect}"
                );
            }
        }

        let single = sample_gaussian_mixture(&setup, 1, RngSpec::new(4)).unwrap();
        assert_eq!(single.len(), 1);
    }

    #[test]
    fn two_plane_sampler_geometry() {
        let p2 = PNormSpec::new(2.0).unwrap();
        let c1 = CostModel::new(p2, vec![1.0, 1.0, 1.0]).unwrap();
        let c2 = CostModel::new(p2, vec![4.0, 4.0, 4.0]).unwrap();
        let params = StrategicParams::new(1.0, 0.0).unwrap();
        let beta = [3.0, 0.0, 4.0];
        let dist = build_two_plane(&c1, &c2, 0.3, 10.0, &params, &beta).unwrap();
        let n = 10_000;
        let data = sample_two_plane(&dist, n, RngSpec::new(9)).unwrap();
        let mut positives = 0usize;
        for i in 0..n {
            // projected offset lands within half a thickness of its plane
            let along = util::dot(&beta, data.row(i));
            assert!(
                (along - data.label(i) * dist.r).abs() <= dist.thickness / 2.0 + 1e-12,
                "sample {i} off-plane: {along} vs {}",
                data.label(i) * dist.r
            );
            if data.label(i) > 0.0 {
                positives += 1;
            }
        }
        let frac = positives as f64 / n as f64;
        assert!(
            (frac - dist.eps_mix).abs() <= 3.0 * (dist.eps_mix / n as f64).sqrt(),
            "positive fraction {frac}"
        );
        assert!(sample_two_plane(&dist, 0, RngSpec::new(9)).is_err());
    }

    #[test]
    fn samplers_reproducible() {
        let p2 = PNormSpec::new(2.0).unwrap();
        let c = CostModel::new(p2, vec![1.0]).unwrap();
        let setup = GaussianSetup::new(vec![1.0], 1.0, c.clone(), c, 1.0).unwrap();
        let a = sample_gaussian_mixture(&setup, 100, RngSpec::new(11)).unwrap();
        let b = sample_gaussian_mixture(&setup, 100, RngSpec::new(11)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn normal_polar_moments() {
        let mut rng = RngSpec::new(123).rng();
        let n = 200_000;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for _ in 0..n {
            let z = standard_normal(&mut rng);
            sum += z;
            sum_sq += z * z;
        }
        let mean = sum / n as f64;
        let var = sum_sq / n as f64 - mean * mean;
        assert_abs_diff_eq!(mean, 0.0, epsilon = 0.01);
        assert_abs_diff_eq!(var, 1.0, epsilon = 0.02);
    }
}
