//! The four experiment commands. Every output file starts with a comment
//! echoing the config hash, so reruns are verifiable byte-for-byte.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use strat_core::adversary::{adversarial_risk_certificate, certificate_slack, max_loss_cost};
use strat_core::analysis::{
    build_two_plane, curve_setup, gaussian_excess_risk, monte_carlo_excess_risk, zero_error_band,
};
use strat_core::data::{sample_two_plane, RngSpec};
use strat_core::response::{shift_bias_for_known_cost, strategic_01_risk};
use strat_core::solvers::{
    solve_smda, solve_subgradient, ReplacementSampler, SmdaOptions, SolveReport,
    DEFAULT_CONFIDENCE_DELTA,
};
use strat_core::{Classifier, PNormSpec};

use crate::config::{ExperimentConfig, SolveMethod};
use crate::error::{CliError, CliResult};

fn write_lines(path: &Path, hash: u64, lines: &[String]) -> CliResult<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "# config_hash={hash:016x}").map_err(CliError::from)?;
    for line in lines {
        writeln!(out, "{line}").map_err(CliError::from)?;
    }
    out.flush()?;
    Ok(())
}

fn write_model(path: &Path, hash: u64, clf: &Classifier) -> CliResult<()> {
    let d = clf.dim();
    let header: Vec<String> = (0..d).map(|i| format!("w{i}")).collect();
    let mut row: Vec<String> = clf.weights().iter().map(|w| format!("{w}")).collect();
    row.push(format!("{}", clf.bias()));
    write_lines(
        path,
        hash,
        &[format!("{},b", header.join(",")), row.join(",")],
    )
}

pub fn read_model(path: &Path) -> CliResult<Classifier> {
    let reader = BufReader::new(
        File::open(path)
            .map_err(|e| CliError::config(format!("cannot read model {}: {e}", path.display())))?,
    );
    let mut header: Option<usize> = None;
    for line in reader.lines() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        match header {
            None => {
                let cols: Vec<&str> = trimmed.split(',').map(str::trim).collect();
                if cols.len() < 2 || cols[cols.len() - 1] != "b" {
                    return Err(CliError::config(format!(
                        "model {}: expected header 'w0,...,b'",
                        path.display()
                    )));
                }
                header = Some(cols.len() - 1);
            }
            Some(d) => {
                let fields: Vec<&str> = trimmed.split(',').map(str::trim).collect();
                if fields.len() != d + 1 {
                    return Err(CliError::config(format!(
                        "model {}: expected {} fields",
                        path.display(),
                        d + 1
                    )));
                }
                let mut values = Vec::with_capacity(d + 1);
                for raw in &fields {
                    values.push(raw.parse::<f64>().map_err(|_| {
                        CliError::config(format!("model {}: bad number '{raw}'", path.display()))
                    })?);
                }
                let bias = values.pop().expect("at least bias");
                return Ok(Classifier::new(values, bias)?);
            }
        }
    }
    Err(CliError::config(format!(
        "model {}: no data row",
        path.display()
    )))
}

fn run_solver(config: &ExperimentConfig) -> CliResult<(SolveReport, strat_core::LabeledDataset)> {
    let data = config.dataset()?;
    let set = config.cost_set()?;
    let params = config.strategic_params()?;
    let cfg = config.solve_config()?;
    let report = match config.method()? {
        SolveMethod::Subgradient => solve_subgradient(&data, &set, &params, &cfg)?,
        SolveMethod::Smda => {
            let opts = SmdaOptions {
                batch_size: config.batch_size()?,
                explicit_epsilon: config.epsilon()?,
                q_update_regularized: true,
            };
            let mut source = ReplacementSampler::new(&data, cfg.seed);
            solve_smda(&mut source, &set, &params, &cfg, &opts)?
        }
    };
    Ok((report, data))
}

pub fn cmd_train(config: &ExperimentConfig, out_dir: &Path) -> CliResult<()> {
    let (report, data) = run_solver(config)?;
    let set = config.cost_set()?;
    let params = config.strategic_params()?;
    let cfg = config.solve_config()?;

    write_model(&out_dir.join("model.csv"), config.hash, &report.classifier)?;

    let mut lines = vec!["iteration,worst_risk".to_string()];
    for (i, risk) in report.risk_trace.iter().enumerate() {
        lines.push(format!("{},{risk}", i + 1));
    }
    lines.push(format!("final,{}", report.worst_empirical_risk));
    write_lines(&out_dir.join("report.csv"), config.hash, &lines)?;

    let x_max = data.x_max(set.norm());
    let worst_unreg =
        max_loss_cost(&data, &report.classifier, &set, &params.with_lambda(0.0)?)?.worst_risk;
    let slack = certificate_slack(
        cfg.dual_norm_bound,
        x_max,
        params.u_star(),
        DEFAULT_CONFIDENCE_DELTA,
        data.len(),
    )?;
    let cert_lines = vec![
        format!("n = {}", data.len()),
        format!("d = {}", data.dim()),
        format!("B = {}", cfg.dual_norm_bound),
        format!("X = {x_max}"),
        format!("u_star = {}", params.u_star()),
        format!("lambda = {}", params.reg_lambda()),
        format!("delta = {DEFAULT_CONFIDENCE_DELTA}"),
        format!("worst_unregularized_hinge_risk = {worst_unreg}"),
        format!("slack = {slack}"),
        format!("certificate = {}", worst_unreg + slack),
    ];
    write_lines(&out_dir.join("certificate.txt"), config.hash, &cert_lines)?;

    println!(
        "train: worst regularized risk {:.6}, certificate {:.6}, outputs in {}",
        report.worst_empirical_risk,
        report.certificate,
        out_dir.display()
    );
    Ok(())
}

pub fn cmd_eval(config: &ExperimentConfig, model_path: &Path, out_dir: &Path) -> CliResult<()> {
    let clf = read_model(model_path)?;
    let data = config.dataset()?;
    let set = config.cost_set()?;
    if clf.dim() != set.dim() || data.dim() != clf.dim() {
        return Err(CliError::config(format!(
            "dimension mismatch: model {} / cost set {} / data {}",
            clf.dim(),
            set.dim(),
            data.dim()
        )));
    }
    let params = config.strategic_params()?;
    let worst = max_loss_cost(&data, &clf, &set, &params)?;
    let zero_one = strategic_01_risk(&data, &clf, &worst.worst_cost, &params)?;
    let certificate = adversarial_risk_certificate(
        &data,
        &clf,
        &set,
        &params,
        DEFAULT_CONFIDENCE_DELTA,
        config.dual_norm_bound()?,
    )?;

    let eig_header: Vec<String> = (0..set.dim()).map(|i| format!("sigma2_{i}")).collect();
    let eig_row: Vec<String> = worst
        .worst_cost
        .eigenvalues()
        .iter()
        .map(|e| format!("{e}"))
        .collect();
    let lines = vec![
        format!(
            "k_star,worst_risk_s_hinge,worst_risk_01,certificate,{}",
            eig_header.join(",")
        ),
        format!(
            "{},{},{zero_one},{certificate},{}",
            worst.k_star,
            worst.worst_risk,
            eig_row.join(",")
        ),
    ];
    write_lines(&out_dir.join("eval.csv"), config.hash, &lines)?;
    println!(
        "eval: k* {:.6}, worst s-hinge {:.6}, worst 0-1 {:.6}, certificate {:.6}",
        worst.k_star, worst.worst_risk, zero_one, certificate
    );
    Ok(())
}

pub fn cmd_shift(config: &ExperimentConfig, model_path: &Path, out_dir: &Path) -> CliResult<()> {
    let set = config.cost_set()?;
    if set.lo() != set.hi() {
        return Err(CliError::config(
            "bias shift requires a known cost: [cost_set] lo must equal hi",
        ));
    }
    let cost = set.cost_at_hi();
    let clf = read_model(model_path)?;
    if clf.dim() != set.dim() {
        return Err(CliError::config(format!(
            "dimension mismatch: model {} / cost set {}",
            clf.dim(),
            set.dim()
        )));
    }
    let params = config.strategic_params()?;
    let shifted = shift_bias_for_known_cost(&clf, &cost, &params)?;
    write_model(&out_dir.join("shifted_model.csv"), config.hash, &shifted)?;

    let data = config.dataset()?;
    if data.dim() != clf.dim() {
        return Err(CliError::config(format!(
            "dimension mismatch: model {} / data {}",
            clf.dim(),
            data.dim()
        )));
    }
    let mut plain = 0.0;
    for i in 0..data.len() {
        let pred = if clf.score(data.row(i)) >= 0.0 {
            1.0
        } else {
            -1.0
        };
        if pred != data.label(i) {
            plain += 1.0;
        }
    }
    plain /= data.len() as f64;
    let strategic = strategic_01_risk(&data, &shifted, &cost, &params)?;
    let equal = plain == strategic;
    write_lines(
        &out_dir.join("shift_verification.txt"),
        config.hash,
        &[format!(
            "non_strategic_risk_original = {plain}, strategic_risk_shifted = {strategic}, equal = {equal}"
        )],
    )?;
    println!(
        "shift: bias {} -> {}; non-strategic {:.6} vs strategic-after-shift {:.6} (equal = {equal})",
        clf.bias(),
        shifted.bias(),
        plain,
        strategic
    );
    Ok(())
}

pub enum HardnessMode {
    TwoPlane,
    GaussianCurve,
}

pub fn cmd_hardness(
    config: &ExperimentConfig,
    mode: HardnessMode,
    out_dir: &Path,
) -> CliResult<()> {
    match mode {
        HardnessMode::TwoPlane => hardness_twoplane(config, out_dir),
        HardnessMode::GaussianCurve => hardness_gaussian_curve(config, out_dir),
    }
}

fn hardness_twoplane(config: &ExperimentConfig, out_dir: &Path) -> CliResult<()> {
    let params = config.strategic_params()?;
    let c1 = config.hardness_cost("c1")?;
    let c2 = config.hardness_cost("c2")?;
    let eps_mix = config.hardness_eps_mix()?;
    let beta_star = config.hardness_beta_star()?;
    let b_bound = config.dual_norm_bound()?;
    let alpha = config.hardness_alpha()?;
    let n = config.hardness_mc_samples()?;
    let base_seed = config.seed()?;

    let dist = build_two_plane(&c1, &c2, eps_mix, b_bound, &params, &beta_star)?;
    let mut lines = vec![
        "band,own_cost_error,own_cost_std_err,cross_cost_error,cross_cost_std_err".to_string(),
    ];
    for (idx, (label, own, cross)) in [("c1", &c1, &c2), ("c2", &c2, &c1)].iter().enumerate() {
        let band = zero_error_band(&dist, own, &params, alpha)?;
        let bias = 0.5 * (band.0 + band.1);
        let weights: Vec<f64> = dist.beta_star.iter().map(|w| alpha * w).collect();
        let clf = Classifier::new(weights, bias)?;
        let sample = sample_two_plane(&dist, n, RngSpec::new(base_seed + idx as u64))?;
        let own_err = strategic_01_risk(&sample, &clf, own, &params)?;
        let cross_err = strategic_01_risk(&sample, &clf, cross, &params)?;
        let se = |p: f64| (p * (1.0 - p) / n as f64).sqrt();
        lines.push(format!(
            "{label},{own_err},{},{cross_err},{}",
            se(own_err),
            se(cross_err)
        ));
    }
    write_lines(&out_dir.join("twoplane.csv"), config.hash, &lines)?;
    println!(
        "hardness twoplane: wrote {}",
        out_dir.join("twoplane.csv").display()
    );
    Ok(())
}

fn hardness_gaussian_curve(config: &ExperimentConfig, out_dir: &Path) -> CliResult<()> {
    let spectrum = config.hardness_spectrum()?;
    let eigen_error = config.hardness_eigen_error()?;
    let d_values = config.hardness_d_values()?;
    let n = config.hardness_mc_samples()?;
    let params = config.strategic_params()?;
    let base_seed = config.seed()?;
    let norm = PNormSpec::new(2.0)?;

    let mut lines = vec!["d,spectrum,eigen_error,closed_form,monte_carlo,std_err".to_string()];
    for (idx, &d) in d_values.iter().enumerate() {
        let setup = curve_setup(d, spectrum, eigen_error, &params, &norm)?;
        let closed = gaussian_excess_risk(&setup)?;
        let (mc, se) = monte_carlo_excess_risk(&setup, n, RngSpec::new(base_seed + idx as u64))?;
        lines.push(format!("{d},{spectrum},{eigen_error},{closed},{mc},{se}"));
    }
    write_lines(&out_dir.join("gaussian_curve.csv"), config.hash, &lines)?;
    println!(
        "hardness gaussian-curve: wrote {}",
        out_dir.join("gaussian_curve.csv").display()
    );
    Ok(())
}
