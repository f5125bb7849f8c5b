//! `wprobe`: experiment runner for pulsed-detector response and two-point
//! correlator reconstruction. Subcommands read a JSON config, write CSV
//! result tables plus JSON diagnostics, and record a run manifest.
//!
//! Exit codes: 0 on success, 2 on configuration/validation errors, 3 on
//! numerical failure.

mod config;
mod output;

use anyhow::Context;
use clap::{Parser, Subcommand};
use config::ResolvedConfig;
use output::{finite, fmt_f, OutputDir, RunManifest, TOOL_VERSION};
use serde::Serialize;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;
use wprobe_core::delta_limit::{eta_sweep, nonlocal_delta_limit, scaling_experiment, EtaSchedule};
use wprobe_core::protocol::{reconstruction_sweep, GapRun, ProtocolConfig};
use wprobe_core::response::{excitation_probability, Detector};
use wprobe_core::switching::Comb;

#[derive(Parser)]
#[command(name = "wprobe", version, about = "Pulsed detector response and correlator reconstruction")]
struct Cli {
    /// JSON experiment configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides `output.directory`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (0 = all cores). Results are identical either way.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Reserved for future stochastic components; accepted and recorded.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Excitation probability of the configured comb, decomposed per tooth.
    Respond,
    /// Reconstruct the correlator across the configured lapse grid.
    Reconstruct,
    /// Single-kick width-scaling study.
    Scaling,
    /// Width sweep of the non-local terms with extrapolation diagnostics.
    Sweep,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("WPROBE_LOG", "warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(classify(&err))
        }
    }
}

/// 2 for configuration problems, 3 for numerical ones.
fn classify(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(core) = cause.downcast_ref::<wprobe_core::Error>() {
            return match core {
                wprobe_core::Error::InvalidParameter { .. }
                | wprobe_core::Error::Unsupported { .. }
                | wprobe_core::Error::InfraredDivergence => 2,
                _ => 3,
            };
        }
        if cause.downcast_ref::<serde_json::Error>().is_some() {
            return 2;
        }
    }
    let text = format!("{err:#}");
    if text.contains("config") || text.contains("unknown") {
        2
    } else {
        3
    }
}

fn run(cli: &Cli) -> anyhow::Result<()> {
    if cli.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
            .context("configuring the thread pool")?;
    }
    let config_path = cli
        .config
        .as_ref()
        .context("--config <path> is required")?;
    let cfg = ResolvedConfig::load(config_path)?;
    let out_dir = cli
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(&cfg.output.directory));
    let mut out = OutputDir::create(&out_dir, &cfg.output.stem)?;
    let started = Instant::now();

    let mut echo = serde_json::to_string_pretty(&cfg)?;
    echo.push('\n');
    out.write("config.json", &echo)?;

    let (name, flags) = match cli.command {
        Command::Respond => ("respond", run_respond(&cfg, &mut out)?),
        Command::Reconstruct => ("reconstruct", run_reconstruct(&cfg, &mut out)?),
        Command::Scaling => ("scaling", run_scaling(&cfg, &mut out)?),
        Command::Sweep => ("sweep", run_sweep(&cfg, &mut out)?),
    };

    let manifest = RunManifest {
        tool_version: TOOL_VERSION,
        subcommand: name,
        duration_seconds: started.elapsed().as_secs_f64(),
        seed: cli.seed,
        flags: &flags,
        outputs: out.files(),
        config: &cfg,
    };
    let mut text = serde_json::to_string_pretty(&manifest)?;
    text.push('\n');
    let path = out.path("manifest.json");
    std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn warning_labels(warnings: &[wprobe_core::Warning]) -> String {
    warnings
        .iter()
        .map(|w| match w {
            wprobe_core::Warning::TeethOverlap { .. } => "teeth_overlap",
            wprobe_core::Warning::Perturbativity { .. } => "perturbativity",
            wprobe_core::Warning::NonMonotoneSweep => "non_monotone_sweep",
            wprobe_core::Warning::FirstOrderFallback { .. } => "first_order_fallback",
            wprobe_core::Warning::PrecisionLimited { .. } => "precision_limited",
            wprobe_core::Warning::InconclusiveFit { .. } => "inconclusive_fit",
        })
        .collect::<Vec<_>>()
        .join(";")
}

fn run_respond(cfg: &ResolvedConfig, out: &mut OutputDir) -> anyhow::Result<Vec<String>> {
    let corr = cfg.correlator()?;
    let comb = Comb::new(
        cfg.tooth_shape()?,
        cfg.comb.eta,
        cfg.comb.tau0,
        cfg.comb.zeta,
        cfg.comb.teeth,
    )?;
    let det = Detector::new(cfg.detector.gap, cfg.detector.lambda)?;
    let quad = cfg.quad();
    let outcome = excitation_probability(&comb, &det, &corr, &quad)?;

    let mut csv = String::from("n,local_term\n");
    for (n, local) in outcome.local_terms.iter().enumerate() {
        csv.push_str(&format!("{n},{}\n", fmt_f(finite(*local, "local term")?)));
    }
    csv.push_str("p_total,re_c,im_c,err_est\n");
    csv.push_str(&format!(
        "{},{},{},{}\n",
        fmt_f(finite(outcome.total, "total probability")?),
        fmt_f(finite(outcome.nonlocal.re, "Re C")?),
        fmt_f(finite(outcome.nonlocal.im, "Im C")?),
        fmt_f(finite(outcome.error_estimate, "error estimate")?),
    ));
    out.write("respond.csv", &csv)?;

    #[derive(Serialize)]
    struct RespondReport {
        p_total: f64,
        p_total_per_lambda2: f64,
        p_direct: f64,
        local_terms: Vec<f64>,
        re_c: f64,
        im_c: f64,
        err_est: f64,
        warnings: Vec<String>,
    }
    let report = RespondReport {
        p_total: outcome.total,
        p_total_per_lambda2: outcome.total_per_coupling2,
        p_direct: outcome.direct_total,
        local_terms: outcome.local_terms.clone(),
        re_c: outcome.nonlocal.re,
        im_c: outcome.nonlocal.im,
        err_est: outcome.error_estimate,
        warnings: outcome.warnings.iter().map(|w| w.to_string()).collect(),
    };
    out.write_json("respond.json", &report)?;
    Ok(vec![warning_labels(&outcome.warnings)]
        .into_iter()
        .filter(|s| !s.is_empty())
        .collect())
}

#[derive(Serialize)]
struct GapRunReport {
    mode: String,
    gap: f64,
    etas: Vec<f64>,
    s_values: Vec<f64>,
    extrapolant: f64,
    measured_order: Option<f64>,
    quadrature_error: f64,
    warnings: Vec<String>,
}

impl GapRunReport {
    fn from(run: &GapRun<f64>, mode: &str) -> Self {
        GapRunReport {
            mode: mode.to_string(),
            gap: run.gap,
            etas: run.s_values.iter().map(|p| p.0).collect(),
            s_values: run.s_values.iter().map(|p| p.1).collect(),
            extrapolant: run.extrapolant,
            measured_order: run.measured_order,
            quadrature_error: run.quadrature_error,
            warnings: run.warnings.iter().map(|w| w.to_string()).collect(),
        }
    }
}

fn run_reconstruct(cfg: &ResolvedConfig, out: &mut OutputDir) -> anyhow::Result<Vec<String>> {
    if cfg.protocol.zeta_grid.is_empty() {
        anyhow::bail!(wprobe_core::Error::InvalidParameter {
            name: "protocol.zeta_grid",
            reason: "the lapse grid must not be empty".into(),
        });
    }
    let corr = cfg.correlator()?;
    let quad = cfg.quad();
    let zeta0 = cfg.protocol.zeta_grid[0];
    let template = ProtocolConfig {
        zeta: zeta0,
        tau0: cfg.protocol.tau0,
        shape: cfg.tooth_shape()?,
        schedule: EtaSchedule::new(
            vec![0.08 * zeta0, 0.04 * zeta0, 0.02 * zeta0, 0.01 * zeta0],
            cfg.sweep.extrapolation_order,
        )?,
        k_even: cfg.protocol.k_even,
        k_quarter: cfg.protocol.k_quarter,
        coupling: cfg.detector.lambda,
        route: cfg.route()?,
    };
    let result = reconstruction_sweep(&cfg.protocol.zeta_grid, &template, &corr, &quad)?;

    let mut csv = String::from("zeta,re_w,im_w,re_ref,im_ref,abs_err,rel_err,flag\n");
    let mut convergence = Vec::new();
    let mut failures = 0usize;
    let mut flags = Vec::new();
    for p in &result.points {
        let flag = match &p.failure {
            Some(f) => format!("failed: {f}"),
            None => warning_labels(&p.warnings),
        };
        let cell = |v: Option<f64>| v.map(fmt_f).unwrap_or_default();
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            fmt_f(p.zeta),
            cell(p.value.map(|w| w.re)),
            cell(p.value.map(|w| w.im)),
            cell(p.reference.map(|w| w.re)),
            cell(p.reference.map(|w| w.im)),
            cell(p.abs_err),
            cell(p.rel_err),
            flag,
        ));
        if p.failure.is_some() {
            failures += 1;
        }
        if !flag.is_empty() {
            flags.push(format!("zeta={}: {flag}", fmt_f(p.zeta)));
        }

        #[derive(Serialize)]
        struct PointReport {
            zeta: f64,
            even: Option<GapRunReport>,
            quarter: Option<GapRunReport>,
            failure: Option<String>,
        }
        convergence.push(PointReport {
            zeta: p.zeta,
            even: p.even.as_ref().map(|r| GapRunReport::from(r, "even_cycles")),
            quarter: p
                .quarter
                .as_ref()
                .map(|r| GapRunReport::from(r, "quarter_cycle")),
            failure: p.failure.clone(),
        });
    }
    out.write("reconstruct.csv", &csv)?;
    out.write_json("reconstruct_convergence.json", &convergence)?;

    if failures == result.points.len() {
        anyhow::bail!(wprobe_core::Error::QuadratureNonConvergence {
            best_re: f64::NAN,
            best_im: f64::NAN,
            residual: f64::NAN,
        });
    }
    Ok(flags)
}

fn run_scaling(cfg: &ResolvedConfig, out: &mut OutputDir) -> anyhow::Result<Vec<String>> {
    let det = Detector::new(cfg.detector.gap, cfg.detector.lambda)?;
    let quad = cfg.quad();
    let schedule = EtaSchedule::new(cfg.scaling.etas.clone(), cfg.sweep.extrapolation_order)?;
    let shape = cfg.tooth_shape()?;
    let mut reports = Vec::new();
    let mut flags = Vec::new();

    #[derive(Serialize)]
    struct ScalingJson {
        dim: usize,
        mass: f64,
        gap: f64,
        shape: String,
        etas: Vec<f64>,
        probabilities_per_lambda2: Vec<f64>,
        fitted_slope: f64,
        theory_slope: f64,
        fitted_coefficient: f64,
        theory_coefficient: f64,
        r_squared: f64,
        warnings: Vec<String>,
    }
    for &dim in &cfg.scaling.dims {
        let report = scaling_experiment(dim, cfg.field.mass, shape, &det, &schedule, &quad)?;
        let labels = warning_labels(&report.warnings);
        if !labels.is_empty() {
            flags.push(format!("d={dim}: {labels}"));
        }
        reports.push(ScalingJson {
            dim: report.dim,
            mass: report.mass,
            gap: report.gap,
            shape: cfg.comb.shape.clone(),
            etas: report.etas.clone(),
            probabilities_per_lambda2: report.probabilities.clone(),
            fitted_slope: report.fitted_slope,
            theory_slope: report.theory_slope,
            fitted_coefficient: report.fitted_coefficient,
            theory_coefficient: report.theory_coefficient,
            r_squared: report.r_squared,
            warnings: report.warnings.iter().map(|w| w.to_string()).collect(),
        });
    }
    out.write_json("scaling.json", &reports)?;
    Ok(flags)
}

fn run_sweep(cfg: &ResolvedConfig, out: &mut OutputDir) -> anyhow::Result<Vec<String>> {
    let corr = cfg.correlator()?;
    let comb = Comb::new(
        cfg.tooth_shape()?,
        cfg.sweep.etas[0],
        cfg.comb.tau0,
        cfg.comb.zeta,
        cfg.comb.teeth,
    )?;
    let quad = cfg.quad();
    let schedule = EtaSchedule::new(cfg.sweep.etas.clone(), cfg.sweep.extrapolation_order)?;
    let result = eta_sweep(&comb, cfg.detector.gap, &corr, &schedule, &quad)?;
    let reference = nonlocal_delta_limit(
        cfg.comb.teeth,
        cfg.comb.zeta,
        cfg.comb.tau0,
        cfg.detector.gap,
        &corr,
    )?;

    let mut csv = String::from("eta,re_c,im_c\n");
    for (eta, c) in &result.points {
        csv.push_str(&format!(
            "{},{},{}\n",
            fmt_f(*eta),
            fmt_f(finite(c.re, "Re C")?),
            fmt_f(finite(c.im, "Im C")?)
        ));
    }
    out.write("sweep.csv", &csv)?;

    #[derive(Serialize)]
    struct SweepJson {
        extrapolant_re: f64,
        extrapolant_im: f64,
        delta_limit_re: f64,
        delta_limit_im: f64,
        measured_order: Option<f64>,
        used_order: usize,
        quadrature_error: f64,
        warnings: Vec<String>,
    }
    let report = SweepJson {
        extrapolant_re: result.extrapolant.re,
        extrapolant_im: result.extrapolant.im,
        delta_limit_re: reference.re,
        delta_limit_im: reference.im,
        measured_order: result.measured_order,
        used_order: result.used_order,
        quadrature_error: result.quadrature_error,
        warnings: result.warnings.iter().map(|w| w.to_string()).collect(),
    };
    out.write_json("sweep.json", &report)?;
    let labels = warning_labels(&result.warnings);
    Ok(if labels.is_empty() { vec![] } else { vec![labels] })
}
