use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use idlegrad::checks::quick_suite;
use idlegrad::experiment::{
    build_setting, load_config, resolve_config, run_experiment, table_bounds, write_bundle, ConfigFile, ExperimentConfig,
    ExperimentResult, PresetRef,
};
use idlegrad::Result;

/// Default output root when `--out` is absent.
const OUT_ENV: &str = "IDLEGRAD_OUT";

#[derive(Parser)]
#[command(version, about = "Distributed projected gradient with randomly idling nodes")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run an experiment described by a JSON config.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a named preset.
    Preset {
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        replicas: Option<u64>,
        /// LIBSVM file for presets that read one.
        #[arg(long)]
        data: Option<String>,
    },
    /// Run the fast invariant suites.
    Check {
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Print the theory report for a config without simulating.
    Bounds {
        #[arg(long)]
        config: PathBuf,
    },
}

fn out_dir(out: Option<PathBuf>, name: &str) -> PathBuf {
    out.unwrap_or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from).unwrap_or_else(|| "out".into()).join(name))
}

fn execute(cfg: &ExperimentConfig, out: Option<PathBuf>) -> Result<()> {
    let dir = out_dir(out, cfg.name());
    let result = run_experiment(cfg)?;
    write_bundle(&result, &dir)?;
    if let ExperimentResult::Simulation(s) = &result {
        for a in &s.algorithms {
            if let Some(h) = &a.hits {
                eprintln!(
                    "{:>10}: {}/{} hit eps={}, mean cost {:?}, mean iterations {:?}",
                    a.label,
                    h.hits,
                    a.outcomes.len(),
                    h.eps,
                    h.mean_cost,
                    h.mean_iterations
                );
            }
        }
    }
    println!("{}", dir.display());
    Ok(())
}

fn bounds(cfg: &ExperimentConfig) -> Result<String> {
    match cfg {
        ExperimentConfig::Simulation(s) => {
            let st = build_setting(s)?;
            Ok(serde_json::to_string_pretty(&json!({
                "name": s.name,
                "alpha": st.alpha,
                "p_k_formula": st.schedule.formula(),
                "pd_applied": st.pd_applied,
                "bounds": st.bounds,
                "f_star": st.centralized.f_star,
                "centralized_residual": st.centralized.residual,
                "penalty_residual": st.penalty.residual,
            }))?)
        }
        ExperimentConfig::QuadraticTable(t) => {
            let rows: Vec<_> = table_bounds(t)?
                .into_iter()
                .map(|q| {
                    let eps = q.epsilon_for_alpha();
                    json!({ "quadratic": q, "epsilon": eps, "k_epsilon": q.k_epsilon(eps) })
                })
                .collect();
            Ok(serde_json::to_string_pretty(&json!({ "name": t.name, "rows": rows }))?)
        }
    }
}

fn main_inner(cli: Cli) -> Result<bool> {
    match cli.cmd {
        Cmd::Run { config, out } => {
            let cfg = load_config(&config.display().to_string())?;
            execute(&cfg, out)?;
        }
        Cmd::Preset { name, out, seed, replicas, data } => {
            let cfg = resolve_config(ConfigFile::Preset(PresetRef { preset: name, seed, replicas, data_path: data }))?;
            execute(&cfg, out)?;
        }
        Cmd::Check { seed } => {
            let results = quick_suite(seed)?;
            let mut ok = true;
            for c in &results {
                println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
                ok &= c.passed;
            }
            return Ok(ok);
        }
        Cmd::Bounds { config } => {
            let cfg = load_config(&config.display().to_string())?;
            println!("{}", bounds(&cfg)?);
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match main_inner(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
