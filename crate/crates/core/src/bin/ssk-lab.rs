use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ssk_lab::edgelimit::XiEstimator;
use ssk_lab::ensembles::EnsembleKind;
use ssk_lab::harness::{execute, parse_grid, records_to_jsonl, write_outputs, Experiment, RunConfig};
use ssk_lab::overlap::Method;
use ssk_lab::{Error, Result};

const OUT_DIR_ENV: &str = "SSK_LAB_OUT_DIR";

#[derive(Parser)]
#[command(name = "ssk-lab", version, about = "Overlap and edge-statistics experiments for the spherical SK model")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample spectra.
    Sample(Common),
    /// Overlap moments by contour, expansion, Monte Carlo or heuristic.
    Overlap(Common),
    /// Realizations of the edge variable Ξ.
    Xi(Common),
    /// Edge counting statistics on a T grid.
    Counting(Common),
    /// Decimated GOE superposition against GUE.
    FrCheck(Common),
    /// Coupled GOE / zero-diagonal GOE comparison.
    Zerodiag(Common),
    /// Distributional test of overlap fluctuations against Ξ.
    Mainconv(Common),
    /// Tail of the scaled top gap.
    GapTail(Common),
}

#[derive(Args, Debug)]
struct Common {
    /// TOML file with RunConfig fields; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    trials: Option<usize>,
    /// Master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Records file (JSON lines); summaries are written next to it.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, env = "SSK_LAB_WORKERS")]
    workers: Option<usize>,
    /// contour | expansion | mc | bldw
    #[arg(long)]
    method: Option<String>,
    #[arg(long)]
    ensemble: Option<String>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    eps1: Option<f64>,
    #[arg(long)]
    cutoff: Option<usize>,
    /// full | cutoff
    #[arg(long)]
    estimator: Option<String>,
    #[arg(long)]
    n_airy: Option<usize>,
    #[arg(long)]
    k_max: Option<usize>,
    /// Grid `a:b:step` for counting thresholds or gap values.
    #[arg(long)]
    grid: Option<String>,
    /// Stieltjes point `re,im`; repeatable.
    #[arg(long = "z")]
    z: Vec<String>,
    #[arg(long)]
    mc_samples: Option<usize>,
    #[arg(long)]
    force_expansion: bool,
    /// Record per-trial wall time (makes records run-dependent).
    #[arg(long)]
    timing: bool,
}

fn value<T: serde::Serialize>(v: T) -> toml::Value {
    toml::Value::try_from(v).expect("flag values convert to TOML")
}

fn build_config(experiment: Experiment, c: Common) -> Result<RunConfig> {
    let mut table = match &c.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
            text.parse::<toml::Table>().map_err(|e| Error::Config(e.to_string()))?
        }
        None => toml::Table::new(),
    };
    let tag = experiment.tag();
    if let Some(found) = table.get("experiment").and_then(|v| v.as_str()) {
        if found != tag {
            return Err(Error::Config(format!("configuration is for {found}, not {tag}")));
        }
    }
    table.insert("experiment".into(), value(tag));
    let mut set = |key: &str, v: Option<toml::Value>| {
        if let Some(v) = v {
            table.insert(key.into(), v);
        }
    };
    set("n", c.n.map(value));
    set("beta", c.beta.map(value));
    set("trials", c.trials.map(value));
    set("master_seed", c.seed.map(value));
    set("workers", c.workers.map(value));
    set("delta", c.delta.map(value));
    set("eps1", c.eps1.map(value));
    set("cutoff", c.cutoff.map(value));
    set("n_airy", c.n_airy.map(value));
    set("k_max", c.k_max.map(value));
    set("mc_samples", c.mc_samples.map(value));
    set("output_path", c.out.map(value));
    if let Some(m) = c.method {
        set("method", Some(value(m.parse::<Method>().map_err(Error::into_config)?)));
    }
    if let Some(k) = c.ensemble {
        set("ensemble", Some(value(k.parse::<EnsembleKind>().map_err(Error::into_config)?)));
    }
    if let Some(e) = c.estimator {
        set("estimator", Some(value(e.parse::<XiEstimator>().map_err(Error::into_config)?)));
    }
    if let Some(g) = c.grid {
        set("t_grid", Some(value(parse_grid(&g)?)));
    }
    if !c.z.is_empty() {
        let pts = c
            .z
            .iter()
            .map(|s| {
                let (re, im) = s.split_once(',').ok_or_else(|| Error::Config(format!("--z `{s}` is not re,im")))?;
                let p = |x: &str| x.trim().parse::<f64>().map_err(|_| Error::Config(format!("--z `{s}` is not re,im")));
                Ok([p(re)?, p(im)?])
            })
            .collect::<Result<Vec<[f64; 2]>>>()?;
        set("z_grid", Some(value(pts)));
    }
    if c.force_expansion {
        set("force_expansion", Some(value(true)));
    }
    if c.timing {
        set("timing", Some(value(true)));
    }
    toml::Value::Table(table).try_into().map_err(|e: toml::de::Error| Error::Config(e.to_string()))
}

fn default_output(experiment: Experiment) -> Option<PathBuf> {
    let dir = std::env::var_os(OUT_DIR_ENV)?;
    Some(PathBuf::from(dir).join(format!("{}.jsonl", experiment.tag().to_ascii_lowercase())))
}

fn run(cli: Cli) -> Result<()> {
    let (experiment, common) = match cli.command {
        Command::Sample(c) => (Experiment::Sample, c),
        Command::Overlap(c) => (Experiment::Overlap, c),
        Command::Xi(c) => (Experiment::Xi, c),
        Command::Counting(c) => (Experiment::Counting, c),
        Command::FrCheck(c) => (Experiment::FrCheck, c),
        Command::Zerodiag(c) => (Experiment::Zerodiag, c),
        Command::Mainconv(c) => (Experiment::Mainconv, c),
        Command::GapTail(c) => (Experiment::GapTail, c),
    };
    let cfg = build_config(experiment, common)?;
    let out = execute(&cfg)?;
    let summary = serde_json::to_string_pretty(&out.summary).expect("summary serializes");
    match cfg.output_path.clone().or_else(|| default_output(experiment)) {
        Some(path) => {
            write_outputs(&path, &out.records, &out.summary)?;
            println!("{summary}");
        }
        None => {
            std::io::stdout().write_all(records_to_jsonl(&out.records).as_bytes())?;
            eprintln!("{summary}");
        }
    }
    if out.summary.trials > 0 && out.summary.succeeded == 0 {
        return Err(Error::AllTrialsFailed(out.summary.trials));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
