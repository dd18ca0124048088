use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;
use serde_json::{json, Value};

use super::config::{Experiment, RunConfig};
use super::record::{Summary, Table, TrialError, TrialRecord, SCHEMA_VERSION};
use super::seed::derive_seed;
use super::stats::{describe, quantile, Describe};
use crate::edgelimit::{
    counting_summary, counting_trial, fr_summary, fr_trial, mainconv_from_samples, mainconv_trial, xi_cutoff_tridiagonal,
    xi_full_tridiagonal, FrTrial, MainconvTrial, XiEstimate, XiEstimator,
};
use crate::ensembles::{sample_coupled_pair, sample_spectrum, SpectrumSample};
use crate::error::{Error, Result};
use crate::overlap::{
    bldw_heuristic, gibbs_mc_oracle, overlap_expansion, overlap_m4_contour, ExpansionGate, Method, OverlapMoments,
};
use crate::saddle::ContourSpec;
use crate::spectral::{event_flags, scaled_top_gap};
use crate::zerodiag::{ev_diff_report, stieltjes_bound, DiffReport};

/// Records in trial order plus the aggregate summary.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub records: Vec<TrialRecord>,
    pub summary: Summary,
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("trial payloads serialize")
}

fn overlap_trial(cfg: &RunConfig, seed: u64) -> Result<Value> {
    let s = sample_spectrum(cfg.ensemble(), cfg.n, seed)?;
    let event_f = if s.n >= 2 {
        event_flags(&s, cfg.delta, cfg.eps1).ok().map(|f| f.event_f)
    } else {
        None
    };
    Ok(match cfg.method {
        Method::ContourExact => {
            let m = overlap_m4_contour(&s, cfg.beta, &ContourSpec::default()).map_err(|e| e.with_seed(seed))?;
            let expansion = if s.n >= 2 {
                overlap_expansion(&s, cfg.beta, ExpansionGate::Force).ok().map(|(e, _)| e)
            } else {
                None
            };
            json!({ "moments": m, "expansion": expansion, "event_f": event_f })
        }
        Method::Expansion => {
            let gate = if cfg.force_expansion {
                ExpansionGate::Force
            } else {
                ExpansionGate::Require {
                    delta: cfg.delta,
                    eps1: cfg.eps1,
                }
            };
            let (m, report) = overlap_expansion(&s, cfg.beta, gate)?;
            json!({ "moments": m, "report": report, "event_f": event_f })
        }
        Method::MonteCarlo => {
            let m = gibbs_mc_oracle(&s, cfg.beta, cfg.mc_samples, derive_seed(seed, 0, 1))?;
            json!({ "moments": m, "event_f": event_f })
        }
        Method::BldwHeuristic => {
            let b = bldw_heuristic(&s, cfg.beta, cfg.mc_samples, derive_seed(seed, 0, 1))?;
            json!({
                "mean": b.mean,
                "stderr": b.stderr,
                "variance": b.variance,
                "term_linear": b.term_linear,
                "predicted_variance": b.predicted_variance,
                "event_f": event_f,
            })
        }
    })
}

/// Runs one trial. The output is a pure function of `(cfg.science(), seed)`.
pub fn run_trial(cfg: &RunConfig, seed: u64) -> Result<Value> {
    let n = cfg.n;
    match cfg.experiment {
        Experiment::Sample => Ok(to_value(&sample_spectrum(cfg.ensemble(), n, seed)?)),
        Experiment::Overlap => overlap_trial(cfg, seed),
        Experiment::Xi => {
            let x = match cfg.estimator {
                XiEstimator::FullSpectrum => xi_full_tridiagonal(n, seed)?,
                XiEstimator::Cutoff => {
                    let c = cfg.cutoff.ok_or_else(|| Error::Config("cutoff missing".into()))?;
                    xi_cutoff_tridiagonal(n, &[c], seed)?.remove(0)
                }
            };
            Ok(to_value(&x))
        }
        Experiment::Counting => Ok(json!({ "counts": counting_trial(cfg.ensemble(), n, &cfg.t_grid, seed)? })),
        Experiment::FrCheck => Ok(to_value(&fr_trial(n, seed)?)),
        Experiment::Zerodiag => {
            let pair = sample_coupled_pair(n, seed)?;
            let report = ev_diff_report(&pair, cfg.k_max())?.with_stieltjes(&pair, &cfg.z_points(), Some(cfg.delta))?;
            Ok(to_value(&report))
        }
        Experiment::Mainconv => Ok(to_value(&mainconv_trial(cfg.beta, n, cfg.n_airy(), cfg.airy_per_trial, seed)?)),
        Experiment::GapTail => {
            let s = sample_spectrum(cfg.ensemble(), n, seed)?;
            Ok(json!({ "gap": scaled_top_gap(&s) }))
        }
    }
}

fn make_record(cfg: &RunConfig, inputs: &Value, trial: u64) -> TrialRecord {
    let seed = derive_seed(cfg.master_seed, trial, 0);
    let start = cfg.timing.then(Instant::now);
    let result = run_trial(cfg, seed);
    let (outputs, error) = match result {
        Ok(v) => (Some(v), None),
        Err(e) => (None, Some(TrialError::from(&e))),
    };
    TrialRecord {
        schema_version: SCHEMA_VERSION,
        experiment: cfg.experiment,
        trial_index: trial,
        derived_seed: seed,
        inputs: inputs.clone(),
        outputs,
        error,
        wall_time: start.map(|s| s.elapsed().as_secs_f64()),
    }
}

/// Number of worker threads a configuration asks for.
pub fn resolve_workers(cfg: &RunConfig) -> usize {
    cfg.workers
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
}

/// Validates the configuration and runs every trial, isolating failures.
/// Never fails because trials failed; see [`run_experiment`].
pub fn execute(cfg: &RunConfig) -> Result<RunOutput> {
    cfg.validate()?;
    let inputs = cfg.science();
    let trials = cfg.trials as u64;
    let workers = resolve_workers(cfg);
    let records: Vec<TrialRecord> = if workers == 1 {
        (0..trials).map(|t| make_record(cfg, &inputs, t)).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::Config(format!("cannot start {workers} workers: {e}")))?;
        pool.install(|| (0..trials).into_par_iter().map(|t| make_record(cfg, &inputs, t)).collect())
    };
    let summary = summarize(cfg, &records)?;
    Ok(RunOutput { records, summary })
}

/// [`execute`], failing with [`Error::AllTrialsFailed`] when trials were
/// requested and none succeeded.
pub fn run_experiment(cfg: &RunConfig) -> Result<RunOutput> {
    let out = execute(cfg)?;
    if out.summary.trials > 0 && out.summary.succeeded == 0 {
        return Err(Error::AllTrialsFailed(out.summary.trials));
    }
    Ok(out)
}

fn describe_table(rows: &[(&str, Option<Describe>)]) -> Table {
    let mut t = Table::new(&["statistic", "count", "mean", "std_error", "median", "q05", "q95", "min", "max"]);
    for (name, d) in rows {
        if let Some(d) = d {
            t.push(name, &[d.count as f64, d.mean, d.std_error, d.median, d.q05, d.q95, d.min, d.max]);
        }
    }
    t
}

fn outputs<T: serde::de::DeserializeOwned>(records: &[TrialRecord]) -> Vec<T> {
    records.iter().filter_map(|r| r.output::<T>()).collect()
}

fn moments_of(records: &[TrialRecord]) -> Vec<OverlapMoments> {
    records
        .iter()
        .filter_map(|r| r.outputs.as_ref())
        .filter_map(|v| serde_json::from_value(v["moments"].clone()).ok())
        .collect()
}

fn summarize(cfg: &RunConfig, records: &[TrialRecord]) -> Result<Summary> {
    let ok: Vec<TrialRecord> = records.iter().filter(|r| r.is_ok()).cloned().collect();
    let mut failure_kinds = BTreeMap::new();
    for r in records.iter().filter_map(|r| r.error.as_ref()) {
        *failure_kinds.entry(r.kind.clone()).or_insert(0) += 1;
    }
    let (stats, table) = if ok.is_empty() {
        (Value::Null, None)
    } else {
        experiment_stats(cfg, &ok)?
    };
    Ok(Summary {
        schema_version: SCHEMA_VERSION,
        experiment: cfg.experiment,
        trials: records.len(),
        succeeded: ok.len(),
        failed: records.len() - ok.len(),
        failure_kinds,
        stats,
        table,
    })
}

fn experiment_stats(cfg: &RunConfig, ok: &[TrialRecord]) -> Result<(Value, Option<Table>)> {
    Ok(match cfg.experiment {
        Experiment::Sample => {
            let s: Vec<SpectrumSample> = outputs(ok);
            let top: Vec<f64> = s.iter().map(|s| s.lambda1()).collect();
            let bottom: Vec<f64> = s.iter().map(|s| s.eigenvalues[s.n - 1]).collect();
            let rows = [("lambda_1", describe(&top)), ("lambda_n", describe(&bottom))];
            (json!({ "lambda_1": rows[0].1, "lambda_n": rows[1].1 }), Some(describe_table(&rows)))
        }
        Experiment::Overlap => {
            if cfg.method == Method::BldwHeuristic {
                let col = |k: &str| ok.iter().filter_map(|r| r.outputs.as_ref()?[k].as_f64()).collect::<Vec<f64>>();
                let rows = [("mean", describe(&col("mean"))), ("term_linear", describe(&col("term_linear")))];
                (json!({ "mean": rows[0].1, "term_linear": rows[1].1 }), Some(describe_table(&rows)))
            } else {
                let m = moments_of(ok);
                let m2: Vec<f64> = m.iter().map(|m| m.m2).collect();
                let m4: Vec<f64> = m.iter().filter_map(|m| m.m4).collect();
                let c4: Vec<f64> = m.iter().filter_map(|m| m.central4).collect();
                let flags: Vec<bool> = ok
                    .iter()
                    .filter_map(|r| r.outputs.as_ref()?["event_f"].as_bool())
                    .collect();
                let frac = flags.iter().filter(|f| **f).count() as f64 / flags.len().max(1) as f64;
                let rows = [("m2", describe(&m2)), ("m4", describe(&m4)), ("central4", describe(&c4))];
                (
                    json!({ "m2": rows[0].1, "m4": rows[1].1, "central4": rows[2].1, "event_f_fraction": frac }),
                    Some(describe_table(&rows)),
                )
            }
        }
        Experiment::Xi => {
            let x: Vec<XiEstimate> = outputs(ok);
            let v: Vec<f64> = x.iter().map(|x| x.value).collect();
            let rows = [("xi", describe(&v))];
            (json!({ "xi": rows[0].1 }), Some(describe_table(&rows)))
        }
        Experiment::Counting => {
            let counts: Vec<Vec<usize>> = ok
                .iter()
                .filter_map(|r| serde_json::from_value(r.outputs.as_ref()?["counts"].clone()).ok())
                .collect();
            let c = counting_summary(cfg.ensemble(), cfg.n, &cfg.t_grid, &counts);
            let mut t = Table::new(&["t", "empirical_mean", "empirical_var", "reference_mean"]);
            for i in 0..c.t_grid.len() {
                t.push(c.t_grid[i], &[c.empirical_mean[i], c.empirical_var[i], c.reference_mean[i]]);
            }
            (to_value(&c), Some(t))
        }
        Experiment::FrCheck => {
            let f: Vec<FrTrial> = outputs(ok);
            let r = fr_summary(cfg.n, &f)?;
            let mut t = Table::new(&["quantity", "ks"]);
            for (k, d) in r.ks_per_index.iter().enumerate() {
                t.push(format!("index_{}", k + 1), &[*d]);
            }
            for (x, d) in r.thresholds.iter().zip(&r.ks_counting) {
                t.push(format!("count_above_{x}"), &[*d]);
            }
            (to_value(&r), Some(t))
        }
        Experiment::Zerodiag => {
            let d: Vec<DiffReport> = outputs(ok);
            let k = cfg.k_max();
            let per_index: Vec<Option<Describe>> = (0..k)
                .map(|i| describe(&d.iter().map(|r| r.per_index_diffs[i]).collect::<Vec<_>>()))
                .collect();
            let diff1: Vec<f64> = d.iter().map(|r| r.per_index_diffs[0]).collect();
            let within: Vec<f64> = cfg
                .z_points()
                .iter()
                .enumerate()
                .map(|(g, z)| {
                    let b = stieltjes_bound(cfg.n, *z, cfg.delta);
                    d.iter().filter(|r| r.stieltjes_diffs[g].norm() <= b).count() as f64 / d.len() as f64
                })
                .collect();
            let names: Vec<String> = (1..=k).map(|i| format!("diff_{i}")).collect();
            let rows: Vec<(&str, Option<Describe>)> =
                names.iter().map(String::as_str).zip(per_index.iter().cloned()).collect();
            (
                json!({
                    "per_index": per_index,
                    "diff_1_q99": quantile(&diff1, 0.99),
                    "stieltjes_within_bound": within,
                }),
                Some(describe_table(&rows)),
            )
        }
        Experiment::Mainconv => {
            let m: Vec<MainconvTrial> = outputs(ok);
            let a: Vec<f64> = m.iter().map(|t| t.a).collect();
            let b: Vec<f64> = m.iter().flat_map(|t| t.b.iter().copied()).collect();
            let r = mainconv_from_samples(cfg.beta, cfg.n, cfg.n_airy(), &a, &b, cfg.trials - ok.len())?;
            let mut t = Table::new(&["quantity", "value"]);
            t.push("ks_plus", &[r.ks_plus]);
            t.push("ks_minus", &[r.ks_minus]);
            t.push("winning_sign", &[r.winning_sign as f64]);
            (to_value(&r), Some(t))
        }
        Experiment::GapTail => {
            let mut gaps: Vec<f64> = ok.iter().filter_map(|r| r.outputs.as_ref()?["gap"].as_f64()).collect();
            gaps.sort_by(f64::total_cmp);
            let m = gaps.len() as f64;
            let mut t = Table::new(&["s", "cdf", "stderr"]);
            let mut cdf = Vec::new();
            for s in &cfg.t_grid {
                let p = gaps.partition_point(|g| g < s) as f64 / m;
                let se = (p * (1.0 - p) / m).sqrt();
                cdf.push(p);
                t.push(s, &[p, se]);
            }
            (json!({ "gap": describe(&gaps), "s_grid": cfg.t_grid, "cdf": cdf }), Some(t))
        }
    })
}
