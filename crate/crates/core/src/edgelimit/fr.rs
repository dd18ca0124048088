use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ensembles::{rng_from_seed, sample_eigenvalues_normalized, EnsembleKind};
use crate::error::{Error, Result};
use crate::harness::seed::derive_seed;
use crate::harness::stats::ks_statistic;

/// Edge-scaled counting thresholds `2 - t n^{-2/3}`.
const COUNT_T: [f64; 4] = [0.0, 1.0, 2.0, 4.0];

/// One draw of `GOE_n`, `GOE_{n+1}` and `GUE_n`, all normalized by `1/n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrTrial {
    /// 2nd, 4th, ... largest points of the superposition, at most 5 of them.
    pub decimated: Vec<f64>,
    /// Leading GUE eigenvalues, as many as `decimated`.
    pub gue: Vec<f64>,
    /// Superposition points at or above each threshold.
    pub superposition_counts: Vec<usize>,
    pub gue_counts: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrReport {
    pub n: usize,
    pub trials: usize,
    /// KS distance between the k-th decimated point and the k-th GUE eigenvalue.
    pub ks_per_index: Vec<f64>,
    pub thresholds: Vec<f64>,
    /// KS distance between `⌊count_superposition / 2⌋` and `count_gue` per threshold.
    pub ks_counting: Vec<f64>,
}

pub fn fr_thresholds(n: usize) -> Vec<f64> {
    let s = (n as f64).powf(-2.0 / 3.0);
    COUNT_T.iter().map(|t| 2.0 - t * s).collect()
}

pub fn fr_trial(n: usize, seed: u64) -> Result<FrTrial> {
    if n == 0 {
        return Err(Error::invalid("n must be positive"));
    }
    let nf = n as f64;
    let mut rng = rng_from_seed(seed);
    let mut sup = sample_eigenvalues_normalized(EnsembleKind::GoeDense, n, nf, &mut rng)?;
    sup.extend(sample_eigenvalues_normalized(EnsembleKind::GoeDense, n + 1, nf, &mut rng)?);
    let gue = sample_eigenvalues_normalized(EnsembleKind::GueDense, n, nf, &mut rng)?;
    sup.sort_by(|a, b| b.total_cmp(a));
    let k = n.min(5);
    let count = |v: &[f64], x: f64| v.partition_point(|l| *l >= x);
    let th = fr_thresholds(n);
    Ok(FrTrial {
        decimated: sup.iter().skip(1).step_by(2).take(k).copied().collect(),
        gue: gue[..k].to_vec(),
        superposition_counts: th.iter().map(|x| count(&sup, *x)).collect(),
        gue_counts: th.iter().map(|x| count(&gue, *x)).collect(),
    })
}

pub fn fr_summary(n: usize, trials: &[FrTrial]) -> Result<FrReport> {
    let k = n.min(5);
    let column = |f: &dyn Fn(&FrTrial) -> f64| trials.iter().map(f).collect::<Vec<f64>>();
    let ks_per_index = (0..k)
        .map(|i| ks_statistic(&column(&|t| t.decimated[i]), &column(&|t| t.gue[i])))
        .collect::<Result<_>>()?;
    let ks_counting = (0..COUNT_T.len())
        .map(|g| {
            ks_statistic(
                &column(&|t| (t.superposition_counts[g] / 2) as f64),
                &column(&|t| t.gue_counts[g] as f64),
            )
        })
        .collect::<Result<_>>()?;
    Ok(FrReport {
        n,
        trials: trials.len(),
        ks_per_index,
        thresholds: fr_thresholds(n),
        ks_counting,
    })
}

pub fn fr_decimation_check(n: usize, trials: usize, seed: u64) -> Result<FrReport> {
    if trials < 1000 {
        return Err(Error::invalid("the decimation check needs at least 1000 trials"));
    }
    let draws = (0..trials as u64)
        .into_par_iter()
        .map(|t| fr_trial(n, derive_seed(seed, t, 0)))
        .collect::<Result<Vec<_>>>()?;
    fr_summary(n, &draws)
}
