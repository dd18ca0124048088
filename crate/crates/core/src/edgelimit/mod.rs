//! Edge limit theory: the Ξ estimators, edge counting statistics, the
//! superposition/decimation coupling and the distributional overlap test.

mod fr;
mod mainconv;

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ensembles::{sample_spectrum, sample_tridiagonal, EnsembleKind, SpectrumSample};
use crate::error::{Error, Result};
use crate::harness::seed::derive_seed;
use crate::spectral::check_top_gap;

pub use fr::{fr_decimation_check, fr_summary, fr_thresholds, fr_trial, FrReport, FrTrial};
pub use mainconv::{check_mainconv, AIRY_PER_TRIAL, mainconv_from_samples, mainconv_test, mainconv_trial, MainconvReport, MainconvTrial};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum XiEstimator {
    FullSpectrum,
    Cutoff,
}

impl std::str::FromStr for XiEstimator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "full" | "full_spectrum" => Ok(XiEstimator::FullSpectrum),
            "cutoff" => Ok(XiEstimator::Cutoff),
            _ => Err(Error::invalid(format!("unknown estimator `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct XiEstimate {
    pub value: f64,
    pub estimator: XiEstimator,
    pub n_matrix: usize,
    pub cutoff: Option<usize>,
    pub seed: u64,
}

/// `(1/π) ∫_0^T x^{-1/2} dx = 2√T/π` at `T = (3πn/2)^{2/3}`.
pub fn xi_correction(n: usize) -> f64 {
    2.0 / PI * (1.5 * PI * n as f64).cbrt()
}

/// `Σ_{j=2}^{cutoff} 1/(χ_j - χ_1) - xi_correction(cutoff)` with
/// `χ_j = N^{2/3}(2 - λ_j)`, from the leading eigenvalues of an `N × N` matrix.
pub fn xi_cutoff_from_top(top: &[f64], n_matrix: usize, cutoff: usize) -> Result<f64> {
    if cutoff == 0 || cutoff > top.len() {
        return Err(Error::invalid(format!(
            "cutoff {cutoff} needs between 1 and {} leading eigenvalues",
            top.len()
        )));
    }
    if cutoff >= 2 {
        check_top_gap(top)?;
    }
    let n23 = (n_matrix as f64).powf(2.0 / 3.0);
    let sum: f64 = top[1..cutoff].iter().map(|l| 1.0 / (n23 * (top[0] - l))).sum();
    Ok(sum - xi_correction(cutoff))
}

/// `N^{1/3}((1/N) Σ_{j≥2} 1/(λ1 - λ_j) - 1)`.
pub fn xi_full_from_spectrum(eigenvalues: &[f64]) -> Result<f64> {
    check_top_gap(eigenvalues)?;
    let n = eigenvalues.len() as f64;
    let l1 = eigenvalues[0];
    let s: f64 = eigenvalues[1..].iter().map(|l| 1.0 / (l1 - l)).sum::<f64>() / n;
    Ok(n.cbrt() * (s - 1.0))
}

/// Full-spectrum estimate from one tridiagonal GOE draw without
/// diagonalizing it: `Σ_{j≥2} 1/(λ1 - λ_j)` is the resolvent trace with the
/// top pole removed, extrapolated to `λ1` from three points just above it.
pub fn xi_full_tridiagonal(n_matrix: usize, seed: u64) -> Result<XiEstimate> {
    let t = sample_tridiagonal(EnsembleKind::GoeTridiag, n_matrix, seed)?;
    let top = t.top_eigenvalues(2);
    check_top_gap(&top).map_err(|e| e.with_seed(seed))?;
    let h = 1e-3 * (top[0] - top[1]);
    let g = |k: f64| t.resolvent_trace(top[0] + k * h) - 1.0 / (k * h);
    let sum = 3.0 * g(1.0) - 3.0 * g(2.0) + g(3.0);
    let n = n_matrix as f64;
    Ok(XiEstimate {
        value: n.cbrt() * (sum / n - 1.0),
        estimator: XiEstimator::FullSpectrum,
        n_matrix,
        cutoff: None,
        seed,
    })
}

pub fn xi_estimate(spectrum: &SpectrumSample, estimator: XiEstimator, cutoff: Option<usize>) -> Result<XiEstimate> {
    let n = spectrum.n;
    let value = match estimator {
        XiEstimator::FullSpectrum => xi_full_from_spectrum(&spectrum.eigenvalues)?,
        XiEstimator::Cutoff => {
            let c = cutoff.ok_or_else(|| Error::invalid("the cutoff estimator needs a cutoff"))?;
            if c >= n {
                return Err(Error::invalid(format!("cutoff {c} must be below n = {n}")));
            }
            xi_cutoff_from_top(&spectrum.eigenvalues, n, c)?
        }
    };
    Ok(XiEstimate {
        value,
        estimator,
        n_matrix: n,
        cutoff: if estimator == XiEstimator::Cutoff { cutoff } else { None },
        seed: spectrum.seed,
    })
}

/// Cutoff estimates for several cutoffs from one tridiagonal GOE draw, using
/// only the leading `max(cutoffs)` eigenvalues.
pub fn xi_cutoff_tridiagonal(n_matrix: usize, cutoffs: &[usize], seed: u64) -> Result<Vec<XiEstimate>> {
    let k = cutoffs.iter().copied().max().unwrap_or(0);
    if cutoffs.is_empty() || cutoffs.contains(&0) || k >= n_matrix {
        return Err(Error::invalid(format!(
            "cutoffs must lie in [1, {n_matrix})"
        )));
    }
    let t = sample_tridiagonal(EnsembleKind::GoeTridiag, n_matrix, seed)?;
    let top = t.top_eigenvalues(k);
    cutoffs
        .iter()
        .map(|&c| {
            Ok(XiEstimate {
                value: xi_cutoff_from_top(&top, n_matrix, c).map_err(|e| e.with_seed(seed))?,
                estimator: XiEstimator::Cutoff,
                n_matrix,
                cutoff: Some(c),
                seed,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountingStats {
    pub t_grid: Vec<f64>,
    pub empirical_mean: Vec<f64>,
    pub empirical_var: Vec<f64>,
    /// `(2/3π) T^{3/2}`.
    pub reference_mean: Vec<f64>,
    pub trials: usize,
    pub ensemble: EnsembleKind,
    pub n: usize,
}

pub fn counting_reference_mean(t: f64) -> f64 {
    2.0 / (3.0 * PI) * t.powf(1.5)
}

pub fn check_counting_grid(n: usize, t_grid: &[f64]) -> Result<()> {
    let hi = (n as f64).powf(2.0 / 3.0 - 0.1);
    if t_grid.is_empty() {
        return Err(Error::invalid("counting grid is empty"));
    }
    if let Some(t) = t_grid.iter().find(|t| !(**t >= 1.0 && **t <= hi)) {
        return Err(Error::invalid(format!(
            "grid point {t} is outside [1, {hi:.3}] for n = {n}"
        )));
    }
    Ok(())
}

/// `#{i : λ_i ≥ 2 - T n^{-2/3}}` for every `T` in the grid, from one draw.
pub fn counting_trial(kind: EnsembleKind, n: usize, t_grid: &[f64], seed: u64) -> Result<Vec<usize>> {
    let scale = (n as f64).powf(-2.0 / 3.0);
    if kind.is_tridiagonal() {
        let t = sample_tridiagonal(kind, n, seed)?;
        Ok(t_grid.iter().map(|s| t.count_at_or_above(2.0 - s * scale)).collect())
    } else {
        let s = sample_spectrum(kind, n, seed)?;
        let ev = &s.eigenvalues;
        Ok(t_grid
            .iter()
            .map(|t| ev.partition_point(|l| *l >= 2.0 - t * scale))
            .collect())
    }
}

/// Aggregates per-trial counts (trial-major) into grid-wise moments.
pub fn counting_summary(kind: EnsembleKind, n: usize, t_grid: &[f64], counts: &[Vec<usize>]) -> CountingStats {
    let (mut mean, mut var) = (Vec::new(), Vec::new());
    for g in 0..t_grid.len() {
        let col: Vec<f64> = counts.iter().map(|c| c[g] as f64).collect();
        mean.push(crate::harness::stats::mean(&col).unwrap_or(f64::NAN));
        var.push(crate::harness::stats::variance(&col).unwrap_or(f64::NAN));
    }
    CountingStats {
        t_grid: t_grid.to_vec(),
        empirical_mean: mean,
        empirical_var: var,
        reference_mean: t_grid.iter().map(|t| counting_reference_mean(*t)).collect(),
        trials: counts.len(),
        ensemble: kind,
        n,
    }
}

pub fn counting_stats(
    kind: EnsembleKind,
    n: usize,
    t_grid: &[f64],
    trials: usize,
    seed: u64,
) -> Result<CountingStats> {
    check_counting_grid(n, t_grid)?;
    if trials < 100 {
        return Err(Error::invalid("counting statistics need at least 100 trials"));
    }
    let counts = (0..trials as u64)
        .into_par_iter()
        .map(|t| counting_trial(kind, n, t_grid, derive_seed(seed, t, 0)))
        .collect::<Result<Vec<_>>>()?;
    Ok(counting_summary(kind, n, t_grid, &counts))
}
