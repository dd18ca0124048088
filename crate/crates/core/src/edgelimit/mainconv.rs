use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::xi_full_tridiagonal;
use crate::ensembles::{sample_spectrum, EnsembleKind};
use crate::error::{Error, Result};
use crate::harness::seed::derive_seed;
use crate::harness::stats::ks_statistic;
use crate::overlap::{overlap_m2_contour, q_of_beta};
use crate::saddle::ContourSpec;

/// Default number of `B` draws per `A` draw.
pub const AIRY_PER_TRIAL: usize = 10;

/// One overlap fluctuation `A` and independent scaled edge variables `B`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MainconvTrial {
    /// `N^{1/3}(⟨R12²⟩ - q²)` on a zero-diagonal GOE of size `n_overlap`.
    pub a: f64,
    /// `2((β-1)/β²) Ξ̂` with the full-spectrum estimator at size `n_airy`.
    pub b: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MainconvReport {
    pub beta: f64,
    pub n_overlap: usize,
    pub n_airy: usize,
    pub trials: usize,
    pub failures: usize,
    pub ks_plus: f64,
    pub ks_minus: f64,
    /// `+1` if `A` is closer in law to `B`, `-1` if closer to `-B`.
    pub winning_sign: i8,
}

impl MainconvReport {
    pub fn ks_min(&self) -> f64 {
        self.ks_plus.min(self.ks_minus)
    }
}

pub fn check_mainconv(beta: f64, n_overlap: usize, n_airy: usize) -> Result<()> {
    if !(beta > 1.0) || !beta.is_finite() {
        return Err(Error::OutOfRegime(format!("beta = {beta} must exceed 1")));
    }
    if n_overlap < 250 {
        return Err(Error::invalid("n_overlap must be at least 250"));
    }
    if n_airy < 4 * n_overlap {
        return Err(Error::invalid("n_airy must be at least 4 n_overlap"));
    }
    Ok(())
}

pub fn mainconv_trial(
    beta: f64,
    n_overlap: usize,
    n_airy: usize,
    airy_per_trial: usize,
    seed: u64,
) -> Result<MainconvTrial> {
    let s = sample_spectrum(EnsembleKind::GoeZeroDiag, n_overlap, derive_seed(seed, 0, 0))?;
    let m = overlap_m2_contour(&s, beta, &ContourSpec::default()).map_err(|e| e.with_seed(s.seed))?;
    let q = q_of_beta(beta);
    let a = (n_overlap as f64).cbrt() * (m.m2 - q * q);
    let c = 2.0 * (beta - 1.0) / (beta * beta);
    let b = (0..airy_per_trial as u64)
        .map(|k| Ok(c * xi_full_tridiagonal(n_airy, derive_seed(seed, k, 1))?.value))
        .collect::<Result<_>>()?;
    Ok(MainconvTrial { a, b })
}

/// Compares the `A` sample against `B` and `-B`.
pub fn mainconv_from_samples(
    beta: f64,
    n_overlap: usize,
    n_airy: usize,
    a: &[f64],
    b: &[f64],
    failures: usize,
) -> Result<MainconvReport> {
    let neg: Vec<f64> = b.iter().map(|x| -x).collect();
    let ks_plus = ks_statistic(a, b)?;
    let ks_minus = ks_statistic(a, &neg)?;
    Ok(MainconvReport {
        beta,
        n_overlap,
        n_airy,
        trials: a.len() + failures,
        failures,
        ks_plus,
        ks_minus,
        winning_sign: if ks_plus <= ks_minus { 1 } else { -1 },
    })
}

pub fn mainconv_test(beta: f64, n_overlap: usize, n_airy: usize, trials: usize, seed: u64) -> Result<MainconvReport> {
    check_mainconv(beta, n_overlap, n_airy)?;
    if trials == 0 {
        return Err(Error::invalid("trials must be positive"));
    }
    let results: Vec<Result<MainconvTrial>> = (0..trials as u64)
        .into_par_iter()
        .map(|t| mainconv_trial(beta, n_overlap, n_airy, AIRY_PER_TRIAL, derive_seed(seed, t, 0)))
        .collect();
    let ok: Vec<&MainconvTrial> = results.iter().filter_map(|r| r.as_ref().ok()).collect();
    if ok.is_empty() {
        return Err(Error::AllTrialsFailed(trials));
    }
    let a: Vec<f64> = ok.iter().map(|t| t.a).collect();
    let b: Vec<f64> = ok.iter().flat_map(|t| t.b.iter().copied()).collect();
    mainconv_from_samples(beta, n_overlap, n_airy, &a, &b, trials - ok.len())
}
