//! Comparison of a GOE matrix with its zero-diagonal part on one draw.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::ensembles::CoupledPair;
use crate::error::{Error, Result};
use crate::spectral::{m_sc, stieltjes_sum};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiffReport {
    pub n: usize,
    pub k_max: usize,
    /// `|λ_i(H) - λ_i(M)|` for `i = 1..=k_max`.
    pub per_index_diffs: Vec<f64>,
    pub z_grid: Vec<Complex64>,
    /// `m_M(z) - m_H(z)` on `z_grid`.
    pub stieltjes_diffs: Vec<Complex64>,
    pub seed: u64,
}

/// Largest admissible `k_max`: `max(1, ⌊n^{1/20}⌋ + 4)`, capped at `n`.
pub fn max_k(n: usize) -> usize {
    ((n as f64).powf(0.05).floor() as usize + 4).max(1).min(n)
}

pub fn ev_diff_report(pair: &CoupledPair, k_max: usize) -> Result<DiffReport> {
    let n = pair.spectrum_h.n;
    if k_max == 0 || k_max > max_k(n) {
        return Err(Error::invalid(format!(
            "k_max = {k_max} must lie in [1, {}]",
            max_k(n)
        )));
    }
    let h = &pair.spectrum_h.eigenvalues;
    let m = &pair.spectrum_m.eigenvalues;
    Ok(DiffReport {
        n,
        k_max,
        per_index_diffs: h.iter().zip(m).take(k_max).map(|(a, b)| (a - b).abs()).collect(),
        z_grid: Vec::new(),
        stieltjes_diffs: Vec::new(),
        seed: pair.seed,
    })
}

/// Checks `n^δ/n ≤ Im z ≤ n^{-δ}` for every grid point.
pub fn check_stieltjes_window(n: usize, z_grid: &[Complex64], delta: f64) -> Result<()> {
    let nf = n as f64;
    let (lo, hi) = (nf.powf(delta) / nf, nf.powf(-delta));
    match z_grid.iter().find(|z| !(z.im >= lo && z.im <= hi)) {
        Some(z) => Err(Error::invalid(format!(
            "Im z = {} is outside [{lo:.3e}, {hi:.3e}]",
            z.im
        ))),
        None => Ok(()),
    }
}

/// `m_M(z) - m_H(z)` on the grid. With `Some(δ)` the grid must lie in the
/// mesoscopic window; with `None` only `Im z > 0` is required.
pub fn stieltjes_diff(pair: &CoupledPair, z_grid: &[Complex64], delta: Option<f64>) -> Result<Vec<Complex64>> {
    if let Some(d) = delta {
        check_stieltjes_window(pair.spectrum_h.n, z_grid, d)?;
    }
    if let Some(z) = z_grid.iter().find(|z| !(z.im > 0.0)) {
        return Err(Error::invalid(format!("Im z = {} must be positive", z.im)));
    }
    Ok(z_grid
        .iter()
        .map(|&z| stieltjes_sum(&pair.spectrum_m.eigenvalues, z) - stieltjes_sum(&pair.spectrum_h.eigenvalues, z))
        .collect())
}

/// `(n^ε/(nη))(1/(nη) + Im m_sc(z))`.
pub fn stieltjes_bound(n: usize, z: Complex64, eps: f64) -> f64 {
    let nf = n as f64;
    let ne = nf * z.im;
    nf.powf(eps) / ne * (1.0 / ne + m_sc(z).im)
}

impl DiffReport {
    pub fn with_stieltjes(mut self, pair: &CoupledPair, z_grid: &[Complex64], delta: Option<f64>) -> Result<Self> {
        self.stieltjes_diffs = stieltjes_diff(pair, z_grid, delta)?;
        self.z_grid = z_grid.to_vec();
        Ok(self)
    }
}
