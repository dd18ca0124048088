use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::ensembles::{rng_from_seed, SpectrumSample};
use crate::error::{Error, Result};
use crate::spectral::check_top_gap;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BldwSample {
    pub samples: Vec<f64>,
    pub mean: f64,
    pub stderr: f64,
    pub variance: f64,
    /// `2((β-1)/β²)(m̃_N(λ1) + 1)`, the mean of the surrogate.
    pub term_linear: f64,
    /// `2 (2(β-1)/β²)² (1/N²) Σ_{j≥2} (λ_j - λ1)^{-2}`, its variance.
    pub predicted_variance: f64,
}

/// `(2(β-1)/β²)((1/N) Σ_{j≥2} n_j²/(λ_j - λ1) + 1)` for given normals `n_j`, `j ≥ 2`.
pub fn bldw_surrogate(spectrum: &SpectrumSample, beta: f64, normals: &[f64]) -> Result<f64> {
    let ev = &spectrum.eigenvalues;
    check_top_gap(ev)?;
    if normals.len() + 1 != ev.len() {
        return Err(Error::invalid("need one normal per eigenvalue below the top"));
    }
    let l1 = ev[0];
    let sum: f64 = ev[1..].iter().zip(normals).map(|(l, x)| x * x / (l - l1)).sum();
    Ok(2.0 * (beta - 1.0) / (beta * beta) * (sum / ev.len() as f64 + 1.0))
}

pub fn bldw_heuristic(
    spectrum: &SpectrumSample,
    beta: f64,
    n_samples: usize,
    seed: u64,
) -> Result<BldwSample> {
    if !(beta > 1.0) {
        return Err(Error::OutOfRegime(format!("beta = {beta} must exceed 1")));
    }
    if n_samples < 2 {
        return Err(Error::invalid("n_samples must be at least 2"));
    }
    let ev = &spectrum.eigenvalues;
    check_top_gap(ev)?;
    let mut rng = rng_from_seed(seed);
    let mut normals = vec![0.0; ev.len() - 1];
    let samples: Vec<f64> = (0..n_samples)
        .map(|_| {
            normals
                .iter_mut()
                .for_each(|x| *x = StandardNormal.sample(&mut rng));
            bldw_surrogate(spectrum, beta, &normals)
        })
        .collect::<Result<_>>()?;
    let m = n_samples as f64;
    let mean = samples.iter().sum::<f64>() / m;
    let variance = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1.0);
    let nf = ev.len() as f64;
    let c = 2.0 * (beta - 1.0) / (beta * beta);
    let l1 = ev[0];
    let mt: f64 = ev[1..].iter().map(|l| 1.0 / (l - l1)).sum::<f64>() / nf;
    let inv2: f64 = ev[1..].iter().map(|l| (l - l1).powi(-2)).sum::<f64>() / (nf * nf);
    Ok(BldwSample {
        stderr: (variance / m).sqrt(),
        samples,
        mean,
        variance,
        term_linear: c * (mt + 1.0),
        predicted_variance: 2.0 * c * c * inv2,
    })
}
