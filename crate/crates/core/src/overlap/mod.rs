//! Overlap moments of two replicas, computed by contour quadrature, by the
//! low-temperature expansion, and by brute-force Gibbs sampling.

mod bldw;
mod gibbs;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::ensembles::SpectrumSample;
use crate::error::{Error, Result};
use crate::saddle::{contour_integrals, ContourPath, ContourSpec, SaddleFrame};
use crate::spectral::{check_top_gap, event_flags, m_tilde, m_tilde_prime};

pub use bldw::{bldw_heuristic, bldw_surrogate, BldwSample};
pub use gibbs::gibbs_mc_oracle;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Method {
    ContourExact,
    Expansion,
    MonteCarlo,
    BldwHeuristic,
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "contour" | "contour_exact" => Method::ContourExact,
            "expansion" => Method::Expansion,
            "mc" | "monte_carlo" => Method::MonteCarlo,
            "bldw" | "bldw_heuristic" => Method::BldwHeuristic,
            _ => return Err(Error::invalid(format!("unknown method `{s}`"))),
        })
    }
}

/// Moments of the replica overlap `R12` under the Gibbs measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverlapMoments {
    pub m2: f64,
    pub m4: Option<f64>,
    pub central4: Option<f64>,
    pub abs1: Option<f64>,
    pub method: Method,
    /// Error estimate for `m2` (quadrature error, or Monte Carlo standard error).
    pub err: f64,
    pub err_m4: Option<f64>,
    pub err_abs1: Option<f64>,
    pub beta: f64,
    pub n: usize,
    pub seed: u64,
}

/// Plateau value `q = (β - 1)/β`.
pub fn q_of_beta(beta: f64) -> f64 {
    (beta - 1.0) / beta
}

fn check_beta(beta: f64) -> Result<()> {
    if !(beta > 1.0) || !beta.is_finite() {
        return Err(Error::OutOfRegime(format!(
            "beta = {beta}: the low-temperature formulas need beta > 1"
        )));
    }
    Ok(())
}

/// Contour quadrature of `⟨R12²⟩` and optionally `⟨R12⁴⟩` on a given frame.
///
/// With `a_i(z) = 1/(βN(z - λ_i))`, `D = ∫ w`, `I_i = ∫ w a_i`, `J_i = ∫ w a_i²`:
/// `m2 = Σ I_i² / D²` and `m4 = (6 Σ J_i² + 3 Σ_{i,j} K_ij²) / D²`, where
/// `K_ii = J_i` and `K_ij = (I_i - I_j)/(βN(λ_i - λ_j))` otherwise.
pub fn overlap_contour_on_frame(
    frame: &SaddleFrame,
    spec: &ContourSpec,
    path: ContourPath,
    with_m4: bool,
) -> Result<(f64, Option<f64>, f64)> {
    let ev = &frame.eigenvalues;
    let n = ev.len();
    let bn = frame.beta * n as f64;
    let dim = if with_m4 { 2 * n + 1 } else { n + 1 };
    let r = contour_integrals(frame, path, spec, dim, |z, out| {
        out[0] = Complex64::new(1.0, 0.0);
        for (i, &l) in ev.iter().enumerate() {
            let a = ((z - l) * bn).inv();
            out[1 + i] = a;
            if with_m4 {
                out[1 + n + i] = a * a;
            }
        }
    })?;
    let d = r.values[0].im;
    if !(d.abs() > 0.0) || !d.is_finite() {
        return Err(Error::numeric("normalizing contour integral vanished", f64::INFINITY));
    }
    let ed = r.errors[0] / d.abs();
    let ratio: Vec<f64> = (0..n).map(|i| r.values[1 + i].im / d).collect();
    let m2: f64 = ratio.iter().map(|x| x * x).sum();
    let mut err: f64 = (0..n)
        .map(|i| 2.0 * ratio[i].abs() * (r.errors[1 + i] / d.abs() + ratio[i].abs() * ed))
        .sum();
    if r.truncation_error.is_finite() {
        err += 2.0 * m2 * r.truncation_error / d.abs();
    } else {
        err = f64::INFINITY;
    }
    if !with_m4 {
        return Ok((m2, None, err));
    }
    let jr: Vec<f64> = (0..n).map(|i| r.values[1 + n + i].im / d).collect();
    let diag: f64 = jr.iter().map(|x| x * x).sum();
    let mut off = 0.0;
    for i in 0..n {
        for j in 0..i {
            let gap = ev[i] - ev[j];
            let k = if gap.abs() < 1e-10 {
                0.5 * (jr[i] + jr[j])
            } else {
                (ratio[i] - ratio[j]) / (bn * gap)
            };
            off += 2.0 * k * k;
        }
    }
    let m4 = 9.0 * diag + 3.0 * off;
    Ok((m2, Some(m4), err))
}

fn contour_moments(
    spectrum: &SpectrumSample,
    beta: f64,
    spec: &ContourSpec,
    with_m4: bool,
) -> Result<OverlapMoments> {
    check_beta(beta)?;
    let frame = SaddleFrame::new(spectrum, beta)?;
    let (m2, m4, err) = overlap_contour_on_frame(&frame, spec, ContourPath::SteepestDescent, with_m4)
        .map_err(|e| e.with_seed(spectrum.seed))?;
    let q2 = q_of_beta(beta).powi(2);
    Ok(OverlapMoments {
        m2,
        m4,
        central4: m4.map(|m4| m4 - 2.0 * q2 * m2 + q2 * q2),
        abs1: None,
        method: Method::ContourExact,
        err,
        err_m4: m4.map(|m4| m4 * err / m2.max(f64::MIN_POSITIVE)),
        err_abs1: None,
        beta,
        n: spectrum.n,
        seed: spectrum.seed,
    })
}

/// `⟨R12²⟩` by contour quadrature.
pub fn overlap_m2_contour(spectrum: &SpectrumSample, beta: f64, spec: &ContourSpec) -> Result<OverlapMoments> {
    contour_moments(spectrum, beta, spec, false)
}

/// `⟨R12²⟩` and `⟨R12⁴⟩` (and the centered fourth moment) by contour quadrature.
pub fn overlap_m4_contour(spectrum: &SpectrumSample, beta: f64, spec: &ContourSpec) -> Result<OverlapMoments> {
    contour_moments(spectrum, beta, spec, true)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpansionReport {
    pub q2: f64,
    pub term_linear: f64,
    pub term_mprime: f64,
    pub term_square: f64,
    pub predicted_error_scale: f64,
}

/// Whether the expansion is gated on the rigidity/gap event.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExpansionGate {
    Require { delta: f64, eps1: f64 },
    Force,
}

/// Default exponents `(δ, ε₁)` for the expansion's predicted residual scale.
pub const EXPANSION_EXPONENTS: (f64, f64) = (0.1, 0.02);

/// `N^{3δ + 10ε₁ - 1}`.
pub fn predicted_error_scale(n: usize, delta: f64, eps1: f64) -> f64 {
    (n as f64).powf(3.0 * delta + 10.0 * eps1 - 1.0)
}

/// Expansion terms from the two edge sums `m̃ = m̃_N(λ1)` and `m̃′ = m̃′_N(λ1)`.
pub fn expansion_from_sums(beta: f64, n: usize, mt: f64, mtp: f64) -> (OverlapMoments, ExpansionReport) {
    let nf = n as f64;
    let q = q_of_beta(beta);
    let b2 = beta * beta;
    let s = mt + 1.0;
    let report = ExpansionReport {
        q2: q * q,
        term_linear: 2.0 * (beta - 1.0) / b2 * s,
        term_mprime: -mtp / (nf * b2),
        term_square: s * s / b2,
        predicted_error_scale: predicted_error_scale(n, EXPANSION_EXPONENTS.0, EXPANSION_EXPONENTS.1),
    };
    let m2 = report.q2 + report.term_linear + report.term_mprime + report.term_square;
    let bm1 = (beta - 1.0) * (beta - 1.0);
    let central4 = 8.0 * bm1 / b2 * mtp / nf + 4.0 * bm1 / (b2 * b2) * s * s;
    let m4 = central4 + 2.0 * q * q * m2 - q.powi(4);
    let moments = OverlapMoments {
        m2,
        m4: Some(m4),
        central4: Some(central4),
        abs1: Some(q + s / beta),
        method: Method::Expansion,
        err: report.predicted_error_scale,
        err_m4: None,
        err_abs1: None,
        beta,
        n,
        seed: 0,
    };
    (moments, report)
}

pub fn overlap_expansion(
    spectrum: &SpectrumSample,
    beta: f64,
    gate: ExpansionGate,
) -> Result<(OverlapMoments, ExpansionReport)> {
    check_beta(beta)?;
    let ev = &spectrum.eigenvalues;
    check_top_gap(ev)?;
    let (mut moments, mut report) =
        expansion_from_sums(beta, spectrum.n, m_tilde(ev, ev[0]), m_tilde_prime(ev, ev[0]));
    moments.seed = spectrum.seed;
    if let ExpansionGate::Require { delta, eps1 } = gate {
        let flags = event_flags(spectrum, delta, eps1)?;
        if !flags.event_f {
            return Err(Error::PreconditionViolated(format!(
                "spectrum (seed {}) is outside the gap/rigidity event (gap_ok = {}, rigidity_ok = {})",
                spectrum.seed, flags.gap_ok, flags.rigidity_ok
            )));
        }
        let scale = predicted_error_scale(spectrum.n, delta, eps1);
        report.predicted_error_scale = scale;
        moments.err = scale;
    }
    Ok((moments, report))
}
