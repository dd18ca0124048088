//! Steepest-descent machinery: phase functions, the contour equation for
//! `η(E)`, closed-form keyhole integrals and the line integrals behind the
//! overlap moments.

mod contour;
mod keyhole;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::ensembles::SpectrumSample;
use crate::error::{Error, Result};
use crate::spectral::{m_tilde, m_tilde_prime};

pub use contour::{
    contour_integrals, gamma_hat, vertical_line_integral, ContourIntegrals, ContourPath, LineIntegral,
};
pub use keyhole::{keyhole_closed_form, keyhole_quadrature, KeyholeKind};

/// Quadrature controls shared by every contour integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContourSpec {
    /// Upper limit of `Im z - γ` on the literal vertical line.
    pub truncation_height: f64,
    pub panel_target_error: f64,
    pub max_panels: usize,
}

impl Default for ContourSpec {
    fn default() -> Self {
        Self {
            truncation_height: 10.0,
            panel_target_error: 1e-10,
            max_panels: 4000,
        }
    }
}

impl ContourSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.truncation_height > 0.0) {
            return Err(Error::invalid("truncation_height must be positive"));
        }
        if !(self.panel_target_error > 0.0 && self.panel_target_error <= 1e-6) {
            return Err(Error::invalid("panel_target_error must lie in (0, 1e-6]"));
        }
        if self.max_panels == 0 {
            return Err(Error::invalid("max_panels must be positive"));
        }
        Ok(())
    }

    pub(crate) fn quad_options(&self) -> crate::quadrature::QuadOptions {
        crate::quadrature::QuadOptions {
            rel_tol: self.panel_target_error,
            abs_tol: 1e-300,
            max_intervals: self.max_panels,
        }
    }
}

/// Saddle-point data for one spectrum at inverse temperature `beta`.
#[derive(Debug, Clone, PartialEq)]
pub struct SaddleFrame {
    pub beta: f64,
    pub c_beta: f64,
    pub gamma: f64,
    pub a: f64,
    pub b: f64,
    pub m_tilde_gamma: f64,
    pub m_tilde_prime_gamma: f64,
    pub eigenvalues: Vec<f64>,
}

impl SaddleFrame {
    pub fn new(spectrum: &SpectrumSample, beta: f64) -> Result<Self> {
        let c_beta = c_beta(beta)?;
        let gamma = spectrum.lambda1() + c_beta / spectrum.n as f64;
        Self::with_gamma(spectrum, beta, gamma)
    }

    /// Frame anchored at an arbitrary `gamma > λ1`.
    pub fn with_gamma(spectrum: &SpectrumSample, beta: f64, gamma: f64) -> Result<Self> {
        let c_beta = c_beta(beta)?;
        let ev = &spectrum.eigenvalues;
        if ev.is_empty() {
            return Err(Error::invalid("empty spectrum"));
        }
        if !(gamma > ev[0]) {
            return Err(Error::invalid(format!("gamma = {gamma} must exceed λ1 = {}", ev[0])));
        }
        let (mt, mtp) = if ev.len() > 1 {
            (m_tilde(ev, gamma), m_tilde_prime(ev, gamma))
        } else {
            (0.0, 0.0)
        };
        Ok(Self {
            beta,
            c_beta,
            gamma,
            a: 0.5 * (beta + mt),
            b: c_beta,
            m_tilde_gamma: mt,
            m_tilde_prime_gamma: mtp,
            eigenvalues: ev.clone(),
        })
    }

    pub fn n(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn lambda1(&self) -> f64 {
        self.eigenvalues[0]
    }

    /// `N (G(z) - G(γ)) / 2`, summed as `log(1 + (z-γ)/(γ-λ_i))` to avoid cancellation.
    #[inline]
    pub fn half_exponent(&self, z: Complex64) -> Complex64 {
        let n = self.n() as f64;
        let dz = z - self.gamma;
        let logs: Complex64 = self
            .eigenvalues
            .iter()
            .map(|&l| (1.0 + dz / (self.gamma - l)).ln())
            .sum();
        0.5 * (n * self.beta * dz - logs)
    }

    /// `G(z) - G(γ)`.
    pub fn phase_diff(&self, z: Complex64) -> Result<Complex64> {
        check_off_cut(z, self.lambda1())?;
        Ok(self.half_exponent(z) * (2.0 / self.n() as f64))
    }
}

pub fn c_beta(beta: f64) -> Result<f64> {
    if !(beta > 1.0) || !beta.is_finite() {
        return Err(Error::invalid(format!("beta = {beta} must be a finite value above 1")));
    }
    Ok(1.0 / (beta - 1.0))
}

fn check_off_cut(z: Complex64, right_end: f64) -> Result<()> {
    if z.im == 0.0 && z.re <= right_end {
        return Err(Error::BranchCut(format!("{z}")));
    }
    Ok(())
}

/// `G(z) = βz - (1/N) Σ log(z - λ_i)` with principal logarithms.
pub fn phase_g_full(z: Complex64, spectrum: &SpectrumSample, beta: f64) -> Result<Complex64> {
    check_off_cut(z, spectrum.lambda1())?;
    let n = spectrum.n as f64;
    let logs: Complex64 = spectrum
        .eigenvalues
        .iter()
        .map(|&l| (z - l).ln())
        .sum();
    Ok(beta * z - logs / n)
}

/// Simplified phase `g(z) = (β + m̃(γ)) z - (1/N) log(1 + N z / c_β)`, `z` relative to `γ`.
pub fn phase_g(z: Complex64, frame: &SaddleFrame) -> Result<Complex64> {
    let n = frame.n() as f64;
    let arg = 1.0 + z * (n / frame.c_beta);
    if arg.im == 0.0 && arg.re <= 0.0 {
        return Err(Error::BranchCut(format!("{z}")));
    }
    Ok((frame.beta + frame.m_tilde_gamma) * z - arg.ln() / n)
}

/// Unique non-negative solution of `η(β-1) = (1/N) arg(E + iη + c_β/N)` for `E <= 0`.
pub fn eta_of_e(e: f64, beta: f64, n: usize) -> Result<f64> {
    let cb = c_beta(beta)?;
    if n == 0 {
        return Err(Error::invalid("n must be positive"));
    }
    if !(e <= 0.0) {
        return Err(Error::invalid(format!("E = {e} must be non-positive")));
    }
    let nf = n as f64;
    // Scaled form: v = arg(1 + x + iv) with x = N E / c_β and v = N η / c_β.
    let x = nf * e / cb;
    if x == 0.0 {
        return Ok(0.0);
    }
    let h = |v: f64| v.atan2(1.0 + x) - v;
    let (mut lo, mut hi) = (0.0f64, std::f64::consts::PI);
    if !(h(hi) < 0.0) {
        return Err(Error::numeric("eta root is not bracketed", h(hi).abs()));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if h(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi) * cb / nf)
}
