//! Deterministic spectral utilities on a fixed realization.

mod hs;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::ensembles::SpectrumSample;
use crate::error::{Error, Result};

pub use crate::linalg::eigen_sym;
pub use hs::{hs_trace, hs_trace_with, Bump, GaussianBump, TestFunction};

/// Semicircle density `(1/2π) sqrt((4 - E^2)_+)`.
pub fn semicircle_density(e: f64) -> f64 {
    if e.abs() >= 2.0 {
        0.0
    } else {
        (4.0 - e * e).sqrt() / (2.0 * PI)
    }
}

/// Semicircle mass to the left of `e`.
pub fn semicircle_cdf(e: f64) -> f64 {
    if e <= -2.0 {
        return 0.0;
    }
    if e >= 2.0 {
        return 1.0;
    }
    0.5 + (0.5 * e * (4.0 - e * e).sqrt() + 2.0 * (0.5 * e).asin()) / (2.0 * PI)
}

/// Stieltjes transform of the semicircle law, `m_sc(z) = ∫ ρ_sc(x)/(x - z) dx`.
pub fn m_sc(z: Complex64) -> Complex64 {
    // Roots of m^2 + z m + 1 = 0; pick the one with Im m * Im z > 0 (|m| <= 1).
    let disc = (z * z - 4.0).sqrt();
    let m1 = (-z + disc) * 0.5;
    let m2 = (-z - disc) * 0.5;
    if m1.norm() <= m2.norm() {
        m1
    } else {
        m2
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassicalLocations {
    pub n: usize,
    /// `gamma[i - 1]` is `γ_i`, non-increasing, with `∫_{γ_i}^2 ρ_sc = i/n`.
    pub gamma: Vec<f64>,
}

/// Solves `semicircle_cdf(x) = p` by bisection to a 1e-12 bracket and one Newton step.
fn semicircle_quantile(p: f64) -> f64 {
    if p <= 0.0 {
        return -2.0;
    }
    if p >= 1.0 {
        return 2.0;
    }
    let (mut lo, mut hi) = (-2.0f64, 2.0f64);
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if semicircle_cdf(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let x = 0.5 * (lo + hi);
    let rho = semicircle_density(x);
    if rho > 1e-6 {
        let polished = x - (semicircle_cdf(x) - p) / rho;
        if polished > lo - 1e-12 && polished < hi + 1e-12 {
            return polished;
        }
    }
    x
}

pub fn classical_locations(n: usize) -> Result<ClassicalLocations> {
    if n == 0 {
        return Err(Error::invalid("n must be positive"));
    }
    let gamma = (1..=n)
        .map(|i| {
            if i == n {
                -2.0
            } else {
                semicircle_quantile(1.0 - i as f64 / n as f64)
            }
        })
        .collect();
    Ok(ClassicalLocations { n, gamma })
}

/// `(1/N) Σ_{j≥2} 1/(λ_j - w)`.
pub fn m_tilde(eigenvalues: &[f64], w: f64) -> f64 {
    let n = eigenvalues.len() as f64;
    eigenvalues[1..].iter().map(|l| 1.0 / (l - w)).sum::<f64>() / n
}

/// `(1/N) Σ_{j≥2} 1/(λ_j - w)^2`.
pub fn m_tilde_prime(eigenvalues: &[f64], w: f64) -> f64 {
    let n = eigenvalues.len() as f64;
    eigenvalues[1..]
        .iter()
        .map(|l| {
            let d = l - w;
            1.0 / (d * d)
        })
        .sum::<f64>()
        / n
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeStatistics {
    pub m_tilde: f64,
    pub m_tilde_prime: f64,
    pub m_tilde_at_gamma: f64,
    pub m_tilde_prime_at_gamma: f64,
}

pub(crate) fn check_top_gap(eigenvalues: &[f64]) -> Result<()> {
    if eigenvalues.len() < 2 {
        return Err(Error::invalid("need at least two eigenvalues"));
    }
    if eigenvalues[0] <= eigenvalues[1] {
        return Err(Error::DegenerateSpectrum(format!(
            "λ1 = λ2 = {}",
            eigenvalues[0]
        )));
    }
    Ok(())
}

pub fn edge_statistics(spectrum: &SpectrumSample, beta: f64) -> Result<EdgeStatistics> {
    if !(beta > 1.0) {
        return Err(Error::OutOfRegime(format!("beta = {beta} must exceed 1")));
    }
    let ev = &spectrum.eigenvalues;
    check_top_gap(ev)?;
    let n = ev.len() as f64;
    let gamma = ev[0] + 1.0 / ((beta - 1.0) * n);
    Ok(EdgeStatistics {
        m_tilde: m_tilde(ev, ev[0]),
        m_tilde_prime: m_tilde_prime(ev, ev[0]),
        m_tilde_at_gamma: m_tilde(ev, gamma),
        m_tilde_prime_at_gamma: m_tilde_prime(ev, gamma),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EventFlags {
    pub delta: f64,
    pub eps1: f64,
    pub gap_ok: bool,
    pub rigidity_ok: bool,
    pub event_f: bool,
}

/// Largest rigidity ratio `|λ_i - γ_i| · min(i, N+1-i)^{1/3} N^{2/3}` over all `i`.
pub fn rigidity_ratio(eigenvalues: &[f64], gamma: &ClassicalLocations) -> f64 {
    let n = eigenvalues.len();
    let n23 = (n as f64).powf(2.0 / 3.0);
    eigenvalues
        .iter()
        .zip(&gamma.gamma)
        .enumerate()
        .map(|(k, (l, g))| {
            let i = k + 1;
            let m = i.min(n + 1 - i) as f64;
            (l - g).abs() * m.cbrt() * n23
        })
        .fold(0.0, f64::max)
}

pub fn event_flags(spectrum: &SpectrumSample, delta: f64, eps1: f64) -> Result<EventFlags> {
    if !(delta > 0.0 && delta < 1.0 / 3.0) {
        return Err(Error::invalid(format!("delta = {delta} must lie in (0, 1/3)")));
    }
    if !(eps1 > 0.0) {
        return Err(Error::invalid(format!("eps1 = {eps1} must be positive")));
    }
    let ev = &spectrum.eigenvalues;
    let nf = ev.len() as f64;
    let gap_ok = ev.len() < 2 || nf.powf(2.0 / 3.0) * (ev[0] - ev[1]) > nf.powf(-delta);
    let gamma = classical_locations(ev.len())?;
    let rigidity_ok = rigidity_ratio(ev, &gamma) <= nf.powf(eps1 / 10.0);
    Ok(EventFlags {
        delta,
        eps1,
        gap_ok,
        rigidity_ok,
        event_f: gap_ok && rigidity_ok,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapTail {
    pub s_grid: Vec<f64>,
    pub cdf: Vec<f64>,
    pub stderr: Vec<f64>,
    pub samples: usize,
}

/// Scaled top gap `N^{2/3}(λ1 - λ2)`.
pub fn scaled_top_gap(spectrum: &SpectrumSample) -> f64 {
    let ev = &spectrum.eigenvalues;
    (ev.len() as f64).powf(2.0 / 3.0) * (ev[0] - ev[1])
}

/// Empirical `P(N^{2/3}(λ1 - λ2) < s)` with binomial standard errors.
pub fn gap_tail(samples: &[SpectrumSample], s_grid: &[f64]) -> Result<GapTail> {
    if samples.len() < 100 {
        return Err(Error::invalid("gap_tail needs at least 100 samples"));
    }
    let (kind, n) = (samples[0].kind, samples[0].n);
    if n < 2 {
        return Err(Error::invalid("gap_tail needs n >= 2"));
    }
    if samples.iter().any(|s| s.kind != kind || s.n != n) {
        return Err(Error::invalid("gap_tail samples mix ensembles or sizes"));
    }
    let mut gaps: Vec<f64> = samples.iter().map(scaled_top_gap).collect();
    gaps.sort_by(f64::total_cmp);
    let m = gaps.len() as f64;
    let cdf: Vec<f64> = s_grid
        .iter()
        .map(|s| gaps.partition_point(|g| g < s) as f64 / m)
        .collect();
    let stderr = cdf.iter().map(|p| (p * (1.0 - p) / m).sqrt()).collect();
    Ok(GapTail {
        s_grid: s_grid.to_vec(),
        cdf,
        stderr,
        samples: samples.len(),
    })
}

/// `(1/N) Σ_j 1/(λ_j - z)` with no restriction on `z`.
pub fn stieltjes_sum(eigenvalues: &[f64], z: Complex64) -> Complex64 {
    let n = eigenvalues.len() as f64;
    eigenvalues
        .iter()
        .map(|&l| (Complex64::new(l, 0.0) - z).inv())
        .sum::<Complex64>()
        / n
}

pub fn stieltjes(spectrum: &SpectrumSample, z: Complex64) -> Result<Complex64> {
    if !(z.im > 0.0) {
        return Err(Error::invalid(format!("Im z = {} must be positive", z.im)));
    }
    Ok(stieltjes_sum(&spectrum.eigenvalues, z))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::{sample_spectrum, EnsembleKind};
    use crate::quadrature::{integrate_real, QuadOptions};
    use proptest::prelude::*;

    fn synthetic(ev: Vec<f64>) -> SpectrumSample {
        SpectrumSample::from_eigenvalues(EnsembleKind::GoeDense, 0, ev).unwrap()
    }

    #[test]
    fn cdf_values() {
        assert!((semicircle_cdf(0.0) - 0.5).abs() < 1e-15);
        assert_eq!(semicircle_cdf(2.0), 1.0);
        assert_eq!(semicircle_cdf(-7.0), 0.0);
        let expect = 0.5 + 3f64.sqrt() / (4.0 * PI) + 1.0 / 6.0;
        assert!((semicircle_cdf(1.0) - expect).abs() < 1e-14);
        assert!((semicircle_cdf(1.0) - 0.80450).abs() < 1e-5);
    }

    #[test]
    fn cdf_matches_quadrature_of_density() {
        let opts = QuadOptions::default();
        for &e in &[-1.7, -0.3, 0.9, 1.99] {
            let (v, _) = integrate_real(semicircle_density, -2.0, e, &opts).unwrap();
            assert!((v - semicircle_cdf(e)).abs() < 1e-9);
        }
    }

    #[test]
    fn classical_location_anchors() {
        let c = classical_locations(100).unwrap();
        assert!(c.gamma[49].abs() < 1e-12);
        assert_eq!(c.gamma[99], -2.0);
        let edge = 2.0 - (3.0 * PI / 200.0).powf(2.0 / 3.0);
        assert!((c.gamma[0] - edge).abs() / (2.0 - edge) < 0.05);
        assert!((1.0 - semicircle_cdf(c.gamma[0]) - 0.01).abs() < 1e-10);
    }

    #[test]
    fn classical_locations_invert_the_cdf() {
        for &n in &[1usize, 7, 1000, 10_000] {
            let c = classical_locations(n).unwrap();
            for (k, g) in c.gamma.iter().enumerate() {
                let mass = 1.0 - semicircle_cdf(*g);
                assert!((mass - (k + 1) as f64 / n as f64).abs() < 1e-9, "n={n} i={}", k + 1);
            }
        }
    }

    #[test]
    fn two_point_edge_statistics() {
        let s = synthetic(vec![1.0, -1.0]);
        let e = edge_statistics(&s, 2.0).unwrap();
        assert!((e.m_tilde + 0.25).abs() < 1e-15);
        assert!((e.m_tilde_prime - 0.125).abs() < 1e-15);
        let gamma = 1.0 + 0.5;
        assert!((e.m_tilde_at_gamma - 0.5 / (-1.0 - gamma)).abs() < 1e-15);
    }

    #[test]
    fn degenerate_top_gap() {
        let s = synthetic(vec![1.0, 1.0, 0.0]);
        assert!(matches!(edge_statistics(&s, 2.0), Err(Error::DegenerateSpectrum(_))));
    }

    #[test]
    fn event_flag_cases() {
        let s = synthetic(vec![0.5, 0.5, -1.0]);
        assert!(!event_flags(&s, 0.1, 0.05).unwrap().gap_ok);
        let exact = synthetic(classical_locations(50).unwrap().gamma);
        assert!(event_flags(&exact, 0.1, 0.05).unwrap().rigidity_ok);
        assert!(event_flags(&exact, 0.5, 0.05).is_err());
    }

    #[test]
    fn gap_tail_basic_shape() {
        let samples: Vec<_> = (0..120)
            .map(|s| sample_spectrum(EnsembleKind::GoeTridiag, 30, s).unwrap())
            .collect();
        let grid = [0.05, 0.2, 1.0, 3.0, 1e6];
        let t = gap_tail(&samples, &grid).unwrap();
        assert_eq!(t.cdf[4], 1.0);
        assert!(t.cdf.windows(2).all(|w| w[0] <= w[1]));
        let mut mixed = samples.clone();
        mixed[3] = sample_spectrum(EnsembleKind::GoeTridiag, 31, 3).unwrap();
        assert!(gap_tail(&mixed, &grid).is_err());
    }

    #[test]
    fn stieltjes_cases() {
        let s = synthetic(vec![0.0]);
        let m = stieltjes(&s, Complex64::new(0.0, 1.0)).unwrap();
        assert!((m - Complex64::new(0.0, 1.0)).norm() < 1e-15);
        assert!(stieltjes(&s, Complex64::new(0.3, 0.0)).is_err());

        let s = synthetic(vec![1.5, 0.2, -0.7, -1.9]);
        let z = Complex64::new(0.0, 1e3);
        let m = stieltjes(&s, z).unwrap();
        assert!((m + z.inv()).norm() <= 1.9 / z.norm_sqr());
    }

    #[test]
    fn m_sc_solves_its_quadratic() {
        for z in [Complex64::new(0.5, 0.01), Complex64::new(-3.0, 0.2), Complex64::new(0.0, 5.0)] {
            let m = m_sc(z);
            assert!((m * m + z * m + 1.0).norm() < 1e-13);
            assert!(m.im > 0.0);
        }
    }

    proptest! {
        #[test]
        fn edge_statistics_scale_with_gaps(t in 0.1f64..10.0, seed in 0u64..1000) {
            let s = sample_spectrum(EnsembleKind::GoeDense, 12, seed).unwrap();
            let l1 = s.eigenvalues[0];
            let scaled: Vec<f64> = s.eigenvalues.iter().map(|l| l1 + t * (l - l1)).collect();
            let a = edge_statistics(&s, 2.0).unwrap();
            let b = edge_statistics(&synthetic(scaled), 2.0).unwrap();
            prop_assert!((b.m_tilde - a.m_tilde / t).abs() <= 1e-12 * a.m_tilde.abs() / t);
            prop_assert!((b.m_tilde_prime - a.m_tilde_prime / (t * t)).abs()
                <= 1e-12 * a.m_tilde_prime / (t * t));
            prop_assert!(a.m_tilde < 0.0 && a.m_tilde_prime > 0.0);
        }

        #[test]
        fn stieltjes_conjugate_symmetry(x in -3.0f64..3.0, y in 0.01f64..5.0, seed in 0u64..100) {
            let s = sample_spectrum(EnsembleKind::GoeDense, 9, seed).unwrap();
            let z = Complex64::new(x, y);
            let up = stieltjes(&s, z).unwrap();
            let down = stieltjes_sum(&s.eigenvalues, z.conj());
            prop_assert!((up.conj() - down).norm() <= 1e-12 * up.norm());
            prop_assert!(up.im > 0.0);
        }
    }
}
