//! Line integrals of `e^{N(G(z)-G(γ))/2} φ(z)` from `γ - i∞` to `γ + i∞`.
//!
//! Integrands are assumed conjugate-symmetric, `φ(z̄) = conj φ(z)`, so only the
//! upper half of each path is integrated: the full contour equals `2i Im U`
//! where `U` is the upper-half integral.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{eta_of_e, ContourSpec, SaddleFrame};
use crate::error::{Error, Result};
use crate::quadrature::integrate_vec_breaks;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ContourPath {
    /// Steepest-descent curve of `w - log(1+w)` in units of `γ - λ1`,
    /// continued by a horizontal ray to `-∞`.
    #[default]
    SteepestDescent,
    /// The straight line `Re z = γ`, truncated.
    Vertical,
}

/// Height (in units of `γ - λ1`) where the curved part hands over to the ray.
const CURVE_END: f64 = 2.6;

#[derive(Debug, Clone, PartialEq)]
pub struct ContourIntegrals {
    pub values: Vec<Complex64>,
    pub errors: Vec<f64>,
    /// Bound on the discarded tail of a truncated path (zero otherwise).
    pub truncation_error: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineIntegral {
    pub value: Complex64,
    pub error: f64,
    pub truncation_error: f64,
}

// v cot v - 1 and its derivative, with series near 0.
fn curve(v: f64) -> (f64, f64) {
    if v < 1e-2 {
        let v2 = v * v;
        let u = -v2 / 3.0 - v2 * v2 / 45.0 - 2.0 * v2 * v2 * v2 / 945.0 - v2 * v2 * v2 * v2 / 4725.0;
        let du = -2.0 * v / 3.0 - 4.0 * v * v2 / 45.0 - 12.0 * v * v2 * v2 / 945.0;
        (u, du)
    } else {
        let (s, c) = v.sin_cos();
        (v * c / s - 1.0, c / s - v / (s * s))
    }
}

/// Point and `dz/dp` on the steepest-descent path for `p ∈ [0, 2)`.
fn steepest_point(frame: &SaddleFrame, p: f64) -> (Complex64, Complex64) {
    let ell = frame.gamma - frame.lambda1();
    if p <= 1.0 {
        let v = CURVE_END * p;
        let (u, du) = curve(v);
        let z = Complex64::new(frame.gamma + ell * u, ell * v);
        (z, Complex64::new(du, 1.0) * (ell * CURVE_END))
    } else {
        let (u_end, _) = curve(CURVE_END);
        let n = frame.n() as f64;
        let scale = 2.0 / (n * frame.beta * ell);
        let t = p - 1.0;
        let s = scale * t / (1.0 - t);
        let ds = scale / ((1.0 - t) * (1.0 - t));
        let z = Complex64::new(frame.gamma + ell * (u_end - s), ell * CURVE_END);
        (z, Complex64::new(-ell * ds, 0.0))
    }
}

/// Integrates `e^{N(G(z)-G(γ))/2} φ_k(z)` over the full contour for each of
/// the `dim` factors written by `fill`.
pub fn contour_integrals<F>(
    frame: &SaddleFrame,
    path: ContourPath,
    spec: &ContourSpec,
    dim: usize,
    fill: F,
) -> Result<ContourIntegrals>
where
    F: Fn(Complex64, &mut [Complex64]),
{
    spec.validate()?;
    let opts = spec.quad_options();
    let (raw, truncation_error) = match path {
        ContourPath::SteepestDescent => {
            let r = integrate_vec_breaks(
                |p, out| {
                    let (z, dz) = steepest_point(frame, p);
                    let w = frame.half_exponent(z).exp() * dz;
                    if !w.is_finite() || w == Complex64::new(0.0, 0.0) {
                        out.iter_mut().for_each(|o| *o = Complex64::new(0.0, 0.0));
                        return;
                    }
                    fill(z, out);
                    out.iter_mut().for_each(|o| *o *= w);
                },
                &[0.0, 0.25, 0.5, 1.0, 1.25, 1.5, 2.0],
                dim,
                &opts,
            )?;
            (r, 0.0)
        }
        ContourPath::Vertical => {
            let ell = frame.gamma - frame.lambda1();
            let weight = |y: f64| frame.half_exponent(Complex64::new(frame.gamma, y)).exp();
            let mut top = ell;
            while top < spec.truncation_height && weight(top).norm() >= 1e-16 {
                top *= 2.0;
            }
            let top = top.min(spec.truncation_height);
            let mut breaks = vec![0.0];
            let mut y = ell;
            while y < top {
                breaks.push(y);
                y *= 4.0;
            }
            breaks.push(top);
            let r = integrate_vec_breaks(
                |y, out| {
                    let z = Complex64::new(frame.gamma, y);
                    let w = weight(y) * Complex64::new(0.0, 1.0);
                    fill(z, out);
                    out.iter_mut().for_each(|o| *o *= w);
                },
                &breaks,
                dim,
                &opts,
            )?;
            let n = frame.n() as f64;
            // |weight| decays like y^{-N/2}; the tail beyond `top` is at most
            // |weight(top)| * top / (N/2 - 1) for N > 2.
            let tail = if n > 2.0 {
                weight(top).norm() * top / (0.5 * n - 1.0)
            } else {
                f64::INFINITY
            };
            (r, 2.0 * tail)
        }
    };
    let values = raw
        .values
        .iter()
        .map(|u| Complex64::new(0.0, 2.0 * u.im))
        .collect();
    let errors = raw.errors.iter().map(|e| 2.0 * e).collect();
    Ok(ContourIntegrals {
        values,
        errors,
        truncation_error,
        evaluations: raw.evaluations,
    })
}

/// `∫_{γ-i∞}^{γ+i∞} e^{N(G(z)-G(γ))/2} φ(z) dz` on the literal vertical line.
pub fn vertical_line_integral<F>(frame: &SaddleFrame, factor: F, spec: &ContourSpec) -> Result<LineIntegral>
where
    F: Fn(Complex64) -> Complex64,
{
    let r = contour_integrals(frame, ContourPath::Vertical, spec, 1, |z, out| out[0] = factor(z))?;
    Ok(LineIntegral {
        value: r.values[0],
        error: r.errors[0],
        truncation_error: r.truncation_error,
    })
}

/// Points of `Γ̂ = Γ1 ∪ Γ3`, relative to `γ`: the U-shaped curve `E ± iη(E)`
/// for `-N^{-1+κ} <= E <= 0`, and the vertical segments joining its ends to
/// the real axis.
pub fn gamma_hat(frame: &SaddleFrame, kappa: f64, samples: usize) -> Result<Vec<Complex64>> {
    if !(kappa > 0.0 && kappa < 1.0) {
        return Err(Error::invalid(format!("kappa = {kappa} must lie in (0, 1)")));
    }
    let n = frame.n();
    let e0 = -(n as f64).powf(-1.0 + kappa);
    let samples = samples.max(2);
    let mut pts = Vec::with_capacity(4 * samples);
    for k in 0..samples {
        let e = e0 * k as f64 / (samples - 1) as f64;
        let eta = eta_of_e(e, frame.beta, n)?;
        pts.push(Complex64::new(e, eta));
        pts.push(Complex64::new(e, -eta));
    }
    let eta0 = eta_of_e(e0, frame.beta, n)?;
    for k in 0..samples {
        let y = eta0 * k as f64 / (samples - 1) as f64;
        pts.push(Complex64::new(e0, y));
        pts.push(Complex64::new(e0, -y));
    }
    Ok(pts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::{sample_spectrum, EnsembleKind, SpectrumSample};
    use crate::saddle::{keyhole_closed_form, phase_g, KeyholeKind};

    fn single(l: f64) -> SpectrumSample {
        SpectrumSample::from_eigenvalues(EnsembleKind::GoeDense, 0, vec![l]).unwrap()
    }

    #[test]
    fn curve_series_matches_closed_form() {
        for &v in &[0.009f64, 0.0099] {
            let (s, c) = v.sin_cos();
            let (u, du) = curve(v);
            assert!((u - (v * c / s - 1.0)).abs() < 1e-13);
            assert!((du - (c / s - v / (s * s))).abs() < 1e-11);
        }
    }

    #[test]
    fn steepest_path_decreases_the_real_phase() {
        let s = sample_spectrum(EnsembleKind::GoeDense, 400, 3).unwrap();
        let f = SaddleFrame::new(&s, 1.5).unwrap();
        let mut last = f64::INFINITY;
        for k in 1..200 {
            let (z, _) = steepest_point(&f, k as f64 / 100.0);
            let w = f.half_exponent(z);
            assert!(w.re < last, "p = {}", k as f64 / 100.0);
            last = w.re;
        }
    }

    #[test]
    fn single_eigenvalue_matches_keyhole() {
        // With λ = 0: e^{N(G-G(γ))/2} = sqrt(γ) e^{-βγ/2} e^{βz/2} z^{-1/2}.
        let beta = 2.0;
        let f = SaddleFrame::new(&single(0.0), beta).unwrap();
        let a = beta / 2.0;
        let scale = f.gamma.sqrt() * (-a * f.gamma).exp();
        let expect = keyhole_closed_form(KeyholeKind::InvSqrt, a, 0.0).unwrap() * scale;
        for path in [ContourPath::SteepestDescent, ContourPath::Vertical] {
            let spec = ContourSpec {
                truncation_height: 1e14,
                max_panels: 20000,
                ..ContourSpec::default()
            };
            let r = contour_integrals(&f, path, &spec, 1, |_, out| out[0] = Complex64::new(1.0, 0.0));
            if path == ContourPath::Vertical {
                // The literal line decays only like |y|^{-1/2} at N = 1.
                assert!(r.is_err() || r.unwrap().truncation_error.is_infinite());
                continue;
            }
            let r = r.unwrap();
            assert!((r.values[0] - expect).norm() <= 1e-8 * expect.norm(), "{:?}", r.values[0]);
        }
    }

    #[test]
    fn paths_agree_at_moderate_n() {
        let s = sample_spectrum(EnsembleKind::GoeDense, 60, 11).unwrap();
        let f = SaddleFrame::new(&s, 1.5).unwrap();
        let spec = ContourSpec::default();
        let one = |_: Complex64, out: &mut [Complex64]| out[0] = Complex64::new(1.0, 0.0);
        let a = contour_integrals(&f, ContourPath::SteepestDescent, &spec, 1, one).unwrap();
        let b = vertical_line_integral(&f, |_| Complex64::new(1.0, 0.0), &spec).unwrap();
        assert!((a.values[0] - b.value).norm() <= 1e-8 * a.values[0].norm());
        assert_eq!(b.value.re, 0.0);
        assert!(b.truncation_error < 1e-10 * b.value.norm());
    }

    #[test]
    fn truncation_height_is_converged() {
        let s = sample_spectrum(EnsembleKind::GoeDense, 60, 12).unwrap();
        let f = SaddleFrame::new(&s, 1.5).unwrap();
        let spec = ContourSpec {
            truncation_height: 10.0,
            ..ContourSpec::default()
        };
        let wide = ContourSpec {
            truncation_height: 20.0,
            ..spec
        };
        let a = vertical_line_integral(&f, |_| Complex64::new(1.0, 0.0), &spec).unwrap();
        let b = vertical_line_integral(&f, |_| Complex64::new(1.0, 0.0), &wide).unwrap();
        assert!((a.value - b.value).norm() <= 1e-10 * b.value.norm());
    }

    #[test]
    fn gamma_shift_rescales_the_integral() {
        let s = sample_spectrum(EnsembleKind::GoeDense, 6, 5).unwrap();
        let beta = 1.5;
        let n = 6.0;
        let f1 = SaddleFrame::new(&s, beta).unwrap();
        let f2 = SaddleFrame::with_gamma(&s, beta, f1.gamma + 1.0 / n).unwrap();
        let spec = ContourSpec::default();
        let one = |_: Complex64, out: &mut [Complex64]| out[0] = Complex64::new(1.0, 0.0);
        let i1 = contour_integrals(&f1, ContourPath::SteepestDescent, &spec, 1, one).unwrap();
        let i2 = contour_integrals(&f2, ContourPath::SteepestDescent, &spec, 1, one).unwrap();
        // e^{-N G(γ)/2} normalizations differ by e^{N(G(γ2)-G(γ1))/2}.
        let shift = f1.half_exponent(Complex64::new(f2.gamma, 0.0)).exp();
        let lhs = i2.values[0] * shift;
        assert!((lhs - i1.values[0]).norm() <= 1e-8 * i1.values[0].norm());
    }

    #[test]
    fn gamma_hat_taylor_residual_is_small() {
        let s = sample_spectrum(EnsembleKind::GoeDense, 500, 21).unwrap();
        let f = SaddleFrame::new(&s, 1.5).unwrap();
        let n = 500.0f64;
        let bound = 10.0 * n.powf(3.0 * 0.02 + 0.05 + 0.3 - 1.0);
        for z in gamma_hat(&f, 0.02, 25).unwrap() {
            if z.im == 0.0 && z.re <= -f.c_beta / n {
                continue;
            }
            let full = f.half_exponent(z + f.gamma) * 2.0;
            let simple = phase_g(z, &f).unwrap() * n + z * z * (n * f.m_tilde_prime_gamma / 2.0);
            assert!((full - simple).norm() <= bound, "{z}");
        }
    }
}
