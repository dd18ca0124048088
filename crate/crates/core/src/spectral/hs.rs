//! Trace of a test function reconstructed from its almost-analytic extension.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::ensembles::SpectrumSample;
use crate::error::Result;
use crate::quadrature::{integrate_real_breaks, integrate_vec_breaks, QuadOptions};

/// A smooth compactly supported function with its first two derivatives.
pub trait TestFunction: Sync {
    fn value(&self, x: f64) -> f64;
    fn d1(&self, x: f64) -> f64;
    fn d2(&self, x: f64) -> f64;
    /// Interval outside which the function and its derivatives vanish.
    fn support(&self) -> (f64, f64);
}

/// `exp(1 - 1/(1 - t^2))` with `t = (x - center)/half_width`; equals 1 at the center.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bump {
    pub center: f64,
    pub half_width: f64,
}

impl Bump {
    fn parts(&self, x: f64) -> Option<(f64, f64, f64)> {
        let t = (x - self.center) / self.half_width;
        if t.abs() >= 1.0 {
            return None;
        }
        let u = 1.0 - t * t;
        let f = (1.0 - 1.0 / u).exp();
        let g1 = -2.0 * t / (u * u);
        let g2 = -2.0 / (u * u) - 8.0 * t * t / (u * u * u);
        Some((f, g1, g2))
    }
}

impl TestFunction for Bump {
    fn value(&self, x: f64) -> f64 {
        self.parts(x).map_or(0.0, |(f, _, _)| f)
    }

    fn d1(&self, x: f64) -> f64 {
        self.parts(x).map_or(0.0, |(f, g1, _)| f * g1 / self.half_width)
    }

    fn d2(&self, x: f64) -> f64 {
        self.parts(x)
            .map_or(0.0, |(f, g1, g2)| f * (g1 * g1 + g2) / (self.half_width * self.half_width))
    }

    fn support(&self) -> (f64, f64) {
        (self.center - self.half_width, self.center + self.half_width)
    }
}

/// Gaussian of width `sigma` tapered by a [`Bump`] of the given half-width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianBump {
    pub center: f64,
    pub sigma: f64,
    pub taper: f64,
}

impl GaussianBump {
    fn gauss(&self, x: f64) -> (f64, f64, f64) {
        let s2 = self.sigma * self.sigma;
        let d = x - self.center;
        let g = (-0.5 * d * d / s2).exp();
        (g, -d / s2 * g, (d * d / s2 - 1.0) / s2 * g)
    }

    fn taper(&self) -> Bump {
        Bump {
            center: self.center,
            half_width: self.taper,
        }
    }
}

impl TestFunction for GaussianBump {
    fn value(&self, x: f64) -> f64 {
        self.gauss(x).0 * self.taper().value(x)
    }

    fn d1(&self, x: f64) -> f64 {
        let (g, g1, _) = self.gauss(x);
        let b = self.taper();
        g1 * b.value(x) + g * b.d1(x)
    }

    fn d2(&self, x: f64) -> f64 {
        let (g, g1, g2) = self.gauss(x);
        let b = self.taper();
        g2 * b.value(x) + 2.0 * g1 * b.d1(x) + g * b.d2(x)
    }

    fn support(&self) -> (f64, f64) {
        self.taper().support()
    }
}

// Cutoff equal to 1 on |y| <= 1 and 0 on |y| >= 2 with a quintic smoothstep ramp.
fn chi(y: f64) -> (f64, f64) {
    let a = y.abs();
    if a <= 1.0 {
        (1.0, 0.0)
    } else if a >= 2.0 {
        (0.0, 0.0)
    } else {
        let t = a - 1.0;
        let s = t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
        let ds = 30.0 * t * t * (1.0 - t) * (1.0 - t);
        (1.0 - s, -ds * y.signum())
    }
}

/// `∂̄` of the extension `(f(x) + i y f'(x)) χ(y)`.
fn dbar_extension<F: TestFunction + ?Sized>(f: &F, x: f64, y: f64) -> Complex64 {
    let (c, dc) = chi(y);
    let inner = Complex64::new(y * f.d2(x) * c + f.value(x) * dc, y * f.d1(x) * dc);
    Complex64::new(0.0, 0.5) * inner
}

/// `Σ_i f(λ_i)` evaluated as `(1/π) ∫∫ ∂̄f̃(z) Σ_i 1/(λ_i - z) dx dy`.
pub fn hs_trace<F: TestFunction + ?Sized>(spectrum: &SpectrumSample, f: &F) -> Result<f64> {
    hs_trace_with(spectrum, f, &QuadOptions::default())
}

pub fn hs_trace_with<F: TestFunction + ?Sized>(
    spectrum: &SpectrumSample,
    f: &F,
    opts: &QuadOptions,
) -> Result<f64> {
    let (lo, hi) = f.support();
    let mut breaks = vec![lo];
    breaks.extend(spectrum.eigenvalues.iter().rev().filter(|&&l| l > lo && l < hi));
    breaks.push(hi);
    breaks.dedup();
    let inner_opts = QuadOptions {
        rel_tol: opts.rel_tol * 0.1,
        ..*opts
    };
    let ev = &spectrum.eigenvalues;
    let mut inner_err = None;
    // The lower half-plane contributes the complex conjugate.
    let (outer, _) = integrate_real_breaks(
        |y| {
            if y == 0.0 {
                return 0.0;
            }
            let r = integrate_vec_breaks(
                |x, out| {
                    let z = Complex64::new(x, y);
                    let resolvent: Complex64 =
                        ev.iter().map(|&l| (Complex64::new(l, 0.0) - z).inv()).sum();
                    out[0] = dbar_extension(f, x, y) * resolvent;
                },
                &breaks,
                1,
                &inner_opts,
            );
            match r {
                Ok(r) => r.values[0].re,
                Err(e) => {
                    inner_err.get_or_insert(e);
                    0.0
                }
            }
        },
        &[0.0, 1.0, 2.0],
        opts,
    )?;
    if let Some(e) = inner_err {
        return Err(e);
    }
    Ok(2.0 * outer / PI)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::{rng_from_seed, sample_spectrum, EnsembleKind};
    use rand::Rng;

    struct Zero;

    impl TestFunction for Zero {
        fn value(&self, _: f64) -> f64 {
            0.0
        }
        fn d1(&self, _: f64) -> f64 {
            0.0
        }
        fn d2(&self, _: f64) -> f64 {
            0.0
        }
        fn support(&self) -> (f64, f64) {
            (-1.0, 1.0)
        }
    }

    fn check_derivatives<F: TestFunction>(f: &F) {
        let (lo, hi) = f.support();
        let h = 1e-5;
        for k in 1..40 {
            let x = lo + (hi - lo) * k as f64 / 40.0;
            let fd1 = (f.value(x + h) - f.value(x - h)) / (2.0 * h);
            let fd2 = (f.d1(x + h) - f.d1(x - h)) / (2.0 * h);
            assert!((fd1 - f.d1(x)).abs() < 1e-5 * (1.0 + f.d1(x).abs()));
            assert!((fd2 - f.d2(x)).abs() < 1e-4 * (1.0 + f.d2(x).abs()));
        }
    }

    #[test]
    fn analytic_derivatives_match_finite_differences() {
        check_derivatives(&Bump {
            center: 0.2,
            half_width: 0.9,
        });
        check_derivatives(&GaussianBump {
            center: -0.4,
            sigma: 0.3,
            taper: 1.5,
        });
    }

    #[test]
    fn zero_function_gives_zero() {
        let s = sample_spectrum(EnsembleKind::GoeDense, 5, 1).unwrap();
        assert_eq!(hs_trace(&s, &Zero).unwrap(), 0.0);
    }

    #[test]
    fn single_point_recovers_bump_value() {
        let s = SpectrumSample::from_eigenvalues(EnsembleKind::GoeDense, 0, vec![0.0]).unwrap();
        let f = Bump {
            center: 0.0,
            half_width: 1.0,
        };
        let v = hs_trace(&s, &f).unwrap();
        assert!((v - 1.0).abs() < 1e-6, "{v}");
    }

    #[test]
    fn goe_spectrum_matches_direct_sum() {
        let s = sample_spectrum(EnsembleKind::GoeDense, 50, 12).unwrap();
        let mut rng = rng_from_seed(4);
        let f = GaussianBump {
            center: rng.random_range(-1.5..1.5),
            sigma: 0.4,
            taper: 1.6,
        };
        let direct: f64 = s.eigenvalues.iter().map(|&l| f.value(l)).sum();
        let v = hs_trace(&s, &f).unwrap();
        assert!((v - direct).abs() < 1e-6, "{v} vs {direct}");
    }
}
