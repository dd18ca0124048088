//! Globally adaptive 21-point Gauss–Kronrod quadrature for real and
//! complex vector-valued integrands.

#![allow(clippy::excessive_precision)]

use num_complex::Complex64;

use crate::error::{Error, Result};

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_015_054_970,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

// Gauss weights for XGK[1], XGK[3], ..., XGK[9].
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Stopping rule: component `k` is converged when its summed error estimate is
/// at most `max(abs_tol, rel_tol * L1_k)`, where `L1_k` integrates `|f_k|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-300,
            max_intervals: 2000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct VecQuadResult {
    pub values: Vec<Complex64>,
    pub errors: Vec<f64>,
    pub l1: Vec<f64>,
    pub intervals: usize,
    pub evaluations: usize,
}

impl VecQuadResult {
    /// Largest error estimate relative to the component's L1 scale.
    pub fn max_relative_error(&self) -> f64 {
        self.errors
            .iter()
            .zip(&self.l1)
            .map(|(e, l)| if *l > 0.0 { e / l } else { *e })
            .fold(0.0, f64::max)
    }
}

struct Panel {
    a: f64,
    b: f64,
    value: Vec<Complex64>,
    err: Vec<f64>,
    l1: Vec<f64>,
}

fn gk21<F>(f: &mut F, a: f64, b: f64, dim: usize, buf: &mut [Complex64]) -> Panel
where
    F: FnMut(f64, &mut [Complex64]),
{
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut kron = vec![Complex64::new(0.0, 0.0); dim];
    let mut gauss = vec![Complex64::new(0.0, 0.0); dim];
    let mut l1 = vec![0.0; dim];
    let mut add = |x: f64, wk: f64, wg: f64, buf: &mut [Complex64], f: &mut F| {
        f(x, buf);
        for k in 0..dim {
            let v = buf[k];
            kron[k] += wk * v;
            if wg != 0.0 {
                gauss[k] += wg * v;
            }
            l1[k] += wk * v.norm();
        }
    };
    add(c, WGK[10], 0.0, buf, f);
    for j in 0..10 {
        let wg = if j % 2 == 1 { WG[j / 2] } else { 0.0 };
        let dx = h * XGK[j];
        add(c - dx, WGK[j], wg, buf, f);
        add(c + dx, WGK[j], wg, buf, f);
    }
    let ah = h.abs();
    let value: Vec<Complex64> = kron.iter().map(|k| k * h).collect();
    let err = kron
        .iter()
        .zip(&gauss)
        .map(|(k, g)| ((k - g) * h).norm())
        .collect();
    let l1 = l1.iter().map(|x| x * ah).collect();
    Panel { a, b, value, err, l1 }
}

/// Integrates a `dim`-component complex integrand over `[a, b]`, starting
/// from the panels delimited by `breaks` (which must include both ends).
pub fn integrate_vec_breaks<F>(
    mut f: F,
    breaks: &[f64],
    dim: usize,
    opts: &QuadOptions,
) -> Result<VecQuadResult>
where
    F: FnMut(f64, &mut [Complex64]),
{
    if breaks.len() < 2 || breaks.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid("quadrature needs at least two finite breakpoints"));
    }
    let mut buf = vec![Complex64::new(0.0, 0.0); dim];
    let mut panels: Vec<Panel> = breaks
        .windows(2)
        .filter(|w| w[0] != w[1])
        .map(|w| gk21(&mut f, w[0], w[1], dim, &mut buf))
        .collect();
    let mut evaluations = 21 * panels.len();

    loop {
        let mut total = vec![Complex64::new(0.0, 0.0); dim];
        let mut err = vec![0.0; dim];
        let mut l1 = vec![0.0; dim];
        for p in &panels {
            for k in 0..dim {
                total[k] += p.value[k];
                err[k] += p.err[k];
                l1[k] += p.l1[k];
            }
        }
        let tol: Vec<f64> = l1.iter().map(|l| (opts.rel_tol * l).max(opts.abs_tol)).collect();
        let converged = err.iter().zip(&tol).all(|(e, t)| e <= t);
        if converged || panels.len() >= opts.max_intervals {
            let result = VecQuadResult {
                values: total,
                errors: err,
                l1,
                intervals: panels.len(),
                evaluations,
            };
            if converged {
                return Ok(result);
            }
            let achieved = result.max_relative_error();
            return Err(Error::numeric(
                format!("adaptive quadrature hit {} panels", opts.max_intervals),
                achieved,
            ));
        }
        let worst = panels
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let score = p
                    .err
                    .iter()
                    .zip(&tol)
                    .map(|(e, t)| e / t)
                    .fold(0.0, f64::max);
                (i, score)
            })
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .map(|(i, _)| i)
            .expect("at least one panel");
        let p = panels.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        if mid == p.a || mid == p.b {
            let achieved = err
                .iter()
                .zip(&l1)
                .map(|(e, l)| if *l > 0.0 { e / l } else { *e })
                .fold(0.0, f64::max);
            return Err(Error::numeric("quadrature panel width underflow", achieved));
        }
        panels.push(gk21(&mut f, p.a, mid, dim, &mut buf));
        panels.push(gk21(&mut f, mid, p.b, dim, &mut buf));
        evaluations += 42;
    }
}

pub fn integrate_vec<F>(f: F, a: f64, b: f64, dim: usize, opts: &QuadOptions) -> Result<VecQuadResult>
where
    F: FnMut(f64, &mut [Complex64]),
{
    integrate_vec_breaks(f, &[a, b], dim, opts)
}

/// Complex scalar integral; returns `(value, error_estimate)`.
pub fn integrate_complex<F>(mut f: F, a: f64, b: f64, opts: &QuadOptions) -> Result<(Complex64, f64)>
where
    F: FnMut(f64) -> Complex64,
{
    let r = integrate_vec(|x, out| out[0] = f(x), a, b, 1, opts)?;
    Ok((r.values[0], r.errors[0]))
}

/// Real scalar integral over `[a, b]` with interior breakpoints.
pub fn integrate_real_breaks<F>(mut f: F, breaks: &[f64], opts: &QuadOptions) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> f64,
{
    let r = integrate_vec_breaks(|x, out| out[0] = Complex64::new(f(x), 0.0), breaks, 1, opts)?;
    Ok((r.values[0].re, r.errors[0]))
}

pub fn integrate_real<F>(f: F, a: f64, b: f64, opts: &QuadOptions) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> f64,
{
    integrate_real_breaks(f, &[a, b], opts)
}
