use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{Method, OverlapMoments};
use crate::ensembles::{rng_from_seed, SpectrumSample};
use crate::error::{Error, Result};

const MAX_N: usize = 24;
const MIN_ACCEPTANCE: f64 = 1e-6;

/// Rejection sampler for the Bingham law `∝ exp(-x·Ax)` on the sphere with
/// `A = diag(a)`, `a ≥ 0`, using an angular central Gaussian envelope.
struct Bingham {
    a: Vec<f64>,
    /// Standard deviations of the Gaussian behind the envelope.
    sd: Vec<f64>,
    omega: Vec<f64>,
    half_q: f64,
    log_bound: f64,
}

impl Bingham {
    fn new(a: Vec<f64>) -> Self {
        let q = a.len() as f64;
        let h = |b: f64| a.iter().map(|l| 1.0 / (b + 2.0 * l)).sum::<f64>() - 1.0;
        let (mut lo, mut hi) = (1e-12_f64.min(q), q);
        if h(hi) >= 0.0 {
            lo = hi;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if h(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let b = 0.5 * (lo + hi);
        let omega: Vec<f64> = a.iter().map(|l| 1.0 + 2.0 * l / b).collect();
        let sd = omega.iter().map(|w| w.sqrt().recip()).collect();
        let half_q = 0.5 * q;
        Bingham {
            a,
            sd,
            omega,
            half_q,
            log_bound: 0.5 * (q - b) + half_q * (b / q).ln(),
        }
    }

    fn draw<R: Rng>(&self, rng: &mut R, out: &mut [f64], attempts: &mut u64) -> Result<()> {
        let mut misses = 0u64;
        loop {
            *attempts += 1;
            let mut norm2 = 0.0;
            for (x, s) in out.iter_mut().zip(&self.sd) {
                let g: f64 = StandardNormal.sample(rng);
                *x = g * s;
                norm2 += *x * *x;
            }
            if norm2 > 0.0 {
                let (mut xax, mut xox) = (0.0, 0.0);
                for ((x, a), w) in out.iter().zip(&self.a).zip(&self.omega) {
                    xax += a * x * x;
                    xox += w * x * x;
                }
                xax /= norm2;
                xox /= norm2;
                let log_ratio = -xax + self.half_q * xox.ln() + self.log_bound;
                let u: f64 = rng.random();
                if u.ln() < log_ratio {
                    let inv = norm2.sqrt().recip();
                    out.iter_mut().for_each(|x| *x *= inv);
                    return Ok(());
                }
            }
            misses += 1;
            if misses as f64 >= 10.0 / MIN_ACCEPTANCE {
                return Err(Error::InfeasibleRegime(
                    "Gibbs rejection sampler acceptance rate fell below 1e-6; use smaller n or beta"
                        .into(),
                ));
            }
        }
    }
}

/// Monte Carlo moments of `R12 = x·y` for independent Gibbs replicas.
pub fn gibbs_mc_oracle(
    spectrum: &SpectrumSample,
    beta: f64,
    n_samples: usize,
    seed: u64,
) -> Result<OverlapMoments> {
    let n = spectrum.n;
    if n > MAX_N {
        return Err(Error::InfeasibleRegime(format!(
            "n = {n} exceeds {MAX_N}; rejection sampling is impractical"
        )));
    }
    if !(beta > 0.0) {
        return Err(Error::invalid(format!("beta = {beta} must be positive")));
    }
    if n_samples < 1000 {
        return Err(Error::invalid("n_samples must be at least 1000"));
    }
    let l1 = spectrum.lambda1();
    let coef = 0.5 * beta * n as f64;
    let sampler = Bingham::new(spectrum.eigenvalues.iter().map(|l| coef * (l1 - l)).collect());
    let mut rng = rng_from_seed(seed);
    let mut x = vec![0.0; n];
    let mut y = vec![0.0; n];
    let mut attempts = 0u64;
    let mut accepted = 0u64;
    let (mut s2, mut s4, mut s8, mut s1) = (0.0, 0.0, 0.0, 0.0);
    for _ in 0..n_samples {
        sampler.draw(&mut rng, &mut x, &mut attempts)?;
        sampler.draw(&mut rng, &mut y, &mut attempts)?;
        accepted += 2;
        if attempts > 1_000_000 && (accepted as f64) < MIN_ACCEPTANCE * attempts as f64 {
            return Err(Error::InfeasibleRegime(
                "Gibbs rejection sampler acceptance rate fell below 1e-6; use smaller n or beta"
                    .into(),
            ));
        }
        let r: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
        let r2 = r * r;
        s2 += r2;
        s4 += r2 * r2;
        s8 += r2 * r2 * r2 * r2;
        s1 += r.abs();
    }
    let m = n_samples as f64;
    let mean2 = s2 / m;
    let mean4 = s4 / m;
    let mean1 = s1 / m;
    let se = |mean: f64, mean_sq: f64| ((mean_sq - mean * mean).max(0.0) / (m - 1.0)).sqrt();
    Ok(OverlapMoments {
        m2: mean2,
        m4: Some(mean4),
        central4: None,
        abs1: Some(mean1),
        method: Method::MonteCarlo,
        err: se(mean2, s4 / m),
        err_m4: Some(se(mean4, s8 / m)),
        err_abs1: Some(se(mean1, s2 / m)),
        beta,
        n,
        seed,
    })
}
