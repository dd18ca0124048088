//! Random-matrix samplers. Every sample is a pure function of `(kind, n, seed)`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{HermitianMatrix, SymMatrix, SymTridiagonal};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum EnsembleKind {
    /// Real symmetric, diagonal variance 2/n, off-diagonal variance 1/n.
    GoeDense,
    /// `GoeDense` with the diagonal removed.
    GoeZeroDiag,
    /// Complex Hermitian, diagonal variance 1/n, `E|h_ij|^2 = 1/n`.
    GueDense,
    /// Chi-distributed tridiagonal model with the GOE eigenvalue law.
    GoeTridiag,
    /// Chi-distributed tridiagonal model with the GUE eigenvalue law.
    GueTridiag,
}

impl EnsembleKind {
    pub fn tag(self) -> &'static str {
        match self {
            EnsembleKind::GoeDense => "GOE_DENSE",
            EnsembleKind::GoeZeroDiag => "GOE_ZERO_DIAG",
            EnsembleKind::GueDense => "GUE_DENSE",
            EnsembleKind::GoeTridiag => "GOE_TRIDIAG",
            EnsembleKind::GueTridiag => "GUE_TRIDIAG",
        }
    }

    pub fn is_tridiagonal(self) -> bool {
        matches!(self, EnsembleKind::GoeTridiag | EnsembleKind::GueTridiag)
    }

    pub fn is_unitary(self) -> bool {
        matches!(self, EnsembleKind::GueDense | EnsembleKind::GueTridiag)
    }
}

impl std::fmt::Display for EnsembleKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.tag())
    }
}

impl std::str::FromStr for EnsembleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_uppercase().replace('-', "_");
        Ok(match norm.as_str() {
            "GOE_DENSE" | "GOE" => EnsembleKind::GoeDense,
            "GOE_ZERO_DIAG" => EnsembleKind::GoeZeroDiag,
            "GUE_DENSE" | "GUE" => EnsembleKind::GueDense,
            "GOE_TRIDIAG" => EnsembleKind::GoeTridiag,
            "GUE_TRIDIAG" => EnsembleKind::GueTridiag,
            _ => return Err(Error::invalid(format!("unknown ensemble kind `{s}`"))),
        })
    }
}

/// One sorted (non-increasing) eigenvalue realization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSample {
    pub kind: EnsembleKind,
    pub n: usize,
    pub seed: u64,
    pub eigenvalues: Vec<f64>,
}

impl SpectrumSample {
    /// Wraps an externally supplied spectrum, sorting it non-increasing.
    pub fn from_eigenvalues(kind: EnsembleKind, seed: u64, mut eigenvalues: Vec<f64>) -> Result<Self> {
        if eigenvalues.is_empty() {
            return Err(Error::invalid("spectrum must contain at least one eigenvalue"));
        }
        if eigenvalues.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid("spectrum contains non-finite eigenvalues"));
        }
        eigenvalues.sort_by(|a, b| b.total_cmp(a));
        Ok(Self {
            kind,
            n: eigenvalues.len(),
            seed,
            eigenvalues,
        })
    }

    pub fn lambda1(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("spectrum serialization is infallible")
    }

    pub fn from_json_line(line: &str) -> Result<Self> {
        let s: Self = serde_json::from_str(line).map_err(|e| Error::invalid(e.to_string()))?;
        if s.n != s.eigenvalues.len() {
            return Err(Error::invalid("record length does not match n"));
        }
        Ok(s)
    }
}

/// Spectra of `H` (GOE) and `M` (its zero-diagonal part) from one draw.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoupledPair {
    pub seed: u64,
    pub spectrum_h: SpectrumSample,
    pub spectrum_m: SpectrumSample,
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

fn chi<R: Rng + ?Sized>(rng: &mut R, dof: f64) -> f64 {
    ChiSquared::new(dof)
        .expect("degrees of freedom are positive")
        .sample(rng)
        .sqrt()
}

/// Dense GOE draw with entries normalized by `1/norm_n` (usually `norm_n = n`).
/// Entries are drawn row by row over the lower triangle, diagonal last.
pub(crate) fn draw_goe(n: usize, norm_n: f64, rng: &mut ChaCha8Rng) -> SymMatrix {
    let off_sd = 1.0 / norm_n.sqrt();
    let diag_sd = (2.0 / norm_n).sqrt();
    let mut m = SymMatrix::zeros(n);
    for i in 0..n {
        for j in 0..i {
            m.set(i, j, off_sd * normal(rng));
        }
        m.set(i, i, diag_sd * normal(rng));
    }
    m
}

fn draw_gue(n: usize, norm_n: f64, rng: &mut ChaCha8Rng) -> HermitianMatrix {
    let off_sd = 1.0 / (2.0 * norm_n).sqrt();
    let diag_sd = 1.0 / norm_n.sqrt();
    let mut h = HermitianMatrix::zeros(n);
    for i in 0..n {
        for j in 0..i {
            let re = normal(rng);
            let im = normal(rng);
            h.set(i, j, Complex64::new(off_sd * re, off_sd * im));
        }
        h.set(i, i, Complex64::new(diag_sd * normal(rng), 0.0));
    }
    h
}

/// The tridiagonal model matrix itself, for Sturm counts and bisection.
pub fn sample_tridiagonal(kind: EnsembleKind, n: usize, seed: u64) -> Result<SymTridiagonal> {
    if !kind.is_tridiagonal() {
        return Err(Error::invalid(format!("{kind} has no tridiagonal model")));
    }
    if n < 2 {
        return Err(Error::invalid("tridiagonal ensembles need n >= 2"));
    }
    let mut rng = rng_from_seed(seed);
    Ok(draw_tridiagonal(kind, n, n as f64, &mut rng))
}

fn draw_tridiagonal(kind: EnsembleKind, n: usize, norm_n: f64, rng: &mut ChaCha8Rng) -> SymTridiagonal {
    let beta = if kind.is_unitary() { 2.0 } else { 1.0 };
    let diag_sd = (2.0 / (beta * norm_n)).sqrt();
    let off_scale = 1.0 / (beta * norm_n).sqrt();
    let diag = (0..n).map(|_| diag_sd * normal(rng)).collect();
    let off = (1..n)
        .map(|i| off_scale * chi(rng, beta * (n - i) as f64))
        .collect();
    SymTridiagonal { diag, off }
}

/// Eigenvalues of one draw, entries normalized as for a matrix of size `norm_n`.
pub(crate) fn sample_eigenvalues_normalized(
    kind: EnsembleKind,
    n: usize,
    norm_n: f64,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<f64>> {
    match kind {
        EnsembleKind::GoeDense => draw_goe(n, norm_n, rng).eigenvalues(),
        EnsembleKind::GoeZeroDiag => {
            let mut m = draw_goe(n, norm_n, rng);
            for i in 0..n {
                m.set(i, i, 0.0);
            }
            m.eigenvalues()
        }
        EnsembleKind::GueDense => draw_gue(n, norm_n, rng).eigenvalues(),
        EnsembleKind::GoeTridiag | EnsembleKind::GueTridiag => {
            draw_tridiagonal(kind, n, norm_n, rng).eigenvalues()
        }
    }
}

fn check_n(kind: EnsembleKind, n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::invalid("n must be positive"));
    }
    if kind.is_tridiagonal() && n < 2 {
        return Err(Error::invalid("tridiagonal ensembles need n >= 2"));
    }
    Ok(())
}

pub fn sample_spectrum(kind: EnsembleKind, n: usize, seed: u64) -> Result<SpectrumSample> {
    check_n(kind, n)?;
    let mut rng = rng_from_seed(seed);
    let eigenvalues =
        sample_eigenvalues_normalized(kind, n, n as f64, &mut rng).map_err(|e| e.with_seed(seed))?;
    Ok(SpectrumSample {
        kind,
        n,
        seed,
        eigenvalues,
    })
}

/// `H` and its zero-diagonal part `M`. `spectrum_m` equals
/// `sample_spectrum(GoeZeroDiag, n, seed)` and `spectrum_h` equals
/// `sample_spectrum(GoeDense, n, seed)`.
pub fn sample_coupled_pair(n: usize, seed: u64) -> Result<CoupledPair> {
    check_n(EnsembleKind::GoeDense, n)?;
    let mut rng = rng_from_seed(seed);
    let h = draw_goe(n, n as f64, &mut rng);
    let mut m = h.clone();
    for i in 0..n {
        m.set(i, i, 0.0);
    }
    let eh = h.eigenvalues().map_err(|e| e.with_seed(seed))?;
    let em = m.eigenvalues().map_err(|e| e.with_seed(seed))?;
    Ok(CoupledPair {
        seed,
        spectrum_h: SpectrumSample {
            kind: EnsembleKind::GoeDense,
            n,
            seed,
            eigenvalues: eh,
        },
        spectrum_m: SpectrumSample {
            kind: EnsembleKind::GoeZeroDiag,
            n,
            seed,
            eigenvalues: em,
        },
    })
}
