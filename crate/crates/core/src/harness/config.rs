use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::edgelimit::{check_counting_grid, check_mainconv, XiEstimator};
use crate::ensembles::EnsembleKind;
use crate::error::{Error, Result};
use crate::overlap::Method;
use crate::zerodiag::{check_stieltjes_window, max_k};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Experiment {
    Sample,
    Overlap,
    Xi,
    Counting,
    FrCheck,
    Zerodiag,
    Mainconv,
    GapTail,
}

impl Experiment {
    pub fn tag(self) -> &'static str {
        match self {
            Experiment::Sample => "SAMPLE",
            Experiment::Overlap => "OVERLAP",
            Experiment::Xi => "XI",
            Experiment::Counting => "COUNTING",
            Experiment::FrCheck => "FR_CHECK",
            Experiment::Zerodiag => "ZERODIAG",
            Experiment::Mainconv => "MAINCONV",
            Experiment::GapTail => "GAP_TAIL",
        }
    }

    /// Ensemble used when the configuration does not name one.
    pub fn default_ensemble(self) -> EnsembleKind {
        match self {
            Experiment::Overlap | Experiment::Mainconv => EnsembleKind::GoeZeroDiag,
            Experiment::Xi | Experiment::Counting => EnsembleKind::GoeTridiag,
            Experiment::Zerodiag => EnsembleKind::GoeDense,
            Experiment::FrCheck => EnsembleKind::GueDense,
            Experiment::Sample | Experiment::GapTail => EnsembleKind::GoeDense,
        }
    }
}

fn default_beta() -> f64 {
    1.5
}
fn default_delta() -> f64 {
    0.1
}
fn default_eps1() -> f64 {
    3.0
}
fn default_method() -> Method {
    Method::ContourExact
}
fn default_estimator() -> XiEstimator {
    XiEstimator::FullSpectrum
}
fn default_airy_per_trial() -> usize {
    crate::edgelimit::AIRY_PER_TRIAL
}
fn default_mc_samples() -> usize {
    100_000
}

/// Everything that determines a run. The records depend only on the fields
/// echoed by [`RunConfig::science`]; `workers`, `output_path` and `timing`
/// change how a run executes, never what it produces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub experiment: Experiment,
    #[serde(default)]
    pub ensemble: Option<EnsembleKind>,
    pub n: usize,
    #[serde(default = "default_beta")]
    pub beta: f64,
    #[serde(default)]
    pub trials: usize,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default = "default_method")]
    pub method: Method,
    /// Gap exponent of the rigidity/gap event, and the window exponent for
    /// Stieltjes grids.
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default = "default_eps1")]
    pub eps1: f64,
    #[serde(default)]
    pub cutoff: Option<usize>,
    #[serde(default = "default_estimator")]
    pub estimator: XiEstimator,
    #[serde(default)]
    pub n_airy: Option<usize>,
    #[serde(default)]
    pub k_max: Option<usize>,
    #[serde(default)]
    pub t_grid: Vec<f64>,
    /// Points `[re, im]` for Stieltjes differences.
    #[serde(default)]
    pub z_grid: Vec<[f64; 2]>,
    /// Draws per trial for the Monte Carlo and heuristic methods.
    #[serde(default = "default_mc_samples")]
    pub mc_samples: usize,
    /// Edge-variable draws per overlap draw in the distributional test.
    #[serde(default = "default_airy_per_trial")]
    pub airy_per_trial: usize,
    /// Skip the rigidity/gap check for the expansion method.
    #[serde(default)]
    pub force_expansion: bool,
    #[serde(default)]
    pub workers: Option<usize>,
    #[serde(default)]
    pub output_path: Option<PathBuf>,
    #[serde(default)]
    pub timing: bool,
}

impl RunConfig {
    pub fn new(experiment: Experiment, n: usize, trials: usize, master_seed: u64) -> Self {
        Self {
            experiment,
            ensemble: None,
            n,
            beta: default_beta(),
            trials,
            master_seed,
            method: default_method(),
            delta: default_delta(),
            eps1: default_eps1(),
            cutoff: None,
            estimator: default_estimator(),
            n_airy: None,
            k_max: None,
            t_grid: Vec::new(),
            z_grid: Vec::new(),
            mc_samples: default_mc_samples(),
            airy_per_trial: default_airy_per_trial(),
            force_expansion: false,
            workers: None,
            output_path: None,
            timing: false,
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_toml_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("run configuration serializes to TOML")
    }

    pub fn ensemble(&self) -> EnsembleKind {
        self.ensemble.unwrap_or(self.experiment.default_ensemble())
    }

    pub fn n_airy(&self) -> usize {
        self.n_airy.unwrap_or(8 * self.n)
    }

    pub fn k_max(&self) -> usize {
        self.k_max.unwrap_or(max_k(self.n))
    }

    pub fn z_points(&self) -> Vec<num_complex::Complex64> {
        self.z_grid.iter().map(|[re, im]| num_complex::Complex64::new(*re, *im)).collect()
    }

    /// The fields that determine the trial outputs, echoed into every record.
    pub fn science(&self) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("configuration serializes to JSON");
        let obj = v.as_object_mut().expect("configuration is an object");
        for key in ["workers", "output_path", "timing", "trials"] {
            obj.remove(key);
        }
        obj.insert("ensemble".into(), serde_json::to_value(self.ensemble()).expect("tag"));
        v
    }

    /// Checks every field against the preconditions of the selected experiment.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        let n = self.n;
        if n == 0 {
            return bad("n must be positive".into());
        }
        if self.workers == Some(0) {
            return bad("workers must be positive".into());
        }
        let kind = self.ensemble();
        if kind.is_tridiagonal() && n < 2 {
            return bad(format!("{kind} needs n >= 2"));
        }
        let low_temp = |beta: f64| -> Result<()> {
            if !(beta > 1.0) || !beta.is_finite() {
                return bad(format!("beta = {beta} must exceed 1"));
            }
            Ok(())
        };
        match self.experiment {
            Experiment::Sample => {}
            Experiment::Overlap => {
                match self.method {
                    Method::MonteCarlo => {
                        if !(self.beta > 0.0) {
                            return bad("beta must be positive".into());
                        }
                        if n > 24 {
                            return bad(format!("the Monte Carlo oracle is limited to n <= 24, got {n}"));
                        }
                        if self.mc_samples < 1000 {
                            return bad("mc_samples must be at least 1000".into());
                        }
                    }
                    Method::BldwHeuristic => {
                        low_temp(self.beta)?;
                        if self.mc_samples < 2 {
                            return bad("mc_samples must be at least 2".into());
                        }
                    }
                    Method::Expansion | Method::ContourExact => low_temp(self.beta)?,
                }
                if matches!(self.method, Method::Expansion | Method::BldwHeuristic) && n < 2 {
                    return bad("this method needs n >= 2".into());
                }
                if self.method == Method::Expansion && !self.force_expansion {
                    if !(self.delta > 0.0 && self.delta < 1.0 / 3.0) {
                        return bad(format!("delta = {} must lie in (0, 1/3)", self.delta));
                    }
                    if !(self.eps1 > 0.0) {
                        return bad(format!("eps1 = {} must be positive", self.eps1));
                    }
                }
            }
            Experiment::Xi => {
                if kind != EnsembleKind::GoeTridiag {
                    return bad("the Xi experiment samples GOE_TRIDIAG only".into());
                }
                if self.estimator == XiEstimator::Cutoff {
                    match self.cutoff {
                        Some(c) if c >= 1 && c < n => {}
                        _ => return bad(format!("cutoff must lie in [1, {n})")),
                    }
                }
            }
            Experiment::Counting => check_counting_grid(n, &self.t_grid).map_err(Error::into_config)?,
            Experiment::FrCheck => {}
            Experiment::Zerodiag => {
                let k = self.k_max();
                if k == 0 || k > max_k(n) {
                    return bad(format!("k_max = {k} must lie in [1, {}]", max_k(n)));
                }
                if !(self.delta > 0.0 && self.delta < 0.5) {
                    return bad(format!("delta = {} must lie in (0, 1/2)", self.delta));
                }
                check_stieltjes_window(n, &self.z_points(), self.delta).map_err(Error::into_config)?;
            }
            Experiment::Mainconv => {
                check_mainconv(self.beta, n, self.n_airy()).map_err(Error::into_config)?;
                if self.airy_per_trial == 0 {
                    return bad("airy_per_trial must be positive".into());
                }
            }
            Experiment::GapTail => {
                if n < 2 {
                    return bad("gap statistics need n >= 2".into());
                }
                if self.t_grid.iter().any(|s| !s.is_finite()) {
                    return bad("gap grid must be finite".into());
                }
            }
        }
        Ok(())
    }
}

/// Parses `a:b:step` into `a, a + step, ...` up to and including `b`.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let nums: Vec<f64> = parts
        .iter()
        .map(|p| p.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::Config(format!("grid `{spec}` is not of the form a:b:step")))?;
    let [a, b, step] = nums[..] else {
        return Err(Error::Config(format!("grid `{spec}` is not of the form a:b:step")));
    };
    if !(step > 0.0) || !(b >= a) || !a.is_finite() || !b.is_finite() {
        return Err(Error::Config(format!("grid `{spec}` needs a <= b and step > 0")));
    }
    let count = ((b - a) / step + 1e-9).floor() as usize + 1;
    if count > 1_000_000 {
        return Err(Error::Config(format!("grid `{spec}` has too many points")));
    }
    Ok((0..count).map(|i| a + i as f64 * step).collect())
}
