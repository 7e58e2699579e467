//! Experiment configuration: TOML schema, defaults and validation.

use nonlocal_frac::grid::SpaceGrid;
use nonlocal_frac::sv_calculus::ScalingProfile;
use nonlocal_frac::{Error, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::PathBuf;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    Symbol,
    Heatkernel,
    Fundsol,
    Solve,
    VerifyBounds,
    VerifyClassG,
    VerifyApriori,
}

/// Bound families checked by `verify-bounds`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum BoundCheck {
    /// |D^m q| against t^{2α−β} K(|x|)/|x|^{d+m}.
    Pointwise,
    /// Mass of q^{α,β}(t) against t^{α−β}/Γ(1+α−β).
    MassScaling,
    /// Space-time integrals of |q| and |∇q| entering the singular-integral kernel.
    CzKernel,
    /// Time integrals of powers of h⁻¹ and the triple product integral.
    TimeIntegrals,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ForcingKind {
    /// f(t, x) = exp(−|x|²/w²), constant in time.
    Gaussian,
    /// Band-limited random field with a few cosine time modes, seeded.
    Random,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub half_width: f64,
    pub points: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TimeConfig {
    pub horizon: f64,
    pub steps: usize,
}

impl Default for TimeConfig {
    fn default() -> Self {
        TimeConfig {
            horizon: 1.0,
            steps: 128,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ForcingConfig {
    pub kind: ForcingKind,
    /// Gaussian width.
    pub width: f64,
    /// Random field: largest wavenumber per axis (default n/4).
    pub max_wavenumber: Option<usize>,
    /// Random field: number of cosine time modes.
    pub time_terms: usize,
}

impl Default for ForcingConfig {
    fn default() -> Self {
        ForcingConfig {
            kind: ForcingKind::Gaussian,
            width: 1.0,
            max_wavenumber: None,
            time_terms: 4,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifyConfig {
    pub check: Option<BoundCheck>,
    /// Length scales b for the integral checks.
    pub b: Vec<f64>,
    pub p: f64,
    pub q: f64,
    pub samples: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            check: None,
            b: vec![0.5, 1.0, 2.0, 4.0],
            p: 2.0,
            q: 2.0,
            samples: 20,
        }
    }
}

fn default_profile() -> String {
    "power:1".into()
}

fn default_dimension() -> usize {
    1
}

fn default_alpha() -> f64 {
    0.5
}

/// One experiment. The output directory is not part of the experiment and
/// is left out of the echoed config and its hash.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub task: Task,
    #[serde(default = "default_profile")]
    pub profile: String,
    #[serde(default = "default_dimension")]
    pub dimension: usize,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default)]
    pub beta: Option<f64>,
    #[serde(default)]
    pub times: Option<Vec<f64>>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub grid: Option<GridConfig>,
    #[serde(default)]
    pub time: TimeConfig,
    #[serde(default)]
    pub forcing: ForcingConfig,
    #[serde(default)]
    pub verify: VerifyConfig,
}

fn bad<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Config(msg.into()))
}

impl ExperimentConfig {
    pub fn for_task(task: Task) -> Self {
        ExperimentConfig {
            task,
            profile: default_profile(),
            dimension: default_dimension(),
            alpha: default_alpha(),
            beta: None,
            times: None,
            seed: 0,
            output: None,
            grid: None,
            time: TimeConfig::default(),
            forcing: ForcingConfig::default(),
            verify: VerifyConfig::default(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(format!("config: {}", e.message())))
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn beta(&self) -> f64 {
        self.beta.unwrap_or(self.alpha)
    }

    /// Evaluation times, with a per-task default.
    pub fn times(&self) -> Vec<f64> {
        match &self.times {
            Some(t) => t.clone(),
            None => match self.task {
                Task::VerifyBounds => match self.verify.check {
                    Some(BoundCheck::MassScaling) => vec![0.25, 0.5, 1.0, 2.0],
                    _ => vec![0.5, 1.0, 2.0],
                },
                Task::Solve => vec![self.time.horizon],
                _ => vec![1.0],
            },
        }
    }

    /// Grid for tasks that need a fixed one; `None` means automatic sizing.
    pub fn space_grid(&self) -> Result<Option<SpaceGrid>> {
        match (&self.grid, self.task) {
            (Some(g), _) => SpaceGrid::new(self.dimension, g.half_width, g.points).map(Some),
            (None, Task::Solve) => SpaceGrid::new(self.dimension, 8.0, 256).map(Some),
            (None, Task::VerifyApriori) => SpaceGrid::new(self.dimension, std::f64::consts::PI, 64).map(Some),
            (None, _) => Ok(None),
        }
    }

    pub fn scaling_profile(&self) -> Result<ScalingProfile> {
        ScalingProfile::from_catalog(&self.profile)
    }

    /// Every check that does not require numerical work.
    pub fn validate(&self) -> Result<()> {
        if !(1..=3).contains(&self.dimension) {
            return bad(format!("dimension must be 1, 2 or 3, got {}", self.dimension));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return bad(format!("alpha must lie in (0, 1), got {}", self.alpha));
        }
        if let Some(b) = self.beta {
            if !(0.0..=self.alpha + 1.0).contains(&b) {
                return bad(format!("beta must lie in [0, alpha + 1], got {b}"));
            }
        }
        let times = self.times();
        if times.is_empty() || times.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
            return bad("times must be a non-empty list of positive numbers");
        }
        if !(self.time.horizon.is_finite() && self.time.horizon > 0.0) || self.time.steps < 2 {
            return bad("time.horizon must be positive and time.steps at least 2");
        }
        if self.task != Task::VerifyClassG {
            self.scaling_profile()?;
        }
        let grid = self.space_grid()?;
        if let Some(out) = &self.output {
            if out.is_file() {
                return bad(format!("output {} is a file, expected a directory", out.display()));
            }
        }
        match self.task {
            Task::Solve => {
                if times.iter().any(|t| *t > self.time.horizon) {
                    return bad("snapshot times must not exceed time.horizon");
                }
                if !(self.forcing.width > 0.0) || self.forcing.time_terms == 0 {
                    return bad("forcing.width must be positive and forcing.time_terms at least 1");
                }
                let n = grid.map_or(0, |g| g.points_per_axis);
                if self.forcing.kind == ForcingKind::Random && 2 * self.random_band(n) >= n {
                    return bad("forcing.max_wavenumber must stay below a half of grid.points");
                }
            }
            Task::VerifyBounds => {
                let Some(check) = self.verify.check else {
                    return bad("verify-bounds needs verify.check");
                };
                if matches!(check, BoundCheck::CzKernel | BoundCheck::TimeIntegrals) && self.dimension != 1 {
                    return bad("the integral checks run in dimension 1");
                }
                if self.verify.b.is_empty() || self.verify.b.iter().any(|b| !(*b > 0.0 && b.is_finite())) {
                    return bad("verify.b must be a non-empty list of positive numbers");
                }
            }
            Task::VerifyApriori => {
                for (k, v) in [("p", self.verify.p), ("q", self.verify.q)] {
                    if !(v > 1.0 && v.is_finite()) {
                        return bad(format!("verify.{k} must lie in (1, ∞), got {v}"));
                    }
                }
                if self.verify.samples < 2 {
                    return bad("verify.samples must be at least 2");
                }
            }
            _ => {}
        }
        Ok(())
    }

    pub fn random_band(&self, points: usize) -> usize {
        self.forcing.max_wavenumber.unwrap_or(points / 4)
    }

    /// SHA-256 of the canonical JSON form of the config.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_unknown_keys() {
        let c = ExperimentConfig::from_toml("task = \"heatkernel\"\n").unwrap();
        assert_eq!(c.profile, "power:1");
        assert_eq!(c.times(), vec![1.0]);
        c.validate().unwrap();
        assert!(ExperimentConfig::from_toml("task = \"heatkernel\"\nlambda = 3\n").is_err());
        assert!(ExperimentConfig::from_toml("task = \"solve\"\n[grid]\nhalf_width = 4.0\npoints = 64\nextra = 1\n").is_err());
        assert!(ExperimentConfig::from_toml("task = \"nope\"\n").is_err());
    }

    #[test]
    fn validation_rejects_out_of_range_values() {
        let mut c = ExperimentConfig::for_task(Task::Fundsol);
        c.alpha = 1.2;
        assert!(matches!(c.validate(), Err(Error::Config(_))));
        c.alpha = 0.5;
        c.beta = Some(2.0);
        assert!(c.validate().is_err());
        c.beta = None;
        c.profile = "power:3".into();
        assert!(c.validate().is_err());
        let mut v = ExperimentConfig::for_task(Task::VerifyBounds);
        assert!(v.validate().is_err());
        v.verify.check = Some(BoundCheck::CzKernel);
        v.validate().unwrap();
        v.dimension = 2;
        assert!(v.validate().is_err());
    }

    #[test]
    fn hash_ignores_output_location() {
        let mut a = ExperimentConfig::for_task(Task::Symbol);
        let h = a.hash();
        assert_eq!(h.len(), 64);
        a.output = Some("somewhere".into());
        assert_eq!(a.hash(), h);
        a.seed = 1;
        assert_ne!(a.hash(), h);
    }

    #[test]
    fn shipped_configs_validate() {
        let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
        let mut n = 0;
        for entry in std::fs::read_dir(dir).unwrap() {
            let path = entry.unwrap().path();
            if path.extension().is_some_and(|e| e == "toml") {
                ExperimentConfig::load(&path).unwrap().validate().unwrap();
                n += 1;
            }
        }
        assert!(n >= 3);
    }
}
