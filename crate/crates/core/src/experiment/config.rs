use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{Normalization, ROOM_VARIANCES};
use crate::room::Variant;

/// Trials per side in the published comparisons.
pub const PAPER_TRIALS: usize = 500;
/// Trials per side for quick desk runs.
pub const DESK_TRIALS: usize = 50;
pub const DEFAULT_SEED: u64 = 20_240_601;

/// The five room-domain comparisons.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Panel {
    A,
    B,
    C,
    D,
    E,
}

impl Panel {
    pub const ALL: [Panel; 5] = [Panel::A, Panel::B, Panel::C, Panel::D, Panel::E];

    pub fn letter(self) -> char {
        match self {
            Panel::A => 'a',
            Panel::B => 'b',
            Panel::C => 'c',
            Panel::D => 'd',
            Panel::E => 'e',
        }
    }

    /// `"A − B"` in words.
    pub fn caption(self) -> &'static str {
        match self {
            Panel::A => "error without a Lyapunov function (free) - error with one (stable)",
            Panel::B => "error sampling uniformly - error sampling from zeta",
            Panel::C => "error with rho = 1 - error with rho = zeta",
            Panel::D => "error sampling uniformly - error sampling from 1 - zeta",
            Panel::E => "error with rho = 1 - error with rho = 1 - zeta",
        }
    }
}

impl fmt::Display for Panel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

impl FromStr for Panel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "a" => Ok(Panel::A),
            "b" => Ok(Panel::B),
            "c" => Ok(Panel::C),
            "d" => Ok(Panel::D),
            "e" => Ok(Panel::E),
            other => Err(Error::InvalidArgument(format!("unknown panel `{other}` (expected a-e)"))),
        }
    }
}

/// A state distribution used for sampling or as relevance weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistKind {
    Uniform,
    Zeta,
    OneMinusZeta,
}

impl FromStr for DistKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(DistKind::Uniform),
            "zeta" => Ok(DistKind::Zeta),
            "one_minus_zeta" => Ok(DistKind::OneMinusZeta),
            other => Err(Error::InvalidArgument(format!("unknown distribution `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SideConfig {
    pub variant: Variant,
    pub sampling: DistKind,
    pub rho: DistKind,
}

/// Which side of a comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    A,
    B,
}

/// How the visitation distribution ζ is estimated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZetaConfig {
    pub episodes: usize,
    pub horizon: usize,
    pub seed: u64,
}

impl Default for ZetaConfig {
    fn default() -> Self {
        Self {
            episodes: 10_000,
            horizon: 25,
            seed: 25_010_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub panel: Option<Panel>,
    pub side_a: SideConfig,
    pub side_b: SideConfig,
    pub n_samples: usize,
    pub psi: f64,
    pub trials: usize,
    pub seed: u64,
    pub variances: Vec<f64>,
    pub normalization: Normalization,
    /// Replace random draws by one sample per allowed state-action pair.
    pub exhaustive: bool,
    pub zeta: ZetaConfig,
}

impl ExperimentConfig {
    /// Panel preset with the published settings and trial count.
    pub fn panel(panel: Panel) -> Self {
        use DistKind::*;
        let side = |variant, sampling, rho| SideConfig { variant, sampling, rho };
        let stable = Variant::Stable;
        let (side_a, side_b, n_samples, psi) = match panel {
            Panel::A => (side(Variant::Free, Uniform, Uniform), side(stable, Uniform, Uniform), 20, 0.2),
            Panel::B => (side(stable, Uniform, Uniform), side(stable, Zeta, Uniform), 20, 1.5),
            Panel::C => (side(stable, Uniform, Uniform), side(stable, Uniform, Zeta), 200, 4.0),
            Panel::D => (side(stable, Uniform, Uniform), side(stable, OneMinusZeta, Uniform), 20, 1.5),
            Panel::E => (side(stable, Uniform, Uniform), side(stable, Uniform, OneMinusZeta), 200, 4.0),
        };
        Self {
            panel: Some(panel),
            side_a,
            side_b,
            n_samples,
            psi,
            trials: PAPER_TRIALS,
            seed: DEFAULT_SEED,
            variances: ROOM_VARIANCES.to_vec(),
            normalization: Normalization::None,
            exhaustive: false,
            zeta: ZetaConfig::default(),
        }
    }

    pub fn with_trials(mut self, trials: usize) -> Self {
        self.trials = trials;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn side(&self, side: Side) -> &SideConfig {
        match side {
            Side::A => &self.side_a,
            Side::B => &self.side_b,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidArgument("trials must be at least 1".into()));
        }
        if self.n_samples == 0 {
            return Err(Error::InvalidArgument("n_samples must be at least 1".into()));
        }
        if !(self.psi > 0.0 && self.psi.is_finite()) {
            return Err(Error::InvalidArgument(format!("psi {} must be positive", self.psi)));
        }
        if self.variances.is_empty() || self.variances.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
            return Err(Error::InvalidArgument("variances must be positive".into()));
        }
        if self.zeta.episodes == 0 || self.zeta.horizon == 0 {
            return Err(Error::InvalidArgument("zeta episodes and horizon must be positive".into()));
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialises")
    }
}
