//! Experiment descriptions and their flat `key=value` manifest form.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use htmrl_core::{AgentConfig, CategoryEncoder, NormalizationMode, PoolerConfig, Schedule};

use crate::error::{HarnessError, Result};

/// Bits reserved per state in the capacity experiments.
pub const CAPACITY_BITS_PER_STATE: usize = 20;
/// Arms of the non-stationary Gaussian bandit.
pub const GAUSSIAN_ARMS: usize = 10;
/// Boost strength used unless an experiment turns boosting off.
pub const DEFAULT_BOOST_STRENGTH: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// 6 input bits, 2048 cells, 40 active.
    Full,
    /// 6 input bits, 100 cells, 10 active.
    Small,
    /// 1 input bit, 20 cells, 2 active.
    Tiny,
}

impl Preset {
    /// `(input bits, cells, active cells)`.
    pub fn dimensions(self) -> (usize, usize, usize) {
        match self {
            Preset::Full => (6, 2048, 40),
            Preset::Small => (6, 100, 10),
            Preset::Tiny => (1, 20, 2),
        }
    }
}

impl FromStr for Preset {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(Preset::Full),
            "small" => Ok(Preset::Small),
            "tiny" => Ok(Preset::Tiny),
            other => Err(HarnessError::Spec(format!("unknown preset {other:?}"))),
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Preset::Full => "full",
            Preset::Small => "small",
            Preset::Tiny => "tiny",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AgentKind {
    Htmrl,
    EpsGreedy(f64),
}

impl FromStr for AgentKind {
    type Err = HarnessError;

    /// `htmrl` or `eps:<epsilon>`.
    fn from_str(s: &str) -> Result<Self> {
        if s == "htmrl" {
            return Ok(AgentKind::Htmrl);
        }
        let eps = s
            .strip_prefix("eps:")
            .and_then(|e| e.parse::<f64>().ok())
            .ok_or_else(|| HarnessError::Spec(format!("unknown agent {s:?}")))?;
        if !(0.0..=1.0).contains(&eps) {
            return Err(HarnessError::Spec(format!("epsilon {eps} outside [0, 1]")));
        }
        Ok(AgentKind::EpsGreedy(eps))
    }
}

impl fmt::Display for AgentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AgentKind::Htmrl => f.write_str("htmrl"),
            AgentKind::EpsGreedy(e) => write!(f, "eps:{e}"),
        }
    }
}

pub fn parse_normalization(s: &str) -> Result<NormalizationMode> {
    match s {
        "off" => Ok(NormalizationMode::Off),
        "full" => Ok(NormalizationMode::FullHistory),
        w => match w.parse::<usize>() {
            Ok(w) if w > 0 => Ok(NormalizationMode::Window(w)),
            _ => Err(HarnessError::Spec(format!("bad reward window {s:?}"))),
        },
    }
}

pub fn format_normalization(mode: NormalizationMode) -> String {
    match mode {
        NormalizationMode::Off => "off".into(),
        NormalizationMode::FullHistory => "full".into(),
        NormalizationMode::Window(w) => w.to_string(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CapacityParams {
    pub states: usize,
    pub arms: usize,
    pub max_steps: usize,
    /// Consecutive optimal actions after which learning stops.
    pub halt_after: usize,
    /// Steps played with learning off after the halt.
    pub eval_steps: usize,
    pub ma_window: usize,
    pub boost_strength: f64,
}

impl CapacityParams {
    pub fn new(states: usize, arms: usize) -> Self {
        Self {
            states,
            arms,
            max_steps: 2_000_000,
            halt_after: 100,
            eval_steps: 1000,
            ma_window: 1000,
            boost_strength: DEFAULT_BOOST_STRENGTH,
        }
    }

    pub fn agent_config(&self, seed: u64) -> Result<AgentConfig<f64>> {
        let encoder = CategoryEncoder::new(self.states, CAPACITY_BITS_PER_STATE)?;
        let mut cfg = AgentConfig::new(encoder, self.arms, seed);
        cfg.pooler.boost_strength = self.boost_strength;
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NonstationaryParams {
    pub preset: Preset,
    pub schedule: Schedule,
    pub agent: AgentKind,
    pub boost: bool,
    pub normalization: NormalizationMode,
    pub steps: usize,
    pub ma_window: usize,
    pub boost_strength: f64,
}

impl NonstationaryParams {
    pub fn new(preset: Preset, schedule: Schedule, agent: AgentKind) -> Self {
        Self {
            preset,
            schedule,
            agent,
            boost: true,
            normalization: NormalizationMode::Window(1000),
            steps: 10_000,
            ma_window: 10,
            boost_strength: DEFAULT_BOOST_STRENGTH,
        }
    }

    pub fn agent_config(&self, seed: u64) -> Result<AgentConfig<f64>> {
        let (bits, cells, active) = self.preset.dimensions();
        let encoder = CategoryEncoder::new(1, bits)?;
        let mut cfg = AgentConfig::new(encoder, GAUSSIAN_ARMS, seed);
        cfg.pooler = PoolerConfig::new(bits).with_cells(cells, active);
        cfg.pooler.boost_strength = if self.boost { self.boost_strength } else { 0.0 };
        cfg.normalization = self.normalization;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn period(&self) -> Option<usize> {
        self.schedule.period()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Experiment {
    Capacity(CapacityParams),
    Nonstationary(NonstationaryParams),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub experiment: Experiment,
    pub repeats: usize,
    pub seed: u64,
    /// Run repeats on the rayon pool; results do not depend on it.
    pub parallel: bool,
}

impl ExperimentSpec {
    pub fn capacity(params: CapacityParams, repeats: usize, seed: u64) -> Self {
        Self {
            experiment: Experiment::Capacity(params),
            repeats,
            seed,
            parallel: true,
        }
    }

    pub fn nonstationary(params: NonstationaryParams, repeats: usize, seed: u64) -> Self {
        Self {
            experiment: Experiment::Nonstationary(params),
            repeats,
            seed,
            parallel: true,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self.experiment {
            Experiment::Capacity(_) => "capacity",
            Experiment::Nonstationary(_) => "nonstationary",
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.repeats == 0 {
            return Err(HarnessError::Spec("need at least one repeat".into()));
        }
        match &self.experiment {
            Experiment::Capacity(p) => {
                if p.max_steps == 0 || p.halt_after == 0 || p.ma_window == 0 {
                    return Err(HarnessError::Spec(
                        "max steps, halt run and window must be positive".into(),
                    ));
                }
                p.agent_config(self.seed)?;
            }
            Experiment::Nonstationary(p) => {
                if p.steps == 0 || p.ma_window == 0 {
                    return Err(HarnessError::Spec("steps and window must be positive".into()));
                }
                if let AgentKind::Htmrl = p.agent {
                    p.agent_config(self.seed)?;
                }
                if p.period() == Some(0) {
                    return Err(HarnessError::Spec("period must be positive".into()));
                }
            }
        }
        Ok(())
    }

    /// Flat `key=value` lines, sorted by key, sufficient to rerun exactly.
    pub fn to_manifest(&self) -> String {
        let mut kv: BTreeMap<&str, String> = BTreeMap::new();
        kv.insert("kind", self.kind().into());
        kv.insert("repeats", self.repeats.to_string());
        kv.insert("seed", self.seed.to_string());
        match &self.experiment {
            Experiment::Capacity(p) => {
                kv.insert("states", p.states.to_string());
                kv.insert("arms", p.arms.to_string());
                kv.insert("max_steps", p.max_steps.to_string());
                kv.insert("halt_after", p.halt_after.to_string());
                kv.insert("eval_steps", p.eval_steps.to_string());
                kv.insert("ma_window", p.ma_window.to_string());
                kv.insert("boost_strength", p.boost_strength.to_string());
                kv.insert("bits_per_state", CAPACITY_BITS_PER_STATE.to_string());
            }
            Experiment::Nonstationary(p) => {
                kv.insert("preset", p.preset.to_string());
                kv.insert("schedule", p.schedule.to_string());
                kv.insert("agent", p.agent.to_string());
                kv.insert("boost", if p.boost { "on" } else { "off" }.into());
                kv.insert("reward_window", format_normalization(p.normalization));
                kv.insert("steps", p.steps.to_string());
                kv.insert("ma_window", p.ma_window.to_string());
                kv.insert("boost_strength", p.boost_strength.to_string());
            }
        }
        kv.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }

    /// Parses [`Self::to_manifest`] output. Unknown keys are ignored.
    pub fn from_manifest(text: &str) -> Result<Self> {
        let kv: BTreeMap<&str, &str> = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .filter_map(|l| l.split_once('='))
            .map(|(k, v)| (k.trim(), v.trim()))
            .collect();
        let get = |k: &str| -> Result<&str> {
            kv.get(k)
                .copied()
                .ok_or_else(|| HarnessError::Spec(format!("manifest lacks {k:?}")))
        };
        fn num<T: FromStr>(k: &str, v: &str) -> Result<T> {
            v.parse()
                .map_err(|_| HarnessError::Spec(format!("manifest value {k}={v:?} is malformed")))
        }
        let repeats = num("repeats", get("repeats")?)?;
        let seed = num("seed", get("seed")?)?;
        let experiment = match get("kind")? {
            "capacity" => Experiment::Capacity(CapacityParams {
                states: num("states", get("states")?)?,
                arms: num("arms", get("arms")?)?,
                max_steps: num("max_steps", get("max_steps")?)?,
                halt_after: num("halt_after", get("halt_after")?)?,
                eval_steps: num("eval_steps", get("eval_steps")?)?,
                ma_window: num("ma_window", get("ma_window")?)?,
                boost_strength: num("boost_strength", get("boost_strength")?)?,
            }),
            "nonstationary" => Experiment::Nonstationary(NonstationaryParams {
                preset: get("preset")?.parse()?,
                schedule: get("schedule")?.parse()?,
                agent: get("agent")?.parse()?,
                boost: match get("boost")? {
                    "on" => true,
                    "off" => false,
                    other => return Err(HarnessError::Spec(format!("bad boost {other:?}"))),
                },
                normalization: parse_normalization(get("reward_window")?)?,
                steps: num("steps", get("steps")?)?,
                ma_window: num("ma_window", get("ma_window")?)?,
                boost_strength: num("boost_strength", get("boost_strength")?)?,
            }),
            other => return Err(HarnessError::Spec(format!("unknown kind {other:?}"))),
        };
        let spec = Self {
            experiment,
            repeats,
            seed,
            parallel: true,
        };
        spec.validate()?;
        Ok(spec)
    }
}
