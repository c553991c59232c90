//! The HTMRL agent.
//!
//! The pooler's cells are split into `num_actions` bins of consecutive cells;
//! cells past the last full bin belong to no action. Each step the bin holding
//! the most active cells is the chosen action. Learning strengthens or weakens
//! the synapses from the encoded state's bits to the chosen bin's active cells
//! in proportion to the (optionally normalized) reward. Synapses to other
//! cells are never modified.

mod normalizer;

pub use normalizer::{NormalizationMode, RewardNormalizer, SIGMA_FLOOR};

use rand::seq::IndexedRandom;
use rand::Rng;

use crate::error::{HtmError, Result};
use crate::pooler::{PoolerConfig, SpatialPooler};
use crate::rng::{self, StreamRng};
use crate::scalar::Real;
use crate::sdr::{CategoryEncoder, Sdr};

/// Which active cells receive the reward-scaled update.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum UpdateTarget {
    /// Active cells inside the chosen action's bin.
    #[default]
    ChosenBin,
    /// Every active cell, whatever bin it is in.
    AllActive,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AgentConfig<T> {
    pub encoder: CategoryEncoder,
    pub pooler: PoolerConfig<T>,
    pub num_actions: usize,
    pub normalization: NormalizationMode,
    pub update_target: UpdateTarget,
    pub seed: u64,
}

impl<T: Real> AgentConfig<T> {
    /// Default pooler sized to the encoder, with normalization off.
    pub fn new(encoder: CategoryEncoder, num_actions: usize, seed: u64) -> Self {
        Self {
            pooler: PoolerConfig::new(encoder.width()),
            encoder,
            num_actions,
            normalization: NormalizationMode::Off,
            update_target: UpdateTarget::ChosenBin,
            seed,
        }
    }

    pub fn bin_size(&self) -> usize {
        self.pooler.num_cells / self.num_actions.max(1)
    }

    pub fn validate(&self) -> Result<()> {
        self.pooler.validate()?;
        if self.pooler.input_width != self.encoder.width() {
            return Err(HtmError::InvalidConfig(format!(
                "pooler input width {} differs from encoder width {}",
                self.pooler.input_width,
                self.encoder.width()
            )));
        }
        if self.num_actions == 0 {
            return Err(HtmError::InvalidConfig("need at least one action".into()));
        }
        if self.bin_size() < 2 {
            return Err(HtmError::InvalidConfig(format!(
                "{} actions leave fewer than 2 cells per bin ({} cells)",
                self.num_actions, self.pooler.num_cells
            )));
        }
        if let NormalizationMode::Window(0) = self.normalization {
            return Err(HtmError::InvalidConfig("normalization window must be positive".into()));
        }
        Ok(())
    }
}

/// Outputs of `act` carried to the following `learn`.
#[derive(Debug, Clone, PartialEq)]
pub struct PendingDecision {
    pub input: Sdr,
    pub active: Vec<usize>,
    pub action: usize,
    /// Cells whose synapses the next `learn` updates.
    pub update_cells: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct HtmrlAgent<T> {
    cfg: AgentConfig<T>,
    pooler: SpatialPooler<T>,
    normalizer: RewardNormalizer<T>,
    rng: StreamRng,
    bin_size: usize,
    pending: Option<PendingDecision>,
    learning: bool,
}

impl<T: Real> HtmrlAgent<T> {
    pub fn new(cfg: AgentConfig<T>) -> Result<Self> {
        cfg.validate()?;
        let pooler = SpatialPooler::new(cfg.pooler.clone(), rng::derive_seed(cfg.seed, 0, 0))?;
        Ok(Self::with_pooler(cfg, pooler))
    }

    /// Uses a prebuilt pooler; its configuration replaces `cfg.pooler`.
    pub fn from_pooler(mut cfg: AgentConfig<T>, pooler: SpatialPooler<T>) -> Result<Self> {
        cfg.pooler = pooler.config().clone();
        cfg.validate()?;
        Ok(Self::with_pooler(cfg, pooler))
    }

    fn with_pooler(cfg: AgentConfig<T>, pooler: SpatialPooler<T>) -> Self {
        Self {
            normalizer: RewardNormalizer::new(cfg.normalization),
            rng: rng::stream(rng::derive_seed(cfg.seed, 0, 1)),
            bin_size: cfg.bin_size(),
            pooler,
            cfg,
            pending: None,
            learning: true,
        }
    }

    /// With learning off, `act` leaves duty cycles alone and `learn` changes
    /// nothing (it returns a zero scale).
    pub fn set_learning(&mut self, learning: bool) {
        self.learning = learning;
    }

    pub fn is_learning(&self) -> bool {
        self.learning
    }

    pub fn config(&self) -> &AgentConfig<T> {
        &self.cfg
    }

    pub fn pooler(&self) -> &SpatialPooler<T> {
        &self.pooler
    }

    pub fn normalizer(&self) -> &RewardNormalizer<T> {
        &self.normalizer
    }

    pub fn pending(&self) -> Option<&PendingDecision> {
        self.pending.as_ref()
    }

    pub fn bin_size(&self) -> usize {
        self.bin_size
    }

    pub fn num_actions(&self) -> usize {
        self.cfg.num_actions
    }

    /// Bin of `cell`, or `None` for the disabled tail cells.
    pub fn bin_of(&self, cell: usize) -> Option<usize> {
        let action = cell / self.bin_size;
        (action < self.cfg.num_actions).then_some(action)
    }

    /// Picks an action for `state` and remembers what is needed to learn.
    pub fn act(&mut self, state: usize) -> Result<usize> {
        if self.pending.is_some() {
            return Err(HtmError::Protocol("act called twice without learn".into()));
        }
        let input = self.cfg.encoder.encode(state)?;
        let active = if self.learning {
            self.pooler.compute(&input, &mut self.rng)?
        } else {
            self.pooler.infer(&input, &mut self.rng)?
        };
        let scores = bin_scores(&active, self.bin_size, self.cfg.num_actions);
        let action = argmax_random_tie(&scores, &mut self.rng);
        let update_cells = match self.cfg.update_target {
            UpdateTarget::ChosenBin => active
                .iter()
                .copied()
                .filter(|&c| c / self.bin_size == action)
                .collect(),
            UpdateTarget::AllActive => active.clone(),
        };
        self.pending = Some(PendingDecision {
            input,
            active,
            action,
            update_cells,
        });
        Ok(action)
    }

    /// Applies the reward to the pending decision and returns the scale
    /// actually used after normalization.
    pub fn learn(&mut self, reward: T) -> Result<T> {
        let decision = self
            .pending
            .take()
            .ok_or_else(|| HtmError::Protocol("learn called without a pending act".into()))?;
        if !self.learning {
            return Ok(T::zero());
        }
        let scale = self.normalizer.normalize(reward);
        self.pooler
            .adapt_synapses(&decision.input, &decision.update_cells, scale)?;
        Ok(scale)
    }
}

/// Active cells per action bin; cells beyond `num_actions * bin_size` are ignored.
pub fn bin_scores(active: &[usize], bin_size: usize, num_actions: usize) -> Vec<usize> {
    let mut scores = vec![0usize; num_actions];
    for &cell in active {
        let bin = cell / bin_size;
        if bin < num_actions {
            scores[bin] += 1;
        }
    }
    scores
}

/// Index of the largest score; ties resolved uniformly at random.
pub fn argmax_random_tie<R: Rng + ?Sized>(scores: &[usize], rng: &mut R) -> usize {
    let best = scores.iter().copied().max().unwrap_or(0);
    let tied: Vec<usize> = (0..scores.len()).filter(|&i| scores[i] == best).collect();
    *tied.choose(rng).unwrap_or(&0)
}
