use rand::Rng;

use crate::error::{HtmError, Result};
use crate::rng::{self, StreamRng};

/// `num_states` deterministic bandits: in each state one winning arm pays +1
/// and every other arm pays -1. The current state is drawn uniformly per step.
#[derive(Debug, Clone)]
pub struct ContextualBandit {
    num_arms: usize,
    winning_arm: Vec<usize>,
    rng: StreamRng,
}

impl ContextualBandit {
    pub fn new(num_states: usize, num_arms: usize, seed: u64) -> Result<Self> {
        if num_states == 0 || num_arms == 0 {
            return Err(HtmError::InvalidConfig(
                "contextual bandit needs at least one state and one arm".into(),
            ));
        }
        let mut rng = rng::stream(seed);
        let winning_arm = (0..num_states).map(|_| rng.random_range(0..num_arms)).collect();
        Ok(Self {
            num_arms,
            winning_arm,
            rng,
        })
    }

    pub fn num_states(&self) -> usize {
        self.winning_arm.len()
    }

    pub fn num_arms(&self) -> usize {
        self.num_arms
    }

    pub fn winning_arm(&self, state: usize) -> Result<usize> {
        self.winning_arm
            .get(state)
            .copied()
            .ok_or_else(|| HtmError::InvalidInput(format!("state {state} out of range")))
    }

    pub fn step(&mut self) -> usize {
        self.rng.random_range(0..self.winning_arm.len())
    }

    pub fn pull(&self, state: usize, arm: usize) -> Result<f64> {
        let win = self.winning_arm(state)?;
        if arm >= self.num_arms {
            return Err(HtmError::InvalidInput(format!("arm {arm} out of range")));
        }
        Ok(if arm == win { 1.0 } else { -1.0 })
    }
}
