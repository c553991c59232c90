use rand::seq::IndexedRandom;
use rand::Rng;

use crate::error::{HtmError, Result};
use crate::scalar::Real;

/// Sample-average ε-greedy learner with one estimate per (state, arm).
#[derive(Debug, Clone)]
pub struct EpsGreedyAgent<T> {
    epsilon: f64,
    num_arms: usize,
    estimates: Vec<T>,
    counts: Vec<u64>,
}

impl<T: Real> EpsGreedyAgent<T> {
    pub fn new(num_states: usize, num_arms: usize, epsilon: f64) -> Result<Self> {
        if num_states == 0 || num_arms == 0 {
            return Err(HtmError::InvalidConfig("need at least one state and arm".into()));
        }
        if !(0.0..=1.0).contains(&epsilon) {
            return Err(HtmError::InvalidConfig(format!("epsilon {epsilon} outside [0, 1]")));
        }
        Ok(Self {
            epsilon,
            num_arms,
            estimates: vec![T::zero(); num_states * num_arms],
            counts: vec![0; num_states * num_arms],
        })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn num_arms(&self) -> usize {
        self.num_arms
    }

    fn slot(&self, state: usize, arm: usize) -> Result<usize> {
        if arm >= self.num_arms || (state + 1) * self.num_arms > self.estimates.len() {
            return Err(HtmError::InvalidInput(format!(
                "(state {state}, arm {arm}) out of range"
            )));
        }
        Ok(state * self.num_arms + arm)
    }

    pub fn estimates(&self, state: usize) -> Result<&[T]> {
        let start = self.slot(state, 0)?;
        Ok(&self.estimates[start..start + self.num_arms])
    }

    pub fn count(&self, state: usize, arm: usize) -> Result<u64> {
        Ok(self.counts[self.slot(state, arm)?])
    }

    /// Overwrites the estimates of one state; counts are left alone.
    pub fn set_estimates(&mut self, state: usize, values: &[T]) -> Result<()> {
        let start = self.slot(state, 0)?;
        if values.len() != self.num_arms {
            return Err(HtmError::InvalidInput("estimate length mismatch".into()));
        }
        self.estimates[start..start + self.num_arms].copy_from_slice(values);
        Ok(())
    }

    pub fn act<R: Rng + ?Sized>(&self, state: usize, rng: &mut R) -> Result<usize> {
        let estimates = self.estimates(state)?;
        if rng.random::<f64>() < self.epsilon {
            return Ok(rng.random_range(0..self.num_arms));
        }
        let best = estimates
            .iter()
            .copied()
            .fold(T::neg_infinity(), T::max);
        let tied: Vec<usize> = (0..self.num_arms).filter(|&a| estimates[a] == best).collect();
        Ok(*tied.choose(rng).expect("at least one arm"))
    }

    pub fn learn(&mut self, state: usize, arm: usize, reward: T) -> Result<()> {
        let i = self.slot(state, arm)?;
        self.counts[i] += 1;
        let n = T::from_count(self.counts[i] as usize);
        self.estimates[i] = self.estimates[i] + (reward - self.estimates[i]) / n;
        Ok(())
    }
}
