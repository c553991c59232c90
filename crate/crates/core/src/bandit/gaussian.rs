use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;

use crate::error::{HtmError, Result};
use crate::rng::{self, StreamRng};
use crate::scalar::Real;

/// When and how a [`GaussianBandit`] changes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Schedule {
    None,
    /// Resample every arm score every `period` steps.
    Reinit(usize),
    /// Permute the existing scores every `period` steps.
    Shuffle(usize),
}

impl Schedule {
    pub fn period(&self) -> Option<usize> {
        match *self {
            Schedule::None => None,
            Schedule::Reinit(p) | Schedule::Shuffle(p) => Some(p),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Schedule::None => "none",
            Schedule::Reinit(_) => "reinit",
            Schedule::Shuffle(_) => "shuffle",
        }
    }

    pub fn with_period(kind: &str, period: usize) -> Result<Self> {
        match kind {
            "none" => Ok(Schedule::None),
            "reinit" => Ok(Schedule::Reinit(period)),
            "shuffle" => Ok(Schedule::Shuffle(period)),
            other => Err(HtmError::InvalidConfig(format!("unknown schedule {other:?}"))),
        }
    }
}

impl FromStr for Schedule {
    type Err = HtmError;

    /// Parses `none`, `reinit:<period>` or `shuffle:<period>`.
    fn from_str(s: &str) -> Result<Self> {
        let (kind, period) = s.split_once(':').unwrap_or((s, "0"));
        let period = period
            .parse()
            .map_err(|_| HtmError::InvalidConfig(format!("bad schedule period in {s:?}")))?;
        Self::with_period(kind, period)
    }
}

impl fmt::Display for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.period() {
            None => f.write_str("none"),
            Some(p) => write!(f, "{}:{p}", self.kind()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScheduleEvent {
    None,
    Reinit,
    Shuffle,
}

/// A single bandit whose arms have scores drawn from `N(0, 1)`; pulling arm
/// `a` pays `N(score_a, 1)`.
///
/// Scores and reward noise use separate streams, so the score trajectory
/// depends only on the seed and never on which arms were pulled.
#[derive(Debug, Clone)]
pub struct GaussianBandit<T> {
    scores: Vec<T>,
    schedule: Schedule,
    score_rng: StreamRng,
    noise_rng: StreamRng,
}

impl<T: Real> GaussianBandit<T> {
    pub fn new(num_arms: usize, schedule: Schedule, seed: u64) -> Result<Self> {
        if num_arms == 0 {
            return Err(HtmError::InvalidConfig("bandit needs at least one arm".into()));
        }
        if schedule.period() == Some(0) {
            return Err(HtmError::InvalidConfig("schedule period must be positive".into()));
        }
        let mut env = Self {
            scores: vec![T::zero(); num_arms],
            schedule,
            score_rng: rng::stream(rng::derive_seed(seed, 0, 0)),
            noise_rng: rng::stream(rng::derive_seed(seed, 0, 1)),
        };
        env.reinit();
        Ok(env)
    }

    pub fn num_arms(&self) -> usize {
        self.scores.len()
    }

    pub fn scores(&self) -> &[T] {
        &self.scores
    }

    pub fn schedule(&self) -> Schedule {
        self.schedule
    }

    /// Arm with the highest score (lowest index on ties).
    pub fn best_arm(&self) -> usize {
        let mut best = 0;
        for (i, &s) in self.scores.iter().enumerate() {
            if s > self.scores[best] {
                best = i;
            }
        }
        best
    }

    fn reinit(&mut self) {
        for s in &mut self.scores {
            *s = T::sample_normal(&mut self.score_rng, T::zero(), T::one());
        }
    }

    /// Must be called with the 0-based index of the upcoming pull. Fires the
    /// schedule at positive multiples of its period, before that pull.
    pub fn advance(&mut self, step: usize) -> ScheduleEvent {
        match self.schedule {
            Schedule::Reinit(p) if step > 0 && step.is_multiple_of(p) => {
                self.reinit();
                ScheduleEvent::Reinit
            }
            Schedule::Shuffle(p) if step > 0 && step.is_multiple_of(p) => {
                self.scores.shuffle(&mut self.score_rng);
                ScheduleEvent::Shuffle
            }
            _ => ScheduleEvent::None,
        }
    }

    pub fn pull(&mut self, arm: usize) -> Result<T> {
        let score = *self
            .scores
            .get(arm)
            .ok_or_else(|| HtmError::InvalidInput(format!("arm {arm} out of range")))?;
        Ok(T::sample_normal(&mut self.noise_rng, score, T::one()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sample_mean_tracks_score() {
        let mut env = GaussianBandit::<f64>::new(10, Schedule::None, 21).unwrap();
        let arm = 3;
        let n = 10_000;
        let mean = (0..n).map(|_| env.pull(arm).unwrap()).sum::<f64>() / n as f64;
        assert!((mean - env.scores()[arm]).abs() < 3.0 / (n as f64).sqrt());
    }

    #[test]
    fn shuffle_preserves_multiset() {
        let mut env = GaussianBandit::<f64>::new(10, Schedule::Shuffle(5), 2).unwrap();
        let mut before = env.scores().to_vec();
        assert_eq!(env.advance(5), ScheduleEvent::Shuffle);
        let mut after = env.scores().to_vec();
        before.sort_by(f64::total_cmp);
        after.sort_by(f64::total_cmp);
        assert_eq!(before, after);
    }

    #[test]
    fn reinit_fires_on_period_multiples_only() {
        let mut env = GaussianBandit::<f64>::new(10, Schedule::Reinit(2000), 5).unwrap();
        let initial = env.scores().to_vec();
        for step in 0..2000 {
            assert_eq!(env.advance(step), ScheduleEvent::None);
            env.pull(0).unwrap();
            assert_eq!(env.scores(), initial.as_slice());
        }
        assert_eq!(env.advance(2000), ScheduleEvent::Reinit);
        assert_ne!(env.scores(), initial.as_slice());
        assert_eq!(env.advance(2001), ScheduleEvent::None);
        assert_eq!(env.advance(4000), ScheduleEvent::Reinit);
    }

    #[test]
    fn no_schedule_never_fires() {
        let mut env = GaussianBandit::<f32>::new(4, Schedule::None, 5).unwrap();
        assert!((0..5000).all(|s| env.advance(s) == ScheduleEvent::None));
    }

    #[test]
    fn scores_do_not_depend_on_pulls() {
        let mut a = GaussianBandit::<f64>::new(10, Schedule::Reinit(10), 4).unwrap();
        let mut b = a.clone();
        for step in 0..100 {
            a.advance(step);
            b.advance(step);
            a.pull(0).unwrap();
            if step % 3 == 0 {
                b.pull(9).unwrap();
            }
            assert_eq!(a.scores(), b.scores());
        }
    }

    #[test]
    fn schedule_parsing() {
        assert_eq!("reinit:2000".parse::<Schedule>().unwrap(), Schedule::Reinit(2000));
        assert_eq!("shuffle:7".parse::<Schedule>().unwrap(), Schedule::Shuffle(7));
        assert_eq!("none".parse::<Schedule>().unwrap(), Schedule::None);
        assert!("spin:3".parse::<Schedule>().is_err());
        assert_eq!(Schedule::Shuffle(7).to_string(), "shuffle:7");
        assert!(GaussianBandit::<f64>::new(3, Schedule::Reinit(0), 0).is_err());
    }

    #[test]
    fn seeded_trajectories_repeat() {
        let run = || {
            let mut env = GaussianBandit::<f64>::new(10, Schedule::Reinit(50), 77).unwrap();
            (0..200)
                .map(|t| {
                    env.advance(t);
                    env.pull(t % 10).unwrap()
                })
                .collect::<Vec<_>>()
        };
        assert_eq!(run(), run());
    }
}
