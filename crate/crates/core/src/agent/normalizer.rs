//! Z-score reward normalization over a trailing window or the full history.

use std::collections::VecDeque;

use crate::scalar::Real;

/// Windows whose standard deviation falls below this map every reward to 0.
pub const SIGMA_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormalizationMode {
    Off,
    /// The `w` most recent rewards, current one included.
    Window(usize),
    FullHistory,
}

#[derive(Debug, Clone)]
pub struct RewardNormalizer<T> {
    mode: NormalizationMode,
    window: VecDeque<T>,
    // Welford aggregates for full-history mode.
    count: u64,
    mean: T,
    m2: T,
}

impl<T: Real> RewardNormalizer<T> {
    pub fn new(mode: NormalizationMode) -> Self {
        let cap = match mode {
            NormalizationMode::Window(w) => w.min(1 << 16),
            _ => 0,
        };
        Self {
            mode,
            window: VecDeque::with_capacity(cap),
            count: 0,
            mean: T::zero(),
            m2: T::zero(),
        }
    }

    pub fn mode(&self) -> NormalizationMode {
        self.mode
    }

    /// Records `reward` and returns its z-score against the retained rewards.
    pub fn normalize(&mut self, reward: T) -> T {
        let (mean, std) = match self.mode {
            NormalizationMode::Off => return reward,
            NormalizationMode::Window(w) => {
                if self.window.len() == w.max(1) {
                    self.window.pop_front();
                }
                self.window.push_back(reward);
                window_stats(&self.window)
            }
            NormalizationMode::FullHistory => {
                self.count += 1;
                let delta = reward - self.mean;
                self.mean = self.mean + delta / T::from_count(self.count as usize);
                self.m2 = self.m2 + delta * (reward - self.mean);
                let var = (self.m2 / T::from_count(self.count as usize)).max(T::zero());
                (self.mean, var.sqrt())
            }
        };
        if std < T::lit(SIGMA_FLOOR) {
            T::zero()
        } else {
            (reward - mean) / std
        }
    }

    /// Number of rewards currently contributing to the statistics.
    pub fn retained(&self) -> usize {
        match self.mode {
            NormalizationMode::Off => 0,
            NormalizationMode::Window(_) => self.window.len(),
            NormalizationMode::FullHistory => self.count as usize,
        }
    }

    /// Current mean and population standard deviation of retained rewards.
    pub fn stats(&self) -> (T, T) {
        match self.mode {
            NormalizationMode::Off => (T::zero(), T::zero()),
            NormalizationMode::Window(_) => window_stats(&self.window),
            NormalizationMode::FullHistory if self.count == 0 => (T::zero(), T::zero()),
            NormalizationMode::FullHistory => {
                let var = (self.m2 / T::from_count(self.count as usize)).max(T::zero());
                (self.mean, var.sqrt())
            }
        }
    }
}

fn window_stats<T: Real>(values: &VecDeque<T>) -> (T, T) {
    if values.is_empty() {
        return (T::zero(), T::zero());
    }
    let n = T::from_count(values.len());
    let mean = values.iter().copied().sum::<T>() / n;
    let var = values.iter().map(|&v| (v - mean) * (v - mean)).sum::<T>() / n;
    (mean, var.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn off_passes_through() {
        let mut n = RewardNormalizer::<f64>::new(NormalizationMode::Off);
        assert_eq!(n.normalize(7.3), 7.3);
        assert_eq!(n.retained(), 0);
    }

    #[test]
    fn symmetric_two_point_window() {
        let mut n = RewardNormalizer::<f64>::new(NormalizationMode::Window(1000));
        assert_eq!(n.normalize(0.0), 0.0);
        assert_eq!(n.normalize(2.0), 1.0);
        assert_eq!(n.stats(), (1.0, 1.0));
    }

    #[test]
    fn constant_history_maps_to_zero() {
        for mode in [NormalizationMode::Window(10), NormalizationMode::FullHistory] {
            let mut n = RewardNormalizer::<f64>::new(mode);
            for _ in 0..3 {
                n.normalize(1.0);
            }
            assert_eq!(n.normalize(1.0), 0.0);
        }
    }

    #[test]
    fn window_drops_oldest() {
        let mut n = RewardNormalizer::<f64>::new(NormalizationMode::Window(2));
        n.normalize(100.0);
        n.normalize(0.0);
        // Retained {0, 2}: the 100 has left the window.
        assert_eq!(n.normalize(2.0), 1.0);
        assert_eq!(n.retained(), 2);
    }

    proptest! {
        #[test]
        fn window_never_exceeds_w(w in 1usize..20, rewards in prop::collection::vec(-5.0f64..5.0, 0..60)) {
            let mut n = RewardNormalizer::new(NormalizationMode::Window(w));
            for (i, r) in rewards.iter().enumerate() {
                n.normalize(*r);
                prop_assert_eq!(n.retained(), (i + 1).min(w));
            }
        }

        #[test]
        fn window_matches_batch(w in 1usize..20, rewards in prop::collection::vec(-5.0f64..5.0, 1..60)) {
            let mut n = RewardNormalizer::new(NormalizationMode::Window(w));
            for (i, &r) in rewards.iter().enumerate() {
                let got = n.normalize(r);
                let tail = &rewards[(i + 1).saturating_sub(w)..=i];
                let m = tail.iter().sum::<f64>() / tail.len() as f64;
                let s = (tail.iter().map(|x| (x - m).powi(2)).sum::<f64>() / tail.len() as f64).sqrt();
                let want = if s < SIGMA_FLOOR { 0.0 } else { (r - m) / s };
                prop_assert!((got - want).abs() <= 1e-9 * (1.0 + want.abs()));
            }
        }

        #[test]
        fn full_history_matches_batch(rewards in prop::collection::vec(-50.0f64..50.0, 2..300)) {
            let mut n = RewardNormalizer::new(NormalizationMode::FullHistory);
            for &r in &rewards {
                n.normalize(r);
            }
            let len = rewards.len() as f64;
            let m = rewards.iter().sum::<f64>() / len;
            let s = (rewards.iter().map(|x| (x - m).powi(2)).sum::<f64>() / len).sqrt();
            let (gm, gs) = n.stats();
            prop_assert!((gm - m).abs() <= 1e-9 * m.abs().max(1e-3));
            prop_assert!((gs - s).abs() <= 1e-9 * s.max(1e-3));
        }
    }
}
