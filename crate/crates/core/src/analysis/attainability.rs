//! Probability that an action is reachable from a state's encoding.
//!
//! An input of `n` bits has `dn` enabled bits; every cell has synapses to a
//! uniformly chosen set of `cn` bits. One action is represented by
//! `cells_per_action` cells and is attainable when each of them has at least
//! one synapse from an enabled bit:
//!
//! ```text
//! P = (1 - C(n - dn, cn) / C(n, cn)) ^ cells_per_action
//! ```

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::seq::index;
use statrs::function::factorial::ln_binomial;

use crate::error::{HtmError, Result};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AttainabilityParams {
    pub n: u64,
    /// Enabled input bits, `d * n`.
    pub active_bits: u64,
    /// Bits in each cell's pool, `c * n`.
    pub pool_bits: u64,
    pub cells_per_action: u32,
}

impl AttainabilityParams {
    pub fn new(n: u64, active_bits: u64, pool_bits: u64, cells_per_action: u32) -> Result<Self> {
        if n == 0 {
            return Err(HtmError::InvalidInput("n must be positive".into()));
        }
        if active_bits > n || pool_bits > n {
            return Err(HtmError::InvalidInput(format!(
                "dn = {active_bits} and cn = {pool_bits} must not exceed n = {n}"
            )));
        }
        if cells_per_action == 0 {
            return Err(HtmError::InvalidInput("cells_per_action must be positive".into()));
        }
        Ok(Self {
            n,
            active_bits,
            pool_bits,
            cells_per_action,
        })
    }

    /// From fractions `d` and `c`; `d * n` and `c * n` must be integers.
    pub fn from_fractions(n: u64, d: f64, c: f64, cells_per_action: u32) -> Result<Self> {
        let integral = |x: f64, name: &str| -> Result<u64> {
            let v = x * n as f64;
            let r = v.round();
            if !(0.0..=1.0).contains(&x) || (v - r).abs() > 1e-9 * (1.0 + v.abs()) {
                return Err(HtmError::InvalidInput(format!(
                    "{name} * n = {v} is not an integer in [0, n]"
                )));
            }
            Ok(r as u64)
        };
        Self::new(n, integral(d, "d")?, integral(c, "c")?, cells_per_action)
    }

    /// Probability that a single cell receives no synapse from an enabled bit.
    fn miss_ln(&self) -> Option<f64> {
        if self.pool_bits > self.n - self.active_bits {
            return None;
        }
        Some(ln_binomial(self.n - self.active_bits, self.pool_bits) - ln_binomial(self.n, self.pool_bits))
    }
}

/// `P` computed from log-binomial differences.
pub fn attainability_probability(p: &AttainabilityParams) -> f64 {
    1.0 - unattainability_probability(p)
}

/// `1 - P`, evaluated without cancellation for tiny values.
pub fn unattainability_probability(p: &AttainabilityParams) -> f64 {
    match p.miss_ln() {
        None => 0.0,
        Some(ln_miss) => {
            let miss = ln_miss.exp();
            if miss >= 1.0 {
                return 1.0;
            }
            // 1 - (1 - miss)^k
            -(p.cells_per_action as f64 * (-miss).ln_1p()).exp_m1()
        }
    }
}

/// Probability that all `num_actions` disjoint bins are attainable.
pub fn all_actions_probability(p: &AttainabilityParams, num_actions: u64) -> f64 {
    match p.miss_ln() {
        None => 1.0,
        Some(ln_miss) => {
            let miss = ln_miss.exp();
            if miss >= 1.0 {
                return if num_actions == 0 { 1.0 } else { 0.0 };
            }
            (num_actions as f64 * p.cells_per_action as f64 * (-miss).ln_1p()).exp()
        }
    }
}

fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// `P` as an exact rational.
pub fn attainability_exact(p: &AttainabilityParams) -> BigRational {
    let hit = BigRational::one()
        - BigRational::new(
            binomial(p.n - p.active_bits, p.pool_bits).into(),
            binomial(p.n, p.pool_bits).into(),
        );
    num_traits::pow(hit, p.cells_per_action as usize)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarlo {
    pub estimate: f64,
    pub std_error: f64,
    pub trials: u64,
}

/// Simulates random pools for one action's cells against the fixed enabled
/// set `{0, .., dn - 1}`.
pub fn attainability_monte_carlo(p: &AttainabilityParams, trials: u64, seed: u64) -> Result<MonteCarlo> {
    if trials == 0 {
        return Err(HtmError::InvalidInput("need at least one trial".into()));
    }
    let mut rng = rng::stream(seed);
    let (n, dn, cn) = (p.n as usize, p.active_bits as usize, p.pool_bits as usize);
    let mut hits = 0u64;
    for _ in 0..trials {
        let ok = (0..p.cells_per_action).all(|_| index::sample(&mut rng, n, cn).iter().any(|b| b < dn));
        hits += u64::from(ok);
    }
    let estimate = hits as f64 / trials as f64;
    Ok(MonteCarlo {
        estimate,
        std_error: (estimate * (1.0 - estimate) / trials as f64).sqrt(),
        trials,
    })
}
