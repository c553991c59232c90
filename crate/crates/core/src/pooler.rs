//! Spatial pooler.
//!
//! Every cell owns a fixed pool of potential synapses drawn once at
//! construction. A synapse carries signal only while its permanence is at or
//! above the connection threshold. On each input the pooler counts connected
//! synapses from enabled bits per cell, multiplies the counts by a homeostatic
//! boost factor and activates the `num_active` best cells.
//!
//! Learning is exposed as a scaled update ([`SpatialPooler::adapt_synapses`])
//! so the classic Hebbian rule and reward-scaled rules share one code path.

use std::io::{self, Write};

use rand::seq::index;
use rand::Rng;

use crate::error::{HtmError, Result};
use crate::rng;
use crate::scalar::Real;
use crate::sdr::Sdr;

#[derive(Debug, Clone, PartialEq)]
pub struct PoolerConfig<T> {
    pub input_width: usize,
    pub num_cells: usize,
    pub num_active: usize,
    /// Fraction of input bits each cell gets a potential synapse to.
    pub potential_fraction: T,
    pub perm_threshold: T,
    pub perm_increment: T,
    pub perm_decrement: T,
    /// Exponent scale of the boost factor; zero disables boosting.
    pub boost_strength: T,
    pub duty_cycle_period: usize,
}

impl<T: Real> PoolerConfig<T> {
    pub const DEFAULT_CELLS: usize = 2048;
    pub const DEFAULT_ACTIVE: usize = 40;
    pub const DEFAULT_DUTY_PERIOD: usize = 1000;

    /// Default configuration for an input of `input_width` bits.
    pub fn new(input_width: usize) -> Self {
        Self {
            input_width,
            num_cells: Self::DEFAULT_CELLS,
            num_active: Self::DEFAULT_ACTIVE,
            potential_fraction: T::lit(0.5),
            perm_threshold: T::lit(0.5),
            perm_increment: T::lit(0.05),
            perm_decrement: T::lit(0.05),
            boost_strength: T::lit(1.0),
            duty_cycle_period: Self::DEFAULT_DUTY_PERIOD,
        }
    }

    pub fn with_cells(mut self, num_cells: usize, num_active: usize) -> Self {
        self.num_cells = num_cells;
        self.num_active = num_active;
        self
    }

    pub fn with_boost_strength(mut self, boost_strength: T) -> Self {
        self.boost_strength = boost_strength;
        self
    }

    /// Potential synapses per cell.
    pub fn pool_size(&self) -> usize {
        (self.potential_fraction * T::from_count(self.input_width))
            .round()
            .to_usize()
            .unwrap_or(0)
    }

    /// Fraction of cells active each step.
    pub fn target_density(&self) -> T {
        T::from_count(self.num_active) / T::from_count(self.num_cells)
    }

    pub fn validate(&self) -> Result<()> {
        let unit = |x: T| x >= T::zero() && x <= T::one();
        let bad = |msg: &str| Err(HtmError::InvalidConfig(msg.to_string()));
        if self.input_width == 0 || self.num_cells == 0 || self.num_active == 0 {
            return bad("input width, cell count and active count must be positive");
        }
        if self.num_active > self.num_cells {
            return bad("num_active exceeds num_cells");
        }
        if self.num_cells > u32::MAX as usize || self.input_width > u32::MAX as usize {
            return bad("dimensions exceed u32 range");
        }
        if !(self.potential_fraction > T::zero() && self.potential_fraction <= T::one()) {
            return bad("potential_fraction must lie in (0, 1]");
        }
        if self.pool_size() == 0 {
            return bad("potential pool is empty");
        }
        if !unit(self.perm_threshold) || !unit(self.perm_increment) || !unit(self.perm_decrement)
        {
            return bad("permanence threshold and deltas must lie in [0, 1]");
        }
        if !self.boost_strength.is_finite() || self.boost_strength < T::zero() {
            return bad("boost_strength must be finite and nonnegative");
        }
        if self.duty_cycle_period == 0 {
            return bad("duty_cycle_period must be positive");
        }
        Ok(())
    }
}

/// Spatial pooler state: synapse pools, permanences and duty cycles.
#[derive(Debug, Clone)]
pub struct SpatialPooler<T> {
    cfg: PoolerConfig<T>,
    // Synapses grouped by cell: cell j owns [cell_offsets[j], cell_offsets[j + 1]).
    cell_offsets: Vec<usize>,
    syn_bit: Vec<u32>,
    syn_cell: Vec<u32>,
    syn_perm: Vec<T>,
    // Reverse index: synapse ids per input bit.
    bit_offsets: Vec<usize>,
    bit_synapses: Vec<u32>,
    duty_cycles: Vec<T>,
    steps: u64,
    cell_mask: Vec<bool>,
}

impl<T: Real> SpatialPooler<T> {
    /// Creates a pooler whose cells each sample `pool_size` distinct input
    /// bits uniformly, with permanences uniform on `[0, 1)`.
    pub fn new(cfg: PoolerConfig<T>, seed: u64) -> Result<Self> {
        cfg.validate()?;
        let mut rng = rng::stream(seed);
        let pool = cfg.pool_size().min(cfg.input_width);
        let pools = (0..cfg.num_cells)
            .map(|_| {
                let mut bits: Vec<u32> = index::sample(&mut rng, cfg.input_width, pool)
                    .into_iter()
                    .map(|b| b as u32)
                    .collect();
                bits.sort_unstable();
                bits.into_iter()
                    .map(|b| (b, T::sample_unit(&mut rng)))
                    .collect()
            })
            .collect();
        Self::build(cfg, pools)
    }

    /// Creates a pooler with explicit `(bit, permanence)` pools per cell.
    pub fn from_synapses(cfg: PoolerConfig<T>, mut pools: Vec<Vec<(u32, T)>>) -> Result<Self> {
        cfg.validate()?;
        for pool in &mut pools {
            pool.sort_by_key(|&(b, _)| b);
        }
        if pools.len() != cfg.num_cells {
            return Err(HtmError::InvalidConfig(format!(
                "{} pools given for {} cells",
                pools.len(),
                cfg.num_cells
            )));
        }
        for pool in &pools {
            let mut bits: Vec<u32> = pool.iter().map(|&(b, _)| b).collect();
            bits.sort_unstable();
            if bits.windows(2).any(|w| w[0] == w[1]) {
                return Err(HtmError::InvalidConfig("duplicate synapse in pool".into()));
            }
            if bits.last().is_some_and(|&b| b as usize >= cfg.input_width) {
                return Err(HtmError::InvalidConfig("synapse bit outside input".into()));
            }
            if pool.iter().any(|&(_, p)| !(p >= T::zero() && p <= T::one())) {
                return Err(HtmError::InvalidConfig("permanence outside [0, 1]".into()));
            }
        }
        Self::build(cfg, pools)
    }

    fn build(cfg: PoolerConfig<T>, pools: Vec<Vec<(u32, T)>>) -> Result<Self> {
        let total: usize = pools.iter().map(Vec::len).sum();
        let mut cell_offsets = Vec::with_capacity(cfg.num_cells + 1);
        let mut syn_bit = Vec::with_capacity(total);
        let mut syn_cell = Vec::with_capacity(total);
        let mut syn_perm = Vec::with_capacity(total);
        cell_offsets.push(0);
        for (cell, pool) in pools.into_iter().enumerate() {
            for (bit, perm) in pool {
                syn_bit.push(bit);
                syn_cell.push(cell as u32);
                syn_perm.push(perm);
            }
            cell_offsets.push(syn_bit.len());
        }

        let mut bit_counts = vec![0usize; cfg.input_width + 1];
        for &b in &syn_bit {
            bit_counts[b as usize + 1] += 1;
        }
        for i in 1..bit_counts.len() {
            bit_counts[i] += bit_counts[i - 1];
        }
        let bit_offsets = bit_counts.clone();
        let mut cursor = bit_counts;
        let mut bit_synapses = vec![0u32; total];
        for (syn, &b) in syn_bit.iter().enumerate() {
            bit_synapses[cursor[b as usize]] = syn as u32;
            cursor[b as usize] += 1;
        }

        Ok(Self {
            duty_cycles: vec![T::zero(); cfg.num_cells],
            cell_mask: vec![false; cfg.num_cells],
            cfg,
            cell_offsets,
            syn_bit,
            syn_cell,
            syn_perm,
            bit_offsets,
            bit_synapses,
            steps: 0,
        })
    }

    pub fn config(&self) -> &PoolerConfig<T> {
        &self.cfg
    }

    pub fn num_cells(&self) -> usize {
        self.cfg.num_cells
    }

    pub fn num_synapses(&self) -> usize {
        self.syn_bit.len()
    }

    /// `(bit, permanence)` pairs of one cell, ordered by bit.
    pub fn synapses(&self, cell: usize) -> impl Iterator<Item = (u32, T)> + '_ {
        let range = self.cell_offsets[cell]..self.cell_offsets[cell + 1];
        self.syn_bit[range.clone()]
            .iter()
            .copied()
            .zip(self.syn_perm[range].iter().copied())
    }

    pub fn permanence(&self, cell: usize, bit: u32) -> Option<T> {
        self.synapses(cell).find(|&(b, _)| b == bit).map(|(_, p)| p)
    }

    /// Flat permanence table, synapses ordered by cell then bit.
    pub fn permanences(&self) -> &[T] {
        &self.syn_perm
    }

    /// All `(cell, bit)` pairs in the same order as [`Self::permanences`].
    pub fn topology(&self) -> Vec<(u32, u32)> {
        self.syn_cell
            .iter()
            .copied()
            .zip(self.syn_bit.iter().copied())
            .collect()
    }

    pub fn is_connected(&self, perm: T) -> bool {
        perm >= self.cfg.perm_threshold
    }

    pub fn duty_cycles(&self) -> &[T] {
        &self.duty_cycles
    }

    pub fn set_duty_cycles(&mut self, duty: &[T]) -> Result<()> {
        if duty.len() != self.cfg.num_cells {
            return Err(HtmError::InvalidInput("duty cycle length mismatch".into()));
        }
        if duty.iter().any(|&d| !(d >= T::zero() && d <= T::one())) {
            return Err(HtmError::InvalidInput("duty cycle outside [0, 1]".into()));
        }
        self.duty_cycles.copy_from_slice(duty);
        Ok(())
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    fn check_width(&self, input: &Sdr) -> Result<()> {
        if input.width() != self.cfg.input_width {
            return Err(HtmError::InvalidInput(format!(
                "input width {} does not match pooler width {}",
                input.width(),
                self.cfg.input_width
            )));
        }
        Ok(())
    }

    fn input_synapses<'a>(&'a self, input: &'a Sdr) -> impl Iterator<Item = usize> + 'a {
        input.enabled().iter().flat_map(move |&bit| {
            let b = bit as usize;
            self.bit_synapses[self.bit_offsets[b]..self.bit_offsets[b + 1]]
                .iter()
                .map(|&s| s as usize)
        })
    }

    /// Connected synapses from enabled bits, per cell.
    pub fn compute_overlaps(&self, input: &Sdr) -> Result<Vec<u32>> {
        self.check_width(input)?;
        let mut counts = vec![0u32; self.cfg.num_cells];
        for syn in self.input_synapses(input) {
            if self.syn_perm[syn] >= self.cfg.perm_threshold {
                counts[self.syn_cell[syn] as usize] += 1;
            }
        }
        Ok(counts)
    }

    /// `count * exp(boost_strength * (target_density - duty_cycle))` per cell.
    pub fn apply_boosting(&self, counts: &[u32]) -> Vec<T> {
        let strength = self.cfg.boost_strength;
        if strength == T::zero() {
            return counts.iter().map(|&c| T::from_count(c as usize)).collect();
        }
        let target = self.cfg.target_density();
        counts
            .iter()
            .zip(&self.duty_cycles)
            .map(|(&c, &duty)| T::from_count(c as usize) * (strength * (target - duty)).exp())
            .collect()
    }

    /// Moving-average update of every cell's activation frequency.
    pub fn update_duty_cycles(&mut self, active: &[usize]) {
        self.steps += 1;
        let period = (self.cfg.duty_cycle_period as u64).min(self.steps);
        let period = T::from_count(period as usize);
        let keep = (period - T::one()) / period;
        let hit = T::one() / period;
        for d in &mut self.duty_cycles {
            *d = *d * keep;
        }
        for &cell in active {
            self.duty_cycles[cell] = (self.duty_cycles[cell] + hit).min(T::one());
        }
    }

    /// Adds `scale * perm_increment` to every synapse from an enabled bit to
    /// one of `cells`, clamping to `[0, 1]`. Everything else is untouched.
    pub fn adapt_synapses(&mut self, input: &Sdr, cells: &[usize], scale: T) -> Result<()> {
        let delta = scale * self.cfg.perm_increment;
        self.shift_permanences(input, cells, delta, true)
    }

    /// Subtracts `perm_decrement` from synapses from enabled bits to cells
    /// *not* in `active`; the weakening half of classic Hebbian learning.
    pub fn weaken_inactive(&mut self, input: &Sdr, active: &[usize]) -> Result<()> {
        let delta = -self.cfg.perm_decrement;
        self.shift_permanences(input, active, delta, false)
    }

    fn shift_permanences(&mut self, input: &Sdr, cells: &[usize], delta: T, inside: bool) -> Result<()> {
        self.check_width(input)?;
        if let Some(&c) = cells.iter().find(|&&c| c >= self.cfg.num_cells) {
            return Err(HtmError::InvalidInput(format!("cell {c} out of range")));
        }
        if delta == T::zero() {
            return Ok(());
        }
        let mut mask = std::mem::take(&mut self.cell_mask);
        for &c in cells {
            mask[c] = true;
        }
        for b in input.enabled() {
            let b = *b as usize;
            for &syn in &self.bit_synapses[self.bit_offsets[b]..self.bit_offsets[b + 1]] {
                let syn = syn as usize;
                if mask[self.syn_cell[syn] as usize] == inside {
                    let p = &mut self.syn_perm[syn];
                    *p = (*p + delta).max(T::zero()).min(T::one());
                }
            }
        }
        for &c in cells {
            mask[c] = false;
        }
        self.cell_mask = mask;
        Ok(())
    }

    /// Overlaps, boosting, top-k selection and duty-cycle update; no learning.
    pub fn compute<R: Rng + ?Sized>(&mut self, input: &Sdr, rng: &mut R) -> Result<Vec<usize>> {
        let counts = self.compute_overlaps(input)?;
        let scores = self.apply_boosting(&counts);
        let active = select_active(&scores, self.cfg.num_active, rng);
        self.update_duty_cycles(&active);
        Ok(active)
    }

    /// Like [`Self::compute`] but leaves the duty cycles untouched.
    pub fn infer<R: Rng + ?Sized>(&self, input: &Sdr, rng: &mut R) -> Result<Vec<usize>> {
        let counts = self.compute_overlaps(input)?;
        let scores = self.apply_boosting(&counts);
        Ok(select_active(&scores, self.cfg.num_active, rng))
    }

    /// One step of the unsupervised pooler: strengthen synapses to active
    /// cells and weaken those to inactive cells.
    pub fn step_hebbian<R: Rng + ?Sized>(&mut self, input: &Sdr, rng: &mut R) -> Result<Vec<usize>> {
        let active = self.compute(input, rng)?;
        self.adapt_synapses(input, &active, T::one())?;
        self.weaken_inactive(input, &active)?;
        Ok(active)
    }

    /// Writes `cell,bit,permanence` rows, one per synapse.
    pub fn write_permanences<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "cell,bit,permanence")?;
        for ((c, b), p) in self.syn_cell.iter().zip(&self.syn_bit).zip(&self.syn_perm) {
            writeln!(out, "{c},{b},{p}")?;
        }
        Ok(())
    }

    /// Writes `cell,duty_cycle` rows.
    pub fn write_duty_cycles<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "cell,duty_cycle")?;
        for (c, d) in self.duty_cycles.iter().enumerate() {
            writeln!(out, "{c},{d}")?;
        }
        Ok(())
    }
}

/// Indices (ascending) of the `k` highest scores. Cells tied with the k-th
/// score compete for the remaining slots uniformly at random.
pub fn select_active<T: Real, R: Rng + ?Sized>(scores: &[T], k: usize, rng: &mut R) -> Vec<usize> {
    let n = scores.len();
    if k >= n {
        return (0..n).collect();
    }
    if k == 0 {
        return Vec::new();
    }
    let desc = |a: &T, b: &T| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal);
    let mut sorted = scores.to_vec();
    let (_, kth, _) = sorted.select_nth_unstable_by(k - 1, desc);
    let kth = *kth;

    let mut chosen = Vec::with_capacity(k);
    let mut tied = Vec::new();
    for (i, &s) in scores.iter().enumerate() {
        if s > kth {
            chosen.push(i);
        } else if s == kth {
            tied.push(i);
        }
    }
    let need = k - chosen.len();
    if need == tied.len() {
        chosen.extend(tied);
    } else {
        chosen.extend(index::sample(rng, tied.len(), need).into_iter().map(|i| tied[i]));
    }
    chosen.sort_unstable();
    chosen
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::HashMap;

    fn cfg(input_width: usize, cells: usize, active: usize) -> PoolerConfig<f64> {
        PoolerConfig::new(input_width).with_cells(cells, active)
    }

    fn three_cell_fixture() -> SpatialPooler<f64> {
        // cell 0 connected to {1, 2}, cell 1 to {2}, cell 2 only disconnected.
        let pools = vec![
            vec![(0, 0.9), (1, 0.6), (2, 0.5)],
            vec![(1, 0.2), (2, 0.7), (3, 0.9)],
            vec![(1, 0.1), (2, 0.49)],
        ];
        SpatialPooler::from_synapses(cfg(4, 3, 1), pools).unwrap()
    }

    #[test]
    fn init_pool_sizes() {
        let sp = SpatialPooler::new(cfg(400, 64, 8), 1).unwrap();
        for c in 0..64 {
            let bits: Vec<u32> = sp.synapses(c).map(|(b, _)| b).collect();
            assert_eq!(bits.len(), 200);
            assert!(bits.windows(2).all(|w| w[0] < w[1]));
            assert!(sp.synapses(c).all(|(_, p)| (0.0..1.0).contains(&p)));
        }
        assert!(sp.duty_cycles().iter().all(|&d| d == 0.0));
    }

    #[test]
    fn tiny_init_connects_every_cell_to_bit_zero() {
        let mut c = cfg(1, 20, 2);
        c.potential_fraction = 1.0;
        let sp = SpatialPooler::new(c, 3).unwrap();
        for cell in 0..20 {
            let syn: Vec<_> = sp.synapses(cell).collect();
            assert_eq!(syn.len(), 1);
            assert_eq!(syn[0].0, 0);
        }
    }

    #[test]
    fn same_seed_same_table() {
        let a = SpatialPooler::new(cfg(50, 32, 4), 9).unwrap();
        let b = SpatialPooler::new(cfg(50, 32, 4), 9).unwrap();
        let c = SpatialPooler::new(cfg(50, 32, 4), 10).unwrap();
        assert_eq!(a.topology(), b.topology());
        assert_eq!(a.permanences(), b.permanences());
        assert_ne!(a.permanences(), c.permanences());
    }

    #[test]
    fn config_validation() {
        let mut c = cfg(10, 4, 5);
        assert!(SpatialPooler::new(c.clone(), 0).is_err());
        c.num_active = 2;
        c.perm_increment = 1.5;
        assert!(SpatialPooler::new(c.clone(), 0).is_err());
        c.perm_increment = 0.05;
        c.potential_fraction = 0.01;
        assert!(SpatialPooler::new(c, 0).is_err());
    }

    #[test]
    fn overlaps_fixture() {
        let sp = three_cell_fixture();
        let input = Sdr::new(4, vec![1, 2]).unwrap();
        assert_eq!(sp.compute_overlaps(&input).unwrap(), vec![2, 1, 0]);
        let empty = Sdr::empty(4).unwrap();
        assert_eq!(sp.compute_overlaps(&empty).unwrap(), vec![0, 0, 0]);
    }

    #[test]
    fn overlaps_reject_width_mismatch() {
        let sp = three_cell_fixture();
        let input = Sdr::new(5, vec![1]).unwrap();
        assert!(matches!(sp.compute_overlaps(&input), Err(HtmError::InvalidInput(_))));
    }

    #[test]
    fn disconnected_pool_sees_nothing() {
        let mut c = cfg(8, 16, 2);
        c.perm_threshold = 1.0;
        // Permanences are drawn from [0, 1), so nothing reaches threshold 1.
        let sp = SpatialPooler::new(c, 4).unwrap();
        let input = Sdr::new(8, (0..8).collect()).unwrap();
        assert!(sp.compute_overlaps(&input).unwrap().iter().all(|&x| x == 0));
    }

    #[test]
    fn boosting_off_returns_counts() {
        let sp = SpatialPooler::new(cfg(4, 2, 1).with_boost_strength(0.0), 0).unwrap();
        assert_eq!(sp.apply_boosting(&[5, 3]), vec![5.0, 3.0]);
    }

    #[test]
    fn boosting_at_target_density_is_identity() {
        let mut sp = SpatialPooler::new(cfg(4, 4, 1).with_boost_strength(3.0), 0).unwrap();
        sp.set_duty_cycles(&[0.25; 4]).unwrap();
        assert_eq!(sp.apply_boosting(&[1, 2, 3, 4]), vec![1.0, 2.0, 3.0, 4.0]);
    }

    #[test]
    fn boosting_favors_rarely_active_cells() {
        let mut sp = SpatialPooler::new(cfg(4, 4, 1).with_boost_strength(2.0), 0).unwrap();
        let target = 0.25;
        sp.set_duty_cycles(&[0.0, 2.0 * target, 0.0, 0.0]).unwrap();
        let s = sp.apply_boosting(&[3, 3, 0, 0]);
        assert!(s[0] > s[1]);
    }

    #[test]
    fn select_distinct_scores() {
        let mut rng = rng::stream(0);
        assert_eq!(select_active(&[5.0, 4.0, 3.0, 1.0], 2, &mut rng), vec![0, 1]);
    }

    #[test]
    fn select_boundary_tie_is_uniform() {
        let mut rng = rng::stream(11);
        let mut hits = [0usize; 4];
        let trials = 20_000;
        for _ in 0..trials {
            let a = select_active(&[5.0, 3.0, 3.0, 1.0], 2, &mut rng);
            assert_eq!(a.len(), 2);
            assert_eq!(a[0], 0);
            hits[a[1]] += 1;
        }
        assert_eq!(hits[0] + hits[3], 0);
        let f = hits[1] as f64 / trials as f64;
        // 5 standard errors of a fair coin.
        assert!((f - 0.5).abs() < 5.0 * (0.25 / trials as f64).sqrt(), "{f}");
    }

    #[test]
    fn select_all_zero_is_uniform_subset() {
        // Chi-square over the 6 two-element subsets of 4 cells.
        let mut rng = rng::stream(5);
        let mut counts: HashMap<Vec<usize>, usize> = HashMap::new();
        let trials = 60_000;
        for _ in 0..trials {
            *counts.entry(select_active(&[0.0; 4], 2, &mut rng)).or_default() += 1;
        }
        assert_eq!(counts.len(), 6);
        let expected = trials as f64 / 6.0;
        let chi2: f64 = counts
            .values()
            .map(|&o| (o as f64 - expected).powi(2) / expected)
            .sum();
        // 5 degrees of freedom; 20.52 is the 0.999 quantile.
        assert!(chi2 < 20.52, "chi2 = {chi2}");
    }

    #[test]
    fn duty_cycle_recurrence() {
        let mut c = cfg(4, 2, 1);
        c.duty_cycle_period = 2;
        let mut sp = SpatialPooler::new(c, 0).unwrap();
        // Warm-up step: T = 1, cell 1 inactive.
        sp.update_duty_cycles(&[]);
        assert_eq!(sp.duty_cycles(), &[0.0, 0.0]);
        // T = 2, duty 0, active once.
        sp.update_duty_cycles(&[0]);
        assert_eq!(sp.duty_cycles()[0], 0.5);
    }

    #[test]
    fn duty_cycle_limits() {
        let mut c = cfg(4, 2, 1);
        c.duty_cycle_period = 50;
        let mut sp = SpatialPooler::new(c, 0).unwrap();
        let mut last = 0.0;
        for _ in 0..500 {
            sp.update_duty_cycles(&[0]);
            let d = sp.duty_cycles()[0];
            assert!(d >= last && d <= 1.0);
            last = d;
            assert_eq!(sp.duty_cycles()[1], 0.0);
        }
        assert!((last - 1.0).abs() < 1e-12);
    }

    #[test]
    fn adapt_arithmetic_and_clamping() {
        let pools = vec![vec![(0, 0.40)], vec![(0, 0.03)]];
        let mut sp = SpatialPooler::from_synapses(cfg(1, 2, 1), pools).unwrap();
        let input = Sdr::new(1, vec![0]).unwrap();
        let before = sp.permanences().to_vec();
        sp.adapt_synapses(&input, &[0, 1], 0.0).unwrap();
        assert_eq!(sp.permanences(), before.as_slice());

        sp.adapt_synapses(&input, &[0], 1.0).unwrap();
        assert!((sp.permanence(0, 0).unwrap() - 0.45).abs() < 1e-12);
        assert_eq!(sp.permanence(1, 0).unwrap(), 0.03);

        sp.adapt_synapses(&input, &[1], -1.0).unwrap();
        assert_eq!(sp.permanence(1, 0).unwrap(), 0.0);
    }

    #[test]
    fn adapt_ignores_disabled_bits() {
        let mut sp = three_cell_fixture();
        let before = sp.permanences().to_vec();
        let input = Sdr::new(4, vec![0]).unwrap();
        sp.adapt_synapses(&input, &[1, 2], 1.0).unwrap();
        assert_eq!(sp.permanences(), before.as_slice());
    }

    #[test]
    fn hebbian_step_weakens_inactive() {
        let pools = vec![vec![(0, 0.9)], vec![(0, 0.6)]];
        let mut sp =
            SpatialPooler::from_synapses(cfg(1, 2, 1).with_boost_strength(0.0), pools).unwrap();
        let input = Sdr::new(1, vec![0]).unwrap();
        let mut rng = rng::stream(0);
        let active = sp.step_hebbian(&input, &mut rng).unwrap();
        assert_eq!(active.len(), 1);
        let (win, lose) = (active[0], 1 - active[0]);
        let start = [0.9, 0.6];
        assert!((sp.permanence(win, 0).unwrap() - (start[win] + 0.05f64).min(1.0)).abs() < 1e-12);
        assert!((sp.permanence(lose, 0).unwrap() - (start[lose] - 0.05)).abs() < 1e-12);
    }

    #[test]
    fn state_dump_layout() {
        let sp = three_cell_fixture();
        let mut buf = Vec::new();
        sp.write_permanences(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "cell,bit,permanence");
        assert_eq!(lines[1], "0,0,0.9");
        assert_eq!(lines.len(), 1 + sp.num_synapses());
        let mut buf = Vec::new();
        sp.write_duty_cycles(&mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("cell,duty_cycle\n0,0\n"));
    }

    #[test]
    fn single_precision_pooler() {
        let mut sp = SpatialPooler::<f32>::new(PoolerConfig::new(12).with_cells(64, 4), 2).unwrap();
        let input = Sdr::new(12, vec![0, 1, 2]).unwrap();
        let mut rng = rng::stream(1);
        let active = sp.compute(&input, &mut rng).unwrap();
        assert_eq!(active.len(), 4);
        sp.adapt_synapses(&input, &active, 1.0).unwrap();
    }

    proptest! {
        #[test]
        fn exactly_k_active(scores in prop::collection::vec(0u8..4, 1..64), k in 0usize..70, seed: u64) {
            let scores: Vec<f64> = scores.into_iter().map(f64::from).collect();
            let mut rng = rng::stream(seed);
            let active = select_active(&scores, k, &mut rng);
            prop_assert_eq!(active.len(), k.min(scores.len()));
            prop_assert!(active.windows(2).all(|w| w[0] < w[1]));
            // Every chosen score dominates every unchosen score.
            let min_in = active.iter().map(|&i| scores[i]).fold(f64::INFINITY, f64::min);
            let max_out = (0..scores.len())
                .filter(|i| !active.contains(i))
                .map(|i| scores[i])
                .fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(active.is_empty() || min_in >= max_out);
        }

        #[test]
        fn permanences_stay_in_unit_interval_and_topology_is_fixed(
            seed: u64,
            steps in prop::collection::vec((prop::collection::vec(0u32..16, 0..6), prop::collection::vec(0usize..24, 0..8), -30.0f64..30.0), 1..20)
        ) {
            let mut sp = SpatialPooler::new(cfg(16, 24, 3), seed).unwrap();
            let topology = sp.topology();
            for (bits, cells, scale) in steps {
                let mut bits = bits;
                bits.sort_unstable();
                bits.dedup();
                let input = Sdr::new(16, bits).unwrap();
                sp.adapt_synapses(&input, &cells, scale).unwrap();
                prop_assert!(sp.permanences().iter().all(|&p| (0.0..=1.0).contains(&p)));
            }
            prop_assert_eq!(sp.topology(), topology);
        }

        #[test]
        fn overlaps_follow_connectivity_not_permanence(seed: u64, scale in -0.2f64..0.2) {
            // Shift permanences by less than their distance to the threshold.
            let mut sp = SpatialPooler::new(cfg(10, 16, 2), seed).unwrap();
            let input = Sdr::new(10, vec![0, 3, 7]).unwrap();
            let before = sp.compute_overlaps(&input).unwrap();
            let delta = scale * sp.config().perm_increment;
            let crosses = sp.permanences().iter().any(|&p| {
                let q = (p + delta).clamp(0.0, 1.0);
                (p >= 0.5) != (q >= 0.5)
            });
            let cells: Vec<usize> = (0..16).collect();
            sp.adapt_synapses(&input, &cells, scale).unwrap();
            if !crosses {
                prop_assert_eq!(sp.compute_overlaps(&input).unwrap(), before);
            }
        }

        #[test]
        fn unboosted_selection_is_argmax_k(seed: u64) {
            let mut sp = SpatialPooler::new(cfg(30, 40, 5).with_boost_strength(0.0), seed).unwrap();
            let input = Sdr::new(30, (0..30).step_by(3).collect()).unwrap();
            let counts = sp.compute_overlaps(&input).unwrap();
            let mut rng = rng::stream(seed);
            let active = sp.compute(&input, &mut rng).unwrap();
            let mut sorted = counts.clone();
            sorted.sort_unstable_by(|a, b| b.cmp(a));
            let kth = sorted[4];
            for (i, &c) in counts.iter().enumerate() {
                if c > kth { prop_assert!(active.contains(&i)); }
                if c < kth { prop_assert!(!active.contains(&i)); }
            }
        }

        #[test]
        fn determinism(seed: u64) {
            let run = || {
                let mut sp = SpatialPooler::new(cfg(20, 50, 5), seed).unwrap();
                let mut rng = rng::stream(seed ^ 1);
                let mut out = Vec::new();
                for t in 0..30u32 {
                    let input = Sdr::new(20, vec![t % 20, (t * 7) % 20]).unwrap_or_else(|_| Sdr::new(20, vec![t % 20]).unwrap());
                    let active = sp.compute(&input, &mut rng).unwrap();
                    let scale = if t % 3 == 0 { -1.0 } else { 1.0 };
                    sp.adapt_synapses(&input, &active, scale).unwrap();
                    out.push(active);
                }
                out
            };
            prop_assert_eq!(run(), run());
        }
    }
}
