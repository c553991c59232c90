//! Sparse distributed representations and the categorical state encoder.

use crate::error::{HtmError, Result};

/// A fixed-width binary vector stored as its sorted enabled bit indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Sdr {
    width: usize,
    enabled: Vec<u32>,
}

impl Sdr {
    /// Builds an SDR from arbitrary indices; they are sorted and must be
    /// distinct and inside `[0, width)`.
    pub fn new(width: usize, mut enabled: Vec<u32>) -> Result<Self> {
        if width == 0 {
            return Err(HtmError::InvalidInput("SDR width must be positive".into()));
        }
        enabled.sort_unstable();
        if enabled.windows(2).any(|w| w[0] == w[1]) {
            return Err(HtmError::InvalidInput("duplicate enabled bit".into()));
        }
        if let Some(&last) = enabled.last() {
            if last as usize >= width {
                return Err(HtmError::InvalidInput(format!(
                    "bit {last} outside width {width}"
                )));
            }
        }
        Ok(Self { width, enabled })
    }

    pub fn empty(width: usize) -> Result<Self> {
        Self::new(width, Vec::new())
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn enabled(&self) -> &[u32] {
        &self.enabled
    }

    pub fn num_enabled(&self) -> usize {
        self.enabled.len()
    }

    /// Fraction of enabled bits.
    pub fn density(&self) -> f64 {
        self.enabled.len() as f64 / self.width as f64
    }

    pub fn contains(&self, bit: u32) -> bool {
        self.enabled.binary_search(&bit).is_ok()
    }

    /// Number of bits enabled in both.
    pub fn overlap(&self, other: &Sdr) -> usize {
        let (mut i, mut j, mut n) = (0, 0, 0);
        while i < self.enabled.len() && j < other.enabled.len() {
            match self.enabled[i].cmp(&other.enabled[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    n += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
        n
    }
}

/// Maps each of `num_categories` states onto its own block of
/// `bits_per_category` contiguous bits. Distinct states never overlap.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CategoryEncoder {
    num_categories: usize,
    bits_per_category: usize,
}

impl CategoryEncoder {
    pub fn new(num_categories: usize, bits_per_category: usize) -> Result<Self> {
        if num_categories == 0 || bits_per_category == 0 {
            return Err(HtmError::InvalidConfig(
                "encoder needs at least one category and one bit per category".into(),
            ));
        }
        if num_categories
            .checked_mul(bits_per_category)
            .is_none_or(|w| w > u32::MAX as usize)
        {
            return Err(HtmError::InvalidConfig("encoder width overflows".into()));
        }
        Ok(Self {
            num_categories,
            bits_per_category,
        })
    }

    pub fn num_categories(&self) -> usize {
        self.num_categories
    }

    pub fn bits_per_category(&self) -> usize {
        self.bits_per_category
    }

    pub fn width(&self) -> usize {
        self.num_categories * self.bits_per_category
    }

    pub fn encode(&self, state: usize) -> Result<Sdr> {
        if state >= self.num_categories {
            return Err(HtmError::InvalidInput(format!(
                "state {state} outside [0, {})",
                self.num_categories
            )));
        }
        let start = (state * self.bits_per_category) as u32;
        let end = start + self.bits_per_category as u32;
        Ok(Sdr {
            width: self.width(),
            enabled: (start..end).collect(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn capacity_encoding() {
        let enc = CategoryEncoder::new(20, 20).unwrap();
        let sdr = enc.encode(0).unwrap();
        assert_eq!(sdr.width(), 400);
        assert_eq!(sdr.enabled(), (0..20).collect::<Vec<u32>>().as_slice());
    }

    #[test]
    fn single_bandit_encodings() {
        let six = CategoryEncoder::new(1, 6).unwrap().encode(0).unwrap();
        assert_eq!(six.width(), 6);
        assert_eq!(six.enabled(), &[0, 1, 2, 3, 4, 5]);

        let one = CategoryEncoder::new(1, 1).unwrap().encode(0).unwrap();
        assert_eq!(one.width(), 1);
        assert_eq!(one.enabled(), &[0]);
    }

    #[test]
    fn out_of_range_state_is_rejected() {
        let enc = CategoryEncoder::new(4, 3).unwrap();
        assert!(matches!(enc.encode(4), Err(HtmError::InvalidInput(_))));
    }

    #[test]
    fn sdr_validation() {
        assert!(Sdr::new(4, vec![1, 1]).is_err());
        assert!(Sdr::new(4, vec![4]).is_err());
        assert!(Sdr::new(0, vec![]).is_err());
        let sdr = Sdr::new(8, vec![5, 1, 3]).unwrap();
        assert_eq!(sdr.enabled(), &[1, 3, 5]);
        assert!(sdr.contains(3));
        assert!(!sdr.contains(2));
    }

    proptest! {
        #[test]
        fn distinct_states_are_disjoint(
            cats in 1usize..40, bits in 1usize..25, a in 0usize..40, b in 0usize..40
        ) {
            let enc = CategoryEncoder::new(cats, bits).unwrap();
            let (a, b) = (a % cats, b % cats);
            let sa = enc.encode(a).unwrap();
            let sb = enc.encode(b).unwrap();
            prop_assert_eq!(sa.num_enabled(), bits);
            prop_assert_eq!(sa.width(), cats * bits);
            if a != b {
                prop_assert_eq!(sa.overlap(&sb), 0);
            } else {
                prop_assert_eq!(sa, sb);
            }
        }
    }
}
