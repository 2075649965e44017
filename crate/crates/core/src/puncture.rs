//! Puncturing patterns and the rate policy that sizes them from an estimated BER.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Binary entropy `h(e)` in bits.
pub fn binary_entropy(e: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&e) {
        return Err(Error::ProbabilityOutOfRange(e));
    }
    if e == 0.0 || e == 1.0 {
        return Ok(0.0);
    }
    Ok(-e * e.log2() - (1.0 - e) * (1.0 - e).log2())
}

/// Maps an estimated crossover probability to a total parity fraction
/// `clamp(beta * h(e), min_rate, max_rate)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RatePolicy {
    pub beta: f64,
    pub min_rate: f64,
    pub max_rate: f64,
}

impl Default for RatePolicy {
    fn default() -> Self {
        Self {
            beta: 1.344,
            min_rate: 0.02,
            max_rate: 1.0,
        }
    }
}

impl RatePolicy {
    pub fn validate(&self) -> Result<()> {
        if !(self.beta >= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "beta {} must be at least 1",
                self.beta
            )));
        }
        if !(self.min_rate > 0.0 && self.min_rate <= self.max_rate && self.max_rate <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "rate bounds [{}, {}] must satisfy 0 < min <= max <= 1",
                self.min_rate, self.max_rate
            )));
        }
        Ok(())
    }
}

/// Total transmitted parity bits per source bit, summed over both encoders.
///
/// `e == 0` is accepted and lands on the `min_rate` floor.
pub fn rate_for_ber(e: f64, policy: &RatePolicy) -> Result<f64> {
    if !(0.0..0.5).contains(&e) {
        return Err(Error::ProbabilityOutOfRange(e));
    }
    policy.validate()?;
    let raw = policy.beta * binary_entropy(e)?;
    Ok(raw.clamp(policy.min_rate, policy.max_rate))
}

/// Which parity bits of one constituent encoder are transmitted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PuncturePattern {
    mask: Vec<bool>,
    transmitted_count: usize,
    offset: usize,
}

impl PuncturePattern {
    /// Spreads `count` transmitted positions over `n` slots as evenly as
    /// possible: slot `j` is transmitted when `floor((c+1)t/n) > floor(ct/n)`
    /// with `c = (j + offset) mod n`.
    pub fn spread(n: usize, count: usize, offset: usize) -> Self {
        let count = count.min(n);
        let mask = (0..n)
            .map(|j| {
                let c = ((j + offset) % n) as u128;
                let (t, n) = (count as u128, n as u128);
                ((c + 1) * t) / n > (c * t) / n
            })
            .collect();
        Self {
            mask,
            transmitted_count: count,
            offset: if n == 0 { 0 } else { offset % n },
        }
    }

    pub fn all_transmitted(n: usize) -> Self {
        Self::spread(n, n, 0)
    }

    pub fn from_mask(mask: Vec<bool>) -> Self {
        let transmitted_count = mask.iter().filter(|&&m| m).count();
        Self {
            mask,
            transmitted_count,
            offset: 0,
        }
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn len(&self) -> usize {
        self.mask.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mask.is_empty()
    }

    pub fn transmitted_count(&self) -> usize {
        self.transmitted_count
    }

    pub fn offset(&self) -> usize {
        self.offset
    }

    #[inline]
    pub fn is_transmitted(&self, i: usize) -> bool {
        self.mask[i]
    }

    /// Keeps the transmitted entries of a full-length parity stream.
    pub fn select<T: Copy>(&self, full: &[T]) -> Result<Vec<T>> {
        if full.len() != self.mask.len() {
            return Err(Error::LengthMismatch {
                expected: self.mask.len(),
                actual: full.len(),
            });
        }
        Ok(full
            .iter()
            .zip(&self.mask)
            .filter(|(_, &m)| m)
            .map(|(&v, _)| v)
            .collect())
    }
}

/// Evenly spread pattern transmitting `round(r_enc * n)` parity bits.
pub fn build_pattern(n: usize, r_enc: f64, offset: usize) -> Result<PuncturePattern> {
    if !(0.0..=1.0).contains(&r_enc) {
        return Err(Error::ProbabilityOutOfRange(r_enc));
    }
    Ok(PuncturePattern::spread(
        n,
        (r_enc * n as f64).round() as usize,
        offset,
    ))
}
