//! Sliced quantization of Gaussian samples and Bob's sequential slice estimation.
//!
//! A sample falling in cell `c` (0-indexed, `2^m` cells) contributes bit
//! `(c >> (i - 1)) & 1` to slice `i`; slice 1 is the least significant bit.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};
use statrs::function::erf::erfc;

use crate::{Bit, Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SliceConfig {
    pub m: usize,
    /// `2^m - 1` strictly increasing cell boundaries.
    pub boundaries: Vec<f64>,
    /// Standard deviation of Bob's additive noise relative to the unit-variance signal.
    pub noise_sigma: f64,
}

impl SliceConfig {
    /// Equiprobable cells of the standard normal.
    pub fn equiprobable(m: usize, noise_sigma: f64) -> Result<Self> {
        if m == 0 || m > 16 {
            return Err(Error::InvalidConfig(format!(
                "slice count {m} outside 1..=16"
            )));
        }
        let cells = 1usize << m;
        let normal = Normal::new(0.0, 1.0).expect("standard normal");
        let boundaries = (1..cells)
            .map(|k| normal.inverse_cdf(k as f64 / cells as f64))
            .collect();
        let config = Self {
            m,
            boundaries,
            noise_sigma,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn cells(&self) -> usize {
        1 << self.m
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.m > 16 {
            return Err(Error::InvalidConfig(format!(
                "slice count {} outside 1..=16",
                self.m
            )));
        }
        if self.boundaries.len() != self.cells() - 1 {
            return Err(Error::InvalidConfig(format!(
                "{} slices need {} boundaries, got {}",
                self.m,
                self.cells() - 1,
                self.boundaries.len()
            )));
        }
        if self.boundaries.iter().any(|b| !b.is_finite())
            || self.boundaries.windows(2).any(|w| w[0] >= w[1])
        {
            return Err(Error::InvalidConfig(
                "boundaries must be finite and strictly increasing".into(),
            ));
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "noise sigma {} must be non-negative",
                self.noise_sigma
            )));
        }
        Ok(())
    }

    /// Cell index of a sample: the number of boundaries at or below it.
    pub fn cell_of(&self, x: f64) -> usize {
        self.boundaries.partition_point(|&b| b <= x)
    }

    /// Lower and upper edge of a cell, infinite at the ends.
    pub fn cell_edges(&self, cell: usize) -> (f64, f64) {
        let lo = if cell == 0 {
            f64::NEG_INFINITY
        } else {
            self.boundaries[cell - 1]
        };
        let hi = self.boundaries.get(cell).copied().unwrap_or(f64::INFINITY);
        (lo, hi)
    }
}

/// Returns the cell labels and the `m` slices (slice 1 first).
pub fn quantize(x: &[f64], config: &SliceConfig) -> (Vec<u32>, Vec<Vec<Bit>>) {
    let labels: Vec<u32> = x.iter().map(|&v| config.cell_of(v) as u32).collect();
    let slices = (0..config.m)
        .map(|i| labels.iter().map(|&c| ((c >> i) & 1) as Bit).collect())
        .collect();
    (labels, slices)
}

/// Reassembles cell labels from slices.
pub fn labels_from_slices(slices: &[Vec<Bit>]) -> Vec<u32> {
    let l = slices.first().map_or(0, Vec::len);
    (0..l)
        .map(|j| {
            slices
                .iter()
                .enumerate()
                .fold(0u32, |acc, (i, s)| acc | ((s[j] as u32) << i))
        })
        .collect()
}

/// Upper-tail standard normal probability.
fn q(z: f64) -> f64 {
    0.5 * erfc(z / std::f64::consts::SQRT_2)
}

/// `P(a <= X < b)` for `X ~ N(mu, s^2)`, evaluated in the tail that avoids cancellation.
fn interval_probability(a: f64, b: f64, mu: f64, s: f64) -> f64 {
    let za = (a - mu) / s;
    let zb = (b - mu) / s;
    if za >= 0.0 {
        q(za) - q(zb)
    } else if zb <= 0.0 {
        q(-zb) - q(-za)
    } else {
        1.0 - q(-za) - q(zb)
    }
}

/// Posterior probability that the slice-`i` bit is 1 for one observation,
/// given the known lower bits, as `(p0, p1)` unnormalized.
fn slice_bit_masses(y: f64, i: usize, lower: u32, config: &SliceConfig) -> (f64, f64) {
    let s2 = config.noise_sigma * config.noise_sigma;
    let mu = y / (1.0 + s2);
    let s = config.noise_sigma / (1.0 + s2).sqrt();
    let step = 1usize << (i - 1);
    let mut mass = [0.0f64; 2];
    if s == 0.0 {
        let c = config.cell_of(mu);
        if c & (step - 1) == lower as usize {
            mass[(c >> (i - 1)) & 1] = 1.0;
        }
        return (mass[0], mass[1]);
    }
    for c in (lower as usize..config.cells()).step_by(step) {
        let (lo, hi) = config.cell_edges(c);
        mass[(c >> (i - 1)) & 1] += interval_probability(lo, hi, mu, s);
    }
    (mass[0], mass[1])
}

fn lower_labels(corrected_lower: &[Vec<Bit>], l: usize) -> Result<Vec<u32>> {
    for s in corrected_lower {
        if s.len() != l {
            return Err(Error::LengthMismatch {
                expected: l,
                actual: s.len(),
            });
        }
    }
    Ok(if corrected_lower.is_empty() {
        vec![0; l]
    } else {
        labels_from_slices(corrected_lower)
    })
}

/// Bob's MAP estimate of slice `i` (1-based) given `y` and the corrected slices `1..i`.
pub fn estimate_slice(
    y: &[f64],
    i: usize,
    corrected_lower: &[Vec<Bit>],
    config: &SliceConfig,
) -> Result<Vec<Bit>> {
    if i == 0 || i > config.m || corrected_lower.len() != i - 1 {
        return Err(Error::InvalidData(format!(
            "slice {i} needs {} corrected lower slices, got {}",
            i.saturating_sub(1),
            corrected_lower.len()
        )));
    }
    let lower = lower_labels(corrected_lower, y.len())?;
    Ok(y.iter()
        .zip(&lower)
        .map(|(&v, &lo)| {
            let (p0, p1) = slice_bit_masses(v, i, lo, config);
            (p1 > p0) as Bit
        })
        .collect())
}

/// Soft version of [`estimate_slice`]: per-bit LLRs `ln P(0) / P(1)`, clipped to `l_max`.
pub fn slice_llrs(
    y: &[f64],
    i: usize,
    corrected_lower: &[Vec<Bit>],
    config: &SliceConfig,
    l_max: f64,
) -> Result<Vec<f64>> {
    if i == 0 || i > config.m || corrected_lower.len() != i - 1 {
        return Err(Error::InvalidData(format!(
            "slice {i} needs {} corrected lower slices",
            i.saturating_sub(1)
        )));
    }
    let lower = lower_labels(corrected_lower, y.len())?;
    Ok(y.iter()
        .zip(&lower)
        .map(|(&v, &lo)| {
            let (p0, p1) = slice_bit_masses(v, i, lo, config);
            (p0.ln() - p1.ln()).clamp(-l_max, l_max)
        })
        .collect())
}

/// Plug-in entropy of the label distribution, times the number of labels, in bits.
pub fn empirical_entropy(labels: &[u32], m: usize) -> f64 {
    let mut counts = vec![0usize; 1 << m];
    for &c in labels {
        counts[c as usize] += 1;
    }
    let l = labels.len() as f64;
    let h: f64 = counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / l;
            -p * p.log2()
        })
        .sum();
    l * h
}

pub fn hamming(a: &[Bit], b: &[Bit]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}

/// Alice's slices, Bob's estimates (each conditioned on Alice's true lower
/// slices) and the resulting error rates.
#[derive(Debug, Clone, PartialEq)]
pub struct SliceSet {
    pub labels: Vec<u32>,
    pub slices: Vec<Vec<Bit>>,
    pub estimates: Vec<Vec<Bit>>,
    pub ber: Vec<f64>,
}

impl SliceSet {
    pub fn build(x: &[f64], y: &[f64], config: &SliceConfig) -> Result<Self> {
        config.validate()?;
        if x.len() != y.len() {
            return Err(Error::LengthMismatch {
                expected: x.len(),
                actual: y.len(),
            });
        }
        let (labels, slices) = quantize(x, config);
        let mut estimates = Vec::with_capacity(config.m);
        let mut ber = Vec::with_capacity(config.m);
        for i in 1..=config.m {
            let est = estimate_slice(y, i, &slices[..i - 1], config)?;
            ber.push(if x.is_empty() {
                0.0
            } else {
                hamming(&est, &slices[i - 1]) as f64 / x.len() as f64
            });
            estimates.push(est);
        }
        Ok(Self {
            labels,
            slices,
            estimates,
            ber,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}
