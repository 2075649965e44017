//! Parity-aware odd/even style interleaver.
//!
//! Source bits are split by whether encoder 1 transmits their parity
//! (group 1) or punctures it (group 2). Each group is shuffled on its own,
//! then group 1 is placed on the second encoder's punctured slots and group 2
//! on its transmitted slots; whichever group overflows takes the leftover
//! slots. This keeps the number of bits with both parities transmitted, and
//! the number with none, at their minimum.

use crate::puncture::PuncturePattern;
use crate::rng::SeededRng;
use crate::{Error, Result};

/// Bit-position permutation with `output[i] = input[forward[i]]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation {
    forward: Vec<u32>,
    inverse: Vec<u32>,
    seed: u64,
    group_boundary: usize,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        let forward: Vec<u32> = (0..n as u32).collect();
        Self {
            inverse: forward.clone(),
            forward,
            seed: 0,
            group_boundary: n,
        }
    }

    pub fn from_forward(forward: Vec<u32>) -> Result<Self> {
        let n = forward.len();
        let mut inverse = vec![u32::MAX; n];
        for (i, &src) in forward.iter().enumerate() {
            let slot = inverse.get_mut(src as usize).ok_or_else(|| {
                Error::InvalidData(format!("index {src} out of range for length {n}"))
            })?;
            if *slot != u32::MAX {
                return Err(Error::InvalidData(format!("index {src} appears twice")));
            }
            *slot = i as u32;
        }
        Ok(Self {
            forward,
            inverse,
            seed: 0,
            group_boundary: n,
        })
    }

    pub fn len(&self) -> usize {
        self.forward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forward.is_empty()
    }

    pub fn forward(&self) -> &[u32] {
        &self.forward
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Number of group-1 source positions.
    pub fn group_boundary(&self) -> usize {
        self.group_boundary
    }

    pub fn apply<T: Copy>(&self, block: &[T]) -> Result<Vec<T>> {
        self.check_len(block.len())?;
        Ok(self
            .forward
            .iter()
            .map(|&src| block[src as usize])
            .collect())
    }

    pub fn apply_inverse<T: Copy>(&self, block: &[T]) -> Result<Vec<T>> {
        self.check_len(block.len())?;
        Ok(self
            .inverse
            .iter()
            .map(|&dst| block[dst as usize])
            .collect())
    }

    /// `apply` into a caller-owned buffer; used in the decoder hot loop.
    pub(crate) fn apply_into<T: Copy>(&self, block: &[T], out: &mut [T]) {
        for (o, &src) in out.iter_mut().zip(&self.forward) {
            *o = block[src as usize];
        }
    }

    pub(crate) fn apply_inverse_into<T: Copy>(&self, block: &[T], out: &mut [T]) {
        for (o, &dst) in out.iter_mut().zip(&self.inverse) {
            *o = block[dst as usize];
        }
    }

    fn check_len(&self, actual: usize) -> Result<()> {
        if actual != self.forward.len() {
            return Err(Error::LengthMismatch {
                expected: self.forward.len(),
                actual,
            });
        }
        Ok(())
    }
}

pub fn build_interleaver(
    n: usize,
    pattern1: &PuncturePattern,
    pattern2: &PuncturePattern,
    seed: u64,
) -> Result<Permutation> {
    for p in [pattern1, pattern2] {
        if p.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                actual: p.len(),
            });
        }
    }
    let mut rng = SeededRng::new(seed);

    let (mut group1, mut group2): (Vec<u32>, Vec<u32>) =
        (0..n as u32).partition(|&j| pattern1.is_transmitted(j as usize));
    rng.shuffle(&mut group1);
    rng.shuffle(&mut group2);

    let (punctured_slots, transmitted_slots): (Vec<usize>, Vec<usize>) =
        (0..n).partition(|&i| !pattern2.is_transmitted(i));

    let mut forward = vec![0u32; n];
    let g1_fit = group1.len().min(punctured_slots.len());
    let g2_fit = group2.len().min(transmitted_slots.len());
    for (&slot, &src) in punctured_slots.iter().zip(&group1[..g1_fit]) {
        forward[slot] = src;
    }
    for (&slot, &src) in transmitted_slots.iter().zip(&group2[..g2_fit]) {
        forward[slot] = src;
    }
    // At most one group overflows, and exactly into the other group's leftover slots.
    let overflow = group1[g1_fit..].iter().chain(&group2[g2_fit..]);
    let leftover = punctured_slots[g1_fit..]
        .iter()
        .chain(&transmitted_slots[g2_fit..]);
    for (&slot, &src) in leftover.zip(overflow) {
        forward[slot] = src;
    }

    let mut perm = Permutation::from_forward(forward)?;
    perm.seed = seed;
    perm.group_boundary = group1.len();
    Ok(perm)
}

/// Counts source bits with both parities transmitted and with neither.
pub fn parity_coverage(
    perm: &Permutation,
    pattern1: &PuncturePattern,
    pattern2: &PuncturePattern,
) -> (usize, usize) {
    let mut both = 0;
    let mut neither = 0;
    for (slot, &src) in perm.forward().iter().enumerate() {
        match (
            pattern1.is_transmitted(src as usize),
            pattern2.is_transmitted(slot),
        ) {
            (true, true) => both += 1,
            (false, false) => neither += 1,
            _ => {}
        }
    }
    (both, neither)
}
