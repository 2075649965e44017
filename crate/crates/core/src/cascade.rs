//! Interactive Cascade reconciliation between a simulated Alice and Bob.
//!
//! Bob drives the dialogue and only ever learns Alice's string through a
//! [`ParityChannel`]: he announces his parity of a subset of positions and
//! Alice answers with hers. Every exchange therefore discloses one parity
//! from each party and is recorded as one row of the transcript.
//!
//! Block passes use sizes `k1, 2 k1, 4 k1, ...` over fresh random
//! partitions, with `k1 = ceil(0.73 / e_est)`. They are followed by BICONF
//! confirmation rounds, which catch error pairs that stayed together in
//! every partition when the string holds only a handful of errors.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::rng::SeededRng;
use crate::{Bit, Error, Result};

pub trait ParityChannel {
    /// Sends Bob's parity of `positions` and returns Alice's.
    fn exchange(&mut self, positions: &[usize], bob_parity: Bit) -> Bit;
}

/// Alice's side of the dialogue, answering from her key.
#[derive(Debug, Clone, Copy)]
pub struct AliceEndpoint<'a> {
    key: &'a [Bit],
}

impl<'a> AliceEndpoint<'a> {
    pub fn new(key: &'a [Bit]) -> Self {
        Self { key }
    }
}

impl ParityChannel for AliceEndpoint<'_> {
    fn exchange(&mut self, positions: &[usize], _bob_parity: Bit) -> Bit {
        parity(self.key, positions)
    }
}

/// Wraps a channel and counts the messages sent in each direction.
#[derive(Debug, Clone)]
pub struct CountingChannel<C> {
    inner: C,
    pub from_alice: usize,
    pub from_bob: usize,
}

impl<C> CountingChannel<C> {
    pub fn new(inner: C) -> Self {
        Self {
            inner,
            from_alice: 0,
            from_bob: 0,
        }
    }
}

impl<C: ParityChannel> ParityChannel for CountingChannel<C> {
    fn exchange(&mut self, positions: &[usize], bob_parity: Bit) -> Bit {
        self.from_bob += 1;
        let reply = self.inner.exchange(positions, bob_parity);
        self.from_alice += 1;
        reply
    }
}

pub fn parity(key: &[Bit], positions: &[usize]) -> Bit {
    positions.iter().fold(0, |acc, &i| acc ^ key[i])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CascadeConfig {
    /// First-pass block size is `ceil(initial_block_factor / e_est)`.
    pub initial_block_factor: f64,
    /// Overrides the first-pass block size when set.
    pub initial_block_size: Option<usize>,
    pub passes: usize,
    /// BICONF rounds after the block passes: each checks the parity of a
    /// random half of the positions, bisecting and cascading on a mismatch.
    pub confirm_rounds: usize,
}

impl Default for CascadeConfig {
    fn default() -> Self {
        Self {
            initial_block_factor: 0.73,
            initial_block_size: None,
            passes: 4,
            confirm_rounds: 10,
        }
    }
}

impl CascadeConfig {
    /// First-pass block size for a string of length `l`, in `[1, l]`.
    pub fn first_block_size(&self, e_est: f64, l: usize) -> usize {
        let l = l.max(1);
        let k = match self.initial_block_size {
            Some(k) => k,
            None if e_est <= 0.0 => l,
            None => {
                let k = (self.initial_block_factor / e_est).ceil();
                if k >= l as f64 {
                    l
                } else {
                    k as usize
                }
            }
        };
        k.clamp(1, l)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CascadeTranscript {
    pub parities_alice: usize,
    pub parities_bob: usize,
    /// Rows of the disclosure matrix: the position subsets whose parities were exchanged.
    pub subsets: Vec<Vec<u32>>,
    pub passes: usize,
    pub block_sizes: Vec<usize>,
    pub corrected_positions: Vec<usize>,
}

impl CascadeTranscript {
    /// Number of disclosed subsets `d`.
    pub fn disclosed_subsets(&self) -> usize {
        self.subsets.len()
    }

    fn disclose<C: ParityChannel>(
        &mut self,
        channel: &mut C,
        positions: &[usize],
        bob_parity: Bit,
    ) -> Bit {
        let reply = channel.exchange(positions, bob_parity);
        self.parities_bob += 1;
        self.parities_alice += 1;
        self.subsets
            .push(positions.iter().map(|&p| p as u32).collect());
        reply
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LeakageMode {
    /// Parities counted separately for Alice and Bob.
    PerParty,
    /// Upper bound of twice the number of disclosed subsets.
    WorstCase,
}

/// Disclosed-bit count charged to the reconciliation ledger; both modes equal `2d`.
pub fn leakage_bits(transcript: &CascadeTranscript, mode: LeakageMode) -> usize {
    match mode {
        LeakageMode::PerParty => transcript.parities_alice + transcript.parities_bob,
        LeakageMode::WorstCase => 2 * transcript.disclosed_subsets(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bisection {
    pub position: usize,
    /// Parities disclosed per party during the search.
    pub parities: usize,
}

/// Locates and flips one erroneous bit of Bob's key inside `positions`,
/// whose parity Alice has already announced as `alice_parity`.
///
/// The left half is the smaller one, so an error in the last position of a
/// block of size `n` costs `ceil(log2 n)` parities.
pub fn binary_search_correct<C: ParityChannel>(
    positions: &[usize],
    alice_parity: Bit,
    bob: &mut [Bit],
    channel: &mut C,
    transcript: &mut CascadeTranscript,
) -> Result<Bisection> {
    if positions.is_empty() || parity(bob, positions) == alice_parity {
        return Err(Error::ParityAlreadyMatches);
    }
    let mut range = positions;
    let mut parities = 0;
    while range.len() > 1 {
        let (left, right) = range.split_at(range.len() / 2);
        let bob_left = parity(bob, left);
        let alice_left = transcript.disclose(channel, left, bob_left);
        parities += 1;
        range = if alice_left != bob_left { left } else { right };
    }
    let position = range[0];
    bob[position] ^= 1;
    transcript.corrected_positions.push(position);
    Ok(Bisection { position, parities })
}

const NO_BLOCK: u32 = u32::MAX;

struct Pass {
    blocks: Vec<Vec<usize>>,
    /// Block index of each position, `NO_BLOCK` where a confirmation round skips it.
    block_of: Vec<u32>,
    alice: Vec<Bit>,
    bob: Vec<Bit>,
}

/// Runs Cascade with Alice reached through `channel`; returns Bob's corrected key.
pub fn cascade_with_channel<C: ParityChannel>(
    bob_key: &[Bit],
    e_est: f64,
    config: &CascadeConfig,
    seed: u64,
    channel: &mut C,
) -> Result<(Vec<Bit>, CascadeTranscript)> {
    if !(0.0..0.5).contains(&e_est) {
        return Err(Error::ProbabilityOutOfRange(e_est));
    }
    if config.passes == 0 {
        return Err(Error::InvalidConfig(
            "Cascade needs at least one pass".into(),
        ));
    }
    let l = bob_key.len();
    let mut key = bob_key.to_vec();
    let mut transcript = CascadeTranscript::default();
    if l == 0 {
        return Ok((key, transcript));
    }
    let k1 = config.first_block_size(e_est, l);
    let mut rng = SeededRng::new(seed);
    let mut passes: Vec<Pass> = Vec::with_capacity(config.passes);

    for p in 0..config.passes + config.confirm_rounds {
        let mut order: Vec<usize> = (0..l).collect();
        rng.shuffle(&mut order);
        let blocks: Vec<Vec<usize>> = if p < config.passes {
            let k = k1
                .saturating_mul(1usize.checked_shl(p as u32).unwrap_or(usize::MAX))
                .min(l);
            transcript.block_sizes.push(k);
            order.chunks(k).map(<[usize]>::to_vec).collect()
        } else {
            if l < 2 {
                break;
            }
            transcript.block_sizes.push(l / 2);
            vec![order[..l / 2].to_vec()]
        };
        let mut block_of = vec![NO_BLOCK; l];
        for (b, block) in blocks.iter().enumerate() {
            for &i in block {
                block_of[i] = b as u32;
            }
        }
        let mut alice = Vec::with_capacity(blocks.len());
        let mut bob = Vec::with_capacity(blocks.len());
        for block in &blocks {
            let bp = parity(&key, block);
            alice.push(transcript.disclose(channel, block, bp));
            bob.push(bp);
        }
        passes.push(Pass {
            blocks,
            block_of,
            alice,
            bob,
        });
        transcript.passes += 1;

        // Smallest odd block first, across this and all earlier passes.
        let mut pending: BinaryHeap<Reverse<(usize, usize, usize)>> = BinaryHeap::new();
        let current = &passes[p];
        for b in 0..current.blocks.len() {
            if current.alice[b] != current.bob[b] {
                pending.push(Reverse((current.blocks[b].len(), p, b)));
            }
        }
        while let Some(Reverse((_, q, b))) = pending.pop() {
            if passes[q].alice[b] == passes[q].bob[b] {
                continue;
            }
            let found = binary_search_correct(
                &passes[q].blocks[b],
                passes[q].alice[b],
                &mut key,
                channel,
                &mut transcript,
            )?;
            for (r, pass) in passes.iter_mut().enumerate() {
                let rb = pass.block_of[found.position];
                if rb == NO_BLOCK {
                    continue;
                }
                let rb = rb as usize;
                pass.bob[rb] ^= 1;
                if pass.alice[rb] != pass.bob[rb] {
                    pending.push(Reverse((pass.blocks[rb].len(), r, rb)));
                }
            }
        }
    }
    Ok((key, transcript))
}

/// Reconciles Bob's key against Alice's over an in-process channel.
pub fn cascade_run(
    alice: &[Bit],
    bob: &[Bit],
    e_est: f64,
    config: &CascadeConfig,
    seed: u64,
) -> Result<(Vec<Bit>, CascadeTranscript)> {
    if alice.len() != bob.len() {
        return Err(Error::LengthMismatch {
            expected: alice.len(),
            actual: bob.len(),
        });
    }
    let mut channel = AliceEndpoint::new(alice);
    cascade_with_channel(bob, e_est, config, seed, &mut channel)
}
