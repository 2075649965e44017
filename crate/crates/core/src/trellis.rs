//! The 16-state duo-binary recursive systematic convolutional constituent code.
//!
//! Each trellis section consumes a pair of input bits `(u0, u1)` as two
//! elementary steps of the memory-4 binary RSC code and emits one parity bit
//! per input bit. Polynomials are given in octal with bit `j` holding the
//! coefficient of `D^j`, so the default feedback `0o23` is `1 + D + D^4`
//! and the feedforward `0o35` is `1 + D^2 + D^3 + D^4`.
//!
//! Symbols and parity pairs are packed as `first_bit << 1 | second_bit`.

use serde::{Deserialize, Serialize};

use crate::{Bit, Error, Result};

pub const MEMORY: usize = 4;
pub const NUM_STATES: usize = 1 << MEMORY;
pub const SYMBOL_ARITY: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrellisSpec {
    pub feedback_poly: u32,
    pub feedforward_poly: u32,
}

impl Default for TrellisSpec {
    fn default() -> Self {
        Self {
            feedback_poly: 0o23,
            feedforward_poly: 0o35,
        }
    }
}

impl TrellisSpec {
    pub fn new(feedback_poly: u32, feedforward_poly: u32) -> Result<Self> {
        let spec = Self {
            feedback_poly,
            feedforward_poly,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn memory(&self) -> usize {
        MEMORY
    }

    pub fn num_states(&self) -> usize {
        NUM_STATES
    }

    pub fn symbol_arity(&self) -> usize {
        SYMBOL_ARITY
    }

    pub fn validate(&self) -> Result<()> {
        for poly in [self.feedback_poly, self.feedforward_poly] {
            if poly >> (MEMORY + 1) != 0 {
                return Err(Error::MalformedPolynomial {
                    poly,
                    reason: "degree exceeds the code memory",
                });
            }
            if poly & 1 == 0 {
                return Err(Error::MalformedPolynomial {
                    poly,
                    reason: "constant term must be 1",
                });
            }
        }
        Ok(())
    }

    /// One elementary single-bit transition: returns `(next_state, parity)`.
    ///
    /// State bit `j - 1` holds the register value `a[k - j]`.
    pub fn step(&self, state: u8, bit: Bit) -> (u8, Bit) {
        let state = state as u32;
        let feedback = ((self.feedback_poly >> 1) & state).count_ones() & 1;
        let a = (bit as u32 ^ feedback) & 1;
        let parity = ((self.feedforward_poly & 1) * a)
            ^ (((self.feedforward_poly >> 1) & state).count_ones() & 1);
        let next = ((state << 1) | a) & (NUM_STATES as u32 - 1);
        (next as u8, parity as Bit)
    }
}

/// Precomputed duo-binary branch structure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionTable {
    next: [[u8; SYMBOL_ARITY]; NUM_STATES],
    parity: [[u8; SYMBOL_ARITY]; NUM_STATES],
}

pub fn build_transition_table(spec: &TrellisSpec) -> Result<TransitionTable> {
    spec.validate()?;
    let mut next = [[0u8; SYMBOL_ARITY]; NUM_STATES];
    let mut parity = [[0u8; SYMBOL_ARITY]; NUM_STATES];
    for state in 0..NUM_STATES as u8 {
        for symbol in 0..SYMBOL_ARITY as u8 {
            let (mid, p0) = spec.step(state, symbol >> 1);
            let (end, p1) = spec.step(mid, symbol & 1);
            next[state as usize][symbol as usize] = end;
            parity[state as usize][symbol as usize] = (p0 << 1) | p1;
        }
    }
    Ok(TransitionTable { next, parity })
}

impl TransitionTable {
    #[inline]
    pub fn next_state(&self, state: u8, symbol: u8) -> u8 {
        self.next[state as usize][symbol as usize]
    }

    #[inline]
    pub fn parity_pair(&self, state: u8, symbol: u8) -> u8 {
        self.parity[state as usize][symbol as usize]
    }

    /// Encodes a block, returning one parity bit per input bit and the final state.
    pub fn encode(&self, bits: &[Bit], initial_state: u8) -> Result<(Vec<Bit>, u8)> {
        if !bits.len().is_multiple_of(2) {
            return Err(Error::OddLength(bits.len()));
        }
        if initial_state as usize >= NUM_STATES {
            return Err(Error::InvalidState(initial_state));
        }
        let mut parity = Vec::with_capacity(bits.len());
        let mut state = initial_state;
        for pair in bits.chunks_exact(2) {
            let symbol = (pair[0] << 1) | pair[1];
            let pp = self.parity_pair(state, symbol);
            parity.push(pp >> 1);
            parity.push(pp & 1);
            state = self.next_state(state, symbol);
        }
        Ok((parity, state))
    }
}

/// Encodes `bits` with the constituent code described by `spec`.
pub fn encode_block(bits: &[Bit], spec: &TrellisSpec, initial_state: u8) -> Result<(Vec<Bit>, u8)> {
    build_transition_table(spec)?.encode(bits, initial_state)
}
