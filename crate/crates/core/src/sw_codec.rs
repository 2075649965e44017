//! Side-information (Slepian-Wolf) codec: Alice sends only punctured parity
//! bits of her block; Bob decodes them against his correlated estimate.
//!
//! Interleaver and puncturing patterns are public and regenerated from the
//! encoding's header, so only parity bits count as disclosed.
//!
//! Wire format, all header fields `u32` little-endian:
//!
//! ```text
//! block_len | e_est (units of 1e-9) | seed lo | seed hi |
//! count1 | offset1 | count2 | offset2 |
//! parity1, bit-packed MSB first, zero-padded to a byte |
//! parity2, bit-packed MSB first, zero-padded to a byte
//! ```

use crate::interleave::{build_interleaver, Permutation};
use crate::puncture::{rate_for_ber, PuncturePattern, RatePolicy};
use crate::siso::{turbo_decode, DecoderConfig, ReceivedParity, TurboOutcome};
use crate::trellis::{build_transition_table, TrellisSpec};
use crate::{Bit, Error, Result};

const HEADER_WORDS: usize = 8;
const E_EST_SCALE: f64 = 1e9;

#[derive(Debug, Clone, PartialEq)]
pub struct SwEncoding {
    pub block_len: usize,
    pub e_est: f64,
    pub perm_seed: u64,
    pub count1: usize,
    pub offset1: usize,
    pub count2: usize,
    pub offset2: usize,
    pub parity1: Vec<Bit>,
    pub parity2: Vec<Bit>,
}

impl SwEncoding {
    pub fn disclosed_bits(&self) -> usize {
        self.parity1.len() + self.parity2.len()
    }

    pub fn patterns(&self) -> (PuncturePattern, PuncturePattern) {
        (
            PuncturePattern::spread(self.block_len, self.count1, self.offset1),
            PuncturePattern::spread(self.block_len, self.count2, self.offset2),
        )
    }

    pub fn permutation(&self) -> Result<Permutation> {
        let (p1, p2) = self.patterns();
        build_interleaver(self.block_len, &p1, &p2, self.perm_seed)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let header = [
            self.block_len as u32,
            (self.e_est * E_EST_SCALE).round() as u32,
            self.perm_seed as u32,
            (self.perm_seed >> 32) as u32,
            self.count1 as u32,
            self.offset1 as u32,
            self.count2 as u32,
            self.offset2 as u32,
        ];
        let mut out: Vec<u8> = header.iter().flat_map(|w| w.to_le_bytes()).collect();
        out.extend(pack_bits(&self.parity1));
        out.extend(pack_bits(&self.parity2));
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < HEADER_WORDS * 4 {
            return Err(Error::MalformedEncoding(format!(
                "{} bytes is shorter than the header",
                bytes.len()
            )));
        }
        let word = |i: usize| u32::from_le_bytes(bytes[4 * i..4 * i + 4].try_into().unwrap());
        let block_len = word(0) as usize;
        let count1 = word(4) as usize;
        let count2 = word(6) as usize;
        if count1 > block_len || count2 > block_len {
            return Err(Error::MalformedEncoding(
                "transmitted count exceeds block length".into(),
            ));
        }
        let body = &bytes[HEADER_WORDS * 4..];
        let len1 = count1.div_ceil(8);
        let len2 = count2.div_ceil(8);
        if body.len() != len1 + len2 {
            return Err(Error::MalformedEncoding(format!(
                "expected {} payload bytes, found {}",
                len1 + len2,
                body.len()
            )));
        }
        Ok(Self {
            block_len,
            e_est: word(1) as f64 / E_EST_SCALE,
            perm_seed: word(2) as u64 | ((word(3) as u64) << 32),
            count1,
            offset1: word(5) as usize,
            count2,
            offset2: word(7) as usize,
            parity1: unpack_bits(&body[..len1], count1),
            parity2: unpack_bits(&body[len1..], count2),
        })
    }
}

pub fn pack_bits(bits: &[Bit]) -> Vec<u8> {
    bits.chunks(8)
        .map(|chunk| {
            chunk
                .iter()
                .enumerate()
                .fold(0u8, |acc, (i, &b)| acc | ((b & 1) << (7 - i)))
        })
        .collect()
}

pub fn unpack_bits(bytes: &[u8], count: usize) -> Vec<Bit> {
    (0..count)
        .map(|i| (bytes[i / 8] >> (7 - i % 8)) & 1)
        .collect()
}

/// Encodes `x` to the punctured parity streams sized for `e_est`.
///
/// The total parity fraction from `policy` is split equally between the two
/// encoders; both patterns start at offset 0.
pub fn sw_encode(
    x: &[Bit],
    e_est: f64,
    seed: u64,
    spec: &TrellisSpec,
    policy: &RatePolicy,
) -> Result<SwEncoding> {
    let rate = rate_for_ber(e_est, policy)?;
    let count = (0.5 * rate * x.len() as f64).round() as usize;
    sw_encode_with_counts(x, e_est, seed, spec, count, count)
}

/// Encodes with explicit per-encoder transmitted counts, bypassing the rate policy.
pub fn sw_encode_with_counts(
    x: &[Bit],
    e_est: f64,
    seed: u64,
    spec: &TrellisSpec,
    count1: usize,
    count2: usize,
) -> Result<SwEncoding> {
    let n = x.len();
    if !n.is_multiple_of(2) {
        return Err(Error::OddLength(n));
    }
    if !(0.0..0.5).contains(&e_est) {
        return Err(Error::ProbabilityOutOfRange(e_est));
    }
    let table = build_transition_table(spec)?;
    let mut enc = SwEncoding {
        block_len: n,
        e_est,
        perm_seed: seed,
        count1: count1.min(n),
        offset1: 0,
        count2: count2.min(n),
        offset2: 0,
        parity1: Vec::new(),
        parity2: Vec::new(),
    };
    let (p1, p2) = enc.patterns();
    let perm = build_interleaver(n, &p1, &p2, seed)?;
    let (full1, _) = table.encode(x, 0)?;
    let (full2, _) = table.encode(&perm.apply(x)?, 0)?;
    enc.parity1 = p1.select(&full1)?;
    enc.parity2 = p2.select(&full2)?;
    Ok(enc)
}

pub fn sw_decode(
    y: &[Bit],
    e: f64,
    enc: &SwEncoding,
    spec: &TrellisSpec,
    config: &DecoderConfig,
) -> Result<TurboOutcome> {
    if y.len() != enc.block_len {
        return Err(Error::LengthMismatch {
            expected: enc.block_len,
            actual: y.len(),
        });
    }
    let table = build_transition_table(spec)?;
    let (p1, p2) = enc.patterns();
    let perm = build_interleaver(enc.block_len, &p1, &p2, enc.perm_seed)?;
    turbo_decode(
        y,
        e,
        ReceivedParity {
            bits: &enc.parity1,
            pattern: &p1,
        },
        ReceivedParity {
            bits: &enc.parity2,
            pattern: &p2,
        },
        &perm,
        &table,
        config,
    )
}

/// Residual Hamming distance between a decoded block and the original.
pub fn verify(x_hat: &[Bit], x: &[Bit]) -> usize {
    x_hat.iter().zip(x).filter(|(a, b)| a != b).count() + x_hat.len().abs_diff(x.len())
}
