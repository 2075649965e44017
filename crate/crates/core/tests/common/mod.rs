//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use turborecon::rng::SeededRng;

/// Bit-serial shift-register RSC encoder. `fb` and `ff` are the tap vectors
/// `[g0, g1, g2, g3, g4]` (coefficient of `D^j` at index `j`).
pub struct ShiftRegisterEncoder {
    fb: [u8; 5],
    ff: [u8; 5],
    /// `reg[j - 1]` holds `a[k - j]`.
    pub reg: [u8; 4],
}

impl ShiftRegisterEncoder {
    pub fn new(fb_octal: u32, ff_octal: u32) -> Self {
        let taps = |p: u32| std::array::from_fn(|j| ((p >> j) & 1) as u8);
        Self {
            fb: taps(fb_octal),
            ff: taps(ff_octal),
            reg: [0; 4],
        }
    }

    pub fn with_state(mut self, state: u8) -> Self {
        for j in 0..4 {
            self.reg[j] = (state >> j) & 1;
        }
        self
    }

    pub fn state(&self) -> u8 {
        (0..4).fold(0, |acc, j| acc | (self.reg[j] << j))
    }

    pub fn push(&mut self, u: u8) -> u8 {
        let mut a = u;
        for j in 1..=4 {
            a ^= self.fb[j] & self.reg[j - 1];
        }
        let mut p = self.ff[0] & a;
        for j in 1..=4 {
            p ^= self.ff[j] & self.reg[j - 1];
        }
        self.reg = [a, self.reg[0], self.reg[1], self.reg[2]];
        p
    }

    pub fn encode(&mut self, bits: &[u8]) -> Vec<u8> {
        bits.iter().map(|&b| self.push(b)).collect()
    }
}

pub fn oracle_encode(bits: &[u8]) -> Vec<u8> {
    ShiftRegisterEncoder::new(0o23, 0o35).encode(bits)
}

pub fn random_bits(rng: &mut SeededRng, n: usize) -> Vec<u8> {
    (0..n).map(|_| rng.bernoulli(0.5) as u8).collect()
}

pub fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + values.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}
