//! Symbol-level Log-MAP (BCJR) decoding of the duo-binary constituent code and
//! the iterative two-decoder loop.
//!
//! Log-probabilities are natural logarithms. A bit LLR is `ln P(0) / P(1)`;
//! a [`SymbolLlr`] is a length-4 log-probability vector over packed symbols
//! `u0 << 1 | u1`, normalized so its largest entry is 0.

use serde::{Deserialize, Serialize};

use crate::interleave::Permutation;
use crate::puncture::PuncturePattern;
use crate::trellis::{TransitionTable, NUM_STATES, SYMBOL_ARITY};
use crate::{Bit, Error, Result};

/// Jacobian logarithm `ln(e^a + e^b)`, exact including the correction term.
#[inline]
pub fn max_star(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymbolLlr(pub [f64; SYMBOL_ARITY]);

impl SymbolLlr {
    pub const UNIFORM: Self = Self([0.0; SYMBOL_ARITY]);

    /// Product-form symbol vector from two independent bit LLRs.
    pub fn from_bit_llrs(l0: f64, l1: f64) -> Self {
        let h0 = 0.5 * l0;
        let h1 = 0.5 * l1;
        Self([h0 + h1, h0 - h1, -h0 + h1, -h0 - h1]).normalized()
    }

    pub fn normalized(self) -> Self {
        let max = self.0.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !max.is_finite() {
            return Self::UNIFORM;
        }
        Self(self.0.map(|v| v - max))
    }

    /// Marginal bit LLRs `(L(u0), L(u1))`.
    pub fn bit_llrs(&self) -> (f64, f64) {
        let v = &self.0;
        let l0 = max_star(v[0], v[1]) - max_star(v[2], v[3]);
        let l1 = max_star(v[0], v[2]) - max_star(v[1], v[3]);
        (l0, l1)
    }

    pub fn argmax(&self) -> u8 {
        let mut best = 0;
        for u in 1..SYMBOL_ARITY {
            if self.0[u] > self.0[best] {
                best = u;
            }
        }
        best as u8
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DecoderConfig {
    pub iterations: usize,
    /// Clip magnitude for LLRs; also the LLR given to a received parity bit.
    pub l_max: f64,
    pub fujii_weight_punctured: f64,
    pub fujii_weight_received: f64,
    pub early_stop: bool,
}

impl Default for DecoderConfig {
    fn default() -> Self {
        Self {
            iterations: 18,
            l_max: 25.0,
            fujii_weight_punctured: 0.9,
            fujii_weight_received: 1.0,
            early_stop: true,
        }
    }
}

impl DecoderConfig {
    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return Err(Error::InvalidConfig("iterations must be at least 1".into()));
        }
        if !(self.l_max > 0.0 && self.l_max.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "l_max {} must be positive",
                self.l_max
            )));
        }
        for w in [self.fujii_weight_punctured, self.fujii_weight_received] {
            if !(w > 0.0 && w <= 1.0) {
                return Err(Error::InvalidConfig(format!(
                    "extrinsic weight {w} outside (0, 1]"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SisoOutput {
    pub extrinsic: Vec<SymbolLlr>,
    pub posterior: Vec<SymbolLlr>,
}

/// Log-MAP decoder for one constituent code. Reuses its forward-metric
/// buffer across calls; one instance per frame in flight.
#[derive(Debug, Clone)]
pub struct SisoDecoder<'a> {
    table: &'a TransitionTable,
    initial_state: Option<u8>,
    posterior_floor: f64,
    alpha: Vec<[f64; NUM_STATES]>,
}

impl<'a> SisoDecoder<'a> {
    /// `initial_state: None` starts from uniform state metrics; the end of the
    /// trellis is always open.
    pub fn new(table: &'a TransitionTable, initial_state: Option<u8>) -> Self {
        Self {
            table,
            initial_state,
            posterior_floor: -4.0 * DecoderConfig::default().l_max,
            alpha: Vec::new(),
        }
    }

    pub fn with_posterior_floor(mut self, floor: f64) -> Self {
        self.posterior_floor = floor;
        self
    }

    /// `parity_llrs` holds two bit LLRs per section, zero where punctured.
    pub fn decode(
        &mut self,
        systematic: &[SymbolLlr],
        parity_llrs: &[f64],
        priors: &[SymbolLlr],
    ) -> Result<SisoOutput> {
        let sections = systematic.len();
        if priors.len() != sections {
            return Err(Error::LengthMismatch {
                expected: sections,
                actual: priors.len(),
            });
        }
        if parity_llrs.len() != 2 * sections {
            return Err(Error::LengthMismatch {
                expected: 2 * sections,
                actual: parity_llrs.len(),
            });
        }
        let table = self.table;

        let intrinsic: Vec<[f64; SYMBOL_ARITY]> = systematic
            .iter()
            .zip(priors)
            .map(|(s, p)| std::array::from_fn(|u| s.0[u] + p.0[u]))
            .collect();
        let parity_metric: Vec<[f64; 4]> = parity_llrs
            .chunks_exact(2)
            .map(|l| {
                let h0 = 0.5 * l[0];
                let h1 = 0.5 * l[1];
                [h0 + h1, h0 - h1, -h0 + h1, -h0 - h1]
            })
            .collect();

        self.alpha.clear();
        self.alpha
            .resize(sections + 1, [f64::NEG_INFINITY; NUM_STATES]);
        match self.initial_state {
            Some(s) => self.alpha[0][s as usize] = 0.0,
            None => self.alpha[0] = [0.0; NUM_STATES],
        }
        for k in 0..sections {
            let mut next = [f64::NEG_INFINITY; NUM_STATES];
            let cur = &self.alpha[k];
            for s in 0..NUM_STATES as u8 {
                let a = cur[s as usize];
                if a == f64::NEG_INFINITY {
                    continue;
                }
                for u in 0..SYMBOL_ARITY as u8 {
                    let ns = table.next_state(s, u) as usize;
                    let m = a
                        + intrinsic[k][u as usize]
                        + parity_metric[k][table.parity_pair(s, u) as usize];
                    next[ns] = max_star(next[ns], m);
                }
            }
            normalize_states(&mut next);
            self.alpha[k + 1] = next;
        }

        let mut extrinsic = vec![SymbolLlr::UNIFORM; sections];
        let mut posterior = vec![SymbolLlr::UNIFORM; sections];
        let mut beta = [0.0f64; NUM_STATES];
        for k in (0..sections).rev() {
            let a = &self.alpha[k];
            let mut ext = [f64::NEG_INFINITY; SYMBOL_ARITY];
            let mut prev = [f64::NEG_INFINITY; NUM_STATES];
            for s in 0..NUM_STATES as u8 {
                for u in 0..SYMBOL_ARITY as u8 {
                    let ns = table.next_state(s, u) as usize;
                    let pm = parity_metric[k][table.parity_pair(s, u) as usize];
                    let b = beta[ns];
                    ext[u as usize] = max_star(ext[u as usize], a[s as usize] + pm + b);
                    prev[s as usize] =
                        max_star(prev[s as usize], intrinsic[k][u as usize] + pm + b);
                }
            }
            normalize_states(&mut prev);
            beta = prev;

            let ext = SymbolLlr(ext).normalized();
            let mut post =
                SymbolLlr(std::array::from_fn(|u| ext.0[u] + intrinsic[k][u])).normalized();
            for v in post.0.iter_mut() {
                *v = v.max(self.posterior_floor);
            }
            extrinsic[k] = ext;
            posterior[k] = post;
        }
        Ok(SisoOutput {
            extrinsic,
            posterior,
        })
    }
}

fn normalize_states(metrics: &mut [f64; NUM_STATES]) {
    let max = metrics.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max.is_finite() {
        for m in metrics.iter_mut() {
            *m -= max;
        }
    }
}

/// One-shot [`SisoDecoder::decode`] starting from the given known state.
pub fn bcjr_decode(
    systematic: &[SymbolLlr],
    parity_llrs: &[f64],
    priors: &[SymbolLlr],
    table: &TransitionTable,
    initial_state: Option<u8>,
) -> Result<SisoOutput> {
    SisoDecoder::new(table, initial_state).decode(systematic, parity_llrs, priors)
}

/// Scales each section's extrinsic vector by the received or punctured weight.
pub fn weight_extrinsic(
    extrinsic: &[SymbolLlr],
    received: &[bool],
    config: &DecoderConfig,
) -> Result<Vec<SymbolLlr>> {
    if received.len() != extrinsic.len() {
        return Err(Error::LengthMismatch {
            expected: extrinsic.len(),
            actual: received.len(),
        });
    }
    Ok(extrinsic
        .iter()
        .zip(received)
        .map(|(e, &rx)| {
            let w = if rx {
                config.fujii_weight_received
            } else {
                config.fujii_weight_punctured
            };
            SymbolLlr(e.0.map(|v| w * v)).normalized()
        })
        .collect())
}

/// Parity bits actually received for one constituent encoder.
#[derive(Debug, Clone, Copy)]
pub struct ReceivedParity<'a> {
    /// Transmitted parity values, in slot order.
    pub bits: &'a [Bit],
    pub pattern: &'a PuncturePattern,
}

impl ReceivedParity<'_> {
    fn llrs(&self, l_max: f64) -> Result<Vec<f64>> {
        if self.bits.len() != self.pattern.transmitted_count() {
            return Err(Error::LengthMismatch {
                expected: self.pattern.transmitted_count(),
                actual: self.bits.len(),
            });
        }
        let mut rx = self.bits.iter();
        Ok(self
            .pattern
            .mask()
            .iter()
            .map(|&m| match (m, m.then(|| rx.next()).flatten()) {
                (true, Some(&0)) => l_max,
                (true, Some(_)) => -l_max,
                _ => 0.0,
            })
            .collect())
    }

    fn section_flags(&self) -> Vec<bool> {
        self.pattern
            .mask()
            .chunks(2)
            .map(|c| c.iter().any(|&m| m))
            .collect()
    }

    fn matches(&self, full_parity: &[Bit]) -> bool {
        let mut rx = self.bits.iter();
        full_parity
            .iter()
            .zip(self.pattern.mask())
            .filter(|(_, &m)| m)
            .all(|(p, _)| rx.next() == Some(p))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TurboOutcome {
    pub x_hat: Vec<Bit>,
    /// Re-encoding `x_hat` reproduces every received parity bit.
    pub converged: bool,
    pub iterations_used: usize,
}

/// Channel LLR for a bit observed through a BSC with crossover `e`, clipped to `l_max`.
pub fn bsc_llr(e: f64, l_max: f64) -> f64 {
    if e <= 0.0 {
        return l_max;
    }
    ((1.0 - e) / e).ln().min(l_max)
}

/// Iteratively decodes Alice's block from Bob's side information `y` and
/// the two punctured parity streams. Both encoders start in state 0.
pub fn turbo_decode(
    y: &[Bit],
    e: f64,
    parity1: ReceivedParity<'_>,
    parity2: ReceivedParity<'_>,
    perm: &Permutation,
    table: &TransitionTable,
    config: &DecoderConfig,
) -> Result<TurboOutcome> {
    config.validate()?;
    if !(0.0..0.5).contains(&e) {
        return Err(Error::ProbabilityOutOfRange(e));
    }
    let n = y.len();
    if !n.is_multiple_of(2) {
        return Err(Error::OddLength(n));
    }
    for len in [perm.len(), parity1.pattern.len(), parity2.pattern.len()] {
        if len != n {
            return Err(Error::LengthMismatch {
                expected: n,
                actual: len,
            });
        }
    }
    let l_max = config.l_max;
    let lc = bsc_llr(e, l_max);
    let channel: Vec<f64> = y.iter().map(|&b| if b == 0 { lc } else { -lc }).collect();
    let channel_perm = perm.apply(&channel)?;
    let par1 = parity1.llrs(l_max)?;
    let par2 = parity2.llrs(l_max)?;
    let rx1 = parity1.section_flags();
    let rx2 = parity2.section_flags();

    let sys1 = to_symbols(&channel);
    let sys2 = to_symbols(&channel_perm);

    let mut dec1 = SisoDecoder::new(table, Some(0)).with_posterior_floor(-4.0 * l_max);
    let mut dec2 = SisoDecoder::new(table, Some(0)).with_posterior_floor(-4.0 * l_max);

    let mut ext_from2 = vec![0.0; n];
    let mut prior2_bits = vec![0.0; n];
    let mut app_perm = vec![0.0; n];
    let mut app = vec![0.0; n];
    let mut previous: Vec<Bit> = y.to_vec();
    let mut x_hat = y.to_vec();
    let mut converged = false;
    let mut iterations_used = 0;

    for _ in 0..config.iterations {
        iterations_used += 1;

        let prior1 = to_symbols(&ext_from2);
        let out1 = dec1.decode(&sys1, &par1, &prior1)?;
        let w1 = weight_extrinsic(&out1.extrinsic, &rx1, config)?;
        let ext1 = to_bit_extrinsics(&w1, &ext_from2, &channel, l_max);

        perm.apply_into(&ext1, &mut prior2_bits);
        let prior2 = to_symbols(&prior2_bits);
        let out2 = dec2.decode(&sys2, &par2, &prior2)?;
        let w2 = weight_extrinsic(&out2.extrinsic, &rx2, config)?;
        let ext2 = to_bit_extrinsics(&w2, &prior2_bits, &channel_perm, l_max);
        perm.apply_inverse_into(&ext2, &mut ext_from2);

        for (k, post) in out2.posterior.iter().enumerate() {
            let (l0, l1) = post.bit_llrs();
            app_perm[2 * k] = l0;
            app_perm[2 * k + 1] = l1;
        }
        perm.apply_inverse_into(&app_perm, &mut app);
        for (x, &l) in x_hat.iter_mut().zip(&app) {
            *x = (l < 0.0) as Bit;
        }

        converged = parity_consistent(&x_hat, &parity1, &parity2, perm, table)?;
        if config.early_stop && converged && x_hat == previous {
            break;
        }
        previous.clone_from(&x_hat);
    }

    Ok(TurboOutcome {
        x_hat,
        converged,
        iterations_used,
    })
}

fn parity_consistent(
    x_hat: &[Bit],
    parity1: &ReceivedParity<'_>,
    parity2: &ReceivedParity<'_>,
    perm: &Permutation,
    table: &TransitionTable,
) -> Result<bool> {
    let (p1, _) = table.encode(x_hat, 0)?;
    if !parity1.matches(&p1) {
        return Ok(false);
    }
    let (p2, _) = table.encode(&perm.apply(x_hat)?, 0)?;
    Ok(parity2.matches(&p2))
}

fn to_symbols(bit_llrs: &[f64]) -> Vec<SymbolLlr> {
    bit_llrs
        .chunks_exact(2)
        .map(|l| SymbolLlr::from_bit_llrs(l[0], l[1]))
        .collect()
}

/// Per-bit extrinsic LLRs from weighted symbol extrinsics: each bit's
/// symbol-level evidence is marginalized against its partner bit's intrinsic
/// (prior plus channel) information.
fn to_bit_extrinsics(
    weighted: &[SymbolLlr],
    prior_bits: &[f64],
    channel: &[f64],
    l_max: f64,
) -> Vec<f64> {
    let mut out = Vec::with_capacity(2 * weighted.len());
    for (k, w) in weighted.iter().enumerate() {
        let w = &w.0;
        let h0 = 0.5 * (prior_bits[2 * k] + channel[2 * k]);
        let h1 = 0.5 * (prior_bits[2 * k + 1] + channel[2 * k + 1]);
        let l0 = max_star(h1 + w[0], -h1 + w[1]) - max_star(h1 + w[2], -h1 + w[3]);
        let l1 = max_star(h0 + w[0], -h0 + w[2]) - max_star(h0 + w[1], -h0 + w[3]);
        out.push(l0.clamp(-l_max, l_max));
        out.push(l1.clamp(-l_max, l_max));
    }
    out
}
