//! Per-slice strategy selection and disclosure accounting.
//!
//! Slices are reconciled in order, Bob re-estimating each slice from the
//! slices he has already corrected. Each slice is charged `f(e_i)` bits:
//! the full length for full disclosure, `2d` for Cascade, or the transmitted
//! parity count for turbo frames. A Cascade slice or turbo frame that is not
//! recovered exactly is disclosed in full and charged its full length.

use std::io::Write;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cascade::{cascade_run, leakage_bits, CascadeConfig, LeakageMode};
use crate::puncture::{binary_entropy, RatePolicy};
use crate::rng::mix_seed;
use crate::siso::DecoderConfig;
use crate::slicing::{empirical_entropy, estimate_slice, hamming, quantize, SliceConfig};
use crate::sw_codec::{sw_decode, sw_encode};
use crate::trellis::TrellisSpec;
use crate::{Bit, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    FullDisclosure,
    Cascade,
    Turbo,
}

impl Method {
    pub fn label(self) -> &'static str {
        match self {
            Method::FullDisclosure => "full-disclosure",
            Method::Cascade => "cascade",
            Method::Turbo => "turbo",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Thresholds {
    /// Above this BER the slice is disclosed in full.
    pub hi: f64,
    /// Below this BER Cascade is used.
    pub lo: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            hi: 0.15,
            lo: 0.008,
        }
    }
}

pub fn select_strategy(e: f64, thresholds: &Thresholds) -> Method {
    if e > thresholds.hi {
        Method::FullDisclosure
    } else if e < thresholds.lo {
        Method::Cascade
    } else {
        Method::Turbo
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SliceOutcome {
    pub slice: usize,
    pub ber: f64,
    pub method: Method,
    pub disclosed: usize,
    /// Errors left by the selected method, before any fallback disclosure.
    pub residual_errors: usize,
    /// `h(e_i) * l` in bits.
    pub shannon_limit: f64,
    pub fallback: bool,
    pub frames: usize,
    pub frames_failed: usize,
    pub mean_iterations: Option<f64>,
    pub elapsed_secs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReconciliationReport {
    pub samples: usize,
    pub outcomes: Vec<SliceOutcome>,
    pub total_entropy: f64,
    pub total_disclosed: usize,
    pub net_bits: f64,
    pub reconciled_exactly: bool,
    pub elapsed_secs: f64,
}

impl ReconciliationReport {
    pub fn net_bits_per_sample(&self) -> f64 {
        self.net_bits / self.samples as f64
    }

    /// `net = entropy - disclosed` and the per-slice sum matches the total.
    pub fn identity_holds(&self) -> bool {
        let sum: usize = self.outcomes.iter().map(|o| o.disclosed).sum();
        sum == self.total_disclosed
            && self.net_bits == self.total_entropy - self.total_disclosed as f64
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path)?;
        serde_json::to_writer_pretty(std::io::BufWriter::new(file), self)?;
        Ok(())
    }

    /// One row per slice: `slice,ber,method,disclosed_over_l,shannon_limit_h`
    /// followed by the raw counts.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "slice",
            "ber",
            "method",
            "disclosed_over_l",
            "shannon_limit_h",
            "disclosed_bits",
            "residual_errors",
            "fallback",
        ])?;
        let l = self.samples.max(1) as f64;
        for o in &self.outcomes {
            w.write_record([
                o.slice.to_string(),
                sig6(o.ber),
                o.method.label().to_string(),
                sig6(o.disclosed as f64 / l),
                sig6(o.shannon_limit / l),
                o.disclosed.to_string(),
                o.residual_errors.to_string(),
                o.fallback.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Six significant digits in scientific notation.
pub fn sig6(v: f64) -> String {
    format!("{v:.5e}")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default)]
pub struct PipelineConfig {
    pub trellis: TrellisSpec,
    pub policy: RatePolicy,
    pub decoder: DecoderConfig,
    pub cascade: CascadeConfig,
    pub thresholds: Thresholds,
    pub block_len: Option<usize>,
    pub seed: u64,
}

impl PipelineConfig {
    pub const DEFAULT_BLOCK_LEN: usize = 10_000;

    fn block_len(&self) -> usize {
        self.block_len.unwrap_or(Self::DEFAULT_BLOCK_LEN)
    }
}

struct SliceResult {
    corrected: Vec<Bit>,
    outcome: SliceOutcome,
}

/// Reconciles every slice of Alice's samples `x` given Bob's samples `y`.
///
/// Returns the report and Bob's corrected slices.
pub fn reconcile_all(
    x: &[f64],
    y: &[f64],
    slices: &SliceConfig,
    config: &PipelineConfig,
) -> Result<(ReconciliationReport, Vec<Vec<Bit>>)> {
    slices.validate()?;
    config.decoder.validate()?;
    config.policy.validate()?;
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            expected: x.len(),
            actual: y.len(),
        });
    }
    if x.is_empty() {
        return Err(Error::InvalidData("no samples to reconcile".into()));
    }
    if config.block_len() < 2 {
        return Err(Error::InvalidConfig(
            "turbo block length must be at least 2".into(),
        ));
    }
    let start = Instant::now();
    let l = x.len();
    let (labels, alice) = quantize(x, slices);
    let mut corrected: Vec<Vec<Bit>> = Vec::with_capacity(slices.m);
    let mut outcomes = Vec::with_capacity(slices.m);

    for i in 1..=slices.m {
        let slice_start = Instant::now();
        let estimate = estimate_slice(y, i, &corrected, slices)?;
        let truth = &alice[i - 1];
        let ber = hamming(&estimate, truth) as f64 / l as f64;
        let method = select_strategy(ber, &config.thresholds);
        let slice_seed = mix_seed(config.seed, i as u64);
        let mut result = match method {
            Method::FullDisclosure => SliceResult {
                corrected: truth.clone(),
                outcome: outcome(i, ber, method, l),
            },
            Method::Cascade => run_cascade(i, ber, truth, &estimate, slice_seed, config)?,
            Method::Turbo => run_turbo(i, ber, truth, &estimate, slice_seed, config)?,
        };
        result.outcome.shannon_limit = binary_entropy(ber)? * l as f64;
        result.outcome.elapsed_secs = slice_start.elapsed().as_secs_f64();
        debug_assert!(result.outcome.disclosed <= l);
        outcomes.push(result.outcome);
        corrected.push(result.corrected);
    }

    let total_entropy = empirical_entropy(&labels, slices.m);
    let total_disclosed: usize = outcomes.iter().map(|o| o.disclosed).sum();
    let reconciled_exactly = corrected == alice;
    let report = ReconciliationReport {
        samples: l,
        outcomes,
        total_entropy,
        total_disclosed,
        net_bits: total_entropy - total_disclosed as f64,
        reconciled_exactly,
        elapsed_secs: start.elapsed().as_secs_f64(),
    };
    Ok((report, corrected))
}

fn outcome(slice: usize, ber: f64, method: Method, disclosed: usize) -> SliceOutcome {
    SliceOutcome {
        slice,
        ber,
        method,
        disclosed,
        residual_errors: 0,
        shannon_limit: 0.0,
        fallback: false,
        frames: 0,
        frames_failed: 0,
        mean_iterations: None,
        elapsed_secs: 0.0,
    }
}

fn run_cascade(
    i: usize,
    ber: f64,
    truth: &[Bit],
    estimate: &[Bit],
    seed: u64,
    config: &PipelineConfig,
) -> Result<SliceResult> {
    let (bob, transcript) = cascade_run(truth, estimate, ber, &config.cascade, seed)?;
    let residual = hamming(&bob, truth);
    let mut out = outcome(
        i,
        ber,
        Method::Cascade,
        leakage_bits(&transcript, LeakageMode::PerParty),
    );
    out.residual_errors = residual;
    if residual > 0 {
        out.fallback = true;
        out.disclosed = truth.len();
    }
    Ok(SliceResult {
        corrected: truth.to_vec(),
        outcome: out,
    })
}

fn run_turbo(
    i: usize,
    ber: f64,
    truth: &[Bit],
    estimate: &[Bit],
    seed: u64,
    config: &PipelineConfig,
) -> Result<SliceResult> {
    let block = config.block_len();
    let frames: Vec<(usize, (&[Bit], &[Bit]))> = truth
        .chunks(block)
        .zip(estimate.chunks(block))
        .enumerate()
        .collect();
    // (disclosed, residual, failed, iterations) per frame
    let results: Vec<(usize, usize, bool, usize)> = frames
        .par_iter()
        .map(|&(f, (xa, yb))| -> Result<_> {
            let mut xa = xa.to_vec();
            let mut yb = yb.to_vec();
            let frame_len = xa.len();
            if frame_len % 2 == 1 {
                // Public zero padding known to both sides.
                xa.push(0);
                yb.push(0);
            }
            let enc = sw_encode(
                &xa,
                ber,
                mix_seed(seed, f as u64),
                &config.trellis,
                &config.policy,
            )?;
            let dec = sw_decode(&yb, ber, &enc, &config.trellis, &config.decoder)?;
            let residual = hamming(&dec.x_hat, &xa);
            let failed = residual > 0 || !dec.converged;
            let disclosed = if failed {
                frame_len
            } else {
                enc.disclosed_bits().min(frame_len)
            };
            Ok((disclosed, residual, failed, dec.iterations_used))
        })
        .collect::<Result<_>>()?;

    let mut out = outcome(i, ber, Method::Turbo, results.iter().map(|r| r.0).sum());
    out.residual_errors = results.iter().map(|r| r.1).sum();
    out.frames = results.len();
    out.frames_failed = results.iter().filter(|r| r.2).count();
    out.fallback = out.frames_failed > 0;
    out.mean_iterations =
        Some(results.iter().map(|r| r.3).sum::<usize>() as f64 / results.len().max(1) as f64);
    Ok(SliceResult {
        corrected: truth.to_vec(),
        outcome: out,
    })
}
