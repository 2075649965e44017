//! Experiment drivers behind the command-line front end: correlated source
//! generation, Monte-Carlo benchmarks of both binary codecs, and the
//! end-to-end reconcile run.

use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cascade::{cascade_run, leakage_bits, CascadeConfig, LeakageMode};
use crate::ledger::{reconcile_all, sig6, PipelineConfig, ReconciliationReport, Thresholds};
use crate::puncture::{binary_entropy, rate_for_ber, RatePolicy};
use crate::rng::{mix_seed, SeededRng};
use crate::siso::DecoderConfig;
use crate::slicing::{hamming, SliceConfig};
use crate::sw_codec::{sw_decode, sw_encode, sw_encode_with_counts};
use crate::trellis::TrellisSpec;
use crate::{Bit, Error, Result};

/// Settings shared by every subcommand, loadable from a TOML file.
///
/// ```toml
/// samples = 100000
/// noise_sigma = 0.1
/// slices = 5
/// seed = 1
/// block_len = 10000
/// trials = 50
/// ber_grid = [0.03, 0.05, 0.0638]
///
/// [trellis]
/// feedback_poly = 0o23
/// feedforward_poly = 0o35
///
/// [policy]
/// beta = 1.344
/// min_rate = 0.02
///
/// [decoder]
/// iterations = 18
/// fujii_weight_punctured = 0.9
///
/// [cascade]
/// initial_block_factor = 0.73
/// passes = 4
/// confirm_rounds = 10
///
/// [thresholds]
/// hi = 0.15
/// lo = 0.008
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub samples: usize,
    pub noise_sigma: f64,
    pub slices: usize,
    /// Explicit cell boundaries; equiprobable cells when absent.
    pub boundaries: Option<Vec<f64>>,
    pub seed: u64,
    pub block_len: usize,
    pub trials: usize,
    pub ber_grid: Vec<f64>,
    /// Total parity fraction used by `sw-bench` instead of the rate policy.
    pub fixed_rate: Option<f64>,
    pub trellis: TrellisSpec,
    pub policy: RatePolicy,
    pub decoder: DecoderConfig,
    pub cascade: CascadeConfig,
    pub thresholds: Thresholds,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            samples: 100_000,
            noise_sigma: 0.1,
            slices: 5,
            boundaries: None,
            seed: 1,
            block_len: PipelineConfig::DEFAULT_BLOCK_LEN,
            trials: 50,
            ber_grid: vec![0.001, 0.01, 0.03, 0.05, 0.0638],
            fixed_rate: None,
            trellis: TrellisSpec::default(),
            policy: RatePolicy::default(),
            decoder: DecoderConfig::default(),
            cascade: CascadeConfig::default(),
            thresholds: Thresholds::default(),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let config: Self = toml::from_str(&text)?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 || self.trials == 0 || self.block_len < 2 {
            return Err(Error::InvalidConfig(
                "samples and trials must be >= 1, block_len >= 2".into(),
            ));
        }
        if !self.block_len.is_multiple_of(2) {
            return Err(Error::InvalidConfig(format!(
                "block_len {} must be even",
                self.block_len
            )));
        }
        self.trellis.validate()?;
        self.policy.validate()?;
        self.decoder.validate()?;
        if let Some(r) = self.fixed_rate {
            if !(0.0..=1.0).contains(&r) {
                return Err(Error::InvalidConfig(format!(
                    "fixed rate {r} outside [0, 1]"
                )));
            }
        }
        Ok(())
    }

    pub fn slice_config(&self) -> Result<SliceConfig> {
        match &self.boundaries {
            Some(b) => {
                let config = SliceConfig {
                    m: self.slices,
                    boundaries: b.clone(),
                    noise_sigma: self.noise_sigma,
                };
                config.validate()?;
                Ok(config)
            }
            None => SliceConfig::equiprobable(self.slices, self.noise_sigma),
        }
    }

    pub fn pipeline(&self) -> PipelineConfig {
        PipelineConfig {
            trellis: self.trellis,
            policy: self.policy,
            decoder: self.decoder,
            cascade: self.cascade,
            thresholds: self.thresholds,
            block_len: Some(self.block_len),
            seed: self.seed,
        }
    }
}

/// Correlated Gaussian pair: `x ~ N(0, 1)`, `y = x + N(0, sigma^2)`.
///
/// `x` depends only on the seed, so sweeping `noise_sigma` keeps Alice's data fixed.
pub fn gen_source(l: usize, noise_sigma: f64, seed: u64) -> (Vec<f64>, Vec<f64>) {
    let mut signal = SeededRng::derive(seed, 0);
    let mut noise = SeededRng::derive(seed, 1);
    let x: Vec<f64> = (0..l).map(|_| signal.normal()).collect();
    let y = x
        .iter()
        .map(|&v| v + noise_sigma * noise.normal())
        .collect();
    (x, y)
}

/// Writes one value per line under a one-word header, in shortest round-trip form.
pub fn write_samples(path: &Path, header: &str, values: &[f64]) -> Result<()> {
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(w, "{header}")?;
    for v in values {
        writeln!(w, "{v}")?;
    }
    w.flush()?;
    Ok(())
}

/// Reads one float per line; a non-numeric first line is taken as a header.
pub fn read_samples(path: &Path) -> Result<Vec<f64>> {
    let reader = BufReader::new(std::fs::File::open(path)?);
    let mut values = Vec::new();
    for (n, line) in reader.lines().enumerate() {
        let line = line?;
        let field = line.trim();
        if field.is_empty() {
            continue;
        }
        match field.parse::<f64>() {
            Ok(v) if v.is_finite() => values.push(v),
            Err(_) if n == 0 => continue,
            _ => {
                return Err(Error::InvalidData(format!(
                    "{}:{}: expected a finite number, found {field:?}",
                    path.display(),
                    n + 1
                )))
            }
        }
    }
    if values.is_empty() {
        return Err(Error::InvalidData(format!(
            "{}: no samples",
            path.display()
        )));
    }
    Ok(values)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SwBenchRow {
    pub ber: f64,
    pub rate: f64,
    pub frames: usize,
    pub success: f64,
    pub mean_iterations: f64,
}

fn random_frame(n: usize, e: f64, seed: u64) -> (Vec<Bit>, Vec<Bit>) {
    let mut rng = SeededRng::new(seed);
    let x: Vec<Bit> = (0..n).map(|_| rng.bernoulli(0.5) as Bit).collect();
    let y = x.iter().map(|&b| b ^ rng.bernoulli(e) as Bit).collect();
    (x, y)
}

/// Frame success fraction of the turbo codec over a BSC grid.
///
/// Rows are sorted by BER. `config.fixed_rate` overrides the rate policy.
pub fn sw_bench(config: &RunConfig) -> Result<Vec<SwBenchRow>> {
    config.validate()?;
    let n = config.block_len;
    let mut grid = config.ber_grid.clone();
    grid.sort_by(f64::total_cmp);
    grid.iter()
        .enumerate()
        .map(|(g, &e)| {
            let rate = match config.fixed_rate {
                Some(r) => r,
                None => rate_for_ber(e, &config.policy)?,
            };
            let count = (0.5 * rate * n as f64).round() as usize;
            let results: Vec<(bool, usize)> = (0..config.trials)
                .into_par_iter()
                .map(|t| -> Result<_> {
                    let frame_seed = mix_seed(mix_seed(config.seed, g as u64), t as u64);
                    let (x, y) = random_frame(n, e, frame_seed);
                    let enc =
                        sw_encode_with_counts(&x, e, frame_seed, &config.trellis, count, count)?;
                    let dec = sw_decode(&y, e, &enc, &config.trellis, &config.decoder)?;
                    Ok((dec.x_hat == x, dec.iterations_used))
                })
                .collect::<Result<_>>()?;
            let trials = results.len() as f64;
            Ok(SwBenchRow {
                ber: e,
                rate: 2.0 * count as f64 / n as f64,
                frames: results.len(),
                success: results.iter().filter(|r| r.0).count() as f64 / trials,
                mean_iterations: results.iter().map(|r| r.1).sum::<usize>() as f64 / trials,
            })
        })
        .collect()
}

/// Encodes one random frame at the policy rate and reports `(disclosed, success)`.
pub fn sw_trial(n: usize, e: f64, seed: u64, config: &RunConfig) -> Result<(usize, bool)> {
    let (x, y) = random_frame(n, e, seed);
    let enc = sw_encode(&x, e, seed, &config.trellis, &config.policy)?;
    let dec = sw_decode(&y, e, &enc, &config.trellis, &config.decoder)?;
    Ok((enc.disclosed_bits(), dec.x_hat == x))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CascadeBenchRow {
    pub ber: f64,
    pub trials: usize,
    /// Mean parities disclosed by each party.
    pub per_party: f64,
    pub per_party_over_l: f64,
    pub shannon_limit_h: f64,
    /// `per_party / (l h(e))`, i.e. `1 + xi`.
    pub efficiency: f64,
    pub success: f64,
}

/// Cascade disclosure and success over a BSC grid at string length `config.samples`.
pub fn cascade_bench(config: &RunConfig) -> Result<Vec<CascadeBenchRow>> {
    config.validate()?;
    let l = config.samples;
    let mut grid = config.ber_grid.clone();
    grid.sort_by(f64::total_cmp);
    grid.iter()
        .enumerate()
        .map(|(g, &e)| {
            let results: Vec<(usize, bool)> = (0..config.trials)
                .into_par_iter()
                .map(|t| -> Result<_> {
                    let seed = mix_seed(mix_seed(config.seed, g as u64), t as u64);
                    let (alice, bob) = random_frame(l, e, seed);
                    let (fixed, tr) = cascade_run(&alice, &bob, e, &config.cascade, seed)?;
                    Ok((
                        leakage_bits(&tr, LeakageMode::PerParty) / 2,
                        hamming(&fixed, &alice) == 0,
                    ))
                })
                .collect::<Result<_>>()?;
            let trials = results.len() as f64;
            let per_party = results.iter().map(|r| r.0).sum::<usize>() as f64 / trials;
            let h = binary_entropy(e)?;
            Ok(CascadeBenchRow {
                ber: e,
                trials: results.len(),
                per_party,
                per_party_over_l: per_party / l as f64,
                shannon_limit_h: h,
                efficiency: if h > 0.0 {
                    per_party / (l as f64 * h)
                } else {
                    f64::INFINITY
                },
                success: results.iter().filter(|r| r.1).count() as f64 / trials,
            })
        })
        .collect()
}

pub fn write_sw_bench<W: Write>(rows: &[SwBenchRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["ber", "rate", "frames", "success", "mean_iterations"])?;
    for r in rows {
        w.write_record([
            sig6(r.ber),
            sig6(r.rate),
            r.frames.to_string(),
            sig6(r.success),
            sig6(r.mean_iterations),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_cascade_bench<W: Write>(rows: &[CascadeBenchRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "ber",
        "trials",
        "per_party",
        "per_party_over_l",
        "shannon_limit_h",
        "efficiency",
        "success",
    ])?;
    for r in rows {
        w.write_record([
            sig6(r.ber),
            r.trials.to_string(),
            sig6(r.per_party),
            sig6(r.per_party_over_l),
            sig6(r.shannon_limit_h),
            sig6(r.efficiency),
            sig6(r.success),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Loads Alice's and Bob's samples, reconciles them and writes the reports.
pub fn reconcile_cmd(
    x_path: &Path,
    y_path: &Path,
    config: &RunConfig,
    json_out: Option<&Path>,
    csv_out: Option<&Path>,
) -> Result<ReconciliationReport> {
    config.validate()?;
    let x = read_samples(x_path)?;
    let y = read_samples(y_path)?;
    if x.len() != y.len() {
        return Err(Error::InvalidData(format!(
            "sample files differ in length: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    let (report, _) = reconcile_all(&x, &y, &config.slice_config()?, &config.pipeline())?;
    if let Some(path) = json_out {
        report.write_json(path)?;
    }
    if let Some(path) = csv_out {
        report.write_csv(std::fs::File::create(path)?)?;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn noiseless_source_is_identical() {
        let (x, y) = gen_source(1000, 0.0, 5);
        assert_eq!(x, y);
    }

    #[test]
    fn toml_overrides_defaults() {
        let cfg: RunConfig = toml::from_str(
            "noise_sigma = 0.2\n[trellis]\nfeedback_poly = 0o23\nfeedforward_poly = 0o35\n[decoder]\niterations = 6\n",
        )
        .unwrap();
        assert_eq!(cfg.noise_sigma, 0.2);
        assert_eq!(cfg.decoder.iterations, 6);
        assert_eq!(cfg.decoder.l_max, 25.0);
        assert_eq!(cfg.trellis, TrellisSpec::default());
        assert!(toml::from_str::<RunConfig>("bogus = 1").is_err());
    }

    #[test]
    fn sample_files_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.csv");
        let (x, _) = gen_source(100, 0.1, 9);
        write_samples(&path, "x", &x).unwrap();
        assert_eq!(read_samples(&path).unwrap(), x);
    }

    #[test]
    fn corrupted_samples_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        std::fs::write(&path, "x\n0.5\nnot-a-number\n").unwrap();
        assert!(matches!(read_samples(&path), Err(Error::InvalidData(_))));
        std::fs::write(&path, "x\n0.5\ninf\n").unwrap();
        assert!(read_samples(&path).is_err());
    }
}
