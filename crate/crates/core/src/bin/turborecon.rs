use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use turborecon::harness::{self, RunConfig};

#[derive(Parser)]
#[command(
    version,
    about = "Turbo side-information coding and sliced reconciliation simulator"
)]
struct Cli {
    /// TOML configuration file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Default)]
struct Overrides {
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    noise_sigma: Option<f64>,
    #[arg(long)]
    slices: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    block_len: Option<usize>,
    #[arg(long)]
    trials: Option<usize>,
    /// Comma-separated BER grid.
    #[arg(long, value_delimiter = ',')]
    ber_grid: Option<Vec<f64>>,
    #[arg(long)]
    fixed_rate: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    min_rate: Option<f64>,
    #[arg(long)]
    iterations: Option<usize>,
    #[arg(long)]
    fujii_weight: Option<f64>,
    /// Feedback polynomial in octal, e.g. 23.
    #[arg(long, value_parser = parse_octal)]
    feedback_poly: Option<u32>,
    /// Feedforward polynomial in octal, e.g. 35.
    #[arg(long, value_parser = parse_octal)]
    feedforward_poly: Option<u32>,
    #[arg(long)]
    cascade_passes: Option<usize>,
    #[arg(long)]
    confirm_rounds: Option<usize>,
    #[arg(long)]
    threshold_hi: Option<f64>,
    #[arg(long)]
    threshold_lo: Option<f64>,
}

fn parse_octal(s: &str) -> Result<u32, String> {
    u32::from_str_radix(s.trim_start_matches("0o"), 8).map_err(|e| e.to_string())
}

#[derive(Subcommand)]
enum Command {
    /// Write correlated Gaussian samples for Alice and Bob.
    GenSource {
        #[arg(long, default_value = "alice.csv")]
        alice: PathBuf,
        #[arg(long, default_value = "bob.csv")]
        bob: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Frame success of the turbo codec over a BER grid.
    SwBench {
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Cascade disclosure over a BER grid.
    CascadeBench {
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Reconcile sample files slice by slice and report the net yield.
    Reconcile {
        #[arg(long)]
        alice: PathBuf,
        #[arg(long)]
        bob: PathBuf,
        #[arg(long, default_value = "report.json")]
        json: PathBuf,
        #[arg(long, default_value = "report.csv")]
        csv: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
}

fn apply(mut cfg: RunConfig, o: &Overrides) -> RunConfig {
    macro_rules! set {
        ($($field:expr => $value:expr),* $(,)?) => {
            $(if let Some(v) = $value.clone() { $field = v; })*
        };
    }
    set! {
        cfg.samples => o.samples,
        cfg.noise_sigma => o.noise_sigma,
        cfg.slices => o.slices,
        cfg.seed => o.seed,
        cfg.block_len => o.block_len,
        cfg.trials => o.trials,
        cfg.ber_grid => o.ber_grid,
        cfg.policy.beta => o.beta,
        cfg.policy.min_rate => o.min_rate,
        cfg.decoder.iterations => o.iterations,
        cfg.decoder.fujii_weight_punctured => o.fujii_weight,
        cfg.trellis.feedback_poly => o.feedback_poly,
        cfg.trellis.feedforward_poly => o.feedforward_poly,
        cfg.cascade.passes => o.cascade_passes,
        cfg.cascade.confirm_rounds => o.confirm_rounds,
        cfg.thresholds.hi => o.threshold_hi,
        cfg.thresholds.lo => o.threshold_lo,
    }
    if o.fixed_rate.is_some() {
        cfg.fixed_rate = o.fixed_rate;
    }
    cfg
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}

fn run() -> Result<ExitCode> {
    let cli = Cli::parse();
    let base = match &cli.config {
        Some(path) => {
            RunConfig::load(path).with_context(|| format!("loading {}", path.display()))?
        }
        None => RunConfig::default(),
    };
    match &cli.command {
        Command::GenSource {
            alice,
            bob,
            overrides,
        } => {
            let cfg = apply(base, overrides);
            cfg.validate()?;
            let (x, y) = harness::gen_source(cfg.samples, cfg.noise_sigma, cfg.seed);
            harness::write_samples(alice, "x", &x)?;
            harness::write_samples(bob, "y", &y)?;
        }
        Command::SwBench { out, overrides } => {
            let rows = harness::sw_bench(&apply(base, overrides))?;
            match out {
                Some(p) => harness::write_sw_bench(&rows, std::fs::File::create(p)?)?,
                None => harness::write_sw_bench(&rows, std::io::stdout())?,
            }
        }
        Command::CascadeBench { out, overrides } => {
            let rows = harness::cascade_bench(&apply(base, overrides))?;
            match out {
                Some(p) => harness::write_cascade_bench(&rows, std::fs::File::create(p)?)?,
                None => harness::write_cascade_bench(&rows, std::io::stdout())?,
            }
        }
        Command::Reconcile {
            alice,
            bob,
            json,
            csv,
            overrides,
        } => {
            let cfg = apply(base, overrides);
            let report = harness::reconcile_cmd(alice, bob, &cfg, Some(json), Some(csv))?;
            report.write_csv(std::io::stdout())?;
            println!(
                "net {:.0} bits ({:.4} per sample), entropy {:.0}, disclosed {}",
                report.net_bits,
                report.net_bits_per_sample(),
                report.total_entropy,
                report.total_disclosed
            );
            if !report.reconciled_exactly {
                eprintln!("error: residual mismatch after reconciliation");
                return Ok(ExitCode::from(2));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}
