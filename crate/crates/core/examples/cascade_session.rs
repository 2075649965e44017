//! Cascade on a simulated BSC: disclosure and residual errors per trial.
//!
//! Usage: `cargo run --release --example cascade_session -- [l] [e] [trials]`

use turborecon::cascade::{cascade_run, leakage_bits, CascadeConfig, LeakageMode};
use turborecon::puncture::binary_entropy;
use turborecon::rng::SeededRng;

fn main() -> turborecon::Result<()> {
    let mut args = std::env::args().skip(1);
    let l: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(10_000);
    let e: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(0.0002);
    let trials: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(10);
    let config = CascadeConfig::default();
    let mut failures = 0;
    let mut disclosed = 0;
    for t in 0..trials {
        let mut rng = SeededRng::derive(42, t);
        let alice: Vec<u8> = (0..l).map(|_| rng.bernoulli(0.5) as u8).collect();
        let bob: Vec<u8> = alice.iter().map(|&b| b ^ rng.bernoulli(e) as u8).collect();
        let errors = alice.iter().zip(&bob).filter(|(a, b)| a != b).count();
        let (fixed, transcript) = cascade_run(&alice, &bob, e, &config, t)?;
        let residual = alice.iter().zip(&fixed).filter(|(a, b)| a != b).count();
        failures += (residual > 0) as usize;
        disclosed += transcript.disclosed_subsets();
        println!(
            "trial {t}: errors {errors}, corrected {}, residual {residual}, per-party {} ({} total)",
            transcript.corrected_positions.len(),
            transcript.disclosed_subsets(),
            leakage_bits(&transcript, LeakageMode::PerParty),
        );
    }
    let mean = disclosed as f64 / trials as f64;
    println!(
        "mean per-party disclosure {mean:.1} = {:.5} l (h(e) = {:.5}), failures {failures}/{trials}",
        mean / l as f64,
        binary_entropy(e)?
    );
    Ok(())
}
