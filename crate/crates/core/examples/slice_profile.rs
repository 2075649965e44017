//! Per-slice error rates of Bob's sequential estimates for a range of noise levels.
//!
//! Usage: `cargo run --release --example slice_profile -- [samples] [sigma...]`

use turborecon::harness::gen_source;
use turborecon::puncture::binary_entropy;
use turborecon::slicing::{SliceConfig, SliceSet};

fn main() -> turborecon::Result<()> {
    let mut args = std::env::args().skip(1);
    let samples: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(100_000);
    let mut sigmas: Vec<f64> = args.filter_map(|s| s.parse().ok()).collect();
    if sigmas.is_empty() {
        sigmas = vec![0.05, 0.08, 0.1, 0.12, 0.15];
    }
    println!("sigma   slice  ber          h(ber)");
    for sigma in sigmas {
        let (x, y) = gen_source(samples, sigma, 7);
        let set = SliceSet::build(&x, &y, &SliceConfig::equiprobable(5, sigma)?)?;
        for (i, e) in set.ber.iter().enumerate() {
            println!(
                "{sigma:<7} {:<6} {e:<12.6} {:.4}",
                i + 1,
                binary_entropy(*e)?
            );
        }
    }
    Ok(())
}
