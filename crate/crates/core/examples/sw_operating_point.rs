//! Turbo side-information coding on random BSC frames at the default rate policy.
//!
//! Usage: `cargo run --release --example sw_operating_point -- [e] [frames]`

use turborecon::puncture::RatePolicy;
use turborecon::rng::SeededRng;
use turborecon::siso::DecoderConfig;
use turborecon::sw_codec::{sw_decode, sw_encode, verify};
use turborecon::trellis::TrellisSpec;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let e: f64 = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(0.0638);
    let frames: usize = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(20);
    let n = 10_000;
    let spec = TrellisSpec::default();
    let policy = RatePolicy::default();
    let config = DecoderConfig::default();
    let mut ok = 0;
    let mut iters = 0;
    for f in 0..frames {
        let mut rng = SeededRng::derive(2024, f as u64);
        let x: Vec<u8> = (0..n).map(|_| rng.bernoulli(0.5) as u8).collect();
        let y: Vec<u8> = x.iter().map(|&b| b ^ rng.bernoulli(e) as u8).collect();
        let enc = sw_encode(&x, e, f as u64, &spec, &policy).unwrap();
        let out = sw_decode(&y, e, &enc, &spec, &config).unwrap();
        let residual = verify(&out.x_hat, &x);
        iters += out.iterations_used;
        if residual == 0 {
            ok += 1;
        }
        println!(
            "frame {f}: disclosed {} residual {residual} iterations {} converged {}",
            enc.disclosed_bits(),
            out.iterations_used,
            out.converged
        );
    }
    println!(
        "success {ok}/{frames}, mean iterations {:.1}",
        iters as f64 / frames as f64
    );
}
