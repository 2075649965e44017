//! One SISO pass over a short noisy frame: per-section symbol posteriors from
//! the Log-MAP decoder next to the transmitted symbols.
//!
//! Usage: `cargo run --example soft_decode -- [sections] [e]`

use turborecon::rng::SeededRng;
use turborecon::siso::{bcjr_decode, bsc_llr, SymbolLlr};
use turborecon::trellis::{build_transition_table, TrellisSpec};

fn main() -> turborecon::Result<()> {
    let mut args = std::env::args().skip(1);
    let sections: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(12);
    let e: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(0.1);
    let table = build_transition_table(&TrellisSpec::default())?;
    let mut rng = SeededRng::new(11);

    let x: Vec<u8> = (0..2 * sections)
        .map(|_| rng.bernoulli(0.5) as u8)
        .collect();
    let (parity, _) = table.encode(&x, 0)?;
    let y: Vec<u8> = x.iter().map(|&b| b ^ rng.bernoulli(e) as u8).collect();

    let l = bsc_llr(e, 25.0);
    let signed = |b: u8| if b == 0 { l } else { -l };
    let sys: Vec<SymbolLlr> = y
        .chunks(2)
        .map(|p| SymbolLlr::from_bit_llrs(signed(p[0]), signed(p[1])))
        .collect();
    // Parity arrives noiselessly: a large LLR pins it.
    let par: Vec<f64> = parity
        .iter()
        .map(|&p| if p == 0 { 25.0 } else { -25.0 })
        .collect();
    let out = bcjr_decode(
        &sys,
        &par,
        &vec![SymbolLlr::UNIFORM; sections],
        &table,
        Some(0),
    )?;

    let mut wrong_before = 0;
    let mut wrong_after = 0;
    for k in 0..sections {
        let sent = x[2 * k] << 1 | x[2 * k + 1];
        let seen = y[2 * k] << 1 | y[2 * k + 1];
        let decided = out.posterior[k].argmax();
        wrong_before += (seen != sent) as usize;
        wrong_after += (decided != sent) as usize;
        let post = out.posterior[k].0.map(|v| format!("{v:7.2}"));
        println!("section {k:2}: sent {sent:02b} received {seen:02b} decided {decided:02b}  log-posterior [{}]", post.join(" "));
    }
    println!("symbol errors: {wrong_before} received, {wrong_after} after decoding");
    Ok(())
}
