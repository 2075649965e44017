//! Builds the puncture-aware interleaver for two spread patterns and reports
//! how many systematic positions get both, one or neither parity bit.
//!
//! Usage: `cargo run --example interleaver_layout -- [n] [count1] [count2] [seed]`

use turborecon::interleave::{build_interleaver, parity_coverage};
use turborecon::puncture::PuncturePattern;

fn main() -> turborecon::Result<()> {
    let mut args = std::env::args().skip(1).map(|s| s.parse::<u64>().ok());
    let n = args.next().flatten().unwrap_or(40) as usize;
    let c1 = (args.next().flatten().unwrap_or(12) as usize).min(n);
    let c2 = (args.next().flatten().unwrap_or(12) as usize).min(n);
    let seed = args.next().flatten().unwrap_or(1);

    let p1 = PuncturePattern::spread(n, c1, 0);
    let p2 = PuncturePattern::spread(n, c2, 1);
    let perm = build_interleaver(n, &p1, &p2, seed)?;
    let (both, neither) = parity_coverage(&perm, &p1, &p2);
    let show = |p: &PuncturePattern| {
        p.mask()
            .iter()
            .map(|&t| if t { '|' } else { '.' })
            .collect::<String>()
    };
    println!("pattern 1   {}", show(&p1));
    println!("pattern 2   {}", show(&p2));
    if n <= 64 {
        println!("forward     {:?}", perm.forward());
    }
    println!(
        "both {both} (floor {}), neither {neither} (floor {}), single {}",
        (c1 + c2).saturating_sub(n),
        n.saturating_sub(c1 + c2),
        n - both - neither
    );
    Ok(())
}
