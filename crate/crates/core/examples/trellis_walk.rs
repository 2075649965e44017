//! Encodes a short block with the duo-binary RSC and prints the state and
//! parity pair of every trellis section.
//!
//! Usage: `cargo run --example trellis_walk -- [bits]`, e.g. `10110001`

use turborecon::trellis::{build_transition_table, TrellisSpec, NUM_STATES};

fn main() -> turborecon::Result<()> {
    let arg = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "1011000111".into());
    let bits: Vec<u8> = arg
        .bytes()
        .filter_map(|c| matches!(c, b'0' | b'1').then_some(c - b'0'))
        .collect();
    let spec = TrellisSpec::default();
    let table = build_transition_table(&spec)?;
    println!(
        "feedback {:o}, feedforward {:o}, {NUM_STATES} states",
        spec.feedback_poly, spec.feedforward_poly
    );
    let mut state = 0u8;
    for pair in bits.chunks(2) {
        if pair.len() < 2 {
            println!("dropping trailing bit {}", pair[0]);
            break;
        }
        let u = pair[0] << 1 | pair[1];
        let parity = table.parity_pair(state, u);
        let next = table.next_state(state, u);
        println!("state {state:04b}  input {u:02b}  parity {parity:02b}  -> {next:04b}");
        state = next;
    }
    let (parity, end) = table.encode(&bits[..bits.len() & !1], 0)?;
    let text: String = parity.iter().map(|b| char::from(b'0' + b)).collect();
    println!("parity stream {text}, final state {end:04b}");
    Ok(())
}
