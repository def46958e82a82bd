//! Encode one frame with the shipped codebook and superpose the layers.

use scma::reference::shipped_system;
use scma::tx::{awgn_channel, encode, multiplex_noiseless, superpose, Frame};

fn main() -> scma::Result<()> {
    let system = shipped_system();
    println!(
        "K={} N={} M={} J={} (overloading {:.0}%)",
        system.k(),
        system.n(),
        system.m(),
        system.j(),
        100.0 * system.overloading()
    );
    println!("factor graph (rows = resources, columns = users):");
    for row in system.graph().matrix() {
        println!("  {row:?}");
    }

    let frame = Frame::from_bits(
        &system,
        &[
            true, false, false, true, true, true, false, false, true, false, false, true,
        ],
    )?;
    println!("symbols: {:?}", frame.symbols());
    let codewords = encode(&system, &frame)?;
    for (j, cw) in codewords.iter().enumerate() {
        let shown: Vec<String> = cw
            .iter()
            .map(|c| format!("{:+.2}{:+.2}i", c.re, c.im))
            .collect();
        println!("  user {j}: [{}]", shown.join(", "));
    }
    let sum = superpose(&codewords);
    let rx = multiplex_noiseless(&codewords, &awgn_channel(system.k()), 1.0)?;
    for (k, (s, y)) in sum.iter().zip(&rx.y).enumerate() {
        println!(
            "resource {k}: s = {:+.3}{:+.3}i, y = {:+.3}{:+.3}i",
            s.re, s.im, y.re, y.im
        );
    }
    Ok(())
}
