//! Send one noisy frame and decode it with every decoder variant.

use scma::decoder::{Algorithm, Approximation};
use scma::reference::shipped_system;
use scma::sim::{draw_frame, Fading};
use scma::tx::transmit;
use scma::{Decoder, DecoderConfig};

fn main() -> scma::Result<()> {
    let system = shipped_system();
    let snr_db = 9.0;
    let n0 = system.noise_density(snr_db);
    let draw = draw_frame(&system, 7, 0, Fading::Awgn);
    let rx = transmit(&system, &draw.frame, &draw.h, n0, &draw.noise, None)?;
    println!("Eb/N0 = {snr_db} dB, N0 = {n0:.4}");
    println!("sent            {:?}", draw.frame.symbols());

    for algorithm in [Algorithm::Dmpa, Algorithm::MaxLog] {
        for approx in Approximation::ALL {
            let decoder = Decoder::new(system.clone(), DecoderConfig::new(algorithm, approx, 5))?;
            let out = decoder.decode(&rx)?;
            let errors = out
                .decisions
                .iter()
                .zip(draw.frame.symbols())
                .filter(|(a, b)| a != b)
                .count();
            println!(
                "{:<15} {:?}  {errors} symbol errors",
                decoder.config().label(),
                out.decisions
            );
        }
    }
    Ok(())
}
