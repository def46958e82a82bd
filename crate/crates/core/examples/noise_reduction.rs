//! Spreading each frame over all resources with a distributed matrix before
//! a fading channel, and undoing it at the receiver.
//!
//! Under Rayleigh fading the receiver equalises each resource with `y / h`
//! before applying the inverse matrix. Deep fades blow up the noise on one
//! resource and the inverse then smears it over all of them, so the BLER with
//! the matrix comes out worse than without it. Under AWGN the two are close.

use std::sync::Arc;

use scma::reference::shipped_system;
use scma::sim::{parse_snr_range, run_sweep, Detector, Fading, SweepConfig};
use scma::tx::{Direction, DistributedMatrix};
use scma::DecoderConfig;

fn main() -> scma::Result<()> {
    let system = shipped_system();
    let d = DistributedMatrix::hadamard(system.k())?;
    let probe = vec![num_complex::Complex64::new(1.0, 0.0); system.k()];
    let round = d.apply(&d.apply(&probe, Direction::Forward), Direction::Inverse);
    println!(
        "D then D^-1 restores the input: {}",
        round.iter().all(|z| (z - 1.0).norm() < 1e-12)
    );

    for fading in [Fading::Awgn, Fading::Rayleigh] {
        for matrix in [None, Some(Arc::new(d.clone()))] {
            let mut cfg = SweepConfig::new(
                parse_snr_range("10:20:5")?,
                3000,
                vec![Detector::Mpa(DecoderConfig::max_log_a3(5))],
                9,
            );
            cfg.fading = fading;
            cfg.noise_reduction = matrix.clone();
            let result = run_sweep(&system, &cfg)?;
            let pts: Vec<String> = result
                .points
                .iter()
                .map(|p| format!("{:.0} dB: {:.3e}", p.snr_db, p.bler()))
                .collect();
            println!(
                "{:<9} {:<9} {}",
                format!("{fading:?}"),
                if matrix.is_some() { "hadamard" } else { "off" },
                pts.join("  ")
            );
        }
    }
    Ok(())
}
