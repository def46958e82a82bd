//! Iteration savings and error rates with early termination and
//! self-adaption.

use scma::decoder::{Algorithm, Approximation};
use scma::reference::shipped_system;
use scma::sim::{parse_snr_range, run_sweep, Detector, SweepConfig};
use scma::DecoderConfig;

fn main() -> scma::Result<()> {
    let system = shipped_system();
    let base = DecoderConfig::new(Algorithm::Dmpa, Approximation::Exact, 8);
    let detectors = vec![
        Detector::Mpa(base.clone()),
        Detector::Mpa(base.clone().with_early_termination(0.01)),
        Detector::Mpa(base.clone().with_early_termination(0.05)),
        Detector::Mpa(base.with_self_adaption(0.01, 1.1, 0.9)),
        Detector::Mpa(DecoderConfig::max_log_a3(8).with_early_termination(0.01)),
    ];
    let cfg = SweepConfig::new(parse_snr_range("8:14:2")?, 3000, detectors, 3);
    let result = run_sweep(&system, &cfg)?;
    println!(
        "{:>6}  {:<30} {:>10} {:>10}",
        "Eb/N0", "variant", "BLER", "mean iters"
    );
    for p in &result.points {
        println!(
            "{:>6.1}  {:<30} {:>10.3e} {:>10.3}",
            p.snr_db,
            p.variant,
            p.bler(),
            p.mean_iterations()
        );
    }
    Ok(())
}
