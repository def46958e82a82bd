//! Error-rate sweep of the main decoder variants against exhaustive ML.
//!
//! `cargo run --release --example ber_sweep -- 20000` for tighter intervals.

use scma::decoder::{Algorithm, Approximation};
use scma::reference::shipped_system;
use scma::sim::tradeoff::{tradeoff_report, tradeoff_text, ErrorMetric};
use scma::sim::{parse_snr_range, run_sweep, Detector, SweepConfig};
use scma::DecoderConfig;

fn main() -> scma::Result<()> {
    let frames = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(4000);
    let system = shipped_system();
    let detectors = vec![
        Detector::Mpa(DecoderConfig::new(Algorithm::Dmpa, Approximation::Exact, 5)),
        Detector::Mpa(DecoderConfig::new(
            Algorithm::MaxLog,
            Approximation::Exact,
            5,
        )),
        Detector::Mpa(DecoderConfig::max_log_a3(5)),
        Detector::MlOracle,
    ];
    let cfg = SweepConfig::new(parse_snr_range("6:12:1")?, frames, detectors, 1);
    let result = run_sweep(&system, &cfg)?;

    println!(
        "{:>6}  {:<16} {:>10} {:>10} {:>10}",
        "Eb/N0", "variant", "BLER", "SER", "BER"
    );
    for p in &result.points {
        println!(
            "{:>6.1}  {:<16} {:>10.3e} {:>10.3e} {:>10.3e}",
            p.snr_db,
            p.variant,
            p.bler(),
            p.ser(),
            p.ber()
        );
    }
    println!("\nEb/N0 needed for BLER 1e-2:");
    print!(
        "{}",
        tradeoff_text(&tradeoff_report(&result.points, ErrorMetric::Bler, 1e-2))
    );
    Ok(())
}
