//! Fixed-point decoding: saturating formats for inputs and messages.

use scma::fixed::{FixedFormat, Quantization, DEFAULT_INPUT, DEFAULT_INTERMEDIATE};
use scma::reference::shipped_system;
use scma::sim::{parse_snr_range, run_sweep, Detector, SweepConfig};
use scma::DecoderConfig;

fn main() -> scma::Result<()> {
    for f in [DEFAULT_INPUT, DEFAULT_INTERMEDIATE] {
        println!(
            "Q{}.{}: step {}, range [{}, {}]",
            f.total_bits - f.frac_bits,
            f.frac_bits,
            f.resolution(),
            f.min_value(),
            f.max_value()
        );
    }
    let q = DEFAULT_INPUT;
    for v in [0.3, -2.71, 100.0] {
        println!("  {v:>7} -> {}", q.quantize(v).to_f64());
    }

    let system = shipped_system();
    let float = DecoderConfig::max_log_a3(5);
    let narrow = Quantization {
        input: FixedFormat::new(6, 2),
        intermediate: FixedFormat::new(10, 3),
    };
    let detectors = vec![
        Detector::Mpa(float.clone()),
        Detector::Mpa(float.clone().with_quantization(Quantization::default())),
        Detector::Mpa(float.with_quantization(narrow)),
    ];
    let cfg = SweepConfig::new(parse_snr_range("8:12:2")?, 4000, detectors, 5);
    let result = run_sweep(&system, &cfg)?;
    for (i, label) in ["float", "fixed 8/16", "fixed 6/10"].iter().enumerate() {
        let pts: Vec<String> = result
            .points
            .iter()
            .skip(i)
            .step_by(3)
            .map(|p| format!("{:.0} dB: {:.3e}", p.snr_db, p.bler()))
            .collect();
        println!("{label:<11} {}", pts.join("  "));
    }
    Ok(())
}
