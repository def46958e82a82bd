//! Counts every operation the decoders execute and checks the totals against
//! the closed-form complexity table.

use scma::decoder::{Algorithm, Approximation};
use scma::metrics::{audit, predict, ComplexityModel, ModelParams, OpCounters, RunShape};
use scma::reference::shipped_system;
use scma::sim::{draw_frame, Fading};
use scma::tx::transmit;
use scma::{Decoder, DecoderConfig};

fn main() -> scma::Result<()> {
    let system = shipped_system();
    let params = ModelParams {
        m: 4,
        resources: 4,
        users: 6,
        iterations: 5.0,
    };
    for model in ComplexityModel::ALL {
        let p = predict(model, params);
        let shown: Vec<String> = p
            .entries
            .iter()
            .filter(|e| e.2 != 0.0)
            .map(|(pr, op, v)| format!("{} {}={v}", pr.name(), op.name()))
            .collect();
        println!("{:<12} {}", model.name(), shown.join(", "));
    }
    println!();

    let runs = [
        (ComplexityModel::MaxLogA3, DecoderConfig::max_log_a3(5)),
        (
            ComplexityModel::MaxLog,
            DecoderConfig::new(Algorithm::MaxLog, Approximation::Exact, 5),
        ),
        (
            ComplexityModel::Dmpa,
            DecoderConfig::new(Algorithm::Dmpa, Approximation::Exact, 5),
        ),
    ];
    let n0 = system.noise_density(10.0);
    let frames = 500;
    for (model, cfg) in runs {
        let decoder = Decoder::new(system.clone(), cfg)?;
        let mut counters = OpCounters::default();
        let mut iterations = 0;
        for i in 0..frames {
            let d = draw_frame(&system, 11, i, Fading::Awgn);
            let rx = transmit(&system, &d.frame, &d.h, n0, &d.noise, None)?;
            let out = decoder.decode(&rx)?;
            counters.merge(&out.counters);
            iterations += out.iterations as u64;
        }
        let shape = RunShape {
            m: 4,
            resources: 4,
            users: 6,
            frames,
            iterations,
        };
        let report = audit(&counters, model, shape);
        print!("{report}");
        println!("exact match: {}\n", report.is_exact());
    }
    Ok(())
}
