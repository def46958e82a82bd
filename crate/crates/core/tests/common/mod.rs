//! Property checks shared by the property suites and the acceptance run.
//!
//! Each check draws its cases from a deterministic proptest runner and
//! returns a short summary, or the first failing case.

#![allow(dead_code)]

use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use scma::decoder::kernels::{layer_node_update, resource_node_update};
use scma::decoder::{
    init_probabilities, Algorithm, Approximation, BeliefState, Domain, GraphLayout,
};
use scma::fixed::{FixedFormat, Quantization};
use scma::metrics::OpCounters;
use scma::reference::shipped_system;
use scma::sim::{draw_frame, parse_snr_range, run_sweep, Detector, Fading, SweepConfig};
use scma::system::{lexicographic_supports, zero_rows_for_support, UserLayer};
use scma::tx::{
    awgn_channel, encode, multiplex_with_noise, superpose, transmit, unit_noise, Frame,
    ReceivedFrame,
};
use scma::{Decoder, DecoderConfig, ScmaSystem};

pub type Check = Result<String, String>;

fn runner(cases: u32) -> TestRunner {
    TestRunner::new_with_rng(
        Config {
            cases,
            failure_persistence: None,
            ..Config::default()
        },
        TestRng::deterministic_rng(RngAlgorithm::ChaCha),
    )
}

fn run<S: Strategy>(
    cases: u32,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String>
where
    S::Value: std::fmt::Debug,
{
    runner(cases)
        .run(&strategy, test)
        .map_err(|e| e.to_string())
}

fn fail(msg: impl Into<String>) -> TestCaseError {
    TestCaseError::fail(msg.into())
}

/// Random small system: `K ∈ {2,3,4}`, `N < K` or `N = 1`, `M ∈ {2,4}`, all
/// `C(K,N)` supports used, so resource degrees stay at most 3.
pub fn random_system(rng: &mut ChaCha8Rng) -> ScmaSystem {
    let k = rng.random_range(2..=4);
    let n = if k > 2 && rng.random_bool(0.5) { 2 } else { 1 };
    let m = if rng.random_bool(0.5) { 2 } else { 4 };
    let users = lexicographic_supports(k, n)
        .iter()
        .map(|support| {
            let codewords = (0..m)
                .map(|_| {
                    let mut cw = vec![Complex64::new(0.0, 0.0); k];
                    for &r in support {
                        cw[r] = Complex64::from_polar(
                            rng.random_range(0.3..2.0),
                            rng.random_range(0.0..2.0 * PI),
                        );
                    }
                    cw
                })
                .collect();
            UserLayer::new(k, n, zero_rows_for_support(k, support), codewords).unwrap()
        })
        .collect();
    ScmaSystem::new(k, n, m, users).unwrap()
}

/// Random frame through a unit channel with noise density `n0`.
pub fn random_frame(
    system: &ScmaSystem,
    n0: f64,
    rng: &mut ChaCha8Rng,
) -> (Vec<usize>, ReceivedFrame) {
    let symbols: Vec<usize> = (0..system.j())
        .map(|_| rng.random_range(0..system.m()))
        .collect();
    let frame = Frame::new(system, symbols.clone()).unwrap();
    let signal = superpose(&encode(system, &frame).unwrap());
    let noise = unit_noise(system.k(), rng);
    let rx = multiplex_with_noise(&signal, &awgn_channel(system.k()), n0, &noise).unwrap();
    (symbols, rx)
}

/// Reference message passing written directly from the update rules, with
/// its own graph discovery and metric evaluation. Returns per-user beliefs.
pub fn oracle_beliefs(
    system: &ScmaSystem,
    rx: &ReceivedFrame,
    cfg: &DecoderConfig,
) -> Vec<Vec<f64>> {
    let (k_count, j_count, m) = (system.k(), system.j(), system.m());
    let on: Vec<Vec<usize>> = (0..k_count)
        .map(|k| {
            (0..j_count)
                .filter(|&j| system.user(j).codeword(0)[k] != Complex64::new(0.0, 0.0))
                .collect()
        })
        .collect();
    let log = cfg.algorithm == Algorithm::MaxLog;
    let metric = |r: Complex64| {
        let d = match cfg.approximation {
            Approximation::Exact => r.norm_sqr() / rx.n0,
            Approximation::A1 => r.norm() / rx.n0,
            Approximation::A2 => r.norm_sqr(),
            Approximation::A3 => r.norm(),
        };
        if log {
            -d
        } else {
            (-d).exp()
        }
    };
    let uniform = if log { 0.0 } else { 1.0 / m as f64 };
    // l2r[(k, j)] and r2l[(k, j)], each a length-M vector.
    let mut l2r = vec![vec![vec![uniform; m]; j_count]; k_count];
    let mut r2l = vec![vec![vec![0.0; m]; j_count]; k_count];
    for _ in 0..cfg.max_iterations {
        for k in 0..k_count {
            let users = &on[k];
            let d = users.len();
            for (a, &ja) in users.iter().enumerate() {
                let mut out = vec![if log { f64::NEG_INFINITY } else { 0.0 }; m];
                for code in 0..m.pow(d as u32) {
                    let digits: Vec<usize> = (0..d)
                        .map(|i| code / m.pow((d - 1 - i) as u32) % m)
                        .collect();
                    let s: Complex64 = users
                        .iter()
                        .zip(&digits)
                        .map(|(&j, &sym)| system.user(j).codeword(sym)[k])
                        .sum();
                    let mut v = metric(rx.y[k] - rx.h[k] * s);
                    for (i, &j) in users.iter().enumerate() {
                        if i != a {
                            let msg = l2r[k][j][digits[i]];
                            v = if log { v + msg } else { v * msg };
                        }
                    }
                    let slot = &mut out[digits[a]];
                    *slot = if log { slot.max(v) } else { *slot + v };
                }
                r2l[k][ja] = out;
            }
        }
        for j in 0..j_count {
            let res: Vec<usize> = (0..k_count).filter(|&k| on[k].contains(&j)).collect();
            for &k in &res {
                let others: Vec<usize> = res.iter().copied().filter(|&x| x != k).collect();
                let mut v = vec![if log { 0.0 } else { 1.0 }; m];
                if others.is_empty() {
                    v = vec![uniform; m];
                } else {
                    for &o in &others {
                        for s in 0..m {
                            v[s] = if log {
                                v[s] + r2l[o][j][s]
                            } else {
                                v[s] * r2l[o][j][s]
                            };
                        }
                    }
                    if !log {
                        let total: f64 = v.iter().sum();
                        if total > 0.0 {
                            v.iter_mut().for_each(|x| *x /= total);
                        } else {
                            v = vec![uniform; m];
                        }
                    }
                }
                l2r[k][j] = v;
            }
        }
    }
    (0..j_count)
        .map(|j| {
            let mut q = vec![if log { 0.0 } else { 1.0 }; m];
            for k in 0..k_count {
                if on[k].contains(&j) {
                    for s in 0..m {
                        q[s] = if log {
                            q[s] + r2l[k][j][s]
                        } else {
                            q[s] * r2l[k][j][s]
                        };
                    }
                }
            }
            q
        })
        .collect()
}

fn close(a: &[f64], b: &[f64], log: bool) -> bool {
    let scale = if log {
        1.0
    } else {
        a.iter()
            .chain(b)
            .fold(0.0f64, |x, &y| x.max(y.abs()))
            .max(1e-300)
    };
    a.iter().zip(b).all(|(x, y)| {
        (x - y).abs()
            <= 1e-9 * scale.max(if log { x.abs() } else { 0.0 }) + if log { 1e-9 } else { 0.0 }
    })
}

/// Decoder beliefs equal the reference message passing on random systems
/// (`M ≤ 4`, resource degree ≤ 3), for every algorithm and approximation.
pub fn kernel_equivalence(cases: u32) -> Check {
    run(cases, (any::<u64>(), 1usize..=4), |(seed, iters)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let system = random_system(&mut rng);
        let n0 = rng.random_range(0.3..3.0);
        let (_, rx) = random_frame(&system, n0, &mut rng);
        for algorithm in [Algorithm::Dmpa, Algorithm::MaxLog] {
            for approx in Approximation::ALL {
                let cfg = DecoderConfig::new(algorithm, approx, iters);
                let got = Decoder::new(system.clone(), cfg.clone())
                    .unwrap()
                    .decode(&rx)
                    .unwrap();
                let want = oracle_beliefs(&system, &rx, &cfg);
                for (j, (g, w)) in got.beliefs.iter().zip(&want).enumerate() {
                    if !close(g, w, algorithm == Algorithm::MaxLog) {
                        return Err(fail(format!(
                            "{} user {j}: decoder {g:?} vs reference {w:?}",
                            cfg.label()
                        )));
                    }
                }
            }
        }
        Ok(())
    })?;
    Ok(format!(
        "{cases} random systems × 8 variants match the reference message passing"
    ))
}

/// Every probability-domain layer message sums to one, including when the
/// incoming product underflows.
pub fn normalization(cases: u32) -> Check {
    let system = shipped_system();
    let layout = GraphLayout::new(&system);
    run(
        cases,
        (any::<u64>(), -300.0f64..0.0),
        |(seed, log_scale)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = system.m();
            let init: Vec<Vec<f64>> = (0..system.k())
                .map(|_| {
                    (0..m.pow(3))
                        .map(|_| rng.random_range(0.0..1.0) * 10f64.powf(log_scale))
                        .collect()
                })
                .collect();
            let mut state = BeliefState::new(Domain::Probability, m, layout.num_edges(), init);
            let mut ops = Default::default();
            for _ in 0..3 {
                for k in 0..system.k() {
                    resource_node_update(&mut state, &layout, k, None, &mut ops);
                }
                for j in 0..system.j() {
                    layer_node_update(&mut state, &layout, j, false, None, &mut ops);
                }
                for e in 0..layout.num_edges() {
                    let sum: f64 = state.l2r_vec(e).iter().sum();
                    if (sum - 1.0).abs() > 1e-9 {
                        return Err(fail(format!("edge {e} sums to {sum}")));
                    }
                }
            }
            Ok(())
        },
    )?;
    Ok(format!(
        "{cases} random message tables, every layer message sums to 1 within 1e-9"
    ))
}

fn top_two_gap(q: &[f64]) -> f64 {
    let mut v = q.to_vec();
    v.sort_by(|a, b| b.partial_cmp(a).unwrap());
    if v.len() < 2 {
        f64::INFINITY
    } else {
        v[0] - v[1]
    }
}

/// Dropping `N0` from the Max-Log metric scales every message by `N0`, so
/// decisions never change; `|r|` and `|r|²` order residuals identically, so
/// the initial metric's per-resource argmax is shared by A2 and A3.
pub fn argmax_invariance(cases: u32) -> Check {
    let system = shipped_system();
    run(
        cases,
        (any::<u64>(), 1usize..=5, 5.0f64..14.0),
        |(seed, iters, snr)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n0 = system.noise_density(snr);
            let (_, rx) = random_frame(&system, n0, &mut rng);
            for (with, without) in [
                (Approximation::Exact, Approximation::A2),
                (Approximation::A1, Approximation::A3),
            ] {
                let a = Decoder::new(
                    system.clone(),
                    DecoderConfig::new(Algorithm::MaxLog, with, iters),
                )
                .unwrap();
                let b = Decoder::new(
                    system.clone(),
                    DecoderConfig::new(Algorithm::MaxLog, without, iters),
                )
                .unwrap();
                let (ra, rb) = (a.decode(&rx).unwrap(), b.decode(&rx).unwrap());
                for j in 0..system.j() {
                    let margin = top_two_gap(&rb.beliefs[j]);
                    if ra.decisions[j] != rb.decisions[j]
                        && margin > 1e-9 * (1.0 + rb.beliefs[j][0].abs())
                    {
                        return Err(fail(format!(
                            "{} vs {} user {j}",
                            with.name(),
                            without.name()
                        )));
                    }
                }
            }
            let p2 = init_probabilities(
                &rx,
                &system,
                &DecoderConfig::new(Algorithm::MaxLog, Approximation::A2, 1),
            )
            .unwrap();
            let p3 = init_probabilities(
                &rx,
                &system,
                &DecoderConfig::new(Algorithm::MaxLog, Approximation::A3, 1),
            )
            .unwrap();
            let argmax = |v: &[f64]| (0..v.len()).fold(0, |b, i| if v[i] > v[b] { i } else { b });
            for k in 0..system.k() {
                if argmax(&p2[k]) != argmax(&p3[k]) {
                    return Err(fail(format!(
                        "resource {k}: A2 and A3 initial argmax differ"
                    )));
                }
            }
            Ok(())
        },
    )?;
    Ok(format!("{cases} noisy frames: Max-Log decisions unchanged by dropping N0; A2/A3 initial argmax agree"))
}

fn small_sweep(seed: u64, target_errors: Option<u64>) -> SweepConfig {
    let detectors = vec![
        Detector::Mpa(
            DecoderConfig::new(Algorithm::Dmpa, Approximation::Exact, 3)
                .with_early_termination(0.01),
        ),
        Detector::Mpa(DecoderConfig::max_log_a3(4)),
        Detector::MlOracle,
    ];
    let mut cfg = SweepConfig::new(parse_snr_range("4:10:3").unwrap(), 2500, detectors, seed);
    cfg.target_errors = target_errors;
    cfg
}

/// The same seed gives byte-identical CSV regardless of thread count.
pub fn deterministic_csv(cases: u32) -> Check {
    let system = shipped_system();
    run(
        cases,
        (any::<u64>(), proptest::option::of(1u64..200)),
        |(seed, target)| {
            let cfg = small_sweep(seed, target);
            let in_pool = |threads: usize| {
                rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .build()
                    .unwrap()
                    .install(|| run_sweep(&system, &cfg).unwrap().to_csv())
            };
            let (a, b, c) = (in_pool(1), in_pool(4), in_pool(4));
            if a != b || b != c {
                return Err(fail("CSV differs between runs"));
            }
            Ok(())
        },
    )?;
    Ok(format!(
        "{cases} seeds: CSV identical on 1 and 4 threads and across repeats"
    ))
}

/// Per-frame counters add up to the sweep totals, and node-update counts are
/// linear in the iteration count while initialization and judgement are not
/// affected by it.
pub fn counter_additivity(cases: u32) -> Check {
    let system = shipped_system();
    run(
        cases,
        (any::<u64>(), 1usize..=6, any::<bool>()),
        |(seed, iters, dmpa)| {
            let algorithm = if dmpa {
                Algorithm::Dmpa
            } else {
                Algorithm::MaxLog
            };
            let cfg = DecoderConfig::new(algorithm, Approximation::Exact, iters);
            let decoder = Decoder::new(system.clone(), cfg.clone()).unwrap();
            let frames = 64u64;
            let snr = 8.0;
            let n0 = system.noise_density(snr);
            let mut summed = OpCounters::default();
            for i in 0..frames {
                let d = draw_frame(&system, seed, i, Fading::Awgn);
                let rx = transmit(&system, &d.frame, &d.h, n0, &d.noise, None).unwrap();
                let c = decoder.decode(&rx).unwrap().counters;
                let one = Decoder::new(
                    system.clone(),
                    DecoderConfig::new(algorithm, Approximation::Exact, 1),
                )
                .unwrap()
                .decode(&rx)
                .unwrap()
                .counters;
                let n = iters as u64;
                if c.initialization != one.initialization
                    || c.judgment != one.judgment
                    || c.resource_update != one.resource_update.scaled(n)
                    || c.layer_update != one.layer_update.scaled(n)
                {
                    return Err(fail(format!("frame {i}: counts not linear in iterations")));
                }
                summed.merge(&c);
            }
            let sweep = SweepConfig::new(vec![snr], frames, vec![Detector::Mpa(cfg)], seed);
            let result = run_sweep(&system, &sweep).unwrap();
            if *result.points[0].counters() != summed {
                return Err(fail("sweep totals differ from the per-frame sum"));
            }
            Ok(())
        },
    )?;
    Ok(format!(
        "{cases} runs: per-frame counters sum to sweep totals; updates scale with iterations"
    ))
}

/// Quantization saturates instead of wrapping, stays within half a step of
/// in-range inputs, is monotone, and a quantized decoder under extreme
/// inputs produces only finite, in-range beliefs.
pub fn saturation(cases: u32) -> Check {
    let values = prop_oneof![
        -1e6f64..1e6,
        -100.0f64..100.0,
        Just(f64::INFINITY),
        Just(f64::NEG_INFINITY),
        Just(f64::MAX),
        Just(f64::MIN),
    ];
    run(
        cases,
        (2u32..=20, 0u32..20, values.clone(), values, any::<u64>()),
        |(bits, frac, a, b, seed)| {
            let f = FixedFormat::new(bits, frac.min(bits - 1));
            let (qa, qb) = (f.quantize(a), f.quantize(b));
            for (v, q) in [(a, qa), (b, qb)] {
                let x = q.to_f64();
                if !(f.min_value()..=f.max_value()).contains(&x) {
                    return Err(fail(format!("{v} quantized out of range to {x}")));
                }
                if v >= f.min_value()
                    && v <= f.max_value()
                    && (x - v).abs() > f.resolution() / 2.0 + 1e-12
                {
                    return Err(fail(format!("{v} quantized to {x}, more than half a step")));
                }
                if v > 0.0 && x < 0.0 || v < 0.0 && x > 0.0 {
                    return Err(fail(format!("{v} changed sign to {x}")));
                }
            }
            if (a <= b) != (qa.raw() <= qb.raw()) && qa.raw() != qb.raw() {
                return Err(fail(format!("not monotone at {a}, {b}")));
            }
            let sum = qa.saturating_add(qb);
            let exact = (qa.raw() + qb.raw()).clamp(f.raw_min(), f.raw_max());
            if sum.raw() != exact {
                return Err(fail(format!(
                    "{} + {} wrapped to {}",
                    qa.raw(),
                    qb.raw(),
                    sum.raw()
                )));
            }

            let system = shipped_system();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let scale = 10f64.powf(rng.random_range(-2.0..6.0));
            let y: Vec<Complex64> = (0..system.k())
                .map(|_| {
                    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)) * scale
                })
                .collect();
            let rx = ReceivedFrame::new(y, awgn_channel(system.k()), system.noise_density(10.0))
                .unwrap();
            for algorithm in [Algorithm::Dmpa, Algorithm::MaxLog] {
                let q = Quantization::default();
                let cfg = DecoderConfig::new(algorithm, Approximation::A3, 5).with_quantization(q);
                let out = Decoder::new(system.clone(), cfg)
                    .unwrap()
                    .decode(&rx)
                    .unwrap();
                let bound =
                    system.n() as f64 * q.intermediate.max_value().max(-q.intermediate.min_value());
                if out
                    .beliefs
                    .iter()
                    .flatten()
                    .any(|v| !v.is_finite() || v.abs() > bound)
                {
                    return Err(fail(format!(
                        "{algorithm:?} produced out-of-range beliefs at scale {scale}"
                    )));
                }
            }
            Ok(())
        },
    )?;
    Ok(format!(
        "{cases} random formats and inputs: no wraparound, no out-of-range value"
    ))
}
