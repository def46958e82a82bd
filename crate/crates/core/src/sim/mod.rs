//! Monte-Carlo error-rate sweeps.
//!
//! Every frame is keyed on `(seed, frame_index)`: the symbols, unit noise and
//! (with fading) channel taps are identical across SNR points and detectors,
//! so comparisons between variants use common random numbers. Tallies are
//! integer sums, so the result does not depend on thread scheduling.

pub mod oracle;
pub mod tradeoff;

use std::fmt::Write as _;
use std::path::PathBuf;
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decoder::{Decoder, DecoderConfig};
use crate::error::{Error, Result};
use crate::metrics::OpCounters;
use crate::system::ScmaSystem;
use crate::tx::{
    awgn_channel, frame_rng, rayleigh_channel, transmit, unit_noise, DistributedMatrix, Frame,
};

pub use oracle::{ml_oracle_decode, MlOracle, DEFAULT_ORACLE_CAP};
pub use tradeoff::{crossing, tradeoff_report, tradeoff_text, Crossing, ErrorMetric, TradeoffRow};

/// Frames per parallel batch. Early stopping is only checked at batch
/// boundaries, which keeps it deterministic.
pub const BATCH: u64 = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Fading {
    /// `h = 1` on every resource.
    #[default]
    Awgn,
    /// i.i.d. `CN(0, 1)` taps per resource and frame (extension).
    Rayleigh,
}

/// Something that turns a received frame into per-user decisions.
#[derive(Debug, Clone, PartialEq)]
pub enum Detector {
    Mpa(DecoderConfig),
    MlOracle,
}

impl Detector {
    pub fn label(&self) -> String {
        match self {
            Detector::Mpa(cfg) => cfg.label(),
            Detector::MlOracle => "ml-oracle".to_string(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    /// Eb/N0 points in dB.
    pub snr_db: Vec<f64>,
    /// Frame budget per point and detector.
    pub frames: u64,
    /// Stop a point early once this many block errors are seen.
    pub target_errors: Option<u64>,
    pub detectors: Vec<Detector>,
    pub seed: u64,
    pub fading: Fading,
    pub noise_reduction: Option<Arc<DistributedMatrix>>,
    pub oracle_cap: u128,
    pub output: Option<PathBuf>,
}

impl SweepConfig {
    pub fn new(snr_db: Vec<f64>, frames: u64, detectors: Vec<Detector>, seed: u64) -> Self {
        Self {
            snr_db,
            frames,
            target_errors: None,
            detectors,
            seed,
            fading: Fading::Awgn,
            noise_reduction: None,
            oracle_cap: DEFAULT_ORACLE_CAP,
            output: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.frames == 0 {
            return Err(Error::Config("frames must be at least 1".into()));
        }
        if self.snr_db.is_empty() {
            return Err(Error::Config("SNR list is empty".into()));
        }
        if let Some(bad) = self.snr_db.iter().find(|s| !s.is_finite()) {
            return Err(Error::Config(format!("SNR point {bad} is not finite")));
        }
        if self.detectors.is_empty() {
            return Err(Error::Config("no detector variants configured".into()));
        }
        if self.target_errors == Some(0) {
            return Err(Error::Config(
                "target error count must be at least 1".into(),
            ));
        }
        for d in &self.detectors {
            if let Detector::Mpa(cfg) = d {
                cfg.validate()?;
            }
        }
        Ok(())
    }
}

/// Parses `A:B:STEP` (inclusive of `B` up to rounding) or a single value.
pub fn parse_snr_range(text: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    let num = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|_| Error::Config(format!("bad SNR value '{s}' in '{text}'")))
    };
    match parts.as_slice() {
        [a] => Ok(vec![num(a)?]),
        [a, b, step] => {
            let (a, b, step) = (num(a)?, num(b)?, num(step)?);
            if !(step > 0.0) || b < a {
                return Err(Error::Config(format!(
                    "SNR range '{text}' needs A ≤ B and STEP > 0"
                )));
            }
            let count = ((b - a) / step + 1e-9).floor() as usize + 1;
            // Round to the step's precision so 0.1 steps print cleanly.
            Ok((0..count)
                .map(|i| ((a + i as f64 * step) * 1e9).round() / 1e9)
                .collect())
        }
        _ => Err(Error::Config(format!(
            "SNR range '{text}' must be A:B:STEP or a single value"
        ))),
    }
}

/// Symbols, unit noise and channel of one frame.
pub struct FrameDraw {
    pub frame: Frame,
    pub noise: Vec<Complex64>,
    pub h: Vec<Complex64>,
}

/// Deterministic draw of frame `index`.
pub fn draw_frame(system: &ScmaSystem, seed: u64, index: u64, fading: Fading) -> FrameDraw {
    let mut rng = frame_rng(seed, index);
    let symbols = (0..system.j())
        .map(|_| rng.random_range(0..system.m()))
        .collect();
    let noise = unit_noise(system.k(), &mut rng);
    let h = match fading {
        Fading::Awgn => awgn_channel(system.k()),
        Fading::Rayleigh => rayleigh_channel(system.k(), &mut rng),
    };
    FrameDraw {
        frame: Frame::new(system, symbols).expect("indices drawn in range"),
        noise,
        h,
    }
}

/// Error and complexity tally for one (SNR, detector) point.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Tally {
    pub frames: u64,
    pub block_errors: u64,
    pub symbol_errors: u64,
    pub bit_errors: u64,
    pub user_symbol_errors: Vec<u64>,
    pub iterations: u64,
    pub max_iterations: u64,
    pub underflow_fallbacks: u64,
    #[serde(skip)]
    pub counters: OpCounters,
}

impl Tally {
    fn merge(mut self, other: Tally) -> Tally {
        self.frames += other.frames;
        self.block_errors += other.block_errors;
        self.symbol_errors += other.symbol_errors;
        self.bit_errors += other.bit_errors;
        if self.user_symbol_errors.len() < other.user_symbol_errors.len() {
            self.user_symbol_errors
                .resize(other.user_symbol_errors.len(), 0);
        }
        for (a, b) in self
            .user_symbol_errors
            .iter_mut()
            .zip(&other.user_symbol_errors)
        {
            *a += b;
        }
        self.iterations += other.iterations;
        self.max_iterations = self.max_iterations.max(other.max_iterations);
        self.underflow_fallbacks += other.underflow_fallbacks;
        self.counters.merge(&other.counters);
        self
    }

    fn record(&mut self, sent: &[usize], decided: &[usize], bits_per_symbol: usize) {
        self.frames += 1;
        if self.user_symbol_errors.len() < sent.len() {
            self.user_symbol_errors.resize(sent.len(), 0);
        }
        let mut wrong = 0;
        for (j, (&s, &d)) in sent.iter().zip(decided).enumerate() {
            if s != d {
                wrong += 1;
                self.user_symbol_errors[j] += 1;
                self.bit_errors += ((s ^ d) & ((1 << bits_per_symbol) - 1)).count_ones() as u64;
            }
        }
        self.symbol_errors += wrong;
        if wrong > 0 {
            self.block_errors += 1;
        }
    }
}

/// 95% normal-approximation half-width `1.96·√(p(1−p)/n)`.
pub fn ci95(p: f64, n: u64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    1.96 * (p * (1.0 - p) / n as f64).sqrt()
}

/// Result of one (SNR, detector) point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimPoint {
    pub snr_db: f64,
    pub n0: f64,
    pub variant: String,
    pub users: usize,
    pub bits_per_symbol: usize,
    pub tally: Tally,
}

impl SimPoint {
    pub fn frames(&self) -> u64 {
        self.tally.frames
    }

    pub fn bler(&self) -> f64 {
        rate(self.tally.block_errors, self.tally.frames)
    }

    pub fn bler_ci95(&self) -> f64 {
        ci95(self.bler(), self.tally.frames)
    }

    pub fn ser(&self) -> f64 {
        rate(
            self.tally.symbol_errors,
            self.tally.frames * self.users as u64,
        )
    }

    pub fn ser_ci95(&self) -> f64 {
        ci95(self.ser(), self.tally.frames * self.users as u64)
    }

    pub fn ber(&self) -> f64 {
        rate(
            self.tally.bit_errors,
            self.tally.frames * (self.users * self.bits_per_symbol) as u64,
        )
    }

    pub fn ber_ci95(&self) -> f64 {
        ci95(
            self.ber(),
            self.tally.frames * (self.users * self.bits_per_symbol) as u64,
        )
    }

    pub fn user_ser(&self) -> Vec<f64> {
        self.tally
            .user_symbol_errors
            .iter()
            .map(|&e| rate(e, self.tally.frames))
            .collect()
    }

    pub fn mean_iterations(&self) -> f64 {
        rate(self.tally.iterations, self.tally.frames)
    }

    pub fn counters(&self) -> &OpCounters {
        &self.tally.counters
    }
}

fn rate(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// All points of a sweep, SNR-major then detector order.
#[derive(Debug, Clone)]
pub struct SimResult {
    pub points: Vec<SimPoint>,
    pub header: Vec<String>,
}

impl SimResult {
    pub fn variant(&self, label: &str) -> Vec<&SimPoint> {
        self.points.iter().filter(|p| p.variant == label).collect()
    }

    pub fn variants(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for p in &self.points {
            if !out.contains(&p.variant) {
                out.push(p.variant.clone());
            }
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        for line in &self.header {
            let _ = writeln!(s, "# {line}");
        }
        s.push_str(CSV_COLUMNS);
        s.push('\n');
        for p in &self.points {
            let t = p.counters().total();
            let _ = writeln!(
                s,
                "{},{},{},{},{:.6e},{:.6e},{:.6e},{:.6e},{:.4},{},{},{},{},{},{},{}",
                p.snr_db,
                p.variant,
                p.frames(),
                p.tally.block_errors,
                p.bler(),
                p.bler_ci95(),
                p.ser(),
                p.ber(),
                p.mean_iterations(),
                p.tally.max_iterations,
                t.add,
                t.mul,
                t.div,
                t.exp,
                t.max,
                t.swop
            );
        }
        s
    }
}

pub const CSV_COLUMNS: &str =
    "snr_db,variant,frames,block_errors,bler,bler_ci95,ser,ber,mean_iters,max_iters,add,mul,div,exp,max,swop";

fn header(system: &ScmaSystem, cfg: &SweepConfig) -> Vec<String> {
    let mut h = vec![
        format!(
            "system: K={} N={} M={} J={} overloading={}",
            system.k(),
            system.n(),
            system.m(),
            system.j(),
            system.overloading()
        ),
        format!(
            "snr axis: Eb/N0 [dB]; Eb = E_res*K/(J*log2 M) = {:.6}; E_res = mean transmit energy per resource = {:.6}",
            system.energy_per_bit(),
            system.energy_per_resource()
        ),
        "noise: N0 = Eb / 10^(snr_db/10), total complex noise variance per resource (N0/2 per real axis)".into(),
        format!("seed: {}", cfg.seed),
        format!(
            "frames: {} per point{}",
            cfg.frames,
            cfg.target_errors.map_or(String::new(), |t| format!(", stop after {t} block errors"))
        ),
        format!("channel: {:?}", cfg.fading).to_lowercase(),
        format!(
            "noise_reduction: {}",
            cfg.noise_reduction.as_ref().map_or("off".into(), |d| format!("{}x{} matrix", d.dim(), d.dim()))
        ),
        "block: one frame of all J user symbols; bler_ci95 = 1.96*sqrt(p(1-p)/frames)".into(),
        "ops: per-procedure counts summed over all frames of the point".into(),
    ];
    for d in &cfg.detectors {
        match d {
            Detector::Mpa(c) => h.push(format!(
                "variant {}: {}",
                c.label(),
                serde_json::to_string(c).expect("config serializes")
            )),
            Detector::MlOracle => h.push(format!(
                "variant ml-oracle: exhaustive joint ML, cap {}",
                cfg.oracle_cap
            )),
        }
    }
    h
}

enum Prepared {
    Mpa(Decoder, DecoderConfig),
    Oracle(MlOracle),
}

/// Runs the sweep and, if an output path is set, writes the CSV.
pub fn run_sweep(system: &ScmaSystem, cfg: &SweepConfig) -> Result<SimResult> {
    cfg.validate()?;
    if let Some(d) = &cfg.noise_reduction {
        if d.dim() != system.k() {
            return Err(Error::DimensionMismatch(format!(
                "distributed matrix is {}x{}, system has K = {}",
                d.dim(),
                d.dim(),
                system.k()
            )));
        }
    }
    let mut decoders = Vec::with_capacity(cfg.detectors.len());
    for d in &cfg.detectors {
        decoders.push(match d {
            Detector::Mpa(c) => Some(Decoder::new(system.clone(), c.clone())?),
            Detector::MlOracle => None,
        });
    }
    let oracle = if cfg.detectors.contains(&Detector::MlOracle) {
        Some(MlOracle::new(system, cfg.oracle_cap)?)
    } else {
        None
    };

    let mut points = Vec::new();
    for &snr in &cfg.snr_db {
        let n0 = system.noise_density(snr);
        for (d, dec) in cfg.detectors.iter().zip(&decoders) {
            let prepared = match (d, dec) {
                (Detector::Mpa(c), Some(dec)) => Prepared::Mpa(dec.clone(), c.for_snr(snr)),
                _ => Prepared::Oracle(oracle.clone().expect("oracle built")),
            };
            let tally = run_point(system, cfg, n0, &prepared)?;
            points.push(SimPoint {
                snr_db: snr,
                n0,
                variant: d.label(),
                users: system.j(),
                bits_per_symbol: system.bits_per_symbol(),
                tally,
            });
        }
    }
    let result = SimResult {
        points,
        header: header(system, cfg),
    };
    if let Some(path) = &cfg.output {
        std::fs::write(path, result.to_csv())?;
    }
    Ok(result)
}

fn run_point(system: &ScmaSystem, cfg: &SweepConfig, n0: f64, det: &Prepared) -> Result<Tally> {
    let bps = system.bits_per_symbol();
    let mut total = Tally::default();
    let mut start = 0;
    while start < cfg.frames {
        let end = (start + BATCH).min(cfg.frames);
        let batch = (start..end)
            .into_par_iter()
            .map(|i| -> Result<Tally> {
                let draw = draw_frame(system, cfg.seed, i, cfg.fading);
                let rx = transmit(
                    system,
                    &draw.frame,
                    &draw.h,
                    n0,
                    &draw.noise,
                    cfg.noise_reduction.as_ref(),
                )?;
                let mut t = Tally::default();
                match det {
                    Prepared::Mpa(dec, c) => {
                        let out = dec.decode_with(&rx, c)?;
                        t.record(draw.frame.symbols(), &out.decisions, bps);
                        t.iterations = out.iterations as u64;
                        t.max_iterations = out.iterations as u64;
                        t.underflow_fallbacks = out.underflow_fallbacks;
                        t.counters = out.counters;
                    }
                    Prepared::Oracle(o) => {
                        let decided = o.decode(&rx)?;
                        t.record(draw.frame.symbols(), &decided, bps);
                    }
                }
                Ok(t)
            })
            .try_reduce(Tally::default, |a, b| Ok(a.merge(b)))?;
        total = total.merge(batch);
        start = end;
        if cfg.target_errors.is_some_and(|t| total.block_errors >= t) {
            break;
        }
    }
    Ok(total)
}
