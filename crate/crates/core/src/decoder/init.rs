use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::metrics::OpCounts;
use crate::system::ScmaSystem;
use crate::tx::ReceivedFrame;

use super::config::{Algorithm, Approximation, DecoderConfig};
use super::state::GraphLayout;

/// Codeword superpositions `Σ x` for every symbol combination at every
/// resource. Depends only on the codebook.
#[derive(Debug, Clone, PartialEq)]
pub struct SuperpositionTable {
    sums: Vec<Vec<Complex64>>,
}

impl SuperpositionTable {
    pub fn new(system: &ScmaSystem, layout: &GraphLayout, cfg: &DecoderConfig) -> Self {
        let snap_in = |v: f64| cfg.quantization.map_or(v, |q| q.input.snap(v));
        let snap_mid = |v: f64| cfg.quantization.map_or(v, |q| q.intermediate.snap(v));
        let sums = (0..system.k())
            .map(|k| {
                let users = system.graph().users_of(k);
                layout
                    .combinations(users.len())
                    .iter()
                    .map(|digits| {
                        let s: Complex64 = users
                            .iter()
                            .zip(digits)
                            .map(|(&j, &m)| {
                                let x = system.user(j).codeword(m)[k];
                                Complex64::new(snap_in(x.re), snap_in(x.im))
                            })
                            .sum();
                        Complex64::new(snap_mid(s.re), snap_mid(s.im))
                    })
                    .collect()
            })
            .collect();
        Self { sums }
    }

    pub fn resource(&self, k: usize) -> &[Complex64] {
        &self.sums[k]
    }
}

/// Metric of one residual, counted into `ops`.
#[inline]
fn metric(residual: Complex64, cfg: &DecoderConfig, inv_n0: f64, ops: &mut OpCounts) -> f64 {
    let base = if cfg.approximation.squared() {
        ops.mul += 2;
        ops.add += 1;
        residual.norm_sqr()
    } else {
        ops.mag += 1;
        residual.norm()
    };
    let scaled = if cfg.approximation.uses_noise_density() {
        ops.mul += 1;
        base * inv_n0
    } else {
        base
    };
    ops.add += 1; // sign
    match cfg.algorithm {
        Algorithm::MaxLog => -scaled,
        Algorithm::Dmpa => {
            ops.exp += 1;
            (-scaled).exp()
        }
    }
}

/// Initial metric table `P_k` for every resource, in combination order.
///
/// `y`/`h` are the resource-domain received vector and channel.
pub(crate) fn init_with_table(
    y: &[Complex64],
    h: &[Complex64],
    n0: f64,
    cfg: &DecoderConfig,
    table: &SuperpositionTable,
    ops: &mut OpCounts,
    aux: &mut OpCounts,
) -> Result<Vec<Vec<f64>>> {
    if cfg.approximation.uses_noise_density() && !(n0 > 0.0) {
        return Err(Error::Config(format!(
            "{} metric needs a positive noise density, got {n0}",
            cfg.approximation.name()
        )));
    }
    let inv_n0 = if cfg.approximation.uses_noise_density() {
        ops.div += 1;
        1.0 / n0
    } else {
        0.0
    };
    let snap_in = |v: f64| cfg.quantization.map_or(v, |q| q.input.snap(v));
    let snap_mid = |v: f64| cfg.quantization.map_or(v, |q| q.intermediate.snap(v));
    let unit = Complex64::new(1.0, 0.0);

    let mut out = Vec::with_capacity(y.len());
    for (k, (&yk, &hk)) in y.iter().zip(h).enumerate() {
        let yk = Complex64::new(snap_in(yk.re), snap_in(yk.im));
        let sums = table.resource(k);
        let mut p = Vec::with_capacity(sums.len());
        for &s in sums {
            let s = if hk == unit {
                s
            } else {
                aux.mul += 1;
                s * hk
            };
            ops.add += 1;
            let r = yk - s;
            p.push(snap_mid(metric(r, cfg, inv_n0, ops)));
        }
        out.push(p);
    }
    Ok(out)
}

/// Initial metrics for a received frame.
pub fn init_probabilities(
    rx: &ReceivedFrame,
    system: &ScmaSystem,
    cfg: &DecoderConfig,
) -> Result<Vec<Vec<f64>>> {
    cfg.validate()?;
    if rx.y.len() != system.k() {
        return Err(Error::DimensionMismatch(format!(
            "received vector has {} entries, system has K = {}",
            rx.y.len(),
            system.k()
        )));
    }
    let layout = GraphLayout::new(system);
    let table = SuperpositionTable::new(system, &layout, cfg);
    let (y, h) = rx.resource_domain();
    let mut ops = OpCounts::default();
    let mut aux = OpCounts::default();
    init_with_table(&y, &h, rx.n0, cfg, &table, &mut ops, &mut aux)
}

/// Metric of a single residual (no counting, no quantization).
pub fn residual_metric(
    residual: Complex64,
    algorithm: Algorithm,
    approximation: Approximation,
    n0: f64,
) -> f64 {
    let cfg = DecoderConfig::new(algorithm, approximation, 1);
    let mut ops = OpCounts::default();
    metric(residual, &cfg, 1.0 / n0, &mut ops)
}
