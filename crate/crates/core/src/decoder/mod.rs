//! Message-passing detection over the SCMA factor graph.
//!
//! One iteration is a flooding sweep: every resource node updates from the
//! previous layer-to-resource messages, then every layer node updates from
//! the fresh resource-to-layer messages.

pub mod config;
pub mod init;
pub mod kernels;
pub mod stability;
pub mod state;

use crate::error::{Error, Result};
use crate::metrics::{OpCounters, Procedure};
use crate::system::ScmaSystem;
use crate::tx::ReceivedFrame;

pub use config::{
    AdaptStep, Algorithm, Approximation, DecoderConfig, EarlyTermination, LogNormalization,
    Monitor, SelfAdaption, StabilityMeasure, DEFAULT_ALPHA, DEFAULT_BETA, DEFAULT_EPSILON,
    DEFAULT_RELATIVE_FLOOR,
};
pub use init::{init_probabilities, residual_metric, SuperpositionTable};
pub use stability::{StabilityMode, StabilityTest};
pub use state::{BeliefState, Domain, GraphLayout};

/// Outcome of decoding one frame.
#[derive(Debug, Clone)]
pub struct DecodeResult {
    /// Hard decision per user.
    pub decisions: Vec<usize>,
    /// Final `Q_{L_j}` per user, in the decoder's domain.
    pub beliefs: Vec<Vec<f64>>,
    /// Iterations actually run.
    pub iterations: usize,
    /// True when the stability test stopped the loop before `max_iterations`.
    pub converged: bool,
    pub counters: OpCounters,
    pub underflow_fallbacks: u64,
}

/// Reusable decoder for one codebook and configuration.
#[derive(Debug, Clone)]
pub struct Decoder {
    system: ScmaSystem,
    layout: GraphLayout,
    table: SuperpositionTable,
    config: DecoderConfig,
}

impl Decoder {
    pub fn new(system: ScmaSystem, config: DecoderConfig) -> Result<Self> {
        config.validate()?;
        let layout = GraphLayout::new(&system);
        let table = SuperpositionTable::new(&system, &layout, &config);
        Ok(Self {
            system,
            layout,
            table,
            config,
        })
    }

    pub fn system(&self) -> &ScmaSystem {
        &self.system
    }

    pub fn config(&self) -> &DecoderConfig {
        &self.config
    }

    pub fn layout(&self) -> &GraphLayout {
        &self.layout
    }

    pub fn decode(&self, rx: &ReceivedFrame) -> Result<DecodeResult> {
        self.decode_with(rx, &self.config)
    }

    /// Decodes with a configuration that may differ from the one the decoder
    /// was built with in its iteration and stability settings (for instance
    /// one resolved for a particular SNR). The metric and quantization settings
    /// must match, since the superposition table depends on them.
    pub fn decode_with(&self, rx: &ReceivedFrame, cfg: &DecoderConfig) -> Result<DecodeResult> {
        let k = self.system.k();
        if rx.y.len() != k || rx.h.len() != k {
            return Err(Error::DimensionMismatch(format!(
                "received frame has {} entries, system has K = {k}",
                rx.y.len()
            )));
        }
        if cfg.quantization != self.config.quantization {
            return Err(Error::Config(
                "quantization differs from the decoder's table".into(),
            ));
        }
        let mut counters = OpCounters::default();

        let (y, h) = rx.resource_domain();
        if rx.mixing.is_some() {
            let aux = counters.procedure_mut(Procedure::Auxiliary);
            aux.div += k as u64;
            aux.mul += (k * k) as u64;
            aux.add += (k * (k - 1)) as u64;
        }

        let init = {
            let mut aux = *counters.procedure(Procedure::Auxiliary);
            let p = init::init_with_table(
                &y,
                &h,
                rx.n0,
                cfg,
                &self.table,
                counters.procedure_mut(Procedure::Initialization),
                &mut aux,
            )?;
            *counters.procedure_mut(Procedure::Auxiliary) = aux;
            p
        };

        let quant = cfg.quantization.map(|q| q.intermediate);
        let max_shift = cfg.log_normalization_active() && cfg.algorithm == Algorithm::MaxLog;
        let stability = stability::StabilityTest::from_config(cfg);

        let mut state = BeliefState::new(
            cfg.algorithm.into(),
            self.system.m(),
            self.layout.num_edges(),
            init,
        );
        let mut iterations = 0;
        let mut converged = false;
        for t in 1..=cfg.max_iterations {
            iterations = t;
            for r in 0..k {
                kernels::resource_node_update(
                    &mut state,
                    &self.layout,
                    r,
                    quant,
                    counters.procedure_mut(Procedure::ResourceUpdate),
                );
            }
            for j in 0..self.system.j() {
                kernels::layer_node_update(
                    &mut state,
                    &self.layout,
                    j,
                    max_shift,
                    quant,
                    counters.procedure_mut(Procedure::LayerUpdate),
                );
            }
            if let Some(test) = &stability {
                if t >= 2 {
                    let stable = stability::check_stability_and_adapt(
                        &mut state,
                        test,
                        counters.procedure_mut(Procedure::Auxiliary),
                    );
                    if stable && t < cfg.max_iterations {
                        converged = true;
                        break;
                    }
                }
                state.snapshot();
            }
        }

        let (beliefs, decisions) = kernels::judge(
            &state,
            &self.layout,
            self.system.j(),
            counters.procedure_mut(Procedure::Judgment),
        );
        Ok(DecodeResult {
            decisions,
            beliefs,
            iterations,
            converged,
            counters,
            underflow_fallbacks: state.underflow_fallbacks,
        })
    }
}

/// One-shot decode. Builds the superposition table on every call; use
/// [`Decoder`] for repeated frames.
pub fn decode(
    rx: &ReceivedFrame,
    system: &ScmaSystem,
    config: &DecoderConfig,
) -> Result<DecodeResult> {
    Decoder::new(system.clone(), config.clone())?.decode(rx)
}
