//! Operation counting and the closed-form complexity model.
//!
//! Counting conventions (applied by every kernel in `decoder`):
//!
//! * complex additions/subtractions count as one `add`; a sign inversion is an
//!   `add` (subtraction from zero);
//! * `|r|²` of a complex residual is two `mul` (`re²`, `im²`) and one `add`;
//! * `|r|` is one `mag` (a magnitude unit; not multiplication);
//! * scaling by `1/N0` is one `mul`; `exp` is one `exp`;
//! * running maxima and sums start from a sentinel (−∞ or 0), so folding `n`
//!   candidates costs `n` `max` or `n` `add`;
//! * routing one message entry between node units is one `swop`;
//! * argmax comparisons in symbol judgement are `cmp`;
//! * per-resource codeword superpositions are a codebook-only table, built
//!   once and not counted per frame.
//!
//! The complexity table in [`ComplexityModel`] names resources `N` and users
//! `K` (the reverse of the system model); [`ModelParams`] spells both out.

use std::fmt::{self, Write as _};
use std::ops::{Add, AddAssign};

use serde::{Deserialize, Serialize};

/// Counts of each primitive operation.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OpCounts {
    pub add: u64,
    pub mul: u64,
    pub div: u64,
    pub exp: u64,
    pub max: u64,
    pub cmp: u64,
    pub swop: u64,
    pub mag: u64,
}

impl OpCounts {
    pub fn get(&self, op: Op) -> u64 {
        match op {
            Op::Add => self.add,
            Op::Mul => self.mul,
            Op::Div => self.div,
            Op::Exp => self.exp,
            Op::Max => self.max,
            Op::Cmp => self.cmp,
            Op::Swop => self.swop,
            Op::Mag => self.mag,
        }
    }

    pub fn is_zero(&self) -> bool {
        *self == Self::default()
    }

    pub fn scaled(&self, factor: u64) -> Self {
        Self {
            add: self.add * factor,
            mul: self.mul * factor,
            div: self.div * factor,
            exp: self.exp * factor,
            max: self.max * factor,
            cmp: self.cmp * factor,
            swop: self.swop * factor,
            mag: self.mag * factor,
        }
    }
}

impl Add for OpCounts {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self {
            add: self.add + o.add,
            mul: self.mul + o.mul,
            div: self.div + o.div,
            exp: self.exp + o.exp,
            max: self.max + o.max,
            cmp: self.cmp + o.cmp,
            swop: self.swop + o.swop,
            mag: self.mag + o.mag,
        }
    }
}

impl AddAssign for OpCounts {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Op {
    Add,
    Mul,
    Div,
    Exp,
    Max,
    Cmp,
    Swop,
    Mag,
}

impl Op {
    pub const ALL: [Op; 8] = [
        Op::Add,
        Op::Mul,
        Op::Div,
        Op::Exp,
        Op::Max,
        Op::Cmp,
        Op::Swop,
        Op::Mag,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Op::Add => "ADD",
            Op::Mul => "MUL",
            Op::Div => "DIV",
            Op::Exp => "EXP",
            Op::Max => "MAX",
            Op::Cmp => "CMP",
            Op::Swop => "SWOP",
            Op::Mag => "MAG",
        }
    }
}

/// Decoder stage an operation is attributed to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Procedure {
    Initialization,
    ResourceUpdate,
    LayerUpdate,
    Judgment,
    /// Stability tests, self-adaption scaling and distributed-matrix recovery.
    Auxiliary,
}

impl Procedure {
    pub const ALL: [Procedure; 5] = [
        Procedure::Initialization,
        Procedure::ResourceUpdate,
        Procedure::LayerUpdate,
        Procedure::Judgment,
        Procedure::Auxiliary,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Procedure::Initialization => "initialization",
            Procedure::ResourceUpdate => "resource_update",
            Procedure::LayerUpdate => "layer_update",
            Procedure::Judgment => "judgment",
            Procedure::Auxiliary => "auxiliary",
        }
    }
}

/// Per-procedure counters. Merging is componentwise addition.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpCounters {
    pub initialization: OpCounts,
    pub resource_update: OpCounts,
    pub layer_update: OpCounts,
    pub judgment: OpCounts,
    pub auxiliary: OpCounts,
}

impl OpCounters {
    pub fn procedure(&self, p: Procedure) -> &OpCounts {
        match p {
            Procedure::Initialization => &self.initialization,
            Procedure::ResourceUpdate => &self.resource_update,
            Procedure::LayerUpdate => &self.layer_update,
            Procedure::Judgment => &self.judgment,
            Procedure::Auxiliary => &self.auxiliary,
        }
    }

    pub fn procedure_mut(&mut self, p: Procedure) -> &mut OpCounts {
        match p {
            Procedure::Initialization => &mut self.initialization,
            Procedure::ResourceUpdate => &mut self.resource_update,
            Procedure::LayerUpdate => &mut self.layer_update,
            Procedure::Judgment => &mut self.judgment,
            Procedure::Auxiliary => &mut self.auxiliary,
        }
    }

    /// Sum over all procedures.
    pub fn total(&self) -> OpCounts {
        Procedure::ALL
            .iter()
            .fold(OpCounts::default(), |acc, &p| acc + *self.procedure(p))
    }

    pub fn merge(&mut self, other: &OpCounters) {
        for p in Procedure::ALL {
            *self.procedure_mut(p) += *other.procedure(p);
        }
    }
}

impl Add for OpCounters {
    type Output = Self;
    fn add(mut self, o: Self) -> Self {
        self.merge(&o);
        self
    }
}

/// Columns of the complexity comparison table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ComplexityModel {
    /// Max-Log with the square- and division-free initial metric.
    MaxLogA3,
    /// Probability-domain DMPA.
    Dmpa,
    /// Max-Log with the exact initial metric.
    MaxLog,
    /// Pruned-tree DMPA. Reported only; no decoder realizes it.
    PrunedDmpa,
}

impl ComplexityModel {
    pub const ALL: [ComplexityModel; 4] = [
        ComplexityModel::MaxLogA3,
        ComplexityModel::Dmpa,
        ComplexityModel::MaxLog,
        ComplexityModel::PrunedDmpa,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ComplexityModel::MaxLogA3 => "maxlog-a3",
            ComplexityModel::Dmpa => "dmpa",
            ComplexityModel::MaxLog => "max-log",
            ComplexityModel::PrunedDmpa => "pruned-dmpa",
        }
    }
}

/// Parameters of the closed forms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Alphabet size `M`.
    pub m: u64,
    /// Physical resources (the table's `N`, the system model's `K`).
    pub resources: u64,
    /// Users (the table's `K`, the system model's `J`).
    pub users: u64,
    /// Iteration divisor amortising initialization.
    pub iterations: f64,
}

/// Predicted counts of the operations a column lists, per procedure.
///
/// Initialization is amortised over `T` iterations; resource and layer
/// updates are per iteration; judgement is per decode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub model: ComplexityModel,
    pub entries: Vec<(Procedure, Op, f64)>,
}

impl Prediction {
    pub fn get(&self, p: Procedure, op: Op) -> Option<f64> {
        self.entries
            .iter()
            .find(|(pp, o, _)| *pp == p && *o == op)
            .map(|(_, _, v)| *v)
    }
}

/// Evaluates one column of the complexity table.
pub fn predict(model: ComplexityModel, params: ModelParams) -> Prediction {
    use ComplexityModel::*;
    use Op::*;
    use Procedure::*;
    let m = params.m as f64;
    let n = params.resources as f64;
    let k = params.users as f64;
    let t = params.iterations;
    let m3n = m * m * m * n;
    let mk = m * k;
    let entries = match model {
        MaxLogA3 => vec![
            (Initialization, Add, 2.0 * m3n / t),
            (Initialization, Mul, 0.0),
            (Initialization, Exp, 0.0),
            (ResourceUpdate, Add, 2.0 * 3.0 * m3n),
            (ResourceUpdate, Mul, 0.0),
            (ResourceUpdate, Max, 3.0 * m3n),
            (LayerUpdate, Add, 0.0),
            (LayerUpdate, Mul, 0.0),
            (LayerUpdate, Swop, 2.0 * mk),
            (Judgment, Add, mk),
            (Judgment, Mul, 0.0),
            (Judgment, Max, 0.0),
        ],
        Dmpa | PrunedDmpa => vec![
            (Initialization, Add, 3.0 * m3n / t),
            (Initialization, Mul, 3.0 * m3n / t),
            (Initialization, Exp, m3n / t),
            (ResourceUpdate, Add, 3.0 * m3n),
            (ResourceUpdate, Mul, 2.0 * 3.0 * m3n),
            (ResourceUpdate, Max, 0.0),
            (LayerUpdate, Add, 2.0 * mk),
            (LayerUpdate, Mul, 2.0 * mk),
            (LayerUpdate, Swop, 2.0 * mk),
            (Judgment, Add, 0.0),
            (Judgment, Mul, mk),
            (Judgment, Max, mk),
        ],
        MaxLog => vec![
            (Initialization, Add, 3.0 * m3n / t),
            (Initialization, Mul, 3.0 * m3n / t),
            (Initialization, Exp, 0.0),
            (ResourceUpdate, Add, 2.0 * 3.0 * m3n),
            (ResourceUpdate, Mul, 0.0),
            (ResourceUpdate, Max, 3.0 * m3n),
            (LayerUpdate, Add, 0.0),
            (LayerUpdate, Mul, 0.0),
            (LayerUpdate, Swop, 2.0 * mk),
            (Judgment, Add, mk),
            (Judgment, Mul, 0.0),
            (Judgment, Max, 0.0),
        ],
    };
    Prediction { model, entries }
}

/// Measured counts folded onto the operations a column names.
///
/// The DMPA column books layer-update normalisation divisions under `MUL`
/// and symbol-judgement comparisons under `MAX`; the fold mirrors that.
pub fn measured_as(model: ComplexityModel, counters: &OpCounters, p: Procedure, op: Op) -> u64 {
    let c = counters.procedure(p);
    let dmpa_like = matches!(model, ComplexityModel::Dmpa | ComplexityModel::PrunedDmpa);
    match (dmpa_like, p, op) {
        (true, Procedure::LayerUpdate, Op::Mul) => c.mul + c.div,
        (true, Procedure::Judgment, Op::Max) => c.max + c.cmp,
        _ => c.get(op),
    }
}

/// What an audited run did.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunShape {
    pub m: u64,
    pub resources: u64,
    pub users: u64,
    pub frames: u64,
    /// Iterations summed over all frames.
    pub iterations: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditRow {
    pub procedure: Procedure,
    pub op: Op,
    pub predicted: f64,
    pub measured: u64,
}

impl AuditRow {
    pub fn matches(&self) -> bool {
        (self.predicted - self.measured as f64).abs() < 1e-6
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub model: ComplexityModel,
    pub shape: RunShape,
    pub rows: Vec<AuditRow>,
}

impl AuditReport {
    pub fn mismatches(&self) -> Vec<&AuditRow> {
        self.rows.iter().filter(|r| !r.matches()).collect()
    }

    pub fn is_exact(&self) -> bool {
        self.rows.iter().all(AuditRow::matches)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "audit against {} (M={}, resources={}, users={}, frames={}, iterations={})",
            self.model.name(),
            self.shape.m,
            self.shape.resources,
            self.shape.users,
            self.shape.frames,
            self.shape.iterations
        );
        let _ = writeln!(
            out,
            "{:<16} {:<5} {:>14} {:>14}  status",
            "procedure", "op", "predicted", "measured"
        );
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:<16} {:<5} {:>14} {:>14}  {}",
                r.procedure.name(),
                r.op.name(),
                fmt_count(r.predicted),
                r.measured,
                if r.matches() { "ok" } else { "MISMATCH" }
            );
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("model,procedure,op,predicted,measured,match\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                self.model.name(),
                r.procedure.name(),
                r.op.name(),
                fmt_count(r.predicted),
                r.measured,
                r.matches()
            );
        }
        out
    }
}

fn fmt_count(v: f64) -> String {
    if v.fract() == 0.0 {
        format!("{}", v as i64)
    } else {
        format!("{v:.3}")
    }
}

impl fmt::Display for AuditReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Compares measured totals with the closed forms scaled to the run:
/// initialization and judgement once per frame, node updates once per
/// executed iteration.
pub fn audit(counters: &OpCounters, model: ComplexityModel, shape: RunShape) -> AuditReport {
    let per_iteration = predict(
        model,
        ModelParams {
            m: shape.m,
            resources: shape.resources,
            users: shape.users,
            iterations: 1.0,
        },
    );
    let rows = per_iteration
        .entries
        .iter()
        .map(|&(procedure, op, value)| {
            let scale = match procedure {
                Procedure::Initialization | Procedure::Judgment => shape.frames,
                _ => shape.iterations,
            } as f64;
            AuditRow {
                procedure,
                op,
                predicted: value * scale,
                measured: measured_as(model, counters, procedure, op),
            }
        })
        .collect();
    AuditReport { model, shape, rows }
}
