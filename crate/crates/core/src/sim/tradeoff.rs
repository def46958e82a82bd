//! Minimum SNR to reach a target error rate, against mean iterations.

use std::fmt;

use super::SimPoint;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorMetric {
    Bler,
    Ser,
    Ber,
}

impl ErrorMetric {
    fn of(&self, p: &SimPoint) -> f64 {
        match self {
            ErrorMetric::Bler => p.bler(),
            ErrorMetric::Ser => p.ser(),
            ErrorMetric::Ber => p.ber(),
        }
    }

    fn trials(&self, p: &SimPoint) -> u64 {
        let f = p.frames();
        match self {
            ErrorMetric::Bler => f,
            ErrorMetric::Ser => f * p.users as u64,
            ErrorMetric::Ber => f * (p.users * p.bits_per_symbol) as u64,
        }
    }
}

/// Where a curve crosses the target rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Crossing {
    /// Interpolated SNR in dB and the mean iteration count there.
    At { snr_db: f64, mean_iterations: f64 },
    /// Already at or below the target at the lowest SNR simulated.
    BelowRange,
    /// Never at or below the target.
    NotReached,
}

impl Crossing {
    pub fn snr_db(&self) -> Option<f64> {
        match self {
            Crossing::At { snr_db, .. } => Some(*snr_db),
            _ => None,
        }
    }
}

impl fmt::Display for Crossing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Crossing::At {
                snr_db,
                mean_iterations,
            } => write!(f, "{snr_db:.3} dB @ {mean_iterations:.3} iters"),
            Crossing::BelowRange => f.write_str("below range"),
            Crossing::NotReached => f.write_str("not reached"),
        }
    }
}

/// Linear interpolation in (dB, log10 rate) of the first downward crossing
/// of `target`. Points must belong to one variant. A rate of zero is floored
/// at `0.5 / trials` so the logarithm stays finite.
pub fn crossing(points: &[&SimPoint], metric: ErrorMetric, target: f64) -> Crossing {
    let mut pts: Vec<&SimPoint> = points.to_vec();
    pts.sort_by(|a, b| a.snr_db.total_cmp(&b.snr_db));
    let log_rate = |p: &SimPoint| {
        let r = metric.of(p);
        let floor = 0.5 / metric.trials(p).max(1) as f64;
        r.max(floor).log10()
    };
    let Some(first) = pts.first() else {
        return Crossing::NotReached;
    };
    if metric.of(first) <= target {
        return Crossing::BelowRange;
    }
    let lt = target.log10();
    for w in pts.windows(2) {
        let (a, b) = (w[0], w[1]);
        if metric.of(b) <= target {
            let (la, lb) = (log_rate(a), log_rate(b));
            let frac = if la == lb { 1.0 } else { (la - lt) / (la - lb) };
            let snr = a.snr_db + frac * (b.snr_db - a.snr_db);
            let iters = a.mean_iterations() + frac * (b.mean_iterations() - a.mean_iterations());
            return Crossing::At {
                snr_db: snr,
                mean_iterations: iters,
            };
        }
    }
    Crossing::NotReached
}

#[derive(Debug, Clone, PartialEq)]
pub struct TradeoffRow {
    pub variant: String,
    pub crossing: Crossing,
}

/// One row per variant, in order of first appearance.
pub fn tradeoff_report(points: &[SimPoint], metric: ErrorMetric, target: f64) -> Vec<TradeoffRow> {
    let mut variants: Vec<&str> = Vec::new();
    for p in points {
        if !variants.contains(&p.variant.as_str()) {
            variants.push(&p.variant);
        }
    }
    variants
        .into_iter()
        .map(|v| {
            let pts: Vec<&SimPoint> = points.iter().filter(|p| p.variant == v).collect();
            TradeoffRow {
                variant: v.to_string(),
                crossing: crossing(&pts, metric, target),
            }
        })
        .collect()
}

/// Plain-text table of a trade-off report.
pub fn tradeoff_text(rows: &[TradeoffRow]) -> String {
    let width = rows
        .iter()
        .map(|r| r.variant.len())
        .max()
        .unwrap_or(7)
        .max(7);
    let mut s = format!(
        "{:<width$}  {:>12}  {:>10}\n",
        "variant", "snr_db", "mean_iters"
    );
    for r in rows {
        match r.crossing {
            Crossing::At {
                snr_db,
                mean_iterations,
            } => s.push_str(&format!(
                "{:<width$}  {snr_db:>12.3}  {mean_iterations:>10.3}\n",
                r.variant
            )),
            other => s.push_str(&format!(
                "{:<width$}  {:>12}  {:>10}\n",
                r.variant,
                other.to_string(),
                "-"
            )),
        }
    }
    s
}
