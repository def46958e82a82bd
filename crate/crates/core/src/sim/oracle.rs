//! Exhaustive joint maximum-likelihood detection.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::system::ScmaSystem;
use crate::tx::ReceivedFrame;

/// Default refusal threshold on the number of joint hypotheses `M^J`.
pub const DEFAULT_ORACLE_CAP: u128 = 1 << 20;

/// Joint ML detector. Precomputes nothing that depends on the received
/// frame, so one instance serves any number of frames.
#[derive(Debug, Clone)]
pub struct MlOracle {
    m: usize,
    j: usize,
    /// Per resource: its users in ascending order.
    users_on: Vec<Vec<usize>>,
    /// Per resource, per user-combination: the noiseless superposition.
    sums: Vec<Vec<Complex64>>,
}

impl MlOracle {
    pub fn new(system: &ScmaSystem, cap: u128) -> Result<Self> {
        let hypotheses = (system.m() as u128)
            .checked_pow(system.j() as u32)
            .unwrap_or(u128::MAX);
        if hypotheses > cap {
            return Err(Error::OracleTooLarge { hypotheses, cap });
        }
        let m = system.m();
        let users_on: Vec<Vec<usize>> = (0..system.k())
            .map(|k| system.graph().users_of(k).to_vec())
            .collect();
        let sums = users_on
            .iter()
            .enumerate()
            .map(|(k, users)| {
                (0..m.pow(users.len() as u32))
                    .map(|mut c| {
                        let mut s = Complex64::new(0.0, 0.0);
                        for &j in users.iter().rev() {
                            s += system.user(j).codeword(c % m)[k];
                            c /= m;
                        }
                        s
                    })
                    .collect()
            })
            .collect();
        Ok(Self {
            m,
            j: system.j(),
            users_on,
            sums,
        })
    }

    /// `argmin_frame Σ_k |y_k − h_k Σ_j x_j,k|²`, ties toward the
    /// lexicographically smallest frame (user 0 most significant).
    pub fn decode(&self, rx: &ReceivedFrame) -> Result<Vec<usize>> {
        let (y, h) = rx.resource_domain();
        if y.len() != self.users_on.len() {
            return Err(Error::DimensionMismatch(format!(
                "received frame has {} entries, system has K = {}",
                y.len(),
                self.users_on.len()
            )));
        }
        // Distance of every per-resource combination; a joint hypothesis is a
        // sum of K lookups.
        let dist: Vec<Vec<f64>> = self
            .sums
            .iter()
            .enumerate()
            .map(|(k, sums)| sums.iter().map(|&s| (y[k] - h[k] * s).norm_sqr()).collect())
            .collect();

        let mut symbols = vec![0usize; self.j];
        let mut best = vec![0usize; self.j];
        let mut best_metric = f64::INFINITY;
        loop {
            let mut metric = 0.0;
            for (k, users) in self.users_on.iter().enumerate() {
                let mut c = 0;
                for &j in users {
                    c = c * self.m + symbols[j];
                }
                metric += dist[k][c];
            }
            if metric < best_metric {
                best_metric = metric;
                best.copy_from_slice(&symbols);
            }
            // Odometer with the last user least significant: lexicographic order.
            let mut pos = self.j;
            loop {
                if pos == 0 {
                    return Ok(best);
                }
                pos -= 1;
                symbols[pos] += 1;
                if symbols[pos] < self.m {
                    break;
                }
                symbols[pos] = 0;
            }
        }
    }
}

/// One-shot exhaustive ML decode with the default cap.
pub fn ml_oracle_decode(rx: &ReceivedFrame, system: &ScmaSystem) -> Result<Vec<usize>> {
    MlOracle::new(system, DEFAULT_ORACLE_CAP)?.decode(rx)
}
