//! The shipped reference codebook (`K = 4`, `N = 2`, `M = 4`, `J = 6`).
//!
//! These values are authored for this crate; they are not taken from any
//! standard. Every user draws from the same 4-point mother constellation
//! (QPSK at `π/4 + mπ/2`). The second support dimension relabels the points
//! with `[0, 2, 3, 1]` so that neighbours in one dimension are separated in
//! the other. On each resource the `d_f = 3` users sharing it are rotated by
//! `0`, `π/10` and `π/5` (in ascending user order), which keeps all 64
//! per-resource superpositions distinct.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::Result;
use crate::system::{lexicographic_supports, zero_rows_for_support, ScmaSystem, UserLayer};

/// Relabelling applied on the second support dimension.
pub const SECOND_DIMENSION_LABELS: [usize; 4] = [0, 2, 3, 1];

/// Per-resource rotation step between users sharing a resource.
pub const ROTATION_STEP: f64 = PI / 10.0;

/// Per-entry amplitude of the shipped file: the smallest value on a 0.1 grid
/// at which every decoder variant, including the ones that drop `N0`,
/// recovers all noiseless frames in one iteration.
pub const AMPLITUDE: f64 = 2.8;

/// Mother constellation point `m`.
pub fn mother_point(m: usize) -> Complex64 {
    Complex64::from_polar(1.0, PI / 4.0 + m as f64 * PI / 2.0)
}

/// Builds the regular `K = 4`, `N = 2` system with the given per-entry
/// amplitude.
pub fn reference_system(amplitude: f64) -> Result<ScmaSystem> {
    const K: usize = 4;
    const N: usize = 2;
    const M: usize = 4;
    let supports = lexicographic_supports(K, N);

    // Resource -> users in ascending order, known from the lexicographic supports.
    let users_on = |k: usize| -> Vec<usize> {
        supports
            .iter()
            .enumerate()
            .filter(|(_, s)| s.contains(&k))
            .map(|(j, _)| j)
            .collect()
    };

    let mut users = Vec::with_capacity(supports.len());
    for (j, support) in supports.iter().enumerate() {
        let codewords = (0..M)
            .map(|m| {
                let mut cw = vec![Complex64::new(0.0, 0.0); K];
                for (dim, &k) in support.iter().enumerate() {
                    let label = if dim == 0 {
                        m
                    } else {
                        SECOND_DIMENSION_LABELS[m]
                    };
                    let slot = users_on(k).iter().position(|&u| u == j).unwrap();
                    let rotation = Complex64::from_polar(1.0, slot as f64 * ROTATION_STEP);
                    cw[k] = mother_point(label) * rotation * amplitude;
                }
                cw
            })
            .collect();
        users.push(UserLayer::new(
            K,
            N,
            zero_rows_for_support(K, support),
            codewords,
        )?);
    }
    ScmaSystem::new(K, N, M, users)
}

/// The shipped codebook as JSON text.
pub const REFERENCE_CODEBOOK_JSON: &str = include_str!("../data/reference_codebook.json");

/// Parses the shipped codebook.
pub fn shipped_system() -> ScmaSystem {
    crate::system::load_codebook(REFERENCE_CODEBOOK_JSON).expect("shipped codebook is valid")
}
