//! Transmit chain: bit/symbol mapping, SCMA encoding, synchronous layer
//! multiplexing over a shared channel, and the distributed-matrix mixing used
//! for initial noise reduction.

use std::fs;
use std::path::Path;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::system::ScmaSystem;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// One symbol index per user.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Frame {
    symbols: Vec<usize>,
}

impl Frame {
    pub fn new(system: &ScmaSystem, symbols: Vec<usize>) -> Result<Self> {
        if symbols.len() != system.j() {
            return Err(Error::DimensionMismatch(format!(
                "frame has {} symbols, system has {} users",
                symbols.len(),
                system.j()
            )));
        }
        for (user, &index) in symbols.iter().enumerate() {
            if index >= system.m() {
                return Err(Error::SymbolOutOfRange {
                    user,
                    index,
                    m: system.m(),
                });
            }
        }
        Ok(Self { symbols })
    }

    /// Maps `J · log2 M` bits to symbols, most significant bit first.
    pub fn from_bits(system: &ScmaSystem, bits: &[bool]) -> Result<Self> {
        let width = system.bits_per_symbol();
        if bits.len() != width * system.j() {
            return Err(Error::DimensionMismatch(format!(
                "{} bits supplied, frame carries {}",
                bits.len(),
                width * system.j()
            )));
        }
        let symbols = bits
            .chunks(width)
            .map(|chunk| chunk.iter().fold(0usize, |acc, &b| (acc << 1) | b as usize))
            .collect();
        Self::new(system, symbols)
    }

    /// Inverse of [`Frame::from_bits`].
    pub fn to_bits(&self, bits_per_symbol: usize) -> Vec<bool> {
        self.symbols
            .iter()
            .flat_map(|&s| (0..bits_per_symbol).rev().map(move |b| (s >> b) & 1 == 1))
            .collect()
    }

    /// Frame number `index` in lexicographic order, user 0 most significant.
    pub fn from_index(system: &ScmaSystem, mut index: usize) -> Self {
        let mut symbols = vec![0; system.j()];
        for slot in symbols.iter_mut().rev() {
            *slot = index % system.m();
            index /= system.m();
        }
        Self { symbols }
    }

    pub fn symbols(&self) -> &[usize] {
        &self.symbols
    }

    pub fn into_symbols(self) -> Vec<usize> {
        self.symbols
    }
}

/// Per-user codewords `x_j` for a frame.
pub fn encode(system: &ScmaSystem, frame: &Frame) -> Result<Vec<Vec<Complex64>>> {
    if frame.symbols.len() != system.j() {
        return Err(Error::DimensionMismatch("frame/user count".into()));
    }
    frame
        .symbols
        .iter()
        .enumerate()
        .map(|(user, &m)| {
            if m >= system.m() {
                return Err(Error::SymbolOutOfRange {
                    user,
                    index: m,
                    m: system.m(),
                });
            }
            Ok(system.user(user).codeword(m).to_vec())
        })
        .collect()
}

/// `Σ_j x_j`.
pub fn superpose(codewords: &[Vec<Complex64>]) -> Vec<Complex64> {
    let k = codewords.first().map_or(0, Vec::len);
    let mut sum = vec![ZERO; k];
    for cw in codewords {
        for (acc, &x) in sum.iter_mut().zip(cw) {
            *acc += x;
        }
    }
    sum
}

/// Received vector with the channel and noise density the decoder assumes.
#[derive(Debug, Clone)]
pub struct ReceivedFrame {
    pub y: Vec<Complex64>,
    pub h: Vec<Complex64>,
    pub n0: f64,
    /// Set when `y` was mixed by a distributed matrix at the transmitter.
    pub mixing: Option<Arc<DistributedMatrix>>,
}

impl ReceivedFrame {
    pub fn new(y: Vec<Complex64>, h: Vec<Complex64>, n0: f64) -> Result<Self> {
        if y.len() != h.len() {
            return Err(Error::DimensionMismatch(format!(
                "y has {} entries, h has {}",
                y.len(),
                h.len()
            )));
        }
        if !(n0 > 0.0) || !n0.is_finite() {
            return Err(Error::Config(format!(
                "noise density must be positive, got {n0}"
            )));
        }
        Ok(Self {
            y,
            h,
            n0,
            mixing: None,
        })
    }

    pub fn with_mixing(mut self, d: Arc<DistributedMatrix>) -> Self {
        self.mixing = Some(d);
        self
    }

    /// Received vector in the resource domain seen by the decoder.
    ///
    /// Without mixing this is `y` itself. With mixing the channel is
    /// equalised per resource and `D⁻¹` applied; the decoder then works with
    /// a unit channel. Under fading the recovered noise is no longer white,
    /// which the decoder ignores.
    pub fn resource_domain(&self) -> (Vec<Complex64>, Vec<Complex64>) {
        match &self.mixing {
            None => (self.y.clone(), self.h.clone()),
            Some(d) => {
                let eq: Vec<Complex64> = self
                    .y
                    .iter()
                    .zip(&self.h)
                    .map(|(&y, &h)| if h == ZERO { ZERO } else { y / h })
                    .collect();
                let recovered = d.apply(&eq, Direction::Inverse);
                (recovered, vec![Complex64::new(1.0, 0.0); self.y.len()])
            }
        }
    }
}

/// Draws `K` unit-variance circular complex Gaussians (`N0/2` per real axis
/// after scaling by `√N0`).
pub fn unit_noise<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Vec<Complex64> {
    (0..k)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
        })
        .collect()
}

/// `y = diag(h) s + √N0 · n` for a given unit-noise realisation `n`.
pub fn multiplex_with_noise(
    signal: &[Complex64],
    h: &[Complex64],
    n0: f64,
    unit: &[Complex64],
) -> Result<ReceivedFrame> {
    if signal.len() != h.len() || signal.len() != unit.len() {
        return Err(Error::DimensionMismatch(
            "signal, channel and noise lengths differ".into(),
        ));
    }
    let scale = n0.sqrt();
    let y = signal
        .iter()
        .zip(h)
        .zip(unit)
        .map(|((&s, &h), &n)| h * s + n * scale)
        .collect();
    ReceivedFrame::new(y, h.to_vec(), n0)
}

/// Synchronous layer multiplexing over a shared channel with AWGN of density
/// `N0` (total complex variance per resource).
pub fn multiplex<R: Rng + ?Sized>(
    codewords: &[Vec<Complex64>],
    h: &[Complex64],
    n0: f64,
    rng: &mut R,
) -> Result<ReceivedFrame> {
    let sum = superpose(codewords);
    let unit = unit_noise(sum.len(), rng);
    multiplex_with_noise(&sum, h, n0, &unit)
}

/// Noise-free received frame; `n0` is only what the decoder will assume.
pub fn multiplex_noiseless(
    codewords: &[Vec<Complex64>],
    h: &[Complex64],
    n0: f64,
) -> Result<ReceivedFrame> {
    let sum = superpose(codewords);
    let zeros = vec![ZERO; sum.len()];
    multiplex_with_noise(&sum, h, n0, &zeros)
}

/// Frequency-flat unit channel.
pub fn awgn_channel(k: usize) -> Vec<Complex64> {
    vec![Complex64::new(1.0, 0.0); k]
}

/// i.i.d. Rayleigh taps `CN(0, 1)` per resource.
pub fn rayleigh_channel<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Vec<Complex64> {
    unit_noise(k, rng)
}

/// RNG for one simulated frame, keyed on `(seed, frame_index)`.
///
/// ChaCha's stream id carries the frame index, so each frame's draws are
/// independent of how frames are scheduled across threads.
pub fn frame_rng(seed: u64, frame_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(frame_index);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

/// Invertible `K × K` mixing matrix and its inverse.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributedMatrix {
    forward: DMatrix<Complex64>,
    inverse: DMatrix<Complex64>,
}

impl DistributedMatrix {
    pub fn from_matrix(forward: DMatrix<Complex64>) -> Result<Self> {
        if !forward.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "distributed matrix is {}×{}",
                forward.nrows(),
                forward.ncols()
            )));
        }
        let inverse = forward.clone().try_inverse().ok_or(Error::SingularMatrix)?;
        let k = forward.nrows();
        let residual = (&forward * &inverse - DMatrix::<Complex64>::identity(k, k))
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max);
        if !residual.is_finite() || residual > 1e-9 {
            return Err(Error::SingularMatrix);
        }
        Ok(Self { forward, inverse })
    }

    pub fn identity(k: usize) -> Self {
        let id = DMatrix::<Complex64>::identity(k, k);
        Self {
            forward: id.clone(),
            inverse: id,
        }
    }

    /// `(1/√K) · H_K` (Sylvester construction); `K` must be a power of two.
    pub fn hadamard(k: usize) -> Result<Self> {
        if k == 0 || !k.is_power_of_two() {
            return Err(Error::Construction(format!(
                "Hadamard order {k} is not a power of two"
            )));
        }
        let scale = 1.0 / (k as f64).sqrt();
        let forward = DMatrix::from_fn(k, k, |r, c| {
            let sign = if (r & c).count_ones() % 2 == 0 {
                1.0
            } else {
                -1.0
            };
            Complex64::new(sign * scale, 0.0)
        });
        let inverse = forward.adjoint();
        Ok(Self { forward, inverse })
    }

    pub fn dim(&self) -> usize {
        self.forward.nrows()
    }

    pub fn forward(&self) -> &DMatrix<Complex64> {
        &self.forward
    }

    pub fn inverse(&self) -> &DMatrix<Complex64> {
        &self.inverse
    }

    pub fn apply(&self, v: &[Complex64], direction: Direction) -> Vec<Complex64> {
        assert_eq!(
            v.len(),
            self.dim(),
            "vector length must match the distributed matrix"
        );
        let m = match direction {
            Direction::Forward => &self.forward,
            Direction::Inverse => &self.inverse,
        };
        (m * DVector::from_column_slice(v))
            .iter()
            .copied()
            .collect()
    }

    pub fn to_document(&self) -> MatrixDocument {
        MatrixDocument {
            rows: (0..self.dim())
                .map(|r| {
                    (0..self.dim())
                        .map(|c| [self.forward[(r, c)].re, self.forward[(r, c)].im])
                        .collect()
                })
                .collect(),
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let doc: MatrixDocument = serde_json::from_str(&fs::read_to_string(path)?)?;
        doc.into_matrix()
    }
}

/// `{"rows": [[[re, im], …], …]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixDocument {
    pub rows: Vec<Vec<[f64; 2]>>,
}

impl MatrixDocument {
    pub fn into_matrix(self) -> Result<DistributedMatrix> {
        let k = self.rows.len();
        if self.rows.iter().any(|r| r.len() != k) {
            return Err(Error::DimensionMismatch(
                "distributed matrix rows are ragged".into(),
            ));
        }
        let m = DMatrix::from_fn(k, k, |r, c| {
            Complex64::new(self.rows[r][c][0], self.rows[r][c][1])
        });
        DistributedMatrix::from_matrix(m)
    }
}

/// Fully transmitted frame: encode, superpose, optional mixing, channel and
/// noise.
pub fn transmit(
    system: &ScmaSystem,
    frame: &Frame,
    h: &[Complex64],
    n0: f64,
    unit_noise: &[Complex64],
    mixing: Option<&Arc<DistributedMatrix>>,
) -> Result<ReceivedFrame> {
    let mut signal = superpose(&encode(system, frame)?);
    if let Some(d) = mixing {
        signal = d.apply(&signal, Direction::Forward);
    }
    let rx = multiplex_with_noise(&signal, h, n0, unit_noise)?;
    Ok(match mixing {
        Some(d) => rx.with_mixing(Arc::clone(d)),
        None => rx,
    })
}
