//! Signed fixed-point model: round to nearest, saturate at the format bounds.

use serde::{Deserialize, Serialize};

/// Two's-complement format with `total_bits` bits, `frac_bits` of them after
/// the binary point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixedFormat {
    pub total_bits: u32,
    pub frac_bits: u32,
}

impl FixedFormat {
    pub const fn new(total_bits: u32, frac_bits: u32) -> Self {
        Self {
            total_bits,
            frac_bits,
        }
    }

    pub fn raw_min(&self) -> i64 {
        -(1i64 << (self.total_bits - 1))
    }

    pub fn raw_max(&self) -> i64 {
        (1i64 << (self.total_bits - 1)) - 1
    }

    pub fn resolution(&self) -> f64 {
        (-(self.frac_bits as f64)).exp2()
    }

    pub fn min_value(&self) -> f64 {
        self.raw_min() as f64 * self.resolution()
    }

    pub fn max_value(&self) -> f64 {
        self.raw_max() as f64 * self.resolution()
    }

    pub fn is_valid(&self) -> bool {
        (2..=48).contains(&self.total_bits) && self.frac_bits < self.total_bits
    }

    /// Quantizes `value`. NaN maps to zero; infinities saturate.
    pub fn quantize(&self, value: f64) -> Fixed {
        let raw = if value.is_nan() {
            0
        } else {
            let scaled = (value * (self.frac_bits as f64).exp2()).round();
            if scaled >= self.raw_max() as f64 {
                self.raw_max()
            } else if scaled <= self.raw_min() as f64 {
                self.raw_min()
            } else {
                scaled as i64
            }
        };
        Fixed { raw, format: *self }
    }

    /// `quantize(value).to_f64()`.
    pub fn snap(&self, value: f64) -> f64 {
        self.quantize(value).to_f64()
    }
}

/// A quantized value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Fixed {
    raw: i64,
    format: FixedFormat,
}

impl Fixed {
    pub fn raw(&self) -> i64 {
        self.raw
    }

    pub fn format(&self) -> FixedFormat {
        self.format
    }

    pub fn to_f64(&self) -> f64 {
        self.raw as f64 * self.format.resolution()
    }

    /// Saturating fixed-point addition in the same format.
    pub fn saturating_add(self, other: Fixed) -> Fixed {
        debug_assert_eq!(self.format, other.format);
        let raw = (self.raw + other.raw).clamp(self.format.raw_min(), self.format.raw_max());
        Fixed {
            raw,
            format: self.format,
        }
    }
}

/// Input format: signed 8-bit, 3 fractional bits (range ±16, step 1/8), which
/// covers a three-user superposition of the shipped codebook plus noise.
pub const DEFAULT_INPUT: FixedFormat = FixedFormat::new(8, 3);
/// Intermediate format: signed 16-bit, 6 fractional bits (range ±512).
pub const DEFAULT_INTERMEDIATE: FixedFormat = FixedFormat::new(16, 6);

/// Formats used by the decoder's fixed-point mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Quantization {
    /// Applied to the received vector and codebook entries.
    pub input: FixedFormat,
    /// Applied to initial metrics and every message.
    pub intermediate: FixedFormat,
}

impl Default for Quantization {
    fn default() -> Self {
        Self {
            input: DEFAULT_INPUT,
            intermediate: DEFAULT_INTERMEDIATE,
        }
    }
}
