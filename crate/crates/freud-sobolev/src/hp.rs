//! Thin convenience layer over `rug::Float` (MPFR) for the high-precision
//! paths: coefficient construction, forward-recurrence certification, and the
//! quadrature oracles. Everything user-facing works in `f64`; this module is
//! how those `f64` values get manufactured.

use rug::Float;

/// Decimal digits → MPFR precision in bits, with guard bits so that the
/// requested decimal precision survives a computation of moderate depth.
pub fn bits_for_digits(digits: u32) -> u32 {
    (digits as f64 * std::f64::consts::LOG2_10).ceil() as u32 + 16
}

/// A fixed working precision, used as a factory for `Float`s.
#[derive(Clone, Copy, Debug)]
pub struct HpCtx {
    bits: u32,
}

impl HpCtx {
    pub fn new(digits: u32) -> Self {
        Self {
            bits: bits_for_digits(digits),
        }
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn from_f64(&self, v: f64) -> Float {
        Float::with_val(self.bits, v)
    }

    pub fn from_u32(&self, v: u32) -> Float {
        Float::with_val(self.bits, v)
    }

    pub fn zero(&self) -> Float {
        Float::with_val(self.bits, 0)
    }

    /// Γ(x) at this precision.
    pub fn gamma(&self, x: &Float) -> Float {
        Float::with_val(self.bits, x.clone().gamma())
    }

    /// Evaluate a rational literal `p/q` exactly before rounding once.
    pub fn ratio(&self, p: u32, q: u32) -> Float {
        Float::with_val(self.bits, p) / Float::with_val(self.bits, q)
    }
}
