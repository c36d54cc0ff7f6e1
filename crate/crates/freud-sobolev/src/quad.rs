//! Composite Gauss–Legendre quadrature in arbitrary precision.
//!
//! Used by the discretized-measure (Stieltjes) oracle and the Sobolev
//! inner-product oracle. The measure e^{-x⁴}dx is truncated to [-X, X] with X
//! chosen so the discarded tail is below the oracle's noise floor; the
//! integrand (including the weight factor) is supplied by the caller.

use crate::error::{FreudError, Result};
use crate::hp::HpCtx;
use rug::Float;

/// Gauss–Legendre rule of `m` points on [-1, 1], computed by Newton iteration
/// on the Legendre recurrence from the Chebyshev-angle initial guesses.
fn gauss_legendre(m: usize, ctx: HpCtx) -> (Vec<Float>, Vec<Float>) {
    let bits = ctx.bits();
    let mut nodes = Vec::with_capacity(m);
    let mut weights = Vec::with_capacity(m);
    // Convergence threshold ~ machine epsilon at this precision.
    let eps = Float::with_val(bits, Float::i_exp(1, -(bits as i32) + 4));
    for i in 0..m {
        let theta = std::f64::consts::PI * (i as f64 + 0.75) / (m as f64 + 0.5);
        let mut x = ctx.from_f64(theta.cos());
        let mut dp = ctx.zero();
        for _ in 0..60 {
            // Legendre recurrence (k+1)P_{k+1} = (2k+1)xP_k - kP_{k-1}.
            let mut p_prev = ctx.from_u32(1);
            let mut p = x.clone();
            for k in 1..m {
                let t1 = Float::with_val(bits, 2 * k as u32 + 1) * &x * &p;
                let t2 = Float::with_val(bits, &p_prev * (k as u32));
                let next = (t1 - t2) / (k as u32 + 1);
                p_prev = p;
                p = next;
            }
            // P'_m(x) = m (x P_m - P_{m-1}) / (x² - 1)
            let xp = Float::with_val(bits, &x * &p);
            let x2m1 = Float::with_val(bits, &x * &x) - 1u32;
            dp = (xp - &p_prev) * (m as u32) / x2m1;
            let step = Float::with_val(bits, &p / &dp);
            x -= &step;
            if step.abs() < eps {
                break;
            }
        }
        let x2 = Float::with_val(bits, &x * &x);
        let w = Float::with_val(bits, 2) / ((ctx.from_u32(1) - x2) * Float::with_val(bits, &dp * &dp));
        nodes.push(x);
        weights.push(w);
    }
    (nodes, weights)
}

/// A composite rule over [-x_max, x_max]: equal panels, a fixed-order
/// Gauss–Legendre rule mapped onto each panel. Nodes and weights are plain
/// quadrature data; the integrand supplies the measure's weight factor.
pub struct HpQuad {
    ctx: HpCtx,
    nodes: Vec<Float>,
    weights: Vec<Float>,
}

/// Points per panel for composite rules; panel count scales the total.
const PANEL_ORDER: usize = 80;

impl HpQuad {
    /// Build a composite rule with roughly `total_points` nodes.
    pub fn composite(x_max: f64, total_points: usize, digits: u32) -> Result<Self> {
        if total_points < PANEL_ORDER {
            return Err(FreudError::Config(format!(
                "at least {PANEL_ORDER} quadrature points required, got {total_points}"
            )));
        }
        let ctx = HpCtx::new(digits);
        let bits = ctx.bits();
        let panels = total_points.div_ceil(PANEL_ORDER);
        let (base_nodes, base_weights) = gauss_legendre(PANEL_ORDER, ctx);
        let width = ctx.from_f64(2.0 * x_max) / ctx.from_u32(panels as u32);
        let half = Float::with_val(bits, &width / 2u32);
        let mut nodes = Vec::with_capacity(panels * PANEL_ORDER);
        let mut weights = Vec::with_capacity(panels * PANEL_ORDER);
        for p in 0..panels {
            let center =
                ctx.from_f64(-x_max) + Float::with_val(bits, &width * Float::with_val(bits, p as u32)) + &half;
            for (t, w) in base_nodes.iter().zip(&base_weights) {
                nodes.push(Float::with_val(bits, &center + Float::with_val(bits, t * &half)));
                weights.push(Float::with_val(bits, w * &half));
            }
        }
        Ok(Self { ctx, nodes, weights })
    }

    pub fn ctx(&self) -> HpCtx {
        self.ctx
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[Float] {
        &self.nodes
    }

    /// ∫ f over the truncated interval.
    pub fn integrate<F: Fn(&Float) -> Float>(&self, f: F) -> Float {
        let mut acc = self.ctx.zero();
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += Float::with_val(self.ctx.bits(), f(x) * w);
        }
        acc
    }

    /// Weighted dot product Σ wᵢ aᵢ bᵢ of two node-wise value vectors.
    pub fn dot(&self, a: &[Float], b: &[Float]) -> Float {
        debug_assert_eq!(a.len(), self.nodes.len());
        let mut acc = self.ctx.zero();
        for ((x, y), w) in a.iter().zip(b).zip(&self.weights) {
            acc += Float::with_val(self.ctx.bits(), Float::with_val(self.ctx.bits(), x * y) * w);
        }
        acc
    }

    /// Node and weight views rounded to f64 (for double-precision consumers).
    pub fn to_f64(&self) -> (Vec<f64>, Vec<f64>) {
        (
            self.nodes.iter().map(|x| x.to_f64()).collect(),
            self.weights.iter().map(|w| w.to_f64()).collect(),
        )
    }
}

/// Truncation point X with e^{-X⁴} < 10^{-tail_digits}.
pub fn truncation_point(tail_digits: u32) -> f64 {
    (tail_digits as f64 * std::f64::consts::LN_10).powf(0.25)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn truncation_bound() {
        let x = truncation_point(40);
        assert!((3.0..3.2).contains(&x), "X = {x}");
        assert!((-x.powi(4)).exp() < 1e-39);
    }

    #[test]
    fn integrates_gaussianlike_weight() {
        // ∫ e^{-x⁴} dx = Γ(1/4)/2 = 1.8128049541109541...
        let x_max = truncation_point(40);
        let q = HpQuad::composite(x_max, 800, 40).unwrap();
        let bits = q.ctx().bits();
        let val = q.integrate(|x| {
            let x4 = Float::with_val(bits, x.clone().square().square());
            Float::with_val(bits, (-x4).exp())
        });
        assert!((val.to_f64() - 1.812_804_954_110_954_2).abs() < 1e-14);
    }

    #[test]
    fn doubling_agreement() {
        let x_max = truncation_point(40);
        let q1 = HpQuad::composite(x_max, 800, 40).unwrap();
        let q2 = HpQuad::composite(x_max, 1600, 40).unwrap();
        let f = |bits: u32| {
            move |x: &Float| {
                let x4 = Float::with_val(bits, x.clone().square().square());
                Float::with_val(bits, (-x4).exp()) * Float::with_val(bits, x * x)
            }
        };
        let a = q1.integrate(f(q1.ctx().bits())).to_f64();
        let b = q2.integrate(f(q2.ctx().bits())).to_f64();
        assert!((a - b).abs() < 1e-25);
    }
}
