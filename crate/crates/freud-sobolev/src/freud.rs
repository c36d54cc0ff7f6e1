//! Evaluation of the monic polynomials F_n orthogonal with respect to
//! e^{-x⁴}dx, their orthonormal companions f_n = γ_n F_n, derivatives up to
//! order 3, boundary values at the origin, and the Christoffel–Darboux kernel
//! quantities K_n(x,y), K_n(x,0), K_n^{(0,1)}(x,0), K_n^{(0,1)}(0,0),
//! K_n^{(1,1)}(0,0).
//!
//! Everything runs on the upward three-term recurrence
//! F_{k+1}(x) = x·F_k(x) − a_k²·F_{k−1}(x), which is stable on the
//! oscillatory region for desk-scale degrees; derivatives use the
//! differentiated recurrence F^{(j)}_{k+1} = j·F^{(j−1)}_k + x·F^{(j)}_k −
//! a_k²·F^{(j)}_{k−1}. Orthonormal values are obtained by scaling with γ_n
//! only at the end. Kernel evaluations near the diagonal and all x→0 forms
//! use direct sums, which are regular everywhere; the closed quotient forms
//! are kept as cross-checks.

use crate::coeffs::FreudTable;
use crate::error::{FreudError, Result};
use crate::hp::HpCtx;
use rug::Float;

/// Values of F_n and F_{n−1} (monic) at a point, with derivatives up to the
/// requested order and the φ_n(x) = a_{n+1}² + a_n² + x² helper when the
/// table extends far enough.
#[derive(Clone, Debug)]
pub struct EvalChain {
    pub n: usize,
    pub x: f64,
    pub max_deriv: usize,
    val: [f64; 4],
    val_prev: [f64; 4],
    gamma_n: f64,
    gamma_prev: f64,
    phi: Option<f64>,
}

impl EvalChain {
    /// F_n^{(j)}(x), j = 0..=max_deriv.
    pub fn monic(&self, j: usize) -> f64 {
        debug_assert!(j <= self.max_deriv);
        self.val[j]
    }

    /// F_{n−1}^{(j)}(x).
    pub fn monic_prev(&self, j: usize) -> f64 {
        debug_assert!(j <= self.max_deriv);
        self.val_prev[j]
    }

    /// f_n^{(j)}(x) = γ_n F_n^{(j)}(x).
    pub fn ortho(&self, j: usize) -> f64 {
        self.gamma_n * self.monic(j)
    }

    /// f_{n−1}^{(j)}(x).
    pub fn ortho_prev(&self, j: usize) -> f64 {
        self.gamma_prev * self.monic_prev(j)
    }

    /// φ_n(x) = a_{n+1}² + a_n² + x², when a_{n+1}² is inside the table.
    pub fn phi_n(&self) -> Option<f64> {
        self.phi
    }
}

/// Arrays of F_n(0), F_n′(0), F_n″(0), F_n‴(0) for n = 0..=n_max.
///
/// The structural parity zeros (F_n(0) and F_n″(0) for odd n, F_n′(0) and
/// F_n‴(0) for even n) are exact +0.0.
#[derive(Clone, Debug)]
pub struct BoundaryValues {
    pub n_max: usize,
    pub f: Vec<f64>,
    pub d1: Vec<f64>,
    pub d2: Vec<f64>,
    pub d3: Vec<f64>,
}

/// The kernel and kernel-derivative values at the origin.
#[derive(Clone, Copy, Debug)]
pub struct KernelValues {
    pub n: usize,
    pub k00: f64,
    pub k01: f64,
    pub k11: f64,
}

fn check_deriv_order(max_deriv: usize) -> Result<()> {
    if max_deriv > 3 {
        return Err(FreudError::Domain(format!(
            "derivative order must be at most 3, got {max_deriv}"
        )));
    }
    Ok(())
}

/// Evaluate F_n and F_{n−1} with derivatives up to `max_deriv` at x.
pub fn eval_chain(table: &FreudTable, n: usize, x: f64, max_deriv: usize) -> Result<EvalChain> {
    table.check_index(n)?;
    check_deriv_order(max_deriv)?;
    // Rows are [F, F′, F″, F‴]; F₀ = 1, F₁ = x.
    let mut prev = [1.0, 0.0, 0.0, 0.0];
    let mut cur = [x, 1.0, 0.0, 0.0];
    if n == 0 {
        cur = prev;
        prev = [0.0; 4];
    } else {
        for k in 1..n {
            let a = table.a_sq[k];
            let mut next = [0.0; 4];
            next[0] = x * cur[0] - a * prev[0];
            for j in 1..=max_deriv {
                next[j] = j as f64 * cur[j - 1] + x * cur[j] - a * prev[j];
            }
            prev = cur;
            cur = next;
        }
    }
    let phi = if n < table.n_max {
        Some(table.a_sq[n + 1] + table.a_sq[n] + x * x)
    } else {
        None
    };
    let gamma_prev = if n == 0 { 0.0 } else { table.gamma[n - 1] };
    Ok(EvalChain {
        n,
        x,
        max_deriv,
        val: cur,
        val_prev: prev,
        gamma_n: table.gamma[n],
        gamma_prev,
        phi,
    })
}

/// Full-precision certification run of the same chain: coefficients from the
/// forward arbitrary-precision recurrence, the evaluation carried out at a
/// matching precision, results rounded to f64.
/// Returns (F_n^{(j)}(x), F_{n−1}^{(j)}(x)) for j = 0..4.
pub fn eval_chain_hp(n: usize, x: f64, max_deriv: usize, min_digits: u32) -> Result<([f64; 4], [f64; 4])> {
    check_deriv_order(max_deriv)?;
    let hp_table = crate::coeffs::forward_hp(n.max(2) + 1)?;
    let digits = hp_table.precision_digits.max(min_digits);
    // Re-derive the coefficients at the working precision of this evaluation.
    let ctx = HpCtx::new(digits);
    let bits = ctx.bits();
    let gc = crate::coeffs::gamma_constants(digits)?;
    let mut a: Vec<Float> = vec![ctx.zero(); n.max(2) + 2];
    a[1] = gc.a1_sq_exact.clone();
    for k in 1..a.len() - 1 {
        let lead = Float::with_val(bits, k as u32) / Float::with_val(bits, 4u32 * &a[k]);
        a[k + 1] = lead - Float::with_val(bits, &a[k] + &a[k - 1]);
    }
    let xf = ctx.from_f64(x);
    let mut prev: Vec<Float> = vec![ctx.from_u32(1), ctx.zero(), ctx.zero(), ctx.zero()];
    let mut cur: Vec<Float> = vec![xf.clone(), ctx.from_u32(1), ctx.zero(), ctx.zero()];
    if n == 0 {
        cur = vec![ctx.from_u32(1), ctx.zero(), ctx.zero(), ctx.zero()];
        prev = vec![ctx.zero(), ctx.zero(), ctx.zero(), ctx.zero()];
    } else {
        for k in 1..n {
            let mut next = vec![ctx.zero(), ctx.zero(), ctx.zero(), ctx.zero()];
            next[0] = Float::with_val(bits, &xf * &cur[0]) - Float::with_val(bits, &a[k] * &prev[0]);
            for j in 1..=max_deriv {
                let t = Float::with_val(bits, j as u32 * &cur[j - 1])
                    + Float::with_val(bits, &xf * &cur[j]);
                next[j] = t - Float::with_val(bits, &a[k] * &prev[j]);
            }
            prev = cur;
            cur = next;
        }
    }
    let out = |v: &[Float]| [v[0].to_f64(), v[1].to_f64(), v[2].to_f64(), v[3].to_f64()];
    Ok((out(&cur), out(&prev)))
}

/// Boundary values at the origin by the specialized recurrences
/// F_{k+1}(0) = −a_k²F_{k−1}(0), F′_{k+1}(0) = F_k(0) − a_k²F′_{k−1}(0),
/// F″_{k+1}(0) = 2F′_k(0) − a_k²F″_{k−1}(0), F‴_{k+1}(0) = 3F″_k(0) −
/// a_k²F‴_{k−1}(0). Cancellation-free: every surviving term is a signed
/// product of positive factors.
pub fn boundary_values(table: &FreudTable, n_max: usize) -> Result<BoundaryValues> {
    table.check_index(n_max)?;
    let m = n_max + 1;
    let mut f = vec![0.0; m];
    let mut d1 = vec![0.0; m];
    let mut d2 = vec![0.0; m];
    let mut d3 = vec![0.0; m];
    f[0] = 1.0;
    if n_max >= 1 {
        d1[1] = 1.0;
    }
    for k in 1..n_max {
        let a = table.a_sq[k];
        f[k + 1] = -a * f[k - 1];
        d1[k + 1] = f[k] - a * d1[k - 1];
        d2[k + 1] = 2.0 * d1[k] - a * d2[k - 1];
        d3[k + 1] = 3.0 * d2[k] - a * d3[k - 1];
    }
    // Enforce the structural parity zeros exactly.
    for k in 0..m {
        if k % 2 == 1 {
            f[k] = 0.0;
            d2[k] = 0.0;
        } else {
            d1[k] = 0.0;
            d3[k] = 0.0;
        }
    }
    Ok(BoundaryValues { n_max, f, d1, d2, d3 })
}

/// Monic values F_k(x) for k = 0..=n.
fn monic_values_upto(table: &FreudTable, n: usize, x: f64) -> Vec<f64> {
    let mut vals = Vec::with_capacity(n + 1);
    vals.push(1.0);
    if n >= 1 {
        vals.push(x);
    }
    for k in 1..n {
        let next = x * vals[k] - table.a_sq[k] * vals[k - 1];
        vals.push(next);
    }
    vals
}

/// K_n(x,y) by the direct sum Σ_{k≤n} F_k(x)F_k(y)/‖F_k‖².
pub fn kernel_direct_sum(table: &FreudTable, n: usize, x: f64, y: f64) -> Result<f64> {
    table.check_index(n)?;
    let fx = monic_values_upto(table, n, x);
    let fy = monic_values_upto(table, n, y);
    let mut sum = 0.0;
    for k in 0..=n {
        sum += fx[k] * fy[k] / table.norm_sq[k];
    }
    Ok(sum)
}

/// The Christoffel–Darboux kernel K_n(x,y).
///
/// Away from the diagonal this is the two-point quotient
/// [F_{n+1}(x)F_n(y) − F_n(x)F_{n+1}(y)] / ((x−y)‖F_n‖²); within
/// |x−y| ≤ 10⁻⁶(1+|x|) the direct sum is used to avoid cancellation.
pub fn kernel(table: &FreudTable, n: usize, x: f64, y: f64) -> Result<f64> {
    table.check_index(n + 1)?;
    if (x - y).abs() <= 1e-6 * (1.0 + x.abs()) {
        return kernel_direct_sum(table, n, x, y);
    }
    let cx = eval_chain(table, n + 1, x, 0)?;
    let cy = eval_chain(table, n + 1, y, 0)?;
    let num = cx.monic(0) * cy.monic_prev(0) - cx.monic_prev(0) * cy.monic(0);
    Ok(num / ((x - y) * table.norm_sq[n]))
}

/// K_n(0,0), K_n^{(0,1)}(0,0) (= 0 by symmetry), and K_n^{(1,1)}(0,0) as
/// direct sums of squares of orthonormal boundary values.
pub fn kernel_at_zero(table: &FreudTable, n: usize) -> Result<KernelValues> {
    if n + 1 > table.n_max {
        return Err(FreudError::TableExhausted {
            requested: n + 1,
            n_max: table.n_max,
        });
    }
    let bv = boundary_values(table, n)?;
    let mut k00 = 0.0;
    let mut k11 = 0.0;
    for k in 0..=n {
        k00 += bv.f[k] * bv.f[k] / table.norm_sq[k];
        k11 += bv.d1[k] * bv.d1[k] / table.norm_sq[k];
    }
    Ok(KernelValues { n, k00, k01: 0.0, k11 })
}

/// Confluent (determinant) forms of K_n(0,0) and K_n^{(1,1)}(0,0) built from
/// boundary values of F_n and F_{n+1}; cross-check for [`kernel_at_zero`].
///
/// K_n(0,0) = [F′_{n+1}(0)F_n(0) − F′_n(0)F_{n+1}(0)] / ‖F_n‖²,
/// K_n^{(1,1)}(0,0) = { [F‴_{n+1}(0)F_n(0) − F‴_n(0)F_{n+1}(0)]/6
///                    + [F″_{n+1}(0)F′_n(0) − F″_n(0)F′_{n+1}(0)]/2 } / ‖F_n‖².
pub fn kernel_at_zero_confluent(table: &FreudTable, n: usize) -> Result<(f64, f64)> {
    let bv = boundary_values(table, n + 1)?;
    let nu = table.norm_sq[n];
    let k00 = (bv.d1[n + 1] * bv.f[n] - bv.d1[n] * bv.f[n + 1]) / nu;
    let k11 = ((bv.d3[n + 1] * bv.f[n] - bv.d3[n] * bv.f[n + 1]) / 6.0
        + (bv.d2[n + 1] * bv.d1[n] - bv.d2[n] * bv.d1[n + 1]) / 2.0)
        / nu;
    Ok((k00, k11))
}

/// (K_n(x,0), K_n^{(0,1)}(x,0)) by the direct sums
/// Σ F_k(x)F_k(0)/‖F_k‖² and Σ F_k(x)F_k′(0)/‖F_k‖², regular at x = 0.
pub fn kernel_x0(table: &FreudTable, n: usize, x: f64) -> Result<(f64, f64)> {
    if n + 1 > table.n_max {
        return Err(FreudError::TableExhausted {
            requested: n + 1,
            n_max: table.n_max,
        });
    }
    let bv = boundary_values(table, n)?;
    let fx = monic_values_upto(table, n, x);
    let mut k = 0.0;
    let mut k01 = 0.0;
    for j in 0..=n {
        k += fx[j] * bv.f[j] / table.norm_sq[j];
        k01 += fx[j] * bv.d1[j] / table.norm_sq[j];
    }
    Ok((k, k01))
}

/// Closed quotient forms of K_n(x,0) and K_n^{(0,1)}(x,0) (divide by x and
/// x²; cross-check only, invalid near the origin):
/// K_n(x,0) = [F_{n+1}(x)F_n(0) − F_n(x)F_{n+1}(0)] / (x‖F_n‖²),
/// K_n^{(0,1)}(x,0) = [F_{n+1}(x)F_n′(0) − F_n(x)F_{n+1}′(0)] / (x‖F_n‖²)
///                  + [F_{n+1}(x)F_n(0) − F_n(x)F_{n+1}(0)] / (x²‖F_n‖²).
pub fn kernel_x0_quotient(table: &FreudTable, n: usize, x: f64) -> Result<(f64, f64)> {
    if x == 0.0 {
        return Err(FreudError::Domain(
            "quotient kernel form is singular at x = 0; use kernel_x0".into(),
        ));
    }
    let bv = boundary_values(table, n + 1)?;
    let c = eval_chain(table, n + 1, x, 0)?;
    let nu = table.norm_sq[n];
    let (fn1x, fnx) = (c.monic(0), c.monic_prev(0));
    let k = (fn1x * bv.f[n] - fnx * bv.f[n + 1]) / (x * nu);
    let k01 = (fn1x * bv.d1[n] - fnx * bv.d1[n + 1]) / (x * nu)
        + (fn1x * bv.f[n] - fnx * bv.f[n + 1]) / (x * x * nu);
    Ok((k, k01))
}
