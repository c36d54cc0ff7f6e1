//! The Sobolev-type modification of the e^{-x⁴} family: monic polynomials
//! Q_n orthogonal with respect to
//!
//!   ⟨p,q⟩₁ = ∫ p q e^{-x⁴} dx + M₀ p(0)q(0) + M₁ p′(0)q′(0),
//!
//! their boundary values, connection coefficients to the unmodified family,
//! norms, the five-term recurrence x²Q_n = Q_{n+2} + λ_{n,n}Q_n +
//! λ_{n,n−2}Q_{n−2}, the M → ∞ limit polynomials, and a quadrature oracle
//! for the modified inner product.
//!
//! The canonical evaluation route is the kernel representation
//! Q_n(x) = F_n(x) − M₀Q_n(0)K_{n−1}(x,0) − M₁Q_n′(0)K^{(0,1)}_{n−1}(x,0),
//! which is regular everywhere; the rational connection form
//! Q_n = (1 + 𝒜₁₀(n)/x²)F_n + (ℬ₁₁(n)/x)F_{n−1} divides by x and is kept as
//! a cross-check only.

use crate::coeffs::FreudTable;
use crate::error::{FreudError, Result};
use crate::freud::{boundary_values, eval_chain};
use crate::quad::{truncation_point, HpQuad};

/// Point masses of the modified inner product.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SobolevParams {
    pub m0: f64,
    pub m1: f64,
}

impl SobolevParams {
    pub fn new(m0: f64, m1: f64) -> Result<Self> {
        if !(m0.is_finite() && m1.is_finite() && m0 >= 0.0 && m1 >= 0.0) {
            return Err(FreudError::Domain(format!(
                "masses must be finite and nonnegative, got M0 = {m0}, M1 = {m1}"
            )));
        }
        Ok(SobolevParams { m0, m1 })
    }
}

/// Boundary data, connection coefficients, norms, and five-term coefficients
/// of the modified family for one mass pair, indices 0..=n_max.
///
/// Parity is enforced structurally: `q0`, `kappa0` live on even indices,
/// `q1`, `kappa1`, `a10` on odd indices; the complementary entries are exact
/// +0.0. `rho_odd[n] = 1 + M₁K^{(1,1)}_{n−2}(0,0)` is meaningful at odd n
/// (it equals the denominator of `q1[n]`); even entries hold the neutral
/// value 1.
#[derive(Clone, Debug)]
pub struct SobolevTable {
    pub params: SobolevParams,
    pub n_max: usize,
    /// Q_n(0).
    pub q0: Vec<f64>,
    /// Q_n′(0).
    pub q1: Vec<f64>,
    /// κ_n^{[0]} = M₀F_n(0)² / (‖F_n‖²(1+M₀K_{n−1}(0,0))).
    pub kappa0: Vec<f64>,
    /// κ_n^{[1]} = M₁F_n′(0)² / (‖F_n‖²(1+M₁K^{(1,1)}_{n−1}(0,0))).
    pub kappa1: Vec<f64>,
    /// Parity indicator r_n = n mod 2 (the derivative mass acts on odd degrees).
    pub r: Vec<u8>,
    /// 𝒜₁₀(n) = −r_n κ_n^{[1]} / (4φ_n(0)), zero at even n.
    pub a10: Vec<f64>,
    /// ℬ₁₁(n) = a_n²(κ_n^{[0]} + κ_n^{[1]}).
    pub b11: Vec<f64>,
    /// ‖Q_n‖₁² = ‖F_n‖²(1 + κ_n^{[0]} + κ_n^{[1]}).
    pub qnorm_sq: Vec<f64>,
    /// ζ_n = ‖Q_n‖₁⁻¹, the leading coefficient of the orthonormal q_n.
    pub zeta: Vec<f64>,
    /// λ_{n,n} of the five-term recurrence.
    pub lambda_nn: Vec<f64>,
    /// λ_{n,n−2}; entries below n = 2 are unused zeros.
    pub lambda_nm2: Vec<f64>,
    /// ρ_n = 1 + M₁K^{(1,1)}_{n−2}(0,0) at odd n; 1 at even n.
    pub rho_odd: Vec<f64>,
    /// Cumulative K_j(0,0) for j = 0..=n_max.
    k00: Vec<f64>,
    /// Cumulative K_j^{(1,1)}(0,0) for j = 0..=n_max.
    k11: Vec<f64>,
}

impl SobolevTable {
    fn check_index(&self, n: usize) -> Result<()> {
        if n > self.n_max {
            Err(FreudError::TableExhausted {
                requested: n,
                n_max: self.n_max,
            })
        } else {
            Ok(())
        }
    }

    /// K_{n}(0,0) with K_{-1} = 0 convention (pass n+1 = 0 as `idx = None`).
    fn k00_before(&self, n: usize) -> f64 {
        if n == 0 {
            0.0
        } else {
            self.k00[n - 1]
        }
    }

    fn k11_before(&self, n: usize) -> f64 {
        if n == 0 {
            0.0
        } else {
            self.k11[n - 1]
        }
    }
}

/// Build the modified-family table for one mass pair.
///
/// Requires ft.n_max ≥ n_max + 2: the five-term coefficient λ_{n,n} consumes
/// a_{n+1}² and the interlacing/ladder consumers need one more row of slack.
pub fn build_sobolev_table(
    ft: &FreudTable,
    params: SobolevParams,
    n_max: usize,
) -> Result<SobolevTable> {
    if n_max + 2 > ft.n_max {
        return Err(FreudError::TableExhausted {
            requested: n_max + 2,
            n_max: ft.n_max,
        });
    }
    let bv = boundary_values(ft, n_max)?;
    let m = n_max + 1;
    let (m0, m1) = (params.m0, params.m1);

    // Cumulative kernel diagonals at the origin.
    let mut k00 = vec![0.0; m];
    let mut k11 = vec![0.0; m];
    let mut acc0 = 0.0;
    let mut acc1 = 0.0;
    for n in 0..m {
        acc0 += bv.f[n] * bv.f[n] / ft.norm_sq[n];
        acc1 += bv.d1[n] * bv.d1[n] / ft.norm_sq[n];
        k00[n] = acc0;
        k11[n] = acc1;
    }

    let mut st = SobolevTable {
        params,
        n_max,
        q0: vec![0.0; m],
        q1: vec![0.0; m],
        kappa0: vec![0.0; m],
        kappa1: vec![0.0; m],
        r: (0..m).map(|n| (n % 2) as u8).collect(),
        a10: vec![0.0; m],
        b11: vec![0.0; m],
        qnorm_sq: vec![0.0; m],
        zeta: vec![0.0; m],
        lambda_nn: vec![0.0; m],
        lambda_nm2: vec![0.0; m],
        rho_odd: vec![1.0; m],
        k00,
        k11,
    };

    for n in 0..m {
        let d0 = 1.0 + m0 * st.k00_before(n);
        let d1 = 1.0 + m1 * st.k11_before(n);
        if n % 2 == 0 {
            st.q0[n] = bv.f[n] / d0;
            st.kappa0[n] = m0 * bv.f[n] * bv.f[n] / (ft.norm_sq[n] * d0);
        } else {
            st.q1[n] = bv.d1[n] / d1;
            st.kappa1[n] = m1 * bv.d1[n] * bv.d1[n] / (ft.norm_sq[n] * d1);
            st.a10[n] = -st.kappa1[n] / (4.0 * ft.phi0(n));
            st.rho_odd[n] = if n >= 2 { 1.0 + m1 * st.k11[n - 2] } else { 1.0 };
        }
        st.b11[n] = ft.a_sq[n] * (st.kappa0[n] + st.kappa1[n]);
        st.qnorm_sq[n] = ft.norm_sq[n] * (1.0 + st.kappa0[n] + st.kappa1[n]);
        st.zeta[n] = 1.0 / st.qnorm_sq[n].sqrt();
    }

    for n in 0..m {
        let t = st.a10[n] + st.b11[n];
        let s = ft.a_sq[n + 1] + ft.a_sq[n];
        st.lambda_nn[n] = (s + t) * ft.norm_sq[n] / st.qnorm_sq[n] + t;
        if n >= 2 {
            st.lambda_nm2[n] =
                ft.a_sq[n - 1] * (ft.a_sq[n] + st.b11[n]) * ft.norm_sq[n - 2] / st.qnorm_sq[n - 2];
        }
    }
    Ok(st)
}

/// The connection data (𝒜₁₀(n), ℬ₁₁(n), κ_n^{[0]}, κ_n^{[1]}, r_n).
pub fn connection_coeffs(st: &SobolevTable, n: usize) -> Result<(f64, f64, f64, f64, u8)> {
    if n < 1 {
        return Err(FreudError::Domain("connection coefficients start at n = 1".into()));
    }
    st.check_index(n)?;
    Ok((st.a10[n], st.b11[n], st.kappa0[n], st.kappa1[n], st.r[n]))
}

/// Evaluate Q_n and derivatives up to `max_deriv` (0..=2) at x through the
/// kernel representation, in one O(n) pass. Returns [Q, Q′, Q″][..=max_deriv].
pub fn eval_q(
    st: &SobolevTable,
    ft: &FreudTable,
    n: usize,
    x: f64,
    max_deriv: usize,
) -> Result<Vec<f64>> {
    st.check_index(n)?;
    ft.check_index(n)?;
    if max_deriv > 2 {
        return Err(FreudError::Domain(format!(
            "derivative order must be at most 2, got {max_deriv}"
        )));
    }
    let bv = boundary_values(ft, n)?;
    // Upward recurrence rows [F, F′, F″] with kernel sums over k ≤ n−1.
    let mut prev = [1.0, 0.0, 0.0];
    let mut cur = [x, 1.0, 0.0];
    let mut s0 = [0.0; 3]; // Σ F_k^{(j)}(x) F_k(0) / ‖F_k‖²
    let mut s1 = [0.0; 3]; // Σ F_k^{(j)}(x) F_k′(0) / ‖F_k‖²
    let take = |vals: &[f64; 3], k: usize, s0: &mut [f64; 3], s1: &mut [f64; 3]| {
        for j in 0..=max_deriv {
            s0[j] += vals[j] * bv.f[k] / ft.norm_sq[k];
            s1[j] += vals[j] * bv.d1[k] / ft.norm_sq[k];
        }
    };
    let f_n;
    if n == 0 {
        f_n = [1.0, 0.0, 0.0];
    } else {
        take(&prev, 0, &mut s0, &mut s1);
        for k in 1..n {
            take(&cur, k, &mut s0, &mut s1);
            let a = ft.a_sq[k];
            let next = [
                x * cur[0] - a * prev[0],
                cur[0] + x * cur[1] - a * prev[1],
                2.0 * cur[1] + x * cur[2] - a * prev[2],
            ];
            prev = cur;
            cur = next;
        }
        f_n = cur;
    }
    let (m0, m1) = (st.params.m0, st.params.m1);
    let mut out = Vec::with_capacity(max_deriv + 1);
    for j in 0..=max_deriv {
        out.push(f_n[j] - m0 * st.q0[n] * s0[j] - m1 * st.q1[n] * s1[j]);
    }
    Ok(out)
}

/// Rational connection form Q_n(x) = (1 + 𝒜₁₀(n)/x²)F_n(x) + (ℬ₁₁(n)/x)F_{n−1}(x).
/// Cross-check only; singular at x = 0.
pub fn eval_q_quotient(st: &SobolevTable, ft: &FreudTable, n: usize, x: f64) -> Result<f64> {
    st.check_index(n)?;
    if x == 0.0 {
        return Err(FreudError::Domain(
            "rational connection form is singular at x = 0; use eval_q".into(),
        ));
    }
    let c = eval_chain(ft, n, x, 0)?;
    Ok((1.0 + st.a10[n] / (x * x)) * c.monic(0) + st.b11[n] / x * c.monic_prev(0))
}

/// The five-term coefficients (λ_{n,n}, λ_{n,n−2}). The second is defined for
/// 2 ≤ n ≤ n_max − 2 and `None` outside that window.
pub fn five_term(st: &SobolevTable, n: usize) -> Result<(f64, Option<f64>)> {
    st.check_index(n)?;
    let nm2 = if (2..=st.n_max.saturating_sub(2)).contains(&n) {
        Some(st.lambda_nm2[n])
    } else {
        None
    };
    Ok((st.lambda_nn[n], nm2))
}

/// Evaluate the M → ∞ limit polynomial with derivatives up to `max_deriv`
/// (0..=3): G_n = F_n − [F_n(0)/K_{n−2}(0,0)]K_{n−2}(x,0) for even n ≥ 2
/// (double zero at the origin), J_n = F_n − [F_n′(0)/K^{(1,1)}_{n−2}(0,0)]
/// K^{(0,1)}_{n−2}(x,0) for odd n ≥ 3 (triple zero at the origin).
pub fn eval_limit_poly_derivs(
    ft: &FreudTable,
    n: usize,
    x: f64,
    max_deriv: usize,
) -> Result<Vec<f64>> {
    ft.check_index(n)?;
    if max_deriv > 3 {
        return Err(FreudError::Domain(format!(
            "derivative order must be at most 3, got {max_deriv}"
        )));
    }
    if n < 2 || (n % 2 == 1 && n < 3) {
        return Err(FreudError::Domain(format!(
            "limit polynomials start at degree 2 (even) / 3 (odd), got {n}"
        )));
    }
    let bv = boundary_values(ft, n)?;
    let even = n % 2 == 0;
    // K_{n−2}(0,0) or K^{(1,1)}_{n−2}(0,0) and the coefficient of the kernel term.
    let mut kdiag = 0.0;
    for k in 0..=n - 2 {
        let b = if even { bv.f[k] } else { bv.d1[k] };
        kdiag += b * b / ft.norm_sq[k];
    }
    let coeff = if even { bv.f[n] } else { bv.d1[n] } / kdiag;
    // One pass: rows [F, F′, F″, F‴] and kernel-derivative sums over k ≤ n−2.
    let mut prev = [1.0, 0.0, 0.0, 0.0];
    let mut cur = [x, 1.0, 0.0, 0.0];
    let mut ksum = [0.0; 4];
    {
        let b0 = if even { bv.f[0] } else { bv.d1[0] };
        for (j, k) in ksum.iter_mut().enumerate() {
            *k += prev[j] * b0 / ft.norm_sq[0];
        }
    }
    for k in 1..n {
        if k <= n - 2 {
            let b = if even { bv.f[k] } else { bv.d1[k] };
            for j in 0..=max_deriv {
                ksum[j] += cur[j] * b / ft.norm_sq[k];
            }
        }
        let a = ft.a_sq[k];
        let next = [
            x * cur[0] - a * prev[0],
            cur[0] + x * cur[1] - a * prev[1],
            2.0 * cur[1] + x * cur[2] - a * prev[2],
            3.0 * cur[2] + x * cur[3] - a * prev[3],
        ];
        prev = cur;
        cur = next;
    }
    Ok((0..=max_deriv).map(|j| cur[j] - coeff * ksum[j]).collect())
}

/// Pointwise value of the limit polynomial (see [`eval_limit_poly_derivs`]).
pub fn eval_limit_poly(ft: &FreudTable, n: usize, x: f64) -> Result<f64> {
    Ok(eval_limit_poly_derivs(ft, n, x, 0)?[0])
}

/// A polynomial addressable by the inner-product oracle.
#[derive(Clone, Copy, Debug)]
pub enum PolySpec {
    /// Monic F_k of the unmodified family.
    F(usize),
    /// Monic Q_k of the modified family (masses given to the oracle call).
    Q(usize),
}

impl PolySpec {
    fn degree(&self) -> usize {
        match self {
            PolySpec::F(k) | PolySpec::Q(k) => *k,
        }
    }
}

/// Quadrature oracle for ⟨p,q⟩₁ = ∫pq e^{-x⁴}dx + M₀p(0)q(0) + M₁p′(0)q′(0),
/// p and q drawn from {F_k, Q_k}, k ≤ 14. The integral term is recomputed
/// with doubled quadrature points; disagreement above 10⁻¹⁰ (relative to the
/// norm scale) is an oracle error.
pub fn sobolev_inner_oracle(
    ft: &FreudTable,
    params: SobolevParams,
    p_spec: PolySpec,
    q_spec: PolySpec,
) -> Result<f64> {
    const CAP: usize = 14;
    let kp = p_spec.degree();
    let kq = q_spec.degree();
    if kp > CAP || kq > CAP {
        return Err(FreudError::Domain(format!(
            "inner-product oracle caps degrees at {CAP}, got {kp}, {kq}"
        )));
    }
    let st = build_sobolev_table(ft, params, kp.max(kq).max(2))?;
    let value_and_d1 = |spec: PolySpec, x: f64| -> Result<(f64, f64)> {
        match spec {
            PolySpec::F(k) => {
                let c = eval_chain(ft, k, x, 1)?;
                Ok((c.monic(0), c.monic(1)))
            }
            PolySpec::Q(k) => {
                let v = eval_q(&st, ft, k, x, 1)?;
                Ok((v[0], v[1]))
            }
        }
    };
    let integral = |points: usize| -> Result<f64> {
        let quad = HpQuad::composite(truncation_point(40), points, 40)?;
        let (nodes, weights) = quad.to_f64();
        let mut acc = 0.0;
        for (x, w) in nodes.iter().zip(&weights) {
            let (pv, _) = value_and_d1(p_spec, *x)?;
            let (qv, _) = value_and_d1(q_spec, *x)?;
            acc += w * (-x.powi(4)).exp() * pv * qv;
        }
        Ok(acc)
    };
    let coarse = integral(1500)?;
    let fine = integral(3000)?;
    let scale = (ft.norm_sq[kp] * ft.norm_sq[kq]).sqrt();
    if (coarse - fine).abs() > 1e-10 * scale.max(1.0) {
        return Err(FreudError::Oracle(format!(
            "quadrature underresolved: inner product moved by {:.3e} under point doubling",
            (coarse - fine).abs()
        )));
    }
    let (p0, p1) = value_and_d1(p_spec, 0.0)?;
    let (q0v, q1v) = value_and_d1(q_spec, 0.0)?;
    Ok(fine + params.m0 * p0 * q0v + params.m1 * p1 * q1v)
}
