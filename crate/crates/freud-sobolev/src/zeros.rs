//! Zeros of F_n, Q_n, the limit polynomials G/J, and the kernel derivative
//! K^{(0,1)}(x,0); interlacing diagnostics and their rupture; and the
//! M₁ → ∞ zero dynamics (trajectories, limits, convergence rates).
//!
//! All zero finding exploits parity: work on the positive semiaxis with the
//! sign at 0⁺ known analytically, mirror the results exactly, and insert the
//! origin with its analytically known multiplicity. Brackets come from a
//! seed grid (neighboring-degree zeros of the unmodified family, limit-
//! polynomial zeros, a geometric ladder toward the origin) refined by
//! uniform subdivision until the expected number of sign changes appears;
//! each bracket is closed by bisection and sharpened by a few Newton steps.

use crate::coeffs::FreudTable;
use crate::error::{FreudError, Result};
use crate::freud::{boundary_values, eval_chain};
use crate::sobolev::{
    build_sobolev_table, eval_limit_poly_derivs, eval_q, SobolevParams, SobolevTable,
};
use nalgebra::DMatrix;
use std::fmt;
use std::io::Write;

/// Which polynomial family a [`ZeroSet`] belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ZeroLabel {
    Freud,
    Sobolev,
    LimitG,
    LimitJ,
    Kernel01,
    BiquarticU,
}

impl fmt::Display for ZeroLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ZeroLabel::Freud => "freud",
            ZeroLabel::Sobolev => "sobolev",
            ZeroLabel::LimitG => "limit_G",
            ZeroLabel::LimitJ => "limit_J",
            ZeroLabel::Kernel01 => "kernel01",
            ZeroLabel::BiquarticU => "biquartic_u",
        };
        f.write_str(s)
    }
}

/// Sorted real zeros of one named polynomial, with residuals and (for the
/// limit polynomials) the analytic multiplicity at the origin. Distinct
/// points are stored once; `multiplicities` carries the counting.
#[derive(Clone, Debug)]
pub struct ZeroSet {
    pub label: ZeroLabel,
    pub n: usize,
    pub params: Option<SobolevParams>,
    pub zeros: Vec<f64>,
    pub residuals: Vec<f64>,
    pub multiplicities: Vec<u32>,
}

impl ZeroSet {
    /// Zeros counted with multiplicity.
    pub fn total_count(&self) -> usize {
        self.multiplicities.iter().map(|&m| m as usize).sum()
    }

    /// The strictly positive zeros, ascending.
    pub fn positive(&self) -> Vec<f64> {
        self.zeros.iter().copied().filter(|&z| z > 0.0).collect()
    }

    /// Exact mirror symmetry: the sorted list satisfies z[i] = −z[rev i].
    pub fn is_symmetric(&self) -> bool {
        let m = self.zeros.len();
        (0..m).all(|i| self.zeros[i] == -self.zeros[m - 1 - i])
    }

    /// Serialize as `label,n,M0,M1,k,zero,residual` rows (k is 1-based).
    pub fn write_csv<W: Write>(&self, out: &mut W) -> Result<()> {
        writeln!(out, "label,n,M0,M1,k,zero,residual")?;
        let (m0, m1) = match self.params {
            Some(p) => (p.m0.to_string(), p.m1.to_string()),
            None => (String::new(), String::new()),
        };
        for (k, (z, r)) in self.zeros.iter().zip(&self.residuals).enumerate() {
            writeln!(out, "{},{},{},{},{},{},{}", self.label, self.n, m0, m1, k + 1, z, r)?;
        }
        Ok(())
    }
}

/// Assemble the symmetric full-axis zero set from polished positive zeros:
/// exact mirrors, plus the origin with the given multiplicity (0 = absent).
fn symmetric_zero_set(
    label: ZeroLabel,
    n: usize,
    params: Option<SobolevParams>,
    positive: Vec<(f64, f64)>,
    origin_mult: u32,
    origin_residual: f64,
) -> ZeroSet {
    let mut zeros = Vec::new();
    let mut residuals = Vec::new();
    let mut multiplicities = Vec::new();
    for &(z, r) in positive.iter().rev() {
        zeros.push(-z);
        residuals.push(r);
        multiplicities.push(1);
    }
    if origin_mult > 0 {
        zeros.push(0.0);
        residuals.push(origin_residual);
        multiplicities.push(origin_mult);
    }
    for &(z, r) in &positive {
        zeros.push(z);
        residuals.push(r);
        multiplicities.push(1);
    }
    ZeroSet {
        label,
        n,
        params,
        zeros,
        residuals,
        multiplicities,
    }
}

/// Zeros of F_n: eigenvalues of the n×n symmetric tridiagonal matrix with
/// zero diagonal and off-diagonals a_k = √(a_k²), polished by one Newton
/// step and symmetrized exactly.
pub fn freud_zeros(ft: &FreudTable, n: usize) -> Result<ZeroSet> {
    ft.check_index(n)?;
    if n == 0 {
        return Ok(ZeroSet {
            label: ZeroLabel::Freud,
            n,
            params: None,
            zeros: vec![],
            residuals: vec![],
            multiplicities: vec![],
        });
    }
    let mut m = DMatrix::<f64>::zeros(n, n);
    for k in 1..n {
        let a = ft.a_sq[k].sqrt();
        m[(k - 1, k)] = a;
        m[(k, k - 1)] = a;
    }
    let eig = m.symmetric_eigenvalues();
    let mut vals: Vec<f64> = eig.iter().copied().collect();
    if vals.iter().any(|v| !v.is_finite()) {
        return Err(FreudError::Numeric(format!(
            "eigen-solver returned non-finite zeros for degree {n}"
        )));
    }
    vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    // The spectrum is symmetric with ⌊n/2⌋ positive points (plus the origin
    // for odd n, which the solver returns only up to rounding noise): keep
    // exactly the largest ⌊n/2⌋ eigenvalues and mirror them.
    let positive_count = n / 2;
    if vals[n - positive_count..].iter().any(|&v| v <= 0.0) {
        return Err(FreudError::Numeric(format!(
            "eigen-solver returned a non-positive value among the {positive_count} largest for degree {n}"
        )));
    }
    // Polish positive representatives, then mirror exactly.
    let mut positive = Vec::new();
    for &v in &vals[n - positive_count..] {
        let mut z = v;
        let c = eval_chain(ft, n, z, 1)?;
        let (f, df) = (c.monic(0), c.monic(1));
        if df != 0.0 {
            let step = f / df;
            let trial = z - step;
            let ct = eval_chain(ft, n, trial, 0)?;
            if ct.monic(0).abs() <= f.abs() {
                z = trial;
            }
        }
        let res = eval_chain(ft, n, z, 0)?.monic(0).abs();
        positive.push((z, res));
    }
    let origin_mult = if n % 2 == 1 { 1 } else { 0 };
    Ok(symmetric_zero_set(
        ZeroLabel::Freud,
        n,
        None,
        positive,
        origin_mult,
        0.0,
    ))
}

/// Largest grid size the bracketing engine will try.
const MAX_GRID: usize = 1 << 14;

/// Find `target` zeros of an even-or-odd function on (0, upper]: bracket by
/// sign changes against the sign at 0⁺, refine the grid by doubling until
/// the expected count appears, then bisect each bracket to width 10⁻⁸·scale
/// and sharpen with ≤ 5 Newton steps.
///
/// `floor` bounds the geometric ladder toward the origin. Functions with a
/// multiple origin zero drop below the f64 noise floor long before the
/// abscissa underflows, so callers must keep the ladder above the region
/// where their evaluation is pure rounding noise.
fn positive_axis_zeros<F>(
    eval: &F,
    sign_at_zero_plus: f64,
    target: usize,
    seeds: &[f64],
    upper: f64,
    floor: f64,
) -> Result<Vec<(f64, f64)>>
where
    F: Fn(f64) -> Result<(f64, f64)>,
{
    if target == 0 {
        return Ok(vec![]);
    }
    // Geometric ladder toward the origin: zeros collapse onto 0 as masses grow.
    let mut ladder = Vec::new();
    let mut t = upper / 2.0;
    while t > floor {
        ladder.push(t);
        t /= 2.0;
    }
    let mut uniform = 64usize;
    loop {
        let mut grid: Vec<f64> = seeds
            .iter()
            .copied()
            .chain(ladder.iter().copied())
            .chain((1..=uniform).map(|i| upper * i as f64 / uniform as f64))
            .filter(|&x| x > 0.0 && x <= upper)
            .collect();
        grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
        grid.dedup();

        let mut brackets = Vec::new();
        let mut prev_x = 0.0f64;
        let mut prev_sign = sign_at_zero_plus.signum();
        for &x in &grid {
            let (v, _) = eval(x)?;
            let s = v.signum();
            if v == 0.0 {
                // Landed exactly on a zero: count it as a degenerate bracket.
                brackets.push((prev_x.max(x - 1e-12), x));
                prev_x = x;
                prev_sign = -prev_sign;
                continue;
            }
            if s != prev_sign {
                brackets.push((prev_x, x));
                prev_sign = s;
            }
            prev_x = x;
        }

        if brackets.len() >= target {
            if brackets.len() > target {
                return Err(FreudError::Bracketing(format!(
                    "found {} sign changes where {} zeros were expected (grid of {} points)",
                    brackets.len(),
                    target,
                    grid.len()
                )));
            }
            let mut out = Vec::with_capacity(target);
            for (mut lo, mut hi) in brackets {
                // lo may be the 0⁺ anchor; its sign is known analytically.
                let mut slo = if lo == 0.0 {
                    sign_at_zero_plus.signum()
                } else {
                    eval(lo)?.0.signum()
                };
                while hi - lo > 1e-8 * hi.max(1.0) {
                    let mid = 0.5 * (lo + hi);
                    let (vm, _) = eval(mid)?;
                    if vm == 0.0 {
                        lo = mid;
                        hi = mid;
                        break;
                    }
                    if vm.signum() == slo {
                        lo = mid;
                        slo = vm.signum();
                    } else {
                        hi = mid;
                    }
                }
                let mut z = 0.5 * (lo + hi);
                let (mut fz, mut dfz) = eval(z)?;
                for _ in 0..5 {
                    if dfz == 0.0 || fz == 0.0 {
                        break;
                    }
                    let trial = z - fz / dfz;
                    if !trial.is_finite() {
                        break;
                    }
                    let (ft_, dft_) = eval(trial)?;
                    if ft_.abs() < fz.abs() {
                        z = trial;
                        fz = ft_;
                        dfz = dft_;
                    } else {
                        break;
                    }
                }
                out.push((z, fz.abs()));
            }
            out.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
            return Ok(out);
        }

        if uniform >= MAX_GRID {
            return Err(FreudError::Bracketing(format!(
                "only {} sign changes found for {} expected zeros on (0, {:.3}] with {} grid points",
                brackets.len(),
                target,
                upper,
                grid.len()
            )));
        }
        uniform *= 2;
    }
}

/// Positive zeros of neighboring-degree unmodified polynomials, as bracket
/// seeds.
fn freud_seed_points(ft: &FreudTable, n: usize) -> Result<Vec<f64>> {
    let mut seeds = Vec::new();
    for d in [n.saturating_sub(1), n, n + 1] {
        if d >= 1 && d <= ft.n_max {
            seeds.extend(freud_zeros(ft, d)?.positive());
        }
    }
    Ok(seeds)
}

/// Zeros of the modified polynomial Q_n at the table's masses.
pub fn q_zeros(st: &SobolevTable, ft: &FreudTable, n: usize) -> Result<ZeroSet> {
    if n > st.n_max {
        return Err(FreudError::TableExhausted {
            requested: n,
            n_max: st.n_max,
        });
    }
    if n == 0 {
        return Ok(ZeroSet {
            label: ZeroLabel::Sobolev,
            n,
            params: Some(st.params),
            zeros: vec![],
            residuals: vec![],
            multiplicities: vec![],
        });
    }
    let mut seeds = freud_seed_points(ft, n)?;
    if n >= 3 {
        seeds.extend(limit_seed_points(ft, n)?);
    }
    let upper = seeds.iter().copied().fold(1.0f64, f64::max) + 2.0;
    let target = n / 2;
    let sign0 = if n % 2 == 0 { st.q0[n] } else { st.q1[n] };
    let eval = |x: f64| -> Result<(f64, f64)> {
        let v = eval_q(st, ft, n, x, 1)?;
        Ok((v[0], v[1]))
    };
    // The innermost zero collapses onto the origin like M₁^{-1/2}; keep the
    // ladder deep. Near 0 the evaluation stays relatively accurate (every
    // term of the modified polynomial is Θ(x) there for odd n).
    let positive = positive_axis_zeros(&eval, sign0, target, &seeds, upper, 1e-12)?;
    let origin_mult = if n % 2 == 1 { 1 } else { 0 };
    Ok(symmetric_zero_set(
        ZeroLabel::Sobolev,
        n,
        Some(st.params),
        positive,
        origin_mult,
        0.0,
    ))
}

fn limit_seed_points(ft: &FreudTable, n: usize) -> Result<Vec<f64>> {
    if (n % 2 == 0 && n >= 4) || (n % 2 == 1 && n >= 5) {
        let label = if n % 2 == 0 {
            ZeroLabel::LimitG
        } else {
            ZeroLabel::LimitJ
        };
        Ok(limit_and_kernel_zeros(ft, n, label)?.positive())
    } else {
        Ok(vec![])
    }
}

/// Per-gap interlacing diagnosis for the pair (Q_n, Q_{n+1}).
#[derive(Clone, Debug)]
pub struct InterlacingReport {
    pub n: usize,
    pub params: SobolevParams,
    /// One flag per adjacent gap of Q_{n+1}'s zeros: does exactly one zero
    /// of Q_n lie strictly inside?
    pub gaps: Vec<bool>,
    /// All gaps hold.
    pub holds: bool,
}

/// Diagnose interlacing of the zeros of Q_n inside the gaps of Q_{n+1}.
pub fn interlacing_report(st: &SobolevTable, ft: &FreudTable, n: usize) -> Result<InterlacingReport> {
    if n < 2 {
        return Err(FreudError::Domain(format!(
            "interlacing report needs n >= 2, got {n}"
        )));
    }
    let lower = q_zeros(st, ft, n)?;
    let upper = q_zeros(st, ft, n + 1)?;
    let uz = &upper.zeros;
    let mut gaps = Vec::with_capacity(uz.len().saturating_sub(1));
    for w in uz.windows(2) {
        let count = lower
            .zeros
            .iter()
            .filter(|&&z| z > w[0] && z < w[1])
            .count();
        gaps.push(count == 1);
    }
    let holds = gaps.iter().all(|&g| g);
    Ok(InterlacingReport {
        n,
        params: st.params,
        gaps,
        holds,
    })
}

/// K^{(0,1)}_n(x,0) and its x-derivative in one pass.
fn k01_and_deriv(ft: &FreudTable, n: usize, x: f64) -> Result<(f64, f64)> {
    let bv = boundary_values(ft, n)?;
    let mut prev = [1.0, 0.0];
    let mut cur = [x, 1.0];
    let mut s = [0.0, 0.0];
    for k in 0..=n {
        let vals = if k == 0 {
            prev
        } else {
            if k >= 2 {
                let a = ft.a_sq[k - 1];
                let next = [x * cur[0] - a * prev[0], cur[0] + x * cur[1] - a * prev[1]];
                prev = cur;
                cur = next;
            }
            cur
        };
        s[0] += vals[0] * bv.d1[k] / ft.norm_sq[k];
        s[1] += vals[1] * bv.d1[k] / ft.norm_sq[k];
    }
    Ok((s[0], s[1]))
}

/// Zeros of a limit polynomial (labels `LimitG`, `LimitJ`) or of the kernel
/// derivative x ↦ K^{(0,1)}_n(x,0) (label `Kernel01`, odd n).
///
/// The origin is inserted analytically: multiplicity 2 for G_{2n},
/// 3 for J_{2n+1}, 1 for the (odd) kernel derivative.
pub fn limit_and_kernel_zeros(ft: &FreudTable, n: usize, label: ZeroLabel) -> Result<ZeroSet> {
    let seeds = freud_seed_points(ft, n)?;
    let upper = seeds.iter().copied().fold(1.0f64, f64::max) + 2.0;
    // These functions have a fixed multiple zero at the origin and no
    // collapsing zeros: their smallest positive zero is comparable to the
    // smallest seed, and below it the evaluation (which vanishes like x² or
    // x³) sinks under rounding noise. Keep the ladder well above that.
    let floor = seeds.iter().copied().fold(f64::INFINITY, f64::min) / 8.0;
    let bv = boundary_values(ft, n.min(ft.n_max))?;
    match label {
        ZeroLabel::LimitG => {
            if n % 2 != 0 || n < 4 {
                return Err(FreudError::Domain(format!(
                    "even limit polynomial needs even n >= 4, got {n}"
                )));
            }
            // Sign at 0⁺: G ~ c·x² with c from G″(0)/2; use the second
            // derivative of the evaluation directly at a small abscissa.
            let eval = |x: f64| -> Result<(f64, f64)> {
                let v = eval_limit_poly_derivs(ft, n, x, 1)?;
                Ok((v[0], v[1]))
            };
            let sign0 = eval(1e-4)?.0;
            let target = (n - 2) / 2;
            let positive = positive_axis_zeros(&eval, sign0, target, &seeds, upper, floor)?;
            Ok(symmetric_zero_set(ZeroLabel::LimitG, n, None, positive, 2, 0.0))
        }
        ZeroLabel::LimitJ => {
            if n % 2 != 1 || n < 5 {
                return Err(FreudError::Domain(format!(
                    "odd limit polynomial zero set needs odd n >= 5, got {n}"
                )));
            }
            let eval = |x: f64| -> Result<(f64, f64)> {
                let v = eval_limit_poly_derivs(ft, n, x, 1)?;
                Ok((v[0], v[1]))
            };
            let sign0 = eval(1e-4)?.0;
            let target = (n - 3) / 2;
            let positive = positive_axis_zeros(&eval, sign0, target, &seeds, upper, floor)?;
            Ok(symmetric_zero_set(ZeroLabel::LimitJ, n, None, positive, 3, 0.0))
        }
        ZeroLabel::Kernel01 => {
            if n % 2 != 1 {
                return Err(FreudError::Domain(format!(
                    "kernel-derivative zero set is defined for odd n, got {n}"
                )));
            }
            if n + 1 > ft.n_max {
                return Err(FreudError::TableExhausted {
                    requested: n + 1,
                    n_max: ft.n_max,
                });
            }
            // K^{(0,1)}_n(x,0) = f₁′(0)f₁(x)/‖F₁‖² + … ; near 0⁺ the sign is
            // that of the leading linear coefficient Σ F_k′(0)²/‖F_k‖²·x/… :
            // the k = 1 term x·1/‖F₁‖² dominates a polynomial with positive
            // slope at the origin only when the full sum does; evaluate the
            // derivative at 0 analytically instead.
            let mut slope0 = 0.0;
            for k in (1..=n).step_by(2) {
                // d/dx F_k(x)|₀ enters only via odd k; F_k′(0) = bv.d1[k].
                slope0 += bv.d1[k] * bv.d1[k] / ft.norm_sq[k];
            }
            let eval = |x: f64| k01_and_deriv(ft, n, x);
            let target = (n - 1) / 2;
            let positive = positive_axis_zeros(&eval, slope0, target, &seeds, upper, floor)?;
            Ok(symmetric_zero_set(ZeroLabel::Kernel01, n, None, positive, 1, 0.0))
        }
        other => Err(FreudError::Domain(format!(
            "limit_and_kernel_zeros handles limit_G/limit_J/kernel01, got {other}"
        ))),
    }
}

/// Trajectories and convergence-rate diagnostics for the positive zeros of
/// Q_{n_odd}(·; M₀=0, M₁) as M₁ runs over an increasing grid.
#[derive(Clone, Debug)]
pub struct M1Sweep {
    pub n_odd: usize,
    pub m1_grid: Vec<f64>,
    /// y_k: limits of the positive zeros (y₁ = 0, then the positive zeros of
    /// the odd limit polynomial).
    pub limit_zeros: Vec<f64>,
    /// trajectories[k][i] = η_{k+1}(M₁ grid[i]).
    pub trajectories: Vec<Vec<f64>>,
    /// Strict monotone decrease along the grid, per zero index.
    pub monotone_decreasing: Vec<bool>,
    /// Limit of each trajectory extrapolated polynomially in 1/M₁ (applied
    /// to η², the cancellation-free variable), through the 4 largest grid
    /// points.
    pub extrapolated: Vec<f64>,
    /// scaled_products[k][i] = M₁·K^{(1,1)}_{n−2}(0,0)·(η_k² − y_k²).
    pub scaled_products: Vec<Vec<f64>>,
    /// Proof-side targets: −2y_k F_n(y_k)/J_n′(y_k) for y_k > 0 and
    /// −6F_n′(0)/J_n‴(0) for the origin trajectory.
    pub rate_targets: Vec<f64>,
}

/// Evaluate the limit of a smooth function of t = 1/M₁ at t = 0 from samples
/// (t_i, v_i) by Lagrange extrapolation through up to 4 points.
fn extrapolate_to_zero(ts: &[f64], vs: &[f64]) -> f64 {
    let m = ts.len().min(4);
    let ts = &ts[..m];
    let vs = &vs[..m];
    let mut acc = 0.0;
    for i in 0..m {
        let mut w = 1.0;
        for j in 0..m {
            if i != j {
                w *= ts[j] / (ts[j] - ts[i]);
            }
        }
        acc += w * vs[i];
    }
    acc
}

/// Sweep M₁ over `m1_grid` for the odd polynomial Q_{n_odd} (M₀ = 0).
pub fn m1_sweep(ft: &FreudTable, n_odd: usize, m1_grid: &[f64]) -> Result<M1Sweep> {
    if n_odd % 2 != 1 || n_odd < 3 {
        return Err(FreudError::Domain(format!(
            "sweep needs an odd degree >= 3, got {n_odd}"
        )));
    }
    if m1_grid.is_empty() || m1_grid.windows(2).any(|w| w[0] >= w[1]) || m1_grid[0] <= 0.0 {
        return Err(FreudError::Config(
            "mass grid must be positive and strictly increasing".into(),
        ));
    }
    let n_pos = (n_odd - 1) / 2;
    // Limits y_k: origin plus positive zeros of the odd limit polynomial.
    let mut limit_zeros = vec![0.0];
    if n_odd >= 5 {
        limit_zeros.extend(limit_and_kernel_zeros(ft, n_odd, ZeroLabel::LimitJ)?.positive());
    }
    let k11 = crate::freud::kernel_at_zero(ft, n_odd - 2)?.k11;

    let mut trajectories = vec![Vec::with_capacity(m1_grid.len()); n_pos];
    for &m1 in m1_grid {
        let st = build_sobolev_table(ft, SobolevParams::new(0.0, m1)?, n_odd)?;
        let zs = q_zeros(&st, ft, n_odd)?;
        let pos = zs.positive();
        if pos.len() != n_pos {
            return Err(FreudError::Numeric(format!(
                "expected {} positive zeros at M1 = {m1}, found {}",
                n_pos,
                pos.len()
            )));
        }
        for (k, &z) in pos.iter().enumerate() {
            trajectories[k].push(z);
        }
    }

    let monotone_decreasing = trajectories
        .iter()
        .map(|tr| tr.windows(2).all(|w| w[1] < w[0]))
        .collect();

    // Extrapolate η² (cancellation-free near the collapsing origin zero)
    // linearly-in-1/M₁ through the largest grid points.
    let mut extrapolated = Vec::with_capacity(n_pos);
    let mut scaled_products = Vec::with_capacity(n_pos);
    for (k, tr) in trajectories.iter().enumerate() {
        let ts: Vec<f64> = m1_grid.iter().rev().map(|&m| 1.0 / m).collect();
        let vs: Vec<f64> = tr.iter().rev().map(|&z| z * z).collect();
        let lim_sq = extrapolate_to_zero(&ts, &vs).max(0.0);
        extrapolated.push(lim_sq.sqrt());
        let y = limit_zeros[k];
        scaled_products.push(
            m1_grid
                .iter()
                .zip(tr)
                .map(|(&m1, &z)| m1 * k11 * (z * z - y * y))
                .collect(),
        );
    }

    let mut rate_targets = Vec::with_capacity(n_pos);
    for (k, &y) in limit_zeros.iter().enumerate().take(n_pos) {
        if k == 0 {
            let bv = boundary_values(ft, n_odd)?;
            let j3 = eval_limit_poly_derivs(ft, n_odd, 0.0, 3)?[3];
            rate_targets.push(-6.0 * bv.d1[n_odd] / j3);
        } else {
            let f = eval_chain(ft, n_odd, y, 0)?.monic(0);
            let jp = eval_limit_poly_derivs(ft, n_odd, y, 1)?[1];
            rate_targets.push(-2.0 * y * f / jp);
        }
    }

    Ok(M1Sweep {
        n_odd,
        m1_grid: m1_grid.to_vec(),
        limit_zeros,
        trajectories,
        monotone_decreasing,
        extrapolated,
        scaled_products,
        rate_targets,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffs::build_freud_table;
    use std::sync::OnceLock;

    fn table() -> &'static FreudTable {
        static T: OnceLock<FreudTable> = OnceLock::new();
        T.get_or_init(|| build_freud_table(40, 64).unwrap())
    }

    fn st(m0: f64, m1: f64, n_max: usize) -> SobolevTable {
        build_sobolev_table(table(), SobolevParams::new(m0, m1).unwrap(), n_max).unwrap()
    }

    // Positive zeros of F₇, computed independently at 50 decimal digits.
    const F7_ZEROS: [f64; 3] = [0.534_823_393_532_223_8, 0.986_410_170_777_826_7, 1.385_070_614_857_894_4];
    // Positive zeros of the degree-7 odd limit polynomial.
    const J7_ZEROS: [f64; 2] = [0.920_416_366_546_388_8, 1.352_730_614_779_862];
    // Positive zeros of x ↦ K^{(0,1)}(x,0) at degrees 5 and 7.
    const K01_5_ZEROS: [f64; 2] = [0.808_866_025_7, 1.277_020_803];
    const K01_7_ZEROS: [f64; 3] = [0.682_909_508_8, 1.091_073_28, 1.458_422_174];

    #[test]
    fn freud_zeros_reference() {
        let ft = table();
        let z2 = freud_zeros(ft, 2).unwrap();
        assert!((z2.zeros[1] - ft.a_sq[1].sqrt()).abs() < 1e-12);
        let z4 = freud_zeros(ft, 4).unwrap();
        assert!((z4.zeros[2] - 0.396_150_06).abs() < 1e-6);
        assert!((z4.zeros[3] - 1.042_994_8).abs() < 1e-6);
        let z5 = freud_zeros(ft, 5).unwrap();
        assert_eq!(z5.zeros[2], 0.0);
        assert!((z5.zeros[3] - 0.655_248_17).abs() < 1e-6);
        assert!((z5.zeros[4] - 1.180_458).abs() < 1e-6);
        let z7 = freud_zeros(ft, 7).unwrap();
        for (i, &y) in F7_ZEROS.iter().enumerate() {
            assert!((z7.zeros[4 + i] - y).abs() < 1e-12, "F7 zero {i}");
        }
        // Symmetry, simplicity, residual scale.
        for n in [2usize, 4, 5, 7, 12, 19] {
            let zs = freud_zeros(ft, n).unwrap();
            assert!(zs.is_symmetric());
            assert_eq!(zs.total_count(), n);
            assert!(zs.zeros.windows(2).all(|w| w[0] < w[1]));
            for (z, r) in zs.zeros.iter().zip(&zs.residuals) {
                let scale = eval_chain(ft, n, *z, 1).unwrap().monic(1).abs().max(1.0);
                assert!(*r <= 1e-10 * scale, "residual {r} at zero {z} of F_{n}");
            }
        }
    }

    #[test]
    fn q_zeros_reduce_to_freud_at_zero_masses() {
        let ft = table();
        let s = st(0.0, 0.0, 9);
        for n in [4usize, 5, 8, 9] {
            let qf = q_zeros(&s, ft, n).unwrap();
            let fz = freud_zeros(ft, n).unwrap();
            for (a, b) in qf.zeros.iter().zip(&fz.zeros) {
                assert!((a - b).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn q_zeros_match_tabulated_values() {
        let ft = table();
        // Derivative mass only.
        let cases_m1 = [
            (0.2, 0.458_455, 1.135_781),
            (0.4, 0.371_898, 1.125_763),
            (1.0, 0.261_023, 1.117_382),
        ];
        for (m1, inner, outer) in cases_m1 {
            let s = st(0.0, m1, 7);
            let zs = q_zeros(&s, ft, 5).unwrap();
            let pos = zs.positive();
            assert!((pos[0] - inner).abs() < 1e-5, "inner zero at M1 = {m1}");
            assert!((pos[1] - outer).abs() < 1e-5, "outer zero at M1 = {m1}");
            assert_eq!(zs.zeros[2], 0.0);
        }
        // Value mass only: the even polynomial is M₁-independent.
        for m1 in [0.0, 0.9, 2.0] {
            let s = st(1.0, m1, 6);
            let zs = q_zeros(&s, ft, 4).unwrap();
            let pos = zs.positive();
            assert!((pos[0] - 0.284_325_42).abs() < 1e-6);
            assert!((pos[1] - 1.023_535_5).abs() < 1e-6);
        }
        // Mixed masses on the odd polynomial (M₀ has no effect there).
        for (m1, inner) in [(0.9, 0.272_822_5), (2.0, 0.192_081_4)] {
            let s = st(1.0, m1, 7);
            let zs = q_zeros(&s, ft, 5).unwrap();
            assert!((zs.positive()[0] - inner).abs() < 1e-5, "M1 = {m1}");
        }
        for n in [4usize, 5] {
            let s = st(1.0, 0.9, 7);
            let zs = q_zeros(&s, ft, n).unwrap();
            assert!(zs.is_symmetric());
            assert_eq!(zs.total_count(), n);
        }
    }

    #[test]
    fn interlacing_holds_and_ruptures_per_tables() {
        let ft = table();
        // Unmodified family: classical interlacing.
        let rep = interlacing_report(&st(0.0, 0.0, 7), ft, 4).unwrap();
        assert!(rep.holds);
        // Small derivative mass: still interlacing.
        let rep = interlacing_report(&st(0.0, 0.2, 7), ft, 4).unwrap();
        assert!(rep.holds);
        // Larger derivative mass: rupture (the bold table rows).
        let rep = interlacing_report(&st(0.0, 0.4, 7), ft, 4).unwrap();
        assert!(!rep.holds);
        let rep = interlacing_report(&st(1.0, 0.9, 7), ft, 4).unwrap();
        assert!(!rep.holds);
        assert!(interlacing_report(&st(0.0, 0.0, 7), ft, 1).is_err());
    }

    #[test]
    fn limit_and_kernel_zero_sets() {
        let ft = table();
        let j7 = limit_and_kernel_zeros(ft, 7, ZeroLabel::LimitJ).unwrap();
        let pos = j7.positive();
        assert!((pos[0] - J7_ZEROS[0]).abs() < 1e-10);
        assert!((pos[1] - J7_ZEROS[1]).abs() < 1e-10);
        assert_eq!(j7.total_count(), 7);
        assert_eq!(j7.multiplicities, vec![1, 1, 3, 1, 1]);
        assert!(j7.is_symmetric());

        let g8 = limit_and_kernel_zeros(ft, 8, ZeroLabel::LimitG).unwrap();
        assert_eq!(g8.total_count(), 8);
        assert_eq!(g8.positive().len(), 3);
        assert_eq!(g8.multiplicities[3], 2);

        let k5 = limit_and_kernel_zeros(ft, 5, ZeroLabel::Kernel01).unwrap();
        let p5 = k5.positive();
        assert!((p5[0] - K01_5_ZEROS[0]).abs() < 1e-9);
        assert!((p5[1] - K01_5_ZEROS[1]).abs() < 1e-9);
        assert_eq!(k5.total_count(), 5);
        let k7 = limit_and_kernel_zeros(ft, 7, ZeroLabel::Kernel01).unwrap();
        let p7 = k7.positive();
        for (i, &y) in K01_7_ZEROS.iter().enumerate() {
            assert!((p7[i] - y).abs() < 1e-9, "K01_7 zero {i}");
        }
        assert!(limit_and_kernel_zeros(ft, 6, ZeroLabel::Kernel01).is_err());
        assert!(limit_and_kernel_zeros(ft, 7, ZeroLabel::LimitG).is_err());
        assert!(limit_and_kernel_zeros(ft, 7, ZeroLabel::Freud).is_err());
    }

    #[test]
    fn kernel_and_freud_zero_interlacings() {
        let ft = table();
        // F_{2n+1} zeros interlace with the kernel-derivative zeros of
        // degree 2n−1, and consecutive odd kernel derivatives interlace.
        for m in 2..=10usize {
            let n = 2 * m + 1;
            let f = freud_zeros(ft, n).unwrap().positive();
            let k_lo = limit_and_kernel_zeros(ft, n - 2, ZeroLabel::Kernel01)
                .unwrap()
                .positive();
            for i in 0..k_lo.len() {
                assert!(
                    f[i] < k_lo[i] && k_lo[i] < f[i + 1],
                    "F/K01 interlacing fails at n={n}, i={i}"
                );
            }
            if n >= 7 {
                let k_hi = limit_and_kernel_zeros(ft, n - 2, ZeroLabel::Kernel01)
                    .unwrap()
                    .positive();
                let k_lo2 = limit_and_kernel_zeros(ft, n - 4, ZeroLabel::Kernel01)
                    .unwrap()
                    .positive();
                for i in 0..k_lo2.len() {
                    assert!(
                        k_hi[i] < k_lo2[i] && k_lo2[i] < k_hi[i + 1],
                        "K01/K01 interlacing fails at n={n}, i={i}"
                    );
                }
            }
        }
        // Positive zeros of the odd limit polynomial interlace with those of
        // F at the same degree: x_k < y_{k+1} < x_{k+1}.
        for n in [7usize, 11, 15] {
            let f = freud_zeros(ft, n).unwrap().positive();
            let j = limit_and_kernel_zeros(ft, n, ZeroLabel::LimitJ)
                .unwrap()
                .positive();
            for (k, &y) in j.iter().enumerate() {
                assert!(f[k] < y && y < f[k + 1], "J/F interlacing fails n={n} k={k}");
            }
        }
    }

    #[test]
    fn theorem_chain_on_positive_axis() {
        let ft = table();
        // 0 < η₁ < x₁ < y₂ < η₂ < x₂ < … for odd degrees and any value mass.
        for n in [7usize, 11, 15] {
            let x = freud_zeros(ft, n).unwrap().positive();
            let y = limit_and_kernel_zeros(ft, n, ZeroLabel::LimitJ)
                .unwrap()
                .positive();
            for m1 in [0.1, 1.0, 10.0] {
                for m0 in [0.0, 2.5] {
                    let s = st(m0, m1, n + 2);
                    let eta = q_zeros(&s, ft, n).unwrap().positive();
                    for k in 0..eta.len() {
                        assert!(eta[k] > 0.0 && eta[k] < x[k], "eta < x fails n={n} k={k}");
                        if k >= 1 {
                            assert!(
                                y[k - 1] < eta[k],
                                "y < eta fails n={n} k={k} m1={m1}"
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn sweep_trajectories_and_rates() {
        let ft = table();
        let grid = [0.03, 0.1, 0.3, 1.0, 3.0, 10.0, 30.0, 100.0, 300.0, 1e3, 3e3, 1e4];
        let sweep = m1_sweep(ft, 7, &grid).unwrap();
        assert_eq!(sweep.trajectories.len(), 3);
        assert!(sweep.monotone_decreasing.iter().all(|&m| m));
        // Trajectories approach the limit zeros; extrapolation sharpens them.
        assert!(sweep.extrapolated[0].abs() < 1e-3);
        assert!((sweep.extrapolated[1] - J7_ZEROS[0]).abs() < 1e-6);
        assert!((sweep.extrapolated[2] - J7_ZEROS[1]).abs() < 1e-6);
        // Scaled products converge to the proof-side targets.
        for k in 0..3 {
            let last = *sweep.scaled_products[k].last().unwrap();
            let t = sweep.rate_targets[k];
            assert!(
                (last / t - 1.0).abs() < 5e-3,
                "rate constant k={k}: {last} vs {t}"
            );
        }
        // 1/M₁ decay of η_k − y_k for the non-collapsing zeros: log-log slope.
        for k in [1usize, 2] {
            let y = sweep.limit_zeros[k];
            let lo = (sweep.trajectories[k][7] - y).abs(); // M1 = 100
            let hi = (sweep.trajectories[k][11] - y).abs(); // M1 = 10000
            let slope = (hi / lo).ln() / (1e4f64 / 1e2).ln();
            assert!((slope + 1.0).abs() < 0.05, "decay slope k={k}: {slope}");
        }
        // M₁ = 0 would mean unmodified zeros; the grid must be positive.
        assert!(m1_sweep(ft, 7, &[0.0, 1.0]).is_err());
        assert!(m1_sweep(ft, 6, &[1.0]).is_err());
        // Short qualitative grid: decreasing positive zeros.
        let small = m1_sweep(ft, 7, &[0.03, 0.05, 0.09]).unwrap();
        assert!(small.monotone_decreasing.iter().all(|&m| m));
    }

    #[test]
    fn csv_serialization_layout() {
        let ft = table();
        let s = st(1.0, 0.5, 6);
        let zs = q_zeros(&s, ft, 5).unwrap();
        let mut buf = Vec::new();
        zs.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "label,n,M0,M1,k,zero,residual");
        assert_eq!(lines.len(), 1 + zs.zeros.len());
        assert!(lines[1].starts_with("sobolev,5,1,0.5,1,"));
        let fz = freud_zeros(ft, 3).unwrap();
        let mut buf = Vec::new();
        fz.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.lines().nth(1).unwrap().starts_with("freud,3,,,1,"));
    }
}
