//! Recurrence coefficients a_n² for the weight e^{-x⁴}, their norms and
//! orthonormalization constants.
//!
//! The coefficients satisfy the string equation 4a_n²(a_{n+1}²+a_n²+a_{n-1}²) = n
//! with a_0² = 0 and a_1² = Γ(3/4)/Γ(1/4). Forward recursion of that relation
//! is numerically unstable (roughly 0.6 decimal digits lost per step), so the
//! default builder solves the truncated nonlinear system by a damped Newton
//! iteration in arbitrary precision and rounds the result to f64. A forward
//! high-precision recursion and an independent discretized-measure procedure
//! are provided as cross-validation oracles.

use crate::error::{FreudError, Result};
use crate::hp::HpCtx;
use crate::quad::{truncation_point, HpQuad};
use rug::Float;
use std::fmt;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

/// How a [`FreudTable`] was produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MethodTag {
    /// Damped Newton on the truncated string-equation system (default).
    NewtonSystem,
    /// Forward recursion in arbitrary precision from the exact a_1².
    ForwardHp,
    /// Discretized-measure (Stieltjes) orthogonalization oracle.
    Stieltjes,
}

impl fmt::Display for MethodTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            MethodTag::NewtonSystem => "newton_system",
            MethodTag::ForwardHp => "forward_hp",
            MethodTag::Stieltjes => "stieltjes",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for MethodTag {
    type Err = FreudError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "newton_system" => Ok(MethodTag::NewtonSystem),
            "forward_hp" => Ok(MethodTag::ForwardHp),
            "stieltjes" => Ok(MethodTag::Stieltjes),
            other => Err(FreudError::Parse(format!("unknown method tag {other:?}"))),
        }
    }
}

/// The Γ-function constants anchoring the construction.
pub struct GammaConstants {
    pub digits: u32,
    pub gamma_quarter: Float,
    pub gamma_three_quarter: Float,
    /// a_1² = Γ(3/4)/Γ(1/4).
    pub a1_sq_exact: Float,
    /// μ₀ = ∫ e^{-x⁴} dx = Γ(1/4)/2.
    pub mu0: Float,
}

/// Compute the Γ constants at the requested precision.
pub fn gamma_constants(precision_digits: u32) -> Result<GammaConstants> {
    if precision_digits < 16 {
        return Err(FreudError::Config(format!(
            "precision_digits must be at least 16, got {precision_digits}"
        )));
    }
    let ctx = HpCtx::new(precision_digits);
    let gamma_quarter = ctx.gamma(&ctx.ratio(1, 4));
    let gamma_three_quarter = ctx.gamma(&ctx.ratio(3, 4));
    let a1_sq_exact = Float::with_val(ctx.bits(), &gamma_three_quarter / &gamma_quarter);
    let mu0 = Float::with_val(ctx.bits(), &gamma_quarter / 2u32);
    Ok(GammaConstants {
        digits: precision_digits,
        gamma_quarter,
        gamma_three_quarter,
        a1_sq_exact,
        mu0,
    })
}

/// Lew–Quarles large-n estimate a_n² ≈ (n/12)^{1/2}(1 + 1/(24n²)).
pub fn lew_quarles_estimate(n: usize) -> Result<f64> {
    if n == 0 {
        return Err(FreudError::Domain("Lew-Quarles estimate requires n >= 1".into()));
    }
    let nf = n as f64;
    Ok((nf / 12.0).sqrt() * (1.0 + 1.0 / (24.0 * nf * nf)))
}

/// Recurrence coefficients, norms, and leading coefficients for the monic
/// orthogonal polynomials of e^{-x⁴}, indices 0..=n_max.
///
/// `norm_sq` is chained in f64 (`norm_sq[n] = norm_sq[n-1] * a_sq[n]`) so that
/// the defining identity holds bit-exactly on the stored values, and
/// `gamma[n] = norm_sq[n]^{-1/2}` likewise.
#[derive(Clone, Debug)]
pub struct FreudTable {
    pub n_max: usize,
    pub a_sq: Vec<f64>,
    pub norm_sq: Vec<f64>,
    pub gamma: Vec<f64>,
    pub precision_digits: u32,
    pub method_tag: MethodTag,
}

impl FreudTable {
    pub(crate) fn check_index(&self, n: usize) -> Result<()> {
        if n > self.n_max {
            Err(FreudError::TableExhausted {
                requested: n,
                n_max: self.n_max,
            })
        } else {
            Ok(())
        }
    }

    /// φ_n(0) = a_{n+1}² + a_n².
    pub fn phi0(&self, n: usize) -> f64 {
        self.a_sq[n + 1] + self.a_sq[n]
    }

    /// |4 a_n²(a_{n+1}²+a_n²+a_{n-1}²) - n| for 1 ≤ n ≤ n_max-1.
    pub fn string_residual(&self, n: usize) -> f64 {
        let a = &self.a_sq;
        (4.0 * a[n] * (a[n + 1] + a[n] + a[n - 1]) - n as f64).abs()
    }

    fn finish(a_hp: &[Float], n_max: usize, mu0: &Float, digits: u32, tag: MethodTag) -> Self {
        let mut a_sq = vec![0.0; n_max + 1];
        for (n, v) in a_hp.iter().enumerate().take(n_max + 1).skip(1) {
            a_sq[n] = v.to_f64();
        }
        let mut norm_sq = vec![0.0; n_max + 1];
        let mut gamma = vec![0.0; n_max + 1];
        norm_sq[0] = mu0.to_f64();
        gamma[0] = 1.0 / norm_sq[0].sqrt();
        for n in 1..=n_max {
            norm_sq[n] = norm_sq[n - 1] * a_sq[n];
            gamma[n] = 1.0 / norm_sq[n].sqrt();
        }
        FreudTable {
            n_max,
            a_sq,
            norm_sq,
            gamma,
            precision_digits: digits,
            method_tag: tag,
        }
    }

    /// Write the table as a columnar text cache. The f64 columns use the
    /// shortest round-trip decimal representation, so a reload is bit-exact.
    pub fn write_cache<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let mut f = std::fs::File::create(path)?;
        writeln!(f, "# freud-sobolev coefficient table v1")?;
        writeln!(
            f,
            "# n_max={} precision_digits={} method_tag={}",
            self.n_max, self.precision_digits, self.method_tag
        )?;
        writeln!(f, "# columns: n,a_sq,norm_sq,gamma")?;
        for n in 0..=self.n_max {
            writeln!(f, "{},{},{},{}", n, self.a_sq[n], self.norm_sq[n], self.gamma[n])?;
        }
        Ok(())
    }

    /// Reload a cache written by [`FreudTable::write_cache`].
    pub fn read_cache<P: AsRef<Path>>(path: P) -> Result<Self> {
        let f = std::fs::File::open(path)?;
        let reader = BufReader::new(f);
        let mut n_max = None;
        let mut digits = None;
        let mut tag = None;
        let mut rows: Vec<(usize, f64, f64, f64)> = Vec::new();
        for line in reader.lines() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                for kv in rest.split_whitespace() {
                    if let Some((k, v)) = kv.split_once('=') {
                        match k {
                            "n_max" => {
                                n_max = Some(v.parse::<usize>().map_err(|e| {
                                    FreudError::Parse(format!("bad n_max {v:?}: {e}"))
                                })?)
                            }
                            "precision_digits" => {
                                digits = Some(v.parse::<u32>().map_err(|e| {
                                    FreudError::Parse(format!("bad precision_digits {v:?}: {e}"))
                                })?)
                            }
                            "method_tag" => tag = Some(v.parse::<MethodTag>()?),
                            _ => {}
                        }
                    }
                }
                continue;
            }
            let mut parts = line.split(',');
            let mut next = || {
                parts
                    .next()
                    .ok_or_else(|| FreudError::Parse(format!("short row {line:?}")))
            };
            let n: usize = next()?
                .parse()
                .map_err(|e| FreudError::Parse(format!("bad index in {line:?}: {e}")))?;
            let a: f64 = next()?
                .parse()
                .map_err(|e| FreudError::Parse(format!("bad a_sq in {line:?}: {e}")))?;
            let ns: f64 = next()?
                .parse()
                .map_err(|e| FreudError::Parse(format!("bad norm_sq in {line:?}: {e}")))?;
            let g: f64 = next()?
                .parse()
                .map_err(|e| FreudError::Parse(format!("bad gamma in {line:?}: {e}")))?;
            rows.push((n, a, ns, g));
        }
        let n_max = n_max.ok_or_else(|| FreudError::Parse("missing n_max header".into()))?;
        let digits = digits.ok_or_else(|| FreudError::Parse("missing precision_digits header".into()))?;
        let tag = tag.ok_or_else(|| FreudError::Parse("missing method_tag header".into()))?;
        if rows.len() != n_max + 1 {
            return Err(FreudError::Parse(format!(
                "expected {} rows, found {}",
                n_max + 1,
                rows.len()
            )));
        }
        let mut a_sq = vec![0.0; n_max + 1];
        let mut norm_sq = vec![0.0; n_max + 1];
        let mut gamma = vec![0.0; n_max + 1];
        for (n, a, ns, g) in rows {
            if n > n_max {
                return Err(FreudError::Parse(format!("row index {n} out of range")));
            }
            a_sq[n] = a;
            norm_sq[n] = ns;
            gamma[n] = g;
        }
        Ok(FreudTable {
            n_max,
            a_sq,
            norm_sq,
            gamma,
            precision_digits: digits,
            method_tag: tag,
        })
    }
}

/// Scaled residual max_n |G_n| / max(1, n) of the string system.
fn scaled_residual(a: &[Float], n_unknowns: usize, bits: u32) -> f64 {
    let mut worst = 0.0f64;
    for n in 1..=n_unknowns {
        let sum = Float::with_val(bits, &a[n + 1] + &a[n]) + &a[n - 1];
        let g = Float::with_val(bits, 4u32 * &a[n]) * sum - Float::with_val(bits, n as u32);
        let scaled = g.to_f64().abs() / (n as f64).max(1.0);
        worst = worst.max(scaled);
    }
    worst
}

/// Build the coefficient table by damped Newton on the truncated string
/// system for (a_1², …, a_N²), N = n_max + 50, with boundary a_0² = 0 and tail
/// closure a_{N+1}² = Lew–Quarles(N+1). The buffer rows are discarded.
///
/// The computed a_1² must match Γ(3/4)/Γ(1/4) within 1e-10; this certifies
/// that Newton landed on the positive (physical) solution branch.
pub fn build_freud_table(n_max: usize, precision_digits: u32) -> Result<FreudTable> {
    if n_max < 2 {
        return Err(FreudError::Domain(format!("n_max must be >= 2, got {n_max}")));
    }
    let gc = gamma_constants(precision_digits)?;
    let ctx = HpCtx::new(precision_digits);
    let bits = ctx.bits();
    let n_sys = n_max + 50;

    // a[0..=n_sys+1]; a[0] = 0 and a[n_sys+1] fixed, the rest unknowns.
    let mut a: Vec<Float> = Vec::with_capacity(n_sys + 2);
    a.push(ctx.zero());
    for n in 1..=n_sys + 1 {
        a.push(ctx.from_f64(lew_quarles_estimate(n)?));
    }

    const TOL: f64 = 1e-14;
    const MAX_ITER: usize = 200;
    let mut res = scaled_residual(&a, n_sys, bits);
    let mut converged = res <= TOL;
    let mut iterations = 0;
    while !converged && iterations < MAX_ITER {
        iterations += 1;
        // Tridiagonal Jacobian: dG_n/da_{n-1} = 4a_n, dG_n/da_n = 4(a_{n+1}+2a_n+a_{n-1}),
        // dG_n/da_{n+1} = 4a_n. Solve J δ = -G by the Thomas algorithm.
        let mut sub = Vec::with_capacity(n_sys + 1);
        let mut diag = Vec::with_capacity(n_sys + 1);
        let mut sup = Vec::with_capacity(n_sys + 1);
        let mut rhs = Vec::with_capacity(n_sys + 1);
        sub.push(ctx.zero());
        diag.push(ctx.zero());
        sup.push(ctx.zero());
        rhs.push(ctx.zero());
        for n in 1..=n_sys {
            let four_an = Float::with_val(bits, 4u32 * &a[n]);
            let d = Float::with_val(bits, &a[n + 1] + &a[n - 1]) + Float::with_val(bits, 2u32 * &a[n]);
            let sum = Float::with_val(bits, &a[n + 1] + &a[n]) + &a[n - 1];
            let g = Float::with_val(bits, &four_an * &sum) - Float::with_val(bits, n as u32);
            sub.push(four_an.clone());
            diag.push(d * 4u32);
            sup.push(four_an);
            rhs.push(-g);
        }
        // Thomas forward sweep (rows 1..=n_sys; row 1 has no sub, row n_sys no sup).
        let mut cp: Vec<Float> = vec![ctx.zero(); n_sys + 1];
        let mut dp: Vec<Float> = vec![ctx.zero(); n_sys + 1];
        cp[1] = Float::with_val(bits, &sup[1] / &diag[1]);
        dp[1] = Float::with_val(bits, &rhs[1] / &diag[1]);
        for n in 2..=n_sys {
            let denom = Float::with_val(bits, &diag[n] - Float::with_val(bits, &sub[n] * &cp[n - 1]));
            cp[n] = Float::with_val(bits, &sup[n] / &denom);
            let num = Float::with_val(bits, &rhs[n] - Float::with_val(bits, &sub[n] * &dp[n - 1]));
            dp[n] = num / denom;
        }
        let mut delta: Vec<Float> = vec![ctx.zero(); n_sys + 1];
        delta[n_sys] = dp[n_sys].clone();
        for n in (1..n_sys).rev() {
            delta[n] = Float::with_val(bits, &dp[n] - Float::with_val(bits, &cp[n] * &delta[n + 1]));
        }

        // Damped update: halve the step until the residual decreases and all
        // coefficients stay positive.
        let mut step = ctx.from_u32(1);
        let mut accepted = false;
        for _ in 0..60 {
            let mut trial = a.clone();
            let mut positive = true;
            for n in 1..=n_sys {
                trial[n] = Float::with_val(bits, &a[n] + Float::with_val(bits, &step * &delta[n]));
                if trial[n] <= 0 {
                    positive = false;
                    break;
                }
            }
            if positive {
                let trial_res = scaled_residual(&trial, n_sys, bits);
                if trial_res < res {
                    a = trial;
                    res = trial_res;
                    accepted = true;
                    break;
                }
            }
            step /= 2u32;
        }
        if !accepted {
            return Err(FreudError::SolverFailure {
                iterations,
                residual: res,
            });
        }
        converged = res <= TOL;
    }
    if !converged {
        return Err(FreudError::SolverFailure {
            iterations,
            residual: res,
        });
    }

    let a1_err = Float::with_val(bits, &a[1] - &gc.a1_sq_exact)
        .abs()
        .to_f64();
    if a1_err > 1e-10 {
        return Err(FreudError::SolverFailure {
            iterations,
            residual: a1_err,
        });
    }

    Ok(FreudTable::finish(
        &a,
        n_max,
        &gc.mu0,
        precision_digits,
        MethodTag::NewtonSystem,
    ))
}

/// Forward recursion a_{n+1}² = n/(4a_n²) - a_n² - a_{n-1}² from the exact
/// a_1², carried out at ≥ 8·n_max decimal digits to outrun the instability.
/// Validation-only path (quantifies the instability, certifies Newton).
pub fn forward_hp(n_max: usize) -> Result<FreudTable> {
    if n_max < 2 {
        return Err(FreudError::Domain(format!("n_max must be >= 2, got {n_max}")));
    }
    let digits = (8 * n_max as u32).max(50);
    let gc = gamma_constants(digits)?;
    let ctx = HpCtx::new(digits);
    let bits = ctx.bits();
    let mut a: Vec<Float> = vec![ctx.zero(); n_max + 2];
    a[1] = gc.a1_sq_exact.clone();
    for n in 1..=n_max {
        let lead = Float::with_val(bits, n as u32) / Float::with_val(bits, 4u32 * &a[n]);
        a[n + 1] = lead - Float::with_val(bits, &a[n] + &a[n - 1]);
        if a[n + 1] <= 0 {
            return Err(FreudError::Numeric(format!(
                "forward recursion lost positivity at n = {}",
                n + 1
            )));
        }
    }
    Ok(FreudTable::finish(&a, n_max, &gc.mu0, digits, MethodTag::ForwardHp))
}

/// Internal decimal precision of the discretized-measure oracle.
const STIELTJES_DIGITS: u32 = 50;

/// Independent cross-validation oracle: orthogonalize against e^{-x⁴}dx
/// discretized by composite Gauss–Legendre quadrature on [-X, X], with X such
/// that the discarded tail of every integrand x^{2n}e^{-x⁴}, n ≤ n_max, stays
/// below 1e-40 of its full-line value (the weight-only cutoff is not enough:
/// at degree 60 the restricted measure shifts a_sq[60] by ~4e-4). The
/// recurrence coefficients are recovered as norm ratios (the Stieltjes
/// procedure).
///
/// Underresolution is detected by recomputing with twice the points; any
/// disagreement above 1e-12 is an oracle error.
pub fn stieltjes_oracle(n_max: usize, quadrature_points: usize) -> Result<FreudTable> {
    if n_max > 60 {
        return Err(FreudError::Domain(format!(
            "stieltjes oracle supports n_max <= 60, got {n_max}"
        )));
    }
    if n_max < 2 {
        return Err(FreudError::Domain(format!("n_max must be >= 2, got {n_max}")));
    }
    let x_max = oracle_truncation_point(n_max);
    let coarse = stieltjes_pass(n_max, quadrature_points, x_max)?;
    let fine = stieltjes_pass(n_max, quadrature_points * 2, x_max)?;
    for n in 1..=n_max {
        let diff = (coarse.0[n].to_f64() - fine.0[n].to_f64()).abs();
        if diff > 1e-12 {
            return Err(FreudError::Oracle(format!(
                "quadrature underresolved: a_sq[{n}] moved by {diff:.3e} under point doubling"
            )));
        }
    }
    let (a, mu0) = fine;
    Ok(FreudTable::finish(
        &a,
        n_max,
        &mu0,
        STIELTJES_DIGITS,
        MethodTag::Stieltjes,
    ))
}

/// Cutoff making x^{2n_max}e^{-x⁴} negligible past X: raise the weight-only
/// point until X⁴ − 2·n_max·ln X ≥ 50·ln 10 (ten digits of margin over the
/// 1e-40 tail target to absorb norm scales and the tail width).
fn oracle_truncation_point(n_max: usize) -> f64 {
    let target = 50.0 * std::f64::consts::LN_10;
    let mut x = truncation_point(40);
    while x.powi(4) - 2.0 * n_max as f64 * x.ln() < target {
        x += 0.05;
    }
    x
}

fn stieltjes_pass(n_max: usize, points: usize, x_max: f64) -> Result<(Vec<Float>, Float)> {
    let quad = HpQuad::composite(x_max, points, STIELTJES_DIGITS)?;
    let ctx = quad.ctx();
    let bits = ctx.bits();
    // Weight values e^{-x⁴} folded into one nodewise vector.
    let wv: Vec<Float> = quad
        .nodes()
        .iter()
        .map(|x| {
            let x4 = Float::with_val(bits, x.clone().square().square());
            Float::with_val(bits, (-x4).exp())
        })
        .collect();
    let npts = quad.len();
    let mut f_prev: Vec<Float> = vec![ctx.zero(); npts]; // F_{-1}
    let mut f_cur: Vec<Float> = vec![ctx.from_u32(1); npts]; // F_0
    let weighted = |v: &[Float]| -> Vec<Float> {
        v.iter()
            .zip(&wv)
            .map(|(f, w)| Float::with_val(bits, f * w))
            .collect()
    };
    let mut norm_prev = quad.dot(&weighted(&f_cur), &f_cur); // ‖F_0‖²
    let mu0 = norm_prev.clone();
    let mut a: Vec<Float> = vec![ctx.zero(); n_max + 2];
    for n in 1..=n_max {
        // F_n = x F_{n-1} - a_{n-1}² F_{n-2} (a_0² = 0 handles n = 1).
        let f_next: Vec<Float> = quad
            .nodes()
            .iter()
            .enumerate()
            .map(|(i, x)| {
                let xf = Float::with_val(bits, x * &f_cur[i]);
                xf - Float::with_val(bits, &a[n - 1] * &f_prev[i])
            })
            .collect();
        let norm = quad.dot(&weighted(&f_next), &f_next);
        a[n] = Float::with_val(bits, &norm / &norm_prev);
        norm_prev = norm;
        f_prev = f_cur;
        f_cur = f_next;
    }
    Ok((a, mu0))
}
