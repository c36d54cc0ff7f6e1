//! Exact rational-function assembly of the ladder operators for the
//! mass-modified family, the second-order differential equation satisfied by
//! Q_n, the odd-degree biquartic u(x) whose roots drive the zero dynamics,
//! the large-n expansions of the quadratic roots z±, and the electrostatic
//! equilibrium residual of the zeros.
//!
//! Everything here manipulates rational functions in x with f64
//! coefficients. No symbolic gcd is attempted (floating gcd is ill-posed);
//! instead common powers of x with exactly-zero coefficients are stripped,
//! denominators are kept monic, and comparisons cross-multiply and rescale
//! so that relative tolerances stay meaningful.

use crate::coeffs::FreudTable;
use crate::error::{FreudError, Result};
use crate::sobolev::{SobolevParams, SobolevTable};
use crate::zeros::{ZeroLabel, ZeroSet};
use std::fmt;

/// Dense real polynomial in x, ascending coefficients, trailing exact zeros
/// trimmed (`c` empty ⇔ the zero polynomial).
#[derive(Clone, Debug, PartialEq)]
pub struct Poly {
    pub c: Vec<f64>,
}

impl Poly {
    pub fn new(coeffs: Vec<f64>) -> Self {
        let mut c = coeffs;
        while c.last() == Some(&0.0) {
            c.pop();
        }
        Poly { c }
    }

    pub fn zero() -> Self {
        Poly { c: vec![] }
    }

    pub fn constant(v: f64) -> Self {
        Poly::new(vec![v])
    }

    /// coef·x^pow
    pub fn monomial(coef: f64, pow: usize) -> Self {
        let mut c = vec![0.0; pow + 1];
        c[pow] = coef;
        Poly::new(c)
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    /// Degree, or None for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.c.iter().rev().fold(0.0, |acc, &a| acc * x + a)
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let mut c = vec![0.0; self.c.len().max(o.c.len())];
        for (i, &a) in self.c.iter().enumerate() {
            c[i] += a;
        }
        for (i, &b) in o.c.iter().enumerate() {
            c[i] += b;
        }
        Poly::new(c)
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        self.add(&o.scale(-1.0))
    }

    pub fn scale(&self, s: f64) -> Poly {
        Poly::new(self.c.iter().map(|&a| a * s).collect())
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![0.0; self.c.len() + o.c.len() - 1];
        for (i, &a) in self.c.iter().enumerate() {
            for (j, &b) in o.c.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Poly::new(c)
    }

    pub fn derivative(&self) -> Poly {
        if self.c.len() <= 1 {
            return Poly::zero();
        }
        Poly::new(
            self.c[1..]
                .iter()
                .enumerate()
                .map(|(i, &a)| (i + 1) as f64 * a)
                .collect(),
        )
    }

    /// Number of leading exactly-zero coefficients (x-valuation); the zero
    /// polynomial reports 0.
    fn valuation(&self) -> usize {
        self.c.iter().take_while(|&&a| a == 0.0).count()
    }

    fn shift_down(&self, k: usize) -> Poly {
        Poly::new(self.c[k.min(self.c.len())..].to_vec())
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.c.iter().fold(0.0, |m, &a| m.max(a.abs()))
    }
}

/// Quotient of two dense polynomials, kept with a monic denominator and no
/// common exactly-zero powers of x. Closed under +, −, ×, ÷ and d/dx.
#[derive(Clone, Debug)]
pub struct RationalFn {
    pub num: Poly,
    pub den: Poly,
}

impl RationalFn {
    pub fn new(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(FreudError::Domain(
                "rational function with identically zero denominator".into(),
            ));
        }
        Ok(RationalFn { num, den }.normalized())
    }

    fn normalized(self) -> Self {
        let mut num = self.num;
        let mut den = self.den;
        if num.is_zero() {
            return RationalFn {
                num,
                den: Poly::constant(1.0),
            };
        }
        let v = num.valuation().min(den.valuation());
        if v > 0 {
            num = num.shift_down(v);
            den = den.shift_down(v);
        }
        let lead = *den.c.last().expect("nonzero denominator");
        if lead != 1.0 {
            num = num.scale(1.0 / lead);
            den = den.scale(1.0 / lead);
        }
        RationalFn { num, den }
    }

    pub fn zero() -> Self {
        RationalFn {
            num: Poly::zero(),
            den: Poly::constant(1.0),
        }
    }

    pub fn one() -> Self {
        RationalFn::constant(1.0)
    }

    pub fn constant(v: f64) -> Self {
        RationalFn {
            num: Poly::constant(v),
            den: Poly::constant(1.0),
        }
    }

    pub fn from_poly(p: Poly) -> Self {
        RationalFn {
            num: p,
            den: Poly::constant(1.0),
        }
    }

    /// coef·x^pow as a rational function.
    pub fn monomial(coef: f64, pow: usize) -> Self {
        RationalFn::from_poly(Poly::monomial(coef, pow))
    }

    /// coef/x^pow.
    pub fn inverse_monomial(coef: f64, pow: usize) -> Self {
        RationalFn {
            num: Poly::constant(coef),
            den: Poly::monomial(1.0, pow),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.num.eval(x) / self.den.eval(x)
    }

    pub fn add(&self, o: &RationalFn) -> RationalFn {
        RationalFn {
            num: self.num.mul(&o.den).add(&o.num.mul(&self.den)),
            den: self.den.mul(&o.den),
        }
        .normalized()
    }

    pub fn sub(&self, o: &RationalFn) -> RationalFn {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> RationalFn {
        RationalFn {
            num: self.num.scale(-1.0),
            den: self.den.clone(),
        }
    }

    pub fn mul(&self, o: &RationalFn) -> RationalFn {
        RationalFn {
            num: self.num.mul(&o.num),
            den: self.den.mul(&o.den),
        }
        .normalized()
    }

    pub fn div(&self, o: &RationalFn) -> Result<RationalFn> {
        if o.is_zero() {
            return Err(FreudError::Domain(
                "division by the zero rational function".into(),
            ));
        }
        Ok(RationalFn {
            num: self.num.mul(&o.den),
            den: self.den.mul(&o.num),
        }
        .normalized())
    }

    /// Exact quotient-rule derivative.
    pub fn derivative(&self) -> RationalFn {
        RationalFn {
            num: self
                .num
                .derivative()
                .mul(&self.den)
                .sub(&self.num.mul(&self.den.derivative())),
            den: self.den.mul(&self.den),
        }
        .normalized()
    }
}

impl fmt::Display for RationalFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?})/({:?})", self.num.c, self.den.c)
    }
}

/// Largest rescaled coefficient gap between f and g after cross-multiplying
/// (f ≡ g ⇔ f.num·g.den = g.num·f.den). Both sides are scaled by the larger
/// max-|coefficient| so the result is a relative measure.
pub fn cross_relative_gap(f: &RationalFn, g: &RationalFn) -> f64 {
    let p = f.num.mul(&g.den);
    let q = g.num.mul(&f.den);
    let scale = p.max_abs_coeff().max(q.max_abs_coeff());
    if scale == 0.0 {
        return 0.0;
    }
    p.sub(&q).max_abs_coeff() / scale
}

/// Ladder-operator data connecting Q_n and Q_{n−1}: the connection pair
/// (conn_a, conn_b) expressing Q_n in terms of F_n and F_{n−1}, the
/// derivative pair (diff_a, diff_b) of the unmodified family, the monic
/// three-term pair (beta, gamma), the intermediate rows (c1, d1) and
/// (a2, b2, c2, d2), the system determinant lambda, and the assembled
/// lowering (xi1, xi2) and raising (theta1, theta2) coefficients:
///
///   xi2·Q_n − Q_n′ − xi1·Q_{n−1} = 0,
///   theta1·Q_{n−1} + Q_{n−1}′ − theta2·Q_n = 0.
#[derive(Clone, Debug)]
pub struct LadderSystem {
    pub n: usize,
    pub params: SobolevParams,
    pub conn_a: RationalFn,
    pub conn_b: RationalFn,
    pub diff_a: RationalFn,
    pub diff_b: RationalFn,
    pub beta: RationalFn,
    pub gamma: RationalFn,
    pub c1: RationalFn,
    pub d1: RationalFn,
    pub a2: RationalFn,
    pub b2: RationalFn,
    pub c2: RationalFn,
    pub d2: RationalFn,
    pub lambda: RationalFn,
    pub xi1: RationalFn,
    pub xi2: RationalFn,
    pub theta1: RationalFn,
    pub theta2: RationalFn,
    // Scalars needed to rebuild the odd-degree biquartic downstream.
    kappa1_n: f64,
    phi0_n: f64,
    phi0_nm1: f64,
    a_sq_n: f64,
}

/// φ_k(x) = x² + a²_{k+1} + a²_k as a polynomial.
fn phi_poly(ft: &FreudTable, k: usize) -> Poly {
    Poly::new(vec![ft.phi0(k), 0.0, 1.0])
}

/// Connection coefficient A_k = 1 + a10[k]/x² as (x² + a10)/x².
fn conn_a_fn(st: &SobolevTable, k: usize) -> RationalFn {
    RationalFn {
        num: Poly::new(vec![st.a10[k], 0.0, 1.0]),
        den: Poly::monomial(1.0, 2),
    }
    .normalized()
}

/// Connection coefficient B_k = b11[k]/x.
fn conn_b_fn(st: &SobolevTable, k: usize) -> RationalFn {
    RationalFn {
        num: Poly::constant(st.b11[k]),
        den: Poly::monomial(1.0, 1),
    }
    .normalized()
}

/// First-row pair (C1, D1) at index k: the x-derivative of the connection
/// identity, with the unmodified derivative structure substituted in.
fn first_row(st: &SobolevTable, ft: &FreudTable, k: usize) -> (RationalFn, RationalFn) {
    let a = conn_a_fn(st, k);
    let b = conn_b_fn(st, k);
    // A′ = −2·a10/x³ and B′ = −b11/x².
    let ap = RationalFn::inverse_monomial(-2.0 * st.a10[k], 3);
    let bp = RationalFn::inverse_monomial(-st.b11[k], 2);
    let asq_k = ft.a_sq[k];
    let diff_a = RationalFn::monomial(-4.0 * asq_k, 1);
    let diff_b = RationalFn::from_poly(phi_poly(ft, k).scale(4.0 * asq_k));
    // Down-shifted derivative structure at index k−1, divided by the
    // three-term γ_{k−1} = −a²_{k−1} (and the β/γ cross term).
    let phim = RationalFn::from_poly(phi_poly(ft, k - 1));
    let c1 = ap
        .add(&a.mul(&diff_a))
        .add(&b.mul(&phim.mul(&RationalFn::constant(-4.0))));
    let asq_km = ft.a_sq[k - 1];
    let corr = RationalFn::monomial(-4.0 * asq_km, 1)
        .add(&phim.mul(&RationalFn::monomial(4.0, 1)));
    let d1 = bp.add(&a.mul(&diff_b)).add(&b.mul(&corr));
    (c1, d1)
}

/// Assemble the full ladder system for the pair (Q_{n−1}, Q_n).
pub fn ladder_system(st: &SobolevTable, ft: &FreudTable, n: usize) -> Result<LadderSystem> {
    if n < 2 {
        return Err(FreudError::Domain(format!(
            "ladder system needs n >= 2, got {n}"
        )));
    }
    if n > st.n_max {
        return Err(FreudError::TableExhausted {
            requested: n,
            n_max: st.n_max,
        });
    }
    let conn_a = conn_a_fn(st, n);
    let conn_b = conn_b_fn(st, n);
    let diff_a = RationalFn::monomial(-4.0 * ft.a_sq[n], 1);
    let diff_b = RationalFn::from_poly(phi_poly(ft, n).scale(4.0 * ft.a_sq[n]));
    let beta = RationalFn::monomial(1.0, 1);
    let gamma = RationalFn::constant(-ft.a_sq[n]);

    let (c1, d1) = first_row(st, ft, n);
    let (c1m, d1m) = first_row(st, ft, n - 1);
    let gkm = -ft.a_sq[n - 1];
    let conn_a_m = conn_a_fn(st, n - 1);
    let conn_b_m = conn_b_fn(st, n - 1);
    let inv_g = RationalFn::constant(1.0 / gkm);
    let x_over_g = RationalFn::monomial(1.0 / gkm, 1);
    let a2 = conn_b_m.mul(&inv_g);
    let b2 = conn_a_m.sub(&conn_b_m.mul(&x_over_g));
    let c2 = d1m.mul(&inv_g);
    let d2 = c1m.sub(&d1m.mul(&x_over_g));

    let lambda = conn_a.mul(&b2).sub(&a2.mul(&conn_b));
    if lambda.is_zero() {
        return Err(FreudError::Degenerate(format!(
            "vanishing determinant for n = {n}, masses ({}, {})",
            st.params.m0, st.params.m1
        )));
    }
    let xi1 = c1.mul(&conn_b).sub(&d1.mul(&conn_a)).div(&lambda)?;
    let xi2 = c1.mul(&b2).sub(&d1.mul(&a2)).div(&lambda)?;
    let theta1 = c2.mul(&conn_b).sub(&d2.mul(&conn_a)).div(&lambda)?;
    let theta2 = c2.mul(&b2).sub(&d2.mul(&a2)).div(&lambda)?;

    Ok(LadderSystem {
        n,
        params: st.params,
        conn_a,
        conn_b,
        diff_a,
        diff_b,
        beta,
        gamma,
        c1,
        d1,
        a2,
        b2,
        c2,
        d2,
        lambda,
        xi1,
        xi2,
        theta1,
        theta2,
        kappa1_n: st.kappa1[n],
        phi0_n: ft.phi0(n),
        phi0_nm1: ft.phi0(n - 1),
        a_sq_n: ft.a_sq[n],
    })
}

/// Coefficients of the second-order equation Q_n″ + R·Q_n′ + S·Q_n = 0,
/// plus (odd n) the quartic u(x) = u4·x⁴ + u2·x² + u0 governing the poles
/// of R and the roots z± of the associated quadratic u4·z² + u2·z + u0.
#[derive(Clone, Debug)]
pub struct OdeCoeffs {
    pub n: usize,
    pub r: RationalFn,
    pub s: RationalFn,
    pub u4: Option<f64>,
    pub u2: Option<f64>,
    pub u0: Option<f64>,
    pub z_plus: Option<f64>,
    pub z_minus: Option<f64>,
}

/// Quartic coefficients from the mass data at odd index `d`.
fn biquartic_from_scalars(kappa1: f64, phi: f64, phim: f64, asq: f64) -> (f64, f64, f64) {
    let u4 = 16.0 * phi * phi * (1.0 + kappa1);
    let u2 = 4.0 * phi * (4.0 * phi * phi + kappa1 * (2.0 + kappa1) * (4.0 * asq * phi - 1.0));
    let u0 = kappa1
        * (-12.0 * phi * phi + kappa1 * (1.0 + 8.0 * asq * phi * (2.0 * phim * phi - 1.0)));
    (u4, u2, u0)
}

/// Roots of u4·z² + u2·z + u0 by the cancellation-free quadratic formula,
/// returned as (z_plus, z_minus) with z_plus ≥ z_minus.
fn quadratic_roots(u4: f64, u2: f64, u0: f64) -> Result<(f64, f64)> {
    if u4 == 0.0 {
        return Err(FreudError::Domain("leading quartic coefficient is zero".into()));
    }
    let disc = u2 * u2 - 4.0 * u4 * u0;
    if disc < 0.0 {
        return Err(FreudError::Numeric(format!(
            "unexpected regime: negative discriminant {disc:e} for the root quadratic"
        )));
    }
    let q = -0.5 * (u2 + u2.signum() * disc.sqrt());
    let (r1, r2) = if q == 0.0 {
        (0.0, 0.0)
    } else {
        (q / u4, u0 / q)
    };
    Ok((r1.max(r2), r1.min(r2)))
}

/// Build R and S from an assembled ladder system:
///   R = theta1 − xi2 − xi1′/xi1,
///   S = xi2·(xi1′/xi1 − theta1) − xi2′ + theta2·xi1.
pub fn ode_coeffs(ls: &LadderSystem) -> Result<OdeCoeffs> {
    if ls.xi1.is_zero() {
        return Err(FreudError::Degenerate(format!(
            "lowering coefficient identically zero for n = {}",
            ls.n
        )));
    }
    let log_xi1 = ls.xi1.derivative().div(&ls.xi1)?;
    let r = ls.theta1.sub(&ls.xi2).sub(&log_xi1);
    let s = ls
        .xi2
        .mul(&log_xi1.sub(&ls.theta1))
        .sub(&ls.xi2.derivative())
        .add(&ls.theta2.mul(&ls.xi1));
    let (u4, u2, u0, z_plus, z_minus) = if ls.n % 2 == 1 {
        let (u4, u2, u0) =
            biquartic_from_scalars(ls.kappa1_n, ls.phi0_n, ls.phi0_nm1, ls.a_sq_n);
        let (zp, zm) = quadratic_roots(u4, u2, u0)?;
        (Some(u4), Some(u2), Some(u0), Some(zp), Some(zm))
    } else {
        (None, None, None, None, None)
    };
    Ok(OdeCoeffs {
        n: ls.n,
        r,
        s,
        u4,
        u2,
        u0,
        z_plus,
        z_minus,
    })
}

/// Quartic coefficients (u4, u2, u0) for odd degree `n_odd` directly from
/// the tables. The value mass M₀ plays no role at odd degrees.
pub fn biquartic(st: &SobolevTable, ft: &FreudTable, n_odd: usize) -> Result<(f64, f64, f64)> {
    if n_odd % 2 != 1 {
        return Err(FreudError::Domain(format!(
            "the quartic is defined for odd degrees, got {n_odd}"
        )));
    }
    if n_odd > st.n_max {
        return Err(FreudError::TableExhausted {
            requested: n_odd,
            n_max: st.n_max,
        });
    }
    Ok(biquartic_from_scalars(
        st.kappa1[n_odd],
        ft.phi0(n_odd),
        ft.phi0(n_odd - 1),
        ft.a_sq[n_odd],
    ))
}

/// Roots of the quartic u, reported in the quadratic variable z = x²: the
/// zero set holds [z_minus, z_plus], each of multiplicity 2, because each z
/// carries a ± pair of x-roots (real ±√z for z > 0, imaginary ±i·√(−z) for
/// z < 0). Residuals are |u4·z² + u2·z + u0|.
pub fn u_roots(u4: f64, u2: f64, u0: f64) -> Result<ZeroSet> {
    let (zp, zm) = quadratic_roots(u4, u2, u0)?;
    let res = |z: f64| (u4 * z * z + u2 * z + u0).abs();
    Ok(ZeroSet {
        label: ZeroLabel::BiquarticU,
        n: 0,
        params: None,
        zeros: vec![zm, zp],
        residuals: vec![res(zm), res(zp)],
        multiplicities: vec![2, 2],
    })
}

/// Two-term large-n expansions of the quadratic roots, as printed in the
/// source analysis:
///   z₊ ≈ (27/64)√(3/2)·n^{−3/2} − (243/512)√(3/2)·n^{−5/2},
///   z₋ ≈ −√(2/3)·n^{−1/2} − (1/4)√(3/2)·n^{−5/2}.
///
/// These are reproduced verbatim for comparison hooks. Both disagree with
/// the computed roots: the z₋ magnitude actually grows like n^{+1/2} (the
/// printed exponent sign is inconsistent with u2/u4 ~ √n), and the computed
/// z₊ is smaller than this expansion by orders of magnitude at moderate n.
/// See the tests for measured behavior.
pub fn z_asymptotics(n: usize) -> Result<(f64, f64)> {
    if n == 0 {
        return Err(FreudError::Domain("expansion index must be >= 1".into()));
    }
    let nf = n as f64;
    let c = (1.5f64).sqrt();
    let z_plus = c * (27.0 / 64.0) * nf.powf(-1.5) - c * (243.0 / 512.0) * nf.powf(-2.5);
    let z_minus = -(2.0f64 / 3.0).sqrt() * nf.powf(-0.5) - 0.25 * c * nf.powf(-2.5);
    Ok((z_plus, z_minus))
}

/// External potential whose equilibrium the zeros realize:
/// V(x) = ½·ln|u(x)| − ½·ln(x²·e^{−x⁴}).
pub fn v_ext(u4: f64, u2: f64, u0: f64, x: f64) -> Result<f64> {
    let u = u4 * x.powi(4) + u2 * x * x + u0;
    if x == 0.0 || u == 0.0 {
        return Err(FreudError::Domain(format!(
            "potential is singular at x = {x} (u = {u})"
        )));
    }
    Ok(0.5 * u.abs().ln() - 0.5 * (x * x).ln() + 0.5 * x.powi(4))
}

/// Electrostatic equilibrium residuals at the nonzero zeros of Q_{n_odd}:
/// for each such zero y, the defect of
///   Σ_{j≠k} 1/(y_j − y) + u′(y)/(2u(y)) − 1/y + 2y³ = 0,
/// scaled by the largest participating term. The sum runs over all zeros
/// including the origin; the origin itself is excluded as an evaluation
/// point (its own condition would be singular). Returns (zero, scaled
/// residual) pairs.
pub fn electrostatic_residual(
    st: &SobolevTable,
    ft: &FreudTable,
    n_odd: usize,
) -> Result<Vec<(f64, f64)>> {
    if n_odd % 2 != 1 {
        return Err(FreudError::Domain(format!(
            "equilibrium residual is defined for odd degrees, got {n_odd}"
        )));
    }
    let (u4, u2, u0) = biquartic(st, ft, n_odd)?;
    let zs = crate::zeros::q_zeros(st, ft, n_odd)?;
    let all = &zs.zeros;
    let mut out = Vec::new();
    for &y in all.iter().filter(|&&y| y != 0.0) {
        let mut s = 0.0;
        for &yj in all.iter().filter(|&&yj| yj != y) {
            s += 1.0 / (yj - y);
        }
        let u = u4 * y.powi(4) + u2 * y * y + u0;
        let up = 4.0 * u4 * y.powi(3) + 2.0 * u2 * y;
        let t_field = up / (2.0 * u);
        let t_origin = -1.0 / y;
        let t_ext = 2.0 * y.powi(3);
        let res = s + t_field + t_origin + t_ext;
        let scale = s
            .abs()
            .max(t_field.abs())
            .max(t_origin.abs())
            .max(t_ext.abs());
        out.push((y, res.abs() / scale));
    }
    Ok(out)
}
