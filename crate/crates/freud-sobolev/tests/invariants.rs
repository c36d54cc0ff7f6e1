//! Property-based invariants: structural identities that must hold for
//! randomly drawn degrees, masses, evaluation points, and polynomial
//! coefficients.

use freud_sobolev::coeffs::{build_freud_table, lew_quarles_estimate, FreudTable};
use freud_sobolev::freud::{eval_chain, kernel, kernel_at_zero, kernel_direct_sum};
use freud_sobolev::holonomic::{cross_relative_gap, Poly, RationalFn};
use freud_sobolev::sobolev::{
    build_sobolev_table, eval_q, eval_q_quotient, five_term, SobolevParams, SobolevTable,
};
use freud_sobolev::zeros::q_zeros;
use proptest::prelude::*;
use std::sync::OnceLock;

fn ft() -> &'static FreudTable {
    static T: OnceLock<FreudTable> = OnceLock::new();
    T.get_or_init(|| build_freud_table(112, 64).expect("coefficient table build"))
}

fn st(m0: f64, m1: f64, n_max: usize) -> SobolevTable {
    build_sobolev_table(ft(), SobolevParams::new(m0, m1).unwrap(), n_max).unwrap()
}

fn poly() -> impl Strategy<Value = Poly> {
    prop::collection::vec(-3.0f64..3.0, 1..6).prop_map(Poly::new)
}

fn nonzero_poly() -> impl Strategy<Value = Poly> {
    poly().prop_filter("nonzero", |p| !p.is_zero())
}

fn rational() -> impl Strategy<Value = RationalFn> {
    (poly(), nonzero_poly()).prop_map(|(n, d)| RationalFn::new(n, d).unwrap())
}

proptest! {
    /// Exact differentiation obeys the product rule at the coefficient level.
    #[test]
    fn rational_product_rule(f in rational(), g in rational()) {
        let lhs = f.mul(&g).derivative();
        let rhs = f.derivative().mul(&g).add(&f.mul(&g.derivative()));
        prop_assert!(cross_relative_gap(&lhs, &rhs) <= 1e-12);
    }

    /// Division then multiplication by the same function is the identity.
    #[test]
    fn rational_division_roundtrip(f in rational(), g in rational()) {
        prop_assume!(!g.is_zero());
        let back = f.div(&g).unwrap().mul(&g);
        prop_assert!(cross_relative_gap(&back, &f) <= 1e-12);
    }

    /// Addition and subtraction of the same function cancel.
    #[test]
    fn rational_add_sub_roundtrip(f in rational(), g in rational()) {
        let back = f.add(&g).sub(&g);
        prop_assert!(cross_relative_gap(&back, &f) <= 1e-12);
    }

    /// The unmodified polynomials have the parity of their degree, bit-exactly,
    /// and differentiation flips it.
    #[test]
    fn monic_parity_exact(n in 0usize..=30, x in 0.0f64..2.5) {
        let plus = eval_chain(ft(), n, x, 1).unwrap();
        let minus = eval_chain(ft(), n, -x, 1).unwrap();
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        prop_assert_eq!(minus.monic(0), sign * plus.monic(0));
        prop_assert_eq!(minus.monic(1), -sign * plus.monic(1));
    }

    /// The nonlinear recurrence defining the coefficients is satisfied to
    /// the stated scaled tolerance at every index.
    #[test]
    fn string_residual_scaled(n in 1usize..=111) {
        prop_assert!(ft().string_residual(n) <= 1e-12 * (n as f64).max(1.0));
    }

    /// The closed-form coefficient estimate tightens at doubled degree.
    #[test]
    fn estimate_tail_halving(n in 25usize..=55) {
        let t = ft();
        let e = |k: usize| (t.a_sq[k] / lew_quarles_estimate(k).unwrap() - 1.0).abs();
        prop_assert!(e(2 * n) < e(n));
    }

    /// Two-point quotient form of the kernel agrees with the direct sum.
    #[test]
    fn kernel_quotient_matches_direct_sum(
        n in 1usize..=25,
        x in -2.2f64..2.2,
        dy in 0.01f64..1.5,
    ) {
        let y = if x > 0.0 { x - dy } else { x + dy };
        let direct = kernel_direct_sum(ft(), n, x, y).unwrap();
        let quotient = kernel(ft(), n, x, y).unwrap();
        // Cancellation scale of the quotient numerator.
        let cx = eval_chain(ft(), n + 1, x, 0).unwrap();
        let cy = eval_chain(ft(), n + 1, y, 0).unwrap();
        let mag = ((cx.monic(0) * cy.monic_prev(0)).abs()
            + (cx.monic_prev(0) * cy.monic(0)).abs())
            / ((x - y).abs() * ft().norm_sq[n]);
        prop_assert!((direct - quotient).abs() <= 1e-10 * mag.max(1.0));
    }

    /// Kernel diagonal values grow with the degree (sums of squares).
    #[test]
    fn kernel_diagonal_monotone(n in 1usize..=40) {
        let prev = kernel_at_zero(ft(), n - 1).unwrap();
        let cur = kernel_at_zero(ft(), n).unwrap();
        prop_assert!(cur.k00 >= prev.k00);
        prop_assert!(cur.k11 >= prev.k11);
    }

    /// Even-degree polynomials ignore the derivative mass and odd-degree
    /// polynomials ignore the value mass, bit-exactly.
    #[test]
    fn mass_decoupling_bit_exact(
        m0 in 0.0f64..10.0,
        m1 in 0.0f64..10.0,
        n in 2usize..=12,
        x in -2.5f64..2.5,
    ) {
        let full = st(m0, m1, 13);
        let even_only = st(m0, 0.0, 13);
        let odd_only = st(0.0, m1, 13);
        let n_even = n - (n % 2);
        let n_odd = n_even - 1;
        prop_assert_eq!(
            eval_q(&full, ft(), n_even, x, 0).unwrap()[0],
            eval_q(&even_only, ft(), n_even, x, 0).unwrap()[0]
        );
        prop_assert_eq!(
            eval_q(&full, ft(), n_odd, x, 0).unwrap()[0],
            eval_q(&odd_only, ft(), n_odd, x, 0).unwrap()[0]
        );
    }

    /// With both masses zero the modified family is the unmodified one,
    /// bit-exactly.
    #[test]
    fn zero_mass_reduction_bit_exact(n in 0usize..=12, x in -2.5f64..2.5) {
        let s = st(0.0, 0.0, 13);
        prop_assert_eq!(
            eval_q(&s, ft(), n, x, 0).unwrap()[0],
            eval_chain(ft(), n, x, 0).unwrap().monic(0)
        );
    }

    /// The five-term recurrence holds on random points and parameters.
    #[test]
    fn five_term_relation(
        m0 in 0.0f64..5.0,
        m1 in 0.0f64..5.0,
        n in 0usize..=14,
        x in -2.5f64..2.5,
    ) {
        let s = st(m0, m1, 17);
        let (lnn, lm2_opt) = five_term(&s, n).unwrap();
        let lm2 = lm2_opt.unwrap_or(0.0);
        let qn = eval_q(&s, ft(), n, x, 0).unwrap()[0];
        let qp2 = eval_q(&s, ft(), n + 2, x, 0).unwrap()[0];
        let qm2 = if n >= 2 {
            eval_q(&s, ft(), n - 2, x, 0).unwrap()[0]
        } else {
            0.0
        };
        let lhs = x * x * qn;
        let rhs = qp2 + lnn * qn + lm2 * qm2;
        let scale = lhs.abs().max(qp2.abs()).max((lnn * qn).abs()).max(1.0);
        prop_assert!((lhs - rhs).abs() <= 1e-9 * scale);
    }

    /// Point masses can only inflate norms.
    #[test]
    fn norm_inflation(m0 in 0.0f64..10.0, m1 in 0.0f64..10.0, n in 0usize..=14) {
        let s = st(m0, m1, 15);
        prop_assert!(s.qnorm_sq[n] >= ft().norm_sq[n] * (1.0 - 1e-14));
    }

    /// Kernel-representation and rational-quotient evaluation of the
    /// modified polynomials agree away from the origin.
    #[test]
    fn representation_agreement(
        m0 in 0.0f64..5.0,
        m1 in 0.0f64..5.0,
        n in 1usize..=12,
        ax in 0.3f64..2.5,
        neg in prop::bool::ANY,
    ) {
        let x = if neg { -ax } else { ax };
        let s = st(m0, m1, 13);
        let a = eval_q(&s, ft(), n, x, 0).unwrap()[0];
        let b = eval_q_quotient(&s, ft(), n, x).unwrap();
        let c = eval_chain(ft(), n, x, 0).unwrap();
        // Error scale of the rational form: sum of its term magnitudes.
        let scale = ((1.0 + s.a10[n] / (x * x)) * c.monic(0)).abs()
            + (s.b11[n] / x * c.monic_prev(0)).abs()
            + 1.0;
        prop_assert!((a - b).abs() <= 1e-11 * scale);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Zero sets of the modified polynomials are exactly mirror-symmetric
    /// with the right count on each side of the origin.
    #[test]
    fn zero_set_symmetry(m0 in 0.0f64..5.0, m1 in 0.0f64..5.0, n in 4usize..=7) {
        let s = st(m0, m1, n + 1);
        let zs = q_zeros(&s, ft(), n).unwrap();
        prop_assert!(zs.is_symmetric());
        prop_assert_eq!(zs.total_count(), n);
        prop_assert_eq!(zs.positive().len(), n / 2);
        prop_assert_eq!(zs.zeros.iter().filter(|&&z| z == 0.0).count(), n % 2);
    }
}
