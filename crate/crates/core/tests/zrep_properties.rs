use gamow_core::sampling::lattice_packet;
use gamow_core::zrep::{halfline_integral, make_bump, PolySymbol, QuadratureConfig, TauRep};
use gamow_core::Complex64;
use proptest::prelude::*;

fn packet_strategy() -> impl Strategy<Value = TauRep> {
    (
        -8i32..=8,
        prop::sample::select(vec![1.5, 2.0, 2.5, 3.0]),
        0.5f64..8.0,
    )
        .prop_map(|(c, hw, e)| lattice_packet(c as f64 / 8.0, hw, e).unwrap())
}

fn coeff() -> impl Strategy<Value = Complex64> {
    (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(re, im)| Complex64::new(re, im))
}

fn point() -> impl Strategy<Value = Complex64> {
    (-10.0f64..10.0, -2.0f64..2.0).prop_map(|(re, im)| Complex64::new(re, im))
}

/// Direct quadrature of `∫ e^{izτ} φ̂(τ) dτ` with composite Simpson on the
/// bump's own formula, independent of the stored samples.
fn bump_transform(center: f64, hw: f64, z: Complex64) -> Complex64 {
    let m = 20_000;
    let h = 2.0 * hw / m as f64;
    let f = |tau: f64| {
        let u = (tau - center) / hw;
        let w = if u.abs() < 1.0 {
            (-1.0 / (1.0 - u * u)).exp()
        } else {
            0.0
        };
        w * (Complex64::i() * z * tau).exp()
    };
    let mut acc = f(center - hw) + f(center + hw);
    for k in 1..m {
        acc += if k % 2 == 1 { 4.0 } else { 2.0 } * f(center - hw + k as f64 * h);
    }
    acc * h / 3.0
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn evaluation_is_linear(phi in packet_strategy(), psi in packet_strategy(), a in coeff(), b in coeff(), z in point()) {
        let combo = phi.scale(a).add(&psi.scale(b)).unwrap();
        let lhs = combo.eval_at(z).unwrap();
        let rhs = a * phi.eval_at(z).unwrap() + b * psi.eval_at(z).unwrap();
        let scale = 1.0 + (a * phi.eval_at(z).unwrap()).norm() + (b * psi.eval_at(z).unwrap()).norm();
        prop_assert!((lhs - rhs).norm() <= 1e-12 * scale, "{} vs {}", lhs, rhs);
    }

    #[test]
    fn product_is_pointwise(phi in packet_strategy(), psi in packet_strategy(), z in point()) {
        let prod = phi.product(&psi).unwrap();
        let want = phi.eval_at(z).unwrap() * psi.eval_at(z).unwrap();
        let got = prod.eval_at(z).unwrap();
        prop_assert!((got - want).norm() <= 1e-6 * (1.0 + want.norm()));
        let (lo, hi) = prod.support();
        prop_assert!((lo - phi.tau_min() - psi.tau_min()).abs() < 1e-12);
        prop_assert!((hi - phi.tau_max() - psi.tau_max()).abs() < 1e-12);
    }

    #[test]
    fn translation_is_a_phase(phi in packet_strategy(), t in -10.0f64..10.0, z in point()) {
        let base = phi.eval_at(z).unwrap();
        let shifted = phi.translate(t).eval_at(z).unwrap();
        let want = (Complex64::i() * t * z).exp() * base;
        prop_assert!((shifted - want).norm() <= 1e-10 * (1.0 + want.norm()));
    }

    #[test]
    fn translation_group_law(phi in packet_strategy(), a in -5.0f64..5.0, b in -5.0f64..5.0) {
        let two = phi.translate(a).translate(b);
        let one = phi.translate(a + b);
        prop_assert_eq!(two.samples(), one.samples());
        prop_assert!((two.tau_min() - one.tau_min()).abs() < 1e-13);
    }

    #[test]
    fn conjugation_symmetry(phi in packet_strategy(), c in coeff(), z in point()) {
        let phi = phi.scale(c);
        let lhs = phi.conj().eval_at(z).unwrap();
        let rhs = phi.eval_at(z.conj()).unwrap().conj();
        prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + rhs.norm()));
        prop_assert_eq!(phi.conj().conj(), phi);
    }

    #[test]
    fn polynomial_action_is_pointwise(
        (phi, energy) in (-8i32..=8, prop::sample::select(vec![1.5, 2.0, 2.5, 3.0]), 0.5f64..8.0)
            .prop_map(|(c, hw, e)| (lattice_packet(c as f64 / 8.0, hw, e).unwrap(), e)),
        c0 in coeff(), c1 in coeff(), c2 in coeff(), de in -1.0f64..1.0,
    ) {
        let p = PolySymbol::new(vec![c0, c1 / 8.0, c2 / 64.0]);
        let action = phi.poly_action(&p).unwrap();
        for z in [Complex64::new(energy + de, 0.0), Complex64::new(energy + de, 0.5)] {
            let got = action.eval_at(z).unwrap();
            let value = phi.eval_at(z).unwrap();
            let want = p.eval(z) * value;
            // relative to the size of the individual monomial terms
            let scale: f64 = p.coeffs().iter().enumerate().map(|(k, c)| c.norm() * z.norm().powi(k as i32)).sum();
            prop_assert!((got - want).norm() <= 1e-6 * scale * value.norm(), "{} vs {}", got, want);
        }
    }

    #[test]
    fn real_axis_decay(phi in packet_strategy()) {
        // |φ(E)|(1 + E²) stays bounded well past the packet energy
        let bound = (0..=400)
            .map(|k| {
                let e = 0.25 * k as f64;
                phi.eval_real(e).norm() * (1.0 + e * e)
            })
            .fold(0.0, f64::max);
        let peak = phi.l1_norm();
        prop_assert!(bound <= 100.0 * peak, "{} vs {}", bound, peak);
        let far = phi.eval_real(100.0).norm() * (1.0 + 100.0f64 * 100.0);
        prop_assert!(far <= bound);
    }
}

#[test]
fn bump_matches_direct_transform_at_complex_points() {
    let phi = make_bump(0.5, 1.5, 1537).unwrap();
    for z in [
        Complex64::new(0.0, 0.0),
        Complex64::new(1.3, 0.0),
        Complex64::new(-2.0, 1.5),
        Complex64::new(4.0, -2.0),
    ] {
        let got = phi.eval_at(z).unwrap();
        let want = bump_transform(0.5, 1.5, z);
        assert!(
            (got - want).norm() <= 1e-9 * (1.0 + want.norm()),
            "{z}: {got} vs {want}"
        );
    }
}

#[test]
fn bump_constant_at_origin() {
    // scipy.integrate.quad of exp(−1/(1−τ²)) over (−1, 1)
    const ORACLE: f64 = 0.443_993_816_168_079;
    let v = make_bump(0.0, 1.0, 4097)
        .unwrap()
        .eval_at(Complex64::ZERO)
        .unwrap();
    assert!((v.re - ORACLE).abs() <= 1e-6);
    assert!(v.im.abs() <= 1e-12);
}

#[test]
fn halfline_is_stable_under_grid_doubling() {
    let cfg = QuadratureConfig::default();
    let w = PolySymbol::from_real(&[1.0, 0.25]);
    let coarse = make_bump(0.0, 3.0, 769).unwrap().shift_energy(4.0);
    let fine = make_bump(0.0, 3.0, 1537).unwrap().shift_energy(4.0);
    let a = halfline_integral(&coarse, &w, &cfg).unwrap().value;
    let b = halfline_integral(&fine, &w, &cfg).unwrap().value;
    assert!((a - b).norm() <= 1e-9, "{:e}", (a - b).norm());
}
