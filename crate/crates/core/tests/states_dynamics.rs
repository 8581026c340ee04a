use gamow_core::dynamics::{evolve_functional, evolve_observable, linspace, survival_curve};
use gamow_core::sampling::{
    lattice_packet, random_coeff, random_observable, random_packet, ObservableClass,
};
use gamow_core::states::{delta_diag, gamow, mixture, pair, pure_state, Functional, ResonancePole};
use gamow_core::{BasisTag, Complex64, Observable, QuadratureConfig, TauRep};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_functional(r: &mut ChaCha8Rng, cfg: &QuadratureConfig) -> Functional {
    match r.random_range(0..3) {
        0 => pure_state(&random_packet(r), BasisTag::In, cfg).unwrap(),
        1 => {
            let w = r.random_range(0.1..0.9);
            mixture(
                &[(w, random_packet(r)), (1.0 - w, random_packet(r))],
                BasisTag::In,
                cfg,
            )
            .unwrap()
        }
        _ => {
            gamow(&ResonancePole::new(r.random_range(1.0..6.0), r.random_range(0.1..1.0)).unwrap())
                .unwrap()
        }
    }
}

/// Composite Simpson on `[0, upper]`.
fn simpson(f: impl Fn(f64) -> Complex64, upper: f64, m: usize) -> Complex64 {
    let h = upper / m as f64;
    let mut acc = f(0.0) + f(upper);
    for k in 1..m {
        acc += if k % 2 == 1 { 4.0 } else { 2.0 } * f(k as f64 * h);
    }
    acc * h / 3.0
}

/// `∫∫ ψ*(E) e^{it(E−E')} O_{EE'} ψ(E')` by a Simpson grid in both energies,
/// using only pointwise evaluation.
fn double_quadrature(psi: &TauRep, o: &Observable, t: f64, upper: f64, m: usize) -> Complex64 {
    let h = upper / m as f64;
    let w = |k: usize| {
        if k == 0 || k == m {
            1.0
        } else if k % 2 == 1 {
            4.0
        } else {
            2.0
        }
    };
    let grid: Vec<f64> = (0..=m).map(|k| k as f64 * h).collect();
    let psi_e: Vec<Complex64> = grid.iter().map(|&e| psi.eval_real(e)).collect();
    let mut total = Complex64::ZERO;
    for term in &o.kernel.terms {
        let a: Vec<Complex64> = grid.iter().map(|&e| term.left.eval_real(e)).collect();
        let b: Vec<Complex64> = grid.iter().map(|&e| term.right.eval_real(e)).collect();
        let mut acc = Complex64::ZERO;
        for i in 0..=m {
            let row = psi_e[i].conj() * a[i] * Complex64::new(0.0, t * grid[i]).exp() * w(i);
            let mut inner = Complex64::ZERO;
            for j in 0..=m {
                inner += b[j] * psi_e[j] * Complex64::new(0.0, -t * grid[j]).exp() * w(j);
            }
            acc += row * inner;
        }
        total += term.coeff * acc * (h / 3.0) * (h / 3.0);
    }
    total
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn heisenberg_and_schroedinger_agree(seed in any::<u64>(), t in -10.0f64..10.0) {
        let cfg = QuadratureConfig::default();
        let mut r = rng(seed);
        let rho = random_functional(&mut r, &cfg);
        let o = random_observable(&mut r, BasisTag::In, ObservableClass::Mixed);
        let a = pair(&evolve_functional(&rho, t).unwrap(), &o, &cfg).unwrap().value;
        let b = pair(&rho, &evolve_observable(&o, t), &cfg).unwrap().value;
        prop_assert!((a - b).norm() <= 1e-8 * (1.0 + a.norm()), "{} vs {}", a, b);
    }

    #[test]
    fn evolution_is_reversible(seed in any::<u64>(), t in -10.0f64..10.0) {
        let cfg = QuadratureConfig::default();
        let mut r = rng(seed);
        let rho = random_functional(&mut r, &cfg);
        let back = evolve_functional(&evolve_functional(&rho, t).unwrap(), -t).unwrap();
        for _ in 0..3 {
            let o = random_observable(&mut r, BasisTag::In, ObservableClass::Mixed);
            let a = pair(&rho, &o, &cfg).unwrap().value;
            let b = pair(&back, &o, &cfg).unwrap().value;
            prop_assert!((a - b).norm() <= 1e-10 * (1.0 + a.norm()), "{} vs {}", a, b);
        }
    }

    #[test]
    fn pairing_is_bilinear(seed in any::<u64>()) {
        let cfg = QuadratureConfig::default();
        let mut r = rng(seed);
        let (rho, sigma) = (random_functional(&mut r, &cfg), random_functional(&mut r, &cfg));
        let o = random_observable(&mut r, BasisTag::In, ObservableClass::Mixed);
        let q = random_observable(&mut r, BasisTag::In, ObservableClass::Mixed);
        let (a, b) = (random_coeff(&mut r), random_coeff(&mut r));

        let combo_o = o.scale(a).add(&q.scale(b)).unwrap();
        let lhs = pair(&rho, &combo_o, &cfg).unwrap().value;
        let rhs = a * pair(&rho, &o, &cfg).unwrap().value + b * pair(&rho, &q, &cfg).unwrap().value;
        prop_assert!((lhs - rhs).norm() <= 1e-10 * (1.0 + lhs.norm()));

        let combo_rho = rho.scale(a).add(&sigma.scale(b)).unwrap();
        let lhs = pair(&combo_rho, &o, &cfg).unwrap().value;
        let rhs = a * pair(&rho, &o, &cfg).unwrap().value + b * pair(&sigma, &o, &cfg).unwrap().value;
        prop_assert!((lhs - rhs).norm() <= 1e-10 * (1.0 + lhs.norm()));
    }

    #[test]
    fn self_adjoint_observables_have_real_means(seed in any::<u64>()) {
        let cfg = QuadratureConfig::default();
        let mut r = rng(seed);
        let rho = match r.random_range(0..2) {
            0 => pure_state(&random_packet(&mut r), BasisTag::In, &cfg).unwrap(),
            _ => mixture(&[(0.5, random_packet(&mut r)), (0.5, random_packet(&mut r))], BasisTag::In, &cfg).unwrap(),
        };
        let o = random_observable(&mut r, BasisTag::In, ObservableClass::Mixed);
        let sym = o.add(&o.adjoint()).unwrap();
        let v = pair(&rho, &sym, &cfg).unwrap().value;
        prop_assert!(v.im.abs() <= 1e-8, "{}", v);
    }

    #[test]
    fn evolved_pure_states_stay_pure(seed in any::<u64>(), t in -10.0f64..10.0) {
        // ρ_E(E) = ρ_{EE}(E, E) survives evolution: the phase e^{it(E−E)} is 1
        let cfg = QuadratureConfig::default();
        let mut r = rng(seed);
        let rho = evolve_functional(&pure_state(&random_packet(&mut r), BasisTag::In, &cfg).unwrap(), t).unwrap();
        for k in 0..20 {
            let e = Complex64::new(0.5 * k as f64, 0.0);
            let d = rho.diag.density_at(e).unwrap();
            let kk = rho.kernel.density_at(e, e).unwrap();
            prop_assert!((d - kk).norm() <= 1e-8, "{} vs {}", d, kk);
        }
    }
}

#[test]
fn evolution_leaves_the_diagonal_untouched() {
    let cfg = QuadratureConfig::default();
    let mut r = rng(8);
    for _ in 0..10 {
        let rho = random_functional(&mut r, &cfg);
        let t = r.random_range(-10.0..10.0);
        assert_eq!(evolve_functional(&rho, t).unwrap().diag, rho.diag);
    }
}

#[test]
fn survival_of_diagonal_observable_is_flat() {
    let cfg = QuadratureConfig::default();
    let mut r = rng(9);
    let rho = pure_state(&random_packet(&mut r), BasisTag::In, &cfg).unwrap();
    let o = random_observable(&mut r, BasisTag::In, ObservableClass::Mixed);
    let diag_only = Observable::new(BasisTag::In, o.diag.clone(), Default::default());
    let curve = survival_curve(&rho, &diag_only, &linspace(-10.0, 10.0, 21), &cfg).unwrap();
    for v in &curve.values {
        assert!((v.value - curve.diagonal.value).norm() <= 1e-10);
    }
}

#[test]
fn survival_curve_matches_double_quadrature() {
    let cfg = QuadratureConfig::new(30.0, 64).unwrap();
    let psi = lattice_packet(0.0, 2.5, 4.0).unwrap();
    let rho = pure_state(&psi, BasisTag::In, &cfg).unwrap();
    let o = Observable::rank_one(
        BasisTag::In,
        Complex64::new(0.6, -0.3),
        lattice_packet(0.25, 2.0, 5.0).unwrap(),
        lattice_packet(-0.25, 3.0, 3.5).unwrap(),
    );
    let times = [-1.5, 0.0, 2.0];
    let curve = survival_curve(&rho, &o, &times, &cfg).unwrap();
    let norm = simpson(
        |e| psi.eval_real(e).norm_sqr() * Complex64::ONE,
        cfg.e_max,
        1200,
    );
    for (t, v) in times.iter().zip(&curve.values) {
        let want = double_quadrature(&psi, &o, *t, cfg.e_max, 1200) / norm;
        assert!(
            (v.value - want).norm() <= 1e-6 * want.norm(),
            "t={t}: {} vs {want}",
            v.value
        );
    }
}

#[test]
fn mixture_energy_is_the_weighted_mean() {
    let cfg = QuadratureConfig::new(40.0, 64).unwrap();
    let (a, b) = (
        lattice_packet(0.0, 2.0, 3.0).unwrap(),
        lattice_packet(0.5, 2.5, 6.0).unwrap(),
    );
    let rho = mixture(&[(0.25, a.clone()), (0.75, b.clone())], BasisTag::In, &cfg).unwrap();
    let h = Observable::hamiltonian_power(1, BasisTag::In).unwrap();
    let mean = |psi: &TauRep| {
        let num = simpson(
            |e| e * psi.eval_real(e).norm_sqr() * Complex64::ONE,
            cfg.e_max,
            8000,
        );
        let den = simpson(
            |e| psi.eval_real(e).norm_sqr() * Complex64::ONE,
            cfg.e_max,
            8000,
        );
        num / den
    };
    let want = 0.25 * mean(&a) + 0.75 * mean(&b);
    let got = pair(&rho, &h, &cfg).unwrap().value;
    assert!((got - want).norm() <= 1e-8 * want.norm(), "{got} vs {want}");
}

#[test]
fn delta_functional_evaluates_hamiltonian() {
    let cfg = QuadratureConfig::default();
    let h = Observable::hamiltonian_power(1, BasisTag::In).unwrap();
    assert_eq!(
        pair(&delta_diag(2.0, BasisTag::In).unwrap(), &h, &cfg)
            .unwrap()
            .value,
        Complex64::new(2.0, 0.0)
    );
}
