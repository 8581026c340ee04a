//! Time evolution of observables and functionals, and the decay of the
//! Gamow functional.
//!
//! Under `e^{itH}` the diagonal symbols are invariant and the kernel picks up
//! `e^{it(E−E')}`. For observables that is a translation of each kernel factor
//! (`a → translate(a, t)`, `b → translate(b, −t)`); for functionals the smooth
//! kernel terms translate the same way and point masses at `(z_a, z_b)` gain
//! the scalar `e^{it(z_a − z_b)}`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{KernelSymbol, KernelTerm, Observable};
use crate::error::{Error, Result};
use crate::states::{
    gamow, pair, Functional, KernelComponent, KernelMass, PairingResult, ResonancePole,
};
use crate::zrep::{QuadratureConfig, EXPONENT_GUARD};

fn evolve_terms(terms: &[KernelTerm], t: f64) -> Vec<KernelTerm> {
    terms
        .iter()
        .map(|k| KernelTerm::new(k.coeff, k.left.translate(t), k.right.translate(-t)))
        .collect()
}

/// `e^{itH} O e^{−itH}`.
pub fn evolve_observable(o: &Observable, t: f64) -> Observable {
    Observable {
        tag: o.tag,
        diag: o.diag.clone(),
        kernel: KernelSymbol::new(evolve_terms(&o.kernel.terms, t)),
    }
}

/// `e^{it(z_a − z_b)}`, refusing exponents that would overflow.
pub fn mass_phase(z_left: Complex64, z_right: Complex64, t: f64) -> Result<Complex64> {
    let arg = Complex64::new(0.0, t) * (z_left - z_right);
    if arg.re.abs() >= EXPONENT_GUARD {
        return Err(Error::Range(format!(
            "evolution factor exp({:.3e}) at t = {t} is out of range",
            arg.re
        )));
    }
    Ok(arg.exp())
}

/// `ρ_t`, dual to [`evolve_observable`]: `(ρ_t|O) = (ρ|O_t)`.
pub fn evolve_functional(rho: &Functional, t: f64) -> Result<Functional> {
    let point_masses = rho
        .kernel
        .point_masses
        .iter()
        .map(|m| {
            Ok(KernelMass {
                weight: m.weight * mass_phase(m.z_left, m.z_right, t)?,
                ..*m
            })
        })
        .collect::<Result<_>>()?;
    Ok(Functional {
        tag: rho.tag,
        diag: rho.diag.clone(),
        kernel: KernelComponent {
            density: evolve_terms(&rho.kernel.density, t),
            point_masses,
        },
    })
}

/// Gamow-functional decay along a set of times.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayScan {
    pub gamma: f64,
    pub times: Vec<f64>,
    /// `(ρ_D(t)|O)`: evolve the functional, then pair.
    pub values: Vec<Complex64>,
    /// `(ρ_D|O(t))`: translate the kernel factors of `O`, then evaluate at the pole.
    pub translated: Vec<Complex64>,
    /// `e^{−Γt}(ρ_D|O)`.
    pub closed_form: Vec<Complex64>,
    /// `|values − closed_form|`.
    pub abs_err: Vec<f64>,
    /// `|translated − closed_form|`.
    pub route_err: Vec<f64>,
}

impl DecayScan {
    /// Largest error of either route, relative to `1 + |closed form|`.
    pub fn max_scaled_err(&self) -> f64 {
        self.abs_err
            .iter()
            .zip(&self.route_err)
            .zip(&self.closed_form)
            .map(|((a, r), c)| a.max(*r) / (1.0 + c.norm()))
            .fold(0.0, f64::max)
    }

    pub fn within(&self, tol: f64) -> bool {
        self.max_scaled_err() <= tol
    }
}

/// Evolves the Gamow functional of `pole` and pairs it with `o` at each time.
///
/// Two independent routes are computed at every `t` and both are compared
/// with `e^{−Γt}(ρ_D|O)`; negative times are allowed and grow as `e^{Γ|t|}`.
pub fn decay_scan(
    pole: &ResonancePole,
    o: &Observable,
    times: &[f64],
    cfg: &QuadratureConfig,
) -> Result<DecayScan> {
    let rho = gamow(pole)?.retag(o.tag);
    let base = pair(&rho, o, cfg)?.value;
    let rows: Vec<(Complex64, Complex64, Complex64)> = times
        .par_iter()
        .map(|&t| {
            let decay = (-pole.gamma * t).exp();
            if !decay.is_finite() {
                return Err(Error::Range(format!("exp(−Γt) overflows at t = {t}")));
            }
            let value = pair(&evolve_functional(&rho, t)?, o, cfg)?.value;
            let translated = pair(&rho, &evolve_observable(o, t), cfg)?.value;
            Ok((value, translated, base * decay))
        })
        .collect::<Result<_>>()?;

    let mut scan = DecayScan {
        gamma: pole.gamma,
        times: times.to_vec(),
        values: Vec::with_capacity(rows.len()),
        translated: Vec::with_capacity(rows.len()),
        closed_form: Vec::with_capacity(rows.len()),
        abs_err: Vec::with_capacity(rows.len()),
        route_err: Vec::with_capacity(rows.len()),
    };
    for (v, tr, cf) in rows {
        scan.values.push(v);
        scan.translated.push(tr);
        scan.closed_form.push(cf);
        scan.abs_err.push((v - cf).norm());
        scan.route_err.push((tr - cf).norm());
    }
    Ok(scan)
}

/// `(ρ_t|O)` split into its invariant diagonal part and the evolving rest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurvivalCurve {
    pub times: Vec<f64>,
    pub values: Vec<PairingResult>,
    /// `∫ ρ_E O_E dE` plus diagonal point masses; the same at every time.
    pub diagonal: PairingResult,
}

pub fn survival_curve(
    rho: &Functional,
    o: &Observable,
    times: &[f64],
    cfg: &QuadratureConfig,
) -> Result<SurvivalCurve> {
    let diagonal_only = Functional {
        kernel: KernelComponent::default(),
        ..rho.clone()
    };
    let diagonal = pair(&diagonal_only, o, cfg)?;
    let values = times
        .par_iter()
        .map(|&t| pair(&evolve_functional(rho, t)?, o, cfg))
        .collect::<Result<_>>()?;
    Ok(SurvivalCurve {
        times: times.to_vec(),
        values,
        diagonal,
    })
}

/// `count` evenly spaced times from `start` to `stop` inclusive.
pub fn linspace(start: f64, stop: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let step = (stop - start) / (count - 1) as f64;
            (0..count)
                .map(|i| {
                    if i == count - 1 {
                        stop
                    } else {
                        start + step * i as f64
                    }
                })
                .collect()
        }
    }
}
