use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{pair, Functional};
use crate::error::Result;
use crate::sampling::{random_observable, ObservableClass};
use crate::zrep::QuadratureConfig;

/// A sample counts as a violation when `Re < −threshold` or `|Im| > threshold`.
pub const POSITIVITY_THRESHOLD: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditViolation {
    pub index: usize,
    pub value: Complex64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub class: ObservableClass,
    pub seed: u64,
    pub samples: usize,
    pub threshold: f64,
    pub min_real: f64,
    pub max_abs_imag: f64,
    pub violations: Vec<AuditViolation>,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Pairs `ρ` with `O†O` for `n_samples` random observables of the given class.
///
/// Sample `i` draws from its own ChaCha stream `(seed, i)`, so the report does
/// not depend on how the work is scheduled across threads. The audit only
/// reports; it never fails on a violation.
pub fn positivity_audit(
    rho: &Functional,
    n_samples: usize,
    seed: u64,
    class: ObservableClass,
    cfg: &QuadratureConfig,
) -> Result<AuditReport> {
    let values: Vec<Complex64> = (0..n_samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let o = random_observable(&mut rng, rho.tag, class);
            let square = o.adjoint().multiply(&o, cfg)?;
            Ok(pair(rho, &square, cfg)?.value)
        })
        .collect::<Result<_>>()?;

    let mut min_real = f64::INFINITY;
    let mut max_abs_imag = 0.0f64;
    let mut violations = Vec::new();
    for (index, v) in values.into_iter().enumerate() {
        min_real = min_real.min(v.re);
        max_abs_imag = max_abs_imag.max(v.im.abs());
        if v.re < -POSITIVITY_THRESHOLD || v.im.abs() > POSITIVITY_THRESHOLD {
            violations.push(AuditViolation { index, value: v });
        }
    }
    Ok(AuditReport {
        class,
        seed,
        samples: n_samples,
        threshold: POSITIVITY_THRESHOLD,
        min_real: if n_samples == 0 { 0.0 } else { min_real },
        max_abs_imag,
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::BasisTag;
    use crate::sampling::lattice_packet;
    use crate::states::{gamow, pure_state, ResonancePole};

    #[test]
    fn pure_state_passes_mixed_audit() {
        let cfg = QuadratureConfig::default();
        let rho = pure_state(&lattice_packet(0.0, 2.0, 4.0).unwrap(), BasisTag::In, &cfg).unwrap();
        let r = positivity_audit(&rho, 50, 11, ObservableClass::Mixed, &cfg).unwrap();
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.samples, 50);
    }

    #[test]
    fn gamow_passes_kernel_only_audit() {
        let cfg = QuadratureConfig::default();
        let rho = gamow(&ResonancePole::new(4.0, 1.0).unwrap()).unwrap();
        let r = positivity_audit(&rho, 50, 5, ObservableClass::KernelOnly, &cfg).unwrap();
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn audit_is_reproducible() {
        let cfg = QuadratureConfig::default();
        let rho = gamow(&ResonancePole::new(4.0, 1.0).unwrap()).unwrap();
        let a = positivity_audit(&rho, 20, 9, ObservableClass::Mixed, &cfg).unwrap();
        let b = positivity_audit(&rho, 20, 9, ObservableClass::Mixed, &cfg).unwrap();
        assert_eq!(a, b);
    }
}
