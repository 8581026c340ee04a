//! Observables, states and decaying resonance functionals over a continuous
//! energy spectrum `[0, ∞)`.
//!
//! * [`zrep`] stores entire functions through their compactly supported
//!   Fourier transforms and provides evaluation, products, polynomial action,
//!   time translation and half-line integrals.
//! * [`algebra`] builds the involutive algebra of observables compatible with
//!   the Hamiltonian: a diagonal symbol `O_E` plus a finite-rank kernel `O_{EE'}`.
//! * [`states`] holds linear functionals on that algebra (pure states,
//!   mixtures, generalized states, delta functionals and the Gamow functional)
//!   and the pairing `(ρ|O)`.
//! * [`dynamics`] evolves observables and functionals in time and runs decay scans.

pub mod algebra;
pub mod dynamics;
pub mod error;
pub mod sampling;
pub mod states;
pub mod zrep;

pub use num_complex::Complex64;

pub use algebra::{BasisTag, DiagonalSymbol, KernelSymbol, KernelTerm, Observable};
pub use dynamics::{
    decay_scan, evolve_functional, evolve_observable, survival_curve, DecayScan, SurvivalCurve,
};
pub use error::{Error, Result};
pub use sampling::ObservableClass;
pub use states::{
    delta_diag, delta_kernel, gamow, mixture, pair, positivity_audit, pure_state, AuditReport,
    Functional, PairingResult, ResonancePole,
};
pub use zrep::{halfline_integral, make_bump, PolySymbol, QuadratureConfig, TauRep};
