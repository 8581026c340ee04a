//! Seeded random wavepackets and observables for audits and tests.
//!
//! The distribution is fixed so that audits are reproducible:
//!
//! * wavepacket: a bump on the τ-lattice of step 1/128, half width drawn from
//!   {1.5, 2, 2.5, 3}, center a multiple of 1/8 in [−1, 1], shifted to an
//!   energy uniform in [0.5, 8];
//! * complex coefficients: real and imaginary parts uniform in [−1, 1];
//! * kernel: rank 1 or 2, each term `λ·a ⊗ b` with independent packets;
//! * diagonal (mixed class only): polynomial of degree 0–2 with coefficient
//!   `k` scaled by `8^{−k}` so every term is O(1) near the packet energies,
//!   plus, with probability 1/2, a packet-shaped Z part.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{BasisTag, DiagonalSymbol, KernelSymbol, KernelTerm, Observable};
use crate::error::Result;
use crate::zrep::{make_bump, PolySymbol, TauRep};

pub const LATTICE_STEP: f64 = 1.0 / 128.0;
pub const HALF_WIDTHS: [f64; 4] = [1.5, 2.0, 2.5, 3.0];
pub const ENERGY_RANGE: (f64, f64) = (0.5, 8.0);

/// Which observables an audit draws.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObservableClass {
    /// Zero diagonal symbol, finite-rank kernel.
    KernelOnly,
    /// Polynomial-plus-Z diagonal symbol and finite-rank kernel.
    Mixed,
}

/// A bump of half width `hw` centered at `center`, on the lattice of step
/// [`LATTICE_STEP`], moved to energy `energy`.
pub fn lattice_packet(center: f64, half_width: f64, energy: f64) -> Result<TauRep> {
    let n = (2.0 * half_width / LATTICE_STEP).round() as usize + 1;
    Ok(make_bump(center, half_width, n)?.shift_energy(energy))
}

pub fn random_coeff<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0))
}

pub fn random_packet<R: Rng + ?Sized>(rng: &mut R) -> TauRep {
    let hw = HALF_WIDTHS[rng.random_range(0..HALF_WIDTHS.len())];
    let center = rng.random_range(-8..=8) as f64 / 8.0;
    let energy = rng.random_range(ENERGY_RANGE.0..=ENERGY_RANGE.1);
    lattice_packet(center, hw, energy).expect("sampled bump parameters are valid")
}

pub fn random_kernel<R: Rng + ?Sized>(rng: &mut R) -> KernelSymbol {
    let rank = rng.random_range(1..=2);
    KernelSymbol::new(
        (0..rank)
            .map(|_| {
                let coeff = random_coeff(rng);
                let left = random_packet(rng);
                let right = random_packet(rng);
                KernelTerm::new(coeff, left, right)
            })
            .collect(),
    )
}

pub fn random_diagonal<R: Rng + ?Sized>(rng: &mut R) -> DiagonalSymbol {
    let degree = rng.random_range(0..=2);
    let poly = PolySymbol::new(
        (0..=degree)
            .map(|k| random_coeff(rng) * 8f64.powi(-k))
            .collect(),
    );
    let zpart = if rng.random_bool(0.5) {
        let c = random_coeff(rng);
        random_packet(rng).scale(c)
    } else {
        TauRep::zero()
    };
    DiagonalSymbol { poly, zpart }
}

pub fn random_observable<R: Rng + ?Sized>(
    rng: &mut R,
    tag: BasisTag,
    class: ObservableClass,
) -> Observable {
    let diag = match class {
        ObservableClass::KernelOnly => DiagonalSymbol::zero(),
        ObservableClass::Mixed => random_diagonal(rng),
    };
    let kernel = random_kernel(rng);
    Observable::new(tag, diag, kernel)
}
