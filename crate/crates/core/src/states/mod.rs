//! Functionals on the observable algebra: pure states, mixtures, delta
//! functionals, generalized states and the Gamow functional.
//!
//! A functional pairs with an observable as
//! `(ρ|O) = ∫ ρ_E O_E dE + ∫∫ ρ_{EE'} O_{EE'} dE dE'`. Each component holds
//! both smooth densities (integrated over the half line) and point masses
//! (which evaluate the symbols of `O`, at complex points for the kernel).

mod audit;

pub use audit::{positivity_audit, AuditReport, AuditViolation, POSITIVITY_THRESHOLD};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{check_tags, BasisTag, KernelTerm, Observable};
use crate::error::{Error, Result};
use crate::zrep::{halfline_integral, HalflineIntegral, PolySymbol, QuadratureConfig, TauRep};

/// A resonance at `z₀ = e_r − iΓ/2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResonancePole {
    pub e_r: f64,
    pub gamma: f64,
}

impl ResonancePole {
    pub fn new(e_r: f64, gamma: f64) -> Result<Self> {
        let pole = Self { e_r, gamma };
        pole.validate()?;
        Ok(pole)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.e_r.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "e_r must be finite, got {}",
                self.e_r
            )));
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "gamma must be positive, got {}",
                self.gamma
            )));
        }
        Ok(())
    }

    pub fn z0(&self) -> Complex64 {
        Complex64::new(self.e_r, -0.5 * self.gamma)
    }
}

/// `weight(E)·profile(E)`, one smooth piece of `ρ_E`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityTerm {
    pub weight: PolySymbol,
    pub profile: TauRep,
}

impl DensityTerm {
    pub fn eval_at(&self, e: Complex64) -> Result<Complex64> {
        Ok(self.weight.eval(e) * self.profile.eval_at(e)?)
    }
}

/// `weight·(e|`, evaluating `O_E` at a real energy.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagonalMass {
    pub weight: Complex64,
    pub e: f64,
}

/// `weight·δ_{z_left} ⊗ δ_{z_right}`, evaluating `O_{EE'}` at complex points.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelMass {
    pub weight: Complex64,
    pub z_left: Complex64,
    pub z_right: Complex64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DiagonalComponent {
    pub density: Vec<DensityTerm>,
    pub point_masses: Vec<DiagonalMass>,
}

impl DiagonalComponent {
    pub fn is_empty(&self) -> bool {
        self.density.is_empty() && self.point_masses.is_empty()
    }

    /// `ρ_E` at a point, for the smooth part only.
    pub fn density_at(&self, e: Complex64) -> Result<Complex64> {
        self.density
            .iter()
            .try_fold(Complex64::ZERO, |acc, d| Ok(acc + d.eval_at(e)?))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct KernelComponent {
    pub density: Vec<KernelTerm>,
    pub point_masses: Vec<KernelMass>,
}

impl KernelComponent {
    pub fn is_empty(&self) -> bool {
        self.density.is_empty() && self.point_masses.is_empty()
    }

    /// `ρ_{EE'}` at a point, for the smooth part only.
    pub fn density_at(&self, e: Complex64, e_prime: Complex64) -> Result<Complex64> {
        self.density
            .iter()
            .try_fold(Complex64::ZERO, |acc, t| Ok(acc + t.eval_at(e, e_prime)?))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Functional {
    pub tag: BasisTag,
    pub diag: DiagonalComponent,
    pub kernel: KernelComponent,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairingResult {
    pub value: Complex64,
    pub quadrature_error: f64,
}

impl PairingResult {
    pub const ZERO: Self = Self {
        value: Complex64::ZERO,
        quadrature_error: 0.0,
    };
}

impl Functional {
    /// A generalized state with independent diagonal and kernel data;
    /// nothing ties `ρ_E` to `ρ_{EE}`.
    pub fn new(tag: BasisTag, diag: DiagonalComponent, kernel: KernelComponent) -> Result<Self> {
        for m in &diag.point_masses {
            check_energy(m.e)?;
        }
        Ok(Self { tag, diag, kernel })
    }

    pub fn zero(tag: BasisTag) -> Self {
        Self {
            tag,
            diag: DiagonalComponent::default(),
            kernel: KernelComponent::default(),
        }
    }

    pub fn retag(&self, tag: BasisTag) -> Self {
        Self {
            tag,
            ..self.clone()
        }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        if c == Complex64::ZERO {
            return Self::zero(self.tag);
        }
        Self {
            tag: self.tag,
            diag: DiagonalComponent {
                density: self
                    .diag
                    .density
                    .iter()
                    .map(|d| DensityTerm {
                        weight: d.weight.scale(c),
                        profile: d.profile.clone(),
                    })
                    .collect(),
                point_masses: self
                    .diag
                    .point_masses
                    .iter()
                    .map(|m| DiagonalMass {
                        weight: m.weight * c,
                        e: m.e,
                    })
                    .collect(),
            },
            kernel: KernelComponent {
                density: self
                    .kernel
                    .density
                    .iter()
                    .map(|t| KernelTerm::new(t.coeff * c, t.left.clone(), t.right.clone()))
                    .collect(),
                point_masses: self
                    .kernel
                    .point_masses
                    .iter()
                    .map(|m| KernelMass {
                        weight: m.weight * c,
                        ..*m
                    })
                    .collect(),
            },
        }
    }

    /// Sum of functionals; term lists are concatenated.
    pub fn add(&self, other: &Self) -> Result<Self> {
        check_tags(self.tag, other.tag)?;
        let mut out = self.clone();
        out.diag.density.extend(other.diag.density.iter().cloned());
        out.diag
            .point_masses
            .extend(other.diag.point_masses.iter().copied());
        out.kernel
            .density
            .extend(other.kernel.density.iter().cloned());
        out.kernel
            .point_masses
            .extend(other.kernel.point_masses.iter().copied());
        Ok(out)
    }

    /// `(ρ|O)`.
    pub fn pair(&self, o: &Observable, cfg: &QuadratureConfig) -> Result<PairingResult> {
        pair(self, o, cfg)
    }
}

fn check_energy(e: f64) -> Result<()> {
    if e >= 0.0 && e.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "point-mass energy must be finite and non-negative, got {e}"
        )))
    }
}

struct Accumulator {
    value: Complex64,
    error: f64,
}

impl Accumulator {
    fn push_integral(&mut self, c: Complex64, r: HalflineIntegral) {
        self.value += c * r.value;
        self.error += c.norm() * r.tail_estimate;
    }
}

/// `(ρ|O) = ∫ ρ_E O_E dE + ∫∫ ρ_{EE'} O_{EE'} dE dE'`.
///
/// Point masses evaluate the symbols directly. Components with nothing to
/// pair against contribute nothing at all, so e.g. a functional without
/// diagonal part gives an exact `0` on any diagonal-only observable.
pub fn pair(rho: &Functional, o: &Observable, cfg: &QuadratureConfig) -> Result<PairingResult> {
    check_tags(rho.tag, o.tag)?;
    cfg.validate()?;
    let mut acc = Accumulator {
        value: Complex64::ZERO,
        error: 0.0,
    };

    let poly = &o.diag.poly;
    let zpart = &o.diag.zpart;
    for d in &rho.diag.density {
        if !poly.is_zero() {
            acc.push_integral(
                Complex64::ONE,
                halfline_integral(&d.profile, &d.weight.mul(poly), cfg)?,
            );
        }
        if !zpart.is_zero() {
            let f = d.profile.product(zpart)?;
            acc.push_integral(Complex64::ONE, halfline_integral(&f, &d.weight, cfg)?);
        }
    }
    if !o.diag.is_zero() {
        for m in &rho.diag.point_masses {
            acc.value += m.weight * o.diag.eval_at(Complex64::new(m.e, 0.0))?;
        }
    }

    let one = PolySymbol::one();
    for r in &rho.kernel.density {
        for k in &o.kernel.terms {
            let left = halfline_integral(&r.left.product(&k.left)?, &one, cfg)?;
            let right = halfline_integral(&r.right.product(&k.right)?, &one, cfg)?;
            let c = r.coeff * k.coeff;
            acc.value += c * left.value * right.value;
            acc.error += c.norm()
                * (left.tail_estimate * right.value.norm()
                    + right.tail_estimate * left.value.norm());
        }
    }
    if !o.kernel.is_empty() {
        for m in &rho.kernel.point_masses {
            acc.value += m.weight * o.kernel.eval_at(m.z_left, m.z_right)?;
        }
    }

    Ok(PairingResult {
        value: acc.value,
        quadrature_error: acc.error,
    })
}

/// `∫₀^{e_max} |ψ(E)|² dE`.
pub fn norm_squared(psi: &TauRep, cfg: &QuadratureConfig) -> Result<f64> {
    let v = halfline_integral(&psi.conj().product(psi)?, &PolySymbol::one(), cfg)?.value;
    Ok(v.re)
}

/// `ψ/‖ψ‖` on the half line.
pub fn normalize(psi: &TauRep, cfg: &QuadratureConfig) -> Result<TauRep> {
    if psi.is_zero() {
        return Err(Error::InvalidArgument(
            "cannot normalize the zero wavefunction".into(),
        ));
    }
    let n2 = norm_squared(psi, cfg)?;
    if !(n2 > 0.0 && n2.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "wavefunction has non-positive norm on [0, e_max]: {n2:e}"
        )));
    }
    Ok(psi.scale(Complex64::new(1.0 / n2.sqrt(), 0.0)))
}

/// `ρ_E = |ψ(E)|²`, `ρ_{EE'} = ψ*(E)ψ(E')`, with `ψ` normalized first.
pub fn pure_state(psi: &TauRep, tag: BasisTag, cfg: &QuadratureConfig) -> Result<Functional> {
    let psi = normalize(psi, cfg)?;
    let psi_star = psi.conj();
    Ok(Functional {
        tag,
        diag: DiagonalComponent {
            density: vec![DensityTerm {
                weight: PolySymbol::one(),
                profile: psi_star.product(&psi)?,
            }],
            point_masses: Vec::new(),
        },
        kernel: KernelComponent {
            density: vec![KernelTerm::new(Complex64::ONE, psi_star, psi)],
            point_masses: Vec::new(),
        },
    })
}

/// Tolerance on `Σλ_i = 1` for mixtures.
pub const MIXTURE_WEIGHT_TOL: f64 = 1e-12;

/// `Σ λ_i ρ_{ψ_i}`.
///
/// Each `ψ_i` is normalized; the family is taken as given, so callers wanting
/// a proper density matrix should pass orthogonal wavefunctions.
pub fn mixture(
    entries: &[(f64, TauRep)],
    tag: BasisTag,
    cfg: &QuadratureConfig,
) -> Result<Functional> {
    if entries.is_empty() {
        return Err(Error::InvalidArgument(
            "mixture needs at least one entry".into(),
        ));
    }
    if let Some((w, _)) = entries.iter().find(|(w, _)| !(*w >= 0.0 && w.is_finite())) {
        return Err(Error::InvalidArgument(format!(
            "mixture weight {w} is negative or not finite"
        )));
    }
    let total: f64 = entries.iter().map(|(w, _)| w).sum();
    if (total - 1.0).abs() > MIXTURE_WEIGHT_TOL {
        return Err(Error::InvalidArgument(format!(
            "mixture weights sum to {total}, not 1"
        )));
    }
    let mut out = Functional::zero(tag);
    for (w, psi) in entries {
        if *w == 0.0 {
            continue;
        }
        let part = pure_state(psi, tag, cfg)?;
        out = out.add(&if *w == 1.0 {
            part
        } else {
            part.scale(Complex64::new(*w, 0.0))
        })?;
    }
    Ok(out)
}

/// `ρ_D = δ_{z₀*} ⊗ δ_{z₀}`, tagged `in`.
pub fn gamow(pole: &ResonancePole) -> Result<Functional> {
    gamow_tagged(pole, BasisTag::In)
}

pub fn gamow_tagged(pole: &ResonancePole, tag: BasisTag) -> Result<Functional> {
    pole.validate()?;
    let z0 = pole.z0();
    Ok(Functional {
        tag,
        diag: DiagonalComponent::default(),
        kernel: KernelComponent {
            density: Vec::new(),
            point_masses: vec![KernelMass {
                weight: Complex64::ONE,
                z_left: z0.conj(),
                z_right: z0,
            }],
        },
    })
}

/// `(e|`, with `(e|O) = O_E(e)`.
pub fn delta_diag(e: f64, tag: BasisTag) -> Result<Functional> {
    check_energy(e)?;
    Ok(Functional {
        tag,
        diag: DiagonalComponent {
            density: Vec::new(),
            point_masses: vec![DiagonalMass {
                weight: Complex64::ONE,
                e,
            }],
        },
        kernel: KernelComponent::default(),
    })
}

/// `(e e'|`, with `(e e'|O) = O_{EE'}(e, e')`.
pub fn delta_kernel(e: f64, e_prime: f64, tag: BasisTag) -> Result<Functional> {
    check_energy(e)?;
    check_energy(e_prime)?;
    Ok(Functional {
        tag,
        diag: DiagonalComponent::default(),
        kernel: KernelComponent {
            density: Vec::new(),
            point_masses: vec![KernelMass {
                weight: Complex64::ONE,
                z_left: Complex64::new(e, 0.0),
                z_right: Complex64::new(e_prime, 0.0),
            }],
        },
    })
}

/// The transition functional `ρ_{EE'} = φ*(E)ψ(E')`, so that
/// `(ρ|O) = ⟨φ|O_K ψ⟩` for the kernel part and `∫ φ* O_E ψ` for the diagonal.
pub fn transition(phi: &TauRep, psi: &TauRep, tag: BasisTag) -> Result<Functional> {
    let phi_star = phi.conj();
    Ok(Functional {
        tag,
        diag: DiagonalComponent {
            density: vec![DensityTerm {
                weight: PolySymbol::one(),
                profile: phi_star.product(psi)?,
            }],
            point_masses: Vec::new(),
        },
        kernel: KernelComponent {
            density: vec![KernelTerm::new(Complex64::ONE, phi_star, psi.clone())],
            point_masses: Vec::new(),
        },
    })
}
