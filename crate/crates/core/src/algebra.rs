//! The involutive algebra of observables compatible with the Hamiltonian.
//!
//! An observable is `O = ∫ O_E |E⟩⟨E| dE + ∫∫ O_{EE'} |E⟩⟨E'| dE dE'` with a
//! diagonal symbol `O_E = P(E) + z(E)` (polynomial plus a function of `Z`) and
//! a finite-rank kernel `O_{EE'} = Σ λ_i a_i(E) b_i(E')`. Products use
//! `⟨E|E'⟩ = δ(E − E')` on `[0, ∞)`, so kernel-kernel products contract
//! through a half-line integral.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::zrep::{halfline_integral, PolySymbol, QuadratureConfig, TauRep, MAX_POLY_DEGREE};

/// Which generalized eigenbasis the symbols refer to: `|E⟩`, `|E⁺⟩` or `|E⁻⟩`.
///
/// The three algebras are isomorphic, so the tag only has to match.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisTag {
    Free,
    #[default]
    In,
    Out,
}

impl fmt::Display for BasisTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BasisTag::Free => "free",
            BasisTag::In => "in",
            BasisTag::Out => "out",
        })
    }
}

pub(crate) fn check_tags(left: BasisTag, right: BasisTag) -> Result<()> {
    if left == right {
        Ok(())
    } else {
        Err(Error::BasisMismatch { left, right })
    }
}

/// `O_E = poly(E) + zpart(E)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagonalSymbol {
    pub poly: PolySymbol,
    pub zpart: TauRep,
}

impl Default for DiagonalSymbol {
    fn default() -> Self {
        Self::zero()
    }
}

impl DiagonalSymbol {
    pub fn zero() -> Self {
        Self {
            poly: PolySymbol::zero(),
            zpart: TauRep::zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero() && self.zpart.is_zero()
    }

    pub fn eval_at(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.poly.eval(z) + self.zpart.eval_at(z)?)
    }

    pub fn conj(&self) -> Self {
        Self {
            poly: self.poly.conj(),
            zpart: self.zpart.conj(),
        }
    }

    /// `O_E · φ(E)` as a function of `Z`.
    pub fn act_on(&self, phi: &TauRep) -> Result<TauRep> {
        let from_poly = phi.poly_action(&self.poly)?;
        if self.zpart.is_zero() {
            return Ok(from_poly);
        }
        from_poly.add(&self.zpart.product(phi)?)
    }
}

/// One rank-one piece `coeff · left(E) · right(E')` of a kernel.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelTerm {
    pub coeff: Complex64,
    pub left: TauRep,
    pub right: TauRep,
}

impl KernelTerm {
    pub fn new(coeff: Complex64, left: TauRep, right: TauRep) -> Self {
        Self { coeff, left, right }
    }

    pub fn eval_at(&self, e: Complex64, e_prime: Complex64) -> Result<Complex64> {
        if self.coeff == Complex64::ZERO {
            return Ok(Complex64::ZERO);
        }
        Ok(self.coeff * self.left.eval_at(e)? * self.right.eval_at(e_prime)?)
    }

    /// `(conj λ, right*, left*)`, the term of the adjoint kernel `O*_{E'E}`.
    pub fn adjoint(&self) -> Self {
        Self {
            coeff: self.coeff.conj(),
            left: self.right.conj(),
            right: self.left.conj(),
        }
    }

    /// Size bound `|λ|·‖left‖₁·‖right‖₁`; a sample 1-norm bounds the function on the real axis.
    pub fn magnitude(&self) -> f64 {
        self.coeff.norm() * self.left.l1_norm() * self.right.l1_norm()
    }
}

/// `O_{EE'} = Σ λ_i a_i(E) b_i(E')`, a finite sum.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct KernelSymbol {
    pub terms: Vec<KernelTerm>,
}

impl KernelSymbol {
    pub fn new(terms: Vec<KernelTerm>) -> Self {
        Self { terms }
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn rank(&self) -> usize {
        self.terms.len()
    }

    pub fn eval_at(&self, e: Complex64, e_prime: Complex64) -> Result<Complex64> {
        self.terms
            .iter()
            .try_fold(Complex64::ZERO, |acc, t| Ok(acc + t.eval_at(e, e_prime)?))
    }

    pub fn adjoint(&self) -> Self {
        Self {
            terms: self.terms.iter().map(KernelTerm::adjoint).collect(),
        }
    }
}

/// Default size below which [`Observable::truncate_rank`] drops kernel terms.
pub const RANK_TRUNCATION_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Observable {
    pub tag: BasisTag,
    pub diag: DiagonalSymbol,
    pub kernel: KernelSymbol,
}

impl Observable {
    pub fn new(tag: BasisTag, diag: DiagonalSymbol, kernel: KernelSymbol) -> Self {
        Self { tag, diag, kernel }
    }

    pub fn zero(tag: BasisTag) -> Self {
        Self::new(tag, DiagonalSymbol::zero(), KernelSymbol::default())
    }

    /// `I = ∫ |E⟩⟨E| dE`.
    pub fn identity(tag: BasisTag) -> Self {
        Self::from_poly(tag, PolySymbol::one())
    }

    /// `Hⁿ = ∫ Eⁿ |E⟩⟨E| dE`, for `n ≤ 8`.
    pub fn hamiltonian_power(n: usize, tag: BasisTag) -> Result<Self> {
        if n > MAX_POLY_DEGREE {
            return Err(Error::UnsupportedDegree {
                degree: n,
                max: MAX_POLY_DEGREE,
            });
        }
        Ok(Self::from_poly(tag, PolySymbol::monomial(n)))
    }

    pub fn from_poly(tag: BasisTag, poly: PolySymbol) -> Self {
        Self::new(
            tag,
            DiagonalSymbol {
                poly,
                zpart: TauRep::zero(),
            },
            KernelSymbol::default(),
        )
    }

    /// A kernel-only observable `Σ λ_i a_i ⊗ b_i`.
    pub fn from_kernel(tag: BasisTag, terms: Vec<KernelTerm>) -> Self {
        Self::new(tag, DiagonalSymbol::zero(), KernelSymbol::new(terms))
    }

    /// `λ·|ψ⟩⟨φ|`-type rank-one kernel `λ ψ(E) φ(E')`.
    pub fn rank_one(tag: BasisTag, coeff: Complex64, left: TauRep, right: TauRep) -> Self {
        Self::from_kernel(tag, vec![KernelTerm::new(coeff, left, right)])
    }

    pub fn retag(&self, tag: BasisTag) -> Self {
        Self {
            tag,
            ..self.clone()
        }
    }

    pub fn is_zero(&self) -> bool {
        self.diag.is_zero() && self.kernel.is_empty()
    }

    pub fn scale(&self, c: Complex64) -> Self {
        if c == Complex64::ZERO {
            return Self::zero(self.tag);
        }
        Self {
            tag: self.tag,
            diag: DiagonalSymbol {
                poly: self.diag.poly.scale(c),
                zpart: self.diag.zpart.scale(c),
            },
            kernel: KernelSymbol {
                terms: self
                    .kernel
                    .terms
                    .iter()
                    .map(|t| KernelTerm::new(t.coeff * c, t.left.clone(), t.right.clone()))
                    .collect(),
            },
        }
    }

    /// Componentwise sum; kernel term lists are concatenated.
    pub fn add(&self, other: &Self) -> Result<Self> {
        check_tags(self.tag, other.tag)?;
        let mut terms = self.kernel.terms.clone();
        terms.extend(other.kernel.terms.iter().cloned());
        Ok(Self {
            tag: self.tag,
            diag: DiagonalSymbol {
                poly: self.diag.poly.add(&other.diag.poly),
                zpart: self.diag.zpart.add(&other.diag.zpart)?,
            },
            kernel: KernelSymbol { terms },
        })
    }

    /// Operator product `O·O'`.
    ///
    /// * diagonal: `O_E O'_E`
    /// * kernel: `O_E O'_{EE'} + O_{EE'} O'_{E'} + ∫₀^∞ O_{EE''} O'_{E''E'} dE''`
    ///
    /// The last term contracts each pair of rank-one pieces through a
    /// half-line integral, so the rank is at most `r + r' + r·r'`.
    pub fn multiply(&self, other: &Self, cfg: &QuadratureConfig) -> Result<Self> {
        check_tags(self.tag, other.tag)?;

        let poly = self.diag.poly.mul(&other.diag.poly);
        let mut zpart = other.diag.zpart.poly_action(&self.diag.poly)?;
        zpart = zpart.add(&self.diag.zpart.poly_action(&other.diag.poly)?)?;
        if !self.diag.zpart.is_zero() && !other.diag.zpart.is_zero() {
            zpart = zpart.add(&self.diag.zpart.product(&other.diag.zpart)?)?;
        }

        let mut terms = Vec::with_capacity(
            self.kernel.rank() + other.kernel.rank() + self.kernel.rank() * other.kernel.rank(),
        );
        if !self.diag.is_zero() {
            for t in &other.kernel.terms {
                let left = self.diag.act_on(&t.left)?;
                if !left.is_zero() {
                    terms.push(KernelTerm::new(t.coeff, left, t.right.clone()));
                }
            }
        }
        if !other.diag.is_zero() {
            for t in &self.kernel.terms {
                let right = other.diag.act_on(&t.right)?;
                if !right.is_zero() {
                    terms.push(KernelTerm::new(t.coeff, t.left.clone(), right));
                }
            }
        }
        for a in &self.kernel.terms {
            for b in &other.kernel.terms {
                let overlap =
                    halfline_integral(&a.right.product(&b.left)?, &PolySymbol::one(), cfg)?;
                let coeff = a.coeff * b.coeff * overlap.value;
                if coeff != Complex64::ZERO {
                    terms.push(KernelTerm::new(coeff, a.left.clone(), b.right.clone()));
                }
            }
        }

        Ok(Self {
            tag: self.tag,
            diag: DiagonalSymbol { poly, zpart },
            kernel: KernelSymbol { terms },
        })
    }

    /// `O† = ∫ O*_E |E⟩⟨E| + ∫∫ O*_{E'E} |E⟩⟨E'|`.
    pub fn adjoint(&self) -> Self {
        Self {
            tag: self.tag,
            diag: self.diag.conj(),
            kernel: self.kernel.adjoint(),
        }
    }

    /// Largest deviation between `O` and `O†`: coefficient and sample
    /// differences of the diagonal symbol (sup bounds on the real axis) and
    /// `max |O_{EE'} − conj(O_{E'E})|` over the probe energies of `cfg`.
    pub fn self_adjoint_deviation(&self, cfg: &QuadratureConfig) -> Result<f64> {
        cfg.validate()?;
        let poly_dev = self
            .diag
            .poly
            .coeffs()
            .iter()
            .map(|c| 2.0 * c.im.abs())
            .fold(0.0, f64::max);
        let z_dev = self.diag.zpart.sub(&self.diag.zpart.conj())?.l1_norm();

        let energies = cfg.probe_energies();
        let n = energies.len();
        let mut kernel = vec![Complex64::ZERO; n * n];
        for t in &self.kernel.terms {
            let left: Vec<Complex64> = energies.iter().map(|&e| t.left.eval_real(e)).collect();
            let right: Vec<Complex64> = energies.iter().map(|&e| t.right.eval_real(e)).collect();
            for (i, l) in left.iter().enumerate() {
                for (j, r) in right.iter().enumerate() {
                    kernel[i * n + j] += t.coeff * l * r;
                }
            }
        }
        let mut kernel_dev = 0.0f64;
        for i in 0..n {
            for j in i..n {
                kernel_dev = kernel_dev.max((kernel[i * n + j] - kernel[j * n + i].conj()).norm());
            }
        }
        Ok(poly_dev.max(z_dev).max(kernel_dev))
    }

    pub fn is_self_adjoint(&self, tol: f64) -> bool {
        self.is_self_adjoint_with(tol, &QuadratureConfig::default())
    }

    pub fn is_self_adjoint_with(&self, tol: f64, cfg: &QuadratureConfig) -> bool {
        self.self_adjoint_deviation(cfg).is_ok_and(|d| d <= tol)
    }

    /// `(Oψ)(E) = O_E ψ(E) + ∫₀^∞ O_{EE'} ψ(E') dE'`.
    pub fn apply(&self, psi: &TauRep, cfg: &QuadratureConfig) -> Result<TauRep> {
        let mut out = self.diag.act_on(psi)?;
        for t in &self.kernel.terms {
            let overlap = halfline_integral(&t.right.product(psi)?, &PolySymbol::one(), cfg)?.value;
            out = out.add(&t.left.scale(t.coeff * overlap))?;
        }
        Ok(out)
    }

    /// Drops kernel terms whose size `|λ|·‖left‖·‖right‖` is below `tol`.
    pub fn truncate_rank(&self, tol: f64) -> Self {
        Self {
            tag: self.tag,
            diag: self.diag.clone(),
            kernel: KernelSymbol {
                terms: self
                    .kernel
                    .terms
                    .iter()
                    .filter(|t| t.magnitude() >= tol)
                    .cloned()
                    .collect(),
            },
        }
    }
}

/// `⟨f, g⟩ = ∫₀^{e_max} conj(f(E)) g(E) dE`.
pub fn halfline_inner(f: &TauRep, g: &TauRep, cfg: &QuadratureConfig) -> Result<Complex64> {
    Ok(halfline_integral(&f.conj().product(g)?, &PolySymbol::one(), cfg)?.value)
}

pub fn identity(tag: BasisTag) -> Observable {
    Observable::identity(tag)
}

pub fn hamiltonian_power(n: usize, tag: BasisTag) -> Result<Observable> {
    Observable::hamiltonian_power(n, tag)
}

pub fn add(a: &Observable, b: &Observable) -> Result<Observable> {
    a.add(b)
}

pub fn scale(c: Complex64, o: &Observable) -> Observable {
    o.scale(c)
}

pub fn multiply(a: &Observable, b: &Observable, cfg: &QuadratureConfig) -> Result<Observable> {
    a.multiply(b, cfg)
}

pub fn adjoint(o: &Observable) -> Observable {
    o.adjoint()
}

pub fn is_self_adjoint(o: &Observable, tol: f64) -> bool {
    o.is_self_adjoint(tol)
}
