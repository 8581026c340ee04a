//! Entire functions of exponential type, stored through their compactly
//! supported inverse Fourier transform.
//!
//! A function in the space `Z` is kept as samples of `φ̂(τ)` on a uniform grid
//! `τ_k = τ_min + k·h`, and is defined everywhere in the complex plane by
//!
//! ```text
//! φ(z) = h · Σ_k φ̂_k · exp(i z τ_k)
//! ```
//!
//! With this convention multiplication by `E` is `i·d/dτ`, multiplication by
//! `exp(itE)` is a translation of the grid by `t`, and the product of two
//! functions is the (discrete) convolution of their samples. Because the
//! sampled bumps vanish to all orders at the grid edges, the uniform sum is the
//! trapezoidal rule and converges faster than any power of `h`.

mod halfline;
mod poly;
mod spectral;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use halfline::{halfline_integral, HalflineIntegral, QuadratureConfig};
pub use poly::PolySymbol;
pub use spectral::MAX_POLY_DEGREE;

/// Default relative size allowed for the edge samples of a grid.
pub const DEFAULT_BOUNDARY_TOL: f64 = 1e-10;

/// Largest `|Im z|·|τ|` accepted when forming `exp(i z τ)`.
pub const EXPONENT_GUARD: f64 = 700.0;

const MIN_SAMPLES: usize = 8;

/// A function of `Z`, represented by samples of its inverse Fourier transform.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TauRepDoc", into = "TauRepDoc")]
pub struct TauRep {
    tau_min: f64,
    tau_max: f64,
    samples: Vec<Complex64>,
}

#[derive(Serialize, Deserialize)]
struct TauRepDoc {
    tau_min: f64,
    tau_max: f64,
    samples: Vec<Complex64>,
}

impl TryFrom<TauRepDoc> for TauRep {
    type Error = Error;

    fn try_from(doc: TauRepDoc) -> Result<Self> {
        TauRep::new(doc.tau_min, doc.tau_max, doc.samples)
    }
}

impl From<TauRep> for TauRepDoc {
    fn from(rep: TauRep) -> Self {
        TauRepDoc {
            tau_min: rep.tau_min,
            tau_max: rep.tau_max,
            samples: rep.samples,
        }
    }
}

impl TauRep {
    /// Builds a representation from samples on `[tau_min, tau_max]`, checking
    /// the grid invariants with the default boundary tolerance.
    pub fn new(tau_min: f64, tau_max: f64, samples: Vec<Complex64>) -> Result<Self> {
        Self::with_boundary_tol(tau_min, tau_max, samples, DEFAULT_BOUNDARY_TOL)
    }

    pub fn with_boundary_tol(
        tau_min: f64,
        tau_max: f64,
        samples: Vec<Complex64>,
        boundary_tol: f64,
    ) -> Result<Self> {
        if !(tau_min.is_finite() && tau_max.is_finite()) || tau_min >= tau_max {
            return Err(Error::InvalidArgument(format!(
                "grid interval [{tau_min}, {tau_max}] is empty or not finite"
            )));
        }
        if samples.len() < MIN_SAMPLES {
            return Err(Error::InvalidArgument(format!(
                "grid needs at least {MIN_SAMPLES} samples, got {}",
                samples.len()
            )));
        }
        Self::checked(tau_min, tau_max, samples, boundary_tol, None)
    }

    /// Checked constructor from origin and step. `scale` overrides the
    /// reference magnitude used by the boundary test.
    pub(crate) fn from_grid(
        tau_min: f64,
        grid_step: f64,
        samples: Vec<Complex64>,
        boundary_tol: f64,
        scale: Option<f64>,
    ) -> Result<Self> {
        let tau_max = tau_min + samples.len().saturating_sub(1) as f64 * grid_step;
        Self::checked(tau_min, tau_max, samples, boundary_tol, scale)
    }

    fn checked(
        tau_min: f64,
        tau_max: f64,
        samples: Vec<Complex64>,
        boundary_tol: f64,
        scale: Option<f64>,
    ) -> Result<Self> {
        if samples.len() < MIN_SAMPLES {
            return Err(Error::InvalidArgument(format!(
                "grid needs at least {MIN_SAMPLES} samples, got {}",
                samples.len()
            )));
        }
        if !(tau_min.is_finite() && tau_max.is_finite() && tau_min < tau_max) {
            return Err(Error::InvalidArgument(format!(
                "invalid grid: [{tau_min}, {tau_max}]"
            )));
        }
        if samples
            .iter()
            .any(|s| !(s.re.is_finite() && s.im.is_finite()))
        {
            return Err(Error::Invariant("non-finite sample".into()));
        }
        let peak = samples.iter().map(|s| s.norm()).fold(0.0, f64::max);
        let reference = scale.unwrap_or(peak).max(peak);
        let edge = samples[0].norm().max(samples[samples.len() - 1].norm());
        if edge > boundary_tol * reference {
            return Err(Error::Invariant(format!(
                "edge samples not small: |edge| = {edge:.3e}, max = {reference:.3e}"
            )));
        }
        Ok(Self {
            tau_min,
            tau_max,
            samples,
        })
    }

    /// Result of an operation on a shared lattice, e.g. a convolution or a
    /// spectral derivative. Edge samples carry the operation's round-off, so
    /// only finiteness is checked.
    pub(crate) fn derived(tau_min: f64, grid_step: f64, samples: Vec<Complex64>) -> Result<Self> {
        if samples
            .iter()
            .any(|s| !(s.re.is_finite() && s.im.is_finite()))
        {
            return Err(Error::Invariant("non-finite sample".into()));
        }
        Ok(Self {
            tau_min,
            tau_max: tau_min + (samples.len() - 1) as f64 * grid_step,
            samples,
        })
    }

    /// The zero function.
    pub fn zero() -> Self {
        Self {
            tau_min: -1.0,
            tau_max: 1.0,
            samples: vec![Complex64::ZERO; MIN_SAMPLES],
        }
    }

    pub fn tau_min(&self) -> f64 {
        self.tau_min
    }

    pub fn tau_max(&self) -> f64 {
        self.tau_max
    }

    pub fn grid_step(&self) -> f64 {
        (self.tau_max - self.tau_min) / (self.samples.len() - 1) as f64
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.samples.iter().all(|s| *s == Complex64::ZERO)
    }

    #[inline]
    pub fn tau_at(&self, k: usize) -> f64 {
        self.tau_min + k as f64 * self.grid_step()
    }

    /// `(τ_min, τ_max)`.
    pub fn support(&self) -> (f64, f64) {
        (self.tau_min, self.tau_max())
    }

    pub fn max_abs_sample(&self) -> f64 {
        self.samples.iter().map(|s| s.norm()).fold(0.0, f64::max)
    }

    /// `h·Σ|φ̂_k|`, an upper bound for `|φ(E)|` on the real axis.
    pub fn l1_norm(&self) -> f64 {
        self.grid_step() * self.samples.iter().map(|s| s.norm()).sum::<f64>()
    }

    /// Evaluates the entire function at a complex point.
    pub fn eval_at(&self, z: Complex64) -> Result<Complex64> {
        let reach = self.tau_min.abs().max(self.tau_max().abs());
        if z.im.abs() * reach >= EXPONENT_GUARD {
            return Err(Error::Range(format!(
                "|Im z|·|τ| = {:.3e} exceeds {EXPONENT_GUARD} (z = {z}, support [{}, {}])",
                z.im.abs() * reach,
                self.tau_min,
                self.tau_max()
            )));
        }
        if self.is_zero() {
            return Ok(Complex64::ZERO);
        }
        let h = self.grid_step();
        let mut acc = Complex64::ZERO;
        for (k, s) in self.samples.iter().enumerate() {
            let tau = self.tau_min + k as f64 * h;
            let (sin, cos) = (z.re * tau).sin_cos();
            let mag = (-z.im * tau).exp();
            acc += s * Complex64::new(mag * cos, mag * sin);
        }
        Ok(acc * h)
    }

    /// Evaluates on the real axis, where no range guard is needed.
    pub fn eval_real(&self, e: f64) -> Complex64 {
        let h = self.grid_step();
        let mut acc = Complex64::ZERO;
        for (k, s) in self.samples.iter().enumerate() {
            let (sin, cos) = (e * (self.tau_min + k as f64 * h)).sin_cos();
            acc += s * Complex64::new(cos, sin);
        }
        acc * h
    }

    pub fn scale(&self, c: Complex64) -> Self {
        if c == Complex64::ZERO {
            return Self::zero();
        }
        Self {
            tau_min: self.tau_min,
            tau_max: self.tau_max,
            samples: self.samples.iter().map(|s| s * c).collect(),
        }
    }

    /// `φ*(z) = conj(φ(conj z))`: the samples are conjugated and the grid is
    /// reflected, `φ̂*(τ) = conj(φ̂(−τ))`. Applying it twice is exact.
    pub fn conj(&self) -> Self {
        Self {
            tau_min: -self.tau_max,
            tau_max: -self.tau_min,
            samples: self.samples.iter().rev().map(|s| s.conj()).collect(),
        }
    }

    /// Multiplication by `exp(itE)`: the τ-support moves by `t`.
    pub fn translate(&self, t: f64) -> Self {
        Self {
            tau_min: self.tau_min + t,
            tau_max: self.tau_max + t,
            samples: self.samples.clone(),
        }
    }

    /// Shifts the function along the energy axis: the result evaluates to
    /// `φ(z − e0)`.
    pub fn shift_energy(&self, e0: f64) -> Self {
        let samples = self
            .samples
            .iter()
            .enumerate()
            .map(|(k, s)| {
                let (sin, cos) = (-e0 * self.tau_at(k)).sin_cos();
                s * Complex64::new(cos, sin)
            })
            .collect();
        Self {
            tau_min: self.tau_min,
            tau_max: self.tau_max,
            samples,
        }
    }

    /// Pointwise sum. Grids sharing a lattice are merged exactly; otherwise
    /// the coarser operand is resampled onto the finer lattice.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if other.is_zero() {
            return Ok(self.clone());
        }
        if self.is_zero() {
            return Ok(other.clone());
        }
        let (reference, rest) = if other.grid_step() < self.grid_step() {
            (other, self)
        } else {
            (self, other)
        };
        let h = reference.grid_step();
        let lo = self.tau_min.min(other.tau_min);
        let hi = self.tau_max().max(other.tau_max());
        let k_lo = ((lo - reference.tau_min) / h + 1e-9).floor() as i64;
        let k_hi = ((hi - reference.tau_min) / h - 1e-9).ceil() as i64;
        let n = (k_hi - k_lo + 1) as usize;
        let origin = reference.tau_min + k_lo as f64 * h;
        let mut samples = vec![Complex64::ZERO; n];
        let ref_offset = (-k_lo) as usize;
        for (k, s) in reference.samples.iter().enumerate() {
            samples[ref_offset + k] += s;
        }
        match spectral::lattice_offset(rest, origin, h) {
            Some(offset) => {
                for (k, s) in rest.samples.iter().enumerate() {
                    samples[offset + k] += s;
                }
                // each edge sample is an operand's edge sample (or a sum of
                // them), so the operands' boundary check carries over
                Ok(Self {
                    tau_min: origin,
                    tau_max: origin + (n - 1) as f64 * h,
                    samples,
                })
            }
            None => {
                let resampled = spectral::resample(rest, origin, h, n);
                for (acc, s) in samples.iter_mut().zip(resampled) {
                    *acc += s;
                }
                let scale = self.max_abs_sample().max(other.max_abs_sample());
                Self::from_grid(origin, h, samples, DEFAULT_BOUNDARY_TOL, Some(scale))
            }
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(-Complex64::ONE))
    }

    /// Product of two functions of `Z`, realized as a convolution in τ.
    pub fn product(&self, other: &Self) -> Result<Self> {
        spectral::product(self, other)
    }

    /// Multiplies by the polynomial `p(E)`.
    pub fn poly_action(&self, p: &PolySymbol) -> Result<Self> {
        spectral::poly_action(p, self)
    }

    /// Largest samplewise difference to another representation on the same
    /// grid, or `None` when the grids differ.
    pub fn max_sample_diff(&self, other: &Self) -> Option<f64> {
        let same_grid = self.samples.len() == other.samples.len()
            && (self.grid_step() - other.grid_step()).abs() <= 1e-12 * self.grid_step()
            && (self.tau_min - other.tau_min).abs() <= 1e-12 * (1.0 + self.tau_min.abs());
        same_grid.then(|| {
            self.samples
                .iter()
                .zip(&other.samples)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max)
        })
    }
}

/// Samples the mollifier `exp(−1/(1−u²))` on `[center − half_width, center + half_width]`.
pub fn make_bump(center: f64, half_width: f64, grid_points: usize) -> Result<TauRep> {
    if !(half_width > 0.0 && half_width.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "bump half-width must be positive, got {half_width}"
        )));
    }
    if !center.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "bump center {center} is not finite"
        )));
    }
    if grid_points < MIN_SAMPLES {
        return Err(Error::InvalidArgument(format!(
            "bump needs at least {MIN_SAMPLES} grid points, got {grid_points}"
        )));
    }
    let last = grid_points - 1;
    let samples = (0..grid_points)
        .map(|k| {
            if k == 0 || k == last {
                return Complex64::ZERO;
            }
            let u = -1.0 + 2.0 * k as f64 / last as f64;
            let gap = 1.0 - u * u;
            if gap <= 0.0 {
                Complex64::ZERO
            } else {
                Complex64::new((-1.0 / gap).exp(), 0.0)
            }
        })
        .collect();
    TauRep::checked(
        center - half_width,
        center + half_width,
        samples,
        DEFAULT_BOUNDARY_TOL,
        None,
    )
}

/// Convenience wrapper over [`TauRep::eval_at`].
pub fn eval_at(phi: &TauRep, z: Complex64) -> Result<Complex64> {
    phi.eval_at(z)
}

pub fn product(phi: &TauRep, psi: &TauRep) -> Result<TauRep> {
    phi.product(psi)
}

pub fn poly_action(p: &PolySymbol, phi: &TauRep) -> Result<TauRep> {
    phi.poly_action(p)
}

pub fn translate(phi: &TauRep, t: f64) -> TauRep {
    phi.translate(t)
}
