use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{PolySymbol, TauRep, DEFAULT_BOUNDARY_TOL};
use crate::error::{Error, Result};

/// Truncation and grid parameters for integrals over `[0, ∞)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadratureConfig {
    /// Upper limit standing in for `∞`.
    pub e_max: f64,
    /// Number of energy probes on `[0, e_max]` for sampled comparisons.
    pub n_nodes: usize,
    pub boundary_tol: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            e_max: 50.0,
            n_nodes: 64,
            boundary_tol: DEFAULT_BOUNDARY_TOL,
        }
    }
}

impl QuadratureConfig {
    pub fn new(e_max: f64, n_nodes: usize) -> Result<Self> {
        let cfg = Self {
            e_max,
            n_nodes,
            ..Self::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.e_max > 0.0 && self.e_max.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "e_max must be positive, got {}",
                self.e_max
            )));
        }
        if self.n_nodes < 16 {
            return Err(Error::InvalidArgument(format!(
                "n_nodes must be at least 16, got {}",
                self.n_nodes
            )));
        }
        if !(self.boundary_tol > 0.0 && self.boundary_tol < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "boundary_tol must lie in (0, 1), got {}",
                self.boundary_tol
            )));
        }
        Ok(())
    }

    /// Evenly spaced probe energies on `[0, e_max]`.
    pub fn probe_energies(&self) -> Vec<f64> {
        let n = self.n_nodes;
        (0..n)
            .map(|k| self.e_max * k as f64 / (n - 1) as f64)
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HalflineIntegral {
    pub value: Complex64,
    /// `|∫_{e_max}^{2e_max}|`, the change seen when the cutoff is doubled.
    pub tail_estimate: f64,
}

/// `∫₀^{e_max} weight(E)·φ(E) dE`.
///
/// The energy integral is done in closed form for each grid node, using
/// `∫₀^L E^n e^{iEτ} dE = L^{n+1} J_n(τL)` with `J_n(θ) = ∫₀¹ u^n e^{iθu} du`,
/// so the result is exact for the sampled function and only the τ-grid
/// discretization remains.
pub fn halfline_integral(
    phi: &TauRep,
    weight: &PolySymbol,
    cfg: &QuadratureConfig,
) -> Result<HalflineIntegral> {
    cfg.validate()?;
    if weight.is_zero() || phi.is_zero() {
        return Ok(HalflineIntegral {
            value: Complex64::ZERO,
            tail_estimate: 0.0,
        });
    }
    let near = integrate_to(phi, weight, cfg.e_max);
    let far = integrate_to(phi, weight, 2.0 * cfg.e_max);
    Ok(HalflineIntegral {
        value: near,
        tail_estimate: (far - near).norm(),
    })
}

fn integrate_to(phi: &TauRep, weight: &PolySymbol, upper: f64) -> Complex64 {
    let coeffs = weight.coeffs();
    let degree = coeffs.len() - 1;
    // p_n L^{n+1}
    let scaled: Vec<Complex64> = coeffs
        .iter()
        .enumerate()
        .map(|(n, c)| c * upper.powi(n as i32 + 1))
        .collect();
    let mut moments = vec![Complex64::ZERO; degree + 1];
    let mut acc = Complex64::ZERO;
    for (k, s) in phi.samples().iter().enumerate() {
        if *s == Complex64::ZERO {
            continue;
        }
        let theta = phi.tau_at(k) * upper;
        unit_moments(theta, &mut moments);
        let m: Complex64 = scaled.iter().zip(&moments).map(|(c, j)| c * j).sum();
        acc += s * m;
    }
    acc * phi.grid_step()
}

/// Fills `out[n] = ∫₀¹ u^n e^{iθu} du` for `n < out.len()`.
pub(crate) fn unit_moments(theta: f64, out: &mut [Complex64]) {
    let n_max = out.len() - 1;
    if theta == 0.0 {
        for (n, o) in out.iter_mut().enumerate() {
            *o = Complex64::new(1.0 / (n + 1) as f64, 0.0);
        }
        return;
    }
    let (sin, cos) = theta.sin_cos();
    let e = Complex64::new(cos, sin);
    let i_theta = Complex64::new(0.0, theta);
    let a = theta.abs();
    if n_max == 0 || a > 2.0 * n_max as f64 {
        // upward: J_k = (e^{iθ} − k J_{k−1}) / (iθ), stable while k < |θ|/2
        let half = 0.5 * theta;
        out[0] = Complex64::new(sin / theta, 2.0 * half.sin() * half.sin() / theta);
        for k in 1..=n_max {
            out[k] = (e - k as f64 * out[k - 1]) / i_theta;
        }
    } else {
        // downward: J_{k−1} = (e^{iθ} − iθ J_k) / k, errors shrink by |θ|/k
        let top = n_max.max((2.0 * a).ceil() as usize) + 50;
        let mut j = e / (top + 1) as f64;
        for k in (1..=top).rev() {
            j = (e - i_theta * j) / k as f64;
            if k - 1 <= n_max {
                out[k - 1] = j;
            }
        }
    }
}
