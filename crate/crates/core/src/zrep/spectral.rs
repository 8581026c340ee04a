use std::cell::RefCell;
use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use super::{PolySymbol, TauRep, DEFAULT_BOUNDARY_TOL};
use crate::error::{Error, Result};

/// Highest polynomial degree accepted by [`poly_action`].
pub const MAX_POLY_DEGREE: usize = 8;

/// Fourier bins below this fraction of the peak are treated as round-off and
/// dropped before a polynomial multiplier amplifies them.
const NOISE_FLOOR: f64 = f64::EPSILON;

const DIRECT_CONVOLUTION_LIMIT: usize = 4096;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn fft_in_place(buf: &mut [Complex64], inverse: bool) {
    PLANNER.with(|p| {
        let mut planner = p.borrow_mut();
        let fft = if inverse {
            planner.plan_fft_inverse(buf.len())
        } else {
            planner.plan_fft_forward(buf.len())
        };
        fft.process(buf);
    });
}

/// Index of `rep`'s first sample on the lattice `origin + k·h`, if `rep`
/// lies on that lattice.
pub(super) fn lattice_offset(rep: &TauRep, origin: f64, h: f64) -> Option<usize> {
    if (rep.grid_step() - h).abs() > 1e-12 * h {
        return None;
    }
    let shift = (rep.tau_min - origin) / h;
    let k = shift.round();
    ((shift - k).abs() <= 1e-9 && k >= 0.0).then_some(k as usize)
}

/// Band-limited (sinc) interpolation of `rep` onto `origin + m·h`, `m < n`.
pub(super) fn resample(rep: &TauRep, origin: f64, h: f64, n: usize) -> Vec<Complex64> {
    let src_h = rep.grid_step();
    (0..n)
        .map(|m| {
            let s = (origin + m as f64 * h - rep.tau_min) / src_h;
            let nearest = s.round();
            if (s - nearest).abs() < 1e-12 {
                let k = nearest as i64;
                return if k >= 0 && (k as usize) < rep.samples.len() {
                    rep.samples[k as usize]
                } else {
                    Complex64::ZERO
                };
            }
            // sin(π(s−k)) = (−1)^k sin(πs)
            let mut acc = Complex64::ZERO;
            for (k, f) in rep.samples.iter().enumerate() {
                let term = f / (s - k as f64);
                if k % 2 == 0 {
                    acc += term;
                } else {
                    acc -= term;
                }
            }
            acc * ((PI * s).sin() / PI)
        })
        .collect()
}

fn regrid(rep: &TauRep, h: f64) -> TauRep {
    if (rep.grid_step() - h).abs() <= 1e-12 * h {
        return rep.clone();
    }
    let width = rep.tau_max - rep.tau_min;
    let n = ((width / h) - 1e-9).ceil() as usize + 1;
    TauRep {
        tau_min: rep.tau_min,
        tau_max: rep.tau_min + (n - 1) as f64 * h,
        samples: resample(rep, rep.tau_min, h, n),
    }
}

fn convolve(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let n = a.len() + b.len() - 1;
    if a.len().min(b.len()) <= 32 || a.len() * b.len() <= DIRECT_CONVOLUTION_LIMIT {
        let mut out = vec![Complex64::ZERO; n];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        return out;
    }
    let m = n.next_power_of_two();
    let mut fa = vec![Complex64::ZERO; m];
    let mut fb = vec![Complex64::ZERO; m];
    fa[..a.len()].copy_from_slice(a);
    fb[..b.len()].copy_from_slice(b);
    fft_in_place(&mut fa, false);
    fft_in_place(&mut fb, false);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x *= y;
    }
    fft_in_place(&mut fa, true);
    let norm = 1.0 / m as f64;
    fa.truncate(n);
    fa.iter_mut().for_each(|x| *x *= norm);
    fa
}

pub(super) fn product(phi: &TauRep, psi: &TauRep) -> Result<TauRep> {
    if phi.is_zero() || psi.is_zero() {
        return Ok(TauRep::zero());
    }
    let h = phi.grid_step().min(psi.grid_step());
    let same_step = (phi.grid_step() - psi.grid_step()).abs() <= 1e-12 * h;
    let (a, b) = (regrid(phi, h), regrid(psi, h));
    let mut samples = convolve(&a.samples, &b.samples);
    samples.iter_mut().for_each(|s| *s *= h);
    if same_step {
        return TauRep::derived(a.tau_min + b.tau_min, h, samples);
    }
    // resampling can leave interpolation tails at the edges; check them
    let scale = h * a.max_abs_sample() * b.max_abs_sample();
    TauRep::from_grid(
        a.tau_min + b.tau_min,
        h,
        samples,
        DEFAULT_BOUNDARY_TOL,
        Some(scale),
    )
}

/// Multiplies `φ` by `p(E)`. On the grid `E` acts as `i·d/dτ`, applied
/// spectrally on a zero-padded FFT grid: bin frequency `ω` picks up `p(−ω)`.
pub(super) fn poly_action(p: &PolySymbol, phi: &TauRep) -> Result<TauRep> {
    if p.degree() > MAX_POLY_DEGREE {
        return Err(Error::UnsupportedDegree {
            degree: p.degree(),
            max: MAX_POLY_DEGREE,
        });
    }
    if p.is_zero() || phi.is_zero() {
        return Ok(TauRep::zero());
    }
    if p.degree() == 0 {
        return Ok(phi.scale(p.coeffs()[0]));
    }
    let n = phi.samples.len();
    let m = (2 * n).next_power_of_two();
    let mut buf = vec![Complex64::ZERO; m];
    buf[..n].copy_from_slice(&phi.samples);
    fft_in_place(&mut buf, false);

    let peak = buf.iter().map(|x| x.norm()).fold(0.0, f64::max);
    let floor = NOISE_FLOOR * peak;
    let half = m / 2;
    // outermost frequency index still above the round-off floor
    let cutoff = (1..half)
        .rev()
        .find(|&j| buf[j].norm() > floor || buf[m - j].norm() > floor)
        .unwrap_or(0);

    let dw = 2.0 * PI / (m as f64 * phi.grid_step());
    for (j, x) in buf.iter_mut().enumerate() {
        let signed = if j < half {
            j as i64
        } else {
            j as i64 - m as i64
        };
        if j == half || signed.unsigned_abs() as usize > cutoff {
            *x = Complex64::ZERO;
            continue;
        }
        let omega = signed as f64 * dw;
        *x *= p.eval(Complex64::new(-omega, 0.0));
    }
    fft_in_place(&mut buf, true);
    let norm = 1.0 / m as f64;
    let samples: Vec<Complex64> = buf[..n].iter().map(|x| x * norm).collect();
    TauRep::derived(phi.tau_min, phi.grid_step(), samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zrep::make_bump;

    fn z(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn product_support_adds() {
        let a = make_bump(0.0, 1.0, 129).unwrap();
        let b = make_bump(3.0, 1.0, 129).unwrap();
        let p = a.product(&b).unwrap();
        let (lo, hi) = p.support();
        assert!((lo - 1.0).abs() < 1e-14 && (hi - 5.0).abs() < 1e-12);
    }

    #[test]
    fn product_with_zero_is_zero() {
        let a = make_bump(0.0, 1.0, 129).unwrap();
        assert!(a.product(&TauRep::zero()).unwrap().is_zero());
    }

    #[test]
    fn product_matches_pointwise_square() {
        let phi = make_bump(0.2, 1.0, 513).unwrap().shift_energy(0.8);
        let sq = phi.product(&phi).unwrap();
        let x = z(1.3, 0.0);
        let expected = phi.eval_at(x).unwrap().powi(2);
        let got = sq.eval_at(x).unwrap();
        assert!(
            (got - expected).norm() <= 1e-6 * expected.norm(),
            "{got} vs {expected}"
        );
    }

    #[test]
    fn product_of_different_steps() {
        let a = make_bump(0.0, 1.0, 257).unwrap();
        let b = make_bump(0.5, 1.5, 301).unwrap().shift_energy(1.0);
        let p = a.product(&b).unwrap();
        for x in [z(0.0, 0.0), z(1.5, 0.7), z(-2.0, -1.0)] {
            let expected = a.eval_at(x).unwrap() * b.eval_at(x).unwrap();
            let got = p.eval_at(x).unwrap();
            assert!(
                (got - expected).norm() <= 1e-6 * (1.0 + expected.norm()),
                "{x}"
            );
        }
    }

    #[test]
    fn fft_and_direct_convolution_agree() {
        let a: Vec<Complex64> = (0..300)
            .map(|k| z((k as f64).sin(), (k as f64 * 0.3).cos()))
            .collect();
        let b: Vec<Complex64> = (0..200)
            .map(|k| z((k as f64 * 0.7).cos(), 0.1 * k as f64))
            .collect();
        let fast = convolve(&a, &b);
        let mut slow = vec![Complex64::ZERO; a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                slow[i + j] += x * y;
            }
        }
        let err = fast
            .iter()
            .zip(&slow)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-9, "{err}");
    }

    #[test]
    fn constant_polynomial_is_identity() {
        let phi = make_bump(0.0, 1.0, 129).unwrap();
        assert_eq!(phi.poly_action(&PolySymbol::one()).unwrap(), phi);
    }

    #[test]
    fn energy_action_vanishes_at_origin() {
        let phi = make_bump(0.0, 1.0, 513).unwrap();
        let e_phi = phi.poly_action(&PolySymbol::monomial(1)).unwrap();
        assert!(e_phi.eval_at(Complex64::ZERO).unwrap().norm() < 1e-12);
    }

    #[test]
    fn square_action_matches_pointwise() {
        let phi = make_bump(0.0, 1.0, 1025).unwrap();
        let e2 = phi.poly_action(&PolySymbol::monomial(2)).unwrap();
        let x = z(2.0, 0.0);
        let expected = 4.0 * phi.eval_at(x).unwrap();
        let got = e2.eval_at(x).unwrap();
        assert!(
            (got - expected).norm() <= 1e-6 * expected.norm(),
            "{got} vs {expected}"
        );
    }

    #[test]
    fn high_degree_action_on_wide_packet() {
        // E^8 φ has a large dynamic range; accuracy is relative to where the
        // packet actually lives in energy.
        let phi = make_bump(0.0, 6.0, 1537).unwrap().shift_energy(20.0);
        let mut coeffs = vec![Complex64::ZERO; 9];
        coeffs[0] = z(1.0, 0.0);
        coeffs[1] = z(0.0, -0.5);
        coeffs[2] = z(0.25, 0.0);
        coeffs[8] = z(0.01, 0.02);
        let p = PolySymbol::new(coeffs);
        assert_eq!(p.degree(), 8);
        let acted = phi.poly_action(&p).unwrap();
        for x in [z(19.5, 0.0), z(20.0, 0.1), z(21.0, -0.2)] {
            let expected = p.eval(x) * phi.eval_at(x).unwrap();
            let got = acted.eval_at(x).unwrap();
            assert!(
                (got - expected).norm() <= 1e-6 * expected.norm(),
                "{x}: {got} vs {expected}"
            );
        }
    }

    #[test]
    fn degree_guard() {
        let phi = make_bump(0.0, 1.0, 129).unwrap();
        assert!(matches!(
            phi.poly_action(&PolySymbol::monomial(9)),
            Err(Error::UnsupportedDegree { degree: 9, max: 8 })
        ));
    }

    #[test]
    fn resample_reproduces_band_limited_data() {
        let phi = make_bump(0.0, 1.0, 257).unwrap();
        let fine = regrid(&phi, phi.grid_step() / 1.7);
        for x in [z(0.0, 0.0), z(3.0, 0.5)] {
            let d = (fine.eval_at(x).unwrap() - phi.eval_at(x).unwrap()).norm();
            assert!(d < 1e-10, "{d}");
        }
    }
}
