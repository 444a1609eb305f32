//! Fourier-multiplier operators: Bessel potentials of complex order, Riesz
//! potentials, the Riesz transform and the Riesz fractional gradient.
//!
//! Riesz-type operators annihilate the zero mode; their inputs must be
//! mean-zero unless projection is requested explicitly.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{derivative_factor, quadrature_lp, wavenumber_norm_sq, GridFunction, Wavenumber};

/// Largest admissible `|Re σ|`.
pub const MAX_ORDER: f64 = 8.0;

/// Order `σ = s + it` of the Bessel potential `Λ_σ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MultiplierOrder {
    pub real_part: f64,
    pub imag_part: f64,
}

impl MultiplierOrder {
    pub fn new(real_part: f64, imag_part: f64) -> Result<Self> {
        if !real_part.is_finite() || !imag_part.is_finite() {
            return Err(Error::domain("multiplier order must be finite"));
        }
        if real_part.abs() > MAX_ORDER {
            return Err(Error::domain(format!(
                "|Re σ| = {} exceeds the guard {MAX_ORDER}",
                real_part.abs()
            )));
        }
        Ok(Self {
            real_part,
            imag_part,
        })
    }

    pub fn real(s: f64) -> Result<Self> {
        Self::new(s, 0.0)
    }

    pub fn imaginary(t: f64) -> Result<Self> {
        Self::new(0.0, t)
    }

    fn as_complex(&self) -> Complex64 {
        Complex64::new(self.real_part, self.imag_part)
    }
}

/// `1 + 4π²|k|²`, the Bessel weight of wavenumber `k`.
pub fn bessel_weight(k: Wavenumber) -> f64 {
    1.0 + 4.0 * PI * PI * wavenumber_norm_sq(k)
}

/// Symbol `(1 + 4π²|k|²)^{-σ/2}`. The base is real and positive, so the
/// complex power is single-valued.
pub fn bessel_symbol(k: Wavenumber, order: MultiplierOrder) -> Complex64 {
    (-order.as_complex() * 0.5 * bessel_weight(k).ln()).exp()
}

/// `Λ_σ u`.
pub fn bessel_potential(u: &GridFunction, order: MultiplierOrder) -> GridFunction {
    if order.real_part == 0.0 && order.imag_part == 0.0 {
        return u.clone();
    }
    u.apply_multiplier(|k| bessel_symbol(k, order))
}

/// How Riesz-type operators treat a nonzero mean.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeanPolicy {
    /// Reject inputs whose zero coefficient is not negligible.
    Require,
    /// Drop the zero coefficient silently.
    Project,
}

fn check_mean(u: &GridFunction, policy: MeanPolicy) -> Result<()> {
    if policy == MeanPolicy::Require && !u.is_mean_zero() {
        return Err(Error::domain(format!(
            "input has mean {:.3e}; Riesz operators need mean-zero data",
            u.mean().norm()
        )));
    }
    Ok(())
}

fn check_riesz_order(u: &GridFunction, s: f64) -> Result<()> {
    let n = u.grid().dim() as f64;
    if !(s > 0.0 && s < n) {
        return Err(Error::domain(format!("Riesz order {s} outside (0, {n})")));
    }
    Ok(())
}

/// `(2π|k|)^{-s}` off the origin, zero at `k = 0`.
fn riesz_symbol(k: Wavenumber, s: f64) -> f64 {
    let k2 = wavenumber_norm_sq(k);
    if k2 == 0.0 {
        0.0
    } else {
        (2.0 * PI * k2.sqrt()).powf(-s)
    }
}

/// Riesz potential `I_s u`, `s ∈ (0, n)`, for mean-zero `u`.
pub fn riesz_potential(u: &GridFunction, s: f64) -> Result<GridFunction> {
    riesz_potential_with(u, s, MeanPolicy::Require)
}

pub fn riesz_potential_with(u: &GridFunction, s: f64, policy: MeanPolicy) -> Result<GridFunction> {
    check_riesz_order(u, s)?;
    check_mean(u, policy)?;
    Ok(u.apply_multiplier(|k| Complex64::new(riesz_symbol(k, s), 0.0)))
}

/// Riesz transform components, symbol `-i k_j/|k|`.
pub fn riesz_transform(u: &GridFunction) -> Result<Vec<GridFunction>> {
    check_mean(u, MeanPolicy::Require)?;
    Ok((0..u.grid().dim())
        .map(|j| {
            u.apply_multiplier(|k| {
                let k2 = wavenumber_norm_sq(k);
                if k2 == 0.0 {
                    Complex64::new(0.0, 0.0)
                } else {
                    Complex64::new(0.0, -(k[j] as f64) / k2.sqrt())
                }
            })
        })
        .collect())
}

/// `ℛ·v = Σ_j ℛ_j v_j`.
pub fn riesz_divergence(field: &[GridFunction]) -> Result<GridFunction> {
    let first = field.first().ok_or(Error::Shape {
        expected: 1,
        got: 0,
    })?;
    let grid = *first.grid();
    if field.len() != grid.dim() {
        return Err(Error::Shape {
            expected: grid.dim(),
            got: field.len(),
        });
    }
    let mut spectrum = vec![Complex64::new(0.0, 0.0); grid.len()];
    for (j, comp) in field.iter().enumerate() {
        if *comp.grid() != grid {
            return Err(Error::config("field components live on different grids"));
        }
        for (i, (acc, &c)) in spectrum.iter_mut().zip(comp.spectrum()).enumerate() {
            let k = grid.wavenumber(i);
            let k2 = wavenumber_norm_sq(k);
            if k2 != 0.0 {
                *acc += c * Complex64::new(0.0, -(k[j] as f64) / k2.sqrt());
            }
        }
    }
    GridFunction::from_spectrum(grid, spectrum)
}

/// Classical spectral gradient, symbol `2πi k_j`.
pub fn gradient(u: &GridFunction) -> Vec<GridFunction> {
    (0..u.grid().dim())
        .map(|j| u.apply_multiplier(|k| Complex64::new(0.0, derivative_factor(k, j))))
        .collect()
}

fn check_fractional_order(s: f64) -> Result<()> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::domain(format!("fractional order {s} outside (0, 1)")));
    }
    Ok(())
}

/// Riesz fractional gradient `D^s u`, symbol `i (k_j/|k|)(2π|k|)^s`.
pub fn fractional_gradient(u: &GridFunction, s: f64) -> Result<Vec<GridFunction>> {
    check_fractional_order(s)?;
    check_mean(u, MeanPolicy::Require)?;
    Ok((0..u.grid().dim())
        .map(|j| {
            u.apply_multiplier(|k| {
                let k2 = wavenumber_norm_sq(k);
                if k2 == 0.0 {
                    Complex64::new(0.0, 0.0)
                } else {
                    let r = k2.sqrt();
                    Complex64::new(0.0, k[j] as f64 / r * (2.0 * PI * r).powf(s))
                }
            })
        })
        .collect())
}

/// Recovers `u` from `D^s u` through `u = I_s(ℛ·D^s u)`.
pub fn fftc_reconstruct(grad: &[GridFunction], s: f64) -> Result<GridFunction> {
    check_fractional_order(s)?;
    let div = riesz_divergence(grad)?;
    riesz_potential_with(&div, s, MeanPolicy::Project)
}

/// `‖Λ_{it}u‖_p / ((1+4π²t²)^{n/2}‖u‖_p)`.
pub fn mihlin_ratio(u: &GridFunction, t: f64, p: f64) -> Result<f64> {
    let base = quadrature_lp(u, p)?;
    if base == 0.0 {
        return Err(Error::domain("Mihlin ratio of the zero function"));
    }
    let v = bessel_potential(u, MultiplierOrder::imaginary(t)?);
    let n = u.grid().dim() as f64;
    let weight = (1.0 + 4.0 * PI * PI * t * t).powf(n / 2.0);
    Ok(quadrature_lp(&v, p)? / (weight * base))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;
    use crate::synth::{synthesize, FunctionSpec};

    fn rel_l2(a: &GridFunction, b: &GridFunction) -> f64 {
        a.sub(b).unwrap().l2_spectral() / b.l2_spectral()
    }

    fn mode(k: i64) -> GridFunction {
        let g = make_grid(1, 32).unwrap();
        synthesize(&FunctionSpec::spectrum([(vec![k], Complex64::new(1.0, 0.0))]), &g).unwrap()
    }

    #[test]
    fn order_guard() {
        assert!(MultiplierOrder::real(8.0).is_ok());
        assert!(MultiplierOrder::real(8.5).is_err());
        assert!(MultiplierOrder::new(f64::NAN, 0.0).is_err());
        assert!(MultiplierOrder::new(0.0, f64::INFINITY).is_err());
    }

    #[test]
    fn zero_order_is_identity() {
        let g = make_grid(1, 64).unwrap();
        let u = synthesize(&FunctionSpec::random(16, 2, false), &g).unwrap();
        let v = bessel_potential(&u, MultiplierOrder::real(0.0).unwrap());
        assert!(rel_l2(&v, &u) < 1e-14);
    }

    #[test]
    fn constants_are_fixed() {
        let g = make_grid(2, 8).unwrap();
        let u = GridFunction::constant(g, 2.5);
        for s in [-3.0, 0.5, 4.0] {
            let v = bessel_potential(&u, MultiplierOrder::real(s).unwrap());
            assert!(v.samples().iter().all(|c| (c.re - 2.5).abs() < 1e-14));
        }
    }

    #[test]
    fn riesz_single_mode() {
        let u = mode(1);
        let s = 0.3;
        let v = riesz_potential(&u, s).unwrap();
        let expected = (2.0 * PI).powf(-s);
        assert!((v.coefficient(&[1]) - expected).norm() < 1e-15);
        assert!(riesz_potential(&GridFunction::constant(*u.grid(), 1.0), s).is_err());
        assert!(riesz_potential(&u, 1.0).is_err());
        assert!(riesz_potential_with(&GridFunction::constant(*u.grid(), 1.0), s, MeanPolicy::Project).is_ok());
    }

    #[test]
    fn riesz_transform_of_sine_is_minus_cosine() {
        let g = make_grid(1, 32).unwrap();
        let u = GridFunction::from_fn(g, |x| Complex64::new((2.0 * PI * x[0]).sin(), 0.0));
        let r = riesz_transform(&u).unwrap();
        for (i, c) in r[0].samples().iter().enumerate() {
            let x = i as f64 / 32.0;
            assert!((c.re + (2.0 * PI * x).cos()).abs() < 1e-14);
            assert!(c.im.abs() < 1e-14);
        }
    }

    #[test]
    fn riesz_transform_squares_to_minus_identity() {
        let g = make_grid(2, 16).unwrap();
        let u = synthesize(&FunctionSpec::random(5, 9, true), &g).unwrap();
        let r = riesz_transform(&u).unwrap();
        let rr = riesz_divergence(&r).unwrap();
        assert!(rel_l2(&rr, &u.scale(Complex64::new(-1.0, 0.0))) < 1e-13);
        assert!(riesz_divergence(&r[..1]).is_err());
    }

    #[test]
    fn fractional_gradient_single_mode() {
        let u = mode(1);
        let s = 0.4;
        let d = fractional_gradient(&u, s).unwrap();
        let expected = Complex64::new(0.0, (2.0 * PI).powf(s));
        assert!((d[0].coefficient(&[1]) - expected).norm() < 1e-14);
        assert!(fractional_gradient(&u, 1.0).is_err());
    }

    #[test]
    fn zero_gradient_reconstructs_zero() {
        let g = make_grid(1, 16).unwrap();
        let z = vec![GridFunction::zeros(g)];
        let u = fftc_reconstruct(&z, 0.5).unwrap();
        assert_eq!(u.l2_spectral(), 0.0);
    }

    #[test]
    fn mihlin_identity_order() {
        let g = make_grid(1, 64).unwrap();
        let u = synthesize(&FunctionSpec::random(16, 4, false), &g).unwrap();
        assert!((mihlin_ratio(&u, 0.0, 3.0).unwrap() - 1.0).abs() < 1e-14);
        let t = 1.5f64;
        let r2 = mihlin_ratio(&u, t, 2.0).unwrap();
        assert!((r2 - 1.0 / (1.0 + 4.0 * PI * PI * t * t).sqrt()).abs() < 1e-13);
        assert!(mihlin_ratio(&GridFunction::zeros(g), 1.0, 2.0).is_err());
    }
}
