//! Bessel potential and classical Sobolev norms.

use crate::error::{Error, Result};
use crate::grid::{lp_of_magnitudes, pointwise_magnitude, quadrature_lp, GridFunction};
use crate::potentials::{bessel_potential, gradient, MultiplierOrder};

/// `‖Λ_{-s}u‖_p`, any real `s` within the order guard, `p ∈ (1, ∞)`.
pub fn bessel_norm(u: &GridFunction, s: f64, p: f64) -> Result<f64> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::domain(format!("Bessel norm needs p in (1, ∞), got {p}")));
    }
    let lifted = bessel_potential(u, MultiplierOrder::real(-s)?);
    quadrature_lp(&lifted, p)
}

/// `‖∇u‖_p`, the `L^p` norm of the pointwise Euclidean length of the
/// spectral gradient.
pub fn gradient_lp(u: &GridFunction, p: f64) -> Result<f64> {
    let g = gradient(u);
    lp_of_magnitudes(&pointwise_magnitude(&g), p, u.grid().cell_volume())
}

/// `‖u‖_p + ‖∇u‖_p`, `p ∈ [1, ∞]`.
pub fn sobolev_w1p_norm(u: &GridFunction, p: f64) -> Result<f64> {
    Ok(quadrature_lp(u, p)? + gradient_lp(u, p)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;
    use num_complex::Complex64;
    use std::f64::consts::PI;

    #[test]
    fn sine_w12() {
        let g = make_grid(1, 64).unwrap();
        let u = GridFunction::from_fn(g, |x| Complex64::new((2.0 * PI * x[0]).sin(), 0.0));
        let expect = (1.0 + 2.0 * PI) / 2f64.sqrt();
        assert!((sobolev_w1p_norm(&u, 2.0).unwrap() - expect).abs() < 1e-13);
    }

    #[test]
    fn constants_have_no_gradient() {
        let g = make_grid(2, 8).unwrap();
        let u = GridFunction::constant(g, -4.0);
        for p in [1.0, 2.0, f64::INFINITY] {
            assert!((sobolev_w1p_norm(&u, p).unwrap() - 4.0).abs() < 1e-13);
        }
    }

    #[test]
    fn bessel_norm_range() {
        let g = make_grid(1, 8).unwrap();
        let u = GridFunction::constant(g, 1.0);
        assert!(bessel_norm(&u, 0.5, 1.0).is_err());
        assert!(bessel_norm(&u, 0.5, f64::INFINITY).is_err());
        assert!(bessel_norm(&u, 9.0, 2.0).is_err());
        assert!((bessel_norm(&u, -1.0, 3.0).unwrap() - 1.0).abs() < 1e-14);
    }
}
