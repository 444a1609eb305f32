//! The Bessel kernel `G_s` on `ℝ^n`,
//!
//! ```text
//! G_s(x) = 1/((4π)^{s/2} Γ(s/2)) ∫_0^∞ e^{-t/(4π)} e^{-π|x|²/t} t^{(s-n)/2} dt/t,
//! ```
//!
//! evaluated with the substitution `t = e^τ` and a doubling trapezoid rule,
//! plus a radial mass quadrature with explicit tail bounds.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};

const KERNEL_REL_TOL: f64 = 1e-9;
const MASS_REL_TOL: f64 = 1e-9;
const TAU_HI: f64 = 40.0;
const MAX_DOUBLINGS: u32 = 18;

/// Doubling trapezoid rule on `[a, b]`; stops when two successive values
/// agree to `rel_tol`.
pub(crate) fn trapezoid_adaptive(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    rel_tol: f64,
    what: &str,
) -> Result<f64> {
    let mut intervals = 64usize;
    let mut h = (b - a) / intervals as f64;
    let mut sum = 0.5 * (f(a) + f(b)) + (1..intervals).map(|i| f(a + i as f64 * h)).sum::<f64>();
    let mut value = sum * h;
    for doubling in 0..MAX_DOUBLINGS {
        // new midpoints only
        let mids: f64 = (0..intervals).map(|i| f(a + (i as f64 + 0.5) * h)).sum();
        sum += mids;
        intervals *= 2;
        h *= 0.5;
        let next = sum * h;
        let change = (next - value).abs();
        value = next;
        if doubling >= 1 && (change <= rel_tol * value.abs() || value == 0.0) {
            return Ok(value);
        }
    }
    Err(Error::Numerical {
        message: format!("{what}: trapezoid rule did not settle after {intervals} intervals"),
        best: value,
        residual: f64::NAN,
    })
}

fn check_args(s: f64, n: usize) -> Result<()> {
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::domain(format!("kernel order {s} must be positive")));
    }
    if !(1..=2).contains(&n) {
        return Err(Error::domain(format!("kernel dimension {n} unsupported")));
    }
    Ok(())
}

/// `1/((4π)^{s/2} Γ(s/2))`, the factor giving `G_s` unit mass.
pub fn kernel_prefactor(s: f64) -> f64 {
    1.0 / ((4.0 * PI).powf(s / 2.0) * gamma(s / 2.0))
}

/// `∫_0^∞ e^{-a t} e^{-b/t} t^{e} dt/t` by `t = e^τ`.
fn laplace_type_integral(a: f64, b: f64, e: f64, what: &str) -> Result<f64> {
    let lo = if b > 0.0 { (-40.0f64).min(b.ln() - 6.0) } else { -40.0 };
    let f = |tau: f64| {
        let t = tau.exp();
        (-a * t - b / t + e * tau).exp()
    };
    trapezoid_adaptive(f, lo, TAU_HI, KERNEL_REL_TOL, what)
}

/// `G_s(|x|)` in dimension `n ∈ {1, 2}` for `|x| > 0`.
pub fn bessel_kernel(x_abs: f64, s: f64, n: usize) -> Result<f64> {
    check_args(s, n)?;
    if !(x_abs > 0.0) || !x_abs.is_finite() {
        return Err(Error::domain(format!("kernel argument {x_abs} must be positive")));
    }
    let integral = laplace_type_integral(
        1.0 / (4.0 * PI),
        PI * x_abs * x_abs,
        (s - n as f64) / 2.0,
        "Bessel kernel",
    )?;
    Ok(kernel_prefactor(s) * integral)
}

/// Radial quadrature of `∫_{ℝ^n} G_s` split into the computed interior part
/// and rigorous bounds on the two discarded tails.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelMass {
    pub interior: f64,
    pub inner_radius: f64,
    pub outer_radius: f64,
    /// Upper bound on the mass inside `|x| < inner_radius`.
    pub near_tail_bound: f64,
    /// Upper bound on the mass outside `|x| > outer_radius`.
    pub far_tail_bound: f64,
}

impl KernelMass {
    /// The true mass lies in `[lower, upper]` up to quadrature error.
    pub fn bounds(&self) -> (f64, f64) {
        (
            self.interior,
            self.interior + self.near_tail_bound + self.far_tail_bound,
        )
    }
}

fn sphere_area(n: usize) -> f64 {
    if n == 1 {
        2.0
    } else {
        2.0 * PI
    }
}

/// Total mass of `G_s` in dimension `n`.
pub fn kernel_mass(s: f64, n: usize) -> Result<KernelMass> {
    check_args(s, n)?;
    let nf = n as f64;
    if (s - nf).abs() < 1e-12 {
        return Err(Error::domain("kernel mass near-tail bound needs s != n"));
    }
    let pref = kernel_prefactor(s);
    let area = sphere_area(n);
    let outer_radius = 60.0;
    // near the origin G_s(r) <= pref Γ((n-s)/2) (π r²)^{(s-n)/2} when s < n,
    // and G_s(r) <= G_s(0) = pref Γ((s-n)/2) (4π)^{(s-n)/2} when s > n
    let (inner_radius, near_tail_bound) = if s < nf {
        let r0 = 10f64.powf(-8.0 / s).max(1e-200);
        let c = pref * gamma((nf - s) / 2.0) * PI.powf((s - nf) / 2.0);
        (r0, area * c * r0.powf(s) / s)
    } else {
        let r0: f64 = 1e-8;
        let g0 = pref * gamma((s - nf) / 2.0) * (4.0 * PI).powf((s - nf) / 2.0);
        (r0, area * g0 * r0.powf(nf) / nf)
    };
    // far out, t/(4π) + πr²/t >= r, so G_s(r) <= e^{-r/2} pref J(R) for r >= R
    let j = laplace_type_integral(
        1.0 / (8.0 * PI),
        PI * outer_radius * outer_radius / 2.0,
        (s - nf) / 2.0,
        "kernel far-tail bound",
    )?;
    let radial_exp_tail = if n == 1 {
        2.0 * (-outer_radius / 2.0).exp()
    } else {
        (-outer_radius / 2.0).exp() * (2.0 * outer_radius + 4.0)
    };
    let far_tail_bound = area * pref * j * radial_exp_tail;

    let integrand = |u: f64| -> f64 {
        let r = u.exp();
        match bessel_kernel(r, s, n) {
            Ok(g) => g * (nf * u).exp(),
            Err(_) => f64::NAN,
        }
    };
    let interior = area
        * trapezoid_adaptive(
            integrand,
            inner_radius.ln(),
            outer_radius.ln(),
            MASS_REL_TOL,
            "kernel mass",
        )?;
    if !interior.is_finite() {
        return Err(Error::Numerical {
            message: "kernel evaluation failed inside the mass quadrature".into(),
            best: interior,
            residual: f64::NAN,
        });
    }
    Ok(KernelMass {
        interior,
        inner_radius,
        outer_radius,
        near_tail_bound,
        far_tail_bound,
    })
}
