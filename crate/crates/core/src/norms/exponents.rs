//! Sobolev conjugate exponents and weighted sequence norms.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Subcritical,
    Critical,
    Supercritical,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Conjugates {
    pub regime: Regime,
    /// `np/(n - sp)` when subcritical, `+∞` otherwise.
    pub p_star_s: f64,
    /// `s - n/p` when supercritical.
    pub mu_star_s: Option<f64>,
}

/// Classifies `(n, s, p)` by the sign of `n - sp`.
pub fn conjugates(n: usize, s: f64, p: f64) -> Result<Conjugates> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::domain(format!("order s = {s} outside (0, 1)")));
    }
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::domain(format!("exponent p = {p} outside (1, ∞)")));
    }
    let nf = n as f64;
    let gap = nf - s * p;
    let eps = 1e-12 * nf;
    Ok(if gap > eps {
        Conjugates {
            regime: Regime::Subcritical,
            p_star_s: nf * p / gap,
            mu_star_s: None,
        }
    } else if gap < -eps {
        Conjugates {
            regime: Regime::Supercritical,
            p_star_s: f64::INFINITY,
            mu_star_s: Some(s - nf / p),
        }
    } else {
        Conjugates {
            regime: Regime::Critical,
            p_star_s: f64::INFINITY,
            mu_star_s: None,
        }
    })
}

/// `(Σ_m (2^{ms} |x_m|)^q)^{1/q}`, indices from `m = 0`; `sup` when `q = ∞`.
pub fn sequence_norm_lsq(x: &[f64], s: f64, q: f64) -> Result<f64> {
    if !(q >= 1.0) {
        return Err(Error::domain(format!("sequence exponent q = {q} must be >= 1")));
    }
    let terms = x
        .iter()
        .enumerate()
        .map(|(m, v)| (m as f64 * s).exp2() * v.abs());
    if q.is_infinite() {
        return Ok(terms.fold(0.0, f64::max));
    }
    Ok(terms.map(|t| t.powf(q)).sum::<f64>().powf(1.0 / q))
}
