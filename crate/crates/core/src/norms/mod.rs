//! Norm and seminorm evaluators for grid functions.
//!
//! Each function space has a textual tag used by the CLI:
//!
//! | tag                  | value                                  |
//! |----------------------|----------------------------------------|
//! | `Lp:p=2`             | `‖u‖_p`                                |
//! | `W1p:p=2`            | `‖u‖_p + ‖∇u‖_p`                       |
//! | `Hsp:s=0.5,p=2`      | `‖Λ_{-s}u‖_p`                          |
//! | `Wsp:s=0.5,p=2`      | `‖u‖_p + [u]_{W^{s,p}}` (Gagliardo)    |
//! | `Holder:mu=0.25`     | `‖u‖_∞ + [u]_{C^{0,μ}}`                |
//! | `BMO`                | dyadic mean oscillation (seminorm)     |
//! | `Camp:p=2,lam=1`     | Morrey–Campanato seminorm              |
//! | `Lorentz:p=4,q=2`    | `‖u‖_{L^{p,q}}` (`q=inf` allowed)      |
//! | `L1+Linf`            | `‖u‖_{L¹+L∞}`                          |
//! | `Max:p0=2,p1=4`      | `max(‖u‖_{p0}, ‖u‖_{p1})`              |
//! | `lsq:s=1,q=2`        | weighted sequence norm (sequences only)|

mod exponents;
mod fractional;
mod oscillation;
mod rearrangement;
mod sobolev;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use exponents::{conjugates, sequence_norm_lsq, Conjugates, Regime};
pub use fractional::{gagliardo_norm, gagliardo_seminorm, holder_norm, holder_seminorm, holder_stride};
pub use oscillation::{bmo_norm, campanato_seminorm, dyadic_cubes, DyadicCube};
pub use rearrangement::{decreasing_rearrangement, lorentz_norm, lorentz_norm_of, Rearrangement};
pub use sobolev::{bessel_norm, gradient_lp, sobolev_w1p_norm};

use crate::error::{Error, Result};
use crate::grid::{quadrature_lp, GridFunction};
use crate::interpolation::k_exact_l1_linf;

/// `‖u‖_{L¹+L∞}`, which equals `K(1, u; L¹, L∞) = ∫_0^1 u*`.
pub fn sum_norm_l1_linf(u: &GridFunction) -> f64 {
    k_exact_l1_linf(u, 1.0).expect("t = 1 is admissible")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family")]
pub enum SpaceSpec {
    Lp { p: f64 },
    W1p { p: f64 },
    Hsp { s: f64, p: f64 },
    GagliardoWsp { s: f64, p: f64 },
    Holder { mu: f64 },
    Bmo,
    Campanato { p: f64, lambda: f64 },
    Lorentz { p: f64, q: f64 },
    SumL1Linf,
    MaxLp0Lp1 { p0: f64, p1: f64 },
    SequenceLsq { s: f64, q: f64 },
}

impl SpaceSpec {
    /// Parameter ranges that do not depend on the grid.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::domain(m));
        match *self {
            SpaceSpec::Lp { p } | SpaceSpec::W1p { p } if !(p >= 1.0) => bad(format!("p = {p} must be >= 1")),
            SpaceSpec::Hsp { p, .. } if !(p > 1.0 && p.is_finite()) => bad(format!("Hsp needs p in (1, ∞), got {p}")),
            SpaceSpec::GagliardoWsp { s, p } if !(s > 0.0 && s < 1.0 && p >= 1.0 && p.is_finite()) => {
                bad(format!("Wsp needs s in (0,1) and p in [1,∞), got s={s}, p={p}"))
            }
            SpaceSpec::Holder { mu } if !(mu > 0.0 && mu <= 1.0) => bad(format!("Hölder μ = {mu} outside (0, 1]")),
            SpaceSpec::Campanato { p, lambda } if !(p >= 1.0 && p.is_finite() && lambda >= 0.0) => {
                bad(format!("Campanato needs p >= 1 and λ >= 0, got p={p}, λ={lambda}"))
            }
            SpaceSpec::Lorentz { p, q } if !(p >= 1.0 && p.is_finite() && q >= 1.0) => {
                bad(format!("Lorentz needs p in [1,∞), q in [1,∞], got p={p}, q={q}"))
            }
            SpaceSpec::MaxLp0Lp1 { p0, p1 } if !(p0 >= 1.0 && p1 >= 1.0) => bad("Max needs p0, p1 >= 1".into()),
            SpaceSpec::SequenceLsq { q, .. } if !(q >= 1.0) => bad(format!("lsq needs q >= 1, got {q}")),
            _ => Ok(()),
        }
    }

    /// Whether the evaluator is a seminorm that vanishes on constants.
    pub fn is_seminorm(&self) -> bool {
        matches!(self, SpaceSpec::Bmo | SpaceSpec::Campanato { .. })
    }

    pub fn evaluate(&self, u: &GridFunction) -> Result<f64> {
        self.validate()?;
        match *self {
            SpaceSpec::Lp { p } => quadrature_lp(u, p),
            SpaceSpec::W1p { p } => sobolev_w1p_norm(u, p),
            SpaceSpec::Hsp { s, p } => bessel_norm(u, s, p),
            SpaceSpec::GagliardoWsp { s, p } => gagliardo_norm(u, s, p),
            SpaceSpec::Holder { mu } => holder_norm(u, mu),
            SpaceSpec::Bmo => Ok(bmo_norm(u)),
            SpaceSpec::Campanato { p, lambda } => campanato_seminorm(u, p, lambda),
            SpaceSpec::Lorentz { p, q } => lorentz_norm(u, p, q),
            SpaceSpec::SumL1Linf => Ok(sum_norm_l1_linf(u)),
            SpaceSpec::MaxLp0Lp1 { p0, p1 } => Ok(quadrature_lp(u, p0)?.max(quadrature_lp(u, p1)?)),
            SpaceSpec::SequenceLsq { .. } => Err(Error::domain(
                "sequence norms apply to sequences, not grid functions",
            )),
        }
    }
}

fn fmt_exp(v: f64) -> String {
    if v.is_infinite() {
        "inf".into()
    } else {
        v.to_string()
    }
}

impl fmt::Display for SpaceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            SpaceSpec::Lp { p } => write!(f, "Lp:p={}", fmt_exp(p)),
            SpaceSpec::W1p { p } => write!(f, "W1p:p={}", fmt_exp(p)),
            SpaceSpec::Hsp { s, p } => write!(f, "Hsp:s={s},p={}", fmt_exp(p)),
            SpaceSpec::GagliardoWsp { s, p } => write!(f, "Wsp:s={s},p={}", fmt_exp(p)),
            SpaceSpec::Holder { mu } => write!(f, "Holder:mu={mu}"),
            SpaceSpec::Bmo => write!(f, "BMO"),
            SpaceSpec::Campanato { p, lambda } => write!(f, "Camp:p={},lam={lambda}", fmt_exp(p)),
            SpaceSpec::Lorentz { p, q } => write!(f, "Lorentz:p={},q={}", fmt_exp(p), fmt_exp(q)),
            SpaceSpec::SumL1Linf => write!(f, "L1+Linf"),
            SpaceSpec::MaxLp0Lp1 { p0, p1 } => write!(f, "Max:p0={},p1={}", fmt_exp(p0), fmt_exp(p1)),
            SpaceSpec::SequenceLsq { s, q } => write!(f, "lsq:s={s},q={}", fmt_exp(q)),
        }
    }
}

impl FromStr for SpaceSpec {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let text = text.trim();
        let (tag, rest) = text.split_once(':').unwrap_or((text, ""));
        let mut params: Vec<(String, f64)> = Vec::new();
        for item in rest.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| Error::parse(format!("space parameter '{item}' lacks '='")))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| Error::parse(format!("space parameter {k}: '{v}' is not a number")))?;
            params.push((k.trim().to_string(), v));
        }
        let mut take = |key: &str| -> Result<f64> {
            let pos = params
                .iter()
                .position(|(k, _)| k == key)
                .ok_or_else(|| Error::parse(format!("{tag} requires {key}=")))?;
            Ok(params.remove(pos).1)
        };
        let spec = match tag {
            "Lp" => SpaceSpec::Lp { p: take("p")? },
            "W1p" => SpaceSpec::W1p { p: take("p")? },
            "Hsp" => SpaceSpec::Hsp { s: take("s")?, p: take("p")? },
            "Wsp" => SpaceSpec::GagliardoWsp { s: take("s")?, p: take("p")? },
            "Holder" => SpaceSpec::Holder { mu: take("mu")? },
            "BMO" => SpaceSpec::Bmo,
            "Camp" => SpaceSpec::Campanato { p: take("p")?, lambda: take("lam")? },
            "Lorentz" => SpaceSpec::Lorentz { p: take("p")?, q: take("q")? },
            "L1+Linf" => SpaceSpec::SumL1Linf,
            "Max" => SpaceSpec::MaxLp0Lp1 { p0: take("p0")?, p1: take("p1")? },
            "lsq" => SpaceSpec::SequenceLsq { s: take("s")?, q: take("q")? },
            other => return Err(Error::parse(format!("unknown space tag '{other}'"))),
        };
        if let Some((k, _)) = params.first() {
            return Err(Error::parse(format!("unexpected parameter '{k}' for {tag}")));
        }
        spec.validate().map_err(|e| Error::parse(e.to_string()))?;
        Ok(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;

    #[test]
    fn tags_round_trip() {
        for text in [
            "Lp:p=2",
            "Lp:p=inf",
            "W1p:p=3",
            "Hsp:s=0.5,p=2",
            "Wsp:s=0.5,p=2",
            "Holder:mu=0.25",
            "BMO",
            "Camp:p=2,lam=1",
            "Lorentz:p=4,q=2",
            "Lorentz:p=4,q=inf",
            "L1+Linf",
            "Max:p0=2,p1=4",
            "lsq:s=1,q=2",
        ] {
            let spec: SpaceSpec = text.parse().unwrap();
            assert_eq!(spec.to_string(), text);
        }
    }

    #[test]
    fn malformed_tags() {
        for text in ["Lq:p=2", "Hsp:s=0.5", "Hsp:s=0.5,p=1", "Wsp:s=1.5,p=2", "Lp:p=two", "Lp:p=2,q=3", "Holder:mu=0"] {
            assert!(text.parse::<SpaceSpec>().is_err(), "{text}");
        }
    }

    #[test]
    fn sum_norm_of_constant() {
        let g = make_grid(1, 16).unwrap();
        let u = GridFunction::constant(g, -2.5);
        assert!((sum_norm_l1_linf(&u) - 2.5).abs() < 1e-15);
    }

    #[test]
    fn sequence_space_rejects_grid_functions() {
        let g = make_grid(1, 16).unwrap();
        let spec: SpaceSpec = "lsq:s=1,q=2".parse().unwrap();
        assert!(spec.evaluate(&GridFunction::constant(g, 1.0)).is_err());
    }
}
