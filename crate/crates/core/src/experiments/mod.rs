//! Seeded ensemble studies of embeddings, operator identities and scale
//! comparisons, with grid-refinement diagnostics and `report-v1` output.

mod ensemble;
mod report;
mod suites;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use ensemble::{default_ensemble, Member, MemberShape, STRUCTURED_MEMBERS};
pub use report::{
    format_float, to_json_string, Aggregate, Check, ExperimentReport, MemberRatio, RatioFamily, Refinement,
    ReportParameters, SuiteKind, SCHEMA,
};
pub use suites::{run_embedding_suite, run_identity_suite, run_scale_comparison};

use crate::error::{Error, Result};

/// Smallest ensemble accepted by [`estimate_embedding_constant`].
pub const MIN_MEMBERS_FOR_ESTIMATE: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TheoremTag {
    FsetSubcritical,
    FsetCritical,
    FsetSupercritical,
    CriticalI,
    Frset,
    LorentzOptimal,
    BmoEstimate,
    IdentityEmbedding,
    RieszPotential,
    Mihlin,
    FracgradChain,
    Semigroup,
    Lifting,
    Fftc,
    GradientOrderings,
    RieszSemigroup,
    ImaginaryIsometry,
    IdentityOrder,
    Hilbertcase,
    Contiguity,
    Nesting,
    GagliardoVsInterp,
}

impl TheoremTag {
    pub const ALL: [TheoremTag; 22] = [
        TheoremTag::FsetSubcritical,
        TheoremTag::FsetCritical,
        TheoremTag::FsetSupercritical,
        TheoremTag::CriticalI,
        TheoremTag::Frset,
        TheoremTag::LorentzOptimal,
        TheoremTag::BmoEstimate,
        TheoremTag::IdentityEmbedding,
        TheoremTag::RieszPotential,
        TheoremTag::Mihlin,
        TheoremTag::FracgradChain,
        TheoremTag::Semigroup,
        TheoremTag::Lifting,
        TheoremTag::Fftc,
        TheoremTag::GradientOrderings,
        TheoremTag::RieszSemigroup,
        TheoremTag::ImaginaryIsometry,
        TheoremTag::IdentityOrder,
        TheoremTag::Hilbertcase,
        TheoremTag::Contiguity,
        TheoremTag::Nesting,
        TheoremTag::GagliardoVsInterp,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TheoremTag::FsetSubcritical => "FSET-subcritical",
            TheoremTag::FsetCritical => "FSET-critical",
            TheoremTag::FsetSupercritical => "FSET-supercritical",
            TheoremTag::CriticalI => "CriticalI",
            TheoremTag::Frset => "frset",
            TheoremTag::LorentzOptimal => "Lorentz-optimal",
            TheoremTag::BmoEstimate => "BMOestimate",
            TheoremTag::IdentityEmbedding => "identity",
            TheoremTag::RieszPotential => "Riesz-potential",
            TheoremTag::Mihlin => "Mihlin",
            TheoremTag::FracgradChain => "fracgrad-chain",
            TheoremTag::Semigroup => "semigroup",
            TheoremTag::Lifting => "lifting",
            TheoremTag::Fftc => "FFTC",
            TheoremTag::GradientOrderings => "gradient-orderings",
            TheoremTag::RieszSemigroup => "riesz-semigroup",
            TheoremTag::ImaginaryIsometry => "imaginary-isometry",
            TheoremTag::IdentityOrder => "identity-order",
            TheoremTag::Hilbertcase => "Hilbertcase",
            TheoremTag::Contiguity => "contiguity",
            TheoremTag::Nesting => "nesting",
            TheoremTag::GagliardoVsInterp => "gagliardo-vs-interp",
        }
    }

    pub fn kind(self) -> SuiteKind {
        use TheoremTag::*;
        match self {
            FsetSubcritical | FsetCritical | FsetSupercritical | CriticalI | Frset | LorentzOptimal | BmoEstimate
            | IdentityEmbedding | RieszPotential | Mihlin | FracgradChain => SuiteKind::Embedding,
            Semigroup | Lifting | Fftc | GradientOrderings | RieszSemigroup | ImaginaryIsometry | IdentityOrder => {
                SuiteKind::Identity
            }
            Hilbertcase | Contiguity | Nesting | GagliardoVsInterp => SuiteKind::Scale,
        }
    }
}

impl fmt::Display for TheoremTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TheoremTag {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        TheoremTag::ALL
            .into_iter()
            .find(|t| t.as_str() == text.trim())
            .ok_or_else(|| Error::config(format!("unknown theorem tag '{text}'")))
    }
}

impl Serialize for TheoremTag {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for TheoremTag {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// Pass thresholds. Identity suites compare the largest relative error
/// with `identity`; inequality suites compare refinement drift with
/// `drift` (and the Hilbert-case ratio band with `band_drift`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub identity: f64,
    pub drift: f64,
    pub band_drift: f64,
    /// Relative gap requested from the K-functional solver.
    pub solver: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            identity: 1e-10,
            drift: 0.25,
            band_drift: 0.20,
            solver: 1e-4,
        }
    }
}

/// Inputs of every suite. Tag-specific orders default when absent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentParams {
    pub n: usize,
    #[serde(rename = "N")]
    pub grid_points: usize,
    pub s: f64,
    pub p: f64,
    /// Secondary exponent; `"inf"` is accepted for `q = ∞`.
    #[serde(with = "report::float_repr::option")]
    pub q: Option<f64>,
    pub theta: Option<f64>,
    pub t: Option<f64>,
    pub s0: Option<f64>,
    pub s1: Option<f64>,
    pub mu: Option<f64>,
    pub seed: u64,
    /// Whether to repeat the study on the `2N` grid.
    pub refine: bool,
    pub tolerances: Tolerances,
}

impl Default for ExperimentParams {
    fn default() -> Self {
        Self {
            n: 1,
            grid_points: 64,
            s: 0.5,
            p: 2.0,
            q: None,
            theta: None,
            t: None,
            s0: None,
            s1: None,
            mu: None,
            seed: 0,
            refine: true,
            tolerances: Tolerances::default(),
        }
    }
}

impl ExperimentParams {
    pub fn new(n: usize, grid_points: usize, s: f64, p: f64) -> Self {
        Self {
            n,
            grid_points,
            s,
            p,
            ..Self::default()
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// Runs whichever suite owns `tag`.
pub fn run_experiment(tag: TheoremTag, params: &ExperimentParams, ensemble_size: usize) -> Result<ExperimentReport> {
    match tag.kind() {
        SuiteKind::Embedding => run_embedding_suite(tag, params, ensemble_size),
        SuiteKind::Identity => run_identity_suite(tag, params, ensemble_size),
        SuiteKind::Scale => run_scale_comparison(tag, params, ensemble_size),
    }
}

/// Largest per-member ratio of `report`.
///
/// Every member witnesses `C ≥ ratio`, so this is a lower bound on any
/// valid embedding constant and never an upper bound.
pub fn estimate_embedding_constant(report: &ExperimentReport) -> Result<f64> {
    if report.per_member.len() < MIN_MEMBERS_FOR_ESTIMATE {
        return Err(Error::domain(format!(
            "constant estimate needs at least {MIN_MEMBERS_FOR_ESTIMATE} members, report has {}",
            report.per_member.len()
        )));
    }
    Ok(report.per_member.iter().map(|m| m.ratio).fold(f64::NEG_INFINITY, f64::max))
}
