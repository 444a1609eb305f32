//! The `report-v1` record and its byte-stable JSON and CSV forms.
//!
//! Floats are written in scientific notation with 17 significant digits.
//! Non-finite values, which can only occur in parameters such as `q = ∞`,
//! are written as the strings `"inf"`, `"-inf"` and `"nan"`.

use std::io;

use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::error::{Error, Result};

pub const SCHEMA: &str = "report-v1";

/// `d.dddddddddddddddde±x`, or `inf`/`-inf`/`nan`.
pub fn format_float(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:.16e}")
    }
}

/// Serde adapters writing non-finite floats through [`format_float`] as
/// strings. serde_json would otherwise emit `null` and lose the value.
pub mod float_repr {
    use serde::de::{self, Deserializer, Visitor};
    use serde::Serializer;
    use std::fmt;

    use super::format_float;

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_str(&format_float(*v))
        }
    }

    struct FloatVisitor;

    impl Visitor<'_> for FloatVisitor {
        type Value = f64;

        fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
            f.write_str("a number or one of \"inf\", \"-inf\", \"nan\"")
        }

        fn visit_f64<E: de::Error>(self, v: f64) -> Result<f64, E> {
            Ok(v)
        }

        fn visit_i64<E: de::Error>(self, v: i64) -> Result<f64, E> {
            Ok(v as f64)
        }

        fn visit_u64<E: de::Error>(self, v: u64) -> Result<f64, E> {
            Ok(v as f64)
        }

        fn visit_str<E: de::Error>(self, v: &str) -> Result<f64, E> {
            match v {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                _ => Err(E::invalid_value(de::Unexpected::Str(v), &self)),
            }
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        d.deserialize_any(FloatVisitor)
    }

    /// The same representation for `Option<f64>`.
    pub mod option {
        use serde::{Deserialize, Deserializer, Serialize, Serializer};

        #[derive(Serialize, Deserialize)]
        #[serde(transparent)]
        struct Repr(#[serde(with = "super")] f64);

        pub fn serialize<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
            v.map(Repr).serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
            Ok(Option::<Repr>::deserialize(d)?.map(|r| r.0))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportParameters {
    pub n: usize,
    #[serde(rename = "N")]
    pub grid_points: usize,
    pub s: f64,
    pub p: f64,
    #[serde(default, with = "float_repr::option")]
    pub q: Option<f64>,
    #[serde(default, with = "float_repr::option")]
    pub theta: Option<f64>,
    /// Secondary order (`t` in frset, Mihlin and fracgrad-chain, lifting shift).
    #[serde(default, with = "float_repr::option")]
    pub t: Option<f64>,
    #[serde(default, with = "float_repr::option")]
    pub s0: Option<f64>,
    #[serde(default, with = "float_repr::option")]
    pub s1: Option<f64>,
    #[serde(default, with = "float_repr::option")]
    pub mu: Option<f64>,
    pub seed: u64,
    pub seed_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemberRatio {
    pub seed: u64,
    pub label: String,
    pub numerator: f64,
    pub denominator: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub max: f64,
    pub min: f64,
    pub median: f64,
}

impl Aggregate {
    pub fn of(ratios: &[f64]) -> Result<Self> {
        if ratios.is_empty() {
            return Err(Error::domain("aggregate of an empty ratio list"));
        }
        let mut sorted = ratios.to_vec();
        sorted.sort_by(f64::total_cmp);
        let m = sorted.len();
        let median = if m % 2 == 1 {
            sorted[m / 2]
        } else {
            0.5 * (sorted[m / 2 - 1] + sorted[m / 2])
        };
        Ok(Self {
            max: sorted[m - 1],
            min: sorted[0],
            median,
        })
    }

    /// `max / min`, infinite when `min = 0`.
    pub fn band(&self) -> f64 {
        self.max / self.min
    }
}

/// Relative change `|r(2N) − r(N)| / r(N)` of each statistic on the same
/// members.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Refinement {
    #[serde(rename = "N_fine")]
    pub grid_points_fine: usize,
    pub fine: Aggregate,
    pub max_drift: f64,
    pub min_drift: f64,
    pub median_drift: f64,
    pub band_drift: f64,
    /// Largest drift of a single member's ratio (diagnostic only).
    pub member_drift_max: f64,
}

fn rel_change(coarse: f64, fine: f64) -> f64 {
    if coarse == fine {
        0.0
    } else {
        (fine - coarse).abs() / coarse.abs()
    }
}

impl Refinement {
    pub fn compare(grid_points_fine: usize, coarse: &[f64], fine: &[f64]) -> Result<Self> {
        let a = Aggregate::of(coarse)?;
        let b = Aggregate::of(fine)?;
        let member_drift_max = coarse
            .iter()
            .zip(fine)
            .map(|(&c, &f)| rel_change(c, f))
            .fold(0.0, f64::max);
        Ok(Self {
            grid_points_fine,
            fine: b,
            max_drift: rel_change(a.max, b.max),
            min_drift: rel_change(a.min, b.min),
            median_drift: rel_change(a.median, b.median),
            band_drift: rel_change(a.band(), b.band()),
            member_drift_max,
        })
    }

    /// The gated drift: the worst of the max, min and median statistics.
    pub fn statistic_drift(&self) -> f64 {
        self.max_drift.max(self.min_drift).max(self.median_drift)
    }
}

/// A ratio family measured on the same members as the primary one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioFamily {
    pub name: String,
    pub numerator: String,
    pub denominator: String,
    /// Whether the family's drift takes part in the pass decision.
    pub gated: bool,
    pub per_member: Vec<MemberRatio>,
    pub aggregate: Aggregate,
    pub refinement: Option<Refinement>,
}

/// A scalar check with its own tolerance, `value ≤ tolerance` to pass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    #[serde(with = "float_repr")]
    pub value: f64,
    #[serde(with = "float_repr")]
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            value,
            tolerance,
            pass: value <= tolerance,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SuiteKind {
    Embedding,
    Identity,
    Scale,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub schema: String,
    pub experiment_id: String,
    pub theorem_tag: String,
    pub kind: SuiteKind,
    pub parameters: ReportParameters,
    pub numerator: String,
    pub denominator: String,
    pub per_member: Vec<MemberRatio>,
    pub aggregate: Aggregate,
    pub refinement: Option<Refinement>,
    pub companions: Vec<RatioFamily>,
    pub checks: Vec<Check>,
    pub pass: bool,
}

impl ExperimentReport {
    pub fn ratios(&self) -> Vec<f64> {
        self.per_member.iter().map(|m| m.ratio).collect()
    }

    /// Pretty JSON with fixed-width floats and a trailing newline.
    pub fn to_json(&self) -> String {
        to_json_string(self)
    }

    /// `seed,numerator,denominator,ratio` table of the primary family.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("seed,numerator,denominator,ratio\n");
        for m in &self.per_member {
            out.push_str(&format!(
                "{},{},{},{}\n",
                m.seed,
                format_float(m.numerator),
                format_float(m.denominator),
                format_float(m.ratio)
            ));
        }
        out
    }

    /// One-line human summary.
    pub fn summary(&self) -> String {
        let drift = self
            .refinement
            .map(|r| format!(", drift {}", format_float(r.statistic_drift())))
            .unwrap_or_default();
        let failed: Vec<&str> = self.checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
        let failed = if failed.is_empty() {
            String::new()
        } else {
            format!(", failed checks: {}", failed.join(" "))
        };
        format!(
            "{} {}: max {}, min {}, median {}{}{}",
            if self.pass { "PASS" } else { "FAIL" },
            self.experiment_id,
            format_float(self.aggregate.max),
            format_float(self.aggregate.min),
            format_float(self.aggregate.median),
            drift,
            failed
        )
    }
}

/// Serializes any value as pretty JSON using [`format_float`] for floats.
pub fn to_json_string<T: Serialize + ?Sized>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FixedFloats::default());
    value.serialize(&mut ser).expect("in-memory serialization cannot fail");
    buf.push(b'\n');
    String::from_utf8(buf).expect("serde_json emits UTF-8")
}

#[derive(Default)]
struct FixedFloats {
    pretty: PrettyFormatter<'static>,
}

impl Formatter for FixedFloats {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            w.write_all(format_float(value).as_bytes())
        } else {
            write!(w, "\"{}\"", format_float(value))
        }
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.pretty.begin_array(w)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.pretty.end_array(w)
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.pretty.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.pretty.end_array_value(w)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.pretty.begin_object(w)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.pretty.end_object(w)
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.pretty.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.pretty.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.pretty.end_object_value(w)
    }
}
