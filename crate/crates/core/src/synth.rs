//! Test-function generators and their textual form.
//!
//! ```text
//! rand:band=8,seed=7,zero-mean
//! bump:c=0.5,w=0.1
//! ind:[0.2,0.5)
//! spec:{k=0:1;k=1:0.5,-0.25}      inline coefficients (2-D: k=1/-2:...)
//! spec:file=coeffs.json           [{"k":[1],"re":1.0,"im":0.0}, ...]
//! ```
//! Any form may be followed by `,norm=<target L² norm>`.

use std::f64::consts::PI;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{quadrature_lp, GridFunction, PeriodicGrid};

/// One Fourier coefficient, as stored in coefficient files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralEntry {
    pub k: Vec<i64>,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FunctionKind {
    /// Real function with independent Gaussian coefficients on `max_j |k_j| ≤ band`.
    RandomBandlimited { band: usize, seed: u64, zero_mean: bool },
    /// Periodized Gaussian `exp(-d(x,c)²/(2w²))`, same center on every axis.
    GaussianBump { center: f64, width: f64 },
    /// Indicator of `[start, end)` (of `[start, end)^2` in two dimensions).
    Indicator { start: f64, end: f64 },
    ExplicitSpectrum { coefficients: Vec<SpectralEntry> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionSpec {
    pub kind: FunctionKind,
    /// Target `L²` norm applied after synthesis.
    pub normalization: Option<f64>,
}

impl FunctionSpec {
    pub fn new(kind: FunctionKind) -> Self {
        Self {
            kind,
            normalization: None,
        }
    }

    pub fn random(band: usize, seed: u64, zero_mean: bool) -> Self {
        Self::new(FunctionKind::RandomBandlimited {
            band,
            seed,
            zero_mean,
        })
    }

    pub fn spectrum(entries: impl IntoIterator<Item = (Vec<i64>, Complex64)>) -> Self {
        Self::new(FunctionKind::ExplicitSpectrum {
            coefficients: entries
                .into_iter()
                .map(|(k, c)| SpectralEntry {
                    k,
                    re: c.re,
                    im: c.im,
                })
                .collect(),
        })
    }

    pub fn normalized(mut self, target: f64) -> Self {
        self.normalization = Some(target);
        self
    }

    /// Reads `spec:file=...` coefficient lists.
    pub fn from_coefficient_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let coefficients: Vec<SpectralEntry> = serde_json::from_str(&text)
            .map_err(|e| Error::parse(format!("{}: {e}", path.display())))?;
        Ok(Self::new(FunctionKind::ExplicitSpectrum { coefficients }))
    }
}

/// Samples `spec` on `grid`. Deterministic in `(spec, grid)`.
pub fn synthesize(spec: &FunctionSpec, grid: &PeriodicGrid) -> Result<GridFunction> {
    let half = grid.points_per_axis() / 2;
    let u = match &spec.kind {
        FunctionKind::RandomBandlimited {
            band,
            seed,
            zero_mean,
        } => {
            if *band >= half {
                return Err(Error::Aliasing { band: *band, half });
            }
            random_bandlimited(grid, *band, *seed, *zero_mean)
        }
        FunctionKind::GaussianBump { center, width } => {
            if !(*width > 0.0) {
                return Err(Error::config("bump width must be positive"));
            }
            let (c, w) = (*center, *width);
            let dim = grid.dim();
            GridFunction::from_fn(*grid, |x| {
                let d2: f64 = x[..dim]
                    .iter()
                    .map(|&xi| {
                        let d = (xi - c).rem_euclid(1.0);
                        d.min(1.0 - d).powi(2)
                    })
                    .sum();
                Complex64::new((-d2 / (2.0 * w * w)).exp(), 0.0)
            })
        }
        FunctionKind::Indicator { start, end } => {
            if !(0.0..=1.0).contains(start) || !(0.0..=1.0).contains(end) || start >= end {
                return Err(Error::config(format!(
                    "indicator interval [{start}, {end}) must lie in [0,1]"
                )));
            }
            let dim = grid.dim();
            let inside = |v: f64| v >= *start && v < *end;
            GridFunction::from_fn(*grid, |x| {
                let hit = x[..dim].iter().all(|&xi| inside(xi));
                Complex64::new(if hit { 1.0 } else { 0.0 }, 0.0)
            })
        }
        FunctionKind::ExplicitSpectrum { coefficients } => {
            let mut spectrum = vec![Complex64::new(0.0, 0.0); grid.len()];
            for entry in coefficients {
                if entry.k.len() != grid.dim() {
                    return Err(Error::Shape {
                        expected: grid.dim(),
                        got: entry.k.len(),
                    });
                }
                let worst = entry.k.iter().map(|k| k.unsigned_abs()).max().unwrap_or(0);
                if worst as usize >= half {
                    return Err(Error::Aliasing {
                        band: worst as usize,
                        half,
                    });
                }
                let slot = grid.slot(&entry.k).expect("checked band");
                spectrum[slot] += Complex64::new(entry.re, entry.im);
            }
            GridFunction::from_spectrum(*grid, spectrum)?
        }
    };
    match spec.normalization {
        None => Ok(u),
        Some(target) => {
            let current = quadrature_lp(&u, 2.0)?;
            if current == 0.0 {
                return Err(Error::domain("cannot normalize the zero function"));
            }
            Ok(u.scale(Complex64::new(target / current, 0.0)))
        }
    }
}

fn random_bandlimited(grid: &PeriodicGrid, band: usize, seed: u64, zero_mean: bool) -> GridFunction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut spectrum = vec![Complex64::new(0.0, 0.0); grid.len()];
    let b = band as i64;
    let mut draw = || -> f64 { StandardNormal.sample(&mut rng) };
    // DC is always drawn so the remaining stream does not depend on zero_mean.
    let dc = draw();
    if !zero_mean {
        spectrum[0] = Complex64::new(dc, 0.0);
    }
    let second: Vec<i64> = if grid.dim() == 1 { vec![0] } else { (-b..=b).collect() };
    for k1 in 0..=b {
        for &k2 in &second {
            if k1 == 0 && k2 <= 0 {
                continue;
            }
            let c = Complex64::new(draw(), draw()) * std::f64::consts::FRAC_1_SQRT_2;
            let (plus, minus) = if grid.dim() == 1 {
                (vec![k1], vec![-k1])
            } else {
                (vec![k1, k2], vec![-k1, -k2])
            };
            spectrum[grid.slot(&plus).expect("band below N/2")] = c;
            spectrum[grid.slot(&minus).expect("band below N/2")] = c.conj();
        }
    }
    GridFunction::from_spectrum(*grid, spectrum).expect("length matches grid")
}

/// Fourier coefficients of the indicator of `[a, b)` on the circle.
pub fn indicator_coefficient(a: f64, b: f64, k: i64) -> Complex64 {
    if k == 0 {
        return Complex64::new(b - a, 0.0);
    }
    let w = 2.0 * PI * k as f64;
    (Complex64::new(0.0, -w * a).exp() - Complex64::new(0.0, -w * b).exp())
        / Complex64::new(0.0, w)
}

impl fmt::Display for FunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            FunctionKind::RandomBandlimited {
                band,
                seed,
                zero_mean,
            } => {
                write!(f, "rand:band={band},seed={seed}")?;
                if *zero_mean {
                    write!(f, ",zero-mean")?;
                }
            }
            FunctionKind::GaussianBump { center, width } => write!(f, "bump:c={center},w={width}")?,
            FunctionKind::Indicator { start, end } => write!(f, "ind:[{start},{end})")?,
            FunctionKind::ExplicitSpectrum { coefficients } => {
                write!(f, "spec:{{")?;
                for (i, e) in coefficients.iter().enumerate() {
                    if i > 0 {
                        write!(f, ";")?;
                    }
                    let ks: Vec<String> = e.k.iter().map(|k| k.to_string()).collect();
                    write!(f, "k={}:{}", ks.join("/"), e.re)?;
                    if e.im != 0.0 {
                        write!(f, ",{}", e.im)?;
                    }
                }
                write!(f, "}}")?;
            }
        }
        if let Some(n) = self.normalization {
            write!(f, ",norm={n}")?;
        }
        Ok(())
    }
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    v.trim()
        .parse::<f64>()
        .map_err(|_| Error::parse(format!("{key}: '{v}' is not a number")))
}

/// Splits the body and a trailing `norm=` option.
/// Key/value options with the trailing `norm=` target pulled out.
type Options = (Vec<(String, Option<String>)>, Option<f64>);

fn split_options(rest: &str) -> Result<Options> {
    let mut pairs = Vec::new();
    let mut norm = None;
    for item in rest.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        match item.split_once('=') {
            Some(("norm", v)) => norm = Some(parse_f64("norm", v)?),
            Some((k, v)) => pairs.push((k.trim().to_string(), Some(v.trim().to_string()))),
            None => pairs.push((item.to_string(), None)),
        }
    }
    Ok((pairs, norm))
}

fn parse_inline_spectrum(body: &str) -> Result<Vec<SpectralEntry>> {
    let mut out = Vec::new();
    for entry in body.split(';').map(str::trim).filter(|s| !s.is_empty()) {
        let entry = entry
            .strip_prefix("k=")
            .ok_or_else(|| Error::parse(format!("spectral entry '{entry}' must start with k=")))?;
        let (k, value) = entry
            .split_once(':')
            .ok_or_else(|| Error::parse(format!("spectral entry '{entry}' lacks ':value'")))?;
        let k = k
            .split(['/', ' '])
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse::<i64>()
                    .map_err(|_| Error::parse(format!("bad wavenumber '{s}'")))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut parts = value.split(',');
        let re = parse_f64("re", parts.next().unwrap_or(""))?;
        let im = match parts.next() {
            Some(v) => parse_f64("im", v)?,
            None => 0.0,
        };
        if parts.next().is_some() {
            return Err(Error::parse(format!("too many components in '{value}'")));
        }
        out.push(SpectralEntry { k, re, im });
    }
    Ok(out)
}

impl FromStr for FunctionSpec {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let text = text.trim();
        let (tag, rest) = text
            .split_once(':')
            .ok_or_else(|| Error::parse(format!("function spec '{text}' lacks a kind prefix")))?;
        match tag {
            "rand" => {
                let (pairs, norm) = split_options(rest)?;
                let mut band = None;
                let mut seed = None;
                let mut zero_mean = false;
                for (k, v) in pairs {
                    match (k.as_str(), v) {
                        ("band", Some(v)) => {
                            band = Some(v.parse().map_err(|_| Error::parse("band must be an integer"))?)
                        }
                        ("seed", Some(v)) => {
                            seed = Some(v.parse().map_err(|_| Error::parse("seed must be an integer"))?)
                        }
                        ("zero-mean", None) => zero_mean = true,
                        (k, _) => return Err(Error::parse(format!("unknown rand key '{k}'"))),
                    }
                }
                Ok(FunctionSpec {
                    kind: FunctionKind::RandomBandlimited {
                        band: band.ok_or_else(|| Error::parse("rand requires band="))?,
                        seed: seed.unwrap_or(0),
                        zero_mean,
                    },
                    normalization: norm,
                })
            }
            "bump" => {
                let (pairs, norm) = split_options(rest)?;
                let mut center = 0.5;
                let mut width = None;
                for (k, v) in pairs {
                    let v = v.ok_or_else(|| Error::parse(format!("bump key '{k}' needs a value")))?;
                    match k.as_str() {
                        "c" => center = parse_f64("c", &v)?,
                        "w" => width = Some(parse_f64("w", &v)?),
                        _ => return Err(Error::parse(format!("unknown bump key '{k}'"))),
                    }
                }
                Ok(FunctionSpec {
                    kind: FunctionKind::GaussianBump {
                        center,
                        width: width.ok_or_else(|| Error::parse("bump requires w="))?,
                    },
                    normalization: norm,
                })
            }
            "ind" => {
                let body = rest.trim();
                let inner = body
                    .strip_prefix('[')
                    .ok_or_else(|| Error::parse("indicator must look like [a,b)"))?;
                let (interval, tail) = inner
                    .split_once(')')
                    .ok_or_else(|| Error::parse("indicator must look like [a,b)"))?;
                let (a, b) = interval
                    .split_once(',')
                    .ok_or_else(|| Error::parse("indicator must look like [a,b)"))?;
                let (pairs, norm) = split_options(tail)?;
                if let Some((k, _)) = pairs.first() {
                    return Err(Error::parse(format!("unknown indicator key '{k}'")));
                }
                Ok(FunctionSpec {
                    kind: FunctionKind::Indicator {
                        start: parse_f64("a", a)?,
                        end: parse_f64("b", b)?,
                    },
                    normalization: norm,
                })
            }
            "spec" => {
                let body = rest.trim();
                if let Some(inner) = body.strip_prefix('{') {
                    let (list, tail) = inner
                        .split_once('}')
                        .ok_or_else(|| Error::parse("unterminated spectrum list"))?;
                    let (pairs, norm) = split_options(tail)?;
                    if let Some((k, _)) = pairs.first() {
                        return Err(Error::parse(format!("unknown spec key '{k}'")));
                    }
                    Ok(FunctionSpec {
                        kind: FunctionKind::ExplicitSpectrum {
                            coefficients: parse_inline_spectrum(list)?,
                        },
                        normalization: norm,
                    })
                } else {
                    let (pairs, norm) = split_options(body)?;
                    let mut file = None;
                    for (k, v) in pairs {
                        match (k.as_str(), v) {
                            ("file", Some(v)) => file = Some(v),
                            (k, _) => return Err(Error::parse(format!("unknown spec key '{k}'"))),
                        }
                    }
                    let file = file.ok_or_else(|| Error::parse("spec requires file= or {...}"))?;
                    let mut spec = FunctionSpec::from_coefficient_file(Path::new(&file))?;
                    spec.normalization = norm;
                    Ok(spec)
                }
            }
            other => Err(Error::parse(format!("unknown function kind '{other}'"))),
        }
    }
}
