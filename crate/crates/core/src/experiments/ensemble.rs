//! Seeded test-function ensembles.
//!
//! An ensemble is a list of grid-independent member descriptions, so the
//! same members can be sampled on a grid and on its refinement.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::grid::{GridFunction, PeriodicGrid};
use crate::synth::{synthesize, FunctionKind, FunctionSpec};

/// Number of structured members appended after the random ones.
pub const STRUCTURED_MEMBERS: usize = 5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "kebab-case")]
pub enum MemberShape {
    Function { spec: FunctionSpec },
    /// Indicator of `[start, end)` (a square in 2-D) with its Fourier
    /// coefficients damped by `exp(-|k|²/(2 band²))`.
    SmoothedIndicator { start: f64, end: f64, band: f64 },
    /// `level` plus a Gaussian spike of the given height and width.
    ConstantPlusSpike { level: f64, height: f64, center: f64, width: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Member {
    pub seed: u64,
    pub label: String,
    pub shape: MemberShape,
}

impl Member {
    /// Samples the member on `grid`, dropping the mean when `zero_mean`.
    pub fn sample(&self, grid: &PeriodicGrid, zero_mean: bool) -> Result<GridFunction> {
        let u = match &self.shape {
            MemberShape::Function { spec } => synthesize(spec, grid)?,
            MemberShape::SmoothedIndicator { start, end, band } => {
                let raw = synthesize(
                    &FunctionSpec::new(FunctionKind::Indicator {
                        start: *start,
                        end: *end,
                    }),
                    grid,
                )?;
                let b2 = band * band;
                raw.apply_multiplier(|k| {
                    let k2: f64 = k.iter().map(|&v| (v * v) as f64).sum();
                    Complex64::new((-k2 / (2.0 * b2)).exp(), 0.0)
                })
            }
            MemberShape::ConstantPlusSpike {
                level,
                height,
                center,
                width,
            } => {
                let spike = synthesize(
                    &FunctionSpec::new(FunctionKind::GaussianBump {
                        center: *center,
                        width: *width,
                    }),
                    grid,
                )?;
                spike.map_samples(|z| Complex64::new(level + height * z.re, 0.0))
            }
        };
        Ok(if zero_mean { u.without_mean() } else { u })
    }
}

fn single_mode(dim: usize, k: [i64; 2]) -> FunctionSpec {
    let key = |sign: i64| k[..dim].iter().map(|&v| sign * v).collect::<Vec<_>>();
    FunctionSpec::spectrum([
        (key(1), Complex64::new(0.5, 0.0)),
        (key(-1), Complex64::new(0.5, 0.0)),
    ])
}

/// `random_count` band-limited members with seeds `seed, seed+1, ...`
/// followed by the five structured members.
///
/// Sizes are taken from `grid`, the coarsest grid of a study: the random
/// band is `N/4` and the spike width is one and a half cells.
pub fn default_ensemble(grid: &PeriodicGrid, random_count: usize, seed: u64) -> Vec<Member> {
    let n = grid.points_per_axis();
    let dim = grid.dim();
    let band = (n / 4).max(1);
    let mut members: Vec<Member> = (0..random_count)
        .map(|i| {
            let s = seed.wrapping_add(i as u64);
            Member {
                seed: s,
                label: format!("rand:band={band},seed={s}"),
                shape: MemberShape::Function {
                    spec: FunctionSpec::random(band, s, false),
                },
            }
        })
        .collect();

    let half = (n / 2) as i64;
    let low = (n / 16).max(1) as i64;
    let (k_a, k_b) = ((low + 2).min(half - 2), (low + 3).min(half - 1));
    let beat = {
        let mut a = single_mode(dim, [k_a, if dim == 2 { 1 } else { 0 }]);
        let b = single_mode(dim, [k_b, 0]);
        if let (FunctionKind::ExplicitSpectrum { coefficients: ca }, FunctionKind::ExplicitSpectrum { coefficients: cb }) =
            (&mut a.kind, b.kind)
        {
            ca.extend(cb);
        }
        a
    };
    let structured = [
        (
            "bump",
            MemberShape::Function {
                spec: FunctionSpec::new(FunctionKind::GaussianBump {
                    center: 0.5,
                    width: 0.08,
                }),
            },
        ),
        (
            "indicator-smoothed",
            MemberShape::SmoothedIndicator {
                start: 0.25,
                end: 0.75,
                band: band as f64 / 2.0,
            },
        ),
        (
            "single-mode",
            MemberShape::Function {
                spec: single_mode(dim, [low, if dim == 2 { 1 } else { 0 }]),
            },
        ),
        ("two-mode-beat", MemberShape::Function { spec: beat }),
        (
            "constant-plus-spike",
            MemberShape::ConstantPlusSpike {
                level: 1.0,
                height: 4.0,
                center: 0.3,
                width: 1.5 / n as f64,
            },
        ),
    ];
    for (j, (label, shape)) in structured.into_iter().enumerate() {
        members.push(Member {
            seed: seed.wrapping_add((random_count + j) as u64),
            label: label.to_string(),
            shape,
        });
    }
    members
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;

    #[test]
    fn members_are_real_and_nonconstant() {
        for (dim, n) in [(1, 64), (2, 32)] {
            let g = make_grid(dim, n).unwrap();
            let ens = default_ensemble(&g, 4, 11);
            assert_eq!(ens.len(), 4 + STRUCTURED_MEMBERS);
            for m in &ens {
                for grid in [g, g.refined()] {
                    let u = m.sample(&grid, false).unwrap();
                    assert!(u.samples().iter().all(|z| z.im.abs() < 1e-12), "{}", m.label);
                    let v = u.without_mean();
                    assert!(v.l2_spectral() > 1e-6, "{}", m.label);
                    assert!(m.sample(&grid, true).unwrap().is_mean_zero());
                }
            }
        }
    }

    #[test]
    fn refinement_keeps_band_limited_members() {
        let g = make_grid(1, 32).unwrap();
        let m = &default_ensemble(&g, 1, 3)[0];
        let coarse = m.sample(&g, false).unwrap();
        let fine = m.sample(&g.refined(), false).unwrap();
        let back = fine.resample(g).unwrap();
        assert!(back.sub(&coarse).unwrap().l2_spectral() < 1e-12);
    }
}
