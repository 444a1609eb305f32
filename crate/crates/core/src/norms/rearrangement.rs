//! Decreasing rearrangements of grid data and the Lorentz norms built on them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{lp_of_magnitudes, GridFunction};

/// Step profile `f*` of `|f|` on `[0, total_measure)`: `values[i]` on
/// `[i·cell, (i+1)·cell)`, nonincreasing, zero afterwards.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rearrangement {
    values: Vec<f64>,
    cell: f64,
}

impl Rearrangement {
    /// Rearranges `|samples|`, each sample carrying measure `1/len`.
    pub fn from_samples(samples: &[f64]) -> Self {
        Self::with_cell(samples, 1.0 / samples.len().max(1) as f64)
    }

    pub fn with_cell(samples: &[f64], cell: f64) -> Self {
        let mut values: Vec<f64> = samples.iter().map(|v| v.abs()).collect();
        values.sort_by(|a, b| b.total_cmp(a));
        Self { values, cell }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn cell(&self) -> f64 {
        self.cell
    }

    pub fn total_measure(&self) -> f64 {
        self.values.len() as f64 * self.cell
    }

    /// Right endpoints `t_i = (i+1)·cell` of the steps.
    pub fn breakpoints(&self) -> Vec<f64> {
        (1..=self.values.len()).map(|i| i as f64 * self.cell).collect()
    }

    /// `f*(t)`, right-continuous.
    pub fn value_at(&self, t: f64) -> f64 {
        if t < 0.0 {
            return self.values.first().copied().unwrap_or(0.0);
        }
        let i = (t / self.cell).floor() as usize;
        self.values.get(i).copied().unwrap_or(0.0)
    }

    /// Distribution function `λ(w) = |{|f| > w}|`.
    pub fn distribution(&self, w: f64) -> f64 {
        self.values.iter().take_while(|&&v| v > w).count() as f64 * self.cell
    }

    /// `∫_0^t f*(τ) dτ`, saturating at `‖f‖₁` beyond the total measure.
    pub fn integral_to(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        let full = ((t / self.cell).floor() as usize).min(self.values.len());
        let head: f64 = self.values[..full].iter().sum::<f64>() * self.cell;
        let rest = t - full as f64 * self.cell;
        head + self.values.get(full).map_or(0.0, |&v| v * rest)
    }

    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        lp_of_magnitudes(&self.values, p, self.cell)
    }
}

pub fn decreasing_rearrangement(u: &GridFunction) -> Rearrangement {
    Rearrangement::with_cell(&u.magnitudes(), u.grid().cell_volume())
}

fn check_lorentz(p: f64, q: f64) -> Result<()> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::domain(format!("Lorentz p = {p} must lie in [1, ∞)")));
    }
    if !(q >= 1.0) {
        return Err(Error::domain(format!("Lorentz q = {q} must lie in [1, ∞]")));
    }
    Ok(())
}

/// `(∫_0^∞ (t^{1/p} f*(t))^q dt/t)^{1/q}` in closed form on the step profile;
/// `sup_t t^{1/p} f*(t)` when `q = ∞`.
pub fn lorentz_norm_of(r: &Rearrangement, p: f64, q: f64) -> Result<f64> {
    check_lorentz(p, q)?;
    let max = r.values.first().copied().unwrap_or(0.0);
    if max == 0.0 {
        return Ok(0.0);
    }
    if q.is_infinite() {
        return Ok(r
            .values
            .iter()
            .enumerate()
            .map(|(i, &v)| v * ((i + 1) as f64 * r.cell).powf(1.0 / p))
            .fold(0.0, f64::max));
    }
    let e = q / p;
    let mut prev = 0.0f64;
    let mut sum = 0.0;
    for (i, &v) in r.values.iter().enumerate() {
        let next = ((i + 1) as f64 * r.cell).powf(e);
        sum += (v / max).powf(q) * (next - prev);
        prev = next;
    }
    Ok(max * (sum / e).powf(1.0 / q))
}

pub fn lorentz_norm(u: &GridFunction, p: f64, q: f64) -> Result<f64> {
    lorentz_norm_of(&decreasing_rearrangement(u), p, q)
}
