//! Mean-oscillation seminorms over dyadic cubes: BMO and Morrey–Campanato.
//!
//! Cubes at depth `d` have side `2^{-d}` and are aligned with the grid;
//! depths run from the whole torus down to single cells.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::GridFunction;

/// One dyadic cube, as the flat indices of the cells it contains.
#[derive(Debug, Clone)]
pub struct DyadicCube {
    pub depth: u32,
    pub side: f64,
    pub cells: Vec<usize>,
}

/// Every dyadic cube of the grid, coarsest first.
pub fn dyadic_cubes(u: &GridFunction) -> Vec<DyadicCube> {
    let grid = *u.grid();
    let n = grid.points_per_axis();
    let levels = n.trailing_zeros();
    let mut out = Vec::new();
    for depth in 0..=levels {
        let width = n >> depth;
        let count = 1usize << depth;
        let side = 1.0 / count as f64;
        if grid.dim() == 1 {
            for c in 0..count {
                out.push(DyadicCube {
                    depth,
                    side,
                    cells: (c * width..(c + 1) * width).collect(),
                });
            }
        } else {
            for a in 0..count {
                for b in 0..count {
                    let cells = (a * width..(a + 1) * width)
                        .flat_map(|i| (b * width..(b + 1) * width).map(move |j| grid.flat([i, j])))
                        .collect();
                    out.push(DyadicCube { depth, side, cells });
                }
            }
        }
    }
    out
}

fn cube_mean(samples: &[Complex64], cells: &[usize]) -> Complex64 {
    cells.iter().map(|&i| samples[i]).sum::<Complex64>() / cells.len() as f64
}

/// `max_Q |Q|^{-1} ∫_Q |u - u_Q|` over dyadic cubes.
pub fn bmo_norm(u: &GridFunction) -> f64 {
    let samples = u.samples();
    dyadic_cubes(u)
        .iter()
        .map(|q| {
            let m = cube_mean(samples, &q.cells);
            q.cells.iter().map(|&i| (samples[i] - m).norm()).sum::<f64>() / q.cells.len() as f64
        })
        .fold(0.0, f64::max)
}

/// `max_Q ℓ(Q)^{-λ/p} (∫_Q |u - u_Q|^p)^{1/p}`, `ℓ(Q)` the side length,
/// for `0 ≤ λ ≤ n + p`.
pub fn campanato_seminorm(u: &GridFunction, p: f64, lambda: f64) -> Result<f64> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::domain(format!("Campanato exponent {p} outside [1, ∞)")));
    }
    let n = u.grid().dim() as f64;
    if !(0.0..=n + p).contains(&lambda) {
        return Err(Error::domain(format!(
            "Campanato λ = {lambda} outside [0, n + p] = [0, {}]",
            n + p
        )));
    }
    let samples = u.samples();
    let cell = u.grid().cell_volume();
    Ok(dyadic_cubes(u)
        .iter()
        .map(|q| {
            let m = cube_mean(samples, &q.cells);
            let integral: f64 = q.cells.iter().map(|&i| (samples[i] - m).norm().powf(p)).sum::<f64>() * cell;
            q.side.powf(-lambda / p) * integral.powf(1.0 / p)
        })
        .fold(0.0, f64::max))
}
