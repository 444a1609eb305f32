//! Gagliardo and Hölder seminorms by exhaustive pair sums over the grid.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{quadrature_lp, GridFunction, PeriodicGrid};

/// All nonzero grid offsets.
fn offsets(grid: &PeriodicGrid) -> Vec<[usize; 2]> {
    let n = grid.points_per_axis();
    if grid.dim() == 1 {
        (1..n).map(|i| [i, 0]).collect()
    } else {
        (0..n)
            .flat_map(|i| (0..n).map(move |j| [i, j]))
            .filter(|&o| o != [0, 0])
            .collect()
    }
}

/// Torus Gagliardo seminorm
/// `(Σ_x Σ_{y≠x} |u(x)-u(y)|^p d(x,y)^{-(n+sp)} h^{2n})^{1/p}` with wrapped
/// distance `d`.
pub fn gagliardo_seminorm(u: &GridFunction, s: f64, p: f64) -> Result<f64> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::domain(format!("Gagliardo order {s} outside (0, 1)")));
    }
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::domain(format!("Gagliardo exponent {p} outside [1, ∞)")));
    }
    let grid = *u.grid();
    let samples = u.samples();
    let scale = 2.0 * samples.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Ok(0.0);
    }
    let n = grid.dim() as f64;
    let exponent = n + s * p;
    let offs = offsets(&grid);
    // per-offset partial sums, reduced in offset order for reproducibility
    let partial: Vec<f64> = offs
        .par_iter()
        .map(|&o| {
            let weight = grid.wrapped_distance(o).powf(-exponent);
            let sum: f64 = (0..grid.len())
                .map(|i| ((samples[grid.shifted(i, o)] - samples[i]).norm() / scale).powf(p))
                .sum();
            weight * sum
        })
        .collect();
    let total: f64 = partial.iter().sum::<f64>() * grid.cell_volume() * grid.cell_volume();
    Ok(scale * total.powf(1.0 / p))
}

/// `‖u‖_p + [u]_{W^{s,p}}`.
pub fn gagliardo_norm(u: &GridFunction, s: f64, p: f64) -> Result<f64> {
    Ok(quadrature_lp(u, p)? + gagliardo_seminorm(u, s, p)?)
}

/// Base-point stride used by the two-dimensional Hölder scan.
pub fn holder_stride(grid: &PeriodicGrid) -> usize {
    if grid.dim() == 1 {
        1
    } else {
        (grid.points_per_axis() / 32).max(1)
    }
}

/// `max |u(x)-u(y)| / d(x,y)^μ` over grid pairs. In one dimension every
/// pair is scanned; in two dimensions the base point `x` runs over a
/// sublattice with [`holder_stride`] and `y` over the full grid.
pub fn holder_seminorm(u: &GridFunction, mu: f64) -> Result<f64> {
    if !(mu > 0.0 && mu <= 1.0) {
        return Err(Error::domain(format!("Hölder exponent {mu} outside (0, 1]")));
    }
    let grid = *u.grid();
    let samples = u.samples();
    let stride = holder_stride(&grid);
    let bases: Vec<usize> = (0..grid.len())
        .filter(|&i| {
            let [a, b] = grid.index(i);
            a % stride == 0 && b % stride == 0
        })
        .collect();
    let offs = offsets(&grid);
    let best = offs
        .par_iter()
        .map(|&o| {
            let d = grid.wrapped_distance(o).powf(mu);
            bases
                .iter()
                .map(|&i| (samples[grid.shifted(i, o)] - samples[i]).norm() / d)
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max);
    Ok(best)
}

/// `‖u‖_∞ + [u]_{C^{0,μ}}`.
pub fn holder_norm(u: &GridFunction, mu: f64) -> Result<f64> {
    Ok(quadrature_lp(u, f64::INFINITY)? + holder_seminorm(u, mu)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;
    use crate::synth::{synthesize, FunctionSpec};

    #[test]
    fn constants_vanish() {
        let g = make_grid(1, 32).unwrap();
        let u = GridFunction::constant(g, 7.0);
        assert_eq!(gagliardo_seminorm(&u, 0.5, 2.0).unwrap(), 0.0);
        assert_eq!(holder_seminorm(&u, 0.5).unwrap(), 0.0);
    }

    #[test]
    fn translation_invariance() {
        for dim in [1, 2] {
            let g = make_grid(dim, 16).unwrap();
            let u = synthesize(&FunctionSpec::random(4, 21, false), &g).unwrap();
            let a = gagliardo_seminorm(&u, 0.4, 3.0).unwrap();
            let b = gagliardo_seminorm(&u.translate([5, 3]), 0.4, 3.0).unwrap();
            assert!((a - b).abs() <= 1e-12 * a);
        }
    }

    #[test]
    fn tent_is_one_lipschitz() {
        let g = make_grid(1, 64).unwrap();
        let tent: Vec<f64> = (0..64).map(|i| {
            let x = i as f64 / 64.0;
            x.min(1.0 - x)
        }).collect();
        let u = GridFunction::from_real(g, &tent).unwrap();
        // brute-force oracle over ordered pairs
        let mut best = 0.0f64;
        for i in 0..64 {
            for j in 0..64 {
                if i != j {
                    let d = ((i as i64 - j as i64).rem_euclid(64)).min((j as i64 - i as i64).rem_euclid(64)) as f64 / 64.0;
                    best = best.max((tent[i] - tent[j]).abs() / d);
                }
            }
        }
        assert!((best - 1.0).abs() < 1e-12);
        assert!((holder_seminorm(&u, 1.0).unwrap() - best).abs() < 1e-14);
    }

    #[test]
    fn holder_nondecreasing_in_mu() {
        let g = make_grid(1, 64).unwrap();
        let u = synthesize(&FunctionSpec::random(10, 5, false), &g).unwrap();
        let mut last = 0.0;
        for mu in [0.1, 0.25, 0.5, 0.75, 1.0] {
            let v = holder_seminorm(&u, mu).unwrap();
            assert!(v >= last);
            last = v;
        }
    }

    #[test]
    fn argument_ranges() {
        let g = make_grid(1, 8).unwrap();
        let u = GridFunction::constant(g, 1.0);
        assert!(gagliardo_seminorm(&u, 1.0, 2.0).is_err());
        assert!(gagliardo_seminorm(&u, 0.5, 0.5).is_err());
        assert!(holder_seminorm(&u, 0.0).is_err());
        assert!(holder_seminorm(&u, 1.2).is_err());
    }
}
