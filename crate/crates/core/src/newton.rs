//! Newton's method for residuals with a short cell stencil.
//!
//! Unknowns are stored cell-major, `x[j·d + k]`. The Jacobian is built by
//! finite differences with one residual evaluation per (color, variable),
//! where cells of one color are more than `2r` cells apart. Cells are then
//! reordered as `0, N−1, 1, N−2, …` so that a periodic stencil of radius `r`
//! becomes a band of half-width `(2r + 1)d − 1`.

#[allow(unused_imports)]
use crate::prelude::*;
use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::BandedMatrix;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NewtonOptions {
    /// Stop when `‖F(x)‖∞ ≤ tol · scale`.
    pub tol: f64,
    pub max_iter: usize,
    /// Relative finite-difference increment.
    pub fd_step: f64,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self { tol: 1e-10, max_iter: 30, fd_step: 1e-7 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NewtonReport {
    pub iterations: usize,
    /// Final `‖F(x)‖∞ / scale`.
    pub residual: f64,
}

/// Shape of the residual's dependence on the unknowns.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Stencil {
    pub cells: usize,
    pub vars_per_cell: usize,
    /// Residual of cell `j` depends on cells `j − r ..= j + r`.
    pub radius: usize,
    pub periodic: bool,
}

impl Stencil {
    fn distance(&self, a: usize, b: usize) -> usize {
        let d = a.abs_diff(b);
        if self.periodic {
            d.min(self.cells - d)
        } else {
            d
        }
    }

    /// Greedy coloring: cells sharing a color are more than `2r` apart.
    pub fn coloring(&self) -> Vec<usize> {
        let n = self.cells;
        let reach = 2 * self.radius;
        let mut color = vec![usize::MAX; n];
        for j in 0..n {
            let mut used = vec![false; 2 * reach + 2];
            for o in 1..=reach.min(n) {
                for nb in [(j + n - o % n) % n, (j + o) % n] {
                    if self.distance(j, nb) <= reach && color[nb] != usize::MAX && color[nb] < used.len() {
                        used[color[nb]] = true;
                    }
                }
            }
            color[j] = used.iter().position(|u| !u).unwrap_or(used.len());
        }
        color
    }

    /// Position of cell `j` in the interleaved ordering.
    pub fn position(&self, j: usize) -> usize {
        let n = self.cells;
        if 2 * j < n {
            2 * j
        } else {
            2 * (n - 1 - j) + 1
        }
    }

    pub fn half_bandwidth(&self) -> usize {
        (2 * self.radius + 1) * self.vars_per_cell - 1
    }

    fn neighbours(&self, j: usize) -> impl Iterator<Item = usize> + '_ {
        let n = self.cells as isize;
        let r = self.radius as isize;
        (-r..=r).filter_map(move |o| {
            let k = j as isize + o;
            if self.periodic {
                Some(k.rem_euclid(n) as usize)
            } else if (0..n).contains(&k) {
                Some(k as usize)
            } else {
                None
            }
        })
    }
}

fn inf_norm(r: &[f64]) -> f64 {
    r.iter().fold(0.0, |m, x| if x.is_nan() { f64::NAN } else { m.max(x.abs()) })
}

/// Solves `F(x) = 0` starting from `x`. `residual(x, out)` fills `out`.
pub fn solve<F>(x: &mut [f64], stencil: Stencil, scale: f64, opts: &NewtonOptions, mut residual: F) -> Result<NewtonReport>
where
    F: FnMut(&[f64], &mut [f64]) -> Result<()>,
{
    let (n, d) = (stencil.cells, stencil.vars_per_cell);
    let len = n * d;
    if x.len() != len || n == 0 {
        return Err(Error::Domain("unknown vector does not match the stencil"));
    }
    if stencil.periodic && n <= 2 * stencil.radius {
        return Err(Error::Domain("too few cells for the stencil"));
    }
    let scale = if scale > 0.0 { scale } else { 1.0 };
    let colors = stencil.coloring();
    let n_colors = colors.iter().max().map_or(0, |c| c + 1);
    let hb = stencil.half_bandwidth();
    let row = |j: usize, k: usize| stencil.position(j) * d + k;

    let mut r = vec![0.0; len];
    let mut rp = vec![0.0; len];
    let mut trial = vec![0.0; len];
    residual(x, &mut r)?;
    let mut res = inf_norm(&r) / scale;
    for it in 0..=opts.max_iter {
        if res <= opts.tol {
            return Ok(NewtonReport { iterations: it, residual: res });
        }
        if it == opts.max_iter || !res.is_finite() {
            break;
        }
        let mut typical = vec![0.0_f64; d];
        for j in 0..n {
            for k in 0..d {
                typical[k] = typical[k].max(x[j * d + k].abs());
            }
        }
        for t in typical.iter_mut().filter(|t| **t == 0.0) {
            *t = 1.0;
        }
        let mut jac = BandedMatrix::zeros(len, hb, hb);
        for c in 0..n_colors {
            for k in 0..d {
                trial.copy_from_slice(x);
                let mut steps = vec![0.0; n];
                for j in (0..n).filter(|&j| colors[j] == c) {
                    let xi = x[j * d + k];
                    let h = opts.fd_step * xi.abs().max(1e-3 * typical[k]);
                    let h = (xi + h) - xi;
                    steps[j] = h;
                    trial[j * d + k] = xi + h;
                }
                residual(&trial, &mut rp)?;
                for i in (0..n).filter(|&i| colors[i] == c) {
                    for j in stencil.neighbours(i) {
                        for kk in 0..d {
                            let val = (rp[j * d + kk] - r[j * d + kk]) / steps[i];
                            jac.set(row(j, kk), row(i, k), val);
                        }
                    }
                }
            }
        }
        let lu = jac
            .factorize()
            .map_err(|_| Error::NewtonDivergence { iterations: it + 1, residual: res })?;
        let mut delta = vec![0.0; len];
        for j in 0..n {
            for k in 0..d {
                delta[row(j, k)] = -r[j * d + k];
            }
        }
        lu.solve_in_place(&mut delta);

        // Backtracking on the residual norm.
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..8 {
            for j in 0..n {
                for k in 0..d {
                    trial[j * d + k] = x[j * d + k] + t * delta[row(j, k)];
                }
            }
            if residual(&trial, &mut rp).is_ok() {
                let new_res = inf_norm(&rp) / scale;
                if new_res.is_finite() && (new_res < res || t < 1.0 / 64.0) {
                    x.copy_from_slice(&trial);
                    core::mem::swap(&mut r, &mut rp);
                    res = new_res;
                    accepted = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if !accepted {
            return Err(Error::NewtonDivergence { iterations: it + 1, residual: res });
        }
    }
    Err(Error::NewtonDivergence { iterations: opts.max_iter, residual: res })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn coloring_separates_stencils() {
        for (n, r, periodic) in [(10, 1, true), (11, 2, true), (7, 1, false), (40, 2, true), (5, 2, false)] {
            let s = Stencil { cells: n, vars_per_cell: 1, radius: r, periodic };
            let c = s.coloring();
            for a in 0..n {
                for b in 0..n {
                    if a != b && c[a] == c[b] {
                        assert!(s.distance(a, b) > 2 * r, "{n} {r} {a} {b}");
                    }
                }
            }
        }
    }

    #[test]
    fn interleaving_is_a_permutation_with_short_jumps() {
        for n in [5, 6, 17] {
            let s = Stencil { cells: n, vars_per_cell: 1, radius: 1, periodic: true };
            let mut seen = vec![false; n];
            for j in 0..n {
                seen[s.position(j)] = true;
                assert!(s.position(j).abs_diff(s.position((j + 1) % n)) <= 2);
            }
            assert!(seen.iter().all(|x| *x));
        }
    }

    #[test]
    fn solves_periodic_nonlinear_system() {
        // x_j³ + x_j − 0.1(x_{j−1} + x_{j+1}) − b_j = 0, two variables per cell
        let n = 12;
        let b: Vec<f64> = (0..2 * n).map(|i| 1.0 + 0.1 * (i as f64).sin()).collect();
        let f = |x: &[f64], out: &mut [f64]| {
            for j in 0..n {
                for k in 0..2 {
                    let xm = x[((j + n - 1) % n) * 2 + k];
                    let xp = x[((j + 1) % n) * 2 + (1 - k)];
                    let xi = x[j * 2 + k];
                    out[j * 2 + k] = xi * xi * xi + xi - 0.1 * (xm + xp) - b[j * 2 + k];
                }
            }
            Ok(())
        };
        let mut x = vec![0.0; 2 * n];
        let stencil = Stencil { cells: n, vars_per_cell: 2, radius: 1, periodic: true };
        let rep = solve(&mut x, stencil, 1.0, &NewtonOptions { tol: 1e-13, ..Default::default() }, f).unwrap();
        assert!(rep.iterations < 15);
        let mut out = vec![0.0; 2 * n];
        f(&x, &mut out).unwrap();
        for o in out {
            assert!(o.abs() < 1e-12);
        }
        assert_relative_eq!(x[0].powi(3) + x[0], 0.1 * (x[(n - 1) * 2] + x[3]) + b[0], epsilon = 1e-12);
    }

    #[test]
    fn reports_divergence() {
        // x² + 1 = 0 has no real root
        let stencil = Stencil { cells: 3, vars_per_cell: 1, radius: 0, periodic: false };
        let mut x = vec![1.0; 3];
        let opts = NewtonOptions { max_iter: 5, ..Default::default() };
        let r = solve(&mut x, stencil, 1.0, &opts, |x, out| {
            for i in 0..3 {
                out[i] = x[i] * x[i] + 1.0;
            }
            Ok(())
        });
        assert!(matches!(r, Err(Error::NewtonDivergence { .. })));
    }
}
