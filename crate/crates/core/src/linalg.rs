//! Small dense linear algebra: 3-vectors, 3×3 matrices, 2×2 complex matrices
//! and a banded LU factorization with partial pivoting.

#[allow(unused_imports)]
use crate::prelude::*;
use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

use crate::{Error, Result};

pub type Vec3 = [f64; 3];
pub type Mat3 = [[f64; 3]; 3];
pub type Mat2 = [[f64; 2]; 2];
pub type CMat2 = [[Complex64; 2]; 2];

pub const ZERO3: Mat3 = [[0.0; 3]; 3];
pub const IDENTITY3: Mat3 = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];

#[inline]
pub fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn add(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

#[inline]
pub fn sub(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub fn scale(s: f64, a: &Vec3) -> Vec3 {
    [s * a[0], s * a[1], s * a[2]]
}

/// `a + s·b`
#[inline]
pub fn axpy(a: &Vec3, s: f64, b: &Vec3) -> Vec3 {
    [a[0] + s * b[0], a[1] + s * b[1], a[2] + s * b[2]]
}

#[inline]
pub fn norm(a: &Vec3) -> f64 {
    dot(a, a).sqrt()
}

pub fn mat_vec(m: &Mat3, v: &Vec3) -> Vec3 {
    [dot(&m[0], v), dot(&m[1], v), dot(&m[2], v)]
}

pub fn mat_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut c = ZERO3;
    for i in 0..3 {
        for j in 0..3 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j] + a[i][2] * b[2][j];
        }
    }
    c
}

pub fn transpose(a: &Mat3) -> Mat3 {
    let mut t = ZERO3;
    for i in 0..3 {
        for j in 0..3 {
            t[i][j] = a[j][i];
        }
    }
    t
}

pub fn mat_add(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut c = *a;
    for i in 0..3 {
        for j in 0..3 {
            c[i][j] += b[i][j];
        }
    }
    c
}

pub fn mat_sub(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut c = *a;
    for i in 0..3 {
        for j in 0..3 {
            c[i][j] -= b[i][j];
        }
    }
    c
}

pub fn mat_scale(s: f64, a: &Mat3) -> Mat3 {
    let mut c = *a;
    for row in c.iter_mut() {
        for x in row.iter_mut() {
            *x *= s;
        }
    }
    c
}

/// `a + s·b`
pub fn mat_axpy(a: &Mat3, s: f64, b: &Mat3) -> Mat3 {
    let mut c = *a;
    for i in 0..3 {
        for j in 0..3 {
            c[i][j] += s * b[i][j];
        }
    }
    c
}

/// `(a + aᵀ)/2`
pub fn symmetrize(a: &Mat3) -> Mat3 {
    let mut s = ZERO3;
    for i in 0..3 {
        for j in 0..3 {
            s[i][j] = 0.5 * (a[i][j] + a[j][i]);
        }
    }
    s
}

/// Frobenius norm of `a − aᵀ`.
pub fn asymmetry(a: &Mat3) -> f64 {
    let mut s = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            let d = a[i][j] - a[j][i];
            s += d * d;
        }
    }
    s.sqrt()
}

/// Eigen-decomposition of a symmetric 3×3 matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues in ascending order and the matching orthonormal
/// eigenvectors as the columns of the second result.
pub fn sym_eigen(a: &Mat3) -> (Vec3, Mat3) {
    let mut m = symmetrize(a);
    let mut v = IDENTITY3;
    let scale_ref = m.iter().flatten().fold(0.0_f64, |acc, x| acc.max(x.abs()));
    if scale_ref == 0.0 {
        return ([0.0; 3], IDENTITY3);
    }
    for _sweep in 0..50 {
        let off = m[0][1].abs() + m[0][2].abs() + m[1][2].abs();
        if off <= 1e-17 * scale_ref {
            break;
        }
        for (p, q) in [(0usize, 1usize), (0, 2), (1, 2)] {
            let apq = m[p][q];
            if apq.abs() <= 1e-300 {
                continue;
            }
            let theta = (m[q][q] - m[p][p]) / (2.0 * apq);
            let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
            let t = if theta == 0.0 { 1.0 } else { t };
            let c = 1.0 / (t * t + 1.0).sqrt();
            let s = t * c;
            for k in 0..3 {
                let mkp = m[k][p];
                let mkq = m[k][q];
                m[k][p] = c * mkp - s * mkq;
                m[k][q] = s * mkp + c * mkq;
            }
            for k in 0..3 {
                let mpk = m[p][k];
                let mqk = m[q][k];
                m[p][k] = c * mpk - s * mqk;
                m[q][k] = s * mpk + c * mqk;
            }
            for row in v.iter_mut() {
                let vkp = row[p];
                let vkq = row[q];
                row[p] = c * vkp - s * vkq;
                row[q] = s * vkp + c * vkq;
            }
        }
    }
    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| m[i][i].partial_cmp(&m[j][j]).unwrap_or(core::cmp::Ordering::Equal));
    let vals = [m[order[0]][order[0]], m[order[1]][order[1]], m[order[2]][order[2]]];
    let mut vecs = ZERO3;
    for (col, &src) in order.iter().enumerate() {
        for row in 0..3 {
            vecs[row][col] = v[row][src];
        }
    }
    (vals, vecs)
}

pub fn sym_eigenvalues(a: &Mat3) -> Vec3 {
    sym_eigen(a).0
}

/// Spectral norm of a symmetric matrix.
pub fn sym_spectral_norm(a: &Mat3) -> f64 {
    let e = sym_eigenvalues(a);
    e[0].abs().max(e[2].abs())
}

/// Spectral norm of a general 3×3 matrix, `√λmax(aᵀa)`.
pub fn spectral_norm(a: &Mat3) -> f64 {
    let ata = mat_mul(&transpose(a), a);
    sym_eigenvalues(&ata)[2].max(0.0).sqrt()
}

/// `f(a)` for symmetric `a`, applying `f` to the eigenvalues.
pub fn sym_function(a: &Mat3, f: impl Fn(f64) -> f64) -> Mat3 {
    let (vals, vecs) = sym_eigen(a);
    let fv = [f(vals[0]), f(vals[1]), f(vals[2])];
    let mut out = ZERO3;
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = (0..3).map(|k| vecs[i][k] * fv[k] * vecs[j][k]).sum();
        }
    }
    out
}

/// `sᵀ a s` for symmetric `s`.
pub fn congruence(s: &Mat3, a: &Mat3) -> Mat3 {
    mat_mul(&mat_mul(&transpose(s), a), s)
}

pub fn mat2_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    [
        [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
        [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
    ]
}

/// Eigenvalues of a real 2×2 matrix, ordered by real part.
pub fn eigenvalues2(a: &Mat2) -> [Complex64; 2] {
    let c = [
        [Complex64::new(a[0][0], 0.0), Complex64::new(a[0][1], 0.0)],
        [Complex64::new(a[1][0], 0.0), Complex64::new(a[1][1], 0.0)],
    ];
    complex_eigenvalues2(&c)
}

/// Eigenvalues of a complex 2×2 matrix from its characteristic polynomial,
/// ordered by real part then imaginary part.
pub fn complex_eigenvalues2(m: &CMat2) -> [Complex64; 2] {
    let half_tr = (m[0][0] + m[1][1]) * 0.5;
    let half_diff = (m[0][0] - m[1][1]) * 0.5;
    // (λ − tr/2)² = ((a−d)/2)² + bc avoids cancellation in tr²/4 − det.
    let disc = (half_diff * half_diff + m[0][1] * m[1][0]).sqrt();
    let (l0, l1) = (half_tr - disc, half_tr + disc);
    if (l0.re, l0.im) <= (l1.re, l1.im) {
        [l0, l1]
    } else {
        [l1, l0]
    }
}

/// Band matrix with `kl` sub-diagonals and `ku` super-diagonals, stored with
/// room for the `kl` extra super-diagonals created by row pivoting.
#[derive(Clone, Debug)]
pub struct BandedMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    data: Vec<f64>,
}

impl BandedMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let width = 2 * kl + ku + 1;
        Self { n, kl, ku, width, data: vec![0.0; n * width] }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn lower_bandwidth(&self) -> usize {
        self.kl
    }

    pub fn upper_bandwidth(&self) -> usize {
        self.ku
    }

    #[inline]
    fn slot(&self, i: usize, j: usize) -> Option<usize> {
        if j + self.kl < i || j > i + self.kl + self.ku || i >= self.n || j >= self.n {
            return None;
        }
        Some(i * self.width + (j + self.kl - i))
    }

    pub fn in_band(&self, i: usize, j: usize) -> bool {
        j + self.kl >= i && j <= i + self.ku && i < self.n && j < self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.slot(i, j).map_or(0.0, |s| self.data[s])
    }

    /// Sets entry `(i, j)`; panics when it lies outside the declared band.
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        assert!(self.in_band(i, j), "entry ({i}, {j}) outside band");
        let s = self.slot(i, j).unwrap();
        self.data[s] = value;
    }

    pub fn add_to(&mut self, i: usize, j: usize, value: f64) {
        assert!(self.in_band(i, j), "entry ({i}, {j}) outside band");
        let s = self.slot(i, j).unwrap();
        self.data[s] += value;
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                let lo = i.saturating_sub(self.kl);
                let hi = (i + self.ku + 1).min(self.n);
                (lo..hi).map(|j| self.get(i, j) * x[j]).sum()
            })
            .collect()
    }

    /// Gaussian elimination with partial pivoting, in place.
    pub fn factorize(mut self) -> Result<BandedLu> {
        let n = self.n;
        let mut pivots = vec![0usize; n];
        let reach = self.kl + self.ku;
        for k in 0..n {
            let last_row = (k + self.kl).min(n - 1);
            let mut p = k;
            let mut best = self.get(k, k).abs();
            for i in k + 1..=last_row {
                let v = self.get(i, k).abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == 0.0 || !best.is_finite() {
                return Err(Error::SingularMatrix);
            }
            pivots[k] = p;
            let last_col = (k + reach).min(n - 1);
            if p != k {
                for j in k..=last_col {
                    let a = self.get(k, j);
                    let b = self.get(p, j);
                    self.put(k, j, b);
                    self.put(p, j, a);
                }
            }
            let pivot = self.get(k, k);
            for i in k + 1..=last_row {
                let l = self.get(i, k) / pivot;
                if l == 0.0 {
                    continue;
                }
                self.put(i, k, l);
                for j in k + 1..=last_col {
                    let ukj = self.get(k, j);
                    if ukj != 0.0 {
                        let s = self.slot(i, j).unwrap();
                        self.data[s] -= l * ukj;
                    }
                }
            }
        }
        Ok(BandedLu { lu: self, pivots })
    }

    #[inline]
    fn put(&mut self, i: usize, j: usize, value: f64) {
        if let Some(s) = self.slot(i, j) {
            self.data[s] = value;
        } else {
            debug_assert!(value == 0.0, "fill outside band storage");
        }
    }
}

/// LU factors of a [`BandedMatrix`].
#[derive(Clone, Debug)]
pub struct BandedLu {
    lu: BandedMatrix,
    pivots: Vec<usize>,
}

impl BandedLu {
    /// Overwrites `b` with the solution of `A x = b`.
    pub fn solve_in_place(&self, b: &mut [f64]) {
        let n = self.lu.n;
        let kl = self.lu.kl;
        let reach = self.lu.kl + self.lu.ku;
        for k in 0..n {
            let p = self.pivots[k];
            if p != k {
                b.swap(k, p);
            }
            let bk = b[k];
            if bk != 0.0 {
                for i in k + 1..=(k + kl).min(n - 1) {
                    b[i] -= self.lu.get(i, k) * bk;
                }
            }
        }
        for k in (0..n).rev() {
            let mut s = b[k];
            for j in k + 1..=(k + reach).min(n - 1) {
                s -= self.lu.get(k, j) * b[j];
            }
            b[k] = s / self.lu.get(k, k);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn jacobi_matches_known_spectrum() {
        let a = [[2.0, -1.0, 0.0], [-1.0, 2.0, -1.0], [0.0, -1.0, 2.0]];
        let (vals, vecs) = sym_eigen(&a);
        let s2 = 2.0_f64.sqrt();
        assert_relative_eq!(vals[0], 2.0 - s2, epsilon = 1e-14);
        assert_relative_eq!(vals[1], 2.0, epsilon = 1e-14);
        assert_relative_eq!(vals[2], 2.0 + s2, epsilon = 1e-14);
        for k in 0..3 {
            let col = [vecs[0][k], vecs[1][k], vecs[2][k]];
            let av = mat_vec(&a, &col);
            for i in 0..3 {
                assert_relative_eq!(av[i], vals[k] * col[i], epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn sym_sqrt_squares_back() {
        let a = [[4.0, 1.0, 0.5], [1.0, 3.0, 0.2], [0.5, 0.2, 2.0]];
        let r = sym_function(&a, f64::sqrt);
        let rr = mat_mul(&r, &r);
        for i in 0..3 {
            for j in 0..3 {
                assert_relative_eq!(rr[i][j], a[i][j], epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn complex_eigenvalues_of_rotation() {
        let e = eigenvalues2(&[[0.0, -1.0], [1.0, 0.0]]);
        assert_relative_eq!(e[0].im, -1.0, epsilon = 1e-15);
        assert_relative_eq!(e[1].im, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn banded_solve_matches_dense_with_pivoting() {
        let n = 12;
        let (kl, ku) = (2, 3);
        let mut m = BandedMatrix::zeros(n, kl, ku);
        let mut dense = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in i.saturating_sub(kl)..(i + ku + 1).min(n) {
                // small diagonal forces row exchanges
                let v = if i == j { 1e-3 } else { ((i * 7 + j * 3) % 5) as f64 - 2.0 + 0.5 };
                m.set(i, j, v);
                dense[i][j] = v;
            }
        }
        let x_true: Vec<f64> = (0..n).map(|i| (i as f64).sin() + 0.3).collect();
        let mut b = m.mul_vec(&x_true);
        let lu = m.factorize().unwrap();
        lu.solve_in_place(&mut b);
        for i in 0..n {
            assert_relative_eq!(b[i], x_true[i], epsilon = 1e-10);
        }
    }
}
