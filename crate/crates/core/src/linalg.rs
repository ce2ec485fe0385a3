//! Small dense linear-algebra helpers for dimensions 1–4.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub type Vector = DVector<f64>;
pub type Matrix = DMatrix<f64>;

/// Volume of the unit Euclidean ball in `R^n`, `π^{n/2} / Γ(n/2 + 1)`.
pub fn unit_ball_volume(n: usize) -> f64 {
    use std::f64::consts::PI;
    match n {
        0 => 1.0,
        1 => 2.0,
        2 => PI,
        3 => 4.0 * PI / 3.0,
        4 => PI * PI / 2.0,
        _ => {
            let mut v = if n % 2 == 0 { 1.0 } else { 2.0 };
            let start = if n % 2 == 0 { 2 } else { 3 };
            for k in (start..=n).step_by(2) {
                v *= 2.0 * PI / k as f64;
            }
            v
        }
    }
}

/// Surface area of the unit sphere `S^{n-1}`, i.e. `n·V(B^n)`.
pub fn unit_sphere_area(n: usize) -> f64 {
    n as f64 * unit_ball_volume(n)
}

pub fn symmetrize(m: &Matrix) -> Matrix {
    (m + m.transpose()) * 0.5
}

/// Eigenvalues of a symmetric matrix, ascending.
pub fn sym_eigenvalues(m: &Matrix) -> Vec<f64> {
    let eig = symmetrize(m).symmetric_eigen();
    let mut ev: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ev
}

pub fn is_spd(m: &Matrix, tol: f64) -> bool {
    m.is_square() && sym_eigenvalues(m).first().is_some_and(|&l| l > tol)
}

/// Apply `f` to the spectrum of a symmetric matrix.
pub fn sym_map(m: &Matrix, f: impl Fn(f64) -> f64) -> Result<Matrix> {
    let eig = symmetrize(m).symmetric_eigen();
    let mut d = Matrix::zeros(m.nrows(), m.ncols());
    for (i, &l) in eig.eigenvalues.iter().enumerate() {
        let v = f(l);
        if !v.is_finite() {
            return Err(Error::invalid("matrix function undefined on spectrum"));
        }
        d[(i, i)] = v;
    }
    Ok(&eig.eigenvectors * d * eig.eigenvectors.transpose())
}

pub fn spd_sqrt(m: &Matrix) -> Result<Matrix> {
    sym_map(m, |l| l.sqrt())
}

pub fn spd_inv_sqrt(m: &Matrix) -> Result<Matrix> {
    sym_map(m, |l| 1.0 / l.sqrt())
}

/// Matrix exponential of a symmetric matrix (always SPD).
pub fn sym_exp(m: &Matrix) -> Matrix {
    sym_map(m, f64::exp).expect("exp is total on the real line")
}

/// Matrix logarithm of an SPD matrix.
pub fn spd_log(m: &Matrix) -> Result<Matrix> {
    sym_map(m, f64::ln)
}

/// Pack the upper triangle of a symmetric `n×n` matrix into a flat slice.
pub fn sym_to_params(m: &Matrix) -> Vec<f64> {
    let n = m.nrows();
    let mut out = Vec::with_capacity(n * (n + 1) / 2);
    for i in 0..n {
        for j in i..n {
            out.push(m[(i, j)]);
        }
    }
    out
}

/// Inverse of [`sym_to_params`].
pub fn sym_from_params(n: usize, p: &[f64]) -> Matrix {
    let mut m = Matrix::zeros(n, n);
    let mut k = 0;
    for i in 0..n {
        for j in i..n {
            m[(i, j)] = p[k];
            m[(j, i)] = p[k];
            k += 1;
        }
    }
    m
}

/// Spectral norm of a (small) matrix via the symmetric eigenvalues of `MᵀM`.
pub fn spectral_norm(m: &Matrix) -> f64 {
    let mtm = m.transpose() * m;
    sym_eigenvalues(&mtm).last().copied().unwrap_or(0.0).max(0.0).sqrt()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn ball_volumes() {
        assert_relative_eq!(unit_ball_volume(1), 2.0);
        assert_relative_eq!(unit_ball_volume(2), std::f64::consts::PI);
        assert_relative_eq!(unit_ball_volume(4), std::f64::consts::PI.powi(2) / 2.0);
        // recurrence fallback agrees with the closed forms
        assert_relative_eq!(unit_ball_volume(5), 8.0 * std::f64::consts::PI.powi(2) / 15.0, epsilon = 1e-12);
    }

    #[test]
    fn sqrt_log_exp_round_trip() {
        let a = Matrix::from_row_slice(2, 2, &[4.0, 1.0, 1.0, 3.0]);
        let s = spd_sqrt(&a).unwrap();
        assert_relative_eq!((&s * &s - &a).norm(), 0.0, epsilon = 1e-12);
        let l = spd_log(&a).unwrap();
        assert_relative_eq!((sym_exp(&l) - &a).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn param_round_trip() {
        let a = Matrix::from_row_slice(3, 3, &[2.0, 0.5, 0.1, 0.5, 1.5, -0.2, 0.1, -0.2, 3.0]);
        let p = sym_to_params(&a);
        assert_eq!(p.len(), 6);
        assert_eq!(sym_from_params(3, &p), a);
    }
}
