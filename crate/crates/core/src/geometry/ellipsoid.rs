//! Ellipsoid utilities: the Löwner (minimum-volume enclosing) ellipsoid by
//! Khachiyan's barycentric ascent, and the polar of an ellipsoid about an
//! interior point.
//!
//! Convention: an ellipsoid is `{x : ⟨x-c, A(x-c)⟩ ≤ 1}` with `A` SPD and
//! volume `V(B^n)/√det A`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{is_spd, Matrix};

/// Minimum-volume enclosing ellipsoid of a point cloud, as `(center, A)`.
///
/// Khachiyan's update on the lifted points `(p, 1)`; the iteration is
/// affinely equivariant, so images of the same cloud under `GL(n)` follow
/// the same trajectory and the result transforms covariantly.
pub fn mvee(points: &[Vec<f64>], gap_tol: f64, max_iter: usize) -> Result<(Vec<f64>, Matrix)> {
    let n = points.len();
    let d = points.first().map_or(0, |p| p.len());
    if d == 0 || n < d + 1 {
        return Err(Error::DegenerateBody);
    }
    let dl = d + 1;
    let mut q = DMatrix::zeros(dl, n);
    for (j, p) in points.iter().enumerate() {
        for i in 0..d {
            q[(i, j)] = p[i];
        }
        q[(d, j)] = 1.0;
    }
    let mut u = DVector::from_element(n, 1.0 / n as f64);
    let dlf = dl as f64;
    for _ in 0..max_iter {
        // X = Q diag(u) Qᵀ
        let qu = {
            let mut m = q.clone();
            for j in 0..n {
                for i in 0..dl {
                    m[(i, j)] *= u[j];
                }
            }
            m
        };
        let x = &qu * q.transpose();
        let Some(xinv) = x.try_inverse() else {
            return Err(Error::DegenerateBody);
        };
        // M_j = q_jᵀ X⁻¹ q_j; add-steps chase the max, away-steps the min
        // over the current support (Todd–Yıldırım), for linear convergence
        let mut plus_j = 0;
        let mut plus_m = f64::NEG_INFINITY;
        let mut minus_j = usize::MAX;
        let mut minus_m = f64::INFINITY;
        for j in 0..n {
            let col = q.column(j);
            let m = (col.transpose() * &xinv * col)[(0, 0)];
            if m > plus_m {
                plus_m = m;
                plus_j = j;
            }
            if u[j] > 0.0 && m < minus_m {
                minus_m = m;
                minus_j = j;
            }
        }
        let add_gap = plus_m - dlf;
        let away_gap = dlf - minus_m;
        if add_gap <= dlf * gap_tol && away_gap <= dlf * gap_tol {
            break;
        }
        if add_gap >= away_gap {
            let step = add_gap / (dlf * (plus_m - 1.0));
            if !(step > 0.0) || step < 1e-17 {
                break;
            }
            u *= 1.0 - step;
            u[plus_j] += step;
        } else {
            let uj = u[minus_j];
            let clamp = uj / (1.0 - uj).max(1e-300);
            let unconstrained = if minus_m > 1.0 + 1e-12 {
                away_gap / (dlf * (minus_m - 1.0))
            } else {
                f64::INFINITY
            };
            if unconstrained >= clamp {
                // drop step: remove the support point entirely and go on
                u *= 1.0 + clamp;
                u[minus_j] = 0.0;
            } else {
                if !(unconstrained > 0.0) {
                    break;
                }
                u *= 1.0 + unconstrained;
                u[minus_j] -= unconstrained;
            }
        }
        let total: f64 = u.iter().sum();
        u /= total;
    }
    let mut center = vec![0.0; d];
    for (j, p) in points.iter().enumerate() {
        for i in 0..d {
            center[i] += u[j] * p[i];
        }
    }
    // Σ = Σ u_j p_j p_jᵀ - c cᵀ; A = (d·Σ)⁻¹
    let mut sigma = DMatrix::zeros(d, d);
    for (j, p) in points.iter().enumerate() {
        for r in 0..d {
            for c in 0..d {
                sigma[(r, c)] += u[j] * p[r] * p[c];
            }
        }
    }
    for r in 0..d {
        for c in 0..d {
            sigma[(r, c)] -= center[r] * center[c];
        }
    }
    let a = (sigma * d as f64)
        .try_inverse()
        .ok_or(Error::DegenerateBody)?;
    let mut a = crate::linalg::symmetrize(&a);
    if !is_spd(&a, 0.0) {
        return Err(Error::DegenerateBody);
    }
    // inflate by the worst Mahalanobis radius so the result provably
    // encloses the cloud; the factor is affinely invariant
    let mut worst = 0.0f64;
    for p in points {
        let vd = DVector::from_iterator(d, p.iter().zip(&center).map(|(x, y)| x - y));
        let r = (vd.transpose() * &a * &vd)[(0, 0)];
        if r > worst {
            worst = r;
        }
    }
    if worst > 1.0 {
        a /= worst;
    }
    Ok((center, a))
}

/// Polar of the ellipsoid `(c, A)` about an interior point `z`.
///
/// With `c' = c - z` and `S = A⁻¹ - c'c'ᵀ` (SPD exactly when `z` is
/// interior), the polar is the ellipsoid with center `z - S⁻¹c'` and shape
/// `S / (1 + c'ᵀ S⁻¹ c')`.
pub fn polar_ellipsoid(center: &[f64], shape: &Matrix, z: &[f64]) -> Result<(Vec<f64>, Matrix)> {
    let d = center.len();
    let cp = DVector::from_iterator(d, center.iter().zip(z).map(|(c, zi)| c - zi));
    // interior check: ⟨c', A c'⟩ < 1
    let depth = (cp.transpose() * shape * &cp)[(0, 0)];
    if depth >= 1.0 - 1e-12 {
        return Err(Error::CenterNotInterior);
    }
    let ainv = shape.clone().try_inverse().ok_or(Error::DegenerateBody)?;
    let s = crate::linalg::symmetrize(&(&ainv - &cp * cp.transpose()));
    let sinv = s.clone().try_inverse().ok_or(Error::DegenerateBody)?;
    let y0 = -(&sinv * &cp);
    let k = 1.0 + (cp.transpose() * &sinv * &cp)[(0, 0)];
    let polar_shape = crate::linalg::symmetrize(&(s / k));
    let polar_center: Vec<f64> = (0..d).map(|i| z[i] + y0[i]).collect();
    Ok((polar_center, polar_shape))
}

/// Boundary point of `(c, A)` in sphere direction `u`: `c + A^{-1/2} u`.
pub fn boundary_map(shape: &Matrix) -> Result<Matrix> {
    crate::linalg::spd_inv_sqrt(shape)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn mvee_of_square_is_circumdisk() {
        let pts = vec![vec![1.0, 1.0], vec![-1.0, 1.0], vec![-1.0, -1.0], vec![1.0, -1.0]];
        let (c, a) = mvee(&pts, 1e-9, 10_000).unwrap();
        assert!(crate::linalg::norm(&c) < 1e-9);
        // disk of radius √2 means A = I/2
        assert_relative_eq!(a[(0, 0)], 0.5, epsilon = 1e-8);
        assert_relative_eq!(a[(1, 1)], 0.5, epsilon = 1e-8);
        assert_relative_eq!(a[(0, 1)], 0.0, epsilon = 1e-8);
    }

    #[test]
    fn mvee_covers_points() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for dim in 2..=4usize {
            let pts: Vec<Vec<f64>> = (0..20)
                .map(|_| (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect())
                .collect();
            let (c, a) = mvee(&pts, 1e-8, 50_000).unwrap();
            for p in &pts {
                let d = crate::linalg::sub(p, &c);
                let dv = nalgebra::DVector::from_vec(d);
                let v = (dv.transpose() * &a * &dv)[(0, 0)];
                assert!(v <= 1.0 + 1e-6, "point escapes: {v}");
            }
        }
    }

    #[test]
    fn polar_of_centered_ellipsoid_is_inverse_shape() {
        let a = Matrix::from_row_slice(2, 2, &[4.0, 0.0, 0.0, 0.25]);
        let (c, p) = polar_ellipsoid(&[0.0, 0.0], &a, &[0.0, 0.0]).unwrap();
        assert!(crate::linalg::norm(&c) < 1e-12);
        let ainv = a.try_inverse().unwrap();
        assert_relative_eq!((p - ainv).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn polar_involution_off_center() {
        let a = Matrix::from_row_slice(2, 2, &[2.0, 0.3, 0.3, 1.0]);
        let center = [0.4, -0.2];
        let z = [0.1, 0.1];
        let (c1, a1) = polar_ellipsoid(&center, &a, &z).unwrap();
        let (c2, a2) = polar_ellipsoid(&c1, &a1, &z).unwrap();
        assert_relative_eq!(c2[0], center[0], epsilon = 1e-10);
        assert_relative_eq!(c2[1], center[1], epsilon = 1e-10);
        assert_relative_eq!((a2 - &a).norm(), 0.0, epsilon = 1e-9);
    }

    #[test]
    fn polar_rejects_exterior_z() {
        let a = Matrix::identity(2, 2);
        assert!(matches!(
            polar_ellipsoid(&[0.0, 0.0], &a, &[2.0, 0.0]),
            Err(Error::CenterNotInterior)
        ));
    }
}
