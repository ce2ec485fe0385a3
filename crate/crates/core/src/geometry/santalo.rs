//! Santaló point solver and the Löwner-ellipsoid Banach–Mazur surrogate.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};

use super::ellipsoid::mvee;
use super::polytope::facet_halfspaces;
use super::{body_measures, polar_body, BodyRep, ConvexBody};

/// Minimize `z ↦ V(K^z)` by damped Newton with finite-difference
/// derivatives, falling back to coordinate-wise golden-section when a
/// Newton step fails to decrease. Returns `(z, V(K)·V(K^z))`.
///
/// Uniqueness of the minimizer (the Santaló point) justifies accepting any
/// stationary point. Polytopes are affinely preconditioned by the vertex
/// covariance before solving and polished in original coordinates.
pub fn santalo_point(body: &ConvexBody, tol: f64) -> Result<(Vec<f64>, f64)> {
    if !(tol > 0.0) {
        return Err(Error::invalid("tolerance must be positive"));
    }
    let vol = body_measures(body)?.volume;
    match body.rep() {
        // symmetry: the center is the Santaló point of an ellipsoid
        BodyRep::Ellipsoid { center, .. } => {
            let product = vol * body_measures(&polar_body(body, center)?)?.volume;
            Ok((center.clone(), product))
        }
        BodyRep::Polytope { vertices } => {
            let n = body.dim();
            let mean: Vec<f64> = {
                let mut m = vec![0.0; n];
                for v in vertices {
                    for k in 0..n {
                        m[k] += v[k] / vertices.len() as f64;
                    }
                }
                m
            };
            let mut cov = DMatrix::zeros(n, n);
            for v in vertices {
                for r in 0..n {
                    for c in 0..n {
                        cov[(r, c)] += (v[r] - mean[r]) * (v[c] - mean[c]) / vertices.len() as f64;
                    }
                }
            }
            let white = linalg::spd_inv_sqrt(&cov).map_err(|_| Error::DegenerateBody)?;
            let white_inv = linalg::spd_sqrt(&cov).map_err(|_| Error::DegenerateBody)?;
            let whitened: Vec<Vec<f64>> = vertices
                .iter()
                .map(|v| {
                    let d = DVector::from_iterator(n, v.iter().zip(&mean).map(|(a, b)| a - b));
                    let w = &white * d;
                    w.iter().copied().collect()
                })
                .collect();
            let wbody = ConvexBody::polytope(whitened)?;
            let z0 = vec![0.0; n];
            let zw = minimize_polar_volume(&wbody, &z0, tol)?;
            // map back and polish in original coordinates
            let zm = &white_inv * DVector::from_column_slice(&zw);
            let z_back: Vec<f64> = (0..n).map(|k| mean[k] + zm[k]).collect();
            let z = minimize_polar_volume(body, &z_back, tol)?;
            let product = vol * polar_volume(body, &z)?;
            Ok((z, product))
        }
        BodyRep::Radial { .. } => {
            let start = body_measures(body)?.centroid;
            let z = minimize_polar_volume(body, &start, tol)?;
            let product = vol * polar_volume(body, &z)?;
            Ok((z, product))
        }
    }
}

/// `V(K^z)`, or `+∞` outside the admissible region (used as an objective).
pub fn polar_volume(body: &ConvexBody, z: &[f64]) -> Result<f64> {
    let polar = polar_body(body, z)?;
    Ok(body_measures(&polar)?.volume)
}

fn objective(body: &ConvexBody, z: &[f64]) -> f64 {
    polar_volume(body, z).unwrap_or(f64::INFINITY)
}

fn fd_gradient(body: &ConvexBody, z: &[f64], h: f64) -> Vec<f64> {
    let n = z.len();
    let mut g = vec![0.0; n];
    let mut zp = z.to_vec();
    for d in 0..n {
        zp[d] = z[d] + h;
        let fp = objective(body, &zp);
        zp[d] = z[d] - h;
        let fm = objective(body, &zp);
        zp[d] = z[d];
        g[d] = (fp - fm) / (2.0 * h);
    }
    g
}

fn fd_hessian(body: &ConvexBody, z: &[f64], h: f64, f0: f64) -> Matrix {
    let n = z.len();
    let mut hess = Matrix::zeros(n, n);
    let mut zp = z.to_vec();
    for d in 0..n {
        zp[d] = z[d] + h;
        let fp = objective(body, &zp);
        zp[d] = z[d] - h;
        let fm = objective(body, &zp);
        zp[d] = z[d];
        hess[(d, d)] = (fp - 2.0 * f0 + fm) / (h * h);
    }
    for a in 0..n {
        for b in a + 1..n {
            let mut eval = |sa: f64, sb: f64| {
                zp[a] = z[a] + sa * h;
                zp[b] = z[b] + sb * h;
                let v = objective(body, &zp);
                zp[a] = z[a];
                zp[b] = z[b];
                v
            };
            let v = (eval(1.0, 1.0) - eval(1.0, -1.0) - eval(-1.0, 1.0) + eval(-1.0, -1.0))
                / (4.0 * h * h);
            hess[(a, b)] = v;
            hess[(b, a)] = v;
        }
    }
    hess
}

fn minimize_polar_volume(body: &ConvexBody, start: &[f64], tol: f64) -> Result<Vec<f64>> {
    let n = body.dim();
    let scale = body.scale();
    let h = 1e-5 * scale;
    let mut z = start.to_vec();
    let mut fz = objective(body, &z);
    if !fz.is_finite() {
        // fall back to the interior point when the seed is outside
        z = body.interior_point().to_vec();
        fz = objective(body, &z);
    }
    let mut best = (z.clone(), fz);
    for _ in 0..80 {
        let g = fd_gradient(body, &z, h);
        let gnorm = linalg::norm(&g);
        if gnorm < tol {
            return Ok(z);
        }
        let hess = fd_hessian(body, &z, h, fz);
        let step = hess
            .clone()
            .lu()
            .solve(&DVector::from_vec(g.iter().map(|v| -v).collect::<Vec<_>>()))
            .filter(|s| s.iter().all(|v| v.is_finite()))
            .map(|s| s.iter().copied().collect::<Vec<f64>>());
        let descent = |dir: &[f64]| -> Option<(Vec<f64>, f64)> {
            let mut t = 1.0;
            for _ in 0..30 {
                let cand: Vec<f64> = z.iter().zip(dir).map(|(a, b)| a + t * b).collect();
                let fc = objective(body, &cand);
                if fc < fz {
                    return Some((cand, fc));
                }
                t *= 0.5;
            }
            None
        };
        let newton_result = match step {
            Some(s) => descent(&s).or_else(|| {
                // in the quadratic regime the objective is flat at float
                // resolution; take the full Newton step anyway when it is
                // tiny, since only the stationarity certificate matters
                let len = linalg::norm(&s);
                if len < 1e-6 * scale {
                    let cand: Vec<f64> = z.iter().zip(&s).map(|(a, b)| a + b).collect();
                    let fc = objective(body, &cand);
                    if fc.is_finite() && fc <= fz * (1.0 + 1e-12) {
                        return Some((cand, fc));
                    }
                }
                None
            }),
            None => None,
        };
        let result = newton_result.or_else(|| {
            let gd: Vec<f64> = g.iter().map(|v| -v * scale / gnorm.max(1e-300)).collect();
            descent(&gd)
        });
        match result {
            Some((cand, fc)) => {
                z = cand;
                fz = fc;
            }
            None => {
                // coordinate-wise golden-section sweep
                let mut improved = false;
                for d in 0..n {
                    let zc = z.clone();
                    let (td, fd) = crate::optim::golden_section(
                        |t| {
                            let mut c = zc.clone();
                            c[d] += t;
                            objective(body, &c)
                        },
                        -0.3 * scale,
                        0.3 * scale,
                        tol * 1e-3,
                    );
                    if fd < fz {
                        z[d] += td;
                        fz = fd;
                        improved = true;
                    }
                }
                if !improved {
                    break;
                }
            }
        }
        if fz < best.1 {
            best = (z.clone(), fz);
        }
    }
    let g = fd_gradient(body, &z, h);
    if linalg::norm(&g) < tol {
        Ok(z)
    } else {
        Err(Error::NoConvergence { best: best.0, value: best.1 })
    }
}

/// Upper bound on the Banach–Mazur distance `δ_BM(K, B^n)`, as `log λ`
/// where `λ` sandwiches `K` (normalized by its Löwner ellipsoid) between
/// the inscribed ball about the Löwner center and the unit ball. This is
/// an upper bound by construction, not the exact distance.
pub fn bm_ball_upper(body: &ConvexBody) -> Result<f64> {
    match body.rep() {
        // any ellipsoid is a linear image of the ball
        BodyRep::Ellipsoid { .. } => Ok(0.0),
        BodyRep::Polytope { vertices } => {
            let (c, a) = mvee(vertices, 1e-12, 200_000)?;
            let sq = linalg::spd_sqrt(&a)?;
            let normalized: Vec<Vec<f64>> = vertices
                .iter()
                .map(|v| {
                    let d = DVector::from_iterator(v.len(), v.iter().zip(&c).map(|(x, y)| x - y));
                    let w = &sq * d;
                    w.iter().copied().collect()
                })
                .collect();
            let facets = facet_halfspaces(&normalized)?;
            let r = facets
                .iter()
                .map(|f| f.offset)
                .fold(f64::INFINITY, f64::min);
            if !(r > 0.0) {
                return Err(Error::DegenerateBody);
            }
            Ok((-r.ln()).max(0.0))
        }
        BodyRep::Radial { grid, .. } => {
            let pts = body.boundary_points(grid)?;
            let (c, a) = mvee(&pts, 1e-12, 200_000)?;
            let sq = linalg::spd_sqrt(&a)?;
            let normalized: Vec<Vec<f64>> = pts
                .iter()
                .map(|v| {
                    let d = DVector::from_iterator(v.len(), v.iter().zip(&c).map(|(x, y)| x - y));
                    let w = &sq * d;
                    w.iter().copied().collect()
                })
                .collect();
            // inradius about the Löwner center from support samples
            let mut r = f64::INFINITY;
            for u in &grid.dirs {
                let h = normalized
                    .iter()
                    .map(|p| linalg::dot(p, u))
                    .fold(f64::NEG_INFINITY, f64::max);
                r = r.min(h);
            }
            if !(r > 0.0) {
                return Err(Error::DegenerateBody);
            }
            Ok((-r.ln()).max(0.0))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn symmetric_bodies_have_santalo_point_at_zero() {
        let square = ConvexBody::polytope(vec![
            vec![1.0, 1.0],
            vec![-1.0, 1.0],
            vec![-1.0, -1.0],
            vec![1.0, -1.0],
        ])
        .unwrap();
        let (z, product) = santalo_point(&square, 1e-9).unwrap();
        assert!(linalg::norm(&z) < 1e-6, "z = {z:?}");
        assert_relative_eq!(product, 8.0, epsilon = 1e-6);
    }

    #[test]
    fn ball_product_is_pi_squared() {
        let b = ConvexBody::ball(2).unwrap();
        let (z, product) = santalo_point(&b, 1e-9).unwrap();
        assert!(linalg::norm(&z) < 1e-12);
        assert_relative_eq!(product, std::f64::consts::PI.powi(2), epsilon = 1e-12);
    }

    #[test]
    fn triangle_santalo_point_is_centroid() {
        let tri = ConvexBody::polytope(vec![
            vec![0.0, 0.0],
            vec![2.0, 0.2],
            vec![0.4, 1.5],
        ])
        .unwrap();
        let centroid = body_measures(&tri).unwrap().centroid;
        let (z, _) = santalo_point(&tri, 1e-8).unwrap();
        for k in 0..2 {
            assert_relative_eq!(z[k], centroid[k], epsilon = 1e-6);
        }
    }

    #[test]
    fn bm_square_is_log_sqrt2() {
        let square = ConvexBody::polytope(vec![
            vec![1.0, 1.0],
            vec![-1.0, 1.0],
            vec![-1.0, -1.0],
            vec![1.0, -1.0],
        ])
        .unwrap();
        let d = bm_ball_upper(&square).unwrap();
        assert_relative_eq!(d, 0.5 * 2.0f64.ln(), epsilon = 1e-6);
    }

    #[test]
    fn bm_ellipsoid_is_zero() {
        let e = ConvexBody::ellipsoid(
            vec![1.0, 2.0],
            Matrix::from_row_slice(2, 2, &[3.0, 0.4, 0.4, 0.7]),
        )
        .unwrap();
        assert_eq!(bm_ball_upper(&e).unwrap(), 0.0);
    }

    #[test]
    fn bm_is_affine_invariant_for_polytopes() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        let body = ConvexBody::polytope(vec![
            vec![1.2, 0.1],
            vec![-0.8, 1.1],
            vec![-1.0, -0.9],
            vec![0.9, -1.2],
            vec![1.4, -0.3],
        ])
        .unwrap();
        let base = bm_ball_upper(&body).unwrap();
        for _ in 0..5 {
            let t = loop {
                let m = Matrix::from_fn(2, 2, |_, _| rng.random_range(-2.0..2.0));
                if m.determinant().abs() > 0.3 {
                    break m;
                }
            };
            let image = body.linear_image(&t).unwrap();
            let d = bm_ball_upper(&image).unwrap();
            assert_relative_eq!(d, base, epsilon = 1e-6);
        }
    }
}
