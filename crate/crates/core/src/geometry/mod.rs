//! Convex bodies and polar duality.
//!
//! A body carries one of three representations — vertex polytope,
//! ellipsoid `{x : ⟨x-c, A(x-c)⟩ ≤ 1}`, or radial samples on a fixed
//! sphere grid — plus an interior point. The polar `K^z` is
//! `{x : ⟨x-z, y-z⟩ ≤ 1 ∀ y ∈ K}`; for polytopes it is computed exactly
//! in halfspace form, for ellipsoids in closed form, and for radial bodies
//! via `1/h` support sampling.

pub mod ellipsoid;
pub mod polytope;
mod santalo;

pub use santalo::{bm_ball_upper, santalo_point};

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, unit_ball_volume, Matrix};
use crate::quad::SphereGrid;

use self::ellipsoid::polar_ellipsoid;
use self::polytope::{facet_halfspaces, vertex_enumeration, volume_centroid, Halfspace};

/// Geometric predicate tolerance (relative to body scale).
pub const GEOM_TOL: f64 = 1e-9;

#[derive(Clone, Debug)]
pub enum BodyRep {
    Polytope { vertices: Vec<Vec<f64>> },
    Ellipsoid { center: Vec<f64>, shape: Matrix },
    Radial { grid: Arc<SphereGrid>, radii: Vec<f64> },
}

#[derive(Clone, Debug)]
pub struct ConvexBody {
    dim: usize,
    rep: BodyRep,
    interior_point: Vec<f64>,
}

/// Volume and centroid of a body.
#[derive(Clone, Debug, Serialize)]
pub struct BodyMeasures {
    pub volume: f64,
    pub centroid: Vec<f64>,
}

impl ConvexBody {
    /// Polytope as the hull of `vertices`; the interior point is the
    /// centroid. Fails when the hull is lower-dimensional.
    pub fn polytope(vertices: Vec<Vec<f64>>) -> Result<Self> {
        let dim = vertices.first().map_or(0, |v| v.len());
        if dim == 0 || dim > 4 || vertices.len() < dim + 1 {
            return Err(Error::DegenerateBody);
        }
        if vertices.iter().any(|v| v.len() != dim || v.iter().any(|x| !x.is_finite())) {
            return Err(Error::invalid("vertices must be finite and of equal dimension"));
        }
        let (_, centroid) = volume_centroid(&vertices)?;
        Ok(ConvexBody { dim, rep: BodyRep::Polytope { vertices }, interior_point: centroid })
    }

    pub fn ellipsoid(center: Vec<f64>, shape: Matrix) -> Result<Self> {
        let dim = center.len();
        if dim == 0 || dim > 4 || shape.nrows() != dim || shape.ncols() != dim {
            return Err(Error::invalid("ellipsoid center/shape dimension mismatch"));
        }
        if !linalg::is_spd(&shape, 0.0) {
            return Err(Error::invalid("ellipsoid shape matrix must be positive definite"));
        }
        Ok(ConvexBody {
            dim,
            interior_point: center.clone(),
            rep: BodyRep::Ellipsoid { center, shape },
        })
    }

    pub fn ball(dim: usize) -> Result<Self> {
        ConvexBody::ellipsoid(vec![0.0; dim], Matrix::identity(dim, dim))
    }

    /// Radial body `{anchor + r·u : 0 ≤ r ≤ radii[u]}` over a sphere grid.
    pub fn radial(grid: Arc<SphereGrid>, radii: Vec<f64>, anchor: Vec<f64>) -> Result<Self> {
        let dim = grid.dim;
        if radii.len() != grid.len() || anchor.len() != dim {
            return Err(Error::invalid("radial body size mismatch"));
        }
        if radii.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return Err(Error::DegenerateRadial);
        }
        Ok(ConvexBody { dim, rep: BodyRep::Radial { grid, radii }, interior_point: anchor })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rep(&self) -> &BodyRep {
        &self.rep
    }

    pub fn interior_point(&self) -> &[f64] {
        &self.interior_point
    }

    /// Characteristic length used to scale tolerances.
    pub fn scale(&self) -> f64 {
        match &self.rep {
            BodyRep::Polytope { vertices } => vertices
                .iter()
                .flat_map(|v| v.iter())
                .fold(1e-12f64, |m, &x| m.max(x.abs())),
            BodyRep::Ellipsoid { center, shape } => {
                let lmin = linalg::sym_eigenvalues(shape)[0];
                center.iter().fold(1.0 / lmin.sqrt(), |m, &x| m.max(x.abs()))
            }
            BodyRep::Radial { radii, .. } => {
                let r = radii.iter().fold(1e-12f64, |m, &r| m.max(r));
                self.interior_point.iter().fold(r, |m, &x| m.max(x.abs()))
            }
        }
    }

    /// Support function `h_K(u) = sup_{x∈K} ⟨x, u⟩` in absolute coordinates.
    /// For radial bodies this is the sample-based surrogate (a slight
    /// underestimate between grid directions).
    pub fn support(&self, u: &[f64]) -> f64 {
        match &self.rep {
            BodyRep::Polytope { vertices } => vertices
                .iter()
                .map(|v| linalg::dot(v, u))
                .fold(f64::NEG_INFINITY, f64::max),
            BodyRep::Ellipsoid { center, shape } => {
                let ainv = shape.clone().try_inverse().expect("SPD shape");
                let uv = nalgebra::DVector::from_column_slice(u);
                linalg::dot(center, u) + (uv.transpose() * ainv * &uv)[(0, 0)].max(0.0).sqrt()
            }
            BodyRep::Radial { grid, radii } => {
                let anchor_part = linalg::dot(&self.interior_point, u);
                let mut best = 0.0f64;
                for (d, r) in grid.dirs.iter().zip(radii) {
                    let s = r * linalg::dot(d, u);
                    if s > best {
                        best = s;
                    }
                }
                anchor_part + best
            }
        }
    }

    /// Boundary samples (used for containment checks and MVEE input).
    pub fn boundary_points(&self, grid: &SphereGrid) -> Result<Vec<Vec<f64>>> {
        match &self.rep {
            BodyRep::Polytope { vertices } => Ok(vertices.clone()),
            BodyRep::Ellipsoid { center, shape } => {
                let m = ellipsoid::boundary_map(shape)?;
                Ok(grid
                    .dirs
                    .iter()
                    .map(|u| {
                        let uv = nalgebra::DVector::from_column_slice(u);
                        let p = &m * uv;
                        (0..self.dim).map(|i| center[i] + p[i]).collect()
                    })
                    .collect())
            }
            BodyRep::Radial { grid: own, radii } => Ok(own
                .dirs
                .iter()
                .zip(radii)
                .map(|(u, r)| {
                    (0..self.dim).map(|i| self.interior_point[i] + r * u[i]).collect()
                })
                .collect()),
        }
    }

    /// Outward facet halfspaces (polytopes only).
    pub fn facets(&self) -> Result<Vec<Halfspace>> {
        match &self.rep {
            BodyRep::Polytope { vertices } => facet_halfspaces(vertices),
            _ => Err(Error::invalid("facets are defined for polytopes only")),
        }
    }

    /// Translate the whole body by `v`.
    pub fn translate(&self, v: &[f64]) -> ConvexBody {
        let shift = |p: &[f64]| -> Vec<f64> { p.iter().zip(v).map(|(a, b)| a + b).collect() };
        let rep = match &self.rep {
            BodyRep::Polytope { vertices } => {
                BodyRep::Polytope { vertices: vertices.iter().map(|p| shift(p)).collect() }
            }
            BodyRep::Ellipsoid { center, shape } => {
                BodyRep::Ellipsoid { center: shift(center), shape: shape.clone() }
            }
            BodyRep::Radial { grid, radii } => {
                BodyRep::Radial { grid: grid.clone(), radii: radii.clone() }
            }
        };
        ConvexBody { dim: self.dim, rep, interior_point: shift(&self.interior_point) }
    }

    /// Image under an invertible linear map (polytopes and ellipsoids).
    pub fn linear_image(&self, t: &Matrix) -> Result<ConvexBody> {
        let tinv = t.clone().try_inverse().ok_or_else(|| Error::invalid("singular map"))?;
        let apply = |p: &[f64]| -> Vec<f64> {
            let v = t * nalgebra::DVector::from_column_slice(p);
            v.iter().copied().collect()
        };
        let rep = match &self.rep {
            BodyRep::Polytope { vertices } => {
                BodyRep::Polytope { vertices: vertices.iter().map(|p| apply(p)).collect() }
            }
            BodyRep::Ellipsoid { center, shape } => BodyRep::Ellipsoid {
                center: apply(center),
                shape: linalg::symmetrize(&(tinv.transpose() * shape * &tinv)),
            },
            BodyRep::Radial { .. } => {
                return Err(Error::invalid("linear images of radial bodies are unsupported"))
            }
        };
        Ok(ConvexBody { dim: self.dim, rep, interior_point: apply(&self.interior_point) })
    }

    /// Dilate about a fixed point: `x ↦ p + λ(x - p)`.
    pub fn scale_about(&self, p: &[f64], lambda: f64) -> Result<ConvexBody> {
        if !(lambda > 0.0) {
            return Err(Error::invalid("scale factor must be positive"));
        }
        let map = |x: &[f64]| -> Vec<f64> {
            x.iter().zip(p).map(|(xi, pi)| pi + lambda * (xi - pi)).collect()
        };
        let rep = match &self.rep {
            BodyRep::Polytope { vertices } => {
                BodyRep::Polytope { vertices: vertices.iter().map(|v| map(v)).collect() }
            }
            BodyRep::Ellipsoid { center, shape } => BodyRep::Ellipsoid {
                center: map(center),
                shape: shape / (lambda * lambda),
            },
            BodyRep::Radial { grid, radii } => {
                // exact only when p is the anchor; enforce that
                let anchored = self
                    .interior_point
                    .iter()
                    .zip(p)
                    .all(|(a, b)| (a - b).abs() < 1e-12);
                if !anchored {
                    return Err(Error::invalid("radial bodies scale about their anchor only"));
                }
                BodyRep::Radial {
                    grid: grid.clone(),
                    radii: radii.iter().map(|r| r * lambda).collect(),
                }
            }
        };
        Ok(ConvexBody { dim: self.dim, rep, interior_point: map(&self.interior_point) })
    }

    /// Depth of `z` inside the body (positive strictly inside), in the
    /// body's length units.
    pub fn interior_depth(&self, z: &[f64]) -> Result<f64> {
        match &self.rep {
            BodyRep::Polytope { vertices } => {
                let facets = facet_halfspaces(vertices)?;
                Ok(facets
                    .iter()
                    .map(|f| -f.signed_distance(z))
                    .fold(f64::INFINITY, f64::min))
            }
            BodyRep::Ellipsoid { center, shape } => {
                let d = nalgebra::DVector::from_iterator(
                    self.dim,
                    z.iter().zip(center).map(|(a, b)| a - b),
                );
                let q = (d.transpose() * shape * &d)[(0, 0)].max(0.0).sqrt();
                // scale by the smallest semi-axis to get a length
                let lmax = linalg::sym_eigenvalues(shape).last().copied().unwrap();
                Ok((1.0 - q) / lmax.sqrt())
            }
            BodyRep::Radial { grid, radii } => {
                // h_{K-z}(u) > 0 for all sampled u
                let mut depth = f64::INFINITY;
                for u in &grid.dirs {
                    let mut h = f64::NEG_INFINITY;
                    for (d, r) in grid.dirs.iter().zip(radii) {
                        let s = linalg::dot(&self.interior_point, u) + r * linalg::dot(d, u)
                            - linalg::dot(z, u);
                        if s > h {
                            h = s;
                        }
                    }
                    depth = depth.min(h);
                }
                Ok(depth)
            }
        }
    }
}

/// Volume and centroid. Polytopes are exact (recursive triangulation),
/// radial bodies use `V = (1/n) Σ w_u ρ(u)^n`, ellipsoids are closed form.
pub fn body_measures(body: &ConvexBody) -> Result<BodyMeasures> {
    match &body.rep {
        BodyRep::Polytope { vertices } => {
            let (volume, centroid) = volume_centroid(vertices)?;
            Ok(BodyMeasures { volume, centroid })
        }
        BodyRep::Ellipsoid { center, shape } => {
            let det = shape.determinant();
            if det <= 0.0 {
                return Err(Error::DegenerateBody);
            }
            Ok(BodyMeasures {
                volume: unit_ball_volume(body.dim) / det.sqrt(),
                centroid: center.clone(),
            })
        }
        BodyRep::Radial { grid, radii } => {
            let n = body.dim as f64;
            let mut vol = 0.0;
            let mut cent = vec![0.0; body.dim];
            for ((u, r), w) in grid.dirs.iter().zip(radii).zip(&grid.weights) {
                vol += w * r.powi(body.dim as i32) / n;
                let m = w * r.powi(body.dim as i32 + 1) / (n + 1.0);
                for k in 0..body.dim {
                    cent[k] += m * u[k];
                }
            }
            if vol <= 0.0 {
                return Err(Error::DegenerateBody);
            }
            for (c, ip) in cent.iter_mut().zip(&body.interior_point) {
                *c = *c / vol + ip;
            }
            Ok(BodyMeasures { volume: vol, centroid: cent })
        }
    }
}

/// Polar body `K^z = {x : ⟨x-z, y-z⟩ ≤ 1 ∀ y ∈ K}`.
pub fn polar_body(body: &ConvexBody, z: &[f64]) -> Result<ConvexBody> {
    if z.len() != body.dim {
        return Err(Error::invalid("center dimension mismatch"));
    }
    let depth = body.interior_depth(z)?;
    if depth <= GEOM_TOL * body.scale() {
        return Err(Error::CenterNotInterior);
    }
    match &body.rep {
        BodyRep::Polytope { vertices } => {
            let normals: Vec<Vec<f64>> =
                vertices.iter().map(|v| linalg::sub(v, z)).collect();
            let verts = vertex_enumeration(&normals)?;
            let shifted: Vec<Vec<f64>> = verts
                .into_iter()
                .map(|u| u.iter().zip(z).map(|(a, b)| a + b).collect())
                .collect();
            Ok(ConvexBody {
                dim: body.dim,
                rep: BodyRep::Polytope { vertices: shifted },
                interior_point: z.to_vec(),
            })
        }
        BodyRep::Ellipsoid { center, shape } => {
            let (pc, pa) = polar_ellipsoid(center, shape, z)?;
            ConvexBody::ellipsoid(pc, pa)
        }
        BodyRep::Radial { grid, radii } => {
            let mut polar_radii = Vec::with_capacity(grid.len());
            for u in &grid.dirs {
                let mut h = f64::NEG_INFINITY;
                for (d, r) in grid.dirs.iter().zip(radii) {
                    let s = linalg::dot(&body.interior_point, u) + r * linalg::dot(d, u)
                        - linalg::dot(z, u);
                    if s > h {
                        h = s;
                    }
                }
                if h <= 0.0 {
                    return Err(Error::CenterNotInterior);
                }
                polar_radii.push(1.0 / h);
            }
            ConvexBody::radial(grid.clone(), polar_radii, z.to_vec())
        }
    }
}

/// `V(K) · V(K^z)`.
pub fn volume_product(body: &ConvexBody, z: &[f64]) -> Result<f64> {
    let polar = polar_body(body, z)?;
    Ok(body_measures(body)?.volume * body_measures(&polar)?.volume)
}

/// Containment `inner ⊆ outer`, checked on support/radial samples with an
/// absolute slack of `tol` per direction. Polytope-inner and
/// polytope/ellipsoid-outer paths are exact up to `tol`.
pub fn contains(outer: &ConvexBody, inner: &ConvexBody, grid: &SphereGrid, tol: f64) -> Result<bool> {
    // membership oracle for the outer body: violation <= tol accepted
    enum Oracle {
        Facets(Vec<Halfspace>),
        Quadric { center: Vec<f64>, shape: Matrix },
        Support,
    }
    let oracle = match &outer.rep {
        BodyRep::Polytope { vertices } => Oracle::Facets(facet_halfspaces(vertices)?),
        BodyRep::Ellipsoid { center, shape } => {
            Oracle::Quadric { center: center.clone(), shape: shape.clone() }
        }
        BodyRep::Radial { .. } => Oracle::Support,
    };
    let is_member = |x: &[f64]| -> bool {
        match &oracle {
            Oracle::Facets(fs) => fs.iter().all(|f| f.signed_distance(x) <= tol),
            Oracle::Quadric { center, shape } => {
                let d = nalgebra::DVector::from_iterator(
                    x.len(),
                    x.iter().zip(center).map(|(a, b)| a - b),
                );
                (d.transpose() * shape * &d)[(0, 0)].max(0.0).sqrt() <= 1.0 + tol
            }
            Oracle::Support => {
                // compare along the ray from the outer anchor
                let a = outer.interior_point();
                let d = linalg::sub(x, a);
                let len = linalg::norm(&d);
                if len < 1e-300 {
                    return true;
                }
                let u: Vec<f64> = d.iter().map(|v| v / len).collect();
                linalg::dot(x, &u) <= outer.support(&u) + tol
            }
        }
    };
    // ellipsoid-inner / polytope-outer admits an exact per-facet test
    if let (BodyRep::Ellipsoid { center, shape }, Oracle::Facets(fs)) = (&inner.rep, &oracle) {
        let ainv = shape.clone().try_inverse().ok_or(Error::DegenerateBody)?;
        for f in fs {
            let nv = nalgebra::DVector::from_column_slice(&f.normal);
            let h = linalg::dot(center, &f.normal)
                + (nv.transpose() * &ainv * &nv)[(0, 0)].max(0.0).sqrt();
            if h > f.offset + tol {
                return Ok(false);
            }
        }
        return Ok(true);
    }
    let samples = inner.boundary_points(grid)?;
    Ok(samples.iter().all(|p| is_member(p)))
}

/// Input of the centered-sandwich implication check.
#[derive(Clone, Debug)]
pub struct SandwichInput {
    pub body: ConvexBody,
    pub ellipsoid: ConvexBody,
    pub w: Vec<f64>,
    pub mu: f64,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct SandwichReport {
    pub hypothesis_ok: bool,
    pub conclusion_ok: bool,
}

/// Checks `E ⊆ K-w ⊆ (1+μ)E` (hypothesis) and
/// `(1-μ√(n+1))E ⊆ K ⊆ (1+2μ√(n+1))E` (conclusion), for a 0-symmetric
/// ellipsoid `E` and a body `K` with centroid at the origin.
pub fn sandwich_check(
    inp: &SandwichInput,
    grid: &SphereGrid,
    tol: f64,
) -> Result<SandwichReport> {
    let n = inp.body.dim();
    let BodyRep::Ellipsoid { center, .. } = &inp.ellipsoid.rep else {
        return Err(Error::invalid("E must be an ellipsoid"));
    };
    if linalg::norm(center) > tol * inp.ellipsoid.scale().max(1.0) {
        return Err(Error::invalid("E must be centered at the origin"));
    }
    if !(inp.mu > 0.0 && inp.mu < 1.0 / (n as f64 + 1.0)) {
        return Err(Error::invalid("mu must lie in (0, 1/(n+1))"));
    }
    // centroid of K at the origin, within 1e-8 · diam(K)
    let meas = body_measures(&inp.body)?;
    let diam = 2.0 * inp.body.scale();
    if linalg::norm(&meas.centroid) > 1e-8 * diam {
        return Err(Error::precondition("centroid of K not at origin"));
    }

    let origin = vec![0.0; n];
    let minus_w: Vec<f64> = inp.w.iter().map(|v| -v).collect();
    let k_shift = inp.body.translate(&minus_w);
    let e_scaled = inp.ellipsoid.scale_about(&origin, 1.0 + inp.mu)?;
    let hypothesis_ok = contains(&k_shift, &inp.ellipsoid, grid, tol)?
        && contains(&e_scaled, &k_shift, grid, tol)?;

    let root = (n as f64 + 1.0).sqrt();
    let lo = 1.0 - inp.mu * root;
    let hi = 1.0 + 2.0 * inp.mu * root;
    let conclusion_ok = if lo <= 0.0 {
        contains(&inp.ellipsoid.scale_about(&origin, hi)?, &inp.body, grid, tol)?
    } else {
        contains(&inp.body, &inp.ellipsoid.scale_about(&origin, lo)?, grid, tol)?
            && contains(&inp.ellipsoid.scale_about(&origin, hi)?, &inp.body, grid, tol)?
    };
    Ok(SandwichReport { hypothesis_ok, conclusion_ok })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn square() -> ConvexBody {
        ConvexBody::polytope(vec![
            vec![1.0, 1.0],
            vec![-1.0, 1.0],
            vec![-1.0, -1.0],
            vec![1.0, -1.0],
        ])
        .unwrap()
    }

    #[test]
    fn ball_is_self_dual() {
        let b = ConvexBody::ball(2).unwrap();
        let p = polar_body(&b, &[0.0, 0.0]).unwrap();
        let m = body_measures(&p).unwrap();
        assert_relative_eq!(m.volume, std::f64::consts::PI, epsilon = 1e-12);
    }

    #[test]
    fn square_polar_is_cross_polytope() {
        let p = polar_body(&square(), &[0.0, 0.0]).unwrap();
        let BodyRep::Polytope { vertices } = p.rep() else { panic!() };
        assert_eq!(vertices.len(), 4);
        for v in vertices {
            // vertices (±1, 0), (0, ±1)
            let n1 = v[0].abs() + v[1].abs();
            assert_relative_eq!(n1, 1.0, epsilon = 1e-12);
            assert!(v[0].abs() < 1e-12 || v[1].abs() < 1e-12);
        }
        let m = body_measures(&p).unwrap();
        assert_relative_eq!(m.volume, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn regular_triangle_polar_is_rotated_double() {
        // circumradius 1, centroid 0 → polar is the triangle with
        // circumradius 2 rotated by π
        let tri: Vec<Vec<f64>> = (0..3)
            .map(|k| {
                let th = 2.0 * std::f64::consts::PI * k as f64 / 3.0;
                vec![th.cos(), th.sin()]
            })
            .collect();
        let body = ConvexBody::polytope(tri.clone()).unwrap();
        let p = polar_body(&body, &[0.0, 0.0]).unwrap();
        let BodyRep::Polytope { vertices } = p.rep() else { panic!() };
        assert_eq!(vertices.len(), 3);
        for v in vertices {
            assert_relative_eq!(crate::linalg::norm(v), 2.0, epsilon = 1e-10);
            // each polar vertex is -2·(some primal vertex)
            let matched = tri.iter().any(|t| {
                (v[0] + 2.0 * t[0]).abs() < 1e-9 && (v[1] + 2.0 * t[1]).abs() < 1e-9
            });
            assert!(matched);
        }
    }

    #[test]
    fn volume_products_match_exact_values() {
        assert_relative_eq!(volume_product(&square(), &[0.0, 0.0]).unwrap(), 8.0, epsilon = 1e-12);
        let tri: Vec<Vec<f64>> = (0..3)
            .map(|k| {
                let th = 2.0 * std::f64::consts::PI * k as f64 / 3.0;
                vec![th.cos(), th.sin()]
            })
            .collect();
        let body = ConvexBody::polytope(tri).unwrap();
        assert_relative_eq!(
            volume_product(&body, &[0.0, 0.0]).unwrap(),
            27.0 / 4.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn polar_errors_when_center_not_interior() {
        assert!(matches!(
            polar_body(&square(), &[1.0, 0.0]),
            Err(Error::CenterNotInterior)
        ));
        assert!(matches!(
            polar_body(&square(), &[3.0, 0.0]),
            Err(Error::CenterNotInterior)
        ));
    }

    #[test]
    fn radial_disk_volume() {
        let grid = Arc::new(SphereGrid::standard(2, 512).unwrap());
        let disk = ConvexBody::radial(grid, vec![1.0; 512], vec![0.0, 0.0]).unwrap();
        let m = body_measures(&disk).unwrap();
        assert_relative_eq!(m.volume, std::f64::consts::PI, epsilon = 1e-4);
        let p = polar_body(&disk, &[0.0, 0.0]).unwrap();
        let mp = body_measures(&p).unwrap();
        assert_relative_eq!(mp.volume, std::f64::consts::PI, epsilon = 2e-2);
    }

    #[test]
    fn containment_basics() {
        let grid = SphereGrid::standard(2, 128).unwrap();
        let b = ConvexBody::ball(2).unwrap();
        let s = square();
        assert!(contains(&s, &b, &grid, 1e-9).unwrap()); // disk inside square
        assert!(!contains(&b, &s, &grid, 1e-9).unwrap()); // square not inside disk
        let big = s.scale_about(&[0.0, 0.0], 2.0).unwrap();
        assert!(contains(&big, &s, &grid, 1e-9).unwrap());
    }

    #[test]
    fn sandwich_identity_case() {
        let grid = SphereGrid::standard(2, 128).unwrap();
        let inp = SandwichInput {
            body: ConvexBody::ball(2).unwrap(),
            ellipsoid: ConvexBody::ball(2).unwrap(),
            w: vec![0.0, 0.0],
            mu: 0.2,
        };
        let r = sandwich_check(&inp, &grid, 1e-9).unwrap();
        assert!(r.hypothesis_ok && r.conclusion_ok);
    }

    #[test]
    fn sandwich_scaled_ball() {
        let grid = SphereGrid::standard(2, 128).unwrap();
        let mu = 0.25;
        let inp = SandwichInput {
            body: ConvexBody::ball(2).unwrap().scale_about(&[0.0, 0.0], 1.0 + mu).unwrap(),
            ellipsoid: ConvexBody::ball(2).unwrap(),
            w: vec![0.0, 0.0],
            mu,
        };
        let r = sandwich_check(&inp, &grid, 1e-9).unwrap();
        assert!(r.hypothesis_ok && r.conclusion_ok);
    }

    #[test]
    fn sandwich_rejects_off_centroid_body() {
        let grid = SphereGrid::standard(2, 128).unwrap();
        let inp = SandwichInput {
            body: square().translate(&[0.5, 0.0]),
            ellipsoid: ConvexBody::ball(2).unwrap(),
            w: vec![0.5, 0.0],
            mu: 0.2,
        };
        assert!(matches!(
            sandwich_check(&inp, &grid, 1e-9),
            Err(Error::PreconditionViolated(_))
        ));
    }
}
