//! V-representation polytope machinery: facet enumeration, vertex
//! enumeration of `{x : a_i·x ≤ 1}`, and exact volume/centroid by
//! recursive pyramid decomposition.
//!
//! Everything here is subset-enumeration over `C(m, d)` index tuples,
//! which is the right trade at desk scale (m ≲ 100, d ≤ 4): no incremental
//! hull bookkeeping, and every facet/vertex comes from one small linear
//! solve.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// `normal · x ≤ offset` with unit normal.
#[derive(Clone, Debug)]
pub struct Halfspace {
    pub normal: Vec<f64>,
    pub offset: f64,
}

impl Halfspace {
    pub fn signed_distance(&self, x: &[f64]) -> f64 {
        crate::linalg::dot(&self.normal, x) - self.offset
    }
}

fn for_each_subset(m: usize, k: usize, mut f: impl FnMut(&[usize])) {
    let mut idx: Vec<usize> = (0..k).collect();
    if k > m {
        return;
    }
    loop {
        f(&idx);
        // advance the combination
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] + (k - i) < m {
                idx[i] += 1;
                for j in i + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Unit normal of the hyperplane spanned by `d-1` difference vectors in
/// `R^d`, via cofactor expansion; `None` when the span is degenerate.
fn hyperplane_normal(diffs: &[Vec<f64>]) -> Option<Vec<f64>> {
    let d = diffs.first().map_or(1, |v| v.len());
    debug_assert_eq!(diffs.len() + 1, d);
    let mut n = vec![0.0; d];
    match d {
        1 => n[0] = 1.0,
        2 => {
            n[0] = -diffs[0][1];
            n[1] = diffs[0][0];
        }
        3 => {
            let (a, b) = (&diffs[0], &diffs[1]);
            n[0] = a[1] * b[2] - a[2] * b[1];
            n[1] = a[2] * b[0] - a[0] * b[2];
            n[2] = a[0] * b[1] - a[1] * b[0];
        }
        _ => {
            // n_i = (-1)^i det of the 3×3 minor with column i removed
            for i in 0..d {
                let mut minor = DMatrix::zeros(d - 1, d - 1);
                for (r, diff) in diffs.iter().enumerate() {
                    let mut cc = 0;
                    for c in 0..d {
                        if c != i {
                            minor[(r, cc)] = diff[c];
                            cc += 1;
                        }
                    }
                }
                n[i] = if i % 2 == 0 { minor.determinant() } else { -minor.determinant() };
            }
        }
    }
    let len = crate::linalg::norm(&n);
    if len < 1e-12 {
        return None;
    }
    for v in &mut n {
        *v /= len;
    }
    Some(n)
}

fn scale_of(points: &[Vec<f64>]) -> f64 {
    points
        .iter()
        .flat_map(|p| p.iter())
        .fold(0.0f64, |m, &v| m.max(v.abs()))
        .max(1e-12)
}

/// Outward facet halfspaces of `conv(points)`. Errors when the hull is
/// lower-dimensional.
pub fn facet_halfspaces(points: &[Vec<f64>]) -> Result<Vec<Halfspace>> {
    let d = points.first().map_or(0, |p| p.len());
    let m = points.len();
    if d == 0 || m < d + 1 {
        return Err(Error::DegenerateBody);
    }
    let scale = scale_of(points);
    let tol = 1e-9 * scale;
    if d == 1 {
        let lo = points.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
        let hi = points.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max);
        if hi - lo < tol {
            return Err(Error::DegenerateBody);
        }
        return Ok(vec![
            Halfspace { normal: vec![1.0], offset: hi },
            Halfspace { normal: vec![-1.0], offset: -lo },
        ]);
    }

    let mut facets: Vec<Halfspace> = Vec::new();
    for_each_subset(m, d, |sub| {
        let p0 = &points[sub[0]];
        let diffs: Vec<Vec<f64>> =
            sub[1..].iter().map(|&i| crate::linalg::sub(&points[i], p0)).collect();
        let Some(mut n) = hyperplane_normal(&diffs) else {
            return;
        };
        let mut c = crate::linalg::dot(&n, p0);
        // all points must lie on one side
        let mut above = false;
        let mut below = false;
        for p in points {
            let s = crate::linalg::dot(&n, p) - c;
            if s > tol {
                above = true;
            } else if s < -tol {
                below = true;
            }
            if above && below {
                return;
            }
        }
        if above {
            for v in &mut n {
                *v = -*v;
            }
            c = -c;
        }
        // dedup
        for h in &facets {
            if (crate::linalg::dot(&h.normal, &n) - 1.0).abs() < 1e-9
                && (h.offset - c).abs() < tol.max(1e-9 * c.abs())
            {
                return;
            }
        }
        facets.push(Halfspace { normal: n, offset: c });
    });
    if facets.len() < d + 1 {
        return Err(Error::DegenerateBody);
    }
    Ok(facets)
}

/// Vertices of `{x : a_i · x ≤ 1}`. The caller must guarantee boundedness
/// (the origin strictly inside the polar dual), which holds whenever the
/// `a_i` are `v_i - z` for `z` strictly interior to `conv(v_i)`.
pub fn vertex_enumeration(normals: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let d = normals.first().map_or(0, |p| p.len());
    let m = normals.len();
    if d == 0 || m < d + 1 {
        return Err(Error::DegenerateBody);
    }
    let mut verts: Vec<Vec<f64>> = Vec::new();
    let mut mat = DMatrix::zeros(d, d);
    let ones = DVector::from_element(d, 1.0);
    for_each_subset(m, d, |sub| {
        for (r, &i) in sub.iter().enumerate() {
            for c in 0..d {
                mat[(r, c)] = normals[i][c];
            }
        }
        let lu = mat.clone().lu();
        let det = lu.determinant();
        let row_scale: f64 = sub
            .iter()
            .map(|&i| crate::linalg::norm(&normals[i]).max(1e-300))
            .product();
        if det.abs() < 1e-10 * row_scale {
            return;
        }
        let Some(x) = lu.solve(&ones) else {
            return;
        };
        let xs: Vec<f64> = x.iter().copied().collect();
        if xs.iter().any(|v| !v.is_finite() || v.abs() > 1e12) {
            return;
        }
        let feas_tol = 1e-9 * (1.0 + crate::linalg::norm(&xs) * scale_of(normals));
        if normals.iter().any(|a| crate::linalg::dot(a, &xs) > 1.0 + feas_tol) {
            return;
        }
        let dup_tol = 1e-8 * (1.0 + crate::linalg::norm(&xs));
        if verts.iter().any(|v| crate::linalg::norm(&crate::linalg::sub(v, &xs)) < dup_tol) {
            return;
        }
        verts.push(xs);
    });
    if verts.len() < d + 1 {
        return Err(Error::DegenerateBody);
    }
    Ok(verts)
}

/// Exact volume and centroid of `conv(points)` via facet pyramids from the
/// vertex mean, recursing on facet dimension.
pub fn volume_centroid(points: &[Vec<f64>]) -> Result<(f64, Vec<f64>)> {
    let d = points.first().map_or(0, |p| p.len());
    if d == 0 || points.len() < d + 1 {
        return Err(Error::DegenerateBody);
    }
    if d == 1 {
        let lo = points.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
        let hi = points.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max);
        if !(hi > lo) {
            return Err(Error::DegenerateBody);
        }
        return Ok((hi - lo, vec![0.5 * (lo + hi)]));
    }
    let scale = scale_of(points);
    let tol = 1e-9 * scale;
    let facets = facet_halfspaces(points)?;
    let apex: Vec<f64> = {
        let mut a = vec![0.0; d];
        for p in points {
            for k in 0..d {
                a[k] += p[k] / points.len() as f64;
            }
        }
        a
    };
    let mut volume = 0.0;
    let mut centroid = vec![0.0; d];
    for f in &facets {
        let on_facet: Vec<&Vec<f64>> =
            points.iter().filter(|p| f.signed_distance(p).abs() <= tol.max(1e-12)).collect();
        if on_facet.len() < d {
            continue;
        }
        // orthonormal basis of the facet hyperplane
        let basis = hyperplane_basis(&f.normal);
        let p0 = on_facet[0];
        let projected: Vec<Vec<f64>> = on_facet
            .iter()
            .map(|p| {
                basis
                    .iter()
                    .map(|b| crate::linalg::dot(b, &crate::linalg::sub(p, p0)))
                    .collect()
            })
            .collect();
        let Ok((fvol, fcent_local)) = volume_centroid(&projected) else {
            continue; // facet degenerate at tolerance; contributes nothing
        };
        // facet centroid back in R^d
        let mut fcent = p0.clone();
        for (k, b) in basis.iter().enumerate() {
            for c in 0..d {
                fcent[c] += fcent_local[k] * b[c];
            }
        }
        let height = -f.signed_distance(&apex);
        if height <= 0.0 {
            continue;
        }
        let pyr_vol = fvol * height / d as f64;
        volume += pyr_vol;
        let w = d as f64 / (d + 1) as f64;
        for c in 0..d {
            centroid[c] += pyr_vol * (apex[c] + w * (fcent[c] - apex[c]));
        }
    }
    if volume <= 0.0 {
        return Err(Error::DegenerateBody);
    }
    for c in &mut centroid {
        *c /= volume;
    }
    Ok((volume, centroid))
}

/// Orthonormal basis of the hyperplane orthogonal to `normal`.
fn hyperplane_basis(normal: &[f64]) -> Vec<Vec<f64>> {
    let d = normal.len();
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(d - 1);
    for axis in 0..d {
        if basis.len() == d - 1 {
            break;
        }
        let mut v = vec![0.0; d];
        v[axis] = 1.0;
        // project out the normal and the basis so far
        let nd = crate::linalg::dot(&v, normal);
        for k in 0..d {
            v[k] -= nd * normal[k];
        }
        for b in &basis {
            let bd = crate::linalg::dot(&v, b);
            for k in 0..d {
                v[k] -= bd * b[k];
            }
        }
        let len = crate::linalg::norm(&v);
        if len > 1e-9 {
            for x in &mut v {
                *x /= len;
            }
            basis.push(v);
        }
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn square_volume_and_centroid() {
        let pts = vec![vec![1.0, 1.0], vec![-1.0, 1.0], vec![-1.0, -1.0], vec![1.0, -1.0]];
        let (v, c) = volume_centroid(&pts).unwrap();
        assert_relative_eq!(v, 4.0, epsilon = 1e-12);
        assert_relative_eq!(c[0], 0.0, epsilon = 1e-12);
        assert_relative_eq!(c[1], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn regular_triangle_area() {
        // circumradius 1, centroid at origin: area 3√3/4
        let pts: Vec<Vec<f64>> = (0..3)
            .map(|k| {
                let th = std::f64::consts::PI * (0.5 + 2.0 * k as f64 / 3.0);
                vec![th.cos(), th.sin()]
            })
            .collect();
        let (v, c) = volume_centroid(&pts).unwrap();
        assert_relative_eq!(v, 3.0 * 3.0f64.sqrt() / 4.0, epsilon = 1e-12);
        assert!(crate::linalg::norm(&c) < 1e-12);
    }

    #[test]
    fn cube_and_simplex_3d() {
        let mut cube = Vec::new();
        for i in 0..8 {
            cube.push(vec![
                if i & 1 == 0 { -1.0 } else { 1.0 },
                if i & 2 == 0 { -1.0 } else { 1.0 },
                if i & 4 == 0 { -1.0 } else { 1.0 },
            ]);
        }
        let (v, _) = volume_centroid(&cube).unwrap();
        assert_relative_eq!(v, 8.0, epsilon = 1e-10);

        let simplex = vec![
            vec![0.0, 0.0, 0.0],
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
        ];
        let (v, c) = volume_centroid(&simplex).unwrap();
        assert_relative_eq!(v, 1.0 / 6.0, epsilon = 1e-12);
        for k in 0..3 {
            assert_relative_eq!(c[k], 0.25, epsilon = 1e-12);
        }
    }

    #[test]
    fn cross_polytope_4d() {
        let mut pts = Vec::new();
        for a in 0..4 {
            for s in [-1.0, 1.0] {
                let mut p = vec![0.0; 4];
                p[a] = s;
                pts.push(p);
            }
        }
        let (v, _) = volume_centroid(&pts).unwrap();
        // V(cross polytope) = 2^d / d!
        assert_relative_eq!(v, 16.0 / 24.0, epsilon = 1e-9);
    }

    #[test]
    fn interior_points_are_ignored() {
        let pts = vec![
            vec![1.0, 1.0],
            vec![-1.0, 1.0],
            vec![-1.0, -1.0],
            vec![1.0, -1.0],
            vec![0.1, 0.2],
        ];
        let (v, _) = volume_centroid(&pts).unwrap();
        assert_relative_eq!(v, 4.0, epsilon = 1e-12);
        assert_eq!(facet_halfspaces(&pts).unwrap().len(), 4);
    }

    #[test]
    fn vertex_enum_of_cube_constraints() {
        // {x : ±x_i ≤ 1} has the cube's 4 vertices
        let normals = vec![vec![1.0, 0.0], vec![-1.0, 0.0], vec![0.0, 1.0], vec![0.0, -1.0]];
        let mut verts = vertex_enumeration(&normals).unwrap();
        verts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(verts.len(), 4);
        for v in verts {
            assert_relative_eq!(v[0].abs(), 1.0, epsilon = 1e-12);
            assert_relative_eq!(v[1].abs(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn degenerate_inputs_rejected() {
        let flat = vec![vec![0.0, 0.0], vec![1.0, 1.0], vec![2.0, 2.0]];
        assert!(matches!(volume_centroid(&flat), Err(Error::DegenerateBody)));
    }
}
