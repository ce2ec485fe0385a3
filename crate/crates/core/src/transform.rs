//! Extended-real scalar fields on tensor grids and the discrete
//! Legendre–Fenchel transform.
//!
//! A [`GridField`] is `+∞` outside its box, so the computed conjugate is
//! that of `φ` plus the box indicator. Callers must choose boxes large
//! enough that the region of interest sees no boundary effect;
//! [`boundary_effect_radius`] reports a conservative radius.
//!
//! The transform factors dimension-wise into 1D conjugates. The 1D kernel
//! is a monotone merge over the lower hull of `(x_i, f_i)` (linear time);
//! the brute-force `O(N·M)` conjugate is kept as a test oracle.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Axis-aligned box `[min, max]` in `R^dim`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxDomain {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl BoxDomain {
    pub fn new(min: Vec<f64>, max: Vec<f64>) -> Result<Self> {
        if min.len() != max.len() || min.is_empty() || min.len() > 4 {
            return Err(Error::invalid("box dimension must be 1-4"));
        }
        for (a, b) in min.iter().zip(&max) {
            if !(a.is_finite() && b.is_finite() && a < b) {
                return Err(Error::invalid("box must satisfy min < max componentwise"));
            }
        }
        Ok(BoxDomain { min, max })
    }

    pub fn cube(dim: usize, half_width: f64) -> Self {
        BoxDomain { min: vec![-half_width; dim], max: vec![half_width; dim] }
    }

    pub fn dim(&self) -> usize {
        self.min.len()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter()
            .zip(self.min.iter().zip(&self.max))
            .all(|(xi, (a, b))| *xi >= *a && *xi <= *b)
    }
}

/// Tri-state convexity tag carried by a field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Convexity {
    KnownConvex,
    KnownNonconvex,
    Unknown,
}

/// Scalar field sampled on a uniform tensor grid, with `+∞` as the only
/// non-finite value. NaN and `-∞` are rejected at construction.
#[derive(Clone, Debug)]
pub struct GridField {
    box_: BoxDomain,
    shape: Vec<usize>,
    values: Vec<f64>,
    convex_flag: Convexity,
}

/// Tolerance for the discrete midpoint-convexity certificate.
pub const CONVEXITY_TOL: f64 = 1e-9;

impl GridField {
    pub fn new(
        box_: BoxDomain,
        shape: Vec<usize>,
        values: Vec<f64>,
        convex_flag: Convexity,
    ) -> Result<Self> {
        if shape.len() != box_.dim() {
            return Err(Error::invalid("shape rank does not match box dimension"));
        }
        if shape.iter().any(|&s| s < 4) {
            return Err(Error::invalid("grid shape must be at least 4 per axis"));
        }
        let n: usize = shape.iter().product();
        if values.len() != n {
            return Err(Error::invalid("value count does not match shape"));
        }
        let mut any_finite = false;
        for &v in &values {
            if v.is_nan() || v == f64::NEG_INFINITY {
                return Err(Error::invalid("field values must be finite or +inf"));
            }
            any_finite |= v.is_finite();
        }
        if !any_finite {
            return Err(Error::EmptyEffectiveDomain);
        }
        let field = GridField { box_, shape, values, convex_flag };
        if convex_flag == Convexity::KnownConvex {
            let worst = field.convexity_violation();
            if worst > CONVEXITY_TOL {
                return Err(Error::invalid(format!(
                    "known-convex flag rejected: midpoint convexity violated by {worst:.3e}"
                )));
            }
        }
        Ok(field)
    }

    /// Sample a function on the grid.
    pub fn from_fn(
        box_: BoxDomain,
        shape: Vec<usize>,
        f: impl Fn(&[f64]) -> f64,
        convex_flag: Convexity,
    ) -> Result<Self> {
        let dim = box_.dim();
        let n: usize = shape.iter().product();
        let steps: Vec<f64> = (0..dim)
            .map(|d| (box_.max[d] - box_.min[d]) / (shape[d] - 1) as f64)
            .collect();
        let mut values = Vec::with_capacity(n);
        let mut idx = vec![0usize; dim];
        let mut x = vec![0.0; dim];
        for flat in 0..n {
            unflatten_index(&shape, flat, &mut idx);
            for d in 0..dim {
                x[d] = box_.min[d] + steps[d] * idx[d] as f64;
            }
            values.push(f(&x));
        }
        GridField::new(box_, shape, values, convex_flag)
    }

    pub fn dim(&self) -> usize {
        self.shape.len()
    }

    pub fn box_domain(&self) -> &BoxDomain {
        &self.box_
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn convex_flag(&self) -> Convexity {
        self.convex_flag
    }

    pub fn set_convex_flag(&mut self, flag: Convexity) {
        self.convex_flag = flag;
    }

    /// Grid step along each axis.
    pub fn steps(&self) -> Vec<f64> {
        (0..self.dim())
            .map(|d| (self.box_.max[d] - self.box_.min[d]) / (self.shape[d] - 1) as f64)
            .collect()
    }

    /// Node coordinates along one axis.
    pub fn axis_coords(&self, d: usize) -> Vec<f64> {
        let h = (self.box_.max[d] - self.box_.min[d]) / (self.shape[d] - 1) as f64;
        (0..self.shape[d]).map(|i| self.box_.min[d] + h * i as f64).collect()
    }

    pub fn unflatten(&self, flat: usize, idx: &mut [usize]) {
        unflatten_index(&self.shape, flat, idx);
    }

    pub fn node_coords(&self, flat: usize, x: &mut [f64]) {
        let steps = self.steps();
        let mut rest = flat;
        for d in (0..self.dim()).rev() {
            let i = rest % self.shape[d];
            rest /= self.shape[d];
            x[d] = self.box_.min[d] + steps[d] * i as f64;
        }
    }

    /// Multilinear interpolation; `+∞` if `x` is outside the box or the
    /// surrounding cell touches a `+∞` node.
    pub fn eval(&self, x: &[f64]) -> f64 {
        let dim = self.dim();
        debug_assert_eq!(x.len(), dim);
        let steps = self.steps();
        let mut base = vec![0usize; dim];
        let mut t = vec![0.0; dim];
        for d in 0..dim {
            if x[d] < self.box_.min[d] || x[d] > self.box_.max[d] {
                return f64::INFINITY;
            }
            let s = (x[d] - self.box_.min[d]) / steps[d];
            let i = (s.floor() as usize).min(self.shape[d] - 2);
            base[d] = i;
            t[d] = s - i as f64;
        }
        let mut acc = 0.0;
        for corner in 0..(1usize << dim) {
            let mut w = 1.0;
            let mut flat = 0usize;
            for d in 0..dim {
                let up = (corner >> d) & 1 == 1;
                w *= if up { t[d] } else { 1.0 - t[d] };
                flat = flat * self.shape[d] + base[d] + usize::from(up);
            }
            let v = self.values[flat];
            if v == f64::INFINITY {
                return f64::INFINITY;
            }
            acc += w * v;
        }
        acc
    }

    /// Worst violation of discrete midpoint convexity over all axis and
    /// diagonal stencils; `<= 0` means certified midpoint-convex.
    pub fn convexity_violation(&self) -> f64 {
        let dim = self.dim();
        let stencils = half_stencils(dim);
        let n = self.values.len();
        let mut idx = vec![0usize; dim];
        let mut worst = f64::NEG_INFINITY;
        for flat in 0..n {
            let center = self.values[flat];
            unflatten_index(&self.shape, flat, &mut idx);
            for e in &stencils {
                let mut ok = true;
                let mut fwd = 0usize;
                let mut bwd = 0usize;
                for d in 0..dim {
                    let i = idx[d] as isize;
                    let f = i + e[d];
                    let b = i - e[d];
                    if f < 0 || b < 0 || f >= self.shape[d] as isize || b >= self.shape[d] as isize
                    {
                        ok = false;
                        break;
                    }
                    fwd = fwd * self.shape[d] + f as usize;
                    bwd = bwd * self.shape[d] + b as usize;
                }
                if !ok {
                    continue;
                }
                let (vf, vb) = (self.values[fwd], self.values[bwd]);
                if vf == f64::INFINITY || vb == f64::INFINITY {
                    continue;
                }
                let violation = if center == f64::INFINITY {
                    f64::INFINITY
                } else {
                    2.0 * center - vf - vb
                };
                if violation > worst {
                    worst = violation;
                }
            }
        }
        if worst == f64::NEG_INFINITY {
            0.0
        } else {
            worst
        }
    }

    /// Set the convexity tag from the midpoint certificate.
    pub fn classify_convexity(&mut self) -> Convexity {
        self.convex_flag = if self.convexity_violation() <= CONVEXITY_TOL {
            Convexity::KnownConvex
        } else {
            Convexity::KnownNonconvex
        };
        self.convex_flag
    }

    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        self.values.iter().map(|&v| f(v)).collect()
    }
}

fn unflatten_index(shape: &[usize], flat: usize, idx: &mut [usize]) {
    let mut rest = flat;
    for d in (0..shape.len()).rev() {
        idx[d] = rest % shape[d];
        rest /= shape[d];
    }
}

/// Half of the nonzero stencils in `{-1,0,1}^dim` (one per ± pair).
fn half_stencils(dim: usize) -> Vec<Vec<isize>> {
    let mut out = Vec::new();
    let total = 3usize.pow(dim as u32);
    for code in 0..total {
        let mut e = vec![0isize; dim];
        let mut c = code;
        for d in 0..dim {
            e[d] = (c % 3) as isize - 1;
            c /= 3;
        }
        // keep exactly one of ±e: first nonzero component positive
        match e.iter().find(|&&v| v != 0) {
            Some(&v) if v > 0 => out.push(e),
            _ => {}
        }
    }
    out
}

// ---------------------------------------------------------------------------
// 1D discrete conjugate
// ---------------------------------------------------------------------------

/// Linear-time discrete conjugate: `dst[j] = max_i (us[i]·out_y[j] - f[i])`
/// over finite `f[i]`, via the lower hull of `(us, f)` and a monotone sweep.
/// All-infinite input yields `-∞` everywhere.
pub fn conjugate_1d_fast(us: &[f64], f: &[f64], out_y: &[f64], dst: &mut [f64]) {
    debug_assert!(out_y.windows(2).all(|w| w[0] <= w[1]));
    let mut hull: Vec<usize> = Vec::with_capacity(us.len());
    for i in 0..us.len() {
        if !f[i].is_finite() {
            continue;
        }
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            let cross = (us[b] - us[a]) * (f[i] - f[a]) - (us[i] - us[a]) * (f[b] - f[a]);
            // pop points strictly above the chord; collinear ones stay so the
            // sweep maximizes over the same finite set as the brute force
            if cross < 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(i);
    }
    if hull.is_empty() {
        dst.fill(f64::NEG_INFINITY);
        return;
    }
    let mut k = 0usize;
    for (j, &y) in out_y.iter().enumerate() {
        while k + 1 < hull.len() {
            let cur = us[hull[k]] * y - f[hull[k]];
            let nxt = us[hull[k + 1]] * y - f[hull[k + 1]];
            if nxt >= cur {
                k += 1;
            } else {
                break;
            }
        }
        dst[j] = us[hull[k]] * y - f[hull[k]];
    }
}

/// Brute-force `O(N·M)` conjugate, the oracle for [`conjugate_1d_fast`].
pub fn conjugate_1d_slow(us: &[f64], f: &[f64], out_y: &[f64], dst: &mut [f64]) {
    for (j, &y) in out_y.iter().enumerate() {
        let mut best = f64::NEG_INFINITY;
        for i in 0..us.len() {
            if f[i].is_finite() {
                let v = us[i] * y - f[i];
                if v > best {
                    best = v;
                }
            }
        }
        dst[j] = best;
    }
}

// ---------------------------------------------------------------------------
// n-dimensional transform
// ---------------------------------------------------------------------------

/// One dimension-wise stage: `out = sup_{x_axis} (x_axis · y_axis + g)`,
/// where `g` is `-data` when `negate` (interior stages) or the stage is fed
/// `f = data` directly (first stage). Pencils parallelize over the leading
/// axes.
fn conjugate_stage(
    data: &[f64],
    shape: &mut Vec<usize>,
    axis: usize,
    in_coords: &[f64],
    out_coords: &[f64],
    negate: bool,
) -> Vec<f64> {
    let in_len = shape[axis];
    let out_len = out_coords.len();
    let pre: usize = shape[..axis].iter().product();
    let post: usize = shape[axis + 1..].iter().product();
    let mut out = vec![0.0f64; pre * out_len * post];
    out.par_chunks_mut(out_len * post).enumerate().for_each(|(a, chunk)| {
        let mut fbuf = vec![0.0f64; in_len];
        let mut dbuf = vec![0.0f64; out_len];
        for c in 0..post {
            let base_in = a * in_len * post + c;
            for i in 0..in_len {
                let v = data[base_in + i * post];
                fbuf[i] = if negate { -v } else { v };
            }
            conjugate_1d_fast(in_coords, &fbuf, out_coords, &mut dbuf);
            for (j, &v) in dbuf.iter().enumerate() {
                chunk[j * post + c] = v;
            }
        }
    });
    shape[axis] = out_len;
    out
}

fn translated_coords(field: &GridField, z: &[f64]) -> Vec<Vec<f64>> {
    (0..field.dim())
        .map(|d| field.axis_coords(d).iter().map(|x| x - z[d]).collect())
        .collect()
}

/// `ℒ_z φ` sampled on a caller-chosen output grid.
pub fn legendre_onto(
    field: &GridField,
    z: &[f64],
    out_box: BoxDomain,
    out_shape: Vec<usize>,
) -> Result<GridField> {
    let dim = field.dim();
    if z.len() != dim || out_box.dim() != dim || out_shape.len() != dim {
        return Err(Error::invalid("dimension mismatch in legendre transform"));
    }
    if !field.values.iter().any(|v| v.is_finite()) {
        return Err(Error::EmptyEffectiveDomain);
    }
    let in_coords = translated_coords(field, z);
    let out_field = GridField {
        box_: out_box,
        shape: out_shape,
        values: Vec::new(),
        convex_flag: Convexity::Unknown,
    };
    let out_coords = translated_coords(&out_field, z);
    let mut shape = field.shape.clone();
    let mut data = field.values.clone();
    for axis in 0..dim {
        data = conjugate_stage(&data, &mut shape, axis, &in_coords[axis], &out_coords[axis], axis > 0);
    }
    // the discrete conjugate of a nonempty field is finite everywhere
    GridField::new(out_field.box_, shape, data, Convexity::KnownConvex)
}

/// Per-axis half-width of the automatic dual box: the largest finite
/// difference quotient along that axis (falls back to twice the translated
/// box corner when the field carries no finite slope, e.g. indicators).
pub fn auto_dual_half_widths(field: &GridField, z: &[f64]) -> Vec<f64> {
    let dim = field.dim();
    let steps = field.steps();
    let mut smax = vec![0.0f64; dim];
    for axis in 0..dim {
        let in_len = field.shape[axis];
        let pre: usize = field.shape[..axis].iter().product();
        let post: usize = field.shape[axis + 1..].iter().product();
        let mut m = 0.0f64;
        for a in 0..pre {
            for c in 0..post {
                let base = a * in_len * post + c;
                for i in 0..in_len - 1 {
                    let v0 = field.values[base + i * post];
                    let v1 = field.values[base + (i + 1) * post];
                    if v0.is_finite() && v1.is_finite() {
                        let q = ((v1 - v0) / steps[axis]).abs();
                        if q > m {
                            m = q;
                        }
                    }
                }
            }
        }
        if m < 1e-12 {
            let lo = (field.box_.min[axis] - z[axis]).abs();
            let hi = (field.box_.max[axis] - z[axis]).abs();
            m = 2.0 * lo.max(hi).max(1.0);
        }
        smax[axis] = m;
    }
    smax
}

/// `ℒ_z φ` on the automatic dual box (shape mirrors the primal shape).
pub fn legendre(field: &GridField, z: &[f64]) -> Result<GridField> {
    let s = auto_dual_half_widths(field, z);
    let dim = field.dim();
    let out_box = BoxDomain::new(
        (0..dim).map(|d| z[d] - s[d]).collect(),
        (0..dim).map(|d| z[d] + s[d]).collect(),
    )?;
    legendre_onto(field, z, out_box, field.shape.clone())
}

/// Lower convex hull `φ_* = ℒ_z ℒ_z φ` on the original grid.
pub fn biconjugate(field: &GridField, z: &[f64]) -> Result<GridField> {
    let psi = legendre(field, z)?;
    legendre_onto(&psi, z, field.box_.clone(), field.shape.clone())
}

/// Minimum Fenchel–Young gap `min_{x,y} φ(x) + ψ(y) - ⟨x-z, y-z⟩` over all
/// grid pairs, `+∞` entries skipped as vacuous.
pub fn fenchel_young_gap(phi: &GridField, psi: &GridField, z: &[f64]) -> Result<f64> {
    if phi.dim() != psi.dim() {
        return Err(Error::invalid("field dimensions differ"));
    }
    // min over pairs equals min_y [ψ(y) - (ℒ_z φ)(y)] with the conjugate
    // evaluated on ψ's own grid
    let conj = legendre_onto(phi, z, psi.box_.clone(), psi.shape.clone())?;
    let mut best = f64::INFINITY;
    for (&p, &c) in psi.values.iter().zip(conj.values.iter()) {
        if p.is_finite() && c > f64::NEG_INFINITY {
            let gap = p - c;
            if gap < best {
                best = gap;
            }
        }
    }
    if best.is_infinite() {
        return Err(Error::Vacuous);
    }
    Ok(best)
}

/// Conservative radius within which the auto-box transform is free of
/// boundary effects: the smallest over axes of the one-sided slopes
/// attained at the box ends. A surrogate, reported rather than asserted.
pub fn boundary_effect_radius(field: &GridField) -> f64 {
    let dim = field.dim();
    let steps = field.steps();
    let mut r = f64::INFINITY;
    for axis in 0..dim {
        let in_len = field.shape[axis];
        let pre: usize = field.shape[..axis].iter().product();
        let post: usize = field.shape[axis + 1..].iter().product();
        let mut lo_slope = f64::INFINITY;
        let mut hi_slope = f64::INFINITY;
        for a in 0..pre {
            for c in 0..post {
                let base = a * in_len * post + c;
                let first = (field.values[base], field.values[base + post]);
                if first.0.is_finite() && first.1.is_finite() {
                    lo_slope = lo_slope.min(((first.1 - first.0) / steps[axis]).abs());
                }
                let last = (
                    field.values[base + (in_len - 2) * post],
                    field.values[base + (in_len - 1) * post],
                );
                if last.0.is_finite() && last.1.is_finite() {
                    hi_slope = hi_slope.min(((last.1 - last.0) / steps[axis]).abs());
                }
            }
        }
        let m = lo_slope.min(hi_slope);
        if m.is_finite() {
            r = r.min(m);
        }
    }
    if r.is_finite() {
        r
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn quadratic_field(half: f64, n: usize) -> GridField {
        GridField::from_fn(
            BoxDomain::cube(2, half),
            vec![n, n],
            |x| 0.5 * (x[0] * x[0] + x[1] * x[1]),
            Convexity::KnownConvex,
        )
        .unwrap()
    }

    #[test]
    fn quadratic_self_dual() {
        let phi = quadratic_field(4.0, 129);
        let psi = legendre(&phi, &[0.0, 0.0]).unwrap();
        assert_eq!(psi.convex_flag(), Convexity::KnownConvex);
        let mut worst: f64 = 0.0;
        let mut idx = vec![0usize; 2];
        let mut y = vec![0.0; 2];
        for flat in 0..psi.values().len() {
            psi.unflatten(flat, &mut idx);
            psi.node_coords(flat, &mut y);
            if y[0].abs() <= 2.0 && y[1].abs() <= 2.0 {
                let expect = 0.5 * (y[0] * y[0] + y[1] * y[1]);
                worst = worst.max((psi.values()[flat] - expect).abs());
            }
        }
        assert!(worst < 0.01, "sup error {worst}");
    }

    #[test]
    fn cube_indicator_gives_support_function() {
        let phi = GridField::from_fn(
            BoxDomain::cube(2, 1.0),
            vec![33, 33],
            |_| 0.0,
            Convexity::KnownConvex,
        )
        .unwrap();
        let psi = legendre(&phi, &[0.0, 0.0]).unwrap();
        // auto dual box falls back to [-2, 2] per axis
        assert_relative_eq!(psi.box_domain().min[0], -2.0);
        let mut y = vec![0.0; 2];
        for flat in 0..psi.values().len() {
            psi.node_coords(flat, &mut y);
            let expect = y[0].abs() + y[1].abs();
            assert!((psi.values()[flat] - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn anisotropic_quadratic_conjugate_value() {
        // φ = x₁² + x₂²/4 has ψ(y) = y₁²/4 + y₂²; at (1,1) this is 1.25
        let phi = GridField::from_fn(
            BoxDomain::cube(2, 6.0),
            vec![241, 241],
            |x| x[0] * x[0] + x[1] * x[1] / 4.0,
            Convexity::KnownConvex,
        )
        .unwrap();
        let psi = legendre(&phi, &[0.0, 0.0]).unwrap();
        assert_relative_eq!(psi.eval(&[1.0, 1.0]), 1.25, epsilon = 5e-3);
    }

    #[test]
    fn fast_equals_slow_on_random_fields() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2024);
        for _ in 0..200 {
            let n = rng.random_range(4..80);
            let m = rng.random_range(4..80);
            let xs: Vec<f64> = (0..n).map(|i| -3.0 + 6.0 * i as f64 / (n - 1) as f64).collect();
            let f: Vec<f64> = (0..n)
                .map(|_| {
                    if rng.random::<f64>() < 0.1 {
                        f64::INFINITY
                    } else {
                        rng.random_range(-5.0..5.0)
                    }
                })
                .collect();
            let ys: Vec<f64> = (0..m).map(|j| -7.0 + 14.0 * j as f64 / (m - 1) as f64).collect();
            let mut fast = vec![0.0; m];
            let mut slow = vec![0.0; m];
            conjugate_1d_fast(&xs, &f, &ys, &mut fast);
            conjugate_1d_slow(&xs, &f, &ys, &mut slow);
            for j in 0..m {
                assert_eq!(fast[j].to_bits(), slow[j].to_bits(), "mismatch at {j}");
            }
        }
    }

    #[test]
    fn biconjugate_of_double_well_is_hull() {
        let w = GridField::from_fn(
            BoxDomain::new(vec![-2.0], vec![2.0]).unwrap(),
            vec![201],
            |x| (x[0] * x[0] - 1.0).powi(2),
            Convexity::Unknown,
        )
        .unwrap();
        let hull = biconjugate(&w, &[0.0]).unwrap();
        let mut x = vec![0.0];
        for flat in 0..hull.values().len() {
            hull.node_coords(flat, &mut x);
            let expect = if x[0].abs() <= 1.0 { 0.0 } else { (x[0] * x[0] - 1.0).powi(2) };
            assert!(
                (hull.values()[flat] - expect).abs() < 0.02,
                "x={} got={} want={}",
                x[0],
                hull.values()[flat],
                expect
            );
        }
    }

    #[test]
    fn biconjugate_removes_infinite_spike_and_is_idempotent() {
        let phi = GridField::from_fn(
            BoxDomain::cube(2, 3.0),
            vec![61, 61],
            |x| {
                let r2 = (x[0] - 1.0).powi(2) + x[1] * x[1];
                if r2 < 0.25 {
                    f64::INFINITY
                } else {
                    0.5 * (x[0] * x[0] + x[1] * x[1])
                }
            },
            Convexity::Unknown,
        )
        .unwrap();
        let star = biconjugate(&phi, &[0.0, 0.0]).unwrap();
        // hull never exceeds φ and fills the spike with finite values
        for (s, p) in star.values().iter().zip(phi.values()) {
            assert!(*s <= *p + 1e-9);
            assert!(s.is_finite());
        }
        let star2 = biconjugate(&star, &[0.0, 0.0]).unwrap();
        for (a, b) in star2.values().iter().zip(star.values()) {
            assert!((a - b).abs() < 1e-7);
        }
    }

    #[test]
    fn fenchel_young_gap_basics() {
        let phi = quadratic_field(4.0, 65);
        let psi = legendre(&phi, &[0.0, 0.0]).unwrap();
        let gap = fenchel_young_gap(&phi, &psi, &[0.0, 0.0]).unwrap();
        assert!(gap >= -1e-9, "gap {gap}");
        assert!(gap <= 1e-9, "equality attained at x=y=0, gap {gap}");

        // additive shift: ψ + 1 moves the gap by exactly 1
        let shifted = GridField::new(
            psi.box_domain().clone(),
            psi.shape().to_vec(),
            psi.values().iter().map(|v| v + 1.0).collect(),
            Convexity::KnownConvex,
        )
        .unwrap();
        let gap2 = fenchel_young_gap(&phi, &shifted, &[0.0, 0.0]).unwrap();
        assert_relative_eq!(gap2 - gap, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn legendre_shift_rule() {
        let phi = quadratic_field(4.0, 65);
        let plus_c = GridField::new(
            phi.box_domain().clone(),
            phi.shape().to_vec(),
            phi.values().iter().map(|v| v + 2.5).collect(),
            Convexity::KnownConvex,
        )
        .unwrap();
        let a = legendre(&phi, &[0.0, 0.0]).unwrap();
        let b = legendre(&plus_c, &[0.0, 0.0]).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            assert_relative_eq!(x - 2.5, *y, epsilon = 1e-12);
        }
    }

    #[test]
    fn empty_domain_rejected() {
        let r = GridField::new(
            BoxDomain::cube(1, 1.0),
            vec![4],
            vec![f64::INFINITY; 4],
            Convexity::Unknown,
        );
        assert!(matches!(r, Err(Error::EmptyEffectiveDomain)));
    }

    #[test]
    fn nan_rejected() {
        let r = GridField::new(
            BoxDomain::cube(1, 1.0),
            vec![4],
            vec![0.0, f64::NAN, 0.0, 0.0],
            Convexity::Unknown,
        );
        assert!(r.is_err());
    }

    #[test]
    fn interpolation_propagates_infinity() {
        let phi = GridField::from_fn(
            BoxDomain::cube(1, 2.0),
            vec![5],
            |x| if x[0] > 1.5 { f64::INFINITY } else { x[0] },
            Convexity::Unknown,
        )
        .unwrap();
        assert!(phi.eval(&[1.2]).is_infinite()); // cell touches the +∞ node at 2.0
        assert!(phi.eval(&[0.2]).is_finite());
        assert!(phi.eval(&[5.0]).is_infinite()); // outside box
    }
}
