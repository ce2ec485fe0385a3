//! Shared quadrature engine.
//!
//! Adaptive 1D integrals use Gauss–Kronrod 7/15 pairs with interval
//! bisection and a mixed absolute+relative tolerance. Full-space integrals
//! go through sphere grids × adaptive radial quadrature, tensor-grid
//! trapezoids, or seeded Monte Carlo (the independent cross-check).

mod mc;
mod sphere;

pub use mc::{integrate_mc, McDomain};
pub use sphere::SphereGrid;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::transform::GridField;

/// Quadrature method tag, echoed in reports.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuadMethod {
    Adaptive1d,
    RadialSpherical,
    TensorGrid,
    MonteCarlo,
}

/// Parameters governing a quadrature run; echoed in every numeric report.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub method: QuadMethod,
    pub tol: f64,
    pub max_evals: usize,
    /// Used by Monte Carlo only.
    pub seed: u64,
}

impl QuadratureSpec {
    pub fn new(method: QuadMethod, tol: f64, max_evals: usize, seed: u64) -> Result<Self> {
        if !(tol > 0.0) {
            return Err(Error::invalid("quadrature tol must be > 0"));
        }
        if max_evals < 100 {
            return Err(Error::invalid("quadrature max_evals must be >= 100"));
        }
        Ok(QuadratureSpec { method, tol, max_evals, seed })
    }

    pub fn adaptive(tol: f64) -> Self {
        QuadratureSpec { method: QuadMethod::Adaptive1d, tol, max_evals: 100_000, seed: 0 }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec::adaptive(1e-9)
    }
}

/// Value plus error estimate for an adaptive integral.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct QuadResult {
    pub value: f64,
    pub abs_error: f64,
    pub evals: usize,
    /// False when the budget ran out before the tolerance was met.
    pub converged: bool,
}

// 15-point Kronrod abscissae with the embedded 7-point Gauss rule (QUADPACK).
#[allow(clippy::excessive_precision)]
const XGK15: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];
#[allow(clippy::excessive_precision)]
const WG7: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];
#[allow(clippy::excessive_precision)]
const WGK15: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// One Gauss–Kronrod 7/15 pass over `[a, b]`; returns (value, error estimate).
fn qk15(f: &mut dyn FnMut(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let half = 0.5 * (b - a);
    let center = 0.5 * (a + b);
    let fc = f(center);
    let mut kronrod = fc * WGK15[7];
    let mut gauss = fc * WG7[3];
    for j in 0..7 {
        let x = half * XGK15[j];
        let f1 = f(center - x);
        let f2 = f(center + x);
        kronrod += WGK15[j] * (f1 + f2);
        if j % 2 == 1 {
            gauss += WG7[j / 2] * (f1 + f2);
        }
    }
    let value = kronrod * half;
    let err = ((kronrod - gauss) * half).abs();
    (value, err)
}

/// Adaptive integral of `f` over `[a, b]` by Gauss–Kronrod bisection.
pub fn integrate_adaptive(
    mut f: impl FnMut(f64) -> f64,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> QuadResult {
    #[derive(PartialEq)]
    struct Seg {
        a: f64,
        b: f64,
        value: f64,
        err: f64,
    }

    if a == b {
        return QuadResult { value: 0.0, abs_error: 0.0, evals: 0, converged: true };
    }
    let (v0, e0) = qk15(&mut f, a, b);
    let mut segs = vec![Seg { a, b, value: v0, err: e0 }];
    let mut evals = 15usize;
    loop {
        let total: f64 = segs.iter().map(|s| s.value).sum();
        let total_err: f64 = segs.iter().map(|s| s.err).sum();
        let target = spec.tol.max(spec.tol * total.abs());
        if total_err <= target {
            return QuadResult { value: total, abs_error: total_err, evals, converged: true };
        }
        if evals + 30 > spec.max_evals {
            return QuadResult { value: total, abs_error: total_err, evals, converged: false };
        }
        // bisect the segment with the largest error estimate
        let worst = segs
            .iter()
            .enumerate()
            .max_by(|(_, x), (_, y)| x.err.partial_cmp(&y.err).unwrap())
            .map(|(i, _)| i)
            .unwrap();
        let Seg { a: sa, b: sb, .. } = segs.swap_remove(worst);
        let mid = 0.5 * (sa + sb);
        if mid <= sa || mid >= sb {
            // interval exhausted at machine precision
            let (v, e) = qk15(&mut f, sa, sb);
            segs.push(Seg { a: sa, b: sb, value: v, err: 0.0 });
            evals += 15;
            let _ = e;
            continue;
        }
        let (v1, e1) = qk15(&mut f, sa, mid);
        let (v2, e2) = qk15(&mut f, mid, sb);
        evals += 30;
        segs.push(Seg { a: sa, b: mid, value: v1, err: e1 });
        segs.push(Seg { a: mid, b: sb, value: v2, err: e2 });
    }
}

/// Integral of `f` over `[start, ∞)` by doubling panels until the tail
/// contribution falls below `tol / 10`.
pub fn integrate_semi_infinite(
    mut f: impl FnMut(f64) -> f64,
    start: f64,
    spec: &QuadratureSpec,
) -> QuadResult {
    let mut total = 0.0;
    let mut err = 0.0;
    let mut evals = 0usize;
    let mut lo = start;
    let mut width = 1.0f64.max(start.abs());
    let mut small_panels = 0;
    let mut converged = false;
    for _ in 0..64 {
        let hi = lo + width;
        let r = integrate_adaptive(&mut f, lo, hi, spec);
        total += r.value;
        err += r.abs_error;
        evals += r.evals;
        let scale = total.abs().max(1.0);
        if r.value.abs() < spec.tol / 10.0 * scale {
            small_panels += 1;
            if small_panels >= 2 {
                converged = true;
                break;
            }
        } else {
            small_panels = 0;
        }
        if evals >= spec.max_evals {
            break;
        }
        lo = hi;
        width *= 2.0;
    }
    QuadResult { value: total, abs_error: err, evals, converged }
}

/// Integral of `f` over `R^n` via a sphere grid × adaptive radial quadrature:
/// `∫ f = Σ_u w_u ∫_0^∞ r^{n-1} f(r·u) dr`.
pub fn integrate_radial(
    f: impl Fn(&[f64]) -> f64 + Sync + Send,
    grid: &SphereGrid,
    spec: &QuadratureSpec,
) -> QuadResult {
    use rayon::prelude::*;

    let n = grid.dim;
    let per_dir_spec = QuadratureSpec {
        max_evals: (spec.max_evals / grid.len()).max(2_000),
        ..*spec
    };
    let parts: Vec<QuadResult> = grid
        .dirs
        .par_iter()
        .map(|u| {
            let mut pt = vec![0.0; n];
            let g = |r: f64| {
                for (p, ui) in pt.iter_mut().zip(u.iter()) {
                    *p = ui * r;
                }
                r.powi(n as i32 - 1) * f(&pt)
            };
            integrate_semi_infinite(g, 0.0, &per_dir_spec)
        })
        .collect();
    let mut value = 0.0;
    let mut abs_error = 0.0;
    let mut evals = 0;
    let mut converged = true;
    for (w, p) in grid.weights.iter().zip(&parts) {
        value += w * p.value;
        abs_error += w * p.abs_error;
        evals += p.evals;
        converged &= p.converged;
    }
    QuadResult { value, abs_error, evals, converged }
}

/// Trapezoidal tensor integral of `weight ∘ field` over the field's box.
/// The weight must map `+∞` to a finite value (for `ϱ∘φ` that value is 0).
pub fn integrate_grid(field: &GridField, weight: impl Fn(f64) -> f64) -> f64 {
    let dim = field.dim();
    let shape = field.shape();
    let steps = field.steps();
    let cell: f64 = steps.iter().product();
    let mut total = 0.0;
    let mut idx = vec![0usize; dim];
    for (flat, &v) in field.values().iter().enumerate() {
        field.unflatten(flat, &mut idx);
        let mut w = weight(v);
        for d in 0..dim {
            if idx[d] == 0 || idx[d] + 1 == shape[d] {
                w *= 0.5;
            }
        }
        total += w;
    }
    total * cell
}

/// Gauss–Legendre nodes and weights on `[-1, 1]` by Newton iteration.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Chebyshev-based initial guess
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // evaluate P_n and P_n' by recurrence
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn adaptive_polynomial_exact() {
        let spec = QuadratureSpec::default();
        let r = integrate_adaptive(|x| x * x, 0.0, 1.0, &spec);
        assert_relative_eq!(r.value, 1.0 / 3.0, epsilon = 1e-14);
        assert!(r.converged);
    }

    #[test]
    fn adaptive_kinked_integrand() {
        let spec = QuadratureSpec::adaptive(1e-12);
        let r = integrate_adaptive(|x: f64| (x - 0.3).abs(), 0.0, 1.0, &spec);
        // ∫|x-0.3| over [0,1] = 0.09/2 + 0.49/2
        assert_relative_eq!(r.value, 0.29, epsilon = 1e-10);
    }

    #[test]
    fn semi_infinite_exponential() {
        let spec = QuadratureSpec::default();
        let r = integrate_semi_infinite(|x: f64| (-x).exp(), 0.0, &spec);
        assert_relative_eq!(r.value, 1.0, epsilon = 1e-9);
        assert!(r.converged);
    }

    #[test]
    fn radial_gaussians() {
        let spec = QuadratureSpec::default();
        let g2 = SphereGrid::standard(2, 256).unwrap();
        let r = integrate_radial(|x| (-(x[0] * x[0] + x[1] * x[1])).exp(), &g2, &spec);
        assert_relative_eq!(r.value, std::f64::consts::PI, epsilon = 1e-8);
        let r = integrate_radial(|x| (-(x[0] * x[0] + x[1] * x[1]) / 2.0).exp(), &g2, &spec);
        assert_relative_eq!(r.value, 2.0 * std::f64::consts::PI, epsilon = 1e-8);
    }

    #[test]
    fn radial_ball_indicator_3d() {
        let spec = QuadratureSpec::adaptive(1e-7);
        let g3 = SphereGrid::standard(3, 512).unwrap();
        let r = integrate_radial(
            |x| if x.iter().map(|v| v * v).sum::<f64>() <= 1.0 { 1.0 } else { 0.0 },
            &g3,
            &spec,
        );
        assert_relative_eq!(r.value, 4.0 * std::f64::consts::PI / 3.0, epsilon = 1e-4);
    }

    #[test]
    fn gauss_legendre_degrees() {
        let (x, w) = gauss_legendre(5);
        let int: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(8)).sum();
        assert_relative_eq!(int, 2.0 / 9.0, epsilon = 1e-12); // degree 8 < 2*5-1
        let total: f64 = w.iter().sum();
        assert_relative_eq!(total, 2.0, epsilon = 1e-14);
    }
}
