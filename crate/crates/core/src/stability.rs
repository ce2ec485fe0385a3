//! Stability machinery: deficits, the radius `R(ε)`, L1 fits over
//! `(z, c, ξ, T)`, the exceptional set `Ψ`, the log-concave center-value
//! checker, and the deficit-vs-distance scan harness.
//!
//! Reported `T` is always the quadratic *shape* matrix: the primal fit
//! targets `φ(x) ≈ ½|T(x-z)|² + c`, so the displayed L1 integrand reads
//! `|½|x|² + c - φ(T⁻¹x + z)|` and the functional one
//! `|ϱ(|x|²) - ξ f(T⁻¹x + z)|`. For a quadratic `φ = ½⟨x, Ax⟩` the fit
//! therefore recovers `T = A^{1/2}`.
//!
//! No theorem constant (`η`, `γ`, `ε₀`, …) is asserted numerically: the
//! artifact reports calibrated constants per family and asserts only
//! monotonicity, convergence, and the clean identities.

use std::sync::Arc;

use nalgebra::DVector;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::functional::{
    ball_body, field_mean, fm_center, functional_product, optimal_center_product,
    product_hypothesis_check, reference_integral, rho_ext, Convention, SantaloReport,
};
use crate::geometry::body_measures;
use crate::linalg::{self, spd_log, sym_exp, sym_from_params, sym_to_params, Matrix};
use crate::optim::{nelder_mead, NmOptions};
use crate::quad::{integrate_grid, integrate_semi_infinite, QuadratureSpec, SphereGrid};
use crate::transform::{biconjugate, legendre, BoxDomain, Convexity, GridField};
use crate::weights::{EvenProfile, NormalizedWeight};

/// Deficit floor: keeps `R(ε)` finite when the computed deficit is 0.
pub const EPS_FLOOR: f64 = f64::EPSILON;

/// One row of the `Ψ` measure table.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct PsiRow {
    pub r: f64,
    pub volume: f64,
    /// Part-2 bound expression `η·√ε·R^n` for the caller-supplied `η`.
    pub bound: f64,
    pub within_bound: bool,
}

/// Fitted stability certificate.
#[derive(Clone, Debug, Serialize)]
pub struct StabilityFit {
    pub z: Vec<f64>,
    pub c: f64,
    pub xi: f64,
    /// Quadratic shape matrix (SPD), row-major.
    pub t_matrix: Vec<Vec<f64>>,
    pub eps: f64,
    pub eps_raw: f64,
    pub r_eps: f64,
    pub l1_primal: f64,
    pub l1_dual: f64,
    pub psi_measure: Vec<PsiRow>,
    pub warnings: Vec<String>,
}

fn matrix_rows(m: &Matrix) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|c| m[(r, c)]).collect())
        .collect()
}

/// Solve `ϱ(R²) = ε^{1/(64n²)}` by monotone bisection on `α`.
pub fn radius_r(w: &NormalizedWeight, eps: f64, n: usize) -> Result<f64> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::invalid("eps must lie in (0, 1)"));
    }
    let target = -eps.ln() / (64.0 * (n * n) as f64);
    let sup = w.support_end();
    let mut hi = 1.0f64;
    let hi_cap = if sup.is_finite() { sup * (1.0 - 1e-14) } else { 1e12 };
    while w.alpha(hi) < target {
        if hi >= hi_cap {
            break;
        }
        hi = (hi * 2.0).min(hi_cap);
    }
    if w.alpha(hi) < target {
        // the crossing sits beyond the representable range
        return Err(Error::ROutOfRange);
    }
    let mut lo = 0.0f64;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if w.alpha(mid) >= target {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 1e-15 * hi.max(1.0) {
            break;
        }
    }
    Ok((0.5 * (lo + hi)).sqrt())
}

/// Clamped deficit `max(0, 1 - product/reference)`; the raw value stays in
/// the report.
pub fn deficit(report: &SantaloReport) -> f64 {
    report.deficit_minus.max(0.0)
}

// ---------------------------------------------------------------------------
// L1 integrals over a ball
// ---------------------------------------------------------------------------

/// `∫_{R·B^n} f(x) dx` by cell quadrature: interior cells take the center
/// value, boundary cells are subsampled at `3^dim` points.
pub fn l1_over_ball(
    dim: usize,
    radius: f64,
    cells_per_axis: usize,
    f: &(dyn Fn(&[f64]) -> f64 + Sync),
) -> f64 {
    let m = cells_per_axis.max(4);
    let h = 2.0 * radius / m as f64;
    let cell_vol = h.powi(dim as i32);
    let half_diag = 0.5 * h * (dim as f64).sqrt();
    let sub = 3usize.pow(dim as u32);
    let slabs: Vec<f64> = (0..m)
        .into_par_iter()
        .map(|i0| {
            let mut acc = 0.0;
            let mut idx = vec![0usize; dim];
            idx[0] = i0;
            let mut x = vec![0.0; dim];
            let inner: usize = m.pow(dim as u32 - 1);
            for rest in 0..inner {
                let mut rr = rest;
                for d in (1..dim).rev() {
                    idx[d] = rr % m;
                    rr /= m;
                }
                let mut d2 = 0.0;
                for d in 0..dim {
                    x[d] = -radius + h * (idx[d] as f64 + 0.5);
                    d2 += x[d] * x[d];
                }
                let dist = d2.sqrt();
                if dist + half_diag <= radius {
                    acc += f(&x) * cell_vol;
                } else if dist - half_diag < radius {
                    // boundary cell: 3^dim subsamples at offsets ±h/3, 0
                    let mut sacc = 0.0;
                    let mut pt = vec![0.0; dim];
                    for s in 0..sub {
                        let mut ss = s;
                        let mut p2 = 0.0;
                        for d in 0..dim {
                            let o = (ss % 3) as f64 - 1.0;
                            ss /= 3;
                            pt[d] = x[d] + o * h / 3.0;
                            p2 += pt[d] * pt[d];
                        }
                        if p2.sqrt() <= radius {
                            sacc += f(&pt);
                        }
                    }
                    acc += sacc * cell_vol / sub as f64;
                }
            }
            acc
        })
        .collect();
    slabs.iter().sum()
}

/// Multilinear-interpolation L1 noise floor for grid-sampled integrands
/// over a ball: `(max |Δ²v|/h²) · h̄²/8 · V(R·B^n)`. This is the
/// "quadrature tolerance" scale that equality-manifold fits are compared
/// against.
pub fn grid_l1_noise_floor(field: &GridField, radius: f64) -> f64 {
    let steps = field.steps();
    let h2 = steps.iter().map(|h| h * h).sum::<f64>() / steps.len() as f64;
    let dim = field.dim();
    // curvature estimate from axis second differences
    let mut lam = 0.0f64;
    for axis in 0..dim {
        let len = field.shape()[axis];
        let pre: usize = field.shape()[..axis].iter().product();
        let post: usize = field.shape()[axis + 1..].iter().product();
        for a in 0..pre {
            for c in 0..post {
                let base = a * len * post + c;
                for i in 1..len - 1 {
                    let (v0, v1, v2) = (
                        field.values()[base + (i - 1) * post],
                        field.values()[base + i * post],
                        field.values()[base + (i + 1) * post],
                    );
                    if v0.is_finite() && v1.is_finite() && v2.is_finite() {
                        let s = ((v0 + v2 - 2.0 * v1) / (steps[axis] * steps[axis])).abs();
                        if s > lam {
                            lam = s;
                        }
                    }
                }
            }
        }
    }
    let ball_vol = crate::linalg::unit_ball_volume(dim) * radius.powi(dim as i32);
    lam.max(1.0) * h2 / 8.0 * ball_vol
}

// ---------------------------------------------------------------------------
// Legendre-route fit (convex / measurable φ)
// ---------------------------------------------------------------------------

/// Options for the stability fits.
#[derive(Clone, Copy, Debug)]
pub struct FitOptions {
    pub tol: f64,
    /// Caller-supplied `η` for the part-2 `Ψ` bound report.
    pub eta: f64,
    pub nm_max_iter: usize,
    /// Search for the optimal center (disable for symmetric scan families).
    pub search_center: bool,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions { tol: 1e-6, eta: 1.0, nm_max_iter: 400, search_center: true }
    }
}

/// Reference per-axis second moment `∫|x|²f_ref / (n ∫f_ref)` for
/// `f_ref = ϱ(c|x|²)`.
fn reference_second_moment(w: &NormalizedWeight, n: usize, convention: Convention) -> f64 {
    let c = match convention {
        Convention::HalfSquare => 0.5,
        Convention::Square => 1.0,
    };
    let spec = QuadratureSpec::adaptive(1e-12);
    let num = integrate_semi_infinite(|r: f64| r.powi(n as i32 + 1) * w.rho(c * r * r), 0.0, &spec)
        .value;
    let den = integrate_semi_infinite(|r: f64| r.powi(n as i32 - 1) * w.rho(c * r * r), 0.0, &spec)
        .value;
    num / (n as f64 * den)
}

/// Second-moment matrix of a nonnegative field about `z` (trapezoid).
fn field_second_moment(f: &GridField, z: &[f64]) -> (f64, Matrix) {
    let n = f.dim();
    let shape = f.shape();
    let steps = f.steps();
    let cell: f64 = steps.iter().product();
    let mut mass = 0.0;
    let mut m2 = Matrix::zeros(n, n);
    let mut idx = vec![0usize; n];
    let mut x = vec![0.0; n];
    for (flat, &v) in f.values().iter().enumerate() {
        if !v.is_finite() {
            continue;
        }
        f.unflatten(flat, &mut idx);
        f.node_coords(flat, &mut x);
        let mut wq = v;
        for d in 0..n {
            if idx[d] == 0 || idx[d] + 1 == shape[d] {
                wq *= 0.5;
            }
        }
        mass += wq;
        for r in 0..n {
            for s in 0..n {
                m2[(r, s)] += wq * (x[r] - z[r]) * (x[s] - z[s]);
            }
        }
    }
    (mass * cell, m2 * cell)
}

/// Moment-matched initial shape matrix `T = ((M2/mass)/m_ref)^{-1/2}`.
fn moment_shape_init(
    w: &NormalizedWeight,
    f: &GridField,
    z: &[f64],
    convention: Convention,
) -> Result<Matrix> {
    let n = f.dim();
    let (mass, m2) = field_second_moment(f, z);
    if !(mass > 0.0) {
        return Err(Error::DegeneratePair);
    }
    let mref = reference_second_moment(w, n, convention);
    let scaled = m2 / (mass * mref);
    linalg::sym_map(&scaled, |l| if l > 1e-12 { 1.0 / l.sqrt() } else { f64::NAN })
        .map_err(|_| Error::DegeneratePair)
}

/// Largest `R` such that `T⁻¹(R·B^n) + z` stays inside the primal box
/// and `T(R·B^n) + z` inside the dual box (so both misfit integrands stay
/// on known territory).
fn box_cap_radius(field: &GridField, z: &[f64], t: &Matrix) -> f64 {
    let b = field.box_domain();
    let hw = (0..field.dim())
        .map(|d| (b.max[d] - z[d]).min(z[d] - b.min[d]))
        .fold(f64::INFINITY, f64::min)
        .max(0.0);
    let tinv_norm = linalg::spectral_norm(&t.clone().try_inverse().unwrap_or_else(|| t.clone()));
    let primal = 0.95 * hw / tinv_norm.max(1e-12);
    let dual_hw = crate::transform::auto_dual_half_widths(field, z)
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    let dual = 0.95 * dual_hw / linalg::spectral_norm(t).max(1e-12);
    primal.min(dual)
}

struct LegendreParams {
    n: usize,
    z: Vec<f64>,
    c: f64,
    t: Matrix,
}

fn unpack_legendre(theta: &[f64], n: usize) -> LegendreParams {
    let z = theta[..n].to_vec();
    let c = theta[n];
    let t = sym_exp(&sym_from_params(n, &theta[n + 1..]));
    LegendreParams { n, z, c, t }
}

/// Fit `(z, c, T)` minimizing `∫_{R(ε)B^n} |½|x|² + c - φ(T⁻¹x + z)| dx`.
/// For measurable (not known-convex) fields the integral skips the
/// exceptional set `Ψ` and the `Ψ` measure table is filled.
pub fn stability_fit_legendre(
    w: &NormalizedWeight,
    phi: &GridField,
    opts: &FitOptions,
) -> Result<StabilityFit> {
    let n = phi.dim();
    let mut warnings = Vec::new();
    let f_values: Vec<f64> = phi.values().iter().map(|&v| rho_ext(w, v)).collect();
    let f_field = GridField::new(
        phi.box_domain().clone(),
        phi.shape().to_vec(),
        f_values,
        Convexity::Unknown,
    )?;

    // optimal center: FM-center seed, then product optimization over z
    let mass = integrate_grid(&f_field, |v| v);
    let seed = if opts.search_center {
        let grid = Arc::new(SphereGrid::standard(n, SphereGrid::default_size(n).min(512))?);
        let qspec = QuadratureSpec::adaptive(1e-8);
        match fm_center(&f_field, 1e-4, grid, &qspec) {
            Ok(z) => z,
            Err(Error::NoConvergence { best, .. }) => best,
            Err(_) => field_mean(&f_field, mass),
        }
    } else {
        vec![0.0; n]
    };
    let report = if opts.search_center {
        optimal_center_product(w, phi, Convention::HalfSquare, &seed)?
    } else {
        functional_product(w, phi, &seed, Convention::HalfSquare)?
    };
    let eps_raw = report.deficit_minus;
    let eps = deficit(&report);
    let eps_eff = eps.max(EPS_FLOOR);
    let z0 = report.z.clone();

    // moment-matched initialization
    let t_init = moment_shape_init(w, &f_field, &z0, Convention::HalfSquare)?;
    let c_init = {
        let v = phi.eval(&z0);
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };

    // radius: R(ε), capped by the box (and set to the cap when ε clamps to 0)
    let cap = box_cap_radius(phi, &z0, &t_init);
    let r_solved = radius_r(w, eps_eff, n)?;
    let r_eps = if eps_raw <= 0.0 {
        warnings.push("deficit clamped to zero; R capped at the field box radius".into());
        cap
    } else if r_solved > cap {
        warnings.push("R(eps) exceeds the field box; capped".into());
        cap
    } else {
        r_solved
    };

    // measurable route: lower hull and Ψ threshold
    let measurable = phi.convex_flag() != Convexity::KnownConvex;
    let hull = if measurable { Some(biconjugate(phi, &vec![0.0; n])?) } else { None };
    let threshold = eps_eff.powf(1.0 / (128.0 * (n * n) as f64));

    let penalty = 1e4;
    // integration cells: at least 48 per axis so small fit balls are
    // resolved below the field's own step
    let cells = ((2.0 * r_eps / phi.steps()[0]).ceil() as usize).clamp(48, 96);
    let integrand = |p: &LegendreParams, x: &[f64]| -> f64 {
        let xv = DVector::from_column_slice(x);
        let Some(tinv) = p.t.clone().try_inverse() else { return penalty };
        let y = tinv * xv;
        let mut arg = vec![0.0; p.n];
        for d in 0..p.n {
            arg[d] = y[d] + p.z[d];
        }
        if let Some(h) = &hull {
            let hv = h.eval(&arg);
            let pv = phi.eval(&arg);
            if pv > hv + threshold {
                return 0.0; // Ψ-excluded point (part-2 contract)
            }
        }
        let v = phi.eval(&arg);
        if !v.is_finite() {
            return penalty;
        }
        let q: f64 = 0.5 * x.iter().map(|t| t * t).sum::<f64>();
        (q + p.c - v).abs()
    };
    let b = phi.box_domain().clone();
    let objective = |theta: &[f64]| -> f64 {
        // hard bounds: keep z inside the box, c sane, and the symmetric
        // log of T small enough that T cannot collapse the integrand to a
        // constant (a spurious attractor of the small-ball objective)
        for d in 0..n {
            if theta[d] < b.min[d] || theta[d] > b.max[d] {
                return f64::INFINITY;
            }
        }
        if theta[n].abs() > 1e6 {
            return f64::INFINITY;
        }
        if theta[n + 1..].iter().any(|s| s.abs() > 2.0) {
            return f64::INFINITY;
        }
        let p = unpack_legendre(theta, n);
        let g = |x: &[f64]| integrand(&p, x);
        l1_over_ball(n, r_eps, cells, &g)
    };

    let mut theta0 = Vec::with_capacity(n + 1 + n * (n + 1) / 2);
    theta0.extend_from_slice(&z0);
    theta0.push(c_init);
    let s_init = spd_log(&t_init).map_err(|_| Error::DegeneratePair)?;
    theta0.extend(sym_to_params(&s_init));
    let steps: Vec<f64> = (0..theta0.len())
        .map(|i| if i < n { 0.05 * phi.steps()[i] } else { 0.01 })
        .collect();
    let seed_val = objective(&theta0);
    let nm = nelder_mead(
        |t| objective(t),
        &theta0,
        &steps,
        &NmOptions { max_iter: opts.nm_max_iter, ftol: 1e-13, xtol: 1e-10 },
    );
    // refinement restart with a smaller simplex escapes directional stalls
    let restart_steps: Vec<f64> = steps.iter().map(|s| s / 5.0).collect();
    let nm2 = nelder_mead(
        |t| objective(t),
        &nm.x,
        &restart_steps,
        &NmOptions { max_iter: opts.nm_max_iter, ftol: 1e-13, xtol: 1e-10 },
    );
    let (best_x, best_v) = if nm2.value < nm.value { (nm2.x, nm2.value) } else { (nm.x, nm.value) };
    let (theta, l1_primal) = if best_v <= seed_val {
        (best_x, best_v)
    } else {
        warnings.push("optimizer did not improve on the moment seed".into());
        (theta0, seed_val)
    };
    let p = unpack_legendre(&theta, n);

    // dual misfit with the same parameters: ψ(Tx + z) vs ½|x|² - c
    let psi = legendre(phi, &p.z)?;
    let dual_integrand = |x: &[f64]| -> f64 {
        let xv = DVector::from_column_slice(x);
        let y = &p.t * xv;
        let mut arg = vec![0.0; n];
        for d in 0..n {
            arg[d] = y[d] + p.z[d];
        }
        let v = psi.eval(&arg);
        if !v.is_finite() {
            return penalty;
        }
        let q: f64 = 0.5 * x.iter().map(|t| t * t).sum::<f64>();
        (q - p.c - v).abs()
    };
    let l1_dual = l1_over_ball(n, r_eps, cells, &dual_integrand);

    // Ψ table on the default radius ladder
    let psi_measure = if measurable {
        let radii: Vec<f64> = (1..=4).map(|k| r_eps * k as f64 / 4.0).collect();
        psi_measure_table(phi, hull.as_ref().unwrap(), eps_eff, n, &radii, opts.eta)
    } else {
        Vec::new()
    };

    Ok(StabilityFit {
        z: p.z,
        c: p.c,
        xi: (-p.c).exp(),
        t_matrix: matrix_rows(&p.t),
        eps,
        eps_raw,
        r_eps,
        l1_primal,
        l1_dual,
        psi_measure,
        warnings,
    })
}

// ---------------------------------------------------------------------------
// Functional-route fit (f, g pairs)
// ---------------------------------------------------------------------------

/// Fit `(ξ, T)` minimizing the sum of the two displayed integrals
/// `∫|ϱ(|x|²) - ξ f(T⁻¹x+z)|` and `∫|ϱ(|x|²) - ξ⁻¹ g(Tx+z)|`, both
/// normalized by `∫ r^{n-1} ϱ(r²) dr` in the report.
pub fn stability_fit_functional(
    w: &NormalizedWeight,
    f: &GridField,
    g: &GridField,
    z: &[f64],
    grid: Arc<SphereGrid>,
    opts: &FitOptions,
) -> Result<StabilityFit> {
    let n = f.dim();
    let mut warnings = Vec::new();

    // product hypothesis on a subsampled pair grid
    let margin = {
        let fs = subsample(f, 33);
        let gs = subsample(g, 33);
        product_hypothesis_check(w, &fs, &gs, z)?
    };
    if margin < -1e-6 {
        return Err(Error::precondition(format!(
            "product hypothesis violated (margin {margin:.3e})"
        )));
    }

    // centroid of K_{f,z} at the origin, else recompute z
    let qspec = QuadratureSpec::adaptive(1e-9);
    let mut z = z.to_vec();
    let kf = ball_body(f, &z, grid.clone(), &qspec)?;
    let meas = body_measures(&kf)?;
    let scale = meas.volume.powf(1.0 / n as f64);
    if linalg::norm(&meas.centroid) > opts.tol.max(1e-6) * scale.max(1e-6) {
        z = match fm_center(f, opts.tol.max(1e-6) * scale.max(1e-6), grid.clone(), &qspec) {
            Ok(zz) => zz,
            Err(Error::NoConvergence { best, .. }) => {
                warnings.push("fm_center hit the iteration cap; using best iterate".into());
                best
            }
            Err(e) => return Err(e),
        };
    }

    let int_f = integrate_grid(f, |v| if v.is_finite() { v } else { 0.0 });
    let int_g = integrate_grid(g, |v| if v.is_finite() { v } else { 0.0 });
    if !(int_f > 0.0 && int_g > 0.0) {
        return Err(Error::DegeneratePair);
    }
    let refv = reference_integral(w, n, Convention::Square).powi(2);
    let eps_raw = refv / (int_f * int_g) - 1.0;
    let eps = eps_raw.max(0.0);
    let eps_eff = eps.max(EPS_FLOOR);
    let r_eps = radius_r(w, eps_eff, n)?;

    // initialization: ξ from the center value, T from second moments
    let t_init = moment_shape_init(w, f, &z, Convention::Square)?;
    let f_at_z = f.eval(&z);
    let xi_init = if f_at_z.is_finite() && f_at_z > 0.0 { 1.0 / f_at_z } else { 1.0 };

    let moment = w.moments[n - 1];
    let ref_total = reference_integral(w, n, Convention::Square);
    let l1_pair = |xi: f64, t: &Matrix| -> (f64, f64) {
        let tinv = match t.clone().try_inverse() {
            Some(m) => m,
            None => return (f64::INFINITY, f64::INFINITY),
        };
        let primal = substituted_l1(w, f, &z, xi, t, ref_total);
        let dual = substituted_l1(w, g, &z, 1.0 / xi, &tinv, ref_total);
        (primal / moment, dual / moment)
    };
    let objective = |p: &[f64]| -> f64 {
        if p[0].abs() > 20.0 || p[1..].iter().any(|s| s.abs() > 2.0) {
            return f64::INFINITY;
        }
        let xi = p[0].exp();
        let t = sym_exp(&sym_from_params(n, &p[1..]));
        let (a, b) = l1_pair(xi, &t);
        a + b
    };
    let mut p0 = vec![xi_init.ln()];
    let s_init = spd_log(&t_init).map_err(|_| Error::DegeneratePair)?;
    p0.extend(sym_to_params(&s_init));
    let steps = vec![0.02; p0.len()];
    let seed_val = objective(&p0);
    let nm = nelder_mead(
        |p| objective(p),
        &p0,
        &steps,
        &NmOptions { max_iter: opts.nm_max_iter, ftol: 1e-13, xtol: 1e-10 },
    );
    let best = if nm.value <= seed_val {
        nm.x
    } else {
        warnings.push("optimizer did not improve on the moment seed".into());
        p0
    };
    let xi = best[0].exp();
    let t = sym_exp(&sym_from_params(n, &best[1..]));
    let (l1_primal, l1_dual) = l1_pair(xi, &t);

    Ok(StabilityFit {
        z,
        c: -xi.ln(),
        xi,
        t_matrix: matrix_rows(&t),
        eps,
        eps_raw,
        r_eps,
        l1_primal,
        l1_dual,
        psi_measure: Vec::new(),
        warnings,
    })
}

/// `∫_{R^n} |ϱ(|x|²) - ξ h(M⁻¹(x - ·))| dx` after the substitution
/// `x = M(y - z)`: `det(M)·∫_box |ϱ(|M(y-z)|²) - ξ h(y)| dy` plus the
/// weight mass falling outside the image of the box. Evaluating `h` at
/// its own nodes avoids interpolation bias entirely; the closed-form tail
/// prevents a shrinking `M` from faking a minimum.
fn substituted_l1(
    w: &NormalizedWeight,
    h: &GridField,
    z: &[f64],
    xi: f64,
    m_arg: &Matrix,
    ref_total: f64,
) -> f64 {
    let n = h.dim();
    let det = m_arg.determinant().abs();
    if !(det > 0.0) {
        return f64::INFINITY;
    }
    let shape = h.shape();
    let steps = h.steps();
    let cell: f64 = steps.iter().product();
    let b = h.box_domain();
    let rows: Vec<(f64, f64)> = (0..shape[0])
        .into_par_iter()
        .map(|i0| {
            let post: usize = shape[1..].iter().product();
            let mut idx = vec![0usize; n];
            idx[0] = i0;
            let mut y = vec![0.0; n];
            let mut misfit = 0.0;
            let mut covered = 0.0;
            for rest in 0..post {
                let mut rr = rest;
                for d in (1..n).rev() {
                    idx[d] = rr % shape[d];
                    rr /= shape[d];
                }
                let mut tw = 1.0;
                for d in 0..n {
                    y[d] = b.min[d] + steps[d] * idx[d] as f64;
                    if idx[d] == 0 || idx[d] + 1 == shape[d] {
                        tw *= 0.5;
                    }
                }
                let flat = i0 * post + rest;
                let hv = h.values()[flat];
                let hval = if hv.is_finite() { hv } else { 0.0 };
                let my = m_arg * DVector::from_iterator(n, y.iter().zip(z).map(|(a, b)| a - b));
                let q: f64 = my.iter().map(|v| v * v).sum();
                let rho = w.rho(q);
                misfit += tw * (rho - xi * hval).abs();
                covered += tw * rho;
            }
            (misfit, covered)
        })
        .collect();
    let (misfit, covered) = rows
        .iter()
        .fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    det * cell * misfit + (ref_total - det * cell * covered).max(0.0)
}

fn subsample(f: &GridField, max_per_axis: usize) -> GridField {
    let n = f.dim();
    let shape = f.shape();
    let stride: Vec<usize> = shape.iter().map(|&s| s.div_ceil(max_per_axis).max(1)).collect();
    let new_shape: Vec<usize> = shape
        .iter()
        .zip(&stride)
        .map(|(&s, &st)| s.div_ceil(st))
        .collect();
    if new_shape.iter().any(|&s| s < 4) {
        return f.clone();
    }
    let steps = f.steps();
    let b = f.box_domain();
    let new_max: Vec<f64> = (0..n)
        .map(|d| b.min[d] + steps[d] * (stride[d] * (new_shape[d] - 1)) as f64)
        .collect();
    let total: usize = new_shape.iter().product();
    let mut values = Vec::with_capacity(total);
    let mut idx = vec![0usize; n];
    for flat in 0..total {
        let mut rest = flat;
        for d in (0..n).rev() {
            idx[d] = rest % new_shape[d];
            rest /= new_shape[d];
        }
        let mut src = 0usize;
        for d in 0..n {
            src = src * shape[d] + idx[d] * stride[d];
        }
        values.push(f.values()[src]);
    }
    GridField::new(
        BoxDomain::new(b.min.clone(), new_max).expect("subsampled box"),
        new_shape,
        values,
        Convexity::Unknown,
    )
    .expect("subsampled field")
}

// ---------------------------------------------------------------------------
// Ψ measurement
// ---------------------------------------------------------------------------

/// Grid-cell measure of `Ψ ∩ R·B^n` for each `R`, with the part-2 bound
/// `η √ε R^n` reported alongside.
pub fn psi_measure(
    phi: &GridField,
    eps: f64,
    n: usize,
    r_list: &[f64],
    eta: f64,
) -> Result<Vec<PsiRow>> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::invalid("eps must lie in (0,1)"));
    }
    if phi.dim() != n {
        return Err(Error::invalid("dimension mismatch"));
    }
    let hull = biconjugate(phi, &vec![0.0; n])?;
    Ok(psi_measure_table(phi, &hull, eps, n, r_list, eta))
}

fn psi_measure_table(
    phi: &GridField,
    hull: &GridField,
    eps: f64,
    n: usize,
    r_list: &[f64],
    eta: f64,
) -> Vec<PsiRow> {
    let threshold = eps.powf(1.0 / (128.0 * (n * n) as f64));
    let node_vol: f64 = phi.steps().iter().product();
    let mut x = vec![0.0; n];
    let mut radii: Vec<f64> = r_list.to_vec();
    radii.sort_by(|a, b| a.partial_cmp(b).unwrap());
    // distances of exceedance nodes, one pass
    let mut exceed = Vec::new();
    for (flat, (&pv, &hv)) in phi.values().iter().zip(hull.values()).enumerate() {
        let over = if pv == f64::INFINITY { true } else { pv > hv + threshold };
        if over {
            phi.node_coords(flat, &mut x);
            exceed.push(linalg::norm(&x));
        }
    }
    exceed.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut rows = Vec::with_capacity(radii.len());
    for &r in &radii {
        let count = exceed.partition_point(|&d| d <= r);
        let volume = count as f64 * node_vol;
        let bound = eta * eps.sqrt() * r.powi(n as i32);
        rows.push(PsiRow { r, volume, bound, within_bound: volume <= bound });
    }
    rows
}

// ---------------------------------------------------------------------------
// Log-concave center-value checker
// ---------------------------------------------------------------------------

/// Report of the center-value closeness check for log-concave `h` against
/// an even profile `ω`.
#[derive(Clone, Debug, Serialize)]
pub struct Prop31Report {
    /// Computed hypothesis ratio `∫|r|^{n-1}|h-ω| / ∫|r|^{n-1}ω`.
    pub eps_hyp: f64,
    /// `|h(0) - ω(0)|`.
    pub lhs: f64,
    /// `250 n ε^{1/(n+1)} ω(0)` with `ε = eps_hyp`.
    pub rhs: f64,
    pub pass: bool,
    /// Whether `eps_in` sits inside the proposition's validity range
    /// `(0, (250n)^{-(n+1)})`; reported, not enforced.
    pub within_prop_range: bool,
}

/// Verify `|h(0) - ω(0)| ≤ 250 n ε^{1/(n+1)} ω(0)` under the weighted-L1
/// hypothesis, using the computed ratio as `ε` (the sharpest valid choice).
/// Errors when the hypothesis integral exceeds `eps_in`.
pub fn logconcave_center_check(
    h: &(dyn Fn(f64) -> f64 + Sync),
    omega: &EvenProfile,
    n: usize,
    eps_in: f64,
    spec: &QuadratureSpec,
) -> Result<Prop31Report> {
    if !(eps_in > 0.0) {
        return Err(Error::invalid("eps_in must be positive"));
    }
    let den = omega.moment(n);
    let weighted_diff = |r: f64| r.abs().powi(n as i32 - 1) * (h(r) - omega.omega(r)).abs();
    // symmetric range: profile support plus a scan for where h dies
    let mut hi = omega.support_radius();
    if !hi.is_finite() {
        hi = 48.0;
    }
    let mut probe = hi;
    for _ in 0..40 {
        if h(probe) + h(-probe) < 1e-14 {
            break;
        }
        probe *= 1.5;
    }
    hi = hi.max(probe);
    let num_pos = crate::quad::integrate_adaptive(&weighted_diff, 0.0, hi, spec).value;
    let num_neg = crate::quad::integrate_adaptive(&weighted_diff, -hi, 0.0, spec).value;
    let eps_hyp = (num_pos + num_neg) / den;
    if !eps_hyp.is_finite() || eps_hyp > eps_in {
        return Err(Error::HypothesisViolated);
    }
    let omega0 = omega.omega(0.0);
    let lhs = (h(0.0) - omega0).abs();
    let rhs = 250.0 * n as f64 * eps_hyp.powf(1.0 / (n as f64 + 1.0)) * omega0;
    Ok(Prop31Report {
        eps_hyp,
        lhs,
        rhs,
        pass: lhs <= rhs * (1.0 + 1e-12) + 1e-300,
        within_prop_range: eps_in < (250.0 * n as f64).powi(-(n as i32 + 1)),
    })
}

// ---------------------------------------------------------------------------
// Scan harness
// ---------------------------------------------------------------------------

/// Built-in perturbation families for deficit-vs-distance scans.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScanFamily {
    /// `φ_δ = |x|²/2` on `|x| ≤ |log δ|`, `+∞` outside.
    TruncatedQuadratic,
    /// `φ_δ = |x|²/2 + δ·exp(-|x|²/(2σ²))` with σ = 1/5: the perturbation
    /// sits inside the fit ball `R(ε)B^n`.
    Bump,
    /// `φ_δ = ½⟨x, (I+δS)x⟩`: inside the equality manifold.
    Quadratic,
}

impl ScanFamily {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "truncated-quadratic" => Ok(ScanFamily::TruncatedQuadratic),
            "bump" => Ok(ScanFamily::Bump),
            "quadratic" => Ok(ScanFamily::Quadratic),
            _ => Err(Error::invalid(format!("unknown scan family '{s}'"))),
        }
    }

    pub fn id(&self) -> &'static str {
        match self {
            ScanFamily::TruncatedQuadratic => "truncated-quadratic",
            ScanFamily::Bump => "bump",
            ScanFamily::Quadratic => "quadratic",
        }
    }

    /// Default δ ladder, descending from the roughest perturbation. The
    /// bump ladder sits below δ = e⁻³, where the distance `δ·|log δ|³`
    /// scaling over the growing ball `R(ε)B^n` is already decreasing.
    pub fn default_deltas(&self, steps: usize) -> Vec<f64> {
        let (base, ratio): (f64, f64) = match self {
            ScanFamily::TruncatedQuadratic => (0.2, 0.65),
            ScanFamily::Bump => (0.048, 0.75),
            ScanFamily::Quadratic => (0.4, 0.5),
        };
        (0..steps).map(|k| base * ratio.powi(k as i32)).collect()
    }

    pub fn build_field(
        &self,
        n: usize,
        delta: f64,
        box_half: f64,
        shape: usize,
    ) -> Result<GridField> {
        let b = BoxDomain::cube(n, box_half);
        let shape = vec![shape; n];
        match self {
            ScanFamily::TruncatedQuadratic => {
                let radius = delta.ln().abs();
                let mut field = GridField::from_fn(
                    b,
                    shape,
                    |x| {
                        let r2: f64 = x.iter().map(|v| v * v).sum();
                        if r2.sqrt() <= radius {
                            0.5 * r2
                        } else {
                            f64::INFINITY
                        }
                    },
                    Convexity::Unknown,
                )?;
                field.classify_convexity();
                Ok(field)
            }
            ScanFamily::Bump => {
                let sigma = 0.2;
                let mut field = GridField::from_fn(
                    b,
                    shape,
                    |x| {
                        let r2: f64 = x.iter().map(|v| v * v).sum();
                        0.5 * r2 + delta * (-r2 / (2.0 * sigma * sigma)).exp()
                    },
                    Convexity::Unknown,
                )?;
                field.classify_convexity();
                Ok(field)
            }
            ScanFamily::Quadratic => GridField::from_fn(
                b,
                shape,
                |x| {
                    // S = diag(+1, -1, +1, ...) pattern
                    let mut q = 0.0;
                    for (d, v) in x.iter().enumerate() {
                        let s = if d % 2 == 0 { 1.0 } else { -1.0 };
                        q += 0.5 * (1.0 + delta * s) * v * v;
                    }
                    q
                },
                Convexity::KnownConvex,
            ),
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ScanPoint {
    pub delta: f64,
    pub eps: f64,
    pub r_eps: f64,
    pub l1_primal: f64,
    pub l1_dual: f64,
    /// L1 measurement floor of the grid over the fit ball; distances at or
    /// below it are zero at measurement resolution.
    pub l1_floor: f64,
    /// Two-point slope of `log d` vs `log ε` against the previous point.
    pub exponent_running: Option<f64>,
}

impl ScanPoint {
    /// Distance with sub-floor values snapped to exact zero.
    pub fn l1_resolved(&self) -> f64 {
        if self.l1_primal <= self.l1_floor {
            0.0
        } else {
            self.l1_primal
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanCurve {
    pub family_id: String,
    pub points: Vec<ScanPoint>,
    pub fitted_exponent: f64,
    pub fitted_constant: f64,
    pub eps_monotone: bool,
    pub d_monotone: bool,
    /// Set when the family never leaves the equality manifold (ε ≈ 0).
    pub degenerate: bool,
}

/// Scan a perturbation family: per δ compute the deficit and the fitted L1
/// distance, then fit `log d ≈ a·log ε + log C`.
pub fn stability_scan(
    w: &NormalizedWeight,
    family: ScanFamily,
    n: usize,
    deltas: &[f64],
    box_half: f64,
    shape: usize,
) -> Result<ScanCurve> {
    let mut deltas = deltas.to_vec();
    deltas.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let opts = FitOptions { search_center: false, nm_max_iter: 600, ..Default::default() };
    let mut points = Vec::with_capacity(deltas.len());
    for &delta in &deltas {
        let phi = family.build_field(n, delta, box_half, shape)?;
        let fit = stability_fit_legendre(w, &phi, &opts)?;
        points.push(ScanPoint {
            delta,
            eps: fit.eps,
            r_eps: fit.r_eps,
            l1_primal: fit.l1_primal,
            l1_dual: fit.l1_dual,
            l1_floor: grid_l1_noise_floor(&phi, fit.r_eps),
            exponent_running: None,
        });
    }
    for k in 1..points.len() {
        let (e0, e1) = (points[k - 1].eps, points[k].eps);
        let (d0, d1) = (points[k - 1].l1_resolved(), points[k].l1_resolved());
        if e0 > 0.0 && e1 > 0.0 && d0 > 0.0 && d1 > 0.0 && e0 != e1 {
            points[k].exponent_running = Some((d1.ln() - d0.ln()) / (e1.ln() - e0.ln()));
        }
    }
    let eps_monotone = points.windows(2).all(|p| p[0].eps <= p[1].eps + 1e-12);
    let d_monotone = points
        .windows(2)
        .all(|p| p[0].l1_resolved() <= p[1].l1_resolved() + 1e-12);
    let live: Vec<&ScanPoint> = points
        .iter()
        .filter(|p| p.eps > 1e-14 && p.l1_resolved() > 0.0)
        .collect();
    let degenerate = live.len() < 2;
    let (a, logc) = if degenerate {
        (0.0, 0.0)
    } else {
        let m = live.len() as f64;
        let sx: f64 = live.iter().map(|p| p.eps.ln()).sum();
        let sy: f64 = live.iter().map(|p| p.l1_resolved().ln()).sum();
        let sxx: f64 = live.iter().map(|p| p.eps.ln().powi(2)).sum();
        let sxy: f64 = live.iter().map(|p| p.eps.ln() * p.l1_resolved().ln()).sum();
        let denom = m * sxx - sx * sx;
        if denom.abs() < 1e-12 {
            (0.0, 0.0)
        } else {
            let a = (m * sxy - sx * sy) / denom;
            (a, (sy - a * sx) / m)
        }
    };
    Ok(ScanCurve {
        family_id: family.id().to_string(),
        points,
        fitted_exponent: a,
        fitted_constant: logc.exp(),
        eps_monotone,
        d_monotone,
        degenerate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::{validate_weight, WeightSpec};
    use approx::assert_relative_eq;

    fn exp_weight() -> NormalizedWeight {
        validate_weight(&WeightSpec::Exp { rate: 1.0 }).unwrap()
    }

    #[test]
    fn radius_closed_forms() {
        let w = exp_weight();
        // e^{-R²} = ε^{1/256} → R² = |log ε|/256
        let r = radius_r(&w, 1e-8, 2).unwrap();
        assert_relative_eq!(r, ((1e-8f64).ln().abs() / 256.0).sqrt(), epsilon = 1e-10);
        assert_relative_eq!(r, 0.2683, epsilon = 1e-3);
        // n = 1, ε = e^{-64} → R = 1
        let r1 = radius_r(&w, (-64.0f64).exp(), 1).unwrap();
        assert_relative_eq!(r1, 1.0, epsilon = 1e-9);
        // monotone to +∞ as ε → 0
        let mut prev = 0.0;
        for k in 1..12 {
            let eps = 10f64.powi(-2 * k);
            let r = radius_r(&w, eps, 2).unwrap();
            assert!(r > prev);
            prev = r;
        }
    }

    #[test]
    fn radius_rejects_bad_eps() {
        let w = exp_weight();
        assert!(radius_r(&w, 0.0, 2).is_err());
        assert!(radius_r(&w, 1.5, 2).is_err());
    }

    #[test]
    fn l1_ball_volume_sanity() {
        // ∫_{2B²} 1 = 4π
        let one = |_: &[f64]| 1.0;
        let v = l1_over_ball(2, 2.0, 64, &one);
        assert_relative_eq!(v, 4.0 * std::f64::consts::PI, max_relative = 1e-3);
        // odd integrand integrates to ~0
        let odd = |x: &[f64]| x[0];
        assert!(l1_over_ball(2, 2.0, 64, &odd).abs() < 1e-12);
    }

    #[test]
    fn psi_empty_for_convex_fields() {
        let phi = GridField::from_fn(
            BoxDomain::cube(2, 4.0),
            vec![65, 65],
            |x| 0.5 * (x[0] * x[0] + x[1] * x[1]),
            Convexity::KnownConvex,
        )
        .unwrap();
        let rows = psi_measure(&phi, 1e-6, 2, &[1.0, 2.0, 3.0], 1.0).unwrap();
        for row in rows {
            assert_eq!(row.volume, 0.0);
        }
    }

    #[test]
    fn psi_threshold_semantics() {
        // perturbation below the threshold leaves Ψ empty
        let n = 2usize;
        let eps = 1e-4f64;
        let thr = eps.powf(1.0 / (128.0 * (n * n) as f64));
        let phi = GridField::from_fn(
            BoxDomain::cube(2, 4.0),
            vec![65, 65],
            |x| {
                let base = 0.5 * (x[0] * x[0] + x[1] * x[1]);
                if x[0].abs() < 1.0 && x[1].abs() < 1.0 {
                    base + thr / 2.0
                } else {
                    base
                }
            },
            Convexity::Unknown,
        )
        .unwrap();
        let rows = psi_measure(&phi, eps, 2, &[2.0], 1.0).unwrap();
        assert_eq!(rows[0].volume, 0.0, "sub-threshold bump must not enter Psi");
    }

    #[test]
    fn prop31_identity_and_violations() {
        let omega = crate::weights::even_profile(&crate::weights::ProfileSpec::Gauss).unwrap();
        let spec = QuadratureSpec::adaptive(1e-11);
        let h = |r: f64| omega.omega(r);
        let rep = logconcave_center_check(&h, &omega, 2, 1e-4, &spec).unwrap();
        assert!(rep.eps_hyp < 1e-10);
        assert_eq!(rep.lhs, 0.0);
        assert!(rep.pass);
        // hypothesis violation detected
        let far = |r: f64| 2.0 * omega.omega(r);
        assert!(matches!(
            logconcave_center_check(&far, &omega, 2, 1e-4, &spec),
            Err(Error::HypothesisViolated)
        ));
    }

    #[test]
    fn prop31_shifted_profile() {
        let omega = crate::weights::even_profile(&crate::weights::ProfileSpec::Gauss).unwrap();
        let spec = QuadratureSpec::adaptive(1e-11);
        for delta in [1e-3, 1e-4, 1e-5] {
            let om = omega.clone();
            let h = move |r: f64| om.omega(r - delta);
            let rep = logconcave_center_check(&h, &omega, 1, 1e-2, &spec).unwrap();
            assert!(rep.pass, "bound fails at delta={delta}: {rep:?}");
        }
    }

    #[test]
    fn legendre_fit_recovers_exact_quadratic() {
        let w = exp_weight();
        let phi = GridField::from_fn(
            BoxDomain::cube(2, 8.0),
            vec![129, 129],
            |x| 0.5 * (x[0] * x[0] + x[1] * x[1]),
            Convexity::KnownConvex,
        )
        .unwrap();
        let fit = stability_fit_legendre(&w, &phi, &FitOptions::default()).unwrap();
        assert!(linalg::norm(&fit.z) < 1e-3, "z = {:?}", fit.z);
        assert!(fit.c.abs() < 1e-2, "c = {}", fit.c);
        let t = Matrix::from_row_slice(
            2,
            2,
            &[
                fit.t_matrix[0][0],
                fit.t_matrix[0][1],
                fit.t_matrix[1][0],
                fit.t_matrix[1][1],
            ],
        );
        let dev = linalg::spectral_norm(&(t - Matrix::identity(2, 2)));
        assert!(dev < 1e-3, "T deviates from identity by {dev}");
        let floor = grid_l1_noise_floor(&phi, fit.r_eps);
        assert!(fit.l1_primal <= 10.0 * floor, "l1 {} floor {}", fit.l1_primal, floor);
    }

    #[test]
    fn scan_quadratic_family_is_degenerate() {
        let w = exp_weight();
        let curve =
            stability_scan(&w, ScanFamily::Quadratic, 2, &[0.4, 0.2, 0.1], 8.0, 65).unwrap();
        assert!(curve.degenerate, "equality family should be flagged");
        for p in &curve.points {
            assert!(p.eps < 1e-6, "eps {}", p.eps);
        }
    }
}
