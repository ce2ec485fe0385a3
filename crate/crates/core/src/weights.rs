//! Log-concave non-increasing weights `ϱ` and even profiles `ω`.
//!
//! Weights are stored post-normalization: `ϱ(0) = 1` and `∫_{R+} ϱ = 1`
//! (raw inputs are rescaled via `ϱ(t) → ν ϱ(λ² t)`). The exponent
//! `α = −log ϱ` is the primary representation: for sampled inputs it is
//! monotone-convex piecewise linear, which keeps log-concavity exact under
//! interpolation. Extrapolation past the last sample uses the last slope;
//! at a finite support endpoint `α` jumps to `+∞` and all integrals
//! truncate there.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{integrate_adaptive, integrate_semi_infinite, QuadratureSpec};

/// Normalization / validation tolerance for weights and profiles.
pub const WEIGHT_TOL: f64 = 1e-9;

/// Raw weight description, as accepted on the wire.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightSpec {
    /// `ϱ(t) = e^{-rate·t}`.
    Exp {
        #[serde(default = "one")]
        rate: f64,
    },
    /// `ϱ(t) = (1 - slope·t)₊`.
    Linear { slope: f64 },
    /// `ϱ(t) = exp(-(t + t^p))` before normalization, `p ≥ 1`.
    GaussPower { p: f64 },
    /// Samples of `ϱ` at increasing `t` starting from `t = 0`.
    Sampled { t: Vec<f64>, rho: Vec<f64> },
}

fn one() -> f64 {
    1.0
}

/// Canonical (normalized) weight form.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "kebab-case")]
pub enum WeightKind {
    /// `ϱ(t) = e^{-t}`, the fixed point of normalization.
    Exp,
    /// `ϱ(t) = (1 - t/2)₊`; every linear cutoff normalizes to this.
    LinearCutoff,
    /// `α(t) = λ²t + (λ²t)^p`.
    GaussianPower { p: f64, lam2: f64 },
    /// Piecewise-linear convex `α` on `[0, support)`.
    Sampled {
        ts: Vec<f64>,
        alphas: Vec<f64>,
        last_slope: f64,
        support_end: Option<f64>,
    },
}

/// A validated, normalized log-concave non-increasing weight.
#[derive(Clone, Debug, Serialize)]
pub struct NormalizedWeight {
    pub kind: WeightKind,
    /// Right-derivative `α'(0) ∈ (0, 1]`.
    pub alpha_prime_0: f64,
    /// Crossing point vs `e^{-t}` (set to 1 in the degenerate `ϱ = e^{-t}` case).
    pub t0: f64,
    /// `∫_{R+} r^{n-1} ϱ(r²) dr` for `n = 1..4`.
    pub moments: [f64; 4],
    /// False when `α` has a flat piece (ties flagged, not rejected).
    pub strictly_decreasing: bool,
}

const GAMMA_HALF_BOUNDS: [f64; 4] = [
    0.886226925452758,  // Γ(1/2)/2 = √π/2
    0.5,                // Γ(1)/2
    0.443113462726379,  // Γ(3/2)/2 = √π/4
    0.5,                // Γ(2)/2
];

impl NormalizedWeight {
    /// `α(t) = -log ϱ(t)` for `t ≥ 0`; `+∞` past the support endpoint.
    pub fn alpha(&self, t: f64) -> f64 {
        debug_assert!(t >= 0.0);
        match &self.kind {
            WeightKind::Exp => t,
            WeightKind::LinearCutoff => {
                if t >= 2.0 {
                    f64::INFINITY
                } else {
                    -(1.0 - t / 2.0).ln()
                }
            }
            WeightKind::GaussianPower { p, lam2 } => {
                let s = lam2 * t;
                s + s.powf(*p)
            }
            WeightKind::Sampled { ts, alphas, last_slope, support_end } => {
                if let Some(end) = support_end {
                    if t >= *end {
                        return f64::INFINITY;
                    }
                }
                piecewise_linear(ts, alphas, *last_slope, t)
            }
        }
    }

    pub fn rho(&self, t: f64) -> f64 {
        let a = self.alpha(t);
        if a.is_infinite() {
            0.0
        } else {
            (-a).exp()
        }
    }

    /// End of the support of `ϱ` (`∞` for positive weights).
    pub fn support_end(&self) -> f64 {
        match &self.kind {
            WeightKind::LinearCutoff => 2.0,
            WeightKind::Sampled { support_end: Some(e), .. } => *e,
            _ => f64::INFINITY,
        }
    }

    /// `∫_{R+} r^{n-1} ϱ(r²) dr`, `n` in 1..=4.
    pub fn moment(&self, n: usize) -> Result<f64> {
        if !(1..=4).contains(&n) {
            return Err(Error::invalid("moment order must be in 1..4"));
        }
        Ok(self.moments[n - 1])
    }

    /// Extend to the whole line per the `α_*` construction.
    pub fn alpha_star_extend(&self) -> ExtendedWeight {
        ExtendedWeight { base: self.clone() }
    }
}

fn piecewise_linear(ts: &[f64], vs: &[f64], last_slope: f64, t: f64) -> f64 {
    let n = ts.len();
    if t >= ts[n - 1] {
        return vs[n - 1] + last_slope * (t - ts[n - 1]);
    }
    // grids are short; binary search keeps this O(log n)
    let mut lo = 0usize;
    let mut hi = n - 1;
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if ts[mid] <= t {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let w = (t - ts[lo]) / (ts[hi] - ts[lo]);
    vs[lo] + w * (vs[hi] - vs[lo])
}

/// `α_*` extension of a weight to all of `R`: `α(t)` for `t ≥ 0`,
/// `α'(0)·t` for `t ≤ 0`. Convex with `α_*' ≥ α'(0)` everywhere.
#[derive(Clone, Debug)]
pub struct ExtendedWeight {
    pub base: NormalizedWeight,
}

impl ExtendedWeight {
    pub fn alpha_star(&self, t: f64) -> f64 {
        if t >= 0.0 {
            self.base.alpha(t)
        } else {
            self.base.alpha_prime_0 * t
        }
    }

    pub fn rho_star(&self, t: f64) -> f64 {
        let a = self.alpha_star(t);
        if a.is_infinite() {
            0.0
        } else {
            (-a).exp()
        }
    }
}

/// Validate, normalize, and analyze a raw weight description.
pub fn validate_weight(spec: &WeightSpec) -> Result<NormalizedWeight> {
    let kind = normalize(spec)?;
    finish(kind)
}

fn normalize(spec: &WeightSpec) -> Result<WeightKind> {
    match spec {
        WeightSpec::Exp { rate } => {
            if *rate < 0.0 {
                return Err(Error::NotNonIncreasing);
            }
            if *rate == 0.0 {
                return Err(Error::NotIntegrable);
            }
            Ok(WeightKind::Exp)
        }
        WeightSpec::Linear { slope } => {
            if *slope < 0.0 {
                return Err(Error::NotNonIncreasing);
            }
            if *slope == 0.0 {
                return Err(Error::NotIntegrable);
            }
            Ok(WeightKind::LinearCutoff)
        }
        WeightSpec::GaussPower { p } => {
            if *p < 1.0 {
                return Err(Error::NotLogConcave);
            }
            // I = ∫ exp(-(t + t^p)) dt, w0 = 1, λ² = I
            let q = QuadratureSpec::adaptive(1e-13);
            let i = integrate_semi_infinite(|t: f64| (-(t + t.powf(*p))).exp(), 0.0, &q).value;
            Ok(WeightKind::GaussianPower { p: *p, lam2: i })
        }
        WeightSpec::Sampled { t, rho } => normalize_sampled(t, rho),
    }
}

fn normalize_sampled(t: &[f64], rho: &[f64]) -> Result<WeightKind> {
    if t.len() != rho.len() || t.len() < 2 {
        return Err(Error::invalid("sampled weight needs matching t/rho with >= 2 samples"));
    }
    if t[0] != 0.0 {
        return Err(Error::invalid("sampled weight must start at t = 0"));
    }
    if t.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("sample points must be strictly increasing"));
    }
    if rho.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::invalid("rho samples must be finite and nonnegative"));
    }
    let w0 = rho[0];
    if w0 <= 0.0 {
        return Err(Error::invalid("rho(0) must be positive"));
    }
    // split off the zero tail (support endpoint)
    let first_zero = rho.iter().position(|&v| v == 0.0);
    if let Some(k) = first_zero {
        if rho[k..].iter().any(|&v| v != 0.0) {
            return Err(Error::NotNonIncreasing);
        }
    }
    let live = first_zero.unwrap_or(rho.len());
    if live < 2 {
        return Err(Error::invalid("weight vanishes immediately"));
    }
    let raw_alpha: Vec<f64> = rho[..live].iter().map(|&v| -(v / w0).ln()).collect();
    let raw_t = &t[..live];

    // monotone: first differences of α ≥ -1e-12
    for w in raw_alpha.windows(2) {
        if w[1] - w[0] < -1e-12 {
            return Err(Error::NotNonIncreasing);
        }
    }
    // convex: slopes nondecreasing within 1e-9 (exact for the PL representation)
    let slopes: Vec<f64> = raw_t
        .windows(2)
        .zip(raw_alpha.windows(2))
        .map(|(tw, aw)| (aw[1] - aw[0]) / (tw[1] - tw[0]))
        .collect();
    for w in slopes.windows(2) {
        if w[1] - w[0] < -WEIGHT_TOL {
            return Err(Error::NotLogConcave);
        }
    }
    let support_end_raw = first_zero.map(|k| t[k]);
    let last_slope = *slopes.last().unwrap();
    if support_end_raw.is_none() && last_slope <= 0.0 {
        return Err(Error::NotIntegrable);
    }

    // exact integral of the piecewise-exponential ν·ϱ_raw
    let mut integral = 0.0;
    for i in 0..live - 1 {
        let a = raw_alpha[i];
        let b = slopes[i];
        let dt = raw_t[i + 1] - raw_t[i];
        integral += if b.abs() < 1e-14 {
            (-a).exp() * dt
        } else {
            (-a).exp() * (1.0 - (-b * dt).exp()) / b
        };
    }
    if let Some(end) = support_end_raw {
        // the stored form extrapolates α by the last slope up to the
        // support endpoint, then jumps to +∞; integrate exactly that
        let a = raw_alpha[live - 1];
        let dt = end - raw_t[live - 1];
        if dt > 0.0 {
            integral += if last_slope.abs() < 1e-14 {
                (-a).exp() * dt
            } else {
                (-a).exp() * (1.0 - (-last_slope * dt).exp()) / last_slope
            };
        }
    } else {
        integral += (-raw_alpha[live - 1]).exp() / last_slope;
    }
    if !(integral.is_finite() && integral > 0.0) {
        return Err(Error::NotIntegrable);
    }
    let lam2 = integral / 1.0; // ν = 1/w0 already folded into raw_alpha

    let ts: Vec<f64> = raw_t.iter().map(|v| v / lam2).collect();
    Ok(WeightKind::Sampled {
        ts,
        alphas: raw_alpha,
        last_slope: last_slope * lam2,
        support_end: support_end_raw.map(|e| e / lam2),
    })
}

fn finish(kind: WeightKind) -> Result<NormalizedWeight> {
    let mut w = NormalizedWeight {
        kind,
        alpha_prime_0: 0.0,
        t0: 0.0,
        moments: [0.0; 4],
        strictly_decreasing: true,
    };
    w.alpha_prime_0 = match &w.kind {
        WeightKind::Exp => 1.0,
        WeightKind::LinearCutoff => 0.5,
        WeightKind::GaussianPower { p, lam2 } => {
            if (*p - 1.0).abs() < 1e-14 {
                2.0 * lam2
            } else {
                *lam2
            }
        }
        WeightKind::Sampled { ts, alphas, .. } => (alphas[1] - alphas[0]) / (ts[1] - ts[0]),
    };
    if !(w.alpha_prime_0 > 0.0) {
        return Err(Error::invalid("alpha'(0) must be positive after normalization"));
    }
    if w.alpha_prime_0 > 1.0 + 1e-9 {
        return Err(Error::invalid("alpha'(0) exceeds 1 after normalization"));
    }
    w.strictly_decreasing = match &w.kind {
        WeightKind::Sampled { ts, alphas, .. } => ts
            .windows(2)
            .zip(alphas.windows(2))
            .all(|(tw, aw)| (aw[1] - aw[0]) / (tw[1] - tw[0]) > 1e-12),
        _ => true,
    };
    w.t0 = crossing_point(|t| w.alpha(t), 1.0, w.support_end());
    for n in 1..=4 {
        let m = weight_radial_moment(&w, n);
        // the Γ(n/2)/2 bound follows from the single crossing vs e^{-t}
        // only for n ≥ 2 (at n = 2 it is an identity, = 1/2); the n = 1
        // moment can legitimately exceed it, e.g. for the linear cutoff
        if n >= 2 && m > GAMMA_HALF_BOUNDS[n - 1] + WEIGHT_TOL {
            return Err(Error::invalid(format!(
                "moment {n} exceeds Gamma(n/2)/2 bound: {m} > {}",
                GAMMA_HALF_BOUNDS[n - 1]
            )));
        }
        w.moments[n - 1] = m;
    }
    // normalization self-check
    let q = QuadratureSpec::adaptive(1e-12);
    let total = if w.support_end().is_finite() {
        integrate_adaptive(|t| w.rho(t), 0.0, w.support_end(), &q).value
    } else {
        integrate_semi_infinite(|t| w.rho(t), 0.0, &q).value
    };
    if (total - 1.0).abs() > 1e-6 {
        return Err(Error::invalid(format!("normalization failed: integral {total}")));
    }
    if (w.rho(0.0) - 1.0).abs() > WEIGHT_TOL {
        return Err(Error::invalid("normalization failed: rho(0) != 1"));
    }
    Ok(w)
}

/// `∫_{R+} r^{n-1} ϱ(r²) dr` by adaptive quadrature with support truncation.
pub fn weight_radial_moment(w: &NormalizedWeight, n: usize) -> f64 {
    let q = QuadratureSpec::adaptive(1e-12);
    let f = |r: f64| r.powi(n as i32 - 1) * w.rho(r * r);
    let end = w.support_end();
    if end.is_finite() {
        integrate_adaptive(f, 0.0, end.sqrt(), &q).value
    } else {
        integrate_semi_infinite(f, 0.0, &q).value
    }
}

/// Unique positive crossing of `α(t) = slope·t` (i.e. `ϱ` vs `e^{-slope·t}`),
/// with the degenerate case mapped to `fallback... ` — the caller's
/// convention value is `1.0` for weights and `0.5` for even profiles.
fn crossing_point(alpha: impl Fn(f64) -> f64, slope: f64, support_end: f64) -> f64 {
    let degenerate = match slope {
        s if s == 1.0 => 1.0,
        _ => 0.5,
    };
    let d = |t: f64| {
        let a = alpha(t);
        if a.is_infinite() {
            f64::INFINITY
        } else {
            a - slope * t
        }
    };
    // d is convex with d(0) = 0: scan for the bracket [last negative, first positive]
    let t_hi = if support_end.is_finite() { support_end } else { 1e6 };
    let mut last_neg: Option<f64> = None;
    let mut bracket: Option<(f64, f64)> = None;
    let mut t = (t_hi / 1e7).max(1e-6);
    let mut prev = t / 2.0;
    while t <= t_hi * (1.0 + 1e-12) {
        let v = d(t);
        if v < -1e-13 {
            last_neg = Some(t);
        } else if v > 1e-13 {
            if let Some(a) = last_neg {
                bracket = Some((a, t));
            } else {
                bracket = Some((prev, t));
            }
            break;
        }
        prev = t;
        t *= 1.5;
        if t > t_hi && prev < t_hi {
            t = t_hi;
        }
    }
    let Some((mut lo, mut hi)) = bracket else {
        return degenerate;
    };
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if d(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo < 1e-13 * hi.max(1.0) {
            break;
        }
    }
    0.5 * (lo + hi)
}

// ---------------------------------------------------------------------------
// Even profiles ω
// ---------------------------------------------------------------------------

/// Raw even-profile description.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProfileSpec {
    /// `ω(r) = e^{-2|r|}`.
    Exp2,
    /// `ω(r) = e^{-πr²}` (the Gaussian satisfying both constraints).
    Gauss,
    /// `ω(r) = (1 - |r|)₊`.
    Triangle,
    /// Samples of ω at increasing `r ≥ 0` starting from 0; extended evenly.
    Sampled { r: Vec<f64>, omega: Vec<f64> },
}

/// Canonical even-profile form (exponent of `ω` as a function of `|r|`).
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "kebab-case")]
pub enum ProfileKind {
    /// `ω = e^{-2|r|}`.
    Exp2,
    /// `ω = e^{-πr²}`.
    Gauss,
    /// `ω = (1 - |r|)₊`.
    Triangle,
    /// Piecewise-linear convex exponent in `|r|`.
    Sampled {
        rs: Vec<f64>,
        alphas: Vec<f64>,
        last_slope: f64,
        support_end: Option<f64>,
    },
}

/// A validated even log-concave profile with `ω(0) = 1`, `∫_R ω = 1`.
#[derive(Clone, Debug, Serialize)]
pub struct EvenProfile {
    pub kind: ProfileKind,
    /// Crossing radius vs `e^{-2|r|}` (1/2 in the degenerate case).
    pub r0: f64,
}

impl EvenProfile {
    pub fn omega(&self, r: f64) -> f64 {
        let a = self.alpha_abs(r.abs());
        if a.is_infinite() {
            0.0
        } else {
            (-a).exp()
        }
    }

    fn alpha_abs(&self, r: f64) -> f64 {
        match &self.kind {
            ProfileKind::Exp2 => 2.0 * r,
            ProfileKind::Gauss => std::f64::consts::PI * r * r,
            ProfileKind::Triangle => {
                if r >= 1.0 {
                    f64::INFINITY
                } else {
                    -(1.0 - r).ln()
                }
            }
            ProfileKind::Sampled { rs, alphas, last_slope, support_end } => {
                if let Some(end) = support_end {
                    if r >= *end {
                        return f64::INFINITY;
                    }
                }
                piecewise_linear(rs, alphas, *last_slope, r)
            }
        }
    }

    pub fn support_radius(&self) -> f64 {
        match &self.kind {
            ProfileKind::Triangle => 1.0,
            ProfileKind::Sampled { support_end: Some(e), .. } => *e,
            _ => f64::INFINITY,
        }
    }

    /// `∫_R |r|^{n-1} ω(r) dr = 2 ∫_{R+} r^{n-1} ω(r) dr`.
    pub fn moment(&self, n: usize) -> f64 {
        let q = QuadratureSpec::adaptive(1e-12);
        let f = |r: f64| r.powi(n as i32 - 1) * self.omega(r);
        let end = self.support_radius();
        2.0 * if end.is_finite() {
            integrate_adaptive(f, 0.0, end, &q).value
        } else {
            integrate_semi_infinite(f, 0.0, &q).value
        }
    }
}

/// Validate an even profile: evenness and normalization are required, the
/// Jensen bound `ω(1/2) ≥ e^{-1}` and `ω(r) ≥ 1 - 2|r|` are asserted, and
/// the crossing radius `r₀` vs `e^{-2|r|}` is computed.
pub fn even_profile(spec: &ProfileSpec) -> Result<EvenProfile> {
    let kind = match spec {
        ProfileSpec::Exp2 => ProfileKind::Exp2,
        ProfileSpec::Gauss => ProfileKind::Gauss,
        ProfileSpec::Triangle => ProfileKind::Triangle,
        ProfileSpec::Sampled { r, omega } => sampled_profile_kind(r, omega)?,
    };
    let profile = EvenProfile { kind, r0: 0.0 };

    // ω(0) = 1 and ∫ω = 1 must already hold
    if (profile.omega(0.0) - 1.0).abs() > WEIGHT_TOL {
        return Err(Error::invalid("profile must satisfy omega(0) = 1"));
    }
    let total = profile.moment(1);
    if (total - 1.0).abs() > 1e-7 {
        return Err(Error::invalid(format!("profile must integrate to 1, got {total}")));
    }
    // Jensen bound and the linear minorant
    if profile.omega(0.5) < (-1.0f64).exp() - WEIGHT_TOL {
        return Err(Error::invalid("omega(1/2) < e^{-1}"));
    }
    for k in 0..=50 {
        let r = 0.5 * k as f64 / 50.0;
        if profile.omega(r) < 1.0 - 2.0 * r - 1e-7 {
            return Err(Error::invalid("omega(r) < 1 - 2|r| on |r| <= 1/2"));
        }
    }
    let r0 = match spec {
        ProfileSpec::Exp2 => 0.5, // degenerate convention
        _ => crossing_point(|r| profile.alpha_abs(r), 2.0, profile.support_radius()),
    };
    if r0 < 0.5 - 1e-9 {
        return Err(Error::invalid(format!("crossing radius {r0} below 1/2")));
    }
    Ok(EvenProfile { r0, ..profile })
}

fn sampled_profile_kind(r: &[f64], omega: &[f64]) -> Result<ProfileKind> {
    // reuse the sampled-weight validation minus the rescaling: the caller
    // must supply data already satisfying ω(0)=1, ∫=1
    if r.len() != omega.len() || r.len() < 2 || r[0] != 0.0 {
        return Err(Error::invalid("sampled profile needs r starting at 0"));
    }
    if r.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("sample points must be strictly increasing"));
    }
    let first_zero = omega.iter().position(|&v| v == 0.0);
    if let Some(k) = first_zero {
        if omega[k..].iter().any(|&v| v != 0.0) {
            return Err(Error::NotNonIncreasing);
        }
    }
    let live = first_zero.unwrap_or(omega.len());
    if live < 2 {
        return Err(Error::invalid("profile vanishes immediately"));
    }
    let alphas: Vec<f64> = omega[..live].iter().map(|&v| -v.ln()).collect();
    let ts: Vec<f64> = r[..live].to_vec();
    let slopes: Vec<f64> = ts
        .windows(2)
        .zip(alphas.windows(2))
        .map(|(tw, aw)| (aw[1] - aw[0]) / (tw[1] - tw[0]))
        .collect();
    for w in slopes.windows(2) {
        if w[1] - w[0] < -WEIGHT_TOL {
            return Err(Error::NotLogConcave);
        }
    }
    for w in alphas.windows(2) {
        if w[1] - w[0] < -1e-12 {
            return Err(Error::NotNonIncreasing);
        }
    }
    let last_slope = *slopes.last().unwrap();
    if first_zero.is_none() && last_slope <= 0.0 {
        return Err(Error::NotIntegrable);
    }
    Ok(ProfileKind::Sampled {
        rs: ts,
        alphas,
        last_slope,
        support_end: first_zero.map(|k| r[k]),
    })
}

/// Build a normalized sampled profile from arbitrary positive even data:
/// rescales `ω(r) → ν ω(λ r)` so that `ω(0) = 1` and `∫_R ω = 1`, then
/// validates.
pub fn normalized_even_profile(r: &[f64], omega: &[f64]) -> Result<EvenProfile> {
    if r.is_empty() || r.len() != omega.len() || omega[0] <= 0.0 {
        return Err(Error::invalid("bad profile data"));
    }
    let nu = 1.0 / omega[0];
    // exact integral of the piecewise-exponential interpolant of ν·ω
    let alphas: Vec<f64> = omega.iter().map(|&v| -(v * nu).max(1e-300).ln()).collect();
    let mut integral = 0.0;
    let mut live = omega.len();
    for (k, &v) in omega.iter().enumerate() {
        if v <= 0.0 {
            live = k;
            break;
        }
    }
    if live < 2 {
        return Err(Error::invalid("profile vanishes immediately"));
    }
    for i in 0..live - 1 {
        let b = (alphas[i + 1] - alphas[i]) / (r[i + 1] - r[i]);
        let dt = r[i + 1] - r[i];
        integral += if b.abs() < 1e-14 {
            (-alphas[i]).exp() * dt
        } else {
            (-alphas[i]).exp() * (1.0 - (-b * dt).exp()) / b
        };
    }
    if live == omega.len() {
        let b = (alphas[live - 1] - alphas[live - 2]) / (r[live - 1] - r[live - 2]);
        if b <= 0.0 {
            return Err(Error::NotIntegrable);
        }
        integral += (-alphas[live - 1]).exp() / b;
    } else {
        integral += 0.5 * (-alphas[live - 1]).exp() * (r[live] - r[live - 1]);
    }
    let lam = 2.0 * integral; // ∫_R ν ω(λ r) dr = 2·integral/λ = 1
    let rs: Vec<f64> = r.iter().map(|v| v / lam).collect();
    let os: Vec<f64> = omega.iter().map(|&v| v * nu).collect();
    even_profile(&ProfileSpec::Sampled { r: rs, omega: os })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn exp_is_fixed_point() {
        let w = validate_weight(&WeightSpec::Exp { rate: 1.0 }).unwrap();
        assert!(matches!(w.kind, WeightKind::Exp));
        assert_relative_eq!(w.alpha_prime_0, 1.0);
        assert_relative_eq!(w.t0, 1.0); // degenerate convention
        assert_relative_eq!(w.moments[1], 0.5, epsilon = 1e-10); // ∫ r e^{-r²} = 1/2
        assert_relative_eq!(w.moments[3], 0.5, epsilon = 1e-10); // Γ(2)/2
    }

    #[test]
    fn exp_rate_two_rescales_to_exp() {
        let w = validate_weight(&WeightSpec::Exp { rate: 2.0 }).unwrap();
        assert!(matches!(w.kind, WeightKind::Exp));
        assert_relative_eq!(w.rho(1.0), (-1.0f64).exp(), epsilon = 1e-12);
    }

    #[test]
    fn linear_cutoff_normalization_and_crossing() {
        let w = validate_weight(&WeightSpec::Linear { slope: 0.5 }).unwrap();
        assert_relative_eq!(w.rho(0.0), 1.0);
        assert_relative_eq!(w.rho(1.0), 0.5);
        assert_eq!(w.rho(2.5), 0.0);
        assert_relative_eq!(w.alpha_prime_0, 0.5);
        // t₀ solves 1 - t/2 = e^{-t}
        assert_relative_eq!(w.t0, 1.593624260, epsilon = 1e-6);
        // any slope normalizes to the same canonical weight
        let w2 = validate_weight(&WeightSpec::Linear { slope: 3.0 }).unwrap();
        assert_relative_eq!(w2.t0, w.t0, epsilon = 1e-12);
    }

    #[test]
    fn sampled_normalization_idempotent() {
        let t: Vec<f64> = (0..50).map(|i| i as f64 * 0.2).collect();
        let rho: Vec<f64> = t.iter().map(|&x| (-(x + 0.3 * x * x)).exp() * 2.0).collect();
        let w = validate_weight(&WeightSpec::Sampled { t, rho }).unwrap();
        // re-validate the normalized samples: must be a fixed point
        if let WeightKind::Sampled { ts, alphas, .. } = &w.kind {
            let spec2 = WeightSpec::Sampled {
                t: ts.clone(),
                rho: alphas.iter().map(|a| (-a).exp()).collect(),
            };
            let w2 = validate_weight(&spec2).unwrap();
            for probe in [0.0, 0.1, 0.7, 1.9, 3.0] {
                assert_relative_eq!(w.rho(probe), w2.rho(probe), epsilon = 1e-6);
            }
            assert_relative_eq!(w.t0, w2.t0, epsilon = 1e-5);
        } else {
            panic!("expected sampled kind");
        }
    }

    #[test]
    fn rejects_bad_weights() {
        assert!(matches!(
            validate_weight(&WeightSpec::Exp { rate: -1.0 }),
            Err(Error::NotNonIncreasing)
        ));
        assert!(matches!(
            validate_weight(&WeightSpec::Exp { rate: 0.0 }),
            Err(Error::NotIntegrable)
        ));
        // log-convex samples: ϱ = 1/(1+t) has α = log(1+t), concave
        let t: Vec<f64> = (0..40).map(|i| i as f64 * 0.5).collect();
        let rho: Vec<f64> = t.iter().map(|&x| 1.0 / (1.0 + x)).collect();
        assert!(matches!(
            validate_weight(&WeightSpec::Sampled { t, rho }),
            Err(Error::NotLogConcave)
        ));
        // increasing samples
        let t = vec![0.0, 1.0, 2.0, 3.0];
        let rho = vec![1.0, 2.0, 3.0, 4.0];
        assert!(matches!(
            validate_weight(&WeightSpec::Sampled { t, rho }),
            Err(Error::NotNonIncreasing)
        ));
    }

    #[test]
    fn crossing_sign_pattern() {
        let w = validate_weight(&WeightSpec::Linear { slope: 0.5 }).unwrap();
        for k in 1..40 {
            let t = w.t0 * k as f64 / 41.0;
            assert!(w.rho(t) >= (-t).exp() - 1e-12, "below e^-t at {t}");
        }
        for t in [w.t0 + 0.05, w.t0 + 0.3, 1.9, 3.0] {
            assert!(w.rho(t) <= (-t).exp() + 1e-12, "above e^-t at {t}");
        }
    }

    #[test]
    fn alpha_star_extension() {
        let w = validate_weight(&WeightSpec::Linear { slope: 0.5 }).unwrap();
        let ext = w.alpha_star_extend();
        // α'(0) = 1/2, so α*(-1) = -1/2 and ϱ*(-1) = e^{1/2}
        assert_relative_eq!(ext.alpha_star(-1.0), -0.5);
        assert_relative_eq!(ext.rho_star(-1.0), 0.5f64.exp());
        assert_relative_eq!(ext.alpha_star(0.0), 0.0);
        assert_relative_eq!(ext.rho_star(0.0), 1.0);
        // slopes bounded below by α'(0)
        let mut prev = ext.alpha_star(-5.0);
        let mut t = -5.0;
        while t < 3.0 {
            let nt = t + 0.01;
            let cur = ext.alpha_star(nt);
            if cur.is_finite() {
                assert!((cur - prev) / 0.01 >= w.alpha_prime_0 - 1e-9);
                prev = cur;
            }
            t = nt;
        }
        // exp weight extends to e^{-t} on the whole line
        let e = validate_weight(&WeightSpec::Exp { rate: 1.0 }).unwrap().alpha_star_extend();
        assert_relative_eq!(e.rho_star(-2.0), 2.0f64.exp());
    }

    #[test]
    fn even_profiles_and_crossings() {
        let e = even_profile(&ProfileSpec::Exp2).unwrap();
        assert_relative_eq!(e.r0, 0.5); // degenerate convention

        let g = even_profile(&ProfileSpec::Gauss).unwrap();
        // e^{-πr²} = e^{-2r} at r = 2/π
        assert_relative_eq!(g.r0, 2.0 / std::f64::consts::PI, epsilon = 1e-9);
        assert!(g.omega(0.5) >= (-1.0f64).exp());

        let t = even_profile(&ProfileSpec::Triangle).unwrap();
        // 1 - r = e^{-2r}: r ≈ 0.7968
        assert_relative_eq!(t.r0, 0.796812, epsilon = 1e-5);
        assert!(t.r0 >= 0.5);

        // ∫ r² e^{-2r} dr over R = 2·(2!/2³) = 1/2 (Eq. omegaint at n = 3)
        assert_relative_eq!(e.moment(3), 0.5, epsilon = 1e-9);
    }

    #[test]
    fn normalized_profile_from_raw_data() {
        // un-normalized Gaussian data gets rescaled into a valid profile
        let r: Vec<f64> = (0..400).map(|i| i as f64 * 0.02).collect();
        let om: Vec<f64> = r.iter().map(|&x| 3.0 * (-x * x).exp()).collect();
        let p = normalized_even_profile(&r, &om).unwrap();
        assert_relative_eq!(p.omega(0.0), 1.0, epsilon = 1e-9);
        assert_relative_eq!(p.moment(1), 1.0, epsilon = 1e-5);
        assert!(p.r0 >= 0.5);
    }

    #[test]
    fn moment_bounds_hold() {
        for spec in [
            WeightSpec::Exp { rate: 1.0 },
            WeightSpec::Linear { slope: 0.5 },
            WeightSpec::GaussPower { p: 2.0 },
        ] {
            let w = validate_weight(&spec).unwrap();
            for n in 2..=4 {
                assert!(w.moments[n - 1] <= GAMMA_HALF_BOUNDS[n - 1] + WEIGHT_TOL);
            }
            // n = 2 is an identity for every normalized weight
            assert_relative_eq!(w.moments[1], 0.5, epsilon = 1e-9);
        }
        // the n = 1 bound genuinely fails for the linear cutoff: (2/3)√2
        let lin = validate_weight(&WeightSpec::Linear { slope: 0.5 }).unwrap();
        assert_relative_eq!(lin.moments[0], 2.0 * 2.0f64.sqrt() / 3.0, epsilon = 1e-9);
    }
}
