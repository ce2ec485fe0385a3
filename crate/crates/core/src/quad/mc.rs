//! Seeded Monte Carlo integration, the independent cross-check for the
//! deterministic quadrature routes.
//!
//! Samples are drawn in fixed-size batches; batch `i` uses ChaCha8 stream
//! `i` of the caller's seed, so parallel and serial runs sum the same
//! numbers in the same order and agree bit-exactly.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::linalg::unit_ball_volume;
use crate::quad::QuadratureSpec;

const BATCH: usize = 4096;

/// Sampling domain for [`integrate_mc`].
#[derive(Clone, Debug)]
pub enum McDomain {
    Box { min: Vec<f64>, max: Vec<f64> },
    Ball { center: Vec<f64>, radius: f64 },
}

impl McDomain {
    pub fn dim(&self) -> usize {
        match self {
            McDomain::Box { min, .. } => min.len(),
            McDomain::Ball { center, .. } => center.len(),
        }
    }

    pub fn volume(&self) -> f64 {
        match self {
            McDomain::Box { min, max } => min.iter().zip(max).map(|(a, b)| b - a).product(),
            McDomain::Ball { center, radius } => {
                unit_ball_volume(center.len()) * radius.powi(center.len() as i32)
            }
        }
    }

    fn sample(&self, rng: &mut ChaCha8Rng, out: &mut [f64]) {
        match self {
            McDomain::Box { min, max } => {
                for (o, (a, b)) in out.iter_mut().zip(min.iter().zip(max)) {
                    *o = a + (b - a) * rng.random::<f64>();
                }
            }
            McDomain::Ball { center, radius } => {
                // direction from Gaussians, radius from the n-th root law;
                // fixed draw count keeps the stream layout deterministic
                let n = center.len();
                let mut norm2 = 0.0;
                for o in out.iter_mut() {
                    let (u1, u2): (f64, f64) = (rng.random(), rng.random());
                    let g = (-2.0 * u1.max(1e-300).ln()).sqrt()
                        * (2.0 * std::f64::consts::PI * u2).cos();
                    *o = g;
                    norm2 += g * g;
                }
                let r = radius * rng.random::<f64>().powf(1.0 / n as f64);
                let scale = if norm2 > 0.0 { r / norm2.sqrt() } else { 0.0 };
                for (o, c) in out.iter_mut().zip(center) {
                    *o = c + *o * scale;
                }
            }
        }
    }
}

/// Uniform-sampling estimate of `∫_domain f` with `max_evals` samples.
/// Returns `(estimate, standard_error)`, reproducible for a fixed seed.
pub fn integrate_mc(
    f: impl Fn(&[f64]) -> f64 + Sync,
    domain: &McDomain,
    spec: &QuadratureSpec,
) -> (f64, f64) {
    let n_samples = spec.max_evals.max(BATCH);
    let n_batches = n_samples.div_ceil(BATCH);
    let dim = domain.dim();

    let partials: Vec<(f64, f64, usize)> = (0..n_batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            rng.set_stream(b as u64);
            let count = if b + 1 == n_batches { n_samples - b * BATCH } else { BATCH };
            let mut x = vec![0.0; dim];
            let mut sum = 0.0;
            let mut sumsq = 0.0;
            for _ in 0..count {
                domain.sample(&mut rng, &mut x);
                let v = f(&x);
                sum += v;
                sumsq += v * v;
            }
            (sum, sumsq, count)
        })
        .collect();

    let mut sum = 0.0;
    let mut sumsq = 0.0;
    for (s, s2, _) in &partials {
        sum += s;
        sumsq += s2;
    }
    let n = n_samples as f64;
    let vol = domain.volume();
    let mean = sum / n;
    let var = (sumsq / n - mean * mean).max(0.0);
    (vol * mean, vol * (var / n).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::QuadMethod;
    use approx::assert_relative_eq;

    fn mc_spec(samples: usize, seed: u64) -> QuadratureSpec {
        QuadratureSpec::new(QuadMethod::MonteCarlo, 1e-6, samples, seed).unwrap()
    }

    #[test]
    fn constant_on_unit_square() {
        let d = McDomain::Box { min: vec![0.0, 0.0], max: vec![1.0, 1.0] };
        let (v, se) = integrate_mc(|_| 1.0, &d, &mc_spec(10_000, 7));
        assert_relative_eq!(v, 1.0, epsilon = 1e-12);
        assert_relative_eq!(se, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn gaussian_matches_pi() {
        let d = McDomain::Box { min: vec![-5.0, -5.0], max: vec![5.0, 5.0] };
        let spec = mc_spec(1_000_000, 42);
        let (v, se) = integrate_mc(|x| (-(x[0] * x[0] + x[1] * x[1])).exp(), &d, &spec);
        assert!((v - std::f64::consts::PI).abs() < 3.0 * se, "v={v} se={se}");
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let d = McDomain::Ball { center: vec![0.0, 0.0, 0.0], radius: 2.0 };
        let spec = mc_spec(100_000, 9);
        let f = |x: &[f64]| (x[0] + x[1] * x[2]).cos();
        let a = integrate_mc(f, &d, &spec);
        let b = integrate_mc(f, &d, &spec);
        assert_eq!(a.0.to_bits(), b.0.to_bits());
        assert_eq!(a.1.to_bits(), b.1.to_bits());
    }

    #[test]
    fn ball_volume_recovered() {
        let d = McDomain::Ball { center: vec![1.0, -1.0], radius: 1.5 };
        let spec = mc_spec(200_000, 3);
        let (v, _) = integrate_mc(|_| 1.0, &d, &spec);
        assert_relative_eq!(v, std::f64::consts::PI * 2.25, epsilon = 1e-9);
    }
}
