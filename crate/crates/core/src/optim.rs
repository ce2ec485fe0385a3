//! Derivative-free minimization: Nelder–Mead simplex and golden-section.

/// Options for [`nelder_mead`].
#[derive(Clone, Copy, Debug)]
pub struct NmOptions {
    pub max_iter: usize,
    /// Stop when the simplex value spread falls below this.
    pub ftol: f64,
    /// Stop when the simplex diameter falls below this.
    pub xtol: f64,
}

impl Default for NmOptions {
    fn default() -> Self {
        NmOptions { max_iter: 400, ftol: 1e-12, xtol: 1e-10 }
    }
}

#[derive(Clone, Debug)]
pub struct NmResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Standard Nelder–Mead with reflection/expansion/contraction/shrink
/// (coefficients 1, 2, 1/2, 1/2). The initial simplex steps `x0` by
/// `steps[d]` along each coordinate.
pub fn nelder_mead(
    mut f: impl FnMut(&[f64]) -> f64,
    x0: &[f64],
    steps: &[f64],
    opts: &NmOptions,
) -> NmResult {
    let n = x0.len();
    assert_eq!(steps.len(), n);
    if n == 0 {
        let value = f(x0);
        return NmResult { x: x0.to_vec(), value, iterations: 0, converged: true };
    }
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    simplex.push(x0.to_vec());
    for d in 0..n {
        let mut p = x0.to_vec();
        p[d] += if steps[d] != 0.0 { steps[d] } else { 1e-3 };
        simplex.push(p);
    }
    let mut values: Vec<f64> = simplex.iter().map(|p| f(p)).collect();

    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.max_iter {
        iterations += 1;
        // order ascending by value
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap_or(std::cmp::Ordering::Equal));
        let best = order[0];
        let worst = order[n];
        let second_worst = order[n - 1];

        let spread = values[worst] - values[best];
        let diam = simplex
            .iter()
            .map(|p| {
                p.iter()
                    .zip(&simplex[best])
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0f64, f64::max)
            })
            .fold(0.0f64, f64::max);
        if spread.abs() <= opts.ftol * (1.0 + values[best].abs()) && diam <= opts.xtol {
            converged = true;
            break;
        }

        // centroid of all but the worst
        let mut centroid = vec![0.0; n];
        for (i, p) in simplex.iter().enumerate() {
            if i != worst {
                for d in 0..n {
                    centroid[d] += p[d] / n as f64;
                }
            }
        }
        let point_at = |t: f64, centroid: &[f64], worst_p: &[f64]| -> Vec<f64> {
            centroid
                .iter()
                .zip(worst_p)
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };

        let reflected = point_at(1.0, &centroid, &simplex[worst]);
        let fr = f(&reflected);
        if fr < values[best] {
            let expanded = point_at(2.0, &centroid, &simplex[worst]);
            let fe = f(&expanded);
            if fe < fr {
                simplex[worst] = expanded;
                values[worst] = fe;
            } else {
                simplex[worst] = reflected;
                values[worst] = fr;
            }
        } else if fr < values[second_worst] {
            simplex[worst] = reflected;
            values[worst] = fr;
        } else {
            let contracted = if fr < values[worst] {
                point_at(0.5, &centroid, &simplex[worst])
            } else {
                point_at(-0.5, &centroid, &simplex[worst])
            };
            let fc = f(&contracted);
            if fc < values[worst].min(fr) {
                simplex[worst] = contracted;
                values[worst] = fc;
            } else {
                // shrink toward the best vertex
                let best_p = simplex[best].clone();
                for (i, p) in simplex.iter_mut().enumerate() {
                    if i != best {
                        for d in 0..n {
                            p[d] = best_p[d] + 0.5 * (p[d] - best_p[d]);
                        }
                        values[i] = f(p);
                    }
                }
            }
        }
    }

    let (mut bi, mut bv) = (0usize, values[0]);
    for (i, &v) in values.iter().enumerate() {
        if v < bv {
            bi = i;
            bv = v;
        }
    }
    NmResult { x: simplex[bi].clone(), value: bv, iterations, converged }
}

/// Golden-section minimization of a unimodal function on `[a, b]`.
pub fn golden_section(mut f: impl FnMut(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5.0f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn quadratic_bowl() {
        let r = nelder_mead(
            |x| (x[0] - 1.0).powi(2) + 2.0 * (x[1] + 0.5).powi(2),
            &[0.0, 0.0],
            &[0.5, 0.5],
            &NmOptions { max_iter: 500, ..Default::default() },
        );
        assert_relative_eq!(r.x[0], 1.0, epsilon = 1e-5);
        assert_relative_eq!(r.x[1], -0.5, epsilon = 1e-5);
    }

    #[test]
    fn rosenbrock_2d() {
        let r = nelder_mead(
            |x| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2),
            &[-1.2, 1.0],
            &[0.5, 0.5],
            &NmOptions { max_iter: 2000, ..Default::default() },
        );
        assert_relative_eq!(r.x[0], 1.0, epsilon = 1e-3);
        assert_relative_eq!(r.x[1], 1.0, epsilon = 1e-3);
    }

    #[test]
    fn golden_section_min() {
        // value comparisons saturate at √ε near the optimum of a quadratic
        let (x, v) = golden_section(|t| (t - 0.3).powi(2) + 1.0, -2.0, 2.0, 1e-10);
        assert_relative_eq!(x, 0.3, epsilon = 1e-6);
        assert_relative_eq!(v, 1.0, epsilon = 1e-12);
    }
}
