//! Fixed quadrature grids on the unit sphere `S^{n-1}`, 1 ≤ n ≤ 4.
//!
//! Conventions: weights sum to the surface area `n·V(B^n)`, so that
//! `∫_{R^n} f = Σ_u w_u ∫_0^∞ r^{n-1} f(ru) dr` holds on the grid.
//! The grid families are fixed per dimension: the two-point set for n = 1,
//! uniform angles for n = 2, a Fibonacci lattice for n = 3, and a product
//! Gauss rule for n = 4.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::gauss_legendre;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SphereGrid {
    pub dim: usize,
    pub dirs: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
    /// Grid name as used in body JSON, e.g. `"fib2048"`.
    pub name: String,
}

impl SphereGrid {
    /// Default grid sizes per dimension: 2 / 512 / 2048 / 8192.
    pub fn default_size(dim: usize) -> usize {
        match dim {
            1 => 2,
            2 => 512,
            3 => 2048,
            _ => 8192,
        }
    }

    pub fn standard_default(dim: usize) -> Result<SphereGrid> {
        SphereGrid::standard(dim, SphereGrid::default_size(dim))
    }

    /// Build the standard grid for `dim` with roughly `size` directions.
    pub fn standard(dim: usize, size: usize) -> Result<SphereGrid> {
        match dim {
            1 => Ok(SphereGrid {
                dim: 1,
                dirs: vec![vec![1.0], vec![-1.0]],
                weights: vec![1.0, 1.0],
                name: "pm2".into(),
            }),
            2 => {
                if size < 4 {
                    return Err(Error::invalid("sphere grid needs at least 4 directions"));
                }
                let w = 2.0 * std::f64::consts::PI / size as f64;
                let mut dirs = Vec::with_capacity(size);
                for i in 0..size {
                    let th = 2.0 * std::f64::consts::PI * (i as f64 + 0.5) / size as f64;
                    dirs.push(vec![th.cos(), th.sin()]);
                }
                Ok(SphereGrid { dim: 2, dirs, weights: vec![w; size], name: format!("uniform{size}") })
            }
            3 => {
                if size < 8 {
                    return Err(Error::invalid("sphere grid needs at least 8 directions"));
                }
                let golden = (1.0 + 5.0f64.sqrt()) / 2.0;
                let w = 4.0 * std::f64::consts::PI / size as f64;
                let mut dirs = Vec::with_capacity(size);
                for i in 0..size {
                    let z = 1.0 - (2.0 * i as f64 + 1.0) / size as f64;
                    let rho = (1.0 - z * z).max(0.0).sqrt();
                    let phi = 2.0 * std::f64::consts::PI * (i as f64 / golden).fract();
                    dirs.push(vec![rho * phi.cos(), rho * phi.sin(), z]);
                }
                Ok(SphereGrid { dim: 3, dirs, weights: vec![w; size], name: format!("fib{size}") })
            }
            4 => {
                // S^3 = {(cos ψ, sin ψ · ω) : ψ ∈ [0, π], ω ∈ S^2},
                // dσ = sin²ψ dψ × (du dφ) after u = cos θ on the S^2 factor.
                let m = ((size as f64 / 2.0).powf(1.0 / 3.0)).round().max(2.0) as usize;
                let (psi_nodes, psi_wts) = gauss_legendre(m);
                let (u_nodes, u_wts) = gauss_legendre(m);
                let k = 2 * m;
                let wphi = 2.0 * std::f64::consts::PI / k as f64;
                let mut dirs = Vec::with_capacity(m * m * k);
                let mut weights = Vec::with_capacity(m * m * k);
                for (pn, pw) in psi_nodes.iter().zip(&psi_wts) {
                    let psi = (pn + 1.0) * std::f64::consts::FRAC_PI_2;
                    let (sp, cp) = (psi.sin(), psi.cos());
                    let wpsi = pw * std::f64::consts::FRAC_PI_2 * sp * sp;
                    for (un, uw) in u_nodes.iter().zip(&u_wts) {
                        let st = (1.0 - un * un).max(0.0).sqrt();
                        for j in 0..k {
                            let phi = 2.0 * std::f64::consts::PI * (j as f64 + 0.5) / k as f64;
                            dirs.push(vec![cp, sp * *un, sp * st * phi.cos(), sp * st * phi.sin()]);
                            weights.push(wpsi * uw * wphi);
                        }
                    }
                }
                let name = format!("gauss{}", dirs.len());
                Ok(SphereGrid { dim: 4, dirs, weights, name })
            }
            _ => Err(Error::invalid("sphere grids support dimensions 1-4")),
        }
    }

    /// Parse a grid name such as `"uniform512"`, `"fib2048"`, `"gauss8192"`.
    pub fn from_name(name: &str) -> Result<SphereGrid> {
        let (dim, digits) = if let Some(rest) = name.strip_prefix("uniform") {
            (2, rest)
        } else if let Some(rest) = name.strip_prefix("fib") {
            (3, rest)
        } else if let Some(rest) = name.strip_prefix("gauss") {
            (4, rest)
        } else if name == "pm2" {
            return SphereGrid::standard(1, 2);
        } else {
            return Err(Error::invalid(format!("unknown sphere grid '{name}'")));
        };
        let size: usize = digits
            .parse()
            .map_err(|_| Error::invalid(format!("bad sphere grid size in '{name}'")))?;
        SphereGrid::standard(dim, size)
    }

    pub fn len(&self) -> usize {
        self.dirs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dirs.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::unit_sphere_area;
    use approx::assert_relative_eq;

    #[test]
    fn weights_sum_to_surface_area() {
        for dim in 1..=4 {
            let g = SphereGrid::standard(dim, SphereGrid::default_size(dim)).unwrap();
            assert_relative_eq!(g.total_weight(), unit_sphere_area(dim), epsilon = 1e-9);
            for d in &g.dirs {
                let n: f64 = d.iter().map(|x| x * x).sum::<f64>().sqrt();
                assert_relative_eq!(n, 1.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn first_moment_vanishes() {
        // Σ w_u u ≈ 0 by symmetry of each grid family.
        for dim in 2..=4 {
            let g = SphereGrid::standard(dim, SphereGrid::default_size(dim)).unwrap();
            for axis in 0..dim {
                let m: f64 = g.dirs.iter().zip(&g.weights).map(|(d, w)| w * d[axis]).sum();
                assert!(m.abs() < 2e-2, "dim {dim} axis {axis}: {m}");
            }
        }
    }

    #[test]
    fn second_moment_isotropic_4d() {
        // ∫_{S^3} u_i² dσ = 2π²/4 per axis.
        let g = SphereGrid::standard(4, 8192).unwrap();
        for axis in 0..4 {
            let m: f64 = g.dirs.iter().zip(&g.weights).map(|(d, w)| w * d[axis] * d[axis]).sum();
            assert_relative_eq!(m, unit_sphere_area(4) / 4.0, epsilon = 1e-6);
        }
    }

    #[test]
    fn names_round_trip() {
        for n in ["uniform512", "fib2048", "gauss8192"] {
            let g = SphereGrid::from_name(n).unwrap();
            assert_relative_eq!(g.total_weight(), unit_sphere_area(g.dim), epsilon = 1e-9);
        }
        assert!(SphereGrid::from_name("weird7").is_err());
    }
}
