//! Wire formats: JSON descriptions of bodies, fields, weights, and
//! profiles, plus the flat little-endian binary layout for grid values.
//!
//! Grid values may arrive as a path to a binary `f64` array (`+∞` as IEEE
//! +Inf) or as an inline JSON array with `null` standing for `+∞`; emitted
//! fields always use the inline form so reports re-parse under the same
//! schema.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{BodyRep, ConvexBody};
use crate::linalg::Matrix;
use crate::quad::SphereGrid;
use crate::transform::{BoxDomain, Convexity, GridField};

// ---------------------------------------------------------------------------
// Bodies
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BodySpec {
    Polytope {
        vertices: Vec<Vec<f64>>,
    },
    Ellipsoid {
        center: Vec<f64>,
        shape: Vec<Vec<f64>>,
    },
    Ball {
        dim: usize,
    },
    Radial {
        grid: String,
        radii: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        anchor: Option<Vec<f64>>,
    },
}

impl BodySpec {
    pub fn build(&self) -> Result<ConvexBody> {
        match self {
            BodySpec::Polytope { vertices } => ConvexBody::polytope(vertices.clone()),
            BodySpec::Ellipsoid { center, shape } => {
                let n = center.len();
                if shape.len() != n || shape.iter().any(|r| r.len() != n) {
                    return Err(Error::invalid("shape matrix must be n×n"));
                }
                let m = Matrix::from_fn(n, n, |r, c| shape[r][c]);
                ConvexBody::ellipsoid(center.clone(), m)
            }
            BodySpec::Ball { dim } => ConvexBody::ball(*dim),
            BodySpec::Radial { grid, radii, anchor } => {
                let g = std::sync::Arc::new(SphereGrid::from_name(grid)?);
                let anchor = anchor.clone().unwrap_or_else(|| vec![0.0; g.dim]);
                ConvexBody::radial(g, radii.clone(), anchor)
            }
        }
    }

    pub fn from_body(body: &ConvexBody) -> BodySpec {
        match body.rep() {
            BodyRep::Polytope { vertices } => BodySpec::Polytope { vertices: vertices.clone() },
            BodyRep::Ellipsoid { center, shape } => BodySpec::Ellipsoid {
                center: center.clone(),
                shape: (0..shape.nrows())
                    .map(|r| (0..shape.ncols()).map(|c| shape[(r, c)]).collect())
                    .collect(),
            },
            BodyRep::Radial { grid, radii } => BodySpec::Radial {
                grid: grid.name.clone(),
                radii: radii.clone(),
                anchor: Some(body.interior_point().to_vec()),
            },
        }
    }
}

// ---------------------------------------------------------------------------
// Fields
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BoxSpec {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl BoxSpec {
    fn build(&self) -> Result<BoxDomain> {
        BoxDomain::new(self.min.clone(), self.max.clone())
    }
}

/// Grid values: a path to flat binary64 little-endian data (IEEE +Inf for
/// `+∞`) or an inline array with `null` for `+∞`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GridValues {
    Path(String),
    Inline(Vec<Option<f64>>),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FieldSpec {
    /// `φ(x) = ½⟨x-center, A(x-center)⟩ + offset`.
    Quadratic {
        matrix: Vec<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        center: Option<Vec<f64>>,
        #[serde(default)]
        offset: f64,
        #[serde(default, skip_serializing_if = "Option::is_none", rename = "box")]
        box_: Option<BoxSpec>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        shape: Option<Vec<usize>>,
    },
    /// Raw samples on a tensor grid.
    Grid {
        #[serde(rename = "box")]
        box_: BoxSpec,
        shape: Vec<usize>,
        values: GridValues,
    },
    /// Quadratic plus a Gaussian bump of the given amplitude.
    QuadraticPlusBump {
        matrix: Vec<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        center: Option<Vec<f64>>,
        #[serde(default)]
        offset: f64,
        amplitude: f64,
        bump_center: Vec<f64>,
        sigma: f64,
        #[serde(default, skip_serializing_if = "Option::is_none", rename = "box")]
        box_: Option<BoxSpec>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        shape: Option<Vec<usize>>,
    },
    /// `φ = |x|²/2` on `|x| ≤ radius`, `+∞` outside.
    TruncatedQuadratic {
        radius: f64,
        dim: usize,
        #[serde(default, skip_serializing_if = "Option::is_none", rename = "box")]
        box_: Option<BoxSpec>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        shape: Option<Vec<usize>>,
    },
}

/// Read a flat little-endian binary64 array.
pub fn read_f64_binary(path: &Path) -> Result<Vec<f64>> {
    let bytes = std::fs::read(path)
        .map_err(|e| Error::invalid(format!("cannot read {}: {e}", path.display())))?;
    if bytes.len() % 8 != 0 {
        return Err(Error::invalid("binary value file length is not a multiple of 8"));
    }
    Ok(bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect())
}

/// Write a flat little-endian binary64 array.
pub fn write_f64_binary(path: &Path, values: &[f64]) -> Result<()> {
    let mut bytes = Vec::with_capacity(values.len() * 8);
    for v in values {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    std::fs::write(path, bytes)
        .map_err(|e| Error::invalid(format!("cannot write {}: {e}", path.display())))
}

impl FieldSpec {
    pub fn dim(&self) -> Result<usize> {
        Ok(match self {
            FieldSpec::Quadratic { matrix, .. } | FieldSpec::QuadraticPlusBump { matrix, .. } => {
                matrix.len()
            }
            FieldSpec::Grid { shape, .. } => shape.len(),
            FieldSpec::TruncatedQuadratic { dim, .. } => *dim,
        })
    }

    /// Materialize the field. Closed forms default to a cube box of
    /// half-width 8 (or `radius + 2` for truncations) sampled at
    /// `default_nodes` per axis; `base_dir` anchors relative value paths.
    pub fn build(&self, default_nodes: usize, base_dir: &Path) -> Result<GridField> {
        let nodes = default_nodes.max(4);
        match self {
            FieldSpec::Quadratic { matrix, center, offset, box_, shape } => {
                let n = matrix.len();
                let a = Matrix::from_fn(n, n, |r, c| matrix[r][c]);
                let ctr = center.clone().unwrap_or_else(|| vec![0.0; n]);
                let b = match box_ {
                    Some(bs) => bs.build()?,
                    None => BoxDomain::cube(n, 8.0),
                };
                let sh = shape.clone().unwrap_or_else(|| vec![nodes; n]);
                let mut field = GridField::from_fn(
                    b,
                    sh,
                    |x| {
                        let d = nalgebra::DVector::from_iterator(
                            n,
                            x.iter().zip(&ctr).map(|(a, b)| a - b),
                        );
                        0.5 * (d.transpose() * &a * &d)[(0, 0)] + offset
                    },
                    Convexity::Unknown,
                )?;
                field.classify_convexity();
                Ok(field)
            }
            FieldSpec::Grid { box_, shape, values } => {
                let vals = match values {
                    GridValues::Path(p) => read_f64_binary(&base_dir.join(p))?,
                    GridValues::Inline(v) => {
                        v.iter().map(|o| o.unwrap_or(f64::INFINITY)).collect()
                    }
                };
                GridField::new(box_.build()?, shape.clone(), vals, Convexity::Unknown)
            }
            FieldSpec::QuadraticPlusBump {
                matrix,
                center,
                offset,
                amplitude,
                bump_center,
                sigma,
                box_,
                shape,
            } => {
                let n = matrix.len();
                let a = Matrix::from_fn(n, n, |r, c| matrix[r][c]);
                let ctr = center.clone().unwrap_or_else(|| vec![0.0; n]);
                let b = match box_ {
                    Some(bs) => bs.build()?,
                    None => BoxDomain::cube(n, 8.0),
                };
                let sh = shape.clone().unwrap_or_else(|| vec![nodes; n]);
                let s2 = 2.0 * sigma * sigma;
                let mut field = GridField::from_fn(
                    b,
                    sh,
                    |x| {
                        let d = nalgebra::DVector::from_iterator(
                            n,
                            x.iter().zip(&ctr).map(|(a, b)| a - b),
                        );
                        let q = 0.5 * (d.transpose() * &a * &d)[(0, 0)] + offset;
                        let bd: f64 = x
                            .iter()
                            .zip(bump_center)
                            .map(|(a, b)| (a - b) * (a - b))
                            .sum();
                        q + amplitude * (-bd / s2).exp()
                    },
                    Convexity::Unknown,
                )?;
                field.classify_convexity();
                Ok(field)
            }
            FieldSpec::TruncatedQuadratic { radius, dim, box_, shape } => {
                let b = match box_ {
                    Some(bs) => bs.build()?,
                    None => BoxDomain::cube(*dim, (radius + 2.0).max(8.0)),
                };
                let sh = shape.clone().unwrap_or_else(|| vec![nodes; *dim]);
                let r = *radius;
                let mut field = GridField::from_fn(
                    b,
                    sh,
                    |x| {
                        let r2: f64 = x.iter().map(|v| v * v).sum();
                        if r2.sqrt() <= r {
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
        }
    }

    /// Inline-grid form of a computed field (always re-parseable).
    pub fn from_field(field: &GridField) -> FieldSpec {
        FieldSpec::Grid {
            box_: BoxSpec {
                min: field.box_domain().min.clone(),
                max: field.box_domain().max.clone(),
            },
            shape: field.shape().to_vec(),
            values: GridValues::Inline(
                field
                    .values()
                    .iter()
                    .map(|&v| if v.is_finite() { Some(v) } else { None })
                    .collect(),
            ),
        }
    }
}

// ---------------------------------------------------------------------------
// Composite inputs
// ---------------------------------------------------------------------------

/// Input file for the sandwich implication check.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SandwichSpec {
    pub body: BodySpec,
    pub ellipsoid: BodySpec,
    pub w: Vec<f64>,
    pub mu: f64,
}

/// Nonnegative 1D function on the half-line (Borell inputs) or the whole
/// line (center-value checks). Sampled data interpolates log-linearly
/// between samples (preserving log-concavity of the data) and is zero
/// outside the sampled range.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RayFnSpec {
    /// `scale · e^{-rate·t}`.
    Exp {
        #[serde(default = "one")]
        rate: f64,
        #[serde(default = "one")]
        scale: f64,
    },
    /// `scale · e^{-rate·t²}`.
    Gauss {
        #[serde(default = "one")]
        rate: f64,
        #[serde(default = "one")]
        scale: f64,
    },
    /// `scale · (1 - slope·t)₊`.
    Linear {
        slope: f64,
        #[serde(default = "one")]
        scale: f64,
    },
    /// Positive samples at increasing abscissae.
    Sampled { t: Vec<f64>, v: Vec<f64> },
}

fn one() -> f64 {
    1.0
}

impl RayFnSpec {
    pub fn build(&self) -> Result<Box<dyn Fn(f64) -> f64 + Sync + Send>> {
        match self {
            RayFnSpec::Exp { rate, scale } => {
                let (r, s) = (*rate, *scale);
                Ok(Box::new(move |t| s * (-r * t).exp()))
            }
            RayFnSpec::Gauss { rate, scale } => {
                let (r, s) = (*rate, *scale);
                Ok(Box::new(move |t| s * (-r * t * t).exp()))
            }
            RayFnSpec::Linear { slope, scale } => {
                let (sl, s) = (*slope, *scale);
                Ok(Box::new(move |t| s * (1.0 - sl * t).max(0.0)))
            }
            RayFnSpec::Sampled { t, v } => {
                if t.len() != v.len() || t.len() < 2 {
                    return Err(Error::invalid("sampled function needs >= 2 matching samples"));
                }
                if t.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(Error::invalid("sample points must be strictly increasing"));
                }
                if v.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
                    return Err(Error::invalid("samples must be positive (zero tail is implicit)"));
                }
                let ts = t.clone();
                let logs: Vec<f64> = v.iter().map(|x| x.ln()).collect();
                Ok(Box::new(move |x| {
                    if x < ts[0] || x > *ts.last().unwrap() {
                        return 0.0;
                    }
                    let mut lo = 0usize;
                    let mut hi = ts.len() - 1;
                    while hi - lo > 1 {
                        let mid = (lo + hi) / 2;
                        if ts[mid] <= x {
                            lo = mid;
                        } else {
                            hi = mid;
                        }
                    }
                    let w = (x - ts[lo]) / (ts[hi] - ts[lo]);
                    (logs[lo] + w * (logs[hi] - logs[lo])).exp()
                }))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn body_specs_round_trip() {
        let json = r#"{"kind":"polytope","vertices":[[1,1],[-1,1],[-1,-1],[1,-1]]}"#;
        let spec: BodySpec = serde_json::from_str(json).unwrap();
        let body = spec.build().unwrap();
        let back = BodySpec::from_body(&body);
        let body2 = back.build().unwrap();
        assert_eq!(body.dim(), body2.dim());

        let ball: BodySpec = serde_json::from_str(r#"{"kind":"ball","dim":3}"#).unwrap();
        assert_eq!(ball.build().unwrap().dim(), 3);

        let rad: BodySpec =
            serde_json::from_str(r#"{"kind":"radial","grid":"uniform512","radii":[]}"#).unwrap();
        assert!(rad.build().is_err()); // radii length mismatch
    }

    #[test]
    fn field_spec_quadratic_builds_convex() {
        let json = r#"{"kind":"quadratic","matrix":[[1,0],[0,1]]}"#;
        let spec: FieldSpec = serde_json::from_str(json).unwrap();
        let f = spec.build(33, Path::new(".")).unwrap();
        assert_eq!(f.convex_flag(), Convexity::KnownConvex);
        assert_eq!(f.shape(), &[33, 33]);
    }

    #[test]
    fn truncated_quadratic_is_certified_convex() {
        let json = r#"{"kind":"truncated_quadratic","radius":2.0,"dim":2}"#;
        let spec: FieldSpec = serde_json::from_str(json).unwrap();
        let f = spec.build(65, Path::new(".")).unwrap();
        // an +∞ node never sits between two finite ones on a ball
        assert_eq!(f.convex_flag(), Convexity::KnownConvex);
    }

    #[test]
    fn binary_values_round_trip() {
        let dir = std::env::temp_dir().join("santalo_io_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("vals.f64");
        let vals = vec![0.0, 1.5, f64::INFINITY, -2.25];
        write_f64_binary(&path, &vals).unwrap();
        let back = read_f64_binary(&path).unwrap();
        assert_eq!(vals.len(), back.len());
        assert!(back[2].is_infinite());
        assert_eq!(vals[3], back[3]);
        std::fs::remove_file(path).ok();
    }

    #[test]
    fn inline_field_round_trip() {
        let f = GridField::from_fn(
            BoxDomain::cube(2, 1.0),
            vec![5, 5],
            |x| if x[0] > 0.9 { f64::INFINITY } else { x[0] + x[1] },
            Convexity::Unknown,
        )
        .unwrap();
        let spec = FieldSpec::from_field(&f);
        let text = serde_json::to_string(&spec).unwrap();
        let parsed: FieldSpec = serde_json::from_str(&text).unwrap();
        let f2 = parsed.build(5, Path::new(".")).unwrap();
        for (a, b) in f.values().iter().zip(f2.values()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }
}
