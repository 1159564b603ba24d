//! Closed-form possible static potentials of the model geometries and the
//! maps between the ball, half-space and hyperboloid models of `ℍⁿ`.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::fd;
use crate::geom::{radial_derivatives, Geometry, GeometryKind, ScalarField};

#[derive(Debug, Clone, Copy, PartialEq)]
enum Kind {
    Constant,
    /// Chart coordinate `x_{i+1}`.
    Coordinate(usize),
    /// Ambient coordinate `x_{i+1}` of `Sⁿ ⊂ ℝⁿ⁺¹`; `i = n` is the polar one.
    SphereAmbient(usize),
    /// Hyperboloid coordinate `x_i`, `i = 0..=n`, over the half-space chart.
    Hyperboloid(usize),
    /// `(1 − α)/(1 + α)`.
    SchwarzschildPotential { mass: f64 },
}

/// One member of a potential basis, with analytic chart derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct CatalogField {
    kind: Kind,
    dim: usize,
    label: String,
}

impl CatalogField {
    fn new(kind: Kind, dim: usize, label: String) -> Self {
        Self { kind, dim, label }
    }

    /// Value, gradient and Hessian in one pass.
    pub fn jet(&self, p: &[f64]) -> (f64, DVector<f64>, DMatrix<f64>) {
        let n = self.dim;
        let delta = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
        match self.kind {
            Kind::Constant => (1.0, DVector::zeros(n), DMatrix::zeros(n, n)),
            Kind::Coordinate(i) => (
                p[i],
                DVector::from_fn(n, |j, _| delta(i, j)),
                DMatrix::zeros(n, n),
            ),
            Kind::SphereAmbient(i) => {
                let d = 1.0 + p.iter().map(|x| x * x).sum::<f64>();
                let (d2, d3) = (d * d, d * d * d);
                if i == n {
                    (
                        2.0 / d - 1.0,
                        DVector::from_fn(n, |j, _| -4.0 * p[j] / d2),
                        DMatrix::from_fn(n, n, |j, k| {
                            -4.0 * delta(j, k) / d2 + 16.0 * p[j] * p[k] / d3
                        }),
                    )
                } else {
                    (
                        2.0 * p[i] / d,
                        DVector::from_fn(n, |j, _| 2.0 * delta(i, j) / d - 4.0 * p[i] * p[j] / d2),
                        DMatrix::from_fn(n, n, |j, k| {
                            -4.0 * (delta(i, j) * p[k] + delta(i, k) * p[j] + delta(j, k) * p[i])
                                / d2
                                + 16.0 * p[i] * p[j] * p[k] / d3
                        }),
                    )
                }
            }
            Kind::Hyperboloid(i) => {
                let last = n - 1;
                let t = p[last];
                let (t2, t3) = (t * t, t * t * t);
                if i == 0 || i == n {
                    let sq: f64 = p.iter().map(|x| x * x).sum();
                    let a = if i == 0 { sq + 1.0 } else { sq - 1.0 };
                    (
                        a / (2.0 * t),
                        DVector::from_fn(n, |j, _| p[j] / t - delta(j, last) * a / (2.0 * t2)),
                        DMatrix::from_fn(n, n, |j, k| {
                            delta(j, k) / t - p[j] * delta(k, last) / t2 - delta(j, last) * p[k] / t2
                                + delta(j, last) * delta(k, last) * a / t3
                        }),
                    )
                } else {
                    let m = i - 1;
                    (
                        p[m] / t,
                        DVector::from_fn(n, |j, _| delta(j, m) / t - delta(j, last) * p[m] / t2),
                        DMatrix::from_fn(n, n, |j, k| {
                            -delta(j, m) * delta(k, last) / t2 - delta(j, last) * delta(k, m) / t2
                                + 2.0 * delta(j, last) * delta(k, last) * p[m] / t3
                        }),
                    )
                }
            }
            Kind::SchwarzschildPotential { mass } => {
                let r = fd::norm(p);
                let k = (n - 2) as f64;
                let alpha = mass / (2.0 * r.powi(n as i32 - 2));
                let q = 1.0 + alpha;
                let d1 = 2.0 * k * alpha / (r * q * q);
                let d2 = 2.0 * k * alpha / (r * r * q * q) * (-k - 1.0 + 2.0 * k * alpha / q);
                let (grad, hess) = radial_derivatives(p, r, d1, d2);
                ((1.0 - alpha) / q, grad, hess)
            }
        }
    }
}

impl ScalarField for CatalogField {
    fn label(&self) -> String {
        self.label.clone()
    }
    fn value(&self, p: &[f64]) -> f64 {
        self.jet(p).0
    }
    fn gradient(&self, p: &[f64]) -> Option<DVector<f64>> {
        Some(self.jet(p).1)
    }
    fn hessian(&self, p: &[f64]) -> Option<DMatrix<f64>> {
        Some(self.jet(p).2)
    }
}

/// The possible static potentials of a geometry, as an ordered basis.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialBasis {
    pub geometry: Geometry,
    pub fields: Vec<CatalogField>,
}

impl PotentialBasis {
    pub fn len(&self) -> usize {
        self.fields.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fields.is_empty()
    }

    pub fn labels(&self) -> Vec<String> {
        self.fields.iter().map(|f| f.label.clone()).collect()
    }

    /// The field `Σ c_j u_j`.
    pub fn combination(&self, coefficients: &[f64]) -> Result<Combination<'_>> {
        if coefficients.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: coefficients.len(),
            });
        }
        Ok(Combination {
            basis: self,
            coefficients: coefficients.to_vec(),
        })
    }
}

/// Linear combination of basis fields; derivatives stay analytic.
#[derive(Debug, Clone)]
pub struct Combination<'a> {
    basis: &'a PotentialBasis,
    coefficients: Vec<f64>,
}

impl Combination<'_> {
    fn jet(&self, p: &[f64]) -> (f64, DVector<f64>, DMatrix<f64>) {
        let n = self.basis.geometry.dim();
        let mut out = (0.0, DVector::zeros(n), DMatrix::zeros(n, n));
        for (f, c) in self.basis.fields.iter().zip(&self.coefficients) {
            let (v, g, h) = f.jet(p);
            out.0 += c * v;
            out.1 += g * *c;
            out.2 += h * *c;
        }
        out
    }
}

impl ScalarField for Combination<'_> {
    fn label(&self) -> String {
        let terms: Vec<String> = self
            .basis
            .fields
            .iter()
            .zip(&self.coefficients)
            .filter(|(_, c)| **c != 0.0)
            .map(|(f, c)| format!("{c}·{}", f.label))
            .collect();
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join(" + ")
        }
    }
    fn value(&self, p: &[f64]) -> f64 {
        self.jet(p).0
    }
    fn gradient(&self, p: &[f64]) -> Option<DVector<f64>> {
        Some(self.jet(p).1)
    }
    fn hessian(&self, p: &[f64]) -> Option<DMatrix<f64>> {
        Some(self.jet(p).2)
    }
}

/// Basis of possible static potentials: `{1, x₁, …, xₙ}` on `ℝⁿ`, the
/// ambient coordinates on `Sⁿ`, the hyperboloid coordinates on `ℍⁿ` and the
/// single Schwarzschild potential.
pub fn potential_basis(geo: &Geometry) -> PotentialBasis {
    let n = geo.dim();
    let fields = match geo.kind() {
        GeometryKind::Euclidean => {
            let mut v = vec![CatalogField::new(Kind::Constant, n, "1".into())];
            v.extend((0..n).map(|i| CatalogField::new(Kind::Coordinate(i), n, format!("x{}", i + 1))));
            v
        }
        GeometryKind::Sphere => (0..=n)
            .map(|i| CatalogField::new(Kind::SphereAmbient(i), n, format!("x{}", i + 1)))
            .collect(),
        GeometryKind::HyperbolicHalfSpace => (0..=n)
            .map(|i| CatalogField::new(Kind::Hyperboloid(i), n, format!("x{i}")))
            .collect(),
        GeometryKind::Schwarzschild => vec![CatalogField::new(
            Kind::SchwarzschildPotential {
                mass: geo.mass().unwrap_or(0.0),
            },
            n,
            "u_schw".into(),
        )],
    };
    PotentialBasis {
        geometry: *geo,
        fields,
    }
}

/// Ambient coordinates `(x₁, …, x_{n+1})` of a stereographic chart point.
pub fn sphere_ambient(u: &[f64]) -> Vec<f64> {
    let d = 1.0 + u.iter().map(|x| x * x).sum::<f64>();
    let mut x: Vec<f64> = u.iter().map(|ui| 2.0 * ui / d).collect();
    x.push(2.0 / d - 1.0);
    x
}

/// Stereographic chart point of `x ∈ Sⁿ` (projection from the south pole).
pub fn sphere_chart(x: &[f64]) -> Result<Vec<f64>> {
    let n = x.len() - 1;
    let k = 1.0 + x[n];
    if k.abs() < 1e-12 {
        return Err(Error::PointOutsideChart);
    }
    Ok(x[..n].iter().map(|xi| xi / k).collect())
}

/// A point `(x₀, x₁, …, xₙ)` of Minkowski space.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperboloidPoint {
    pub coords: Vec<f64>,
}

impl HyperboloidPoint {
    /// `Q(x) = −x₀² + Σ x_i²`.
    pub fn quadratic_form(&self) -> f64 {
        -self.coords[0] * self.coords[0] + self.coords[1..].iter().map(|x| x * x).sum::<f64>()
    }
}

/// Inverse stereographic projection of the unit ball onto the hyperboloid.
pub fn hyperboloid_from_ball(u: &[f64]) -> Result<HyperboloidPoint> {
    let s: f64 = u.iter().map(|x| x * x).sum();
    if !(s < 1.0) {
        return Err(Error::PointOutsideBall);
    }
    let w = 2.0 / (1.0 - s);
    let mut coords = vec![w - 1.0];
    coords.extend(u.iter().map(|x| w * x));
    Ok(HyperboloidPoint { coords })
}

/// Conformal map from the upper half-space onto the unit ball.
pub fn ball_from_halfspace(y: &[f64]) -> Result<Vec<f64>> {
    let n = y.len();
    let t = y[n - 1];
    if !(t > 0.0) {
        return Err(Error::PointOutsideChart);
    }
    let flat: f64 = y[..n - 1].iter().map(|x| x * x).sum();
    let den = flat + (t + 1.0) * (t + 1.0);
    let mut u: Vec<f64> = y[..n - 1].iter().map(|x| 2.0 * x / den).collect();
    u.push(1.0 - 2.0 * (t + 1.0) / den);
    Ok(u)
}

/// Hyperboloid coordinates of a half-space point from the direct formulas.
pub fn hyperboloid_from_halfspace(y: &[f64]) -> Result<HyperboloidPoint> {
    let n = y.len();
    let t = y[n - 1];
    if !(t > 0.0) {
        return Err(Error::PointOutsideChart);
    }
    let sq: f64 = y.iter().map(|x| x * x).sum();
    let mut coords = vec![(sq + 1.0) / (2.0 * t)];
    coords.extend(y[..n - 1].iter().map(|x| x / t));
    coords.push((sq - 1.0) / (2.0 * t));
    Ok(HyperboloidPoint { coords })
}

/// Relative defect `‖J^T g_ball J − y_n^{−2} δ‖∞ · y_n²` of the pulled-back
/// ball metric under [`ball_from_halfspace`], with `J` by finite differences.
pub fn halfspace_conformality_defect(y: &[f64]) -> Result<f64> {
    let n = y.len();
    let t = y[n - 1];
    let map = |q: &[f64]| ball_from_halfspace(q);
    let h = fd::first_step(fd::norm(y)).min(0.25 * t);
    let mut jac = DMatrix::zeros(n, n);
    for j in 0..n {
        let col = fd::partial_vec(&map, y, j, h)?;
        for i in 0..n {
            jac[(i, j)] = col[i];
        }
    }
    let u = ball_from_halfspace(y)?;
    let s: f64 = u.iter().map(|x| x * x).sum();
    let scale = 4.0 / ((1.0 - s) * (1.0 - s));
    let pulled = jac.transpose() * &jac * scale;
    let target = DMatrix::<f64>::identity(n, n) / (t * t);
    Ok((pulled - target).amax() * t * t)
}
