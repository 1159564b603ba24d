//! The four model geometries as conformal rescalings `g = e^{2φ} δ` of a flat
//! chart, together with their connection and curvature.
//!
//! Conformal factors and their first two derivatives are closed forms. The
//! Christoffel symbols follow from the conformal identity
//! `Γ^k_ij = δ^k_i ∂_jφ + δ^k_j ∂_iφ − δ_ij ∂_kφ`; the Ricci tensor is then
//! assembled from finite differences of those symbols, so curvature values
//! are genuinely computed rather than looked up.
//!
//! All tensors carry lower (coordinate) indices. Raising goes through the
//! inverse metric explicitly.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fd;

/// Points closer than this to `r = 0` (Schwarzschild) or `y_n = 0`
/// (half-space) are rejected.
pub const CHART_GUARD: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GeometryKind {
    Euclidean,
    /// Round unit sphere in the stereographic chart from the south pole.
    Sphere,
    /// Upper half-space model of hyperbolic space.
    HyperbolicHalfSpace,
    /// Isotropic Schwarzschild metric on `ℝⁿ \ {0}`.
    Schwarzschild,
}

impl GeometryKind {
    pub fn name(self) -> &'static str {
        match self {
            GeometryKind::Euclidean => "euclidean",
            GeometryKind::Sphere => "sphere",
            GeometryKind::HyperbolicHalfSpace => "hyperbolic",
            GeometryKind::Schwarzschild => "schwarzschild",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geometry {
    kind: GeometryKind,
    dim: usize,
    mass: f64,
}

/// `φ` and its coordinate partials at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct ConformalFactor {
    pub value: f64,
    pub gradient: DVector<f64>,
    pub hessian: DMatrix<f64>,
}

/// Christoffel symbols of the second kind, stored as `data[k][i][j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Christoffel {
    dim: usize,
    data: Vec<f64>,
}

impl Christoffel {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![0.0; dim * dim * dim],
        }
    }

    pub fn from_flat(dim: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), dim * dim * dim);
        Self { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `Γ^k_{ij}`.
    #[inline]
    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        self.data[(k * self.dim + i) * self.dim + j]
    }

    #[inline]
    fn set(&mut self, k: usize, i: usize, j: usize, v: f64) {
        let n = self.dim;
        self.data[(k * n + i) * n + j] = v;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `Γ^k_ij a^i b^j` as a vector over `k`.
    pub fn contract(&self, a: &DVector<f64>, b: &DVector<f64>) -> DVector<f64> {
        let n = self.dim;
        DVector::from_fn(n, |k, _| {
            let mut s = 0.0;
            for i in 0..n {
                for j in 0..n {
                    s += self.get(k, i, j) * a[i] * b[j];
                }
            }
            s
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureBundle {
    pub gamma: Christoffel,
    pub ric: DMatrix<f64>,
    pub scalar: f64,
}

/// First and second order data of a scalar field at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct DifferentialData {
    pub value: f64,
    /// Coordinate partials `∂_i u`.
    pub gradient: DVector<f64>,
    /// Covariant Hessian `∂_i∂_j u − Γ^k_ij ∂_k u`.
    pub hessian_cov: DMatrix<f64>,
    /// `g^{ij} hessian_cov_ij`.
    pub laplacian: f64,
    /// `g^{ij} ∂_i u ∂_j u`.
    pub grad_norm_sq: f64,
}

/// A scalar function on a chart, optionally with analytic derivatives.
///
/// When `gradient` or `hessian` return `None` the caller falls back to
/// central differences of `value`.
pub trait ScalarField {
    fn label(&self) -> String;
    fn value(&self, p: &[f64]) -> f64;
    fn gradient(&self, _p: &[f64]) -> Option<DVector<f64>> {
        None
    }
    fn hessian(&self, _p: &[f64]) -> Option<DMatrix<f64>> {
        None
    }
}

impl<T: ScalarField + ?Sized> ScalarField for &T {
    fn label(&self) -> String {
        (**self).label()
    }
    fn value(&self, p: &[f64]) -> f64 {
        (**self).value(p)
    }
    fn gradient(&self, p: &[f64]) -> Option<DVector<f64>> {
        (**self).gradient(p)
    }
    fn hessian(&self, p: &[f64]) -> Option<DMatrix<f64>> {
        (**self).hessian(p)
    }
}

/// A field given only by a closure; all derivatives come from finite
/// differences.
pub struct FnField<F> {
    label: String,
    f: F,
}

impl<F: Fn(&[f64]) -> f64> FnField<F> {
    pub fn new(label: impl Into<String>, f: F) -> Self {
        Self {
            label: label.into(),
            f,
        }
    }
}

impl<F: Fn(&[f64]) -> f64> ScalarField for FnField<F> {
    fn label(&self) -> String {
        self.label.clone()
    }
    fn value(&self, p: &[f64]) -> f64 {
        (self.f)(p)
    }
}

/// Derivatives of a radial function `F(|x|)` given `F'`, `F''` at `r = |x|`.
pub(crate) fn radial_derivatives(
    x: &[f64],
    r: f64,
    d1: f64,
    d2: f64,
) -> (DVector<f64>, DMatrix<f64>) {
    let n = x.len();
    let grad = DVector::from_fn(n, |i, _| d1 * x[i] / r);
    let hess = DMatrix::from_fn(n, n, |i, j| {
        let xx = x[i] * x[j] / (r * r);
        let delta = if i == j { 1.0 } else { 0.0 };
        d2 * xx + d1 * (delta - xx) / r
    });
    (grad, hess)
}

impl Geometry {
    fn build(kind: GeometryKind, dim: usize, mass: f64) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidParameters("dimension must be at least 2"));
        }
        Ok(Self { kind, dim, mass })
    }

    pub fn euclidean(dim: usize) -> Result<Self> {
        Self::build(GeometryKind::Euclidean, dim, 0.0)
    }

    pub fn sphere(dim: usize) -> Result<Self> {
        Self::build(GeometryKind::Sphere, dim, 0.0)
    }

    pub fn hyperbolic(dim: usize) -> Result<Self> {
        Self::build(GeometryKind::HyperbolicHalfSpace, dim, 0.0)
    }

    pub fn schwarzschild(dim: usize, mass: f64) -> Result<Self> {
        if dim < 3 {
            return Err(Error::InvalidParameters(
                "Schwarzschild requires dimension at least 3",
            ));
        }
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::InvalidParameters("mass must be positive"));
        }
        Self::build(GeometryKind::Schwarzschild, dim, mass)
    }

    pub fn kind(&self) -> GeometryKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Mass parameter; `None` unless Schwarzschild.
    pub fn mass(&self) -> Option<f64> {
        (self.kind == GeometryKind::Schwarzschild).then_some(self.mass)
    }

    /// `α = m / (2 r^{n−2})`.
    pub fn alpha(&self, r: f64) -> f64 {
        self.mass / (2.0 * r.powi(self.dim as i32 - 2))
    }

    /// The constant scalar curvature each model is known to carry.
    pub fn model_scalar_curvature(&self) -> f64 {
        let n = self.dim as f64;
        match self.kind {
            GeometryKind::Euclidean | GeometryKind::Schwarzschild => 0.0,
            GeometryKind::Sphere => n * (n - 1.0),
            GeometryKind::HyperbolicHalfSpace => -n * (n - 1.0),
        }
    }

    /// Whether `p` lies in the chart with at least `margin` clearance from
    /// the singular set (in addition to the fixed guard).
    pub fn contains_with_margin(&self, p: &[f64], margin: f64) -> bool {
        if p.len() != self.dim || p.iter().any(|x| !x.is_finite()) {
            return false;
        }
        match self.kind {
            GeometryKind::Euclidean | GeometryKind::Sphere => true,
            GeometryKind::HyperbolicHalfSpace => p[self.dim - 1] >= CHART_GUARD + margin,
            GeometryKind::Schwarzschild => fd::norm(p) >= CHART_GUARD + margin,
        }
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        self.contains_with_margin(p, 0.0)
    }

    pub fn check(&self, p: &[f64]) -> Result<()> {
        if p.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: p.len(),
            });
        }
        if self.contains(p) {
            Ok(())
        } else {
            Err(Error::PointOutsideChart)
        }
    }

    /// Closed-form `φ`, `∂φ`, `∂²φ`.
    pub fn conformal_factor(&self, p: &[f64]) -> Result<ConformalFactor> {
        self.check(p)?;
        let n = self.dim;
        Ok(match self.kind {
            GeometryKind::Euclidean => ConformalFactor {
                value: 0.0,
                gradient: DVector::zeros(n),
                hessian: DMatrix::zeros(n, n),
            },
            GeometryKind::Sphere => {
                let s: f64 = p.iter().map(|x| x * x).sum();
                let d = 1.0 + s;
                ConformalFactor {
                    value: (2.0 / d).ln(),
                    gradient: DVector::from_fn(n, |i, _| -2.0 * p[i] / d),
                    hessian: DMatrix::from_fn(n, n, |i, j| {
                        let delta = if i == j { 1.0 } else { 0.0 };
                        -2.0 * delta / d + 4.0 * p[i] * p[j] / (d * d)
                    }),
                }
            }
            GeometryKind::HyperbolicHalfSpace => {
                let y = p[n - 1];
                let mut gradient = DVector::zeros(n);
                gradient[n - 1] = -1.0 / y;
                let mut hessian = DMatrix::zeros(n, n);
                hessian[(n - 1, n - 1)] = 1.0 / (y * y);
                ConformalFactor {
                    value: -y.ln(),
                    gradient,
                    hessian,
                }
            }
            GeometryKind::Schwarzschild => {
                let r = fd::norm(p);
                let a = self.alpha(r);
                let nm2 = n as f64 - 2.0;
                let d1 = -2.0 * a / (r * (1.0 + a));
                let d2 = 2.0 * a * (n as f64 - 1.0 + a) / (r * r * (1.0 + a) * (1.0 + a));
                let (gradient, hessian) = radial_derivatives(p, r, d1, d2);
                ConformalFactor {
                    value: 2.0 / nm2 * (1.0 + a).ln(),
                    gradient,
                    hessian,
                }
            }
        })
    }

    /// Metric `e^{2φ}δ` and its inverse.
    pub fn metric(&self, p: &[f64]) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
        let scale = self.metric_scale(p)?;
        let id = DMatrix::<f64>::identity(self.dim, self.dim);
        Ok((&id * scale, id / scale))
    }

    /// The conformal scale `e^{2φ}`.
    pub fn metric_scale(&self, p: &[f64]) -> Result<f64> {
        Ok((2.0 * self.conformal_factor(p)?.value).exp())
    }

    pub fn christoffels(&self, p: &[f64]) -> Result<Christoffel> {
        let cf = self.conformal_factor(p)?;
        let n = self.dim;
        let d = &cf.gradient;
        let mut gamma = Christoffel::zeros(n);
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let mut v = 0.0;
                    if k == i {
                        v += d[j];
                    }
                    if k == j {
                        v += d[i];
                    }
                    if i == j {
                        v -= d[k];
                    }
                    gamma.set(k, i, j, v);
                }
            }
        }
        Ok(gamma)
    }

    /// Curvature from finite differences of the Christoffel symbols:
    /// `Ric_ij = ∂_k Γ^k_ij − ∂_j Γ^k_ik + Γ^k_kl Γ^l_ij − Γ^k_jl Γ^l_ik`.
    pub fn curvature(&self, p: &[f64]) -> Result<CurvatureBundle> {
        let gamma = self.christoffels(p)?;
        let n = self.dim;
        let h = fd::first_step(fd::norm(p));
        let field = |q: &[f64]| -> Result<Vec<f64>> {
            self.christoffels(q)
                .map(|c| c.data)
                .map_err(|_| Error::StencilOutsideChart)
        };
        let mut dgamma = Vec::with_capacity(n);
        for axis in 0..n {
            dgamma.push(Christoffel::from_flat(n, fd::partial_vec(&field, p, axis, h)?));
        }
        let ric = ricci_from_connection(&gamma, &dgamma);
        let (_, inv) = self.metric(p)?;
        let scalar = inv.component_mul(&ric).sum();
        Ok(CurvatureBundle { gamma, ric, scalar })
    }

    /// First and second order data of `u` at `p`. Analytic derivatives of
    /// `u` are used when present.
    pub fn differential<U: ScalarField + ?Sized>(
        &self,
        u: &U,
        p: &[f64],
    ) -> Result<DifferentialData> {
        self.check(p)?;
        let n = self.dim;
        let value = u.value(p);
        let guarded = |q: &[f64]| -> Result<f64> {
            if self.contains(q) {
                Ok(u.value(q))
            } else {
                Err(Error::StencilOutsideChart)
            }
        };
        let gradient = match u.gradient(p) {
            Some(g) => g,
            None => DVector::from_vec(fd::gradient(&guarded, p, fd::first_step(fd::norm(p)))?),
        };
        let second = match u.hessian(p) {
            Some(h) => h,
            None => DMatrix::from_row_slice(
                n,
                n,
                &fd::hessian(&guarded, p, fd::second_step(fd::norm(p)))?,
            ),
        };
        let gamma = self.christoffels(p)?;
        let hessian_cov = DMatrix::from_fn(n, n, |i, j| {
            second[(i, j)] - (0..n).map(|k| gamma.get(k, i, j) * gradient[k]).sum::<f64>()
        });
        let (_, inv) = self.metric(p)?;
        let laplacian = inv.component_mul(&hessian_cov).sum();
        let grad_norm_sq = (gradient.transpose() * &inv * &gradient)[(0, 0)];
        Ok(DifferentialData {
            value,
            gradient,
            hessian_cov,
            laplacian,
            grad_norm_sq,
        })
    }

    /// Deterministic cloud of admissible chart points in a bounded region
    /// typical for the geometry.
    pub fn sample_cloud(&self, count: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = self.dim;
        let mut out = Vec::with_capacity(count);
        while out.len() < count {
            let p: Vec<f64> = match self.kind {
                GeometryKind::Euclidean | GeometryKind::Sphere => {
                    (0..n).map(|_| rng.random_range(-2.0..2.0)).collect()
                }
                GeometryKind::HyperbolicHalfSpace => (0..n)
                    .map(|i| {
                        if i + 1 == n {
                            rng.random_range(0.2..3.0)
                        } else {
                            rng.random_range(-2.0..2.0)
                        }
                    })
                    .collect(),
                GeometryKind::Schwarzschild => {
                    let dir: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
                    let len = fd::norm(&dir);
                    if !(0.1..=1.0).contains(&len) {
                        continue;
                    }
                    let r = rng.random_range(0.3..5.0);
                    dir.iter().map(|x| x * r / len).collect()
                }
            };
            if self.contains_with_margin(&p, 0.05) {
                out.push(p);
            }
        }
        out
    }
}

/// Ricci tensor from a connection and its coordinate derivatives
/// (`dgamma[l]` holds `∂_l Γ`).
pub fn ricci_from_connection(gamma: &Christoffel, dgamma: &[Christoffel]) -> DMatrix<f64> {
    let n = gamma.dim();
    let mut ric = DMatrix::from_fn(n, n, |i, j| {
        let mut s = 0.0;
        for k in 0..n {
            s += dgamma[k].get(k, i, j) - dgamma[j].get(k, i, k);
            for l in 0..n {
                s += gamma.get(k, k, l) * gamma.get(l, i, j) - gamma.get(k, j, l) * gamma.get(l, i, k);
            }
        }
        s
    });
    let sym = (&ric + ric.transpose()) * 0.5;
    ric.copy_from(&sym);
    ric
}

/// Christoffel symbols from the coordinate formula
/// `½ g^{kl}(∂_i g_jl + ∂_j g_il − ∂_l g_ij)` with finite-difference metric
/// derivatives. Independent of the conformal identity used by
/// [`Geometry::christoffels`].
pub fn christoffels_from_metric(geo: &Geometry, p: &[f64]) -> Result<Christoffel> {
    let n = geo.dim();
    let (_, inv) = geo.metric(p)?;
    let h = fd::first_step(fd::norm(p));
    let metric_flat = |q: &[f64]| -> Result<Vec<f64>> {
        geo.metric(q)
            .map(|(g, _)| g.as_slice().to_vec())
            .map_err(|_| Error::StencilOutsideChart)
    };
    // dg[l][(i, j)] = ∂_l g_ij; nalgebra storage is column-major but g is symmetric.
    let mut dg = Vec::with_capacity(n);
    for l in 0..n {
        dg.push(DMatrix::from_vec(n, n, fd::partial_vec(&metric_flat, p, l, h)?));
    }
    let mut gamma = Christoffel::zeros(n);
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let mut s = 0.0;
                for l in 0..n {
                    s += inv[(k, l)] * (dg[i][(j, l)] + dg[j][(i, l)] - dg[l][(i, j)]);
                }
                gamma.set(k, i, j, 0.5 * s);
            }
        }
    }
    Ok(gamma)
}
