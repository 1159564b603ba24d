//! Parametrized hypersurfaces in a chart: the umbilic families of the model
//! geometries plus one non-umbilic test immersion.
//!
//! Every family reduces to a Euclidean sphere, a Euclidean plane or an
//! ellipsoid in the chart, each with analytic first and second derivatives
//! of its parametrization. Sign conventions: `h(X, Y) = −⟨ν, D_X Y⟩` and
//! `H = tr_ĝ h`, so the unit sphere of `ℝⁿ` with its outward normal has
//! `H = n − 1`.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;
use core::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fd;
use crate::geom::Geometry;

/// Minimum chart height kept by samples of half-space families.
const HALF_SPACE_FLOOR: f64 = 0.05;
/// Clearance of sampled polar angles from the parametrization poles.
const POLE_MARGIN: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    /// Normal points away from the enclosed side: out of the bounded region
    /// for spheres and caps, toward increasing offset for planes.
    OutwardFromEnclosed,
    InwardToEnclosed,
}

impl Orientation {
    pub fn sign(self) -> f64 {
        match self {
            Orientation::OutwardFromEnclosed => 1.0,
            Orientation::InwardToEnclosed => -1.0,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Orientation::OutwardFromEnclosed => Orientation::InwardToEnclosed,
            Orientation::InwardToEnclosed => Orientation::OutwardFromEnclosed,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    EuclideanSphere { center: Vec<f64>, radius: f64 },
    /// `{x : ⟨normal, x⟩ = offset}`; the enclosed side is `⟨normal, x⟩ < offset`.
    Hyperplane { normal: Vec<f64>, offset: f64 },
    /// Boundary of the cap `{x ∈ Sⁿ : ⟨axis, x⟩ ≥ cos angle}` (axis in `ℝⁿ⁺¹`).
    SphericalCap { axis: Vec<f64>, angle: f64 },
    /// Euclidean unit sphere centred at height `height` in the half-space
    /// model (radius normalized by the scaling isometry).
    HalfSpaceSphere { height: f64 },
    /// `{y_n = height}`; enclosed side `y_n < height`.
    HalfSpacePlaneParallel { height: f64 },
    /// `{cos α · y_n = sin α · y_1}`; enclosed side `⟨(−sin α, 0, …, cos α), y⟩ < 0`.
    HalfSpacePlaneAngled { angle: f64 },
    /// Axis-aligned ellipsoid; not umbilic unless all semi-axes agree.
    Ellipsoid { center: Vec<f64>, semi_axes: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq)]
enum Shape {
    Sphere {
        center: Vec<f64>,
        radius: f64,
        /// Whether the enclosed side is the chart ball.
        ball_enclosed: bool,
    },
    Plane {
        origin: Vec<f64>,
        normal: Vec<f64>,
        tangents: Vec<Vec<f64>>,
        /// Sampling box per tangent coefficient.
        ranges: Vec<(f64, f64)>,
    },
    Ellipsoid {
        center: Vec<f64>,
        semi_axes: Vec<f64>,
    },
}

/// A hypersurface in the chart of an `n`-dimensional geometry.
#[derive(Debug, Clone, PartialEq)]
pub struct Hypersurface {
    family: Family,
    orientation: Orientation,
    dim: usize,
    shape: Shape,
}

/// Geometric data of a hypersurface at one parameter point.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceGeometryData {
    pub point: Vec<f64>,
    /// Columns are `∂_a σ`.
    pub tangents: DMatrix<f64>,
    /// Contravariant unit normal, `g(ν, ν) = 1`.
    pub normal: DVector<f64>,
    pub first_form: DMatrix<f64>,
    pub second_form: DMatrix<f64>,
    pub mean: f64,
}

/// Position, Jacobian and second derivatives of a parametrization.
#[derive(Debug, Clone)]
pub struct Embedding {
    pub point: Vec<f64>,
    pub jacobian: DMatrix<f64>,
    /// `second[a * (n−1) + b]` is `∂_a ∂_b σ`.
    pub second: Vec<DVector<f64>>,
}

#[derive(Clone, Copy)]
enum Trig {
    Sin,
    Cos,
    One,
}

fn trig(kind: Trig, q: f64, order: usize) -> f64 {
    match (kind, order % 4) {
        (Trig::One, 0) => 1.0,
        (Trig::One, _) => 0.0,
        (Trig::Sin, 0) => q.sin(),
        (Trig::Sin, 1) => q.cos(),
        (Trig::Sin, 2) => -q.sin(),
        (Trig::Sin, _) => -q.cos(),
        (Trig::Cos, 0) => q.cos(),
        (Trig::Cos, 1) => -q.sin(),
        (Trig::Cos, 2) => -q.cos(),
        (Trig::Cos, _) => q.sin(),
    }
}

/// Hyperspherical parametrization of the unit sphere `S^{n−1} ⊂ ℝⁿ` whose
/// polar axis is the last coordinate: `e_n = cos q_0`,
/// `e_{n−1} = sin q_0 cos q_1`, …, with `q_{n−2}` the azimuth.
pub fn unit_sphere(n: usize, q: &[f64]) -> Embedding {
    let m = n - 1;
    let factor = |c: usize, j: usize| {
        let t = n - 1 - c;
        if j < t {
            Trig::Sin
        } else if j == t {
            Trig::Cos
        } else {
            Trig::One
        }
    };
    let component = |c: usize, orders: &[usize]| -> f64 {
        (0..m).map(|j| trig(factor(c, j), q[j], orders[j])).product()
    };
    let mut orders = vec![0usize; m];
    let point: Vec<f64> = (0..n).map(|c| component(c, &orders)).collect();
    let jacobian = DMatrix::from_fn(n, m, |c, a| {
        let mut o = vec![0usize; m];
        o[a] = 1;
        component(c, &o)
    });
    let mut second = Vec::with_capacity(m * m);
    for a in 0..m {
        for b in 0..m {
            orders.iter_mut().for_each(|o| *o = 0);
            orders[a] += 1;
            orders[b] += 1;
            second.push(DVector::from_fn(n, |c, _| component(c, &orders)));
        }
    }
    Embedding {
        point,
        jacobian,
        second,
    }
}

fn unit(v: &[f64]) -> Result<Vec<f64>> {
    let len = fd::norm(v);
    if !(len > 0.0 && len.is_finite()) {
        return Err(Error::InvalidParameters("direction must be a non-zero finite vector"));
    }
    Ok(v.iter().map(|x| x / len).collect())
}

/// Orthonormal basis of the complement of a unit vector (Gram–Schmidt
/// against the coordinate axes).
fn complement_basis(normal: &[f64]) -> Vec<Vec<f64>> {
    let n = normal.len();
    let mut basis: Vec<Vec<f64>> = vec![normal.to_vec()];
    for axis in 0..n {
        let mut v = vec![0.0; n];
        v[axis] = 1.0;
        for b in &basis {
            let d: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= d * y);
        }
        let len = fd::norm(&v);
        if len > 1e-8 {
            basis.push(v.iter().map(|x| x / len).collect());
        }
        if basis.len() == n {
            break;
        }
    }
    basis.remove(0);
    basis
}

/// Radical inverse of `index` in base `base`.
fn radical_inverse(mut index: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut out = 0.0;
    while index > 0 {
        out += (index % base) as f64 * f;
        index /= base;
        f *= inv;
    }
    out
}

const PRIMES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Largest ambient dimension whose hypersurfaces can be sampled.
pub const MAX_SURFACE_DIM: usize = PRIMES.len() + 1;

impl Hypersurface {
    fn with_shape(family: Family, dim: usize, shape: Shape) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidParameters("dimension must be at least 2"));
        }
        if dim > MAX_SURFACE_DIM {
            return Err(Error::InvalidParameters("dimension too large for boundary sampling"));
        }
        Ok(Self {
            family,
            orientation: Orientation::OutwardFromEnclosed,
            dim,
            shape,
        })
    }

    pub fn euclidean_sphere(center: &[f64], radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidParameters("sphere radius must be positive"));
        }
        Self::with_shape(
            Family::EuclideanSphere {
                center: center.to_vec(),
                radius,
            },
            center.len(),
            Shape::Sphere {
                center: center.to_vec(),
                radius,
                ball_enclosed: true,
            },
        )
    }

    pub fn hyperplane(normal: &[f64], offset: f64) -> Result<Self> {
        let normal = unit(normal)?;
        let tangents = complement_basis(&normal);
        let ranges = vec![(-2.0, 2.0); tangents.len()];
        Self::with_shape(
            Family::Hyperplane {
                normal: normal.clone(),
                offset,
            },
            normal.len(),
            Shape::Plane {
                origin: normal.iter().map(|x| x * offset).collect(),
                normal,
                tangents,
                ranges,
            },
        )
    }

    /// Cap about the north pole `e_{n+1}` of `Sⁿ`.
    pub fn spherical_cap(dim: usize, angle: f64) -> Result<Self> {
        let mut axis = vec![0.0; dim + 1];
        axis[dim] = 1.0;
        Self::spherical_cap_about(&axis, angle)
    }

    /// Cap `{⟨axis, x⟩ ≥ cos angle}`, realized in the stereographic chart as
    /// the Euclidean sphere `|u − a'/k| = sin(angle)/|k|` with
    /// `k = cos angle + a_{n+1}`.
    pub fn spherical_cap_about(axis: &[f64], angle: f64) -> Result<Self> {
        if !(angle > 0.0 && angle < PI) {
            return Err(Error::InvalidParameters("cap angle must lie in (0, π)"));
        }
        if axis.len() < 3 {
            return Err(Error::InvalidParameters("cap axis must live in ℝⁿ⁺¹ with n ≥ 2"));
        }
        let axis = unit(axis)?;
        let dim = axis.len() - 1;
        let k = angle.cos() + axis[dim];
        if k.abs() < 1e-2 {
            return Err(Error::InvalidParameters(
                "cap boundary passes too close to the projection pole",
            ));
        }
        let center = axis[..dim].iter().map(|a| a / k).collect();
        Self::with_shape(
            Family::SphericalCap {
                axis: axis.clone(),
                angle,
            },
            dim,
            Shape::Sphere {
                center,
                radius: angle.sin() / k.abs(),
                ball_enclosed: k > 0.0,
            },
        )
    }

    /// Euclidean sphere of radius `radius` centred at height `center_height`
    /// in the half-space model, normalized to radius one.
    pub fn halfspace_sphere(dim: usize, center_height: f64, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidParameters("sphere radius must be positive"));
        }
        let height = center_height / radius;
        if !(height > -1.0 && height.is_finite()) {
            return Err(Error::InvalidParameters("sphere must meet the half-space (height > −radius)"));
        }
        let mut center = vec![0.0; dim];
        center[dim - 1] = height;
        Self::with_shape(
            Family::HalfSpaceSphere { height },
            dim,
            Shape::Sphere {
                center,
                radius: 1.0,
                ball_enclosed: true,
            },
        )
    }

    pub fn halfspace_plane_parallel(dim: usize, height: f64) -> Result<Self> {
        if !(height > 0.0 && height.is_finite()) {
            return Err(Error::InvalidParameters("plane height must be positive"));
        }
        let mut origin = vec![0.0; dim];
        origin[dim - 1] = height;
        let mut normal = vec![0.0; dim];
        normal[dim - 1] = 1.0;
        let tangents = (0..dim - 1)
            .map(|a| {
                let mut t = vec![0.0; dim];
                t[a] = 1.0;
                t
            })
            .collect();
        Self::with_shape(
            Family::HalfSpacePlaneParallel { height },
            dim,
            Shape::Plane {
                origin,
                normal,
                tangents,
                ranges: vec![(-2.0, 2.0); dim - 1],
            },
        )
    }

    pub fn halfspace_plane_angled(dim: usize, angle: f64) -> Result<Self> {
        if !(angle > 0.0 && angle < PI) {
            return Err(Error::InvalidParameters("plane angle must lie in (0, π)"));
        }
        let (s, c) = angle.sin_cos();
        let mut normal = vec![0.0; dim];
        normal[0] = -s;
        normal[dim - 1] = c;
        let mut first = vec![0.0; dim];
        first[0] = c;
        first[dim - 1] = s;
        let mut tangents = vec![first];
        for a in 1..dim - 1 {
            let mut t = vec![0.0; dim];
            t[a] = 1.0;
            tangents.push(t);
        }
        let mut ranges = vec![(0.2, 3.0)];
        ranges.extend(core::iter::repeat_n((-2.0, 2.0), dim - 2));
        Self::with_shape(
            Family::HalfSpacePlaneAngled { angle },
            dim,
            Shape::Plane {
                origin: vec![0.0; dim],
                normal,
                tangents,
                ranges,
            },
        )
    }

    pub fn ellipsoid(center: &[f64], semi_axes: &[f64]) -> Result<Self> {
        if center.len() != semi_axes.len() || semi_axes.iter().any(|a| !(*a > 0.0)) {
            return Err(Error::InvalidParameters("ellipsoid needs positive semi-axes per coordinate"));
        }
        Self::with_shape(
            Family::Ellipsoid {
                center: center.to_vec(),
                semi_axes: semi_axes.to_vec(),
            },
            center.len(),
            Shape::Ellipsoid {
                center: center.to_vec(),
                semi_axes: semi_axes.to_vec(),
            },
        )
    }

    pub fn with_orientation(mut self, orientation: Orientation) -> Self {
        self.orientation = orientation;
        self
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    /// Dimension of the ambient chart.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn param_dim(&self) -> usize {
        self.dim - 1
    }

    /// Chart ball equal to the enclosed side, when there is one.
    pub fn chart_ball(&self) -> Option<(Vec<f64>, f64)> {
        match (&self.family, &self.shape) {
            (
                Family::HalfSpaceSphere { height },
                Shape::Sphere { center, radius, .. },
            ) => (*height > 1.0 + HALF_SPACE_FLOOR).then(|| (center.clone(), *radius)),
            (
                _,
                Shape::Sphere {
                    center,
                    radius,
                    ball_enclosed: true,
                },
            ) => Some((center.clone(), *radius)),
            _ => None,
        }
    }

    /// Whether the enclosed side is the exterior of a chart sphere.
    pub(crate) fn chart_sphere(&self) -> Option<(Vec<f64>, f64, bool)> {
        match &self.shape {
            Shape::Sphere {
                center,
                radius,
                ball_enclosed,
            } => Some((center.clone(), *radius, *ball_enclosed)),
            _ => None,
        }
    }

    /// Whether a chart point lies strictly on the enclosed side.
    pub fn encloses(&self, p: &[f64]) -> bool {
        match &self.shape {
            Shape::Sphere {
                center,
                radius,
                ball_enclosed,
            } => {
                let d: f64 = p.iter().zip(center).map(|(x, c)| (x - c) * (x - c)).sum();
                (d < radius * radius) == *ball_enclosed
            }
            Shape::Plane { origin, normal, .. } => {
                p.iter().zip(origin).zip(normal).map(|((x, o), v)| (x - o) * v).sum::<f64>() < 0.0
            }
            Shape::Ellipsoid { center, semi_axes } => {
                p.iter()
                    .zip(center)
                    .zip(semi_axes)
                    .map(|((x, c), a)| ((x - c) / a).powi(2))
                    .sum::<f64>()
                    < 1.0
            }
        }
    }

    fn half_space(&self) -> bool {
        matches!(
            self.family,
            Family::HalfSpaceSphere { .. }
                | Family::HalfSpacePlaneParallel { .. }
                | Family::HalfSpacePlaneAngled { .. }
        )
    }

    /// Analytic parametrization with first and second derivatives.
    pub fn embed(&self, q: &[f64]) -> Result<Embedding> {
        if q.len() != self.param_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.param_dim(),
                found: q.len(),
            });
        }
        let n = self.dim;
        Ok(match &self.shape {
            Shape::Sphere { center, radius, .. } => {
                let e = unit_sphere(n, q);
                Embedding {
                    point: center.iter().zip(&e.point).map(|(c, x)| c + radius * x).collect(),
                    jacobian: e.jacobian * *radius,
                    second: e.second.into_iter().map(|s| s * *radius).collect(),
                }
            }
            Shape::Plane {
                origin, tangents, ..
            } => {
                let mut point = origin.clone();
                for (t, qa) in tangents.iter().zip(q) {
                    point.iter_mut().zip(t).for_each(|(x, ti)| *x += qa * ti);
                }
                Embedding {
                    point,
                    jacobian: DMatrix::from_fn(n, n - 1, |i, a| tangents[a][i]),
                    second: vec![DVector::zeros(n); (n - 1) * (n - 1)],
                }
            }
            Shape::Ellipsoid { center, semi_axes } => {
                let e = unit_sphere(n, q);
                let scale = DMatrix::from_diagonal(&DVector::from_column_slice(semi_axes));
                Embedding {
                    point: (0..n).map(|i| center[i] + semi_axes[i] * e.point[i]).collect(),
                    jacobian: &scale * e.jacobian,
                    second: e.second.iter().map(|s| &scale * s).collect(),
                }
            }
        })
    }

    pub fn param_map(&self, q: &[f64]) -> Result<Vec<f64>> {
        Ok(self.embed(q)?.point)
    }

    /// Flat unit normal pointing away from the enclosed side.
    fn flat_outward(&self, q: &[f64], point: &[f64]) -> Vec<f64> {
        match &self.shape {
            Shape::Sphere {
                center,
                radius,
                ball_enclosed,
            } => {
                let s = if *ball_enclosed { 1.0 } else { -1.0 };
                point.iter().zip(center).map(|(x, c)| s * (x - c) / radius).collect()
            }
            Shape::Plane { normal, .. } => normal.clone(),
            Shape::Ellipsoid { semi_axes, .. } => {
                let e = unit_sphere(self.dim, q);
                let v: Vec<f64> = e.point.iter().zip(semi_axes).map(|(x, a)| x / a).collect();
                let len = fd::norm(&v);
                v.iter().map(|x| x / len).collect()
            }
        }
    }

    /// Closed-form flat mean curvature, outward from the enclosed side.
    fn flat_mean_outward(&self) -> Result<f64> {
        let n = self.dim as f64;
        match &self.shape {
            Shape::Sphere {
                radius,
                ball_enclosed,
                ..
            } => Ok((if *ball_enclosed { 1.0 } else { -1.0 }) * (n - 1.0) / radius),
            Shape::Plane { .. } => Ok(0.0),
            Shape::Ellipsoid { .. } => Err(Error::NoClosedForm),
        }
    }

    /// Flat unit normal with the surface's orientation applied.
    pub fn flat_normal(&self, q: &[f64]) -> Result<Vec<f64>> {
        let point = self.param_map(q)?;
        let s = self.orientation.sign();
        Ok(self.flat_outward(q, &point).into_iter().map(|x| s * x).collect())
    }

    /// Normal, fundamental forms and mean curvature at `q`.
    pub fn surface_data(&self, geo: &Geometry, q: &[f64]) -> Result<SurfaceGeometryData> {
        if geo.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: geo.dim(),
                found: self.dim,
            });
        }
        let emb = self.embed(q)?;
        geo.check(&emb.point)?;
        let n = self.dim;
        let m = n - 1;
        let (g, ginv) = geo.metric(&emb.point)?;
        let jac = &emb.jacobian;
        let first_form = jac.transpose() * &g * jac;
        // Hadamard ratio: insensitive to the scale of individual tangents,
        // which shrink like products of sines in high dimension.
        let diagonal: f64 = (0..m).map(|a| first_form[(a, a)]).product();
        if !(diagonal > 0.0) || first_form.determinant() <= 1e-12 * diagonal {
            return Err(Error::DegenerateImmersion);
        }
        // Covector annihilating the tangent space: signed maximal minors.
        let conormal = DVector::from_fn(n, |i, _| {
            let minor = jac.clone().remove_row(i);
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            sign * minor.determinant()
        });
        let mut normal = &ginv * conormal;
        let len = (normal.transpose() * &g * &normal)[(0, 0)].sqrt();
        if !(len > 0.0 && len.is_finite()) {
            return Err(Error::DegenerateImmersion);
        }
        normal /= len;
        let reference = self.flat_outward(q, &emb.point);
        let along: f64 = normal.iter().zip(&reference).map(|(a, b)| a * b).sum();
        if along * self.orientation.sign() < 0.0 {
            normal = -normal;
        }
        let gamma = geo.christoffels(&emb.point)?;
        let lowered = &g * &normal;
        let second_form = DMatrix::from_fn(m, m, |a, b| {
            let accel = &emb.second[a * m + b]
                + gamma.contract(&jac.column(a).into_owned(), &jac.column(b).into_owned());
            -lowered.dot(&accel)
        });
        let inv_first = first_form
            .clone()
            .try_inverse()
            .ok_or(Error::DegenerateImmersion)?;
        let mean = inv_first.component_mul(&second_form).sum();
        Ok(SurfaceGeometryData {
            point: emb.point,
            tangents: emb.jacobian,
            normal,
            first_form,
            second_form,
            mean,
        })
    }

    /// `‖h − (H/(n−1)) ĝ‖∞ / ‖ĝ‖∞`.
    pub fn umbilic_defect(&self, geo: &Geometry, q: &[f64]) -> Result<f64> {
        let d = self.surface_data(geo, q)?;
        let m = (self.dim - 1) as f64;
        let diff = &d.second_form - &d.first_form * (d.mean / m);
        Ok(diff.amax() / d.first_form.amax())
    }

    /// Mean curvature from the conformal-change formula
    /// `H = e^{−φ}(H₀ + (n−1)⟨∇φ, N₀⟩)`, with `H₀`, `N₀` the flat mean
    /// curvature and unit normal.
    pub fn conformal_mean(&self, geo: &Geometry, q: &[f64]) -> Result<f64> {
        let point = self.param_map(q)?;
        let cf = geo.conformal_factor(&point)?;
        let s = self.orientation.sign();
        let flat_mean = s * self.flat_mean_outward()?;
        let normal = self.flat_outward(q, &point);
        let along: f64 = cf.gradient.iter().zip(&normal).map(|(d, nu)| d * s * nu).sum();
        Ok((-cf.value).exp() * (flat_mean + (self.dim as f64 - 1.0) * along))
    }

    fn family_admits(&self, p: &[f64]) -> bool {
        !self.half_space() || p[self.dim - 1] >= self.floor()
    }

    fn floor(&self) -> f64 {
        match self.family {
            Family::HalfSpaceSphere { height } => HALF_SPACE_FLOOR.min(0.25 * (1.0 + height)),
            _ => HALF_SPACE_FLOOR,
        }
    }

    /// Map a point of the unit cube to parameter space.
    fn param_from_unit(&self, v: &[f64]) -> Vec<f64> {
        let m = self.dim - 1;
        match &self.shape {
            Shape::Plane { ranges, .. } => v
                .iter()
                .zip(ranges)
                .map(|(t, (lo, hi))| lo + t * (hi - lo))
                .collect(),
            _ => {
                // Polar range of q_0 limited so that the last chart coordinate
                // stays above the half-space floor.
                let (cn, rn) = match &self.shape {
                    Shape::Sphere { center, radius, .. } => (center[m], *radius),
                    _ => (0.0, 1.0),
                };
                let kappa = if self.half_space() {
                    ((self.floor() - cn) / rn).clamp(-1.0, 1.0)
                } else {
                    -1.0
                };
                let top = kappa.acos();
                let mut q = Vec::with_capacity(m);
                for (j, t) in v.iter().enumerate() {
                    let azimuth = j + 1 == m;
                    let value = if azimuth {
                        if j == 0 && kappa > -1.0 {
                            // S¹: symmetric arc around the top.
                            let span = top * (1.0 - 1e-3);
                            -span + 2.0 * span * t
                        } else {
                            2.0 * PI * t
                        }
                    } else {
                        let hi = if j == 0 { top.min(PI - POLE_MARGIN) } else { PI - POLE_MARGIN };
                        let (clo, chi) = (POLE_MARGIN.cos(), hi.cos());
                        (clo - t * (clo - chi)).acos()
                    };
                    q.push(value);
                }
                q
            }
        }
    }

    fn sample_filtered<P: Fn(&[f64]) -> bool>(&self, count: usize, seed: u64, keep: P) -> Vec<Vec<f64>> {
        let m = self.dim - 1;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let shift: Vec<f64> = (0..m).map(|_| rng.random::<f64>()).collect();
        let mut out = Vec::with_capacity(count);
        let limit = 200 * count as u64 + 1000;
        let mut index = 1u64;
        while out.len() < count && index < limit {
            let v: Vec<f64> = (0..m)
                .map(|d| {
                    let x = radical_inverse(index, PRIMES[d]) + shift[d];
                    x - x.floor()
                })
                .collect();
            index += 1;
            let q = self.param_from_unit(&v);
            let Ok(p) = self.param_map(&q) else { continue };
            if self.family_admits(&p) && keep(&p) {
                out.push(q);
            }
        }
        out
    }

    /// Deterministic quasi-uniform parameter samples (a shifted Halton
    /// sequence) whose images avoid chart-singular regions of the family.
    pub fn sample_boundary(&self, count: usize, seed: u64) -> Vec<Vec<f64>> {
        self.sample_filtered(count, seed, |_| true)
    }

    /// As [`Hypersurface::sample_boundary`], additionally keeping images a
    /// fixed clearance inside the chart of `geo`.
    pub fn sample_boundary_on(&self, geo: &Geometry, count: usize, seed: u64) -> Vec<Vec<f64>> {
        self.sample_filtered(count, seed, |p| geo.contains_with_margin(p, 0.05))
    }
}
