//! The static operator `L*u = −(Δu)g + Hess u − u·Ric`, its boundary
//! condition `u_ν ĝ − u h`, the traced system and the global identities
//! built on them.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

use nalgebra::{DMatrix, DVector};

use crate::classify::DomainSpec;
use crate::error::{Error, Result};
use crate::fd;
use crate::geom::{ricci_from_connection, Christoffel, Geometry, ScalarField};
use crate::surfaces::{unit_sphere, Hypersurface, SurfaceGeometryData};

/// Tolerance on the traced interior equation checked before integrating.
pub const TRACE_TOLERANCE: f64 = 1e-6;

/// Residuals of the interior and boundary operators.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorResidual {
    pub interior: DMatrix<f64>,
    pub boundary_tensor: DMatrix<f64>,
    pub boundary_scalar: f64,
    pub trace_interior: f64,
}

/// Boundary operator at one parameter point.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryResidual {
    /// `u_ν ĝ − u h`.
    pub tensor: DMatrix<f64>,
    /// `u_ν − (H/(n−1)) u`.
    pub scalar: f64,
    pub value: f64,
    pub normal_derivative: f64,
    pub surface: SurfaceGeometryData,
}

/// `L*u` at `p`.
pub fn lstar<U: ScalarField + ?Sized>(u: &U, geo: &Geometry, p: &[f64]) -> Result<DMatrix<f64>> {
    let d = geo.differential(u, p)?;
    let curv = geo.curvature(p)?;
    let (g, _) = geo.metric(p)?;
    Ok(&d.hessian_cov - g * d.laplacian - curv.ric * d.value)
}

/// `Δu + (R/(n−1)) u` at `p`.
pub fn trace_residual<U: ScalarField + ?Sized>(u: &U, geo: &Geometry, p: &[f64]) -> Result<f64> {
    let d = geo.differential(u, p)?;
    let curv = geo.curvature(p)?;
    Ok(d.laplacian + curv.scalar / (geo.dim() as f64 - 1.0) * d.value)
}

/// Boundary operator of `u` on `s` at parameter `q`, using the orientation
/// carried by `s`.
pub fn boundary_operator<U: ScalarField + ?Sized>(
    u: &U,
    s: &Hypersurface,
    geo: &Geometry,
    q: &[f64],
) -> Result<BoundaryResidual> {
    let surface = s.surface_data(geo, q)?;
    let d = geo.differential(u, &surface.point)?;
    let normal_derivative = d.gradient.dot(&surface.normal);
    let tensor = &surface.first_form * normal_derivative - &surface.second_form * d.value;
    let scalar = normal_derivative - surface.mean / (geo.dim() as f64 - 1.0) * d.value;
    Ok(BoundaryResidual {
        tensor,
        scalar,
        value: d.value,
        normal_derivative,
        surface,
    })
}

/// Both operators at an interior point `p` and a boundary parameter `q`.
pub fn operator_residual<U: ScalarField + ?Sized>(
    u: &U,
    geo: &Geometry,
    p: &[f64],
    s: &Hypersurface,
    q: &[f64],
) -> Result<OperatorResidual> {
    let b = boundary_operator(u, s, geo, q)?;
    Ok(OperatorResidual {
        interior: lstar(u, geo, p)?,
        boundary_tensor: b.tensor,
        boundary_scalar: b.scalar,
        trace_interior: trace_residual(u, geo, p)?,
    })
}

/// Maximum of `‖L*u‖∞` and of `|Δu + (R/(n−1))u|` over a deterministic
/// cloud of `count` chart points.
pub fn max_interior_residual<U: ScalarField + ?Sized>(
    u: &U,
    geo: &Geometry,
    count: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    let mut worst = (0.0f64, 0.0f64);
    for p in geo.sample_cloud(count, seed) {
        worst.0 = worst.0.max(lstar(u, geo, &p)?.amax());
        worst.1 = worst.1.max(trace_residual(u, geo, &p)?.abs());
    }
    Ok(worst)
}

/// `Ric(e_a, ν)` for a `g`-orthonormal tangent frame `e_a`.
pub fn ricci_mixed(s: &Hypersurface, geo: &Geometry, q: &[f64]) -> Result<DVector<f64>> {
    let data = s.surface_data(geo, q)?;
    let (g, _) = geo.metric(&data.point)?;
    let ric = geo.curvature(&data.point)?.ric;
    let m = s.param_dim();
    let mut frame: Vec<DVector<f64>> = Vec::with_capacity(m);
    for a in 0..m {
        let mut v = data.tangents.column(a).into_owned();
        for e in &frame {
            let c = (e.transpose() * &g * &v)[(0, 0)];
            v -= e * c;
        }
        let len = (v.transpose() * &g * &v)[(0, 0)].sqrt();
        frame.push(v / len);
    }
    let ric_nu = &ric * &data.normal;
    Ok(DVector::from_fn(m, |a, _| frame[a].dot(&ric_nu)))
}

/// Induced metric and its parameter derivatives `∂_c ĝ_ab`.
fn induced_metric_jet(s: &Hypersurface, geo: &Geometry, q: &[f64]) -> Result<(DMatrix<f64>, Vec<DMatrix<f64>>)> {
    let emb = s.embed(q)?;
    let cf = geo
        .conformal_factor(&emb.point)
        .map_err(|_| Error::StencilOutsideChart)?;
    let m = s.param_dim();
    let scale = (2.0 * cf.value).exp();
    let jac = &emb.jacobian;
    let first = jac.transpose() * jac * scale;
    let mut derivs = Vec::with_capacity(m);
    for c in 0..m {
        // ∂_c (e^{2φ}) = 2 e^{2φ} ⟨∇φ, ∂_c σ⟩.
        let dscale = 2.0 * scale * cf.gradient.dot(&jac.column(c));
        derivs.push(DMatrix::from_fn(m, m, |a, b| {
            let sa = &emb.second[c * m + a];
            let sb = &emb.second[c * m + b];
            scale * (sa.dot(&jac.column(b)) + jac.column(a).dot(sb))
                + dscale * jac.column(a).dot(&jac.column(b))
        }));
    }
    Ok((first, derivs))
}

fn induced_christoffels(s: &Hypersurface, geo: &Geometry, q: &[f64]) -> Result<Christoffel> {
    let m = s.param_dim();
    let (first, derivs) = induced_metric_jet(s, geo, q)?;
    let inv = first.try_inverse().ok_or(Error::DegenerateImmersion)?;
    let mut data = vec![0.0; m * m * m];
    for k in 0..m {
        for a in 0..m {
            for b in 0..m {
                data[(k * m + a) * m + b] = 0.5
                    * (0..m)
                        .map(|d| {
                            inv[(k, d)] * (derivs[a][(d, b)] + derivs[b][(d, a)] - derivs[d][(a, b)])
                        })
                        .sum::<f64>();
            }
        }
    }
    Ok(Christoffel::from_flat(m, data))
}

/// Intrinsic scalar curvature of the induced metric, and the value
/// `R − 2Ric(ν,ν) − ‖h‖² + H²` given by the Gauss equation.
pub fn gauss_check(s: &Hypersurface, geo: &Geometry, q: &[f64]) -> Result<(f64, f64)> {
    let data = s.surface_data(geo, q)?;
    let m = s.param_dim();
    let gamma = induced_christoffels(s, geo, q)?;
    let h = fd::first_step(fd::norm(q));
    let field = |x: &[f64]| induced_christoffels(s, geo, x).map(|c| c.as_slice().to_vec());
    let mut dgamma = Vec::with_capacity(m);
    for axis in 0..m {
        dgamma.push(Christoffel::from_flat(m, fd::partial_vec(&field, q, axis, h)?));
    }
    let ric_sigma = ricci_from_connection(&gamma, &dgamma);
    let inv = data
        .first_form
        .clone()
        .try_inverse()
        .ok_or(Error::DegenerateImmersion)?;
    let intrinsic = inv.component_mul(&ric_sigma).sum();

    let curv = geo.curvature(&data.point)?;
    let ric_nn = (data.normal.transpose() * &curv.ric * &data.normal)[(0, 0)];
    let raised = &inv * &data.second_form * &inv;
    let h_sq = raised.component_mul(&data.second_form).sum();
    let via_gauss = curv.scalar - 2.0 * ric_nn - h_sq + data.mean * data.mean;
    Ok((intrinsic, via_gauss))
}

/// Midpoint nodes and weights of the unit sphere `S^{n−1}` in the
/// hyperspherical parametrization.
fn sphere_nodes(n: usize, resolution: usize) -> Vec<(Vec<f64>, f64)> {
    let m = n - 1;
    let mut nodes = vec![(Vec::with_capacity(m), 1.0)];
    for j in 0..m {
        let azimuth = j + 1 == m;
        let span = if azimuth { 2.0 * PI } else { PI };
        let step = span / resolution as f64;
        let power = (n - 2 - j) as i32;
        let mut next = Vec::with_capacity(nodes.len() * resolution);
        for (q, w) in &nodes {
            for i in 0..resolution {
                let t = (i as f64 + 0.5) * step;
                let mut q2: Vec<f64> = q.clone();
                q2.push(t);
                let jac = if azimuth { 1.0 } else { t.sin().powi(power) };
                next.push((q2, w * step * jac));
            }
        }
        nodes = next;
    }
    nodes
}

/// Quadrature of `∫_Ω (−|Du|² + R/(n−1) u²) dμ + ∫_Σ (H/(n−1)) u² dσ`,
/// with `H` taken with respect to the normal pointing out of `Ω`.
///
/// Supported regions are chart balls and concentric chart shells bounded
/// by sphere-shaped components. The traced interior equation is checked on
/// the quadrature nodes first.
pub fn integral_identity<U: ScalarField + ?Sized>(
    u: &U,
    domain: &DomainSpec,
    resolution: usize,
) -> Result<f64> {
    let geo = &domain.geometry;
    let n = geo.dim();
    let nm1 = n as f64 - 1.0;
    let (center, inner, outer) = domain.radial_shell().ok_or(Error::NotCompactDomain)?;
    let resolution = resolution.max(2);

    // Interior term in polar coordinates about the shell centre.
    let directions = sphere_nodes(n, resolution);
    let dr = (outer - inner) / resolution as f64;
    let trace_stride = (directions.len() * resolution / 200).max(1);
    let mut interior = 0.0;
    let mut counter = 0usize;
    for i in 0..resolution {
        let rho = inner + (i as f64 + 0.5) * dr;
        let mut shell = 0.0;
        for (q, w) in &directions {
            let dir = unit_sphere(n, q).point;
            let p: Vec<f64> = center.iter().zip(&dir).map(|(c, d)| c + rho * d).collect();
            let d = geo.differential(u, &p)?;
            let curv = geo.curvature(&p)?;
            if counter.is_multiple_of(trace_stride) {
                let trace = d.laplacian + curv.scalar / nm1 * d.value;
                if trace.abs() > TRACE_TOLERANCE {
                    return Err(Error::TraceSystemViolated(trace.abs()));
                }
            }
            counter += 1;
            let volume = (n as f64 * geo.conformal_factor(&p)?.value).exp();
            shell += w * volume * (-d.grad_norm_sq + curv.scalar / nm1 * d.value * d.value);
        }
        interior += shell * rho.powi(n as i32 - 1) * dr;
    }

    // Boundary terms over each component, outward from the region.
    let mut boundary = 0.0;
    for component in &domain.components {
        let s = component.outward_surface();
        for (q, w) in sphere_nodes(n, resolution) {
            let data = s.surface_data(geo, &q)?;
            // The nodes carry the unit-sphere measure; replace it with √det ĝ.
            let flat_area = unit_sphere(n, &q).jacobian;
            let flat_det = (flat_area.transpose() * &flat_area).determinant().sqrt();
            let area = data.first_form.determinant().sqrt() / flat_det;
            let value = u.value(&data.point);
            boundary += w * area * data.mean / nm1 * value * value;
        }
    }
    Ok(interior + boundary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::potential_basis;
    use crate::classify::{Component, Side};
    use crate::geom::FnField;
    use approx::assert_relative_eq;

    #[test]
    fn constant_in_flat_space() {
        let geo = Geometry::euclidean(3).unwrap();
        let one = &potential_basis(&geo).fields[0];
        assert_eq!(lstar(one, &geo, &[0.3, 0.2, -1.0]).unwrap().amax(), 0.0);
    }

    #[test]
    fn sphere_coordinates_are_static() {
        let geo = Geometry::sphere(3).unwrap();
        for f in &potential_basis(&geo).fields {
            let (l, t) = max_interior_residual(f, &geo, 20, 3).unwrap();
            assert!(l < 1e-6 && t < 1e-6, "{} {l} {t}", f.label());
        }
    }

    #[test]
    fn exterior_sphere_boundary_values() {
        let geo = Geometry::euclidean(3).unwrap();
        let basis = potential_basis(&geo);
        let s = Hypersurface::euclidean_sphere(&[0.0; 3], 1.0)
            .unwrap()
            .with_orientation(crate::surfaces::Orientation::InwardToEnclosed);
        let q = [0.8, 2.0];
        let one = boundary_operator(&basis.fields[0], &s, &geo, &q).unwrap();
        assert_relative_eq!(one.scalar, 1.0, epsilon = 1e-12);
        let x1 = boundary_operator(&basis.fields[1], &s, &geo, &q).unwrap();
        assert!(x1.scalar.abs() < 1e-12);
    }

    #[test]
    fn cap_polar_coordinate_residual() {
        let geo = Geometry::sphere(3).unwrap();
        let basis = potential_basis(&geo);
        let theta = 1.0f64;
        let cap = Hypersurface::spherical_cap(3, theta).unwrap();
        let b = boundary_operator(&basis.fields[3], &cap, &geo, &[1.2, 0.4]).unwrap();
        assert_relative_eq!(b.scalar, -1.0 / theta.sin(), epsilon = 1e-9);
    }

    #[test]
    fn gauss_on_round_sphere() {
        let geo = Geometry::euclidean(3).unwrap();
        let s = Hypersurface::euclidean_sphere(&[0.0; 3], 1.0).unwrap();
        let (a, b) = gauss_check(&s, &geo, &[1.0, 0.7]).unwrap();
        assert_relative_eq!(b, 2.0, epsilon = 1e-9);
        assert!((a - b).abs() < 1e-6, "{a} {b}");
    }

    #[test]
    fn mixed_ricci_on_centered_schwarzschild_sphere() {
        let geo = Geometry::schwarzschild(3, 2.0).unwrap();
        let s = Hypersurface::euclidean_sphere(&[0.0; 3], 1.7).unwrap();
        assert!(ricci_mixed(&s, &geo, &[0.9, 2.2]).unwrap().amax() < 1e-5);
    }

    #[test]
    fn integral_identity_coarse() {
        let geo = Geometry::euclidean(3).unwrap();
        let ball = Hypersurface::euclidean_sphere(&[0.0; 3], 1.0).unwrap();
        let domain = DomainSpec::new(geo, vec![Component::new(ball, Side::Enclosed)], true).unwrap();
        let basis = potential_basis(&geo);
        let defect = integral_identity(&basis.fields[1], &domain, 24).unwrap();
        assert!(defect.abs() < 2e-2, "{defect}");
        let one = integral_identity(&basis.fields[0], &domain, 24).unwrap();
        assert_relative_eq!(one, 4.0 * PI, epsilon = 1e-2);
        let bad = FnField::new("x1^2", |p: &[f64]| p[0] * p[0]);
        assert!(matches!(
            integral_identity(&bad, &domain, 8),
            Err(Error::TraceSystemViolated(_))
        ));
    }
}
