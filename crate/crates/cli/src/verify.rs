//! Residual suites of one geometry.

use std::f64::consts::PI;

use rayon::prelude::*;
use staticdom_core::catalog::{
    ball_from_halfspace, halfspace_conformality_defect, hyperboloid_from_ball, hyperboloid_from_halfspace,
    potential_basis, sphere_ambient, sphere_chart,
};
use staticdom_core::geom::christoffels_from_metric;
use staticdom_core::schwarzschild::{extremum_certificate, pipeline_potential_residual, potential_residual};
use staticdom_core::staticop::{lstar, trace_residual};
use staticdom_core::{Geometry, GeometryKind, Hypersurface, ScalarField};

/// Tolerance of FD curvature against the model value.
const CURVATURE_TOL: f64 = 1e-4;
/// Tolerance of closed-form against metric-derived Christoffel symbols.
const CONNECTION_TOL: f64 = 1e-6;
/// Tolerance of pipeline mean curvature against closed forms.
const MEAN_TOL: f64 = 1e-6;
/// Tolerance of exact algebraic identities.
const EXACT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
}

impl Check {
    fn new(name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            residual,
            tolerance,
        }
    }

    /// A yes/no property recorded as residual 0 or 1 with tolerance 0.
    fn holds(name: impl Into<String>, ok: bool) -> Self {
        Check::new(name, if ok { 0.0 } else { 1.0 }, 0.0)
    }

    pub fn passed(&self) -> bool {
        self.residual.is_finite() && self.residual <= self.tolerance
    }
}

type Run<T> = Result<T, String>;

fn run<T>(r: staticdom_core::Result<T>) -> Run<T> {
    r.map_err(|e| e.to_string())
}

struct PointData {
    lstar: Vec<f64>,
    trace: Vec<f64>,
    scalar: f64,
    connection: f64,
}

fn interior(geo: &Geometry, samples: usize, seed: u64, tol: f64) -> Run<Vec<Check>> {
    let basis = potential_basis(geo);
    let cloud = geo.sample_cloud(samples, seed);
    let data = cloud
        .par_iter()
        .map(|p| -> Run<PointData> {
            let mut d = PointData {
                lstar: Vec::with_capacity(basis.len()),
                trace: Vec::with_capacity(basis.len()),
                scalar: 0.0,
                connection: 0.0,
            };
            for f in &basis.fields {
                d.lstar.push(run(lstar(f, geo, p))?.amax());
                d.trace.push(run(trace_residual(f, geo, p))?.abs());
            }
            d.scalar = (run(geo.curvature(p))?.scalar - geo.model_scalar_curvature()).abs();
            let closed = run(geo.christoffels(p))?;
            let derived = run(christoffels_from_metric(geo, p))?;
            d.connection = closed
                .as_slice()
                .iter()
                .zip(derived.as_slice())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            Ok(d)
        })
        .collect::<Run<Vec<_>>>()?;
    let worst = |f: &dyn Fn(&PointData) -> f64| data.iter().map(f).fold(0.0, f64::max);
    let mut out = Vec::new();
    for (i, f) in basis.fields.iter().enumerate() {
        out.push(Check::new(format!("static operator on {}", f.label()), worst(&|d| d.lstar[i]), tol));
        out.push(Check::new(format!("trace equation on {}", f.label()), worst(&|d| d.trace[i]), tol));
    }
    out.push(Check::new("scalar curvature", worst(&|d| d.scalar), CURVATURE_TOL));
    out.push(Check::new("christoffel symbols", worst(&|d| d.connection), CONNECTION_TOL));
    Ok(out)
}

/// Pipeline mean curvature against `expected`, the conformal shortcut, and
/// the umbilic defect over boundary samples.
fn surface_checks(geo: &Geometry, name: &str, s: &Hypersurface, expected: f64, seed: u64) -> Run<Vec<Check>> {
    let samples = s.sample_boundary_on(geo, 16, seed);
    let (mut mean, mut shortcut, mut umbilic) = (0.0f64, 0.0f64, 0.0f64);
    for q in &samples {
        let h = run(s.surface_data(geo, q))?.mean;
        mean = mean.max((h - expected).abs());
        shortcut = shortcut.max((h - run(s.conformal_mean(geo, q))?).abs());
        umbilic = umbilic.max(run(s.umbilic_defect(geo, q))?);
    }
    Ok(vec![
        Check::new(format!("{name} mean curvature"), mean, MEAN_TOL),
        Check::new(format!("{name} conformal formula"), shortcut, MEAN_TOL),
        Check::new(format!("{name} umbilic"), umbilic, MEAN_TOL),
    ])
}

fn euclidean(geo: &Geometry, seed: u64) -> Run<Vec<Check>> {
    let n = geo.dim();
    let k = n as f64 - 1.0;
    let center: Vec<f64> = (0..n).map(|i| 0.3 - 0.2 * i as f64).collect();
    let normal: Vec<f64> = (0..n).map(|i| 1.0 + i as f64).collect();
    let mut out = surface_checks(geo, "sphere r=1.3", &run(Hypersurface::euclidean_sphere(&center, 1.3))?, k / 1.3, seed)?;
    out.extend(surface_checks(geo, "hyperplane", &run(Hypersurface::hyperplane(&normal, 0.4))?, 0.0, seed)?);
    Ok(out)
}

fn sphere(geo: &Geometry, samples: usize, seed: u64) -> Run<Vec<Check>> {
    let n = geo.dim();
    let k = n as f64 - 1.0;
    let (mut on_sphere, mut round_trip) = (0.0f64, 0.0f64);
    for u in geo.sample_cloud(samples, seed) {
        let x = sphere_ambient(&u);
        on_sphere = on_sphere.max((x.iter().map(|v| v * v).sum::<f64>() - 1.0).abs());
        let back = run(sphere_chart(&x))?;
        round_trip = round_trip.max(back.iter().zip(&u).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));
    }
    let mut out = vec![
        Check::new("ambient coordinates on unit sphere", on_sphere, EXACT_TOL),
        Check::new("stereographic round trip", round_trip, EXACT_TOL),
    ];
    for (name, angle) in [("cap pi/4", PI / 4.0), ("cap pi/2", PI / 2.0), ("cap 2pi/3", 2.0 * PI / 3.0)] {
        let cap = run(Hypersurface::spherical_cap(n, angle))?;
        out.extend(surface_checks(geo, name, &cap, k * angle.cos() / angle.sin(), seed)?);
    }
    Ok(out)
}

fn hyperbolic(geo: &Geometry, samples: usize, seed: u64) -> Run<Vec<Check>> {
    let n = geo.dim();
    let k = n as f64 - 1.0;
    let basis = potential_basis(geo);
    let (mut quadric, mut composite, mut conformal, mut coordinates) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for y in geo.sample_cloud(samples, seed) {
        let u = run(ball_from_halfspace(&y))?;
        let x = run(hyperboloid_from_ball(&u))?;
        quadric = quadric.max((x.quadratic_form() + 1.0).abs());
        let direct = run(hyperboloid_from_halfspace(&y))?;
        for (i, (a, b)) in x.coords.iter().zip(&direct.coords).enumerate() {
            composite = composite.max((a - b).abs());
            coordinates = coordinates.max((basis.fields[i].value(&y) - b).abs());
        }
        conformal = conformal.max(run(halfspace_conformality_defect(&y))?);
    }
    let mut out = vec![
        Check::new("ball to hyperboloid lands on Q = -1", quadric, EXACT_TOL),
        Check::new("half-space to hyperboloid composite", composite, EXACT_TOL),
        Check::new("half-space to ball conformality", conformal, MEAN_TOL),
        Check::new("basis fields are hyperboloid coordinates", coordinates, EXACT_TOL),
    ];
    for eta in [-0.5, 0.0, 0.5, 1.0, 2.0] {
        let s = run(Hypersurface::halfspace_sphere(n, eta, 1.0))?;
        out.extend(surface_checks(geo, &format!("sphere at height {eta}"), &s, k * eta, seed)?);
    }
    for c in [0.5, 1.5] {
        let s = run(Hypersurface::halfspace_plane_parallel(n, c))?;
        out.extend(surface_checks(geo, &format!("horizontal plane at {c}"), &s, -k, seed)?);
    }
    for alpha in [0.4, 1.1, 2.5] {
        let s = run(Hypersurface::halfspace_plane_angled(n, alpha))?;
        out.extend(surface_checks(geo, &format!("plane at angle {alpha}"), &s, -k * alpha.cos(), seed)?);
    }
    Ok(out)
}

fn schwarzschild(geo: &Geometry, seed: u64) -> Run<Vec<Check>> {
    let n = geo.dim();
    let m = geo.mass().unwrap_or(0.0);
    let cert = run(extremum_certificate(m, n))?;
    let a = cert.analysis;
    let mut out = vec![
        Check::new("H profile pipeline agreement", cert.pipeline_error, MEAN_TOL),
        Check::holds("r- inside and r+ outside the horizon", a.r_minus < a.horizon && a.horizon < a.r_plus),
        Check::holds("H minimal at r- inside the horizon", cert.min_certified),
        Check::holds("H maximal at r+ outside the horizon", cert.max_certified),
        Check::holds("dH changes sign only at r- and r+", cert.sign_changes_at_critical_radii),
    ];
    let origin = vec![0.0; n];
    for (name, r) in [("r-", a.r_minus), ("horizon", a.horizon), ("r+", a.r_plus), ("2 r+", 2.0 * a.r_plus)] {
        let s = run(Hypersurface::euclidean_sphere(&origin, r))?;
        out.extend(surface_checks(geo, &format!("centred sphere at {name}"), &s, run(a.h_at(r))?, seed)?);
        let mut worst = 0.0f64;
        for q in s.sample_boundary(8, seed) {
            let closed = run(potential_residual(m, n, r))?;
            worst = worst.max((run(pipeline_potential_residual(m, n, r, &q))? - closed).abs());
        }
        out.push(Check::new(format!("potential boundary residual at {name}"), worst, MEAN_TOL));
    }
    Ok(out)
}

/// Every check of the suite for `geo`.
pub fn suite(geo: &Geometry, samples: usize, seed: u64, tol: f64) -> Run<Vec<Check>> {
    let mut out = interior(geo, samples, seed, tol)?;
    out.extend(match geo.kind() {
        GeometryKind::Euclidean => euclidean(geo, seed)?,
        GeometryKind::Sphere => sphere(geo, samples, seed)?,
        GeometryKind::HyperbolicHalfSpace => hyperbolic(geo, samples, seed)?,
        GeometryKind::Schwarzschild => schwarzschild(geo, seed)?,
    });
    Ok(out)
}
