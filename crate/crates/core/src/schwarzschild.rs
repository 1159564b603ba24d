//! Centred spheres in the Schwarzschild manifold: the mean-curvature
//! profile, its critical radii, and the horizon.

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::catalog::potential_basis;
use crate::error::{Error, Result};
use crate::geom::Geometry;
use crate::staticop::boundary_operator;
use crate::surfaces::Hypersurface;

fn validate(m: f64, n: usize) -> Result<()> {
    if !(m > 0.0 && m.is_finite()) {
        return Err(Error::InvalidParameters("mass must be positive"));
    }
    if n < 3 {
        return Err(Error::InvalidParameters("Schwarzschild needs dimension at least 3"));
    }
    Ok(())
}

/// Radii of the centred spheres where `α² − 2(n−1)α + 1 = 0`, i.e.
/// `r± = (((n−1) ± √(n²−2n))/2 · m)^{1/(n−2)}`.
pub fn critical_radii(m: f64, n: usize) -> Result<(f64, f64)> {
    validate(m, n)?;
    let nf = n as f64;
    let big = (nf - 1.0) + (nf * nf - 2.0 * nf).sqrt();
    let k = 1.0 / (nf - 2.0);
    // The small root is 1/big; dividing avoids cancellation.
    Ok(((m / (2.0 * big)).powf(k), (big * m / 2.0).powf(k)))
}

/// `r` with `r^{n−2} = m/2`.
pub fn horizon_radius(m: f64, n: usize) -> Result<f64> {
    validate(m, n)?;
    Ok((m / 2.0).powf(1.0 / (n as f64 - 2.0)))
}

/// Mean curvature `H(r)` of the centred sphere of radius `r` (normal
/// pointing to increasing `r`) and `dH/dr`.
///
/// `H = (n−1)(1−α) / (r (1+α)^{1+2/(n−2)})` and
/// `dH/dr = (n−1)(−α² + 2(n−1)α − 1) / (r² (1+α)^{2+2/(n−2)})`; the second
/// is the factorized derivative with the `(1 − α)` factor cancelled, so it
/// is regular at the horizon.
pub fn mean_profile(m: f64, n: usize, r: f64) -> Result<(f64, f64)> {
    validate(m, n)?;
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidParameters("radius must be positive"));
    }
    let nf = n as f64;
    let e = 2.0 / (nf - 2.0);
    let alpha = m / (2.0 * r.powi(n as i32 - 2));
    let q = 1.0 + alpha;
    let h = (nf - 1.0) * (1.0 - alpha) / (r * q.powf(1.0 + e));
    let dh = (nf - 1.0) * (-alpha * alpha + 2.0 * (nf - 1.0) * alpha - 1.0) / (r * r * q.powf(2.0 + e));
    Ok((h, dh))
}

/// Scalar boundary residual `u_ν − (H/(n−1))u` of the Schwarzschild potential
/// on the centred sphere of radius `r`:
/// `(1+α)^{−2/(n−2)} (−α² + 2(n−1)α − 1) / (r (1+α)²)`.
pub fn potential_residual(m: f64, n: usize, r: f64) -> Result<f64> {
    validate(m, n)?;
    let nf = n as f64;
    let alpha = m / (2.0 * r.powi(n as i32 - 2));
    let q = 1.0 + alpha;
    Ok(q.powf(-2.0 / (nf - 2.0)) * (-alpha * alpha + 2.0 * (nf - 1.0) * alpha - 1.0) / (r * q * q))
}

/// Closed-form data of one Schwarzschild manifold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchwarzschildAnalysis {
    pub m: f64,
    pub n: usize,
    pub r_minus: f64,
    pub r_plus: f64,
    pub horizon: f64,
}

impl SchwarzschildAnalysis {
    pub fn new(m: f64, n: usize) -> Result<Self> {
        let (r_minus, r_plus) = critical_radii(m, n)?;
        Ok(Self {
            m,
            n,
            r_minus,
            r_plus,
            horizon: horizon_radius(m, n)?,
        })
    }

    pub fn h_at(&self, r: f64) -> Result<f64> {
        mean_profile(self.m, self.n, r).map(|p| p.0)
    }

    pub fn dh_at(&self, r: f64) -> Result<f64> {
        mean_profile(self.m, self.n, r).map(|p| p.1)
    }

    /// Log-spaced radii over `[horizon·10⁻³, horizon·10³]`.
    pub fn log_grid(&self, points: usize) -> Vec<f64> {
        let points = points.max(2);
        let (lo, hi) = ((self.horizon * 1e-3).ln(), (self.horizon * 1e3).ln());
        (0..points)
            .map(|i| (lo + (hi - lo) * i as f64 / (points - 1) as f64).exp())
            .collect()
    }
}

/// Outcome of the extremum scan.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtremumCertificate {
    pub analysis: SchwarzschildAnalysis,
    pub grid_points: usize,
    pub h_min: f64,
    pub h_max: f64,
    /// `H(r₋) ≤ H(r)` for every scanned `r` inside the horizon.
    pub min_certified: bool,
    /// `H(r₊) ≥ H(r)` for every scanned `r` outside the horizon.
    pub max_certified: bool,
    /// Grid intervals `[a, b]` on which `dH` changes sign.
    pub sign_changes: Vec<(f64, f64)>,
    /// Every sign change brackets `r₋` or `r₊`, and both are bracketed.
    pub sign_changes_at_critical_radii: bool,
    /// Largest `|H_closed − H_pipeline|` over centred spheres at 10 radii.
    pub pipeline_error: f64,
}

impl ExtremumCertificate {
    pub fn holds(&self) -> bool {
        self.min_certified && self.max_certified && self.sign_changes_at_critical_radii && self.pipeline_error < 1e-6
    }
}

/// Dense scan of the closed-form profile certifying the extremal radii, with
/// a cross-check against the geometric pipeline on centred spheres.
pub fn extremum_certificate(m: f64, n: usize) -> Result<ExtremumCertificate> {
    let a = SchwarzschildAnalysis::new(m, n)?;
    let grid = a.log_grid(4001);
    let h_min = a.h_at(a.r_minus)?;
    let h_max = a.h_at(a.r_plus)?;
    let slack = 1e-12;
    let mut min_certified = true;
    let mut max_certified = true;
    let mut sign_changes = Vec::new();
    let mut previous: Option<(f64, f64)> = None;
    for &r in &grid {
        let (h, dh) = mean_profile(m, n, r)?;
        if r < a.horizon && h < h_min - slack * h_min.abs() {
            min_certified = false;
        }
        if r > a.horizon && h > h_max + slack * h_max.abs() {
            max_certified = false;
        }
        if let Some((r0, d0)) = previous {
            if d0.signum() != dh.signum() {
                sign_changes.push((r0, r));
            }
        }
        previous = Some((r, dh));
    }
    let brackets = |x: f64| sign_changes.iter().any(|(lo, hi)| *lo <= x * (1.0 + 1e-6) && x * (1.0 - 1e-6) <= *hi);
    let sign_changes_at_critical_radii = sign_changes.len() == 2 && brackets(a.r_minus) && brackets(a.r_plus);

    let geo = Geometry::schwarzschild(n, m)?;
    let lo = (a.r_minus / 2.0).max(2e-2);
    let hi = 2.0 * a.r_plus;
    let mut pipeline_error = 0.0f64;
    let q: Vec<f64> = (0..n - 1).map(|j| 0.7 + 0.3 * j as f64).collect();
    for i in 0..10 {
        let r = lo * (hi / lo).powf(i as f64 / 9.0);
        let mut center = Vec::new();
        center.resize(n, 0.0);
        let s = Hypersurface::euclidean_sphere(&center, r)?;
        let pipeline = s.surface_data(&geo, &q)?.mean;
        pipeline_error = pipeline_error.max((pipeline - a.h_at(r)?).abs());
    }
    Ok(ExtremumCertificate {
        analysis: a,
        grid_points: grid.len(),
        h_min,
        h_max,
        min_certified,
        max_certified,
        sign_changes,
        sign_changes_at_critical_radii,
        pipeline_error,
    })
}

/// Scalar boundary residual of the potential on the centred sphere of radius
/// `r`, computed through the geometric pipeline at parameter `q`.
pub fn pipeline_potential_residual(m: f64, n: usize, r: f64, q: &[f64]) -> Result<f64> {
    let geo = Geometry::schwarzschild(n, m)?;
    let basis = potential_basis(&geo);
    let mut center = Vec::new();
    center.resize(n, 0.0);
    let s = Hypersurface::euclidean_sphere(&center, r)?;
    Ok(boundary_operator(&basis.fields[0], &s, &geo, q)?.scalar)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn radii_for_unit_and_double_mass() {
        let (lo, hi) = critical_radii(2.0, 3).unwrap();
        assert_relative_eq!(lo, 2.0 - 3f64.sqrt(), epsilon = 1e-14);
        assert_relative_eq!(hi, 2.0 + 3f64.sqrt(), epsilon = 1e-14);
        assert_relative_eq!(critical_radii(1.0, 3).unwrap().1, 1.866_025_403_784_438_6, epsilon = 1e-14);
        assert!(critical_radii(1.0, 2).is_err());
        assert!(critical_radii(-1.0, 3).is_err());
    }

    #[test]
    fn profile_values() {
        assert_eq!(mean_profile(2.0, 3, 1.0).unwrap().0, 0.0);
        let (h, dh) = mean_profile(2.0, 3, 2.0 + 3f64.sqrt()).unwrap();
        assert!(h > 0.0 && dh.abs() < 1e-12);
        let far = mean_profile(2.0, 3, 1e6).unwrap().0;
        assert!(far > 0.0 && far < 1e-5);
    }

    #[test]
    fn derivative_matches_fd() {
        for (m, n) in [(2.0, 3), (1.0, 4), (0.7, 5)] {
            for r in [0.2, 0.9, 1.0, 1.3, 4.0] {
                let h = 1e-5 * r;
                let f = |x: f64| mean_profile(m, n, x).unwrap().0;
                let fd = (8.0 * (f(r + h) - f(r - h)) - (f(r + 2.0 * h) - f(r - 2.0 * h))) / (12.0 * h);
                assert!((fd - mean_profile(m, n, r).unwrap().1).abs() < 1e-7, "{m} {n} {r}");
            }
        }
    }

    #[test]
    fn residual_closed_form_matches_pipeline() {
        for r in [0.3, 1.0, 2.5] {
            let a = potential_residual(2.0, 3, r).unwrap();
            let b = pipeline_potential_residual(2.0, 3, r, &[0.8, 1.9]).unwrap();
            assert!((a - b).abs() < 1e-10, "{r}: {a} {b}");
        }
    }

    #[test]
    fn certificate_three_and_four_dimensions() {
        for (m, n) in [(2.0, 3), (1.0, 4)] {
            let c = extremum_certificate(m, n).unwrap();
            assert!(c.holds(), "{c:?}");
        }
    }
}
