//! Classification of candidate domains: necessary conditions, the boundary
//! residual matrix over a potential basis, numerical kernel extraction,
//! intersection over components, and the sign table for compact domains.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::catalog::{potential_basis, PotentialBasis};
use crate::error::{Error, Result};
use crate::fd;
use crate::geom::{Geometry, ScalarField};
use crate::surfaces::{Hypersurface, Orientation};

/// Relative singular-value cutoff.
pub const RANK_TOLERANCE: f64 = 1e-6;
/// Absolute singular-value floor per unit `√rows`.
pub const SIGMA_FLOOR: f64 = 1e-9;
pub const SCALAR_CONST_THRESHOLD: f64 = 1e-4;
pub const MEAN_CONST_THRESHOLD: f64 = 1e-5;
pub const UMBILIC_THRESHOLD: f64 = 1e-6;
/// Tensor boundary condition accepted for a kernel element.
pub const TENSOR_THRESHOLD: f64 = 1e-5;
/// `|value| < SIGN_THRESHOLD` counts as zero in the sign table.
pub const SIGN_THRESHOLD: f64 = 1e-5;
/// Minimum sampled chart distance between boundary components.
pub const DISJOINT_DISTANCE: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Enclosed,
    Complement,
}

/// A boundary component together with the side on which the domain lies.
#[derive(Debug, Clone, PartialEq)]
pub struct Component {
    pub surface: Hypersurface,
    pub side: Side,
}

impl Component {
    pub fn new(surface: Hypersurface, side: Side) -> Self {
        Self { surface, side }
    }

    /// The surface oriented by the unit normal pointing out of the domain.
    pub fn outward_surface(&self) -> Hypersurface {
        let orientation = match self.side {
            Side::Enclosed => Orientation::OutwardFromEnclosed,
            Side::Complement => Orientation::InwardToEnclosed,
        };
        self.surface.clone().with_orientation(orientation)
    }

    /// Flat test of whether `p` lies on the domain side of this component.
    pub fn on_domain_side(&self, p: &[f64]) -> bool {
        self.surface.encloses(p) == (self.side == Side::Enclosed)
    }
}

/// A geometry with oriented boundary components.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainSpec {
    pub geometry: Geometry,
    pub components: Vec<Component>,
    pub compact: bool,
    /// Orthogonal change of ambient coordinates used to realize sphere caps
    /// away from the projection pole; kernel coefficients are mapped back
    /// through it.
    frame: Option<DMatrix<f64>>,
}

impl DomainSpec {
    pub fn new(geometry: Geometry, components: Vec<Component>, compact: bool) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidParameters("a domain needs at least one boundary component"));
        }
        for c in &components {
            if c.surface.dim() != geometry.dim() {
                return Err(Error::DimensionMismatch {
                    expected: geometry.dim(),
                    found: c.surface.dim(),
                });
            }
        }
        let domain = Self {
            geometry,
            components,
            compact,
            frame: None,
        };
        domain.check_disjoint()?;
        Ok(domain)
    }

    /// Domain in `Sⁿ` bounded by cap boundaries `{⟨axis, x⟩ = cos angle}`.
    ///
    /// When a boundary passes near the projection pole the whole
    /// configuration is reflected first so that every boundary stays a
    /// bounded chart sphere.
    pub fn sphere_caps(dim: usize, caps: &[(Vec<f64>, f64, Side)], compact: bool) -> Result<Self> {
        let geometry = Geometry::sphere(dim)?;
        let axes: Vec<Vec<f64>> = caps
            .iter()
            .map(|(a, _, _)| {
                let len = fd::norm(a);
                if a.len() != dim + 1 || !(len > 0.0) {
                    return Err(Error::InvalidParameters("cap axis must be a non-zero vector in ℝⁿ⁺¹"));
                }
                Ok(a.iter().map(|x| x / len).collect())
            })
            .collect::<Result<_>>()?;
        // Clearance of a candidate pole `p` from every boundary circle.
        let clearance = |p: &[f64]| {
            axes.iter()
                .zip(caps)
                .map(|(a, (_, angle, _))| {
                    (angle.cos() - a.iter().zip(p).map(|(x, y)| x * y).sum::<f64>()).abs()
                })
                .fold(f64::INFINITY, f64::min)
        };
        let mut south = vec![0.0; dim + 1];
        south[dim] = -1.0;
        let mut frame = None;
        if clearance(&south) < 0.25 {
            let mut best = (clearance(&south), south.clone());
            let mut candidates: Vec<Vec<f64>> = Vec::new();
            for i in 0..=dim {
                for s in [1.0, -1.0] {
                    let mut v = vec![0.0; dim + 1];
                    v[i] = s;
                    candidates.push(v);
                }
            }
            let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
            for _ in 0..256 {
                let v: Vec<f64> = (0..=dim).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
                let len = fd::norm(&v);
                candidates.push(v.into_iter().map(|x| x / len).collect());
            }
            for c in candidates {
                let score = clearance(&c);
                if score > best.0 + 1e-12 {
                    best = (score, c);
                }
            }
            // Householder reflection sending the chosen pole to the south pole.
            let w: Vec<f64> = best.1.iter().zip(&south).map(|(a, b)| a - b).collect();
            let wl = fd::norm(&w);
            if wl > 1e-12 {
                let w = DVector::from_vec(w) / wl;
                frame = Some(DMatrix::identity(dim + 1, dim + 1) - &w * w.transpose() * 2.0);
            }
        }
        let mut components = Vec::with_capacity(caps.len());
        for (axis, (_, angle, side)) in axes.iter().zip(caps) {
            let rotated = match &frame {
                Some(h) => (h * DVector::from_column_slice(axis)).as_slice().to_vec(),
                None => axis.clone(),
            };
            components.push(Component::new(
                Hypersurface::spherical_cap_about(&rotated, *angle)?,
                *side,
            ));
        }
        let mut domain = Self::new(geometry, components, compact)?;
        domain.frame = frame;
        Ok(domain)
    }

    /// The orthogonal change of ambient coordinates in effect, if any.
    pub fn frame(&self) -> Option<&DMatrix<f64>> {
        self.frame.as_ref()
    }

    fn check_disjoint(&self) -> Result<()> {
        let samples: Vec<Vec<Vec<f64>>> = self
            .components
            .iter()
            .enumerate()
            .map(|(i, c)| {
                c.surface
                    .sample_boundary(256, 101 + i as u64)
                    .iter()
                    .filter_map(|q| c.surface.param_map(q).ok())
                    .collect()
            })
            .collect();
        let mut closest = f64::INFINITY;
        for i in 0..samples.len() {
            for j in 0..samples.len() {
                // Samples of one component on both sides of another one.
                if i != j && !samples[j].is_empty() {
                    let surface = &self.components[i].surface;
                    let first = surface.encloses(&samples[j][0]);
                    if samples[j].iter().any(|p| surface.encloses(p) != first) {
                        return Err(Error::ComponentsIntersect(0.0));
                    }
                }
            }
            for j in i + 1..samples.len() {
                for a in &samples[i] {
                    for b in &samples[j] {
                        let d: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
                        closest = closest.min(d.sqrt());
                    }
                }
            }
        }
        if closest <= DISJOINT_DISTANCE {
            return Err(Error::ComponentsIntersect(closest));
        }
        Ok(())
    }

    /// Flat test of domain membership.
    pub fn contains(&self, p: &[f64]) -> bool {
        self.geometry.contains(p) && self.components.iter().all(|c| c.on_domain_side(p))
    }

    /// `(centre, inner, outer)` when the domain is a chart ball (`inner = 0`)
    /// or a concentric chart shell.
    pub fn radial_shell(&self) -> Option<(Vec<f64>, f64, f64)> {
        if !self.compact {
            return None;
        }
        let mut center: Option<Vec<f64>> = None;
        let (mut inner, mut outer) = (0.0f64, f64::INFINITY);
        for c in &self.components {
            let (cen, radius, ball_enclosed) = c.surface.chart_sphere()?;
            match &center {
                Some(existing) if fd::norm(&sub(existing, &cen)) > 1e-12 => return None,
                _ => center = Some(cen),
            }
            if ball_enclosed == (c.side == Side::Enclosed) {
                outer = outer.min(radius);
            } else {
                inner = inner.max(radius);
            }
        }
        (outer.is_finite() && inner < outer).then(|| (center.unwrap_or_default(), inner, outer))
    }
}

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Necessary-condition diagnostics of a domain.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostics {
    /// max − min of `R` over the interior cloud.
    pub scalar_const_defect: f64,
    /// Mean of `R` over the interior cloud.
    pub scalar_mean: f64,
    /// Per component: max − min of `H` (outward from the domain).
    pub mean_const_defect: Vec<f64>,
    /// Per component: average `H` (outward from the domain).
    pub mean_values: Vec<f64>,
    /// Per component: largest umbilic defect.
    pub umbilic_defect: Vec<f64>,
}

impl Diagnostics {
    pub fn passed(&self) -> bool {
        self.scalar_const_defect < SCALAR_CONST_THRESHOLD
            && self.mean_const_defect.iter().all(|d| *d < MEAN_CONST_THRESHOLD)
            && self.umbilic_defect.iter().all(|d| *d < UMBILIC_THRESHOLD)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    NonGeneric,
    Generic,
    NecessaryConditionsFailed,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::NonGeneric => "NonGeneric",
            Verdict::Generic => "Generic",
            Verdict::NecessaryConditionsFailed => "NecessaryConditionsFailed",
        }
    }
}

/// Sampling controls for classification.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelOptions {
    /// Boundary samples per component; `None` means six per basis field.
    pub samples_per_component: Option<usize>,
    pub interior_samples: usize,
    pub seed: u64,
    /// Relative singular-value cutoff.
    pub rank_tolerance: f64,
}

impl Default for KernelOptions {
    fn default() -> Self {
        Self {
            samples_per_component: None,
            interior_samples: 64,
            seed: 1,
            rank_tolerance: RANK_TOLERANCE,
        }
    }
}

/// Boundary data of every basis field at one sample.
#[derive(Debug, Clone, PartialEq)]
struct Probe {
    first_form: DMatrix<f64>,
    second_form: DMatrix<f64>,
    values: Vec<f64>,
    normal_derivatives: Vec<f64>,
}

impl Probe {
    fn tensor_residual(&self, coefficients: &[f64]) -> f64 {
        let value: f64 = self.values.iter().zip(coefficients).map(|(v, c)| v * c).sum();
        let normal: f64 = self
            .normal_derivatives
            .iter()
            .zip(coefficients)
            .map(|(v, c)| v * c)
            .sum();
        (&self.first_form * normal - &self.second_form * value).amax()
    }
}

/// Result of a classification.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelReport {
    pub geometry: Geometry,
    pub labels: Vec<String>,
    pub diagnostics: Diagnostics,
    /// Descending.
    pub singular_values: Vec<f64>,
    pub dim: usize,
    /// `dim × basis` matrix with orthonormal rows.
    pub basis_coefficients: DMatrix<f64>,
    pub cutoff: f64,
    pub rank_tolerance: f64,
    pub verdict: Verdict,
    /// Some singular value lies within a factor ten of the cutoff.
    pub flagged: bool,
    /// Largest `‖u_ν ĝ − u h‖∞` of a kernel element over all samples.
    pub tensor_residual_max: f64,
    /// Largest scalar boundary residual of a kernel element.
    pub scalar_residual_max: f64,
    /// Stacked boundary residual matrix (rows are samples).
    pub residual_matrix: DMatrix<f64>,
    frame: Option<DMatrix<f64>>,
    probes: Vec<Probe>,
}

impl KernelReport {
    /// Kernel element `i` as `(label, coefficient)` pairs.
    pub fn kernel_element(&self, i: usize) -> Vec<(String, f64)> {
        self.labels
            .iter()
            .cloned()
            .zip(self.basis_coefficients.row(i).iter().copied())
            .collect()
    }

    /// Norm of the component of `v` orthogonal to the kernel, relative to `‖v‖`.
    pub fn distance_to_kernel(&self, v: &[f64]) -> f64 {
        let v = DVector::from_column_slice(v);
        let len = v.norm();
        let mut rest = v.clone();
        for row in self.basis_coefficients.row_iter() {
            let r = row.transpose();
            rest -= &r * r.dot(&v);
        }
        rest.norm() / len
    }
}

/// Deterministic interior cloud: boundary samples pushed into the domain at
/// several depths, kept when they satisfy the flat side tests.
fn interior_cloud(d: &DomainSpec, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let per = count.div_ceil(d.components.len()).max(1);
    let mut out = Vec::with_capacity(count);
    for (idx, c) in d.components.iter().enumerate() {
        let s = c.outward_surface();
        let qs = s.sample_boundary_on(&d.geometry, per, seed.wrapping_add(977 * idx as u64));
        for (k, q) in qs.iter().enumerate() {
            let (Ok(p), Ok(nu)) = (s.param_map(q), s.flat_normal(q)) else { continue };
            let depth = [0.02, 0.1, 0.25][k % 3];
            let x: Vec<f64> = p.iter().zip(&nu).map(|(a, b)| a - depth * b).collect();
            if d.contains(&x) && d.geometry.contains_with_margin(&x, 0.01) {
                out.push(x);
            }
        }
    }
    out
}

/// Necessary conditions for a static potential: constant scalar curvature, umbilic
/// boundary and constant mean curvature on each component.
pub fn necessary_conditions(d: &DomainSpec, samples_per_component: usize, seed: u64) -> Result<Diagnostics> {
    necessary_conditions_with(d, samples_per_component, KernelOptions::default().interior_samples, seed)
}

fn necessary_conditions_with(
    d: &DomainSpec,
    samples_per_component: usize,
    interior_samples: usize,
    seed: u64,
) -> Result<Diagnostics> {
    let geo = &d.geometry;
    let cloud = interior_cloud(d, interior_samples.max(8), seed);
    let scalars = cloud
        .iter()
        .map(|p| geo.curvature(p).map(|c| c.scalar))
        .collect::<Result<Vec<f64>>>()?;
    let (lo, hi, sum) = scalars
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY, 0.0), |(lo, hi, s), r| (lo.min(*r), hi.max(*r), s + r));
    let (scalar_const_defect, scalar_mean) = if scalars.is_empty() {
        (0.0, geo.model_scalar_curvature())
    } else {
        (hi - lo, sum / scalars.len() as f64)
    };
    let mut diag = Diagnostics {
        scalar_const_defect,
        scalar_mean,
        mean_const_defect: Vec::new(),
        mean_values: Vec::new(),
        umbilic_defect: Vec::new(),
    };
    for (idx, c) in d.components.iter().enumerate() {
        let s = c.outward_surface();
        let qs = s.sample_boundary_on(geo, samples_per_component, seed.wrapping_add(31 * idx as u64 + 7));
        let (mut lo, mut hi, mut sum, mut umb) = (f64::INFINITY, f64::NEG_INFINITY, 0.0, 0.0f64);
        for q in &qs {
            let data = s.surface_data(geo, q)?;
            lo = lo.min(data.mean);
            hi = hi.max(data.mean);
            sum += data.mean;
            umb = umb.max(s.umbilic_defect(geo, q)?);
        }
        diag.mean_const_defect.push(if qs.is_empty() { 0.0 } else { hi - lo });
        diag.mean_values.push(if qs.is_empty() { 0.0 } else { sum / qs.len() as f64 });
        diag.umbilic_defect.push(umb);
    }
    Ok(diag)
}

fn probe_component(
    basis: &PotentialBasis,
    component: &Component,
    samples: usize,
    seed: u64,
) -> Result<(DMatrix<f64>, Vec<Probe>)> {
    let geo = &basis.geometry;
    let s = component.outward_surface();
    let nm1 = geo.dim() as f64 - 1.0;
    let qs = s.sample_boundary_on(geo, samples, seed);
    let k = basis.len();
    let mut matrix = DMatrix::zeros(qs.len(), k);
    let mut probes = Vec::with_capacity(qs.len());
    for (row, q) in qs.iter().enumerate() {
        let data = s.surface_data(geo, q)?;
        let m = (geo.dim() - 1) as f64;
        let defect = (&data.second_form - &data.first_form * (data.mean / m)).amax() / data.first_form.amax();
        if defect > UMBILIC_THRESHOLD {
            return Err(Error::UmbilicityRequired(defect));
        }
        let mut values = Vec::with_capacity(k);
        let mut normal_derivatives = Vec::with_capacity(k);
        for (j, f) in basis.fields.iter().enumerate() {
            let value = f.value(&data.point);
            let grad = f.gradient(&data.point).ok_or(Error::NoClosedForm)?;
            let un = grad.dot(&data.normal);
            matrix[(row, j)] = un - data.mean / nm1 * value;
            values.push(value);
            normal_derivatives.push(un);
        }
        probes.push(Probe {
            first_form: data.first_form,
            second_form: data.second_form,
            values,
            normal_derivatives,
        });
    }
    Ok((matrix, probes))
}

/// Scalar boundary residuals of every basis field (columns) at `samples`
/// boundary points (rows), with the normal pointing out of the domain.
pub fn boundary_residual_matrix(
    basis: &PotentialBasis,
    component: &Component,
    samples: usize,
    seed: u64,
) -> Result<DMatrix<f64>> {
    probe_component(basis, component, samples, seed).map(|(m, _)| m)
}

/// Reduced row echelon form followed by Gram–Schmidt: a canonical
/// orthonormal basis of the row space of `rows`.
fn canonical_rows(rows: DMatrix<f64>) -> DMatrix<f64> {
    let (r, c) = rows.shape();
    let mut m = rows;
    let mut rank = 0;
    for col in 0..c {
        if rank == r {
            break;
        }
        let (pivot, value) = (rank..r)
            .map(|i| (i, m[(i, col)].abs()))
            .fold((rank, 0.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if value < 1e-8 {
            continue;
        }
        m.swap_rows(rank, pivot);
        let lead = m[(rank, col)];
        for j in 0..c {
            m[(rank, j)] /= lead;
        }
        for i in 0..r {
            if i != rank {
                let f = m[(i, col)];
                if f != 0.0 {
                    for j in 0..c {
                        m[(i, j)] -= f * m[(rank, j)];
                    }
                }
            }
        }
        rank += 1;
    }
    let mut out: Vec<DVector<f64>> = Vec::with_capacity(rank);
    for i in 0..rank {
        let mut v = m.row(i).transpose();
        for e in &out {
            v -= e * e.dot(&v);
        }
        out.push(v.normalize().map(|x| x + 0.0));
    }
    let mut result = DMatrix::zeros(out.len(), c);
    for (i, v) in out.iter().enumerate() {
        result.set_row(i, &v.transpose());
    }
    result
}

fn extract(
    geometry: Geometry,
    labels: Vec<String>,
    diagnostics: Diagnostics,
    matrix: DMatrix<f64>,
    probes: Vec<Probe>,
    frame: Option<DMatrix<f64>>,
    rank_tolerance: f64,
) -> Result<KernelReport> {
    let (rows, k) = matrix.shape();
    let n = geometry.dim();
    let mut stacked = matrix.clone();
    // Pad short systems so the decomposition always yields k right vectors.
    if rows < k {
        stacked = stacked.resize_vertically(k, 0.0);
    }
    let svd = stacked.clone().svd(false, true);
    let v_t = svd.v_t.ok_or(Error::InvalidParameters("singular value decomposition failed"))?;
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|a, b| svd.singular_values[*b].total_cmp(&svd.singular_values[*a]));
    let singular_values: Vec<f64> = order.iter().map(|i| svd.singular_values[*i]).collect();
    let sigma_max = singular_values.first().copied().unwrap_or(0.0);
    let cutoff = (rank_tolerance * sigma_max).max(SIGMA_FLOOR * (rows.max(1) as f64).sqrt());
    let flagged = singular_values
        .iter()
        .any(|s| *s > cutoff / 10.0 && *s < cutoff * 10.0);
    let null: Vec<usize> = order
        .iter()
        .copied()
        .filter(|i| svd.singular_values[*i] <= cutoff)
        .collect();
    let mut kernel = DMatrix::zeros(null.len(), k);
    for (r, i) in null.iter().enumerate() {
        kernel.set_row(r, &v_t.row(*i));
    }
    let in_frame = canonical_rows(kernel);
    let dim = in_frame.nrows();
    if dim > n {
        return Err(Error::DimensionBoundViolated { dim, bound: n });
    }
    let mut tensor_residual_max = 0.0f64;
    let mut scalar_residual_max = 0.0f64;
    for row in in_frame.row_iter() {
        let c: Vec<f64> = row.iter().copied().collect();
        for p in &probes {
            tensor_residual_max = tensor_residual_max.max(p.tensor_residual(&c));
        }
        scalar_residual_max = scalar_residual_max.max((&matrix * row.transpose()).amax());
    }
    let basis_coefficients = match &frame {
        Some(h) => canonical_rows(&in_frame * h.transpose()),
        None => in_frame,
    };
    let verdict = if dim >= 1 {
        Verdict::NonGeneric
    } else {
        Verdict::Generic
    };
    Ok(KernelReport {
        geometry,
        labels,
        diagnostics,
        singular_values,
        dim,
        basis_coefficients,
        cutoff,
        rank_tolerance,
        verdict,
        flagged: flagged || tensor_residual_max > TENSOR_THRESHOLD,
        tensor_residual_max,
        scalar_residual_max,
        residual_matrix: matrix,
        frame,
        probes,
    })
}

fn failed(geometry: Geometry, labels: Vec<String>, diagnostics: Diagnostics, frame: Option<DMatrix<f64>>) -> KernelReport {
    let k = labels.len();
    KernelReport {
        geometry,
        labels,
        diagnostics,
        singular_values: Vec::new(),
        dim: 0,
        basis_coefficients: DMatrix::zeros(0, k),
        cutoff: 0.0,
        rank_tolerance: RANK_TOLERANCE,
        verdict: Verdict::NecessaryConditionsFailed,
        flagged: false,
        tensor_residual_max: 0.0,
        scalar_residual_max: 0.0,
        residual_matrix: DMatrix::zeros(0, k),
        frame,
        probes: Vec::new(),
    }
}

/// Classify a domain with default sampling.
pub fn kernel(d: &DomainSpec) -> Result<KernelReport> {
    kernel_with(d, &KernelOptions::default())
}

/// Classify a domain: necessary conditions, then the numerical kernel of
/// the stacked boundary residual matrices.
pub fn kernel_with(d: &DomainSpec, options: &KernelOptions) -> Result<KernelReport> {
    let basis = potential_basis(&d.geometry);
    let samples = options.samples_per_component.unwrap_or(6 * basis.len()).max(3 * basis.len());
    let diagnostics = necessary_conditions_with(d, samples.max(16), options.interior_samples, options.seed)?;
    if !diagnostics.passed() {
        return Ok(failed(d.geometry, basis.labels(), diagnostics, d.frame.clone()));
    }
    let mut blocks = Vec::with_capacity(d.components.len());
    let mut probes = Vec::new();
    for (idx, c) in d.components.iter().enumerate() {
        let (m, p) = probe_component(&basis, c, samples, options.seed.wrapping_add(1 + 1009 * idx as u64))?;
        blocks.push(m);
        probes.extend(p);
    }
    extract(
        d.geometry,
        basis.labels(),
        diagnostics,
        stack(&blocks, basis.len()),
        probes,
        d.frame.clone(),
        options.rank_tolerance,
    )
}

fn stack(blocks: &[DMatrix<f64>], k: usize) -> DMatrix<f64> {
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = DMatrix::zeros(rows, k);
    let mut at = 0;
    for b in blocks {
        out.view_mut((at, 0), (b.nrows(), k)).copy_from(b);
        at += b.nrows();
    }
    out
}

/// Kernel of the union of boundary conditions of several reports over one
/// shared basis.
pub fn intersect(reports: &[KernelReport]) -> Result<KernelReport> {
    let first = reports.first().ok_or(Error::InvalidParameters("nothing to intersect"))?;
    for r in reports {
        if r.labels != first.labels || r.geometry != first.geometry || r.frame != first.frame {
            return Err(Error::BasisMismatch);
        }
    }
    let mut diagnostics = first.diagnostics.clone();
    for r in &reports[1..] {
        diagnostics.scalar_const_defect = diagnostics.scalar_const_defect.max(r.diagnostics.scalar_const_defect);
        diagnostics.mean_const_defect.extend(&r.diagnostics.mean_const_defect);
        diagnostics.mean_values.extend(&r.diagnostics.mean_values);
        diagnostics.umbilic_defect.extend(&r.diagnostics.umbilic_defect);
    }
    if reports.iter().any(|r| r.verdict == Verdict::NecessaryConditionsFailed) {
        return Ok(failed(first.geometry, first.labels.clone(), diagnostics, first.frame.clone()));
    }
    let blocks: Vec<DMatrix<f64>> = reports.iter().map(|r| r.residual_matrix.clone()).collect();
    let probes = reports.iter().flat_map(|r| r.probes.iter().cloned()).collect();
    extract(
        first.geometry,
        first.labels.clone(),
        diagnostics,
        stack(&blocks, first.labels.len()),
        probes,
        first.frame.clone(),
        first.rank_tolerance,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Neg,
    Zero,
    Pos,
}

impl Sign {
    pub fn of(value: f64) -> Self {
        if value.abs() < SIGN_THRESHOLD {
            Sign::Zero
        } else if value > 0.0 {
            Sign::Pos
        } else {
            Sign::Neg
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Neg => '-',
            Sign::Zero => '0',
            Sign::Pos => '+',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Cell {
    Admissible,
    Forbidden,
    /// Ricci-flat interior with totally geodesic, scalar-flat boundary.
    SpecialStar,
}

/// Sign table of compact domains: which `(sign R, sign H)` combinations can
/// carry a static potential.
pub fn table_cell(sign_r: Sign, sign_h: Sign) -> Cell {
    match (sign_r, sign_h) {
        (Sign::Zero, Sign::Neg) | (Sign::Neg, Sign::Zero) | (Sign::Neg, Sign::Neg) => Cell::Forbidden,
        (Sign::Zero, Sign::Zero) => Cell::SpecialStar,
        _ => Cell::Admissible,
    }
}

/// Customary name of a cell, when it has one.
pub fn cell_name(sign_r: Sign, sign_h: Sign) -> Option<&'static str> {
    match (sign_r, sign_h) {
        (Sign::Pos, Sign::Zero) => Some("Neumann"),
        (Sign::Zero, Sign::Pos) => Some("Steklov"),
        _ => None,
    }
}

/// A named compact domain with its sign-table cell.
#[derive(Debug, Clone, PartialEq)]
pub struct TableEntry {
    pub name: String,
    pub sign_r: Sign,
    pub sign_h: Sign,
    pub cell: Cell,
    pub report: KernelReport,
}

/// Built-in compact examples: the unit ball of `ℝ³`, caps of `S³` and a
/// geodesic ball of `ℍ³`.
pub fn compact_examples() -> Result<Vec<(String, DomainSpec)>> {
    let e3 = Geometry::euclidean(3)?;
    let mut out = vec![(
        String::from("R3 unit ball"),
        DomainSpec::new(
            e3,
            vec![Component::new(Hypersurface::euclidean_sphere(&[0.0; 3], 1.0)?, Side::Enclosed)],
            true,
        )?,
    )];
    for (name, angle) in [("S3 cap pi/2", PI / 2.0), ("S3 cap pi/4", PI / 4.0), ("S3 cap 2pi/3", 2.0 * PI / 3.0)] {
        out.push((
            String::from(name),
            DomainSpec::new(
                Geometry::sphere(3)?,
                vec![Component::new(Hypersurface::spherical_cap(3, angle)?, Side::Enclosed)],
                true,
            )?,
        ));
    }
    out.push((
        String::from("H3 geodesic ball eta=2"),
        DomainSpec::new(
            Geometry::hyperbolic(3)?,
            vec![Component::new(Hypersurface::halfspace_sphere(3, 2.0, 1.0)?, Side::Enclosed)],
            true,
        )?,
    ));
    Ok(out)
}

/// Classify each built-in compact example and place it in the sign table.
pub fn classify_table() -> Result<Vec<TableEntry>> {
    let mut out = Vec::new();
    for (name, domain) in compact_examples()? {
        let report = kernel(&domain)?;
        let sign_r = Sign::of(report.diagnostics.scalar_mean);
        let h = report.diagnostics.mean_values.iter().sum::<f64>()
            / report.diagnostics.mean_values.len().max(1) as f64;
        let sign_h = Sign::of(h);
        out.push(TableEntry {
            name,
            sign_r,
            sign_h,
            cell: table_cell(sign_r, sign_h),
            report,
        });
    }
    Ok(out)
}
