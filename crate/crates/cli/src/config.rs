//! Geometry and surface descriptors, presets, and their validation.

use std::f64::consts::PI;

use staticdom_core::classify::{Component, DomainSpec, Side};
use staticdom_core::schwarzschild::{critical_radii, horizon_radius};
use staticdom_core::surfaces::{Family, MAX_SURFACE_DIM};
use staticdom_core::{Geometry, GeometryKind, Hypersurface};

use crate::args::GeometryName;

/// A configuration problem; always maps to exit status 2.
#[derive(Debug, Clone, PartialEq)]
pub struct Invalid(pub String);

impl Invalid {
    pub fn new(msg: impl Into<String>) -> Self {
        Invalid(msg.into())
    }
}

impl<E: std::error::Error> From<E> for Invalid {
    fn from(e: E) -> Self {
        Invalid(e.to_string())
    }
}

pub type Checked<T> = std::result::Result<T, Invalid>;

pub fn geometry(kind: GeometryName, dim: usize, mass: Option<f64>) -> Checked<Geometry> {
    if dim > MAX_SURFACE_DIM {
        return Err(Invalid::new(format!("--dim must be at most {MAX_SURFACE_DIM}")));
    }
    match (kind, mass) {
        (GeometryName::Schwarzschild, None) => Err(Invalid::new("--mass is required for schwarzschild")),
        (GeometryName::Schwarzschild, Some(m)) => Ok(Geometry::schwarzschild(dim, m)?),
        (_, Some(_)) => Err(Invalid::new("--mass only applies to schwarzschild")),
        (GeometryName::Euclidean, None) => Ok(Geometry::euclidean(dim)?),
        (GeometryName::Sphere, None) => Ok(Geometry::sphere(dim)?),
        (GeometryName::Hyperbolic, None) => Ok(Geometry::hyperbolic(dim)?),
    }
}

/// Parse a real number. Accepts plain floats and multiples of `pi` such as
/// `pi/4`, `2pi/3` or `-0.5*pi`.
pub fn number(s: &str) -> Checked<f64> {
    let s = s.trim();
    let bad = || Invalid::new(format!("not a number: {s:?}"));
    let value = match s.find("pi") {
        None => s.parse::<f64>().map_err(|_| bad())?,
        Some(at) => {
            let coef = s[..at].trim_end_matches('*');
            let coef = match coef {
                "" => 1.0,
                "-" => -1.0,
                c => c.parse::<f64>().map_err(|_| bad())?,
            };
            let rest = &s[at + 2..];
            let den = match rest.strip_prefix('/') {
                None if rest.is_empty() => 1.0,
                None => return Err(bad()),
                Some(d) => d.parse::<f64>().map_err(|_| bad())?,
            };
            coef * PI / den
        }
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(bad())
    }
}

/// Parse a `/`-separated vector of plain numbers.
pub fn vector(s: &str, len: usize) -> Checked<Vec<f64>> {
    let v = s
        .split('/')
        .map(|x| {
            x.trim()
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| Invalid::new(format!("not a vector: {s:?}")))
        })
        .collect::<Checked<Vec<f64>>>()?;
    if v.len() != len {
        return Err(Invalid::new(format!("vector {s:?} needs {len} entries, found {}", v.len())));
    }
    Ok(v)
}

/// One parsed `FAMILY:key=val,...` descriptor.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceDescriptor {
    pub family: String,
    pub params: Vec<(String, String)>,
}

impl SurfaceDescriptor {
    pub fn parse(s: &str) -> Checked<Self> {
        let (family, rest) = s.split_once(':').unwrap_or((s, ""));
        let family = family.trim().to_ascii_lowercase();
        if family.is_empty() {
            return Err(Invalid::new(format!("surface descriptor {s:?} has no family")));
        }
        let mut params: Vec<(String, String)> = Vec::new();
        for item in rest.split(',').map(str::trim).filter(|x| !x.is_empty()) {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| Invalid::new(format!("expected key=value, found {item:?}")))?;
            let k = k.trim().to_ascii_lowercase();
            if params.iter().any(|(p, _)| *p == k) {
                return Err(Invalid::new(format!("duplicate key {k:?} in {s:?}")));
            }
            params.push((k, v.trim().to_string()));
        }
        Ok(SurfaceDescriptor { family, params })
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.params.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    fn require(&self, key: &str) -> Checked<&str> {
        self.get(key)
            .ok_or_else(|| Invalid::new(format!("{} needs {key}=...", self.family)))
    }

    fn allow_only(&self, keys: &[&str]) -> Checked<()> {
        for (k, _) in &self.params {
            if k != "side" && !keys.contains(&k.as_str()) {
                return Err(Invalid::new(format!("{} does not take {k:?}", self.family)));
            }
        }
        Ok(())
    }

    pub fn side(&self) -> Checked<Side> {
        match self.get("side").map(str::to_ascii_lowercase).as_deref() {
            None | Some("enclosed") | Some("inside") => Ok(Side::Enclosed),
            Some("complement") | Some("outside") => Ok(Side::Complement),
            Some(other) => Err(Invalid::new(format!("unknown side {other:?}"))),
        }
    }
}

/// Families accepted by each geometry.
fn families_for(kind: GeometryKind) -> &'static [&'static str] {
    match kind {
        GeometryKind::Euclidean | GeometryKind::Schwarzschild => &["sphere", "plane", "ellipsoid"],
        GeometryKind::Sphere => &["cap"],
        GeometryKind::HyperbolicHalfSpace => &["hsphere", "hplane", "hangled"],
    }
}

fn surface(geo: &Geometry, d: &SurfaceDescriptor) -> Checked<Hypersurface> {
    let n = geo.dim();
    if !families_for(geo.kind()).contains(&d.family.as_str()) {
        return Err(Invalid::new(format!(
            "family {:?} is not available in {} (expected one of {})",
            d.family,
            geo.kind().name(),
            families_for(geo.kind()).join(", ")
        )));
    }
    let zeros = vec![0.0; n];
    Ok(match d.family.as_str() {
        "sphere" => {
            d.allow_only(&["center", "radius"])?;
            let center = d.get("center").map(|v| vector(v, n)).transpose()?.unwrap_or(zeros);
            let radius = d.get("radius").map(number).transpose()?.unwrap_or(1.0);
            Hypersurface::euclidean_sphere(&center, radius)?
        }
        "plane" => {
            d.allow_only(&["normal", "offset"])?;
            let mut e_n = zeros;
            e_n[n - 1] = 1.0;
            let normal = d.get("normal").map(|v| vector(v, n)).transpose()?.unwrap_or(e_n);
            let offset = d.get("offset").map(number).transpose()?.unwrap_or(0.0);
            Hypersurface::hyperplane(&normal, offset)?
        }
        "ellipsoid" => {
            d.allow_only(&["center", "axes"])?;
            let center = d.get("center").map(|v| vector(v, n)).transpose()?.unwrap_or(zeros);
            let axes = vector(d.require("axes")?, n)?;
            Hypersurface::ellipsoid(&center, &axes)?
        }
        "hsphere" => {
            d.allow_only(&["height", "radius"])?;
            let height = number(d.require("height")?)?;
            let radius = d.get("radius").map(number).transpose()?.unwrap_or(1.0);
            Hypersurface::halfspace_sphere(n, height, radius)?
        }
        "hplane" => {
            d.allow_only(&["height"])?;
            let height = d.get("height").map(number).transpose()?.unwrap_or(1.0);
            Hypersurface::halfspace_plane_parallel(n, height)?
        }
        "hangled" => {
            d.allow_only(&["angle"])?;
            Hypersurface::halfspace_plane_angled(n, number(d.require("angle")?)?)?
        }
        other => return Err(Invalid::new(format!("unknown family {other:?}"))),
    })
}

fn cap(n: usize, d: &SurfaceDescriptor) -> Checked<(Vec<f64>, f64, Side)> {
    d.allow_only(&["angle", "axis"])?;
    let mut pole = vec![0.0; n + 1];
    pole[n] = 1.0;
    let axis = d.get("axis").map(|v| vector(v, n + 1)).transpose()?.unwrap_or(pole);
    Ok((axis, number(d.require("angle")?)?, d.side()?))
}

/// Whether the domain is bounded, inferred from its components.
fn infer_compact(geo: &Geometry, components: &[Component]) -> bool {
    geo.kind() == GeometryKind::Sphere
        || components.iter().any(|c| {
            c.side == Side::Enclosed
                && match c.surface.family() {
                    Family::EuclideanSphere { .. } | Family::Ellipsoid { .. } => true,
                    Family::HalfSpaceSphere { height } => *height > 1.0,
                    _ => false,
                }
        })
}

/// Build a domain from surface descriptors.
pub fn domain(geo: &Geometry, descriptors: &[SurfaceDescriptor]) -> Checked<DomainSpec> {
    if descriptors.is_empty() {
        return Err(Invalid::new("classify needs at least one --surface or a --preset"));
    }
    if geo.kind() == GeometryKind::Sphere {
        let caps = descriptors
            .iter()
            .map(|d| {
                if d.family != "cap" {
                    return Err(Invalid::new(format!("family {:?} is not available in sphere (expected cap)", d.family)));
                }
                cap(geo.dim(), d)
            })
            .collect::<Checked<Vec<_>>>()?;
        return Ok(DomainSpec::sphere_caps(geo.dim(), &caps, true)?);
    }
    let components = descriptors
        .iter()
        .map(|d| Ok(Component::new(surface(geo, d)?, d.side()?)))
        .collect::<Checked<Vec<_>>>()?;
    let compact = infer_compact(geo, &components);
    Ok(DomainSpec::new(*geo, components, compact)?)
}

/// Names accepted by `--preset`.
pub const PRESETS: &[&str] = &[
    "ball",
    "exterior",
    "halfspace",
    "annulus",
    "hemisphere",
    "triple-cap",
    "horoball",
    "geodesic-ball",
    "horosphere-plane",
    "schwarzschild-inner",
    "photon-sphere",
    "horizon",
    "schwarzschild-plane",
    "schwarzschild-shell",
];

/// Expand a preset into a geometry and surface descriptors. Schwarzschild
/// presets use mass 2 unless one is given.
pub fn preset(name: &str, dim: usize, mass: Option<f64>) -> Checked<(GeometryName, Option<f64>, Vec<String>)> {
    let schw = |mass: Option<f64>| -> Checked<(f64, f64, f64, f64)> {
        let m = mass.unwrap_or(2.0);
        let (lo, hi) = critical_radii(m, dim)?;
        Ok((m, lo, hi, horizon_radius(m, dim)?))
    };
    let flat = |surfaces: Vec<String>| -> Checked<(GeometryName, Option<f64>, Vec<String>)> {
        if mass.is_some() {
            return Err(Invalid::new(format!("preset {name:?} does not take --mass")));
        }
        Ok((GeometryName::Euclidean, None, surfaces))
    };
    let with = |kind: GeometryName, surfaces: Vec<String>| -> Checked<(GeometryName, Option<f64>, Vec<String>)> {
        if mass.is_some() {
            return Err(Invalid::new(format!("preset {name:?} does not take --mass")));
        }
        Ok((kind, None, surfaces))
    };
    let sphere = |r: f64, side: &str| format!("sphere:radius={r:e},side={side}");
    match name {
        "ball" => flat(vec!["sphere:radius=1".into()]),
        "exterior" => flat(vec!["sphere:radius=1,side=complement".into()]),
        "halfspace" => flat(vec!["plane".into()]),
        "annulus" => flat(vec!["sphere:radius=1,side=complement".into(), "sphere:radius=2".into()]),
        "hemisphere" => with(GeometryName::Sphere, vec!["cap:angle=pi/2".into()]),
        "triple-cap" => {
            // Complements of n caps about the first n axes with cos θ = 0.8.
            let angle = 0.8f64.acos();
            let surfaces = (0..dim)
                .map(|j| {
                    let axis: Vec<String> = (0..=dim).map(|i| if i == j { "1" } else { "0" }.to_string()).collect();
                    format!("cap:angle={angle:e},axis={},side=complement", axis.join("/"))
                })
                .collect();
            with(GeometryName::Sphere, surfaces)
        }
        "horoball" => with(GeometryName::Hyperbolic, vec!["hsphere:height=1".into()]),
        "geodesic-ball" => with(GeometryName::Hyperbolic, vec!["hsphere:height=2".into()]),
        "horosphere-plane" => with(GeometryName::Hyperbolic, vec!["hplane:height=1".into()]),
        "schwarzschild-inner" => {
            let (m, lo, _, _) = schw(mass)?;
            Ok((GeometryName::Schwarzschild, Some(m), vec![sphere(lo, "enclosed")]))
        }
        "photon-sphere" => {
            let (m, _, hi, _) = schw(mass)?;
            Ok((GeometryName::Schwarzschild, Some(m), vec![sphere(hi, "enclosed")]))
        }
        "horizon" => {
            let (m, _, _, h) = schw(mass)?;
            Ok((GeometryName::Schwarzschild, Some(m), vec![sphere(h, "enclosed")]))
        }
        "schwarzschild-plane" => {
            let (m, _, _, _) = schw(mass)?;
            Ok((GeometryName::Schwarzschild, Some(m), vec!["plane".into()]))
        }
        "schwarzschild-shell" => {
            let (m, lo, hi, _) = schw(mass)?;
            Ok((GeometryName::Schwarzschild, Some(m), vec![sphere(lo, "complement"), sphere(hi, "enclosed")]))
        }
        other => Err(Invalid::new(format!("unknown preset {other:?} (expected one of {})", PRESETS.join(", ")))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers() {
        assert_eq!(number("1.5").unwrap(), 1.5);
        assert!((number("pi/4").unwrap() - PI / 4.0).abs() < 1e-15);
        assert!((number("2pi/3").unwrap() - 2.0 * PI / 3.0).abs() < 1e-15);
        assert!((number("-0.5*pi").unwrap() + PI / 2.0).abs() < 1e-15);
        for bad in ["", "x", "pi/", "pix", "inf", "nan", "1/0"] {
            assert!(number(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn descriptors() {
        let d = SurfaceDescriptor::parse("Sphere:center=0/0/1, radius=2,side=complement").unwrap();
        assert_eq!(d.family, "sphere");
        assert_eq!(d.side().unwrap(), Side::Complement);
        assert!(SurfaceDescriptor::parse(":radius=1").is_err());
        assert!(SurfaceDescriptor::parse("sphere:radius").is_err());
        assert!(SurfaceDescriptor::parse("sphere:radius=1,radius=2").is_err());
        let e3 = Geometry::euclidean(3).unwrap();
        assert!(surface(&e3, &SurfaceDescriptor::parse("sphere:center=0/0").unwrap()).is_err());
        assert!(surface(&e3, &SurfaceDescriptor::parse("sphere:tilt=1").unwrap()).is_err());
        assert!(surface(&e3, &SurfaceDescriptor::parse("cap:angle=1").unwrap()).is_err());
        assert!(surface(&e3, &SurfaceDescriptor::parse("sphere:radius=-1").unwrap()).is_err());
    }

    #[test]
    fn mass_iff_schwarzschild() {
        assert!(geometry(GeometryName::Schwarzschild, 3, None).is_err());
        assert!(geometry(GeometryName::Euclidean, 3, Some(1.0)).is_err());
        assert!(geometry(GeometryName::Schwarzschild, 2, Some(1.0)).is_err());
        assert!(geometry(GeometryName::Schwarzschild, 3, Some(f64::NAN)).is_err());
        assert!(geometry(GeometryName::Schwarzschild, 3, Some(1.0)).is_ok());
    }

    #[test]
    fn every_preset_builds() {
        for name in PRESETS {
            let (kind, mass, surfaces) = preset(name, 3, None).unwrap();
            let geo = geometry(kind, 3, mass).unwrap();
            let ds: Vec<_> = surfaces.iter().map(|s| SurfaceDescriptor::parse(s).unwrap()).collect();
            domain(&geo, &ds).unwrap_or_else(|e| panic!("{name}: {e:?}"));
        }
    }
}
