//! Acceptance suite: nine criteria at their pinned tolerances, one
//! PASS/FAIL line each. Runs without the libtest harness so the lines are
//! always printed.

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use staticdom_core::catalog::{
    ball_from_halfspace, halfspace_conformality_defect, hyperboloid_from_ball, potential_basis,
};
use staticdom_core::classify::{
    classify_table, intersect, kernel_with, Cell, Component, DomainSpec, KernelOptions, Side, Sign, Verdict,
};
use staticdom_core::schwarzschild::{critical_radii, mean_profile};
use staticdom_core::staticop::{gauss_check, integral_identity, max_interior_residual, ricci_mixed};
use staticdom_core::{fd, Geometry, Hypersurface, ScalarField};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn geometries(n: usize) -> Vec<Geometry> {
    let mut v = vec![
        Geometry::euclidean(n).unwrap(),
        Geometry::sphere(n).unwrap(),
        Geometry::hyperbolic(n).unwrap(),
    ];
    if n >= 3 {
        v.push(Geometry::schwarzschild(n, 2.0).unwrap());
    }
    v
}

fn static_identities() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut slowest: f64 = 0.0;
    for n in [3, 4] {
        for geo in geometries(n) {
            let start = Instant::now();
            for f in &potential_basis(&geo).fields {
                let (l, t) = max_interior_residual(f, &geo, 200, 2024).map_err(|e| e.to_string())?;
                ensure!(
                    l < 1e-6 && t < 1e-6,
                    "{} n={n} field {}: |L*u| {l:e}, trace {t:e}",
                    geo.kind().name(),
                    f.label()
                );
                worst = worst.max(l).max(t);
            }
            let secs = start.elapsed().as_secs_f64();
            ensure!(secs < 10.0, "{} n={n} took {secs:.1} s", geo.kind().name());
            slowest = slowest.max(secs);
        }
    }
    Ok(format!("max residual {worst:.2e}, slowest geometry {slowest:.2} s"))
}

fn curvature_constants() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut check = |geo: Geometry, expected: f64| -> Result<(), String> {
        for p in geo.sample_cloud(100, 77) {
            let r = geo.curvature(&p).map_err(|e| e.to_string())?.scalar;
            worst = worst.max((r - expected).abs());
            if (r - expected).abs() >= 1e-4 {
                return Err(format!("{} n={} at {p:?}: R = {r}", geo.kind().name(), geo.dim()));
            }
        }
        Ok(())
    };
    for n in 2..=4 {
        let nn = (n * (n - 1)) as f64;
        check(Geometry::sphere(n).unwrap(), nn)?;
        check(Geometry::hyperbolic(n).unwrap(), -nn)?;
    }
    for n in [3, 4] {
        check(Geometry::schwarzschild(n, 2.0).unwrap(), 0.0)?;
    }
    Ok(format!("max |R - R_model| {worst:.2e}"))
}

struct Case {
    name: String,
    domain: DomainSpec,
    dim: usize,
    /// Coefficient vectors that must lie in the kernel.
    contains: Vec<Vec<f64>>,
}

fn single(geo: Geometry, s: Hypersurface, side: Side, compact: bool) -> DomainSpec {
    DomainSpec::new(geo, vec![Component::new(s, side)], compact).unwrap()
}

fn kernel_cases() -> Vec<Case> {
    let e3 = Geometry::euclidean(3).unwrap();
    let s3 = Geometry::sphere(3).unwrap();
    let h3 = Geometry::hyperbolic(3).unwrap();
    let sch = Geometry::schwarzschild(3, 2.0).unwrap();
    let unit = || Hypersurface::euclidean_sphere(&[0.0; 3], 1.0).unwrap();
    let mut cases = vec![
        Case {
            name: "R3 ball".into(),
            domain: single(e3, unit(), Side::Enclosed, true),
            dim: 3,
            contains: vec![vec![0.0, 1.0, 0.0, 0.0], vec![0.0, 0.0, 1.0, 0.0], vec![0.0, 0.0, 0.0, 1.0]],
        },
        Case {
            name: "R3 exterior".into(),
            domain: single(e3, unit(), Side::Complement, false),
            dim: 3,
            contains: vec![vec![0.0, 1.0, 0.0, 0.0]],
        },
        Case {
            name: "R3 half-space".into(),
            domain: single(
                e3,
                Hypersurface::hyperplane(&[0.0, 0.0, 1.0], 0.0).unwrap(),
                Side::Enclosed,
                false,
            ),
            dim: 3,
            contains: vec![vec![1.0, 0.0, 0.0, 0.0], vec![0.0, 1.0, 0.0, 0.0], vec![0.0, 0.0, 1.0, 0.0]],
        },
    ];
    for (label, theta) in [("pi/6", PI / 6.0), ("pi/2", PI / 2.0), ("2pi/3", 2.0 * PI / 3.0)] {
        cases.push(Case {
            name: format!("S3 cap {label}"),
            domain: single(s3, Hypersurface::spherical_cap(3, theta).unwrap(), Side::Enclosed, true),
            dim: 3,
            contains: vec![vec![1.0, 0.0, 0.0, 0.0]],
        });
    }
    for eta in [-0.5, 0.0, 1.0, 2.0] {
        cases.push(Case {
            name: format!("H3 sphere eta={eta}"),
            domain: single(
                h3,
                Hypersurface::halfspace_sphere(3, eta, 1.0).unwrap(),
                Side::Enclosed,
                eta > 1.0,
            ),
            dim: 3,
            contains: vec![vec![2.0 - eta * eta, 0.0, 0.0, eta * eta]],
        });
    }
    cases.push(Case {
        name: "H3 parallel plane".into(),
        domain: single(h3, Hypersurface::halfspace_plane_parallel(3, 1.0).unwrap(), Side::Enclosed, false),
        dim: 3,
        contains: vec![vec![1.0, 0.0, 0.0, -1.0]],
    });
    for alpha in [PI / 3.0, 1.0, 2.0 * PI / 3.0] {
        cases.push(Case {
            name: format!("H3 angled plane alpha={alpha:.3}"),
            domain: single(h3, Hypersurface::halfspace_plane_angled(3, alpha).unwrap(), Side::Enclosed, false),
            dim: 3,
            contains: vec![vec![1.0, 0.0, 0.0, 0.0]],
        });
    }
    let sqrt3 = 3f64.sqrt();
    for (r, dim) in [(2.0 - sqrt3, 1), (2.0 + sqrt3, 1), (0.5, 0), (2.0, 0)] {
        cases.push(Case {
            name: format!("Schwarzschild sphere r={r:.6}"),
            domain: single(
                sch,
                Hypersurface::euclidean_sphere(&[0.0; 3], r).unwrap(),
                Side::Enclosed,
                true,
            ),
            dim,
            contains: if dim == 1 { vec![vec![1.0]] } else { vec![] },
        });
    }
    cases.push(Case {
        name: "Schwarzschild plane through 0".into(),
        domain: single(sch, Hypersurface::hyperplane(&[0.0, 0.0, 1.0], 0.0).unwrap(), Side::Enclosed, false),
        dim: 1,
        contains: vec![vec![1.0]],
    });
    cases
}

fn kernel_table() -> Outcome {
    let mut slowest: f64 = 0.0;
    let cases = kernel_cases();
    for case in &cases {
        let start = Instant::now();
        let r = kernel_with(&case.domain, &KernelOptions::default()).map_err(|e| format!("{}: {e}", case.name))?;
        let secs = start.elapsed().as_secs_f64();
        slowest = slowest.max(secs);
        ensure!(secs < 5.0, "{} took {secs:.1} s", case.name);
        ensure!(r.dim == case.dim, "{}: dim {} (expected {}), sv {:?}", case.name, r.dim, case.dim, r.singular_values);
        let expected = if case.dim > 0 { Verdict::NonGeneric } else { Verdict::Generic };
        ensure!(r.verdict == expected, "{}: verdict {:?}", case.name, r.verdict);
        ensure!(!r.flagged, "{}: borderline spectrum {:?}", case.name, r.singular_values);
        for v in &case.contains {
            let d = r.distance_to_kernel(v);
            ensure!(d < 1e-5, "{}: {v:?} at distance {d:e} from the kernel", case.name);
        }
    }
    Ok(format!("{} cases, slowest {slowest:.2} s", cases.len()))
}

fn schwarzschild_numbers() -> Outcome {
    let sqrt3 = 3f64.sqrt();
    let (lo, hi) = critical_radii(2.0, 3).map_err(|e| e.to_string())?;
    ensure!((lo - (2.0 - sqrt3)).abs() < 1e-12, "r- = {lo}");
    ensure!((hi - (2.0 + sqrt3)).abs() < 1e-12, "r+ = {hi}");
    for r in [lo, hi] {
        let dh = mean_profile(2.0, 3, r).unwrap().1;
        ensure!(dh.abs() < 1e-8, "dH({r}) = {dh:e}");
    }
    let h1 = mean_profile(2.0, 3, 1.0).unwrap().0;
    ensure!(h1.abs() < 1e-10, "H(1) = {h1:e}");
    ensure!((lo * hi - 1.0).abs() < 1e-12, "r- r+ = {}", lo * hi);
    let photon = critical_radii(1.0, 3).unwrap().1;
    ensure!((photon - (2.0 + sqrt3) / 2.0).abs() < 1e-10, "photon sphere {photon}");
    Ok(format!("r- = {lo:.12}, r+ = {hi:.12}, photon sphere {photon:.10}"))
}

fn triple_cap() -> Outcome {
    let angle = 0.8f64.acos();
    let axes: Vec<Vec<f64>> = (0..3)
        .map(|j| {
            let mut a = vec![0.0; 4];
            a[j] = 1.0;
            a
        })
        .collect();
    let caps: Vec<(Vec<f64>, f64, Side)> = axes.iter().map(|a| (a.clone(), angle, Side::Complement)).collect();
    let domain = DomainSpec::sphere_caps(3, &caps, true).map_err(|e| e.to_string())?;
    let r = kernel_with(&domain, &KernelOptions::default()).map_err(|e| e.to_string())?;
    ensure!(r.verdict == Verdict::NonGeneric && r.dim == 1, "stacked: {:?} dim {}", r.verdict, r.dim);
    let d = r.distance_to_kernel(&[0.0, 0.0, 0.0, 1.0]);
    ensure!(d < 1e-5, "x4 at distance {d:e}");
    // Same answer by intersecting the three single-cap kernels.
    let singles = caps
        .iter()
        .map(|c| {
            let domain = DomainSpec::sphere_caps(3, std::slice::from_ref(c), true)?;
            kernel_with(&domain, &KernelOptions::default())
        })
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    let both = intersect(&singles).map_err(|e| e.to_string())?;
    ensure!(both.dim == 1 && both.distance_to_kernel(&[0.0, 0.0, 0.0, 1.0]) < 1e-5, "intersect dim {}", both.dim);
    Ok(format!("dim 1, kernel {:?}", r.kernel_element(0)))
}

fn catalog_surfaces() -> Vec<(String, Geometry, Hypersurface, bool)> {
    let e3 = Geometry::euclidean(3).unwrap();
    let s3 = Geometry::sphere(3).unwrap();
    let h3 = Geometry::hyperbolic(3).unwrap();
    let sch = Geometry::schwarzschild(3, 2.0).unwrap();
    let (lo, hi) = critical_radii(2.0, 3).unwrap();
    let mut out = vec![
        ("R3 unit sphere".into(), e3, Hypersurface::euclidean_sphere(&[0.0; 3], 1.0).unwrap(), true),
        ("R3 shifted sphere".into(), e3, Hypersurface::euclidean_sphere(&[0.5, -1.0, 0.2], 1.7).unwrap(), true),
        ("R3 plane".into(), e3, Hypersurface::hyperplane(&[1.0, 1.0, 2.0], 0.3).unwrap(), true),
    ];
    for theta in [PI / 6.0, PI / 4.0, PI / 2.0, 2.0 * PI / 3.0] {
        out.push((format!("S3 cap {theta:.3}"), s3, Hypersurface::spherical_cap(3, theta).unwrap(), true));
    }
    for eta in [-0.5, 0.0, 0.5, 1.0, 2.0] {
        out.push((
            format!("H3 sphere {eta}"),
            h3,
            Hypersurface::halfspace_sphere(3, eta, 1.0).unwrap(),
            true,
        ));
    }
    out.push(("H3 parallel plane".into(), h3, Hypersurface::halfspace_plane_parallel(3, 1.0).unwrap(), true));
    out.push(("H3 angled plane".into(), h3, Hypersurface::halfspace_plane_angled(3, 1.0).unwrap(), true));
    for (r, critical) in [(lo, true), (hi, true), (1.0, false), (2.0, false)] {
        out.push((
            format!("Schwarzschild sphere {r:.4}"),
            sch,
            Hypersurface::euclidean_sphere(&[0.0; 3], r).unwrap(),
            critical,
        ));
    }
    out.push(("Schwarzschild plane".into(), sch, Hypersurface::hyperplane(&[0.0, 0.0, 1.0], 0.0).unwrap(), true));
    out
}

fn global_identities() -> Outcome {
    let e3 = Geometry::euclidean(3).unwrap();
    let ball = single(e3, Hypersurface::euclidean_sphere(&[0.0; 3], 1.0).unwrap(), Side::Enclosed, true);
    let x1 = &potential_basis(&e3).fields[1];
    let d_ball = integral_identity(x1, &ball, 64).map_err(|e| e.to_string())?;
    ensure!(d_ball.abs() < 5e-3, "ball defect {d_ball:e}");
    let s3 = Geometry::sphere(3).unwrap();
    let hemi = single(s3, Hypersurface::spherical_cap(3, PI / 2.0).unwrap(), Side::Enclosed, true);
    let y1 = &potential_basis(&s3).fields[0];
    let d_hemi = integral_identity(y1, &hemi, 64).map_err(|e| e.to_string())?;
    ensure!(d_hemi.abs() < 5e-3, "hemisphere defect {d_hemi:e}");

    let mut gauss: f64 = 0.0;
    let mut mixed: f64 = 0.0;
    for (name, geo, s, non_generic) in catalog_surfaces() {
        for q in s.sample_boundary_on(&geo, 10, 9) {
            let (a, b) = gauss_check(&s, &geo, &q).map_err(|e| format!("{name}: {e}"))?;
            ensure!((a - b).abs() < 1e-4, "{name}: intrinsic {a} vs Gauss {b}");
            gauss = gauss.max((a - b).abs());
            if non_generic {
                let m = ricci_mixed(&s, &geo, &q).map_err(|e| format!("{name}: {e}"))?.amax();
                ensure!(m < 1e-5, "{name}: Ric(e, nu) = {m:e}");
                mixed = mixed.max(m);
            }
        }
    }
    Ok(format!(
        "integral defects {:.1e} / {:.1e}, Gauss {gauss:.1e}, mixed Ricci {mixed:.1e}",
        d_ball.abs(),
        d_hemi.abs()
    ))
}

fn model_maps() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4242);
    let mut q_err: f64 = 0.0;
    let mut count = 0;
    while count < 1000 {
        let u: Vec<f64> = (0..3).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
        if u.iter().map(|x| x * x).sum::<f64>() >= 0.95 {
            continue;
        }
        count += 1;
        let x = hyperboloid_from_ball(&u).map_err(|e| e.to_string())?;
        let q = -x.coords[0] * x.coords[0] + x.coords[1..].iter().map(|v| v * v).sum::<f64>();
        q_err = q_err.max((q + 1.0).abs());
    }
    ensure!(q_err < 1e-10, "Q defect {q_err:e}");
    let mut comp_err: f64 = 0.0;
    let mut conf: f64 = 0.0;
    for _ in 0..100 {
        let y = [rng.random::<f64>() * 4.0 - 2.0, rng.random::<f64>() * 4.0 - 2.0, 0.1 + rng.random::<f64>() * 2.9];
        let x = hyperboloid_from_ball(&ball_from_halfspace(&y).unwrap()).unwrap();
        let flat = y[0] * y[0] + y[1] * y[1];
        let t = y[2];
        let expected = [
            (flat + t * t + 1.0) / (2.0 * t),
            y[0] / t,
            y[1] / t,
            (flat + t * t - 1.0) / (2.0 * t),
        ];
        for i in 0..4 {
            comp_err = comp_err.max((x.coords[i] - expected[i]).abs());
        }
        conf = conf.max(halfspace_conformality_defect(&y).map_err(|e| e.to_string())?);
    }
    ensure!(comp_err < 1e-10, "composite defect {comp_err:e}");
    ensure!(conf < 1e-6, "conformality defect {conf:e}");
    Ok(format!("Q {q_err:.1e}, composite {comp_err:.1e}, conformality {conf:.1e}"))
}

fn table_logic() -> Outcome {
    let entries = classify_table().map_err(|e| e.to_string())?;
    let mut cells = Vec::new();
    for e in &entries {
        ensure!(e.cell != Cell::Forbidden, "{} lands in a forbidden cell", e.name);
        ensure!(e.report.verdict == Verdict::NonGeneric, "{}: {:?}", e.name, e.report.verdict);
        cells.push(format!("{} ({},{})", e.name, e.sign_r.symbol(), e.sign_h.symbol()));
    }
    let has = |r: Sign, h: Sign| entries.iter().any(|e| e.sign_r == r && e.sign_h == h);
    ensure!(has(Sign::Zero, Sign::Pos), "no (0,+) witness");
    ensure!(has(Sign::Pos, Sign::Zero), "no (+,0) witness");
    Ok(cells.join(", "))
}

fn robustness() -> Outcome {
    let cases = kernel_cases();
    for case in &cases {
        let base = kernel_with(&case.domain, &KernelOptions::default()).map_err(|e| e.to_string())?;
        for seed in 1..=5 {
            let r = kernel_with(&case.domain, &KernelOptions { seed, ..KernelOptions::default() })
                .map_err(|e| e.to_string())?;
            ensure!(r.verdict == base.verdict && r.dim == base.dim, "{}: seed {seed} changed the verdict", case.name);
        }
        let k = base.labels.len();
        let doubled = kernel_with(
            &case.domain,
            &KernelOptions {
                samples_per_component: Some(12 * k),
                ..KernelOptions::default()
            },
        )
        .map_err(|e| e.to_string())?;
        ensure!(doubled.dim == base.dim, "{}: doubling samples changed dim", case.name);
        let rows = |m: usize| (m as f64).sqrt();
        let (ra, rb) = (rows(base.residual_matrix.nrows()), rows(doubled.residual_matrix.nrows()));
        for (a, b) in base.singular_values.iter().zip(&doubled.singular_values) {
            if *a > base.cutoff {
                let change = ((a / ra) - (b / rb)).abs() / (a / ra);
                ensure!(change < 0.1, "{}: singular value moved by {:.1}%", case.name, 100.0 * change);
            }
        }
    }
    // Plain central differences against analytic gradients, h then h/2.
    let mut min_order = f64::INFINITY;
    for geo in geometries(3) {
        for f in &potential_basis(&geo).fields {
            for p in [[0.4, -0.3, 0.9], [1.1, 0.5, 1.4]] {
                let exact = f.gradient(&p).unwrap();
                let value = |q: &[f64]| Ok(f.value(q));
                let err = |h: f64| -> f64 {
                    (0..3)
                        .map(|i| (fd::central(&value, &p, i, h).unwrap() - exact[i]).abs())
                        .fold(0.0, f64::max)
                };
                let (e1, e2) = (err(2e-2), err(1e-2));
                if e1 > 1e-9 {
                    min_order = min_order.min((e1 / e2).log2());
                }
            }
        }
    }
    ensure!(min_order >= 1.9, "observed FD order {min_order:.3}");
    Ok(format!("{} cases x 5 seeds stable, FD order {min_order:.3}", cases.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("static identities", static_identities),
        ("curvature constants", curvature_constants),
        ("kernel-dimension table", kernel_table),
        ("Schwarzschild numbers", schwarzschild_numbers),
        ("multi-component caps", triple_cap),
        ("global identities", global_identities),
        ("model maps", model_maps),
        ("sign table", table_logic),
        ("robustness", robustness),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS {name} [{secs:.2} s] {detail}", i + 1),
            Err(why) => {
                failures += 1;
                println!("criterion {}: FAIL {name} [{secs:.2} s] {why}", i + 1);
            }
        }
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
