//! The four subcommands. Each returns the rendered report and its exit status.

use serde_json::Value;
use staticdom_core::classify::{cell_name, classify_table, kernel_with, Cell, KernelOptions, KernelReport};
use staticdom_core::schwarzschild::SchwarzschildAnalysis;
use staticdom_core::Verdict;

use crate::args::{ClassifyArgs, Format, GeometryName, ScanArgs, TableArgs, VerifyArgs};
use crate::config::{self, Invalid, SurfaceDescriptor};
use crate::emit::{csv, json, num, nums, object, sci};
use crate::verify::{suite, Check};

/// Why a command stopped before producing a report.
#[derive(Debug)]
pub enum Failure {
    /// Exit status 2.
    Invalid(String),
    /// Exit status 1.
    Runtime(String),
}

impl From<Invalid> for Failure {
    fn from(e: Invalid) -> Self {
        Failure::Invalid(e.0)
    }
}

pub struct Report {
    pub text: String,
    pub status: u8,
}

fn io_failure(e: std::io::Error) -> Failure {
    Failure::Runtime(e.to_string())
}

fn positive_tolerance(tol: f64) -> Result<(), Failure> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Failure::Invalid(format!("--tol must be positive, got {tol}")))
    }
}

pub fn verify(a: &VerifyArgs) -> Result<Report, Failure> {
    positive_tolerance(a.tol)?;
    if a.samples == 0 {
        return Err(Failure::Invalid("--samples must be positive".into()));
    }
    let geo = config::geometry(a.geometry, a.dim, a.mass)?;
    let checks = suite(&geo, a.samples, a.seed, a.tol).map_err(Failure::Runtime)?;
    let all = checks.iter().all(Check::passed);
    let format = a.output.format.unwrap_or(Format::Human);
    let text = match format {
        Format::Json => json(&object(vec![
            (
                "config",
                object(vec![
                    ("command", "verify".into()),
                    ("geometry", a.geometry.name().into()),
                    ("dim", a.dim.into()),
                    ("mass", a.mass.map_or(Value::Null, num)),
                    ("samples", a.samples.into()),
                    ("seed", a.seed.into()),
                    ("tol", num(a.tol)),
                ]),
            ),
            (
                "checks",
                Value::Array(
                    checks
                        .iter()
                        .map(|c| {
                            object(vec![
                                ("name", c.name.clone().into()),
                                ("residual", num(c.residual)),
                                ("tolerance", num(c.tolerance)),
                                ("pass", c.passed().into()),
                            ])
                        })
                        .collect(),
                ),
            ),
            ("pass", all.into()),
        ])),
        Format::Csv => {
            let rows: Vec<Vec<String>> = checks
                .iter()
                .map(|c| vec![c.name.clone(), sci(c.residual), sci(c.tolerance), c.passed().to_string()])
                .collect();
            csv(&["check", "residual", "tolerance", "pass"], &rows).map_err(io_failure)?
        }
        Format::Human => {
            let width = checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
            let mut s = format!("verify {} n={}", a.geometry.name(), a.dim);
            if let Some(m) = a.mass {
                s += &format!(" m={m}");
            }
            s.push('\n');
            for c in &checks {
                s += &format!(
                    "{} {:width$}  {:.3e} (tol {:.0e})\n",
                    if c.passed() { "PASS" } else { "FAIL" },
                    c.name,
                    c.residual,
                    c.tolerance
                );
            }
            s += &format!("{} of {} checks passed\n", checks.iter().filter(|c| c.passed()).count(), checks.len());
            s
        }
    };
    Ok(Report {
        text,
        status: if all { 0 } else { 1 },
    })
}

pub fn classify(a: &ClassifyArgs) -> Result<Report, Failure> {
    positive_tolerance(a.tol)?;
    if a.tol >= 1.0 {
        return Err(Failure::Invalid("--tol must be below 1".into()));
    }
    if a.samples == Some(0) {
        return Err(Failure::Invalid("--samples must be positive".into()));
    }
    let (kind, mass, surfaces) = match &a.preset {
        Some(name) => config::preset(name, a.dim, a.mass)?,
        None => {
            let kind = a
                .geometry
                .ok_or_else(|| Failure::Invalid("classify needs --geometry or --preset".into()))?;
            (kind, a.mass, a.surfaces.clone())
        }
    };
    let geo = config::geometry(kind, a.dim, mass)?;
    let descriptors = surfaces
        .iter()
        .map(|s| SurfaceDescriptor::parse(s))
        .collect::<Result<Vec<_>, _>>()?;
    let domain = config::domain(&geo, &descriptors)?;
    let options = KernelOptions {
        samples_per_component: a.samples,
        seed: a.seed,
        rank_tolerance: a.tol,
        ..KernelOptions::default()
    };
    let report = kernel_with(&domain, &options).map_err(|e| Failure::Runtime(e.to_string()))?;
    let status = if report.verdict == Verdict::NonGeneric { 0 } else { 1 };
    let text = match a.output.format.unwrap_or(Format::Human) {
        Format::Json => json(&classify_json(a, kind, mass, &surfaces, &report)),
        Format::Csv => {
            let mut rows = Vec::new();
            for i in 0..report.dim {
                for (label, c) in report.kernel_element(i) {
                    rows.push(vec![i.to_string(), label, sci(c)]);
                }
            }
            csv(&["element", "label", "coefficient"], &rows).map_err(io_failure)?
        }
        Format::Human => classify_human(&geo_line(kind, a.dim, mass), &report),
    };
    Ok(Report { text, status })
}

fn geo_line(kind: GeometryName, dim: usize, mass: Option<f64>) -> String {
    match mass {
        Some(m) => format!("{} n={dim} m={m}", kind.name()),
        None => format!("{} n={dim}", kind.name()),
    }
}

fn classify_json(
    a: &ClassifyArgs,
    kind: GeometryName,
    mass: Option<f64>,
    surfaces: &[String],
    r: &KernelReport,
) -> Value {
    let d = &r.diagnostics;
    object(vec![
        (
            "config",
            object(vec![
                ("command", "classify".into()),
                ("geometry", kind.name().into()),
                ("dim", a.dim.into()),
                ("mass", mass.map_or(Value::Null, num)),
                ("preset", a.preset.clone().map_or(Value::Null, Value::from)),
                ("surfaces", surfaces.to_vec().into()),
                ("samples", a.samples.map_or(Value::Null, Value::from)),
                ("seed", a.seed.into()),
                ("tol", num(a.tol)),
            ]),
        ),
        (
            "diagnostics",
            object(vec![
                ("passed", d.passed().into()),
                ("scalar_const_defect", num(d.scalar_const_defect)),
                ("scalar_mean", num(d.scalar_mean)),
                ("mean_const_defect", nums(&d.mean_const_defect)),
                ("mean_values", nums(&d.mean_values)),
                ("umbilic_defect", nums(&d.umbilic_defect)),
                ("cutoff", num(r.cutoff)),
                ("flagged", r.flagged.into()),
                ("tensor_residual_max", num(r.tensor_residual_max)),
                ("scalar_residual_max", num(r.scalar_residual_max)),
            ]),
        ),
        ("singular_values", nums(&r.singular_values)),
        ("dim", r.dim.into()),
        (
            "kernel",
            Value::Array(
                (0..r.dim)
                    .map(|i| Value::Object(r.kernel_element(i).into_iter().map(|(l, c)| (l, num(c))).collect()))
                    .collect(),
            ),
        ),
        ("verdict", r.verdict.name().into()),
    ])
}

/// A kernel element as `c·label` terms, dropping negligible coefficients.
fn combination(terms: &[(String, f64)]) -> String {
    let kept: Vec<String> = terms
        .iter()
        .filter(|(_, c)| c.abs() > 1e-12)
        .map(|(l, c)| format!("{c:+.6} {l}"))
        .collect();
    if kept.is_empty() {
        "0".into()
    } else {
        kept.join(" ")
    }
}

fn classify_human(geo: &str, r: &KernelReport) -> String {
    let d = &r.diagnostics;
    let mut s = format!("geometry     {geo}\n");
    s += &format!("verdict      {}\n", r.verdict.name());
    s += &format!("kernel dim   {}\n", r.dim);
    s += &format!(
        "scalar R     mean {:.6e}, spread {:.3e}\n",
        d.scalar_mean, d.scalar_const_defect
    );
    for i in 0..d.mean_values.len() {
        s += &format!(
            "component {i}  H {:.6e}, spread {:.3e}, umbilic defect {:.3e}\n",
            d.mean_values[i], d.mean_const_defect[i], d.umbilic_defect[i]
        );
    }
    if !r.singular_values.is_empty() {
        let sv: Vec<String> = r.singular_values.iter().map(|x| format!("{x:.3e}")).collect();
        s += &format!("singular     {}\n", sv.join(" "));
        s += &format!("cutoff       {:.3e}{}\n", r.cutoff, if r.flagged { " (near cutoff)" } else { "" });
    }
    for i in 0..r.dim {
        s += &format!("element {i}    {}\n", combination(&r.kernel_element(i)));
    }
    s
}

pub fn scan(a: &ScanArgs) -> Result<Report, Failure> {
    if a.points < 2 {
        return Err(Failure::Invalid("--points must be at least 2".into()));
    }
    let sa = SchwarzschildAnalysis::new(a.mass, a.dim).map_err(|e| Failure::Invalid(e.to_string()))?;
    let mut radii: Vec<(f64, &str)> = sa.log_grid(a.points).into_iter().map(|r| (r, "")).collect();
    radii.extend([(sa.horizon, "horizon"), (sa.r_minus, "r_minus"), (sa.r_plus, "r_plus")]);
    radii.sort_by(|x, y| x.0.total_cmp(&y.0));
    let rows = {
        use rayon::prelude::*;
        radii
            .par_iter()
            .map(|(r, marker)| {
                let (h, dh) = staticdom_core::schwarzschild::mean_profile(a.mass, a.dim, *r)?;
                Ok((*r, h, dh, *marker))
            })
            .collect::<staticdom_core::Result<Vec<_>>>()
            .map_err(|e| Failure::Runtime(e.to_string()))?
    };
    let text = match a.output.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let rows: Vec<Vec<String>> = rows
                .iter()
                .map(|(r, h, dh, m)| vec![sci(*r), sci(*h), sci(*dh), m.to_string()])
                .collect();
            csv(&["r", "H", "dH", "marker"], &rows).map_err(io_failure)?
        }
        Format::Json => json(&object(vec![
            (
                "config",
                object(vec![
                    ("command", "scan".into()),
                    ("geometry", "schwarzschild".into()),
                    ("dim", a.dim.into()),
                    ("mass", num(a.mass)),
                    ("points", a.points.into()),
                ]),
            ),
            ("horizon", num(sa.horizon)),
            ("r_minus", num(sa.r_minus)),
            ("r_plus", num(sa.r_plus)),
            (
                "rows",
                Value::Array(
                    rows.iter()
                        .map(|(r, h, dh, m)| {
                            object(vec![("r", num(*r)), ("H", num(*h)), ("dH", num(*dh)), ("marker", (*m).into())])
                        })
                        .collect(),
                ),
            ),
        ])),
        Format::Human => {
            let mut s = format!(
                "schwarzschild n={} m={}: r- {:.6}, horizon {:.6}, r+ {:.6}\n",
                a.dim, a.mass, sa.r_minus, sa.horizon, sa.r_plus
            );
            s += &format!("{:>14} {:>14} {:>14}  marker\n", "r", "H", "dH");
            for (r, h, dh, m) in &rows {
                s += &format!("{r:>14.6e} {h:>14.6e} {dh:>14.6e}  {m}\n");
            }
            s
        }
    };
    Ok(Report { text, status: 0 })
}

fn cell_label(c: Cell) -> &'static str {
    match c {
        Cell::Admissible => "admissible",
        Cell::Forbidden => "forbidden",
        Cell::SpecialStar => "special",
    }
}

pub fn table(a: &TableArgs) -> Result<Report, Failure> {
    let entries = classify_table().map_err(|e| Failure::Runtime(e.to_string()))?;
    let clean = entries.iter().all(|e| e.cell != Cell::Forbidden);
    let text = match a.output.format.unwrap_or(Format::Human) {
        Format::Json => json(&object(vec![
            ("config", object(vec![("command", "table".into())])),
            (
                "entries",
                Value::Array(
                    entries
                        .iter()
                        .map(|e| {
                            object(vec![
                                ("name", e.name.clone().into()),
                                ("sign_r", e.sign_r.symbol().to_string().into()),
                                ("sign_h", e.sign_h.symbol().to_string().into()),
                                ("cell", cell_label(e.cell).into()),
                                ("cell_name", cell_name(e.sign_r, e.sign_h).map_or(Value::Null, Value::from)),
                                ("verdict", e.report.verdict.name().into()),
                                ("dim", e.report.dim.into()),
                            ])
                        })
                        .collect(),
                ),
            ),
            ("no_forbidden_cell", clean.into()),
        ])),
        Format::Csv => {
            let rows: Vec<Vec<String>> = entries
                .iter()
                .map(|e| {
                    vec![
                        e.name.clone(),
                        e.sign_r.symbol().to_string(),
                        e.sign_h.symbol().to_string(),
                        cell_label(e.cell).to_string(),
                        cell_name(e.sign_r, e.sign_h).unwrap_or("").to_string(),
                        e.report.verdict.name().to_string(),
                        e.report.dim.to_string(),
                    ]
                })
                .collect();
            csv(&["name", "sign_r", "sign_h", "cell", "cell_name", "verdict", "dim"], &rows).map_err(io_failure)?
        }
        Format::Human => {
            let width = entries.iter().map(|e| e.name.len()).max().unwrap_or(0);
            let mut s = String::new();
            for e in &entries {
                s += &format!(
                    "{:width$}  ({}, {})  {:<10} {:<8} {} dim {}\n",
                    e.name,
                    e.sign_r.symbol(),
                    e.sign_h.symbol(),
                    cell_label(e.cell),
                    cell_name(e.sign_r, e.sign_h).unwrap_or("-"),
                    e.report.verdict.name(),
                    e.report.dim
                );
            }
            s += if clean { "no forbidden cell\n" } else { "FORBIDDEN CELL OCCURS\n" };
            s
        }
    };
    Ok(Report {
        text,
        status: if clean { 0 } else { 1 },
    })
}
