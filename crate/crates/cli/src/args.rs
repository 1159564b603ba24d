//! Command-line grammar.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "staticdom", version, about = "Static potentials on model geometries with boundary")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the residual suites of one geometry.
    Verify(VerifyArgs),
    /// Extract the kernel of a domain and decide non-genericity.
    Classify(ClassifyArgs),
    /// Tabulate the mean curvature of centred Schwarzschild spheres.
    Scan(ScanArgs),
    /// Place the built-in compact examples in the sign table.
    Table(TableArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GeometryName {
    Euclidean,
    Sphere,
    Hyperbolic,
    Schwarzschild,
}

impl GeometryName {
    pub fn name(self) -> &'static str {
        match self {
            GeometryName::Euclidean => "euclidean",
            GeometryName::Sphere => "sphere",
            GeometryName::Hyperbolic => "hyperbolic",
            GeometryName::Schwarzschild => "schwarzschild",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    Json,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct Output {
    /// Output format.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write to this file instead of stdout.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub geometry: GeometryName,
    #[arg(long, default_value_t = 3)]
    pub dim: usize,
    /// Mass parameter; required for schwarzschild, rejected otherwise.
    #[arg(long, allow_hyphen_values = true)]
    pub mass: Option<f64>,
    /// Interior sample points.
    #[arg(long, default_value_t = 128)]
    pub samples: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Tolerance of the static operator and trace checks.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Args)]
pub struct ClassifyArgs {
    /// Geometry of the domain; implied by --preset.
    #[arg(long, value_enum)]
    pub geometry: Option<GeometryName>,
    #[arg(long, default_value_t = 3)]
    pub dim: usize,
    #[arg(long, allow_hyphen_values = true)]
    pub mass: Option<f64>,
    /// Boundary component `FAMILY:key=val,...`; vectors use `/` between
    /// entries, `side=enclosed|complement`. Repeat for several components.
    #[arg(long = "surface", value_name = "DESCRIPTOR")]
    pub surfaces: Vec<String>,
    /// Built-in domain (ball, exterior, halfspace, annulus, hemisphere,
    /// triple-cap, horoball, geodesic-ball, horosphere-plane,
    /// schwarzschild-inner, photon-sphere, horizon, schwarzschild-plane,
    /// schwarzschild-shell).
    #[arg(long, conflicts_with_all = ["geometry", "surfaces"])]
    pub preset: Option<String>,
    /// Boundary samples per component (default six per basis field).
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Relative singular-value cutoff of the rank decision.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Args)]
pub struct ScanArgs {
    #[arg(long, default_value_t = 3)]
    pub dim: usize,
    #[arg(long, allow_hyphen_values = true)]
    pub mass: f64,
    /// Grid points between horizon·10⁻³ and horizon·10³.
    #[arg(long, default_value_t = 601)]
    pub points: usize,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Args)]
pub struct TableArgs {
    #[command(flatten)]
    pub output: Output,
}
