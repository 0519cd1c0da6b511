use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "selfsim",
    version,
    about = "Construct and verify self-similar solutions of the steady simplified Ericksen-Leslie system"
)]
pub struct Cli {
    /// Write the result to this file (atomically) instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Output format. Defaults to json for reports and csv for tables.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Size of the worker pool; defaults to the number of cores.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Analytic,
    Fd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Pressure {
    Balanced,
    Stated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Quantity {
    U,
    P,
    D,
    #[value(name = "grad_d_norm", alias = "grad-d-norm")]
    GradDNorm,
    #[value(name = "head_pressure", alias = "head-pressure")]
    HeadPressure,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a solution spec and write it as JSON.
    Construct(ConstructArgs),
    /// Check a spec against the equations and write the residual report.
    Verify(VerifyArgs),
    /// Tabulate the existence condition and solve every admissible cell.
    Scan(ScanArgs),
    /// Flux ladder, dissipation and identity gap of a verified spec.
    Energy(EnergyArgs),
    /// Sample one quantity of a spec on a grid.
    ExportField(ExportArgs),
}

#[derive(Debug, Args)]
pub struct ConstructArgs {
    /// case_i, case_ii, case_iii, landau, hedgehog or constant_director.
    #[arg(long)]
    pub family: String,
    /// Radial flux coefficient of case_i.
    #[arg(long, allow_negative_numbers = true)]
    pub c: Option<f64>,
    /// Winding of case_i and case_ii.
    #[arg(long, allow_negative_numbers = true)]
    pub m: Option<i64>,
    #[arg(long, allow_negative_numbers = true)]
    pub theta0: Option<f64>,
    /// Mean flux of case_ii.
    #[arg(long, allow_negative_numbers = true)]
    pub phi: Option<f64>,
    /// Number of profile periods of case_ii.
    #[arg(long)]
    pub k: Option<u32>,
    #[arg(long, allow_negative_numbers = true)]
    pub theta1: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub theta2: Option<f64>,
    /// Radial flux of case_iii.
    #[arg(long, allow_negative_numbers = true)]
    pub psi: Option<f64>,
    /// Swirl of case_iii.
    #[arg(long, allow_negative_numbers = true)]
    pub mu: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub theta3: Option<f64>,
    /// Landau parameter, a number above 1 or `inf`.
    #[arg(long)]
    pub a: Option<String>,
    /// Dimension of hedgehog and constant_director.
    #[arg(long)]
    pub n: Option<usize>,
    /// Comma-separated unit vector of constant_director.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub d0: Option<Vec<f64>>,
    /// Hedgehog perturbation; nonzero values give a non-solution.
    #[arg(long, allow_negative_numbers = true)]
    pub eps: Option<f64>,
    /// Pressure convention of the planar radial-flow families.
    #[arg(long, value_enum, default_value = "balanced")]
    pub pressure: Pressure,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    #[arg(long, default_value_t = 0.5)]
    pub rmin: f64,
    #[arg(long, default_value_t = 2.0)]
    pub rmax: f64,
    /// Number of spheres.
    #[arg(long, default_value_t = 5)]
    pub nr: usize,
    /// Azimuthal count; polar counts follow from it.
    #[arg(long)]
    pub na: Option<usize>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    pub spec_file: PathBuf,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long, value_enum, default_value = "analytic")]
    pub mode: Mode,
    /// Residual threshold; defaults to the family threshold.
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Comma-separated scale factors of the scaling check.
    #[arg(long, value_delimiter = ',')]
    pub lambdas: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub phi_min: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub phi_max: f64,
    #[arg(long)]
    pub phi_step: f64,
    #[arg(long, default_value_t = 1)]
    pub k_min: u32,
    #[arg(long)]
    pub k_max: u32,
}

#[derive(Debug, Args)]
pub struct EnergyArgs {
    pub spec_file: PathBuf,
    /// Comma-separated increasing radii.
    #[arg(long, value_delimiter = ',', default_value = "0.5,1,2,4")]
    pub radii: Vec<f64>,
    #[arg(long, value_enum, default_value = "analytic")]
    pub mode: Mode,
    /// Gauss nodes per polar angle of the sphere rule.
    #[arg(long)]
    pub sphere_resolution: Option<usize>,
    /// Largest residual sup accepted by the pre-verification.
    #[arg(long)]
    pub solution_tolerance: Option<f64>,
    /// Largest accepted relative identity gap.
    #[arg(long, default_value_t = selfsim_el::energy::IDENTITY_TOLERANCE)]
    pub identity_tolerance: f64,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    pub spec_file: PathBuf,
    #[arg(long, value_enum)]
    pub quantity: Quantity,
    /// Sample the single sphere of this radius instead of an annulus.
    #[arg(long, conflicts_with_all = ["rmin", "rmax", "nr"])]
    pub radius: Option<f64>,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long, value_enum, default_value = "analytic")]
    pub mode: Mode,
}
