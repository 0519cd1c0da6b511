use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;
use selfsim_el::energy::{energy_balance, head_pressure, EnergyOptions, EnergyReport, IDENTITY_FLOOR};
use selfsim_el::families::{
    make_case_i_with, make_case_ii_with, make_case_iii, make_constant_director, make_landau, make_perturbed_hedgehog,
    FamilyTag, LandauA, PressureConvention,
};
use selfsim_el::field::{annulus_grid, default_angular, sphere_grid, DerivativeMode, GridSpec, Point, StencilConfig};
use selfsim_el::periodic_ode::{compute_c1, scan_existence, write_scan_csv, ShootingConfig};
use selfsim_el::residual::{local_jet, verify, ResidualReport, VerifyOptions};
use selfsim_el::{Error, SmoothField, SolutionSpec};

use crate::args::{ConstructArgs, EnergyArgs, ExportArgs, Format, GridArgs, Mode, Pressure, Quantity, ScanArgs, VerifyArgs};
use crate::output::{csv_row, json_text, sig17};

pub const EXIT_VERIFICATION: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_SOLVER: u8 = 3;
pub const EXIT_PRECONDITION: u8 = 4;

/// An error together with the exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub error: anyhow::Error,
}

impl Failure {
    pub fn usage(msg: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            error: anyhow::anyhow!(msg.into()),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NoExistence { .. }
            | Error::NonPeriodicOrbit(_)
            | Error::StepTooCoarse(_)
            | Error::NewtonDivergence(_)
            | Error::DegenerateAtBoundary
            | Error::SolverFailure(_) => EXIT_SOLVER,
            Error::NotASolution(_) => EXIT_PRECONDITION,
            _ => EXIT_USAGE,
        };
        Self {
            code,
            error: e.into(),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(error: anyhow::Error) -> Self {
        Self { code: EXIT_USAGE, error }
    }
}

/// Rendered output and whether the command counts as a pass.
pub struct Outcome {
    pub text: String,
    pub passed: bool,
}

impl Outcome {
    fn pass(text: String) -> Self {
        Self { text, passed: true }
    }
}

type CmdResult = Result<Outcome, Failure>;

fn derivative_mode(mode: Mode) -> DerivativeMode {
    match mode {
        Mode::Analytic => DerivativeMode::AnalyticPreferred,
        Mode::Fd => DerivativeMode::ForcedFd,
    }
}

fn stencil(mode: Mode) -> StencilConfig {
    StencilConfig {
        mode: derivative_mode(mode),
        ..StencilConfig::default()
    }
}

fn load_spec(path: &Path) -> Result<SolutionSpec, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
    Ok(SolutionSpec::from_json_str(&text)?)
}

fn grid_spec(grid: &GridArgs, dim: usize) -> Result<GridSpec, Failure> {
    Ok(GridSpec::new(grid.rmin, grid.rmax, grid.nr, default_angular(dim, grid.na)?)?)
}

/// The flags each family accepts.
fn allowed_flags(family: FamilyTag) -> &'static [&'static str] {
    match family {
        FamilyTag::CaseI => &["c", "m", "theta0"],
        FamilyTag::CaseIi => &["phi", "k", "m", "theta1", "theta2"],
        FamilyTag::CaseIii => &["psi", "mu", "theta3"],
        FamilyTag::Landau => &["a"],
        FamilyTag::Hedgehog => &["n", "eps"],
        FamilyTag::ConstantDirector => &["n", "d0"],
        FamilyTag::CustomProfile => &[],
    }
}

fn given_flags(a: &ConstructArgs) -> Vec<&'static str> {
    let present = [
        ("c", a.c.is_some()),
        ("m", a.m.is_some()),
        ("theta0", a.theta0.is_some()),
        ("phi", a.phi.is_some()),
        ("k", a.k.is_some()),
        ("theta1", a.theta1.is_some()),
        ("theta2", a.theta2.is_some()),
        ("psi", a.psi.is_some()),
        ("mu", a.mu.is_some()),
        ("theta3", a.theta3.is_some()),
        ("a", a.a.is_some()),
        ("n", a.n.is_some()),
        ("d0", a.d0.is_some()),
        ("eps", a.eps.is_some()),
    ];
    present.into_iter().filter(|(_, p)| *p).map(|(n, _)| n).collect()
}

fn required<T: Clone>(value: &Option<T>, flag: &str, family: FamilyTag) -> Result<T, Failure> {
    value
        .clone()
        .ok_or_else(|| Failure::usage(format!("family {family} needs --{flag}")))
}

fn build_spec(a: &ConstructArgs) -> Result<SolutionSpec, Failure> {
    let family: FamilyTag = a.family.parse()?;
    let allowed = allowed_flags(family);
    if let Some(extra) = given_flags(a).into_iter().find(|f| !allowed.contains(f)) {
        return Err(Failure::usage(format!("--{extra} does not apply to family {family}")));
    }
    if a.pressure == Pressure::Stated && !matches!(family, FamilyTag::CaseI | FamilyTag::CaseIi) {
        return Err(Failure::usage(format!("--pressure does not apply to family {family}")));
    }
    let pressure = match a.pressure {
        Pressure::Balanced => PressureConvention::Balanced,
        Pressure::Stated => PressureConvention::Stated,
    };
    let spec = match family {
        FamilyTag::CaseI => make_case_i_with(
            required(&a.c, "c", family)?,
            required(&a.m, "m", family)?,
            a.theta0.unwrap_or(0.0),
            pressure,
        )?,
        FamilyTag::CaseIi => make_case_ii_with(
            required(&a.phi, "phi", family)?,
            required(&a.k, "k", family)?,
            a.m.unwrap_or(0),
            a.theta1.unwrap_or(0.0),
            a.theta2.unwrap_or(0.0),
            pressure,
            &ShootingConfig::default(),
        )?,
        FamilyTag::CaseIii => make_case_iii(
            required(&a.psi, "psi", family)?,
            required(&a.mu, "mu", family)?,
            a.theta3.unwrap_or(0.0),
        )?,
        FamilyTag::Landau => make_landau(required(&a.a, "a", family)?.parse::<LandauA>()?)?,
        FamilyTag::Hedgehog => make_perturbed_hedgehog(required(&a.n, "n", family)?, a.eps.unwrap_or(0.0))?,
        FamilyTag::ConstantDirector => {
            let d0 = required(&a.d0, "d0", family)?;
            make_constant_director(a.n.unwrap_or(d0.len()), &d0)?
        }
        FamilyTag::CustomProfile => {
            return Err(Failure::usage(
                "custom_profile specs are built from a profile file, not from flags",
            ))
        }
    };
    Ok(spec)
}

pub fn construct(a: &ConstructArgs, format: Option<Format>) -> CmdResult {
    if format == Some(Format::Csv) {
        return Err(Failure::usage("construct writes JSON only"));
    }
    let spec = build_spec(a)?;
    if let Some(profile) = spec.profile() {
        let report = compute_c1(profile, a.m.unwrap_or(0));
        eprintln!("C1 report: {}", serde_json::to_string(&report).map_err(anyhow::Error::from)?);
    }
    let mut text = spec.to_json_string();
    text.push('\n');
    Ok(Outcome::pass(text))
}

fn verify_csv(report: &ResidualReport) -> String {
    let mut out = String::from("equation,sup,rms,mode,threshold,passed\n");
    for r in &report.reports {
        let passed = r.sup < report.threshold;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.equation,
            sig17(r.sup),
            sig17(r.rms),
            r.mode,
            sig17(report.threshold),
            passed
        );
    }
    out
}

pub fn verify_cmd(a: &VerifyArgs, format: Option<Format>) -> CmdResult {
    let spec = load_spec(&a.spec_file)?;
    let mode = derivative_mode(a.mode);
    let mut opts = VerifyOptions::for_spec(&spec, mode)?;
    opts.grid = grid_spec(&a.grid, spec.dim())?;
    if let Some(t) = a.threshold {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Failure::usage(format!("threshold must be positive, got {t}")));
        }
        opts.threshold = t;
    }
    if let Some(l) = &a.lambdas {
        opts.lambdas = l.clone();
    }
    let report = verify(&spec, &opts)?;
    let text = match format.unwrap_or(Format::Json) {
        Format::Json => json_text(&report)?,
        Format::Csv => verify_csv(&report),
    };
    Ok(Outcome {
        text,
        passed: report.passed,
    })
}

pub fn scan(a: &ScanArgs, format: Option<Format>) -> CmdResult {
    if a.k_min == 0 || a.k_min > a.k_max {
        return Err(Failure::usage(format!(
            "need 1 <= k_min <= k_max, got k_min = {}, k_max = {}",
            a.k_min, a.k_max
        )));
    }
    let mut rows = scan_existence(a.phi_min, a.phi_max, a.phi_step, a.k_max, &ShootingConfig::default())?;
    rows.retain(|r| r.k >= a.k_min);
    let text = match format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut buf = Vec::new();
            write_scan_csv(&rows, &mut buf).map_err(anyhow::Error::from)?;
            String::from_utf8(buf).map_err(anyhow::Error::from)?
        }
        Format::Json => json_text(&rows)?,
    };
    Ok(Outcome::pass(text))
}

fn energy_csv(report: &EnergyReport) -> String {
    let mut out = String::from("tau,h,dissipation_to_next\n");
    for (i, (tau, h)) in report.radii.iter().zip(&report.h).enumerate() {
        let next = report.interval_dissipation.get(i).copied().unwrap_or(f64::NAN);
        let _ = writeln!(out, "{}", csv_row(&[*tau, *h, next]));
    }
    out
}

pub fn energy(a: &EnergyArgs, format: Option<Format>) -> CmdResult {
    let spec = load_spec(&a.spec_file)?;
    if a.identity_tolerance.is_nan() || a.identity_tolerance <= 0.0 {
        return Err(Failure::usage("identity tolerance must be positive"));
    }
    let mut opts = EnergyOptions {
        stencil: stencil(a.mode),
        ..EnergyOptions::default()
    };
    if let Some(r) = a.sphere_resolution {
        opts.sphere_resolution = r;
    }
    if let Some(t) = a.solution_tolerance {
        opts.solution_tolerance = t;
    }
    let mut report = energy_balance(&spec, &a.radii, &opts)?;
    report.passed = report.h_nondecreasing
        && report.identity_gap.abs() <= (a.identity_tolerance * report.dissipation.abs()).max(IDENTITY_FLOOR);
    let text = match format.unwrap_or(Format::Json) {
        Format::Json => json_text(&report)?,
        Format::Csv => energy_csv(&report),
    };
    Ok(Outcome {
        text,
        passed: report.passed,
    })
}

#[derive(Serialize)]
struct ExportRow {
    x: Vec<f64>,
    value: Vec<f64>,
}

fn sample(spec: &SolutionSpec, x: &Point, quantity: Quantity, cfg: &StencilConfig) -> Result<Vec<f64>, Error> {
    let n = spec.dim();
    Ok(match quantity {
        Quantity::U => spec.evaluate::<f64>(&x.coords).u[..n].to_vec(),
        Quantity::D => spec.evaluate::<f64>(&x.coords).d[..n].to_vec(),
        Quantity::P => vec![spec.evaluate::<f64>(&x.coords).p],
        Quantity::GradDNorm => vec![local_jet(spec, x, cfg)?.grad_d_sq().sqrt()],
        Quantity::HeadPressure => vec![head_pressure(spec, x, cfg)?],
    })
}

pub fn export_field(a: &ExportArgs, format: Option<Format>) -> CmdResult {
    let spec = load_spec(&a.spec_file)?;
    let n = spec.dim();
    let points = match a.radius {
        Some(r) => sphere_grid(r, n, &default_angular(n, a.grid.na)?)?,
        None => annulus_grid(&grid_spec(&a.grid, n)?, n)?,
    };
    let cfg = stencil(a.mode);
    let values = points
        .par_iter()
        .map(|x| sample(&spec, x, a.quantity, &cfg))
        .collect::<Result<Vec<_>, Error>>()?;
    let text = match format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let width = values.first().map_or(1, Vec::len);
            let mut header: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
            if width == 1 {
                header.push("value".into());
            } else {
                header.extend((1..=width).map(|i| format!("value{i}")));
            }
            let mut out = header.join(",");
            out.push('\n');
            for (x, v) in points.iter().zip(&values) {
                let mut row = x.as_slice().to_vec();
                row.extend_from_slice(v);
                out.push_str(&csv_row(&row));
                out.push('\n');
            }
            out
        }
        Format::Json => {
            let rows: Vec<ExportRow> = points
                .iter()
                .zip(values)
                .map(|(x, value)| ExportRow {
                    x: x.as_slice().to_vec(),
                    value,
                })
                .collect();
            json_text(&rows)?
        }
    };
    Ok(Outcome::pass(text))
}
