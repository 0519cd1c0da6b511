use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::periodic_ode::profile::compute_c1;
use crate::periodic_ode::{existence_condition, solve_profile, ShootingConfig};

pub const SCAN_CSV_HEADER: &str = "Phi,k,exists,solved,E,amplitude,residual_sup,C1_ode,C1_integral";

/// One `(Φ, k)` cell of an existence scan. Solver diagnostics are `NaN`
/// when no solve was attempted or the solve failed; `C₁` is reported for
/// winding `m = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    #[serde(rename = "Phi")]
    pub phi: f64,
    pub k: u32,
    pub exists: bool,
    /// `"true"`, `"false"` or `"degenerate"`.
    pub solved: String,
    #[serde(rename = "E")]
    pub energy_level: f64,
    pub amplitude: f64,
    pub residual_sup: f64,
    #[serde(rename = "C1_ode")]
    pub c1_ode: f64,
    #[serde(rename = "C1_integral")]
    pub c1_integral: f64,
    /// Solver error message for failed rows.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl ScanRow {
    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.phi,
            self.k,
            self.exists,
            self.solved,
            self.energy_level,
            self.amplitude,
            self.residual_sup,
            self.c1_ode,
            self.c1_integral
        )
    }
}

fn scan_cell(phi: f64, k: u32, cfg: &ShootingConfig) -> ScanRow {
    let exists = existence_condition(phi, k);
    let mut row = ScanRow {
        phi,
        k,
        exists,
        solved: "false".into(),
        energy_level: f64::NAN,
        amplitude: f64::NAN,
        residual_sup: f64::NAN,
        c1_ode: f64::NAN,
        c1_integral: f64::NAN,
        error: None,
    };
    if !exists {
        return row;
    }
    match solve_profile(phi, k, cfg) {
        Ok(p) => {
            let c1 = compute_c1(&p, 0);
            row.solved = if p.degenerate { "degenerate" } else { "true" }.into();
            row.energy_level = p.energy_level;
            row.amplitude = p.amplitude;
            row.residual_sup = p.residual_sup;
            row.c1_ode = c1.c1_ode;
            row.c1_integral = c1.c1_integral_direct;
        }
        Err(e) => row.error = Some(e.to_string()),
    }
    row
}

/// Evaluate the existence condition, and solve where it holds, on the grid
/// `Φ = Φ_min + i·Φ_step ≤ Φ_max`, `k = 1..=k_max`. Rows are ordered by
/// `Φ` then `k`; cells are solved in parallel.
pub fn scan_existence(
    phi_min: f64,
    phi_max: f64,
    phi_step: f64,
    k_max: u32,
    cfg: &ShootingConfig,
) -> Result<Vec<ScanRow>> {
    if !(phi_min.is_finite() && phi_max.is_finite() && phi_min <= phi_max) {
        return Err(Error::InvalidParameter(format!(
            "Phi range must be finite and ordered, got [{phi_min}, {phi_max}]"
        )));
    }
    if !(phi_step > 0.0 && phi_step.is_finite()) {
        return Err(Error::InvalidParameter(format!("Phi step must be positive, got {phi_step}")));
    }
    if k_max == 0 {
        return Err(Error::InvalidParameter("k_max must be at least 1".into()));
    }
    cfg.validate()?;
    let count = ((phi_max - phi_min) / phi_step * (1.0 + 1e-12)).floor() as usize + 1;
    let cells: Vec<(f64, u32)> = (0..count)
        .flat_map(|i| {
            let phi = phi_min + i as f64 * phi_step;
            (1..=k_max).map(move |k| (phi, k))
        })
        .collect();
    Ok(cells.par_iter().map(|&(phi, k)| scan_cell(phi, k, cfg)).collect())
}

pub fn write_scan_csv<W: Write>(rows: &[ScanRow], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{SCAN_CSV_HEADER}")?;
    for r in rows {
        writeln!(out, "{}", r.to_csv())?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn small_scan_rows() {
        let rows = scan_existence(0.0, 0.0, 1.0, 2, &ShootingConfig::default()).unwrap();
        assert_eq!(rows.len(), 2);
        assert!(!rows[0].exists);
        assert_eq!(rows[0].solved, "false");
        assert!(rows[0].energy_level.is_nan());
        assert!(rows[1].exists);
        assert_eq!(rows[1].solved, "degenerate");
    }

    #[test]
    fn boundary_matches_inequality() {
        let step = PI / 4.0;
        let rows = scan_existence(-4.0 * PI, 6.0 * PI, step, 3, &ShootingConfig::default()).unwrap();
        for k in 1..=3u32 {
            let boundary = ((k * k) as f64 - 4.0) * PI;
            for r in rows.iter().filter(|r| r.k == k) {
                if r.phi < boundary - step {
                    assert!(r.exists);
                }
                if r.phi > boundary + step {
                    assert!(!r.exists);
                }
            }
        }
    }

    #[test]
    fn csv_header_and_row_count() {
        let rows = scan_existence(0.0, 1.0, 0.5, 1, &ShootingConfig::default()).unwrap();
        let mut buf = Vec::new();
        write_scan_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], SCAN_CSV_HEADER);
        assert_eq!(lines.len(), 4);
        assert!(lines[1].starts_with("0,1,false,false,NaN"));
    }

    #[test]
    fn invalid_ranges() {
        let c = ShootingConfig::default();
        assert!(scan_existence(1.0, 0.0, 0.1, 1, &c).is_err());
        assert!(scan_existence(0.0, 1.0, 0.0, 1, &c).is_err());
        assert!(scan_existence(0.0, 1.0, 0.1, 0, &c).is_err());
    }
}
