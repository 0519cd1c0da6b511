use std::f64::consts::PI;

use super::*;
use crate::families::{
    make_case_i, make_case_iii, make_constant_director, make_hedgehog, make_landau, make_perturbed_hedgehog, LandauA,
};
use crate::field::{sphere_quadrature, DerivativeMode, Point, StencilConfig};

fn point(x: &[f64]) -> Point {
    Point::new(x).unwrap()
}

fn landau2() -> crate::SolutionSpec {
    make_landau(LandauA::Finite(2.0)).unwrap()
}

/// Closed form of `E(R)` for [`RotatedHedgehog`]: the shell integral is
/// `4πρ²(2/ρ² + (2/3) rate²)`, so `E(R) = 8π + (8π/9) rate² R²`.
fn rotated_energy(rate: f64, r: f64) -> f64 {
    8.0 * PI + 8.0 * PI / 9.0 * rate * rate * r * r
}

#[test]
fn head_pressure_examples() {
    let cfg = StencilConfig::default();
    let swirl = make_case_iii(0.0, 1.0, 0.0).unwrap();
    for x in [[1.0, 0.0], [0.3, -1.2]] {
        assert!(head_pressure(&swirl, &point(&x), &cfg).unwrap().abs() < 1e-15);
    }
    let rigid = make_constant_director(3, &[0.0, 0.0, 1.0]).unwrap();
    assert_eq!(head_pressure(&rigid, &point(&[0.2, 0.3, 0.4]), &cfg).unwrap(), 0.0);
    let hedgehog = make_hedgehog(4).unwrap();
    let h = head_pressure(&hedgehog, &point(&[0.0, 0.6, 0.0, 0.8]), &cfg).unwrap();
    assert!(h.abs() < 1e-14);
}

#[test]
fn flux_vanishes_without_velocity() {
    let cfg = StencilConfig::default();
    for spec in [make_hedgehog(3).unwrap(), make_constant_director(2, &[0.0, 1.0]).unwrap()] {
        let quad = sphere_quadrature(spec.dim(), 12).unwrap();
        for tau in [0.5, 1.0, 3.0] {
            assert_eq!(boundary_flux_h(&spec, tau, &quad, &cfg).unwrap(), 0.0);
        }
    }
}

#[test]
fn landau_flux_scales_inversely_with_radius() {
    let spec = landau2();
    let quad = sphere_quadrature(3, 24).unwrap();
    let cfg = StencilConfig::default();
    let base = boundary_flux_h(&spec, 1.0, &quad, &cfg).unwrap();
    assert!(base.abs() > 1e-3);
    for tau in [0.5, 2.0] {
        let scaled = tau * boundary_flux_h(&spec, tau, &quad, &cfg).unwrap();
        assert!((scaled - base).abs() < 1e-6 * base.abs(), "{scaled} vs {base}");
    }
}

#[test]
fn landau_energy_identity() {
    let spec = landau2();
    let opts = EnergyOptions::default();
    let report = energy_balance(&spec, &[0.5, 1.0, 2.0, 4.0], &opts).unwrap();
    assert!(report.passed, "{report:?}");
    assert!(report.h_nondecreasing);
    let d = dissipation(&spec, 0.5, 2.0, &opts).unwrap();
    let quad = sphere_quadrature(3, opts.sphere_resolution).unwrap();
    let gap = boundary_flux_h(&spec, 2.0, &quad, &opts.stencil).unwrap()
        - boundary_flux_h(&spec, 0.5, &quad, &opts.stencil).unwrap();
    assert!(d > 0.0);
    assert!((d - gap).abs() < 1e-4 * d, "{d} vs {gap}");
    assert!(report.relative_gap() < 1e-4);
}

#[test]
fn landau_flux_converges_under_refinement() {
    let spec = landau2();
    let opts = EnergyOptions::default();
    let fine = opts.refined();
    let q = sphere_quadrature(3, opts.sphere_resolution).unwrap();
    let qf = sphere_quadrature(3, fine.sphere_resolution).unwrap();
    let a = boundary_flux_h(&spec, 1.0, &q, &opts.stencil).unwrap();
    let b = boundary_flux_h(&spec, 1.0, &qf, &fine.stencil).unwrap();
    assert!((a - b).abs() < 1e-8, "{a} vs {b}");
}

#[test]
fn hedgehog_balance_is_trivial() {
    let spec = make_hedgehog(4).unwrap();
    let opts = EnergyOptions {
        sphere_resolution: 8,
        ..EnergyOptions::default()
    };
    let report = energy_balance(&spec, &[0.5, 2.0], &opts).unwrap();
    assert!(report.dissipation.abs() < 1e-8);
    assert!(report.h_gap.abs() < 1e-8);
    assert!(report.identity_gap.abs() < 1e-8);
    assert!(report.passed);
}

#[test]
fn non_solutions_are_refused() {
    let spec = make_perturbed_hedgehog(3, 0.3).unwrap();
    assert!(matches!(
        energy_balance(&spec, &[0.5, 2.0], &EnergyOptions::default()),
        Err(Error::NotASolution(_))
    ));
}

#[test]
fn pointwise_identity() {
    let fd = StencilConfig::forced_fd();
    let rigid = make_constant_director(3, &[1.0, 0.0, 0.0]).unwrap();
    assert_eq!(pointwise_energy_identity_residual(&rigid, &point(&[0.3, 0.2, 0.1]), &fd).unwrap(), 0.0);
    let spec = landau2();
    for x in [[1.0, 0.0, 0.0], [0.3, -0.5, 0.7], [-0.2, 0.1, -1.4]] {
        for cfg in [fd, StencilConfig::default()] {
            let r = pointwise_energy_identity_residual(&spec, &point(&x), &cfg).unwrap();
            assert!(r.abs() < 1e-5, "{x:?} {:?}: {r}", cfg.mode);
        }
    }
    let planar = make_case_i(1.0, 0, 0.0).unwrap();
    let r = pointwise_energy_identity_residual(&planar, &point(&[1.0, 0.0]), &fd).unwrap();
    assert!(r.abs() < 1e-5);
}

#[test]
fn pointwise_identity_detects_non_solutions() {
    let spec = crate::families::make_case_i_with(2.0, 0, 0.0, crate::families::PressureConvention::Stated).unwrap();
    let r = pointwise_energy_identity_residual(&spec, &point(&[1.0, 0.0]), &StencilConfig::default()).unwrap();
    assert!(r.abs() > 1e-2);
}

#[test]
fn hedgehog_energy_density() {
    let opts = HmOptions::default();
    let e4 = hm_energy_density(&make_hedgehog(4).unwrap(), 1.0, &opts).unwrap();
    assert!((e4 - 3.0 * PI * PI).abs() < 1e-6, "{e4}");
    for r in [0.3, 1.0, 7.0] {
        let e3 = hm_energy_density(&make_hedgehog(3).unwrap(), r, &opts).unwrap();
        assert!((e3 - 8.0 * PI).abs() < 1e-6, "{e3}");
    }
    let rigid = make_constant_director(3, &[0.0, 1.0, 0.0]).unwrap();
    assert_eq!(hm_energy_density(&rigid, 1.0, &opts).unwrap(), 0.0);
    assert!(matches!(
        hm_energy_density(&make_hedgehog(2).unwrap(), 1.0, &opts),
        Err(Error::DivergentEnergy(_))
    ));
}

#[test]
fn energy_density_in_fd_mode() {
    let opts = HmOptions {
        stencil: StencilConfig {
            mode: DerivativeMode::ForcedFd,
            ..StencilConfig::default()
        },
        ..HmOptions::default()
    };
    let e = hm_energy_density(&make_hedgehog(3).unwrap(), 1.0, &opts).unwrap();
    assert!((e - 8.0 * PI).abs() < 1e-6);
}

#[test]
fn homogeneous_ladders_are_flat() {
    let scan = hm_monotonicity_scan(&make_hedgehog(3).unwrap(), &[0.5, 1.0, 2.0, 4.0], &HmOptions::default()).unwrap();
    assert!(scan.nondecreasing);
    assert!(!scan.strictly_increasing);
    for (e, rhs) in scan.energy.iter().zip(&scan.rhs) {
        assert!((e - 8.0 * PI).abs() < 1e-6);
        assert!(rhs.abs() < 1e-12);
    }
    assert_eq!(scan.max_mismatch, 0.0);
    let rigid = make_constant_director(3, &[0.0, 1.0, 0.0]).unwrap();
    let scan = hm_monotonicity_scan(&rigid, &[0.5, 1.0], &HmOptions::default()).unwrap();
    assert!(scan.energy.iter().all(|e| *e == 0.0));
}

#[test]
fn rotated_hedgehog_matches_closed_form() {
    let map = RotatedHedgehog { rate: 0.1 };
    let radii = [0.5, 1.0, 2.0, 4.0];
    let scan = hm_monotonicity_scan(&map, &radii, &HmOptions::default()).unwrap();
    for (r, e) in radii.iter().zip(&scan.energy) {
        assert!((e - rotated_energy(0.1, *r)).abs() < 1e-8, "{r}: {e}");
    }
    assert!(scan.strictly_increasing);
    assert!(scan.max_general_mismatch < 1e-5, "{scan:?}");
    // The map is not stationary: the slope is one third of the
    // stationary right-hand side.
    for (s, rhs) in scan.slope.iter().zip(&scan.rhs) {
        assert!((3.0 * s - rhs).abs() < 1e-5 * rhs);
    }
}

#[test]
fn shifted_hedgehog_obeys_monotonicity() {
    let map = ShiftedHedgehog {
        dim: 3,
        center: [0.0, 0.0, 2.0, 0.0],
    };
    let scan = hm_monotonicity_scan(&map, &[0.25, 0.5, 0.75, 1.0], &HmOptions::default()).unwrap();
    assert!(scan.strictly_increasing, "{scan:?}");
    assert!(scan.max_mismatch < 1e-4, "{scan:?}");
    assert!(scan.max_general_mismatch < 1e-4);
}

#[test]
fn stationarity_identity() {
    let opts = HmOptions::default();
    let rigid = make_constant_director(3, &[0.0, 0.0, 1.0]).unwrap();
    for y in bump_battery(3, 0.5, 2.0).unwrap() {
        assert_eq!(stationarity_identity_check(&rigid, &y, &opts).unwrap(), 0.0);
    }
    let hedgehog = make_hedgehog(3).unwrap();
    for y in bump_battery(3, 0.5, 2.0).unwrap() {
        let v = stationarity_identity_check(&hedgehog, &y, &opts).unwrap();
        assert!(v < 1e-5, "{y:?}: {v}");
    }
    let perturbed = make_perturbed_hedgehog(3, 0.2).unwrap();
    let worst = bump_battery(3, 0.5, 2.0)
        .unwrap()
        .iter()
        .map(|y| stationarity_identity_check(&perturbed, y, &opts).unwrap())
        .fold(0.0, f64::max);
    assert!(worst > 1e-3, "{worst}");
}

#[test]
fn bump_jacobian_matches_differences() {
    for bump in bump_battery(3, 0.5, 2.0).unwrap() {
        let x = [0.7, -0.4, 0.5, 0.0];
        let (_, jac) = bump.value_and_jacobian(&x, 3);
        for j in 0..3 {
            let h = 1e-6;
            let mut xp = x;
            let mut xm = x;
            xp[j] += h;
            xm[j] -= h;
            let (yp, _) = bump.value_and_jacobian(&xp, 3);
            let (ym, _) = bump.value_and_jacobian(&xm, 3);
            for i in 0..3 {
                assert!(((yp[i] - ym[i]) / (2.0 * h) - jac[i][j]).abs() < 1e-7);
            }
        }
    }
}
