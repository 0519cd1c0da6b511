use std::f64::consts::PI;

use proptest::prelude::*;
use selfsim_el::energy::{dissipation, energy_balance, hm_energy_density, EnergyOptions, HmOptions};
use selfsim_el::families::{make_case_i, make_case_iii, make_constant_director, make_hedgehog, make_landau, LandauA};
use selfsim_el::field::{DerivativeMode, GridSpec, Point, StencilConfig};
use selfsim_el::periodic_ode::existence_condition;
use selfsim_el::residual::{local_jet, scaling_check, unit_length_check, verify, VerifyOptions};
use selfsim_el::SolutionSpec;

fn case_i_strategy() -> impl Strategy<Value = SolutionSpec> {
    (-5.0f64..5.0, -4i64..5, 0.0f64..2.0 * PI).prop_map(|(c, m, t)| make_case_i(c, m, t).unwrap())
}

fn case_iii_strategy() -> impl Strategy<Value = SolutionSpec> {
    (-10.0f64..10.0, prop_oneof![-5.0f64..-0.1, 0.1f64..5.0], 0.0f64..2.0 * PI)
        .prop_map(|(psi, mu, t)| make_case_iii(psi, mu, t).unwrap())
}

fn unit_vector(n: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(-1.0f64..1.0, n)
        .prop_filter("nonzero", |v| v.iter().map(|x| x * x).sum::<f64>() > 0.01)
        .prop_map(|v| {
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            v.iter().map(|x| x / norm).collect()
        })
}

fn coarse_grid(dim: usize) -> GridSpec {
    let angular = match dim {
        2 => vec![16],
        3 => vec![6, 12],
        _ => vec![4, 4, 8],
    };
    GridSpec::new(0.5, 2.0, 3, angular).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 32, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn planar_families_are_self_similar(spec in prop_oneof![case_i_strategy(), case_iii_strategy()], lambda in 0.1f64..10.0) {
        let dev = scaling_check(&spec, &[lambda], &coarse_grid(2)).unwrap().sup;
        prop_assert!(dev < 1e-10, "{dev}");
    }

    #[test]
    fn directors_are_unit(spec in prop_oneof![case_i_strategy(), case_iii_strategy()]) {
        prop_assert!(unit_length_check(&spec, &coarse_grid(2)).unwrap().sup < 1e-12);
    }

    #[test]
    fn constant_directors_verify(d0 in (2usize..5).prop_flat_map(unit_vector)) {
        let spec = make_constant_director(d0.len(), &d0).unwrap();
        let mut opts = VerifyOptions::for_dim(d0.len(), DerivativeMode::ForcedFd).unwrap();
        opts.grid = coarse_grid(d0.len());
        let report = verify(&spec, &opts).unwrap();
        prop_assert!(report.passed);
        prop_assert!(report.smallness.m_u == 0.0 && report.smallness.m_d == 0.0);
    }

    #[test]
    fn planar_energy_identity(spec in case_iii_strategy(), r in 0.3f64..1.0, ratio in 1.5f64..4.0) {
        let opts = EnergyOptions { sphere_resolution: 16, ..EnergyOptions::default() };
        let report = energy_balance(&spec, &[r, r * ratio], &opts).unwrap();
        prop_assert!(report.dissipation >= -1e-10);
        prop_assert!(report.identity_gap.abs() <= (1e-4 * report.dissipation.abs()).max(1e-8), "{report:?}");
        prop_assert!(report.h_nondecreasing);
    }

    #[test]
    fn gradient_norm_decays_like_inverse_radius(spec in case_i_strategy(), x in (0.2f64..3.0, 0.0f64..2.0 * PI)) {
        let (r, theta) = x;
        let cfg = StencilConfig::default();
        let near = Point::new(&[r * theta.cos(), r * theta.sin()]).unwrap();
        let far = near.scaled(2.0);
        let g1 = local_jet(&spec, &near, &cfg).unwrap().grad_d_sq().sqrt();
        let g2 = local_jet(&spec, &far, &cfg).unwrap().grad_d_sq().sqrt();
        prop_assert!((g1 - 2.0 * g2).abs() < 1e-12 * g1.max(1.0));
    }

    #[test]
    fn existence_is_monotone_in_k(phi in -40.0f64..40.0, k in 1u32..6) {
        if existence_condition(phi, k) {
            prop_assert!(existence_condition(phi, k + 1));
        }
        prop_assert_eq!(existence_condition(phi, k), (k * k) as f64 - 4.0 - phi / PI >= -1e-12);
    }

    #[test]
    fn spec_documents_round_trip(spec in prop_oneof![case_i_strategy(), case_iii_strategy()]) {
        let text = spec.to_json_string();
        let back = SolutionSpec::from_json_str(&text).unwrap();
        prop_assert_eq!(back.to_json_string(), text);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 8, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn hedgehog_energy_density_is_radius_independent(n in 3usize..5, r in 0.1f64..10.0) {
        let spec = make_hedgehog(n).unwrap();
        let opts = HmOptions::default();
        let base = hm_energy_density(&spec, 1.0, &opts).unwrap();
        let e = hm_energy_density(&spec, r, &opts).unwrap();
        prop_assert!((e - base).abs() < 1e-8 * base, "{e} vs {base}");
    }

    #[test]
    fn landau_dissipation_scales_inversely(a in 1.5f64..50.0, r in 0.5f64..1.5) {
        let spec = make_landau(LandauA::Finite(a)).unwrap();
        let opts = EnergyOptions { sphere_resolution: 16, ..EnergyOptions::default() };
        let d1 = dissipation(&spec, r, 2.0 * r, &opts).unwrap();
        let d2 = dissipation(&spec, 2.0 * r, 4.0 * r, &opts).unwrap();
        prop_assert!(d1 > 0.0);
        prop_assert!((d1 - 2.0 * d2).abs() < 1e-8 * d1, "{d1} {d2}");
    }
}
