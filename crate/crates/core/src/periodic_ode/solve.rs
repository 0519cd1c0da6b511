use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::periodic_ode::orbit::{integrate_orbit, Orbit};
use crate::periodic_ode::profile::{ProfileSolution, SolveMethod};
use crate::periodic_ode::{boundary_tolerance, existence_lhs, existence_margin, ShootingConfig};

/// Relative amplitudes `ρ` (with `g0 = √E (1 + ρ)`) probed for the initial
/// guess; `ρ → 1` is the saddle connection.
const RHO_PROBES: [f64; 12] = [0.01, 0.03, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.97];
/// Further probes `ρ = 1 - 10^{-p}` for `p` in this range.
const SADDLE_DECADES: std::ops::RangeInclusive<i32> = 2..=15;
const NEAR_BOUNDARY: f64 = 1e-6;
/// Shooting residual at which a stalled Newton iterate is still handed to
/// the Fourier stage, whose collocation refinement and residual bound make
/// the final decision. Near the saddle connection the period is only
/// resolved to about `1e-8` relative.
const STALL_ACCEPT: f64 = 1e-6;

struct Targets {
    period: f64,
    mean: f64,
}

enum Prepared {
    Boundary(ProfileSolution),
    Inside(Targets),
}

fn prepare(phi: f64, k: u32, cfg: &ShootingConfig) -> Result<Prepared> {
    cfg.validate()?;
    if k == 0 {
        return Err(Error::InvalidParameter("k must be a positive integer".into()));
    }
    if !phi.is_finite() {
        return Err(Error::InvalidParameter(format!("Phi must be finite, got {phi}")));
    }
    let margin = existence_margin(phi, k);
    let tol = boundary_tolerance(phi, k);
    if margin < -tol {
        return Err(Error::NoExistence {
            lhs: existence_lhs(phi),
            k_sq: (k * k) as f64,
        });
    }
    if margin <= tol {
        return Ok(Prepared::Boundary(ProfileSolution::constant(phi / (2.0 * PI), k, phi)));
    }
    Ok(Prepared::Inside(Targets {
        period: 2.0 * PI / k as f64,
        mean: 2.0 + phi / (2.0 * PI),
    }))
}

/// Solve for the profile with minimal period `2π/k` and `∫f = Φ`.
///
/// Newton's method on `(E, g0)` with a central-difference Jacobian, started
/// from the scaling family through the relative amplitude that matches
/// `⟨g⟩T²`. If Newton fails the nested bisection of
/// [`solve_profile_bisection`] takes over. On the existence boundary the
/// constant profile is returned, flagged degenerate.
pub fn solve_profile(phi: f64, k: u32, cfg: &ShootingConfig) -> Result<ProfileSolution> {
    let targets = match prepare(phi, k, cfg)? {
        Prepared::Boundary(p) => return Ok(p),
        Prepared::Inside(t) => t,
    };
    let newton = initial_guess(&targets, cfg).and_then(|z| newton(z, &targets, cfg));
    match newton {
        Ok((orbit, iterations)) => {
            ProfileSolution::from_orbit(&orbit, phi, k, cfg, SolveMethod::Newton, iterations)
        }
        Err(newton_err) => match bisection(&targets, cfg) {
            Ok((orbit, iterations)) => {
                ProfileSolution::from_orbit(&orbit, phi, k, cfg, SolveMethod::Bisection, iterations)
            }
            Err(_) if existence_margin(phi, k) < NEAR_BOUNDARY * (k * k) as f64 => {
                Err(Error::DegenerateAtBoundary)
            }
            Err(_) => Err(newton_err),
        },
    }
}

/// Same problem solved by bisection on `g0` at fixed `E` (matching the
/// period) nested in a bisection on `E` (matching the mean).
pub fn solve_profile_bisection(phi: f64, k: u32, cfg: &ShootingConfig) -> Result<ProfileSolution> {
    let targets = match prepare(phi, k, cfg)? {
        Prepared::Boundary(p) => return Ok(p),
        Prepared::Inside(t) => t,
    };
    let (orbit, iterations) = bisection(&targets, cfg)?;
    ProfileSolution::from_orbit(&orbit, phi, k, cfg, SolveMethod::Bisection, iterations)
}

/// `(E, g0)` from the scaling family: the invariant `⟨g⟩T²` depends on the
/// relative amplitude `ρ` alone, so `ρ` is found at `E = 1` by a bracketed
/// secant search in `σ = -ln(1 - ρ)` and then rescaled to the target period.
fn initial_guess(t: &Targets, cfg: &ShootingConfig) -> Result<(f64, f64)> {
    let goal = t.mean * t.period * t.period;
    let probe = |sigma: f64| -> Result<(f64, f64)> {
        let rho = -(-sigma).exp_m1();
        let o = integrate_orbit(1.0, 1.0 + rho, cfg)?;
        Ok((o.mean * o.period * o.period - goal, o.period))
    };
    let sigmas = RHO_PROBES
        .iter()
        .map(|&rho: &f64| -(-rho).ln_1p())
        .chain(SADDLE_DECADES.map(|p| p as f64 * std::f64::consts::LN_10));
    // the invariant starts at 2π² > goal for ρ → 0
    let (mut a, mut fa) = (0.0, 2.0 * PI * PI - goal);
    let mut bracket = None;
    for sigma in sigmas {
        let (f, _) = probe(sigma)?;
        if f <= 0.0 {
            bracket = Some((sigma, f));
            break;
        }
        a = sigma;
        fa = f;
    }
    let (mut b, mut fb) = bracket
        .ok_or_else(|| Error::NewtonDivergence("target amplitude too close to the saddle connection".into()))?;
    let mut side = 0;
    for _ in 0..100 {
        if (b - a).abs() <= 1e-14 * b {
            break;
        }
        let c = (a * fb - b * fa) / (fb - fa);
        let c = if c > a && c < b { c } else { 0.5 * (a + b) };
        let (fc, _) = probe(c)?;
        if fc == 0.0 {
            a = c;
            b = c;
            break;
        }
        if fc > 0.0 {
            a = c;
            fa = fc;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        } else {
            b = c;
            fb = fc;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        }
    }
    let sigma = 0.5 * (a + b);
    let rho = -(-sigma).exp_m1();
    let (_, period) = probe(sigma)?;
    let e = (period / t.period).powi(4);
    Ok((e, e.sqrt() * (1.0 + rho)))
}

fn residual(o: &Orbit, t: &Targets) -> [f64; 2] {
    [(o.period - t.period) / t.period, (o.mean - t.mean) / t.mean.abs().max(1.0)]
}

fn norm(r: &[f64; 2]) -> f64 {
    r[0].abs().max(r[1].abs())
}

fn in_band(e: f64, g0: f64) -> bool {
    e > 0.0 && g0 > e.sqrt() && g0 < 2.0 * e.sqrt()
}

fn newton(start: (f64, f64), t: &Targets, cfg: &ShootingConfig) -> Result<(Orbit, usize)> {
    let (mut e, mut g0) = start;
    if !in_band(e, g0) {
        return Err(Error::NewtonDivergence(format!("initial guess (E = {e}, g0 = {g0}) off the band")));
    }
    let mut orbit = integrate_orbit(e, g0, cfg)?;
    let mut r = residual(&orbit, t);
    for it in 0..cfg.max_newton {
        if norm(&r) < cfg.newton_tol {
            return Ok((orbit, it));
        }
        let root = e.sqrt();
        let room = ((g0 - root).min(2.0 * root - g0)) / root;
        let de = 1e-6 * e * room.min(1.0);
        let dg = 1e-6 * root * room.min(1.0);
        let col = |pe: f64, pg: f64| -> Result<[f64; 2]> {
            let plus = residual(&integrate_orbit(e + pe, g0 + pg, cfg)?, t);
            let minus = residual(&integrate_orbit(e - pe, g0 - pg, cfg)?, t);
            let h = 2.0 * (pe + pg);
            Ok([(plus[0] - minus[0]) / h, (plus[1] - minus[1]) / h])
        };
        let je = col(de, 0.0)?;
        let jg = col(0.0, dg)?;
        let det = je[0] * jg[1] - jg[0] * je[1];
        if !det.is_finite() || det == 0.0 {
            return Err(Error::NewtonDivergence(format!("singular Jacobian at E = {e}, g0 = {g0}")));
        }
        let step_e = (r[0] * jg[1] - jg[0] * r[1]) / det;
        let step_g = (je[0] * r[1] - r[0] * je[1]) / det;

        let mut damping = 1.0;
        let mut accepted = None;
        for _ in 0..40 {
            let (ne, ng) = (e - damping * step_e, g0 - damping * step_g);
            if in_band(ne, ng) {
                if let Ok(o) = integrate_orbit(ne, ng, cfg) {
                    let nr = residual(&o, t);
                    if norm(&nr) < norm(&r) {
                        accepted = Some((ne, ng, o, nr));
                        break;
                    }
                }
            }
            damping *= 0.5;
        }
        match accepted {
            Some((ne, ng, o, nr)) => {
                let moved = ((ne - e) / e).abs().max(((ng - g0) / g0).abs());
                e = ne;
                g0 = ng;
                orbit = o;
                r = nr;
                // converged to the resolution of the orbit integrator
                if moved < 1e-15 && norm(&r) < 1e3 * cfg.newton_tol {
                    return Ok((orbit, it + 1));
                }
            }
            None if norm(&r) < STALL_ACCEPT => return Ok((orbit, it)),
            None => {
                return Err(Error::NewtonDivergence(format!(
                    "no descent from E = {e}, g0 = {g0} (residual {:e})",
                    norm(&r)
                )))
            }
        }
    }
    if norm(&r) < STALL_ACCEPT {
        return Ok((orbit, cfg.max_newton));
    }
    Err(Error::NewtonDivergence(format!(
        "residual {:e} after {} iterations",
        norm(&r),
        cfg.max_newton
    )))
}

/// `g0 = √E (1 + ρ)` with `T(E, g0) = target`, by bisection in `ρ`.
fn match_period(e: f64, target: f64, cfg: &ShootingConfig) -> Result<(Orbit, usize)> {
    let root = e.sqrt();
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    let mut best = None;
    let mut count = 0;
    while hi - lo > 1e-15 && count < 80 {
        let mid = 0.5 * (lo + hi);
        let o = integrate_orbit(e, root * (1.0 + mid), cfg)?;
        count += 1;
        if o.period < target {
            lo = mid;
        } else {
            hi = mid;
        }
        best = Some(o);
    }
    best.map(|o| (o, count)).ok_or_else(|| Error::SolverFailure("empty period bracket".into()))
}

fn bisection(t: &Targets, cfg: &ShootingConfig) -> Result<(Orbit, usize)> {
    // T_lin(E) < target exactly when E > k⁴/4
    let e_min = (2.0 * PI / t.period).powi(4) / 4.0;
    let mut evaluations = 0;
    let mut mean_at = |e: f64| -> Result<Orbit> {
        let (o, n) = match_period(e, t.period, cfg)?;
        evaluations += n;
        Ok(o)
    };
    let mut lo = e_min;
    let mut hi = 2.0 * e_min;
    let mut doublings = 0;
    while mean_at(hi)?.mean > t.mean {
        lo = hi;
        hi *= 2.0;
        doublings += 1;
        if doublings > 200 {
            return Err(Error::SolverFailure("no upper bracket for the energy level".into()));
        }
    }
    let mut last = None;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let o = mean_at(mid)?;
        if o.mean > t.mean {
            lo = mid;
        } else {
            hi = mid;
        }
        last = Some(o);
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    let orbit = last.ok_or_else(|| Error::SolverFailure("empty energy bracket".into()))?;
    Ok((orbit, evaluations))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boundary_returns_constant() {
        let p = solve_profile(0.0, 2, &ShootingConfig::default()).unwrap();
        assert!(p.degenerate);
        assert_eq!(p.method, SolveMethod::Constant);
        assert_eq!(p.mean(), 0.0);
        let p = solve_profile(5.0 * PI, 3, &ShootingConfig::default()).unwrap();
        assert!(p.degenerate);
        assert!((p.mean() - 2.5).abs() < 1e-15);
    }

    #[test]
    fn outside_region_rejected() {
        let err = solve_profile(0.0, 1, &ShootingConfig::default()).unwrap_err();
        assert!(matches!(err, Error::NoExistence { .. }));
        assert!(solve_profile(5.0 * PI + 0.1, 3, &ShootingConfig::default()).is_err());
    }

    #[test]
    fn newton_solves_zero_flux_k3() {
        let p = solve_profile(0.0, 3, &ShootingConfig::default()).unwrap();
        assert_eq!(p.method, SolveMethod::Newton);
        assert!(!p.degenerate);
        assert!(p.mean().abs() < 1e-10, "{}", p.mean());
        assert!(p.residual_sup < 1e-8, "{}", p.residual_sup);
        assert!(p.harmonic_magnitude(3) > 1e-10);
        assert!(p.off_lattice_magnitude() < 1e-12);
        assert!(p.amplitude > 0.1);
    }
}
