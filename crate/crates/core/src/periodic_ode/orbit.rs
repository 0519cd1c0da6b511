//! Closed orbits of `g'' = E - g²`.
//!
//! With `g = f + 2` and `E = λ + 4` the profile equation
//! `f'' + f² + 4f = λ` becomes the planar Hamiltonian system
//! `g' = w`, `w' = E - g²` with energy `H = w²/2 + g³/3 - E g`. The centre
//! sits at `g = +√E`, the saddle at `g = -√E`, and every level
//! `H_c < H < H_s` is a closed orbit. Orbits are started at a turning point
//! (`w = 0`) and integrated with a sixth-order Yoshida composition of the
//! Störmer–Verlet scheme: explicit, symmetric and symplectic. The running
//! integral `Q = ∫ g` is carried along exactly within each drift so the
//! orbit mean comes out at the same order.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::periodic_ode::ShootingConfig;

// Yoshida (1990), solution A.
const YOSHIDA6: [f64; 7] = {
    let w1 = -1.177_679_984_178_87;
    let w2 = 0.235_573_213_359_357;
    let w3 = 0.784_513_610_477_560;
    let w0 = 1.0 - 2.0 * (w1 + w2 + w3);
    [w3, w2, w1, w0, w1, w2, w3]
};

const MAX_STEPS: usize = 20_000_000;
const DRIFT_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitState {
    pub g: f64,
    pub w: f64,
    /// `∫₀ᵗ g`.
    pub q: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitSample {
    pub t: f64,
    pub g: f64,
    pub w: f64,
}

#[derive(Debug, Clone)]
pub struct Orbit {
    pub energy_level: f64,
    pub g0: f64,
    pub period: f64,
    pub mean: f64,
    /// Time of the opposite turning point.
    pub half_period: f64,
    pub samples: Vec<OrbitSample>,
    /// Largest `|H - H₀|` along the orbit relative to `E^{3/2}`.
    pub energy_drift: f64,
    /// `g0 = √E`: the equilibrium, reported with its linearised period.
    pub degenerate: bool,
}

pub fn hamiltonian(e: f64, g: f64, w: f64) -> f64 {
    0.5 * w * w + g * g * g / 3.0 - e * g
}

/// Period of small oscillations about the centre, `2π / (4E)^{1/4}`.
pub fn linear_period(e: f64) -> f64 {
    2.0 * PI / (4.0 * e).powf(0.25)
}

#[inline]
fn drift(s: &mut OrbitState, tau: f64) {
    s.q += tau * s.g + 0.5 * tau * tau * s.w;
    s.g += tau * s.w;
}

#[inline]
fn kick(s: &mut OrbitState, e: f64, tau: f64) {
    s.w += tau * (e - s.g * s.g);
}

/// One step of length `h`.
pub fn step(s: OrbitState, e: f64, h: f64) -> OrbitState {
    let mut s = s;
    for c in YOSHIDA6 {
        let tau = c * h;
        drift(&mut s, 0.5 * tau);
        kick(&mut s, e, tau);
        drift(&mut s, 0.5 * tau);
    }
    s
}

/// Check that `(E, g0)` starts a closed orbit.
pub fn check_band(e: f64, g0: f64) -> Result<()> {
    if !(e > 0.0 && e.is_finite()) {
        return Err(Error::NonPeriodicOrbit(format!("E = {e} must be positive")));
    }
    let s = e.sqrt();
    if !(g0 > -s && g0 < 2.0 * s) {
        return Err(Error::NonPeriodicOrbit(format!(
            "turning point g0 = {g0} outside ({}, {}) for E = {e}",
            -s,
            2.0 * s
        )));
    }
    Ok(())
}

/// The other turning point on the level of `(g0, w = 0)`.
pub fn opposite_turning_point(e: f64, g0: f64) -> f64 {
    let s = e.sqrt();
    if g0 == s {
        return s;
    }
    let h0 = hamiltonian(e, g0, 0.0);
    let pot = |g: f64| g * g * g / 3.0 - e * g - h0;
    // the opposite root lies on the other side of the centre, inside the band
    let (mut lo, mut hi) = if g0 > s { (-s, s) } else { (s, 2.0 * s) };
    let f_lo = pot(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (pot(mid) > 0.0) == (f_lo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 4.0 * f64::EPSILON * s.max(1.0) {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Integrate one full orbit from the turning point `g0`.
///
/// The period is the first return to `w = 0` with the same sign of `g''`
/// as at the start, located inside the last step by bracketing on the
/// step length.
pub fn integrate_orbit(e: f64, g0: f64, cfg: &ShootingConfig) -> Result<Orbit> {
    check_band(e, g0)?;
    let h = cfg.rk_step;
    if !(h > 0.0) {
        return Err(Error::InvalidParameter(format!("rk_step must be positive, got {h}")));
    }
    let centre = e.sqrt();
    if g0 == centre {
        let t = linear_period(e);
        return Ok(Orbit {
            energy_level: e,
            g0,
            period: t,
            mean: centre,
            half_period: 0.5 * t,
            samples: vec![OrbitSample { t: 0.0, g: g0, w: 0.0 }, OrbitSample { t, g: g0, w: 0.0 }],
            energy_drift: 0.0,
            degenerate: true,
        });
    }

    let h0 = hamiltonian(e, g0, 0.0);
    let scale = e.powf(1.5);
    let start_sign = (e - g0 * g0).signum();
    let mut state = OrbitState { g: g0, w: 0.0, q: 0.0 };
    let mut t = 0.0;
    let mut samples = vec![OrbitSample { t, g: g0, w: 0.0 }];
    let mut drift_max: f64 = 0.0;
    let mut half_period = None;

    for _ in 0..MAX_STEPS {
        let next = step(state, e, h);
        let prev_sign = state.w.signum();
        let next_sign = next.w.signum();
        let crossed = state.w != 0.0 && (next_sign != prev_sign || next.w == 0.0);
        if crossed {
            let tau = locate_zero(state, e, h);
            let at = step(state, e, tau);
            if prev_sign == -start_sign {
                // back at the starting turning point
                let period = t + tau;
                drift_max = drift_max.max((hamiltonian(e, at.g, at.w) - h0).abs() / scale);
                if drift_max > DRIFT_TOLERANCE {
                    return Err(Error::StepTooCoarse(drift_max));
                }
                samples.push(OrbitSample { t: period, g: at.g, w: 0.0 });
                return Ok(Orbit {
                    energy_level: e,
                    g0,
                    period,
                    mean: at.q / period,
                    half_period: half_period.unwrap_or(0.5 * period),
                    samples,
                    energy_drift: drift_max,
                    degenerate: false,
                });
            } else if half_period.is_none() {
                half_period = Some(t + tau);
            }
        }
        state = next;
        t += h;
        drift_max = drift_max.max((hamiltonian(e, state.g, state.w) - h0).abs() / scale);
        samples.push(OrbitSample { t, g: state.g, w: state.w });
    }
    Err(Error::NonPeriodicOrbit(format!(
        "no return to the starting turning point within {MAX_STEPS} steps (E = {e}, g0 = {g0})"
    )))
}

/// Step length `τ ∈ (0, h]` at which `w` vanishes, by safeguarded secant
/// (Illinois) iteration on the integrator itself.
fn locate_zero(state: OrbitState, e: f64, h: f64) -> f64 {
    let (mut a, mut fa) = (0.0, state.w);
    let (mut b, mut fb) = (h, step(state, e, h).w);
    if fb == 0.0 {
        return h;
    }
    let mut side = 0;
    for _ in 0..200 {
        let c = (a * fb - b * fa) / (fb - fa);
        let c = if c > a && c < b { c } else { 0.5 * (a + b) };
        let fc = step(state, e, c).w;
        if fc == 0.0 {
            return c;
        }
        if (fc > 0.0) == (fb > 0.0) {
            b = c;
            fb = fc;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        } else {
            a = c;
            fa = fc;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        }
        if (b - a) <= 1e-16 * h.max(b) {
            break;
        }
    }
    if fa.abs() < fb.abs() {
        a
    } else {
        b
    }
}

/// `count` equispaced samples `g(j·T/count)`, `j = 0..count`, integrated
/// with a step no longer than `cfg.rk_step` that divides the spacing.
pub fn sample_uniform(e: f64, g0: f64, period: f64, count: usize, cfg: &ShootingConfig) -> Vec<f64> {
    let spacing = period / count as f64;
    let sub = (spacing / cfg.rk_step).ceil().max(1.0) as usize;
    let h = spacing / sub as f64;
    let mut state = OrbitState { g: g0, w: 0.0, q: 0.0 };
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        out.push(state.g);
        for _ in 0..sub {
            state = step(state, e, h);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> ShootingConfig {
        ShootingConfig::default()
    }

    #[test]
    fn equilibrium_reports_linear_period() {
        let e: f64 = 81.0 / 4.0;
        let o = integrate_orbit(e, e.sqrt(), &cfg()).unwrap();
        assert!(o.degenerate);
        assert!((o.period - 2.0 * PI / 3.0).abs() < 1e-15);
        assert_eq!(o.mean, 4.5);
    }

    #[test]
    fn near_centre_frequency() {
        let e: f64 = 81.0 / 4.0;
        let o = integrate_orbit(e, e.sqrt() + 0.01, &cfg()).unwrap();
        assert!((o.period - 2.0 * PI / 3.0).abs() < 1e-4, "{}", o.period);
    }

    #[test]
    fn energy_is_conserved() {
        let e: f64 = 3.0;
        let g0 = 1.9 * e.sqrt();
        let o = integrate_orbit(e, g0, &cfg()).unwrap();
        let h0 = hamiltonian(e, g0, 0.0);
        for s in &o.samples {
            let rel = (hamiltonian(e, s.g, s.w) - h0).abs() / h0.abs();
            assert!(rel < 1e-10, "{rel}");
        }
    }

    #[test]
    fn start_from_either_turning_point() {
        let e = 2.0;
        let top = integrate_orbit(e, 2.2, &cfg()).unwrap();
        let bottom = opposite_turning_point(e, 2.2);
        let other = integrate_orbit(e, bottom, &cfg()).unwrap();
        assert!((top.period - other.period).abs() < 1e-10);
        assert!((top.mean - other.mean).abs() < 1e-10);
        assert!((top.half_period - 0.5 * top.period).abs() < 1e-10);
    }

    #[test]
    fn outside_band_rejected() {
        assert!(matches!(integrate_orbit(-1.0, 0.0, &cfg()), Err(Error::NonPeriodicOrbit(_))));
        assert!(matches!(integrate_orbit(1.0, 2.0, &cfg()), Err(Error::NonPeriodicOrbit(_))));
        assert!(matches!(integrate_orbit(1.0, -1.0, &cfg()), Err(Error::NonPeriodicOrbit(_))));
    }

    #[test]
    fn coarse_step_detected() {
        let coarse = ShootingConfig { rk_step: 0.5, ..cfg() };
        assert!(matches!(integrate_orbit(4.0, 3.9, &coarse), Err(Error::StepTooCoarse(_))));
    }

    #[test]
    fn mean_of_g_squared_equals_energy_level() {
        // averaging g'' = E - g² over a period gives <g²> = E
        let e: f64 = 5.0;
        let o = integrate_orbit(e, 1.6 * e.sqrt(), &cfg()).unwrap();
        let n = 2048;
        let g = sample_uniform(e, o.g0, o.period, n, &cfg());
        let m2: f64 = g.iter().map(|x| x * x).sum::<f64>() / n as f64;
        assert!((m2 - e).abs() < 1e-10 * e, "{m2}");
        let m1: f64 = g.iter().sum::<f64>() / n as f64;
        assert!((m1 - o.mean).abs() < 1e-11);
    }
}
