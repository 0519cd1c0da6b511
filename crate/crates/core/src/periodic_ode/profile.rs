use std::f64::consts::PI;

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::pairwise_sum;
use crate::periodic_ode::orbit::{opposite_turning_point, sample_uniform, Orbit};
use crate::periodic_ode::ShootingConfig;

/// Share of the spectral energy allowed in the top quarter of the modes.
pub const TAIL_TOLERANCE: f64 = 1e-10;
/// Bound on `sup |f'' + f² + 4f - λ|` for an accepted profile.
pub const RESIDUAL_TOLERANCE: f64 = 1e-8;
const MAX_TRUNCATION: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveMethod {
    Newton,
    Bisection,
    /// The constant solution on the existence boundary.
    Constant,
    /// Coefficients provided by the caller.
    Supplied,
}

/// A `2π`-periodic solution of `f'' + f² + 4f = λ` stored as the real
/// Fourier series `f(θ) = a₀ + Σ_{j≥1} a_j cos jθ + b_j sin jθ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileSolution {
    /// `a₀, a₁, …, a_N`.
    pub fourier_cos: Vec<f64>,
    /// `b₀ = 0, b₁, …, b_N`.
    pub fourier_sin: Vec<f64>,
    pub lambda: f64,
    #[serde(rename = "Phi")]
    pub phi: f64,
    pub k: u32,
    /// `(max f - min f) / 2`.
    pub amplitude: f64,
    pub residual_sup: f64,
    /// Spectral energy share of the harmonics above `3N/4`.
    pub tail_fraction: f64,
    /// `E = λ + 4`.
    pub energy_level: f64,
    /// Turning point `g0 = f(0) + 2` of the generating orbit.
    pub turning_point: f64,
    pub degenerate: bool,
    pub method: SolveMethod,
    pub iterations: usize,
    /// Whether the series was refined by Fourier collocation after
    /// shooting.
    pub polished: bool,
    /// Largest sine coefficient of the sampled orbit started at its
    /// maximum; zero up to roundoff for an even profile.
    pub symmetry_defect: f64,
}

/// The three values of the pressure constant `C₁` for winding `m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct C1Report {
    pub m: i64,
    /// `((m+1)² - λ) / 2`.
    pub c1_ode: f64,
    /// From the numerically integrated equation over one period.
    pub c1_integral_direct: f64,
    /// `-(1/4π)∫f² - 2Φ/π + (m+1)²/2`.
    pub c1_closed_form: f64,
    /// `c1_closed_form - c1_integral_direct`.
    pub closed_form_minus_direct: f64,
    /// `-(λ + (m+1)²) / 2`, the constant for which `q = 2f + C₁` balances
    /// the momentum equation `-Δu + u·∇u + ∇p + div(∇d ⊙ ∇d) = 0`.
    pub c1_balanced: f64,
}

fn next_pow2(n: usize) -> usize {
    n.max(1).next_power_of_two()
}

impl ProfileSolution {
    /// The constant solution `f ≡ c`, which has every period.
    pub fn constant(c: f64, k: u32, phi: f64) -> Self {
        let lambda = c * c + 4.0 * c;
        Self {
            fourier_cos: vec![c],
            fourier_sin: vec![0.0],
            lambda,
            phi,
            k,
            amplitude: 0.0,
            residual_sup: 0.0,
            tail_fraction: 0.0,
            energy_level: lambda + 4.0,
            turning_point: c + 2.0,
            degenerate: true,
            method: SolveMethod::Constant,
            iterations: 0,
            polished: false,
            symmetry_defect: 0.0,
        }
    }

    /// Fourier representation of the closed orbit `orbit`, repeated `k`
    /// times over `[0, 2π]`.
    ///
    /// The orbit is sampled uniformly over one period and transformed. If
    /// the series misses the tail or residual bound it is refined by
    /// Newton's method on the collocation equations (see [`Self::polish`]);
    /// the truncation starts at `cfg.fourier_n` and doubles until both
    /// bounds hold.
    pub fn from_orbit(
        orbit: &Orbit,
        phi: f64,
        k: u32,
        cfg: &ShootingConfig,
        method: SolveMethod,
        iterations: usize,
    ) -> Result<Self> {
        let e = orbit.energy_level;
        let g0 = orbit.g0;
        let opposite = opposite_turning_point(e, g0);
        let amplitude = 0.5 * (g0 - opposite).abs();
        let mut n = cfg.fourier_n;
        loop {
            let per_period = next_pow2((64).max(8 * (n / k as usize + 1)));
            let g = sample_uniform(e, g0, orbit.period, per_period, cfg);
            let spectrum = forward_fft(&g);
            let scale = 1.0 / per_period as f64;
            let mut cos = vec![0.0; n + 1];
            let mut sin = vec![0.0; n + 1];
            cos[0] = spectrum[0].re * scale - 2.0;
            let mut beyond = 0.0;
            for (j, c) in spectrum.iter().enumerate().take(per_period / 2).skip(1) {
                let c = c * scale;
                let h = j * k as usize;
                if h <= n {
                    cos[h] = 2.0 * c.re;
                    sin[h] = -2.0 * c.im;
                } else {
                    beyond += 2.0 * c.norm_sqr();
                }
            }
            let symmetry_defect = sin.iter().fold(0.0, |m: f64, b| m.max(b.abs()));
            let mut p = Self {
                fourier_cos: cos,
                fourier_sin: sin,
                lambda: e - 4.0,
                phi,
                k,
                amplitude,
                residual_sup: 0.0,
                tail_fraction: 0.0,
                energy_level: e,
                turning_point: g0,
                degenerate: orbit.degenerate,
                method,
                iterations,
                polished: false,
                symmetry_defect,
            };
            p.tail_fraction = p.tail_energy_fraction(beyond);
            p.residual_sup = p.spectral_residual();
            if p.accepted() {
                return Ok(p);
            }
            if let Some(q) = p.polish(phi / (2.0 * PI)) {
                if q.accepted() {
                    return Ok(q);
                }
            }
            if n >= MAX_TRUNCATION {
                return Err(Error::SolverFailure(format!(
                    "Fourier series not resolved at N = {n}: tail share {:e}, residual {:e}",
                    p.tail_fraction, p.residual_sup
                )));
            }
            n *= 2;
        }
    }

    fn accepted(&self) -> bool {
        self.tail_fraction < TAIL_TOLERANCE && self.residual_sup < RESIDUAL_TOLERANCE
    }

    fn refresh_diagnostics(&mut self) {
        let samples = self.samples(self.default_sample_count());
        let max = samples.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = samples.iter().cloned().fold(f64::INFINITY, f64::min);
        self.amplitude = 0.5 * (max - min);
        self.tail_fraction = self.tail_energy_fraction(0.0);
        self.residual_sup = self.spectral_residual();
    }

    /// Newton's method on the collocation form of `f'' + f² + 4f = λ` in
    /// the even basis `f = Σ_{j≤J} c_j cos(jkθ)`, with `c₀ = mean` held
    /// fixed and `λ` free. The collocation nodes are `kθ_i = πi/J`,
    /// `i = 0..J`. Returns `None` if the iteration fails to reduce the
    /// residual.
    pub fn polish(&self, mean: f64) -> Option<Self> {
        let k = self.k as usize;
        let kf = self.k as f64;
        let jmax = self.truncation() / k;
        if jmax == 0 {
            return None;
        }
        let mut c: Vec<f64> = (0..=jmax).map(|j| self.fourier_cos[j * k]).collect();
        c[0] = mean;
        let mut lambda = self.lambda;
        let table: Vec<Vec<f64>> = (0..=jmax)
            .map(|i| (0..=jmax).map(|j| (PI * (i * j) as f64 / jmax as f64).cos()).collect())
            .collect();
        let residual = |c: &[f64], lambda: f64| -> (Vec<f64>, Vec<f64>) {
            let mut r = Vec::with_capacity(jmax + 1);
            let mut values = Vec::with_capacity(jmax + 1);
            for row in &table {
                let f: f64 = pairwise_sum(&c.iter().zip(row).map(|(a, t)| a * t).collect::<Vec<_>>());
                let d2: f64 = -kf * kf
                    * pairwise_sum(
                        &c.iter().zip(row).enumerate().map(|(j, (a, t))| (j * j) as f64 * a * t).collect::<Vec<_>>(),
                    );
                r.push(d2 + f * f + 4.0 * f - lambda);
                values.push(f);
            }
            (r, values)
        };
        let sup = |r: &[f64]| r.iter().fold(0.0, |m: f64, v| m.max(v.abs()));
        let (mut r, mut values) = residual(&c, lambda);
        for _ in 0..40 {
            let current = sup(&r);
            let jac: Vec<Vec<f64>> = (0..=jmax)
                .map(|i| {
                    let mut row: Vec<f64> = (1..=jmax)
                        .map(|j| (-kf * kf * (j * j) as f64 + 2.0 * values[i] + 4.0) * table[i][j])
                        .collect();
                    row.push(-1.0);
                    row
                })
                .collect();
            let delta = crate::numerics::solve_dense(jac, r.clone())?;
            let mut next_c = c.clone();
            for j in 1..=jmax {
                next_c[j] -= delta[j - 1];
            }
            let next_lambda = lambda - delta[jmax];
            let (next_r, next_values) = residual(&next_c, next_lambda);
            if !(sup(&next_r) < current) {
                break;
            }
            c = next_c;
            lambda = next_lambda;
            r = next_r;
            values = next_values;
        }
        let n = self.truncation();
        let mut cos = vec![0.0; n + 1];
        for (j, v) in c.iter().enumerate() {
            cos[j * k] = *v;
        }
        let mut q = Self {
            fourier_cos: cos,
            fourier_sin: vec![0.0; n + 1],
            lambda,
            energy_level: lambda + 4.0,
            turning_point: c.iter().sum::<f64>() + 2.0,
            polished: true,
            ..self.clone()
        };
        q.refresh_diagnostics();
        (q.residual_sup < self.residual_sup).then_some(q)
    }

    /// A profile from caller-supplied coefficients. Diagnostics are
    /// recomputed; nothing is assumed about how well the series solves the
    /// equation.
    pub fn from_coefficients(
        fourier_cos: Vec<f64>,
        fourier_sin: Vec<f64>,
        lambda: f64,
        phi: f64,
        k: u32,
    ) -> Result<Self> {
        if fourier_cos.is_empty() || fourier_cos.len() != fourier_sin.len() {
            return Err(Error::MalformedSpec(format!(
                "Fourier coefficient arrays must be nonempty and of equal length ({} vs {})",
                fourier_cos.len(),
                fourier_sin.len()
            )));
        }
        if k == 0 {
            return Err(Error::MalformedSpec("k must be a positive integer".into()));
        }
        if !fourier_cos.iter().chain(&fourier_sin).chain([&lambda, &phi]).all(|v| v.is_finite()) {
            return Err(Error::MalformedSpec("profile data must be finite".into()));
        }
        let mut p = Self {
            fourier_cos,
            fourier_sin,
            lambda,
            phi,
            k,
            amplitude: 0.0,
            residual_sup: 0.0,
            tail_fraction: 0.0,
            energy_level: lambda + 4.0,
            turning_point: f64::NAN,
            degenerate: false,
            method: SolveMethod::Supplied,
            iterations: 0,
            polished: false,
            symmetry_defect: 0.0,
        };
        let samples = p.samples(p.default_sample_count());
        let max = samples.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = samples.iter().cloned().fold(f64::INFINITY, f64::min);
        p.amplitude = 0.5 * (max - min);
        p.turning_point = max + 2.0;
        p.degenerate = p.fourier_cos[1..].iter().chain(&p.fourier_sin[1..]).all(|&c| c == 0.0);
        p.refresh_diagnostics();
        Ok(p)
    }

    /// Highest harmonic `N` kept.
    pub fn truncation(&self) -> usize {
        self.fourier_cos.len() - 1
    }

    /// Mean `a₀ = (1/2π)∫f`.
    pub fn mean(&self) -> f64 {
        self.fourier_cos[0]
    }

    /// `∫₀^{2π} f`.
    pub fn integral(&self) -> f64 {
        2.0 * PI * self.mean()
    }

    /// `sqrt(a_j² + b_j²)`.
    pub fn harmonic_magnitude(&self, j: usize) -> f64 {
        if j > self.truncation() {
            return 0.0;
        }
        self.fourier_cos[j].hypot(self.fourier_sin[j])
    }

    /// Largest harmonic magnitude at an index that is not a multiple of
    /// `k`.
    pub fn off_lattice_magnitude(&self) -> f64 {
        (1..=self.truncation())
            .filter(|j| j % self.k as usize != 0)
            .map(|j| self.harmonic_magnitude(j))
            .fold(0.0, f64::max)
    }

    /// Largest sine coefficient; zero for a profile even about `θ = 0`.
    pub fn max_sine(&self) -> f64 {
        self.fourier_sin.iter().fold(0.0, |m, b| m.max(b.abs()))
    }

    /// `f(θ)`.
    pub fn eval(&self, theta: f64) -> f64 {
        self.eval_derivative(theta, 0)
    }

    /// `f^{(order)}(θ)` for `order ∈ {0, 1, 2}`.
    pub fn eval_derivative(&self, theta: f64, order: u32) -> f64 {
        let mut terms = Vec::with_capacity(self.fourier_cos.len());
        terms.push(if order == 0 { self.fourier_cos[0] } else { 0.0 });
        for j in 1..=self.truncation() {
            let jf = j as f64;
            let (s, c) = (jf * theta).sin_cos();
            let (a, b) = (self.fourier_cos[j], self.fourier_sin[j]);
            terms.push(match order {
                0 => a * c + b * s,
                1 => jf * (b * c - a * s),
                _ => -jf * jf * (a * c + b * s),
            });
        }
        pairwise_sum(&terms)
    }

    fn default_sample_count(&self) -> usize {
        next_pow2(8 * (self.truncation() + 1)).max(256)
    }

    /// `f` at `θ_i = 2πi/count`; `count` must exceed `2N`.
    pub fn samples(&self, count: usize) -> Vec<f64> {
        self.synthesize(count, |_| 1.0)
    }

    /// `f''` at `θ_i = 2πi/count`.
    pub fn second_derivative_samples(&self, count: usize) -> Vec<f64> {
        self.synthesize(count, |j| -((j * j) as f64))
    }

    fn synthesize(&self, count: usize, weight: impl Fn(usize) -> f64) -> Vec<f64> {
        let n = self.truncation();
        let count = count.max(2 * n + 2);
        let mut buf = vec![Complex64::new(0.0, 0.0); count];
        buf[0] = Complex64::new(self.fourier_cos[0] * weight(0), 0.0);
        for j in 1..=n {
            let c = Complex64::new(self.fourier_cos[j], -self.fourier_sin[j]) * (0.5 * weight(j));
            buf[j] += c;
            buf[count - j] += c.conj();
        }
        let mut planner = FftPlanner::new();
        planner.plan_fft_inverse(count).process(&mut buf);
        buf.into_iter().map(|z| z.re).collect()
    }

    /// `sup_θ |f'' + f² + 4f - λ|` on a grid fine enough to resolve the
    /// product `f²` exactly.
    pub fn spectral_residual(&self) -> f64 {
        let count = self.default_sample_count();
        let f = self.samples(count);
        let f2 = self.second_derivative_samples(count);
        f.iter()
            .zip(&f2)
            .map(|(v, d)| (d + v * v + 4.0 * v - self.lambda).abs())
            .fold(0.0, f64::max)
    }

    fn tail_energy_fraction(&self, beyond: f64) -> f64 {
        let n = self.truncation();
        let cut = 3 * n / 4;
        let mut total = self.fourier_cos[0] * self.fourier_cos[0] + beyond;
        let mut tail = beyond;
        for j in 1..=n {
            let e = 0.5 * (self.fourier_cos[j].powi(2) + self.fourier_sin[j].powi(2));
            total += e;
            if j > cut {
                tail += e;
            }
        }
        if total == 0.0 {
            0.0
        } else {
            tail / total
        }
    }

    /// `C₁ = ((m+1)² - λ)/2`, the value consistent with the profile
    /// equation.
    pub fn c1_ode(&self, m: i64) -> f64 {
        let q = ((m + 1) * (m + 1)) as f64;
        0.5 * (q - self.lambda)
    }

    /// `C₁ = -(λ + (m+1)²)/2`, which makes `q = 2f + C₁` balance the
    /// radial momentum equation `-f'' - f² - 2q = (m+1)²`.
    pub fn c1_balanced(&self, m: i64) -> f64 {
        let q = ((m + 1) * (m + 1)) as f64;
        -0.5 * (self.lambda + q)
    }

    /// Integrates `-f'' - f² - 4f = 2C₁ - (m+1)²` over one period with the
    /// trapezoid rule and solves for `C₁`.
    pub fn c1_integral_direct(&self, m: i64) -> f64 {
        let count = self.default_sample_count();
        let f = self.samples(count);
        let f2 = self.second_derivative_samples(count);
        let terms: Vec<f64> = f.iter().zip(&f2).map(|(v, d)| -d - v * v - 4.0 * v).collect();
        let average = pairwise_sum(&terms) / count as f64;
        let q = ((m + 1) * (m + 1)) as f64;
        0.5 * (average + q)
    }

    /// `-(1/4π)∫f² - 2Φ/π + (m+1)²/2`.
    pub fn c1_closed_form(&self, m: i64) -> f64 {
        let count = self.default_sample_count();
        let squares: Vec<f64> = self.samples(count).iter().map(|v| v * v).collect();
        let int_sq = 2.0 * PI * pairwise_sum(&squares) / count as f64;
        let q = ((m + 1) * (m + 1)) as f64;
        -int_sq / (4.0 * PI) - 2.0 * self.phi / PI + 0.5 * q
    }
}

/// All three values of `C₁` for winding `m`.
pub fn compute_c1(profile: &ProfileSolution, m: i64) -> C1Report {
    let c1_integral_direct = profile.c1_integral_direct(m);
    let c1_closed_form = profile.c1_closed_form(m);
    C1Report {
        m,
        c1_ode: profile.c1_ode(m),
        c1_integral_direct,
        c1_closed_form,
        closed_form_minus_direct: c1_closed_form - c1_integral_direct,
        c1_balanced: profile.c1_balanced(m),
    }
}

fn forward_fft(x: &[f64]) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(buf.len()).process(&mut buf);
    buf
}
