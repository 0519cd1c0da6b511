use std::f64::consts::PI;
use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;

use crate::error::{Error, Result};
use crate::scalar::MAX_DIM;

/// Default number of Gauss nodes per polar angle.
pub const DEFAULT_SPHERE_RESOLUTION: usize = 24;

/// Nodes and weights of a product rule on the unit sphere `S^{n-1}`.
#[derive(Debug, Clone)]
pub struct Quadrature {
    pub dim: usize,
    pub nodes: Vec<[f64; MAX_DIM]>,
    pub weights: Vec<f64>,
}

impl Quadrature {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        crate::numerics::pairwise_sum(&self.weights)
    }

    /// `∫_{S^{n-1}} f dσ`.
    pub fn integrate<F: Fn(&[f64; MAX_DIM]) -> f64>(&self, f: F) -> f64 {
        let terms: Vec<f64> = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(x))
            .collect();
        crate::numerics::pairwise_sum(&terms)
    }
}

/// Gauss–Legendre nodes and weights on `[a, b]`.
pub fn gauss_legendre(count: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let count = NonZeroUsize::new(count.max(1)).expect("nonzero");
    let rule = GaussLegendre::new(count);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    rule.as_node_weight_pairs()
        .iter()
        .map(|&(x, w)| (mid + half * x, half * w))
        .collect()
}

/// Composite Gauss–Legendre rule: `panels` equal sub-intervals of `[a, b]`.
pub fn composite_gauss_legendre(panels: usize, per_panel: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let panels = panels.max(1);
    let base = gauss_legendre(per_panel, -1.0, 1.0);
    let h = (b - a) / panels as f64;
    let mut out = Vec::with_capacity(panels * base.len());
    for p in 0..panels {
        let lo = a + p as f64 * h;
        for &(x, w) in &base {
            out.push((lo + 0.5 * h * (x + 1.0), 0.5 * h * w));
        }
    }
    out
}

/// Product quadrature on `S^{n-1}` for `n ∈ {2,3,4}`.
///
/// `resolution` is the number of Gauss nodes per polar angle; the azimuth
/// uses `2·resolution` equispaced nodes (trapezoid rule).
/// * 2D: trapezoid in θ.
/// * 3D: Gauss–Legendre in cos φ × trapezoid in θ.
/// * 4D: Gauss–Legendre in ψ ∈ (0, π) carrying the `sin²ψ` weight, Gauss–
///   Legendre in cos φ, trapezoid in θ.
pub fn sphere_quadrature(dim: usize, resolution: usize) -> Result<Quadrature> {
    if resolution == 0 {
        return Err(Error::InvalidParameter("quadrature resolution must be positive".into()));
    }
    let n_az = 2 * resolution;
    let dtheta = 2.0 * PI / n_az as f64;
    let azimuth: Vec<(f64, f64)> = (0..n_az).map(|j| j as f64 * dtheta).map(|t| t.sin_cos()).collect();
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    match dim {
        2 => {
            for &(s, c) in &azimuth {
                nodes.push([c, s, 0.0, 0.0]);
                weights.push(dtheta);
            }
        }
        3 => {
            for (z, wz) in gauss_legendre(resolution, -1.0, 1.0) {
                let rho = (1.0 - z * z).sqrt();
                for &(s, c) in &azimuth {
                    nodes.push([rho * c, rho * s, z, 0.0]);
                    weights.push(wz * dtheta);
                }
            }
        }
        4 => {
            let cos_phi = gauss_legendre(resolution, -1.0, 1.0);
            for (psi, wpsi) in gauss_legendre(resolution, 0.0, PI) {
                let (sq, cq) = psi.sin_cos();
                for &(z, wz) in &cos_phi {
                    let rho = (1.0 - z * z).sqrt();
                    for &(s, c) in &azimuth {
                        nodes.push([sq * rho * c, sq * rho * s, sq * z, cq]);
                        weights.push(wpsi * sq * sq * wz * dtheta);
                    }
                }
            }
        }
        n => return Err(Error::UnsupportedDimension(n)),
    }
    Ok(Quadrature {
        dim,
        nodes,
        weights,
    })
}

/// `|S^{n-1}|` for `n ∈ {2,3,4}`.
pub fn sphere_area(dim: usize) -> Result<f64> {
    match dim {
        2 => Ok(2.0 * PI),
        3 => Ok(4.0 * PI),
        4 => Ok(2.0 * PI * PI),
        n => Err(Error::UnsupportedDimension(n)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn surface_areas() {
        let q3 = sphere_quadrature(3, DEFAULT_SPHERE_RESOLUTION).unwrap();
        assert!((q3.total_weight() - 4.0 * PI).abs() < 1e-12);
        let q4 = sphere_quadrature(4, DEFAULT_SPHERE_RESOLUTION).unwrap();
        assert!((q4.total_weight() - 2.0 * PI * PI).abs() / (2.0 * PI * PI) < 1e-10);
        let q2 = sphere_quadrature(2, DEFAULT_SPHERE_RESOLUTION).unwrap();
        assert!((q2.total_weight() - 2.0 * PI).abs() < 1e-13);
    }

    #[test]
    fn second_moment_in_3d() {
        let q = sphere_quadrature(3, DEFAULT_SPHERE_RESOLUTION).unwrap();
        let m = q.integrate(|x| x[2] * x[2]);
        assert!((m - 4.0 * PI / 3.0).abs() < 1e-10);
    }

    #[test]
    fn second_moments_in_4d_sum_to_area() {
        let q = sphere_quadrature(4, DEFAULT_SPHERE_RESOLUTION).unwrap();
        let area = 2.0 * PI * PI;
        for k in 0..4 {
            let m = q.integrate(|x| x[k] * x[k]);
            assert!((m - area / 4.0).abs() < 1e-10, "component {k}: {m}");
        }
    }

    #[test]
    fn weights_positive_nodes_unit() {
        for n in 2..=4 {
            let q = sphere_quadrature(n, 8).unwrap();
            assert!(q.weights.iter().all(|&w| w > 0.0));
            for x in &q.nodes {
                let r: f64 = x.iter().map(|c| c * c).sum();
                assert!((r - 1.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn five_dimensions_unsupported() {
        assert!(matches!(sphere_quadrature(5, 8), Err(Error::UnsupportedDimension(5))));
    }

    #[test]
    fn composite_rule_integrates_exponential() {
        let rule = composite_gauss_legendre(7, 8, 0.0, 3.0);
        let s: f64 = rule.iter().map(|(x, w)| w * x.exp()).sum();
        assert!((s - (3f64.exp() - 1.0)).abs() < 1e-13);
    }
}
