use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::MAX_DIM;

/// A point of ℝⁿ∖{0}; components beyond `dim` are zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub dim: usize,
    pub coords: [f64; MAX_DIM],
}

impl Point {
    pub fn new(coords: &[f64]) -> Result<Self> {
        let dim = coords.len();
        if !(2..=MAX_DIM).contains(&dim) {
            return Err(Error::UnsupportedDimension(dim));
        }
        let mut c = [0.0; MAX_DIM];
        c[..dim].copy_from_slice(coords);
        let p = Self { dim, coords: c };
        if p.norm() == 0.0 {
            return Err(Error::InvalidParameter("point at the origin".into()));
        }
        Ok(p)
    }

    pub fn from_array(dim: usize, coords: [f64; MAX_DIM]) -> Self {
        Self { dim, coords }
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.coords[..self.dim]
    }

    pub fn norm(&self) -> f64 {
        self.as_slice().iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            dim: self.dim,
            coords: self.coords.map(|c| c * s),
        }
    }

    /// `x / |x|`.
    pub fn direction(&self) -> [f64; MAX_DIM] {
        let r = self.norm();
        self.coords.map(|c| c / r)
    }
}

impl Serialize for Point {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.as_slice().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Point {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<f64>::deserialize(d)?;
        Point::new(&v).map_err(serde::de::Error::custom)
    }
}

/// Annulus `r_min ≤ |x| ≤ r_max` sampled on geometric radii times a
/// uniform angular lattice.
///
/// `angular` holds one count per angle: `[θ]` in 2D, `[φ, θ]` in 3D and
/// `[ψ, φ, θ]` in 4D. Polar angles use cell-centred nodes, so no point
/// sits on a coordinate pole; the azimuth starts at 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub r_min: f64,
    pub r_max: f64,
    pub n_radial: usize,
    pub angular: Vec<usize>,
}

impl GridSpec {
    pub fn new(r_min: f64, r_max: f64, n_radial: usize, angular: Vec<usize>) -> Result<Self> {
        let g = Self {
            r_min,
            r_max,
            n_radial,
            angular,
        };
        g.validate()?;
        Ok(g)
    }

    /// The default verification annulus `0.5 ≤ |x| ≤ 2`.
    pub fn default_for(dim: usize) -> Result<Self> {
        let angular = default_angular(dim, None)?;
        Self::new(0.5, 2.0, 5, angular)
    }

    /// Same annulus with `n_radial` and every angular count doubled.
    pub fn refined(&self) -> Self {
        Self {
            r_min: self.r_min,
            r_max: self.r_max,
            n_radial: 2 * self.n_radial,
            angular: self.angular.iter().map(|a| 2 * a).collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r_min > 0.0 && self.r_min.is_finite() && self.r_max.is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "radii must be positive and finite (r_min = {}, r_max = {})",
                self.r_min, self.r_max
            )));
        }
        if self.r_min >= self.r_max {
            return Err(Error::InvalidGrid(format!(
                "empty radial range [{}, {}]",
                self.r_min, self.r_max
            )));
        }
        if self.n_radial < 2 {
            return Err(Error::InvalidGrid("n_radial must be at least 2".into()));
        }
        if self.angular.contains(&0) {
            return Err(Error::InvalidGrid("angular counts must be positive".into()));
        }
        Ok(())
    }

    pub fn radii(&self) -> Vec<f64> {
        let ratio = self.r_max / self.r_min;
        let last = (self.n_radial - 1) as f64;
        (0..self.n_radial)
            .map(|i| {
                if i == self.n_radial - 1 {
                    self.r_max
                } else {
                    self.r_min * ratio.powf(i as f64 / last)
                }
            })
            .collect()
    }

    pub fn points_per_sphere(&self) -> usize {
        self.angular.iter().product()
    }
}

/// Angular counts used when none are given. `azimuthal` overrides the
/// azimuthal count; polar counts follow as half (3D) or quarter (4D).
pub fn default_angular(dim: usize, azimuthal: Option<usize>) -> Result<Vec<usize>> {
    match dim {
        2 => Ok(vec![azimuthal.unwrap_or(32)]),
        3 => {
            let a = azimuthal.unwrap_or(24);
            Ok(vec![(a / 2).max(1), a])
        }
        4 => {
            let a = azimuthal.unwrap_or(16);
            Ok(vec![(a / 2).max(1), (a / 2).max(1), a])
        }
        n => Err(Error::UnsupportedDimension(n)),
    }
}

/// Unit-sphere directions of the angular lattice, in lexicographic order.
pub fn sphere_directions(dim: usize, angular: &[usize]) -> Result<Vec<[f64; MAX_DIM]>> {
    if angular.len() != dim - 1 {
        return Err(Error::InvalidGrid(format!(
            "expected {} angular counts for dimension {dim}, got {}",
            dim - 1,
            angular.len()
        )));
    }
    let polar = |count: usize, i: usize| (i as f64 + 0.5) * PI / count as f64;
    let azim = |count: usize, j: usize| 2.0 * PI * j as f64 / count as f64;
    let mut out = Vec::with_capacity(angular.iter().product());
    match dim {
        2 => {
            for j in 0..angular[0] {
                let (s, c) = azim(angular[0], j).sin_cos();
                out.push([c, s, 0.0, 0.0]);
            }
        }
        3 => {
            for i in 0..angular[0] {
                let (sp, cp) = polar(angular[0], i).sin_cos();
                for j in 0..angular[1] {
                    let (st, ct) = azim(angular[1], j).sin_cos();
                    out.push([sp * ct, sp * st, cp, 0.0]);
                }
            }
        }
        4 => {
            for h in 0..angular[0] {
                let (sq, cq) = polar(angular[0], h).sin_cos();
                for i in 0..angular[1] {
                    let (sp, cp) = polar(angular[1], i).sin_cos();
                    for j in 0..angular[2] {
                        let (st, ct) = azim(angular[2], j).sin_cos();
                        out.push([sq * sp * ct, sq * sp * st, sq * cp, cq]);
                    }
                }
            }
        }
        n => return Err(Error::UnsupportedDimension(n)),
    }
    Ok(out)
}

/// Radius-major Cartesian product of the geometric radii and the angular
/// lattice.
pub fn annulus_grid(spec: &GridSpec, dim: usize) -> Result<Vec<Point>> {
    spec.validate()?;
    let dirs = sphere_directions(dim, &spec.angular)?;
    let mut pts = Vec::with_capacity(spec.n_radial * dirs.len());
    for r in spec.radii() {
        for d in &dirs {
            pts.push(Point::from_array(dim, d.map(|c| c * r)));
        }
    }
    Ok(pts)
}

/// Points of the angular lattice on the single sphere `|x| = radius`.
pub fn sphere_grid(radius: f64, dim: usize, angular: &[usize]) -> Result<Vec<Point>> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvalidGrid(format!("radius must be positive, got {radius}")));
    }
    Ok(sphere_directions(dim, angular)?
        .into_iter()
        .map(|d| Point::from_array(dim, d.map(|c| c * radius)))
        .collect())
}
