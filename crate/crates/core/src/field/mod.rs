//! Coordinate frames, annulus grids, sphere quadrature and finite-difference
//! stencils shared by every other module.

pub mod frames;
pub mod grid;
pub mod quadrature;
pub mod stencil;

pub use frames::{polar_basis, spherical_basis};
pub use grid::{annulus_grid, default_angular, sphere_directions, sphere_grid, GridSpec, Point};
pub use quadrature::{
    composite_gauss_legendre, gauss_legendre, sphere_area, sphere_quadrature, Quadrature,
    DEFAULT_SPHERE_RESOLUTION,
};
pub use stencil::{
    fd_divergence, fd_gradient, fd_jacobian, fd_jet, fd_laplacian, DerivativeMode, FdJet,
    StencilConfig,
};
