//! Independent ground truth for the kernel series: Weber's second
//! exponential integral, the Hankel transform and a finite-difference
//! solver on 2-cones.

mod fd;
mod hankel;
mod weber;

pub use fd::{fd_heat_evolve, fd_radial_mode, FDSolution, RadialGrid, Spacing};
pub use hankel::hankel_transform;
pub use weber::{weber_closed_form, weber_quadrature};
