pub mod error;
pub mod geometry;
pub mod kernel;
pub mod oracles;
pub mod quadrature;
pub mod section;
pub mod special;
pub mod verify;

pub use error::{Error, Result};
pub use geometry::{cone_distance, integrate_over_cone, ConePoint, ConeQuadrature};
pub use kernel::{BoundReport, GridPoint, HeatKernelEvaluator, KernelValue, RadialSeries};
pub use section::{
    CircleSection, CrossSection, MatrixSection, SectionPoint, SpectralBlock, SpectralMode, SphereSection,
};
