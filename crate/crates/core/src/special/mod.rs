//! Special functions: `ln Γ`, `J_μ` and `I_μ` of real order.

mod bessel;
mod gamma;

pub use bessel::{
    bessel_i, bessel_i_rough_bound, bessel_i_scaled, bessel_i_scaled_integral, bessel_j,
    log_bessel_i_rough_bound, log_bessel_i_scaled, log_bessel_i_scaled_series, modified_bessel_i,
    uses_series, BesselValue,
};
pub use gamma::log_gamma;
