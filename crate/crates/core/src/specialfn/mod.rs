//! Bessel functions, Gamma and the zero-finding layer used for shell spectra.

mod bessel;
mod gamma;
mod zeros;

pub use bessel::{
    bessel_deriv, bessel_j, bessel_jy, bessel_y, BesselOrder, BesselValues, Kind, NU_MAX, X_MAX,
};
pub use gamma::gamma;
pub use zeros::{
    bessel_j_zeros_below, cross_product_F, p_function, p_zero, p_zeros, p_zeros_below, P_SCAN_STEP,
};
pub(crate) use zeros::{normalized_dirichlet, normalized_neumann, scan_roots, shell_scan_step};
