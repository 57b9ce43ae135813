//! Closed-form predictions: Bessel functions, the multimode gap and the
//! nearly degenerate (RWA and GVV) resonance theory.

pub mod bessel;
pub mod gvv;
pub mod multimode;

pub use bessel::bessel_j;
pub use gvv::{
    gvv_bias_sensitivity, gvv_gap, rwa_gap, stark_shift_chi, GvvSensitivityMode, ResonanceIndex,
    RwaResult, StarkShift,
};
pub use multimode::{
    bias_sensitivity_multimode, gap_multimode, gap_multimode_alternate, in_multimode_regime,
    multimode_params, optimal_base_frequency, theta, MultimodeParams, OptimalFrequency,
};
