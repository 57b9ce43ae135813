//! Gap sensitivities to DC bias and AC amplitude.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, require_finite, Result};
use crate::floquet::{
    fourier_weights, solve, solve_tracked, DriveConfig, FloquetSpectrum, TruncationConfig,
};

/// Default bias step.
pub const H_BIAS: f64 = 1e-6;
/// Default amplitude step.
pub const H_AMPLITUDE: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SensitivityMethod {
    FiniteDifference,
    WeightIdentity,
}

/// A finite-difference derivative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Derivative {
    pub value: f64,
    pub step: f64,
    /// Forward three-point stencil instead of a central difference.
    pub one_sided: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensitivityResult {
    /// `∂Δε/∂b`.
    pub d_gap_d_b: f64,
    /// `∂Δε/∂Ω`.
    pub d_gap_d_omega_amp: f64,
    /// How `d_gap_d_b` was obtained; `d_gap_d_omega_amp` is always a finite difference.
    pub method: SensitivityMethod,
    /// Step used for `d_gap_d_omega_amp` (and for `d_gap_d_b` when differenced).
    pub step: f64,
    pub amplitude_one_sided: bool,
    /// `g_{N1 φ}` and `g_{N2 φ}`, the weights at the two tone frequencies.
    pub g_n1: f64,
    pub g_n2: f64,
}

fn tracked_gap(spec: &FloquetSpectrum) -> f64 {
    spec.raw_plus - spec.raw_minus
}

fn check_step(h: f64) -> Result<()> {
    require_finite("h", h)?;
    if h <= 0.0 {
        return Err(invalid("h", "must be positive"));
    }
    Ok(())
}

/// Central difference of the tracked gap in `b` around an already solved `center`.
pub fn bias_derivative_from(
    drive: &DriveConfig,
    trunc: &TruncationConfig,
    center: &FloquetSpectrum,
    h: f64,
) -> Result<f64> {
    check_step(h)?;
    let up = solve_tracked(&drive.with_b(drive.b + h), trunc, center)?;
    let down = solve_tracked(&drive.with_b(drive.b - h), trunc, center)?;
    Ok((tracked_gap(&up) - tracked_gap(&down)) / (2.0 * h))
}

/// Difference of the tracked gap in `Ω` around `center`; forward stencil when `Ω < h`.
pub fn amplitude_derivative_from(
    drive: &DriveConfig,
    trunc: &TruncationConfig,
    center: &FloquetSpectrum,
    h: f64,
) -> Result<Derivative> {
    check_step(h)?;
    let at = |omega_amp: f64| -> Result<f64> {
        Ok(tracked_gap(&solve_tracked(
            &drive.with_big_omega(omega_amp),
            trunc,
            center,
        )?))
    };
    let amp = drive.big_omega;
    if amp < h {
        let f0 = tracked_gap(center);
        let value = (-3.0 * f0 + 4.0 * at(amp + h)? - at(amp + 2.0 * h)?) / (2.0 * h);
        Ok(Derivative {
            value,
            step: h,
            one_sided: true,
        })
    } else {
        Ok(Derivative {
            value: (at(amp + h)? - at(amp - h)?) / (2.0 * h),
            step: h,
            one_sided: false,
        })
    }
}

/// `[Δε(b + h) − Δε(b − h)]/(2h)` with modes tracked from the unperturbed point.
pub fn gap_sensitivity_bias(drive: &DriveConfig, trunc: &TruncationConfig, h: f64) -> Result<f64> {
    let center = solve(drive, trunc)?;
    bias_derivative_from(drive, trunc, &center, h)
}

/// `∂Δε/∂Ω` by tracked finite differences.
pub fn gap_sensitivity_amplitude(
    drive: &DriveConfig,
    trunc: &TruncationConfig,
    h: f64,
) -> Result<Derivative> {
    let center = solve(drive, trunc)?;
    amplitude_derivative_from(drive, trunc, &center, h)
}

/// Both sensitivities at one drive point; `method` selects how `∂Δε/∂b` is obtained.
pub fn sensitivities(
    drive: &DriveConfig,
    trunc: &TruncationConfig,
    method: SensitivityMethod,
) -> Result<SensitivityResult> {
    let center = solve(drive, trunc)?;
    sensitivities_from(drive, trunc, &center, method)
}

pub fn sensitivities_from(
    drive: &DriveConfig,
    trunc: &TruncationConfig,
    center: &FloquetSpectrum,
    method: SensitivityMethod,
) -> Result<SensitivityResult> {
    let km = trunc.k_max.max(drive.max_harmonic() as usize);
    let weights = fourier_weights(center, km)?;
    let d_gap_d_b = match method {
        SensitivityMethod::WeightIdentity => weights.g0(),
        SensitivityMethod::FiniteDifference => bias_derivative_from(drive, trunc, center, H_BIAS)?,
    };
    let amp = amplitude_derivative_from(drive, trunc, center, H_AMPLITUDE)?;
    Ok(SensitivityResult {
        d_gap_d_b,
        d_gap_d_omega_amp: amp.value,
        method,
        step: H_AMPLITUDE,
        amplitude_one_sided: amp.one_sided,
        g_n1: weights.get(i64::from(drive.n1)).unwrap_or(0.0),
        g_n2: weights.get(i64::from(drive.n2)).unwrap_or(0.0),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub finite_difference: f64,
    pub g0: f64,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// Compares the finite-difference `∂Δε/∂b` with `g₀`;
/// passes when `|FD − g₀| ≤ tol · max(1, |g₀|)`.
pub fn verify_weight_identity(
    drive: &DriveConfig,
    trunc: &TruncationConfig,
    tol: f64,
) -> Result<IdentityReport> {
    require_finite("tol", tol)?;
    if tol <= 0.0 {
        return Err(invalid("tol", "must be positive"));
    }
    let center = solve(drive, trunc)?;
    let g0 = fourier_weights(&center, 0)?.g0();
    let fd = bias_derivative_from(drive, trunc, &center, H_BIAS)?;
    let residual = (fd - g0).abs();
    Ok(IdentityReport {
        finite_difference: fd,
        g0,
        residual,
        tolerance: tol,
        passed: residual <= tol * g0.abs().max(1.0),
    })
}
