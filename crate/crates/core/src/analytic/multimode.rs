use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::bessel::jn;
use crate::error::{FloquetError, Result};
use crate::floquet::DriveConfig;

pub const FIXED_POINT_TOLERANCE: f64 = 1e-10;
pub const FIXED_POINT_ITERATIONS: usize = 200;

/// Bessel factors of the two tones and the resulting `Θ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MultimodeParams {
    /// `Θ = √(b² + (w_q J̃₀,₁ J̃₀,₂)²)`.
    pub theta: f64,
    pub j_tilde_01: f64,
    pub j_tilde_02: f64,
    pub j_tilde_11: f64,
    pub j_tilde_12: f64,
}

/// Bessel arguments `(Ω cos ν/(N1 ω), Ω sin ν/(N2 ω))`.
pub fn bessel_arguments(drive: &DriveConfig) -> (f64, f64) {
    let (a1, a2) = drive.tone_amplitudes();
    (
        a1 / (f64::from(drive.n1) * drive.omega),
        a2 / (f64::from(drive.n2) * drive.omega),
    )
}

pub fn multimode_params(drive: &DriveConfig) -> MultimodeParams {
    let (x1, x2) = bessel_arguments(drive);
    let (j01, j02) = (jn(0, x1), jn(0, x2));
    MultimodeParams {
        theta: drive.b.hypot(drive.w_q * j01 * j02),
        j_tilde_01: j01,
        j_tilde_02: j02,
        j_tilde_11: jn(1, x1),
        j_tilde_12: jn(1, x2),
    }
}

pub fn theta(drive: &DriveConfig) -> f64 {
    multimode_params(drive).theta
}

/// `Δε ≈ √((ω − Θ)² + (w_q J̃₁,₁ J̃₁,₂)²)`.
pub fn gap_multimode(drive: &DriveConfig) -> f64 {
    let p = multimode_params(drive);
    (drive.omega - p.theta).hypot(drive.w_q * p.j_tilde_11 * p.j_tilde_12)
}

/// Other branch of the same radicand, `ω − √(Θ² + ω² + w_q² J̃₁,₁² J̃₁,₂² − 2Θω)`.
pub fn gap_multimode_alternate(drive: &DriveConfig) -> f64 {
    drive.omega - gap_multimode(drive)
}

/// Whether the drive sits where the multimode formula is expected to hold
/// (`ω ≥ w_q`, `ν ≤ π/12`).
pub fn in_multimode_regime(drive: &DriveConfig) -> bool {
    drive.omega >= drive.w_q && drive.nu <= PI / 12.0
}

/// `∂Δε/∂b = b (ω/Θ − 1)/Δε`.
pub fn bias_sensitivity_multimode(drive: &DriveConfig) -> Result<f64> {
    let gap = gap_multimode(drive);
    if gap == 0.0 {
        return Err(FloquetError::Pole("multimode gap"));
    }
    let th = theta(drive);
    if drive.b == 0.0 {
        return Ok(0.0);
    }
    Ok(drive.b * (drive.omega / th - 1.0) / gap)
}

/// Self-consistent base frequency `ω* = Θ(ω*)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimalFrequency {
    pub omega_star: f64,
    /// `|Θ(ω*) − ω*|`.
    pub residual: f64,
    pub iterations: usize,
    pub damped: bool,
}

pub fn optimal_base_frequency(drive: &DriveConfig) -> Result<OptimalFrequency> {
    drive.validate()?;
    let theta_at = |omega: f64| theta(&drive.with_omega(omega));
    let mut omega = drive.static_splitting();
    let mut last_step = 0.0;
    let mut damped = false;
    for iteration in 1..=FIXED_POINT_ITERATIONS {
        let target = theta_at(omega);
        let mut step = target - omega;
        if last_step * step < 0.0 {
            damped = true;
        }
        if damped {
            step *= 0.5;
        }
        let next = omega + step;
        if !(next.is_finite() && next > 0.0) {
            break;
        }
        omega = next;
        last_step = step;
        if step.abs() < FIXED_POINT_TOLERANCE {
            return Ok(OptimalFrequency {
                omega_star: omega,
                residual: (theta_at(omega) - omega).abs(),
                iterations: iteration,
                damped,
            });
        }
    }
    Err(FloquetError::NonConvergence {
        what: "optimal base frequency",
        iterations: FIXED_POINT_ITERATIONS,
        residual: (theta_at(omega) - omega).abs(),
    })
}
