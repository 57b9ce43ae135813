use serde::{Deserialize, Serialize};

use super::bessel::jn;
use super::multimode::bessel_arguments;
use crate::error::{invalid, FloquetError, Result};
use crate::floquet::DriveConfig;

/// Smallest `j_max` accepted for the Stark-shift sum.
pub const MIN_J_MAX: usize = 10;
/// Retained denominators below this multiple of `ω` are rejected.
pub const SINGULAR_FRACTION: f64 = 1e-8;
/// Bias step for `∂χ/∂b`.
pub const CHI_STEP: f64 = 1e-6;

/// Photon numbers `(m, l)` of a multiphoton resonance `b = kω + δ`, `k = m N1 + l N2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResonanceIndex {
    pub m: i64,
    pub l: i64,
    pub k: i64,
    pub delta: f64,
}

impl ResonanceIndex {
    pub fn new(m: i64, l: i64, n1: u32, n2: u32, delta: f64) -> Result<Self> {
        if !delta.is_finite() {
            return Err(invalid("delta", "must be finite"));
        }
        Ok(Self {
            m,
            l,
            k: m * i64::from(n1) + l * i64::from(n2),
            delta,
        })
    }

    /// Index whose detuning is read off the drive's bias.
    pub fn for_drive(m: i64, l: i64, drive: &DriveConfig) -> Result<Self> {
        let k = m * i64::from(drive.n1) + l * i64::from(drive.n2);
        Self::new(m, l, drive.n1, drive.n2, drive.b - k as f64 * drive.omega)
    }

    /// Bias `kω + δ`.
    pub fn bias(&self, omega: f64) -> f64 {
        self.k as f64 * omega + self.delta
    }

    /// `|δ| ≤ 0.1 ω`, where the nearly degenerate expansion is trusted.
    pub fn in_gvv_regime(&self, omega: f64) -> bool {
        self.delta.abs() <= 0.1 * omega
    }

    fn check(&self, drive: &DriveConfig) -> Result<()> {
        drive.validate()?;
        if self.k != self.m * i64::from(drive.n1) + self.l * i64::from(drive.n2) {
            return Err(invalid(
                "resonance",
                "k must equal m·N1 + l·N2 for this drive",
            ));
        }
        let scale = 1.0 + drive.b.abs();
        if (self.bias(drive.omega) - drive.b).abs() > 1e-9 * scale {
            return Err(invalid(
                "resonance",
                "δ is inconsistent with the drive bias",
            ));
        }
        Ok(())
    }
}

/// Two-level effective Hamiltonian and its splitting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RwaResult {
    pub hamiltonian: [[f64; 2]; 2],
    pub gap: f64,
    /// `J̃₋ₘ,₁ J̃₋ₗ,₂`.
    pub coupling: f64,
}

fn resonant_coupling(drive: &DriveConfig, res: &ResonanceIndex) -> f64 {
    let (x1, x2) = bessel_arguments(drive);
    jn(-res.m, x1) * jn(-res.l, x2)
}

/// `H = [[−b/2, −(w_q/2)J̃], [−(w_q/2)J̃, b/2 − kω]]`, `Δε = √(δ² + (w_q J̃)²)`.
pub fn rwa_gap(drive: &DriveConfig, res: &ResonanceIndex) -> Result<RwaResult> {
    res.check(drive)?;
    let c = resonant_coupling(drive, res);
    let off = -0.5 * drive.w_q * c;
    Ok(RwaResult {
        hamiltonian: [
            [-0.5 * drive.b, off],
            [off, 0.5 * drive.b - res.k as f64 * drive.omega],
        ],
        gap: res.delta.hypot(drive.w_q * c),
        coupling: c,
    })
}

/// Second-order AC Stark shift of the resonant pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StarkShift {
    pub chi: f64,
    pub j_max: usize,
    /// `(j, p)` with `j N1 + p N2 = −k`, left out of the sum.
    pub excluded_terms: Vec<(i64, i64)>,
}

/// `χ = −(w_q²/4) Σ_{j,p} J̃_{j,1}² J̃_{p,2}² / (b + j N1 ω + p N2 ω)` over
/// `|j|, |p| ≤ j_max`, skipping the quasi-degenerate pairs.
pub fn stark_shift_chi(
    drive: &DriveConfig,
    res: &ResonanceIndex,
    j_max: usize,
) -> Result<StarkShift> {
    res.check(drive)?;
    if j_max < MIN_J_MAX {
        return Err(invalid("j_max", format!("must be at least {MIN_J_MAX}")));
    }
    let (x1, x2) = bessel_arguments(drive);
    let jm = j_max as i64;
    let sq1: Vec<f64> = (-jm..=jm).map(|j| jn(j, x1).powi(2)).collect();
    let sq2: Vec<f64> = (-jm..=jm).map(|p| jn(p, x2).powi(2)).collect();
    let (n1, n2) = (i64::from(drive.n1), i64::from(drive.n2));
    let floor = SINGULAR_FRACTION * drive.omega;

    let mut excluded = Vec::new();
    let mut sum = 0.0;
    for j in -jm..=jm {
        for p in -jm..=jm {
            if j * n1 + p * n2 == -res.k {
                excluded.push((j, p));
                continue;
            }
            let den = drive.b + (j * n1 + p * n2) as f64 * drive.omega;
            if den.abs() < floor {
                return Err(FloquetError::NearSingular { j, p, value: den });
            }
            let num = sq1[(j + jm) as usize] * sq2[(p + jm) as usize];
            if num != 0.0 {
                sum += num / den;
            }
        }
    }
    Ok(StarkShift {
        chi: -0.25 * drive.w_q * drive.w_q * sum,
        j_max,
        excluded_terms: excluded,
    })
}

/// `Δε_GVV = √(Δε_RWA² + 4χδ + 4χ²)`.
pub fn gvv_gap(drive: &DriveConfig, res: &ResonanceIndex, chi: f64) -> Result<f64> {
    let rwa = rwa_gap(drive, res)?;
    let radicand = rwa.gap * rwa.gap + 4.0 * chi * res.delta + 4.0 * chi * chi;
    if radicand < 0.0 {
        return Err(FloquetError::PerturbativeValidity { radicand });
    }
    Ok(radicand.sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GvvSensitivityMode {
    /// Keeps the `1 + 2∂χ/∂b` factor.
    Full,
    /// Drops `∂χ/∂b`.
    FastDrive,
}

/// DC-bias sensitivity of the GVV gap.
pub fn gvv_bias_sensitivity(
    drive: &DriveConfig,
    res: &ResonanceIndex,
    chi: &StarkShift,
    mode: GvvSensitivityMode,
) -> Result<f64> {
    let gap = gvv_gap(drive, res, chi.chi)?;
    if gap == 0.0 {
        return Err(FloquetError::Pole("GVV gap"));
    }
    let lead = (res.delta + 2.0 * chi.chi) / gap;
    match mode {
        GvvSensitivityMode::FastDrive => Ok(lead),
        GvvSensitivityMode::Full => {
            let shifted = |h: f64| -> Result<f64> {
                let d = drive.with_b(drive.b + h);
                let r = ResonanceIndex {
                    delta: res.delta + h,
                    ..*res
                };
                Ok(stark_shift_chi(&d, &r, chi.j_max)?.chi)
            };
            let dchi = (shifted(CHI_STEP)? - shifted(-CHI_STEP)?) / (2.0 * CHI_STEP);
            Ok(lead * (1.0 + 2.0 * dchi))
        }
    }
}
