use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, require_finite, Result};

/// Physical parameters of the driven qubit
/// `H(t) = -(w_q/2) σz + d(t)/2 σx` with
/// `d(t) = Ω cos ν cos(N1 ω t) + Ω sin ν cos(N2 ω t) + b`.
///
/// All energies share the unit of `w_q` (conventionally 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriveConfig {
    pub w_q: f64,
    /// DC bias.
    pub b: f64,
    /// AC strength Ω.
    pub big_omega: f64,
    /// Mixing angle ν in `[0, π/2]`.
    pub nu: f64,
    pub n1: u32,
    pub n2: u32,
    /// Base frequency ω.
    pub omega: f64,
}

impl DriveConfig {
    pub fn new(
        w_q: f64,
        b: f64,
        big_omega: f64,
        nu: f64,
        n1: u32,
        n2: u32,
        omega: f64,
    ) -> Result<Self> {
        let drive = Self {
            w_q,
            b,
            big_omega,
            nu,
            n1,
            n2,
            omega,
        };
        drive.validate()?;
        Ok(drive)
    }

    /// Builds a drive from the two tone amplitudes `Ω1 = Ω cos ν` and `Ω2 = Ω sin ν`.
    pub fn from_tone_amplitudes(
        w_q: f64,
        b: f64,
        omega_1: f64,
        omega_2: f64,
        n1: u32,
        n2: u32,
        omega: f64,
    ) -> Result<Self> {
        require_finite("omega_1", omega_1)?;
        require_finite("omega_2", omega_2)?;
        if omega_1 < 0.0 || omega_2 < 0.0 {
            return Err(invalid("tone amplitudes", "must be non-negative"));
        }
        let big_omega = omega_1.hypot(omega_2);
        let nu = if omega_1 == 0.0 && omega_2 > 0.0 {
            FRAC_PI_2
        } else {
            omega_2.atan2(omega_1)
        };
        Self::new(w_q, b, big_omega, nu, n1, n2, omega)
    }

    pub fn validate(&self) -> Result<()> {
        require_finite("w_q", self.w_q)?;
        require_finite("b", self.b)?;
        require_finite("big_omega", self.big_omega)?;
        require_finite("nu", self.nu)?;
        require_finite("omega", self.omega)?;
        if self.w_q <= 0.0 {
            return Err(invalid("w_q", "must be positive"));
        }
        if self.omega <= 0.0 {
            return Err(invalid("omega", "must be positive"));
        }
        if self.big_omega < 0.0 {
            return Err(invalid("big_omega", "must be non-negative"));
        }
        if !(0.0..=FRAC_PI_2).contains(&self.nu) {
            return Err(invalid("nu", format!("{} is outside [0, π/2]", self.nu)));
        }
        if self.n1 == 0 || self.n2 == 0 {
            return Err(invalid("n1/n2", "harmonic indices must be >= 1"));
        }
        let (a1, a2) = self.tone_amplitudes();
        if self.n1 == self.n2 && a1 != 0.0 && a2 != 0.0 {
            return Err(invalid(
                "n1/n2",
                "N1 = N2 is only allowed when one of the tones is inactive",
            ));
        }
        Ok(())
    }

    /// `(Ω cos ν, Ω sin ν)`; the endpoints ν = 0 and ν = π/2 switch the
    /// inactive tone off exactly.
    pub fn tone_amplitudes(&self) -> (f64, f64) {
        if self.nu == 0.0 {
            (self.big_omega, 0.0)
        } else if self.nu == FRAC_PI_2 {
            (0.0, self.big_omega)
        } else {
            (
                self.big_omega * self.nu.cos(),
                self.big_omega * self.nu.sin(),
            )
        }
    }

    /// Largest harmonic index carried by an active tone (1 for the undriven qubit).
    pub fn max_harmonic(&self) -> u32 {
        self.n1.max(self.n2)
    }

    /// Drive value `d(t)`.
    pub fn drive_at(&self, t: f64) -> f64 {
        let (a1, a2) = self.tone_amplitudes();
        let phase = self.omega * t;
        a1 * (f64::from(self.n1) * phase).cos() + a2 * (f64::from(self.n2) * phase).cos() + self.b
    }

    /// Common drive period `2π/ω`.
    pub fn period(&self) -> f64 {
        std::f64::consts::TAU / self.omega
    }

    /// Splitting `√(w_q² + b²)` of the undriven (DC) qubit.
    pub fn static_splitting(&self) -> f64 {
        self.w_q.hypot(self.b)
    }

    pub fn with_b(mut self, b: f64) -> Self {
        self.b = b;
        self
    }

    pub fn with_big_omega(mut self, big_omega: f64) -> Self {
        self.big_omega = big_omega;
        self
    }

    pub fn with_nu(mut self, nu: f64) -> Self {
        self.nu = nu;
        self
    }

    pub fn with_omega(mut self, omega: f64) -> Self {
        self.omega = omega;
        self
    }
}

/// Finite truncation of the extended (Sambe) space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruncationConfig {
    /// Harmonics `n ∈ [-n_max, n_max]` are retained.
    pub n_max: usize,
    /// Largest Fourier-weight index used for the dephasing sum.
    pub k_max: usize,
}

impl TruncationConfig {
    pub fn new(n_max: usize, k_max: usize) -> Self {
        Self { n_max, k_max }
    }

    /// Default cutoff `max(20, ⌈4(Ω + |b| + w_q)/ω⌉ + max(N1, N2) + 10)` and
    /// `k_max = 4 max(N1, N2)`.
    pub fn for_drive(drive: &DriveConfig) -> Self {
        let reach = (4.0 * (drive.big_omega + drive.b.abs() + drive.w_q) / drive.omega).ceil();
        let reach = if reach.is_finite() && reach > 0.0 {
            reach as usize
        } else {
            0
        };
        let nh = drive.max_harmonic() as usize;
        Self {
            n_max: (reach + nh + 10).max(20),
            k_max: 4 * nh,
        }
    }

    /// Same `k_max`, cutoff grown by `extra` harmonics.
    pub fn widened(self, extra: usize) -> Self {
        Self {
            n_max: self.n_max + extra,
            ..self
        }
    }

    pub fn dim(&self) -> usize {
        2 * (2 * self.n_max + 1)
    }

    pub fn validate(&self, drive: &DriveConfig) -> Result<()> {
        let required = drive.max_harmonic() as usize + 1;
        if self.n_max < required {
            return Err(crate::FloquetError::Truncation {
                n_max: self.n_max,
                required,
            });
        }
        if self.k_max > 2 * self.n_max {
            return Err(invalid(
                "k_max",
                format!("{} exceeds 2·n_max = {}", self.k_max, 2 * self.n_max),
            ));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig2() -> DriveConfig {
        DriveConfig::new(1.0, 0.0, 0.1, std::f64::consts::PI / 30.0, 3, 1, 1.0).unwrap()
    }

    #[test]
    fn default_cutoff_follows_bessel_reach() {
        let d = fig2();
        // ceil(4·1.1/1) = 5 → 5 + 3 + 10 = 18 → floor of 20.
        assert_eq!(TruncationConfig::for_drive(&d).n_max, 20);
        let strong = d.with_big_omega(3.0).with_b(1.0);
        // ceil(4·5) + 3 + 10 = 33
        assert_eq!(TruncationConfig::for_drive(&strong).n_max, 33);
        assert_eq!(TruncationConfig::for_drive(&strong).k_max, 12);
        assert_eq!(TruncationConfig::for_drive(&strong).dim(), 2 * 67);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(DriveConfig::new(0.0, 0.0, 0.1, 0.1, 3, 1, 1.0).is_err());
        assert!(DriveConfig::new(1.0, 0.0, 0.1, 0.1, 3, 1, -1.0).is_err());
        assert!(DriveConfig::new(1.0, f64::NAN, 0.1, 0.1, 3, 1, 1.0).is_err());
        assert!(DriveConfig::new(1.0, 0.0, 0.1, 2.0, 3, 1, 1.0).is_err());
        assert!(DriveConfig::new(1.0, 0.0, 0.1, 0.3, 2, 2, 1.0).is_err());
        assert!(DriveConfig::new(1.0, 0.0, -0.1, 0.3, 3, 1, 1.0).is_err());
    }

    #[test]
    fn equal_harmonics_allowed_for_monochromatic_drive() {
        assert!(DriveConfig::new(1.0, 0.0, 0.1, 0.0, 2, 2, 1.0).is_ok());
        assert!(DriveConfig::new(1.0, 0.0, 0.1, FRAC_PI_2, 2, 2, 1.0).is_ok());
        assert!(DriveConfig::new(1.0, 0.0, 0.0, 0.7, 2, 2, 1.0).is_ok());
    }

    #[test]
    fn endpoints_switch_tones_off_exactly() {
        let d = fig2().with_nu(FRAC_PI_2);
        assert_eq!(d.tone_amplitudes(), (0.0, 0.1));
        let d = fig2().with_nu(0.0);
        assert_eq!(d.tone_amplitudes(), (0.1, 0.0));
    }

    #[test]
    fn tone_amplitude_constructor_round_trips() {
        let d = DriveConfig::from_tone_amplitudes(1.0, 10.01, 3.0, 1.0, 3, 1, 10.0).unwrap();
        let (a1, a2) = d.tone_amplitudes();
        assert!((a1 - 3.0).abs() < 1e-14 && (a2 - 1.0).abs() < 1e-14);
        let d = DriveConfig::from_tone_amplitudes(1.0, 10.01, 0.0, 1.0, 3, 1, 10.0).unwrap();
        assert_eq!(d.nu, FRAC_PI_2);
    }

    #[test]
    fn truncation_precondition() {
        let d = fig2();
        assert!(TruncationConfig::new(3, 3).validate(&d).is_err());
        assert!(TruncationConfig::new(4, 3).validate(&d).is_ok());
        assert!(TruncationConfig::new(4, 9).validate(&d).is_err());
    }
}
