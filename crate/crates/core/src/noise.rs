//! Environment spectral densities and the dephasing rate built from Fourier weights.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, require_finite, FloquetError, Result};
use crate::floquet::{DriveConfig, FourierWeights};

/// Rates below this are reported as an infinite lifetime.
pub const ZERO_RATE: f64 = 1e-300;

/// 1/f flux noise plus a thermal (ohmic-squared) bath.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    /// 1/f amplitude `V_f`.
    pub v_f: f64,
    /// Thermal amplitude `V_d`.
    pub v_d: f64,
    /// `√|ln ω_ir τ|`.
    pub ir_factor: f64,
    /// `w_q/(k_B T)`.
    pub temp_ratio: f64,
    /// Energy unit that `temp_ratio` refers to.
    pub w_q: f64,
}

impl Default for NoiseModel {
    fn default() -> Self {
        Self {
            v_f: 9.0e-6,
            v_d: 3.0e-6,
            ir_factor: 4.0,
            temp_ratio: 1.43,
            w_q: 1.0,
        }
    }
}

impl NoiseModel {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("v_f", self.v_f),
            ("v_d", self.v_d),
            ("ir_factor", self.ir_factor),
            ("temp_ratio", self.temp_ratio),
            ("w_q", self.w_q),
        ] {
            require_finite(name, v)?;
            if v <= 0.0 {
                return Err(invalid(name, "must be positive"));
            }
        }
        Ok(())
    }
}

/// `n = 1/(exp(freq·temp_ratio/w_q) − 1)`, capped at `f64::MAX`.
pub fn bose_occupation(freq: f64, model: &NoiseModel) -> Result<f64> {
    require_finite("freq", freq)?;
    if freq <= 0.0 {
        return Err(invalid("freq", "must be positive"));
    }
    let n = 1.0 / (freq * model.temp_ratio / model.w_q).exp_m1();
    Ok(if n.is_finite() { n } else { f64::MAX })
}

/// `S_f = V_f² 2π/|f|`.
pub fn flux_noise_density(freq: f64, model: &NoiseModel) -> Result<f64> {
    require_finite("freq", freq)?;
    if freq == 0.0 {
        return Err(invalid("freq", "S is undefined at zero frequency"));
    }
    Ok(model.v_f * model.v_f * TAU / freq.abs())
}

/// Two-sided thermal part: `(1 + n) V_d (f/2π)²` for `f > 0`, `n(|f|) V_d (f/2π)²` for `f < 0`.
pub fn thermal_noise_density(freq: f64, model: &NoiseModel) -> Result<f64> {
    require_finite("freq", freq)?;
    if freq == 0.0 {
        return Err(invalid("freq", "S is undefined at zero frequency"));
    }
    let n = bose_occupation(freq.abs(), model)?;
    let occupation = if freq > 0.0 { 1.0 + n } else { n };
    let f = freq / TAU;
    Ok(occupation * model.v_d * f * f)
}

/// `S(f) = S_f(f) + S_d(f)`.
pub fn spectral_density(freq: f64, model: &NoiseModel) -> Result<f64> {
    Ok(flux_noise_density(freq, model)? + thermal_noise_density(freq, model)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DephasingResult {
    pub gamma_phi: f64,
    /// `1/γ_φ`, or `+∞` when the rate vanishes.
    #[serde(with = "crate::serde_float")]
    pub t_phi: f64,
    /// `2 V_f ir_factor |g₀|`.
    pub term_dc: f64,
    /// `Σ_{k≠0} 2 g_k² S(kω)`.
    pub term_ac: f64,
}

impl DephasingResult {
    pub fn is_infinite(&self) -> bool {
        self.t_phi.is_infinite()
    }
}

/// `γ_φ = 2 V_f ir_factor |g₀| + Σ_{k≠0} 2 g_k² S(kω)`.
pub fn dephasing_rate(
    weights: &FourierWeights,
    drive: &DriveConfig,
    model: &NoiseModel,
) -> Result<DephasingResult> {
    dephasing_rate_from_pairs(weights.iter(), drive.omega, model)
}

/// Same as [`dephasing_rate`] for an arbitrary `(k, g_k)` listing.
pub fn dephasing_rate_from_pairs(
    weights: impl IntoIterator<Item = (i64, f64)>,
    omega: f64,
    model: &NoiseModel,
) -> Result<DephasingResult> {
    model.validate()?;
    require_finite("omega", omega)?;
    if omega <= 0.0 {
        return Err(invalid("omega", "must be positive"));
    }
    let mut g0 = None;
    let mut term_ac = 0.0;
    for (k, g) in weights {
        require_finite("weight", g)?;
        if k == 0 {
            g0 = Some(g);
        } else if g != 0.0 {
            term_ac += 2.0 * g * g * spectral_density(k as f64 * omega, model)?;
        }
    }
    let g0 = g0.ok_or(FloquetError::MissingWeight)?;
    let term_dc = 2.0 * model.v_f * model.ir_factor * g0.abs();
    let gamma_phi = term_dc + term_ac;
    Ok(DephasingResult {
        gamma_phi,
        t_phi: if gamma_phi < ZERO_RATE {
            f64::INFINITY
        } else {
            1.0 / gamma_phi
        },
        term_dc,
        term_ac,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model() -> NoiseModel {
        NoiseModel::default()
    }

    #[test]
    fn bose_reference_value() {
        // 1/(e^1.43 − 1)
        let n = bose_occupation(1.0, &model()).unwrap();
        assert!((n - 0.314_594_096_396_695_6).abs() < 1e-14, "{n}");
    }

    #[test]
    fn bose_limits() {
        assert_eq!(bose_occupation(1e6, &model()).unwrap(), 0.0);
        let hot = NoiseModel {
            temp_ratio: 1e-320,
            ..model()
        };
        assert_eq!(bose_occupation(1.0, &hot).unwrap(), f64::MAX);
        assert!(bose_occupation(0.0, &model()).is_err());
        assert!(bose_occupation(-1.0, &model()).is_err());
    }

    #[test]
    fn flux_noise_reference_value() {
        let s = flux_noise_density(1.0, &model()).unwrap();
        assert!((s - 5.089_380_098_815_465e-10).abs() < 1e-24);
    }

    #[test]
    fn thermal_noise_limits() {
        let cold = NoiseModel {
            temp_ratio: 1e6,
            ..model()
        };
        let f = 2.3;
        let s = thermal_noise_density(f, &cold).unwrap();
        assert!((s / cold.v_d - (f / TAU).powi(2)).abs() < 1e-15);
        assert!(spectral_density(-f, &model()).unwrap() < spectral_density(f, &model()).unwrap());
        assert!(spectral_density(0.0, &model()).is_err());
    }

    #[test]
    fn zero_weights_give_infinite_lifetime() {
        let w = FourierWeights::from_values(2, vec![0.0; 5]).unwrap();
        let r = dephasing_rate_from_pairs(w.iter(), 1.0, &model()).unwrap();
        assert_eq!(r.gamma_phi, 0.0);
        assert!(r.is_infinite());
    }

    #[test]
    #[allow(clippy::approx_constant)]
    fn static_bias_rate() {
        let r = dephasing_rate_from_pairs([(0, 0.7071)], 10.0, &model()).unwrap();
        assert!((r.gamma_phi - 5.091_12e-5).abs() < 1e-15);
        assert!((r.t_phi - 19_642.043_401_059_1).abs() < 1e-8);
        assert_eq!(r.term_ac, 0.0);
    }

    #[test]
    fn missing_dc_weight_rejected() {
        assert!(matches!(
            dephasing_rate_from_pairs([(1, 0.1), (-1, 0.1)], 1.0, &model()),
            Err(FloquetError::MissingWeight)
        ));
    }

    #[test]
    fn sour_spot_rate_is_the_ac_sum() {
        let pairs = [(-1, 0.2), (0, 0.0), (1, 0.2)];
        let r = dephasing_rate_from_pairs(pairs, 1.0, &model()).unwrap();
        let want = 2.0
            * 0.04
            * (spectral_density(1.0, &model()).unwrap()
                + spectral_density(-1.0, &model()).unwrap());
        assert_eq!(r.term_dc, 0.0);
        assert!((r.gamma_phi - want).abs() <= 1e-15 * want);
    }

    #[test]
    fn infinite_lifetime_round_trips_through_json() {
        let r = DephasingResult {
            gamma_phi: 0.0,
            t_phi: f64::INFINITY,
            term_dc: 0.0,
            term_ac: 0.0,
        };
        let text = serde_json::to_string(&r).unwrap();
        assert!(text.contains("\"inf\""));
        let back: DephasingResult = serde_json::from_str(&text).unwrap();
        assert_eq!(back, r);
    }
}
