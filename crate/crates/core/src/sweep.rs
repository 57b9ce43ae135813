//! Parameter scans: 2D `(b, ν)` grids, 1D lines, sweet/sour-spot classification
//! and detuning scans near multiphoton resonances.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{gvv_gap, optimal_base_frequency, rwa_gap, stark_shift_chi, ResonanceIndex};
use crate::error::{invalid, require_finite, FloquetError, Result};
use crate::floquet::{
    fourier_weights, solve_following, DriveConfig, FloquetSpectrum, TruncationConfig,
};
use crate::noise::{dephasing_rate, NoiseModel};
use crate::sensitivity::{amplitude_derivative_from, H_AMPLITUDE};

/// `j_max` used for the Stark shift in fast-drive scans.
pub const FASTSCAN_J_MAX: usize = 40;

/// `count` evenly spaced values from `min` to `max`, both included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearRange {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl LinearRange {
    pub fn new(min: f64, max: f64, count: usize) -> Result<Self> {
        let r = Self { min, max, count };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        require_finite("range min", self.min)?;
        require_finite("range max", self.max)?;
        if self.count < 2 {
            return Err(invalid("range count", "must be at least 2"));
        }
        if self.min >= self.max {
            return Err(invalid("range", "min must be below max"));
        }
        Ok(())
    }

    pub fn step(&self) -> f64 {
        (self.max - self.min) / (self.count - 1) as f64
    }

    pub fn values(&self) -> Vec<f64> {
        let last = self.count - 1;
        (0..self.count)
            .map(|i| {
                if i == last {
                    self.max
                } else {
                    self.min + (self.max - self.min) * i as f64 / last as f64
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "omega")]
pub enum OmegaPolicy {
    Fixed(f64),
    /// `ω = ω*(b, ν)` from the self-consistent `ω = Θ`.
    PerPointOptimal,
}

/// Drive parameters shared by every point of a grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriveTemplate {
    pub w_q: f64,
    pub big_omega: f64,
    pub n1: u32,
    pub n2: u32,
}

impl DriveTemplate {
    pub fn at(&self, b: f64, nu: f64, omega: f64) -> Result<DriveConfig> {
        DriveConfig::new(self.w_q, b, self.big_omega, nu, self.n1, self.n2, omega)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub b_range: LinearRange,
    pub nu_range: LinearRange,
    pub omega_policy: OmegaPolicy,
    pub template: DriveTemplate,
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        self.b_range.validate()?;
        self.nu_range.validate()?;
        if self.nu_range.min < 0.0 || self.nu_range.max > std::f64::consts::FRAC_PI_2 {
            return Err(invalid("nu range", "must lie inside [0, π/2]"));
        }
        if let OmegaPolicy::Fixed(w) = self.omega_policy {
            require_finite("omega", w)?;
            if w <= 0.0 {
                return Err(invalid("omega", "must be positive"));
            }
        }
        Ok(())
    }
}

/// Execution knobs shared by the scans.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ScanOptions {
    /// Fixed truncation; `None` picks the default cutoff per point.
    pub trunc: Option<TruncationConfig>,
    /// Worker threads; `None` uses the global rayon pool.
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct PointFlags {
    pub degenerate: bool,
    pub tracking_warn: bool,
    pub gvv_invalid: bool,
    pub truncation_warn: bool,
    pub failed: bool,
}

impl PointFlags {
    pub fn tokens(&self) -> Vec<&'static str> {
        let mut t = Vec::new();
        for (on, name) in [
            (self.degenerate, "degenerate"),
            (self.tracking_warn, "tracking_warn"),
            (self.gvv_invalid, "gvv_invalid"),
            (self.truncation_warn, "truncation_warn"),
            (self.failed, "failed"),
        ] {
            if on {
                t.push(name);
            }
        }
        t
    }

    /// `;`-separated token list, empty when no flag is set.
    pub fn to_field(&self) -> String {
        self.tokens().join(";")
    }

    pub fn parse_field(text: &str) -> Result<Self> {
        let mut f = Self::default();
        for tok in text.split(';').map(str::trim).filter(|t| !t.is_empty()) {
            match tok {
                "degenerate" => f.degenerate = true,
                "tracking_warn" => f.tracking_warn = true,
                "gvv_invalid" => f.gvv_invalid = true,
                "truncation_warn" => f.truncation_warn = true,
                "failed" => f.failed = true,
                other => return Err(invalid("flags", format!("unknown token {other:?}"))),
            }
        }
        Ok(f)
    }
}

/// Exact-numerics observables at one drive point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointObservables {
    /// `(ε₊ − ε₋) mod ω`.
    #[serde(with = "crate::serde_float")]
    pub gap: f64,
    /// `min(gap, ω − gap)`.
    #[serde(with = "crate::serde_float")]
    pub gap_distance: f64,
    /// `g₀`, equal to `∂Δε/∂b`.
    #[serde(with = "crate::serde_float")]
    pub dgap_db: f64,
    #[serde(with = "crate::serde_float")]
    pub dgap_domega: f64,
    #[serde(with = "crate::serde_float")]
    pub gamma_phi: f64,
    #[serde(with = "crate::serde_float")]
    pub t_phi: f64,
    pub flags: PointFlags,
}

impl PointObservables {
    fn failed() -> Self {
        Self {
            gap: f64::NAN,
            gap_distance: f64::NAN,
            dgap_db: f64::NAN,
            dgap_domega: f64::NAN,
            gamma_phi: f64::NAN,
            t_phi: f64::NAN,
            flags: PointFlags {
                failed: true,
                ..PointFlags::default()
            },
        }
    }
}

/// Solves one point, continuing from `previous` when given.
pub fn evaluate_point(
    drive: &DriveConfig,
    opts: &ScanOptions,
    noise: &NoiseModel,
    previous: Option<&FloquetSpectrum>,
) -> Result<(PointObservables, FloquetSpectrum)> {
    let trunc = opts
        .trunc
        .unwrap_or_else(|| TruncationConfig::for_drive(drive));
    let spec = solve_following(drive, &trunc, previous)?;
    let weights = fourier_weights(&spec, trunc.k_max)?;
    let amp = amplitude_derivative_from(drive, &trunc, &spec, H_AMPLITUDE)?;
    let deph = dephasing_rate(&weights, drive, noise)?;
    let obs = PointObservables {
        gap: spec.gap(),
        gap_distance: spec.gap_distance(),
        dgap_db: weights.g0(),
        dgap_domega: amp.value,
        gamma_phi: deph.gamma_phi,
        t_phi: deph.t_phi,
        flags: PointFlags {
            degenerate: spec.flags.degenerate,
            tracking_warn: spec.flags.tracking,
            truncation_warn: spec.flags.truncation,
            ..PointFlags::default()
        },
    };
    Ok((obs, spec))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub b: f64,
    pub nu: f64,
    #[serde(with = "crate::serde_float")]
    pub omega: f64,
    #[serde(with = "crate::serde_float::option")]
    pub omega_star: Option<f64>,
    #[serde(flatten)]
    pub obs: PointObservables,
    /// Diagnostic for failed points.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Grid values stored row-major: one row per `ν`, columns along `b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub spec: GridSpec,
    pub b_values: Vec<f64>,
    pub nu_values: Vec<f64>,
    pub points: Vec<SweepPoint>,
}

impl SweepResult {
    pub fn get(&self, i_nu: usize, i_b: usize) -> &SweepPoint {
        &self.points[i_nu * self.b_values.len() + i_b]
    }

    pub fn row(&self, i_nu: usize) -> &[SweepPoint] {
        let n = self.b_values.len();
        &self.points[i_nu * n..(i_nu + 1) * n]
    }

    /// Point with the largest finite `T_φ`, or an infinite one if present.
    pub fn max_t_phi(&self) -> Option<&SweepPoint> {
        self.points
            .iter()
            .filter(|p| !p.obs.t_phi.is_nan())
            .max_by(|a, b| a.obs.t_phi.total_cmp(&b.obs.t_phi))
    }
}

/// Runs `f` on a dedicated pool when `threads` is set.
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(f()),
        Some(0) => Err(invalid("threads", "must be at least 1")),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| FloquetError::Config(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

fn grid_row(
    spec: &GridSpec,
    b_values: &[f64],
    nu: f64,
    opts: &ScanOptions,
    noise: &NoiseModel,
) -> Vec<SweepPoint> {
    let mut previous: Option<FloquetSpectrum> = None;
    b_values
        .iter()
        .map(|&b| {
            let outcome = (|| -> Result<(SweepPoint, FloquetSpectrum)> {
                let (omega, omega_star) = match spec.omega_policy {
                    OmegaPolicy::Fixed(w) => (w, None),
                    OmegaPolicy::PerPointOptimal => {
                        let probe = spec.template.at(b, nu, 1.0)?;
                        let w = optimal_base_frequency(&probe)?.omega_star;
                        (w, Some(w))
                    }
                };
                let drive = spec.template.at(b, nu, omega)?;
                let (obs, s) = evaluate_point(&drive, opts, noise, previous.as_ref())?;
                Ok((
                    SweepPoint {
                        b,
                        nu,
                        omega,
                        omega_star,
                        obs,
                        error: None,
                    },
                    s,
                ))
            })();
            match outcome {
                Ok((p, s)) => {
                    previous = Some(s);
                    p
                }
                Err(e) => {
                    previous = None;
                    SweepPoint {
                        b,
                        nu,
                        omega: match spec.omega_policy {
                            OmegaPolicy::Fixed(w) => w,
                            OmegaPolicy::PerPointOptimal => f64::NAN,
                        },
                        omega_star: None,
                        obs: PointObservables::failed(),
                        error: Some(e.to_string()),
                    }
                }
            }
        })
        .collect()
}

/// Evaluates every `(b, ν)` point; rows run in parallel, each row warm-starts along `b`.
/// Per-point failures are stored as flagged entries.
pub fn sweep_grid(spec: &GridSpec, opts: &ScanOptions, noise: &NoiseModel) -> Result<SweepResult> {
    spec.validate()?;
    noise.validate()?;
    let b_values = spec.b_range.values();
    let nu_values = spec.nu_range.values();
    let rows: Vec<Vec<SweepPoint>> = with_threads(opts.threads, || {
        nu_values
            .par_iter()
            .map(|&nu| grid_row(spec, &b_values, nu, opts, noise))
            .collect()
    })?;
    Ok(SweepResult {
        spec: *spec,
        b_values,
        nu_values,
        points: rows.into_iter().flatten().collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LineAxis {
    /// DC bias `b`.
    B,
    /// Total AC strength `Ω` at fixed `ν`.
    BigOmega,
    /// First-tone amplitude `Ω₁ = Ω cos ν` with `Ω₂` held fixed.
    Omega1,
}

impl LineAxis {
    pub fn column_name(&self) -> &'static str {
        match self {
            LineAxis::B => "b",
            LineAxis::BigOmega => "Omega",
            LineAxis::Omega1 => "Omega1",
        }
    }

    /// Drive with the scanned coordinate set to `x`.
    pub fn apply(&self, template: &DriveConfig, x: f64) -> Result<DriveConfig> {
        match self {
            LineAxis::B => {
                let d = template.with_b(x);
                d.validate()?;
                Ok(d)
            }
            LineAxis::BigOmega => {
                let d = template.with_big_omega(x);
                d.validate()?;
                Ok(d)
            }
            LineAxis::Omega1 => {
                let (_, a2) = template.tone_amplitudes();
                DriveConfig::from_tone_amplitudes(
                    template.w_q,
                    template.b,
                    x,
                    a2,
                    template.n1,
                    template.n2,
                    template.omega,
                )
            }
        }
    }
}

/// RWA/GVV predictions attached to a fast-drive line point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResonanceColumns {
    #[serde(with = "crate::serde_float")]
    pub gap_rwa: f64,
    #[serde(with = "crate::serde_float")]
    pub gap_gvv: f64,
    #[serde(with = "crate::serde_float")]
    pub chi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinePoint {
    pub x: f64,
    pub b: f64,
    pub nu: f64,
    pub omega: f64,
    #[serde(flatten)]
    pub obs: PointObservables,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resonance: Option<ResonanceColumns>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LineResult {
    pub axis: LineAxis,
    pub template: DriveConfig,
    pub range: LinearRange,
    pub points: Vec<LinePoint>,
}

impl LineResult {
    pub fn column(&self, f: impl Fn(&LinePoint) -> f64) -> Vec<f64> {
        self.points.iter().map(f).collect()
    }
}

fn resonance_columns(drive: &DriveConfig, m: i64, l: i64) -> (ResonanceColumns, bool) {
    let attempt = || -> Result<(f64, f64, Result<f64>)> {
        let res = ResonanceIndex::for_drive(m, l, drive)?;
        let rwa = rwa_gap(drive, &res)?.gap;
        let chi = stark_shift_chi(drive, &res, FASTSCAN_J_MAX)?.chi;
        Ok((rwa, chi, gvv_gap(drive, &res, chi)))
    };
    match attempt() {
        Ok((rwa, chi, Ok(gvv))) => {
            let in_regime =
                ResonanceIndex::for_drive(m, l, drive).is_ok_and(|r| r.in_gvv_regime(drive.omega));
            (
                ResonanceColumns {
                    gap_rwa: rwa,
                    gap_gvv: gvv,
                    chi,
                },
                !in_regime,
            )
        }
        Ok((rwa, chi, Err(_))) => (
            ResonanceColumns {
                gap_rwa: rwa,
                gap_gvv: f64::NAN,
                chi,
            },
            true,
        ),
        Err(_) => (
            ResonanceColumns {
                gap_rwa: f64::NAN,
                gap_gvv: f64::NAN,
                chi: f64::NAN,
            },
            true,
        ),
    }
}

/// 1D scan along `axis` with warm-start tracking. With `resonance = Some((m, l))`
/// the RWA and GVV gaps are reported alongside the exact ones.
pub fn sweep_line(
    template: &DriveConfig,
    axis: LineAxis,
    range: &LinearRange,
    resonance: Option<(i64, i64)>,
    opts: &ScanOptions,
    noise: &NoiseModel,
) -> Result<LineResult> {
    range.validate()?;
    noise.validate()?;
    let run = || {
        let mut previous: Option<FloquetSpectrum> = None;
        range
            .values()
            .into_iter()
            .map(|x| {
                let outcome = axis.apply(template, x).and_then(|d| {
                    evaluate_point(&d, opts, noise, previous.as_ref()).map(|r| (d, r))
                });
                match outcome {
                    Ok((d, (mut obs, s))) => {
                        previous = Some(s);
                        let resonance = resonance.map(|(m, l)| {
                            let (cols, bad) = resonance_columns(&d, m, l);
                            obs.flags.gvv_invalid = bad;
                            cols
                        });
                        LinePoint {
                            x,
                            b: d.b,
                            nu: d.nu,
                            omega: d.omega,
                            obs,
                            resonance,
                            error: None,
                        }
                    }
                    Err(e) => {
                        previous = None;
                        LinePoint {
                            x,
                            b: f64::NAN,
                            nu: f64::NAN,
                            omega: template.omega,
                            obs: PointObservables::failed(),
                            resonance: None,
                            error: Some(e.to_string()),
                        }
                    }
                }
            })
            .collect::<Vec<_>>()
    };
    let points = with_threads(opts.threads, run)?;
    Ok(LineResult {
        axis,
        template: *template,
        range: *range,
        points,
    })
}

/// Fast-drive scan over `Ω₁` at `b = kω + δ`, with RWA/GVV columns.
pub fn fastscan(
    template: &DriveConfig,
    m: i64,
    l: i64,
    delta: f64,
    range: &LinearRange,
    opts: &ScanOptions,
    noise: &NoiseModel,
) -> Result<LineResult> {
    let res = ResonanceIndex::new(m, l, template.n1, template.n2, delta)?;
    let pinned = template.with_b(res.bias(template.omega));
    sweep_line(&pinned, LineAxis::Omega1, range, Some((m, l)), opts, noise)
}

/// `Ω₁` values of the interior `T_φ` maxima along a fast-drive scan at detuning `delta`.
pub fn detect_t_phi_maxima(
    template: &DriveConfig,
    m: i64,
    l: i64,
    delta: f64,
    range: &LinearRange,
    opts: &ScanOptions,
    noise: &NoiseModel,
) -> Result<Vec<f64>> {
    let res = ResonanceIndex::new(m, l, template.n1, template.n2, delta)?;
    let pinned = template.with_b(res.bias(template.omega));
    let line = sweep_line(&pinned, LineAxis::Omega1, range, None, opts, noise)?;
    let t = line.column(|p| p.obs.t_phi);
    Ok(local_maxima(&t)
        .into_iter()
        .map(|i| line.points[i].x)
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaPoint {
    pub delta: f64,
    pub inv_delta: f64,
    pub b: f64,
    #[serde(flatten)]
    pub obs: PointObservables,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// `T_φ` against the detuning at fixed drive amplitudes; `b = kω + δ` for each `δ`.
/// Every point is solved from scratch, so the result does not depend on the order of `deltas`.
pub fn delta_scan(
    template: &DriveConfig,
    m: i64,
    l: i64,
    deltas: &[f64],
    opts: &ScanOptions,
    noise: &NoiseModel,
) -> Result<Vec<DeltaPoint>> {
    noise.validate()?;
    for &d in deltas {
        require_finite("delta", d)?;
        if d == 0.0 {
            return Err(invalid("delta", "values must be nonzero"));
        }
    }
    let run = || {
        deltas
            .par_iter()
            .map(|&delta| {
                let outcome =
                    ResonanceIndex::new(m, l, template.n1, template.n2, delta).and_then(|res| {
                        let d = template.with_b(res.bias(template.omega));
                        evaluate_point(&d, opts, noise, None).map(|(o, _)| (d.b, o))
                    });
                match outcome {
                    Ok((b, obs)) => DeltaPoint {
                        delta,
                        inv_delta: 1.0 / delta,
                        b,
                        obs,
                        error: None,
                    },
                    Err(e) => DeltaPoint {
                        delta,
                        inv_delta: 1.0 / delta,
                        b: f64::NAN,
                        obs: PointObservables::failed(),
                        error: Some(e.to_string()),
                    },
                }
            })
            .collect()
    };
    with_threads(opts.threads, run)
}

/// `count` values from `lo` to `hi`, evenly spaced in log scale (both positive).
pub fn log_spaced(lo: f64, hi: f64, count: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi > lo && lo.is_finite() && hi.is_finite()) || count < 2 {
        return Err(invalid("log range", "needs 0 < lo < hi and count >= 2"));
    }
    let (a, b) = (lo.log10(), hi.log10());
    let last = count - 1;
    Ok((0..count)
        .map(|i| {
            if i == 0 {
                lo
            } else if i == last {
                hi
            } else {
                10f64.powf(a + (b - a) * i as f64 / last as f64)
            }
        })
        .collect())
}

/// Indices of strict interior local maxima; NaN neighbours disqualify a point.
pub fn local_maxima(values: &[f64]) -> Vec<usize> {
    (1..values.len().saturating_sub(1))
        .filter(|&i| values[i] > values[i - 1] && values[i] > values[i + 1])
        .collect()
}

/// Indices of strict interior local minima.
pub fn local_minima(values: &[f64]) -> Vec<usize> {
    (1..values.len().saturating_sub(1))
        .filter(|&i| values[i] < values[i - 1] && values[i] < values[i + 1])
        .collect()
}

/// Grid location and values of a classified point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpotRef {
    pub i_nu: usize,
    pub i_b: usize,
    pub b: f64,
    pub nu: f64,
    pub omega: f64,
    pub dgap_db: f64,
    pub dgap_domega: f64,
    #[serde(with = "crate::serde_float")]
    pub t_phi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweetSpotReport {
    pub tol_dc: f64,
    pub tol_ac: f64,
    pub sour_threshold: f64,
    /// `|∂_bΔε| < tol_dc`.
    pub dc_sweet: Vec<SpotRef>,
    /// DC-sweet and `|∂_ΩΔε| < tol_ac`.
    pub doubly_sweet: Vec<SpotRef>,
    /// DC-sweet and `|∂_ΩΔε| ≥ sour_threshold`.
    pub sour: Vec<SpotRef>,
}

pub const DEFAULT_TOL_DC: f64 = 1e-4;
pub const DEFAULT_TOL_AC: f64 = 1e-3;
pub const DEFAULT_SOUR_THRESHOLD: f64 = 1e-1;

pub fn find_sweet_spots(
    result: &SweepResult,
    tol_dc: f64,
    tol_ac: f64,
    sour_threshold: f64,
) -> SweetSpotReport {
    let mut report = SweetSpotReport {
        tol_dc,
        tol_ac,
        sour_threshold,
        dc_sweet: Vec::new(),
        doubly_sweet: Vec::new(),
        sour: Vec::new(),
    };
    let nb = result.b_values.len();
    for (idx, p) in result.points.iter().enumerate() {
        if p.obs.flags.failed || p.obs.dgap_db.is_nan() || p.obs.dgap_db.abs() >= tol_dc {
            continue;
        }
        let spot = SpotRef {
            i_nu: idx / nb,
            i_b: idx % nb,
            b: p.b,
            nu: p.nu,
            omega: p.omega,
            dgap_db: p.obs.dgap_db,
            dgap_domega: p.obs.dgap_domega,
            t_phi: p.obs.t_phi,
        };
        report.dc_sweet.push(spot);
        let ac = p.obs.dgap_domega.abs();
        if ac < tol_ac {
            report.doubly_sweet.push(spot);
        } else if ac >= sour_threshold {
            report.sour.push(spot);
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn small_grid(omega_policy: OmegaPolicy) -> GridSpec {
        GridSpec {
            b_range: LinearRange::new(-0.2, 0.2, 5).unwrap(),
            nu_range: LinearRange::new(0.0, FRAC_PI_2, 4).unwrap(),
            omega_policy,
            template: DriveTemplate {
                w_q: 1.0,
                big_omega: 0.1,
                n1: 3,
                n2: 1,
            },
        }
    }

    #[test]
    fn linear_range_hits_endpoints() {
        let v = LinearRange::new(-1.0, 1.0, 101).unwrap().values();
        assert_eq!(v.len(), 101);
        assert_eq!(v[0], -1.0);
        assert_eq!(v[100], 1.0);
        assert_eq!(v[50], 0.0);
        assert!(LinearRange::new(1.0, 1.0, 3).is_err());
        assert!(LinearRange::new(0.0, 1.0, 1).is_err());
    }

    #[test]
    fn grid_shape_and_order() {
        let r = sweep_grid(
            &small_grid(OmegaPolicy::Fixed(1.0)),
            &ScanOptions::default(),
            &NoiseModel::default(),
        )
        .unwrap();
        assert_eq!(r.points.len(), 20);
        for (i, nu) in r.nu_values.iter().enumerate() {
            for (j, b) in r.b_values.iter().enumerate() {
                assert_eq!(r.get(i, j).b, *b);
                assert_eq!(r.get(i, j).nu, *nu);
            }
        }
        assert!(r.points.iter().all(|p| !p.obs.flags.failed));
    }

    #[test]
    fn grid_is_independent_of_worker_count() {
        let spec = small_grid(OmegaPolicy::Fixed(1.0));
        let noise = NoiseModel::default();
        let one = sweep_grid(
            &spec,
            &ScanOptions {
                threads: Some(1),
                ..Default::default()
            },
            &noise,
        )
        .unwrap();
        let three = sweep_grid(
            &spec,
            &ScanOptions {
                threads: Some(3),
                ..Default::default()
            },
            &noise,
        )
        .unwrap();
        assert_eq!(
            serde_json::to_string(&one).unwrap(),
            serde_json::to_string(&three).unwrap()
        );
    }

    #[test]
    fn static_sweet_spot_beats_biased_point() {
        let spec = GridSpec {
            b_range: LinearRange::new(0.0, 0.5, 2).unwrap(),
            nu_range: LinearRange::new(0.0, 0.1, 2).unwrap(),
            omega_policy: OmegaPolicy::Fixed(1.0),
            template: DriveTemplate {
                w_q: 1.0,
                big_omega: 0.0,
                n1: 3,
                n2: 1,
            },
        };
        let r = sweep_grid(&spec, &ScanOptions::default(), &NoiseModel::default()).unwrap();
        for i in 0..2 {
            assert!(r.get(i, 0).obs.t_phi > r.get(i, 1).obs.t_phi);
        }
    }

    #[test]
    fn per_point_optimal_frequency_is_recorded() {
        let r = sweep_grid(
            &small_grid(OmegaPolicy::PerPointOptimal),
            &ScanOptions::default(),
            &NoiseModel::default(),
        )
        .unwrap();
        for p in &r.points {
            assert_eq!(p.omega_star, Some(p.omega));
        }
    }

    #[test]
    fn failures_are_recorded_in_place() {
        let mut spec = small_grid(OmegaPolicy::Fixed(1.0));
        spec.template.n2 = 3;
        let r = sweep_grid(&spec, &ScanOptions::default(), &NoiseModel::default()).unwrap();
        // N1 = N2 is only valid at the endpoints ν = 0 and ν = π/2.
        assert!(!r.get(0, 0).obs.flags.failed);
        assert!(r.get(1, 0).obs.flags.failed);
        assert!(r.get(1, 0).error.is_some());
        assert!(!r.get(3, 2).obs.flags.failed);
    }

    #[test]
    fn classification_is_nested() {
        let r = sweep_grid(
            &small_grid(OmegaPolicy::Fixed(1.0)),
            &ScanOptions::default(),
            &NoiseModel::default(),
        )
        .unwrap();
        let loose = find_sweet_spots(&r, 1e-1, 1e-1, 1e-2);
        let tight = find_sweet_spots(&r, 1e-3, 1e-3, 1e-2);
        assert!(tight.dc_sweet.iter().all(|s| loose.dc_sweet.contains(s)));
        assert!(tight
            .doubly_sweet
            .iter()
            .all(|s| loose.doubly_sweet.contains(s)));
        for rep in [&loose, &tight] {
            assert!(rep.doubly_sweet.iter().all(|s| rep.dc_sweet.contains(s)));
            assert!(rep.sour.iter().all(|s| !rep.doubly_sweet.contains(s)));
        }
    }

    #[test]
    fn zero_sensitivity_grid_is_all_doubly_sweet() {
        let spec = small_grid(OmegaPolicy::Fixed(1.0));
        let mut r = sweep_grid(&spec, &ScanOptions::default(), &NoiseModel::default()).unwrap();
        for p in &mut r.points {
            p.obs.dgap_db = 0.0;
            p.obs.dgap_domega = 0.0;
        }
        let rep = find_sweet_spots(&r, DEFAULT_TOL_DC, DEFAULT_TOL_AC, DEFAULT_SOUR_THRESHOLD);
        assert_eq!(rep.doubly_sweet.len(), r.points.len());
        assert!(rep.sour.is_empty());
    }

    #[test]
    fn fast_line_has_narrow_sweet_spot_at_zero_bias() {
        let d = DriveConfig::new(1.0, 0.0, 0.1, 0.0, 3, 1, 1.0).unwrap();
        let range = LinearRange::new(-0.5, 0.5, 41).unwrap();
        let line = sweep_line(
            &d,
            LineAxis::B,
            &range,
            None,
            &ScanOptions::default(),
            &NoiseModel::default(),
        )
        .unwrap();
        let s = line.column(|p| p.obs.dgap_db.abs());
        let minima = local_minima(&s);
        assert_eq!(minima, vec![20]);
        assert!(s[20] < 1e-10);
    }

    #[test]
    fn fastscan_reports_analytic_columns() {
        let d = DriveConfig::from_tone_amplitudes(1.0, 0.0, 0.0, 1.0, 3, 1, 10.0).unwrap();
        let range = LinearRange::new(0.0, 30.0, 7).unwrap();
        let r = fastscan(
            &d,
            1,
            -2,
            0.01,
            &range,
            &ScanOptions::default(),
            &NoiseModel::default(),
        )
        .unwrap();
        for p in &r.points {
            let res = p.resonance.unwrap();
            assert!((p.b - 10.01).abs() < 1e-12);
            assert!(res.gap_gvv.is_finite() && res.gap_rwa.is_finite());
            assert!(!p.obs.flags.gvv_invalid);
        }
    }

    #[test]
    fn static_delta_scan_matches_closed_form() {
        // Ω = 0: g₀ = b/√(1 + b²) and the AC sum vanishes.
        let d = DriveConfig::new(1.0, 0.0, 0.0, 0.0, 3, 1, 10.0).unwrap();
        let noise = NoiseModel::default();
        let pts = delta_scan(&d, 0, 0, &[0.5, 0.1, 0.01], &ScanOptions::default(), &noise).unwrap();
        for p in pts {
            let g0 = p.b / (1.0 + p.b * p.b).sqrt();
            let want = 1.0 / (2.0 * noise.v_f * noise.ir_factor * g0);
            assert!((p.obs.t_phi - want).abs() < 1e-9 * want);
        }
        assert!(delta_scan(&d, 0, 0, &[0.0], &ScanOptions::default(), &noise).is_err());
    }

    #[test]
    fn extrema_helpers() {
        let v = [0.0, 1.0, 0.5, 0.5, 2.0, 1.0, f64::NAN, 3.0];
        assert_eq!(local_maxima(&v), vec![1, 4]);
        assert_eq!(local_minima(&[1.0, 0.0, 1.0, 1.0]), vec![1]);
        let l = log_spaced(1.0, 1e3, 4).unwrap();
        assert_eq!(l[0], 1.0);
        assert_eq!(l[3], 1e3);
        assert!((l[1] - 10.0).abs() < 1e-12);
        let _ = PI;
    }
}
