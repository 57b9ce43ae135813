//! Command-line front end.
//!
//! Every physical quantity is in units of `w_q`. Table commands write CSV or JSON
//! to `--output` (or stdout) and print a one-line summary; `gap`, `optimal-omega`
//! and `selftest` print their result directly.
//!
//! Exit codes: 0 on success, 1 on numerical failure, 2 on usage errors.

use std::collections::BTreeSet;
use std::f64::consts::FRAC_PI_2;
use std::fmt::Display;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::analytic::{bessel_j, optimal_base_frequency};
use crate::error::FloquetError;
use crate::floquet::{fourier_weights, propagator_oracle, solve, DriveConfig, TruncationConfig};
use crate::noise::NoiseModel;
use crate::sensitivity::verify_weight_identity;
use crate::sweep::{
    delta_scan, detect_t_phi_maxima, fastscan, find_sweet_spots, log_spaced, sweep_grid,
    sweep_line, DriveTemplate, GridSpec, LineAxis, LinePoint, LinearRange, OmegaPolicy,
    PointObservables, ScanOptions, DEFAULT_SOUR_THRESHOLD, DEFAULT_TOL_AC, DEFAULT_TOL_DC,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NUMERIC: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Fixed `sweep2d` CSV header.
pub const SWEEP2D_HEADER: [&str; 10] = [
    "b",
    "nu",
    "omega",
    "gap",
    "dgap_db",
    "dgap_dOmega",
    "gamma_phi",
    "t_phi",
    "omega_star",
    "flags",
];

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Numeric(FloquetError),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl From<FloquetError> for CliError {
    fn from(e: FloquetError) -> Self {
        match e {
            FloquetError::InvalidParameter { .. } | FloquetError::Config(_) => {
                CliError::Usage(e.to_string())
            }
            other => CliError::Numeric(other),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            _ => EXIT_NUMERIC,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(format!("unknown format {s:?} (expected csv or json)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolicyArg {
    Fixed,
    Optimal,
}

impl FromStr for PolicyArg {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "fixed" => Ok(PolicyArg::Fixed),
            "optimal" => Ok(PolicyArg::Optimal),
            _ => Err(format!(
                "unknown omega policy {s:?} (expected fixed or optimal)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AxisArg(pub LineAxis);

impl FromStr for AxisArg {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "b" => Ok(AxisArg(LineAxis::B)),
            "Omega" => Ok(AxisArg(LineAxis::BigOmega)),
            "Omega1" => Ok(AxisArg(LineAxis::Omega1)),
            _ => Err(format!("unknown axis {s:?} (expected b, Omega or Omega1)")),
        }
    }
}

/// Shared parameters. Unset values fall back to the config file, then to
/// per-command defaults.
#[derive(Debug, Clone, Default, Args)]
pub struct Params {
    /// Base drive frequency ω.
    #[arg(long)]
    pub omega: Option<f64>,
    /// DC bias.
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<f64>,
    /// Total AC strength Ω.
    #[arg(long = "Omega")]
    pub big_omega: Option<f64>,
    /// First-tone amplitude Ω₁ (fastscan, deltascan).
    #[arg(long = "Omega1")]
    pub omega1: Option<f64>,
    /// Second-tone amplitude Ω₂ (fastscan, deltascan).
    #[arg(long = "Omega2")]
    pub omega2: Option<f64>,
    /// Mixing angle ν.
    #[arg(long)]
    pub nu: Option<f64>,
    #[arg(long = "N1")]
    pub n1: Option<u32>,
    #[arg(long = "N2")]
    pub n2: Option<u32>,
    #[arg(long)]
    pub wq: Option<f64>,
    /// Harmonic cutoff; the default grows with the drive.
    #[arg(long = "n-max")]
    pub n_max: Option<usize>,
    #[arg(long = "k-max")]
    pub k_max: Option<usize>,
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// csv or json.
    #[arg(long)]
    pub format: Option<Format>,
    /// `key = value` file; flags on the command line take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Sweet-spot report path (sweep2d).
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[arg(long = "b-min", allow_hyphen_values = true)]
    pub b_min: Option<f64>,
    #[arg(long = "b-max", allow_hyphen_values = true)]
    pub b_max: Option<f64>,
    #[arg(long = "b-count")]
    pub b_count: Option<usize>,
    #[arg(long = "nu-min")]
    pub nu_min: Option<f64>,
    #[arg(long = "nu-max")]
    pub nu_max: Option<f64>,
    #[arg(long = "nu-count")]
    pub nu_count: Option<usize>,
    /// fixed or optimal.
    #[arg(long = "omega-policy")]
    pub omega_policy: Option<PolicyArg>,
    /// b, Omega or Omega1.
    #[arg(long)]
    pub axis: Option<AxisArg>,
    #[arg(long = "x-min", allow_hyphen_values = true)]
    pub x_min: Option<f64>,
    #[arg(long = "x-max", allow_hyphen_values = true)]
    pub x_max: Option<f64>,
    #[arg(long)]
    pub count: Option<usize>,
    /// Photon number of tone 1 in `b = (m N1 + l N2) ω + δ`.
    #[arg(long, allow_hyphen_values = true)]
    pub m: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    pub l: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    pub delta: Option<f64>,
    #[arg(long = "delta-min")]
    pub delta_min: Option<f64>,
    #[arg(long = "delta-max")]
    pub delta_max: Option<f64>,
    #[arg(long = "delta-count")]
    pub delta_count: Option<usize>,
    #[arg(long)]
    pub vf: Option<f64>,
    #[arg(long)]
    pub vd: Option<f64>,
    #[arg(long = "ir-factor")]
    pub ir_factor: Option<f64>,
    #[arg(long = "temp-ratio")]
    pub temp_ratio: Option<f64>,
    #[arg(long = "tol-dc")]
    pub tol_dc: Option<f64>,
    #[arg(long = "tol-ac")]
    pub tol_ac: Option<f64>,
    #[arg(long = "sour")]
    pub sour: Option<f64>,
    /// Propagator steps per period (selftest).
    #[arg(long)]
    pub steps: Option<usize>,
}

fn fill<T: FromStr>(slot: &mut Option<T>, key: &str, raw: &str) -> CliResult<()>
where
    T::Err: Display,
{
    if slot.is_none() {
        let v = raw
            .parse()
            .map_err(|e| CliError::Usage(format!("config key {key}: {e}")))?;
        *slot = Some(v);
    }
    Ok(())
}

impl Params {
    /// Fills unset fields from `key = value` lines. Blank lines and `#` comments are skipped.
    pub fn merge_config_text(&mut self, text: &str) -> CliResult<()> {
        let mut seen = BTreeSet::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Usage(format!("config line {}: expected key = value", lineno + 1))
            })?;
            let key = key.trim().replace('_', "-");
            let value = value.trim();
            if !seen.insert(key.clone()) {
                return Err(CliError::Usage(format!("config key {key} given twice")));
            }
            self.merge_key(&key, value)?;
        }
        Ok(())
    }

    fn merge_key(&mut self, key: &str, v: &str) -> CliResult<()> {
        match key {
            "omega" => fill(&mut self.omega, key, v),
            "b" => fill(&mut self.b, key, v),
            "Omega" => fill(&mut self.big_omega, key, v),
            "Omega1" => fill(&mut self.omega1, key, v),
            "Omega2" => fill(&mut self.omega2, key, v),
            "nu" => fill(&mut self.nu, key, v),
            "N1" => fill(&mut self.n1, key, v),
            "N2" => fill(&mut self.n2, key, v),
            "wq" => fill(&mut self.wq, key, v),
            "n-max" => fill(&mut self.n_max, key, v),
            "k-max" => fill(&mut self.k_max, key, v),
            "threads" => fill(&mut self.threads, key, v),
            "output" => fill(&mut self.output, key, v),
            "format" => fill(&mut self.format, key, v),
            "report" => fill(&mut self.report, key, v),
            "b-min" => fill(&mut self.b_min, key, v),
            "b-max" => fill(&mut self.b_max, key, v),
            "b-count" => fill(&mut self.b_count, key, v),
            "nu-min" => fill(&mut self.nu_min, key, v),
            "nu-max" => fill(&mut self.nu_max, key, v),
            "nu-count" => fill(&mut self.nu_count, key, v),
            "omega-policy" => fill(&mut self.omega_policy, key, v),
            "axis" => fill(&mut self.axis, key, v),
            "x-min" => fill(&mut self.x_min, key, v),
            "x-max" => fill(&mut self.x_max, key, v),
            "count" => fill(&mut self.count, key, v),
            "m" => fill(&mut self.m, key, v),
            "l" => fill(&mut self.l, key, v),
            "delta" => fill(&mut self.delta, key, v),
            "delta-min" => fill(&mut self.delta_min, key, v),
            "delta-max" => fill(&mut self.delta_max, key, v),
            "delta-count" => fill(&mut self.delta_count, key, v),
            "vf" => fill(&mut self.vf, key, v),
            "vd" => fill(&mut self.vd, key, v),
            "ir-factor" => fill(&mut self.ir_factor, key, v),
            "temp-ratio" => fill(&mut self.temp_ratio, key, v),
            "tol-dc" => fill(&mut self.tol_dc, key, v),
            "tol-ac" => fill(&mut self.tol_ac, key, v),
            "sour" => fill(&mut self.sour, key, v),
            "steps" => fill(&mut self.steps, key, v),
            _ => Err(CliError::Usage(format!("unknown config key {key:?}"))),
        }
    }

    fn resolve(mut self) -> CliResult<Self> {
        if let Some(path) = self.config.clone() {
            let text = std::fs::read_to_string(&path).map_err(|e| {
                CliError::Usage(format!("cannot read config {}: {e}", path.display()))
            })?;
            self.merge_config_text(&text)?;
        }
        Ok(self)
    }

    fn noise(&self) -> CliResult<NoiseModel> {
        let d = NoiseModel::default();
        let model = NoiseModel {
            v_f: self.vf.unwrap_or(d.v_f),
            v_d: self.vd.unwrap_or(d.v_d),
            ir_factor: self.ir_factor.unwrap_or(d.ir_factor),
            temp_ratio: self.temp_ratio.unwrap_or(d.temp_ratio),
            w_q: self.wq.unwrap_or(1.0),
        };
        model.validate()?;
        Ok(model)
    }

    fn drive(&self, defaults: &Defaults) -> CliResult<DriveConfig> {
        Ok(DriveConfig::new(
            self.wq.unwrap_or(1.0),
            self.b.unwrap_or(defaults.b),
            self.big_omega.unwrap_or(defaults.big_omega),
            self.nu.unwrap_or(defaults.nu),
            self.n1.unwrap_or(3),
            self.n2.unwrap_or(1),
            self.omega.unwrap_or(defaults.omega),
        )?)
    }

    /// Drive specified through `Ω₁`, `Ω₂` (fast-drive commands).
    fn tone_drive(&self, defaults: &Defaults) -> CliResult<DriveConfig> {
        if self.big_omega.is_some() || self.nu.is_some() {
            return Err(CliError::Usage(
                "this command takes --Omega1/--Omega2, not --Omega/--nu".into(),
            ));
        }
        Ok(DriveConfig::from_tone_amplitudes(
            self.wq.unwrap_or(1.0),
            self.b.unwrap_or(defaults.b),
            self.omega1.unwrap_or(0.0),
            self.omega2.unwrap_or(1.0),
            self.n1.unwrap_or(3),
            self.n2.unwrap_or(1),
            self.omega.unwrap_or(defaults.omega),
        )?)
    }

    fn trunc_for(&self, drive: &DriveConfig) -> CliResult<TruncationConfig> {
        let auto = TruncationConfig::for_drive(drive);
        let t = TruncationConfig::new(
            self.n_max.unwrap_or(auto.n_max),
            self.k_max.unwrap_or(auto.k_max),
        );
        t.validate(drive)?;
        Ok(t)
    }

    fn scan_options(&self, template: &DriveConfig) -> CliResult<ScanOptions> {
        let trunc = if self.n_max.is_some() || self.k_max.is_some() {
            Some(self.trunc_for(template)?)
        } else {
            None
        };
        Ok(ScanOptions {
            trunc,
            threads: self.threads,
        })
    }

    fn format(&self) -> Format {
        self.format.unwrap_or(Format::Csv)
    }
}

struct Defaults {
    b: f64,
    big_omega: f64,
    nu: f64,
    omega: f64,
}

const POINT_DEFAULTS: Defaults = Defaults {
    b: 0.0,
    big_omega: 0.0,
    nu: 0.0,
    omega: 1.0,
};

const GRID_DEFAULTS: Defaults = Defaults {
    b: 0.0,
    big_omega: 0.1,
    nu: 0.0,
    omega: 1.0,
};

const FAST_DEFAULTS: Defaults = Defaults {
    b: 0.0,
    big_omega: 0.0,
    nu: 0.0,
    omega: 10.0,
};

#[derive(Debug, Parser)]
#[command(
    name = "floquet",
    version,
    about = "Bichromatic Floquet qubit quasienergies, sensitivities and dephasing"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Quasienergy gap at one drive point.
    Gap(Params),
    /// Fourier weights g_k at one drive point.
    Weights(Params),
    /// 1D scan along b, Omega or Omega1.
    Line(Params),
    /// 2D (b, nu) grid with sweet-spot classification.
    Sweep2d(Params),
    /// Fast-drive Omega1 scan with RWA and GVV gaps.
    Fastscan(Params),
    /// T_phi against inverse detuning at T_phi maxima of the fast-drive scan.
    Deltascan(Params),
    /// Self-consistent base frequency omega* = Theta.
    OptimalOmega(Params),
    /// Runs the built-in consistency checks.
    Selftest(Params),
}

/// Result of one subcommand before it is written out.
struct Outcome {
    summary: String,
    table: Option<Table>,
    json: serde_json::Value,
}

struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

/// Float text for CSV cells: shortest round-trip form, `inf`/`-inf`/`nan` otherwise.
pub fn format_float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:?}")
    } else {
        crate::serde_float::token(v).to_string()
    }
}

fn obs_cells(o: &PointObservables) -> Vec<String> {
    vec![
        format_float(o.gap),
        format_float(o.dgap_db),
        format_float(o.dgap_domega),
        format_float(o.gamma_phi),
        format_float(o.t_phi),
    ]
}

const OBS_COLUMNS: [&str; 5] = ["gap", "dgap_db", "dgap_dOmega", "gamma_phi", "t_phi"];

fn header(cols: &[&str]) -> Vec<String> {
    cols.iter().map(|s| s.to_string()).collect()
}

fn to_json<T: Serialize>(v: &T) -> CliResult<serde_json::Value> {
    Ok(serde_json::to_value(v)?)
}

fn cmd_gap(p: &Params) -> CliResult<Outcome> {
    let drive = p.drive(&POINT_DEFAULTS)?;
    let trunc = p.trunc_for(&drive)?;
    let spec = solve(&drive, &trunc)?;
    let gap = spec.gap();
    let json = serde_json::json!({
        "drive": drive,
        "n_max": trunc.n_max,
        "gap": gap,
        "gap_distance": spec.gap_distance(),
        "eps_plus": spec.eps_plus,
        "eps_minus": spec.eps_minus,
        "flags": spec.flags,
    });
    Ok(Outcome {
        summary: format!("gap {gap}"),
        table: Some(Table {
            header: header(&["gap", "gap_distance", "eps_plus", "eps_minus"]),
            rows: vec![vec![
                format_float(gap),
                format_float(spec.gap_distance()),
                format_float(spec.eps_plus),
                format_float(spec.eps_minus),
            ]],
        }),
        json,
    })
}

fn cmd_weights(p: &Params) -> CliResult<Outcome> {
    let drive = p.drive(&POINT_DEFAULTS)?;
    let trunc = p.trunc_for(&drive)?;
    let spec = solve(&drive, &trunc)?;
    let w = fourier_weights(&spec, trunc.k_max)?;
    let rows = w
        .iter()
        .map(|(k, g)| vec![k.to_string(), format_float(g)])
        .collect();
    let pairs: Vec<_> = w
        .iter()
        .map(|(k, g)| serde_json::json!({"k": k, "g": g}))
        .collect();
    Ok(Outcome {
        summary: format!("g0 {} (k_max {})", w.g0(), w.k_max()),
        table: Some(Table {
            header: header(&["k", "g_k"]),
            rows,
        }),
        json: serde_json::json!({"drive": drive, "k_max": w.k_max(), "weights": pairs}),
    })
}

fn line_table(axis: LineAxis, points: &[LinePoint], with_resonance: bool) -> Table {
    let mut cols = vec![axis.column_name()];
    for c in ["b", "nu", "omega"] {
        if c != axis.column_name() {
            cols.push(c);
        }
    }
    cols.extend(["gap", "gap_distance"]);
    if with_resonance {
        cols.extend(["gap_rwa", "gap_gvv", "chi"]);
    }
    cols.extend(&OBS_COLUMNS[1..]);
    cols.push("flags");
    let rows = points
        .iter()
        .map(|pt| {
            let mut r = vec![format_float(pt.x)];
            for (name, v) in [("b", pt.b), ("nu", pt.nu), ("omega", pt.omega)] {
                if name != axis.column_name() {
                    r.push(format_float(v));
                }
            }
            r.push(format_float(pt.obs.gap));
            r.push(format_float(pt.obs.gap_distance));
            if with_resonance {
                let (a, b, c) = pt.resonance.map_or((f64::NAN, f64::NAN, f64::NAN), |c| {
                    (c.gap_rwa, c.gap_gvv, c.chi)
                });
                r.extend([format_float(a), format_float(b), format_float(c)]);
            }
            r.extend(obs_cells(&pt.obs).into_iter().skip(1));
            r.push(pt.obs.flags.to_field());
            r
        })
        .collect();
    Table {
        header: header(&cols),
        rows,
    }
}

fn failed_count<'a>(obs: impl Iterator<Item = &'a PointObservables>) -> usize {
    obs.filter(|o| o.flags.failed).count()
}

fn cmd_line(p: &Params) -> CliResult<Outcome> {
    let axis = p.axis.map_or(LineAxis::B, |a| a.0);
    let drive = p.drive(&GRID_DEFAULTS)?;
    let (lo, hi) = match axis {
        LineAxis::B => (-1.0, 1.0),
        _ => (0.0, 1.0),
    };
    let range = LinearRange::new(
        p.x_min.unwrap_or(lo),
        p.x_max.unwrap_or(hi),
        p.count.unwrap_or(201),
    )?;
    let line = sweep_line(
        &drive,
        axis,
        &range,
        None,
        &p.scan_options(&drive)?,
        &p.noise()?,
    )?;
    let failed = failed_count(line.points.iter().map(|q| &q.obs));
    Ok(Outcome {
        summary: format!(
            "line {} points along {} ({failed} failed)",
            line.points.len(),
            axis.column_name()
        ),
        table: Some(line_table(axis, &line.points, false)),
        json: to_json(&line)?,
    })
}

fn cmd_fastscan(p: &Params) -> CliResult<Outcome> {
    if p.omega1.is_some() {
        return Err(CliError::Usage(
            "fastscan scans Omega1; use --x-min/--x-max".into(),
        ));
    }
    let drive = p.tone_drive(&FAST_DEFAULTS)?;
    let range = LinearRange::new(
        p.x_min.unwrap_or(0.0),
        p.x_max.unwrap_or(3.0 * drive.omega),
        p.count.unwrap_or(201),
    )?;
    let (m, l, delta) = (p.m.unwrap_or(1), p.l.unwrap_or(-2), p.delta.unwrap_or(0.01));
    let line = fastscan(
        &drive,
        m,
        l,
        delta,
        &range,
        &p.scan_options(&drive)?,
        &p.noise()?,
    )?;
    let better = line
        .points
        .iter()
        .filter_map(|q| {
            let r = q.resonance?;
            Some((r.gap_gvv - q.obs.gap_distance).abs() < (r.gap_rwa - q.obs.gap_distance).abs())
        })
        .filter(|&b| b)
        .count();
    Ok(Outcome {
        summary: format!(
            "fastscan {} points, GVV closer than RWA at {better}",
            line.points.len()
        ),
        table: Some(line_table(LineAxis::Omega1, &line.points, true)),
        json: to_json(&line)?,
    })
}

fn cmd_deltascan(p: &Params) -> CliResult<Outcome> {
    let drive = p.tone_drive(&FAST_DEFAULTS)?;
    let (m, l) = (p.m.unwrap_or(1), p.l.unwrap_or(-2));
    let opts = p.scan_options(&drive)?;
    let noise = p.noise()?;
    let amplitudes = match p.omega1 {
        Some(a) => vec![a],
        None => {
            let range = LinearRange::new(
                p.x_min.unwrap_or(0.0),
                p.x_max.unwrap_or(15.0 * drive.omega),
                p.count.unwrap_or(151),
            )?;
            detect_t_phi_maxima(&drive, m, l, p.delta.unwrap_or(0.01), &range, &opts, &noise)?
        }
    };
    let deltas = log_spaced(
        p.delta_min.unwrap_or(1e-7),
        p.delta_max.unwrap_or(1.0),
        p.delta_count.unwrap_or(29),
    )?;
    let (_, omega2) = drive.tone_amplitudes();
    let mut rows = Vec::new();
    let mut scans = Vec::new();
    for &a in &amplitudes {
        let d = DriveConfig::from_tone_amplitudes(
            drive.w_q,
            drive.b,
            a,
            omega2,
            drive.n1,
            drive.n2,
            drive.omega,
        )?;
        let pts = delta_scan(&d, m, l, &deltas, &opts, &noise)?;
        for q in &pts {
            let mut r = vec![
                format_float(a),
                format_float(q.inv_delta),
                format_float(q.delta),
                format_float(q.b),
            ];
            r.extend(obs_cells(&q.obs));
            r.push(q.obs.flags.to_field());
            rows.push(r);
        }
        scans.push(serde_json::json!({"omega1": a, "points": pts}));
    }
    let mut cols = vec!["Omega1", "inv_delta", "delta", "b"];
    cols.extend(OBS_COLUMNS);
    cols.push("flags");
    Ok(Outcome {
        summary: format!(
            "deltascan {} amplitude(s) x {} detunings",
            amplitudes.len(),
            deltas.len()
        ),
        table: Some(Table {
            header: header(&cols),
            rows,
        }),
        json: serde_json::json!({"m": m, "l": l, "scans": scans}),
    })
}

fn cmd_sweep2d(p: &Params) -> CliResult<Outcome> {
    let template = p.drive(&GRID_DEFAULTS)?;
    let omega_policy = match p.omega_policy.unwrap_or(PolicyArg::Fixed) {
        PolicyArg::Fixed => OmegaPolicy::Fixed(template.omega),
        PolicyArg::Optimal => OmegaPolicy::PerPointOptimal,
    };
    let spec = GridSpec {
        b_range: LinearRange::new(
            p.b_min.unwrap_or(-1.0),
            p.b_max.unwrap_or(1.0),
            p.b_count.unwrap_or(201),
        )?,
        nu_range: LinearRange::new(
            p.nu_min.unwrap_or(0.0),
            p.nu_max.unwrap_or(FRAC_PI_2),
            p.nu_count.unwrap_or(201),
        )?,
        omega_policy,
        template: DriveTemplate {
            w_q: template.w_q,
            big_omega: template.big_omega,
            n1: template.n1,
            n2: template.n2,
        },
    };
    let result = sweep_grid(&spec, &p.scan_options(&template)?, &p.noise()?)?;
    let report = find_sweet_spots(
        &result,
        p.tol_dc.unwrap_or(DEFAULT_TOL_DC),
        p.tol_ac.unwrap_or(DEFAULT_TOL_AC),
        p.sour.unwrap_or(DEFAULT_SOUR_THRESHOLD),
    );
    if let Some(path) = &p.report {
        write_file(path, serde_json::to_string_pretty(&report)?.as_bytes())?;
    }
    let rows = result
        .points
        .iter()
        .map(|q| {
            let mut r = vec![format_float(q.b), format_float(q.nu), format_float(q.omega)];
            r.extend(obs_cells(&q.obs));
            r.push(q.omega_star.map(format_float).unwrap_or_default());
            r.push(q.obs.flags.to_field());
            r
        })
        .collect();
    let best = result.max_t_phi().map_or_else(
        || "none".to_string(),
        |q| format!("{} at b={} nu={}", q.obs.t_phi, q.b, q.nu),
    );
    Ok(Outcome {
        summary: format!(
            "sweep2d {}x{}: max t_phi {best}; dc_sweet {} doubly_sweet {} sour {} failed {}",
            result.nu_values.len(),
            result.b_values.len(),
            report.dc_sweet.len(),
            report.doubly_sweet.len(),
            report.sour.len(),
            failed_count(result.points.iter().map(|q| &q.obs)),
        ),
        table: Some(Table {
            header: header(&SWEEP2D_HEADER),
            rows,
        }),
        json: to_json(&result)?,
    })
}

fn cmd_optimal_omega(p: &Params) -> CliResult<Outcome> {
    let drive = p.drive(&GRID_DEFAULTS)?;
    let r = optimal_base_frequency(&drive)?;
    Ok(Outcome {
        summary: format!("omega_star {}", r.omega_star),
        table: Some(Table {
            header: header(&["b", "nu", "Omega", "omega_star", "residual", "iterations"]),
            rows: vec![vec![
                format_float(drive.b),
                format_float(drive.nu),
                format_float(drive.big_omega),
                format_float(r.omega_star),
                format_float(r.residual),
                r.iterations.to_string(),
            ]],
        }),
        json: to_json(&r)?,
    })
}

#[derive(Debug, Clone, Serialize)]
struct Check {
    name: String,
    passed: bool,
    detail: String,
}

fn selftest_checks(p: &Params) -> CliResult<Vec<Check>> {
    let mut checks = Vec::new();
    let steps = p.steps.unwrap_or(1 << 14);

    let mut worst: f64 = 0.0;
    let mut passed = true;
    for &b in &[-0.6, -0.1, 0.3, 0.8] {
        for &nu in &[0.2, 0.7, 1.2] {
            let d = DriveConfig::new(1.0, b, 0.1, nu, 3, 1, 1.0)?;
            let r = verify_weight_identity(&d, &TruncationConfig::for_drive(&d), 1e-4)?;
            let scale = r.g0.abs().max(1e-4);
            worst = worst.max(r.residual / scale);
            passed &= r.residual <= 1e-4 * r.g0.abs() + 1e-8;
        }
    }
    checks.push(Check {
        name: "weight identity".into(),
        passed,
        detail: format!("worst relative residual {worst:e}"),
    });

    let mut worst: f64 = 0.0;
    for d in [
        DriveConfig::new(1.0, 0.3, 0.8, 0.4, 3, 1, 1.0)?,
        DriveConfig::new(1.0, -0.7, 0.5, 1.1, 2, 1, 2.5)?,
        DriveConfig::new(1.0, 0.1, 1.0, 0.0, 1, 2, 0.7)?,
    ] {
        let exact = solve(&d, &TruncationConfig::for_drive(&d))?;
        let oracle = propagator_oracle(&d, steps)?;
        worst = worst.max((exact.gap_distance() - oracle.gap_distance()).abs());
    }
    checks.push(Check {
        name: "propagator oracle".into(),
        passed: worst < 1e-6,
        detail: format!("max gap deviation {worst:e} with {steps} steps"),
    });

    let j = bessel_j(0, 1.0)?;
    let err = (j - 0.765_197_686_557_966_6).abs();
    checks.push(Check {
        name: "bessel".into(),
        passed: err < 1e-14,
        detail: format!("J0(1) error {err:e}"),
    });
    Ok(checks)
}

fn cmd_selftest(p: &Params, out: &mut dyn Write) -> CliResult<(Outcome, bool)> {
    let checks = selftest_checks(p)?;
    for c in &checks {
        writeln!(
            out,
            "{} {}: {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.detail
        )?;
    }
    let ok = checks.iter().all(|c| c.passed);
    let summary = format!(
        "selftest {}: {}/{} checks passed",
        if ok { "ok" } else { "failed" },
        checks.iter().filter(|c| c.passed).count(),
        checks.len()
    );
    Ok((
        Outcome {
            summary,
            table: None,
            json: to_json(&checks)?,
        },
        ok,
    ))
}

fn write_file(path: &Path, bytes: &[u8]) -> CliResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, bytes)?;
    Ok(())
}

fn render(outcome: &Outcome, format: Format) -> CliResult<Vec<u8>> {
    match (format, &outcome.table) {
        (Format::Csv, Some(t)) => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&t.header)?;
            for r in &t.rows {
                w.write_record(r)?;
            }
            w.into_inner().map_err(|e| CliError::Io(e.into_error()))
        }
        _ => {
            let mut s = serde_json::to_vec_pretty(&outcome.json)?;
            s.push(b'\n');
            Ok(s)
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<i32> {
    let (params, scalar) = match &command {
        Command::Gap(p) | Command::OptimalOmega(p) | Command::Selftest(p) => (p.clone(), true),
        Command::Weights(p)
        | Command::Line(p)
        | Command::Sweep2d(p)
        | Command::Fastscan(p)
        | Command::Deltascan(p) => (p.clone(), false),
    };
    let params = params.resolve()?;
    let mut code = EXIT_OK;
    let outcome = match command {
        Command::Gap(_) => cmd_gap(&params)?,
        Command::Weights(_) => cmd_weights(&params)?,
        Command::Line(_) => cmd_line(&params)?,
        Command::Sweep2d(_) => cmd_sweep2d(&params)?,
        Command::Fastscan(_) => cmd_fastscan(&params)?,
        Command::Deltascan(_) => cmd_deltascan(&params)?,
        Command::OptimalOmega(_) => cmd_optimal_omega(&params)?,
        Command::Selftest(_) => {
            let (o, ok) = cmd_selftest(&params, out)?;
            if !ok {
                code = EXIT_NUMERIC;
            }
            o
        }
    };
    let format = params.format();
    match &params.output {
        Some(path) => {
            write_file(path, &render(&outcome, format)?)?;
            writeln!(out, "{}", outcome.summary)?;
        }
        None if scalar => writeln!(out, "{}", outcome.summary)?,
        None => {
            out.write_all(&render(&outcome, format)?)?;
            writeln!(err, "{}", outcome.summary)?;
        }
    }
    Ok(code)
}

/// Runs the command line `argv` (program name first) against the given streams.
pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

/// Runs with the process's stdout and stderr.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}
