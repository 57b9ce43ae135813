use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::drive::DriveConfig;
use super::spectrum::fold;
use crate::error::{invalid, FloquetError, Result};

/// Minimum number of steps per period.
pub const MIN_STEPS: usize = 1 << 10;
/// Largest tolerated `max |U†U − 1|`.
pub const UNITARITY_LIMIT: f64 = 1e-8;

type Mat2 = [[Complex64; 2]; 2];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

fn mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut c = [[ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    c
}

/// `exp(-i τ (hx σx + hy σy + hz σz))`.
fn su2_exp(tau: f64, hx: f64, hy: f64, hz: f64) -> Mat2 {
    let r = (hx * hx + hy * hy + hz * hz).sqrt();
    if r == 0.0 {
        return [[ONE, ZERO], [ZERO, ONE]];
    }
    let (s, c) = (tau * r).sin_cos();
    let (nx, ny, nz) = (hx / r, hy / r, hz / r);
    // c·1 − i s (n·σ)
    [
        [Complex64::new(c, -s * nz), Complex64::new(-s * ny, -s * nx)],
        [Complex64::new(s * ny, -s * nx), Complex64::new(c, s * nz)],
    ]
}

/// One-period propagator and its spectral data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropagatorResult {
    pub steps_per_period: usize,
    /// `max |(U†U − 1)_{ij}|`.
    pub unitarity_defect: f64,
    /// `θ` with `U|φ⟩ = e^{-iθ}|φ⟩`, in `(-π, π]`.
    pub eigenphases: [f64; 2],
    /// `θ/T` folded into `[-ω/2, ω/2)`.
    pub quasienergies: [f64; 2],
    pub omega: f64,
}

impl PropagatorResult {
    /// Distance between the two quasienergies on the Brillouin circle, in `[0, ω/2]`.
    pub fn gap_distance(&self) -> f64 {
        let x = (self.quasienergies[0] - self.quasienergies[1]).rem_euclid(self.omega);
        x.min(self.omega - x)
    }
}

/// Time-ordered product of fourth-order Magnus steps (two Gauss nodes each)
/// over `T = 2π/ω`.
pub fn one_period_propagator(
    drive: &DriveConfig,
    steps_per_period: usize,
) -> Result<[[Complex64; 2]; 2]> {
    drive.validate()?;
    if steps_per_period < MIN_STEPS {
        return Err(invalid(
            "steps_per_period",
            format!("must be at least {MIN_STEPS}"),
        ));
    }
    let period = drive.period();
    let h = period / steps_per_period as f64;
    let offset = 3f64.sqrt() / 6.0;
    let hz = -0.5 * drive.w_q;
    let commutator_scale = 3f64.sqrt() * h / 6.0;

    let mut u: Mat2 = [[ONE, ZERO], [ZERO, ONE]];
    for step in 0..steps_per_period {
        let t0 = step as f64 * h;
        let hx1 = 0.5 * drive.drive_at(t0 + (0.5 - offset) * h);
        let hx2 = 0.5 * drive.drive_at(t0 + (0.5 + offset) * h);
        // i[H1, H2] = 2 (hx1 hz − hz hx2) σy for a constant σz part.
        let hy = commutator_scale * hz * (hx1 - hx2);
        let step_u = su2_exp(h, 0.5 * (hx1 + hx2), hy, hz);
        u = mul(&step_u, &u);
    }
    Ok(u)
}

/// Independent quasienergy route: eigenphases of the one-period propagator.
pub fn propagator_oracle(drive: &DriveConfig, steps_per_period: usize) -> Result<PropagatorResult> {
    let u = one_period_propagator(drive, steps_per_period)?;

    let mut defect = 0.0f64;
    for i in 0..2 {
        for j in 0..2 {
            let g = u[0][i].conj() * u[0][j] + u[1][i].conj() * u[1][j];
            let target = if i == j { ONE } else { ZERO };
            defect = defect.max((g - target).norm());
        }
    }
    if defect > UNITARITY_LIMIT {
        return Err(FloquetError::StepSize {
            defect,
            limit: UNITARITY_LIMIT,
        });
    }

    let tr = u[0][0] + u[1][1];
    let det = u[0][0] * u[1][1] - u[0][1] * u[1][0];
    let disc = (tr * tr - 4.0 * det).sqrt();
    let lambdas = [(tr + disc) * 0.5, (tr - disc) * 0.5];
    let period = drive.period();
    let eigenphases = lambdas.map(|l| {
        let theta = -l.arg();
        if theta <= -PI {
            theta + 2.0 * PI
        } else {
            theta
        }
    });
    let quasienergies = eigenphases.map(|theta| fold(theta / period, drive.omega));
    Ok(PropagatorResult {
        steps_per_period,
        unitarity_defect: defect,
        eigenphases,
        quasienergies,
        omega: drive.omega,
    })
}
