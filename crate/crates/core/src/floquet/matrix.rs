use nalgebra::DMatrix;

use super::drive::{DriveConfig, TruncationConfig};
use crate::error::Result;

/// Qubit basis label inside a harmonic block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Level {
    G = 0,
    E = 1,
}

/// Truncated Floquet Hamiltonian in the `|n, α⟩ = e^{inωt}|α⟩` basis.
///
/// Row/column `2(n + n_max) + α` holds harmonic `n` and qubit state `α`.
#[derive(Debug, Clone)]
pub struct ExtendedMatrix {
    pub n_max: usize,
    pub entries: DMatrix<f64>,
}

impl ExtendedMatrix {
    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn index(&self, n: i64, level: Level) -> usize {
        block_index(self.n_max, n, level)
    }

    pub fn entry(&self, n: i64, a: Level, m: i64, b: Level) -> f64 {
        self.entries[(self.index(n, a), self.index(m, b))]
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.entries.norm()
    }
}

pub(crate) fn block_index(n_max: usize, n: i64, level: Level) -> usize {
    debug_assert!(n.unsigned_abs() as usize <= n_max);
    2 * (n + n_max as i64) as usize + level as usize
}

/// Assembles `Σ_n |n⟩⟨n| ⊗ (-(w_q/2)σz + (b/2)σx + nω)` plus the tone couplings
/// `(Ω/4) cos ν (|n±N1⟩⟨n|) ⊗ σx` and `(Ω/4) sin ν (|n±N2⟩⟨n|) ⊗ σx`.
pub fn build_extended_hamiltonian(
    drive: &DriveConfig,
    trunc: &TruncationConfig,
) -> Result<ExtendedMatrix> {
    drive.validate()?;
    trunc.validate(drive)?;

    let n_max = trunc.n_max;
    let nm = n_max as i64;
    let dim = trunc.dim();
    let mut h = DMatrix::<f64>::zeros(dim, dim);

    let (a1, a2) = drive.tone_amplitudes();
    let tones = [(drive.n1 as i64, 0.25 * a1), (drive.n2 as i64, 0.25 * a2)];

    for n in -nm..=nm {
        let g = block_index(n_max, n, Level::G);
        let e = g + 1;
        let shift = n as f64 * drive.omega;
        h[(g, g)] = -0.5 * drive.w_q + shift;
        h[(e, e)] = 0.5 * drive.w_q + shift;
        h[(g, e)] = 0.5 * drive.b;
        h[(e, g)] = 0.5 * drive.b;

        for &(offset, coupling) in &tones {
            if coupling == 0.0 {
                continue;
            }
            let m = n + offset;
            if m > nm {
                continue;
            }
            let mg = block_index(n_max, m, Level::G);
            let me = mg + 1;
            // σx couples g ↔ e between the two harmonic blocks.
            for (r, c) in [(g, me), (e, mg)] {
                h[(r, c)] += coupling;
                h[(c, r)] += coupling;
            }
        }
    }

    Ok(ExtendedMatrix { n_max, entries: h })
}
