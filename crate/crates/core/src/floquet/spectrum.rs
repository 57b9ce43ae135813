use std::f64::consts::FRAC_1_SQRT_2;

use serde::{Deserialize, Serialize};

use super::drive::{DriveConfig, TruncationConfig};
use super::eigen::{diagonalize_symmetric, Eigenpairs};
use super::matrix::{block_index, build_extended_hamiltonian, Level};
use crate::error::{invalid, FloquetError, Result};

/// Candidate scores closer than this are treated as a tie.
pub const TIE_TOLERANCE: f64 = 1e-6;
/// Warm-start overlaps below this value mean the branch was lost.
pub const TRACKING_THRESHOLD: f64 = 0.5;
/// Folded gaps below this value are flagged as degenerate.
pub const DEGENERATE_GAP: f64 = 1e-6;
/// Weight allowed on the two outermost harmonics before flagging truncation.
pub const EDGE_WEIGHT_LIMIT: f64 = 1e-8;

/// Maps a quasienergy onto the first Brillouin zone `[-ω/2, ω/2)`.
pub fn fold(eps: f64, omega: f64) -> f64 {
    let f = (eps + 0.5 * omega).rem_euclid(omega) - 0.5 * omega;
    // rem_euclid can round up to exactly ω
    if f >= 0.5 * omega {
        f - omega
    } else {
        f
    }
}

/// Floquet coefficients `c_{n,α}` of one mode, `n ∈ [-n_max, n_max]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeCoefficients {
    n_max: usize,
    data: Vec<f64>,
}

impl ModeCoefficients {
    pub fn new(n_max: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != 2 * (2 * n_max + 1) {
            return Err(invalid("coefficients", "length does not match n_max"));
        }
        Ok(Self { n_max, data })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// `c_{n,α}`, zero outside the retained harmonics.
    pub fn get(&self, n: i64, level: Level) -> f64 {
        if n.unsigned_abs() as usize > self.n_max {
            0.0
        } else {
            self.data[block_index(self.n_max, n, level)]
        }
    }

    pub fn norm_sq(&self) -> f64 {
        self.data.iter().map(|c| c * c).sum()
    }

    /// Weight carried by harmonic `n`.
    pub fn harmonic_weight(&self, n: i64) -> f64 {
        let g = self.get(n, Level::G);
        let e = self.get(n, Level::E);
        g * g + e * e
    }

    /// Weight on the two outermost harmonics on each side.
    pub fn edge_weight(&self) -> f64 {
        let nm = self.n_max as i64;
        [nm, nm - 1, -nm, -(nm - 1)]
            .iter()
            .map(|&n| self.harmonic_weight(n))
            .sum()
    }

    /// `⟨self|other⟩` over the harmonics both tables retain, with `other`
    /// displaced by `shift` harmonics (`other_{n+shift}` pairs with `self_n`).
    pub fn overlap_shifted(&self, other: &Self, shift: i64) -> f64 {
        let lo = (-(self.n_max as i64)).max(-(other.n_max as i64) - shift);
        let hi = (self.n_max as i64).min(other.n_max as i64 - shift);
        let mut acc = 0.0;
        for n in lo..=hi {
            let a = block_index(self.n_max, n, Level::G);
            let b = block_index(other.n_max, n + shift, Level::G);
            acc += self.data[a] * other.data[b] + self.data[a + 1] * other.data[b + 1];
        }
        acc
    }

    pub fn overlap(&self, other: &Self) -> f64 {
        self.overlap_shifted(other, 0)
    }

    /// Mode moved up by `k` harmonics (`c'_{n+k} = c_n`); weight pushed past
    /// the cutoff is dropped.
    pub fn shifted(&self, k: i64) -> Self {
        let nm = self.n_max as i64;
        let mut data = vec![0.0; self.data.len()];
        for n in -nm..=nm {
            let m = n + k;
            if m.abs() > nm {
                continue;
            }
            let src = block_index(self.n_max, n, Level::G);
            let dst = block_index(self.n_max, m, Level::G);
            data[dst] = self.data[src];
            data[dst + 1] = self.data[src + 1];
        }
        Self {
            n_max: self.n_max,
            data,
        }
    }

    fn negate(&mut self) {
        self.data.iter_mut().for_each(|c| *c = -*c);
    }

    /// `Σ_n (c_{n,g} c_{n+k,e} + c_{n,e} c_{n+k,g})`, the σx autocorrelation at lag `k`.
    fn sigma_x_correlation(&self, k: i64) -> f64 {
        let nm = self.n_max as i64;
        let lo = (-nm).max(-nm - k);
        let hi = nm.min(nm - k);
        let mut acc = 0.0;
        for n in lo..=hi {
            let a = block_index(self.n_max, n, Level::G);
            let b = block_index(self.n_max, n + k, Level::G);
            acc += self.data[a] * self.data[b + 1] + self.data[a + 1] * self.data[b];
        }
        acc
    }
}

/// Diagnostic flags attached to a spectrum.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpectrumFlags {
    /// Candidate tie during mode selection, or a folded gap below [`DEGENERATE_GAP`].
    pub degenerate: bool,
    /// Selected modes leak more than [`EDGE_WEIGHT_LIMIT`] onto the outermost harmonics.
    pub truncation: bool,
    /// Warm start failed and the modes were re-selected from scratch.
    pub tracking: bool,
}

impl SpectrumFlags {
    pub fn merge(self, other: Self) -> Self {
        Self {
            degenerate: self.degenerate || other.degenerate,
            truncation: self.truncation || other.truncation,
            tracking: self.tracking || other.tracking,
        }
    }
}

/// The two physical Floquet modes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FloquetSpectrum {
    /// Quasienergies folded into `[-ω/2, ω/2)`.
    pub eps_plus: f64,
    pub eps_minus: f64,
    /// Eigenvalues of the selected representatives before folding.
    pub raw_plus: f64,
    pub raw_minus: f64,
    pub coeffs_plus: ModeCoefficients,
    pub coeffs_minus: ModeCoefficients,
    pub omega: f64,
    pub flags: SpectrumFlags,
    /// Smallest warm-start overlap, when the modes were tracked.
    pub tracking_overlap: Option<f64>,
}

impl FloquetSpectrum {
    /// `Δε = ε₊ − ε₋` reduced to `[0, ω)`.
    pub fn gap(&self) -> f64 {
        quasienergy_gap(self)
    }

    /// `ε₊ − ε₋` of the folded quasienergies, in `(-ω, ω)`.
    pub fn signed_gap(&self) -> f64 {
        self.eps_plus - self.eps_minus
    }

    /// Distance between the two quasienergies on the Brillouin circle, in `[0, ω/2]`.
    pub fn gap_distance(&self) -> f64 {
        let g = self.gap();
        g.min(self.omega - g)
    }

    pub fn n_max(&self) -> usize {
        self.coeffs_plus.n_max()
    }

    /// Both modes moved by `k` harmonics (another member of the same
    /// equivalence classes); quasienergies move by `kω`.
    pub fn shifted(&self, k: i64) -> Self {
        let dk = k as f64 * self.omega;
        Self {
            eps_plus: fold(self.raw_plus + dk, self.omega),
            eps_minus: fold(self.raw_minus + dk, self.omega),
            raw_plus: self.raw_plus + dk,
            raw_minus: self.raw_minus + dk,
            coeffs_plus: self.coeffs_plus.shifted(k),
            coeffs_minus: self.coeffs_minus.shifted(k),
            ..self.clone()
        }
    }
}

/// `Δε = ε₊ − ε₋` reduced to `[0, ω)`.
pub fn quasienergy_gap(spec: &FloquetSpectrum) -> f64 {
    let g = (spec.eps_plus - spec.eps_minus).rem_euclid(spec.omega);
    if g >= spec.omega {
        0.0
    } else {
        g
    }
}

/// Static eigenvectors `(s₋, s₊)` of `-(w_q/2)σz + (b/2)σx` in the `(g, e)` basis.
fn static_eigenvectors(drive: &DriveConfig) -> ([f64; 2], [f64; 2]) {
    let a = -0.5 * drive.w_q;
    let c = 0.5 * drive.b;
    let r = a.hypot(c);
    // w_q > 0 keeps r - a > 0.
    let norm = (r - a).hypot(c);
    let minus = [(r - a) / norm, -c / norm];
    let plus = [c / norm, (r - a) / norm];
    (minus, plus)
}

fn column(eig: &Eigenpairs, n_max: usize, j: usize) -> ModeCoefficients {
    ModeCoefficients {
        n_max,
        data: eig.vectors.column(j).iter().copied().collect(),
    }
}

/// Picks the best-scoring candidate; ties within [`TIE_TOLERANCE`] go to the
/// larger central-harmonic weight.
fn pick<F: Fn(usize) -> f64>(scored: &[(usize, f64)], central: F) -> Option<(usize, f64, bool)> {
    let top = scored
        .iter()
        .copied()
        .max_by(|a, b| a.1.total_cmp(&b.1).then(b.0.cmp(&a.0)))?;
    let tied: Vec<(usize, f64)> = scored
        .iter()
        .copied()
        .filter(|&(j, s)| j != top.0 && top.1 - s < TIE_TOLERANCE)
        .collect();
    if tied.is_empty() {
        return Some((top.0, top.1, false));
    }
    let mut best = top;
    let mut best_w = central(top.0);
    for (j, s) in tied {
        let w = central(j);
        if w > best_w + f64::EPSILON || (w >= best_w - f64::EPSILON && j < best.0) {
            best = (j, s);
            best_w = w;
        }
    }
    Some((best.0, best.1, true))
}

fn same_class(u: &ModeCoefficients, v: &ModeCoefficients) -> bool {
    let span = 2 * u.n_max as i64;
    (-span..=span)
        .filter(|&k| k != 0)
        .any(|k| v.overlap_shifted(u, k).abs() > FRAC_1_SQRT_2)
}

/// Selects the two representatives of the physical Floquet modes.
///
/// Without `previous`, each mode is the eigenvector with the largest
/// projection onto the corresponding static eigenstate inside the `n = 0`
/// block; the minus mode is restricted to the other equivalence class.
/// With `previous`, the modes with the largest coefficient overlap are kept.
pub fn select_physical_modes(
    eig: &Eigenpairs,
    drive: &DriveConfig,
    trunc: &TruncationConfig,
    previous: Option<&FloquetSpectrum>,
) -> Result<FloquetSpectrum> {
    let n_max = trunc.n_max;
    if eig.len() != trunc.dim() || eig.vectors.nrows() != trunc.dim() {
        return Err(invalid("eigenpairs", "size does not match the truncation"));
    }
    let central = |j: usize| {
        let g = block_index(n_max, 0, Level::G);
        eig.vectors[(g, j)].powi(2) + eig.vectors[(g + 1, j)].powi(2)
    };
    let dim = eig.len();

    let mut flags = SpectrumFlags::default();
    let mut tracking_overlap = None;

    let (plus, minus) = match previous {
        None => {
            let (s_minus, s_plus) = static_eigenvectors(drive);
            let g0 = block_index(n_max, 0, Level::G);
            let proj = |s: [f64; 2], j: usize| {
                s[0] * eig.vectors[(g0, j)] + s[1] * eig.vectors[(g0 + 1, j)]
            };

            let plus_scores: Vec<(usize, f64)> =
                (0..dim).map(|j| (j, proj(s_plus, j).powi(2))).collect();
            let (ip, _, tie_p) = pick(&plus_scores, central).expect("non-empty spectrum");
            let mut plus = column(eig, n_max, ip);
            if proj(s_plus, ip) < 0.0 {
                plus.negate();
            }

            let mut minus_scores: Vec<(usize, f64)> = (0..dim)
                .filter(|&j| j != ip)
                .map(|j| (j, proj(s_minus, j).powi(2)))
                .collect();
            minus_scores.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
            let mut allowed = Vec::new();
            for &(j, s) in &minus_scores {
                if !same_class(&plus, &column(eig, n_max, j)) {
                    allowed.push((j, s));
                    // Only the leaders matter for the tie test.
                    if allowed.len() >= 2 && allowed[0].1 - s >= TIE_TOLERANCE {
                        break;
                    }
                }
            }
            let (im, _, tie_m) = pick(&allowed, central)
                .ok_or_else(|| invalid("eigenpairs", "no second equivalence class found"))?;
            let mut minus = column(eig, n_max, im);
            if proj(s_minus, im) < 0.0 {
                minus.negate();
            }
            flags.degenerate = tie_p || tie_m;
            ((ip, plus), (im, minus))
        }
        Some(prev) => {
            let overlaps =
                |reference: &ModeCoefficients, skip: Option<usize>| -> Vec<(usize, f64)> {
                    (0..dim)
                        .filter(|&j| Some(j) != skip)
                        .map(|j| (j, column(eig, n_max, j).overlap(reference).abs()))
                        .collect()
                };
            let (ip, op, tie_p) =
                pick(&overlaps(&prev.coeffs_plus, None), central).expect("non-empty spectrum");
            let (im, om, tie_m) =
                pick(&overlaps(&prev.coeffs_minus, Some(ip)), central).expect("non-empty spectrum");
            let worst = op.min(om);
            if worst < TRACKING_THRESHOLD {
                return Err(FloquetError::Tracking {
                    overlap: worst,
                    threshold: TRACKING_THRESHOLD,
                });
            }
            let mut plus = column(eig, n_max, ip);
            if plus.overlap(&prev.coeffs_plus) < 0.0 {
                plus.negate();
            }
            let mut minus = column(eig, n_max, im);
            if minus.overlap(&prev.coeffs_minus) < 0.0 {
                minus.negate();
            }
            flags.degenerate = tie_p || tie_m;
            tracking_overlap = Some(worst);
            ((ip, plus), (im, minus))
        }
    };

    let omega = drive.omega;
    let raw_plus = eig.values[plus.0];
    let raw_minus = eig.values[minus.0];
    let spectrum = FloquetSpectrum {
        eps_plus: fold(raw_plus, omega),
        eps_minus: fold(raw_minus, omega),
        raw_plus,
        raw_minus,
        flags: SpectrumFlags {
            truncation: plus.1.edge_weight() > EDGE_WEIGHT_LIMIT
                || minus.1.edge_weight() > EDGE_WEIGHT_LIMIT,
            ..flags
        },
        coeffs_plus: plus.1,
        coeffs_minus: minus.1,
        omega,
        tracking_overlap,
    };
    let degenerate = spectrum.flags.degenerate || spectrum.gap_distance() < DEGENERATE_GAP;
    Ok(FloquetSpectrum {
        flags: SpectrumFlags {
            degenerate,
            ..spectrum.flags
        },
        ..spectrum
    })
}

/// Builds, diagonalizes and selects modes from scratch.
pub fn solve(drive: &DriveConfig, trunc: &TruncationConfig) -> Result<FloquetSpectrum> {
    let m = build_extended_hamiltonian(drive, trunc)?;
    let eig = diagonalize_symmetric(&m)?;
    select_physical_modes(&eig, drive, trunc, None)
}

/// Like [`solve`] but keeps continuity with `previous`.
pub fn solve_tracked(
    drive: &DriveConfig,
    trunc: &TruncationConfig,
    previous: &FloquetSpectrum,
) -> Result<FloquetSpectrum> {
    let m = build_extended_hamiltonian(drive, trunc)?;
    let eig = diagonalize_symmetric(&m)?;
    select_physical_modes(&eig, drive, trunc, Some(previous))
}

/// Tracked solve that falls back to a cold start (flagged) when the branch is lost.
pub fn solve_following(
    drive: &DriveConfig,
    trunc: &TruncationConfig,
    previous: Option<&FloquetSpectrum>,
) -> Result<FloquetSpectrum> {
    let m = build_extended_hamiltonian(drive, trunc)?;
    let eig = diagonalize_symmetric(&m)?;
    match previous {
        None => select_physical_modes(&eig, drive, trunc, None),
        Some(prev) => match select_physical_modes(&eig, drive, trunc, Some(prev)) {
            Ok(s) => Ok(s),
            Err(FloquetError::Tracking { .. }) => {
                let mut s = select_physical_modes(&eig, drive, trunc, None)?;
                s.flags.tracking = true;
                Ok(s)
            }
            Err(e) => Err(e),
        },
    }
}

/// Fourier weights `g_{kφ}` for `k ∈ [-k_max, k_max]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierWeights {
    k_max: usize,
    values: Vec<f64>,
}

impl FourierWeights {
    pub fn from_values(k_max: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != 2 * k_max + 1 {
            return Err(invalid("weights", "length must be 2·k_max + 1"));
        }
        Ok(Self { k_max, values })
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn get(&self, k: i64) -> Option<f64> {
        if k.unsigned_abs() as usize > self.k_max {
            None
        } else {
            Some(self.values[(k + self.k_max as i64) as usize])
        }
    }

    /// `g_{0φ}`, equal to `∂Δε/∂b`.
    pub fn g0(&self) -> f64 {
        self.values[self.k_max]
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        let km = self.k_max as i64;
        self.values
            .iter()
            .enumerate()
            .map(move |(i, &g)| (i as i64 - km, g))
    }
}

/// `g_{kφ} = ½ Σ_{n,α,β} [c⁺_{n,α} c⁺_{n+k,β} − c⁻_{n,α} c⁻_{n+k,β}] ⟨α|σx|β⟩`.
pub fn fourier_weights(spec: &FloquetSpectrum, k_max: usize) -> Result<FourierWeights> {
    let limit = 2 * spec.n_max();
    if k_max > limit {
        return Err(invalid(
            "k_max",
            format!("{k_max} exceeds 2·n_max = {limit}"),
        ));
    }
    let km = k_max as i64;
    let values = (-km..=km)
        .map(|k| {
            0.5 * (spec.coeffs_plus.sigma_x_correlation(k)
                - spec.coeffs_minus.sigma_x_correlation(k))
        })
        .collect();
    Ok(FourierWeights { k_max, values })
}
