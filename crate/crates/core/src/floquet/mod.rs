//! Extended-space Floquet solver for the bichromatically driven qubit.

pub mod drive;
pub mod eigen;
pub mod matrix;
pub mod propagator;
pub mod spectrum;

pub use drive::{DriveConfig, TruncationConfig};
pub use eigen::{diagonalize_dense, diagonalize_symmetric, Eigenpairs};
pub use matrix::{build_extended_hamiltonian, ExtendedMatrix, Level};
pub use propagator::{propagator_oracle, PropagatorResult};
pub use spectrum::{
    fold, fourier_weights, quasienergy_gap, select_physical_modes, solve, solve_following,
    solve_tracked, FloquetSpectrum, FourierWeights, ModeCoefficients, SpectrumFlags,
};
