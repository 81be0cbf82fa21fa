//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error(
        "wavenumber {wavenumber} does not fit the ring (index {index_estimate:.6}); \
         nearest lattice wavenumbers are {below} and {above}"
    )]
    NonLatticeWavenumber {
        wavenumber: f64,
        index_estimate: f64,
        below: f64,
        above: f64,
    },

    #[error("band of depth {band_depth} holds no negative-energy modes on this truncation")]
    EmptyBand { band_depth: f64 },

    #[error(
        "band edge at lattice index {band_edge_index} plus wavenumber index {wavenumber_index} \
         exceeds the momentum cutoff {cutoff_index}; margin is {margin_steps} steps, \
         short by {shortfall_steps}"
    )]
    BandOutsideCutoff {
        band_edge_index: i32,
        wavenumber_index: i32,
        cutoff_index: i32,
        margin_steps: i32,
        shortfall_steps: i32,
    },

    #[error("basis of {modes} modes exceeds the cap of {cap} for exact Fock work")]
    OversizeBasis { modes: usize, cap: usize },

    #[error("mode index {0} is not part of this basis")]
    UnknownMode(usize),

    #[error(
        "anticommutator {{{left}, {right}}} deviates from a scalar multiple of the identity \
         by {deviation:.3e}"
    )]
    NotScalarAnticommutator {
        left: String,
        right: String,
        deviation: f64,
    },

    #[error(
        "identity premises not met: |[H,rho]+iK| = {commutator_residual:.3e}, \
         |[rho,K]| = {exchange_residual:.3e} (tolerance {tolerance:.1e})"
    )]
    PremiseViolated {
        commutator_residual: f64,
        exchange_residual: f64,
        tolerance: f64,
    },

    #[error("momentum cutoff {cutoff} must exceed the wavenumber magnitude {wavenumber}")]
    CutoffBelowWavenumber { cutoff: f64, wavenumber: f64 },

    #[error("quadrature failed to reach tolerance {tolerance:.1e} (best error {achieved:.3e})")]
    QuadratureFailure { tolerance: f64, achieved: f64 },

    #[error("config: {0}")]
    Config(String),

    #[error("empty scan range: {0}")]
    EmptyScan(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
