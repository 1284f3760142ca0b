//! Communication and sensing analytics for single-carrier faster-than-Nyquist
//! (FTN) signaling: folded spectra, ISI matrices, spectral efficiency with
//! bounds, expected ambiguity functions and Monte Carlo harnesses.
//!
//! Everything numeric is generic over [`Real`] (`f32` or `f64`); the aliases
//! below fix the scalar for the common cases.

// NaN-rejecting guards are written as negated comparisons on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ambiguity;
pub mod capacity;
pub mod error;
pub mod experiments;
pub mod isi;
pub mod linalg;
pub mod pulse;
pub mod quadrature;
pub mod rng;
pub mod scalar;

pub use ambiguity::{
    accumulated_isi, af_slice, dirichlet_sq, doppler_accumulated_isi, expected_sq_af, fair_symbol_count,
    fair_symbol_energy, iceberg_decomposition, kurtosis, periodic_doppler_variation, pulse_af, signal_af,
    AfSlice, Constellation, SignalAf, SliceAxis,
};
pub use capacity::{
    db_to_linear, dtft_dll, dtft_g0, dtft_tll, ergodic_se, ergodic_se_samples, mutual_info_matrix, se_bounds,
    se_no_aliasing, se_point, spectral_efficiency, upsilon, ChannelMatrices, ErgodicChannelModel,
    FiniteBlockModel, MultipathChannel, Path, SeResult,
};
pub use error::{FtnError, Result};
pub use experiments::{
    doppler_mse, doppler_mse_with, draw_symbols, exhaustive_af_slice, mc_af_slice, DopplerReceiver,
    DopplerScene, McConfig, Target,
};
pub use isi::{build_isi_matrix, dirichlet_kernel, isi_coefficient, isi_coefficients, IsiMatrix};
pub use pulse::{FoldedSpectrumKind, PulseFamily, PulseSpec};
pub use scalar::Real;

pub type Pulse = PulseSpec<f64>;
pub type Channel = MultipathChannel<f64>;
pub type Isi = IsiMatrix<f64>;
pub type Alphabet = Constellation<f64>;
pub type Slice = AfSlice<f64>;
pub type McConfig64 = McConfig<f64>;
pub type Scene = DopplerScene<f64>;

pub type Pulse32 = PulseSpec<f32>;
pub type Channel32 = MultipathChannel<f32>;
pub type Isi32 = IsiMatrix<f32>;
pub type Alphabet32 = Constellation<f32>;
pub type Slice32 = AfSlice<f32>;
