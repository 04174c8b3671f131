//! Pointwise regularity of sampled signals in generalized Holder spaces
//! `Lambda^{sigma, M}(x0)`: admissible sequences, local minimax fits, finite
//! differences, mollifiers, wavelet leaders and exponent estimation.
//!
//! Every numeric routine is generic over [`Real`] (`f32` or `f64`); the
//! aliases below fix the common case.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod estimate;
pub mod findiff;
pub mod linalg;
pub mod localfit;
pub mod real;
pub mod sampled;
pub mod selftest;
pub mod sequences;
pub mod signals;
pub mod wavelets;

pub use error::{Error, Result};
pub use real::Real;

pub type SignalF64 = sampled::SampledSignal<f64>;
pub type SignalF32 = sampled::SampledSignal<f32>;
pub type AdmissibleSequenceF64 = sequences::AdmissibleSequence<f64>;
pub type AdmissibleSequenceF32 = sequences::AdmissibleSequence<f32>;
pub type SequenceFamilyF64 = sequences::SequenceFamily<f64>;
pub type LocalPolyFitF64 = localfit::LocalPolyFit<f64>;
pub type WaveletBasisF64 = wavelets::WaveletBasis<f64>;
pub type CoeffPyramidF64 = wavelets::CoeffPyramid<f64>;
pub type LeaderPyramidF64 = wavelets::LeaderPyramid<f64>;
pub type RegularityEstimateF64 = estimate::RegularityEstimate<f64>;
pub type MembershipVerdictF64 = estimate::MembershipVerdict<f64>;
pub type SignalSpecF64 = signals::SignalSpec<f64>;
