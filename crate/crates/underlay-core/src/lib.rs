//! Outage analysis and transmit-signal design for an underlay secondary link
//! sharing spectrum with an in-band full-duplex primary pair.
//!
//! The secondary transmitter uses improper Gaussian signaling, described by a
//! transmit power and a circularity coefficient. The crate provides:
//!
//! * [`model`]: channel/config types and instantaneous achievable rates,
//! * [`outage`]: closed-form and semi-analytic outage probabilities,
//! * [`design_acsi`]: signal design from average channel statistics,
//! * [`design_idlcsi`]: design with known direct-link CSI, power saving and
//!   energy-efficiency analysis,
//! * [`montecarlo`]: a deterministic, seedable sampling oracle for all of
//!   the above.
//!
//! All analytic routines are pure functions and safe to call from any number
//! of threads. With the `parallel` feature (on by default) the Monte Carlo
//! estimators fan out over rayon; results are bit-identical to the sequential
//! fallback regardless of thread count.

pub mod design_acsi;
pub mod design_idlcsi;
pub mod model;
pub mod montecarlo;
pub mod outage;
mod quad;

pub use model::{
    ChannelDraw, ChannelMeans, EeConfig, ModelError, PuConfig, PuNode, RateThresholds,
    SignalParams, SuConfig,
};
pub use outage::NumericsError;
