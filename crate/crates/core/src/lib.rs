//! Discrete delay-Doppler signal processing for Zak-OTFS.
//!
//! The crate is organised bottom-up:
//!
//! * [`grid`] holds the frame geometry shared by everything else.
//! * [`dd`] implements quasi-periodic signals, sparse DD filters and the
//!   twisted convolution that composes them.
//! * [`zak`] is the discrete Zak transform pair and PAPR measurement.
//! * [`pulse`] and [`channel`] produce the effective sampled DD channel
//!   filter from a Veh-A path realization and RRC pulse shaping.
//! * [`precoder`] designs the twisted-convolution prefilter that maximizes
//!   the one-tap SINR of the precoded channel.
//! * [`qam`] and [`transceiver`] build frames, run the channel, estimate it
//!   and equalize, for both the precoded single-pilot system and the
//!   conventional pilot-plus-guard baseline.
//!
//! Everything here is `no_std` with `alloc`; IO and campaign orchestration
//! live in the companion `zakotfs` crate.

#![no_std]

extern crate alloc;

pub mod channel;
pub mod dd;
pub mod error;
pub mod grid;
pub mod linalg;
pub mod precoder;
pub mod pulse;
pub mod qam;
pub mod transceiver;
pub mod zak;

pub use num_complex::Complex64;

pub use channel::{draw_veh_a, effective_channel_taps, extract_support, ChannelRealization, Path, SupportRect};
pub use dd::{embed_symbols, twisted_conv_ff, twisted_conv_fs, DDFilter, QuasiPeriodicSignal, TapRect};
pub use error::{Error, Result};
pub use grid::GridParams;
pub use precoder::{
    assemble_h, design_precoder, localization_metric, optimal_prefilter, sinr, PrecoderSolution, PrefilterLayout,
};
pub use pulse::{rrc_value, PulseParams};
pub use qam::Qam;
pub use transceiver::{FrameMode, FramePlan, LinkBudget};
pub use zak::{forward_dzt, inverse_dzt, papr_db, TimeSamples};

/// Converts a power ratio in dB to linear scale.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Converts a linear power ratio to dB.
pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}
