//! Propagation of ultrashort pulses through a narrow resonant absorber and
//! homodyne detection of the reshaped single-photon wavepacket.
//!
//! Fields are sampled on a centered grid and transformed with
//!
//! ```text
//! E(ν) = dt · Σ E(t) e^{+2πiνt}      E(t) = df · Σ E(ν) e^{-2πiνt}
//! ```
//!
//! so the ν = 0 spectral bin is the pulse area. Transforms are evaluated in
//! double-double arithmetic and rounded once.
//!
//! The crate is `no_std` and needs only `alloc`.

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

mod dd;
mod fft;

pub mod error;
pub mod field;
pub mod medium;
pub mod mode;
pub mod quantum;
pub mod shaper;

pub use error::{Error, Result};
pub use field::{
    gaussian_pulse, intensity_fwhm, make_grid, pulse_area, pulse_energy, to_spectrum, to_time,
    Field, Grid, SpectralField, TemporalField,
};
pub use medium::{
    diagnose, energy_transmission, preset, propagate, temperature_presets, transfer_function,
    GridDiagnostics, GridWarning, MediumParams, Preset, SpectralFilter,
};
pub use mode::{
    delay, eta_curve, find_nulls, max_delay, normalize, overlap, peak_eta, spectral_overlap,
    visibility_curve, CurveMeta, DelayCorrelator, EtaCorrelator, ScanCurve,
};
pub use quantum::{
    estimate_eta, is_nonclassical, quadrature_pdf, sample_quadratures, wigner, wigner_grid,
    EtaEstimate, HeraldedState, PhaseSpaceGrid, QuadratureSample,
};
pub use shaper::{
    achievable_lo, max_shaped_eta, max_unshaped_eta, resolution_kernel, shaped_optimum,
    ShapedOptimum, ShaperConfig,
};
