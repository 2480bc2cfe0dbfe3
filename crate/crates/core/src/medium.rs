//! Linear propagation through a dense resonant medium with a single
//! homogeneous (Lorentzian) line.
//!
//! After a path of optical depth `α₀l` every spectral component is multiplied
//! by
//!
//! ```text
//! H(ν) = exp[ -α₀l / (1 - i·2π(ν - ν_a)·T2) ]
//! ```
//!
//! At the resonance `H = e^{-α₀l}` exactly, so the pulse area decays
//! exponentially however strongly the pulse is reshaped. For depths beyond
//! ~745 that factor underflows to zero in double precision; the physical
//! amplitude is unmeasurably small there anyway.

use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{pulse_energy, Grid, SpectralField, TemporalField};

/// Optical depth, dephasing time and resonance offset of the medium.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MediumParams {
    /// Dimensionless optical depth `α₀l`.
    pub depth: f64,
    /// Effective dephasing time `T2` in seconds.
    pub t2: f64,
    /// Resonance offset from the pulse carrier in Hz.
    pub detune_a: f64,
}

impl MediumParams {
    pub fn new(depth: f64, t2: f64, detune_a: f64) -> Result<Self> {
        if !(depth >= 0.0 && depth.is_finite()) {
            return Err(Error::Medium("optical depth must be finite and >= 0"));
        }
        if !(t2 > 0.0 && t2.is_finite()) {
            return Err(Error::Medium("T2 must be positive"));
        }
        if !detune_a.is_finite() {
            return Err(Error::Medium("resonance offset must be finite"));
        }
        Ok(MediumParams {
            depth,
            t2,
            detune_a,
        })
    }

    /// Resonant medium (line centered on the carrier).
    pub fn resonant(depth: f64, t2: f64) -> Result<Self> {
        Self::new(depth, t2, 0.0)
    }

    /// Absorption-line FWHM in Hz, `1/(π·T2)`.
    pub fn line_fwhm(&self) -> f64 {
        1.0 / (PI * self.t2)
    }

    /// `H` at one detuning.
    pub fn response(&self, nu: f64) -> Complex64 {
        let x = TAU * (nu - self.detune_a) * self.t2;
        (Complex64::new(-self.depth, 0.0) / Complex64::new(1.0, -x)).exp()
    }

    fn check_grid(&self, grid: &Grid) -> Result<()> {
        if self.detune_a.abs() >= grid.nyquist() {
            return Err(Error::DetuningOutsideGrid {
                offset: self.detune_a,
                nyquist: grid.nyquist(),
            });
        }
        Ok(())
    }
}

/// Multiplicative filter sampled on a frequency grid.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralFilter {
    grid: Grid,
    values: Vec<Complex64>,
}

impl SpectralFilter {
    pub fn new(grid: Grid, values: Vec<Complex64>) -> Result<Self> {
        // Same sample rules as a spectral field.
        let values = SpectralField::new(grid, values)?.into_amp();
        Ok(SpectralFilter { grid, values })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Pointwise product with a field on the same grid.
    pub fn apply(&self, f: &SpectralField) -> Result<SpectralField> {
        if f.grid() != &self.grid {
            return Err(Error::GridMismatch);
        }
        let amp = f
            .amp()
            .iter()
            .zip(&self.values)
            .map(|(a, h)| a * h)
            .collect();
        SpectralField::new(self.grid, amp)
    }
}

/// Samples the medium response at every detuning of `grid`.
pub fn transfer_function(grid: &Grid, m: &MediumParams) -> Result<SpectralFilter> {
    m.check_grid(grid)?;
    Ok(SpectralFilter {
        grid: *grid,
        values: grid.freqs().map(|nu| m.response(nu)).collect(),
    })
}

/// Field after the medium.
pub fn propagate(f: &SpectralField, m: &MediumParams) -> Result<SpectralField> {
    transfer_function(f.grid(), m)?.apply(f)
}

/// Fraction of the pulse energy that survives the medium.
pub fn energy_transmission(f: &SpectralField, m: &MediumParams) -> Result<f64> {
    let e_in = pulse_energy(f);
    if e_in <= 0.0 {
        return Err(Error::ZeroEnergy);
    }
    let e_out = pulse_energy(&propagate(f, m)?);
    Ok((e_out / e_in).clamp(0.0, 1.0))
}

/// One of the five reference media.
#[derive(Clone, Debug, PartialEq)]
pub struct Preset {
    /// 1-based position in the list.
    pub index: usize,
    pub label: String,
    /// Cell temperature in °C, where known.
    pub temperature_c: Option<f64>,
    pub medium: MediumParams,
}

/// Optical depths of the reference media, in increasing order.
pub const PRESET_DEPTHS: [f64; 5] = [70.0, 180.0, 440.0, 1000.0, 2200.0];
/// Effective `T2` of the first and last reference media.
pub const PRESET_T2_RANGE: (f64, f64) = (280e-12, 260e-12);

/// The five reference media. `T2` falls linearly from 280 ps to 260 ps
/// across the list.
pub fn temperature_presets() -> Vec<Preset> {
    let (t2_first, t2_last) = PRESET_T2_RANGE;
    let last = (PRESET_DEPTHS.len() - 1) as f64;
    PRESET_DEPTHS
        .iter()
        .enumerate()
        .map(|(i, &depth)| {
            let t2 = t2_first + (t2_last - t2_first) * (i as f64 / last);
            Preset {
                index: i + 1,
                label: alloc::format!("preset{}", i + 1),
                temperature_c: None,
                medium: MediumParams {
                    depth,
                    t2,
                    detune_a: 0.0,
                },
            }
        })
        .collect()
}

/// Looks up a preset by its 1-based index.
pub fn preset(index: usize) -> Option<Preset> {
    temperature_presets().into_iter().find(|p| p.index == index)
}

/// Minimum number of frequency samples across the line FWHM.
pub const MIN_SAMPLES_PER_LINE: f64 = 8.0;
/// Largest tolerated edge-to-peak amplitude ratio in the time window.
pub const MAX_EDGE_RATIO: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GridWarning {
    /// Fewer than [`MIN_SAMPLES_PER_LINE`] frequency samples span the line.
    CoarseLine { samples: f64 },
    /// The field has not decayed at the window edges; the tail may wrap.
    EdgeAmplitude { ratio: f64 },
}

/// Grid adequacy report for one propagated field.
#[derive(Clone, Debug, PartialEq)]
pub struct GridDiagnostics {
    pub samples_per_line: f64,
    pub edge_ratio: f64,
    pub warnings: Vec<GridWarning>,
}

impl GridDiagnostics {
    pub fn is_clean(&self) -> bool {
        self.warnings.is_empty()
    }
}

/// Checks line resolution and wrap-around for a field that went through `m`.
pub fn diagnose(out: &TemporalField, m: &MediumParams) -> GridDiagnostics {
    let grid = out.grid();
    let samples_per_line = m.line_fwhm() / grid.df();
    let peak = out.peak();
    let amp = out.amp();
    let edge = amp[0].norm().max(amp[amp.len() - 1].norm());
    let edge_ratio = if peak > 0.0 { edge / peak } else { 0.0 };
    let mut warnings = Vec::new();
    // Depth zero has no line to resolve.
    if m.depth > 0.0 && samples_per_line < MIN_SAMPLES_PER_LINE {
        warnings.push(GridWarning::CoarseLine {
            samples: samples_per_line,
        });
    }
    if edge_ratio > MAX_EDGE_RATIO {
        warnings.push(GridWarning::EdgeAmplitude { ratio: edge_ratio });
    }
    GridDiagnostics {
        samples_per_line,
        edge_ratio,
        warnings,
    }
}
