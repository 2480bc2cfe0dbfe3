//! Local-oscillator pulse shaper with finite spectral resolution.
//!
//! The shaper is modeled as a smoothing operation on the spectrum it tries to
//! imprint: the desired spectrum is clipped to the shaper aperture, optionally
//! averaged over pixels, and convolved with a unit-area Gaussian kernel whose
//! FWHM is the shaper resolution. Convolving in frequency is the same as
//! multiplying in time by the kernel's transform, a window a few picoseconds
//! wide for a 0.6 nm resolution. That window is what limits how much of a
//! long, lobed single-photon mode a shaped local oscillator can follow.

use alloc::vec::Vec;
use core::f64::consts::{LN_2, TAU};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft::{accurate_sum, centered_dft_fast, Direction};
use crate::field::{pulse_energy, to_spectrum, Grid, SpectralField, TemporalField};
use crate::medium::{energy_transmission, propagate, MediumParams, SpectralFilter};
use crate::mode::{
    check_efficiency, golden_max, max_delay, normalize_spectrum, EtaCorrelator, NORM_TOLERANCE,
};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShaperConfig {
    /// Wavelength FWHM of the smoothing kernel in meters; `0` is an ideal
    /// shaper with unlimited resolution.
    pub resolution_fwhm: f64,
    /// Carrier wavelength in meters.
    pub center_wavelength: f64,
    /// Pixel width in wavelength (meters). `None` is a continuous mask.
    pub pixel_width: Option<f64>,
    /// Aperture (total passband) in wavelength, meters.
    pub span: f64,
}

impl Default for ShaperConfig {
    fn default() -> Self {
        ShaperConfig {
            resolution_fwhm: 0.6e-9,
            center_wavelength: 780e-9,
            pixel_width: None,
            span: 60e-9,
        }
    }
}

impl ShaperConfig {
    pub fn new(
        resolution_fwhm: f64,
        center_wavelength: f64,
        pixel_width: Option<f64>,
        span: f64,
    ) -> Result<Self> {
        let cfg = ShaperConfig {
            resolution_fwhm,
            center_wavelength,
            pixel_width,
            span,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Default aperture and wavelength with unlimited resolution.
    pub fn ideal() -> Self {
        ShaperConfig {
            resolution_fwhm: 0.0,
            ..Default::default()
        }
    }

    pub fn with_resolution(self, resolution_fwhm: f64) -> Self {
        ShaperConfig {
            resolution_fwhm,
            ..self
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.resolution_fwhm >= 0.0 && self.resolution_fwhm.is_finite()) {
            return Err(Error::Shaper("resolution must be finite and >= 0"));
        }
        if !(self.center_wavelength > 0.0 && self.center_wavelength.is_finite()) {
            return Err(Error::Shaper("center wavelength must be positive"));
        }
        if !(self.span > self.resolution_fwhm && self.span.is_finite()) {
            return Err(Error::Shaper("span must exceed the resolution"));
        }
        if let Some(p) = self.pixel_width {
            if !(p > 0.0 && p.is_finite()) {
                return Err(Error::Shaper("pixel width must be positive"));
            }
        }
        Ok(())
    }

    pub fn is_ideal(&self) -> bool {
        self.resolution_fwhm == 0.0
    }

    /// Converts a wavelength interval at the carrier to a frequency interval,
    /// `Δν = c·Δλ/λ²`.
    pub fn to_frequency(&self, wavelength_interval: f64) -> f64 {
        SPEED_OF_LIGHT * wavelength_interval / (self.center_wavelength * self.center_wavelength)
    }

    pub fn resolution_hz(&self) -> f64 {
        self.to_frequency(self.resolution_fwhm)
    }
}

/// Unit-area smoothing kernel `K(ν)` (`df·ΣK = 1`), centered on zero detuning.
///
/// An ideal shaper yields the discrete delta.
pub fn resolution_kernel(grid: &Grid, cfg: &ShaperConfig) -> Result<SpectralFilter> {
    cfg.validate()?;
    let df = grid.df();
    if cfg.is_ideal() {
        let mut values = alloc::vec![Complex64::default(); grid.n()];
        values[grid.center()] = Complex64::new(1.0 / df, 0.0);
        return SpectralFilter::new(*grid, values);
    }
    let fwhm = cfg.resolution_hz();
    if fwhm < 2.0 * df {
        return Err(Error::UnresolvedKernel {
            fwhm,
            min: 2.0 * df,
        });
    }
    let sigma = fwhm / (2.0 * libm::sqrt(2.0 * LN_2));
    let raw: Vec<f64> = grid
        .freqs()
        .map(|nu| libm::exp(-0.5 * (nu / sigma) * (nu / sigma)))
        .collect();
    let area = df * accurate_sum(raw.iter().copied());
    SpectralFilter::new(
        *grid,
        raw.into_iter()
            .map(|k| Complex64::new(k / area, 0.0))
            .collect(),
    )
}

fn fast_to_time(values: &[Complex64], grid: &Grid) -> Vec<Complex64> {
    centered_dft_fast(values, Direction::Negative, grid.df())
}

fn fast_to_spectrum(values: &[Complex64], grid: &Grid) -> Vec<Complex64> {
    centered_dft_fast(values, Direction::Positive, grid.dt())
}

/// Zeroes everything outside the aperture and, with pixels, replaces each
/// pixel by its mean.
fn mask_constraints(spec: &mut [Complex64], grid: &Grid, cfg: &ShaperConfig) {
    let half_span = 0.5 * cfg.to_frequency(cfg.span);
    let pixel = cfg.pixel_width.map(|p| cfg.to_frequency(p));
    let mut current: Option<(i64, usize, Complex64)> = None;
    let flush = |spec: &mut [Complex64], run: Option<(i64, usize, Complex64)>, end: usize| {
        if let Some((_, start, sum)) = run {
            let mean = sum / (end - start) as f64;
            spec[start..end].iter_mut().for_each(|z| *z = mean);
        }
    };
    for j in 0..grid.n() {
        let nu = grid.freq(j);
        if nu.abs() > half_span {
            flush(spec, current.take(), j);
            spec[j] = Complex64::default();
            continue;
        }
        if let Some(width) = pixel {
            let id = libm::floor((nu + half_span) / width) as i64;
            match current {
                Some((cid, start, sum)) if cid == id => current = Some((cid, start, sum + spec[j])),
                run => {
                    flush(spec, run, j);
                    current = Some((id, j, spec[j]));
                }
            }
        }
    }
    flush(spec, current, grid.n());
}

/// Circular convolution `df·Σ_m K(ν_j - ν_m)·A(ν_m)`, done as a product in
/// time.
fn smooth(spec: &[Complex64], window: &[Complex64], grid: &Grid) -> Vec<Complex64> {
    let t: Vec<Complex64> = fast_to_time(spec, grid)
        .into_iter()
        .zip(window)
        .map(|(a, w)| a * w)
        .collect();
    fast_to_spectrum(&t, grid)
}

/// Spectrum the shaper actually produces when asked for `target`
/// (unnormalized).
fn shaped_spectrum(
    target: &[Complex64],
    grid: &Grid,
    cfg: &ShaperConfig,
    window: Option<&[Complex64]>,
) -> Vec<Complex64> {
    let mut spec = target.to_vec();
    mask_constraints(&mut spec, grid, cfg);
    match window {
        Some(w) => smooth(&spec, w, grid),
        None => spec,
    }
}

/// Time-domain transform of the kernel; `None` for an ideal shaper.
fn kernel_window(grid: &Grid, cfg: &ShaperConfig) -> Result<Option<Vec<Complex64>>> {
    let kernel = resolution_kernel(grid, cfg)?;
    if cfg.is_ideal() {
        return Ok(None);
    }
    Ok(Some(fast_to_time(kernel.values(), grid)))
}

/// Best local oscillator the shaper can produce for a normalized target mode.
pub fn achievable_lo(target: &TemporalField, cfg: &ShaperConfig) -> Result<TemporalField> {
    let e = pulse_energy(target);
    if (e - 1.0).abs() > NORM_TOLERANCE {
        return Err(Error::NotNormalized(e));
    }
    let grid = *target.grid();
    let window = kernel_window(&grid, cfg)?;
    let spec = fast_to_spectrum(target.amp(), &grid);
    let shaped = shaped_spectrum(&spec, &grid, cfg, window.as_deref());
    let out = TemporalField::new(grid, fast_to_time(&shaped, &grid))?;
    crate::mode::normalize(&out)
}

/// Result of optimizing a shaped local oscillator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShapedOptimum {
    /// Best efficiency over both candidate oscillators.
    pub eta: f64,
    /// Efficiency with the shaped oscillator alone.
    pub eta_shaped: f64,
    /// Efficiency with the unshaped input-mode oscillator.
    pub eta_unshaped: f64,
    /// Center of the shaping window relative to the pulse time origin.
    pub window_delay: f64,
    /// `|⟨LO|f̂_out⟩|²` of the shaped oscillator.
    pub mode_overlap: f64,
    /// Energy transmission `T_E` of the medium.
    pub transmission: f64,
}

/// Maximum homodyne efficiency with a shaped local oscillator:
/// `eta_base·T_E·|⟨LO|f̂_out⟩|²`, with the oscillator's timing optimized and
/// the unshaped input mode kept as a fallback candidate.
pub fn max_shaped_eta(
    input: &TemporalField,
    m: &MediumParams,
    cfg: &ShaperConfig,
    eta_base: f64,
) -> Result<f64> {
    Ok(shaped_optimum(input, m, cfg, eta_base)?.eta)
}

/// Peak of the efficiency-versus-delay curve with the input mode as local
/// oscillator.
pub fn max_unshaped_eta(input: &TemporalField, m: &MediumParams, eta_base: f64) -> Result<f64> {
    Ok(EtaCorrelator::new(input, m, input, eta_base)?.peak().1)
}

/// Full breakdown behind [`max_shaped_eta`].
pub fn shaped_optimum(
    input: &TemporalField,
    m: &MediumParams,
    cfg: &ShaperConfig,
    eta_base: f64,
) -> Result<ShapedOptimum> {
    check_efficiency(eta_base)?;
    cfg.validate()?;
    let grid = *input.grid();
    let f = normalize_spectrum(&to_spectrum(input))?;
    let transmission = energy_transmission(&f, m)?;
    let out = normalize_spectrum(&propagate(&f, m)?)?;
    let window = kernel_window(&grid, cfg)?;
    let (window_delay, mode_overlap) = match (&window, cfg.pixel_width) {
        (None, None) => (0.0, fixed_overlap(&out, &grid, cfg)),
        (Some(w), None) => optimize_window(&out, w, &grid, cfg),
        (w, Some(_)) => optimize_pixelated(&out, w.as_deref(), &grid, cfg),
    };
    let mode_overlap = mode_overlap.clamp(0.0, 1.0);
    let eta_shaped = eta_base * transmission * mode_overlap;
    let eta_unshaped = max_unshaped_eta(input, m, eta_base)?;
    Ok(ShapedOptimum {
        eta: eta_shaped.max(eta_unshaped),
        eta_shaped,
        eta_unshaped,
        window_delay,
        mode_overlap,
        transmission,
    })
}

/// `|⟨LO|target⟩|² / ‖LO‖²` in the frequency domain (target normalized).
fn spectral_ratio(lo: &[Complex64], target: &[Complex64], df: f64) -> f64 {
    let terms = || lo.iter().zip(target).map(|(a, b)| a.conj() * b);
    let re = accurate_sum(terms().map(|z| z.re));
    let im = accurate_sum(terms().map(|z| z.im));
    let norm = accurate_sum(lo.iter().map(|z| z.norm_sqr()));
    if norm > 0.0 {
        df * (re * re + im * im) / norm
    } else {
        0.0
    }
}

/// Ideal resolution without pixels: only the aperture constrains the LO, and
/// timing is irrelevant.
fn fixed_overlap(out: &SpectralField, grid: &Grid, cfg: &ShaperConfig) -> f64 {
    let lo = shaped_spectrum(out.amp(), grid, cfg, None);
    spectral_ratio(&lo, out.amp(), grid.df())
}

/// Continuous mask with finite resolution.
///
/// Shaping the target delayed by `-s` and delaying the result back by `s`
/// multiplies the aperture-limited target `f_ap(t)` by the window `k(t - s)`.
/// The overlap for every on-grid `s` therefore follows from two circular
/// correlations:
///
/// ```text
/// N(s) = dt·Σ conj(k(t-s))·conj(f_ap(t))·f(t)
/// D(s) = dt·Σ |k(t-s)|²·|f_ap(t)|²
/// |⟨LO_s|f⟩|² = |N(s)|² / D(s)
/// ```
///
/// The best on-grid `s` is then refined between its neighbours with the
/// window shifted by a spectral phase ramp.
fn optimize_window(
    out: &SpectralField,
    window: &[Complex64],
    grid: &Grid,
    cfg: &ShaperConfig,
) -> (f64, f64) {
    let scan = WindowScan::new(out, window, grid, cfg);
    let (num, den) = scan.on_grid();
    let limit = max_delay(grid);
    // Windows that barely touch the pulse give ratios of rounding noise.
    let floor = 1e-9 * den.iter().map(|z| z.re).fold(0.0, f64::max);
    let mut best: Option<(usize, f64)> = None;
    for k in 0..grid.n() {
        if grid.time(k).abs() > limit || !(den[k].re > floor) {
            continue;
        }
        let r = num[k].norm_sqr() / den[k].re;
        if best.map_or(true, |(_, b)| r > b) {
            best = Some((k, r));
        }
    }
    let Some((k, _)) = best else {
        return (0.0, 0.0);
    };
    let s0 = grid.time(k);
    let at_grid = scan.ratio_at(s0);
    let (s, r) = golden_max(
        |s| scan.ratio_at(s),
        (s0 - grid.dt()).max(-limit),
        (s0 + grid.dt()).min(limit),
        1e-6 * grid.dt(),
    );
    if r > at_grid {
        (s, r)
    } else {
        (s0, at_grid)
    }
}

/// Spectra of the two correlations `N` and `D`, kept on the narrow band
/// where the kernel is non-negligible so either can be evaluated at any
/// window position.
struct WindowScan {
    grid: Grid,
    num: Band,
    den: Band,
}

struct Band {
    freqs: Vec<f64>,
    values: Vec<Complex64>,
    full: Vec<Complex64>,
}

impl Band {
    fn new(spectrum: Vec<Complex64>, grid: &Grid) -> Band {
        let top = spectrum.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let (freqs, values) = spectrum
            .iter()
            .enumerate()
            .filter(|(_, z)| z.norm() > 1e-30 * top)
            .map(|(j, z)| (grid.freq(j), *z))
            .unzip();
        Band {
            freqs,
            values,
            full: spectrum,
        }
    }

    /// `df·Σ P(ν)·exp(-2πiνs)`.
    fn at(&self, s: f64, df: f64) -> Complex64 {
        let mut re = 0.0;
        let mut im = 0.0;
        for (nu, p) in self.freqs.iter().zip(&self.values) {
            let z = p * Complex64::from_polar(1.0, -TAU * nu * s);
            re += z.re;
            im += z.im;
        }
        Complex64::new(re * df, im * df)
    }
}

impl WindowScan {
    fn new(out: &SpectralField, window: &[Complex64], grid: &Grid, cfg: &ShaperConfig) -> Self {
        let f = fast_to_time(out.amp(), grid);
        let f_ap = fast_to_time(&shaped_spectrum(out.amp(), grid, cfg, None), grid);
        let g1: Vec<Complex64> = f_ap.iter().zip(&f).map(|(a, b)| a.conj() * b).collect();
        let g2: Vec<Complex64> = f_ap
            .iter()
            .map(|a| Complex64::new(a.norm_sqr(), 0.0))
            .collect();
        let window_sq: Vec<Complex64> = window
            .iter()
            .map(|w| Complex64::new(w.norm_sqr(), 0.0))
            .collect();
        // Spectrum of the window is the kernel itself.
        let kernel = fast_to_spectrum(window, grid);
        let kernel_sq = fast_to_spectrum(&window_sq, grid);
        let product = |x: &[Complex64], y: &[Complex64]| -> Vec<Complex64> {
            x.iter()
                .zip(fast_to_spectrum(y, grid))
                .map(|(a, b)| a.conj() * b)
                .collect()
        };
        WindowScan {
            grid: *grid,
            num: Band::new(product(&kernel, &g1), grid),
            den: Band::new(product(&kernel_sq, &g2), grid),
        }
    }

    /// `N` and `D` at every grid time.
    fn on_grid(&self) -> (Vec<Complex64>, Vec<Complex64>) {
        (
            fast_to_time(&self.num.full, &self.grid),
            fast_to_time(&self.den.full, &self.grid),
        )
    }

    /// `|N(s)|²/D(s)` for an arbitrary window center `s`.
    fn ratio_at(&self, s: f64) -> f64 {
        let df = self.grid.df();
        let d = self.den.at(s, df).re;
        if d > 0.0 {
            self.num.at(s, df).norm_sqr() / d
        } else {
            0.0
        }
    }
}

/// Pixelated mask: pixel averaging does not commute with delays, so every
/// candidate timing is shaped explicitly. The search starts from the
/// continuous-mask optimum.
fn optimize_pixelated(
    out: &SpectralField,
    window: Option<&[Complex64]>,
    grid: &Grid,
    cfg: &ShaperConfig,
) -> (f64, f64) {
    let start = match window {
        Some(w) => {
            let continuous = ShaperConfig {
                pixel_width: None,
                ..*cfg
            };
            optimize_window(out, w, grid, &continuous).0
        }
        None => 0.0,
    };
    let limit = max_delay(grid);
    let ratio = |s: f64| {
        let back: Vec<Complex64> = out
            .amp()
            .iter()
            .zip(grid.freqs())
            .map(|(z, nu)| z * Complex64::from_polar(1.0, -TAU * nu * s))
            .collect();
        let shaped = shaped_spectrum(&back, grid, cfg, window);
        let lo: Vec<Complex64> = shaped
            .iter()
            .zip(grid.freqs())
            .map(|(z, nu)| z * Complex64::from_polar(1.0, TAU * nu * s))
            .collect();
        spectral_ratio(&lo, out.amp(), grid.df())
    };
    // Coarse scan over one picosecond either side, then golden refinement.
    const STEPS: usize = 20;
    let span = 1e-12;
    let step = 2.0 * span / STEPS as f64;
    let mut best = (start, ratio(start));
    for i in 0..=STEPS {
        let s = (start - span + i as f64 * step).clamp(-limit, limit);
        let r = ratio(s);
        if r > best.1 {
            best = (s, r);
        }
    }
    let (s, r) = golden_max(
        ratio,
        (best.0 - step).max(-limit),
        (best.0 + step).min(limit),
        1e-3 * grid.dt(),
    );
    if r > best.1 {
        (s, r)
    } else {
        best
    }
}
