//! Sampling grids, complex envelope fields and the transforms between them.
//!
//! Fields are carrier-removed envelopes. Time sample `k` sits at
//! `t = (k - n/2)·dt` and frequency sample `j` at the detuning
//! `ν = (j - n/2)·df` with `df = 1/(n·dt)`, so both axes are centered on zero.
//!
//! The transform pair uses the optics sign convention
//!
//! ```text
//! E(ν) = dt · Σ_t E(t) · exp(+2πiνt)
//! E(t) = df · Σ_ν E(ν) · exp(-2πiνt)
//! ```
//!
//! which approximates the continuous Fourier integral, makes the pair exact
//! inverses, and gives Parseval as `dt·Σ|E(t)|² = df·Σ|E(ν)|²`. The scaling is
//! unitary with respect to those measures. With this sign a causal medium
//! response has its poles in the lower half of the complex frequency plane.

use alloc::vec::Vec;
use core::f64::consts::{LN_2, TAU};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft::{accurate_sum, centered_dft, Direction};

/// Uniform time grid and its conjugate frequency grid.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    n: usize,
    dt: f64,
}

impl Grid {
    pub fn new(n: usize, dt: f64) -> Result<Self> {
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::GridSize(n));
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::TimeStep(dt));
        }
        Ok(Grid { n, dt })
    }

    /// The default simulation grid: 2^19 samples of 10 fs.
    pub fn default_grid() -> Self {
        Grid {
            n: 1 << 19,
            dt: 10e-15,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn df(&self) -> f64 {
        1.0 / (self.n as f64 * self.dt)
    }

    /// Total time window `n·dt`.
    pub fn window(&self) -> f64 {
        self.n as f64 * self.dt
    }

    /// Half the sampling rate; frequency samples cover `[-nyquist, nyquist)`.
    pub fn nyquist(&self) -> f64 {
        0.5 / self.dt
    }

    /// Index of the `t = 0` and `ν = 0` samples.
    pub fn center(&self) -> usize {
        self.n / 2
    }

    pub fn time(&self, k: usize) -> f64 {
        (k as f64 - self.center() as f64) * self.dt
    }

    pub fn freq(&self, j: usize) -> f64 {
        (j as f64 - self.center() as f64) / (self.n as f64 * self.dt)
    }

    pub fn times(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.n).map(|k| self.time(k))
    }

    pub fn freqs(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.n).map(|j| self.freq(j))
    }

    pub fn t_min(&self) -> f64 {
        self.time(0)
    }

    pub fn t_max(&self) -> f64 {
        self.time(self.n - 1)
    }
}

/// Builds a grid of `n` samples spaced `dt` seconds apart.
pub fn make_grid(n: usize, dt: f64) -> Result<Grid> {
    Grid::new(n, dt)
}

/// Common read access to sampled fields.
pub trait Field {
    fn grid(&self) -> &Grid;
    fn amp(&self) -> &[Complex64];
    /// Integration step of the field's own axis (`dt` or `df`).
    fn step(&self) -> f64;
}

fn check_samples(grid: &Grid, amp: &[Complex64]) -> Result<()> {
    if amp.len() != grid.n() {
        return Err(Error::Length {
            expected: grid.n(),
            actual: amp.len(),
        });
    }
    match amp
        .iter()
        .position(|z| !(z.re.is_finite() && z.im.is_finite()))
    {
        Some(i) => Err(Error::NonFinite(i)),
        None => Ok(()),
    }
}

macro_rules! field_type {
    ($(#[$doc:meta])* $name:ident, $step:ident, $coord:ident) => {
        $(#[$doc])*
        #[derive(Clone, Debug)]
        pub struct $name {
            grid: Grid,
            amp: Vec<Complex64>,
            // Rounding remainder left by the transform that produced `amp`.
            residual: Option<Vec<Complex64>>,
        }

        /// Compares samples only; the transform remainder is ignored.
        impl PartialEq for $name {
            fn eq(&self, other: &Self) -> bool {
                self.grid == other.grid && self.amp == other.amp
            }
        }

        impl $name {
            pub fn new(grid: Grid, amp: Vec<Complex64>) -> Result<Self> {
                check_samples(&grid, &amp)?;
                Ok($name { grid, amp, residual: None })
            }

            /// Samples `f` at every grid coordinate.
            pub fn from_fn(grid: Grid, f: impl Fn(f64) -> Complex64) -> Result<Self> {
                let amp = (0..grid.n()).map(|i| f(grid.$coord(i))).collect();
                Self::new(grid, amp)
            }

            pub fn zeros(grid: Grid) -> Self {
                $name {
                    amp: alloc::vec![Complex64::default(); grid.n()],
                    grid,
                    residual: None,
                }
            }

            pub fn grid(&self) -> &Grid {
                &self.grid
            }

            pub fn amp(&self) -> &[Complex64] {
                &self.amp
            }

            /// For transform outputs, `amp[i] + residual[i]` is the
            /// transform to about 30 significant digits.
            pub fn residual(&self) -> Option<&[Complex64]> {
                self.residual.as_deref()
            }

            pub fn into_amp(self) -> Vec<Complex64> {
                self.amp
            }

            pub fn scaled(&self, c: Complex64) -> Self {
                $name {
                    grid: self.grid,
                    amp: self.amp.iter().map(|z| z * c).collect(),
                    residual: None,
                }
            }

            pub fn energy(&self) -> f64 {
                pulse_energy(self)
            }

            /// Largest sample magnitude.
            pub fn peak(&self) -> f64 {
                self.amp.iter().map(|z| z.norm()).fold(0.0, f64::max)
            }
        }

        impl Field for $name {
            fn grid(&self) -> &Grid {
                &self.grid
            }

            fn amp(&self) -> &[Complex64] {
                &self.amp
            }

            fn step(&self) -> f64 {
                self.grid.$step()
            }
        }
    };
}

field_type!(
    /// Envelope `E(t)` sampled on the time axis.
    TemporalField,
    dt,
    time
);
field_type!(
    /// Envelope spectrum `E(ν)` sampled on the detuning axis.
    SpectralField,
    df,
    freq
);

/// Transform-limited Gaussian pulse with unit peak amplitude.
///
/// `fwhm_t` is the FWHM of the intensity `|E(t)|²`; `detuning` moves the
/// spectral peak away from the carrier.
pub fn gaussian_pulse(
    grid: &Grid,
    fwhm_t: f64,
    center_t: f64,
    detuning: f64,
) -> Result<TemporalField> {
    if !(fwhm_t > 0.0 && fwhm_t.is_finite()) {
        return Err(Error::Pulse("duration must be positive"));
    }
    if fwhm_t >= grid.window() {
        return Err(Error::Pulse("duration does not fit in the time window"));
    }
    if !(detuning.abs() < grid.nyquist()) {
        return Err(Error::Pulse("detuning beyond the Nyquist frequency"));
    }
    if !(center_t >= grid.t_min() && center_t <= grid.t_max()) {
        return Err(Error::Pulse("center lies outside the time window"));
    }
    let a = 2.0 * LN_2 / (fwhm_t * fwhm_t);
    TemporalField::from_fn(*grid, |t| {
        let s = t - center_t;
        let phase = -TAU * detuning * s;
        Complex64::from_polar(libm::exp(-a * s * s), phase)
    })
}

pub fn to_spectrum(f: &TemporalField) -> SpectralField {
    let grid = *f.grid();
    let (amp, residual) = centered_dft(f.amp(), f.residual(), Direction::Positive, grid.dt());
    SpectralField {
        amp,
        grid,
        residual: Some(residual),
    }
}

pub fn to_time(f: &SpectralField) -> TemporalField {
    let grid = *f.grid();
    let (amp, residual) = centered_dft(f.amp(), f.residual(), Direction::Negative, grid.df());
    TemporalField {
        amp,
        grid,
        residual: Some(residual),
    }
}

/// Time-integrated envelope `dt·Σ E(t)`. Equals the zero-detuning sample of
/// [`to_spectrum`]. Transform remainders are included when present, which
/// keeps strongly cancelling areas accurate.
pub fn pulse_area(f: &TemporalField) -> Complex64 {
    let dt = f.grid().dt();
    let rest = f.residual().unwrap_or(&[]);
    let all = || f.amp().iter().chain(rest);
    Complex64::new(
        dt * accurate_sum(all().map(|z| z.re)),
        dt * accurate_sum(all().map(|z| z.im)),
    )
}

/// `step·Σ|E|²` on the field's own axis.
pub fn pulse_energy<F: Field + ?Sized>(f: &F) -> f64 {
    f.step() * accurate_sum(f.amp().iter().map(|z| z.norm_sqr()))
}

/// Full width at half maximum of `|E|²`, found by linear interpolation of the
/// outermost half-maximum crossings around the peak sample.
pub fn intensity_fwhm<F: Field + ?Sized>(f: &F) -> Option<f64> {
    let p: Vec<f64> = f.amp().iter().map(|z| z.norm_sqr()).collect();
    let (peak_i, &peak) = p.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1))?;
    if peak <= 0.0 {
        return None;
    }
    let half = 0.5 * peak;
    let mut hi = peak_i;
    while hi + 1 < p.len() && p[hi + 1] >= half {
        hi += 1;
    }
    let mut lo = peak_i;
    while lo > 0 && p[lo - 1] >= half {
        lo -= 1;
    }
    if hi + 1 >= p.len() || lo == 0 {
        return None;
    }
    let right = hi as f64 + (p[hi] - half) / (p[hi] - p[hi + 1]);
    let left = lo as f64 - (p[lo] - half) / (p[lo] - p[lo - 1]);
    Some((right - left) * f.step())
}
