//! Temporal modes: normalization, overlaps and delay scans.
//!
//! A delay `τ` is applied as the spectral phase ramp `exp(+2πiντ)`, which
//! moves a field to later times by exactly `τ` (band-limited, no sample
//! shifting). The overlap of a delayed local oscillator with a signal is then
//!
//! ```text
//! ⟨lo(τ)|sig⟩ = df · Σ_ν conj(LO(ν)) · SIG(ν) · exp(-2πiντ)
//! ```
//!
//! which is what [`DelayCorrelator`] evaluates.

use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft::{accurate_sum, centered_dft_fast, Direction};
use crate::field::{pulse_energy, to_spectrum, Grid, SpectralField, TemporalField};
use crate::medium::{energy_transmission, propagate, MediumParams};

/// Energy tolerance accepted for a "normalized" mode.
pub const NORM_TOLERANCE: f64 = 1e-9;

/// Spectral samples whose correlation product is below this fraction of the
/// largest one are skipped in delay scans; the neglected sum is bounded by
/// `n · CUTOFF` relative to the peak term.
const SUPPORT_CUTOFF: f64 = 1e-24;

/// Sampled curve with strictly increasing abscissae.
#[derive(Clone, Debug, PartialEq)]
pub struct ScanCurve {
    xs: Vec<f64>,
    ys: Vec<f64>,
    pub meta: CurveMeta,
}

/// Free-form description attached to a curve.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CurveMeta {
    pub label: String,
    pub params: Vec<(String, f64)>,
}

impl CurveMeta {
    pub fn new(label: impl Into<String>) -> Self {
        CurveMeta {
            label: label.into(),
            params: Vec::new(),
        }
    }

    pub fn with(mut self, key: impl Into<String>, value: f64) -> Self {
        self.params.push((key.into(), value));
        self
    }
}

impl ScanCurve {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>, meta: CurveMeta) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::Curve("xs and ys differ in length"));
        }
        if xs.iter().chain(&ys).any(|v| !v.is_finite()) {
            return Err(Error::Curve("non-finite value"));
        }
        if xs.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Curve("abscissae not strictly increasing"));
        }
        Ok(ScanCurve { xs, ys, meta })
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn ys(&self) -> &[f64] {
        &self.ys
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    /// Same curve scaled so its maximum is 1 (unchanged if the maximum is 0).
    pub fn peak_normalized(&self) -> ScanCurve {
        let peak = self.ys.iter().cloned().fold(0.0, f64::max);
        let ys = if peak > 0.0 {
            self.ys.iter().map(|y| y / peak).collect()
        } else {
            self.ys.clone()
        };
        ScanCurve {
            xs: self.xs.clone(),
            ys,
            meta: self.meta.clone(),
        }
    }
}

/// Unit-energy copy of `f`.
pub fn normalize(f: &TemporalField) -> Result<TemporalField> {
    let e = pulse_energy(f);
    if !(e > 0.0) {
        return Err(Error::ZeroEnergy);
    }
    Ok(f.scaled(Complex64::new(1.0 / libm::sqrt(e), 0.0)))
}

pub(crate) fn normalize_spectrum(f: &SpectralField) -> Result<SpectralField> {
    let e = pulse_energy(f);
    if !(e > 0.0) {
        return Err(Error::ZeroEnergy);
    }
    Ok(f.scaled(Complex64::new(1.0 / libm::sqrt(e), 0.0)))
}

fn check_normalized(e: f64) -> Result<()> {
    if (e - 1.0).abs() > NORM_TOLERANCE {
        return Err(Error::NotNormalized(e));
    }
    Ok(())
}

fn inner(step: f64, a: &[Complex64], b: &[Complex64]) -> Complex64 {
    let terms = || a.iter().zip(b).map(|(x, y)| x.conj() * y);
    Complex64::new(
        step * accurate_sum(terms().map(|z| z.re)),
        step * accurate_sum(terms().map(|z| z.im)),
    )
}

/// Inner product `⟨a|b⟩ = dt·Σ conj(a)·b` of two normalized modes.
pub fn overlap(a: &TemporalField, b: &TemporalField) -> Result<Complex64> {
    if a.grid() != b.grid() {
        return Err(Error::GridMismatch);
    }
    check_normalized(pulse_energy(a))?;
    check_normalized(pulse_energy(b))?;
    Ok(inner(a.grid().dt(), a.amp(), b.amp()))
}

/// Frequency-domain form of [`overlap`], `df·Σ conj(A)·B`.
pub fn spectral_overlap(a: &SpectralField, b: &SpectralField) -> Result<Complex64> {
    if a.grid() != b.grid() {
        return Err(Error::GridMismatch);
    }
    check_normalized(pulse_energy(a))?;
    check_normalized(pulse_energy(b))?;
    Ok(inner(a.grid().df(), a.amp(), b.amp()))
}

/// Field delayed by `tau` (moved to later times).
pub fn delay(f: &SpectralField, tau: f64) -> SpectralField {
    let grid = *f.grid();
    let amp = f
        .amp()
        .iter()
        .zip(grid.freqs())
        .map(|(z, nu)| z * Complex64::from_polar(1.0, TAU * nu * tau))
        .collect();
    SpectralField::new(grid, amp).expect("unit-modulus phase keeps samples finite")
}

/// Largest delay magnitude a scan may request: a quarter of the window.
pub fn max_delay(grid: &Grid) -> f64 {
    0.25 * grid.window()
}

fn check_delay(grid: &Grid, tau: f64) -> Result<()> {
    let limit = max_delay(grid);
    if !(tau.abs() <= limit) {
        return Err(Error::DelayOutOfRange { delay: tau, limit });
    }
    Ok(())
}

/// Overlap of a delayed local oscillator with a fixed signal, as a function of
/// the delay.
///
/// Holds the product `conj(LO)·SIG` restricted to the frequency band where it
/// is not negligible. Evaluating one delay is `O(band)`; the evaluation is
/// pure, so delay points can be computed in any order or concurrently.
#[derive(Clone, Debug)]
pub struct DelayCorrelator {
    grid: Grid,
    first: usize,
    product: Vec<Complex64>,
}

/// Re-seed the phase recurrence this often to bound its drift.
const PHASE_RESEED: usize = 512;

impl DelayCorrelator {
    /// Both spectra must share a grid; they are used as given (normalize them
    /// first if a normalized overlap is wanted).
    pub fn new(lo: &SpectralField, sig: &SpectralField) -> Result<Self> {
        if lo.grid() != sig.grid() {
            return Err(Error::GridMismatch);
        }
        let grid = *lo.grid();
        let full: Vec<Complex64> = lo
            .amp()
            .iter()
            .zip(sig.amp())
            .map(|(a, b)| a.conj() * b)
            .collect();
        let peak = full.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let keep = |z: &Complex64| z.norm() > SUPPORT_CUTOFF * peak;
        let (first, last) = match (full.iter().position(keep), full.iter().rposition(keep)) {
            (Some(a), Some(b)) => (a, b + 1),
            _ => (0, 0),
        };
        Ok(DelayCorrelator {
            grid,
            first,
            product: full[first..last].to_vec(),
        })
    }

    /// Normalizes both modes, then correlates them.
    pub fn normalized(lo: &SpectralField, sig: &SpectralField) -> Result<Self> {
        Self::new(&normalize_spectrum(lo)?, &normalize_spectrum(sig)?)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// `⟨lo(τ)|sig⟩` for any real delay.
    pub fn at(&self, tau: f64) -> Complex64 {
        let df = self.grid.df();
        let mut re = crate::dd::Dd::ZERO;
        let mut im = crate::dd::Dd::ZERO;
        for (c, chunk) in self.product.chunks(PHASE_RESEED).enumerate() {
            let j0 = self.first + c * PHASE_RESEED;
            let nu0 = self.grid.freq(j0);
            let mut phasor = Complex64::from_polar(1.0, -TAU * nu0 * tau);
            let step = Complex64::from_polar(1.0, -TAU * df * tau);
            let mut acc = Complex64::default();
            for p in chunk {
                acc += p * phasor;
                phasor *= step;
            }
            re = re + crate::dd::Dd::from_f64(acc.re);
            im = im + crate::dd::Dd::from_f64(acc.im);
        }
        Complex64::new(re.to_f64(), im.to_f64()) * df
    }

    /// Checked variant of [`at`](Self::at) enforcing the scan range.
    pub fn checked_at(&self, tau: f64) -> Result<Complex64> {
        check_delay(&self.grid, tau)?;
        Ok(self.at(tau))
    }

    /// Correlation at every on-grid delay `τ_k = grid.time(k)` at once.
    pub fn on_grid(&self) -> Vec<Complex64> {
        let mut full = alloc::vec![Complex64::default(); self.grid.n()];
        full[self.first..self.first + self.product.len()].copy_from_slice(&self.product);
        centered_dft_fast(&full, Direction::Negative, self.grid.df())
    }

    /// Delay maximizing `|⟨lo(τ)|sig⟩|` within `±max_delay`, refined off-grid
    /// by golden-section search. Ties go to the smaller delay.
    pub fn best_delay(&self) -> (f64, f64) {
        let grid = self.grid;
        let limit = max_delay(&grid);
        let values = self.on_grid();
        let mut best: Option<(usize, f64)> = None;
        for (k, z) in values.iter().enumerate() {
            if grid.time(k).abs() > limit {
                continue;
            }
            let m = z.norm();
            if best.map_or(true, |(_, b)| m > b) {
                best = Some((k, m));
            }
        }
        let Some((k, _)) = best else {
            return (0.0, self.at(0.0).norm());
        };
        let center = grid.time(k);
        let on_grid = self.at(center).norm();
        let objective = |tau: f64| self.at(tau).norm();
        let (lo, hi) = (
            (center - grid.dt()).max(-limit),
            (center + grid.dt()).min(limit),
        );
        let (tau, value) = golden_max(objective, lo, hi, 1e-6 * grid.dt());
        if value > on_grid {
            (tau, value)
        } else {
            (center, on_grid)
        }
    }
}

/// Golden-section search for the maximum of a unimodal function on `[a, b]`.
pub(crate) fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

fn scan(
    correlator: &DelayCorrelator,
    delays: &[f64],
    map: impl Fn(Complex64) -> f64,
    meta: CurveMeta,
) -> Result<ScanCurve> {
    for &tau in delays {
        check_delay(correlator.grid(), tau)?;
    }
    let ys = delays.iter().map(|&tau| map(correlator.at(tau))).collect();
    ScanCurve::new(delays.to_vec(), ys, meta)
}

/// Linear cross-correlation `|⟨lo(τ)|ŝig⟩|` of the normalized signal with the
/// normalized local oscillator. `sig` is the field as it leaves the medium.
pub fn visibility_curve(
    sig: &TemporalField,
    lo: &TemporalField,
    delays: &[f64],
) -> Result<ScanCurve> {
    if sig.grid() != lo.grid() {
        return Err(Error::GridMismatch);
    }
    let correlator = DelayCorrelator::normalized(&to_spectrum(lo), &to_spectrum(sig))?;
    scan(
        &correlator,
        delays,
        |z| z.norm(),
        CurveMeta::new("visibility"),
    )
}

/// Homodyne efficiency versus delay: `η(τ) = eta_base·|⟨lo(τ)|H·f̂⟩|²` with
/// `f̂` the normalized input mode. This equals `eta_base·T_E·|⟨lo(τ)|f̂_out⟩|²`.
pub fn eta_curve(
    input: &TemporalField,
    m: &MediumParams,
    lo: &TemporalField,
    eta_base: f64,
    delays: &[f64],
) -> Result<ScanCurve> {
    let correlator = EtaCorrelator::new(input, m, lo, eta_base)?;
    let meta = CurveMeta::new("eta")
        .with("depth", m.depth)
        .with("t2", m.t2)
        .with("eta_base", eta_base)
        .with("transmission", correlator.transmission);
    scan(&correlator.inner, delays, |z| eta_base * z.norm_sqr(), meta)
}

pub(crate) fn check_efficiency(eta: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::Efficiency(eta));
    }
    Ok(())
}

/// Correlator for `η(τ)` scans, exposing the parts the efficiency curve is
/// built from.
#[derive(Clone, Debug)]
pub struct EtaCorrelator {
    pub inner: DelayCorrelator,
    pub eta_base: f64,
    /// Energy transmission `T_E` of the input through the medium.
    pub transmission: f64,
}

impl EtaCorrelator {
    pub fn new(
        input: &TemporalField,
        m: &MediumParams,
        lo: &TemporalField,
        eta_base: f64,
    ) -> Result<Self> {
        check_efficiency(eta_base)?;
        if input.grid() != lo.grid() {
            return Err(Error::GridMismatch);
        }
        let f = normalize_spectrum(&to_spectrum(input))?;
        let transmission = energy_transmission(&f, m)?;
        let out = propagate(&f, m)?;
        let lo = if core::ptr::eq(input, lo) {
            f
        } else {
            normalize_spectrum(&to_spectrum(lo))?
        };
        Ok(EtaCorrelator {
            inner: DelayCorrelator::new(&lo, &out)?,
            eta_base,
            transmission,
        })
    }

    pub fn eta_at(&self, tau: f64) -> f64 {
        self.eta_base * self.inner.at(tau).norm_sqr()
    }

    /// Delay and value of the largest efficiency.
    pub fn peak(&self) -> (f64, f64) {
        let (tau, v) = self.inner.best_delay();
        (tau, self.eta_base * v * v)
    }
}

/// Abscissae of the deep minima of a curve: local minima no higher than
/// `contrast` times the lower of the two maxima reached by climbing away from
/// them on either side. Each one separates two lobes.
pub fn find_nulls(curve: &ScanCurve, contrast: f64) -> Vec<f64> {
    let y = curve.ys();
    let mut nulls = Vec::new();
    for i in 1..y.len().saturating_sub(1) {
        if !(y[i] <= y[i - 1] && y[i] < y[i + 1]) {
            continue;
        }
        let mut l = i;
        while l > 0 && y[l - 1] >= y[l] {
            l -= 1;
        }
        let mut r = i;
        while r + 1 < y.len() && y[r + 1] >= y[r] {
            r += 1;
        }
        if l < i && r > i && y[i] <= contrast * y[l].min(y[r]) {
            nulls.push(curve.xs()[i]);
        }
    }
    nulls
}

/// Location and value of the curve maximum; ties resolve to the smallest
/// abscissa.
pub fn peak_eta(curve: &ScanCurve) -> Result<(f64, f64)> {
    let mut best: Option<(f64, f64)> = None;
    for (&x, &y) in curve.xs().iter().zip(curve.ys()) {
        if best.map_or(true, |(_, b)| y > b) {
            best = Some((x, y));
        }
    }
    best.ok_or(Error::EmptyCurve)
}
