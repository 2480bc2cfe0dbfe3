//! Vacuum / single-photon mixtures as seen by a homodyne detector.
//!
//! Quadratures use `x = (a + a†)/√2`, so the vacuum variance is 1/2.

use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::error::{Error, Result};

/// Quadrature variance of the vacuum in the convention used here.
pub const VACUUM_VARIANCE: f64 = 0.5;

/// Human-readable form of the convention, for file headers.
pub const CONVENTION: &str = "x = (a + a^dagger)/sqrt(2), vacuum variance 1/2";

/// Inverse-CDF table used by the sampler.
pub const SAMPLER_NODES: usize = 1 << 14;
pub const SAMPLER_RANGE: f64 = 6.0;

const FRAC_1_SQRT_PI: f64 = 0.564_189_583_547_756_3;

/// `ρ = η|1⟩⟨1| + (1-η)|0⟩⟨0|`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HeraldedState {
    eta: f64,
}

impl HeraldedState {
    pub fn new(eta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&eta) {
            return Err(Error::Efficiency(eta));
        }
        Ok(HeraldedState { eta })
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }
}

/// Homodyne outcomes plus the seed they were drawn with, if synthetic.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureSample {
    values: Vec<f64>,
    pub seed: Option<u64>,
}

impl QuadratureSample {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(QuadratureSample { values, seed: None })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Phase-averaged quadrature density.
pub fn quadrature_pdf(s: &HeraldedState, x: f64) -> f64 {
    let g = libm::exp(-x * x) * FRAC_1_SQRT_PI;
    (1.0 - s.eta) * g + s.eta * 2.0 * x * x * g
}

/// Cumulative distribution of [`quadrature_pdf`].
pub fn quadrature_cdf(s: &HeraldedState, x: f64) -> f64 {
    let vac = 0.5 * (1.0 + libm::erf(x));
    let one = vac - x * libm::exp(-x * x) * FRAC_1_SQRT_PI;
    (1.0 - s.eta) * vac + s.eta * one
}

struct InverseCdf {
    xs: Vec<f64>,
    cdf: Vec<f64>,
}

impl InverseCdf {
    fn new(s: &HeraldedState) -> Self {
        let n = SAMPLER_NODES;
        let xs: Vec<f64> = (0..n)
            .map(|i| SAMPLER_RANGE * (2.0 * i as f64 - (n - 1) as f64) / (n - 1) as f64)
            .collect();
        let lo = quadrature_cdf(s, xs[0]);
        let hi = quadrature_cdf(s, xs[n - 1]);
        let mut cdf: Vec<f64> = xs
            .iter()
            .map(|&x| (quadrature_cdf(s, x) - lo) / (hi - lo))
            .collect();
        // Keep the table monotone where the one-photon density vanishes.
        for i in 1..n {
            if cdf[i] < cdf[i - 1] {
                cdf[i] = cdf[i - 1];
            }
        }
        InverseCdf { xs, cdf }
    }

    fn invert(&self, u: f64) -> f64 {
        let i = self
            .cdf
            .partition_point(|&c| c <= u)
            .clamp(1, self.xs.len() - 1);
        let (c0, c1) = (self.cdf[i - 1], self.cdf[i]);
        let (x0, x1) = (self.xs[i - 1], self.xs[i]);
        if c1 > c0 {
            x0 + (x1 - x0) * (u - c0) / (c1 - c0)
        } else {
            x0
        }
    }
}

/// Draws `n` independent quadratures; the stream depends only on `seed`.
pub fn sample_quadratures(s: &HeraldedState, n: usize, seed: u64) -> Result<QuadratureSample> {
    if n == 0 {
        return Err(Error::TooFewSamples { min: 1, actual: 0 });
    }
    let table = InverseCdf::new(s);
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let values = (0..n).map(|_| table.invert(rng.gen::<f64>())).collect();
    Ok(QuadratureSample {
        values,
        seed: Some(seed),
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EtaEstimate {
    /// Estimate clamped to [0, 1].
    pub eta: f64,
    /// `⟨x²⟩ - 1/2` before clamping.
    pub raw: f64,
    pub stderr: f64,
    pub clamped: bool,
}

/// Moment estimator `η̂ = ⟨x²⟩ - 1/2`.
pub fn estimate_eta(q: &QuadratureSample) -> Result<EtaEstimate> {
    let n = q.len();
    if n < 2 {
        return Err(Error::TooFewSamples { min: 2, actual: n });
    }
    let first = q.values[0];
    if q.values.iter().all(|&v| v == first) {
        return Err(Error::DegenerateSample);
    }
    let nf = n as f64;
    let mean = q.values.iter().map(|x| x * x).sum::<f64>() / nf;
    let var = q
        .values
        .iter()
        .map(|x| {
            let d = x * x - mean;
            d * d
        })
        .sum::<f64>()
        / (nf - 1.0);
    let raw = mean - VACUUM_VARIANCE;
    let eta = raw.clamp(0.0, 1.0);
    Ok(EtaEstimate {
        eta,
        raw,
        stderr: libm::sqrt(var / nf),
        clamped: eta != raw,
    })
}

/// Wigner function `(1-η)W₀ + ηW₁`.
pub fn wigner(s: &HeraldedState, x: f64, p: f64) -> f64 {
    let r2 = x * x + p * p;
    (1.0 - 2.0 * s.eta + 2.0 * s.eta * r2) * libm::exp(-r2) / PI
}

/// Wigner function sampled on a square grid centered at the origin.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseSpaceGrid {
    axis: Vec<f64>,
    values: Vec<f64>,
}

impl PhaseSpaceGrid {
    /// Shared coordinates of both axes.
    pub fn axis(&self) -> &[f64] {
        &self.axis
    }

    /// `W(axis[i], axis[j])`.
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.axis.len() + j]
    }

    /// Row-major values, `x` index outermost.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn n_side(&self) -> usize {
        self.axis.len()
    }

    pub fn step(&self) -> f64 {
        self.axis[1] - self.axis[0]
    }

    /// Smallest value and its `(i, j)` position (first in row-major order).
    pub fn min(&self) -> (f64, usize, usize) {
        self.extreme(|a, b| a < b)
    }

    pub fn max(&self) -> (f64, usize, usize) {
        self.extreme(|a, b| a > b)
    }

    fn extreme(&self, better: impl Fn(f64, f64) -> bool) -> (f64, usize, usize) {
        let mut best = 0;
        for (k, &v) in self.values.iter().enumerate() {
            if better(v, self.values[best]) {
                best = k;
            }
        }
        let n = self.axis.len();
        (self.values[best], best / n, best % n)
    }
}

/// Evaluates [`wigner`] on `n_side` points per axis spanning
/// `[-half_width, half_width]`. Odd `n_side` puts a node on the origin.
pub fn wigner_grid(s: &HeraldedState, half_width: f64, n_side: usize) -> Result<PhaseSpaceGrid> {
    if !(half_width > 0.0 && half_width.is_finite()) {
        return Err(Error::PhaseSpaceGrid("half width must be positive"));
    }
    if n_side < 2 {
        return Err(Error::PhaseSpaceGrid("need at least two points per side"));
    }
    let m = (n_side - 1) as f64;
    // Integer numerator keeps the axis exactly antisymmetric.
    let axis: Vec<f64> = (0..n_side)
        .map(|i| half_width * (2.0 * i as f64 - m) / m)
        .collect();
    let mut values = Vec::with_capacity(n_side * n_side);
    for &x in &axis {
        for &p in &axis {
            values.push(wigner(s, x, p));
        }
    }
    Ok(PhaseSpaceGrid { axis, values })
}

/// True when the Wigner function goes negative at the origin, i.e. `η > 1/2`.
pub fn is_nonclassical(s: &HeraldedState) -> bool {
    s.eta > 0.5
}

#[cfg(test)]
mod tests {
    use super::*;

    fn st(eta: f64) -> HeraldedState {
        HeraldedState::new(eta).unwrap()
    }

    #[test]
    fn pdf_examples() {
        assert!((quadrature_pdf(&st(0.0), 0.0) - 0.564_189_583_547_756).abs() < 1e-15);
        assert_eq!(quadrature_pdf(&st(1.0), 0.0), 0.0);
        let e = libm::exp(-1.0) / libm::sqrt(PI);
        let want = 0.62 * 2.0 * e + 0.38 * e;
        assert!((quadrature_pdf(&st(0.62), 1.0) - want).abs() < 1e-15);
    }

    #[test]
    fn state_range() {
        assert!(HeraldedState::new(-0.01).is_err());
        assert!(HeraldedState::new(1.01).is_err());
        assert!(HeraldedState::new(f64::NAN).is_err());
    }

    #[test]
    fn cdf_limits() {
        for eta in [0.0, 0.4, 1.0] {
            let s = st(eta);
            assert!(quadrature_cdf(&s, -10.0).abs() < 1e-15);
            assert!((quadrature_cdf(&s, 10.0) - 1.0).abs() < 1e-15);
            assert!((quadrature_cdf(&s, 0.0) - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn sampling_is_seeded() {
        let s = st(0.3);
        let a = sample_quadratures(&s, 1000, 7).unwrap();
        let b = sample_quadratures(&s, 1000, 7).unwrap();
        let c = sample_quadratures(&s, 1000, 8).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.values(), c.values());
        assert!(sample_quadratures(&s, 0, 1).is_err());
    }

    #[test]
    fn estimator_errors() {
        let q = QuadratureSample::new(alloc::vec![1.0]).unwrap();
        assert!(matches!(estimate_eta(&q), Err(Error::TooFewSamples { .. })));
        let q = QuadratureSample::new(alloc::vec![0.3; 5]).unwrap();
        assert_eq!(estimate_eta(&q), Err(Error::DegenerateSample));
        assert!(QuadratureSample::new(alloc::vec![0.0, f64::INFINITY]).is_err());
    }

    #[test]
    fn estimator_clamps() {
        let q = QuadratureSample::new(alloc::vec![0.1, -0.1, 0.2]).unwrap();
        let e = estimate_eta(&q).unwrap();
        assert_eq!(e.eta, 0.0);
        assert!(e.clamped && e.raw < 0.0);
    }

    #[test]
    fn wigner_origin() {
        for eta in [0.0, 0.5, 0.62, 1.0] {
            assert_eq!(wigner(&st(eta), 0.0, 0.0), (1.0 - 2.0 * eta) / PI);
        }
        assert!((wigner(&st(0.62), 0.0, 0.0) + 0.076_394).abs() < 1e-6);
    }

    #[test]
    fn nonclassicality() {
        assert!(!is_nonclassical(&st(0.5)));
        assert!(!is_nonclassical(&st(0.49)));
        assert!(is_nonclassical(&st(0.62)));
    }

    #[test]
    fn grid_shape() {
        assert!(wigner_grid(&st(0.1), 0.0, 11).is_err());
        assert!(wigner_grid(&st(0.1), 3.0, 1).is_err());
        let g = wigner_grid(&st(0.62), 4.0, 81).unwrap();
        assert_eq!(g.axis()[40], 0.0);
        let (w, i, j) = g.min();
        assert_eq!((i, j), (40, 40));
        assert_eq!(w, (1.0 - 1.24) / PI);
        let g = wigner_grid(&st(0.0), 4.0, 81).unwrap();
        let (w, i, j) = g.max();
        assert_eq!((w, i, j), (1.0 / PI, 40, 40));
    }
}
