#![allow(dead_code)]

use std::f64::consts::{LN_2, PI};

/// Adaptive Simpson quadrature.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn step(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = simpson(fa, flm, fm, a, m);
        let right = simpson(fm, frm, fb, m, b);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
                + step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
        }
    }
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    step(f, a, b, fa, fm, fb, simpson(fa, fm, fb, a, b), tol, 50)
}

/// Integral over consecutive breakpoints.
pub fn integrate_pieces(f: &dyn Fn(f64) -> f64, points: &[f64], tol: f64) -> f64 {
    points
        .windows(2)
        .map(|w| integrate(f, w[0], w[1], tol))
        .sum()
}

/// Spectral intensity of the unit-peak Gaussian pulse with intensity FWHM
/// `fwhm` (up to a constant): `exp(-π²·fwhm²·ν²/ln2)`.
pub fn gaussian_spectral_intensity(fwhm: f64, nu: f64) -> f64 {
    (-PI * PI * fwhm * fwhm * nu * nu / LN_2).exp()
}

/// `|H(ν)|²` of the Lorentzian medium.
pub fn medium_power(depth: f64, t2: f64, nu: f64) -> f64 {
    let x = 2.0 * PI * nu * t2;
    (-2.0 * depth / (1.0 + x * x)).exp()
}

/// Energy transmission of a resonant Gaussian pulse by direct quadrature.
pub fn transmission_oracle(fwhm: f64, depth: f64, t2: f64) -> f64 {
    let s = |nu: f64| gaussian_spectral_intensity(fwhm, nu);
    // The loss is confined near the line; integrate it separately.
    let loss = |nu: f64| (1.0 - medium_power(depth, t2, nu)) * s(nu);
    let line = 1.0 / (PI * t2);
    let edge = 40.0 / fwhm;
    let mut pts = vec![-edge];
    for k in [1e4, 1e3, 100.0, 10.0, 1.0] {
        pts.push(-k * line * depth.sqrt());
    }
    pts.push(0.0);
    for k in [1.0, 10.0, 100.0, 1e3, 1e4] {
        pts.push(k * line * depth.sqrt());
    }
    pts.push(edge);
    let total = (PI * LN_2).sqrt() / (PI * fwhm);
    1.0 - integrate_pieces(&loss, &pts, 1e-18 * total) / total
}

/// Magnitude of the overlap of two normalized Gaussian modes with intensity
/// FWHMs `fa`, `fb` and centers `dt` apart.
pub fn gaussian_overlap(fa: f64, fb: f64, dt: f64) -> f64 {
    let sa2 = fa * fa / (4.0 * LN_2);
    let sb2 = fb * fb / (4.0 * LN_2);
    let s = sa2 + sb2;
    (2.0 * (sa2 * sb2).sqrt() / s).sqrt() * (-dt * dt / (2.0 * s)).exp()
}
