mod common;

use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use zapsim_core::*;

fn random_field(grid: Grid, seed: u64) -> TemporalField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let amp = (0..grid.n())
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    TemporalField::new(grid, amp).unwrap()
}

fn rms_rel(a: &[Complex64], b: &[Complex64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
    let den: f64 = b.iter().map(|y| y.norm_sqr()).sum();
    (num / den).sqrt()
}

fn direct_dft(f: &TemporalField) -> Vec<Complex64> {
    let g = f.grid();
    g.freqs()
        .map(|nu| {
            g.times()
                .zip(f.amp())
                .map(|(t, z)| z * Complex64::from_polar(g.dt(), 2.0 * PI * nu * t))
                .sum()
        })
        .collect()
}

#[test]
fn grid_examples() {
    assert_eq!(make_grid(8, 1.0).unwrap().df(), 0.125);
    let g = make_grid(1 << 19, 10e-15).unwrap();
    assert!((g.window() - 5.24288e-9).abs() < 1e-20);
    assert!((g.df() - 190.734_863_281_25e6).abs() < 1e-3);
    assert!(make_grid(7, 1.0).is_err());
    assert!(make_grid(8, 0.0).is_err());
    assert!(make_grid(1, 1.0).is_err());
}

#[test]
fn matches_direct_summation() {
    let g = make_grid(256, 3e-15).unwrap();
    let f = random_field(g, 1);
    let oracle = direct_dft(&f);
    assert!(rms_rel(to_spectrum(&f).amp(), &oracle) < 1e-13);
}

#[test]
fn round_trip_and_parseval_on_random_fields() {
    for (n, seed) in [(64, 2), (4096, 3), (1 << 16, 4)] {
        let g = make_grid(n, 10e-15).unwrap();
        let f = random_field(g, seed);
        let s = to_spectrum(&f);
        // Drop the transform remainders so the round trip starts from plain
        // samples, as any caller-built spectrum would.
        let s_plain = SpectralField::new(g, s.amp().to_vec()).unwrap();
        let back = to_time(&s_plain);
        assert!(rms_rel(back.amp(), f.amp()) < 1e-12, "n = {n}");
        let (et, ef) = (pulse_energy(&f), pulse_energy(&s));
        assert!(((et - ef) / et).abs() < 1e-12, "n = {n}");
    }
}

#[test]
fn round_trip_on_the_default_grid() {
    let g = Grid::default_grid();
    let f = gaussian_pulse(&g, 100e-15, 0.3e-12, 2e12).unwrap();
    let s = to_spectrum(&f);
    let back = to_time(&s);
    assert!(rms_rel(back.amp(), f.amp()) < 1e-15);
    assert!(((pulse_energy(&f) - pulse_energy(&s)) / pulse_energy(&f)).abs() < 1e-14);
}

#[test]
fn area_is_the_zero_detuning_bin() {
    let g = make_grid(1 << 12, 10e-15).unwrap();
    let f = random_field(g, 5);
    let area = pulse_area(&f);
    let bin = to_spectrum(&f).amp()[g.center()];
    assert!((area - bin).norm() / area.norm() < 1e-12);
}

#[test]
fn constant_and_single_bin_fields() {
    let g = make_grid(64, 1e-12).unwrap();
    let one = TemporalField::from_fn(g, |_| Complex64::new(1.0, 0.0)).unwrap();
    let s = to_spectrum(&one);
    for (j, z) in s.amp().iter().enumerate() {
        if j == g.center() {
            assert!((z.re - g.window()).abs() < 1e-24);
        } else {
            assert!(z.norm() < 1e-27);
        }
    }
    let mut bin = vec![Complex64::default(); 64];
    bin[40] = Complex64::new(2.0, 1.0);
    let t = to_time(&SpectralField::new(g, bin).unwrap());
    let m = 5f64.sqrt() * g.df();
    assert!(t.amp().iter().all(|z| (z.norm() - m).abs() < 1e-12 * m));
}

#[test]
fn conjugate_symmetric_spectrum_gives_real_field() {
    let g = make_grid(1024, 10e-15).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let c = g.center();
    let mut spec = vec![Complex64::default(); g.n()];
    spec[c] = Complex64::new(rng.gen_range(-1.0..1.0), 0.0);
    for k in 1..c {
        let z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        spec[c + k] = z;
        spec[c - k] = z.conj();
    }
    let t = to_time(&SpectralField::new(g, spec).unwrap());
    let peak = t.peak();
    assert!(t.amp().iter().all(|z| z.im.abs() < 1e-12 * peak));
}

#[test]
fn gaussian_pulse_widths() {
    let g = Grid::default_grid();
    let f = gaussian_pulse(&g, 100e-15, 0.0, 0.0).unwrap();
    assert!((f.peak() - 1.0).abs() < 1e-15);
    assert!((intensity_fwhm(&f).unwrap() - 100e-15).abs() <= g.dt());
    let s = to_spectrum(&f);
    // Time-bandwidth product 2·ln2/π of a Gaussian.
    let want = 2.0 * LN_2 / PI / 100e-15;
    let got = intensity_fwhm(&s).unwrap();
    assert!((got - want).abs() < 2.0 * g.df(), "{got}");
    assert!((got - 4.41e12).abs() < 0.01e12);
    let peak = s
        .amp()
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
        .unwrap()
        .0;
    assert_eq!(peak, g.center());
}

#[test]
fn detuned_pulse_peaks_at_its_detuning() {
    let g = make_grid(1 << 14, 10e-15).unwrap();
    let nu0 = 400.0 * g.df();
    let s = to_spectrum(&gaussian_pulse(&g, 100e-15, 0.0, nu0).unwrap());
    let peak = s
        .amp()
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
        .unwrap()
        .0;
    assert_eq!(peak, g.center() + 400);
}

#[test]
fn gaussian_area_against_closed_form() {
    let g = Grid::default_grid();
    let fw = 100e-15;
    let area = pulse_area(&gaussian_pulse(&g, fw, 0.0, 0.0).unwrap());
    let exact = fw * (PI / (2.0 * LN_2)).sqrt();
    assert!(((area.re - exact) / exact).abs() < 1e-6);
    assert!(area.im.abs() < 1e-12 * exact);
}

#[test]
fn pulse_parameter_errors() {
    let g = make_grid(1024, 10e-15).unwrap();
    assert!(gaussian_pulse(&g, g.window(), 0.0, 0.0).is_err());
    assert!(gaussian_pulse(&g, 0.0, 0.0, 0.0).is_err());
    assert!(gaussian_pulse(&g, 100e-15, 0.0, g.nyquist()).is_err());
    assert!(gaussian_pulse(&g, 100e-15, 1.0, 0.0).is_err());
}

#[test]
fn energy_is_quadratic() {
    let g = make_grid(256, 10e-15).unwrap();
    let f = random_field(g, 9);
    let e = pulse_energy(&f);
    assert!((pulse_energy(&f.scaled(Complex64::new(2.0, 0.0))) - 4.0 * e).abs() < 1e-14 * e);
    assert_eq!(pulse_energy(&TemporalField::zeros(g)), 0.0);
    assert_eq!(pulse_area(&TemporalField::zeros(g)), Complex64::default());
}
