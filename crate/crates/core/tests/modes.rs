mod common;

use num_complex::Complex64;
use zapsim_core::*;

fn input(g: &Grid) -> TemporalField {
    gaussian_pulse(g, 100e-15, 0.0, 0.0).unwrap()
}

fn delays(from_ps: f64, to_ps: f64, step_fs: f64) -> Vec<f64> {
    let n = ((to_ps - from_ps) * 1e3 / step_fs).round() as usize;
    (0..=n)
        .map(|i| (from_ps * 1e3 + i as f64 * step_fs) * 1e-15)
        .collect()
}

fn output(g: &Grid, m: &MediumParams) -> TemporalField {
    to_time(&propagate(&to_spectrum(&input(g)), m).unwrap())
}

fn local_maxima(curve: &ScanCurve) -> Vec<(f64, f64)> {
    let y = curve.ys();
    (1..y.len() - 1)
        .filter(|&i| y[i] > y[i - 1] && y[i] >= y[i + 1])
        .map(|i| (curve.xs()[i], y[i]))
        .collect()
}

#[test]
fn gaussian_overlap_oracle() {
    let g = make_grid(1 << 16, 5e-15).unwrap();
    let lo = gaussian_pulse(&g, 100e-15, 0.0, 0.0).unwrap();
    let sig = gaussian_pulse(&g, 150e-15, 0.0, 0.0).unwrap();
    let taus = [-300e-15, -40e-15, 0.0, 12.5e-15, 100e-15, 333e-15];
    let c = visibility_curve(&sig, &lo, &taus).unwrap();
    for (&tau, &v) in taus.iter().zip(c.ys()) {
        let want = common::gaussian_overlap(100e-15, 150e-15, tau);
        assert!((v - want).abs() < 1e-9, "tau {tau}: {v} vs {want}");
    }
}

#[test]
fn overlap_of_delayed_modes() {
    let g = make_grid(1 << 14, 5e-15).unwrap();
    let a = normalize(&gaussian_pulse(&g, 100e-15, 0.0, 0.0).unwrap()).unwrap();
    let b = normalize(&gaussian_pulse(&g, 100e-15, 80e-15, 0.0).unwrap()).unwrap();
    let o = overlap(&a, &b).unwrap().norm();
    assert!((o - common::gaussian_overlap(100e-15, 100e-15, 80e-15)).abs() < 1e-12);
    // Delaying `a` by the offset makes the modes coincide.
    let shifted = to_time(&delay(&to_spectrum(&a), 80e-15));
    assert!((overlap(&shifted, &b).unwrap().norm() - 1.0).abs() < 1e-12);
    assert!(matches!(
        overlap(&a, &gaussian_pulse(&g, 100e-15, 0.0, 0.0).unwrap()),
        Err(Error::NotNormalized(_))
    ));
}

#[test]
fn transparent_medium() {
    let g = Grid::default_grid();
    let m = MediumParams::resonant(0.0, 270e-12).unwrap();
    let f = input(&g);
    let taus = delays(-1.0, 1.0, 10.0);
    let v = visibility_curve(&output(&g, &m), &f, &taus).unwrap();
    let n = taus.len();
    for i in 0..n {
        assert!((v.ys()[i] - v.ys()[n - 1 - i]).abs() < 1e-12);
    }
    let c = eta_curve(&f, &m, &f, 0.62, &taus).unwrap();
    let (tau, eta) = peak_eta(&c).unwrap();
    assert!(tau.abs() < 1e-18 && (eta - 0.62).abs() < 1e-12);
    let zero = eta_curve(&f, &m, &f, 0.0, &taus).unwrap();
    assert!(zero.ys().iter().all(|&y| y == 0.0));
}

#[test]
fn preset1_has_one_dominant_peak() {
    let g = Grid::default_grid();
    let m = preset(1).unwrap().medium;
    let v = visibility_curve(&output(&g, &m), &input(&g), &delays(-1.0, 8.0, 10.0)).unwrap();
    let (_, top) = peak_eta(&v).unwrap();
    let maxima = local_maxima(&v);
    let secondary = maxima
        .iter()
        .filter(|(_, y)| *y < top)
        .map(|(_, y)| *y)
        .fold(0.0, f64::max);
    assert!(secondary < 0.25 * top, "{secondary} vs {top}");
    assert!(secondary > 0.01 * top);
}

#[test]
fn preset3_negligible_loss_strong_reshaping() {
    let g = Grid::default_grid();
    let m = preset(3).unwrap().medium;
    assert!(energy_transmission(&to_spectrum(&input(&g)), &m).unwrap() > 0.9);
    let v = visibility_curve(&output(&g, &m), &input(&g), &delays(-1.0, 8.0, 10.0)).unwrap();
    let (tp, _) = peak_eta(&v).unwrap();
    let nulls: Vec<f64> = find_nulls(&v, 0.2)
        .into_iter()
        .filter(|&t| t > tp && t <= tp + 4e-12)
        .collect();
    assert!(nulls.len() >= 2, "{nulls:?}");
    // Regression baseline: nulls near 0.13 ps and 2.26 ps.
    assert!((nulls[0] - 0.13e-12).abs() < 0.02e-12, "{nulls:?}");
    assert!((nulls[1] - 2.26e-12).abs() < 0.02e-12, "{nulls:?}");
}

#[test]
fn visibility_lobes_follow_the_field_envelope() {
    let g = Grid::default_grid();
    let m = preset(3).unwrap().medium;
    let out = output(&g, &m);
    let v = visibility_curve(&out, &input(&g), &delays(0.5, 8.0, 10.0)).unwrap();
    // Envelope maxima of the transmitted field beyond the main pulse.
    let mag: Vec<f64> = out.amp().iter().map(|z| z.norm()).collect();
    let lo = g.center() + 50;
    let hi = g.center() + 800;
    let field_peaks: Vec<f64> = (lo..hi)
        .filter(|&k| mag[k] > mag[k - 1] && mag[k] >= mag[k + 1])
        .map(|k| g.time(k))
        .collect();
    let vis_peaks: Vec<f64> = local_maxima(&v).iter().map(|p| p.0).collect();
    assert!(!field_peaks.is_empty());
    assert_eq!(
        field_peaks.len(),
        vis_peaks.len(),
        "{field_peaks:?} {vis_peaks:?}"
    );
    for (a, b) in field_peaks.iter().zip(&vis_peaks) {
        assert!((a - b).abs() < 50e-15, "{a} vs {b}");
    }
}

#[test]
fn preset5_lobes_extend_past_two_picoseconds() {
    let g = Grid::default_grid();
    let m = preset(5).unwrap().medium;
    let v = visibility_curve(&output(&g, &m), &input(&g), &delays(-1.0, 8.0, 10.0)).unwrap();
    let (_, top) = peak_eta(&v).unwrap();
    let late = local_maxima(&v)
        .into_iter()
        .filter(|(t, _)| *t > 2e-12)
        .map(|(_, y)| y)
        .fold(0.0, f64::max);
    assert!(late > 0.05 * top);
}

#[test]
fn preset5_maximum_on_a_secondary_lobe() {
    let g = Grid::default_grid();
    let m = preset(5).unwrap().medium;
    let f = input(&g);
    let c = EtaCorrelator::new(&f, &m, &f, 0.62).unwrap();
    let (tau, eta) = c.peak();
    let at_zero = c.eta_at(0.0);
    assert!(tau > 0.1e-12, "{tau}");
    assert!(eta > 2.0 * at_zero);
    // A null lies between the unperturbed peak and the maximum.
    let curve = eta_curve(&f, &m, &f, 0.62, &delays(-0.2, 1.0, 2.0)).unwrap();
    let nulls = find_nulls(&curve, 0.5);
    assert!(nulls.iter().any(|&t| t > 0.0 && t < tau), "{nulls:?}");
    // Baseline frozen from a full-resolution run.
    assert!((eta - 0.264_84).abs() < 1e-4, "{eta}");
}

#[test]
fn eta_curve_meta_and_bounds() {
    let g = Grid::default_grid();
    let m = preset(2).unwrap().medium;
    let f = input(&g);
    let c = eta_curve(&f, &m, &f, 0.62, &delays(-0.5, 3.0, 5.0)).unwrap();
    let t = c
        .meta
        .params
        .iter()
        .find(|(k, _)| k == "transmission")
        .unwrap()
        .1;
    assert!(c.ys().iter().all(|&y| y >= 0.0 && y <= 0.62 * t + 1e-15));
    let too_far = [max_delay(&g) * 1.01];
    assert!(matches!(
        eta_curve(&f, &m, &f, 0.62, &too_far),
        Err(Error::DelayOutOfRange { .. })
    ));
    assert!(matches!(
        eta_curve(&f, &m, &f, 1.3, &[0.0]),
        Err(Error::Efficiency(_))
    ));
}

#[test]
fn correlator_on_grid_matches_direct_sums() {
    let g = make_grid(1 << 14, 10e-15).unwrap();
    let m = MediumParams::resonant(200.0, 40e-12).unwrap();
    let f = input(&g);
    let c = EtaCorrelator::new(&f, &m, &f, 1.0).unwrap();
    let grid_vals = c.inner.on_grid();
    for k in [
        g.center() - 7,
        g.center(),
        g.center() + 31,
        g.center() + 400,
    ] {
        let direct = c.inner.at(g.time(k));
        assert!((grid_vals[k] - direct).norm() < 1e-12, "k {k}");
    }
    let (tau, best) = c.inner.best_delay();
    for d in [-1e-15, 1e-15] {
        assert!(c.inner.at(tau + d).norm() <= best + 1e-15);
    }
    assert!(Complex64::new(best, 0.0).norm() <= 1.0);
}
