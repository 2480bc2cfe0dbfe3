#![allow(clippy::approx_constant)]

mod common;

use std::f64::consts::PI;
use std::time::Instant;

use zapsim_core::*;

fn st(eta: f64) -> HeraldedState {
    HeraldedState::new(eta).unwrap()
}

fn variance(v: &[f64]) -> f64 {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0)
}

#[test]
fn pdf_is_normalized() {
    for eta in [0.0, 0.25, 0.62, 1.0] {
        let s = st(eta);
        let pts: Vec<f64> = (-24..=24).map(|k| k as f64 * 0.5).collect();
        let total = common::integrate_pieces(&|x| quadrature_pdf(&s, x), &pts, 1e-14);
        assert!((total - 1.0).abs() < 1e-9, "eta {eta}: {total}");
        assert!((-60..=60).all(|k| quadrature_pdf(&s, k as f64 * 0.1) >= 0.0));
    }
}

#[test]
fn pdf_mixture_value() {
    let e = (-1.0f64).exp() / PI.sqrt();
    let want = 0.62 * 2.0 * e + 0.38 * e;
    let got = quadrature_pdf(&st(0.62), 1.0);
    assert!((got - want).abs() < 1e-15);
    // Same value from the normalized mixture of the two numerically
    // normalized components.
    let vac = |x: f64| (-x * x).exp();
    let one = |x: f64| 2.0 * x * x * (-x * x).exp();
    let pts: Vec<f64> = (-24..=24).map(|k| k as f64 * 0.5).collect();
    let nv = common::integrate_pieces(&vac, &pts, 1e-15);
    let n1 = common::integrate_pieces(&one, &pts, 1e-15);
    assert!((nv - PI.sqrt()).abs() < 1e-12 && (n1 - PI.sqrt()).abs() < 1e-12);
    let numeric = 0.62 * one(1.0) / n1 + 0.38 * vac(1.0) / nv;
    assert!((got - numeric).abs() < 1e-12);
}

#[test]
fn sample_variances() {
    let v0 = sample_quadratures(&st(0.0), 1_000_000, 11).unwrap();
    assert!((variance(v0.values()) - 0.5).abs() < 0.002);
    let v1 = sample_quadratures(&st(1.0), 1_000_000, 12).unwrap();
    assert!((variance(v1.values()) - 1.5).abs() < 0.004);
}

#[test]
fn sampler_follows_the_cdf() {
    // Kolmogorov distance against the closed-form CDF.
    let s = st(0.62);
    let q = sample_quadratures(&s, 200_000, 13).unwrap();
    let mut v = q.values().to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    let d = v
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let c = zapsim_core::quantum::quadrature_cdf(&s, x);
            (c - i as f64 / n).abs().max((c - (i + 1) as f64 / n).abs())
        })
        .fold(0.0, f64::max);
    // 1.63/√n is the 1% critical value.
    assert!(d < 1.63 / n.sqrt(), "{d}");
}

#[test]
fn estimator_is_consistent() {
    let start = Instant::now();
    for (i, eta) in [0.0, 0.25, 0.3, 0.5, 0.62, 1.0].into_iter().enumerate() {
        let q = sample_quadratures(&st(eta), 100_000, 100 + i as u64).unwrap();
        let e = estimate_eta(&q).unwrap();
        assert!((e.raw - eta).abs() < 3.0 * e.stderr, "eta {eta}: {e:?}");
        assert!((0.0..=1.0).contains(&e.eta));
    }
    assert!(start.elapsed().as_secs_f64() < 5.0);
}

#[test]
fn vacuum_estimate_is_near_zero() {
    let q = sample_quadratures(&st(0.0), 400_000, 1).unwrap();
    let e = estimate_eta(&q).unwrap();
    assert!(e.eta < 3.0 * e.stderr);
    assert!(e.stderr < 0.003);
}

#[test]
fn wigner_is_normalized() {
    for eta in [0.0, 0.5, 0.62, 1.0] {
        let s = st(eta);
        let total = common::integrate(
            &|x| common::integrate(&|p| wigner(&s, x, p), -6.0, 6.0, 1e-12),
            -6.0,
            6.0,
            1e-11,
        );
        assert!((total - 1.0).abs() < 1e-6, "eta {eta}: {total}");
    }
}

#[test]
fn wigner_marginal_is_the_quadrature_density() {
    for eta in [0.0, 0.37, 0.62, 1.0] {
        let s = st(eta);
        for k in -12..=12 {
            let x = k as f64 * 0.25;
            let m = common::integrate(&|p| wigner(&s, x, p), -8.0, 8.0, 1e-13);
            assert!((m - quadrature_pdf(&s, x)).abs() < 1e-6, "eta {eta} x {x}");
        }
    }
}

#[test]
fn wigner_origin_and_sign() {
    for eta in [0.0, 0.49, 0.5, 0.62, 1.0] {
        let s = st(eta);
        let w0 = wigner(&s, 0.0, 0.0);
        assert!((w0 - (1.0 - 2.0 * eta) / PI).abs() < 1e-12);
        assert_eq!(is_nonclassical(&s), w0 < 0.0, "eta {eta}");
    }
    assert!((wigner(&st(0.0), 0.0, 0.0) - 0.318_31).abs() < 1e-5);
    assert!((wigner(&st(0.62), 0.0, 0.0) + 0.076_39).abs() < 1e-5);
}

#[test]
fn wigner_grid_symmetry() {
    for eta in [0.0, 0.3, 0.62] {
        let g = wigner_grid(&st(eta), 4.0, 41).unwrap();
        let n = g.n_side();
        let c = n / 2;
        for i in 0..n {
            for j in 0..n {
                let v = g.at(i, j);
                assert!((v - g.at(j, i)).abs() < 1e-12);
                assert!((v - g.at(n - 1 - i, j)).abs() < 1e-12);
            }
            assert!((g.at(c, i) - g.at(i, c)).abs() < 1e-12);
        }
    }
    let g = wigner_grid(&st(0.62), 4.0, 41).unwrap();
    assert_eq!(g.min().1, 20);
    assert_eq!(g.min().2, 20);
}
