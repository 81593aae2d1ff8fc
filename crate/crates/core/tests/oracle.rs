//! Closed-form disk solution and synthetic Helmholtz fields.

use num_complex::Complex64;
use polyscat::field::Field;
use polyscat::geometry::Vec2;
use polyscat::oracle::*;
use polyscat::solver::{incident_field, WaveParams};
use polyscat::specfun::hankel1;
use proptest::prelude::*;
use std::f64::consts::PI;

#[test]
fn rotating_the_incidence_rotates_the_pattern() {
    let m = 128;
    let step = 2.0 * PI / m as f64;
    for &ka in &[0.5, 2.0, 10.0, 25.0] {
        let base = disk_far_field(ka, 1.0, Vec2::new(1.0, 0.0), m).unwrap();
        for shift in [1usize, 7, 40] {
            let phi = shift as f64 * step;
            let rot = disk_far_field(ka, 1.0, Vec2::from_angle(phi), m).unwrap();
            for i in 0..m {
                let err = (rot.values[(i + shift) % m] - base.values[i]).norm();
                assert!(err <= 1e-12 * base.max_abs(), "ka {ka}: {err:e}");
            }
        }
    }
}

#[test]
fn pattern_is_symmetric_about_the_incidence_axis() {
    // omega on a grid direction so that θ_w ± t are both grid angles
    let m = 256;
    let j = 37;
    let theta_w = 2.0 * PI * j as f64 / m as f64;
    let ff = disk_far_field(3.0, 1.3, Vec2::from_angle(theta_w), m).unwrap();
    for t in 1..m / 2 {
        let a = ff.values[(j + t) % m];
        let b = ff.values[(j + m - t) % m];
        assert!((a - b).norm() <= 1e-13 * ff.max_abs());
    }
}

#[test]
fn truncation_is_converged() {
    for &ka in &[0.1, 1.0, 5.0, 15.0, 30.0] {
        let n = disk_truncation(ka);
        let a = disk_far_field_truncated(ka, 1.0, Vec2::new(1.0, 0.0), 64, n).unwrap();
        let b = disk_far_field_truncated(ka, 1.0, Vec2::new(1.0, 0.0), 64, n + 10).unwrap();
        for (x, y) in a.values.iter().zip(&b.values) {
            assert!((x - y).norm() <= 1e-13 * a.max_abs().max(1.0));
        }
    }
}

#[test]
fn dirichlet_condition_on_the_circle() {
    for &(k, a) in &[(2.0, 1.0), (10.0, 1.0), (4.0, 0.7)] {
        for i in 0..24 {
            let x = Vec2::from_angle(2.0 * PI * i as f64 / 24.0 + 0.01) * a;
            let u = disk_total_field(k, a, Vec2::from_angle(0.3), x).unwrap();
            assert!(u.norm() <= 1e-10, "k {k}: {}", u.norm());
        }
    }
}

#[test]
fn near_and_far_field_agree_at_large_radius() {
    let (k, a) = (2.0, 1.0);
    let omega = Vec2::new(1.0, 0.0);
    let ff = disk_far_field(k, a, omega, 64).unwrap();
    let w = WaveParams::new(k, omega).unwrap();
    let mut errs = Vec::new();
    for &r in &[50.0 * a, 100.0 * a] {
        let mut worst: f64 = 0.0;
        for (i, xhat) in ff.directions().iter().enumerate() {
            let x = *xhat * r;
            let us = disk_total_field(k, a, omega, x).unwrap() - incident_field(&w, x).0;
            let e = (us * Complex64::from_polar(r.sqrt(), -k * r) - ff.values[i]).norm();
            worst = worst.max(e);
        }
        errs.push(worst);
    }
    // O(1/r): small at 50a and halving when r doubles
    assert!(errs[0] <= 0.1 * ff.max_abs());
    let ratio = errs[1] / errs[0];
    assert!((0.4..=0.6).contains(&ratio), "{ratio}");
}

#[test]
fn small_disk_scatters_logarithmically() {
    // sound-soft scattering in the plane fades only like 1/ln(ka): the
    // monopole J0(ka)/H0(ka) ≈ 1/(1 + (2i/π)(ln(ka/2) + γ)) dominates
    let omega = Vec2::from_angle(1.1);
    let w = WaveParams::new(1.0, omega).unwrap();
    let gamma = 0.577_215_664_901_532_9;
    let x = Vec2::new(3.0, 0.0);
    let mut prev = f64::INFINITY;
    for &a in &[1e-3, 1e-6, 1e-12] {
        let us = incident_field(&w, x).0 - disk_total_field(1.0, a, omega, x).unwrap();
        let c0 = 1.0 / (Complex64::new(1.0, 0.0) + Complex64::new(0.0, 2.0 / PI) * ((a / 2.0f64).ln() + gamma));
        let leading = c0 * hankel1(0, 3.0).unwrap();
        assert!((us - leading).norm() <= 1e-4 * leading.norm(), "a = {a}");
        assert!(us.norm() < prev);
        prev = us.norm();
    }
}

#[test]
fn disk_far_field_is_reciprocal() {
    // u∞(x̂; ω) = u∞(-ω; -x̂) for pattern directions on the grid
    let m = 64;
    let k = 3.0;
    let pats: Vec<_> = (0..m)
        .map(|j| disk_far_field(k, 1.0, Vec2::from_angle(2.0 * PI * j as f64 / m as f64), m).unwrap())
        .collect();
    for a in (0..m).step_by(5) {
        for b in (0..m).step_by(7) {
            // x̂ = θ_b under ω = θ_a, against x̂ = θ_a + π under ω = θ_b + π
            let lhs = pats[a].values[b];
            let rhs = pats[(b + m / 2) % m].values[(a + m / 2) % m];
            assert!((lhs - rhs).norm() <= 1e-12);
        }
    }
}

#[test]
fn oracle_errors() {
    assert!(matches!(disk_far_field(31.0, 1.0, Vec2::new(1.0, 0.0), 64), Err(OracleError::KaTooLarge(_))));
    assert!(matches!(disk_far_field(1.0, 1.0, Vec2::new(1.0, 0.0), 63), Err(OracleError::TooFewDirections(63))));
    assert!(matches!(
        disk_total_field(1.0, 1.0, Vec2::new(1.0, 0.0), Vec2::new(0.5, 0.0)),
        Err(OracleError::PointInsideDisk)
    ));
}

#[test]
fn plane_standing_vanishes_on_its_lines() {
    let k = 1.7;
    let f = SyntheticField::plane_standing(k, Vec2::new(1.0, 0.0));
    for m in -5i32..=5 {
        let (v, g) = synthetic_eval(&f, Vec2::new(m as f64 * PI / k, 0.37 * m as f64));
        assert!(v.abs() <= 1e-14 * (1.0 + m.abs() as f64));
        assert!((g.norm() - k).abs() <= 1e-12);
    }
    let b = SyntheticField::radial_bessel(2.0);
    assert_eq!(synthetic_eval(&b, Vec2::ZERO), (1.0, Vec2::ZERO));
    assert!(!b.is_complex());
}

fn any_synthetic() -> impl Strategy<Value = SyntheticField> {
    let term = (0.0..2.0 * PI, -2.0..2.0f64, -PI..PI).prop_map(|(a, c, p)| PlaneTerm {
        direction: Vec2::from_angle(a),
        coefficient: c,
        phase: p,
    });
    prop_oneof![
        (0.3..5.0f64, 0.0..2.0 * PI).prop_map(|(k, a)| SyntheticField::plane_standing(k, Vec2::from_angle(a))),
        (0.3..5.0f64).prop_map(SyntheticField::radial_bessel),
        (0.3..5.0f64, prop::collection::vec(term, 1..5))
            .prop_map(|(k, t)| SyntheticField::sum_of_plane_waves(k, t)),
    ]
}

proptest! {
    #[test]
    fn synthetic_fields_solve_helmholtz(f in any_synthetic(), x in -5.0..5.0f64, y in -5.0..5.0f64) {
        let p = Vec2::new(x, y);
        prop_assume!(p.norm() > 1e-2);
        let k = f.wavenumber();
        let h = 1e-4;
        let v = |q: Vec2| synthetic_eval(&f, q).0;
        let lap = (v(p + Vec2::new(h, 0.0)) + v(p - Vec2::new(h, 0.0)) + v(p + Vec2::new(0.0, h))
            + v(p - Vec2::new(0.0, h)) - 4.0 * v(p)) / (h * h);
        let target = -k * k * v(p);
        // relative to the field scale: the stencil error is O(h² k⁴ |v|_max)
        let scale = k * k * f_scale(&f);
        prop_assert!((lap - target).abs() <= 1e-5 * scale, "{lap} vs {target}");
        // exact gradient against central differences
        let (_, g) = synthetic_eval(&f, p);
        let gx = (v(p + Vec2::new(h, 0.0)) - v(p - Vec2::new(h, 0.0))) / (2.0 * h);
        let gy = (v(p + Vec2::new(0.0, h)) - v(p - Vec2::new(0.0, h))) / (2.0 * h);
        prop_assert!((gx - g.x).abs() + (gy - g.y).abs() <= 1e-6 * k * f_scale(&f));
    }

    #[test]
    fn disk_pattern_is_finite(ka in 0.05..30.0f64, theta in 0.0..2.0 * PI) {
        let ff = disk_far_field(ka, 1.0, Vec2::from_angle(theta), 64).unwrap();
        prop_assert!(ff.values.iter().all(|v| v.re.is_finite() && v.im.is_finite()));
    }
}

/// Upper bound on |v| for the synthetic families.
fn f_scale(f: &SyntheticField) -> f64 {
    match &f.kind {
        SyntheticKind::SumOfPlaneWaves { terms } => terms.iter().map(|t| t.coefficient.abs()).sum::<f64>().max(1e-3),
        _ => 1.0,
    }
}
