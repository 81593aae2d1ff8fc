//! Bessel/Hankel values against independent references: ascending power
//! series coded here, and values computed offline at 30 digits (mpmath).

use polyscat::specfun::{bessel01, bessel_j, bessel_j_orders, bessel_y, bessel_y_orders, hankel1};
use std::f64::consts::PI;

/// (x, J0, J1, Y0, Y1), 30-digit references rounded to 20 significant digits.
const REFERENCE: &[(f64, f64, f64, f64, f64)] = &[
    (1e-3, 0.999999750000015625, 0.00049999993750000260417, -4.471416611375923269, -636.62216723113942807),
    (0.5, 0.93846980724081290423, 0.24226845767487388638, -0.44451873350670655715, -1.4714723926702430692),
    (2.0, 0.22389077914123566805, 0.5767248077568733872, 0.5103756726497451196, -0.10703243154093754689),
    (5.0, -0.17759677131433830435, -0.32757913759146522204, -0.30851762524903378007, 0.1478631433912268448),
    (11.9, 0.025049441699589563728, -0.22898324966192407078, -0.2298332139433750764, -0.034711498334030529216),
    (12.1, 0.069666773606807388498, -0.21574897337692477718, -0.21843838055092545768, -0.078736931451395820909),
    (25.0, 0.096266783275958116174, -0.12535024958028990465, -0.12724943226800613783, -0.098829964783237410053),
    (30.0, -0.086367983581040211336, -0.11875106261662293652, -0.11729573168666402525, 0.084425570661747234891),
    (80.0, -0.06974216551221002284, -0.05605729667571257751, -0.055620339089770000037, 0.069395913784588047296),
    (199.5, -0.039613637334785146078, -0.040371312360519674413, -0.04027190420866077668, 0.039512830287001401633),
];

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// 40-term ascending series for J0.
fn j0_series(x: f64) -> f64 {
    let q = -(x * x) / 4.0;
    let (mut term, mut sum) = (1.0, 1.0);
    for m in 1..40 {
        term *= q / (m as f64 * m as f64);
        sum += term;
    }
    sum
}

/// 40-term ascending series for J1.
fn j1_series(x: f64) -> f64 {
    let q = -(x * x) / 4.0;
    let mut term = x / 2.0;
    let mut sum = term;
    for m in 1..40 {
        term *= q / (m as f64 * (m + 1) as f64);
        sum += term;
    }
    sum
}

/// Ascending series for Y0 with harmonic numbers.
fn y0_series(x: f64) -> f64 {
    let q = -(x * x) / 4.0;
    let mut term = 1.0;
    let mut harmonic = 0.0;
    let mut tail = 0.0;
    for m in 1..40 {
        term *= q / (m as f64 * m as f64);
        harmonic += 1.0 / m as f64;
        tail += term * harmonic;
    }
    2.0 / PI * (((x / 2.0).ln() + 0.577_215_664_901_532_9) * j0_series(x) - tail)
}

#[test]
fn reference_values_first_and_second_kind() {
    for &(x, j0, j1, y0, y1) in REFERENCE {
        let b = bessel01(x);
        assert!(rel(b.j0, j0) <= 1e-12, "J0({x}) = {} vs {j0}", b.j0);
        assert!(rel(b.j1, j1) <= 1e-12, "J1({x}) = {} vs {j1}", b.j1);
        assert!(rel(b.y0, y0) <= 1e-12, "Y0({x}) = {} vs {y0}", b.y0);
        assert!(rel(b.y1, y1) <= 1e-12, "Y1({x}) = {} vs {y1}", b.y1);
    }
}

#[test]
fn j0_at_two_against_series() {
    let a = bessel_j(0, 2.0).unwrap();
    assert!(rel(a, j0_series(2.0)) <= 1e-13);
}

#[test]
fn y0_at_five_against_series() {
    let a = bessel_y(0, 5.0).unwrap();
    assert!(rel(a, y0_series(5.0)) <= 1e-12);
}

#[test]
fn h1_at_two_against_series_and_wronskian() {
    let h = hankel1(1, 2.0).unwrap();
    assert!(rel(h.re, j1_series(2.0)) <= 1e-13);
    // Y1 from the Wronskian with series J0, J1 and series Y0.
    let y1 = (j1_series(2.0) * y0_series(2.0) - 2.0 / (PI * 2.0)) / j0_series(2.0);
    assert!(rel(h.im, y1) <= 1e-12, "{} vs {y1}", h.im);
}

#[test]
fn wronskian_at_1_7() {
    let b = bessel01(1.7);
    let w = b.j1 * b.y0 - b.j0 * b.y1;
    assert!((w - 2.0 / (PI * 1.7)).abs() <= 1e-12);
}

#[test]
fn wronskian_on_log_grid() {
    let n = 200;
    for i in 0..=n {
        let x = 10f64.powf(-2.0 + 4.0 * i as f64 / n as f64);
        let b = bessel01(x);
        let w = b.j1 * b.y0 - b.j0 * b.y1;
        let expect = 2.0 / (PI * x);
        assert!(((w - expect) / expect).abs() <= 1e-11, "x = {x}");
    }
}

#[test]
fn y0_log_structure_near_zero() {
    let x = 1e-3;
    let b = bessel01(x);
    let remainder = b.y0 - 2.0 / PI * ((x / 2.0).ln() + 0.577_215_664_901_532_9) * b.j0;
    // The remainder is (2/pi) * (x/2)^2 + O(x^4).
    assert!(remainder.abs() < 1e-6, "{remainder}");
    assert!((remainder - 2.0 / PI * (x / 2.0).powi(2)).abs() < 1e-12);
}

#[test]
fn hankel_leading_asymptotic_at_80() {
    let x = 80.0;
    let h = hankel1(0, x).unwrap();
    let lead = num_complex::Complex64::from_polar((2.0 / (PI * x)).sqrt(), x - PI / 4.0);
    assert!((h - lead).norm() / lead.norm() <= 2e-3);
}

#[test]
fn recurrence_holds() {
    for xi in 0..100 {
        let x = 0.5 + 49.5 * xi as f64 / 99.0;
        let j = bessel_j_orders(21, x);
        for n in 1..=20 {
            let lhs = j[n + 1];
            let rhs = 2.0 * n as f64 / x * j[n] - j[n - 1];
            assert!((lhs - rhs).abs() <= 1e-10, "n={n} x={x}");
        }
    }
}

#[test]
fn higher_orders() {
    assert!(rel(bessel_j(5, 7.5).unwrap(), 0.28347390516255045867) <= 1e-12);
    assert!(rel(bessel_y(5, 7.5).unwrap(), 0.17541805694546512319) <= 1e-12);
    assert!(rel(bessel_j_orders(40, 30.0)[40], 0.00036120236088965853089) <= 1e-11);
    assert!(rel(bessel_y_orders(40, 30.0)[40], -33.393668907330313538) <= 1e-11);
}

#[test]
fn derivative_identity() {
    let step = 1e-6;
    for &x in &[0.3, 1.0, 4.2, 9.9, 17.0, 40.0] {
        let fd = (bessel01(x + step).j0 - bessel01(x - step).j0) / (2.0 * step);
        assert!((fd + bessel01(x).j1).abs() <= 1e-8, "x={x}");
    }
}
