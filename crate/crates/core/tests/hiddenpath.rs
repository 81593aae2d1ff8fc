//! Hidden-path construction, verification, the reflection test and the flat
//! point walk, on analytic fields and on a computed square-scatterer field.

use polyscat::field::{Field, FnField};
use polyscat::geometry::{Line, Polygon, Reflect, Scatterer, Vec2};
use polyscat::hiddenpath::*;
use polyscat::nodal::*;
use polyscat::oracle::SyntheticField;
use polyscat::solver::{assemble, solve_density, Density, WaveParams};
use std::f64::consts::PI;

fn strips() -> SyntheticField {
    SyntheticField::plane_standing(PI, Vec2::new(1.0, 0.0))
}

fn unit_square() -> Scatterer {
    Scatterer::from_polygon(
        Polygon::new(vec![
            Vec2::new(-0.5, -0.5),
            Vec2::new(0.5, -0.5),
            Vec2::new(0.5, 0.5),
            Vec2::new(-0.5, 0.5),
        ])
        .unwrap(),
    )
}

fn square_field(k: f64) -> Density {
    let w = WaveParams::from_angle(k, 0.3).unwrap();
    solve_density(assemble(&unit_square(), &w, 30.0).unwrap()).unwrap()
}

/// Nodal vertex with the largest gradient among those well inside the window
/// and away from critical points.
fn regular_target(f: &SampledField<'_>, d: &NodalDecomposition, max_norm: f64) -> Vec2 {
    let h = f.h();
    let mut best = (0.0, Vec2::ZERO);
    for pl in &d.polylines {
        for &p in &pl.points {
            if p.norm() > max_norm || d.critical_points.iter().any(|c| c.distance(p) < 10.0 * h) {
                continue;
            }
            let Ok(smp) = f.evaluate(p) else { continue };
            let g = smp.real_gradient().norm();
            if g > best.0 {
                best = (g, p);
            }
        }
    }
    assert!(best.0 > 0.0, "no regular nodal vertex");
    best.1
}

#[test]
fn strips_path_is_certified() {
    let field = strips();
    let s = Scatterer::empty();
    let f = sample_field(&field, &s, Window::centered(Vec2::ZERO, 3.0), 0.05).unwrap();
    let d = nodal_domains(&f);
    let start = PathStart::anchor(Vec2::new(-2.5, 0.0), Vec2::new(1.0, 0.0));
    let p = build_path(&f, &d, &start, Some(Vec2::ZERO), 1.2).unwrap();
    let r = verify_path(&p, &f, &d);
    assert!(r.certified, "{:?}", r.failures);
    // crosses x = -2, -1, 0 once each
    assert_eq!(r.crossings.len(), 3);
    for c in &r.crossings {
        assert!((c.angle_deg - 90.0).abs() <= 5.0);
        assert!((c.point.x - c.point.x.round()).abs() < 1e-6);
    }
    assert!(p.end().norm() >= p.escape_radius);
    assert!(p.max_turn_deg() <= MAX_TURN_DEG);
}

#[test]
fn path_without_nodal_set_is_a_straight_ray() {
    let field = FnField::new(1.0, |x: Vec2| (1.0 + 0.1 * x.x, Vec2::new(0.1, 0.0)));
    let s = Scatterer::empty();
    let f = sample_field(&field, &s, Window::centered(Vec2::ZERO, 3.0), 0.05).unwrap();
    let d = nodal_domains(&f);
    let start = PathStart::anchor(Vec2::new(0.2, 0.1), Vec2::new(0.0, 1.0));
    let p = build_path(&f, &d, &start, None, 1.0).unwrap();
    assert!(p.crossings.is_empty());
    let r = verify_path(&p, &f, &d);
    assert!(r.certified, "{:?}", r.failures);
    for smp in &p.samples {
        assert!((smp.point.x - 0.2).abs() < 1e-12);
    }
    assert!(p.end().norm() >= 1.0);
}

#[test]
fn tangential_crossing_is_rejected() {
    let field = strips();
    let s = Scatterer::empty();
    let f = sample_field(&field, &s, Window::centered(Vec2::ZERO, 3.0), 0.05).unwrap();
    let d = nodal_domains(&f);
    // straight line meeting x = 0 at 20 degrees
    let dir = Vec2::new(20f64.to_radians().sin(), 20f64.to_radians().cos());
    let a = Vec2::new(-0.3, -0.8);
    let pts: Vec<Vec2> = (0..=200).map(|i| a + dir * (i as f64 * 0.015)).collect();
    let start = PathStart::anchor(a, dir);
    let p = HiddenPath::from_points(&pts, start, None, 0.5);
    let r = verify_path(&p, &f, &d);
    assert!(!r.certified);
    assert_eq!(r.crossings.len(), 1);
    assert!((r.crossings[0].angle_deg - 20.0).abs() < 0.5);
}

#[test]
fn grazing_a_critical_point_is_rejected() {
    // v = sin(πx)·sin(πy) has a saddle at the origin
    let field = FnField::new(PI * 2f64.sqrt(), |x: Vec2| {
        let (sx, cx) = (PI * x.x).sin_cos();
        let (sy, cy) = (PI * x.y).sin_cos();
        (sx * sy, Vec2::new(PI * cx * sy, PI * sx * cy))
    });
    let s = Scatterer::empty();
    let f = sample_field(&field, &s, Window::centered(Vec2::ZERO, 2.0), 0.02).unwrap();
    let d = nodal_domains(&f);
    assert!(d.critical_points.iter().any(|c| c.norm() < 0.05));
    let dir = Vec2::new(1.0, 1.0).normalized();
    let a = Vec2::new(-0.5, -0.49);
    let pts: Vec<Vec2> = (0..=100).map(|i| a + dir * (i as f64 * 0.02)).collect();
    let p = HiddenPath::from_points(&pts, PathStart::anchor(a, dir), None, 1.0);
    let r = verify_path(&p, &f, &d);
    assert!(!r.avoids_critical_points);
    assert!(!r.certified);
}

#[test]
fn zero_field_has_no_regular_start() {
    let field = FnField::new(1.0, |_| (0.0, Vec2::ZERO));
    let err = pick_start(&unit_square(), &field, 5, 7, 1e-3).unwrap_err();
    assert_eq!(err, PathError::NoRegularBoundaryPoint);
}

#[test]
fn start_on_square_is_interior_to_a_cell() {
    let u = square_field(2.0 * PI);
    let s = unit_square();
    let a = pick_start(&s, &u, 5, 11, 1e-3 * 2.0 * PI).unwrap();
    let b = pick_start(&s, &u, 5, 11, 1e-3 * 2.0 * PI).unwrap();
    assert_eq!(a, b);
    match a.kind {
        StartKind::Boundary { cell_param, .. } => assert!((0.15..=0.85).contains(&cell_param)),
        StartKind::Anchor => panic!("expected a boundary start"),
    }
    assert!(s.distance_to_boundary(a.point) < 1e-12);
    assert!(a.normal_derivative.abs() >= 1e-3 * 2.0 * PI);
    // the normal points away from the square
    assert!(!s.contains(a.point + a.normal * 0.01));
}

#[test]
fn square_path_is_certified() {
    let k = 2.0 * PI;
    let u = square_field(k);
    let s = unit_square();
    let f = sample_field(&u, &s, Window::centered(Vec2::ZERO, 2.5), 1.0 / 40.0).unwrap();
    let d = nodal_domains(&f);
    let start = pick_start(&s, &u, 5, 3, d.params.grad_floor).unwrap();
    let y = regular_target(&f, &d, 1.2);
    let p = build_path(&f, &d, &start, Some(y), 1.0).unwrap();
    let r = verify_path(&p, &f, &d);
    assert!(r.certified, "{:?}", r.failures);
    assert!(!r.crossings.is_empty());
    for c in &r.crossings {
        assert!((85.0..=95.0).contains(&(90.0 + (90.0 - c.angle_deg))));
        assert!(c.grad_norm >= d.params.grad_floor);
    }
    let svg = render_path_svg(&d, &s, &p, &[]);
    assert!(svg.contains("red"));
    let back = HiddenPath::from_json(&p.to_json()).unwrap();
    assert_eq!(back, p);
}

#[test]
fn odd_field_passes_reflection_test() {
    let k = 2.0 * PI;
    let field = FnField::new(k, move |x: Vec2| ((k * x.x).sin(), Vec2::new(k * (k * x.x).cos(), 0.0)));
    let s = Scatterer::empty();
    let win = Window::centered(Vec2::ZERO, 1.0);
    let f = sample_field(&field, &s, win, 0.02).unwrap();
    let d = nodal_domains(&f);
    let flats = flat_points(&d, 0.5, f.h());
    let seg = flats.iter().find(|g| g.witness_point.x.abs() < 1e-9).expect("flat axis");
    let frame = reflect_check(&field, &s, seg, win, 0.02, f.h()).unwrap();
    assert!(frame.oddness_residual <= 1e-10, "{}", frame.oddness_residual);
    assert!(!frame.refuted);
    assert_eq!(frame.e_plus.len(), frame.e_minus.len());
}

#[test]
fn even_field_fails_reflection_test() {
    let k = 2.0 * PI;
    let even = FnField::new(k, move |x: Vec2| ((k * x.x).cos(), Vec2::new(-k * (k * x.x).sin(), 0.0)));
    let odd = FnField::new(k, move |x: Vec2| ((k * x.x).sin(), Vec2::new(k * (k * x.x).cos(), 0.0)));
    let s = Scatterer::empty();
    let win = Window::centered(Vec2::ZERO, 1.0);
    let f = sample_field(&odd, &s, win, 0.02).unwrap();
    let d = nodal_domains(&f);
    let flats = flat_points(&d, 0.5, f.h());
    let seg = flats.iter().find(|g| g.witness_point.x.abs() < 1e-9).unwrap();
    let frame = reflect_check(&even, &s, seg, win, 0.02, f.h()).unwrap();
    assert!(frame.oddness_residual >= 1.0);
    assert!(frame.refuted);
}

#[test]
fn reflected_node_sets_match_exactly() {
    let field = strips();
    let s = unit_square();
    let win = Window::centered(Vec2::ZERO, 2.0);
    let f = sample_field(&field, &s, win, 0.04).unwrap();
    let d = nodal_domains(&f);
    let flats = flat_points(&d, 0.5, f.h());
    let seg = flats.iter().find(|g| (g.witness_point.x - 1.0).abs() < 1e-6).expect("flat line beside the square");
    let frame = reflect_check(&field, &s, seg, win, 0.04, f.h()).unwrap();
    let mirrored: Vec<(i64, i64)> = frame.e_plus.iter().map(|&(a, b)| (a, -b)).collect();
    assert_eq!(mirrored, frame.e_minus);
    for &(a, b) in frame.e_plus.iter().chain(&frame.e_minus) {
        let x = frame.node(a, b);
        assert!(!s.contains(x) && win.contains(x));
        let rx = x.reflect(&frame.line);
        assert!(rx.distance(frame.node(a, -b)) < 1e-12);
    }
}

#[test]
fn walk_on_strips_visits_every_crossing() {
    let field = strips();
    let s = Scatterer::empty();
    let f = sample_field(&field, &s, Window::centered(Vec2::ZERO, 3.0), 0.05).unwrap();
    let d = nodal_domains(&f);
    let start = PathStart::anchor(Vec2::new(-2.5, 0.0), Vec2::new(1.0, 0.0));
    let p = build_path(&f, &d, &start, Some(Vec2::ZERO), 1.2).unwrap();
    let visits = flat_point_walk(&p, &d, &f, 0.5, f.h());
    assert_eq!(visits.len(), p.crossings.len());
    assert!(visits.windows(2).all(|w| w[1].t > w[0].t));
    assert!(visits.iter().all(|v| v.residual <= v.threshold));
}

#[test]
fn walk_on_square_field_finds_no_flat_point() {
    let k = 2.0 * PI;
    let u = square_field(k);
    let s = unit_square();
    let f = sample_field(&u, &s, Window::centered(Vec2::ZERO, 2.5), 1.0 / 40.0).unwrap();
    let d = nodal_domains(&f);
    let start = pick_start(&s, &u, 5, 3, d.params.grad_floor).unwrap();
    let y = regular_target(&f, &d, 1.2);
    let p = build_path(&f, &d, &start, Some(y), 1.0).unwrap();
    assert!(flat_point_walk(&p, &d, &f, d.params.min_length, d.params.dev_tol).is_empty());
}

mod props {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn odd_part_has_zero_residual(
            angle in 0.0..PI,
            px in -0.3..0.3f64,
            py in -0.3..0.3f64,
            w1 in 0.0..(2.0 * PI),
            w2 in 0.0..(2.0 * PI),
        ) {
            let k = 2.0 * PI;
            let base = SyntheticField::sum_of_plane_waves(k, vec![
                polyscat::oracle::PlaneTerm {
                    direction: Vec2::from_angle(w1),
                    coefficient: 1.0,
                    phase: 0.0,
                },
                polyscat::oracle::PlaneTerm {
                    direction: Vec2::from_angle(w2),
                    coefficient: 0.7,
                    phase: 0.4,
                },
            ]);
            let line = Line::new(Vec2::new(px, py), Vec2::from_angle(angle)).unwrap();
            let odd = OddPart { field: &base, line };
            let seg = FlatSegment {
                line,
                extent: polyscat::geometry::Interval { lo: -0.5, hi: 0.5 },
                max_deviation: 0.0,
                witness_point: line.point,
                polyline: 0,
                first: 0,
                last: 0,
            };
            let win = Window::centered(Vec2::ZERO, 1.0);
            let frame = reflect_check(&odd, &Scatterer::empty(), &seg, win, 0.05, 0.05).unwrap();
            let scale = base.sample(Vec2::ZERO).unwrap().value.norm().max(1.0);
            prop_assert!(frame.oddness_residual <= 1e-12 * scale);
        }
    }
}
