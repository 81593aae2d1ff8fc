//! Nodal sets, domains, ordering and flat-segment detection on analytic fields
//! whose zero sets are known in closed form.

use polyscat::field::{Field, FnField};
use polyscat::geometry::{Polygon, Scatterer, Vec2};
use polyscat::nodal::*;
use polyscat::oracle::{PlaneTerm, SyntheticField};
use polyscat::specfun::bessel_j0_zero;
use std::f64::consts::PI;

fn strips() -> SyntheticField {
    SyntheticField::plane_standing(PI, Vec2::new(1.0, 0.0))
}

fn square3() -> Window {
    Window::centered(Vec2::ZERO, 3.0)
}

#[test]
fn plane_standing_samples_are_exact() {
    let f = strips();
    let s = sample_field(&f, &Scatterer::empty(), square3(), 0.1).unwrap();
    let (nx, ny) = s.dims();
    for j in (0..ny).step_by(7) {
        for i in 0..nx {
            let x = s.node(i, j);
            assert!((s.value(i, j) - (PI * x.x).sin()).abs() <= 1e-15);
        }
    }
}

#[test]
fn square_interior_is_masked() {
    let f = SyntheticField::plane_standing(2.0 * PI, Vec2::new(1.0, 0.0));
    let sq = Polygon::new(vec![
        Vec2::new(-0.5, -0.5),
        Vec2::new(0.5, -0.5),
        Vec2::new(0.5, 0.5),
        Vec2::new(-0.5, 0.5),
    ])
    .unwrap();
    let sc = Scatterer::from_polygon(sq);
    let s = sample_field(&f, &sc, Window::centered(Vec2::ZERO, 1.0), 0.04).unwrap();
    let (nx, ny) = s.dims();
    for j in 0..ny {
        for i in 0..nx {
            let x = s.node(i, j);
            if x.x.abs() < 0.49 && x.y.abs() < 0.49 {
                assert_eq!(s.mask(i, j), NodeMask::InD);
            }
            if x.x.abs() > 0.51 || x.y.abs() > 0.51 {
                assert_eq!(s.mask(i, j), NodeMask::InG);
            }
        }
    }
}

#[test]
fn coarse_grid_is_rejected() {
    let f = SyntheticField::radial_bessel(2.0 * PI);
    let err = sample_field(&f, &Scatterer::empty(), square3(), 0.1).unwrap_err();
    assert!(matches!(err, NodalError::ResolutionTooCoarse { .. }));
}

#[test]
fn linear_field_gives_one_straight_line() {
    let f = FnField::new(1.0, |x: Vec2| (x.x, Vec2::new(1.0, 0.0)));
    let s = sample_field(&f, &Scatterer::empty(), Window::centered(Vec2::ZERO, 1.0), 0.05).unwrap();
    let lines = extract_nodal_set(&s);
    assert_eq!(lines.len(), 1);
    assert!(lines[0].points.iter().all(|p| p.x.abs() <= 1e-12));
    let ys: Vec<f64> = lines[0].points.iter().map(|p| p.y).collect();
    let (lo, hi) = ys.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &y| (a.min(y), b.max(y)));
    assert!((lo + 1.0).abs() < 1e-12 && (hi - 1.0).abs() < 1e-12);
}

#[test]
fn plane_standing_gives_seven_vertical_lines() {
    let f = strips();
    let s = sample_field(&f, &Scatterer::empty(), square3(), 0.1).unwrap();
    let lines = extract_nodal_set(&s);
    assert_eq!(lines.len(), 7);
    let mut xs: Vec<f64> = lines
        .iter()
        .map(|l| {
            let x0 = l.points[0].x;
            assert!(l.points.iter().all(|p| (p.x - x0).abs() < 1e-9));
            assert!((l.length() - 6.0).abs() < 1e-9);
            x0
        })
        .collect();
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    for (x, m) in xs.iter().zip(-3..=3) {
        assert!((x - m as f64).abs() < 1e-9, "{x} vs {m}");
    }
}

#[test]
fn first_bessel_zero_is_a_closed_circle() {
    let k = 2.0;
    let f = SyntheticField::radial_bessel(k);
    let rho = bessel_j0_zero(1) / k;
    let h = 2.0 * PI / k / 20.0;
    let s = sample_field(&f, &Scatterer::empty(), Window::centered(Vec2::ZERO, 1.5 * rho), h).unwrap();
    let lines = extract_nodal_set(&s);
    assert_eq!(lines.len(), 1);
    assert!(lines[0].closed);
    for p in &lines[0].points {
        assert!((p.norm() - rho).abs() <= h);
    }
}

#[test]
fn vertices_are_consistent_with_gradients() {
    let f = SyntheticField::sum_of_plane_waves(
        3.0,
        vec![
            PlaneTerm { direction: Vec2::new(1.0, 0.2), coefficient: 1.0, phase: 0.3 },
            PlaneTerm { direction: Vec2::new(-0.3, 1.0), coefficient: 0.7, phase: -1.1 },
            PlaneTerm { direction: Vec2::new(0.6, -0.8), coefficient: 0.4, phase: 2.0 },
        ],
    );
    let h = 2.0 * PI / 3.0 / 20.0;
    let s = sample_field(&f, &Scatterer::empty(), Window::centered(Vec2::ZERO, 3.0), h).unwrap();
    for l in extract_nodal_set(&s) {
        for p in &l.points {
            let v = f.sample(*p).unwrap();
            assert!(v.value.re.abs() <= v.real_gradient().norm() * h);
        }
    }
}

#[test]
fn crossing_standing_waves_have_known_critical_points() {
    let k = PI;
    let f = SyntheticField::sum_of_plane_waves(
        k,
        vec![
            PlaneTerm { direction: Vec2::new(1.0, 0.0), coefficient: 1.0, phase: 0.0 },
            PlaneTerm { direction: Vec2::new(0.0, 1.0), coefficient: 1.0, phase: 0.0 },
        ],
    );
    let h = 0.1;
    let w = Window::centered(Vec2::new(0.03, -0.07), 2.6);
    let s = sample_field(&f, &Scatterer::empty(), w, h).unwrap();
    let found = find_critical_points(&s, 1e-3 * k);
    // v = 0 and ∇v = 0 at ((1/2 + a), (1/2 + b)) with a + b odd
    let mut expected = Vec::new();
    for a in -4i32..4 {
        for b in -4i32..4 {
            if (a + b).rem_euclid(2) == 1 {
                let p = Vec2::new(0.5 + a as f64, 0.5 + b as f64);
                let margin = 2.0 * h;
                if p.x > w.min.x + margin && p.x < w.max.x - margin && p.y > w.min.y + margin && p.y < w.max.y - margin {
                    expected.push(p);
                }
            }
        }
    }
    assert!(!expected.is_empty());
    for e in &expected {
        assert!(found.iter().any(|p| p.distance(*e) <= h), "missed {e:?}");
    }
    for p in &found {
        let v = f.sample(*p).unwrap();
        assert!(v.value.re.abs() <= 1e-6 && v.real_gradient().norm() <= 1e-3 * k);
    }
}

#[test]
fn regular_fields_have_no_critical_points() {
    let s1 = strips();
    let g = sample_field(&s1, &Scatterer::empty(), square3(), 0.1).unwrap();
    assert!(find_critical_points(&g, 1e-3 * PI).is_empty());
    let b = SyntheticField::radial_bessel(2.0);
    let g = sample_field(&b, &Scatterer::empty(), Window::centered(Vec2::ZERO, 6.0), 0.1).unwrap();
    assert!(find_critical_points(&g, 2e-3).is_empty());
}

#[test]
fn strips_form_a_path_graph() {
    let f = strips();
    let s = sample_field(&f, &Scatterer::empty(), square3(), 0.1).unwrap();
    let d = nodal_domains(&s);
    assert_eq!(d.domains.len(), 6);
    assert_eq!(d.adjacency.len(), 5);
    // sort domains by x of their seed to read off the path
    let mut by_x: Vec<usize> = (0..6).collect();
    by_x.sort_by(|&a, &b| d.domains[a].seed.x.partial_cmp(&d.domains[b].seed.x).unwrap());
    for w in by_x.windows(2) {
        assert!(d.adjacency_between(w[0], w[1]).is_some());
    }
    for e in &d.adjacency {
        assert_ne!(d.domains[e.a].sign, d.domains[e.b].sign);
        assert!(e.witness.min_grad >= d.params.grad_floor);
        assert!(e.witness.points.len() >= 5);
    }
    let order = order_domains(&d, by_x[0]).unwrap();
    assert_eq!(order, by_x);
    let mid = order_domains(&d, by_x[3]).unwrap();
    assert!(ordering_violations(&d, &mid).is_empty());
}

#[test]
fn bessel_disk_and_annulus() {
    let k = 1.0;
    let f = SyntheticField::radial_bessel(k);
    // inscribed in the second zero, containing the first
    let s = sample_field(&f, &Scatterer::empty(), Window::centered(Vec2::ZERO, 3.5), 0.1).unwrap();
    let d = nodal_domains(&s);
    assert_eq!(d.domains.len(), 2);
    assert_eq!(d.adjacency.len(), 1);
    for start in 0..2 {
        let o = order_domains(&d, start).unwrap();
        assert!(ordering_violations(&d, &o).is_empty());
    }
}

#[test]
fn domains_are_stable_under_refinement() {
    let k = 2.0;
    let fields = [
        SyntheticField::plane_standing(k, Vec2::new(0.6, 0.8)),
        SyntheticField::radial_bessel(k),
    ];
    for f in &fields {
        let h = 2.0 * PI / k / 20.0;
        let w = Window::centered(Vec2::new(0.1, 0.05), 2.5);
        let a = nodal_domains(&sample_field(f, &Scatterer::empty(), w, h).unwrap());
        let b = nodal_domains(&sample_field(f, &Scatterer::empty(), w, h / 2.0).unwrap());
        assert_eq!(a.domains.len(), b.domains.len());
        assert_eq!(a.adjacency.len(), b.adjacency.len());
    }
}

#[test]
fn straight_nodal_lines_are_flat_end_to_end() {
    let f = strips();
    let s = sample_field(&f, &Scatterer::empty(), square3(), 0.1).unwrap();
    let d = nodal_domains(&s);
    let flats = flat_points(&d, d.params.min_length, d.params.dev_tol);
    assert_eq!(flats.len(), d.polylines.len());
    for fl in &flats {
        let pl = &d.polylines[fl.polyline];
        assert_eq!((fl.first, fl.last), (0, pl.len() - 1));
        assert!((fl.extent.length() - 6.0).abs() < 1e-9);
        assert!(fl.max_deviation < 1e-9);
    }
}

#[test]
fn bessel_circles_are_not_flat() {
    // arcs of length 0.1 rho on the eighth zero: sagitta rho/800 gives a
    // best-fit deviation of 2/3 of it, above h/2 for h = lambda/200
    let k = 1.0;
    let f = SyntheticField::radial_bessel(k);
    let rho = bessel_j0_zero(8);
    let h = 2.0 * PI / 200.0;
    let w = Window::new(Vec2::new(rho - 2.0, -6.0), Vec2::new(rho + 2.0, 6.0));
    let s = sample_field(&f, &Scatterer::empty(), w, h).unwrap();
    let d = nodal_domains(&s);
    assert!(!d.polylines.is_empty());
    let sagitta_fit = (0.1 * rho).powi(2) / (8.0 * rho) * 2.0 / 3.0;
    assert!(sagitta_fit > h / 2.0);
    assert!(flat_points(&d, 0.1 * rho, h / 2.0).is_empty());
}

#[test]
fn decomposition_json_round_trips() {
    let f = SyntheticField::radial_bessel(1.0);
    let s = sample_field(&f, &Scatterer::empty(), Window::centered(Vec2::ZERO, 3.5), 0.1).unwrap();
    let mut d = nodal_domains(&s);
    d.ordering = Some(order_domains(&d, 0).unwrap());
    let back = NodalDecomposition::from_json(&d.to_json()).unwrap();
    assert_eq!(back, d);
    let svg = render_svg(&d, &Scatterer::empty(), &[]);
    assert!(svg.starts_with("<svg") && svg.contains("polyline"));
}

mod props {
    use super::*;
    use proptest::prelude::*;

    fn random_field() -> impl Strategy<Value = SyntheticField> {
        let term = (0.0..2.0 * PI, 0.2..1.0f64, -PI..PI).prop_map(|(a, c, p)| PlaneTerm {
            direction: Vec2::from_angle(a),
            coefficient: c,
            phase: p,
        });
        (1.0..3.0f64, prop::collection::vec(term, 1..4))
            .prop_map(|(k, terms)| SyntheticField::sum_of_plane_waves(k, terms))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn decomposition_invariants(f in random_field()) {
            let k = f.wavenumber();
            let h = 2.0 * PI / k / 20.0;
            let s = sample_field(&f, &Scatterer::empty(), Window::centered(Vec2::ZERO, 2.0), h).unwrap();
            let d = nodal_domains(&s);
            // labels partition the non-zero nodes and carry the sign of v
            let tiny = 1e-12 * s.max_abs_v();
            for (idx, &l) in d.labels.iter().enumerate() {
                let v = s.values()[idx];
                if v.abs() > tiny {
                    prop_assert!(l >= 0);
                    prop_assert_eq!(d.domains[l as usize].sign as f64, v.signum());
                }
            }
            for pl in &d.polylines {
                for p in &pl.points {
                    let smp = f.sample(*p).unwrap();
                    prop_assert!(smp.value.re.abs() <= smp.real_gradient().norm() * h);
                }
            }
            for e in &d.adjacency {
                prop_assert!(e.a < e.b);
                prop_assert_ne!(d.domains[e.a].sign, d.domains[e.b].sign);
                prop_assert!(e.witness.min_grad >= d.params.grad_floor);
                prop_assert!(e.witness.points.len() >= d.params.witness_points);
            }
            match order_domains(&d, 0) {
                Ok(o) => {
                    let mut sorted = o.clone();
                    sorted.sort_unstable();
                    prop_assert_eq!(sorted, (0..d.domains.len()).collect::<Vec<_>>());
                    prop_assert!(ordering_violations(&d, &o).is_empty());
                }
                Err(NodalError::DisconnectedAdjacency { components }) => {
                    prop_assert!(components.len() >= 2);
                    let total: usize = components.iter().map(|c| c.len()).sum();
                    prop_assert_eq!(total, d.domains.len());
                }
                Err(e) => prop_assert!(false, "unexpected {e}"),
            }
        }

        #[test]
        fn flat_segments_respect_their_deviation(f in random_field()) {
            let k = f.wavenumber();
            let h = 2.0 * PI / k / 20.0;
            let s = sample_field(&f, &Scatterer::empty(), Window::centered(Vec2::ZERO, 2.0), h).unwrap();
            let d = nodal_domains(&s);
            for fl in flat_points(&d, 5.0 * h, h / 2.0) {
                prop_assert!(fl.max_deviation <= h / 2.0);
                let pl = &d.polylines[fl.polyline];
                for p in &pl.points[fl.first..=fl.last] {
                    prop_assert!(fl.line.signed_distance(*p).abs() <= fl.max_deviation + 1e-15);
                    let t = fl.line.param_of(*p);
                    prop_assert!(t >= fl.extent.lo - 1e-12 && t <= fl.extent.hi + 1e-12);
                }
            }
        }
    }
}
