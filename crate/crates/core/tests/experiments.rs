//! Configs, distance matrices, the oracle report, the pipelines and the CLI.

use polyscat::experiments::*;
use polyscat::field::FnField;
use polyscat::geometry::{Scatterer, Vec2};
use polyscat::hiddenpath::PathStart;
use polyscat::nodal::{nodal_domains, sample_field, Window};
use std::f64::consts::PI;
use std::path::Path;
use std::process::Command;

fn config(text: &str) -> ExperimentConfig {
    ExperimentConfig::from_json(text).unwrap()
}

fn two_pi() -> f64 {
    2.0 * PI
}

#[test]
fn config_parses_with_defaults() {
    let cfg = config(r#"{"scatterers":[{"name":"a","shape":"square"}],"wave":{"k":3.0}}"#);
    assert_eq!(cfg.directions, 128);
    assert_eq!(cfg.nodes_per_wavelength, 30.0);
    assert_eq!(cfg.seed, 0);
    assert_eq!(ExperimentConfig::from_json(&cfg.to_json()).unwrap(), cfg);
}

#[test]
fn config_rejects_invalid_runs() {
    let few = r#"{"scatterers":[{"name":"a","shape":"square"}],"wave":{"k":3.0},"directions":32}"#;
    assert!(matches!(ExperimentConfig::from_json(few), Err(ExperimentError::Config(_))));
    let dup = r#"{"scatterers":[{"name":"a","shape":"square"},{"name":"a","shape":"triangle"}],"wave":{"k":3.0}}"#;
    assert!(ExperimentConfig::from_json(dup).is_err());
    let bad_k = r#"{"scatterers":[{"name":"a","shape":"square"}],"wave":{"k":-1.0}}"#;
    assert!(ExperimentConfig::from_json(bad_k).is_err());
    let unknown = r#"{"scatterers":[{"name":"a","shape":"square"}],"wave":{"k":1.0},"waves":[]}"#;
    assert!(ExperimentConfig::from_json(unknown).is_err());
}

#[test]
fn scatterer_sources_load() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("tri.json"), Shape::Triangle.scatterer().to_json()).unwrap();
    let cfg = config(
        r#"{"scatterers":[
            {"name":"a","shape":"l_hexagon","translate":[1.0,0.0]},
            {"name":"b","file":"tri.json"},
            {"name":"c","polygons":[[[0,0],[1,0],[0,1]]],"nodes_per_wavelength":12},
            {"name":"d","file":"missing.json"}
        ],"wave":{"k":2.0}}"#,
    );
    let loaded = cfg.load_scatterers(dir.path());
    let a = loaded[0].as_ref().unwrap();
    assert_eq!(a.scatterer, Shape::LHexagon.scatterer().translated(Vec2::new(1.0, 0.0)));
    assert_eq!(loaded[1].as_ref().unwrap().scatterer, Shape::Triangle.scatterer());
    assert_eq!(loaded[2].as_ref().unwrap().nodes_per_wavelength, 12.0);
    assert!(matches!(loaded[3], Err(ExperimentError::Io { .. })));
}

#[test]
fn built_in_shapes_are_distinct_and_valid() {
    for (i, a) in Shape::ALL.iter().enumerate() {
        let s = a.scatterer();
        assert!(s.exterior_connected(0.05));
        assert!(s.bounding_radius() < 0.8);
        for b in &Shape::ALL[i + 1..] {
            assert_ne!(s, b.scatterer());
        }
    }
    let tri = Shape::Triangle.vertices();
    let c = tri.iter().fold(Vec2::ZERO, |a, &p| a + p) * (1.0 / 3.0);
    assert!(c.norm() < 1e-15);
    for i in 0..3 {
        assert!((tri[i].distance(tri[(i + 1) % 3]) - 1.0).abs() < 1e-14);
    }
}

#[test]
fn distance_matrix_is_symmetric_and_round_trips() {
    let cfg = config(
        r#"{"scatterers":[
            {"name":"square","shape":"square"},
            {"name":"triangle","shape":"triangle"},
            {"name":"square_fine","shape":"square","nodes_per_wavelength":60},
            {"name":"square_coarse","shape":"square","nodes_per_wavelength":30},
            {"name":"broken","file":"nowhere.json"}
        ],"wave":{"k":6.283185307179586,"angle":0.3}}"#,
    );
    let r = run_uniqueness(&cfg, Path::new(".")).unwrap();
    let m = &r.matrix;
    let n = m.labels.len();
    for i in 0..n {
        for j in 0..n {
            assert_eq!(m.entries[i][j], m.entries[j][i]);
            if let Some(d) = m.entries[i][j] {
                assert!(d >= 0.0);
            }
        }
        if m.labels[i] != "broken" {
            assert_eq!(m.entries[i][i], Some(0.0));
        }
    }
    // failure isolation
    assert_eq!(r.failures.len(), 1);
    assert_eq!(r.failures[0].label, "broken");
    assert!(m.get("broken", "square").is_none());
    assert!(m.get("square", "triangle").unwrap() >= 1e-2);
    assert!(m.get("square_coarse", "square_fine").unwrap() <= 1e-5);

    assert_eq!(&DistanceMatrix::from_csv(&m.to_csv()).unwrap(), m);
    assert_eq!(&DistanceMatrix::from_json(&m.to_json()).unwrap(), m);
    assert!(m.to_csv().contains(",failed"));

    let dir = tempfile::tempdir().unwrap();
    r.emit(dir.path(), &cfg.wave.params().unwrap()).unwrap();
    for f in ["distances.csv", "distances.json", "farfield_square.csv"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    assert!(!dir.path().join("farfield_broken.csv").exists());
}

#[test]
fn uniqueness_needs_two_scatterers() {
    let cfg = config(r#"{"scatterers":[{"name":"a","shape":"square"}],"wave":{"k":3.0}}"#);
    assert!(matches!(run_uniqueness(&cfg, Path::new(".")), Err(ExperimentError::Config(_))));
}

#[test]
fn translation_multiplies_pattern_by_phase() {
    let cfg = config(
        r#"{"scatterers":[
            {"name":"square","shape":"square"},
            {"name":"shifted","shape":"square","translate":[0.3,0.0]}
        ],"wave":{"k":6.283185307179586,"angle":0.7}}"#,
    );
    let r = run_uniqueness(&cfg, Path::new(".")).unwrap();
    let (a, b) = (r.patterns[0].as_ref().unwrap(), r.patterns[1].as_ref().unwrap());
    assert!(r.matrix.get("square", "shifted").unwrap() > 1e-2);
    let res = translation_phase_residual(a, b, Vec2::new(0.3, 0.0));
    assert!(res <= 1e-6, "{res}");
    // the wrong shift is not compensated
    assert!(translation_phase_residual(a, b, Vec2::new(-0.3, 0.0)) > 1e-2);
}

#[test]
fn oracle_report_meets_disk_tolerances() {
    let cfg = config(
        r#"{"scatterers":[{"name":"square","shape":"square"}],"wave":{"k":6.283185307179586},
            "oracle":{"disk_cases":[{"ka":2.0,"nodes_per_wavelength":20},{"ka":10.0,"nodes_per_wavelength":20}],
                      "radial_directions":2,"radial_kr":[50,100,200],"reciprocity_pairs":4}}"#,
    );
    let r = run_oracle_check(&cfg, Path::new(".")).unwrap();
    assert!(r.disk[0].max_relative_error <= 1e-6);
    assert!(r.disk[1].max_relative_error <= 1e-5);
    for row in &r.disk {
        assert!(row.condition_estimate >= 1.0 && row.condition_estimate.is_finite());
        assert!(row.residual < 1e-10);
    }
    assert_eq!(r.radial.len(), 2);
    for row in &r.radial {
        assert!(row.errors.windows(2).all(|w| w[1] < w[0]));
    }
    assert_eq!(r.reciprocity.len(), 4);
    assert!(r.reciprocity.iter().all(|x| x.relative_error <= 1e-6));
}

#[test]
fn strips_injected_into_the_nodal_pipeline_are_flat() {
    let cfg = config(
        r#"{"scatterers":[{"name":"square","shape":"square"}],"wave":{"k":3.141592653589793},
            "nodal":{"half_width":2.5,"spacing":0.05,"synthetic":{"plane_standing":{"normal":[1.0,0.0]}}}}"#,
    );
    let a = run_nodal_pipeline(&cfg, Path::new(".")).unwrap();
    assert!(a.report.synthetic);
    assert!(!a.report.flat_segments.is_empty());
    assert!(a.report.ordering_violations.is_empty());
    assert!(a.svg.starts_with("<svg"));
    let dir = tempfile::tempdir().unwrap();
    a.emit(dir.path()).unwrap();
    let text = std::fs::read_to_string(dir.path().join("nodal.json")).unwrap();
    assert_eq!(polyscat::nodal::NodalDecomposition::from_json(&text).unwrap(), a.decomposition);
}

#[test]
fn strips_path_pipeline_is_certified_and_walk_visits_crossings() {
    let cfg = config(
        r#"{"scatterers":[{"name":"free","polygons":[[[10,10],[10.5,10],[10,10.5]]]}],
            "wave":{"k":3.141592653589793},
            "nodal":{"half_width":3.0,"spacing":0.05,"synthetic":{"plane_standing":{"normal":[1.0,0.0]}}},
            "path":{"anchor":[[-2.5,0.0],[1.0,0.0]],"target":[0.0,0.0],"escape_radius":1.2}}"#,
    );
    let field = polyscat::oracle::SyntheticField::plane_standing(PI, Vec2::new(1.0, 0.0));
    let s = Scatterer::empty();
    let f = sample_field(&field, &s, Window::centered(Vec2::ZERO, 3.0), 0.05).unwrap();
    let d = nodal_domains(&f);
    let a = analyse_path(&cfg, "strips", &f, &d);
    assert!(a.report.certified, "{:?}", a.report);
    let crossings = a.path.as_ref().unwrap().crossings.len();
    assert_eq!(a.report.walk.len(), crossings);
    assert!(crossings >= 3);
    let dir = tempfile::tempdir().unwrap();
    a.emit(dir.path()).unwrap();
    assert!(dir.path().join("path.svg").exists());
    assert_eq!(a.report.start, Some(PathStart::anchor(Vec2::new(-2.5, 0.0), Vec2::new(1.0, 0.0))));
}

#[test]
fn target_on_critical_point_is_reported() {
    let cfg = config(
        r#"{"scatterers":[{"name":"free","shape":"square"}],"wave":{"k":4.442882938158366},
            "path":{"anchor":[[-0.5,-0.3],[1.0,0.0]],"target":[0.0,0.0],"escape_radius":1.0}}"#,
    );
    let field = FnField::new(PI * 2f64.sqrt(), |x: Vec2| {
        let (sx, cx) = (PI * x.x).sin_cos();
        let (sy, cy) = (PI * x.y).sin_cos();
        (sx * sy, Vec2::new(PI * cx * sy, PI * sx * cy))
    });
    let s = Scatterer::empty();
    let f = sample_field(&field, &s, Window::centered(Vec2::ZERO, 2.0), 0.02).unwrap();
    let d = nodal_domains(&f);
    let a = analyse_path(&cfg, "saddle", &f, &d);
    assert!(!a.report.certified);
    let err = a.report.error.unwrap();
    assert!(err.contains("not a regular nodal point"), "{err}");
    assert!(a.path.is_none());
}

fn run_cli(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_polyscat")).args(args).output().unwrap()
}

#[test]
fn cli_runs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("cfg.json");
    std::fs::write(
        &cfg_path,
        format!(
            r#"{{"scatterers":[{{"name":"square","shape":"square"}},{{"name":"pentagon","shape":"pentagon"}}],
                "wave":{{"k":{}}},"nodes_per_wavelength":20}}"#,
            two_pi()
        ),
    )
    .unwrap();
    let cfg = cfg_path.to_str().unwrap();
    let mut docs = Vec::new();
    for run in ["a", "b"] {
        let out = dir.path().join(run);
        let o = run_cli(&["uniqueness", "--config", cfg, "--out", out.to_str().unwrap(), "--seed", "4"]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        docs.push(std::fs::read(out.join("distances.json")).unwrap());
        let o = run_cli(&["farfield", "--config", cfg, "--out", out.to_str().unwrap()]);
        assert!(o.status.success());
        let csv = std::fs::read_to_string(out.join("farfield_pentagon.csv")).unwrap();
        assert_eq!(polyscat::solver::FarFieldPattern::from_csv(&csv).unwrap().len(), 128);
    }
    assert_eq!(docs[0], docs[1]);

    let out = dir.path().join("solve");
    let o = run_cli(&["solve", "--config", cfg, "--out", out.to_str().unwrap(), "--verbose"]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknowns"));
    let summary: SolveSummary = serde_json::from_slice(&std::fs::read(out.join("solve.json")).unwrap()).unwrap();
    assert_eq!(summary.scatterer, "square");
}

#[test]
fn cli_reports_errors() {
    let o = run_cli(&["solve"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("--config"));
    let o = run_cli(&["solve", "--config", "/nonexistent/cfg.json"]);
    assert!(!o.status.success());
    let o = run_cli(&["frobnicate"]);
    assert!(!o.status.success());
}
