use super::config::{ExperimentConfig, LoadedScatterer, SyntheticSpec};
use super::{ExperimentError, TOOL_VERSION};
use crate::field::Field;
use crate::geometry::{Scatterer, Vec2};
use crate::hiddenpath::{
    build_path, flat_point_walk, pick_start, reflect_check, render_path_svg, verify_path, FlatVisit, HiddenPath,
    PathError, PathReport, PathStart,
};
use crate::nodal::{
    flat_points, flat_points_with_floor, nodal_boundedness, nodal_domains, order_domains, ordering_violations,
    render_svg, sample_field, FlatSegment, NodalBoundedness, NodalDecomposition, NodalError, SampledField, Window,
};
use crate::oracle::SyntheticField;
use crate::solver::{assemble, solve_density, Density, FarFieldPattern};
use serde::{Deserialize, Serialize};
use std::path::Path;

/// The field analysed by the pipelines: computed or injected.
pub enum PipelineField {
    Computed(Box<Density>),
    Synthetic(SyntheticField),
}

impl PipelineField {
    pub fn as_field(&self) -> &dyn Field {
        match self {
            PipelineField::Computed(d) => d.as_ref(),
            PipelineField::Synthetic(f) => f,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveSummary {
    pub tool_version: String,
    pub scatterer: String,
    pub k: f64,
    pub omega: Vec2,
    pub nodes_per_wavelength: f64,
    pub dimension: usize,
    pub residual: f64,
    pub condition_estimate: f64,
}

/// Solves for one scatterer and returns the summary and its far-field pattern.
pub fn run_solve(cfg: &ExperimentConfig, base: &Path) -> Result<(SolveSummary, FarFieldPattern), ExperimentError> {
    let s = cfg.load_entry(cfg.nodal_entry()?, base)?;
    let wave = cfg.wave.params()?;
    let d = solve_density(assemble(&s.scatterer, &wave, s.nodes_per_wavelength)?)?;
    let pattern = d.far_field(cfg.directions)?;
    Ok((
        SolveSummary {
            tool_version: TOOL_VERSION.to_string(),
            scatterer: s.name,
            k: wave.k,
            omega: wave.omega,
            nodes_per_wavelength: s.nodes_per_wavelength,
            dimension: d.coefficients().len(),
            residual: d.residual(),
            condition_estimate: d.condition_estimate(),
        },
        pattern,
    ))
}

/// Field for the nodal and path pipelines.
pub fn pipeline_field(cfg: &ExperimentConfig, s: &LoadedScatterer) -> Result<PipelineField, ExperimentError> {
    let wave = cfg.wave.params()?;
    Ok(match &cfg.nodal.synthetic {
        Some(SyntheticSpec::PlaneStanding { normal }) => {
            PipelineField::Synthetic(SyntheticField::plane_standing(wave.k, *normal))
        }
        Some(SyntheticSpec::RadialBessel) => PipelineField::Synthetic(SyntheticField::radial_bessel(wave.k)),
        None => PipelineField::Computed(Box::new(solve_density(assemble(
            &s.scatterer,
            &wave,
            s.nodes_per_wavelength,
        )?)?)),
    })
}

/// Default window: the scatterer plus two wavelengths; spacing λ/40.
pub fn nodal_window(cfg: &ExperimentConfig, s: &Scatterer) -> (Window, f64) {
    let lambda = 2.0 * std::f64::consts::PI / cfg.wave.k;
    let half = cfg.nodal.half_width.unwrap_or(s.bounding_radius() + 2.0 * lambda);
    let h = cfg.nodal.spacing.unwrap_or(lambda / 40.0);
    (Window::centered(Vec2::ZERO, half), h)
}

/// Reflection test of one near-flat candidate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Refutation {
    pub segment: FlatSegment,
    pub residual: f64,
    pub threshold: f64,
    pub refuted: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodalReport {
    pub tool_version: String,
    pub scatterer: String,
    pub synthetic: bool,
    pub window: Window,
    pub h: f64,
    pub domains: usize,
    pub polylines: usize,
    pub critical_points: usize,
    pub ordering: Option<Vec<usize>>,
    /// Components of the certified adjacency graph when it is disconnected,
    /// which windowing alone can cause.
    pub disconnected_components: Option<Vec<Vec<usize>>>,
    /// Positions in the ordering without a certified link to an earlier domain.
    pub ordering_violations: Vec<usize>,
    /// Flat segments at the default tolerances.
    pub flat_segments: Vec<FlatSegment>,
    /// Straight pieces of the nodal lines of `v` at ten times the deviation
    /// tolerance and half the length, each tested by reflection at the
    /// default tolerance.
    pub near_flat: Vec<Refutation>,
    pub boundedness: NodalBoundedness,
}

pub struct NodalArtifacts {
    pub decomposition: NodalDecomposition,
    pub report: NodalReport,
    pub svg: String,
}

impl NodalArtifacts {
    pub fn emit(&self, dir: &Path) -> Result<(), ExperimentError> {
        super::write(dir, "nodal.json", &self.decomposition.to_json())?;
        super::write(dir, "nodal.svg", &self.svg)?;
        super::write(
            dir,
            "nodal_report.json",
            &serde_json::to_string_pretty(&self.report).expect("serialisable"),
        )
    }
}

/// Near-flat pieces of `𝒩_v`, ignoring `Im u`: ten times the deviation
/// tolerance and half the minimum length of the flat-point test.
pub fn near_flat_candidates(d: &NodalDecomposition) -> Vec<FlatSegment> {
    let p = d.params;
    flat_points_with_floor(d, 0.5 * p.min_length, 10.0 * p.dev_tol, f64::INFINITY)
}

/// Domain the ordering starts from: the one owning the grid node nearest to
/// the scatterer, or the largest domain when there is no scatterer.
pub fn start_domain(d: &NodalDecomposition, s: &Scatterer) -> usize {
    if s.is_empty() {
        return (0..d.domains.len()).max_by_key(|&i| (d.domains[i].size, std::cmp::Reverse(i))).unwrap_or(0);
    }
    (0..d.nx * d.ny)
        .filter(|&i| d.labels[i] >= 0)
        .min_by(|&a, &b| s.distance_to_boundary(d.node(a)).total_cmp(&s.distance_to_boundary(d.node(b))))
        .map(|i| d.labels[i] as usize)
        .unwrap_or(0)
}

/// Nodal analysis of an already sampled field.
pub fn analyse_nodal(name: &str, synthetic: bool, f: &SampledField<'_>) -> NodalArtifacts {
    let d = nodal_domains(f);
    let p = d.params;
    let flats = flat_points(&d, p.min_length, p.dev_tol);
    let near_flat = near_flat_candidates(&d)
        .into_iter()
        .filter_map(|seg| {
            let fr = reflect_check(f.field(), f.scatterer(), &seg, f.window(), f.h(), p.dev_tol).ok()?;
            Some(Refutation {
                segment: seg,
                residual: fr.oddness_residual,
                threshold: fr.threshold,
                refuted: fr.refuted,
            })
        })
        .collect();
    let mut d = d;
    let (ordering, disconnected) = match order_domains(&d, start_domain(&d, f.scatterer())) {
        Ok(o) => (Some(o), None),
        Err(NodalError::DisconnectedAdjacency { components }) => (None, Some(components)),
        Err(_) => (None, None),
    };
    d.ordering = ordering;
    let violations = d.ordering.as_ref().map(|o| ordering_violations(&d, o)).unwrap_or_default();
    let boundedness = nodal_boundedness(f, &d);
    let svg = render_svg(&d, f.scatterer(), &flats);
    let report = NodalReport {
        tool_version: TOOL_VERSION.to_string(),
        scatterer: name.to_string(),
        synthetic,
        window: f.window(),
        h: f.h(),
        domains: d.domains.len(),
        polylines: d.polylines.len(),
        critical_points: d.critical_points.len(),
        ordering: d.ordering.clone(),
        disconnected_components: disconnected,
        ordering_violations: violations,
        flat_segments: flats,
        near_flat,
        boundedness,
    };
    NodalArtifacts {
        decomposition: d,
        report,
        svg,
    }
}

/// Samples the selected field and runs the nodal analysis.
pub fn run_nodal_pipeline(cfg: &ExperimentConfig, base: &Path) -> Result<NodalArtifacts, ExperimentError> {
    let s = cfg.load_entry(cfg.nodal_entry()?, base)?;
    let field = pipeline_field(cfg, &s)?;
    let (window, h) = nodal_window(cfg, &s.scatterer);
    let f = sample_field(field.as_field(), &s.scatterer, window, h)?;
    Ok(analyse_nodal(&s.name, cfg.nodal.synthetic.is_some(), &f))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathRunReport {
    pub tool_version: String,
    pub scatterer: String,
    pub start: Option<PathStart>,
    pub target: Option<Vec2>,
    pub escape_radius: f64,
    pub certified: bool,
    /// Construction failure, if any.
    pub error: Option<String>,
    pub verification: Option<PathReport>,
    pub walk: Vec<FlatVisit>,
}

pub struct PathArtifacts {
    pub path: Option<HiddenPath>,
    pub report: PathRunReport,
    pub svg: Option<String>,
}

impl PathArtifacts {
    pub fn emit(&self, dir: &Path) -> Result<(), ExperimentError> {
        if let Some(p) = &self.path {
            super::write(dir, "path.json", &p.to_json())?;
        }
        if let Some(svg) = &self.svg {
            super::write(dir, "path.svg", svg)?;
        }
        super::write(
            dir,
            "path_report.json",
            &serde_json::to_string_pretty(&self.report).expect("serialisable"),
        )
    }
}

/// Nodal vertex with the largest `|∇v|` among those within `max_norm` of
/// the origin and at least ten grid steps from every critical point.
pub fn regular_target(f: &SampledField<'_>, d: &NodalDecomposition, max_norm: f64) -> Option<Vec2> {
    let h = f.h();
    let mut best: Option<(f64, Vec2)> = None;
    for pl in &d.polylines {
        for &p in &pl.points {
            if p.norm() > max_norm || d.critical_points.iter().any(|c| c.distance(p) < 10.0 * h) {
                continue;
            }
            let Ok(smp) = f.evaluate(p) else { continue };
            let g = smp.real_gradient().norm();
            if g >= d.params.grad_floor && best.is_none_or(|b| g > b.0) {
                best = Some((g, p));
            }
        }
    }
    best.map(|b| b.1)
}

/// Start, path, verification and flat-point walk on a sampled field.
/// Construction errors are recorded in the report rather than returned.
pub fn analyse_path(
    cfg: &ExperimentConfig,
    name: &str,
    f: &SampledField<'_>,
    d: &NodalDecomposition,
) -> PathArtifacts {
    let s = f.scatterer();
    let lambda = 2.0 * std::f64::consts::PI / f.wavenumber();
    let escape_radius = cfg
        .path
        .escape_radius
        .unwrap_or(s.bounding_radius() + 0.25 * lambda);
    let mut report = PathRunReport {
        tool_version: TOOL_VERSION.to_string(),
        scatterer: name.to_string(),
        start: None,
        target: None,
        escape_radius,
        certified: false,
        error: None,
        verification: None,
        walk: Vec::new(),
    };
    let start = match (&cfg.path.anchor, s.is_empty()) {
        (Some([p, dir]), _) => Ok(PathStart::anchor(*p, *dir)),
        (None, false) => pick_start(s, f.field(), cfg.path.candidates, cfg.seed, d.params.grad_floor),
        (None, true) => Err(PathError::StartInvalid("no scatterer and no anchor given".into())),
    };
    let start = match start {
        Ok(x) => x,
        Err(e) => {
            report.error = Some(e.to_string());
            return PathArtifacts { path: None, report, svg: None };
        }
    };
    report.start = Some(start);
    let target = cfg
        .path
        .target
        .or_else(|| regular_target(f, d, s.bounding_radius() + 0.5 * lambda));
    report.target = target;
    let path = match build_path(f, d, &start, target, escape_radius) {
        Ok(p) => p,
        Err(e) => {
            report.error = Some(e.to_string());
            return PathArtifacts { path: None, report, svg: None };
        }
    };
    let v = verify_path(&path, f, d);
    report.certified = v.certified;
    report.walk = flat_point_walk(&path, d, f, d.params.min_length, d.params.dev_tol);
    report.verification = Some(v);
    let flats = flat_points(d, d.params.min_length, d.params.dev_tol);
    let svg = render_path_svg(d, s, &path, &flats);
    PathArtifacts {
        path: Some(path),
        report,
        svg: Some(svg),
    }
}

/// Nodal analysis followed by the hidden-path construction.
pub fn run_path_pipeline(cfg: &ExperimentConfig, base: &Path) -> Result<PathArtifacts, ExperimentError> {
    let s = cfg.load_entry(cfg.nodal_entry()?, base)?;
    let field = pipeline_field(cfg, &s)?;
    let (window, h) = nodal_window(cfg, &s.scatterer);
    let f = sample_field(field.as_field(), &s.scatterer, window, h)?;
    let d = nodal_domains(&f);
    Ok(analyse_path(cfg, &s.name, &f, &d))
}
