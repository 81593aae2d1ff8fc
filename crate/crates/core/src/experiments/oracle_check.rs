use super::config::{DiskCase, ExperimentConfig};
use super::{ExperimentError, TOOL_VERSION};
use crate::geometry::Vec2;
use crate::oracle::disk_far_field;
use crate::solver::{
    assemble, assemble_obstacle, radial_limit_check, solve_density, Obstacle, SolverOptions, WaveParams,
};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::path::Path;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiskRow {
    pub ka: f64,
    pub nodes_per_wavelength: f64,
    pub dimension: usize,
    /// `max |u∞ − u∞^Mie| / max |u∞^Mie|`.
    pub max_relative_error: f64,
    pub residual: f64,
    pub condition_estimate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialRow {
    pub angle: f64,
    pub radii: Vec<f64>,
    /// `|√r e^{−ikr} u^s(r x̂) − u∞(x̂)|` at each radius.
    pub errors: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReciprocityRow {
    /// Incident angle `θ_ω` and observation angle `θ_x̂`.
    pub incident: f64,
    pub observed: f64,
    /// `|u∞(x̂; ω) − u∞(−ω; −x̂)| / max |u∞|`.
    pub relative_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub tool_version: String,
    pub disk: Vec<DiskRow>,
    /// Scatterer used for the radial and reciprocity tables.
    pub scatterer: String,
    pub radial: Vec<RadialRow>,
    pub reciprocity: Vec<ReciprocityRow>,
}

/// Solver against the disk series for one case, unit radius.
pub fn disk_row(case: DiskCase, directions: usize) -> Result<DiskRow, ExperimentError> {
    let a = 1.0;
    let k = case.ka / a;
    let wave = WaveParams::new(k, Vec2::new(1.0, 0.0))?;
    let sys = assemble_obstacle(
        &Obstacle::disk(Vec2::ZERO, a),
        &wave,
        &SolverOptions::with_resolution(case.nodes_per_wavelength),
    )?;
    let dimension = sys.dimension();
    let d = solve_density(sys)?;
    let exact = disk_far_field(k, a, wave.omega, directions)?;
    let computed = d.far_field(directions)?;
    Ok(DiskRow {
        ka: case.ka,
        nodes_per_wavelength: case.nodes_per_wavelength,
        dimension,
        max_relative_error: computed.max_relative_error(&exact),
        residual: d.residual(),
        condition_estimate: d.condition_estimate(),
    })
}

/// Disk agreement, the radial limit table and the reciprocity table for the
/// first scatterer of the config.
pub fn run_oracle_check(cfg: &ExperimentConfig, base: &Path) -> Result<OracleReport, ExperimentError> {
    let disk = cfg
        .oracle
        .disk_cases
        .iter()
        .map(|&c| disk_row(c, cfg.directions))
        .collect::<Result<Vec<_>, _>>()?;

    let entry = cfg.nodal_entry()?;
    let s = cfg.load_entry(entry, base)?;
    let wave = cfg.wave.params()?;
    let k = wave.k;
    let d = solve_density(assemble(&s.scatterer, &wave, s.nodes_per_wavelength)?)?;
    let radii: Vec<f64> = cfg.oracle.radial_kr.iter().map(|kr| kr / k).collect();
    let nr = cfg.oracle.radial_directions.max(1);
    let radial = (0..nr)
        .map(|i| {
            let angle = 2.0 * PI * i as f64 / nr as f64;
            let errors = radial_limit_check(&d, Vec2::from_angle(angle), &radii)?;
            Ok(RadialRow {
                angle,
                radii: radii.clone(),
                errors,
            })
        })
        .collect::<Result<Vec<_>, ExperimentError>>()?;

    // pairs of incident and observation angles spread over the circle
    let np = cfg.oracle.reciprocity_pairs;
    let mut reciprocity = Vec::with_capacity(np);
    if np > 0 {
        let incidents: Vec<f64> = (0..np).map(|i| 2.0 * PI * i as f64 / np as f64 + 0.1).collect();
        let solves = incidents
            .iter()
            .map(|&a| {
                let w = WaveParams::from_angle(k, a)?;
                Ok(solve_density(assemble(&s.scatterer, &w, s.nodes_per_wavelength)?)?)
            })
            .collect::<Result<Vec<_>, ExperimentError>>()?;
        let scale = solves
            .iter()
            .map(|d| d.far_field(cfg.directions).map(|p| p.max_abs()))
            .collect::<Result<Vec<_>, _>>()?
            .into_iter()
            .fold(0.0, f64::max);
        for i in 0..np {
            // observe along the reverse of another incident direction
            let j = (i + np / 2 + 1) % np;
            let xhat = -solves[j].wave().omega;
            let forward = solves[i].far_field_at(xhat);
            let backward = solves[j].far_field_at(-solves[i].wave().omega);
            reciprocity.push(ReciprocityRow {
                incident: incidents[i],
                observed: xhat.y.atan2(xhat.x),
                relative_error: (forward - backward).norm() / scale,
            });
        }
    }
    Ok(OracleReport {
        tool_version: TOOL_VERSION.to_string(),
        disk,
        scatterer: s.name,
        radial,
        reciprocity,
    })
}
