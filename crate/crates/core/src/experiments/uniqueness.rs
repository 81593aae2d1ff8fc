use super::config::{ExperimentConfig, LoadedScatterer};
use super::{ExperimentError, TOOL_VERSION};
use crate::geometry::Vec2;
use crate::solver::{assemble, solve_density, FarFieldPattern, WaveParams};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::Path;

/// Pairwise relative far-field distances `‖a − b‖₂ / max(‖a‖₂, ‖b‖₂)`.
/// Entries involving a scatterer whose solve failed are `None`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceMatrix {
    pub labels: Vec<String>,
    pub entries: Vec<Vec<Option<f64>>>,
}

impl DistanceMatrix {
    pub fn from_patterns(labels: Vec<String>, patterns: &[Option<FarFieldPattern>]) -> Self {
        let n = labels.len();
        let mut entries = vec![vec![None; n]; n];
        for i in 0..n {
            for j in i..n {
                if let (Some(a), Some(b)) = (&patterns[i], &patterns[j]) {
                    let d = if i == j { 0.0 } else { a.relative_distance(b) };
                    entries[i][j] = Some(d);
                    entries[j][i] = Some(d);
                }
            }
        }
        DistanceMatrix { labels, entries }
    }

    pub fn get(&self, a: &str, b: &str) -> Option<f64> {
        let i = self.labels.iter().position(|l| l == a)?;
        let j = self.labels.iter().position(|l| l == b)?;
        self.entries[i][j]
    }

    /// Smallest off-diagonal entry among the given labels.
    pub fn min_between(&self, labels: &[&str]) -> Option<f64> {
        let mut m: Option<f64> = None;
        for (x, a) in labels.iter().enumerate() {
            for b in &labels[x + 1..] {
                let d = self.get(a, b)?;
                m = Some(m.map_or(d, |m| m.min(d)));
            }
        }
        m
    }

    /// Labels in the first row and column, 17 significant digits, `failed`
    /// where an entry is missing.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("label");
        for l in &self.labels {
            s.push(',');
            s.push_str(l);
        }
        s.push('\n');
        for (l, row) in self.labels.iter().zip(&self.entries) {
            s.push_str(l);
            for e in row {
                match e {
                    Some(d) => write!(s, ",{d:.16e}").unwrap(),
                    None => s.push_str(",failed"),
                }
            }
            s.push('\n');
        }
        s
    }

    pub fn from_csv(text: &str) -> Result<Self, ExperimentError> {
        let bad = |m: &str| ExperimentError::Parse(format!("distance matrix: {m}"));
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| bad("empty document"))?;
        let labels: Vec<String> = header.split(',').skip(1).map(str::to_string).collect();
        let mut entries = Vec::new();
        for (i, line) in lines.enumerate() {
            let mut cells = line.split(',');
            if cells.next() != labels.get(i).map(String::as_str) {
                return Err(bad("row label mismatch"));
            }
            let row = cells
                .map(|c| match c {
                    "failed" => Ok(None),
                    c => c.parse::<f64>().map(Some).map_err(|_| bad("malformed number")),
                })
                .collect::<Result<Vec<_>, _>>()?;
            if row.len() != labels.len() {
                return Err(bad("row length mismatch"));
            }
            entries.push(row);
        }
        if entries.len() != labels.len() {
            return Err(bad("row count mismatch"));
        }
        Ok(DistanceMatrix { labels, entries })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("matrix is serialisable")
    }

    pub fn from_json(text: &str) -> Result<Self, ExperimentError> {
        serde_json::from_str(text).map_err(|e| ExperimentError::Parse(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScattererFailure {
    pub label: String,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UniquenessResult {
    pub matrix: DistanceMatrix,
    pub patterns: Vec<Option<FarFieldPattern>>,
    pub failures: Vec<ScattererFailure>,
}

#[derive(Serialize)]
struct UniquenessDoc<'a> {
    tool_version: &'a str,
    k: f64,
    omega: Vec2,
    directions: usize,
    matrix: &'a DistanceMatrix,
    failures: &'a [ScattererFailure],
}

impl UniquenessResult {
    /// Writes the matrix as CSV and JSON and each pattern as CSV.
    pub fn emit(&self, dir: &Path, wave: &WaveParams) -> Result<(), ExperimentError> {
        super::write(dir, "distances.csv", &self.matrix.to_csv())?;
        let doc = UniquenessDoc {
            tool_version: TOOL_VERSION,
            k: wave.k,
            omega: wave.omega,
            directions: self.patterns.iter().flatten().map(|p| p.len()).next().unwrap_or(0),
            matrix: &self.matrix,
            failures: &self.failures,
        };
        super::write(dir, "distances.json", &serde_json::to_string_pretty(&doc).expect("serialisable"))?;
        for (l, p) in self.matrix.labels.iter().zip(&self.patterns) {
            if let Some(p) = p {
                super::write(dir, &format!("farfield_{l}.csv"), &p.to_csv())?;
            }
        }
        Ok(())
    }
}

/// Far-field pattern of one scatterer at the run's wave and resolution.
pub fn far_field_of(
    s: &LoadedScatterer,
    wave: &WaveParams,
    directions: usize,
) -> Result<FarFieldPattern, ExperimentError> {
    let sys = assemble(&s.scatterer, wave, s.nodes_per_wavelength)?;
    Ok(solve_density(sys)?.far_field(directions)?)
}

/// One solve per scatterer at the single `(k, ω)` of the config, then the
/// full distance matrix. A scatterer that fails to load or solve leaves its
/// row and column marked failed and does not stop the others.
pub fn run_uniqueness(cfg: &ExperimentConfig, base: &Path) -> Result<UniquenessResult, ExperimentError> {
    if cfg.scatterers.len() < 2 {
        return Err(ExperimentError::Config("uniqueness needs at least two scatterers".into()));
    }
    let wave = cfg.wave.params()?;
    let loaded = cfg.load_scatterers(base);
    let results: Vec<Result<FarFieldPattern, ExperimentError>> = loaded
        .into_par_iter()
        .map(|l| l.and_then(|s| far_field_of(&s, &wave, cfg.directions)))
        .collect();
    let labels: Vec<String> = cfg.scatterers.iter().map(|e| e.name.clone()).collect();
    let mut failures = Vec::new();
    let patterns: Vec<Option<FarFieldPattern>> = results
        .into_iter()
        .zip(&labels)
        .map(|(r, l)| match r {
            Ok(p) => Some(p),
            Err(e) => {
                failures.push(ScattererFailure {
                    label: l.clone(),
                    error: e.to_string(),
                });
                None
            }
        })
        .collect();
    let matrix = DistanceMatrix::from_patterns(labels, &patterns);
    Ok(UniquenessResult {
        matrix,
        patterns,
        failures,
    })
}

/// Translating a scatterer by `t` multiplies its pattern by
/// `e^{ik(ω − x̂)·t}`. Returns `max |b − phase·a| / max |a|`.
pub fn translation_phase_residual(a: &FarFieldPattern, b: &FarFieldPattern, t: Vec2) -> f64 {
    let k = a.wave.k;
    let omega = a.wave.omega;
    let worst = a
        .directions()
        .iter()
        .zip(a.values.iter().zip(&b.values))
        .map(|(xhat, (va, vb))| {
            let phase = Complex64::from_polar(1.0, k * (omega - *xhat).dot(t));
            (vb - phase * va).norm()
        })
        .fold(0.0, f64::max);
    worst / a.max_abs()
}
