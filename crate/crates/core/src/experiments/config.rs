use super::shapes::Shape;
use super::ExperimentError;
use crate::geometry::{Polygon, Scatterer, Vec2};
use crate::solver::WaveParams;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

/// One run of the experiments: a single incident wave and one or more scatterers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scatterers: Vec<ScattererEntry>,
    pub wave: WaveConfig,
    #[serde(default = "default_npw")]
    pub nodes_per_wavelength: f64,
    /// Number of far-field directions `M`.
    #[serde(default = "default_directions")]
    pub directions: usize,
    #[serde(default)]
    pub nodal: NodalConfig,
    #[serde(default)]
    pub path: PathConfig,
    #[serde(default)]
    pub oracle: OracleConfig,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
}

fn default_npw() -> f64 {
    30.0
}

fn default_directions() -> usize {
    128
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaveConfig {
    pub k: f64,
    /// Polar angle of the incident direction in radians.
    #[serde(default)]
    pub angle: f64,
}

impl WaveConfig {
    pub fn params(&self) -> Result<WaveParams, ExperimentError> {
        Ok(WaveParams::from_angle(self.k, self.angle)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScattererEntry {
    pub name: String,
    #[serde(flatten)]
    pub source: ScattererSource,
    /// Rigid translation applied after loading.
    #[serde(default)]
    pub translate: Option<Vec2>,
    /// Overrides the run resolution for this scatterer.
    #[serde(default)]
    pub nodes_per_wavelength: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScattererSource {
    Shape { shape: Shape },
    /// Scatterer JSON document, relative to the config file.
    File { file: PathBuf },
    Inline { polygons: Vec<Vec<Vec2>> },
}

/// Window and spacing of the nodal analysis; defaults scale with the wavelength.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct NodalConfig {
    /// Name of the scatterer to analyse; the first one by default.
    #[serde(default)]
    pub scatterer: Option<String>,
    /// Half-width of the square window about the origin.
    #[serde(default)]
    pub half_width: Option<f64>,
    #[serde(default)]
    pub spacing: Option<f64>,
    /// Analytic field used in place of the computed one.
    #[serde(default)]
    pub synthetic: Option<SyntheticSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SyntheticSpec {
    /// `sin(k n·x)`.
    PlaneStanding { normal: Vec2 },
    /// `J₀(k|x|)`.
    RadialBessel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathConfig {
    /// Nodal point the path must pass through; chosen automatically if absent.
    #[serde(default)]
    pub target: Option<Vec2>,
    #[serde(default)]
    pub escape_radius: Option<f64>,
    /// Start candidates per boundary cell.
    #[serde(default = "default_candidates")]
    pub candidates: usize,
    /// Free start point and direction, used when there is no scatterer.
    #[serde(default)]
    pub anchor: Option<[Vec2; 2]>,
}

fn default_candidates() -> usize {
    5
}

impl Default for PathConfig {
    fn default() -> Self {
        PathConfig {
            target: None,
            escape_radius: None,
            candidates: default_candidates(),
            anchor: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleConfig {
    pub disk_cases: Vec<DiskCase>,
    /// Directions for the radial limit table.
    pub radial_directions: usize,
    /// `k r` values for the radial limit table.
    pub radial_kr: Vec<f64>,
    pub reciprocity_pairs: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiskCase {
    pub ka: f64,
    pub nodes_per_wavelength: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            disk_cases: vec![
                DiskCase { ka: 2.0, nodes_per_wavelength: 20.0 },
                DiskCase { ka: 10.0, nodes_per_wavelength: 20.0 },
            ],
            radial_directions: 4,
            radial_kr: vec![50.0, 100.0, 200.0, 400.0, 800.0],
            reciprocity_pairs: 8,
        }
    }
}

/// A scatterer ready for the solver.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedScatterer {
    pub name: String,
    pub scatterer: Scatterer,
    pub nodes_per_wavelength: f64,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, ExperimentError> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| ExperimentError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads a config file; relative scatterer files resolve against its directory.
    pub fn load(path: &Path) -> Result<(Self, PathBuf), ExperimentError> {
        let text = std::fs::read_to_string(path).map_err(|e| ExperimentError::io(path, e))?;
        let cfg = Self::from_json(&text)?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok((cfg, base))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config is serialisable")
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        if self.directions < 64 {
            return Err(ExperimentError::Config(format!(
                "at least 64 far-field directions are required, got {}",
                self.directions
            )));
        }
        if self.scatterers.is_empty() {
            return Err(ExperimentError::Config("no scatterers given".into()));
        }
        let mut names: Vec<&str> = self.scatterers.iter().map(|s| s.name.as_str()).collect();
        names.sort_unstable();
        if names.windows(2).any(|w| w[0] == w[1]) {
            return Err(ExperimentError::Config("scatterer names must be unique".into()));
        }
        self.wave.params()?;
        Ok(())
    }

    /// Loads every scatterer. Failures are reported per entry.
    pub fn load_scatterers(&self, base: &Path) -> Vec<Result<LoadedScatterer, ExperimentError>> {
        self.scatterers.iter().map(|e| self.load_entry(e, base)).collect()
    }

    pub fn load_entry(&self, e: &ScattererEntry, base: &Path) -> Result<LoadedScatterer, ExperimentError> {
        let mut s = match &e.source {
            ScattererSource::Shape { shape } => shape.scatterer(),
            ScattererSource::File { file } => {
                let path = base.join(file);
                let text = std::fs::read_to_string(&path).map_err(|err| ExperimentError::io(&path, err))?;
                Scatterer::from_json(&text)?
            }
            ScattererSource::Inline { polygons } => {
                let polys = polygons
                    .iter()
                    .map(|p| Polygon::new(p.clone()))
                    .collect::<Result<Vec<_>, _>>()?;
                Scatterer::new(polys, Vec::new())?
            }
        };
        if let Some(t) = e.translate {
            s = s.translated(t);
        }
        Ok(LoadedScatterer {
            name: e.name.clone(),
            scatterer: s,
            nodes_per_wavelength: e.nodes_per_wavelength.unwrap_or(self.nodes_per_wavelength),
        })
    }

    /// The entry selected for the nodal and path pipelines.
    pub fn nodal_entry(&self) -> Result<&ScattererEntry, ExperimentError> {
        match &self.nodal.scatterer {
            None => self
                .scatterers
                .first()
                .ok_or_else(|| ExperimentError::Config("no scatterers given".into())),
            Some(name) => self
                .scatterers
                .iter()
                .find(|e| &e.name == name)
                .ok_or_else(|| ExperimentError::Config(format!("unknown scatterer {name}"))),
        }
    }
}
