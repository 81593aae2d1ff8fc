use super::{HiddenPath, PathError};
use crate::geometry::Scatterer;
use crate::nodal::{base_canvas, FlatSegment, NodalDecomposition};

impl HiddenPath {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("path is serialisable")
    }

    pub fn from_json(text: &str) -> Result<Self, PathError> {
        let p: HiddenPath = serde_json::from_str(text).map_err(|e| PathError::Parse(e.to_string()))?;
        if p.samples.windows(2).any(|w| w[1].t <= w[0].t) {
            return Err(PathError::Parse("sample parameters must increase".into()));
        }
        Ok(p)
    }
}

/// The nodal picture with the path in red and its crossings circled.
pub fn render_path_svg(
    d: &NodalDecomposition,
    s: &Scatterer,
    path: &HiddenPath,
    flats: &[FlatSegment],
) -> String {
    let mut c = base_canvas(d, s, flats);
    let pts: Vec<_> = path.samples.iter().map(|x| x.point).collect();
    c.polyline(&pts, "red", 2.0);
    for x in &path.crossings {
        c.circle(x.point, 5.0, "red");
    }
    if let Some(y) = path.target {
        c.circle(y, 3.0, "black");
    }
    c.finish()
}
