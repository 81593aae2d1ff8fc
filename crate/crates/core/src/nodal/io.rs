//! JSON and SVG output for nodal decompositions.

use super::domains::NodalDecomposition;
use super::flat::FlatSegment;
use super::{NodalError, Window};
use crate::geometry::{Scatterer, Vec2};
use std::fmt::Write as _;

/// Run-length encoding of the label grid as `[[label, count], ...]`.
pub(crate) mod rle {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(labels: &[i32], s: S) -> Result<S::Ok, S::Error> {
        let mut runs: Vec<(i32, usize)> = Vec::new();
        for &l in labels {
            match runs.last_mut() {
                Some((v, c)) if *v == l => *c += 1,
                _ => runs.push((l, 1)),
            }
        }
        runs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<i32>, D::Error> {
        let runs: Vec<(i32, usize)> = Vec::deserialize(d)?;
        Ok(runs
            .into_iter()
            .flat_map(|(l, c)| std::iter::repeat_n(l, c))
            .collect())
    }
}

impl NodalDecomposition {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("decomposition is serialisable")
    }

    pub fn from_json(text: &str) -> Result<Self, NodalError> {
        let d: NodalDecomposition =
            serde_json::from_str(text).map_err(|e| NodalError::Parse(e.to_string()))?;
        if d.labels.len() != d.nx * d.ny {
            return Err(NodalError::Parse("label grid has the wrong size".into()));
        }
        Ok(d)
    }
}

/// Minimal SVG writer in window coordinates (y up).
pub struct SvgCanvas {
    window: Window,
    scale: f64,
    body: String,
}

impl SvgCanvas {
    pub fn new(window: Window, pixels: f64) -> Self {
        let scale = pixels / window.width().max(window.height());
        SvgCanvas {
            window,
            scale,
            body: String::new(),
        }
    }

    fn map(&self, p: Vec2) -> (f64, f64) {
        (
            (p.x - self.window.min.x) * self.scale,
            (self.window.max.y - p.y) * self.scale,
        )
    }

    /// Domains coloured by sign, drawn as horizontal runs of grid cells.
    pub fn domains(&mut self, d: &NodalDecomposition) {
        let h = d.h;
        for j in 0..d.ny {
            let mut i = 0;
            while i < d.nx {
                let l = d.labels[j * d.nx + i];
                let mut e = i;
                while e + 1 < d.nx && d.labels[j * d.nx + e + 1] == l {
                    e += 1;
                }
                if l >= 0 {
                    let color = if d.domains[l as usize].sign > 0 { "#f4c7a1" } else { "#a9c8ec" };
                    let p = d.node(j * d.nx + i) + Vec2::new(-0.5 * h, 0.5 * h);
                    let (x, y) = self.map(p);
                    let w = (e - i + 1) as f64 * h * self.scale;
                    let hh = h * self.scale;
                    let _ = writeln!(
                        self.body,
                        r#"<rect x="{x:.2}" y="{y:.2}" width="{w:.2}" height="{hh:.2}" fill="{color}"/>"#
                    );
                }
                i = e + 1;
            }
        }
    }

    pub fn scatterer(&mut self, s: &Scatterer) {
        for poly in s.polygons() {
            let pts: Vec<String> = poly
                .vertices()
                .iter()
                .map(|&v| {
                    let (x, y) = self.map(v);
                    format!("{x:.2},{y:.2}")
                })
                .collect();
            let _ = writeln!(
                self.body,
                r##"<polygon points="{}" fill="#555" stroke="none"/>"##,
                pts.join(" ")
            );
        }
    }

    pub fn polyline(&mut self, pts: &[Vec2], color: &str, width: f64) {
        if pts.len() < 2 {
            return;
        }
        let coords: Vec<String> = pts
            .iter()
            .map(|&p| {
                let (x, y) = self.map(p);
                format!("{x:.2},{y:.2}")
            })
            .collect();
        let _ = writeln!(
            self.body,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="{width}"/>"#,
            coords.join(" ")
        );
    }

    pub fn circle(&mut self, p: Vec2, r_px: f64, color: &str) {
        let (x, y) = self.map(p);
        let _ = writeln!(
            self.body,
            r#"<circle cx="{x:.2}" cy="{y:.2}" r="{r_px}" fill="none" stroke="{color}" stroke-width="1.5"/>"#
        );
    }

    pub fn finish(self) -> String {
        let w = self.window.width() * self.scale;
        let h = self.window.height() * self.scale;
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w:.0}\" height=\"{h:.0}\" viewBox=\"0 0 {w:.2} {h:.2}\">\n{}</svg>\n",
            self.body
        )
    }
}

/// Domains, nodal polylines (black), critical points and flat segments.
pub fn render_svg(d: &NodalDecomposition, s: &Scatterer, flats: &[FlatSegment]) -> String {
    let mut c = base_canvas(d, s, flats);
    for p in &d.critical_points {
        c.circle(*p, 4.0, "#b00");
    }
    c.finish()
}

pub(crate) fn base_canvas(d: &NodalDecomposition, s: &Scatterer, flats: &[FlatSegment]) -> SvgCanvas {
    let mut c = SvgCanvas::new(d.window, 800.0);
    c.domains(d);
    c.scatterer(s);
    for pl in &d.polylines {
        c.polyline(&pl.points, "black", 1.0);
    }
    for f in flats {
        let pl = &d.polylines[f.polyline];
        c.polyline(&pl.points[f.first..=f.last], "#070", 4.0);
    }
    c
}
