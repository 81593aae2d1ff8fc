//! Named polygons used by the experiments.

use crate::geometry::{Polygon, Scatterer, Vec2};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Shape {
    /// Unit square centred at the origin.
    Square,
    /// Equilateral triangle of side 1 with centroid at the origin.
    Triangle,
    /// L-shaped hexagon: the unit square with its upper right quarter removed.
    LHexagon,
    /// Regular pentagon of circumradius 0.6.
    Pentagon,
    /// Rectangle 1.4 × 0.6.
    Rectangle,
}

impl Shape {
    pub const ALL: [Shape; 5] = [
        Shape::Square,
        Shape::Triangle,
        Shape::LHexagon,
        Shape::Pentagon,
        Shape::Rectangle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Shape::Square => "square",
            Shape::Triangle => "triangle",
            Shape::LHexagon => "l_hexagon",
            Shape::Pentagon => "pentagon",
            Shape::Rectangle => "rectangle",
        }
    }

    pub fn vertices(self) -> Vec<Vec2> {
        let v = |x: f64, y: f64| Vec2::new(x, y);
        match self {
            Shape::Square => vec![v(-0.5, -0.5), v(0.5, -0.5), v(0.5, 0.5), v(-0.5, 0.5)],
            Shape::Triangle => {
                let r = 1.0 / 3f64.sqrt();
                (0..3)
                    .map(|i| Vec2::from_angle(std::f64::consts::FRAC_PI_2 + i as f64 * 2.0 * std::f64::consts::PI / 3.0) * r)
                    .collect()
            }
            Shape::LHexagon => vec![
                v(-0.5, -0.5),
                v(0.5, -0.5),
                v(0.5, 0.0),
                v(0.0, 0.0),
                v(0.0, 0.5),
                v(-0.5, 0.5),
            ],
            Shape::Pentagon => (0..5)
                .map(|i| Vec2::from_angle(std::f64::consts::FRAC_PI_2 + i as f64 * 2.0 * std::f64::consts::PI / 5.0) * 0.6)
                .collect(),
            Shape::Rectangle => vec![v(-0.7, -0.3), v(0.7, -0.3), v(0.7, 0.3), v(-0.7, 0.3)],
        }
    }

    pub fn scatterer(self) -> Scatterer {
        Scatterer::from_polygon(Polygon::new(self.vertices()).expect("built-in shapes are valid"))
    }
}
