use super::WaveParams;
use crate::geometry::Vec2;
use num_complex::Complex64;
use std::f64::consts::PI;
use std::fmt::Write as _;
use thiserror::Error;

/// Samples of `u∞` at uniformly spaced directions for one `(k, ω)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FarFieldPattern {
    pub wave: WaveParams,
    /// Direction angles in radians, uniformly spaced from the first.
    pub angles: Vec<f64>,
    pub values: Vec<Complex64>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FarFieldParseError {
    #[error("missing or malformed header line")]
    Header,
    #[error("line {line}: {msg}")]
    Row { line: usize, msg: String },
    #[error("pattern needs at least 64 uniformly spaced directions")]
    NotUniform,
}

impl FarFieldPattern {
    pub fn new(wave: WaveParams, angles: Vec<f64>, values: Vec<Complex64>) -> Self {
        assert_eq!(angles.len(), values.len());
        FarFieldPattern {
            wave,
            angles,
            values,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn directions(&self) -> Vec<Vec2> {
        self.angles.iter().map(|&a| Vec2::from_angle(a)).collect()
    }

    pub fn l2_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `‖a − b‖₂ / max(‖a‖₂, ‖b‖₂)` over matching directions.
    pub fn relative_distance(&self, other: &FarFieldPattern) -> f64 {
        assert_eq!(self.len(), other.len(), "patterns sampled at different directions");
        let diff: f64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        let scale = self.l2_norm().max(other.l2_norm());
        if scale == 0.0 {
            0.0
        } else {
            diff / scale
        }
    }

    /// `max |a − b| / max |b|`, with `other` as the reference.
    pub fn max_relative_error(&self, reference: &FarFieldPattern) -> f64 {
        assert_eq!(self.len(), reference.len());
        let diff = self
            .values
            .iter()
            .zip(&reference.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        diff / reference.max_abs()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        writeln!(
            s,
            "# k={:.16e} omega_x={:.16e} omega_y={:.16e}",
            self.wave.k, self.wave.omega.x, self.wave.omega.y
        )
        .unwrap();
        s.push_str("angle_radians,re_uinf,im_uinf\n");
        for (a, v) in self.angles.iter().zip(&self.values) {
            writeln!(s, "{:.16e},{:.16e},{:.16e}", a, v.re, v.im).unwrap();
        }
        s
    }

    pub fn from_csv(text: &str) -> Result<Self, FarFieldParseError> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or(FarFieldParseError::Header)?;
        let mut k = None;
        let mut ox = None;
        let mut oy = None;
        for tok in header.trim_start_matches('#').split_whitespace() {
            let (key, val) = tok.split_once('=').ok_or(FarFieldParseError::Header)?;
            let val: f64 = val.parse().map_err(|_| FarFieldParseError::Header)?;
            match key {
                "k" => k = Some(val),
                "omega_x" => ox = Some(val),
                "omega_y" => oy = Some(val),
                _ => return Err(FarFieldParseError::Header),
            }
        }
        let (k, ox, oy) = match (k, ox, oy) {
            (Some(k), Some(x), Some(y)) => (k, x, y),
            _ => return Err(FarFieldParseError::Header),
        };
        let wave = WaveParams { k, omega: Vec2::new(ox, oy) };
        let mut angles = Vec::new();
        let mut values = Vec::new();
        for (i, line) in lines {
            let line = line.trim();
            if line.is_empty() || line.starts_with("angle_radians") {
                continue;
            }
            let row_err = |msg: &str| FarFieldParseError::Row {
                line: i + 1,
                msg: msg.to_string(),
            };
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != 3 {
                return Err(row_err("expected 3 columns"));
            }
            let parse = |c: &str| c.trim().parse::<f64>().map_err(|_| row_err("bad number"));
            angles.push(parse(cols[0])?);
            values.push(Complex64::new(parse(cols[1])?, parse(cols[2])?));
        }
        let m = angles.len();
        if m < 64 {
            return Err(FarFieldParseError::NotUniform);
        }
        let step = 2.0 * PI / m as f64;
        if angles
            .iter()
            .enumerate()
            .any(|(i, a)| (a - angles[0] - i as f64 * step).abs() > 1e-12)
        {
            return Err(FarFieldParseError::NotUniform);
        }
        Ok(FarFieldPattern { wave, angles, values })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip_is_exact() {
        let wave = WaveParams::from_angle(2.5, 0.3).unwrap();
        let m = 64;
        let angles: Vec<f64> = (0..m).map(|i| 2.0 * PI * i as f64 / m as f64).collect();
        let values = angles
            .iter()
            .map(|a| Complex64::new(a.sin() / 3.0, (1.0 + a).ln() * 1e-7))
            .collect();
        let p = FarFieldPattern::new(wave, angles, values);
        let q = FarFieldPattern::from_csv(&p.to_csv()).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn rejects_short_patterns() {
        let wave = WaveParams::from_angle(1.0, 0.0).unwrap();
        let p = FarFieldPattern::new(wave, vec![0.0, 1.0], vec![Complex64::new(0.0, 0.0); 2]);
        assert_eq!(
            FarFieldPattern::from_csv(&p.to_csv()),
            Err(FarFieldParseError::NotUniform)
        );
    }
}
