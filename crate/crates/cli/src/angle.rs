//! Angle literals such as `0.2pi`, `2pi`, `pi`, `π/4` or plain radians.

use std::f64::consts::PI;

pub fn parse_angle(text: &str) -> Result<f64, String> {
    let t = text.trim().to_ascii_lowercase().replace('π', "pi").replace('*', "");
    let err = || format!("cannot parse angle {text:?}; use radians or a literal like 0.2pi");
    let value = if let Some(pos) = t.find("pi") {
        let (coef, rest) = (&t[..pos], &t[pos + 2..]);
        let coef = match coef {
            "" | "+" => 1.0,
            "-" => -1.0,
            c => c.parse::<f64>().map_err(|_| err())?,
        };
        let div = match rest.strip_prefix('/') {
            Some(d) => d.parse::<f64>().map_err(|_| err())?,
            None if rest.is_empty() => 1.0,
            None => return Err(err()),
        };
        coef * PI / div
    } else {
        t.parse::<f64>().map_err(|_| err())?
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(err())
    }
}

/// Comma-separated list of angle literals.
pub fn parse_angle_list(text: &str) -> Result<Vec<f64>, String> {
    text.split(',').filter(|s| !s.trim().is_empty()).map(parse_angle).collect()
}
