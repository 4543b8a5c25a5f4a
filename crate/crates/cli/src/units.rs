//! Quantities with unit suffixes, converted to the library's units
//! (µeV, nm, W, ns).

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    Energy,
    Length,
    Power,
    Time,
    Plain,
}

impl Dimension {
    fn table(self) -> &'static [(&'static str, f64)] {
        match self {
            Dimension::Energy => &[
                ("ueV", 1.0),
                ("µeV", 1.0),
                ("meV", 1e3),
                ("neV", 1e-3),
                ("eV", 1e6),
            ],
            Dimension::Length => &[("nm", 1.0), ("um", 1e3), ("µm", 1e3), ("pm", 1e-3)],
            Dimension::Power => &[
                ("fW", 1e-15),
                ("pW", 1e-12),
                ("nW", 1e-9),
                ("uW", 1e-6),
                ("µW", 1e-6),
                ("mW", 1e-3),
                ("W", 1.0),
            ],
            Dimension::Time => &[("ps", 1e-3), ("ns", 1.0), ("us", 1e3), ("µs", 1e3)],
            Dimension::Plain => &[],
        }
    }

    /// Unit assumed when a number has no suffix.
    pub fn canonical(self) -> &'static str {
        match self {
            Dimension::Energy => "ueV",
            Dimension::Length => "nm",
            Dimension::Power => "W",
            Dimension::Time => "ns",
            Dimension::Plain => "",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitError {
    pub text: String,
    pub dimension: Dimension,
}

impl fmt::Display for UnitError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let units: Vec<&str> = self.dimension.table().iter().map(|&(u, _)| u).collect();
        if units.is_empty() {
            write!(f, "`{}` is not a number", self.text)
        } else {
            write!(
                f,
                "`{}` is not a number with a unit from {{{}}} (bare numbers are in {})",
                self.text,
                units.join(", "),
                self.dimension.canonical()
            )
        }
    }
}

/// Parses `"10nW"`, `"20 ueV"` or a bare number in canonical units.
pub fn parse_quantity(text: &str, dim: Dimension) -> Result<f64, UnitError> {
    let err = || UnitError {
        text: text.to_string(),
        dimension: dim,
    };
    let t = text.trim();
    let split = t
        .char_indices()
        .find(|&(i, c)| {
            c.is_alphabetic() && c != 'e' && c != 'E'
                || (c == 'e' || c == 'E') && !exponent_at(t, i)
        })
        .map(|(i, _)| i)
        .unwrap_or(t.len());
    let (num, unit) = t.split_at(split);
    let value: f64 = num.trim().parse().map_err(|_| err())?;
    if !value.is_finite() {
        return Err(err());
    }
    let unit = unit.trim();
    if unit.is_empty() {
        return Ok(value);
    }
    dim.table()
        .iter()
        .find(|&&(u, _)| u == unit)
        .map(|&(_, scale)| value * scale)
        .ok_or_else(err)
}

/// True if the `e` at byte `i` is an exponent marker (followed by a digit or sign).
fn exponent_at(t: &str, i: usize) -> bool {
    let rest = &t[i + 1..];
    let rest = rest.strip_prefix(['+', '-']).unwrap_or(rest);
    i > 0 && rest.starts_with(|c: char| c.is_ascii_digit())
}

/// `start:stop:count`, evenly spaced (geometrically when `log`).
pub fn parse_grid(text: &str, dim: Dimension, log: bool) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("grid `{text}` must be start:stop:count"));
    }
    let start = parse_quantity(parts[0], dim).map_err(|e| e.to_string())?;
    let stop = parse_quantity(parts[1], dim).map_err(|e| e.to_string())?;
    let count: usize = parts[2]
        .trim()
        .parse()
        .map_err(|_| format!("grid count `{}` is not an integer", parts[2]))?;
    if count == 0 {
        return Err(format!("grid `{text}` has no points"));
    }
    if count == 1 {
        return Ok(vec![start]);
    }
    if log && (start <= 0.0 || stop <= 0.0) {
        return Err(format!(
            "logarithmic grid `{text}` needs positive end points"
        ));
    }
    let step = |k: usize| k as f64 / (count - 1) as f64;
    Ok((0..count)
        .map(|k| {
            if log {
                start * (stop / start).powf(step(k))
            } else {
                start + (stop - start) * step(k)
            }
        })
        .collect())
}
