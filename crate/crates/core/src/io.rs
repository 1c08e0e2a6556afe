//! File formats: JSON with fixed float precision, binary PGM and SVG.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

use crate::amoeba::AmoebaGrid;
use crate::error::Result;
use crate::holes::HoleReport;

/// Significant digits kept for every float written as JSON.
pub const SIGNIFICANT_DIGITS: usize = 12;

fn round_significant(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x).parse().unwrap_or(x)
}

fn round_floats(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round_significant(n.as_f64().expect("f64"));
            serde_json::Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(round_floats).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, round_floats(v))).collect()),
        other => other,
    }
}

/// Pretty JSON with floats rounded to [`SIGNIFICANT_DIGITS`] and a final newline.
///
/// Field order follows the struct definitions, so equal values give
/// byte-identical text.
pub fn to_json_string<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let v = round_floats(serde_json::to_value(value)?);
    let mut s = serde_json::to_string_pretty(&v)?;
    s.push('\n');
    Ok(s)
}

pub fn write_json<T: Serialize + ?Sized>(path: impl AsRef<Path>, value: &T) -> Result<()> {
    fs::write(path, to_json_string(value)?)?;
    Ok(())
}

pub fn read_json<T: DeserializeOwned>(path: impl AsRef<Path>) -> Result<T> {
    let text = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

/// Binary PGM: amoeba black, band grey, outside white, `y` increasing upward.
pub fn pgm_bytes(grid: &AmoebaGrid) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", grid.nx, grid.ny).into_bytes();
    for iy in (0..grid.ny).rev() {
        for ix in 0..grid.nx {
            let k = iy * grid.nx + ix;
            out.push(if grid.membership[k] {
                0
            } else if grid.band[k] {
                128
            } else {
                255
            });
        }
    }
    out
}

pub fn write_pgm(path: impl AsRef<Path>, grid: &AmoebaGrid) -> Result<()> {
    fs::write(path, pgm_bytes(grid))?;
    Ok(())
}

/// SVG with one rectangle per horizontal run of member pixels and, when
/// given, the order `(i, j)` of every hole at its center.
pub fn svg_string(grid: &AmoebaGrid, holes: Option<&HoleReport>) -> String {
    let (nx, ny) = (grid.nx, grid.ny);
    let mut s = String::new();
    let _ =
        writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{nx}" height="{ny}" viewBox="0 0 {nx} {ny}">"#);
    let _ = writeln!(s, r#"<rect width="{nx}" height="{ny}" fill="white"/>"#);
    let _ = writeln!(s, r#"<g fill="black" shape-rendering="crispEdges">"#);
    for iy in 0..ny {
        let row = ny - 1 - iy;
        let mut ix = 0;
        while ix < nx {
            if !grid.is_member(ix, iy) {
                ix += 1;
                continue;
            }
            let start = ix;
            while ix < nx && grid.is_member(ix, iy) {
                ix += 1;
            }
            let _ = writeln!(s, r#"<rect x="{start}" y="{row}" width="{}" height="1"/>"#, ix - start);
        }
    }
    s.push_str("</g>\n");
    if let Some(report) = holes {
        let _ = writeln!(s, r#"<g fill="red" font-size="{}" text-anchor="middle">"#, (nx.min(ny) / 40).max(6));
        for h in &report.holes {
            let w = grid.window;
            let px = (h.center.0 - w.x_min) / grid.dx();
            let py = ny as f64 - (h.center.1 - w.y_min) / grid.dy();
            let _ = writeln!(s, r#"<text x="{px:.2}" y="{py:.2}">({},{})</text>"#, h.order.0, h.order.1);
        }
        s.push_str("</g>\n");
    }
    s.push_str("</svg>\n");
    s
}

pub fn write_svg(path: impl AsRef<Path>, grid: &AmoebaGrid, holes: Option<&HoleReport>) -> Result<()> {
    fs::write(path, svg_string(grid, holes))?;
    Ok(())
}
