//! Text forms for complex scalars, matrices and observation words.

use anyhow::{anyhow, bail, Context, Result};
use onebit_mmse::Complex64;

/// Parses `a`, `bj`, `a+bj` or `a-bj` (also accepts `i` for the unit).
pub fn parse_complex(text: &str) -> Result<Complex64> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        bail!("empty complex number");
    }
    let Some(body) = s.strip_suffix('j').or_else(|| s.strip_suffix('i')) else {
        let re = s.parse::<f64>().with_context(|| format!("invalid number `{text}`"))?;
        return Ok(Complex64::new(re, 0.0));
    };
    // the imaginary part starts at the last sign that is not an exponent sign
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    let (re_text, im_text) = match split {
        Some(i) => (&body[..i], &body[i..]),
        None => ("0", body),
    };
    let im = match im_text {
        "" | "+" => 1.0,
        "-" => -1.0,
        t => t.parse::<f64>().with_context(|| format!("invalid imaginary part in `{text}`"))?,
    };
    let re = re_text.parse::<f64>().with_context(|| format!("invalid real part in `{text}`"))?;
    if !re.is_finite() || !im.is_finite() {
        bail!("non-finite complex number `{text}`");
    }
    Ok(Complex64::new(re, im))
}

/// Rows separated by `;`, entries by `,`.
pub fn parse_rows<T>(text: &str, entry: impl Fn(&str) -> Result<T>) -> Result<Vec<Vec<T>>> {
    let rows = text
        .split(';')
        .map(|row| row.split(',').map(|e| entry(e.trim())).collect::<Result<Vec<T>>>())
        .collect::<Result<Vec<_>>>()?;
    let width = rows.first().map(Vec::len).unwrap_or(0);
    if width == 0 || rows.iter().any(|r| r.len() != width) {
        return Err(anyhow!("matrix rows must be non-empty and of equal length"));
    }
    Ok(rows)
}

/// Picks the Cartesian value or assembles `mag·e^{j·arg}`; zero if neither.
pub fn resolve_complex(
    name: &str,
    cartesian: Option<Complex64>,
    mag: Option<f64>,
    arg: Option<f64>,
) -> Result<Complex64> {
    match (cartesian, mag, arg) {
        (Some(_), Some(_), _) | (Some(_), _, Some(_)) => {
            bail!("--{name} cannot be combined with --{name}-mag/--{name}-arg")
        }
        (Some(z), None, None) => Ok(z),
        (None, Some(m), a) => Ok(Complex64::from_polar(m, a.unwrap_or(0.0))),
        (None, None, Some(_)) => bail!("--{name}-arg requires --{name}-mag"),
        (None, None, None) => Ok(Complex64::new(0.0, 0.0)),
    }
}
