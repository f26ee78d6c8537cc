//! Parsing of potential specifications.
//!
//! A potential is written as a `+`-separated sum of terms:
//!
//! - `const:<c>`: the function `c` sampled as a half-density
//! - `lobe:<axis>:<amp>:<width>`: mean-free Gaussian bump, axis `x`, `y`, `z`
//!   (optionally signed) or `ax,ay,az`
//! - `own`: the mesh's measured mean-curvature half-density
//! - `file:<path>` or a bare path: per-vertex function values, whitespace
//!   separated, `#` comments allowed

use std::fs;
use std::path::PathBuf;

use spinwright_core::mesh::mean_curvature_half_density;
use spinwright_core::{HalfDensity, Mesh};

#[derive(Clone, Debug, PartialEq)]
pub enum Term {
    Const(f64),
    Lobe { axis: [f64; 3], amp: f64, width: f64 },
    Own,
    File(PathBuf),
}

#[derive(Clone, Debug, PartialEq)]
pub struct RhoSpec {
    pub terms: Vec<Term>,
    /// The text this was parsed from.
    pub source: String,
}

fn number(s: &str, what: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("invalid {what} `{s}`"))?;
    if !v.is_finite() {
        return Err(format!("{what} must be finite"));
    }
    Ok(v)
}

fn axis(s: &str) -> Result<[f64; 3], String> {
    let (sign, name) = match s.strip_prefix('-') {
        Some(rest) => (-1.0, rest),
        None => (1.0, s.strip_prefix('+').unwrap_or(s)),
    };
    let v = match name {
        "x" => [1.0, 0.0, 0.0],
        "y" => [0.0, 1.0, 0.0],
        "z" => [0.0, 0.0, 1.0],
        _ => {
            let parts: Vec<&str> = s.split(',').collect();
            if parts.len() != 3 {
                return Err(format!("axis `{s}` must be x, y, z or ax,ay,az"));
            }
            let v = [
                number(parts[0], "axis component")?,
                number(parts[1], "axis component")?,
                number(parts[2], "axis component")?,
            ];
            if v.iter().all(|&c| c == 0.0) {
                return Err("axis must be nonzero".into());
            }
            return Ok(v);
        }
    };
    Ok(v.map(|c| sign * c))
}

fn term(s: &str) -> Result<Term, String> {
    let s = s.trim();
    if s == "own" {
        return Ok(Term::Own);
    }
    if let Some(c) = s.strip_prefix("const:") {
        return Ok(Term::Const(number(c, "constant")?));
    }
    if let Some(rest) = s.strip_prefix("lobe:") {
        let parts: Vec<&str> = rest.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("lobe `{s}` must be lobe:<axis>:<amp>:<width>"));
        }
        let width = number(parts[2], "lobe width")?;
        if !(width > 0.0) {
            return Err("lobe width must be positive".into());
        }
        return Ok(Term::Lobe {
            axis: axis(parts[0])?,
            amp: number(parts[1], "lobe amplitude")?,
            width,
        });
    }
    if let Some(p) = s.strip_prefix("file:") {
        return Ok(Term::File(PathBuf::from(p)));
    }
    if s.is_empty() {
        return Err("empty potential term".into());
    }
    if s.contains(':') && !s.contains('/') && !s.contains('.') {
        return Err(format!("unknown potential term `{s}`"));
    }
    Ok(Term::File(PathBuf::from(s)))
}

impl std::str::FromStr for RhoSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        // A `+` after `:`, `,` or an exponent marker is a sign.
        let mut terms = Vec::new();
        let mut start = 0;
        let bytes = s.as_bytes();
        for (i, &b) in bytes.iter().enumerate() {
            if b == b'+' && i > start && !matches!(bytes[i - 1], b':' | b',' | b'e' | b'E') {
                terms.push(term(&s[start..i])?);
                start = i + 1;
            }
        }
        terms.push(term(&s[start..])?);
        Ok(RhoSpec {
            terms,
            source: s.to_string(),
        })
    }
}

fn read_values(path: &PathBuf, n: usize) -> Result<Vec<f64>, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let mut out = Vec::with_capacity(n);
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("");
        for tok in line.split_whitespace() {
            out.push(
                number(tok, "value").map_err(|e| format!("{}:{}: {e}", path.display(), lineno + 1))?,
            );
        }
    }
    if out.len() != n {
        return Err(format!(
            "{}: expected {n} values (one per vertex), found {}",
            path.display(),
            out.len()
        ));
    }
    Ok(out)
}

impl RhoSpec {
    pub fn build(&self, mesh: &Mesh) -> Result<HalfDensity, String> {
        let mut total = HalfDensity::zeros(mesh);
        for t in &self.terms {
            let field = match t {
                Term::Const(c) => HalfDensity::constant(mesh, *c),
                Term::Lobe { axis, amp, width } => {
                    HalfDensity::lobe(mesh, *axis, *amp, *width).map_err(|e| e.to_string())?
                }
                Term::Own => mean_curvature_half_density(mesh).map_err(|e| e.to_string())?,
                Term::File(p) => {
                    let f = read_values(p, mesh.num_vertices())?;
                    HalfDensity::from_function(mesh, &f).map_err(|e| e.to_string())?
                }
            };
            total = total.add(&field).map_err(|e| e.to_string())?;
        }
        Ok(total)
    }
}
