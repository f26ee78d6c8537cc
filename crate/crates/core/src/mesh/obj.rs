//! ASCII Wavefront OBJ input and output (`v` and `f` records only).

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::mesh::TriMesh;
use crate::scalar::Real;

/// Reads a closed triangle mesh. Errors carry the 1-based line number of the
/// offending record.
pub fn load_obj<T: Real, R: BufRead>(reader: R) -> Result<TriMesh<T>> {
    let mut points = Vec::new();
    let mut faces = Vec::new();
    let mut face_lines = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line?;
        let line = line.split('#').next().unwrap_or("");
        let mut tok = line.split_whitespace();
        match tok.next() {
            Some("v") => {
                let mut c = [T::zero(); 3];
                for slot in &mut c {
                    let s = tok
                        .next()
                        .ok_or_else(|| Error::Parse("vertex needs three coordinates".into()).at_line(lineno))?;
                    let x: f64 = s
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad coordinate `{s}`")).at_line(lineno))?;
                    if !x.is_finite() {
                        return Err(Error::Parse(format!("non-finite coordinate `{s}`")).at_line(lineno));
                    }
                    *slot = T::lit(x);
                }
                points.push(c);
            }
            Some("f") => {
                let mut idx = Vec::with_capacity(3);
                for s in tok {
                    let first = s.split('/').next().unwrap_or("");
                    let i: i64 = first
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad face index `{s}`")).at_line(lineno))?;
                    let resolved = if i > 0 {
                        i - 1
                    } else if i < 0 {
                        points.len() as i64 + i
                    } else {
                        return Err(Error::Parse("face index 0 is invalid".into()).at_line(lineno));
                    };
                    if resolved < 0 {
                        return Err(Error::Parse(format!("face index `{s}` out of range")).at_line(lineno));
                    }
                    idx.push(resolved as usize);
                }
                if idx.len() != 3 {
                    return Err(Error::NonTriangle {
                        face: faces.len(),
                        count: idx.len(),
                    }
                    .at_line(lineno));
                }
                faces.push([idx[0], idx[1], idx[2]]);
                face_lines.push(lineno);
            }
            _ => {}
        }
    }
    TriMesh::new(points, faces).map_err(|e| match face_of(&e) {
        Some(f) => e.at_line(face_lines[f]),
        None => e,
    })
}

fn face_of(e: &Error) -> Option<usize> {
    match *e {
        Error::IndexOutOfRange { face, .. }
        | Error::NonManifoldEdge { face, .. }
        | Error::InconsistentOrientation { face, .. }
        | Error::OpenBoundary { face, .. }
        | Error::DegenerateFace { face } => Some(face),
        _ => None,
    }
}

/// Writes the mesh with 9 significant digits per coordinate.
pub fn save_obj<T: Real, W: Write>(mesh: &TriMesh<T>, writer: W) -> Result<()> {
    save_obj_with_precision(mesh, writer, 9)
}

pub fn save_obj_with_precision<T: Real, W: Write>(
    mesh: &TriMesh<T>,
    mut writer: W,
    digits: usize,
) -> Result<()> {
    let p = digits.max(1) - 1;
    for v in 0..mesh.num_vertices() {
        let [x, y, z] = mesh.point(v);
        writeln!(
            writer,
            "v {:.p$e} {:.p$e} {:.p$e}",
            x.to_f64_lossy(),
            y.to_f64_lossy(),
            z.to_f64_lossy()
        )?;
    }
    for [a, b, c] in mesh.faces() {
        writeln!(writer, "f {} {} {}", a + 1, b + 1, c + 1)?;
    }
    writer.flush()?;
    Ok(())
}
