use std::fmt::Write;

use super::ExportError;
use crate::mesh::TriangleMesh;
use crate::scalar::Real;

/// Formats like C's `%.9g`: nine significant digits, trailing zeros removed.
pub fn format_g9(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x == 0.0 { "0".into() } else { format!("{x}") };
    }
    let sci = format!("{:.8e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let trim = |s: &str| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if (-4..9).contains(&exp) {
        trim(&format!("{:.*}", (8 - exp) as usize, x))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", trim(mantissa), sign, exp.abs())
    }
}

/// Wavefront OBJ text: `v`, `vn`, `vt` and 1-based `f` records.
pub fn export_obj<T: Real>(mesh: &TriangleMesh<T>) -> Result<Vec<u8>, ExportError> {
    if mesh.is_empty() {
        return Err(ExportError::EmptyMesh(mesh.material.name.clone()));
    }
    let mut s = String::new();
    writeln!(s, "o {}", mesh.material.name).unwrap();
    let g = |v: T| format_g9(v.as_f64());
    for p in &mesh.positions {
        writeln!(s, "v {} {} {}", g(p[0]), g(p[1]), g(p[2])).unwrap();
    }
    for n in &mesh.normals {
        writeln!(s, "vn {} {} {}", g(n[0]), g(n[1]), g(n[2])).unwrap();
    }
    if let Some(uvs) = &mesh.uvs {
        for uv in uvs {
            writeln!(s, "vt {} {}", g(uv[0]), g(uv[1])).unwrap();
        }
    }
    let has_n = !mesh.normals.is_empty();
    let has_t = mesh.uvs.is_some();
    for t in mesh.triangles() {
        let refs: Vec<String> = t
            .iter()
            .map(|&i| {
                let k = i + 1;
                match (has_t, has_n) {
                    (true, true) => format!("{k}/{k}/{k}"),
                    (false, true) => format!("{k}//{k}"),
                    (true, false) => format!("{k}/{k}"),
                    (false, false) => format!("{k}"),
                }
            })
            .collect();
        writeln!(s, "f {}", refs.join(" ")).unwrap();
    }
    Ok(s.into_bytes())
}
