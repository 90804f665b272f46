//! OFF and OBJ readers (triangles only) and a canonical OFF writer.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::Point3;

use crate::error::{parse_err, Error, Result};
use crate::mesh::Mesh;

/// Reads `.off` or `.obj` by extension.
pub fn read_mesh(path: &Path) -> Result<Mesh> {
    let text = std::fs::read_to_string(path)?;
    match path
        .extension()
        .and_then(|e| e.to_str())
        .map(str::to_ascii_lowercase)
        .as_deref()
    {
        Some("obj") => parse_obj(&text),
        Some("off") => parse_off(&text),
        other => Err(Error::InvalidParameter(format!(
            "unsupported mesh extension {:?} for {}",
            other.unwrap_or(""),
            path.display()
        ))),
    }
}

/// Content lines with comments stripped, paired with 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let line = line.split('#').next().unwrap_or("").trim();
        (!line.is_empty()).then_some((i + 1, line))
    })
}

fn parse_num<T: std::str::FromStr>(token: &str, line: usize, what: &str) -> Result<T> {
    token
        .parse()
        .map_err(|_| parse_err(line, format!("invalid {what} '{token}'")))
}

pub fn parse_off(text: &str) -> Result<Mesh> {
    let mut lines = content_lines(text);
    let (line, header) = lines.next().ok_or_else(|| parse_err(1, "missing OFF header"))?;
    let mut header_tokens = header.split_whitespace();
    if header_tokens.next() != Some("OFF") {
        return Err(parse_err(line, "malformed header: expected 'OFF'"));
    }
    // counts may share the header line ("OFF 8 12 0")
    let rest: Vec<&str> = header_tokens.collect();
    let (count_line, counts) = if rest.is_empty() {
        let (l, c) = lines
            .next()
            .ok_or_else(|| parse_err(line + 1, "malformed header: missing counts"))?;
        (l, c.split_whitespace().collect::<Vec<_>>())
    } else {
        (line, rest)
    };
    if counts.len() < 2 {
        return Err(parse_err(count_line, "malformed header: expected vertex and face counts"));
    }
    let nv: usize = parse_num(counts[0], count_line, "vertex count")?;
    let nf: usize = parse_num(counts[1], count_line, "face count")?;

    let body: Vec<(usize, &str)> = lines.collect();
    if body.len() != nv + nf {
        return Err(count_mismatch(&body, nv, nf, count_line));
    }

    let mut vertices = Vec::with_capacity(nv);
    for &(l, record) in &body[..nv] {
        let t: Vec<&str> = record.split_whitespace().collect();
        if t.len() < 3 {
            return Err(parse_err(l, "vertex line needs three coordinates"));
        }
        vertices.push(Point3::new(
            parse_num(t[0], l, "coordinate")?,
            parse_num(t[1], l, "coordinate")?,
            parse_num(t[2], l, "coordinate")?,
        ));
    }

    let mut faces = Vec::with_capacity(nf);
    for &(l, record) in &body[nv..] {
        let t: Vec<&str> = record.split_whitespace().collect();
        let arity: usize = parse_num(t[0], l, "face vertex count")?;
        if arity != 3 {
            return Err(parse_err(l, format!("non-triangular face with {arity} vertices")));
        }
        if t.len() < 4 {
            return Err(parse_err(l, "face line needs three indices"));
        }
        let mut tri = [0usize; 3];
        for (slot, token) in tri.iter_mut().zip(&t[1..4]) {
            *slot = parse_num(token, l, "vertex index")?;
            if *slot >= nv {
                return Err(parse_err(
                    l,
                    format!("index out of range: {slot} (vertex count {nv})"),
                ));
            }
        }
        if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
            return Err(parse_err(l, "face repeats a vertex index"));
        }
        faces.push(tri);
    }
    Mesh::new(vertices, faces)
}

fn looks_like_face(record: &str) -> bool {
    let t: Vec<&str> = record.split_whitespace().collect();
    match t.first().and_then(|a| a.parse::<usize>().ok()) {
        Some(arity) if arity >= 3 => {
            t.len() > arity && t[1..=arity].iter().all(|s| s.parse::<usize>().is_ok())
        }
        _ => false,
    }
}

// Decides which section is short (or long) by counting trailing face records.
fn count_mismatch(body: &[(usize, &str)], nv: usize, nf: usize, count_line: usize) -> Error {
    let found_faces = body.iter().rev().take_while(|(_, r)| looks_like_face(r)).count();
    let found_vertices = body.len() - found_faces;
    let line = body.last().map_or(count_line, |&(l, _)| l);
    if found_vertices != nv {
        parse_err(
            line,
            format!("vertex count mismatch: declared {nv}, found {found_vertices}"),
        )
    } else {
        parse_err(
            line,
            format!("face count mismatch: declared {nf}, found {found_faces}"),
        )
    }
}

pub fn parse_obj(text: &str) -> Result<Mesh> {
    let mut vertices = Vec::new();
    let mut faces = Vec::new();
    for (l, record) in content_lines(text) {
        let mut t = record.split_whitespace();
        match t.next() {
            Some("v") => {
                let c: Vec<&str> = t.collect();
                if c.len() < 3 {
                    return Err(parse_err(l, "vertex line needs three coordinates"));
                }
                vertices.push(Point3::new(
                    parse_num(c[0], l, "coordinate")?,
                    parse_num(c[1], l, "coordinate")?,
                    parse_num(c[2], l, "coordinate")?,
                ));
            }
            Some("f") => {
                let refs: Vec<&str> = t.collect();
                if refs.len() != 3 {
                    return Err(parse_err(
                        l,
                        format!("non-triangular face with {} vertices", refs.len()),
                    ));
                }
                let mut tri = [0usize; 3];
                for (slot, r) in tri.iter_mut().zip(refs) {
                    // "i", "i/t", "i//n", "i/t/n": only the position index matters
                    let raw: i64 = parse_num(r.split('/').next().unwrap_or(""), l, "vertex index")?;
                    let count = vertices.len() as i64;
                    let resolved = match raw {
                        0 => return Err(parse_err(l, "index out of range: 0")),
                        i if i > 0 => i - 1,
                        i => count + i,
                    };
                    if resolved < 0 || resolved >= count {
                        return Err(parse_err(
                            l,
                            format!("index out of range: {raw} (vertex count {count})"),
                        ));
                    }
                    *slot = resolved as usize;
                }
                if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                    return Err(parse_err(l, "face repeats a vertex index"));
                }
                faces.push(tri);
            }
            _ => {}
        }
    }
    Mesh::new(vertices, faces)
}

/// Canonical OFF text. Coordinates use the shortest round-trip float
/// representation, so `parse_off(write_off(m)) == m`.
pub fn write_off(mesh: &Mesh) -> String {
    let mut out = String::new();
    writeln!(out, "OFF").unwrap();
    writeln!(out, "{} {} 0", mesh.vertex_count(), mesh.face_count()).unwrap();
    for p in mesh.vertices() {
        writeln!(out, "{:?} {:?} {:?}", p.x, p.y, p.z).unwrap();
    }
    for [a, b, c] in mesh.faces() {
        writeln!(out, "3 {a} {b} {c}").unwrap();
    }
    out
}
