//! JSON documents for linkages and frameworks, and OBJ export of framework fragments.
//!
//! Documents carry `"kind"` and `"version"`. Floats are written with 17 significant
//! digits, so `serialize ∘ parse` is the identity on serialized documents. The lattice
//! is a list of its columns.

use std::io::Write;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use serde_json::ser::Formatter;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::geometry::{FiniteLinkage, PeriodicFramework};
use crate::quotient::to_periodic;

pub const DOCUMENT_VERSION: u64 = 1;

/// A parsed input document.
#[derive(Debug, Clone, PartialEq)]
pub enum Document {
    Linkage(FiniteLinkage),
    Framework(PeriodicFramework),
}

impl Document {
    pub fn dim(&self) -> usize {
        match self {
            Document::Linkage(l) => l.dim(),
            Document::Framework(f) => f.dim(),
        }
    }

    /// The periodic framework, converting a linkage through its marked pairs.
    pub fn to_framework(&self) -> Result<PeriodicFramework> {
        match self {
            Document::Linkage(l) => to_periodic(l),
            Document::Framework(f) => Ok(f.clone()),
        }
    }

    pub fn to_json(&self) -> String {
        match self {
            Document::Linkage(l) => linkage_to_json(l),
            Document::Framework(f) => framework_to_json(f),
        }
    }
}

/// Compact JSON with every float in `{:.16e}` form.
struct SeventeenDigits;

impl Formatter for SeventeenDigits {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()> {
        write!(writer, "{value:.16e}")
    }
}

/// Serializes any value with the document float format and a trailing newline.
pub fn to_json_string<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SeventeenDigits);
    value
        .serialize(&mut ser)
        .expect("in-memory serialization of finite data");
    buf.push(b'\n');
    String::from_utf8(buf).expect("serde_json emits UTF-8")
}

fn point(p: &DVector<f64>) -> Value {
    Value::from(p.iter().copied().collect::<Vec<f64>>())
}

pub fn linkage_to_json(l: &FiniteLinkage) -> String {
    let doc = json!({
        "kind": "linkage",
        "version": DOCUMENT_VERSION,
        "dimension": l.dim(),
        "vertices": l.vertices().iter().map(point).collect::<Vec<_>>(),
        "edges": l.edge_pairs(),
        "marked_pairs": l.marked_pairs(),
    });
    to_json_string(&doc)
}

pub fn framework_to_json(f: &PeriodicFramework) -> String {
    let columns: Vec<Value> = f
        .lattice()
        .column_iter()
        .map(|c| point(&c.into_owned()))
        .collect();
    let orbits: Vec<Value> = f
        .edge_orbits()
        .iter()
        .map(|e| json!({"u": e.u, "v": e.v, "shift": e.shift}))
        .collect();
    let doc = json!({
        "kind": "framework",
        "version": DOCUMENT_VERSION,
        "dimension": f.dim(),
        "lattice": columns,
        "vertex_orbits": f.vertex_orbits().iter().map(point).collect::<Vec<_>>(),
        "edge_orbits": orbits,
    });
    to_json_string(&doc)
}

fn schema(path: &str, message: impl Into<String>) -> Error {
    Error::schema(path, message)
}

fn field<'a>(obj: &'a Map<String, Value>, path: &str, name: &str) -> Result<(&'a Value, String)> {
    let p = format!("{path}.{name}");
    match obj.get(name) {
        Some(v) => Ok((v, p)),
        None => Err(schema(&p, "missing field")),
    }
}

fn array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| schema(path, "expected an array"))
}

fn uint(v: &Value, path: &str) -> Result<usize> {
    v.as_u64()
        .map(|u| u as usize)
        .ok_or_else(|| schema(path, "expected a non-negative integer"))
}

fn int(v: &Value, path: &str) -> Result<i64> {
    v.as_i64().ok_or_else(|| schema(path, "expected an integer"))
}

fn real(v: &Value, path: &str) -> Result<f64> {
    let x = v.as_f64().ok_or_else(|| schema(path, "expected a number"))?;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(schema(path, "number is not finite"))
    }
}

fn vector(v: &Value, path: &str, dim: usize) -> Result<DVector<f64>> {
    let a = array(v, path)?;
    if a.len() != dim {
        return Err(schema(path, format!("expected {dim} coordinates, found {}", a.len())));
    }
    let xs = a
        .iter()
        .enumerate()
        .map(|(i, x)| real(x, &format!("{path}[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    Ok(DVector::from_vec(xs))
}

fn points(v: &Value, path: &str, dim: usize) -> Result<Vec<DVector<f64>>> {
    array(v, path)?
        .iter()
        .enumerate()
        .map(|(i, p)| vector(p, &format!("{path}[{i}]"), dim))
        .collect()
}

fn pairs(v: &Value, path: &str) -> Result<Vec<(usize, usize)>> {
    array(v, path)?
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let p = format!("{path}[{i}]");
            let a = array(e, &p)?;
            if a.len() != 2 {
                return Err(schema(&p, "expected a pair of vertex indices"));
            }
            Ok((uint(&a[0], &format!("{p}[0]"))?, uint(&a[1], &format!("{p}[1]"))?))
        })
        .collect()
}

/// Parses a linkage or framework document.
pub fn parse_document(text: &str) -> Result<Document> {
    let root: Value =
        serde_json::from_str(text).map_err(|e| schema("$", format!("invalid JSON: {e}")))?;
    let obj = root
        .as_object()
        .ok_or_else(|| schema("$", "expected an object"))?;
    let (version, vp) = field(obj, "$", "version")?;
    let version = version
        .as_u64()
        .ok_or_else(|| schema(&vp, "expected a non-negative integer"))?;
    if version != DOCUMENT_VERSION {
        return Err(Error::VersionUnsupported(version));
    }
    let (kind, kp) = field(obj, "$", "kind")?;
    let (dim, dp) = field(obj, "$", "dimension")?;
    let dim = uint(dim, &dp)?;
    if dim < 2 {
        return Err(Error::BadDimension(dim));
    }
    match kind.as_str() {
        Some("linkage") => {
            let (v, p) = field(obj, "$", "vertices")?;
            let vertices = points(v, &p, dim)?;
            let (e, p) = field(obj, "$", "edges")?;
            let edges = pairs(e, &p)?;
            let (m, p) = field(obj, "$", "marked_pairs")?;
            let marked = pairs(m, &p)?;
            Ok(Document::Linkage(FiniteLinkage::new(dim, vertices, &edges, marked)?))
        }
        Some("framework") => {
            let (l, p) = field(obj, "$", "lattice")?;
            let columns = points(l, &p, dim)?;
            if columns.len() != dim {
                return Err(schema(&p, format!("expected {dim} columns, found {}", columns.len())));
            }
            let lattice = DMatrix::from_columns(&columns);
            let (v, p) = field(obj, "$", "vertex_orbits")?;
            let orbits = points(v, &p, dim)?;
            let (e, p) = field(obj, "$", "edge_orbits")?;
            let edges = array(e, &p)?
                .iter()
                .enumerate()
                .map(|(i, e)| {
                    let p = format!("{p}[{i}]");
                    let o = e.as_object().ok_or_else(|| schema(&p, "expected an object"))?;
                    let (u, up) = field(o, &p, "u")?;
                    let (v, vp) = field(o, &p, "v")?;
                    let (s, sp) = field(o, &p, "shift")?;
                    let shift = array(s, &sp)?
                        .iter()
                        .enumerate()
                        .map(|(j, x)| int(x, &format!("{sp}[{j}]")))
                        .collect::<Result<Vec<_>>>()?;
                    if shift.len() != dim {
                        return Err(schema(&sp, format!("expected {dim} entries")));
                    }
                    Ok((uint(u, &up)?, uint(v, &vp)?, shift))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(Document::Framework(PeriodicFramework::new(dim, lattice, orbits, &edges)?))
        }
        _ => Err(schema(&kp, "expected \"linkage\" or \"framework\"")),
    }
}

/// Wireframe of the block `{0 … cells−1}^d` of lattice translates as OBJ text.
///
/// Vertices are ordered by translate (first shift coordinate fastest), then orbit.
/// A line joins the two ends of an edge-orbit translate when both lie in the block.
pub fn export_obj(f: &PeriodicFramework, cells: usize) -> Result<String> {
    let d = f.dim();
    if !(d == 2 || d == 3) {
        return Err(Error::UnsupportedDimension(d));
    }
    if cells == 0 {
        return Err(Error::InvalidParameter("cells must be at least 1".into()));
    }
    let n = f.orbit_count();
    let block = cells.pow(d as u32);
    let translate = |t: usize| -> Vec<i64> {
        (0..d)
            .map(|k| ((t / cells.pow(k as u32)) % cells) as i64)
            .collect()
    };
    let index = |g: &[i64]| -> Option<usize> {
        let mut t = 0;
        for (k, &c) in g.iter().enumerate() {
            if c < 0 || c >= cells as i64 {
                return None;
            }
            t += c as usize * cells.pow(k as u32);
        }
        Some(t)
    };
    let mut out = format!("# {} vertex orbits, {} edge orbits, {cells}^{d} cells\n", n, f.edge_orbit_count());
    for t in 0..block {
        let g = DVector::from_iterator(d, translate(t).iter().map(|&c| c as f64));
        let shift = f.lattice() * g;
        for p in f.vertex_orbits() {
            let q = p + &shift;
            let z = if d == 3 { q[2] } else { 0.0 };
            out.push_str(&format!("v {:.16e} {:.16e} {:.16e}\n", q[0], q[1], z));
        }
    }
    for t in 0..block {
        let g = translate(t);
        for e in f.edge_orbits() {
            let h: Vec<i64> = g.iter().zip(&e.shift).map(|(a, b)| a + b).collect();
            if let Some(s) = index(&h) {
                out.push_str(&format!("l {} {}\n", t * n + e.u + 1, s * n + e.v + 1));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_have_seventeen_significant_digits() {
        let s = to_json_string(&vec![0.1f64, -2.0]);
        assert_eq!(s, "[1.0000000000000001e-1,-2.0000000000000000e0]\n");
    }

    #[test]
    fn unknown_kind_is_a_schema_error() {
        let e = parse_document(r#"{"version":1,"kind":"mesh","dimension":2}"#).unwrap_err();
        assert_eq!(e, Error::schema("$.kind", "expected \"linkage\" or \"framework\""));
    }
}
