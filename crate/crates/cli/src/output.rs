//! CSV and JSON writers.
//!
//! Every float is written as `{:.16e}` (17 significant digits), so output is
//! byte-stable and parses back to the same `f64`.
//!
//! Result CSV columns, in order:
//!
//! ```text
//! point,k,phi_mix,sign,type,
//! xi,intensity,omega,s_x,s_y,s_z,
//! j_pecd_{x,y,z},j_cross_{x,y,z},j_par_{x,y,z},j_perp_{x,y,z},j_s_{x,y,z},
//! m_pecd,m_cross,m_par,m_perp,n,
//! pecd_per_n,cross_per_n,par_per_n,perp_per_n
//! ```
//!
//! followed, with `per_n`, by `{pecd,cross,par,perp}_per_n_{x,y,z}`. The
//! first five columns identify the scan point; `phi_mix`, `sign` and `type`
//! are empty for non-channel sources. Values undefined at `N = 0` are empty
//! (CSV) or `null` (JSON).
//!
//! In CSV mode multipoles and the A table go to sidecar files next to the
//! main output, `<stem>.multipoles.csv` and `<stem>.a_table.csv`.

use std::fmt::Write as _;
use std::io;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use spinpecd::currents::CurrentSet;
use spinpecd::fields::MultipoleSet;
use spinpecd::oracle::ATable;
use spinpecd::Vec3;

use crate::run::PointResult;
use crate::scenario::{Format, Plan};

fn num(x: f64) -> String {
    // -0 prints as 0
    format!("{:.16e}", x + 0.0)
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

const VECTORS: [&str; 5] = ["j_pecd", "j_cross", "j_par", "j_perp", "j_s"];
const CURRENTS: [&str; 4] = ["pecd", "cross", "par", "perp"];

pub fn csv_header(per_n: bool) -> String {
    let mut cols: Vec<String> = ["point", "k", "phi_mix", "sign", "type", "xi", "intensity", "omega", "s_x", "s_y", "s_z"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    for v in VECTORS {
        cols.extend(["x", "y", "z"].iter().map(|c| format!("{v}_{c}")));
    }
    cols.extend(["m_pecd", "m_cross", "m_par", "m_perp", "n"].iter().map(|s| s.to_string()));
    cols.extend(CURRENTS.iter().map(|c| format!("{c}_per_n")));
    if per_n {
        for c in CURRENTS {
            cols.extend(["x", "y", "z"].iter().map(|a| format!("{c}_per_n_{a}")));
        }
    }
    cols.join(",")
}

fn point_columns(r: &PointResult) -> String {
    let (phi, sign, kind) = match r.point.mix {
        Some(m) => (num(m.phi), m.sign.as_str(), m.kind.as_str()),
        None => (String::new(), "", ""),
    };
    format!("{},{},{phi},{sign},{kind}", r.index, num(r.point.k))
}

fn vectors(set: &CurrentSet) -> [Vec3; 5] {
    [set.pecd.vector, set.cross.vector, set.par.vector, set.perp.vector, set.spin_current()]
}

fn per_n_vectors(set: &CurrentSet) -> Option<[Vec3; 4]> {
    let n = set.total_yield;
    (n > 0.0).then(|| [set.pecd.vector / n, set.cross.vector / n, set.par.vector / n, set.perp.vector / n])
}

fn push_vec(line: &mut String, v: &Vec3) {
    for x in v.iter() {
        let _ = write!(line, ",{}", num(*x));
    }
}

fn csv_row(plan: &Plan, r: &PointResult, set: &CurrentSet) -> String {
    let mut line = point_columns(r);
    let _ = write!(line, ",{},{},{}", plan.xi, num(plan.photon.intensity()), opt(plan.photon.omega()));
    push_vec(&mut line, &set.spin_axis.vec());
    for v in vectors(set) {
        push_vec(&mut line, &v);
    }
    for x in [set.pecd.factor, set.cross.factor, set.par.factor, set.perp.factor, set.total_yield] {
        let _ = write!(line, ",{}", num(x));
    }
    let normalized = set.normalized();
    for i in 0..4 {
        let _ = write!(line, ",{}", opt(normalized.map(|n| n[i])));
    }
    if plan.output.per_n {
        match per_n_vectors(set) {
            Some(vs) => vs.iter().for_each(|v| push_vec(&mut line, v)),
            None => line.push_str(&",".repeat(12)),
        }
    }
    line
}

pub fn results_csv(plan: &Plan, results: &[PointResult]) -> String {
    let mut out = csv_header(plan.output.per_n);
    out.push('\n');
    for r in results {
        for set in &r.rows {
            out.push_str(&csv_row(plan, r, set));
            out.push('\n');
        }
    }
    out
}

pub const MULTIPOLE_HEADER: &str = "point,k,phi_mix,sign,type,field,field_omega_x,field_omega_y,field_omega_z,bpar,l,m,bpar_re,bpar_im,bperp1_re,bperp1_im,bperp2_re,bperp2_im";

pub fn multipoles_csv(results: &[PointResult]) -> String {
    let mut out = format!("{MULTIPOLE_HEADER}\n");
    for r in results {
        let Some(pair) = &r.multipoles else { continue };
        for (name, m) in ["plus", "minus"].iter().zip(pair) {
            let mut prefix = format!("{},{name}", point_columns(r));
            push_vec(&mut prefix, &m.omega);
            let _ = write!(prefix, ",{}", num(m.bpar));
            for (l, mm) in m.indices() {
                let _ = write!(out, "{prefix},{l},{mm}");
                for z in [m.bpar_lm(l, mm), m.bperp1_lm(l, mm), m.bperp2_lm(l, mm)] {
                    let _ = write!(out, ",{},{}", num(z.re), num(z.im));
                }
                out.push('\n');
            }
        }
    }
    out
}

pub const A_TABLE_HEADER: &str = "point,k,phi_mix,sign,type,l,m,ls,ms,re,im";

pub fn a_table_csv(results: &[PointResult]) -> String {
    let mut out = format!("{A_TABLE_HEADER}\n");
    for r in results {
        let Some(a) = &r.a_table else { continue };
        let prefix = point_columns(r);
        for (l, m, ls, ms, z) in a.iter() {
            let _ = writeln!(out, "{prefix},{l},{m},{ls},{ms},{},{}", num(z.re), num(z.im));
        }
    }
    out
}

fn jvec(v: &Vec3) -> Value {
    json!([v.x, v.y, v.z])
}

fn set_json(set: &CurrentSet, per_n: bool) -> Value {
    let normalized = set.normalized();
    let mut norm = serde_json::Map::new();
    for (i, c) in CURRENTS.iter().enumerate() {
        norm.insert(c.to_string(), json!(normalized.map(|n| n[i])));
    }
    let mut obj = json!({
        "spin_axis": jvec(&set.spin_axis.vec()),
        "j_pecd": jvec(&set.pecd.vector),
        "j_cross": jvec(&set.cross.vector),
        "j_par": jvec(&set.par.vector),
        "j_perp": jvec(&set.perp.vector),
        "j_s": jvec(&set.spin_current()),
        "m_pecd": set.pecd.factor,
        "m_cross": set.cross.factor,
        "m_par": set.par.factor,
        "m_perp": set.perp.factor,
        "n": set.total_yield,
        "per_n": Value::Object(norm),
    });
    if per_n {
        let vs = per_n_vectors(set);
        let mut m = serde_json::Map::new();
        for (i, c) in CURRENTS.iter().enumerate() {
            m.insert(c.to_string(), vs.map(|v| jvec(&v[i])).unwrap_or(Value::Null));
        }
        obj["per_n_vectors"] = Value::Object(m);
    }
    obj
}

fn complex_json(z: num_complex::Complex64) -> Value {
    json!([z.re, z.im])
}

fn multipole_json(m: &MultipoleSet) -> Value {
    let entries: Vec<Value> = m
        .indices()
        .map(|(l, mm)| {
            json!({
                "l": l,
                "m": mm,
                "bpar": complex_json(m.bpar_lm(l, mm)),
                "bperp1": complex_json(m.bperp1_lm(l, mm)),
                "bperp2": complex_json(m.bperp2_lm(l, mm)),
            })
        })
        .collect();
    json!({ "omega": jvec(&m.omega), "bpar": m.bpar, "l_report": m.l_report(), "moments": entries })
}

fn a_json(a: &ATable) -> Value {
    let entries: Vec<Value> = a
        .iter()
        .map(|(l, m, ls, ms, z)| json!({ "l": l, "m": m, "ls": ls, "ms": ms, "value": complex_json(z) }))
        .collect();
    json!({ "l_k": a.l_k(), "l_s": a.l_s(), "entries": entries })
}

pub fn results_json(plan: &Plan, results: &[PointResult]) -> Value {
    let points: Vec<Value> = results
        .iter()
        .map(|r| {
            let mix = r.point.mix;
            let mut obj = json!({
                "point": r.index,
                "k": r.point.k,
                "phi_mix": mix.map(|m| m.phi),
                "sign": mix.map(|m| m.sign.as_str()),
                "type": mix.map(|m| m.kind.as_str()),
                "label": r.point.dipole.label(),
                "results": r.rows.iter().map(|s| set_json(s, plan.output.per_n)).collect::<Vec<_>>(),
            });
            if let Some([plus, minus]) = &r.multipoles {
                obj["multipoles"] = json!({ "plus": multipole_json(plus), "minus": multipole_json(minus) });
            }
            if let Some(a) = &r.a_table {
                obj["a_table"] = a_json(a);
            }
            obj
        })
        .collect();
    json!({
        "photon": {
            "xi": plan.xi,
            "intensity": plan.photon.intensity(),
            "omega": plan.photon.omega(),
        },
        "points": points,
    })
}

/// Pretty printing with fixed-precision floats.
struct FixedFloats(serde_json::ser::PrettyFormatter<'static>);

impl serde_json::ser::Formatter for FixedFloats {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
        write!(w, "{:.16e}", v + 0.0)
    }
    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

pub fn json_text(v: &Value) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FixedFloats(serde_json::ser::PrettyFormatter::new()));
    serde::Serialize::serialize(v, &mut ser).expect("serializing a JSON value into memory cannot fail");
    buf.push(b'\n');
    String::from_utf8(buf).expect("JSON output is UTF-8")
}

fn sidecar(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}.{suffix}.csv"))
}

/// Writes all outputs of a run; returns the paths written.
pub fn write(plan: &Plan, results: &[PointResult]) -> io::Result<Vec<PathBuf>> {
    let out = &plan.output;
    let (main, extra) = match out.format {
        Format::Json => (json_text(&results_json(plan, results)), Vec::new()),
        Format::Csv => {
            let mut extra = Vec::new();
            if let Some(path) = &out.path {
                if out.multipoles.is_some() {
                    extra.push((sidecar(path, "multipoles"), multipoles_csv(results)));
                }
                if out.a_table.is_some() {
                    extra.push((sidecar(path, "a_table"), a_table_csv(results)));
                }
            }
            (results_csv(plan, results), extra)
        }
    };
    let mut written = Vec::new();
    match &out.path {
        Some(path) => {
            std::fs::write(path, main)?;
            written.push(path.clone());
        }
        None => io::Write::write_all(&mut io::stdout().lock(), main.as_bytes())?,
    }
    for (path, text) in extra {
        std::fs::write(&path, text)?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_column_count() {
        assert_eq!(csv_header(false).split(',').count(), 11 + 15 + 5 + 4);
        assert_eq!(csv_header(true).split(',').count(), 11 + 15 + 5 + 4 + 12);
    }

    #[test]
    fn json_floats_round_trip() {
        let x = 0.1 + 0.2;
        let text = json_text(&json!({ "v": [x, -0.0, 1e-300], "n": null, "i": 3 }));
        assert!(text.contains("3.0000000000000004e-1"), "{text}");
        let back: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(back["v"][0].as_f64(), Some(x));
        assert_eq!(back["v"][2].as_f64(), Some(1e-300));
        assert!(back["n"].is_null());
        assert_eq!(back["i"].as_u64(), Some(3));
    }

    #[test]
    fn sidecar_names() {
        assert_eq!(sidecar(Path::new("/tmp/run.csv"), "a_table"), PathBuf::from("/tmp/run.a_table.csv"));
    }
}
