//! Dipole coefficient files.
//!
//! UTF-8, comma-delimited, one coefficient per row, with the header
//!
//! ```text
//! k,q,mu,l,m,re,im
//! ```
//!
//! `q` is `x`, `y` or `z`; `mu` is `+0.5` or `-0.5`. Rows sharing the same
//! `k` form one dipole; several `k` blocks describe an energy scan and are
//! returned in order of first appearance. Omitted rows are zero. Blank lines
//! and lines starting with `#` are ignored, except that a `# label: <text>`
//! line sets the label of every dipole read from the file. Numbers are
//! written with 17 significant digits, so a save/load round trip is exact.

use std::fs;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use num_complex::Complex64;

use super::{Axis, PartialWaveDipole, Spin};
use crate::{Error, Result};

pub const HEADER: &str = "k,q,mu,l,m,re,im";

struct Row {
    line: usize,
    k: f64,
    q: Axis,
    spin: Spin,
    l: usize,
    m: i32,
    value: Complex64,
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn parse_f64(s: &str, what: &str, line: usize) -> Result<f64> {
    let v: f64 = s
        .parse()
        .map_err(|_| parse_err(line, format!("invalid {what} `{s}`")))?;
    if !v.is_finite() {
        return Err(parse_err(line, format!("non-finite {what} `{s}`")));
    }
    Ok(v)
}

fn parse_row(text: &str, line: usize) -> Result<Row> {
    let fields: Vec<&str> = text.split(',').map(str::trim).collect();
    if fields.len() != 7 {
        return Err(parse_err(line, format!("expected 7 fields, found {}", fields.len())));
    }
    let k = parse_f64(fields[0], "k", line)?;
    if k <= 0.0 {
        return Err(parse_err(line, format!("k must be positive, got {k}")));
    }
    let q = match fields[1] {
        "x" => Axis::X,
        "y" => Axis::Y,
        "z" => Axis::Z,
        other => return Err(parse_err(line, format!("invalid component `{other}`"))),
    };
    let mu = parse_f64(fields[2], "mu", line)?;
    let spin = Spin::from_mu(mu).ok_or_else(|| parse_err(line, format!("mu must be +0.5 or -0.5, got `{}`", fields[2])))?;
    let l: usize = fields[3]
        .parse()
        .map_err(|_| parse_err(line, format!("invalid l `{}`", fields[3])))?;
    let m: i32 = fields[4]
        .parse()
        .map_err(|_| parse_err(line, format!("invalid m `{}`", fields[4])))?;
    if m.unsigned_abs() as usize > l {
        return Err(parse_err(line, format!("|m| = {} exceeds l = {l}", m.abs())));
    }
    let re = parse_f64(fields[5], "re", line)?;
    let im = parse_f64(fields[6], "im", line)?;
    Ok(Row {
        line,
        k,
        q,
        spin,
        l,
        m,
        value: Complex64::new(re, im),
    })
}

/// Parses every `k` block of a coefficient file.
pub fn read_dipoles<R: Read>(reader: R) -> Result<Vec<PartialWaveDipole>> {
    let mut label = String::new();
    let mut header_seen = false;
    let mut blocks: Vec<(f64, Vec<Row>)> = Vec::new();
    let mut seen = std::collections::HashMap::new();

    for (i, line) in BufReader::new(reader).lines().enumerate() {
        let lineno = i + 1;
        let line = line?;
        let text = line.trim();
        if text.is_empty() {
            continue;
        }
        if let Some(comment) = text.strip_prefix('#') {
            if let Some(l) = comment.trim().strip_prefix("label:") {
                label = l.trim().to_string();
            }
            continue;
        }
        if !header_seen {
            let normalized: String = text.chars().filter(|c| !c.is_whitespace()).collect();
            if normalized != HEADER {
                return Err(parse_err(lineno, format!("expected header `{HEADER}`")));
            }
            header_seen = true;
            continue;
        }
        let row = parse_row(text, lineno)?;
        let key = (row.k.to_bits(), row.q, row.spin, row.l, row.m);
        if let Some(first) = seen.insert(key, lineno) {
            return Err(parse_err(
                lineno,
                format!("duplicate coefficient (q={}, mu={}, l={}, m={}) first given on line {first}", row.q.label(), row.spin.mu(), row.l, row.m),
            ));
        }
        match blocks.iter_mut().find(|(k, _)| *k == row.k) {
            Some((_, rows)) => rows.push(row),
            None => blocks.push((row.k, vec![row])),
        }
    }
    if !header_seen {
        return Err(parse_err(1, format!("missing header `{HEADER}`")));
    }

    let mut out = Vec::with_capacity(blocks.len());
    for (k, rows) in blocks {
        let lmax = rows.iter().map(|r| r.l).max().unwrap_or(0);
        let mut d = PartialWaveDipole::zeros(k, lmax).map_err(|e| parse_err(rows[0].line, e.to_string()))?;
        for r in &rows {
            d.set_coeff(r.q, r.spin, r.l, r.m, r.value)
                .map_err(|e| parse_err(r.line, e.to_string()))?;
        }
        out.push(d.with_label(label.clone()));
    }
    Ok(out)
}

fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes dipoles in file order; all-zero coefficients are omitted.
pub fn write_dipoles<W: Write>(mut w: W, dipoles: &[PartialWaveDipole]) -> Result<()> {
    if let Some(label) = dipoles.first().map(|d| d.label()).filter(|l| !l.is_empty()) {
        writeln!(w, "# label: {}", label.replace('\n', " "))?;
    }
    writeln!(w, "{HEADER}")?;
    for d in dipoles {
        let k = fmt_f64(d.k());
        for (q, s, l, m, c) in d.terms() {
            if c.re == 0.0 && c.im == 0.0 {
                continue;
            }
            let mu = match s {
                Spin::Up => "+0.5",
                Spin::Down => "-0.5",
            };
            writeln!(w, "{k},{},{mu},{l},{m},{},{}", q.label(), fmt_f64(c.re), fmt_f64(c.im))?;
        }
    }
    Ok(())
}

pub fn load_dipoles(path: impl AsRef<Path>) -> Result<Vec<PartialWaveDipole>> {
    read_dipoles(fs::File::open(path)?)
}

/// Loads a file that must hold exactly one `k` block.
pub fn load_dipole(path: impl AsRef<Path>) -> Result<PartialWaveDipole> {
    let mut all = load_dipoles(path)?;
    match all.len() {
        1 => Ok(all.remove(0)),
        0 => Err(parse_err(1, "file contains no coefficients")),
        n => Err(parse_err(1, format!("file contains {n} k blocks; load them as a scan"))),
    }
}

pub fn save_dipoles(dipoles: &[PartialWaveDipole], path: impl AsRef<Path>) -> Result<()> {
    let mut buf = Vec::new();
    write_dipoles(&mut buf, dipoles)?;
    fs::write(path, buf)?;
    Ok(())
}

pub fn save_dipole(d: &PartialWaveDipole, path: impl AsRef<Path>) -> Result<()> {
    save_dipoles(std::slice::from_ref(d), path)
}
