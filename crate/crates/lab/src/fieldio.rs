//! Field files: CSV and JSON round-trip exactly, PGM is a lossy preview.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use su11_core::{PhaseSpaceGrid, ScalarField};

use crate::error::{LabError, LabResult};

pub const FIELD_HEADER: &str = "# su11-phase-lab field v1";
const FIELD_FORMAT: &str = "su11-phase-lab field v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Pgm,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Pgm => "pgm",
            Format::Json => "json",
        }
    }

    pub fn from_path(path: &Path) -> Option<Self> {
        path.extension()?.to_str()?.parse().ok()
    }
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "pgm" => Ok(Format::Pgm),
            "json" => Ok(Format::Json),
            _ => Err(format!("unknown format {s:?} (expected csv, pgm or json)")),
        }
    }
}

/// A field plus the label of what it samples (`wigner`, `overlap`, `sql`, ...).
#[derive(Debug, Clone)]
pub struct FieldFile {
    pub kind: String,
    pub field: ScalarField,
}

/// Shortest representation that parses back to the same bits. Plain decimal
/// in the usual range, exponent form outside it.
pub fn fmt_f64(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || (1e-5..1e16).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

pub fn to_csv(file: &FieldFile) -> String {
    let f = &file.field;
    let g = f.grid();
    let mut out = String::new();
    out.push_str(FIELD_HEADER);
    out.push('\n');
    let _ = writeln!(
        out,
        "# grid nx={} np={} extent={} kind={} imag={}",
        g.nx(),
        g.np(),
        fmt_f64(g.extent()),
        file.kind,
        fmt_f64(f.max_abs_imag_discarded())
    );
    out.push_str("x,p,value\n");
    for j in 0..g.np() {
        for i in 0..g.nx() {
            if let Some(v) = f.get(i, j) {
                let _ = writeln!(
                    out,
                    "{},{},{}",
                    fmt_f64(g.x(i)),
                    fmt_f64(g.p(j)),
                    fmt_f64(v)
                );
            }
        }
    }
    out
}

fn node_index(coord: f64, n: usize, extent: f64, at: impl Fn(usize) -> f64) -> Option<usize> {
    let t = (coord / extent * (n - 1) as f64 + (n - 1) as f64) / 2.0;
    let i = t.round();
    if !(0.0..n as f64).contains(&i) {
        return None;
    }
    let i = i as usize;
    (at(i).to_bits() == coord.to_bits()).then_some(i)
}

pub fn parse_csv(text: &str, path: &Path) -> LabResult<FieldFile> {
    let bad = |msg: String| LabError::parse(path, msg);
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, l)) if l.trim_end() == FIELD_HEADER => {}
        _ => return Err(bad(format!("first line must be {FIELD_HEADER:?}"))),
    }
    let meta = lines
        .next()
        .and_then(|(_, l)| l.strip_prefix("# grid "))
        .ok_or_else(|| bad("missing '# grid' line".into()))?;
    let mut nx = None;
    let mut np = None;
    let mut extent = None;
    let mut kind = None;
    let mut imag = 0.0;
    for kv in meta.split_whitespace() {
        let (key, val) = kv
            .split_once('=')
            .ok_or_else(|| bad(format!("malformed grid entry {kv:?}")))?;
        let num = |v: &str| v.parse::<f64>().map_err(|e| bad(format!("{key}: {e}")));
        match key {
            "nx" => nx = Some(val.parse::<usize>().map_err(|e| bad(format!("nx: {e}")))?),
            "np" => np = Some(val.parse::<usize>().map_err(|e| bad(format!("np: {e}")))?),
            "extent" => extent = Some(num(val)?),
            "kind" => kind = Some(val.to_string()),
            "imag" => imag = num(val)?,
            _ => return Err(bad(format!("unknown grid key {key:?}"))),
        }
    }
    let (Some(nx), Some(np), Some(extent)) = (nx, np, extent) else {
        return Err(bad("grid line needs nx, np and extent".into()));
    };
    let grid = PhaseSpaceGrid::new(nx, np, extent).map_err(|e| bad(e.to_string()))?;
    match lines.next() {
        Some((_, l)) if l.trim_end() == "x,p,value" => {}
        _ => return Err(bad("missing 'x,p,value' column header".into())),
    }
    let mut values = vec![f64::NAN; grid.len()];
    for (no, line) in lines {
        let line = line.trim_end();
        if line.is_empty() {
            continue;
        }
        let row: Vec<&str> = line.split(',').collect();
        if row.len() != 3 {
            return Err(bad(format!("line {}: expected 3 columns", no + 1)));
        }
        let mut num = [0.0; 3];
        for (slot, s) in num.iter_mut().zip(&row) {
            *slot = s
                .parse()
                .map_err(|e| bad(format!("line {}: {e}", no + 1)))?;
        }
        let i = node_index(num[0], nx, extent, |i| grid.x(i));
        let j = node_index(num[1], np, extent, |j| grid.p(j));
        let (Some(i), Some(j)) = (i, j) else {
            return Err(bad(format!(
                "line {}: ({}, {}) is not a grid node",
                no + 1,
                row[0],
                row[1]
            )));
        };
        if !grid.masked_in(i, j) {
            return Err(bad(format!("line {}: node lies outside the disk", no + 1)));
        }
        values[grid.index(i, j)] = num[2];
    }
    let field = ScalarField::from_values(grid, values, imag).map_err(|e| bad(e.to_string()))?;
    Ok(FieldFile {
        kind: kind.unwrap_or_else(|| "unknown".into()),
        field,
    })
}

#[derive(Serialize, Deserialize)]
struct JsonField {
    format: String,
    kind: String,
    nx: usize,
    np: usize,
    extent: f64,
    max_abs_imag_discarded: f64,
    /// `values[j][i]`, `null` outside the disk.
    values: Vec<Vec<Option<f64>>>,
}

pub fn to_json(file: &FieldFile) -> String {
    let f = &file.field;
    let g = f.grid();
    let doc = JsonField {
        format: FIELD_FORMAT.into(),
        kind: file.kind.clone(),
        nx: g.nx(),
        np: g.np(),
        extent: g.extent(),
        max_abs_imag_discarded: f.max_abs_imag_discarded(),
        values: (0..g.np())
            .map(|j| (0..g.nx()).map(|i| f.get(i, j)).collect())
            .collect(),
    };
    let mut s = serde_json::to_string(&doc).expect("field serializes");
    s.push('\n');
    s
}

pub fn parse_json(text: &str, path: &Path) -> LabResult<FieldFile> {
    let bad = |msg: String| LabError::parse(path, msg);
    let doc: JsonField = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
    if doc.format != FIELD_FORMAT {
        return Err(bad(format!("unsupported format {:?}", doc.format)));
    }
    let grid = PhaseSpaceGrid::new(doc.nx, doc.np, doc.extent).map_err(|e| bad(e.to_string()))?;
    if doc.values.len() != doc.np || doc.values.iter().any(|r| r.len() != doc.nx) {
        return Err(bad("values must be np rows of nx entries".into()));
    }
    let values = doc
        .values
        .into_iter()
        .flatten()
        .map(|v| v.unwrap_or(f64::NAN))
        .collect();
    let field = ScalarField::from_values(grid, values, doc.max_abs_imag_discarded)
        .map_err(|e| bad(e.to_string()))?;
    Ok(FieldFile {
        kind: doc.kind,
        field,
    })
}

/// 16-bit binary PGM, top row at the largest `p`. `[min, max]` maps linearly
/// onto `[0, 65535]`; cells outside the disk are black.
pub fn to_pgm(file: &FieldFile) -> Vec<u8> {
    let f = &file.field;
    let g = f.grid();
    let (lo, hi) = f.range().unwrap_or((0.0, 0.0));
    let mut out = format!(
        "P5\n{FIELD_HEADER}\n# kind={} extent={} min={} max={}\n{} {}\n65535\n",
        file.kind,
        fmt_f64(g.extent()),
        fmt_f64(lo),
        fmt_f64(hi),
        g.nx(),
        g.np()
    )
    .into_bytes();
    for j in (0..g.np()).rev() {
        for i in 0..g.nx() {
            let level = match f.get(i, j) {
                Some(v) if hi > lo => ((v - lo) / (hi - lo) * 65535.0).round() as u16,
                _ => 0,
            };
            out.extend_from_slice(&level.to_be_bytes());
        }
    }
    out
}

pub fn encode(file: &FieldFile, format: Format) -> Vec<u8> {
    match format {
        Format::Csv => to_csv(file).into_bytes(),
        Format::Json => to_json(file).into_bytes(),
        Format::Pgm => to_pgm(file),
    }
}

/// Reads a CSV or JSON field, picking the parser from the extension and
/// falling back to sniffing the first byte.
pub fn read_field(path: &Path) -> LabResult<FieldFile> {
    let text = std::fs::read_to_string(path).map_err(|e| LabError::io(path, e))?;
    match Format::from_path(path) {
        Some(Format::Json) => parse_json(&text, path),
        Some(Format::Csv) => parse_csv(&text, path),
        Some(Format::Pgm) => Err(LabError::parse(path, "PGM previews cannot be read back")),
        None if text.trim_start().starts_with('{') => parse_json(&text, path),
        None => parse_csv(&text, path),
    }
}
