//! On-disk formats: CSV tables with a single '#'-prefixed JSON metadata
//! header line. Numbers are written with 12 significant digits in
//! scientific notation; identical inputs always produce byte-identical
//! files (no timestamps, sorted metadata keys).

use crate::CliError;
use coxthompson::types::{PhaseShiftSet, PointFlag, PotentialCurve, RadialGrid};
use coxthompson::Complex64;
use serde_json::{json, Value};
use std::fs;
use std::path::Path;

const RAD_PER_DEG: f64 = std::f64::consts::PI / 180.0;

fn fmt(v: f64) -> String {
    format!("{:.11e}", v)
}

/// Shared metadata header.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FileMeta {
    pub energy_mev: Option<f64>,
    pub k_invfm: Option<f64>,
    pub label: Option<String>,
    pub generator: Option<String>,
}

impl FileMeta {
    fn to_json(&self) -> Value {
        let mut m = serde_json::Map::new();
        if let Some(e) = self.energy_mev {
            m.insert("energy_mev".into(), json!(e));
        }
        if let Some(k) = self.k_invfm {
            m.insert("k_invfm".into(), json!(k));
        }
        if let Some(l) = &self.label {
            m.insert("label".into(), json!(l));
        }
        if let Some(g) = &self.generator {
            m.insert("generator".into(), json!(g));
        }
        Value::Object(m)
    }

    fn from_json(v: &Value) -> Self {
        FileMeta {
            energy_mev: v.get("energy_mev").and_then(Value::as_f64),
            k_invfm: v.get("k_invfm").and_then(Value::as_f64),
            label: v.get("label").and_then(Value::as_str).map(String::from),
            generator: v.get("generator").and_then(Value::as_str).map(String::from),
        }
    }
}

fn split_header(content: &str, path: &Path) -> Result<(FileMeta, Vec<String>), CliError> {
    let mut lines = content.lines();
    let first = lines
        .next()
        .ok_or_else(|| CliError::Usage(format!("{}: empty file", path.display())))?;
    let meta = if let Some(rest) = first.strip_prefix('#') {
        let v: Value = serde_json::from_str(rest.trim()).map_err(|e| {
            CliError::Usage(format!("{}: bad metadata header: {e}", path.display()))
        })?;
        FileMeta::from_json(&v)
    } else {
        return Err(CliError::Usage(format!(
            "{}: missing '# {{...}}' metadata header line",
            path.display()
        )));
    };
    let rest: Vec<String> = lines
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(String::from)
        .collect();
    Ok((meta, rest))
}

/// How the imaginary part of one record was specified.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ImSpec {
    None,
    ImDelta(f64),
    Eta(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseShiftRecord {
    pub l: u32,
    pub re_delta: f64,
    pub im: ImSpec,
}

impl PhaseShiftRecord {
    pub fn delta(&self) -> Result<Complex64, CliError> {
        match self.im {
            ImSpec::None => Ok(Complex64::new(self.re_delta, 0.0)),
            ImSpec::ImDelta(im) => Ok(Complex64::new(self.re_delta, im)),
            ImSpec::Eta(eta) => {
                if !(eta > 0.0 && eta <= 1.0) {
                    return Err(CliError::Usage(format!(
                        "elasticity {eta} outside (0, 1] at l = {}",
                        self.l
                    )));
                }
                Ok(Complex64::new(self.re_delta, -0.5 * eta.ln()))
            }
        }
    }
}

/// Phase-shift table: columns l, re_delta, im_delta, eta with at most one
/// of the two imaginary specifications filled per record.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseShiftFile {
    pub meta: FileMeta,
    pub records: Vec<PhaseShiftRecord>,
}

impl PhaseShiftFile {
    pub fn read(path: &Path, degrees: bool) -> Result<Self, CliError> {
        let content = fs::read_to_string(path)?;
        let (meta, lines) = split_header(&content, path)?;
        let mut it = lines.iter();
        let header = it
            .next()
            .ok_or_else(|| CliError::Usage(format!("{}: missing column header", path.display())))?;
        if header != "l,re_delta,im_delta,eta" {
            return Err(CliError::Usage(format!(
                "{}: expected header 'l,re_delta,im_delta,eta', got '{header}'",
                path.display()
            )));
        }
        let mut records = Vec::new();
        for (ln, line) in it.enumerate() {
            let cols: Vec<&str> = line.split(',').map(str::trim).collect();
            if cols.len() != 4 {
                return Err(CliError::Usage(format!(
                    "{}: row {} has {} columns, expected 4",
                    path.display(),
                    ln + 1,
                    cols.len()
                )));
            }
            let parse = |s: &str, what: &str| -> Result<f64, CliError> {
                s.parse().map_err(|_| {
                    CliError::Usage(format!("{}: bad {what} '{s}'", path.display()))
                })
            };
            let l: u32 = cols[0].parse().map_err(|_| {
                CliError::Usage(format!("{}: bad channel '{}'", path.display(), cols[0]))
            })?;
            let scale = if degrees { RAD_PER_DEG } else { 1.0 };
            let re = parse(cols[1], "re_delta")? * scale;
            let im = match (cols[2].is_empty(), cols[3].is_empty()) {
                (true, true) => ImSpec::None,
                (false, true) => ImSpec::ImDelta(parse(cols[2], "im_delta")? * scale),
                (true, false) => ImSpec::Eta(parse(cols[3], "eta")?),
                (false, false) => {
                    return Err(CliError::Usage(format!(
                        "{}: l = {l} specifies both im_delta and eta",
                        path.display()
                    )))
                }
            };
            records.push(PhaseShiftRecord { l, re_delta: re, im });
        }
        if records.is_empty() {
            return Err(CliError::Usage(format!("{}: no records", path.display())));
        }
        Ok(PhaseShiftFile { meta, records })
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        let mut out = String::new();
        out.push_str(&format!("# {}\n", self.meta.to_json()));
        out.push_str("l,re_delta,im_delta,eta\n");
        for r in &self.records {
            let (im_s, eta_s) = match r.im {
                ImSpec::None => (String::new(), String::new()),
                ImSpec::ImDelta(v) => (fmt(v), String::new()),
                ImSpec::Eta(v) => (String::new(), fmt(v)),
            };
            out.push_str(&format!("{},{},{},{}\n", r.l, fmt(r.re_delta), im_s, eta_s));
        }
        fs::write(path, out)?;
        Ok(())
    }

    pub fn to_set(&self) -> Result<PhaseShiftSet, CliError> {
        let mut entries = Vec::with_capacity(self.records.len());
        for r in &self.records {
            entries.push((r.l, r.delta()?));
        }
        PhaseShiftSet::new(entries).map_err(CliError::from)
    }

    /// Build records from extracted (l, delta, eta) channels; imaginary
    /// parts below 1e-9 rad are treated as integration noise and dropped.
    pub fn from_channels(channels: &[(u32, Complex64, f64)], meta: FileMeta) -> Self {
        let records = channels
            .iter()
            .map(|&(l, d, _)| PhaseShiftRecord {
                l,
                re_delta: d.re,
                im: if d.im.abs() > 1e-9 {
                    ImSpec::ImDelta(d.im)
                } else {
                    ImSpec::None
                },
            })
            .collect();
        PhaseShiftFile { meta, records }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PotentialRow {
    pub x: f64,
    pub q: Complex64,
    pub flag: PointFlag,
}

/// Potential table: columns x, re_q, im_q, optional physical companions
/// (r in fm, V in MeV) when the metadata carries k and E, and a flag column.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialFile {
    pub meta: FileMeta,
    pub rows: Vec<PotentialRow>,
}

fn flag_str(f: PointFlag) -> &'static str {
    match f {
        PointFlag::Ok => "ok",
        PointFlag::Extrapolated => "extrapolated",
        PointFlag::Interpolated => "interpolated",
    }
}

fn flag_parse(s: &str) -> Result<PointFlag, CliError> {
    match s {
        "ok" => Ok(PointFlag::Ok),
        "extrapolated" => Ok(PointFlag::Extrapolated),
        "interpolated" => Ok(PointFlag::Interpolated),
        other => Err(CliError::Usage(format!("unknown flag '{other}'"))),
    }
}

impl PotentialFile {
    pub fn from_curve(curve: &PotentialCurve, meta: FileMeta) -> Self {
        let rows = curve
            .grid
            .points()
            .iter()
            .zip(curve.q.iter())
            .zip(curve.flags.iter())
            .map(|((&x, &q), &flag)| PotentialRow { x, q, flag })
            .collect();
        PotentialFile { meta, rows }
    }

    fn physical(&self) -> Option<(f64, f64)> {
        match (self.meta.k_invfm, self.meta.energy_mev) {
            (Some(k), Some(e)) if k > 0.0 && e > 0.0 => Some((k, e)),
            _ => None,
        }
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        let mut out = String::new();
        out.push_str(&format!("# {}\n", self.meta.to_json()));
        let phys = self.physical();
        if phys.is_some() {
            out.push_str("x,re_q,im_q,r_fm,re_v_mev,im_v_mev,flag\n");
        } else {
            out.push_str("x,re_q,im_q,flag\n");
        }
        for r in &self.rows {
            match phys {
                Some((k, e)) => out.push_str(&format!(
                    "{},{},{},{},{},{},{}\n",
                    fmt(r.x),
                    fmt(r.q.re),
                    fmt(r.q.im),
                    fmt(r.x / k),
                    fmt(r.q.re * e),
                    fmt(r.q.im * e),
                    flag_str(r.flag)
                )),
                None => out.push_str(&format!(
                    "{},{},{},{}\n",
                    fmt(r.x),
                    fmt(r.q.re),
                    fmt(r.q.im),
                    flag_str(r.flag)
                )),
            }
        }
        fs::write(path, out)?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let content = fs::read_to_string(path)?;
        let (meta, lines) = split_header(&content, path)?;
        let mut it = lines.iter();
        let header = it
            .next()
            .ok_or_else(|| CliError::Usage(format!("{}: missing column header", path.display())))?;
        let with_phys = match header.as_str() {
            "x,re_q,im_q,flag" => false,
            "x,re_q,im_q,r_fm,re_v_mev,im_v_mev,flag" => true,
            other => {
                return Err(CliError::Usage(format!(
                    "{}: unrecognized potential header '{other}'",
                    path.display()
                )))
            }
        };
        let want = if with_phys { 7 } else { 4 };
        let mut rows = Vec::new();
        for line in it {
            let cols: Vec<&str> = line.split(',').map(str::trim).collect();
            if cols.len() != want {
                return Err(CliError::Usage(format!(
                    "{}: row has {} columns, expected {want}",
                    path.display(),
                    cols.len()
                )));
            }
            let parse = |s: &str| -> Result<f64, CliError> {
                s.parse()
                    .map_err(|_| CliError::Usage(format!("{}: bad number '{s}'", path.display())))
            };
            rows.push(PotentialRow {
                x: parse(cols[0])?,
                q: Complex64::new(parse(cols[1])?, parse(cols[2])?),
                flag: flag_parse(cols[want - 1])?,
            });
        }
        if rows.is_empty() {
            return Err(CliError::Usage(format!("{}: no rows", path.display())));
        }
        Ok(PotentialFile { meta, rows })
    }

    pub fn to_curve(&self) -> Result<PotentialCurve, CliError> {
        let grid = RadialGrid::new(self.rows.iter().map(|r| r.x).collect())?;
        let q = self.rows.iter().map(|r| r.q).collect();
        let flags = self.rows.iter().map(|r| r.flag).collect();
        PotentialCurve::new(grid, q, flags).map_err(CliError::from)
    }
}

/// Spin-orbit split input for `combine`: one row per l with both coupled
/// shifts, columns l, re_delta_plus, im_delta_plus, re_delta_minus,
/// im_delta_minus (imaginary columns may be empty).
pub struct SpinSplitFile {
    pub meta: FileMeta,
    /// (l, delta_plus, delta_minus)
    pub rows: Vec<(u32, Complex64, Complex64)>,
}

impl SpinSplitFile {
    pub fn read(path: &Path, degrees: bool) -> Result<Self, CliError> {
        let content = fs::read_to_string(path)?;
        let (meta, lines) = split_header(&content, path)?;
        let mut it = lines.iter();
        let header = it
            .next()
            .ok_or_else(|| CliError::Usage(format!("{}: missing column header", path.display())))?;
        if header != "l,re_delta_plus,im_delta_plus,re_delta_minus,im_delta_minus" {
            return Err(CliError::Usage(format!(
                "{}: expected spin-split header, got '{header}'",
                path.display()
            )));
        }
        let scale = if degrees { RAD_PER_DEG } else { 1.0 };
        let mut rows = Vec::new();
        for line in it {
            let cols: Vec<&str> = line.split(',').map(str::trim).collect();
            if cols.len() != 5 {
                return Err(CliError::Usage(format!(
                    "{}: row has {} columns, expected 5",
                    path.display(),
                    cols.len()
                )));
            }
            let parse = |s: &str| -> Result<f64, CliError> {
                if s.is_empty() {
                    return Ok(0.0);
                }
                s.parse()
                    .map_err(|_| CliError::Usage(format!("{}: bad number '{s}'", path.display())))
            };
            let l: u32 = cols[0].parse().map_err(|_| {
                CliError::Usage(format!("{}: bad channel '{}'", path.display(), cols[0]))
            })?;
            if cols[1].is_empty() || cols[3].is_empty() {
                return Err(CliError::Usage(format!(
                    "{}: l = {l} is missing one spin channel",
                    path.display()
                )));
            }
            rows.push((
                l,
                Complex64::new(parse(cols[1])? * scale, parse(cols[2])? * scale),
                Complex64::new(parse(cols[3])? * scale, parse(cols[4])? * scale),
            ));
        }
        if rows.is_empty() {
            return Err(CliError::Usage(format!("{}: no rows", path.display())));
        }
        Ok(SpinSplitFile { meta, rows })
    }
}
