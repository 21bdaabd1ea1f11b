use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use csv::{ReaderBuilder, StringRecord};

use super::{
    MultiPeriodPanel, MultiRecord, PanelDataset, PanelRecord, RcsDataset, RcsRecord, Warning,
    WarningCode,
};
use crate::error::{Error, Result};

const PANEL_HEADER: [&str; 6] = ["id", "d", "s0", "s1", "y0", "y1"];
const RCS_HEADER: [&str; 5] = ["id", "t", "d", "s", "y"];
const MULTI_HEADER: [&str; 5] = ["id", "gvar", "t", "s", "y"];

/// A validated dataset together with the warnings raised while loading it.
#[derive(Debug, Clone)]
pub struct Loaded<D> {
    pub data: D,
    pub warnings: Vec<Warning>,
}

/// Row-level outcome of a lenient read: every input row ends up either in
/// `rows` or in `errors`.
#[derive(Debug)]
pub struct RowReport<R> {
    pub rows: Vec<R>,
    pub warnings: Vec<Warning>,
    pub errors: Vec<Error>,
    pub input_rows: usize,
}

fn read_rows<R: Read, Rec>(
    reader: R,
    header: &[&str],
    mut parse: impl FnMut(&StringRecord, u64, &mut Vec<Warning>) -> Result<Rec>,
) -> Result<RowReport<Rec>> {
    let mut rdr = ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(reader);
    let mut records = rdr.records();
    let head = match records.next() {
        None => return Err(Error::EmptyFile),
        Some(h) => h?,
    };
    if head.iter().ne(header.iter().copied()) {
        return Err(Error::BadHeader {
            found: head.iter().collect::<Vec<_>>().join(","),
            expected: header.join(","),
        });
    }
    let mut report = RowReport {
        rows: Vec::new(),
        warnings: Vec::new(),
        errors: Vec::new(),
        input_rows: 0,
    };
    for rec in records {
        report.input_rows += 1;
        let rec = match rec {
            Ok(r) => r,
            Err(e) => {
                let line = e.position().map_or(0, |p| p.line());
                report.errors.push(Error::MalformedRow {
                    line,
                    reason: e.to_string(),
                });
                continue;
            }
        };
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != header.len() {
            report.errors.push(Error::MalformedRow {
                line,
                reason: format!("expected {} fields, found {}", header.len(), rec.len()),
            });
            continue;
        }
        match parse(&rec, line, &mut report.warnings) {
            Ok(r) => report.rows.push(r),
            Err(e) => report.errors.push(e),
        }
    }
    if report.input_rows == 0 {
        return Err(Error::EmptyFile);
    }
    Ok(report)
}

fn parse_bit(field: &str, name: &str, line: u64) -> Result<bool> {
    match field {
        "0" => Ok(false),
        "1" => Ok(true),
        other => Err(Error::MalformedRow {
            line,
            reason: format!("{name} must be 0 or 1, found {other:?}"),
        }),
    }
}

fn parse_u32(field: &str, name: &str, line: u64) -> Result<u32> {
    field.parse().map_err(|_| Error::MalformedRow {
        line,
        reason: format!("{name} must be a non-negative integer, found {field:?}"),
    })
}

fn parse_y(field: &str, name: &str, line: u64) -> Result<Option<f64>> {
    if field.is_empty() {
        return Ok(None);
    }
    match field.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(Some(v)),
        _ => Err(Error::MalformedRow {
            line,
            reason: format!("{name} must be a finite number or blank, found {field:?}"),
        }),
    }
}

fn parse_id(field: &str, line: u64) -> Result<String> {
    if field.is_empty() {
        return Err(Error::MalformedRow {
            line,
            reason: "id is blank".into(),
        });
    }
    Ok(field.to_string())
}

/// Applies the selection rule to a parsed outcome: a selected unit must have
/// an outcome; an unselected unit's outcome is dropped with a warning.
fn reconcile(
    s: bool,
    y: Option<f64>,
    period: u32,
    id: &str,
    line: u64,
    warnings: &mut Vec<Warning>,
) -> Result<Option<f64>> {
    match (s, y) {
        (true, None) => Err(Error::MissingOutcome { line, period }),
        (false, Some(_)) => {
            warnings.push(Warning::new(
                WarningCode::DroppedOutcome,
                format!(
                    "line {line}: unit {id} is not selected in period {period}; outcome dropped"
                ),
            ));
            Ok(None)
        }
        (_, y) => Ok(y),
    }
}

fn parse_panel_row(
    rec: &StringRecord,
    line: u64,
    warnings: &mut Vec<Warning>,
) -> Result<PanelRecord<f64>> {
    let id = parse_id(&rec[0], line)?;
    let d = parse_bit(&rec[1], "d", line)?;
    let s0 = parse_bit(&rec[2], "s0", line)?;
    let s1 = parse_bit(&rec[3], "s1", line)?;
    let y0 = parse_y(&rec[4], "y0", line)?;
    let y1 = parse_y(&rec[5], "y1", line)?;
    // Validate both periods before emitting any warning for this row.
    let mut local = Vec::new();
    let y0 = reconcile(s0, y0, 0, &id, line, &mut local)?;
    let y1 = reconcile(s1, y1, 1, &id, line, &mut local)?;
    warnings.extend(local);
    Ok(PanelRecord {
        id,
        d,
        s0,
        s1,
        y0,
        y1,
    })
}

fn parse_rcs_row(
    rec: &StringRecord,
    line: u64,
    warnings: &mut Vec<Warning>,
) -> Result<RcsRecord<f64>> {
    let id = parse_id(&rec[0], line)?;
    let t = parse_bit(&rec[1], "t", line)?;
    let d = parse_bit(&rec[2], "d", line)?;
    let s = parse_bit(&rec[3], "s", line)?;
    let y = parse_y(&rec[4], "y", line)?;
    let y = reconcile(s, y, t as u32, &id, line, warnings)?;
    Ok(RcsRecord { id, t, d, s, y })
}

fn parse_multi_row(
    rec: &StringRecord,
    line: u64,
    warnings: &mut Vec<Warning>,
) -> Result<MultiRecord<f64>> {
    let id = parse_id(&rec[0], line)?;
    let gvar = parse_u32(&rec[1], "gvar", line)?;
    let t = parse_u32(&rec[2], "t", line)?;
    let s = parse_bit(&rec[3], "s", line)?;
    let y = parse_y(&rec[4], "y", line)?;
    let y = reconcile(s, y, t, &id, line, warnings)?;
    Ok(MultiRecord { id, gvar, t, s, y })
}

/// Lenient panel read that keeps going past bad rows.
pub fn read_panel_rows<R: Read>(reader: R) -> Result<RowReport<PanelRecord<f64>>> {
    read_rows(reader, &PANEL_HEADER, parse_panel_row)
}

fn strict<Rec, D>(
    report: RowReport<Rec>,
    build: impl FnOnce(Vec<Rec>) -> Result<D>,
) -> Result<Loaded<D>> {
    if let Some(e) = report.errors.into_iter().next() {
        return Err(e);
    }
    Ok(Loaded {
        data: build(report.rows)?,
        warnings: report.warnings,
    })
}

pub fn read_panel_csv<R: Read>(reader: R) -> Result<Loaded<PanelDataset<f64>>> {
    strict(read_panel_rows(reader)?, PanelDataset::new)
}

pub fn read_rcs_csv<R: Read>(reader: R) -> Result<Loaded<RcsDataset<f64>>> {
    strict(
        read_rows(reader, &RCS_HEADER, parse_rcs_row)?,
        RcsDataset::new,
    )
}

pub fn read_multi_csv<R: Read>(reader: R) -> Result<Loaded<MultiPeriodPanel<f64>>> {
    strict(
        read_rows(reader, &MULTI_HEADER, parse_multi_row)?,
        MultiPeriodPanel::new,
    )
}

fn open(path: &Path) -> Result<File> {
    File::open(path)
        .map_err(|e| std::io::Error::new(e.kind(), format!("{}: {e}", path.display())).into())
}

pub fn load_panel_csv(path: impl AsRef<Path>) -> Result<Loaded<PanelDataset<f64>>> {
    read_panel_csv(open(path.as_ref())?)
}

pub fn load_rcs_csv(path: impl AsRef<Path>) -> Result<Loaded<RcsDataset<f64>>> {
    read_rcs_csv(open(path.as_ref())?)
}

pub fn load_multi_csv(path: impl AsRef<Path>) -> Result<Loaded<MultiPeriodPanel<f64>>> {
    read_multi_csv(open(path.as_ref())?)
}

fn bit(b: bool) -> &'static str {
    if b {
        "1"
    } else {
        "0"
    }
}

fn num(y: Option<f64>) -> String {
    y.map(|v| v.to_string()).unwrap_or_default()
}

fn write_all<W: Write>(
    mut w: W,
    header: &[&str],
    rows: impl Iterator<Item = String>,
) -> Result<()> {
    writeln!(w, "{}", header.join(","))?;
    for r in rows {
        writeln!(w, "{r}")?;
    }
    w.flush()?;
    Ok(())
}

/// Writes rows in dataset order with plain-decimal outcomes.
pub fn write_panel_csv<W: Write>(data: &PanelDataset<f64>, w: W) -> Result<()> {
    write_all(
        w,
        &PANEL_HEADER,
        data.units().iter().map(|u| {
            format!(
                "{},{},{},{},{},{}",
                u.id,
                bit(u.d),
                bit(u.s0),
                bit(u.s1),
                num(u.y0),
                num(u.y1)
            )
        }),
    )
}

pub fn write_rcs_csv<W: Write>(data: &RcsDataset<f64>, w: W) -> Result<()> {
    write_all(
        w,
        &RCS_HEADER,
        data.rows().iter().map(|r| {
            format!(
                "{},{},{},{},{}",
                r.id,
                bit(r.t),
                bit(r.d),
                bit(r.s),
                num(r.y)
            )
        }),
    )
}

pub fn write_multi_csv<W: Write>(data: &MultiPeriodPanel<f64>, w: W) -> Result<()> {
    write_all(
        w,
        &MULTI_HEADER,
        data.rows()
            .iter()
            .map(|r| format!("{},{},{},{},{}", r.id, r.gvar, r.t, bit(r.s), num(r.y))),
    )
}
