//! Text formats: schema declarations, CSV tables, dependency lists and
//! tuple literals.
//!
//! Schema files declare one attribute per line, `attribute <name> domain
//! <tag> [ordered]`, in universe order. Table files are UTF-8 CSV whose
//! header names a subset (in any order) of the universe; an empty cell is a
//! null, i.e. the attribute is absent from that row. Duplicate rows collapse
//! on load. Dependency files hold lines `A1 A2 ... -> B [C ...]`; a
//! multi-attribute right-hand side expands into one dependency per
//! attribute. Blank lines and `#` comments are allowed everywhere outside
//! CSV content. Writers emit rows in canonical order, so equal inputs
//! produce byte-identical outputs.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::model::{AttrId, AttrSet, Constant, Fd, Table, Tuple, Universe};

#[derive(Debug, Error)]
pub enum FileError {
    #[error("line {line}: {msg}")]
    Schema { line: usize, msg: String },
    #[error("{0}")]
    Csv(String),
    #[error("table header: unknown attribute `{0}`")]
    UnknownColumn(String),
    #[error("table header: attribute `{0}` listed twice")]
    DuplicateColumn(String),
    #[error("table row {0}: all cells are empty")]
    EmptyRow(usize),
    #[error("dependency line {line}: {msg}")]
    Fd { line: usize, msg: String },
    #[error("tuple literal: {0}")]
    TupleLiteral(String),
    #[error(transparent)]
    Model(#[from] crate::model::ModelError),
}

/// Parses a schema file into a universe; declaration order is universe order.
pub fn parse_schema(text: &str) -> Result<Universe, FileError> {
    let mut decls: Vec<(String, String, bool)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        let bad = |msg: &str| FileError::Schema {
            line: i + 1,
            msg: msg.to_string(),
        };
        if toks.len() < 4 || toks[0] != "attribute" || toks[2] != "domain" {
            return Err(bad("expected `attribute <name> domain <tag> [ordered]`"));
        }
        let ordered = match toks.len() {
            4 => false,
            5 if toks[4] == "ordered" => true,
            _ => return Err(bad("trailing tokens; only `ordered` is allowed")),
        };
        decls.push((toks[1].to_string(), toks[3].to_string(), ordered));
    }
    if decls.is_empty() {
        return Err(FileError::Schema {
            line: 0,
            msg: "schema declares no attributes".to_string(),
        });
    }
    let refs: Vec<(&str, &str, bool)> = decls
        .iter()
        .map(|(n, t, o)| (n.as_str(), t.as_str(), *o))
        .collect();
    Ok(Universe::new(&refs)?)
}

/// Parses CSV text into a table over `u`. Cells are taken verbatim; an empty
/// cell leaves the attribute unbound.
pub fn parse_table(u: &Universe, text: &str) -> Result<Table, FileError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(text.as_bytes());
    let headers = rdr
        .headers()
        .map_err(|e| FileError::Csv(e.to_string()))?
        .clone();
    let mut cols: Vec<AttrId> = Vec::with_capacity(headers.len());
    let mut seen = BTreeSet::new();
    for name in headers.iter() {
        let a = u
            .attr_by_name(name)
            .ok_or_else(|| FileError::UnknownColumn(name.to_string()))?;
        if !seen.insert(a) {
            return Err(FileError::DuplicateColumn(name.to_string()));
        }
        cols.push(a);
    }
    let mut table = Table::new();
    for (ri, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| FileError::Csv(e.to_string()))?;
        let mut bindings = Vec::new();
        for (ci, cell) in rec.iter().enumerate() {
            if !cell.is_empty() {
                bindings.push((cols[ci], u.constant(cols[ci], cell)));
            }
        }
        if bindings.is_empty() {
            return Err(FileError::EmptyRow(ri + 2)); // 1-based, after header
        }
        table.insert(Tuple::new(u, bindings)?);
    }
    Ok(table)
}

/// Writes a table as CSV with the full universe as header, rows in
/// canonical order and nulls as empty cells.
pub fn render_table(u: &Universe, table: &Table) -> String {
    let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
    let header: Vec<&str> = u.attr_ids().map(|a| u.attr_name(a)).collect();
    w.write_record(&header).expect("csv write");
    for row in table.iter() {
        let rec: Vec<&str> = u
            .attr_ids()
            .map(|a| row.get(a).map(Constant::value).unwrap_or(""))
            .collect();
        w.write_record(&rec).expect("csv write");
    }
    String::from_utf8(w.into_inner().expect("csv flush")).expect("utf8")
}

/// Like [`render_table`] but with one extra trailing column.
pub fn render_table_with_column(
    u: &Universe,
    rows: impl IntoIterator<Item = (Tuple, String)>,
    column: &str,
) -> String {
    let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
    let mut header: Vec<String> = u
        .attr_ids()
        .map(|a| u.attr_name(a).to_string())
        .collect();
    header.push(column.to_string());
    w.write_record(&header).expect("csv write");
    for (row, extra) in rows {
        let mut rec: Vec<String> = u
            .attr_ids()
            .map(|a| row.get(a).map(|c| c.value().to_string()).unwrap_or_default())
            .collect();
        rec.push(extra);
        w.write_record(&rec).expect("csv write");
    }
    String::from_utf8(w.into_inner().expect("csv flush")).expect("utf8")
}

/// Writes an answer set: header restricted to the selected attributes, rows
/// canonical, optional truth column appended.
pub fn render_answers(
    u: &Universe,
    schema: AttrSet,
    rows: impl IntoIterator<Item = (Tuple, Option<String>)>,
    annotated: bool,
) -> String {
    let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
    let mut header: Vec<String> = schema
        .iter()
        .map(|a| u.attr_name(a).to_string())
        .collect();
    if annotated {
        header.push("truth".to_string());
    }
    w.write_record(&header).expect("csv write");
    for (row, label) in rows {
        let mut rec: Vec<String> = schema
            .iter()
            .map(|a| row.get(a).map(|c| c.value().to_string()).unwrap_or_default())
            .collect();
        if annotated {
            rec.push(label.unwrap_or_default());
        }
        w.write_record(&rec).expect("csv write");
    }
    String::from_utf8(w.into_inner().expect("csv flush")).expect("utf8")
}

/// Parses a dependency file against `u`.
pub fn parse_fds(u: &Universe, text: &str) -> Result<Vec<Fd>, FileError> {
    let mut out: Vec<Fd> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |msg: String| FileError::Fd {
            line: i + 1,
            msg,
        };
        let toks: Vec<&str> = line.split_whitespace().collect();
        let arrow = toks
            .iter()
            .position(|t| *t == "->")
            .ok_or_else(|| bad("missing `->`".to_string()))?;
        if arrow == 0 || arrow == toks.len() - 1 {
            return Err(bad("both sides of `->` need at least one attribute".to_string()));
        }
        let mut lhs = AttrSet::EMPTY;
        for name in &toks[..arrow] {
            let a = u
                .attr_by_name(name)
                .ok_or_else(|| bad(format!("unknown attribute `{name}`")))?;
            lhs.insert(a);
        }
        for name in &toks[arrow + 1..] {
            let a = u
                .attr_by_name(name)
                .ok_or_else(|| bad(format!("unknown attribute `{name}`")))?;
            let fd = Fd::new(u, lhs, a).map_err(|e| bad(e.to_string()))?;
            if !out.contains(&fd) {
                out.push(fd);
            }
        }
    }
    Ok(out)
}

/// Writes dependencies one per line, `A B -> C`.
pub fn render_fds(u: &Universe, fds: &[Fd]) -> String {
    let mut s = String::new();
    for fd in fds {
        s.push_str(&fd.display(u).to_string());
        s.push('\n');
    }
    s
}

/// Parses a comma-separated `Attr=value` tuple literal.
pub fn parse_tuple_literal(u: &Universe, text: &str) -> Result<Tuple, FileError> {
    let mut bindings = Vec::new();
    for part in text.split(',') {
        let part = part.trim();
        if part.is_empty() {
            return Err(FileError::TupleLiteral(format!(
                "empty component in `{text}`"
            )));
        }
        let (name, value) = part
            .split_once('=')
            .ok_or_else(|| FileError::TupleLiteral(format!("`{part}` is not `Attr=value`")))?;
        if value.is_empty() {
            return Err(FileError::TupleLiteral(format!(
                "`{part}` has an empty value; omit the attribute instead"
            )));
        }
        let a = u
            .attr_by_name(name)
            .ok_or_else(|| FileError::TupleLiteral(format!("unknown attribute `{name}`")))?;
        bindings.push((a, u.constant(a, value)));
    }
    Ok(Tuple::new(u, bindings)?)
}
