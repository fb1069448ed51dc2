//! Tab-separated input tables with `#` comment lines and a header row.

use std::fs::File;
use std::io::Read;
use std::path::Path;

use crate::error::{Error, Result};

pub(crate) struct Table {
    pub file: String,
    headers: Vec<String>,
    pub rows: Vec<Row>,
}

pub(crate) struct Row {
    pub line: u64,
    fields: Vec<String>,
}

impl Row {
    pub fn get(&self, idx: usize) -> &str {
        self.fields.get(idx).map(|s| s.trim()).unwrap_or("")
    }

    pub fn opt(&self, idx: Option<usize>) -> &str {
        idx.map(|i| self.get(i)).unwrap_or("")
    }
}

impl Table {
    pub fn open(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        Self::from_reader(&path.display().to_string(), file)
    }

    pub fn from_reader<R: Read>(name: &str, reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .delimiter(b'\t')
            .comment(Some(b'#'))
            .quoting(false)
            .flexible(true)
            .has_headers(false)
            .from_reader(reader);
        let mut headers: Option<Vec<String>> = None;
        let mut rows = Vec::new();
        for record in rdr.records() {
            let record = record.map_err(|e| {
                let line = e.position().map(|p| p.line()).unwrap_or(0);
                Error::parse(name, line, e.to_string())
            })?;
            let line = record.position().map(|p| p.line()).unwrap_or(0);
            if record.iter().all(|f| f.trim().is_empty()) {
                continue;
            }
            let fields: Vec<String> = record.iter().map(str::to_owned).collect();
            match headers {
                None => headers = Some(fields.iter().map(|h| h.trim().to_lowercase()).collect()),
                Some(ref h) => {
                    if fields.len() > h.len() {
                        return Err(Error::parse(
                            name,
                            line,
                            format!("expected at most {} columns, found {}", h.len(), fields.len()),
                        ));
                    }
                    rows.push(Row { line, fields });
                }
            }
        }
        Ok(Table {
            file: name.to_owned(),
            headers: headers.unwrap_or_default(),
            rows,
        })
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.headers.iter().position(|h| h == name)
    }

    pub fn require(&self, name: &str) -> Result<usize> {
        if self.headers.is_empty() && self.rows.is_empty() {
            // Empty file: callers see no rows, column index is never used.
            return Ok(usize::MAX);
        }
        self.column(name)
            .ok_or_else(|| Error::parse(&self.file, 1, format!("missing column {name:?}")))
    }

    pub fn err(&self, row: &Row, message: impl Into<String>) -> Error {
        Error::parse(&self.file, row.line, message)
    }

    pub fn number(&self, row: &Row, idx: usize, what: &str) -> Result<f64> {
        let raw = row.get(idx);
        let value: f64 = raw
            .parse()
            .map_err(|_| self.err(row, format!("{what}: cannot parse {raw:?} as a number")))?;
        if !value.is_finite() {
            return Err(self.err(row, format!("{what}: {raw:?} is not finite")));
        }
        Ok(value)
    }
}

/// Splits a `|`-separated list cell, dropping empty items.
pub(crate) fn split_list(cell: &str) -> Vec<String> {
    cell.split('|')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::to_owned)
        .collect()
}
