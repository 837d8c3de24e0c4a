//! Immutable columnar datasets loaded from delimited text.
//!
//! Each column is dictionary encoded: the distinct values are kept once in
//! ascending order (`levels`) and every row stores the index of its value.
//! Because the levels are sorted, comparing codes compares values, which is
//! what the partitioner relies on for its deterministic class order.

mod reader;
mod schema;

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub(crate) use reader::split_line;
pub use schema::{validate_schema, AttributeSchema, SaMode, ValidatedSchema};

/// Missing-value token used when none is configured.
pub const DEFAULT_MISSING_TOKEN: &str = "?";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColumnKind {
    Categorical,
    Numeric,
}

impl fmt::Display for ColumnKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ColumnKind::Categorical => f.write_str("categorical"),
            ColumnKind::Numeric => f.write_str("numeric"),
        }
    }
}

impl std::str::FromStr for ColumnKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "categorical" | "text" => Ok(ColumnKind::Categorical),
            "numeric" | "number" => Ok(ColumnKind::Numeric),
            other => Err(format!(
                "unknown column kind {other:?} (expected numeric or categorical)"
            )),
        }
    }
}

/// A single cell value. Numeric columns hold only finite, canonicalized reals.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Text(String),
    Number(f64),
}

impl Cell {
    pub fn as_text(&self) -> Option<&str> {
        match self {
            Cell::Text(s) => Some(s),
            Cell::Number(_) => None,
        }
    }

    pub fn as_number(&self) -> Option<f64> {
        match self {
            Cell::Number(x) => Some(*x),
            Cell::Text(_) => None,
        }
    }
}

impl Eq for Cell {}

impl Ord for Cell {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Cell::Number(a), Cell::Number(b)) => a.total_cmp(b),
            (Cell::Text(a), Cell::Text(b)) => a.cmp(b),
            (Cell::Number(_), Cell::Text(_)) => Ordering::Less,
            (Cell::Text(_), Cell::Number(_)) => Ordering::Greater,
        }
    }
}

impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Text(s) => f.write_str(s),
            Cell::Number(x) => write!(f, "{x}"),
        }
    }
}

/// Parses a finite real; `-0` is folded into `0` so both share a grouping key.
fn parse_finite(raw: &str) -> Option<f64> {
    match raw.parse::<f64>() {
        Ok(x) if x.is_finite() => Some(if x == 0.0 { 0.0 } else { x }),
        _ => None,
    }
}

/// Numeric iff every non-missing cell parses as a finite real. A column with
/// no non-missing cells is categorical.
pub fn infer_kind<'a, I>(cells: I, missing_token: &str) -> ColumnKind
where
    I: IntoIterator<Item = &'a str>,
{
    let mut saw_value = false;
    for cell in cells {
        if cell == missing_token {
            continue;
        }
        if parse_finite(cell).is_none() {
            return ColumnKind::Categorical;
        }
        saw_value = true;
    }
    if saw_value {
        ColumnKind::Numeric
    } else {
        ColumnKind::Categorical
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    name: String,
    kind: ColumnKind,
    levels: Vec<Cell>,
    codes: Vec<u32>,
}

impl Column {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> ColumnKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }

    /// Distinct values in ascending order. Every level occurs in at least one row.
    pub fn levels(&self) -> &[Cell] {
        &self.levels
    }

    /// Per-row index into [`Column::levels`].
    pub fn codes(&self) -> &[u32] {
        &self.codes
    }

    pub fn cell(&self, row: usize) -> &Cell {
        &self.levels[self.codes[row] as usize]
    }

    pub fn cells(&self) -> impl Iterator<Item = &Cell> + '_ {
        self.codes.iter().map(|&c| &self.levels[c as usize])
    }
}

/// Accumulates raw strings for one column, interning repeated values.
#[derive(Default)]
struct ColumnBuilder {
    name: String,
    index: HashMap<String, u32>,
    distinct: Vec<String>,
    codes: Vec<u32>,
}

impl ColumnBuilder {
    fn new(name: String) -> Self {
        ColumnBuilder {
            name,
            ..Default::default()
        }
    }

    fn push(&mut self, raw: String) {
        let code = match self.index.get(&raw) {
            Some(&code) => code,
            None => {
                let code = self.distinct.len() as u32;
                self.index.insert(raw.clone(), code);
                self.distinct.push(raw);
                code
            }
        };
        self.codes.push(code);
    }

    fn finish(self, missing_token: &str, kind_override: Option<ColumnKind>) -> Result<Column> {
        let inferred = infer_kind(self.distinct.iter().map(String::as_str), missing_token);
        let has_missing = self.index.contains_key(missing_token);
        let kind = match kind_override {
            Some(ColumnKind::Numeric) => {
                if let Some(bad) = self.distinct.iter().find(|s| parse_finite(s).is_none()) {
                    return Err(Error::InvalidKindOverride {
                        column: self.name,
                        value: bad.clone(),
                    });
                }
                ColumnKind::Numeric
            }
            Some(ColumnKind::Categorical) => ColumnKind::Categorical,
            // a numeric column with missing cells is demoted
            None if inferred == ColumnKind::Numeric && !has_missing => ColumnKind::Numeric,
            None => ColumnKind::Categorical,
        };

        let raw_levels: Vec<Cell> = match kind {
            ColumnKind::Numeric => self
                .distinct
                .iter()
                .map(|s| Cell::Number(parse_finite(s).expect("checked numeric")))
                .collect(),
            ColumnKind::Categorical => self.distinct.into_iter().map(Cell::Text).collect(),
        };
        let mut levels = raw_levels.clone();
        levels.sort();
        levels.dedup();
        let remap: Vec<u32> = raw_levels
            .iter()
            .map(|cell| levels.binary_search(cell).expect("level present") as u32)
            .collect();
        let codes = self.codes.iter().map(|&c| remap[c as usize]).collect();
        Ok(Column {
            name: self.name,
            kind,
            levels,
            codes,
        })
    }
}

/// How to read a delimited file.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadOptions {
    pub delimiter: char,
    pub missing_token: String,
    /// Forces the kind of the named columns instead of inferring it.
    pub kind_overrides: BTreeMap<String, ColumnKind>,
}

impl Default for LoadOptions {
    fn default() -> Self {
        LoadOptions {
            delimiter: ',',
            missing_token: DEFAULT_MISSING_TOKEN.to_string(),
            kind_overrides: BTreeMap::new(),
        }
    }
}

impl LoadOptions {
    pub fn with_delimiter(mut self, delimiter: char) -> Self {
        self.delimiter = delimiter;
        self
    }

    pub fn with_missing_token(mut self, token: impl Into<String>) -> Self {
        self.missing_token = token.into();
        self
    }

    pub fn with_kind(mut self, column: impl Into<String>, kind: ColumnKind) -> Self {
        self.kind_overrides.insert(column.into(), kind);
        self
    }
}

/// Default delimiter for a file name: tab for `.txt`/`.tsv`, comma otherwise.
pub fn delimiter_for_path(path: &Path) -> char {
    match path
        .extension()
        .and_then(|e| e.to_str())
        .map(|e| e.to_ascii_lowercase())
        .as_deref()
    {
        Some("txt") | Some("tsv") => '\t',
        _ => ',',
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    source: String,
    columns: Vec<Column>,
    row_count: usize,
}

impl Dataset {
    /// Builds a dataset from a header and raw text rows, applying the same
    /// inference and validation as [`load_delimited`].
    pub fn from_rows<H, R, S>(header: H, rows: R, options: &LoadOptions) -> Result<Dataset>
    where
        H: IntoIterator,
        H::Item: Into<String>,
        R: IntoIterator,
        R::Item: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let header: Vec<String> = header.into_iter().map(Into::into).collect();
        let mut builders = start_columns("<memory>", header)?;
        for (i, row) in rows.into_iter().enumerate() {
            let fields: Vec<String> = row.into_iter().map(Into::into).collect();
            push_row(&mut builders, "<memory>", i + 2, fields)?;
        }
        finish_columns("<memory>", builders, options)
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn with_source(mut self, source: impl Into<String>) -> Self {
        self.source = source.into();
        self
    }

    pub fn row_count(&self) -> usize {
        self.row_count
    }

    pub fn column_count(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn column_index(&self, name: &str) -> Result<usize> {
        self.columns
            .iter()
            .position(|c| c.name == name)
            .ok_or_else(|| Error::UnknownColumn(name.to_string()))
    }

    pub fn column(&self, name: &str) -> Result<&Column> {
        self.column_index(name).map(|i| &self.columns[i])
    }

    /// Writes the dataset as delimited text that [`parse_delimited`] reads back
    /// to identical cells.
    pub fn to_delimited(&self, delimiter: char) -> String {
        let mut out = String::new();
        let sep = delimiter.to_string();
        let header: Vec<String> = self
            .columns
            .iter()
            .map(|c| reader::escape_field(&c.name, delimiter))
            .collect();
        out.push_str(&header.join(&sep));
        out.push('\n');
        for row in 0..self.row_count {
            let fields: Vec<String> = self
                .columns
                .iter()
                .map(|c| reader::escape_field(&c.cell(row).to_string(), delimiter))
                .collect();
            out.push_str(&fields.join(&sep));
            out.push('\n');
        }
        out
    }
}

fn start_columns(source_name: &str, header: Vec<String>) -> Result<Vec<ColumnBuilder>> {
    let mut seen = HashSet::new();
    for (index, name) in header.iter().enumerate() {
        if name.is_empty() {
            return Err(Error::EmptyHeaderName {
                source_name: source_name.to_string(),
                index,
            });
        }
        if !seen.insert(name.as_str()) {
            return Err(Error::DuplicateHeader {
                source_name: source_name.to_string(),
                name: name.clone(),
            });
        }
    }
    Ok(header.into_iter().map(ColumnBuilder::new).collect())
}

fn push_row(
    builders: &mut [ColumnBuilder],
    source_name: &str,
    line: usize,
    fields: Vec<String>,
) -> Result<()> {
    if fields.len() != builders.len() {
        return Err(Error::MalformedRow {
            source_name: source_name.to_string(),
            line,
            expected: builders.len(),
            found: fields.len(),
        });
    }
    for (builder, field) in builders.iter_mut().zip(fields) {
        builder.push(field);
    }
    Ok(())
}

fn finish_columns(
    source_name: &str,
    builders: Vec<ColumnBuilder>,
    options: &LoadOptions,
) -> Result<Dataset> {
    if let Some(name) = options
        .kind_overrides
        .keys()
        .find(|name| !builders.iter().any(|b| &b.name == *name))
    {
        return Err(Error::UnknownColumn(name.clone()));
    }
    let row_count = builders.first().map_or(0, |b| b.codes.len());
    let columns = builders
        .into_iter()
        .map(|b| {
            let kind = options.kind_overrides.get(&b.name).copied();
            b.finish(&options.missing_token, kind)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Dataset {
        source: source_name.to_string(),
        columns,
        row_count,
    })
}

/// Parses delimited text whose first record is the header.
pub fn parse_delimited(source_name: &str, text: &str, options: &LoadOptions) -> Result<Dataset> {
    let mut records = reader::RecordReader::new(source_name, text, options.delimiter);
    let header = match records.next() {
        Some(record) => record?,
        None => {
            return Err(Error::EmptyInput {
                source_name: source_name.to_string(),
            })
        }
    };
    let mut builders = start_columns(source_name, header.fields)?;
    for record in records {
        let record = record?;
        push_row(&mut builders, source_name, record.line, record.fields)?;
    }
    finish_columns(source_name, builders, options)
}

/// Loads a UTF-8 delimited file. Row order is file order.
pub fn load_delimited(path: impl AsRef<Path>, options: &LoadOptions) -> Result<Dataset> {
    let path = path.as_ref();
    let source_name = path.display().to_string();
    let bytes = std::fs::read(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Error::FileNotFound {
            path: path.to_path_buf(),
        },
        _ => Error::Io {
            path: path.to_path_buf(),
            message: e.to_string(),
        },
    })?;
    let text = match std::str::from_utf8(&bytes) {
        Ok(text) => text,
        Err(e) => {
            return Err(Error::InvalidUtf8 {
                source_name,
                line: reader::line_of_offset(&bytes, e.valid_up_to()),
            })
        }
    };
    parse_delimited(&source_name, text, options)
}
