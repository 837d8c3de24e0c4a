//! Equivalence classes and value distributions.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::table::{Cell, Column, Dataset};

/// Rows grouped by identical values on a set of columns.
///
/// Classes are stored back to back in one row buffer and ordered by key,
/// so the partition of a given table is always laid out the same way.
#[derive(Debug, Clone)]
pub struct Partition<'d> {
    data: &'d Dataset,
    grouping_columns: Vec<String>,
    column_indices: Vec<usize>,
    rows: Vec<usize>,
    starts: Vec<usize>,
}

/// One class of a [`Partition`].
#[derive(Debug, Clone, Copy)]
pub struct EquivalenceClass<'p> {
    data: &'p Dataset,
    column_indices: &'p [usize],
    rows: &'p [usize],
}

impl<'p> EquivalenceClass<'p> {
    /// Row indices, ascending.
    pub fn rows(&self) -> &'p [usize] {
        self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// The shared values on the grouping columns.
    pub fn key(&self) -> Vec<&'p Cell> {
        let first = self.rows[0];
        self.column_indices
            .iter()
            .map(|&c| self.data.columns()[c].cell(first))
            .collect()
    }

    /// Key rendered as `col=value` pairs, for diagnostics.
    pub fn describe(&self) -> String {
        let pairs: Vec<String> = self
            .column_indices
            .iter()
            .zip(self.key())
            .map(|(&c, v)| format!("{}={}", self.data.columns()[c].name(), v))
            .collect();
        format!("[{}]", pairs.join(", "))
    }
}

impl<'d> Partition<'d> {
    pub fn grouping_columns(&self) -> &[String] {
        &self.grouping_columns
    }

    pub fn len(&self) -> usize {
        self.starts.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn class(&self, index: usize) -> EquivalenceClass<'_> {
        EquivalenceClass {
            data: self.data,
            column_indices: &self.column_indices,
            rows: &self.rows[self.starts[index]..self.starts[index + 1]],
        }
    }

    pub fn classes(&self) -> impl ExactSizeIterator<Item = EquivalenceClass<'_>> + '_ {
        (0..self.len()).map(move |i| self.class(i))
    }

    /// Size of the smallest class.
    pub fn min_class_size(&self) -> usize {
        self.starts
            .windows(2)
            .map(|w| w[1] - w[0])
            .min()
            .unwrap_or(0)
    }
}

/// Groups the rows of `data` by their values on `columns`.
pub fn partition_by<'d, S: AsRef<str>>(data: &'d Dataset, columns: &[S]) -> Result<Partition<'d>> {
    let column_indices = columns
        .iter()
        .map(|c| data.column_index(c.as_ref()))
        .collect::<Result<Vec<_>>>()?;
    if data.row_count() == 0 {
        return Err(Error::EmptyDataset);
    }
    let codes: Vec<&[u32]> = column_indices
        .iter()
        .map(|&c| data.columns()[c].codes())
        .collect();
    let compare = |a: usize, b: usize| -> Ordering {
        codes
            .iter()
            .map(|col| col[a].cmp(&col[b]))
            .find(|o| o.is_ne())
            .unwrap_or(Ordering::Equal)
    };

    let mut rows: Vec<usize> = (0..data.row_count()).collect();
    // stable: rows inside a class stay ascending
    rows.sort_by(|&a, &b| compare(a, b));

    let mut starts = vec![0];
    for i in 1..rows.len() {
        if compare(rows[i - 1], rows[i]).is_ne() {
            starts.push(i);
        }
    }
    starts.push(rows.len());

    Ok(Partition {
        data,
        grouping_columns: columns.iter().map(|c| c.as_ref().to_string()).collect(),
        column_indices,
        rows,
        starts,
    })
}

/// Relative frequencies of a column's values over a set of rows.
///
/// Support is in the column's level order (ascending for numeric columns).
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    support: Vec<Cell>,
    counts: Vec<usize>,
    probs: Vec<f64>,
}

impl Distribution {
    pub fn support(&self) -> &[Cell] {
        &self.support
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Absolute counts parallel to [`Distribution::support`].
    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }

    pub fn prob_of(&self, value: &Cell) -> f64 {
        self.support
            .binary_search(value)
            .map_or(0.0, |i| self.probs[i])
    }

    fn from_codes(column: &Column, rows: impl Iterator<Item = usize>) -> Distribution {
        let mut counts = vec![0usize; column.levels().len()];
        let mut total = 0usize;
        for row in rows {
            counts[column.codes()[row] as usize] += 1;
            total += 1;
        }
        let mut support = Vec::new();
        let mut kept = Vec::new();
        for (level, &n) in column.levels().iter().zip(&counts) {
            if n > 0 {
                support.push(level.clone());
                kept.push(n);
            }
        }
        let probs = kept.iter().map(|&n| n as f64 / total as f64).collect();
        Distribution {
            support,
            counts: kept,
            probs,
        }
    }
}

/// Distribution of `column` restricted to `rows`.
pub fn distribution(data: &Dataset, rows: &[usize], column: &str) -> Result<Distribution> {
    let column = data.column(column)?;
    if rows.is_empty() {
        return Err(Error::EmptyRowSet);
    }
    if let Some(&index) = rows.iter().find(|&&r| r >= data.row_count()) {
        return Err(Error::RowOutOfRange {
            index,
            row_count: data.row_count(),
        });
    }
    Ok(Distribution::from_codes(column, rows.iter().copied()))
}

/// Distribution of `column` over the whole dataset.
pub fn global_distribution(data: &Dataset, column: &str) -> Result<Distribution> {
    let column = data.column(column)?;
    if data.row_count() == 0 {
        return Err(Error::EmptyDataset);
    }
    Ok(Distribution::from_codes(column, 0..data.row_count()))
}

/// Expresses both distributions as probability vectors over the global
/// support; values missing from `local` get probability zero.
pub fn align(global: &Distribution, local: &Distribution) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut q = vec![0.0; global.support.len()];
    for (value, &prob) in local.support.iter().zip(&local.probs) {
        match global.support.binary_search(value) {
            Ok(i) => q[i] = prob,
            Err(_) => return Err(Error::SupportMismatch(value.to_string())),
        }
    }
    Ok((global.probs.clone(), q))
}
