use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::Dataset;
use crate::error::{Error, Result};

/// How several sensitive attributes are combined.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SaMode {
    /// Every SA is evaluated on the QI partition; the weakest parameter wins.
    #[default]
    Generalization,
    /// For each SA, the remaining SAs are treated as extra quasi-identifiers.
    QiUpdate,
}

impl fmt::Display for SaMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SaMode::Generalization => f.write_str("generalization"),
            SaMode::QiUpdate => f.write_str("qi-update"),
        }
    }
}

/// Quasi-identifiers, sensitive attributes and the multi-SA strategy.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttributeSchema {
    pub qi: Vec<String>,
    pub sa: Vec<String>,
    pub mode: SaMode,
}

impl AttributeSchema {
    pub fn new<Q, S>(qi: Q, sa: S) -> Self
    where
        Q: IntoIterator,
        Q::Item: Into<String>,
        S: IntoIterator,
        S::Item: Into<String>,
    {
        AttributeSchema {
            qi: qi.into_iter().map(Into::into).collect(),
            sa: sa.into_iter().map(Into::into).collect(),
            mode: SaMode::Generalization,
        }
    }

    pub fn with_mode(mut self, mode: SaMode) -> Self {
        self.mode = mode;
        self
    }

    /// Columns that define the equivalence classes used for sensitive
    /// attribute `sa`: the QIs alone under [`SaMode::Generalization`], the QIs
    /// followed by every other SA under [`SaMode::QiUpdate`].
    pub fn grouping_columns_for(&self, sa: &str) -> Result<Vec<String>> {
        if !self.sa.iter().any(|s| s == sa) {
            return Err(Error::UnknownSa(sa.to_string()));
        }
        let mut columns = self.qi.clone();
        if self.mode == SaMode::QiUpdate {
            columns.extend(self.sa.iter().filter(|s| *s != sa).cloned());
        }
        Ok(columns)
    }
}

/// A schema checked against a dataset, with column positions resolved.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidatedSchema {
    schema: AttributeSchema,
    qi_columns: Vec<usize>,
    sa_columns: Vec<usize>,
}

impl ValidatedSchema {
    pub fn schema(&self) -> &AttributeSchema {
        &self.schema
    }

    pub fn qi(&self) -> &[String] {
        &self.schema.qi
    }

    pub fn sa(&self) -> &[String] {
        &self.schema.sa
    }

    pub fn mode(&self) -> SaMode {
        self.schema.mode
    }

    pub fn qi_columns(&self) -> &[usize] {
        &self.qi_columns
    }

    pub fn sa_columns(&self) -> &[usize] {
        &self.sa_columns
    }
}

/// Checks that every schema column exists, QI is non-empty and QI/SA are
/// disjoint. An empty SA list is accepted; SA-dependent metrics reject it.
pub fn validate_schema(data: &Dataset, schema: &AttributeSchema) -> Result<ValidatedSchema> {
    if schema.qi.is_empty() {
        return Err(Error::EmptyQi);
    }
    let mut seen = HashSet::new();
    for name in schema.qi.iter().chain(&schema.sa) {
        data.column_index(name)?;
        if !seen.insert(name.as_str()) {
            return Err(if schema.qi.contains(name) && schema.sa.contains(name) {
                Error::OverlappingQiSa(name.clone())
            } else {
                Error::DuplicateAttribute(name.clone())
            });
        }
    }
    let resolve = |names: &[String]| -> Vec<usize> {
        names
            .iter()
            .map(|n| data.column_index(n).expect("checked above"))
            .collect()
    };
    Ok(ValidatedSchema {
        qi_columns: resolve(&schema.qi),
        sa_columns: resolve(&schema.sa),
        schema: schema.clone(),
    })
}
