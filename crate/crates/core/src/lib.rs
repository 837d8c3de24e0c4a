//! Anonymity auditing for tabular microdata.
//!
//! Given quasi-identifiers (QI) and sensitive attributes (SA), `anonaudit`
//! computes the parameter each of nine anonymity models is verified for:
//! k-anonymity, (alpha,k)-anonymity, l-diversity, entropy l-diversity,
//! recursive (c,l)-diversity, basic and enhanced beta-likeness, t-closeness
//! and delta-disclosure privacy.
//!
//! ```
//! use anonaudit::{build_report, AttributeSchema, Dataset, LoadOptions};
//!
//! let data = Dataset::from_rows(
//!     ["zip", "disease"],
//!     [["101", "flu"], ["101", "cold"], ["102", "flu"], ["102", "flu"]],
//!     &LoadOptions::default(),
//! )
//! .unwrap();
//! let report = build_report(&data, &AttributeSchema::new(["zip"], ["disease"])).unwrap();
//! assert_eq!(report.metrics.k_anonymity, 2);
//! assert_eq!(report.metrics.t_closeness.value, 0.25);
//! ```

pub mod check;
pub mod distance;
pub mod error;
pub mod metrics;
pub mod partition;
pub mod report;
pub mod table;

pub use check::{check, CheckOutcome, CheckRow, Thresholds};
pub use error::{Error, Result};
pub use metrics::{
    alpha_k_anonymity, basic_beta_likeness, delta_disclosure, enhanced_beta_likeness,
    entropy_l_diversity, k_anonymity, l_diversity, recursive_c_l_diversity, t_closeness, Auditor,
    MetricId, MetricValue, Parameter, SaMetrics, Severity, Warning,
};
pub use partition::{
    align, distribution, global_distribution, partition_by, Distribution, Partition,
};
pub use report::{build_report, render_json, render_text, write_json, AnonymityReport};
pub use table::{
    delimiter_for_path, infer_kind, load_delimited, parse_delimited, validate_schema,
    AttributeSchema, Cell, Column, ColumnKind, Dataset, LoadOptions, SaMode, ValidatedSchema,
    DEFAULT_MISSING_TOKEN,
};

/// Splits a comma-separated name list, honoring double quotes around names
/// that contain commas.
pub fn split_name_list(list: &str) -> Result<Vec<String>> {
    table::split_line(list, ',')
}
