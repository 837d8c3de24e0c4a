//! Full anonymity report and its JSON and text renderings.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::metrics::{aggregate_recursive, Auditor, MetricId, SaMetrics, Severity, Warning};
use crate::table::{AttributeSchema, Dataset, SaMode};

pub const SCHEMA_VERSION: &str = "1";
pub const TOOL_NAME: &str = "anonaudit";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Rounds to four decimals for display fields.
pub fn display_value(x: f64) -> f64 {
    (x * 1e4).round() / 1e4
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToolInfo {
    pub name: String,
    pub version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetInfo {
    pub source: String,
    pub row_count: usize,
    pub column_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemaEcho {
    pub qi: Vec<String>,
    pub sa: Vec<String>,
    pub mode: SaMode,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlphaK {
    pub alpha: f64,
    pub alpha_display: f64,
    pub k: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecursiveCL {
    pub c: Option<usize>,
    pub l: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RealParameter {
    pub value: f64,
    pub display: f64,
    /// When true the model holds for every threshold strictly above `value`.
    pub strict: bool,
}

impl RealParameter {
    fn new(value: f64, strict: bool) -> Self {
        RealParameter {
            value,
            display: display_value(value),
            strict,
        }
    }
}

/// Aggregated parameters of the nine models.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSummary {
    pub k_anonymity: usize,
    pub alpha_k_anonymity: AlphaK,
    pub l_diversity: usize,
    pub entropy_l_diversity: usize,
    pub recursive_c_l_diversity: RecursiveCL,
    pub basic_beta_likeness: RealParameter,
    pub enhanced_beta_likeness: RealParameter,
    pub t_closeness: RealParameter,
    pub delta_disclosure: RealParameter,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnonymityReport {
    pub schema_version: String,
    pub tool: ToolInfo,
    pub log_base: String,
    pub dataset: DatasetInfo,
    pub schema: SchemaEcho,
    pub metrics: MetricSummary,
    pub per_sa: Vec<SaMetrics>,
    pub warnings: Vec<Warning>,
}

impl AnonymityReport {
    pub fn warnings_for(&self, id: MetricId) -> impl Iterator<Item = &Warning> + '_ {
        self.warnings.iter().filter(move |w| w.metric == id)
    }

    pub fn parse_json(text: &str) -> serde_json::Result<AnonymityReport> {
        serde_json::from_str(text)
    }
}

/// Evaluates all nine models, partitioning each grouping set once.
pub fn build_report(data: &Dataset, schema: &AttributeSchema) -> Result<AnonymityReport> {
    let mut auditor = Auditor::new(data, schema)?;
    let k = auditor.k_anonymity()?;
    let mut per_sa = auditor.into_sa_metrics()?;

    let max = |f: fn(&SaMetrics) -> f64| per_sa.iter().map(f).fold(0.0, f64::max);
    let min = |f: fn(&SaMetrics) -> usize| per_sa.iter().map(f).min().unwrap_or(0);

    let (c, recursive_l) = aggregate_recursive(&per_sa);
    let alpha = max(|m| m.alpha);
    let metrics = MetricSummary {
        k_anonymity: k,
        alpha_k_anonymity: AlphaK {
            alpha,
            alpha_display: display_value(alpha),
            k: min(|m| m.k),
        },
        l_diversity: min(|m| m.l),
        entropy_l_diversity: min(|m| m.entropy_l),
        recursive_c_l_diversity: RecursiveCL { c, l: recursive_l },
        basic_beta_likeness: RealParameter::new(max(|m| m.basic_beta), false),
        enhanced_beta_likeness: RealParameter::new(max(|m| m.enhanced_beta), false),
        t_closeness: RealParameter::new(max(|m| m.t), true),
        delta_disclosure: RealParameter::new(max(|m| m.delta), true),
    };

    // moved, not copied: a badly anonymized table can carry one warning per class
    let mut warnings: Vec<Warning> = Vec::new();
    for m in &mut per_sa {
        if warnings.is_empty() {
            warnings = std::mem::take(&mut m.warnings);
        } else {
            warnings.append(&mut m.warnings);
            m.warnings = Vec::new();
        }
    }
    // stable sort keeps the per-SA order within a metric
    warnings.sort_by_key(|w| w.metric);

    Ok(AnonymityReport {
        schema_version: SCHEMA_VERSION.to_string(),
        tool: ToolInfo {
            name: TOOL_NAME.to_string(),
            version: TOOL_VERSION.to_string(),
        },
        log_base: "natural".to_string(),
        dataset: DatasetInfo {
            source: data.source().to_string(),
            row_count: data.row_count(),
            column_count: data.column_count(),
        },
        schema: SchemaEcho {
            qi: schema.qi.clone(),
            sa: schema.sa.clone(),
            mode: schema.mode,
        },
        metrics,
        per_sa,
        warnings,
    })
}

/// Pretty-printed JSON with a trailing newline. Key order follows the
/// struct definitions and floats use the shortest round-trip form.
pub fn render_json(report: &AnonymityReport) -> String {
    let mut out = Vec::new();
    write_json(report, &mut out).expect("writing to a Vec cannot fail");
    String::from_utf8(out).expect("serde_json emits UTF-8")
}

/// Streams the same bytes as [`render_json`] into `out`.
pub fn write_json<W: std::io::Write>(report: &AnonymityReport, mut out: W) -> std::io::Result<()> {
    serde_json::to_writer_pretty(&mut out, report)?;
    out.write_all(b"\n")
}

/// Up to four decimals, trailing zeros dropped.
pub fn format_real(x: f64) -> String {
    let s = format!("{:.4}", display_value(x));
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".to_string()
    } else {
        s.to_string()
    }
}

pub fn render_text(report: &AnonymityReport) -> String {
    let mut out = String::new();
    let d = &report.dataset;
    let m = &report.metrics;
    let _ = writeln!(
        out,
        "Anonymity report for {} ({} rows, {} columns)",
        d.source, d.row_count, d.column_count
    );
    let _ = writeln!(out, "quasi-identifiers: {}", report.schema.qi.join(", "));
    let _ = writeln!(out, "sensitive attributes: {}", report.schema.sa.join(", "));
    let _ = writeln!(out, "multi-SA mode: {}", report.schema.mode);
    let _ = writeln!(out, "logarithm base: {}", report.log_base);
    out.push('\n');

    let _ = writeln!(out, "k-anonymity: k = {}", m.k_anonymity);
    let _ = writeln!(
        out,
        "(alpha,k)-anonymity: alpha = {}, k = {}",
        format_real(m.alpha_k_anonymity.alpha),
        m.alpha_k_anonymity.k
    );
    let _ = writeln!(out, "l-diversity: l = {}", m.l_diversity);
    let _ = writeln!(out, "entropy l-diversity: l = {}", m.entropy_l_diversity);
    match m.recursive_c_l_diversity.c {
        Some(c) => {
            let _ = writeln!(
                out,
                "recursive (c,l)-diversity: c = {}, l = {}",
                c, m.recursive_c_l_diversity.l
            );
        }
        None => {
            let _ = writeln!(
                out,
                "recursive (c,l)-diversity: l = {}, c not computed (l = 1)",
                m.recursive_c_l_diversity.l
            );
        }
    }
    let _ = writeln!(
        out,
        "basic beta-likeness: beta = {}",
        format_real(m.basic_beta_likeness.value)
    );
    let _ = writeln!(
        out,
        "enhanced beta-likeness: beta = {}",
        format_real(m.enhanced_beta_likeness.value)
    );
    let _ = writeln!(
        out,
        "t-closeness: t = {} (strict)",
        format_real(m.t_closeness.value)
    );
    let _ = writeln!(
        out,
        "delta-disclosure privacy: delta = {} (strict)",
        format_real(m.delta_disclosure.value)
    );
    let _ = writeln!(
        out,
        "(strict): verified for any value strictly greater than the one shown"
    );

    if report.per_sa.len() > 1 {
        out.push('\n');
        let _ = writeln!(out, "per sensitive attribute:");
        for s in &report.per_sa {
            let c = s.c.map_or_else(|| "-".to_string(), |c| c.to_string());
            let _ = writeln!(
                out,
                "  {} (grouped by {}): k = {}, alpha = {}, l = {}, entropy l = {}, c = {}, beta = {}, t = {}, delta = {}",
                s.sa,
                s.grouping_columns.join(", "),
                s.k,
                format_real(s.alpha),
                s.l,
                s.entropy_l,
                c,
                format_real(s.basic_beta),
                format_real(s.t),
                format_real(s.delta)
            );
        }
    }

    out.push('\n');
    let (warnings, notes): (Vec<&Warning>, Vec<&Warning>) = report
        .warnings
        .iter()
        .partition(|w| w.severity == Severity::Warning);
    if warnings.is_empty() {
        let _ = writeln!(out, "warnings: none");
    } else {
        let _ = writeln!(out, "warnings:");
        for w in warnings {
            let _ = writeln!(out, "  - {w}");
        }
    }
    if !notes.is_empty() {
        let _ = writeln!(out, "notes:");
        for n in notes {
            let _ = writeln!(out, "  - {n}");
        }
    }
    out
}
