//! Comparing computed parameters against required thresholds.
//!
//! k and the l variants must reach the requirement (`>=`). alpha and beta
//! must not exceed it (`<=`). t and delta are strict: the requirement has to
//! be strictly greater than the attained value.

use std::fmt;

use crate::error::Result;
use crate::metrics::{Auditor, MetricId};
use crate::report::format_real;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Thresholds {
    pub k: Option<usize>,
    pub alpha: Option<f64>,
    pub l: Option<usize>,
    pub entropy_l: Option<usize>,
    pub beta: Option<f64>,
    pub enhanced_beta: Option<f64>,
    pub t: Option<f64>,
    pub delta: Option<f64>,
}

impl Thresholds {
    pub fn is_empty(&self) -> bool {
        *self == Thresholds::default()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Level {
    Count(usize),
    Real(f64),
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Level::Count(n) => write!(f, "{n}"),
            Level::Real(x) => f.write_str(&format_real(*x)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckRow {
    pub metric: MetricId,
    pub required: Level,
    pub attained: Level,
    pub pass: bool,
}

impl fmt::Display for CheckRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: required {}, attained {}: {}",
            self.metric.label(),
            self.required,
            self.attained,
            if self.pass { "PASS" } else { "FAIL" }
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub rows: Vec<CheckRow>,
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.rows {
            writeln!(f, "{row}")?;
        }
        Ok(())
    }
}

/// `attained >= required`
pub fn meets_at_least(attained: usize, required: usize) -> bool {
    attained >= required
}

/// `attained <= required`
pub fn meets_at_most(attained: f64, required: f64) -> bool {
    attained <= required
}

/// `attained < required`, for t and delta.
pub fn meets_strictly(attained: f64, required: f64) -> bool {
    attained < required
}

/// Evaluates only the models that have a threshold.
pub fn check(auditor: &mut Auditor<'_>, thresholds: &Thresholds) -> Result<CheckOutcome> {
    let mut rows = Vec::new();
    let count = |metric, required: usize, attained: usize| CheckRow {
        metric,
        required: Level::Count(required),
        attained: Level::Count(attained),
        pass: meets_at_least(attained, required),
    };
    if let Some(k) = thresholds.k {
        rows.push(count(MetricId::KAnonymity, k, auditor.k_anonymity()?));
    }
    if let Some(l) = thresholds.l {
        rows.push(count(MetricId::LDiversity, l, auditor.l_diversity()?));
    }
    if let Some(l) = thresholds.entropy_l {
        rows.push(count(
            MetricId::EntropyLDiversity,
            l,
            auditor.entropy_l_diversity()?,
        ));
    }

    let real = |metric, required: f64, attained: f64, pass: fn(f64, f64) -> bool| CheckRow {
        metric,
        required: Level::Real(required),
        attained: Level::Real(attained),
        pass: pass(attained, required),
    };
    if let Some(alpha) = thresholds.alpha {
        let (attained, _) = auditor.alpha_k_anonymity()?;
        rows.push(real(
            MetricId::AlphaKAnonymity,
            alpha,
            attained,
            meets_at_most,
        ));
    }
    if let Some(beta) = thresholds.beta {
        let attained = auditor.basic_beta_likeness()?;
        rows.push(real(
            MetricId::BasicBetaLikeness,
            beta,
            attained,
            meets_at_most,
        ));
    }
    if let Some(beta) = thresholds.enhanced_beta {
        let attained = auditor.enhanced_beta_likeness()?;
        rows.push(real(
            MetricId::EnhancedBetaLikeness,
            beta,
            attained,
            meets_at_most,
        ));
    }
    if let Some(t) = thresholds.t {
        let attained = auditor.t_closeness()?;
        rows.push(real(MetricId::TCloseness, t, attained, meets_strictly));
    }
    if let Some(delta) = thresholds.delta {
        let attained = auditor.delta_disclosure()?;
        rows.push(real(
            MetricId::DeltaDisclosure,
            delta,
            attained,
            meets_strictly,
        ));
    }
    rows.sort_by_key(|r| r.metric);
    Ok(CheckOutcome { rows })
}
