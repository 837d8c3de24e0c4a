//! The nine anonymity models.
//!
//! Every model is reported as the tightest parameter the data actually
//! satisfies: the smallest class size for k, the largest in-class frequency
//! for alpha, the largest class-to-table distance for beta, t and delta, and
//! so on. With several sensitive attributes each one is evaluated on its own
//! grouping (see [`SaMode`]) and the per-attribute results are combined by
//! taking the weakest guarantee: minimum for k and the l variants, maximum
//! for alpha, c, beta, t and delta.
//!
//! [`Auditor`] holds the partition and per-attribute caches so a full report
//! partitions each distinct grouping set once. The free functions at the
//! bottom are one-shot wrappers around it.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::distance::{emd_ordered, relative_distance};
use crate::error::{Error, Result};
use crate::partition::{partition_by, Partition};
use crate::table::{
    validate_schema, AttributeSchema, ColumnKind, Dataset, SaMode, ValidatedSchema,
};

/// Slack used when comparing an entropy against `ln(l)`.
pub const ENTROPY_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricId {
    KAnonymity,
    AlphaKAnonymity,
    LDiversity,
    EntropyLDiversity,
    RecursiveCLDiversity,
    BasicBetaLikeness,
    EnhancedBetaLikeness,
    TCloseness,
    DeltaDisclosure,
}

impl MetricId {
    pub const ALL: [MetricId; 9] = [
        MetricId::KAnonymity,
        MetricId::AlphaKAnonymity,
        MetricId::LDiversity,
        MetricId::EntropyLDiversity,
        MetricId::RecursiveCLDiversity,
        MetricId::BasicBetaLikeness,
        MetricId::EnhancedBetaLikeness,
        MetricId::TCloseness,
        MetricId::DeltaDisclosure,
    ];

    /// Stable machine name, also used as the JSON key.
    pub fn key(self) -> &'static str {
        match self {
            MetricId::KAnonymity => "k_anonymity",
            MetricId::AlphaKAnonymity => "alpha_k_anonymity",
            MetricId::LDiversity => "l_diversity",
            MetricId::EntropyLDiversity => "entropy_l_diversity",
            MetricId::RecursiveCLDiversity => "recursive_c_l_diversity",
            MetricId::BasicBetaLikeness => "basic_beta_likeness",
            MetricId::EnhancedBetaLikeness => "enhanced_beta_likeness",
            MetricId::TCloseness => "t_closeness",
            MetricId::DeltaDisclosure => "delta_disclosure",
        }
    }

    /// Human-readable technique name.
    pub fn label(self) -> &'static str {
        match self {
            MetricId::KAnonymity => "k-anonymity",
            MetricId::AlphaKAnonymity => "(alpha,k)-anonymity",
            MetricId::LDiversity => "l-diversity",
            MetricId::EntropyLDiversity => "entropy l-diversity",
            MetricId::RecursiveCLDiversity => "recursive (c,l)-diversity",
            MetricId::BasicBetaLikeness => "basic beta-likeness",
            MetricId::EnhancedBetaLikeness => "enhanced beta-likeness",
            MetricId::TCloseness => "t-closeness",
            MetricId::DeltaDisclosure => "delta-disclosure privacy",
        }
    }

    /// t and delta hold for any threshold strictly above the reported value.
    pub fn is_strict(self) -> bool {
        matches!(self, MetricId::TCloseness | MetricId::DeltaDisclosure)
    }

    pub fn needs_sa(self) -> bool {
        self != MetricId::KAnonymity
    }
}

impl fmt::Display for MetricId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Warning,
    Note,
}

/// A diagnostic attached to a metric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Warning {
    pub metric: MetricId,
    pub severity: Severity,
    pub sa: Option<String>,
    pub message: String,
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.metric.label())?;
        if let Some(sa) = &self.sa {
            write!(f, " [{sa}]")?;
        }
        write!(f, ": {}", self.message)
    }
}

/// The parameter(s) of one model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Parameter {
    K(usize),
    AlphaK { alpha: f64, k: usize },
    L(usize),
    EntropyL(usize),
    RecursiveCL { c: Option<usize>, l: usize },
    BasicBeta(f64),
    EnhancedBeta(f64),
    T(f64),
    Delta(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricValue {
    pub id: MetricId,
    pub parameter: Parameter,
    pub strict: bool,
    pub warnings: Vec<Warning>,
}

/// Every model evaluated for one sensitive attribute on its grouping.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SaMetrics {
    pub sa: String,
    pub kind: ColumnKind,
    pub grouping_columns: Vec<String>,
    pub class_count: usize,
    /// Smallest class of this attribute's grouping (the k of (alpha,k)).
    pub k: usize,
    pub alpha: f64,
    pub l: usize,
    pub entropy_l: usize,
    /// Lowest class entropy, in nats.
    pub min_entropy: f64,
    pub c: Option<usize>,
    pub basic_beta: f64,
    pub enhanced_beta: f64,
    pub t: f64,
    pub delta: f64,
    /// Left empty inside an [`AnonymityReport`](crate::AnonymityReport), which
    /// keeps a single flat list instead.
    #[serde(skip)]
    pub warnings: Vec<Warning>,
}

impl SaMetrics {
    fn warnings_for(&self, id: MetricId) -> impl Iterator<Item = &Warning> + '_ {
        self.warnings.iter().filter(move |w| w.metric == id)
    }
}

/// Largest integer `l` with `ln(l) <= entropy` (up to [`ENTROPY_TOLERANCE`]).
pub fn entropy_l_from(entropy: f64) -> usize {
    let fits = |l: usize| (l as f64).ln() <= entropy + ENTROPY_TOLERANCE;
    let mut l = entropy.exp().floor().max(1.0) as usize;
    while fits(l + 1) {
        l += 1;
    }
    while l > 1 && !fits(l) {
        l -= 1;
    }
    l
}

/// Smallest integer `c` with `r1 < c * (r_l + ... + r_n)` for one class.
///
/// `counts` must be sorted descending and hold at least `l` entries.
pub fn recursive_c_for_class(counts: &[usize], l: usize) -> usize {
    let tail: usize = counts[l - 1..].iter().sum();
    counts[0] / tail + 1
}

/// Lazily evaluates the models for one dataset and schema.
pub struct Auditor<'d> {
    data: &'d Dataset,
    schema: ValidatedSchema,
    partitions: BTreeMap<Vec<String>, Partition<'d>>,
    sa_metrics: Vec<Option<SaMetrics>>,
    partitions_built: usize,
}

impl<'d> Auditor<'d> {
    pub fn new(data: &'d Dataset, schema: &AttributeSchema) -> Result<Self> {
        let schema = validate_schema(data, schema)?;
        let sa_count = schema.sa().len();
        Ok(Auditor {
            data,
            schema,
            partitions: BTreeMap::new(),
            sa_metrics: vec![None; sa_count],
            partitions_built: 0,
        })
    }

    pub fn data(&self) -> &'d Dataset {
        self.data
    }

    pub fn schema(&self) -> &ValidatedSchema {
        &self.schema
    }

    /// How many partitions have been computed so far.
    pub fn partitions_built(&self) -> usize {
        self.partitions_built
    }

    fn ensure_partition(&mut self, columns: &[String]) -> Result<Vec<String>> {
        let mut key = columns.to_vec();
        key.sort();
        if !self.partitions.contains_key(&key) {
            let partition = partition_by(self.data, columns)?;
            self.partitions_built += 1;
            self.partitions.insert(key.clone(), partition);
        }
        Ok(key)
    }

    /// Partition of the dataset over `columns`, cached by column set.
    pub fn partition(&mut self, columns: &[String]) -> Result<&Partition<'d>> {
        let key = self.ensure_partition(columns)?;
        Ok(&self.partitions[&key])
    }

    pub fn k_anonymity(&mut self) -> Result<usize> {
        let qi = self.schema.qi().to_vec();
        Ok(self.partition(&qi)?.min_class_size())
    }

    /// Metrics for the `index`-th sensitive attribute.
    pub fn sa_metrics(&mut self, index: usize) -> Result<&SaMetrics> {
        if self.sa_metrics[index].is_none() {
            let sa = self.schema.sa()[index].clone();
            let grouping = self.schema.schema().grouping_columns_for(&sa)?;
            let key = self.ensure_partition(&grouping)?;
            let partition = &self.partitions[&key];
            let metrics = evaluate_sa(self.data, partition, self.schema.sa_columns()[index])?;
            self.sa_metrics[index] = Some(metrics);
        }
        Ok(self.sa_metrics[index].as_ref().expect("just computed"))
    }

    /// Metrics for every sensitive attribute, in schema order.
    pub fn all_sa_metrics(&mut self) -> Result<Vec<&SaMetrics>> {
        self.evaluate_all()?;
        Ok(self.sa_metrics.iter().flatten().collect())
    }

    /// Like [`Auditor::all_sa_metrics`], handing over ownership instead of
    /// borrowing (warnings can be large).
    pub fn into_sa_metrics(mut self) -> Result<Vec<SaMetrics>> {
        self.evaluate_all()?;
        Ok(self.sa_metrics.into_iter().flatten().collect())
    }

    fn evaluate_all(&mut self) -> Result<()> {
        if self.schema.sa().is_empty() {
            return Err(Error::EmptySa);
        }
        for i in 0..self.schema.sa().len() {
            self.sa_metrics(i)?;
        }
        Ok(())
    }

    pub fn alpha_k_anonymity(&mut self) -> Result<(f64, usize)> {
        let per_sa = self.all_sa_metrics()?;
        Ok((
            max_f64(per_sa.iter().map(|m| m.alpha)),
            min_usize(per_sa.iter().map(|m| m.k)),
        ))
    }

    pub fn l_diversity(&mut self) -> Result<usize> {
        Ok(min_usize(self.all_sa_metrics()?.iter().map(|m| m.l)))
    }

    pub fn entropy_l_diversity(&mut self) -> Result<usize> {
        Ok(min_usize(
            self.all_sa_metrics()?.iter().map(|m| m.entropy_l),
        ))
    }

    pub fn recursive_c_l_diversity(&mut self) -> Result<(Option<usize>, usize)> {
        let per_sa = self.all_sa_metrics()?;
        Ok(aggregate_recursive(per_sa.iter().copied()))
    }

    pub fn basic_beta_likeness(&mut self) -> Result<f64> {
        Ok(max_f64(self.all_sa_metrics()?.iter().map(|m| m.basic_beta)))
    }

    pub fn enhanced_beta_likeness(&mut self) -> Result<f64> {
        Ok(max_f64(
            self.all_sa_metrics()?.iter().map(|m| m.enhanced_beta),
        ))
    }

    pub fn t_closeness(&mut self) -> Result<f64> {
        Ok(max_f64(self.all_sa_metrics()?.iter().map(|m| m.t)))
    }

    pub fn delta_disclosure(&mut self) -> Result<f64> {
        Ok(max_f64(self.all_sa_metrics()?.iter().map(|m| m.delta)))
    }

    /// One model with its aggregated parameter and diagnostics.
    pub fn metric(&mut self, id: MetricId) -> Result<MetricValue> {
        let parameter = match id {
            MetricId::KAnonymity => Parameter::K(self.k_anonymity()?),
            MetricId::AlphaKAnonymity => {
                let (alpha, k) = self.alpha_k_anonymity()?;
                Parameter::AlphaK { alpha, k }
            }
            MetricId::LDiversity => Parameter::L(self.l_diversity()?),
            MetricId::EntropyLDiversity => Parameter::EntropyL(self.entropy_l_diversity()?),
            MetricId::RecursiveCLDiversity => {
                let (c, l) = self.recursive_c_l_diversity()?;
                Parameter::RecursiveCL { c, l }
            }
            MetricId::BasicBetaLikeness => Parameter::BasicBeta(self.basic_beta_likeness()?),
            MetricId::EnhancedBetaLikeness => {
                Parameter::EnhancedBeta(self.enhanced_beta_likeness()?)
            }
            MetricId::TCloseness => Parameter::T(self.t_closeness()?),
            MetricId::DeltaDisclosure => Parameter::Delta(self.delta_disclosure()?),
        };
        let mut warnings = Vec::new();
        if id.needs_sa() {
            for i in 0..self.schema.sa().len() {
                warnings.extend(self.sa_metrics(i)?.warnings_for(id).cloned());
            }
        }
        Ok(MetricValue {
            id,
            parameter,
            strict: id.is_strict(),
            warnings,
        })
    }
}

pub(crate) fn aggregate_recursive<'a, I>(per_sa: I) -> (Option<usize>, usize)
where
    I: IntoIterator<Item = &'a SaMetrics>,
    I::IntoIter: Clone,
{
    let per_sa = per_sa.into_iter();
    let l = min_usize(per_sa.clone().map(|m| m.l));
    if l == 1 {
        return (None, 1);
    }
    let c = per_sa.filter_map(|m| m.c).max();
    (c, l)
}

fn min_usize(values: impl Iterator<Item = usize>) -> usize {
    values.min().unwrap_or(0)
}

fn max_f64(values: impl Iterator<Item = f64>) -> f64 {
    values.fold(0.0, f64::max)
}

/// Single pass over the classes of `partition` for sensitive column `sa_index`.
fn evaluate_sa(data: &Dataset, partition: &Partition<'_>, sa_index: usize) -> Result<SaMetrics> {
    let column = &data.columns()[sa_index];
    let sa = column.name().to_string();
    let codes = column.codes();
    let levels = column.levels().len();
    let total = data.row_count();

    let mut global_counts = vec![0usize; levels];
    for &c in codes {
        global_counts[c as usize] += 1;
    }
    let global: Vec<f64> = global_counts
        .iter()
        .map(|&n| n as f64 / total as f64)
        .collect();

    let numeric = column.kind() == ColumnKind::Numeric;
    let mut counts = vec![0usize; levels];
    let mut touched: Vec<u32> = Vec::new();
    let mut local = if numeric {
        vec![0.0; levels]
    } else {
        Vec::new()
    };

    let mut k = usize::MAX;
    let mut alpha = 0.0f64;
    let mut l = usize::MAX;
    let mut min_entropy = f64::INFINITY;
    let mut beta = 0.0f64;
    let mut t = 0.0f64;
    let mut delta = 0.0f64;
    let mut skipped_pairs = 0usize;
    let mut warnings = Vec::new();
    // sorted descending counts of every class, back to back, for the c pass
    let mut class_counts: Vec<usize> = Vec::with_capacity(partition.len());
    let mut class_ends: Vec<usize> = Vec::with_capacity(partition.len());

    for class in partition.classes() {
        let n = class.len();
        touched.clear();
        for &row in class.rows() {
            let c = codes[row] as usize;
            if counts[c] == 0 {
                touched.push(c as u32);
            }
            counts[c] += 1;
        }
        touched.sort_unstable();

        k = k.min(n);
        l = l.min(touched.len());

        let mut entropy = 0.0;
        let mut max_count = 0;
        let mut abs_diff = 0.0;
        let mut touched_global = 0usize;
        for &code in &touched {
            let c = code as usize;
            let count = counts[c];
            let q = count as f64 / n as f64;
            let p = global[c];
            max_count = max_count.max(count);
            entropy -= q * q.ln();
            abs_diff += (p - q).abs();
            touched_global += global_counts[c];

            if q > p {
                let d = relative_distance(p, q)?;
                beta = beta.max(d);
                let cap = -p.ln();
                if d > cap {
                    warnings.push(Warning {
                        metric: MetricId::EnhancedBetaLikeness,
                        severity: Severity::Warning,
                        sa: Some(sa.clone()),
                        message: format!(
                            "class {} value {}: relative distance {} exceeds -ln(p) = {}",
                            class.describe(),
                            column.levels()[c],
                            d,
                            cap
                        ),
                    });
                }
            }
            delta = delta.max((q / p).ln().abs());
            if numeric {
                local[c] = q;
            }
        }
        skipped_pairs += levels - touched.len();
        alpha = alpha.max(max_count as f64 / n as f64);
        min_entropy = min_entropy.min(entropy.max(0.0));

        let distance = if numeric {
            let d = emd_ordered(&global, &local)?;
            for &code in &touched {
                local[code as usize] = 0.0;
            }
            d
        } else {
            // values absent from the class contribute their whole global mass
            let absent = (total - touched_global) as f64 / total as f64;
            0.5 * (abs_diff + absent)
        };
        t = t.max(distance);

        let from = class_counts.len();
        class_counts.extend(touched.iter().map(|&c| counts[c as usize]));
        class_counts[from..].sort_unstable_by(|a, b| b.cmp(a));
        class_ends.push(class_counts.len());

        for &code in &touched {
            counts[code as usize] = 0;
        }
    }

    let c = if l >= 2 {
        let mut from = 0;
        class_ends
            .iter()
            .map(|&end| {
                let desc = &class_counts[from..end];
                from = end;
                recursive_c_for_class(desc, l)
            })
            .max()
    } else {
        warnings.push(Warning {
            metric: MetricId::RecursiveCLDiversity,
            severity: Severity::Warning,
            sa: Some(sa.clone()),
            message: "c is not computed because l = 1".to_string(),
        });
        None
    };

    let entropy_l = entropy_l_from(min_entropy);
    if entropy_l > 1 && ((entropy_l as f64).ln() - min_entropy).abs() <= ENTROPY_TOLERANCE {
        warnings.push(Warning {
            metric: MetricId::EntropyLDiversity,
            severity: Severity::Warning,
            sa: Some(sa.clone()),
            message: format!(
                "lowest class entropy equals ln({entropy_l}); the strict condition H > ln(l) holds only for l = {}",
                entropy_l - 1
            ),
        });
    }
    if skipped_pairs > 0 {
        warnings.push(Warning {
            metric: MetricId::DeltaDisclosure,
            severity: Severity::Note,
            sa: Some(sa.clone()),
            message: format!(
                "{skipped_pairs} (class, value) pair(s) with zero in-class frequency skipped"
            ),
        });
    }

    Ok(SaMetrics {
        sa,
        kind: column.kind(),
        grouping_columns: partition.grouping_columns().to_vec(),
        class_count: partition.len(),
        k,
        alpha,
        l,
        entropy_l,
        min_entropy,
        c,
        basic_beta: beta,
        enhanced_beta: beta,
        t,
        delta,
        warnings,
    })
}

fn auditor<'d, S: AsRef<str>>(
    data: &'d Dataset,
    qi: &[S],
    sa: &[S],
    mode: SaMode,
) -> Result<Auditor<'d>> {
    let schema = AttributeSchema::new(
        qi.iter().map(|s| s.as_ref().to_string()),
        sa.iter().map(|s| s.as_ref().to_string()),
    )
    .with_mode(mode);
    Auditor::new(data, &schema)
}

/// Size of the smallest equivalence class over `qi`.
pub fn k_anonymity<S: AsRef<str>>(data: &Dataset, qi: &[S]) -> Result<usize> {
    auditor(data, qi, &[], SaMode::Generalization)?.k_anonymity()
}

/// Largest in-class frequency of any sensitive value, and the matching k.
pub fn alpha_k_anonymity<S: AsRef<str>>(
    data: &Dataset,
    qi: &[S],
    sa: &[S],
    mode: SaMode,
) -> Result<(f64, usize)> {
    auditor(data, qi, sa, mode)?.alpha_k_anonymity()
}

/// Fewest distinct sensitive values found in any class.
pub fn l_diversity<S: AsRef<str>>(
    data: &Dataset,
    qi: &[S],
    sa: &[S],
    mode: SaMode,
) -> Result<usize> {
    auditor(data, qi, sa, mode)?.l_diversity()
}

pub fn entropy_l_diversity<S: AsRef<str>>(
    data: &Dataset,
    qi: &[S],
    sa: &[S],
    mode: SaMode,
) -> Result<usize> {
    auditor(data, qi, sa, mode)?.entropy_l_diversity()
}

/// `(c, l)` with `l` from [`l_diversity`]; `c` is `None` when `l = 1`.
pub fn recursive_c_l_diversity<S: AsRef<str>>(
    data: &Dataset,
    qi: &[S],
    sa: &[S],
    mode: SaMode,
) -> Result<(Option<usize>, usize)> {
    auditor(data, qi, sa, mode)?.recursive_c_l_diversity()
}

pub fn basic_beta_likeness<S: AsRef<str>>(
    data: &Dataset,
    qi: &[S],
    sa: &[S],
    mode: SaMode,
) -> Result<f64> {
    auditor(data, qi, sa, mode)?.basic_beta_likeness()
}

/// Same beta as [`basic_beta_likeness`]; pairs breaking the `-ln(p)` cap are
/// reported as warnings through [`Auditor::metric`].
pub fn enhanced_beta_likeness<S: AsRef<str>>(
    data: &Dataset,
    qi: &[S],
    sa: &[S],
    mode: SaMode,
) -> Result<f64> {
    auditor(data, qi, sa, mode)?.enhanced_beta_likeness()
}

/// Largest EMD between a class and the whole table. Holds for any t strictly
/// greater than the returned value.
pub fn t_closeness<S: AsRef<str>>(data: &Dataset, qi: &[S], sa: &[S], mode: SaMode) -> Result<f64> {
    auditor(data, qi, sa, mode)?.t_closeness()
}

/// Largest `|ln(p(class, s) / p(table, s))|` over values present in a class.
/// Holds for any delta strictly greater than the returned value.
pub fn delta_disclosure<S: AsRef<str>>(
    data: &Dataset,
    qi: &[S],
    sa: &[S],
    mode: SaMode,
) -> Result<f64> {
    auditor(data, qi, sa, mode)?.delta_disclosure()
}
