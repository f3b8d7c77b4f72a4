//! Evaluation of every selected measure on one classifier's matrix.

use crate::class_measures::MeasureValue;
use crate::confusion::{ConfusionMatrix, WeightMatrix};
use crate::error::{Error, Result};
use crate::gti::GtiFit;
use crate::measure::{GtiCache, Measure, MeasureContext};

#[derive(Debug, Clone, PartialEq)]
pub struct EvalConfig {
    pub measures: Vec<Measure>,
    pub context: MeasureContext,
    pub weights: Option<WeightMatrix>,
    /// Restricts class-specific measures to one class; all classes otherwise.
    pub target_class: Option<usize>,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            measures: Measure::all(),
            context: MeasureContext::default(),
            weights: None,
            target_class: None,
        }
    }
}

pub type Outcome = std::result::Result<MeasureValue, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum EntryValues {
    Overall(Outcome),
    PerClass(Vec<(usize, Outcome)>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportEntry {
    pub measure: Measure,
    pub values: EntryValues,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasureReport {
    pub classifier: String,
    pub labels: Vec<String>,
    /// Total mass of the evaluated matrix (after weighting).
    pub n: f64,
    pub integral: bool,
    pub weighted: bool,
    pub scott_priors: Option<Vec<f64>>,
    /// GTI fit, present when a GTI measure was requested.
    pub gti: Option<Result<GtiFit>>,
    pub entries: Vec<ReportEntry>,
}

impl MeasureReport {
    pub fn k(&self) -> usize {
        self.labels.len()
    }

    pub fn entry(&self, measure: Measure) -> Option<&ReportEntry> {
        self.entries.iter().find(|e| e.measure == measure)
    }

    /// Looks up one outcome; `None` when the measure or class was not evaluated.
    pub fn outcome(&self, measure: Measure, class_index: Option<usize>) -> Option<&Outcome> {
        match (&self.entry(measure)?.values, class_index) {
            (EntryValues::Overall(o), None) => Some(o),
            (EntryValues::PerClass(values), Some(i)) => {
                values.iter().find(|(c, _)| *c == i).map(|(_, o)| o)
            }
            _ => None,
        }
    }

    /// Defined value of a measure, or `None` if it is undefined or failed.
    pub fn value(&self, measure: Measure, class_index: Option<usize>) -> Option<f64> {
        match self.outcome(measure, class_index)? {
            Ok(v) => v.value(),
            Err(_) => None,
        }
    }

    /// Entries compared without metadata.
    pub fn same_values(&self, other: &MeasureReport) -> bool {
        self.labels == other.labels && self.entries == other.entries
    }
}

/// Evaluates every configured measure. Measure failures are recorded in
/// their entry and never abort the report.
pub fn evaluate_all(
    classifier: &str,
    m: &ConfusionMatrix,
    config: &EvalConfig,
) -> Result<MeasureReport> {
    let weighted_matrix;
    let m = match &config.weights {
        Some(w) => {
            weighted_matrix = m.apply_weights(w)?;
            &weighted_matrix
        }
        None => m,
    };
    if let Some(i) = config.target_class {
        m.check_class(i)?;
    }
    let ctx = &config.context;
    let mut cache = GtiCache::default();
    let mut entries = Vec::with_capacity(config.measures.len());
    let mut seen = Vec::new();
    for &measure in &config.measures {
        if seen.contains(&measure) {
            continue;
        }
        seen.push(measure);
        let values = if measure.is_class_specific() {
            let classes: Vec<usize> = match config.target_class {
                Some(i) => vec![i],
                None => (0..m.k()).collect(),
            };
            EntryValues::PerClass(
                classes
                    .into_iter()
                    .map(|i| (i, measure.evaluate_cached(m, Some(i), ctx, &mut cache)))
                    .collect(),
            )
        } else {
            EntryValues::Overall(measure.evaluate_cached(m, None, ctx, &mut cache))
        };
        entries.push(ReportEntry { measure, values });
    }
    Ok(MeasureReport {
        classifier: classifier.to_string(),
        labels: m.labels().to_vec(),
        n: m.total(),
        integral: m.is_integral(),
        weighted: config.weights.is_some(),
        scott_priors: ctx.scott_priors.clone(),
        gti: cache.result().cloned(),
        entries,
    })
}
