//! Confusion-matrix evaluation: per-class and overall scores, classifier
//! rankings, and a search for pairs of scores that order classifiers differently.
//!
//! Every measure is computed from a [`ConfusionMatrix`] whose rows are
//! estimated classes and whose columns are true classes. On top of the
//! measures sit ranking, rank concordance and a seeded search for matrix
//! pairs on which two measures disagree.

pub mod class_measures;
pub mod cli;
pub mod confusion;
pub mod discrepancy;
pub mod error;
pub mod format;
pub mod generate;
pub mod gti;
pub mod measure;
pub mod overall;
pub mod ranking;
pub mod render;
pub mod report;

#[cfg(test)]
mod test_fixtures;

pub use class_measures::{MeanKind, MeasureValue};
pub use confusion::{BinaryCounts, ConfusionMatrix, LabeledDataset, Marginals, WeightMatrix};
pub use error::{Error, Result};
pub use gti::{fit_gti, GtiFit};
pub use measure::{Measure, MeasureContext};
pub use overall::{AgreementResult, ChanceModel, Direction, UndefinedPolicy};
pub use ranking::{ConcordanceMatrix, Ranking, RankingKey};
pub use report::{evaluate_all, EvalConfig, MeasureReport};
