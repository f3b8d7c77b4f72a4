//! Whole-matrix measures: success rate, CSI, chance-corrected agreement and
//! a representative set of nominal association measures.
//!
//! The association measures are reported for contrast only. They reach
//! their maximum on perfect misclassification as readily as on perfect
//! classification, so they do not measure accuracy.

use crate::class_measures::{icsi, MeasureValue};
use crate::confusion::ConfusionMatrix;
use crate::error::{Error, Result};

/// Tolerance on the sum of externally supplied class priors.
pub const PRIOR_TOLERANCE: f64 = 1e-9;

/// Observed proportion of correctly classified mass.
pub fn osr(m: &ConfusionMatrix) -> MeasureValue {
    MeasureValue::ratio(m.trace(), m.total(), "n = 0")
}

/// How CSI treats classes whose ICSI is undefined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum UndefinedPolicy {
    #[default]
    Fail,
    Exclude,
}

/// Classification success index: the mean ICSI over all classes.
pub fn csi(m: &ConfusionMatrix, policy: UndefinedPolicy) -> Result<MeasureValue> {
    let mut sum = 0.0;
    let mut count = 0usize;
    for i in 0..m.k() {
        match icsi(m, i)? {
            MeasureValue::Defined(v) => {
                sum += v;
                count += 1;
            }
            MeasureValue::Undefined(cause) => {
                if policy == UndefinedPolicy::Fail {
                    return Err(Error::UndefinedConstituent { class: i, cause });
                }
            }
        }
    }
    Ok(MeasureValue::ratio(sum, count as f64, "no defined ICSI"))
}

/// Chance agreement model for the `(P_o - P_e) / (1 - P_e)` family.
#[derive(Debug, Clone, PartialEq)]
pub enum ChanceModel {
    /// Cohen: `P_e = sum_i p_{i+} p_{+i}`.
    CohenMarginals,
    /// Scott: `P_e = sum_i p_i^2`, from external class priors when given,
    /// otherwise from the test-set true-class proportions.
    ScottPriors(Option<Vec<f64>>),
    /// Maxwell: `P_e = 1 / k`.
    MaxwellUniform,
}

impl ChanceModel {
    pub fn name(&self) -> &'static str {
        match self {
            ChanceModel::CohenMarginals => "cohen",
            ChanceModel::ScottPriors(_) => "scott",
            ChanceModel::MaxwellUniform => "maxwell",
        }
    }

    /// Checks external priors: length `k`, non-negative, summing to one.
    pub fn validate(&self, k: usize) -> Result<()> {
        if let ChanceModel::ScottPriors(Some(priors)) = self {
            if priors.len() != k {
                return Err(Error::InvalidPriors(format!(
                    "expected {k} proportions, found {}",
                    priors.len()
                )));
            }
            if priors.iter().any(|p| !p.is_finite() || *p < 0.0) {
                return Err(Error::InvalidPriors("proportions must be non-negative".into()));
            }
            let sum: f64 = priors.iter().sum();
            if (sum - 1.0).abs() > PRIOR_TOLERANCE {
                return Err(Error::InvalidPriors(format!(
                    "proportions sum to {sum}, expected 1"
                )));
            }
        }
        Ok(())
    }

    pub fn expected_agreement(&self, m: &ConfusionMatrix) -> Result<f64> {
        self.validate(m.k())?;
        let mg = m.marginals();
        let p_e = match self {
            ChanceModel::CohenMarginals => mg
                .row_proportions()
                .iter()
                .zip(mg.col_proportions())
                .map(|(r, c)| r * c)
                .sum(),
            ChanceModel::ScottPriors(Some(priors)) => priors.iter().map(|p| p * p).sum(),
            ChanceModel::ScottPriors(None) => mg.col_proportions().iter().map(|p| p * p).sum(),
            ChanceModel::MaxwellUniform => 1.0 / m.k() as f64,
        };
        Ok(p_e)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AgreementResult {
    pub value: f64,
    pub p_o: f64,
    pub p_e: f64,
    pub model: ChanceModel,
}

/// Chance-corrected agreement with `P_o = OSR`.
pub fn agreement(m: &ConfusionMatrix, model: &ChanceModel) -> Result<AgreementResult> {
    let p_o = m.trace() / m.total();
    let p_e = model.expected_agreement(m)?;
    if 1.0 - p_e <= 1e-12 {
        return Err(Error::ChanceSaturated);
    }
    Ok(AgreementResult {
        value: (p_o - p_e) / (1.0 - p_e),
        p_o,
        p_e,
        model: model.clone(),
    })
}

/// Which variable an asymmetric association measure predicts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Estimated class (rows) predicted from the true class (columns).
    EstimatedGivenTrue,
    /// True class (columns) predicted from the estimated class (rows).
    TrueGivenEstimated,
}

const DEGENERATE: &str = "fewer than two non-empty rows or columns";

fn non_empty(values: &[f64]) -> usize {
    values.iter().filter(|v| **v > 0.0).count()
}

fn is_degenerate(m: &ConfusionMatrix) -> bool {
    let mg = m.marginals();
    non_empty(&mg.rows).min(non_empty(&mg.cols)) < 2
}

/// Pearson's chi-square statistic against the independence model.
pub fn chi_square(m: &ConfusionMatrix) -> f64 {
    let mg = m.marginals();
    let k = m.k();
    let mut chi = 0.0;
    for i in 0..k {
        for j in 0..k {
            let expected = mg.rows[i] * mg.cols[j] / mg.n;
            if expected > 0.0 {
                let d = m.cell(i, j) - expected;
                chi += d * d / expected;
            }
        }
    }
    chi
}

pub fn phi(m: &ConfusionMatrix) -> Result<MeasureValue> {
    if m.k() != 2 {
        return Err(Error::RequiresBinary {
            measure: "phi",
            k: m.k(),
        });
    }
    if is_degenerate(m) {
        return Ok(MeasureValue::Undefined(DEGENERATE));
    }
    Ok(MeasureValue::Defined(
        (chi_square(m) / m.total()).sqrt().min(1.0),
    ))
}

/// Cramér's V, using the number of non-empty rows and columns.
pub fn cramers_v(m: &ConfusionMatrix) -> MeasureValue {
    let mg = m.marginals();
    let dim = non_empty(&mg.rows).min(non_empty(&mg.cols));
    if dim < 2 {
        return MeasureValue::Undefined(DEGENERATE);
    }
    let v = (chi_square(m) / (mg.n * (dim - 1) as f64)).sqrt();
    MeasureValue::Defined(v.min(1.0))
}

fn entropy(proportions: &[f64]) -> f64 {
    proportions
        .iter()
        .filter(|p| **p > 0.0)
        .map(|p| -p * p.ln())
        .sum()
}

/// Mutual information between estimated and true classes, in nats.
pub fn mutual_information(m: &ConfusionMatrix) -> f64 {
    let mg = m.marginals();
    let k = m.k();
    let mut mi = 0.0;
    for i in 0..k {
        for j in 0..k {
            let p = m.cell(i, j) / mg.n;
            if p > 0.0 {
                let pr = mg.rows[i] / mg.n;
                let pc = mg.cols[j] / mg.n;
                mi += p * (p / (pr * pc)).ln();
            }
        }
    }
    mi.max(0.0)
}

/// Theil's uncertainty coefficient: mutual information over the entropy of
/// the predicted variable.
pub fn theil_u(m: &ConfusionMatrix, direction: Direction) -> MeasureValue {
    let mg = m.marginals();
    let target = match direction {
        Direction::EstimatedGivenTrue => mg.row_proportions(),
        Direction::TrueGivenEstimated => mg.col_proportions(),
    };
    let h = entropy(&target);
    if h <= 0.0 {
        return MeasureValue::Undefined("entropy of predicted variable = 0");
    }
    MeasureValue::Defined((mutual_information(m) / h).clamp(0.0, 1.0))
}

/// Goodman and Kruskal's lambda: proportional reduction in modal
/// prediction error.
pub fn gk_lambda(m: &ConfusionMatrix, direction: Direction) -> MeasureValue {
    let k = m.k();
    let mg = m.marginals();
    let (best_given, best_marginal) = match direction {
        Direction::EstimatedGivenTrue => {
            let per_col: f64 = (0..k)
                .map(|j| (0..k).map(|i| m.cell(i, j)).fold(0.0, f64::max))
                .sum();
            (per_col, mg.rows.iter().copied().fold(0.0, f64::max))
        }
        Direction::TrueGivenEstimated => {
            let per_row: f64 = (0..k)
                .map(|i| (0..k).map(|j| m.cell(i, j)).fold(0.0, f64::max))
                .sum();
            (per_row, mg.cols.iter().copied().fold(0.0, f64::max))
        }
    };
    MeasureValue::ratio(
        best_given - best_marginal,
        mg.n - best_marginal,
        "n - modal marginal = 0",
    )
    .map(|v| v.clamp(0.0, 1.0))
}
