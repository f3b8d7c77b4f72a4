//! Class-specific measures built from the marginal rates of one class.

use std::fmt;
use std::str::FromStr;

use crate::confusion::{BinaryCounts, ConfusionMatrix};
use crate::error::{Error, Result};

/// A measure value, or the distinguished undefined state caused by a zero
/// denominator. The payload names the vanishing denominator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MeasureValue {
    Defined(f64),
    Undefined(&'static str),
}

impl MeasureValue {
    pub fn ratio(num: f64, den: f64, cause: &'static str) -> Self {
        if den == 0.0 {
            MeasureValue::Undefined(cause)
        } else {
            MeasureValue::Defined(num / den)
        }
    }

    pub fn value(&self) -> Option<f64> {
        match *self {
            MeasureValue::Defined(v) => Some(v),
            MeasureValue::Undefined(_) => None,
        }
    }

    pub fn is_defined(&self) -> bool {
        matches!(self, MeasureValue::Defined(_))
    }

    pub fn map(self, f: impl FnOnce(f64) -> f64) -> Self {
        match self {
            MeasureValue::Defined(v) => MeasureValue::Defined(f(v)),
            undefined => undefined,
        }
    }

    /// Combines two values, propagating the first undefined operand.
    pub fn zip(self, other: Self, f: impl FnOnce(f64, f64) -> f64) -> Self {
        match (self, other) {
            (MeasureValue::Defined(a), MeasureValue::Defined(b)) => MeasureValue::Defined(f(a, b)),
            (MeasureValue::Undefined(c), _) | (_, MeasureValue::Undefined(c)) => {
                MeasureValue::Undefined(c)
            }
        }
    }
}

/// Two-operand combinations of TPR and PPV, in increasing order of value
/// for operands in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MeanKind {
    Product,
    Minimum,
    Harmonic,
    Geometric,
    Arithmetic,
    Quadratic,
    Maximum,
}

impl MeanKind {
    pub const ALL: [MeanKind; 7] = [
        MeanKind::Product,
        MeanKind::Minimum,
        MeanKind::Harmonic,
        MeanKind::Geometric,
        MeanKind::Arithmetic,
        MeanKind::Quadratic,
        MeanKind::Maximum,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            MeanKind::Product => "product",
            MeanKind::Minimum => "minimum",
            MeanKind::Harmonic => "harmonic",
            MeanKind::Geometric => "geometric",
            MeanKind::Arithmetic => "arithmetic",
            MeanKind::Quadratic => "quadratic",
            MeanKind::Maximum => "maximum",
        }
    }

    pub fn apply(&self, a: f64, b: f64) -> f64 {
        match self {
            MeanKind::Product => a * b,
            MeanKind::Minimum => a.min(b),
            MeanKind::Harmonic => {
                if a + b == 0.0 {
                    0.0
                } else {
                    2.0 * a * b / (a + b)
                }
            }
            MeanKind::Geometric => (a * b).sqrt(),
            MeanKind::Arithmetic => (a + b) / 2.0,
            MeanKind::Quadratic => ((a * a + b * b) / 2.0).sqrt(),
            MeanKind::Maximum => a.max(b),
        }
    }
}

impl fmt::Display for MeanKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MeanKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MeanKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::UnknownMeasure(s.to_string()))
    }
}

fn counts(m: &ConfusionMatrix, i: usize) -> Result<BinaryCounts> {
    m.binary_counts(i)
}

/// Sensitivity: `tp / (tp + fn)`.
pub fn tpr(m: &ConfusionMatrix, i: usize) -> Result<MeasureValue> {
    let c = counts(m, i)?;
    Ok(MeasureValue::ratio(c.tp, c.tp + c.fn_, "tp+fn = 0"))
}

/// Specificity: `tn / (tn + fp)`.
pub fn tnr(m: &ConfusionMatrix, i: usize) -> Result<MeasureValue> {
    let c = counts(m, i)?;
    Ok(MeasureValue::ratio(c.tn, c.tn + c.fp, "tn+fp = 0"))
}

/// Precision: `tp / (tp + fp)`.
pub fn ppv(m: &ConfusionMatrix, i: usize) -> Result<MeasureValue> {
    let c = counts(m, i)?;
    Ok(MeasureValue::ratio(c.tp, c.tp + c.fp, "tp+fp = 0"))
}

pub fn npv(m: &ConfusionMatrix, i: usize) -> Result<MeasureValue> {
    let c = counts(m, i)?;
    Ok(MeasureValue::ratio(c.tn, c.tn + c.fn_, "tn+fn = 0"))
}

/// Balanced F-measure, evaluated from counts so that a class with `tp > 0`
/// always gets a value.
pub fn f_measure(m: &ConfusionMatrix, i: usize) -> Result<MeasureValue> {
    let c = counts(m, i)?;
    Ok(MeasureValue::ratio(
        2.0 * c.tp,
        2.0 * c.tp + c.fn_ + c.fp,
        "2tp+fn+fp = 0",
    ))
}

pub fn jaccard(m: &ConfusionMatrix, i: usize) -> Result<MeasureValue> {
    let c = counts(m, i)?;
    Ok(MeasureValue::ratio(c.tp, c.tp + c.fp + c.fn_, "tp+fp+fn = 0"))
}

/// Individual classification success index, `ppv + tpr - 1`, in `[-1, 1]`.
pub fn icsi(m: &ConfusionMatrix, i: usize) -> Result<MeasureValue> {
    Ok(ppv(m, i)?.zip(tpr(m, i)?, |p, t| p + t - 1.0))
}

pub fn kulczynski(m: &ConfusionMatrix, i: usize) -> Result<MeasureValue> {
    combine(m, i, MeanKind::Arithmetic)
}

/// Combination of TPR and PPV selected by `kind`.
pub fn combine(m: &ConfusionMatrix, i: usize, kind: MeanKind) -> Result<MeasureValue> {
    Ok(tpr(m, i)?.zip(ppv(m, i)?, |t, p| kind.apply(t, p)))
}
