//! Confusion matrices and the transforms every measure is built on.
//!
//! Rows are estimated classes, columns are true classes: `cell(i, j)` is the
//! mass of instances the classifier put in class `i` whose true class is `j`.
//! Cells are non-negative reals so weighted matrices flow through the same
//! measures as raw counts.

use std::collections::HashSet;

use crate::error::{Error, Result};

/// Relative tolerance for mass-conservation checks on real-valued matrices.
pub const MASS_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct ConfusionMatrix {
    labels: Vec<String>,
    cells: Vec<f64>,
    integral: bool,
}

/// Per-class decomposition into true/false positives and negatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinaryCounts {
    pub tp: f64,
    pub fp: f64,
    pub fn_: f64,
    pub tn: f64,
}

impl BinaryCounts {
    pub fn total(&self) -> f64 {
        self.tp + self.fp + self.fn_ + self.tn
    }
}

/// Row sums, column sums and total mass of a matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Marginals {
    pub rows: Vec<f64>,
    pub cols: Vec<f64>,
    pub n: f64,
}

impl Marginals {
    /// Indices of estimated classes that were never predicted.
    pub fn empty_rows(&self) -> Vec<usize> {
        zero_positions(&self.rows)
    }

    /// Indices of true classes with no instances.
    pub fn empty_cols(&self) -> Vec<usize> {
        zero_positions(&self.cols)
    }

    pub fn row_proportions(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r / self.n).collect()
    }

    pub fn col_proportions(&self) -> Vec<f64> {
        self.cols.iter().map(|c| c / self.n).collect()
    }
}

fn zero_positions(values: &[f64]) -> Vec<usize> {
    values
        .iter()
        .enumerate()
        .filter(|(_, v)| **v == 0.0)
        .map(|(i, _)| i)
        .collect()
}

/// Cell-wise weights for a confusion matrix, in the same label order.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMatrix {
    k: usize,
    weights: Vec<f64>,
}

impl WeightMatrix {
    pub fn new(k: usize, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != k * k {
            return Err(Error::CellCount {
                expected: k * k,
                found: weights.len(),
            });
        }
        for (idx, &w) in weights.iter().enumerate() {
            if !w.is_finite() || w < 0.0 {
                return Err(Error::InvalidCell {
                    row: idx / k,
                    col: idx % k,
                    value: w,
                });
            }
        }
        if !weights.iter().any(|&w| w > 0.0) {
            return Err(Error::NoPositiveWeight);
        }
        Ok(Self { k, weights })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let k = rows.len();
        Self::new(k, rows.iter().flatten().copied().collect())
    }

    pub fn ones(k: usize) -> Self {
        Self {
            k,
            weights: vec![1.0; k * k],
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.weights[row * self.k + col]
    }
}

/// A sequence of `(true, estimated)` label pairs.
#[derive(Debug, Clone, Default)]
pub struct LabeledDataset {
    pub pairs: Vec<(String, String)>,
    pub universe: Option<Vec<String>>,
}

impl LabeledDataset {
    pub fn new<T: Into<String>, E: Into<String>>(pairs: impl IntoIterator<Item = (T, E)>) -> Self {
        Self {
            pairs: pairs
                .into_iter()
                .map(|(t, e)| (t.into(), e.into()))
                .collect(),
            universe: None,
        }
    }

    pub fn with_universe<S: Into<String>>(mut self, universe: impl IntoIterator<Item = S>) -> Self {
        self.universe = Some(universe.into_iter().map(Into::into).collect());
        self
    }
}

impl ConfusionMatrix {
    /// Builds a matrix from labels and row-major cells.
    pub fn new(labels: Vec<String>, cells: Vec<f64>) -> Result<Self> {
        let k = labels.len();
        if k < 2 {
            return Err(Error::TooFewClasses(k));
        }
        let mut seen = HashSet::with_capacity(k);
        for label in &labels {
            if !seen.insert(label.as_str()) {
                return Err(Error::DuplicateLabel(label.clone()));
            }
        }
        if cells.len() != k * k {
            return Err(Error::CellCount {
                expected: k * k,
                found: cells.len(),
            });
        }
        for (idx, &v) in cells.iter().enumerate() {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidCell {
                    row: idx / k,
                    col: idx % k,
                    value: v,
                });
            }
        }
        if cells.iter().sum::<f64>() <= 0.0 {
            return Err(Error::ZeroMass);
        }
        let integral = cells.iter().all(|v| v.fract() == 0.0);
        Ok(Self {
            labels,
            cells,
            integral,
        })
    }

    /// Builds a matrix from nested rows with generated labels `c0, c1, ...`.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let labels = (0..rows.len()).map(|i| format!("c{i}")).collect();
        Self::new(labels, rows.iter().flatten().copied().collect())
    }

    /// Tallies `(true, estimated)` pairs.
    ///
    /// Label order is the explicit universe when one is given, otherwise the
    /// order of first appearance among the true labels followed by
    /// estimated-only labels in order of first appearance.
    pub fn from_labels(data: &LabeledDataset) -> Result<Self> {
        if data.pairs.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let labels: Vec<String> = match &data.universe {
            Some(universe) => {
                let mut seen = HashSet::new();
                for label in universe {
                    if !seen.insert(label.as_str()) {
                        return Err(Error::DuplicateLabel(label.clone()));
                    }
                }
                for (t, e) in &data.pairs {
                    for label in [t, e] {
                        if !seen.contains(label.as_str()) {
                            return Err(Error::UnknownLabel(label.clone()));
                        }
                    }
                }
                universe.clone()
            }
            None => {
                let mut seen = HashSet::new();
                let mut order = Vec::new();
                let trues = data.pairs.iter().map(|(t, _)| t);
                let estimates = data.pairs.iter().map(|(_, e)| e);
                for label in trues.chain(estimates) {
                    if seen.insert(label.as_str()) {
                        order.push(label.clone());
                    }
                }
                order
            }
        };
        let k = labels.len();
        if k < 2 {
            return Err(Error::TooFewClasses(k));
        }
        let index: std::collections::HashMap<&str, usize> = labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.as_str(), i))
            .collect();
        let mut cells = vec![0.0; k * k];
        for (t, e) in &data.pairs {
            cells[index[e.as_str()] * k + index[t.as_str()]] += 1.0;
        }
        Self::new(labels, cells)
    }

    pub fn k(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label_index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// True when every cell is a whole number.
    pub fn is_integral(&self) -> bool {
        self.integral
    }

    pub fn cell(&self, row: usize, col: usize) -> f64 {
        self.cells[row * self.k() + col]
    }

    pub fn cells(&self) -> &[f64] {
        &self.cells
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.cells.chunks(self.k())
    }

    pub fn total(&self) -> f64 {
        self.cells.iter().sum()
    }

    pub fn trace(&self) -> f64 {
        (0..self.k()).map(|i| self.cell(i, i)).sum()
    }

    pub fn is_diagonal(&self) -> bool {
        let k = self.k();
        (0..k).all(|i| (0..k).all(|j| i == j || self.cell(i, j) == 0.0))
    }

    pub fn marginals(&self) -> Marginals {
        let k = self.k();
        let rows = self.rows().map(|r| r.iter().sum()).collect();
        let cols = (0..k).map(|j| (0..k).map(|i| self.cell(i, j)).sum()).collect();
        Marginals {
            rows,
            cols,
            n: self.total(),
        }
    }

    pub fn check_class(&self, class_index: usize) -> Result<()> {
        if class_index >= self.k() {
            return Err(Error::ClassIndex {
                index: class_index,
                k: self.k(),
            });
        }
        Ok(())
    }

    pub fn binary_counts(&self, class_index: usize) -> Result<BinaryCounts> {
        self.check_class(class_index)?;
        let k = self.k();
        let i = class_index;
        let tp = self.cell(i, i);
        let row: f64 = (0..k).map(|j| self.cell(i, j)).sum();
        let col: f64 = (0..k).map(|r| self.cell(r, i)).sum();
        let fp = row - tp;
        let fn_ = col - tp;
        let tn = self.total() - tp - fp - fn_;
        // Rounding on weighted matrices can leave a tiny negative residue.
        let tn = if tn < 0.0 && -tn <= MASS_TOLERANCE * self.total() {
            0.0
        } else {
            tn
        };
        Ok(BinaryCounts { tp, fp, fn_, tn })
    }

    /// Merges every class except `class_index` into a single "rest" class.
    pub fn collapse_one_vs_rest(&self, class_index: usize) -> Result<ConfusionMatrix> {
        let c = self.binary_counts(class_index)?;
        let target = self.labels[class_index].clone();
        let mut rest = String::from("rest");
        while rest == target {
            rest.insert(0, '~');
        }
        Self::new(vec![target, rest], vec![c.tp, c.fp, c.fn_, c.tn])
    }

    /// Cell-wise product with a weight matrix.
    pub fn apply_weights(&self, weights: &WeightMatrix) -> Result<ConfusionMatrix> {
        if weights.k() != self.k() {
            return Err(Error::Dimension {
                expected: self.k(),
                found: weights.k(),
            });
        }
        let k = self.k();
        let cells = self
            .cells
            .iter()
            .enumerate()
            .map(|(idx, v)| v * weights.get(idx / k, idx % k))
            .collect();
        Self::new(self.labels.clone(), cells)
    }

    /// Multiplies every cell by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> Result<ConfusionMatrix> {
        if !(factor.is_finite() && factor > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "scale factor must be positive, got {factor}"
            )));
        }
        Self::new(
            self.labels.clone(),
            self.cells.iter().map(|v| v * factor).collect(),
        )
    }

    pub fn transposed(&self) -> ConfusionMatrix {
        let k = self.k();
        let cells = (0..k * k).map(|idx| self.cell(idx % k, idx / k)).collect();
        Self::new(self.labels.clone(), cells).expect("transpose preserves validity")
    }

    /// Relabels classes so that new class `p` is old class `order[p]`,
    /// applied consistently to rows and columns.
    pub fn permuted(&self, order: &[usize]) -> Result<ConfusionMatrix> {
        let k = self.k();
        check_permutation(order, k)?;
        let labels = order.iter().map(|&o| self.labels[o].clone()).collect();
        let cells = (0..k * k)
            .map(|idx| self.cell(order[idx / k], order[idx % k]))
            .collect();
        Self::new(labels, cells)
    }

    /// Permutes rows only, keeping the column (true class) order.
    pub fn rows_permuted(&self, order: &[usize]) -> Result<ConfusionMatrix> {
        let k = self.k();
        check_permutation(order, k)?;
        let cells = (0..k * k)
            .map(|idx| self.cell(order[idx / k], idx % k))
            .collect();
        Self::new(self.labels.clone(), cells)
    }

    /// Reorders this matrix to follow `labels`, which must be the same set.
    pub fn reordered(&self, labels: &[String]) -> Result<ConfusionMatrix> {
        if labels.len() != self.k() {
            return Err(Error::Dimension {
                expected: self.k(),
                found: labels.len(),
            });
        }
        let order = labels
            .iter()
            .map(|l| self.label_index(l).ok_or_else(|| Error::UnknownLabel(l.clone())))
            .collect::<Result<Vec<_>>>()?;
        self.permuted(&order)
    }
}

fn check_permutation(order: &[usize], k: usize) -> Result<()> {
    let mut seen = vec![false; k];
    if order.len() != k {
        return Err(Error::InvalidParameter(format!(
            "permutation has length {}, expected {k}",
            order.len()
        )));
    }
    for &o in order {
        if o >= k || seen[o] {
            return Err(Error::InvalidParameter(format!("invalid permutation {order:?}")));
        }
        seen[o] = true;
    }
    Ok(())
}
