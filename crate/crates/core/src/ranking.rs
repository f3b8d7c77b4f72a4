//! Ranking classifiers on a shared test set and measuring how far two
//! measures agree on the resulting order.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::measure::Measure;
use crate::report::MeasureReport;

pub const DEFAULT_TIE_TOLERANCE: f64 = 1e-9;

/// A measure, plus the class it is evaluated on for class-specific measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RankingKey {
    pub measure: Measure,
    pub class: Option<usize>,
}

impl RankingKey {
    pub fn overall(measure: Measure) -> Self {
        Self { measure, class: None }
    }

    pub fn class(measure: Measure, class: usize) -> Self {
        Self {
            measure,
            class: Some(class),
        }
    }

    /// `measure` or `measure@label`.
    pub fn display(&self, labels: &[String]) -> String {
        match self.class {
            None => self.measure.id(),
            Some(i) => format!(
                "{}@{}",
                self.measure.id(),
                labels.get(i).map(String::as_str).unwrap_or("?")
            ),
        }
    }
}

/// Tie groups of classifier ids, best first.
#[derive(Debug, Clone, PartialEq)]
pub struct Ranking {
    pub key: RankingKey,
    pub groups: Vec<Vec<String>>,
    /// Classifiers whose value is undefined or failed.
    pub unrankable: Vec<String>,
    pub tolerance: f64,
}

impl Ranking {
    /// Tie-group index of every rankable classifier.
    pub fn positions(&self) -> HashMap<&str, usize> {
        self.groups
            .iter()
            .enumerate()
            .flat_map(|(g, ids)| ids.iter().map(move |id| (id.as_str(), g)))
            .collect()
    }

    /// Same tie groups in the same order, and the same unrankable set.
    pub fn same_order(&self, other: &Ranking) -> bool {
        self.groups == other.groups && self.unrankable == other.unrankable
    }
}

impl fmt::Display for Ranking {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let groups: Vec<String> = self
            .groups
            .iter()
            .map(|g| format!("[{}]", g.join(", ")))
            .collect();
        write!(f, "{}", groups.join(" "))?;
        if !self.unrankable.is_empty() {
            write!(f, " unrankable [{}]", self.unrankable.join(", "))?;
        }
        Ok(())
    }
}

/// Orders `(id, value)` pairs by descending value.
///
/// A new tie group starts whenever the gap to the previous value exceeds
/// `tolerance`; ids inside a group are sorted. Missing values go to the
/// returned unrankable list.
pub fn rank_values(items: &[(String, Option<f64>)], tolerance: f64) -> (Vec<Vec<String>>, Vec<String>) {
    let mut defined: Vec<(&str, f64)> = Vec::new();
    let mut unrankable: Vec<String> = Vec::new();
    for (id, value) in items {
        match value {
            Some(v) if v.is_finite() => defined.push((id, *v)),
            _ => unrankable.push(id.clone()),
        }
    }
    defined.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    let mut groups: Vec<Vec<String>> = Vec::new();
    let mut previous: Option<f64> = None;
    for (id, v) in defined {
        match previous {
            Some(p) if p - v <= tolerance => groups.last_mut().expect("open group").push(id.to_string()),
            _ => groups.push(vec![id.to_string()]),
        }
        previous = Some(v);
    }
    for g in &mut groups {
        g.sort();
    }
    unrankable.sort();
    (groups, unrankable)
}

/// Ranks classifiers by one measure, best first.
pub fn rank(reports: &[MeasureReport], key: RankingKey, tolerance: f64) -> Result<Ranking> {
    if reports.len() < 2 {
        return Err(Error::TooFewClassifiers {
            needed: 2,
            found: reports.len(),
        });
    }
    if key.measure.is_class_specific() != key.class.is_some() {
        return Err(Error::InvalidParameter(if key.class.is_some() {
            format!("{} is an overall measure", key.measure)
        } else {
            format!("{} needs a class index", key.measure)
        }));
    }
    let mut items = Vec::with_capacity(reports.len());
    for r in reports {
        if r.outcome(key.measure, key.class).is_none() {
            return Err(Error::UnknownMeasure(key.display(&r.labels)));
        }
        items.push((r.classifier.clone(), r.value(key.measure, key.class)));
    }
    let (groups, unrankable) = rank_values(&items, tolerance);
    Ok(Ranking {
        key,
        groups,
        unrankable,
        tolerance,
    })
}

/// Kendall's tau-b between two rankings over the classifiers both rank.
///
/// Returns `None` when either ranking is constant on the shared set, where
/// tau-b has a zero denominator.
pub fn tau_b(a: &Ranking, b: &Ranking) -> Option<f64> {
    let pa = a.positions();
    let pb = b.positions();
    let mut shared: Vec<(usize, usize)> = pa
        .iter()
        .filter_map(|(id, &x)| pb.get(id).map(|&y| (x, y)))
        .collect();
    shared.sort();
    tau_b_pairs(&shared)
}

fn tau_b_pairs(points: &[(usize, usize)]) -> Option<f64> {
    let n = points.len();
    let (mut concordant, mut discordant, mut ties_a, mut ties_b) = (0i64, 0i64, 0i64, 0i64);
    for i in 0..n {
        for j in i + 1..n {
            let dx = (points[i].0 as i64 - points[j].0 as i64).signum();
            let dy = (points[i].1 as i64 - points[j].1 as i64).signum();
            if dx == 0 {
                ties_a += 1;
            }
            if dy == 0 {
                ties_b += 1;
            }
            match dx * dy {
                1 => concordant += 1,
                -1 => discordant += 1,
                _ => {}
            }
        }
    }
    let pairs = (n * n.saturating_sub(1) / 2) as i64;
    let denom = ((pairs - ties_a) as f64 * (pairs - ties_b) as f64).sqrt();
    if denom == 0.0 {
        None
    } else {
        Some((concordant - discordant) as f64 / denom)
    }
}

/// Pairwise tau-b and identical-order mask over a list of ranking keys.
#[derive(Debug, Clone, PartialEq)]
pub struct ConcordanceMatrix {
    pub keys: Vec<RankingKey>,
    /// Classifiers rankable under every key, in input order.
    pub classifiers: Vec<String>,
    tau: Vec<f64>,
    identical: Vec<bool>,
}

impl ConcordanceMatrix {
    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn tau(&self, a: usize, b: usize) -> f64 {
        self.tau[a * self.len() + b]
    }

    pub fn identical(&self, a: usize, b: usize) -> bool {
        self.identical[a * self.len() + b]
    }
}

/// Concordance over the classifiers rankable under every key.
///
/// When tau-b is undefined because a ranking is a single tie group, the
/// entry is 1 for identical rankings and 0 otherwise.
pub fn concordance(reports: &[MeasureReport], keys: &[RankingKey], tolerance: f64) -> Result<ConcordanceMatrix> {
    let full = keys
        .iter()
        .map(|&k| rank(reports, k, tolerance))
        .collect::<Result<Vec<_>>>()?;
    let rankable: Vec<&MeasureReport> = reports
        .iter()
        .filter(|r| full.iter().all(|rk| !rk.unrankable.contains(&r.classifier)))
        .collect();
    if rankable.len() < 2 {
        return Err(Error::TooFewClassifiers {
            needed: 2,
            found: rankable.len(),
        });
    }
    let subset: Vec<MeasureReport> = rankable.iter().map(|r| (*r).clone()).collect();
    let rankings = keys
        .iter()
        .map(|&k| rank(&subset, k, tolerance))
        .collect::<Result<Vec<_>>>()?;
    let n = keys.len();
    let mut tau = vec![0.0; n * n];
    let mut identical = vec![false; n * n];
    for a in 0..n {
        for b in 0..n {
            let same = rankings[a].same_order(&rankings[b]);
            identical[a * n + b] = same;
            tau[a * n + b] = if a == b {
                1.0
            } else {
                tau_b(&rankings[a], &rankings[b]).unwrap_or(if same { 1.0 } else { 0.0 })
            };
        }
    }
    Ok(ConcordanceMatrix {
        keys: keys.to_vec(),
        classifiers: subset.into_iter().map(|r| r.classifier).collect(),
        tau,
        identical,
    })
}

/// Partitions rankings into groups that induce exactly the same order,
/// keeping first-appearance order.
pub fn identical_groups(rankings: &[Ranking]) -> Vec<Vec<RankingKey>> {
    let mut groups: Vec<(usize, Vec<RankingKey>)> = Vec::new();
    for (idx, r) in rankings.iter().enumerate() {
        match groups.iter_mut().find(|(rep, _)| rankings[*rep].same_order(r)) {
            Some((_, members)) => members.push(r.key),
            None => groups.push((idx, vec![r.key])),
        }
    }
    groups.into_iter().map(|(_, members)| members).collect()
}

/// Maps `value` affinely from the interval `from` onto the interval `to`.
pub fn rescale(value: f64, from: (f64, f64), to: (f64, f64)) -> f64 {
    to.0 + (value - from.0) * (to.1 - to.0) / (from.1 - from.0)
}
