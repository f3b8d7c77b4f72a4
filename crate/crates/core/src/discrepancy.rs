//! Seeded random search for matrix pairs two measures order oppositely.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::confusion::ConfusionMatrix;
use crate::generate::random_matrix;
use crate::measure::{Measure, MeasureContext};

/// Number of independent sub-budgets searched in parallel.
const CHUNKS: u64 = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorConfig {
    pub k: usize,
    /// Total mass of every generated matrix.
    pub n: u64,
    /// Class evaluated for class-specific measures.
    pub class_index: usize,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        Self {
            k: 2,
            n: 100,
            class_index: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub first: ConfusionMatrix,
    pub second: ConfusionMatrix,
    /// Values of measure A on (first, second).
    pub a_values: (f64, f64),
    /// Values of measure B on (first, second).
    pub b_values: (f64, f64),
    /// Sub-budget and sample position the witness was drawn at.
    pub chunk: u64,
    pub sample: u64,
}

/// Draws up to `budget` matrix pairs and returns the first pair, in
/// sub-budget order, where `a` and `b` strictly disagree on the order.
///
/// Pairs where either measure is undefined are skipped. The outcome depends
/// only on the arguments, not on thread scheduling.
pub fn find_discrepancy(
    a: Measure,
    b: Measure,
    generator: &GeneratorConfig,
    ctx: &MeasureContext,
    budget: u64,
    seed: u64,
    tie_tolerance: f64,
) -> Option<Witness> {
    let per_chunk = budget / CHUNKS;
    let extra = budget % CHUNKS;
    let class = |m: Measure| m.is_class_specific().then_some(generator.class_index);
    let eval = |m: Measure, mat: &ConfusionMatrix| {
        m.evaluate(mat, class(m), ctx).ok().and_then(|v| v.value())
    };
    (0..CHUNKS)
        .into_par_iter()
        .map(|chunk| {
            let samples = per_chunk + u64::from(chunk < extra);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(chunk);
            for sample in 0..samples {
                let first = random_matrix(&mut rng, generator.k, generator.n);
                let second = random_matrix(&mut rng, generator.k, generator.n);
                let (Some(a1), Some(a2), Some(b1), Some(b2)) = (
                    eval(a, &first),
                    eval(a, &second),
                    eval(b, &first),
                    eval(b, &second),
                ) else {
                    continue;
                };
                let da = a1 - a2;
                let db = b1 - b2;
                let opposite = (da > tie_tolerance && db < -tie_tolerance)
                    || (da < -tie_tolerance && db > tie_tolerance);
                if opposite {
                    return Some(Witness {
                        first,
                        second,
                        a_values: (a1, a2),
                        b_values: (b1, b2),
                        chunk,
                        sample,
                    });
                }
            }
            None
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .next()
}
