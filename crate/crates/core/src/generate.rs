//! Seeded random confusion matrices for property checks and probes.

use rand::Rng;

use crate::confusion::ConfusionMatrix;

/// Uniformly random split of `total` into `parts` non-negative integers.
pub fn composition<R: Rng + ?Sized>(rng: &mut R, total: u64, parts: usize) -> Vec<u64> {
    let mut cuts: Vec<u64> = (0..parts.saturating_sub(1))
        .map(|_| rng.gen_range(0..=total))
        .collect();
    cuts.sort_unstable();
    let mut out = Vec::with_capacity(parts);
    let mut prev = 0;
    for c in cuts {
        out.push(c - prev);
        prev = c;
    }
    out.push(total - prev);
    out
}

/// A `k x k` integral matrix of total mass `n >= 1` with uniformly random cells.
pub fn random_matrix<R: Rng + ?Sized>(rng: &mut R, k: usize, n: u64) -> ConfusionMatrix {
    assert!(k >= 2 && n >= 1, "need k >= 2 and n >= 1");
    let cells = composition(rng, n, k * k).into_iter().map(|c| c as f64).collect();
    from_rows_flat(k, cells)
}

/// `size` classifiers evaluated on one test set: every matrix shares the
/// same true-class column totals, which sum to `n`.
pub fn random_ensemble<R: Rng + ?Sized>(
    rng: &mut R,
    k: usize,
    n: u64,
    size: usize,
) -> Vec<ConfusionMatrix> {
    assert!(k >= 2 && n >= 1, "need k >= 2 and n >= 1");
    let columns = composition(rng, n, k);
    (0..size)
        .map(|_| {
            let mut cells = vec![0.0; k * k];
            for (j, &col) in columns.iter().enumerate() {
                for (i, c) in composition(rng, col, k).into_iter().enumerate() {
                    cells[i * k + j] = c as f64;
                }
            }
            from_rows_flat(k, cells)
        })
        .collect()
}

fn from_rows_flat(k: usize, cells: Vec<f64>) -> ConfusionMatrix {
    let labels = (0..k).map(|i| format!("c{i}")).collect();
    ConfusionMatrix::new(labels, cells).expect("generated matrix is valid")
}
