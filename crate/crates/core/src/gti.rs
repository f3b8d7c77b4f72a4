//! Ground Truth Index estimation.
//!
//! The classifier is modelled as an infallible component that handles a
//! proportion θ of the instances, plus a random component whose output is
//! quasi-independent of the true class. Off-diagonal cells then come from
//! the random component only, so fitting `R(i, j) = a_i * b_j` to them by
//! iterative proportional scaling and extrapolating `R(i, i)` separates the
//! random hits on the diagonal from the systematic ones.

use crate::class_measures::MeasureValue;
use crate::confusion::ConfusionMatrix;
use crate::error::{Error, Result};

pub const DEFAULT_TOLERANCE: f64 = 1e-9;
pub const DEFAULT_MAX_ITERATIONS: usize = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub struct GtiFit {
    pub theta_overall: f64,
    pub theta_class: Vec<f64>,
    /// Fitted random-component matrix, row-major, diagonal extrapolated.
    pub fitted_random: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// Max absolute change of a fitted off-diagonal cell in the last sweep.
    pub residual: f64,
}

impl GtiFit {
    pub fn k(&self) -> usize {
        self.theta_class.len()
    }

    pub fn fitted(&self, row: usize, col: usize) -> f64 {
        self.fitted_random[row * self.k() + col]
    }

    /// Overall θ; unconverged fits are rejected unless explicitly accepted.
    pub fn overall(&self, accept_unconverged: bool) -> Result<MeasureValue> {
        self.check_converged(accept_unconverged)?;
        Ok(MeasureValue::Defined(self.theta_overall))
    }

    fn check_converged(&self, accept_unconverged: bool) -> Result<()> {
        if !self.converged && !accept_unconverged {
            return Err(Error::GtiNotConverged {
                iterations: self.iterations,
                residual: self.residual,
            });
        }
        Ok(())
    }
}

/// Class-specific θ of a fit.
pub fn gti_class(fit: &GtiFit, class_index: usize, accept_unconverged: bool) -> Result<MeasureValue> {
    if class_index >= fit.k() {
        return Err(Error::ClassIndex {
            index: class_index,
            k: fit.k(),
        });
    }
    fit.check_converged(accept_unconverged)?;
    Ok(MeasureValue::Defined(fit.theta_class[class_index]))
}

/// Fits the quasi-independence model and derives overall and per-class θ.
///
/// Class-specific θ is normalised by the true-class mass `n_{+i}`.
pub fn fit_gti(m: &ConfusionMatrix, tolerance: f64, max_iterations: usize) -> Result<GtiFit> {
    let k = m.k();
    if k < 3 {
        return Err(Error::GtiTooFewClasses);
    }
    if m.is_diagonal() {
        return Err(Error::GtiPerfect);
    }
    if tolerance.is_nan() || tolerance <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "GTI tolerance must be positive, got {tolerance}"
        )));
    }
    if max_iterations == 0 {
        return Err(Error::InvalidParameter("GTI needs at least one iteration".into()));
    }

    let off = |i: usize, j: usize| if i == j { 0.0 } else { m.cell(i, j) };
    let row_targets: Vec<f64> = (0..k).map(|i| (0..k).map(|j| off(i, j)).sum()).collect();
    let col_targets: Vec<f64> = (0..k).map(|j| (0..k).map(|i| off(i, j)).sum()).collect();
    for i in 0..k {
        if row_targets[i] == 0.0 || col_targets[i] == 0.0 {
            return Err(Error::GtiDegenerate(m.labels()[i].clone()));
        }
    }

    let off_mass: f64 = row_targets.iter().sum();
    let start = (off_mass / (k * (k - 1)) as f64).sqrt();
    let mut a = vec![start; k];
    let mut b = vec![start; k];
    let mut fitted = vec![start * start; k * k];

    let mut iterations = 0;
    let mut residual = f64::INFINITY;
    while iterations < max_iterations {
        iterations += 1;
        let b_total: f64 = b.iter().sum();
        for i in 0..k {
            a[i] = row_targets[i] / (b_total - b[i]);
        }
        let a_total: f64 = a.iter().sum();
        for j in 0..k {
            b[j] = col_targets[j] / (a_total - a[j]);
        }
        residual = 0.0;
        for i in 0..k {
            for j in 0..k {
                if i != j {
                    let cell = a[i] * b[j];
                    residual = f64::max(residual, (cell - fitted[i * k + j]).abs());
                    fitted[i * k + j] = cell;
                }
            }
        }
        if residual <= tolerance {
            break;
        }
    }
    let converged = residual <= tolerance;
    for i in 0..k {
        fitted[i * k + i] = a[i] * b[i];
    }

    let mg = m.marginals();
    let theta_class = (0..k)
        .map(|i| {
            if mg.cols[i] == 0.0 {
                0.0
            } else {
                ((m.cell(i, i) - fitted[i * k + i]) / mg.cols[i]).clamp(0.0, 1.0)
            }
        })
        .collect();
    let random_diagonal: f64 = (0..k).map(|i| fitted[i * k + i]).sum();
    let theta_overall = ((m.trace() - random_diagonal) / mg.n).clamp(0.0, 1.0);

    Ok(GtiFit {
        theta_overall,
        theta_class,
        fitted_random: fitted,
        iterations,
        converged,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::test_fixtures::{assert_close, m1, m2, matrix};

    /// Real-valued matrix from the two-component model with per-class θ:
    /// column j has mass n t_j, a share θ_j of it on the diagonal and the
    /// rest spread over rows in proportion to `a`.
    fn model_matrix(theta: &[f64], t: &[f64], a: &[f64], n: f64) -> ConfusionMatrix {
        let k = theta.len();
        let rows: Vec<Vec<f64>> = (0..k)
            .map(|i| {
                (0..k)
                    .map(|j| {
                        let sys = if i == j { theta[j] } else { 0.0 };
                        n * t[j] * (sys + (1.0 - theta[j]) * a[i])
                    })
                    .collect()
            })
            .collect();
        ConfusionMatrix::from_rows(&rows).unwrap()
    }

    #[test]
    fn rejects_two_classes() {
        assert_eq!(fit_gti(&m1(), 1e-9, 100), Err(Error::GtiTooFewClasses));
    }

    #[test]
    fn rejects_perfect_classification() {
        let diag = matrix(&[&[3.0, 0.0, 0.0], &[0.0, 4.0, 0.0], &[0.0, 0.0, 5.0]]);
        assert_eq!(fit_gti(&diag, 1e-9, 100), Err(Error::GtiPerfect));
    }

    #[test]
    fn rejects_degenerate_rows() {
        let m = matrix(&[&[3.0, 0.0, 0.0], &[1.0, 4.0, 2.0], &[1.0, 3.0, 5.0]]);
        assert_eq!(fit_gti(&m, 1e-9, 100), Err(Error::GtiDegenerate("c0".into())));
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(fit_gti(&m2(), 0.0, 100), Err(Error::InvalidParameter(_))));
        assert!(matches!(fit_gti(&m2(), 1e-9, 0), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn exact_model_recovers_theta() {
        let theta = [0.3, 0.5, 0.7, 0.9];
        let t = [0.1, 0.2, 0.3, 0.4];
        let a = [0.4, 0.3, 0.2, 0.1];
        let m = model_matrix(&theta, &t, &a, 1e5);
        let fit = fit_gti(&m, 1e-9, DEFAULT_MAX_ITERATIONS).unwrap();
        assert!(fit.converged);
        for (est, want) in fit.theta_class.iter().zip(theta) {
            assert_close(*est, want, 1e-9);
        }
        let overall: f64 = theta.iter().zip(t).map(|(th, tj)| th * tj).sum();
        assert_close(fit.theta_overall, overall, 1e-9);
    }

    #[test]
    fn fitted_off_diagonal_matches_observed() {
        let fit = fit_gti(&m2(), 1e-10, DEFAULT_MAX_ITERATIONS).unwrap();
        assert!(fit.converged);
        let k = 3;
        let observed: f64 = (0..k)
            .flat_map(|i| (0..k).map(move |j| (i, j)))
            .filter(|(i, j)| i != j)
            .map(|(i, j)| m2().cell(i, j))
            .sum();
        let fitted: f64 = (0..k)
            .flat_map(|i| (0..k).map(move |j| (i, j)))
            .filter(|(i, j)| i != j)
            .map(|(i, j)| fit.fitted(i, j))
            .sum();
        assert_close(fitted, observed, (k * k) as f64 * 1e-10 + 1e-9);
        assert!((0.0..=1.0).contains(&fit.theta_overall));
    }

    #[test]
    fn clamps_below_random_expectation() {
        // class 0 diagonal far below what the random component predicts
        let m = matrix(&[&[1.0, 20.0, 20.0], &[20.0, 30.0, 5.0], &[20.0, 5.0, 30.0]]);
        let fit = fit_gti(&m, 1e-9, DEFAULT_MAX_ITERATIONS).unwrap();
        assert!(fit.fitted(0, 0) > 1.0);
        assert_eq!(gti_class(&fit, 0, false).unwrap(), MeasureValue::Defined(0.0));
    }

    #[test]
    fn unconverged_fit_is_flagged() {
        let fit = fit_gti(&m2(), 1e-300, 2).unwrap();
        assert!(!fit.converged);
        assert_eq!(fit.iterations, 2);
        assert!(matches!(fit.overall(false), Err(Error::GtiNotConverged { .. })));
        assert!(fit.overall(true).is_ok());
        assert!(gti_class(&fit, 0, true).is_ok());
        assert!(matches!(gti_class(&fit, 3, true), Err(Error::ClassIndex { .. })));
    }
}
