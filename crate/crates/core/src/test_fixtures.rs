use crate::confusion::ConfusionMatrix;

pub fn m1() -> ConfusionMatrix {
    ConfusionMatrix::from_rows(&[vec![40.0, 10.0], vec![5.0, 45.0]]).unwrap()
}

pub fn m2() -> ConfusionMatrix {
    ConfusionMatrix::from_rows(&[
        vec![30.0, 2.0, 3.0],
        vec![4.0, 25.0, 1.0],
        vec![1.0, 3.0, 31.0],
    ])
    .unwrap()
}

pub fn matrix(rows: &[&[f64]]) -> ConfusionMatrix {
    let rows: Vec<Vec<f64>> = rows.iter().map(|r| r.to_vec()).collect();
    ConfusionMatrix::from_rows(&rows).unwrap()
}

pub fn assert_close(actual: f64, expected: f64, tol: f64) {
    assert!(
        (actual - expected).abs() <= tol,
        "expected {expected}, got {actual} (tol {tol})"
    );
}
