#[track_caller]
pub fn assert_close(actual: f64, expected: f64, tol: f64) {
    assert!(
        (actual - expected).abs() <= tol,
        "expected {expected} within {tol:e}, got {actual} (diff {:e})",
        (actual - expected).abs()
    );
}
