use hcm_core::nalgebra::{DMatrix, DVector};
use hcm_core::*;

fn square_minus_four() -> impl NonlinearSystem {
    FnSystem::new(
        1,
        |x: &DVector<f64>| DVector::from_element(1, x[0] * x[0] - 4.0),
        |x: &DVector<f64>| DMatrix::from_element(1, 1, 2.0 * x[0]),
    )
}

fn errors(step: impl Fn(&DVector<f64>) -> DVector<f64>) -> Vec<f64> {
    let mut x = DVector::from_element(1, 3.0);
    let mut errs = vec![(x[0] - 2.0_f64).abs()];
    for _ in 0..8 {
        x = step(&x);
        let e = (x[0] - 2.0).abs();
        // Stop once round-off dominates.
        if e < 1e-13 {
            break;
        }
        errs.push(e);
    }
    errs
}

/// Least-squares slope of ln e_{k+1} against ln e_k.
fn order(errs: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = errs.windows(2).map(|w| (w[0].ln(), w[1].ln())).collect();
    let n = pts.len() as f64;
    let (mx, my) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x / n, b + y / n));
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    sxy / sxx
}

#[test]
fn newton_is_second_order() {
    let problem = HomotopyProblem::new(square_minus_four(), square_minus_four()).unwrap();
    let errs = errors(|x| newton_step(&problem, x, 1.0).unwrap());
    assert!(errs.len() >= 4, "{errs:?}");
    let q = order(&errs[1..]);
    assert!(q >= 1.9, "order {q}, errors {errs:?}");
}

#[test]
fn ostrowski_is_fourth_order() {
    let problem = HomotopyProblem::new(square_minus_four(), square_minus_four()).unwrap();
    let errs = errors(|x| ostrowski_step(&problem, x, 1.0, 1e-14).unwrap().x);
    assert!(errs.len() >= 3, "{errs:?}");
    let q = order(&errs);
    assert!(q >= 3.5, "order {q}, errors {errs:?}");
}
