use bandtsp::concentration::{deviation_radius, interval, interval_around};
use bandtsp::estimator::{estimate, EstimateConfig, Method};

/// Long-run reference mean for the `(4, 3.75)` tuple constant.
const REFERENCE: f64 = 0.884487;

fn runs(count: u64, m: u64) -> Vec<f64> {
    (0..count)
        .map(|seed| {
            estimate(&EstimateConfig::new(
                Method::Tuple,
                4,
                3.75,
                m,
                1_000 + seed,
                4,
            ))
            .unwrap()
            .mean
        })
        .collect()
}

#[test]
fn intervals_cover_the_reference() {
    let m = 10_000;
    let delta = 0.05;
    let means = runs(200, m);
    let r = deviation_radius(4, m, 3.75, delta).unwrap();
    let covered = means
        .iter()
        .filter(|&&x| {
            let (lo, hi) = interval_around(x, r.epsilon);
            lo <= REFERENCE && REFERENCE <= hi
        })
        .count();
    let rate = covered as f64 / means.len() as f64;
    let floor = 1.0 - delta - 3.0 * (delta * (1.0 - delta) / means.len() as f64).sqrt();
    assert!(rate >= floor, "coverage {rate}");
}

#[test]
fn empirical_tail_stays_below_delta() {
    let m = 2_000;
    let means = runs(200, m);
    for delta in [0.5, 0.2, 0.05] {
        let eps = deviation_radius(4, m, 3.75, delta).unwrap().epsilon;
        let exceed = means
            .iter()
            .filter(|&&x| (x - REFERENCE).abs() > eps)
            .count() as f64
            / means.len() as f64;
        let cushion = 3.0 * (delta * (1.0 - delta) / means.len() as f64).sqrt();
        assert!(exceed <= delta + cushion, "delta {delta}: tail {exceed}");
    }
}

#[test]
fn interval_from_estimate_result() {
    let e = estimate(&EstimateConfig::new(Method::Tuple, 4, 3.75, 5_000, 3, 4)).unwrap();
    let r = deviation_radius(4, 5_000, 3.75, 0.01).unwrap();
    let (lo, hi) = interval(&e, &r).unwrap();
    assert_eq!(hi - lo, (e.mean + r.epsilon) - (e.mean - r.epsilon));
    let wrong = deviation_radius(5, 5_000, 3.75, 0.01).unwrap();
    assert!(interval(&e, &wrong).is_err());
}
