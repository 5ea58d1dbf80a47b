use cilearn::svdd::{detect_per_feature, fit_per_feature, rbf_kernel, svdd_fit, DETECTION_HEADER};
use cilearn::synthetic::gaussian_cluster;
use cilearn::SparseVector;
use nalgebra::DMatrix;

#[test]
fn kernel_matrix_is_positive_semidefinite() {
    let pts = gaussian_cluster(40, &[0.0, 1.0, -1.0], 0.7, 1);
    for sigma in [0.3, 1.0, 3.0] {
        let k = DMatrix::from_fn(pts.len(), pts.len(), |i, j| rbf_kernel(&pts[i], &pts[j], sigma));
        let eig = k.symmetric_eigen();
        let min = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
        assert!(min > -1e-10, "sigma {sigma}: smallest eigenvalue {min}");
    }
}

#[test]
fn distance_grows_along_a_ray_from_the_center() {
    let model = svdd_fit(gaussian_cluster(100, &[0.0, 0.0], 0.2, 2), 1.0, 0.01).unwrap();
    let mut prev = f64::NEG_INFINITY;
    for step in 1..40 {
        let r = 0.1 * step as f64;
        let d = model.distance_sq(&SparseVector::from_dense(&[r, 0.0]));
        assert!(d > prev, "radius {r}");
        prev = d;
    }
    // Far away every kernel term vanishes.
    let far = model.distance_sq(&SparseVector::from_dense(&[100.0, 0.0]));
    assert!((far - (1.0 + model.kernel_grand_mean())).abs() < 1e-12);
}

#[test]
fn training_rows_are_never_flagged() {
    let train = gaussian_cluster(150, &[1.0, -2.0], 0.5, 3);
    let model = svdd_fit(train.clone(), 1.0, 0.01).unwrap();
    assert!(model.detect(&train).flagged.is_empty());
}

#[test]
fn parallel_detection_matches_sequential() {
    let model = svdd_fit(gaussian_cluster(80, &[0.0, 0.0], 0.3, 4), 1.0, 0.05).unwrap();
    let mut test = gaussian_cluster(57, &[0.0, 0.0], 0.3, 5);
    test.extend(gaussian_cluster(5, &[3.0, 3.0], 0.1, 6));
    let seq = model.detect(&test);
    for threads in [1, 2, 3, 8, 100] {
        assert_eq!(model.detect_parallel(&test, threads), seq);
    }
    assert!((57..62).all(|i| seq.is_flagged(i)));
}

#[test]
fn per_feature_detectors_flag_only_their_column() {
    let train = gaussian_cluster(100, &[0.0, 0.0, 0.0], 0.1, 7);
    let models = fit_per_feature(&train, 3, 1.0, 0.01).unwrap();
    let test = vec![
        SparseVector::from_dense(&[0.0, 0.0, 0.0]),
        SparseVector::from_dense(&[0.0, 2.0, 0.0]),
    ];
    let results = detect_per_feature(&models, &test);
    assert_eq!(results.len(), 3);
    assert!(results[0].flagged.is_empty());
    assert_eq!(results[1].flagged, vec![1]);
    assert!(results[2].flagged.is_empty());
}

#[test]
fn detection_csv_layout() {
    let model = svdd_fit(gaussian_cluster(30, &[0.0], 0.1, 8), 1.0, 0.01).unwrap();
    let test = vec![SparseVector::from_dense(&[0.0]), SparseVector::from_dense(&[5.0])];
    let mut out = Vec::new();
    model.detect(&test).write_csv(&mut out).unwrap();
    let text = String::from_utf8(out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], DETECTION_HEADER);
    assert!(lines[1].starts_with("0,") && lines[1].ends_with(",0"));
    assert!(lines[2].starts_with("1,") && lines[2].ends_with(",1"));
}

#[test]
fn rejects_bad_parameters() {
    let train = gaussian_cluster(5, &[0.0], 1.0, 9);
    assert!(svdd_fit(Vec::new(), 1.0, 0.01).is_err());
    assert!(svdd_fit(train.clone(), 0.0, 0.01).is_err());
    assert!(svdd_fit(train, 1.0, 1.0).is_err());
}
