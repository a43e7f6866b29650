//! Cross-module properties of the loss models, curvature estimates, Lambert W
//! and dataset I/O.

use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use fedl_core::data::assign_weights;
use fedl_core::datagen::{
    generate_synthetic, load_csv_dir, write_csv_dir, CsvSchema, SyntheticSpec,
};
use fedl_core::math::{estimate_curvature, lambert_w0};
use fedl_core::{LossModel, ModelVector, UEDataset};

fn regression_data(rng: &mut ChaCha8Rng, n: usize, d: usize) -> UEDataset {
    let features = (0..n * d).map(|_| rng.gen_range(-2.0..2.0)).collect();
    let labels = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
    UEDataset::new(features, labels, d).unwrap()
}

fn class_data(rng: &mut ChaCha8Rng, n: usize, d: usize, classes: usize) -> UEDataset {
    let features = (0..n * d).map(|_| rng.gen_range(-2.0..2.0)).collect();
    let labels = (0..n).map(|_| rng.gen_range(0..classes) as f64).collect();
    UEDataset::new(features, labels, d).unwrap()
}

fn random_w(rng: &mut ChaCha8Rng, len: usize, scale: f64) -> ModelVector {
    ModelVector::from_vec((0..len).map(|_| scale * rng.gen_range(-1.0..1.0)).collect())
}

fn models() -> [(LossModel, bool); 2] {
    [
        (LossModel::MseLinear, false),
        (
            LossModel::MultinomialLogistic {
                classes: 3,
                reg: 0.01,
            },
            true,
        ),
    ]
}

fn dataset_for(model_is_clf: bool, rng: &mut ChaCha8Rng) -> UEDataset {
    if model_is_clf {
        class_data(rng, 60, 4, 3)
    } else {
        regression_data(rng, 60, 4)
    }
}

#[test]
fn gradients_are_co_coercive_with_estimated_smoothness() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for (model, clf) in models() {
        let data = dataset_for(clf, &mut rng);
        let l = estimate_curvature(&model, std::slice::from_ref(&data))
            .unwrap()
            .l;
        let p = model.param_dim(data.dim());
        for _ in 0..100 {
            let w = random_w(&mut rng, p, 3.0);
            let v = random_w(&mut rng, p, 3.0);
            let dg = model
                .grad(&w, &data, None)
                .unwrap()
                .sub(&model.grad(&v, &data, None).unwrap());
            let lhs = dg.dot(&w.sub(&v));
            let rhs = dg.norm_sq() / l;
            assert!(
                lhs >= rhs - 1e-10 * rhs.max(1.0),
                "{model:?}: {lhs} < {rhs}"
            );
        }
    }
}

#[test]
fn losses_are_convex_along_segments() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for (model, clf) in models() {
        let data = dataset_for(clf, &mut rng);
        let p = model.param_dim(data.dim());
        for _ in 0..100 {
            let w = random_w(&mut rng, p, 3.0);
            let v = random_w(&mut rng, p, 3.0);
            let lam: f64 = rng.gen();
            let mid = w.scaled(lam).add(&v.scaled(1.0 - lam));
            let f_mid = model.loss(&mid, &data).unwrap();
            let chord =
                lam * model.loss(&w, &data).unwrap() + (1.0 - lam) * model.loss(&v, &data).unwrap();
            assert!(
                f_mid <= chord + 1e-12 * chord.abs().max(1.0),
                "{model:?}: {f_mid} > {chord}"
            );
        }
    }
}

#[test]
fn gradients_match_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for (model, clf) in models() {
        let data = dataset_for(clf, &mut rng);
        let p = model.param_dim(data.dim());
        for _ in 0..10 {
            let w = random_w(&mut rng, p, 1.0);
            let g = model.grad(&w, &data, None).unwrap();
            let step = 1e-5;
            let fd: Vec<f64> = (0..p)
                .map(|j| {
                    let mut a = w.clone();
                    let mut b = w.clone();
                    a[j] += step;
                    b[j] -= step;
                    (model.loss(&a, &data).unwrap() - model.loss(&b, &data).unwrap()) / (2.0 * step)
                })
                .collect();
            let err: f64 = g
                .as_slice()
                .iter()
                .zip(&fd)
                .map(|(x, y)| (x - y).powi(2))
                .sum::<f64>()
                .sqrt();
            assert!(err <= 1e-5 * g.norm().max(1.0), "{model:?}: {err}");
        }
    }
}

fn hessian_eigen_range(data: &UEDataset) -> (f64, f64) {
    let x = DMatrix::from_row_slice(data.len(), data.dim(), data.features());
    let h = x.transpose() * &x * (2.0 / data.len() as f64);
    let ev = h.symmetric_eigenvalues();
    (ev.min(), ev.max())
}

#[test]
fn mse_curvature_matches_eigen_decomposition() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let data: Vec<UEDataset> = (0..3)
        .map(|i| regression_data(&mut rng, 40 + 20 * i, 6))
        .collect();
    let est = estimate_curvature(&LossModel::MseLinear, &data).unwrap();
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for ds in &data {
        let (a, b) = hessian_eigen_range(ds);
        lo = lo.min(a);
        hi = hi.max(b);
    }
    assert!((est.l - hi).abs() <= 1e-6 * hi, "L {} vs {hi}", est.l);
    assert!(
        (est.beta - lo).abs() <= 1e-6 * hi,
        "beta {} vs {lo}",
        est.beta
    );
}

#[test]
fn generated_condition_number_tracks_target() {
    let mut spec = SyntheticSpec::new(1, 40, 5.0, [13_334, 13_334], 8);
    spec.scale_range = [1.0, 1.0];
    let data = generate_synthetic(&spec).unwrap();
    assert!(data.train[0].len() >= 10_000);
    let rho = estimate_curvature(&LossModel::MseLinear, &data.train)
        .unwrap()
        .rho();
    assert!((rho - 5.0).abs() <= 1.0, "rho {rho}");
}

#[test]
fn regulariser_is_the_logistic_strong_convexity() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let data = class_data(&mut rng, 30, 3, 4);
    let model = LossModel::MultinomialLogistic {
        classes: 4,
        reg: 0.01,
    };
    assert_eq!(estimate_curvature(&model, &[data]).unwrap().beta, 0.01);
}

#[test]
fn lambert_residual_on_log_grid() {
    let e_inv = (-1.0f64).exp();
    let mut xs: Vec<f64> = (0..=2000)
        .map(|i| -e_inv * (1.0 - i as f64 / 2000.0))
        .collect();
    xs.extend((0..=4000).map(|i| 10f64.powf(-12.0 + 18.0 * i as f64 / 4000.0)));
    for x in xs {
        let w = lambert_w0(x).unwrap();
        let r = (w * w.exp() - x).abs();
        assert!(r <= 1e-12 * x.abs().max(1.0), "x {x}: residual {r}");
    }
    assert!(lambert_w0(-e_inv - 1e-9).is_err());
}

#[test]
fn csv_round_trip_preserves_generated_data() {
    let spec = SyntheticSpec::new(5, 7, 3.0, [20, 90], 21);
    let data = generate_synthetic(&spec).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let paths = write_csv_dir(dir.path(), &data.train).unwrap();
    assert_eq!(paths.len(), 5);
    let loaded = load_csv_dir(dir.path(), &CsvSchema::default()).unwrap();
    assert_eq!(loaded, data.train);
    let total: f64 = loaded.iter().map(|d| d.weight).sum();
    assert!((total - 1.0).abs() <= 1e-12);
}

#[test]
fn generation_is_byte_identical_across_runs() {
    let spec = SyntheticSpec::new(4, 5, 2.0, [10, 50], 77);
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let pa = write_csv_dir(a.path(), &generate_synthetic(&spec).unwrap().train).unwrap();
    let pb = write_csv_dir(b.path(), &generate_synthetic(&spec).unwrap().train).unwrap();
    for (x, y) in pa.iter().zip(&pb) {
        assert_eq!(std::fs::read(x).unwrap(), std::fs::read(y).unwrap());
    }
}

#[test]
fn malformed_and_empty_files_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("a.csv"), "f0,label\n1.0,2.0\nx,3.0\n").unwrap();
    let err = load_csv_dir(dir.path(), &CsvSchema::default()).unwrap_err();
    assert!(err.to_string().contains(":3:"), "{err}");

    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("a.csv"), "f0,label\n").unwrap();
    assert!(load_csv_dir(dir.path(), &CsvSchema::default()).is_err());

    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("a.csv"), "f0,label\n1,2\n").unwrap();
    std::fs::write(dir.path().join("b.csv"), "f0,f1,label\n1,2,3\n").unwrap();
    assert!(load_csv_dir(dir.path(), &CsvSchema::default()).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn weights_sum_to_one(sizes in proptest::collection::vec(1usize..200, 1..20)) {
        let mut ds: Vec<UEDataset> = sizes
            .iter()
            .map(|&n| UEDataset::new(vec![0.0; n], vec![0.0; n], 1).unwrap())
            .collect();
        assign_weights(&mut ds);
        let total: f64 = ds.iter().map(|d| d.weight).sum();
        prop_assert!((total - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn generated_sizes_stay_in_range(lo in 2usize..50, extra in 0usize..100, seed in any::<u64>()) {
        let spec = SyntheticSpec::new(6, 2, 1.5, [lo, lo + extra], seed);
        let data = generate_synthetic(&spec).unwrap();
        for (tr, te) in data.train.iter().zip(&data.test) {
            let n = tr.len() + te.len();
            prop_assert!(n >= lo && n <= lo + extra);
        }
    }
}
