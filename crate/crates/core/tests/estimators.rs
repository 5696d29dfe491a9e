use mixjitter::data::{jitter, ColumnSchema, MixedDataset};
use mixjitter::estimators::{fit_kde, fit_loclin, FitOptions, KdeModel, Kernel};
use mixjitter::oracle::{adaptive_integral, adaptive_integral_with_breaks, DiscretePmf, SyntheticMixedModel};
use mixjitter::regression::{
    classify, cond_cdf, cond_mean, DensitySurface, FunctionalQuery, QueryKind, ResponseKind,
};
use mixjitter::{Error, Matrix, NoiseSpec};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn smooth_noise(dims: usize) -> NoiseSpec {
    NoiseSpec::new(0.8, 5, dims).unwrap()
}

fn binomial_sample(n: usize, seed: u64) -> MixedDataset {
    SyntheticMixedModel::discrete(DiscretePmf::binomial(4, 0.3).unwrap())
        .sample(n, seed)
        .unwrap()
}

fn mixed_sample(n: usize, seed: u64) -> MixedDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows: Vec<[f64; 2]> = (0..n)
        .map(|_| {
            let z = f64::from((0..3).filter(|_| rng.random::<f64>() < 0.4).count() as u32);
            let e: f64 = StandardNormal.sample(&mut rng);
            [z, 0.5 * z + e]
        })
        .collect();
    MixedDataset::new(
        vec![ColumnSchema::discrete("z"), ColumnSchema::continuous("x")],
        Matrix::from_rows(2, &rows),
    )
    .unwrap()
}

fn integrate_1d(model: &KdeModel) -> f64 {
    let (lo, hi) = model.observed_range(0);
    let reach = 6.0 * model.bandwidths()[0] * model.transform().scales()[0];
    let (a, b) = (lo - reach, hi + reach);
    let f = |x: f64| model.eval(&[x]).unwrap();
    adaptive_integral_with_breaks(&f, a, b, &model.breakpoints(0, a, b), 1e-6).unwrap()
}

#[test]
fn kde_integrates_to_one_in_one_dimension() {
    for kernel in [Kernel::Gaussian, Kernel::Epanechnikov] {
        for seed in [1, 2] {
            let opts = FitOptions {
                kernel,
                seed,
                ..FitOptions::default()
            };
            let m = fit_kde(&binomial_sample(500, seed), &smooth_noise(1), &opts).unwrap();
            let mass = integrate_1d(&m);
            assert!((mass - 1.0).abs() < 1e-3, "{kernel} seed {seed}: {mass}");
        }
    }
}

#[test]
fn kde_integrates_to_one_in_two_dimensions() {
    for kernel in [Kernel::Gaussian, Kernel::Epanechnikov] {
        let opts = FitOptions {
            kernel,
            seed: 3,
            ..FitOptions::default()
        };
        let m = fit_kde(&mixed_sample(500, 3), &smooth_noise(1), &opts).unwrap();
        let window = |axis: usize| {
            let (lo, hi) = m.observed_range(axis);
            let reach = 6.0 * m.bandwidths()[axis] * m.transform().scales()[axis];
            (lo - reach, hi + reach)
        };
        let (za, zb) = window(0);
        let (xa, xb) = window(1);
        // outer axis by quadrature; inner axis also by quadrature so the
        // check does not lean on the closed-form axis integrals
        let inner = |z: f64| {
            let g = |x: f64| m.eval(&[z, x]).unwrap();
            adaptive_integral(&g, xa, xb, 1e-5).unwrap_or_else(|e| match e {
                Error::NumericalFailure { estimate, .. } => estimate,
                other => panic!("{other}"),
            })
        };
        let mass = adaptive_integral(&inner, za, zb, 1e-4).unwrap_or_else(|e| match e {
            Error::NumericalFailure { estimate, .. } => estimate,
            other => panic!("{other}"),
        });
        assert!((mass - 1.0).abs() < 1e-3, "{kernel}: {mass}");
    }
}

#[test]
fn single_replicate_is_the_jittered_dataset() {
    let ds = mixed_sample(50, 8);
    let spec = smooth_noise(1);
    let opts = FitOptions {
        seed: 77,
        ..FitOptions::default()
    };
    let m = fit_kde(&ds, &spec, &opts).unwrap();
    let j = jitter(&ds, &spec, 77, 0).unwrap();
    assert_eq!(m.num_jitters(), 1);
    assert_eq!(m.replicates()[0].rows, m.transform().apply_matrix(j.rows()));
}

#[test]
fn large_sample_atoms_approach_pmf() {
    let pmf = DiscretePmf::binomial(4, 0.3).unwrap();
    let m = fit_kde(&binomial_sample(8000, 21), &smooth_noise(1), &FitOptions::default()).unwrap();
    let est = m.eval(&[1.0]).unwrap();
    // se of a KDE atom estimate at n = 8000 is about 0.01; bias is of the same order
    assert!((est - 0.4116).abs() < 0.04, "{est}");
    let mae: f64 = pmf.atoms().map(|(z, p)| (m.eval(&[z as f64]).unwrap() - p).abs()).sum::<f64>() / 5.0;
    assert!(mae < 0.03, "{mae}");
}

#[test]
fn loclin_recovers_quadratic_mean_at_atom() {
    let ds = binomial_sample(8000, 5);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let rows: Vec<[f64; 2]> = ds
        .rows()
        .column(0)
        .map(|z| {
            let e: f64 = StandardNormal.sample(&mut rng);
            [z, z * z + e]
        })
        .collect();
    let data = MixedDataset::new(
        vec![ColumnSchema::discrete("z"), ColumnSchema::continuous("y")],
        Matrix::from_rows(2, &rows),
    )
    .unwrap();
    let m = fit_loclin(&data, 1, &smooth_noise(1), &FitOptions::default(), false).unwrap();
    // about 2100 rows sit at z = 2, so the noise se is about 0.02; smoothing
    // into the neighbouring atoms adds a few hundredths of bias
    let est = m.eval(&[2.0]).unwrap();
    assert!((est - 4.0).abs() < 0.15, "{est}");
}

fn mean_query(kind: QueryKind, response_kind: ResponseKind, covariates: Vec<f64>) -> FunctionalQuery {
    FunctionalQuery {
        kind,
        response_index: 0,
        response_kind,
        covariate_point: covariates,
    }
}

#[test]
fn kde_conditional_mean_of_binomial() {
    let m = fit_kde(&binomial_sample(8000, 13), &smooth_noise(1), &FitOptions::default()).unwrap();
    let est = cond_mean(&m, &mean_query(QueryKind::Mean, ResponseKind::Discrete, vec![])).unwrap();
    // sd(Z) / √n ≈ 0.01
    assert!((est.value() - 1.2).abs() < 0.05, "{}", est.value());
    assert!(est.denominator_mass > 0.99);
}

#[test]
fn constant_response_mean_is_the_constant() {
    let rows: Vec<[f64; 2]> = (0..40).map(|i| [2.5, f64::from(i % 7)]).collect();
    let ds = MixedDataset::new(
        vec![ColumnSchema::continuous("y"), ColumnSchema::continuous("x")],
        Matrix::from_rows(2, &rows),
    )
    .unwrap();
    let m = fit_kde(&ds, &NoiseSpec::new(0.0, 1, 0).unwrap(), &FitOptions::default()).unwrap();
    for x in [0.0, 2.5, 6.0] {
        let est = cond_mean(&m, &mean_query(QueryKind::Mean, ResponseKind::Continuous, vec![x])).unwrap();
        assert!((est.value() - 2.5).abs() < 1e-10);
    }
}

#[test]
fn cdf_saturates_outside_the_data() {
    let m = fit_kde(&binomial_sample(400, 2), &smooth_noise(1), &FitOptions::default()).unwrap();
    let (lo, hi) = m.observed_range(0);
    let below = cond_cdf(&m, &mean_query(QueryKind::Cdf((lo - 1.0).floor() - 1.0), ResponseKind::Discrete, vec![]))
        .unwrap()
        .value();
    let above = cond_cdf(&m, &mean_query(QueryKind::Cdf((hi + 1.0).ceil() + 1.0), ResponseKind::Discrete, vec![]))
        .unwrap()
        .value();
    assert!(below < 1e-6, "{below}");
    assert!(above > 1.0 - 1e-6, "{above}");
    let mut previous = 0.0;
    for t in -2..=6 {
        let c = cond_cdf(&m, &mean_query(QueryKind::Cdf(f64::from(t)), ResponseKind::Discrete, vec![]))
            .unwrap()
            .value();
        assert!(c >= previous);
        previous = c;
    }
}

fn class_dataset(labels: &[usize], xs: &[f64], levels: &[&str]) -> MixedDataset {
    let rows: Vec<[f64; 2]> = labels.iter().zip(xs).map(|(&l, &x)| [l as f64, x]).collect();
    MixedDataset::new(
        vec![ColumnSchema::categorical("class", levels), ColumnSchema::continuous("x")],
        Matrix::from_rows(2, &rows),
    )
    .unwrap()
}

fn class_query(x: f64) -> FunctionalQuery {
    FunctionalQuery {
        kind: QueryKind::ClassProbs(vec![0, 1]),
        response_index: 0,
        response_kind: ResponseKind::Discrete,
        covariate_point: vec![x],
    }
}

#[test]
fn balanced_classes_with_independent_covariate() {
    let n = 4000;
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let labels: Vec<usize> = (0..n).map(|i| i % 2).collect();
    let xs: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
    let m = fit_kde(&class_dataset(&labels, &xs, &["a", "b"]), &smooth_noise(2), &FitOptions::default()).unwrap();
    for x in [-1.0, 0.0, 1.0] {
        let est = classify(&m, &class_query(x)).unwrap();
        // local sample size near x is a few hundred: se of a proportion ≈ 0.03
        assert!((est.values[0] - 0.5).abs() < 0.1, "{:?}", est.values);
        assert!((est.values.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn deterministic_class() {
    let n = 300;
    let labels = vec![0usize; n];
    let xs: Vec<f64> = (0..n).map(|i| f64::from(i as u32) / 100.0).collect();
    let m = fit_kde(&class_dataset(&labels, &xs, &["a", "b"]), &smooth_noise(2), &FitOptions::default()).unwrap();
    let est = classify(&m, &class_query(1.5)).unwrap();
    // the jittered dummies average to the true 0/1 up to the noise mean of
    // the local sample
    assert!(est.values[0] > 0.95, "{:?}", est.values);
    assert!((est.values.iter().sum::<f64>() - 1.0).abs() < 1e-12);
}

#[test]
fn classify_rejects_bad_blocks() {
    let labels = vec![0usize, 1, 0, 1];
    let xs = vec![0.0, 1.0, 2.0, 3.0];
    let m = fit_kde(&class_dataset(&labels, &xs, &["a", "b"]), &smooth_noise(2), &FitOptions::default()).unwrap();
    let mut q = class_query(0.0);
    q.kind = QueryKind::ClassProbs(vec![0]);
    assert!(classify(&m, &q).is_err());
    q.kind = QueryKind::ClassProbs(vec![0, 1]);
    q.covariate_point = vec![];
    assert!(matches!(classify(&m, &q), Err(Error::DimensionMismatch { .. })));
}

#[test]
fn epanechnikov_query_far_from_data_has_no_local_data() {
    let opts = FitOptions {
        kernel: Kernel::Epanechnikov,
        ..FitOptions::default()
    };
    let m = fit_kde(&mixed_sample(200, 1), &smooth_noise(1), &opts).unwrap();
    let q = FunctionalQuery {
        kind: QueryKind::Mean,
        response_index: 0,
        response_kind: ResponseKind::Discrete,
        covariate_point: vec![1e3],
    };
    assert!(matches!(cond_mean(&m, &q), Err(Error::NoLocalData { .. })));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn kde_is_nonnegative(seed in 0u64..1000, z in -3.0f64..7.0, x in -5.0f64..6.0, epa in any::<bool>()) {
        let kernel = if epa { Kernel::Epanechnikov } else { Kernel::Gaussian };
        let opts = FitOptions { kernel, seed, num_jitters: 2, ..FitOptions::default() };
        let m = fit_kde(&mixed_sample(60, seed), &smooth_noise(1), &opts).unwrap();
        prop_assert!(m.eval(&[z, x]).unwrap() >= 0.0);
    }

    #[test]
    fn averaging_is_the_mean_of_replicates(seed in 0u64..1000, jitters in 1usize..6, z in -1.0f64..4.0, x in -3.0f64..4.0) {
        let opts = FitOptions { seed, num_jitters: jitters, ..FitOptions::default() };
        let m = fit_kde(&mixed_sample(80, seed), &smooth_noise(1), &opts).unwrap();
        let singles: f64 = (0..jitters).map(|r| m.eval_replicate(r, &[z, x]).unwrap()).sum::<f64>() / jitters as f64;
        prop_assert!((m.eval(&[z, x]).unwrap() - singles).abs() <= 1e-14);
    }

    #[test]
    fn loclin_is_exact_on_affine_data(
        seed in 0u64..1000,
        jitters in 1usize..4,
        bw in 0.2f64..2.0,
        epa in any::<bool>(),
        intercept in -5.0f64..5.0,
        slope_a in -3.0f64..3.0,
        slope_b in -3.0f64..3.0,
    ) {
        // continuous covariates only, so nothing is jittered and the fit
        // sees an exactly affine response
        let kernel = if epa { Kernel::Epanechnikov } else { Kernel::Gaussian };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rows: Vec<[f64; 3]> = (0..60)
            .map(|_| {
                let a: f64 = rng.random_range(-2.0..2.0);
                let b: f64 = rng.random_range(-2.0..2.0);
                [a, b, intercept + slope_a * a + slope_b * b]
            })
            .collect();
        let ds = MixedDataset::new(
            vec![ColumnSchema::continuous("a"), ColumnSchema::continuous("b"), ColumnSchema::continuous("y")],
            Matrix::from_rows(3, &rows),
        ).unwrap();
        let opts = FitOptions { kernel, seed, num_jitters: jitters, bandwidth: Some(vec![bw.max(1.0), bw.max(1.0)]) };
        let m = fit_loclin(&ds, 2, &NoiseSpec::new(0.0, 1, 0).unwrap(), &opts, false).unwrap();
        let a0: f64 = rng.random_range(-1.0..1.0);
        let b0: f64 = rng.random_range(-1.0..1.0);
        let est = m.eval(&[a0, b0]).unwrap();
        prop_assert!((est - (intercept + slope_a * a0 + slope_b * b0)).abs() < 1e-8);
    }

    #[test]
    fn loclin_reproduces_constants_with_jittered_covariates(seed in 0u64..1000, c in -10.0f64..10.0, epa in any::<bool>()) {
        let kernel = if epa { Kernel::Epanechnikov } else { Kernel::Gaussian };
        let ds = mixed_sample(80, seed);
        let rows: Vec<[f64; 3]> = ds.rows().rows_iter().map(|r| [r[0], r[1], c]).collect();
        let ds = MixedDataset::new(
            vec![ColumnSchema::discrete("z"), ColumnSchema::continuous("x"), ColumnSchema::continuous("y")],
            Matrix::from_rows(3, &rows),
        ).unwrap();
        let opts = FitOptions { kernel, seed, num_jitters: 2, bandwidth: Some(vec![1.0, 1.0]) };
        let m = fit_loclin(&ds, 2, &smooth_noise(1), &opts, false).unwrap();
        let est = m.eval(&[1.0, 0.5]).unwrap();
        prop_assert!((est - c).abs() < 1e-10);
    }
}
