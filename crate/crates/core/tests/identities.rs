//! Density equality at integers, vanishing derivatives, mass conservation
//! and the functional identities, checked against the analytic oracle.

use mixjitter::oracle::{
    adaptive_integral_with_breaks, convolution_breaks, convolve_density, finite_difference, true_conditional,
    Condition, DiscretePmf, Functional, GaussianConditional, SyntheticMixedModel,
};
use mixjitter::regression::{cond_cdf, cond_mean, cond_quantile, FunctionalQuery, QueryKind, ResponseKind};
use mixjitter::special::beta_cdf;
use mixjitter::NoiseSpec;
use proptest::prelude::*;

fn pmf_strategy() -> impl Strategy<Value = DiscretePmf> {
    (-4i64..4, prop::collection::vec(0.01f64..1.0, 1..8)).prop_map(|(min, w)| {
        let total: f64 = w.iter().sum();
        let mut probs: Vec<f64> = w.iter().map(|x| x / total).collect();
        // push the rounding residue into the last atom so the sum is exactly 1
        let head: f64 = probs[..probs.len() - 1].iter().sum();
        *probs.last_mut().unwrap() = 1.0 - head;
        DiscretePmf::new(min, probs).unwrap()
    })
}

fn spec_strategy() -> impl Strategy<Value = NoiseSpec> {
    prop_oneof![Just(0.0), 0.01f64..0.95]
        .prop_flat_map(|theta| (Just(theta), 1u32..8))
        .prop_map(|(theta, nu)| NoiseSpec::new(theta, nu, 1).unwrap())
}

fn discrete_query(kind: QueryKind) -> FunctionalQuery {
    FunctionalQuery {
        kind,
        response_index: 0,
        response_kind: ResponseKind::Discrete,
        covariate_point: Vec::new(),
    }
}

proptest! {
    #[test]
    fn eta_is_symmetric_and_bounded(spec in spec_strategy(), x in -1.5f64..1.5) {
        let v = spec.density(x);
        prop_assert_eq!(v, spec.density(-x));
        prop_assert!((0.0..=1.0).contains(&v));
        if x.abs() <= spec.gamma1() && x.abs() < spec.gamma2() {
            prop_assert!((v - 1.0).abs() < 1e-12);
        }
        if x.abs() >= spec.gamma2() {
            prop_assert_eq!(v, 0.0);
        }
    }

    #[test]
    fn beta_cdf_reflection(nu in 1u32..30, x in 0.0f64..1.0) {
        let sum = beta_cdf(nu, x).unwrap() + beta_cdf(nu, 1.0 - x).unwrap();
        prop_assert!((sum - 1.0).abs() < 1e-12);
    }

    #[test]
    fn beta_cdf_monotone(nu in 1u32..30, x in 0.0f64..1.0, dx in 0.0f64..0.1) {
        prop_assert!(beta_cdf(nu, x).unwrap() <= beta_cdf(nu, x + dx).unwrap() + 1e-15);
    }

    #[test]
    fn convolved_density_equals_pmf_at_integers(pmf in pmf_strategy(), spec in spec_strategy()) {
        for (z, p) in pmf.atoms() {
            prop_assert!((convolve_density(&pmf, &spec, z as f64) - p).abs() < 1e-12);
        }
    }

    #[test]
    fn convolution_conserves_mass(pmf in pmf_strategy(), spec in spec_strategy()) {
        let lo = pmf.support_min() as f64 - 1.0;
        let hi = pmf.support_max() as f64 + 1.0;
        let f = |z: f64| convolve_density(&pmf, &spec, z);
        let mass = adaptive_integral_with_breaks(&f, lo, hi, &convolution_breaks(&spec, lo, hi), 1e-12).unwrap();
        prop_assert!((mass - 1.0).abs() < 1e-8);
    }

    #[test]
    fn derivatives_vanish_at_atoms(pmf in pmf_strategy(), theta in 0.05f64..0.95, nu in 3u32..8) {
        let spec = NoiseSpec::new(theta, nu, 1).unwrap();
        let h = spec.gamma1().min(0.01) / 2.0;
        let f = |z: f64| convolve_density(&pmf, &spec, z);
        for (z, _) in pmf.atoms() {
            for order in [1, 2] {
                let d = finite_difference(&f, z as f64, order, h).unwrap();
                prop_assert!(d.abs() < 1e-6, "order {} at {}: {}", order, z, d);
            }
        }
    }

    #[test]
    fn corrected_cdf_recovers_pmf_cdf(pmf in pmf_strategy(), spec in spec_strategy()) {
        let model = SyntheticMixedModel::discrete(pmf.clone());
        let surface = model.jittered(spec);
        let mut previous = 0.0;
        for t in pmf.support_min() - 1..=pmf.support_max() + 1 {
            let est = cond_cdf(&surface, &discrete_query(QueryKind::Cdf(t as f64))).unwrap().value();
            let truth = true_conditional(&model, Functional::Cdf(t as f64), Condition::Discrete).unwrap();
            prop_assert!((est - truth).abs() < 1e-8, "t={}: {} vs {}", t, est, truth);
            prop_assert!(est >= previous - 1e-12);
            previous = est;
        }
        let mean = cond_mean(&surface, &discrete_query(QueryKind::Mean)).unwrap().value();
        prop_assert!((mean - pmf.mean()).abs() < 1e-8);
        prop_assert!(mean >= pmf.support_min() as f64 - 1e-12 && mean <= pmf.support_max() as f64 + 1e-12);
    }

    #[test]
    fn quantile_is_coherent_with_cdf(pmf in pmf_strategy(), spec in spec_strategy(), alpha in 0.0f64..=1.0) {
        let model = SyntheticMixedModel::discrete(pmf.clone());
        let surface = model.jittered(spec);
        let q = cond_quantile(&surface, &discrete_query(QueryKind::Quantile(alpha))).unwrap().value();
        let at = cond_cdf(&surface, &discrete_query(QueryKind::Cdf(q))).unwrap().value();
        prop_assert!(at >= alpha - 1e-12);
        let truth = true_conditional(&model, Functional::Quantile(alpha), Condition::Discrete).unwrap();
        let near_boundary = (true_conditional(&model, Functional::Cdf(truth), Condition::Discrete).unwrap() - alpha).abs() < 1e-9;
        if alpha > 0.0 && !near_boundary {
            prop_assert_eq!(q, truth);
        }
    }
}

fn mixed_model() -> SyntheticMixedModel {
    SyntheticMixedModel::mixed(
        DiscretePmf::binomial(3, 0.4).unwrap(),
        GaussianConditional {
            mean_intercept: -1.0,
            mean_slope: 1.5,
            scale_intercept: 0.6,
            scale_slope: 0.2,
        },
    )
    .unwrap()
}

#[test]
fn continuous_response_functionals_match_model() {
    let model = mixed_model();
    for &(theta, nu) in &[(0.0, 1), (0.8, 5)] {
        let surface = model.jittered(NoiseSpec::new(theta, nu, 1).unwrap());
        for z in 0..=3i64 {
            let q = |kind| FunctionalQuery {
                kind,
                response_index: 1,
                response_kind: ResponseKind::Continuous,
                covariate_point: vec![z as f64],
            };
            let cond = Condition::ContinuousGivenDiscrete(z);
            let mean = cond_mean(&surface, &q(QueryKind::Mean)).unwrap().value();
            assert!((mean - true_conditional(&model, Functional::Mean, cond).unwrap()).abs() < 1e-8);
            for &t in &[-1.0, 0.2, 1.7, 3.5] {
                let cdf = cond_cdf(&surface, &q(QueryKind::Cdf(t))).unwrap().value();
                let want = true_conditional(&model, Functional::Cdf(t), cond).unwrap();
                assert!((cdf - want).abs() < 1e-8, "z={z} t={t}: {cdf} vs {want}");
            }
            for &alpha in &[0.1, 0.5, 0.95] {
                let qv = cond_quantile(&surface, &q(QueryKind::Quantile(alpha))).unwrap().value();
                let want = true_conditional(&model, Functional::Quantile(alpha), cond).unwrap();
                assert!((qv - want).abs() < 1e-7, "z={z} alpha={alpha}: {qv} vs {want}");
            }
        }
    }
}

#[test]
fn discrete_response_given_continuous_covariate() {
    let model = mixed_model();
    let surface = model.jittered(NoiseSpec::new(0.8, 5, 1).unwrap());
    for &x in &[-0.5, 0.7, 2.2] {
        let q = |kind| FunctionalQuery {
            kind,
            response_index: 0,
            response_kind: ResponseKind::Discrete,
            covariate_point: vec![x],
        };
        let cond = Condition::DiscreteGivenContinuousAt(x);
        let mean = cond_mean(&surface, &q(QueryKind::Mean)).unwrap().value();
        assert!((mean - true_conditional(&model, Functional::Mean, cond).unwrap()).abs() < 1e-8);
        for t in 0..=3 {
            let cdf = cond_cdf(&surface, &q(QueryKind::Cdf(f64::from(t)))).unwrap().value();
            let want = true_conditional(&model, Functional::Cdf(f64::from(t)), cond).unwrap();
            assert!((cdf - want).abs() < 1e-8);
        }
        let median = cond_quantile(&surface, &q(QueryKind::Quantile(0.5))).unwrap().value();
        assert_eq!(median, true_conditional(&model, Functional::Quantile(0.5), cond).unwrap());
    }
}

#[test]
fn uncorrected_cdf_is_biased_for_discrete_response() {
    // without the half-density term the jittered CDF at an atom is off by
    // half that atom's mass
    let pmf = DiscretePmf::binomial(4, 0.3).unwrap();
    let model = SyntheticMixedModel::discrete(pmf.clone());
    let surface = model.jittered(NoiseSpec::new(0.8, 5, 1).unwrap());
    let mut q = discrete_query(QueryKind::Cdf(1.0));
    q.response_kind = ResponseKind::Continuous;
    let plain = cond_cdf(&surface, &q).unwrap().value();
    assert!((plain - (pmf.cdf(1) - pmf.pmf(1) / 2.0)).abs() < 1e-8);
}
