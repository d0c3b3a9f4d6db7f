use proptest::prelude::*;
use qifkit::alpha::{arimoto_mi, renyi_entropy, sibson_mi};
use qifkit::capacity::{bayes_capacity, gen_leakage_capacity, maximal_sibson, renyi_ldp};
use qifkit::fmean::f_alpha;
use qifkit::vulnerability::{
    gen_posterior_vulnerability_avg, gen_prior_vulnerability, posterior_vulnerability_avg,
    prior_vulnerability,
};
use qifkit::{
    compose, push, AlphaOrder, Channel, FMean, GainSpec, Prior, SimplexOptimizerConfig,
};

fn dist(n: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(0.01f64..1.0, n).prop_map(|v| {
        let s: f64 = v.iter().sum();
        v.into_iter().map(|x| x / s).collect()
    })
}

fn channel(nx: usize, ny: usize) -> impl Strategy<Value = Channel> {
    proptest::collection::vec(dist(ny), nx).prop_map(|rows| Channel::new(rows).unwrap())
}

fn alpha() -> impl Strategy<Value = AlphaOrder> {
    prop_oneof![
        Just(AlphaOrder::zero()),
        Just(AlphaOrder::one()),
        Just(AlphaOrder::infinity()),
        (0.05f64..20.0).prop_map(|a| AlphaOrder::new(a).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn hyper_outer_and_inners_reconstruct_prior(p in dist(3), c in channel(3, 4)) {
        let pi = Prior::new(p.clone()).unwrap();
        let h = push(&pi, &c).unwrap();
        prop_assert!((h.outer().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        for x in 0..3 {
            let back: f64 = h.iter().map(|(w, d)| w * d.get(x)).sum();
            prop_assert!((back - p[x]).abs() < 1e-12);
        }
    }

    #[test]
    fn classical_leakage_bounded_by_bayes_capacity(p in dist(3), c in channel(3, 3)) {
        let pi = Prior::new(p).unwrap();
        let v0 = prior_vulnerability(&pi, &GainSpec::Identity).unwrap();
        let v1 = posterior_vulnerability_avg(&push(&pi, &c).unwrap(), &GainSpec::Identity).unwrap();
        prop_assert!((v1 / v0).ln() <= bayes_capacity(&c) + 1e-12);
    }

    #[test]
    fn alpha_vulnerability_is_exp_minus_renyi(p in dist(4), a in alpha()) {
        let pi = Prior::new(p).unwrap();
        let v = gen_prior_vulnerability(&pi, &GainSpec::Simplex, &f_alpha(a)).unwrap();
        prop_assert!((v - (-renyi_entropy(&pi, a)).exp()).abs() < 1e-9);
    }

    #[test]
    fn post_processing_does_not_increase_arimoto(
        p in dist(3), c in channel(3, 3), r in channel(3, 2), a in alpha()
    ) {
        let pi = Prior::new(p).unwrap();
        let before = arimoto_mi(&push(&pi, &c).unwrap(), a);
        let after = arimoto_mi(&push(&pi, &compose(&c, &r).unwrap()).unwrap(), a);
        prop_assert!(after <= before + 1e-9);
        prop_assert!(after >= -1e-12);
    }

    #[test]
    fn generalized_posterior_at_least_prior(p in dist(3), c in channel(3, 3), a in alpha()) {
        let pi = Prior::new(p).unwrap();
        let f = f_alpha(a);
        let prior = gen_prior_vulnerability(&pi, &GainSpec::Simplex, &f).unwrap();
        let post = gen_posterior_vulnerability_avg(&push(&pi, &c).unwrap(), &GainSpec::Simplex, &f, &f).unwrap();
        prop_assert!(post >= prior - 1e-12);
    }

    #[test]
    fn sibson_bounded_by_renyi_ldp(p in dist(3), c in channel(3, 3), a in 1.1f64..20.0) {
        let a = AlphaOrder::new(a).unwrap();
        let pi = Prior::new(p).unwrap();
        prop_assert!(sibson_mi(&pi, &c, a).unwrap() <= renyi_ldp(&c, a).unwrap() + 1e-9);
    }
}

#[test]
fn optimizer_matches_bayes_capacity_for_identity_gain() {
    let c = Channel::new(vec![
        vec![0.7, 0.2, 0.1],
        vec![0.1, 0.6, 0.3],
        vec![0.2, 0.2, 0.6],
    ])
    .unwrap();
    let id = FMean::identity();
    let cfg = SimplexOptimizerConfig::default();
    let sup = gen_leakage_capacity(&c, &GainSpec::Identity, &id, &id, &cfg).unwrap();
    assert!((sup.value - bayes_capacity(&c)).abs() < 1e-12);
    assert_eq!(sup.witness.probs(), Prior::uniform(3).unwrap().probs());
}

#[test]
fn optimizer_is_reproducible() {
    let c = Channel::binary_symmetric(0.2).unwrap();
    let cfg = SimplexOptimizerConfig {
        seed: 5,
        ..Default::default()
    };
    let a = AlphaOrder::new(3.0).unwrap();
    assert_eq!(maximal_sibson(&c, a, &cfg).unwrap(), maximal_sibson(&c, a, &cfg).unwrap());
}
