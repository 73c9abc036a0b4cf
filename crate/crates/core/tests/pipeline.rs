use crackecon::{
    attacker::{optimal_threshold, AttackMode, AttackerParams},
    bounds::{lower_bound_cracked, upper_bound_cracked},
    distributions::sample_corpus,
    dp_perturb::{perturb, PerturbParams},
    zipf_fit::fit_cdf_zipf_lls,
    CorpusFormat, FrequencyCorpus, PasswordDistribution,
};

#[test]
fn sample_write_reload_fit() {
    let dist = PasswordDistribution::cdf_zipf(0.1, 0.3, None).unwrap();
    let corpus = sample_corpus(&dist, 200_000, 17).unwrap();
    let text = corpus.to_runlength_string();
    let back = FrequencyCorpus::load(text.as_bytes(), CorpusFormat::RunlengthPairs).unwrap();
    assert_eq!(back, corpus);
    let fit = fit_cdf_zipf_lls(&back).unwrap();
    assert!((fit.r - 0.3).abs() < 0.02, "{}", fit.r);
}

#[test]
fn subsamples_shrink_consistently() {
    let dist = PasswordDistribution::pdf_zipf(0.02, 0.8, None).unwrap();
    let corpus = sample_corpus(&dist, 100_000, 3).unwrap();
    let mut prev_distinct = 0;
    for m in [1_000, 10_000, 50_000, 100_000] {
        let sub = corpus.subsample(m, 5).unwrap();
        assert_eq!(sub.n_users(), m);
        assert!(sub.n_distinct() >= prev_distinct);
        assert!(sub.counts()[0] <= corpus.counts()[0]);
        prev_distinct = sub.n_distinct();
    }
    assert_eq!(corpus.subsample(100_000, 9).unwrap(), corpus);
}

#[test]
fn bounds_bracket_the_model_attacker() {
    let dist = PasswordDistribution::pdf_zipf(0.01, 0.8, None).unwrap();
    let corpus = sample_corpus(&dist, 100_000, 21).unwrap();
    let lb = lower_bound_cracked(&corpus, 2, 10.0).unwrap();
    let ub = upper_bound_cracked(&corpus, 2, 10.0, 0.1, 50).unwrap();
    let at_lb = optimal_threshold(
        &dist,
        AttackerParams::new(lb.v_over_k, 1.0, 1.0).unwrap(),
        AttackMode::BruteForce,
    )
    .unwrap();
    let at_ub = optimal_threshold(
        &dist,
        AttackerParams::new(ub.v_over_k, 1.0, 1.0).unwrap(),
        AttackMode::BruteForce,
    )
    .unwrap();
    assert!(at_lb.fraction_cracked >= lb.bound_fraction);
    assert!(at_ub.fraction_cracked <= ub.bound_fraction);
}

#[test]
fn perturbation_keeps_corpus_valid() {
    let corpus = FrequencyCorpus::from_counts(vec![500, 120, 40, 9, 3, 1, 1]).unwrap();
    let noisy = perturb(
        &corpus,
        &PerturbParams {
            epsilon_dp: 0.5,
            n_trials: 1,
            seed: 8,
        },
    )
    .unwrap();
    assert!(noisy.counts().windows(2).all(|w| w[0] >= w[1]));
    assert!(noisy.counts().iter().all(|&c| c > 0));
    assert_eq!(
        noisy,
        perturb(
            &corpus,
            &PerturbParams {
                epsilon_dp: 0.5,
                n_trials: 1,
                seed: 8
            }
        )
        .unwrap()
    );
}
