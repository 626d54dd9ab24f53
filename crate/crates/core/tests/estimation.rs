mod common;

use proptest::prelude::*;
use tomgame_core::estimation::*;
use tomgame_core::*;

fn qre_data(lambda: f64, n: usize, seed: u64) -> ChoiceDataset {
    synthetic_dataset(Generator::Qre(lambda), n, seed, DatasetOptions::default()).unwrap()
}

#[test]
fn lambda_zero_data_lands_near_the_boundary() {
    let d = qre_data(0.0, 2000, 3);
    let m = mle_lambda(&d).unwrap();
    assert!(m.lambda <= 0.05, "{}", m.lambda);
    assert!(m.near_boundary);
    // Bayesian regularization keeps the posterior mean strictly positive
    let b = bayes_lambda(&d, PriorSpec::reference(), GRID_STEP).unwrap();
    assert!(b.mean > 0.0);
}

#[test]
fn dataset_counts_sender_decisions() {
    // 27 SC games between one agent and Nash: 27 * 10 rounds = 270 sender obs per seat appearance
    let q = AgentSpec::new("q", AgentKind::Qre { lambda: 1.0 });
    let n = AgentSpec::new("n", AgentKind::Nash);
    let recs: Vec<GameRecord> = (0..270)
        .map(|i| {
            let cond = ConditionSet::generate(GameKind::StrategicClaim, 1, i % 150);
            run_game(GameKind::StrategicClaim, &cond, &q, &n, i as u64).unwrap()
        })
        .collect();
    let d = build_choice_dataset(&recs, &AgentId::new("q"), GameKind::StrategicClaim).unwrap();
    assert_eq!(d.sender_count(), 2700);
    assert_eq!(d.len(), 5400);
    let opp = d.opponent.as_ref().unwrap();
    let total: f64 = opp.threshold_freq.iter().sum();
    assert!((total - 1.0).abs() < 1e-12);
    assert!(build_choice_dataset(&recs, &AgentId::new("absent"), GameKind::StrategicClaim).is_err());
}

#[test]
fn bayes_and_mle_agree_with_enough_data() {
    for (lambda, seed) in [(0.5, 11), (1.0, 12), (2.0, 13)] {
        let d = qre_data(lambda, 1000, seed);
        let m = mle_lambda(&d).unwrap();
        let b = bayes_lambda(&d, PriorSpec::reference(), GRID_STEP).unwrap();
        assert!((b.mean - m.lambda).abs() <= 0.02, "λ*={lambda}: {} vs {}", b.mean, m.lambda);
        assert!(b.hdi.0 <= m.lambda && m.lambda <= b.hdi.1);
    }
}

#[test]
fn prior_sensitivity_is_small_at_half() {
    let d = qre_data(0.5, 1000, 21);
    let s = prior_sensitivity(&d, &PriorSpec::sensitivity_set()).unwrap();
    assert!(s.range < 0.05, "{}", s.range);
}

#[test]
fn bic_recovers_generators() {
    let opts = DatasetOptions { sender_only: false, binarize: true };
    for (g, want) in [
        (Generator::Nash, BicModel::Nash),
        (Generator::Random, BicModel::Random),
        (Generator::Qre(0.4), BicModel::Qre),
    ] {
        let d = synthetic_dataset(g, 1000, 7, opts).unwrap();
        let r = bic_compare(&d).unwrap();
        assert_eq!(r.winner, want);
        let w: f64 = r.entries.iter().map(|e| e.weight).sum();
        assert!((w - 1.0).abs() < 1e-12);
    }
}

#[test]
fn estimate_report_round_trips_through_files() {
    let d = qre_data(1.0, 600, 5);
    let row = estimate_agent(&d, PriorSpec::reference()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    write_estimates_csv(std::slice::from_ref(&row), dir.path().join("e.csv")).unwrap();
    write_estimates_jsonl(std::slice::from_ref(&row), dir.path().join("e.jsonl")).unwrap();
    let csv = std::fs::read_to_string(dir.path().join("e.csv")).unwrap();
    let header: Vec<&str> = csv.lines().next().unwrap().split(',').collect();
    let json: serde_json::Value =
        serde_json::from_str(std::fs::read_to_string(dir.path().join("e.jsonl")).unwrap().lines().next().unwrap())
            .unwrap();
    let keys: Vec<&String> = json.as_object().unwrap().keys().collect();
    assert_eq!(header.len(), keys.len());
    for h in header {
        assert!(json.get(h).is_some(), "{h}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn loglik_is_concave(lambda in 0.0f64..3.0, seed in any::<u64>(), at in 0.0f64..5.0) {
        let d = qre_data(lambda, 200, seed);
        let (_, _, h) = loglik_derivatives(at, &d).unwrap();
        prop_assert!(h <= 1e-9);
    }

    #[test]
    fn mle_is_within_bounds(lambda in 0.0f64..4.0, seed in any::<u64>()) {
        let d = qre_data(lambda, 300, seed);
        let m = mle_lambda(&d).unwrap();
        prop_assert!((0.0..=LAMBDA_MAX).contains(&m.lambda));
        if let Some((lo, hi)) = m.ci {
            prop_assert!(lo >= 0.0 && lo <= m.lambda && m.lambda <= hi);
        }
    }
}
