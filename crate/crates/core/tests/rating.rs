mod common;

use common::outcome_record;
use proptest::prelude::*;
use tomgame_core::rating::*;
use tomgame_core::*;

fn iid_games(axis: Axis, a: &str, b: &str, p_a: f64, n: usize, rng: &mut GameRng) -> Vec<GameRecord> {
    (0..n)
        .map(|i| {
            let o = if rng.bernoulli(p_a) { Outcome::WinA } else { Outcome::WinB };
            outcome_record(axis, a, b, o, i as u64)
        })
        .collect()
}

#[test]
fn reference_values() {
    assert!((bt_prob(50.0) - 0.572).abs() < 1e-3);
    assert_eq!(hoeffding_n(0.072, 0.05).unwrap(), 356);
    let plan = power_plan(50.0, 0.05).unwrap();
    assert!((plan.p_star - bt_prob(50.0)).abs() < 1e-15);
    assert_eq!(plan.n, hoeffding_n(plan.eps, 0.05).unwrap());
}

#[test]
fn self_play_only_stays_at_initial() {
    let recs: Vec<GameRecord> = (0..20)
        .map(|i| outcome_record(Axis::RSR, "x", "x", Outcome::WinA, i))
        .collect();
    let t = run_rating(&recs, Axis::RSR, 1).unwrap();
    assert_eq!(t.rating("x"), Some(INITIAL_RATING));
    assert_eq!(t.row("x").unwrap().n_games, 20);
}

#[test]
fn hundred_straight_wins_open_a_wide_gap() {
    let recs: Vec<GameRecord> = (0..100)
        .map(|i| outcome_record(Axis::SCG, "w", "l", Outcome::WinA, i))
        .collect();
    let t = run_rating(&recs, Axis::SCG, 9).unwrap();
    let gap = t.rating("w").unwrap() - t.rating("l").unwrap();
    assert!(gap > 300.0, "{gap}");
    assert_eq!(t.rating("w").unwrap() + t.rating("l").unwrap(), 2.0 * INITIAL_RATING);
}

#[test]
fn mean_gap_tracks_true_gap() {
    let mut rng = GameRng::new(2024);
    for truth in [0.0, 100.0, 200.0] {
        let runs = 40;
        let mean: f64 = (0..runs)
            .map(|r| {
                let recs = iid_games(Axis::RSM, "a", "b", bt_prob(truth), 500, &mut rng);
                let t = run_rating(&recs, Axis::RSM, r).unwrap();
                t.rating("a").unwrap() - t.rating("b").unwrap()
            })
            .sum::<f64>()
            / runs as f64;
        assert!((mean - truth).abs() <= K_FACTOR, "Δ*={truth}: {mean}");
    }
}

#[test]
fn bootstrap_separates_a_dominant_agent() {
    let mut rng = GameRng::new(5);
    let recs = iid_games(Axis::ESM, "strong", "weak", 0.9, 60, &mut rng);
    let t = bootstrap_ci(&recs, Axis::ESM, 200, 3).unwrap();
    let s = t.row("strong").unwrap();
    let w = t.row("weak").unwrap();
    assert!(s.ci_lo.unwrap() > 1500.0 && w.ci_hi.unwrap() < 1500.0);
    assert!(s.ci_lo.unwrap() <= s.rating && s.rating <= s.ci_hi.unwrap());
}

#[test]
fn bootstrap_coin_flips_cover_the_start() {
    let mut covered = 0;
    for trial in 0..20 {
        let mut rng = GameRng::new(100 + trial);
        let names = ["a", "b", "c"];
        let mut recs = Vec::new();
        for i in 0..3 {
            for j in i + 1..3 {
                recs.extend(iid_games(Axis::RSR, names[i], names[j], 0.5, 12, &mut rng));
            }
        }
        let t = bootstrap_ci(&recs, Axis::RSR, 200, trial).unwrap();
        if t.rows.iter().all(|r| r.ci_lo.unwrap() <= 1500.0 && 1500.0 <= r.ci_hi.unwrap()) {
            covered += 1;
        }
    }
    assert!(covered >= 16, "{covered}/20");
}

#[test]
fn bootstrap_is_deterministic() {
    let mut rng = GameRng::new(8);
    let recs = iid_games(Axis::RSR, "a", "b", 0.6, 30, &mut rng);
    assert_eq!(bootstrap_ci(&recs, Axis::RSR, 50, 4).unwrap(), bootstrap_ci(&recs, Axis::RSR, 50, 4).unwrap());
}

#[test]
fn runs_test_false_positive_rate() {
    let mut rng = GameRng::new(77);
    let trials = 1000;
    let rejections = (0..trials)
        .filter(|_| {
            let seq: Vec<bool> = (0..100).map(|_| rng.bernoulli(0.5)).collect();
            runs_test(&seq).p < 0.05
        })
        .count();
    let rate = rejections as f64 / trials as f64;
    assert!((rate - 0.05).abs() <= 0.02, "{rate}");
}

#[test]
fn runs_test_flags_alternation_and_streaks() {
    let alt: Vec<bool> = (0..40).map(|i| i % 2 == 0).collect();
    let t = runs_test(&alt);
    assert_eq!(t.runs, 40);
    assert!(t.z > 0.0 && t.p < 0.001);
    let streak: Vec<bool> = (0..40).map(|i| i < 20).collect();
    assert!(runs_test(&streak).z < 0.0);
    assert!(runs_test(&[true; 10]).degenerate);
}

#[test]
fn pairing_runs_cover_every_pair() {
    let mut rng = GameRng::new(1);
    let mut recs = iid_games(Axis::RSR, "a", "b", 0.5, 15, &mut rng);
    recs.extend(iid_games(Axis::RSR, "b", "c", 0.5, 15, &mut rng));
    recs.extend(iid_games(Axis::RSR, "a", "a", 0.5, 15, &mut rng));
    let rows = pairing_runs_tests(&recs, Axis::RSR);
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r.n == 15 && (0.0..=1.0).contains(&r.p)));
}

#[test]
fn csv_columns() {
    let mut rng = GameRng::new(1);
    let recs = iid_games(Axis::RSR, "a", "b", 0.5, 10, &mut rng);
    let t = bootstrap_ci(&recs, Axis::RSR, 20, 1).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("r.csv");
    write_rating_csv(&[t], &p).unwrap();
    let text = std::fs::read_to_string(p).unwrap();
    assert_eq!(text.lines().next().unwrap(), "agent,axis,rating,n_games,boot_sd,ci_lo,ci_hi");
    assert_eq!(text.lines().count(), 3);
}

proptest! {
    #[test]
    fn updates_conserve_rating_sum(
        ra in 0u64..(3000u64 << 32), rb in 0u64..(3000u64 << 32), s in prop_oneof![Just(0.0), Just(0.5), Just(1.0)]
    ) {
        // every reachable rating lies on the 2^-32 transfer grid
        let (ra, rb) = (ra as f64 / 2f64.powi(32), rb as f64 / 2f64.powi(32));
        let (na, nb) = elo_update(ra, rb, s, K_FACTOR).unwrap();
        prop_assert_eq!(na + nb, ra + rb);
        prop_assert_eq!(na - ra, rb - nb);
    }

    #[test]
    fn sequences_conserve_total(outcomes in proptest::collection::vec(0u8..3, 1..200), seed in any::<u64>()) {
        let names = ["a", "b", "c", "d"];
        let recs: Vec<GameRecord> = outcomes
            .iter()
            .enumerate()
            .map(|(i, &o)| {
                let o = [Outcome::WinA, Outcome::WinB, Outcome::Draw][o as usize];
                outcome_record(Axis::RSR, names[i % 4], names[(i / 4 + i + 1) % 4], o, i as u64)
            })
            .collect();
        let t = run_rating(&recs, Axis::RSR, seed).unwrap();
        let total: f64 = t.rows.iter().map(|r| r.rating).sum();
        prop_assert_eq!(total, INITIAL_RATING * t.rows.len() as f64);
    }
}
