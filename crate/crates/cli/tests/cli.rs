use std::path::Path;
use std::process::Command;

use tomgame_cli::bundle::sha256_file;
use tomgame_cli::pipeline::{pipeline, PipelineOptions, REPORT_MANIFEST};
use tomgame_cli::{load_logs, run_tournament, TournamentConfig};
use tomgame_core::{AgentKind, AgentSpec, GameKind};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tomgame"))
}

fn config(dir: &Path, agents: Vec<AgentSpec>, kinds: &[&str], reps: usize) -> TournamentConfig {
    TournamentConfig {
        agents,
        game_kinds: kinds.iter().map(|s| s.to_string()).collect(),
        replications: reps,
        replications_per_kind: Default::default(),
        master_seed: 11,
        condition_count: 150,
        include_self_play: true,
        output_dir: dir.to_path_buf(),
    }
}

fn seven() -> Vec<AgentSpec> {
    (0..7)
        .map(|i| match i % 3 {
            0 => AgentSpec::new(format!("n{i}"), AgentKind::Nash),
            1 => AgentSpec::new(format!("r{i}"), AgentKind::Random),
            _ => AgentSpec::new(format!("q{i}"), AgentKind::Qre { lambda: i as f64 / 3.0 }),
        })
        .collect()
}

fn read_all(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.is_file())
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect();
    v.sort();
    v
}

#[test]
fn two_agents_sc_ten_reps_is_thirty_games_and_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let agents = vec![
        AgentSpec::new("a", AgentKind::Nash),
        AgentSpec::new("b", AgentKind::Qre { lambda: 1.0 }),
    ];
    let t1 = run_tournament(&config(&dir.path().join("1"), agents.clone(), &["sc"], 10)).unwrap();
    run_tournament(&config(&dir.path().join("2"), agents, &["sc"], 10)).unwrap();
    assert_eq!(t1.manifest.total_games, 30);
    assert_eq!(t1.manifest.pairings, 3);
    assert_eq!(read_all(&dir.path().join("1")), read_all(&dir.path().join("2")));
    assert_eq!(load_logs(&dir.path().join("1")).unwrap().len(), 30);
}

#[test]
fn seven_agents_five_kinds_is_1400_games_with_complete_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let t = run_tournament(&config(dir.path(), seven(), &["sc", "rpd", "stst", "dixit", "auction"], 10)).unwrap();
    assert_eq!(t.manifest.total_games, 1400);
    assert_eq!(t.manifest.games.len(), 1400);
    assert_eq!(t.manifest.files.len(), 5);
    for f in &t.manifest.files {
        assert_eq!(sha256_file(&dir.path().join(&f.path)).unwrap(), f.sha256);
    }
}

#[test]
fn nash_self_play_estimate_is_flagged() {
    let dir = tempfile::tempdir().unwrap();
    let logs = dir.path().join("logs");
    run_tournament(&config(&logs, vec![AgentSpec::new("nash", AgentKind::Nash)], &["sc"], 30)).unwrap();
    let out = dir.path().join("report");
    let o = pipeline(&logs, &out, &PipelineOptions { n_boot: 50, ..Default::default() }).unwrap();
    assert!(o.partial());
    let text = std::fs::read_to_string(out.join("estimates_sc.jsonl")).unwrap();
    let row: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    assert_eq!(row["agent"], "nash");
    let flagged = row["near_boundary"] == true || row["unidentified"] == true || row["widen_grid"] == true;
    assert!(flagged, "{row}");
}

#[test]
fn empty_directory_skips_every_report() {
    let dir = tempfile::tempdir().unwrap();
    let logs = dir.path().join("empty");
    std::fs::create_dir(&logs).unwrap();
    let o = pipeline(&logs, &dir.path().join("r"), &PipelineOptions::default()).unwrap();
    assert!(o.manifest.reports.iter().filter(|r| r.report != "power").all(|r| !r.emitted));
    let st = bin().arg("analyze").arg(&logs).arg("--out").arg(dir.path().join("r2")).status().unwrap();
    assert_eq!(st.code(), Some(3));
}

#[test]
fn pipeline_is_idempotent_and_manifest_complete() {
    let dir = tempfile::tempdir().unwrap();
    let logs = dir.path().join("logs");
    run_tournament(&config(&logs, seven(), &["sc", "rpd", "auction"], 3)).unwrap();
    let opts = PipelineOptions { n_boot: 100, ..Default::default() };
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let o = pipeline(&logs, &a, &opts).unwrap();
    pipeline(&logs, &b, &opts).unwrap();
    assert_eq!(read_all(&a), read_all(&b));
    let listed: Vec<&str> = o.manifest.files.iter().map(|f| f.path.as_str()).collect();
    for (name, _) in read_all(&a) {
        assert!(name == REPORT_MANIFEST || listed.contains(&name.as_str()), "{name} unlisted");
    }
    for f in &o.manifest.files {
        assert_eq!(sha256_file(&a.join(&f.path)).unwrap(), f.sha256);
    }
    // 28 pairings on each of the three axes
    let runs = std::fs::read_to_string(a.join("runs_tests.csv")).unwrap();
    assert_eq!(runs.lines().count(), 1 + 3 * 28);
    assert!(runs.lines().next().unwrap().contains(",p,"));
    assert!(o.manifest.reports.iter().any(|r| r.report == "correlations" && r.emitted));
}

#[test]
fn commands_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("t.toml");
    std::fs::write(
        &cfg,
        r#"
master_seed = 3
game_kinds = ["sc", "rpd"]
replications = 4
output_dir = "logs"

[[agents]]
id = "nash"
kind = "nash"

[[agents]]
id = "q"
kind = "qre"
lambda = 1.5
"#,
    )
    .unwrap();
    let st = bin().arg("tournament").arg(&cfg).output().unwrap();
    assert_eq!(st.status.code(), Some(0), "{}", String::from_utf8_lossy(&st.stderr));
    let logs = dir.path().join("logs");
    assert!(logs.join("sc.jsonl").exists() && logs.join("manifest.json").exists());

    let est = bin().args(["estimate"]).arg(&logs).args(["--game", "sc"]).output().unwrap();
    assert_eq!(est.status.code(), Some(0));
    let csv = String::from_utf8(est.stdout).unwrap();
    assert!(csv.starts_with("agent,game_kind,n,lambda_mle,"));
    assert_eq!(csv.lines().count(), 3);

    let rate = bin().arg("rate").arg(logs.join("rpd.jsonl")).args(["--axis", "RSM", "--boot", "100"]).output().unwrap();
    assert_eq!(rate.status.code(), Some(0));
    assert!(String::from_utf8(rate.stdout).unwrap().starts_with("agent,axis,rating,n_games,boot_sd,ci_lo,ci_hi"));

    let power = bin().args(["power", "--elo-gap", "50", "--alpha", "0.05"]).output().unwrap();
    assert_eq!(power.status.code(), Some(0));
    let plan: serde_json::Value = serde_json::from_slice(&power.stdout).unwrap();
    assert!(plan["n"].as_u64().unwrap() > 300);

    // usage errors
    assert_eq!(bin().arg("bogus").status().unwrap().code(), Some(1));
    assert_eq!(bin().args(["estimate", "x", "--game", "chess"]).status().unwrap().code(), Some(1));
    assert_eq!(bin().arg("rate").arg(&logs).args(["--axis", "XYZ"]).status().unwrap().code(), Some(1));
    // validation errors
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "master_seed = 1\ngame_kinds = []\nagents = []\n").unwrap();
    assert_eq!(bin().arg("tournament").arg(&bad).status().unwrap().code(), Some(2));
    let corrupt = dir.path().join("corrupt.jsonl");
    std::fs::write(&corrupt, "{not json}\n").unwrap();
    assert_eq!(bin().arg("analyze").arg(&corrupt).status().unwrap().code(), Some(2));
    // partial: no RPD games in the SC log
    let partial = bin().args(["estimate"]).arg(logs.join("sc.jsonl")).args(["--game", "rpd"]).status().unwrap();
    assert_eq!(partial.code(), Some(3));
}

#[test]
fn config_kinds_parse() {
    let c = config(Path::new("x"), seven(), &["sc", "dixit"], 1);
    assert_eq!(c.kinds().unwrap(), vec![GameKind::StrategicClaim, GameKind::TextDixit]);
}
