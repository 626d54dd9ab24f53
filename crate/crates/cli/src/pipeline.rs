//! Log directory to report bundle: estimates, ratings, convergence,
//! correlations, runs tests and the power plan.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;
use tomgame_core::analytics::{block_convergence, correlations, write_convergence_csv, DEFAULT_BLOCK};
use tomgame_core::estimation::{
    bic_compare, build_choice_dataset, build_choice_dataset_with, estimate_agent, write_estimates_csv,
    write_estimates_jsonl, BicReport, DatasetOptions, LambdaEstimate, PriorSpec,
};
use tomgame_core::rating::{
    bootstrap_ci, pairing_runs_tests, power_plan, write_rating_csv, PairRuns, RatingTable,
};
use tomgame_core::{AgentId, Axis, GameKind, GameRecord, Result};

use crate::bundle::{Bundle, FileEntry};
use crate::load_logs;

pub const REPORT_MANIFEST: &str = "report_manifest.json";

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PipelineOptions {
    pub elo_gap: f64,
    pub alpha: f64,
    pub n_boot: usize,
    /// Seed for rating order, bootstrap and permutation tests.
    pub seed: u64,
    pub block: u32,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            elo_gap: 50.0,
            alpha: 0.05,
            n_boot: 1000,
            seed: 0,
            block: DEFAULT_BLOCK,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportStatus {
    pub report: String,
    pub emitted: bool,
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportManifest {
    pub software: String,
    pub version: String,
    pub options: PipelineOptions,
    pub games: BTreeMap<String, usize>,
    pub reports: Vec<ReportStatus>,
    pub notes: Vec<String>,
    pub files: Vec<FileEntry>,
}

#[derive(Clone, Debug)]
pub struct PipelineOutcome {
    pub manifest: ReportManifest,
}

impl PipelineOutcome {
    /// Some report could not be produced.
    pub fn partial(&self) -> bool {
        self.manifest.reports.iter().any(|r| !r.emitted)
    }
}

struct Run {
    bundle: Bundle,
    reports: Vec<ReportStatus>,
    notes: Vec<String>,
}

impl Run {
    fn emitted(&mut self, report: &str) {
        self.reports.push(ReportStatus {
            report: report.into(),
            emitted: true,
            note: None,
        });
    }

    fn skipped(&mut self, report: &str, note: impl Into<String>) {
        self.reports.push(ReportStatus {
            report: report.into(),
            emitted: false,
            note: Some(note.into()),
        });
    }
}

fn agents_in(records: &[GameRecord]) -> Vec<AgentId> {
    let set: BTreeSet<AgentId> = records
        .iter()
        .flat_map(|r| [r.agent_a.clone(), r.agent_b.clone()])
        .collect();
    set.into_iter().collect()
}

/// Per-agent λ estimates on one game kind; agents whose data cannot be
/// estimated are listed in the notes.
pub fn estimate_kind(records: &[GameRecord], kind: GameKind) -> (Vec<LambdaEstimate>, Vec<String>) {
    let recs: Vec<GameRecord> = records.iter().filter(|r| r.game_kind == kind).cloned().collect();
    let results: Vec<(AgentId, Result<LambdaEstimate>)> = agents_in(&recs)
        .into_par_iter()
        .map(|a| {
            let est = build_choice_dataset(&recs, &a, kind).and_then(|d| estimate_agent(&d, PriorSpec::reference()));
            (a, est)
        })
        .collect();
    let mut rows = Vec::new();
    let mut notes = Vec::new();
    for (a, r) in results {
        match r {
            Ok(row) => rows.push(row),
            Err(e) => notes.push(format!("{kind} estimate for `{a}` skipped: {e}")),
        }
    }
    (rows, notes)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AgentBic {
    pub agent: String,
    pub report: BicReport,
}

/// BIC comparison of QRE, Nash and Random per agent on SC decisions.
pub fn bic_sc(records: &[GameRecord]) -> (Vec<AgentBic>, Vec<String>) {
    let recs: Vec<GameRecord> =
        records.iter().filter(|r| r.game_kind == GameKind::StrategicClaim).cloned().collect();
    let opts = DatasetOptions {
        sender_only: false,
        binarize: true,
    };
    let results: Vec<(AgentId, Result<BicReport>)> = agents_in(&recs)
        .into_par_iter()
        .map(|a| {
            let r = build_choice_dataset_with(&recs, &a, GameKind::StrategicClaim, opts).and_then(|d| bic_compare(&d));
            (a, r)
        })
        .collect();
    let mut rows = Vec::new();
    let mut notes = Vec::new();
    for (a, r) in results {
        match r {
            Ok(report) => rows.push(AgentBic {
                agent: a.to_string(),
                report,
            }),
            Err(e) => notes.push(format!("BIC for `{a}` skipped: {e}")),
        }
    }
    (rows, notes)
}

/// Bootstrap rating tables for every axis present in `records`, in axis order.
pub fn rate_all(records: &[GameRecord], n_boot: usize, seed: u64) -> Result<Vec<RatingTable>> {
    let axes: BTreeSet<Axis> = records.iter().map(|r| r.axis).collect();
    axes.into_iter()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|axis| bootstrap_ci(records, axis, n_boot, seed))
        .collect()
}

pub fn write_runs_csv(rows: &[PairRuns], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

fn estimates_stage(run: &mut Run, records: &[GameRecord], kind: GameKind) -> Result<()> {
    let name = format!("estimates_{}", kind.short());
    if !records.iter().any(|r| r.game_kind == kind) {
        run.skipped(&name, format!("no {kind} games"));
        return Ok(());
    }
    let (rows, notes) = estimate_kind(records, kind);
    run.notes.extend(notes);
    if rows.is_empty() {
        run.skipped(&name, "no agent could be estimated");
        return Ok(());
    }
    write_estimates_csv(&rows, run.bundle.track(&format!("{name}.csv")))?;
    write_estimates_jsonl(&rows, run.bundle.track(&format!("{name}.jsonl")))?;
    run.emitted(&name);
    Ok(())
}

/// Runs every analysis over the logs at `logs` and writes the bundle to `out`.
/// Reports whose inputs are missing are skipped and noted in the manifest.
pub fn pipeline(logs: &Path, out: &Path, opts: &PipelineOptions) -> Result<PipelineOutcome> {
    let records = load_logs(logs)?;
    pipeline_records(&records, out, opts)
}

pub fn pipeline_records(records: &[GameRecord], out: &Path, opts: &PipelineOptions) -> Result<PipelineOutcome> {
    let plan = power_plan(opts.elo_gap, opts.alpha)?;
    let mut run = Run {
        bundle: Bundle::create(out)?,
        reports: Vec::new(),
        notes: Vec::new(),
    };

    estimates_stage(&mut run, records, GameKind::StrategicClaim)?;
    estimates_stage(&mut run, records, GameKind::RepeatedPD)?;

    if records.iter().any(|r| r.game_kind == GameKind::StrategicClaim) {
        let (rows, notes) = bic_sc(records);
        run.notes.extend(notes);
        run.bundle.write_json("bic_sc.json", &rows)?;
        run.emitted("bic_sc");
    } else {
        run.skipped("bic_sc", "no sc games");
    }

    let tables = if records.is_empty() {
        run.skipped("ratings", "no games");
        Vec::new()
    } else {
        let tables = rate_all(records, opts.n_boot, opts.seed)?;
        for t in &tables {
            run.notes.extend(t.notes.iter().cloned());
        }
        write_rating_csv(&tables, run.bundle.track("ratings.csv"))?;
        run.emitted("ratings");
        tables
    };

    match block_convergence(records, opts.block) {
        Ok(rep) => {
            write_convergence_csv(&rep, run.bundle.track("convergence.csv"))?;
            run.bundle.write_json("convergence_summary.json", &rep)?;
            run.emitted("convergence");
        }
        Err(e) => run.skipped("convergence", e.to_string()),
    }

    let control = tables.iter().any(|t| t.axis == Axis::Control).then_some(Axis::Control);
    let social = tables.iter().filter(|t| t.axis != Axis::Control).count();
    if social < 2 {
        run.skipped("correlations", format!("need >= 2 social axes, got {social}"));
    } else {
        match correlations(&tables, control, opts.seed) {
            Ok(m) => {
                run.bundle.write_json("correlations.json", &m)?;
                run.emitted("correlations");
            }
            Err(e) => run.skipped("correlations", e.to_string()),
        }
    }

    if records.is_empty() {
        run.skipped("runs_tests", "no games");
    } else {
        let rows: Vec<PairRuns> = Axis::ALL.iter().flat_map(|&a| pairing_runs_tests(records, a)).collect();
        write_runs_csv(&rows, &run.bundle.track("runs_tests.csv"))?;
        run.emitted("runs_tests");
    }

    run.bundle.write_json("power.json", &plan)?;
    run.emitted("power");

    let mut games = BTreeMap::new();
    for r in records {
        *games.entry(r.game_kind.short().to_string()).or_insert(0) += 1;
    }
    let manifest = ReportManifest {
        software: env!("CARGO_PKG_NAME").to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        options: opts.clone(),
        games,
        reports: run.reports,
        notes: run.notes,
        files: run.bundle.entries()?,
    };
    run.bundle.write_json(REPORT_MANIFEST, &manifest)?;
    Ok(PipelineOutcome { manifest })
}
