//! Experiment harness: runs solver trials over parameter grids, records one
//! CSV row per trial, and aggregates success fractions. Rows are keyed by
//! their parameters and per-trial seed, so runs are resumable and the output
//! order never depends on scheduling.

use std::collections::HashSet;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;

use crate::instance::{
    derive_trial_seed, random_conjugacy_instance, random_instance, random_membership_instance,
    random_parametric_instance, ExperimentParams, RNG_ALGORITHM,
};
use crate::solver::{
    solve, solve_membership, BacktrackConfig, BeamConfig, HaltReason, HaltRule, SolveError,
};

pub const CSV_HEADER: &str =
    "seed,N,m,n,k,l,M,variant,success,rank,steps,halt_reason,multiplications,length_evals,wall_time_ms";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variant {
    Plain,
    Conjugacy,
    Membership,
    Parametric,
    Backtracking,
}

impl Variant {
    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Plain => "plain",
            Variant::Conjugacy => "conjugacy",
            Variant::Membership => "membership",
            Variant::Parametric => "parametric",
            Variant::Backtracking => "backtracking",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "plain" => Some(Variant::Plain),
            "conjugacy" => Some(Variant::Conjugacy),
            "membership" => Some(Variant::Membership),
            "parametric" => Some(Variant::Parametric),
            "backtracking" => Some(Variant::Backtracking),
            _ => None,
        }
    }

    fn seed_tag(self) -> u8 {
        match self {
            Variant::Plain => 0,
            Variant::Conjugacy => 1,
            Variant::Membership => 2,
            Variant::Parametric => 3,
            Variant::Backtracking => 4,
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Solver knobs shared by the CLI and the harness.
#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    pub tau: f64,
    pub patience: usize,
    pub prune_immediate_inverse: bool,
    pub backtrack: Option<BacktrackConfig>,
    /// Conjugacy trials: whether the conjugated element is given to the
    /// solver (two-sided peeling) or withheld (plain fixed-step solve).
    pub known_prefix: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tau: 0.5,
            patience: 1,
            prune_immediate_inverse: true,
            backtrack: None,
            known_prefix: true,
        }
    }
}

/// One experiment outcome; the CSV columns are exactly these fields in
/// declared order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrialRecord {
    pub seed: u64,
    pub strands: u32,
    pub generators: u32,
    pub secret_length: u32,
    pub equations: u32,
    pub word_length: u32,
    pub beam_width: u32,
    pub variant: Variant,
    pub success: bool,
    /// 1-based position of the truth (or found presentation) in the final
    /// list; 0 when absent.
    pub rank: usize,
    pub steps: usize,
    pub halt_reason: HaltReason,
    pub multiplications: u64,
    pub length_evals: u64,
    pub wall_time_ms: u64,
}

impl TrialRecord {
    /// Sort and dedup key: every dimension except the measurements.
    pub fn key(&self) -> (u32, u32, u32, u32, u32, u32, Variant, u64) {
        (
            self.strands,
            self.generators,
            self.secret_length,
            self.equations,
            self.word_length,
            self.beam_width,
            self.variant,
            self.seed,
        )
    }

    pub fn params(&self) -> ExperimentParams {
        ExperimentParams::new(
            self.strands,
            self.generators,
            self.secret_length,
            self.equations,
            self.word_length,
            self.beam_width,
        )
        .with_seed(self.seed)
    }

    pub fn to_csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.seed,
            self.strands,
            self.generators,
            self.secret_length,
            self.equations,
            self.word_length,
            self.beam_width,
            self.variant,
            self.success,
            self.rank,
            self.steps,
            self.halt_reason,
            self.multiplications,
            self.length_evals,
            self.wall_time_ms
        )
    }

    pub fn parse_csv_row(line: &str) -> Result<Self, String> {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 15 {
            return Err(format!("expected 15 fields, got {}", fields.len()));
        }
        let int = |i: usize| -> Result<u64, String> {
            fields[i]
                .parse()
                .map_err(|_| format!("bad integer field {:?}", fields[i]))
        };
        Ok(TrialRecord {
            seed: int(0)?,
            strands: int(1)? as u32,
            generators: int(2)? as u32,
            secret_length: int(3)? as u32,
            equations: int(4)? as u32,
            word_length: int(5)? as u32,
            beam_width: int(6)? as u32,
            variant: Variant::parse(fields[7])
                .ok_or_else(|| format!("bad variant {:?}", fields[7]))?,
            success: match fields[8] {
                "true" => true,
                "false" => false,
                other => return Err(format!("bad success flag {:?}", other)),
            },
            rank: int(9)? as usize,
            steps: int(10)? as usize,
            halt_reason: fields[11].parse().map_err(|e: String| e)?,
            multiplications: int(12)?,
            length_evals: int(13)?,
            wall_time_ms: int(14)?,
        })
    }
}

/// Builds the per-variant beam config for a trial.
pub fn build_config(
    params: &ExperimentParams,
    variant: Variant,
    opts: &SolveOptions,
) -> BeamConfig {
    let mut cfg =
        BeamConfig::fixed_steps(params.beam_width as usize, params.secret_length as usize);
    cfg.patience = opts.patience;
    cfg.prune_immediate_inverse = opts.prune_immediate_inverse;
    match variant {
        Variant::Plain | Variant::Membership => {}
        Variant::Conjugacy => {
            if opts.known_prefix {
                cfg.halt = HaltRule::Parametric { tau: opts.tau };
                cfg.two_sided = true;
            }
        }
        Variant::Parametric => {
            cfg.halt = HaltRule::Parametric { tau: opts.tau };
        }
        Variant::Backtracking => {
            cfg.backtrack = Some(opts.backtrack.unwrap_or_default());
        }
    }
    cfg
}

/// Runs one seeded trial and records the outcome.
pub fn run_trial(
    params: &ExperimentParams,
    variant: Variant,
    opts: &SolveOptions,
) -> Result<TrialRecord, SolveError> {
    let cfg = build_config(params, variant, opts);
    let start = Instant::now();
    let (result, success, rank) = match variant {
        Variant::Plain | Variant::Backtracking => {
            let inst = random_instance(params);
            let truth = inst.truth.as_deref().expect("generated instances carry truth");
            let result = solve(&inst.system, &cfg, Some(truth))?;
            let rank = result.rank_of_truth(truth);
            (result, rank >= 1, rank)
        }
        Variant::Parametric => {
            let inst = random_parametric_instance(params);
            let truth = inst.truth.as_deref().expect("generated instances carry truth");
            let result = solve(&inst.system, &cfg, Some(truth))?;
            let rank = result.rank_of_truth(truth);
            (result, rank >= 1, rank)
        }
        Variant::Conjugacy => {
            let inst = random_conjugacy_instance(params);
            let truth = inst.truth.as_deref().expect("generated instances carry truth");
            if opts.known_prefix {
                let result = solve(&inst.system, &cfg, Some(truth))?;
                // With early parametric halting the candidate sequences can
                // be shorter than the truth, so compare reconstructed
                // elements instead of letter sequences.
                let gen_words: Vec<_> = inst
                    .system
                    .generators()
                    .iter()
                    .map(|g| g.word.clone())
                    .collect();
                let x = crate::instance::expand_letters(truth, &gen_words);
                let x_nf = crate::normal::GarsideNormalForm::from_word(&x);
                let rank = result
                    .ranked
                    .iter()
                    .position(|c| c.reconstruction(&inst.system) == x_nf)
                    .map(|p| p + 1)
                    .unwrap_or(0);
                (result, rank >= 1, rank)
            } else {
                let result = solve(&inst.system, &cfg, Some(truth))?;
                let rank = result.rank_of_truth(truth);
                (result, rank >= 1, rank)
            }
        }
        Variant::Membership => {
            let inst = random_membership_instance(params);
            let g = inst.system.equations()[0].b.clone();
            let gens = inst
                .system
                .generators()
                .iter()
                .map(|g| g.word.clone())
                .collect();
            let outcome = solve_membership(g, gens, &cfg)?;
            let success = outcome.presentation.is_some();
            let rank = outcome.found_rank;
            (outcome.result, success, rank)
        }
    };
    Ok(TrialRecord {
        seed: params.seed,
        strands: params.strands,
        generators: params.generators,
        secret_length: params.secret_length,
        equations: params.equations,
        word_length: params.word_length,
        beam_width: params.beam_width,
        variant,
        success,
        rank,
        steps: result.halted_at_step,
        halt_reason: result.halt_reason,
        multiplications: result.op_counts.multiplications,
        length_evals: result.op_counts.length_evaluations,
        wall_time_ms: start.elapsed().as_millis() as u64,
    })
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub cells: Vec<ExperimentParams>,
    pub trials: u32,
    pub master_seed: u64,
    pub variant: Variant,
    pub options: SolveOptions,
}

impl ExperimentConfig {
    /// All (cell, trial) jobs with their derived seeds, in deterministic
    /// order.
    pub fn jobs(&self) -> Vec<ExperimentParams> {
        let mut out = Vec::with_capacity(self.cells.len() * self.trials as usize);
        for cell in &self.cells {
            for trial in 0..self.trials {
                let seed =
                    derive_trial_seed(self.master_seed, cell, self.variant.seed_tag(), trial);
                out.push(cell.with_seed(seed));
            }
        }
        out
    }
}

/// Runs all jobs in parallel and returns the records sorted by key.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<TrialRecord>, SolveError> {
    let jobs = cfg.jobs();
    let mut records = jobs
        .par_iter()
        .map(|params| run_trial(params, cfg.variant, &cfg.options))
        .collect::<Result<Vec<_>, _>>()?;
    records.sort_by_key(|r| r.key());
    Ok(records)
}

/// Like `run_experiment` but skips jobs whose keys already exist in
/// `existing` (resume support).
pub fn run_experiment_resuming(
    cfg: &ExperimentConfig,
    existing: &[TrialRecord],
) -> Result<Vec<TrialRecord>, SolveError> {
    let done: HashSet<_> = existing.iter().map(|r| r.key()).collect();
    let jobs: Vec<ExperimentParams> = cfg
        .jobs()
        .into_iter()
        .filter(|params| {
            let key = (
                params.strands,
                params.generators,
                params.secret_length,
                params.equations,
                params.word_length,
                params.beam_width,
                cfg.variant,
                params.seed,
            );
            !done.contains(&key)
        })
        .collect();
    let fresh = jobs
        .par_iter()
        .map(|params| run_trial(params, cfg.variant, &cfg.options))
        .collect::<Result<Vec<_>, _>>()?;
    let mut records: Vec<TrialRecord> = existing.to_vec();
    records.extend(fresh);
    records.sort_by_key(|r| r.key());
    records.dedup_by_key(|r| r.key());
    Ok(records)
}

pub fn render_csv(records: &[TrialRecord], master_seed: u64) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "# rng={} master_seed={}\n",
        RNG_ALGORITHM, master_seed
    ));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&r.to_csv_row());
        out.push('\n');
    }
    out
}

/// Parses experiment CSV text. The first non-comment line must be the
/// documented header. A malformed final line (a partial write from an
/// interrupted run) is dropped and reported via the second return value;
/// malformed lines elsewhere are errors.
pub fn parse_csv(text: &str) -> Result<(Vec<TrialRecord>, bool), String> {
    let mut records = Vec::new();
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'))
        .collect();
    match lines.first() {
        Some((_, header)) if *header == CSV_HEADER => {}
        Some((lineno, header)) => {
            return Err(format!(
                "line {}: header {:?} does not match the trial-record schema",
                lineno + 1,
                header
            ))
        }
        None => return Ok((records, false)),
    }
    let mut dropped_partial = false;
    for (pos, (lineno, line)) in lines.iter().enumerate().skip(1) {
        match TrialRecord::parse_csv_row(line) {
            Ok(r) => records.push(r),
            Err(e) => {
                if pos + 1 == lines.len() {
                    dropped_partial = true;
                } else {
                    return Err(format!("line {}: {}", lineno + 1, e));
                }
            }
        }
    }
    Ok((records, dropped_partial))
}

pub fn read_csv_file(path: &Path) -> Result<(Vec<TrialRecord>, bool), String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {}", path.display(), e))?;
    parse_csv(&text)
}

pub fn write_csv_file(
    path: &Path,
    records: &[TrialRecord],
    master_seed: u64,
) -> std::io::Result<()> {
    let tmp = path.with_extension("tmp");
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(render_csv(records, master_seed).as_bytes())?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)
}

/// Per-cell success fractions, sorted by cell key.
pub fn success_by_cell(
    records: &[TrialRecord],
) -> Vec<((u32, u32, u32, u32, u32, u32), usize, usize)> {
    let mut cells: Vec<(u32, u32, u32, u32, u32, u32)> = records
        .iter()
        .map(|r| {
            (
                r.strands,
                r.generators,
                r.secret_length,
                r.equations,
                r.word_length,
                r.beam_width,
            )
        })
        .collect();
    cells.sort_unstable();
    cells.dedup();
    cells
        .into_iter()
        .map(|cell| {
            let of_cell = records.iter().filter(|r| {
                (
                    r.strands,
                    r.generators,
                    r.secret_length,
                    r.equations,
                    r.word_length,
                    r.beam_width,
                ) == cell
            });
            let total = of_cell.clone().count();
            let wins = of_cell.filter(|r| r.success).count();
            (cell, wins, total)
        })
        .collect()
}

/// CSV rows reshaped for the logistic fit.
pub fn fit_rows(records: &[TrialRecord]) -> Vec<(ExperimentParams, bool)> {
    records.iter().map(|r| (r.params(), r.success)).collect()
}
