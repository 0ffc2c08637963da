//! Command-line front end: single solves, experiment grids, logistic fits,
//! predictions and SVG plots.

use std::fs;
use std::path::PathBuf;
use std::process::exit;

use braid_lba::harness::{
    self, ExperimentConfig, SolveOptions, TrialRecord, Variant,
};
use braid_lba::instance::{parse_instance, GridSpec, Instance};
use braid_lba::length::{naive_garside_length, rg_length};
use braid_lba::normal::GarsideNormalForm;
use braid_lba::plot::{
    parse_trace_csv, render_trace_csv, strand_sweep_chart, success_curves_chart, trace_chart,
    TraceRow,
};
use braid_lba::solver::{
    solve, solve_membership, BacktrackConfig, BeamConfig, HaltReason, HaltRule, MembershipOutcome,
    SolveResult,
};
use braid_lba::stats::{
    fit_logistic, memory_doubling_factor, predict_success, required_memory,
    required_memory_floored, LogisticModel,
};
use braid_lba::word::BraidWord;

const USAGE: &str = "\
braid-lba: length-based solver for equations in braid-group subgroups

USAGE:
  braid-lba <command> [options]

COMMANDS:
  nf          print the left canonical form of a braid word
  len         print reduced and naive Garside lengths of a word
  solve       run the beam solver on an instance file
  conjugacy   solve b = X P X^-1 from a single-equation instance
  membership  find a presentation of g over the subgroup generators
  experiment  run a parameter grid and write a CSV of trial records
  fit         fit the logistic success model to an experiment CSV
  predict     evaluate the success model / memory formulas
  plot        render an SVG chart from experiment or trace data

Run `braid-lba <command> --help` for the command's options.
BRAID_THREADS sets the default worker count (see --threads).
";

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let code = match args.first().map(String::as_str) {
        None | Some("--help") | Some("-h") => {
            print!("{}", USAGE);
            if args.is_empty() {
                2
            } else {
                0
            }
        }
        Some("nf") => cmd_nf(&args[1..]),
        Some("len") => cmd_len(&args[1..]),
        Some("solve") => cmd_solve(&args[1..], Mode::Plain),
        Some("conjugacy") => cmd_solve(&args[1..], Mode::Conjugacy),
        Some("membership") => cmd_solve(&args[1..], Mode::Membership),
        Some("experiment") => cmd_experiment(&args[1..]),
        Some("fit") => cmd_fit(&args[1..]),
        Some("predict") => cmd_predict(&args[1..]),
        Some("plot") => cmd_plot(&args[1..]),
        Some(other) => {
            eprintln!("unknown command {:?}\n\n{}", other, USAGE);
            2
        }
    };
    exit(code);
}

fn fail(message: impl std::fmt::Display) -> i32 {
    eprintln!("error: {}", message);
    2
}

struct FlagParser<'a> {
    args: &'a [String],
    pos: usize,
    positional: Vec<String>,
}

impl<'a> FlagParser<'a> {
    fn new(args: &'a [String]) -> Self {
        FlagParser {
            args,
            pos: 0,
            positional: Vec::new(),
        }
    }

    fn value(&mut self, flag: &str) -> Result<String, String> {
        self.pos += 1;
        self.args
            .get(self.pos)
            .cloned()
            .ok_or_else(|| format!("missing value for {}", flag))
    }

    fn parsed<T: std::str::FromStr>(&mut self, flag: &str) -> Result<T, String> {
        let v = self.value(flag)?;
        v.parse()
            .map_err(|_| format!("bad value {:?} for {}", v, flag))
    }
}

fn setup_threads(threads: Option<usize>) -> Result<(), String> {
    let count = match threads {
        Some(t) => Some(t),
        None => match std::env::var("BRAID_THREADS") {
            Ok(v) => Some(
                v.parse()
                    .map_err(|_| format!("bad BRAID_THREADS value {:?}", v))?,
            ),
            Err(_) => None,
        },
    };
    if let Some(count) = count {
        if count == 0 {
            return Err("thread count must be at least 1".into());
        }
        // Ignore the error if a global pool already exists (e.g. in tests).
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(count)
            .build_global();
    }
    Ok(())
}

fn cmd_nf(args: &[String]) -> i32 {
    match word_from_args(args, "braid-lba nf --strands N \"1 -2 1\"") {
        Ok(Some(word)) => {
            println!("{}", GarsideNormalForm::from_word(&word).to_text());
            0
        }
        Ok(None) => 0,
        Err(e) => fail(e),
    }
}

fn cmd_len(args: &[String]) -> i32 {
    match word_from_args(args, "braid-lba len --strands N \"1 -2 1\"") {
        Ok(Some(word)) => {
            let nf = GarsideNormalForm::from_word(&word);
            println!("rg {}", rg_length(&nf));
            println!("naive {}", naive_garside_length(&nf));
            0
        }
        Ok(None) => 0,
        Err(e) => fail(e),
    }
}

/// Shared parsing for `nf` and `len`: a --strands flag plus one quoted word
/// argument (or `-` to read stdin).
fn word_from_args(args: &[String], usage: &str) -> Result<Option<BraidWord>, String> {
    let mut strands: Option<u32> = None;
    let mut p = FlagParser::new(args);
    while p.pos < args.len() {
        match args[p.pos].as_str() {
            "--help" | "-h" => {
                println!("usage: {}", usage);
                return Ok(None);
            }
            "--strands" | "-N" => strands = Some(p.parsed("--strands")?),
            other => p.positional.push(other.to_string()),
        }
        p.pos += 1;
    }
    let strands = strands.ok_or("missing --strands")?;
    let text = match p.positional.len() {
        0 => return Err(format!("missing word argument; usage: {}", usage)),
        _ => p.positional.join(" "),
    };
    let text = if text == "-" {
        let mut buf = String::new();
        std::io::Read::read_to_string(&mut std::io::stdin(), &mut buf)
            .map_err(|e| e.to_string())?;
        buf
    } else {
        text
    };
    BraidWord::parse(&text, strands)
        .map(Some)
        .map_err(|e| e.to_string())
}

#[derive(Clone, Copy, PartialEq)]
enum Mode {
    Plain,
    Conjugacy,
    Membership,
}

struct SolveArgs {
    instance: PathBuf,
    memory: usize,
    steps: Option<usize>,
    halt: Option<String>,
    tau: f64,
    patience: usize,
    prune: bool,
    backtrack: Option<BacktrackConfig>,
    unknown_p: bool,
    out: Option<PathBuf>,
    trace_out: Option<PathBuf>,
    threads: Option<usize>,
}

const SOLVE_USAGE: &str = "\
usage: braid-lba solve|conjugacy|membership <instance-file> [options]
  --memory M          beam width (default 64)
  --steps n           known generator length of X (enables fixed-step halting)
  --halt MODE         fixed | rises | parametric (default: fixed when steps
                      are known, otherwise rises)
  --tau T             parametric threshold (default 0.5)
  --patience P        non-decreasing steps tolerated by rises (default 1)
  --prune-inverse / --no-prune-inverse
                      toggle pruning of immediate-undo extensions (default on)
  --backtrack B,g     rewind B steps with beam width g*M on failure
  --unknown-p         conjugacy: withhold P (requires --steps)
  --out FILE          write the result report
  --trace-out FILE    write the per-step trace CSV
  --threads T         worker threads (default: BRAID_THREADS or all cores)

exit code: 0 success, 1 not found, 2 input error
";

fn parse_solve_args(args: &[String]) -> Result<Option<SolveArgs>, String> {
    let mut out = SolveArgs {
        instance: PathBuf::new(),
        memory: 64,
        steps: None,
        halt: None,
        tau: 0.5,
        patience: 1,
        prune: true,
        backtrack: None,
        unknown_p: false,
        out: None,
        trace_out: None,
        threads: None,
    };
    let mut p = FlagParser::new(args);
    while p.pos < args.len() {
        match args[p.pos].as_str() {
            "--help" | "-h" => {
                print!("{}", SOLVE_USAGE);
                return Ok(None);
            }
            "--memory" | "-M" => out.memory = p.parsed("--memory")?,
            "--steps" => out.steps = Some(p.parsed("--steps")?),
            "--halt" => out.halt = Some(p.value("--halt")?),
            "--tau" => out.tau = p.parsed("--tau")?,
            "--patience" => out.patience = p.parsed("--patience")?,
            "--prune-inverse" => out.prune = true,
            "--no-prune-inverse" => out.prune = false,
            "--backtrack" => {
                let v = p.value("--backtrack")?;
                out.backtrack = Some(parse_backtrack(&v)?);
            }
            "--unknown-p" => out.unknown_p = true,
            "--out" => out.out = Some(PathBuf::from(p.value("--out")?)),
            "--trace-out" => out.trace_out = Some(PathBuf::from(p.value("--trace-out")?)),
            "--threads" => out.threads = Some(p.parsed("--threads")?),
            other if !other.starts_with("--") => p.positional.push(other.to_string()),
            other => return Err(format!("unknown flag {}", other)),
        }
        p.pos += 1;
    }
    match p.positional.len() {
        1 => {
            out.instance = PathBuf::from(&p.positional[0]);
            Ok(Some(out))
        }
        0 => Err("missing instance file".into()),
        _ => Err("more than one instance file given".into()),
    }
}

fn parse_backtrack(v: &str) -> Result<BacktrackConfig, String> {
    let parts: Vec<&str> = v.split(',').collect();
    if parts.len() != 2 {
        return Err(format!("--backtrack expects B,g, got {:?}", v));
    }
    let lookback = parts[0]
        .parse()
        .map_err(|_| format!("bad lookback {:?}", parts[0]))?;
    let beam_multiplier = parts[1]
        .parse()
        .map_err(|_| format!("bad multiplier {:?}", parts[1]))?;
    Ok(BacktrackConfig {
        lookback,
        beam_multiplier,
        ..BacktrackConfig::default()
    })
}

fn build_solve_config(a: &SolveArgs, inst: &Instance, mode: Mode) -> Result<BeamConfig, String> {
    let steps = a.steps.or(inst.truth.as_ref().map(|t| t.len()));
    let halt = match a.halt.as_deref() {
        Some("fixed") => HaltRule::FixedSteps,
        Some("rises") => HaltRule::ScoreSumRises,
        Some("parametric") => HaltRule::Parametric { tau: a.tau },
        Some(other) => return Err(format!("unknown halt mode {:?}", other)),
        None => match mode {
            Mode::Conjugacy if !a.unknown_p => HaltRule::Parametric { tau: a.tau },
            _ if steps.is_some() => HaltRule::FixedSteps,
            _ => HaltRule::ScoreSumRises,
        },
    };
    Ok(BeamConfig {
        beam_width: a.memory,
        max_steps: steps,
        halt,
        patience: a.patience,
        two_sided: mode == Mode::Conjugacy && !a.unknown_p,
        prune_immediate_inverse: a.prune,
        backtrack: a.backtrack,
    })
}

fn cmd_solve(args: &[String], mode: Mode) -> i32 {
    let a = match parse_solve_args(args) {
        Ok(Some(a)) => a,
        Ok(None) => return 0,
        Err(e) => return fail(e),
    };
    if let Err(e) = setup_threads(a.threads) {
        return fail(e);
    }
    let text = match fs::read_to_string(&a.instance) {
        Ok(t) => t,
        Err(e) => return fail(format!("{}: {}", a.instance.display(), e)),
    };
    let inst = match parse_instance(&text) {
        Ok(i) => i,
        Err(e) => return fail(e),
    };
    for idx in inst.system.short_generator_warnings() {
        eprintln!(
            "warning: generator {} collapses to reduced length {} (defining word has {} letters)",
            idx + 1,
            rg_length(&inst.system.generators()[idx].form),
            inst.system.generators()[idx].word.len()
        );
    }
    let cfg = match build_solve_config(&a, &inst, mode) {
        Ok(c) => c,
        Err(e) => return fail(e),
    };

    let truth = inst.truth.as_deref();
    let run = || -> Result<(SolveResult, Option<MembershipOutcome>), String> {
        match mode {
            Mode::Membership => {
                if inst.system.equation_count() != 1 {
                    return Err("membership expects a single-equation instance".into());
                }
                let g = inst.system.equations()[0].b.clone();
                let gens = inst
                    .system
                    .generators()
                    .iter()
                    .map(|g| g.word.clone())
                    .collect();
                let outcome = solve_membership(g, gens, &cfg).map_err(|e| e.to_string())?;
                Ok((outcome.result.clone(), Some(outcome)))
            }
            Mode::Conjugacy => {
                if inst.system.equation_count() != 1 {
                    return Err("conjugacy expects a single-equation instance".into());
                }
                if !a.unknown_p && inst.system.equations()[0].prefix.is_none() {
                    return Err("conjugacy with known P needs a `p` line (or --unknown-p)".into());
                }
                let mut cfg = cfg.clone();
                if a.unknown_p {
                    cfg.two_sided = false;
                    cfg.halt = HaltRule::FixedSteps;
                    if cfg.max_steps.is_none() {
                        return Err("--unknown-p requires --steps".into());
                    }
                }
                solve(&inst.system, &cfg, truth)
                    .map(|r| (r, None))
                    .map_err(|e| e.to_string())
            }
            Mode::Plain => solve(&inst.system, &cfg, truth)
                .map(|r| (r, None))
                .map_err(|e| e.to_string()),
        }
    };
    let (result, membership) = match run() {
        Ok(r) => r,
        Err(e) => return fail(e),
    };

    let rank = truth.map(|t| result.rank_of_truth(t));
    let success = match (&membership, rank) {
        (Some(outcome), _) => outcome.presentation.is_some(),
        (None, Some(r)) => r >= 1,
        (None, None) => match result.halt_reason {
            HaltReason::Parametric | HaltReason::IdentityAtStart => true,
            _ => false,
        },
    };

    let report = render_report(&result, rank, &membership, success);
    print!("{}", report);
    if let Some(path) = &a.out {
        if let Err(e) = fs::write(path, &report) {
            return fail(format!("{}: {}", path.display(), e));
        }
    }
    if let Some(path) = &a.trace_out {
        let rows: Vec<TraceRow> = result
            .trace
            .iter()
            .enumerate()
            .map(|(i, t)| TraceRow {
                step: i + 1,
                best: t.scores.first().copied().unwrap_or(0),
                mean: t.mean_score,
                worst: t.scores.last().copied().unwrap_or(0),
                truth_rank: t.truth_rank,
            })
            .collect();
        if let Err(e) = fs::write(path, render_trace_csv(&rows)) {
            return fail(format!("{}: {}", path.display(), e));
        }
    }
    if success {
        0
    } else {
        1
    }
}

fn render_report(
    result: &SolveResult,
    rank: Option<usize>,
    membership: &Option<MembershipOutcome>,
    success: bool,
) -> String {
    let mut out = String::new();
    out.push_str(&format!("halt_reason {}\n", result.halt_reason));
    out.push_str(&format!("steps {}\n", result.halted_at_step));
    out.push_str(&format!("backtracks {}\n", result.backtracks));
    out.push_str(&format!(
        "multiplications {}\n",
        result.op_counts.multiplications
    ));
    out.push_str(&format!(
        "length_evaluations {}\n",
        result.op_counts.length_evaluations
    ));
    out.push_str(&format!("success {}\n", success));
    if let Some(rank) = rank {
        out.push_str(&format!("rank {}\n", rank));
    }
    if let Some(outcome) = membership {
        match &outcome.presentation {
            Some(letters) => {
                let rendered: Vec<String> = letters.iter().map(|l| l.to_string()).collect();
                out.push_str(&format!(
                    "presentation {}\n",
                    if rendered.is_empty() {
                        "(empty)".to_string()
                    } else {
                        rendered.join(" ")
                    }
                ));
                out.push_str(&format!(
                    "found_at_step {}\n",
                    outcome.found_at_step.unwrap_or(0)
                ));
            }
            None => out.push_str("presentation not-found\n"),
        }
    }
    for (i, c) in result.ranked.iter().enumerate().take(10) {
        let letters: Vec<String> = c.letters.iter().map(|l| l.to_string()).collect();
        let verdict = result
            .parametric
            .as_ref()
            .and_then(|v| v.get(i))
            .map(|v| format!(" parametric_pass {}", v.passes))
            .unwrap_or_default();
        out.push_str(&format!(
            "candidate {} score {}{} letters {}\n",
            i + 1,
            c.score,
            verdict,
            if letters.is_empty() {
                "(empty)".to_string()
            } else {
                letters.join(" ")
            }
        ));
    }
    if result.ranked.len() > 10 {
        out.push_str(&format!("... {} more candidates\n", result.ranked.len() - 10));
    }
    for (i, t) in result.trace.iter().enumerate() {
        out.push_str(&format!(
            "trace step {} best {} mean {:.2} worst {} truth_rank {}\n",
            i + 1,
            t.scores.first().copied().unwrap_or(0),
            t.mean_score,
            t.scores.last().copied().unwrap_or(0),
            t.truth_rank
                .map(|r| r.to_string())
                .unwrap_or_else(|| "-".into())
        ));
    }
    out
}

const EXPERIMENT_USAGE: &str = "\
usage: braid-lba experiment --out FILE [options]
  --grid FILE         grid config (keys N m n k l M, one value list per line);
                      default: the single cell N8 m2 n16 k1 l4 M16
  --full-grid         use the full 648-cell study grid
  --sweep m,n,k,l,M   strand-count sweep for one cell
  --trials T          trials per cell (default 16)
  --seed S            master seed (default 1)
  --variant V         plain | conjugacy | membership | parametric | backtracking
  --unknown-p         conjugacy variant: withhold P
  --tau T, --patience P, --prune-inverse, --no-prune-inverse, --backtrack B,g
  --threads T         worker threads (default: BRAID_THREADS or all cores)
  --out FILE          output CSV; existing rows are kept and completed
";

fn cmd_experiment(args: &[String]) -> i32 {
    let mut grid: Option<GridSpec> = None;
    let mut trials: u32 = 16;
    let mut master_seed: u64 = 1;
    let mut variant = Variant::Plain;
    let mut options = SolveOptions::default();
    let mut out_path: Option<PathBuf> = None;
    let mut threads = None;
    let mut p = FlagParser::new(args);
    while p.pos < args.len() {
        match args[p.pos].as_str() {
            "--help" | "-h" => {
                print!("{}", EXPERIMENT_USAGE);
                return 0;
            }
            "--grid" => {
                let path = p.value("--grid").map_err(|e| e.to_string());
                let path = match path {
                    Ok(p) => p,
                    Err(e) => return fail(e),
                };
                match fs::read_to_string(&path) {
                    Ok(text) => match GridSpec::parse(&text) {
                        Ok(g) => grid = Some(g),
                        Err(e) => return fail(format!("{}: {}", path, e)),
                    },
                    Err(e) => return fail(format!("{}: {}", path, e)),
                }
            }
            "--full-grid" => grid = Some(GridSpec::full_grid()),
            "--sweep" => {
                let v = match p.value("--sweep") {
                    Ok(v) => v,
                    Err(e) => return fail(e),
                };
                let parts: Vec<u32> = v.split(',').filter_map(|t| t.parse().ok()).collect();
                if parts.len() != 5 {
                    return fail(format!("--sweep expects m,n,k,l,M, got {:?}", v));
                }
                grid = Some(GridSpec::strand_sweep(
                    parts[0], parts[1], parts[2], parts[3], parts[4],
                ));
            }
            "--trials" => match p.parsed("--trials") {
                Ok(v) => trials = v,
                Err(e) => return fail(e),
            },
            "--seed" => match p.parsed("--seed") {
                Ok(v) => master_seed = v,
                Err(e) => return fail(e),
            },
            "--variant" => {
                let v = match p.value("--variant") {
                    Ok(v) => v,
                    Err(e) => return fail(e),
                };
                variant = match Variant::parse(&v) {
                    Some(v) => v,
                    None => return fail(format!("unknown variant {:?}", v)),
                };
            }
            "--unknown-p" => options.known_prefix = false,
            "--tau" => match p.parsed("--tau") {
                Ok(v) => options.tau = v,
                Err(e) => return fail(e),
            },
            "--patience" => match p.parsed("--patience") {
                Ok(v) => options.patience = v,
                Err(e) => return fail(e),
            },
            "--prune-inverse" => options.prune_immediate_inverse = true,
            "--no-prune-inverse" => options.prune_immediate_inverse = false,
            "--backtrack" => {
                let v = match p.value("--backtrack") {
                    Ok(v) => v,
                    Err(e) => return fail(e),
                };
                match parse_backtrack(&v) {
                    Ok(b) => options.backtrack = Some(b),
                    Err(e) => return fail(e),
                }
            }
            "--threads" => match p.parsed("--threads") {
                Ok(v) => threads = Some(v),
                Err(e) => return fail(e),
            },
            "--out" => match p.value("--out") {
                Ok(v) => out_path = Some(PathBuf::from(v)),
                Err(e) => return fail(e),
            },
            other => return fail(format!("unknown flag {}", other)),
        }
        p.pos += 1;
    }
    let out_path = match out_path {
        Some(p) => p,
        None => return fail("missing --out"),
    };
    if let Err(e) = setup_threads(threads) {
        return fail(e);
    }
    let grid = grid.unwrap_or_else(|| {
        GridSpec::parse("N 8\nm 2\nn 16\nk 1\nl 4\nM 16\n").expect("built-in grid parses")
    });
    let cfg = ExperimentConfig {
        cells: grid.cells(),
        trials,
        master_seed,
        variant,
        options,
    };

    let mut existing: Vec<TrialRecord> = Vec::new();
    if out_path.exists() {
        match harness::read_csv_file(&out_path) {
            Ok((records, dropped)) => {
                if dropped {
                    eprintln!("note: dropped a partial final row while resuming");
                }
                eprintln!("resuming: {} rows already present", records.len());
                existing = records;
            }
            Err(e) => return fail(e),
        }
    }
    let records = match harness::run_experiment_resuming(&cfg, &existing) {
        Ok(r) => r,
        Err(e) => return fail(e),
    };
    if let Err(e) = harness::write_csv_file(&out_path, &records, master_seed) {
        return fail(format!("{}: {}", out_path.display(), e));
    }
    println!("wrote {} rows to {}", records.len(), out_path.display());
    for ((strands, m, n, k, l, beam), wins, total) in harness::success_by_cell(&records) {
        println!(
            "cell N={} m={} n={} k={} l={} M={}: success {}/{} = {:.3}",
            strands,
            m,
            n,
            k,
            l,
            beam,
            wins,
            total,
            wins as f64 / total as f64
        );
    }
    0
}

fn cmd_fit(args: &[String]) -> i32 {
    let mut input: Option<PathBuf> = None;
    let mut out: Option<PathBuf> = None;
    let mut p = FlagParser::new(args);
    while p.pos < args.len() {
        match args[p.pos].as_str() {
            "--help" | "-h" => {
                println!("usage: braid-lba fit <experiment.csv> [--out model.txt]");
                return 0;
            }
            "--out" => match p.value("--out") {
                Ok(v) => out = Some(PathBuf::from(v)),
                Err(e) => return fail(e),
            },
            other if !other.starts_with("--") => input = Some(PathBuf::from(other)),
            other => return fail(format!("unknown flag {}", other)),
        }
        p.pos += 1;
    }
    let input = match input {
        Some(p) => p,
        None => return fail("missing input CSV"),
    };
    let (records, _) = match harness::read_csv_file(&input) {
        Ok(r) => r,
        Err(e) => return fail(e),
    };
    let rows = harness::fit_rows(&records);
    match fit_logistic(&rows) {
        Ok(model) => {
            let text = model.to_summary_text();
            print!("{}", text);
            if let Some(path) = out {
                if let Err(e) = fs::write(&path, text) {
                    return fail(format!("{}: {}", path.display(), e));
                }
            }
            0
        }
        Err(e) => fail(e),
    }
}

const PREDICT_USAGE: &str = "\
usage:
  braid-lba predict m n k l M [--model FILE]   success probability
  braid-lba predict --memory m n k             memory estimate for p = 0.5
  braid-lba predict --doubling                 memory factor when m doubles
";

fn cmd_predict(args: &[String]) -> i32 {
    let mut model_path: Option<PathBuf> = None;
    let mut memory_args: Option<Vec<u32>> = None;
    let mut doubling = false;
    let mut values: Vec<u32> = Vec::new();
    let mut p = FlagParser::new(args);
    while p.pos < args.len() {
        match args[p.pos].as_str() {
            "--help" | "-h" => {
                print!("{}", PREDICT_USAGE);
                return 0;
            }
            "--model" => match p.value("--model") {
                Ok(v) => model_path = Some(PathBuf::from(v)),
                Err(e) => return fail(e),
            },
            "--memory" => {
                let mut vs = Vec::new();
                for _ in 0..3 {
                    match p.parsed::<u32>("--memory") {
                        Ok(v) => vs.push(v),
                        Err(e) => return fail(e),
                    }
                }
                memory_args = Some(vs);
            }
            "--doubling" => doubling = true,
            other => match other.parse::<u32>() {
                Ok(v) => values.push(v),
                Err(_) => return fail(format!("unexpected argument {:?}", other)),
            },
        }
        p.pos += 1;
    }
    if doubling {
        println!("{:.2}", memory_doubling_factor());
        return 0;
    }
    if let Some(vs) = memory_args {
        let raw = required_memory(vs[0], vs[1], vs[2]);
        println!(
            "required memory {:.5} (reported M = {})",
            raw,
            required_memory_floored(vs[0], vs[1], vs[2])
        );
        return 0;
    }
    if values.len() != 5 {
        return fail(format!(
            "predict expects 5 parameters m n k l M; got {}\n{}",
            values.len(),
            PREDICT_USAGE
        ));
    }
    let model = match model_path {
        Some(path) => match fs::read_to_string(&path)
            .map_err(|e| format!("{}: {}", path.display(), e))
            .and_then(|t| LogisticModel::parse_summary(&t).map_err(|e| e.to_string()))
        {
            Ok(m) => m,
            Err(e) => return fail(e),
        },
        None => LogisticModel::published(),
    };
    let params = braid_lba::instance::ExperimentParams::new(
        8, values[0], values[1], values[2], values[3], values[4],
    );
    println!("{:.3}", predict_success(&model, &params));
    0
}

const PLOT_USAGE: &str = "\
usage: braid-lba plot [input] --kind KIND --out FILE [options]
  --kind curves       model success curves vs log2(n); input CSV optional,
                      observed cell fractions are overlaid when given
  --kind trace        per-run trace (input: trace CSV from solve --trace-out)
  --kind sweep        success vs strand count (input: experiment CSV)
  --m M --k K --l L   fixed parameters for curves (defaults 8, 1, 8)
  --widths 2,4,...    beam widths for curves (default 2^1..2^10)
  --out FILE          output SVG
";

fn cmd_plot(args: &[String]) -> i32 {
    let mut input: Option<PathBuf> = None;
    let mut kind: Option<String> = None;
    let mut out: Option<PathBuf> = None;
    let mut m = 8u32;
    let mut k = 1u32;
    let mut l = 8u32;
    let mut widths: Vec<u32> = (1..=10).map(|e| 1 << e).collect();
    let mut p = FlagParser::new(args);
    while p.pos < args.len() {
        match args[p.pos].as_str() {
            "--help" | "-h" => {
                print!("{}", PLOT_USAGE);
                return 0;
            }
            "--kind" => match p.value("--kind") {
                Ok(v) => kind = Some(v),
                Err(e) => return fail(e),
            },
            "--out" => match p.value("--out") {
                Ok(v) => out = Some(PathBuf::from(v)),
                Err(e) => return fail(e),
            },
            "--m" => match p.parsed("--m") {
                Ok(v) => m = v,
                Err(e) => return fail(e),
            },
            "--k" => match p.parsed("--k") {
                Ok(v) => k = v,
                Err(e) => return fail(e),
            },
            "--l" => match p.parsed("--l") {
                Ok(v) => l = v,
                Err(e) => return fail(e),
            },
            "--widths" => {
                let v = match p.value("--widths") {
                    Ok(v) => v,
                    Err(e) => return fail(e),
                };
                widths = v.split(',').filter_map(|t| t.parse().ok()).collect();
                if widths.is_empty() {
                    return fail("empty --widths list");
                }
            }
            other if !other.starts_with("--") => input = Some(PathBuf::from(other)),
            other => return fail(format!("unknown flag {}", other)),
        }
        p.pos += 1;
    }
    let out = match out {
        Some(p) => p,
        None => return fail("missing --out"),
    };
    let chart = match kind.as_deref() {
        Some("curves") => {
            let records = match &input {
                Some(path) => match harness::read_csv_file(path) {
                    Ok((r, _)) => r,
                    Err(e) => return fail(e),
                },
                None => Vec::new(),
            };
            success_curves_chart(&LogisticModel::published(), m, k, l, &widths, &records)
        }
        Some("trace") => {
            let path = match &input {
                Some(p) => p,
                None => return fail("trace plot needs an input trace CSV"),
            };
            let text = match fs::read_to_string(path) {
                Ok(t) => t,
                Err(e) => return fail(format!("{}: {}", path.display(), e)),
            };
            let rows = match parse_trace_csv(&text) {
                Ok(r) => r,
                Err(e) => return fail(e),
            };
            if rows.is_empty() {
                return fail("empty data set");
            }
            trace_chart(&rows)
        }
        Some("sweep") => {
            let path = match &input {
                Some(p) => p,
                None => return fail("sweep plot needs an input experiment CSV"),
            };
            let records = match harness::read_csv_file(path) {
                Ok((r, _)) => r,
                Err(e) => return fail(e),
            };
            if records.is_empty() {
                return fail("empty data set");
            }
            strand_sweep_chart(&records)
        }
        Some(other) => return fail(format!("unknown plot kind {:?}", other)),
        None => return fail("missing --kind"),
    };
    let svg = chart.render_svg(860, 520);
    if let Err(e) = fs::write(&out, svg) {
        return fail(format!("{}: {}", out.display(), e));
    }
    println!("wrote {}", out.display());
    0
}
