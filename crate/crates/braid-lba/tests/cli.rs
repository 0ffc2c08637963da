//! End-to-end checks of the command-line interface: exit codes, output
//! formats, and the experiment/fit/plot pipeline.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use braid_lba::harness::{parse_csv, TrialRecord, Variant};
use braid_lba::instance::{random_instance, write_instance, ExperimentParams, GridSpec};
use braid_lba::solver::HaltReason;
use braid_lba::stats::{predict_success, LogisticModel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_braid-lba"))
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).to_string()
}

fn tmp_dir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("braid-lba-test-{}-{}", name, std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn predict_prints_model_values() {
    let out = bin().args(["predict", "2", "16", "1", "4", "16"]).output().unwrap();
    assert_eq!(stdout(&out).trim(), "0.989");
    let out = bin().args(["predict", "16", "128", "8", "8", "1024"]).output().unwrap();
    assert_eq!(stdout(&out).trim(), "0.668");
    let out = bin().args(["predict", "1", "2"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn thread_count_env_is_honored() {
    let dir = tmp_dir("threads-env");
    let grid_path = dir.join("grid.txt");
    fs::write(&grid_path, "N 8\nm 2\nn 4\nk 1\nl 2\nM 4\n").unwrap();
    let csv = dir.join("out.csv");
    let out = bin()
        .env("BRAID_THREADS", "1")
        .arg("experiment")
        .args(["--grid"])
        .arg(&grid_path)
        .args(["--trials", "2", "--seed", "9", "--out"])
        .arg(&csv)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let out = bin().env("BRAID_THREADS", "zero").args(["nf", "--strands", "3", "1"]).output().unwrap();
    // A bad env value only matters for commands that size the pool.
    assert_eq!(out.status.code(), Some(0));
    let _ = fs::remove_dir_all(dir);
}

#[test]
fn nf_and_len_formats() {
    let out = bin().args(["nf", "--strands", "3", "-1"]).output().unwrap();
    assert_eq!(stdout(&out).trim(), "D^-1 | 3 1 2");
    let out = bin().args(["nf", "--strands", "3", "1 2 1"]).output().unwrap();
    assert_eq!(stdout(&out).trim(), "D^-0 | 3 2 1");
    let out = bin().args(["len", "--strands", "8", "-1"]).output().unwrap();
    assert_eq!(stdout(&out).trim(), "rg 1\nnaive 55");
    // Out-of-range letters are input errors.
    let out = bin().args(["len", "--strands", "4", "7"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn membership_presentation_and_exit_codes() {
    let dir = tmp_dir("membership");
    let path = dir.join("inverse-gen.txt");
    fs::write(
        &path,
        "strands 8\ngen 1 2 3\ngen -4 5 -6\neq 6 -5 4\n",
    )
    .unwrap();
    let out = bin()
        .arg("membership")
        .arg(&path)
        .args(["--memory", "4", "--steps", "4"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("presentation 2:-1"), "{}", text);

    // An element outside the reach of the beam exits 1.
    let path2 = dir.join("outside.txt");
    fs::write(&path2, "strands 8\ngen 1 2 3\neq 7 7 7 7 7 7 7\n").unwrap();
    let out = bin()
        .arg("membership")
        .arg(&path2)
        .args(["--memory", "2", "--steps", "2"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("presentation not-found"));
    let _ = fs::remove_dir_all(dir);
}

#[test]
fn solve_reports_rank_and_writes_outputs() {
    let dir = tmp_dir("solve");
    let params = ExperimentParams::new(8, 2, 8, 1, 4, 16).with_seed(5);
    let inst = random_instance(&params);
    let path = dir.join("instance.txt");
    fs::write(&path, write_instance(&inst)).unwrap();
    let report_path = dir.join("result.txt");
    let trace_path = dir.join("trace.csv");
    let out = bin()
        .arg("solve")
        .arg(&path)
        .args(["--memory", "16"])
        .arg("--out")
        .arg(&report_path)
        .arg("--trace-out")
        .arg(&trace_path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let text = stdout(&out);
    assert!(text.contains("rank 1"), "{}", text);
    assert!(text.contains("halt_reason fixed_steps"));
    assert_eq!(fs::read_to_string(&report_path).unwrap(), text);

    // The trace feeds the trace plot.
    let svg_path = dir.join("trace.svg");
    let out = bin()
        .arg("plot")
        .arg(&trace_path)
        .args(["--kind", "trace", "--out"])
        .arg(&svg_path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let svg = fs::read_to_string(&svg_path).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("</svg>"));
    let _ = fs::remove_dir_all(dir);
}

#[test]
fn solve_replay_fails_with_plateau_trace() {
    // The frozen replayed failure: narrow beam on a hard instance. The exit
    // code is 1 and the mean-score trace flattens out.
    let dir = tmp_dir("replay");
    let params = ExperimentParams::new(8, 2, 64, 8, 8, 8).with_seed(40);
    let inst = random_instance(&params);
    let path = dir.join("hard.txt");
    fs::write(&path, write_instance(&inst)).unwrap();
    let trace_path = dir.join("trace.csv");
    let out = bin()
        .arg("solve")
        .arg(&path)
        .args(["--memory", "8", "--steps", "64", "--trace-out"])
        .arg(&trace_path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let rows = braid_lba::plot::parse_trace_csv(&fs::read_to_string(&trace_path).unwrap()).unwrap();
    assert_eq!(rows.len(), 64);
    let plateau = rows.windows(4).any(|w| {
        let first = w[0].mean;
        let last = w[3].mean;
        first > 0.0 && (first - last) < 0.01 * first
    });
    assert!(plateau, "expected a mean-score plateau in the failing trace");
    let _ = fs::remove_dir_all(dir);
}

#[test]
fn malformed_inputs_exit_two() {
    let dir = tmp_dir("badinput");
    let path = dir.join("broken.txt");
    fs::write(&path, "strands 4\ngen 1 9\neq 1\n").unwrap();
    let out = bin().arg("solve").arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    // A CSV that does not match the trial-record schema is rejected by fit.
    let bad_csv = dir.join("bad.csv");
    fs::write(&bad_csv, "seed,N\n1,8\n2,8\n").unwrap();
    let out = bin().arg("fit").arg(&bad_csv).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin().arg("solve").arg(dir.join("missing.txt")).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin().args(["solve", "--bogus-flag"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin().arg("frobnicate").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let _ = fs::remove_dir_all(dir);
}

#[test]
fn experiment_csv_is_deterministic_and_resumable() {
    let dir = tmp_dir("experiment");
    let grid_path = dir.join("grid.txt");
    fs::write(&grid_path, "N 8\nm 2\nn 4\nk 1\nl 2\nM 4\n").unwrap();
    let csv_a = dir.join("a.csv");
    let csv_b = dir.join("b.csv");
    for (csv, trials) in [(&csv_a, "4"), (&csv_b, "2")] {
        let out = bin()
            .arg("experiment")
            .args(["--grid"])
            .arg(&grid_path)
            .args(["--trials", trials, "--seed", "9", "--threads", "2", "--out"])
            .arg(csv)
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    }
    let (rows_a, _) = parse_csv(&fs::read_to_string(&csv_a).unwrap()).unwrap();
    assert_eq!(rows_a.len(), 4);
    // Resume the 2-trial file up to 4 trials: the first rows must be reused
    // bit-for-bit (wall time included, since they are not recomputed).
    let (rows_b2, _) = parse_csv(&fs::read_to_string(&csv_b).unwrap()).unwrap();
    let out = bin()
        .arg("experiment")
        .args(["--grid"])
        .arg(&grid_path)
        .args(["--trials", "4", "--seed", "9", "--threads", "2", "--out"])
        .arg(&csv_b)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let (rows_b4, _) = parse_csv(&fs::read_to_string(&csv_b).unwrap()).unwrap();
    assert_eq!(rows_b4.len(), 4);
    for r in &rows_b2 {
        assert!(rows_b4.contains(r), "resume must keep existing rows");
    }
    // Rerun from scratch: identical apart from wall time.
    let csv_c = dir.join("c.csv");
    let out = bin()
        .arg("experiment")
        .args(["--grid"])
        .arg(&grid_path)
        .args(["--trials", "4", "--seed", "9", "--threads", "1", "--out"])
        .arg(&csv_c)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let (rows_c, _) = parse_csv(&fs::read_to_string(&csv_c).unwrap()).unwrap();
    let strip = |rows: &[TrialRecord]| -> Vec<TrialRecord> {
        rows.iter()
            .map(|r| {
                let mut r = r.clone();
                r.wall_time_ms = 0;
                r
            })
            .collect()
    };
    assert_eq!(strip(&rows_a), strip(&rows_c));
    let _ = fs::remove_dir_all(dir);
}

#[test]
fn fit_predict_and_plot_pipeline() {
    let dir = tmp_dir("pipeline");
    // Synthetic campaign drawn from the built-in model.
    let model = LogisticModel::published();
    let mut rng = ChaCha8Rng::seed_from_u64(123);
    let records: Vec<TrialRecord> = GridSpec::full_grid()
        .cells()
        .into_iter()
        .enumerate()
        .flat_map(|(i, cell)| {
            let p = predict_success(&model, &cell);
            (0..2).map(move |t| (i as u64 * 100 + t, cell, p)).collect::<Vec<_>>()
        })
        .map(|(seed, cell, p)| TrialRecord {
            seed,
            strands: cell.strands,
            generators: cell.generators,
            secret_length: cell.secret_length,
            equations: cell.equations,
            word_length: cell.word_length,
            beam_width: cell.beam_width,
            variant: Variant::Plain,
            success: rng.gen_bool(p),
            rank: 1,
            steps: cell.secret_length as usize,
            halt_reason: HaltReason::FixedSteps,
            multiplications: 0,
            length_evals: 0,
            wall_time_ms: 0,
        })
        .collect();
    let csv = dir.join("synthetic.csv");
    braid_lba::harness::write_csv_file(&csv, &records, 123).unwrap();

    let model_path = dir.join("model.txt");
    let out = bin().arg("fit").arg(&csv).arg("--out").arg(&model_path).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).contains("term x1"));

    let out = bin()
        .args(["predict", "8", "32", "1", "4", "64", "--model"])
        .arg(&model_path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let p: f64 = stdout(&out).trim().parse().unwrap();
    assert!((0.0..=1.0).contains(&p));

    // Model curves need no input data; observed overlays come from the CSV.
    let curves = dir.join("curves.svg");
    let out = bin()
        .arg("plot")
        .arg(&csv)
        .args(["--kind", "curves", "--m", "8", "--k", "1", "--out"])
        .arg(&curves)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let svg = fs::read_to_string(&curves).unwrap();
    assert!(svg.contains("M=1024") && svg.contains("observed"));

    // Strand sweep chart from a small two-N experiment.
    let grid_path = dir.join("sweep-grid.txt");
    fs::write(&grid_path, "N 8 10\nm 2\nn 4\nk 1\nl 2\nM 4\n").unwrap();
    let sweep_csv = dir.join("sweep.csv");
    let out = bin()
        .arg("experiment")
        .args(["--grid"])
        .arg(&grid_path)
        .args(["--trials", "3", "--seed", "4", "--out"])
        .arg(&sweep_csv)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let sweep_svg = dir.join("sweep.svg");
    let out = bin()
        .arg("plot")
        .arg(&sweep_csv)
        .args(["--kind", "sweep", "--out"])
        .arg(&sweep_svg)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(fs::read_to_string(&sweep_svg).unwrap().contains("strand count"));

    // Plot kinds that need data reject empty input.
    let empty = dir.join("empty.csv");
    fs::write(&empty, format!("{}\n", braid_lba::harness::CSV_HEADER)).unwrap();
    let out = bin()
        .arg("plot")
        .arg(&empty)
        .args(["--kind", "sweep", "--out"])
        .arg(dir.join("none.svg"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let _ = fs::remove_dir_all(dir);
}

#[test]
fn conjugacy_cli_known_and_unknown() {
    let dir = tmp_dir("conjugacy");
    let params = ExperimentParams::new(8, 2, 4, 1, 4, 8).with_seed(21);
    let inst = braid_lba::instance::random_conjugacy_instance(&params);
    let path = dir.join("conj.txt");
    fs::write(&path, write_instance(&inst)).unwrap();
    let out = bin()
        .arg("conjugacy")
        .arg(&path)
        .args(["--memory", "8"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert!(stdout(&out).contains("halt_reason parametric"));
    let out = bin()
        .arg("conjugacy")
        .arg(&path)
        .args(["--memory", "8", "--unknown-p", "--steps", "4"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert!(stdout(&out).contains("halt_reason fixed_steps"));
    let _ = fs::remove_dir_all(dir);
}
