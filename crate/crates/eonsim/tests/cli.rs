//! End-to-end checks of the sweep driver and its output files.

use std::fs;

use eonsim::cli::{execute, Args};

fn args(out: &str) -> Args {
    Args {
        topology: None,
        slots: Some(60),
        loads: "1".into(),
        policies: "baseline".into(),
        seeds: "1".into(),
        lambda: None,
        mu: 10.0,
        threshold: 150.0,
        window: 0.05,
        duration: 1.0,
        out: std::env::temp_dir().join(out),
        oe_order: "E-first".into(),
        trace_out: None,
        trace_in: None,
        bw_step: None,
    }
}

#[test]
fn bbp_rows_cover_every_cell_and_priority() {
    let mut a = args("eonsim-cli-rows");
    a.loads = "0.5,1".into();
    a.policies = "baseline,O-MinPDR".into();
    a.seeds = "1..3".into();
    execute(&a).unwrap();
    let bbp = fs::read_to_string(a.out.join("bbp.csv")).unwrap();
    let rows: Vec<&str> = bbp.lines().skip(1).collect();
    // |loads| x |policies| x |seeds| x (priorities + aggregate)
    assert_eq!(rows.len(), 2 * 2 * 3 * 6);
    assert!(rows.iter().filter(|r| r.contains(",all,")).count() == 2 * 2 * 3);
    let summary = fs::read_to_string(a.out.join("summary.txt")).unwrap();
    assert!(summary.contains("rng: pcg64"));
}

#[test]
fn trace_replay_reproduces_the_run() {
    let mut first = args("eonsim-cli-trace1");
    let trace = std::env::temp_dir().join("eonsim-cli-trace.csv");
    first.trace_out = Some(trace.clone());
    execute(&first).unwrap();

    let mut replay = args("eonsim-cli-trace2");
    replay.trace_in = Some(trace);
    execute(&replay).unwrap();

    let a = fs::read_to_string(first.out.join("bbp.csv")).unwrap();
    let b = fs::read_to_string(replay.out.join("bbp.csv")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn trace_flags_demand_single_cell() {
    let mut a = args("eonsim-cli-badtrace");
    a.seeds = "1..3".into();
    a.trace_out = Some(std::env::temp_dir().join("eonsim-nope.csv"));
    assert!(execute(&a).is_err());
}

#[test]
fn lambda_conflicts_with_loads() {
    let mut a = args("eonsim-cli-lambda");
    a.lambda = Some(12.5);
    a.loads = "1,2".into();
    assert!(execute(&a).is_err());
    let mut a = args("eonsim-cli-lambda2");
    a.loads = "30".into(); // the clap default, i.e. --loads not given
    a.lambda = Some(12.5); // load 1.25
    let reports = execute(&a).unwrap();
    assert_eq!(reports[0].load_erlang, 1.25);
}
