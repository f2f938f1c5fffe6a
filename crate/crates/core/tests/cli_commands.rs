use collapse_lab::cli::{run, RunConfig};
use collapse_lab::csv_io::{read_bifurcation, read_table};

fn config(pairs: &[(&str, &str)]) -> RunConfig {
    RunConfig::from_pairs(pairs.iter().copied()).unwrap()
}

#[test]
fn simulate_writes_tail_rows_that_read_back() {
    let cfg = config(&[("command", "simulate"), ("r", "0.3"), ("iters", "400"), ("tail", "50"), ("init", "1,-0.5,-1.5")]);
    let out = run(&cfg).unwrap();
    let records = read_bifurcation(&out.csv).unwrap();
    assert_eq!(records.len(), 50);
    assert!(records.iter().all(|x| x.r == 0.3 && x.init_index == 0));
    assert_eq!(records.first().unwrap().iter_index, 350);
    assert!(out.report.contains("period"));
}

#[test]
fn config_echo_rebuilds_the_same_run() {
    let cfg = config(&[("command", "bifurcate"), ("r-min", "0.15"), ("r-max", "0.2"), ("nr", "3"), ("iters", "200"), ("tail", "5")]);
    let out = run(&cfg).unwrap();
    let again = RunConfig::from_header(&out.csv).unwrap();
    assert_eq!(again.entries(), cfg.entries());
    assert_eq!(run(&again).unwrap().csv, out.csv);
    let records = read_bifurcation(&out.csv).unwrap();
    assert_eq!(records.len(), 3 * 32 * 5);
}

#[test]
fn bifurcate_svg_has_one_circle_per_finite_point() {
    let cfg = config(&[("command", "bifurcate"), ("r-min", "0.3"), ("r-max", "0.31"), ("nr", "2"), ("iters", "100"), ("tail", "4"), ("svg", "scan.svg")]);
    let out = run(&cfg).unwrap();
    let svg = out.svg.expect("svg requested");
    let finite = read_bifurcation(&out.csv).unwrap().iter().filter(|x| x.theta.is_finite()).count();
    assert_eq!(svg.matches("<circle").count(), finite);
}

#[test]
fn rotation_reports_one_third_at_two_minus_sqrt_three() {
    let r = (2.0 - 3f64.sqrt()).to_string();
    let cfg = config(&[("command", "rotation"), ("r", &r), ("iters", "3000")]);
    let out = run(&cfg).unwrap();
    let t = read_table(&out.csv).unwrap();
    let rho: f64 = t.rows[0][t.column("rho").unwrap()].parse().unwrap();
    assert!((rho - 1.0 / 3.0).abs() < 1e-3, "rho = {rho}");
}

#[test]
fn pattern_finds_the_132312_boundary() {
    let cfg = config(&[("command", "pattern"), ("word", "132312"), ("r-min", "0.2"), ("r-max", "0.24"), ("nr", "5")]);
    let out = run(&cfg).unwrap();
    let line = out.report.lines().find(|l| l.starts_with("stability boundary")).expect("one boundary");
    let x: f64 = line.rsplit(' ').next().unwrap().parse().unwrap();
    assert!((x - 0.220069786146).abs() < 1e-9, "{line}");
}

#[test]
fn unknown_command_and_bad_values_are_errors() {
    assert!(run(&config(&[("command", "nope")])).is_err());
    assert!(RunConfig::from_pairs([("iters", "many")]).is_err());
    let cfg = config(&[("command", "simulate"), ("iters", "10"), ("tail", "20")]);
    assert!(run(&cfg).is_err());
}
