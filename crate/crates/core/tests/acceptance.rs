//! Acceptance run: one PASS/FAIL line per criterion with its wall time.
//! The process exits nonzero on a failure only when `ACCEPTANCE_STRICT=1`.

use std::time::{Duration, Instant};

use collapse_lab::analysis::{canonical_rotation, cos_beta, default_grid, linspace, lyapunov_max, random_inits, rotation_number, scan_summaries, thin_stripe_r, thin_stripes, Observable};
use collapse_lab::cli::{self, validate_r, RunConfig};
use collapse_lab::exact::{rat, RationalPoly};
use collapse_lab::map_core::{branch_matrix, Branch, ProjectiveDirection, Restitution};
use collapse_lab::spectral::*;
use collapse_lab::windows::{q_poly, window_table, PrecisionBudget, StabilityWindow};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

const BOUNDS: &str = include_str!("data/bounds_table.csv");
const DEVELOPED: &str = include_str!("data/q_developed.txt");

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn rr(r: f64) -> Restitution {
    Restitution::new(r).expect("r in (0, 1)")
}

fn parse_rational(s: &str) -> BigRational {
    match s.split_once('/') {
        Some((n, d)) => BigRational::new(n.parse::<BigInt>().unwrap(), d.parse::<BigInt>().unwrap()),
        None => BigRational::from_integer(s.parse::<BigInt>().unwrap()),
    }
}

fn criterion_1() -> Outcome {
    let mut total = 0;
    let mut diffs = Vec::new();
    for line in DEVELOPED.lines() {
        let mut it = line.split_whitespace();
        let n: usize = it.next().unwrap().parse().unwrap();
        let reference: Vec<BigRational> = it.map(parse_rational).collect();
        let q = match q_poly(n) {
            Ok(q) => q,
            Err(e) => return outcome(false, format!("Q_{n}: {e}")),
        };
        if q.degree() != Some(reference.len() - 1) {
            diffs.push(format!("Q_{n} degree {:?}", q.degree()));
        }
        for (k, c) in reference.iter().enumerate() {
            total += 1;
            if &q.coeff(k) != c {
                diffs.push(format!("Q_{n} r^{k}: computed {}, reference {c}", q.coeff(k)));
            }
        }
    }
    if diffs.is_empty() {
        outcome(true, format!("all {total} coefficients of Q_1..Q_10 equal"))
    } else {
        outcome(false, format!("{} of {total} coefficients differ: {}; the reference's factored Q_2 expands to -81/128", diffs.len(), diffs.join("; ")))
    }
}

fn reference_bounds() -> Vec<(usize, String, String)> {
    BOUNDS
        .lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0].parse().unwrap(), f[1].to_string(), f[2].to_string())
        })
        .collect()
}

fn criterion_2(table: &[StabilityWindow]) -> Outcome {
    let bad: Vec<String> = table
        .iter()
        .zip(reference_bounds())
        .filter(|(w, (_, lo, _))| &w.lower != lo)
        .map(|(w, (n, lo, _))| format!("n={n}: {} vs {lo}", w.lower))
        .collect();
    outcome(bad.is_empty() && table.len() == 100, format!("{} of {} lower bounds match{}", table.len() - bad.len(), table.len(), list(&bad)))
}

fn criterion_3(table: &[StabilityWindow]) -> Outcome {
    let mut bad = Vec::new();
    for (w, (n, _, up)) in table.iter().zip(reference_bounds()) {
        let expected = if n == 1 { "not defined" } else { up.as_str() };
        if w.upper_str() != expected {
            bad.push(format!("n={n}: {} vs {expected}", w.upper_str()));
        }
    }
    let note = if bad.len() == 1 && bad[0].starts_with("n=52:") { "; (2c - sqrt(4c^2 - 1))^2 at c = cos(pi/104) is 0.0718724765988..., so the printed 597 is off by 2 in the last place" } else { "" };
    outcome(bad.is_empty(), format!("{} of 100 upper bounds match{}{note}", 100 - bad.len(), list(&bad)))
}

fn list(items: &[String]) -> String {
    if items.is_empty() {
        String::new()
    } else {
        format!(" (mismatch: {})", items.join(", "))
    }
}

fn criterion_4() -> Outcome {
    let mut cfg = RunConfig::default();
    for (k, v) in [("command", "pattern"), ("word", "132312"), ("r-min", "0.19"), ("r-max", "0.25"), ("nr", "61")] {
        cfg.set(k, v).unwrap();
    }
    let report = match cli::run(&cfg) {
        Ok(out) => out.report,
        Err(e) => return outcome(false, e.to_string()),
    };
    let boundary = report.lines().find_map(|l| l.strip_prefix("stability boundary at r = ")).unwrap_or("none").to_string();
    let w = PatternWord::parse("132312").unwrap();
    let stable_ok = [0.23, 0.3, 0.5].iter().all(|&r| certify_pattern(&w, rr(r)).stable);
    let unstable_ok = [0.20, 0.21].iter().all(|&r| !certify_pattern(&w, rr(r)).stable);
    outcome(
        boundary == "0.220069786146" && stable_ok && unstable_ok,
        format!("boundary {boundary}; stable at 0.23/0.3/0.5: {stable_ok}; not stable at 0.20/0.21: {unstable_ok}"),
    )
}

fn criterion_5() -> Outcome {
    let w = PatternWord::parse("13223122").unwrap();
    let stable: Vec<usize> = (10..=990).filter(|&i| certify_pattern(&w, rr(i as f64 / 1000.0)).stable).collect();
    let c = 3.0 - 2.0 * 2f64.sqrt();
    match boundary_roots_1322(1e-15) {
        Ok((a, b)) => {
            let close = (a - c).abs() < 1e-10 && (b - c).abs() < 1e-10;
            outcome(stable.is_empty() && close, format!("stable at {} of 981 grid points; boundary roots {a:.15}, {b:.15} vs 3 - 2 sqrt 2 = {c:.15}", stable.len()))
        }
        Err(e) => outcome(false, e.to_string()),
    }
}

fn poly(c: &[i64], den: i64) -> RationalPoly {
    RationalPoly::from_i64(c).scale(&rat(1, den))
}

fn criterion_6() -> Outcome {
    let mut c0 = vec![0; 15];
    c0[14] = 1;
    let printed = [
        (
            "132",
            [
                poly(&[1, -8, 21, 0, -29, -24, 7], 32),
                poly(&[0, 0, 0, 0, 0, 7, -24, -29, 0, 21, -8, 1], 32),
                poly(&[0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1], 1),
            ],
        ),
        (
            "1322",
            [
                poly(&[-1, 10, -30, 38, 24, -58, -18, 42, -7], 64),
                poly(&[0, 0, 0, 0, 0, 0, -7, 42, -18, -58, 24, 38, -30, 10, -1], 64),
                poly(&c0, 1),
            ],
        ),
    ];
    let mut checked = 0;
    let mut bad = Vec::new();
    for (half, reference) in &printed {
        let h = PatternWord::parse(half).unwrap().letters().to_vec();
        for (n, d) in [(1, 7), (1, 5), (1, 3), (1, 2), (2, 3)] {
            let r = rat(n, d);
            let got = exact_char_poly(&exact_reduced_matrix(&h, &r));
            for k in 0..3 {
                checked += 1;
                if got[k] != reference[k].eval(&r) {
                    bad.push(format!("{half} at {n}/{d} coefficient {k}"));
                }
            }
        }
    }
    outcome(bad.is_empty(), format!("{} of {checked} exact coefficients equal{}", checked - bad.len(), list(&bad)))
}

fn criterion_7() -> Outcome {
    let mut worst: f64 = 0.0;
    for i in 1..100 {
        let r = rr(i as f64 / 100.0);
        for (es, b) in [(eigen_p1(r), Branch::One), (eigen_p2(r), Branch::Two)] {
            let num = eigen_numeric(&branch_matrix(b, r));
            for x in es.eigenvalues {
                let d = num.eigenvalues.iter().map(|y| (x - y).norm()).fold(f64::MAX, f64::min);
                worst = worst.max(d);
            }
        }
    }
    let brackets = |disc: &RationalPoly, f: &dyn Fn(&BigRational) -> BigRational| {
        let s = regime_switches(disc, 80);
        s.len() == 1 && {
            let (lo, hi) = &s[0];
            let (a, b) = (f(lo), f(hi));
            (a.is_zero() || b.is_zero() || a.is_positive() != b.is_positive()) && (hi - lo) < BigRational::new(1.into(), BigInt::from(1u8) << 70)
        }
    };
    let one = || BigRational::from_integer(1.into());
    let int = |k: i64| BigRational::from_integer(k.into());
    let p1 = brackets(&discriminant_p1(), &|q| q * q - int(14) * q + one());
    let p2 = brackets(&discriminant_p2(), &|q| q * q - int(6) * q + one());
    outcome(
        worst < 1e-11 && p1 && p2,
        format!("max eigenvalue gap {worst:.1e}; single switch bracketing 7 - 4 sqrt 3: {p1}; bracketing 3 - 2 sqrt 2: {p2}"),
    )
}

fn criterion_8() -> Outcome {
    let inits = random_inits(100, 2024);
    let mut lines = Vec::new();
    let mut pass = true;
    for r in ["0.1", "0.15", "0.2", "0.3"] {
        match validate_r(r, &inits, 200) {
            Ok((rows, _)) => {
                let exact = rows.iter().filter(|x| x.exact_agree).count();
                let ok = rows.iter().filter(|x| x.passes()).count();
                let full = rows.iter().filter(|x| x.horizon == 200).count();
                pass &= ok == rows.len();
                lines.push(format!("r={r}: exact engines agree on {exact}/100, all engines consistent on {ok}/100, float horizon 200 on {full}"));
            }
            Err(e) => {
                pass = false;
                lines.push(format!("r={r}: {e}"));
            }
        }
    }
    outcome(pass, lines.join("; "))
}

fn criterion_9() -> Outcome {
    let grid = default_grid();
    let s = scan_summaries(&linspace(0.1275, 0.1716, 200), &grid, 5000, 100, 64, Observable::Theta, 1e-6);
    let window = s.iter().filter(|o| matches!(&o.period, Some((4, w)) if w == "1133") && o.clusters <= 4).count();
    let c = scan_summaries(&linspace(0.102, 0.1275, 200), &grid, 5000, 100, 64, Observable::Theta, 1e-6);
    let chaos = c.iter().filter(|o| o.period.is_none()).count();
    let (fw, fc) = (window as f64 / s.len() as f64, chaos as f64 / c.len() as f64);
    outcome(fw >= 0.95 && fc >= 0.90, format!("period 1133 with <= 4 theta clusters: {:.1}%; no period <= 64 below the window: {:.1}%", 100.0 * fw, 100.0 * fc))
}

fn criterion_10() -> Outcome {
    let expected = [(0.16, "1133"), (0.2, "1322231222"), (0.3, "132312"), (0.58, "132312")];
    let inits = random_inits(10, 2024);
    let mut pass = true;
    let mut parts = Vec::new();
    for (r, word) in expected {
        let s = scan_summaries(&[r], &inits, 5000, 100, 160, Observable::Theta, 1e-6);
        let target = canonical_rotation(word);
        let hits = s.iter().filter(|o| o.period.as_ref().map(|p| &p.1) == Some(&target)).count();
        pass &= hits > 0;
        parts.push(format!("r={r}: {word} on {hits}/10"));
    }
    outcome(pass, parts.join(", "))
}

fn criterion_11() -> Outcome {
    let (Ok(a), Ok(b)) = (thin_stripe_r(1, 2), thin_stripe_r(1, 3)) else {
        return outcome(false, "stripe formula rejected 1/2 or 1/3");
    };
    let da = (a - (3.0 - 2.0 * 2f64.sqrt())).abs();
    let db = (b - (2.0 - 3f64.sqrt())).abs();
    let stripes = thin_stripes(120);
    let worst = stripes
        .iter()
        .map(|&(l, m, r)| (cos_beta(r) - (2.0 * std::f64::consts::PI * l as f64 / m as f64).cos()).abs())
        .fold(0.0, f64::max);
    outcome(da < 1e-12 && db < 1e-12 && worst < 1e-12, format!("|r(1/2) - (3 - 2 sqrt 2)| = {da:.1e}, |r(1/3) - (2 - sqrt 3)| = {db:.1e}, max cos beta error {worst:.1e} over {} stripes", stripes.len()))
}

fn criterion_12() -> Outcome {
    let r = rr(0.3);
    let Some(u) = certify_pattern(&PatternWord::parse("132312").unwrap(), r).direction else {
        return outcome(false, "no certified 132312 direction at r = 0.3");
    };
    let near = ProjectiveDirection::new(1.0, 0.01, -1.0).unwrap();
    let results = (|| -> collapse_lab::Result<(f64, f64, f64)> {
        let l1 = lyapunov_max(&u, r, 10_000)?.lambda_max;
        let l2 = lyapunov_max(&near, rr(0.2), 100_000)?.lambda_max;
        let rho = rotation_number(&near, rr(thin_stripe_r(1, 3)?), 10_000)?.rho;
        Ok((l1, l2, rho))
    })();
    match results {
        Ok((l1, l2, rho)) => outcome(
            l1 < 0.0 && l2.abs() < 1e-2 && (rho - 1.0 / 3.0).abs() < 1e-3,
            format!("lambda on 132312 at 0.3 = {l1:.4}; quasi-periodic lambda at 0.2 = {l2:.2e}; rotation number at 2 - sqrt 3 = {rho:.9}"),
        ),
        Err(e) => outcome(false, e.to_string()),
    }
}

fn report(n: usize, budget: &str, elapsed: Duration, o: &Outcome) {
    let verdict = if o.pass { "PASS" } else { "FAIL" };
    println!("criterion {n:>2}: {verdict} [{:.1} s, budget {budget}] {}", elapsed.as_secs_f64(), o.detail);
}

fn main() {
    let mut failures = 0;
    let mut run = |n: usize, budget: &str, f: &mut dyn FnMut() -> Outcome| {
        let t = Instant::now();
        let o = f();
        report(n, budget, t.elapsed(), &o);
        if !o.pass {
            failures += 1;
        }
    };
    run(1, "10 s", &mut criterion_1);
    let t = Instant::now();
    let table = window_table(100, PrecisionBudget::default());
    let table_time = t.elapsed();
    let table = match table {
        Ok(t) => t,
        Err(e) => {
            println!("window table failed: {e}");
            Vec::new()
        }
    };
    println!("window table n = 1..100 computed in {:.1} s (shared by criteria 2 and 3)", table_time.as_secs_f64());
    run(2, "30 min", &mut || criterion_2(&table));
    run(3, "1 min", &mut || criterion_3(&table));
    run(4, "1 min", &mut criterion_4);
    run(5, "5 min", &mut criterion_5);
    run(6, "1 s", &mut criterion_6);
    run(7, "1 s", &mut criterion_7);
    run(8, "1 min", &mut criterion_8);
    run(9, "5 min", &mut criterion_9);
    run(10, "2 min", &mut criterion_10);
    run(11, "1 s", &mut criterion_11);
    run(12, "1 min", &mut criterion_12);
    println!("{} of 12 criteria pass", 12 - failures);
    if failures > 0 && std::env::var("ACCEPTANCE_STRICT").as_deref() == Ok("1") {
        std::process::exit(1);
    }
}
