//! A small bifurcation scan across the window of 1133 and the chaotic band
//! below it, summarised by detected period; the full tails go to a CSV.
//!
//! cargo run --release --example bifurcation_scan > scan.csv

use collapse_lab::analysis::{bifurcation_csv, bifurcation_scan, default_grid, linspace, scan_summaries, Observable, ScanConfig};

fn main() -> collapse_lab::Result<()> {
    let grid = default_grid();
    for r in linspace(0.11, 0.17, 7) {
        let s = scan_summaries(&[r], &grid, 5000, 100, 64, Observable::Theta, 1e-6);
        let periodic: Vec<String> = s.iter().filter_map(|o| o.period.as_ref().map(|p| p.1.clone())).collect();
        let mut words = periodic.clone();
        words.sort();
        words.dedup();
        eprintln!("r = {r:.3}: {}/{} orbits periodic {words:?}", periodic.len(), s.len());
    }
    let mut cfg = ScanConfig::new(0.12, 0.17, 50);
    cfg.init_grid.truncate(4);
    print!("{}", bifurcation_csv(&bifurcation_scan(&cfg)?));
    Ok(())
}
