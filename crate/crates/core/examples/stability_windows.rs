//! Exact bounds of the first stability windows of (13)ⁿ-type orbits.
//!
//! cargo run --release --example stability_windows [n_max]

use collapse_lab::windows::{accumulation_point, q_poly, window_table, windows_csv, PrecisionBudget};

fn main() -> collapse_lab::Result<()> {
    let n_max: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(12);
    println!("Q_1(r) = {}", q_poly(1)?);
    println!("Q_2(r) = {}", q_poly(2)?);
    let rows = window_table(n_max, PrecisionBudget::default())?;
    print!("{}", windows_csv(&rows));
    println!("windows accumulate on 7 - 4 sqrt 3 = {:.12}", accumulation_point());
    Ok(())
}
