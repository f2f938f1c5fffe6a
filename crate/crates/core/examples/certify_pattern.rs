//! Periodic-orbit certificates: where 132312 turns stable, 1133 inside its
//! window and 13223122, which is never stable.
//!
//! cargo run --release --example certify_pattern

use collapse_lab::map_core::Restitution;
use collapse_lab::spectral::{boundary_roots_1322, certify_pattern, critical_r_132, PatternWord};

fn main() -> collapse_lab::Result<()> {
    let w = PatternWord::parse("132312")?;
    for r in [0.20, 0.21, 0.23, 0.3, 0.5] {
        let c = certify_pattern(&w, Restitution::new(r)?);
        let why = c.failed_inequality.map(|(s, i)| format!(" (step {s} fails {i})")).unwrap_or_default();
        println!("{w} at r = {r}: exists {}, stable {}{why}", c.exists, c.stable);
    }
    println!("132312 becomes stable at r = {:.12}", critical_r_132(1e-14)?);

    let c = certify_pattern(&PatternWord::parse("1133")?, Restitution::new(0.15)?);
    println!("1133 at r = 0.15: stable {}, multiplier {:.6e}", c.stable, c.multiplier.unwrap_or_default().re);

    let w = PatternWord::parse("13223122")?;
    let stable = (11..990).filter(|&i| certify_pattern(&w, Restitution::new(i as f64 / 1000.0).unwrap()).stable).count();
    let (a, b) = boundary_roots_1322(1e-14)?;
    println!("13223122 stable on {stable} of 979 grid points; feasibility boundaries {a:.15} and {b:.15}");
    Ok(())
}
