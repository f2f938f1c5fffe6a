//! Ten random orbits at r = 0.2 and their eventual branch words, with the
//! strip-chart picture of the first one written to orbit.svg.
//!
//! cargo run --release --example simulate_orbit

use collapse_lab::analysis::{detect_period, random_inits, run_orbit};
use collapse_lab::map_core::{strip_coords, Restitution};
use collapse_lab::svg::SvgPlot;

fn main() -> collapse_lab::Result<()> {
    let r = Restitution::new(0.2)?;
    let mut points = Vec::new();
    for (i, u) in random_inits(10, 7).iter().enumerate() {
        let orbit = run_orbit(u, r, 5000, 2000);
        match detect_period(&orbit.branches, 64) {
            Some((p, w)) => println!("orbit {i}: period {p}, word {w}"),
            None => println!("orbit {i}: no period up to 64"),
        }
        if i == 0 {
            points = orbit.tail.iter().filter_map(|(_, v)| strip_coords(v).ok()).collect();
        }
    }
    std::fs::write("orbit.svg", SvgPlot::new("orbit tail at r = 0.2", "w1", "w2", points).render())?;
    Ok(())
}
