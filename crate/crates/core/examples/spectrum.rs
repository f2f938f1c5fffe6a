//! Closed-form eigenvalues of the three branch matrices next to the numeric
//! cubic roots, across the two regime switches.
//!
//! cargo run --release --example spectrum

use collapse_lab::map_core::{branch_matrix, Branch, Restitution};
use collapse_lab::spectral::{discriminant_p1, discriminant_p2, eigen_numeric, eigen_p1, eigen_p2, eigen_p3, regime_switches};

fn main() -> collapse_lab::Result<()> {
    for r in [0.05, 0.1, 0.2, 0.5] {
        let rr = Restitution::new(r)?;
        for (b, es) in [(Branch::One, eigen_p1(rr)), (Branch::Two, eigen_p2(rr)), (Branch::Three, eigen_p3(rr))] {
            let num = eigen_numeric(&branch_matrix(b, rr));
            let l: Vec<String> = es.eigenvalues.iter().map(|z| format!("{:.6}{:+.6}i", z.re, z.im)).collect();
            println!("r = {r} P{b}: {} (numeric residual {:.1e})", l.join(", "), num.max_residual(&branch_matrix(b, rr)));
        }
    }
    for (name, disc) in [("P1", discriminant_p1()), ("P2", discriminant_p2())] {
        for (lo, hi) in regime_switches(&disc, 60) {
            let f = collapse_lab::exact::rational_to_f64;
            println!("{name} eigenvalues turn complex in [{:.15}, {:.15}]", f(&lo), f(&hi));
        }
    }
    Ok(())
}
