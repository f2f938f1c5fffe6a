//! Compares the linear map with the cross-product construction, the
//! particle simulation and the trigonometric algorithm, in exact and in
//! floating-point arithmetic.
//!
//! cargo run --release --example validate_engines

use collapse_lab::analysis::random_inits;
use collapse_lab::cli::validate_r;

fn main() -> collapse_lab::Result<()> {
    let inits = random_inits(20, 11);
    for r in ["0.1", "0.2", "0.3"] {
        let (rows, walls) = validate_r(r, &inits, 100)?;
        let pass = rows.iter().filter(|x| x.passes()).count();
        let full = rows.iter().filter(|x| x.horizon == 100).count();
        println!("r = {r}: {pass}/{} agree, {full} float runs reliable over all 100 letters, exact engines {:.2} s", rows.len(), walls[0]);
    }
    Ok(())
}
