//! Lyapunov exponents, rotation numbers on the thin stripes, time
//! correlations and an empirical histogram.
//!
//! cargo run --release --example orbit_diagnostics

use collapse_lab::analysis::{correlations, default_grid, empirical_histogram, lyapunov_max, rotation_number, thin_stripe_r, thin_stripes};
use collapse_lab::map_core::{theta, ProjectiveDirection, Restitution};
use collapse_lab::spectral::{certify_pattern, PatternWord};

fn main() -> collapse_lab::Result<()> {
    let r = Restitution::new(0.3)?;
    let u = certify_pattern(&PatternWord::parse("132312")?, r).direction.expect("certified at 0.3");
    println!("lambda on 132312 at r = 0.3: {:.6}", lyapunov_max(&u, r, 10_000)?.lambda_max);

    let near_center = ProjectiveDirection::new(1.0, 0.01, -1.0)?;
    let r = Restitution::new(0.2)?;
    println!("lambda near (1, 0, -1) at r = 0.2: {:.2e}", lyapunov_max(&near_center, r, 100_000)?.lambda_max);

    for (l, m) in [(1, 3), (2, 5), (3, 8)] {
        let r = Restitution::new(thin_stripe_r(l, m)?)?;
        let rho = rotation_number(&near_center, r, 10_000)?.rho;
        println!("stripe {l}/{m}: r = {:.12}, rotation number {rho:.9}", r.r());
    }
    println!("{} stripes with m <= 120", thin_stripes(120).len());

    let th = |u: &ProjectiveDirection| theta(u).unwrap_or(f64::NAN);
    let c = correlations(&near_center, r, th, th, 20_000, &[0, 1, 2, 50, 100], 0)?;
    println!("theta autocorrelation at r = 0.2: {:?}", c.values);

    let h = empirical_histogram(&default_grid()[0], Restitution::new(0.16)?, 10_000, (200, 100), 1000)?;
    println!("1133 orbit occupies {} of 20000 bins", h.occupied());
    Ok(())
}
