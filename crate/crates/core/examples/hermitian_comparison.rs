//! How the gain/loss qubit compares with Hermitian references: the ratio of
//! its QFI to `4 nu0` (same eigenvalue gap) and to `4 r^2`, maximized over
//! theta, plus the sanity check that Hermitian generators keep `K = 1`.
//!
//! ```text
//! cargo run --example hermitian_comparison
//! ```

use std::f64::consts::FRAC_PI_2;

use nhqfi::pt::{self, PtParams};
use nhqfi::qfi::qfi_expectation;
use nhqfi::search::grid_then_golden;
use nhqfi::validate::{random_hermitian, random_state};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> nhqfi::Result<()> {
    println!("{:>6} {:>12} {:>12}", "kappa", "max S0", "max S1");
    for kappa in [0.1, 0.2, 0.4, 0.6, 0.8] {
        let params = PtParams::new(kappa, 1.0, FRAC_PI_2)?;
        let period = std::f64::consts::PI / params.discriminant().sqrt();
        let ratio = |k: usize| {
            move |t: f64| {
                pt::hermitian_ratios(&params, 1.0, 0.0, t).map_or(f64::NAN, |r| {
                    if k == 0 {
                        r.0
                    } else {
                        r.1
                    }
                })
            }
        };
        let (_, s0) = grid_then_golden(ratio(0), 0.0, period, 200, 1e-12);
        let (_, s1) = grid_then_golden(ratio(1), 0.0, period, 200, 1e-12);
        println!("{kappa:>6.2} {s0:>12.6} {s1:>12.6}");
    }

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let h = random_hermitian(&mut rng, 3, 1.5);
    let psi0 = random_state(&mut rng, 3);
    println!("\nrandom 3x3 Hermitian generator:");
    for theta in [0.0, 1.0, 5.0] {
        let q = qfi_expectation(&h, &psi0, theta)?;
        println!(
            "  theta = {theta:.1}: K = {:.12}, F = {:.10}",
            q.k_theta, q.qfi
        );
    }
    Ok(())
}
