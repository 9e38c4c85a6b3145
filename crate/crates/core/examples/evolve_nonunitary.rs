//! Non-unitary evolution of a gain/loss qubit: the norm `K_theta` of the
//! evolved state, and the closed-form 2x2 exponential against the generic
//! scaling-and-squaring path.
//!
//! ```text
//! cargo run --example evolve_nonunitary
//! ```

use std::f64::consts::FRAC_PI_2;

use nhqfi::evolution::evolve;
use nhqfi::linalg::{mat_exp_2x2, mat_exp_series};
use nhqfi::pt::{self, PtParams};
use nhqfi::search::linspace;
use nhqfi::ComplexVector;

fn main() -> nhqfi::Result<()> {
    for (label, params) in [
        ("unbroken", PtParams::new(0.25, 1.0, FRAC_PI_2)?),
        ("broken", PtParams::new(1.0, 0.25, FRAC_PI_2)?),
    ] {
        let h = pt::build(&params)?;
        let psi0 = ComplexVector::basis(2, 0);
        println!("{label}: r = {}, s = {}", params.r, params.s);
        println!("{:>8} {:>14} {:>14}", "theta", "K_theta", "|U2 - Useries|");
        for theta in linspace(0.0, 6.0, 7) {
            let state = evolve(&h, &psi0, theta)?;
            let gap = mat_exp_2x2(&h, theta).max_abs_diff(&mat_exp_series(&h, theta));
            println!("{theta:>8.2} {:>14.6e} {gap:>14.2e}", state.k_theta);
        }
        println!();
    }
    Ok(())
}
