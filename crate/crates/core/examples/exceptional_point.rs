//! QFI at and near the exceptional point. Exactly at the EP the eigenbasis
//! is gone, yet a computational-basis probe still carries information through
//! the defective-limit exponential.
//!
//! ```text
//! cargo run --example exceptional_point
//! ```

use std::f64::consts::FRAC_PI_2;

use nhqfi::pt::{self, InitialStateSpec, PtParams};
use nhqfi::qfi::qfi_expectation;
use nhqfi::ComplexVector;

fn main() -> nhqfi::Result<()> {
    let ep = PtParams::new(2.0, 2.0, FRAC_PI_2)?;
    let ket0 = ComplexVector::basis(2, 0);
    println!("at the EP, psi0 = |0>:");
    for theta in [0.0, 0.5, 1.0, 2.0] {
        println!(
            "  theta = {theta:.1}: F = {:.9}",
            pt::qfi_at_ep(&ep, &ket0, theta)?
        );
    }
    let coalesced = pt::coalesced_eigenvector(&ep)?;
    println!(
        "  coalesced eigenvector: F = {:.3e}",
        pt::qfi_at_ep(&ep, &coalesced, 0.7)?
    );

    println!("\nbalanced eigen-superposition approaching the EP, theta = 0.5:");
    for delta in [0.5, 0.1, 1e-2, 1e-3, -1e-3, -1e-2, -0.1] {
        let params = PtParams::new(2.0, 2.0 + delta, FRAC_PI_2)?;
        let psi0 = pt::initial_state(&params, &InitialStateSpec::eigen(1.0, 0.0))?;
        let f = qfi_expectation(&pt::build(&params)?, &psi0, 0.5)?.qfi;
        println!(
            "  s = {:<7} {:<10} F = {f:.3e}",
            2.0 + delta,
            pt::classify(&params, pt::DEFAULT_EP_TOL).tag.as_str()
        );
    }
    Ok(())
}
