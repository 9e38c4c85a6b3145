//! Projective measurement on `|0>` for the gain/loss qubit. With the balanced
//! eigen-superposition (`m = 1`) it saturates the Cramér-Rao bound at every
//! theta; unbalanced superpositions lose precision.
//!
//! ```text
//! cargo run --example optimal_measurement
//! ```

use std::f64::consts::FRAC_PI_2;

use nhqfi::linalg::ComplexMatrix;
use nhqfi::measurement::{
    check_condition, deviation_vectors, error_propagation, DEFAULT_CONDITION_TOL,
};
use nhqfi::pt::{self, InitialStateSpec, PtParams};
use nhqfi::qfi::qfi_expectation;
use nhqfi::search::linspace;
use nhqfi::ComplexVector;

fn main() -> nhqfi::Result<()> {
    let params = PtParams::new(0.25, 0.5, FRAC_PI_2)?;
    let h = pt::build(&params)?;
    let a = ComplexMatrix::projector(&ComplexVector::basis(2, 0));

    for m in [1.0, 1.1, 1.2, 1.3] {
        let psi0 = pt::initial_state(&params, &InitialStateSpec::eigen(m, 0.0))?;
        let mut worst: f64 = 0.0;
        let mut skipped = 0;
        for theta in linspace(0.0, 12.0, 121) {
            match error_propagation(&h, &a, &psi0, theta, 1) {
                Ok(var) => worst = worst.max(var * qfi_expectation(&h, &psi0, theta)?.qfi),
                Err(_) => skipped += 1,
            }
        }
        println!("m = {m:.1}: max variance x QFI = {worst:.6} ({skipped} zero-signal points)");
    }

    println!("\ncondition |f> = iC|g> for m = 1:");
    let psi0 = pt::initial_state(&params, &InitialStateSpec::eigen(1.0, 0.0))?;
    for theta in [0.3, 1.0, 2.5, 4.0] {
        let (f, g) = deviation_vectors(&h, &a, &psi0, theta)?;
        let report = check_condition(&f, &g, DEFAULT_CONDITION_TOL)?;
        let closed = pt::optimal_condition_constant(&params, 0.0, theta)?;
        println!(
            "  theta = {theta:.1}: C = {:+.10} (closed form {closed:+.10}), satisfied = {}",
            report.c_estimate.re, report.satisfied
        );
    }
    Ok(())
}
