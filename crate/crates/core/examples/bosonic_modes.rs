//! Two lossy coupled modes with one shared excitation. Only the loss
//! imbalance enters the QFI; a common loss rate drops out after normalization.
//!
//! ```text
//! cargo run --example bosonic_modes
//! ```

use nhqfi::bosonic::{self, BosonicParams};
use nhqfi::qfi::qfi_expectation;
use nhqfi::search::linspace;

fn main() -> nhqfi::Result<()> {
    let base = BosonicParams::new(1.0, 1.0, 0.8, 0.2)?;
    let shifted = BosonicParams::new(1.0, 1.0, 1.8, 1.2)?;
    let psi0 = bosonic::initial_state();
    let [lp, lm] = bosonic::eigenvalues(&base)?;
    println!("eigenvalues {lp:.4}, {lm:.4}; xi^2 = {:.4}", base.xi_sq());
    println!(
        "{:>6} {:>12} {:>12} {:>14}",
        "theta", "closed", "engine", "common loss +1"
    );
    let h_base = bosonic::effective_hamiltonian(&base)?;
    let h_shifted = bosonic::effective_hamiltonian(&shifted)?;
    for theta in linspace(0.0, 3.0, 7) {
        println!(
            "{theta:>6.2} {:>12.8} {:>12.8} {:>14.8}",
            bosonic::qfi_bosonic_closed(&base, theta)?,
            qfi_expectation(&h_base, &psi0, theta)?.qfi,
            qfi_expectation(&h_shifted, &psi0, theta)?.qfi
        );
    }
    Ok(())
}
