//! Four independent ways to get the QFI of a pure state under a random
//! non-Hermitian generator, evaluated side by side.
//!
//! ```text
//! cargo run --example qfi_routes
//! ```

use nhqfi::qfi::{
    classical_fisher, qfi_derivative, qfi_expectation, sld, sld_qfi, sld_residual, Povm,
};
use nhqfi::validate::{random_matrix, random_state};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> nhqfi::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    println!(
        "{:>3} {:>6} {:>12} {:>12} {:>12} {:>12} {:>10}",
        "#", "theta", "expectation", "derivative", "Tr[rho L^2]", "Fisher(L)", "SLD resid"
    );
    for k in 0..8 {
        let h = random_matrix(&mut rng, 2, 2.0);
        let psi0 = random_state(&mut rng, 2);
        let theta = 0.4 * k as f64;
        let expectation = qfi_expectation(&h, &psi0, theta)?.qfi;
        let derivative = qfi_derivative(&h, &psi0, theta)?;
        let l = sld(&h, &psi0, theta)?;
        let trace = sld_qfi(&h, &psi0, theta, &l)?;
        let fisher = classical_fisher(&h, &psi0, theta, &Povm::eigenbasis_2x2(&l)?)?;
        let residual = sld_residual(&h, &psi0, theta, &l)?;
        println!("{k:>3} {theta:>6.2} {expectation:>12.8} {derivative:>12.8} {trace:>12.8} {fisher:>12.8} {residual:>10.1e}");
    }
    Ok(())
}
