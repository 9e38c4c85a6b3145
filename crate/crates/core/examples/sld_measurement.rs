//! Using the SLD itself as the measured observable. Its deviation vector is
//! proportional to the generator's, with real constant `C = 1/2`, so the
//! error-propagation variance sits exactly on the Cramér-Rao bound.
//!
//! ```text
//! cargo run --example sld_measurement
//! ```

use nhqfi::linalg::{ComplexMatrix, C64};
use nhqfi::measurement::{check_condition, crb_gap, deviation_vectors, DEFAULT_CONDITION_TOL};
use nhqfi::qfi::{sld, sld_alternative, sld_qfi};
use nhqfi::ComplexVector;

fn main() -> nhqfi::Result<()> {
    let h = ComplexMatrix::from_rows(vec![
        vec![C64::new(0.4, -0.3), C64::new(1.0, 0.2)],
        vec![C64::new(0.7, 0.0), C64::new(-0.2, 0.5)],
    ])?;
    let psi0 = ComplexVector::new(vec![C64::new(0.6, 0.0), C64::new(0.0, 0.8)])?;

    for theta in [0.0, 0.5, 1.5] {
        let l = sld(&h, &psi0, theta)?;
        let (f, g) = deviation_vectors(&h, &l, &psi0, theta)?;
        let report = check_condition(&f, &g, DEFAULT_CONDITION_TOL)?;
        println!(
            "theta = {theta:.1}: C = {:.10} {:+.1e}i, residual {:.1e}, CRB gap {:+.1e}",
            report.c_estimate.re,
            report.c_estimate.im,
            report.residual,
            crb_gap(&h, &l, &psi0, theta)?
        );
    }

    // The SLD of a pure state is not unique; other members give the same QFI.
    let theta = 0.8;
    let base = sld_qfi(&h, &psi0, theta, &sld(&h, &psi0, theta)?)?;
    let sigma_x = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]])?;
    let other = sld_alternative(&h, &psi0, theta, &sigma_x, 3.0)?;
    println!(
        "Tr[rho L^2]: canonical {base:.12}, alternative {:.12}",
        sld_qfi(&h, &psi0, theta, &other)?
    );
    Ok(())
}
