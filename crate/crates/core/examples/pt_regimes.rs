//! Regime classification of the gain/loss qubit across the exceptional point,
//! with eigenvalues and the eigenvector overlap on each side.
//!
//! ```text
//! cargo run --example pt_regimes
//! ```

use std::f64::consts::FRAC_PI_2;

use nhqfi::linalg::inner;
use nhqfi::pt::{self, PtParams, RegimeTag, DEFAULT_EP_TOL};

fn main() -> nhqfi::Result<()> {
    let r = 1.0;
    for s in [2.0, 1.5, 1.1, 1.0, 0.9, 0.5, 0.25] {
        let params = PtParams::new(r, s, FRAC_PI_2)?;
        let regime = pt::classify(&params, DEFAULT_EP_TOL);
        print!(
            "s = {s:<5} kappa = {:<6.3} {:<18}",
            params.kappa(),
            regime.tag.as_str()
        );
        if regime.tag == RegimeTag::ExceptionalPoint {
            let v = pt::coalesced_eigenvector(&params)?;
            println!("coalesced eigenvector ({:.4}, {:.4})", v[0], v[1]);
            continue;
        }
        let (values, vectors) = pt::eigensystem(&params)?;
        let overlap = inner(&vectors[0], &vectors[1])?.norm();
        println!(
            "lambda = {:.4}, {:.4}   |<e+|e->| = {overlap:.4}",
            values[0], values[1]
        );
    }
    Ok(())
}
