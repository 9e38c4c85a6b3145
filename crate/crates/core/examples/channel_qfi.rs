//! Channel QFI: the best QFI over input states, in closed form and from a
//! brute-force search over eigen-superpositions and evolution times.
//!
//! ```text
//! cargo run --release --example channel_qfi
//! ```

use std::f64::consts::FRAC_PI_2;
use std::time::Instant;

use nhqfi::pt::{self, PtParams};

fn main() -> nhqfi::Result<()> {
    for (r, s) in [(0.25, 1.0), (1.0, 0.25), (0.5, 0.5), (0.0, 1.0), (2.0, 2.5)] {
        let params = PtParams::new(r, s, FRAC_PI_2)?;
        let closed = pt::channel_qfi(&params)?;
        let start = Instant::now();
        let numeric = pt::channel_qfi_numeric(&params);
        let elapsed = start.elapsed();
        match numeric {
            Ok(opt) => println!(
                "r = {r:<5} s = {s:<5} closed {:>8.5}  numeric {:>8.5} at m = {:+.3}, phi = {:.3}, theta = {:.3}  ({elapsed:.2?})",
                closed.value, opt.value, opt.m, opt.phi, opt.theta
            ),
            Err(e) => println!("r = {r:<5} s = {s:<5} closed {:>8.5}  numeric unavailable: {e}", closed.value),
        }
    }
    Ok(())
}
