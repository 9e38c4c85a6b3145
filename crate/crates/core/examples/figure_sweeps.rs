//! Batch-evaluating the bundled sweep presets and layering overrides on top,
//! the same way the `nhqfi sweep` command does. Writes CSV files into the
//! directory given as the first argument (default: `sweeps/`).
//!
//! ```text
//! cargo run --release --example figure_sweeps -- out/
//! ```

use std::fs;
use std::path::PathBuf;

use nhqfi::sweep::{preset, run_sweep, SweepConfig, PRESETS};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "sweeps".into()));
    fs::create_dir_all(&dir)?;

    for name in PRESETS {
        let spec = preset(name).expect("bundled preset").resolve()?;
        let result = run_sweep(&spec);
        let path = dir.join(format!("{name}.csv"));
        fs::write(&path, result.to_csv())?;
        println!("{name:<14} {:<40} -> {}", result.summary(), path.display());
    }

    // A config file sits between the preset and explicit overrides.
    let file = SweepConfig::from_toml_str("m = 1.2\nsteps = 61\n")?;
    let flags = SweepConfig {
        theta_max: Some(6.0),
        ..SweepConfig::default()
    };
    let layered = preset("fig3a")
        .expect("bundled preset")
        .merge(file)
        .merge(flags);
    let result = run_sweep(&layered.resolve()?);
    let worst = result
        .values("variance")
        .iter()
        .zip(result.values("inv_qfi"))
        .filter(|(v, f)| v.is_finite() && f.is_finite())
        .map(|(v, f)| v / f)
        .fold(0.0, f64::max);
    println!("\nfig3a with m = 1.2, theta in [0, 6]: worst variance / CRB = {worst:.4}");
    Ok(())
}
