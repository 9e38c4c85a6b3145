use std::f64::consts::FRAC_PI_2;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use nhqfi::error::Error;
use nhqfi::pt::{self, PtParams, RegimeTag};
use nhqfi::sweep::{format_sig, preset, run_sweep, SweepConfig, PRESETS};
use nhqfi::validate::validate_suite;

const EXIT_VALIDATION: u8 = 1;
const EXIT_SPEC: u8 = 2;

#[derive(Parser)]
#[command(
    name = "nhqfi",
    version,
    about = "Quantum Fisher information under non-Hermitian evolution"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a quantity over a theta or parameter grid.
    Sweep(Common),
    /// Run the cross-oracle validation battery.
    Validate(Common),
    /// Channel QFI of the PT model: closed form plus numeric optimum.
    ChannelQfi(Common),
    /// Classify a PT parameter set and print its eigensystem.
    Regime(Common),
}

#[derive(Clone, Copy, Default, ValueEnum)]
enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Args)]
struct Common {
    /// TOML file with sweep settings; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Named recipe (see `--preset list`).
    #[arg(long)]
    preset: Option<String>,
    /// pt, bosonic or custom-matrix.
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    quantity: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
    #[arg(long, allow_hyphen_values = true)]
    theta_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    theta_max: Option<f64>,
    #[arg(long)]
    theta_steps: Option<usize>,
    /// Sweep this model parameter instead of theta.
    #[arg(long)]
    param: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    param_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    param_max: Option<f64>,
    /// Fixed theta for parameter sweeps.
    #[arg(long, allow_hyphen_values = true)]
    theta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    r: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    s: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    omega: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    m: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    phi: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    g: Option<f64>,
    #[arg(long)]
    gamma_a: Option<f64>,
    #[arg(long)]
    gamma_b: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    omega0: Option<f64>,
    /// eigen, eigen-unbroken, eigen-broken or explicit.
    #[arg(long)]
    basis: Option<String>,
    /// Condition tolerance for sweeps, EP tolerance for `regime`.
    #[arg(long)]
    tol: Option<f64>,
}

impl Common {
    fn flags(&self) -> SweepConfig {
        SweepConfig {
            model: self.model.clone(),
            quantity: self.quantity.clone(),
            r: self.r,
            s: self.s,
            omega: self.omega,
            m: self.m,
            phi: self.phi,
            g: self.g,
            gamma_a: self.gamma_a,
            gamma_b: self.gamma_b,
            omega0: self.omega0,
            theta_min: self.theta_min,
            theta_max: self.theta_max,
            steps: self.theta_steps,
            param: self.param.clone(),
            param_min: self.param_min,
            param_max: self.param_max,
            theta: self.theta,
            basis: self.basis.clone(),
            tol: self.tol,
            ..SweepConfig::default()
        }
    }

    /// Preset, then config file, then flags.
    fn layered(&self) -> Result<SweepConfig, Error> {
        let mut cfg = match &self.preset {
            Some(name) => preset(name).ok_or_else(|| Error::Spec {
                field: "preset".into(),
                message: format!("unknown preset `{name}`; available: {}", PRESETS.join(", ")),
            })?,
            None => SweepConfig::default(),
        };
        if let Some(path) = &self.config {
            let text = fs::read_to_string(path).map_err(|e| Error::Spec {
                field: "config".into(),
                message: format!("{}: {e}", path.display()),
            })?;
            cfg = cfg.merge(SweepConfig::from_toml_str(&text)?);
        }
        Ok(cfg.merge(self.flags()))
    }

    fn pt_params(&self) -> Result<PtParams, Error> {
        let cfg = self.layered()?;
        let missing = |field: &str| Error::Spec {
            field: field.into(),
            message: "required".into(),
        };
        let p = PtParams {
            r: cfg.r.ok_or_else(|| missing("r"))?,
            s: cfg.s.ok_or_else(|| missing("s"))?,
            omega: cfg.omega.unwrap_or(FRAC_PI_2),
        };
        p.validate().map_err(|e| Error::Spec {
            field: "r/s/omega".into(),
            message: e.to_string(),
        })?;
        Ok(p)
    }

    fn emit(&self, text: &str) -> Result<(), Error> {
        match &self.out {
            Some(path) => fs::write(path, text).map_err(|e| Error::Spec {
                field: "out".into(),
                message: format!("{}: {e}", path.display()),
            }),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }
}

fn key_values(format: Format, pairs: &[(&str, String)]) -> String {
    match format {
        Format::Csv => {
            let mut out = String::from("field,value\n");
            for (k, v) in pairs {
                out.push_str(&format!("{k},{v}\n"));
            }
            out
        }
        Format::Json => {
            let map: serde_json::Map<String, serde_json::Value> = pairs
                .iter()
                .map(|(k, v)| {
                    let value = v.parse::<f64>().ok().filter(|x| x.is_finite()).map_or_else(
                        || serde_json::Value::from(v.clone()),
                        serde_json::Value::from,
                    );
                    (k.to_string(), value)
                })
                .collect();
            serde_json::to_string_pretty(&map).expect("serializable") + "\n"
        }
    }
}

fn complex(z: nhqfi::C64) -> String {
    format!(
        "{}{}{}i",
        format_sig(z.re),
        if z.im < 0.0 { "-" } else { "+" },
        format_sig(z.im.abs())
    )
}

fn run(cli: Cli) -> Result<u8, Error> {
    match cli.command {
        Command::Sweep(args) => {
            if args.preset.as_deref() == Some("list") {
                args.emit(&(PRESETS.join("\n") + "\n"))?;
                return Ok(0);
            }
            let spec = args.layered()?.resolve()?;
            let result = run_sweep(&spec);
            let text = match args.format {
                Format::Csv => result.to_csv(),
                Format::Json => result.to_json(),
            };
            args.emit(&text)?;
            eprintln!("{}", result.summary());
            Ok(0)
        }
        Command::Validate(args) => {
            let report = validate_suite();
            let text = match args.format {
                Format::Csv => report.render(),
                Format::Json => serde_json::to_string_pretty(&report).expect("serializable") + "\n",
            };
            args.emit(&text)?;
            Ok(if report.passed() { 0 } else { EXIT_VALIDATION })
        }
        Command::ChannelQfi(args) => {
            let p = args.pt_params()?;
            let closed = pt::channel_qfi(&p)?;
            let mut pairs = vec![
                ("r", format_sig(p.r)),
                ("s", format_sig(p.s)),
                ("omega", format_sig(p.omega)),
                ("closed_form", format_sig(closed.value)),
                ("at_ep", closed.at_ep.to_string()),
            ];
            match pt::channel_qfi_numeric(&p) {
                Ok(opt) => pairs.extend([
                    ("numeric", format_sig(opt.value)),
                    ("m", format_sig(opt.m)),
                    ("phi", format_sig(opt.phi)),
                    ("theta", format_sig(opt.theta)),
                ]),
                Err(e) => pairs.push(("numeric", e.code().to_string())),
            }
            args.emit(&key_values(args.format, &pairs))?;
            Ok(0)
        }
        Command::Regime(args) => {
            let p = args.pt_params()?;
            let tol = args.tol.unwrap_or(pt::DEFAULT_EP_TOL);
            if tol.is_nan() || tol <= 0.0 {
                return Err(Error::Spec {
                    field: "tol".into(),
                    message: "must be positive".into(),
                });
            }
            let regime = pt::classify(&p, tol);
            let mut pairs = vec![
                ("regime", regime.tag.as_str().to_string()),
                ("mu", format_sig(regime.mu)),
                ("nu", format_sig(regime.nu)),
                ("kappa", format_sig(p.kappa())),
                ("A", format_sig(p.a())),
            ];
            if regime.tag == RegimeTag::ExceptionalPoint {
                let v = pt::coalesced_eigenvector(&p)?;
                pairs.push(("eigenvalue", complex(nhqfi::C64::new(regime.mu, 0.0))));
                pairs.push((
                    "eigenvector",
                    format!("({}; {})", complex(v[0]), complex(v[1])),
                ));
            } else {
                let (values, vectors) = pt::eigensystem(&p)?;
                let labels = [
                    ("eigenvalue_plus", "eigenvector_plus"),
                    ("eigenvalue_minus", "eigenvector_minus"),
                ];
                for (k, (value_key, vector_key)) in labels.into_iter().enumerate() {
                    pairs.push((value_key, complex(values[k])));
                    pairs.push((
                        vector_key,
                        format!("({}; {})", complex(vectors[k][0]), complex(vectors[k][1])),
                    ));
                }
                let overlap = nhqfi::linalg::inner(&vectors[0], &vectors[1])?;
                pairs.push(("overlap", complex(overlap)));
            }
            args.emit(&key_values(args.format, &pairs))?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_SPEC)
        }
    }
}
