//! `fsl`: runs one plasma case and writes its time series and snapshots.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use fsl_core::analytic::dispersion_table;
use fsl_core::config::{parse_config, CaseName};
use fsl_core::run::run;
use fsl_core::Error;

#[derive(Debug, Parser)]
#[command(name = "fsl", version, about = "Forward semi-Lagrangian Vlasov and guiding-center solver")]
struct Args {
    /// Configuration file with one `key=value` pair per line.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, value_name = "DIR", default_value = "run")]
    out: PathBuf,
    /// Case to run; overrides the case named in the configuration file.
    #[arg(long, value_name = "NAME")]
    case: Option<String>,
    /// Overrides one key; may be repeated.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Lists the built-in cases and exits.
    #[arg(long)]
    list_cases: bool,
    /// Prints the dominant Landau root for k = 0.2, 0.3, ..., 0.6 and exits.
    #[arg(long)]
    dispersion_table: bool,
}

const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERIC: u8 = 3;

fn exit_code(e: &Error) -> ExitCode {
    if e.is_config() {
        ExitCode::from(EXIT_CONFIG)
    } else if matches!(e, Error::NumericAbort { .. }) {
        ExitCode::from(EXIT_NUMERIC)
    } else {
        ExitCode::FAILURE
    }
}

fn print_dispersion_table() -> Result<(), Error> {
    let ks: Vec<f64> = (2..=6).map(|i| i as f64 / 10.0).collect();
    println!("k,omega_r,omega_i,r,phi");
    for root in dispersion_table(&ks)? {
        println!(
            "{:.1},{:.7},{:.7},{:.7},{:.7}",
            root.k, root.omega_r, root.omega_i, root.r, root.phi
        );
    }
    Ok(())
}

fn config_text(args: &Args) -> Result<String, Error> {
    let mut text = match &args.config {
        Some(path) => std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?,
        None => String::new(),
    };
    if !text.is_empty() && !text.ends_with('\n') {
        text.push('\n');
    }
    if let Some(case) = &args.case {
        text.push_str(&format!("case={case}\n"));
    }
    for kv in &args.set {
        if !kv.contains('=') {
            return Err(Error::Config(format!("--set expects key=value, got `{kv}`")));
        }
        text.push_str(kv);
        text.push('\n');
    }
    Ok(text)
}

fn main() -> ExitCode {
    let args = Args::parse();
    if args.list_cases {
        for case in CaseName::ALL {
            println!("{:<18}{}", case.name(), case.description());
        }
        return ExitCode::SUCCESS;
    }
    if args.dispersion_table {
        return match print_dispersion_table() {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {e}");
                exit_code(&e)
            }
        };
    }
    let result = config_text(&args).and_then(|text| parse_config(&text)).and_then(|cfg| {
        let summary = run(&cfg, &args.out)?;
        println!(
            "{}: {} steps to t={} ({} rows, {} snapshots) in {}",
            cfg.case.name(),
            summary.steps,
            summary.t,
            summary.rows,
            summary.snapshots,
            args.out.display()
        );
        Ok(())
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
