use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use inhomkg_cli::{list_suites, run_suite, Status, SuiteConfig};

#[derive(Parser)]
#[command(name = "inhomkg", about = "Verification suites for the algebraic and lattice layers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the available suites.
    List,
    Algebra(RunArgs),
    Fedosov(RunArgs),
    Lattice(RunArgs),
    RceDerivative(RunArgs),
    Dynloc(RunArgs),
    Composition(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory; overrides `output.dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Tolerance for every floating case.
    #[arg(long)]
    tolerance: Option<f64>,
}

fn load(args: &RunArgs) -> Result<SuiteConfig, String> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            SuiteConfig::parse(&text).map_err(|e| format!("{}: {e}", path.display()))?
        }
        None => SuiteConfig::default(),
    };
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(t) = args.tolerance {
        if !(t.is_finite() && t > 0.0) {
            return Err(format!("--tolerance: expected a positive number, got {t}"));
        }
        cfg.global_tolerance = Some(t);
    }
    if let Some(out) = &args.out {
        cfg.output_dir = Some(out.clone());
    }
    cfg.validate().map_err(|e| e.to_string())?;
    Ok(cfg)
}

fn run(name: &str, args: &RunArgs) -> ExitCode {
    let cfg = match load(args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if let Some(s) = &cfg.suite {
        if s != name {
            eprintln!("error: suite: config is for `{s}`, not `{name}`");
            return ExitCode::from(2);
        }
    }
    let outcome = match run_suite(name, &cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    for c in &outcome.report.cases {
        let status = match c.status {
            Status::Pass => "pass",
            Status::Fail => "FAIL",
            Status::Skip => "skip",
        };
        let note = c.note.as_deref().map(|n| format!("  ({n})")).unwrap_or_default();
        println!("{status:4}  {:<44} {:>12.4e}  tol {:.1e}{note}", c.name, c.value, c.tolerance);
    }
    if let Some(dir) = &cfg.output_dir {
        match outcome.write(dir) {
            Ok(files) => {
                for f in files {
                    println!("wrote {}", f.display());
                }
            }
            Err(e) => {
                eprintln!("error: writing {}: {e}", dir.display());
                return ExitCode::from(2);
            }
        }
    }
    let passed = outcome.report.all_passed();
    println!("{name}: {}", if passed { "all cases passed" } else { "some cases failed" });
    if passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, args) = match &cli.command {
        Command::List => {
            for s in list_suites() {
                println!("{:<16} {}", s.name, s.description);
            }
            return ExitCode::SUCCESS;
        }
        Command::Algebra(a) => ("algebra", a),
        Command::Fedosov(a) => ("fedosov", a),
        Command::Lattice(a) => ("lattice", a),
        Command::RceDerivative(a) => ("rce-derivative", a),
        Command::Dynloc(a) => ("dynloc", a),
        Command::Composition(a) => ("composition", a),
    };
    run(name, args)
}
