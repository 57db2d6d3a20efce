use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qxr_cli::{analyze, construct, export_csv, render, verify, CliError, Format, RunConfig, Source, SpecFile};
use qxr_core::catalog;

#[derive(Parser)]
#[command(name = "qxr", version, about = "Submanifolds of Q^n_eps x R with flat normal bundle")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Flatness, principal normals, class A, Einstein fit and the derived identities.
    Analyze(Common),
    /// Residuals of the Gauss, Codazzi and Ricci equations and the vertical-field identities.
    Verify(Common),
    /// Build and certify a warped product from a spec file, optionally exporting samples.
    Construct {
        #[command(flatten)]
        common: Common,
        /// CSV file for the sampled points.
        #[arg(long)]
        export: Option<PathBuf>,
    },
    /// List catalog entries and their parameters.
    Catalog,
}

#[derive(Args)]
struct Common {
    /// Catalog entry name.
    #[arg(long, conflicts_with = "spec", required_unless_present = "spec")]
    catalog: Option<String>,
    /// Catalog parameter `k=v`; repeatable.
    #[arg(long = "param", requires = "catalog")]
    params: Vec<String>,
    /// JSON spec file.
    #[arg(long)]
    spec: Option<PathBuf>,
    #[arg(long, default_value_t = 30)]
    samples: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Tolerance override `NAME=V`; repeatable.
    #[arg(long = "tol")]
    tol: Vec<String>,
    #[arg(long, conflicts_with = "csv")]
    json: bool,
    #[arg(long)]
    csv: bool,
    /// Report destination; standard output by default.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn config(&self) -> Result<RunConfig, CliError> {
        let source = match (&self.catalog, &self.spec) {
            (Some(name), None) => Source::Catalog {
                name: name.clone(),
                params: catalog::parse_params(self.params.iter().map(String::as_str))
                    .map_err(|e| CliError::Usage(e.to_string()))?,
            },
            (None, Some(path)) => Source::SpecFile {
                path: path.display().to_string(),
                spec: SpecFile::read(path)?,
            },
            _ => return Err(CliError::Usage("give exactly one of --catalog and --spec".into())),
        };
        let mut cfg = RunConfig::new(source, self.samples, self.seed)?;
        cfg.tolerances = cfg.tolerances.with_overrides(self.tol.iter().map(String::as_str))?;
        cfg.format = if self.csv { Format::Csv } else { Format::Json };
        Ok(cfg)
    }
}

fn write(path: &Option<PathBuf>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Usage(format!("cannot write {}: {e}", p.display()))),
        // a closed pipe (`qxr catalog | head`) is not an error
        None => match std::io::stdout().lock().write_all(text.as_bytes()) {
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(CliError::Usage(format!("cannot write output: {e}"))),
            _ => Ok(()),
        },
    }
}

fn run(cli: Cli) -> Result<i32, CliError> {
    let (report, out) = match &cli.command {
        Command::Catalog => {
            let mut text = String::new();
            for e in catalog::registry() {
                text += &format!("{}: {}\n", e.name, e.description);
                for p in &e.params {
                    text += &format!("    {} = {} ({})\n", p.name, p.default, p.range);
                }
            }
            write(&None, &text)?;
            return Ok(0);
        }
        Command::Analyze(c) => (analyze(&c.config()?)?, &c.out),
        Command::Verify(c) => (verify(&c.config()?)?, &c.out),
        Command::Construct { common, export } => {
            let (report, rows) = construct(&common.config()?)?;
            if let Some(path) = export {
                write(&Some(path.clone()), &export_csv(&rows))?;
            }
            (report, &common.out)
        }
    };
    write(out, &render(&report))?;
    Ok(qxr_cli::exit_code(&report))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("qxr: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
