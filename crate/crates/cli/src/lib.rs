//! Command-line front end: every computation as a subcommand emitting CSV or JSON.

pub mod args;
pub mod commands;
pub mod config;
pub mod emit;

use std::ffi::OsString;
use std::io::Write;

use clap::{CommandFactory, FromArgMatches};
use thiserror::Error;

use pantograph::{Budget, Exec};

pub use args::Cli;
pub use emit::{emit, render, Cell, Format, Table};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Compute(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Compute(_) | CliError::Io { .. } => 2,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Compute(_) => "computation",
            CliError::Io { .. } => "io",
        }
    }

    /// `error kind=<kind> message="<text>"` on a single line.
    pub fn diagnostic(&self) -> String {
        let text = self
            .to_string()
            .split_whitespace()
            .collect::<Vec<_>>()
            .join(" ")
            .replace('"', "'");
        format!("error kind={} message=\"{text}\"", self.kind())
    }
}

fn command() -> clap::Command {
    let mut c = Cli::command().args_override_self(true);
    let names: Vec<String> = c.get_subcommands().map(|s| s.get_name().to_string()).collect();
    for n in names {
        c = c.mut_subcommand(n, |s| s.args_override_self(true));
    }
    c
}

enum Parsed {
    Run(Cli),
    Printed(String),
}

fn parse(args: &[OsString]) -> Result<Parsed, CliError> {
    match command().try_get_matches_from(args) {
        Ok(m) => Cli::from_arg_matches(&m)
            .map(Parsed::Run)
            .map_err(|e| CliError::Usage(e.to_string())),
        Err(e) => match e.kind() {
            clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                Ok(Parsed::Printed(e.render().to_string()))
            }
            _ => Err(CliError::Usage(e.render().to_string())),
        },
    }
}

fn execute(args: Vec<OsString>, out: &mut dyn Write) -> Result<(), CliError> {
    let cli = match parse(&args)? {
        Parsed::Run(c) => c,
        Parsed::Printed(text) => {
            return out.write_all(text.as_bytes()).map_err(|source| CliError::Io {
                path: "<stdout>".into(),
                source,
            })
        }
    };
    let cli = match &cli.global.config {
        Some(path) => {
            let entries = config::load(path)?;
            match parse(&config::merge(&args, cli.command.name(), &entries))? {
                Parsed::Run(c) => c,
                Parsed::Printed(_) => return Err(CliError::Usage("config requested help".into())),
            }
        }
        None => cli,
    };
    let g = &cli.global;
    if !(g.tol > 0.0 && g.tol.is_finite()) {
        return Err(CliError::Usage(format!("--tol must be positive, got {}", g.tol)));
    }
    let ctx = commands::Ctx {
        tol: g.tol,
        budget: Budget {
            max_terms: g.max_terms,
            max_bits: g.max_bits,
            ..Budget::default()
        },
        exec: if g.threads == Some(1) { Exec::Sequential } else { Exec::Parallel },
    };
    let work = || dispatch(&cli.command, &ctx);
    let table = match g.threads {
        Some(0) => return Err(CliError::Usage("--threads must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Compute(format!("thread pool: {e}")))?
            .install(work)?,
        None => work()?,
    };
    emit(&table, g.format, g.output.as_deref(), out)
}

fn dispatch(cmd: &args::Command, ctx: &commands::Ctx) -> Result<Table, CliError> {
    use args::Command::*;
    match cmd {
        Eval(a) => commands::eval(a, ctx),
        Zeros(a) => commands::zeros(a, ctx),
        Theta(a) => commands::theta(a, ctx),
        Boxcount(a) => commands::boxcount(a, ctx),
        Truncpoly(a) => commands::truncpoly(a, ctx),
        Ode(a) => commands::ode(a, ctx),
        Heat(a) => commands::heat(a, ctx),
        Burgers(a) => commands::burgers(a, ctx),
        Figures(a) => commands::figures(a, ctx),
    }
}

/// Runs the CLI on `argv` (program name first), writing results to `out` and a
/// one-line diagnostic to `err`. Returns 0 on success, 1 on usage errors and 2 on
/// computation or I/O failures.
pub fn run_with<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString>,
{
    match execute(argv.into_iter().map(Into::into).collect(), out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "{}", e.diagnostic());
            e.exit_code()
        }
    }
}

/// [`run_with`] on the process's standard streams.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString>,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}
