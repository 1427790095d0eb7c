//! `civitas`: judge smart-city scenarios against rights-based rules.

mod commands;
mod exit;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use civitas::{ReportFormat, WorldMode};

use crate::commands::{CheckArgs, Failure};
use crate::exit::Status;

#[derive(Parser)]
#[command(name = "civitas", version, about = "Rights-based compliance checks for smart-city models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum World {
    Open,
    Closed,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Judge a scenario against the builtin principles or a rules file.
    Check {
        scenario: PathBuf,
        #[arg(long)]
        rules: Option<PathBuf>,
        #[arg(long)]
        facts: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "open")]
        world: World,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Search a bounded scope for a model that violates one rule.
    Find {
        /// A builtin id (P1..P13, SafetyPrinciple) or a .rules file with one rule.
        #[arg(long)]
        rule: String,
        /// For example devices=1,residents=1,neighborhoods=3,flows=2
        #[arg(long)]
        scope: Option<String>,
    },
    /// List the builtin principles or print one as source.
    Rules {
        #[command(subcommand)]
        action: RulesAction,
    },
    /// Rewrite a .city or .rules file in canonical form.
    Fmt {
        path: PathBuf,
        /// Exit 2 instead of rewriting when the file is not canonical.
        #[arg(long)]
        check: bool,
    },
}

#[derive(Subcommand)]
enum RulesAction {
    List,
    Show { id: String },
}

fn run(cli: Cli) -> Result<Status, Failure> {
    match cli.command {
        Command::Check { scenario, rules, facts, world, format, out } => commands::check(CheckArgs {
            scenario: &scenario,
            rules: rules.as_deref(),
            facts: facts.as_deref(),
            world: match world {
                World::Open => WorldMode::Open,
                World::Closed => WorldMode::Closed,
            },
            format: match format {
                Format::Text => ReportFormat::Text,
                Format::Json => ReportFormat::Json,
            },
            out: out.as_deref(),
        }),
        Command::Find { rule, scope } => commands::find(&rule, scope.as_deref()),
        Command::Rules { action: RulesAction::List } => commands::rules_list(),
        Command::Rules { action: RulesAction::Show { id } } => commands::rules_show(&id),
        Command::Fmt { path, check } => commands::fmt(&path, check),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(Status::Error.code()) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(status) => ExitCode::from(status.code()),
        Err(Failure(message)) => {
            eprint!("{message}");
            if !message.ends_with('\n') {
                eprintln!();
            }
            ExitCode::from(Status::Error.code())
        }
    }
}
