//! `promptdelay`: solve, cross-check, generate and play delay games with
//! LTL and Prompt-LTL winning conditions.

mod commands;
mod condition;
mod play;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Exit status when Player O wins.
pub const EXIT_O: u8 = 0;
/// Exit status when Player I wins.
pub const EXIT_I: u8 = 10;
/// Exit status for parse, capacity and other errors.
pub const EXIT_ERROR: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "promptdelay", version, about = "Delay games with LTL and Prompt-LTL winning conditions")]
struct Cli {
    /// More log output on standard error (repeatable)
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decide the winner and extract a verified strategy for Player O
    Solve {
        #[command(flatten)]
        condition: ConditionArgs,
        #[command(flatten)]
        budget: BudgetArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Solve the game with a fixed lookahead by explicit search
    Oracle {
        #[command(flatten)]
        condition: ConditionArgs,
        #[command(flatten)]
        budget: BudgetArgs,
        /// Letters of lookahead granted to Player O
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
        f0: u64,
        /// Bound for the prompt-eventually operator
        #[arg(long, default_value_t = 0)]
        k: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Play interactively against the machine
    Play {
        #[command(flatten)]
        condition: ConditionArgs,
        #[command(flatten)]
        budget: BudgetArgs,
        /// The side played by the human; defaults to the losing side
        #[arg(long, value_enum)]
        side: Option<Side>,
        /// Lookahead used when the machine plays Player I
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
        f0: u64,
        /// Prompt bound used when the machine plays Player I
        #[arg(long, default_value_t = 0)]
        k: usize,
        /// Replay the human moves stored in this file instead of reading
        /// standard input
        #[arg(long)]
        transcript: Option<PathBuf>,
        /// Append the human moves of this session to a file
        #[arg(long)]
        record: Option<PathBuf>,
    },
    /// Generate a lower-bound formula
    Gen {
        #[arg(long, value_enum)]
        family: Family,
        /// Number of address bits
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Relativize a Prompt-LTL formula with the alternating-color technique
    Relativize {
        #[command(flatten)]
        condition: ConditionArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Translate a formula to an automaton file
    Translate {
        #[command(flatten)]
        condition: ConditionArgs,
        #[command(flatten)]
        budget: BudgetArgs,
        /// Unroll prompt operators with this bound instead of relativizing
        #[arg(long)]
        k: Option<usize>,
        /// Stop after the Büchi automaton
        #[arg(long)]
        nba: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Evaluate a formula on a lasso word
    Check {
        #[command(flatten)]
        condition: ConditionArgs,
        /// Word in the syntax `{a,b} {} ({c} {a})`
        #[arg(long)]
        lasso: String,
        /// Bound for the prompt-eventually operator
        #[arg(long, default_value_t = 0)]
        k: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Print sizes and properties of a formula or automaton
    Inspect {
        #[command(flatten)]
        condition: ConditionArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Debug, Clone, Args)]
pub struct ConditionArgs {
    /// Formula text, or `@path` to read it from a file
    #[arg(long, conflicts_with = "dpa")]
    pub formula: Option<String>,
    /// Automaton file (JSON); its first propositions must be the inputs
    #[arg(long)]
    pub dpa: Option<PathBuf>,
    /// Comma-separated input propositions (Player I)
    #[arg(long, value_delimiter = ',')]
    pub inputs: Vec<String>,
    /// Comma-separated output propositions (Player O)
    #[arg(long, value_delimiter = ',')]
    pub outputs: Vec<String>,
}

#[derive(Debug, Clone, Copy, Args)]
pub struct BudgetArgs {
    /// Cap on the states of every intermediate construction
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub budget_states: Option<u64>,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Write the result document here instead of standard output
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Side {
    I,
    O,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    /// lookahead family
    Thm2,
    /// lookahead family with a prompt conjunct
    Thm3,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        2 => log::LevelFilter::Debug,
        _ => log::LevelFilter::Trace,
    };
    env_logger::Builder::new().filter_level(level).format_timestamp(None).init();

    let result = match cli.command {
        Command::Solve { condition, budget, output } => commands::solve(&condition, budget, &output),
        Command::Oracle {
            condition,
            budget,
            f0,
            k,
            output,
        } => commands::oracle(&condition, budget, f0 as usize, k, &output),
        Command::Play {
            condition,
            budget,
            side,
            f0,
            k,
            transcript,
            record,
        } => play::run(&play::PlayConfig {
            condition,
            budget,
            side,
            f0: f0 as usize,
            k,
            transcript,
            record,
        }),
        Command::Gen { family, n, output } => commands::gen(family, n as usize, &output),
        Command::Relativize { condition, output } => commands::relativize(&condition, &output),
        Command::Translate {
            condition,
            budget,
            k,
            nba,
            output,
        } => commands::translate(&condition, budget, k, nba, &output),
        Command::Check { condition, lasso, k, output } => commands::check(&condition, &lasso, k, &output),
        Command::Inspect { condition, output } => commands::inspect(&condition, &output),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
