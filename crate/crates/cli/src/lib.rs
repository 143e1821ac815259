//! The `tasp` command line: argument handling, stage subcommands and
//! model printing.

mod config;
mod printer;

use std::ffi::OsString;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use log::{info, warn};
use tasp_core::grammar::load_grammar;
use tasp_core::{oracle, parse_program, parse_term, pipeline, Config, Logic, Program, Term, TheoryGrammar};

pub use config::{parse_config, FileConfig};
pub use printer::{print_footer, print_model, PrinterKind};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_SAT: i32 = 10;
pub const EXIT_UNSAT: i32 = 20;
pub const EXIT_INPUT: i32 = 65;

#[derive(Debug, Parser)]
#[command(name = "tasp", version, about = "Temporal answer set solving via reification")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve a temporal program and print its models.
    Solve(Options),
    /// Print the program after the theory-preserving rewrite.
    Transform(Options),
    /// Print the reified facts of the grounded program.
    Reify(Options),
    /// Enumerate models with the brute-force reference semantics.
    Oracle(Options),
}

#[derive(Debug, Args, Clone, Default)]
pub struct Options {
    /// Input files; standard input when none are given or for `-`.
    pub files: Vec<PathBuf>,
    /// Constant definition `name=value`, e.g. `-c n=2` for the horizon.
    #[arg(short = 'c', long = "const", value_name = "NAME=VALUE")]
    pub constants: Vec<String>,
    /// Temporal logic: tel, mel or del.
    #[arg(long, visible_alias = "semantics-encoding")]
    pub semantics: Option<String>,
    /// Grammar file or built-in grammar name; replaces the built-in grammar.
    #[arg(long = "grammar", visible_alias = "syntax-encoding", value_name = "FILE")]
    pub grammars: Vec<String>,
    #[arg(long, value_enum)]
    pub printer: Option<PrinterKind>,
    /// Number of models to compute, 0 for all.
    #[arg(long)]
    pub models: Option<usize>,
    /// Largest time point for metric models.
    #[arg(long = "max-time")]
    pub max_time: Option<i64>,
    /// File with `key = value` defaults for the flags above.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// error, warn, info or debug.
    #[arg(long = "log-level")]
    pub log_level: Option<String>,
}

/// Failures split by the exit status they map to.
#[derive(Debug)]
enum Failure {
    Usage(anyhow::Error),
    Input(anyhow::Error),
}

fn usage(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Usage(e.into())
}

fn input(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Input(e.into())
}

/// Fully resolved settings for one run.
#[derive(Debug)]
struct Settings {
    config: Config,
    printer: PrinterKind,
    log_level: log::LevelFilter,
}

fn parse_logic(name: &str) -> Result<Logic, Failure> {
    name.parse::<Logic>().map_err(|_| {
        if Path::new(name).exists() {
            usage(anyhow!("semantics files are not supported; choose tel, mel or del"))
        } else {
            usage(anyhow!("unknown semantics `{name}`; choose tel, mel or del"))
        }
    })
}

fn parse_constant(def: &str) -> Result<(String, Term), Failure> {
    let (name, value) = def.split_once('=').ok_or_else(|| usage(anyhow!("expected NAME=VALUE, got `{def}`")))?;
    let value = parse_term(value.trim()).map_err(|e| usage(anyhow!("constant `{def}`: {e}")))?;
    Ok((name.trim().to_string(), value))
}

fn load_grammar_arg(arg: &str, base: &Path) -> Result<TheoryGrammar, Failure> {
    if let Ok(logic) = arg.parse::<Logic>() {
        return Ok(logic.grammar());
    }
    let path = base.join(arg);
    let text = std::fs::read_to_string(&path).with_context(|| format!("reading grammar {}", path.display())).map_err(input)?;
    load_grammar(&text).with_context(|| format!("in grammar {}", path.display())).map_err(input)
}

fn resolve(opts: &Options) -> Result<Settings, Failure> {
    let (file, base) = match &opts.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display())).map_err(usage)?;
            let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
            (parse_config(&text).with_context(|| format!("in config {}", path.display())).map_err(usage)?, base)
        }
        None => (FileConfig::default(), PathBuf::new()),
    };

    let logic = match opts.semantics.as_ref().or(file.semantics.as_ref()) {
        Some(name) => parse_logic(name)?,
        None => Logic::Tel,
    };
    let mut config = Config::new(logic);
    for def in file.constants.iter().chain(&opts.constants) {
        config.constants.push(parse_constant(def)?);
    }
    for g in &file.grammars {
        config.grammars.push(load_grammar_arg(g, &base)?);
    }
    for g in &opts.grammars {
        config.grammars.push(load_grammar_arg(g, Path::new(""))?);
    }
    config.models = opts.models.or(file.models).unwrap_or(0);
    config.max_time = opts.max_time.or(file.max_time);

    let printer = match (opts.printer, &file.printer) {
        (Some(p), _) => p,
        (None, Some(name)) => {
            <PrinterKind as clap::ValueEnum>::from_str(name, true).map_err(|e| usage(anyhow!("printer: {e}")))?
        }
        (None, None) => PrinterKind::Default,
    };
    let log_level = match opts.log_level.as_ref().or(file.log_level.as_ref()) {
        Some(level) => level.parse().map_err(|_| usage(anyhow!("unknown log level `{level}`")))?,
        None => log::LevelFilter::Warn,
    };
    Ok(Settings { config, printer, log_level })
}

fn read_input(files: &[PathBuf], stdin: &mut dyn Read) -> Result<Program, Failure> {
    let mut text = String::new();
    if files.is_empty() {
        stdin.read_to_string(&mut text).context("reading standard input").map_err(input)?;
    }
    for f in files {
        if f.as_os_str() == "-" {
            stdin.read_to_string(&mut text).context("reading standard input").map_err(input)?;
        } else {
            text.push_str(&std::fs::read_to_string(f).with_context(|| format!("reading {}", f.display())).map_err(input)?);
        }
        text.push('\n');
    }
    parse_program(&text).map_err(input)
}

fn init_logging(level: log::LevelFilter) {
    let _ = env_logger::Builder::new().filter_level(level).format_timestamp(None).try_init();
    log::set_max_level(level);
}

fn solve(program: &Program, s: &Settings, out: &mut dyn Write) -> Result<i32, Failure> {
    let start = Instant::now();
    let grammar = pipeline::grammar_for(program, &s.config).map_err(input)?;
    for d in grammar.check_occurrence(program) {
        warn!("{d}");
    }
    let mut count = 0;
    let mut io_error = None;
    pipeline::solve(program, &s.config, |_, shown| {
        count += 1;
        match print_model(out, s.printer, count, shown) {
            Ok(()) => true,
            Err(e) => {
                io_error = Some(e);
                false
            }
        }
    })
    .map_err(input)?;
    if let Some(e) = io_error {
        return Err(input(e));
    }
    let limited = s.config.models > 0 && count == s.config.models;
    print_footer(out, count, limited, start.elapsed().as_secs_f64()).map_err(input)?;
    info!("{count} models in {:?}", start.elapsed());
    Ok(if count > 0 { EXIT_SAT } else { EXIT_UNSAT })
}

fn run_oracle(program: &Program, s: &Settings, out: &mut dyn Write) -> Result<i32, Failure> {
    let start = Instant::now();
    let n = pipeline::horizon(program, &s.config).map_err(input)?;
    let metric = s.config.logic == Logic::Mel;
    let max_time = metric.then(|| s.config.max_time.unwrap_or_else(|| tasp_core::meta::default_max_time(n)));
    let models = oracle::temporal_models(program, &s.config.constants, n, max_time).map_err(input)?;
    let shown = if s.config.models == 0 { models.len() } else { models.len().min(s.config.models) };
    for (i, m) in models.iter().take(shown).enumerate() {
        print_model(out, s.printer, i + 1, m).map_err(input)?;
    }
    print_footer(out, models.len(), false, start.elapsed().as_secs_f64()).map_err(input)?;
    Ok(if models.is_empty() { EXIT_UNSAT } else { EXIT_SAT })
}

fn execute(cli: Cli, stdin: &mut dyn Read, out: &mut dyn Write) -> Result<i32, Failure> {
    let opts = match &cli.command {
        Command::Solve(o) | Command::Transform(o) | Command::Reify(o) | Command::Oracle(o) => o,
    };
    let settings = resolve(opts)?;
    init_logging(settings.log_level);
    let program = read_input(&opts.files, stdin)?;
    match cli.command {
        Command::Solve(_) => solve(&program, &settings, out),
        Command::Oracle(_) => run_oracle(&program, &settings, out),
        Command::Transform(_) => {
            let t = pipeline::transformed(&program, &settings.config).map_err(input)?;
            write!(out, "{t}").map_err(input)?;
            Ok(EXIT_OK)
        }
        Command::Reify(_) => {
            let db = pipeline::reified(&program, &settings.config).map_err(input)?;
            write!(out, "{}", db.to_text()).map_err(input)?;
            Ok(EXIT_OK)
        }
    }
}

/// Runs the command line `args` (including the program name) and returns
/// the exit status. Models and results go to `out`, diagnostics to `err`.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(cli, stdin, out) {
        Ok(code) => code,
        Err(Failure::Usage(e)) => {
            let _ = writeln!(err, "error: {e:#}");
            EXIT_USAGE
        }
        Err(Failure::Input(e)) => {
            let _ = writeln!(err, "error: {e:#}");
            EXIT_INPUT
        }
    }
}
