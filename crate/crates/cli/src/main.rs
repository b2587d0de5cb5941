use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use fragile_core::fragility::ClassId;
use fragile_core::harness::{HarnessError, Report, Session, Status, TASKS};

#[derive(Parser)]
#[command(name = "fragile", version, about = "Enumerate and verify fragile matroid classes")]
struct Cli {
    /// Catalog and witness cache.
    #[arg(long, global = true, env = "FRAGILE_CACHE_DIR", default_value = "./fragile-cache")]
    cache_dir: PathBuf,
    /// Worker threads for enumeration (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Seed for randomized property tests; results never depend on it.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate the 3-connected members of a class up to a size.
    Catalog {
        #[arg(long, value_parser = parse_class)]
        class: ClassId,
        #[arg(long)]
        max_size: usize,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Run one verification task, or all of them.
    Verify {
        #[arg(long, required_unless_present = "all", conflicts_with = "all")]
        task: Option<String>,
        #[arg(long)]
        all: bool,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Print a named matroid or a wheel gluing in the matroid file format.
    Construct {
        #[arg(long, required_unless_present = "glue", conflicts_with = "glue")]
        name: Option<String>,
        /// BASE:(x,y,z):r[:(x,y,z):r...]
        #[arg(long)]
        glue: Option<String>,
        #[arg(long, value_delimiter = ',')]
        delete: Vec<String>,
    },
}

fn parse_class(s: &str) -> Result<ClassId, String> {
    s.parse().map_err(|_| format!("unknown class {s:?}; expected fano or h5"))
}

fn emit(r: &Report, format: Format) {
    match format {
        Format::Text => println!("{}", r.text()),
        Format::Json => println!("{}", serde_json::to_string(r).expect("report serializes")),
    }
}

fn fail(e: HarnessError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(if e.is_ambiguity() { 3 } else { 2 })
}

fn status_code(reports: &[Report]) -> ExitCode {
    if reports.iter().any(|r| r.status == Status::Ambiguous) {
        ExitCode::from(3)
    } else if reports.iter().any(|r| r.status == Status::Fail) {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let _ = cli.seed;
    let mut session = Session::new(cli.cache_dir);
    match cli.command {
        Command::Catalog { class, max_size, format } => match session.cmd_catalog(class, max_size) {
            Ok(r) => {
                emit(&r, format);
                ExitCode::SUCCESS
            }
            Err(e) => fail(e),
        },
        Command::Verify { task, all, format } => {
            let tasks: Vec<String> =
                if all { TASKS.iter().map(|s| s.to_string()).collect() } else { task.into_iter().collect() };
            let mut reports = Vec::new();
            for t in &tasks {
                match session.cmd_verify(t) {
                    Ok(r) => {
                        emit(&r, format);
                        reports.push(r);
                    }
                    Err(e) => return fail(e),
                }
            }
            status_code(&reports)
        }
        Command::Construct { name, glue, delete } => {
            match session.cmd_construct(name.as_deref(), glue.as_deref(), &delete) {
                Ok(text) => {
                    print!("{text}");
                    ExitCode::SUCCESS
                }
                Err(e) => fail(e),
            }
        }
    }
}
