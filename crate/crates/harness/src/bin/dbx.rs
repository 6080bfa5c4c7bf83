use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use dbx_core::data::json::{data_to_plain_json, parse_instance};
use dbx_core::pipeline::{compile_sql, schema_sidecar, Compiled, Emit, Options, Stage};
use dbx_harness::bench;
use dbx_harness::difftest::{difftest, Mutation};
use dbx_harness::fuzz::Config;

const EXIT_INTERNAL: u8 = 1;
const EXIT_USER: u8 = 2;
const EXIT_DIFFTEST: u8 = 3;

#[derive(Parser)]
#[command(name = "dbx", version, about = "Compile SQL queries to JavaScript")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compile a script (`create table` statements and one query).
    Compile {
        file: PathBuf,
        /// Stage to print: sqlalg, nrae, nnrc, nnrs, nnrsimp, imp or js.
        #[arg(long, default_value = "js")]
        emit: Emit,
        /// Run the NRAe rewrites.
        #[arg(short = 'O')]
        optimize: bool,
        /// Output file. JavaScript defaults to the script's name with a .js
        /// extension; other stages default to standard output.
        #[arg(short = 'o')]
        output: Option<PathBuf>,
    },
    /// Evaluate a script over an instance and print the result as JSON.
    Run {
        file: PathBuf,
        #[arg(long)]
        db: PathBuf,
        /// Stage whose interpreter evaluates the query.
        #[arg(long, default_value = "imp")]
        stage: Stage,
        #[arg(short = 'O')]
        optimize: bool,
    },
    /// Check random queries at every stage and print a JSON report.
    Difftest {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        cases: u64,
        /// Inject a known compiler bug.
        #[arg(long, value_enum, hide = true)]
        mutate: Option<MutationArg>,
    },
    /// Run the benchmark corpus at every stage.
    Bench,
}

#[derive(Clone, Copy, ValueEnum)]
enum MutationArg {
    BrokenRule,
    FlipCompare,
}

/// A failure with its exit code.
struct Failure(u8, String);

impl From<dbx_core::Error> for Failure {
    fn from(e: dbx_core::Error) -> Failure {
        let code = if e.is_user_error() { EXIT_USER } else { EXIT_INTERNAL };
        Failure(code, e.to_string())
    }
}

fn read(p: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(p).map_err(|e| Failure(EXIT_USER, format!("{}: {}", p.display(), e)))
}

fn write(p: &Path, s: &str) -> Result<(), Failure> {
    std::fs::write(p, s).map_err(|e| Failure(EXIT_USER, format!("{}: {}", p.display(), e)))
}

fn compile(file: &Path, optimize: bool) -> Result<Compiled, Failure> {
    compile_sql(&read(file)?, Options { optimize })
        .map_err(|e| Failure::from(e).prefixed(&file.display().to_string()))
}

impl Failure {
    fn prefixed(self, p: &str) -> Failure {
        Failure(self.0, format!("{}: {}", p, self.1))
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Compile { file, emit, optimize, output } => {
            let c = compile(&file, optimize)?;
            let text = c.emit(emit);
            match (emit, output) {
                (Emit::Js, out) => {
                    let js = out.unwrap_or_else(|| file.with_extension("js"));
                    let stem = js.file_stem().and_then(|s| s.to_str()).unwrap_or("query");
                    let sidecar = js.with_file_name(format!("{}.schema.json", stem));
                    write(&js, &text)?;
                    write(&sidecar, &schema_sidecar(&c.schema))?;
                    println!("wrote {} and {}", js.display(), sidecar.display());
                }
                (_, Some(out)) => write(&out, &text)?,
                (_, None) => print!("{}", text),
            }
        }
        Command::Run { file, db, stage, optimize } => {
            let c = compile(&file, optimize)?;
            let inst = parse_instance(&c.schema, &read(&db)?)
                .map_err(|e| Failure::from(e).prefixed(&db.display().to_string()))?;
            println!("{}", data_to_plain_json(&c.eval(stage, &inst)?));
        }
        Command::Difftest { seed, cases, mutate } => {
            let m = match mutate {
                None => Mutation::None,
                Some(MutationArg::BrokenRule) => Mutation::BrokenRule,
                Some(MutationArg::FlipCompare) => Mutation::FlipCompare,
            };
            let r = difftest(seed, cases, Config::default(), m);
            println!("{}", serde_json::to_string_pretty(&r.to_json()).expect("serializable"));
            if !r.passed() {
                return Err(Failure(EXIT_DIFFTEST, format!("{} of {} cases failed", r.failures.len(), cases)));
            }
        }
        Command::Bench => {
            let results = bench::run_all()?;
            print!("{}", bench::render(&results));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure(code, msg)) => {
            eprintln!("dbx: {}", msg);
            ExitCode::from(code)
        }
    }
}
