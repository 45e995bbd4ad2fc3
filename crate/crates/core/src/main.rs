use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use parafourier::quadric::{enumerate_quadric, expected_count, DEFAULT_BUDGET};
use parafourier::sampling;
use parafourier::verify::{
    casesfor_csv, is_precondition_error, kloosterman_csv, precondition_report, run_suite, AggregateReport, Status,
    Suite, SuiteOptions, SuiteReport,
};
use parafourier::{CharacterContext, Error, Execution, FieldSpec};

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(name = "parafourier", version, about = "Exact Fourier transforms on paraspherical spaces over finite fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one verification suite, or all of them.
    Verify {
        #[arg(long)]
        suite: String,
        #[command(flatten)]
        field: FieldArgs,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Print a CSV table.
    Table {
        #[arg(value_enum)]
        kind: TableKind,
        #[command(flatten)]
        field: FieldArgs,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
        format: TableFormat,
    },
    /// Count points of the quadric X_d(F_q).
    Count {
        #[arg(value_enum)]
        what: CountKind,
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, default_value_t = 3)]
        d: usize,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Run suites over several fields and write one aggregated report.
    Report {
        #[arg(long, conflicts_with = "suites")]
        all: bool,
        #[arg(long, value_delimiter = ',')]
        suites: Vec<String>,
        #[arg(long, value_delimiter = ',', required = true)]
        q: Vec<u32>,
        #[arg(long, value_delimiter = ',')]
        modulus: Option<Vec<u32>>,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct FieldArgs {
    #[arg(long)]
    q: u32,
    /// Little-endian coefficients of a monic irreducible modulus over F_p.
    #[arg(long, value_delimiter = ',')]
    modulus: Option<Vec<u32>>,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    /// Disable the thread pool.
    #[arg(long)]
    sequential: bool,
}

impl RunArgs {
    fn options(&self) -> SuiteOptions {
        SuiteOptions {
            d: self.d,
            n: self.n,
            samples: self.samples,
            seed: self.seed,
            budget: self.budget,
            exec: if self.sequential { Execution::Sequential } else { Execution::Parallel },
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum TableFormat {
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum TableKind {
    Kloosterman,
    Casesfor,
}

#[derive(Clone, Copy, ValueEnum)]
enum CountKind {
    Points,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

fn field_of(q: u32, modulus: Option<&[u32]>) -> Result<FieldSpec, Error> {
    FieldSpec::with_q(q, modulus)
}

fn parse_suites(names: &[String]) -> Result<Vec<Suite>, Error> {
    names.iter().map(|s| s.parse()).collect()
}

fn emit(out: Option<&PathBuf>, text: &str) -> Result<(), Error> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Error::Unsupported(format!("writing {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn text_summary(report: &AggregateReport) -> String {
    let mut s = String::new();
    for r in &report.reports {
        let f = &r.field;
        s += &format!("{} q={}: {}\n", r.suite, f.p.pow(f.m), status_word(r.status));
        for c in &r.checks {
            s += &format!("  [{}] {}: {}\n", status_word(c.status), c.name, c.details);
        }
        for n in &r.notes {
            s += &format!("  note {}: {}\n", n.name, n.details);
        }
    }
    s += &format!("overall: {}\n", status_word(report.status));
    s
}

fn status_word(s: Status) -> &'static str {
    match s {
        Status::Pass => "pass",
        Status::Fail => "fail",
    }
}

/// Runs suites, turning precondition errors into failing reports. Returns whether any occurred.
fn run_many(suites: &[Suite], fields: &[FieldSpec], opts: &SuiteOptions) -> Result<(Vec<SuiteReport>, bool), Error> {
    let mut reports = Vec::new();
    let mut precondition = false;
    for field in fields {
        for &suite in suites {
            match run_suite(suite, field, opts) {
                Ok(r) => reports.push(r),
                Err(e) if is_precondition_error(&e) => {
                    precondition = true;
                    reports.push(precondition_report(suite, field, opts, &e));
                }
                Err(e) => return Err(e),
            }
        }
    }
    Ok((reports, precondition))
}

fn run(cli: Cli) -> Result<u8, Error> {
    match cli.command {
        Command::Verify {
            suite,
            field,
            run,
            out,
            format,
        } => {
            let fq = field_of(field.q, field.modulus.as_deref())?;
            let opts = run.options();
            let (reports, precondition) = if suite == "all" {
                run_many(&Suite::ALL, &[fq], &opts)?
            } else {
                (vec![run_suite(suite.parse()?, &fq, &opts)?], false)
            };
            let report = AggregateReport::new(reports);
            match (format, &out) {
                (Format::Json, _) => emit(out.as_ref(), &report.to_json())?,
                (Format::Text, Some(path)) => {
                    emit(Some(path), &report.to_json())?;
                    print!("{}", text_summary(&report));
                }
                (Format::Text, None) => print!("{}", text_summary(&report)),
            }
            if precondition {
                eprintln!("error: some suites could not run within the given parameters");
                return Ok(EXIT_USAGE);
            }
            Ok(if report.status == Status::Pass { 0 } else { EXIT_FAIL })
        }
        Command::Table {
            kind,
            field,
            run,
            out,
            format: TableFormat::Csv,
        } => {
            let fq = field_of(field.q, field.modulus.as_deref())?;
            let ctx = CharacterContext::new(&fq);
            let csv = match kind {
                TableKind::Kloosterman => kloosterman_csv(&ctx),
                TableKind::Casesfor => {
                    let opts = run.options();
                    let set = enumerate_quadric(run.d.unwrap_or(2), &ctx, run.budget)?;
                    let mut rng = sampling::rng(run.seed);
                    casesfor_csv(&set, run.samples.unwrap_or(200), &mut rng, opts.exec)
                }
            };
            emit(out.as_ref(), &csv)?;
            Ok(0)
        }
        Command::Count {
            what: CountKind::Points,
            field,
            d,
            budget,
        } => {
            let fq = field_of(field.q, field.modulus.as_deref())?;
            let ctx = CharacterContext::new(&fq);
            let set = enumerate_quadric(d, &ctx, budget)?;
            let formula = expected_count(d as u32, fq.q());
            println!("{}", set.len());
            println!("formula q^(2d-1) + q^d - q^(d-1) = {formula}");
            Ok(if set.len() as u64 == formula { 0 } else { EXIT_FAIL })
        }
        Command::Report {
            all,
            suites,
            q,
            modulus,
            run,
            out,
        } => {
            let suites = if all { Suite::ALL.to_vec() } else { parse_suites(&suites)? };
            if suites.is_empty() {
                eprintln!("error: no suites selected; pass --all or --suites");
                return Ok(EXIT_USAGE);
            }
            let fields = q
                .iter()
                .map(|&q| field_of(q, modulus.as_deref()))
                .collect::<Result<Vec<_>, _>>()?;
            let (reports, _) = run_many(&suites, &fields, &run.options())?;
            let report = AggregateReport::new(reports);
            emit(out.as_ref(), &report.to_json())?;
            if out.is_some() {
                print!("{}", text_summary(&report));
            }
            Ok(if report.status == Status::Pass { 0 } else { EXIT_FAIL })
        }
    }
}
