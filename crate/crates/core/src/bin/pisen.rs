use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use pisen::document::{example, DocumentError, InputDocument, MatrixJson, ModuleJson, Source, EXAMPLE_NAMES};
use pisen::padic::PadicContext;
use pisen::phin::validate;
use pisen::pi_sen::{BuildOptions, PiSenModule, DEFAULT_SLACK};
use pisen::verify::{full_report, Status, VerificationReport, VerifyOptions};

const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_INPUT: u8 = 2;

#[derive(Parser)]
#[command(name = "pisen", version, about = "Build and verify the differential module D_{pi-Sen} of (phi, N)-data")]
struct Cli {
    /// Prime p (overrides the document).
    #[arg(long, global = true)]
    prime: Option<u64>,
    /// Absolute precision M in p-adic digits (overrides the document).
    #[arg(long, global = true)]
    precision: Option<i64>,
    /// Digits below M tolerated by equality checks.
    #[arg(long, global = true, default_value_t = DEFAULT_SLACK)]
    slack: i64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Check (phi, N)-data for nilpotency, the phi relation, chain form and twist rules.
    Validate { file: Option<PathBuf> },
    /// Build the module and print its operators, weights and bigrading.
    Build { file: Option<PathBuf> },
    /// Build the module and run every structural check.
    Verify { file: Option<PathBuf> },
    /// Print a built-in input document.
    Example {
        /// tate-curve, tate-curve-cocycle, crystalline:<d>, jordan:<d> or gapped
        name: String,
    },
}

enum Failure {
    Input(String),
    Check(String),
}

impl From<DocumentError> for Failure {
    fn from(e: DocumentError) -> Self {
        Failure::Input(e.to_string())
    }
}

fn read_document(file: Option<&PathBuf>) -> Result<InputDocument, Failure> {
    let text = match file {
        Some(path) if path.as_os_str() != "-" => std::fs::read_to_string(path)
            .map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))?,
        _ => {
            let mut buf = String::new();
            std::io::stdin()
                .read_to_string(&mut buf)
                .map_err(|e| Failure::Input(format!("cannot read standard input: {e}")))?;
            buf
        }
    };
    Ok(InputDocument::from_json(&text)?)
}

struct Loaded {
    doc: InputDocument,
    ctx: PadicContext,
    source: Source,
}

fn load(cli: &Cli, file: Option<&PathBuf>) -> Result<Loaded, Failure> {
    let doc = read_document(file)?;
    let ctx = doc.context(cli.prime, cli.precision)?;
    let source = doc.source(ctx)?;
    Ok(Loaded { doc, ctx, source })
}

fn build_options(cli: &Cli) -> BuildOptions {
    BuildOptions { slack: cli.slack, ..BuildOptions::default() }
}

/// Rejects (phi, N)-data that fails validation before building.
fn require_valid(loaded: &Loaded) -> Result<(), Failure> {
    if let Source::Phin(data) = &loaded.source {
        let report = validate(data, loaded.ctx.p());
        if !report.is_valid() {
            let lines: Vec<String> = report.issues.iter().map(|i| format!("{}: {i}", i.check_id())).collect();
            return Err(Failure::Check(format!("input fails validation\n{}", lines.join("\n"))));
        }
    }
    Ok(())
}

fn cmd_validate(cli: &Cli, file: Option<&PathBuf>) -> Result<bool, Failure> {
    let loaded = load(cli, file)?;
    let Source::Phin(data) = &loaded.source else {
        println!("no (phi, N)-data in this document; nothing to validate");
        return Ok(true);
    };
    let report = validate(data, loaded.ctx.p());
    match cli.format {
        Format::Json => println!("{}", serde_json::json!({ "valid": report.is_valid(), "issues": report.issues })),
        Format::Text if report.is_valid() => println!("valid (twists {:?})", data.twists()),
        Format::Text => {
            println!("invalid");
            for issue in &report.issues {
                println!("  {}: {issue}", issue.check_id());
            }
        }
    }
    Ok(report.is_valid())
}

fn format_matrix(name: &str, m: &MatrixJson) -> String {
    let width = m.entries.iter().flatten().map(String::len).max().unwrap_or(1);
    let mut out = format!("{name}:\n");
    for (row, precs) in m.entries.iter().zip(&m.precision) {
        let cells: Vec<String> = row.iter().map(|c| format!("{c:>width$}")).collect();
        let precs: Vec<String> = precs.iter().map(|p| p.map_or("exact".into(), |n| n.to_string())).collect();
        out.push_str(&format!("  [ {} ]   precision [ {} ]\n", cells.join("  "), precs.join(" ")));
    }
    out
}

fn print_module(module: &PiSenModule, total_degree: Option<i64>, format: Format) {
    let json = ModuleJson::new(module, total_degree);
    if format == Format::Json {
        println!("{}", serde_json::to_string_pretty(&json).expect("serializes"));
        return;
    }
    println!("route {}, p = {}, M = {}, dimension {}", json.route, json.prime, json.precision, json.dim);
    let groups: Vec<String> = json.labels.iter().map(|g| format!("({})", g.join(" "))).collect();
    println!("basis {}", groups.join(" "));
    print!("{}", format_matrix("nabla0", &json.nabla0));
    print!("{}", format_matrix("nabla_pi", &json.nabla_pi));
    match (&json.weights, &json.spectrum_error) {
        (Some(w), _) => println!("weights {w:?}"),
        (None, Some(e)) => println!("weights unavailable: {e}"),
        _ => {}
    }
    if let Some(b) = &json.bigrading {
        let cells: Vec<String> = b.table.iter().map(|(s, t, d)| format!("h^({s},{t}) = {d}")).collect();
        println!("bigrading m = {}, weight shift {}: {}", b.total_degree, b.weight_shift, cells.join(", "));
        println!("monodromy gap h_m = {}", b.monodromy_gap);
    }
}

fn cmd_build(cli: &Cli, file: Option<&PathBuf>) -> Result<bool, Failure> {
    let loaded = load(cli, file)?;
    require_valid(&loaded)?;
    let module = loaded
        .source
        .build(loaded.ctx, build_options(cli), true)
        .map_err(|e| Failure::Check(e.to_string()))?;
    print_module(&module, loaded.doc.total_degree, cli.format);
    Ok(true)
}

fn print_report(report: &VerificationReport, format: Format) {
    if format == Format::Json {
        println!("{}", serde_json::to_string_pretty(report).expect("serializes"));
        return;
    }
    println!(
        "p = {}, M = {}, slack {}, route {}, input {}",
        report.p,
        report.precision,
        report.slack,
        report.route,
        report.input_digest.as_deref().unwrap_or("-")
    );
    for c in &report.checks {
        let status = match c.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skipped => "SKIP",
        };
        let prec = c.precision.map_or(String::new(), |p| format!(" [{p} digits]"));
        println!("{status} {:<20} {}{prec}", c.id, c.statement);
        if !c.detail.is_empty() {
            println!("     {}", c.detail);
        }
        if let Some(w) = &c.witness {
            println!("     witness {}", serde_json::to_string(w).expect("serializes"));
        }
    }
    let failed = report.failed_ids();
    if failed.is_empty() {
        println!("all checks passed");
    } else {
        println!("failed: {}", failed.join(", "));
    }
}

fn cmd_verify(cli: &Cli, file: Option<&PathBuf>) -> Result<bool, Failure> {
    let loaded = load(cli, file)?;
    require_valid(&loaded)?;
    let module = loaded
        .source
        .build(loaded.ctx, build_options(cli), false)
        .map_err(|e| Failure::Check(e.to_string()))?;
    let opts = VerifyOptions { slack: cli.slack, total_degree: loaded.doc.total_degree };
    let report = full_report(&module, opts).with_digest(loaded.doc.digest());
    print_report(&report, cli.format);
    Ok(report.all_passed())
}

fn cmd_example(cli: &Cli, name: &str) -> Result<bool, Failure> {
    let ctx = PadicContext::new(cli.prime.unwrap_or(5), cli.precision.unwrap_or(24))
        .map_err(|e| Failure::Input(e.to_string()))?;
    let doc = example(name, ctx).ok_or_else(|| {
        Failure::Input(format!("unknown example {name:?}; available: {}", EXAMPLE_NAMES.join(", ")))
    })?;
    println!("{}", doc.to_json());
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Validate { file } => cmd_validate(&cli, file.as_ref()),
        Command::Build { file } => cmd_build(&cli, file.as_ref()),
        Command::Verify { file } => cmd_verify(&cli, file.as_ref()),
        Command::Example { name } => cmd_example(&cli, name),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_CHECK_FAILED),
        Err(Failure::Check(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_CHECK_FAILED)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}
