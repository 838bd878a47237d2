use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use crabs_cli::{
    run_analyze, run_eval, run_export, CliError, Command, ExportFormat, RunConfig, View, EXIT_OK, EXIT_USAGE,
};
use crabs_core::resolver::{OnUnparseable, ResolverConfig, ResolverKind};
use crabs_core::EstimateMode;

#[derive(Parser)]
#[command(
    name = "crabs",
    version,
    about = "Information flow and cell dependency analysis for notebooks"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Lower,
    Upper,
    Resolved,
}

#[derive(Clone, Copy, ValueEnum)]
enum ResolverArg {
    LlmHttp,
    Heuristic,
    Replay,
    TruthOracle,
    AssumeYes,
    AssumeNo,
}

#[derive(Clone, Copy, ValueEnum)]
enum PolicyArg {
    Fail,
    AssumeYes,
    AssumeNo,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Dot,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum ViewArg {
    Flows,
    Deps,
}

#[derive(Subcommand)]
enum Cmd {
    /// Analyze notebooks and write one graph JSON per notebook.
    Analyze {
        #[arg(required = true)]
        notebooks: Vec<PathBuf>,
        #[arg(long, value_enum, default_value = "resolved")]
        mode: ModeArg,
        #[arg(long, value_enum, default_value = "heuristic")]
        resolver: ResolverArg,
        /// Chat-completions endpoint for llm-http.
        #[arg(long)]
        endpoint: Option<String>,
        #[arg(long)]
        model: Option<String>,
        #[arg(long, default_value_t = 0.0)]
        temperature: f64,
        /// JSONL response cache; required by replay.
        #[arg(long)]
        cache: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "fail")]
        on_unparseable: PolicyArg,
        /// Treat imported names as data variables.
        #[arg(long)]
        track_imports: bool,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Notebooks analyzed at once; also bounds resolver calls in flight.
        #[arg(long, default_value_t = 4)]
        jobs: usize,
        /// Annotation directory for the truth-oracle resolver.
        #[arg(long)]
        truth: Option<PathBuf>,
    },
    /// Score graph documents against annotations.
    Eval {
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        truth: PathBuf,
        #[arg(long, default_value = "metrics.json")]
        out: PathBuf,
    },
    /// Render a graph document.
    Export {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, value_enum, default_value = "dot")]
        format: FormatArg,
        #[arg(long, value_enum, default_value = "flows")]
        view: ViewArg,
    },
}

fn resolver_kind(r: ResolverArg) -> ResolverKind {
    match r {
        ResolverArg::LlmHttp => ResolverKind::LlmHttp,
        ResolverArg::Heuristic => ResolverKind::Heuristic,
        ResolverArg::Replay => ResolverKind::Replay,
        ResolverArg::TruthOracle => ResolverKind::TruthOracle,
        ResolverArg::AssumeYes => ResolverKind::AssumeYes,
        ResolverArg::AssumeNo => ResolverKind::AssumeNo,
    }
}

fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Cmd::Analyze {
            notebooks,
            mode,
            resolver,
            endpoint,
            model,
            temperature,
            cache,
            on_unparseable,
            track_imports,
            out,
            jobs,
            truth,
        } => {
            let config = RunConfig {
                command: Command::Analyze,
                notebook_paths: notebooks,
                resolver: ResolverConfig {
                    resolver: resolver_kind(resolver),
                    endpoint_url: endpoint,
                    model_name: model,
                    temperature,
                    on_unparseable: match on_unparseable {
                        PolicyArg::Fail => OnUnparseable::Fail,
                        PolicyArg::AssumeYes => OnUnparseable::AssumeYes,
                        PolicyArg::AssumeNo => OnUnparseable::AssumeNo,
                    },
                    cache_path: cache,
                    concurrency: jobs,
                    ..ResolverConfig::default()
                },
                output_dir: out,
                estimate_mode: match mode {
                    ModeArg::Lower => EstimateMode::Lower,
                    ModeArg::Upper => EstimateMode::Upper,
                    ModeArg::Resolved => EstimateMode::Resolved,
                },
                track_imports,
                jobs,
                truth_dir: truth,
                ..RunConfig::default()
            };
            let summary = run_analyze(&config)?;
            for p in &summary.written {
                println!("{}", p.display());
            }
            for f in &summary.failures {
                eprintln!("error: {f}");
            }
            Ok(summary.exit_code())
        }
        Cmd::Eval { pred, truth, out } => {
            let report = run_eval(&pred, &truth, &out)?;
            print!("{}", report.table());
            for (id, why) in &report.missing {
                eprintln!("error: {id}: {why}");
            }
            Ok(if report.incomplete {
                crabs_cli::EXIT_ANALYSIS
            } else {
                EXIT_OK
            })
        }
        Cmd::Export { graph, format, view } => {
            let format = match format {
                FormatArg::Dot => ExportFormat::Dot,
                FormatArg::Json => ExportFormat::Json,
            };
            let view = match view {
                ViewArg::Flows => View::Flows,
                ViewArg::Deps => View::Deps,
            };
            print!("{}", run_export(&graph, format, view)?);
            Ok(EXIT_OK)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() {
                EXIT_USAGE as u8
            } else {
                EXIT_OK as u8
            });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
