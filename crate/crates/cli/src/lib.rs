//! `csre4soc` command implementations.
//!
//! Exit codes: 0 success, 1 parse or validation failure, 2 I/O or
//! environment failure.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::{Arc, RwLock};

use chrono::Utc;
use clap::{Parser, Subcommand, ValueEnum};
use csre4soc_api::{AppState, SharedStore};
use csre4soc_core::{
    assess, parse_catalog, parse_submission, recommend, validate_submission, ActionCatalog,
    AssessmentRecord, AssessmentResult, AssessmentStore, EvolutionSeries, FileStore,
    Recommendation, RecordId,
};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(name = "csre4soc", version, about = "Software sustainability scorecard for CSR documents")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Score an answers file against a catalog.
    Assess {
        /// Action catalog document.
        #[arg(long)]
        catalog: PathBuf,
        /// Submission document (same format as the HTTP request body).
        #[arg(long)]
        answers: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: OutputFormat,
        /// Also append the scored assessment to this store.
        #[arg(long)]
        store: Option<PathBuf>,
    },
    /// Print the level evolution of one company.
    Evolution {
        /// Assessment store written by `assess --store` or `serve`.
        #[arg(long)]
        store: PathBuf,
        #[arg(long)]
        company: String,
        #[arg(long, value_enum, default_value = "text")]
        format: OutputFormat,
    },
    /// Run the HTTP service.
    Serve {
        /// Action catalog document, loaded once at startup.
        #[arg(long, env = "CSRE4SOC_CATALOG")]
        catalog: PathBuf,
        /// Assessment store; created if missing.
        #[arg(long, env = "CSRE4SOC_STORE")]
        store: PathBuf,
        /// Socket address to bind.
        #[arg(long, env = "CSRE4SOC_LISTEN", default_value = "127.0.0.1:8080")]
        listen: String,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad input content: exit code 1.
    #[error("{0}")]
    Invalid(String),
    /// Unreadable files, failed writes, sockets: exit code 2.
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Invalid(_) => ExitCode::from(1),
            CliError::Io(_) => ExitCode::from(2),
        }
    }
}

/// The assess command's output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub result: AssessmentResult,
    pub recommendations: Vec<Recommendation>,
}

impl ReportDocument {
    /// Single-line JSON followed by a newline.
    pub fn render_json(&self) -> String {
        let mut out = serde_json::to_string(self).expect("report serializes");
        out.push('\n');
        out
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "Catalog digest: {}", self.result.catalog_digest);
        let _ = writeln!(out);
        let _ = writeln!(
            out,
            "{:<15} {:>9} {:>12}  Level",
            "Dimension", "Coverage", "Implemented"
        );
        for s in &self.result.scores {
            let _ = writeln!(
                out,
                "{:<15} {:>8.1}% {:>12}  L{} {}",
                s.dimension.as_str(),
                s.coverage.to_f64() * 100.0,
                format!("{}/{}", s.implemented_count, s.total_count),
                s.level.ordinal,
                s.level.label
            );
        }
        let _ = writeln!(
            out,
            "{:<15} {:>9} {:>12}  L{} {}",
            "overall", "", "", self.result.overall.ordinal, self.result.overall.label
        );
        let _ = writeln!(out);
        if self.recommendations.is_empty() {
            let _ = writeln!(out, "No recommendations: every catalog action is implemented.");
        } else {
            let _ = writeln!(out, "Recommendations ({}):", self.recommendations.len());
            for r in &self.recommendations {
                let _ = writeln!(
                    out,
                    "  [{}] {}: {}",
                    r.dimension.as_str(),
                    r.action_id,
                    r.text
                );
            }
        }
        out
    }
}

pub fn render_evolution_text(series: &EvolutionSeries) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "Evolution for {} ({} point{})",
        series.company_id,
        series.points.len(),
        if series.points.len() == 1 { "" } else { "s" }
    );
    if series.points.is_empty() {
        return out;
    }
    let _ = writeln!(
        out,
        "{:<22} {:>6} {:>9} {:>14} {:>8}  Catalog",
        "Timestamp", "Human", "Economic", "Environmental", "Overall"
    );
    for p in &series.points {
        let _ = writeln!(
            out,
            "{:<22} {:>6} {:>9} {:>14} {:>8}  {}",
            p.timestamp,
            format!("L{}", p.levels.human),
            format!("L{}", p.levels.economic),
            format!("L{}", p.levels.environmental),
            format!("L{}", p.overall),
            if p.catalog_digest_changed { "changed" } else { "" }
        );
    }
    out
}

fn read_file(path: &Path, what: &str) -> Result<Vec<u8>, CliError> {
    std::fs::read(path).map_err(|e| CliError::Io(format!("cannot read {what} {}: {e}", path.display())))
}

pub fn load_catalog(path: &Path) -> Result<ActionCatalog, CliError> {
    let bytes = read_file(path, "catalog")?;
    parse_catalog(&bytes).map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))
}

/// Scores an answers file. Returns the report and, when `store` is given,
/// the id of the appended record.
pub fn assess_files(
    catalog_path: &Path,
    answers_path: &Path,
    store: Option<&Path>,
) -> Result<(ReportDocument, Option<RecordId>), CliError> {
    let catalog = load_catalog(catalog_path)?;
    let answers = read_file(answers_path, "answers file")?;
    let submission = parse_submission(&answers)
        .and_then(|s| validate_submission(s, &catalog))
        .map_err(|e| CliError::Invalid(format!("{}: {e}", answers_path.display())))?;
    let report = ReportDocument {
        result: assess(&submission, &catalog),
        recommendations: recommend(&submission, &catalog),
    };
    let stored = match store {
        None => None,
        Some(path) => {
            let mut store = FileStore::open(path).map_err(|e| CliError::Io(e.to_string()))?;
            let record = AssessmentRecord::new(RecordId::generate(), submission, &catalog, Utc::now());
            Some(store.append(record).map_err(|e| CliError::Io(e.to_string()))?)
        }
    };
    Ok((report, stored))
}

pub fn cmd_assess(
    catalog: &Path,
    answers: &Path,
    format: OutputFormat,
    store: Option<&Path>,
    out: &mut impl Write,
) -> Result<(), CliError> {
    let (report, stored) = assess_files(catalog, answers, store)?;
    let text = match format {
        OutputFormat::Json => report.render_json(),
        OutputFormat::Text => report.render_text(),
    };
    out.write_all(text.as_bytes())
        .map_err(|e| CliError::Io(e.to_string()))?;
    if let Some(id) = stored {
        tracing::info!(record_id = %id, "assessment stored");
    }
    Ok(())
}

pub fn cmd_evolution(
    store: &Path,
    company: &str,
    format: OutputFormat,
    out: &mut impl Write,
) -> Result<(), CliError> {
    let store = FileStore::open_read_only(store).map_err(|e| CliError::Io(e.to_string()))?;
    let series = store
        .evolution(company)
        .map_err(|e| CliError::Io(e.to_string()))?;
    let text = match format {
        OutputFormat::Json => {
            let mut s = serde_json::to_string(&series).expect("series serializes");
            s.push('\n');
            s
        }
        OutputFormat::Text => render_evolution_text(&series),
    };
    out.write_all(text.as_bytes())
        .map_err(|e| CliError::Io(e.to_string()))
}

/// Loads everything, binds, then serves until Ctrl-C. The catalog is
/// validated before any socket is opened.
pub async fn cmd_serve(catalog: &Path, store: &Path, listen: &str) -> Result<(), CliError> {
    let catalog = load_catalog(catalog)?;
    let store = FileStore::open(store).map_err(|e| CliError::Io(e.to_string()))?;
    let shared: SharedStore = Arc::new(RwLock::new(store));
    let listener = tokio::net::TcpListener::bind(listen)
        .await
        .map_err(|e| CliError::Io(format!("cannot bind {listen}: {e}")))?;
    let addr = listener
        .local_addr()
        .map_err(|e| CliError::Io(e.to_string()))?;
    tracing::info!("listening on {addr}");
    let shutdown = async {
        let _ = tokio::signal::ctrl_c().await;
        tracing::info!("shutting down");
    };
    csre4soc_api::serve(listener, AppState::new(catalog, shared), shutdown)
        .await
        .map_err(|e| CliError::Io(e.to_string()))
}

pub fn run(cli: Cli) -> ExitCode {
    let result = match cli.command {
        Command::Assess {
            catalog,
            answers,
            format,
            store,
        } => cmd_assess(
            &catalog,
            &answers,
            format,
            store.as_deref(),
            &mut std::io::stdout().lock(),
        ),
        Command::Evolution {
            store,
            company,
            format,
        } => cmd_evolution(&store, &company, format, &mut std::io::stdout().lock()),
        Command::Serve {
            catalog,
            store,
            listen,
        } => match tokio::runtime::Runtime::new() {
            Ok(rt) => rt.block_on(cmd_serve(&catalog, &store, &listen)),
            Err(e) => Err(CliError::Io(e.to_string())),
        },
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
