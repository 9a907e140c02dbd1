//! The `elens` command line: offline tools over `.elens` files and the
//! `serve` entry point.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use elens_core::assessors::{evaluate_metric, MetricKind};
use elens_core::dsl::{self, ParseDiagnostic};
use elens_core::model::{AssuranceCase, Direction};
use thiserror::Error;

#[derive(Debug, Parser)]
#[command(name = "elens", version, about = "Ethics assurance cases for AI systems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the HTTP API.
    Serve {
        /// TOML config file; ELENS_* variables override it.
        #[arg(long, env = "ELENS_CONFIG")]
        config: Option<PathBuf>,
    },
    /// Parse a case and report diagnostics and completeness violations.
    Check { file: PathBuf },
    /// Print a case in canonical form.
    Fmt {
        file: PathBuf,
        /// Fail if the file is not already canonical.
        #[arg(long, conflicts_with = "write")]
        check: bool,
        /// Rewrite the file in place.
        #[arg(long)]
        write: bool,
    },
    /// Trace an element back to its losses, or forward to its requirements.
    Trace {
        file: PathBuf,
        id: String,
        #[arg(long)]
        forward: bool,
    },
    /// Print the requirement traceability matrix.
    Matrix {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Compute a fairness or explainability metric on a CSV file.
    Metric {
        kind: MetricKind,
        csv: PathBuf,
        #[arg(long)]
        group_a: Option<String>,
        #[arg(long)]
        group_b: Option<String>,
    },
    /// Print the goal graph, with propagated satisfaction, as Graphviz.
    Dot { file: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Markdown,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}", render_diagnostics(.path, .diagnostics))]
    Parse {
        path: PathBuf,
        diagnostics: Vec<ParseDiagnostic>,
    },
    #[error("{0}")]
    Failed(String),
}

fn render_diagnostics(path: &Path, diagnostics: &[ParseDiagnostic]) -> String {
    diagnostics
        .iter()
        .map(|d| format!("{}:{d}", path.display()))
        .collect::<Vec<_>>()
        .join("\n")
}

/// What a finished command prints and how it exits.
#[derive(Debug, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub success: bool,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Self { stdout, success: true }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn load(path: &Path) -> Result<AssuranceCase, CliError> {
    dsl::parse(&read(path)?).map_err(|diagnostics| CliError::Parse {
        path: path.to_path_buf(),
        diagnostics,
    })
}

/// Runs every command except `serve`.
pub fn run_offline(command: &Command) -> Result<Outcome, CliError> {
    match command {
        Command::Serve { .. } => unreachable!("serve is handled by the caller"),
        Command::Check { file } => check(file),
        Command::Fmt { file, check, write } => fmt(file, *check, *write),
        Command::Trace { file, id, forward } => {
            let case = load(file)?;
            let direction = if *forward {
                Direction::Forward
            } else {
                Direction::Backward
            };
            let chain = case.trace(id, direction).map_err(|e| CliError::Failed(e.to_string()))?;
            let mut out = format!("{id}\n");
            for hop in chain {
                let ids: Vec<&str> = hop.iter().map(|e| e.as_str()).collect();
                out.push_str(&format!("-> [{}]\n", ids.join(", ")));
            }
            Ok(Outcome::ok(out))
        }
        Command::Matrix { file, format } => {
            let matrix = load(file)?
                .build_trace_matrix()
                .map_err(|e| CliError::Failed(e.to_string()))?;
            Ok(Outcome::ok(match format {
                Format::Csv => matrix.to_csv(),
                Format::Json => matrix.to_json() + "\n",
                Format::Markdown => matrix.to_markdown(),
            }))
        }
        Command::Metric {
            kind,
            csv,
            group_a,
            group_b,
        } => {
            let bytes = std::fs::read(csv).map_err(|source| CliError::Io {
                path: csv.clone(),
                source,
            })?;
            let mut params = BTreeMap::new();
            for (key, value) in [("group_a", group_a), ("group_b", group_b)] {
                if let Some(v) = value {
                    params.insert(key.to_string(), v.clone());
                }
            }
            let result = evaluate_metric(*kind, &bytes, &params).map_err(|e| CliError::Failed(e.to_string()))?;
            let json = serde_json::to_string_pretty(&result).expect("metric result serializes");
            Ok(Outcome::ok(json + "\n"))
        }
        Command::Dot { file } => {
            let graph = load(file)?.bound_goal_graph();
            let values = graph.propagate().ok();
            Ok(Outcome::ok(graph.to_dot(values.as_ref())))
        }
    }
}

fn check(file: &Path) -> Result<Outcome, CliError> {
    let src = read(file)?;
    let (case, map) = dsl::parse_with_map(&src).map_err(|diagnostics| CliError::Parse {
        path: file.to_path_buf(),
        diagnostics,
    })?;
    let mut out = String::new();
    for d in dsl::lint(&case, Some(&map)) {
        out.push_str(&format!("{}:{d}\n", file.display()));
    }
    let violations = case.completeness_check();
    for v in &violations {
        let span = map.element(v.element_id.as_str());
        out.push_str(&format!(
            "{}:{span}: error [{}]: {}\n",
            file.display(),
            v.rule,
            v.message
        ));
    }
    let elements = case.elements().count();
    out.push_str(&format!(
        "{}: {elements} elements, {} questions, {} violations\n",
        case.id(),
        case.checklist().len(),
        violations.len()
    ));
    Ok(Outcome {
        stdout: out,
        success: violations.is_empty(),
    })
}

fn fmt(file: &Path, check: bool, write: bool) -> Result<Outcome, CliError> {
    let src = read(file)?;
    let case = dsl::parse(&src).map_err(|diagnostics| CliError::Parse {
        path: file.to_path_buf(),
        diagnostics,
    })?;
    let canonical = dsl::serialize(&case);
    if check {
        let same = canonical == src;
        let stdout = if same {
            String::new()
        } else {
            format!("{} is not canonical\n", file.display())
        };
        return Ok(Outcome { stdout, success: same });
    }
    if write {
        if canonical != src {
            std::fs::write(file, &canonical).map_err(|source| CliError::Io {
                path: file.to_path_buf(),
                source,
            })?;
        }
        return Ok(Outcome::ok(String::new()));
    }
    Ok(Outcome::ok(canonical))
}
