//! Command-line front end. [`dispatch`] parses arguments, runs one
//! subcommand inside a worker pool of the requested size and writes its JSON
//! (or DOT) output.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};
use thiserror::Error;

use floerkit::config::{RunConfig, DEFAULT_BUDGET};
use floerkit::report::CheckEntry;

mod commands;
pub mod files;

/// Exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("invalid input: {0}")]
    Input(String),
    #[error("{0}")]
    Io(String),
    /// A computation refused or failed; reported as a failing check.
    #[error("{check}: {witness}")]
    Failed { check: String, witness: Value },
    #[error("{0}")]
    Check(String),
}

impl CliError {
    pub fn failed(check: &str, e: impl std::fmt::Display + std::fmt::Debug) -> Self {
        CliError::Failed { check: check.to_string(), witness: json!({ "error": e.to_string(), "detail": format!("{e:?}") }) }
    }
}

/// What a subcommand produced: a JSON document or DOT text, and whether every
/// check it ran passed.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub body: Body,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Body {
    Json(Value),
    Dot(String),
}

impl Output {
    pub fn data(v: Value) -> Self {
        Output { body: Body::Json(v), ok: true }
    }

    pub fn report(entries: Vec<CheckEntry>) -> Self {
        let ok = entries.iter().all(CheckEntry::passed);
        Output { body: Body::Json(serde_json::to_value(entries).expect("entries serialize")), ok }
    }

    pub fn render(&self) -> String {
        match &self.body {
            Body::Json(v) => {
                let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
                s.push('\n');
                s
            }
            Body::Dot(s) => s.clone(),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "floerkit", version, about = "Set-level field theory checks on finite groups", arg_required_else_help = true)]
pub struct Cli {
    /// Worker threads; overrides FLOERKIT_THREADS.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Maximum tuple evaluations for a single enumeration.
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,
    /// Write the output to DIR/<subcommand>.json (or .dot) instead of stdout.
    #[arg(long, global = true, value_name = "DIR")]
    pub out_dir: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a group table and optional automorphism files.
    GroupCheck {
        #[arg(long)]
        group: String,
        #[arg(long = "automorphism")]
        automorphisms: Vec<PathBuf>,
    },
    /// Canonical points of the representation variety of a genus-g surface.
    Repvar {
        #[arg(long)]
        group: String,
        #[arg(long)]
        genus: usize,
    },
    /// The relation induced by one simple cobordism.
    Lagrangian {
        #[arg(long)]
        group: String,
        #[arg(long)]
        step: PathBuf,
    },
    /// Geometric composition of relation files, left to right.
    Compose {
        #[arg(required = true, num_args = 2..)]
        relations: Vec<PathBuf>,
    },
    /// Whether the composition of two relations is embedded.
    Embedded {
        first: PathBuf,
        second: PathBuf,
    },
    /// Generator tuples of a chain of relation files.
    Generators {
        /// Read the chain cyclically (the last target must be the first source).
        #[arg(long)]
        cyclic: bool,
        #[arg(required = true)]
        relations: Vec<PathBuf>,
    },
    /// Closed invariant of a chain from the empty surface to itself.
    Invariant {
        #[arg(long)]
        chain: PathBuf,
        #[arg(long)]
        group: String,
    },
    /// Move-compatibility identities for the automorphism library at a genus.
    VerifyCerf {
        #[arg(long)]
        group: String,
        #[arg(long)]
        genus: usize,
    },
    /// Burnside count of homomorphisms from a presented group, up to conjugacy.
    Oracle {
        #[arg(long)]
        presentation: PathBuf,
        #[arg(long)]
        group: String,
    },
    /// Check that consecutive steps share boundary surfaces.
    BordismValidate {
        #[arg(long)]
        chain: PathBuf,
    },
    /// Every chain one Cerf move away.
    BordismNeighbors {
        #[arg(long)]
        chain: PathBuf,
    },
    /// Bounded search for a move sequence between two chains.
    BordismConnect {
        #[arg(long)]
        chain: PathBuf,
        #[arg(long)]
        to: PathBuf,
        #[arg(long, default_value_t = RunConfig::default().depth)]
        depth: usize,
    },
    /// Structural checks, Euler characteristic and label endpoints of a diagram.
    QuiltValidate {
        quilt: PathBuf,
    },
    /// Glue the outgoing end of the first diagram to an incoming end of the second.
    QuiltGlue {
        first: PathBuf,
        second: PathBuf,
        #[arg(long)]
        end: usize,
    },
    /// Shrink a strip or annulus patch.
    QuiltShrink {
        quilt: PathBuf,
        #[arg(long)]
        patch: usize,
        /// Skip the embeddedness check on the composed labels.
        #[arg(long)]
        unchecked: bool,
    },
    /// Quilted composition map of a relation-mode diagram.
    QuiltEval {
        quilt: PathBuf,
        /// JSON list with one generator tuple per incoming end; all inputs when omitted.
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// DOT graph of a diagram.
    QuiltExportDot {
        quilt: PathBuf,
    },
    /// Validate a category or bicategory file.
    CatValidate {
        file: PathBuf,
    },
    /// Yoneda image of a bicategory at a base object.
    CatYoneda {
        file: PathBuf,
        #[arg(long, default_value_t = 0)]
        base: usize,
    },
    /// Quotient of a bicategory by invertible 2-cells.
    CatQuotient {
        file: PathBuf,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::GroupCheck { .. } => "group-check",
            Command::Repvar { .. } => "repvar",
            Command::Lagrangian { .. } => "lagrangian",
            Command::Compose { .. } => "compose",
            Command::Embedded { .. } => "embedded",
            Command::Generators { .. } => "generators",
            Command::Invariant { .. } => "invariant",
            Command::VerifyCerf { .. } => "verify-cerf",
            Command::Oracle { .. } => "oracle",
            Command::BordismValidate { .. } => "bordism-validate",
            Command::BordismNeighbors { .. } => "bordism-neighbors",
            Command::BordismConnect { .. } => "bordism-connect",
            Command::QuiltValidate { .. } => "quilt-validate",
            Command::QuiltGlue { .. } => "quilt-glue",
            Command::QuiltShrink { .. } => "quilt-shrink",
            Command::QuiltEval { .. } => "quilt-eval",
            Command::QuiltExportDot { .. } => "quilt-export-dot",
            Command::CatValidate { .. } => "cat-validate",
            Command::CatYoneda { .. } => "cat-yoneda",
            Command::CatQuotient { .. } => "cat-quotient",
        }
    }
}

/// `bordism validate`, `relcat compose` and `fieldfun invariant` spellings
/// map onto the flat subcommand names.
fn normalize(args: Vec<OsString>) -> Vec<OsString> {
    if args.len() < 3 {
        return args;
    }
    let (Some(group), Some(sub)) = (args[1].to_str(), args[2].to_str()) else { return args };
    let joined = match group {
        "bordism" | "quilt" | "cat" => format!("{group}-{sub}"),
        "relcat" | "fieldfun" => sub.to_string(),
        _ => return args,
    };
    let mut out = vec![args[0].clone(), joined.into()];
    out.extend(args.into_iter().skip(3));
    out
}

/// Runs one command line. `out` receives the result, `err` usage errors and
/// diagnostics. Returns 0 on success, 1 when a check fails (the report is
/// still written) and 2 on usage or input errors.
pub fn dispatch<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = normalize(argv.into_iter().map(Into::into).collect());
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(text.as_bytes());
                    EXIT_OK
                }
                _ => {
                    let _ = err.write_all(text.as_bytes());
                    EXIT_USAGE
                }
            };
        }
    };
    let config = RunConfig { workers: cli.threads, budget: cli.budget, output_dir: cli.out_dir.clone(), ..RunConfig::default() };
    if let Err(msg) = config.validate() {
        let _ = writeln!(err, "error: {msg}");
        return EXIT_USAGE;
    }
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(config.resolved_workers()).build() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: cannot start worker pool: {e}");
            return EXIT_USAGE;
        }
    };
    let result = pool.install(|| commands::run(&cli.command, &config));
    let output = match result {
        Ok(o) => o,
        Err(CliError::Failed { check, witness }) => Output::report(vec![CheckEntry::fail(check, witness)]),
        Err(CliError::Check(msg)) => Output::report(vec![CheckEntry::fail("input", json!({ "error": msg }))]),
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_USAGE;
        }
    };
    let text = output.render();
    match &config.output_dir {
        Some(dir) => {
            let ext = if matches!(output.body, Body::Dot(_)) { "dot" } else { "json" };
            let path = dir.join(format!("{}.{ext}", cli.command.name()));
            if let Err(e) = std::fs::create_dir_all(dir).and_then(|_| std::fs::write(&path, &text)) {
                let _ = writeln!(err, "error: {}: {e}", path.display());
                return EXIT_USAGE;
            }
        }
        None => {
            let _ = out.write_all(text.as_bytes());
        }
    }
    if output.ok {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    }
}
