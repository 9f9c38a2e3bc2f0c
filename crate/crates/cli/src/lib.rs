//! Command-line front end: argument parsing, file loading and report
//! emission. [`run`] is the whole program; `main` only wires it to the
//! process streams.

pub mod corpus;
mod commands;
mod render;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

pub use commands::execute;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Engine(#[from] defcohom::Error),
    #[error("invariant violated: {0}")]
    Invariant(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Io { .. } => EXIT_INPUT,
            CliError::Engine(e) if e.is_input_error() => EXIT_INPUT,
            CliError::Engine(_) | CliError::Invariant(_) => EXIT_INTERNAL,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "defcohom", version, about = "Deformations of complex structures on invariant models")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    #[default]
    Json,
    Text,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Model file, or the name of a bundled model.
    #[arg(long)]
    pub model: String,
    /// Jet order; defaults to the deformation's order, then the model's.
    #[arg(long)]
    pub order: Option<u32>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the result here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct DeformationArg {
    /// Beltrami series file.
    #[arg(long)]
    pub deformation: PathBuf,
    /// Reject series with conjugate parameters.
    #[arg(long)]
    pub holomorphic: bool,
}

#[derive(Debug, Clone, Args)]
pub struct KindArg {
    /// Form bidegree `p,q`.
    #[arg(long, conflicts_with = "tangent")]
    pub bidegree: Option<String>,
    /// Tangent-valued degree `q`.
    #[arg(long)]
    pub tangent: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct ClassArg {
    /// Index into the cohomology basis.
    #[arg(long, conflicts_with = "class_rep")]
    pub class: Option<usize>,
    /// File with a closed representative given as terms.
    #[arg(long)]
    pub class_rep: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Central,
    Sampled,
    Symbolic,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum RelativeDelArg {
    #[default]
    GeneratorSubstitution,
    DualFrameNormalized,
    Central,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Load and validate a model.
    Validate {
        #[command(flatten)]
        common: Common,
    },
    /// Central-fiber cohomology dimensions and class representatives.
    Cohomology {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        kind: KindArg,
    },
    /// Maurer-Cartan defect of a series.
    McCheck {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        deformation: DeformationArg,
    },
    /// Solve the Maurer-Cartan equation order by order from a first-order term.
    McSolve {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        deformation: DeformationArg,
    },
    /// Kodaira-Spencer classes.
    Ks {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        deformation: DeformationArg,
        /// Direction such as `t11` or `t11=1/2,~t12=i`; all coordinate
        /// directions when omitted.
        #[arg(long)]
        direction: Option<String>,
    },
    /// Extend cohomology classes along a series.
    Extend {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        deformation: DeformationArg,
        #[command(flatten)]
        kind: KindArg,
        #[command(flatten)]
        class: ClassArg,
    },
    /// Obstructions to extending classes, by formula and directly.
    Obstruct {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        deformation: DeformationArg,
        #[command(flatten)]
        kind: KindArg,
        #[command(flatten)]
        class: ClassArg,
        #[arg(long)]
        direction: Option<String>,
        /// Relative `del` used by the form obstruction formula.
        #[arg(long, value_enum, default_value_t = RelativeDelArg::GeneratorSubstitution)]
        relative_del: RelativeDelArg,
    },
    /// Central and deformed Hodge numbers.
    Hodge {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        deformation: Option<PathBuf>,
        #[arg(long)]
        holomorphic: bool,
        /// Bidegree `p,q`; repeatable. All bidegrees when omitted.
        #[arg(long)]
        bidegree: Vec<String>,
        /// Repeatable; defaults to central, plus sampled with a deformation.
        #[arg(long, value_enum)]
        mode: Vec<ModeArg>,
        /// Sampling seed (decimal or 0x-hex); overrides DEFCOHOM_SEED.
        #[arg(long)]
        seed: Option<String>,
    },
    /// Exhaustive identity checks, and deformation checks with a series.
    VerifyIdentities {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        deformation: Option<PathBuf>,
        #[arg(long)]
        holomorphic: bool,
    },
}

impl Command {
    pub fn common(&self) -> &Common {
        match self {
            Command::Validate { common }
            | Command::Cohomology { common, .. }
            | Command::McCheck { common, .. }
            | Command::McSolve { common, .. }
            | Command::Ks { common, .. }
            | Command::Extend { common, .. }
            | Command::Obstruct { common, .. }
            | Command::Hodge { common, .. }
            | Command::VerifyIdentities { common, .. } => common,
        }
    }
}

pub(crate) fn read_file(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

/// Parses `args` (including the program name), runs the command and writes
/// the result; returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { stderr.write_all(text.as_bytes()) } else { stdout.write_all(text.as_bytes()) };
            return code;
        }
    };
    let common = cli.command.common().clone();
    let outcome = execute(&cli.command).and_then(|out| {
        for line in &out.notes {
            let _ = writeln!(stderr, "{line}");
        }
        let text = match common.format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&out.value).expect("report serializes");
                s.push('\n');
                s
            }
            Format::Text => render::text(&out.value),
        };
        match &common.out {
            Some(path) => std::fs::write(path, text).map_err(|source| CliError::Io { path: path.clone(), source })?,
            None => {
                let _ = stdout.write_all(text.as_bytes());
            }
        }
        Ok(out.failure)
    });
    match outcome {
        Ok(None) => EXIT_OK,
        Ok(Some(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_INTERNAL
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
