//! Command-line front end: `solve`, `regrep` and `example`.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{ArgAction, Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::format::{BlockSpecFile, CayleyTableFile, MatrixSetFile, SolveReport};
use crate::grouprep::{builtin_example_d8, regular_representation, EXAMPLES};
use crate::solver::{assemble_transfer_matrix, KernelStrategy, SolveOptions, DEFAULT_TOLERANCE};

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    /// Command-line usage error (reported by clap).
    pub const USAGE: i32 = 2;
    pub const IO: i32 = 3;
    pub const PARSE: i32 = 4;
    pub const SPEC_MISMATCH: i32 = 5;
    pub const NON_UNITARY: i32 = 6;
    pub const KERNEL_DIMENSION: i32 = 7;
    pub const VERIFICATION: i32 = 8;
    pub const GROUP_DATA: i32 = 9;
    pub const UNKNOWN_EXAMPLE: i32 = 10;
}

impl Error {
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. } => exit::IO,
            Error::Parse { .. } => exit::PARSE,
            Error::DimensionMismatch(_)
            | Error::NotDivisible { .. }
            | Error::InvalidInput(_)
            | Error::SpecDimensionError { .. } => exit::SPEC_MISMATCH,
            Error::NonUnitaryInput { .. } => exit::NON_UNITARY,
            Error::KernelDimensionMismatch { .. } => exit::KERNEL_DIMENSION,
            Error::VerificationFailed { .. } => exit::VERIFICATION,
            Error::UnknownLabel(_) | Error::InvalidCayleyTable(_) | Error::InconsistentCharacters(_) => {
                exit::GROUP_DATA
            }
            Error::UnknownExample { .. } => exit::UNKNOWN_EXAMPLE,
        }
    }

    /// Short status string used in solve reports.
    pub fn status(&self) -> &'static str {
        match self.exit_code() {
            exit::IO => "io-error",
            exit::PARSE => "parse-error",
            exit::SPEC_MISMATCH => "spec-mismatch",
            exit::NON_UNITARY => "non-unitary-input",
            exit::KERNEL_DIMENSION => "kernel-dimension-mismatch",
            exit::VERIFICATION => "verification-failed",
            exit::GROUP_DATA => "invalid-group-data",
            _ => "unknown-example",
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "sbd",
    version,
    about = "Simultaneous block diagonalization of unitary matrices"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum StrategyArg {
    Stacked,
    Incremental,
}

impl From<StrategyArg> for KernelStrategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Stacked => KernelStrategy::Stacked,
            StrategyArg::Incremental => KernelStrategy::Incremental,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute the transfer matrix for a generator file and a block-spec file.
    Solve {
        generators: PathBuf,
        blocks: PathBuf,
        /// Where to write the transfer matrix.
        #[arg(long, default_value = "transfer.json")]
        out: PathBuf,
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tol: f64,
        /// Fail with a nonzero exit code when residuals exceed 10 x tol.
        #[arg(long, default_value_t = true, action = ArgAction::Set)]
        verify: bool,
        #[arg(long, value_enum, default_value = "stacked")]
        strategy: StrategyArg,
    },
    /// Build left-regular permutation matrices from a Cayley table file.
    Regrep {
        cayley: PathBuf,
        /// Comma-separated element labels to use as generators.
        #[arg(long, value_delimiter = ',', required = true)]
        generators: Vec<String>,
        #[arg(long, default_value = "generators.json")]
        out: PathBuf,
    },
    /// Write a built-in example (generators, blocks, reference transfer matrix).
    Example {
        name: String,
        #[arg(long, default_value = ".")]
        dir: PathBuf,
    },
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { exit::USAGE } else { exit::OK };
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = write!(sink, "{e}");
            return code;
        }
    };
    let outcome = match cli.command {
        Command::Solve {
            generators,
            blocks,
            out,
            tol,
            verify,
            strategy,
        } => {
            let opts = SolveOptions::with_tol(tol).strategy(strategy.into());
            let (report, result) = cmd_solve(&generators, &blocks, &out, &opts, verify);
            let _ = writeln!(
                stdout,
                "{}",
                serde_json::to_string_pretty(&report).expect("report serializes")
            );
            result
        }
        Command::Regrep {
            cayley,
            generators,
            out,
        } => {
            let labels: Vec<&str> = generators.iter().map(String::as_str).collect();
            cmd_regrep(&cayley, &labels, &out).map(|()| {
                let _ = writeln!(stdout, "wrote {}", out.display());
            })
        }
        Command::Example { name, dir } => cmd_example(&name, &dir).map(|files| {
            for f in files {
                let _ = writeln!(stdout, "wrote {}", f.display());
            }
        }),
    };
    match outcome {
        Ok(()) => exit::OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

fn load_inputs(generators: &Path, blocks: &Path) -> Result<(crate::GeneratorSet, crate::BlockSpec)> {
    let gens = MatrixSetFile::read(generators)?.to_generators(generators)?;
    let spec = BlockSpecFile::read(blocks)?.to_spec(blocks, gens.labels())?;
    Ok((gens, spec))
}

/// Loads both files, solves, writes `S` to `out` and returns the report
/// together with the outcome. The report is filled as far as the run got.
pub fn cmd_solve(
    generators: &Path,
    blocks: &Path,
    out: &Path,
    opts: &SolveOptions,
    verify: bool,
) -> (SolveReport, Result<()>) {
    let threshold = opts.verification_threshold();
    let mut report = SolveReport {
        status: "ok".into(),
        message: None,
        kernel_dims: Vec::new(),
        residual_per_generator: BTreeMap::new(),
        max_residual: None,
        unitarity_residual: None,
        columns_per_family: Vec::new(),
        tolerance_used: opts.tol,
        verification_threshold: threshold,
        timing_ms: 0.0,
    };
    let start = Instant::now();
    let result = (|| {
        let (gens, spec) = load_inputs(generators, blocks)?;
        let res = assemble_transfer_matrix(&gens, &spec, opts)?;
        report.kernel_dims = res.kernel_dims.clone();
        report.residual_per_generator = gens
            .labels()
            .iter()
            .cloned()
            .zip(res.residuals.iter().copied())
            .collect();
        report.max_residual = Some(res.max_residual);
        report.unitarity_residual = Some(res.orthogonality_residual);
        report.columns_per_family = res.block_column_ranges.iter().map(|&(o, l)| [o, l]).collect();
        MatrixSetFile::single("S", &res.s).write(out)?;
        if verify && !res.passes(threshold) {
            return Err(Error::VerificationFailed {
                max_residual: res.max_residual.max(res.orthogonality_residual),
                threshold,
            });
        }
        Ok(())
    })();
    report.timing_ms = start.elapsed().as_secs_f64() * 1e3;
    if let Err(e) = &result {
        report.status = e.status().into();
        report.message = Some(e.to_string());
    }
    (report, result)
}

pub fn cmd_regrep(cayley: &Path, generator_labels: &[&str], out: &Path) -> Result<()> {
    let table = CayleyTableFile::read(cayley)?.to_table(cayley)?;
    let gens = regular_representation(&table, generator_labels)?;
    MatrixSetFile::from_generators(&gens).write(out)
}

/// Writes the named example into `dir` and returns the written paths.
pub fn cmd_example(name: &str, dir: &Path) -> Result<Vec<PathBuf>> {
    match name {
        "d8" => {
            let ex = builtin_example_d8();
            let gens_path = dir.join("d8_generators.json");
            let blocks_path = dir.join("d8_blocks.json");
            let s_path = dir.join("d8_reference_s.json");
            MatrixSetFile::from_generators(&ex.generators).write(&gens_path)?;
            BlockSpecFile::from_spec(&ex.blocks, ex.generators.labels(), Some(ex.characters.irrep_names()))
                .write(&blocks_path)?;
            MatrixSetFile::single("S", &ex.reference_s).write(&s_path)?;
            Ok(vec![gens_path, blocks_path, s_path])
        }
        _ => Err(Error::UnknownExample {
            name: name.to_string(),
            available: EXAMPLES.to_vec(),
        }),
    }
}
