//! Command-line front end.
//!
//! Exit status is 0 on success, 1 for bad arguments or input files and 2 when
//! an internal invariant fails.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::adj::{AdjCode, ADJ_MAGIC};
use crate::audit::{redundancy_curve, to_csv, Kind};
use crate::cellprobe::{CellProbeCode, CPA_MAGIC};
use crate::deg::{DegCode, DEG_MAGIC};
use crate::error::{Error, Result};
use crate::model::{classic_to_universal, normalize_to_classic, sample_uniform, UniversalRep};

#[derive(Parser, Debug)]
#[command(name = "uigraph", version, about = "Succinct interval graph codes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Sample a uniformly random representation.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the binary UIR1 form instead of text.
        #[arg(long)]
        binary: bool,
    },
    /// Convert an interval list (one `left right` pair per line) to UIR text.
    Convert {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Serialize a structure built from a UIR file.
    Build {
        #[arg(long)]
        kind: Kind,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Answer one query against a serialized structure.
    Query {
        /// Checked against the file header when given.
        #[arg(long)]
        kind: Option<Kind>,
        #[arg(long = "in")]
        input: PathBuf,
        #[command(subcommand)]
        op: QueryOp,
    },
    /// Decode a serialized structure back to UIR text.
    Reconstruct {
        #[arg(long)]
        kind: Option<Kind>,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the space/probe CSV for a list of sizes.
    Audit {
        #[arg(long)]
        kind: Kind,
        #[arg(long = "n-list", value_delimiter = ',', required = true)]
        n_list: Vec<usize>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 10_000)]
        queries: usize,
    },
}

#[derive(Subcommand, Debug, Clone, Copy)]
pub enum QueryOp {
    Adj { i: usize, j: usize },
    Deg { i: usize },
}

/// A structure loaded from disk.
pub enum Structure {
    Adj(AdjCode),
    Deg(DegCode),
    CellProbe(CellProbeCode),
}

impl Structure {
    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        match bytes.get(..4) {
            Some(m) if m == ADJ_MAGIC => Ok(Self::Adj(AdjCode::from_bytes(bytes)?)),
            Some(m) if m == DEG_MAGIC => Ok(Self::Deg(DegCode::from_bytes(bytes)?)),
            Some(m) if m == CPA_MAGIC => Ok(Self::CellProbe(CellProbeCode::from_bytes(bytes)?)),
            _ => Err(Error::Format("unrecognized structure header".into())),
        }
    }

    pub fn kind(&self) -> Kind {
        match self {
            Self::Adj(_) => Kind::Adj,
            Self::Deg(_) => Kind::Deg,
            Self::CellProbe(_) => Kind::CellProbe,
        }
    }

    pub fn n(&self) -> usize {
        match self {
            Self::Adj(c) => c.n(),
            Self::Deg(c) => c.n(),
            Self::CellProbe(c) => c.n(),
        }
    }

    pub fn to_rep(&self) -> Result<UniversalRep> {
        match self {
            Self::Adj(c) => c.decode(),
            Self::Deg(c) => c.reconstruct(),
            Self::CellProbe(c) => c.decode(),
        }
    }

    pub fn adj(&self, i: usize, j: usize) -> Result<bool> {
        match self {
            Self::Adj(c) => c.query(i, j),
            Self::CellProbe(c) => c.query(i, j),
            // only through the O(n) decode path
            Self::Deg(c) => c.reconstruct()?.adj(i, j),
        }
    }

    pub fn deg(&self, i: usize) -> Result<usize> {
        match self {
            Self::Deg(c) => c.query(i),
            Self::Adj(_) | Self::CellProbe(_) => {
                crate::model::check_vertex(i, self.n())?;
                self.to_rep()?.deg(i)
            }
        }
    }
}

pub fn build_structure(kind: Kind, rep: &UniversalRep) -> Result<Vec<u8>> {
    Ok(match kind {
        Kind::Adj => AdjCode::build(rep)?.to_bytes(),
        Kind::Deg => DegCode::build(rep)?.to_bytes(),
        Kind::CellProbe => CellProbeCode::build(rep)?.to_bytes(),
    })
}

/// Reads a UIR file in either the text or the binary form.
pub fn read_rep(path: &Path) -> Result<UniversalRep> {
    let bytes = std::fs::read(path)?;
    if bytes.starts_with(b"UIR1") {
        UniversalRep::from_binary(&bytes)
    } else {
        let text = std::str::from_utf8(&bytes)
            .map_err(|_| Error::Format("UIR text file is not UTF-8".into()))?;
        UniversalRep::from_text(text)
    }
}

/// Parses the interval-list format: one interval per line, two decimal
/// numbers separated by whitespace. Blank lines are skipped.
pub fn parse_interval_list(text: &str) -> Result<Vec<(f64, f64)>> {
    let mut out = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        if fields.len() != 2 {
            return Err(Error::Format(format!(
                "line {}: expected two numbers, found {}",
                ln + 1,
                fields.len()
            )));
        }
        let num = |t: &str| {
            t.parse::<f64>()
                .map_err(|_| Error::Format(format!("line {}: bad number {t:?}", ln + 1)))
        };
        out.push((num(fields[0])?, num(fields[1])?));
    }
    Ok(out)
}

fn emit(out: &mut dyn Write, path: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, bytes)?,
        None => out.write_all(bytes)?,
    }
    Ok(())
}

fn load(input: &Path, kind: Option<Kind>) -> Result<Structure> {
    let s = Structure::from_bytes(&std::fs::read(input)?)?;
    match kind {
        Some(k) if k != s.kind() => Err(Error::Format(format!(
            "file holds a {} structure, not {k}",
            s.kind()
        ))),
        _ => Ok(s),
    }
}

/// Runs one parsed command.
pub fn execute(cmd: &Command, out: &mut dyn Write) -> Result<()> {
    match cmd {
        Command::Gen {
            n,
            seed,
            out: path,
            binary,
        } => {
            if *n == 0 {
                return Err(Error::ZeroVertices);
            }
            let rep = sample_uniform(*n, *seed)?;
            let bytes = if *binary {
                rep.to_binary()
            } else {
                rep.to_text().into_bytes()
            };
            emit(out, path.as_deref(), &bytes)
        }
        Command::Convert { input, out: path } => {
            let text = std::fs::read_to_string(input)?;
            let classic = normalize_to_classic(&parse_interval_list(&text)?)?;
            emit(
                out,
                path.as_deref(),
                classic_to_universal(&classic).to_text().as_bytes(),
            )
        }
        Command::Build {
            kind,
            input,
            out: path,
        } => {
            let rep = read_rep(input)?;
            std::fs::write(path, build_structure(*kind, &rep)?)?;
            Ok(())
        }
        Command::Query { kind, input, op } => {
            let s = load(input, *kind)?;
            let answer = match *op {
                QueryOp::Adj { i, j } => s.adj(i, j)?.to_string(),
                QueryOp::Deg { i } => s.deg(i)?.to_string(),
            };
            writeln!(out, "{answer}")?;
            Ok(())
        }
        Command::Reconstruct {
            kind,
            input,
            out: path,
        } => {
            let rep = load(input, *kind)?.to_rep()?;
            emit(out, path.as_deref(), rep.to_text().as_bytes())
        }
        Command::Audit {
            kind,
            n_list,
            seed,
            queries,
        } => {
            if let Some(pos) = n_list.iter().position(|&n| n == 0) {
                return Err(Error::Format(format!("--n-list entry {} is zero", pos + 1)));
            }
            let rows = redundancy_curve(*kind, n_list, *seed, *queries)?;
            out.write_all(to_csv(&rows).as_bytes())?;
            Ok(())
        }
    }
}

/// Parses `args` (program name first), runs the command and returns the exit
/// status. Diagnostics go to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            if code == 0 {
                let _ = out.write_all(text.as_bytes());
            } else {
                let _ = err.write_all(text.as_bytes());
            }
            return code;
        }
    };
    match execute(&cli.command, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if e.is_internal() {
                2
            } else {
                1
            }
        }
    }
}
