//! Command-line front end for `tandem-core`.
//!
//! Every run writes its primary output to stdout or `--out`, and a
//! [`RunManifest`] recording the resolved parameters and the SHA-256 of the
//! output. `tandem replay <manifest>` re-executes a run and checks the
//! digest.
//!
//! Exit codes: 0 ok, 2 input error, 3 resource cap, 4 invariant or
//! certification failure, 130 interrupted.

pub mod commands;
pub mod config;
pub mod error;
pub mod manifest;
pub mod output;
pub mod spec;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::AtomicBool;
use std::time::Instant;

use clap::{Parser, Subcommand};

pub use crate::error::{CliError, CliResult};
pub use crate::manifest::{Invocation, OutputDigest, RunManifest};

use crate::commands::{execute, Context};
use crate::config::{parse_s_grid, read_json, Axis, OneOrMany, SimConfig, SweepConfig};
use crate::spec::{explicit, pin};

pub static INTERRUPTED: AtomicBool = AtomicBool::new(false);

#[derive(Debug, Parser)]
#[command(name = "tandem", version, about = "Error exponents for relaying one bit over two channels")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Also report exponents and bounds in bits
    #[arg(long, global = true)]
    pub bits: bool,

    /// Write the output here instead of stdout
    #[arg(long, global = true, value_name = "FILE")]
    pub out: Option<PathBuf>,

    /// Where to write the run manifest; defaults to <out>.manifest.json, or
    /// stderr when writing to stdout
    #[arg(long, global = true, value_name = "FILE")]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Optimal two-hop exponent, regime and curve types
    Exponent {
        #[arg(long, value_name = "SPEC")]
        p: String,
        #[arg(long, value_name = "SPEC")]
        q: String,
    },
    /// Finite-blocklength converse bound on -ln(pe0 + pe1)
    Bound {
        #[arg(long, value_name = "SPEC")]
        p: String,
        #[arg(long, value_name = "SPEC")]
        q: String,
        #[arg(long)]
        n: usize,
    },
    /// Exhaustive search for the optimal protocol and converse certification
    Bruteforce {
        #[arg(long, value_name = "SPEC")]
        p: String,
        #[arg(long, value_name = "SPEC")]
        q: String,
        #[arg(long)]
        n: usize,
        /// Run even when the search exceeds the default size limit
        #[arg(long)]
        override_cap: bool,
    },
    /// Monte Carlo simulation of a relay strategy; JSON lines
    Simulate {
        /// Simulation config (JSON)
        config: PathBuf,
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        /// Blocklengths, comma separated
        #[arg(long, value_delimiter = ',')]
        n: Option<Vec<usize>>,
    },
    /// Exponent over a grid of channel pairs; CSV
    Sweep {
        /// Sweep config (JSON)
        config: PathBuf,
    },
    /// Chernoff curves and the two-hop objective over a grid of s; CSV
    Curve {
        #[arg(long, value_name = "SPEC")]
        p: String,
        #[arg(long, value_name = "SPEC")]
        q: Option<String>,
        /// start:stop:step or a comma-separated list
        #[arg(long, default_value = "0:1:0.01")]
        s_grid: String,
    },
    /// Re-run a manifest and compare the output digest
    Replay {
        manifest: PathBuf,
    },
}

/// Resolves command-line arguments into a self-contained invocation.
pub fn resolve(command: &Command) -> CliResult<Invocation> {
    Ok(match command {
        Command::Exponent { p, q } => Invocation::Exponent {
            p: pin(p, "--p")?,
            q: pin(q, "--q")?,
        },
        Command::Bound { p, q, n } => Invocation::Bound {
            p: pin(p, "--p")?,
            q: pin(q, "--q")?,
            n: *n,
        },
        Command::Bruteforce {
            p,
            q,
            n,
            override_cap,
        } => Invocation::Bruteforce {
            p: pin(p, "--p")?,
            q: pin(q, "--q")?,
            n: *n,
            override_cap: *override_cap,
        },
        Command::Simulate {
            config,
            trials,
            seed,
            n,
        } => {
            let mut c: SimConfig = read_json(config, "config")?;
            if let Some(t) = trials {
                c.trials = *t;
            }
            if let Some(s) = seed {
                c.seed = *s;
            }
            if let Some(n) = n {
                c.n = OneOrMany::Many(n.clone());
            }
            c.p = explicit(&c.p.resolve("p")?);
            c.q = explicit(&c.q.resolve("q")?);
            c.validate()?;
            Invocation::Simulate { config: c }
        }
        Command::Sweep { config } => {
            let c: SweepConfig = read_json(config, "config")?;
            let pin_axis = |axis: &Axis, field: &str| -> CliResult<Axis> {
                let specs = axis.expand(field)?;
                specs
                    .iter()
                    .enumerate()
                    .map(|(i, s)| Ok(explicit(&s.resolve(&format!("{field}[{i}]"))?)))
                    .collect::<CliResult<Vec<_>>>()
                    .map(Axis::List)
            };
            Invocation::Sweep {
                config: SweepConfig {
                    p: pin_axis(&c.p, "p")?,
                    q: pin_axis(&c.q, "q")?,
                },
            }
        }
        Command::Curve { p, q, s_grid } => Invocation::Curve {
            p: pin(p, "--p")?,
            q: q.as_deref().map(|q| pin(q, "--q")).transpose()?,
            s_grid: parse_s_grid(s_grid)?,
        },
        Command::Replay { .. } => unreachable!("replay is not an invocation"),
    })
}

/// Runs `inv`, hashing everything written to `sink`.
pub fn run_invocation(
    inv: &Invocation,
    bits: bool,
    sink: &mut dyn Write,
) -> (CliResult<()>, OutputDigest, f64) {
    let ctx = Context {
        bits,
        interrupted: &INTERRUPTED,
    };
    let start = Instant::now();
    let mut writer = output::HashingWriter::new(sink);
    let result = execute(inv, &ctx, &mut writer);
    let (sha256, bytes) = match writer.finish() {
        Ok(d) => d,
        Err(e) => return (Err(e.into()), empty_digest(), 0.0),
    };
    (
        result,
        OutputDigest {
            sha256,
            bytes,
            path: None,
        },
        start.elapsed().as_secs_f64(),
    )
}

fn empty_digest() -> OutputDigest {
    OutputDigest {
        sha256: String::new(),
        bytes: 0,
        path: None,
    }
}

fn open_sink(out: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_manifest(m: &RunManifest, cli: &Cli) -> CliResult<()> {
    let body = serde_json::to_string_pretty(m).map_err(io::Error::from)?;
    let target = cli.manifest.clone().or_else(|| {
        cli.out.as_ref().map(|o| {
            let mut s = o.clone().into_os_string();
            s.push(".manifest.json");
            PathBuf::from(s)
        })
    });
    match target {
        Some(path) => std::fs::write(path, body + "\n")?,
        None => {
            let compact = serde_json::to_string(m).map_err(io::Error::from)?;
            eprintln!("manifest: {compact}");
        }
    }
    Ok(())
}

fn replay(path: &Path, cli: &Cli) -> CliResult<()> {
    let m: RunManifest = read_json(path, "manifest")?;
    let mut sink: Box<dyn Write> = match &cli.out {
        Some(_) => open_sink(cli.out.as_deref())?,
        None => Box::new(io::sink()),
    };
    let (result, digest, _) = run_invocation(&m.parameters, m.bits, &mut sink);
    match result {
        Ok(()) | Err(CliError::Invariant(_)) => {}
        Err(e) => return Err(e),
    }
    let matches = digest.sha256 == m.output.sha256 && digest.bytes == m.output.bytes;
    let report = serde_json::json!({
        "replayed": m.command,
        "expected_sha256": m.output.sha256,
        "actual_sha256": digest.sha256,
        "match": matches,
    });
    println!("{}", serde_json::to_string_pretty(&report).map_err(io::Error::from)?);
    if matches {
        Ok(())
    } else {
        Err(CliError::Invariant("replayed output differs from the manifest".into()))
    }
}

/// Runs the parsed command line and returns the process exit code.
pub fn run(cli: &Cli) -> u8 {
    let outcome = match &cli.command {
        Command::Replay { manifest } => replay(manifest, cli),
        command => run_command(command, cli),
    };
    match outcome {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn run_command(command: &Command, cli: &Cli) -> CliResult<()> {
    let inv = resolve(command)?;
    let mut sink = open_sink(cli.out.as_deref())?;
    let (result, mut digest, wall) = run_invocation(&inv, cli.bits, &mut sink);
    drop(sink);
    digest.path = cli.out.as_ref().map(|p| p.display().to_string());
    let produced = !matches!(
        result,
        Err(CliError::Input { .. } | CliError::Cap(_) | CliError::Io(_))
    );
    if produced {
        write_manifest(
            &RunManifest {
                command: inv.name().to_owned(),
                seed: inv.seed(),
                parameters: inv,
                bits: cli.bits,
                version: env!("CARGO_PKG_VERSION").to_owned(),
                wall_time_s: wall,
                output: digest,
                truncated: matches!(result, Err(CliError::Interrupted { .. })),
            },
            cli,
        )?;
    }
    result
}
