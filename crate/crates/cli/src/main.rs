mod commands;
mod config;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use orbitforge_core::Error;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::config::Settings;

#[derive(Parser, Debug)]
#[command(name = "orbitforge", version, about = "Polynomial dynamics over Q: Böttcher series, Green functions, p-adic zero counting, orbits and curves")]
struct Cli {
    /// key = value file with defaults for precision, truncation and iteration caps
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker thread cap
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write a run manifest for `replay`
    #[arg(long, global = true)]
    manifest_out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Exceptional maps, bad primes, critical orbits, preperiodicity
    Dynamics {
        #[command(subcommand)]
        cmd: DynamicsCmd,
    },
    /// Coefficients of Ψ (or Φ with --phi)
    Boettcher(BoettcherArgs),
    /// Green function values and equipotential curves
    Green {
        #[command(subcommand)]
        cmd: GreenCmd,
    },
    /// Newton polygons and the Poisson-Jensen ledger
    Padic {
        #[command(subcommand)]
        cmd: PadicCmd,
    },
    /// Small orbits and canonical heights
    Orbit {
        #[command(subcommand)]
        cmd: OrbitCmd,
    },
    /// Plane curves against small orbits
    Curve {
        #[command(subcommand)]
        cmd: CurveCmd,
    },
    /// Lattice counting and root-of-unity decompositions
    Combinat {
        #[command(subcommand)]
        cmd: CombinatCmd,
    },
    /// Re-run a manifest written by --manifest-out
    Replay { manifest: PathBuf },
}

#[derive(Subcommand, Debug)]
enum DynamicsCmd {
    Classify {
        #[arg(long)]
        poly: String,
        #[arg(long)]
        alpha: Option<String>,
    },
}

#[derive(Args, Debug)]
struct BoettcherArgs {
    #[arg(long)]
    poly: String,
    #[arg(long)]
    order: Option<usize>,
    #[arg(long)]
    phi: bool,
}

#[derive(Subcommand, Debug)]
enum GreenCmd {
    Eval {
        #[arg(long)]
        poly: String,
        #[arg(long, allow_hyphen_values = true)]
        re: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
        im: f64,
        #[arg(long)]
        tol: Option<f64>,
    },
    Trace {
        #[arg(long)]
        poly: String,
        #[arg(long)]
        r: String,
        #[arg(long, default_value_t = 512)]
        n: usize,
        #[arg(long)]
        tol: Option<f64>,
        /// csv, svg, json, or a file path ending in .csv or .svg
        #[arg(long, default_value = "json")]
        out: String,
    },
}

#[derive(Subcommand, Debug)]
enum PadicCmd {
    Polygon {
        #[arg(long)]
        p: u64,
        /// JSON array of coefficients, lowest exponent first
        #[arg(long)]
        series: String,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        low: i64,
        #[arg(long, default_value_t = 64)]
        prec: u32,
        #[arg(long)]
        pj: bool,
        #[arg(long, requires = "pj")]
        r1: Option<String>,
        #[arg(long, requires = "pj")]
        r: Option<String>,
    },
}

#[derive(Subcommand, Debug)]
enum OrbitCmd {
    Small {
        #[arg(long)]
        poly: String,
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        #[arg(long)]
        level: usize,
        #[arg(long)]
        cap: Option<usize>,
    },
    Height {
        #[arg(long)]
        poly: String,
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        #[arg(long)]
        tol: Option<f64>,
    },
}

#[derive(Subcommand, Debug)]
enum CurveCmd {
    Special {
        #[arg(long)]
        poly: String,
        /// JSON matrix; entry [i][j] is the coefficient of X^i Y^j
        #[arg(long)]
        curve: String,
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        #[arg(long, default_value_t = 4)]
        nmax: usize,
    },
    Intersect {
        #[arg(long)]
        poly: String,
        #[arg(long)]
        curve: String,
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        #[arg(long, default_value_t = 3)]
        cap: usize,
    },
    Nu {
        #[arg(long)]
        poly: String,
        #[arg(long)]
        curve: String,
        #[arg(long)]
        p: u64,
        #[arg(long, allow_hyphen_values = true)]
        phi: String,
        #[arg(long, allow_hyphen_values = true)]
        k1: i64,
        #[arg(long, allow_hyphen_values = true)]
        k2: i64,
        #[arg(long, default_value_t = 60)]
        window: usize,
        /// one, minus-one, or teich:<residue>
        #[arg(long, default_value = "one")]
        zeta1: String,
        #[arg(long, default_value = "one")]
        zeta2: String,
    },
}

#[derive(Subcommand, Debug)]
enum CombinatCmd {
    Verify {
        #[arg(long)]
        lemma: String,
        #[arg(long, default_value_t = 60)]
        nmax: i64,
        /// Largest N swept exhaustively; random cases cover the rest
        #[arg(long, default_value_t = 60)]
        exhaustive_max: i64,
        #[arg(long, default_value_t = 500)]
        random: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    Box {
        #[arg(long, allow_hyphen_values = true)]
        a1: i64,
        #[arg(long, allow_hyphen_values = true)]
        a2: i64,
        #[arg(long)]
        n: i64,
        #[arg(long, default_value = "1")]
        c: String,
        #[arg(long)]
        witnesses: bool,
    },
    Decompose {
        #[arg(long, allow_hyphen_values = true)]
        a1: i64,
        #[arg(long, allow_hyphen_values = true)]
        a2: i64,
        #[arg(long)]
        n: i64,
        #[arg(long, default_value = "1")]
        c: String,
        #[arg(long = "big-c", default_value = "1")]
        big_c: String,
    },
}

/// Everything needed to reproduce a run's stdout.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub subcommand: String,
    /// Arguments without the global --config and --manifest-out options.
    pub argv: Vec<String>,
    pub settings: Settings,
    pub wall_time_ms: u128,
}

pub enum Output {
    Json(serde_json::Value),
    Text(String),
}

/// An error with its exit status.
pub struct Failure {
    code: u8,
    error: Error,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if matches!(e, Error::Parse(_)) { 2 } else { 1 };
        Failure { code, error: e }
    }
}

fn error_json(code: &str, msg: &str) -> String {
    serde_json::to_string_pretty(&json!({ "error": { "code": code, "message": msg } })).unwrap()
}

fn strip_globals(args: &[String]) -> Vec<String> {
    let mut out = vec![];
    let mut it = args.iter();
    while let Some(a) = it.next() {
        if a == "--config" || a == "--manifest-out" {
            it.next();
        } else if !(a.starts_with("--config=") || a.starts_with("--manifest-out=")) {
            out.push(a.clone());
        }
    }
    out
}

fn subcommand_name(cmd: &Cmd) -> String {
    let s = format!("{cmd:?}");
    let head: String = s.chars().take_while(|c| c.is_alphanumeric()).collect();
    head.to_lowercase()
}

fn emit(out: Output) {
    let mut so = std::io::stdout().lock();
    match out {
        Output::Json(v) => {
            let _ = writeln!(so, "{}", serde_json::to_string_pretty(&v).unwrap());
        }
        Output::Text(s) => {
            let _ = so.write_all(s.as_bytes());
        }
    }
}

fn run(cli: Cli, argv: Vec<String>, settings: Option<Settings>) -> Result<(), Failure> {
    let started = Instant::now();
    let mut settings = match settings {
        Some(s) => s,
        None => match &cli.config {
            Some(p) => Settings::load(p)?,
            None => Settings::default(),
        },
    };
    if cli.threads.is_some() {
        settings.threads = cli.threads;
    }
    if let Some(t) = settings.threads {
        // a second build in one process (replay) keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t.max(1)).build_global();
    }
    let name = subcommand_name(&cli.cmd);
    if let Cmd::Replay { manifest } = &cli.cmd {
        let text = std::fs::read_to_string(manifest).map_err(|e| Error::Parse(format!("cannot read manifest: {e}")))?;
        let m: RunManifest = serde_json::from_str(&text).map_err(|e| Error::Parse(format!("bad manifest: {e}")))?;
        let mut full = vec!["orbitforge".to_string()];
        full.extend(m.argv.iter().cloned());
        let inner = Cli::try_parse_from(&full).map_err(|e| Error::Parse(format!("manifest arguments: {e}")))?;
        if matches!(inner.cmd, Cmd::Replay { .. }) {
            return Err(Error::Parse("a manifest cannot replay another manifest".into()).into());
        }
        return run(inner, m.argv, Some(m.settings));
    }
    let out = commands::dispatch(&cli.cmd, &settings)?;
    let failed_check = matches!(&out, Output::Json(v) if v.get("pass") == Some(&json!(false)));
    emit(out);
    if let Some(path) = &cli.manifest_out {
        let m = RunManifest {
            tool: "orbitforge".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            subcommand: name,
            argv,
            settings,
            wall_time_ms: started.elapsed().as_millis(),
        };
        std::fs::write(path, serde_json::to_string_pretty(&m).unwrap())
            .map_err(|e| Error::Resource(format!("cannot write manifest: {e}")))?;
    }
    if failed_check {
        return Err(Failure { code: 1, error: Error::Undecided("verification reported failures".into()) });
    }
    Ok(())
}

fn main() -> ExitCode {
    let raw: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&raw) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let rendered = e.render().to_string();
            eprint!("{rendered}");
            let msg: Vec<&str> = rendered.lines().take_while(|l| !l.starts_with("Usage:")).map(str::trim).filter(|l| !l.is_empty()).collect();
            println!("{}", error_json("usage", &msg.join(" ")));
            return ExitCode::from(2);
        }
    };
    let argv = strip_globals(&raw[1..]);
    match run(cli, argv, None) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            // failed verification tables are already on stdout
            if !matches!(f.error, Error::Undecided(ref m) if m == "verification reported failures") {
                println!("{}", error_json(f.error.code(), &f.error.to_string()));
            }
            eprintln!("orbitforge: {}", f.error);
            ExitCode::from(f.code)
        }
    }
}
