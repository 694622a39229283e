//! `bregprox` command-line front end.

mod config;
mod csv;
mod experiment;
mod suite;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{Config, Section};
use experiment::{CliError, Kind, Outcome};

#[derive(Parser, Debug)]
#[command(name = "bregprox", version, about = "Bregman proximal mappings, envelopes and BPAM experiments")]
struct Cli {
    /// Config file with `[section]` headers.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; tables go to stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Overrides the `tol` key of every experiment.
    #[arg(long, global = true, allow_hyphen_values = true)]
    tol: Option<f64>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Left or right prox over a list of points.
    Prox(ExpArgs),
    /// Envelope values and gradients over a list of points.
    Envelope(ExpArgs),
    /// Envelope gradient formulas against finite differences.
    GradCheck(ExpArgs),
    /// Relative prox-regularity certificate for the amenable epigraph.
    Certify(ExpArgs),
    /// BPAM run with its iterate trace.
    RunBpam(ExpArgs),
    /// Paired BPAM and Bregman proximal gradient iterates.
    BpgEquiv(ExpArgs),
    /// Bregman-ball tangency data.
    Figure(ExpArgs),
    /// Every section of a config file.
    RunSuite {
        /// Config file; `--config` also works.
        path: Option<PathBuf>,
    },
}

/// Keys that override the config section. Anything else goes through `--set`.
#[derive(Args, Debug, Default)]
struct ExpArgs {
    /// Config section to read, defaults to the subcommand name.
    #[arg(long)]
    section: Option<String>,
    /// power, abs, quadratic, neg_abs, zero or box.
    #[arg(long)]
    f: Option<String>,
    #[arg(long)]
    p: Option<String>,
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long)]
    lambda: Option<String>,
    /// Comma list or `start:stop:step`.
    #[arg(long, allow_hyphen_values = true)]
    y: Option<String>,
    /// left or right.
    #[arg(long)]
    side: Option<String>,
    #[arg(long)]
    kernel: Option<String>,
    /// Exponent of the power kernel.
    #[arg(long)]
    q: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    lo: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    hi: Option<String>,
    #[arg(long)]
    resolution: Option<String>,
    /// `key=value`, repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE", allow_hyphen_values = true)]
    set: Vec<String>,
}

impl ExpArgs {
    fn overlay(&self, s: &mut Section) -> Result<(), CliError> {
        let named = [
            ("f", &self.f),
            ("p", &self.p),
            ("alpha", &self.alpha),
            ("lambda", &self.lambda),
            ("y", &self.y),
            ("side", &self.side),
            ("kernel", &self.kernel),
            ("q", &self.q),
            ("lo", &self.lo),
            ("hi", &self.hi),
            ("resolution", &self.resolution),
        ];
        for (k, v) in named {
            if let Some(v) = v {
                s.set(k, v.as_str());
            }
        }
        for kv in &self.set {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("--set expects key=value, got `{kv}`")))?;
            s.set(k.trim(), v.trim());
        }
        Ok(())
    }
}

fn load(path: &Path) -> Result<Config, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    Ok(Config::parse(&text)?)
}

fn seed(cli: &Cli, cfg: Option<&Config>) -> Result<u64, CliError> {
    match (cli.seed, cfg) {
        (Some(s), _) => Ok(s),
        (None, Some(c)) => Ok(c.global().get_or("seed", 0)?),
        (None, None) => Ok(0),
    }
}

fn write_outcome(o: &Outcome, out: Option<&Path>, prefix: &str) -> Result<(), CliError> {
    match out {
        Some(dir) => {
            for (stem, t) in &o.tables {
                let path = dir.join(format!("{prefix}{stem}.csv"));
                t.write(&path)
                    .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))?;
            }
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            let _ = lock.write_all(o.tables[0].1.render().as_bytes());
        }
    }
    Ok(())
}

fn single(cli: &Cli, kind: Kind, args: &ExpArgs) -> Result<ExitCode, CliError> {
    let cfg = cli.config.as_deref().map(load).transpose()?;
    let name = args.section.clone().unwrap_or_else(|| kind.as_str().to_string());
    let mut section = match cfg.as_ref().and_then(|c| c.section(&name)) {
        Some(s) => s.clone(),
        None if args.section.is_some() => {
            return Err(CliError::Config(format!("no section [{name}] in the config")))
        }
        None => Section::new(name.clone()),
    };
    args.overlay(&mut section)?;
    if let Some(t) = cli.tol {
        section.set("tol", t.to_string());
    }
    let seed = seed(cli, cfg.as_ref())?;
    let o = experiment::run(kind, &section, bregprox::numeric::derive_seed(seed, &name))?;
    write_outcome(&o, cli.out.as_deref(), "")?;
    eprintln!("{name}: {}", o.detail);
    Ok(match o.passed {
        Some(false) => {
            eprintln!("{name}: expectation not met");
            ExitCode::from(1)
        }
        _ => ExitCode::SUCCESS,
    })
}

fn dispatch(cli: &Cli) -> Result<ExitCode, CliError> {
    let (kind, args) = match &cli.cmd {
        Cmd::Prox(a) => (Kind::Prox, a),
        Cmd::Envelope(a) => (Kind::Envelope, a),
        Cmd::GradCheck(a) => (Kind::GradCheck, a),
        Cmd::Certify(a) => (Kind::Certify, a),
        Cmd::RunBpam(a) => (Kind::RunBpam, a),
        Cmd::BpgEquiv(a) => (Kind::BpgEquiv, a),
        Cmd::Figure(a) => (Kind::Figure, a),
        Cmd::RunSuite { path } => {
            let path = path
                .as_deref()
                .or(cli.config.as_deref())
                .ok_or_else(|| CliError::Config("run-suite needs a config path".into()))?;
            let cfg = load(path)?;
            let seed = seed(cli, Some(&cfg))?;
            let out = cli.out.clone().unwrap_or_else(|| PathBuf::from("bregprox-out"));
            let ok = suite::run_suite(&cfg, seed, cli.tol, &out)?;
            return Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) });
        }
    };
    single(cli, kind, args)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("bregprox: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
