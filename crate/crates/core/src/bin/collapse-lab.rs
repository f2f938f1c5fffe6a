use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use collapse_lab::cli::{resolve_output, run, RunConfig};

#[derive(Parser)]
#[command(name = "collapse-lab", version, about = "Inelastic collapse of four hard spheres on a line: orbits, windows, certificates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Iterate one orbit and dump its tail
    Simulate(Flags),
    /// Bifurcation scan over a range of r
    Bifurcate(Flags),
    /// Exact stability-window bounds
    Windows(Flags),
    /// Eigen-systems of the branch matrices over an r grid
    Spectrum(Flags),
    /// Periodic-orbit certificate for a branch word
    Pattern(Flags),
    /// Compare the map with the collision engines
    Validate(Flags),
    /// Largest Lyapunov exponents
    Lyapunov(Flags),
    /// Rotation number of a branch-2 orbit
    Rotation(Flags),
}

#[derive(Args)]
struct Flags {
    /// key=value file read before the flags
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    r: Option<String>,
    #[arg(long = "r-min")]
    r_min: Option<String>,
    #[arg(long = "r-max")]
    r_max: Option<String>,
    #[arg(long)]
    nr: Option<String>,
    #[arg(long)]
    iters: Option<String>,
    #[arg(long)]
    tail: Option<String>,
    /// default, random, or a file of x,y,z lines
    #[arg(long)]
    grid: Option<String>,
    /// theta, phi or strip
    #[arg(long)]
    obs: Option<String>,
    #[arg(long = "log-theta")]
    log_theta: bool,
    /// windows or stripes
    #[arg(long)]
    overlay: Option<String>,
    /// working decimal digits for the window bounds
    #[arg(long)]
    digits: Option<String>,
    /// CSV path; stdout when absent
    #[arg(long)]
    out: Option<String>,
    #[arg(long)]
    svg: Option<String>,
    #[arg(long)]
    threads: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// branch word for `pattern`
    #[arg(long)]
    word: Option<String>,
    #[arg(long = "n-max")]
    n_max: Option<String>,
    /// number of random initial data
    #[arg(long)]
    inits: Option<String>,
    /// letters per run for `validate`
    #[arg(long)]
    symbols: Option<String>,
    /// comma-separated decimals for `validate`
    #[arg(long = "r-list")]
    r_list: Option<String>,
    /// initial direction x,y,z
    #[arg(long, allow_hyphen_values = true)]
    init: Option<String>,
    #[arg(long = "max-period")]
    max_period: Option<String>,
}

impl Flags {
    fn pairs(&self) -> Vec<(&'static str, String)> {
        let opts = [
            ("r", &self.r),
            ("r-min", &self.r_min),
            ("r-max", &self.r_max),
            ("nr", &self.nr),
            ("iters", &self.iters),
            ("tail", &self.tail),
            ("grid", &self.grid),
            ("obs", &self.obs),
            ("overlay", &self.overlay),
            ("digits", &self.digits),
            ("out", &self.out),
            ("svg", &self.svg),
            ("threads", &self.threads),
            ("seed", &self.seed),
            ("word", &self.word),
            ("n-max", &self.n_max),
            ("inits", &self.inits),
            ("symbols", &self.symbols),
            ("r-list", &self.r_list),
            ("init", &self.init),
            ("max-period", &self.max_period),
        ];
        let mut out: Vec<(&'static str, String)> = opts.into_iter().filter_map(|(k, v)| v.clone().map(|v| (k, v))).collect();
        if self.log_theta {
            out.push(("log-theta", "true".into()));
        }
        out
    }
}

fn build_config(name: &str, flags: &Flags) -> collapse_lab::Result<RunConfig> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &flags.config {
        cfg.apply_text(&std::fs::read_to_string(path)?)?;
    }
    cfg.set("command", name)?;
    for (k, v) in flags.pairs() {
        cfg.set(k, &v)?;
    }
    Ok(cfg)
}

fn execute(name: &str, flags: &Flags) -> collapse_lab::Result<bool> {
    let cfg = build_config(name, flags)?;
    if let Some(n) = cfg.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| collapse_lab::Error::Config(e.to_string()))?;
    }
    let out = run(&cfg)?;
    match &cfg.out {
        Some(p) => std::fs::write(resolve_output(p), &out.csv)?,
        None => print!("{}", out.csv),
    }
    if let (Some(p), Some(svg)) = (&cfg.svg, &out.svg) {
        std::fs::write(resolve_output(p), svg)?;
    }
    eprint!("{}", out.report);
    Ok(out.ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, flags) = match &cli.command {
        Command::Simulate(f) => ("simulate", f),
        Command::Bifurcate(f) => ("bifurcate", f),
        Command::Windows(f) => ("windows", f),
        Command::Spectrum(f) => ("spectrum", f),
        Command::Pattern(f) => ("pattern", f),
        Command::Validate(f) => ("validate", f),
        Command::Lyapunov(f) => ("lyapunov", f),
        Command::Rotation(f) => ("rotation", f),
    };
    match execute(name, flags) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
